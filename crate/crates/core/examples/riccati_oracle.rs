//! The Kalman–Bucy steady state as an independent check on the Wiener filter.

use sqlent::params::ModeParams;
use sqlent::riccati::{care_solve, to_state_space};
use sqlent::spectra::build_spectra;
use sqlent::wiener::conditional_moments_numeric;

fn main() -> sqlent::error::Result<()> {
    let mode = ModeParams::new(1.0, 0.3, 3.0)
        .with_pendulum(0.5, 0.2)
        .with_phi(0.4)
        .with_laser_db(3.0, 1.0);
    let model = to_state_space(&mode)?;
    println!("A = {:.4}Q = {:.4}C = {:.4}R = {:.6}", model.a, model.q, model.c, model.r);
    let v = care_solve(&model)?;
    println!("V = {v:.10}");
    println!("|residual| = {:.2e}", model.residual(&v).norm());

    let wiener = conditional_moments_numeric(&build_spectra(&mode)?)?;
    println!(
        "Wiener - Riccati: {:.2e} {:.2e} {:.2e}",
        wiener.v_xx - v[(0, 0)],
        wiener.v_pp - v[(1, 1)],
        wiener.v_xp - v[(0, 1)]
    );
    Ok(())
}
