//! Maximized entanglement against Ω_x/Ω_F for 0, 5 and 10 dB of laser noise.

use sqlent::optimize::{linspace, sweep, threshold_ratio, OptimizeConfig};

fn main() -> sqlent::error::Result<()> {
    let cfg = OptimizeConfig::default();
    let levels = [0.0, 5.0, 10.0];
    let rows = sweep(&linspace(2.0, 10.0, 17), &levels, &cfg)?;
    println!("{:>6} {:>5} {:>8} {:>9} {:>9}", "ratio", "dB", "E_N", "Ωc/Ω_F", "Ωd/Ω_F");
    for p in &rows {
        println!(
            "{:>6.2} {:>5} {:>8.4} {:>9.4} {:>9.4}",
            p.ratio_xf, p.laser_db, p.e_n_max, p.omega_alpha_c_opt, p.omega_alpha_d_opt
        );
    }
    for db in levels {
        println!("threshold at {db:>4} dB: Ω_x/Ω_F = {:.3}", threshold_ratio(db, &cfg)?);
    }
    Ok(())
}
