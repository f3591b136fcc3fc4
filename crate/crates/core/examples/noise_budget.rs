//! Noise budget at the reference operating point: where the quantum, force and sensing curves cross the SQL.

use sqlent::params::ModeParams;
use sqlent::spectra::budget;

fn main() -> sqlent::error::Result<()> {
    let hz = std::f64::consts::TAU;
    let (wf, wx) = (230.0 * hz, 1270.0 * hz);
    let common = ModeParams::new(1600.0 * hz, wf, wx);
    let differential = ModeParams::new(184.0 * hz, wf, wx);

    println!("{:>9} {:>10} {:>10} {:>10} {:>10} {:>10}", "f [Hz]", "quant_c", "quant_d", "force", "sens", "total_d");
    for f in [30.0, 100.0, 184.0, 230.0, 500.0, 1270.0, 1600.0, 5000.0] {
        let c = budget(&common, f * hz)?;
        let d = budget(&differential, f * hz)?;
        println!(
            "{f:>9.1} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            c.s_quant, d.s_quant, d.s_force, d.s_sens, d.s_total
        );
    }
    // each curve touches 1 at its own corner frequency
    println!("s_force(Ω_F) = {}", budget(&differential, wf)?.s_force);
    println!("s_sens(Ω_x)  = {}", budget(&differential, wx)?.s_sens);
    println!("s_quant(Ω_α^d) = {}", budget(&differential, differential.omega_alpha)?.s_quant);
    Ok(())
}
