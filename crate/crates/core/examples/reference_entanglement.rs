//! Two-mirror covariance and logarithmic negativity at the reference operating point.

use sqlent::entangle::{assemble, log_negativity, physicality_check};
use sqlent::params::ModeParams;
use sqlent::wiener::{conditional_moments, Method};

fn main() -> sqlent::error::Result<()> {
    let hz = std::f64::consts::TAU;
    let common = ModeParams::new(1600.0 * hz, 230.0 * hz, 1270.0 * hz);
    let differential = ModeParams::new(184.0 * hz, 230.0 * hz, 1270.0 * hz);
    for method in [Method::Closed, Method::Numeric] {
        let v = assemble(
            &conditional_moments(&common, method)?,
            &conditional_moments(&differential, method)?,
        )?;
        let ln = log_negativity(&v)?;
        let phys = physicality_check(&v);
        println!("[{}]", method.name());
        println!("V_ee = {:.6e}V_en = {:.6e}", v.v_ee(), v.v_en());
        println!("symplectic eigenvalues {:?}", phys.symplectic_eigenvalues);
        println!("Σ = {:.6}  det V = {:.6}  σ⁻ = {:.6}  E_N = {:.4}", ln.sigma, ln.det_v, ln.sigma_minus, ln.e_n);
    }

    // equal strengths leave the mirrors separable
    let same = conditional_moments(&common, Method::Closed)?;
    println!("equal strengths: E_N = {}", log_negativity(&assemble(&same, &same)?)?.e_n);
    Ok(())
}
