//! Minimum-phase factor of the homodyne spectrum and the causal Wiener gain.

use num_complex::Complex64;
use sqlent::params::ModeParams;
use sqlent::spectra::build_spectra;
use sqlent::wiener::{orthogonality_residual, spectral_factorize, wiener_gain};

fn main() -> sqlent::error::Result<()> {
    let mode = ModeParams::new(1.0, 0.3, 3.0).with_pendulum(0.5, 0.2);
    let spectra = build_spectra(&mode)?;
    let factor = spectral_factorize(&spectra.s_y)?;

    println!("gain {:.6}", factor.gain);
    for z in &factor.zeros {
        println!("zero {z:.6}");
    }
    for p in &factor.poles {
        println!("pole {p:.6}");
    }
    let worst = (0..200)
        .map(|k| {
            let w = 10f64.powf(-2.0 + 4.0 * k as f64 / 199.0);
            let exact = spectra.s_y.eval_real(w).re;
            ((factor.eval(w).norm_sqr() - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    println!("max |s_y|² / S_y - 1 = {worst:.2e}");

    let k = wiener_gain(&spectra)?;
    for w in [0.1, 0.5, 1.0, 3.0] {
        let g = k.eval(Complex64::new(w, 0.0));
        println!("K_x({w}) = {:.6} ∠ {:.4} rad", g.norm(), g.arg());
    }
    println!("orthogonality residual {:.2e}", orthogonality_residual(&spectra)?);
    Ok(())
}
