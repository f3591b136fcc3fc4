//! Conditional variances by all three routes, free mass and heavy pendulum.

use sqlent::params::ModeParams;
use sqlent::wiener::{conditional_moments, uncertainty_product, Method};

fn main() -> sqlent::error::Result<()> {
    let hz = std::f64::consts::TAU;
    let cases = [
        ("common, reference", ModeParams::new(1600.0 * hz, 230.0 * hz, 1270.0 * hz)),
        ("differential, reference", ModeParams::new(184.0 * hz, 230.0 * hz, 1270.0 * hz)),
        // the closed forms assume a nearly free mass and miss this one badly
        ("heavy pendulum", ModeParams::new(1.0, 0.3, 3.0).with_pendulum(0.5, 0.2)),
    ];
    for (name, mode) in cases {
        println!("{name}");
        for method in [Method::Closed, Method::Numeric, Method::Riccati] {
            match conditional_moments(&mode, method) {
                Ok(m) => println!(
                    "  {:<8} Vxx {:.10e}  Vpp {:.10e}  Vxp {:.10e}  U/(ħ²/4) {:.6}",
                    method.name(),
                    m.v_xx,
                    m.v_pp,
                    m.v_xp,
                    4.0 * uncertainty_product(&m)
                ),
                Err(e) => println!("  {:<8} {e}", method.name()),
            }
        }
    }
    Ok(())
}
