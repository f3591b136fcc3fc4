//! Conditional-state uncertainty ellipses in ground-state units.

use sqlent::entangle::{ellipse_axes, ellipse_points};
use sqlent::params::ModeParams;
use sqlent::wiener::{conditional_moments, Method};

fn main() -> sqlent::error::Result<()> {
    let hz = std::f64::consts::TAU;
    let common = ModeParams::new(1600.0 * hz, 230.0 * hz, 1270.0 * hz);
    let differential = ModeParams::new(184.0 * hz, 230.0 * hz, 1270.0 * hz);
    let omega_norm = 0.5 * (common.omega_alpha + differential.omega_alpha);
    for (name, mode) in [("common", common), ("differential", differential)] {
        let m = conditional_moments(&mode, Method::Closed)?;
        let axes = ellipse_axes(&m, omega_norm)?;
        println!(
            "{name}: semi-axes {:.4} / {:.4} at {:.1}°, aspect {:.4}",
            axes.major,
            axes.minor,
            axes.angle.to_degrees(),
            axes.major / axes.minor
        );
        for (x, p) in ellipse_points(&m, omega_norm, 8)? {
            println!("  ({x:+.4}, {p:+.4})");
        }
    }
    Ok(())
}
