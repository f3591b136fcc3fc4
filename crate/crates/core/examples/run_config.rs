//! Drive the command layer from a JSON config, as the `sqlent` binary does.
//!
//!     cargo run --example run_config -- examples/configs/reference.json

use sqlent::cli::{cmd_entangle, entangle_report, RunConfig};
use sqlent::wiener::Method;

fn main() -> sqlent::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/reference.json").to_string());
    let cfg = RunConfig::from_path(path.as_ref())?;
    print!("{}", cmd_entangle(&cfg, Method::Closed)?);
    eprintln!("E_N = {:.4}", entangle_report(&cfg, Method::Closed)?.e_n);
    Ok(())
}
