//! High-minus-low ESG sensitivity differentials as one parameter varies.
//!
//! cargo run --example parameter_sweep

use mpesg::equilibrium::{parse_grid, sensitivity_sweep, ModelParams, PricingRule};

fn main() -> mpesg::Result<()> {
    let p = ModelParams::baseline();
    for (name, grid) in [("mu", "0.1:0.5:5"), ("alpha", "0:0.04:5"), ("psi", "0.25,0.5,0.75,1.0")] {
        let sweep = sensitivity_sweep(&p, name, &parse_grid(grid)?, PricingRule::MarketClearing)?;
        println!("{name}");
        for r in &sweep.rows {
            println!("  {:>6.3}  target {:+.6}  path {:+.6}", r.value, r.target_differential, r.path_differential);
        }
    }
    Ok(())
}
