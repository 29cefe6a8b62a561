//! Baseline prices, ESG premiums and return sensitivities across ESG scores,
//! the high-minus-low differentials for a 25 bp surprise, and the asymmetry
//! condition.
//!
//! cargo run --example equilibrium_calibration

use mpesg::equilibrium::{
    asymmetry_condition, calibration_report, clear_market, closed_form_clearing_price, differential_report,
    FirmProfile, ModelParams, PricingRule, Shock, THETA_HIGH, THETA_LOW,
};

fn main() -> mpesg::Result<()> {
    let p = ModelParams::baseline();
    let rule = PricingRule::MarketClearing;

    println!("{:>6}{:>12}{:>10}{:>10}{:>10}", "theta", "price", "premium%", "target", "path");
    for r in calibration_report(&p, &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0], rule)? {
        println!(
            "{:>6.2}{:>12.4}{:>10.3}{:>10.4}{:>10.4}",
            r.theta,
            r.price,
            100.0 * r.premium,
            r.target_sensitivity,
            r.path_sensitivity
        );
    }

    let f = FirmProfile::new(0.5)?;
    let eq = clear_market(&p, f, Shock::default())?;
    println!(
        "\ntheta=0.5: bisection {:.10}, closed form {:.10}, aggregate demand {:.12}",
        eq.price,
        closed_form_clearing_price(&p, f),
        eq.aggregate_demand(p.mu)
    );

    let d = differential_report(&p, THETA_LOW, THETA_HIGH, 25.0, rule)?;
    println!("\nhigh minus low ESG ({THETA_HIGH} vs {THETA_LOW}), 25 bp surprise:");
    println!("  target: {:+.4} per unit, {:+.3} bp impact", d.target_differential, d.target_impact_differential_bp);
    println!("  path:   {:+.4} per unit, {:+.3} bp impact", d.path_differential, d.path_impact_differential_bp);
    println!("  cross-partials at theta={}: target {:+.5}, path {:+.5}", d.cross_partial_theta, d.cross_partial_target, d.cross_partial_path);

    let a = asymmetry_condition(&p);
    println!("\nasymmetry condition: lhs {:.4} vs rhs {:.4} -> holds: {}", a.lhs, a.rhs, a.holds);
    Ok(())
}
