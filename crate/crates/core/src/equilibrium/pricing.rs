use super::params::{FirmProfile, Investor, ModelParams, PricingRule, Shock};
use crate::error::{Error, Result};

/// Expected liquidating dividend `A * (1 + (gamma - kappa) * theta)`.
pub fn dividend(p: &ModelParams, f: FirmProfile) -> f64 {
    p.a * (1.0 + p.net_benefit() * f.theta)
}

/// Effective risk-free rate and dividend variance after a shock.
fn shocked(p: &ModelParams, shock: Shock) -> Result<(f64, f64)> {
    let gross = 1.0 + p.r_f + shock.eps_ts;
    let multiplier = 1.0 + p.psi * shock.eps_ps;
    if !(gross > 0.0) || !(multiplier > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shock {shock:?} leaves a non-positive gross rate or variance"
        )));
    }
    Ok((gross - 1.0, p.variance() * multiplier))
}

fn demand(expected: f64, price: f64, rate: f64, variance: f64, lambda: f64, warm_glow: f64) -> f64 {
    (expected - price * (1.0 + rate) + warm_glow) / (lambda * variance)
}

/// Mean-variance demand of one investor type at `price`.
pub fn optimal_demand(p: &ModelParams, f: FirmProfile, price: f64, investor: Investor) -> f64 {
    let warm_glow = match investor {
        Investor::Traditional => 0.0,
        Investor::Esg => p.alpha * f.theta,
    };
    demand(dividend(p, f), price, p.r_f, p.variance(), p.lambda, warm_glow)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOutcome {
    pub price: f64,
    pub demand_trad: f64,
    pub demand_esg: f64,
    pub rule: PricingRule,
}

impl EquilibriumOutcome {
    pub fn aggregate_demand(&self, mu: f64) -> f64 {
        (1.0 - mu) * self.demand_trad + mu * self.demand_esg
    }
}

/// Solves `(1 - mu) q_trad + mu q_esg = 1` for the price by bisection.
pub fn clear_market(p: &ModelParams, f: FirmProfile, shock: Shock) -> Result<EquilibriumOutcome> {
    let (rate, variance) = shocked(p, shock)?;
    let expected = dividend(p, f);
    let glow = p.alpha * f.theta;
    let q_trad = |price: f64| demand(expected, price, rate, variance, p.lambda, 0.0);
    let q_esg = |price: f64| demand(expected, price, rate, variance, p.lambda, glow);
    let excess = |price: f64| (1.0 - p.mu) * q_trad(price) + p.mu * q_esg(price) - 1.0;

    let price = bisect_decreasing(excess, expected / (1.0 + rate))?;
    Ok(EquilibriumOutcome {
        price,
        demand_trad: q_trad(price),
        demand_esg: q_esg(price),
        rule: PricingRule::MarketClearing,
    })
}

/// Root of a decreasing function, bracketing outward from `guess` and
/// bisecting to machine precision.
fn bisect_decreasing(g: impl Fn(f64) -> f64, guess: f64) -> Result<f64> {
    let mut width = guess.abs().max(1.0);
    let (mut lo, mut hi) = (guess - width, guess + width);
    let mut expansions = 0;
    loop {
        let (glo, ghi) = (g(lo), g(hi));
        if !glo.is_finite() || !ghi.is_finite() {
            return Err(Error::Bracketing(format!("non-finite excess demand on [{lo}, {hi}]")));
        }
        if glo >= 0.0 && ghi <= 0.0 {
            break;
        }
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Bracketing(format!("no sign change found around {guess}")));
        }
        width *= 2.0;
        if glo < 0.0 {
            lo = guess - width;
        }
        if ghi > 0.0 {
            hi = guess + width;
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // closer endpoint in residual
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

/// Market-clearing price solved by hand: `(E[D] + mu alpha theta - lambda sigma^2) / (1 + r_f)`.
pub fn closed_form_clearing_price(p: &ModelParams, f: FirmProfile) -> f64 {
    (dividend(p, f) + p.mu * p.alpha * f.theta - p.lambda * p.variance()) / (1.0 + p.r_f)
}

/// Printed pricing formula: `(E[D] + mu alpha theta / lambda - sigma^2) / (1 + r_f)`.
pub fn equilibrium_price_as_stated(p: &ModelParams, f: FirmProfile) -> f64 {
    (dividend(p, f) + p.mu * p.alpha * f.theta / p.lambda - p.variance()) / (1.0 + p.r_f)
}

/// Unshocked price under the chosen rule.
pub fn price(p: &ModelParams, f: FirmProfile, rule: PricingRule) -> Result<f64> {
    match rule {
        PricingRule::MarketClearing => Ok(clear_market(p, f, Shock::default())?.price),
        PricingRule::AsStated => Ok(equilibrium_price_as_stated(p, f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn firm(theta: f64) -> FirmProfile {
        FirmProfile::new(theta).unwrap()
    }

    #[test]
    fn dividend_values() {
        let p = ModelParams::baseline();
        assert!((dividend(&p, firm(0.0)) - 100.0).abs() < 1e-12);
        assert!((dividend(&p, firm(1.0)) - 103.0).abs() < 1e-12);
        assert!((dividend(&p, firm(0.5)) - 101.5).abs() < 1e-12);
    }

    #[test]
    fn zero_excess_return_gives_zero_demand() {
        let p = ModelParams::baseline();
        let price = dividend(&p, firm(0.0)) / (1.0 + p.r_f);
        assert!(optimal_demand(&p, firm(0.0), price, Investor::Traditional).abs() < 1e-12);
        assert!(optimal_demand(&p, firm(0.0), price, Investor::Esg).abs() < 1e-12);
    }

    #[test]
    fn esg_demand_gap() {
        let p = ModelParams::baseline();
        for &(theta, price) in &[(0.3, 90.0), (0.9, 99.0), (1.0, 120.0)] {
            let gap = optimal_demand(&p, firm(theta), price, Investor::Esg)
                - optimal_demand(&p, firm(theta), price, Investor::Traditional);
            assert!((gap - p.alpha * theta / (p.lambda * p.variance())).abs() < 1e-9);
        }
    }

    /// Grid search over holdings of the mean-variance utility
    /// `q (E[D] - P(1+r) + glow) - lambda/2 q^2 sigma^2`.
    #[test]
    fn demand_matches_brute_force_utility_maximum() {
        let p = ModelParams::baseline();
        let f = firm(0.5);
        let price = 99.0;
        for (investor, glow) in [(Investor::Traditional, 0.0), (Investor::Esg, p.alpha * 0.5)] {
            let utility = |q: f64| {
                q * (dividend(&p, f) - price * (1.0 + p.r_f) + glow) - 0.5 * p.lambda * q * q * p.variance()
            };
            let (mut best_q, mut best_u) = (0.0, f64::NEG_INFINITY);
            let (mut lo, mut hi) = (-200.0, 200.0);
            for _ in 0..8 {
                let step = (hi - lo) / 1000.0;
                for k in 0..=1000 {
                    let q = lo + step * k as f64;
                    let u = utility(q);
                    if u > best_u {
                        best_u = u;
                        best_q = q;
                    }
                }
                lo = best_q - 2.0 * step;
                hi = best_q + 2.0 * step;
            }
            let q = optimal_demand(&p, f, price, investor);
            // utility is flat to rounding within ~1e-7 of the optimum
            assert!((q - best_q).abs() < 1e-6, "{q} vs {best_q}");
        }
    }

    #[test]
    fn clearing_price_baseline_theta_zero() {
        let p = ModelParams::baseline();
        let out = clear_market(&p, firm(0.0), Shock::default()).unwrap();
        assert!((out.price - (100.0 - 0.045) / 1.03).abs() < 1e-10);
        assert!((out.price - 97.043689).abs() < 1e-6);
        assert!((out.aggregate_demand(p.mu) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_esg_investors_makes_alpha_irrelevant() {
        let p = ModelParams { mu: 0.0, ..ModelParams::baseline() };
        let a = clear_market(&p, firm(0.7), Shock::default()).unwrap().price;
        let b = clear_market(&ModelParams { alpha: 0.5, ..p }, firm(0.7), Shock::default()).unwrap().price;
        assert_eq!(a, b);
    }

    #[test]
    fn zero_shock_is_identity() {
        let p = ModelParams::baseline();
        let a = clear_market(&p, firm(0.4), Shock::default()).unwrap();
        let b = clear_market(&p, firm(0.4), Shock { eps_ts: 0.0, eps_ps: 0.0 }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn as_stated_formula_values() {
        let p = ModelParams::baseline();
        let p0 = equilibrium_price_as_stated(&p, firm(0.0));
        assert!((p0 - (100.0 - 0.0225) / 1.03).abs() < 1e-12);
        assert!((p0 - 97.065534).abs() < 1e-6);
        let p1 = equilibrium_price_as_stated(&p, firm(0.1));
        assert!((p1 - 97.357).abs() < 1e-3, "{p1}");
    }

    #[test]
    fn rules_coincide_at_unit_risk_aversion_without_glow() {
        // With lambda = 1 the two formulas share the variance term and differ
        // only through mu*alpha*theta*(1/lambda - 1) = 0.
        let p = ModelParams { lambda: 1.0, ..ModelParams::baseline() };
        for theta in [0.0, 0.3, 1.0] {
            let a = clear_market(&p, firm(theta), Shock::default()).unwrap().price;
            assert!((a - equilibrium_price_as_stated(&p, firm(theta))).abs() < 1e-10);
        }
    }

    #[test]
    fn bad_shock_rejected() {
        let p = ModelParams::baseline();
        assert!(clear_market(&p, firm(0.2), Shock { eps_ts: 0.0, eps_ps: -3.0 }).is_err());
    }
}
