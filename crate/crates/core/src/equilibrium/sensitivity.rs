use log::warn;

use super::params::{FirmProfile, ModelParams, PricingRule, Shock};
use super::pricing::{clear_market, price};
use crate::error::Result;

/// Return response per unit target surprise, including the investor
/// composition term `mu alpha theta / (lambda P0 (1+r_f)^2)`.
pub fn target_sensitivity(p: &ModelParams, f: FirmProfile, rule: PricingRule) -> Result<f64> {
    let gross = 1.0 + p.r_f;
    let p0 = price(p, f, rule)?;
    Ok(-1.0 / gross + p.mu * p.alpha * f.theta / (p.lambda * p0 * gross * gross))
}

/// Return response per unit path surprise.
pub fn path_sensitivity(p: &ModelParams, f: FirmProfile, rule: PricingRule) -> Result<f64> {
    let gross = 1.0 + p.r_f;
    let p0 = price(p, f, rule)?;
    Ok(-p.psi / gross - p.psi * p.a * p.net_benefit() * f.theta / (gross * p0))
}

/// Default finite-difference step in theta.
pub const FD_STEP: f64 = 1e-5;
/// Relative agreement required between step `h` and `h/2`.
pub const FD_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    pub value: f64,
    /// Same derivative at half the step.
    pub halved: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossPartials {
    /// d^2 r / (d eps_ts d theta)
    pub target: FiniteDifference,
    /// d^2 r / (d eps_ps d theta)
    pub path: FiniteDifference,
}

/// Derivative in theta of `g` at `theta`, second-order accurate; one-sided
/// near the ends of `[0, 1]`.
pub fn theta_derivative(g: impl Fn(f64) -> Result<f64>, theta: f64, h: f64) -> Result<f64> {
    if theta - h < 0.0 {
        Ok((-3.0 * g(theta)? + 4.0 * g(theta + h)? - g(theta + 2.0 * h)?) / (2.0 * h))
    } else if theta + h > 1.0 {
        Ok((3.0 * g(theta)? - 4.0 * g(theta - h)? + g(theta - 2.0 * h)?) / (2.0 * h))
    } else {
        Ok((g(theta + h)? - g(theta - h)?) / (2.0 * h))
    }
}

fn with_halving(g: impl Fn(f64) -> Result<f64>, theta: f64, h: f64) -> Result<FiniteDifference> {
    let value = theta_derivative(&g, theta, h)?;
    let halved = theta_derivative(&g, theta, 0.5 * h)?;
    let scale = value.abs().max(halved.abs());
    let converged = (value - halved).abs() <= FD_REL_TOL * scale || scale == 0.0 || (value - halved).abs() < 1e-12;
    if !converged {
        warn!("finite difference at theta={theta} not converged: {value} vs {halved}");
    }
    Ok(FiniteDifference { value, halved, converged })
}

/// Cross-partials of the two sensitivities with respect to theta.
pub fn cross_partials(p: &ModelParams, f: FirmProfile, rule: PricingRule, step: f64) -> Result<CrossPartials> {
    let firm = |theta: f64| FirmProfile { theta };
    Ok(CrossPartials {
        target: with_halving(|t| target_sensitivity(p, firm(t), rule), f.theta, step)?,
        path: with_halving(|t| path_sensitivity(p, firm(t), rule), f.theta, step)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericSensitivity {
    /// d ln P / d eps_ts from re-solving the clearing price.
    pub target: f64,
    /// d ln P / d eps_ps from re-solving the clearing price.
    pub path: f64,
}

/// Static repricing responses by central differences of `ln P` in the shocks.
pub fn numeric_sensitivity(p: &ModelParams, f: FirmProfile, step: f64) -> Result<NumericSensitivity> {
    let ln_price = |shock: Shock| -> Result<f64> { Ok(clear_market(p, f, shock)?.price.ln()) };
    let target = (ln_price(Shock { eps_ts: step, eps_ps: 0.0 })? - ln_price(Shock { eps_ts: -step, eps_ps: 0.0 })?)
        / (2.0 * step);
    let path = (ln_price(Shock { eps_ts: 0.0, eps_ps: step })? - ln_price(Shock { eps_ts: 0.0, eps_ps: -step })?)
        / (2.0 * step);
    Ok(NumericSensitivity { target, path })
}

/// `mu alpha / lambda` against `psi A (gamma - kappa)(1 + r_f) / sigma_D^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn asymmetry_condition(p: &ModelParams) -> AsymmetryCheck {
    let lhs = p.mu * p.alpha / p.lambda;
    let rhs = p.psi * p.a * p.net_benefit() * (1.0 + p.r_f) / p.variance();
    AsymmetryCheck { lhs, rhs, holds: lhs > rhs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn firm(theta: f64) -> FirmProfile {
        FirmProfile::new(theta).unwrap()
    }

    const RULES: [PricingRule; 2] = [PricingRule::MarketClearing, PricingRule::AsStated];

    #[test]
    fn zero_theta_sensitivities() {
        let p = ModelParams::baseline();
        for rule in RULES {
            let t = target_sensitivity(&p, firm(0.0), rule).unwrap();
            assert_eq!(t, -1.0 / 1.03);
            assert!((t - -0.970874).abs() < 1e-6);
            let s = path_sensitivity(&p, firm(0.0), rule).unwrap();
            assert!((s - -0.5 / 1.03).abs() < 1e-15);
            assert!((s - -0.485437).abs() < 1e-6);
        }
    }

    #[test]
    fn path_sensitivity_at_high_esg() {
        let p = ModelParams::baseline();
        let s = path_sensitivity(&p, firm(0.9), PricingRule::MarketClearing).unwrap();
        let p0 = (102.7 + 0.3 * 0.01 * 0.9 - 0.045) / 1.03;
        let expected = -0.5 / 1.03 - 0.5 * 100.0 * 0.03 * 0.9 / (1.03 * p0);
        assert!((s - expected).abs() < 1e-12);
        assert!((s - -0.4985).abs() < 1e-4);
    }

    #[test]
    fn no_path_uncertainty_means_no_path_response() {
        let p = ModelParams { psi: 0.0, ..ModelParams::baseline() };
        for theta in [0.0, 0.5, 1.0] {
            assert_eq!(path_sensitivity(&p, firm(theta), PricingRule::MarketClearing).unwrap(), 0.0);
        }
    }

    #[test]
    fn target_sensitivity_rises_with_esg() {
        let p = ModelParams::baseline();
        for rule in RULES {
            let lo = target_sensitivity(&p, firm(0.1), rule).unwrap();
            let hi = target_sensitivity(&p, firm(0.9), rule).unwrap();
            assert!(hi > lo);
        }
    }

    #[test]
    fn cross_partial_signs_and_no_esg_channel() {
        let p = ModelParams::baseline();
        let c = cross_partials(&p, firm(0.5), PricingRule::MarketClearing, FD_STEP).unwrap();
        assert!(c.target.value > 0.0);
        assert!(c.path.value < 0.0);
        assert!(c.target.converged && c.path.converged);

        let p = ModelParams { mu: 0.0, ..p };
        let c = cross_partials(&p, firm(0.5), PricingRule::MarketClearing, FD_STEP).unwrap();
        assert!(c.target.value.abs() < 1e-8);
    }

    #[test]
    fn cross_partial_error_shrinks_fourfold_on_halving() {
        // exact derivative of the target composition term for the clearing rule
        let p = ModelParams::baseline();
        let gross: f64 = 1.03;
        let k = p.mu * p.alpha / (p.lambda * gross * gross);
        let n = |t: f64| 100.0 * (1.0 + 0.03 * t) + p.mu * p.alpha * t - p.lambda * p.variance();
        let dn = 100.0 * 0.03 + p.mu * p.alpha;
        let theta: f64 = 0.5;
        // d/dt [k t (1+r)/N(t)] = k (1+r) (N - t N') / N^2
        let exact = k * gross * (n(theta) - theta * dn) / (n(theta) * n(theta));
        let g = |t: f64| target_sensitivity(&p, FirmProfile { theta: t }, PricingRule::MarketClearing);
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| (theta_derivative(g, theta, h).unwrap() - exact).abs())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio} errs {errs:?}");
        }
    }

    #[test]
    fn boundary_thetas_use_one_sided_differences() {
        let p = ModelParams::baseline();
        let lo = cross_partials(&p, firm(0.0), PricingRule::MarketClearing, FD_STEP).unwrap();
        let inner = cross_partials(&p, firm(2e-5), PricingRule::MarketClearing, FD_STEP).unwrap();
        assert!((lo.target.value - inner.target.value).abs() < 1e-8);
        let hi = cross_partials(&p, firm(1.0), PricingRule::MarketClearing, FD_STEP).unwrap();
        assert!(hi.path.value < 0.0);
    }

    #[test]
    fn repricing_response_and_composition_gap() {
        let p = ModelParams::baseline();
        for theta in [0.0, 0.25, 0.9] {
            let f = firm(theta);
            let num = numeric_sensitivity(&p, f, 1e-5).unwrap();
            assert!((num.target - -1.0 / 1.03).abs() < 1e-6);
            let p0 = price(&p, f, PricingRule::MarketClearing).unwrap();
            let gap = target_sensitivity(&p, f, PricingRule::MarketClearing).unwrap() - num.target;
            let term = p.mu * p.alpha * theta / (p.lambda * p0 * 1.03 * 1.03);
            assert!((gap - term).abs() < 1e-8);
        }
    }

    #[test]
    fn asymmetry_values() {
        let p = ModelParams::baseline();
        let a = asymmetry_condition(&p);
        assert!((a.lhs - 0.0015).abs() < 1e-15);
        assert!((a.rhs - 0.5 * 100.0 * 0.03 * 1.03 / 0.0225).abs() < 1e-9);
        assert!((a.rhs - 68.667).abs() < 1e-3);
        assert!(!a.holds);

        let a = asymmetry_condition(&ModelParams { psi: 0.0, ..p });
        assert_eq!(a.rhs, 0.0);
        assert!(a.holds);
    }

    #[test]
    fn asymmetry_under_joint_rescaling_follows_ratio() {
        let p = ModelParams { psi: 0.00001, ..ModelParams::baseline() };
        for factor in [0.5, 2.0, 10.0] {
            let q = ModelParams { a: p.a * factor, sigma_d: p.sigma_d * factor.sqrt(), ..p };
            let a = asymmetry_condition(&q);
            let rhs = q.psi * q.a * q.net_benefit() * (1.0 + q.r_f) / (q.sigma_d * q.sigma_d);
            assert_eq!(a.holds, a.lhs > rhs);
            assert!((a.rhs - asymmetry_condition(&p).rhs).abs() < 1e-12);
        }
    }
}
