use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calibration of the two-period economy.
///
/// Field names in configuration files follow the usual notation:
/// `A, kappa, gamma, mu, alpha, lambda, sigma_D, r_f, psi`. Missing keys take
/// their baseline value; unknown keys are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Baseline dividend level.
    #[serde(rename = "A")]
    pub a: f64,
    /// ESG cost as a fraction of the dividend.
    pub kappa: f64,
    /// ESG benefit as a fraction of the dividend.
    pub gamma: f64,
    /// Share of ESG-conscious investors.
    pub mu: f64,
    /// Warm-glow utility per unit holding per unit ESG score.
    pub alpha: f64,
    /// Absolute risk aversion.
    pub lambda: f64,
    /// Dividend volatility; `sigma_D^2` enters demand denominators.
    #[serde(rename = "sigma_D")]
    pub sigma_d: f64,
    pub r_f: f64,
    /// Sensitivity of dividend variance to path surprises.
    pub psi: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::baseline()
    }
}

pub const PARAM_NAMES: [&str; 9] = ["A", "kappa", "gamma", "mu", "alpha", "lambda", "sigma_D", "r_f", "psi"];

impl ModelParams {
    pub const fn baseline() -> Self {
        Self {
            a: 100.0,
            kappa: 0.02,
            gamma: 0.05,
            mu: 0.30,
            alpha: 0.01,
            lambda: 2.0,
            sigma_d: 0.15,
            r_f: 0.03,
            psi: 0.5,
        }
    }

    pub fn variance(&self) -> f64 {
        self.sigma_d * self.sigma_d
    }

    /// Net ESG dividend uplift `gamma - kappa`.
    pub fn net_benefit(&self) -> f64 {
        self.gamma - self.kappa
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a,
            self.kappa,
            self.gamma,
            self.mu,
            self.alpha,
            self.lambda,
            self.sigma_d,
            self.r_f,
            self.psi,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.gamma <= self.kappa {
            return Err(Error::InvalidParams(format!(
                "gamma ({}) must exceed kappa ({})",
                self.gamma, self.kappa
            )));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParams(format!("mu ({}) must lie in [0, 1]", self.mu)));
        }
        if self.lambda <= 0.0 {
            return Err(Error::InvalidParams(format!("lambda ({}) must be positive", self.lambda)));
        }
        if self.sigma_d <= 0.0 {
            return Err(Error::InvalidParams(format!("sigma_D ({}) must be positive", self.sigma_d)));
        }
        if 1.0 + self.r_f <= 0.0 {
            return Err(Error::InvalidParams(format!("1 + r_f must be positive (r_f = {})", self.r_f)));
        }
        if self.psi < 0.0 {
            return Err(Error::InvalidParams(format!("psi ({}) must be non-negative", self.psi)));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(*self.field(name)?)
    }

    /// Copy with one parameter replaced (not validated).
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut p = *self;
        *p.field_mut(name)? = value;
        Ok(p)
    }

    fn field(&self, name: &str) -> Result<&f64> {
        Ok(match name {
            "A" => &self.a,
            "kappa" => &self.kappa,
            "gamma" => &self.gamma,
            "mu" => &self.mu,
            "alpha" => &self.alpha,
            "lambda" => &self.lambda,
            "sigma_D" => &self.sigma_d,
            "r_f" => &self.r_f,
            "psi" => &self.psi,
            other => return Err(unknown_param(other)),
        })
    }

    fn field_mut(&mut self, name: &str) -> Result<&mut f64> {
        Ok(match name {
            "A" => &mut self.a,
            "kappa" => &mut self.kappa,
            "gamma" => &mut self.gamma,
            "mu" => &mut self.mu,
            "alpha" => &mut self.alpha,
            "lambda" => &mut self.lambda,
            "sigma_D" => &mut self.sigma_d,
            "r_f" => &mut self.r_f,
            "psi" => &mut self.psi,
            other => return Err(unknown_param(other)),
        })
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_cfg_str(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::InvalidParams(e.message().to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let p: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_cfg_string(&self) -> String {
        PARAM_NAMES
            .iter()
            .map(|n| format!("{n} = {}\n", self.get(n).expect("known name")))
            .collect()
    }
}

fn unknown_param(name: &str) -> Error {
    Error::InvalidArgument(format!(
        "unknown parameter {name:?}; expected one of {}",
        PARAM_NAMES.join(", ")
    ))
}

/// A firm's ESG score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmProfile {
    pub theta: f64,
}

impl FirmProfile {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("ESG score {theta} outside [0, 1]")));
        }
        Ok(Self { theta })
    }
}

/// Monetary shock: `eps_ts` moves the risk-free rate, `eps_ps` scales dividend
/// variance by `1 + psi * eps_ps`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shock {
    pub eps_ts: f64,
    pub eps_ps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Investor {
    Traditional,
    Esg,
}

/// How the unshocked price `P0(theta)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PricingRule {
    /// Root of the market-clearing condition built from optimal demands.
    #[default]
    MarketClearing,
    /// The closed form with `mu*alpha*theta/lambda` and unscaled `sigma_D^2`.
    AsStated,
}

impl std::str::FromStr for PricingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "market_clearing" => Ok(Self::MarketClearing),
            "as_stated" => Ok(Self::AsStated),
            other => Err(Error::InvalidArgument(format!(
                "unknown pricing rule {other:?} (expected market_clearing or as_stated)"
            ))),
        }
    }
}
