use crate::error::{Error, Result};

/// Prices bracketing an announcement: 10 minutes before and 20 minutes after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePair {
    pub pre: f64,
    pub post: f64,
}

impl PricePair {
    pub fn new(pre: f64, post: f64) -> Result<Self> {
        if !(pre > 0.0 && post > 0.0 && pre.is_finite() && post.is_finite()) {
            return Err(Error::InvalidArgument(format!("prices must be positive and finite, got ({pre}, {post})")));
        }
        Ok(Self { pre, post })
    }
}

/// Log return in percent.
pub fn event_return(pair: PricePair) -> Result<f64> {
    let p = PricePair::new(pair.pre, pair.post)?;
    Ok(100.0 * (p.post / p.pre).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ret(a: f64, b: f64) -> Result<f64> {
        event_return(PricePair { pre: a, post: b })
    }

    #[test]
    fn known_values() {
        assert!((ret(100.0, 100.5).unwrap() - 0.498_754_151_103_897).abs() < 1e-12);
        assert_eq!(ret(37.2, 37.2).unwrap(), 0.0);
        assert!((ret(100.0, 99.0).unwrap() - -1.005_033_585_350_145).abs() < 1e-12);
    }

    #[test]
    fn non_positive_rejected() {
        assert!(ret(0.0, 1.0).is_err());
        assert!(ret(1.0, -2.0).is_err());
    }
}
