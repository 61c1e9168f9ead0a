use std::fmt;
use std::sync::Arc;

use super::numeric::log_expm1_ratio;
use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Law of a bounded real input.
///
/// Custom laws must put mass arbitrarily close to both endpoints of their
/// support; otherwise the Laplace values computed from them are upper bounds.
#[derive(Clone)]
pub enum InputLaw {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Density proportional to `exp(rate · x)` on `[lo, hi]`.
    TruncatedExponential {
        lo: f64,
        hi: f64,
        rate: f64,
    },
    Custom {
        lo: f64,
        hi: f64,
        mean: f64,
        density: Option<RealFn>,
        /// Cumulant generating function of `X - mean`.
        cgf: Option<RealFn>,
        quantile: Option<RealFn>,
    },
}

impl fmt::Debug for InputLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputLaw::Uniform { lo, hi } => write!(f, "Uniform[{lo}, {hi}]"),
            InputLaw::TruncatedExponential { lo, hi, rate } => {
                write!(f, "TruncatedExponential[{lo}, {hi}; rate {rate}]")
            }
            InputLaw::Custom { lo, hi, mean, .. } => write!(f, "Custom[{lo}, {hi}; mean {mean}]"),
        }
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("interval [{lo}, {hi}] is empty or unbounded")))
    }
}

/// Mean of the density proportional to `e^{s u}` on `[0, 1]`.
fn unit_exponential_mean(s: f64) -> f64 {
    if s.abs() < 1e-4 {
        0.5 + s / 12.0 - s.powi(3) / 720.0
    } else {
        -1.0 / (-s).exp_m1() - 1.0 / s
    }
}

impl InputLaw {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        Ok(InputLaw::Uniform { lo, hi })
    }

    pub fn truncated_exponential(lo: f64, hi: f64, rate: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        if !rate.is_finite() {
            return Err(Error::NonFinite {
                field: "rate".into(),
            });
        }
        Ok(InputLaw::TruncatedExponential { lo, hi, rate })
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            InputLaw::Uniform { lo, hi }
            | InputLaw::TruncatedExponential { lo, hi, .. }
            | InputLaw::Custom { lo, hi, .. } => (*lo, *hi),
        }
    }

    fn width(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    pub fn mean(&self) -> f64 {
        match self {
            InputLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            InputLaw::TruncatedExponential { lo, rate, .. } => {
                lo + self.width() * unit_exponential_mean(rate * self.width())
            }
            InputLaw::Custom { mean, .. } => *mean,
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return Ok(0.0);
        }
        match self {
            InputLaw::Uniform { .. } => Ok(1.0 / self.width()),
            InputLaw::TruncatedExponential { rate, .. } => {
                let l = self.width();
                Ok((rate * (x - lo) - l.ln() - log_expm1_ratio(rate * l)).exp())
            }
            InputLaw::Custom { density, .. } => density
                .as_ref()
                .map(|f| f(x))
                .ok_or(Error::LawCapability("a density")),
        }
    }

    /// `K(t) = log E[exp(t (X - μ))]`.
    pub fn cgf(&self, t: f64) -> Result<f64> {
        match self {
            InputLaw::Uniform { lo, .. } => {
                let l = self.width();
                Ok(t * lo + log_expm1_ratio(t * l) - t * self.mean())
            }
            InputLaw::TruncatedExponential { lo, rate, .. } => {
                let l = self.width();
                Ok(t * lo + log_expm1_ratio((rate + t) * l) - log_expm1_ratio(rate * l)
                    - t * self.mean())
            }
            InputLaw::Custom { cgf, .. } => cgf.as_ref().map(|k| k(t)).ok_or(Error::CgfUnavailable),
        }
    }

    /// Inverse CDF at `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        let (lo, _) = self.support();
        let l = self.width();
        match self {
            InputLaw::Uniform { .. } => Ok(lo + u * l),
            InputLaw::TruncatedExponential { rate, .. } => {
                if (rate * l).abs() < 1e-12 {
                    Ok(lo + u * l)
                } else {
                    Ok(lo + (u * (rate * l).exp_m1()).ln_1p() / rate)
                }
            }
            InputLaw::Custom { quantile, .. } => quantile
                .as_ref()
                .map(|q| q(u))
                .ok_or(Error::LawCapability("a quantile function")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::numeric::integrate;

    #[test]
    fn uniform_cgf_matches_closed_form() {
        let law = InputLaw::uniform(0.0, 1.0).unwrap();
        let t = 0.7f64;
        let direct = ((t / 2.0).sinh() / (t / 2.0)).ln();
        assert!((law.cgf(t).unwrap() - direct).abs() < 1e-14);
        assert_eq!(law.cgf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn truncated_exponential_moments_match_quadrature() {
        for rate in [-3.0, -0.5, 1e-7, 0.8, 4.0] {
            let law = InputLaw::truncated_exponential(-1.0, 2.0, rate).unwrap();
            let f = |x: f64| law.density(x).unwrap();
            let mass = integrate(f, -1.0, 2.0, &[]).unwrap();
            assert!((mass - 1.0).abs() < 1e-12, "mass {mass} at rate {rate}");
            let mean = integrate(|x| x * f(x), -1.0, 2.0, &[]).unwrap();
            assert!((mean - law.mean()).abs() < 1e-10, "mean at rate {rate}");
            let t = 0.9;
            let mgf = integrate(|x| ((x - law.mean()) * t).exp() * f(x), -1.0, 2.0, &[]).unwrap();
            assert!((mgf.ln() - law.cgf(t).unwrap()).abs() < 1e-10, "cgf at rate {rate}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let law = InputLaw::truncated_exponential(0.0, 1.0, 2.5).unwrap();
        for u in [0.1, 0.5, 0.9] {
            let x = law.quantile(u).unwrap();
            let cdf = integrate(|s| law.density(s).unwrap(), 0.0, x, &[]).unwrap();
            assert!((cdf - u).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_law_capabilities() {
        let law = InputLaw::Custom {
            lo: 0.0,
            hi: 1.0,
            mean: 0.5,
            density: None,
            cgf: None,
            quantile: None,
        };
        assert_eq!(law.cgf(0.1), Err(Error::CgfUnavailable));
        assert_eq!(law.density(0.5), Err(Error::LawCapability("a density")));
        assert!(InputLaw::uniform(1.0, 0.0).is_err());
    }
}
