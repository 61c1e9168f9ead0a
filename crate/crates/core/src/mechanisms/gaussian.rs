use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use super::law::InputLaw;
use super::numeric::integrate;
use crate::error::{Error, Result};

/// Zero-mean input with `|X| ≤ A` released as `X + N(0, σ²)`.
#[derive(Debug, Clone)]
pub struct GaussianPerturb {
    amplitude: f64,
    sigma: f64,
    law: InputLaw,
}

impl GaussianPerturb {
    pub fn new(amplitude: f64, sigma: f64, law: InputLaw) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {amplitude} must be positive"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
        }
        let (lo, hi) = law.support();
        if lo < -amplitude || hi > amplitude {
            return Err(Error::InvalidParameter(format!(
                "support [{lo}, {hi}] exceeds [-{amplitude}, {amplitude}]"
            )));
        }
        if law.mean().abs() > 1e-9 * amplitude {
            return Err(Error::InvalidParameter(format!(
                "input mean {} is not zero",
                law.mean()
            )));
        }
        Ok(GaussianPerturb {
            amplitude,
            sigma,
            law,
        })
    }

    /// `X ~ Uniform[-A, A]`.
    pub fn uniform(amplitude: f64, sigma: f64) -> Result<Self> {
        GaussianPerturb::new(amplitude, sigma, InputLaw::uniform(-amplitude, amplitude)?)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn law(&self) -> &InputLaw {
        &self.law
    }

    /// `r = A² / σ²`.
    pub fn r(&self) -> f64 {
        (self.amplitude / self.sigma).powi(2)
    }

    pub fn conditional_density(&self, x: f64, y: f64) -> f64 {
        let z = (y - x) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Largest and smallest distance from `y` to the input support.
    fn distances(&self, y: f64) -> (f64, f64) {
        let (lo, hi) = self.law.support();
        let far = (y - lo).abs().max((y - hi).abs());
        let near = if y < lo {
            lo - y
        } else if y > hi {
            y - hi
        } else {
            0.0
        };
        (far, near)
    }
}

/// `(A|y|/σ², A(A + 4|y|)/(2σ²))`.
pub fn gaussian_pmc_bounds(m: &GaussianPerturb, y: f64) -> (f64, f64) {
    let (a, s2) = (m.amplitude, m.sigma * m.sigma);
    (a * y.abs() / s2, a * (a + 4.0 * y.abs()) / (2.0 * s2))
}

/// `Λ(X → y)` for a uniform input, via the normal CDF.
pub fn gaussian_pmc_uniform(m: &GaussianPerturb, y: f64) -> Result<f64> {
    let InputLaw::Uniform { lo, hi } = m.law else {
        return Err(Error::LawCapability("a uniform law"));
    };
    let s = m.sigma;
    let (far, _) = m.distances(y);
    let a = (lo - y) / s;
    let b = (hi - y) / s;
    // P(a ≤ Z ≤ b) from whichever tail keeps both terms small
    let sqrt2 = std::f64::consts::SQRT_2;
    let prob = if a + b <= 0.0 {
        0.5 * (erfc(-b / sqrt2) - erfc(-a / sqrt2))
    } else {
        0.5 * (erfc(a / sqrt2) - erfc(b / sqrt2))
    };
    if prob <= 0.0 {
        return Err(Error::QuadratureFailure(format!(
            "normal probability underflows at y = {y}"
        )));
    }
    let mean_kernel = s * (2.0 * std::f64::consts::PI).sqrt() / (hi - lo) * prob;
    Ok(far * far / (2.0 * s * s) + mean_kernel.ln())
}

/// `Λ(X → y) = log E_X[exp((D² - (y - X)²) / 2σ²)]` by quadrature, where `D`
/// is the distance from `y` to the far end of the input support.
pub fn gaussian_pmc_quadrature(m: &GaussianPerturb, y: f64) -> Result<f64> {
    let (lo, hi) = m.law.support();
    let two_s2 = 2.0 * m.sigma * m.sigma;
    let (far, near) = m.distances(y);
    let shift = (far * far - near * near) / two_s2;
    let integral = integrate(
        |x| {
            let g = (far * far - (y - x).powi(2)) / two_s2 - shift;
            m.law.density(x).unwrap_or(f64::NAN) * g.exp()
        },
        lo,
        hi,
        &[y],
    )?;
    Ok(shift + integral.ln())
}

/// `P{Λ(X → Y) ≥ β + A²/(2σ²)} ≤ min(1, 2 exp(-β² / (8(r² + r))))`.
pub fn gaussian_tail_bound(r: f64, beta: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be non-negative")));
    }
    Ok((2.0 * (-beta * beta / (8.0 * (r * r + r))).exp()).min(1.0))
}

/// Empirical tail frequency of `Λ(X → Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub threshold: f64,
    pub frequency: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `P{Λ(X → Y) ≥ β + A²/(2σ²)}`.
pub fn gaussian_tail_frequency(
    m: &GaussianPerturb,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<TailEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let threshold = beta + m.r() / 2.0;
    let uniform = matches!(m.law, InputLaw::Uniform { .. });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = m.law.quantile(rng.random::<f64>())?;
        let z: f64 = rng.sample(StandardNormal);
        let y = x + m.sigma * z;
        let value = if uniform {
            gaussian_pmc_uniform(m, y)?
        } else {
            gaussian_pmc_quadrature(m, y)?
        };
        if value >= threshold {
            hits += 1;
        }
    }
    let frequency = hits as f64 / samples as f64;
    Ok(TailEstimate {
        threshold,
        frequency,
        std_error: (frequency * (1.0 - frequency) / samples as f64).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> GaussianPerturb {
        GaussianPerturb::uniform(1.0, 1.0).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let m = unit();
        assert_eq!(gaussian_pmc_bounds(&m, 0.0), (0.0, 0.5));
        assert_eq!(gaussian_pmc_bounds(&m, 1.0), (1.0, 2.5));
        let wide = GaussianPerturb::uniform(1.0, 2.0).unwrap();
        let (l1, u1) = gaussian_pmc_bounds(&m, 1.7);
        let (l2, u2) = gaussian_pmc_bounds(&wide, 1.7);
        assert!((l1 / 4.0 - l2).abs() < 1e-15 && (u1 / 4.0 - u2).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature_and_bounds() {
        let m = unit();
        for y in [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0] {
            let exact = gaussian_pmc_uniform(&m, y).unwrap();
            let quad = gaussian_pmc_quadrature(&m, y).unwrap();
            assert!((exact - quad).abs() < 1e-10, "y = {y}: {exact} vs {quad}");
            let (lo, hi) = gaussian_pmc_bounds(&m, y);
            assert!(lo <= quad && quad <= hi, "y = {y}: {quad} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(gaussian_tail_bound(1.0, 0.0).unwrap(), 1.0);
        let v = gaussian_tail_bound(1.0, 4.0).unwrap();
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.7358).abs() < 1e-4);
        assert!(gaussian_tail_bound(1.0, 1e3).unwrap() < 1e-300);
        assert!(gaussian_tail_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn tail_frequency_respects_bound() {
        let m = unit();
        let est = gaussian_tail_frequency(&m, 4.0, 20_000, 3).unwrap();
        let bound = gaussian_tail_bound(m.r(), 4.0).unwrap();
        assert!(est.frequency <= bound + 3.0 * est.std_error);
        assert_eq!(est, gaussian_tail_frequency(&m, 4.0, 20_000, 3).unwrap());
    }

    #[test]
    fn rejects_off_center_or_oversized_inputs() {
        assert!(GaussianPerturb::new(1.0, 1.0, InputLaw::uniform(0.0, 1.0).unwrap()).is_err());
        assert!(GaussianPerturb::new(1.0, 1.0, InputLaw::uniform(-2.0, 2.0).unwrap()).is_err());
        assert!(GaussianPerturb::uniform(1.0, 0.0).is_err());
    }
}
