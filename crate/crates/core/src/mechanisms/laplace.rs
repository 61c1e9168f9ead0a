use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::law::InputLaw;
use super::numeric::{integrate, log_expm1_ratio};
use crate::error::{Error, Result};

/// Sample mean of `n` i.i.d. draws from `law`, released with `Lap(0, b)` noise.
#[derive(Debug, Clone)]
pub struct LaplaceMean {
    law: InputLaw,
    n: usize,
    b: f64,
}

impl LaplaceMean {
    pub fn new(law: InputLaw, n: usize, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale b = {b} must be positive")));
        }
        let (c, d) = law.support();
        let mu = law.mean();
        if !(c..=d).contains(&mu) {
            return Err(Error::InvalidParameter(format!(
                "mean {mu} outside [{c}, {d}]"
            )));
        }
        Ok(LaplaceMean { law, n, b })
    }

    pub fn law(&self) -> &InputLaw {
        &self.law
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.b
    }

    fn t(&self) -> f64 {
        1.0 / (self.n as f64 * self.b)
    }

    /// Laplace density of the release given the database mean `m`.
    pub fn conditional_density(&self, m: f64, y: f64) -> f64 {
        (-(y - m).abs() / self.b).exp() / (2.0 * self.b)
    }

    /// PMC for `y ≥ d`.
    fn upper_plateau(&self) -> Result<f64> {
        let (c, _) = self.law.support();
        Ok((self.law.mean() - c) * self.t() + self.law.cgf(self.t())?)
    }

    /// PMC for `y ≤ c`.
    fn lower_plateau(&self) -> Result<f64> {
        let (_, d) = self.law.support();
        Ok((d - self.law.mean()) * self.t() + self.law.cgf(-self.t())?)
    }
}

/// `sup_y Λ(X_n → y)`; the closed form is used for uniform inputs.
pub fn laplace_mean_sup_pmc(m: &LaplaceMean) -> Result<f64> {
    if let InputLaw::Uniform { lo, hi } = m.law {
        return Ok(log_expm1_ratio((hi - lo) * m.t()));
    }
    Ok(m.upper_plateau()?.max(m.lower_plateau()?))
}

/// Seeded Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo {
            samples: 200_000,
            seed: 0,
        }
    }
}

/// Largest accepted half-width of the 95% interval of a Monte Carlo log-ratio.
const MC_HALF_WIDTH: f64 = 1e-2;

/// `Λ(X_n → y)`.
///
/// Outside `(c, d)` this is the plateau value. Inside, `n = 1` uses
/// quadrature and `n > 1` a Monte Carlo estimate with common random numbers.
pub fn laplace_pmc_at(m: &LaplaceMean, y: f64, mc: &MonteCarlo) -> Result<f64> {
    let (c, d) = m.law.support();
    if y >= d {
        m.upper_plateau()
    } else if y <= c {
        m.lower_plateau()
    } else if m.n == 1 {
        laplace_pmc_quadrature(m, y)
    } else {
        laplace_pmc_monte_carlo(m, y, mc)
    }
}

/// `log f_Y(y) / min_{x ∈ {c, d}} f_{Y|X=x}(y)` by quadrature, for `n = 1`.
pub fn laplace_pmc_quadrature(m: &LaplaceMean, y: f64) -> Result<f64> {
    if m.n != 1 {
        return Err(Error::InvalidParameter(
            "quadrature evaluation needs n = 1".into(),
        ));
    }
    let (c, d) = m.law.support();
    let far = (y - c).abs().max((y - d).abs());
    let near = if y < c {
        c - y
    } else if y > d {
        y - d
    } else {
        0.0
    };
    // integrand scaled by exp(near / b) so it stays O(1)
    let mass = integrate(
        |x| {
            m.law.density(x).unwrap_or(f64::NAN) * (-((y - x).abs() - near) / m.b).exp()
        },
        c,
        d,
        &[y],
    )?;
    Ok((far - near) / m.b + mass.ln())
}

fn laplace_pmc_monte_carlo(m: &LaplaceMean, y: f64, mc: &MonteCarlo) -> Result<f64> {
    if mc.samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least 2 samples".into()));
    }
    let (c, d) = m.law.support();
    let n = m.n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let kernel = |mean: f64| (-(y - mean).abs() / m.b).exp();

    // columns: numerator, denominator at x = c, denominator at x = d
    let mut draws = Vec::with_capacity(mc.samples);
    for _ in 0..mc.samples {
        let mut rest = 0.0;
        for _ in 1..m.n {
            rest += m.law.quantile(rng.random::<f64>())?;
        }
        let x = m.law.quantile(rng.random::<f64>())?;
        draws.push([
            kernel((x + rest) / n),
            kernel((c + rest) / n),
            kernel((d + rest) / n),
        ]);
    }
    let count = draws.len() as f64;
    let mean = |k: usize| draws.iter().map(|r| r[k]).sum::<f64>() / count;
    let (a, bc, bd) = (mean(0), mean(1), mean(2));
    let (col, b) = if bc <= bd { (1, bc) } else { (2, bd) };
    let ratio = a / b;
    let cov = |i: usize, j: usize, mi: f64, mj: f64| {
        draws.iter().map(|r| (r[i] - mi) * (r[j] - mj)).sum::<f64>() / (count - 1.0)
    };
    let var_ratio = (cov(0, 0, a, a) - 2.0 * ratio * cov(0, col, a, b)
        + ratio * ratio * cov(col, col, b, b))
        / (count * b * b);
    let half_width = 1.96 * var_ratio.max(0.0).sqrt() / ratio;
    if half_width > MC_HALF_WIDTH {
        return Err(Error::QuadratureFailure(format!(
            "Monte Carlo half-width {half_width:e} exceeds {MC_HALF_WIDTH:e}"
        )));
    }
    Ok(ratio.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> LaplaceMean {
        LaplaceMean::new(InputLaw::uniform(0.0, 1.0).unwrap(), 1, 1.0).unwrap()
    }

    fn log_e_minus_1() -> f64 {
        (std::f64::consts::E - 1.0).ln()
    }

    #[test]
    fn uniform_closed_form() {
        let v = laplace_mean_sup_pmc(&unit()).unwrap();
        assert!((v - log_e_minus_1()).abs() < 1e-15);
        assert!((v - 0.541325).abs() < 1e-6);
    }

    #[test]
    fn closed_form_agrees_with_cgf_route() {
        let m = unit();
        let via_cgf = m.upper_plateau().unwrap().max(m.lower_plateau().unwrap());
        assert!((via_cgf - laplace_mean_sup_pmc(&m).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn plateaus_and_quadrature() {
        let m = unit();
        let mc = MonteCarlo::default();
        for y in [2.0, -1.0, 1.0, 0.0] {
            assert!((laplace_pmc_at(&m, y, &mc).unwrap() - log_e_minus_1()).abs() < 1e-12);
        }
        for y in [-5.0, -2.0, -1.0, 1.0, 2.0, 5.0] {
            let q = laplace_pmc_quadrature(&m, y).unwrap();
            assert!((q - log_e_minus_1()).abs() < 1e-6, "y = {y}: {q}");
        }
        let interior = laplace_pmc_at(&m, 0.5, &mc).unwrap();
        assert!(interior <= log_e_minus_1() + 1e-6);
        assert!(interior > 0.0);
    }

    #[test]
    fn sup_never_exceeds_dp_parameter() {
        for (lo, hi, rate, n, b) in [(0.0, 1.0, 2.0, 1, 0.5), (-2.0, 3.0, -0.7, 4, 1.3)] {
            let law = InputLaw::truncated_exponential(lo, hi, rate).unwrap();
            let m = LaplaceMean::new(law, n, b).unwrap();
            let v = laplace_mean_sup_pmc(&m).unwrap();
            assert!(v <= (hi - lo) / (n as f64 * b) + 1e-12);
        }
    }

    #[test]
    fn vanishes_for_large_n() {
        let mut last = f64::INFINITY;
        for n in [1, 10, 100, 10_000] {
            let m = LaplaceMean::new(InputLaw::uniform(0.0, 1.0).unwrap(), n, 1.0).unwrap();
            let v = laplace_mean_sup_pmc(&m).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn monte_carlo_interior_stays_below_sup() {
        let m = LaplaceMean::new(InputLaw::uniform(0.0, 1.0).unwrap(), 3, 0.5).unwrap();
        let mc = MonteCarlo {
            samples: 50_000,
            seed: 11,
        };
        let sup = laplace_mean_sup_pmc(&m).unwrap();
        for y in [0.2, 0.5, 0.9] {
            let v = laplace_pmc_at(&m, y, &mc).unwrap();
            assert!(v <= sup + MC_HALF_WIDTH, "y = {y}: {v} vs {sup}");
        }
        let a = laplace_pmc_at(&m, 0.5, &mc).unwrap();
        assert_eq!(a, laplace_pmc_at(&m, 0.5, &mc).unwrap());
    }

    #[test]
    fn custom_law_without_cgf() {
        let law = InputLaw::Custom {
            lo: 0.0,
            hi: 1.0,
            mean: 0.5,
            density: None,
            cgf: None,
            quantile: None,
        };
        let m = LaplaceMean::new(law, 1, 1.0).unwrap();
        assert_eq!(laplace_mean_sup_pmc(&m), Err(Error::CgfUnavailable));
    }

    #[test]
    fn parameters_are_validated() {
        let law = InputLaw::uniform(0.0, 1.0).unwrap();
        assert!(LaplaceMean::new(law.clone(), 0, 1.0).is_err());
        assert!(LaplaceMean::new(law, 1, 0.0).is_err());
    }
}
