//! Worked mechanisms: randomized response and the extremal mechanism over
//! finite alphabets, Laplace-mean and Gaussian perturbation over the reals.
//!
//! Finite constructors are generic over [`Scalar`] and take the likelihood
//! multiplier `r = e^ε`, so rational `r` gives exact channels.

mod gaussian;
mod laplace;
mod law;
mod numeric;

pub use gaussian::{
    gaussian_pmc_bounds, gaussian_pmc_quadrature, gaussian_pmc_uniform, gaussian_tail_bound,
    gaussian_tail_frequency, GaussianPerturb, TailEstimate,
};
pub use laplace::{
    laplace_mean_sup_pmc, laplace_pmc_at, laplace_pmc_quadrature, LaplaceMean, MonteCarlo,
};
pub use law::InputLaw;

use crate::bounds::high_privacy_bound;
use crate::error::{Error, Result};
use crate::prob::{Channel, Pmf};
use crate::scalar::Scalar;

fn multiplier(eps: f64) -> Result<f64> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(eps.exp())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Randomized response on `n` symbols with multiplier `r = e^{ε_r}`.
pub fn randomized_response_ratio<S: Scalar>(n: usize, r: &S) -> Result<Channel<S>> {
    if n < 2 {
        return Err(Error::InvalidAlphabet(n));
    }
    if *r < S::one() {
        return Err(Error::InvalidEpsilon(r.to_f64().ln()));
    }
    let den = S::from_ratio(n as i64 - 1, 1) + r.clone();
    let on = r.clone() / den.clone();
    let off = S::one() / den;
    Channel::new(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { on.clone() } else { off.clone() })
                    .collect()
            })
            .collect(),
    )
}

pub fn randomized_response(n: usize, eps_r: f64) -> Result<Channel<f64>> {
    randomized_response_ratio(n, &multiplier(eps_r)?)
}

/// `exp` of the PMC of randomized response: `1 + max_j P_X(j) (r - 1)`.
pub fn rr_pmc_ratio<S: Scalar>(n: usize, r: &S, prior: &Pmf<S>) -> Result<S> {
    if prior.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: prior.len(),
        });
    }
    Ok(S::one() + prior.max_mass().clone() * (r.clone() - S::one()))
}

pub fn rr_pmc(n: usize, eps_r: f64, prior: &Pmf<f64>) -> Result<f64> {
    Ok(rr_pmc_ratio(n, &multiplier(eps_r)?, prior)?.ln())
}

fn check_high_privacy<S: Scalar>(prior: &Pmf<S>, r: &S) -> Result<()> {
    if r.clone() * (S::one() - prior.p_min().clone()) < S::one() {
        Ok(())
    } else {
        let p_min = prior.p_min().to_f64();
        Err(Error::OutsideHighPrivacy {
            eps_u: r.to_f64().ln(),
            bound: high_privacy_bound(p_min)?,
        })
    }
}

/// PML-optimal mechanism in the high-privacy regime, `r = e^{ε_u}`.
///
/// Row `i` has `1 - r(1 - P_X(i))` on the diagonal and `r P_X(j)` elsewhere;
/// its output law equals the prior.
pub fn extremal_mechanism_ratio<S: Scalar>(prior: &Pmf<S>, r: &S) -> Result<Channel<S>> {
    if *r < S::one() {
        return Err(Error::InvalidEpsilon(r.to_f64().ln()));
    }
    check_high_privacy(prior, r)?;
    let p = prior.weights();
    Channel::new(
        (0..p.len())
            .map(|i| {
                (0..p.len())
                    .map(|j| {
                        if i == j {
                            S::one() - r.clone() * (S::one() - p[i].clone())
                        } else {
                            r.clone() * p[j].clone()
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

pub fn extremal_mechanism(prior: &Pmf<f64>, eps_u: f64) -> Result<Channel<f64>> {
    extremal_mechanism_ratio(prior, &multiplier(eps_u)?)
}

/// `exp` of the PMC of the extremal mechanism: `p_min / (1 - r(1 - p_min))`.
pub fn extremal_pmc_ratio<S: Scalar>(prior: &Pmf<S>, r: &S) -> Result<S> {
    check_high_privacy(prior, r)?;
    let p = prior.p_min().clone();
    Ok(p.clone() / (S::one() - r.clone() * (S::one() - p)))
}

pub fn extremal_pmc(prior: &Pmf<f64>, eps_u: f64) -> Result<f64> {
    Ok(extremal_pmc_ratio(prior, &multiplier(eps_u)?)?.ln())
}
