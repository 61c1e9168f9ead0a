//! Finite probability primitives: pmfs, channels, joints, information
//! density and the order-∞ Rényi divergence.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Nats};
use crate::scalar::{self, Scalar};

fn check_finite<S: Scalar>(value: &S, field: impl FnOnce() -> String) -> Result<()> {
    if value.to_f64().is_finite() || S::is_exact() {
        Ok(())
    } else {
        Err(Error::NonFinite { field: field() })
    }
}

fn within_tolerance<S: Scalar>(total: &S) -> bool {
    (total.clone() - S::one()).abs() <= S::tolerance()
}

/// A probability mass function with full support.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<S> {
    weights: Vec<S>,
    min_index: usize,
}

impl<S: Scalar> Pmf<S> {
    /// Validates a stochastic vector and renormalizes away float round-off.
    pub fn new(weights: Vec<S>) -> Result<Self> {
        Self::validate(&weights)?;
        let total = scalar::sum(&weights);
        if !within_tolerance(&total) {
            return Err(Error::NotNormalized { sum: total.to_string() });
        }
        Ok(Self::build(weights, total))
    }

    /// Accepts arbitrary positive weights and divides by their sum.
    pub fn normalized(weights: Vec<S>) -> Result<Self> {
        Self::validate(&weights)?;
        let total = scalar::sum(&weights);
        Ok(Self::build(weights, total))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        Ok(Self::build(vec![S::from_ratio(1, n as i64); n], S::one()))
    }

    fn validate(weights: &[S]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (index, w) in weights.iter().enumerate() {
            check_finite(w, || format!("weights[{index}]"))?;
            if *w <= S::zero() {
                return Err(Error::ZeroOrNegativeWeight {
                    index,
                    value: w.to_string(),
                });
            }
        }
        Ok(())
    }

    fn build(mut weights: Vec<S>, total: S) -> Self {
        if total != S::one() {
            for w in &mut weights {
                *w = w.clone() / total.clone();
            }
        }
        let min_index = scalar::argmin(&weights);
        Pmf { weights, min_index }
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, i: usize) -> &S {
        &self.weights[i]
    }

    /// Smallest prior mass.
    pub fn p_min(&self) -> &S {
        &self.weights[self.min_index]
    }

    pub fn max_mass(&self) -> &S {
        &self.weights[scalar::argmax(&self.weights)]
    }

    /// Mixture `theta * self + (1 - theta) * other`.
    pub fn mix(&self, other: &Pmf<S>, theta: &S) -> Result<Pmf<S>> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let rest = S::one() - theta.clone();
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| theta.clone() * a.clone() + rest.clone() * b.clone())
            .collect();
        Pmf::normalized(weights)
    }

    /// Product distribution, indexed `i * other.len() + j`.
    pub fn product(&self, other: &Pmf<S>) -> Pmf<S> {
        let weights: Vec<S> = self
            .weights
            .iter()
            .flat_map(|a| other.weights.iter().map(move |b| a.clone() * b.clone()))
            .collect();
        let min_index = scalar::argmin(&weights);
        Pmf { weights, min_index }
    }
}

/// A row-stochastic matrix `P_{Y|X}`; zero entries are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<S> {
    rows: Vec<Vec<S>>,
    n_out: usize,
}

impl<S: Scalar> Channel<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_out = rows.first().map(Vec::len).ok_or(Error::EmptySupport)?;
        if n_out == 0 {
            return Err(Error::EmptySupport);
        }
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            if row.len() != n_out {
                return Err(Error::RaggedRows {
                    row: r,
                    expected: n_out,
                    found: row.len(),
                });
            }
            for (c, v) in row.iter().enumerate() {
                check_finite(v, || format!("channel[{r}][{c}]"))?;
                if *v < S::zero() || *v > S::one() {
                    return Err(Error::InvalidEntry {
                        row: r,
                        col: c,
                        value: v.to_string(),
                    });
                }
            }
            let total = scalar::sum(row);
            if !within_tolerance(&total) {
                return Err(Error::RowNotStochastic {
                    row: r,
                    sum: total.to_string(),
                });
            }
            if total != S::one() {
                for v in row.iter_mut() {
                    *v = v.clone() / total.clone();
                }
            }
        }
        Ok(Channel { rows, n_out })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        Ok(Channel { rows, n_out: n })
    }

    /// Every input maps to the same output distribution.
    pub fn constant(row: &Pmf<S>, n_in: usize) -> Result<Self> {
        if n_in == 0 {
            return Err(Error::EmptySupport);
        }
        Ok(Channel {
            rows: vec![row.weights().to_vec(); n_in],
            n_out: row.len(),
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.n_out
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[S] {
        &self.rows[x]
    }

    pub fn entry(&self, x: usize, y: usize) -> &S {
        &self.rows[x][y]
    }

    pub fn column(&self, y: usize) -> Vec<S> {
        self.rows.iter().map(|r| r[y].clone()).collect()
    }

    /// Cascade `X -> Y -> Z`: returns `P_{Z|X}` given `self = P_{Y|X}` and `next = P_{Z|Y}`.
    pub fn then(&self, next: &Channel<S>) -> Result<Channel<S>> {
        if next.n_inputs() != self.n_out {
            return Err(Error::DimensionMismatch {
                expected: self.n_out,
                found: next.n_inputs(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..next.n_out)
                    .map(|z| {
                        row.iter()
                            .zip(&next.rows)
                            .fold(S::zero(), |acc, (p, r)| acc + p.clone() * r[z].clone())
                    })
                    .collect()
            })
            .collect();
        Ok(Channel {
            rows,
            n_out: next.n_out,
        })
    }

    /// Parallel composition: inputs `(x1, x2)` and outputs `(y1, y2)` in row-major order.
    pub fn product(&self, other: &Channel<S>) -> Channel<S> {
        let mut rows = Vec::with_capacity(self.n_inputs() * other.n_inputs());
        for a in &self.rows {
            for b in &other.rows {
                rows.push(
                    a.iter()
                        .flat_map(|p| b.iter().map(move |q| p.clone() * q.clone()))
                        .collect(),
                );
            }
        }
        Channel {
            rows,
            n_out: self.n_out * other.n_out,
        }
    }
}

/// `P_{XY} = P_X × P_{Y|X}` with cached marginal and posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint<S> {
    prior: Pmf<S>,
    channel: Channel<S>,
    marginal: Vec<S>,
    posteriors: Vec<Option<Vec<S>>>,
}

impl<S: Scalar> Joint<S> {
    pub fn new(prior: Pmf<S>, channel: Channel<S>) -> Result<Self> {
        if channel.n_inputs() != prior.len() {
            return Err(Error::DimensionMismatch {
                expected: prior.len(),
                found: channel.n_inputs(),
            });
        }
        let marginal: Vec<S> = (0..channel.n_outputs())
            .map(|y| {
                prior
                    .weights()
                    .iter()
                    .zip(channel.rows())
                    .fold(S::zero(), |acc, (p, row)| acc + p.clone() * row[y].clone())
            })
            .collect();
        let posteriors = marginal
            .iter()
            .enumerate()
            .map(|(y, py)| {
                (*py > S::zero()).then(|| {
                    prior
                        .weights()
                        .iter()
                        .zip(channel.rows())
                        .map(|(p, row)| p.clone() * row[y].clone() / py.clone())
                        .collect()
                })
            })
            .collect();
        Ok(Joint {
            prior,
            channel,
            marginal,
            posteriors,
        })
    }

    pub fn prior(&self) -> &Pmf<S> {
        &self.prior
    }

    pub fn channel(&self) -> &Channel<S> {
        &self.channel
    }

    pub fn marginal(&self) -> &[S] {
        &self.marginal
    }

    pub fn n_inputs(&self) -> usize {
        self.prior.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.marginal.len()
    }

    /// `P_{X|Y=y}`, absent when `P_Y(y) = 0`.
    pub fn posterior(&self, y: usize) -> Option<&[S]> {
        self.posteriors.get(y).and_then(|p| p.as_deref())
    }

    /// Posterior for an outcome that must have positive probability.
    pub fn posterior_checked(&self, y: usize) -> Result<&[S]> {
        if y >= self.n_outputs() {
            return Err(Error::IndexOutOfRange {
                index: y,
                size: self.n_outputs(),
            });
        }
        self.posterior(y).ok_or(Error::UndefinedOutcome { y })
    }

    /// Outcomes with `P_Y(y) > 0`, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.posteriors
            .iter()
            .enumerate()
            .filter_map(|(y, p)| p.as_ref().map(|_| y))
    }

    /// Same channel under a different prior.
    pub fn with_prior(&self, prior: Pmf<S>) -> Result<Self> {
        Joint::new(prior, self.channel.clone())
    }

    /// Independent product of two joints (product prior, product channel).
    pub fn product(&self, other: &Joint<S>) -> Result<Self> {
        Joint::new(
            self.prior.product(&other.prior),
            self.channel.product(&other.channel),
        )
    }

    /// Joint of `Z` and `Y` for a randomized function `Z` of `X` (`Z - X - Y`).
    ///
    /// `kernel` is `P_{Z|X}`; every `z` must receive positive mass.
    pub fn preprocess(&self, kernel: &Channel<S>) -> Result<Self> {
        if kernel.n_inputs() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                found: kernel.n_inputs(),
            });
        }
        let n_z = kernel.n_outputs();
        let pz: Vec<S> = (0..n_z)
            .map(|z| scalar::dot(self.prior.weights(), &kernel.column(z)))
            .collect();
        let prior_z = Pmf::new(pz.clone())?;
        let rows = (0..n_z)
            .map(|z| {
                (0..self.n_outputs())
                    .map(|y| {
                        (0..self.n_inputs()).fold(S::zero(), |acc, x| {
                            acc + self.prior.get(x).clone()
                                * kernel.entry(x, z).clone()
                                * self.channel.entry(x, y).clone()
                        }) / pz[z].clone()
                    })
                    .collect()
            })
            .collect();
        Joint::new(prior_z, Channel::new(rows)?)
    }

    /// Joint of `X` and `Z = f(Y)` for a kernel `P_{Z|Y}` (`X - Y - Z`).
    pub fn postprocess(&self, kernel: &Channel<S>) -> Result<Self> {
        Joint::new(self.prior.clone(), self.channel.then(kernel)?)
    }
}

/// Exponentiated order-∞ Rényi divergence: `max_{ω: P(ω) > 0} P(ω) / Q(ω)`.
///
/// Returns `+∞` when `P` is not absolutely continuous with respect to `Q`.
pub fn max_ratio<S: Scalar>(p: &[S], q: &[S]) -> Result<ExtReal<S>> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut best: ExtReal<S> = ExtReal::Finite(S::zero());
    for (a, b) in p.iter().zip(q) {
        if a.is_zero() {
            continue;
        }
        let r = ExtReal::ratio(a.clone(), b.clone());
        if r.is_infinite() {
            return Ok(r);
        }
        best = best.max(r);
    }
    // P = 0 everywhere only for sub-probability inputs; 0/0 = 1
    if best == ExtReal::Finite(S::zero()) {
        best = ExtReal::Finite(S::one());
    }
    Ok(best)
}

/// `D∞(P ‖ Q)` in nats.
pub fn renyi_div_inf<S: Scalar>(p: &[S], q: &[S]) -> Result<Nats> {
    Ok(max_ratio(p, q)?.ln())
}

/// Information density `i(x; y) = log P_{Y|X=x}(y) / P_Y(y)`, `-∞` on zero channel entries.
pub fn info_density<S: Scalar>(joint: &Joint<S>, x: usize, y: usize) -> Result<f64> {
    if x >= joint.n_inputs() {
        return Err(Error::IndexOutOfRange {
            index: x,
            size: joint.n_inputs(),
        });
    }
    joint.posterior_checked(y)?;
    let entry = joint.channel().entry(x, y);
    if entry.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    let ratio = entry.clone() / joint.marginal()[y].clone();
    Ok(ratio.to_f64().ln())
}
