//! Brute-force adversary models used to certify the closed forms.
//!
//! The randomized-function, cost-function and guesswork oracles never look
//! at the closed-form PMC; they evaluate the operational definitions
//! directly and search over kernels on a simplex lattice.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Nats};
use crate::leakage;
use crate::prob::{Channel, Joint};
use crate::scalar::{self, Scalar};

/// A randomized function `U` of `X`, given by its kernel `P_{U|X}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedFunction<S> {
    kernel: Channel<S>,
}

impl<S: Scalar> RandomizedFunction<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        Ok(RandomizedFunction {
            kernel: Channel::new(rows)?,
        })
    }

    pub fn from_channel(kernel: Channel<S>) -> Self {
        RandomizedFunction { kernel }
    }

    /// `U = X`.
    pub fn identity(n: usize) -> Result<Self> {
        Ok(RandomizedFunction {
            kernel: Channel::identity(n)?,
        })
    }

    /// `U` constant on its first symbol.
    pub fn constant(n_x: usize, n_u: usize) -> Result<Self> {
        if n_u == 0 {
            return Err(Error::InvalidAlphabet(n_u));
        }
        let row: Vec<S> = (0..n_u)
            .map(|u| if u == 0 { S::one() } else { S::zero() })
            .collect();
        RandomizedFunction::new(vec![row; n_x])
    }

    pub fn kernel(&self) -> &Channel<S> {
        &self.kernel
    }

    pub fn n_inputs(&self) -> usize {
        self.kernel.n_inputs()
    }

    pub fn alphabet_size(&self) -> usize {
        self.kernel.n_outputs()
    }

    /// Law of `U` when `X` has law `px`.
    pub fn push_forward(&self, px: &[S]) -> Vec<S> {
        (0..self.alphabet_size())
            .map(|u| {
                px.iter()
                    .zip(self.kernel.rows())
                    .fold(S::zero(), |acc, (p, row)| acc + p.clone() * row[u].clone())
            })
            .collect()
    }
}

/// A non-negative cost table `c(x, w)`; entries may be `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction<S> {
    table: Vec<Vec<ExtReal<S>>>,
    n_w: usize,
}

impl<S: Scalar> CostFunction<S> {
    pub fn new(table: Vec<Vec<ExtReal<S>>>) -> Result<Self> {
        let n_w = table.first().map(Vec::len).ok_or(Error::EmptySupport)?;
        if n_w == 0 {
            return Err(Error::EmptySupport);
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n_w {
                return Err(Error::RaggedRows {
                    row,
                    expected: n_w,
                    found: entries.len(),
                });
            }
            for (col, v) in entries.iter().enumerate() {
                if let ExtReal::Finite(v) = v {
                    if !v.to_f64().is_finite() && !S::is_exact() {
                        return Err(Error::NonFinite {
                            field: format!("cost[{row}][{col}]"),
                        });
                    }
                    if *v < S::zero() {
                        return Err(Error::NegativeCost { row, col });
                    }
                }
            }
        }
        Ok(CostFunction { table, n_w })
    }

    pub fn from_finite(table: Vec<Vec<S>>) -> Result<Self> {
        CostFunction::new(
            table
                .into_iter()
                .map(|r| r.into_iter().map(ExtReal::Finite).collect())
                .collect(),
        )
    }

    /// `c(x, w) = 1{x ≠ w}`.
    pub fn zero_one(n: usize) -> Result<Self> {
        CostFunction::from_finite(
            (0..n)
                .map(|x| {
                    (0..n)
                        .map(|w| if x == w { S::zero() } else { S::one() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn table(&self) -> &[Vec<ExtReal<S>>] {
        &self.table
    }

    pub fn n_inputs(&self) -> usize {
        self.table.len()
    }

    pub fn n_guesses(&self) -> usize {
        self.n_w
    }

    /// `E[c(X, w)]` under `px`, with `0 · ∞ = 0`.
    pub fn expected(&self, px: &[S], w: usize) -> ExtReal<S> {
        px.iter()
            .zip(&self.table)
            .fold(ExtReal::zero(), |acc, (p, row)| {
                if p.is_zero() {
                    return acc;
                }
                match &row[w] {
                    ExtReal::Finite(c) => acc + ExtReal::Finite(p.clone() * c.clone()),
                    ExtReal::Infinite => ExtReal::Infinite,
                }
            })
    }

    fn min_expected(&self, px: &[S]) -> (usize, ExtReal<S>) {
        let mut best = (0, self.expected(px, 0));
        for w in 1..self.n_w {
            let v = self.expected(px, w);
            if v < best.1 {
                best = (w, v);
            }
        }
        best
    }
}

/// Lattice search parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Points per kernel coordinate; lattice denominator is `resolution - 1`.
    pub resolution: usize,
    pub max_u: usize,
    /// Sampled kernels per alphabet size when the lattice is not enumerated.
    pub max_iterations: usize,
    /// Largest lattice that may be enumerated exhaustively.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            resolution: 11,
            max_u: 3,
            max_iterations: 20_000,
            budget: 2_000_000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidConfig(format!(
                "resolution {} is below 2",
                self.resolution
            )));
        }
        if self.max_u < 2 {
            return Err(Error::InvalidConfig(format!("max |U| {} is below 2", self.max_u)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// `exp Λ_U(X → y) = (1 - max_u P_U(u)) / (1 - max_u P_{U|Y=y}(u))`.
pub fn lambda_u_ratio<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    u: &RandomizedFunction<S>,
) -> Result<ExtReal<S>> {
    let post = joint.posterior_checked(y)?;
    if u.n_inputs() != joint.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: joint.n_inputs(),
            found: u.n_inputs(),
        });
    }
    Ok(error_ratio(
        &u.push_forward(joint.prior().weights()),
        &u.push_forward(post),
    ))
}

pub fn lambda_u<S: Scalar>(joint: &Joint<S>, y: usize, u: &RandomizedFunction<S>) -> Result<Nats> {
    Ok(lambda_u_ratio(joint, y, u)?.ln())
}

fn error_ratio<S: Scalar>(pu: &[S], pu_y: &[S]) -> ExtReal<S> {
    // float round-off can push 1 - max slightly below zero
    let miss = |p: &[S]| {
        let v = S::one() - p[scalar::argmax(p)].clone();
        if v < S::zero() {
            S::zero()
        } else {
            v
        }
    };
    ExtReal::ratio(miss(pu), miss(pu_y))
}

/// `exp Λ_c(X → y) = min_w E[c(X, w)] / min_w E[c(X, w) | Y = y]`.
pub fn lambda_cost_ratio<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    c: &CostFunction<S>,
) -> Result<ExtReal<S>> {
    let post = joint.posterior_checked(y)?;
    if c.n_inputs() != joint.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: joint.n_inputs(),
            found: c.n_inputs(),
        });
    }
    let ExtReal::Finite(prior_min) = c.min_expected(joint.prior().weights()).1 else {
        return Err(Error::AllInfinitePrior);
    };
    // a finite prior column stays finite under the posterior
    let post_min = c
        .min_expected(post)
        .1
        .finite()
        .cloned()
        .expect("finite posterior minimum");
    Ok(ExtReal::ratio(prior_min, post_min))
}

pub fn lambda_cost<S: Scalar>(joint: &Joint<S>, y: usize, c: &CostFunction<S>) -> Result<Nats> {
    Ok(lambda_cost_ratio(joint, y, c)?.ln())
}

/// Minimal expected number of guesses: probabilities in decreasing order get ranks `1, 2, ...`.
pub fn min_expected_guesses<S: Scalar>(pu: &[S]) -> S {
    let mut sorted = pu.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("comparable probabilities"));
    sorted
        .into_iter()
        .enumerate()
        .fold(S::zero(), |acc, (i, p)| acc + S::from_ratio(i as i64 + 1, 1) * p)
}

/// `exp` of the guesswork leakage of `U`: ratio of prior to posterior minimal expected guesses.
pub fn guesswork_ratio<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    u: &RandomizedFunction<S>,
) -> Result<ExtReal<S>> {
    let post = joint.posterior_checked(y)?;
    if u.n_inputs() != joint.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: joint.n_inputs(),
            found: u.n_inputs(),
        });
    }
    Ok(ExtReal::ratio(
        min_expected_guesses(&u.push_forward(joint.prior().weights())),
        min_expected_guesses(&u.push_forward(post)),
    ))
}

/// Compositions of `total` into `parts` non-negative integers, in lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Result of a lattice search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome<S> {
    /// Best value found, ratio domain.
    pub value: ExtReal<S>,
    pub witness: RandomizedFunction<S>,
    pub evaluated: usize,
    pub exhaustive: bool,
}

impl<S: Scalar> OracleOutcome<S> {
    pub fn nats(&self) -> Nats {
        self.value.ln()
    }
}

#[derive(Clone, Copy)]
enum Objective {
    ErrorProbability,
    Guesswork,
}

impl Objective {
    fn score<S: Scalar>(self, pu: &[S], pu_y: &[S]) -> ExtReal<S> {
        match self {
            Objective::ErrorProbability => error_ratio(pu, pu_y),
            Objective::Guesswork => {
                ExtReal::ratio(min_expected_guesses(pu), min_expected_guesses(pu_y))
            }
        }
    }
}

/// Relative slack of the float pre-screen used with exact scalars. A kernel
/// is scored exactly unless its float score is below the best exactly scored
/// kernel by more than this fraction, far above accumulated rounding error.
const SCREEN_MARGIN: f64 = 1e-9;

/// Kernels with rows drawn from one simplex lattice of a fixed alphabet size.
struct Lattice<S> {
    comps: Vec<Vec<usize>>,
    m: usize,
    /// `weighted[x][c][u] = P(x) * comps[c][u] / m` for the prior and the posterior.
    prior: Vec<Vec<Vec<S>>>,
    post: Vec<Vec<Vec<S>>>,
}

impl Lattice<f64> {
    /// Float score, or `None` near the `0 / 0` corner where rounding decides
    /// the value.
    fn approximate(&self, idx: &[usize], objective: Objective) -> Option<f64> {
        let n_u = self.comps[0].len();
        let mut pu = vec![0.0; n_u];
        let mut pu_y = vec![0.0; n_u];
        for (x, &c) in idx.iter().enumerate() {
            for u in 0..n_u {
                pu[u] += self.prior[x][c][u];
                pu_y[u] += self.post[x][c][u];
            }
        }
        match objective {
            Objective::ErrorProbability => {
                let miss = |p: &[f64]| 1.0 - p.iter().copied().fold(0.0, f64::max);
                let (a, b) = (miss(&pu), miss(&pu_y));
                (a > 1e-9 && b > 1e-9).then(|| a / b)
            }
            Objective::Guesswork => Some(min_expected_guesses(&pu) / min_expected_guesses(&pu_y)),
        }
    }
}

impl<S: Scalar> Lattice<S> {
    fn new(m: usize, n_u: usize, prior: &[S], post: &[S]) -> Self {
        let comps = compositions(m, n_u);
        let weigh = |px: &[S]| -> Vec<Vec<Vec<S>>> {
            px.iter()
                .map(|p| {
                    comps
                        .iter()
                        .map(|c| {
                            c.iter()
                                .map(|&j| p.clone() * S::from_ratio(j as i64, m as i64))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        Lattice {
            prior: weigh(prior),
            post: weigh(post),
            comps,
            m,
        }
    }

    fn score(&self, idx: &[usize], objective: Objective) -> ExtReal<S> {
        let n_u = self.comps[0].len();
        let mut pu = vec![S::zero(); n_u];
        let mut pu_y = vec![S::zero(); n_u];
        for (x, &c) in idx.iter().enumerate() {
            for u in 0..n_u {
                pu[u] = pu[u].clone() + self.prior[x][c][u].clone();
                pu_y[u] = pu_y[u].clone() + self.post[x][c][u].clone();
            }
        }
        objective.score(&pu, &pu_y)
    }

    fn kernel(&self, idx: &[usize]) -> RandomizedFunction<S> {
        let rows = idx
            .iter()
            .map(|&c| {
                self.comps[c]
                    .iter()
                    .map(|&j| S::from_ratio(j as i64, self.m as i64))
                    .collect()
            })
            .collect();
        RandomizedFunction::new(rows).expect("lattice rows are stochastic")
    }
}

/// Binary indicator of the posterior support: rows in the support map to
/// symbol 0, other rows are split evenly.
pub fn indicator_witness<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<RandomizedFunction<S>> {
    let post = joint.posterior_checked(y)?;
    let half = S::from_ratio(1, 2);
    RandomizedFunction::new(
        post.iter()
            .map(|p| {
                if p.is_zero() {
                    vec![half.clone(), half.clone()]
                } else {
                    vec![S::one(), S::zero()]
                }
            })
            .collect(),
    )
}

fn lattice_search<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    cfg: &SearchConfig,
    objective: Objective,
    min_u: usize,
) -> Result<OracleOutcome<S>> {
    cfg.validate()?;
    let post = joint.posterior_checked(y)?.to_vec();
    let prior = joint.prior().weights();
    let n_x = joint.n_inputs();

    let mut best: Option<(ExtReal<S>, RandomizedFunction<S>)> = None;
    let mut evaluated = 0usize;
    let mut exhaustive = true;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for n_u in min_u..=cfg.max_u {
        let lattice = Lattice::new(cfg.resolution - 1, n_u, prior, &post);
        let screen = S::is_exact().then(|| {
            let f = |v: &[S]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
            Lattice::new(cfg.resolution - 1, n_u, &f(prior), &f(&post))
        });
        let mut screen_best = f64::NEG_INFINITY;
        let mut consider = |idx: &[usize]| {
            evaluated += 1;
            if let Some(fast) = &screen {
                match fast.approximate(idx, objective) {
                    Some(v) if v < screen_best * (1.0 - SCREEN_MARGIN) => return,
                    Some(v) => screen_best = screen_best.max(v),
                    None => {}
                }
            }
            let v = lattice.score(idx, objective);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, lattice.kernel(idx)));
            }
        };

        let n_rows = lattice.comps.len();
        if n_x * n_u <= 9 {
            let size = (n_rows as f64).powi(n_x as i32);
            if size > cfg.budget as f64 {
                return Err(Error::BudgetExceeded(format!(
                    "{size} kernels for |X| = {n_x}, |U| = {n_u}"
                )));
            }
            let mut idx = vec![0usize; n_x];
            loop {
                consider(&idx);
                let mut pos = 0;
                while pos < n_x {
                    idx[pos] += 1;
                    if idx[pos] < n_rows {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == n_x {
                    break;
                }
            }
        } else {
            exhaustive = false;
            let rows: Vec<usize> = (0..n_rows).collect();
            for _ in 0..cfg.max_iterations {
                let idx: Vec<usize> = (0..n_x)
                    .map(|_| *rows.choose(&mut rng).expect("non-empty lattice"))
                    .collect();
                consider(&idx);
            }
        }
    }

    let (value, witness) = best.expect("at least one kernel evaluated");
    Ok(OracleOutcome {
        value,
        witness,
        evaluated,
        exhaustive,
    })
}

/// Largest `Λ_U(X → y)` over lattice kernels with `2 ≤ |U| ≤ max_u`.
///
/// When the posterior misses part of `X` the binary indicator witness is
/// evaluated as well, so infinite leakage is always found.
pub fn oracle_pmc_randomized<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    cfg: &SearchConfig,
) -> Result<OracleOutcome<S>> {
    let mut outcome = lattice_search(joint, y, cfg, Objective::ErrorProbability, 2)?;
    if joint.posterior_checked(y)?.iter().any(|p| p.is_zero()) {
        let witness = indicator_witness(joint, y)?;
        let value = lambda_u_ratio(joint, y, &witness)?;
        outcome.evaluated += 1;
        if value > outcome.value {
            outcome.value = value;
            outcome.witness = witness;
        }
    }
    Ok(outcome)
}

/// Largest guesswork leakage over lattice kernels with `1 ≤ |U| ≤ max_u`.
pub fn guesswork_leakage_oracle<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    cfg: &SearchConfig,
) -> Result<OracleOutcome<S>> {
    lattice_search(joint, y, cfg, Objective::Guesswork, 1)
}

/// Maximality conditions for the achieving construction: the aggregated
/// symbol must be the most likely one before and after observing `y`.
fn aggregated_symbol_dominates<S: Scalar>(p: &S, k: usize) -> bool {
    S::one() - p.clone() >= p.clone() / S::from_ratio(k as i64, 1)
}

const MAX_DOUBLINGS: u32 = 40;

/// Achieving randomized function: `k` equally likely symbols carved out of
/// `{X = x*}` plus one symbol for every other input, where `x*` maximizes
/// `P_X(x) / P_{X|Y=y}(x)`.
///
/// `k = None` doubles from 2 until both maximality conditions hold.
pub fn construct_optimal_u<S: Scalar>(
    joint: &Joint<S>,
    y: usize,
    k: Option<usize>,
) -> Result<RandomizedFunction<S>> {
    let post = joint.posterior_checked(y)?;
    if post.iter().any(|p| p.is_zero()) {
        return Err(Error::InfiniteLeakage { y });
    }
    let prior = joint.prior().weights();
    let ratios: Vec<S> = prior
        .iter()
        .zip(post)
        .map(|(p, q)| p.clone() / q.clone())
        .collect();
    let star = scalar::argmax(&ratios);
    let holds = |k: usize| {
        aggregated_symbol_dominates(&prior[star], k) && aggregated_symbol_dominates(&post[star], k)
    };
    let k = match k {
        Some(0) => return Err(Error::KTooSmall { k: 0 }),
        Some(k) if holds(k) => k,
        Some(k) => return Err(Error::KTooSmall { k }),
        None => (1..=MAX_DOUBLINGS)
            .map(|i| 1usize << i)
            .find(|&k| holds(k))
            .ok_or(Error::KTooSmall {
                k: 1 << MAX_DOUBLINGS,
            })?,
    };
    let share = S::from_ratio(1, k as i64);
    let rows = (0..joint.n_inputs())
        .map(|x| {
            let mut row = vec![S::zero(); k + 1];
            if x == star {
                row[..k].fill(share.clone());
            } else {
                row[k] = S::one();
            }
            row
        })
        .collect();
    RandomizedFunction::new(rows)
}

/// `c_U(x, u) = 1 - P_{U|X=x}(u)`.
pub fn cost_from_u<S: Scalar>(u: &RandomizedFunction<S>) -> CostFunction<S> {
    CostFunction::from_finite(
        u.kernel()
            .rows()
            .iter()
            .map(|row| row.iter().map(|p| S::one() - p.clone()).collect())
            .collect(),
    )
    .expect("complement of a stochastic row is a valid cost")
}

/// Randomized function recovered from a cost function.
#[derive(Debug, Clone, PartialEq)]
pub struct CostWitness {
    pub u: RandomizedFunction<f64>,
    /// Mixture weight of the prior-optimal component; `None` for the indicator witness.
    pub delta: Option<f64>,
    pub k: usize,
}

const BISECTION_STEPS: usize = 60;

/// Builds `U` with `Λ_U(X → y) = Λ_c(X → y)`.
///
/// Finite case: mixes the kernels built from the prior-optimal guess `w_S`
/// and the posterior-optimal guess `w_T`, and bisects on the mixture weight.
/// Infinite case: the binary indicator of the posterior support.
pub fn u_from_cost(
    c: &CostFunction<f64>,
    joint: &Joint<f64>,
    y: usize,
    k: Option<usize>,
) -> Result<CostWitness> {
    let post = joint.posterior_checked(y)?;
    let mut scale = 0.0f64;
    for row in c.table() {
        for v in row {
            match v {
                ExtReal::Finite(v) => scale = scale.max(*v),
                ExtReal::Infinite => return Err(Error::InfiniteCost),
            }
        }
    }
    if scale == 0.0 {
        return Err(Error::NormalizationDegenerate);
    }
    let normalized: Vec<Vec<f64>> = c
        .table()
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64() / scale).collect())
        .collect();
    let c = CostFunction::from_finite(normalized.clone())?;
    let target = lambda_cost_ratio(joint, y, &c)?;
    if target.is_infinite() {
        return Ok(CostWitness {
            u: indicator_witness(joint, y)?,
            delta: None,
            k: 1,
        });
    }
    let target = target.to_f64();

    let prior = joint.prior().weights();
    let (w_s, _) = c.min_expected(prior);
    let (w_t, _) = c.min_expected(post);
    let column = |w: usize| -> Vec<f64> { normalized.iter().map(|r| r[w]).collect() };
    let (mut c_s, mut c_t) = (column(w_s), column(w_t));

    // expected mixed cost is linear in delta, so the endpoints bound it
    let mut endpoint_costs = [
        scalar::dot(prior, &c_s),
        scalar::dot(prior, &c_t),
        scalar::dot(post, &c_s),
        scalar::dot(post, &c_t),
    ];
    // an expected cost of 1 leaves no room for the aggregated symbol; halving
    // the cost does not change the leakage ratio
    if endpoint_costs.iter().any(|&a| a >= 1.0) {
        for v in c_s.iter_mut().chain(c_t.iter_mut()).chain(endpoint_costs.iter_mut()) {
            *v *= 0.5;
        }
    }
    let holds = |k: usize| {
        endpoint_costs
            .iter()
            .all(|&a| a <= k as f64 / (k as f64 + 1.0))
    };
    let k = match k {
        Some(0) => return Err(Error::KTooSmall { k: 0 }),
        Some(k) if holds(k) => k,
        Some(k) => return Err(Error::KTooSmall { k }),
        None => (1..=MAX_DOUBLINGS)
            .map(|i| 1usize << i)
            .find(|&k| holds(k))
            .ok_or(Error::KTooSmall {
                k: 1 << MAX_DOUBLINGS,
            })?,
    };

    let build = |delta: f64| -> Result<RandomizedFunction<f64>> {
        RandomizedFunction::new(
            c_s.iter()
                .zip(&c_t)
                .map(|(&s, &t)| {
                    let mixed = delta * s + (1.0 - delta) * t;
                    let mut row = vec![mixed / k as f64; k];
                    row.push(1.0 - mixed);
                    row
                })
                .collect(),
        )
    };
    let gap = |delta: f64| -> Result<f64> {
        Ok(lambda_u_ratio(joint, y, &build(delta)?)?.to_f64() - target)
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let delta = if gap(hi)? >= 0.0 {
        hi
    } else if gap(lo)? <= 0.0 {
        lo
    } else {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if gap(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(CostWitness {
        u: build(delta)?,
        delta: Some(delta),
        k,
    })
}

pub(crate) fn scalar_json<S: Scalar>(v: &S) -> Value {
    if S::is_exact() {
        Value::String(v.to_literal())
    } else {
        serde_json::Number::from_f64(v.to_f64())
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// Certification record comparing a closed form with an oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub closed_form: Nats,
    pub oracle_value: Nats,
    pub witness_kernel: Vec<Vec<Value>>,
    /// `closed_form - oracle_value`; zero when both are infinite.
    pub gap: Nats,
}

impl OracleReport {
    pub fn new<S: Scalar>(closed_form: Nats, oracle_value: Nats, witness: &RandomizedFunction<S>) -> Self {
        let gap = match (&closed_form, &oracle_value) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a - b),
            (ExtReal::Infinite, ExtReal::Finite(_)) => ExtReal::Infinite,
            (ExtReal::Infinite, ExtReal::Infinite) => ExtReal::Finite(0.0),
            (ExtReal::Finite(_), ExtReal::Infinite) => ExtReal::Finite(f64::NEG_INFINITY),
        };
        OracleReport {
            witness_kernel: witness
                .kernel()
                .rows()
                .iter()
                .map(|r| r.iter().map(scalar_json).collect())
                .collect(),
            closed_form,
            oracle_value,
            gap,
        }
    }

    /// True when the oracle exceeds the closed form beyond `tol`.
    pub fn dominance_violated(&self, tol: f64) -> bool {
        match (&self.closed_form, &self.oracle_value) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => *b > *a + tol,
            (ExtReal::Finite(_), ExtReal::Infinite) => true,
            _ => false,
        }
    }
}

/// Certifies `Λ(X → y)` with the achieving construction when it is finite,
/// the indicator witness otherwise, and the lattice search in both cases.
pub fn certify<S: Scalar>(joint: &Joint<S>, y: usize, cfg: &SearchConfig) -> Result<OracleReport> {
    let closed = leakage::pmc_ratio(joint, y)?;
    let search = oracle_pmc_randomized(joint, y, cfg)?;
    let (value, witness) = if closed.is_finite() {
        let u = construct_optimal_u(joint, y, None)?;
        let v = lambda_u_ratio(joint, y, &u)?;
        if v >= search.value {
            (v, u)
        } else {
            (search.value, search.witness)
        }
    } else {
        (search.value, search.witness)
    };
    Ok(OracleReport::new(closed.ln(), value.ln(), &witness))
}
