//! Seeded property suite for the pointwise maximal cost.
//!
//! Each property is checked on its own stream of random finite instances.
//! Values are compared in nats with an absolute tolerance; `+∞` compares
//! equal to itself and above every finite value.

use serde::Serialize;

use crate::error::Result;
use crate::leakage::{conditional_pmc, max_realizable_cost, pmc, pml};
use crate::prob::{Channel, Joint, Pmf};
use crate::random::InstanceGen;
use crate::scalar::Scalar;

/// Largest integer weight used for generated entries.
const RESOLUTION: i64 = 50;
/// Probability that a generated channel entry is zeroed.
const ZERO_PROB: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    NonNegativity,
    IndependenceZero,
    Additivity,
    Concavity,
    PreProcessing,
    PostProcessing,
    Composition,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::NonNegativity,
        Property::IndependenceZero,
        Property::Additivity,
        Property::Concavity,
        Property::PreProcessing,
        Property::PostProcessing,
        Property::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::NonNegativity => "non_negativity",
            Property::IndependenceZero => "independence_zero",
            Property::Additivity => "additivity",
            Property::Concavity => "concavity",
            Property::PreProcessing => "pre_processing",
            Property::PostProcessing => "post_processing",
            Property::Composition => "composition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub instances: usize,
    pub failures: usize,
    /// Largest violation margin seen, in nats (`0` when none).
    pub worst_violation: f64,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Runs every property on `instances` random instances.
pub fn run_suite<S: Scalar>(seed: u64, instances: usize, tol: f64) -> Result<Vec<PropertyOutcome>> {
    Property::ALL
        .iter()
        .enumerate()
        .map(|(i, &p)| run_property::<S>(p, seed.wrapping_add(i as u64 * 0x9E37_79B9), instances, tol))
        .collect()
}

/// Formats outcomes as a fixed-width pass/fail table.
pub fn format_table(outcomes: &[PropertyOutcome]) -> String {
    let mut out = format!(
        "{:<18} {:>9} {:>8} {:>14}  result\n",
        "property", "instances", "failures", "worst"
    );
    for o in outcomes {
        out.push_str(&format!(
            "{:<18} {:>9} {:>8} {:>14.3e}  {}\n",
            o.property.name(),
            o.instances,
            o.failures,
            o.worst_violation,
            if o.passed() { "PASS" } else { "FAIL" }
        ));
    }
    out
}

pub fn run_property<S: Scalar>(property: Property, seed: u64, instances: usize, tol: f64) -> Result<PropertyOutcome> {
    let mut gen = InstanceGen::new(seed, RESOLUTION);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let margin = match property {
            Property::NonNegativity => non_negativity::<S>(&mut gen)?,
            Property::IndependenceZero => independence_zero::<S>(&mut gen)?,
            Property::Additivity => additivity::<S>(&mut gen)?,
            Property::Concavity => concavity::<S>(&mut gen)?,
            Property::PreProcessing => pre_processing::<S>(&mut gen)?,
            Property::PostProcessing => post_processing::<S>(&mut gen)?,
            Property::Composition => composition::<S>(&mut gen)?,
        };
        if margin > tol {
            failures += 1;
        }
        worst = worst.max(margin);
    }
    Ok(PropertyOutcome {
        property,
        instances,
        failures,
        worst_violation: worst,
    })
}

fn nats<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<f64> {
    Ok(pmc(joint, y)?.to_f64())
}

/// Amount by which `lhs ≤ rhs` fails; `0` when it holds.
fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs || lhs <= rhs {
        0.0
    } else {
        lhs - rhs
    }
}

/// Distance between two extended reals, `∞` when exactly one is infinite.
fn distance(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn random_joint<S: Scalar>(gen: &mut InstanceGen) -> Result<Joint<S>> {
    let (nx, ny) = (gen.size(2, 4), gen.size(2, 4));
    gen.joint(nx, ny, ZERO_PROB)
}

fn non_negativity<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let j = random_joint::<S>(gen)?;
    let mut worst = 0.0f64;
    for y in j.support() {
        worst = worst
            .max(excess(0.0, nats(&j, y)?))
            .max(excess(0.0, pml(&j, y)?.to_f64()));
    }
    Ok(worst)
}

fn independence_zero<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let (nx, ny) = (gen.size(2, 5), gen.size(2, 5));
    let prior = gen.pmf::<S>(nx)?;
    let row = gen.channel::<S>(1, ny, ZERO_PROB)?.row(0).to_vec();
    let j = Joint::new(prior, Channel::new(vec![row; nx])?)?;
    let mut worst = 0.0f64;
    for y in j.support() {
        worst = worst.max(distance(nats(&j, y)?, 0.0));
    }
    Ok(worst)
}

fn additivity<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let a = random_joint::<S>(gen)?;
    let b = random_joint::<S>(gen)?;
    let ab = a.product(&b)?;
    let mut worst = 0.0f64;
    for y1 in a.support() {
        for y2 in b.support() {
            let joint = nats(&ab, y1 * b.n_outputs() + y2)?;
            worst = worst.max(distance(joint, nats(&a, y1)? + nats(&b, y2)?));
        }
    }
    Ok(worst)
}

fn concavity<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let j = random_joint::<S>(gen)?;
    let q = gen.pmf::<S>(j.n_inputs())?;
    let other = j.with_prior(q.clone())?;
    let mut worst = 0.0f64;
    for k in 0..=10 {
        let theta = S::from_ratio(k, 10);
        let mixed = j.with_prior(j.prior().mix(&q, &theta)?)?;
        for y in j.support() {
            let (vp, vq) = (nats(&j, y)?, nats(&other, y)?);
            let t = k as f64 / 10.0;
            // endpoints carry a zero weight; skip them so 0·∞ never appears
            let chord = match k {
                0 => vq,
                10 => vp,
                _ => t * vp + (1.0 - t) * vq,
            };
            worst = worst.max(excess(chord, nats(&mixed, y)?));
        }
    }
    Ok(worst)
}

fn pre_processing<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let j = random_joint::<S>(gen)?;
    let nz = gen.size(2, 4);
    let kernel = gen.covering_channel::<S>(j.n_inputs(), nz, ZERO_PROB)?;
    let z = j.preprocess(&kernel)?;
    let mut worst = 0.0f64;
    for y in j.support() {
        worst = worst.max(excess(nats(&z, y)?, nats(&j, y)?));
    }
    Ok(worst)
}

fn post_processing<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let j = random_joint::<S>(gen)?;
    let nz = gen.size(2, 4);
    let kernel = gen.channel::<S>(j.n_outputs(), nz, ZERO_PROB)?;
    let z = j.postprocess(&kernel)?;
    Ok(excess(
        max_realizable_cost(&z).to_f64(),
        max_realizable_cost(&j).to_f64(),
    ))
}

fn composition<S: Scalar>(gen: &mut InstanceGen) -> Result<f64> {
    let (nx, n1, n2) = (gen.size(2, 3), gen.size(2, 3), gen.size(2, 3));
    let first = gen.joint::<S>(nx, n1, ZERO_PROB)?;
    // second[y1] is P_{Y2 | X, Y1 = y1}
    let second: Vec<Channel<S>> = (0..n1)
        .map(|_| gen.channel::<S>(nx, n2, ZERO_PROB))
        .collect::<Result<_>>()?;
    let rows = (0..nx)
        .map(|x| {
            (0..n1)
                .flat_map(|y1| {
                    let p1 = first.channel().entry(x, y1).clone();
                    second[y1]
                        .row(x)
                        .iter()
                        .map(move |p2| p1.clone() * p2.clone())
                        .collect::<Vec<_>>()
                })
                .collect()
        })
        .collect();
    let both = Joint::new(first.prior().clone(), Channel::new(rows)?)?;

    let mut worst = 0.0f64;
    for y1 in first.support() {
        let head = nats(&first, y1)?;
        if head.is_infinite() {
            continue;
        }
        let posterior = Pmf::new(first.posterior_checked(y1)?.to_vec())?;
        let family = [Joint::new(posterior, second[y1].clone())?];
        for y2 in family[0].support() {
            let tail = conditional_pmc(&family, y2, 0)?.to_f64();
            worst = worst.max(excess(nats(&both, y1 * n2 + y2)?, head + tail));
        }
    }
    Ok(worst)
}
