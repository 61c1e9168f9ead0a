//! Leakage measures evaluated on a [`Joint`].
//!
//! Each measure has a ratio-domain form (`*_ratio`, exact over rationals)
//! and a nats form. Suprema over outcomes range over the support of `P_Y`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::{format_f64, ExtReal, Nats, Unit};
use crate::prob::{info_density, max_ratio, Joint};
use crate::scalar::Scalar;

/// `exp Λ(X → y) = max_x P_X(x) / P_{X|Y=y}(x)`.
pub fn pmc_ratio<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<ExtReal<S>> {
    let post = joint.posterior_checked(y)?;
    max_ratio(joint.prior().weights(), post)
}

/// Pointwise maximal cost `Λ(X → y) = D∞(P_X ‖ P_{X|Y=y})` in nats.
pub fn pmc<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<Nats> {
    Ok(pmc_ratio(joint, y)?.ln())
}

/// `exp ℓ(X → y) = max_x P_{X|Y=y}(x) / P_X(x)`.
pub fn pml_ratio<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<ExtReal<S>> {
    let post = joint.posterior_checked(y)?;
    max_ratio(post, joint.prior().weights())
}

/// Pointwise maximal leakage `ℓ(X → y) = D∞(P_{X|Y=y} ‖ P_X)` in nats.
pub fn pml<S: Scalar>(joint: &Joint<S>, y: usize) -> Result<Nats> {
    Ok(pml_ratio(joint, y)?.ln())
}

/// Conditional PMC `Λ(X → y | z)`.
///
/// `family[z]` is the joint of `P_{X|Z=z}` and `P_{Y|X,Z=z}`.
pub fn conditional_pmc_ratio<S: Scalar>(
    family: &[Joint<S>],
    y: usize,
    z: usize,
) -> Result<ExtReal<S>> {
    let joint = family.get(z).ok_or(Error::IndexOutOfRange {
        index: z,
        size: family.len(),
    })?;
    pmc_ratio(joint, y)
}

pub fn conditional_pmc<S: Scalar>(family: &[Joint<S>], y: usize, z: usize) -> Result<Nats> {
    Ok(conditional_pmc_ratio(family, y, z)?.ln())
}

fn sup_over_support<S: Scalar>(
    joint: &Joint<S>,
    f: impl Fn(&Joint<S>, usize) -> Result<ExtReal<S>>,
) -> ExtReal<S> {
    joint
        .support()
        .map(|y| f(joint, y).expect("outcome in support"))
        .fold(ExtReal::Finite(S::one()), ExtReal::max)
}

/// `exp` of the maximal realizable cost, `max_y exp Λ(X → y)`.
pub fn max_realizable_cost_ratio<S: Scalar>(joint: &Joint<S>) -> ExtReal<S> {
    sup_over_support(joint, pmc_ratio)
}

/// Maximal realizable cost `D∞(P_X × P_Y ‖ P_{XY}) = max_y Λ(X → y)`.
pub fn max_realizable_cost<S: Scalar>(joint: &Joint<S>) -> Nats {
    max_realizable_cost_ratio(joint).ln()
}

pub fn max_pml_ratio<S: Scalar>(joint: &Joint<S>) -> ExtReal<S> {
    sup_over_support(joint, pml_ratio)
}

/// `exp` of the LDP level: largest likelihood ratio `P(y|x) / P(y|x')`
/// over outcomes in the support of `P_Y`.
pub fn ldp_ratio<S: Scalar>(joint: &Joint<S>) -> ExtReal<S> {
    let channel = joint.channel();
    joint
        .support()
        .map(|y| {
            let column = channel.column(y);
            let hi = column[crate::scalar::argmax(&column)].clone();
            let lo = column[crate::scalar::argmin(&column)].clone();
            ExtReal::ratio(hi, lo)
        })
        .fold(ExtReal::Finite(S::one()), ExtReal::max)
}

/// `exp` of the maximal cost leakage: `1 / Σ_y min_x P_{Y|X=x}(y)`.
pub fn max_cost_leakage_ratio<S: Scalar>(joint: &Joint<S>) -> ExtReal<S> {
    let channel = joint.channel();
    let total = (0..channel.n_outputs()).fold(S::zero(), |acc, y| {
        let column = channel.column(y);
        acc + column[crate::scalar::argmin(&column)].clone()
    });
    ExtReal::ratio(S::one(), total)
}

/// Maximal cost leakage `-log Σ_y min_x P_{Y|X=x}(y)`.
pub fn max_cost_leakage<S: Scalar>(joint: &Joint<S>) -> Nats {
    max_cost_leakage_ratio(joint).ln()
}

/// `E_{P_Y}[Λ(X → Y)]`, infinite if any outcome in the support has infinite PMC.
pub fn expected_pmc<S: Scalar>(joint: &Joint<S>) -> Nats {
    joint
        .support()
        .map(|y| {
            let value = pmc(joint, y).expect("outcome in support");
            match value {
                ExtReal::Finite(v) => ExtReal::Finite(joint.marginal()[y].to_f64() * v),
                ExtReal::Infinite => ExtReal::Infinite,
            }
        })
        .fold(ExtReal::Finite(0.0), |acc, v| acc + v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuaranteeKind {
    Pml,
    Pmc,
    Lip,
    Alip,
    Ldp,
}

/// A privacy guarantee with its level in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum Guarantee {
    Pml { eps: Nats },
    Pmc { eps: Nats },
    Lip { eps: Nats },
    Alip { eps_l: Nats, eps_u: Nats },
    Ldp { eps: Nats },
}

impl Guarantee {
    pub fn kind(&self) -> GuaranteeKind {
        match self {
            Guarantee::Pml { .. } => GuaranteeKind::Pml,
            Guarantee::Pmc { .. } => GuaranteeKind::Pmc,
            Guarantee::Lip { .. } => GuaranteeKind::Lip,
            Guarantee::Alip { .. } => GuaranteeKind::Alip,
            Guarantee::Ldp { .. } => GuaranteeKind::Ldp,
        }
    }

    /// Checks that every level is a non-negative extended real.
    pub fn validate(&self) -> Result<()> {
        let check = |e: &Nats| match e {
            ExtReal::Finite(v) if !(v.is_finite() && *v >= 0.0) => Err(Error::InvalidEpsilon(*v)),
            _ => Ok(()),
        };
        match self {
            Guarantee::Alip { eps_l, eps_u } => check(eps_l).and(check(eps_u)),
            Guarantee::Pml { eps }
            | Guarantee::Pmc { eps }
            | Guarantee::Lip { eps }
            | Guarantee::Ldp { eps } => check(eps),
        }
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guarantee::Pml { eps } => write!(f, "PML({eps})"),
            Guarantee::Pmc { eps } => write!(f, "PMC({eps})"),
            Guarantee::Lip { eps } => write!(f, "LIP({eps})"),
            Guarantee::Alip { eps_l, eps_u } => write!(f, "ALIP({eps_l}, {eps_u})"),
            Guarantee::Ldp { eps } => write!(f, "LDP({eps})"),
        }
    }
}

/// Smallest level of the requested kind that `joint` satisfies.
pub fn guarantee_level<S: Scalar>(joint: &Joint<S>, kind: GuaranteeKind) -> Guarantee {
    let pmc = || max_realizable_cost_ratio(joint).ln();
    let pml = || max_pml_ratio(joint).ln();
    match kind {
        GuaranteeKind::Pml => Guarantee::Pml { eps: pml() },
        GuaranteeKind::Pmc => Guarantee::Pmc { eps: pmc() },
        GuaranteeKind::Lip => Guarantee::Lip {
            eps: pmc().max(pml()),
        },
        GuaranteeKind::Alip => Guarantee::Alip {
            eps_l: pmc(),
            eps_u: pml(),
        },
        GuaranteeKind::Ldp => Guarantee::Ldp {
            eps: ldp_ratio(joint).ln(),
        },
    }
}

/// Every aggregate level of a joint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub pml: Nats,
    pub pmc: Nats,
    pub lip: Nats,
    pub alip: [Nats; 2],
    pub ldp: Nats,
    pub max_cost_leakage: Nats,
    pub max_realizable_cost: Nats,
}

impl LevelReport {
    pub fn new<S: Scalar>(joint: &Joint<S>) -> Self {
        let pmc = max_realizable_cost(joint);
        let pml = max_pml_ratio(joint).ln();
        LevelReport {
            lip: pmc.clone().max(pml.clone()),
            alip: [pmc.clone(), pml.clone()],
            ldp: ldp_ratio(joint).ln(),
            max_cost_leakage: max_cost_leakage(joint),
            max_realizable_cost: pmc.clone(),
            pml,
            pmc,
        }
    }

    pub fn in_unit(&self, unit: Unit) -> Self {
        let c = |v: &Nats| unit.convert(v);
        LevelReport {
            pml: c(&self.pml),
            pmc: c(&self.pmc),
            lip: c(&self.lip),
            alip: [c(&self.alip[0]), c(&self.alip[1])],
            ldp: c(&self.ldp),
            max_cost_leakage: c(&self.max_cost_leakage),
            max_realizable_cost: c(&self.max_realizable_cost),
        }
    }
}

/// Leakage values for one outcome in the support of `P_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeLeakage {
    pub y: usize,
    pub p_y: f64,
    pub pmc: Nats,
    pub pml: Nats,
    pub info_density_min: f64,
    pub info_density_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageProfile {
    rows: Vec<OutcomeLeakage>,
}

impl LeakageProfile {
    pub fn new<S: Scalar>(joint: &Joint<S>) -> Self {
        let rows = joint
            .support()
            .map(|y| {
                let densities: Vec<f64> = (0..joint.n_inputs())
                    .map(|x| info_density(joint, x, y).expect("outcome in support"))
                    .collect();
                OutcomeLeakage {
                    y,
                    p_y: joint.marginal()[y].to_f64(),
                    pmc: pmc(joint, y).expect("outcome in support"),
                    pml: pml(joint, y).expect("outcome in support"),
                    info_density_min: densities.iter().copied().fold(f64::INFINITY, f64::min),
                    info_density_max: densities.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();
        LeakageProfile { rows }
    }

    pub fn rows(&self) -> &[OutcomeLeakage] {
        &self.rows
    }

    pub fn to_csv(&self, unit: Unit) -> String {
        let suffix = unit.suffix();
        let scale = match unit {
            Unit::Nats => 1.0,
            Unit::Bits => std::f64::consts::LN_2,
        };
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record([
                "y".to_string(),
                "P_Y".to_string(),
                format!("pmc_{suffix}"),
                format!("pml_{suffix}"),
                "info_density_min".to_string(),
                "info_density_max".to_string(),
            ])
            .expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record([
                    row.y.to_string(),
                    format_f64(row.p_y),
                    format_f64(unit.convert(&row.pmc).to_f64()),
                    format_f64(unit.convert(&row.pml).to_f64()),
                    format_f64(row.info_density_min / scale),
                    format_f64(row.info_density_max / scale),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Channel, Pmf};
    use crate::scalar::rational;
    use num_rational::BigRational;

    const LN2: f64 = std::f64::consts::LN_2;

    fn joint(prior: &[f64], rows: &[&[f64]]) -> Joint<f64> {
        Joint::new(
            Pmf::new(prior.to_vec()).unwrap(),
            Channel::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap(),
        )
        .unwrap()
    }

    fn bsc() -> Joint<f64> {
        joint(&[0.5, 0.5], &[&[0.75, 0.25], &[0.25, 0.75]])
    }

    fn close(a: &Nats, b: f64) -> bool {
        a.approx_eq(&ExtReal::Finite(b), 1e-12)
    }

    #[test]
    fn pmc_examples() {
        let indep = joint(&[0.3, 0.7], &[&[0.2, 0.8], &[0.2, 0.8]]);
        for y in 0..2 {
            assert!(close(&pmc(&indep, y).unwrap(), 0.0));
        }
        assert!(close(&pmc(&bsc(), 0).unwrap(), LN2));
        let inf = joint(&[0.5, 0.5], &[&[0.5, 0.5], &[0.0, 1.0]]);
        assert_eq!(pmc(&inf, 0).unwrap(), ExtReal::Infinite);
    }

    #[test]
    fn pmc_on_null_outcome_is_an_error() {
        let j = joint(&[0.5, 0.5], &[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(pmc(&j, 1), Err(Error::UndefinedOutcome { y: 1 }));
        assert_eq!(pml(&j, 1), Err(Error::UndefinedOutcome { y: 1 }));
    }

    #[test]
    fn pml_examples() {
        let indep = joint(&[0.3, 0.7], &[&[0.2, 0.8], &[0.2, 0.8]]);
        assert!(close(&pml(&indep, 1).unwrap(), 0.0));
        let j = bsc();
        assert!(close(&pml(&j, 0).unwrap(), 1.5f64.ln()));
        let max_density = (0..2)
            .map(|x| info_density(&j, x, 0).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(&pml(&j, 0).unwrap(), max_density));
        let point = joint(&[0.5, 0.5], &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(close(&pml(&point, 0).unwrap(), LN2));
    }

    #[test]
    fn conditional_pmc_by_bayes_rule() {
        let channel = Channel::new(vec![
            vec![rational(3, 4), rational(1, 4)],
            vec![rational(1, 4), rational(3, 4)],
        ])
        .unwrap();
        let family: Vec<Joint<BigRational>> = [(4, 1), (1, 4)]
            .iter()
            .map(|&(a, b)| {
                Joint::new(
                    Pmf::new(vec![rational(a, 5), rational(b, 5)]).unwrap(),
                    channel.clone(),
                )
                .unwrap()
            })
            .collect();
        // posterior (12/13, 1/13); ratios 0.8*13/12 and 0.2*13
        assert_eq!(
            conditional_pmc_ratio(&family, 0, 0).unwrap(),
            ExtReal::Finite(rational(13, 5))
        );
        assert!(close(&conditional_pmc(&family, 0, 0).unwrap(), 2.6f64.ln()));
    }

    #[test]
    fn conditional_pmc_with_irrelevant_side_information() {
        let j = bsc();
        let family = vec![j.clone(), j.clone(), j.clone()];
        for z in 0..3 {
            assert_eq!(conditional_pmc(&family, 0, z).unwrap(), pmc(&j, 0).unwrap());
        }
        assert!(matches!(
            conditional_pmc(&family, 0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn guarantee_levels_of_deterministic_mechanism() {
        let j = joint(&[0.5, 0.5], &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(
            guarantee_level(&j, GuaranteeKind::Ldp),
            Guarantee::Ldp { eps: ExtReal::Infinite }
        );
        assert_eq!(
            guarantee_level(&j, GuaranteeKind::Pmc),
            Guarantee::Pmc { eps: ExtReal::Infinite }
        );
        let Guarantee::Pml { eps } = guarantee_level(&j, GuaranteeKind::Pml) else {
            panic!("wrong kind");
        };
        assert!(close(&eps, LN2));
    }

    #[test]
    fn ldp_matches_pair_enumeration() {
        let j = bsc();
        let mut brute = 0.0f64;
        for y in 0..2 {
            for x in 0..2 {
                for x2 in 0..2 {
                    brute = brute.max(j.channel().entry(x, y) / j.channel().entry(x2, y));
                }
            }
        }
        let Guarantee::Ldp { eps } = guarantee_level(&j, GuaranteeKind::Ldp) else {
            panic!("wrong kind");
        };
        assert!(close(&eps, 3f64.ln()));
        assert!(close(&eps, brute.ln()));
    }

    #[test]
    fn independent_channel_has_zero_levels() {
        let j = joint(&[0.2, 0.3, 0.5], &[&[0.1, 0.9], &[0.1, 0.9], &[0.1, 0.9]]);
        let r = LevelReport::new(&j);
        for v in [&r.pml, &r.pmc, &r.lip, &r.alip[0], &r.alip[1], &r.ldp] {
            assert!(close(v, 0.0), "{v}");
        }
        assert!(close(&r.max_cost_leakage, 0.0));
        assert!(close(&r.max_realizable_cost, 0.0));
    }

    #[test]
    fn lip_and_alip_combine_both_directions() {
        let j = bsc();
        let Guarantee::Alip { eps_l, eps_u } = guarantee_level(&j, GuaranteeKind::Alip) else {
            panic!("wrong kind");
        };
        assert!(close(&eps_l, LN2));
        assert!(close(&eps_u, 1.5f64.ln()));
        assert_eq!(guarantee_level(&j, GuaranteeKind::Lip), Guarantee::Lip { eps: eps_l });
    }

    #[test]
    fn ldp_ignores_null_outcomes() {
        // y = 2 is never produced, so its zero column does not count
        let j = joint(&[0.5, 0.5], &[&[0.5, 0.5, 0.0], &[0.25, 0.75, 0.0]]);
        assert!(close(&ldp_ratio(&j).ln(), 2f64.ln()));
    }

    #[test]
    fn max_cost_leakage_examples() {
        assert!(close(&max_cost_leakage(&bsc()), LN2));
        let id = joint(&[0.5, 0.5], &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(max_cost_leakage(&id), ExtReal::Infinite);
    }

    #[test]
    fn max_realizable_cost_examples() {
        assert!(close(&max_realizable_cost(&bsc()), LN2));
        let inf = joint(&[0.5, 0.5], &[&[0.5, 0.5], &[0.0, 1.0]]);
        assert_eq!(max_realizable_cost(&inf), ExtReal::Infinite);
    }

    #[test]
    fn expected_pmc_dominates_max_cost_leakage() {
        let j = joint(&[0.2, 0.8], &[&[0.6, 0.3, 0.1], &[0.2, 0.3, 0.5]]);
        assert!(max_cost_leakage(&j).to_f64() < expected_pmc(&j).to_f64());
    }

    #[test]
    fn profile_csv_uses_inf_token() {
        let j = joint(&[0.5, 0.5], &[&[0.5, 0.5], &[0.0, 1.0]]);
        let csv = LeakageProfile::new(&j).to_csv(Unit::Nats);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "y,P_Y,pmc_nats,pml_nats,info_density_min,info_density_max"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "0.25");
        assert_eq!(first[2], "inf");
        assert_eq!(first[4], "-inf");
    }

    #[test]
    fn profile_skips_null_outcomes_and_converts_units() {
        let j = joint(&[0.5, 0.5], &[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(LeakageProfile::new(&j).rows().len(), 1);
        let csv = LeakageProfile::new(&bsc()).to_csv(Unit::Bits);
        assert!(csv.starts_with("y,P_Y,pmc_bits,pml_bits"));
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
    }

    #[test]
    fn guarantee_json_shape() {
        let g = Guarantee::Alip {
            eps_l: ExtReal::Infinite,
            eps_u: ExtReal::Finite(0.5),
        };
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"kind":"ALIP","eps_l":"inf","eps_u":0.5}"#
        );
        assert_eq!(g.to_string(), "ALIP(inf, 0.5)");
    }
}
