//! Translations between PML, PMC, LIP, ALIP and LDP guarantees.
//!
//! All maps take the smallest prior mass `p_min` explicitly. Levels are in
//! nats; `+∞` is accepted as an input wherever a guarantee may be vacuous.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::{format_f64, ExtReal, Nats, Unit};
use crate::leakage::{self, Guarantee};
use crate::prob::{Joint, Pmf};
use crate::scalar::Scalar;

fn check_pmin(p_min: f64) -> Result<()> {
    if p_min > 0.0 && p_min <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidPmin(p_min))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// `p_min` of a prior, for use with the translation maps.
pub fn p_min_of<S: Scalar>(prior: &Pmf<S>) -> f64 {
    prior.p_min().to_f64()
}

/// Upper end of the high-privacy regime, `log 1/(1 - p_min)`.
pub fn high_privacy_bound(p_min: f64) -> Result<f64> {
    check_pmin(p_min)?;
    Ok(-(-p_min).ln_1p())
}

/// `ε*_l(ε_u) = log p_min / (1 - e^{ε_u}(1 - p_min))`, infinite outside the
/// high-privacy regime.
pub fn pml_to_pmc(eps_u: f64, p_min: f64) -> Result<Nats> {
    check_eps(eps_u)?;
    let bound = high_privacy_bound(p_min)?;
    if eps_u >= bound {
        return Ok(ExtReal::Infinite);
    }
    Ok(ExtReal::Finite(
        -(-eps_u.exp_m1() * (1.0 - p_min) / p_min).ln_1p(),
    ))
}

/// Ratio form of [`pml_to_pmc`] with `r = e^{ε_u}`.
pub fn pml_to_pmc_ratio<S: Scalar>(r: &S, p_min: &S) -> ExtReal<S> {
    let den = S::one() - r.clone() * (S::one() - p_min.clone());
    if den > S::zero() {
        ExtReal::Finite(p_min.clone() / den)
    } else {
        ExtReal::Infinite
    }
}

/// `ε*_u(ε_l) = log (1 - e^{-ε_l}(1 - p_min)) / p_min`; finite for every `ε_l`.
pub fn pmc_to_pml(eps_l: f64, p_min: f64) -> Result<f64> {
    check_eps(eps_l)?;
    check_pmin(p_min)?;
    Ok((-(-eps_l).exp_m1() * (1.0 - p_min) / p_min).ln_1p())
}

/// `ε`-LDP implies `ε1`-LIP, `(ε1, ε2)`-ALIP and `ε2`-PML.
pub fn ldp_to_context(eps: f64, p_min: f64) -> Result<(Nats, f64)> {
    check_eps(eps)?;
    check_pmin(p_min)?;
    let eps2 = -((-eps).exp_m1() * (1.0 - p_min)).ln_1p();
    Ok((ldp_to_pmc(eps, p_min)?, eps2))
}

/// `ε`-LDP implies `log(e^ε - p_min(e^ε - 1))`-PMC.
pub fn ldp_to_pmc(eps: f64, p_min: f64) -> Result<Nats> {
    check_eps(eps)?;
    check_pmin(p_min)?;
    if p_min == 1.0 {
        return Ok(ExtReal::Finite(0.0));
    }
    if eps.is_infinite() {
        return Ok(ExtReal::Infinite);
    }
    Ok(ExtReal::Finite((eps.exp_m1() * (1.0 - p_min)).ln_1p()))
}

/// Ratio form of [`ldp_to_pmc`] with `r = e^ε`.
pub fn ldp_to_pmc_ratio<S: Scalar>(r: &S, p_min: &S) -> S {
    r.clone() - p_min.clone() * (r.clone() - S::one())
}

pub const OUTSIDE_HIGH_PRIVACY: &str = "OutsideHighPrivacy";

/// Guarantees implied by a source guarantee in one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub source: Guarantee,
    pub implied: Vec<Guarantee>,
    /// Whether the (source or implied) PML level lies below `log 1/(1 - p_min)`.
    pub high_privacy: bool,
    pub flags: Vec<&'static str>,
    pub p_min: f64,
}

impl TranslationResult {
    pub fn find(&self, kind: leakage::GuaranteeKind) -> Option<&Guarantee> {
        self.implied.iter().find(|g| g.kind() == kind)
    }

    pub fn in_unit(&self, unit: Unit) -> Self {
        let c = |g: &Guarantee| match g {
            Guarantee::Pml { eps } => Guarantee::Pml { eps: unit.convert(eps) },
            Guarantee::Pmc { eps } => Guarantee::Pmc { eps: unit.convert(eps) },
            Guarantee::Lip { eps } => Guarantee::Lip { eps: unit.convert(eps) },
            Guarantee::Ldp { eps } => Guarantee::Ldp { eps: unit.convert(eps) },
            Guarantee::Alip { eps_l, eps_u } => Guarantee::Alip {
                eps_l: unit.convert(eps_l),
                eps_u: unit.convert(eps_u),
            },
        };
        TranslationResult {
            source: c(&self.source),
            implied: self.implied.iter().map(c).collect(),
            ..self.clone()
        }
    }
}

fn finite_level(eps: &Nats) -> Result<f64> {
    match eps {
        ExtReal::Finite(v) => {
            check_eps(*v)?;
            Ok(*v)
        }
        ExtReal::Infinite => Ok(f64::INFINITY),
    }
}

/// One-step implications of `source` for a prior with smallest mass `p_min`.
pub fn derive_implications(source: &Guarantee, p_min: f64) -> Result<TranslationResult> {
    check_pmin(p_min)?;
    source.validate()?;
    let bound = high_privacy_bound(p_min)?;
    let fin = ExtReal::Finite;
    let (implied, pml_level) = match source {
        Guarantee::Pml { eps } => {
            let eps_u = finite_level(eps)?;
            let eps_l = pml_to_pmc(eps_u, p_min)?;
            (
                vec![
                    Guarantee::Pmc { eps: eps_l.clone() },
                    Guarantee::Alip {
                        eps_l: eps_l.clone(),
                        eps_u: eps.clone(),
                    },
                    Guarantee::Lip {
                        eps: eps_l.clone().max(eps.clone()),
                    },
                    Guarantee::Ldp {
                        eps: eps_l + eps.clone(),
                    },
                ],
                eps_u,
            )
        }
        Guarantee::Pmc { eps } => {
            let eps_l = finite_level(eps)?;
            let eps_u = fin(pmc_to_pml(eps_l, p_min)?);
            (
                vec![
                    Guarantee::Pml { eps: eps_u.clone() },
                    Guarantee::Alip {
                        eps_l: eps.clone(),
                        eps_u: eps_u.clone(),
                    },
                    Guarantee::Lip {
                        eps: eps.clone().max(eps_u.clone()),
                    },
                    Guarantee::Ldp {
                        eps: eps.clone() + eps_u.clone(),
                    },
                ],
                eps_u.to_f64(),
            )
        }
        Guarantee::Ldp { eps } => {
            let (eps1, eps2) = ldp_to_context(finite_level(eps)?, p_min)?;
            (
                vec![
                    Guarantee::Lip { eps: eps1.clone() },
                    Guarantee::Alip {
                        eps_l: eps1.clone(),
                        eps_u: fin(eps2),
                    },
                    Guarantee::Pml { eps: fin(eps2) },
                    Guarantee::Pmc { eps: eps1 },
                ],
                eps2,
            )
        }
        Guarantee::Lip { eps } => {
            let level = finite_level(eps)?;
            (
                vec![
                    Guarantee::Alip {
                        eps_l: eps.clone(),
                        eps_u: eps.clone(),
                    },
                    Guarantee::Pml { eps: eps.clone() },
                    Guarantee::Pmc { eps: eps.clone() },
                    Guarantee::Ldp {
                        eps: eps.clone() + eps.clone(),
                    },
                ],
                level,
            )
        }
        Guarantee::Alip { eps_l, eps_u } => (
            vec![
                Guarantee::Pml { eps: eps_u.clone() },
                Guarantee::Pmc { eps: eps_l.clone() },
                Guarantee::Ldp {
                    eps: eps_l.clone() + eps_u.clone(),
                },
            ],
            finite_level(eps_u)?,
        ),
    };
    let high_privacy = pml_level < bound;
    let mut flags = Vec::new();
    if matches!(source, Guarantee::Pml { .. }) && !high_privacy {
        flags.push(OUTSIDE_HIGH_PRIVACY);
    }
    Ok(TranslationResult {
        source: source.clone(),
        implied,
        high_privacy,
        flags,
        p_min,
    })
}

/// Tabulated translation curves, in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub p_min: f64,
    /// `(ε_u, ε*_l(ε_u))` for `ε_u` in `[0, log 1/(1 - p_min))`.
    pub lower_from_upper: Vec<(f64, f64)>,
    /// `(ε_l, ε*_u(ε_l))` over the range of the first curve.
    pub upper_from_lower: Vec<(f64, f64)>,
}

impl CurveTable {
    fn csv(rows: &[(f64, f64)], header: [&str; 2], unit: Unit) -> String {
        let (scale, suffix) = match unit {
            Unit::Nats => (1.0, String::new()),
            Unit::Bits => (std::f64::consts::LN_2, format!("_{}", unit.suffix())),
        };
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(header.iter().map(|h| format!("{h}{suffix}")))
            .expect("in-memory write");
        for (a, b) in rows {
            writer
                .write_record([format_f64(a / scale), format_f64(b / scale)])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    /// CSV with header `eps_u,eps_l_star`.
    pub fn lower_csv(&self, unit: Unit) -> String {
        Self::csv(&self.lower_from_upper, ["eps_u", "eps_l_star"], unit)
    }

    /// CSV with header `eps_l,eps_u_star`.
    pub fn upper_csv(&self, unit: Unit) -> String {
        Self::csv(&self.upper_from_lower, ["eps_l", "eps_u_star"], unit)
    }
}

/// Samples both translation curves on `steps` points each.
///
/// The PML grid is `i · b / steps` for `i < steps` with `b = log 1/(1 - p_min)`;
/// the PMC grid spans `[0, ε*_l]` at the last PML point, so the two curves
/// cover the same range and can be compared as inverses.
pub fn sweep_curves(p_min: f64, steps: usize) -> Result<CurveTable> {
    check_pmin(p_min)?;
    if p_min >= 1.0 {
        return Err(Error::InvalidPmin(p_min));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("steps = {steps} is below 2")));
    }
    let bound = high_privacy_bound(p_min)?;
    let lower_from_upper = (0..steps)
        .map(|i| {
            let eps_u = bound * i as f64 / steps as f64;
            Ok((eps_u, pml_to_pmc(eps_u, p_min)?.to_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let eps_max = lower_from_upper.last().expect("steps >= 2").1;
    let upper_from_lower = (0..steps)
        .map(|i| {
            let eps_l = eps_max * i as f64 / (steps - 1) as f64;
            Ok((eps_l, pmc_to_pml(eps_l, p_min)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable {
        p_min,
        lower_from_upper,
        upper_from_lower,
    })
}

/// Finite-alphabet check that PMC is bounded exactly when LDP is, and that
/// bounded PMC implies bounded PML.
pub fn verify_boundedness_equivalence<S: Scalar>(joint: &Joint<S>) -> bool {
    let pmc_finite = leakage::max_realizable_cost_ratio(joint).is_finite();
    let ldp_finite = leakage::ldp_ratio(joint).is_finite();
    let pml_finite = leakage::max_pml_ratio(joint).is_finite();
    pmc_finite == ldp_finite && (!pmc_finite || pml_finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leakage::GuaranteeKind;
    use crate::prob::Channel;
    use crate::scalar::rational;

    const LN2: f64 = std::f64::consts::LN_2;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    fn close(a: &Nats, b: f64) -> bool {
        a.approx_eq(&ExtReal::Finite(b), 1e-12)
    }

    #[test]
    fn pml_to_pmc_examples() {
        for p in [0.1, 0.3, 0.5] {
            assert!(close(&pml_to_pmc(0.0, p).unwrap(), 0.0));
        }
        assert!(close(&pml_to_pmc(ln(1.5), 0.5).unwrap(), LN2));
        assert_eq!(pml_to_pmc(LN2, 0.5).unwrap(), ExtReal::Infinite);
        assert_eq!(pml_to_pmc(0.1, 0.0), Err(Error::InvalidPmin(0.0)));
        assert_eq!(pml_to_pmc(0.1, 1.5), Err(Error::InvalidPmin(1.5)));
    }

    #[test]
    fn pml_to_pmc_ratio_is_exact() {
        assert_eq!(
            pml_to_pmc_ratio(&rational(3, 2), &rational(1, 2)),
            ExtReal::Finite(rational(2, 1))
        );
        assert_eq!(
            pml_to_pmc_ratio(&rational(2, 1), &rational(1, 2)),
            ExtReal::Infinite
        );
    }

    #[test]
    fn pmc_to_pml_examples() {
        assert_eq!(pmc_to_pml(0.0, 0.4).unwrap(), 0.0);
        assert!((pmc_to_pml(LN2, 0.5).unwrap() - ln(1.5)).abs() < 1e-12);
        assert!((pmc_to_pml(f64::INFINITY, 0.5).unwrap() - LN2).abs() < 1e-15);
    }

    #[test]
    fn ldp_to_context_examples() {
        let (e1, e2) = ldp_to_context(0.0, 0.3).unwrap();
        assert!(close(&e1, 0.0) && e2.abs() < 1e-15);
        let (e1, e2) = ldp_to_context(LN2, 0.5).unwrap();
        assert!(close(&e1, ln(1.5)));
        assert!((e2 - ln(4.0 / 3.0)).abs() < 1e-12);
        let (e1, e2) = ldp_to_context(1.3, 1e-12).unwrap();
        assert!(close(&e1, 1.3) && (e2 - 1.3).abs() < 1e-9);
    }

    #[test]
    fn ldp_channel_with_level_log2_respects_context_bounds() {
        let j = Joint::new(
            Pmf::new(vec![0.5, 0.5]).unwrap(),
            Channel::new(vec![vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]]).unwrap(),
        )
        .unwrap();
        let Guarantee::Ldp { eps } = leakage::guarantee_level(&j, GuaranteeKind::Ldp) else {
            panic!("wrong kind");
        };
        assert!(close(&eps, LN2));
        let (_, eps2) = ldp_to_context(LN2, 0.5).unwrap();
        assert!(leakage::max_pml_ratio(&j).ln().to_f64() <= eps2 + 1e-12);
    }

    #[test]
    fn ldp_to_pmc_examples() {
        assert!(close(&ldp_to_pmc(0.0, 0.2).unwrap(), 0.0));
        assert!(close(&ldp_to_pmc(LN2, 0.5).unwrap(), ln(1.5)));
        assert!(close(&ldp_to_pmc(3.0, 1.0).unwrap(), 0.0));
        assert_eq!(ldp_to_pmc_ratio(&rational(2, 1), &rational(1, 2)), rational(3, 2));
    }

    #[test]
    fn implications_of_pml() {
        let r = derive_implications(&Guarantee::Pml { eps: ExtReal::Finite(ln(1.5)) }, 0.5).unwrap();
        assert!(r.high_privacy && r.flags.is_empty());
        let Some(Guarantee::Pmc { eps }) = r.find(GuaranteeKind::Pmc) else {
            panic!("missing PMC");
        };
        assert!(close(eps, LN2));
        let Some(Guarantee::Alip { eps_l, eps_u }) = r.find(GuaranteeKind::Alip) else {
            panic!("missing ALIP");
        };
        assert!(close(eps_l, LN2) && close(eps_u, ln(1.5)));
        let Some(Guarantee::Ldp { eps }) = r.find(GuaranteeKind::Ldp) else {
            panic!("missing LDP");
        };
        assert!(close(eps, ln(3.0)));
    }

    #[test]
    fn implications_of_zero_pml_are_zero() {
        let r = derive_implications(&Guarantee::Pml { eps: ExtReal::Finite(0.0) }, 0.3).unwrap();
        for g in &r.implied {
            let levels = match g {
                Guarantee::Alip { eps_l, eps_u } => vec![eps_l, eps_u],
                Guarantee::Pml { eps }
                | Guarantee::Pmc { eps }
                | Guarantee::Lip { eps }
                | Guarantee::Ldp { eps } => vec![eps],
            };
            assert!(levels.iter().all(|e| close(e, 0.0)), "{g}");
        }
    }

    #[test]
    fn implications_outside_high_privacy_are_flagged() {
        let r = derive_implications(&Guarantee::Pml { eps: ExtReal::Finite(LN2) }, 0.5).unwrap();
        assert!(!r.high_privacy);
        assert_eq!(r.flags, vec![OUTSIDE_HIGH_PRIVACY]);
        assert_eq!(
            r.find(GuaranteeKind::Pmc),
            Some(&Guarantee::Pmc { eps: ExtReal::Infinite })
        );
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""kind":"PMC","eps":"inf""#));
    }

    #[test]
    fn implications_of_lip_alip_and_pmc() {
        let lip = derive_implications(&Guarantee::Lip { eps: ExtReal::Finite(0.3) }, 0.2).unwrap();
        assert!(close(
            match lip.find(GuaranteeKind::Ldp) {
                Some(Guarantee::Ldp { eps }) => eps,
                _ => panic!("missing LDP"),
            },
            0.6
        ));
        let alip = derive_implications(
            &Guarantee::Alip {
                eps_l: ExtReal::Finite(0.2),
                eps_u: ExtReal::Finite(0.1),
            },
            0.2,
        )
        .unwrap();
        assert_eq!(alip.implied.len(), 3);
        let pmc = derive_implications(&Guarantee::Pmc { eps: ExtReal::Finite(LN2) }, 0.5).unwrap();
        assert_eq!(
            pmc.find(GuaranteeKind::Pml),
            Some(&Guarantee::Pml {
                eps: ExtReal::Finite(pmc_to_pml(LN2, 0.5).unwrap())
            })
        );
        assert!(derive_implications(&Guarantee::Pmc { eps: ExtReal::Finite(-1.0) }, 0.5).is_err());
    }

    #[test]
    fn sweep_involution_for_uniform_binary_prior() {
        for x in [0.1, 0.2, 0.3] {
            let l = pml_to_pmc(x, 0.5).unwrap().to_f64();
            assert!((pmc_to_pml(l, 0.5).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_for_skewed_prior() {
        let v = pml_to_pmc(0.2, 0.2).unwrap().to_f64();
        assert!((v - (0.2 / (1.0 - 0.2f64.exp() * 0.8)).ln()).abs() < 1e-13);
        assert!((v - 2.168).abs() < 1e-3);
        let t = sweep_curves(0.2, 100).unwrap();
        assert_eq!(t.lower_from_upper.len(), 100);
        assert!(t.lower_from_upper.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(t.upper_from_lower.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(t.lower_from_upper.last().unwrap().0 < ln(1.25));
    }

    #[test]
    fn sweep_with_two_steps() {
        let t = sweep_curves(0.5, 2).unwrap();
        assert_eq!(t.lower_from_upper[0], (0.0, 0.0));
        assert_eq!(t.upper_from_lower[0], (0.0, 0.0));
        assert_eq!(t.lower_from_upper.len(), 2);
        let csv = t.lower_csv(Unit::Nats);
        assert!(csv.starts_with("eps_u,eps_l_star\n0.0,0.0\n"));
        assert!(t.upper_csv(Unit::Bits).starts_with("eps_l_bits,eps_u_star_bits\n"));
        assert!(matches!(sweep_curves(0.5, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(sweep_curves(1.5, 10), Err(Error::InvalidPmin(_))));
    }

    #[test]
    fn boundedness_examples() {
        let positive = Joint::new(
            Pmf::new(vec![0.4, 0.6]).unwrap(),
            Channel::new(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap(),
        )
        .unwrap();
        assert!(verify_boundedness_equivalence(&positive));
        let zero = Joint::new(
            Pmf::new(vec![0.4, 0.6]).unwrap(),
            Channel::new(vec![vec![0.0, 1.0], vec![0.6, 0.4]]).unwrap(),
        )
        .unwrap();
        assert!(leakage::ldp_ratio(&zero).is_infinite());
        assert!(verify_boundedness_equivalence(&zero));
    }
}
