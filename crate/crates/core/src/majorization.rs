//! Deciding `f ≺_w g` and `f ≺ g` by several equivalent exact criteria.
//!
//! Every criterion compares two piecewise-linear functions of one variable:
//! partial integrals of the decreasing rearrangements in `s`, or hinge and
//! tail-distribution integrals in `u`. The difference of two such functions
//! is linear between consecutive breakpoints of either side, so it is
//! nonpositive everywhere as soon as it is nonpositive at every breakpoint.
//! The union of breakpoints is therefore a complete test set and each verdict
//! is exact.

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{serialize_rational, Rational};
use crate::step::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Rearrangement,
    TailDistribution,
    Hinge,
    ConvexSample,
    SublinearSample,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Rearrangement => "rearrangement",
            Criterion::TailDistribution => "tail-distribution",
            Criterion::Hinge => "hinge",
            Criterion::ConvexSample => "convex-sample",
            Criterion::SublinearSample => "sublinear-sample",
        }
    }
}

/// `Weak` is `≺_w`; `Strong` adds equality of the total integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Weak,
    Strong,
}

/// Where a criterion was evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Probe {
    /// Upper limit `s` of `∫_0^s h↓`.
    Level {
        #[serde(serialize_with = "serialize_rational")]
        s: Rational,
    },
    /// Threshold `u` of `∫(h − u)⁺` or `∫_u^∞ d_h`.
    Threshold {
        #[serde(serialize_with = "serialize_rational")]
        u: Rational,
    },
    /// `φ(t) = β·t⁺ + α·t⁻`.
    Sublinear {
        #[serde(serialize_with = "serialize_rational")]
        alpha: Rational,
        #[serde(serialize_with = "serialize_rational")]
        beta: Rational,
    },
    /// Equality clause `∫ f = ∫ g`.
    Total,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub probe: Probe,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: Rational,
}

impl Evaluation {
    fn violated(&self) -> bool {
        match self.probe {
            Probe::Total => self.lhs != self.rhs,
            _ => self.lhs > self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// First probe (in increasing order) where the inequality fails.
    Violation(Evaluation),
    /// Every probe checked, all satisfied.
    Checked(Vec<Evaluation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub criterion: Criterion,
    pub relation: Relation,
    pub certificate: Certificate,
}

impl MajorizationVerdict {
    /// Re-evaluates the certificate on `f`, `g`: a violation must reproduce
    /// with identical values, a success list must still hold pointwise.
    pub fn reverify(&self, f: &StepFunction, g: &StepFunction) -> Result<bool> {
        let check = |e: &Evaluation| -> Result<bool> {
            let (lhs, rhs) = (evaluate(self.criterion, &e.probe, f)?, evaluate(self.criterion, &e.probe, g)?);
            Ok(lhs == e.lhs && rhs == e.rhs)
        };
        match &self.certificate {
            Certificate::Violation(e) => Ok(!self.holds && e.violated() && check(e)?),
            Certificate::Checked(list) => {
                if !self.holds {
                    return Ok(false);
                }
                for e in list {
                    if e.violated() || !check(e)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Value of the criterion's functional of `h` at `probe`.
fn evaluate(criterion: Criterion, probe: &Probe, h: &StepFunction) -> Result<Rational> {
    match (criterion, probe) {
        (_, Probe::Total) => Ok(h.integral()),
        (Criterion::Rearrangement, Probe::Level { s }) => h.partial_integral_at(s),
        (Criterion::Hinge | Criterion::ConvexSample, Probe::Threshold { u }) => h.hinge_integral(u),
        (Criterion::TailDistribution, Probe::Threshold { u }) => h.tail_integral(u),
        (_, Probe::Sublinear { alpha, beta }) => Ok(sublinear_integral(h, alpha, beta)),
        _ => Err(Error::InternalInconsistency(format!(
            "probe {probe:?} does not belong to criterion {}",
            criterion.name()
        ))),
    }
}

/// `∫ φ(h) dμ` with `φ(t) = β·max(t, 0) + α·max(−t, 0)`.
fn sublinear_integral(h: &StepFunction, alpha: &Rational, beta: &Rational) -> Rational {
    h.pieces()
        .iter()
        .map(|p| {
            let phi = if p.value.is_negative() {
                alpha * -&p.value
            } else {
                beta * &p.value
            };
            phi * &p.mass
        })
        .sum()
}

fn same_space(f: &StepFunction, g: &StepFunction) -> Result<()> {
    if f.total_measure() != g.total_measure() {
        return Err(Error::MeasureMismatch(
            f.total_measure().to_string(),
            g.total_measure().to_string(),
        ));
    }
    Ok(())
}

fn require_nonnegative(f: &StepFunction, g: &StepFunction) -> Result<()> {
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(Error::SignednessViolation);
    }
    Ok(())
}

/// Walks the probes in order, stopping at the first violation, then applies
/// the equality clause for the strong relation.
fn run_probes(
    criterion: Criterion,
    relation: Relation,
    probes: Vec<Probe>,
    f: &StepFunction,
    g: &StepFunction,
) -> Result<MajorizationVerdict> {
    let mut checked = Vec::with_capacity(probes.len() + 1);
    let mut all = probes;
    if relation == Relation::Strong {
        all.push(Probe::Total);
    }
    for probe in all {
        let e = Evaluation {
            lhs: evaluate(criterion, &probe, f)?,
            rhs: evaluate(criterion, &probe, g)?,
            probe,
        };
        if e.violated() {
            return Ok(MajorizationVerdict {
                holds: false,
                criterion,
                relation,
                certificate: Certificate::Violation(e),
            });
        }
        checked.push(e);
    }
    Ok(MajorizationVerdict {
        holds: true,
        criterion,
        relation,
        certificate: Certificate::Checked(checked),
    })
}

/// `{0}` together with every right endpoint of a constancy interval of `f↓`
/// or `g↓`, ascending.
pub fn level_breakpoints(f: &StepFunction, g: &StepFunction) -> Vec<Rational> {
    let mut s: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(f.mass_breakpoints())
        .chain(g.mass_breakpoints())
        .collect();
    s.sort();
    s.dedup();
    s
}

/// `{0}` together with every positive value of `f` or `g`, ascending.
pub fn threshold_breakpoints(f: &StepFunction, g: &StepFunction) -> Vec<Rational> {
    let mut u: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(f.pieces().iter().map(|p| p.value.clone()))
        .chain(g.pieces().iter().map(|p| p.value.clone()))
        .filter(|v| !v.is_negative())
        .collect();
    u.sort();
    u.dedup();
    u
}

/// `∫_0^s f↓ ≤ ∫_0^s g↓` for all `0 ≤ s ≤ μ(X)`, plus equal totals when
/// `relation` is strong. Signed functions are accepted on finite spaces.
pub fn rearrangement_criterion(f: &StepFunction, g: &StepFunction, relation: Relation) -> Result<MajorizationVerdict> {
    same_space(f, g)?;
    let probes = level_breakpoints(f, g).into_iter().map(|s| Probe::Level { s }).collect();
    run_probes(Criterion::Rearrangement, relation, probes, f, g)
}

/// `∫(f − u)⁺ ≤ ∫(g − u)⁺` for all `u ≥ 0`, plus equal totals when strong.
pub fn hinge_criterion_with(f: &StepFunction, g: &StepFunction, relation: Relation) -> Result<MajorizationVerdict> {
    same_space(f, g)?;
    require_nonnegative(f, g)?;
    let probes = threshold_breakpoints(f, g)
        .into_iter()
        .map(|u| Probe::Threshold { u })
        .collect();
    run_probes(Criterion::Hinge, relation, probes, f, g)
}

/// `∫_u^∞ d_f ≤ ∫_u^∞ d_g` for all `u ≥ 0`, plus equal totals when strong.
/// The tails are integrated directly from the distribution functions.
pub fn tail_distribution_criterion_with(
    f: &StepFunction,
    g: &StepFunction,
    relation: Relation,
) -> Result<MajorizationVerdict> {
    same_space(f, g)?;
    require_nonnegative(f, g)?;
    let probes = threshold_breakpoints(f, g)
        .into_iter()
        .map(|u| Probe::Threshold { u })
        .collect();
    run_probes(Criterion::TailDistribution, relation, probes, f, g)
}

/// `f ≺_w g`.
pub fn weak_majorize(f: &StepFunction, g: &StepFunction) -> Result<MajorizationVerdict> {
    rearrangement_criterion(f, g, Relation::Weak)
}

/// `f ≺ g`.
pub fn majorize(f: &StepFunction, g: &StepFunction) -> Result<MajorizationVerdict> {
    rearrangement_criterion(f, g, Relation::Strong)
}

pub fn hinge_criterion(f: &StepFunction, g: &StepFunction) -> Result<MajorizationVerdict> {
    hinge_criterion_with(f, g, Relation::Strong)
}

pub fn tail_distribution_criterion(f: &StepFunction, g: &StepFunction) -> Result<MajorizationVerdict> {
    tail_distribution_criterion_with(f, g, Relation::Strong)
}

/// A finite family of test functions for the integral inequality
/// `∫ φ(f) ≤ ∫ φ(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestFunctionFamily {
    /// `φ_u(t) = (t − u)⁺` for each `u ≥ 0` in the grid: increasing, convex,
    /// `φ_u(0) = 0`.
    Hinge(Vec<Rational>),
    /// `φ(t) = β·t⁺ + α·t⁻` for each `(α, β)` with `α, β ≥ 0`: nonnegative
    /// and sublinear.
    Sublinear(Vec<(Rational, Rational)>),
}

impl TestFunctionFamily {
    fn probes(&self) -> Result<Vec<Probe>> {
        let probes: Vec<Probe> = match self {
            TestFunctionFamily::Hinge(grid) => {
                if let Some(u) = grid.iter().find(|u| u.is_negative()) {
                    return Err(Error::InvalidFamilyParameter(format!("hinge level {u} < 0")));
                }
                let mut grid = grid.clone();
                grid.sort();
                grid.dedup();
                grid.into_iter().map(|u| Probe::Threshold { u }).collect()
            }
            TestFunctionFamily::Sublinear(pairs) => {
                if let Some((a, b)) = pairs.iter().find(|(a, b)| a.is_negative() || b.is_negative()) {
                    return Err(Error::InvalidFamilyParameter(format!("slopes ({a}, {b}) must be nonnegative")));
                }
                pairs
                    .iter()
                    .map(|(alpha, beta)| Probe::Sublinear {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                    })
                    .collect()
            }
        };
        if probes.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(probes)
    }
}

/// Checks `∫ φ(f) ≤ ∫ φ(g)` for each member of a finite family.
///
/// A passing hinge family is only a necessary condition for `f ≺ g` in
/// general. It becomes sufficient when the grid contains every value of `f`
/// and `g` and the strong relation's equality clause is enforced (for the weak
/// relation the grid must also contain 0). A sublinear family ignores
/// `relation`: it tests the one-sided inequality satisfied by `f = S g`.
pub fn convex_sample_test(
    f: &StepFunction,
    g: &StepFunction,
    family: &TestFunctionFamily,
    relation: Relation,
) -> Result<MajorizationVerdict> {
    same_space(f, g)?;
    let probes = family.probes()?;
    match family {
        TestFunctionFamily::Hinge(_) => run_probes(Criterion::ConvexSample, relation, probes, f, g),
        TestFunctionFamily::Sublinear(_) => run_probes(Criterion::SublinearSample, Relation::Weak, probes, f, g),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub holds: bool,
    pub verdicts: Vec<MajorizationVerdict>,
}

/// Runs the rearrangement, hinge and tail-distribution criteria and demands
/// agreement. A disagreement can only come from a bug.
pub fn cross_check_with(f: &StepFunction, g: &StepFunction, relation: Relation) -> Result<CrossCheck> {
    require_nonnegative(f, g)?;
    let verdicts = vec![
        rearrangement_criterion(f, g, relation)?,
        hinge_criterion_with(f, g, relation)?,
        tail_distribution_criterion_with(f, g, relation)?,
    ];
    let holds = verdicts[0].holds;
    if verdicts.iter().any(|v| v.holds != holds) {
        let detail: Vec<String> = verdicts
            .iter()
            .map(|v| format!("{}: holds={} certificate={:?}", v.criterion.name(), v.holds, v.certificate))
            .collect();
        return Err(Error::InternalInconsistency(detail.join("; ")));
    }
    Ok(CrossCheck { holds, verdicts })
}

pub fn cross_check(f: &StepFunction, g: &StepFunction) -> Result<CrossCheck> {
    cross_check_with(f, g, Relation::Strong)
}
