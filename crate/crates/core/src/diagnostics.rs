//! Small-set integral moduli and the equi-integrability bound for orbits
//! `{S f : S semi-doubly stochastic}`.

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{serialize_rational, ExtendedReal, Rational};
use crate::step::StepFunction;

/// `sup {∫_E h dμ : μ(E) ≤ δ}` for nonnegative `h`. The supremum is attained
/// on the top slice of the level sets, so it equals `∫_0^δ h↓`.
pub fn small_set_modulus(h: &StepFunction, delta: &Rational) -> Result<Rational> {
    if !h.is_nonnegative() {
        return Err(Error::SignednessViolation);
    }
    let out_of_range = delta.is_negative() || &ExtendedReal::Finite(delta.clone()) > h.total_measure();
    if out_of_range {
        return Err(Error::DeltaOutOfRange {
            delta: delta.to_string(),
            total: h.total_measure().to_string(),
        });
    }
    h.partial_integral_at(delta)
}

/// The bound `∫(f − c)⁺ + c·δ` on the modulus of any `S f` with `S`
/// semi-doubly stochastic: split `f` into `min(f, c)` and the excess.
pub fn truncation_bound(f: &StepFunction, c: &Rational, delta: &Rational) -> Result<Rational> {
    Ok(f.hinge_integral(c)? + c * delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquiIntegrabilityReport {
    #[serde(serialize_with = "serialize_rational")]
    pub delta: Rational,
    /// Largest small-set modulus over the family.
    #[serde(serialize_with = "serialize_rational")]
    pub modulus: Rational,
    /// Smallest truncation bound over the `c` grid.
    #[serde(serialize_with = "serialize_rational")]
    pub bound: Rational,
    /// Truncation level attaining `bound`.
    #[serde(serialize_with = "serialize_rational")]
    pub best_level: Rational,
    pub family_size: usize,
}

impl EquiIntegrabilityReport {
    pub fn within_bound(&self) -> bool {
        self.modulus <= self.bound
    }
}

/// Default truncation grid: 0 and the values of `f`. The bound is linear in
/// `c` between consecutive values, so its minimum lies on this grid.
pub fn default_levels(f: &StepFunction) -> Vec<Rational> {
    let mut levels: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(f.pieces().iter().map(|p| p.value.clone()))
        .filter(|c| !c.is_negative())
        .collect();
    levels.sort();
    levels.dedup();
    levels
}

/// Worst small-set modulus over `family` against the best truncation bound
/// built from the common source `source`. When every member is `S source` for
/// some semi-doubly stochastic `S`, the report is within bound.
pub fn equi_modulus(
    family: &[StepFunction],
    source: &StepFunction,
    levels: &[Rational],
    delta: &Rational,
) -> Result<EquiIntegrabilityReport> {
    if family.is_empty() || levels.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut modulus: Option<Rational> = None;
    for h in family {
        let m = small_set_modulus(h, delta)?;
        if modulus.as_ref().is_none_or(|best| &m > best) {
            modulus = Some(m);
        }
    }
    let mut best: Option<(Rational, Rational)> = None;
    for c in levels {
        if c.is_negative() {
            return Err(Error::InvalidFamilyParameter(format!("truncation level {c} < 0")));
        }
        let b = truncation_bound(source, c, delta)?;
        if best.as_ref().is_none_or(|(bb, _)| &b < bb) {
            best = Some((b, c.clone()));
        }
    }
    let (bound, best_level) = best.expect("levels are nonempty");
    Ok(EquiIntegrabilityReport {
        delta: delta.clone(),
        modulus: modulus.expect("family is nonempty"),
        bound,
        best_level,
        family_size: family.len(),
    })
}

/// `∫|f↓ − g↓| dm`: the L¹ distance once both functions are laid out in
/// decreasing order on the common refinement of their level sets.
pub fn l1_distance(f: &StepFunction, g: &StepFunction) -> Result<Rational> {
    if f.total_measure() != g.total_measure() {
        return Err(Error::MeasureMismatch(
            f.total_measure().to_string(),
            g.total_measure().to_string(),
        ));
    }
    let mut cuts: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(f.mass_breakpoints())
        .chain(g.mass_breakpoints())
        .collect();
    cuts.sort();
    cuts.dedup();
    Ok(cuts
        .windows(2)
        .map(|w| (f.rearrangement_at(&w[0]) - g.rearrangement_at(&w[0])).abs() * (&w[1] - &w[0]))
        .sum())
}
