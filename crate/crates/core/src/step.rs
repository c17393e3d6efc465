//! Step functions on σ-finite measure spaces.
//!
//! Only the measures of level sets matter for majorization, so a function is
//! stored as its list of `(value, mass)` level sets. On a space of infinite
//! measure the function is nonnegative and vanishes outside finitely many
//! level sets of finite mass; that zero region is implicit and never stored.
//!
//! The canonical order of the pieces is strictly decreasing in value, which
//! means the stored pieces already describe the decreasing rearrangement laid
//! out on `[0, μ(X))` with half-open constancy intervals.

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{serialize_rational, ExtendedReal, Rational};

/// A level set: `mass` is the measure of `{x : f(x) = value}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Piece {
    #[serde(serialize_with = "serialize_rational")]
    pub value: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub mass: Rational,
}

impl Piece {
    pub fn new(value: Rational, mass: Rational) -> Self {
        Piece { value, mass }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    pieces: Vec<Piece>,
    total: ExtendedReal,
}

impl StepFunction {
    /// Validates and normalizes raw level sets: sorts by decreasing value,
    /// merges equal values and, on infinite spaces, absorbs zero-valued pieces
    /// into the implicit tail.
    pub fn canonicalize<I>(raw: I, total: ExtendedReal) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut pieces: Vec<Piece> = Vec::new();
        for (value, mass) in raw {
            if !mass.is_positive() {
                return Err(Error::NegativeMass(mass.to_string()));
            }
            if !total.is_finite() && value.is_negative() {
                return Err(Error::NegativeValueOnInfiniteSpace(value.to_string()));
            }
            pieces.push(Piece::new(value, mass));
        }
        if let ExtendedReal::Finite(t) = &total {
            if t.is_negative() {
                return Err(Error::NegativeMass(t.to_string()));
            }
        }

        pieces.sort_by(|a, b| b.value.cmp(&a.value));
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.value == p.value => last.mass += p.mass,
                _ => merged.push(p),
            }
        }
        if !total.is_finite() {
            merged.retain(|p| !p.value.is_zero());
        }

        let sum: Rational = merged.iter().map(|p| &p.mass).sum();
        if let ExtendedReal::Finite(t) = &total {
            if &sum > t {
                return Err(Error::MassExceedsTotal {
                    sum: sum.to_string(),
                    total: t.to_string(),
                });
            }
            if &sum < t {
                return Err(Error::MassShortOfTotal {
                    sum: sum.to_string(),
                    total: t.to_string(),
                });
            }
        }
        Ok(StepFunction {
            pieces: merged,
            total,
        })
    }

    /// The zero function. On a finite space it is one piece covering `X`.
    pub fn zero(total: ExtendedReal) -> Self {
        let pieces = match &total {
            ExtendedReal::Finite(t) if t.is_positive() => vec![Piece::new(Rational::zero(), t.clone())],
            _ => Vec::new(),
        };
        StepFunction { pieces, total }
    }

    /// `value · χ_E` with `μ(E) = mass` on a space of infinite measure.
    pub fn indicator(value: Rational, mass: Rational) -> Result<Self> {
        Self::canonicalize([(value, mass)], ExtendedReal::Infinite)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_measure(&self) -> &ExtendedReal {
        &self.total
    }

    pub fn raw_pieces(&self) -> Vec<(Rational, Rational)> {
        self.pieces
            .iter()
            .map(|p| (p.value.clone(), p.mass.clone()))
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().all(|p| !p.value.is_negative())
    }

    /// `μ{f ≠ 0}`.
    pub fn support_measure(&self) -> Rational {
        self.pieces
            .iter()
            .filter(|p| !p.value.is_zero())
            .map(|p| &p.mass)
            .sum()
    }

    /// Sum of the stored masses; equals `μ(X)` on finite spaces.
    pub fn stored_measure(&self) -> Rational {
        self.pieces.iter().map(|p| &p.mass).sum()
    }

    pub fn integral(&self) -> Rational {
        self.pieces.iter().map(|p| &p.value * &p.mass).sum()
    }

    /// `d_f(t) = μ{x : f(x) > t}`.
    pub fn distribution(&self, t: &Rational) -> ExtendedReal {
        if !self.total.is_finite() && t.is_negative() {
            return ExtendedReal::Infinite;
        }
        let mass: Rational = self
            .pieces
            .iter()
            .take_while(|p| &p.value > t)
            .map(|p| &p.mass)
            .sum();
        ExtendedReal::Finite(mass)
    }

    /// The decreasing rearrangement `f↓` on `[0, μ(X))`. Canonical pieces are
    /// already in decreasing order, so this is a copy of the level sets.
    pub fn rearrangement(&self) -> StepFunction {
        self.clone()
    }

    /// `f↓(s)` for `0 ≤ s < μ(X)`, right-continuous.
    pub fn rearrangement_at(&self, s: &Rational) -> Rational {
        let mut end = Rational::zero();
        for p in &self.pieces {
            end += &p.mass;
            if s < &end {
                return p.value.clone();
            }
        }
        Rational::zero()
    }

    /// Right endpoints of the constancy intervals of `f↓`, i.e. the points
    /// where `s ↦ ∫_0^s f↓` may change slope.
    pub fn mass_breakpoints(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.pieces
            .iter()
            .map(|p| {
                acc += &p.mass;
                acc.clone()
            })
            .collect()
    }

    /// Distinct values taken by `f`, including the implicit zero tail.
    pub fn value_breakpoints(&self) -> Vec<Rational> {
        let mut values: Vec<Rational> = self.pieces.iter().map(|p| p.value.clone()).collect();
        if !self.total.is_finite() {
            values.push(Rational::zero());
        }
        values.sort();
        values.dedup();
        values
    }

    fn check_s(&self, s: &ExtendedReal) -> Result<()> {
        let out_of_range = match s {
            ExtendedReal::Finite(v) => v.is_negative() || s > &self.total,
            ExtendedReal::Infinite => self.total.is_finite(),
        };
        if out_of_range {
            return Err(Error::SOutOfRange {
                s: s.to_string(),
                total: self.total.to_string(),
            });
        }
        Ok(())
    }

    /// `∫_0^s f↓ dm` for `0 ≤ s ≤ μ(X)`.
    pub fn partial_integral(&self, s: &ExtendedReal) -> Result<Rational> {
        self.check_s(s)?;
        let s = match s {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinite => return Ok(self.integral()),
        };
        let mut acc = Rational::zero();
        let mut remaining = s.clone();
        for p in &self.pieces {
            if !remaining.is_positive() {
                break;
            }
            let take = if p.mass < remaining { p.mass.clone() } else { remaining.clone() };
            acc += &p.value * &take;
            remaining -= take;
        }
        Ok(acc)
    }

    /// Convenience form of [`partial_integral`](Self::partial_integral) for finite `s`.
    pub fn partial_integral_at(&self, s: &Rational) -> Result<Rational> {
        self.partial_integral(&ExtendedReal::Finite(s.clone()))
    }

    /// `∫_X (f − u)⁺ dμ`.
    pub fn hinge_integral(&self, u: &Rational) -> Result<Rational> {
        if !self.total.is_finite() && u.is_negative() {
            return Err(Error::DivergentHinge(u.to_string()));
        }
        Ok(self
            .pieces
            .iter()
            .filter(|p| &p.value > u)
            .map(|p| (&p.value - u) * &p.mass)
            .sum())
    }

    /// `∫_u^∞ d_f(t) dt`, summed interval by interval over the constancy
    /// intervals of `d_f`. Independent of [`hinge_integral`](Self::hinge_integral);
    /// the two agree by the layer-cake identity.
    pub fn tail_integral(&self, u: &Rational) -> Result<Rational> {
        if !self.total.is_finite() && u.is_negative() {
            return Err(Error::DivergentHinge(u.to_string()));
        }
        let values = self.value_breakpoints();
        let mut acc = Rational::zero();
        // Below the smallest value d_f = μ(X) (finite here because any
        // infinite-space tail contributes the breakpoint 0 ≤ u).
        if let Some(lowest) = values.first() {
            if u < lowest {
                let total = self
                    .total
                    .finite()
                    .expect("u below the zero tail is rejected above");
                acc += total * (lowest - u);
            }
        }
        for window in values.windows(2) {
            let (lo, hi) = (&window[0], &window[1]);
            if hi <= u {
                continue;
            }
            let start = if lo > u { lo } else { u };
            let level = match self.distribution(lo) {
                ExtendedReal::Finite(m) => m,
                ExtendedReal::Infinite => unreachable!("lo >= 0 on infinite spaces"),
            };
            acc += level * (hi - start);
        }
        Ok(acc)
    }

    /// Essential supremum: the largest value, counting the zero tail.
    pub fn ess_sup(&self) -> Rational {
        let top = self.pieces.first().map(|p| p.value.clone());
        match (top, self.total.is_finite()) {
            (Some(v), true) => v,
            (Some(v), false) if v.is_positive() => v,
            _ => Rational::zero(),
        }
    }

    /// `c · f` for `c ≥ 0` (any `c` on finite spaces).
    pub fn scale(&self, c: &Rational) -> Result<StepFunction> {
        StepFunction::canonicalize(
            self.pieces.iter().map(|p| (&p.value * c, p.mass.clone())),
            self.total.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    pub(crate) fn example_f() -> StepFunction {
        StepFunction::canonicalize([(int(3), int(1)), (ratio(1, 2), int(1))], ExtendedReal::Infinite).unwrap()
    }

    pub(crate) fn example_g() -> StepFunction {
        StepFunction::canonicalize([(int(2), int(2))], ExtendedReal::Infinite).unwrap()
    }

    fn fin(n: i64) -> ExtendedReal {
        ExtendedReal::Finite(int(n))
    }

    #[test]
    fn canonicalize_merges_equal_values() {
        let f = StepFunction::canonicalize([(int(2), int(1)), (int(2), int(1))], fin(2)).unwrap();
        assert_eq!(f.raw_pieces(), vec![(int(2), int(2))]);
        assert_eq!(f.total_measure(), &fin(2));
    }

    #[test]
    fn canonicalize_absorbs_zero_into_infinite_tail() {
        let f = StepFunction::canonicalize([(int(0), int(5)), (int(3), int(1))], ExtendedReal::Infinite).unwrap();
        assert_eq!(f.raw_pieces(), vec![(int(3), int(1))]);
    }

    #[test]
    fn canonicalize_rejects_bad_inputs() {
        let e = StepFunction::canonicalize([(int(1), int(1)), (int(-1), int(1))], ExtendedReal::Infinite);
        assert!(matches!(e, Err(Error::NegativeValueOnInfiniteSpace(_))));
        let e = StepFunction::canonicalize([(int(1), int(0))], fin(1));
        assert!(matches!(e, Err(Error::NegativeMass(_))));
        let e = StepFunction::canonicalize([(int(1), int(3))], fin(2));
        assert!(matches!(e, Err(Error::MassExceedsTotal { .. })));
        let e = StepFunction::canonicalize([(int(1), int(1))], fin(2));
        assert!(matches!(e, Err(Error::MassShortOfTotal { .. })));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let f = StepFunction::canonicalize(
            [(int(1), int(2)), (int(5), int(1)), (int(-2), ratio(1, 3)), (int(5), ratio(2, 3))],
            ExtendedReal::Finite(Rational::from_integer(4.into())),
        )
        .unwrap();
        let again = StepFunction::canonicalize(f.raw_pieces(), f.total_measure().clone()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn integrals_of_the_incomparable_pair() {
        assert_eq!(example_f().integral(), ratio(7, 2));
        assert_eq!(example_g().integral(), int(4));
        assert_eq!(StepFunction::zero(ExtendedReal::Infinite).integral(), int(0));
        assert_eq!(StepFunction::zero(fin(3)).integral(), int(0));
    }

    #[test]
    fn distribution_values() {
        assert_eq!(example_f().distribution(&int(1)), fin(1));
        assert_eq!(example_g().distribution(&int(2)), fin(0));
        assert_eq!(example_f().distribution(&int(-1)), ExtendedReal::Infinite);
        assert_eq!(example_f().distribution(&int(0)), fin(2));
    }

    #[test]
    fn rearrangement_sorts_and_is_equimeasurable() {
        let f = StepFunction::canonicalize([(int(1), int(2)), (int(5), int(1))], fin(3)).unwrap();
        let r = f.rearrangement();
        assert_eq!(r.raw_pieces(), vec![(int(5), int(1)), (int(1), int(2))]);
        assert_eq!(r.rearrangement(), r);
        let pf = example_f().rearrangement();
        assert_eq!(pf.raw_pieces(), vec![(int(3), int(1)), (ratio(1, 2), int(1))]);
        for k in 0..=16 {
            let t = ratio(k, 4);
            assert_eq!(pf.distribution(&t), example_f().distribution(&t));
        }
        assert_eq!(pf.rearrangement_at(&ratio(1, 2)), int(3));
        assert_eq!(pf.rearrangement_at(&int(1)), ratio(1, 2));
        assert_eq!(pf.rearrangement_at(&int(7)), int(0));
    }

    #[test]
    fn partial_integral_values() {
        assert_eq!(example_g().partial_integral_at(&int(1)).unwrap(), int(2));
        assert_eq!(example_f().partial_integral_at(&int(0)).unwrap(), int(0));
        assert_eq!(example_f().partial_integral(&ExtendedReal::Infinite).unwrap(), ratio(7, 2));
        assert_eq!(example_f().partial_integral_at(&int(50)).unwrap(), ratio(7, 2));
        let f = StepFunction::canonicalize([(int(1), int(2))], fin(2)).unwrap();
        assert!(matches!(f.partial_integral_at(&int(3)), Err(Error::SOutOfRange { .. })));
        assert!(matches!(f.partial_integral_at(&int(-1)), Err(Error::SOutOfRange { .. })));
        assert!(matches!(f.partial_integral(&ExtendedReal::Infinite), Err(Error::SOutOfRange { .. })));
    }

    #[test]
    fn hinge_values() {
        assert_eq!(example_f().hinge_integral(&int(1)).unwrap(), int(2));
        assert_eq!(example_g().hinge_integral(&int(1)).unwrap(), int(2));
        assert_eq!(example_f().hinge_integral(&int(3)).unwrap(), int(0));
        assert_eq!(example_f().hinge_integral(&int(10)).unwrap(), int(0));
        assert!(matches!(example_f().hinge_integral(&int(-1)), Err(Error::DivergentHinge(_))));
    }

    #[test]
    fn tail_integral_matches_hinge_on_a_signed_finite_function() {
        let f = StepFunction::canonicalize(
            [(int(4), int(1)), (int(-1), int(2)), (int(0), ratio(1, 2))],
            ExtendedReal::Finite(ratio(7, 2)),
        )
        .unwrap();
        for k in -12..=20 {
            let u = ratio(k, 3);
            assert_eq!(f.tail_integral(&u).unwrap(), f.hinge_integral(&u).unwrap(), "u = {u}");
        }
    }

    #[test]
    fn ess_sup_values() {
        assert_eq!(example_f().ess_sup(), int(3));
        assert_eq!(StepFunction::zero(ExtendedReal::Infinite).ess_sup(), int(0));
        let c = StepFunction::canonicalize([(ratio(5, 3), int(4))], fin(4)).unwrap();
        assert_eq!(c.ess_sup(), ratio(5, 3));
    }
}
