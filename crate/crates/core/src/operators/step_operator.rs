//! Operators between spaces of functions aligned to partitions, and the two
//! lifts between sequence operators and step-function operators.

use num::Zero;

use crate::error::{Error, Result};
use crate::operators::matrix::{OperatorClass, OperatorMatrix};
use crate::operators::partition::{AlignedFunction, Partition};
use crate::rational::Rational;

/// A positive operator from functions aligned to `source` to functions
/// aligned to `target`, written in the value basis: the value of the image on
/// target atom `n` is `Σ_j values[n][j] · f_j`.
///
/// On infinite spaces only the explicit atoms are stored. Aligned functions
/// vanish on the tail atoms, and the operator carries the tail region beyond
/// the source's explicit atoms onto the tail region beyond the target's by a
/// doubly stochastic map, so the explicit block alone determines the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOperator {
    source: Partition,
    target: Partition,
    values: OperatorMatrix,
}

impl StepOperator {
    pub fn new(source: Partition, target: Partition, values: OperatorMatrix) -> Result<Self> {
        if values.rows() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: target.len(),
                got: values.rows(),
            });
        }
        if values.cols() != source.len() {
            return Err(Error::DimensionMismatch {
                expected: source.len(),
                got: values.cols(),
            });
        }
        if source.total_measure() != target.total_measure() {
            return Err(Error::MeasureMismatch(
                source.total_measure().to_string(),
                target.total_measure().to_string(),
            ));
        }
        Ok(StepOperator { source, target, values })
    }

    pub fn source(&self) -> &Partition {
        &self.source
    }

    pub fn target(&self) -> &Partition {
        &self.target
    }

    /// Value-basis matrix.
    pub fn values(&self) -> &OperatorMatrix {
        &self.values
    }

    pub fn apply(&self, f: &AlignedFunction) -> Result<AlignedFunction> {
        let f = f.on(&self.source)?;
        let image = self.values.apply(f.values())?;
        AlignedFunction::new(self.target.clone(), image)
    }

    /// Integral-preservation functional of column `j`:
    /// `∫ S(χ_{B_j}) dμ / μ(B_j) = Σ_n M_{nj} μ(A_n) / μ(B_j)`.
    pub fn column_functionals(&self) -> Vec<Rational> {
        (0..self.values.cols())
            .map(|j| {
                let s: Rational = (0..self.values.rows())
                    .map(|n| self.values.entry(n, j) * &self.target.atoms()[n])
                    .sum();
                s / &self.source.atoms()[j]
            })
            .collect()
    }

    /// Row functional `S(1)` on atom `n`: `Σ_j M_{nj}`. Bounded by 1 exactly
    /// when `∫ S*χ_E dμ ≤ μ(E)` for every finite-measure `E`.
    pub fn row_functionals(&self) -> Vec<Rational> {
        self.values.row_sums()
    }

    pub fn classify(&self) -> OperatorClass {
        OperatorClass::from_functionals(&self.column_functionals(), &self.row_functionals())
    }

    /// `Φ_target S Ψ_source`: the same operator acting on sequences of atom
    /// integrals, `d_{nj} = M_{nj} μ(A_n) / μ(B_j)`.
    pub fn integral_matrix(&self) -> OperatorMatrix {
        let mut out = OperatorMatrix::zeros(self.values.rows(), self.values.cols());
        for n in 0..self.values.rows() {
            for j in 0..self.values.cols() {
                let v = self.values.entry(n, j);
                if !v.is_zero() {
                    *out.entry_mut(n, j) = v * &self.target.atoms()[n] / &self.source.atoms()[j];
                }
            }
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &StepOperator) -> Result<StepOperator> {
        if rhs.target != self.source {
            return Err(Error::PartitionMisaligned(
                "composition needs matching intermediate partitions".into(),
            ));
        }
        StepOperator::new(
            rhs.source.clone(),
            self.target.clone(),
            self.values.compose(&rhs.values)?,
        )
    }
}

fn require_class(found: OperatorClass, required: OperatorClass) -> Result<()> {
    if found < required {
        return Err(Error::NotStochastic {
            required: required.name(),
            found: found.name(),
        });
    }
    Ok(())
}

fn require_positive_infimum(partition: &Partition) -> Result<()> {
    match partition.min_mass() {
        Some(m) if !m.is_zero() => Ok(()),
        Some(_) => Err(Error::TailMassInfimumZero),
        None => Ok(()),
    }
}

/// `Ψ_P D Φ_P` for any Markov matrix `D`, without the semi-doubly stochastic
/// requirement of [`lift`]. In the value basis `M_{nj} = d_{nj} μ(B_j) / μ(A_n)`.
pub fn lift_markov(partition: &Partition, d: &OperatorMatrix) -> Result<StepOperator> {
    require_class(d.classify(), OperatorClass::Markov)?;
    require_positive_infimum(partition)?;
    let (target, source) = partition.for_matrix(d.rows(), d.cols())?;
    let mut values = OperatorMatrix::zeros(d.rows(), d.cols());
    for n in 0..d.rows() {
        for j in 0..d.cols() {
            let e = d.entry(n, j);
            if !e.is_zero() {
                *values.entry_mut(n, j) = e * &source.atoms()[j] / &target.atoms()[n];
            }
        }
    }
    StepOperator::new(source, target, values)
}

/// `G_D = Ψ_P D Φ_P` for a semi-doubly stochastic sequence operator `D`.
/// Square `D` acts on the explicit atoms of `P`; on infinite partitions an
/// `m × n` truncation maps the first `n` atoms into the first `m`. On equal
/// masses the value-basis matrix is `D` itself.
pub fn lift(partition: &Partition, d: &OperatorMatrix) -> Result<StepOperator> {
    require_class(d.classify(), OperatorClass::SemiDoublyStochastic)?;
    lift_markov(partition, d)
}

/// `Φ_P S Ψ_P` for an SDS operator on functions aligned to an equal-mass `P`.
pub fn restrict(partition: &Partition, op: &StepOperator) -> Result<OperatorMatrix> {
    require_positive_infimum(partition)?;
    if !partition.is_equal_mass() {
        return Err(Error::UnequalMassesUnsupported);
    }
    if !op.source().extends(partition) || !op.target().extends(partition) {
        return Err(Error::PartitionMisaligned(
            "operator does not act on the given partition".into(),
        ));
    }
    require_class(op.classify(), OperatorClass::SemiDoublyStochastic)?;
    Ok(op.integral_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn swap() -> OperatorMatrix {
        OperatorMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap()
    }

    #[test]
    fn lift_identity_on_equal_masses() {
        let p = Partition::equal_mass(int(1), 3, false).unwrap();
        let g = lift(&p, &OperatorMatrix::identity(3)).unwrap();
        assert_eq!(g.values(), &OperatorMatrix::identity(3));
        assert_eq!(g.classify(), OperatorClass::DoublyStochastic);
    }

    #[test]
    fn lift_on_unequal_masses() {
        let p = Partition::finite(vec![int(1), int(2)]).unwrap();
        let g = lift(&p, &swap()).unwrap();
        let expected = OperatorMatrix::from_rows(vec![vec![int(0), int(2)], vec![ratio(1, 2), int(0)]]).unwrap();
        assert_eq!(g.values(), &expected);
        assert_eq!(g.column_functionals(), vec![int(1), int(1)]);
        assert!(g.classify().is_markov());
        // The constant 1 maps to (2, 1/2): rows exceed 1, so the lift is only Markov.
        assert_eq!(g.classify(), OperatorClass::Markov);
        assert_eq!(g.integral_matrix(), swap());
    }

    #[test]
    fn lift_rejects_markov_only_and_bad_dimensions() {
        let p = Partition::equal_mass(int(1), 2, false).unwrap();
        let collapse = OperatorMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(0)]]).unwrap();
        assert!(matches!(lift(&p, &collapse), Err(Error::NotStochastic { .. })));
        assert!(matches!(
            lift(&p, &OperatorMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn restrict_inverts_lift_on_equal_masses() {
        let p = Partition::equal_mass(ratio(1, 3), 2, true).unwrap();
        let d = OperatorMatrix::from_rows(vec![vec![ratio(1, 3), ratio(2, 3)], vec![ratio(2, 3), ratio(1, 3)]]).unwrap();
        assert_eq!(restrict(&p, &lift(&p, &d).unwrap()).unwrap(), d);
        let id = lift(&p, &OperatorMatrix::identity(2)).unwrap();
        assert_eq!(restrict(&p, &id).unwrap(), OperatorMatrix::identity(2));
    }

    #[test]
    fn restrict_refuses_unequal_masses() {
        let p = Partition::finite(vec![int(1), int(2)]).unwrap();
        let g = lift(&p, &OperatorMatrix::identity(2)).unwrap();
        assert_eq!(restrict(&p, &g), Err(Error::UnequalMassesUnsupported));
    }

    #[test]
    fn rectangular_shift_lifts_to_a_semi_doubly_stochastic_operator() {
        let p = Partition::equal_mass(int(1), 0, true).unwrap();
        let mut shift = OperatorMatrix::zeros(4, 3);
        for j in 0..3 {
            *shift.entry_mut(j + 1, j) = int(1);
        }
        let g = lift(&p, &shift).unwrap();
        assert_eq!(g.source().len(), 3);
        assert_eq!(g.target().len(), 4);
        assert_eq!(g.classify(), OperatorClass::SemiDoublyStochastic);
        assert_eq!(restrict(&p, &g).unwrap(), shift);
        let f = AlignedFunction::new(g.source().clone(), vec![int(5), int(2), int(1)]).unwrap();
        assert_eq!(g.apply(&f).unwrap().values(), &[int(0), int(5), int(2), int(1)]);
    }

    #[test]
    fn markov_lift_of_the_collapse() {
        let p = Partition::equal_mass(int(1), 3, true).unwrap();
        let mut collapse = OperatorMatrix::zeros(3, 3);
        for j in 0..3 {
            *collapse.entry_mut(0, j) = int(1);
        }
        assert!(matches!(lift(&p, &collapse), Err(Error::NotStochastic { .. })));
        let g = lift_markov(&p, &collapse).unwrap();
        assert_eq!(g.classify(), OperatorClass::Markov);
    }

    #[test]
    fn apply_pads_tail_atoms() {
        let p = Partition::equal_mass(int(1), 1, true).unwrap();
        let wide = p.materialize(2).unwrap();
        let d = OperatorMatrix::from_rows(vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]]).unwrap();
        let g = lift(&wide, &d).unwrap();
        let f = AlignedFunction::new(p, vec![int(2)]).unwrap();
        assert_eq!(g.apply(&f).unwrap().values(), &[int(1), int(1)]);
    }
}
