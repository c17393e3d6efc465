//! Piecewise-constant integral kernels `K(x, y) = K_{nj}` for `x ∈ A_n`, `y ∈ B_j`.

use num::Signed;

use crate::error::{Error, Result};
use crate::operators::matrix::{OperatorClass, OperatorMatrix};
use crate::operators::partition::{AlignedFunction, Partition};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepKernel {
    row_partition: Partition,
    col_partition: Partition,
    values: OperatorMatrix,
}

impl StepKernel {
    pub fn new(row_partition: Partition, col_partition: Partition, values: OperatorMatrix) -> Result<Self> {
        if values.rows() != row_partition.len() {
            return Err(Error::DimensionMismatch {
                expected: row_partition.len(),
                got: values.rows(),
            });
        }
        if values.cols() != col_partition.len() {
            return Err(Error::DimensionMismatch {
                expected: col_partition.len(),
                got: values.cols(),
            });
        }
        Ok(StepKernel {
            row_partition,
            col_partition,
            values,
        })
    }

    pub fn row_partition(&self) -> &Partition {
        &self.row_partition
    }

    pub fn col_partition(&self) -> &Partition {
        &self.col_partition
    }

    pub fn values(&self) -> &OperatorMatrix {
        &self.values
    }

    /// `∫_X K(x, y) dμ(x)` for `y ∈ B_j`, one entry per column atom.
    pub fn column_integrals(&self) -> Vec<Rational> {
        (0..self.values.cols())
            .map(|j| {
                (0..self.values.rows())
                    .map(|n| self.values.entry(n, j) * &self.row_partition.atoms()[n])
                    .sum()
            })
            .collect()
    }

    /// `∫_Y K(x, y) dν(y)` for `x ∈ A_n`, one entry per row atom.
    pub fn row_integrals(&self) -> Vec<Rational> {
        (0..self.values.rows())
            .map(|n| {
                self.values
                    .row(n)
                    .iter()
                    .zip(self.col_partition.atoms())
                    .map(|(k, m)| k * m)
                    .sum()
            })
            .collect()
    }

    pub fn classify(&self) -> OperatorClass {
        OperatorClass::from_functionals(&self.column_integrals(), &self.row_integrals())
    }

    /// `(A g)(x) = ∫_Y K(x, y) g(y) dν(y)`.
    pub fn apply(&self, g: &AlignedFunction) -> Result<AlignedFunction> {
        let g = g.on(&self.col_partition)?;
        let weighted: Vec<Rational> = g
            .values()
            .iter()
            .zip(self.col_partition.atoms())
            .map(|(v, m)| v * m)
            .collect();
        AlignedFunction::new(self.row_partition.clone(), self.values.apply(&weighted)?)
    }
}

/// Kernel of `Ψ_P D Φ_P`: `K_{nj} = d_{nj} / μ(A_n)`. On infinite spaces the
/// kernel covers the atoms `D` names; the remaining tail atoms are carried
/// onto one another as in [`crate::operators::lift`].
pub fn matrix_to_kernel(partition: &Partition, d: &OperatorMatrix) -> Result<StepKernel> {
    let class = d.classify();
    if !class.is_markov() {
        return Err(Error::NotStochastic {
            required: OperatorClass::Markov.name(),
            found: class.name(),
        });
    }
    let (rows, cols) = partition.for_matrix(d.rows(), d.cols())?;
    let mut values = OperatorMatrix::zeros(d.rows(), d.cols());
    for n in 0..d.rows() {
        for j in 0..d.cols() {
            *values.entry_mut(n, j) = d.entry(n, j) / &rows.atoms()[n];
        }
    }
    debug_assert!(values.entries().iter().all(|v| !v.is_negative()));
    StepKernel::new(rows, cols, values)
}
