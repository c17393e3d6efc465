use std::fmt;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Most specific class in the chain `DS ⊂ SDS ⊂ Markov`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorClass {
    None,
    Markov,
    SemiDoublyStochastic,
    DoublyStochastic,
}

impl OperatorClass {
    pub fn name(self) -> &'static str {
        match self {
            OperatorClass::None => "none",
            OperatorClass::Markov => "markov",
            OperatorClass::SemiDoublyStochastic => "semi-doubly-stochastic",
            OperatorClass::DoublyStochastic => "doubly-stochastic",
        }
    }

    pub fn is_markov(self) -> bool {
        self >= OperatorClass::Markov
    }

    pub fn is_semi_doubly_stochastic(self) -> bool {
        self >= OperatorClass::SemiDoublyStochastic
    }

    /// Classification from column and row functionals: every column functional
    /// must equal 1 for Markov; rows `≤ 1` add SDS; rows `= 1` make it DS.
    pub(crate) fn from_functionals(columns: &[Rational], rows: &[Rational]) -> OperatorClass {
        let one = Rational::one();
        if !columns.iter().all(|c| c == &one) {
            return OperatorClass::None;
        }
        if rows.iter().all(|r| r == &one) {
            OperatorClass::DoublyStochastic
        } else if rows.iter().all(|r| r <= &one) {
            OperatorClass::SemiDoublyStochastic
        } else {
            OperatorClass::Markov
        }
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Nonnegative rational matrix of an ℓ¹ operator, truncated to finitely many
/// coordinates. Column `j` holds the image of the basis vector `e_j`, so
/// `entry(i, j) = ⟨D e_j, e_i⟩`. Rectangular shapes are allowed so that
/// mass-preserving truncations of shifts can be written down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl OperatorMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for (k, e) in entries.iter().enumerate() {
            if e.is_negative() {
                return Err(Error::NegativeEntry {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                    value: e.to_string(),
                });
            }
        }
        Ok(OperatorMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            entries.extend(row);
        }
        Self::new(r, c, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        OperatorMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub(crate) fn entry_mut(&mut self, row: usize, col: usize) -> &mut Rational {
        &mut self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.entry(i, j)).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Markov iff every column sums to 1; SDS iff also every row sums to at
    /// most 1; DS iff every row sums to exactly 1.
    pub fn classify(&self) -> OperatorClass {
        OperatorClass::from_functionals(&self.column_sums(), &self.row_sums())
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self · rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.entry(k, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> OperatorMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.entry_mut(j, i) = self.entry(i, j).clone();
            }
        }
        out
    }
}

/// `‖v‖₁`.
pub fn l1_norm(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).sum()
}
