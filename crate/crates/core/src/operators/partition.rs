//! Countable partitions into atoms of finite positive measure, functions that
//! are constant on atoms, and the maps between step functions and sequences.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::operators::matrix::OperatorMatrix;
use crate::operators::step_operator::StepOperator;
use crate::rational::{rational_gcd, ExtendedReal, Rational};
use crate::step::StepFunction;

/// An ordered family of disjoint atoms tiling the space.
///
/// The atoms are listed explicitly; a space of infinite measure additionally
/// carries an unbounded run of tail atoms, all of mass `tail`, tiling the
/// region beyond the explicit atoms. Atoms are laid out consecutively from 0,
/// which is the geometry used whenever two partitions have to be compared.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    atoms: Vec<Rational>,
    tail: Option<Rational>,
}

impl Partition {
    pub fn finite(atoms: Vec<Rational>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn with_tail(atoms: Vec<Rational>, tail_mass: Rational) -> Result<Self> {
        Self::new(atoms, Some(tail_mass))
    }

    pub fn new(atoms: Vec<Rational>, tail: Option<Rational>) -> Result<Self> {
        if let Some(m) = atoms.iter().find(|m| !m.is_positive()) {
            return Err(Error::NegativeMass(m.to_string()));
        }
        if let Some(t) = &tail {
            if !t.is_positive() {
                return Err(Error::TailMassInfimumZero);
            }
        }
        Ok(Partition { atoms, tail })
    }

    /// `count` atoms of mass `mass`, optionally followed by an unbounded tail
    /// of atoms of the same mass.
    pub fn equal_mass(mass: Rational, count: usize, unbounded_tail: bool) -> Result<Self> {
        let tail = unbounded_tail.then(|| mass.clone());
        Self::new(vec![mass; count], tail)
    }

    pub fn atoms(&self) -> &[Rational] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tail_mass(&self) -> Option<&Rational> {
        self.tail.as_ref()
    }

    /// Measure covered by the explicit atoms.
    pub fn explicit_measure(&self) -> Rational {
        self.atoms.iter().sum()
    }

    pub fn total_measure(&self) -> ExtendedReal {
        match self.tail {
            Some(_) => ExtendedReal::Infinite,
            None => ExtendedReal::Finite(self.explicit_measure()),
        }
    }

    /// `inf μ(A_n)` over explicit and tail atoms.
    pub fn min_mass(&self) -> Option<Rational> {
        self.atoms.iter().chain(self.tail.iter()).min().cloned()
    }

    pub fn is_equal_mass(&self) -> bool {
        let mut all = self.atoms.iter().chain(self.tail.iter());
        match all.next() {
            Some(first) => all.all(|m| m == first),
            None => true,
        }
    }

    /// Mass of atom `index`, counting tail atoms after the explicit ones.
    pub fn mass(&self, index: usize) -> Option<&Rational> {
        self.atoms.get(index).or(self.tail.as_ref())
    }

    /// Same partition with tail atoms listed explicitly until there are at
    /// least `count` explicit atoms.
    pub fn materialize(&self, count: usize) -> Result<Partition> {
        if count <= self.atoms.len() {
            return Ok(self.clone());
        }
        let tail = self.tail.clone().ok_or(Error::DimensionMismatch {
            expected: self.atoms.len(),
            got: count,
        })?;
        let mut atoms = self.atoms.clone();
        atoms.resize(count, tail.clone());
        Ok(Partition {
            atoms,
            tail: Some(tail),
        })
    }

    /// Target and source partitions for an `rows × cols` sequence matrix. A
    /// finite partition needs a square matrix of matching size. On an infinite
    /// partition a rectangular truncation is read against the partition with
    /// enough tail atoms listed explicitly; beyond them the `i`-th source tail
    /// atom is carried onto the `i`-th target tail atom.
    pub fn for_matrix(&self, rows: usize, cols: usize) -> Result<(Partition, Partition)> {
        let fits = if self.tail.is_some() {
            rows >= self.len() && cols >= self.len()
        } else {
            rows == cols && rows == self.len()
        };
        if !fits {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: if rows == self.len() { cols } else { rows },
            });
        }
        Ok((self.materialize(rows)?, self.materialize(cols)?))
    }

    /// Whether `self` is `other` with some tail atoms made explicit.
    pub fn extends(&self, other: &Partition) -> bool {
        self.tail == other.tail
            && self.atoms.len() >= other.atoms.len()
            && self.atoms[..other.atoms.len()] == other.atoms[..]
            && self.atoms[other.atoms.len()..]
                .iter()
                .all(|m| Some(m) == other.tail.as_ref())
    }
}

/// A function constant on the atoms of a partition: the alignment metadata
/// that ties a step function to a concrete partition. On infinite spaces the
/// function vanishes on the tail atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlignedFunction {
    partition: Partition,
    values: Vec<Rational>,
}

impl AlignedFunction {
    pub fn new(partition: Partition, values: Vec<Rational>) -> Result<Self> {
        if values.len() != partition.len() {
            return Err(Error::DimensionMismatch {
                expected: partition.len(),
                got: values.len(),
            });
        }
        Ok(AlignedFunction { partition, values })
    }

    /// Lays out `f↓` on `[0, μ(X))` and reads off its value on each atom of
    /// `partition` (atoms also laid out consecutively from 0). Fails when an
    /// atom straddles two level sets or the explicit atoms stop short of the
    /// support of `f`.
    pub fn from_layout(f: &StepFunction, partition: &Partition) -> Result<Self> {
        if f.total_measure() != &partition.total_measure() {
            return Err(Error::MeasureMismatch(
                f.total_measure().to_string(),
                partition.total_measure().to_string(),
            ));
        }
        let pieces = f.pieces();
        let mut values = Vec::with_capacity(partition.len());
        let mut piece = 0;
        let mut left_in_piece = pieces.first().map(|p| p.mass.clone()).unwrap_or_else(Rational::zero);
        for (n, mass) in partition.atoms().iter().enumerate() {
            if piece >= pieces.len() {
                values.push(Rational::zero());
                continue;
            }
            if mass > &left_in_piece {
                return Err(Error::PartitionMisaligned(format!(
                    "atom {n} straddles a level set boundary"
                )));
            }
            values.push(pieces[piece].value.clone());
            left_in_piece -= mass;
            if left_in_piece.is_zero() {
                piece += 1;
                if let Some(p) = pieces.get(piece) {
                    left_in_piece = p.mass.clone();
                }
            }
        }
        if piece < pieces.len() {
            return Err(Error::PartitionMisaligned(
                "explicit atoms do not cover the support".into(),
            ));
        }
        Ok(AlignedFunction {
            partition: partition.clone(),
            values,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn to_step(&self) -> Result<StepFunction> {
        StepFunction::canonicalize(
            self.values
                .iter()
                .cloned()
                .zip(self.partition.atoms().iter().cloned()),
            self.partition.total_measure(),
        )
    }

    pub fn integral(&self) -> Rational {
        self.values
            .iter()
            .zip(self.partition.atoms())
            .map(|(v, m)| v * m)
            .sum()
    }

    /// Re-expresses the function on a partition that only lists more tail
    /// atoms explicitly.
    pub fn on(&self, partition: &Partition) -> Result<AlignedFunction> {
        if partition == &self.partition {
            return Ok(self.clone());
        }
        if !partition.extends(&self.partition) {
            return Err(Error::PartitionMisaligned(
                "function is aligned to a different partition".into(),
            ));
        }
        let mut values = self.values.clone();
        values.resize(partition.len(), Rational::zero());
        Ok(AlignedFunction {
            partition: partition.clone(),
            values,
        })
    }

    /// `∫|f − g| dμ` for two functions on the same partition.
    pub fn l1_distance(&self, other: &AlignedFunction) -> Result<Rational> {
        let n = self.partition.len().max(other.partition.len());
        let wide = self.partition.materialize(n)?;
        let a = self.on(&wide)?;
        let b = other.on(&wide)?;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .zip(wide.atoms())
            .map(|((x, y), m)| (x - y).abs() * m)
            .sum())
    }
}

/// `Φ_P(f) = (∫_{A₁} f, ∫_{A₂} f, …)` for `f` constant on the atoms of `P`.
pub fn phi(partition: &Partition, f: &AlignedFunction) -> Result<Vec<Rational>> {
    let f = f.on(partition)?;
    Ok(f.values
        .iter()
        .zip(partition.atoms())
        .map(|(v, m)| v * m)
        .collect())
}

/// `Ψ_P(a) = Σ a_n / μ(A_n) χ_{A_n}`; shorter sequences are zero-padded.
pub fn psi(partition: &Partition, sequence: &[Rational]) -> Result<AlignedFunction> {
    if sequence.len() > partition.len() {
        return Err(Error::DimensionMismatch {
            expected: partition.len(),
            got: sequence.len(),
        });
    }
    let values = partition
        .atoms()
        .iter()
        .enumerate()
        .map(|(n, m)| sequence.get(n).map_or_else(Rational::zero, |a| a / m))
        .collect();
    AlignedFunction::new(partition.clone(), values)
}

/// Measures `μ(A_n ∩ B_j)` between the atoms `A_n` of a target partition and
/// the atoms `B_j` of a source partition. Only nonzero overlaps are listed.
/// Source indices may point past the explicit source atoms into its tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    entries: Vec<(usize, usize, Rational)>,
}

impl Overlap {
    pub fn new(entries: Vec<(usize, usize, Rational)>) -> Result<Self> {
        if let Some((_, _, m)) = entries.iter().find(|(_, _, m)| !m.is_positive()) {
            return Err(Error::NegativeMass(m.to_string()));
        }
        Ok(Overlap { entries })
    }

    /// Overlaps when both partitions are laid out consecutively from 0.
    ///
    /// On infinite spaces the explicit atoms of `target` must end on an atom
    /// boundary of `source` at or after the source's explicit atoms, so that
    /// both tails tile the same remaining region.
    pub fn intervals(target: &Partition, source: &Partition) -> Result<Overlap> {
        let source = Self::matching_source(target, source)?;
        let mut entries = Vec::new();
        let (mut n, mut j) = (0, 0);
        let (targets, sources) = (target.atoms(), source.atoms());
        let mut t_left = targets.first().cloned().unwrap_or_else(Rational::zero);
        let mut s_left = sources.first().cloned().unwrap_or_else(Rational::zero);
        while n < targets.len() && j < sources.len() {
            let take = if t_left < s_left { t_left.clone() } else { s_left.clone() };
            entries.push((n, j, take.clone()));
            t_left -= &take;
            s_left -= &take;
            if t_left.is_zero() {
                n += 1;
                if let Some(m) = targets.get(n) {
                    t_left = m.clone();
                }
            }
            if s_left.is_zero() {
                j += 1;
                if let Some(m) = sources.get(j) {
                    s_left = m.clone();
                }
            }
        }
        Overlap::new(entries)
    }

    /// The source partition with enough tail atoms made explicit to tile the
    /// target's explicit region exactly.
    fn matching_source(target: &Partition, source: &Partition) -> Result<Partition> {
        if target.total_measure() != source.total_measure() {
            return Err(Error::MeasureMismatch(
                target.total_measure().to_string(),
                source.total_measure().to_string(),
            ));
        }
        let Some(tail) = source.tail_mass() else {
            return Ok(source.clone());
        };
        let goal = target.explicit_measure();
        let mut covered = source.explicit_measure();
        if covered > goal {
            return Err(Error::PartitionMisaligned(
                "target's explicit atoms end inside the source's explicit atoms".into(),
            ));
        }
        let mut count = source.len();
        while covered < goal {
            covered += tail;
            count += 1;
        }
        if covered != goal {
            return Err(Error::PartitionMisaligned(
                "target's explicit atoms end inside a source tail atom".into(),
            ));
        }
        source.materialize(count)
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    /// Checks the overlaps tile both explicit regions exactly and returns the
    /// source partition materialized to cover every referenced index.
    fn validate(&self, target: &Partition, source: &Partition) -> Result<Partition> {
        let width = self
            .entries
            .iter()
            .map(|&(_, j, _)| j + 1)
            .max()
            .unwrap_or(0)
            .max(source.len());
        let source = source.materialize(width)?;
        let mut rows = vec![Rational::zero(); target.len()];
        let mut cols = vec![Rational::zero(); source.len()];
        for (n, j, m) in &self.entries {
            let row = rows.get_mut(*n).ok_or_else(|| {
                Error::PartitionMisaligned(format!("overlap names target atom {n} beyond the partition"))
            })?;
            *row += m;
            cols[*j] += m;
        }
        for (n, (got, mass)) in rows.iter().zip(target.atoms()).enumerate() {
            if got != mass {
                return Err(Error::PartitionMisaligned(format!(
                    "target atom {n} has overlap mass {got}, expected {mass}"
                )));
            }
        }
        for (j, (got, mass)) in cols.iter().zip(source.atoms()).enumerate() {
            if got != mass {
                return Err(Error::PartitionMisaligned(format!(
                    "source atom {j} has overlap mass {got}, expected {mass}"
                )));
            }
        }
        Ok(source)
    }
}

/// The conditional-expectation operator `G_P = Ψ_P Φ_P` written as a map from
/// functions aligned to `source` onto functions aligned to `target`.
pub fn averaging_operator(target: &Partition, source: &Partition, overlap: &Overlap) -> Result<StepOperator> {
    if target.total_measure() != source.total_measure() {
        return Err(Error::MeasureMismatch(
            target.total_measure().to_string(),
            source.total_measure().to_string(),
        ));
    }
    let source = overlap.validate(target, source)?;
    let mut values = OperatorMatrix::zeros(target.len(), source.len());
    for (n, j, m) in overlap.entries() {
        *values.entry_mut(*n, *j) += m / &target.atoms()[*n];
    }
    StepOperator::new(source, target.clone(), values)
}

/// `G_P f`: averages `f` over each atom of `target`, using the supplied
/// overlap masses between `target` and the partition `f` is aligned to.
pub fn partition_average(target: &Partition, f: &AlignedFunction, overlap: &Overlap) -> Result<AlignedFunction> {
    averaging_operator(target, f.partition(), overlap)?.apply(f)
}

/// Common refinement atom for a collection of masses: their rational gcd.
pub fn common_atom_mass<'a, I>(masses: I) -> Option<Rational>
where
    I: IntoIterator<Item = &'a Rational>,
{
    rational_gcd(masses)
}
