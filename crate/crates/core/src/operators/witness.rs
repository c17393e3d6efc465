//! Explicit doubly stochastic witnesses for `f ≺ g` and approximating
//! sequences of stochastic operators.
//!
//! For rational step functions every mass is an integer multiple of the
//! rational gcd `a` of all masses. Cutting both functions into atoms of mass
//! `a` turns `f ≺ g` into majorization of two finite decreasing vectors, for
//! which a chain of at most `N − 1` T-transforms carries `v_g` onto `v_f`.

use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::diagnostics::l1_distance;
use crate::error::{Error, Result};
use crate::majorization::majorize;
use crate::operators::matrix::OperatorMatrix;
use crate::operators::partition::{averaging_operator, common_atom_mass, AlignedFunction, Overlap, Partition};
use crate::operators::step_operator::{lift, StepOperator};
use crate::rational::{int, serialize_rational, ExtendedReal, Rational};
use crate::step::StepFunction;

/// `λ I + (1 − λ) Q` where `Q` swaps coordinates `first < second`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TTransform {
    pub first: usize,
    pub second: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub lambda: Rational,
}

impl TTransform {
    pub fn matrix(&self, n: usize) -> OperatorMatrix {
        let mut m = OperatorMatrix::identity(n);
        let mix = Rational::one() - &self.lambda;
        *m.entry_mut(self.first, self.first) = self.lambda.clone();
        *m.entry_mut(self.second, self.second) = self.lambda.clone();
        *m.entry_mut(self.first, self.second) = mix.clone();
        *m.entry_mut(self.second, self.first) = mix;
        m
    }

    fn apply_rows(&self, m: &mut OperatorMatrix) {
        let mix = Rational::one() - &self.lambda;
        for c in 0..m.cols() {
            let a = m.entry(self.first, c).clone();
            let b = m.entry(self.second, c).clone();
            if a.is_zero() && b.is_zero() {
                continue;
            }
            *m.entry_mut(self.first, c) = &self.lambda * &a + &mix * &b;
            *m.entry_mut(self.second, c) = &mix * &a + &self.lambda * &b;
        }
    }
}

/// T-transforms whose product `D = T_k ⋯ T_1` maps `source` onto `target`.
///
/// Both vectors must have equal sums and `target`'s prefix sums must never
/// exceed `source`'s (true for decreasing vectors with `target ≺ source`).
/// Each step moves `δ = min(x_j − t_j, t_k − x_k)` from the first index `j`
/// with a surplus to the next index `k > j` with a deficit, settling at least
/// one coordinate for good, so at most `N − 1` steps are taken.
pub fn t_transform_chain(source: &[Rational], target: &[Rational]) -> Result<(Vec<TTransform>, OperatorMatrix)> {
    let n = source.len();
    if target.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: target.len() });
    }
    let total_s: Rational = source.iter().sum();
    let total_t: Rational = target.iter().sum();
    if total_s != total_t {
        return Err(Error::NotMajorized);
    }
    let mut x = source.to_vec();
    let mut steps = Vec::new();
    let mut product = OperatorMatrix::identity(n);
    while let Some(j) = (0..n).find(|&i| x[i] > target[i]) {
        let k = (j + 1..n).find(|&i| x[i] < target[i]).ok_or(Error::NotMajorized)?;
        if (0..j).any(|i| x[i] != target[i]) {
            return Err(Error::NotMajorized);
        }
        let surplus = &x[j] - &target[j];
        let deficit = &target[k] - &x[k];
        let delta = if surplus < deficit { surplus } else { deficit };
        let gap = &x[j] - &x[k];
        let step = TTransform {
            first: j,
            second: k,
            lambda: Rational::one() - &delta / gap,
        };
        x[j] -= &delta;
        x[k] += &delta;
        step.apply_rows(&mut product);
        steps.push(step);
    }
    if x != target {
        return Err(Error::NotMajorized);
    }
    Ok((steps, product))
}

/// A doubly stochastic witness `D` with `D v_g = v_f` on a common equal-mass
/// refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessChain {
    pub steps: Vec<TTransform>,
    pub product: OperatorMatrix,
    /// Equal-mass atoms; on infinite spaces followed by a tail of the same mass.
    pub source_partition: Partition,
    /// `g↓` on the atoms.
    pub source_values: Vec<Rational>,
    /// `f↓` on the atoms.
    pub target_values: Vec<Rational>,
}

impl WitnessChain {
    pub fn dimension(&self) -> usize {
        self.source_values.len()
    }

    /// `Ψ_P D Φ_P` acting on step functions aligned to the refinement.
    pub fn operator(&self) -> Result<StepOperator> {
        lift(&self.source_partition, &self.product)
    }

    pub fn source(&self) -> Result<AlignedFunction> {
        AlignedFunction::new(self.source_partition.clone(), self.source_values.clone())
    }
}

fn expand(f: &StepFunction, atom: &Rational, len: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(len);
    for p in f.pieces() {
        let copies = (&p.mass / atom).to_integer().to_usize().expect("atom count fits in usize");
        v.extend(std::iter::repeat_n(p.value.clone(), copies));
    }
    v.resize(len, Rational::zero());
    v
}

/// Builds `D` doubly stochastic with `f = Ψ_P D Φ_P g` for `f ≺ g`.
///
/// The refinement uses atoms of mass `a = gcd` of all piece masses. On
/// infinite spaces the explicit atoms cover `supp f` plus `supp g`, enough
/// zero-tail room for any redistribution, and the remaining tail is left
/// untouched.
pub fn ds_witness(f: &StepFunction, g: &StepFunction) -> Result<WitnessChain> {
    if !majorize(f, g)?.holds {
        return Err(Error::NotMajorized);
    }
    let masses: Vec<&Rational> = f.pieces().iter().chain(g.pieces()).map(|p| &p.mass).collect();
    let atom = common_atom_mass(masses.iter().copied()).unwrap_or_else(|| int(1));
    let count_of = |m: &Rational| -> usize {
        (m / &atom).to_integer().to_usize().expect("atom count fits in usize")
    };
    let (n, infinite) = match f.total_measure() {
        ExtendedReal::Finite(total) => (count_of(total), false),
        ExtendedReal::Infinite => (count_of(&f.support_measure()) + count_of(&g.support_measure()), true),
    };
    let partition = Partition::equal_mass(atom.clone(), n, infinite)?;
    let source_values = expand(g, &atom, n);
    let target_values = expand(f, &atom, n);
    let (steps, product) = t_transform_chain(&source_values, &target_values)?;
    Ok(WitnessChain {
        steps,
        product,
        source_partition: partition,
        source_values,
        target_values,
    })
}

/// How [`sds_approx_sequence`] builds its operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceMode {
    /// One exact witness on the gcd refinement.
    Exact,
    /// Witnesses between binned versions of both functions on dyadic grids of
    /// `2^k` equal atoms, `k = 1, …, n_steps`, as if the masses could not be
    /// refined exactly.
    DyadicBinning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxStep {
    /// `S_k`, from functions aligned to `source.partition()` to the grid.
    pub operator: StepOperator,
    /// The starting function laid out on the operator's source partition.
    pub source: AlignedFunction,
    /// `S_k f`.
    pub image: StepFunction,
    /// `‖S_k f − g‖₁`.
    pub l1_error: Rational,
}

/// Stochastic operators `S_k` with `S_k f → g` for `g ≺ f`.
pub fn sds_approx_sequence(
    f: &StepFunction,
    g: &StepFunction,
    n_steps: usize,
    mode: SequenceMode,
) -> Result<Vec<ApproxStep>> {
    if !majorize(g, f)?.holds {
        return Err(Error::NotMajorized);
    }
    match mode {
        SequenceMode::Exact => {
            let w = ds_witness(g, f)?;
            let operator = w.operator()?;
            let source = w.source()?;
            let image = operator.apply(&source)?.to_step()?;
            let l1_error = l1_distance(&image, g)?;
            Ok(vec![ApproxStep {
                operator,
                source,
                image,
                l1_error,
            }])
        }
        SequenceMode::DyadicBinning => (1..=n_steps).map(|k| binned_step(f, g, k)).collect(),
    }
}

/// Level sets of `h↓` as consecutive atoms, padded so the explicit atoms end
/// at `length` on infinite spaces.
fn layout_partition(h: &StepFunction, length: &Rational, tail: &Rational) -> Result<AlignedFunction> {
    let mut atoms: Vec<Rational> = h.pieces().iter().map(|p| p.mass.clone()).collect();
    let mut values: Vec<Rational> = h.pieces().iter().map(|p| p.value.clone()).collect();
    let partition = match h.total_measure() {
        ExtendedReal::Finite(_) => Partition::finite(atoms)?,
        ExtendedReal::Infinite => {
            let rest = length - h.stored_measure();
            if rest.is_positive() {
                atoms.push(rest);
                values.push(Rational::zero());
            }
            Partition::with_tail(atoms, tail.clone())?
        }
    };
    AlignedFunction::new(partition, values)
}

fn binned_step(f: &StepFunction, g: &StepFunction, k: usize) -> Result<ApproxStep> {
    let bins = 1usize << k;
    let length = match f.total_measure() {
        ExtendedReal::Finite(t) => t.clone(),
        ExtendedReal::Infinite => {
            let (a, b) = (f.support_measure(), g.support_measure());
            let l = if a > b { a } else { b };
            if l.is_zero() {
                int(1)
            } else {
                l
            }
        }
    };
    let width = &length / int(bins as i64);
    let grid = Partition::equal_mass(width.clone(), bins, !f.total_measure().is_finite())?;

    let f_layout = layout_partition(f, &length, &width)?;
    let g_layout = layout_partition(g, &length, &width)?;
    let average_f = averaging_operator(&grid, f_layout.partition(), &Overlap::intervals(&grid, f_layout.partition())?)?;
    let average_g = averaging_operator(&grid, g_layout.partition(), &Overlap::intervals(&grid, g_layout.partition())?)?;
    let binned_f = average_f.apply(&f_layout)?;
    let binned_g = average_g.apply(&g_layout)?;

    let (_, d) = t_transform_chain(&integrals(&binned_f), &integrals(&binned_g))?;
    let operator = lift(&grid, &d)?.compose(&average_f)?;
    let source = f_layout.on(operator.source())?;
    let image = operator.apply(&source)?.to_step()?;
    let l1_error = l1_distance(&image, g)?;
    Ok(ApproxStep {
        operator,
        source,
        image,
        l1_error,
    })
}

fn integrals(f: &AlignedFunction) -> Vec<Rational> {
    f.values()
        .iter()
        .zip(f.partition().atoms())
        .map(|(v, m)| v * m)
        .collect()
}
