//! Seeded random inputs for the self-test suite and the property tests.
//! Sizes stay small: exact rational arithmetic grows denominators quickly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operators::{lift, AlignedFunction, OperatorMatrix, Partition};
use crate::rational::{int, ratio, ExtendedReal, Rational};
use crate::step::StepFunction;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DENOMINATORS: [i64; 4] = [1, 2, 3, 4];

/// `p / q` with `0 ≤ p ≤ max_numerator` and `q` drawn from a short list.
pub fn small_rational<R: Rng>(rng: &mut R, max_numerator: i64) -> Rational {
    let q = *DENOMINATORS.choose(rng).expect("nonempty");
    ratio(rng.gen_range(0..=max_numerator), q)
}

pub fn positive_rational<R: Rng>(rng: &mut R, max_numerator: i64) -> Rational {
    let q = *DENOMINATORS.choose(rng).expect("nonempty");
    ratio(rng.gen_range(1..=max_numerator.max(1)), q)
}

/// Nonnegative step function with 1 to `max_pieces` level sets. On a finite
/// space the total measure is the sum of the masses, so zero values are
/// allowed as pieces; on an infinite space they fall into the tail.
pub fn step_function<R: Rng>(rng: &mut R, max_pieces: usize, infinite: bool) -> StepFunction {
    let k = rng.gen_range(1..=max_pieces.max(1));
    let raw: Vec<(Rational, Rational)> = (0..k)
        .map(|_| (small_rational(rng, 12), positive_rational(rng, 6)))
        .collect();
    let total = if infinite {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite(raw.iter().map(|(_, m)| m).sum())
    };
    StepFunction::canonicalize(raw, total).expect("generated pieces are valid")
}

/// A step function on a finite or infinite space, chosen at random.
pub fn any_step_function<R: Rng>(rng: &mut R, max_pieces: usize) -> StepFunction {
    let infinite = rng.gen_bool(0.5);
    step_function(rng, max_pieces, infinite)
}

/// Two nonnegative step functions on a common space. Finite pairs share the
/// total measure by cutting one random layout of `[0, T)` two ways.
pub fn step_pair<R: Rng>(rng: &mut R, max_pieces: usize, infinite: bool) -> (StepFunction, StepFunction) {
    if infinite {
        return (step_function(rng, max_pieces, true), step_function(rng, max_pieces, true));
    }
    let f = step_function(rng, max_pieces, false);
    let total = f.total_measure().clone();
    let t = total.finite().expect("finite").clone();
    let k = rng.gen_range(1..=max_pieces.max(1));
    let mut cuts: Vec<Rational> = (0..k - 1).map(|_| &t * small_rational(rng, 4) / int(4)).collect();
    cuts.push(int(0));
    cuts.push(t);
    cuts.sort();
    cuts.dedup();
    let raw: Vec<(Rational, Rational)> = cuts
        .windows(2)
        .map(|w| (small_rational(rng, 12), &w[1] - &w[0]))
        .collect();
    let g = StepFunction::canonicalize(raw, total).expect("cuts tile the space");
    (f, g)
}

/// Scales `g` so that it has the integral of `f`, when both are nonzero.
pub fn match_integral(f: &StepFunction, g: &StepFunction) -> StepFunction {
    let (a, b) = (f.integral(), g.integral());
    if a == int(0) || b == int(0) {
        return g.clone();
    }
    g.scale(&(a / b)).expect("positive scale")
}

pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Convex combination of up to three random permutation matrices.
pub fn ds_matrix<R: Rng>(rng: &mut R, n: usize) -> OperatorMatrix {
    let k = rng.gen_range(1..=3);
    let weights: Vec<Rational> = (0..k).map(|_| positive_rational(rng, 4)).collect();
    let sum: Rational = weights.iter().sum();
    let mut m = OperatorMatrix::zeros(n, n);
    for w in weights {
        let w = w / &sum;
        for (col, row) in permutation(rng, n).into_iter().enumerate() {
            *m.entry_mut(row, col) += &w;
        }
    }
    m
}

/// `m × n` with `m ≥ n`: the first `n` columns of a random doubly stochastic
/// `m × m` matrix. Columns sum to 1 and rows to at most 1.
pub fn sds_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> OperatorMatrix {
    assert!(rows >= cols);
    let full = ds_matrix(rng, rows);
    let entries = (0..rows).flat_map(|r| full.row(r)[..cols].to_vec()).collect();
    OperatorMatrix::new(rows, cols, entries).expect("valid dimensions")
}

/// Nonnegative `m × n` matrix with every column summing to 1.
pub fn markov_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(rows, cols);
    for c in 0..cols {
        let mut column: Vec<Rational> = (0..rows).map(|_| small_rational(rng, 5)).collect();
        let sum: Rational = column.iter().sum();
        if sum == int(0) {
            column[rng.gen_range(0..rows)] = int(1);
        } else {
            column.iter_mut().for_each(|v| *v = &*v / &sum);
        }
        for (r, v) in column.into_iter().enumerate() {
            *m.entry_mut(r, c) = v;
        }
    }
    m
}

pub fn nonnegative_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_rational(rng, 12)).collect()
}

pub fn signed_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let v = small_rational(rng, 12);
            if rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// `count` atoms of one random mass, optionally with an unbounded tail.
pub fn equal_mass_partition<R: Rng>(rng: &mut R, count: usize, infinite: bool) -> Partition {
    Partition::equal_mass(positive_rational(rng, 3), count, infinite).expect("positive mass")
}

/// Atoms of independent random masses.
pub fn partition<R: Rng>(rng: &mut R, count: usize, infinite: bool) -> Partition {
    let atoms = (0..count).map(|_| positive_rational(rng, 4)).collect();
    let tail = infinite.then(|| positive_rational(rng, 4));
    Partition::new(atoms, tail).expect("positive masses")
}

pub fn aligned<R: Rng>(rng: &mut R, partition: &Partition) -> AlignedFunction {
    AlignedFunction::new(partition.clone(), nonnegative_vector(rng, partition.len())).expect("matching length")
}

/// A random semi-doubly stochastic matrix together with the equal-mass
/// partition it acts on. Finite partitions give square (hence doubly
/// stochastic) matrices; infinite ones give `m × n` truncations with
/// `m ≥ n`, which are typically not doubly stochastic.
pub fn sds_on_partition<R: Rng>(rng: &mut R, max_dim: usize) -> (Partition, OperatorMatrix) {
    let infinite = rng.gen_bool(0.5);
    let n = rng.gen_range(1..=max_dim.max(1));
    if infinite {
        let m = rng.gen_range(n..=max_dim.max(n));
        (equal_mass_partition(rng, 0, true), sds_matrix(rng, m, n))
    } else {
        (equal_mass_partition(rng, n, false), ds_matrix(rng, n))
    }
}

/// `(f, g)` with `f = D₀ g` for a random doubly stochastic `D₀` on an
/// equal-mass partition, returned as step functions.
pub fn ds_image_pair<R: Rng>(rng: &mut R, max_dim: usize) -> Result<(StepFunction, StepFunction)> {
    let n = rng.gen_range(1..=max_dim.max(1));
    let infinite = rng.gen_bool(0.5);
    let p = equal_mass_partition(rng, n, infinite);
    let g = aligned(rng, &p);
    let f = lift(&p, &ds_matrix(rng, n))?.apply(&g)?;
    Ok((f.to_step()?, g.to_step()?))
}
