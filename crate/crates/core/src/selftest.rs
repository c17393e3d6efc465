//! The randomized invariant suite behind `majo selftest`. Every check draws
//! from its own generator derived from the seed, so the report is a function
//! of `(seed, cases)` alone.

use rand::Rng;
use serde::Serialize;

use crate::diagnostics::{default_levels, l1_distance, small_set_modulus, truncation_bound};
use crate::error::Result;
use crate::format::{parse_matrix, parse_step_function, write_matrix, write_step_function};
use crate::generate::{self, SeededRng};
use crate::majorization::{cross_check_with, majorize, Relation};
use crate::operators::{
    averaging_operator, l1_norm, lift, matrix_to_kernel, restrict, ds_witness, OperatorClass, Overlap, Partition,
};
use crate::rational::{int, ratio};
use crate::step::StepFunction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Case index and message of the first failure.
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().map(|c| c.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }
}

type Check = fn(&mut SeededRng) -> Result<bool>;

const CHECKS: &[(&str, Check)] = &[
    ("criteria-agree", criteria_agree),
    ("certificates-reverify", certificates_reverify),
    ("rearrangement-invariance", rearrangement_invariance),
    ("hinge-identity", hinge_identity),
    ("sds-majorizes", sds_majorizes),
    ("witness-exact", witness_exact),
    ("averaging", averaging),
    ("restrict-lift", restrict_lift),
    ("kernel-marginals", kernel_marginals),
    ("equi-bound", equi_bound),
    ("markov-norm", markov_norm),
    ("format-round-trip", format_round_trip),
];

pub fn run_selftest(seed: u64, cases: usize) -> SelftestReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = generate::seeded(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
            let mut outcome = CheckOutcome {
                name,
                passed: 0,
                failed: 0,
                first_failure: None,
            };
            for case in 0..cases {
                let failure = match check(&mut rng) {
                    Ok(true) => None,
                    Ok(false) => Some("invariant violated".to_string()),
                    Err(e) => Some(e.to_string()),
                };
                match failure {
                    None => outcome.passed += 1,
                    Some(msg) => {
                        outcome.failed += 1;
                        outcome.first_failure.get_or_insert(format!("case {case}: {msg}"));
                    }
                }
            }
            outcome
        })
        .collect();
    SelftestReport { seed, cases, checks }
}

fn random_pair(rng: &mut SeededRng) -> (StepFunction, StepFunction) {
    let infinite = rng.gen_bool(0.5);
    let (f, g) = generate::step_pair(rng, 4, infinite);
    if rng.gen_bool(0.5) {
        let g = generate::match_integral(&f, &g);
        (f, g)
    } else {
        (f, g)
    }
}

fn criteria_agree(rng: &mut SeededRng) -> Result<bool> {
    let (f, g) = random_pair(rng);
    cross_check_with(&f, &g, Relation::Weak)?;
    cross_check_with(&f, &g, Relation::Strong)?;
    Ok(true)
}

fn certificates_reverify(rng: &mut SeededRng) -> Result<bool> {
    let (f, g) = random_pair(rng);
    let v = majorize(&f, &g)?;
    v.reverify(&f, &g)
}

/// Splitting and shuffling the level sets yields the same canonical function.
fn rearrangement_invariance(rng: &mut SeededRng) -> Result<bool> {
    let f = generate::any_step_function(rng, 5);
    let mut raw = Vec::new();
    for (value, mass) in f.raw_pieces() {
        let cut = ratio(rng.gen_range(1..4), 4);
        raw.push((value.clone(), &mass * &cut));
        raw.push((value, &mass * (int(1) - cut)));
    }
    let order = generate::permutation(rng, raw.len());
    let shuffled: Vec<_> = order.into_iter().map(|i| raw[i].clone()).collect();
    let h = StepFunction::canonicalize(shuffled, f.total_measure().clone())?;
    let again = StepFunction::canonicalize(h.raw_pieces(), h.total_measure().clone())?;
    Ok(h == f && again == h && majorize(&f, &h)?.holds && majorize(&h, &f)?.holds)
}

fn hinge_identity(rng: &mut SeededRng) -> Result<bool> {
    let f = generate::any_step_function(rng, 5);
    if f.integral() != f.hinge_integral(&int(0))? {
        return Ok(false);
    }
    let mut levels = f.value_breakpoints();
    levels.push(generate::small_rational(rng, 12));
    for u in levels.into_iter().filter(|u| u >= &int(0)) {
        if f.hinge_integral(&u)? != f.tail_integral(&u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sds_majorizes(rng: &mut SeededRng) -> Result<bool> {
    let (p, d) = generate::sds_on_partition(rng, 5);
    let s = lift(&p, &d)?;
    let f = generate::aligned(rng, s.source());
    let image = s.apply(&f)?;
    Ok(majorize(&image.to_step()?, &f.to_step()?)?.holds)
}

fn witness_exact(rng: &mut SeededRng) -> Result<bool> {
    let (f, g) = generate::ds_image_pair(rng, 5)?;
    let w = ds_witness(&f, &g)?;
    let n = w.dimension();
    let image = w.operator()?.apply(&w.source()?)?.to_step()?;
    Ok(w.steps.len() < n.max(1)
        && w.product.classify() == OperatorClass::DoublyStochastic
        && w.product.apply(&w.source_values)? == w.target_values
        && l1_distance(&image, &f)? == int(0))
}

/// Coarsens a random partition by merging runs of consecutive atoms.
fn coarsening(rng: &mut SeededRng, fine: &Partition) -> Result<Partition> {
    let mut atoms = Vec::new();
    let mut run = int(0);
    for (i, m) in fine.atoms().iter().enumerate() {
        run += m;
        if i + 1 == fine.len() || rng.gen_bool(0.5) {
            atoms.push(std::mem::replace(&mut run, int(0)));
        }
    }
    Partition::new(atoms, fine.tail_mass().cloned())
}

fn averaging(rng: &mut SeededRng) -> Result<bool> {
    let n = rng.gen_range(1..=6);
    let infinite = rng.gen_bool(0.5);
    let fine = generate::partition(rng, n, infinite);
    let coarse = coarsening(rng, &fine)?;
    let g = averaging_operator(&coarse, &fine, &Overlap::intervals(&coarse, &fine)?)?;
    let f = generate::aligned(rng, &fine);
    let averaged = g.apply(&f)?;
    Ok(g.classify() == OperatorClass::DoublyStochastic
        && averaged.integral() == f.integral()
        && majorize(&averaged.to_step()?, &f.to_step()?)?.holds)
}

fn restrict_lift(rng: &mut SeededRng) -> Result<bool> {
    let (p, d) = generate::sds_on_partition(rng, 5);
    Ok(restrict(&p, &lift(&p, &d)?)? == d)
}

fn kernel_marginals(rng: &mut SeededRng) -> Result<bool> {
    let (p, d) = generate::sds_on_partition(rng, 5);
    let k = matrix_to_kernel(&p, &d)?;
    Ok(k.column_integrals().iter().all(|c| c == &int(1)) && k.row_integrals().iter().all(|r| r <= &int(1)))
}

fn equi_bound(rng: &mut SeededRng) -> Result<bool> {
    let (p, d) = generate::sds_on_partition(rng, 5);
    let s = lift(&p, &d)?;
    let f = generate::aligned(rng, s.source());
    let (sf, f) = (s.apply(&f)?.to_step()?, f.to_step()?);
    if sf.integral() != f.integral() {
        return Ok(false);
    }
    for k in 1..=8 {
        let delta = ratio(1, 1 << k);
        if sf.total_measure().finite().is_some_and(|t| t < &delta) {
            continue;
        }
        let modulus = small_set_modulus(&sf, &delta)?;
        for c in default_levels(&f) {
            if modulus > truncation_bound(&f, &c, &delta)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn markov_norm(rng: &mut SeededRng) -> Result<bool> {
    let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let d = generate::markov_matrix(rng, m, n);
    let v = generate::nonnegative_vector(rng, n);
    let w = generate::signed_vector(rng, n);
    Ok(l1_norm(&d.apply(&v)?) == l1_norm(&v) && l1_norm(&d.apply(&w)?) <= l1_norm(&w))
}

fn format_round_trip(rng: &mut SeededRng) -> Result<bool> {
    let f = generate::any_step_function(rng, 5);
    let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let d = generate::markov_matrix(rng, m, n);
    Ok(parse_step_function(&write_step_function(&f))? == f && parse_matrix(&write_matrix(&d))? == d)
}
