//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Every count, seed and time limit is fixed
//! here.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use majo_core::diagnostics::{default_levels, equi_modulus, l1_distance, small_set_modulus, truncation_bound};
use majo_core::generate::{self, SeededRng};
use majo_core::majorization::{Evaluation, Probe};
use majo_core::operators::{
    averaging_operator, ds_witness, l1_norm, lift, lift_markov, matrix_to_kernel, restrict, AlignedFunction,
    OperatorClass, OperatorMatrix, Overlap, Partition,
};
use majo_core::rational::{int, ratio};
use majo_core::{
    cross_check_with, hinge_criterion, majorize, rearrangement_criterion, tail_distribution_criterion,
    weak_majorize, Certificate, ExtendedReal, Rational, Relation, StepFunction,
};
use rand::Rng;

const CRITERION_PAIRS: usize = 1000;
const CRITERION_TIME_LIMIT: Duration = Duration::from_secs(30);
const SDS_LIFTS: usize = 500;
const WITNESS_PAIRS: usize = 500;
const AVERAGING_CASES: usize = 300;
const EQUI_OPERATORS: usize = 50;
const EQUI_FUNCTIONS: usize = 10;
const EQUI_DELTA_EXPONENTS: std::ops::RangeInclusive<u32> = 1..=8;
const MARKOV_MATRICES: usize = 500;
const GRID_PAIRS: usize = 200;
const GRID_POINTS: i64 = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("criterion equivalence", criterion_equivalence),
        ("example fixtures", example_fixtures),
        ("semi-doubly stochastic lifts majorize", sds_lifts_majorize),
        ("witness exactness", witness_exactness),
        ("averaging and lifting", averaging_and_lifting),
        ("equi-integrability bound", equi_integrability_bound),
        ("Markov norm", markov_norm),
        ("breakpoint sufficiency against a dense grid", breakpoint_sufficiency),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failures += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.2}s)",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn rng(criterion: u64) -> SeededRng {
    generate::seeded(0xACCE_0000 + criterion)
}

/// 1. Rearrangement, hinge and tail-distribution verdicts agree exactly.
fn criterion_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let (mut disagreements, mut holds, mut finite, mut equal_integrals) = (0, 0, 0, 0);
    for i in 0..CRITERION_PAIRS {
        let (f, g) = match i % 4 {
            0 | 1 => generate::step_pair(&mut rng, 5, i % 2 == 1),
            2 => {
                let infinite = rng.gen_bool(0.5);
                let (f, g) = generate::step_pair(&mut rng, 5, infinite);
                let g = generate::match_integral(&f, &g);
                (f, g)
            }
            _ => generate::ds_image_pair(&mut rng, 5).expect("generator"),
        };
        finite += usize::from(f.total_measure().is_finite());
        equal_integrals += usize::from(f.integral() == g.integral());
        for relation in [Relation::Weak, Relation::Strong] {
            match cross_check_with(&f, &g, relation) {
                Ok(c) => holds += usize::from(c.holds && relation == Relation::Strong),
                Err(_) => disagreements += 1,
            }
        }
        let verdicts = [
            rearrangement_criterion(&f, &g, Relation::Strong).unwrap().holds,
            hinge_criterion(&f, &g).unwrap().holds,
            tail_distribution_criterion(&f, &g).unwrap().holds,
        ];
        if verdicts.iter().any(|v| *v != verdicts[0]) {
            disagreements += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagreements == 0 && elapsed < CRITERION_TIME_LIMIT && finite > 0 && finite < CRITERION_PAIRS && holds > 0,
        format!(
            "{CRITERION_PAIRS} pairs ({finite} finite, {} infinite, {equal_integrals} with equal integrals, \
             {holds} majorized), {disagreements} disagreements, {:.2}s of {}s",
            CRITERION_PAIRS - finite,
            elapsed.as_secs_f64(),
            CRITERION_TIME_LIMIT.as_secs()
        ),
    )
}

fn level_violation(c: &Certificate) -> Option<(Rational, Rational, Rational)> {
    match c {
        Certificate::Violation(Evaluation {
            probe: Probe::Level { s },
            lhs,
            rhs,
        }) => Some((s.clone(), lhs.clone(), rhs.clone())),
        _ => None,
    }
}

/// 2. The incomparable pair and the three sequence-space operators.
fn example_fixtures() -> Outcome {
    let f = StepFunction::canonicalize([(int(3), int(1)), (ratio(1, 2), int(1))], ExtendedReal::Infinite).unwrap();
    let g = StepFunction::canonicalize([(int(2), int(2))], ExtendedReal::Infinite).unwrap();
    let fg = weak_majorize(&f, &g).unwrap();
    let gf = weak_majorize(&g, &f).unwrap();
    let pair_ok = !fg.holds
        && !gf.holds
        && level_violation(&fg.certificate) == Some((int(1), int(3), int(2)))
        && level_violation(&gf.certificate) == Some((int(2), int(4), ratio(7, 2)));

    // Truncations of T₁(a) = (Σa, 0, …), T₂(a) = (0, a₁, a₂, …), T₃ = id.
    let n = 4;
    let t1 = OperatorMatrix::from_rows(
        (0..n)
            .map(|r| vec![if r == 0 { int(1) } else { int(0) }; n])
            .collect(),
    )
    .unwrap();
    let t2 = OperatorMatrix::from_rows(
        (0..=n)
            .map(|r| (0..n).map(|c| if r == c + 1 { int(1) } else { int(0) }).collect())
            .collect(),
    )
    .unwrap();
    let t3 = OperatorMatrix::identity(n);
    // Adjoint images of e₁: T₁*e₁ = (1, 1, …) exceeds 1 off the first
    // coordinate, T₂*e₁ = 0 has integral 0 < 1.
    let e1 = |len: usize| (0..len).map(|i| if i == 0 { int(1) } else { int(0) }).collect::<Vec<_>>();
    let t1_adjoint = t1.transpose().apply(&e1(n)).unwrap();
    let t2_adjoint = t2.transpose().apply(&e1(n + 1)).unwrap();
    let adjoints_ok = t1_adjoint.iter().all(|v| v == &int(1)) && t2_adjoint.iter().all(|v| v == &int(0));

    let counting = Partition::equal_mass(int(1), 0, true).unwrap();
    let classes = [
        t1.classify(),
        t2.classify(),
        t3.classify(),
        lift_markov(&counting, &t1).unwrap().classify(),
        lift(&counting, &t2).unwrap().classify(),
        lift(&counting, &t3).unwrap().classify(),
    ];
    let expected = [
        OperatorClass::Markov,
        OperatorClass::SemiDoublyStochastic,
        OperatorClass::DoublyStochastic,
    ];
    let classes_ok = classes[..3] == expected && classes[3..] == expected;
    outcome(
        pair_ok && adjoints_ok && classes_ok,
        format!(
            "pair incomparable with certificates s = 1 (3 > 2) and s = 2 (4 > 7/2): {pair_ok}; \
             T1/T2/T3 classify {}/{}/{} on sequences and {}/{}/{} lifted",
            classes[0], classes[1], classes[2], classes[3], classes[4], classes[5]
        ),
    )
}

/// 3. `S f ≺ f` for lifted semi-doubly stochastic `S`; T₁ breaks it.
fn sds_lifts_majorize() -> Outcome {
    let mut rng = rng(3);
    let (mut failures, mut strictly_sds) = (0, 0);
    for _ in 0..SDS_LIFTS {
        let (p, d) = generate::sds_on_partition(&mut rng, 5);
        let s = lift(&p, &d).unwrap();
        strictly_sds += usize::from(s.classify() == OperatorClass::SemiDoublyStochastic);
        let f = generate::aligned(&mut rng, s.source());
        let image = s.apply(&f).unwrap();
        if !majorize(&image.to_step().unwrap(), &f.to_step().unwrap()).unwrap().holds {
            failures += 1;
        }
    }

    let n = 4;
    let counting = Partition::equal_mass(int(1), n, true).unwrap();
    let t1 = OperatorMatrix::from_rows(
        (0..n)
            .map(|r| vec![if r == 0 { int(1) } else { int(0) }; n])
            .collect(),
    )
    .unwrap();
    let op = lift_markov(&counting, &t1).unwrap();
    let counterexample = (1u32..(1 << n)).find_map(|mask| {
        let values = (0..n).map(|i| if mask & (1 << i) != 0 { int(1) } else { int(0) }).collect();
        let f = AlignedFunction::new(counting.clone(), values).unwrap();
        let image = op.apply(&f).unwrap();
        let verdict = majorize(&image.to_step().unwrap(), &f.to_step().unwrap()).unwrap();
        (!verdict.holds).then(|| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect::<Vec<_>>())
    });
    outcome(
        failures == 0 && strictly_sds > 0 && counterexample.is_some(),
        format!(
            "{SDS_LIFTS} lifts ({strictly_sds} not doubly stochastic), {failures} with S f not majorized by f; \
             T1 counterexample on the indicator of atoms {counterexample:?}"
        ),
    )
}

/// Row and column sums recomputed from the entries.
fn doubly_stochastic_by_sums(d: &OperatorMatrix) -> bool {
    let cols = (0..d.cols()).all(|c| (0..d.rows()).map(|r| d.entry(r, c)).sum::<Rational>() == int(1));
    let rows = (0..d.rows()).all(|r| d.row(r).iter().sum::<Rational>() == int(1));
    cols && rows
}

/// 4. Witness chains reproduce `f = D₀ g` exactly.
fn witness_exactness() -> Outcome {
    let mut rng = rng(4);
    let (mut failures, mut steps_total, mut max_dim) = (0, 0, 0);
    for _ in 0..WITNESS_PAIRS {
        let (f, g) = generate::ds_image_pair(&mut rng, 5).unwrap();
        let w = ds_witness(&f, &g).unwrap();
        let n = w.dimension();
        max_dim = max_dim.max(n);
        steps_total += w.steps.len();
        let image = w.operator().unwrap().apply(&w.source().unwrap()).unwrap().to_step().unwrap();
        let ok = w.steps.len() <= n.saturating_sub(1)
            && w.product.apply(&w.source_values).unwrap() == w.target_values
            && w.product.classify() == OperatorClass::DoublyStochastic
            && doubly_stochastic_by_sums(&w.product)
            && l1_distance(&image, &f).unwrap() == int(0)
            && image == f;
        failures += usize::from(!ok);
    }
    outcome(
        failures == 0,
        format!("{WITNESS_PAIRS} pairs, {failures} failures, {steps_total} T-transforms in total, largest N = {max_dim}"),
    )
}

fn coarsen(rng: &mut SeededRng, fine: &Partition) -> Partition {
    let mut atoms = Vec::new();
    let mut run = int(0);
    for (i, m) in fine.atoms().iter().enumerate() {
        run += m;
        if i + 1 == fine.len() || rng.gen_bool(0.4) {
            atoms.push(std::mem::replace(&mut run, int(0)));
        }
    }
    Partition::new(atoms, fine.tail_mass().cloned()).unwrap()
}

/// 5. Averaging is doubly stochastic and majorized; restrict inverts lift;
/// kernel marginals.
fn averaging_and_lifting() -> Outcome {
    let mut rng = rng(5);
    let (mut averaging_failures, mut restrict_failures, mut kernel_failures) = (0, 0, 0);
    for _ in 0..AVERAGING_CASES {
        let n = rng.gen_range(1..=6);
        let infinite = rng.gen_bool(0.5);
        let fine = generate::partition(&mut rng, n, infinite);
        let coarse = coarsen(&mut rng, &fine);
        let g = averaging_operator(&coarse, &fine, &Overlap::intervals(&coarse, &fine).unwrap()).unwrap();
        let f = generate::aligned(&mut rng, &fine);
        let averaged = g.apply(&f).unwrap();
        // Each coarse atom carries the mass-weighted mean of the fine values.
        let mut expected = Vec::new();
        let mut j = 0;
        for atom in coarse.atoms() {
            let (mut mass, mut weighted) = (int(0), int(0));
            while &mass < atom {
                mass += &fine.atoms()[j];
                weighted += &fine.atoms()[j] * &f.values()[j];
                j += 1;
            }
            expected.push(weighted / atom);
        }
        let ok = g.classify() == OperatorClass::DoublyStochastic
            && averaged.values() == &expected[..]
            && majorize(&averaged.to_step().unwrap(), &f.to_step().unwrap()).unwrap().holds;
        averaging_failures += usize::from(!ok);

        let (p, d) = generate::sds_on_partition(&mut rng, 5);
        if restrict(&p, &lift(&p, &d).unwrap()).unwrap() != d {
            restrict_failures += 1;
        }
        let k = matrix_to_kernel(&p, &d).unwrap();
        let (rows, cols) = (k.row_partition(), k.col_partition());
        let column_ok = (0..d.cols()).all(|j| {
            (0..d.rows()).map(|n| k.values().entry(n, j) * &rows.atoms()[n]).sum::<Rational>() == int(1)
        });
        let row_ok = (0..d.rows()).all(|n| {
            (0..d.cols()).map(|j| k.values().entry(n, j) * &cols.atoms()[j]).sum::<Rational>() <= int(1)
        });
        kernel_failures += usize::from(!(column_ok && row_ok));
    }
    outcome(
        averaging_failures + restrict_failures + kernel_failures == 0,
        format!(
            "{AVERAGING_CASES} cases each: averaging {averaging_failures} failures, \
             restrict(lift(D)) != D {restrict_failures}, kernel marginals {kernel_failures}"
        ),
    )
}

/// A semi-doubly stochastic lift whose space has measure at least 1/2, so
/// every δ in the grid is admissible.
fn equi_operator(rng: &mut SeededRng, i: usize) -> (Partition, OperatorMatrix) {
    if i % 2 == 0 {
        let n = rng.gen_range(2..=5);
        let p = Partition::equal_mass(ratio(rng.gen_range(1..=3), 4), n, false).unwrap();
        (p, generate::ds_matrix(rng, n))
    } else {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(n..=5);
        let p = generate::equal_mass_partition(rng, 0, true);
        (p, generate::sds_matrix(rng, m, n))
    }
}

/// 6. `modulus(S f, δ) ≤ ∫(f − c)⁺ + c δ` over the grid, and `∫ S f = ∫ f`.
fn equi_integrability_bound() -> Outcome {
    let mut rng = rng(6);
    let deltas: Vec<Rational> = EQUI_DELTA_EXPONENTS.map(|k| ratio(1, 1 << k)).collect();
    let (mut checks, mut violations, mut integral_failures, mut strictly_sds) = (0, 0, 0, 0);
    for i in 0..EQUI_OPERATORS {
        let (p, d) = equi_operator(&mut rng, i);
        let s = lift(&p, &d).unwrap();
        strictly_sds += usize::from(s.classify() == OperatorClass::SemiDoublyStochastic);
        for _ in 0..EQUI_FUNCTIONS {
            let f = generate::aligned(&mut rng, s.source());
            let sf = s.apply(&f).unwrap().to_step().unwrap();
            let f = f.to_step().unwrap();
            integral_failures += usize::from(sf.integral() != f.integral());
            for delta in &deltas {
                let modulus = small_set_modulus(&sf, delta).unwrap();
                for c in default_levels(&f) {
                    checks += 1;
                    violations += usize::from(modulus > truncation_bound(&f, &c, delta).unwrap());
                }
                let report = equi_modulus(std::slice::from_ref(&sf), &f, &default_levels(&f), delta).unwrap();
                violations += usize::from(!report.within_bound());
            }
        }
    }
    outcome(
        violations == 0 && integral_failures == 0,
        format!(
            "{EQUI_OPERATORS} operators ({strictly_sds} not doubly stochastic) x {EQUI_FUNCTIONS} functions, \
             {checks} (c, delta) checks, {violations} violations, {integral_failures} integral mismatches"
        ),
    )
}

/// 7. Markov matrices have ℓ¹ norm exactly 1.
fn markov_norm() -> Outcome {
    let mut rng = rng(7);
    let (mut failures, mut sup) = (0, int(0));
    for _ in 0..MARKOV_MATRICES {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let d = generate::markov_matrix(&mut rng, m, n);
        let v = generate::nonnegative_vector(&mut rng, n);
        let w = generate::signed_vector(&mut rng, n);
        let (dv, dw) = (l1_norm(&d.apply(&v).unwrap()), l1_norm(&d.apply(&w).unwrap()));
        if dv != l1_norm(&v) || dw > l1_norm(&w) {
            failures += 1;
        }
        for (image, x) in [(dv, l1_norm(&v)), (dw, l1_norm(&w))] {
            if x != int(0) {
                let r = image / x;
                if r > sup {
                    sup = r;
                }
            }
        }
    }
    outcome(
        failures == 0 && sup == int(1),
        format!("{MARKOV_MATRICES} matrices, {failures} failures, sup of |Dv|/|v| = {sup}"),
    )
}

/// Level sets on a lattice: values in units of 1/16, masses in units of 1/4.
/// The dense grid has step `DOMAIN / GRID_POINTS` = 1/400, so it contains
/// every mass and value breakpoint and the oracle below is exact on it.
const VALUE_UNIT: i64 = 16;
const MASS_UNIT: i64 = 4;
const DOMAIN: i64 = 25;

#[derive(Clone, Debug)]
struct LatticeFunction {
    /// `(value · 16, mass · 4)`.
    pieces: Vec<(i64, i64)>,
    infinite: bool,
}

impl LatticeFunction {
    fn to_step(&self) -> StepFunction {
        let total = if self.infinite {
            ExtendedReal::Infinite
        } else {
            ExtendedReal::Finite(int(DOMAIN))
        };
        let raw = self.pieces.iter().map(|(v, m)| (ratio(*v, VALUE_UNIT), ratio(*m, MASS_UNIT)));
        StepFunction::canonicalize(raw, total).unwrap()
    }

    /// `∫_0^{i/400} f↓` scaled by `16 · 400`.
    fn partial(&self, i: i64) -> i64 {
        let mut sorted = self.pieces.clone();
        sorted.sort_by(|a, b| b.0.cmp(&a.0));
        let per_mass = GRID_POINTS / (DOMAIN * MASS_UNIT);
        let (mut left, mut acc) = (i, 0);
        for (v, m) in sorted {
            let take = left.min(m * per_mass);
            acc += v * take;
            left -= take;
        }
        acc
    }

    /// `∫(f − u)⁺` at `u = i/400`, scaled by `16 · 400 · 4 / 16`.
    fn hinge(&self, i: i64) -> i64 {
        let per_value = GRID_POINTS / (DOMAIN * VALUE_UNIT);
        self.pieces.iter().map(|(v, m)| (v * per_value - i).max(0) * m).sum()
    }

    fn integral(&self) -> i64 {
        self.pieces.iter().map(|(v, m)| v * m).sum()
    }
}

fn lattice_function(rng: &mut SeededRng, infinite: bool) -> LatticeFunction {
    let units = DOMAIN * MASS_UNIT;
    let k = rng.gen_range(1..=6);
    let mut cuts: Vec<i64> = (0..k).map(|_| rng.gen_range(1..units)).collect();
    cuts.push(0);
    cuts.push(if infinite { rng.gen_range(1..=units) } else { units });
    cuts.sort();
    cuts.dedup();
    let pieces = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (4 * rng.gen_range(0..=12 * 4), w[1] - w[0]))
        .collect();
    LatticeFunction { pieces, infinite }
}

/// Averages `g` over blocks of 1, 2 or 4 quarter-units of its decreasing
/// layout, which keeps values on the 1/16 lattice and yields `f ≺ g`.
fn lattice_average(rng: &mut SeededRng, g: &LatticeFunction) -> LatticeFunction {
    let mut sorted = g.pieces.clone();
    sorted.sort_by(|a, b| b.0.cmp(&a.0));
    let units: Vec<i64> = sorted.iter().flat_map(|(v, m)| std::iter::repeat_n(*v, *m as usize)).collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < units.len() {
        let width = [1usize, 2, 4][rng.gen_range(0..3)].min(units.len() - start);
        let width = if width == 3 { 2 } else { width };
        let sum: i64 = units[start..start + width].iter().sum();
        let mean = sum / width as i64;
        if mean * width as i64 == sum {
            pieces.push((mean, width as i64));
            start += width;
        } else {
            pieces.push((units[start], 1));
            start += 1;
        }
    }
    LatticeFunction {
        pieces,
        infinite: g.infinite,
    }
}

/// 8. Breakpoint verdicts equal verdicts on 10⁴ grid points.
fn breakpoint_sufficiency() -> Outcome {
    let mut rng = rng(8);
    let (mut disagreements, mut holds) = (0, 0);
    for i in 0..GRID_PAIRS {
        let infinite = i % 2 == 1;
        let g = lattice_function(&mut rng, infinite);
        let f = if rng.gen_bool(0.5) {
            lattice_average(&mut rng, &g)
        } else {
            lattice_function(&mut rng, infinite)
        };
        let grid = 0..=GRID_POINTS;
        let weak_by_levels = grid.clone().all(|i| f.partial(i) <= g.partial(i));
        let weak_by_thresholds = grid.clone().all(|i| f.hinge(i) <= g.hinge(i));
        let equal = f.integral() == g.integral();

        let (fs, gs) = (f.to_step(), g.to_step());
        let weak = weak_majorize(&fs, &gs).unwrap().holds;
        let strong = majorize(&fs, &gs).unwrap().holds;
        let hinge_weak = cross_check_with(&fs, &gs, Relation::Weak).unwrap().holds;
        holds += usize::from(strong);
        let agree = weak == weak_by_levels
            && hinge_weak == weak_by_thresholds
            && strong == (weak_by_levels && equal)
            && weak_by_levels == weak_by_thresholds;
        disagreements += usize::from(!agree);
    }
    outcome(
        disagreements == 0 && holds > 0 && holds < GRID_PAIRS,
        format!("{GRID_PAIRS} pairs ({holds} majorized), {} grid points each, {disagreements} disagreements", GRID_POINTS + 1),
    )
}
