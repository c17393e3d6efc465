use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use majo_core::diagnostics::{default_levels, equi_modulus, EquiIntegrabilityReport};
use majo_core::format::{
    parse_matrix, parse_partition, parse_sfn, write_matrix, write_partition, write_step_function, SfnDocument,
};
use majo_core::majorization::{hinge_criterion_with, tail_distribution_criterion_with};
use majo_core::operators::{
    ds_witness, lift as lift_operator, lift_markov, matrix_to_kernel, AlignedFunction, OperatorMatrix, Partition,
};
use majo_core::rational::{parse_rational, serialize_rational, serialize_rationals, ExtendedReal, Rational};
use majo_core::selftest::run_selftest;
use majo_core::step::Piece;
use majo_core::{
    cross_check_with, majorize, rearrangement_criterion, Certificate, MajorizationVerdict, Relation, StepFunction,
};

use crate::render;
use crate::{CriterionArg, Failure};

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: majo_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        majo_core::Error::InternalInconsistency(_) => Failure::from(e),
        e => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn load_sfn(path: &Path) -> Result<SfnDocument, Failure> {
    in_file(path, parse_sfn(&read(path)?))
}

fn load_matrix(path: &Path) -> Result<OperatorMatrix, Failure> {
    in_file(path, parse_matrix(&read(path)?))
}

fn load_partition(path: &Path) -> Result<Partition, Failure> {
    in_file(path, parse_partition(&read(path)?))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Inconsistent(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn rational_rows(m: &OperatorMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|v| v.to_string()).collect())
        .collect()
}

fn joined(values: &[Rational]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct Timings {
    elapsed_us: u128,
}

fn timings(start: Instant, enabled: bool) -> Option<Timings> {
    enabled.then(|| Timings {
        elapsed_us: start.elapsed().as_micros(),
    })
}

#[derive(Serialize)]
struct At {
    #[serde(serialize_with = "serialize_rational")]
    s: Rational,
    #[serde(serialize_with = "serialize_rational")]
    value: Rational,
    #[serde(serialize_with = "serialize_rational")]
    partial_integral: Rational,
}

#[derive(Serialize)]
struct RearrangeReport<'a> {
    total: &'a ExtendedReal,
    pieces: &'a [Piece],
    #[serde(serialize_with = "serialize_rational")]
    integral: Rational,
    at: Option<At>,
}

pub fn rearrange(path: &Path, at: Option<&str>, json: bool) -> Outcome {
    let f = load_sfn(path)?.function.rearrangement();
    let at = match at {
        None => None,
        Some(token) => {
            let s = parse_rational(token).ok_or_else(|| Failure::Input(format!("--at: not a rational: {token}")))?;
            let partial_integral = f.partial_integral_at(&s)?;
            Some(At {
                value: f.rearrangement_at(&s),
                s,
                partial_integral,
            })
        }
    };
    if json {
        print_json(&RearrangeReport {
            total: f.total_measure(),
            pieces: f.pieces(),
            integral: f.integral(),
            at,
        })?;
    } else {
        print!("{}", write_step_function(&f));
        if let Some(a) = at {
            println!("# f↓({}) = {}, partial integral {}", a.s, a.value, a.partial_integral);
        }
    }
    Ok(0)
}

pub struct CheckArgs<'a> {
    pub f: &'a Path,
    pub g: &'a Path,
    pub criterion: CriterionArg,
    pub weak: bool,
    pub json: bool,
    pub witness_out: Option<&'a Path>,
    pub timings: bool,
}

struct Decision {
    holds: bool,
    verdicts: Vec<MajorizationVerdict>,
    agreement: Option<bool>,
}

fn decide(f: &StepFunction, g: &StepFunction, criterion: CriterionArg, relation: Relation) -> Result<Decision, Failure> {
    let single = |v: MajorizationVerdict| Decision {
        holds: v.holds,
        verdicts: vec![v],
        agreement: None,
    };
    Ok(match criterion {
        CriterionArg::All => {
            let c = cross_check_with(f, g, relation)?;
            Decision {
                holds: c.holds,
                verdicts: c.verdicts,
                agreement: Some(true),
            }
        }
        CriterionArg::Rearr => single(rearrangement_criterion(f, g, relation)?),
        CriterionArg::Hinge => single(hinge_criterion_with(f, g, relation)?),
        CriterionArg::Tail => single(tail_distribution_criterion_with(f, g, relation)?),
    })
}

#[derive(Serialize)]
struct Direction {
    holds: bool,
    verdicts: Vec<MajorizationVerdict>,
}

#[derive(Serialize)]
struct CheckReport<'a> {
    relation: Relation,
    holds: bool,
    verdicts: &'a [MajorizationVerdict],
    agreement: Option<bool>,
    certificate: &'a Certificate,
    reverse: Option<Direction>,
    incomparable: bool,
    witness_path: Option<String>,
    timings: Option<Timings>,
}

pub fn check(args: &CheckArgs<'_>) -> Outcome {
    let start = Instant::now();
    let f = load_sfn(args.f)?.function;
    let g = load_sfn(args.g)?.function;
    let relation = if args.weak { Relation::Weak } else { Relation::Strong };
    if args.weak && args.witness_out.is_some() {
        return Err(Failure::Input("--witness-out needs the strong relation".into()));
    }
    let forward = decide(&f, &g, args.criterion, relation)?;
    let reverse = if forward.holds {
        None
    } else {
        Some(decide(&g, &f, args.criterion, relation)?)
    };
    let incomparable = reverse.as_ref().is_some_and(|r| !r.holds);
    let witness_path = match (forward.holds, args.witness_out) {
        (true, Some(path)) => {
            let w = ds_witness(&f, &g)?;
            write(path, &write_matrix(&w.product))?;
            Some(path.display().to_string())
        }
        _ => None,
    };

    if args.json {
        print_json(&CheckReport {
            relation,
            holds: forward.holds,
            verdicts: &forward.verdicts,
            agreement: forward.agreement,
            certificate: &forward.verdicts[0].certificate,
            reverse: reverse.map(|r| Direction {
                holds: r.holds,
                verdicts: r.verdicts,
            }),
            incomparable,
            witness_path,
            timings: timings(start, args.timings),
        })?;
    } else {
        println!("{}: {}", render::relation(relation, "f", "g"), if forward.holds { "holds" } else { "fails" });
        for v in &forward.verdicts {
            println!("  {}: {}", v.criterion.name(), render::verdict(v));
        }
        if forward.agreement.is_some() {
            println!("cross-check: all criteria agree");
        }
        if let Some(r) = &reverse {
            println!("{}: {}", render::relation(relation, "g", "f"), if r.holds { "holds" } else { "fails" });
            for v in &r.verdicts {
                println!("  {}: {}", v.criterion.name(), render::verdict(v));
            }
        }
        if incomparable {
            println!("incomparable: both directions fail");
        }
        if let Some(p) = &witness_path {
            println!("witness written to {p}");
        }
    }
    Ok(if forward.holds { 0 } else { 1 })
}

#[derive(Serialize)]
struct Step {
    first: usize,
    second: usize,
    #[serde(serialize_with = "serialize_rational")]
    lambda: Rational,
}

#[derive(Serialize)]
struct WitnessReport {
    dimension: usize,
    steps: Vec<Step>,
    class: &'static str,
    exact: bool,
    #[serde(serialize_with = "serialize_rational")]
    atom_mass: Rational,
    unbounded_tail: bool,
    matrix: Vec<Vec<String>>,
    witness_path: Option<String>,
}

pub fn witness(f_path: &Path, g_path: &Path, output: Option<&Path>, partition_out: Option<&Path>, json: bool) -> Outcome {
    let f = load_sfn(f_path)?.function;
    let g = load_sfn(g_path)?.function;
    let verdict = majorize(&f, &g)?;
    if !verdict.holds {
        eprintln!("no witness: f ≺ g {}", render::verdict(&verdict));
        return Ok(1);
    }
    let w = ds_witness(&f, &g)?;
    let exact = w.product.apply(&w.source_values)? == w.target_values;
    if !exact {
        return Err(Failure::Inconsistent("witness product does not map g to f".into()));
    }
    let class = w.product.classify().name();
    let atom_mass = w.source_partition.atoms().first().or(w.source_partition.tail_mass()).cloned();
    if let Some(path) = output {
        write(path, &write_matrix(&w.product))?;
    }
    if let Some(path) = partition_out {
        write(path, &write_partition(&w.source_partition))?;
    }
    if json {
        print_json(&WitnessReport {
            dimension: w.dimension(),
            steps: w
                .steps
                .iter()
                .map(|t| Step {
                    first: t.first,
                    second: t.second,
                    lambda: t.lambda.clone(),
                })
                .collect(),
            class,
            exact,
            atom_mass: atom_mass.unwrap_or_default(),
            unbounded_tail: w.source_partition.tail_mass().is_some(),
            matrix: rational_rows(&w.product),
            witness_path: output.map(|p| p.display().to_string()),
        })?;
        return Ok(0);
    }
    let mut summary = format!(
        "# dimension {}, {} T-transforms (at most {}), class {}\n",
        w.dimension(),
        w.steps.len(),
        w.dimension().saturating_sub(1),
        class
    );
    for t in &w.steps {
        summary.push_str(&format!("# T({}, {}) lambda = {}\n", t.first, t.second, t.lambda));
    }
    match output {
        Some(path) => {
            print!("{summary}");
            println!("# witness written to {}", path.display());
        }
        None => print!("{summary}{}", write_matrix(&w.product)),
    }
    Ok(0)
}

#[derive(Serialize)]
struct ClassifyReport {
    class: &'static str,
    rows: usize,
    cols: usize,
    #[serde(serialize_with = "serialize_rationals")]
    column_sums: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    row_sums: Vec<Rational>,
}

pub fn classify(path: &Path, json: bool) -> Outcome {
    let d = load_matrix(path)?;
    let class = d.classify().name();
    if json {
        print_json(&ClassifyReport {
            class,
            rows: d.rows(),
            cols: d.cols(),
            column_sums: d.column_sums(),
            row_sums: d.row_sums(),
        })?;
    } else {
        println!("{class}");
    }
    Ok(0)
}

#[derive(Serialize)]
struct OperatorReport {
    class: &'static str,
    #[serde(serialize_with = "serialize_rationals")]
    source_atoms: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    target_atoms: Vec<Rational>,
    values: Vec<Vec<String>>,
    #[serde(serialize_with = "serialize_rationals")]
    column_functionals: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    row_functionals: Vec<Rational>,
}

pub fn lift(partition: &Path, d: &Path, output: Option<&Path>, json: bool) -> Outcome {
    let p = load_partition(partition)?;
    let op = lift_operator(&p, &load_matrix(d)?)?;
    let class = op.classify().name();
    if let Some(path) = output {
        write(path, &write_matrix(op.values()))?;
    }
    if json {
        print_json(&OperatorReport {
            class,
            source_atoms: op.source().atoms().to_vec(),
            target_atoms: op.target().atoms().to_vec(),
            values: rational_rows(op.values()),
            column_functionals: op.column_functionals(),
            row_functionals: op.row_functionals(),
        })?;
    } else {
        println!("# class {class}");
        println!("# column functionals {}", joined(&op.column_functionals()));
        println!("# row functionals {}", joined(&op.row_functionals()));
        if output.is_none() {
            print!("{}", write_matrix(op.values()));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct KernelReport {
    class: &'static str,
    values: Vec<Vec<String>>,
    #[serde(serialize_with = "serialize_rationals")]
    column_integrals: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    row_integrals: Vec<Rational>,
}

pub fn kernel(partition: &Path, d: &Path, json: bool) -> Outcome {
    let p = load_partition(partition)?;
    let k = matrix_to_kernel(&p, &load_matrix(d)?)?;
    let class = k.classify().name();
    if json {
        print_json(&KernelReport {
            class,
            values: rational_rows(k.values()),
            column_integrals: k.column_integrals(),
            row_integrals: k.row_integrals(),
        })?;
    } else {
        println!("# class {class}");
        println!("# column integrals {}", joined(&k.column_integrals()));
        println!("# row integrals {}", joined(&k.row_integrals()));
        print!("{}", write_matrix(k.values()));
    }
    Ok(0)
}

/// The partition a matrix with `cols` columns acts on: an explicit file, the
/// alignment block of the input, or `cols` equal atoms on a finite space.
fn resolve_partition(explicit: Option<&Path>, doc: &SfnDocument, cols: usize) -> Result<Partition, Failure> {
    if let Some(path) = explicit {
        return load_partition(path);
    }
    if let Some(p) = &doc.partition {
        return Ok(p.clone());
    }
    match doc.function.total_measure() {
        ExtendedReal::Finite(t) if cols > 0 && t > &Rational::default() => {
            Ok(Partition::equal_mass(t / Rational::from_integer(cols.into()), cols, false)?)
        }
        _ => Err(Failure::Input(
            "cannot infer the partition on a space of infinite measure; pass --partition".into(),
        )),
    }
}

pub fn apply(d_path: &Path, f_path: &Path, partition: Option<&Path>, output: Option<&Path>) -> Outcome {
    let d = load_matrix(d_path)?;
    let doc = load_sfn(f_path)?;
    let p = resolve_partition(partition, &doc, d.cols())?;
    let op = lift_markov(&p, &d)?;
    let f = AlignedFunction::from_layout(&doc.function, op.source())?;
    let image = op.apply(&f)?.to_step()?;
    let text = format!("# operator class {}\n{}", op.classify().name(), write_step_function(&image));
    match output {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

/// `2^-a..2^-b`, a single `2^-a`, or a comma-separated list of rationals.
pub fn parse_delta_grid(spec: &str) -> Result<Vec<Rational>, Failure> {
    let bad = || Failure::Input(format!("--delta-grid: cannot parse `{spec}`"));
    let power = |t: &str| -> Result<u32, Failure> {
        t.trim().strip_prefix("2^-").and_then(|k| k.parse().ok()).filter(|k| *k < 64).ok_or_else(bad)
    };
    if spec.contains("2^-") {
        let (a, b) = match spec.split_once("..") {
            Some((a, b)) => (power(a)?, power(b)?),
            None => (power(spec)?, power(spec)?),
        };
        let ks: Vec<u32> = if a <= b { (a..=b).collect() } else { (b..=a).rev().collect() };
        return Ok(ks
            .into_iter()
            .map(|k| Rational::new(1.into(), (1u64 << k).into()))
            .collect());
    }
    spec.split(',')
        .map(|t| parse_rational(t.trim()).filter(|r| r >= &Rational::default()).ok_or_else(bad))
        .collect()
}

#[derive(Serialize)]
struct EquiOperator {
    path: String,
    class: &'static str,
    integral_preserved: bool,
}

#[derive(Serialize)]
struct EquiReport<'a> {
    source: String,
    #[serde(serialize_with = "serialize_rationals")]
    levels: Vec<Rational>,
    operators: Vec<EquiOperator>,
    reports: &'a [EquiIntegrabilityReport],
    all_within_bound: bool,
    timings: Option<Timings>,
}

pub fn equi(f_path: &Path, ops: &Path, delta_grid: &str, partition: Option<&Path>, json: bool, with_timings: bool) -> Outcome {
    let start = Instant::now();
    let deltas = parse_delta_grid(delta_grid)?;
    let doc = load_sfn(f_path)?;
    let f = &doc.function;
    let mut paths: Vec<_> = fs::read_dir(ops)
        .map_err(|e| Failure::Input(format!("{}: {e}", ops.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mat"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Input(format!("{}: no .mat files", ops.display())));
    }
    let mut family = Vec::with_capacity(paths.len());
    let mut operators = Vec::with_capacity(paths.len());
    for path in &paths {
        let d = load_matrix(path)?;
        let p = resolve_partition(partition, &doc, d.cols())?;
        let s = in_file(path, lift_operator(&p, &d))?;
        let image = s.apply(&in_file(path, AlignedFunction::from_layout(f, s.source()))?)?.to_step()?;
        operators.push(EquiOperator {
            path: path.display().to_string(),
            class: s.classify().name(),
            integral_preserved: image.integral() == f.integral(),
        });
        family.push(image);
    }
    let levels = default_levels(f);
    let reports = deltas
        .iter()
        .map(|delta| equi_modulus(&family, f, &levels, delta))
        .collect::<majo_core::Result<Vec<_>>>()?;
    let all_within_bound = reports.iter().all(|r| r.within_bound());
    let bounded = operators.iter().all(|o| o.integral_preserved);

    if json {
        print_json(&EquiReport {
            source: f_path.display().to_string(),
            levels,
            operators,
            reports: &reports,
            all_within_bound,
            timings: timings(start, with_timings),
        })?;
    } else {
        println!(
            "family of {} operators, integrals {}",
            operators.len(),
            if bounded { "preserved" } else { "NOT preserved" }
        );
        println!("{:<12} {:<16} {:<16} {:<10} within", "delta", "modulus", "bound", "best c");
        for r in &reports {
            println!(
                "{:<12} {:<16} {:<16} {:<10} {}",
                r.delta.to_string(),
                r.modulus.to_string(),
                r.bound.to_string(),
                r.best_level.to_string(),
                if r.within_bound() { "yes" } else { "NO" }
            );
        }
        println!("{}", if all_within_bound { "all within bound" } else { "bound violated" });
    }
    Ok(if all_within_bound && bounded { 0 } else { 3 })
}

pub fn selftest(seed: u64, cases: usize, json: bool) -> Outcome {
    let report = run_selftest(seed, cases);
    if json {
        print_json(&report)?;
    } else {
        println!("seed {seed}, {cases} cases per invariant");
        for c in &report.checks {
            println!("{}: {} passed, {} failed", c.name, c.passed, c.failed);
            if let Some(msg) = &c.first_failure {
                println!("  first failure: {msg}");
            }
        }
        println!("total: {} passed, {} failed", report.passed(), report.failed());
    }
    Ok(if report.failed() == 0 { 0 } else { 3 })
}
