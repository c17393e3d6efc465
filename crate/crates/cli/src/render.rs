//! Plain-text rendering of verdicts and certificates.

use majo_core::majorization::{Evaluation, Probe};
use majo_core::{Certificate, MajorizationVerdict, Relation};

pub fn probe(p: &Probe) -> String {
    match p {
        Probe::Level { s } => format!("s = {s}"),
        Probe::Threshold { u } => format!("u = {u}"),
        Probe::Sublinear { alpha, beta } => format!("alpha = {alpha}, beta = {beta}"),
        Probe::Total => "total integrals".to_string(),
    }
}

fn violation(e: &Evaluation) -> String {
    let op = if matches!(e.probe, Probe::Total) { "!=" } else { ">" };
    format!("{}: {} {op} {}", probe(&e.probe), e.lhs, e.rhs)
}

pub fn verdict(v: &MajorizationVerdict) -> String {
    match &v.certificate {
        Certificate::Violation(e) => format!("fails at {}", violation(e)),
        Certificate::Checked(list) => format!("holds ({} probes checked)", list.len()),
    }
}

pub fn relation(r: Relation, left: &str, right: &str) -> String {
    match r {
        Relation::Weak => format!("{left} ≺_w {right}"),
        Relation::Strong => format!("{left} ≺ {right}"),
    }
}
