//! Text formats.
//!
//! Step functions (`.sfn`):
//!
//! ```text
//! # comment
//! total inf            # or a rational such as 5/2
//! 3 1                  # <value> <mass>, in any order
//! 1/2 1
//! partition 1 1        # optional alignment block
//! tail 1 x inf         # optional: <mass> x <count|inf>
//! ```
//!
//! Matrices (`.mat`): a `rows cols` header followed by the entries in
//! row-major order, separated by any whitespace. Partition files hold only the
//! `partition` and `tail` lines of an alignment block.

use std::fmt::Write as _;

use num::Signed;

use crate::error::{Error, Result};
use crate::operators::{OperatorMatrix, Partition};
use crate::rational::{parse_rational, ExtendedReal, Rational};
use crate::step::StepFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            token: self.text.to_string(),
            message: message.into(),
        }
    }

    fn rational(&self) -> Result<Rational> {
        parse_rational(self.text).ok_or_else(|| self.error("expected a rational `p/q` or an integer"))
    }

    fn positive(&self) -> Result<Rational> {
        let r = self.rational()?;
        if !r.is_positive() {
            return Err(self.error("mass must be positive"));
        }
        Ok(r)
    }
}

/// Non-empty lines with comments removed, split into tokens with 1-based
/// line and column positions.
fn lines(text: &str) -> Vec<Vec<Token<'_>>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (byte, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(byte),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &body[s..byte],
                            line: i + 1,
                            column: body[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            (!tokens.is_empty()).then_some(tokens)
        })
        .collect()
}

fn end_of_input(text: &str, message: &str) -> Error {
    Error::Parse {
        line: text.lines().count() + 1,
        column: 1,
        token: String::new(),
        message: message.into(),
    }
}

fn expect_len(line: &[Token<'_>], n: usize, what: &str) -> Result<()> {
    if line.len() > n {
        return Err(line[n].error(format!("unexpected token after {what}")));
    }
    if line.len() < n {
        let last = &line[line.len() - 1];
        return Err(Error::Parse {
            line: last.line,
            column: last.column + last.text.chars().count(),
            token: String::new(),
            message: format!("incomplete {what}"),
        });
    }
    Ok(())
}

/// Accumulates `partition` and `tail` lines.
#[derive(Default)]
struct PartitionBuilder<'a> {
    atoms: Vec<Rational>,
    tail: Option<Rational>,
    seen: Option<Token<'a>>,
    tail_seen: bool,
}

impl<'a> PartitionBuilder<'a> {
    /// Returns false when the line is not part of an alignment block.
    fn accept(&mut self, line: &[Token<'a>]) -> Result<bool> {
        match line[0].text {
            "partition" => {
                if self.tail_seen {
                    return Err(line[0].error("`partition` after the `tail` line"));
                }
                self.seen.get_or_insert_with(|| line[0].clone());
                for t in &line[1..] {
                    self.atoms.push(t.positive()?);
                }
                Ok(true)
            }
            "tail" => {
                if self.tail_seen {
                    return Err(line[0].error("more than one `tail` line"));
                }
                expect_len(line, 4, "`tail <mass> x <count|inf>`")?;
                let mass = line[1].positive()?;
                if line[2].text != "x" {
                    return Err(line[2].error("expected `x`"));
                }
                if line[3].text == "inf" {
                    self.tail = Some(mass);
                } else {
                    let count: usize = line[3]
                        .text
                        .parse()
                        .map_err(|_| line[3].error("expected an atom count or `inf`"))?;
                    self.atoms.extend(std::iter::repeat_n(mass, count));
                }
                self.seen.get_or_insert_with(|| line[0].clone());
                self.tail_seen = true;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn build(self) -> Result<Option<(Partition, Token<'a>)>> {
        match self.seen {
            None => Ok(None),
            Some(at) => {
                let p = Partition::new(self.atoms, self.tail).map_err(|e| at.error(e.to_string()))?;
                Ok(Some((p, at)))
            }
        }
    }
}

/// A parsed `.sfn` file: the function and its optional alignment partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfnDocument {
    pub function: StepFunction,
    pub partition: Option<Partition>,
}

pub fn parse_sfn(text: &str) -> Result<SfnDocument> {
    let lines = lines(text);
    let mut iter = lines.iter();
    let header = iter.next().ok_or_else(|| end_of_input(text, "missing `total` line"))?;
    if header[0].text != "total" {
        return Err(header[0].error("first line must be `total <rational>|inf`"));
    }
    expect_len(header, 2, "`total` line")?;
    let total = ExtendedReal::parse(header[1].text)
        .ok_or_else(|| header[1].error("expected a rational or `inf`"))?;
    if total.finite().is_some_and(|t| t.is_negative()) {
        return Err(header[1].error("total measure must be nonnegative"));
    }

    let mut raw = Vec::new();
    let mut block = PartitionBuilder::default();
    for line in iter {
        if block.accept(line)? {
            continue;
        }
        if block.seen.is_some() {
            return Err(line[0].error("piece after the alignment block"));
        }
        expect_len(line, 2, "`<value> <mass>` line")?;
        let value = line[0].rational()?;
        if !total.is_finite() && value.is_negative() {
            return Err(line[0].error("negative value on a space of infinite measure"));
        }
        raw.push((value, line[1].positive()?));
    }
    let function = StepFunction::canonicalize(raw, total.clone()).map_err(|e| header[1].error(e.to_string()))?;
    let partition = match block.build()? {
        None => None,
        Some((p, at)) => {
            if p.total_measure() != total {
                return Err(at.error(format!(
                    "partition covers {}, but the total measure is {}",
                    p.total_measure(),
                    total
                )));
            }
            Some(p)
        }
    };
    Ok(SfnDocument { function, partition })
}

pub fn parse_step_function(text: &str) -> Result<StepFunction> {
    parse_sfn(text).map(|d| d.function)
}

/// A file holding only `partition` and `tail` lines.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let lines = lines(text);
    let mut block = PartitionBuilder::default();
    for line in &lines {
        if !block.accept(line)? {
            return Err(line[0].error("expected `partition` or `tail`"));
        }
    }
    block
        .build()?
        .map(|(p, _)| p)
        .ok_or_else(|| end_of_input(text, "missing `partition` line"))
}

pub fn parse_matrix(text: &str) -> Result<OperatorMatrix> {
    let lines = lines(text);
    let mut iter = lines.iter();
    let header = iter.next().ok_or_else(|| end_of_input(text, "missing `rows cols` header"))?;
    expect_len(header, 2, "`rows cols` header")?;
    let dim = |t: &Token<'_>| t.text.parse::<usize>().map_err(|_| t.error("expected a dimension"));
    let (rows, cols) = (dim(&header[0])?, dim(&header[1])?);
    let mut entries = Vec::with_capacity(rows * cols);
    for t in iter.flatten() {
        if entries.len() == rows * cols {
            return Err(t.error(format!("more than {} entries", rows * cols)));
        }
        let v = t.rational()?;
        if v.is_negative() {
            return Err(t.error("matrix entries must be nonnegative"));
        }
        entries.push(v);
    }
    if entries.len() < rows * cols {
        return Err(end_of_input(
            text,
            &format!("expected {} entries, found {}", rows * cols, entries.len()),
        ));
    }
    OperatorMatrix::new(rows, cols, entries)
}

pub fn write_step_function(f: &StepFunction) -> String {
    let mut out = format!("total {}\n", f.total_measure());
    for p in f.pieces() {
        let _ = writeln!(out, "{} {}", p.value, p.mass);
    }
    out
}

pub fn write_partition(p: &Partition) -> String {
    let mut out = String::from("partition");
    for m in p.atoms() {
        let _ = write!(out, " {m}");
    }
    out.push('\n');
    if let Some(t) = p.tail_mass() {
        let _ = writeln!(out, "tail {t} x inf");
    }
    out
}

pub fn write_sfn(doc: &SfnDocument) -> String {
    let mut out = write_step_function(&doc.function);
    if let Some(p) = &doc.partition {
        out.push_str(&write_partition(p));
    }
    out
}

pub fn write_matrix(m: &OperatorMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
