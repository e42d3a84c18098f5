//! Problem file format:
//!
//! ```text
//! signature
//!   f 2
//!   # 0
//! equations E
//!   f(#, #) = #
//! equations F
//!   ...
//! ```
//!
//! Lines beginning with `//` are comments, blank lines are ignored, and
//! the three section headers are the exact keywords shown. `HOLE` is
//! reserved and cannot be declared.

use gtes_union::gtes::Equation;
use gtes_union::terms::{parse_term, SignatureError, TermParseError};
use gtes_union::{Gtes, Signature};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("line {line}: expected `{expected}`")]
    ExpectedSection { line: usize, expected: &'static str },
    #[error("line {line}: malformed symbol declaration `{text}` (expected `name arity`)")]
    BadDeclaration { line: usize, text: String },
    #[error("line {line}: symbol name `HOLE` is reserved")]
    ReservedName { line: usize },
    #[error("line {line}: duplicate symbol `{name}`")]
    DuplicateSymbol { line: usize, name: String },
    #[error("line {line}: invalid symbol name `{name}`")]
    InvalidName { line: usize, name: String },
    #[error("signature declares no constants")]
    NoConstants,
    #[error("line {line}: expected `lhs = rhs`")]
    BadEquation { line: usize },
    #[error("line {line}: {source}")]
    Term { line: usize, source: TermParseError },
}

/// A parsed and validated problem instance.
#[derive(Debug, Clone)]
pub struct Problem {
    pub signature: Signature,
    pub e: Gtes,
    pub f: Gtes,
    /// Duplicate equations dropped during parsing; reported as a warning.
    pub duplicates: usize,
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("//"))
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let end_line = text.lines().count() + 1;
    let mut lines = meaningful_lines(text).peekable();

    match lines.next() {
        Some((_, "signature")) => {}
        Some((line, _)) => {
            return Err(ProblemError::ExpectedSection {
                line,
                expected: "signature",
            })
        }
        None => {
            return Err(ProblemError::ExpectedSection {
                line: 1,
                expected: "signature",
            })
        }
    }

    let mut decls: Vec<(String, usize)> = Vec::new();
    let mut decl_lines: Vec<usize> = Vec::new();
    while let Some(&(line, text)) = lines.peek() {
        if text.starts_with("equations") {
            break;
        }
        lines.next();
        let mut parts = text.split_whitespace();
        let (name, arity) = match (parts.next(), parts.next(), parts.next()) {
            (Some(name), Some(arity), None) => (name, arity),
            _ => {
                return Err(ProblemError::BadDeclaration {
                    line,
                    text: text.to_string(),
                })
            }
        };
        if name == "HOLE" {
            return Err(ProblemError::ReservedName { line });
        }
        let arity: usize = arity.parse().map_err(|_| ProblemError::BadDeclaration {
            line,
            text: text.to_string(),
        })?;
        decls.push((name.to_string(), arity));
        decl_lines.push(line);
    }

    let signature = Signature::new(decls.clone()).map_err(|err| match err {
        SignatureError::NoConstants => ProblemError::NoConstants,
        SignatureError::DuplicateSymbol(name) => {
            let line = decl_line_of(&decls, &decl_lines, &name);
            ProblemError::DuplicateSymbol { line, name }
        }
        SignatureError::InvalidName(name) => {
            let line = decl_line_of(&decls, &decl_lines, &name);
            ProblemError::InvalidName { line, name }
        }
    })?;

    let mut duplicates = 0;
    let e = parse_equation_section(
        &mut lines,
        "equations E",
        &signature,
        &mut duplicates,
        end_line,
    )?;
    let f = parse_equation_section(
        &mut lines,
        "equations F",
        &signature,
        &mut duplicates,
        end_line,
    )?;

    Ok(Problem {
        signature,
        e,
        f,
        duplicates,
    })
}

fn decl_line_of(decls: &[(String, usize)], lines: &[usize], name: &str) -> usize {
    decls
        .iter()
        .zip(lines)
        .rev()
        .find(|((n, _), _)| n == name)
        .map(|(_, &l)| l)
        .unwrap_or(1)
}

fn parse_equation_section<'a, I>(
    lines: &mut std::iter::Peekable<I>,
    header: &'static str,
    sig: &Signature,
    duplicates: &mut usize,
    end_line: usize,
) -> Result<Gtes, ProblemError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    match lines.next() {
        Some((_, text)) if text == header => {}
        Some((line, _)) => {
            return Err(ProblemError::ExpectedSection {
                line,
                expected: header,
            })
        }
        None => {
            return Err(ProblemError::ExpectedSection {
                line: end_line,
                expected: header,
            })
        }
    }
    let mut gtes = Gtes::new();
    while let Some(&(line, text)) = lines.peek() {
        if text.starts_with("equations") {
            break;
        }
        lines.next();
        let mut sides = text.splitn(2, '=');
        let (lhs, rhs) = match (sides.next(), sides.next()) {
            (Some(l), Some(r)) if !l.trim().is_empty() && !r.trim().is_empty() => (l, r),
            _ => return Err(ProblemError::BadEquation { line }),
        };
        let lhs = parse_term(sig, lhs).map_err(|source| ProblemError::Term { line, source })?;
        let rhs = parse_term(sig, rhs).map_err(|source| ProblemError::Term { line, source })?;
        if !gtes.insert(Equation::new(lhs, rhs)) {
            *duplicates += 1;
        }
    }
    Ok(gtes)
}
