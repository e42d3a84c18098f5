//! The bundled regression corpus: eight worked instances, four decided
//! yes and four decided no, covering every main case.

use gtes_union::decide::CaseTag;
use gtes_union::decide_union;

use crate::problem::{parse_problem, Problem, ProblemError};
use crate::report::OracleCheckError;

pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
    pub expected_verdict: bool,
    pub expected_case: CaseTag,
}

pub const CORPUS: [CorpusEntry; 8] = [
    CorpusEntry {
        name: "ex1",
        text: include_str!("../corpus/ex1.gtes"),
        expected_verdict: true,
        expected_case: CaseTag::Unary,
    },
    CorpusEntry {
        name: "ex2",
        text: include_str!("../corpus/ex2.gtes"),
        expected_verdict: false,
        expected_case: CaseTag::Unary,
    },
    CorpusEntry {
        name: "ex3",
        text: include_str!("../corpus/ex3.gtes"),
        expected_verdict: true,
        expected_case: CaseTag::BothTotal,
    },
    CorpusEntry {
        name: "ex4",
        text: include_str!("../corpus/ex4.gtes"),
        expected_verdict: false,
        expected_case: CaseTag::BothTotal,
    },
    CorpusEntry {
        name: "ex5",
        text: include_str!("../corpus/ex5.gtes"),
        expected_verdict: false,
        expected_case: CaseTag::OneTotalHigherArity,
    },
    CorpusEntry {
        name: "ex6",
        text: include_str!("../corpus/ex6.gtes"),
        expected_verdict: true,
        expected_case: CaseTag::OneTotalHigherArity,
    },
    CorpusEntry {
        name: "ex7",
        text: include_str!("../corpus/ex7.gtes"),
        expected_verdict: true,
        expected_case: CaseTag::NoneTotalHigherArity,
    },
    CorpusEntry {
        name: "ex8",
        text: include_str!("../corpus/ex8.gtes"),
        expected_verdict: false,
        expected_case: CaseTag::NoneTotalHigherArity,
    },
];

pub fn parse_entry(entry: &CorpusEntry) -> Result<Problem, ProblemError> {
    parse_problem(entry.text)
}

#[derive(Debug)]
pub struct CorpusResult {
    pub name: &'static str,
    pub verdict: bool,
    pub case: CaseTag,
    pub matches: bool,
    pub oracle_disagreement: bool,
}

#[derive(Debug)]
pub struct CorpusSummary {
    pub results: Vec<CorpusResult>,
    pub matched: usize,
    pub oracle_disagreements: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{name}: {source}")]
    Parse {
        name: &'static str,
        source: ProblemError,
    },
    #[error("{name}: {source}")]
    Oracle {
        name: &'static str,
        source: OracleCheckError,
    },
}

/// Runs the whole corpus, optionally cross-checking each verdict against
/// the brute-force search at the given height bound.
pub fn run_corpus(oracle_check: bool, max_height: usize) -> Result<CorpusSummary, CorpusError> {
    let mut results = Vec::new();
    let mut matched = 0;
    let mut oracle_disagreements = 0;
    for entry in &CORPUS {
        let p = parse_entry(entry).map_err(|source| CorpusError::Parse {
            name: entry.name,
            source,
        })?;
        let d = decide_union(&p.signature, &p.e, &p.f);
        let verdict = d.verdict.union_is_congruence;
        let case = d.verdict.case.tag;
        let matches = verdict == entry.expected_verdict && case == entry.expected_case;
        if matches {
            matched += 1;
        }
        let mut oracle_disagreement = false;
        if oracle_check {
            let (_, found) = gtes_union::oracle::counterexample_search_auto(
                &p.signature,
                &p.e,
                &p.f,
                max_height,
            )
            .map_err(|source| CorpusError::Oracle {
                name: entry.name,
                source: OracleCheckError::Oracle(source),
            })?;
            // A counterexample refutes a yes verdict; a missing one within
            // the bound never refutes a no verdict.
            oracle_disagreement = verdict && found.is_some();
            if oracle_disagreement {
                oracle_disagreements += 1;
            }
        }
        results.push(CorpusResult {
            name: entry.name,
            verdict,
            case,
            matches,
            oracle_disagreement,
        });
    }
    Ok(CorpusSummary {
        results,
        matched,
        oracle_disagreements,
    })
}
