//! Decision reports in human-readable and JSON form.

use gtes_union::decide::{CaseTag, Decision, Diagnostics, WhichTotal};
use gtes_union::oracle;
use gtes_union::{Gtes, Signature};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub union: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalityFlags {
    #[serde(rename = "E")]
    pub e: bool,
    #[serde(rename = "F")]
    pub f: bool,
    pub union: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub requested_height: usize,
    pub used_height: usize,
    pub counterexample: Option<[String; 2]>,
}

/// Machine-readable result of one decision run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: bool,
    pub main_case: CaseTag,
    pub n: usize,
    pub classes: ClassCounts,
    pub total: TotalityFlags,
    pub diagnostics: Option<Diagnostics>,
    pub oracle: Option<OracleReport>,
    pub millis: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum OracleCheckError {
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("oracle found a counterexample but the verdict was yes: {0} = {1}")]
    Contradiction(String, String),
}

impl Report {
    pub fn from_decision(decision: &Decision, millis: u64) -> Report {
        Report {
            verdict: decision.verdict.union_is_congruence,
            main_case: decision.verdict.case.tag,
            n: decision.sizes.n,
            classes: ClassCounts {
                e: decision.sizes.classes_e,
                f: decision.sizes.classes_f,
                union: decision.sizes.classes_union,
            },
            total: TotalityFlags {
                e: decision.total_e,
                f: decision.total_f,
                union: decision.total_u,
            },
            diagnostics: decision.verdict.diagnostics.clone(),
            oracle: None,
            millis,
        }
    }

    /// Cross-checks the verdict with the brute-force search, descending
    /// from the requested height while the term universe is over the cap.
    /// A counterexample against a yes verdict is an internal error.
    pub fn run_oracle_check(
        &mut self,
        sig: &Signature,
        e: &Gtes,
        f: &Gtes,
        max_height: usize,
    ) -> Result<(), OracleCheckError> {
        let (used_height, found) = oracle::counterexample_search_auto(sig, e, f, max_height)?;
        let counterexample = found.map(|(s, t)| [s.to_text(sig), t.to_text(sig)]);
        if self.verdict {
            if let Some([s, t]) = &counterexample {
                return Err(OracleCheckError::Contradiction(s.clone(), t.clone()));
            }
        }
        self.oracle = Some(OracleReport {
            requested_height: max_height,
            used_height,
            counterexample,
        });
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering.
    pub fn render_text(&self, which_total: WhichTotal, explain: bool) -> String {
        let mut out = String::new();
        let verdict = if self.verdict {
            "yes: the union of the two congruences is a congruence"
        } else {
            "no: the union of the two congruences is not a congruence"
        };
        out.push_str(verdict);
        out.push('\n');
        if self.verdict {
            out.push_str("witness: H = E u F generates the union\n");
        }
        out.push_str(&format!(
            "main case: {} (total: {})\n",
            self.main_case,
            match which_total {
                WhichTotal::E => "E",
                WhichTotal::F => "F",
                WhichTotal::Both => "both",
                WhichTotal::Neither => "neither",
            }
        ));
        out.push_str(&format!(
            "sizes: n={} classes E={} F={} union={}\n",
            self.n, self.classes.e, self.classes.f, self.classes.union
        ));
        out.push_str(&format!(
            "total: E={} F={} union={}\n",
            self.total.e, self.total.f, self.total.union
        ));
        if let Some(d) = &self.diagnostics {
            out.push_str(&render_diagnostics(d, explain));
        }
        if let Some(o) = &self.oracle {
            match &o.counterexample {
                Some([s, t]) => out.push_str(&format!(
                    "oracle: counterexample at height <= {}: {} and {} are joined by the union only\n",
                    o.used_height, s, t
                )),
                None => out.push_str(&format!(
                    "oracle: no counterexample up to height {}\n",
                    o.used_height
                )),
            }
            if o.used_height < o.requested_height {
                out.push_str(&format!(
                    "oracle: height lowered from {} to {} to fit the term cap\n",
                    o.requested_height, o.used_height
                ));
            }
        }
        out.push_str(&format!("elapsed: {} ms\n", self.millis));
        out
    }
}

fn render_diagnostics(d: &Diagnostics, explain: bool) -> String {
    match d {
        Diagnostics::VertexPair { start, witness } if start == witness => {
            format!("failure: union class {start} is a class of neither system\n")
        }
        Diagnostics::VertexPair { start, witness } => {
            let mut s = format!(
                "failure: class {witness}, reachable from class {start}, breaks the keeps-up condition\n"
            );
            if explain {
                s.push_str(
                    "  some union rule writing the witness class has argument classes whose \
                     per-system refinements are not all covered by rules of that system\n",
                );
            }
            s
        }
        Diagnostics::UnionClassSplit {
            class,
            num_e,
            num_f,
        } => format!(
            "failure: union class {class} splits into {num_e} E-classes and {num_f} F-classes\n"
        ),
        Diagnostics::EquationPair {
            e_equation,
            f_equation,
        } => {
            let mut s = String::from("failure: neither system includes the other\n");
            if let Some(eq) = e_equation {
                s.push_str(&format!("  E equation outside F's congruence: {eq}\n"));
            }
            if let Some(eq) = f_equation {
                s.push_str(&format!("  F equation outside E's congruence: {eq}\n"));
            }
            s
        }
    }
}
