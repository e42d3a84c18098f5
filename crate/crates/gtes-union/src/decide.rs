//! Main-case classification and the four decision procedures for whether
//! the congruence generated by the union of two systems equals the union
//! of their congruences.

use serde::{Deserialize, Serialize};

use crate::auxgraph::{cad, AuxGraph, Cad, IncMaps};
use crate::closure::{ClassName, Partition};
use crate::completion::is_total;
use crate::gtes::{Gtes, SubtermDag, VertexRelation};
use crate::terms::Signature;

/// Which of the four main cases an instance falls in. A unary signature is
/// always handled by the nested search, regardless of totality; the two
/// higher-arity cases are split by how many of the completed systems are
/// total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    Unary,
    BothTotal,
    OneTotalHigherArity,
    NoneTotalHigherArity,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::Unary => "Unary",
            CaseTag::BothTotal => "BothTotal",
            CaseTag::OneTotalHigherArity => "OneTotalHigherArity",
            CaseTag::NoneTotalHigherArity => "NoneTotalHigherArity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WhichTotal {
    E,
    F,
    Both,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainCase {
    pub tag: CaseTag,
    pub which_total: WhichTotal,
}

/// Classifies an instance from its signature shape and the totality of the
/// two completed systems.
pub fn classify(sig: &Signature, total_e: bool, total_f: bool) -> MainCase {
    let which_total = match (total_e, total_f) {
        (true, true) => WhichTotal::Both,
        (true, false) => WhichTotal::E,
        (false, true) => WhichTotal::F,
        (false, false) => WhichTotal::Neither,
    };
    let tag = if sig.is_unary() {
        CaseTag::Unary
    } else if total_e && total_f {
        CaseTag::BothTotal
    } else if total_e || total_f {
        CaseTag::OneTotalHigherArity
    } else {
        CaseTag::NoneTotalHigherArity
    };
    MainCase { tag, which_total }
}

/// Structured failure evidence attached to a "no" verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Diagnostics {
    /// A search found vertex `witness` reachable from `start` violating the
    /// relevant attribute; `start == witness` when `start` itself fails
    /// both equality attributes.
    VertexPair {
        start: ClassName,
        witness: ClassName,
    },
    /// A union class that is neither a class of `E` nor of `F`.
    UnionClassSplit {
        class: ClassName,
        num_e: u32,
        num_f: u32,
    },
    /// First equation of each system falling outside the other system's
    /// congruence.
    EquationPair {
        e_equation: Option<String>,
        f_equation: Option<String>,
    },
}

/// Stamp-based scratch marks for one search session over the graph.
struct SessionMarks {
    stamp: Vec<u32>,
    current: u32,
}

impl SessionMarks {
    fn new(n: usize) -> Self {
        SessionMarks {
            stamp: vec![0; n],
            current: 0,
        }
    }

    fn begin(&mut self) {
        self.current += 1;
    }

    /// Marks a vertex; returns false if already visited in this session.
    fn visit(&mut self, v: ClassName) -> bool {
        let slot = &mut self.stamp[(v - 1) as usize];
        if *slot == self.current {
            false
        } else {
            *slot = self.current;
            true
        }
    }
}

/// One inner search session: checks that every vertex positive-step
/// reachable from `a` satisfies `flags`. Each vertex is visited at most
/// once per session; returns the first violating vertex otherwise.
fn session_all(
    g: &AuxGraph,
    a: ClassName,
    flags: &[bool],
    marks: &mut SessionMarks,
) -> Option<ClassName> {
    marks.begin();
    let mut stack: Vec<ClassName> = g.successors(a).to_vec();
    while let Some(b) = stack.pop() {
        if !marks.visit(b) {
            continue;
        }
        if !flags[(b - 1) as usize] {
            return Some(b);
        }
        stack.extend(g.successors(b));
    }
    None
}

fn npdfs_diag(g: &AuxGraph) -> Option<Diagnostics> {
    let mut marks = SessionMarks::new(g.vertex_count());
    for a in g.vertices() {
        if !g.equal_e(a) && !g.equal_f(a) {
            return Some(Diagnostics::VertexPair {
                start: a,
                witness: a,
            });
        }
        let mut witness = None;
        if g.equal_e(a) {
            witness = session_all(g, a, &g.keeps_e, &mut marks);
            if witness.is_none() {
                continue;
            }
        }
        if g.equal_f(a) {
            witness = session_all(g, a, &g.keeps_f, &mut marks);
            if witness.is_none() {
                continue;
            }
        }
        let witness = witness.expect("one branch was attempted");
        return Some(Diagnostics::VertexPair { start: a, witness });
    }
    None
}

/// Nested partial depth-first search for the unary case: true iff every
/// vertex `a` either is an `E` class and everything positive-step
/// reachable from it keeps up on the `E` side, or the same with `F`.
/// Early-exits on the first failing vertex; the outer loop treats each
/// vertex once, the inner sessions visit each vertex at most once per
/// session, so the worst case is quadratic in the graph size.
pub fn npdfs(g: &AuxGraph) -> bool {
    npdfs_diag(g).is_none()
}

fn case2_diag(inc: &IncMaps) -> Option<Diagnostics> {
    for (i, (&ne, &nf)) in inc.num_e.iter().zip(&inc.num_f).enumerate() {
        if ne != 1 && nf != 1 {
            return Some(Diagnostics::UnionClassSplit {
                class: (i + 1) as ClassName,
                num_e: ne,
                num_f: nf,
            });
        }
    }
    None
}

/// Both-total case: true iff every union class is a class of one of the
/// two systems, read off the inclusion counts.
pub fn case2_check(inc: &IncMaps) -> bool {
    case2_diag(inc).is_none()
}

fn pdfs_diag(g: &AuxGraph) -> Option<Diagnostics> {
    for a in g.vertices() {
        if !g.equal_e(a) && !g.equal_f(a) {
            return Some(Diagnostics::VertexPair {
                start: a,
                witness: a,
            });
        }
    }
    let mut visited = vec![false; g.vertex_count()];
    for a in g.vertices() {
        if g.equal_e(a) || visited[(a - 1) as usize] {
            continue;
        }
        // The session start is deliberately not marked: a cycle back to
        // `a` revisits it and tests its own keeps attribute.
        let mut stack: Vec<ClassName> = Vec::new();
        for &b in g.successors(a) {
            if !visited[(b - 1) as usize] {
                stack.push(b);
            }
        }
        while let Some(b) = stack.pop() {
            if visited[(b - 1) as usize] {
                continue;
            }
            visited[(b - 1) as usize] = true;
            if !g.keeps_f(b) {
                return Some(Diagnostics::VertexPair {
                    start: a,
                    witness: b,
                });
            }
            for &c in g.successors(b) {
                if !visited[(c - 1) as usize] {
                    stack.push(c);
                }
            }
        }
    }
    None
}

/// Partial depth-first search for the one-total case, stated for a total
/// `E` side (the caller swaps roles otherwise): false if some vertex is a
/// class of neither system; otherwise true iff every vertex positive-step
/// reachable from a vertex that is not an `E` class keeps up on the `F`
/// side. Visits each vertex at most once overall, so it runs in linear
/// time.
pub fn pdfs(g: &AuxGraph) -> bool {
    pdfs_diag(g).is_none()
}

fn case4_diag(
    sig: &Signature,
    dag: &SubtermDag,
    tau_e: &VertexRelation,
    tau_f: &VertexRelation,
    rho_e: &Partition,
    rho_f: &Partition,
) -> Option<Diagnostics> {
    let first_split = |tau: &VertexRelation, rho: &Partition| {
        tau.iter()
            .find(|(u, v)| rho.find(*u) != rho.find(*v))
            .map(|&(u, v)| format!("{} = {}", dag.hat(u).display(sig), dag.hat(v).display(sig)))
    };
    let e_equation = first_split(tau_e, rho_f)?;
    let f_equation = first_split(tau_f, rho_e)?;
    Some(Diagnostics::EquationPair {
        e_equation: Some(e_equation),
        f_equation: Some(f_equation),
    })
}

/// Neither-total case: true iff all equations of `E` are inside the
/// congruence of `F` or all equations of `F` are inside the congruence of
/// `E`, decided by comparing class names of the equation sides.
pub fn case4_check(
    tau_e: &VertexRelation,
    tau_f: &VertexRelation,
    rho_e: &Partition,
    rho_f: &Partition,
) -> bool {
    let e_included = tau_e.iter().all(|&(u, v)| rho_f.same(u, v));
    let f_included = tau_f.iter().all(|&(u, v)| rho_e.same(u, v));
    e_included || f_included
}

/// The verdict: whether the union of the two generated congruences is a
/// congruence, along with the case that decided it and failure evidence
/// for "no" answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub union_is_congruence: bool,
    pub case: MainCase,
    pub diagnostics: Option<Diagnostics>,
}

/// Derived sizes exposed for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSizes {
    pub n: usize,
    pub subterms: usize,
    pub classes_e: usize,
    pub classes_f: usize,
    pub classes_union: usize,
}

/// Full output of a decision run, including the constructed data for
/// reporting and cross-checks.
#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: Verdict,
    pub cad: Cad,
    pub total_e: bool,
    pub total_f: bool,
    pub total_u: bool,
    pub sizes: InstanceSizes,
}

/// Runs the whole pipeline: three-way completion, totality, classification
/// and the matching case procedure.
pub fn decide_union(sig: &Signature, e: &Gtes, f: &Gtes) -> Decision {
    let cad = cad(sig, e, f);
    let total_e = is_total(sig, cad.flag, &cad.const_e, &cad.rules_e);
    let total_f = is_total(sig, cad.flag, &cad.const_f, &cad.rules_f);
    let total_u = is_total(sig, cad.flag, &cad.const_u, &cad.rules_u);
    let case = classify(sig, total_e, total_f);

    let diagnostics = match case.tag {
        CaseTag::Unary => npdfs_diag(&cad.aux),
        CaseTag::BothTotal => case2_diag(&cad.inc),
        CaseTag::OneTotalHigherArity => {
            if total_e {
                pdfs_diag(&cad.aux)
            } else {
                pdfs_diag(&cad.aux.swapped())
            }
        }
        CaseTag::NoneTotalHigherArity => case4_diag(
            sig, &cad.dag, &cad.tau_e, &cad.tau_f, &cad.rho_e, &cad.rho_f,
        ),
    };

    let sizes = InstanceSizes {
        n: e.size() + f.size(),
        subterms: cad.dag.len(),
        classes_e: cad.rho_e.class_count(),
        classes_f: cad.rho_f.class_count(),
        classes_union: cad.rho_u.class_count(),
    };
    Decision {
        verdict: Verdict {
            union_is_congruence: diagnostics.is_none(),
            case,
            diagnostics,
        },
        cad,
        total_e,
        total_f,
        total_u,
        sizes,
    }
}
