//! Fast ground completion with fresh class constants: builds a reduced,
//! convergent flat rewrite system from a congruence closure, decides
//! totality, and answers the ground word problem via normal forms.

use std::collections::btree_map;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::closure::{congruence_closure, ClassName, Partition};
use crate::gtes::{build_dag, Equation, Gtes, SubtermDag, VertexRelation};
use crate::terms::{Signature, SymbolId, Term};

/// A congruence class viewed as a fresh constant of the extended signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassConstant {
    pub name: ClassName,
    pub cardinality: u32,
}

/// Left-hand side of a flat rule: a symbol applied to class constants.
/// The tuple ordering groups rules by symbol, which the totality check
/// relies on when scanning in key order.
pub type RuleLhs = (SymbolId, Vec<ClassName>);

/// Satellite data of a rule. The counters are only populated by the
/// three-way construction in [`crate::auxgraph`]; plain completion leaves
/// them at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleInfo {
    pub rhs: ClassName,
    pub counter_e: u32,
    pub counter_f: u32,
}

/// A flat ground rewrite system `sigma(a1,...,am) -> a` over class
/// constants, at most one rule per left-hand side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gtrs {
    rules: BTreeMap<RuleLhs, RuleInfo>,
}

impl Gtrs {
    pub fn new() -> Self {
        Gtrs::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, lhs: &RuleLhs) -> Option<&RuleInfo> {
        self.rules.get(lhs)
    }

    pub fn rhs(&self, lhs: &RuleLhs) -> Option<ClassName> {
        self.rules.get(lhs).map(|r| r.rhs)
    }

    pub fn contains(&self, lhs: &RuleLhs) -> bool {
        self.rules.contains_key(lhs)
    }

    /// Rules in key order: grouped by symbol, then by argument tuple.
    pub fn iter(&self) -> impl Iterator<Item = (&RuleLhs, &RuleInfo)> {
        self.rules.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&RuleLhs, &mut RuleInfo)> {
        self.rules.iter_mut()
    }

    /// Inserts unless a rule with this left-hand side exists; returns true
    /// when the rule is new.
    pub fn insert(&mut self, lhs: RuleLhs, rhs: ClassName) -> bool {
        match self.rules.entry(lhs) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(RuleInfo {
                    rhs,
                    ..RuleInfo::default()
                });
                true
            }
            btree_map::Entry::Occupied(existing) => {
                debug_assert_eq!(existing.get().rhs, rhs, "rule right-hand sides must agree");
                false
            }
        }
    }

    pub fn info_mut(&mut self, lhs: &RuleLhs) -> Option<&mut RuleInfo> {
        self.rules.get_mut(lhs)
    }

    /// Number of symbol occurrences over all rules, counting each class
    /// constant as one symbol.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|((_, args), _)| args.len() + 2).sum()
    }

    /// The transition backsteps: pairs (right-hand side, argument).
    pub fn bstep(&self) -> BStep {
        let mut pairs = BTreeSet::new();
        for ((_, args), info) in &self.rules {
            for &a in args {
                pairs.insert((info.rhs, a));
            }
        }
        BStep(pairs)
    }
}

/// Set of transition backsteps `(a, b)`: some rule has right-hand side `a`
/// and `b` among its arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BStep(pub BTreeSet<(ClassName, ClassName)>);

impl BStep {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Output of completing one vertex relation on a dag.
#[derive(Debug, Clone)]
pub struct Completion {
    pub partition: Partition,
    pub constants: Vec<ClassConstant>,
    pub rules: Gtrs,
    pub bstep: BStep,
}

pub(crate) fn class_constants(partition: &Partition) -> Vec<ClassConstant> {
    partition
        .classes()
        .map(|name| ClassConstant {
            name,
            cardinality: partition.cardinality(name),
        })
        .collect()
}

/// Completes the congruence closure of `tau` on `dag` into a reduced flat
/// rewrite system: for every vertex `x` labeled `sigma` the rule
/// `sigma(find(x/1),...,find(x/m)) -> find(x)` is added, deduplicated by
/// left-hand side.
pub fn complete(dag: &SubtermDag, tau: &VertexRelation) -> Completion {
    let partition = congruence_closure(dag, tau);
    let mut rules = Gtrs::new();
    for x in dag.vertices() {
        let lhs: RuleLhs = (
            dag.label(x),
            dag.children(x).iter().map(|&c| partition.find(c)).collect(),
        );
        rules.insert(lhs, partition.find(x));
    }
    let bstep = rules.bstep();
    Completion {
        constants: class_constants(&partition),
        partition,
        rules,
        bstep,
    }
}

/// Everything the fast ground completion produces for a pair `(e, f)`:
/// the shared dag, the vertex relations of both systems, and the
/// completion of `e` against the combined subterm set.
#[derive(Debug, Clone)]
pub struct FgcOutput {
    pub dag: SubtermDag,
    pub tau_e: VertexRelation,
    pub tau_f: VertexRelation,
    pub completion: Completion,
}

/// Fast ground completion introducing additional constants: builds the
/// subterm dag for `(e, f)`, closes the relation of `e` on it, and returns
/// the class constants, the rewrite system and its backsteps.
pub fn fgc(e: &Gtes, f: &Gtes) -> FgcOutput {
    let (dag, tau_e, tau_f) = build_dag(e, f);
    let completion = complete(&dag, &tau_e);
    FgcOutput {
        dag,
        tau_e,
        tau_f,
        completion,
    }
}

/// Decides whether the rewrite system is total: every symbol applied to
/// every tuple of class constants has a rule. False immediately when some
/// signature symbol does not occur in the systems or when there are no
/// rules; otherwise a per-symbol rule count is compared against
/// `|C|^arity`, computed with an early exit so the product cannot
/// overflow.
pub fn is_total(sig: &Signature, flag: bool, constants: &[ClassConstant], rules: &Gtrs) -> bool {
    if !flag || rules.is_empty() {
        return false;
    }
    let class_count = constants.len() as u64;
    let mut counts = vec![0u64; sig.len()];
    for ((symbol, _), _) in rules.iter() {
        counts[*symbol] += 1;
    }
    for symbol in sig.symbols() {
        let count = counts[symbol];
        let mut product = 1u64;
        for _ in 0..sig.arity(symbol) {
            product *= class_count;
            if product > count {
                return false;
            }
        }
        if count < product {
            return false;
        }
    }
    true
}

/// A term over the signature extended with class constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtTerm {
    Class(ClassName),
    App(SymbolId, Vec<ExtTerm>),
}

impl ExtTerm {
    pub fn from_term(t: &Term) -> ExtTerm {
        ExtTerm::App(
            t.symbol(),
            t.children().iter().map(ExtTerm::from_term).collect(),
        )
    }

    pub fn size(&self) -> usize {
        match self {
            ExtTerm::Class(_) => 1,
            ExtTerm::App(_, children) => 1 + children.iter().map(ExtTerm::size).sum::<usize>(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompletionError {
    /// The defensive rewrite budget was exhausted; the systems produced by
    /// completion are convergent, so this signals an internal bug.
    #[error("rewrite step budget exceeded after {0} steps")]
    StepBudgetExceeded(usize),
}

/// The unique normal form of `t` under a convergent flat system: children
/// are normalized first and a rule fires once all of them are class
/// constants. Class constants themselves are irreducible.
pub fn normal_form(rules: &Gtrs, t: &ExtTerm) -> Result<ExtTerm, CompletionError> {
    let budget = 10 * t.size() * (rules.len() + 1);
    let mut steps = 0usize;
    nf(rules, t, budget, &mut steps)
}

fn nf(
    rules: &Gtrs,
    t: &ExtTerm,
    budget: usize,
    steps: &mut usize,
) -> Result<ExtTerm, CompletionError> {
    match t {
        ExtTerm::Class(_) => Ok(t.clone()),
        ExtTerm::App(symbol, children) => {
            let mut normed = Vec::with_capacity(children.len());
            let mut classes = Some(Vec::with_capacity(children.len()));
            for c in children {
                let n = nf(rules, c, budget, steps)?;
                if let (ExtTerm::Class(name), Some(cs)) = (&n, classes.as_mut()) {
                    cs.push(*name);
                } else {
                    classes = None;
                }
                normed.push(n);
            }
            if let Some(classes) = classes {
                if let Some(rhs) = rules.rhs(&(*symbol, classes)) {
                    *steps += 1;
                    if *steps > budget {
                        return Err(CompletionError::StepBudgetExceeded(*steps));
                    }
                    return Ok(ExtTerm::Class(rhs));
                }
            }
            Ok(ExtTerm::App(*symbol, normed))
        }
    }
}

/// Decides `s <->*_e t` by completing `e` against `f` enlarged with the
/// trivial equations `s = s` and `t = t`, which puts every subterm of `s`
/// and `t` into the shared subterm set without changing the congruence.
pub fn word_problem(e: &Gtes, f: &Gtes, s: &Term, t: &Term) -> bool {
    let mut widened = f.clone();
    widened.insert(Equation::new(s.clone(), s.clone()));
    widened.insert(Equation::new(t.clone(), t.clone()));
    let out = fgc(e, &widened);
    let nf_s = normal_form(&out.completion.rules, &ExtTerm::from_term(s))
        .expect("completion output is convergent");
    let nf_t = normal_form(&out.completion.rules, &ExtTerm::from_term(t))
        .expect("completion output is convergent");
    nf_s == nf_t
}
