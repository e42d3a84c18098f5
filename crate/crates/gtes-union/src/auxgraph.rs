//! Three-way completion and the auxiliary graph the decision searches run
//! on: one shared subterm dag, the closures of both systems and of their
//! union, inclusion counts between class systems, per-rule match counters,
//! and per-vertex equality/keeps-up attributes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::closure::{congruence_closure, ClassName, Partition};
use crate::completion::{class_constants, ClassConstant, Gtrs, RuleLhs};
use crate::gtes::{build_dag, signature_flag, Gtes, SubtermDag, VertexRelation};
use crate::terms::{Signature, SymbolId};

/// Inclusions between the union's classes and each system's classes.
/// `num_e[a-1]` is the number of classes of the `E` system contained in
/// union class `a`; it is 1 exactly when the union class is itself an
/// `E` class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IncMaps {
    pub inc_e: BTreeSet<(ClassName, ClassName)>,
    pub inc_f: BTreeSet<(ClassName, ClassName)>,
    pub num_e: Vec<u32>,
    pub num_f: Vec<u32>,
}

impl IncMaps {
    pub fn num_e(&self, a: ClassName) -> u32 {
        self.num_e[(a - 1) as usize]
    }

    pub fn num_f(&self, a: ClassName) -> u32 {
        self.num_f[(a - 1) as usize]
    }
}

/// The auxiliary graph: vertices are the union's class constants, arcs are
/// the union system's transition backsteps, and each vertex carries the
/// four attributes the decision procedures read. Search bookkeeping is
/// owned by the searches themselves, so the graph is immutable and
/// shareable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    adj: Vec<Vec<ClassName>>,
    pub equal_e: Vec<bool>,
    pub equal_f: Vec<bool>,
    pub keeps_e: Vec<bool>,
    pub keeps_f: Vec<bool>,
}

impl AuxGraph {
    /// Assembles a graph from raw parts; successor lists are indexed by
    /// vertex name minus one and must only mention valid names.
    pub fn from_parts(
        adj: Vec<Vec<ClassName>>,
        equal_e: Vec<bool>,
        equal_f: Vec<bool>,
        keeps_e: Vec<bool>,
        keeps_f: Vec<bool>,
    ) -> AuxGraph {
        let n = adj.len();
        assert!(
            equal_e.len() == n && equal_f.len() == n && keeps_e.len() == n && keeps_f.len() == n
        );
        assert!(adj.iter().flatten().all(|&b| b >= 1 && (b as usize) <= n));
        AuxGraph {
            adj,
            equal_e,
            equal_f,
            keeps_e,
            keeps_f,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = ClassName> {
        1..=self.adj.len() as ClassName
    }

    /// Successors of `a`, ascending and without duplicates.
    pub fn successors(&self, a: ClassName) -> &[ClassName] {
        &self.adj[(a - 1) as usize]
    }

    pub fn equal_e(&self, a: ClassName) -> bool {
        self.equal_e[(a - 1) as usize]
    }

    pub fn equal_f(&self, a: ClassName) -> bool {
        self.equal_f[(a - 1) as usize]
    }

    pub fn keeps_e(&self, a: ClassName) -> bool {
        self.keeps_e[(a - 1) as usize]
    }

    pub fn keeps_f(&self, a: ClassName) -> bool {
        self.keeps_f[(a - 1) as usize]
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// The same graph with the roles of the two systems exchanged.
    pub fn swapped(&self) -> AuxGraph {
        AuxGraph {
            adj: self.adj.clone(),
            equal_e: self.equal_f.clone(),
            equal_f: self.equal_e.clone(),
            keeps_e: self.keeps_f.clone(),
            keeps_f: self.keeps_e.clone(),
        }
    }

    /// Plain-text dump, one vertex per line:
    /// `name equal_E equal_F keeps_E keeps_F -> succ,succ,...`
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for a in self.vertices() {
            let succs = self
                .successors(a)
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(
                out,
                "{} {} {} {} {} -> {}",
                a,
                self.equal_e(a),
                self.equal_f(a),
                self.keeps_e(a),
                self.keeps_f(a),
                succs
            );
        }
        out
    }
}

/// Everything the three-way construction produces.
#[derive(Debug, Clone)]
pub struct Cad {
    pub dag: SubtermDag,
    pub tau_e: VertexRelation,
    pub tau_f: VertexRelation,
    pub rho_e: Partition,
    pub rho_f: Partition,
    pub rho_u: Partition,
    pub const_e: Vec<ClassConstant>,
    pub const_f: Vec<ClassConstant>,
    pub const_u: Vec<ClassConstant>,
    pub rules_e: Gtrs,
    pub rules_f: Gtrs,
    /// The union system's rules carry the match counters as satellite data.
    pub rules_u: Gtrs,
    pub inc: IncMaps,
    pub aux: AuxGraph,
    pub used_symbols: BTreeSet<SymbolId>,
    /// Whether every signature symbol occurs in the systems.
    pub flag: bool,
}

/// Builds the three completions on one shared dag and derives the
/// auxiliary graph with all attributes.
///
/// The `counter_e` of a union rule counts the distinct rules of the `E`
/// system whose argument classes are contained in the union rule's
/// argument classes; each distinct `E` rule increments exactly one union
/// rule, namely the one produced by the same dag vertex. A vertex keeps up
/// on the `E` side exactly when every union rule writing it has its
/// counter equal to the product of the argument classes' `E`-subclass
/// counts.
pub fn cad(sig: &Signature, e: &Gtes, f: &Gtes) -> Cad {
    let (dag, tau_e, tau_f) = build_dag(e, f);
    let tau_u: VertexRelation = tau_e.union(&tau_f).copied().collect();

    let rho_e = congruence_closure(&dag, &tau_e);
    let rho_f = congruence_closure(&dag, &tau_f);
    let rho_u = congruence_closure(&dag, &tau_u);

    let union_classes = rho_u.class_count();
    let mut rules_e = Gtrs::new();
    let mut rules_f = Gtrs::new();
    let mut rules_u = Gtrs::new();
    let mut inc = IncMaps {
        num_e: vec![0; union_classes],
        num_f: vec![0; union_classes],
        ..IncMaps::default()
    };
    let mut equal_e = vec![false; union_classes];
    let mut equal_f = vec![false; union_classes];

    for x in dag.vertices() {
        let a = rho_e.find(x);
        let b = rho_f.find(x);
        let c = rho_u.find(x);
        inc.inc_e.insert((c, a));
        inc.inc_f.insert((c, b));
        if rho_e.cardinality(a) == rho_u.cardinality(c) {
            equal_e[(c - 1) as usize] = true;
        }
        if rho_f.cardinality(b) == rho_u.cardinality(c) {
            equal_f[(c - 1) as usize] = true;
        }

        let symbol = dag.label(x);
        let args_u: Vec<ClassName> = dag.children(x).iter().map(|&k| rho_u.find(k)).collect();
        let lhs_u: RuleLhs = (symbol, args_u);
        rules_u.insert(lhs_u.clone(), c);

        let args_e: Vec<ClassName> = dag.children(x).iter().map(|&k| rho_e.find(k)).collect();
        if rules_e.insert((symbol, args_e), a) {
            rules_u.info_mut(&lhs_u).unwrap().counter_e += 1;
        }
        let args_f: Vec<ClassName> = dag.children(x).iter().map(|&k| rho_f.find(k)).collect();
        if rules_f.insert((symbol, args_f), b) {
            rules_u.info_mut(&lhs_u).unwrap().counter_f += 1;
        }
    }

    for &(c, _) in &inc.inc_e {
        inc.num_e[(c - 1) as usize] += 1;
    }
    for &(c, _) in &inc.inc_f {
        inc.num_f[(c - 1) as usize] += 1;
    }

    // Every distinct rule of a side increments exactly one union rule.
    debug_assert_eq!(
        rules_u
            .iter()
            .map(|(_, i)| i.counter_e as usize)
            .sum::<usize>(),
        rules_e.len()
    );
    debug_assert_eq!(
        rules_u
            .iter()
            .map(|(_, i)| i.counter_f as usize)
            .sum::<usize>(),
        rules_f.len()
    );

    let mut keeps_e = vec![true; union_classes];
    let mut keeps_f = vec![true; union_classes];
    for ((_, args), info) in rules_u.iter() {
        if info.counter_e as u64 != subclass_product(&inc.num_e, args, info.counter_e) {
            keeps_e[(info.rhs - 1) as usize] = false;
        }
        if info.counter_f as u64 != subclass_product(&inc.num_f, args, info.counter_f) {
            keeps_f[(info.rhs - 1) as usize] = false;
        }
    }

    let mut adj: Vec<BTreeSet<ClassName>> = vec![BTreeSet::new(); union_classes];
    for &(rhs, arg) in &rules_u.bstep().0 {
        adj[(rhs - 1) as usize].insert(arg);
    }
    let aux = AuxGraph {
        adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        equal_e,
        equal_f,
        keeps_e,
        keeps_f,
    };

    let (used_symbols, flag) = signature_flag(sig, e, f);
    Cad {
        const_e: class_constants(&rho_e),
        const_f: class_constants(&rho_f),
        const_u: class_constants(&rho_u),
        dag,
        tau_e,
        tau_f,
        rho_e,
        rho_f,
        rho_u,
        rules_e,
        rules_f,
        rules_u,
        inc,
        aux,
        used_symbols,
        flag,
    }
}

/// Product of per-argument subclass counts, bailing out once it exceeds
/// the counter it will be compared against; the early exit preserves the
/// comparison and prevents overflow.
fn subclass_product(num: &[u32], args: &[ClassName], counter: u32) -> u64 {
    let mut product = 1u64;
    for &a in args {
        product *= num[(a - 1) as usize] as u64;
        if product > counter as u64 {
            return product;
        }
    }
    product
}

/// All vertices reachable from `a` by a walk of length at least one.
pub fn positive_step_reachable(g: &AuxGraph, a: ClassName) -> BTreeSet<ClassName> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<ClassName> = g.successors(a).to_vec();
    while let Some(b) = stack.pop() {
        if seen.insert(b) {
            stack.extend(g.successors(b));
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtes::Equation;
    use crate::terms::{parse_term, Term};

    fn gtes(sig: &Signature, eqs: &[(&str, &str)]) -> Gtes {
        let (g, _) =
            Gtes::from_equations(eqs.iter().map(|(l, r)| {
                Equation::new(parse_term(sig, l).unwrap(), parse_term(sig, r).unwrap())
            }));
        g
    }

    fn union_class(cad: &Cad, sig: &Signature, term: &str) -> ClassName {
        let t: Term = parse_term(sig, term).unwrap();
        cad.rho_u.find(cad.dag.vertex_of(&t).unwrap())
    }

    #[test]
    fn cad_on_unary_pair() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let out = cad(&sig, &e, &f);
        let c = |t: &str| union_class(&out, &sig, t);

        let arcs: BTreeSet<(ClassName, ClassName)> = out
            .aux
            .vertices()
            .flat_map(|a| out.aux.successors(a).iter().map(move |&b| (a, b)))
            .collect();
        assert_eq!(
            arcs,
            [(c("f(#)"), c("#")), (c("f($)"), c("$"))]
                .into_iter()
                .collect()
        );

        assert!(out.aux.equal_e(c("#")));
        assert!(out.aux.equal_e(c("$")));
        assert!(out.aux.equal_e(c("f(#)")));
        assert!(!out.aux.equal_e(c("f($)")));
        assert!(out.aux.equal_f(c("f($)")));
        assert!(!out.aux.equal_f(c("f(#)")));
        for a in out.aux.vertices() {
            assert!(out.aux.keeps_e(a));
            assert!(out.aux.keeps_f(a));
        }
    }

    #[test]
    fn cad_on_tower_has_self_loop() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let f = gtes(&sig, &[("f(f(f(#)))", "#")]);
        let out = cad(&sig, &e, &f);
        assert_eq!(out.aux.vertex_count(), 1);
        assert_eq!(out.aux.successors(1), &[1]);
        assert!(!out.aux.equal_e(1));
        assert!(!out.aux.equal_f(1));
    }

    #[test]
    fn equal_flags_match_inclusion_counts() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 2), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#,#)", "g(#)"), ("g($)", "$")]);
        let f = gtes(&sig, &[("f(#,#)", "#")]);
        let out = cad(&sig, &e, &f);
        for a in out.aux.vertices() {
            assert_eq!(out.aux.equal_e(a), out.inc.num_e(a) == 1);
            assert_eq!(out.aux.equal_f(a), out.inc.num_f(a) == 1);
            assert!(out.inc.num_e(a) >= 1);
            assert!(out.inc.num_f(a) >= 1);
        }
        let n = e.size() + f.size();
        assert!(out.aux.arc_count() <= n);
    }

    #[test]
    fn reachability_on_unary_pair() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let out = cad(&sig, &e, &f);
        let c = |t: &str| union_class(&out, &sig, t);
        assert_eq!(
            positive_step_reachable(&out.aux, c("f(#)")),
            [c("#")].into_iter().collect()
        );
        assert!(positive_step_reachable(&out.aux, c("#")).is_empty());
    }

    #[test]
    fn reachability_through_self_loop() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let f = gtes(&sig, &[("f(f(f(#)))", "#")]);
        let out = cad(&sig, &e, &f);
        assert_eq!(
            positive_step_reachable(&out.aux, 1),
            [1].into_iter().collect()
        );
    }

    #[test]
    fn dump_format() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let f = gtes(&sig, &[("f(f(f(#)))", "#")]);
        let out = cad(&sig, &e, &f);
        assert_eq!(out.aux.dump(), "1 false false true true -> 1\n");
    }

    #[test]
    fn swapped_exchanges_roles() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let out = cad(&sig, &e, &f);
        let swapped = out.aux.swapped();
        for a in out.aux.vertices() {
            assert_eq!(out.aux.equal_e(a), swapped.equal_f(a));
            assert_eq!(out.aux.keeps_f(a), swapped.keeps_e(a));
            assert_eq!(out.aux.successors(a), swapped.successors(a));
        }
    }
}
