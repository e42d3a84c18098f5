//! Independent brute-force verification: a naive fixpoint congruence
//! closure, the ground word problem through it, bounded term enumeration
//! with counterexample search for the union-congruence property, and
//! bounded-context reachability checks. Deliberately avoids the fast
//! implementation paths; only term, system and dag construction is shared.

use std::collections::HashMap;

use thiserror::Error;

use crate::closure::{ClassName, Partition};
use crate::completion::{normal_form, ExtTerm, Gtrs};
use crate::gtes::{Gtes, SubtermDag, VertexId, VertexRelation};
use crate::terms::{Signature, Term};

/// Caps the number of enumerated terms; exceeding it is an explicit error,
/// never a silent "no counterexample".
pub const TERM_CAP: usize = 20_000;

/// Caps the number of 1-contexts tried by [`context_reachability`].
pub const CONTEXT_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("term universe of height {height} holds {count} terms, exceeding the cap of {cap}")]
    UniverseTooLarge {
        height: usize,
        count: u64,
        cap: usize,
    },
    #[error("context enumeration exceeded the cap of {0}")]
    ContextCapExceeded(usize),
    #[error("context reachability is limited to {limit} classes, got {got}")]
    TooManyClasses { limit: usize, got: usize },
}

/// Naive fixpoint congruence closure: merge the seed pairs, then repeatedly
/// merge label-equal vertices whose children are pairwise merged, rescanning
/// the whole dag from scratch until a full pass changes nothing. Each pass
/// groups vertices by `(label, child classes)` and collapses every group
/// into one class. No incremental bookkeeping, no complexity target;
/// semantically equal to the fast closure.
pub fn naive_closure(dag: &SubtermDag, tau: &VertexRelation) -> Partition {
    let n = dag.len();
    let mut class: Vec<usize> = (0..n).collect();

    // alias maps a retired class id to its replacement; chased on use.
    fn resolve(alias: &HashMap<usize, usize>, mut c: usize) -> usize {
        while let Some(&next) = alias.get(&c) {
            c = next;
        }
        c
    }
    let apply = |class: &mut Vec<usize>, alias: &HashMap<usize, usize>| {
        for c in class.iter_mut() {
            *c = resolve(alias, *c);
        }
    };

    let mut alias: HashMap<usize, usize> = HashMap::new();
    for &(u, v) in tau {
        let cu = resolve(&alias, class[u]);
        let cv = resolve(&alias, class[v]);
        if cu != cv {
            alias.insert(cu.max(cv), cu.min(cv));
        }
    }
    apply(&mut class, &alias);

    loop {
        let mut groups: HashMap<(usize, Vec<usize>), usize> = HashMap::with_capacity(n);
        let mut alias: HashMap<usize, usize> = HashMap::new();
        for v in 0..n {
            let key = (
                dag.label(v),
                dag.children(v)
                    .iter()
                    .map(|&c| class[c])
                    .collect::<Vec<_>>(),
            );
            match groups.entry(key) {
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(class[v]);
                }
                std::collections::hash_map::Entry::Occupied(first) => {
                    let a = resolve(&alias, *first.get());
                    let b = resolve(&alias, class[v]);
                    if a != b {
                        alias.insert(a.max(b), a.min(b));
                    }
                }
            }
        }
        if alias.is_empty() {
            break;
        }
        apply(&mut class, &alias);
    }
    Partition::from_roots(&class)
}

/// Decides `s <->*_e t` by closing the relation of `e` on a dag enlarged
/// with the subterms of `s` and `t`.
pub fn oracle_word(e: &Gtes, s: &Term, t: &Term) -> bool {
    let mut dag = SubtermDag::new();
    let vs = dag.intern_term(s);
    let vt = dag.intern_term(t);
    let mut tau = VertexRelation::new();
    for eq in e.iter() {
        let l = dag.intern_term(&eq.lhs);
        let r = dag.intern_term(&eq.rhs);
        tau.insert((l, r));
    }
    let p = naive_closure(&dag, &tau);
    p.same(vs, vt)
}

/// All ground terms up to a height bound, enumerated by height, then by
/// symbol declaration order, then recursively by children. The order is
/// what makes "first counterexample" deterministic.
#[derive(Debug, Clone)]
pub struct TermUniverse {
    pub height_bound: usize,
    pub terms: Vec<Term>,
    /// `terms[height_start[h]..height_start[h+1]]` have height exactly `h`.
    pub height_start: Vec<usize>,
}

/// Number of ground terms of height at most `h`, saturating.
pub fn universe_count(sig: &Signature, h: usize) -> u64 {
    let mut below = 0u64; // |T_{<= i-1}|
    for _ in 0..=h {
        let mut total = 0u64;
        for s in sig.symbols() {
            let mut product = 1u64;
            for _ in 0..sig.arity(s) {
                product = product.saturating_mul(below);
            }
            total = total.saturating_add(product);
        }
        below = total;
    }
    below
}

/// Enumerates the universe of height at most `h`, failing before
/// materializing anything if the count exceeds the cap.
pub fn enumerate_universe(sig: &Signature, h: usize) -> Result<TermUniverse, OracleError> {
    let count = universe_count(sig, h);
    if count > TERM_CAP as u64 {
        return Err(OracleError::UniverseTooLarge {
            height: h,
            count,
            cap: TERM_CAP,
        });
    }
    let mut terms: Vec<Term> = Vec::with_capacity(count as usize);
    let mut height_start = vec![0usize];
    for height in 0..=h {
        let limit = terms.len(); // terms of height < `height`
        for s in sig.symbols() {
            let arity = sig.arity(s);
            if height == 0 {
                if arity == 0 {
                    terms.push(Term::constant(sig, s).expect("constant"));
                }
                continue;
            }
            if arity == 0 {
                continue;
            }
            // Child tuples over terms of height < `height`, at least one of
            // exact height `height - 1`, in index order.
            let mut tuple = vec![0usize; arity];
            loop {
                let tallest = tuple.iter().map(|&i| terms[i].height()).max().unwrap_or(0);
                if tallest == height - 1 {
                    let children = tuple.iter().map(|&i| terms[i].clone()).collect();
                    terms.push(Term::new(sig, s, children).expect("arity matches"));
                }
                // Advance the tuple odometer.
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    tuple[pos] += 1;
                    if tuple[pos] < limit {
                        break;
                    }
                    tuple[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX || limit == 0 {
                    break;
                }
            }
        }
        height_start.push(terms.len());
    }
    Ok(TermUniverse {
        height_bound: h,
        terms,
        height_start,
    })
}

/// Searches for the first pair `(s, t)` of terms of height at most `h`
/// that are congruent under the union of the systems but under neither
/// system alone. Pairs are ordered by the enumeration indices of their
/// components; absence within the bound says nothing about taller terms.
pub fn counterexample_search(
    sig: &Signature,
    e: &Gtes,
    f: &Gtes,
    h: usize,
) -> Result<Option<(Term, Term)>, OracleError> {
    let universe = enumerate_universe(sig, h)?;
    let mut dag = SubtermDag::new();
    let ids: Vec<VertexId> = universe.terms.iter().map(|t| dag.intern_term(t)).collect();
    let mut tau_e = VertexRelation::new();
    for eq in e.iter() {
        let l = dag.intern_term(&eq.lhs);
        let r = dag.intern_term(&eq.rhs);
        tau_e.insert((l, r));
    }
    let mut tau_f = VertexRelation::new();
    for eq in f.iter() {
        let l = dag.intern_term(&eq.lhs);
        let r = dag.intern_term(&eq.rhs);
        tau_f.insert((l, r));
    }
    let tau_u: VertexRelation = tau_e.union(&tau_f).copied().collect();
    let p_e = naive_closure(&dag, &tau_e);
    let p_f = naive_closure(&dag, &tau_f);
    let p_u = naive_closure(&dag, &tau_u);

    // Group universe indices by union class; only same-class pairs can be
    // counterexamples. A class all of whose members agree under one of the
    // systems cannot contain one either.
    let mut buckets: HashMap<ClassName, Vec<usize>> = HashMap::new();
    for (i, &v) in ids.iter().enumerate() {
        buckets.entry(p_u.find(v)).or_default().push(i);
    }
    let mut skip: HashMap<ClassName, bool> = HashMap::new();
    for (&c, members) in &buckets {
        let all_e = members.windows(2).all(|w| p_e.same(ids[w[0]], ids[w[1]]));
        let all_f = members.windows(2).all(|w| p_f.same(ids[w[0]], ids[w[1]]));
        skip.insert(c, all_e || all_f);
    }

    for i in 0..universe.terms.len() {
        let c = p_u.find(ids[i]);
        if skip[&c] {
            continue;
        }
        let members = &buckets[&c];
        let from = members.partition_point(|&j| j <= i);
        for &j in &members[from..] {
            if !p_e.same(ids[i], ids[j]) && !p_f.same(ids[i], ids[j]) {
                return Ok(Some((universe.terms[i].clone(), universe.terms[j].clone())));
            }
        }
    }
    Ok(None)
}

/// Like [`counterexample_search`], but steps the height bound down when
/// the universe exceeds the term cap, returning the bound actually used.
/// Errors only when even height 0 is too large.
pub fn counterexample_search_auto(
    sig: &Signature,
    e: &Gtes,
    f: &Gtes,
    max_h: usize,
) -> Result<(usize, Option<(Term, Term)>), OracleError> {
    let mut h = max_h;
    loop {
        match counterexample_search(sig, e, f, h) {
            Ok(found) => return Ok((h, found)),
            Err(OracleError::UniverseTooLarge { .. }) if h > 0 => h -= 1,
            Err(err) => return Err(err),
        }
    }
}

/// Decides whether some 1-context `d` other than the bare hole, of hole
/// depth at most the class count and with non-hole positions filled by
/// class representative terms, satisfies `normal_form(rules, d[b]) == a`.
/// This is the rewriting-side reading of positive-step reachability in the
/// auxiliary graph.
pub fn context_reachability(
    rules: &Gtrs,
    classes: &[(ClassName, Term)],
    a: ClassName,
    b: ClassName,
) -> Result<bool, OracleError> {
    const CLASS_LIMIT: usize = 8;
    if classes.len() > CLASS_LIMIT {
        return Err(OracleError::TooManyClasses {
            limit: CLASS_LIMIT,
            got: classes.len(),
        });
    }
    let fillers: Vec<ExtTerm> = classes.iter().map(|(_, t)| ExtTerm::from_term(t)).collect();
    // Symbols and arities are recovered from the rules themselves: a
    // context spine can only rewrite through symbols that head some rule.
    let mut arities: Vec<(usize, usize)> = rules
        .iter()
        .map(|((s, args), _)| (*s, args.len()))
        .filter(|&(_, m)| m >= 1)
        .collect();
    arities.sort_unstable();
    arities.dedup();

    // Frontier of contexts of the current hole depth, represented by the
    // plugged start constant and evaluated lazily from the inside out.
    let mut frontier: Vec<ExtTerm> = vec![ExtTerm::Class(b)];
    let mut tried = 0usize;
    for _depth in 1..=classes.len() {
        let mut next = Vec::new();
        for inner in &frontier {
            for &(symbol, arity) in &arities {
                for hole_index in 0..arity {
                    let mut filler_tuple = vec![0usize; arity - 1];
                    loop {
                        tried += 1;
                        if tried > CONTEXT_CAP {
                            return Err(OracleError::ContextCapExceeded(CONTEXT_CAP));
                        }
                        let mut children: Vec<ExtTerm> = Vec::with_capacity(arity);
                        let mut fi = 0;
                        for pos in 0..arity {
                            if pos == hole_index {
                                children.push(inner.clone());
                            } else {
                                children.push(fillers[filler_tuple[fi]].clone());
                                fi += 1;
                            }
                        }
                        let plugged = ExtTerm::App(symbol, children);
                        let nf = normal_form(rules, &plugged).expect("convergent system");
                        if nf == ExtTerm::Class(a) {
                            return Ok(true);
                        }
                        next.push(plugged);
                        if !advance(&mut filler_tuple, fillers.len()) {
                            break;
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(false)
}

/// Odometer step over `len` symbols per position; false when exhausted.
fn advance(tuple: &mut [usize], len: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < len {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::fgc;
    use crate::gtes::Equation;
    use crate::terms::parse_term;

    fn gtes(sig: &Signature, eqs: &[(&str, &str)]) -> Gtes {
        let (g, _) =
            Gtes::from_equations(eqs.iter().map(|(l, r)| {
                Equation::new(parse_term(sig, l).unwrap(), parse_term(sig, r).unwrap())
            }));
        g
    }

    #[test]
    fn naive_closure_matches_listed_classes() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let (dag, tau_e, _) = crate::gtes::build_dag(&e, &f);
        let p = naive_closure(&dag, &tau_e);
        assert_eq!(p.class_count(), 5);
        let v = |s: &str| dag.vertex_of(&parse_term(&sig, s).unwrap()).unwrap();
        assert!(p.same(v("f(#)"), v("g(#)")));
    }

    #[test]
    fn naive_closure_identity_on_empty_relation() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let (dag, _, _) = crate::gtes::build_dag(&e, &Gtes::new());
        let p = naive_closure(&dag, &VertexRelation::new());
        assert_eq!(p.class_count(), dag.len());
    }

    #[test]
    fn naive_closure_collapses_everything_merged() {
        // All four constants and every stored compound merge.
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("L", 0), ("b", 0), ("f", 2)]).unwrap();
        let e = gtes(
            &sig,
            &[
                ("#", "$"),
                ("#", "L"),
                ("#", "f(#,#)"),
                ("#", "f(#,b)"),
                ("#", "f(b,#)"),
                ("#", "f(b,b)"),
            ],
        );
        let f = gtes(
            &sig,
            &[
                ("L", "b"),
                ("L", "f(#,#)"),
                ("L", "f(#,$)"),
                ("L", "f(#,L)"),
                ("L", "f($,#)"),
                ("L", "f($,$)"),
                ("L", "f($,L)"),
                ("L", "f(L,#)"),
                ("L", "f(L,$)"),
                ("L", "f(L,L)"),
            ],
        );
        let (dag, tau_e, tau_f) = crate::gtes::build_dag(&e, &f);
        let mut tau = tau_e;
        tau.extend(tau_f);
        let p = naive_closure(&dag, &tau);
        assert_eq!(p.class_count(), 1);
    }

    #[test]
    fn oracle_word_examples() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("L", 0), ("b", 0), ("f", 2)]).unwrap();
        let e = gtes(&sig, &[("#", "$")]);
        let f = gtes(&sig, &[("L", "b")]);
        let t = |s: &str| parse_term(&sig, s).unwrap();
        assert!(oracle_word(&e.union(&f), &t("f(#,L)"), &t("f($,b)")));
        assert!(!oracle_word(&e, &t("f(#,L)"), &t("f($,b)")));
        assert!(oracle_word(&Gtes::new(), &t("f(#,L)"), &t("f(#,L)")));
        assert!(!oracle_word(&Gtes::new(), &t("#"), &t("$")));
    }

    #[test]
    fn universe_counts_follow_recurrence() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 2), ("g", 1)]).unwrap();
        let u = enumerate_universe(&sig, 2).unwrap();
        assert_eq!(u.terms.len() as u64, universe_count(&sig, 2));
        // Exact heights per block.
        for h in 0..=2 {
            for t in &u.terms[u.height_start[h]..u.height_start[h + 1]] {
                assert_eq!(t.height(), h);
            }
        }
        // |T<=0| = 2, |T<=1| = 2 + 4 + 2 = 8, |T<=2| = 2 + 64 + 8 = 74
        assert_eq!(universe_count(&sig, 0), 2);
        assert_eq!(universe_count(&sig, 1), 8);
        assert_eq!(universe_count(&sig, 2), 74);
    }

    #[test]
    fn universe_cap_is_an_error() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 2)]).unwrap();
        assert!(matches!(
            enumerate_universe(&sig, 5),
            Err(OracleError::UniverseTooLarge { .. })
        ));
    }

    #[test]
    fn counterexamples_on_tower() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let f = gtes(&sig, &[("f(f(f(#)))", "#")]);
        let t = |s: &str| parse_term(&sig, s).unwrap();
        let found = counterexample_search(&sig, &e, &f, 1).unwrap();
        assert_eq!(found, Some((t("#"), t("f(#)"))));
    }

    #[test]
    fn counterexample_at_height_zero() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("L", 0), ("b", 0), ("f", 2)]).unwrap();
        let e = gtes(
            &sig,
            &[
                ("#", "$"),
                ("#", "L"),
                ("#", "f(#,#)"),
                ("#", "f(#,b)"),
                ("#", "f(b,#)"),
                ("#", "f(b,b)"),
            ],
        );
        let f = gtes(
            &sig,
            &[
                ("L", "b"),
                ("L", "f(#,#)"),
                ("L", "f(#,$)"),
                ("L", "f(#,L)"),
                ("L", "f($,#)"),
                ("L", "f($,$)"),
                ("L", "f($,L)"),
                ("L", "f(L,#)"),
                ("L", "f(L,$)"),
                ("L", "f(L,L)"),
            ],
        );
        let t = |s: &str| parse_term(&sig, s).unwrap();
        assert_eq!(
            counterexample_search(&sig, &e, &f, 0).unwrap(),
            Some((t("#"), t("b")))
        );
    }

    #[test]
    fn no_counterexample_for_disjoint_unary_pair() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        assert_eq!(counterexample_search(&sig, &e, &f, 3).unwrap(), None);
        // Monotonicity: absent at 3 implies absent at smaller bounds.
        for h in 0..3 {
            assert_eq!(counterexample_search(&sig, &e, &f, h).unwrap(), None);
        }
    }

    #[test]
    fn context_reachability_on_unary_pair() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let union = e.union(&f);
        let out = fgc(&union, &Gtes::new());
        let p = &out.completion.partition;
        let classes: Vec<(ClassName, Term)> = p
            .classes()
            .map(|c| (c, out.dag.hat(p.representative(c))))
            .collect();
        let cls = |s: &str| p.find(out.dag.vertex_of(&parse_term(&sig, s).unwrap()).unwrap());
        assert!(
            context_reachability(&out.completion.rules, &classes, cls("f(#)"), cls("#")).unwrap()
        );
        assert!(
            !context_reachability(&out.completion.rules, &classes, cls("#"), cls("f(#)")).unwrap()
        );
    }

    #[test]
    fn context_reachability_with_empty_rules() {
        let rules = Gtrs::new();
        let sig = Signature::new(vec![("#", 0)]).unwrap();
        let rep = parse_term(&sig, "#").unwrap();
        assert!(!context_reachability(&rules, &[(1, rep)], 1, 1).unwrap());
    }
}
