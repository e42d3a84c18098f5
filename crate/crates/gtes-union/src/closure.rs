//! Congruence closure of a vertex relation on a subterm dag.

use std::collections::{HashMap, VecDeque};

use crate::gtes::{SubtermDag, VertexId, VertexRelation};

/// Name of a congruence class: the names of a partition with `k` classes
/// are exactly `1..=k`.
pub type ClassName = u32;

/// A partition of dag vertices into named classes, with cardinalities and
/// a representative vertex per class. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<ClassName>,
    cardinality: Vec<u32>,
    representative: Vec<VertexId>,
}

impl Partition {
    /// Canonicalizes an arbitrary root assignment (`roots[v]` is any chosen
    /// member of `v`'s class). Classes are named `1..=k` in ascending order
    /// of their smallest contained vertex, which makes naming deterministic.
    pub fn from_roots(roots: &[VertexId]) -> Partition {
        let n = roots.len();
        let mut min_vertex: HashMap<VertexId, VertexId> = HashMap::new();
        for (v, &root) in roots.iter().enumerate() {
            let e = min_vertex.entry(root).or_insert(v);
            if v < *e {
                *e = v;
            }
        }
        let mut mins: Vec<VertexId> = min_vertex.values().copied().collect();
        mins.sort_unstable();
        let name_of_min: HashMap<VertexId, ClassName> = mins
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, (i + 1) as ClassName))
            .collect();
        let mut class_of = vec![0; n];
        let mut cardinality = vec![0u32; mins.len()];
        for v in 0..n {
            let name = name_of_min[&min_vertex[&roots[v]]];
            class_of[v] = name;
            cardinality[(name - 1) as usize] += 1;
        }
        Partition {
            class_of,
            cardinality,
            representative: mins,
        }
    }

    /// Class name of a vertex. Panics if `v` is out of range.
    pub fn find(&self, v: VertexId) -> ClassName {
        self.class_of[v]
    }

    pub fn same(&self, u: VertexId, v: VertexId) -> bool {
        self.class_of[u] == self.class_of[v]
    }

    pub fn class_count(&self) -> usize {
        self.cardinality.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn cardinality(&self, c: ClassName) -> u32 {
        self.cardinality[(c - 1) as usize]
    }

    /// Smallest vertex contained in the class.
    pub fn representative(&self, c: ClassName) -> VertexId {
        self.representative[(c - 1) as usize]
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassName> {
        1..=self.cardinality.len() as ClassName
    }

    /// Vertices of a class, ascending.
    pub fn members(&self, c: ClassName) -> Vec<VertexId> {
        (0..self.class_of.len())
            .filter(|&v| self.class_of[v] == c)
            .collect()
    }
}

struct UnionFind {
    parent: Vec<VertexId>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut v: VertexId) -> VertexId {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Weighted union; returns (absorbed root, surviving root) or None if
    /// already joined.
    fn union(&mut self, a: VertexId, b: VertexId) -> Option<(VertexId, VertexId)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (small, big) = if self.size[ra] <= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        Some((small, big))
    }
}

/// Computes the smallest congruence on the dag's vertices containing
/// `tau`: whenever two vertices carry the same label and pairwise congruent
/// children, they are congruent too.
///
/// Pending-pair worklist with a signature table and per-class use lists
/// (Nelson-Oppen style); worst case quadratic in the dag size, which fits
/// the quadratic budget of the overall decision procedure.
pub fn congruence_closure(dag: &SubtermDag, tau: &VertexRelation) -> Partition {
    let n = dag.len();
    let mut uf = UnionFind::new(n);
    // Signature of a vertex under the current union-find: label plus child
    // roots. Keys built from retired roots can never be looked up again, so
    // stale entries are left in place.
    let mut table: HashMap<(usize, Vec<VertexId>), VertexId> = HashMap::with_capacity(n);
    let mut uses: Vec<Vec<VertexId>> = vec![Vec::new(); n];

    for v in 0..n {
        // hat is a bijection, so initial signatures are pairwise distinct.
        table.insert((dag.label(v), dag.children(v).to_vec()), v);
        for &c in dag.children(v) {
            uses[c].push(v);
        }
    }

    let mut pending: VecDeque<(VertexId, VertexId)> = tau.iter().copied().collect();
    while let Some((a, b)) = pending.pop_front() {
        let Some((small, big)) = uf.union(a, b) else {
            continue;
        };
        let moved = std::mem::take(&mut uses[small]);
        for p in moved {
            let sig = (
                dag.label(p),
                dag.children(p)
                    .iter()
                    .map(|&c| uf.find(c))
                    .collect::<Vec<_>>(),
            );
            match table.entry(sig) {
                std::collections::hash_map::Entry::Occupied(q) => {
                    let q = *q.get();
                    if uf.find(q) != uf.find(p) {
                        pending.push_back((p, q));
                    }
                }
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(p);
                }
            }
            uses[big].push(p);
        }
    }

    let roots: Vec<VertexId> = (0..n).map(|v| uf.find(v)).collect();
    Partition::from_roots(&roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtes::{build_dag, Equation, Gtes};
    use crate::terms::{parse_term, Signature};

    fn gtes(sig: &Signature, eqs: &[(&str, &str)]) -> Gtes {
        let (g, _) =
            Gtes::from_equations(eqs.iter().map(|(l, r)| {
                Equation::new(parse_term(sig, l).unwrap(), parse_term(sig, r).unwrap())
            }));
        g
    }

    #[test]
    fn closure_of_unary_pair_example() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let (dag, tau_e, _) = build_dag(&e, &f);
        let p = congruence_closure(&dag, &tau_e);
        let v = |s: &str| dag.vertex_of(&parse_term(&sig, s).unwrap()).unwrap();

        assert_eq!(p.class_count(), 5);
        assert_eq!(p.find(v("f(#)")), p.find(v("g(#)")));
        assert_ne!(p.find(v("f($)")), p.find(v("g(#)")));
        assert_ne!(p.find(v("f($)")), p.find(v("g($)")));
        assert_ne!(p.find(v("#")), p.find(v("$")));
    }

    #[test]
    fn closure_of_tower_example() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let e = gtes(&sig, &[("f(f(#))", "#")]);
        let f = gtes(&sig, &[("f(f(f(#)))", "#")]);
        let (dag, tau_e, _) = build_dag(&e, &f);
        let p = congruence_closure(&dag, &tau_e);
        let v = |s: &str| dag.vertex_of(&parse_term(&sig, s).unwrap()).unwrap();

        assert_eq!(p.class_count(), 2);
        assert_eq!(p.find(v("#")), p.find(v("f(f(#))")));
        assert_eq!(p.find(v("f(#)")), p.find(v("f(f(f(#)))")));
        assert_ne!(p.find(v("#")), p.find(v("f(#)")));
    }

    #[test]
    fn empty_relation_gives_identity_partition() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 1), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#)", "g(#)")]);
        let f = gtes(&sig, &[("f($)", "g($)")]);
        let (dag, _, _) = build_dag(&e, &f);
        let p = congruence_closure(&dag, &VertexRelation::new());
        assert_eq!(p.class_count(), dag.len());
        for v in dag.vertices() {
            assert_eq!(p.cardinality(p.find(v)), 1);
        }
    }

    #[test]
    fn singleton_dag_find_is_one() {
        let sig = Signature::new(vec![("#", 0)]).unwrap();
        let e = gtes(&sig, &[("#", "#")]);
        let (dag, tau_e, _) = build_dag(&e, &Gtes::new());
        let p = congruence_closure(&dag, &tau_e);
        assert_eq!(p.find(0), 1);
    }

    #[test]
    #[should_panic]
    fn find_out_of_range_panics() {
        let sig = Signature::new(vec![("#", 0)]).unwrap();
        let e = gtes(&sig, &[("#", "#")]);
        let (dag, tau_e, _) = build_dag(&e, &Gtes::new());
        let p = congruence_closure(&dag, &tau_e);
        p.find(17);
    }

    #[test]
    fn result_is_a_congruence() {
        let sig = Signature::new(vec![("#", 0), ("$", 0), ("f", 2), ("g", 1)]).unwrap();
        let e = gtes(&sig, &[("f(#,$)", "g(#)"), ("#", "$")]);
        let f = gtes(&sig, &[("f($,#)", "g($)")]);
        let (dag, tau_e, tau_f) = build_dag(&e, &f);
        let mut tau = tau_e;
        tau.extend(tau_f);
        let p = congruence_closure(&dag, &tau);
        for u in dag.vertices() {
            for v in dag.vertices() {
                if dag.label(u) == dag.label(v)
                    && dag
                        .children(u)
                        .iter()
                        .zip(dag.children(v))
                        .all(|(&a, &b)| p.same(a, b))
                {
                    assert!(p.same(u, v), "congruence property violated");
                }
            }
        }
        // Names are 1..=k and cardinalities sum to the vertex count.
        let total: u32 = p.classes().map(|c| p.cardinality(c)).sum();
        assert_eq!(total as usize, dag.len());
    }

    #[test]
    fn class_names_ascend_by_smallest_vertex() {
        let roots = vec![2, 1, 2, 1, 4];
        let p = Partition::from_roots(&roots);
        // classes {0,2}, {1,3}, {4} named by min member: 0 -> 1, 1 -> 2, 4 -> 3
        assert_eq!(p.find(0), 1);
        assert_eq!(p.find(2), 1);
        assert_eq!(p.find(1), 2);
        assert_eq!(p.find(3), 2);
        assert_eq!(p.find(4), 3);
        assert_eq!(p.representative(1), 0);
        assert_eq!(p.cardinality(1), 2);
    }
}
