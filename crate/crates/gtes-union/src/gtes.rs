//! Ground term equation systems and the shared subterm dag for a pair of
//! systems.

use std::collections::{BTreeSet, HashMap};

use crate::terms::{Signature, SymbolId, Term};

/// An equation between two ground terms. Orientation is kept as written;
/// `(l, r)` and `(r, l)` are distinct entries even though the generated
/// relation is symmetric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }
}

/// A ground term equation system: a deduplicated set of equations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gtes {
    equations: BTreeSet<Equation>,
}

impl Gtes {
    pub fn new() -> Self {
        Gtes::default()
    }

    /// Builds a system from equations, returning the number of duplicates
    /// that were dropped.
    pub fn from_equations<I: IntoIterator<Item = Equation>>(eqs: I) -> (Self, usize) {
        let mut g = Gtes::new();
        let mut dropped = 0;
        for eq in eqs {
            if !g.insert(eq) {
                dropped += 1;
            }
        }
        (g, dropped)
    }

    /// Inserts an equation; returns false if it was already present.
    pub fn insert(&mut self, eq: Equation) -> bool {
        self.equations.insert(eq)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Sum of `size(l) + size(r)` over the stored equations.
    pub fn size(&self) -> usize {
        self.equations.iter().map(Equation::size).sum()
    }

    /// Set union with duplicates removed.
    pub fn union(&self, other: &Gtes) -> Gtes {
        let mut equations = self.equations.clone();
        equations.extend(other.equations.iter().cloned());
        Gtes { equations }
    }

    /// All subterms of all equation sides.
    pub fn st(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for eq in &self.equations {
            out.extend(eq.lhs.subterms());
            out.extend(eq.rhs.subterms());
        }
        out
    }

    /// Symbols occurring in the system.
    pub fn used_symbols(&self, out: &mut BTreeSet<SymbolId>) {
        fn walk(t: &Term, out: &mut BTreeSet<SymbolId>) {
            out.insert(t.symbol());
            for c in t.children() {
                walk(c, out);
            }
        }
        for eq in &self.equations {
            walk(&eq.lhs, out);
            walk(&eq.rhs, out);
        }
    }
}

/// Symbols of the signature that occur in `e` or `f`, and whether that set
/// is the whole signature.
pub fn signature_flag(sig: &Signature, e: &Gtes, f: &Gtes) -> (BTreeSet<SymbolId>, bool) {
    let mut used = BTreeSet::new();
    e.used_symbols(&mut used);
    f.used_symbols(&mut used);
    let flag = used.len() == sig.len();
    (used, flag)
}

/// Vertex of a [`SubtermDag`].
pub type VertexId = usize;

/// A relation on dag vertices, such as the image of a system's equations.
pub type VertexRelation = BTreeSet<(VertexId, VertexId)>;

/// A shared, acyclic, labeled dag whose vertices are in bijection with a
/// subterm-closed set of ground terms. Built by hash-consed bottom-up
/// interning, so children always have smaller ids than their parents.
#[derive(Debug, Clone, Default)]
pub struct SubtermDag {
    labels: Vec<SymbolId>,
    children: Vec<Vec<VertexId>>,
    index: HashMap<(SymbolId, Vec<VertexId>), VertexId>,
}

impl SubtermDag {
    pub fn new() -> Self {
        SubtermDag::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: VertexId) -> SymbolId {
        self.labels[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.labels.len()
    }

    /// Interns `t` and all of its subterms, returning the vertex of `t`.
    /// Iterative post-order so that deep inputs cannot overflow the stack.
    pub fn intern_term(&mut self, t: &Term) -> VertexId {
        enum Frame<'a> {
            Visit(&'a Term),
            Build(&'a Term),
        }
        let mut work = vec![Frame::Visit(t)];
        let mut built: Vec<VertexId> = Vec::new();
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Visit(t) => {
                    work.push(Frame::Build(t));
                    for c in t.children().iter().rev() {
                        work.push(Frame::Visit(c));
                    }
                }
                Frame::Build(t) => {
                    let n = t.children().len();
                    let kids = built.split_off(built.len() - n);
                    built.push(self.intern(t.symbol(), kids));
                }
            }
        }
        built.pop().expect("one result per input term")
    }

    fn intern(&mut self, symbol: SymbolId, kids: Vec<VertexId>) -> VertexId {
        if let Some(&v) = self.index.get(&(symbol, kids.clone())) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(symbol);
        self.children.push(kids.clone());
        self.index.insert((symbol, kids), v);
        v
    }

    /// Vertex of an already-interned term, if present.
    pub fn vertex_of(&self, t: &Term) -> Option<VertexId> {
        let mut kids = Vec::with_capacity(t.children().len());
        for c in t.children() {
            kids.push(self.vertex_of(c)?);
        }
        self.index.get(&(t.symbol(), kids)).copied()
    }

    /// Sizes of the terms the vertices stand for, saturating on shared
    /// dags whose unfoldings explode.
    pub fn term_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.labels.len()];
        for v in 0..self.labels.len() {
            sizes[v] = self.children[v]
                .iter()
                .fold(1u64, |acc, &c| acc.saturating_add(sizes[c]));
        }
        sizes
    }

    /// The term a vertex stands for.
    pub fn hat(&self, v: VertexId) -> Term {
        let children = self.children[v].iter().map(|&c| self.hat(c)).collect();
        Term::from_parts_unchecked(self.labels[v], children)
    }
}

/// Builds a subterm dag for the pair `(e, f)` together with the vertex
/// relations corresponding to the equations of each system.
pub fn build_dag(e: &Gtes, f: &Gtes) -> (SubtermDag, VertexRelation, VertexRelation) {
    let mut dag = SubtermDag::new();
    let mut tau_e = VertexRelation::new();
    let mut tau_f = VertexRelation::new();
    for eq in e.iter() {
        let l = dag.intern_term(&eq.lhs);
        let r = dag.intern_term(&eq.rhs);
        tau_e.insert((l, r));
    }
    for eq in f.iter() {
        let l = dag.intern_term(&eq.lhs);
        let r = dag.intern_term(&eq.rhs);
        tau_f.insert((l, r));
    }
    (dag, tau_e, tau_f)
}
