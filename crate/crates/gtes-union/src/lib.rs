//! Decision procedure for unions of finitely generated congruences on the
//! ground term algebra.
//!
//! Given two ground term equation systems `E` and `F` over a common
//! signature, [`decide::decide_union`] answers whether the union of the
//! congruences they generate is itself a congruence, equivalently whether
//! the congruence generated by `E ∪ F` equals that union. The fast path
//! runs in quadratic time; [`oracle`] provides an independent brute-force
//! cross-check used by the test suites and the CLI's `--oracle-check`.

pub mod auxgraph;
pub mod closure;
pub mod completion;
pub mod decide;
pub mod gtes;
pub mod oracle;
pub mod terms;

pub use closure::{ClassName, Partition};
pub use decide::{decide_union, Verdict};
pub use gtes::{Equation, Gtes, SubtermDag, VertexId};
pub use terms::{Signature, SymbolId, Term};
