//! Front-end machinery for the `decide` binary: problem-file parsing,
//! reports, the bundled example corpus, and the randomized consistency
//! driver. Lives in a library so the test suites can drive it directly.

pub mod corpus;
pub mod fuzz;
pub mod problem;
pub mod report;

pub use problem::{parse_problem, Problem, ProblemError};
pub use report::Report;
