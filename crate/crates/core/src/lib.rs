//! Local search for integer quadratic programs.
//!
//! Instances are read from QPLIB or a canonical JSON format, normalized to a
//! minimization [`model::Problem`], and solved by [`search::solve`], which
//! alternates between repairing violated constraints and improving the
//! objective with a small set of closed-form moves.

pub mod cli;
pub mod evaluator;
pub mod model;
pub mod operators;
pub mod oracle;
pub mod parser;
pub mod scoring;
pub mod search;

#[cfg(test)]
mod testutil;

pub use model::{normalize, Problem, RawProblem};
pub use parser::{parse_canonical, parse_qplib, write_canonical, write_solution, FormatError};
pub use search::{solve, SolveResult, SolverConfig, Status};
