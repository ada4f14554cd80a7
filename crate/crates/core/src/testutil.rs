//! Small builders shared by unit tests.

use crate::model::{normalize, ObjSense, Problem, QuadExpr, RawConstraint, RawProblem, RawSense, RawVariable};

pub fn expr(linear: &[(usize, f64)], quad: &[(usize, usize, f64)]) -> QuadExpr {
    QuadExpr { constant: 0.0, linear: linear.to_vec(), quadratic: quad.to_vec() }
}

/// Minimization problem with variables `x0..` and rows `c0..`.
pub fn problem(bounds: &[(f64, f64)], obj: QuadExpr, cons: Vec<(QuadExpr, RawSense, f64)>) -> Problem {
    normalize(RawProblem {
        name: "t".into(),
        sense: ObjSense::Min,
        variables: bounds
            .iter()
            .enumerate()
            .map(|(i, &(lb, ub))| RawVariable { name: format!("x{i}"), lb, ub })
            .collect(),
        objective: obj,
        constraints: cons
            .into_iter()
            .enumerate()
            .map(|(i, (body, sense, rhs))| RawConstraint { name: format!("c{i}"), body, sense, rhs })
            .collect(),
    })
    .unwrap()
}
