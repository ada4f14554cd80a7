//! Reference tooling for testing: exhaustive enumeration over small integer
//! grids and a seeded random instance generator.
//!
//! The enumerator evaluates every expression from its stored coefficients on
//! each point and shares nothing with the incremental evaluator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    normalize, Category, ObjSense, Problem, QuadExpr, RawConstraint, RawProblem, RawSense, RawVariable, Sense,
};

pub const DEFAULT_MAX_POINTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    TooLarge,
}

impl OracleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleStatus::Optimal => "OPTIMAL",
            OracleStatus::Infeasible => "INFEASIBLE",
            OracleStatus::TooLarge => "TOO_LARGE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub status: OracleStatus,
    /// Optimum in the problem's declared sense. Only set when optimal.
    pub opt_obj: Option<f64>,
    pub opt_assignment: Option<Vec<i64>>,
    pub enumerated_count: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("variable `{0}` has an infinite bound")]
    UnboundedDomain(String),
}

fn expr_value(e: &QuadExpr, x: &[i64]) -> f64 {
    let mut s = e.constant;
    for &(j, c) in &e.linear {
        s += c * x[j] as f64;
    }
    for &(i, j, c) in &e.quadratic {
        s += c * x[i] as f64 * x[j] as f64;
    }
    s
}

/// Whether `x` satisfies every constraint, checked directly.
pub fn point_feasible(problem: &Problem, x: &[i64]) -> bool {
    problem.constraints().iter().all(|c| {
        let lhs = expr_value(&c.body, x);
        let tol = 1e-6 * c.rhs.abs().max(1.0);
        match c.sense {
            Sense::Le => lhs <= c.rhs + tol,
            Sense::Eq => (lhs - c.rhs).abs() <= tol,
        }
    })
}

/// Objective at `x` in the declared sense.
pub fn point_objective(problem: &Problem, x: &[i64]) -> f64 {
    problem.to_original_objective(expr_value(problem.objective(), x))
}

/// Enumerates the whole bounded grid and returns the optimum. Among equally
/// good points the lexicographically smallest wins.
pub fn brute_force(problem: &Problem, max_points: u64) -> Result<OracleResult, OracleError> {
    let mut lo = Vec::with_capacity(problem.num_vars());
    let mut hi = Vec::with_capacity(problem.num_vars());
    let mut size: u128 = 1;
    for v in problem.variables() {
        let (Some(l), Some(u)) = (v.lb, v.ub) else {
            return Err(OracleError::UnboundedDomain(v.name.clone()));
        };
        lo.push(l);
        hi.push(u);
        size = size.saturating_mul((u as i128 - l as i128 + 1) as u128);
    }
    if size > max_points as u128 {
        return Ok(OracleResult {
            status: OracleStatus::TooLarge,
            opt_obj: None,
            opt_assignment: None,
            enumerated_count: 0,
        });
    }

    // Odometer with the last variable turning fastest visits points in
    // lexicographic order, so keeping only strict improvements gives the
    // lex-min tie-break.
    let n = lo.len();
    let mut x = lo.clone();
    let mut best: Option<(f64, Vec<i64>)> = None;
    let mut count = 0u64;
    loop {
        count += 1;
        if point_feasible(problem, &x) {
            let f = expr_value(problem.objective(), &x);
            if best.as_ref().is_none_or(|(b, _)| f < *b) {
                best = Some((f, x.clone()));
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                let (status, opt_obj, opt_assignment) = match best {
                    Some((f, a)) => (OracleStatus::Optimal, Some(problem.to_original_objective(f)), Some(a)),
                    None => (OracleStatus::Infeasible, None, None),
                };
                return Ok(OracleResult { status, opt_obj, opt_assignment, enumerated_count: count });
            }
            k -= 1;
            if x[k] < hi[k] {
                x[k] += 1;
                break;
            }
            x[k] = lo[k];
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
}

/// Parameters of [`gen_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    /// Must not be `Linear`.
    pub category: Category,
    pub n: usize,
    pub m: usize,
    /// Variable domains are `[-bound_width, bound_width]`.
    pub bound_width: i64,
    /// Coefficients are drawn from `[-coeff_range, coeff_range]` without 0.
    pub coeff_range: i64,
    /// Probability that a candidate term is present.
    pub density: f64,
    /// Fraction of rows generated as equalities.
    pub eq_fraction: f64,
    /// Number of trailing variables kept out of every constraint.
    pub free_vars: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(category: Category, n: usize, m: usize, seed: u64) -> Self {
        Self {
            category,
            n,
            m,
            bound_width: 5,
            coeff_range: 10,
            density: 0.5,
            eq_fraction: 0.25,
            free_vars: 0,
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::Invalid(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        match self.category {
            Category::Linear => return bad("category must have quadratic terms".into()),
            Category::Qubo if self.m > 0 => return bad(format!("QUBO instances have no constraints, got m={}", self.m)),
            Category::Lcqp | Category::Qclp | Category::Qcqp if self.m == 0 => {
                return bad(format!("{} instances need at least one constraint", self.category))
            }
            _ => {}
        }
        if self.bound_width < 0 {
            return bad(format!("bound_width must be >= 0, got {}", self.bound_width));
        }
        if self.coeff_range < 1 {
            return bad(format!("coeff_range must be >= 1, got {}", self.coeff_range));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must lie in (0, 1], got {}", self.density));
        }
        if !(0.0..=1.0).contains(&self.eq_fraction) {
            return bad(format!("eq_fraction must lie in [0, 1], got {}", self.eq_fraction));
        }
        if self.m > 0 && self.free_vars >= self.n {
            return bad(format!("free_vars ({}) leaves no variable for the {} constraints", self.free_vars, self.m));
        }
        Ok(())
    }
}

fn coeff(rng: &mut ChaCha8Rng, r: i64) -> f64 {
    let c = rng.gen_range(1..=r);
    if rng.gen_bool(0.5) {
        c as f64
    } else {
        -c as f64
    }
}

/// Random expression over `vars`; guarantees at least one linear term and,
/// when `quadratic`, at least one quadratic term.
fn random_expr(rng: &mut ChaCha8Rng, spec: &GenSpec, vars: &[usize], quadratic: bool) -> QuadExpr {
    let mut e = QuadExpr::new();
    for &j in vars {
        if rng.gen_bool(spec.density) {
            e.add_linear(j, coeff(rng, spec.coeff_range));
        }
    }
    if e.linear.is_empty() {
        let &j = vars.choose(rng).expect("non-empty variable set");
        e.add_linear(j, coeff(rng, spec.coeff_range));
    }
    if quadratic {
        for (a, &i) in vars.iter().enumerate() {
            for &j in &vars[a..] {
                if rng.gen_bool(spec.density) {
                    e.add_quadratic(i, j, coeff(rng, spec.coeff_range));
                }
            }
        }
        if e.quadratic.is_empty() {
            let &j = vars.choose(rng).expect("non-empty variable set");
            e.add_quadratic(j, j, coeff(rng, spec.coeff_range));
        }
    }
    e
}

/// Generates a seeded random instance of the requested category.
///
/// Constraint right-hand sides are set from a random reference point with
/// some slack, so the reference point is always feasible.
pub fn gen_random(spec: &GenSpec) -> Result<Problem, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let w = spec.bound_width;
    let variables: Vec<RawVariable> = (0..spec.n)
        .map(|j| RawVariable { name: format!("x{j}"), lb: -w as f64, ub: w as f64 })
        .collect();

    let quad_obj = matches!(spec.category, Category::Qubo | Category::Lcqp | Category::Qcqp);
    let quad_con = matches!(spec.category, Category::Qclp | Category::Qcqp);
    let all: Vec<usize> = (0..spec.n).collect();
    let objective = random_expr(&mut rng, spec, &all, quad_obj);

    let reference: Vec<i64> = (0..spec.n).map(|_| rng.gen_range(-w..=w)).collect();
    let bound_vars = &all[..spec.n - spec.free_vars];
    let mut constraints = Vec::with_capacity(spec.m);
    // Make sure at least one row carries the quadratic terms the category asks for.
    let quad_row = if quad_con { rng.gen_range(0..spec.m.max(1)) } else { usize::MAX };
    for i in 0..spec.m {
        let mut vars: Vec<usize> = bound_vars.iter().copied().filter(|_| rng.gen_bool(spec.density)).collect();
        if vars.is_empty() {
            vars.push(*bound_vars.choose(&mut rng).expect("constrained variables exist"));
        }
        let quadratic = quad_con && (i == quad_row || rng.gen_bool(0.5));
        let body = random_expr(&mut rng, spec, &vars, quadratic);
        let at_ref = body.eval(&reference);
        let slack = rng.gen_range(0..=spec.coeff_range) as f64;
        let (sense, rhs) = if rng.gen_bool(spec.eq_fraction) {
            (RawSense::Eq, at_ref)
        } else if rng.gen_bool(0.5) {
            (RawSense::Le, at_ref + slack)
        } else {
            (RawSense::Ge, at_ref - slack)
        };
        constraints.push(RawConstraint { name: format!("c{i}"), body, sense, rhs });
    }

    let raw = RawProblem {
        name: format!("{}_n{}_m{}_s{}", spec.category.as_str().to_lowercase(), spec.n, spec.m, spec.seed),
        sense: ObjSense::Min,
        variables,
        objective,
        constraints,
    };
    Ok(normalize(raw).expect("generated instances are well formed"))
}
