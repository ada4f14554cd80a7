//! Normalized representation of an integer quadratic program.
//!
//! Every expression is stored in monomial form: a quadratic entry `(i, j, c)`
//! with `i <= j` contributes `c * x_i * x_j`, so a diagonal entry is the
//! coefficient of `x_i^2` directly. The `1/2 x'Qx` Hessian convention only
//! exists at the file-format boundary (see [`hessian_to_monomial`]).

use std::fmt;

use thiserror::Error;

pub type VarId = usize;
pub type ConId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("variable index {index} out of range (problem has {count} variables)")]
    VarOutOfRange { index: usize, count: usize },
    #[error("variable `{name}` has lower bound {lb} above upper bound {ub}")]
    InvertedBounds { name: String, lb: f64, ub: f64 },
    #[error("non-finite coefficient in {context}")]
    NonFinite { context: String },
    #[error("constraint `{name}` has no variables and can never be satisfied")]
    InfeasibleEmptyRow { name: String },
    #[error("constraint {0} does not exist")]
    NoSuchConstraint(ConId),
    #[error("variable {var} does not appear in {context}")]
    VarNotInExpr { var: VarId, context: String },
}

/// Optimization direction as declared by the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjSense {
    Min,
    Max,
}

/// Constraint sense after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
}

/// Constraint sense as read from an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RawSense {
    Le,
    Ge,
    Eq,
}

/// Instance class by where quadratic terms appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    /// No constraints, quadratic objective.
    Qubo,
    /// Linear constraints, quadratic objective.
    Lcqp,
    /// Quadratic constraints, linear objective.
    Qclp,
    /// Quadratic constraints and objective.
    Qcqp,
    /// Nothing quadratic at all.
    Linear,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Qubo => "QUBO",
            Category::Lcqp => "LCQP",
            Category::Qclp => "QCLP",
            Category::Qcqp => "QCQP",
            Category::Linear => "LINEAR",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Converts an entry of a symmetric Hessian `Q` (as used by `1/2 x'Qx`) to
/// the coefficient of the monomial `x_i x_j`.
pub fn hessian_to_monomial(i: usize, j: usize, q: f64) -> f64 {
    if i == j {
        q * 0.5
    } else {
        q
    }
}

/// Inverse of [`hessian_to_monomial`].
pub fn monomial_to_hessian(i: usize, j: usize, c: f64) -> f64 {
    if i == j {
        c * 2.0
    } else {
        c
    }
}

/// An integer decision variable. `None` bounds are infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lb: Option<i64>,
    pub ub: Option<i64>,
}

impl Variable {
    pub fn contains(&self, v: i64) -> bool {
        self.lb.is_none_or(|lb| v >= lb) && self.ub.is_none_or(|ub| v <= ub)
    }

    pub fn lb_f64(&self) -> f64 {
        self.lb.map_or(f64::NEG_INFINITY, |v| v as f64)
    }

    pub fn ub_f64(&self) -> f64 {
        self.ub.map_or(f64::INFINITY, |v| v as f64)
    }

    pub fn clamp(&self, v: i64) -> i64 {
        let v = self.lb.map_or(v, |lb| v.max(lb));
        self.ub.map_or(v, |ub| v.min(ub))
    }

    /// Value a fresh search starts from: zero pulled into the bounds.
    pub fn initial_value(&self) -> i64 {
        self.clamp(0)
    }

    pub fn is_bounded(&self) -> bool {
        self.lb.is_some() && self.ub.is_some()
    }
}

/// Sparse quadratic expression `constant + sum linear + sum c x_i x_j`.
///
/// Inside a [`Problem`] the expression is canonical: linear entries sorted by
/// variable, quadratic entries sorted by `(i, j)` with `i <= j`, no duplicates
/// and no zero coefficients. Raw expressions coming out of a parser may
/// violate all of that until [`normalize`] runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadExpr {
    pub constant: f64,
    pub linear: Vec<(VarId, f64)>,
    pub quadratic: Vec<(VarId, VarId, f64)>,
}

impl QuadExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_linear(&mut self, var: VarId, coef: f64) -> &mut Self {
        self.linear.push((var, coef));
        self
    }

    pub fn add_quadratic(&mut self, i: VarId, j: VarId, coef: f64) -> &mut Self {
        self.quadratic.push((i, j, coef));
        self
    }

    /// Direct evaluation at a full assignment.
    pub fn eval(&self, values: &[i64]) -> f64 {
        let mut acc = self.constant;
        for &(j, c) in &self.linear {
            acc += c * values[j] as f64;
        }
        for &(i, j, c) in &self.quadratic {
            acc += c * values[i] as f64 * values[j] as f64;
        }
        acc
    }

    /// Sorted, deduplicated list of variables with a nonzero term.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .linear
            .iter()
            .map(|&(j, _)| j)
            .chain(self.quadratic.iter().flat_map(|&(i, j, _)| [i, j]))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn is_quadratic(&self) -> bool {
        !self.quadratic.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty() && self.quadratic.is_empty()
    }

    fn negate(&mut self) {
        self.constant = -self.constant;
        for (_, c) in &mut self.linear {
            *c = -*c;
        }
        for (_, _, c) in &mut self.quadratic {
            *c = -*c;
        }
    }

    /// Sorts, merges duplicates, orients quadratic entries as `i <= j` and
    /// drops zeros.
    fn canonicalize(&mut self, n: usize, context: &str) -> Result<(), ModelError> {
        if !self.constant.is_finite() {
            return Err(ModelError::NonFinite { context: context.to_string() });
        }
        for &(j, c) in &self.linear {
            check_var(j, n)?;
            if !c.is_finite() {
                return Err(ModelError::NonFinite { context: context.to_string() });
            }
        }
        for &(i, j, c) in &self.quadratic {
            check_var(i, n)?;
            check_var(j, n)?;
            if !c.is_finite() {
                return Err(ModelError::NonFinite { context: context.to_string() });
            }
        }

        self.linear.sort_by_key(|&(j, _)| j);
        let mut linear: Vec<(VarId, f64)> = Vec::with_capacity(self.linear.len());
        for &(j, c) in &self.linear {
            match linear.last_mut() {
                Some(last) if last.0 == j => last.1 += c,
                _ => linear.push((j, c)),
            }
        }
        linear.retain(|&(_, c)| c != 0.0);
        self.linear = linear;

        for entry in &mut self.quadratic {
            if entry.0 > entry.1 {
                std::mem::swap(&mut entry.0, &mut entry.1);
            }
        }
        self.quadratic.sort_by_key(|&(i, j, _)| (i, j));
        let mut quadratic: Vec<(VarId, VarId, f64)> = Vec::with_capacity(self.quadratic.len());
        for &(i, j, c) in &self.quadratic {
            match quadratic.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += c,
                _ => quadratic.push((i, j, c)),
            }
        }
        quadratic.retain(|&(_, _, c)| c != 0.0);
        self.quadratic = quadratic;
        Ok(())
    }
}

fn check_var(j: usize, n: usize) -> Result<(), ModelError> {
    if j >= n {
        Err(ModelError::VarOutOfRange { index: j, count: n })
    } else {
        Ok(())
    }
}

/// All terms of one expression that involve a given variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VarTerms {
    pub var: VarId,
    /// Coefficient of `x`.
    pub linear: f64,
    /// Coefficient of `x^2`.
    pub square: f64,
    /// `(k, c)` for every monomial `c x x_k`, `k != x`.
    pub cross: Vec<(VarId, f64)>,
}

impl VarTerms {
    /// Coefficient of `x` once every other variable is fixed at `values`.
    #[inline]
    pub fn slope(&self, values: &[i64]) -> f64 {
        let mut h = self.linear;
        for &(k, c) in &self.cross {
            h += c * values[k] as f64;
        }
        h
    }

    /// Like [`slope`](Self::slope), with one variable's value overridden.
    #[inline]
    pub fn slope_with(&self, values: &[i64], over: VarId, over_value: i64) -> f64 {
        let mut h = self.linear;
        for &(k, c) in &self.cross {
            let v = if k == over { over_value } else { values[k] };
            h += c * v as f64;
        }
        h
    }

    /// Change of the expression when `x` moves from `old` to `new` with the
    /// other variables held at `values`.
    #[inline]
    pub fn delta(&self, values: &[i64], old: i64, new: i64) -> f64 {
        let h = self.slope(values);
        change(self.square, h, old, new)
    }

    pub fn cross_coef(&self, k: VarId) -> f64 {
        self.cross
            .iter()
            .find(|&&(v, _)| v == k)
            .map_or(0.0, |&(_, c)| c)
    }
}

#[inline]
pub(crate) fn change(square: f64, slope: f64, old: i64, new: i64) -> f64 {
    let (o, n) = (old as f64, new as f64);
    square * (n * n - o * o) + slope * (n - o)
}

/// Per-variable decomposition of an expression, sorted by variable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExprTerms {
    terms: Vec<VarTerms>,
}

impl ExprTerms {
    pub fn build(expr: &QuadExpr) -> Self {
        let vars = expr.vars();
        let mut terms: Vec<VarTerms> = vars
            .iter()
            .map(|&var| VarTerms { var, linear: 0.0, square: 0.0, cross: Vec::new() })
            .collect();
        let slot = |v: VarId| vars.binary_search(&v).expect("var collected above");
        for &(j, c) in &expr.linear {
            terms[slot(j)].linear += c;
        }
        for &(i, j, c) in &expr.quadratic {
            if i == j {
                terms[slot(i)].square += c;
            } else {
                terms[slot(i)].cross.push((j, c));
                terms[slot(j)].cross.push((i, c));
            }
        }
        Self { terms }
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarTerms> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn slot(&self, var: VarId) -> Option<usize> {
        self.terms.binary_search_by_key(&var, |t| t.var).ok()
    }

    pub fn get(&self, var: VarId) -> Option<&VarTerms> {
        self.slot(var).map(|s| &self.terms[s])
    }

    #[inline]
    pub fn at(&self, slot: usize) -> &VarTerms {
        &self.terms[slot]
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.slot(var).is_some()
    }
}

/// `A x_j^2 + H x_j + I` decomposition of an expression around one variable.
///
/// For a constraint body `quad = A`, `lin = H(i, x_j)`, `rest = I(i, x_j)`.
/// For the objective `quad = W`, `lin = K(x_j)` and `quad x^2 + lin x` is the
/// slice `Theta(x_j)`; `rest` then holds every objective term without `x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffView {
    pub quad: f64,
    pub lin: f64,
    pub rest: f64,
}

impl CoeffView {
    pub(crate) fn from_terms(t: &VarTerms, values: &[i64], total: f64) -> Self {
        let lin = t.slope(values);
        let x = values[t.var] as f64;
        Self { quad: t.square, lin, rest: total - t.square * x * x - lin * x }
    }

    /// `quad x^2 + lin x`, the part of the expression that moves with `x`.
    #[inline]
    pub fn theta(&self, x: f64) -> f64 {
        self.quad * x * x + self.lin * x
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.theta(x) + self.rest
    }
}

/// Which expression a [`coeff_view`] is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprRef {
    Objective,
    Constraint(ConId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Constant-free body; any constant has been folded into `rhs`.
    pub body: QuadExpr,
    pub sense: Sense,
    pub rhs: f64,
    terms: ExprTerms,
}

impl Constraint {
    pub fn terms(&self) -> &ExprTerms {
        &self.terms
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().map(|t| t.var)
    }

    pub fn num_vars(&self) -> usize {
        self.terms.len()
    }
}

/// One occurrence of a variable in a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub con: ConId,
    /// Position of the variable inside the constraint's [`ExprTerms`].
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawVariable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawConstraint {
    pub name: String,
    pub body: QuadExpr,
    pub sense: RawSense,
    pub rhs: f64,
}

/// Problem as read from a file, before [`normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct RawProblem {
    pub name: String,
    pub sense: ObjSense,
    pub variables: Vec<RawVariable>,
    pub objective: QuadExpr,
    pub constraints: Vec<RawConstraint>,
}

/// A normalized minimization IQP. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: String,
    sense_original: ObjSense,
    variables: Vec<Variable>,
    objective: QuadExpr,
    constraints: Vec<Constraint>,
    obj_terms: ExprTerms,
    occurrence: Vec<Vec<Occurrence>>,
    objective_vars: Vec<VarId>,
    free_vars: Vec<VarId>,
}

impl Problem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sense_original(&self) -> ObjSense {
        self.sense_original
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, j: VarId) -> &Variable {
        &self.variables[j]
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Internal (minimization) objective.
    pub fn objective(&self) -> &QuadExpr {
        &self.objective
    }

    pub fn objective_terms(&self) -> &ExprTerms {
        &self.obj_terms
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, i: ConId) -> &Constraint {
        &self.constraints[i]
    }

    pub fn occurrence(&self, j: VarId) -> &[Occurrence] {
        &self.occurrence[j]
    }

    /// Variables with a nonzero objective term, ascending.
    pub fn objective_vars(&self) -> &[VarId] {
        &self.objective_vars
    }

    pub fn in_objective(&self, j: VarId) -> bool {
        self.obj_terms.contains(j)
    }

    /// Objective variables that appear in no constraint, ascending.
    pub fn free_vars(&self) -> &[VarId] {
        &self.free_vars
    }

    pub fn is_free(&self, j: VarId) -> bool {
        self.occurrence[j].is_empty() && self.in_objective(j)
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn category(&self) -> Category {
        let quad_obj = self.objective.is_quadratic();
        if self.constraints.is_empty() {
            return if quad_obj { Category::Qubo } else { Category::Linear };
        }
        let quad_con = self.constraints.iter().any(|c| c.body.is_quadratic());
        match (quad_obj, quad_con) {
            (true, false) => Category::Lcqp,
            (false, true) => Category::Qclp,
            (true, true) => Category::Qcqp,
            (false, false) => Category::Linear,
        }
    }

    /// Converts an internal objective value back to the declared sense.
    pub fn to_original_objective(&self, internal: f64) -> f64 {
        match self.sense_original {
            ObjSense::Min => internal,
            ObjSense::Max => -internal,
        }
    }

    /// Every variable at its starting value, clamp(0, lb, ub).
    pub fn initial_assignment(&self) -> Vec<i64> {
        self.variables.iter().map(Variable::initial_value).collect()
    }

    /// Largest violation over all constraints at `values`, and the
    /// constraint responsible for it.
    pub fn max_violation(&self, values: &[i64]) -> (f64, Option<ConId>) {
        let mut worst = (0.0, None);
        for (i, c) in self.constraints.iter().enumerate() {
            let v = violation_amount(c.sense, c.body.eval(values), c.rhs);
            if v > worst.0 {
                worst = (v, Some(i));
            }
        }
        worst
    }

    pub fn within_bounds(&self, values: &[i64]) -> bool {
        values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(v, &x)| v.contains(x))
    }

    /// Full from-scratch feasibility check (bounds and constraints).
    pub fn is_feasible(&self, values: &[i64]) -> bool {
        self.within_bounds(values) && self.max_violation(values).0 == 0.0
    }

    /// Rebuilds the raw form this problem was normalized from, up to the
    /// normalizations (GE rows stay as LE, duplicates stay merged).
    pub fn to_raw(&self) -> RawProblem {
        let mut objective = self.objective.clone();
        if self.sense_original == ObjSense::Max {
            objective.negate();
        }
        RawProblem {
            name: self.name.clone(),
            sense: self.sense_original,
            variables: self
                .variables
                .iter()
                .map(|v| RawVariable { name: v.name.clone(), lb: v.lb_f64(), ub: v.ub_f64() })
                .collect(),
            objective,
            constraints: self
                .constraints
                .iter()
                .map(|c| RawConstraint {
                    name: c.name.clone(),
                    body: c.body.clone(),
                    sense: match c.sense {
                        Sense::Le => RawSense::Le,
                        Sense::Eq => RawSense::Eq,
                    },
                    rhs: c.rhs,
                })
                .collect(),
        }
    }
}

/// Feasibility tolerance for a row with right-hand side `rhs`.
#[inline]
pub fn feas_tol(rhs: f64) -> f64 {
    1e-6 * rhs.abs().max(1.0)
}

/// Violation of `activity (sense) rhs`, reported as zero inside the
/// feasibility tolerance.
#[inline]
pub fn violation_amount(sense: Sense, activity: f64, rhs: f64) -> f64 {
    let v = match sense {
        Sense::Le => (activity - rhs).max(0.0),
        Sense::Eq => (activity - rhs).abs(),
    };
    if v <= feas_tol(rhs) {
        0.0
    } else {
        v
    }
}

fn integer_bound(value: f64, lower: bool, name: &str) -> Result<Option<i64>, ModelError> {
    if value.is_nan() {
        return Err(ModelError::NonFinite { context: format!("bounds of `{name}`") });
    }
    if value.is_infinite() {
        let wrong_side = (lower && value > 0.0) || (!lower && value < 0.0);
        if wrong_side {
            return Err(ModelError::InvertedBounds {
                name: name.to_string(),
                lb: if lower { value } else { f64::NEG_INFINITY },
                ub: if lower { f64::INFINITY } else { value },
            });
        }
        return Ok(None);
    }
    // Snap values that are integral up to representation noise.
    let snapped = if (value - value.round()).abs() <= 1e-9 {
        value.round()
    } else if lower {
        value.ceil()
    } else {
        value.floor()
    };
    if snapped.abs() >= 9.0e15 {
        return Ok(None);
    }
    Ok(Some(snapped as i64))
}

/// Turns a raw problem into the internal minimization form.
///
/// Maximization objectives are negated, `>=` rows are negated into `<=`,
/// constants inside constraint bodies move to the right-hand side, duplicate
/// monomials are summed and zero coefficients dropped. Rows left without
/// variables are removed when trivially satisfied and rejected otherwise.
pub fn normalize(raw: RawProblem) -> Result<Problem, ModelError> {
    let n = raw.variables.len();
    let mut variables = Vec::with_capacity(n);
    for v in raw.variables {
        let lb = integer_bound(v.lb, true, &v.name)?;
        let ub = integer_bound(v.ub, false, &v.name)?;
        if let (Some(l), Some(u)) = (lb, ub) {
            if l > u {
                return Err(ModelError::InvertedBounds { name: v.name, lb: v.lb, ub: v.ub });
            }
        }
        variables.push(Variable { name: v.name, lb, ub });
    }

    let mut objective = raw.objective;
    objective.canonicalize(n, "objective")?;
    if raw.sense == ObjSense::Max {
        objective.negate();
    }

    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for rc in raw.constraints {
        let mut body = rc.body;
        body.canonicalize(n, &format!("constraint `{}`", rc.name))?;
        if !rc.rhs.is_finite() {
            return Err(ModelError::NonFinite { context: format!("rhs of `{}`", rc.name) });
        }
        let mut rhs = rc.rhs - body.constant;
        body.constant = 0.0;
        let sense = match rc.sense {
            RawSense::Le => Sense::Le,
            RawSense::Eq => Sense::Eq,
            RawSense::Ge => {
                body.negate();
                body.constant = 0.0;
                rhs = -rhs;
                Sense::Le
            }
        };
        if body.is_empty() {
            if violation_amount(sense, 0.0, rhs) > 0.0 {
                return Err(ModelError::InfeasibleEmptyRow { name: rc.name });
            }
            continue;
        }
        let terms = ExprTerms::build(&body);
        constraints.push(Constraint { name: rc.name, body, sense, rhs, terms });
    }

    let obj_terms = ExprTerms::build(&objective);
    let mut occurrence = vec![Vec::new(); n];
    for (i, c) in constraints.iter().enumerate() {
        for (slot, t) in c.terms.iter().enumerate() {
            occurrence[t.var].push(Occurrence { con: i, slot });
        }
    }
    let objective_vars: Vec<VarId> = obj_terms.iter().map(|t| t.var).collect();
    let free_vars = objective_vars
        .iter()
        .copied()
        .filter(|&j| occurrence[j].is_empty())
        .collect();

    Ok(Problem {
        name: raw.name,
        sense_original: raw.sense,
        variables,
        objective,
        constraints,
        obj_terms,
        occurrence,
        objective_vars,
        free_vars,
    })
}

/// Decomposes an expression of `problem` around variable `j` at `values`.
pub fn coeff_view(
    problem: &Problem,
    ctx: ExprRef,
    j: VarId,
    values: &[i64],
) -> Result<CoeffView, ModelError> {
    let (terms, expr, context) = match ctx {
        ExprRef::Objective => (&problem.obj_terms, &problem.objective, "objective".to_string()),
        ExprRef::Constraint(i) => {
            let c = problem.constraints.get(i).ok_or(ModelError::NoSuchConstraint(i))?;
            (&c.terms, &c.body, format!("constraint `{}`", c.name))
        }
    };
    let t = terms.get(j).ok_or(ModelError::VarNotInExpr { var: j, context })?;
    Ok(CoeffView::from_terms(t, values, expr.eval(values)))
}
