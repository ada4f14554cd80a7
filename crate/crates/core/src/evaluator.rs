//! Search state with incrementally maintained constraint activities.

use thiserror::Error;

use crate::model::{change, violation_amount, ConId, Problem, Sense, VarId};
use crate::operators::Move;
use crate::scoring::Weights;

/// Full recomputation period, in committed moves.
pub const RECOMPUTE_PERIOD: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("value {value} outside the bounds of variable {var}")]
    OutOfBounds { var: VarId, value: i64 },
    #[error("variable {0} does not exist")]
    NoSuchVar(VarId),
}

/// Set of constraint ids with O(1) insert, remove and uniform indexing.
#[derive(Debug, Clone)]
pub struct ViolatedSet {
    items: Vec<ConId>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl ViolatedSet {
    fn with_capacity(m: usize) -> Self {
        Self { items: Vec::new(), pos: vec![ABSENT; m] }
    }

    fn insert(&mut self, i: ConId) {
        if self.pos[i] == ABSENT {
            self.pos[i] = self.items.len();
            self.items.push(i);
        }
    }

    fn remove(&mut self, i: ConId) {
        let p = self.pos[i];
        if p != ABSENT {
            let last = *self.items.last().expect("non-empty");
            self.items.swap_remove(p);
            if last != i {
                self.pos[last] = p;
            }
            self.pos[i] = ABSENT;
        }
    }

    pub fn contains(&self, i: ConId) -> bool {
        self.pos[i] != ABSENT
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[ConId] {
        &self.items
    }

    /// Sorted copy, for comparisons.
    pub fn sorted(&self) -> Vec<ConId> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}

/// Current assignment plus everything derived from it.
#[derive(Debug, Clone)]
pub struct SolverState<'p> {
    problem: &'p Problem,
    alpha: Vec<i64>,
    activity: Vec<f64>,
    violated: ViolatedSet,
    obj_value: f64,
    best_obj: f64,
    best_alpha: Option<Vec<i64>>,
    pub weights: Weights,
    moves: u64,
}

impl<'p> SolverState<'p> {
    /// Starts from clamp(0, lb, ub) for every variable.
    pub fn new(problem: &'p Problem, zeta: u64) -> Self {
        let alpha = problem.initial_assignment();
        Self::with_assignment(problem, alpha, zeta)
    }

    /// Starts from an explicit in-bounds assignment.
    pub fn with_assignment(problem: &'p Problem, alpha: Vec<i64>, zeta: u64) -> Self {
        assert!(problem.within_bounds(&alpha), "initial assignment outside bounds");
        let m = problem.num_constraints();
        let mut state = Self {
            problem,
            alpha,
            activity: vec![0.0; m],
            violated: ViolatedSet::with_capacity(m),
            obj_value: 0.0,
            best_obj: f64::INFINITY,
            best_alpha: None,
            weights: Weights::new(m, zeta),
            moves: 0,
        };
        state.recompute();
        state
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn alpha(&self) -> &[i64] {
        &self.alpha
    }

    pub fn value(&self, j: VarId) -> i64 {
        self.alpha[j]
    }

    pub fn activity(&self, i: ConId) -> f64 {
        self.activity[i]
    }

    pub fn activities(&self) -> &[f64] {
        &self.activity
    }

    pub fn violated(&self) -> &ViolatedSet {
        &self.violated
    }

    pub fn is_feasible(&self) -> bool {
        self.violated.is_empty()
    }

    pub fn obj_value(&self) -> f64 {
        self.obj_value
    }

    /// Best objective found so far, `+inf` before the first feasible point.
    pub fn best_obj(&self) -> f64 {
        self.best_obj
    }

    pub fn best_alpha(&self) -> Option<&[i64]> {
        self.best_alpha.as_deref()
    }

    pub fn moves_applied(&self) -> u64 {
        self.moves
    }

    /// Violation of constraint `i` at the current assignment.
    pub fn violation(&self, i: ConId) -> f64 {
        let c = self.problem.constraint(i);
        violation_amount(c.sense, self.activity[i], c.rhs)
    }

    pub fn is_violated(&self, i: ConId) -> bool {
        self.violated.contains(i)
    }

    pub fn sense(&self, i: ConId) -> Sense {
        self.problem.constraint(i).sense
    }

    /// Recomputes activities, violations and the objective from scratch.
    pub fn recompute(&mut self) {
        for (i, c) in self.problem.constraints().iter().enumerate() {
            self.activity[i] = c.body.eval(&self.alpha);
            self.refresh_violation(i);
        }
        self.obj_value = self.problem.objective().eval(&self.alpha);
    }

    fn refresh_violation(&mut self, i: ConId) {
        if self.violation(i) > 0.0 {
            self.violated.insert(i);
        } else {
            self.violated.remove(i);
        }
    }

    /// Records the current assignment as best if it is feasible and strictly
    /// better. Returns whether it was recorded.
    pub fn update_best(&mut self) -> bool {
        if self.violated.is_empty() && self.obj_value < self.best_obj {
            self.best_obj = self.obj_value;
            match &mut self.best_alpha {
                Some(b) => b.copy_from_slice(&self.alpha),
                None => self.best_alpha = Some(self.alpha.clone()),
            }
            true
        } else {
            false
        }
    }

    /// Sets one variable, updating every dependent quantity.
    pub fn set_value(&mut self, j: VarId, new: i64) -> Result<(), EvalError> {
        let var = self.problem.variables().get(j).ok_or(EvalError::NoSuchVar(j))?;
        if !var.contains(new) {
            return Err(EvalError::OutOfBounds { var: j, value: new });
        }
        self.assign(j, new);
        Ok(())
    }

    fn assign(&mut self, j: VarId, new: i64) {
        let old = self.alpha[j];
        if old == new {
            return;
        }
        let problem = self.problem;
        for occ in problem.occurrence(j) {
            let t = problem.constraint(occ.con).terms().at(occ.slot);
            self.activity[occ.con] += t.delta(&self.alpha, old, new);
            self.refresh_violation(occ.con);
        }
        if let Some(t) = problem.objective_terms().get(j) {
            self.obj_value += t.delta(&self.alpha, old, new);
        }
        self.alpha[j] = new;
    }

    /// Commits a move. Rejected moves leave the state untouched.
    ///
    /// Two-variable moves are applied as the primary change followed by the
    /// auxiliary one. The best record is updated on strict improvement.
    pub fn apply_move(&mut self, mv: &Move) -> Result<(), EvalError> {
        for (j, v) in mv.changes() {
            let var = self.problem.variables().get(j).ok_or(EvalError::NoSuchVar(j))?;
            if !var.contains(v) {
                return Err(EvalError::OutOfBounds { var: j, value: v });
            }
        }
        for (j, v) in mv.changes() {
            self.assign(j, v);
        }
        self.moves += 1;
        if self.moves.is_multiple_of(RECOMPUTE_PERIOD) {
            self.recompute();
        }
        self.update_best();
        Ok(())
    }

    /// Objective change if the given changes were applied in order.
    pub fn objective_delta(&self, changes: &[(VarId, i64)]) -> f64 {
        let terms = self.problem.objective_terms();
        match *changes {
            [(j, v)] => terms.get(j).map_or(0.0, |t| t.delta(&self.alpha, self.alpha[j], v)),
            [(j, vj), (k, vk)] => {
                let dj = terms.get(j).map_or(0.0, |t| t.delta(&self.alpha, self.alpha[j], vj));
                let dk = terms.get(k).map_or(0.0, |t| {
                    change(t.square, t.slope_with(&self.alpha, j, vj), self.alpha[k], vk)
                });
                dj + dk
            }
            _ => {
                let mut probe = self.alpha.clone();
                let mut d = 0.0;
                for &(j, v) in changes {
                    if let Some(t) = terms.get(j) {
                        d += t.delta(&probe, probe[j], v);
                    }
                    probe[j] = v;
                }
                d
            }
        }
    }

    /// Largest relative gap between maintained and recomputed values.
    pub fn drift(&self) -> f64 {
        let rel = |kept: f64, fresh: f64| (kept - fresh).abs() / (1.0 + fresh.abs());
        let obj = rel(self.obj_value, self.problem.objective().eval(&self.alpha));
        self.problem
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, c)| rel(self.activity[i], c.body.eval(&self.alpha)))
            .fold(obj, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{QuadExpr, RawSense};
    use crate::testutil::problem;
    use crate::operators::{Move, MoveKind};


    fn single(j: VarId, v: i64) -> Move {
        Move { kind: MoveKind::Sat, var: j, value: v, aux: None, origin: None }
    }

    #[test]
    fn initial_values_are_clamped_zero() {
        let p = problem(&[(-5.0, 5.0), (2.0, 9.0), (-9.0, -3.0)], QuadExpr::new(), vec![]);
        let s = SolverState::new(&p, 100);
        assert_eq!(s.alpha(), &[0, 2, -3]);
        assert!(s.best_alpha().is_none());
        assert_eq!(s.best_obj(), f64::INFINITY);
    }

    #[test]
    fn violation_values() {
        let mut sum = QuadExpr::new();
        sum.add_linear(0, 1.0).add_linear(1, 1.0);
        let mut sq = QuadExpr::new();
        sq.add_quadratic(0, 0, 1.0);
        let p = problem(
            &[(-10.0, 10.0), (-10.0, 10.0)],
            QuadExpr::new(),
            vec![(sum, RawSense::Le, 5.0), (sq, RawSense::Eq, 4.0)],
        );
        let s = SolverState::with_assignment(&p, vec![2, 6], 100);
        assert_eq!(s.violation(0), 3.0);
        assert_eq!(s.violation(1), 0.0);
        assert_eq!(s.violated().sorted(), vec![0]);
    }

    #[test]
    fn quadratic_activity_update() {
        let mut sq = QuadExpr::new();
        sq.add_quadratic(0, 0, 1.0);
        let p = problem(&[(-10.0, 10.0)], QuadExpr::new(), vec![(sq, RawSense::Le, 9.0)]);
        let mut s = SolverState::with_assignment(&p, vec![5], 100);
        assert_eq!(s.activity(0), 25.0);
        assert_eq!(s.violation(0), 16.0);
        s.apply_move(&single(0, 3)).unwrap();
        assert_eq!(s.activity(0), 9.0);
        assert_eq!(s.violation(0), 0.0);
        assert!(s.is_feasible());
    }

    #[test]
    fn pair_move_objective() {
        let mut obj = QuadExpr::new();
        obj.add_quadratic(0, 0, 1.0).add_quadratic(1, 1, 1.0);
        let p = problem(&[(-5.0, 5.0), (-5.0, 5.0)], obj, vec![]);
        let mut s = SolverState::with_assignment(&p, vec![3, 1], 100);
        assert_eq!(s.obj_value(), 10.0);
        let mv = Move { kind: MoveKind::Inc, var: 0, value: 2, aux: Some((1, 2)), origin: None };
        assert_eq!(s.objective_delta(&[(0, 2), (1, 2)]), -2.0);
        s.apply_move(&mv).unwrap();
        assert_eq!(s.obj_value(), 8.0);
        assert_eq!(s.alpha(), &[2, 2]);
    }

    #[test]
    fn best_record_strict_update() {
        let mut obj = QuadExpr::new();
        obj.add_linear(0, 1.0);
        let p = problem(&[(0.0, 20.0)], obj, vec![]);
        let mut s = SolverState::with_assignment(&p, vec![9], 100);
        assert!(s.update_best());
        assert_eq!(s.best_obj(), 9.0);
        s.apply_move(&single(0, 7)).unwrap();
        assert_eq!(s.best_obj(), 7.0);
        assert_eq!(s.best_alpha(), Some(&[7][..]));
        s.apply_move(&single(0, 12)).unwrap();
        assert_eq!(s.best_obj(), 7.0);
        assert_eq!(s.best_alpha(), Some(&[7][..]));
    }

    #[test]
    fn out_of_bounds_rejected_without_change() {
        let mut c = QuadExpr::new();
        c.add_linear(0, 1.0).add_linear(1, 1.0);
        let p = problem(&[(0.0, 3.0), (0.0, 3.0)], QuadExpr::new(), vec![(c, RawSense::Le, 2.0)]);
        let mut s = SolverState::with_assignment(&p, vec![1, 1], 100);
        let mv = Move { kind: MoveKind::Inc, var: 0, value: 2, aux: Some((1, 9)), origin: None };
        assert_eq!(s.apply_move(&mv), Err(EvalError::OutOfBounds { var: 1, value: 9 }));
        assert_eq!(s.alpha(), &[1, 1]);
        assert_eq!(s.activity(0), 2.0);
        assert_eq!(s.moves_applied(), 0);
    }

    #[test]
    fn cross_terms_pair_move_matches_recompute() {
        // c: 2xy + x^2 - 3y <= 100, obj: xy - x
        let mut c = QuadExpr::new();
        c.add_quadratic(0, 1, 2.0).add_quadratic(0, 0, 1.0).add_linear(1, -3.0);
        let mut obj = QuadExpr::new();
        obj.add_quadratic(0, 1, 1.0).add_linear(0, -1.0);
        let p = problem(&[(-9.0, 9.0), (-9.0, 9.0)], obj, vec![(c, RawSense::Le, 100.0)]);
        let mut s = SolverState::with_assignment(&p, vec![2, -4], 100);
        let predicted = s.obj_value() + s.objective_delta(&[(0, -3), (1, 5)]);
        let mv = Move { kind: MoveKind::Inc, var: 0, value: -3, aux: Some((1, 5)), origin: None };
        s.apply_move(&mv).unwrap();
        assert_eq!(s.obj_value(), predicted);
        assert_eq!(s.obj_value(), p.objective().eval(&[-3, 5]));
        assert_eq!(s.activity(0), p.constraint(0).body.eval(&[-3, 5]));
        assert!(s.drift() < 1e-12);
    }
}
