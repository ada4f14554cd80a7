//! Constraint and objective weights, penalties, move scores and BMS
//! selection.

use rand::Rng;

use crate::evaluator::SolverState;
use crate::model::{change, violation_amount, ConId, Sense};
use crate::operators::Move;

/// Objective deltas smaller than this count as no change.
pub const OBJ_NOISE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights {
    con: Vec<u64>,
    obj: u64,
    zeta: u64,
}

impl Weights {
    pub fn new(m: usize, zeta: u64) -> Self {
        assert!(zeta >= 1, "objective weight cap must be at least 1");
        Self { con: vec![1; m], obj: 1, zeta }
    }

    pub fn con(&self, i: ConId) -> u64 {
        self.con[i]
    }

    pub fn all_con(&self) -> &[u64] {
        &self.con
    }

    pub fn obj(&self) -> u64 {
        self.obj
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    pub fn set_con(&mut self, i: ConId, w: u64) {
        assert!(w >= 1);
        self.con[i] = w;
    }

    pub fn set_obj(&mut self, w: u64) {
        assert!(w >= 1 && w <= self.zeta);
        self.obj = w;
    }
}

/// Which penalty definition applies; fixed by the feasibility of the
/// current assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Infeasible,
    Feasible,
}

impl Regime {
    pub fn of(state: &SolverState<'_>) -> Self {
        if state.is_feasible() {
            Regime::Feasible
        } else {
            Regime::Infeasible
        }
    }
}

/// Penalty of a row with the given weight at `activity`.
#[inline]
pub fn penalty(weight: u64, sense: Sense, activity: f64, rhs: f64, regime: Regime) -> f64 {
    let v = violation_amount(sense, activity, rhs);
    match regime {
        Regime::Infeasible => {
            if v > 0.0 {
                weight as f64
            } else {
                0.0
            }
        }
        Regime::Feasible => weight as f64 * v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredMove {
    pub mv: Move,
    pub score: f64,
}

impl ScoredMove {
    pub fn decreasing(&self) -> bool {
        self.score > 0.0
    }
}

fn sign(d: f64) -> f64 {
    if d.abs() < OBJ_NOISE {
        0.0
    } else {
        d.signum()
    }
}

/// Scores a move against the current state without applying it.
///
/// Only constraints containing a changed variable contribute to the
/// constraint score; all other penalty terms cancel.
pub fn score(state: &SolverState<'_>, mv: &Move) -> ScoredMove {
    let problem = state.problem();
    let regime = Regime::of(state);
    let alpha = state.alpha();
    let mut con_score = 0.0;

    let mut add = |i: ConId, delta: f64| {
        let c = problem.constraint(i);
        let w = state.weights.con(i);
        let before = state.activity(i);
        con_score += penalty(w, c.sense, before, c.rhs, regime)
            - penalty(w, c.sense, before + delta, c.rhs, regime);
    };

    let (j, vj) = (mv.var, mv.value);
    let old_j = alpha[j];
    match mv.aux {
        None => {
            for occ in problem.occurrence(j) {
                let t = problem.constraint(occ.con).terms().at(occ.slot);
                add(occ.con, t.delta(alpha, old_j, vj));
            }
        }
        Some((k, vk)) => {
            let old_k = alpha[k];
            for occ in problem.occurrence(j) {
                let terms = problem.constraint(occ.con).terms();
                let mut d = terms.at(occ.slot).delta(alpha, old_j, vj);
                if let Some(tk) = terms.get(k) {
                    d += change(tk.square, tk.slope_with(alpha, j, vj), old_k, vk);
                }
                add(occ.con, d);
            }
            for occ in problem.occurrence(k) {
                let terms = problem.constraint(occ.con).terms();
                if terms.contains(j) {
                    continue;
                }
                add(occ.con, terms.at(occ.slot).delta(alpha, old_k, vk));
            }
        }
    }

    let delta_obj = -state.objective_delta(&mv.changes());
    let w_obj = state.weights.obj() as f64;
    let obj_score = match regime {
        Regime::Infeasible => w_obj * sign(delta_obj),
        Regime::Feasible => {
            if delta_obj.abs() < OBJ_NOISE {
                0.0
            } else {
                w_obj * delta_obj
            }
        }
    };
    ScoredMove { mv: *mv, score: con_score + obj_score }
}

/// Weight update applied when no decreasing move was found.
pub fn update_weights(state: &mut SolverState<'_>) {
    for idx in 0..state.violated().len() {
        let i = state.violated().as_slice()[idx];
        let w = state.weights.con(i);
        state.weights.set_con(i, w + 1);
    }
    let w_obj = state.weights.obj();
    if state.best_alpha().is_some() && state.obj_value() > state.best_obj() && w_obj < state.weights.zeta() {
        state.weights.set_obj(w_obj + 1);
    }
}

/// Best-from-multiple-selections.
///
/// Calls `draw` `t` times; every call may push zero or more candidate moves
/// into the buffer. Each candidate is scored, and the best one is returned
/// (ties go to the earliest drawn). With `require_decreasing` only moves with
/// a positive score qualify.
pub fn bms_select<R, F>(
    state: &SolverState<'_>,
    rng: &mut R,
    t: usize,
    require_decreasing: bool,
    mut draw: F,
) -> Option<ScoredMove>
where
    R: Rng + ?Sized,
    F: FnMut(&SolverState<'_>, &mut R, &mut Vec<Move>),
{
    let mut buf = Vec::with_capacity(4);
    let mut best: Option<ScoredMove> = None;
    for _ in 0..t {
        buf.clear();
        draw(state, rng, &mut buf);
        for mv in &buf {
            let s = score(state, mv);
            if require_decreasing && !s.decreasing() {
                continue;
            }
            if best.is_none_or(|b| s.score > b.score) {
                best = Some(s);
            }
        }
    }
    best
}
