//! Two-mode local search: a satisfying mode while constraints are violated
//! and an optimization mode once the assignment is feasible.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaluator::SolverState;
use crate::model::{ConId, Problem, Sense, VarId};
use crate::operators::{exp_move, free_move, inc_move, repair_move, sat_moves, Move, PairTheta};
use crate::scoring::{bms_select, update_weights};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("BMS sample count must be at least 1")]
    ZeroSamples,
    #[error("objective weight cap must be at least 1")]
    ZeroZeta,
    #[error("time limit must be positive, got {0}")]
    BadTimeLimit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock cutoff in seconds.
    pub time_limit: f64,
    pub seed: u64,
    /// Samples per BMS call.
    pub bms_samples: usize,
    /// Cap on the objective weight.
    pub zeta: u64,
    pub disable_exp: bool,
    pub disable_inc: bool,
    pub disable_free: bool,
    /// Reading of the objective slice used by the equality incremental move.
    pub pair_theta: PairTheta,
    /// Optional iteration budget. Runs that stop on this budget rather than
    /// on the clock are fully reproducible.
    pub max_iterations: Option<u64>,
    /// Iterations without a new best (or a single iteration without any
    /// move) after which one random variable is reassigned. 0 disables it,
    /// leaving weighting as the only escape.
    pub stagnation_limit: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit: 10.0,
            seed: 1,
            bms_samples: 100,
            zeta: 100,
            disable_exp: false,
            disable_inc: false,
            disable_free: false,
            pair_theta: PairTheta::Union,
            max_iterations: None,
            stagnation_limit: 1000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bms_samples == 0 {
            return Err(ConfigError::ZeroSamples);
        }
        if self.zeta == 0 {
            return Err(ConfigError::ZeroZeta);
        }
        if self.time_limit.is_nan() || self.time_limit <= 0.0 {
            return Err(ConfigError::BadTimeLimit(self.time_limit));
        }
        Ok(())
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: u64) -> Self {
        self.max_iterations = Some(n);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    /// No feasible assignment found before the cutoff.
    NotFound,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Feasible => "FEASIBLE",
            Status::NotFound => "NA",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: u64,
    pub moves: u64,
    pub weight_updates: u64,
    pub mode_switches: u64,
    /// Random reassignments made to leave a stalled search.
    pub perturbations: u64,
    /// Iteration at which the final best was recorded.
    pub best_iteration: Option<u64>,
    /// Seconds from the start of the search to the final best.
    pub time_to_best: Option<f64>,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Best objective in the problem's declared sense.
    pub objective: Option<f64>,
    pub assignment: Option<Vec<i64>>,
    pub stats: SolveStats,
}

/// Per-variable candidate combinations for the optimization mode.
#[derive(Debug, Clone)]
struct VarCombos {
    var: VarId,
    le: Vec<ConId>,
    /// Equality rows with the running count of `(row, aux)` pairs before each.
    eq: Vec<(ConId, usize)>,
    eq_pairs: usize,
    free: bool,
}

impl VarCombos {
    fn count(&self) -> usize {
        self.le.len() + self.eq_pairs + usize::from(self.free)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Satisfying,
    Optimizing,
}

pub struct Solver<'p> {
    state: SolverState<'p>,
    rng: ChaCha8Rng,
    config: SolverConfig,
    /// One entry per objective variable.
    combos: Vec<VarCombos>,
    /// Indices into `combos` with at least one candidate.
    active: Vec<usize>,
    stats: SolveStats,
    last_mode: Option<Mode>,
    /// Iterations since the last new best or perturbation.
    stalled: u64,
    /// Perturbations since the last new best.
    streak: usize,
}

impl<'p> Solver<'p> {
    pub fn new(problem: &'p Problem, config: SolverConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let combos: Vec<VarCombos> = problem
            .objective_vars()
            .iter()
            .map(|&v| {
                let mut le = Vec::new();
                let mut eq = Vec::new();
                let mut eq_pairs = 0;
                for occ in problem.occurrence(v) {
                    let c = problem.constraint(occ.con);
                    match c.sense {
                        Sense::Le if !config.disable_exp => le.push(occ.con),
                        Sense::Eq if !config.disable_inc && c.num_vars() > 1 => {
                            eq.push((occ.con, eq_pairs));
                            eq_pairs += c.num_vars() - 1;
                        }
                        _ => {}
                    }
                }
                let free = !config.disable_free && problem.is_free(v);
                VarCombos { var: v, le, eq, eq_pairs, free }
            })
            .collect();
        let active = (0..combos.len()).filter(|&i| combos[i].count() > 0).collect();
        Ok(Self {
            state: SolverState::new(problem, config.zeta),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            combos,
            active,
            stats: SolveStats::default(),
            last_mode: None,
            stalled: 0,
            streak: 0,
        })
    }

    pub fn state(&self) -> &SolverState<'p> {
        &self.state
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Runs until the time limit (or iteration budget) is exhausted.
    pub fn run(mut self) -> SolveResult {
        let start = Instant::now();
        let limit = Duration::from_secs_f64(self.config.time_limit);
        loop {
            if start.elapsed() >= limit {
                break;
            }
            if self.config.max_iterations.is_some_and(|n| self.stats.iterations >= n) {
                break;
            }
            let before = self.state.best_obj();
            self.state.update_best();
            let moves = self.state.moves_applied();
            self.step();
            if self.state.best_obj() < before {
                self.stats.best_iteration = Some(self.stats.iterations);
                self.stats.time_to_best = Some(start.elapsed().as_secs_f64());
                self.stalled = 0;
                self.streak = 0;
            } else {
                self.stalled += 1;
            }
            let limit = self.config.stagnation_limit;
            if limit > 0 && (self.stalled >= limit || self.state.moves_applied() == moves) {
                self.perturb();
                self.stalled = 0;
            }
        }
        // The final state may be a new best that no later iteration saw.
        let before = self.state.best_obj();
        if self.state.update_best() && self.state.best_obj() < before {
            self.stats.best_iteration = Some(self.stats.iterations);
            self.stats.time_to_best = Some(start.elapsed().as_secs_f64());
        }
        self.stats.elapsed = start.elapsed().as_secs_f64();
        self.stats.moves = self.state.moves_applied();
        self.finish()
    }

    fn finish(self) -> SolveResult {
        let problem = self.state.problem();
        match self.state.best_alpha() {
            Some(best) if problem.is_feasible(best) => SolveResult {
                status: Status::Feasible,
                objective: Some(problem.to_original_objective(problem.objective().eval(best))),
                assignment: Some(best.to_vec()),
                stats: self.stats,
            },
            _ => SolveResult { status: Status::NotFound, objective: None, assignment: None, stats: self.stats },
        }
    }

    /// One iteration of the outer loop: a satisfying step if anything is
    /// violated, otherwise an optimization step.
    pub fn step(&mut self) {
        let mode = if self.state.is_feasible() { Mode::Optimizing } else { Mode::Satisfying };
        if self.last_mode.is_some_and(|m| m != mode) {
            self.stats.mode_switches += 1;
        }
        self.last_mode = Some(mode);
        match mode {
            Mode::Satisfying => self.satisfying_step(),
            Mode::Optimizing => self.optimization_step(),
        }
        self.stats.iterations += 1;
    }

    /// Reassigns random variables to random values in their bounds (within
    /// 10 of the current value when a side is unbounded). Each perturbation
    /// without a new best since the last one touches one more variable,
    /// cycling back to one after all of them.
    pub fn perturb(&mut self) {
        let problem = self.state.problem();
        let n = problem.num_vars();
        let k = 1 + self.streak % n;
        for j in rand::seq::index::sample(&mut self.rng, n, k) {
            let var = problem.variable(j);
            let cur = self.state.value(j);
            let lo = var.lb.unwrap_or(cur.saturating_sub(10));
            let hi = var.ub.unwrap_or(cur.saturating_add(10));
            if lo >= hi {
                continue;
            }
            let mut v = self.rng.gen_range(lo..hi);
            if v >= cur {
                v += 1;
            }
            self.state.set_value(j, v).expect("value drawn inside the bounds");
        }
        self.streak += 1;
        self.stats.perturbations += 1;
    }

    fn commit(&mut self, mv: &Move) {
        self.state.apply_move(mv).expect("operators only emit in-bounds moves");
    }

    /// Satisfying-mode iteration.
    pub fn satisfying_step(&mut self) {
        assert!(!self.state.is_feasible(), "satisfying step on a feasible assignment");
        let t = self.config.bms_samples;
        let found = bms_select(&self.state, &mut self.rng, t, true, |s, rng, buf| {
            let c = *s.violated().as_slice().choose(rng).expect("violated set is non-empty");
            sat_candidates(s, c, random_var_of(s, c, rng), buf);
        });
        if let Some(best) = found {
            self.commit(&best.mv);
            return;
        }

        update_weights(&mut self.state);
        self.stats.weight_updates += 1;
        for _ in 0..self.state.problem().num_constraints() {
            let c = *self.state.violated().as_slice().choose(&mut self.rng).expect("non-empty");
            let best = bms_select(&self.state, &mut self.rng, t, false, |s, rng, buf| {
                sat_candidates(s, c, random_var_of(s, c, rng), buf);
            });
            if let Some(best) = best {
                self.commit(&best.mv);
                return;
            }
        }
    }

    /// Optimization-mode iteration.
    pub fn optimization_step(&mut self) {
        assert!(self.state.is_feasible(), "optimization step with violated constraints");
        let t = self.config.bms_samples;
        let theta = self.config.pair_theta;
        let combos = &self.combos;
        let active = &self.active;
        let found = if active.is_empty() {
            None
        } else {
            bms_select(&self.state, &mut self.rng, t, true, |s, rng, buf| {
                let vc = &combos[active[rng.gen_range(0..active.len())]];
                buf.extend(sample_combo(s, vc, rng, theta));
            })
        };
        if let Some(best) = found {
            self.commit(&best.mv);
            return;
        }

        update_weights(&mut self.state);
        self.stats.weight_updates += 1;
        for _ in 0..combos.len() {
            let vc = &combos[self.rng.gen_range(0..combos.len())];
            if vc.count() == 0 {
                continue;
            }
            let best = bms_select(&self.state, &mut self.rng, t, false, |s, rng, buf| {
                buf.extend(sample_combo(s, vc, rng, theta));
            });
            if let Some(best) = best {
                self.commit(&best.mv);
                return;
            }
        }
    }
}

/// Satisfying moves for `x_j` on `c`, or the best partial repair when
/// there are none.
fn sat_candidates(s: &SolverState<'_>, c: ConId, j: VarId, buf: &mut Vec<Move>) {
    let before = buf.len();
    buf.extend(sat_moves(s, c, j));
    if buf.len() == before {
        buf.extend(repair_move(s, c, j));
    }
}

fn random_var_of<R: Rng>(s: &SolverState<'_>, c: ConId, rng: &mut R) -> VarId {
    let terms = s.problem().constraint(c).terms();
    terms.at(rng.gen_range(0..terms.len())).var
}

/// Draws one (operator, row, aux) combination for a variable uniformly and
/// evaluates it.
fn sample_combo<R: Rng>(s: &SolverState<'_>, vc: &VarCombos, rng: &mut R, theta: PairTheta) -> Option<Move> {
    let mut r = rng.gen_range(0..vc.count());
    if r < vc.le.len() {
        return exp_move(s, vc.le[r], vc.var);
    }
    r -= vc.le.len();
    if r < vc.eq_pairs {
        let pos = vc.eq.partition_point(|&(_, start)| start <= r) - 1;
        let (con, start) = vc.eq[pos];
        let k = r - start;
        let terms = s.problem().constraint(con).terms();
        let own = terms.slot(vc.var).expect("variable occurs in its own row");
        let aux = terms.at(if k >= own { k + 1 } else { k }).var;
        return inc_move(s, con, vc.var, aux, theta);
    }
    free_move(s, vc.var)
}

/// Runs the solver on `problem` with `config`.
pub fn solve(problem: &Problem, config: &SolverConfig) -> Result<SolveResult, ConfigError> {
    Ok(Solver::new(problem, config.clone())?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{expr, problem};
    use crate::model::RawSense;

    const WIDE: (f64, f64) = (-5.0, 5.0);

    fn quick(seconds: f64) -> SolverConfig {
        SolverConfig::default().with_time_limit(seconds)
    }

    #[test]
    fn config_validation() {
        assert_eq!(SolverConfig { bms_samples: 0, ..Default::default() }.validate(), Err(ConfigError::ZeroSamples));
        assert_eq!(SolverConfig { zeta: 0, ..Default::default() }.validate(), Err(ConfigError::ZeroZeta));
        assert!(matches!(quick(0.0).validate(), Err(ConfigError::BadTimeLimit(_))));
        assert!(quick(f64::NAN).validate().is_err());
    }

    #[test]
    fn equality_constrained_sum_of_squares() {
        let p = problem(
            &[WIDE, WIDE],
            expr(&[], &[(0, 0, 1.0), (1, 1, 1.0)]),
            vec![(expr(&[(0, 1.0), (1, 1.0)], &[]), RawSense::Eq, 4.0)],
        );
        let r = solve(&p, &quick(0.3)).unwrap();
        assert_eq!(r.status, Status::Feasible);
        assert_eq!(r.objective, Some(8.0));
        assert_eq!(r.assignment, Some(vec![2, 2]));
    }

    #[test]
    fn free_variable_minimum() {
        let p = problem(&[(0.0, 10.0)], expr(&[(0, -6.0)], &[(0, 0, 1.0)]), vec![]);
        let r = solve(&p, &quick(0.2)).unwrap();
        assert_eq!(r.objective, Some(-9.0));
        assert_eq!(r.assignment, Some(vec![3]));
    }

    #[test]
    fn infeasible_reports_na() {
        let p = problem(
            &[(f64::NEG_INFINITY, f64::INFINITY)],
            expr(&[(0, 1.0)], &[]),
            vec![(expr(&[(0, 1.0)], &[]), RawSense::Le, 0.0), (expr(&[(0, -1.0)], &[]), RawSense::Le, -1.0)],
        );
        let r = solve(&p, &quick(0.2)).unwrap();
        assert_eq!(r.status, Status::NotFound);
        assert!(r.objective.is_none());
        assert!(r.stats.weight_updates > 0);
    }

    #[test]
    fn single_violated_row_is_repaired() {
        let p = problem(&[(-10.0, 10.0)], crate::model::QuadExpr::new(), vec![(expr(&[(0, 2.0)], &[]), RawSense::Le, 6.0)]);
        let mut solver = Solver::new(&p, quick(1.0)).unwrap();
        solver.state.set_value(0, 5).unwrap();
        solver.satisfying_step();
        assert_eq!(solver.state().value(0), 3);
        assert!(solver.state().is_feasible());
    }

    #[test]
    #[should_panic(expected = "satisfying step on a feasible assignment")]
    fn satisfying_step_requires_violation() {
        let p = problem(&[WIDE], expr(&[(0, 1.0)], &[]), vec![]);
        let mut solver = Solver::new(&p, quick(1.0)).unwrap();
        solver.satisfying_step();
    }

    #[test]
    fn free_move_committed_in_optimization() {
        let p = problem(&[(-10.0, 10.0)], expr(&[(0, -8.0)], &[(0, 0, 2.0)]), vec![]);
        let mut solver = Solver::new(&p, quick(1.0)).unwrap();
        solver.optimization_step();
        assert_eq!(solver.state().value(0), 2);
        assert_eq!(solver.state().obj_value(), -8.0);
    }

    #[test]
    fn exploration_move_committed() {
        let p = problem(&[WIDE], expr(&[(0, -1.0)], &[]), vec![(expr(&[], &[(0, 0, 1.0)]), RawSense::Le, 9.0)]);
        let mut solver = Solver::new(&p, quick(1.0)).unwrap();
        solver.optimization_step();
        assert_eq!(solver.state().value(0), 3);
    }

    #[test]
    fn perturbation_leaves_a_coordinate_optimum() {
        // -10 x0 x1 + x0 + x1 on {0,1}^2: from (0,0) neither variable can
        // improve alone, the optimum is (1,1) with -8.
        let p = problem(&[(0.0, 1.0), (0.0, 1.0)], expr(&[(0, 1.0), (1, 1.0)], &[(0, 1, -10.0)]), vec![]);
        let strict = SolverConfig { stagnation_limit: 0, ..quick(10.0).with_max_iterations(2000) };
        let r = solve(&p, &strict).unwrap();
        assert_eq!((r.objective, r.stats.moves, r.stats.perturbations), (Some(0.0), 0, 0));

        let r = solve(&p, &quick(10.0).with_max_iterations(2000)).unwrap();
        assert_eq!(r.objective, Some(-8.0));
        assert!(r.stats.perturbations > 0);
    }

    #[test]
    fn all_operators_disabled_stays_live() {
        let p = problem(&[WIDE], expr(&[(0, 1.0)], &[]), vec![]);
        let cfg = SolverConfig {
            disable_exp: true,
            disable_inc: true,
            disable_free: true,
            time_limit: 0.05,
            stagnation_limit: 0,
            ..Default::default()
        };
        let r = solve(&p, &cfg).unwrap();
        assert_eq!(r.status, Status::Feasible);
        assert_eq!(r.objective, Some(0.0));
        assert_eq!(r.stats.moves, 0);
        assert_eq!(r.stats.weight_updates, r.stats.iterations);
        assert!(r.stats.iterations > 0);
    }

    #[test]
    fn deterministic_under_iteration_budget() {
        let p = problem(
            &[WIDE, WIDE, WIDE],
            expr(&[(2, 3.0)], &[(0, 0, 1.0), (0, 1, -2.0), (1, 1, 2.0)]),
            vec![
                (expr(&[(0, 1.0), (1, 1.0), (2, 1.0)], &[]), RawSense::Eq, 3.0),
                (expr(&[(2, 1.0)], &[(0, 1, 1.0)]), RawSense::Le, 4.0),
            ],
        );
        let cfg = SolverConfig::default().with_time_limit(60.0).with_max_iterations(2000).with_seed(7);
        let mut a = solve(&p, &cfg).unwrap();
        let mut b = solve(&p, &cfg).unwrap();
        for r in [&mut a, &mut b] {
            r.stats.time_to_best = None;
            r.stats.elapsed = 0.0;
        }
        assert_eq!(a, b);
        assert_eq!(a.stats.iterations, 2000);
    }

    #[test]
    fn inc_sampling_covers_every_aux() {
        // x in V(f); equality over x, y, z: aux must be drawn from {y, z}.
        let p = problem(
            &[WIDE, WIDE, WIDE],
            expr(&[], &[(1, 1, 1.0)]),
            vec![(expr(&[(0, 1.0), (1, 1.0), (2, 1.0)], &[]), RawSense::Eq, 0.0)],
        );
        let s = SolverState::with_assignment(&p, vec![0, 2, -2], 100);
        let solver = Solver::new(&p, quick(1.0)).unwrap();
        let vc = &solver.combos[0];
        assert_eq!(vc.var, 1);
        assert_eq!(vc.eq_pairs, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            if let Some(m) = sample_combo(&s, vc, &mut rng, PairTheta::Union) {
                seen.insert(m.aux.unwrap().0);
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 2]);
    }
}
