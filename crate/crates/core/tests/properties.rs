//! Property tests for the model, evaluator, scoring and operators.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iqpls::evaluator::SolverState;
use iqpls::model::{coeff_view, normalize, Category, ExprRef, Problem};
use iqpls::operators::{exp_move, free_move, repair_move, sat_moves};
use iqpls::oracle::{gen_random, point_feasible, GenSpec};
use iqpls::scoring::{penalty, score, Regime, OBJ_NOISE};
use iqpls::{parse_canonical, write_canonical};

const CATEGORIES: [Category; 4] = [Category::Qubo, Category::Lcqp, Category::Qclp, Category::Qcqp];

fn instance() -> impl Strategy<Value = Problem> {
    (0..4usize, 1..7usize, 0..5usize, any::<u64>(), 0.0..1.0f64, 1..8i64).prop_map(|(c, n, m, seed, eq, bw)| {
        let category = CATEGORIES[c];
        let m = if category == Category::Qubo { 0 } else { m.max(1) };
        let mut spec = GenSpec::new(category, n, m, seed);
        spec.eq_fraction = eq;
        spec.bound_width = bw;
        gen_random(&spec).expect("valid spec")
    })
}

fn random_point(p: &Problem, rng: &mut ChaCha8Rng) -> Vec<i64> {
    p.variables()
        .iter()
        .map(|v| rng.gen_range(v.lb.unwrap_or(-20)..=v.ub.unwrap_or(20)))
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Total weighted penalty plus the weighted objective, computed from scratch.
fn energy(state: &SolverState<'_>, x: &[i64], regime: Regime) -> (f64, f64) {
    let p = state.problem();
    let pen = p
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, c)| penalty(state.weights.con(i), c.sense, c.body.eval(x), c.rhs, regime))
        .sum();
    (pen, p.objective().eval(x))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coeff_view_reconstructs_expressions(p in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(&p, &mut rng);
        let mut targets: Vec<(ExprRef, &iqpls::model::QuadExpr)> = vec![(ExprRef::Objective, p.objective())];
        targets.extend(p.constraints().iter().enumerate().map(|(i, c)| (ExprRef::Constraint(i), &c.body)));
        for (ctx, expr) in targets {
            for j in expr.vars() {
                let view = coeff_view(&p, ctx, j, &x).unwrap();
                prop_assert!(close(view.eval(x[j] as f64), expr.eval(&x)));
                let mut y = x.clone();
                y[j] += rng.gen_range(-5..=5);
                prop_assert!(close(view.eval(y[j] as f64), expr.eval(&y)));
            }
        }
    }

    #[test]
    fn normalize_is_idempotent(p in instance()) {
        let again = normalize(p.to_raw()).unwrap();
        prop_assert_eq!(&again, &p);
    }

    #[test]
    fn canonical_round_trip(p in instance()) {
        let text = write_canonical(&p);
        let back = normalize(parse_canonical(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_canonical(&back), text);
    }

    #[test]
    fn incremental_state_tracks_recomputation(p in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = SolverState::new(&p, 100);
        for _ in 0..200 {
            let j = rng.gen_range(0..p.num_vars());
            let v = p.variable(j);
            state.set_value(j, rng.gen_range(v.lb.unwrap()..=v.ub.unwrap())).unwrap();
        }
        prop_assert!(state.drift() <= 1e-9);
        let alpha = state.alpha().to_vec();
        prop_assert_eq!(state.is_feasible(), p.is_feasible(&alpha));
        for (i, c) in p.constraints().iter().enumerate() {
            let violated = iqpls::model::violation_amount(c.sense, c.body.eval(&alpha), c.rhs) > 0.0;
            prop_assert_eq!(state.is_violated(i), violated);
        }
    }

    #[test]
    fn score_matches_recomputed_energy(p in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(&p, &mut rng);
        let mut state = SolverState::with_assignment(&p, x.clone(), 100);
        for i in 0..p.num_constraints() {
            state.weights.set_con(i, rng.gen_range(1..20));
        }
        state.weights.set_obj(rng.gen_range(1..20));
        let regime = Regime::of(&state);
        let w_obj = state.weights.obj() as f64;
        for _ in 0..20 {
            let j = rng.gen_range(0..p.num_vars());
            let mut y = x.clone();
            y[j] = p.variable(j).clamp(y[j] + rng.gen_range(-3..=3));
            let mv = iqpls::operators::Move {
                kind: iqpls::operators::MoveKind::Sat,
                var: j,
                value: y[j],
                aux: None,
                origin: None,
            };
            let (pen0, obj0) = energy(&state, &x, regime);
            let (pen1, obj1) = energy(&state, &y, regime);
            let d = obj0 - obj1;
            let obj_score = match regime {
                _ if d.abs() < OBJ_NOISE => 0.0,
                Regime::Infeasible => w_obj * d.signum(),
                Regime::Feasible => w_obj * d,
            };
            let expected = pen0 - pen1 + obj_score;
            let got = score(&state, &mv).score;
            prop_assert!((got - expected).abs() <= 1e-6 * (1.0 + expected.abs()), "{} vs {}", got, expected);
        }
    }

    #[test]
    fn operators_keep_their_promises(p in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(&p, &mut rng);
        let state = SolverState::with_assignment(&p, x.clone(), 100);
        let apply = |j: usize, v: i64| {
            let mut y = x.clone();
            y[j] = v;
            y
        };
        for (i, c) in p.constraints().iter().enumerate() {
            let before = state.violation(i);
            for j in c.vars() {
                for mv in sat_moves(&state, i, j) {
                    let y = apply(j, mv.value);
                    prop_assert!(p.variable(j).contains(mv.value));
                    prop_assert!(iqpls::model::violation_amount(c.sense, c.body.eval(&y), c.rhs) == 0.0);
                }
                if let Some(mv) = repair_move(&state, i, j) {
                    let y = apply(j, mv.value);
                    prop_assert!(p.variable(j).contains(mv.value));
                    prop_assert!(iqpls::model::violation_amount(c.sense, c.body.eval(&y), c.rhs) < before);
                }
                if let Some(mv) = exp_move(&state, i, j) {
                    let y = apply(j, mv.value);
                    prop_assert!(iqpls::model::violation_amount(c.sense, c.body.eval(&y), c.rhs) == 0.0);
                    prop_assert!(p.objective().eval(&y) < p.objective().eval(&x));
                }
            }
        }
        for &j in p.free_vars() {
            if let Some(mv) = free_move(&state, j) {
                prop_assert!(p.variable(j).contains(mv.value));
                prop_assert!(p.objective().eval(&apply(j, mv.value)) < p.objective().eval(&x));
            }
        }
    }

    #[test]
    fn oracle_feasibility_agrees_with_model(p in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let x = random_point(&p, &mut rng);
            prop_assert_eq!(point_feasible(&p, &x), p.is_feasible(&x));
        }
    }
}
