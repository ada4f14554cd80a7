//! The four move operators. Each one is a pure function of the current state
//! and a target; none of them mutates the state.

use arrayvec::ArrayVec;

use crate::evaluator::SolverState;
use crate::model::{change, violation_amount, CoeffView, ConId, Sense, VarId, Variable};

/// Two reals closer than this to an integer are treated as that integer.
pub const ROOT_TOL: f64 = 1e-6;

/// Values beyond this magnitude are never proposed.
const MAX_VALUE: f64 = 9.0e15;

const IMPROVE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Quadratic satisfying move on a violated constraint.
    Sat,
    /// Inequality exploration move.
    Exp,
    /// Equality incremental move (two variables).
    Inc,
    /// Free move on an unconstrained objective variable.
    Free,
    /// Partial repair of a violated constraint when no satisfying move exists.
    Repair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub kind: MoveKind,
    pub var: VarId,
    pub value: i64,
    /// Second variable changed by an equality incremental move.
    pub aux: Option<(VarId, i64)>,
    pub origin: Option<ConId>,
}

impl Move {
    /// Variable changes in application order.
    pub fn changes(&self) -> ArrayVec<(VarId, i64), 2> {
        let mut out = ArrayVec::new();
        out.push((self.var, self.value));
        if let Some(a) = self.aux {
            out.push(a);
        }
        out
    }
}

/// How the equality incremental move measures objective improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairTheta {
    /// Objective terms involving either variable of the pair.
    #[default]
    Union,
    /// Only monomials containing both variables.
    Both,
}

/// Where `a x^2 + h x + g <= 0` holds, as a real set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibleDomain {
    /// `(-inf, x0]`
    LeftRay(f64),
    /// `[x0, +inf)`
    RightRay(f64),
    /// `[x1, x2]`
    Interval(f64, f64),
    /// `(-inf, x1] U [x2, +inf)`
    TwoRays(f64, f64),
    All,
    Empty,
}

type Pieces = ArrayVec<(f64, f64), 2>;

impl FeasibleDomain {
    pub fn of(a: f64, h: f64, g: f64) -> Self {
        if a == 0.0 {
            return if h < 0.0 {
                FeasibleDomain::RightRay(-g / h)
            } else if h > 0.0 {
                FeasibleDomain::LeftRay(-g / h)
            } else if g <= 0.0 {
                FeasibleDomain::All
            } else {
                FeasibleDomain::Empty
            };
        }
        match solve_quadratic(a, h, g) {
            Roots::None => {
                if a > 0.0 {
                    FeasibleDomain::Empty
                } else {
                    FeasibleDomain::All
                }
            }
            Roots::Double(x0) => {
                if a > 0.0 {
                    FeasibleDomain::Interval(x0, x0)
                } else {
                    FeasibleDomain::All
                }
            }
            Roots::Two(x1, x2) => {
                if a > 0.0 {
                    FeasibleDomain::Interval(x1, x2)
                } else {
                    FeasibleDomain::TwoRays(x1, x2)
                }
            }
        }
    }

    /// Intersection with `[lo, hi]` as at most two disjoint closed pieces.
    pub fn intersect(&self, lo: f64, hi: f64) -> Pieces {
        let mut raw: Pieces = ArrayVec::new();
        match *self {
            FeasibleDomain::LeftRay(x) => raw.push((f64::NEG_INFINITY, x)),
            FeasibleDomain::RightRay(x) => raw.push((x, f64::INFINITY)),
            FeasibleDomain::Interval(a, b) => raw.push((a, b)),
            FeasibleDomain::TwoRays(a, b) => {
                raw.push((f64::NEG_INFINITY, a));
                raw.push((b, f64::INFINITY));
            }
            FeasibleDomain::All => raw.push((f64::NEG_INFINITY, f64::INFINITY)),
            FeasibleDomain::Empty => {}
        }
        raw.into_iter()
            .map(|(a, b)| (a.max(lo), b.min(hi)))
            .filter(|&(a, b)| a <= b)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Roots {
    None,
    Double(f64),
    Two(f64, f64),
}

/// Real roots of `a x^2 + b x + c` for `a != 0`, ascending.
fn solve_quadratic(a: f64, b: f64, c: f64) -> Roots {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || disc.is_nan() {
        return Roots::None;
    }
    if disc == 0.0 {
        return Roots::Double(-b / (2.0 * a));
    }
    // Cancellation-free form; q != 0 because disc > 0.
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        Roots::Two(r1, r2)
    } else {
        Roots::Two(r2, r1)
    }
}

fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= ROOT_TOL).then_some(r)
}

fn snap_ceil(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.ceil())
}

fn snap_floor(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.floor())
}

fn to_int(x: f64) -> Option<i64> {
    (x.is_finite() && x.abs() < MAX_VALUE).then_some(x as i64)
}

#[inline]
fn improves(delta: f64, scale: f64) -> bool {
    delta < -IMPROVE_EPS * (1.0 + scale.abs())
}

fn theta(view: &CoeffView, x: i64) -> f64 {
    view.theta(x as f64)
}

/// Candidate values from the quadratic satisfying move for variable `j` on
/// violated constraint `con`. Returns at most two moves, each of which makes
/// `con` satisfied.
pub fn sat_moves(state: &SolverState<'_>, con: ConId, j: VarId) -> ArrayVec<Move, 2> {
    let mut out = ArrayVec::new();
    if !state.is_violated(con) {
        return out;
    }
    let problem = state.problem();
    let c = problem.constraint(con);
    let Some(t) = c.terms().get(j) else {
        return out;
    };
    let view = CoeffView::from_terms(t, state.alpha(), state.activity(con));
    let var = problem.variable(j);
    let current = state.value(j);

    let mut raw: ArrayVec<f64, 2> = ArrayVec::new();
    let (a, h) = (view.quad, view.lin);
    if a == 0.0 {
        if h == 0.0 {
            return out;
        }
        let nu = (c.rhs - view.rest) / h;
        raw.push(if h > 0.0 { snap_floor(nu) } else { snap_ceil(nu) });
    } else {
        match solve_quadratic(a, h, view.rest - c.rhs) {
            Roots::None => {}
            Roots::Double(x0) => {
                if let Some(r) = near_integer(x0) {
                    raw.push(r);
                }
            }
            Roots::Two(x1, x2) => {
                if a > 0.0 {
                    raw.push(snap_ceil(x1));
                    raw.push(snap_floor(x2));
                } else {
                    raw.push(snap_floor(x1));
                    raw.push(snap_ceil(x2));
                }
            }
        }
    }

    for x in raw {
        let Some(v) = to_int(x) else { continue };
        if v == current || !var.contains(v) || out.iter().any(|m: &Move| m.value == v) {
            continue;
        }
        if violation_amount(c.sense, view.eval(v as f64), c.rhs) > 0.0 {
            continue;
        }
        out.push(Move { kind: MoveKind::Sat, var: j, value: v, aux: None, origin: Some(con) });
    }
    out
}

/// Best-effort repair of violated `con` through `x_j` alone, for when
/// [`sat_moves`] has nothing: every threshold lies outside the bounds of
/// `x_j`, or an equality has no integral root.
///
/// Picks the in-bounds integer leaving the smallest violation (lowest value
/// on ties) and emits it only if that violation is strictly below the
/// current one.
pub fn repair_move(state: &SolverState<'_>, con: ConId, j: VarId) -> Option<Move> {
    if !state.is_violated(con) {
        return None;
    }
    let problem = state.problem();
    let c = problem.constraint(con);
    let t = c.terms().get(j)?;
    let view = CoeffView::from_terms(t, state.alpha(), state.activity(con));
    let var = problem.variable(j);
    let (a, h) = (view.quad, view.lin);
    if a == 0.0 && h == 0.0 {
        return None;
    }

    // Along x_j the violation is piecewise quadratic, so its integer minimum
    // sits next to a root, the vertex or a bound.
    let mut points: ArrayVec<f64, 5> = ArrayVec::new();
    points.push(var.lb_f64());
    points.push(var.ub_f64());
    if a == 0.0 {
        points.push((c.rhs - view.rest) / h);
    } else {
        points.push(-h / (2.0 * a));
        match solve_quadratic(a, h, view.rest - c.rhs) {
            Roots::None => {}
            Roots::Double(x) => points.push(x),
            Roots::Two(x1, x2) => {
                points.push(x1);
                points.push(x2);
            }
        }
    }

    let current = state.value(j);
    let mut best: Option<(i64, f64)> = None;
    for p in points {
        for x in [p.floor(), p.ceil()] {
            let Some(v) = to_int(x.clamp(var.lb_f64(), var.ub_f64())) else { continue };
            if v == current {
                continue;
            }
            let viol = violation_amount(c.sense, view.eval(v as f64), c.rhs);
            if best.is_none_or(|(bv, b)| viol < b || (viol == b && v < bv)) {
                best = Some((v, viol));
            }
        }
    }
    let now = state.violation(con);
    let (v, viol) = best?;
    (viol < now - IMPROVE_EPS * (1.0 + now)).then_some(Move {
        kind: MoveKind::Repair,
        var: j,
        value: v,
        aux: None,
        origin: Some(con),
    })
}

fn contains_value(pieces: &Pieces, x: f64) -> bool {
    pieces.iter().any(|&(a, b)| a <= x && x <= b)
}

fn nearest_point(pieces: &Pieces, x: f64) -> Option<f64> {
    pieces
        .iter()
        .map(|&(a, b)| x.clamp(a, b))
        .filter(|p| p.is_finite())
        .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
}

/// Inequality exploration move: moves objective variable `j` within the
/// region where the satisfied `<=` constraint `con` stays satisfied, towards
/// the minimizer of its objective slice.
pub fn exp_move(state: &SolverState<'_>, con: ConId, j: VarId) -> Option<Move> {
    let problem = state.problem();
    let c = problem.constraint(con);
    if c.sense != Sense::Le || state.is_violated(con) {
        return None;
    }
    let t = c.terms().get(j)?;
    let ot = problem.objective_terms().get(j)?;
    let alpha = state.alpha();
    let cv = CoeffView::from_terms(t, alpha, state.activity(con));
    let ov = CoeffView { quad: ot.square, lin: ot.slope(alpha), rest: 0.0 };
    let var = problem.variable(j);

    let domain = FeasibleDomain::of(cv.quad, cv.lin, cv.rest - c.rhs);
    let pieces = domain.intersect(var.lb_f64(), var.ub_f64());
    let (inf, sup) = (pieces.first()?.0, pieces.last()?.1);

    let (w, k) = (ov.quad, ov.lin);
    let x_min = if w == 0.0 {
        if k > 0.0 {
            inf
        } else if k < 0.0 {
            sup
        } else {
            return None;
        }
    } else if w > 0.0 {
        let xi = k / (-2.0 * w);
        if contains_value(&pieces, xi) {
            xi
        } else {
            nearest_point(&pieces, xi)?
        }
    } else {
        if !inf.is_finite() || !sup.is_finite() {
            return None;
        }
        pieces
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .min_by(|&p, &q| ov.theta(p).total_cmp(&ov.theta(q)))?
    };
    if !x_min.is_finite() {
        return None;
    }

    let in_domain = |v: i64| var.contains(v) && violation_amount(Sense::Le, cv.eval(v as f64), c.rhs) == 0.0;
    let up = to_int(snap_ceil(x_min));
    let v = match up {
        Some(u) if in_domain(u) => u,
        _ => {
            let down = to_int(snap_floor(x_min))?;
            if !in_domain(down) {
                return None;
            }
            down
        }
    };
    let current = state.value(j);
    if v == current || !improves(change(w, k, current, v), theta(&ov, current)) {
        return None;
    }
    Some(Move { kind: MoveKind::Exp, var: j, value: v, aux: None, origin: Some(con) })
}

/// Integer roots of `a y^2 + h y + g = 0`, ascending and deduplicated.
fn integer_roots(a: f64, h: f64, g: f64) -> ArrayVec<f64, 2> {
    let mut out = ArrayVec::new();
    if a == 0.0 {
        if h != 0.0 {
            if let Some(r) = near_integer(-g / h) {
                out.push(r);
            }
        }
        return out;
    }
    match solve_quadratic(a, h, g) {
        Roots::None => {}
        Roots::Double(x) => out.extend(near_integer(x)),
        Roots::Two(x1, x2) => {
            out.extend(near_integer(x1));
            if let Some(r) = near_integer(x2) {
                if out.last() != Some(&r) {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// The `+-1` step on `x_j` that lowers its objective slice, if any.
fn incremental_step(var: &Variable, view: &CoeffView, current: i64) -> Option<i64> {
    let mut best: Option<(i64, f64)> = None;
    for v in [current - 1, current + 1] {
        if !var.contains(v) {
            continue;
        }
        let d = change(view.quad, view.lin, current, v);
        if improves(d, view.theta(current as f64)) && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((v, d));
        }
    }
    best.map(|(v, _)| v)
}

/// Equality incremental move: steps objective variable `j` by one and
/// repairs the satisfied equality `con` through `aux`.
pub fn inc_move(
    state: &SolverState<'_>,
    con: ConId,
    j: VarId,
    aux: VarId,
    reading: PairTheta,
) -> Option<Move> {
    if j == aux {
        return None;
    }
    let problem = state.problem();
    let c = problem.constraint(con);
    if c.sense != Sense::Eq || state.is_violated(con) {
        return None;
    }
    let tj = c.terms().get(j)?;
    let ta = c.terms().get(aux)?;
    let ot = problem.objective_terms().get(j)?;
    let alpha = state.alpha();
    let ov = CoeffView { quad: ot.square, lin: ot.slope(alpha), rest: 0.0 };
    let cur_j = alpha[j];
    let x_inc = incremental_step(problem.variable(j), &ov, cur_j)?;

    let activity = state.activity(con) + tj.delta(alpha, cur_j, x_inc);
    let cur_a = alpha[aux] as f64;
    let a = ta.square;
    let h = ta.slope_with(alpha, j, x_inc);
    let rest = activity - a * cur_a * cur_a - h * cur_a;

    let aux_var = problem.variable(aux);
    let pair_coef = problem.objective_terms().get(j).map_or(0.0, |t| t.cross_coef(aux));
    for r in integer_roots(a, h, rest - c.rhs) {
        let Some(r) = to_int(r) else { continue };
        if !aux_var.contains(r) {
            continue;
        }
        let rf = r as f64;
        if violation_amount(Sense::Eq, a * rf * rf + h * rf + rest, c.rhs) > 0.0 {
            continue;
        }
        let delta = match reading {
            PairTheta::Union => state.objective_delta(&[(j, x_inc), (aux, r)]),
            PairTheta::Both => pair_coef * ((x_inc as f64) * rf - (cur_j as f64) * cur_a),
        };
        if improves(delta, state.obj_value()) {
            return Some(Move {
                kind: MoveKind::Inc,
                var: j,
                value: x_inc,
                aux: Some((aux, r)),
                origin: Some(con),
            });
        }
    }
    None
}

/// Free move: closed-form step for an objective variable in no constraint.
///
/// Within finite bounds the new value is the integer minimizer of the slice.
/// A linear slice with no bound in its downhill direction takes a unit step.
pub fn free_move(state: &SolverState<'_>, j: VarId) -> Option<Move> {
    let problem = state.problem();
    if !problem.is_free(j) {
        return None;
    }
    let ot = problem.objective_terms().get(j)?;
    let view = CoeffView { quad: ot.square, lin: ot.slope(state.alpha()), rest: 0.0 };
    let var = problem.variable(j);
    let current = state.value(j);
    let (w, k) = (view.quad, view.lin);

    // A linear slice is minimized at the bound it slopes towards; without
    // that bound there is no minimizer and the move is a unit step.
    let target = if w == 0.0 {
        if k > 0.0 {
            var.lb.or(current.checked_sub(1))?
        } else if k < 0.0 {
            var.ub.or(current.checked_add(1))?
        } else {
            return None;
        }
    } else if w > 0.0 {
        let xi = k / (-2.0 * w);
        let lo = var.clamp(to_int(xi.floor().clamp(-MAX_VALUE, MAX_VALUE))?);
        let hi = var.clamp(to_int(xi.ceil().clamp(-MAX_VALUE, MAX_VALUE))?);
        if theta(&view, hi) < theta(&view, lo) {
            hi
        } else {
            lo
        }
    } else {
        // Concave: the minimum over a finite domain is at one of its ends.
        let (lb, ub) = (var.lb?, var.ub?);
        if theta(&view, ub) < theta(&view, lb) {
            ub
        } else {
            lb
        }
    };
    let v = var.clamp(target);
    (v != current && theta(&view, v) < theta(&view, current))
        .then_some(Move { kind: MoveKind::Free, var: j, value: v, aux: None, origin: None })
}
