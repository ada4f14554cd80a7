//! Instance readers (QPLIB and the canonical JSON format) and solution
//! writers.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{
    hessian_to_monomial, ObjSense, Problem, QuadExpr, RawConstraint, RawProblem, RawSense, RawVariable,
};
use crate::search::{SolveResult, Status};

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse { line, msg: msg.into() })
}

// ---------------------------------------------------------------------------
// QPLIB

/// Record-oriented view of a QPLIB file: one record per non-comment line,
/// trailing text after the expected fields is ignored.
struct Records<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Records<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('!') && !l.starts_with('#') && !l.starts_with('%'))
            .collect();
        let last_line = text.lines().count();
        Self { lines, pos: 0, last_line }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn next(&mut self, what: &str, fields: usize) -> Result<(usize, Vec<&'a str>), FormatError> {
        let Some(&(line, text)) = self.lines.get(self.pos) else {
            return perr(self.last_line + 1, format!("unexpected end of file, expected {what}"));
        };
        self.pos += 1;
        let toks: Vec<&str> = text.split_whitespace().take(fields).collect();
        if toks.len() < fields {
            return perr(line, format!("expected {fields} field(s) for {what}, found {}", toks.len()));
        }
        Ok((line, toks))
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        let (line, t) = self.next(what, 1)?;
        Ok((line, t[0]))
    }

    fn count(&mut self, what: &str) -> Result<usize, FormatError> {
        let (line, t) = self.next(what, 1)?;
        parse_index(t[0], line, what)
    }

    fn real(&mut self, what: &str) -> Result<f64, FormatError> {
        let (line, t) = self.next(what, 1)?;
        parse_real(t[0], line, what)
    }
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64, FormatError> {
    let cleaned = tok.replace(['d', 'D'], "e");
    match cleaned.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => perr(line, format!("invalid number `{tok}` for {what}")),
    }
}

fn parse_index(tok: &str, line: usize, what: &str) -> Result<usize, FormatError> {
    tok.parse::<usize>()
        .or_else(|_| perr(line, format!("invalid integer `{tok}` for {what}")))
}

/// 1-based index in `1..=limit` to 0-based.
fn one_based(tok: &str, line: usize, limit: usize, what: &str) -> Result<usize, FormatError> {
    let i = parse_index(tok, line, what)?;
    if i == 0 || i > limit {
        return perr(line, format!("{what} index {i} outside 1..={limit}"));
    }
    Ok(i - 1)
}

/// Default value plus sparse exceptions, expanded to a dense vector.
fn dense_section(
    rec: &mut Records<'_>,
    what: &str,
    len: usize,
) -> Result<Vec<f64>, FormatError> {
    let default = rec.real(&format!("default {what}"))?;
    let mut out = vec![default; len];
    let k = rec.count(&format!("number of non-default {what}"))?;
    for _ in 0..k {
        let (line, t) = rec.next(what, 2)?;
        let i = one_based(t[0], line, len, what)?;
        out[i] = parse_real(t[1], line, what)?;
    }
    Ok(out)
}

/// Reads and discards a default-plus-exceptions section.
fn skip_section(rec: &mut Records<'_>, what: &str, len: usize) -> Result<(), FormatError> {
    dense_section(rec, what, len).map(|_| ())
}

fn names_section(rec: &mut Records<'_>, what: &str, names: &mut [String]) -> Result<(), FormatError> {
    let k = rec.count(&format!("number of {what} names"))?;
    for _ in 0..k {
        let (line, t) = rec.next(&format!("{what} name"), 2)?;
        let i = one_based(t[0], line, names.len(), what)?;
        names[i] = t[1].to_string();
    }
    Ok(())
}

/// Reads a QPLIB `.qplib` file.
///
/// Objective and constraint Hessians are given as lower-triangle entries of
/// `1/2 x'Qx`; they are converted to monomial coefficients. Two-sided rows
/// become a `>=` row named `<name>_lo` plus a `<=` row. Starting points and
/// duals are read and discarded.
pub fn parse_qplib(text: &str) -> Result<RawProblem, FormatError> {
    let mut rec = Records::new(text);
    let (_, name) = rec.word("problem name")?;
    let (code_line, code) = rec.word("problem type")?;
    let code = code.to_ascii_uppercase();
    let c: Vec<char> = code.chars().collect();
    if c.len() != 3 {
        return perr(code_line, format!("problem type `{code}` is not a 3-character code"));
    }
    let (obj_t, var_t, con_t) = (c[0], c[1], c[2]);
    if !"LDCQ".contains(obj_t) || !"CBMIG".contains(var_t) || !"NBLCDQ".contains(con_t) {
        return perr(code_line, format!("unknown problem type `{code}`"));
    }
    if var_t == 'C' {
        return Err(FormatError::Unsupported(format!("type {code}: continuous variables")));
    }
    let quad_cons = "CDQ".contains(con_t);
    if obj_t == 'L' && !quad_cons {
        return Err(FormatError::Unsupported(format!("type {code}: no quadratic terms")));
    }
    let has_cons = !"NB".contains(con_t);

    let (sense_line, sense) = rec.word("objective sense")?;
    let sense = match sense.to_ascii_lowercase().as_str() {
        "minimize" | "min" => ObjSense::Min,
        "maximize" | "max" => ObjSense::Max,
        other => return perr(sense_line, format!("unknown objective sense `{other}`")),
    };
    let n = rec.count("number of variables")?;
    let m = if has_cons { rec.count("number of constraints")? } else { 0 };

    let mut objective = QuadExpr::new();
    if obj_t != 'L' {
        let k = rec.count("number of objective quadratic terms")?;
        for _ in 0..k {
            let (line, t) = rec.next("objective quadratic term", 3)?;
            let i = one_based(t[0], line, n, "variable")?;
            let j = one_based(t[1], line, n, "variable")?;
            let q = parse_real(t[2], line, "objective quadratic coefficient")?;
            objective.add_quadratic(j.min(i), j.max(i), hessian_to_monomial(i, j, q));
        }
    }
    let b0 = dense_section(&mut rec, "objective linear coefficient", n)?;
    for (j, &b) in b0.iter().enumerate() {
        if b != 0.0 {
            objective.add_linear(j, b);
        }
    }
    objective.constant = rec.real("objective constant")?;

    let mut bodies = vec![QuadExpr::new(); m];
    if has_cons {
        if quad_cons {
            let k = rec.count("number of constraint quadratic terms")?;
            for _ in 0..k {
                let (line, t) = rec.next("constraint quadratic term", 4)?;
                let r = one_based(t[0], line, m, "constraint")?;
                let i = one_based(t[1], line, n, "variable")?;
                let j = one_based(t[2], line, n, "variable")?;
                let q = parse_real(t[3], line, "constraint quadratic coefficient")?;
                bodies[r].add_quadratic(j.min(i), j.max(i), hessian_to_monomial(i, j, q));
            }
        }
        let k = rec.count("number of constraint linear terms")?;
        for _ in 0..k {
            let (line, t) = rec.next("constraint linear term", 3)?;
            let r = one_based(t[0], line, m, "constraint")?;
            let j = one_based(t[1], line, n, "variable")?;
            bodies[r].add_linear(j, parse_real(t[2], line, "constraint linear coefficient")?);
        }
    }

    let infinity = rec.real("value for infinity")?.abs();
    let to_ext = |v: f64| {
        if v >= infinity {
            f64::INFINITY
        } else if v <= -infinity {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let (lhs, rhs) = if has_cons {
        (
            dense_section(&mut rec, "constraint lower bound", m)?,
            dense_section(&mut rec, "constraint upper bound", m)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };

    let (mut lbs, mut ubs) = if var_t == 'B' {
        (vec![0.0; n], vec![1.0; n])
    } else {
        (
            dense_section(&mut rec, "variable lower bound", n)?,
            dense_section(&mut rec, "variable upper bound", n)?,
        )
    };

    if "MG".contains(var_t) {
        let default_line = rec.lines.get(rec.pos).map_or(rec.last_line, |l| l.0);
        let types = dense_section(&mut rec, "variable type", n)?;
        if let Some(j) = types.iter().position(|&t| t == 0.0) {
            return Err(FormatError::Unsupported(format!(
                "variable {} is continuous (type section starting at line {default_line})",
                j + 1
            )));
        }
        if let Some(&t) = types.iter().find(|&&t| t != 1.0 && t != 2.0) {
            return perr(default_line, format!("unknown variable type {t}"));
        }
        for (j, _) in types.iter().enumerate().filter(|(_, &t)| t == 2.0) {
            lbs[j] = lbs[j].max(0.0);
            ubs[j] = ubs[j].min(1.0);
        }
    }

    let mut var_names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    let mut con_names: Vec<String> = (1..=m).map(|i| format!("c{i}")).collect();
    // Starting point, duals and names are optional trailing sections.
    if !rec.at_end() {
        skip_section(&mut rec, "starting point value", n)?;
    }
    if has_cons && !rec.at_end() {
        skip_section(&mut rec, "constraint dual value", m)?;
    }
    if !rec.at_end() {
        skip_section(&mut rec, "variable bound dual value", n)?;
    }
    if !rec.at_end() {
        names_section(&mut rec, "variable", &mut var_names)?;
    }
    if has_cons && !rec.at_end() {
        names_section(&mut rec, "constraint", &mut con_names)?;
    }
    if let Some(&(line, _)) = rec.lines.get(rec.pos) {
        return perr(line, "unexpected trailing data");
    }

    let variables = (0..n)
        .map(|j| RawVariable { name: var_names[j].clone(), lb: to_ext(lbs[j]), ub: to_ext(ubs[j]) })
        .collect();

    let mut constraints = Vec::with_capacity(m);
    for (i, body) in bodies.into_iter().enumerate() {
        let (lo, hi) = (to_ext(lhs[i]), to_ext(rhs[i]));
        let name = con_names[i].clone();
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {}
            (true, true) if lo == hi => {
                constraints.push(RawConstraint { name, body, sense: RawSense::Eq, rhs: hi })
            }
            (true, true) => {
                constraints.push(RawConstraint {
                    name: format!("{name}_lo"),
                    body: body.clone(),
                    sense: RawSense::Ge,
                    rhs: lo,
                });
                constraints.push(RawConstraint { name, body, sense: RawSense::Le, rhs: hi });
            }
            (false, true) => constraints.push(RawConstraint { name, body, sense: RawSense::Le, rhs: hi }),
            (true, false) => constraints.push(RawConstraint { name, body, sense: RawSense::Ge, rhs: lo }),
        }
    }

    Ok(RawProblem { name: name.to_string(), sense, variables, objective, constraints })
}

// ---------------------------------------------------------------------------
// Canonical format

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonDoc {
    name: String,
    sense: String,
    variables: Vec<CanonVar>,
    #[serde(default)]
    objective: CanonExpr,
    #[serde(default)]
    constraints: Vec<CanonRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonVar {
    name: String,
    lb: Value,
    ub: Value,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonExpr {
    #[serde(default)]
    constant: f64,
    #[serde(default)]
    linear: IndexMap<String, f64>,
    #[serde(default)]
    quadratic: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonRow {
    name: String,
    sense: String,
    rhs: f64,
    #[serde(default)]
    linear: IndexMap<String, f64>,
    #[serde(default)]
    quadratic: Vec<(usize, usize, f64)>,
}

fn schema<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    perr(0, msg)
}

fn canon_bound(v: &Value, lower: bool, var: &str) -> Result<f64, FormatError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or(())
            .or_else(|_| schema(format!("bound of `{var}` is not a number"))),
        Value::String(s) if lower && s == "-inf" => Ok(f64::NEG_INFINITY),
        Value::String(s) if !lower && s == "inf" => Ok(f64::INFINITY),
        other => schema(format!(
            "{} bound of `{var}` must be a number or \"{}\", got {other}",
            if lower { "lower" } else { "upper" },
            if lower { "-inf" } else { "inf" }
        )),
    }
}

fn canon_expr(
    linear: &IndexMap<String, f64>,
    quadratic: &[(usize, usize, f64)],
    index: &IndexMap<&str, usize>,
    ctx: &str,
) -> Result<QuadExpr, FormatError> {
    let mut e = QuadExpr::new();
    for (name, &c) in linear {
        let &j = index
            .get(name.as_str())
            .ok_or(())
            .or_else(|_| schema(format!("{ctx}: undeclared variable `{name}`")))?;
        e.add_linear(j, c);
    }
    for &(i, j, c) in quadratic {
        if i > j {
            return schema(format!("{ctx}: quadratic entry [{i}, {j}] must have i <= j"));
        }
        if j >= index.len() {
            return schema(format!("{ctx}: quadratic entry [{i}, {j}] references an undeclared variable"));
        }
        e.add_quadratic(i, j, c);
    }
    Ok(e)
}

/// Reads the canonical JSON instance format.
pub fn parse_canonical(text: &str) -> Result<RawProblem, FormatError> {
    let doc: CanonDoc = serde_json::from_str(text)
        .map_err(|e| FormatError::Parse { line: e.line(), msg: e.to_string() })?;
    let sense = match doc.sense.as_str() {
        "min" => ObjSense::Min,
        "max" => ObjSense::Max,
        s => return schema(format!("sense must be \"min\" or \"max\", got \"{s}\"")),
    };

    let mut index: IndexMap<&str, usize> = IndexMap::new();
    let mut variables = Vec::with_capacity(doc.variables.len());
    for v in &doc.variables {
        if index.insert(v.name.as_str(), index.len()).is_some() {
            return schema(format!("duplicate variable name `{}`", v.name));
        }
        variables.push(RawVariable {
            name: v.name.clone(),
            lb: canon_bound(&v.lb, true, &v.name)?,
            ub: canon_bound(&v.ub, false, &v.name)?,
        });
    }

    let mut objective = canon_expr(&doc.objective.linear, &doc.objective.quadratic, &index, "objective")?;
    objective.constant = doc.objective.constant;

    let mut constraints = Vec::with_capacity(doc.constraints.len());
    for row in &doc.constraints {
        let sense = match row.sense.as_str() {
            "le" => RawSense::Le,
            "ge" => RawSense::Ge,
            "eq" => RawSense::Eq,
            s => return schema(format!("constraint `{}`: sense must be le, ge or eq, got \"{s}\"", row.name)),
        };
        let body = canon_expr(&row.linear, &row.quadratic, &index, &format!("constraint `{}`", row.name))?;
        constraints.push(RawConstraint { name: row.name.clone(), body, sense, rhs: row.rhs });
    }

    Ok(RawProblem { name: doc.name, sense, variables, objective, constraints })
}

fn bound_value(v: Option<i64>, lower: bool) -> Value {
    match v {
        Some(x) => Value::from(x),
        None => Value::from(if lower { "-inf" } else { "inf" }),
    }
}

/// Writes a normalized problem in the canonical format, objective in its
/// declared sense.
pub fn write_canonical(problem: &Problem) -> String {
    let raw = problem.to_raw();
    let names: Vec<&str> = problem.variables().iter().map(|v| v.name.as_str()).collect();
    let linear = |e: &QuadExpr| e.linear.iter().map(|&(j, c)| (names[j].to_string(), c)).collect();
    let doc = CanonDoc {
        name: raw.name.clone(),
        sense: match raw.sense {
            ObjSense::Min => "min",
            ObjSense::Max => "max",
        }
        .to_string(),
        variables: problem
            .variables()
            .iter()
            .map(|v| CanonVar { name: v.name.clone(), lb: bound_value(v.lb, true), ub: bound_value(v.ub, false) })
            .collect(),
        objective: CanonExpr {
            constant: raw.objective.constant,
            linear: linear(&raw.objective),
            quadratic: raw.objective.quadratic.clone(),
        },
        constraints: raw
            .constraints
            .iter()
            .map(|c| CanonRow {
                name: c.name.clone(),
                sense: match c.sense {
                    RawSense::Le => "le",
                    RawSense::Ge => "ge",
                    RawSense::Eq => "eq",
                }
                .to_string(),
                rhs: c.rhs,
                linear: linear(&c.body),
                quadratic: c.body.quadratic.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("canonical document serializes");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Solutions

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriteOptions {
    pub format: SolutionFormat,
    /// Include wall-clock fields. Leave off for byte-reproducible output.
    pub timing: bool,
}

impl Default for WriteOptions {
    fn default() -> Self {
        Self { format: SolutionFormat::Machine, timing: true }
    }
}

/// Renders a solve result. The objective is reported in the problem's
/// declared sense; variables appear by name, each exactly once.
pub fn write_solution(problem: &Problem, result: &SolveResult, opts: WriteOptions) -> String {
    let s = &result.stats;
    let mut out = String::new();
    match opts.format {
        SolutionFormat::Machine => {
            let _ = writeln!(out, "status={}", result.status.as_str());
            if let Some(obj) = result.objective {
                let _ = writeln!(out, "objective={obj:?}");
            }
            let _ = writeln!(out, "instance={}", problem.name());
            let _ = writeln!(out, "iterations={}", s.iterations);
            let _ = writeln!(out, "moves={}", s.moves);
            let _ = writeln!(out, "weight_updates={}", s.weight_updates);
            let _ = writeln!(out, "mode_switches={}", s.mode_switches);
            let _ = writeln!(out, "perturbations={}", s.perturbations);
            if let Some(it) = s.best_iteration {
                let _ = writeln!(out, "best_iteration={it}");
            }
            if opts.timing {
                if let Some(t) = s.time_to_best {
                    let _ = writeln!(out, "time_to_best={t:.6}");
                }
                let _ = writeln!(out, "elapsed={:.6}", s.elapsed);
            }
            if let Some(values) = &result.assignment {
                for (v, x) in problem.variables().iter().zip(values) {
                    let _ = writeln!(out, "var {} {x}", v.name);
                }
            }
        }
        SolutionFormat::Text => {
            let _ = writeln!(out, "instance   : {}", problem.name());
            let _ = writeln!(out, "status     : {}", result.status.as_str());
            if let Some(obj) = result.objective {
                let _ = writeln!(out, "objective  : {obj}");
            }
            let _ = writeln!(
                out,
                "iterations : {} ({} moves, {} weight updates, {} mode switches, {} perturbations)",
                s.iterations, s.moves, s.weight_updates, s.mode_switches, s.perturbations
            );
            if opts.timing {
                if let Some(t) = s.time_to_best {
                    let _ = writeln!(out, "best found : {t:.3}s");
                }
                let _ = writeln!(out, "elapsed    : {:.3}s", s.elapsed);
            }
            if let Some(values) = &result.assignment {
                let width = problem.variables().iter().map(|v| v.name.len()).max().unwrap_or(0);
                for (v, x) in problem.variables().iter().zip(values) {
                    let _ = writeln!(out, "  {:width$} = {x}", v.name);
                }
            }
        }
    }
    out
}

/// A solution read back from the machine format.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub status: Status,
    pub objective: Option<f64>,
    pub values: Vec<(String, i64)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, FormatError> {
    let mut status = None;
    let mut objective = None;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("var ") {
            let Some((name, value)) = rest.trim().rsplit_once(char::is_whitespace) else {
                return perr(line, "expected `var <name> <value>`");
            };
            let value = value
                .parse::<i64>()
                .or_else(|_| perr(line, format!("invalid integer value `{value}`")))?;
            values.push((name.trim().to_string(), value));
        } else if let Some((key, value)) = l.split_once('=') {
            match key {
                "status" => {
                    status = Some(match value {
                        "FEASIBLE" => Status::Feasible,
                        "NA" => Status::NotFound,
                        other => return perr(line, format!("unknown status `{other}`")),
                    })
                }
                "objective" => objective = Some(parse_real(value, line, "objective")?),
                _ => {}
            }
        } else {
            return perr(line, format!("unrecognized line `{l}`"));
        }
    }
    let status = status.ok_or(FormatError::Parse { line: 0, msg: "missing status line".into() })?;
    Ok(SolutionFile { status, objective, values })
}
