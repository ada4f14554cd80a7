//! Helpers shared by the integration tests and the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use iqpls::model::{Category, ObjSense, QuadExpr};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn fixture_text(file: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

/// Hand-checked facts about one bundled QPLIB file.
pub struct Fixture {
    pub file: &'static str,
    pub name: &'static str,
    pub sense: ObjSense,
    pub category: Category,
    pub var_names: &'static [&'static str],
    /// Rows after normalization (two-sided rows count twice).
    pub rows: usize,
    /// Optimal objective in the declared sense and the lexicographically
    /// smallest optimal point.
    pub optimum: f64,
    pub argopt: &'static [i64],
}

// Optima worked out by hand:
//   qubo3: with x^2 = x the objective is -4 x1 x2 + 2 x2 x3 + x2 - 2 x3 + 0.5;
//     (1,1,0) and (1,1,1) both give -2.5.
//   lcqp_ranged: (x-2)^2 + (y-1)^2 - 5 with x + y <= 2 and 0 <= x - y <= 1;
//     the unconstrained minimizer (2,1) is cut off, (1,1) gives -4.
//   qclp_disk: max x + y on x^2 + y^2 <= 25 is 7 at (3,4) and (4,3).
//   qcqp_mixed: x1^2 + x2^2 - 3 x3 + 1 with x1 x2 >= 4, x1 + x2 + x3 = 5,
//     x3 binary; x3 = 1 forces x1 + x2 = 4 and (2,2) gives 6.
//   maxq_defaults: (-x1^2 - x2^2 + x1 x2 + x1 + x2) peaks at 1 in (1,1),
//     (-x3^2 + 3 x3) at 2 in x3 = 1 or 2; with the constant -2 the total is 1.
pub const FIXTURES: &[Fixture] = &[
    Fixture {
        file: "qubo3.qplib",
        name: "qubo3",
        sense: ObjSense::Min,
        category: Category::Qubo,
        var_names: &["x1", "x2", "x3"],
        rows: 0,
        optimum: -2.5,
        argopt: &[1, 1, 0],
    },
    Fixture {
        file: "lcqp_ranged.qplib",
        name: "lcqp_ranged",
        sense: ObjSense::Min,
        category: Category::Lcqp,
        var_names: &["x", "y"],
        rows: 3,
        optimum: -4.0,
        argopt: &[1, 1],
    },
    Fixture {
        file: "qclp_disk.qplib",
        name: "qclp_disk",
        sense: ObjSense::Max,
        category: Category::Qclp,
        var_names: &["x1", "x2"],
        rows: 1,
        optimum: 7.0,
        argopt: &[3, 4],
    },
    Fixture {
        file: "qcqp_mixed.qplib",
        name: "qcqp_mixed",
        sense: ObjSense::Min,
        category: Category::Qcqp,
        var_names: &["x1", "x2", "x3"],
        rows: 2,
        optimum: 6.0,
        argopt: &[2, 2, 1],
    },
    Fixture {
        file: "maxq_defaults.qplib",
        name: "maxq_defaults",
        sense: ObjSense::Max,
        category: Category::Qubo,
        var_names: &["alpha", "beta", "gamma"],
        rows: 0,
        optimum: 1.0,
        argopt: &[1, 1, 1],
    },
];

/// A malformed copy of a fixture and the line the parser must blame.
pub struct Malformed {
    pub label: String,
    pub text: String,
    pub line: usize,
}

fn replace_line(text: &str, line: usize, with: &str) -> String {
    text.lines()
        .enumerate()
        .map(|(i, l)| if i + 1 == line { with } else { l })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.starts_with(needle)).map(|i| i + 1).unwrap_or_else(|| panic!("no line `{needle}`"))
}

/// Broken variants of the fixtures with the expected error line.
pub fn malformed_variants() -> Vec<Malformed> {
    let mut out = Vec::new();
    let lcqp = fixture_text("lcqp_ranged.qplib");
    let total = lcqp.lines().count();

    // Cut in the middle of the linear constraint terms.
    let cut = line_of(&lcqp, "2 1 1.0");
    let truncated: String = lcqp.lines().take(cut - 1).map(|l| format!("{l}\n")).collect();
    out.push(Malformed { label: "truncated constraint terms".into(), text: truncated, line: cut });

    let bad_index = line_of(&lcqp, "1 2 1.0");
    out.push(Malformed {
        label: "variable index out of range".into(),
        text: replace_line(&lcqp, bad_index, "1 7 1.0"),
        line: bad_index,
    });

    let bad_number = line_of(&lcqp, "1 -4.0");
    out.push(Malformed {
        label: "non-numeric coefficient".into(),
        text: replace_line(&lcqp, bad_number, "1 minus-four"),
        line: bad_number,
    });

    out.push(Malformed { label: "unknown type code".into(), text: replace_line(&lcqp, 2, "QXL"), line: 2 });

    out.push(Malformed {
        label: "missing term field".into(),
        text: replace_line(&lcqp, line_of(&lcqp, "2 2 2.0"), "2 2"),
        line: line_of(&lcqp, "2 2 2.0"),
    });

    out.push(Malformed {
        label: "trailing data".into(),
        text: format!("{lcqp}3 extra\n"),
        line: total + 1,
    });

    let qubo = fixture_text("qubo3.qplib");
    let count_line = line_of(&qubo, "4 # objective");
    out.push(Malformed {
        label: "term count larger than data".into(),
        text: replace_line(&qubo, count_line, "9 # objective quadratic terms"),
        // The nine expected terms swallow the following lines; the first one
        // that is not a term is the default linear coefficient `0.0`.
        line: line_of(&qubo, "0.0 # default linear"),
    });
    out
}

pub fn expr(linear: &[(usize, f64)], quad: &[(usize, usize, f64)]) -> QuadExpr {
    let mut e = QuadExpr::new();
    for &(j, c) in linear {
        e.add_linear(j, c);
    }
    for &(i, j, c) in quad {
        e.add_quadratic(i, j, c);
    }
    e
}
