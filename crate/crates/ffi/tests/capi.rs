use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use iqpls_ffi::*;

fn fixture(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = iqpls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn deterministic() -> IqplsConfig {
    let mut c = iqpls_config_default();
    c.max_iterations = 20_000;
    c.time_limit = 60.0;
    c
}

#[test]
fn solve_fixture_from_file() {
    let mut problem = ptr::null_mut();
    let code = unsafe { iqpls_problem_from_file(fixture("qubo3.qplib").as_ptr(), IqplsFormat::Qplib, &mut problem) };
    assert_eq!(code, IqplsError::Ok);
    assert_eq!(unsafe { iqpls_problem_num_vars(problem) }, 3);
    assert_eq!(unsafe { iqpls_problem_num_constraints(problem) }, 0);

    let config = deterministic();
    let mut result = ptr::null_mut();
    assert_eq!(unsafe { iqpls_solve(problem, &config, &mut result) }, IqplsError::Ok);
    assert_eq!(unsafe { iqpls_result_status(result) }, IqplsStatus::Feasible);
    let mut obj = 0.0;
    assert!(unsafe { iqpls_result_objective(result, &mut obj) });
    assert_eq!(obj, -2.5);

    let mut values = [0i64; 3];
    let mut written = 0;
    let code = unsafe { iqpls_result_values(result, values.as_mut_ptr(), values.len(), &mut written) };
    assert_eq!(code, IqplsError::Ok);
    // (1,1,0) and (1,1,1) are both optimal.
    assert_eq!(written, 3);
    assert_eq!(values[..2], [1, 1]);

    let mut short = [0i64; 2];
    let code = unsafe { iqpls_result_values(result, short.as_mut_ptr(), short.len(), &mut written) };
    assert_eq!((code, written), (IqplsError::BufferTooSmall, 3));

    unsafe {
        iqpls_result_free(result);
        iqpls_problem_free(problem);
    }
}

#[test]
fn canonical_text_and_infeasible() {
    let text = CString::new(
        r#"{"name":"tiny","sense":"min",
            "variables":[{"name":"x","lb":0,"ub":3}],
            "objective":{"linear":{"x":1.0}},
            "constraints":[{"name":"c","sense":"ge","rhs":5.0,"linear":{"x":1.0}}]}"#,
    )
    .unwrap();
    let mut problem = ptr::null_mut();
    let code = unsafe { iqpls_problem_from_str(text.as_ptr(), IqplsFormat::Canonical, &mut problem) };
    assert_eq!(code, IqplsError::Ok, "{}", last_error());

    let mut config = deterministic();
    config.max_iterations = 2_000;
    let mut result = ptr::null_mut();
    assert_eq!(unsafe { iqpls_solve(problem, &config, &mut result) }, IqplsError::Ok);
    assert_eq!(unsafe { iqpls_result_status(result) }, IqplsStatus::NotFound);
    let mut obj = f64::NAN;
    assert!(!unsafe { iqpls_result_objective(result, &mut obj) });
    assert!(obj.is_nan());
    assert!(unsafe { iqpls_result_iterations(result) } > 0);
    let mut buf = [0i64; 1];
    let code = unsafe { iqpls_result_values(result, buf.as_mut_ptr(), 1, ptr::null_mut()) };
    assert_eq!(code, IqplsError::Model);
    unsafe {
        iqpls_result_free(result);
        iqpls_problem_free(problem);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut problem = ptr::null_mut();
    let bad = CString::new("bad\nQBN\nminimize\nnot-a-number\n").unwrap();
    let code = unsafe { iqpls_problem_from_str(bad.as_ptr(), IqplsFormat::Qplib, &mut problem) };
    assert_eq!(code, IqplsError::Parse);
    assert!(last_error().contains("line 4"), "{}", last_error());
    assert!(problem.is_null());

    let missing = CString::new("/nonexistent/file.qplib").unwrap();
    let code = unsafe { iqpls_problem_from_file(missing.as_ptr(), IqplsFormat::Qplib, &mut problem) };
    assert_eq!(code, IqplsError::Io);

    let code = unsafe { iqpls_problem_from_str(ptr::null(), IqplsFormat::Qplib, &mut problem) };
    assert_eq!(code, IqplsError::NullPointer);

    let code = unsafe { iqpls_problem_from_file(fixture("qubo3.qplib").as_ptr(), IqplsFormat::Qplib, &mut problem) };
    assert_eq!(code, IqplsError::Ok);
    let mut config = iqpls_config_default();
    config.bms_samples = 0;
    let mut result = ptr::null_mut();
    assert_eq!(unsafe { iqpls_solve(problem, &config, &mut result) }, IqplsError::Config);
    assert!(result.is_null());
    unsafe {
        iqpls_problem_free(problem);
        iqpls_problem_free(ptr::null_mut());
        iqpls_result_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/iqpls.h")).unwrap();
    for name in [
        "iqpls_problem_from_str",
        "iqpls_problem_from_file",
        "iqpls_solve",
        "iqpls_result_values",
        "iqpls_last_error",
        "IQPLS_ERROR_BUFFER_TOO_SMALL",
        "typedef struct IqplsProblem IqplsProblem",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let src = std::env::temp_dir().join(format!("iqpls_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"iqpls.h\"\n\
         int main(void) {\n\
           IqplsConfig c = iqpls_config_default();\n\
           IqplsProblem *p = 0;\n\
           IqplsResult *r = 0;\n\
           if (iqpls_problem_from_file(\"x\", IQPLS_FORMAT_QPLIB, &p) != IQPLS_ERROR_OK) return 1;\n\
           iqpls_solve(p, &c, &r);\n\
           iqpls_result_free(r);\n\
           iqpls_problem_free(p);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status();
    let _ = std::fs::remove_file(&src);
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
