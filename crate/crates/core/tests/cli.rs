use std::fs;

use qmodal::cli::{run, EXIT_NONCONVERGENT, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn qmodal(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qmodal").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_thm4_passes() {
    let (code, out, _) = qmodal(&["verify", "thm4", "--nmax", "18"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("thm4"));
}

#[test]
fn verify_json_is_parseable() {
    let (code, out, _) = qmodal(&["--format", "json", "verify", "prop1", "--order", "12"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["check_id"], "prop1");
    assert_eq!(v[0]["status"], "pass");
}

#[test]
fn failing_suite_exits_one() {
    let (code, _, _) = qmodal(&["verify", "sec4_even_m"]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
}

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(qmodal(&["verify", "thm9"]).0, EXIT_USAGE);
    assert_eq!(qmodal(&["expand", "nonsense", "--order", "4"]).0, EXIT_USAGE);
    assert_eq!(qmodal(&["count", "partition", "--nmax", "40"]).0, EXIT_USAGE);
}

#[test]
fn count_csv_and_bfile() {
    let (code, out, _) = qmodal(&["--format", "csv", "count", "multimodal:k=2", "--nmax", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("family,k,length,size,count\n"), "{out}");

    let (code, out, _) = qmodal(&["export-bfile", "partition", "--nmax", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0 1\n1 1\n2 2\n3 3\n4 5\n5 7\n");
    let (_, oracle, _) = qmodal(&["export-bfile", "partition", "--nmax", "5", "--source", "oracle"]);
    assert_eq!(oracle, out);
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("qmodal-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gf.json");
    let (code, out, _) = qmodal(&["--format", "json", "-o", path.to_str().unwrap(), "expand", "composition", "--order", "5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eval_root_u_at_minus_one() {
    let (code, out, _) = qmodal(&["--format", "json", "eval-root", "u", "--m", "2", "--j", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("\"per_t\""));
}

#[test]
fn eval_root_reports_nonconvergence() {
    // The semistrong series has no radial limit at m = 2.
    let (code, _, _) = qmodal(&["eval-root", "semistrong", "--m", "2", "--j", "1", "--k", "1"]);
    assert_eq!(code, EXIT_NONCONVERGENT);
}

#[test]
fn seed_env_and_flag() {
    let (a, out_a, _) = qmodal(&["--seed", "0x10", "--format", "json", "verify", "thm5", "--tables", "4"]);
    let (b, out_b, _) = qmodal(&["--seed", "16", "--format", "json", "verify", "thm5", "--tables", "4"]);
    assert_eq!((a, b), (EXIT_OK, EXIT_OK));
    assert_eq!(out_a, out_b);
}
