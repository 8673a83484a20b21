use std::process::Command;

fn ssgm(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ssgm"))
        .args(args)
        .output()
        .expect("binary runs");
    let text =
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.success(), text)
}

#[test]
fn solve_prints_a_report() {
    let (ok, text) = ssgm(&[
        "solve",
        "extended-rosenbrock",
        "--n",
        "20",
        "--rule",
        "ssgm1",
        "--eta",
        "const:0.5",
    ]);
    assert!(ok, "{text}");
    assert!(text.contains("status      converged"), "{text}");
    assert!(text.contains("SSGM1C"));
}

#[test]
fn solve_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (ok, text) = ssgm(&[
        "solve",
        "3",
        "--out",
        path.to_str().unwrap(),
        "--safeguard",
        "retard",
    ]);
    assert!(ok, "{text}");
    let json = std::fs::read_to_string(path).unwrap();
    assert!(json.contains("\"solver\": \"SSGM2B\""), "{json}");
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!ssgm(&["solve", "3", "--eta", "const:2"]).0);
    assert!(!ssgm(&["solve", "no-such-problem"]).0);
    assert!(!ssgm(&["solve", "20", "--n", "10"]).0);
}

#[test]
fn check_grad_passes_on_small_problems() {
    let (ok, text) = ssgm(&["check-grad", "--problems", "3,21,40", "--n", "8"]);
    assert!(ok, "{text}");
    assert!(text.contains("3 checked, 0 failed"), "{text}");
}

#[test]
fn bench_then_profile() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    let curves = dir.path().join("curves.csv");
    let (ok, text) = ssgm(&[
        "bench",
        "--problems",
        "3,21,28,20",
        "--dims",
        "10,20",
        "--safeguards",
        "classical,tau",
        "--workers",
        "2",
        "--out",
        records.to_str().unwrap(),
    ]);
    assert!(ok, "{text}");
    // Problem 20 needs n divisible by 4: n = 10 is recorded as a failure.
    assert!(text.contains("InstantiationError"), "{text}");
    // 3 at native size + 3 scalable × 2 dims = 7 instances, × 4 configs.
    assert!(text.contains("wrote 28 records"), "{text}");

    let (ok, text) = ssgm(&[
        "profile",
        records.to_str().unwrap(),
        "--metric",
        "n-residual",
        "--out",
        curves.to_str().unwrap(),
    ]);
    assert!(ok, "{text}");
    assert!(std::fs::read_to_string(&curves)
        .unwrap()
        .starts_with("label,tau,rho"));
    let svg = std::fs::read_to_string(curves.with_extension("svg")).unwrap();
    assert!(svg.contains("SSGM1A") && svg.trim_end().ends_with("</svg>"));
}
