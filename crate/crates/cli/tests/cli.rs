use std::process::{Command, Output};

use serde_json::Value;

fn euclidlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euclidlab"))
        .args(args)
        .env_remove("EUCLIDLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not one JSON report: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn two_three_five_has_witness_seven_for_both_signs() {
    let out = euclidlab(&["check-theorem1", "--primes", "2,3,5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "check-theorem1");
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(r["result"]["plus"]["witness_prime"], "7");
    assert_eq!(r["result"]["plus"]["target_value"], "14");
    assert_eq!(r["result"]["minus"]["witness_prime"], "7");
    assert_eq!(r["result"]["minus"]["target_value"], "7");
}

#[test]
fn zsigmondy_exception_is_flagged() {
    let r = report(&euclidlab(&[
        "zsigmondy",
        "--a",
        "2",
        "--b",
        "1",
        "--n",
        "6",
    ]));
    assert_eq!(r["result"]["is_exception"], true);
    assert_eq!(
        r["result"]["primitive_prime_divisors"],
        serde_json::json!([])
    );
    assert_eq!(r["result"]["value"], "63");

    let r = report(&euclidlab(&[
        "zsigmondy",
        "--a",
        "3",
        "--b",
        "2",
        "--n",
        "5",
    ]));
    assert_eq!(r["result"]["is_exception"], false);
    assert_eq!(
        r["result"]["primitive_prime_divisors"],
        serde_json::json!(["211"])
    );
}

#[test]
fn closure_covers_primes_below_thirty() {
    let out = euclidlab(&[
        "closure",
        "--seed",
        "2,3,5",
        "--epsilon",
        "+1",
        "--prime-bound",
        "30",
        "--certify",
        "29",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let cov = &r["result"]["coverage"];
    assert_eq!(cov["stop_reason"], "covered");
    assert_eq!(cov["covered"].as_array().unwrap().len(), 10);
    assert_eq!(cov["certificates_verified"], true);
    let chain = r["result"]["certificate"]["chain"].as_array().unwrap();
    assert_eq!(chain.last().unwrap()["prime"], "29");
    assert_eq!(chain.last().unwrap()["value"], "29");
}

#[test]
fn config_echo_reproduces_the_run() {
    let first = report(&euclidlab(&[
        "closure",
        "--seed",
        "2,3,5",
        "--epsilon",
        "-1",
        "--prime-bound",
        "40",
    ]));
    let echo = toml::to_string(&first["config"]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, echo).unwrap();
    let second = report(&euclidlab(&["closure", "--config", path.to_str().unwrap()]));
    assert_eq!(first["config"], second["config"]);
    assert_eq!(first["determinism_digest"], second["determinism_digest"]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.toml");
    std::fs::write(&path, "a = 5\nb = 3\nn = 4\n").unwrap();
    let r = report(&euclidlab(&[
        "zsigmondy",
        "--config",
        path.to_str().unwrap(),
        "--n",
        "3",
    ]));
    assert_eq!(r["config"], serde_json::json!({"a": 5, "b": 3, "n": 3}));
}

#[test]
fn output_file_leaves_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = euclidlab(&[
        "--output",
        path.to_str().unwrap(),
        "zsigmondy",
        "--a",
        "7",
        "--b",
        "2",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(written["command"], "zsigmondy");
}

#[test]
fn logging_goes_to_stderr_only() {
    let out = euclidlab(&["-vv", "check-theorem1", "--primes", "3,5,7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["plus"]["witness_prime"], "2");
}

#[test]
fn exit_codes() {
    let bad_key = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad_key.path(), "a = 2\nbogus = 1\n").unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["zsigmondy", "--a", "2", "--b", "1", "--n", "6"], 0),
        (&["zsigmondy", "--a", "2", "--b", "3", "--n", "3"], 64),
        (
            &["zsigmondy", "--config", bad_key.path().to_str().unwrap()],
            64,
        ),
        (
            &["check-theorem1", "--primes", "2,3,5", "--exponents", "1,1"],
            64,
        ),
        (&["lemma8"], 2),
        (
            &[
                "scan", "--n-min", "5", "--n-max", "5", "--pool", "smallest", "--sizes", "1",
                "--sign", "+1",
            ],
            2,
        ),
        (
            &[
                "closure",
                "--seed",
                "2,3,5",
                "--prime-bound",
                "100",
                "--max-generations",
                "1",
            ],
            3,
        ),
        (&["--threads", "0", "lemma8"], 64),
    ];
    for (args, code) in cases {
        let out = euclidlab(args);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if *code == 64 {
            assert!(out.stdout.is_empty());
            assert!(String::from_utf8_lossy(&out.stderr).starts_with("euclidlab: "));
        }
    }
}

#[test]
fn budget_variable_caps_the_scan() {
    let out = Command::new(env!("CARGO_BIN_EXE_euclidlab"))
        .args(["scan", "--n-min", "3", "--pool", "29", "--sizes", "1,2"])
        .env("EUCLIDLAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
