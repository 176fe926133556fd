use std::fs;
use std::process::Command;

use sicsim::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sicsim").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
}

#[test]
fn rsi_sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, err) = run(&[
            "rsi-sweep",
            "--k",
            "20",
            "--trials",
            "100",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("n,k,metric_mean,metric_stderr,predicted,trials,noise_floor\n"));
    assert!(text.ends_with('\n'));
    // default grid, one k
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn threshold_reports_n0() {
    let (code, out, err) = run(&["threshold", "--k", "20", "--sir-db", "10", "--snr-db", "20"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(field(&out, "N0"), "2021");
    assert!(
        out.contains("\n2020,2.00000000000e-2,2.00000000000e-2,false\n"),
        "{out}"
    );
    assert!(out.contains("\n2021,"), "{out}");
    let (_, out40, _) = run(&["threshold", "--k", "40"]);
    assert_eq!(field(&out40, "N0"), "4041");
}

#[test]
fn estimate_with_and_without_noise() {
    let (code, out, err) = run(&["estimate", "--n", "2000", "--k", "20", "--seed", "1"]);
    assert_eq!(code, 0, "{err}");
    let mse: f64 = field(&out, "empirical_mse").parse().unwrap();
    let predicted: f64 = field(&out, "predicted_mse").parse().unwrap();
    assert!(mse > 0.0 && mse < 10.0 * predicted, "{out}");
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with(char::is_numeric))
            .count(),
        20
    );

    let (code, out, _) = run(&[
        "estimate",
        "--n",
        "2000",
        "--k",
        "20",
        "--seed",
        "1",
        "--sigma-w2",
        "0",
    ]);
    assert_eq!(code, 0);
    let mse: f64 = field(&out, "empirical_mse").parse().unwrap();
    assert!(mse < 1e-20, "{mse}");
    assert_eq!(field(&out, "predicted_mse"), "0.00000000000e0");
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    fs::write(
        &cfg,
        "n_values = 100,200\nk_values = 3\ntrials = 5\nmaster_seed = 4\n",
    )
    .unwrap();
    let (code, out, err) = run(&[
        "trace-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "7",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<_> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(
        rows.iter().all(|r| r.split(',').nth(5) == Some("7")),
        "{out}"
    );
}

#[test]
fn config_errors_exit_one_naming_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "trails = 10\n").unwrap();
    let (code, _, err) = run(&["mse-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("trails") && err.contains("trials"), "{err}");

    let (code, _, err) = run(&["rsi-sweep", "--residual", "both"]);
    assert_eq!(code, 1);
    assert!(
        err.contains("residual_mode") && err.contains("analysis, practical"),
        "{err}"
    );

    let (code, _, err) = run(&["rsi-sweep", "--n-list", "100,50", "--k", "5"]);
    assert_eq!(code, 1);
    assert!(
        err.contains("n_values") && err.contains("ascending"),
        "{err}"
    );

    let (code, _, err) = run(&["trace-sweep", "--n", "10", "--k", "20"]);
    assert_eq!(code, 1);
    assert!(err.contains("n_values"), "{err}");

    let (code, _, err) = run(&["mse-sweep", "--sigma-w2", "-1"]);
    assert_eq!(code, 1);
    assert!(err.contains("sigma_w2"), "{err}");

    let (code, _, _) = run(&["mse-sweep", "--bogus"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["estimate", "--n-list", "100,200"]);
    assert_eq!(code, 1);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let (code, _, err) = run(&[
        "trace-sweep",
        "--n",
        "50",
        "--k",
        "2",
        "--trials",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("out.csv"), "{err}");
}

#[test]
fn singular_cell_exits_two_naming_cell() {
    let (code, _, err) = run(&["trace-sweep", "--n", "40", "--k", "40", "--trials", "20"]);
    assert_eq!(code, 2);
    assert!(err.contains("n=40, k=40, trial="), "{err}");
    assert!(err.contains("singular"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("rsi-sweep"));
}

#[test]
fn binary_writes_csv_to_stdout() {
    let output = Command::new(env!("CARGO_BIN_EXE_sicsim"))
        .args([
            "mse-sweep",
            "--n-list",
            "100,400",
            "--k-list",
            "2,4",
            "--trials",
            "20",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let cells: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().into(), f.next().unwrap().into())
        })
        .collect();
    let want: Vec<(String, String)> = [("100", "2"), ("400", "2"), ("100", "4"), ("400", "4")]
        .iter()
        .map(|(n, k)| (n.to_string(), k.to_string()))
        .collect();
    assert_eq!(cells, want);

    let bad = Command::new(env!("CARGO_BIN_EXE_sicsim"))
        .args(["rsi-sweep", "--mod", "8psk"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
