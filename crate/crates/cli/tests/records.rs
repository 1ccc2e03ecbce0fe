use helmfft_cli::config::{parse_config_text, Mode, RhsSpec, RunArgs, Sweep};
use helmfft_cli::error::CliError;
use helmfft_cli::record::{parse_csv, parse_json, write_csv, write_json, RunRecord, CSV_HEADER};
use helmfft_cli::rhs::{read_rhs_file, write_rhs_file};
use helmfft_cli::run::run_one;
use num_complex::Complex64 as C64;

fn record(n3: Option<usize>, oracle: Option<f64>) -> RunRecord {
    RunRecord {
        mode: "verify".into(),
        d: if n3.is_some() { 3 } else { 2 },
        n1: 65,
        n2: 33,
        n3,
        omega: std::f64::consts::TAU,
        init_seconds: 0.1 + 0.2,
        solve_seconds: 1.0 / 3.0,
        residual: 2.2554933509302318e-10,
        oracle_error: oracle,
    }
}

fn args(n1: usize) -> RunArgs {
    RunArgs {
        n1: Some(n1),
        ..RunArgs::default()
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let recs = vec![record(None, None), record(Some(17), Some(3.0e-13))];
    let mut buf = Vec::new();
    write_csv(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    // missing values are empty fields
    assert!(text.lines().nth(1).unwrap().ends_with(','));
    assert_eq!(parse_csv(&text).unwrap(), recs);
}

#[test]
fn json_round_trip_is_exact() {
    let recs = vec![record(None, None), record(Some(9), Some(1e-12))];
    let mut buf = Vec::new();
    write_json(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("\"oracle_error\": null"));
    assert!(text.contains("\"n3\": null"));
    assert_eq!(parse_json(&text).unwrap(), recs);
}

#[test]
fn csv_with_other_header_is_rejected() {
    let text = "mode,d,n1\nsolve,2,5\n";
    assert!(matches!(parse_csv(text), Err(CliError::Config(_))));
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# a comment\nd = 3\nn1 = 9\nn2 = 5  # trailing\nomega = 1.5\nrhs = random:7\nrepeats = 2\n",
    )
    .unwrap();
    let a = RunArgs {
        config: Some(path),
        n1: Some(17),
        ..RunArgs::default()
    };
    let cfg = a.into_config(Mode::Solve).unwrap();
    assert_eq!(cfg.d, 3);
    assert_eq!(cfg.n, [17, 5, 5]);
    assert_eq!(cfg.omega, 1.5);
    assert_eq!(cfg.rhs, RhsSpec::Random(7));
    assert_eq!(cfg.repeats, 2);
}

#[test]
fn config_rejects_unknown_and_duplicate_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "n1 = 9\nwavenumber = 3\n").unwrap();
    let a = RunArgs {
        config: Some(path),
        ..RunArgs::default()
    };
    assert!(matches!(a.into_config(Mode::Solve), Err(CliError::Config(_))));
    assert!(parse_config_text("n1 = 3\nn1 = 4\n").is_err());
    assert!(parse_config_text("n1 3\n").is_err());
}

#[test]
fn defaults() {
    let cfg = args(9).into_config(Mode::Solve).unwrap();
    assert_eq!(cfg.d, 2);
    assert_eq!(cfg.dims(), &[9, 9]);
    assert_eq!(cfg.omega, 2.0 * std::f64::consts::PI);
    assert_eq!(cfg.rhs, RhsSpec::Paper);
    assert!(args(9).into_config(Mode::Solve).is_ok());
    let no_n1 = RunArgs::default().into_config(Mode::Solve);
    assert!(matches!(no_n1, Err(CliError::Config(_))));
}

#[test]
fn bench_sweeps_expand() {
    let mut a = args(65);
    a.sizes = Some("17,33".parse().unwrap());
    a.sweep = Some(Sweep::N1);
    let cfg = a.into_config(Mode::Bench).unwrap();
    let runs = cfg.expand();
    assert_eq!(runs.iter().map(|c| c.n).collect::<Vec<_>>(), vec![[17, 65, 65], [33, 65, 65]]);
}

#[test]
fn rhs_file_round_trip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    let values: Vec<C64> = (0..15).map(|i| C64::new(i as f64 / 7.0, -(i as f64).sqrt())).collect();
    write_rhs_file(&path, 2, &values).unwrap();
    assert_eq!(read_rhs_file(&path, 2, 15).unwrap(), values);
    assert!(read_rhs_file(&path, 3, 15).is_err());
    assert!(read_rhs_file(&path, 2, 16).is_err());

    let mut bytes = std::fs::read(&path).unwrap();
    bytes[0] = b'X';
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(read_rhs_file(&path, 2, 15), Err(CliError::Config(_))));
}

#[test]
fn file_rhs_matches_random_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    let f = helmfft_cli::rhs::random_rhs(11, 9 * 5);
    write_rhs_file(&path, 2, &f).unwrap();

    let mut a = args(9);
    a.n2 = Some(5);
    a.repeats = Some(1);
    a.rhs = Some(RhsSpec::Random(11));
    let from_seed = run_one(&a.clone().into_config(Mode::Solve).unwrap()).unwrap();
    a.rhs = Some(RhsSpec::File(path));
    let from_file = run_one(&a.into_config(Mode::Solve).unwrap()).unwrap();
    assert_eq!(from_seed.residual.to_bits(), from_file.residual.to_bits());
}

#[test]
fn random_runs_are_deterministic() {
    let mut a = args(33);
    a.rhs = Some(RhsSpec::Random(42));
    a.repeats = Some(1);
    let cfg = a.into_config(Mode::Solve).unwrap();
    let r1 = run_one(&cfg).unwrap();
    let r2 = run_one(&cfg).unwrap();
    assert_eq!(r1.residual.to_bits(), r2.residual.to_bits());
}

#[test]
fn verify_paper_rhs_small_grids() {
    for (d, n) in [(2, 9), (2, 17), (3, 5)] {
        let mut a = args(n);
        a.d = Some(d);
        a.repeats = Some(1);
        let r = run_one(&a.into_config(Mode::Verify).unwrap()).unwrap();
        assert!(r.oracle_error.unwrap() <= 1e-9, "{r:?}");
        assert!(r.residual <= 1e-10, "{r:?}");
    }
}

#[test]
fn verify_refuses_grids_above_the_oracle_cap() {
    let mut a = args(145);
    a.repeats = Some(1);
    let err = run_one(&a.into_config(Mode::Verify).unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Solver(helmfft::Error::SizeLimit { .. })), "{err:?}");
    assert_eq!(err.exit_code(), 2);
}
