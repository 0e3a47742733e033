use std::path::Path;
use std::process::{Command, Output};

fn semiband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiband")).args(args).output().expect("binary runs")
}

fn converge(out: &Path, config: &Path) -> Output {
    semiband(&["converge", "--config", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
}

#[test]
fn converge_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "seed = 2024\nreplicas = 4\nmoments = [1, 2, 4]\nn = [24, 48]\n\n[scheme]\nkind = \"curie-weiss\"\nbeta = 0.5\n\n[bandwidth]\nrule = \"power\"\ngamma = 0.6\n",
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = converge(out, &config);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["convergence.csv", "convergence_summary.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
    let manifest = std::fs::read_to_string(a.join("convergence.manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 2024"));
    assert!(manifest.contains("sha256"));

    // A different seed on the command line overrides the file.
    let c = dir.path().join("c");
    let o =
        semiband(&["converge", "--config", config.to_str().unwrap(), "--out-dir", c.to_str().unwrap(), "--seed", "1"]);
    assert!(o.status.success());
    assert_ne!(std::fs::read(a.join("convergence.csv")).unwrap(), std::fs::read(c.join("convergence.csv")).unwrap());

    let o = semiband(&[
        "plot-data",
        "--input",
        a.join("convergence_summary.csv").to_str().unwrap(),
        "--kind",
        "moment_vs_n",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(a.join("convergence_summary.moment_vs_n.dat").exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(semiband(&["converge"]).status.code(), Some(1));
    assert_eq!(semiband(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        semiband(&["converge", "--scheme", "wigner", "--n", "10", "--bandwidth", "wide"]).status.code(),
        Some(1)
    );
    assert_eq!(semiband(&["sample", "--scheme", "wigner", "--n", "10", "--b", "4"]).status.code(), Some(1));
    assert_eq!(semiband(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // |c| = 0.5 is within the decay bound 6^(-0.02), but with 21 entries an
    // equicorrelation below -1/20 is not positive definite.
    let o = semiband(&[
        "sample",
        "--scheme",
        "gaussian",
        "--alpha",
        "0.01",
        "--corr",
        "-0.5",
        "--n",
        "6",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sample_and_verify_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = semiband(&[
        "sample",
        "--scheme",
        "wigner",
        "--dist",
        "rademacher",
        "--n",
        "64",
        "--b",
        "21",
        "--out-dir",
        out,
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("moment 2    1.000000"), "{stdout}");
    let o = semiband(&[
        "plot-data",
        "--input",
        dir.path().join("spectrum.csv").to_str().unwrap(),
        "--kind",
        "esd_histogram",
    ]);
    assert!(o.status.success());

    let o = semiband(&[
        "verify-lemmas",
        "--max-n",
        "3",
        "--max-k",
        "4",
        "--max-pair-n",
        "3",
        "--max-pair-k",
        "3",
        "--out-dir",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("lemma_suite.json").exists());

    let o = semiband(&[
        "verify-aau",
        "--scheme",
        "gaussian",
        "--alpha",
        "0.5",
        "--n",
        "4,8",
        "--max-l",
        "2",
        "--out-dir",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("aau.csv")).unwrap();
    assert!(csv.starts_with("scheme,alpha,n,l,delta_pattern,moment,bound_kind,empirical_constant\n"));

    let o = semiband(&[
        "oracle-compare",
        "--scheme",
        "wigner",
        "--dist",
        "rademacher",
        "--n",
        "3",
        "--replicas",
        "400",
        "--moments",
        "2,4",
        "--out-dir",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
