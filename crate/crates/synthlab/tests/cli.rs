use std::fs;
use std::path::Path;
use std::process::Command;

use synthlab::{parse_config, run_experiment, Pool};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synthlab"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const VOLUME: &str = "command = volume
seed = 42

[manifold]
kind = torus
dim = 2

[measure]
preset = subtorus
k = 1

[params]
delta_grid = 0.1, 0.2, 0.4
n_samples = 50000
";

const PROFILE: &str = "command = profile

[manifold]
kind = sphere

[measure]
preset = equator

[params]
lambda_max = 65
";

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    bin()
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn minimal_spectrum_config_is_valid() {
    let c = parse_config("command = spectrum\n[manifold]\nkind = torus2\n[params]\nlambda_max = 10\n").unwrap();
    assert_eq!(c.params.lambda_max, Some(10.0));
}

#[test]
fn stability_rejects_p_below_two() {
    let text = "command = stability\n[manifold]\nkind = torus\n[measure]\npreset = segment\nstart = 0, 0\nend = 1, 1\n\
                [params]\nlambda_max = 64\np = 1.5\nr_grid = 8, 16\n";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.violations.len(), 1);
    assert_eq!(err.violations[0].line, 10);
    assert!(err.violations[0].message.contains("p must exceed 2"));
}

#[test]
fn full_dimensional_measure_is_not_thin() {
    let text = "command = volume\n[manifold]\nkind = torus\ndim = 3\n[measure]\npreset = subtorus\nk = 3\n\
                [params]\ndelta_grid = 0.1, 0.2\nn_samples = 10000\n";
    let err = parse_config(text).unwrap_err();
    assert!(err.to_string().contains("line 6: [measure]: support not thin"), "{err}");
}

#[test]
fn every_violation_is_listed() {
    let text = "command = approx\nthreads = 0\n[manifold]\nkind = klein\n[params]\nterms = 0\nterms = 3\nwidth = 2\n";
    let err = parse_config(text).unwrap_err();
    let lines: Vec<usize> = err.violations.iter().map(|v| v.line).collect();
    assert_eq!(&lines[..5], &[2, 4, 6, 7, 8], "{err}");
    assert!(err.to_string().contains("missing required key `params.lambda_max`"));
    assert!(err.to_string().contains("missing required key `params.trials`"));
    assert!(err.to_string().contains("needs a [measure] or a [function] section"));
}

#[test]
fn echoed_config_reparses_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.conf",
        &format!("threads = 3\n{VOLUME}[output]\ndir = elsewhere\n"),
    );
    let out = run("volume", &cfg, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let jsonl = fs::read_to_string(dir.path().join("volume.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(header["schema"], "synthlab-report/1");
    let echoed = parse_config(header["config"].as_str().unwrap()).unwrap();
    let original = parse_config(&fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(echoed, original.canonical());
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.conf", VOLUME);
    let mut files = Vec::new();
    for threads in ["1", "2", "8"] {
        let out_dir = dir.path().join(threads);
        let out = run("volume", &cfg, &out_dir, &["--threads", threads]);
        assert!(out.status.success());
        files.push((
            fs::read(out_dir.join("volume.csv")).unwrap(),
            fs::read(out_dir.join("volume.jsonl")).unwrap(),
        ));
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn seed_override_changes_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.conf", VOLUME);
    run("volume", &cfg, &dir.path().join("a"), &[]);
    run("volume", &cfg, &dir.path().join("b"), &["--seed", "43"]);
    let a = fs::read(dir.path().join("a/volume.csv")).unwrap();
    let b = fs::read(dir.path().join("b/volume.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn summary_values_agree_in_process() {
    let c = parse_config(VOLUME).unwrap();
    let one = run_experiment(&c, &Pool::new(1).unwrap()).unwrap();
    let many = run_experiment(&c, &Pool::new(6).unwrap()).unwrap();
    for ((na, a), (nb, b)) in one.values.iter().zip(&many.values) {
        assert_eq!(na, nb);
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn profile_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.conf", PROFILE);
    let out = run("profile", &cfg, dir.path(), &[]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(dir.path().join("profile.csv")).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        ["l", "lambda", "norm2_closed_form", "norm2_quadrature", "abs_diff"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 65);
    assert_eq!(&rows[64][0], "64");
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.conf", PROFILE);
    assert_eq!(run("profile", &ok, dir.path(), &[]).status.code(), Some(0));

    let failing = write(dir.path(), "fail.conf", &format!("{PROFILE}sup_bound = 1.5\n"));
    let out = run("profile", &failing, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL sup_norm"));

    let bad = write(dir.path(), "bad.conf", "command = profile\n[manifold]\nkind = sphere\n");
    let out = run("profile", &bad, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing required key"));

    assert_eq!(run("volume", &ok, dir.path(), &[]).status.code(), Some(1));
    assert_eq!(
        run("profile", &dir.path().join("absent.conf"), dir.path(), &[])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run("profile", &ok, dir.path(), &["--threads", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn module_errors_name_the_operation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.conf",
        "command = stability\n[manifold]\nkind = torus\n[measure]\npreset = segment\nstart = 0, 0\nend = 1, 1\n\
         [params]\nlambda_max = 32\np = 3\nr_grid = 8, 64\n",
    );
    let out = run("stability", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("synthesis::stability_certificate:"), "{err}");
}
