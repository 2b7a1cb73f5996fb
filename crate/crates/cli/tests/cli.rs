use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use icebox_cli::plot::{emit_plot, PlotKind, PlotSpec};
use icebox_cli::{select_target, CliError, ExperimentConfig, ExperimentId, RunReport};
use tempfile::TempDir;

fn icebox(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_icebox")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn run_in(dir: &Path, name: &str, experiment: &str, sets: &[&str]) -> (i32, PathBuf) {
    let out = dir.join(name);
    let mut args = vec![experiment, "--out", out.to_str().unwrap()];
    for s in sets {
        if !s.starts_with("--") {
            args.push("--set");
        }
        args.push(s);
    }
    let (code, err) = icebox(&args);
    assert!(code == 0 || !err.is_empty());
    (code, out)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[k].parse().unwrap()).collect()
}

fn presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run_in(tmp.path(), "ok", "grover-check", &["n=4", "steps=2"]).0, 0);
    assert_eq!(run_in(tmp.path(), "key", "grover-check", &["qubits=4"]).0, 1);
    assert_eq!(run_in(tmp.path(), "type", "toy-wave", &["n_b=\"many\""]).0, 1);
    assert_eq!(run_in(tmp.path(), "range", "scaling", &["sizes=[4,5,6,7]"]).0, 1);
    assert_eq!(icebox(&["no-such-experiment", "--out", "x"]).0, 1);
    assert_eq!(icebox(&["gap", "--config", "/nonexistent.toml", "--out", "x"]).0, 1);

    // The guard refuses before anything is written.
    let (code, out) = run_in(tmp.path(), "big", "nonlocal", &["n_s=11", "n_b=11"]);
    assert_eq!(code, 2);
    assert!(!out.exists());

    // An unreachable eigensolver tolerance fails the run and says so in the report.
    let (code, out) = run_in(tmp.path(), "stuck", "gap", &["n_s=6", "tolerance=1e-300", "profile_distance=0"]);
    assert_eq!(code, 3);
    let report = RunReport::read(&out).unwrap();
    assert_eq!(report.status, "failed");
    assert!(report.error.unwrap().contains("converge"));
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = TempDir::new().unwrap();
    let sets = ["n_s=4", "t_max=200", "dt=0.5", "seed=42"];
    let (_, a) = run_in(tmp.path(), "a", "local-evolve", &sets);
    let (_, b) = run_in(tmp.path(), "b", "local-evolve", &sets);
    for file in ["pg.csv", "spectrum.csv", "peaks.csv", "gaps.csv", "estimate.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let sets = ["n_b=5", "t_max=2", "seed=9"];
    let (_, a) = run_in(tmp.path(), "ta", "toy-wave", &sets);
    let (_, b) = run_in(tmp.path(), "tb", "toy-wave", &sets);
    for file in ["pg.csv", "magnetization.csv", "bath_energy.csv", "spinwave.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn csv_values_keep_full_precision() {
    let tmp = TempDir::new().unwrap();
    let (_, out) = run_in(tmp.path(), "p", "nonlocal", &["n_s=3", "n_b=3"]);
    let text = fs::read_to_string(out.join("nonlocal.csv")).unwrap();
    let line = text.lines().nth(7).unwrap();
    for field in line.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
}

#[test]
fn target_selection_is_deterministic() {
    for n in [1usize, 5, 12, 20] {
        for seed in [0u64, 1, 42, u64::MAX] {
            let t = select_target(n, seed);
            assert_eq!(t, select_target(n, seed));
            assert!(t < 1 << n);
        }
    }
    let distinct: std::collections::BTreeSet<usize> = (0..32).map(|s| select_target(12, s)).collect();
    assert!(distinct.len() > 16);
}

#[test]
fn gap_spectra_depend_only_on_distance() {
    let (s1, s2) = (3u64, 4u64);
    assert_ne!(select_target(12, s1), select_target(12, s2));
    let tmp = TempDir::new().unwrap();
    let runs: Vec<PathBuf> = [s1, s2]
        .iter()
        .map(|s| {
            let seed = format!("seed={s}");
            let (code, out) = run_in(tmp.path(), &seed, "gap", &["n_s=12", &seed, "profile_distance=0"]);
            assert_eq!(code, 0);
            out
        })
        .collect();
    let (a, b) = (RunReport::read(&runs[0]).unwrap(), RunReport::read(&runs[1]).unwrap());
    assert_ne!(a.summary["target"], b.summary["target"]);
    for col in ["e0", "e1", "omega"] {
        let (x, y) = (column(&runs[0].join("gaps.csv"), col), column(&runs[1].join("gaps.csv"), col));
        assert_eq!(x.len(), 12);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-9, "{col}: {p} vs {q}");
        }
    }
}

#[test]
fn report_manifest_and_audit() {
    let tmp = TempDir::new().unwrap();
    let (code, out) = run_in(tmp.path(), "r", "local-evolve", &["n_s=3", "t_max=100", "dt=0.5", "method=blocks", "seed=5", "--plot"]);
    assert_eq!(code, 0);
    let report = RunReport::read(&out).unwrap();
    assert_eq!(report.status, "ok");
    assert_eq!(report.seed, 5);
    assert_eq!(report.config["params"]["method"], "blocks");
    assert_eq!(report.audit.trajectories, 8);
    assert!(report.audit.passed && report.audit.max_norm_drift <= 1e-9 && report.audit.max_energy_drift <= 1e-9);
    assert!(report.timings.kernels.contains_key("propagation"));
    assert!(!report.manifest.is_empty());
    for entry in &report.manifest {
        let meta = fs::metadata(out.join(&entry.file)).unwrap();
        assert_eq!(meta.len(), entry.bytes, "{}", entry.file);
    }
    for file in ["pg.csv", "pg.meta.json", "spectrum.svg", "pg.svg"] {
        assert!(report.manifest.iter().any(|e| e.file == file), "{file}");
    }
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("pg.meta.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 5);

    // Experiments without propagation still fill the audit.
    let (_, out) = run_in(tmp.path(), "w", "wavepacket", &["n_s=10"]);
    let report = RunReport::read(&out).unwrap();
    assert_eq!(report.audit.trajectories, 0);
    assert!(report.audit.passed);
}

#[test]
fn nonlocal_overlay_agrees_with_exact_reduction() {
    let tmp = TempDir::new().unwrap();
    let (code, out) = run_in(tmp.path(), "n", "nonlocal", &[]);
    assert_eq!(code, 0);
    let file = out.join("nonlocal.csv");
    let (full, exact, closed) = (column(&file, "full"), column(&file, "exact_4x4"), column(&file, "closed_form"));
    let worst = full.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
    assert_eq!(closed.len(), exact.len());
    assert!(closed.iter().all(|p| (0.0..=1.0).contains(p)));
    assert!((full[0] - 1.0 / 32.0).abs() < 1e-14);
}

#[test]
fn block_methods_match_full_propagation() {
    let tmp = TempDir::new().unwrap();
    let base = ["n_s=4", "t_max=150", "dt=0.5", "seed=2"];
    let pg: Vec<Vec<f64>> = ["full", "blocks", "distances"]
        .iter()
        .map(|m| {
            let method = format!("method={m}");
            let mut sets = base.to_vec();
            sets.push(&method);
            let (code, out) = run_in(tmp.path(), m, "local-evolve", &sets);
            assert_eq!(code, 0);
            column(&out.join("pg.csv"), "P_g")
        })
        .collect();
    for other in &pg[1..] {
        let worst = pg[0].iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{worst}");
    }
}

#[test]
fn scaling_writes_a_fit() {
    let tmp = TempDir::new().unwrap();
    let (code, out) = run_in(tmp.path(), "s", "scaling", &["sizes=[8, 9, 10, 11]", "--plot"]);
    assert_eq!(code, 0);
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("scaling.json")).unwrap()).unwrap();
    let slope = fit["slope"].as_f64().unwrap();
    assert!(slope < 0.0 && slope > -1.0);
    assert_eq!(fit["points"].as_array().unwrap().len(), 4);
    let svg = fs::read_to_string(out.join("scaling.svg")).unwrap();
    assert!(svg.contains("slope -0.5") && svg.contains("slope -1"));
}

#[test]
fn plots_render_only_existing_columns() {
    let tmp = TempDir::new().unwrap();
    let (_, out) = run_in(tmp.path(), "t", "toy-wave", &["n_b=5", "t_max=2", "--plot"]);
    for svg in ["pg.svg", "magnetization.svg", "bath_energy.svg"] {
        let text = fs::read_to_string(out.join(svg)).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"), "{svg}");
    }
    let before = fs::read(out.join("pg.csv")).unwrap();
    let mut spec = PlotSpec::line("x", "pg.csv", "t", &["P_g"], "t", "P_g");
    spec.kind = PlotKind::LogLog;
    emit_plot(&out, &spec).unwrap();
    assert_eq!(fs::read(out.join("pg.csv")).unwrap(), before);

    let missing = PlotSpec::line("x", "pg.csv", "t", &["no_such_column"], "t", "P_g");
    let err = emit_plot(&out, &missing).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert_eq!(err.exit_code(), 1);
    let absent = PlotSpec::line("x", "absent.csv", "t", &["P_g"], "t", "P_g");
    assert!(matches!(emit_plot(&out, &absent), Err(CliError::Usage(_))));
}

#[test]
fn presets_validate() {
    let mut seen = 0;
    for entry in fs::read_dir(presets()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let table: toml::Table = text.parse().unwrap();
        let id: ExperimentId = table["experiment"].clone().try_into().unwrap();
        let cfg = ExperimentConfig::from_sources(id, &text, &[], PathBuf::from("unused"), false)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.check_resources().unwrap();
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn config_file_and_overrides_combine() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "experiment = \"grover-check\"\nn = 5\nsteps = 3\n").unwrap();
    let out = tmp.path().join("o");
    let (code, _) = icebox(&["grover-check", "--config", cfg.to_str().unwrap(), "--set", "steps=4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(column(&out.join("grover.csv"), "step").len(), 5);
    let (code, _) = icebox(&["gap", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
}
