//! Runs the `alqc` binary end to end: exit codes, determinism, file layout.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn alqc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alqc")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&read(p)).unwrap()
}

#[test]
fn sweep_rerun_is_byte_identical_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(alqc(&a, &["sweep"]).status.success());
    assert!(alqc(&b, &["sweep"]).status.success());
    for f in ["sweep.csv", "magic.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = read(&a.join("sweep.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "lambda_nm,omega_rad_s,sigma_raman_m2,sigma_rayleigh_m2,alpha_SI");
    let lambdas: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(lambdas.len(), 221);
    assert!(lambdas.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_across_a_resonance_leaves_a_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = alqc(
        dir.path(),
        &[
            "sweep",
            "--set",
            "sweep.lambda_min_nm=890",
            "--set",
            "sweep.lambda_max_nm=898",
            "--set",
            "sweep.points=81",
            "--set",
            "sweep.window_linewidths=1e5",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read(&dir.path().join("sweep.csv")).lines().count() - 1;
    assert!(rows > 0 && rows < 81, "{rows} rows");
}

#[test]
fn optimize_is_deterministic_and_seed_insensitive() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(alqc(&a, &["optimize"]).status.success());
    assert!(alqc(&b, &["optimize"]).status.success());
    assert!(alqc(&c, &["optimize", "--seed", "99"]).status.success());
    assert_eq!(fs::read(a.join("optimum.json")).unwrap(), fs::read(b.join("optimum.json")).unwrap());
    let e1 = json(&a.join("optimum.json"))["epg"].as_f64().unwrap();
    let e2 = json(&c.join("optimum.json"))["epg"].as_f64().unwrap();
    assert!(((e1 - e2) / e1).abs() < 0.01, "{e1} vs {e2}");
}

#[test]
fn budget_json_has_one_row_per_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    assert!(alqc(dir.path(), &["budget", "--gate", "raman"]).status.success());
    assert!(alqc(dir.path(), &["budget", "--gate", "microwave"]).status.success());
    let raman = json(&dir.path().join("budget_raman.json"));
    assert_eq!(raman["budget"]["breakdown"].as_array().unwrap().len(), 7);
    let total = raman["budget"]["total"].as_f64().unwrap();
    assert!((0.5e-5..2e-5).contains(&total), "{total}");
    let mw = json(&dir.path().join("budget_microwave.json"));
    assert_eq!(mw["budget"]["rows"].as_array().unwrap().len(), 5);
    assert!(read(&dir.path().join("budget_microwave.txt")).contains("P_ms"));
}

#[test]
fn surface_csv_matches_grid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = alqc(dir.path(), &["surface", "--set", "surface.a_points=7", "--set", "surface.w0_points=9"]);
    assert!(out.status.success());
    let csv = read(&dir.path().join("surface.csv"));
    assert_eq!(csv.lines().next().unwrap(), "a_m,w0_m,epg");
    assert_eq!(csv.lines().count() - 1, 63);
}

#[test]
fn simulate_writes_requested_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = alqc(
        dir.path(),
        &[
            "simulate",
            "--set",
            "simulate.grid_points=256",
            "--set",
            "simulate.snapshot_times_us=[0, 10, 20, 40, 60, 76]",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("snapshot_"))
        .count();
    assert_eq!(snaps, 6);
    let r = json(&dir.path().join("gate_result.json"));
    let err = r["result"]["error"].as_f64().unwrap();
    // The default run carries the 0.01 um pointing error.
    assert!(err > 2e-5 / 3.0 && err < 2e-5 * 3.0, "{err}");
}

#[test]
fn scaling_all_addressable_and_power_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = alqc(
        dir.path(),
        &[
            "scaling",
            "--set",
            "scaling.dimensions=2",
            "--set",
            "scaling.sites_per_axis=1000",
            "--set",
            "scaling.n_a_model=\"all\"",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("scaling.json"));
    assert_eq!(r["n_a"].as_f64().unwrap(), r["qubits"].as_f64().unwrap());
    assert_eq!(r["qubits"].as_f64().unwrap(), 1e6);
    assert!(r["kilowatt_scale"].as_bool().unwrap());

    // The flag follows the configured threshold.
    let quiet = dir.path().join("quiet");
    assert!(alqc(&quiet, &["scaling", "--set", "scaling.power_flag_W=1e9"]).status.success());
    assert!(!json(&quiet.join("scaling.json"))["power_flagged"].as_bool().unwrap());
    let loud = dir.path().join("loud");
    assert!(alqc(&loud, &["scaling", "--set", "scaling.power_flag_W=1e-3"]).status.success());
    assert!(json(&loud.join("scaling.json"))["power_flagged"].as_bool().unwrap());
}

#[test]
fn config_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["sweep", "--set", "lattice.bogus=1"],
        vec!["budget", "--gate", "raman", "--set", "raman.P_mW=\"lots\""],
        vec!["scaling", "--set", "scaling.a_um=-1"],
        vec!["optimize", "--config", "/nonexistent/run.toml"],
        vec!["simulate", "--set", "simulate.snapshot_times_us=[500]"],
    ] {
        let out_dir = dir.path().join("never");
        let out = alqc(&out_dir, &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out_dir.exists(), "{args:?} left output behind");
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[scaling]\ngate = \"microwave\"\na_um = 5\nU_L_uK = 200\nlambda_nm = 800\ngate_time_ns = 76000\n")
        .unwrap();
    let out_dir = dir.path().join("o");
    let out = alqc(&out_dir, &["scaling", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p = json(&out_dir.join("scaling.json"))["power_per_beam_set_w"].as_f64().unwrap();
    assert!((52.5..97.5).contains(&p), "{p}");

    let out = alqc(&out_dir, &["scaling", "--config", cfg.to_str().unwrap(), "--set", "scaling.U_L_uK=400"]);
    assert!(out.status.success());
    let p2 = json(&out_dir.join("scaling.json"))["power_per_beam_set_w"].as_f64().unwrap();
    assert!((p2 / p - 2.0).abs() < 1e-9, "{p2} vs {p}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            alqc_cli::config::RunConfig::load(Some(&p), &[]).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 4);
}
