//! The CLI is a thin binding: its numbers must equal direct library calls.

use std::process::Command;

use ptcmm::config::paper_params;
use ptcmm::dynamics::{default_tolerance, diffusion_matrix, quadrature_drift, stability, DriftParams};
use ptcmm::measures::{pair_measures, solve_lyapunov_with_tolerance, ModePair};
use ptcmm::model::SystemParams;
use ptcmm::steady_state::working_point;
use ptcmm::sweep::{figure_preset, run_sweep, vanishing_temperature};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ptcmm").chain(args.iter().copied());
    let code = ptcmm::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn drift_and_diffusion(
    p: &SystemParams,
) -> (ptcmm::dynamics::QuadratureDrift, ptcmm::dynamics::DiffusionMatrix) {
    let dp = DriftParams::new(p, &working_point(p).unwrap());
    (quadrature_drift(&dp), diffusion_matrix(&dp, &p.occupations().unwrap()))
}

#[test]
fn measures_match_library() {
    let p = paper_params();
    let (a, d) = drift_and_diffusion(&p);
    let cm = solve_lyapunov_with_tolerance(&a, &d, default_tolerance(p.omega_b())).unwrap();
    for (flag, pair) in [("am", ModePair::AM), ("bm", ModePair::BM), ("ab", ModePair::AB)] {
        let v = json(&["measures", "--pair", flag]);
        let pm = pair_measures(&cm, pair).unwrap();
        assert_eq!(v["E_N"].as_f64().unwrap(), pm.e_n);
        assert_eq!(v["S_forward"].as_f64().unwrap(), pm.s_12);
        assert_eq!(v["S_backward"].as_f64().unwrap(), pm.s_21);
        assert_eq!(v["eta_minus"].as_f64().unwrap(), pm.eta_minus);
        assert_eq!(v["residual"].as_f64().unwrap(), cm.residual);
    }
    // --from/--to orders the pair so that S_forward is from -> to
    let v = json(&["measures", "--from", "b", "--to", "a"]);
    let pm = pair_measures(&cm, ModePair::AB).unwrap();
    assert_eq!(v["S_forward"].as_f64().unwrap(), pm.s_21);
    assert_eq!(v["S_backward"].as_f64().unwrap(), pm.s_12);
}

#[test]
fn drift_dump_round_trips() {
    let (code, out, _) = call(&["drift", "--dump"]);
    assert_eq!(code, 0);
    let (a, d) = drift_and_diffusion(&paper_params());
    let rows: Vec<Vec<f64>> =
        out.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        let m = if i < 6 { a.matrix() } else { d.matrix() };
        for (j, &x) in row.iter().enumerate() {
            assert_eq!(x, m[(i % 6, j)]);
        }
    }
}

#[test]
fn figure_csv_is_the_library_table() {
    let (code, out, _) = call(&["figure", "fig3b", "--format", "csv", "--jobs", "2"]);
    assert_eq!(code, 0);
    let expected = run_sweep(&figure_preset("fig3b").unwrap(), 1).unwrap().table().to_csv_string();
    assert_eq!(out, expected);

    let (_, json_out, _) = call(&["figure", "fig3b", "--format", "json"]);
    let rows: Value = serde_json::from_str(&json_out).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 101);
    assert!(rows[0].get("E_N_bm_nats[kappa_a=+0.2kappa_m]").is_some());
}

#[test]
fn conventional_bm_column_is_zero_in_csv() {
    let (_, out, _) = call(&["figure", "fig3b"]);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header = reader.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "E_N_bm_nats[kappa_a=-0.2kappa_m]").unwrap();
    for rec in reader.records() {
        let cell = &rec.unwrap()[col];
        if !cell.is_empty() {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn classify_steady_state_and_stability_match() {
    let p = paper_params();
    let v = json(&["classify"]);
    assert_eq!(v["phase"], "Unbroken");
    assert_eq!(v["margin"].as_f64().unwrap(), p.pt_phase().margin);

    let v = json(&["steady-state"]);
    assert_eq!(v, serde_json::to_value(working_point(&p).unwrap()).unwrap());

    let (a, _) = drift_and_diffusion(&p);
    let report = stability(&a, default_tolerance(p.omega_b())).unwrap();
    let v = json(&["stability"]);
    assert_eq!(v["max_lyapunov"].as_f64().unwrap(), report.max_lyapunov);
    assert_eq!(v["stable"], true);
}

#[test]
fn vanish_temp_matches_library() {
    let args =
        ["vanish-temp", "--pair", "am", "--t-lo", "0", "--t-hi", "400", "--set", "kappa_a=-0.02omega_b"];
    let v = json(&args);
    let p = paper_params().with(ptcmm::model::ParamKey::KappaA, -0.02 * paper_params().omega_b()).unwrap();
    let t = vanishing_temperature(&p, ModePair::AM, 0.0, 0.4).unwrap();
    assert_eq!(v["temperature_K"].as_f64().unwrap(), t);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let (code, out, _) = call(&["classify", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["phase"], "Unbroken");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ptcmm");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let ok = run(&["classify"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stderr.is_empty());

    assert_eq!(run(&["classify", "--set", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--config", "/nonexistent/p.conf"]).status.code(), Some(3));

    let unstable = run(&["measures", "--set", "g_ma=0.06omega_b", "--set", "G_eff=0.2omega_b"]);
    assert_eq!(unstable.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&unstable.stdout).unwrap();
    assert_eq!(v["error"], "unstable_system");
    assert!(v["max_lyapunov"].as_f64().unwrap() > 0.0);
}
