mod common;

use std::path::Path;
use std::process::{Command, Output};

use mca::coherence::{babel_sequence, mutual_coherence};
use mca::io::{read_signal_csv, write_matrix_csv, write_pgm, write_signal_csv};
use mca::{Dictionary, Frame, Signal, C64};

fn mca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mca")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn coherence_fourier_dirac() {
    let report = json(&mca(&["coherence", "--dict", "fourier+dirac", "--n", "64"]));
    assert!((report["mutual"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    let report = json(&mca(&["coherence", "--dict", "fourier+dirac", "--n", "64", "--lambda1", "[]"]));
    assert_eq!(report["cluster_12"].as_f64().unwrap(), 0.0);
    assert!(report["kappa_upper"].as_f64().is_some());
}

#[test]
fn coherence_of_matrix_file_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dict.csv");
    let a = common::to_complex(&common::random_real_normalized(&mut common::rng(8), 5, 9));
    write_matrix_csv(&file, &a).unwrap();
    let spec = format!("matrix:{}", path(&file));
    let out_dir = dir.path().join("out");
    let report = json(&mca(&["coherence", "--dict", &spec, "--out", path(&out_dir)]));
    let f = Frame::from_matrix(a).unwrap();
    assert!((report["mutual"].as_f64().unwrap() - mutual_coherence(&f).unwrap()).abs() < 1e-12);
    let babel: Vec<f64> = report["babel"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in babel.iter().zip(babel_sequence(&f).unwrap()) {
        assert!((got - want).abs() < 1e-12);
    }
    assert_eq!(read_json(&out_dir.join("coherence.json")), report);
}

#[test]
fn invalid_specs_exit_2() {
    assert_eq!(mca(&["coherence", "--dict", "wavelet+dirac", "--n", "8"]).status.code(), Some(2));
    assert_eq!(mca(&["coherence", "--dict", "fourier+dirac"]).status.code(), Some(2));
    assert_eq!(mca(&["coherence", "--dict", "fourier+dirac", "--n", "8", "--lambda1", "[99]"]).status.code(), Some(2));
    assert_eq!(mca(&["phase-transition", "--n", "8", "--k-min", "3", "--k-max", "2"]).status.code(), Some(2));
    assert_eq!(mca(&["phase-transition", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(mca(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(mca(&["demo2d", "--size", "48", "--out", "/tmp/unused"]).status.code(), Some(2));
}

#[test]
fn phase_transition_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["phase-transition", "--n", "64", "--k-min", "1", "--k-max", "8", "--trials", "10", "--seed", "3"];
    let out = mca(&[&args[..], &["--out", path(dir.path())]].concat());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("phase_transition.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,success_rate,mean_rel_error,below_theorem_bound"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        if row[3] == "true" {
            assert_eq!(row[1], "1.0", "{row:?}");
        }
    }
    assert_eq!(rows[7][3], "false");
    // deterministic under a fixed seed
    let again = tempfile::tempdir().unwrap();
    assert!(mca(&[&args[..], &["--out", path(again.path())]].concat()).status.success());
    assert_eq!(std::fs::read(again.path().join("phase_transition.csv")).unwrap(), text.as_bytes());
}

#[test]
fn uncertainty_reports() {
    let dir = tempfile::tempdir().unwrap();
    let summary = json(&mca(&["uncertainty", "--n", "16", "--trials", "100", "--out", path(dir.path())]));
    assert_eq!(summary["min_sum"], 8);
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["comb_attains_bound"], true);
    let text = std::fs::read_to_string(dir.path().join("uncertainty.csv")).unwrap();
    assert!(text.starts_with("signal,count_time,count_frequency,sum,lower_bound,holds\n"));
    assert_eq!(text.lines().count(), 1 + 2 + 100);
    let summary = json(&mca(&["uncertainty", "--n", "15", "--trials", "10"]));
    assert!((summary["lower_bound"].as_f64().unwrap() - 2.0 * 15f64.sqrt()).abs() < 1e-9);
    assert_eq!(summary["comb_attains_bound"], serde_json::Value::Null);
}

fn sinusoid_plus_spikes(n: usize) -> (Signal, Signal) {
    let f = Frame::fourier(n).unwrap();
    let mut c = vec![C64::new(0.0, 0.0); n];
    c[3] = C64::new(1.0, 0.0);
    c[n - 3] = C64::new(1.0, 0.0);
    let sinusoid = f.synthesize(&c).unwrap();
    let mut spikes = vec![0.0; n];
    spikes[10] = 1.0;
    spikes[41] = -0.7;
    (sinusoid, Signal::from_real(&spikes).unwrap())
}

#[test]
fn separate_sinusoid_and_spikes() {
    let dir = tempfile::tempdir().unwrap();
    let (s1, s2) = sinusoid_plus_spikes(64);
    let input = dir.path().join("x.csv");
    write_signal_csv(&input, &s1.add(&s2).unwrap()).unwrap();
    let out_dir = dir.path().join("sep");
    let out = mca(&[
        "separate", "--input", path(&input), "--dict", "fourier+dirac", "--mode", "synthesis_eq", "--trace", "--out",
        path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let x1 = read_signal_csv(&out_dir.join("component1.csv")).unwrap();
    let x2 = read_signal_csv(&out_dir.join("component2.csv")).unwrap();
    assert!(x1.sub(&s1).unwrap().norm2() < 1e-5);
    assert!(x2.sub(&s2).unwrap().norm2() < 1e-5);
    for file in ["residual.csv", "coefficients.csv", "certificate.json", "bound_report.json", "trace.csv"] {
        assert!(out_dir.join(file).exists(), "{file}");
    }
    let report = read_json(&out_dir.join("bound_report.json"));
    assert_eq!(report["estimated"], true);
    assert_eq!(read_json(&out_dir.join("certificate.json"))["converged"], true);
}

#[test]
fn separate_zero_input_all_modes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.csv");
    write_signal_csv(&input, &Signal::from_real(&[0.0; 16]).unwrap()).unwrap();
    for mode in ["synthesis_eq", "analysis_eq", "synthesis_denoise", "analysis_denoise"] {
        let out_dir = dir.path().join(mode);
        let out = mca(&[
            "separate", "--input", path(&input), "--dict", "dct+haar", "--mode", mode, "--lambda", "1", "--out",
            path(&out_dir),
        ]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
        for name in ["component1", "component2", "residual"] {
            assert!(read_signal_csv(&out_dir.join(format!("{name}.csv"))).unwrap().is_zero(), "{mode} {name}");
        }
    }
}

#[test]
fn separate_flags_non_convergence_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (s1, s2) = sinusoid_plus_spikes(64);
    let input = dir.path().join("x.csv");
    write_signal_csv(&input, &s1.add(&s2).unwrap()).unwrap();
    let out_dir = dir.path().join("sep");
    let out = mca(&[
        "separate", "--input", path(&input), "--dict", "fourier+dirac", "--max-iterations", "1", "--out",
        path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(read_json(&out_dir.join("certificate.json"))["converged"], false);
    assert!(out_dir.join("component1.csv").exists());
}

#[test]
fn separate_bad_input_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.csv");
    std::fs::write(&input, "1.0\nnot-a-number\n").unwrap();
    let out = mca(&["separate", "--input", path(&input), "--dict", "dct+dirac", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let missing = mca(&["separate", "--input", "/nonexistent.csv", "--dict", "dct+dirac", "--out", path(dir.path())]);
    assert_eq!(missing.status.code(), Some(2));
    // denoising without lambda
    write_signal_csv(&input, &Signal::from_real(&[1.0; 8]).unwrap()).unwrap();
    let out = mca(&[
        "separate", "--input", path(&input), "--dict", "dct+dirac", "--mode", "analysis_denoise", "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn separate_pgm_scene() {
    let scene = mca::cli::generate_scene(&mca::cli::DemoConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scene.pgm");
    // 8-bit PGM clips to [0, 1]; the dots and lines survive as bright pixels
    write_pgm(&input, &scene.image, 0.0).unwrap();
    let out_dir = dir.path().join("sep");
    let out = mca(&[
        "separate", "--input", path(&input), "--dict", "haar2d+dct2d", "--mode", "analysis_denoise", "--lambda",
        "14.142135623730951", "--out", path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let x = mca::io::read_pgm(&input).unwrap();
    let x1 = read_signal_csv(&out_dir.join("component1.csv")).unwrap();
    let x2 = read_signal_csv(&out_dir.join("component2.csv")).unwrap();
    let r = read_signal_csv(&out_dir.join("residual.csv")).unwrap();
    let partition = x.values().iter().zip(x1.values()).zip(x2.values()).zip(r.values());
    assert!(partition.map(|(((a, b), c), d)| (a - b - c - d).norm()).fold(0.0, f64::max) < 1e-12);
    let dots = scene.points.values();
    let captured: f64 = x1.values().iter().zip(dots).map(|(a, b)| (a * b).re).sum();
    let energy: f64 = dots.iter().map(|v| v.norm_sqr()).sum();
    assert!(captured / energy >= 0.7, "{}", captured / energy);
    for name in ["component1.pgm", "component2.pgm", "residual.pgm"] {
        assert!(out_dir.join(name).exists());
    }
    assert_eq!(read_json(&out_dir.join("bound_report.json")), serde_json::Value::Null);
}

#[test]
fn demo2d_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&mca(&["demo2d", "--out", path(dir.path())]));
    assert_eq!(report["partition_error"].as_f64().unwrap(), 0.0);
    assert!(report["dot_energy_fraction"].as_f64().unwrap() >= 0.7);
    let residual = report["residual_norm"].as_f64().unwrap();
    let expected = 64.0 * 0.05;
    assert!(residual >= expected / 2.0 && residual <= expected * 2.0, "{residual}");
    let again = tempfile::tempdir().unwrap();
    assert!(mca(&["demo2d", "--out", path(again.path())]).status.success());
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(std::fs::read(dir.path().join(&name)).unwrap(), std::fs::read(again.path().join(&name)).unwrap());
    }

    let empty = tempfile::tempdir().unwrap();
    let args = ["demo2d", "--size", "32", "--points", "0", "--lines", "0", "--sigma", "0", "--out", path(empty.path())];
    assert!(mca(&args).status.success());
    for name in ["scene", "component1", "component2", "residual"] {
        assert!(read_signal_csv(&empty.path().join(format!("{name}.csv"))).unwrap().is_zero(), "{name}");
    }
}
