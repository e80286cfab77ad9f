#![allow(clippy::approx_constant)]

use rankone::orbit::{iterate_orbit, OrbitConfig};
use rankone::{Model, ModelFunctions, ModelParams};
use rankone_cli::{emit_config, figure_preset, parse_config, parse_config_str, render_ppm, Bounds, ConfigError, RenderError};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankone"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn params_json(eps1: f64, delta2: f64) -> String {
    format!(r#"{{"params": {{"eps1": {eps1}, "eps2": 0.0, "alpha1": 6.2831, "alpha2": 3.14155, "delta": 2.0, "delta1": 5.0, "delta2": {delta2}, "b": 0.5}}}}"#)
}

#[test]
fn preset_values() {
    let p = figure_preset("fig5").unwrap();
    assert_eq!((p.initial.x, p.initial.y, p.initial.t), (0.6961, 1.3277, 0.5856));
    assert_eq!((p.params.eps1, p.params.eps2, p.params.delta1, p.params.alpha1, p.params.alpha2), (0.105, 0.0, 5.0, 6.2831, 3.14155));
    assert_eq!(p.window(), (1000, 21000));
    let p = figure_preset("fig6").unwrap();
    assert_eq!((p.initial.x, p.initial.y, p.initial.t), (0.9073, 1.4529, 0.5635));
    assert_eq!((p.params.eps1, p.params.eps2, p.params.delta1, p.params.delta2), (0.1, 0.0, 10.0, 0.001));
    assert_eq!((p.params.alpha1, p.params.alpha2), (6.2832, 4.4407));
    assert_eq!(p.window(), (1500, 31500));
    let p = figure_preset("fig7").unwrap();
    assert_eq!((p.initial.x, p.initial.y, p.initial.t), (0.8394, 1.3789, 0.8716));
    assert_eq!((p.params.eps1, p.params.eps2, p.params.delta1, p.params.delta2), (0.2, 0.1, 5.0, 0.001));
    assert_eq!((p.params.alpha1, p.params.alpha2), (6.2832, 3.1416));
    assert_eq!(p.window(), (5000, 105000));
    let p = figure_preset("fig8").unwrap();
    assert_eq!((p.initial.x, p.initial.y, p.initial.t), (0.8162, 1.0488, 0.6393));
    assert_eq!((p.params.eps1, p.params.eps2, p.params.delta1, p.params.delta2), (0.2, 0.1, 5.0, 1e-7));
    assert_eq!((p.params.alpha1, p.params.alpha2), (6.2832, 1.5708));
    assert_eq!(p.window(), (5000, 105000));
    for p in ["fig5", "fig6", "fig7", "fig8"].map(|n| figure_preset(n).unwrap()) {
        assert_eq!((p.params.delta, p.params.b), (2.0, 0.5));
        assert_eq!(p.functions, ModelFunctions::sine_family());
    }
    assert!(figure_preset("fig9").is_err());
}

#[test]
fn minimal_config_gets_sine_family() {
    let (p, f) = parse_config_str(&params_json(0.105, 0.0), Path::new("c.json"), false).unwrap();
    assert_eq!(p.eps1, 0.105);
    assert_eq!(f, ModelFunctions::sine_family());
}

#[test]
fn strict_config_cites_h1() {
    match parse_config_str(&params_json(1.5, 0.0), Path::new("c.json"), true) {
        Err(ConfigError::Validation { hypothesis, .. }) => assert_eq!(hypothesis, "H1"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_key_is_a_parse_error_with_position() {
    let text = "{\n  \"params\": {\"eps1\": 0.1, \"eps2\": 0.0, \"alpha1\": 0.0, \"alpha2\": 0.0,\n  \"delta\": 2.0, \"delta1\": 5.0, \"delta2\": 0.0, \"b\": 0.5, \"gamma\": 1.0}\n}";
    match parse_config_str(text, Path::new("c.json"), false) {
        Err(ConfigError::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("gamma"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn canonical_config_roundtrip() {
    let d = tempfile::tempdir().unwrap();
    let p = ModelParams { eps1: 0.123456789012345, alpha2: 1.0 / 3.0, delta2: 1e-7, ..Default::default() };
    let mut f = ModelFunctions::sine_family();
    f.psi3 = rankone::TrigPoly::new(2.0, vec![0.25], vec![0.5, -1e-3]);
    let text = emit_config(&p, &f);
    let path = write(d.path(), "c.json", &text);
    let (p2, f2) = parse_config(&path, false).unwrap();
    assert_eq!((p, f.clone()), (p2, f2.clone()));
    assert_eq!(emit_config(&p2, &f2), text);
}

#[test]
fn ppm_single_centre_point() {
    let img = render_ppm(&[(0.0, 0.0)], &Bounds::square(1.0), 3, 3).unwrap();
    let header = b"P6\n3 3\n255\n";
    assert_eq!(&img[..header.len()], header);
    let px = &img[header.len()..];
    for k in 0..9 {
        let v = if k == 4 { 0 } else { 255 };
        assert_eq!(&px[3 * k..3 * k + 3], &[v, v, v]);
    }
}

#[test]
fn ppm_empty_and_degenerate() {
    let img = render_ppm(&[], &Bounds { x: [0.0, 0.0], y: [0.0, 0.0] }, 3, 3).unwrap();
    let mut want = b"P6\n3 3\n255\n".to_vec();
    want.extend([255u8; 27]);
    assert_eq!(img, want);
    assert_eq!(render_ppm(&[(0.0, 0.0)], &Bounds { x: [0.0, 0.0], y: [0.0, 1.0] }, 3, 3), Err(RenderError::EmptyBounds));
}

#[test]
fn ppm_rows_are_flipped() {
    let img = render_ppm(&[(-0.9, 0.9)], &Bounds::square(1.0), 2, 2).unwrap();
    let px = &img[b"P6\n2 2\n255\n".len()..];
    assert_eq!(&px[..3], &[0, 0, 0]);
    assert!(px[3..].iter().all(|&v| v == 255));
}

#[test]
fn fig5_cloud_is_an_annulus() {
    let fp = figure_preset("fig5").unwrap();
    let run = iterate_orbit(&Model::new(fp.params, fp.functions), fp.initial, &OrbitConfig { burn: fp.burn, samples: fp.samples, slack: 0.5, project: true });
    let (w, h) = (800usize, 800usize);
    let r = 1.6;
    let img = render_ppm(&run.projected(), &Bounds::square(r), w, h).unwrap();
    let px = &img[b"P6\n800 800\n255\n".len()..];
    let mut black = 0;
    let mut inside_hole = 0;
    for row in 0..h {
        for col in 0..w {
            if px[3 * (row * w + col)] == 0 {
                black += 1;
                let x = -r + 2.0 * r * (col as f64 + 0.5) / w as f64;
                let y = r - 2.0 * r * (row as f64 + 0.5) / h as f64;
                if x.hypot(y) < 0.99 {
                    inside_hole += 1;
                }
            }
        }
    }
    assert_eq!(inside_hole, 0);
    assert!((2_000..=20_000).contains(&black), "{black}");
}

#[test]
fn check_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let ok = write(d.path(), "ok.json", &params_json(0.1, 0.001));
    let bad = write(d.path(), "bad.json", &params_json(0.1, 0.5));
    assert_eq!(bin().args(["check", "--config"]).arg(&ok).output().unwrap().status.code(), Some(0));
    let out = bin().args(["check", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("H5"));
    let out = bin().args(["check", "--strict", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let missing = d.path().join("nope.json");
    assert_eq!(bin().args(["check", "--config"]).arg(&missing).output().unwrap().status.code(), Some(4));
    let garbage = write(d.path(), "g.json", "{not json");
    assert_eq!(bin().args(["check", "--config"]).arg(&garbage).output().unwrap().status.code(), Some(2));
}

#[test]
fn orbit_command_is_repeatable() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &params_json(0.105, 0.0));
    let run = |name: &str| {
        let out = d.path().join(name);
        let ppm = d.path().join(format!("{name}.ppm"));
        let st = bin()
            .args(["orbit", "--config"])
            .arg(&cfg)
            .args(["--x0", "0.6961", "--y0", "1.3277", "--t0", "0.5856", "--burn", "10", "--samples", "200", "--out"])
            .arg(&out)
            .arg("--ppm")
            .arg(&ppm)
            .args(["--width", "64", "--height", "48"])
            .output()
            .unwrap()
            .status;
        assert_eq!(st.code(), Some(0));
        (fs::read(out).unwrap(), fs::read(ppm).unwrap())
    };
    let (a, pa) = run("a.csv");
    let (b, pb) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(pa, pb);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("n,x,y,t,X,Y\n11,"));
    assert_eq!(text.lines().count(), 201);
    assert!(pa.starts_with(b"P6\n64 48\n255\n"));
}

#[test]
fn escaping_orbit_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"params": {"eps1": 0.0, "eps2": 0.0, "alpha1": 0.0, "alpha2": 0.0, "delta": 2.0, "delta1": 1.0, "delta2": 0.0, "b": 0.5}}"#,
    );
    let out = d.path().join("o.csv");
    let st = bin()
        .args(["orbit", "--config"])
        .arg(&cfg)
        .args(["--x0", "0", "--y0", "1.5", "--t0", "0", "--burn", "0", "--samples", "100", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(st.code(), Some(3));
    assert!(fs::read_to_string(out).unwrap().starts_with("n,x,y,t,X,Y\n1,"));
}

#[test]
fn lyapunov_json() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &params_json(0.105, 0.0));
    let out = d.path().join("l.json");
    let st = bin()
        .args(["lyapunov", "--config"])
        .arg(&cfg)
        .args(["--x0", "0.6961", "--y0", "1.3277", "--t0", "0.5856", "--iters", "5000", "--qr-period", "5", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["qr_period"], 5);
    assert_eq!(v["iters"], 5000);
    assert_eq!(v["escape"]["escaped"], false);
    assert_eq!(v["history"].as_array().unwrap().len(), 5);
    let e: Vec<f64> = v["exponents"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(e[0] >= e[1] && e[1] >= e[2]);
    assert!((e.iter().sum::<f64>() - v["mean_log_det"].as_f64().unwrap()).abs() <= 1e-6);
}

#[test]
fn rotation_and_tongues() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"params": {"eps1": 0.1, "eps2": 0.0, "alpha1": 6.2832, "alpha2": 4.4407, "delta": 2.0, "delta1": 10.0, "delta2": 0.001, "b": 0.5}}"#,
    );
    let out = d.path().join("r.json");
    let st = bin().args(["rotation", "--config"]).arg(&cfg).args(["--t0", "0.5635", "--iters", "100000", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!((v["rho"].as_f64().unwrap() - 0.70676).abs() < 1e-3);
    assert!(v["locked"].is_null());

    let out = d.path().join("t.csv");
    let st = bin().args(["tongues", "--config"]).arg(&cfg).args(["--a2", "0:6:4", "--d2", "0:0.5:3", "--qmax", "6", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().next(), Some("alpha2,delta2,rho,locked_p,locked_q,valid"));
    assert_eq!(text.lines().count(), 13);
    // delta2 = 0.5 exceeds the injectivity threshold
    assert!(text.lines().skip(9).all(|l| l.ends_with(",0")));
    let bad = bin().args(["tongues", "--config"]).arg(&cfg).args(["--a2", "0:6", "--d2", "0:1:2", "--out"]).arg(d.path().join("x.csv")).output().unwrap().status;
    assert_eq!(bad.code(), Some(2));
}

#[test]
fn limit_and_misiurewicz() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"params": {"eps1": 0.1, "eps2": 0.0, "alpha1": 0.0, "alpha2": 0.0, "delta": 2.0, "delta1": 5.0, "delta2": 0.0, "b": 0.5}}"#,
    );
    let out = d.path().join("lim.csv");
    let st = bin().args(["limit", "--config"]).arg(&cfg).args(["--a", "1", "--nmax", "4", "--grid", "64", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,eps,c0_sup,c1_sup"));
    let c0: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(c0.len(), 4);
    assert!(c0.windows(2).all(|w| w[1] < w[0]));

    let big = write(
        d.path(),
        "big.json",
        r#"{"params": {"eps1": 0.1, "eps2": 0.0, "alpha1": 0.0, "alpha2": 0.0, "delta": 2.0, "delta1": 100.0, "delta2": 0.0, "b": 0.5}}"#,
    );
    let out = d.path().join("m.json");
    let st = bin().args(["misiurewicz", "--config"]).arg(&big).args(["--a", "0", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["non_rigorous"], true);
    assert_eq!(v["transitions"]["mixing_power"], 1);
    assert_eq!(v["turns"].as_array().unwrap().len(), 2);
}

#[test]
fn manifolds_command() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", &params_json(0.105, 0.0));
    let out = d.path().join("m.csv");
    let st = bin().args(["manifolds", "--config"]).arg(&cfg).args(["--period-max", "2", "--arc", "10", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("kind,index,x,y,angle\nsaddle,"));
    assert!(text.lines().any(|l| l.starts_with("crossing,")));
}

#[test]
fn figure_rows_match_window() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("f.csv");
    let ppm = d.path().join("f.ppm");
    let st = bin().args(["figure", "--name", "fig5", "--out"]).arg(&out).arg("--ppm").arg(&ppm).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 20_000);
    assert!(text.lines().nth(1).unwrap().starts_with("1001,"));
    assert!(text.lines().last().unwrap().starts_with("21000,"));
    assert!(fs::read(ppm).unwrap().starts_with(b"P6\n800 800\n255\n"));
    assert_eq!(bin().args(["figure", "--name", "fig9", "--out"]).arg(&out).output().unwrap().status.code(), Some(2));
}

#[test]
fn sweep_command_resumes_and_rejects_other_specs() {
    let d = tempfile::tempdir().unwrap();
    let spec = |budget: u32| {
        format!(
            r#"{{"quantity": "rho", "p1": {{"param": "alpha2", "lo": 0.0, "hi": 6.0, "n": 6}}, "p2": {{"param": "delta2", "lo": 0.0, "hi": 0.3, "n": 4}},
               "params": {{"eps1": 0.1, "eps2": 0.0, "alpha1": 0.0, "alpha2": 0.0, "delta": 2.0, "delta1": 5.0, "delta2": 0.0, "b": 0.5}},
               "budget": {budget}, "chunk_size": 5}}"#
        )
    };
    let s1 = write(d.path(), "s1.json", &spec(500));
    let s2 = write(d.path(), "s2.json", &spec(600));
    let ck = d.path().join("ck");
    let go = |s: &Path, workers: &str, out: &str| {
        bin().args(["sweep", "--spec"]).arg(s).arg("--checkpoint").arg(&ck).args(["--workers", workers, "--out"]).arg(d.path().join(out)).output().unwrap().status.code()
    };
    assert_eq!(go(&s1, "1", "a.csv"), Some(0));
    assert_eq!(go(&s1, "4", "b.csv"), Some(0));
    assert_eq!(fs::read(d.path().join("a.csv")).unwrap(), fs::read(d.path().join("b.csv")).unwrap());
    assert_eq!(go(&s2, "2", "c.csv"), Some(2));
    let bad = write(d.path(), "bad.json", &spec(500).replace("\"delta2\", \"lo\"", "\"alpha2\", \"lo\""));
    assert_eq!(go(&bad, "1", "d.csv"), Some(2));
}
