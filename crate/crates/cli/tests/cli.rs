use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;

use banach_cli::emit::{read_csv, to_json, write_csv};
use banach_cli::record::RunRecord;
use tempfile::TempDir;

fn banach(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_banach"))
        .args(args)
        .env("BANACH_DATA_DIR", data)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(o: &Output) -> RunRecord {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

fn value(o: &Output) -> (f64, f64) {
    let e = record(o).estimate().cloned().expect("estimate record");
    (e.value, e.error_bound)
}

#[test]
fn compute_examples() {
    let d = TempDir::new().unwrap();
    let o = banach(d.path(), &["compute", "--space", "euclid:2", "--constant", "T2", "--kappa", "1", "--tau", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2.23607 ± "), "{}", stdout(&o));

    let o = banach(d.path(), &["compute", "--space", "lp:1:2", "--constant", "T2", "--kappa", "2", "--tau", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let (v, eb) = value(&o);
    assert!((v - 5.0).abs() <= eb, "{v} ± {eb}");

    let o = banach(d.path(), &["compute", "--space", "lp:1:2", "--constant", "delta", "--eps", "1.0", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let (v, eb) = value(&o);
    assert!(v.abs() <= eb, "{v} ± {eb}");
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let run = |args: &[&str]| code(&banach(d.path(), args));
    assert_eq!(run(&["compute", "--space", "nowhere:2", "--constant", "T"]), 2);
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "T9"]), 2);
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "T2", "--kappa", "1"]), 2);
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "T2", "--kappa", "-1", "--tau", "1"]), 2);
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "delta", "--eps", "2.5"]), 2);
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "T", "--grid", "4"]), 2);
    assert_eq!(run(&["verify", "--space", "euclid:2", "--theorem", "nope"]), 2);
    assert_eq!(run(&["sweep", "--space", "euclid:2", "--constant", "delta", "--eps", "2:0"]), 2);
    assert_eq!(run(&["sweep", "--space", "euclid:2", "--constant", "delta", "--eps", "0:1", "--step", "0"]), 2);
    // an unreachable tolerance is a search failure
    assert_eq!(run(&["compute", "--space", "euclid:2", "--constant", "T", "--grid", "64", "--tol", "1e-30"]), 3);

    assert_eq!(run(&["verify", "--space", "euclid:2", "--theorem", "t1-bounds", "--kappa", "1", "--tau", "1"]), 0);
    assert_eq!(run(&["verify", "--space", "lp:1:2", "--theorem", "uns"]), 1);
    assert_eq!(run(&["verify", "--space", "lp:4:2", "--theorem", "uns", "--grid", "512"]), 0);
    // at κ = τ the normal-structure threshold is an equality the estimate
    // cannot beat strictly
    assert_eq!(run(&["verify", "--space", "lp:1:2", "--theorem", "normal-structure", "--kappa", "1", "--tau", "1", "--grid", "512"]), 1);
}

#[test]
fn uns_reports_not_uns_on_l1() {
    let d = TempDir::new().unwrap();
    let o = banach(d.path(), &["verify", "--space", "lp:1:2", "--theorem", "uns"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"]["verification"]["verdict"], "NOT_UNS");
    assert_eq!(v["theorem_id"], "uns");
}

#[test]
fn day_james_t2_bounds_carries_the_conflict_note() {
    let d = TempDir::new().unwrap();
    let o = banach(d.path(), &["verify", "--space", "dayjames", "--theorem", "t2-bounds", "--kappa", "2", "--tau", "3"]);
    // the measured value sits inside kappa + tau, so the upper bound holds
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let r = &v["outcome"]["verification"];
    assert_eq!(r["verdict"], "SATISFIED");
    let notes = r["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("published closed form gives 15")), "{notes:?}");
    assert!((r["mid"].as_f64().unwrap() - (361.0f64 / 24.0).sqrt()).abs() <= 1e-9);
}

#[test]
fn witness_examples() {
    let d = TempDir::new().unwrap();
    let dump = |args: &[&str]| -> serde_json::Value {
        let o = banach(d.path(), args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str(stdout(&o).trim()).unwrap()
    };
    let coords = |v: &serde_json::Value| -> Vec<f64> { v.as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect() };

    let w = dump(&["witness", "--space", "lp:1:2", "--constant", "T2", "--kappa", "2", "--tau", "3", "--format", "json"]);
    assert!((w["recheck"].as_f64().unwrap() - 5.0).abs() <= 1e-9);
    let e = &w["record"]["outcome"]["estimate"];
    let (x, y) = (coords(&e["witness"][0]), coords(&e["witness"][1]));
    // (±e₁, ±e₂) up to the symmetries of the ℓ₁ ball
    assert!((x[0].abs() - 1.0).abs() <= 1e-9 && x[1].abs() <= 1e-9, "{x:?}");
    assert!(y[0].abs() <= 1e-9 && (y[1].abs() - 1.0).abs() <= 1e-9, "{y:?}");

    let w = dump(&["witness", "--space", "euclid:2", "--constant", "T", "--format", "json"]);
    assert!((w["recheck"].as_f64().unwrap() - 2f64.sqrt()).abs() <= 1e-9);
    let e = &w["record"]["outcome"]["estimate"];
    let (x, y) = (coords(&e["witness"][0]), coords(&e["witness"][1]));
    assert!((x[0] * y[0] + x[1] * y[1]).abs() <= 1e-6, "{x:?} {y:?}");
    assert!((w["norm_x"].as_f64().unwrap() - 1.0).abs() <= 1e-12);

    let w = dump(&["witness", "--space", "euclid:2", "--constant", "delta", "--eps", "2", "--format", "json"]);
    let e = &w["record"]["outcome"]["estimate"];
    let eb = e["error_bound"].as_f64().unwrap();
    assert!((w["recheck"].as_f64().unwrap() - 1.0).abs() <= eb);
    let (x, y) = (coords(&e["witness"][0]), coords(&e["witness"][1]));
    assert!((x[0] + y[0]).hypot(x[1] + y[1]) <= 2.0 * eb, "{x:?} {y:?}");

    let o = banach(d.path(), &["witness", "--space", "euclid:2", "--constant", "T"]);
    assert!(stdout(&o).contains("recheck      1.4142135623730"), "{}", stdout(&o));
}

#[test]
fn cache_hit_returns_the_identical_record() {
    let d = TempDir::new().unwrap();
    let args = ["compute", "--space", "dayjames", "--constant", "CNJ", "--grid", "256", "--format", "json"];
    let first = banach(d.path(), &args);
    let second = banach(d.path(), &args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let log = d.path().join("runs.jsonl");
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 1);

    // a different config digest misses
    let third = banach(d.path(), &["compute", "--space", "dayjames", "--constant", "CNJ", "--grid", "256", "--seed", "9", "--format", "json"]);
    assert_ne!(record(&first).config_digest, record(&third).config_digest);
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 2);

    // --no-cache recomputes the same numbers without touching the log
    let mut fresh_args = args.to_vec();
    fresh_args.push("--no-cache");
    let fresh = banach(d.path(), &fresh_args);
    assert_eq!(record(&fresh).outcome, record(&first).outcome);
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 2);
}

#[test]
fn concurrent_writers_leave_a_parseable_log() {
    let d = TempDir::new().unwrap();
    let handles: Vec<_> = (0..6)
        .map(|seed| {
            let dir = d.path().to_path_buf();
            thread::spawn(move || {
                let seed = seed.to_string();
                banach(&dir, &["compute", "--space", "lp:3:2", "--constant", "J", "--grid", "64", "--seed", &seed])
            })
        })
        .collect();
    for h in handles {
        assert_eq!(code(&h.join().unwrap()), 0);
    }
    let text = fs::read_to_string(d.path().join("runs.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let _: RunRecord = serde_json::from_str(line).unwrap();
    }
}

#[test]
fn unwritable_output_exits_4() {
    let d = TempDir::new().unwrap();
    let bad = d.path().join("missing").join("out.csv");
    let o = banach(
        d.path(),
        &["sweep", "--space", "euclid:2", "--constant", "delta", "--eps", "0:2", "--out", bad.to_str().unwrap()],
    );
    assert_eq!(code(&o), 4);
    let o = banach(d.path(), &["compute", "--space", "euclid:2", "--constant", "T", "--out", d.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn csv_and_json_round_trip_byte_identical() {
    let d = TempDir::new().unwrap();
    let csv_path = d.path().join("t1.csv");
    let o = banach(
        d.path(),
        &["sweep", "--space", "lp:4:2", "--constant", "T1", "--kappa", "1", "--tau", "0.5:2", "--step", "0.25", "--grid", "512", "--out", csv_path.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().next(), Some("kappa,tau,eps,value,error_bound,wx1,wy1,wx2,wy2"));
    assert_eq!(write_csv(&read_csv(&text).unwrap()).unwrap(), text);

    let json_path = d.path().join("t1.jsonl");
    let o = banach(
        d.path(),
        &["sweep", "--space", "lp:4:2", "--constant", "T1", "--kappa", "1", "--tau", "0.5:2", "--step", "0.25", "--grid", "512", "--format", "json", "--out", json_path.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&json_path).unwrap();
    let mut again = String::new();
    for line in text.lines() {
        let r: RunRecord = serde_json::from_str(line).unwrap();
        again.push_str(&to_json(&r).unwrap());
        again.push('\n');
    }
    assert_eq!(again, text);

    // verification records round trip too, including infinite bounds as null
    let o = banach(d.path(), &["verify", "--space", "dayjames", "--theorem", "t2-delta", "--kappa", "1", "--tau", "2", "--eps", "1", "--grid", "256"]);
    let line = stdout(&o);
    let r: RunRecord = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(to_json(&r).unwrap(), line.trim());
    let o = banach(d.path(), &["compute", "--space", "lp:3:3", "--constant", "T", "--format", "json"]);
    let line = stdout(&o);
    assert!(line.contains("\"error_bound\":null"));
    let r: RunRecord = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(to_json(&r).unwrap(), line.trim());
}

fn sweep_rows(d: &Path, args: &[&str]) -> Vec<banach_cli::emit::CsvRow> {
    let mut full = vec!["sweep"];
    full.extend_from_slice(args);
    let o = banach(d, &full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    read_csv(&stdout(&o)).unwrap()
}

#[test]
fn sweep_hilbert_t2_surface() {
    let d = TempDir::new().unwrap();
    let rows = sweep_rows(d.path(), &["--space", "euclid:2", "--constant", "T2", "--kappa", "1:3", "--tau", "1:3", "--step", "0.5"]);
    assert_eq!(rows.len(), 25);
    for r in rows {
        let (k, t) = (r.kappa.unwrap(), r.tau.unwrap());
        assert!((r.value - k.hypot(t)).abs() <= r.error_bound, "{r:?}");
        assert!(r.eps.is_none());
    }
}

#[test]
fn sweep_lp4_t1_matches_closed_form() {
    let d = TempDir::new().unwrap();
    let rows = sweep_rows(d.path(), &["--space", "lp:4:2", "--constant", "T1", "--kappa", "1", "--tau", "0.5:2", "--step", "0.25"]);
    let taus: Vec<f64> = rows.iter().map(|r| r.tau.unwrap()).collect();
    assert_eq!(taus, vec![0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
    for r in rows {
        let (k, t) = (r.kappa.unwrap(), r.tau.unwrap());
        let exact = 2f64.powf(-0.25) * ((k + t).powi(4) + (k - t).powi(4)).powf(0.25);
        assert!((r.value - exact).abs() <= r.error_bound, "{r:?} vs {exact}");
    }
}

#[test]
fn sweep_delta_is_non_decreasing() {
    let d = TempDir::new().unwrap();
    let rows = sweep_rows(d.path(), &["--space", "euclid:2", "--constant", "delta", "--eps", "0:2", "--step", "0.25"]);
    assert_eq!(rows.len(), 9);
    for w in rows.windows(2) {
        assert!(w[1].value >= w[0].value - w[0].error_bound - w[1].error_bound, "{w:?}");
    }
    // Hilbert space closed form 1 − √(1 − ε²/4)
    for r in &rows {
        let e = r.eps.unwrap();
        assert!((r.value - (1.0 - (1.0 - e * e / 4.0).sqrt())).abs() <= r.error_bound + 1e-12, "{r:?}");
    }
}

#[test]
fn config_file_and_poly_spaces() {
    let d = TempDir::new().unwrap();
    let toml_path = d.path().join("search.toml");
    fs::write(&toml_path, "coarse_grid = 128\nseed = 5\n").unwrap();
    let o = banach(d.path(), &["compute", "--space", "euclid:2", "--constant", "J", "--config", toml_path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!((r.config.coarse_grid, r.config.seed), (128, 5));

    let json_path = d.path().join("search.json");
    fs::write(&json_path, r#"{"coarse_grid": 128, "seed": 5}"#).unwrap();
    let o = banach(d.path(), &["compute", "--space", "euclid:2", "--constant", "J", "--config", json_path.to_str().unwrap(), "--grid", "96", "--format", "json"]);
    assert_eq!(record(&o).config.coarse_grid, 96);

    fs::write(&toml_path, "coarse_grd = 128\n").unwrap();
    let o = banach(d.path(), &["compute", "--space", "euclid:2", "--constant", "J", "--config", toml_path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let poly = d.path().join("square.txt");
    fs::write(&poly, "# l1 ball\n1 0\n0 1\n-1 0\n0 -1\n").unwrap();
    let id = format!("poly:{}", poly.display());
    let o = banach(d.path(), &["compute", "--space", &id, "--constant", "T2", "--kappa", "2", "--tau", "3", "--grid", "512", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = record(&o);
    assert_eq!(r.space_digest.as_deref().map(str::len), Some(64));
    let e = r.estimate().unwrap();
    assert!((e.value - 5.0).abs() <= e.error_bound);
}
