use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn nswiener(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nswiener"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn scalar_file(lo: i64, hi: i64, diagonals: &[(i64, &dyn Fn(i64) -> f64)]) -> Value {
    let mut map = serde_json::Map::new();
    for (n, f) in diagonals {
        let blocks: Vec<Value> = (lo..=hi).map(|i| json!([[[f(i), 0.0]]])).collect();
        map.insert(n.to_string(), Value::Array(blocks));
    }
    json!({"block_size": 1, "window": [lo, hi], "diagonals": map})
}

fn put(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn entry(file: &Value, n: i64, col: i64) -> (f64, f64) {
    let lo = file["window"][0].as_i64().unwrap();
    let b = &file["diagonals"][n.to_string()][(col - lo) as usize][0][0];
    (b[0].as_f64().unwrap(), b[1].as_f64().unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stationary(dir: &TempDir) -> PathBuf {
    put(
        dir,
        "w.json",
        &scalar_file(-20, 20, &[(-1, &|_| 0.5), (0, &|_| 1.25), (1, &|_| 0.5)]),
    )
}

#[test]
fn canonical_files_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let src = put(
        &dir,
        "f.json",
        &scalar_file(
            -3,
            3,
            &[(0, &|i| 0.1 * i as f64), (2, &|i| 1.0 / 3.0 + i as f64)],
        ),
    );
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    // evaluation at z = 1 returns the operator unchanged
    assert_eq!(
        code(&nswiener(&["zadeh", s(&src), "--z", "1,0", s(&once)])),
        0
    );
    assert_eq!(
        code(&nswiener(&["zadeh", s(&once), "--z", "1,0", s(&twice)])),
        0
    );
    assert_eq!(fs::read(&once).unwrap(), fs::read(&twice).unwrap());
    assert_eq!(entry(&read(&twice), 2, 1), (1.0 / 3.0 + 1.0, 0.0));

    let adj = dir.path().join("adj.json");
    let back = dir.path().join("back.json");
    assert_eq!(code(&nswiener(&["adjoint", s(&src), s(&adj)])), 0);
    assert_eq!(code(&nswiener(&["adjoint", s(&adj), s(&back)])), 0);
    assert_eq!(entry(&read(&adj), -2, -1), (1.0 / 3.0 + 1.0, 0.0));
    assert_eq!(entry(&read(&back), 2, 1), (1.0 / 3.0 + 1.0, 0.0));
}

#[test]
fn multiply_shift_example() {
    let dir = TempDir::new().unwrap();
    let f = put(
        &dir,
        "f.json",
        &scalar_file(0, 2, &[(1, &|i| (i + 1) as f64)]),
    );
    let g = put(
        &dir,
        "g.json",
        &scalar_file(0, 2, &[(1, &|i| (i + 4) as f64)]),
    );
    let out = dir.path().join("fg.json");
    assert_eq!(code(&nswiener(&["multiply", s(&f), s(&g), s(&out)])), 0);
    let fg = read(&out);
    assert_eq!(entry(&fg, 2, 1), (5.0, 0.0));
    assert_eq!(entry(&fg, 2, 2), (12.0, 0.0));
    assert_eq!(fg["exact_interior"], json!([1, 2]));

    let id = put(&dir, "id.json", &scalar_file(0, 2, &[(0, &|_| 1.0)]));
    let out2 = dir.path().join("idg.json");
    let hull = put(&dir, "idhull.json", &scalar_file(-1, 2, &[(0, &|_| 1.0)]));
    assert_eq!(code(&nswiener(&["multiply", s(&hull), s(&g), s(&out2)])), 0);
    assert_eq!(entry(&read(&out2), 1, 2), (6.0, 0.0));

    let two = put(
        &dir,
        "two.json",
        &json!({"block_size": 2, "window": [0, 2], "diagonals": {"0": [
            [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
        ]}}),
    );
    assert_eq!(code(&nswiener(&["multiply", s(&id), s(&two), s(&out2)])), 3);
}

#[test]
fn malformed_files_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.json");
    let cases = [
        (
            json!({"block_size": 1, "window": [0, 1], "diagonals": {"x": [[[[1, 0]]], [[[1, 0]]]]}}),
            "x",
        ),
        (
            json!({"block_size": 1, "window": [0, 1], "diagonals": {"0": [[[[1, 0]]]]}}),
            "0",
        ),
        (json!({"block_size": 1, "window": [0, 1]}), "diagonals"),
        (
            json!({"block_size": 1, "window": [0, 1], "diagonals": {}, "colour": 1}),
            "colour",
        ),
    ];
    for (i, (doc, key)) in cases.iter().enumerate() {
        let p = put(&dir, &format!("bad{i}.json"), doc);
        let o = nswiener(&["adjoint", s(&p), s(&out)]);
        assert_eq!(code(&o), 2, "case {i}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(key), "case {i}: {err}");
    }
    let dup = dir.path().join("dup.json");
    fs::write(
        &dup,
        r#"{"block_size": 1, "window": [0, 0], "diagonals": {"1": [[[[1, 0]]]], "01": [[[[2, 0]]]]}}"#,
    )
    .unwrap();
    let o = nswiener(&["adjoint", s(&dup), s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("repeats"));
    fs::write(&dup, "{ not json").unwrap();
    assert_eq!(code(&nswiener(&["norm", s(&dup)])), 2);
    assert_eq!(code(&nswiener(&["frobnicate"])), 2);
}

#[test]
fn factor_stationary_identity_and_indefinite() {
    let dir = TempDir::new().unwrap();
    let w = stationary(&dir);
    let prefix = dir.path().join("st");
    let o = nswiener(&["factor", s(&w), s(&prefix), "--pad", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = read(&dir.path().join("st.factor.json"));
    for i in -10..=10 {
        let (u0, _) = entry(&f, 0, i);
        let (u1, _) = entry(&f, 1, i);
        assert!((u0 - 1.0).abs() <= 1e-6 && (u1 - 0.5).abs() <= 1e-6);
    }
    let report = read(&dir.path().join("st.report.json"));
    for key in [
        "reconstruction_residual",
        "inverse_residual",
        "min_eig_certificate",
        "stabilization_gap",
        "tail_mass",
    ] {
        assert!(report[key].is_number(), "{key}");
    }
    assert_eq!(report["verification"]["passed"], json!(true));
    assert!(dir.path().join("st.inverse.json").exists());

    let id = put(&dir, "id.json", &scalar_file(0, 7, &[(0, &|_| 1.0)]));
    let idp = dir.path().join("id");
    assert_eq!(code(&nswiener(&["factor", s(&id), s(&idp)])), 0);
    let f = read(&dir.path().join("id.factor.json"));
    assert_eq!(f["diagonals"].as_object().unwrap().len(), 1);
    assert_eq!(entry(&f, 0, 3), (1.0, 0.0));

    let ind = put(
        &dir,
        "ind.json",
        &scalar_file(-10, 10, &[(-1, &|_| 1.0), (1, &|_| 1.0)]),
    );
    let o = nswiener(&["factor", s(&ind), s(&dir.path().join("ind"))]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificate"));
}

#[test]
fn verify_passes_matching_pair_and_fails_perturbed() {
    let dir = TempDir::new().unwrap();
    let w = stationary(&dir);
    let prefix = dir.path().join("st");
    assert_eq!(
        code(&nswiener(&["factor", s(&w), s(&prefix), "--pad", "10"])),
        0
    );
    let factor = dir.path().join("st.factor.json");
    let o = nswiener(&["verify", s(&w), s(&factor), "--t-samples", "0,1.57,3.0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t_samples"], json!([0.0, 1.57, 3.0]));
    assert_eq!(v["boundary"].as_array().unwrap().len(), 3);
    assert_eq!(v["passed"], json!(true));

    let mut bad = read(&factor);
    let lo = bad["window"][0].as_i64().unwrap();
    let cell = &mut bad["diagonals"]["0"][(0 - lo) as usize][0][0][0];
    *cell = json!(cell.as_f64().unwrap() + 1e-3);
    let bad = put(&dir, "bad.json", &bad);
    let o = nswiener(&["verify", s(&w), s(&bad)]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], json!(false));
}

#[test]
fn norm_and_zadeh_commands() {
    let dir = TempDir::new().unwrap();
    let id = put(&dir, "id.json", &scalar_file(0, 5, &[(0, &|_| 1.0)]));
    let o = nswiener(&["norm", s(&id)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["wiener"], json!(1.0));

    let upper = put(
        &dir,
        "u.json",
        &scalar_file(0, 5, &[(0, &|_| 2.0), (1, &|_| 0.5)]),
    );
    let o = nswiener(&["zadeh", s(&upper), "--z", "0,0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let offsets: Vec<&String> = v["diagonals"].as_object().unwrap().keys().collect();
    assert_eq!(offsets, ["0"]);
    assert_eq!(entry(&v, 0, 2), (2.0, 0.0));

    let out = dir.path().join("half.json");
    assert_eq!(
        code(&nswiener(&["zadeh", s(&upper), "--z", "-0.5,0", s(&out)])),
        0
    );
    assert_eq!(entry(&read(&out), 1, 2), (-0.25, 0.0));

    let bilateral = put(
        &dir,
        "b.json",
        &scalar_file(0, 5, &[(-1, &|_| 1.0), (0, &|_| 2.0)]),
    );
    assert_eq!(
        code(&nswiener(&["zadeh", s(&bilateral), "--z", "0.5,0"])),
        6
    );
    assert_eq!(code(&nswiener(&["zadeh", s(&upper), "--z", "1.5,0"])), 6);
    assert_eq!(code(&nswiener(&["zadeh", s(&upper), "--z", "oops"])), 2);
}

#[test]
fn seed_environment_is_validated() {
    let dir = TempDir::new().unwrap();
    let id = put(&dir, "id.json", &scalar_file(0, 5, &[(0, &|_| 1.0)]));
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_nswiener"))
            .args(["norm", s(&id)])
            .env("NSWIENER_SEED", seed)
            .output()
            .unwrap()
    };
    let a = run("0x2a");
    let b = run("42");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run("forty-two")), 2);
}
