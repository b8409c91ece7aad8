use std::process::Command;

use k3stab::io;
use serde_json::Value;

const LAT: &str = r#"{"gram":[[2]],"epsilon":1}"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = k3stab::cli::run(std::iter::once("k3stab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn charge_example() {
    let (code, out, _) = run(&["charge", "--lattice", LAT, "--point", r#"{"beta":["0"],"omega":["2"]}"#, "--class", r#"{"r":1,"l":[0],"s":1}"#]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"heart_phase":null,"im":"0","re":"3"}"#);
    let v = json(&["charge", "--lattice", LAT, "--point", r#"{"beta":["-1/2"],"omega":["2"]}"#, "--class", r#"{"r":1,"l":[0],"s":-1}"#]);
    assert_eq!(v["im"], "2");
    assert!(v["heart_phase"]["cot_pi_phase"].is_string());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&["charge", "--help"]).0, 0);
    assert_eq!(run(&["nonsense"]).0, 2);
    let pt = r#"{"beta":["0"],"omega":["1"]}"#;
    assert_eq!(run(&["charge", "--lattice", LAT, "--point", pt, "--class", "{"]).0, 2);
    assert_eq!(run(&["charge", "--lattice", LAT, "--point", r#"{"beta":["1/0"],"omega":["1"]}"#, "--class", r#"{"r":1,"l":[0],"s":0}"#]).0, 2);
    assert_eq!(run(&["charge", "--lattice", "/no/such/file.json", "--point", pt, "--class", r#"{"r":1,"l":[0],"s":0}"#]).0, 2);
    assert_eq!(run(&["charge", "--lattice", r#"{"gram":[[-2]],"epsilon":1}"#, "--point", pt, "--class", r#"{"r":1,"l":[0],"s":0}"#]).0, 3);
    let (code, _, err) = run(&["jalpha", "--lattice", LAT, "--point", pt, "--class", r#"{"r":0,"l":[0],"s":0}"#]);
    assert_eq!(code, 3, "{err}");
    let (code, _, err) = run(&["largevolume", "--lattice", LAT, "--point", pt, "--class", r#"{"r":1,"l":[0],"s":-1}"#]);
    assert_eq!(code, 3);
    assert!(err.contains("omega.l"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_k3stab");
    let ok = Command::new(bin)
        .args(["charge", "--lattice", LAT, "--point", r#"{"beta":["0"],"omega":["2"]}"#, "--class", r#"{"r":1,"l":[0],"s":1}"#])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), r#"{"heart_phase":null,"im":"0","re":"3"}"#);
    assert_eq!(Command::new(bin).arg("walls").output().unwrap().status.code(), Some(2));
}

#[test]
fn outputs_read_back() {
    let classes = json(&["enumerate", "--lattice", LAT, "--point", r#"{"beta":["1/2"],"omega":["1"]}"#, "--class", r#"{"r":1,"l":[0],"s":0}"#, "--budget", "5"]);
    let back = io::classes_to_json(&classes.as_array().unwrap().iter().map(|c| io::class_from_json(&c.to_string()).unwrap()).collect::<Vec<_>>());
    assert_eq!(back, classes);

    let walls = json(&["walls", "--lattice", LAT, "--class", r#"{"r":0,"l":[1],"s":0}"#, "--region", "1/8,1/4,1,2"]);
    assert_eq!(walls.as_array().unwrap().len(), 3);
    assert_eq!(io::wall_polys_from_json(&walls.to_string()).unwrap().len(), 3);

    let rep = json(&["jalpha", "--lattice", LAT, "--point", r#"{"beta":["1/2"],"omega":["2"]}"#, "--class", r#"{"r":1,"l":[0],"s":-1}"#, "--provenance"]);
    assert_eq!(rep["j"], "(q - 1)*I[1,0,-1]");
    assert_eq!(rep["decompositions"], 1);
    let table = r#"{"entries":[{"class":{"r":1,"l":[0],"s":-1},"value":"3"}]}"#;
    let rep = json(&["jalpha", "--lattice", LAT, "--point", r#"{"beta":["1/2"],"omega":["2"]}"#, "--class", r#"{"r":1,"l":[0],"s":-1}"#, "--itable", table]);
    assert_eq!(rep["j"], "(3*q - 3)");
}

#[test]
fn empty_walls_and_blank_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("w.svg");
    let walls = json(&["walls", "--lattice", LAT, "--class", r#"{"r":0,"l":[0],"s":1}"#, "--region", "0,1/4,5,6", "--svg", svg.to_str().unwrap(), "--grid", "20"]);
    assert_eq!(walls, Value::Array(vec![]));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && !text.contains("data-wall"));
}

#[test]
fn svg_marks_sign_changes() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("w.svg");
    let walls = json(&["walls", "--lattice", LAT, "--class", r#"{"r":0,"l":[1],"s":0}"#, "--region", "1/8,1/4,1,2", "--svg", svg.to_str().unwrap(), "--grid", "40"]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("data-wall=").count(), walls.as_array().unwrap().len());
    let polys: Vec<_> = io::wall_polys_from_json(&walls.to_string()).unwrap().into_iter().map(|(_, _, p)| p).collect();
    let region = k3stab::walls::SliceRegion::new(
        &k3stab::lattice::NsLattice::rank_one(2, 1).unwrap(),
        k3stab::lattice::RationalDivisor::from_ints(&[1]),
        k3stab::lattice::RationalDivisor::from_ints(&[1]),
        (k3stab::arith::q(1, 8), k3stab::arith::q(1, 4)),
        (k3stab::arith::qi(1), k3stab::arith::qi(2)),
    )
    .unwrap();
    for p in &polys {
        let cells = k3stab::svg::marked_cells(p, &region, 40);
        assert!(!cells.is_empty());
        for (i, j) in cells {
            let w = &region.b1 - &region.b0;
            let h = &region.t1 - &region.t0;
            let n = k3stab::arith::qi(40);
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].map(|(a, b)| {
                let bb = &region.b0 + &w * k3stab::arith::qi(a as i64) / &n;
                let tt = &region.t0 + &h * k3stab::arith::qi(b as i64) / &n;
                num_traits::Signed::signum(&p.eval(&bb, &tt))
            });
            assert!(corners.iter().any(|s| *s != corners[0]) || corners[0] == k3stab::arith::qi(0));
        }
    }
}

#[test]
fn seeded_tables_are_reproducible() {
    let args = ["jalpha", "--lattice", LAT, "--point", r#"{"beta":["0"],"omega":["1/2"]}"#, "--class", r#"{"r":2,"l":[0],"s":-2}"#, "--seed", "42"];
    let a = json(&args);
    assert_eq!(a, json(&args));
    assert!(!a["j"].as_str().unwrap().contains('I'));
}
