use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sc_forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sc-forge"))
        .args(args)
        .env("SC_FORGE_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_sc_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.pres", "alphabet: a b c d\naba'b'cdc'd'\n");
    let out = sc_forge(&["check-sc", &good, "--lambda", "1/6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], true);
    assert_eq!(r["certificate"], "exact finite check");
    assert_eq!(r["config"]["command"]["lambda"], "1/6");
    assert_eq!(r["perRelator"][0]["maxPiece"], 1);

    let bad = write(dir.path(), "bad.pres", "alphabet: a b\nabab'\nabab\n");
    let out = sc_forge(&["check-sc", &bad, "--lambda", "1/6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!report(&out)["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_inputs_exit_2_with_position() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.pres", "alphabet: a b\nab\nabx\n");
    let out = sc_forge(&["pieces", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 3"), "{err}");

    assert_eq!(sc_forge(&["pieces", &bad, "--no-such-flag"]).status.code(), Some(2));
    let graph = write(dir.path(), "g.txt", "0 1\n1 two\n");
    let out = sc_forge(&["delta", &graph]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 3"));
}

#[test]
fn word_problem_with_oracle() {
    let out = sc_forge(&["wp", "builtin:surface2", "--word", "aba'b'cdc'd'", "--oracle", "--radius", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["trivial"], true);
    assert_eq!(r["reduced"], "");
    assert_eq!(r["agree"], true);
    assert_eq!(r["oracle"]["verdict"], "identity");
}

#[test]
fn rho_on_a_periodic_path() {
    let out = sc_forge(&["rho", "builtin:surface2", "--path", "periodic:a", "--tmax", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    // the only relator has length 8 and shares one letter with a^k
    assert_eq!(r["rho"][6], 0);
    assert_eq!(r["rho"][7], 1);
    assert_eq!(r["rho"][127], 1);
    assert_eq!(r["sublinearity"]["certificate"], "finite-scale probe");
    assert_eq!(r["sublinearity"]["consistentWithSublinear"], true);
}

#[test]
fn ipsc_commands_read_json() {
    let dir = TempDir::new().unwrap();
    let pres = write(dir.path(), "p.pres", "alphabet: a b c\nabcab'c'\n");
    let wit = write(dir.path(), "w.json", r#"{"r": "abcab'c'", "x": "abc", "i": 3, "nI": 4, "f": "const:6"}"#);
    let out = sc_forge(&["ipsc-witness", &pres, &wit]);
    let r = report(&out);
    assert_eq!(r["certificate"], "finite certificate");
    assert_eq!(r["length"], true);
    assert_eq!(r["proportion"], true);
    assert_eq!(out.status.code(), Some(if r["pair"] == true { 0 } else { 1 }));

    let dec = write(
        dir.path(),
        "d.json",
        r#"{"rPrime": "abcab'c'bb", "N": 1, "B": 2, "rho": "const:2", "parts": [{"u": "abcab'c'", "r": "abcab'c'", "v": "bb"}]}"#,
    );
    let out = sc_forge(&["ipsc-decomp", &pres, &dec]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let np = write(dir.path(), "n.json", r#"{"rho": "sqrt", "N": 1, "B": 1, "n": [1,1,1,1,1,1,1,1,1], "count": 3}"#);
    let out = sc_forge(&["ipsc-nprime", &np]);
    assert_eq!(out.status.code(), Some(0));
    // least T with ceil(sqrt t) < t/(3i) on all of [T, 10000]
    let scan: Vec<u64> = (1..=3u64)
        .map(|i| {
            let ok = |t: u64| (t as f64).sqrt().ceil() as u64 * 3 * i < t;
            (1..=10_000u64).rev().find(|&t| !ok(t)).unwrap() + 1
        })
        .collect();
    assert_eq!(report(&out)["nPrime"], serde_json::json!(scan));

    let broken = write(dir.path(), "x.json", "{\n  \"rho\": sqrt\n}");
    let out = sc_forge(&["ipsc-nprime", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn delta_and_subsegment_on_a_path() {
    let dir = TempDir::new().unwrap();
    let edges: String = (0..150).map(|i| format!("{i} {}\n", i + 1)).collect();
    let graph = write(dir.path(), "path.txt", &edges);
    let walk: Vec<String> = (0..=150).chain((1..150).rev()).map(|v| v.to_string()).collect();
    let cycle = write(dir.path(), "cycle.txt", &walk.join(" "));
    let out = sc_forge(&["delta", &graph]);
    assert_eq!(report(&out)["delta"], "0");
    let out = sc_forge(&["subsegment", &graph, &cycle, "--u", "2", "--g", "sqrt", "--oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["witness"]["valid"], true);
    assert!(r["oracle"].is_object());

    let short: Vec<String> = (0..=20).chain((1..20).rev()).map(|v| v.to_string()).collect();
    let short = write(dir.path(), "short.txt", &short.join(" "));
    let out = sc_forge(&["subsegment", &graph, &short, "--u", "1", "--g", "sqrt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("257"));
}

#[test]
fn construct_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let pres = dir.path().join(format!("{tag}.pres"));
        let rep = dir.path().join(format!("{tag}.json"));
        let out = sc_forge(&[
            "construct",
            "builtin:blocks",
            "--params",
            "N=36,M=36,U=36,L=1152,V=390",
            "--f",
            "sqrt",
            "--max-base-len",
            "400",
            "-o",
            pres.to_str().unwrap(),
            "--report",
            rep.to_str().unwrap(),
        ]);
        let code = out.status.code();
        (code, std::fs::read(pres).unwrap(), std::fs::read_to_string(rep).unwrap())
    };
    let (c1, p1, r1) = run("one");
    let (c2, p2, r2) = run("two");
    assert_eq!(c1, c2);
    assert_eq!(p1, p2);
    let strip = |s: &str| s.replace("two.", "one.");
    assert_eq!(strip(&r1), strip(&r2));

    let text = String::from_utf8(p1).unwrap();
    let parsed = sc_forge::text::parse_presentation(&text).unwrap();
    assert_eq!(sc_forge::text::serialize_presentation(&parsed), text);
    let rep: Value = serde_json::from_str(&r1).unwrap();
    assert_eq!(rep["construction"]["schema"], "sc-forge/construction-report/v1");
    assert_eq!(rep["construction"]["params"]["V"], 390);
    assert_eq!(rep["construction"]["decomposition"]["pass"], true);
    let generic = rep["construction"]["smallCancellation"]["generic"].as_bool().unwrap();
    let recheck = sc_forge(&["check-sc", dir.path().join("one.pres").to_str().unwrap(), "--lambda", "1/9"]);
    assert_eq!(recheck.status.code(), Some(if generic { 0 } else { 1 }));
}
