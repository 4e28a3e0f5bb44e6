use std::io::Write;
use std::process::{Command, Output, Stdio};

fn dgff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgff")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn kernel_values() {
    let o = dgff(&["kernel", "--z", "1", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4/pi");
    assert_eq!(stdout(&dgff(&["kernel", "--z", "2", "0"])).trim(), "4 - 8/pi");
    assert_eq!(stdout(&dgff(&["kernel", "--z", "-3/2", "0"])).trim(), "-3/2 + 4/pi");
    assert_eq!(stdout(&dgff(&["kernel", "--z", "1/2", "1/2"])).trim(), "0");
    let bad = dgff(&["kernel", "--z", "1/3", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    let bad = dgff(&["kernel", "--z", "1/4", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

/// Counterclockwise nodes of the box with corners `lo`, `hi` (odd quarter units).
fn box_contour(lo: (i64, i64), hi: (i64, i64)) -> String {
    let mut nodes = Vec::new();
    let mut x = lo.0;
    while x < hi.0 {
        nodes.push((x, lo.1));
        x += 2;
    }
    let mut y = lo.1;
    while y < hi.1 {
        nodes.push((hi.0, y));
        y += 2;
    }
    while x > lo.0 {
        nodes.push((x, hi.1));
        x -= 2;
    }
    while y > lo.1 {
        nodes.push((lo.0, y));
        y -= 2;
    }
    let items: Vec<String> = nodes.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
    format!("[{}]", items.join(","))
}

#[test]
fn residue_command() {
    let o = dgff(&["residue", "--m", "0", "--n", "-1", "--r", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\nPASS\n");
    let o = dgff(&["residue", "--m", "-3", "--n", "-3"]);
    assert_eq!(stdout(&o), "0\nPASS\n");
    // too small a contour is an error, not a pass
    let o = dgff(&["residue", "--m", "-4", "--n", "3", "--r", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, box_contour((-7, -5), (5, 9))).unwrap();
    let o = dgff(&["residue", "--m", "1", "--n", "-2", "--contour", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "1\nPASS\n");
    std::fs::write(&path, "[[3,3],[-1,3]]").unwrap();
    assert_eq!(dgff(&["residue", "--m", "1", "--n", "-2", "--contour", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn monomial_csv() {
    let o = dgff(&["monomial", "--k", "2", "--window", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,class,re,im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.contains(&"1/2,1/2,Dual,0,1/2"));
    assert!(rows.contains(&"1,0,Vertex,1,0"));
    assert!(rows.contains(&"0,1,Vertex,-1,0"));
    let o = dgff(&["monomial", "--k", "-1", "--window", "1/2"]);
    assert!(stdout(&o).contains("1/2,0,MedialH,pi,0"));
}

#[test]
fn correlator_from_stdin_and_file() {
    let input = r#"{"geometry":"full_plane","fields":[[4,0],[4,0]]}"#;
    let mut child = Command::new(env!("CARGO_BIN_EXE_dgff"))
        .arg("correlator")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    std::fs::write(&path, r#"{"geometry":"half_plane","fields":[[0,4],[0,4]]}"#).unwrap();
    let o = dgff(&["--json-stdout", "correlator", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].is_array());
    assert!((v["approx"][0].as_f64().unwrap() - (4.0 - 8.0 / std::f64::consts::PI)).abs() < 1e-12);
    std::fs::write(&path, r#"{"geometry":"half_plane","fields":[[0,0]]}"#).unwrap();
    assert_eq!(dgff(&["correlator", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = dgff(&[
        "verify", "virasoro", "--max-index", "1", "--max-degree", "1", "--window", "1", "--json",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["suite"], "virasoro");
    assert_eq!(r["summary"]["failed"], 0);
    assert!(r["cases"].as_array().unwrap().iter().all(|c| c["kind"] == "exact" && c["residual"] == serde_json::json!([])));
    for suite in ["heisenberg", "mixed", "halfplane"] {
        let o = dgff(&["verify", suite, "--max-index", "1", "--max-degree", "1", "--window", "1", "--growth", "1"]);
        assert!(o.status.success(), "{suite}");
    }
    let o = dgff(&["verify", "coulomb", "--b", "1/3", "--max-index", "1", "--max-degree", "1", "--window", "1", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["parameters"]["central_charge"], "-1/3");
    assert_eq!(dgff(&["verify", "coulomb", "--b", "x"]).status.code(), Some(2));
    assert_ne!(dgff(&["verify", "bogus"]).status.code(), Some(0));
}

#[test]
fn oracle_command() {
    let o = dgff(&["--json-stdout", "oracle", "--z", "1", "1", "--mass", "1e-3", "--box", "200"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "numeric");
    assert!(v["error"].as_f64().unwrap() < 1e-4);
    assert_eq!(dgff(&["oracle", "--z", "1", "1", "--mass", "0"]).status.code(), Some(2));
    // a small box is far from the infinite-volume kernel
    assert_eq!(dgff(&["oracle", "--z", "2", "2", "--box", "10"]).status.code(), Some(1));
}

#[test]
fn cache_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.cache");
    let p = path.to_str().unwrap();
    assert!(dgff(&["cache", "save", p, "--radius", "12"]).status.success());
    let o = dgff(&["cache", "check", p]);
    assert!(stdout(&o).starts_with("ok: radius 12"));
    let o = dgff(&["--kernel-cache", p, "kernel", "--z", "3", "3"]);
    assert_eq!(stdout(&o).trim(), "92/(15*pi)");
    let o = dgff(&["--kernel-cache", p, "kernel", "--z", "20", "0"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert_eq!(dgff(&["cache", "check", p]).status.code(), Some(2));
    assert_eq!(dgff(&["--kernel-cache", p, "kernel", "--z", "1", "1"]).status.code(), Some(2));
    std::fs::write(&path, text.replacen("v1", "v0", 1)).unwrap();
    assert_eq!(dgff(&["cache", "check", p]).status.code(), Some(2));
}
