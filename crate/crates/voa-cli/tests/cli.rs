//! End-to-end tests of the `voa` binary: command output, exit codes, JSON
//! schema, and the relation cache.

use std::process::Command;

fn voa(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_voa"))
        .args(args)
        .output()
        .expect("failed to run voa")
}

fn stdout(args: &[&str]) -> String {
    let out = voa(args);
    assert!(
        out.status.success(),
        "voa {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn remainder_command() {
    assert_eq!(
        stdout(&[
            "remainder", "--family", "sp", "--n", "1", "--indices", "0,1,2,3", "--method",
            "closed"
        ])
        .trim(),
        "1/6"
    );
    assert_eq!(
        stdout(&[
            "remainder", "--family", "sp", "--n", "1", "--indices", "0,1,2,3", "--method",
            "recursive"
        ])
        .trim(),
        "1/6"
    );
    assert_eq!(
        stdout(&["remainder", "--family", "o", "--n", "1", "--I", "0,0", "--J", "1,1"]).trim(),
        "7/3"
    );
}

#[test]
fn verify_appendix_command() {
    let out = stdout(&["verify-appendix"]);
    assert_eq!(out.trim(), "kernel_ok=true remainder=109/56000");
}

#[test]
fn relation_json_schema() {
    let out = stdout(&[
        "relation", "--family", "o", "--n", "1", "--I", "0,0", "--J", "1,1", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["family"], "o(1)");
    assert_eq!(doc["weight"], 4);
    assert_eq!(doc["kernel_ok"], true);
    assert_eq!(doc["remainder"], "7/3");
    assert!(doc["by_degree"]["2"].is_array());
}

#[test]
fn products_and_expressions() {
    // the conformal vector acts on beta as a primary of weight 1/2
    let l = "1/2 * :b1[0] g1[1]: - 1/2 * :b1[1] g1[0]:";
    let out = stdout(&["circle", "--nth", "1", "--a", l, "--b", "b1[0]"]);
    assert_eq!(out.trim(), "1/2 * :b1[0]:");
    let out = stdout(&["circle", "--nth", "0", "--a", l, "--b", "b1[0]"]);
    assert_eq!(out.trim(), ":b1[1]:");
    // ope table of two betas is empty
    let out = stdout(&["ope", "--a", "b1[0]", "--b", "b1[0]"]);
    assert_eq!(out.trim(), "regular (no poles)");
    // wick against the vacuum is the identity
    let out = stdout(&["wick", "--a", ":b1[0] g1[0]:", "--b", "1"]);
    assert_eq!(out.trim(), ":b1[0] g1[0]:");
    // realize the first generator in the orthogonal family
    let out = stdout(&["realize", "--family", "o", "--n", "1", "--expr", "W1[0]"]);
    assert_eq!(out.trim(), "1/2 * :f[0] f[1]:");
}

#[test]
fn exit_codes() {
    // usage errors: 2
    assert_eq!(voa(&["remainder", "--family", "sp"]).status.code(), Some(2));
    assert_eq!(voa(&["unknown-command"]).status.code(), Some(2));
    assert_eq!(
        voa(&["circle", "--nth", "0", "--a", "not an expr", "--b", "b1[0]"])
            .status
            .code(),
        Some(2)
    );
    // weight guard
    let out = voa(&[
        "relation", "--family", "sp", "--n", "1", "--indices", "10,11,12,13", "--max-weight",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // negative indices are rejected, not wrapped
    assert_eq!(
        voa(&["remainder", "--family", "sp", "--n", "1", "--indices", "-1,2,3,4"])
            .status
            .code(),
        Some(2)
    );
    // success: 0
    assert_eq!(voa(&["help"]).status.code(), Some(0));
}

#[test]
fn relation_cache_roundtrip() {
    let dir = std::env::temp_dir().join(format!("voa-cache-{}", std::process::id()));
    let dir_s = dir.to_str().unwrap();
    let args = [
        "relation", "--family", "sp", "--n", "1", "--indices", "0,1,2,3", "--format", "json",
        "--cache-dir", dir_s,
    ];
    let first = stdout(&args);
    let cached = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(cached, 1, "expected one cached relation document");
    // second run reuses the document and prints the same output
    let second = stdout(&args);
    assert_eq!(first, second);
    // decouple can start from the cached minimal relation
    let out = stdout(&[
        "decouple", "--family", "sp", "--n", "1", "--cache-dir", dir_s,
    ]);
    assert!(out.contains("w7 = "));
    assert!(out.contains("verified = true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decouple_chain_text() {
    let out = stdout(&["decouple", "--family", "o", "--n", "1", "--up-to", "7"]);
    assert!(out.contains("w3 = "));
    assert!(out.contains("w5 = "));
    assert!(out.contains("w7 = "));
    assert!(out.contains("verified = true"));
}

#[test]
fn selftest_runs_clean() {
    let out = stdout(&["selftest", "--threads", "2"]);
    assert!(out.contains("0 failed"), "selftest output:\n{out}");
}
