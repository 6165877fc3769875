//! End-to-end checks of the command-line interface: line-oriented output,
//! 1-based positions, and the documented exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synidx"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn synidx");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn build_query_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("fig.txt");
    let index = dir.path().join("fig.idx");
    std::fs::write(&text, b"abaababababaababa").unwrap();

    let (code, out, err) = run(&[
        "build",
        text.to_str().unwrap(),
        "-o",
        index.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.contains("built n=18"), "{out}");

    let idx = index.to_str().unwrap();
    let (code, out, _) = run(&["sa", idx, "7"]);
    assert_eq!((code, out.trim()), (0, "1"));
    let (code, out, _) = run(&["isa", idx, "18"]);
    assert_eq!((code, out.trim()), (0, "1"));
    let (code, out, _) = run(&["range", idx, "aba"]);
    assert_eq!((code, out.trim()), (0, "4 11"));
    let (code, out, _) = run(&["count", idx, "aba"]);
    assert_eq!((code, out.trim()), (0, "7"));
    let (code, out, _) = run(&["locate", idx, "aba"]);
    let mut got: Vec<usize> = out.split_whitespace().map(|x| x.parse().unwrap()).collect();
    got.sort_unstable();
    assert_eq!((code, got), (0, vec![1, 4, 6, 8, 10, 13, 15]));

    // suffix tree verbs, node handles as b:e
    let (code, out, _) = run(&["st", idx, "root"]);
    assert_eq!((code, out.trim()), (0, "0:18"));
    let (code, out, _) = run(&["st", idx, "child", "0:18", "a"]);
    assert_eq!((code, out.trim()), (0, "1:11"));
    let (code, out, _) = run(&["st", idx, "sdepth", "4:11"]);
    assert_eq!((code, out.trim()), (0, "3"));
    let (code, out, _) = run(&["st", idx, "parent", "4:11"]);
    assert_eq!((code, out.trim()), (0, "1:11"));
    let (code, out, _) = run(&["st", idx, "wlink", "11:18", "a"]);
    assert_eq!((code, out.trim()), (0, "4:11"));
    let (code, out, _) = run(&["st", idx, "isancestor", "1:11", "4:11"]);
    assert_eq!((code, out.trim()), (0, "1"));

    // patterns with bytes outside the text give empty results
    let (code, out, _) = run(&["count", idx, "axa"]);
    assert_eq!((code, out.trim()), (0, "0"));
    let (code, out, _) = run(&["locate", idx, "zzz"]);
    assert_eq!((code, out.trim()), (0, ""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage error
    let (code, _, _) = run(&["definitely-not-a-command"]);
    assert_eq!(code, 1);
    // io error: missing index file
    let missing = dir.path().join("missing.idx");
    let (code, _, err) = run(&["sa", missing.to_str().unwrap(), "1"]);
    assert_eq!(code, 2, "stderr: {err}");
    // corrupt index file
    let text = dir.path().join("t.txt");
    let index = dir.path().join("t.idx");
    std::fs::write(&text, b"bananas and ananas").unwrap();
    let (code, _, _) = run(&[
        "build",
        text.to_str().unwrap(),
        "-o",
        index.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut bytes = std::fs::read(&index).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    std::fs::write(&index, &bytes).unwrap();
    let (code, _, err) = run(&["count", index.to_str().unwrap(), "ana"]);
    assert_eq!(code, 2, "stderr: {err}");
    // out-of-range query argument
    std::fs::write(&text, b"bananas").unwrap();
    let (code, _, _) = run(&[
        "build",
        text.to_str().unwrap(),
        "-o",
        index.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["sa", index.to_str().unwrap(), "99"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_subcommand() {
    let (code, out, err) = run(&["verify", "--max-n", "200", "--seeds", "4"]);
    assert_eq!(code, 0, "stdout: {out} stderr: {err}");
    assert!(out.contains("verification passed"));
    // forced sampled mode with a larger window
    let (code, _, err) = run(&[
        "verify",
        "--max-n",
        "200",
        "--seeds",
        "3",
        "--tau",
        "3",
        "--force-full",
    ]);
    assert_eq!(code, 0, "stderr: {err}");
}

#[test]
fn deterministic_index_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    std::fs::write(&text, vec![b'a'; 700]).unwrap();
    let i1 = dir.path().join("a.idx");
    let i2 = dir.path().join("b.idx");
    for out in [&i1, &i2] {
        let (code, _, _) = run(&[
            "build",
            text.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
            "--tau",
            "3",
            "--force-full",
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&i1).unwrap(), std::fs::read(&i2).unwrap());
}
