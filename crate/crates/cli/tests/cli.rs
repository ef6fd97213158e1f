use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsc"))
        .args(args)
        .output()
        .expect("dsc runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_decode_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let text =
        "the quick brown fox jumps over the lazy dog, again and again and again\n".repeat(40);
    fs::write(&input, &text).unwrap();
    let packed = dir.path().join("out.dsc");
    let back = dir.path().join("back.txt");
    for algo in [
        "static-shannon",
        "static-huffman",
        "simple-dynamic-shannon",
        "dynamic-shannon",
        "length-restricted",
        "alphabetic",
        "unequal-cost",
    ] {
        let out = dsc(&[
            "encode",
            path(&input),
            path(&packed),
            "--algo",
            algo,
            "--ell",
            "3",
            "--cost1",
            "2",
        ]);
        assert!(
            out.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains(" pass"));
        let out = dsc(&["decode", path(&packed), path(&back)]);
        assert!(
            out.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(fs::read(&back).unwrap(), text.as_bytes(), "{algo}");
    }
}

#[test]
fn empty_file_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty");
    fs::write(&input, b"").unwrap();
    let packed = dir.path().join("empty.dsc");
    for algo in ["static-huffman", "dynamic-shannon"] {
        assert!(
            dsc(&["encode", path(&input), path(&packed), "--algo", algo])
                .status
                .success()
        );
        assert_eq!(fs::read(&packed).unwrap().len(), 35);
    }
}

#[test]
fn declared_alphabet_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::write(&input, [0u8, 1, 2, 9]).unwrap();
    let packed = dir.path().join("x.dsc");
    let out = dsc(&[
        "encode",
        path(&input),
        path(&packed),
        "--alphabet-size",
        "4",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the declared alphabet"));
    assert!(dsc(&[
        "encode",
        path(&input),
        path(&packed),
        "--alphabet-size",
        "10"
    ])
    .status
    .success());
}

#[test]
fn corrupt_containers_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::write(&input, b"abracadabra").unwrap();
    let packed = dir.path().join("x.dsc");
    assert!(dsc(&["encode", path(&input), path(&packed)])
        .status
        .success());
    let good = fs::read(&packed).unwrap();
    let out_path = dir.path().join("y");

    let mut bad = good.clone();
    bad[0] = b'Z';
    fs::write(&packed, &bad).unwrap();
    let out = dsc(&["decode", path(&packed), path(&out_path)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a DSC1 container"));

    let mut bad = good.clone();
    bad[4] = 0xFF;
    fs::write(&packed, &bad).unwrap();
    assert!(!dsc(&["decode", path(&packed), path(&out_path)])
        .status
        .success());

    for cut in 0..good.len() {
        fs::write(&packed, &good[..cut]).unwrap();
        let out = dsc(&["decode", path(&packed), path(&out_path)]);
        assert_eq!(out.status.code(), Some(2), "cut at {cut}");
    }
}

#[test]
fn verify_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("a.txt"), "mississippi river ".repeat(100)).unwrap();
    fs::write(
        corpus.join("b.bin"),
        (0..=255u8).cycle().take(3000).collect::<Vec<_>>(),
    )
    .unwrap();
    let report = dir.path().join("report.csv");
    let out = dsc(&["verify", path(&corpus), "--report", path(&report)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("algo,m,n,H,bits,bound,pass,ops"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 7 * 8);
    assert!(rows.iter().all(|r| r.split(',').nth(6) == Some("true")));
}
