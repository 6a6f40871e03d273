use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use glyphcrt::channel::ChannelParams;
use glyphcrt::fixtures;
use glyphcrt::pipeline::{
    embed, simulate_document, ChannelTrace, CodecOptions, EncodedDocument, PlainMessage,
};
use tempfile::TempDir;

const TEXT: &str = "the quick brown fox jumps over the lazy dog while some more words appear \
here and there, so that every block has room for a short message to travel in plain sight \
through the letters of this sentence without anyone noticing a thing.";

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        let w = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        fs::write(w.path("text.txt"), TEXT).unwrap();
        fs::write(w.path("msg.bin"), b"hi there").unwrap();
        w
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_glyphcrt"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn embed_extract_round_trip() {
    let w = Work::new();
    w.ok(&[
        "embed",
        "--text",
        "text.txt",
        "--message",
        "msg.bin",
        "-o",
        "doc.txt",
    ]);
    let report = w.ok(&["extract", "--input", "doc.txt", "-o", "out.bin"]);
    assert_eq!(fs::read(w.path("out.bin")).unwrap(), b"hi there");
    assert!(report.lines().all(|l| l.contains("status=exact")));
    assert!(read(&w.path("doc.txt"))
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("# glyphcrt "));
}

#[test]
fn two_forced_errors_are_corrected_by_likelihood() {
    let w = Work::new();
    w.ok(&[
        "embed",
        "--text",
        "text.txt",
        "--message",
        "msg.bin",
        "-o",
        "doc.txt",
    ]);
    w.ok(&[
        "simulate",
        "--input",
        "doc.txt",
        "--errors",
        "2",
        "--blocks",
        "1",
        "-o",
        "trace.txt",
    ]);
    let report = w.ok(&["extract", "--input", "trace.txt", "-o", "out.bin"]);
    assert_eq!(fs::read(w.path("out.bin")).unwrap(), b"hi there");
    let first = report.lines().next().unwrap();
    assert!(first.contains("status=corrected-ml"), "{first}");
    assert!(first.contains("min_hamming=2"), "{first}");
}

#[test]
fn vector_documents_decode() {
    let w = Work::new();
    w.ok(&[
        "embed", "--text", "text.txt", "--bits", "1100101", "-o", "doc.txt",
    ]);
    w.ok(&[
        "simulate", "--input", "doc.txt", "--vector", "-o", "vec.txt",
    ]);
    let out = w.ok(&["extract", "--input", "vec.txt"]);
    assert!(out.ends_with("message 1100101\n"));
}

#[test]
fn runs_are_deterministic_and_match_the_library() {
    let w = Work::new();
    for name in ["a", "b"] {
        w.ok(&[
            "embed",
            "--text",
            "text.txt",
            "--message",
            "msg.bin",
            "-o",
            &format!("{name}.doc"),
        ]);
        w.ok(&[
            "--seed",
            "5",
            "simulate",
            "--input",
            &format!("{name}.doc"),
            "-o",
            &format!("{name}.trace"),
        ]);
    }
    assert_eq!(read(&w.path("a.doc")), read(&w.path("b.doc")));
    assert_eq!(read(&w.path("a.trace")), read(&w.path("b.trace")));

    let cb = fixtures::calibrated_codebook();
    let doc = embed(
        TEXT,
        &cb,
        &PlainMessage::from_bytes(b"hi there"),
        None,
        &CodecOptions::default(),
    )
    .unwrap();
    assert_eq!(
        EncodedDocument::from_text(&read(&w.path("a.doc"))).unwrap(),
        doc
    );
    let trace = simulate_document(
        &doc,
        &cb,
        &ChannelParams::new(glyphcrt::channel::DEFAULT_SIGMA, 5).unwrap(),
    )
    .unwrap();
    assert_eq!(
        ChannelTrace::from_text(&read(&w.path("a.trace"))).unwrap(),
        trace
    );
}

#[test]
fn keyed_embedding_needs_the_key() {
    let w = Work::new();
    w.ok(&["--seed", "3", "keygen", "-o", "key.txt"]);
    w.ok(&[
        "embed",
        "--text",
        "text.txt",
        "--message",
        "msg.bin",
        "--key",
        "key.txt",
        "-o",
        "doc.txt",
    ]);
    w.ok(&[
        "extract", "--input", "doc.txt", "--key", "key.txt", "-o", "out.bin",
    ]);
    assert_eq!(fs::read(w.path("out.bin")).unwrap(), b"hi there");
    assert_eq!(w.code(&["extract", "--input", "doc.txt"]), 4);
}

#[test]
fn sign_and_verify_both_schemes() {
    let w = Work::new();
    w.ok(&["keygen", "-o", "key.txt"]);
    w.ok(&[
        "sign", "--text", "text.txt", "--key", "key.txt", "-o", "s1.txt",
    ]);
    let out = w.ok(&["verify", "--input", "s1.txt", "--key", "key.txt"]);
    assert!(out.starts_with("overall match\n"));

    w.ok(&[
        "keygen",
        "--rsa",
        "-o",
        "priv.txt",
        "--public-out",
        "pub.txt",
    ]);
    w.ok(&[
        "sign",
        "--text",
        "text.txt",
        "--rsa-private",
        "priv.txt",
        "-o",
        "s2.txt",
    ]);
    w.ok(&["verify", "--input", "s2.txt", "--rsa-public", "pub.txt"]);

    let signed = read(&w.path("s2.txt")).replacen("\"the quick", "\"tho quick", 1);
    fs::write(w.path("s3.txt"), signed).unwrap();
    let out = w.run(&["verify", "--input", "s3.txt", "--rsa-public", "pub.txt"]);
    assert_eq!(out.status.code(), Some(6));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("segment 0 letters 0..80 mismatch"),
        "{stdout}"
    );
    assert!(stdout.contains("segment 1 letters 80..") && stdout.contains("match\n"));
}

#[test]
fn capacity_reports() {
    let w = Work::new();
    let out = w.ok(&["capacity", "--text", "text.txt"]);
    assert!(out.starts_with("letters "));
    assert!(out.contains("total_bits "));
    let out = w.ok(&["capacity", "--monte-carlo", "500"]);
    assert!(out.contains("blocks 500\n"));
}

#[test]
fn bench_is_fast() {
    let w = Work::new();
    let out = w.ok(&["bench"]);
    assert!(out.starts_with("letters 176 "), "{out}");
    assert!(out.contains("decoded true"));
    let secs: f64 = out.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(secs < 0.9, "{secs}");
}

#[test]
fn perceptual_fit_and_codebook_build() {
    let w = Work::new();
    w.ok(&[
        "fit-perceptual",
        "--synthetic-glyphs",
        "12",
        "--raters",
        "60",
        "--responses-out",
        "r.txt",
        "-o",
        "s.txt",
    ]);
    w.ok(&["fit-perceptual", "--responses", "r.txt", "-o", "s2.txt"]);
    let strip = |p: &str| -> String {
        read(&w.path(p))
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect()
    };
    assert_eq!(strip("s.txt"), strip("s2.txt"));

    let out = w.ok(&[
        "codebook-build",
        "--chars",
        "ab",
        "--candidates",
        "20",
        "-o",
        "cb.txt",
    ]);
    assert_eq!(out.lines().count(), 2);
    w.ok(&["codebook-build", "--calibrated", "-o", "cal.txt"]);
    w.ok(&[
        "embed",
        "--codebook",
        "cal.txt",
        "--text",
        "text.txt",
        "--message",
        "msg.bin",
        "-o",
        "doc.txt",
    ]);
    w.ok(&[
        "extract",
        "--codebook",
        "cal.txt",
        "--input",
        "doc.txt",
        "-o",
        "out.bin",
    ]);
    assert_eq!(fs::read(w.path("out.bin")).unwrap(), b"hi there");
}

#[test]
fn exit_codes_distinguish_failures() {
    let w = Work::new();
    assert_eq!(w.code(&["frobnicate"]), 2);
    assert_eq!(w.code(&["embed", "--bogus"]), 2);
    assert_eq!(w.code(&["extract", "--input", "missing.txt"]), 2);

    fs::write(w.path("big.bin"), vec![7u8; 200]).unwrap();
    assert_eq!(
        w.code(&[
            "embed",
            "--text",
            "text.txt",
            "--message",
            "big.bin",
            "-o",
            "x"
        ]),
        3
    );

    fs::write(w.path("junk.txt"), "glyphcrt-document 1\nnonsense\n").unwrap();
    assert_eq!(w.code(&["extract", "--input", "junk.txt"]), 7);

    fs::write(
        w.path("upper.txt"),
        "Capital letters are not in the codebook",
    )
    .unwrap();
    assert_eq!(w.code(&["capacity", "--text", "upper.txt"]), 7);
}
