use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn skat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skat"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = skat(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const FAST: [&str; 6] = ["--set", "worlds=1", "--set", "endgame_worlds=2", "--set", "eyes_tiebreak=false"];

fn selfplay(dir: &Path, extra: &[&str]) -> String {
    let mut args = vec!["selfplay", "--deals", "d.bin", "--out", "c.pgn"];
    args.extend_from_slice(&FAST);
    args.extend_from_slice(extra);
    ok(dir, &args)
}

#[test]
fn corpus_workflow() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["dealgen", "--seed", "4", "--count", "12", "--out", "d.bin"]);
    assert_eq!(fs::metadata(d.join("d.bin")).unwrap().len(), 40 + 12 * 41);

    let out = skat(d, &["selfplay", "--deals", "d.bin", "--out", "c.pgn"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--zero-learning"));

    selfplay(d, &["--zero-learning"]);
    let first = fs::read(d.join("c.pgn")).unwrap();
    selfplay(d, &["--zero-learning", "--workers", "2"]);
    assert_eq!(fs::read(d.join("c.pgn")).unwrap(), first);

    assert!(ok(d, &["pgn", "validate", "c.pgn"]).contains("12 games valid"));
    let split = ok(d, &["pgn", "split", "--in", "c.pgn", "--deals", "all.pgn", "--games", "played.pgn"]);
    assert!(split.starts_with("12 deals"));

    ok(
        d,
        &[
            "tablegen",
            "--deals",
            "all.pgn",
            "--games",
            "played.pgn",
            "--question",
            "declarer_suit",
            "--out",
            "declarer_suit.table",
        ],
    );
    ok(
        d,
        &[
            "tablegen",
            "--deals",
            "all.pgn",
            "--games",
            "played.pgn",
            "--question",
            "declarer_suit",
            "--bias",
            "declarer_suit.table",
            "--out",
            "twice.table",
        ],
    );
    ok(
        d,
        &[
            "tablemerge",
            "declarer_suit.table",
            "declarer_suit.table",
            "--question",
            "declarer_suit",
            "--out",
            "merged.table",
        ],
    );
    assert_eq!(fs::read(d.join("twice.table")).unwrap(), fs::read(d.join("merged.table")).unwrap());

    let eval = ok(d, &["eval", "c.pgn"]);
    assert!(eval.contains("Null46/59") && eval.contains("Folded"));

    let played = fs::read_to_string(d.join("played.pgn")).unwrap();
    let id = played
        .lines()
        .skip(5)
        .find(|l| !l.is_empty())
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .to_string();
    let solved = ok(d, &["solve", "--pgn", "played.pgn", "--id", &id]);
    assert!(solved.contains("declarer_can_win") && solved.contains("best_eyes"));
}

#[test]
fn tables_directory_is_used() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["dealgen", "--seed", "5", "--count", "8", "--out", "d.bin"]);
    let out = skat(d, &["selfplay", "--deals", "d.bin", "--tables", "missing", "--out", "c.pgn"]);
    assert!(!out.status.success());
    fs::create_dir(d.join("empty")).unwrap();
    selfplay(d, &["--tables", "empty"]);
    let with_dir = fs::read(d.join("c.pgn")).unwrap();
    selfplay(d, &["--zero-learning"]);
    assert_eq!(fs::read(d.join("c.pgn")).unwrap(), with_dir);
}

#[test]
fn config_file_and_overrides() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["dealgen", "--seed", "6", "--count", "6", "--out", "d.bin"]);
    fs::write(d.join("policy.cfg"), "# light\nworlds=1\nendgame_worlds=2\n").unwrap();
    ok(
        d,
        &[
            "selfplay",
            "--deals",
            "d.bin",
            "--zero-learning",
            "--config",
            "policy.cfg",
            "--out",
            "a.pgn",
        ],
    );
    ok(
        d,
        &[
            "selfplay",
            "--deals",
            "d.bin",
            "--zero-learning",
            "--set",
            "worlds=1",
            "--set",
            "endgame_worlds=2",
            "--out",
            "b.pgn",
        ],
    );
    assert_eq!(fs::read(d.join("a.pgn")).unwrap(), fs::read(d.join("b.pgn")).unwrap());
    for bad in ["theta=2", "nonsense=1", "worlds"] {
        let out = skat(
            d,
            &["selfplay", "--deals", "d.bin", "--zero-learning", "--set", bad, "--out", "x.pgn"],
        );
        assert!(!out.status.success(), "{bad}");
    }
    fs::write(d.join("bad.cfg"), "worlds 3\n").unwrap();
    assert!(!skat(
        d,
        &[
            "selfplay",
            "--deals",
            "d.bin",
            "--zero-learning",
            "--config",
            "bad.cfg",
            "--out",
            "x.pgn"
        ]
    )
    .status
    .success());
}

#[test]
fn bootstrap_and_versus() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    let mut args = vec![
        "bootstrap",
        "--iterations",
        "2",
        "--deals",
        "10",
        "--deal-seed",
        "3",
        "--out",
        "run",
    ];
    args.extend_from_slice(&FAST);
    let text = ok(d, &args);
    assert!(text.contains("iteration 2"));
    let csv = fs::read_to_string(d.join("run/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(d.join("run/tables/CURRENT").exists());

    ok(d, &["dealgen", "--seed", "8", "--count", "6", "--out", "d.bin"]);
    let mut args = vec!["versus", "--deals", "d.bin", "--with", "run/tables"];
    args.extend_from_slice(&FAST);
    let v = ok(d, &args);
    assert!(v.contains("seating ++-") && v.contains("seating +--"));
}

#[test]
fn workers_env_is_accepted() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["dealgen", "--seed", "9", "--count", "4", "--out", "d.bin"]);
    let out = Command::new(env!("CARGO_BIN_EXE_skat"))
        .current_dir(d)
        .env("SKAT_WORKERS", "2")
        .args(["selfplay", "--deals", "d.bin", "--zero-learning", "--out", "c.pgn"])
        .args(FAST)
        .output()
        .unwrap();
    assert!(out.status.success());
}
