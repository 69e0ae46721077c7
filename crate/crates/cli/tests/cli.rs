use std::path::Path;
use std::process::Command;

fn era(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_era"))
        .args(args)
        .output()
        .expect("spawn era");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CONFIG: &str = "\
# small auction for fast tests
z_max_cents = 500
t = 16
key_bits = 128
group_bits = 64
l = 9
w = 3
seed = 21
";

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("auction.cfg"), CONFIG).unwrap();
    let (code, out, err) = era(&[
        "run",
        s(&dir.path().join("auction.cfg")),
        "--out",
        s(&dir.path().join("run")),
    ]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.starts_with("winner\t"), "{out}");
    dir
}

#[test]
fn run_writes_every_file_and_verifies() {
    let dir = setup();
    let run = dir.path().join("run");
    for f in [
        "board.log",
        "reveals.log",
        "agent.tsv",
        "state.json",
        "results.json",
    ] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    let board = run.join("board.log");
    let reveals = run.join("reveals.log");
    let (code, out, _) = era(&["verify", s(&board), s(&reveals)]);
    assert_eq!((code, out.trim()), (0, "accept"));
    let (code, out, _) = era(&[
        "verify",
        s(&board),
        s(&reveals),
        "--agent",
        s(&run.join("agent.tsv")),
    ]);
    assert_eq!((code, out.trim()), (0, "accept"));
    let (code, out, _) = era(&["patch", s(&board)]);
    assert_eq!((code, out.trim()), (0, "blamed\tnone"));
}

#[test]
fn overrides_change_the_auction() {
    let dir = setup();
    let cfg = dir.path().join("auction.cfg");
    let (code, out, err) = era(&[
        "run",
        s(&cfg),
        "--set",
        "l=2",
        "--out",
        s(&dir.path().join("two")),
    ]);
    assert_eq!(code, 0, "{err}");
    let reveals = std::fs::read_to_string(dir.path().join("two/reveals.log")).unwrap();
    assert!(reveals.starts_with("era-ordering\tv1\t1\n"), "{reveals}");
    assert!(out.contains("payment_cents\t"));
    let (code, _, _) = era(&["run", s(&cfg), "--set", "bogus=1"]);
    assert_eq!(code, 2);
}

#[test]
fn tamper_then_verify_rejects_and_patch_blames() {
    let dir = setup();
    let run = dir.path().join("run");
    let board = run.join("board.log");
    let out_dir = dir.path().join("forged");
    let (code, _, err) = era(&[
        "tamper",
        s(&board),
        "forged-internal-result",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = era(&[
        "verify",
        s(&out_dir.join("board.log")),
        s(&out_dir.join("reveals.log")),
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("reject: "), "{out}");
    let (code, out, _) = era(&[
        "patch",
        s(&out_dir.join("board.log")),
        "--state",
        s(&run.join("state.json")),
    ]);
    assert_eq!(code, 0);
    assert!(
        out.starts_with("blamed\t") && !out.contains("none"),
        "{out}"
    );
}

#[test]
fn bad_inputs_exit_2() {
    let dir = setup();
    let board = dir.path().join("run/board.log");
    assert_eq!(era(&["tamper", s(&board), "no-such-fault"]).0, 2);
    assert_eq!(
        era(&["verify", "/nonexistent/board.log", "/nonexistent/r.log"]).0,
        2
    );
    assert_eq!(era(&[]).0, 2);

    let edited = dir.path().join("edited.log");
    let text = std::fs::read_to_string(&board).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(3, 4);
    std::fs::write(&edited, lines.join("\n") + "\n").unwrap();
    let code = era(&["verify", s(&edited), s(&dir.path().join("run/reveals.log"))]).0;
    assert_ne!(code, 0);
}

#[test]
fn storage_and_benches_emit_csv() {
    let dir = setup();
    let (code, out, _) = era(&["storage", s(&dir.path().join("run/board.log"))]);
    assert_eq!(code, 0);
    assert!(out.contains("exchange"), "{out}");

    let csv = dir.path().join("lat.csv");
    let (code, _, err) = era(&[
        "bench",
        "latency",
        "--l",
        "100,200",
        "--w",
        "2",
        "--clock",
        "counted",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("l,w,rep,era_ms,benchmark_ms,wall_ms")
    );
    assert_eq!(text.lines().count(), 3);

    let (code, out, err) = era(&[
        "bench",
        "mapped",
        "--z",
        "10",
        "--group-bits",
        "64",
        "--reps",
        "1",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("z,t,group_bits,elapsed_ms"), "{out}");

    let (code, out, err) = era(&["bench", "cost", s(&dir.path().join("auction.cfg"))]);
    assert_eq!(code, 0, "{err}");
    for phase in [
        "mapped_bid_gen",
        "test_set_gen",
        "commitment_gen",
        "ordering",
        "patching",
    ] {
        assert!(out.contains(phase), "{phase} missing from {out}");
    }
}
