use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fhg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhg"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn headless_random_writes_one_row_per_game() {
    let o = fhg(&[
        "headless", "--agent", "random", "--games", "7", "--seed", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("session_id,game_index,seed,"));
    for (g, line) in lines[1..].iter().enumerate() {
        assert_eq!(line.split(',').nth(1).unwrap(), (g + 1).to_string());
    }
}

#[test]
fn flags_beat_environment_beat_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fhg.toml");
    std::fs::write(&cfg, "[session]\ngames = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let rows = |o: Output| stdout(&o).lines().count() - 1;
    let base = [
        "--config",
        cfg,
        "headless",
        "--agent",
        "idle",
        "--games-only",
    ];
    assert_eq!(rows(fhg(&base)), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_fhg"))
        .args(base)
        .env("FHG_SESSION__GAMES", "3")
        .output()
        .unwrap();
    assert_eq!(rows(o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_fhg"))
        .args(base)
        .args(["--games", "4"])
        .env("FHG_SESSION__GAMES", "3")
        .output()
        .unwrap();
    assert_eq!(rows(o), 4);
}

#[test]
fn replay_accepts_clean_logs_and_rejects_tampered_ones() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = fhg(&[
        "headless",
        "--agent",
        "oracle",
        "--games",
        "2",
        "--seed",
        "4",
        "--log-dir",
        d,
    ]);
    assert!(o.status.success());
    let log = dir.path().join("oracle-4.jsonl");
    let o = fhg(&["replay", log.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("ok: 4 segments"));

    // Flip one digit of a killed entity id.
    let text = std::fs::read_to_string(&log).unwrap();
    let key = "\"event\":\"monster_killed\",\"entity_id\":";
    let at = text.find(key).unwrap() + key.len();
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'9' {
        b'8'
    } else {
        bytes[at] + 1
    };
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, &bytes).unwrap();
    let o = fhg(&["replay", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("mismatch: segment"), "{}", stdout(&o));

    // Structural damage before the last line is an error too.
    let mut bytes = std::fs::read(&log).unwrap();
    let mid = bytes.len() / 2;
    let brace = mid + bytes[mid..].iter().position(|&b| b == b'{').unwrap();
    bytes[brace] = b'[';
    std::fs::write(&bad, &bytes).unwrap();
    assert!(!fhg(&["replay", bad.to_str().unwrap()]).status.success());
}

#[test]
fn unknown_flags_print_usage() {
    let o = fhg(&["headless", "--agent", "random", "--turbo"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(!fhg(&["headless", "--agent", "psychic"]).status.success());
    assert!(!fhg(&["--set", "game.fov_h=400", "demo"]).status.success());
}

#[test]
fn calibrate_maps_piped_samples() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fhg"))
        .args(["calibrate", "--calib-x-min", "-100", "--calib-x-max", "100"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0 230\n100 80\n# comment\n50 50 0 0\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "0.5000 0.5000 4 2 1\n0.7500 0.7500 6 3 1\n0.7500 0.7500 6 3 0\n"
    );
}

#[test]
fn demo_prints_events() {
    let o = fhg(&["demo", "--agent", "oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("monster_killed"));
}
