use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agvdance"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

/// Wedges in counterclockwise order around the disc.
const WEDGES: [&str; 6] = ["D12", "D32", "D31", "D21", "D23", "D13"];

#[test]
fn circulating_cells_follow_the_wedge_order() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "circ.json",
        r#"{"field": {"kind": "circulating"},
            "sim": {"t_max": 30, "starts": [{"x": [1, 0.3], "y": [2, 0.6]}]},
            "output": {"csv": "circ.csv"}}"#,
    );
    let o = run(dir.path(), &["simulate", "--scenario", &s]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("circ.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t", "iota_x", "nu_x", "iota_y", "nu_y", "cell", "r", "theta", "event", "symbol"]);
    let cells: Vec<String> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| r[8].starts_with("cell-change"))
        .map(|r| r[5].to_string())
        .collect();
    assert!(cells.len() >= 12, "{cells:?}");
    let pos: Vec<usize> = cells.iter().map(|c| WEDGES.iter().position(|w| w == c).unwrap()).collect();
    let step = (pos[1] + 6 - pos[0]) % 6;
    assert!(step == 1 || step == 5);
    for w in pos.windows(2) {
        assert_eq!((w[1] + 6 - w[0]) % 6, step, "{cells:?}");
    }
}

#[test]
fn chord_scenario_reports_the_planned_word() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "chords.json",
        r#"{"field": {"kind": "chords", "word": ["A1", "B2", "A3"]},
            "sim": {"starts": [{"x": [1, 0.5], "y": [2, 0.5]}]}}"#,
    );
    let o = run(dir.path(), &["simulate", "--scenario", &s, "--out", "run.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("steady word: A1 B2 A3"), "{text}");
    let line = text.lines().find(|l| l.contains("realized cycle error")).unwrap();
    let err: f64 = line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(err < 0.05, "{line}");
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.contains("switch 1->2"));
}

#[test]
fn colliding_field_exits_with_safety_code() {
    let dir = tempfile::tempdir().unwrap();
    // Target radius 0.01 sits inside the guard.
    let s = scenario(
        dir.path(),
        "bad.json",
        r#"{"field": {"kind": "tuned", "f_harmonics": {"a0": 0.01}},
            "sim": {"starts": [{"x": [1, 0.5], "y": [2, 0.5]}]}}"#,
    );
    let o = run(dir.path(), &["simulate", "--scenario", &s]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert_eq!(err.trim().lines().count(), 1);
    assert!(err.starts_with("error[3]: safety violation at t = "), "{err}");
}

#[test]
fn validate_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let good = scenario(dir.path(), "good.json", r#"{"field": {"kind": "circulating"}}"#);
    let o = run(dir.path(), &["validate", "--scenario", &good]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid (500 branch points"));

    let nav = scenario(
        dir.path(),
        "nav.json",
        r#"{"field": {"kind": "navigation", "goal_x": [1, 0.8], "goal_y": [2, 0.6]}}"#,
    );
    assert_eq!(run(dir.path(), &["validate", "--scenario", &nav]).status.code(), Some(0));

    let broken = scenario(dir.path(), "broken.json", r#"{"field": {"kind": "circulating", "fin_speed": 0.5}}"#);
    let o = run(dir.path(), &["validate", "--scenario", &broken]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("violation: speeds differ"));
    assert!(text.contains("at x=(center) y=(1, "), "{text}");

    let empty = scenario(dir.path(), "empty.json", r#"{"field": {}}"#);
    let o = run(dir.path(), &["validate", "--scenario", &empty]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr(&o).trim().lines().count(), 1);
}

#[test]
fn check_word_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["check-word", "A1", "B2", "A3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("monotone: yes"));
    // Gaps of pi/3, pi/3 and 4 pi/3: one exceeds pi.
    assert!(text.contains("gap angles: 1.047198 1.047198 4.188790"), "{text}");
    assert!(text.contains("class: Zero"));

    let o = run(dir.path(), &["check-word", "A1", "A3", "B2", "B1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("monotone: no"));

    let o = run(dir.path(), &["check-word", "A1"]);
    assert!(stdout(&o).contains("gap angles: 6.283185"));
    assert!(stdout(&o).contains("class: Zero"));

    let o = run(dir.path(), &["check-word", "A1", "AB11"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("AB11"));
}

#[test]
fn gap_angles_of_spread_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gap-angles", "A1", "B2", "A3", "B1", "A2", "B3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("class: PlusMinusOne"), "{}", stdout(&o));
}

#[test]
fn pattern_iterates() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pattern", "--block", "1,2", "--start", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("iterates: e3 e1 e2 e1 e2\n"), "{}", stdout(&o));

    let o = run(dir.path(), &["pattern", "--block", "1,2,3", "--start", "2"]);
    assert!(stdout(&o).contains("steps to pattern: 0"));

    // Edge 4 hangs off a separate component and cannot reach the block.
    let s = scenario(
        dir.path(),
        "disc.json",
        r#"{"graph": {"vertices": [0, 1, 2, 3, 4, 5], "edges": [[1, 0, 1], [2, 0, 2], [3, 0, 3], [4, 4, 5]]},
            "field": {"kind": "circulating"},
            "pattern": {"block": [1, 2], "start": 4}}"#,
    );
    let o = run(dir.path(), &["check-pattern", "--scenario", &s]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("e4"), "{}", stderr(&o));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "circ.json",
        r#"{"field": {"kind": "circulating"}, "sim": {"t_max": 3}}"#,
    );
    for out in ["a.csv", "b.csv"] {
        let o = run(dir.path(), &["simulate", "--scenario", &s, "--seed", "7", "--starts", "2", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for k in 0..2 {
        let a = fs::read(dir.path().join(format!("a-{k}.csv"))).unwrap();
        let b = fs::read(dir.path().join(format!("b-{k}.csv"))).unwrap();
        assert_eq!(a, b);
    }
    let a0 = fs::read(dir.path().join("a-0.csv")).unwrap();
    let a1 = fs::read(dir.path().join("a-1.csv")).unwrap();
    assert_ne!(a0, a1);
}

#[test]
fn svg_is_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "circ.json",
        r#"{"field": {"kind": "circulating"}, "sim": {"t_max": 5, "count": 2}}"#,
    );
    let o = run(dir.path(), &["simulate", "--scenario", &s, "--svg", "p.svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.contains(r#"viewBox="0 0 800 800""#));
    assert!(!svg.contains("href"));
    for label in ["A1", "AB12", "B2", "AB32", "A3", "AB31", "B1", "AB21", "A2", "AB23", "B3", "AB13"] {
        assert!(svg.contains(&format!(">{label}</text>")), "{label}");
    }
    assert_eq!(svg.matches("stroke-dasharray").count(), 6);
    assert!(svg.contains("<polyline"));
}

#[test]
fn tune_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "tuned.json",
        r#"{"field": {"kind": "tuned", "f_harmonics": {"a0": 0.5, "sin": [0.1]}},
            "sim": {"t_max": 20, "count": 3, "samples": 60}}"#,
    );
    let o = run(dir.path(), &["tune", "--scenario", &s]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("profile range: [0.4"), "{text}");
    let line = text.lines().find(|l| l.starts_with("max |r - f(theta)|")).unwrap();
    let worst: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(worst < 1e-3, "{line}");
}

#[test]
fn argument_errors_are_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["frob"][..], &["simulate"], &["pattern", "--block", "x"]] {
        let o = run(dir.path(), args);
        assert_eq!(o.status.code(), Some(4), "{args:?}");
        assert_eq!(stderr(&o).trim().lines().count(), 1, "{}", stderr(&o));
    }
    let o = run(dir.path(), &["simulate", "--scenario", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(run(dir.path(), &["--help"]).status.success());
}
