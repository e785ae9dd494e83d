use std::fs;
use std::path::Path;
use std::process::Command;

fn bw(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_betweenness"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const UNIFORM: &str = "# betweenness tiles v1\n{\"tiles\": [[0, 0, 0, 0]]}\n";
const PAIR: &str = "{\"tiles\": [[0, 0, 0, 1], [0, 1, 0, 0]]}";

#[test]
fn solve_uniform() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "uniform.tiles", UNIFORM);
    let (code, out) = bw(dir.path(), &["tiles", "solve", "--tiles", "uniform.tiles", "--max", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("(1,1)\n"));

    write(dir.path(), "bad.tiles", "{\"tiles\": [[0, 0, 0, 1]]}");
    let (code, out) = bw(dir.path(), &["tiles", "solve", "--tiles", "bad.tiles", "--max", "2"]);
    assert_eq!((code, out.as_str()), (1, "no solution\n"));
}

#[test]
fn mc_matches_validity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.tiles", PAIR);
    assert_eq!(bw(d, &["compile", "tiling", "--tiles", "s.tiles", "-o", "phi_S.fol"]).0, 0);
    // the pair tiles the 2×1 torus only alternating
    write(d, "good.lab", "{\"m\": 2, \"n\": 1, \"cells\": {\"0,0\": 0, \"1,0\": 1}}");
    write(d, "bad.lab", "{\"m\": 2, \"n\": 1, \"cells\": {\"0,0\": 0, \"1,0\": 0}}");
    for (lab, expected) in [("good.lab", 0), ("bad.lab", 1)] {
        let check = bw(d, &["tiles", "check", "--tiles", "s.tiles", "--torus", lab, "-o", "t.struct"]);
        assert_eq!(check.0, expected);
        let mc = bw(d, &["mc", "--structure", "t.struct", "--formula", "phi_S.fol"]);
        assert_eq!(mc.0, expected);
    }
}

#[test]
fn frame_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.tiles", PAIR);
    write(d, "t.lab", "{\"m\": 2, \"n\": 1, \"cells\": {\"0,0\": 0, \"1,0\": 1}}");
    let synth = ["frame", "synth", "--tiles", "s.tiles", "--torus", "t.lab", "-o", "f.frame"];
    assert_eq!(bw(d, &synth).0, 0);
    let first = fs::read(d.join("f.frame")).unwrap();
    assert_eq!(bw(d, &synth).0, 0);
    assert_eq!(fs::read(d.join("f.frame")).unwrap(), first, "synthesis is deterministic");

    assert_eq!(bw(d, &["frame", "validate", "--tiles", "s.tiles", "--frame", "f.frame"]), (0, "valid\n".into()));
    assert_eq!(bw(d, &["frame", "extract", "--tiles", "s.tiles", "--frame", "f.frame", "-o", "back.lab"]).0, 0);
    let back = fs::read_to_string(d.join("back.lab")).unwrap();
    assert!(back.starts_with("# betweenness labelling v1\n"));
    assert!(back.contains("\"0,0\": 0") && back.contains("\"1,0\": 1"));

    assert_eq!(bw(d, &["compile", "reduction-torus", "--tiles", "s.tiles", "-o", "gamma.fol"]).0, 0);
    assert_eq!(bw(d, &["mc", "--frame", "f.frame", "--formula", "gamma.fol"]).0, 0);
    assert_eq!(bw(d, &["frame", "closure", "--frame", "f.frame", "-o", "c.struct"]).0, 0);
    assert_eq!(bw(d, &["mc", "--structure", "c.struct", "--formula", "gamma.fol"]).0, 0);

    // a labelling that does not tile: the frame is still well formed
    write(d, "u.lab", "{\"m\": 2, \"n\": 1, \"cells\": {\"0,0\": 0, \"1,0\": 0}}");
    assert_eq!(bw(d, &["frame", "synth", "--tiles", "s.tiles", "--torus", "u.lab", "-o", "g.frame"]).0, 0);
    assert_eq!(bw(d, &["frame", "validate", "--tiles", "s.tiles", "--frame", "g.frame"]).0, 0);
    assert_eq!(bw(d, &["mc", "--frame", "g.frame", "--formula", "gamma.fol"]).0, 1);
}

#[test]
fn invalid_frames_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.tiles", PAIR);
    write(
        d,
        "c.frame",
        r#"{"dim": 2, "points": {"a": ["0/1", "0/1"], "b": ["1/1", "0/1"], "c": ["2/1", "0/1"]},
            "P": ["a", "b", "c"], "p0": "a", "px": "c", "py": "b"}"#,
    );
    assert_eq!(
        bw(d, &["frame", "validate", "--tiles", "s.tiles", "--frame", "c.frame"]),
        (1, "constants collinear\n".into())
    );
    assert_eq!(bw(d, &["frame", "extract", "--tiles", "s.tiles", "--frame", "c.frame"]).0, 1);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.tiles", PAIR);
    write(d, "wrong.fol", "# betweenness frame v1\ntrue\n");
    write(d, "t.struct", "{\"universe\": [\"a\"]}");
    assert_eq!(bw(d, &["mc", "--structure", "t.struct", "--formula", "wrong.fol"]).0, 2);
    write(d, "broken.fol", "A x. (");
    assert_eq!(bw(d, &["mc", "--structure", "t.struct", "--formula", "broken.fol"]).0, 2);
    assert_eq!(bw(d, &["mc", "--structure", "missing", "--formula", "broken.fol"]).0, 2);
    assert_eq!(bw(d, &["tiles", "solve", "--tiles", "s.tiles"]).0, 2);
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.tiles", PAIR);
    let (code, out) = bw(d, &["verify", "roundtrip", "--tiles", "s.tiles", "--max", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("PASS 90 cases, 0 failed\n"));
    assert_eq!(bw(d, &["verify", "dualpath", "--max", "2", "--cases", "2"]).0, 0);
    assert_eq!(bw(d, &["verify", "lemma1", "--max", "4", "--cases", "40"]).0, 0);
}
