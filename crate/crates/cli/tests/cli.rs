use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn session(text: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".wg").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn wgkat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgkat"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SKI: &str = "\
semiring tropical
outputs v
let day = 1 [1,2] v
check day^^3 ; v == @2 ; v
check day^^1 ; v == @1 ; v
";

#[test]
fn ski_rental_session_passes() {
    let f = session(SKI);
    let o = wgkat(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches(": EQUIVALENT").count(), 2);
    assert!(out.contains("states"));
    assert!(out.contains("refinement rounds"));
}

#[test]
fn failed_assertion_exits_one() {
    let f = session("semiring tropical\noutputs v\ncheck (1 [1,2] v) ; v == @2 ; v\n");
    let o = wgkat(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT EQUIVALENT"));
    assert!(stdout(&o).contains("ASSERTION FAILED"));

    let quiet = wgkat(&["--quiet", "check", f.path().to_str().unwrap()]);
    assert_eq!(quiet.status.code(), Some(1));
    assert_eq!(stdout(&quiet).lines().count(), 1);
}

#[test]
fn scaling_by_zero_is_not_abort() {
    let f = session("semiring ext_naturals\ncheck @0 != 0\ncheck (1)^(1) != 0\n");
    let o = wgkat(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn weight_outside_carrier_is_an_error_with_location() {
    let f = session("semiring viterbi\noutputs v\n\ncheck @3/2 ; v == v\n");
    let path = f.path().to_str().unwrap();
    let o = wgkat(&["check", path]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("{path}:4:8:")), "{err}");
}

#[test]
fn unknown_identifier_and_missing_file() {
    let f = session("semiring boolean\nactions p\ncheck p ; q == p\n");
    let path = f.path().to_str().unwrap();
    let o = wgkat(&["check", path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains(&format!("{path}:3:11:")),
        "{}",
        stderr(&o)
    );

    let o = wgkat(&["check", "/definitely/not/here.wg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn max_tests_flag() {
    let f = session("semiring boolean\ntests a b c\ncheck a == a\n");
    let path = f.path().to_str().unwrap();
    assert_eq!(wgkat(&["check", path]).status.code(), Some(0));
    let o = wgkat(&["--max-tests", "2", "check", path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:1:"), "{}", stderr(&o));
}

#[test]
fn normal_form_round_trips() {
    let sources = [
        ("p", "semiring ext_naturals\ntests t\nactions p\nlet e = p\n"),
        ("1", "semiring ext_naturals\ntests t\nactions p\nlet e = 1\n"),
        (
            "loop",
            "semiring ext_nonneg_rationals\ntests t u\nactions p q\noutputs v\nlet e = ((p [1/2, 1/2] v) +[t . !u] q ; p)^(t + u) ; q\n",
        ),
        (
            "coin",
            "semiring ext_nonneg_rationals\noutputs dollar\nlet e = ((1 [1,1] (@1; dollar)) [1/2,1/2] (@0; dollar))^(1)\n",
        ),
    ];
    for (label, src) in sources {
        let f = session(src);
        let o = wgkat(&["nf", f.path().to_str().unwrap(), "e"]);
        assert_eq!(o.status.code(), Some(0), "{label}: {}", stderr(&o));
        let nf = stdout(&o);
        let nf = nf.trim();
        let g = session(&format!("{src}check e == {nf}\n"));
        let o = wgkat(&["check", g.path().to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{label}: {nf}\n{}{}",
            stdout(&o),
            stderr(&o)
        );
    }
}

#[test]
fn normal_form_of_action_covers_every_atom() {
    let f = session("semiring boolean\ntests t\nactions p\nlet e = p\n");
    let o = wgkat(&["nf", f.path().to_str().unwrap(), "e"]);
    assert_eq!(stdout(&o).trim(), "@1 ; p ; 1 +[!t] (@1 ; p ; 1 +[t] 0)");
}

#[test]
fn unbound_name_exits_two() {
    let f = session("semiring boolean\n");
    let path = f.path().to_str().unwrap();
    assert_eq!(wgkat(&["nf", path, "missing"]).status.code(), Some(2));
    assert_eq!(wgkat(&["dot", path, "missing"]).status.code(), Some(2));
}

/// Two atoms a and b. Under a the first state rejects with 4 and steps on
/// p1 with 3; under b it outputs v with 1 and steps on p2 with 5 and on p3
/// with 2. Both successors accept with 15.
const THREE_STATES: &str = "\
semiring ext_naturals
tests t
actions p1 p2 p3
outputs v
let x = (@4 ; 0 [1,1] @3 ; p1 ; @15) +[!t] (v [1,1] (@5 ; p2 ; @15 [1,1] @2 ; p3 ; @15 ; 1))
";

#[test]
fn dot_output_carries_the_transition_weights() {
    let f = session(THREE_STATES);
    let path = f.path().to_str().unwrap();
    let o = wgkat(&["dot", path, "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dot = stdout(&o);
    for label in [
        "\"!t | 4\"",
        "\"!t | p1 | 3\"",
        "\"t | 1\"",
        "\"t | p2 | 5\"",
        "\"t | p3 | 2\"",
        "\"!t | 15\"",
        "\"t | 15\"",
    ] {
        assert!(dot.contains(label), "missing {label} in\n{dot}");
    }
    assert!(dot.contains("reject") && dot.contains("out_v") && dot.contains("accept"));
    assert_eq!(dot, stdout(&wgkat(&["dot", path, "x"])));

    let g = session("semiring boolean\ntests t\nactions p\nlet e = p\n");
    let dot = stdout(&wgkat(&["dot", g.path().to_str().unwrap(), "e"]));
    assert_eq!(dot.matches("[label=\"").count(), 2 + 4);
    assert_eq!(dot.matches("| p | 1\"").count(), 2);
}

#[test]
fn axioms_command() {
    let o = wgkat(&[
        "axioms",
        "--semiring",
        "boolean,ext_naturals",
        "--seed",
        "1",
        "--count",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 2 * 37);
    let again = wgkat(&[
        "axioms",
        "--semiring",
        "boolean,ext_naturals",
        "--seed",
        "1",
        "--count",
        "10",
    ]);
    assert_eq!(stdout(&o), stdout(&again));

    let o = wgkat(&[
        "axioms",
        "--semiring",
        "ext_naturals",
        "--count",
        "50",
        "--control",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED"));

    let o = wgkat(&["axioms", "--semiring", "reals"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bundled_sessions_pass() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../sessions");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "wg") {
            let o = wgkat(&["check", path.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
