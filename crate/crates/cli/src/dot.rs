//! Graphviz export of explored automata.

use std::collections::BTreeSet;
use std::fmt::Write;

use wgkat_core::semantics::Automaton;
use wgkat_core::syntax::Signature;
use wgkat_core::weighting::Target;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn terminal_id(x: &Target<usize>) -> Option<String> {
    match x {
        Target::Accept => Some("accept".into()),
        Target::Reject => Some("reject".into()),
        Target::Output(v) => Some(format!("out_{v}")),
        Target::Step(..) => None,
    }
}

/// Renders `aut` as a DOT digraph. The output depends only on the automaton
/// and the signature.
pub fn render(aut: &Automaton, sig: &Signature) -> String {
    let mut out = String::new();
    out.push_str("digraph wgkat {\n  rankdir=LR;\n  node [shape=circle];\n");
    for s in 0..aut.state_count() {
        let _ = writeln!(out, "  s{s} [label=\"{s}\"];");
    }
    let mut terminals = BTreeSet::new();
    let mut edges = String::new();
    for s in 0..aut.state_count() {
        for (i, atom) in aut.atoms().iter().enumerate() {
            let guard = escape(&sig.atom_bexp(atom).to_string());
            for (x, w) in aut.transition(s, i).iter() {
                match x {
                    Target::Step(p, t) => {
                        let _ = writeln!(edges, "  s{s} -> s{t} [label=\"{guard} | {p} | {w}\"];");
                    }
                    other => {
                        let id = terminal_id(other).expect("not a step");
                        let _ = writeln!(edges, "  s{s} -> {id} [label=\"{guard} | {w}\"];");
                        terminals.insert(other.clone());
                    }
                }
            }
        }
    }
    for x in &terminals {
        let id = terminal_id(x).expect("terminal");
        let line = match x {
            Target::Accept => format!("  {id} [shape=doublecircle, label=\"\u{2713}\"];"),
            Target::Reject => format!("  {id} [shape=box, label=\"\u{2717}\"];"),
            Target::Output(v) => format!("  {id} [shape=box, label=\"{}\"];", escape(v)),
            Target::Step(..) => unreachable!(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&edges);
    out.push_str("}\n");
    out
}
