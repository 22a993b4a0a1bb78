//! Text, JSON and DOT renderings of machines, traces, output sets and
//! verdicts.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde_json::{json, Value};

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::constructions::BuildReport;
use crate::decision::Verdict;
use crate::state::StateId;
use crate::text::{Item, Workspace};
use crate::trace::DerivationTrace;
use crate::transducer::{rhs_calls, Transducer};
use crate::tree::{canonical_vec, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

/// A machine in the `.ttc` format.
pub fn machine_text(name: &str, t: &Transducer) -> String {
    let mut out = String::new();
    crate::text::write::machine(&mut out, "transducer", name, t, None);
    out
}

fn symbol_json(a: &Symbol) -> Value {
    match a.annotation() {
        None => Value::String(a.to_string()),
        Some(ann) => json!({
            "symbol": symbol_json(&ann.base),
            "lookahead": ann.lookahead.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        }),
    }
}

fn alphabet_json(alphabet: &RankedAlphabet) -> Value {
    Value::Array(
        alphabet
            .iter()
            .map(|(a, k)| json!({ "symbol": symbol_json(a), "rank": k }))
            .collect(),
    )
}

fn strings<'a>(states: impl IntoIterator<Item = &'a StateId>) -> Vec<String> {
    states.into_iter().map(|q| q.to_string()).collect()
}

pub fn machine_json(name: &str, t: &Transducer) -> Value {
    let rules: Vec<Value> = t
        .rules()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "number": i + 1,
                "state": r.state.to_string(),
                "symbol": symbol_json(&r.symbol),
                "lookahead": r.lookahead.as_ref().map(strings),
                "rhs": r.rhs.to_string(),
            })
        })
        .collect();
    json!({
        "name": name,
        "kind": "transducer",
        "states": strings(t.states()),
        "initial": t.initial().to_string(),
        "input": alphabet_json(t.input()),
        "output": alphabet_json(t.output()),
        "rules": rules,
    })
}

/// Every item of a workspace. A look-ahead transducer refers to its
/// automaton by name.
pub fn workspace_json(ws: &Workspace) -> Value {
    let items: Vec<Value> = ws
        .items()
        .iter()
        .map(|(name, item)| match item {
            Item::Transducer(t) => machine_json(name, t),
            Item::Lookahead { la, machine } => {
                let mut v = machine_json(name, machine.base());
                v["kind"] = json!("lookahead");
                v["la"] = json!(la);
                v
            }
            Item::Chain { stages, .. } => json!({ "name": name, "kind": "chain", "stages": stages }),
        })
        .collect();
    json!({ "items": items })
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn machine_dot_body(out: &mut String, prefix: &str, t: &Transducer) {
    let node = |q: &StateId| quote(&format!("{prefix}{q}"));
    for q in t.states() {
        let shape = if q == t.initial() { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [label={}, shape={shape}];", node(q), quote(q.name()));
    }
    // Each rule is a hyperedge: state -> point -> called states.
    for (i, r) in t.rules().iter().enumerate() {
        let hub = quote(&format!("{prefix}rule{}", i + 1));
        let _ = writeln!(out, "  {hub} [shape=point];");
        let mut label = format!("{}: {}", i + 1, r.symbol);
        if let Some(ls) = &r.lookahead {
            let _ = write!(label, " [{}]", strings(ls).join(", "));
        }
        let _ = write!(label, " -> {}", r.rhs);
        let _ = writeln!(
            out,
            "  {} -> {hub} [label={}, arrowhead=none];",
            node(&r.state),
            quote(&label)
        );
        let calls: BTreeSet<(StateId, usize)> = rhs_calls(&r.rhs).into_iter().collect();
        for (q, j) in calls {
            let _ = writeln!(out, "  {hub} -> {} [label={}];", node(&q), quote(&format!("x{j}")));
        }
    }
}

pub fn machine_dot(name: &str, t: &Transducer) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(name));
    machine_dot_body(&mut out, "", t);
    out.push_str("}\n");
    out
}

/// Every machine of a workspace as one cluster; a chain becomes a row of
/// stage boxes.
pub fn workspace_dot(ws: &Workspace) -> String {
    let mut out = String::from("digraph workspace {\n  rankdir=LR;\n");
    for (name, item) in ws.items() {
        let _ = writeln!(
            out,
            "  subgraph {} {{\n  label={};",
            quote(&format!("cluster_{name}")),
            quote(name)
        );
        match item {
            Item::Transducer(t) => machine_dot_body(&mut out, &format!("{name}:"), t),
            Item::Lookahead { la, machine } => {
                let _ = writeln!(
                    out,
                    "  {} [label={}, shape=note];",
                    quote(&format!("{name}:la")),
                    quote(&format!("look-ahead {la}"))
                );
                machine_dot_body(&mut out, &format!("{name}:"), machine.base());
            }
            Item::Chain { stages, .. } => {
                for (i, st) in stages.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  {} [label={}, shape=box];",
                        quote(&format!("{name}:{i}")),
                        quote(st)
                    );
                    if i > 0 {
                        let _ = writeln!(
                            out,
                            "  {} -> {};",
                            quote(&format!("{name}:{}", i - 1)),
                            quote(&format!("{name}:{i}"))
                        );
                    }
                }
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn trees_text(trees: &BTreeSet<Tree>) -> String {
    canonical_vec(trees.iter().cloned())
        .iter()
        .map(|t| format!("{t}\n"))
        .collect()
}

pub fn trees_json(trees: &BTreeSet<Tree>) -> Value {
    Value::Array(
        canonical_vec(trees.iter().cloned())
            .iter()
            .map(|t| Value::String(t.to_string()))
            .collect(),
    )
}

/// An input node with an edge to each output.
pub fn trees_dot(input: &Tree, trees: &BTreeSet<Tree>) -> String {
    let mut out = format!(
        "digraph outputs {{\n  node [shape=box];\n  input [label={}];\n",
        quote(&input.to_string())
    );
    for (i, t) in canonical_vec(trees.iter().cloned()).iter().enumerate() {
        let _ = writeln!(out, "  out{i} [label={}];\n  input -> out{i};", quote(&t.to_string()));
    }
    out.push_str("}\n");
    out
}

pub fn trace_text(tr: &DerivationTrace) -> String {
    let forms = tr.rendered_forms();
    let mut out = format!("branch {} of {}\n{}\n", tr.branch, tr.branches, forms[0]);
    for (step, form) in tr.steps.iter().zip(&forms[1..]) {
        let _ = writeln!(out, "  =>{} at {}: {form}", step.rule, step.position);
    }
    out.push_str(if tr.is_ground() { "ground\n" } else { "stuck\n" });
    out
}

pub fn trace_json(tr: &DerivationTrace) -> Value {
    let forms = tr.rendered_forms();
    let steps: Vec<Value> = tr
        .steps
        .iter()
        .zip(&forms[1..])
        .map(|(s, f)| {
            json!({
                "rule": s.rule,
                "state": s.state.to_string(),
                "input_node": s.input_node.to_string(),
                "position": s.position.to_string(),
                "form": f,
            })
        })
        .collect();
    json!({
        "input": tr.input.to_string(),
        "branch": tr.branch,
        "branches": tr.branches,
        "start": forms[0],
        "steps": steps,
        "outcome": if tr.is_ground() { "ground" } else { "stuck" },
    })
}

/// Sentential forms as nodes, rule applications as labeled edges.
pub fn trace_dot(tr: &DerivationTrace) -> String {
    let forms = tr.rendered_forms();
    let mut out = String::from("digraph trace {\n  rankdir=TB;\n  node [shape=box];\n");
    for (i, f) in forms.iter().enumerate() {
        let _ = writeln!(out, "  f{i} [label={}];", quote(f));
    }
    for (i, s) in tr.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "  f{i} -> f{} [label={}];",
            i + 1,
            quote(&format!("{} at {}", s.rule, s.position))
        );
    }
    out.push_str("}\n");
    out
}

pub fn verdict_text(v: &Verdict) -> String {
    let mut out = match &v.counterexample {
        None => format!("functional up to size {}\n", v.bound),
        Some(ce) => format!(
            "not functional: input {} has outputs {} and {}\n",
            ce.input, ce.outputs[0], ce.outputs[1]
        ),
    };
    let _ = writeln!(
        out,
        "checked {} inputs, {} outputs",
        v.stats.inputs_checked, v.stats.outputs_computed
    );
    out
}

/// The counterexample input with edges to its two outputs, or a single
/// node stating the bound.
pub fn verdict_dot(v: &Verdict) -> String {
    match &v.counterexample {
        Some(ce) => trees_dot(&ce.input, &ce.outputs.iter().cloned().collect()),
        None => format!(
            "digraph verdict {{\n  verdict [shape=box, label={}];\n}}\n",
            quote(&format!("functional up to size {}", v.bound))
        ),
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

pub fn reports_text(reports: &[BuildReport]) -> String {
    reports
        .iter()
        .map(|r| {
            format!(
                "{}: states {} -> {}, rules {} -> {}, {} us\n",
                r.construction, r.states_before, r.states_after, r.rules_before, r.rules_after, r.elapsed_micros
            )
        })
        .collect()
}

pub fn reports_json(reports: &[BuildReport]) -> Value {
    serde_json::to_value(reports).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_m;
    use crate::fixtures;
    use crate::trace::trace_derivation;

    #[test]
    fn machine_text_reparses() {
        let t = fixtures::example1();
        let ws = Workspace::parse(&machine_text("T", &t)).unwrap();
        assert_eq!(ws.transducer("T").unwrap(), &t);
    }

    #[test]
    fn json_carries_annotations_structurally() {
        let (c1, c2) = fixtures::copying();
        let mut ws = Workspace::new();
        ws.insert_lookahead("M", build_m(&c1, &c2).unwrap()).unwrap();
        let v = workspace_json(&ws);
        let items = v["items"].as_array().unwrap();
        assert_eq!(items[0]["name"], "M_la");
        assert_eq!(items[1]["kind"], "lookahead");
        assert_eq!(items[1]["la"], "M_la");
        let rule = &items[1]["rules"][0];
        assert!(rule["lookahead"].is_array());
        assert_eq!(machine_json("T", &fixtures::example1())["rules"][0]["number"], 1);
        assert!(workspace_dot(&ws).contains("cluster_M_la"));
    }

    #[test]
    fn dot_outputs_are_digraphs() {
        let t = fixtures::example1();
        let dot = machine_dot("T", &t);
        assert!(dot.starts_with("digraph \"T\" {"));
        assert_eq!(dot.matches("shape=point").count(), 4);
        let tr = trace_derivation(&t, &Tree::parse("a(a(e))").unwrap(), 0).unwrap();
        let dot = trace_dot(&tr);
        assert_eq!(dot.matches(" -> ").count(), 6);
        assert!(dot.contains("\"q0(a(a(e)))\""));
    }

    #[test]
    fn quoting_escapes() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
