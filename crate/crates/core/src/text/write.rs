use std::fmt::Write;

use super::{Item, Workspace};
use crate::transducer::{render_rule, Transducer};

pub(super) fn workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (i, (name, item)) in ws.items().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Transducer(t) => machine(&mut out, "transducer", name, t, None),
            Item::Lookahead { la, machine: m } => machine(&mut out, "lookahead", name, m.base(), Some(la)),
            Item::Chain { stages, .. } => {
                let _ = writeln!(out, "chain {name} {{ {} }}", stages.join(", "));
            }
        }
    }
    out
}

/// One machine block; `la` names the look-ahead automaton, if any.
pub(crate) fn machine(out: &mut String, kind: &str, name: &str, t: &Transducer, la: Option<&str>) {
    let _ = writeln!(out, "{kind} {name} {{");
    let _ = writeln!(out, "  input {}", t.input());
    let _ = writeln!(out, "  output {}", t.output());
    let _ = writeln!(out, "  initial {}", t.initial());
    let states: Vec<String> = t.states().iter().map(|q| q.to_string()).collect();
    let _ = writeln!(out, "  states {{ {} }}", states.join(", "));
    if let Some(la) = la {
        let _ = writeln!(out, "  la {la}");
    }
    out.push_str("  rules {\n");
    for r in t.rules() {
        let k = t.input().rank(&r.symbol).unwrap_or(0);
        let _ = writeln!(out, "    {};", render_rule(r, k));
    }
    out.push_str("  }\n}\n");
}
