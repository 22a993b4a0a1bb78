//! Command-line interface. [`main_with`] runs one command against the
//! machines defined in the given `.ttc` files.
//!
//! Exit status: 0 on success, 1 when a functionality check finds a
//! counterexample, 2 on any error.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::constructions::{
    build_hat_t1, build_m_report, build_product_n, compose_linear_nondeleting, decompose_la, domain_automaton,
    p_construction, reduce_chain_report, BuildReport,
};
use crate::decision::{chain_outputs, check_functional_bounded, decide_functionality, Verdict};
use crate::error::{Error, Result};
use crate::random::random_chain;
use crate::render;
use crate::text::{Item, Workspace};
use crate::trace::trace_derivation;
use crate::transducer::{translate, translate_la, Transducer};
use crate::tree::Tree;

#[derive(Debug, Parser)]
#[command(name = "ttc", version, about = "Top-down tree transducers and their compositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Args)]
struct Common {
    /// Definition files (`.ttc`), loaded in order into one workspace.
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Pair {
    /// First transducer.
    #[arg(long)]
    t1: Option<String>,
    /// Second transducer.
    #[arg(long)]
    t2: Option<String>,
    /// A two-stage chain, instead of --t1 and --t2.
    #[arg(long)]
    chain: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Translate a tree with a transducer, look-ahead transducer or chain.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
    },
    /// Domain automaton `A` of a transducer.
    Domaut {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: String,
    },
    /// `T̂1`: the first transducer restricted to outputs the second accepts.
    Hat {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
    },
    /// Product `N` of two transducers; with --triples, the product of
    /// `T̂1` and the second transducer over states `(q,S,q')` with `q' ∈ S`.
    Product {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        triples: bool,
    },
    /// Look-ahead transducer `M` (and its automaton `M_la`).
    BuildM {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
    },
    /// Split a look-ahead transducer into a relabeling `R` and a transducer
    /// `T`. Either names a look-ahead machine or builds `M` from a pair.
    DecomposeLa {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: Option<String>,
        #[command(flatten)]
        pair: Pair,
    },
    /// Single transducer equivalent to a pair whose second stage is linear
    /// and nondeleting.
    Fuse {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
    },
    /// Shorten a chain of length at least 3 by one stage.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chain: String,
    },
    /// Bounded functionality check of a chain, transducer or look-ahead
    /// transducer.
    Check {
        #[command(flatten)]
        common: Common,
        /// Chain or machine name.
        #[arg(long, alias = "machine")]
        chain: String,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        /// Check the chain directly instead of reducing it to `M` first.
        #[arg(long)]
        direct: bool,
    },
    /// One derivation of a transducer on a tree.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        input: String,
        /// Index of the derivation in depth-first order.
        #[arg(long, default_value_t = 0)]
        branch: usize,
    },
    /// Random small transducer chain, as used by the property tests.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        stages: usize,
    },
}

/// Runs the command line `args` (program name first). Results go to `out`
/// or the `--output` file, diagnostics to `err`.
pub fn main_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(cli.command, err) {
        Ok((text, output, code)) => match output {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    2
                }
            },
            None => {
                let _ = out.write_all(text.as_bytes());
                code
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn load(files: &[PathBuf], err: &mut dyn Write) -> Result<Workspace> {
    let mut ws = Workspace::new();
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| Error::Io(format!("{}: {e}", f.display())))?;
        ws.extend(&text)
            .map_err(|e| Error::Io(format!("{}: {e}", f.display())))?;
    }
    for w in ws.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(ws)
}

fn pair(ws: &Workspace, p: &Pair) -> Result<(Transducer, Transducer)> {
    match (&p.t1, &p.t2, &p.chain) {
        (Some(a), Some(b), None) => Ok((ws.transducer(a)?.clone(), ws.transducer(b)?.clone())),
        (None, None, Some(c)) => {
            let chain = ws.chain(c)?;
            match chain.stages() {
                [a, b] => Ok((a.clone(), b.clone())),
                s => Err(Error::InvalidMachine(format!(
                    "chain {c} has {} stages, expected 2",
                    s.len()
                ))),
            }
        }
        _ => Err(Error::InvalidMachine("give either --t1 and --t2, or --chain".into())),
    }
}

fn parse_input(s: &str) -> Result<Tree> {
    Tree::parse(s)
}

fn render_ws(ws: &Workspace, format: FormatArg) -> String {
    match format {
        FormatArg::Text => ws.to_text(),
        FormatArg::Json => pretty(&render::workspace_json(ws)),
        FormatArg::Dot => render::workspace_dot(ws),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn single(name: &str, t: Transducer) -> Workspace {
    let mut ws = Workspace::new();
    ws.insert_transducer(name, t).expect("fresh workspace");
    ws
}

type Outcome = (String, Option<PathBuf>, i32);

fn run(command: Command, err: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Run { common, machine, input } => {
            let ws = load(&common.files, err)?;
            let s = parse_input(&input)?;
            let outs: BTreeSet<Tree> = match ws.get(&machine) {
                Some(Item::Transducer(t)) => translate(t, &s)?,
                Some(Item::Lookahead { machine: m, .. }) => translate_la(m, &s)?,
                Some(Item::Chain { chain, .. }) => chain_outputs(chain, &s)?,
                None => return Err(Error::UnknownName(machine)),
            };
            let text = match common.format {
                FormatArg::Text => render::trees_text(&outs),
                FormatArg::Json => pretty(&json!({ "input": s.to_string(), "outputs": render::trees_json(&outs) })),
                FormatArg::Dot => render::trees_dot(&s, &outs),
            };
            Ok((text, common.output, 0))
        }
        Command::Domaut { common, machine } => {
            let ws = load(&common.files, err)?;
            let a = domain_automaton(ws.transducer(&machine)?);
            Ok((render_ws(&single("A", a), common.format), common.output, 0))
        }
        Command::Hat { common, pair: p } => {
            let ws = load(&common.files, err)?;
            let (t1, t2) = pair(&ws, &p)?;
            let hat = build_hat_t1(&t1, &t2)?;
            Ok((render_ws(&single("hat", hat), common.format), common.output, 0))
        }
        Command::Product {
            common,
            pair: p,
            triples,
        } => {
            let ws = load(&common.files, err)?;
            let (t1, t2) = pair(&ws, &p)?;
            let n = if triples {
                build_product_n(&build_hat_t1(&t1, &t2)?, &t2)?
            } else {
                p_construction(&t1, &t2)?
            };
            Ok((render_ws(&single("N", n), common.format), common.output, 0))
        }
        Command::BuildM { common, pair: p } => {
            let ws = load(&common.files, err)?;
            let (t1, t2) = pair(&ws, &p)?;
            let (m, report) = build_m_report(&t1, &t2)?;
            let mut out = Workspace::new();
            out.insert_lookahead("M", m)?;
            let text = match common.format {
                FormatArg::Json => {
                    let mut v = render::workspace_json(&out);
                    v["reports"] = render::reports_json(&[report]);
                    pretty(&v)
                }
                f => render_ws(&out, f),
            };
            Ok((text, common.output, 0))
        }
        Command::DecomposeLa {
            common,
            machine,
            pair: p,
        } => {
            let ws = load(&common.files, err)?;
            let m = match machine {
                Some(name) => ws.lookahead(&name)?.clone(),
                None => {
                    let (t1, t2) = pair(&ws, &p)?;
                    build_m_report(&t1, &t2)?.0
                }
            };
            let (r, t) = decompose_la(&m)?;
            let mut out = Workspace::new();
            out.insert_transducer("R", r)?;
            out.insert_transducer("T", t)?;
            out.insert_chain("RT", vec!["R".into(), "T".into()])?;
            Ok((render_ws(&out, common.format), common.output, 0))
        }
        Command::Fuse { common, pair: p } => {
            let ws = load(&common.files, err)?;
            let (t1, t2) = pair(&ws, &p)?;
            let fused = compose_linear_nondeleting(&t1, &t2)?;
            Ok((render_ws(&single("fused", fused), common.format), common.output, 0))
        }
        Command::Reduce { common, chain } => {
            let ws = load(&common.files, err)?;
            let names = match ws.get(&chain) {
                Some(Item::Chain { stages, .. }) => stages.clone(),
                Some(_) => return Err(Error::UnknownName(format!("{chain} is not a chain"))),
                None => return Err(Error::UnknownName(chain)),
            };
            let (reduced, reports) = reduce_chain_report(&ws.chain(&chain)?)?;
            let out = reduced_workspace(&names, reduced.stages(), &format!("{chain}_reduced"))?;
            let text = match common.format {
                FormatArg::Json => {
                    let mut v = render::workspace_json(&out);
                    v["reports"] = render::reports_json(&reports);
                    pretty(&v)
                }
                f => render_ws(&out, f),
            };
            Ok((text, common.output, 0))
        }
        Command::Check {
            common,
            chain,
            max_size,
            direct,
        } => {
            if max_size == 0 {
                return Err(Error::InvalidMachine("--max-size must be at least 1".into()));
            }
            let ws = load(&common.files, err)?;
            let (verdict, reports): (Verdict, Vec<BuildReport>) = match ws.get(&chain) {
                Some(Item::Lookahead { machine, .. }) => (check_functional_bounded(machine, max_size)?, Vec::new()),
                Some(_) => {
                    let c = ws.chain(&chain)?;
                    if direct {
                        (check_functional_bounded(&c, max_size)?, Vec::new())
                    } else {
                        decide_functionality(&c, max_size)?
                    }
                }
                None => return Err(Error::UnknownName(chain)),
            };
            let text = match common.format {
                FormatArg::Text => render::verdict_text(&verdict) + &render::reports_text(&reports),
                FormatArg::Json => {
                    let mut v = render::verdict_json(&verdict);
                    v["reports"] = render::reports_json(&reports);
                    pretty(&v)
                }
                FormatArg::Dot => render::verdict_dot(&verdict),
            };
            let code = if verdict.is_functional() { 0 } else { 1 };
            Ok((text, common.output, code))
        }
        Command::Trace {
            common,
            machine,
            input,
            branch,
        } => {
            let ws = load(&common.files, err)?;
            let tr = trace_derivation(ws.transducer(&machine)?, &parse_input(&input)?, branch)?;
            let text = match common.format {
                FormatArg::Text => render::trace_text(&tr),
                FormatArg::Json => pretty(&render::trace_json(&tr)),
                FormatArg::Dot => render::trace_dot(&tr),
            };
            Ok((text, common.output, 0))
        }
        Command::Gen { common, seed, stages } => {
            if stages == 0 {
                return Err(Error::EmptyChain);
            }
            let chain = random_chain(seed, stages);
            let names: Vec<String> = (1..=stages).map(|i| format!("R{i}")).collect();
            let mut out = Workspace::new();
            for (n, t) in names.iter().zip(chain.stages()) {
                out.insert_transducer(n, t.clone())?;
            }
            out.insert_chain(&format!("random{seed}"), names)?;
            Ok((render_ws(&out, common.format), common.output, 0))
        }
    }
}

/// Workspace for a reduced chain: the untouched stages keep their names,
/// the two new stages are called `fused` and `T` (primed if taken).
fn reduced_workspace(original: &[String], stages: &[Transducer], chain: &str) -> Result<Workspace> {
    let keep = stages.len() - 2;
    let mut names: Vec<String> = original[..keep].to_vec();
    for base in ["fused", "T"] {
        let mut n = base.to_string();
        while names.contains(&n) || n == chain {
            n.push('\'');
        }
        names.push(n);
    }
    let mut ws = Workspace::new();
    let mut added = BTreeSet::new();
    for (n, t) in names.iter().zip(stages) {
        if added.insert(n.clone()) {
            ws.insert_transducer(n, t.clone())?;
        }
    }
    ws.insert_chain(chain, names)?;
    Ok(ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("ttc")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn run_translates() {
        let (code, out, _) = call(&["run", &fixture("example1.ttc"), "--machine", "T", "--input", "a(a(e))"]);
        assert_eq!(code, 0);
        assert_eq!(out, "f(a(e),f(e,e))\n");
    }

    #[test]
    fn errors_exit_with_two() {
        let (code, _, err) = call(&["run", &fixture("example1.ttc"), "--machine", "X", "--input", "e"]);
        assert_eq!(code, 2);
        assert!(err.contains("unknown name X"));
        let (code, _, _) = call(&["frobnicate"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("trace"));
    }
}
