use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use raag::amalgam::ExtensionSpec;
use raag::centralizers::{self, RepresentativeSet};
use raag::discrimination::{bp_scan, separate_all};
use raag::graph::ChordalityWitness;
use raag::towers::{check_tree_edges, Tower, TowerSpec};
use raag::words;
use raag::zt_ice::{axiom_check, build_from_spec, IceSpec, ZtExpression};
use raag::{Error, Graph, Group};

#[derive(Parser)]
#[command(name = "raag", version, about = "Computations in coherent RAAGs, centraliser extensions and graph towers")]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget (largest m, exponent bound, ...).
    #[arg(long, global = true, default_value_t = 16)]
    budget: i64,
    /// Length bound for representatives and sampled words.
    #[arg(long, global = true, default_value_t = 6)]
    length_bound: usize,
    /// Truncation degree for chain steps that do not give one.
    #[arg(long, global = true, default_value_t = 2)]
    degree: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Chordality with a perfect elimination order or an induced cycle.
    CheckCoherent { graph: PathBuf },
    /// Normal form of a word.
    Normalize {
        graph: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Decide whether two words are equal (exit 1 if not).
    Equals {
        graph: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Centraliser of a word with its Z/O split.
    Centralizer {
        graph: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Canonical representatives up to --length-bound.
    Representatives { graph: PathBuf },
    /// Root and multiplicity of a word.
    Root {
        graph: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Block decomposition of a word.
    Blocks {
        graph: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Describe the extension given by an extension spec.
    Extend { spec: PathBuf },
    /// Reduced form of an element of an extension.
    Reduce {
        spec: PathBuf,
        #[arg(long)]
        element: String,
    },
    /// Find a retraction separating the elements from 1 and each other.
    Separate {
        spec: PathBuf,
        #[arg(long, required = true)]
        element: Vec<String>,
    },
    /// Look for a collapse of big powers along a tuple (up to --budget).
    BpScan {
        graph: PathBuf,
        #[arg(long, required = true, value_delimiter = ',')]
        tuple: Vec<String>,
    },
    /// Build an iterated centraliser extension chain.
    IceBuild { spec: PathBuf },
    /// Evaluate a Z[t] exponent expression and its specialisations.
    ZtEval {
        spec: PathBuf,
        #[arg(long)]
        expr: String,
        /// Values of t to specialise at.
        #[arg(long, value_delimiter = ',')]
        m: Vec<i64>,
    },
    /// Sample the exponential-group axioms on a chain.
    AxiomCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 5])]
        m: Vec<i64>,
    },
    /// Build a tower and describe its floors.
    TowerBuild { spec: PathBuf },
    /// Tree-of-groups decomposition of a tower.
    TowerTree {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = TreeFormat::Json)]
        format: TreeFormat,
    },
    /// Check the retractions, tree edges and quadratic embeddings of a tower.
    TowerCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Sample the class C axioms on a graph.
    ClassCCheck {
        graph: PathBuf,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Run with an empty representative set W.
        #[arg(long)]
        empty_w: bool,
    },
}

enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Chain spec with `--degree` filled in for steps that give none.
fn load_ice(path: &Path, degree: usize) -> Result<IceSpec, Failure> {
    let mut v: Value = load(path)?;
    if let Some(steps) = v.get_mut("steps").and_then(Value::as_array_mut) {
        for s in steps {
            if let Some(obj) = s.as_object_mut() {
                obj.entry("degree").or_insert(json!(degree));
            }
        }
    }
    serde_json::from_value(v).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn graph(path: &Path) -> Result<Graph, Failure> {
    Ok(Graph::from_json(&read(path)?)?)
}

fn chordal(path: &Path) -> Result<Graph, Failure> {
    let g = graph(path)?;
    if !g.is_chordal().0 {
        return Err(Error::NotChordal.into());
    }
    Ok(g)
}

fn names(g: &Graph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.name(v).to_string()).collect()
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::CheckCoherent { graph: p } => {
            let g = graph(p)?;
            Ok(match g.is_chordal() {
                (true, ChordalityWitness::Peo(peo)) => (json!({"chordal": true, "peo": names(&g, &peo)}), true),
                (_, ChordalityWitness::Cycle(c)) => (json!({"chordal": false, "cycle": names(&g, &c)}), false),
                (false, ChordalityWitness::Peo(_)) => unreachable!("a failed check carries a cycle"),
            })
        }
        Command::Normalize { graph: p, word } => {
            let g = graph(p)?;
            let n = words::word(&g, word)?;
            Ok((json!({"normal_form": n.format(&g), "word": n.to_json(&g), "length": n.len()}), true))
        }
        Command::Equals { graph: p, left, right } => {
            let g = graph(p)?;
            let eq = words::equals(&g, &words::parse_word(&g, left)?, &words::parse_word(&g, right)?);
            Ok((json!({"equal": eq}), eq))
        }
        Command::Centralizer { graph: p, word } => {
            let g = chordal(p)?;
            let w = words::word(&g, word)?;
            let c = centralizers::centralizer(&g, &w)?;
            let zo = centralizers::zo_split(&g, &w)?;
            let mut out = c.to_json(&g);
            out["zo"] = zo.to_json(&g);
            Ok((out, true))
        }
        Command::Representatives { graph: p } => {
            let g = chordal(p)?;
            Ok((centralizers::representatives(&g, cli.length_bound)?.to_json(&g), true))
        }
        Command::Root { graph: p, word } => {
            let g = graph(p)?;
            let (r, k) = words::root(&g, &words::word(&g, word)?)?;
            Ok((json!({"root": r.format(&g), "multiplicity": k}), true))
        }
        Command::Blocks { graph: p, word } => {
            let g = graph(p)?;
            let w = words::word(&g, word)?;
            let (w, conj) = words::cyclic_reduce(&g, &w);
            let blocks = words::block_decompose(&g, &w)?;
            let blocks: Vec<String> = blocks.iter().map(|b| b.format(&g)).collect();
            Ok((json!({"cyclically_reduced": w.format(&g), "conjugator": conj.format(&g), "blocks": blocks}), true))
        }
        Command::Extend { spec } => {
            let grp = load::<ExtensionSpec>(spec)?.build()?;
            Ok((grp.ext().expect("extension").describe(), true))
        }
        Command::Reduce { spec, element } => {
            let grp = load::<ExtensionSpec>(spec)?.build()?;
            let x = grp.parse(element)?;
            Ok((json!({"reduced": grp.format(&x), "element": grp.to_json(&x)}), true))
        }
        Command::Separate { spec, element } => {
            let grp = load::<ExtensionSpec>(spec)?.build()?;
            let xs = element.iter().map(|e| grp.parse(e)).collect::<raag::Result<Vec<_>>>()?;
            let cert = separate_all(&grp, &xs, cli.budget)?;
            Ok((cert.to_json(&grp.ext().expect("extension").base), true))
        }
        Command::BpScan { graph: p, tuple } => {
            let grp = Group::raag(chordal(p)?);
            let xs = tuple.iter().map(|e| grp.parse(e)).collect::<raag::Result<Vec<_>>>()?;
            let found = bp_scan(&grp, &xs, cli.budget)?;
            let ok = found.is_none();
            Ok((json!({"bound": cli.budget, "collapse": found}), ok))
        }
        Command::IceBuild { spec } => {
            let chain = build_from_spec(&load_ice(spec, cli.degree)?)?;
            Ok((chain.describe(), true))
        }
        Command::ZtEval { spec, expr, m } => {
            let chain = build_from_spec(&load_ice(spec, cli.degree)?)?;
            let e = ZtExpression::parse(expr)?;
            let top = chain.top();
            let v = chain.eval(&e)?;
            let base = &chain.levels[0];
            let spec: serde_json::Map<String, Value> =
                m.iter().map(|&k| (k.to_string(), json!(base.format(&chain.specialize(&v, k))))).collect();
            Ok((json!({"expression": e.to_string(), "value": top.format(&v), "specialized": spec}), true))
        }
        Command::AxiomCheck { spec, samples, m } => {
            let chain = build_from_spec(&load_ice(spec, cli.degree)?)?;
            let r = axiom_check(&chain, *samples, m, cli.seed);
            let ok = r.passed();
            Ok((serde_json::to_value(&r).expect("serialisable"), ok))
        }
        Command::TowerBuild { spec } => {
            let t = Tower::from_spec(&load::<TowerSpec>(spec)?)?;
            Ok((t.describe(), true))
        }
        Command::TowerTree { spec, format } => {
            let t = Tower::from_spec(&load::<TowerSpec>(spec)?)?;
            let tree = t.tree_decomposition()?;
            Ok(match format {
                TreeFormat::Json => (tree.to_json(), true),
                TreeFormat::Dot => (Value::String(tree.to_dot()), true),
            })
        }
        Command::TowerCheck { spec, samples } => {
            let t = Tower::from_spec(&load::<TowerSpec>(spec)?)?;
            let mut ok = true;
            let mut floors = Vec::new();
            for level in 1..=t.height() {
                let r = t.retraction_check(level)?;
                ok &= r.passed();
                let mut entry = json!({
                    "retraction": r,
                    "decomposition": t.floor_decomposition(level)?,
                });
                if t.floors[level - 1].group.is_none() {
                    let emb = t.embed_quadratic(level)?;
                    let checks = emb.spot_check(*samples, cli.length_bound, cli.budget, cli.seed)?;
                    let base = emb.tstar.ext().expect("extension").base.clone();
                    entry["embedding"] = json!({
                        "separated": checks.len(),
                        "certificates": checks.iter().map(|(w, c)| json!({"word": w, "certificate": c.to_json(&base)})).collect::<Vec<_>>(),
                    });
                    ok &= checks.len() == *samples;
                }
                floors.push(entry);
            }
            let tree = t.tree_decomposition()?;
            let tree_ok = tree.is_tree() && check_tree_edges(&t)?;
            ok &= tree_ok;
            Ok((json!({"height": t.height(), "floors": floors, "tree": tree_ok}), ok))
        }
        Command::ClassCCheck { graph: p, samples, empty_w } => {
            let g = chordal(p)?;
            let reps = if *empty_w {
                RepresentativeSet::empty(cli.length_bound)
            } else {
                centralizers::representatives(&g, cli.length_bound)?
            };
            let r = centralizers::check_class_c_axioms(&g, &reps, cli.length_bound, *samples, cli.seed)?;
            let ok = r.passed();
            Ok((serde_json::to_value(&r).expect("serialisable"), ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.budget < 1 {
        eprintln!("error: --budget must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok((v, ok)) => {
            let text = match v {
                Value::String(s) => s,
                v => serde_json::to_string_pretty(&v).expect("serialisable") + "\n",
            };
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
