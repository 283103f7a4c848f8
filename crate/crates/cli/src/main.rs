use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use chuflow::formula::{
    build_absolute_closure_sentence, build_compactness_sentence, classify, evaluate, free_variables, normalize,
    parse_formula, random_formula, Assignment, Compiled, Formula, FormulaClass,
};
use chuflow::graph::{graph_to_chu, orthoset_to_chu, Graph, Orthoset};
use chuflow::order::{
    poset_to_chu, rk_from_transform, rk_reduce_check, rk_reduce_check_partial, rk_reductions, transform_from_rk,
    ultrafilter_to_chu, Poset, Ultrafilter,
};
use chuflow::preservation::{
    check_absolute_closure, check_compactness, check_preservation, finite_satisfiability_oracle, search_counterexample,
    SearchOptions, SearchReport,
};
use chuflow::space::{admits_complements, biextensional_collapse};
use chuflow::topology::{basis_to_chu, cover_compactness_oracle, dense_union_oracle, topology_to_chu, Topology};
use chuflow::transform::{check_adjoint_labels, enumerate_transforms, is_kind, ChuTransform, RawTransform, TransformKind};
use chuflow::ChuSpace;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "chuflow", version, about = "Finite Chu spaces, flow formulas and preservation checks")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized operation.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print the syntactic classes of a formula.
    Classify { formula: PathBuf },
    /// Evaluate a formula on a space.
    Eval {
        space: PathBuf,
        formula: PathBuf,
        /// Variable binding `var=label`; the sort follows the formula.
        #[arg(long = "assign", value_name = "VAR=LABEL")]
        assign: Vec<String>,
    },
    /// Check that a transform file describes an adjoint pair.
    CheckTransform {
        transform: PathBuf,
        #[arg(long, default_value = "any")]
        kind: TransformKind,
    },
    /// List every transform between two spaces.
    EnumerateTransforms {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value = "any")]
        kind: TransformKind,
    },
    /// Check whether a transform preserves a formula.
    Preserve { formula: PathBuf, transform: PathBuf },
    /// Search all spaces within bounds for a transform violating the formula.
    Search {
        formula: PathBuf,
        #[arg(long, default_value = "any")]
        kind: TransformKind,
        #[arg(long, default_value_t = 2)]
        max_points: usize,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
        /// Worker threads; 0 picks the default.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// File of sentences, one per line, that every space must satisfy.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Decide <k,l>-compactness of a space or topology.
    Compactness(KlArgs),
    /// Decide <k,l>-absolute closure of a space or topology.
    Closure(KlArgs),
    /// Encode a structure as a Chu space.
    Encode {
        #[arg(value_enum)]
        structure: Structure,
        file: Option<PathBuf>,
        #[arg(long = "in", conflicts_with = "file")]
        input: Option<PathBuf>,
        /// Read the family as a basis rather than a topology.
        #[arg(long)]
        basis: bool,
    },
    /// Biextensional collapse of a space.
    Collapse { space: PathBuf },
    /// Rudin-Keisler reductions between ultrafilters.
    #[command(subcommand)]
    Rk(RkCommand),
    /// Print a random formula of a class.
    RandomFormula {
        #[arg(long, default_value = "flow")]
        class: FormulaClass,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Args)]
struct KlArgs {
    space: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Also evaluate the defining sentence and every applicable oracle, and
    /// fail only if they disagree.
    #[arg(long)]
    oracle: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Topology,
    Poset,
    Ultrafilter,
    Graph,
    Orthoset,
}

#[derive(Subcommand)]
enum RkCommand {
    /// Check a map `h: J -> I` given as `j=i` label pairs; a map defined on a
    /// member of V only is completed with the first index of I.
    Check {
        u: PathBuf,
        v: PathBuf,
        #[arg(long = "h", value_name = "J=I", required = true)]
        h: Vec<String>,
    },
    /// Find a reduction and the transform it induces.
    Witness { u: PathBuf, v: PathBuf },
    /// Read a reduction off a transform between the encodings.
    FromTransform { u: PathBuf, v: PathBuf, transform: PathBuf },
}

struct Out {
    format: Format,
}

impl Out {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize")),
            Format::Text => println!("{}", text()),
        }
    }

    fn verdict(&self, holds: bool, value: Value, text: impl FnOnce() -> String) -> ExitCode {
        self.emit(value, text);
        if holds {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("invalid input in {}", path.display()))
}

fn load_formula(path: &Path) -> Result<Formula> {
    let text = read(path)?;
    let f = parse_formula(text.trim()).with_context(|| format!("in {}", path.display()))?;
    Ok(normalize(&f))
}

enum Loaded {
    Space(ChuSpace),
    Topology(Topology),
}

impl Loaded {
    fn space(&self) -> ChuSpace {
        match self {
            Loaded::Space(s) => s.clone(),
            Loaded::Topology(t) => topology_to_chu(t),
        }
    }
}

/// A topology file is recognised by its `opens` key.
fn load_space_or_topology(path: &Path) -> Result<Loaded> {
    let value: Value = serde_json::from_str(&read(path)?).with_context(|| format!("invalid JSON in {}", path.display()))?;
    let what = || format!("invalid input in {}", path.display());
    if value.get("opens").is_some() {
        Ok(Loaded::Topology(serde_json::from_value(value).with_context(what)?))
    } else {
        Ok(Loaded::Space(serde_json::from_value(value).with_context(what)?))
    }
}

fn space_text(s: &ChuSpace) -> String {
    let width = s.points().iter().map(String::len).max().unwrap_or(0);
    let mut out = format!("{:width$} | {}", "", s.states().join(" "));
    for (i, p) in s.points().iter().enumerate() {
        let cells: Vec<String> = s
            .states()
            .iter()
            .enumerate()
            .map(|(j, a)| format!("{:>w$}", if s.related(i, j) { "1" } else { "0" }, w = a.chars().count()))
            .collect();
        out.push_str(&format!("\n{p:width$} | {}", cells.join(" ")));
    }
    out
}

fn transform_text(t: &ChuTransform) -> String {
    let pairs = |m: BTreeMap<String, String>| m.iter().map(|(k, v)| format!("{k}->{v}")).collect::<Vec<_>>().join(" ");
    format!("f: {}\ng: {}", pairs(t.f_labels()), pairs(t.g_labels()))
}

fn report_text(r: &SearchReport) -> String {
    match r {
        SearchReport::Preserved(c) => {
            let mut s = format!("PRESERVED spaces={} transforms={} assignments={}", c.spaces, c.transforms, c.assignments);
            if let Some(b) = c.bounds {
                s.push_str(&format!(" bounds={}x{}", b.max_points, b.max_states));
            }
            s
        }
        SearchReport::Violated(v) => {
            let bind = |vars: &[String], vals: &[String]| {
                vars.iter().zip(vals).map(|(a, b)| format!("{a}={b}")).collect::<Vec<_>>().join(" ")
            };
            format!(
                "VIOLATED\nsource:\n{}\ntarget:\n{}\n{}\nx: {}\nb: {}\nsource value {}, target value {}",
                space_text(v.transform.source()),
                space_text(v.transform.target()),
                transform_text(&v.transform),
                bind(&v.point_vars, &v.x),
                bind(&v.state_vars, &v.b),
                v.lhs,
                v.rhs
            )
        }
    }
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.split_once('=').ok_or_else(|| anyhow!("expected `name=value`, got `{s}`"))
}

fn classify_cmd(out: &Out, path: &Path) -> Result<ExitCode> {
    let f = load_formula(path)?;
    let names: Vec<&str> = classify(&f)?.into_iter().map(FormulaClass::name).collect();
    out.emit(json!({"formula": f.to_string(), "classes": names}), || names.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn eval_cmd(out: &Out, space: &Path, formula: &Path, assign: &[String]) -> Result<ExitCode> {
    let space = load_space_or_topology(space)?.space();
    let f = load_formula(formula)?;
    let fv = free_variables(&f);
    let mut asg = Assignment::new();
    for a in assign {
        let (var, label) = split_pair(a)?;
        if fv.points.contains(var) {
            asg = asg.point(var, label);
        } else if fv.states.contains(var) {
            asg = asg.state(var, label);
        } else {
            bail!("`{var}` is not a free variable of the formula");
        }
    }
    let value = evaluate(&space, &f, &asg)?;
    Ok(out.verdict(value, json!({"value": value}), || value.to_string()))
}

fn check_transform_cmd(out: &Out, path: &Path, kind: TransformKind) -> Result<ExitCode> {
    let raw: RawTransform = load(path)?;
    match check_adjoint_labels(raw.source, raw.target, &raw.f, &raw.g) {
        Ok(t) => {
            let ok = is_kind(&t, kind);
            let reason = (!ok).then(|| format!("adjoint but not {kind}"));
            Ok(out.verdict(ok, json!({"adjoint": true, "kind": kind, "valid": ok, "reason": reason}), || {
                reason.clone().unwrap_or_else(|| "true".into())
            }))
        }
        Err(e @ (chuflow::Error::NotAdjoint { .. } | chuflow::Error::IllTypedMap(_))) => {
            let reason = e.to_string();
            Ok(out.verdict(false, json!({"adjoint": false, "kind": kind, "valid": false, "reason": reason}), || {
                format!("false: {reason}")
            }))
        }
        Err(e) => Err(e.into()),
    }
}

fn enumerate_cmd(out: &Out, source: &Path, target: &Path, kind: TransformKind) -> Result<ExitCode> {
    let (s, t) = (load_space_or_topology(source)?.space(), load_space_or_topology(target)?.space());
    let ts = enumerate_transforms(&s, &t, kind)?;
    let maps: Vec<Value> = ts.iter().map(|t| json!({"f": t.f_labels(), "g": t.g_labels()})).collect();
    out.emit(json!({"count": ts.len(), "transforms": maps}), || {
        let mut lines = vec![format!("{} transforms", ts.len())];
        lines.extend(ts.iter().map(|t| transform_text(t).replace('\n', "  ")));
        lines.join("\n")
    });
    Ok(ExitCode::SUCCESS)
}

fn preserve_cmd(out: &Out, formula: &Path, transform: &Path) -> Result<ExitCode> {
    let f = load_formula(formula)?;
    let t: ChuTransform = load(transform)?;
    let report = check_preservation(&f, &t)?;
    Ok(out.verdict(report.is_preserved(), serde_json::to_value(&report)?, || report_text(&report)))
}

fn search_cmd(
    out: &Out,
    formula: &Path,
    opts: SearchOptions,
    theory: Option<&Path>,
) -> Result<ExitCode> {
    let f = load_formula(formula)?;
    let mut opts = opts;
    if let Some(path) = theory {
        let text = read(path)?;
        let sentences = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_formula(l).map(|s| normalize(&s)))
            .collect::<chuflow::Result<Vec<_>>>()
            .with_context(|| format!("in {}", path.display()))?;
        opts = opts.theory(sentences);
    }
    let report = search_counterexample(&f, &opts)?;
    Ok(out.verdict(report.is_preserved(), serde_json::to_value(&report)?, || report_text(&report)))
}

#[derive(Clone, Copy)]
enum Property {
    Compactness,
    Closure,
}

fn kl_cmd(out: &Out, args: &KlArgs, prop: Property) -> Result<ExitCode> {
    let loaded = load_space_or_topology(&args.space)?;
    let space = loaded.space();
    let (k, l) = (args.k, args.l);
    let checker = match prop {
        Property::Compactness => check_compactness(&space, k, l)?,
        Property::Closure => check_absolute_closure(&space, k, l)?,
    };
    if !args.oracle {
        return Ok(out.verdict(checker, json!({"value": checker}), || checker.to_string()));
    }
    let sentence = match prop {
        Property::Compactness => build_compactness_sentence(k, l)?,
        Property::Closure => build_absolute_closure_sentence(k, l)?,
    };
    let mut results = vec![("checker", checker), ("sentence", Compiled::new(&sentence).eval(&space, &[], &[]))];
    if let Loaded::Topology(t) = &loaded {
        results.push(match prop {
            Property::Compactness => ("cover", cover_compactness_oracle(t, k, l)),
            Property::Closure => ("dense_union", dense_union_oracle(t, k, l)),
        });
    }
    if matches!(prop, Property::Compactness) && admits_complements(&space) {
        results.push(("finite_satisfiability", finite_satisfiability_oracle(&space, k, l)?));
    }
    let agree = results.iter().all(|&(_, v)| v == checker);
    let mut obj: serde_json::Map<String, Value> = results.iter().map(|&(n, v)| (n.to_string(), json!(v))).collect();
    obj.insert("value".into(), json!(checker));
    obj.insert("agree".into(), json!(agree));
    Ok(out.verdict(agree, Value::Object(obj), || {
        let mut lines: Vec<String> = results.iter().map(|(n, v)| format!("{n}: {v}")).collect();
        lines.push(if agree { "agree".into() } else { "DISAGREE".into() });
        lines.join("\n")
    }))
}

#[derive(Deserialize)]
struct RawBasis {
    carrier: Vec<String>,
    #[serde(alias = "opens")]
    basis: Vec<Vec<String>>,
}

fn encode_cmd(out: &Out, structure: Structure, path: &Path, basis: bool) -> Result<ExitCode> {
    let space = match structure {
        Structure::Topology if basis => {
            let raw: RawBasis = load(path)?;
            basis_to_chu(raw.carrier, raw.basis)?
        }
        Structure::Topology => topology_to_chu(&load::<Topology>(path)?),
        Structure::Poset => poset_to_chu(&load::<Poset>(path)?),
        Structure::Ultrafilter => ultrafilter_to_chu(&load::<Ultrafilter>(path)?),
        Structure::Graph => graph_to_chu(&load::<Graph>(path)?),
        Structure::Orthoset => orthoset_to_chu(&load::<Orthoset>(path)?),
    };
    out.emit(serde_json::to_value(&space)?, || space_text(&space));
    Ok(ExitCode::SUCCESS)
}

fn collapse_cmd(out: &Out, path: &Path) -> Result<ExitCode> {
    let space = load_space_or_topology(path)?.space();
    let c = biextensional_collapse(&space);
    let label_map = |from: &[String], to: &[String], m: &[usize]| -> BTreeMap<String, String> {
        from.iter().zip(m).map(|(a, &i)| (a.clone(), to[i].clone())).collect()
    };
    let points = label_map(space.points(), c.space.points(), &c.point_map);
    let states = label_map(space.states(), c.space.states(), &c.state_map);
    out.emit(json!({"space": c.space, "point_map": points, "state_map": states}), || space_text(&c.space));
    Ok(ExitCode::SUCCESS)
}

fn index_in(labels: &[String], label: &str, what: &str) -> Result<usize> {
    labels.iter().position(|l| l == label).ok_or_else(|| anyhow!("unknown {what} `{label}`"))
}

fn h_labels(u: &Ultrafilter, v: &Ultrafilter, h: &[usize]) -> BTreeMap<String, String> {
    h.iter().enumerate().map(|(j, &i)| (v.index()[j].clone(), u.index()[i].clone())).collect()
}

fn rk_cmd(out: &Out, cmd: &RkCommand) -> Result<ExitCode> {
    match cmd {
        RkCommand::Check { u, v, h } => {
            let (u, v): (Ultrafilter, Ultrafilter) = (load(u)?, load(v)?);
            let mut map = BTreeMap::new();
            for pair in h {
                let (j, i) = split_pair(pair)?;
                let j = index_in(v.index(), j, "index of J")?;
                if map.insert(j, index_in(u.index(), i, "index of I")?).is_some() {
                    bail!("h is given twice at `{}`", v.index()[j]);
                }
            }
            let holds = if map.len() == v.index().len() {
                rk_reduce_check(&u, &v, &map.values().copied().collect::<Vec<_>>())?
            } else {
                if u.index().is_empty() {
                    bail!("I is empty");
                }
                rk_reduce_check_partial(&u, &v, &map, 0)?
            };
            Ok(out.verdict(holds, json!({"value": holds}), || holds.to_string()))
        }
        RkCommand::Witness { u, v } => {
            let (u, v): (Ultrafilter, Ultrafilter) = (load(u)?, load(v)?);
            match rk_reductions(&u, &v).into_iter().next() {
                Some(h) => {
                    let t = transform_from_rk(&u, &v, &h)?;
                    let labels = h_labels(&u, &v, &h);
                    let text = || {
                        let hs: Vec<String> = labels.iter().map(|(j, i)| format!("{j}->{i}")).collect();
                        format!("h: {}\n{}", hs.join(" "), transform_text(&t))
                    };
                    Ok(out.verdict(true, json!({"reducible": true, "h": labels, "transform": t}), text))
                }
                None => Ok(out.verdict(false, json!({"reducible": false}), || "no reduction".into())),
            }
        }
        RkCommand::FromTransform { u, v, transform } => {
            let (u, v): (Ultrafilter, Ultrafilter) = (load(u)?, load(v)?);
            let t: ChuTransform = load(transform)?;
            let h = rk_from_transform(&u, &v, &t)?;
            let holds = rk_reduce_check(&u, &v, &h)?;
            let labels = h_labels(&u, &v, &h);
            Ok(out.verdict(holds, json!({"h": labels, "reduces": holds}), || {
                labels.iter().map(|(j, i)| format!("{j}->{i}")).collect::<Vec<_>>().join(" ")
            }))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = Out { format: cli.format };
    match &cli.command {
        Command::Classify { formula } => classify_cmd(&out, formula),
        Command::Eval { space, formula, assign } => eval_cmd(&out, space, formula, assign),
        Command::CheckTransform { transform, kind } => check_transform_cmd(&out, transform, *kind),
        Command::EnumerateTransforms { source, target, kind } => enumerate_cmd(&out, source, target, *kind),
        Command::Preserve { formula, transform } => preserve_cmd(&out, formula, transform),
        Command::Search {
            formula,
            kind,
            max_points,
            max_states,
            jobs,
            theory,
        } => search_cmd(
            &out,
            formula,
            SearchOptions::new(*kind, *max_points, *max_states).jobs(*jobs),
            theory.as_deref(),
        ),
        Command::Compactness(args) => kl_cmd(&out, args, Property::Compactness),
        Command::Closure(args) => kl_cmd(&out, args, Property::Closure),
        Command::Encode {
            structure,
            file,
            input,
            basis,
        } => {
            let path = file.as_ref().or(input.as_ref()).ok_or_else(|| anyhow!("no input file given"))?;
            if *basis && !matches!(structure, Structure::Topology) {
                bail!("--basis applies to topologies only");
            }
            encode_cmd(&out, *structure, path, *basis)
        }
        Command::Collapse { space } => collapse_cmd(&out, space),
        Command::Rk(cmd) => rk_cmd(&out, cmd),
        Command::RandomFormula { class, depth } => {
            let f = random_formula(*class, *depth, cli.seed);
            out.emit(json!({"formula": f.to_string(), "seed": cli.seed}), || f.to_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
