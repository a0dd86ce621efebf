use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use equitower::axioms::{check_all, Axiom, AxiomConfig, AxiomReport};
use equitower::formula::{
    expand_schema, parse_formula, print_formula, BMode, Evaluator, ImplMap, TruncationParams,
    Valuation,
};
use equitower::io::{load_points, to_json, SpaceConfig, UniverseDoc};
use equitower::sample::SamplerKind;
use equitower::verify::{verify_layer, VerifyConfig};
use equitower::vogt::{run_vogt_experiment, VogtConfig};
use equitower::{
    close_for_formula, close_layer, Error, NormSpec, RelationId, Result, Space, Universe,
};

/// Betweenness from equidistance: evaluate the definitional tower over
/// finite universes and check it against coordinate models of normed planes.
///
/// Exit status: 0 true or pass, 1 false or fail, 2 error.
#[derive(Parser, Debug)]
#[command(name = "equitower", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on named points.
    Eval(EvalArgs),
    /// Print the one-step definition of a relation.
    Expand(ExpandArgs),
    /// Compare a relation's formula with its oracle on sampled instances.
    VerifyLayer(VerifyArgs),
    /// Check the geometric axioms on sampled instantiations.
    CheckAxioms(AxiomArgs),
    /// Test maps for preservation of equidistance and betweenness.
    Vogt(VogtArgs),
    /// Build the witness and refuter universe for a relation instance.
    Closure(ClosureArgs),
    /// Print the version.
    Version,
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    /// Norm: l1, l2, linf or lp:<p> with p a rational greater than 1.
    #[arg(long, default_value = "l2")]
    norm: String,
    /// Scalar backend: exact or float.
    #[arg(long, default_value = "exact")]
    backend: String,
    /// Mixed absolute/relative tolerance of the float backend.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

impl SpaceArgs {
    fn space(&self) -> Result<Space> {
        let backend = equitower::io::parse_backend(&self.backend)?;
        let tol = if backend == equitower::Backend::Exact {
            0.0
        } else {
            self.tolerance
        };
        Space::new(NormSpec::parse(&self.norm)?, backend, tol)
    }
}

#[derive(Args, Debug, Clone)]
struct TruncArgs {
    /// Countable conjunctions stop at K.
    #[arg(long = "depth-K", default_value_t = 6)]
    depth_k: u32,
    /// Countable disjunctions stop at N (raised per query unless --fixed-n).
    #[arg(long = "depth-N", default_value_t = 16)]
    depth_n: u32,
    /// Refinement levels of the betweenness chain.
    #[arg(long = "depth-B", default_value_t = 3)]
    depth_b: u32,
    /// Longest chain for the inequality relation.
    #[arg(long, default_value_t = 8)]
    chain_max: u32,
    /// Refinement depth of the midpoint sequence.
    #[arg(long, default_value_t = 2)]
    phi_depth: u32,
    /// Use N as given instead of ceil(2^K d(b,c)/d(a,b)) + 2 per GAMMA query.
    #[arg(long)]
    fixed_n: bool,
    /// Betweenness schema: repaired, or strict for consecutive chain pairs only.
    #[arg(long, default_value = "repaired")]
    mode: String,
}

impl TruncArgs {
    fn params(&self) -> Result<TruncationParams> {
        let t = TruncationParams {
            k: self.depth_k,
            n: self.depth_n,
            b_depth: self.depth_b,
            chain_max: self.chain_max,
            phi_depth: self.phi_depth,
            adaptive_n: !self.fixed_n,
        };
        t.validate()?;
        Ok(t)
    }

    fn mode(&self) -> Result<BMode> {
        BMode::parse(&self.mode)
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Formula text, or a file holding it.
    #[arg(value_name = "FORMULA", required_unless_present = "formula")]
    text: Option<String>,
    /// Formula text or file (alternative to the positional argument).
    #[arg(long, conflicts_with = "text")]
    formula: Option<String>,
    /// Points file or inline list such as "0,0; 1,0; 3,0". Named records bind
    /// by name, unnamed points bind to free variables in order of occurrence.
    #[arg(long)]
    points: Option<String>,
    /// Universe file, or auto to close the bound points for every relation atom.
    #[arg(long, default_value = "auto")]
    universe: String,
    /// Relation implementation override REL=oracle or REL=formula; repeatable.
    /// By default relations named in the formula expand and lower ones use
    /// their oracles, matching the auto universe.
    #[arg(long = "impl", value_name = "REL=IMPL")]
    impls: Vec<String>,
    /// Print the witnesses and refuters found at the top level.
    #[arg(long)]
    explain: bool,
    /// Write the evaluation report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    /// Relation, e.g. B, GAMMA, PSI:2:3, DELTA:4.
    #[arg(long)]
    relation: String,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Relation to verify, e.g. GAMMA, BETA:3, PSI:2:1.
    #[arg(long)]
    relation: String,
    /// Number of sampled instances.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Seed of the sampling generator.
    #[arg(long)]
    seed: u64,
    /// Instance sampler: default, collinear or midpoint-triples.
    #[arg(long, default_value = "default")]
    sampler: String,
    /// Write the layer report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct AxiomArgs {
    /// Comma-separated axiom letters.
    #[arg(long, default_value = "a,b,c,d,e,f,g,h,i")]
    axioms: String,
    /// Instantiations per universal axiom.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Constructions per existential axiom (b, g, i).
    #[arg(long, default_value_t = 1000)]
    witness_samples: usize,
    /// Seed of the sampling generator.
    #[arg(long)]
    seed: u64,
    /// Longest chain tried for the Archimedean axiom.
    #[arg(long, default_value_t = 64)]
    chain_cap: u32,
    /// Evaluate the inequality formula on every n-th sample.
    #[arg(long, default_value_t = 10)]
    formula_stride: usize,
    /// Write the axiom reports here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct VogtArgs {
    /// Experiment configuration file (JSON). Without it, the suites below run
    /// in the space given by --norm and --backend.
    #[arg(long)]
    maps: Option<PathBuf>,
    /// Generated map families: similarities, non-similarities.
    #[arg(long, default_value = "similarities,non-similarities")]
    suite: String,
    /// Seed; required without --maps, overrides the file's seed with it.
    #[arg(long)]
    seed: Option<u64>,
    /// Quadruples per map.
    #[arg(long, default_value_t = 10_000)]
    quadruples: usize,
    /// Segment triples per map.
    #[arg(long, default_value_t = 10_000)]
    triples: usize,
    /// Write the summary here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
}

#[derive(Args, Debug)]
struct ClosureArgs {
    /// Relation whose instance is closed, e.g. DELTA:4.
    #[arg(long)]
    relation: String,
    /// Points file or inline list, in argument order.
    #[arg(long)]
    points: String,
    /// Write the universe here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Serialize)]
struct EvalReport {
    formula: String,
    space: SpaceConfig,
    trunc: TruncationParams,
    b_mode: &'static str,
    bindings: Vec<(String, equitower::io::PointRecord)>,
    universe_size: usize,
    value: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    explain: Vec<String>,
}

#[derive(Serialize)]
struct AxiomSuiteReport {
    pass: bool,
    reports: Vec<AxiomReport>,
}

/// Semantic outcome of a command.
enum Outcome {
    Pass,
    Fail,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn read_text_arg(arg: &str) -> Result<String> {
    let p = std::path::Path::new(arg);
    if p.is_file() {
        Ok(std::fs::read_to_string(p)?)
    } else {
        Ok(arg.to_string())
    }
}

/// Writes `value` to `out`, or to stdout when no path is given.
fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let text = to_json(value)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<Outcome> {
    let space = a.space.space()?;
    let trunc = a.trunc.params()?;
    let src = read_text_arg(
        a.text
            .as_deref()
            .or(a.formula.as_deref())
            .unwrap_or_default(),
    )?;
    let f = parse_formula(&src)?;
    let mut impls = ImplMap::for_formula(&f);
    for o in &a.impls {
        impls.apply_override(o)?;
    }

    let points = match &a.points {
        Some(arg) => load_points(arg, space.backend)?,
        None => Vec::new(),
    };
    let free = f.free_vars();
    let mut valuation = Valuation::new();
    let mut bindings = Vec::new();
    let named = points.iter().any(|(n, _)| n.is_some());
    if named {
        for (n, p) in points {
            let n = n.ok_or_else(|| Error::Format("mix of named and unnamed points".into()))?;
            valuation.insert(n, p);
        }
    } else {
        if points.len() != free.len() {
            return Err(Error::Format(format!(
                "{} points given for {} free variables ({})",
                points.len(),
                free.len(),
                free.join(" ")
            )));
        }
        valuation.extend(free.iter().cloned().zip(points.into_iter().map(|(_, p)| p)));
    }
    for v in &free {
        let p = valuation.get(v).ok_or_else(|| Error::Unbound(v.clone()))?;
        bindings.push((v.clone(), equitower::io::PointRecord::from_point(p)));
    }

    let universe = if a.universe == "auto" {
        close_for_formula(&space, &f, &valuation, &trunc)?
    } else {
        let doc: UniverseDoc = serde_json::from_str(&read_text_arg(&a.universe)?)
            .map_err(|e| Error::Format(format!("universe file: {e}")))?;
        let declared = doc.space.to_space()?;
        if declared.backend != space.backend || declared.norm != space.norm {
            return Err(Error::InvalidSpace(format!(
                "universe file is for {}, command line asks for {}",
                declared.label(),
                space.label()
            )));
        }
        doc.to_universe(&space)?
    };

    let mut ev = Evaluator::new(&space, &universe, trunc, impls)
        .with_mode(a.trunc.mode()?)
        .with_explain(a.explain);
    let value = ev.eval(&f, &valuation)?;
    let explain = if a.explain { ev.trace() } else { Vec::new() };
    println!("{value}");
    for line in &explain {
        println!("  {line}");
    }
    if a.out.is_some() {
        let report = EvalReport {
            formula: print_formula(&f),
            space: SpaceConfig::from_space(&space),
            trunc,
            b_mode: a.trunc.mode()?.name(),
            bindings,
            universe_size: universe.len(),
            value,
            explain,
        };
        emit(&report, &a.out)?;
    }
    Ok(value.into())
}

fn cmd_expand(a: &ExpandArgs) -> Result<Outcome> {
    let id: RelationId = a.relation.parse()?;
    let s = expand_schema(id, a.trunc.depth_b, a.trunc.mode()?)?;
    println!("({} {})", id, s.params.join(" "));
    println!("{}", print_formula(&s.body));
    Ok(Outcome::Pass)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let id: RelationId = a.relation.parse()?;
    let space = a.space.space()?;
    let cfg = VerifyConfig {
        samples: a.samples,
        seed: a.seed,
        trunc: a.trunc.params()?,
        mode: a.trunc.mode()?,
        sampler: SamplerKind::parse(&a.sampler)
            .ok_or_else(|| Error::Format(format!("unknown sampler {:?}", a.sampler)))?,
    };
    let report = verify_layer(id, &space, &cfg)?;
    emit(&report, &a.out)?;
    if a.out.is_some() {
        println!(
            "{id} {}: {}/{} agree, {} counterexamples",
            space.label(),
            report.agreements,
            report.samples,
            report.counterexamples.len()
        );
    }
    Ok(report.passed().into())
}

fn cmd_axioms(a: &AxiomArgs) -> Result<Outcome> {
    let space = a.space.space()?;
    let which: Vec<Axiom> = a
        .axioms
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Axiom::parse(s.trim()))
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for ax in which {
        let samples = if ax.existential() {
            a.witness_samples
        } else {
            a.samples
        };
        let mut cfg = AxiomConfig::new(samples, a.seed);
        cfg.chain_cap = a.chain_cap;
        cfg.formula_stride = a.formula_stride;
        cfg.trunc = a.trunc.params()?;
        reports.extend(check_all(&space, &cfg, &[ax])?);
    }
    let pass = reports.iter().all(|r| r.pass);
    if a.out.is_some() {
        for r in &reports {
            println!(
                "({}) {}: {} checks, {} violations{}",
                r.axiom.letter(),
                if r.pass { "pass" } else { "FAIL" },
                r.checks,
                r.violations.len(),
                if r.witnesses > 0 {
                    format!(", {} witnesses", r.witnesses)
                } else {
                    String::new()
                }
            );
        }
    }
    emit(&AxiomSuiteReport { pass, reports }, &a.out)?;
    Ok(pass.into())
}

fn cmd_vogt(a: &VogtArgs) -> Result<Outcome> {
    let cfg = match &a.maps {
        Some(path) => {
            let mut cfg: VogtConfig = serde_json::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            cfg
        }
        None => VogtConfig {
            seed: a
                .seed
                .ok_or_else(|| Error::Precondition("--seed is required without --maps".into()))?,
            quadruples: a.quadruples,
            triples: a.triples,
            spaces: vec![SpaceConfig::from_space(&a.space.space()?)],
            suites: a
                .suite
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            maps: Vec::new(),
        },
    };
    let summary = run_vogt_experiment(&cfg)?;
    emit(&summary, &a.out)?;
    if a.out.is_some() {
        let bad = summary
            .entries
            .iter()
            .filter(|e| !e.met_expectation)
            .count();
        println!(
            "{} maps, {} unexpected, weak Vogt consistent: {}",
            summary.entries.len(),
            bad,
            summary.weak_vogt_consistent
        );
    }
    Ok(summary.passed().into())
}

fn cmd_closure(a: &ClosureArgs) -> Result<Outcome> {
    let id: RelationId = a.relation.parse()?;
    let space = a.space.space()?;
    let pts: Vec<_> = load_points(&a.points, space.backend)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let u: Universe = close_layer(&space, id, &pts, &a.trunc.params()?)?;
    emit(&UniverseDoc::from_universe(&u), &a.out)?;
    if let Some(path) = &a.out {
        println!("{} points written to {}", u.len(), path.display());
    }
    Ok(Outcome::Pass)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.cmd {
        Command::Eval(a) => cmd_eval(&a),
        Command::Expand(a) => cmd_expand(&a),
        Command::VerifyLayer(a) => cmd_verify(&a),
        Command::CheckAxioms(a) => cmd_axioms(&a),
        Command::Vogt(a) => cmd_vogt(&a),
        Command::Closure(a) => cmd_closure(&a),
        Command::Version => {
            println!("equitower {}", env!("CARGO_PKG_VERSION"));
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::Cli;

    #[test]
    fn help_lists_every_flag_with_its_default() {
        let mut root = Cli::command();
        root.build();
        for sub in root.get_subcommands() {
            let help = sub.clone().render_long_help().to_string();
            for arg in sub.get_arguments() {
                if let Some(long) = arg.get_long() {
                    assert!(
                        help.contains(&format!("--{long}")),
                        "{} --help misses --{long}",
                        sub.get_name()
                    );
                }
                if matches!(
                    arg.get_action(),
                    clap::ArgAction::SetTrue | clap::ArgAction::Help | clap::ArgAction::Version
                ) {
                    continue;
                }
                for d in arg.get_default_values() {
                    let shown = format!("[default: {}]", d.to_string_lossy());
                    assert!(
                        help.contains(&shown),
                        "{} --help misses {shown} for {:?}",
                        sub.get_name(),
                        arg.get_id()
                    );
                }
            }
        }
    }

    #[test]
    fn sampling_commands_require_a_seed() {
        for cmd in [
            vec!["equitower", "verify-layer", "--relation", "GAMMA"],
            vec!["equitower", "check-axioms"],
        ] {
            assert!(<Cli as clap::Parser>::try_parse_from(cmd).is_err());
        }
    }
}
