//! The `wapgraph` command line.
//!
//! Exit status: 0 on success, 1 on a property violation or a failed replay, 2 on a
//! configuration error. Diagnostics go to standard error, artifacts to `--out`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::amalgamation::{
    build_refutation_tree, check_ap, check_cap_witness, find_amalgam_with, find_cap_witness, refute_wap_at,
    verify_wap_witness, AmalgamationProblem, BoundedRefuter, Budget, Refuter, SearchOptions, Strategy,
};
use crate::cert::{AmalgamRecord, Envelope, Payload, RefutationSet, WapBundle};
use crate::classes::ForbiddenClass;
use crate::constructions::{c4_nonwap_gadgets, sweep_diam2, wap_witness_full, GadgetRefuter, PENTAGON_ORDER};
use crate::enumerate::all_graphs_in_class;
use crate::error::{Error, Result};
use crate::graph::{named, Graph};
use crate::io;
use crate::limits::{extension_property_report, ChainConfig, ExtensionChain, Guide, LEDGER_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wapgraph", version, about = "Forbidden-subgraph graph classes and amalgamation checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Graph6,
    Dot,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Brute,
    Pruned,
    Propagate,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Pruned => Strategy::Pruned,
            StrategyArg::Propagate => Strategy::Propagate,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Class membership of each graph in a graph6 input.
    Member {
        #[arg(long)]
        class: String,
        /// graph6 file, or a graph6 string.
        #[arg(long = "in")]
        input: String,
    },
    /// The isomorphism classes of a given order in a class.
    Enumerate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        order: usize,
    },
    /// Solves one amalgamation problem.
    Amalgamate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Images of the base vertices in the left graph, comma separated (default: prefix).
        #[arg(long)]
        left_map: Option<String>,
        #[arg(long)]
        right_map: Option<String>,
        #[arg(long)]
        cross_edges: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Bounded AP sweep over all triples with |B|, |C| <= order.
    CheckAp {
        #[arg(long)]
        class: String,
        #[arg(long)]
        order: usize,
    },
    /// Bounded CAP check of a witness, or a search for one.
    CheckCap {
        #[arg(long)]
        class: String,
        #[arg(long)]
        base: String,
        /// Check this witness; without it, search extensions of the base.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, default_value_t = 1)]
        witness_extra: usize,
        #[arg(long, default_value_t = 1)]
        ext_extra: usize,
    },
    /// Bounded WAP check of a witness, or refutation of every witness up to a bound.
    CheckWap {
        #[arg(long)]
        class: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, default_value_t = 0)]
        witness_extra: usize,
        #[arg(long, default_value_t = 1)]
        ext_extra: usize,
    },
    /// The windmill WAP witness for a base.
    WindmillWitness {
        #[arg(long)]
        base: String,
    },
    /// The C4 non-WAP gadget pair for a witness whose first five vertices form a pentagon.
    C4Gadget {
        #[arg(long)]
        witness: String,
    },
    /// A complete binary tree of pairwise non-amalgamable extensions.
    RefutationTree {
        #[arg(long, default_value = "c4free")]
        class: String,
        /// Default: the pentagon.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Extension bound for classes other than c4free.
        #[arg(long, default_value_t = 2)]
        ext_extra: usize,
    },
    /// Sweep of C4-free diameter-2 graphs without a dominating vertex.
    PropDiam2 {
        #[arg(long)]
        order: usize,
    },
    /// Builds, resumes or diagnoses an extension chain checkpointed in `--out`.
    Chain {
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Largest base order for demands.
        #[arg(long, default_value_t = 2)]
        max_base: usize,
        /// Extend each stage to its windmill witness before realizing the next demand
        #[arg(long)]
        windmill_guide: bool,
        /// Continue the chain checkpointed in `--out`.
        #[arg(long)]
        resume: bool,
        /// Report the extension property of the last stage for sets up to this size.
        #[arg(long)]
        diagnose: Option<usize>,
    },
    /// Re-verifies certificate bundles or chain checkpoints.
    Replay {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

struct Ctx<'a> {
    common: Common,
    stdout: &'a mut (dyn Write + Send),
    stderr: &'a mut (dyn Write + Send),
}

impl Ctx<'_> {
    fn out_dir(&self) -> Option<&Path> {
        self.common.out.as_deref()
    }

    fn save(&mut self, name: &str, env: &Envelope) -> Result<()> {
        if let Some(dir) = self.common.out.clone() {
            let path = env.write(&dir, name)?;
            writeln!(self.stderr, "wrote {}", path.display())?;
        }
        Ok(())
    }

    fn emit_graph(&mut self, g: &Graph, marks: &BTreeMap<String, usize>) -> Result<()> {
        match self.common.format {
            Format::Dot => write!(self.stdout, "{}", io::to_dot(g, marks))?,
            Format::Json => writeln!(self.stdout, "{}", serde_json::json!({ "graph6": io::to_graph6(g), "marks": marks }))?,
            Format::Graph6 | Format::Text => writeln!(self.stdout, "{}", io::to_graph6(g))?,
        }
        Ok(())
    }

    fn emit_json(&mut self, env: &Envelope) -> Result<()> {
        if self.common.format == Format::Json {
            write!(self.stdout, "{}", env.to_json()?)?;
        }
        Ok(())
    }
}

/// A graph6 file holding one graph, or a graph6 string.
fn read_graph(arg: &str) -> Result<Graph> {
    let mut graphs = read_graphs(arg)?;
    if graphs.len() != 1 {
        return Err(Error::InvalidParameter(format!("`{arg}` holds {} graphs, expected one", graphs.len())));
    }
    Ok(graphs.remove(0))
}

fn read_graphs(arg: &str) -> Result<Vec<Graph>> {
    let path = Path::new(arg);
    if path.exists() {
        io::read_graph6_file(path)
    } else {
        io::parse_graph6_lines(arg)
    }
}

fn parse_map(s: &Option<String>, n: usize) -> Result<Vec<usize>> {
    match s {
        None => Ok((0..n).collect()),
        Some(s) => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::MalformedMap(format!("`{t}` is not a vertex"))))
            .collect(),
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_VIOLATION,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    run(cli, stdout, stderr)
}

pub fn run(cli: Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut ctx = Ctx { common: cli.common, stdout, stderr };
    match pool.install(|| dispatch(&mut ctx, cli.command)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.stderr, "error: {e}");
            exit_for(&e)
        }
    }
}

fn class(spec: &str) -> Result<ForbiddenClass> {
    ForbiddenClass::parse(spec)
}

fn dispatch(ctx: &mut Ctx, command: Command) -> Result<i32> {
    match command {
        Command::Member { class: c, input } => {
            let k = class(&c)?;
            let graphs = read_graphs(&input)?;
            for g in graphs {
                let m = k.member(&g);
                match ctx.common.format {
                    Format::Json => writeln!(ctx.stdout, "{}", serde_json::json!({ "graph6": io::to_graph6(&g), "member": m }))?,
                    _ => writeln!(ctx.stdout, "{m}")?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Enumerate { class: c, order } => {
            let k = class(&c)?;
            let cat = all_graphs_in_class(&k, order)?;
            let lines: Vec<String> = cat.members().iter().map(io::to_graph6).collect();
            match ctx.common.format {
                Format::Json => writeln!(ctx.stdout, "{}", serde_json::to_string_pretty(&cat.manifest(k.name()))?)?,
                Format::Dot => {
                    for g in cat.members() {
                        write!(ctx.stdout, "{}", io::to_dot(g, &BTreeMap::new()))?;
                    }
                }
                Format::Graph6 | Format::Text => {
                    for l in &lines {
                        writeln!(ctx.stdout, "{l}")?;
                    }
                }
            }
            if let Some(dir) = ctx.out_dir() {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("catalog_{order}.g6"));
                io::write_graph6_file(&path, cat.members())?;
                let manifest = serde_json::to_string_pretty(&cat.manifest(k.name()))?;
                fs::write(dir.join(format!("catalog_{order}.json")), format!("{manifest}\n"))?;
                writeln!(ctx.stderr, "wrote {}", path.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::Amalgamate { class: c, base, left, right, left_map, right_map, cross_edges, strategy } => {
            let k = class(&c)?;
            let base = read_graph(&base)?;
            let (left, right) = (read_graph(&left)?, read_graph(&right)?);
            let lm = parse_map(&left_map, base.order())?;
            let rm = parse_map(&right_map, base.order())?;
            let p = AmalgamationProblem::new(base, left, lm, right, rm)?;
            let opts = SearchOptions { allow_cross_edges: cross_edges, strategy: strategy.into(), ..SearchOptions::default() };
            let (found, stats) = find_amalgam_with(&p, &k, &opts)?;
            writeln!(ctx.stderr, "search nodes: {}", stats.nodes)?;
            let env = Envelope::new(Payload::Amalgam(AmalgamRecord::new(&k, &p, cross_edges, found.clone())));
            ctx.save("amalgam", &env)?;
            match (&found, ctx.common.format) {
                (_, Format::Json) => ctx.emit_json(&env)?,
                (Some(a), _) => ctx.emit_graph(&a.result, &BTreeMap::new())?,
                (None, _) => writeln!(ctx.stdout, "none")?,
            }
            Ok(if found.is_some() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::CheckAp { class: c, order } => {
            let k = class(&c)?;
            let r = check_ap(&k, order)?;
            writeln!(ctx.stderr, "{} triples checked, {} without amalgam", r.triples_checked, r.failures.len())?;
            let passed = r.passed();
            let env = Envelope::new(Payload::ApReport(r));
            ctx.save("ap_report", &env)?;
            if ctx.common.format == Format::Json {
                ctx.emit_json(&env)?;
            } else {
                writeln!(ctx.stdout, "{}", if passed { "passed" } else { "failed" })?;
            }
            Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::CheckCap { class: c, base, witness, witness_extra, ext_extra } => {
            let k = class(&c)?;
            let base = read_graph(&base)?;
            let budget = Budget::default();
            let cert = match witness {
                Some(w) => Some(check_cap_witness(&k, &base, &read_graph(&w)?, ext_extra, budget)?),
                None => find_cap_witness(&k, &base, witness_extra, ext_extra, budget)?,
            };
            let Some(cert) = cert else {
                writeln!(ctx.stdout, "no CAP witness within {witness_extra} added vertices")?;
                return Ok(EXIT_VIOLATION);
            };
            let ok = cert.verified();
            let env = Envelope::new(Payload::Wap(WapBundle { certificate: cert.clone(), budget }));
            ctx.save("cap_certificate", &env)?;
            if ctx.common.format == Format::Json {
                ctx.emit_json(&env)?;
            } else {
                writeln!(ctx.stdout, "{} {}", if ok { "verified" } else { "refuted" }, io::to_graph6(&cert.witness))?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::CheckWap { class: c, base, witness, witness_extra, ext_extra } => {
            let k = class(&c)?;
            let base = read_graph(&base)?;
            let budget = Budget::default();
            if let Some(w) = witness {
                let cert = verify_wap_witness(&k, &base, &read_graph(&w)?, ext_extra, budget)?;
                let ok = cert.verified();
                let env = Envelope::new(Payload::Wap(WapBundle { certificate: cert, budget }));
                ctx.save("wap_certificate", &env)?;
                if ctx.common.format == Format::Json {
                    ctx.emit_json(&env)?;
                } else {
                    writeln!(ctx.stdout, "{}", if ok { "verified" } else { "refuted" })?;
                }
                return Ok(if ok { EXIT_OK } else { EXIT_VIOLATION });
            }
            let refuter = BoundedRefuter { ext_extra, budget };
            match refute_wap_at(&k, &base, witness_extra, &refuter)? {
                Some(refutations) => {
                    let n = refutations.len();
                    let set = RefutationSet { class: k.name().to_string(), base, witness_extra, refutations };
                    let env = Envelope::new(Payload::RefutationSet(set));
                    ctx.save("wap_refutations", &env)?;
                    if ctx.common.format == Format::Json {
                        ctx.emit_json(&env)?;
                    } else {
                        writeln!(ctx.stdout, "refuted: all {n} witnesses fail")?;
                    }
                    Ok(EXIT_VIOLATION)
                }
                None => {
                    writeln!(ctx.stdout, "some witness survives")?;
                    Ok(EXIT_OK)
                }
            }
        }
        Command::WindmillWitness { base } => {
            let w = wap_witness_full(&read_graph(&base)?)?;
            let marks: BTreeMap<String, usize> = w
                .anchors
                .anchors
                .iter()
                .flat_map(|(a, vs)| vs.iter().enumerate().map(move |(i, &v)| (format!("v{}[{a}]", i + 1), v)))
                .collect();
            let env = Envelope::new(Payload::WindmillWitness(w.clone()));
            ctx.save("windmill_witness", &env)?;
            if ctx.common.format == Format::Json {
                ctx.emit_json(&env)?;
            } else {
                ctx.emit_graph(&w.witness, &marks)?;
            }
            Ok(EXIT_OK)
        }
        Command::C4Gadget { witness } => {
            let g = c4_nonwap_gadgets(&read_graph(&witness)?)?;
            if let Err(msg) = g.check() {
                return Err(Error::Internal(format!("gadget check failed: {msg}")));
            }
            let env = Envelope::new(Payload::C4Gadget(g.clone()));
            ctx.save("c4_gadget", &env)?;
            match ctx.common.format {
                Format::Json => ctx.emit_json(&env)?,
                Format::Dot => write!(ctx.stdout, "{}", io::to_dot(&g.c, &g.named_vertices()))?,
                _ => writeln!(ctx.stdout, "{}\n{}", io::to_graph6(&g.b), io::to_graph6(&g.c))?,
            }
            Ok(EXIT_OK)
        }
        Command::RefutationTree { class: c, base, depth, ext_extra } => {
            let k = class(&c)?;
            let base = match base {
                Some(b) => read_graph(&b)?,
                None => named::cycle(PENTAGON_ORDER)?,
            };
            let gadget = GadgetRefuter;
            let bounded = BoundedRefuter { ext_extra, budget: Budget::default() };
            let refuter: &dyn Refuter = if k.name() == "c4free" { &gadget } else { &bounded };
            let tree = build_refutation_tree(&k, &base, refuter, depth)?;
            writeln!(ctx.stderr, "{} nodes, {} leaves", tree.nodes.len(), tree.leaves())?;
            let env = Envelope::new(Payload::RefutationTree(tree.clone()));
            ctx.save("refutation_tree", &env)?;
            if ctx.common.format == Format::Json {
                ctx.emit_json(&env)?;
            } else {
                for (key, g) in &tree.nodes {
                    writeln!(ctx.stdout, "{:<width$} {}", if key.is_empty() { "-" } else { key }, io::to_graph6(g), width = depth.max(1))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::PropDiam2 { order } => {
            let r = sweep_diam2(order)?;
            let passed = r.passed();
            let env = Envelope::new(Payload::Diam2Sweep(r.clone()));
            ctx.save("diam2_sweep", &env)?;
            if ctx.common.format == Format::Json {
                ctx.emit_json(&env)?;
            } else {
                for s in &r.per_order {
                    writeln!(
                        ctx.stdout,
                        "order {}: {} graphs, {} meet the hypotheses ({} strongly regular, {} two-valency)",
                        s.order, s.graphs, s.hypotheses_met, s.strongly_regular, s.two_valency
                    )?;
                }
                writeln!(ctx.stdout, "{} counterexamples, {} unclassified", r.counterexamples.len(), r.unclassified.len())?;
            }
            Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Chain { class: c, steps, max_base, windmill_guide, resume, diagnose } => {
            let dir = ctx
                .common
                .out
                .clone()
                .ok_or_else(|| Error::InvalidParameter("`chain` needs --out for its checkpoint".into()))?;
            let mut chain = if resume {
                ExtensionChain::resume(&dir)?
            } else {
                class(&c)?;
                let mut cfg = ChainConfig::new(&c, ctx.common.seed);
                cfg.max_base_order = max_base;
                if windmill_guide {
                    cfg.guide = Guide::WindmillWitness;
                }
                let initial = if windmill_guide { Graph::empty(1) } else { Graph::empty(0) };
                ExtensionChain::new(cfg, initial)?
            };
            chain.run(steps)?;
            chain.checkpoint(&dir)?;
            let (early, realized) = chain.realized_before(chain.steps / 2, chain.config.max_base_order);
            writeln!(
                ctx.stdout,
                "steps {} stages {} order {} demands {} pending {} early-realized {realized}/{early}",
                chain.steps,
                chain.stages.len(),
                chain.last().order(),
                chain.demands.len(),
                chain.pending()
            )?;
            if let Some(kp) = diagnose {
                let g = chain.last();
                let r = extension_property_report(g, kp);
                let k = chain.class()?;
                let mut forbidden = 0;
                for (us, _) in &r.failures {
                    let mut b = g.clone();
                    let y = b.add_vertex(0)?;
                    for &u in us {
                        b.add_edge(u, y);
                    }
                    forbidden += !k.member(&b) as usize;
                }
                writeln!(
                    ctx.stdout,
                    "extension property (k = {kp}): {}/{} = {:.4}, {forbidden} of {} failures leave the class",
                    r.satisfied,
                    r.total,
                    r.fraction(),
                    r.failures.len()
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Replay { paths } => {
            let mut targets = Vec::new();
            for path in paths {
                if path.is_dir() && !path.join(LEDGER_FILE).exists() {
                    let mut files: Vec<PathBuf> =
                        fs::read_dir(&path)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
                    files.retain(|f| f.extension().is_some_and(|x| x == "json"));
                    files.sort();
                    targets.extend(files);
                } else {
                    targets.push(path);
                }
            }
            targets.retain(|p| !p.to_string_lossy().ends_with(".meta.json"));
            let mut all_ok = true;
            for path in targets {
                let ok = if path.is_dir() {
                    ExtensionChain::resume(&path).is_ok()
                } else {
                    let env = Envelope::read(&path)?;
                    env.replay()?
                };
                writeln!(ctx.stdout, "{}: {}", path.display(), if ok { "ok" } else { "FAILED" })?;
                all_ok &= ok;
            }
            Ok(if all_ok { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_from(std::iter::once("wapgraph").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn member_and_enumerate() {
        let c5 = io::to_graph6(&named::cycle(5).unwrap());
        let (code, out, _) = run_args(&["member", "--class", "c4free", "--in", &c5]);
        assert_eq!((code, out.as_str()), (0, "true\n"));
        let (code, out, _) = run_args(&["enumerate", "--class", "all", "--order", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 11);
    }

    #[test]
    fn config_errors_exit_2() {
        assert_eq!(run_args(&["member", "--class", "nope", "--in", "D??"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["enumerate", "--class", "all", "--order", "12"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["c4-gadget", "--witness", "D??"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["--version"]).0, EXIT_OK);
    }

    #[test]
    fn violations_exit_1() {
        assert_eq!(run_args(&["check-ap", "--class", "linear-forests", "--order", "4"]).0, EXIT_VIOLATION);
        assert_eq!(run_args(&["check-ap", "--class", "c4free", "--order", "3"]).0, EXIT_OK);
    }
}
