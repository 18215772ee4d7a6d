//! `swnet`: build, verify and bound switching networks for directed connectivity.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input,
//! 3 a resource limit was hit (retry with another seed or larger limits).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swnet::bounds::{
    audit_useful_vertex, crossover_report, eval_bound, exact_overlap_tail, exact_two_sided_tail, in_first_branch, mc_useful_prob,
    overlap_probability, to_f64, useful_prob_bound, BoundKind, BoundParams, FamilySampler,
};
use swnet::constructions::thm2::Thm2Mode;
use swnet::constructions::{build_thm1_network, build_thm2_network, Thm2Options};
use swnet::graph::{enumerate_family, Edge, FamilyFile, InputGraph, Limits, VertexSet, VertexSpace};
use swnet::knowledge::{build_basic_ck, compute_sc, CkDescription, KnowledgeSet, LabelUniverse};
use swnet::network::{accepts, is_complete_monotone, is_sound_monotone};
use swnet::{Error, SwitchingNetwork};

#[derive(Parser, Debug)]
#[command(name = "swnet", version, about = "Switching networks for directed connectivity")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for written files.
    #[arg(long, global = true, env = "SWNET_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the augmented family of the path with k interior vertices.
    GenInputs(GenInputs),
    /// Build a network and write it with a manifest.
    #[command(subcommand)]
    Build(Build),
    /// Check a network file for acceptance, soundness and completeness.
    Verify(Verify),
    /// Print sc of the path with k interior vertices.
    Sc {
        #[arg(long = "path-k")]
        path_k: usize,
    },
    /// Evaluate the closed-form bounds.
    Bounds(BoundsArgs),
    /// Sample the probability that K_X is useful.
    McUseful(McUseful),
    /// Exact overlap probabilities and the probability bound.
    ExactUseful(ExactUseful),
    /// Check that every accepting path of a certain-knowledge network passes a useful vertex.
    AuditCk(AuditCk),
    /// Tabulate the upper and lower bounds with k = 2^ceil(sqrt(lg N)).
    Crossover(CrossoverArgs),
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Ground-set size N (including s and t).
    #[arg(long)]
    n: usize,
    /// Interior vertices of the base path.
    #[arg(long)]
    k: usize,
    /// Put every vertex outside V0 on the left (no right side).
    #[arg(long)]
    one_sided: bool,
}

#[derive(Args, Debug)]
struct GenInputs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Output file name inside the output directory.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Universe {
    Forward,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Constructive,
    Full,
}

#[derive(Subcommand, Debug)]
enum Build {
    /// G'(V, m): every K_V with |V| <= m.
    BasicCk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "forward")]
        labels: Universe,
    },
    /// Certain-knowledge network from random orderings.
    Thm1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Fourier-function network for augmentations of base graphs.
    Thm2 {
        #[arg(long)]
        n: usize,
        /// Base path interior size, used when no --base is given.
        #[arg(long)]
        k: Option<usize>,
        /// Base graph as comma-separated edges over s, t, u1..uk (repeatable).
        #[arg(long)]
        base: Vec<String>,
        /// Interior size of the --base graphs.
        #[arg(long)]
        base_k: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "constructive")]
        mode: Mode,
    },
}

#[derive(Args, Debug)]
struct Verify {
    #[arg(long)]
    network: PathBuf,
    /// Family file whose graphs must all be accepted.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Check soundness over every cut.
    #[arg(long)]
    sound: bool,
    /// Check that every graph with an s-t path is accepted.
    #[arg(long)]
    complete: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args, Debug)]
struct McUseful {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    m: usize,
    /// K is K_X for X the first x interior vertices.
    #[arg(long)]
    x: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExactUseful {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    x: usize,
}

#[derive(Args, Debug)]
struct AuditCk {
    #[arg(long)]
    network: PathBuf,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    m: usize,
}

#[derive(Args, Debug)]
struct CrossoverArgs {
    #[arg(long, default_value_t = 16)]
    from: u32,
    #[arg(long, default_value_t = 64)]
    to: u32,
    /// Tab-separated output instead of the aligned table.
    #[arg(long)]
    tsv: bool,
}

/// Why a command stopped.
enum Failure {
    Check(String),
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_resource_limit() {
            Failure::Resource(e.to_string())
        } else {
            match e {
                Error::InvalidTransition { .. } | Error::BoundViolation { .. } | Error::InvalidNetwork(_) => {
                    Failure::Check(e.to_string())
                }
                _ => Failure::Usage(e.to_string()),
            }
        }
    }
}

type Outcome = Result<(), Failure>;

fn space(n: usize) -> Result<VertexSpace, Failure> {
    Ok(VertexSpace::new(n)?)
}

fn write(dir: &Path, name: &str, text: &str) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<SwitchingNetwork, Failure> {
    Ok(SwitchingNetwork::from_text(&read(path)?)?)
}

fn gen_inputs(cli: &Cli, args: &GenInputs) -> Outcome {
    let f = &args.family;
    let s = space(f.n)?;
    let family = enumerate_family(&InputGraph::path(f.k)?, &s, true, !f.one_sided, &Limits::default())?;
    let name = format!("path{}-n{}{}", f.k, f.n, if f.one_sided { "-left" } else { "" });
    let file = FamilyFile::from_family(&name, &family);
    let out = args.out.clone().unwrap_or(format!("{name}.family"));
    println!("{} members", family.len());
    write(&cli.out_dir, &out, &file.to_text())
}

fn parse_base(text: &str, k: usize) -> Result<InputGraph, Failure> {
    let s = VertexSpace::with_interior(k)?;
    let edges = text
        .split(',')
        .map(|e| e.trim().parse::<Edge>().map_err(|m| Failure::Usage(format!("bad edge `{e}`: {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InputGraph::new(s, edges)?)
}

fn build(cli: &Cli, b: &Build) -> Outcome {
    let limits = Limits::default();
    match b {
        Build::BasicCk { n, m, labels } => {
            let s = space(*n)?;
            let universe = match labels {
                Universe::Forward => LabelUniverse::Forward,
                Universe::All => LabelUniverse::All,
            };
            let (net, _) = build_basic_ck(&s, *m, universe, &limits)?;
            let manifest = format!(
                "kind=basic-ck\nN={n}\nm={m}\nlabels={labels:?}\nvertices={}\nedges={}\n",
                net.vertex_count(),
                net.edges().len()
            );
            write(&cli.out_dir, "basic-ck.net", &net.to_text())?;
            write(&cli.out_dir, "basic-ck.manifest", &manifest)
        }
        Build::Thm1 { n, k, seed } => {
            let s = space(*n)?;
            let b = build_thm1_network(s, *k, *seed, &limits)?;
            let manifest = format!(
                "kind=thm1\nN={n}\nk={k}\nseed={seed}\nrounds={}\norderings={}\nfamily_size={}\nvertices={}\nedges={}\nsize_bound={}\n",
                b.rounds,
                b.orderings.len(),
                b.family_size,
                b.size(),
                b.network.edges().len(),
                b.bound
            );
            write(&cli.out_dir, "thm1.net", &b.network.to_text())?;
            write(&cli.out_dir, "thm1.manifest", &manifest)
        }
        Build::Thm2 { n, k, base, base_k, seed, mode } => {
            let s = space(*n)?;
            let bases = if base.is_empty() {
                let k = k.ok_or_else(|| Failure::Usage("give --k or at least one --base".into()))?;
                vec![InputGraph::path(k)?]
            } else {
                let bk = base_k.ok_or_else(|| Failure::Usage("--base needs --base-k".into()))?;
                base.iter().map(|t| parse_base(t, bk)).collect::<Result<_, _>>()?
            };
            let opts = Thm2Options {
                seed: *seed,
                mode: match mode {
                    Mode::Constructive => Thm2Mode::Constructive,
                    Mode::Full => Thm2Mode::Full,
                },
                limits,
            };
            let b = build_thm2_network(&bases, s, &opts)?;
            write(&cli.out_dir, "thm2.net", &b.network.to_text())?;
            write(&cli.out_dir, "thm2.manifest", &format!("kind=thm2\n{}", b.manifest()))
        }
    }
}

fn verify(v: &Verify) -> Outcome {
    let limits = Limits::default();
    let net = load_network(&v.network)?;
    let mut failures = Vec::new();
    if let Some(path) = &v.family {
        let family = FamilyFile::parse(&read(path)?)?;
        let rejected = family
            .graphs
            .iter()
            .map(|g| accepts(&net, g).map(|w| w.is_none()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|&r| r)
            .count();
        println!("acceptance: {} of {} family graphs accepted", family.graphs.len() - rejected, family.graphs.len());
        if rejected > 0 {
            failures.push(format!("{rejected} family graphs rejected"));
        }
    }
    if v.sound {
        match is_sound_monotone(&net, &limits)? {
            None => println!("soundness: no cut is bypassed"),
            Some(c) => {
                println!("soundness: FAILED, accepts the graph of all edges not crossing cut {}", c.index());
                failures.push("unsound".into());
            }
        }
    }
    if v.complete {
        match is_complete_monotone(&net, &limits)? {
            None => println!("completeness: every simple s-t path is accepted"),
            Some(g) => {
                println!("completeness: FAILED, rejects {}", g.edges().to_text());
                failures.push("incomplete".into());
            }
        }
    }
    if failures.is_empty() {
        println!("verify: PASS");
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

fn bounds(a: &BoundsArgs) -> Outcome {
    let compute_m = || -> Result<usize, Failure> { Ok(compute_sc(&[InputGraph::path(a.k)?], &Limits::default())?) };
    let m = match a.m {
        Some(m) => m,
        None => compute_m()?,
    };
    let p = BoundParams::new(a.n, a.k, m)?;
    println!("N={} k={} m={m}", a.n, a.k);
    for (name, kind) in [("thm1", BoundKind::Thm1), ("thm2", BoundKind::Thm2), ("thm3", BoundKind::Thm3)] {
        match eval_bound(kind, p) {
            Ok(v) => {
                let vacuous = if kind == BoundKind::Thm3 && v.log2 <= 0.0 { "  (vacuous)" } else { "" };
                println!("{name}\t{}\tlog2={:.4}{vacuous}", v.exact, v.log2);
            }
            Err(e) => println!("{name}\tn/a ({e})"),
        }
    }
    Ok(())
}

fn mc_useful(a: &McUseful) -> Outcome {
    let f = &a.family;
    let s = space(f.n)?;
    if a.x > s.interior_count() {
        return Err(Failure::Usage(format!("x = {} exceeds the interior size", a.x)));
    }
    let k_set = KnowledgeSet::from_vertex_set(&s, VertexSet::full(a.x));
    let sampler = FamilySampler {
        interior: s.interior_count(),
        k: f.k,
        allow_right: !f.one_sided,
    };
    let est = mc_useful_prob(&k_set, sampler, a.m, a.samples, a.seed)?;
    println!("estimate\t{:.6}\nstderr\t{:.6}\nsamples\t{}", est.mean, est.stderr, est.samples);
    let exact = if f.one_sided {
        exact_overlap_tail(a.x, f.k, a.m, f.n)?
    } else {
        exact_two_sided_tail(a.x, f.k, a.m, f.n)?
    };
    let exact = to_f64(&exact);
    let z = if est.stderr > 0.0 { (est.mean - exact) / est.stderr } else { 0.0 };
    println!("exact\t{exact:.6}\nz\t{z:.3}");
    Ok(())
}

fn exact_useful(a: &ExactUseful) -> Outcome {
    let p = BoundParams::new(a.n, a.k, a.m)?;
    for y in 0..=a.x.min(a.k) {
        let py = overlap_probability(a.x, y, a.k, a.n)?;
        println!("p({y})\t{py}\t{:.6e}", to_f64(&py));
    }
    let tail = exact_overlap_tail(a.x, a.k, a.m, a.n)?;
    println!("tail\t{tail}\t{:.6e}", to_f64(&tail));
    let first = in_first_branch(a.x, p);
    println!("branch\t{}", if first { "x >= k + m lg N (bound N^-m)" } else { "x < k + m lg N" });
    match useful_prob_bound(p) {
        Ok(b) => println!("bound\t{:.6e}", to_f64(&b)),
        Err(e) => println!("bound\tn/a ({e})"),
    }
    Ok(())
}

fn audit_ck(a: &AuditCk) -> Outcome {
    let net = load_network(&a.network)?;
    let d = CkDescription::from_annotations(&net)
        .ok_or_else(|| Failure::Usage("network has no knowledge-set annotations".into()))?;
    let f = &a.family;
    let s = space(f.n)?;
    let family = enumerate_family(&InputGraph::path(f.k)?, &s, true, !f.one_sided, &Limits::default())?;
    let (mut audited, mut skipped, mut bad) = (0, 0, 0);
    for m in &family.members {
        match audit_useful_vertex(&net, &d, m, a.m) {
            Ok(true) => audited += 1,
            Ok(false) => {
                audited += 1;
                bad += 1;
            }
            Err(Error::NotApplicable(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    println!("audited {audited} accepted members, {skipped} not accepted, {bad} bypass every useful vertex");
    if bad > 0 {
        return Err(Failure::Check(format!("{bad} members bypass every useful vertex")));
    }
    Ok(())
}

fn crossover(a: &CrossoverArgs) -> Outcome {
    if a.from > a.to {
        return Err(Failure::Usage("--from must not exceed --to".into()));
    }
    let lgs: Vec<u32> = (a.from..=a.to).collect();
    let r = crossover_report(&lgs)?;
    print!("{}", if a.tsv { r.to_tsv() } else { r.to_table() });
    let failures = r.check();
    if failures.is_empty() {
        println!("# checks: PASS (max upper exponent {:.4})", r.max_upper_exponent());
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::GenInputs(a) => gen_inputs(cli, a),
        Command::Build(b) => build(cli, b),
        Command::Verify(v) => verify(v),
        Command::Sc { path_k } => {
            println!("{}", compute_sc(&[InputGraph::path(*path_k)?], &Limits::default())?);
            Ok(())
        }
        Command::Bounds(a) => bounds(a),
        Command::McUseful(a) => mc_useful(a),
        Command::ExactUseful(a) => exact_useful(a),
        Command::AuditCk(a) => audit_ck(a),
        Command::Crossover(a) => crossover(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("resource limit: {m}");
            ExitCode::from(3)
        }
    }
}
