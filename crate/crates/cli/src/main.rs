use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use anypro_core::bgp_sim::{Mode, Oracle, PrependConfig, Rule};
use anypro_core::fixtures;
use anypro_core::metrics::DEFAULT_CONVERGENCE_MINUTES;
use anypro_core::pipeline::{objective_rtt_sweep, run_pipeline, verify_suite, PipelineConfig, VerifyOptions};
use anypro_core::polling::DesiredMapping;
use anypro_core::topology::{
    build_testbed_fixture, generate_random_topology, generate_regional_topology, load_topology,
    save_topology, validate, Asn, IngressId, Topology,
};

#[derive(Parser)]
#[command(name = "anypro", version, about = "Anycast catchment optimization by AS-path prepending, against a simulated network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poll, derive constraints, resolve contradictions, solve and evaluate.
    Run(RunArgs),
    /// Correlate normalized objective with RTT over random configs.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Number of random configurations.
        #[arg(long, default_value_t = 10)]
        configs: usize,
    },
    /// Brute-force property checks on small random topologies.
    Verify {
        #[arg(long, default_value_t = 10)]
        topologies: usize,
        #[arg(long, default_value_t = 4)]
        max_ingresses: usize,
        #[arg(long, default_value_t = 3)]
        max: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Flat)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write a generated or built-in topology document.
    GenTopo {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Topology document.
    #[arg(long, conflicts_with_all = ["fixture", "gen", "regional"])]
    topo: Option<PathBuf>,
    /// Built-in topology.
    #[arg(long, value_enum, conflicts_with_all = ["gen", "regional"])]
    fixture: Option<FixtureArg>,
    /// Random topology: "n_ingresses,n_clients,n_intermediate,density".
    #[arg(long, conflicts_with = "regional")]
    gen: Option<String>,
    /// Latency-aligned regional topology: "n_regions,clients_per_region".
    #[arg(long)]
    regional: Option<String>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Desired mapping: a JSON object {client: ingress} or "nearest".
    #[arg(long, default_value = "nearest")]
    desired: String,
    /// Per-AS rules as a JSON list.
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long, default_value_t = 9)]
    max: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Flat)]
    mode: ModeArg,
    /// Enabled ingresses: ids or PoP names, comma separated. All when absent.
    #[arg(long, value_delimiter = ',')]
    enable: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Branch-and-bound node limit.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CONVERGENCE_MINUTES)]
    convergence_minutes: f64,
    #[arg(long, default_value = "anypro-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Flat,
    Gr,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Flat => Mode::Flat,
            ModeArg::Gr => Mode::GaoRexford,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureArg {
    Testbed,
    ThirdParty,
    MinMax,
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str, len: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != len {
        bail!("{what} expects {len} comma-separated values, got {spec:?}");
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| anyhow!("{what}: cannot parse {p:?}")))
        .collect()
}

/// Topology plus the rules that come with a built-in fixture.
fn load_source(src: &SourceArgs, seed: u64) -> Result<(Topology, Vec<Rule>)> {
    if let Some(path) = &src.topo {
        let text = fs::read_to_string(path).with_context(|| format!("topology: reading {}", path.display()))?;
        return Ok((load_topology(&text).context("topology")?, Vec::new()));
    }
    if let Some(f) = src.fixture {
        return Ok(match f {
            FixtureArg::Testbed => (build_testbed_fixture(), Vec::new()),
            FixtureArg::ThirdParty => fixtures::third_party_shift(),
            FixtureArg::MinMax => (fixtures::min_max_counterexample(), Vec::new()),
        });
    }
    if let Some(spec) = &src.gen {
        let v: Vec<f64> = parse_list(spec, "--gen", 4)?;
        let t = generate_random_topology(v[0] as usize, v[1] as usize, v[2] as usize, v[3], seed)
            .context("topology")?;
        return Ok((t, Vec::new()));
    }
    if let Some(spec) = &src.regional {
        let v: Vec<usize> = parse_list(spec, "--regional", 2)?;
        return Ok((generate_regional_topology(v[0], v[1], seed).context("topology")?, Vec::new()));
    }
    bail!("topology: one of --topo, --fixture, --gen or --regional is required")
}

fn enabled_mask(t: &Topology, tokens: &[String]) -> Result<Vec<bool>> {
    let n = t.n_ingresses();
    if tokens.is_empty() {
        return Ok(vec![true; n]);
    }
    let mut mask = vec![false; n];
    for tok in tokens.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if let Ok(id) = tok.parse::<IngressId>() {
            if id >= n {
                bail!("--enable: ingress {id} out of range (0..{n})");
            }
            mask[id] = true;
            continue;
        }
        let hits: Vec<IngressId> =
            t.ingresses.iter().filter(|i| i.pop.eq_ignore_ascii_case(tok)).map(|i| i.id).collect();
        if hits.is_empty() {
            bail!("--enable: no ingress id or PoP named {tok:?}");
        }
        for id in hits {
            mask[id] = true;
        }
    }
    if !mask.contains(&true) {
        bail!("--enable: empty subset");
    }
    Ok(mask)
}

fn desired_mapping(spec: &str, t: &Topology, enabled: &[bool]) -> Result<DesiredMapping> {
    if spec == "nearest" {
        return Ok(DesiredMapping::nearest_by_latency(t, enabled));
    }
    let text = fs::read_to_string(spec).with_context(|| format!("desired mapping: reading {spec}"))?;
    let desired: BTreeMap<Asn, IngressId> =
        serde_json::from_str(&text).with_context(|| format!("desired mapping: parsing {spec}"))?;
    Ok(DesiredMapping { desired })
}

/// Held for the lifetime of a run; one run per output directory.
struct OutputLock(PathBuf);

impl OutputLock {
    fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(".anypro.lock");
        fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .with_context(|| format!("output directory {} is locked by another run", dir.display()))?;
        Ok(OutputLock(path))
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn write(dir: &Path, name: &str, content: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
}

struct Prepared {
    topology: Topology,
    oracle: Oracle,
    desired: DesiredMapping,
    config: PipelineConfig,
}

fn prepare(args: &RunArgs) -> Result<Prepared> {
    let (topology, mut rules) = load_source(&args.source, args.seed)?;
    let violations = validate(&topology);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        bail!("topology: invalid: {}", list.join("; "));
    }
    if let Some(path) = &args.rules {
        let text = fs::read_to_string(path).with_context(|| format!("rules: reading {}", path.display()))?;
        rules = serde_json::from_str(&text).context("rules")?;
    }
    if args.max < 1 {
        bail!("--max must be at least 1");
    }
    let enabled = enabled_mask(&topology, &args.enable)?;
    let desired = desired_mapping(&args.desired, &topology, &enabled)?;
    let oracle = Oracle::with_rules(topology.clone(), args.mode.into(), rules);
    let config = PipelineConfig {
        max_prepend: args.max,
        enabled,
        node_budget: args.budget,
        convergence_cost_minutes: args.convergence_minutes,
    };
    Ok(Prepared { topology, oracle, desired, config })
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let p = prepare(args)?;
    let _lock = OutputLock::acquire(&args.out)?;
    info!(
        "{} ingresses, {} clients, MAX {}",
        p.topology.n_ingresses(),
        p.topology.clients.len(),
        p.config.max_prepend
    );
    let run = run_pipeline(&p.oracle, &p.desired, &p.config)?;
    let report = run.report(&p.oracle);
    let dir = &args.out;
    write(dir, "report.json", serde_json::to_string_pretty(&report)? + "\n")?;
    write(dir, "mappings.csv", run.mappings_csv())?;
    write(dir, "workflow.jsonl", run.workflow_jsonl())?;
    write(dir, "cdf_baseline.csv", run.baseline.evaluation.rtt.cdf_csv())?;
    write(dir, "cdf_final.csv", run.finalized.evaluation.rtt.cdf_csv())?;
    write(dir, "poll.json", serde_json::to_string_pretty(&run.poll)? + "\n")?;
    write(dir, "instance.json", run.final_instance.to_json() + "\n")?;
    write(dir, "instance.txt", run.final_instance.to_dimacs())?;
    let stage = |k: &str| report.stages[k].normalized_objective;
    println!(
        "normalized objective: all-zero {:.4}, preliminary {:.4}, finalized {:.4} (ceiling {:.4})",
        stage("all-zero"),
        stage("preliminary"),
        stage("finalized"),
        report.attainable_ceiling
    );
    println!(
        "contradictions {}, resolved {}, unresolvable {}; experiments {}, adjustments {}, simulated wall clock {} min",
        report.contradictions,
        report.resolved,
        report.unresolvable,
        report.budget.experiments,
        report.budget.adjustments,
        report.budget.simulated_wall_clock_minutes
    );
    println!("reports written to {}", dir.display());
    Ok(())
}

fn cmd_sweep(args: &RunArgs, configs: usize) -> Result<()> {
    let p = prepare(args)?;
    let _lock = OutputLock::acquire(&args.out)?;
    let run = run_pipeline(&p.oracle, &p.desired, &p.config)?;
    let optimized = PrependConfig {
        lengths: run.finalized.config.clone(),
        max_prepend: p.config.max_prepend,
        enabled: p.config.enabled.clone(),
    };
    let sweep = objective_rtt_sweep(&p.oracle, &p.desired, &optimized, configs, args.seed)?;
    write(&args.out, "sweep.csv", sweep.csv())?;
    write(&args.out, "sweep.json", serde_json::to_string_pretty(&sweep)? + "\n")?;
    print!("{}", sweep.csv());
    println!("pearson(objective, mean rtt) = {:.4}", sweep.pearson_mean_rtt);
    println!("pearson(objective, p95 rtt) = {:.4}", sweep.pearson_p95_rtt);
    Ok(())
}

fn cmd_verify(opts: VerifyOptions) -> Result<()> {
    let results = verify_suite(&opts)?;
    for r in &results {
        println!(
            "{} {}: {} checked, {} violations{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.checked,
            r.violations,
            if r.detail.is_empty() { String::new() } else { format!(" ({})", r.detail) }
        );
    }
    Ok(())
}

fn cmd_gen_topo(source: &SourceArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    let (t, _) = load_source(source, seed)?;
    let doc = save_topology(&t);
    match out {
        Some(path) => fs::write(path, doc).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ANYPRO_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep { run, configs } => cmd_sweep(run, *configs),
        Command::Verify { topologies, max_ingresses, max, mode, seed } => cmd_verify(VerifyOptions {
            topologies: *topologies,
            max_ingresses: *max_ingresses,
            max_prepend: *max,
            mode: (*mode).into(),
            seed: *seed,
        }),
        Command::GenTopo { source, seed, out } => cmd_gen_topo(source, *seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
