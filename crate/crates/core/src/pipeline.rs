//! End-to-end run: baseline, polling, preliminary solve, contradiction
//! resolution, final solve, each configuration evaluated against the oracle.
//! Also the objective/RTT sweep and the small-instance verification suite.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bgp_sim::{sweep_pair_difference, Mode, Oracle, PrependConfig, SimError, SweepTable};
use crate::constraints::{resolve_all, ResolveError, ResolveOptions, ResolveOutcome};
use crate::metrics::{
    attainable_ceiling, budget_report, classification_counts, correlation, evaluate, Budget,
    BudgetLedger, Evaluation, MetricsError, DEFAULT_CONVERGENCE_MINUTES,
};
use crate::polling::{
    classify, derive_preliminary_constraints, max_min_poll, Classification, ClientGroup,
    DesiredMapping, PollError, PollResult,
};
use crate::solver::{self, Instance, Solution, SolverError};
use crate::topology::{generate_random_topology, Asn, IngressId, Topology, TopologyError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("simulation: {0}")]
    Simulation(#[from] SimError),
    #[error("polling: {0}")]
    Polling(#[from] PollError),
    #[error("resolution: {0}")]
    Resolution(#[from] ResolveError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub max_prepend: u32,
    pub enabled: Vec<bool>,
    pub node_budget: Option<u64>,
    pub convergence_cost_minutes: f64,
}

impl PipelineConfig {
    pub fn new(n: usize, max_prepend: u32) -> Self {
        PipelineConfig {
            max_prepend,
            enabled: vec![true; n],
            node_budget: None,
            convergence_cost_minutes: DEFAULT_CONVERGENCE_MINUTES,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), PipelineError> {
        if self.max_prepend < 1 {
            return Err(PipelineError::Config("max prepend must be at least 1".into()));
        }
        if self.enabled.len() != n {
            return Err(PipelineError::Config(format!(
                "enabled mask has {} entries for {n} ingresses",
                self.enabled.len()
            )));
        }
        if !self.enabled.iter().any(|&e| e) {
            return Err(PipelineError::Config("no ingress enabled".into()));
        }
        Ok(())
    }
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub config: Vec<u32>,
    /// Solver objective (client weight), absent for the all-zero baseline.
    pub solver_objective: Option<u64>,
    pub evaluation: Evaluation,
    #[serde(skip)]
    pub mapping: crate::bgp_sim::Mapping,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub desired: DesiredMapping,
    pub poll: PollResult,
    pub classification: Classification,
    pub preliminary_groups: Vec<ClientGroup>,
    pub preliminary_instance: Instance,
    pub preliminary_solution: Solution,
    pub resolve: ResolveOutcome,
    pub final_instance: Instance,
    pub baseline: Stage,
    pub preliminary: Stage,
    pub finalized: Stage,
    pub ledger: BudgetLedger,
    pub budget: Budget,
}

fn stage(
    oracle: &Oracle,
    dm: &DesiredMapping,
    cfg: &PrependConfig,
    solver_objective: Option<u64>,
) -> Result<Stage, PipelineError> {
    let mapping = oracle.experiment(cfg)?;
    let evaluation = evaluate(oracle.topology(), &mapping, dm)?;
    Ok(Stage { config: cfg.lengths.clone(), solver_objective, evaluation, mapping })
}

/// Runs every stage against `oracle`. Budget counts are taken relative to
/// the oracle counter at entry.
pub fn run_pipeline(
    oracle: &Oracle,
    dm: &DesiredMapping,
    cfg: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    let n = oracle.n_ingresses();
    cfg.validate(n)?;
    dm.validate(&cfg.enabled)?;
    let mut ledger = BudgetLedger { oracle_start: oracle.experiment_count(), ..Default::default() };
    let max = cfg.max_prepend;
    let masked = |lengths: &[u32]| PrependConfig {
        lengths: lengths.to_vec(),
        max_prepend: max,
        enabled: cfg.enabled.clone(),
    };

    log::info!("baseline: all-zero evaluation");
    let baseline = stage(oracle, dm, &masked(&vec![0; n]), None)?;
    ledger.evaluation_experiments += 1;

    log::info!("polling {} enabled ingresses", cfg.enabled.iter().filter(|&&e| e).count());
    let poll = max_min_poll(oracle, max, &cfg.enabled)?;
    ledger.polling_experiments = poll.experiments;
    ledger.polling_adjustments = poll.adjustments;
    let classification = classify(&poll, dm)?;
    let preliminary_groups = derive_preliminary_constraints(&poll, dm)?;

    let preliminary_instance = solver::encode(&preliminary_groups, n, max)?;
    let preliminary_solution = solver::solve(&preliminary_instance, cfg.node_budget);
    log::info!("preliminary objective {}", preliminary_solution.objective);
    let preliminary = stage(
        oracle,
        dm,
        &masked(&preliminary_solution.config.lengths),
        Some(preliminary_solution.objective),
    )?;
    ledger.evaluation_experiments += 1;

    let opts = ResolveOptions {
        n,
        max_prepend: max,
        enabled: cfg.enabled.clone(),
        node_budget: cfg.node_budget,
    };
    let resolve = resolve_all(&preliminary_groups, oracle, &opts)?;
    for r in &resolve.resolutions {
        ledger.scan_experiments.push(r.experiments_used);
        ledger.scan_adjustments.push(r.adjustments_used);
    }
    log::info!(
        "resolution: {} pairs, {} scanned, {} unresolvable",
        resolve.contradictions.pairs.len(),
        resolve.resolutions.len(),
        resolve.unresolvable.len()
    );
    let final_instance = solver::encode(&resolve.groups, n, max)?;
    let finalized = stage(
        oracle,
        dm,
        &masked(&resolve.solution.config.lengths),
        Some(resolve.solution.objective),
    )?;
    ledger.evaluation_experiments += 1;
    log::info!("final normalized objective {:.4}", finalized.evaluation.normalized_objective);

    let budget = budget_report(oracle, &ledger, cfg.convergence_cost_minutes);
    Ok(PipelineRun {
        desired: dm.clone(),
        poll,
        classification,
        preliminary_groups,
        preliminary_instance,
        preliminary_solution,
        resolve,
        final_instance,
        baseline,
        preliminary,
        finalized,
        ledger,
        budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub config: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_objective: Option<u64>,
    pub normalized_objective: f64,
    pub rtt_percentiles: BTreeMap<String, f64>,
    pub mean_rtt_ms: f64,
    pub per_region: BTreeMap<String, f64>,
}

impl From<&Stage> for StageSummary {
    fn from(s: &Stage) -> Self {
        StageSummary {
            config: s.config.clone(),
            solver_objective: s.solver_objective,
            normalized_objective: s.evaluation.normalized_objective,
            rtt_percentiles: s.evaluation.rtt.percentiles(),
            mean_rtt_ms: s.evaluation.rtt.mean,
            per_region: s.evaluation.per_region.clone(),
        }
    }
}

/// The `report.json` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub ingresses: usize,
    pub clients: usize,
    pub max_prepend: u32,
    pub mode: Mode,
    pub enabled: Vec<IngressId>,
    pub normalized_objective: f64,
    pub rtt_percentiles: BTreeMap<String, f64>,
    pub classification_counts: BTreeMap<String, usize>,
    pub attainable_ceiling: f64,
    pub per_region: BTreeMap<String, f64>,
    pub stages: BTreeMap<String, StageSummary>,
    pub groups: usize,
    pub contradictions: usize,
    pub resolved: usize,
    pub unresolvable: usize,
    pub infeasible_groups: usize,
    pub solver_proof: solver::Proof,
    pub solver_nodes: u64,
    pub budget: Budget,
}

impl PipelineRun {
    pub fn report(&self, oracle: &Oracle) -> RunReport {
        let enabled = self.poll.enabled.iter().enumerate().filter(|(_, &e)| e).map(|(i, _)| i).collect();
        let stages = [
            ("all-zero", &self.baseline),
            ("preliminary", &self.preliminary),
            ("finalized", &self.finalized),
        ]
        .into_iter()
        .map(|(k, s)| (k.to_string(), StageSummary::from(s)))
        .collect();
        RunReport {
            ingresses: oracle.n_ingresses(),
            clients: self.desired.len(),
            max_prepend: self.poll.max_prepend,
            mode: oracle.mode(),
            enabled,
            normalized_objective: self.finalized.evaluation.normalized_objective,
            rtt_percentiles: self.finalized.evaluation.rtt.percentiles(),
            classification_counts: classification_counts(&self.classification),
            attainable_ceiling: attainable_ceiling(&self.classification),
            per_region: self.finalized.evaluation.per_region.clone(),
            stages,
            groups: self.preliminary_groups.len(),
            contradictions: self.resolve.contradictions.pairs.len(),
            resolved: self.resolve.resolutions.iter().filter(|r| r.is_resolved()).count(),
            unresolvable: self.resolve.unresolvable.len(),
            infeasible_groups: self.resolve.contradictions.infeasible_groups.len(),
            solver_proof: self.resolve.solution.proof,
            solver_nodes: self.resolve.solution.nodes,
            budget: self.budget.clone(),
        }
    }

    /// `client,desired,assigned,rtt_ms` rows for the finalized mapping.
    pub fn mappings_csv(&self) -> String {
        let m = &self.finalized.mapping;
        let mut out = String::from("client,desired,assigned,rtt_ms\n");
        for (&c, &d) in &self.desired.desired {
            let assigned = m.ingress_of(c).map_or(String::new(), |i| i.to_string());
            let rtt = m.rtt.get(&c).map_or(String::new(), |r| r.to_string());
            out.push_str(&format!("{c},{d},{assigned},{rtt}\n"));
        }
        out
    }

    pub fn workflow_jsonl(&self) -> String {
        self.resolve
            .log
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

// ---------------------------------------------------------------------------
// objective / RTT sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub config: Vec<u32>,
    pub normalized_objective: f64,
    pub mean_rtt_ms: f64,
    pub p95_rtt_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub pearson_mean_rtt: f64,
    pub pearson_p95_rtt: f64,
}

impl SweepReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("label,normalized_objective,mean_rtt_ms,p95_rtt_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.label, r.normalized_objective, r.mean_rtt_ms, r.p95_rtt_ms
            ));
        }
        out
    }
}

/// Evaluates each labelled config and correlates objective with RTT.
pub fn sweep_configs(
    oracle: &Oracle,
    dm: &DesiredMapping,
    configs: &[(String, PrependConfig)],
) -> Result<SweepReport, PipelineError> {
    if configs.len() < 3 {
        return Err(PipelineError::Config(format!("sweep needs at least 3 configs, got {}", configs.len())));
    }
    let mut rows = Vec::new();
    for (label, cfg) in configs {
        let m = oracle.experiment(cfg)?;
        let e = evaluate(oracle.topology(), &m, dm)?;
        rows.push(SweepRow {
            label: label.clone(),
            config: cfg.lengths.clone(),
            normalized_objective: e.normalized_objective,
            mean_rtt_ms: e.rtt.mean,
            p95_rtt_ms: e.rtt.p95,
        });
    }
    let mean: Vec<_> = rows.iter().map(|r| (r.normalized_objective, r.mean_rtt_ms)).collect();
    let p95: Vec<_> = rows.iter().map(|r| (r.normalized_objective, r.p95_rtt_ms)).collect();
    Ok(SweepReport { pearson_mean_rtt: correlation(&mean)?, pearson_p95_rtt: correlation(&p95)?, rows })
}

/// `count` distinct uniform random configs over the enabled ingresses.
pub fn random_configs<R: Rng>(
    n: usize,
    max: u32,
    enabled: &[bool],
    count: usize,
    rng: &mut R,
) -> Vec<PrependConfig> {
    let space = (max as u128 + 1).saturating_pow(enabled.iter().filter(|&&e| e).count() as u32);
    let count = count.min(space.min(usize::MAX as u128) as usize);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let lengths: Vec<u32> =
            (0..n).map(|i| if enabled[i] { rng.gen_range(0..=max) } else { 0 }).collect();
        if seen.insert(lengths.clone()) {
            out.push(PrependConfig { lengths, max_prepend: max, enabled: enabled.to_vec() });
        }
    }
    out
}

/// Random configs plus `optimized`, labelled `random-i` and `optimized`.
pub fn objective_rtt_sweep(
    oracle: &Oracle,
    dm: &DesiredMapping,
    optimized: &PrependConfig,
    n_random: usize,
    seed: u64,
) -> Result<SweepReport, PipelineError> {
    if n_random < 3 {
        return Err(PipelineError::Config("at least 3 random configs".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut configs: Vec<(String, PrependConfig)> = random_configs(
        optimized.n(),
        optimized.max_prepend,
        &optimized.enabled,
        n_random,
        &mut rng,
    )
    .into_iter()
    .enumerate()
    .map(|(i, c)| (format!("random-{i}"), c))
    .collect();
    configs.push(("optimized".into(), optimized.clone()));
    sweep_configs(oracle, dm, &configs)
}

// ---------------------------------------------------------------------------
// verification suite

/// Largest `(MAX+1)^n` the suite will enumerate.
pub const VERIFY_GUARD: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub topologies: usize,
    pub max_ingresses: usize,
    pub max_prepend: u32,
    pub mode: Mode,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { topologies: 10, max_ingresses: 4, max_prepend: 3, mode: Mode::Flat, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    pub detail: String,
}

/// Every ingress a client reaches under some config in `[0, MAX]^n`.
pub fn exhaustive_candidates(
    oracle: &Oracle,
    max: u32,
) -> Result<BTreeMap<Asn, BTreeSet<IngressId>>, SimError> {
    let n = oracle.n_ingresses();
    let mut out: BTreeMap<Asn, BTreeSet<IngressId>> =
        oracle.topology().clients.iter().map(|&c| (c, BTreeSet::new())).collect();
    let mut lengths = vec![0u32; n];
    loop {
        let m = oracle.experiment(&PrependConfig { lengths: lengths.clone(), max_prepend: max, enabled: vec![true; n] })?;
        for (c, i) in &m.assignment {
            out.entry(*c).or_default().insert(*i);
        }
        let mut k = 0;
        while k < n && lengths[k] == max {
            lengths[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(out);
        }
        lengths[k] += 1;
    }
}

fn small_topology(i: usize, opts: &VerifyOptions) -> Result<Topology, TopologyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
    let n = rng.gen_range(2..=opts.max_ingresses.max(2));
    generate_random_topology(n, 6, 8, 0.3, rng.gen())
}

pub fn verify_suite(opts: &VerifyOptions) -> Result<Vec<PropertyResult>, PipelineError> {
    let n = opts.max_ingresses.max(2) as u32;
    let configs = (opts.max_prepend as u64 + 1).checked_pow(n).unwrap_or(u64::MAX);
    if configs > VERIFY_GUARD {
        return Err(PipelineError::Config(format!(
            "{configs} configurations per topology exceed the guard of {VERIFY_GUARD}"
        )));
    }
    let mut completeness = (0, 0, String::new());
    let mut uniqueness = (0, 0, String::new());
    let mut budget = (0, 0, String::new());
    for i in 0..opts.topologies {
        let t = small_topology(i, opts)?;
        let n = t.n_ingresses();
        let oracle = Oracle::with_mode(t.clone(), opts.mode);
        let enabled = vec![true; n];
        let poll = max_min_poll(&oracle, opts.max_prepend, &enabled)?;
        let truth = exhaustive_candidates(&oracle, opts.max_prepend)?;
        for c in &t.clients {
            completeness.0 += 1;
            if poll.candidates_of(*c) != truth[c] {
                completeness.1 += 1;
                completeness.2 = format!("topology {i} client {c}: polled {:?}, exhaustive {:?}", poll.candidates_of(*c), truth[c]);
            }
        }
        let base = PrependConfig::all_max(n, opts.max_prepend);
        for a in 0..n {
            for b in a + 1..n {
                let table = sweep_pair_difference(&oracle, a, b, &base)?;
                for (c, row) in &table.rows {
                    uniqueness.0 += 1;
                    if SweepTable::changes(row) > 1 {
                        uniqueness.1 += 1;
                        uniqueness.2 = format!("topology {i} pair ({a},{b}) client {c}: {row:?}");
                    }
                }
            }
        }
        let dm = DesiredMapping::nearest_by_latency(&t, &enabled);
        let fresh = Oracle::with_mode(t, opts.mode);
        let run = run_pipeline(&fresh, &dm, &PipelineConfig::new(n, opts.max_prepend))?;
        budget.0 += 1;
        let b = &run.budget;
        let scans: u64 = run.ledger.scan_adjustments.iter().sum();
        let ok = b.identity_holds()
            && b.polling_adjustments == 2 * n as u64
            && b.polling_experiments == n as u64 + 1
            && b.adjustments == 2 * n as u64 + scans
            && b.evaluation_experiments == 3;
        if !ok {
            budget.1 += 1;
            budget.2 = format!("topology {i}: {b:?}");
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut exact = (0, 0, String::new());
    for k in 0..opts.topologies * 5 {
        let n = rng.gen_range(2..=opts.max_ingresses.max(2));
        let inst = solver::random_instance(n, opts.max_prepend, rng.gen_range(1..=8), &mut rng);
        let fast = solver::solve(&inst, None);
        let slow = solver::solve_bruteforce(&inst)?;
        exact.0 += 1;
        if fast.objective != slow.objective {
            exact.1 += 1;
            exact.2 = format!("instance {k}: branch and bound {} vs enumeration {}", fast.objective, slow.objective);
        }
    }

    let result = |name: &str, (checked, violations, detail): (usize, usize, String)| PropertyResult {
        name: name.to_string(),
        passed: violations == 0,
        checked,
        violations,
        detail,
    };
    Ok(vec![
        result("polling-completeness", completeness),
        result("flip-uniqueness", uniqueness),
        result("solver-exactness", exact),
        result("budget-identities", budget),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{flat, pair_conflict};

    #[test]
    fn single_ingress_run_changes_nothing() {
        let t = flat(&[(1, 5), (5, 9), (5, 8)], &[1], &[8, 9]);
        let o = Oracle::new(t.clone());
        let dm = DesiredMapping::nearest_by_latency(&t, &[true]);
        let run = run_pipeline(&o, &dm, &PipelineConfig::new(1, 9)).unwrap();
        let obj = |s: &Stage| s.evaluation.normalized_objective;
        assert_eq!(obj(&run.baseline), 1.0);
        assert_eq!(obj(&run.preliminary), obj(&run.baseline));
        assert_eq!(obj(&run.finalized), obj(&run.baseline));
        assert_eq!(run.budget.adjustments, 2);
        assert!(run.budget.identity_holds());
    }

    #[test]
    fn resolvable_conflict_is_fixed_end_to_end() {
        let t = pair_conflict(5, 3, 9, 3);
        let o = Oracle::new(t);
        let dm = DesiredMapping { desired: [(9, 0), (8, 1)].into() };
        let run = run_pipeline(&o, &dm, &PipelineConfig::new(2, 9)).unwrap();
        let obj = |s: &Stage| s.evaluation.normalized_objective;
        assert_eq!(run.resolve.contradictions.pairs.len(), 1);
        assert!(run.resolve.resolutions[0].is_resolved());
        assert!(obj(&run.baseline) <= obj(&run.preliminary));
        assert!(obj(&run.preliminary) <= obj(&run.finalized));
        assert_eq!(obj(&run.finalized), 1.0);
        let b = &run.budget;
        assert!(b.identity_holds());
        assert_eq!(b.adjustments, 4 + run.resolve.scan_adjustments);
        assert_eq!(b.simulated_wall_clock_minutes, b.adjustments as f64 * 10.0);
        assert!(run.workflow_jsonl().lines().count() >= 5);
        assert!(run.mappings_csv().starts_with("client,desired,assigned,rtt_ms\n8,1,1,"));
    }

    #[test]
    fn rejects_bad_config() {
        let t = pair_conflict(5, 3, 9, 3);
        let o = Oracle::new(t);
        let dm = DesiredMapping { desired: [(9, 0), (8, 1)].into() };
        let mut cfg = PipelineConfig::new(2, 9);
        cfg.enabled = vec![false, false];
        assert!(matches!(run_pipeline(&o, &dm, &cfg), Err(PipelineError::Config(_))));
        cfg.enabled = vec![true, true];
        cfg.max_prepend = 0;
        assert!(matches!(run_pipeline(&o, &dm, &cfg), Err(PipelineError::Config(_))));
    }

    #[test]
    fn identical_configs_have_degenerate_variance() {
        let t = pair_conflict(5, 3, 9, 3);
        let o = Oracle::new(t);
        let dm = DesiredMapping { desired: [(9, 0), (8, 1)].into() };
        let c = PrependConfig::all_zero(2, 9);
        let configs: Vec<_> = (0..3).map(|i| (format!("c{i}"), c.clone())).collect();
        assert!(matches!(
            sweep_configs(&o, &dm, &configs),
            Err(PipelineError::Metrics(MetricsError::DegenerateVariance(_)))
        ));
    }

    #[test]
    fn random_configs_are_distinct_and_capped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cs = random_configs(3, 1, &[true, true, false], 10, &mut rng);
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| c.lengths[2] == 0));
    }

    #[test]
    fn verify_guard() {
        let opts = VerifyOptions { max_ingresses: 6, max_prepend: 9, ..Default::default() };
        assert!(matches!(verify_suite(&opts), Err(PipelineError::Config(_))));
    }

    #[test]
    fn verify_small_suite_passes_in_flat_mode() {
        let opts = VerifyOptions { topologies: 4, ..Default::default() };
        let results = verify_suite(&opts).unwrap();
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
    }
}
