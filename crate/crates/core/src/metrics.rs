//! Evaluation quantities: normalized objective, RTT percentiles and CDFs,
//! objective/RTT correlation, classification breakdowns and budget records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bgp_sim::{Mapping, Oracle};
use crate::polling::{Classification, DesiredMapping, Label};
use crate::topology::Topology;

pub const DEFAULT_CONVERGENCE_MINUTES: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("mapping has no client with an RTT")]
    EmptyMapping,
    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate variance: {0} is constant")]
    DegenerateVariance(&'static str),
}

/// Clients whose assigned ingress equals the desired one.
pub fn matched_clients(m: &Mapping, dm: &DesiredMapping) -> usize {
    dm.desired.iter().filter(|(c, d)| m.ingress_of(**c) == Some(**d)).count()
}

/// Matched clients over all clients of `dm`. Unreachable clients count as
/// unmatched; an empty client set scores 0.
pub fn normalized_objective(m: &Mapping, dm: &DesiredMapping) -> f64 {
    if dm.is_empty() {
        return 0.0;
    }
    matched_clients(m, dm) as f64 / dm.len() as f64
}

/// Nearest-rank percentile of an ascending, non-empty slice.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RttDistribution {
    pub p50: f64,
    pub p90: f64,
    pub p95: f64,
    pub mean: f64,
    /// `(rtt_ms, cumulative fraction)`, ascending.
    pub cdf: Vec<(f64, f64)>,
}

impl RttDistribution {
    pub fn percentiles(&self) -> BTreeMap<String, f64> {
        [("50", self.p50), ("90", self.p90), ("95", self.p95)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn cdf_csv(&self) -> String {
        let mut out = String::from("rtt_ms,fraction\n");
        for (r, f) in &self.cdf {
            out.push_str(&format!("{r},{f}\n"));
        }
        out
    }
}

pub fn rtt_distribution(m: &Mapping) -> Result<RttDistribution, MetricsError> {
    let mut v: Vec<f64> = m.rtt.values().copied().collect();
    if v.is_empty() {
        return Err(MetricsError::EmptyMapping);
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(RttDistribution {
        p50: nearest_rank(&v, 50.0),
        p90: nearest_rank(&v, 90.0),
        p95: nearest_rank(&v, 95.0),
        mean: v.iter().sum::<f64>() / n as f64,
        cdf: v.iter().enumerate().map(|(i, &r)| (r, (i + 1) as f64 / n as f64)).collect(),
    })
}

/// Pearson coefficient of `(x, y)` points.
pub fn correlation(points: &[(f64, f64)]) -> Result<f64, MetricsError> {
    let n = points.len();
    if n < 3 {
        return Err(MetricsError::TooFewPoints(n));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    const EPS: f64 = 1e-12;
    if sxx <= EPS {
        return Err(MetricsError::DegenerateVariance("x"));
    }
    if syy <= EPS {
        return Err(MetricsError::DegenerateVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Normalized objective per region, the region being the PoP of each
/// client's desired ingress.
pub fn per_region(t: &Topology, m: &Mapping, dm: &DesiredMapping) -> BTreeMap<String, f64> {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (&c, &d) in &dm.desired {
        let region = t.ingresses.get(d).map_or_else(|| format!("ingress-{d}"), |i| i.pop.clone());
        let e = tally.entry(region).or_default();
        e.1 += 1;
        if m.ingress_of(c) == Some(d) {
            e.0 += 1;
        }
    }
    tally.into_iter().map(|(r, (hit, all))| (r, hit as f64 / all as f64)).collect()
}

/// Counts under every label, zeros included.
pub fn classification_counts(c: &Classification) -> BTreeMap<String, usize> {
    let counts = c.counts();
    Label::ALL
        .iter()
        .map(|l| (l.as_str().to_string(), counts.get(l).copied().unwrap_or(0)))
        .collect()
}

/// Best normalized objective any configuration could reach given the
/// labels: static-desired plus dynamic-desired over all clients.
pub fn attainable_ceiling(c: &Classification) -> f64 {
    if c.labels.is_empty() {
        return 0.0;
    }
    let ok = c
        .labels
        .values()
        .filter(|l| matches!(l, Label::StaticDesired | Label::DynamicDesired))
        .count();
    ok as f64 / c.labels.len() as f64
}

/// Experiment and adjustment counts by category, as logged by a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    /// Oracle counter when the run started.
    pub oracle_start: u64,
    pub polling_experiments: u64,
    pub polling_adjustments: u64,
    pub scan_experiments: Vec<u64>,
    pub scan_adjustments: Vec<u64>,
    pub evaluation_experiments: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Oracle experiments since the run started.
    pub experiments: u64,
    pub adjustments: u64,
    pub polling_experiments: u64,
    pub scan_experiments: u64,
    pub evaluation_experiments: u64,
    pub polling_adjustments: u64,
    pub scan_adjustments: u64,
    pub convergence_cost_minutes: f64,
    pub simulated_wall_clock_minutes: f64,
}

impl Budget {
    /// Oracle counter equals the sum of logged categories.
    pub fn identity_holds(&self) -> bool {
        self.experiments == self.polling_experiments + self.scan_experiments + self.evaluation_experiments
            && self.adjustments == self.polling_adjustments + self.scan_adjustments
    }
}

pub fn budget_report(o: &Oracle, ledger: &BudgetLedger, convergence_cost_minutes: f64) -> Budget {
    let scan_adjustments: u64 = ledger.scan_adjustments.iter().sum();
    let adjustments = ledger.polling_adjustments + scan_adjustments;
    Budget {
        experiments: o.experiment_count() - ledger.oracle_start,
        adjustments,
        polling_experiments: ledger.polling_experiments,
        scan_experiments: ledger.scan_experiments.iter().sum(),
        evaluation_experiments: ledger.evaluation_experiments,
        polling_adjustments: ledger.polling_adjustments,
        scan_adjustments,
        convergence_cost_minutes,
        simulated_wall_clock_minutes: adjustments as f64 * convergence_cost_minutes,
    }
}

/// Everything measured for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub normalized_objective: f64,
    pub matched: usize,
    pub clients: usize,
    pub rtt: RttDistribution,
    pub per_region: BTreeMap<String, f64>,
}

pub fn evaluate(t: &Topology, m: &Mapping, dm: &DesiredMapping) -> Result<Evaluation, MetricsError> {
    Ok(Evaluation {
        normalized_objective: normalized_objective(m, dm),
        matched: matched_clients(m, dm),
        clients: dm.len(),
        rtt: rtt_distribution(m)?,
        per_region: per_region(t, m, dm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Asn;

    fn mapping(rows: &[(Asn, usize, f64)]) -> Mapping {
        Mapping {
            assignment: rows.iter().map(|&(c, i, _)| (c, i)).collect(),
            rtt: rows.iter().map(|&(c, _, r)| (c, r)).collect(),
        }
    }

    fn desired(rows: &[(Asn, usize)]) -> DesiredMapping {
        DesiredMapping { desired: rows.iter().copied().collect() }
    }

    #[test]
    fn objective_fractions() {
        let m = mapping(&[(1, 0, 1.0), (2, 1, 1.0), (3, 0, 1.0), (4, 1, 1.0)]);
        assert_eq!(normalized_objective(&m, &desired(&[(1, 0), (2, 1), (3, 0), (4, 1)])), 1.0);
        assert_eq!(normalized_objective(&m, &desired(&[(1, 1), (2, 0), (3, 1), (4, 0)])), 0.0);
        assert_eq!(normalized_objective(&m, &desired(&[(1, 0), (2, 1), (3, 0), (4, 0)])), 0.75);
        // unreachable client 5
        assert_eq!(normalized_objective(&m, &desired(&[(1, 0), (5, 0)])), 0.5);
    }

    #[test]
    fn percentiles_nearest_rank() {
        let d = rtt_distribution(&mapping(&[(1, 0, 10.0)])).unwrap();
        assert_eq!((d.p50, d.p90, d.p95), (10.0, 10.0, 10.0));
        let rows: Vec<_> = (1..=100).map(|i| (i as Asn, 0, i as f64)).collect();
        let d = rtt_distribution(&mapping(&rows)).unwrap();
        assert_eq!((d.p50, d.p90, d.p95), (50.0, 90.0, 95.0));
        assert_eq!(d.cdf.last(), Some(&(100.0, 1.0)));
        assert!(d.cdf.windows(2).all(|w| w[0].0 <= w[1].0));
        assert_eq!(rtt_distribution(&Mapping::default()), Err(MetricsError::EmptyMapping));
    }

    #[test]
    fn pearson() {
        let r = correlation(&[(0.0, 3.0), (0.5, 2.0), (1.0, 1.0)]).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
        assert_eq!(
            correlation(&[(0.0, 3.0), (0.5, 3.0), (1.0, 3.0)]),
            Err(MetricsError::DegenerateVariance("y"))
        );
        assert_eq!(correlation(&[(0.0, 1.0), (1.0, 0.0)]), Err(MetricsError::TooFewPoints(2)));
    }

    #[test]
    fn ceiling_and_counts() {
        let c = Classification {
            labels: [
                (1, Label::StaticDesired),
                (2, Label::DynamicDesired),
                (3, Label::DynamicUndesired),
                (4, Label::StaticUndesired),
            ]
            .into(),
        };
        assert_eq!(attainable_ceiling(&c), 0.5);
        let counts = classification_counts(&c);
        assert_eq!(counts.len(), 4);
        assert_eq!(counts.values().sum::<usize>(), 4);
    }

    #[test]
    fn polling_only_budget() {
        let o = Oracle::new(crate::fixtures::min_max_counterexample());
        let ledger = BudgetLedger { polling_adjustments: 76, ..Default::default() };
        let b = budget_report(&o, &ledger, DEFAULT_CONVERGENCE_MINUTES);
        assert_eq!(b.adjustments, 76);
        assert_eq!(b.simulated_wall_clock_minutes, 760.0);
        assert!(b.identity_holds());
    }
}
