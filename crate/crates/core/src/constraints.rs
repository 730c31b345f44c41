//! Atom algebra over prepend differences, contradiction detection, the
//! binary scan that tightens contradicting pairs with live experiments, and
//! the resolution workflow that strings them together with the solver.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bgp_sim::{Oracle, PrependConfig, SimError};
use crate::polling::{ClientGroup, Label};
use crate::solver::{self, check_feasible, Solution, SolverError};
use crate::topology::{Asn, IngressId};

/// `s[lhs] <= s[rhs] + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub lhs: IngressId,
    pub rhs: IngressId,
    pub offset: i32,
    /// Tightened by a binary scan.
    #[serde(default)]
    pub refined: bool,
    /// Derived from a shift triggered by an ingress outside the pair.
    #[serde(default)]
    pub third_party: bool,
}

impl Atom {
    pub fn new(lhs: IngressId, rhs: IngressId, offset: i32) -> Self {
        Atom { lhs, rhs, offset, refined: false, third_party: false }
    }

    /// `s_lhs <= s_rhs - MAX`: the desired side must win even with every
    /// competitor fully prepended.
    pub fn type_i(lhs: IngressId, rhs: IngressId, max_prepend: u32) -> Self {
        Self::new(lhs, rhs, -(max_prepend as i32))
    }

    /// `s_lhs <= s_rhs`.
    pub fn type_ii(lhs: IngressId, rhs: IngressId) -> Self {
        Self::new(lhs, rhs, 0)
    }

    pub fn third_party(mut self) -> Self {
        self.third_party = true;
        self
    }

    pub fn refined(mut self) -> Self {
        self.refined = true;
        self
    }

    pub fn holds(&self, lengths: &[u32]) -> bool {
        lengths[self.lhs] as i64 <= lengths[self.rhs] as i64 + self.offset as i64
    }

    pub fn key(&self) -> AtomKey {
        AtomKey { lhs: self.lhs, rhs: self.rhs, offset: self.offset }
    }

    /// Same inequality, flags ignored.
    pub fn same_inequality(&self, other: &Atom) -> bool {
        self.key() == other.key()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            0 => write!(f, "s{} <= s{}", self.lhs, self.rhs),
            c if c < 0 => write!(f, "s{} <= s{} - {}", self.lhs, self.rhs, -c),
            c => write!(f, "s{} <= s{} + {}", self.lhs, self.rhs, c),
        }
    }
}

/// Identity of an inequality; flags are not part of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomKey {
    pub lhs: IngressId,
    pub rhs: IngressId,
    pub offset: i32,
}

/// An atom restated over its unordered pair `lo < hi`: `forward` means the
/// atom reads `s_lo <= s_hi + offset`, otherwise `s_hi <= s_lo + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalAtom {
    pub lo: IngressId,
    pub hi: IngressId,
    pub forward: bool,
    pub offset: i32,
}

pub fn canonicalize(a: &Atom) -> CanonicalAtom {
    CanonicalAtom {
        lo: a.lhs.min(a.rhs),
        hi: a.lhs.max(a.rhs),
        forward: a.lhs < a.rhs,
        offset: a.offset,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRelation {
    /// Different ingress pairs.
    Unrelated,
    /// Same orientation, or opposite with room to spare.
    Compatible,
    /// Opposite orientations pinning the difference to one value.
    Equality,
    /// No integer assignment satisfies both.
    Contradiction,
}

pub fn relate(x: &Atom, y: &Atom) -> PairRelation {
    let (cx, cy) = (canonicalize(x), canonicalize(y));
    if (cx.lo, cx.hi) != (cy.lo, cy.hi) {
        return PairRelation::Unrelated;
    }
    if cx.forward == cy.forward {
        return PairRelation::Compatible;
    }
    match x.offset + y.offset {
        s if s < 0 => PairRelation::Contradiction,
        0 => PairRelation::Equality,
        _ => PairRelation::Compatible,
    }
}

/// Distinct atoms of the steerable groups, each with the groups that use it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomTable {
    pub atoms: Vec<Atom>,
    pub users: Vec<BTreeSet<usize>>,
    index: HashMap<AtomKey, usize>,
}

impl AtomTable {
    pub fn from_groups(groups: &[ClientGroup]) -> Self {
        let mut t = AtomTable::default();
        for g in groups.iter().filter(|g| g.label == Label::DynamicDesired) {
            for a in &g.atoms {
                let next = t.atoms.len();
                let i = *t.index.entry(a.key()).or_insert(next);
                if i == next {
                    t.atoms.push(*a);
                    t.users.push(BTreeSet::new());
                } else {
                    t.atoms[i].refined |= a.refined;
                    t.atoms[i].third_party &= a.third_party;
                }
                t.users[i].insert(g.id);
            }
        }
        t
    }

    pub fn id_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(&a.key()).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// `gamma1` reads `s_a <= s_b - k` with `k > 0`; `gamma2` reads
/// `s_b <= s_a + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContradictionPair {
    pub gamma1: Atom,
    pub gamma2: Atom,
    /// Total weight of groups using either atom.
    pub impact: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Contradictions {
    pub pairs: Vec<ContradictionPair>,
    /// Groups whose own conjunction has no solution in `[0, MAX]`.
    pub infeasible_groups: Vec<usize>,
}

/// Every opposite-orientation pair with a negative offset sum, heaviest
/// first, plus groups that are infeasible on their own.
pub fn detect_contradictions(
    table: &AtomTable,
    groups: &[ClientGroup],
    max_prepend: u32,
) -> Contradictions {
    let weight: HashMap<usize, u64> = groups.iter().map(|g| (g.id, g.weight)).collect();
    let mut by_pair: BTreeMap<(IngressId, IngressId), Vec<usize>> = BTreeMap::new();
    for (i, a) in table.atoms.iter().enumerate() {
        let c = canonicalize(a);
        by_pair.entry((c.lo, c.hi)).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for ids in by_pair.values() {
        for (p, &i) in ids.iter().enumerate() {
            for &j in &ids[p + 1..] {
                let (x, y) = (table.atoms[i], table.atoms[j]);
                if relate(&x, &y) != PairRelation::Contradiction {
                    continue;
                }
                let (g1, g2) = if (x.offset, x.key()) <= (y.offset, y.key()) { (i, j) } else { (j, i) };
                let users: BTreeSet<usize> = table.users[g1].union(&table.users[g2]).copied().collect();
                let impact = users.iter().map(|g| weight.get(g).copied().unwrap_or(0)).sum();
                pairs.push(ContradictionPair { gamma1: table.atoms[g1], gamma2: table.atoms[g2], impact });
            }
        }
    }
    pairs.sort_by(|p, q| {
        q.impact
            .cmp(&p.impact)
            .then(p.gamma1.key().cmp(&q.gamma1.key()))
            .then(p.gamma2.key().cmp(&q.gamma2.key()))
    });
    let infeasible_groups = groups
        .iter()
        .filter(|g| g.label == Label::DynamicDesired && !check_feasible(&g.atoms, max_prepend))
        .map(|g| g.id)
        .collect();
    Contradictions { pairs, infeasible_groups }
}

// ---------------------------------------------------------------------------
// binary scan

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("binary scan precondition violated: {0}")]
    Precondition(String),
}

/// Clients that must all land on `desired` for a probe to count as holding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub members: Vec<Asn>,
    pub desired: IngressId,
}

impl Witness {
    pub fn of(g: &ClientGroup) -> Self {
        Witness { members: g.members.iter().copied().collect(), desired: g.desired }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub side: Side,
    /// Prepend difference `s_b - s_a` realized by the probe.
    pub d: i32,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unresolvable {
    /// An input atom was already refined.
    Tight,
    /// Both atoms demand a strict lead; no scan can reconcile them.
    BothStrict,
    /// The scan proved the flip-point intervals disjoint.
    Disjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "reason")]
pub enum Outcome {
    Resolved,
    Unresolvable(Unresolvable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub outcome: Outcome,
    pub gamma1: Atom,
    pub gamma2: Atom,
    /// Tightened atoms `s_a <= s_b - ds1_max` and `s_b <= s_a + ds2_min`,
    /// present whenever a scan ran.
    pub refined: Option<(Atom, Atom)>,
    /// Still-possible values of the gamma1 flip point (smallest holding `d`).
    pub ds1_interval: [i32; 2],
    /// Still-possible values of the gamma2 flip point (largest holding `d`).
    pub ds2_interval: [i32; 2],
    pub experiments_used: u64,
    pub adjustments_used: u64,
    pub probes: Vec<Probe>,
}

impl Resolution {
    pub fn is_resolved(&self) -> bool {
        self.outcome == Outcome::Resolved
    }
}

/// Probes needed in the worst case for a given MAX.
pub fn scan_budget(max_prepend: u32) -> u64 {
    let mut bits = 0;
    while (1u64 << bits) < max_prepend as u64 + 1 {
        bits += 1;
    }
    2 * bits
}

fn witnesses_hold(
    oracle: &Oracle,
    cfg: &PrependConfig,
    witnesses: &[Witness],
) -> Result<bool, SimError> {
    let m = oracle.experiment(cfg)?;
    Ok(witnesses
        .iter()
        .all(|w| w.members.iter().all(|&c| m.ingress_of(c) == Some(w.desired))))
}

fn changed_from(base: &PrependConfig, cfg: &PrependConfig) -> u64 {
    base.lengths.iter().zip(&cfg.lengths).filter(|(x, y)| x != y).count() as u64
}

/// Bisects the flip points of a contradicting pair. `base` carries the
/// values of every other ingress (all MAX in the pipeline) and the enabled
/// mask. A gamma1 probe at `d` sets `s_a = 0, s_b = d`; a gamma2 probe at
/// `d` sets `s_b = d, s_a = 0`; each probe is one experiment and two config
/// writes per changed ingress (set and restore).
pub fn binary_scan(
    pair: &ContradictionPair,
    oracle: &Oracle,
    witnesses1: &[Witness],
    witnesses2: &[Witness],
    base: &PrependConfig,
) -> Result<Resolution, ScanError> {
    let (g1, g2) = (pair.gamma1, pair.gamma2);
    if g1.lhs != g2.rhs || g1.rhs != g2.lhs || g1.lhs == g1.rhs {
        return Err(ScanError::Precondition(format!("{g1} and {g2} are not over one ingress pair")));
    }
    let k = -g1.offset;
    let b = g2.offset;
    let max = base.max_prepend as i32;
    if g1.refined || g2.refined {
        return Ok(Resolution {
            outcome: Outcome::Unresolvable(Unresolvable::Tight),
            gamma1: g1,
            gamma2: g2,
            refined: None,
            ds1_interval: [k, k],
            ds2_interval: [b, b],
            experiments_used: 0,
            adjustments_used: 0,
            probes: Vec::new(),
        });
    }
    if k <= 0 || b < 0 || k > max || b >= k {
        return Err(ScanError::Precondition(format!(
            "expected s_a <= s_b - k, s_b <= s_a + b with 0 <= b < k <= MAX, got {g1} and {g2}"
        )));
    }
    let (ia, ib) = (g1.lhs, g1.rhs);

    // gamma1 fails at s1_min and holds at s1_max; gamma2 holds at s2_min and
    // fails at s2_max.
    let (mut s1_min, mut s1_max) = (0, k);
    let (mut s2_min, mut s2_max) = (b, max);
    let mut probes = Vec::new();
    let mut adjustments = 0;
    let start = oracle.experiment_count();
    while s1_max > s2_min && s1_min + 1 <= s2_max - 1 {
        let mut progressed = false;
        if s1_max - s1_min > 1 {
            let m = (s1_min + s1_max).div_euclid(2);
            let cfg = base.clone().with(ia, 0).with(ib, m as u32);
            adjustments += 2 * changed_from(base, &cfg);
            let holds = witnesses_hold(oracle, &cfg, witnesses1)?;
            probes.push(Probe { side: Side::Gamma1, d: m, holds });
            if holds {
                s1_max = m;
            } else {
                s1_min = m;
            }
            progressed = true;
        }
        if s2_max - s2_min > 1 {
            let m = (s2_min + s2_max).div_euclid(2);
            let cfg = base.clone().with(ib, m as u32).with(ia, 0);
            adjustments += 2 * changed_from(base, &cfg);
            let holds = witnesses_hold(oracle, &cfg, witnesses2)?;
            probes.push(Probe { side: Side::Gamma2, d: m, holds });
            if holds {
                s2_min = m;
            } else {
                s2_max = m;
            }
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let outcome = if s1_max <= s2_min {
        Outcome::Resolved
    } else {
        Outcome::Unresolvable(Unresolvable::Disjoint)
    };
    let mut r1 = Atom::new(ia, ib, -s1_max).refined();
    r1.third_party = g1.third_party;
    let mut r2 = Atom::new(ib, ia, s2_min).refined();
    r2.third_party = g2.third_party;
    Ok(Resolution {
        outcome,
        gamma1: g1,
        gamma2: g2,
        refined: Some((r1, r2)),
        ds1_interval: [s1_min + 1, s1_max],
        ds2_interval: [s2_min, s2_max - 1],
        experiments_used: oracle.experiment_count() - start,
        adjustments_used: adjustments,
        probes,
    })
}

// ---------------------------------------------------------------------------
// resolution workflow

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolveError {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// One line of the workflow log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowRecord {
    /// Workflow step, 1 to 8.
    pub step: u8,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ds1: Option<[i32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ds2: Option<[i32; 2]>,
    pub experiments: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl WorkflowRecord {
    fn new(step: u8, action: &str) -> Self {
        WorkflowRecord {
            step,
            action: action.to_string(),
            pair: None,
            ds1: None,
            ds2: None,
            experiments: 0,
            objective: None,
            detail: None,
        }
    }

    fn with_pair(mut self, g1: &Atom, g2: &Atom) -> Self {
        self.pair = Some([g1.to_string(), g2.to_string()]);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolveOptions {
    pub n: usize,
    pub max_prepend: u32,
    pub enabled: Vec<bool>,
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolveOutcome {
    pub groups: Vec<ClientGroup>,
    pub contradictions: Contradictions,
    pub resolutions: Vec<Resolution>,
    pub unresolvable: Vec<ContradictionPair>,
    pub log: Vec<WorkflowRecord>,
    /// Solver objective after the initial solve and after every re-solve.
    pub objectives: Vec<u64>,
    pub solution: Solution,
    pub scan_experiments: u64,
    pub scan_adjustments: u64,
}

fn substitute(groups: &mut [ClientGroup], from: &Atom, to: &Atom) {
    for g in groups.iter_mut().filter(|g| g.label == Label::DynamicDesired) {
        let mut touched = false;
        for a in g.atoms.iter_mut() {
            if a.same_inequality(from) {
                *a = *to;
                touched = true;
            }
        }
        if touched {
            let mut seen = BTreeSet::new();
            g.atoms.retain(|a| seen.insert(a.key()));
        }
    }
}

fn witnesses_for(groups: &[ClientGroup], atom: &Atom) -> Vec<Witness> {
    groups
        .iter()
        .filter(|g| g.label == Label::DynamicDesired && g.atoms.iter().any(|a| a.same_inequality(atom)))
        .map(Witness::of)
        .collect()
}

fn current(replaced: &HashMap<AtomKey, Atom>, a: &Atom) -> Atom {
    let mut cur = *a;
    while let Some(next) = replaced.get(&cur.key()) {
        if next.key() == cur.key() {
            return *next;
        }
        cur = *next;
    }
    cur
}

/// Solve, collect contradictions once, then walk them heaviest first:
/// skip tight or strictly opposed pairs, scan the rest, substitute the
/// tightened atoms and re-solve after each scan.
pub fn resolve_all(
    groups: &[ClientGroup],
    oracle: &Oracle,
    opts: &ResolveOptions,
) -> Result<ResolveOutcome, ResolveError> {
    let mut groups = groups.to_vec();
    let mut log = Vec::new();
    let mut objectives = Vec::new();
    let solve = |groups: &[ClientGroup]| -> Result<Solution, SolverError> {
        let inst = solver::encode(groups, opts.n, opts.max_prepend)?;
        Ok(solver::solve(&inst, opts.node_budget))
    };

    let first = solve(&groups)?;
    objectives.push(first.objective);
    let mut rec = WorkflowRecord::new(1, "solve");
    rec.objective = Some(first.objective);
    log.push(rec);

    let table = AtomTable::from_groups(&groups);
    let contradictions = detect_contradictions(&table, &groups, opts.max_prepend);
    let mut rec = WorkflowRecord::new(2, "extract");
    rec.detail = Some(format!(
        "{} contradiction pairs, {} infeasible groups, {} distinct atoms",
        contradictions.pairs.len(),
        contradictions.infeasible_groups.len(),
        table.len()
    ));
    log.push(rec);

    let base = PrependConfig::all_max(opts.n, opts.max_prepend).with_enabled(&opts.enabled);
    let mut replaced: HashMap<AtomKey, Atom> = HashMap::new();
    let mut resolutions = Vec::new();
    let mut unresolvable = Vec::new();
    let mut scan_experiments = 0;
    let mut scan_adjustments = 0;
    let mut solution = first;

    for pair in &contradictions.pairs {
        let g1 = current(&replaced, &pair.gamma1);
        let g2 = current(&replaced, &pair.gamma2);
        if relate(&g1, &g2) != PairRelation::Contradiction {
            let mut rec = WorkflowRecord::new(3, "no-longer-contradictory").with_pair(&g1, &g2);
            rec.detail = Some("an earlier scan loosened one side".into());
            log.push(rec);
            continue;
        }
        let (g1, g2) = if g1.offset <= g2.offset { (g1, g2) } else { (g2, g1) };
        log.push(WorkflowRecord::new(3, "tightness-check").with_pair(&g1, &g2));
        if g1.refined || g2.refined || g2.offset < 0 {
            let reason = if g2.offset < 0 { "both-strict" } else { "tight" };
            let mut rec = WorkflowRecord::new(4, "unresolvable").with_pair(&g1, &g2);
            rec.detail = Some(reason.into());
            log.push(rec);
            unresolvable.push(ContradictionPair { gamma1: g1, gamma2: g2, impact: pair.impact });
            continue;
        }
        let w1 = witnesses_for(&groups, &g1);
        let w2 = witnesses_for(&groups, &g2);
        let scan_pair = ContradictionPair { gamma1: g1, gamma2: g2, impact: pair.impact };
        let res = binary_scan(&scan_pair, oracle, &w1, &w2, &base)?;
        scan_experiments += res.experiments_used;
        scan_adjustments += res.adjustments_used;
        let mut rec = WorkflowRecord::new(5, "binary-scan").with_pair(&g1, &g2);
        rec.ds1 = Some(res.ds1_interval);
        rec.ds2 = Some(res.ds2_interval);
        rec.experiments = res.experiments_used;
        log.push(rec);

        let (r1, r2) = res.refined.expect("scan ran");
        substitute(&mut groups, &g1, &r1);
        substitute(&mut groups, &g2, &r2);
        replaced.insert(g1.key(), r1);
        replaced.insert(g2.key(), r2);
        let mut rec = WorkflowRecord::new(6, if res.is_resolved() { "resolved" } else { "unresolvable" })
            .with_pair(&r1, &r2);
        rec.ds1 = Some(res.ds1_interval);
        rec.ds2 = Some(res.ds2_interval);
        log.push(rec);
        if !res.is_resolved() {
            unresolvable.push(scan_pair);
        }
        resolutions.push(res);

        solution = solve(&groups)?;
        objectives.push(solution.objective);
        let mut rec = WorkflowRecord::new(7, "re-solve");
        rec.objective = Some(solution.objective);
        log.push(rec);
    }

    if contradictions.pairs.is_empty() {
        log.push(WorkflowRecord::new(3, "nothing-to-resolve"));
    }
    let mut rec = WorkflowRecord::new(8, "finalize");
    rec.objective = Some(solution.objective);
    rec.experiments = scan_experiments;
    log.push(rec);

    Ok(ResolveOutcome {
        groups,
        contradictions,
        resolutions,
        unresolvable,
        log,
        objectives,
        solution,
        scan_experiments,
        scan_adjustments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::pair_conflict;
    use crate::bgp_sim::{sweep_pair_difference, SweepTable};

    fn group(id: usize, weight: u64, desired: IngressId, atoms: Vec<Atom>) -> ClientGroup {
        ClientGroup {
            id,
            members: (0..weight as Asn).map(|m| 1000 * (id as Asn + 1) + m).collect(),
            weight,
            desired,
            label: Label::DynamicDesired,
            baseline: None,
            candidates: BTreeSet::new(),
            triggers: Vec::new(),
            atoms,
        }
    }

    #[test]
    fn relations() {
        let a = Atom::type_ii(0, 1);
        let b = Atom::type_ii(1, 0);
        assert_eq!(relate(&a, &b), PairRelation::Equality);
        assert_eq!(relate(&Atom::type_i(0, 1, 3), &Atom::type_i(1, 0, 3)), PairRelation::Contradiction);
        assert_eq!(relate(&Atom::type_i(0, 1, 9), &b), PairRelation::Contradiction);
        assert_eq!(relate(&a, &Atom::type_ii(0, 2)), PairRelation::Unrelated);
        assert_eq!(relate(&a, &Atom::type_i(0, 1, 3)), PairRelation::Compatible);
    }

    #[test]
    fn canonical_form_keeps_orientation() {
        let c = canonicalize(&Atom::type_i(3, 1, 9));
        assert_eq!((c.lo, c.hi, c.forward, c.offset), (1, 3, false, -9));
        assert_eq!(Atom::type_i(3, 1, 9).to_string(), "s3 <= s1 - 9");
    }

    #[test]
    fn table_shares_duplicates() {
        let gs = vec![
            group(0, 2, 0, vec![Atom::type_i(0, 1, 3)]),
            group(1, 3, 0, vec![Atom::type_i(0, 1, 3), Atom::type_ii(0, 2)]),
        ];
        let t = AtomTable::from_groups(&gs);
        assert_eq!(t.len(), 2);
        assert_eq!(t.users[t.id_of(&Atom::type_i(0, 1, 3)).unwrap()], [0, 1].into());
    }

    #[test]
    fn detects_worked_contradiction() {
        let gs = vec![
            group(0, 4, 0, vec![Atom::type_i(0, 1, 9)]),
            group(1, 6, 1, vec![Atom::type_ii(1, 0)]),
        ];
        let c = detect_contradictions(&AtomTable::from_groups(&gs), &gs, 9);
        assert_eq!(c.pairs.len(), 1);
        assert_eq!(c.pairs[0].gamma1, Atom::type_i(0, 1, 9));
        assert_eq!(c.pairs[0].gamma2, Atom::type_ii(1, 0));
        assert_eq!(c.pairs[0].impact, 10);
        assert!(c.infeasible_groups.is_empty());
    }

    #[test]
    fn cyclic_equalities_are_fine_negative_cycle_is_not() {
        let eq = vec![group(
            0,
            1,
            0,
            vec![Atom::type_ii(0, 1), Atom::type_ii(1, 2), Atom::type_ii(2, 0)],
        )];
        let c = detect_contradictions(&AtomTable::from_groups(&eq), &eq, 9);
        assert!(c.pairs.is_empty() && c.infeasible_groups.is_empty());
        let cyc = vec![group(
            0,
            1,
            0,
            vec![Atom::new(0, 1, -3), Atom::new(1, 2, -3), Atom::new(2, 0, -3)],
        )];
        let c = detect_contradictions(&AtomTable::from_groups(&cyc), &cyc, 9);
        assert!(c.pairs.is_empty());
        assert_eq!(c.infeasible_groups, vec![0]);
    }

    #[test]
    fn scan_budget_values() {
        assert_eq!(scan_budget(9), 8);
        assert_eq!(scan_budget(3), 4);
        assert_eq!(scan_budget(1), 2);
    }

    #[test]
    fn scan_resolves_overlapping_flip_points() {
        // client 9 wants A but B is 2 hops shorter: ties go to A, so it needs
        // s_B - s_A >= 2. client 8 wants B, 6 hops shorter: keeps B while
        // s_B - s_A <= 5.
        let t = pair_conflict(5, 3, 9, 3);
        let o = Oracle::new(t);
        let base = PrependConfig::all_max(2, 9);
        let pair = ContradictionPair {
            gamma1: Atom::type_i(0, 1, 9),
            gamma2: Atom::type_ii(1, 0),
            impact: 2,
        };
        let w1 = [Witness { members: vec![9], desired: 0 }];
        let w2 = [Witness { members: vec![8], desired: 1 }];
        let r = binary_scan(&pair, &o, &w1, &w2, &base).unwrap();
        assert!(r.is_resolved(), "{r:?}");
        assert!(r.experiments_used <= scan_budget(9));
        let (r1, r2) = r.refined.unwrap();
        // flip points from the sweep
        let table = sweep_pair_difference(&o, 0, 1, &base).unwrap();
        assert_eq!(table.settles_on(9, 0), Some(2));
        assert_eq!(table.holds_until(8, 1), Some(5));
        assert_eq!(SweepTable::changes(&table.rows[&9]), 1);
        assert!(-r1.offset >= 2 && r2.offset <= 5 && -r1.offset <= r2.offset);
        assert!(r.ds1_interval[1] <= r.ds2_interval[0]);
        // both refined atoms together keep both clients home
        let lengths = [0, (-r1.offset) as u32];
        assert!(r1.holds(&lengths) && r2.holds(&lengths));
        let m = o.experiment(&base.clone().with(0, lengths[0]).with(1, lengths[1])).unwrap();
        assert_eq!((m.ingress_of(9), m.ingress_of(8)), (Some(0), Some(1)));
    }

    #[test]
    fn scan_reports_disjoint_flip_points() {
        // client 9 needs d >= 7, client 8 keeps B only while d <= 1
        let t = pair_conflict(9, 3, 5, 3);
        let o = Oracle::new(t);
        let base = PrependConfig::all_max(2, 9);
        let pair = ContradictionPair {
            gamma1: Atom::type_i(0, 1, 9),
            gamma2: Atom::type_ii(1, 0),
            impact: 2,
        };
        let w1 = [Witness { members: vec![9], desired: 0 }];
        let w2 = [Witness { members: vec![8], desired: 1 }];
        let r = binary_scan(&pair, &o, &w1, &w2, &base).unwrap();
        assert_eq!(r.outcome, Outcome::Unresolvable(Unresolvable::Disjoint));
        assert!(r.ds1_interval[0] > r.ds2_interval[1]);
        assert!(r.experiments_used <= 8);
    }

    #[test]
    fn refined_input_is_unresolvable_without_experiments() {
        let o = Oracle::new(pair_conflict(5, 3, 9, 3));
        let pair = ContradictionPair {
            gamma1: Atom::new(0, 1, -4).refined(),
            gamma2: Atom::type_ii(1, 0),
            impact: 1,
        };
        let r = binary_scan(&pair, &o, &[], &[], &PrependConfig::all_max(2, 9)).unwrap();
        assert_eq!(r.outcome, Outcome::Unresolvable(Unresolvable::Tight));
        assert_eq!(o.experiment_count(), 0);
        let bad = ContradictionPair { gamma1: Atom::type_ii(0, 1), gamma2: Atom::type_ii(1, 0), impact: 0 };
        assert!(binary_scan(&bad, &o, &[], &[], &PrependConfig::all_max(2, 9)).is_err());
    }

    #[test]
    fn resolve_all_without_contradictions_is_a_no_op() {
        let o = Oracle::new(pair_conflict(5, 3, 9, 3));
        let gs = vec![group(0, 1, 0, vec![Atom::type_i(0, 1, 9)])];
        let opts = ResolveOptions { n: 2, max_prepend: 9, enabled: vec![true; 2], node_budget: None };
        let out = resolve_all(&gs, &o, &opts).unwrap();
        assert_eq!(out.groups, gs);
        assert_eq!(out.scan_experiments, 0);
        assert_eq!(o.experiment_count(), 0);
        assert_eq!(out.log.first().unwrap().step, 1);
        assert_eq!(out.log.last().unwrap().step, 8);
    }
}
