//! Max-min polling: one all-MAX baseline, then every enabled ingress dropped
//! to zero in turn. The observed shifts give candidate sets, sensitivity,
//! client groups and the preliminary preference-preserving atoms.

use std::cmp::Ordering as CmpOrdering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bgp_sim::{Mapping, Oracle, PrependConfig, SimError};
use crate::constraints::Atom;
use crate::topology::{Asn, IngressId, Topology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PollError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("client {0} has no desired ingress")]
    MissingDesired(Asn),
    #[error("desired ingress {ingress} of client {client} does not exist or is disabled")]
    BadDesired { client: Asn, ingress: IngressId },
    #[error("invalid polling arguments: {0}")]
    InvalidArgument(String),
}

/// The operator's target catchment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesiredMapping {
    pub desired: BTreeMap<Asn, IngressId>,
}

impl DesiredMapping {
    pub fn get(&self, client: Asn) -> Option<IngressId> {
        self.desired.get(&client).copied()
    }

    pub fn len(&self) -> usize {
        self.desired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired.is_empty()
    }

    pub fn validate(&self, enabled: &[bool]) -> Result<(), PollError> {
        for (&client, &ingress) in &self.desired {
            if !enabled.get(ingress).copied().unwrap_or(false) {
                return Err(PollError::BadDesired { client, ingress });
            }
        }
        Ok(())
    }

    /// Every client is mapped to the enabled ingress with the lowest
    /// origin-to-client latency; ties go to the lower ingress id.
    pub fn nearest_by_latency(t: &Topology, enabled: &[bool]) -> Self {
        let mut adj: HashMap<Asn, Vec<(Asn, f64)>> = HashMap::new();
        let mut origin_link: HashMap<Asn, f64> = HashMap::new();
        for l in &t.links {
            if l.a == t.origin {
                origin_link.insert(l.b, l.latency_ms);
                continue;
            }
            if l.b == t.origin {
                origin_link.insert(l.a, l.latency_ms);
                continue;
            }
            adj.entry(l.a).or_default().push((l.b, l.latency_ms));
            adj.entry(l.b).or_default().push((l.a, l.latency_ms));
        }
        let mut from_transit: HashMap<Asn, HashMap<Asn, f64>> = HashMap::new();
        let mut best: BTreeMap<Asn, (f64, IngressId)> = BTreeMap::new();
        for ing in &t.ingresses {
            if !enabled.get(ing.id).copied().unwrap_or(false) {
                continue;
            }
            let Some(&first) = origin_link.get(&ing.transit_asn) else { continue };
            let dist = from_transit
                .entry(ing.transit_asn)
                .or_insert_with(|| dijkstra(&adj, ing.transit_asn));
            for &c in &t.clients {
                let Some(&d) = dist.get(&c) else { continue };
                let total = first + d;
                let better = match best.get(&c) {
                    None => true,
                    Some(&(b, _)) => total < b,
                };
                if better {
                    best.insert(c, (total, ing.id));
                }
            }
        }
        DesiredMapping { desired: best.into_iter().map(|(c, (_, i))| (c, i)).collect() }
    }
}

#[derive(PartialEq)]
struct Dist(f64, Asn);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> CmpOrdering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn dijkstra(adj: &HashMap<Asn, Vec<(Asn, f64)>>, source: Asn) -> HashMap<Asn, f64> {
    let mut dist: HashMap<Asn, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(Dist(0.0, source));
    while let Some(Dist(d, u)) = heap.pop() {
        if d > dist[&u] {
            continue;
        }
        for &(v, w) in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            let nd = d + w;
            if dist.get(&v).is_none_or(|&old| nd < old) {
                dist.insert(v, nd);
                heap.push(Dist(nd, v));
            }
        }
    }
    dist
}

/// A client moved from `from` to `to` when `toggled` was flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trigger {
    pub toggled: IngressId,
    pub from: IngressId,
    pub to: IngressId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Baseline all-MAX, each ingress dropped to 0.
    MaxMin,
    /// Baseline all-0, each ingress raised to MAX.
    MinMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollResult {
    pub schedule: Schedule,
    pub max_prepend: u32,
    pub enabled: Vec<bool>,
    pub clients: Vec<Asn>,
    pub baseline: Mapping,
    pub per_ingress: Vec<(IngressId, Mapping)>,
    pub sensitive: BTreeSet<Asn>,
    pub candidates: BTreeMap<Asn, BTreeSet<IngressId>>,
    pub triggers: BTreeMap<Asn, Vec<Trigger>>,
    pub experiments: u64,
    /// Config writes: set and restore per toggled ingress.
    pub adjustments: u64,
}

impl PollResult {
    pub fn candidates_of(&self, client: Asn) -> BTreeSet<IngressId> {
        self.candidates.get(&client).cloned().unwrap_or_default()
    }

    pub fn triggers_of(&self, client: Asn) -> &[Trigger] {
        self.triggers.get(&client).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The client's ingress (or absence of one) never changed across the
    /// schedule.
    pub fn is_static(&self, client: Asn) -> bool {
        let b = self.baseline.ingress_of(client);
        self.per_ingress.iter().all(|(_, m)| m.ingress_of(client) == b)
    }
}

/// Runs the max-min schedule over the enabled ingresses.
pub fn max_min_poll(
    oracle: &Oracle,
    max_prepend: u32,
    enabled: &[bool],
) -> Result<PollResult, PollError> {
    poll(oracle, Schedule::MaxMin, max_prepend, enabled)
}

/// The inverse schedule, kept for comparison: it can miss candidates that
/// only win while every other ingress is prepended.
pub fn min_max_poll(
    oracle: &Oracle,
    max_prepend: u32,
    enabled: &[bool],
) -> Result<PollResult, PollError> {
    poll(oracle, Schedule::MinMax, max_prepend, enabled)
}

fn poll(
    oracle: &Oracle,
    schedule: Schedule,
    max_prepend: u32,
    enabled: &[bool],
) -> Result<PollResult, PollError> {
    if max_prepend < 1 {
        return Err(PollError::InvalidArgument("max_prepend must be at least 1".into()));
    }
    let n = oracle.n_ingresses();
    if enabled.len() != n {
        return Err(PollError::InvalidArgument(format!(
            "enabled mask has {} entries for {n} ingresses",
            enabled.len()
        )));
    }
    let (rest, toggle) = match schedule {
        Schedule::MaxMin => (max_prepend, 0),
        Schedule::MinMax => (0, max_prepend),
    };
    let base = PrependConfig::uniform(n, rest, max_prepend).with_enabled(enabled);
    let start = oracle.experiment_count();
    let baseline = oracle.experiment(&base)?;
    let mut per_ingress = Vec::new();
    let mut adjustments = 0;
    for i in (0..n).filter(|&i| enabled[i]) {
        let cfg = base.clone().with(i, toggle);
        adjustments += 1;
        per_ingress.push((i, oracle.experiment(&cfg)?));
        adjustments += 1;
        log::debug!("poll toggled ingress {i}");
    }
    let experiments = oracle.experiment_count() - start;

    let clients = oracle.topology().clients.clone();
    let mut candidates: BTreeMap<Asn, BTreeSet<IngressId>> = BTreeMap::new();
    let mut triggers: BTreeMap<Asn, Vec<Trigger>> = BTreeMap::new();
    for &c in &clients {
        let set = candidates.entry(c).or_default();
        let from = baseline.ingress_of(c);
        set.extend(from);
        for (toggled, m) in &per_ingress {
            let to = m.ingress_of(c);
            set.extend(to);
            if let (Some(from), Some(to)) = (from, to) {
                if from != to {
                    triggers.entry(c).or_default().push(Trigger { toggled: *toggled, from, to });
                }
            }
        }
    }
    let sensitive = candidates.iter().filter(|(_, s)| s.len() >= 2).map(|(&c, _)| c).collect();
    Ok(PollResult {
        schedule,
        max_prepend,
        enabled: enabled.to_vec(),
        clients,
        baseline,
        per_ingress,
        sensitive,
        candidates,
        triggers,
        experiments,
        adjustments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    StaticDesired,
    StaticUndesired,
    DynamicDesired,
    DynamicUndesired,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::StaticDesired => "static_desired",
            Label::StaticUndesired => "static_undesired",
            Label::DynamicDesired => "dynamic_desired",
            Label::DynamicUndesired => "dynamic_undesired",
        }
    }

    pub const ALL: [Label; 4] = [
        Label::StaticDesired,
        Label::StaticUndesired,
        Label::DynamicDesired,
        Label::DynamicUndesired,
    ];
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: BTreeMap<Asn, Label>,
}

impl Classification {
    pub fn counts(&self) -> BTreeMap<Label, usize> {
        let mut out: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
        for l in self.labels.values() {
            *out.get_mut(l).unwrap() += 1;
        }
        out
    }
}

fn label_for(pr: &PollResult, client: Asn, desired: IngressId) -> Label {
    match (pr.is_static(client), pr.candidates_of(client).contains(&desired)) {
        (true, _) if pr.baseline.ingress_of(client) == Some(desired) => Label::StaticDesired,
        (true, _) => Label::StaticUndesired,
        (false, true) => Label::DynamicDesired,
        (false, false) => Label::DynamicUndesired,
    }
}

pub fn classify(pr: &PollResult, dm: &DesiredMapping) -> Result<Classification, PollError> {
    let mut labels = BTreeMap::new();
    for &c in &pr.clients {
        let d = dm.get(c).ok_or(PollError::MissingDesired(c))?;
        labels.insert(c, label_for(pr, c, d));
    }
    Ok(Classification { labels })
}

/// Clients with identical observed behavior and the same target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientGroup {
    pub id: usize,
    pub members: BTreeSet<Asn>,
    pub weight: u64,
    pub desired: IngressId,
    pub label: Label,
    pub baseline: Option<IngressId>,
    pub candidates: BTreeSet<IngressId>,
    pub triggers: Vec<Trigger>,
    pub atoms: Vec<Atom>,
}

impl ClientGroup {
    /// Whether the group can be steered at all (desired among candidates).
    pub fn attainable(&self) -> bool {
        matches!(self.label, Label::StaticDesired | Label::DynamicDesired)
    }

    pub fn holds(&self, lengths: &[u32]) -> bool {
        self.attainable() && self.atoms.iter().all(|a| a.holds(lengths))
    }
}

fn push_atom(atoms: &mut Vec<Atom>, atom: Atom) {
    if let Some(existing) = atoms.iter_mut().find(|a| a.same_inequality(&atom)) {
        existing.third_party &= atom.third_party;
    } else {
        atoms.push(atom);
    }
}

/// Atoms keeping a client of `desired` on target, one per competing
/// observation.
pub fn atoms_for(desired: IngressId, triggers: &[Trigger], max_prepend: u32) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for t in triggers {
        if t.to == desired {
            if t.toggled == desired {
                push_atom(&mut atoms, Atom::type_i(desired, t.from, max_prepend));
            } else if t.toggled != t.from {
                push_atom(&mut atoms, Atom::type_i(t.toggled, t.from, max_prepend).third_party());
            }
        } else if t.from == desired {
            if t.toggled == t.to {
                push_atom(&mut atoms, Atom::type_ii(desired, t.to));
            } else if t.toggled != desired {
                push_atom(&mut atoms, Atom::type_ii(desired, t.toggled).third_party());
            }
        } else if t.to == t.toggled && t.toggled != desired {
            push_atom(&mut atoms, Atom::type_i(desired, t.toggled, max_prepend));
        }
    }
    atoms
}

/// Groups clients by (candidates, triggers, desired) and emits each group's
/// preliminary conjunction. Group ids follow the smallest member ASN.
pub fn derive_preliminary_constraints(
    pr: &PollResult,
    dm: &DesiredMapping,
) -> Result<Vec<ClientGroup>, PollError> {
    type Key = (BTreeSet<IngressId>, Vec<Trigger>, IngressId);
    let mut buckets: BTreeMap<Key, BTreeSet<Asn>> = BTreeMap::new();
    for &c in &pr.clients {
        let d = dm.get(c).ok_or(PollError::MissingDesired(c))?;
        let mut trig = pr.triggers_of(c).to_vec();
        trig.sort_unstable();
        buckets.entry((pr.candidates_of(c), trig, d)).or_default().insert(c);
    }
    let mut groups: Vec<ClientGroup> = buckets
        .into_iter()
        .map(|((candidates, triggers, desired), members)| {
            let first = *members.iter().next().unwrap();
            let label = label_for(pr, first, desired);
            let atoms = if label == Label::DynamicDesired {
                atoms_for(desired, &triggers, pr.max_prepend)
            } else {
                Vec::new()
            };
            ClientGroup {
                id: 0,
                weight: members.len() as u64,
                baseline: pr.baseline.ingress_of(first),
                members,
                desired,
                label,
                candidates,
                triggers,
                atoms,
            }
        })
        .collect();
    groups.sort_by_key(|g| *g.members.iter().next().unwrap());
    for (i, g) in groups.iter_mut().enumerate() {
        g.id = i;
    }
    Ok(groups)
}
