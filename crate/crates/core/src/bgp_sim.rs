//! Deterministic AS-level route propagation and the measurement oracle built
//! on top of it.
//!
//! Propagation runs synchronous rounds from an empty state until no AS
//! changes its selected route. Each AS picks the best offer by
//! `(relationship class, AS-path length, tie-break rule rank, learned-from
//! ASN, ingress id)`; the class component is constant in flat mode and the
//! rule rank is constant unless a [`Rule::PreferIngress`] is installed on
//! that AS.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Asn, IngressId, Relation, Topology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid prepend configuration: {0}")]
    InvalidConfig(String),
    #[error("route propagation did not converge within {rounds} rounds")]
    NonConvergence { rounds: usize },
}

/// Per-ingress prepend lengths plus the enabled subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrependConfig {
    pub lengths: Vec<u32>,
    pub max_prepend: u32,
    pub enabled: Vec<bool>,
}

impl PrependConfig {
    pub fn uniform(n: usize, value: u32, max_prepend: u32) -> Self {
        PrependConfig { lengths: vec![value; n], max_prepend, enabled: vec![true; n] }
    }

    pub fn all_max(n: usize, max_prepend: u32) -> Self {
        Self::uniform(n, max_prepend, max_prepend)
    }

    pub fn all_zero(n: usize, max_prepend: u32) -> Self {
        Self::uniform(n, 0, max_prepend)
    }

    pub fn with_enabled(mut self, enabled: &[bool]) -> Self {
        self.enabled = enabled.to_vec();
        self
    }

    pub fn with(mut self, ingress: IngressId, length: u32) -> Self {
        self.lengths[ingress] = length;
        self
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_enabled(&self, ingress: IngressId) -> bool {
        self.enabled.get(ingress).copied().unwrap_or(false)
    }

    pub fn validate(&self, n_ingresses: usize) -> Result<(), SimError> {
        if self.lengths.len() != n_ingresses || self.enabled.len() != n_ingresses {
            return Err(SimError::InvalidConfig(format!(
                "expected {} ingresses, got {} lengths and {} enable flags",
                n_ingresses,
                self.lengths.len(),
                self.enabled.len()
            )));
        }
        if !self.enabled.iter().any(|e| *e) {
            return Err(SimError::InvalidConfig("no ingress enabled".into()));
        }
        for (i, (&s, &on)) in self.lengths.iter().zip(&self.enabled).enumerate() {
            if on && s > self.max_prepend {
                return Err(SimError::InvalidConfig(format!(
                    "ingress {i} prepends {s} > max {}",
                    self.max_prepend
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Flat,
    GaoRexford,
}

/// Per-AS behavior overrides, applied to routes as the AS imports them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum Rule {
    /// Caps the number of extra origin copies to `max_prepend`.
    TruncatePrepend { asn: Asn, max_prepend: u32 },
    /// Adds `extra` origin copies to every imported route.
    InflatePrepend { asn: Asn, extra: u32 },
    /// Lower-tier tie-break between equal-length routes by ingress: earlier
    /// entries win. Models origin-code or MED style preferences that differ
    /// from AS to AS.
    PreferIngress { asn: Asn, order: Vec<IngressId> },
}

impl Rule {
    fn asn(&self) -> Asn {
        match self {
            Rule::TruncatePrepend { asn, .. }
            | Rule::InflatePrepend { asn, .. }
            | Rule::PreferIngress { asn, .. } => *asn,
        }
    }
}

/// Relationship class of a route at the selecting AS. Lower is preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteClass {
    Customer,
    Peer,
    Provider,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub ingress_id: IngressId,
    /// Origin block first, then every traversed AS; excludes the holder.
    pub as_path: Vec<Asn>,
    pub learned_from: Asn,
    pub latency_ms: f64,
    pub class: RouteClass,
}

impl Route {
    pub fn path_len(&self) -> usize {
        self.as_path.len()
    }

    /// Number of origin copies at the head of the path.
    pub fn origin_copies(&self) -> usize {
        let first = self.as_path[0];
        self.as_path.iter().take_while(|&&a| a == first).count()
    }
}

/// Selected route of every AS that has one.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteState {
    pub selected: BTreeMap<Asn, Route>,
    pub rounds: usize,
}

/// Catchment: which ingress each reachable client lands on, and its RTT.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub assignment: BTreeMap<Asn, IngressId>,
    pub rtt: BTreeMap<Asn, f64>,
}

impl Mapping {
    pub fn ingress_of(&self, client: Asn) -> Option<IngressId> {
        self.assignment.get(&client).copied()
    }

    pub fn clients_of(&self, ingress: IngressId) -> BTreeSet<Asn> {
        self.assignment
            .iter()
            .filter(|(_, &i)| i == ingress)
            .map(|(&c, _)| c)
            .collect()
    }

    pub fn mean_rtt(&self) -> Option<f64> {
        if self.rtt.is_empty() {
            None
        } else {
            Some(self.rtt.values().sum::<f64>() / self.rtt.len() as f64)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Neighbor {
    idx: usize,
    latency_ms: f64,
    /// Class of routes learned from this neighbor.
    class: RouteClass,
    /// Whether we are this neighbor's customer (it exports everything to us).
    we_are_customer: bool,
}

/// Index-based view of a topology, precomputed once per oracle.
#[derive(Debug, Clone)]
struct SimNet {
    asns: Vec<Asn>,
    origin: usize,
    neighbors: Vec<Vec<Neighbor>>,
    /// Per node: (ingress id, origin link latency) for ingresses it attaches.
    attachments: Vec<Vec<(IngressId, f64)>>,
    clients: Vec<usize>,
    n_ingresses: usize,
}

impl SimNet {
    fn new(t: &Topology) -> Self {
        let mut asns: Vec<Asn> = t.nodes.iter().map(|n| n.asn).collect();
        asns.sort_unstable();
        asns.dedup();
        let index: HashMap<Asn, usize> = asns.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut neighbors = vec![Vec::new(); asns.len()];
        let mut origin_latency: HashMap<Asn, f64> = HashMap::new();
        for l in &t.links {
            let (Some(&ia), Some(&ib)) = (index.get(&l.a), index.get(&l.b)) else {
                continue;
            };
            if l.a == t.origin {
                origin_latency.insert(l.b, l.latency_ms);
            } else if l.b == t.origin {
                origin_latency.insert(l.a, l.latency_ms);
            }
            let (class_at_a, class_at_b) = match l.relation {
                // a is the customer: b learns customer routes from a.
                Relation::CustomerProvider => (RouteClass::Provider, RouteClass::Customer),
                Relation::Peer | Relation::Flat => (RouteClass::Peer, RouteClass::Peer),
            };
            let cp = l.relation == Relation::CustomerProvider;
            neighbors[ia].push(Neighbor {
                idx: ib,
                latency_ms: l.latency_ms,
                class: class_at_a,
                we_are_customer: cp,
            });
            neighbors[ib].push(Neighbor {
                idx: ia,
                latency_ms: l.latency_ms,
                class: class_at_b,
                we_are_customer: false,
            });
        }
        for ns in &mut neighbors {
            ns.sort_by_key(|n| n.idx);
        }
        let mut attachments = vec![Vec::new(); asns.len()];
        for ing in &t.ingresses {
            if let (Some(&ti), Some(&lat)) =
                (index.get(&ing.transit_asn), origin_latency.get(&ing.transit_asn))
            {
                attachments[ti].push((ing.id, lat));
            }
        }
        let clients = t.clients.iter().filter_map(|c| index.get(c).copied()).collect();
        SimNet {
            origin: index[&t.origin],
            asns,
            neighbors,
            attachments,
            clients,
            n_ingresses: t.ingresses.len(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct NodeRules {
    truncate: Option<u32>,
    inflate: u32,
    prefer: Option<Vec<IngressId>>,
}

impl NodeRules {
    fn rewrite(&self, path: &mut Vec<Asn>, origin: Asn) {
        if self.truncate.is_none() && self.inflate == 0 {
            return;
        }
        let copies = path.iter().take_while(|&&a| a == origin).count();
        let mut keep = copies;
        if let Some(cap) = self.truncate {
            keep = keep.min(1 + cap as usize);
        }
        keep += self.inflate as usize;
        if keep != copies {
            let tail: Vec<Asn> = path[copies..].to_vec();
            path.clear();
            path.resize(keep, origin);
            path.extend(tail);
        }
    }

    fn tie_rank(&self, ingress: IngressId) -> usize {
        match &self.prefer {
            None => 0,
            Some(order) => order.iter().position(|&i| i == ingress).unwrap_or(order.len()),
        }
    }
}

type SelectionKey = (RouteClass, usize, usize, Asn, IngressId);

fn propagate_net(
    net: &SimNet,
    rules: &[NodeRules],
    mode: Mode,
    cfg: &PrependConfig,
) -> Result<RouteState, SimError> {
    cfg.validate(net.n_ingresses)?;
    let origin_asn = net.asns[net.origin];
    let n = net.asns.len();
    let mut state: Vec<Option<Route>> = vec![None; n];
    let bound = n + 1;
    for round in 1..=bound {
        let mut next: Vec<Option<Route>> = vec![None; n];
        for v in 0..n {
            if v == net.origin {
                continue;
            }
            let me = net.asns[v];
            let node_rules = &rules[v];
            let mut best: Option<(SelectionKey, Route)> = None;
            let mut offer = |route: Route| {
                let class = if mode == Mode::Flat { RouteClass::Customer } else { route.class };
                let key = (
                    class,
                    route.path_len(),
                    node_rules.tie_rank(route.ingress_id),
                    route.learned_from,
                    route.ingress_id,
                );
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, route));
                }
            };
            for &(ingress, lat) in &net.attachments[v] {
                if !cfg.enabled[ingress] {
                    continue;
                }
                let mut path = vec![origin_asn; 1 + cfg.lengths[ingress] as usize];
                node_rules.rewrite(&mut path, origin_asn);
                offer(Route {
                    ingress_id: ingress,
                    as_path: path,
                    learned_from: origin_asn,
                    latency_ms: lat,
                    class: RouteClass::Customer,
                });
            }
            for nb in &net.neighbors[v] {
                if nb.idx == net.origin {
                    continue;
                }
                let Some(r) = &state[nb.idx] else { continue };
                if mode == Mode::GaoRexford
                    && r.class != RouteClass::Customer
                    && !nb.we_are_customer
                {
                    continue;
                }
                if r.as_path.contains(&me) {
                    continue;
                }
                let mut path = Vec::with_capacity(r.as_path.len() + 1);
                path.extend_from_slice(&r.as_path);
                path.push(net.asns[nb.idx]);
                node_rules.rewrite(&mut path, origin_asn);
                offer(Route {
                    ingress_id: r.ingress_id,
                    as_path: path,
                    learned_from: net.asns[nb.idx],
                    latency_ms: r.latency_ms + nb.latency_ms,
                    class: nb.class,
                });
            }
            next[v] = best.map(|(_, r)| r);
        }
        if next == state {
            let selected = state
                .into_iter()
                .enumerate()
                .filter_map(|(i, r)| r.map(|r| (net.asns[i], r)))
                .collect();
            return Ok(RouteState { selected, rounds: round });
        }
        state = next;
    }
    Err(SimError::NonConvergence { rounds: bound })
}

fn compile_rules(net: &SimNet, rules: &[Rule]) -> Vec<NodeRules> {
    let mut out = vec![NodeRules::default(); net.asns.len()];
    for rule in rules {
        let Ok(i) = net.asns.binary_search(&rule.asn()) else { continue };
        match rule {
            Rule::TruncatePrepend { max_prepend, .. } => {
                out[i].truncate = Some(out[i].truncate.map_or(*max_prepend, |c| c.min(*max_prepend)))
            }
            Rule::InflatePrepend { extra, .. } => out[i].inflate += extra,
            Rule::PreferIngress { order, .. } => out[i].prefer = Some(order.clone()),
        }
    }
    out
}

/// Flat-mode propagation without rewrite rules.
pub fn propagate(t: &Topology, cfg: &PrependConfig) -> Result<RouteState, SimError> {
    let net = SimNet::new(t);
    let rules = compile_rules(&net, &[]);
    propagate_net(&net, &rules, Mode::Flat, cfg)
}

fn mapping_from(net: &SimNet, state: &RouteState) -> Mapping {
    let mut m = Mapping::default();
    for &c in &net.clients {
        if let Some(r) = state.selected.get(&net.asns[c]) {
            m.assignment.insert(net.asns[c], r.ingress_id);
            // latencies carry at most microsecond precision; drop summation noise
            m.rtt.insert(net.asns[c], (2.0e3 * r.latency_ms).round() / 1e3);
        }
    }
    m
}

/// The network stand-in: every [`Oracle::experiment`] call is one routing
/// measurement and is charged to the experiment budget.
#[derive(Debug)]
pub struct Oracle {
    topology: Topology,
    mode: Mode,
    rules: Vec<Rule>,
    net: SimNet,
    compiled: Vec<NodeRules>,
    experiments: AtomicU64,
}

impl Clone for Oracle {
    fn clone(&self) -> Self {
        Oracle {
            topology: self.topology.clone(),
            mode: self.mode,
            rules: self.rules.clone(),
            net: self.net.clone(),
            compiled: self.compiled.clone(),
            experiments: AtomicU64::new(self.experiment_count()),
        }
    }
}

impl Oracle {
    pub fn new(topology: Topology) -> Self {
        Self::with_rules(topology, Mode::Flat, Vec::new())
    }

    pub fn with_rules(topology: Topology, mode: Mode, rules: Vec<Rule>) -> Self {
        let net = SimNet::new(&topology);
        let compiled = compile_rules(&net, &rules);
        Oracle { topology, mode, rules, net, compiled, experiments: AtomicU64::new(0) }
    }

    pub fn with_mode(topology: Topology, mode: Mode) -> Self {
        Self::with_rules(topology, mode, Vec::new())
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn n_ingresses(&self) -> usize {
        self.net.n_ingresses
    }

    pub fn experiment_count(&self) -> u64 {
        self.experiments.load(Ordering::SeqCst)
    }

    /// Full route state for `cfg`. Not charged to the budget; intended for
    /// inspection and tests.
    pub fn route_state(&self, cfg: &PrependConfig) -> Result<RouteState, SimError> {
        propagate_net(&self.net, &self.compiled, self.mode, cfg)
    }

    /// One measurement: the catchment and RTTs under `cfg`.
    pub fn experiment(&self, cfg: &PrependConfig) -> Result<Mapping, SimError> {
        self.experiments.fetch_add(1, Ordering::SeqCst);
        let state = propagate_net(&self.net, &self.compiled, self.mode, cfg)?;
        Ok(mapping_from(&self.net, &state))
    }
}

/// Selected ingress per client as `d = s_b - s_a` sweeps `-MAX..=MAX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub a: IngressId,
    pub b: IngressId,
    pub d_values: Vec<i32>,
    /// Clients that select `a` or `b` somewhere in the sweep.
    pub rows: BTreeMap<Asn, Vec<Option<IngressId>>>,
}

impl SweepTable {
    /// Number of positions where the row differs from its predecessor.
    pub fn changes(row: &[Option<IngressId>]) -> usize {
        row.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Smallest `d` from which the client sits on `ingress` for the rest of
    /// the sweep, if it ends there.
    pub fn settles_on(&self, client: Asn, ingress: IngressId) -> Option<i32> {
        let row = self.rows.get(&client)?;
        if row.last().copied().flatten() != Some(ingress) {
            return None;
        }
        let start = row.iter().rposition(|x| *x != Some(ingress)).map_or(0, |p| p + 1);
        Some(self.d_values[start])
    }

    /// Largest `d` up to which the client sits on `ingress` from the start.
    pub fn holds_until(&self, client: Asn, ingress: IngressId) -> Option<i32> {
        let row = self.rows.get(&client)?;
        if row.first().copied().flatten() != Some(ingress) {
            return None;
        }
        let end = row.iter().position(|x| *x != Some(ingress)).unwrap_or(row.len());
        Some(self.d_values[end - 1])
    }
}

/// The prepend pair realizing difference `d = s_b - s_a` with the smaller
/// side at zero.
pub fn pair_lengths(d: i32) -> (u32, u32) {
    if d >= 0 {
        (0, d as u32)
    } else {
        ((-d) as u32, 0)
    }
}

/// Sweeps the prepend difference of ingresses `a` and `b` while every other
/// ingress keeps its value (and enabled flag) from `base`.
pub fn sweep_pair_difference(
    oracle: &Oracle,
    a: IngressId,
    b: IngressId,
    base: &PrependConfig,
) -> Result<SweepTable, SimError> {
    if a == b {
        return Err(SimError::InvalidConfig(format!("sweep needs two distinct ingresses, got {a} twice")));
    }
    let max = base.max_prepend as i32;
    let d_values: Vec<i32> = (-max..=max).collect();
    let mut per_d = Vec::with_capacity(d_values.len());
    for &d in &d_values {
        let (sa, sb) = pair_lengths(d);
        let cfg = base.clone().with(a, sa).with(b, sb);
        per_d.push(oracle.experiment(&cfg)?);
    }
    let mut clients = BTreeSet::new();
    for m in &per_d {
        for (&c, &i) in &m.assignment {
            if i == a || i == b {
                clients.insert(c);
            }
        }
    }
    let rows = clients
        .into_iter()
        .map(|c| (c, per_d.iter().map(|m| m.ingress_of(c)).collect()))
        .collect();
    Ok(SweepTable { a, b, d_values, rows })
}

#[cfg(test)]
mod tests {
    use crate::fixtures::*;
    use super::*;
    use crate::topology::{generate_random_topology, validate};

    /// Ingress A two hops from client 9, ingress B four hops.
    fn two_four() -> Topology {
        let t = flat(&[(1, 9), (2, 3), (3, 4), (4, 9)], &[1, 2], &[9]);
        assert!(validate(&t).is_empty(), "{:?}", validate(&t));
        t
    }

    #[test]
    fn single_ingress_everyone_lands_on_it() {
        let t = generate_random_topology(1, 20, 5, 0.5, 3).unwrap();
        let o = Oracle::new(t.clone());
        for s in [0, 2, 5] {
            let m = o.experiment(&PrependConfig::uniform(1, s, 5)).unwrap();
            assert_eq!(m.assignment.len(), t.clients.len());
            assert!(m.assignment.values().all(|&i| i == 0));
        }
    }

    #[test]
    fn shorter_path_wins_and_prepend_flips() {
        let o = Oracle::new(two_four());
        let m = o.experiment(&PrependConfig::all_zero(2, 3)).unwrap();
        assert_eq!(m.ingress_of(9), Some(0));
        // lengths 1+3+1 = 5 vs 1+0+3 = 4
        let m = o.experiment(&PrependConfig::all_zero(2, 3).with(0, 3)).unwrap();
        assert_eq!(m.ingress_of(9), Some(1));
        let st = o.route_state(&PrependConfig::all_zero(2, 3).with(0, 3)).unwrap();
        assert_eq!(st.selected[&9].path_len(), 4);
    }

    #[test]
    fn as_path_shape() {
        let o = Oracle::new(two_four());
        let st = o.route_state(&PrependConfig::all_zero(2, 3).with(0, 2)).unwrap();
        let r = &st.selected[&1];
        assert_eq!(r.as_path, vec![ORIGIN; 3]);
        assert_eq!(r.origin_copies(), 3);
        let r = &st.selected[&9];
        assert_eq!(r.as_path.first(), Some(&ORIGIN));
        // no AS repeats outside the origin block
        let tail = &r.as_path[r.origin_copies()..];
        let set: BTreeSet<_> = tail.iter().collect();
        assert_eq!(set.len(), tail.len());
        assert!(!tail.contains(&ORIGIN));
    }

    #[test]
    fn rtt_is_twice_path_latency() {
        let o = Oracle::new(two_four());
        let m = o.experiment(&PrependConfig::all_zero(2, 3)).unwrap();
        // origin->1, 1->9
        assert_eq!(m.rtt[&9], 4.0);
    }

    #[test]
    fn disabled_ingress_gets_nobody() {
        let o = Oracle::new(two_four());
        let cfg = PrependConfig::all_zero(2, 3).with_enabled(&[false, true]);
        let m = o.experiment(&cfg).unwrap();
        assert_eq!(m.ingress_of(9), Some(1));
        assert!(m.clients_of(0).is_empty());
    }

    #[test]
    fn repeated_experiments_identical_and_counted() {
        let t = generate_random_topology(4, 40, 10, 0.3, 11).unwrap();
        let o = Oracle::new(t);
        let cfg = PrependConfig::all_zero(4, 5).with(2, 3);
        let before = o.experiment_count();
        let m1 = o.experiment(&cfg).unwrap();
        let m2 = o.experiment(&cfg).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(serde_json::to_string(&m1).unwrap(), serde_json::to_string(&m2).unwrap());
        assert_eq!(o.experiment_count(), before + 2);
    }

    #[test]
    fn truncation_makes_large_prepends_transparent() {
        let t = generate_random_topology(3, 30, 8, 0.4, 5).unwrap();
        let transit = t.ingresses[1].transit_asn;
        let o = Oracle::with_rules(
            t,
            Mode::Flat,
            vec![Rule::TruncatePrepend { asn: transit, max_prepend: 3 }],
        );
        let m9 = o.experiment(&PrependConfig::all_zero(3, 9).with(1, 9)).unwrap();
        let m3 = o.experiment(&PrependConfig::all_zero(3, 9).with(1, 3)).unwrap();
        assert_eq!(m9, m3);
    }

    #[test]
    fn inflation_lengthens_paths() {
        let t = two_four();
        let o = Oracle::with_rules(t, Mode::Flat, vec![Rule::InflatePrepend { asn: 1, extra: 3 }]);
        let m = o.experiment(&PrependConfig::all_zero(2, 3)).unwrap();
        assert_eq!(m.ingress_of(9), Some(1));
    }

    #[test]
    fn invalid_config_rejected() {
        let o = Oracle::new(two_four());
        assert!(o.experiment(&PrependConfig::all_zero(3, 3)).is_err());
        assert!(o.experiment(&PrependConfig::all_zero(2, 3).with(0, 4)).is_err());
        let none = PrependConfig::all_zero(2, 3).with_enabled(&[false, false]);
        assert!(matches!(o.experiment(&none), Err(SimError::InvalidConfig(_))));
    }

    #[test]
    fn gao_rexford_blocks_valleys() {
        // origin -> T1, T2 (both providers of origin). X is a customer of T1
        // and of T2, client C is a customer of X. Without policy T2 could
        // reach T1's route through X; valley-free export forbids X from
        // re-exporting provider-learned routes upward.
        let mut t = flat(&[(1, 5), (2, 5), (5, 9)], &[1, 2], &[9]);
        for l in &mut t.links {
            l.relation = Relation::CustomerProvider;
            if l.b == ORIGIN {
                std::mem::swap(&mut l.a, &mut l.b);
            }
            if (l.a, l.b) == (1, 5) || (l.a, l.b) == (2, 5) {
                std::mem::swap(&mut l.a, &mut l.b);
            }
            if (l.a, l.b) == (5, 9) {
                std::mem::swap(&mut l.a, &mut l.b);
            }
        }
        let cfg = PrependConfig::all_zero(2, 3).with_enabled(&[true, false]);
        let flat_state = Oracle::with_mode(t.clone(), Mode::Flat).route_state(&cfg).unwrap();
        assert!(flat_state.selected.contains_key(&2));
        let gr = Oracle::with_mode(t, Mode::GaoRexford).route_state(&cfg).unwrap();
        assert!(!gr.selected.contains_key(&2));
        assert_eq!(gr.selected[&9].ingress_id, 0);
    }

    #[test]
    fn sweep_rows_flip_once() {
        let o = Oracle::new(two_four());
        let table = sweep_pair_difference(&o, 0, 1, &PrependConfig::all_max(2, 3)).unwrap();
        let row = &table.rows[&9];
        assert_eq!(row.len(), 7);
        assert_eq!(SweepTable::changes(row), 1);
        // A is two hops shorter: B wins only when s_A - s_B >= 3, i.e. d = -3
        assert_eq!(row[0], Some(1));
        assert_eq!(table.settles_on(9, 0), Some(-2));
        assert_eq!(table.holds_until(9, 1), Some(-3));
    }

    #[test]
    fn sweep_with_disabled_partner_is_constant() {
        let o = Oracle::new(two_four());
        let base = PrependConfig::all_max(2, 3).with_enabled(&[true, false]);
        let table = sweep_pair_difference(&o, 0, 1, &base).unwrap();
        assert!(table.rows[&9].iter().all(|x| *x == Some(0)));
        assert!(sweep_pair_difference(&o, 1, 1, &base).is_err());
    }
}
