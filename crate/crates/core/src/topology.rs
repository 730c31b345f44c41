//! AS-level world model: ASes, links with latencies, clients and the ingresses
//! through which the anycast origin announces its prefix.
//!
//! Topologies are plain values. Everything in here is deterministic: the
//! generators draw from a seeded ChaCha stream and the JSON writer emits a
//! canonical, byte-stable document.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Autonomous system number.
pub type Asn = u32;

/// Dense ingress index, `0..n`.
pub type IngressId = usize;

/// Attempts made by the random generators before giving up on connectivity.
pub const MAX_GENERATION_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Origin,
    Transit,
    Intermediate,
    Client,
}

/// Business relationship of a link. Only consulted by the policy-aware
/// propagation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Flat,
    /// `a` is a customer of `b`.
    CustomerProvider,
    Peer,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Flat => "flat",
            Relation::CustomerProvider => "customer-provider",
            Relation::Peer => "peer",
        }
    }
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Origin => "origin",
            Role::Transit => "transit",
            Role::Intermediate => "intermediate",
            Role::Client => "client",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsNode {
    pub asn: Asn,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub a: Asn,
    pub b: Asn,
    pub latency_ms: f64,
    pub relation: Relation,
}

/// A unique (PoP, transit provider) pair: the unit of prepending control.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ingress {
    pub id: IngressId,
    pub pop: String,
    pub transit_asn: Asn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub origin: Asn,
    pub nodes: Vec<AsNode>,
    pub links: Vec<Link>,
    pub ingresses: Vec<Ingress>,
    pub clients: Vec<Asn>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    DuplicateAsn,
    OriginCount,
    OriginMismatch,
    UnknownAsn,
    SelfLoop,
    DuplicateLink,
    NegativeLatency,
    IngressIdNotDense,
    DuplicateIngress,
    IngressDetached,
    ClientRole,
    ClientUnreachable,
    Disconnected,
    PopOnNonAttachment,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::DuplicateAsn => "duplicate-asn",
            ViolationKind::OriginCount => "origin-count",
            ViolationKind::OriginMismatch => "origin-mismatch",
            ViolationKind::UnknownAsn => "unknown-asn",
            ViolationKind::SelfLoop => "self-loop",
            ViolationKind::DuplicateLink => "duplicate-link",
            ViolationKind::NegativeLatency => "negative-latency",
            ViolationKind::IngressIdNotDense => "ingress-id-not-dense",
            ViolationKind::DuplicateIngress => "duplicate-ingress",
            ViolationKind::IngressDetached => "ingress-detached",
            ViolationKind::ClientRole => "client-role",
            ViolationKind::ClientUnreachable => "client-unreachable",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::PopOnNonAttachment => "pop-on-non-attachment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.detail)
    }
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("topology parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid topology: {}", join_violations(.0))]
    Semantic(Vec<Violation>),
    #[error("invalid generator arguments: {0}")]
    InvalidArgument(String),
    #[error("no connected topology found after {0} attempts")]
    GenerationFailed(usize),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Topology {
    pub fn n_ingresses(&self) -> usize {
        self.ingresses.len()
    }

    pub fn node(&self, asn: Asn) -> Option<&AsNode> {
        self.nodes.iter().find(|n| n.asn == asn)
    }

    /// Distinct PoP identifiers in ingress order of first appearance.
    pub fn pops(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for ing in &self.ingresses {
            if seen.insert(ing.pop.clone()) {
                out.push(ing.pop.clone());
            }
        }
        out
    }

    /// Sorts every list into canonical order, orients undirected links
    /// `a < b` and rounds latencies to three decimals.
    pub fn canonicalize(&mut self) {
        self.nodes.sort_by_key(|n| n.asn);
        for l in &mut self.links {
            if l.relation != Relation::CustomerProvider && l.a > l.b {
                std::mem::swap(&mut l.a, &mut l.b);
            }
            l.latency_ms = round3(l.latency_ms);
        }
        self.links.sort_by_key(|l| (l.a.min(l.b), l.a.max(l.b)));
        self.ingresses.sort_by_key(|i| i.id);
        self.clients.sort_unstable();
    }

    pub fn canonical(&self) -> Topology {
        let mut t = self.clone();
        t.canonicalize();
        t
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Checks every structural invariant. An empty result means the topology is
/// valid; violations are data, not errors.
pub fn validate(t: &Topology) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, detail: String| out.push(Violation { kind, detail });

    let mut roles: HashMap<Asn, Role> = HashMap::new();
    for n in &t.nodes {
        if roles.insert(n.asn, n.role).is_some() {
            push(ViolationKind::DuplicateAsn, format!("asn {} declared twice", n.asn));
        }
        if n.pop.is_some() && !matches!(n.role, Role::Origin | Role::Transit) {
            push(
                ViolationKind::PopOnNonAttachment,
                format!("asn {} has a pop tag but role {}", n.asn, n.role.as_str()),
            );
        }
    }
    let origins: Vec<Asn> = t
        .nodes
        .iter()
        .filter(|n| n.role == Role::Origin)
        .map(|n| n.asn)
        .collect();
    if origins.len() != 1 {
        push(
            ViolationKind::OriginCount,
            format!("expected exactly one origin AS, found {}", origins.len()),
        );
    }
    if roles.get(&t.origin) != Some(&Role::Origin) {
        push(
            ViolationKind::OriginMismatch,
            format!("origin {} is not declared with role origin", t.origin),
        );
    }

    let mut pairs = BTreeSet::new();
    let mut adj: HashMap<Asn, Vec<Asn>> = HashMap::new();
    for l in &t.links {
        for end in [l.a, l.b] {
            if !roles.contains_key(&end) {
                push(ViolationKind::UnknownAsn, format!("link endpoint {end} is not a node"));
            }
        }
        if l.a == l.b {
            push(ViolationKind::SelfLoop, format!("link {}-{}", l.a, l.b));
            continue;
        }
        if !pairs.insert((l.a.min(l.b), l.a.max(l.b))) {
            push(ViolationKind::DuplicateLink, format!("link {}-{} repeated", l.a, l.b));
        }
        if !(l.latency_ms >= 0.0) {
            push(
                ViolationKind::NegativeLatency,
                format!("negative latency {} on link {}-{}", l.latency_ms, l.a, l.b),
            );
        }
        adj.entry(l.a).or_default().push(l.b);
        adj.entry(l.b).or_default().push(l.a);
    }

    let mut ids: Vec<IngressId> = t.ingresses.iter().map(|i| i.id).collect();
    ids.sort_unstable();
    if ids.iter().enumerate().any(|(k, id)| k != *id) {
        push(
            ViolationKind::IngressIdNotDense,
            "ingress ids are not the dense range 0..n".to_string(),
        );
    }
    let mut ingress_keys = BTreeSet::new();
    for ing in &t.ingresses {
        if !ingress_keys.insert((ing.pop.clone(), ing.transit_asn)) {
            push(
                ViolationKind::DuplicateIngress,
                format!("ingress ({}, {}) repeated", ing.pop, ing.transit_asn),
            );
        }
        if !pairs.contains(&(ing.transit_asn.min(t.origin), ing.transit_asn.max(t.origin))) {
            push(
                ViolationKind::IngressDetached,
                format!(
                    "ingress {} transit {} is not adjacent to origin {}",
                    ing.id, ing.transit_asn, t.origin
                ),
            );
        }
    }

    let reach_origin = bfs(&adj, t.origin, |_| true);
    for c in &t.clients {
        if roles.get(c) != Some(&Role::Client) {
            push(ViolationKind::ClientRole, format!("client {c} does not have role client"));
        }
        if !reach_origin.contains(c) {
            push(ViolationKind::ClientUnreachable, format!("client {c} has no path to origin"));
        }
    }

    let core: Vec<Asn> = t
        .nodes
        .iter()
        .filter(|n| n.role != Role::Client)
        .map(|n| n.asn)
        .collect();
    if let Some(&start) = core.first() {
        let seen = bfs(&adj, start, |a| roles.get(&a).is_some_and(|r| *r != Role::Client));
        if let Some(miss) = core.iter().find(|a| !seen.contains(a)) {
            push(
                ViolationKind::Disconnected,
                format!("non-client graph is disconnected (asn {miss} unreachable)"),
            );
        }
    }
    out
}

fn bfs(adj: &HashMap<Asn, Vec<Asn>>, start: Asn, allow: impl Fn(Asn) -> bool) -> BTreeSet<Asn> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if allow(v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Writes the canonical document: sorted keys, ascending arrays and
/// latencies with exactly three decimals.
pub fn save_topology(t: &Topology) -> String {
    let t = t.canonical();
    let esc = |s: &str| serde_json::to_string(s).expect("string serialization");
    let mut out = String::from("{\n");

    out.push_str("  \"clients\": [");
    out.push_str(&t.clients.iter().map(u32::to_string).collect::<Vec<_>>().join(", "));
    out.push_str("],\n");

    out.push_str("  \"ingresses\": [\n");
    let rows: Vec<String> = t
        .ingresses
        .iter()
        .map(|i| {
            format!(
                "    {{\"id\": {}, \"pop\": {}, \"transit_asn\": {}}}",
                i.id,
                esc(&i.pop),
                i.transit_asn
            )
        })
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ],\n");

    out.push_str("  \"links\": [\n");
    let rows: Vec<String> = t
        .links
        .iter()
        .map(|l| {
            format!(
                "    {{\"a\": {}, \"b\": {}, \"latency_ms\": {:.3}, \"relation\": \"{}\"}}",
                l.a,
                l.b,
                l.latency_ms,
                l.relation.as_str()
            )
        })
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ],\n");

    out.push_str("  \"nodes\": [\n");
    let rows: Vec<String> = t
        .nodes
        .iter()
        .map(|n| match &n.pop {
            Some(p) => format!(
                "    {{\"asn\": {}, \"pop\": {}, \"role\": \"{}\"}}",
                n.asn,
                esc(p),
                n.role.as_str()
            ),
            None => format!("    {{\"asn\": {}, \"role\": \"{}\"}}", n.asn, n.role.as_str()),
        })
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ],\n");

    out.push_str(&format!("  \"origin\": {}\n}}\n", t.origin));
    out
}

/// Parses and validates a topology document. The result is canonicalized.
pub fn load_topology(document: &str) -> Result<Topology, TopologyError> {
    let mut t: Topology = serde_json::from_str(document).map_err(|e| TopologyError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    t.canonicalize();
    let violations = validate(&t);
    if violations.is_empty() {
        Ok(t)
    } else {
        Err(TopologyError::Semantic(violations))
    }
}

const ORIGIN_ASN: Asn = 64512;
const TRANSIT_BASE: Asn = 100;
const INTERMEDIATE_BASE: Asn = 1000;
const CLIENT_BASE: Asn = 10000;

fn latency(rng: &mut ChaCha8Rng) -> f64 {
    round3(rng.gen_range(1.0..=100.0))
}

struct Builder {
    nodes: Vec<AsNode>,
    links: BTreeMap<(Asn, Asn), Link>,
}

impl Builder {
    fn new(origin: Asn) -> Self {
        Builder {
            nodes: vec![AsNode { asn: origin, role: Role::Origin, pop: None }],
            links: BTreeMap::new(),
        }
    }

    fn node(&mut self, asn: Asn, role: Role) {
        if !self.nodes.iter().any(|n| n.asn == asn) {
            self.nodes.push(AsNode { asn, role, pop: None });
        }
    }

    /// `customer` is a customer of `provider` when `rel` is customer-provider.
    fn link(&mut self, customer: Asn, provider: Asn, latency_ms: f64, rel: Relation) -> bool {
        let key = (customer.min(provider), customer.max(provider));
        if customer == provider || self.links.contains_key(&key) {
            return false;
        }
        let (a, b) = match rel {
            Relation::CustomerProvider => (customer, provider),
            _ => key,
        };
        self.links.insert(key, Link { a, b, latency_ms, relation: rel });
        true
    }

    fn finish(self, origin: Asn, ingresses: Vec<Ingress>, clients: Vec<Asn>) -> Topology {
        let mut t = Topology {
            origin,
            nodes: self.nodes,
            links: self.links.into_values().collect(),
            ingresses,
            clients,
        };
        t.canonicalize();
        t
    }
}

fn core_connected(t: &Topology) -> bool {
    validate(t).iter().all(|v| v.kind != ViolationKind::Disconnected)
}

/// Intermediate tier for relationship labels: lower index is higher tier.
fn tier(idx: usize, n: usize) -> usize {
    (idx * 3) / n.max(1)
}

fn intermediate_relation(i: usize, j: usize, n: usize) -> (usize, usize, Relation) {
    let (ti, tj) = (tier(i, n), tier(j, n));
    match ti.cmp(&tj) {
        std::cmp::Ordering::Equal => (i.min(j), i.max(j), Relation::Peer),
        // customer first
        std::cmp::Ordering::Greater => (i, j, Relation::CustomerProvider),
        std::cmp::Ordering::Less => (j, i, Relation::CustomerProvider),
    }
}

/// Random flat-ish AS graph: one transit per ingress hanging off the origin,
/// an Erdős–Rényi mesh of intermediates, and stub clients attached to one to
/// three intermediates. Relationship labels follow a three-tier hierarchy so
/// the policy mode has an acyclic provider graph.
pub fn generate_random_topology(
    n_ingresses: usize,
    n_clients: usize,
    n_intermediate: usize,
    density: f64,
    seed: u64,
) -> Result<Topology, TopologyError> {
    if n_ingresses == 0 || n_clients == 0 || n_intermediate == 0 {
        return Err(TopologyError::InvalidArgument(
            "n_ingresses, n_clients and n_intermediate must all be at least 1".into(),
        ));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(TopologyError::InvalidArgument(format!(
            "density {density} outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut b = Builder::new(ORIGIN_ASN);
        let inter: Vec<Asn> = (0..n_intermediate).map(|i| INTERMEDIATE_BASE + i as Asn).collect();
        let mut ingresses = Vec::with_capacity(n_ingresses);
        for i in 0..n_ingresses {
            let transit = TRANSIT_BASE + i as Asn;
            b.node(transit, Role::Transit);
            let lat = latency(&mut rng);
            b.link(ORIGIN_ASN, transit, lat, Relation::CustomerProvider);
            ingresses.push(Ingress { id: i, pop: format!("pop-{i}"), transit_asn: transit });
        }
        for &a in &inter {
            b.node(a, Role::Intermediate);
        }
        for i in 0..n_intermediate {
            for j in (i + 1)..n_intermediate {
                if rng.gen_bool(density) {
                    let (c, p, rel) = intermediate_relation(i, j, n_intermediate);
                    let lat = latency(&mut rng);
                    b.link(inter[c], inter[p], lat, rel);
                }
            }
        }
        for i in 0..n_ingresses {
            let k = rng.gen_range(1..=2usize.min(n_intermediate));
            for &m in inter.choose_multiple(&mut rng, k) {
                let lat = latency(&mut rng);
                b.link(m, TRANSIT_BASE + i as Asn, lat, Relation::CustomerProvider);
            }
        }
        let mut clients = Vec::with_capacity(n_clients);
        for c in 0..n_clients {
            let asn = CLIENT_BASE + c as Asn;
            b.node(asn, Role::Client);
            let k = rng.gen_range(1..=3usize.min(n_intermediate));
            for &m in inter.choose_multiple(&mut rng, k) {
                let lat = latency(&mut rng);
                b.link(asn, m, lat, Relation::CustomerProvider);
            }
            clients.push(asn);
        }
        let t = b.finish(ORIGIN_ASN, ingresses, clients);
        if core_connected(&t) {
            return Ok(t);
        }
    }
    Err(TopologyError::GenerationFailed(MAX_GENERATION_ATTEMPTS))
}

/// Latency-aligned world: every region has one ingress, a cluster of
/// intermediates joined by short links, and clients close to their own
/// region. Regions are chained in a ring of long-haul links, with a few
/// extra long-haul shortcuts so some clients are pulled off-region at zero
/// prepending. Ingress `r` sits in region `r` (pop `region-r`).
pub fn generate_regional_topology(
    n_regions: usize,
    clients_per_region: usize,
    seed: u64,
) -> Result<Topology, TopologyError> {
    if n_regions < 2 || clients_per_region == 0 {
        return Err(TopologyError::InvalidArgument(
            "need at least two regions and one client per region".into(),
        ));
    }
    const PER_REGION: usize = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(ORIGIN_ASN);
    let mut ingresses = Vec::new();
    let mut clients = Vec::new();
    let inter = |r: usize, k: usize| INTERMEDIATE_BASE + (r * PER_REGION + k) as Asn;
    for r in 0..n_regions {
        let transit = TRANSIT_BASE + r as Asn;
        b.node(transit, Role::Transit);
        b.link(ORIGIN_ASN, transit, round3(rng.gen_range(1.0..3.0)), Relation::CustomerProvider);
        ingresses.push(Ingress { id: r, pop: format!("region-{r}"), transit_asn: transit });
        for k in 0..PER_REGION {
            b.node(inter(r, k), Role::Intermediate);
        }
        b.link(inter(r, 0), transit, round3(rng.gen_range(1.0..5.0)), Relation::CustomerProvider);
        for k in 1..PER_REGION {
            b.link(inter(r, k), inter(r, k - 1), round3(rng.gen_range(1.0..5.0)), Relation::CustomerProvider);
        }
    }
    for r in 0..n_regions {
        let next = (r + 1) % n_regions;
        b.link(inter(r, 0), inter(next, 0), round3(rng.gen_range(40.0..90.0)), Relation::Peer);
    }
    for r in 0..n_regions {
        if rng.gen_bool(0.5) {
            let far = (r + rng.gen_range(1..n_regions)) % n_regions;
            let k = rng.gen_range(1..PER_REGION);
            b.link(inter(r, k), TRANSIT_BASE + far as Asn, round3(rng.gen_range(60.0..120.0)), Relation::CustomerProvider);
        }
    }
    for r in 0..n_regions {
        for c in 0..clients_per_region {
            let asn = CLIENT_BASE + (r * clients_per_region + c) as Asn;
            b.node(asn, Role::Client);
            let k = rng.gen_range(1..=2usize);
            let picks: Vec<usize> = (0..PER_REGION).collect::<Vec<_>>().choose_multiple(&mut rng, k).copied().collect();
            for m in picks {
                b.link(asn, inter(r, m), round3(rng.gen_range(1.0..5.0)), Relation::CustomerProvider);
            }
            clients.push(asn);
        }
    }
    let t = b.finish(ORIGIN_ASN, ingresses, clients);
    debug_assert!(validate(&t).is_empty());
    Ok(t)
}

/// PoP → transit providers of the 20-PoP production testbed, in table order.
pub const TESTBED_PLAN: &[(&str, &[(&str, Asn)])] = &[
    ("Malaysia", &[("NTT", 2914), ("AIMS", 24218)]),
    ("Madrid", &[("TATA", 6453)]),
    ("Manila", &[("PLDT-iGate", 9299), ("Globe", 4775)]),
    ("Hong Kong", &[("PCCW", 3491), ("NTT", 2914)]),
    ("Seoul", &[("SKB", 9318), ("TATA", 6453)]),
    ("Vancouver", &[("TATA", 6453)]),
    ("Ashburn", &[("Level3", 3356), ("Cogent", 174)]),
    ("Moscow", &[("Rostelecom", 12389), ("Megafon", 31133)]),
    ("Chicago", &[("CenturyLink", 3356), ("Cogent", 174)]),
    ("Ho Chi Minh", &[("VIETTEL", 7552), ("CMC", 45903)]),
    ("California", &[("NTT", 2914), ("TATA", 6453)]),
    ("Frankfurt", &[("Telia", 1299), ("TATA", 6453)]),
    ("Bangkok", &[("TATA", 6453), ("TrueIntl.Gateway", 38082)]),
    ("Singapore", &[("Singtel", 7473), ("TATA", 6453), ("PCCW", 3491)]),
    ("Sydney", &[("Telstra", 4637), ("Optus", 7474)]),
    ("Toronto", &[("TATA", 6453)]),
    ("India", &[("TATA", 4755), ("Airtel", 9498)]),
    ("Indonesia", &[("NTT", 2914), ("AOFEI", 135391)]),
    ("London", &[("TATA", 4755), ("Telia", 1299)]),
    ("Tokyo", &[("NTT", 2914), ("SoftBank", 17676)]),
];

/// `Pop/Transit_ASN` labels of the testbed ingresses, indexed by ingress id.
pub fn testbed_ingress_labels() -> Vec<String> {
    TESTBED_PLAN
        .iter()
        .flat_map(|(pop, transits)| {
            transits.iter().map(move |(name, asn)| format!("{pop}/{name}_{asn}"))
        })
        .collect()
}

const TESTBED_SEED: u64 = 0x5eed_2025;
const TESTBED_INTERMEDIATES: usize = 60;
const TESTBED_CLIENTS: usize = 300;

/// The 20-PoP / 38-ingress testbed. PoP and transit names come from the
/// deployment table; the intermediate mesh and the clients are synthetic but
/// generated from a fixed seed, so the fixture is stable.
pub fn build_testbed_fixture() -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(TESTBED_SEED);
    let mut b = Builder::new(ORIGIN_ASN);
    let mut ingresses = Vec::new();
    let mut transit_asns = BTreeSet::new();
    for (pop, transits) in TESTBED_PLAN {
        for &(_, asn) in transits.iter() {
            ingresses.push(Ingress { id: ingresses.len(), pop: pop.to_string(), transit_asn: asn });
            transit_asns.insert(asn);
        }
    }
    for &t in &transit_asns {
        b.node(t, Role::Transit);
        let lat = round3(rng.gen_range(1.0..10.0));
        b.link(ORIGIN_ASN, t, lat, Relation::CustomerProvider);
    }
    let inter: Vec<Asn> = (0..TESTBED_INTERMEDIATES).map(|i| INTERMEDIATE_BASE + i as Asn).collect();
    for &a in &inter {
        b.node(a, Role::Intermediate);
    }
    // Ring keeps the mesh connected; random chords add path diversity.
    for i in 0..TESTBED_INTERMEDIATES {
        let j = (i + 1) % TESTBED_INTERMEDIATES;
        let (c, p, rel) = intermediate_relation(i, j, TESTBED_INTERMEDIATES);
        let lat = latency(&mut rng);
        b.link(inter[c], inter[p], lat, rel);
    }
    for i in 0..TESTBED_INTERMEDIATES {
        for j in (i + 2)..TESTBED_INTERMEDIATES {
            if rng.gen_bool(0.06) {
                let (c, p, rel) = intermediate_relation(i, j, TESTBED_INTERMEDIATES);
                let lat = latency(&mut rng);
                b.link(inter[c], inter[p], lat, rel);
            }
        }
    }
    for &t in &transit_asns {
        let k = rng.gen_range(2..=4);
        for &m in inter.choose_multiple(&mut rng, k) {
            let lat = latency(&mut rng);
            b.link(m, t, lat, Relation::CustomerProvider);
        }
    }
    let mut clients = Vec::new();
    for c in 0..TESTBED_CLIENTS {
        let asn = CLIENT_BASE + c as Asn;
        b.node(asn, Role::Client);
        let k = rng.gen_range(1..=3);
        for &m in inter.choose_multiple(&mut rng, k) {
            let lat = latency(&mut rng);
            b.link(asn, m, lat, Relation::CustomerProvider);
        }
        clients.push(asn);
    }
    b.finish(ORIGIN_ASN, ingresses, clients)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(t: &Topology) -> Vec<ViolationKind> {
        validate(t).into_iter().map(|v| v.kind).collect()
    }

    #[test]
    fn single_ingress_generation() {
        let t = generate_random_topology(1, 5, 3, 1.0, 7).unwrap();
        assert_eq!(t.n_ingresses(), 1);
        assert_eq!(t.clients.len(), 5);
        assert!(validate(&t).is_empty());
    }

    #[test]
    fn generated_topologies_are_valid() {
        for (ni, nc, nm, d, seed) in [(4, 50, 12, 0.3, 42), (38, 200, 60, 0.2, 1), (3, 10, 1, 1.0, 3)] {
            let t = generate_random_topology(ni, nc, nm, d, seed).unwrap();
            assert!(validate(&t).is_empty(), "{:?}", validate(&t));
            assert_eq!(t.n_ingresses(), ni);
            for l in &t.links {
                assert!((1.0..=100.0).contains(&l.latency_ms) || l.a == t.origin || l.b == t.origin);
            }
        }
    }

    #[test]
    fn client_attachment_degree() {
        let t = generate_random_topology(4, 50, 12, 0.3, 42).unwrap();
        for c in &t.clients {
            let deg = t.links.iter().filter(|l| l.a == *c || l.b == *c).count();
            assert!((1..=3).contains(&deg));
        }
    }

    #[test]
    fn bad_arguments_rejected() {
        assert!(matches!(
            generate_random_topology(0, 5, 3, 0.5, 1),
            Err(TopologyError::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_random_topology(2, 5, 3, 0.0, 1),
            Err(TopologyError::InvalidArgument(_))
        ));
    }

    #[test]
    fn testbed_cardinality() {
        let t = build_testbed_fixture();
        assert!(validate(&t).is_empty(), "{:?}", validate(&t));
        assert_eq!(t.n_ingresses(), 38);
        assert_eq!(t.pops().len(), 20);
        let at = |pop: &str| -> Vec<Asn> {
            t.ingresses.iter().filter(|i| i.pop == pop).map(|i| i.transit_asn).collect()
        };
        assert_eq!(at("Singapore"), vec![7473, 6453, 3491]);
        assert_eq!(at("Madrid"), vec![6453]);
        let labels = testbed_ingress_labels();
        assert_eq!(labels[0], "Malaysia/NTT_2914");
        assert_eq!(labels[1], "Malaysia/AIMS_24218");
        assert_eq!(labels.len(), 38);
    }

    #[test]
    fn detached_ingress_is_reported() {
        let mut t = generate_random_topology(2, 4, 3, 1.0, 5).unwrap();
        t.ingresses[1].transit_asn = INTERMEDIATE_BASE;
        assert_eq!(kinds(&t), vec![ViolationKind::IngressDetached]);
    }

    #[test]
    fn duplicate_asn_is_reported() {
        let mut t = generate_random_topology(2, 4, 3, 1.0, 5).unwrap();
        t.nodes.push(AsNode { asn: INTERMEDIATE_BASE, role: Role::Intermediate, pop: None });
        assert!(kinds(&t).contains(&ViolationKind::DuplicateAsn));
    }

    #[test]
    fn self_loop_and_duplicate_link() {
        let mut t = generate_random_topology(2, 4, 3, 1.0, 5).unwrap();
        t.links.push(Link { a: 100, b: 100, latency_ms: 1.0, relation: Relation::Flat });
        let l0 = t.links[0].clone();
        t.links.push(Link { a: l0.b, b: l0.a, ..l0 });
        let k = kinds(&t);
        assert!(k.contains(&ViolationKind::SelfLoop));
        assert!(k.contains(&ViolationKind::DuplicateLink));
    }

    #[test]
    fn round_trip_and_byte_stability() {
        let t = generate_random_topology(4, 50, 12, 0.3, 42).unwrap();
        let doc = save_topology(&t);
        let back = load_topology(&doc).unwrap();
        assert_eq!(back, t);
        assert_eq!(save_topology(&back), doc);
        let again = generate_random_topology(4, 50, 12, 0.3, 42).unwrap();
        assert_eq!(save_topology(&again), doc);
    }

    #[test]
    fn missing_origin_names_field() {
        let t = generate_random_topology(1, 2, 1, 1.0, 1).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&save_topology(&t)).unwrap();
        v.as_object_mut().unwrap().remove("origin");
        let err = load_topology(&v.to_string()).unwrap_err();
        match err {
            TopologyError::Parse { message, .. } => assert!(message.contains("origin"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_latency_is_semantic_error() {
        let t = generate_random_topology(1, 2, 1, 1.0, 1).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&save_topology(&t)).unwrap();
        v["links"][0]["latency_ms"] = serde_json::json!(-1.0);
        let err = load_topology(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("negative latency"), "{err}");
    }

    #[test]
    fn regional_topology_is_valid() {
        let t = generate_regional_topology(5, 8, 3).unwrap();
        assert!(validate(&t).is_empty(), "{:?}", validate(&t));
        assert_eq!(t.n_ingresses(), 5);
        assert_eq!(t.clients.len(), 40);
    }
}
