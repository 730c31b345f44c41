//! Weighted Max-SAT over difference-constraint atoms.
//!
//! Each soft group is a conjunction of atoms `s_l <= s_r + c` with a weight;
//! the goal is a prepend vector in `[0, MAX]^n` maximizing the weight of
//! satisfied groups. [`solve`] is an exact depth-first branch and bound over
//! the prepend variables, [`solve_bruteforce`] enumerates everything and is
//! the reference for tests.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bgp_sim::PrependConfig;
use crate::constraints::Atom;
use crate::polling::{ClientGroup, Label};

/// Upper bound on the number of configurations [`solve_bruteforce`] visits.
pub const BRUTEFORCE_LIMIT: u64 = 10_000_000;

/// Pairwise group-conflict checks done before the bound degrades to the
/// plain alive-weight bound.
const CONFLICT_CHECK_LIMIT: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("atom {atom} out of range for n = {n}, MAX = {max}")]
    AtomOutOfRange { atom: String, n: usize, max: u32 },
    #[error("instance too large for brute force: {configs} configurations")]
    TooLarge { configs: u128 },
    #[error("malformed instance document: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// difference-constraint systems

/// Shortest distances from `source`, or `None` on a negative cycle.
fn bellman_ford(n_nodes: usize, edges: &[(usize, usize, i64)], source: usize) -> Option<Vec<i64>> {
    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![INF; n_nodes];
    dist[source] = 0;
    for _ in 0..n_nodes {
        let mut changed = false;
        for &(u, v, w) in edges {
            if dist[u] < INF && dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
    }
    None
}

fn var_count(atoms: &[Atom]) -> usize {
    atoms.iter().map(|a| a.lhs.max(a.rhs) + 1).max().unwrap_or(0)
}

/// Solution of `atoms` with per-variable bounds `lo[v] <= s_v <= hi[v]`:
/// the component-wise greatest one, or the least one when `least` is set.
fn extreme_solution(atoms: &[Atom], lo: &[i64], hi: &[i64], least: bool) -> Option<Vec<i64>> {
    let n = lo.len();
    let z = n;
    let mut edges = Vec::with_capacity(atoms.len() + 2 * n);
    if least {
        // y = -s: s_l - s_r <= c  <=>  y_r - y_l <= c
        for a in atoms {
            edges.push((a.lhs, a.rhs, a.offset as i64));
        }
        for v in 0..n {
            edges.push((z, v, -lo[v]));
            edges.push((v, z, hi[v]));
        }
    } else {
        for a in atoms {
            edges.push((a.rhs, a.lhs, a.offset as i64));
        }
        for v in 0..n {
            edges.push((z, v, hi[v]));
            edges.push((v, z, -lo[v]));
        }
    }
    let dist = bellman_ford(n + 1, &edges, z)?;
    let sol: Vec<i64> = dist[..n].iter().map(|&d| if least { -d } else { d }).collect();
    Some(sol)
}

/// Whether the conjunction admits an integer solution in `[0, max]`.
pub fn check_feasible(atoms: &[Atom], max: u32) -> bool {
    let n = var_count(atoms);
    extreme_solution(atoms, &vec![0; n], &vec![max as i64; n], false).is_some()
}

/// Component-wise least solution over `n` variables, if any.
pub fn least_solution(atoms: &[Atom], n: usize, max: u32) -> Option<Vec<u32>> {
    let n = n.max(var_count(atoms));
    extreme_solution(atoms, &vec![0; n], &vec![max as i64; n], true)
        .map(|v| v.into_iter().map(|x| x as u32).collect())
}

/// Component-wise greatest solution over `n` variables, if any.
pub fn greatest_solution(atoms: &[Atom], n: usize, max: u32) -> Option<Vec<u32>> {
    let n = n.max(var_count(atoms));
    extreme_solution(atoms, &vec![0; n], &vec![max as i64; n], false)
        .map(|v| v.into_iter().map(|x| x as u32).collect())
}

/// Draws a random solution of `atoms`. Variables are fixed one at a time in
/// random order, each uniformly within the interval that still extends to a
/// full solution. Variables not mentioned by any atom are set to `fill`.
pub fn sample_satisfying<R: Rng>(
    atoms: &[Atom],
    n: usize,
    max: u32,
    fill: u32,
    rng: &mut R,
) -> Option<Vec<u32>> {
    let n = n.max(var_count(atoms));
    let mut lo = vec![0i64; n];
    let mut hi = vec![max as i64; n];
    let mut vars: Vec<usize> = atoms.iter().flat_map(|a| [a.lhs, a.rhs]).collect();
    vars.sort_unstable();
    vars.dedup();
    for i in (1..vars.len()).rev() {
        let j = rng.gen_range(0..=i);
        vars.swap(i, j);
    }
    for &v in &vars {
        let least = extreme_solution(atoms, &lo, &hi, true)?;
        let greatest = extreme_solution(atoms, &lo, &hi, false)?;
        let pick = rng.gen_range(least[v]..=greatest[v]);
        lo[v] = pick;
        hi[v] = pick;
    }
    let mentioned: HashSet<usize> = vars.iter().copied().collect();
    Some((0..n).map(|v| if mentioned.contains(&v) { lo[v] as u32 } else { fill }).collect())
}

// ---------------------------------------------------------------------------
// instances

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftGroup {
    /// Client-group id this conjunction came from.
    pub id: usize,
    pub weight: u64,
    /// Indices into [`Instance::atoms`].
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EncodingStats {
    pub groups_total: usize,
    pub soft_groups: usize,
    pub static_desired_groups: usize,
    pub unattainable_groups: usize,
    pub distinct_atoms: usize,
    /// Candidate-set size -> number of groups.
    pub candidate_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub max_prepend: u32,
    pub base_weight: u64,
    pub atoms: Vec<Atom>,
    pub groups: Vec<SoftGroup>,
    pub stats: EncodingStats,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    lhs: usize,
    rhs: usize,
    offset: i32,
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    weight: u64,
    atoms: Vec<AtomDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    max: u32,
    base_weight: u64,
    groups: Vec<GroupDoc>,
}

impl Instance {
    /// Builds an instance from explicit conjunctions; group ids are their
    /// positions.
    pub fn from_conjunctions(
        n: usize,
        max_prepend: u32,
        base_weight: u64,
        groups: Vec<(u64, Vec<Atom>)>,
    ) -> Result<Self, SolverError> {
        let mut b = InstanceBuilder::new(n, max_prepend);
        for (id, (weight, atoms)) in groups.into_iter().enumerate() {
            b.push(id, weight, &atoms)?;
        }
        Ok(b.finish(base_weight, EncodingStats::default()))
    }

    pub fn upper_bound(&self) -> u64 {
        self.base_weight + self.groups.iter().map(|g| g.weight).sum::<u64>()
    }

    pub fn group_atoms(&self, g: &SoftGroup) -> Vec<Atom> {
        g.atoms.iter().map(|&i| self.atoms[i]).collect()
    }

    /// Objective and satisfied group ids under `lengths`.
    pub fn evaluate(&self, lengths: &[u32]) -> (u64, BTreeSet<usize>) {
        let mut obj = self.base_weight;
        let mut sat = BTreeSet::new();
        for g in &self.groups {
            if g.atoms.iter().all(|&i| self.atoms[i].holds(lengths)) {
                obj += g.weight;
                sat.insert(g.id);
            }
        }
        (obj, sat)
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDoc {
            n: self.n,
            max: self.max_prepend,
            base_weight: self.base_weight,
            groups: self
                .groups
                .iter()
                .map(|g| GroupDoc {
                    weight: g.weight,
                    atoms: g
                        .atoms
                        .iter()
                        .map(|&i| {
                            let a = self.atoms[i];
                            AtomDoc { lhs: a.lhs, rhs: a.rhs, offset: a.offset }
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SolverError> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| SolverError::Parse(e.to_string()))?;
        let groups = doc
            .groups
            .into_iter()
            .map(|g| {
                let atoms = g.atoms.into_iter().map(|a| Atom::new(a.lhs, a.rhs, a.offset)).collect();
                (g.weight, atoms)
            })
            .collect();
        Self::from_conjunctions(doc.n, doc.max, doc.base_weight, groups)
    }

    /// Line-oriented dump for eyeballing.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "c difference-constraint max-sat");
        let _ = writeln!(
            out,
            "p dcmaxsat {} {} {} {} {}",
            self.n,
            self.max_prepend,
            self.groups.len(),
            self.atoms.len(),
            self.base_weight
        );
        for (i, a) in self.atoms.iter().enumerate() {
            let _ = writeln!(out, "a {i} {} {} {}", a.lhs, a.rhs, a.offset);
        }
        for g in &self.groups {
            let ids: Vec<String> = g.atoms.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "g {} {} {}", g.id, g.weight, ids.join(" "));
        }
        out
    }
}

struct InstanceBuilder {
    n: usize,
    max: u32,
    atoms: Vec<Atom>,
    index: HashMap<(usize, usize, i32), usize>,
    groups: Vec<SoftGroup>,
}

impl InstanceBuilder {
    fn new(n: usize, max: u32) -> Self {
        InstanceBuilder { n, max, atoms: Vec::new(), index: HashMap::new(), groups: Vec::new() }
    }

    fn push(&mut self, id: usize, weight: u64, atoms: &[Atom]) -> Result<(), SolverError> {
        let mut ids = Vec::with_capacity(atoms.len());
        for a in atoms {
            if a.lhs >= self.n
                || a.rhs >= self.n
                || a.lhs == a.rhs
                || a.offset.unsigned_abs() > self.max
            {
                return Err(SolverError::AtomOutOfRange { atom: a.to_string(), n: self.n, max: self.max });
            }
            let next = self.atoms.len();
            let i = *self.index.entry((a.lhs, a.rhs, a.offset)).or_insert(next);
            if i == next {
                self.atoms.push(*a);
            }
            if !ids.contains(&i) {
                ids.push(i);
            }
        }
        self.groups.push(SoftGroup { id, weight, atoms: ids });
        Ok(())
    }

    fn finish(self, base_weight: u64, mut stats: EncodingStats) -> Instance {
        stats.soft_groups = self.groups.len();
        stats.distinct_atoms = self.atoms.len();
        Instance {
            n: self.n,
            max_prepend: self.max,
            base_weight,
            atoms: self.atoms,
            groups: self.groups,
            stats,
        }
    }
}

/// Random instance with `n_groups` groups of up to three atoms, offsets in
/// `[-MAX, MAX]` and weights in `1..=5`.
pub fn random_instance<R: Rng>(n: usize, max: u32, n_groups: usize, rng: &mut R) -> Instance {
    let m = max as i32;
    let groups = (0..n_groups)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let atoms = (0..k)
                .filter_map(|_| {
                    let l = rng.gen_range(0..n);
                    let r = rng.gen_range(0..n);
                    (l != r).then(|| Atom::new(l, r, rng.gen_range(-m..=m)))
                })
                .collect();
            (rng.gen_range(1..=5), atoms)
        })
        .collect();
    Instance::from_conjunctions(n, max, 0, groups).expect("atoms in range")
}

/// Static-desired groups become base weight, dynamic-desired groups become
/// soft conjunctions, everything else is unattainable and dropped.
pub fn encode(groups: &[ClientGroup], n: usize, max_prepend: u32) -> Result<Instance, SolverError> {
    let mut b = InstanceBuilder::new(n, max_prepend);
    let mut base = 0;
    let mut stats = EncodingStats { groups_total: groups.len(), ..Default::default() };
    for g in groups {
        *stats.candidate_histogram.entry(g.candidates.len()).or_default() += 1;
        match g.label {
            Label::StaticDesired => {
                base += g.weight;
                stats.static_desired_groups += 1;
            }
            Label::DynamicDesired => b.push(g.id, g.weight, &g.atoms)?,
            Label::StaticUndesired | Label::DynamicUndesired => stats.unattainable_groups += 1,
        }
    }
    Ok(b.finish(base, stats))
}

// ---------------------------------------------------------------------------
// solving

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proof {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub config: PrependConfig,
    pub objective: u64,
    pub satisfied_groups: BTreeSet<usize>,
    pub proof: Proof,
    /// Search nodes (branch and bound) or configurations (brute force).
    pub nodes: u64,
}

/// Per-atom feasibility given the variables assigned so far.
fn atom_possible(a: &Atom, value: &[Option<i64>], max: i64) -> bool {
    let c = a.offset as i64;
    match (value[a.lhs], value[a.rhs]) {
        (Some(l), Some(r)) => l <= r + c,
        (Some(l), None) => l - c <= max,
        (None, Some(r)) => r + c >= 0,
        (None, None) => c >= -max,
    }
}

struct Search<'a> {
    inst: &'a Instance,
    max: i64,
    order: Vec<usize>,
    value: Vec<Option<i64>>,
    /// var -> (active group index, atom index)
    var_refs: Vec<Vec<(usize, usize)>>,
    weight: Vec<u64>,
    dead: Vec<u32>,
    alive_weight: u64,
    conflicts: Vec<(usize, usize, u64)>,
    stamp: Vec<u64>,
    generation: u64,
    best_obj: u64,
    best: Vec<i64>,
    nodes: u64,
    budget: Option<u64>,
    aborted: bool,
}

impl Search<'_> {
    fn bound(&mut self) -> u64 {
        let ub = self.inst.base_weight + self.alive_weight;
        if ub <= self.best_obj || self.conflicts.is_empty() {
            return ub;
        }
        self.generation += 1;
        let mut penalty = 0;
        for &(g, h, w) in &self.conflicts {
            if self.dead[g] == 0
                && self.dead[h] == 0
                && self.stamp[g] != self.generation
                && self.stamp[h] != self.generation
            {
                self.stamp[g] = self.generation;
                self.stamp[h] = self.generation;
                penalty += w;
            }
        }
        ub - penalty
    }

    fn assign(&mut self, v: usize, val: i64, trail: &mut Vec<usize>) {
        for k in 0..self.var_refs[v].len() {
            let (g, ai) = self.var_refs[v][k];
            let atom = self.inst.atoms[ai];
            if !atom_possible(&atom, &self.value, self.max) {
                continue;
            }
            self.value[v] = Some(val);
            let ok = atom_possible(&atom, &self.value, self.max);
            self.value[v] = None;
            if !ok {
                if self.dead[g] == 0 {
                    self.alive_weight -= self.weight[g];
                }
                self.dead[g] += 1;
                trail.push(g);
            }
        }
        self.value[v] = Some(val);
    }

    fn unassign(&mut self, v: usize, trail: &[usize]) {
        for &g in trail {
            self.dead[g] -= 1;
            if self.dead[g] == 0 {
                self.alive_weight += self.weight[g];
            }
        }
        self.value[v] = None;
    }

    fn value_order(&mut self, v: usize) -> Vec<i64> {
        let mut scored: Vec<(u64, i64)> = (0..=self.max)
            .map(|val| {
                self.value[v] = Some(val);
                let score = self.var_refs[v]
                    .iter()
                    .filter(|&&(g, ai)| {
                        self.dead[g] == 0 && atom_possible(&self.inst.atoms[ai], &self.value, self.max)
                    })
                    .map(|&(g, _)| self.weight[g])
                    .sum();
                (score, val)
            })
            .collect();
        self.value[v] = None;
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.into_iter().map(|(_, val)| val).collect()
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            let obj = self.inst.base_weight + self.alive_weight;
            if obj > self.best_obj {
                self.best_obj = obj;
                self.best = self.value.iter().map(|x| x.unwrap_or(0)).collect();
            }
            return;
        }
        if self.bound() <= self.best_obj {
            return;
        }
        let v = self.order[depth];
        let mut trail = Vec::new();
        for val in self.value_order(v) {
            trail.clear();
            self.assign(v, val, &mut trail);
            if self.inst.base_weight + self.alive_weight > self.best_obj {
                self.dfs(depth + 1);
            }
            self.unassign(v, &trail);
            if self.aborted {
                return;
            }
        }
    }
}

fn finish(inst: &Instance, lengths: Vec<u32>, proof: Proof, nodes: u64) -> Solution {
    let (objective, satisfied_groups) = inst.evaluate(&lengths);
    Solution {
        config: PrependConfig {
            enabled: vec![true; inst.n],
            lengths,
            max_prepend: inst.max_prepend,
        },
        objective,
        satisfied_groups,
        proof,
        nodes,
    }
}

/// Exact branch and bound. With a node budget the search may stop early and
/// return its incumbent marked [`Proof::Heuristic`].
///
/// The returned config is the least solution of the incumbent's satisfied
/// groups, so prepends are as small as that choice allows.
pub fn solve(inst: &Instance, budget: Option<u64>) -> Solution {
    let n = inst.n;
    let max = inst.max_prepend as i64;
    let zeros = vec![0u32; n];
    if inst.groups.is_empty() {
        return finish(inst, zeros, Proof::Exact, 0);
    }

    let active: Vec<&SoftGroup> =
        inst.groups.iter().filter(|g| check_feasible(&inst.group_atoms(g), inst.max_prepend)).collect();
    let weight: Vec<u64> = active.iter().map(|g| g.weight).collect();
    let mut var_refs = vec![Vec::new(); n];
    let mut incident = vec![0u64; n];
    for (gi, g) in active.iter().enumerate() {
        for &ai in &g.atoms {
            let a = inst.atoms[ai];
            for v in [a.lhs, a.rhs] {
                var_refs[v].push((gi, ai));
                incident[v] += g.weight;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| !var_refs[v].is_empty()).collect();
    order.sort_by(|&a, &b| incident[b].cmp(&incident[a]).then(a.cmp(&b)));

    let conflicts = group_conflicts(inst, &active, &var_refs);

    let (zero_obj, _) = inst.evaluate(&zeros);
    let mut s = Search {
        inst,
        max,
        order,
        value: vec![None; n],
        var_refs,
        alive_weight: weight.iter().sum(),
        dead: vec![0; weight.len()],
        stamp: vec![0; weight.len()],
        weight,
        conflicts,
        generation: 0,
        best_obj: zero_obj,
        best: vec![0; n],
        nodes: 0,
        budget,
        aborted: false,
    };
    s.dfs(0);

    let incumbent: Vec<u32> = s.best.iter().map(|&x| x as u32).collect();
    let (_, sat) = inst.evaluate(&incumbent);
    let atoms: Vec<Atom> = inst
        .groups
        .iter()
        .filter(|g| sat.contains(&g.id))
        .flat_map(|g| inst.group_atoms(g))
        .collect();
    let lengths = least_solution(&atoms, n, inst.max_prepend).unwrap_or(incumbent);
    let proof = if s.aborted { Proof::Heuristic } else { Proof::Exact };
    log::debug!("branch and bound: {} nodes, objective {}", s.nodes, s.best_obj);
    finish(inst, lengths, proof, s.nodes)
}

/// Pairs of groups that can never be satisfied together, heaviest first.
fn group_conflicts(
    inst: &Instance,
    active: &[&SoftGroup],
    var_refs: &[Vec<(usize, usize)>],
) -> Vec<(usize, usize, u64)> {
    let mut pairs = BTreeSet::new();
    for refs in var_refs {
        let mut gs: Vec<usize> = refs.iter().map(|&(g, _)| g).collect();
        gs.sort_unstable();
        gs.dedup();
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                pairs.insert((gs[i], gs[j]));
                if pairs.len() > CONFLICT_CHECK_LIMIT {
                    return Vec::new();
                }
            }
        }
    }
    let atoms: Vec<Vec<Atom>> = active.iter().map(|g| inst.group_atoms(g)).collect();
    // Extreme solutions of each group alone; one of them satisfying the
    // other group settles the pair without a full check.
    let witnesses: Vec<Vec<Vec<u32>>> = atoms
        .iter()
        .map(|a| {
            [least_solution(a, inst.n, inst.max_prepend), greatest_solution(a, inst.n, inst.max_prepend)]
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    let satisfies = |w: &[Vec<u32>], atoms: &[Atom]| w.iter().any(|v| atoms.iter().all(|a| a.holds(v)));
    // Tightest offset per ordered pair; two opposite atoms with a negative
    // offset sum settle the pair the other way.
    let tightest: Vec<HashMap<(usize, usize), i32>> = atoms
        .iter()
        .map(|a| {
            let mut m = HashMap::new();
            for x in a {
                let e = m.entry((x.lhs, x.rhs)).or_insert(x.offset);
                *e = (*e).min(x.offset);
            }
            m
        })
        .collect();
    let opposed = |g: usize, h: usize| {
        tightest[g]
            .iter()
            .any(|(&(l, r), &c)| tightest[h].get(&(r, l)).is_some_and(|&d| c + d < 0))
    };
    let mut out = Vec::new();
    for (g, h) in pairs {
        let conflict = if opposed(g, h) {
            true
        } else if satisfies(&witnesses[g], &atoms[h]) || satisfies(&witnesses[h], &atoms[g]) {
            false
        } else {
            let mut both = atoms[g].clone();
            both.extend_from_slice(&atoms[h]);
            !check_feasible(&both, inst.max_prepend)
        };
        if conflict {
            out.push((g, h, active[g].weight.min(active[h].weight)));
        }
    }
    out.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    out
}

/// Exhaustive enumeration in lexicographic order; the first optimum found
/// is the lexicographically smallest one.
pub fn solve_bruteforce(inst: &Instance) -> Result<Solution, SolverError> {
    let base = inst.max_prepend as u128 + 1;
    let configs = base.checked_pow(inst.n as u32).unwrap_or(u128::MAX);
    if configs > BRUTEFORCE_LIMIT as u128 {
        return Err(SolverError::TooLarge { configs });
    }
    let mut cur = vec![0u32; inst.n];
    let (mut best_obj, _) = inst.evaluate(&cur);
    let mut best = cur.clone();
    let mut visited = 1u64;
    'outer: loop {
        let mut i = inst.n;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if cur[i] < inst.max_prepend {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
        visited += 1;
        let (obj, _) = inst.evaluate(&cur);
        if obj > best_obj {
            best_obj = obj;
            best = cur.clone();
        }
    }
    Ok(finish(inst, best, Proof::Exact, visited))
}
