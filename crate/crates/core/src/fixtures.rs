//! Small hand-built worlds used by tests, the acceptance suite and
//! `anypro verify`.

use crate::bgp_sim::Rule;
use crate::topology::{AsNode, Asn, Ingress, Link, Relation, Role, Topology};

pub const ORIGIN: Asn = 65000;

/// Flat topology from undirected unit-latency edges. `ingresses` lists the
/// transit ASN of each ingress in id order; each is linked to the origin.
pub fn flat(edges: &[(Asn, Asn)], ingresses: &[Asn], clients: &[Asn]) -> Topology {
    let mut nodes = vec![AsNode { asn: ORIGIN, role: Role::Origin, pop: None }];
    let mut asns: Vec<Asn> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    asns.extend(ingresses);
    asns.sort_unstable();
    asns.dedup();
    for a in asns {
        if a == ORIGIN {
            continue;
        }
        let role = if clients.contains(&a) {
            Role::Client
        } else if ingresses.contains(&a) {
            Role::Transit
        } else {
            Role::Intermediate
        };
        nodes.push(AsNode { asn: a, role, pop: None });
    }
    let mut links: Vec<Link> = edges
        .iter()
        .map(|&(a, b)| Link { a, b, latency_ms: 1.0, relation: Relation::Flat })
        .collect();
    for &t in ingresses {
        links.push(Link { a: ORIGIN, b: t, latency_ms: 1.0, relation: Relation::Flat });
    }
    let mut t = Topology {
        origin: ORIGIN,
        nodes,
        links,
        ingresses: ingresses
            .iter()
            .enumerate()
            .map(|(i, &t)| Ingress { id: i, pop: format!("pop-{i}"), transit_asn: t })
            .collect(),
        clients: clients.to_vec(),
    };
    t.canonicalize();
    t
}

/// Appends a chain of `hops` links from `from` to `to`, minting
/// intermediates from `*next`.
fn chain(edges: &mut Vec<(Asn, Asn)>, next: &mut Asn, from: Asn, to: Asn, hops: usize) {
    let mut prev = from;
    for _ in 1..hops {
        *next += 1;
        edges.push((prev, *next));
        prev = *next;
    }
    edges.push((prev, to));
}

/// One client (AS 9) with three ingresses at 2, 2 and 4 hops. Max-min
/// polling sees the far ingress C; min-max never does.
pub fn min_max_counterexample() -> Topology {
    flat(
        &[(1, 11), (11, 9), (2, 12), (12, 9), (3, 13), (13, 14), (14, 15), (15, 9)],
        &[1, 2, 3],
        &[9],
    )
}

pub const THIRD_PARTY_MAX: u32 = 3;
pub const THIRD_PARTY_CLIENT: Asn = 9;

/// Ingresses A, B, C (ids 0, 1, 2). The client sits behind AS 22, which
/// hears A through AS 21 and B or C through AS 23. AS 23 reaches C over a
/// three-hop detour and prefers C on ties; AS 22 prefers B, then A. At
/// all-MAX the client lands on B; dropping only C's prepend flips AS 23 to
/// C, the B route disappears from AS 22, and the client moves to A.
pub fn third_party_shift() -> (Topology, Vec<Rule>) {
    let t = flat(
        &[
            (1, 21),
            (21, 22),
            (2, 23),
            (3, 31),
            (31, 32),
            (32, 33),
            (33, 23),
            (23, 22),
            (22, THIRD_PARTY_CLIENT),
        ],
        &[1, 2, 3],
        &[THIRD_PARTY_CLIENT],
    );
    let rules = vec![
        Rule::PreferIngress { asn: 22, order: vec![1, 0, 2] },
        Rule::PreferIngress { asn: 23, order: vec![2, 1, 0] },
    ];
    (t, rules)
}

/// Two ingresses A, B and two clients. Client 9 reaches A over `a9` hops
/// and B over `b9`; client 8 over `a8` and `b8`. All chains are disjoint.
/// Equal-length routes are broken by neighbor ASN, which favors A as long as
/// B's chain has at least two hops; then client 9 moves to A from
/// `d = s_B - s_A = a9 - b9` on and client 8 keeps B while `d < a8 - b8`.
pub fn pair_conflict(a9: usize, b9: usize, a8: usize, b8: usize) -> Topology {
    let mut edges = Vec::new();
    let mut next = 100;
    chain(&mut edges, &mut next, 1, 9, a9);
    chain(&mut edges, &mut next, 2, 9, b9);
    chain(&mut edges, &mut next, 1, 8, a8);
    chain(&mut edges, &mut next, 2, 8, b8);
    flat(&edges, &[1, 2], &[8, 9])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgp_sim::{Mode, Oracle, PrependConfig};
    use crate::topology::validate;

    #[test]
    fn fixtures_validate() {
        assert!(validate(&min_max_counterexample()).is_empty());
        assert!(validate(&third_party_shift().0).is_empty());
        assert!(validate(&pair_conflict(5, 3, 9, 3)).is_empty());
    }

    #[test]
    fn third_party_shift_moves_client() {
        let (t, rules) = third_party_shift();
        let o = Oracle::with_rules(t, Mode::Flat, rules);
        let max = PrependConfig::all_max(3, THIRD_PARTY_MAX);
        let at = |cfg: &PrependConfig| o.experiment(cfg).unwrap().ingress_of(THIRD_PARTY_CLIENT);
        assert_eq!(at(&max), Some(1));
        assert_eq!(at(&max.clone().with(2, 0)), Some(0));
        assert_eq!(at(&max.clone().with(0, 0)), Some(0));
        assert_eq!(at(&max.clone().with(1, 0)), Some(1));
    }
}
