//! Workloads shared by the criterion benches.

use anypro_core::bgp_sim::Oracle;
use anypro_core::polling::{derive_preliminary_constraints, max_min_poll, DesiredMapping};
use anypro_core::solver::{self, Instance};
use anypro_core::topology::{build_testbed_fixture, generate_random_topology, Topology};

pub const MAX: u32 = 9;

pub struct Case {
    pub topology: Topology,
    pub desired: DesiredMapping,
    pub enabled: Vec<bool>,
}

impl Case {
    pub fn new(topology: Topology) -> Self {
        let enabled = vec![true; topology.n_ingresses()];
        let desired = DesiredMapping::nearest_by_latency(&topology, &enabled);
        Case { topology, desired, enabled }
    }

    pub fn oracle(&self) -> Oracle {
        Oracle::new(self.topology.clone())
    }

    /// The preliminary instance the pipeline would hand to the solver.
    pub fn preliminary_instance(&self) -> Instance {
        let o = self.oracle();
        let pr = max_min_poll(&o, MAX, &self.enabled).expect("poll");
        let groups = derive_preliminary_constraints(&pr, &self.desired).expect("groups");
        solver::encode(&groups, self.topology.n_ingresses(), MAX).expect("encode")
    }
}

pub fn testbed() -> Case {
    Case::new(build_testbed_fixture())
}

pub fn random(n_ingresses: usize, n_clients: usize, seed: u64) -> Case {
    Case::new(generate_random_topology(n_ingresses, n_clients, 2 * n_clients, 0.1, seed).expect("topology"))
}
