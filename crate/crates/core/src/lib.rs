//! Anycast catchment engineering with AS-path prepending, against a
//! simulated routing oracle: max-min polling, preference-preserving
//! constraints, contradiction resolution by binary scan, and an exact
//! weighted Max-SAT solver over difference constraints.

pub mod bgp_sim;
pub mod constraints;
pub mod fixtures;
pub mod metrics;
pub mod pipeline;
pub mod polling;
pub mod solver;
pub mod topology;

pub use bgp_sim::{Mapping, Mode, Oracle, PrependConfig, Rule, SimError, SweepTable};
pub use constraints::{Atom, ContradictionPair, Resolution, WorkflowRecord};
pub use metrics::{Budget, Evaluation, RttDistribution};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineRun, RunReport};
pub use polling::{ClientGroup, DesiredMapping, Label, PollResult};
pub use solver::{Instance, Solution};
pub use topology::{Asn, IngressId, Topology};
