//! Program construction from a base of component facts.

mod base;
mod goal;
mod pool;
mod schema;

pub use base::{BaseError, ComponentFact, Refinement, ReflectionBase};
pub use goal::{default_probes, lists_up_to, GoalError, GoalSpec};
pub use pool::{bottom_up_pool, bottom_up_pools, fingerprint, single_input_probes, Candidate, Pools, Probe};
pub use schema::{
    combine_probes, combine_signature, fill_schema_holes, pivot_holes, predicate_probes, predicate_signature,
    synthesize, Filling, Fillings, Schema, SynthError, SynthOutcome,
};
