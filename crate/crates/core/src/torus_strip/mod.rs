//! Cutoff profile, strip flow, and the domain model in the first plane.

mod cutoff;
mod domain;
mod flow;

pub use cutoff::{CutoffProfile, CutoffReport, Order, DEFAULT_EPS0};
pub use domain::{sample_domain, Branch, DomainModel, DomainSampling, TaggedPoint, Tags};
pub use flow::{
    flow_jacobian, flow_rk4, flow_time1, hamiltonian, hamiltonian_field, interleave_eval, StripModel,
};

/// `build_cutoff(A, eps)` with the default `eps0`.
pub fn build_cutoff(half_length: f64, eps: f64) -> crate::Result<CutoffProfile> {
    CutoffProfile::new(half_length, eps)
}

pub fn cutoff_eval(profile: &CutoffProfile, x: f64, order: Order) -> f64 {
    profile.eval(x, order)
}
