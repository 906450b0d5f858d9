//! Extension of data on a higher-codimension surface `M ⊂ N` to Cauchy data
//! on `N` that satisfies the constraint exactly.

pub mod checks;
pub mod extend;
pub mod kernel;
pub mod norms;
pub mod profile;

pub use checks::{
    energy_bound_check, norm_identity_check, EnergyBoundReport, NormIdentityLevel,
    NormIdentityReport, Refinement,
};
pub use extend::{
    extend_codim2, extend_mixed, extend_spacelike, trace_check, Extender, TraceData, TraceLabel,
    TraceReport,
};
pub use kernel::{make_kernel, restrict, Kernel, KernelSpec, KernelVariant};
pub use norms::{h_norm_sq, hdot_norm_sq, k_norm_sq, norm_report, pi_split, NormReport};
pub use profile::{BumpProfile, ProfileKind};
