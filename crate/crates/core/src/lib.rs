//! Pseudospectral simulation and verification for ultrahyperbolic equations
//! `Δₓu − Δ_yu = 0` with several timelike coordinates `y = (y₁, y')`.
//!
//! Fields live on a periodic lattice over `N = {y₁ = 0}` with axes
//! `(x₁…x_{d1}, y₂…y_{d2})`; `y₁` is the evolution coordinate.

pub mod determinacy;
pub mod error;
pub mod extension;
pub mod fd_oracle;
pub mod lattice;
pub mod nonuniqueness;
pub mod propagator;
pub mod random;

pub use error::{Error, Result};
pub use lattice::{
    classify_modes, FreqLattice, GridField, Mode, ModeClassification, Region, SignatureSpec,
    SpectralField, Surface,
};
pub use propagator::{
    conservation_check, contraction_check, growth_rate, indefinite_energy, project, propagate,
    x_norm_sq, CauchyData, ConservationReport, ContractionReport, EnergyReport, SubspaceTag,
};
pub use random::BandLimited;
pub use determinacy::{ConeGeometry, Mat2, SweepConfig, SweepReport};
pub use extension::{
    BumpProfile, KernelSpec, KernelVariant, NormReport, ProfileKind, TraceData, TraceLabel,
};
pub use nonuniqueness::{build_witness, vanish_order_audit, WitnessSpec};
