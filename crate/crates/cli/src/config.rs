//! Experiment configuration files (TOML).
//!
//! Top-level keys are shared; each experiment reads its own table, e.g.
//!
//! ```toml
//! experiment = "conserve"
//! seed = 42
//! sizes = [33, 33]
//! signature = { d1 = 1, d2 = 2, p1 = 1, p2 = 0 }
//!
//! [conserve]
//! y1 = [0.5, 1.0, 2.0, 5.0]
//! ```

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use ultrawave_core::{BandLimited, BumpProfile, ProfileKind, SignatureSpec, SubspaceTag};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Propagate,
    Project,
    Conserve,
    Contract,
    Blowup,
    Extend,
    NormIdentity,
    Witness,
    NonuniqueDemo,
    DeterminacySweep,
    FdOracle,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Propagate => "propagate",
            Experiment::Project => "project",
            Experiment::Conserve => "conserve",
            Experiment::Contract => "contract",
            Experiment::Blowup => "blowup",
            Experiment::Extend => "extend",
            Experiment::NormIdentity => "norm-identity",
            Experiment::Witness => "witness",
            Experiment::NonuniqueDemo => "nonunique-demo",
            Experiment::DeterminacySweep => "determinacy-sweep",
            Experiment::FdOracle => "fd-oracle",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Data subspace for random inputs; `none` leaves data unconstrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subspace {
    C,
    S,
    U,
    None,
}

impl Subspace {
    pub fn tag(self) -> Option<SubspaceTag> {
        match self {
            Subspace::C => Some(SubspaceTag::C),
            Subspace::S => Some(SubspaceTag::S),
            Subspace::U => Some(SubspaceTag::U),
            Subspace::None => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subspace::C => "C",
            Subspace::S => "S",
            Subspace::U => "U",
            Subspace::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must agree with the command line when both are given.
    pub experiment: Option<Experiment>,
    #[serde(default = "default_signature")]
    pub signature: SignatureSpec,
    /// `N` lattice sizes (all `x` axes, then `y'` axes). Defaults to 33 per
    /// axis in two dimensions and 13 per axis otherwise.
    pub sizes: Option<Vec<usize>>,
    #[serde(default = "one_u32")]
    pub period_scale: u32,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub propagate: PropagateParams,
    #[serde(default)]
    pub project: ProjectParams,
    #[serde(default)]
    pub conserve: ConserveParams,
    #[serde(default)]
    pub contract: ContractParams,
    #[serde(default)]
    pub blowup: BlowupParams,
    #[serde(default)]
    pub extend: ExtendParams,
    #[serde(default)]
    pub norm_identity: NormIdentityParams,
    #[serde(default)]
    pub witness: WitnessParams,
    #[serde(default)]
    pub nonunique_demo: DemoParams,
    #[serde(default)]
    pub determinacy_sweep: SweepParams,
    #[serde(default)]
    pub fd_oracle: FdParams,
}

fn default_signature() -> SignatureSpec {
    SignatureSpec {
        d1: 1,
        d2: 2,
        p1: 1,
        p2: 0,
    }
}

fn one_u32() -> u32 {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields default")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("config: {}", e.message())))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| {
            let n = self.signature.n_dim();
            vec![if n <= 2 { 33 } else { 13 }; n]
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.signature.validate()?;
        let sizes = self.sizes();
        if sizes.len() != self.signature.n_dim() {
            return Err(CliError::Invalid(format!(
                "sizes has {} entries; signature {} needs {}",
                sizes.len(),
                self.signature,
                self.signature.n_dim()
            )));
        }
        Ok(())
    }
}

fn y1_unit() -> Vec<f64> {
    vec![1.0]
}

fn y1_samples() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 5.0]
}

fn bandwidth() -> f64 {
    8.0
}

fn center() -> Subspace {
    Subspace::C
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateParams {
    #[serde(default = "y1_unit")]
    pub y1: Vec<f64>,
    #[serde(default = "center")]
    pub subspace: Subspace,
    #[serde(default = "bandwidth")]
    pub bandwidth: f64,
    /// UHF1 spectral files replacing the random data.
    pub u0_file: Option<PathBuf>,
    pub u1_file: Option<PathBuf>,
}

impl Default for PropagateParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectParams {
    #[serde(default = "bandwidth")]
    pub bandwidth: f64,
}

impl Default for ProjectParams {
    fn default() -> Self {
        Self { bandwidth: bandwidth() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConserveParams {
    #[serde(default = "y1_samples")]
    pub y1: Vec<f64>,
    #[serde(default = "all_subspaces")]
    pub subspaces: Vec<Subspace>,
    #[serde(default = "bandwidth")]
    pub bandwidth: f64,
    #[serde(default = "drift_tol")]
    pub tolerance: f64,
}

fn all_subspaces() -> Vec<Subspace> {
    vec![Subspace::C, Subspace::S, Subspace::U, Subspace::None]
}

fn drift_tol() -> f64 {
    1e-10
}

impl Default for ConserveParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractParams {
    #[serde(default = "hundred")]
    pub pairs: usize,
    /// Forward times; `U` pairs are evolved to `-y1`.
    #[serde(default = "contract_y1")]
    pub y1: Vec<f64>,
    #[serde(default = "contract_subspaces")]
    pub subspaces: Vec<Subspace>,
    #[serde(default = "bandwidth")]
    pub bandwidth: f64,
}

fn hundred() -> usize {
    100
}

fn contract_y1() -> Vec<f64> {
    vec![0.5, 2.0]
}

fn contract_subspaces() -> Vec<Subspace> {
    vec![Subspace::S, Subspace::C, Subspace::U]
}

impl Default for ContractParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupCase {
    /// Excited modes in physical integer frequencies; each gets amplitude 1
    /// in `û₀` plus its conjugate partner, and `û₁ = 0`.
    pub modes: Vec<Vec<i64>>,
    /// Defaults to 1e-6 for one mode and 1e-4 otherwise.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    #[serde(default = "blowup_cases")]
    pub cases: Vec<BlowupCase>,
    #[serde(default = "five")]
    pub grid_start: f64,
    #[serde(default = "twenty")]
    pub grid_end: f64,
    #[serde(default = "sixteen")]
    pub grid_points: usize,
}

fn blowup_cases() -> Vec<BlowupCase> {
    vec![
        BlowupCase {
            modes: vec![vec![1, 2]],
            tolerance: None,
        },
        BlowupCase {
            modes: vec![vec![1, 2], vec![1, 3], vec![3, 2]],
            tolerance: None,
        },
    ]
}

fn five() -> f64 {
    5.0
}

fn twenty() -> f64 {
    20.0
}

fn sixteen() -> usize {
    16
}

impl Default for BlowupParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Mollifier,
    PolynomialBump,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default = "mollifier")]
    pub shape: Shape,
    #[serde(default = "one_f64")]
    pub support_radius: f64,
    /// Samples of a `sampled` shape at `t = i / (n-1)`.
    #[serde(default)]
    pub samples: Vec<f64>,
}

fn mollifier() -> Shape {
    Shape::Mollifier
}

fn one_f64() -> f64 {
    1.0
}

impl Default for ProfileConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

impl ProfileConfig {
    pub fn build(&self) -> Result<BumpProfile, CliError> {
        let kind = match self.shape {
            Shape::Mollifier => ProfileKind::Mollifier,
            Shape::PolynomialBump => ProfileKind::PolynomialBump,
            Shape::Sampled => ProfileKind::Sampled {
                samples: self.samples.clone(),
            },
        };
        Ok(BumpProfile::new(kind, self.support_radius)?)
    }
}

/// Extension kernel family; `auto` picks it from the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Auto,
    Codim2,
    Spacelike,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Cos,
    Sin,
    CosProduct,
}

/// One trigonometric term of a band-limited input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub kind: TermKind,
    pub freq: Vec<i64>,
    #[serde(default = "one_f64")]
    pub amp: f64,
}

pub fn band_limited(terms: &[Term]) -> BandLimited {
    terms.iter().fold(BandLimited::new(), |b, t| match t.kind {
        TermKind::Cos => b.cos(t.freq.clone(), t.amp),
        TermKind::Sin => b.sin(t.freq.clone(), t.amp),
        TermKind::CosProduct => BandLimited {
            terms: b
                .terms
                .into_iter()
                .chain(BandLimited::cos_product(&t.freq, t.amp).terms)
                .collect(),
        },
    })
}

/// Band-limited trace component for the energy-bound sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceInput {
    /// `w0`, `y1`, `x2`, `y3`, ...
    pub label: String,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendParams {
    #[serde(default = "auto")]
    pub variant: Variant,
    #[serde(default = "twenty_usize")]
    pub count: usize,
    #[serde(default = "four")]
    pub bandwidth: f64,
    #[serde(default = "two")]
    pub margin: u32,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default = "trace_tol")]
    pub tolerance: f64,
    /// Fixed inputs for the energy-bound refinement sweep; empty skips it.
    #[serde(default)]
    pub energy_inputs: Vec<TraceInput>,
    /// Base sizes of the sweep (refined `n → 2n−1` with doubled period).
    pub energy_sizes: Option<Vec<usize>>,
    #[serde(default = "three")]
    pub energy_levels: usize,
    #[serde(default = "ratio_spread")]
    pub energy_spread: f64,
}

fn auto() -> Variant {
    Variant::Auto
}

fn twenty_usize() -> usize {
    20
}

fn four() -> f64 {
    4.0
}

fn two() -> u32 {
    2
}

fn three() -> usize {
    3
}

fn trace_tol() -> f64 {
    1e-12
}

fn ratio_spread() -> f64 {
    0.2
}

impl Default for ExtendParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormIdentityParams {
    #[serde(default = "cos8")]
    pub terms: Vec<Term>,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default = "three")]
    pub levels: usize,
    #[serde(default = "five_percent")]
    pub gap_tolerance: f64,
    #[serde(default = "ten_percent")]
    pub weighted_gap_tolerance: f64,
}

fn cos8() -> Vec<Term> {
    vec![Term {
        kind: TermKind::Cos,
        freq: vec![8],
        amp: 1.0,
    }]
}

fn five_percent() -> f64 {
    0.05
}

fn ten_percent() -> f64 {
    0.10
}

impl Default for NormIdentityParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seed {
    pub freq: Vec<i64>,
    #[serde(default = "half")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn half() -> f64 {
    0.5
}

impl Seed {
    pub fn amp(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParams {
    #[serde(default = "two")]
    pub k: u32,
    /// Defaults to the first complement axis of `M`.
    pub factor_axis: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<Seed>,
}

fn default_seeds() -> Vec<Seed> {
    vec![Seed {
        freq: vec![8, 0],
        re: 0.5,
        im: 0.0,
    }]
}

impl Default for WitnessParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoParams {
    #[serde(default)]
    pub witness: WitnessParams,
    #[serde(default = "one_f64")]
    pub y1: f64,
    /// Kernel family of the extended base solution.
    #[serde(default = "auto")]
    pub variant: Variant,
    #[serde(default = "three_f64")]
    pub bandwidth: f64,
    #[serde(default = "two")]
    pub margin: u32,
    #[serde(default)]
    pub profile: ProfileConfig,
}

fn three_f64() -> f64 {
    3.0
}

impl Default for DemoParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum B2Source {
    FirstPrinciples,
    Printed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(default = "sweep_eps")]
    pub epsilons: Vec<f64>,
    #[serde(default = "sweep_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "sweep_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "thousand")]
    pub samples_per_cell: usize,
    /// `(ε, θ)` grid for the determinant check: ε = i/n, θ uniform in
    /// `[−theta_max, theta_max]`.
    #[serde(default = "fifty")]
    pub det_grid: usize,
    #[serde(default = "theta_max")]
    pub theta_max: f64,
    #[serde(default = "thousand")]
    pub boundary_samples: usize,
    /// Which `B₂` block defines the surface in the boundary check.
    #[serde(default = "first_principles")]
    pub b2_source: B2Source,
}

fn sweep_eps() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

fn sweep_thetas() -> Vec<f64> {
    let p = std::f64::consts::PI;
    vec![0.0, p / 6.0, -p / 6.0, p / 3.0, -p / 3.0]
}

fn sweep_lambdas() -> Vec<f64> {
    vec![-1.0, -0.5, -0.1, -1e-3]
}

fn thousand() -> usize {
    1000
}

fn fifty() -> usize {
    50
}

fn theta_max() -> f64 {
    1.4
}

fn first_principles() -> B2Source {
    B2Source::FirstPrinciples
}

impl Default for SweepParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdParams {
    #[serde(default = "one_f64")]
    pub y1: f64,
    #[serde(default = "h_coarse")]
    pub h_coarse: f64,
    #[serde(default = "center")]
    pub subspace: Subspace,
    #[serde(default = "bandwidth")]
    pub bandwidth: f64,
    #[serde(default = "ratio_lo")]
    pub ratio_min: f64,
    #[serde(default = "ratio_hi")]
    pub ratio_max: f64,
}

fn h_coarse() -> f64 {
    1.0 / 200.0
}

fn ratio_lo() -> f64 {
    3.5
}

fn ratio_hi() -> f64 {
    4.5
}

impl Default for FdParams {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}
