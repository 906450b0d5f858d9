//! Exact per-mode evolution in `y₁`, constraint projections, energies and the
//! contraction / growth experiments.
//!
//! On `|η'| ≤ |ξ|` a mode rotates with frequency `ω = √(|ξ|²−|η'|²)`; on
//! `|ξ| < |η'|` it mixes `e^{±λy₁}` with `λ = √(|η'|²−|ξ|²)`. The decaying
//! branch satisfies `λû₀ + û₁ = 0`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, Mode, Region, SpectralField};

/// Position and `y₁`-velocity data on `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub u0: SpectralField,
    pub u1: SpectralField,
}

impl CauchyData {
    pub fn new(u0: SpectralField, u1: SpectralField) -> Result<Self> {
        if !u0.same_lattice(&u1) {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self { u0, u1 })
    }

    pub fn zeros(lattice: Arc<FreqLattice>) -> Self {
        Self {
            u0: SpectralField::zeros(Arc::clone(&lattice)),
            u1: SpectralField::zeros(lattice),
        }
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        self.u0.lattice()
    }

    pub fn combine(&self, a: Complex64, other: &CauchyData, b: Complex64) -> Result<Self> {
        Ok(Self {
            u0: self.u0.combine(a, &other.u0, b)?,
            u1: self.u1.combine(a, &other.u1, b)?,
        })
    }

    pub fn add(&self, other: &CauchyData) -> Result<Self> {
        Ok(Self {
            u0: self.u0.add(&other.u0)?,
            u1: self.u1.add(&other.u1)?,
        })
    }

    pub fn sub(&self, other: &CauchyData) -> Result<Self> {
        Ok(Self {
            u0: self.u0.sub(&other.u0)?,
            u1: self.u1.sub(&other.u1)?,
        })
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            u0: self.u0.scaled(a),
            u1: self.u1.scaled(a),
        }
    }

    /// Largest coefficient magnitude of either component.
    pub fn max_abs(&self) -> f64 {
        self.u0.max_abs().max(self.u1.max_abs())
    }

    /// Modes in `R2` where `û₀` or `û₁` is not exactly zero.
    pub fn r2_support(&self) -> Vec<usize> {
        let lat = self.lattice();
        (0..lat.len())
            .filter(|&f| lat.region(f) == Region::R2)
            .filter(|&f| {
                self.u0.coeffs()[f] != Complex64::new(0.0, 0.0)
                    || self.u1.coeffs()[f] != Complex64::new(0.0, 0.0)
            })
            .collect()
    }

    /// Exact check that every `R2` coefficient is zero.
    pub fn is_center(&self) -> bool {
        self.r2_support().is_empty()
    }
}

/// Center-stable, center-unstable or center subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceTag {
    S,
    U,
    C,
}

impl SubspaceTag {
    pub fn letter(self) -> char {
        match self {
            SubspaceTag::S => 'S',
            SubspaceTag::U => 'U',
            SubspaceTag::C => 'C',
        }
    }
}

// sin(t)/t and sinh(t)/t, switched to the series near zero.
fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sinh() / t
    }
}

/// Evolution matrix `[[a, b], [c, d]]` of one mode over `y1`.
pub fn mode_matrix(mode: Mode<'_>, y1: f64) -> [[f64; 2]; 2] {
    let disc = mode.dispersion_sq();
    match mode.region() {
        Region::R1 => {
            let w = disc.sqrt();
            let s = y1 * sinc(w * y1);
            let c = (w * y1).cos();
            [[c, s], [-disc * s, c]]
        }
        Region::R2 => {
            let l = (-disc).sqrt();
            let s = y1 * sinhc(l * y1);
            let c = (l * y1).cosh();
            [[c, s], [-disc * s, c]]
        }
    }
}

/// Evolves data by `y1` (either sign).
pub fn propagate(data: &CauchyData, y1: f64) -> Result<CauchyData> {
    if !y1.is_finite() {
        return Err(Error::NonFiniteY1(y1));
    }
    if y1 == 0.0 {
        return Ok(data.clone());
    }
    let lat = data.lattice();
    let mut u0 = Vec::with_capacity(lat.len());
    let mut u1 = Vec::with_capacity(lat.len());
    for (flat, (&a, &b)) in data.u0.coeffs().iter().zip(data.u1.coeffs()).enumerate() {
        let mode = lat.mode(flat);
        if mode.region() == Region::R2 {
            // the cosh/sinh matrix cancels catastrophically on decaying data;
            // evolving the two branches separately keeps each one accurate
            let l = (-mode.dispersion_sq()).sqrt();
            let (plus, minus) = branches(a, b, l);
            let (p, m) = (plus * (l * y1).exp(), minus * (-l * y1).exp());
            u0.push(p + m);
            u1.push(l * (p - m));
        } else {
            let m = mode_matrix(mode, y1);
            u0.push(m[0][0] * a + m[0][1] * b);
            u1.push(m[1][0] * a + m[1][1] * b);
        }
    }
    Ok(CauchyData {
        u0: field_like(&data.u0, u0),
        u1: field_like(&data.u1, u1),
    })
}

fn field_like(template: &SpectralField, coeffs: Vec<Complex64>) -> SpectralField {
    SpectralField::new(Arc::clone(template.lattice()), coeffs)
        .expect("same length")
        .with_symmetry_flag(template.is_real_symmetric())
}

/// Growing and decaying amplitudes `(a₊, a₋)` of an `R2` mode.
fn branches(u0: Complex64, u1: Complex64, lambda: f64) -> (Complex64, Complex64) {
    let v = u1 / lambda;
    ((u0 + v) * 0.5, (u0 - v) * 0.5)
}

/// Projection onto `X^S`, `X^U` or `X^C`; `R1` modes are untouched.
pub fn project(data: &CauchyData, subspace: SubspaceTag) -> CauchyData {
    let lat = data.lattice();
    let mut u0 = data.u0.coeffs().to_vec();
    let mut u1 = data.u1.coeffs().to_vec();
    for flat in 0..lat.len() {
        let mode = lat.mode(flat);
        if mode.region() != Region::R2 {
            continue;
        }
        let l = (-mode.dispersion_sq()).sqrt();
        let (plus, minus) = branches(u0[flat], u1[flat], l);
        let (a, b) = match subspace {
            SubspaceTag::S => (minus, -l * minus),
            SubspaceTag::U => (plus, l * plus),
            SubspaceTag::C => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        };
        u0[flat] = a;
        u1[flat] = b;
    }
    CauchyData {
        u0: field_like(&data.u0, u0),
        u1: field_like(&data.u1, u1),
    }
}

/// Per-mode indefinite energy density `|û₁|² + (|ξ|²−|η'|²)|û₀|²`.
pub fn mode_energies(data: &CauchyData) -> Vec<f64> {
    let lat = data.lattice();
    data.u0
        .coeffs()
        .iter()
        .zip(data.u1.coeffs())
        .enumerate()
        .map(|(f, (a, b))| b.norm_sqr() + lat.mode(f).dispersion_sq() * a.norm_sqr())
        .collect()
}

// Scale against which a mode's energy drift is measured.
fn mode_sizes(data: &CauchyData) -> Vec<f64> {
    let lat = data.lattice();
    data.u0
        .coeffs()
        .iter()
        .zip(data.u1.coeffs())
        .enumerate()
        .map(|(f, (a, b))| b.norm_sqr() + lat.mode(f).dispersion_sq().abs() * a.norm_sqr())
        .collect()
}

/// `E = ½ Σ [ |û₁|² + (|ξ|²−|η'|²)|û₀|² ]`, times the lattice cell weight.
pub fn indefinite_energy(data: &CauchyData) -> f64 {
    0.5 * data.lattice().plancherel_weight() * mode_energies(data).iter().sum::<f64>()
}

/// `Σ_{|α|≤m} k^{2α}`, i.e. the sum of complete homogeneous symmetric
/// polynomials `h_0..h_m` in the squared frequencies.
pub fn derivative_weight(mode: Mode<'_>, dim: usize, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut h = vec![0.0; m + 1];
    h[0] = 1.0;
    for axis in 0..dim {
        let x = mode.freq(axis).powi(2);
        for j in 1..=m {
            h[j] += x * h[j - 1];
        }
    }
    h.iter().sum()
}

/// `‖·‖²_{X^m}`; a seminorm, blind to `û₀` on lightcone modes.
pub fn x_norm_sq(data: &CauchyData, m: i64) -> Result<f64> {
    if m < 0 {
        return Err(Error::NegativeOrder(m));
    }
    let lat = data.lattice();
    let dim = lat.dim();
    let mut total = 0.0;
    for (f, (a, b)) in data.u0.coeffs().iter().zip(data.u1.coeffs()).enumerate() {
        let mode = lat.mode(f);
        let local = mode.dispersion_sq().abs() * a.norm_sqr() + b.norm_sqr();
        if local != 0.0 {
            total += derivative_weight(mode, dim, m as usize) * local;
        }
    }
    Ok(lat.plancherel_weight() * total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub indefinite_energy: f64,
    pub x_norm_sq: f64,
    pub m: u32,
    pub xm_norm_sq: f64,
}

pub fn energy_report(data: &CauchyData, m: u32) -> EnergyReport {
    EnergyReport {
        indefinite_energy: indefinite_energy(data),
        x_norm_sq: x_norm_sq(data, 0).expect("m >= 0"),
        m,
        xm_norm_sq: x_norm_sq(data, m as i64).expect("m >= 0"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub samples: Vec<f64>,
    pub energy: Vec<f64>,
    pub x_norm_sq: Vec<f64>,
    /// `max |E(y₁) − E(0)|`.
    pub max_energy_drift: f64,
    /// Same, divided by `Σ` of the per-mode sizes at time 0.
    pub relative_energy_drift: f64,
    /// Largest per-mode drift relative to that mode's own size.
    pub max_mode_drift: f64,
    pub max_x_drift: f64,
    /// Whether `‖·‖²_X` never increased along the (sorted) samples.
    pub x_nonincreasing: bool,
}

pub fn conservation_check(data: &CauchyData, y1_samples: &[f64]) -> Result<ConservationReport> {
    let w = data.lattice().plancherel_weight();
    let e0 = indefinite_energy(data);
    let x0 = x_norm_sq(data, 0)?;
    let me0 = mode_energies(data);
    let sz0 = mode_sizes(data);
    let total0: f64 = sz0.iter().sum::<f64>() * 0.5 * w;
    let mut rep = ConservationReport {
        samples: y1_samples.to_vec(),
        energy: Vec::new(),
        x_norm_sq: Vec::new(),
        max_energy_drift: 0.0,
        relative_energy_drift: 0.0,
        max_mode_drift: 0.0,
        max_x_drift: 0.0,
        x_nonincreasing: true,
    };
    for &y in y1_samples {
        let d = propagate(data, y)?;
        let e = indefinite_energy(&d);
        let x = x_norm_sq(&d, 0)?;
        rep.max_energy_drift = rep.max_energy_drift.max((e - e0).abs());
        rep.max_x_drift = rep.max_x_drift.max((x - x0).abs());
        for ((a, b), (s0, s1)) in me0
            .iter()
            .zip(mode_energies(&d))
            .zip(sz0.iter().zip(mode_sizes(&d)))
        {
            let scale = s0.max(s1);
            if scale > 0.0 {
                rep.max_mode_drift = rep.max_mode_drift.max((a - b).abs() / scale);
            }
        }
        rep.energy.push(e);
        rep.x_norm_sq.push(x);
    }
    if total0 > 0.0 {
        rep.relative_energy_drift = rep.max_energy_drift / total0;
    }
    let mut order: Vec<usize> = (0..y1_samples.len()).collect();
    order.sort_by(|&a, &b| y1_samples[a].total_cmp(&y1_samples[b]));
    let mut prev = x0;
    for &i in &order {
        if y1_samples[i] < 0.0 {
            continue;
        }
        if rep.x_norm_sq[i] > prev * (1.0 + 1e-12) {
            rep.x_nonincreasing = false;
        }
        prev = rep.x_norm_sq[i];
    }
    Ok(rep)
}

/// Largest constraint residual relative to the data's overall scale, with
/// the offending mode.
pub fn constraint_residual(data: &CauchyData, subspace: SubspaceTag) -> (f64, Option<usize>) {
    let lat = data.lattice();
    let u0 = data.u0.coeffs();
    let u1 = data.u1.coeffs();
    let scale = (0..lat.len())
        .map(|f| lat.mode(f).norm_sq().sqrt() * u0[f].norm() + u1[f].norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return (0.0, None);
    }
    let mut worst = (0.0, None);
    for f in 0..lat.len() {
        let mode = lat.mode(f);
        if mode.region() != Region::R2 {
            continue;
        }
        let l = (-mode.dispersion_sq()).sqrt();
        let r = match subspace {
            SubspaceTag::S => (l * u0[f] + u1[f]).norm(),
            SubspaceTag::U => (l * u0[f] - u1[f]).norm(),
            SubspaceTag::C => l * u0[f].norm() + u1[f].norm(),
        } / scale;
        if r > worst.0 {
            worst = (r, Some(f));
        }
    }
    worst
}

const CONSTRAINT_TOL: f64 = 1e-9;

fn require_subspace(data: &CauchyData, subspace: SubspaceTag) -> Result<()> {
    let (r, at) = constraint_residual(data, subspace);
    if r > CONSTRAINT_TOL {
        let mode = data.lattice().mode(at.expect("nonzero residual")).bins_i64();
        return Err(Error::ConstraintViolated {
            subspace: subspace.letter(),
            mode,
            residual: r,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `|lhs − rhs| / rhs`, checked only on the center subspace.
    pub equality_gap: Option<f64>,
}

/// `‖Φ(u) − Φ(v)‖²_X ≤ ‖u − v‖²_X`, with equality on `X^C`.
pub fn contraction_check(
    u: &CauchyData,
    v: &CauchyData,
    subspace: SubspaceTag,
    y1: f64,
) -> Result<ContractionReport> {
    if !y1.is_finite() {
        return Err(Error::NonFiniteY1(y1));
    }
    let wrong_sign = match subspace {
        SubspaceTag::S => y1 < 0.0,
        SubspaceTag::U => y1 > 0.0,
        SubspaceTag::C => false,
    };
    if wrong_sign {
        return Err(Error::WrongTimeDirection {
            subspace: subspace.letter(),
            y1,
        });
    }
    require_subspace(u, subspace)?;
    require_subspace(v, subspace)?;
    let rhs = x_norm_sq(&u.sub(v)?, 0)?;
    let lhs = x_norm_sq(&propagate(u, y1)?.sub(&propagate(v, y1)?)?, 0)?;
    let mut satisfied = lhs <= rhs * (1.0 + 1e-10);
    let mut equality_gap = None;
    if subspace == SubspaceTag::C {
        let gap = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs };
        satisfied &= gap <= 1e-10;
        equality_gap = Some(gap);
    }
    Ok(ContractionReport {
        lhs,
        rhs,
        satisfied,
        equality_gap,
    })
}

/// Largest `λ` among `R2` modes whose growing amplitude `a₊` is nonzero
/// (relative to the data scale).
pub fn dominant_exponent(data: &CauchyData) -> Option<f64> {
    let lat = data.lattice();
    let scale = data.max_abs();
    if scale == 0.0 {
        return None;
    }
    let mut best: Option<f64> = None;
    for f in 0..lat.len() {
        let mode = lat.mode(f);
        if mode.region() != Region::R2 {
            continue;
        }
        let l = (-mode.dispersion_sq()).sqrt();
        let (plus, _) = branches(data.u0.coeffs()[f], data.u1.coeffs()[f], l);
        if plus.norm() > 1e-10 * scale {
            best = Some(best.map_or(l, |b: f64| b.max(l)));
        }
    }
    best
}

/// Least-squares slope of `log √(Σ|û₀|²+|û₁|²)` against `y₁`.
pub fn growth_rate(data: &CauchyData, y1_grid: &[f64]) -> Result<f64> {
    if y1_grid.len() < 3
        || y1_grid[0] <= 0.0
        || y1_grid.windows(2).any(|w| w[1] <= w[0])
        || y1_grid.iter().any(|y| !y.is_finite())
    {
        return Err(Error::BadGrid);
    }
    if dominant_exponent(data).is_none() {
        return Err(Error::NoGrowingComponent);
    }
    let mut logs = Vec::with_capacity(y1_grid.len());
    for &y in y1_grid {
        let d = propagate(data, y)?;
        let size = d.u0.sum_sq() + d.u1.sum_sq();
        logs.push(0.5 * size.ln());
    }
    Ok(ls_slope(y1_grid, &logs))
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}
