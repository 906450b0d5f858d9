//! Periodic computational domain, discrete Fourier conventions and mode
//! classification.
//!
//! Every axis is a torus of period `2πL` sampled at an odd number of points,
//! where `L` is the lattice's integer period scale (1 by default). Bin `j`
//! carries the physical frequency `j / L`, so the frequency set of each axis
//! is symmetric about zero and free of a Nyquist bin.
//!
//! The forward transform returns Fourier-series coefficients
//!
//! ```text
//! c(k) = (1 / Π Nᵢ) Σ_j u(x_j) e^{-i k·x_j}
//! ```
//!
//! and the inverse is plain synthesis. Continuum constants `(2π)^{-d/2}` are
//! dropped everywhere; the only normalization that survives in lattice norms
//! is the frequency-cell factor `L^dim` returned by
//! [`FreqLattice::plancherel_weight`], which turns mode sums into Riemann sums
//! of the corresponding frequency integrals.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate counts of space-time and of the initial surface `M`.
///
/// `d1` spacelike coordinates `x`, `d2` timelike coordinates `y`; `M` keeps
/// the first `p1` of the `x` and the first `p2` of `y' = (y₂, …, y_{d2})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignatureSpec {
    pub d1: usize,
    pub d2: usize,
    pub p1: usize,
    pub p2: usize,
}

impl SignatureSpec {
    pub fn new(d1: usize, d2: usize, p1: usize, p2: usize) -> Result<Self> {
        let sig = Self { d1, d2, p1, p2 };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d1 < 1 || self.d2 < 1 {
            return Err(Error::Signature(format!(
                "need d1 >= 1 and d2 >= 1, got d1={} d2={}",
                self.d1, self.d2
            )));
        }
        if self.p1 > self.d1 {
            return Err(Error::Signature(format!(
                "p1={} exceeds d1={}",
                self.p1, self.d1
            )));
        }
        if self.p2 > self.d2 - 1 {
            return Err(Error::Signature(format!(
                "p2={} exceeds d2-1={}",
                self.p2,
                self.d2 - 1
            )));
        }
        Ok(())
    }

    /// Dimension of `N = {y₁ = 0}`.
    pub fn n_dim(&self) -> usize {
        self.d1 + self.d2 - 1
    }

    /// Dimension of `M`.
    pub fn m_dim(&self) -> usize {
        self.p1 + self.p2
    }

    /// Codimension of `M` inside `N`.
    pub fn e0(&self) -> usize {
        self.d1 + self.d2 - (self.p1 + self.p2) - 1
    }

    /// `N` axes retained on `M`, in `M` axis order.
    pub fn retained_axes(&self) -> Vec<usize> {
        (0..self.p1).chain(self.d1..self.d1 + self.p2).collect()
    }

    /// Complement `x''` axes of `M` inside `N`.
    pub fn complement_space_axes(&self) -> Vec<usize> {
        (self.p1..self.d1).collect()
    }

    /// Complement `y''` axes of `M` inside `N`.
    pub fn complement_time_axes(&self) -> Vec<usize> {
        (self.d1 + self.p2..self.n_dim()).collect()
    }

    pub fn complement_axes(&self) -> Vec<usize> {
        let mut axes = self.complement_space_axes();
        axes.extend(self.complement_time_axes());
        axes
    }
}

impl fmt::Display for SignatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(d1={}, d2={}, p1={}, p2={})",
            self.d1, self.d2, self.p1, self.p2
        )
    }
}

/// Which surface a lattice discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    /// `N = {y₁ = 0}` with axes `(x₁…x_{d1}, y₂…y_{d2})`.
    N,
    /// `M ⊂ N` with axes `(x̃, ỹ)`.
    M,
}

/// Propagating (`|η'| ≤ |ξ|`) or growing (`|ξ| < |η'|`) part of frequency space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    R1,
    R2,
}

/// Lattice geometry and integer frequency coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqLattice {
    signature: SignatureSpec,
    surface: Surface,
    sizes: Vec<usize>,
    spacelike: usize,
    scale: u32,
    strides: Vec<usize>,
    len: usize,
    // Signed bin frequency per (mode, axis), row-major.
    freqs: Vec<i32>,
}

impl FreqLattice {
    /// Lattice on `N`; `sizes` lists all `x` axes, then all `y'` axes.
    pub fn new(signature: SignatureSpec, sizes: &[usize]) -> Result<Self> {
        signature.validate()?;
        Self::build(signature, Surface::N, signature.d1, sizes)
    }

    /// Lattice on `M`; `sizes` lists the `p1` retained `x` axes, then the `p2`
    /// retained `y'` axes.
    pub fn hypersurface(signature: SignatureSpec, sizes: &[usize]) -> Result<Self> {
        signature.validate()?;
        if signature.m_dim() == 0 {
            return Err(Error::Signature("M has dimension zero".into()));
        }
        Self::build(signature, Surface::M, signature.p1, sizes)
    }

    /// The `M` lattice that shares axis sizes and period with this `N` lattice.
    pub fn restriction_lattice(&self) -> Result<Self> {
        assert_eq!(self.surface, Surface::N, "restriction of an M lattice");
        let sizes: Vec<usize> = self
            .signature
            .retained_axes()
            .into_iter()
            .map(|a| self.sizes[a])
            .collect();
        Self::hypersurface(self.signature, &sizes)?.with_period_scale(self.scale)
    }

    fn build(
        signature: SignatureSpec,
        surface: Surface,
        spacelike: usize,
        sizes: &[usize],
    ) -> Result<Self> {
        let expected = match surface {
            Surface::N => signature.n_dim(),
            Surface::M => signature.m_dim(),
        };
        if sizes.len() != expected {
            return Err(Error::SizeCount {
                expected,
                got: sizes.len(),
            });
        }
        for (axis, &size) in sizes.iter().enumerate() {
            if size % 2 == 0 {
                return Err(Error::EvenSize { axis, size });
            }
            if size < 3 {
                return Err(Error::SizeTooSmall { axis, size });
            }
        }
        let dim = sizes.len();
        let mut strides = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * sizes[a + 1];
        }
        let len: usize = sizes.iter().product();
        let mut freqs = Vec::with_capacity(len * dim);
        for flat in 0..len {
            for a in 0..dim {
                let bin = (flat / strides[a]) % sizes[a];
                freqs.push(bin_to_freq(bin, sizes[a]) as i32);
            }
        }
        Ok(Self {
            signature,
            surface,
            sizes: sizes.to_vec(),
            spacelike,
            scale: 1,
            strides,
            len,
            freqs,
        })
    }

    /// Sets the period of every axis to `2π·scale`; bin `j` then carries the
    /// physical frequency `j / scale`.
    pub fn with_period_scale(mut self, scale: u32) -> Result<Self> {
        if scale == 0 {
            return Err(Error::PeriodScale);
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn signature(&self) -> SignatureSpec {
        self.signature
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    /// Number of leading spacelike axes.
    pub fn spacelike_axes(&self) -> usize {
        self.spacelike
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn period_scale(&self) -> u32 {
        self.scale
    }

    /// Physical frequency spacing `1 / L`.
    pub fn freq_unit(&self) -> f64 {
        1.0 / self.scale as f64
    }

    /// Largest representable bin index on `axis`.
    pub fn half(&self, axis: usize) -> i64 {
        ((self.sizes[axis] - 1) / 2) as i64
    }

    /// Frequency-cell factor `L^dim` converting mode sums into Riemann sums.
    pub fn plancherel_weight(&self) -> f64 {
        (self.scale as f64).powi(self.dim() as i32)
    }

    /// Signed bin indices of a mode.
    pub fn index(&self, flat: usize) -> &[i32] {
        let d = self.dim();
        &self.freqs[flat * d..(flat + 1) * d]
    }

    /// Flat position of a tuple of signed bin indices.
    pub fn flat_of(&self, bins: &[i64]) -> Option<usize> {
        if bins.len() != self.dim() {
            return None;
        }
        let mut flat = 0;
        for (a, &j) in bins.iter().enumerate() {
            if j.abs() > self.half(a) {
                return None;
            }
            let n = self.sizes[a] as i64;
            flat += (j.rem_euclid(n) as usize) * self.strides[a];
        }
        Some(flat)
    }

    /// Flat position of the mode `-k`.
    pub fn negated(&self, flat: usize) -> usize {
        let mut out = 0;
        for a in 0..self.dim() {
            let bin = (flat / self.strides[a]) % self.sizes[a];
            out += ((self.sizes[a] - bin) % self.sizes[a]) * self.strides[a];
        }
        out
    }

    pub fn mode(&self, flat: usize) -> Mode<'_> {
        Mode {
            bins: self.index(flat),
            spacelike: self.spacelike,
            unit: self.freq_unit(),
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode<'_>> + '_ {
        (0..self.len).map(move |f| self.mode(f))
    }

    /// Exact `Σ j²` over spacelike and timelike bins.
    pub fn squared_bins(&self, flat: usize) -> (i64, i64) {
        self.mode(flat).squared_bins()
    }

    pub fn region(&self, flat: usize) -> Region {
        self.mode(flat).region()
    }

    pub fn is_zero_mode(&self, flat: usize) -> bool {
        self.index(flat).iter().all(|&j| j == 0)
    }

    /// Grid coordinate of point `i` on `axis`.
    pub fn grid_coordinate(&self, axis: usize, i: usize) -> f64 {
        2.0 * PI * self.scale as f64 * i as f64 / self.sizes[axis] as f64
    }

    /// Grid point indices of a flat grid position.
    pub fn grid_point(&self, flat: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|a| (flat / self.strides[a]) % self.sizes[a])
            .collect()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }
}

fn bin_to_freq(bin: usize, size: usize) -> i64 {
    if bin <= (size - 1) / 2 {
        bin as i64
    } else {
        bin as i64 - size as i64
    }
}

/// Borrowed view of one lattice frequency.
#[derive(Debug, Clone, Copy)]
pub struct Mode<'a> {
    bins: &'a [i32],
    spacelike: usize,
    unit: f64,
}

impl<'a> Mode<'a> {
    pub fn bins(&self) -> &'a [i32] {
        self.bins
    }

    pub fn bins_i64(&self) -> Vec<i64> {
        self.bins.iter().map(|&j| j as i64).collect()
    }

    /// Physical frequency on `axis`.
    pub fn freq(&self, axis: usize) -> f64 {
        self.bins[axis] as f64 * self.unit
    }

    pub fn squared_bins(&self) -> (i64, i64) {
        let sq = |s: &[i32]| s.iter().map(|&j| (j as i64) * (j as i64)).sum::<i64>();
        (
            sq(&self.bins[..self.spacelike]),
            sq(&self.bins[self.spacelike..]),
        )
    }

    /// `|ξ|²` in physical units.
    pub fn xi_sq(&self) -> f64 {
        self.squared_bins().0 as f64 * self.unit * self.unit
    }

    /// `|η'|²` in physical units.
    pub fn eta_sq(&self) -> f64 {
        self.squared_bins().1 as f64 * self.unit * self.unit
    }

    /// `|ξ|² - |η'|²`, computed from exact integer sums.
    pub fn dispersion_sq(&self) -> f64 {
        let (s, t) = self.squared_bins();
        (s - t) as f64 * self.unit * self.unit
    }

    pub fn norm_sq(&self) -> f64 {
        let (s, t) = self.squared_bins();
        (s + t) as f64 * self.unit * self.unit
    }

    /// Ties `|η'| = |ξ|` belong to `R1`.
    pub fn region(&self) -> Region {
        let (s, t) = self.squared_bins();
        if t <= s {
            Region::R1
        } else {
            Region::R2
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bins.iter().all(|&j| j == 0)
    }
}

/// Per-mode dispersion frequency, growth exponent and region.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeClassification {
    pub omega: Vec<f64>,
    pub lambda: Vec<f64>,
    pub region: Vec<Region>,
}

pub fn classify_modes(lattice: &FreqLattice) -> ModeClassification {
    let mut omega = Vec::with_capacity(lattice.len());
    let mut lambda = Vec::with_capacity(lattice.len());
    let mut region = Vec::with_capacity(lattice.len());
    for mode in lattice.modes() {
        let disc = mode.dispersion_sq();
        match mode.region() {
            Region::R1 => {
                omega.push(disc.sqrt());
                lambda.push(0.0);
                region.push(Region::R1);
            }
            Region::R2 => {
                omega.push(0.0);
                lambda.push((-disc).sqrt());
                region.push(Region::R2);
            }
        }
    }
    ModeClassification {
        omega,
        lambda,
        region,
    }
}

fn same_lattice(a: &Arc<FreqLattice>, b: &Arc<FreqLattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Complex samples on the grid, row-major in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    lattice: Arc<FreqLattice>,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(lattice: Arc<FreqLattice>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::FieldLength {
                expected: lattice.len(),
                got: values.len(),
            });
        }
        Ok(Self { lattice, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(lattice: Arc<FreqLattice>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let dim = lattice.dim();
        let mut coords = vec![0.0; dim];
        let values = (0..lattice.len())
            .map(|flat| {
                for (a, c) in coords.iter_mut().enumerate() {
                    let i = (flat / lattice.strides()[a]) % lattice.sizes()[a];
                    *c = lattice.grid_coordinate(a, i);
                }
                f(&coords)
            })
            .collect();
        Self { lattice, values }
    }

    pub fn from_real_fn(lattice: Arc<FreqLattice>, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(lattice, |x| Complex64::new(f(x), 0.0))
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise difference; `None` on lattice mismatch.
    pub fn max_abs_diff(&self, other: &GridField) -> Option<f64> {
        if !same_lattice(&self.lattice, &other.lattice) {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut data = self.values.clone();
        fft_nd(&self.lattice, &mut data, Direction::Forward);
        let inv = 1.0 / self.lattice.len() as f64;
        for c in &mut data {
            *c *= inv;
        }
        SpectralField {
            lattice: Arc::clone(&self.lattice),
            coeffs: data,
            real_symmetric: false,
        }
    }
}

/// Fourier coefficients indexed by lattice frequency (FFT bin order).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    lattice: Arc<FreqLattice>,
    coeffs: Vec<Complex64>,
    real_symmetric: bool,
}

impl SpectralField {
    pub fn new(lattice: Arc<FreqLattice>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::FieldLength {
                expected: lattice.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            lattice,
            coeffs,
            real_symmetric: false,
        })
    }

    pub fn zeros(lattice: Arc<FreqLattice>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
        Self {
            lattice,
            coeffs,
            real_symmetric: false,
        }
    }

    /// Builds a field from `(bins, amplitude)` pairs; repeated bins add up.
    pub fn from_modes(
        lattice: Arc<FreqLattice>,
        modes: &[(Vec<i64>, Complex64)],
    ) -> Result<Self> {
        let mut out = Self::zeros(lattice);
        for (bins, amp) in modes {
            let flat = out
                .lattice
                .flat_of(bins)
                .ok_or_else(|| Error::FrequencyOutOfRange { freq: bins.clone() })?;
            out.coeffs[flat] += amp;
        }
        Ok(out)
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.real_symmetric = false;
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, bins: &[i64]) -> Option<Complex64> {
        self.lattice.flat_of(bins).map(|f| self.coeffs[f])
    }

    /// Whether Hermitian symmetry (a real physical field) has been asserted.
    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    /// Largest `|c(-k) - conj c(k)|`, relative to the largest coefficient.
    pub fn hermitian_residual(&self) -> (f64, usize) {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = (0.0, 0);
        for flat in 0..self.coeffs.len() {
            let neg = self.lattice.negated(flat);
            let r = (self.coeffs[neg] - self.coeffs[flat].conj()).norm() / scale;
            if r > worst.0 {
                worst = (r, flat);
            }
        }
        worst
    }

    /// Asserts real symmetry after checking it to relative tolerance `tol`.
    pub fn assert_real_symmetric(mut self, tol: f64) -> Result<Self> {
        let (residual, flat) = self.hermitian_residual();
        if residual > tol {
            return Err(Error::NotHermitian {
                mode: self.lattice.mode(flat).bins_i64(),
                residual,
            });
        }
        self.real_symmetric = true;
        Ok(self)
    }

    pub(crate) fn with_symmetry_flag(mut self, flag: bool) -> Self {
        self.real_symmetric = flag;
        self
    }

    pub fn to_grid(&self) -> GridField {
        let mut data = self.coeffs.clone();
        fft_nd(&self.lattice, &mut data, Direction::Inverse);
        if self.real_symmetric {
            for v in &mut data {
                v.im = 0.0;
            }
        }
        GridField {
            lattice: Arc::clone(&self.lattice),
            values: data,
        }
    }

    /// `coeffs'(k) = multiplier(k) · coeffs(k)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(Mode<'_>) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| multiplier(self.lattice.mode(flat)) * c)
            .collect();
        SpectralField {
            lattice: Arc::clone(&self.lattice),
            coeffs,
            real_symmetric: false,
        }
    }

    /// Spectral partial derivative `∂_axis`, multiplier `i k_axis`.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let sym = self.real_symmetric;
        self.apply_multiplier(|m| Complex64::new(0.0, m.freq(axis)))
            .with_symmetry_flag(sym)
    }

    /// `order`-th spectral derivative along `axis`.
    pub fn derivative_n(&self, axis: usize, order: u32) -> SpectralField {
        let sym = self.real_symmetric;
        self.apply_multiplier(|m| Complex64::new(0.0, m.freq(axis)).powu(order))
            .with_symmetry_flag(sym)
    }

    pub fn same_lattice(&self, other: &SpectralField) -> bool {
        same_lattice(&self.lattice, &other.lattice)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &SpectralField, b: Complex64) -> Result<Self> {
        if !self.same_lattice(other) {
            return Err(Error::LatticeMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let sym = self.real_symmetric && other.real_symmetric && a.im == 0.0 && b.im == 0.0;
        Ok(SpectralField {
            lattice: Arc::clone(&self.lattice),
            coeffs,
            real_symmetric: sym,
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        let sym = self.real_symmetric && a.im == 0.0;
        SpectralField {
            lattice: Arc::clone(&self.lattice),
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
            real_symmetric: sym,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Plain `Σ |c(k)|²` (mean square of the physical field).
    pub fn sum_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Lattice `L²` norm squared, `L^dim Σ |c(k)|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.lattice.plancherel_weight() * self.sum_sq()
    }

    /// Multiplication by `sin(c)` of the physical coordinate on `axis`,
    /// carried out as an exact shift in frequency space. Returns `None` if the
    /// shifted support would leave the lattice.
    pub fn times_sin(&self, axis: usize) -> Option<SpectralField> {
        let lat = &self.lattice;
        let step = lat.period_scale() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); lat.len()];
        // sin(c) f  ->  (f(k - e) - f(k + e)) / 2i
        let half_over_i = Complex64::new(0.0, -0.5);
        for (flat, &c) in self.coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut bins = lat.mode(flat).bins_i64();
            let j = bins[axis];
            for (shift, sign) in [(step, 1.0), (-step, -1.0)] {
                bins[axis] = j + shift;
                let target = lat.flat_of(&bins)?;
                out[target] += half_over_i * sign * c;
            }
        }
        Some(SpectralField {
            lattice: Arc::clone(lat),
            coeffs: out,
            real_symmetric: self.real_symmetric,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

fn fft_nd(lattice: &FreqLattice, data: &mut [Complex64], dir: Direction) {
    let mut planner = FftPlanner::<f64>::new();
    let len = lattice.len();
    for axis in 0..lattice.dim() {
        let n = lattice.sizes()[axis];
        let stride = lattice.strides()[axis];
        let fft = match dir {
            Direction::Forward => planner.plan_fft_forward(n),
            Direction::Inverse => planner.plan_fft_inverse(n),
        };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = stride * n;
        for outer in (0..len).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}
