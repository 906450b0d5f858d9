//! Cone-supported extension kernels evaluated on the `N` lattice.
//!
//! Every `N` mode `k = (ξ̃, ξ'', η̃, η'')` has a base `(ξ̃, η̃)` on `M` and a
//! fiber coordinate `(ξ'', η'')`. A kernel assigns each mode a weight so that
//! `Ê(k) = ŵ(base(k)) · K(k)`; the renormalized weights sum to one over each
//! fiber, which makes the trace on `M` exact.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::BumpProfile;
use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, SignatureSpec, SpectralField, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    /// `M` is the `x₁` line in `(x₁, y₂)`.
    Codim2,
    /// `M = {y = 0}`.
    Spacelike,
    /// Mixed `M`, bases with `|η̃| ≤ |ξ̃|`.
    MixedChi1,
    /// Mixed `M`, bases with `|η̃| > |ξ̃|`.
    MixedChi2,
}

impl KernelVariant {
    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::Codim2 => "codim2",
            KernelVariant::Spacelike => "spacelike",
            KernelVariant::MixedChi1 => "mixed_chi1",
            KernelVariant::MixedChi2 => "mixed_chi2",
        }
    }

    pub fn check_signature(self, sig: SignatureSpec) -> Result<()> {
        let ok = match self {
            KernelVariant::Codim2 => sig == SignatureSpec { d1: 1, d2: 2, p1: 1, p2: 0 },
            KernelVariant::Spacelike => sig.p1 == sig.d1 && sig.p2 == 0,
            KernelVariant::MixedChi1 => sig.m_dim() > 0,
            KernelVariant::MixedChi2 => {
                if sig.d1 == sig.p1 {
                    return Err(Error::PurelyTimelikeComplement);
                }
                sig.m_dim() > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::VariantSignature {
                variant: self.name().into(),
                signature: sig.to_string(),
            })
        }
    }

    fn covers(self, growing_base: bool) -> bool {
        match self {
            KernelVariant::MixedChi2 => growing_base,
            _ => !growing_base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub profile: BumpProfile,
    pub variant: KernelVariant,
    /// Support restricted to `|η'| ≤ |ξ| − margin` (physical units).
    pub margin: u32,
}

impl KernelSpec {
    pub fn new(variant: KernelVariant, profile: BumpProfile, margin: u32) -> Self {
        Self {
            profile,
            variant,
            margin,
        }
    }

    pub fn with_margin(&self, margin: u32) -> Self {
        Self {
            margin,
            ..self.clone()
        }
    }
}

/// `|η'| ≤ |ξ| − m` for integer squared norms `s = |ξ|²`, `t = |η'|²` and an
/// integer margin `m`, decided without rounding.
pub fn within_margin(s: i64, t: i64, m: i64) -> bool {
    if m == 0 {
        return t <= s;
    }
    let (s, t, m) = (s as i128, t as i128, m as i128);
    if s < m * m {
        return false;
    }
    let r = s + m * m - t;
    r >= 0 && 4 * m * m * s <= r * r
}

/// `M` position of every `N` mode's base.
pub fn base_indices(n: &FreqLattice, m: &FreqLattice) -> Vec<usize> {
    let axes = n.signature().retained_axes();
    let mut bins = vec![0i64; axes.len()];
    (0..n.len())
        .map(|f| {
            let idx = n.index(f);
            for (b, &a) in bins.iter_mut().zip(&axes) {
                *b = idx[a] as i64;
            }
            m.flat_of(&bins).expect("retained axes share sizes")
        })
        .collect()
}

/// Restriction of an `N` field to `M`: sum over each fiber.
pub fn restrict(field: &SpectralField, m: &Arc<FreqLattice>, base: &[usize]) -> SpectralField {
    let mut out = vec![Complex64::new(0.0, 0.0); m.len()];
    for (c, &b) in field.coeffs().iter().zip(base) {
        out[b] += c;
    }
    let f = SpectralField::new(Arc::clone(m), out).expect("M length");
    if field.is_real_symmetric() {
        f.with_symmetry_flag(true)
    } else {
        f
    }
}

/// Evaluated kernel table.
#[derive(Debug, Clone)]
pub struct Kernel {
    spec: KernelSpec,
    lattice: Arc<FreqLattice>,
    m_lattice: Arc<FreqLattice>,
    base: Vec<usize>,
    raw: Vec<f64>,
    values: Vec<f64>,
    covered: Vec<bool>,
    skipped: Vec<usize>,
}

pub fn make_kernel(spec: &KernelSpec, lattice: &Arc<FreqLattice>) -> Result<Kernel> {
    if lattice.surface() != Surface::N {
        return Err(Error::Geometry("kernels live on the N lattice".into()));
    }
    let sig = lattice.signature();
    spec.variant.check_signature(sig)?;
    spec.profile.validate()?;
    let m_lattice = Arc::new(lattice.restriction_lattice()?);
    let base = base_indices(lattice, &m_lattice);
    let e0 = sig.e0();
    let unit = lattice.freq_unit();
    let cell = unit.powi(e0 as i32);
    let margin_bins = spec.margin as i64 * lattice.period_scale() as i64;
    let rho = spec.profile.support_radius;

    let growing = |mf: usize| {
        let (s, t) = m_lattice.squared_bins(mf);
        t > s
    };
    let covered: Vec<bool> = (0..m_lattice.len())
        .map(|mf| !m_lattice.is_zero_mode(mf) && spec.variant.covers(growing(mf)))
        .collect();

    let norm = match spec.variant {
        KernelVariant::MixedChi2 => spec.profile.shifted_integral(sig.d1 - sig.p1, sig.d2 - sig.p2 - 1),
        _ => spec.profile.integral(e0),
    };
    let xs_axes = sig.complement_space_axes();
    let ys_axes = sig.complement_time_axes();
    let comp_axes = sig.complement_axes();

    let mut raw = vec![0.0; lattice.len()];
    for (f, r) in raw.iter_mut().enumerate() {
        let mf = base[f];
        if !covered[mf] {
            continue;
        }
        let (s, t) = lattice.squared_bins(f);
        if t >= s || !within_margin(s, t, margin_bins) {
            continue;
        }
        // a margin kernel feeds a coordinate factor, which shifts the fiber
        // by one unit along a complement axis; keep room for that
        let idx = lattice.index(f);
        if margin_bins > 0
            && comp_axes
                .iter()
                .any(|&a| idx[a].unsigned_abs() as i64 > lattice.half(a) - lattice.period_scale() as i64)
        {
            continue;
        }
        if e0 == 0 {
            *r = 1.0;
            continue;
        }
        let sq = |axes: &[usize]| axes.iter().map(|&a| (idx[a] as f64).powi(2)).sum::<f64>();
        let (bs, bt) = m_lattice.squared_bins(mf);
        let (xi2, eta2) = (sq(&xs_axes) * unit * unit, sq(&ys_axes) * unit * unit);
        let (scale, profile) = match spec.variant {
            KernelVariant::MixedChi2 => {
                let s2 = ((bt - bs) as f64).sqrt() * unit;
                (s2, spec.profile.shifted(xi2.sqrt() / s2, eta2.sqrt() / s2))
            }
            _ => {
                let s1 = ((bs + bt) as f64).sqrt() * unit;
                (s1, spec.profile.shape((xi2 + eta2).sqrt() / (rho * s1)))
            }
        };
        *r = profile / norm / scale.powi(e0 as i32) * cell;
    }

    let mut sums = vec![0.0; m_lattice.len()];
    for (f, r) in raw.iter().enumerate() {
        sums[base[f]] += r;
    }
    let skipped: Vec<usize> = (0..m_lattice.len())
        .filter(|&mf| covered[mf] && sums[mf] == 0.0)
        .collect();
    let values = raw
        .iter()
        .enumerate()
        .map(|(f, r)| if *r == 0.0 { 0.0 } else { r / sums[base[f]] })
        .collect();
    Ok(Kernel {
        spec: spec.clone(),
        lattice: Arc::clone(lattice),
        m_lattice,
        base,
        raw,
        values,
        covered,
        skipped,
    })
}

impl Kernel {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        &self.lattice
    }

    pub fn m_lattice(&self) -> &Arc<FreqLattice> {
        &self.m_lattice
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    /// Renormalized weights, one per `N` mode.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weights before per-fiber renormalization.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// Whether the kernel handles this base at all (by region).
    pub fn covers(&self, m_flat: usize) -> bool {
        self.covered[m_flat]
    }

    /// Covered bases whose discrete fiber is empty.
    pub fn skipped(&self) -> &[usize] {
        &self.skipped
    }

    pub fn skipped_bins(&self) -> Vec<Vec<i64>> {
        self.skipped
            .iter()
            .map(|&mf| self.m_lattice.mode(mf).bins_i64())
            .collect()
    }

    /// Covered base with a nonempty fiber.
    pub fn supports(&self, m_flat: usize) -> bool {
        self.covered[m_flat] && !self.skipped.contains(&m_flat)
    }

    /// `Σ_fiber K` per base, raw or renormalized.
    pub fn fiber_sums(&self, raw: bool) -> Vec<f64> {
        let src = if raw { &self.raw } else { &self.values };
        let mut sums = vec![0.0; self.m_lattice.len()];
        for (f, v) in src.iter().enumerate() {
            sums[self.base[f]] += v;
        }
        sums
    }

    /// `Ê(k) = ŵ(base(k)) K(k)` for the bases this kernel covers; data on a
    /// covered base with an empty fiber is an error.
    pub fn apply(&self, w: &SpectralField, label: &str, raw: bool) -> Result<SpectralField> {
        if **w.lattice() != *self.m_lattice {
            return Err(Error::LatticeMismatch);
        }
        for &mf in &self.skipped {
            if w.coeffs()[mf] != Complex64::new(0.0, 0.0) {
                return Err(Error::EmptyFiber {
                    label: label.to_string(),
                    base: self.m_lattice.mode(mf).bins_i64(),
                });
            }
        }
        let src = if raw { &self.raw } else { &self.values };
        let wc = w.coeffs();
        let coeffs = src
            .iter()
            .zip(&self.base)
            .map(|(k, &b)| if *k == 0.0 { Complex64::new(0.0, 0.0) } else { wc[b] * k })
            .collect();
        let out = SpectralField::new(Arc::clone(&self.lattice), coeffs)?;
        Ok(out.with_symmetry_flag(w.is_real_symmetric()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::profile::simpson;
    use approx::assert_relative_eq;

    fn codim2(n: usize, scale: u32) -> Arc<FreqLattice> {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        Arc::new(
            FreqLattice::new(sig, &[n, n])
                .unwrap()
                .with_period_scale(scale)
                .unwrap(),
        )
    }

    fn spec(variant: KernelVariant, margin: u32) -> KernelSpec {
        KernelSpec::new(variant, BumpProfile::default(), margin)
    }

    #[test]
    fn margin_predicate_is_exact() {
        assert!(within_margin(9, 1, 2));
        assert!(!within_margin(9, 2, 2));
        assert!(within_margin(25, 9, 2));
        assert!(!within_margin(3, 0, 2));
        for s in 0..200 {
            for t in 0..200 {
                let exact = (t as f64).sqrt() <= (s as f64).sqrt() - 3.0 + 1e-12;
                assert_eq!(within_margin(s, t, 3), exact, "{s} {t}");
            }
        }
    }

    #[test]
    fn unit_base_has_single_point_fiber() {
        let lat = codim2(17, 1);
        let k = make_kernel(&spec(KernelVariant::Codim2, 0), &lat).unwrap();
        let f = lat.flat_of(&[1, 0]).unwrap();
        assert_eq!(k.values()[f], 1.0);
        for j in 1..=8 {
            assert_eq!(k.values()[lat.flat_of(&[1, j]).unwrap()], 0.0);
        }
    }

    #[test]
    fn raw_fiber_sum_is_riemann_sum_of_profile() {
        // oracle: high-resolution quadrature of the normalized profile
        let p = BumpProfile::default();
        let exact = simpson(-1.0, 1.0, 5000, |t| p.radial(t)) / p.integral(1);
        assert_relative_eq!(exact, 1.0, max_relative = 1e-10);
        let mut gaps = Vec::new();
        for scale in [1u32, 2, 4] {
            let lat = codim2(8 * 4 * scale as usize + 1, scale);
            let k = make_kernel(&spec(KernelVariant::Codim2, 0), &lat).unwrap();
            let mf = k.m_lattice().flat_of(&[8 * scale as i64]).unwrap();
            gaps.push((k.fiber_sums(true)[mf] - exact).abs());
            let f = lat.flat_of(&[8 * scale as i64, 3]).unwrap();
            let want = p.radial(3.0 / (8.0 * scale as f64)) / p.integral(1) / 8.0 / scale as f64;
            assert_relative_eq!(k.raw()[f], want, max_relative = 1e-12);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn renormalized_fibers_sum_to_one_and_stay_in_cone() {
        let sig = SignatureSpec::new(2, 3, 1, 1).unwrap();
        let lat = Arc::new(FreqLattice::new(sig, &[9, 9, 9, 9]).unwrap());
        for variant in [KernelVariant::MixedChi1, KernelVariant::MixedChi2] {
            let k = make_kernel(&spec(variant, 0), &lat).unwrap();
            let sums = k.fiber_sums(false);
            for mf in 0..k.m_lattice().len() {
                if k.supports(mf) {
                    assert!((sums[mf] - 1.0).abs() < 1e-14);
                } else {
                    assert_eq!(sums[mf], 0.0);
                }
            }
            for f in 0..lat.len() {
                if k.values()[f] != 0.0 {
                    let (s, t) = lat.squared_bins(f);
                    assert!(t < s);
                }
            }
        }
    }

    #[test]
    fn kernel_is_even_so_odd_moments_vanish() {
        let lat = codim2(33, 1);
        let k = make_kernel(&spec(KernelVariant::Codim2, 2), &lat).unwrap();
        let mut moment = vec![0.0; k.m_lattice().len()];
        for f in 0..lat.len() {
            let mut bins = lat.mode(f).bins_i64();
            let eta = bins[1];
            bins[1] = -eta;
            let mirror = lat.flat_of(&bins).unwrap();
            assert_eq!(k.values()[f], k.values()[mirror]);
            if eta > 0 {
                moment[k.base()[f]] += eta as f64 * (k.values()[f] - k.values()[mirror]);
            }
        }
        assert!(moment.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn chi2_needs_spacelike_complement() {
        let sig = SignatureSpec::new(1, 3, 1, 1).unwrap();
        let lat = Arc::new(FreqLattice::new(sig, &[9, 9, 9]).unwrap());
        let err = make_kernel(&spec(KernelVariant::MixedChi2, 0), &lat).unwrap_err();
        assert_eq!(err.to_string(), "purely timelike complement: extension impossible");
    }

    #[test]
    fn margin_skips_small_bases() {
        let lat = codim2(17, 1);
        let k = make_kernel(&spec(KernelVariant::Codim2, 2), &lat).unwrap();
        let skipped = k.skipped_bins();
        assert_eq!(skipped.len(), 2);
        assert!(skipped.contains(&vec![1]) && skipped.contains(&vec![-1]));
    }
}
