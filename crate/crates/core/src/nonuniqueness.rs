//! Constraint-satisfying Cauchy data that vanish to a prescribed order on `M`.
//!
//! `u₀ = sin^{k+1}(c)·v`, `u₁ = 0` for a complement coordinate `c` of `M` and a
//! finite seed `v` whose modes keep a cone margin of `k+1`, so the shifts by
//! the factor never reach `|ξ| < |η'|`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::kernel::{base_indices, restrict, within_margin};
use crate::lattice::{FreqLattice, SpectralField, Surface};
use crate::propagator::{propagate, CauchyData};

/// Orders up to `k` must vanish to this relative size.
pub const VANISH_TOL: f64 = 1e-10;
/// Order `k+1` and solution divergence must exceed this relative size.
pub const NONTRIVIAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec {
    pub k: u32,
    /// Seed modes in physical integer frequencies on `N`; each gets its
    /// conjugate partner so the witness is real.
    pub seeds: Vec<(Vec<i64>, Complex64)>,
    /// `N` axis of the factor coordinate; must be a complement axis of `M`.
    pub factor_axis: usize,
}

impl WitnessSpec {
    pub fn new(k: u32, factor_axis: usize) -> Self {
        Self {
            k,
            seeds: Vec::new(),
            factor_axis,
        }
    }

    pub fn seed(mut self, freq: Vec<i64>, amp: Complex64) -> Self {
        self.seeds.push((freq, amp));
        self
    }

    /// Checks the factor axis and the seed margins on `lattice`; returns the
    /// seed field `v`.
    pub fn seed_field(&self, lattice: &Arc<FreqLattice>) -> Result<SpectralField> {
        if lattice.surface() != Surface::N {
            return Err(Error::Geometry("witnesses live on the N lattice".into()));
        }
        let sig = lattice.signature();
        if !sig.complement_axes().contains(&self.factor_axis) {
            return Err(Error::NotComplementAxis(self.factor_axis));
        }
        let scale = lattice.period_scale() as i64;
        let margin = self.k + 1;
        let mut modes = Vec::with_capacity(2 * self.seeds.len());
        for (freq, amp) in &self.seeds {
            if freq.len() != lattice.dim() {
                return Err(Error::Dimension {
                    expected: lattice.dim(),
                    got: freq.len(),
                });
            }
            let split = sig.d1;
            let s: i64 = freq[..split].iter().map(|j| j * j).sum();
            let t: i64 = freq[split..].iter().map(|j| j * j).sum();
            if !within_margin(s, t, margin as i64) {
                return Err(Error::SeedMargin {
                    mode: freq.clone(),
                    margin,
                });
            }
            let bins: Vec<i64> = freq.iter().map(|j| j * scale).collect();
            let neg = bins.iter().map(|j| -j).collect();
            modes.push((bins, *amp));
            modes.push((neg, amp.conj()));
        }
        let v = SpectralField::from_modes(Arc::clone(lattice), &modes).map_err(|e| match e {
            Error::FrequencyOutOfRange { freq } => Error::FrequencyOutOfRange {
                freq: freq.iter().map(|j| j / scale).collect(),
            },
            other => other,
        })?;
        v.assert_real_symmetric(1e-15)
    }
}

pub fn build_witness(spec: &WitnessSpec, lattice: &Arc<FreqLattice>) -> Result<CauchyData> {
    let mut u0 = spec.seed_field(lattice)?;
    for _ in 0..=spec.k {
        u0 = u0
            .times_sin(spec.factor_axis)
            .ok_or_else(|| Error::Geometry("factor shifts the seed off the lattice".into()))?;
    }
    CauchyData::new(u0, SpectralField::zeros(Arc::clone(lattice)).with_symmetry_flag(true))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishReport {
    pub k: u32,
    /// Max of `|∂_c^j u₀|` on `M` relative to `max|u₀|`, for `j = 0..=k+1`.
    pub residuals: Vec<f64>,
    /// Max of `|u₁|` on `M` relative to `max|u₀|`.
    pub u1_residual: f64,
    pub first_nonzero_order: Option<u32>,
    /// Orders `≤ k` and `u₁` vanish.
    pub vanishes: bool,
    /// Order `k+1` does not.
    pub nontrivial: bool,
    pub passed: bool,
}

fn restricted_max(field: &SpectralField, m: &Arc<FreqLattice>, base: &[usize]) -> f64 {
    restrict(field, m, base).to_grid().max_abs()
}

pub fn vanish_order_audit(data: &CauchyData, k: u32, axis: usize) -> Result<VanishReport> {
    let n = data.lattice();
    if !n.signature().complement_axes().contains(&axis) {
        return Err(Error::NotComplementAxis(axis));
    }
    let m = Arc::new(n.restriction_lattice()?);
    let base = base_indices(n, &m);
    let scale = data.u0.to_grid().max_abs();
    let rel = |x: f64| if scale == 0.0 { x } else { x / scale };
    let residuals: Vec<f64> = (0..=k + 1)
        .map(|j| rel(restricted_max(&data.u0.derivative_n(axis, j), &m, &base)))
        .collect();
    let u1_residual = rel(restricted_max(&data.u1, &m, &base));
    let first_nonzero_order = residuals.iter().position(|&r| r > VANISH_TOL).map(|j| j as u32);
    let vanishes = residuals[..=k as usize].iter().all(|&r| r <= VANISH_TOL) && u1_residual <= VANISH_TOL;
    let nontrivial = residuals[k as usize + 1] >= NONTRIVIAL_TOL;
    Ok(VanishReport {
        k,
        residuals,
        u1_residual,
        first_nonzero_order,
        vanishes,
        nontrivial,
        passed: vanishes && nontrivial,
    })
}

/// Central differences in `y₁` of the propagated solution restricted to
/// `M`, orders `1..=k`, relative to `max|u₀|`. Each should be `O(δ²)`.
pub fn y1_derivative_audit(data: &CauchyData, k: u32, delta: f64) -> Result<Vec<f64>> {
    let n = data.lattice();
    let m = Arc::new(n.restriction_lattice()?);
    let base = base_indices(n, &m);
    let scale = data.u0.to_grid().max_abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(k as usize);
    for j in 1..=k as i32 {
        let mut acc = SpectralField::zeros(Arc::clone(&m));
        let mut binom = 1.0;
        for i in 0..=j {
            let y = (0.5 * j as f64 - i as f64) * delta;
            let at = propagate(data, y)?;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc.combine(
                Complex64::new(1.0, 0.0),
                &restrict(&at.u0, &m, &base),
                Complex64::new(sign * binom, 0.0),
            )?;
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
        out.push(acc.to_grid().max_abs() / delta.powi(j) / scale);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub y1: f64,
    /// Audit of the difference between the two data sets.
    pub agreement: VanishReport,
    /// Orders `≤ k` of the two data sets agree on `M`.
    pub agree: bool,
    /// `max|Φ(y₁)(base + witness)₀ − Φ(y₁)(base)₀|`.
    pub divergence: f64,
    /// Divergence relative to `max|base₀|` (absolute if the base vanishes).
    pub relative_divergence: f64,
    pub passed: bool,
}

/// Adds a witness to constraint-satisfying `base` and compares the two
/// solutions at `y1`.
pub fn nonuniqueness_demo(base: &CauchyData, spec: &WitnessSpec, y1: f64) -> Result<DemoReport> {
    if !base.is_center() {
        return Err(Error::BaseNotCentered);
    }
    let witness = build_witness(spec, base.lattice())?;
    let other = base.add(&witness)?;
    let diff = other.sub(base)?;
    let agreement = vanish_order_audit(&diff, spec.k, spec.factor_axis)?;
    let a = propagate(base, y1)?;
    let b = propagate(&other, y1)?;
    let divergence = b.u0.sub(&a.u0)?.to_grid().max_abs();
    let scale = base.u0.to_grid().max_abs();
    let relative_divergence = if scale == 0.0 { divergence } else { divergence / scale };
    let agree = agreement.vanishes;
    Ok(DemoReport {
        y1,
        agree,
        passed: agree && relative_divergence > NONTRIVIAL_TOL,
        agreement,
        divergence,
        relative_divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{extend_codim2, BumpProfile, KernelSpec, KernelVariant, TraceData, TraceLabel};
    use crate::lattice::SignatureSpec;
    use crate::random::BandLimited;
    use proptest::prelude::*;

    fn lattice(n: usize) -> Arc<FreqLattice> {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        Arc::new(FreqLattice::new(sig, &[n, n]).unwrap())
    }

    fn one() -> Complex64 {
        Complex64::new(0.5, 0.0)
    }

    #[test]
    fn witness_examples() {
        let lat = lattice(33);
        let w = build_witness(&WitnessSpec::new(2, 1).seed(vec![8, 0], one()), &lat).unwrap();
        assert!(w.is_center());
        assert!(w.r2_support().is_empty());
        // sin³(y) cos(8x)
        let g = w.u0.to_grid();
        let want = crate::lattice::GridField::from_real_fn(Arc::clone(&lat), |p| p[1].sin().powi(3) * (8.0 * p[0]).cos());
        assert!(g.max_abs_diff(&want).unwrap() < 1e-13);

        let w0 = build_witness(&WitnessSpec::new(0, 1).seed(vec![8, 0], one()), &lat).unwrap();
        let r = vanish_order_audit(&w0, 0, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.first_nonzero_order, Some(1));

        assert_eq!(
            build_witness(&WitnessSpec::new(2, 1).seed(vec![2, 0], one()), &lat).unwrap_err(),
            Error::SeedMargin { mode: vec![2, 0], margin: 3 }
        );
        assert_eq!(
            build_witness(&WitnessSpec::new(2, 0).seed(vec![8, 0], one()), &lat).unwrap_err(),
            Error::NotComplementAxis(0)
        );
    }

    #[test]
    fn audit_examples() {
        let lat = lattice(33);
        let w = build_witness(&WitnessSpec::new(2, 1).seed(vec![8, 1], one()), &lat).unwrap();
        let r = vanish_order_audit(&w, 2, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.first_nonzero_order, Some(3));
        assert_eq!(r.residuals.len(), 4);

        let zero = CauchyData::zeros(Arc::clone(&lat));
        let r = vanish_order_audit(&zero, 2, 1).unwrap();
        assert!(r.residuals.iter().all(|&x| x == 0.0));
        assert_eq!(r.first_nonzero_order, None);
        assert!(!r.passed);

        // cos(y₂)·v does not vanish on M
        let v = BandLimited::new().cos(vec![8, 0], 1.0).to_spectral(&lat).unwrap();
        let c = SpectralField::from_modes(Arc::clone(&lat), &[(vec![0, 1], one()), (vec![0, -1], one())]).unwrap();
        let prod = crate::lattice::GridField::new(
            Arc::clone(&lat),
            v.to_grid().values().iter().zip(c.to_grid().values()).map(|(a, b)| a * b).collect(),
        )
        .unwrap()
        .to_spectral();
        let data = CauchyData::new(prod, SpectralField::zeros(Arc::clone(&lat))).unwrap();
        let r = vanish_order_audit(&data, 2, 1).unwrap();
        assert!(r.residuals[0] > 0.5);
        assert_eq!(r.first_nonzero_order, Some(0));
    }

    #[test]
    fn y1_derivatives_vanish_at_second_order() {
        let lat = lattice(33);
        let w = build_witness(&WitnessSpec::new(3, 1).seed(vec![9, 2], one()), &lat).unwrap();
        let coarse = y1_derivative_audit(&w, 3, 0.02).unwrap();
        let fine = y1_derivative_audit(&w, 3, 0.01).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            // odd orders cancel exactly since u₁ = 0 makes the solution even in y₁
            assert!(*f < 1e-2, "{coarse:?} {fine:?}");
            assert!(*c == 0.0 || (c / f > 3.0 && c / f < 5.0), "{coarse:?} {fine:?}");
        }
    }

    fn extended_base(lat: &Arc<FreqLattice>) -> CauchyData {
        let m = Arc::new(lat.restriction_lattice().unwrap());
        let w0 = BandLimited::new().cos(vec![3], 1.0).to_spectral(&m).unwrap();
        let w = TraceData::new(m).unwrap().with(TraceLabel::Value, w0).unwrap();
        let spec = KernelSpec::new(KernelVariant::Codim2, BumpProfile::default(), 2);
        extend_codim2(&w, &spec, lat).unwrap()
    }

    #[test]
    fn demo_examples() {
        let lat = lattice(33);
        let base = extended_base(&lat);
        let spec = WitnessSpec::new(2, 1).seed(vec![8, 1], one());
        let r = nonuniqueness_demo(&base, &spec, 1.0).unwrap();
        assert!(r.passed, "{r:?}");

        let zero = WitnessSpec::new(2, 1).seed(vec![8, 1], Complex64::new(0.0, 0.0));
        let r = nonuniqueness_demo(&base, &zero, 1.0).unwrap();
        assert_eq!(r.divergence, 0.0);

        let other = WitnessSpec::new(2, 1).seed(vec![7, -2], one());
        let a = propagate(&base.add(&build_witness(&spec, &lat).unwrap()).unwrap(), 1.0).unwrap();
        let b = propagate(&base.add(&build_witness(&other, &lat).unwrap()).unwrap(), 1.0).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() > 1e-3);

        let bad = CauchyData::new(
            SpectralField::from_modes(Arc::clone(&lat), &[(vec![1, 2], one()), (vec![-1, -2], one())]).unwrap(),
            SpectralField::zeros(Arc::clone(&lat)),
        )
        .unwrap();
        assert_eq!(nonuniqueness_demo(&bad, &spec, 1.0).unwrap_err(), Error::BaseNotCentered);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn vanishing_order_is_exactly_k(k in 0u32..4, xi in 5i64..10, eta_frac in 0.0f64..1.0) {
            let lat = lattice(33);
            let eta = ((xi - k as i64 - 1) as f64 * eta_frac).floor() as i64;
            let w = build_witness(&WitnessSpec::new(k, 1).seed(vec![xi, eta], one()), &lat).unwrap();
            prop_assert!(w.r2_support().is_empty());
            let r = vanish_order_audit(&w, k, 1).unwrap();
            prop_assert!(r.passed, "{:?}", r);
            prop_assert_eq!(r.first_nonzero_order, Some(k + 1));
        }
    }
}
