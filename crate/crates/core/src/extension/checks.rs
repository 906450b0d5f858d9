//! Norm identities and energy bounds for extended data, checked by
//! refinement.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::extend::{TraceData, TraceLabel};
use super::kernel::{make_kernel, KernelSpec, KernelVariant};
use super::norms::{h_norm_sq, hdot_norm_sq, k_norm_sq, pi_split};
use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, SignatureSpec};
use crate::propagator::{x_norm_sq, CauchyData};
use crate::random::BandLimited;

/// One lattice of a refinement sweep: `N` sizes and period scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub sizes: Vec<usize>,
    pub period_scale: u32,
}

impl Refinement {
    pub fn new(sizes: Vec<usize>, period_scale: u32) -> Self {
        Self { sizes, period_scale }
    }

    pub fn lattice(&self, sig: SignatureSpec) -> Result<Arc<FreqLattice>> {
        Ok(Arc::new(
            FreqLattice::new(sig, &self.sizes)?.with_period_scale(self.period_scale)?,
        ))
    }

    /// `n → 2n−1` per axis with twice the period: same physical bandwidth,
    /// half the frequency spacing.
    pub fn sweep(sizes: &[usize], levels: usize) -> Vec<Refinement> {
        let mut out = vec![Refinement::new(sizes.to_vec(), 1)];
        for _ in 1..levels {
            let last = out.last().unwrap();
            out.push(Refinement::new(
                last.sizes.iter().map(|n| 2 * n - 1).collect(),
                last.period_scale * 2,
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormIdentityLevel {
    pub sizes: Vec<usize>,
    pub period_scale: u32,
    /// `‖E(w)‖²_{L²(N)}`.
    pub lhs: f64,
    /// `‖ψ‖²_{L²} ‖w‖²_{Ḣ^{-1/2}}`.
    pub rhs: f64,
    pub gap: f64,
    /// `‖sin(y₂)E(w)‖²_{L²(N)}`.
    pub weighted_lhs: f64,
    /// `∫|ψ'|² ‖w‖²_{Ḣ^{-3/2}}`.
    pub weighted_rhs: f64,
    pub weighted_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormIdentityReport {
    pub levels: Vec<NormIdentityLevel>,
    /// Gaps strictly decrease (or all vanish).
    pub monotone: bool,
    pub weighted_monotone: bool,
    pub final_gap: f64,
    pub final_weighted_gap: f64,
}

fn rel_gap(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / rhs.abs().max(lhs.abs())
    }
}

fn decreasing(gaps: &[f64]) -> bool {
    gaps.iter().all(|&g| g == 0.0) || gaps.windows(2).all(|p| p[1] < p[0])
}

/// Compares the lattice `L²` norm of the unrenormalized codim-2 extension
/// with its continuum value, plus the variant weighted by `sin(y₂)`.
pub fn norm_identity_check(
    w: &BandLimited,
    spec: &KernelSpec,
    refinements: &[Refinement],
) -> Result<NormIdentityReport> {
    if spec.variant != KernelVariant::Codim2 {
        return Err(Error::VariantSignature {
            variant: spec.variant.name().into(),
            signature: "codim2 identity".into(),
        });
    }
    let sig = SignatureSpec::new(1, 2, 1, 0)?;
    let psi = spec.profile.normalized_1d();
    let (psi_sq, dpsi_sq) = (psi.l2_sq(), psi.derivative_l2_sq());
    let mut levels = Vec::with_capacity(refinements.len());
    for r in refinements {
        let n = r.lattice(sig)?;
        let kernel = make_kernel(spec, &n)?;
        let wm = w.to_spectral(kernel.m_lattice())?;
        let e = kernel.apply(&wm, "w0", true)?;
        let weighted = e.times_sin(1).ok_or_else(|| {
            Error::Geometry("coordinate factor shifts data off the lattice".into())
        })?;
        let lhs = e.l2_norm_sq();
        let rhs = psi_sq * hdot_norm_sq(&wm, -0.5)?;
        let weighted_lhs = weighted.l2_norm_sq();
        let weighted_rhs = dpsi_sq * hdot_norm_sq(&wm, -1.5)?;
        levels.push(NormIdentityLevel {
            sizes: r.sizes.clone(),
            period_scale: r.period_scale,
            lhs,
            rhs,
            gap: rel_gap(lhs, rhs),
            weighted_lhs,
            weighted_rhs,
            weighted_gap: rel_gap(weighted_lhs, weighted_rhs),
        });
    }
    let gaps: Vec<f64> = levels.iter().map(|l| l.gap).collect();
    let wgaps: Vec<f64> = levels.iter().map(|l| l.weighted_gap).collect();
    Ok(NormIdentityReport {
        monotone: decreasing(&gaps),
        weighted_monotone: decreasing(&wgaps),
        final_gap: gaps.last().copied().unwrap_or(0.0),
        final_weighted_gap: wgaps.last().copied().unwrap_or(0.0),
        levels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBoundReport {
    /// `‖(u₀,u₁)‖²_X`.
    pub lhs: f64,
    /// Named squared norms of the right-hand side.
    pub rhs_terms: Vec<(String, f64)>,
    /// `lhs / Σ rhs`; zero when both vanish.
    pub ratio: f64,
}

/// Energy norm of extended data against the norms of its traces: homogeneous
/// norms when `M = {y = 0}`, split `H`/`K` norms otherwise.
pub fn energy_bound_check(w: &TraceData, u: &CauchyData) -> Result<EnergyBoundReport> {
    let sig = w.signature();
    let lhs = x_norm_sq(u, 0)?;
    let mut rhs_terms = Vec::new();
    if sig.p1 == sig.d1 && sig.p2 == 0 {
        let d2 = sig.d2 as f64;
        for (label, f) in w.components() {
            let s = match label {
                TraceLabel::Value => (3.0 - d2) / 2.0,
                _ => (1.0 - d2) / 2.0,
            };
            rhs_terms.push((format!("{} Hdot^{s}", label.name(sig)), hdot_norm_sq(f, s)?));
        }
    } else {
        let e0 = sig.e0() as f64;
        for (label, f) in w.components() {
            let (one, two) = pi_split(f);
            let (r1, r2) = match label {
                TraceLabel::Normal => (e0, 0.0),
                _ => (e0 + 1.0, 1.0),
            };
            let name = label.name(sig);
            rhs_terms.push((format!("{name} H^{r1}"), h_norm_sq(&one, r1)));
            rhs_terms.push((format!("{name} K^{r2}"), k_norm_sq(&two, r2, 0.0, sig)?));
        }
    }
    let total: f64 = rhs_terms.iter().map(|t| t.1).sum();
    let ratio = if lhs == 0.0 && total == 0.0 { 0.0 } else { lhs / total };
    Ok(EnergyBoundReport {
        lhs,
        rhs_terms,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::extend::{extend_codim2, extend_spacelike, mixed_extender};
    use crate::extension::profile::BumpProfile;

    fn codim2_spec() -> KernelSpec {
        KernelSpec::new(KernelVariant::Codim2, BumpProfile::default(), 0)
    }

    #[test]
    fn theorem_identity_converges() {
        let w = BandLimited::new().cos(vec![8], 1.0);
        let r = norm_identity_check(&w, &codim2_spec(), &Refinement::sweep(&[33, 33], 3)).unwrap();
        assert!(r.monotone, "{r:?}");
        assert!(r.final_gap <= 0.05, "{r:?}");
        assert!(r.final_weighted_gap <= 0.10, "{r:?}");
        let zero = norm_identity_check(&BandLimited::new(), &codim2_spec(), &Refinement::sweep(&[9, 9], 2)).unwrap();
        assert!(zero.levels.iter().all(|l| l.lhs == 0.0 && l.rhs == 0.0));
    }

    fn ratios(sig: SignatureSpec, base: &[usize], data: &[(TraceLabel, BandLimited)], specs: &[KernelSpec]) -> Vec<f64> {
        Refinement::sweep(base, 3)
            .iter()
            .map(|r| {
                let n = r.lattice(sig).unwrap();
                let ext = match specs.len() {
                    1 => super::super::extend::Extender::new(specs, &n).unwrap(),
                    _ => mixed_extender(&specs[0], &specs[1], &n).unwrap(),
                };
                let mut w = TraceData::new(Arc::clone(ext.m_lattice())).unwrap();
                for (l, f) in data {
                    w.insert(*l, f.to_spectral(ext.m_lattice()).unwrap()).unwrap();
                }
                let u = ext.extend(&w).unwrap();
                assert!(u.is_center());
                energy_bound_check(&w, &u).unwrap().ratio
            })
            .collect()
    }

    fn stable(r: &[f64]) -> bool {
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().all(|x| x.is_finite() && (x / mean - 1.0).abs() <= 0.2)
    }

    #[test]
    fn codim2_energy_ratio_is_stable() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let r = ratios(sig, &[17, 17], &[(TraceLabel::Value, BandLimited::new().cos(vec![4], 1.0))], &[codim2_spec()]);
        assert!(stable(&r), "{r:?}");
    }

    #[test]
    fn spacelike_energy_ratio_is_stable() {
        let sig = SignatureSpec::new(2, 2, 2, 0).unwrap();
        let spec = KernelSpec::new(KernelVariant::Spacelike, BumpProfile::default(), 2);
        let data = [
            (TraceLabel::Value, BandLimited::cos_product(&[3, 2], 1.0)),
            (TraceLabel::Normal, BandLimited::new().sin(vec![4, 0], 0.5)),
            (TraceLabel::Complement(2), BandLimited::new().cos(vec![3, 3], 0.7)),
        ];
        let r = ratios(sig, &[13, 13, 13], &data, &[spec]);
        assert!(stable(&r), "{r:?}");
    }

    #[test]
    fn zero_data_has_zero_energy() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let n = Arc::new(FreqLattice::new(sig, &[9, 9]).unwrap());
        let m = Arc::new(n.restriction_lattice().unwrap());
        let w = TraceData::new(m).unwrap();
        let u = extend_codim2(&w, &codim2_spec(), &n).unwrap();
        let r = energy_bound_check(&w, &u).unwrap();
        assert_eq!((r.lhs, r.ratio), (0.0, 0.0));
        let sig = SignatureSpec::new(2, 2, 2, 0).unwrap();
        let n = Arc::new(FreqLattice::new(sig, &[5, 5, 5]).unwrap());
        let w = TraceData::new(Arc::new(n.restriction_lattice().unwrap())).unwrap();
        let spec = KernelSpec::new(KernelVariant::Spacelike, BumpProfile::default(), 2);
        assert_eq!(energy_bound_check(&w, &extend_spacelike(&w, &spec, &n).unwrap()).unwrap().lhs, 0.0);
    }

    #[test]
    fn mixed_energy_ratio_is_stable() {
        let sig = SignatureSpec::new(2, 2, 1, 1).unwrap();
        let specs = [
            KernelSpec::new(KernelVariant::MixedChi1, BumpProfile::default(), 2),
            KernelSpec::new(KernelVariant::MixedChi2, BumpProfile::default(), 2),
        ];
        let data = [
            (TraceLabel::Value, BandLimited::cos_product(&[3, 1], 1.0).cos(vec![1, 2], 0.5)),
            (TraceLabel::Normal, BandLimited::new().cos(vec![2, 1], 0.3)),
        ];
        let r = ratios(sig, &[13, 13, 13], &data, &specs);
        assert!(stable(&r), "{r:?}");
    }
}
