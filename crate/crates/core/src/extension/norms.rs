//! Lattice Sobolev-type norms of fields on `M`.
//!
//! All norms are lattice sums weighted by the frequency-cell factor, so on a
//! lattice with period scale 1 they are plain sums over modes.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, SignatureSpec, SpectralField};

const MEAN_TOL: f64 = 1e-12;

fn growing(lat: &FreqLattice, f: usize) -> bool {
    let (s, t) = lat.squared_bins(f);
    t > s
}

/// Split into the parts supported on `|η̃| ≤ |ξ̃|` and on `|η̃| > |ξ̃|`.
pub fn pi_split(w: &SpectralField) -> (SpectralField, SpectralField) {
    let lat = w.lattice();
    let mut one = w.coeffs().to_vec();
    let mut two = w.coeffs().to_vec();
    for f in 0..lat.len() {
        if growing(lat, f) {
            one[f] = Complex64::new(0.0, 0.0);
        } else {
            two[f] = Complex64::new(0.0, 0.0);
        }
    }
    let sym = w.is_real_symmetric();
    let make = |c| {
        SpectralField::new(Arc::clone(lat), c)
            .expect("same length")
            .with_symmetry_flag(sym)
    };
    (make(one), make(two))
}

pub(crate) fn has_mean(w: &SpectralField) -> bool {
    let lat = w.lattice();
    let zero = lat.flat_of(&vec![0; lat.dim()]).expect("zero mode");
    w.coeffs()[zero].norm() > MEAN_TOL * w.max_abs()
}

/// `Σ_{k≠0} |k|^{2s} |ŵ(k)|²`.
pub fn hdot_norm_sq(w: &SpectralField, s: f64) -> Result<f64> {
    if s < 0.0 && has_mean(w) {
        return Err(Error::HdotMean);
    }
    let lat = w.lattice();
    let total: f64 = w
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(f, c)| !lat.is_zero_mode(*f) && c.norm_sqr() != 0.0)
        .map(|(f, c)| lat.mode(f).norm_sq().powf(s) * c.norm_sqr())
        .sum();
    Ok(lat.plancherel_weight() * total)
}

/// `Σ_{|η̃|≤|ξ̃|, k≠0} |ŵ|² (|ξ̃|²+|η̃|²)^r`; modes outside that region are
/// ignored.
pub fn h_norm_sq(w: &SpectralField, r: f64) -> f64 {
    let lat = w.lattice();
    let total: f64 = w
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(f, c)| !lat.is_zero_mode(*f) && !growing(lat, *f) && c.norm_sqr() != 0.0)
        .map(|(f, c)| lat.mode(f).norm_sq().powf(r) * c.norm_sqr())
        .sum();
    lat.plancherel_weight() * total
}

/// `Σ |ŵ|² (|ξ̃|²+|η̃|²)^r / (|η̃|²−|ξ̃|²)^{e₀/2+s}` over a support that must
/// lie strictly in `|η̃| > |ξ̃|`.
pub fn k_norm_sq(w: &SpectralField, r: f64, s: f64, signature: SignatureSpec) -> Result<f64> {
    let lat = w.lattice();
    let expo = 0.5 * signature.e0() as f64 + s;
    let mut total = 0.0;
    for (f, c) in w.coeffs().iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        if !growing(lat, f) {
            return Err(Error::SupportTouchesR1(lat.mode(f).bins_i64()));
        }
        let m = lat.mode(f);
        total += c.norm_sqr() * m.norm_sq().powf(r) / (-m.dispersion_sq()).powf(expo);
    }
    Ok(lat.plancherel_weight() * total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `(s, ‖w‖²_{Ḣ^s})`.
    pub hdot: Vec<(f64, f64)>,
    /// `(r, ‖π₁w‖²_{H^r})`.
    pub hr: Vec<(f64, f64)>,
    /// `(r, s, ‖π₂w‖²_{K^r_s})`.
    pub kr: Vec<(f64, f64, f64)>,
}

pub fn norm_report(
    w: &SpectralField,
    signature: SignatureSpec,
    hdot: &[f64],
    hr: &[f64],
    kr: &[(f64, f64)],
) -> Result<NormReport> {
    let (one, two) = pi_split(w);
    Ok(NormReport {
        hdot: hdot
            .iter()
            .map(|&s| hdot_norm_sq(w, s).map(|v| (s, v)))
            .collect::<Result<_>>()?,
        hr: hr.iter().map(|&r| (r, h_norm_sq(&one, r))).collect(),
        kr: kr
            .iter()
            .map(|&(r, s)| k_norm_sq(&two, r, s, signature).map(|v| (r, s, v)))
            .collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridField;
    use crate::random::random_field;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize) -> Arc<FreqLattice> {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        Arc::new(FreqLattice::hypersurface(sig, &[n]).unwrap())
    }

    fn plane() -> (SignatureSpec, Arc<FreqLattice>) {
        let sig = SignatureSpec::new(2, 3, 1, 1).unwrap();
        (sig, Arc::new(FreqLattice::hypersurface(sig, &[9, 9]).unwrap()))
    }

    #[test]
    fn hdot_examples() {
        let lat = line(17);
        let w = GridField::from_real_fn(Arc::clone(&lat), |x| x[0].cos()).to_spectral();
        assert_relative_eq!(hdot_norm_sq(&w, 0.5).unwrap(), 0.5, max_relative = 1e-12);
        let w = GridField::from_real_fn(Arc::clone(&lat), |x| (2.0 * x[0]).cos()).to_spectral();
        assert_relative_eq!(hdot_norm_sq(&w, -0.5).unwrap(), 0.25, max_relative = 1e-12);
        assert_eq!(hdot_norm_sq(&SpectralField::zeros(lat), 1.3).unwrap(), 0.0);
    }

    #[test]
    fn hdot_rejects_mean_for_negative_order() {
        let lat = line(9);
        let w = GridField::from_real_fn(lat, |x| 1.0 + x[0].cos()).to_spectral();
        assert_eq!(hdot_norm_sq(&w, -0.5), Err(Error::HdotMean));
        assert!(hdot_norm_sq(&w, 0.5).is_ok());
    }

    #[test]
    fn k_norm_examples() {
        let (sig, lat) = plane();
        assert_eq!(sig.e0(), 2);
        let w = SpectralField::from_modes(Arc::clone(&lat), &[(vec![1, 2], Complex64::new(1.0, 0.0))])
            .unwrap();
        assert_relative_eq!(k_norm_sq(&w, 0.0, 0.0, sig).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(k_norm_sq(&w, 1.0, 0.0, sig).unwrap(), 5.0 / 3.0, max_relative = 1e-15);
        assert_eq!(k_norm_sq(&SpectralField::zeros(Arc::clone(&lat)), 1.0, 0.0, sig).unwrap(), 0.0);
        let tie = SpectralField::from_modes(lat, &[(vec![1, 1], Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(k_norm_sq(&tie, 0.0, 0.0, sig), Err(Error::SupportTouchesR1(_))));
    }

    #[test]
    fn pi_split_examples() {
        let (_, lat) = plane();
        for (bins, first) in [([2, 1], true), ([1, 2], false), ([1, 1], true)] {
            let w = SpectralField::from_modes(Arc::clone(&lat), &[(bins.to_vec(), Complex64::new(1.0, 0.0))])
                .unwrap();
            let (one, two) = pi_split(&w);
            assert_eq!(one.max_abs() == 1.0, first);
            assert_eq!(two.max_abs() == 1.0, !first);
        }
    }

    proptest! {
        #[test]
        fn pi_split_is_orthogonal(seed in any::<u64>()) {
            let (_, lat) = plane();
            let w = random_field(&lat, 4.0, &mut ChaCha8Rng::seed_from_u64(seed));
            let (one, two) = pi_split(&w);
            let sum = one.add(&two).unwrap();
            prop_assert_eq!(sum.coeffs(), w.coeffs());
            let total = one.sum_sq() + two.sum_sq();
            prop_assert!((total - w.sum_sq()).abs() <= 1e-14 * w.sum_sq());
        }
    }
}
