//! Seeded random and band-limited test data.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, SpectralField};
use crate::propagator::CauchyData;

/// Real, zero-mean random field whose modes satisfy `|k| ≤ bandwidth`
/// (physical units). Coefficients are uniform in the unit square.
pub fn random_field<R: Rng + ?Sized>(
    lattice: &Arc<FreqLattice>,
    bandwidth: f64,
    rng: &mut R,
) -> SpectralField {
    random_field_where(lattice, rng, |f| lattice.mode(f).norm_sq() <= bandwidth * bandwidth)
}

/// Like [`random_field`] but restricted to modes accepted by `keep`, which
/// must be symmetric under `k -> -k`.
pub fn random_field_where<R: Rng + ?Sized>(
    lattice: &Arc<FreqLattice>,
    rng: &mut R,
    keep: impl Fn(usize) -> bool,
) -> SpectralField {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for flat in 0..lattice.len() {
        let neg = lattice.negated(flat);
        if neg <= flat || !keep(flat) {
            continue;
        }
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coeffs[flat] = z;
        coeffs[neg] = z.conj();
    }
    SpectralField::new(Arc::clone(lattice), coeffs)
        .expect("lattice length")
        .assert_real_symmetric(0.0)
        .expect("symmetric by construction")
}

pub fn random_cauchy<R: Rng + ?Sized>(
    lattice: &Arc<FreqLattice>,
    bandwidth: f64,
    rng: &mut R,
) -> CauchyData {
    let u0 = random_field(lattice, bandwidth, rng);
    let u1 = random_field(lattice, bandwidth, rng);
    CauchyData::new(u0, u1).expect("same lattice")
}

/// Trigonometric polynomial `Σ a e^{i f·x}` with integer physical
/// frequencies, independent of the lattice resolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BandLimited {
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl BandLimited {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, freq: Vec<i64>, amp: Complex64) -> Self {
        self.terms.push((freq, amp));
        self
    }

    /// `amp · cos(f·x)`.
    pub fn cos(self, freq: Vec<i64>, amp: f64) -> Self {
        let neg = freq.iter().map(|j| -j).collect();
        self.term(freq, Complex64::new(amp / 2.0, 0.0))
            .term(neg, Complex64::new(amp / 2.0, 0.0))
    }

    /// `amp · sin(f·x)`.
    pub fn sin(self, freq: Vec<i64>, amp: f64) -> Self {
        let neg = freq.iter().map(|j| -j).collect();
        self.term(freq, Complex64::new(0.0, -amp / 2.0))
            .term(neg, Complex64::new(0.0, amp / 2.0))
    }

    /// Product of cosines, one per listed axis frequency; `amp Π cos(fᵢ xᵢ)`.
    pub fn cos_product(freq: &[i64], amp: f64) -> Self {
        let mut terms = vec![(Vec::new(), Complex64::new(amp, 0.0))];
        for &f in freq {
            let mut next = Vec::new();
            for (k, a) in terms {
                let variants: &[i64] = if f == 0 { &[0] } else { &[f, -f] };
                let share = if f == 0 { 1.0 } else { 0.5 };
                for &s in variants {
                    let mut kk = k.clone();
                    kk.push(s);
                    next.push((kk, a * share));
                }
            }
            terms = next;
        }
        Self { terms }
    }

    pub fn to_spectral(&self, lattice: &Arc<FreqLattice>) -> Result<SpectralField> {
        let scale = lattice.period_scale() as i64;
        let modes: Vec<(Vec<i64>, Complex64)> = self
            .terms
            .iter()
            .map(|(f, a)| (f.iter().map(|j| j * scale).collect(), *a))
            .collect();
        for (f, _) in &self.terms {
            if f.len() != lattice.dim() {
                return Err(Error::Dimension {
                    expected: lattice.dim(),
                    got: f.len(),
                });
            }
        }
        let field = SpectralField::from_modes(Arc::clone(lattice), &modes).map_err(|e| match e {
            Error::FrequencyOutOfRange { freq } => Error::FrequencyOutOfRange {
                freq: freq.iter().map(|j| j / scale).collect(),
            },
            other => other,
        })?;
        // keep the flag when the terms happen to describe a real field
        let sym = field.hermitian_residual().0 <= 1e-14;
        Ok(if sym {
            field.assert_real_symmetric(1e-14)?
        } else {
            field
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridField, SignatureSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_field_is_real_and_zero_mean() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let lat = Arc::new(FreqLattice::new(sig, &[11, 13]).unwrap());
        let f = random_field(&lat, 4.0, &mut ChaCha8Rng::seed_from_u64(9));
        assert!(f.is_real_symmetric());
        assert_eq!(f.coeff(&[0, 0]).unwrap(), Complex64::new(0.0, 0.0));
        let g = f.to_grid();
        let back = GridField::new(Arc::clone(&lat), g.values().to_vec()).unwrap().to_spectral();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn band_limited_tracks_period_scale() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let w = BandLimited::cos_product(&[2, 1], 1.0);
        for scale in [1u32, 3] {
            let lat = Arc::new(
                FreqLattice::new(sig, &[13, 13])
                    .unwrap()
                    .with_period_scale(scale)
                    .unwrap(),
            );
            let g = w.to_spectral(&lat).unwrap().to_grid();
            let want = GridField::from_real_fn(Arc::clone(&lat), |x| (2.0 * x[0]).cos() * x[1].cos());
            assert!(g.max_abs_diff(&want).unwrap() < 1e-13);
        }
        let lat = Arc::new(FreqLattice::new(sig, &[5, 5]).unwrap().with_period_scale(2).unwrap());
        assert!(matches!(
            w.to_spectral(&lat),
            Err(Error::FrequencyOutOfRange { .. })
        ));
    }
}
