//! Second-order centered time stepper for `∂²_{y₁}u = Δₓu − Δ_{y'}u`,
//! used as an independent check on the exact propagator. Space derivatives
//! are spectral, so the only discretization error is the `O(h²)` in `y₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SpectralField;
use crate::propagator::{propagate, CauchyData};

/// `u` at `y1` after `steps` leapfrog steps of size `y1 / steps`.
pub fn leapfrog(data: &CauchyData, y1: f64, steps: usize) -> Result<SpectralField> {
    if !y1.is_finite() {
        return Err(Error::NonFiniteY1(y1));
    }
    if steps == 0 {
        return Err(Error::BadGrid);
    }
    let lat = data.lattice();
    let h = y1 / steps as f64;
    let h2 = h * h;
    // symbol of the spatial operator, -(|ξ|² - |η'|²)
    let op: Vec<f64> = (0..lat.len()).map(|f| -lat.mode(f).dispersion_sq()).collect();
    let u0 = data.u0.coeffs();
    let u1 = data.u1.coeffs();
    let mut prev = u0.to_vec();
    let mut cur: Vec<_> = (0..lat.len())
        .map(|f| u0[f] + h * u1[f] + 0.5 * h2 * op[f] * u0[f])
        .collect();
    for _ in 1..steps {
        for f in 0..lat.len() {
            let next = 2.0 * cur[f] - prev[f] + h2 * op[f] * cur[f];
            prev[f] = cur[f];
            cur[f] = next;
        }
    }
    let field = SpectralField::new(std::sync::Arc::clone(lat), cur)?;
    Ok(if data.u0.is_real_symmetric() && data.u1.is_real_symmetric() {
        field.assert_real_symmetric(1e-12)?
    } else {
        field
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdConvergence {
    pub y1: f64,
    pub h_coarse: f64,
    pub h_fine: f64,
    pub error_coarse: f64,
    pub error_fine: f64,
    pub ratio: f64,
}

/// Grid max-norm error of the stepper against [`propagate`] at steps
/// `h_coarse` and `h_coarse / 2`.
pub fn fd_convergence(data: &CauchyData, y1: f64, h_coarse: f64) -> Result<FdConvergence> {
    let exact = propagate(data, y1)?.u0.to_grid();
    let steps = (y1 / h_coarse).round().max(1.0) as usize;
    let err = |n: usize| -> Result<f64> {
        let approx = leapfrog(data, y1, n)?.to_grid();
        Ok(approx.max_abs_diff(&exact).expect("same lattice"))
    };
    let error_coarse = err(steps)?;
    let error_fine = err(2 * steps)?;
    Ok(FdConvergence {
        y1,
        h_coarse: y1 / steps as f64,
        h_fine: y1 / (2 * steps) as f64,
        error_coarse,
        error_fine,
        ratio: error_coarse / error_fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{FreqLattice, SignatureSpec};
    use crate::propagator::{project, SubspaceTag};
    use crate::random::random_cauchy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn second_order_convergence() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let lat = Arc::new(FreqLattice::new(sig, &[17, 17]).unwrap());
        let d = project(
            &random_cauchy(&lat, 6.0, &mut ChaCha8Rng::seed_from_u64(11)),
            SubspaceTag::C,
        );
        let rep = fd_convergence(&d, 1.0, 1.0 / 100.0).unwrap();
        assert!(rep.ratio > 3.5 && rep.ratio < 4.5, "{rep:?}");
    }
}
