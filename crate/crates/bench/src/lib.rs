//! Fixtures shared by the criterion benches.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ultrawave_core::random::random_cauchy;
use ultrawave_core::{CauchyData, FreqLattice, SignatureSpec};

/// Square `(1, 2)` lattice with `n` points per axis.
pub fn square_lattice(n: usize) -> Arc<FreqLattice> {
    let sig = SignatureSpec::new(1, 2, 1, 0).expect("valid signature");
    Arc::new(FreqLattice::new(sig, &[n, n]).expect("odd size"))
}

/// Seeded random Cauchy data with all modes up to a quarter of the band.
pub fn random_data(lattice: &Arc<FreqLattice>, seed: u64) -> CauchyData {
    let band = lattice.half(0) as f64 / 2.0;
    random_cauchy(lattice, band, &mut ChaCha8Rng::seed_from_u64(seed))
}
