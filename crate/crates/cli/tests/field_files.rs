//! UHF1 files on disk.

use std::fs;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ultrawave_cli::{read_field, write_field, FieldData, FieldIoError};
use ultrawave_core::random::random_field;
use ultrawave_core::{FreqLattice, SignatureSpec};

fn lattice(sizes: &[usize]) -> Arc<FreqLattice> {
    let sig = SignatureSpec::new(sizes.len() - 1, 2, sizes.len() - 1, 0).unwrap();
    Arc::new(FreqLattice::new(sig, sizes).unwrap())
}

#[test]
fn truncated_and_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.uhf");
    let f = FieldData::Spectral(random_field(&lattice(&[7, 5]), 2.0, &mut ChaCha8Rng::seed_from_u64(1)));
    write_field(&path, &f).unwrap();
    assert_eq!(read_field(&path).unwrap(), f);

    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    let e = read_field(&path).unwrap_err();
    assert!(matches!(e, FieldIoError::PayloadLength { .. }));
    assert!(e.to_string().starts_with("payload length mismatch"));

    let mut other = bytes.clone();
    other[..4].copy_from_slice(b"UHF2");
    fs::write(&path, &other).unwrap();
    assert!(read_field(&path).unwrap_err().to_string().starts_with("unsupported format"));

    assert!(matches!(read_field(&dir.path().join("missing.uhf")), Err(FieldIoError::Io { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn write_then_read_is_bitwise(seed in any::<u64>(), nx in 1usize..5, ny in 1usize..5, grid in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.uhf");
        let s = random_field(&lattice(&[2 * nx + 1, 2 * ny + 1]), 3.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let f = if grid { FieldData::Grid(s.to_grid()) } else { FieldData::Spectral(s) };
        write_field(&path, &f).unwrap();
        let back = read_field(&path).unwrap();
        let bits = |v: &FieldData| v.values().iter().map(|c| (c.re.to_bits(), c.im.to_bits())).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&f));
        prop_assert_eq!(back.real_symmetric(), f.real_symmetric());
    }
}
