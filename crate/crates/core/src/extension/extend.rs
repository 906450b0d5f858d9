//! Extension operators and trace verification.
//!
//! `u₀ = E(w₀) + Σ_c sin(c)·E(w_c)` over complement coordinates `c` of `M`,
//! `u₁ = E(w_{y₁})`. The periodic factor `sin(c)` stands in for the
//! coordinate `c`; it shifts frequencies by one unit, which is why factored
//! components use a kernel with a support margin.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::{make_kernel, restrict, Kernel, KernelSpec, KernelVariant};
use super::norms::{has_mean, pi_split};
use crate::error::{Error, Result};
use crate::lattice::{FreqLattice, SignatureSpec, SpectralField, Surface};
use crate::propagator::CauchyData;
use crate::random::random_field_where;

/// Margin needed by components multiplied by a coordinate factor.
pub const FACTOR_MARGIN: u32 = 2;

/// Which trace a component prescribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraceLabel {
    /// `u₀|_M`.
    Value,
    /// `∂_{y₁}u|_M`.
    Normal,
    /// `∂_c u₀|_M` for the complement axis `c` (an `N` axis index).
    Complement(usize),
}

impl TraceLabel {
    /// `w0`, `y1`, or the coordinate name of the complement axis.
    pub fn name(self, sig: SignatureSpec) -> String {
        match self {
            TraceLabel::Value => "w0".into(),
            TraceLabel::Normal => "y1".into(),
            TraceLabel::Complement(a) if a < sig.d1 => format!("x{}", a + 1),
            TraceLabel::Complement(a) => format!("y{}", a - sig.d1 + 2),
        }
    }

    pub fn parse(s: &str, sig: SignatureSpec) -> Result<Self> {
        let bad = || Error::BadLabel(s.to_string());
        let label = match s {
            "w0" => TraceLabel::Value,
            "y1" => TraceLabel::Normal,
            _ => {
                let (head, num) = s.split_at(1.min(s.len()));
                let i: usize = num.parse().map_err(|_| bad())?;
                let axis = match head {
                    "x" if i >= 1 => i - 1,
                    "y" if i >= 2 => sig.d1 + i - 2,
                    _ => return Err(bad()),
                };
                TraceLabel::Complement(axis)
            }
        };
        label.validate(sig).map_err(|_| bad())?;
        Ok(label)
    }

    fn validate(self, sig: SignatureSpec) -> Result<()> {
        match self {
            TraceLabel::Complement(a) if !sig.complement_axes().contains(&a) => {
                Err(Error::NotComplementAxis(a))
            }
            _ => Ok(()),
        }
    }

    fn factored(self) -> bool {
        matches!(self, TraceLabel::Complement(_))
    }

    /// All labels for a signature: value, normal, then complement axes.
    pub fn all(sig: SignatureSpec) -> Vec<TraceLabel> {
        let mut v = vec![TraceLabel::Value, TraceLabel::Normal];
        v.extend(sig.complement_axes().into_iter().map(TraceLabel::Complement));
        v
    }
}

/// Zero-mean trace components on the `M` lattice; absent labels are zero.
#[derive(Debug, Clone)]
pub struct TraceData {
    lattice: Arc<FreqLattice>,
    components: BTreeMap<TraceLabel, SpectralField>,
}

impl TraceData {
    pub fn new(lattice: Arc<FreqLattice>) -> Result<Self> {
        if lattice.surface() != Surface::M {
            return Err(Error::Geometry("trace data lives on the M lattice".into()));
        }
        Ok(Self {
            lattice,
            components: BTreeMap::new(),
        })
    }

    pub fn with(mut self, label: TraceLabel, field: SpectralField) -> Result<Self> {
        self.insert(label, field)?;
        Ok(self)
    }

    pub fn insert(&mut self, label: TraceLabel, field: SpectralField) -> Result<()> {
        let sig = self.lattice.signature();
        label.validate(sig)?;
        if **field.lattice() != *self.lattice {
            return Err(Error::LatticeMismatch);
        }
        if has_mean(&field) {
            return Err(Error::NonzeroMean {
                label: label.name(sig),
            });
        }
        self.components.insert(label, field);
        Ok(())
    }

    pub fn signature(&self) -> SignatureSpec {
        self.lattice.signature()
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        &self.lattice
    }

    pub fn get(&self, label: TraceLabel) -> Option<&SpectralField> {
        self.components.get(&label)
    }

    /// The component, or zero if absent.
    pub fn component(&self, label: TraceLabel) -> SpectralField {
        self.components
            .get(&label)
            .cloned()
            .unwrap_or_else(|| SpectralField::zeros(Arc::clone(&self.lattice)))
    }

    pub fn components(&self) -> impl Iterator<Item = (TraceLabel, &SpectralField)> {
        self.components.iter().map(|(l, f)| (*l, f))
    }
}

#[derive(Debug, Clone)]
struct KernelPair {
    plain: Kernel,
    factored: Kernel,
}

/// Prepared kernels for one extension operator on a fixed `N` lattice.
#[derive(Debug, Clone)]
pub struct Extender {
    lattice: Arc<FreqLattice>,
    m_lattice: Arc<FreqLattice>,
    kernels: Vec<KernelPair>,
    margin: u32,
}

impl Extender {
    /// Kernels with margin zero serve unfactored components; the specs'
    /// margins serve factored ones.
    pub fn new(specs: &[KernelSpec], lattice: &Arc<FreqLattice>) -> Result<Self> {
        let mut kernels = Vec::with_capacity(specs.len());
        for spec in specs {
            let plain = make_kernel(&spec.with_margin(0), lattice)?;
            let factored = if spec.margin == 0 {
                plain.clone()
            } else {
                make_kernel(spec, lattice)?
            };
            kernels.push(KernelPair { plain, factored });
        }
        let m_lattice = match kernels.first() {
            Some(k) => Arc::clone(k.plain.m_lattice()),
            None => Arc::new(lattice.restriction_lattice()?),
        };
        Ok(Self {
            lattice: Arc::clone(lattice),
            m_lattice,
            margin: specs.iter().map(|s| s.margin).min().unwrap_or(0),
            kernels,
        })
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        &self.lattice
    }

    pub fn m_lattice(&self) -> &Arc<FreqLattice> {
        &self.m_lattice
    }

    /// Whether data for `label` may be nonzero at base `m_flat`.
    pub fn supports(&self, label: TraceLabel, m_flat: usize) -> bool {
        self.kernels.iter().any(|k| {
            let k = if label.factored() { &k.factored } else { &k.plain };
            k.supports(m_flat)
        })
    }

    fn lift(&self, w: &SpectralField, label: TraceLabel, factored: bool) -> Result<SpectralField> {
        let name = label.name(self.lattice.signature());
        let mut out = SpectralField::zeros(Arc::clone(&self.lattice));
        for k in &self.kernels {
            let k = if factored { &k.factored } else { &k.plain };
            out = out.add(&k.apply(w, &name, false)?)?;
        }
        // the zero mode and regions no kernel covers carry no data by contract
        for (mf, c) in w.coeffs().iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) && !self.kernels.iter().any(|k| k.plain.covers(mf)) {
                return Err(Error::EmptyFiber {
                    label: name,
                    base: self.m_lattice.mode(mf).bins_i64(),
                });
            }
        }
        Ok(out.with_symmetry_flag(w.is_real_symmetric()))
    }

    pub fn extend(&self, w: &TraceData) -> Result<CauchyData> {
        if **w.lattice() != *self.m_lattice {
            return Err(Error::LatticeMismatch);
        }
        let mut u0 = SpectralField::zeros(Arc::clone(&self.lattice)).with_symmetry_flag(true);
        let mut u1 = u0.clone();
        for (label, field) in w.components() {
            match label {
                TraceLabel::Value => u0 = u0.add(&self.lift(field, label, false)?)?,
                TraceLabel::Normal => u1 = u1.add(&self.lift(field, label, false)?)?,
                TraceLabel::Complement(axis) => {
                    if self.margin < FACTOR_MARGIN {
                        return Err(Error::MarginTooSmall {
                            margin: self.margin,
                            required: FACTOR_MARGIN,
                        });
                    }
                    let lifted = self.lift(field, label, true)?;
                    let shifted = lifted.times_sin(axis).ok_or_else(|| {
                        Error::Geometry("coordinate factor shifts data off the lattice".into())
                    })?;
                    u0 = u0.add(&shifted)?;
                }
            }
        }
        CauchyData::new(u0, u1)
    }

    /// Random zero-mean trace data on every label, restricted to bases with
    /// `|k| ≤ bandwidth` that the kernels support.
    pub fn random_trace_data<R: Rng + ?Sized>(&self, bandwidth: f64, rng: &mut R) -> TraceData {
        let m = &self.m_lattice;
        let mut data = TraceData::new(Arc::clone(m)).expect("M lattice");
        for label in TraceLabel::all(m.signature()) {
            let keep = |f: usize| {
                m.mode(f).norm_sq() <= bandwidth * bandwidth && self.supports(label, f)
            };
            let field = random_field_where(m, rng, keep);
            data.insert(label, field).expect("zero mean by construction");
        }
        data
    }
}

fn check_variant(spec: &KernelSpec, variant: KernelVariant) -> Result<()> {
    if spec.variant != variant {
        return Err(Error::Geometry(format!(
            "kernel variant {} where {} is required",
            spec.variant.name(),
            variant.name()
        )));
    }
    Ok(())
}

/// `M` is the `x₁` line in `(x₁, y₂)`.
pub fn extend_codim2(w: &TraceData, spec: &KernelSpec, lattice: &Arc<FreqLattice>) -> Result<CauchyData> {
    check_variant(spec, KernelVariant::Codim2)?;
    Extender::new(std::slice::from_ref(spec), lattice)?.extend(w)
}

/// `M = {y = 0}`.
pub fn extend_spacelike(w: &TraceData, spec: &KernelSpec, lattice: &Arc<FreqLattice>) -> Result<CauchyData> {
    check_variant(spec, KernelVariant::Spacelike)?;
    Extender::new(std::slice::from_ref(spec), lattice)?.extend(w)
}

/// Kernels for a mixed-signature `M`. Without a spacelike complement only
/// the first kernel is used and growing bases must carry no data.
pub fn mixed_extender(spec1: &KernelSpec, spec2: &KernelSpec, lattice: &Arc<FreqLattice>) -> Result<Extender> {
    check_variant(spec1, KernelVariant::MixedChi1)?;
    check_variant(spec2, KernelVariant::MixedChi2)?;
    let sig = lattice.signature();
    if sig.d1 == sig.p1 {
        Extender::new(std::slice::from_ref(spec1), lattice)
    } else {
        Extender::new(&[spec1.clone(), spec2.clone()], lattice)
    }
}

pub fn extend_mixed(
    w: &TraceData,
    spec1: &KernelSpec,
    spec2: &KernelSpec,
    lattice: &Arc<FreqLattice>,
) -> Result<CauchyData> {
    let sig = lattice.signature();
    if sig.d1 == sig.p1 && w.components().any(|(_, f)| pi_split(f).1.max_abs() != 0.0) {
        return Err(Error::PurelyTimelikeComplement);
    }
    mixed_extender(spec1, spec2, lattice)?.extend(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// `(label, max-norm error on M)` for the value, the normal derivative and
    /// every complement derivative.
    pub errors: Vec<(String, f64)>,
    pub max_error: f64,
    /// Number of `N` modes with `|ξ| < |η'|` and nonzero amplitude.
    pub r2_modes: usize,
}

/// Restricts `u₀`, `∂_{y₁}u` and `∂_c u₀` to `M` and compares with `w`.
pub fn trace_check(w: &TraceData, u: &CauchyData) -> Result<TraceReport> {
    let n = u.lattice();
    let m = w.lattice();
    let base = super::kernel::base_indices(n, m);
    let sig = w.signature();
    let mut errors = Vec::new();
    for label in TraceLabel::all(sig) {
        let field = match label {
            TraceLabel::Value => u.u0.clone(),
            TraceLabel::Normal => u.u1.clone(),
            TraceLabel::Complement(a) => u.u0.derivative(a),
        };
        let diff = restrict(&field, m, &base).sub(&w.component(label))?;
        errors.push((label.name(sig), diff.to_grid().max_abs()));
    }
    let max_error = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(TraceReport {
        errors,
        max_error,
        r2_modes: u.r2_support().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::profile::BumpProfile;
    use crate::lattice::GridField;
    use crate::propagator::propagate;
    use crate::random::BandLimited;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(variant: KernelVariant) -> KernelSpec {
        KernelSpec::new(variant, BumpProfile::default(), 2)
    }

    fn lattices(sig: SignatureSpec, n: usize) -> (Arc<FreqLattice>, Arc<FreqLattice>) {
        let nl = Arc::new(FreqLattice::new(sig, &vec![n; sig.n_dim()]).unwrap());
        let ml = Arc::new(nl.restriction_lattice().unwrap());
        (nl, ml)
    }

    fn on_m(m: &Arc<FreqLattice>, f: impl Fn(&[f64]) -> f64) -> SpectralField {
        let s = GridField::from_real_fn(Arc::clone(m), f).to_spectral();
        // drop FFT round-off so the mean is exactly zero
        let c = s.coeffs().iter().map(|c| if c.norm() < 1e-13 { Complex64::new(0.0, 0.0) } else { *c }).collect();
        SpectralField::new(Arc::clone(m), c).unwrap().assert_real_symmetric(1e-13).unwrap()
    }

    #[test]
    fn label_names_round_trip() {
        let sig = SignatureSpec::new(2, 3, 1, 1).unwrap();
        let names: Vec<String> = TraceLabel::all(sig).iter().map(|l| l.name(sig)).collect();
        assert_eq!(names, ["w0", "y1", "x2", "y3"]);
        for n in &names {
            assert_eq!(TraceLabel::parse(n, sig).unwrap().name(sig), *n);
        }
        assert!(TraceLabel::parse("x1", sig).is_err());
        assert!(TraceLabel::parse("z", sig).is_err());
    }

    #[test]
    fn codim2_trace_examples() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let (n, m) = lattices(sig, 33);
        let sp = spec(KernelVariant::Codim2);
        let y2 = TraceLabel::Complement(1);

        let w = TraceData::new(Arc::clone(&m)).unwrap().with(TraceLabel::Value, on_m(&m, |x| x[0].cos())).unwrap();
        let u = extend_codim2(&w, &sp, &n).unwrap();
        let r = trace_check(&w, &u).unwrap();
        assert!(r.max_error <= 1e-12, "{r:?}");
        assert_eq!(r.r2_modes, 0);

        let w = TraceData::new(Arc::clone(&m)).unwrap().with(TraceLabel::Normal, on_m(&m, |x| (3.0 * x[0]).sin())).unwrap();
        let r = trace_check(&w, &extend_codim2(&w, &sp, &n).unwrap()).unwrap();
        assert!(r.max_error <= 1e-12, "{r:?}");

        let w = TraceData::new(Arc::clone(&m)).unwrap().with(y2, on_m(&m, |x| (5.0 * x[0]).cos())).unwrap();
        let u = extend_codim2(&w, &sp, &n).unwrap();
        let r = trace_check(&w, &u).unwrap();
        assert!(r.max_error <= 1e-12, "{r:?}");
        assert_eq!(r.r2_modes, 0);
    }

    #[test]
    fn rejects_mean_and_small_margin() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let (n, m) = lattices(sig, 17);
        let w = on_m(&m, |x| 1.0 + x[0].cos());
        assert!(matches!(
            TraceData::new(Arc::clone(&m)).unwrap().with(TraceLabel::Value, w),
            Err(Error::NonzeroMean { .. })
        ));
        let w = TraceData::new(Arc::clone(&m))
            .unwrap()
            .with(TraceLabel::Complement(1), on_m(&m, |x| (5.0 * x[0]).cos()))
            .unwrap();
        let sp = spec(KernelVariant::Codim2).with_margin(1);
        assert_eq!(
            extend_codim2(&w, &sp, &n).unwrap_err(),
            Error::MarginTooSmall { margin: 1, required: 2 }
        );
        // base |ξ| = 1 has an empty fiber once the margin is applied
        let w = TraceData::new(Arc::clone(&m))
            .unwrap()
            .with(TraceLabel::Complement(1), on_m(&m, |x| x[0].cos()))
            .unwrap();
        assert!(matches!(
            extend_codim2(&w, &spec(KernelVariant::Codim2), &n),
            Err(Error::EmptyFiber { .. })
        ));
    }

    #[test]
    fn spacelike_traces_and_zero() {
        let sig = SignatureSpec::new(2, 2, 2, 0).unwrap();
        let (n, m) = lattices(sig, 17);
        let sp = spec(KernelVariant::Spacelike);
        let w = TraceData::new(Arc::clone(&m))
            .unwrap()
            .with(TraceLabel::Value, on_m(&m, |x| x[0].cos() * x[1].cos()))
            .unwrap();
        let u = extend_spacelike(&w, &sp, &n).unwrap();
        let r = trace_check(&w, &u).unwrap();
        assert!(r.max_error <= 1e-12);
        assert_eq!(r.r2_modes, 0);
        let zero = extend_spacelike(&TraceData::new(m).unwrap(), &sp, &n).unwrap();
        assert!(zero.is_center() && zero.max_abs() == 0.0);
    }

    #[test]
    fn mixed_examples() {
        let sig = SignatureSpec::new(2, 2, 1, 1).unwrap();
        let (n, m) = lattices(sig, 17);
        let (s1, s2) = (spec(KernelVariant::MixedChi1), spec(KernelVariant::MixedChi2));
        for f in [
            (|x: &[f64]| x[0].cos() * x[1].cos()) as fn(&[f64]) -> f64,
            |x: &[f64]| (2.0 * x[0]).cos() * x[1].cos(),
            |x: &[f64]| x[0].cos() * (3.0 * x[1]).cos(),
        ] {
            let w = TraceData::new(Arc::clone(&m)).unwrap().with(TraceLabel::Value, on_m(&m, f)).unwrap();
            let u = extend_mixed(&w, &s1, &s2, &n).unwrap();
            let r = trace_check(&w, &u).unwrap();
            assert!(r.max_error <= 1e-12, "{r:?}");
            assert_eq!(r.r2_modes, 0);
        }

        let sig = SignatureSpec::new(1, 3, 1, 1).unwrap();
        let (n, m) = lattices(sig, 9);
        let w = TraceData::new(Arc::clone(&m))
            .unwrap()
            .with(TraceLabel::Value, on_m(&m, |x| x[0].cos() * (2.0 * x[1]).cos()))
            .unwrap();
        assert_eq!(extend_mixed(&w, &s1, &s2, &n).unwrap_err(), Error::PurelyTimelikeComplement);
    }

    #[test]
    fn random_inputs_extend_exactly_and_propagate_back() {
        let sig = SignatureSpec::new(2, 3, 1, 1).unwrap();
        let (n, _) = lattices(sig, 9);
        let ext = mixed_extender(&spec(KernelVariant::MixedChi1), &spec(KernelVariant::MixedChi2), &n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let w = ext.random_trace_data(3.0, &mut rng);
            assert!(w.get(TraceLabel::Value).unwrap().max_abs() > 0.0);
            let u = ext.extend(&w).unwrap();
            let r = trace_check(&w, &u).unwrap();
            assert!(r.max_error <= 1e-12, "{r:?}");
            assert!(u.is_center());
            let back = propagate(&propagate(&u, 3.7).unwrap(), -3.7).unwrap();
            assert!(back.sub(&u).unwrap().max_abs() <= 1e-10 * u.max_abs());
        }
    }

    #[test]
    fn different_profiles_same_traces() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let (n, m) = lattices(sig, 33);
        let w = BandLimited::new().cos(vec![6], 1.0).to_spectral(&m).unwrap();
        let w = TraceData::new(Arc::clone(&m)).unwrap().with(TraceLabel::Value, w).unwrap();
        let a = extend_codim2(&w, &spec(KernelVariant::Codim2), &n).unwrap();
        let narrow = KernelSpec::new(KernelVariant::Codim2, BumpProfile::mollifier(0.5).unwrap(), 2);
        let b = extend_codim2(&w, &narrow, &n).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() > 1e-3);
        assert!(trace_check(&w, &a).unwrap().max_error <= 1e-12);
        assert!(trace_check(&w, &b).unwrap().max_error <= 1e-12);
    }
}
