//! Hyperboloid families sweeping the region between an ellipsoid
//! `Z_ε ⊂ M` and a cone over it, and their characteristic form.
//!
//! With `w = Rᵀe₁ = (cos θ, sin θ, 0, …)` and `z = R(y − w) + e₁`,
//! `S_λ(w) = {|x|² + ⟨z−e₁, Q(z−e₁)⟩ = λ}` where `Q = diag(Q₂, ε⁻² I'')`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SignatureSpec;

/// Agreement tolerance for matrix identities, relative to the entry scale.
pub const MATRIX_TOL: f64 = 1e-12;
/// Agreement tolerance for the two characteristic-form computations.
pub const FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeGeometry {
    pub epsilon: f64,
    pub theta: f64,
    /// Family parameter, `−1 ≤ λ ≤ 0`.
    pub lambda: f64,
}

impl ConeGeometry {
    pub fn new(epsilon: f64, theta: f64, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Geometry(format!("epsilon {epsilon} not in (0, 1]")));
        }
        if !(theta.abs() < FRAC_PI_2) {
            return Err(Error::Geometry(format!("theta {theta} not in (-pi/2, pi/2)")));
        }
        if !(-1.0..=0.0).contains(&lambda) {
            return Err(Error::Geometry(format!("lambda {lambda} not in [-1, 0]")));
        }
        Ok(Self {
            epsilon,
            theta,
            lambda,
        })
    }

    pub fn tan(&self) -> f64 {
        self.theta.tan()
    }

    /// `a = 1 + (1 − ε²) tan²θ`.
    pub fn a(&self) -> f64 {
        1.0 + (1.0 - self.epsilon * self.epsilon) * self.tan().powi(2)
    }

    /// Cone vertex direction `w` in `ℝ^{d2}`.
    pub fn vertex(&self, d2: usize) -> Vec<f64> {
        let mut w = vec![0.0; d2];
        w[0] = self.theta.cos();
        w[1] = self.theta.sin();
        w
    }

    fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }
}

/// Real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut c = [[0.0; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(c)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(o.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    pub fn sym_eigenvalues(&self) -> [f64; 2] {
        let m = self.0;
        let mean = 0.5 * (m[0][0] + m[1][1]);
        let r = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[1][0]).sqrt();
        [mean - r, mean + r]
    }
}

/// `R₂ = [[cos θ, sin θ], [−sin θ, cos θ]]`.
pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2([[c, s], [-s, c]])
}

/// `Q₂ = [[−1, tan θ], [tan θ, a/ε²]]`.
pub fn q2_matrix(g: &ConeGeometry) -> Mat2 {
    let t = g.tan();
    Mat2([[-1.0, t], [t, g.a() / g.epsilon.powi(2)]])
}

/// Signature `(−, +)`: one eigenvalue of each sign.
pub fn has_lorentz_signature(m: &Mat2) -> bool {
    let [lo, hi] = m.sym_eigenvalues();
    lo < 0.0 && hi > 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharFormMatrix {
    /// Closed form as printed: `[[t², (a/ε²)t], [(a/ε²)t, a²/ε⁴ + t²]]`.
    pub printed: Mat2,
    /// `Q₂² + Q₂` multiplied out.
    pub explicit: Mat2,
    /// Coefficient of `I''` in `Q² + Q`, `(1 + ε²)/ε⁴`.
    pub block_scalar: f64,
    pub tan4: f64,
    pub printed_det: f64,
    pub explicit_det: f64,
    /// Entry scale used for the relative tolerances.
    pub scale: f64,
    /// Printed and explicit forms agree.
    pub forms_agree: bool,
    pub printed_det_ok: bool,
    pub explicit_det_ok: bool,
    /// Explicit matrix is positive semidefinite.
    pub explicit_psd: bool,
}

pub fn char_form_matrix(g: &ConeGeometry) -> CharFormMatrix {
    let t = g.tan();
    let e2 = g.epsilon.powi(2);
    let a = g.a();
    let printed = Mat2([
        [t * t, a / e2 * t],
        [a / e2 * t, a * a / (e2 * e2) + t * t],
    ]);
    let q = q2_matrix(g);
    let explicit = q.mul(&q).add(&q);
    let tan4 = t.powi(4);
    let scale = explicit.max_abs().max(printed.max_abs()).max(1.0);
    // determinants cancel terms of size scale², so compare at that scale
    let det_tol = MATRIX_TOL * scale * scale;
    let [lo, _] = explicit.sym_eigenvalues();
    CharFormMatrix {
        printed,
        explicit,
        block_scalar: (1.0 + e2) / (e2 * e2),
        tan4,
        printed_det: printed.det(),
        explicit_det: explicit.det(),
        scale,
        forms_agree: printed.max_abs_diff(&explicit) <= MATRIX_TOL * scale,
        printed_det_ok: (printed.det() - tan4).abs() <= det_tol,
        explicit_det_ok: (explicit.det() - tan4).abs() <= det_tol,
        explicit_psd: lo >= -MATRIX_TOL * scale,
    }
}

/// `B₂` entries as printed.
pub fn b2_printed(g: &ConeGeometry) -> Mat2 {
    let (s, c) = g.theta.sin_cos();
    let e = g.epsilon;
    let b11 = -(e * e - s * s) / (e * c * c);
    let b12 = -g.tan() / (e * e);
    Mat2([[b11, b12], [b12, 1.0 / (e * e)]])
}

/// `B₂ = R₂ᵀ Q₂ R₂`.
pub fn b2_first_principles(g: &ConeGeometry) -> Mat2 {
    let r = rotation(g.theta);
    r.transpose().mul(&q2_matrix(g)).mul(&r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B2Report {
    pub first_principles: Mat2,
    pub printed: Mat2,
    /// Entrywise `|printed − first_principles|`.
    pub discrepancy: Mat2,
}

pub fn b2_matrix(g: &ConeGeometry) -> B2Report {
    let fp = b2_first_principles(g);
    let pr = b2_printed(g);
    let mut d = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            d[i][j] = (pr.0[i][j] - fp.0[i][j]).abs();
        }
    }
    B2Report {
        first_principles: fp,
        printed: pr,
        discrepancy: Mat2(d),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B2Row {
    pub epsilon: f64,
    pub theta: f64,
    pub printed_b11: f64,
    pub first_principles_b11: f64,
    pub abs_diff: f64,
}

pub fn b2_discrepancy_table(epsilons: &[f64], thetas: &[f64]) -> Result<Vec<B2Row>> {
    let mut rows = Vec::new();
    for &epsilon in epsilons {
        for &theta in thetas {
            let r = b2_matrix(&ConeGeometry::new(epsilon, theta, 0.0)?);
            rows.push(B2Row {
                epsilon,
                theta,
                printed_b11: r.printed.0[0][0],
                first_principles_b11: r.first_principles.0[0][0],
                abs_diff: r.discrepancy.0[0][0],
            });
        }
    }
    Ok(rows)
}

fn check_point(x: &[f64], y: &[f64], sig: SignatureSpec) -> Result<()> {
    if sig.d2 < 2 {
        return Err(Error::Geometry("the hyperboloid family needs d2 >= 2".into()));
    }
    if x.len() != sig.d1 {
        return Err(Error::Dimension {
            expected: sig.d1,
            got: x.len(),
        });
    }
    if y.len() != sig.d2 {
        return Err(Error::Dimension {
            expected: sig.d2,
            got: y.len(),
        });
    }
    Ok(())
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// `B(y − w)` with the given upper-left block.
fn b_apply(g: &ConeGeometry, b2: &Mat2, y: &[f64]) -> Vec<f64> {
    let w = g.vertex(y.len());
    let d: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a - b).collect();
    let head = b2.apply([d[0], d[1]]);
    let e2 = g.epsilon.powi(2);
    let mut out = vec![head[0], head[1]];
    out.extend(d[2..].iter().map(|v| v / e2));
    out
}

/// `|x|² + ⟨y−w, B(y−w)⟩ − λ` with an explicit upper-left block `B₂`.
pub fn surface_value_with(
    x: &[f64],
    y: &[f64],
    g: &ConeGeometry,
    b2: &Mat2,
    sig: SignatureSpec,
) -> Result<f64> {
    check_point(x, y, sig)?;
    let w = g.vertex(y.len());
    let by = b_apply(g, b2, y);
    let quad: f64 = y.iter().zip(&w).zip(&by).map(|((a, b), c)| (a - b) * c).sum();
    Ok(sq(x) + quad - g.lambda)
}

/// Zero iff `(x, y)` lies on `S_λ(w)`, using `B₂ = R₂ᵀQ₂R₂`.
pub fn surface_value(x: &[f64], y: &[f64], g: &ConeGeometry, sig: SignatureSpec) -> Result<f64> {
    surface_value_with(x, y, g, &b2_first_principles(g), sig)
}

/// Reflection of the `y'` coordinates taking a unit vertex `w` with `w₁ > 0`
/// into the `(y₁, y₂)` plane; returns `θ` and the reflected point map.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFrame {
    pub theta: f64,
    // Householder vector on y', or None when w' already lies along y₂.
    v: Option<Vec<f64>>,
}

impl VertexFrame {
    pub fn new(w: &[f64]) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Geometry("vertex needs d2 >= 2".into()));
        }
        let norm = sq(w).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Geometry(format!("vertex |w| = {norm} is not 1")));
        }
        if w[0] <= 0.0 {
            return Err(Error::Geometry("vertex needs w1 > 0".into()));
        }
        let wp = &w[1..];
        let r = sq(wp).sqrt();
        let theta = r.atan2(w[0]);
        let mut v: Vec<f64> = wp.to_vec();
        v[0] -= r;
        let vn = sq(&v);
        let v = if vn <= 1e-30 { None } else { Some(v.iter().map(|a| a / vn.sqrt()).collect()) };
        Ok(Self { theta, v })
    }

    /// Image of `y` under the reflection (`y₁` fixed).
    pub fn map(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        if let Some(v) = &self.v {
            let dot: f64 = v.iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
            for (o, a) in out[1..].iter_mut().zip(v) {
                *o -= 2.0 * dot * a;
            }
        }
        out
    }
}

/// `surface_value` for an arbitrary unit vertex `w` with `w₁ > 0`.
pub fn surface_value_general(
    x: &[f64],
    y: &[f64],
    epsilon: f64,
    w: &[f64],
    lambda: f64,
    sig: SignatureSpec,
) -> Result<f64> {
    let frame = VertexFrame::new(w)?;
    let g = ConeGeometry::new(epsilon, frame.theta, lambda)?;
    surface_value(x, &frame.map(y), &g, sig)
}

/// `¼ Nᵀ diag(−I, I) N` with `N = −2(x, B(y−w))`.
pub fn char_form_direct(x: &[f64], y: &[f64], g: &ConeGeometry, sig: SignatureSpec) -> Result<f64> {
    check_point(x, y, sig)?;
    let nx: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
    let ny: Vec<f64> = b_apply(g, &b2_first_principles(g), y).iter().map(|v| -2.0 * v).collect();
    Ok(0.25 * (sq(&ny) - sq(&nx)))
}

/// `z − e₁ = R(y − w)`.
pub fn z_offset(y: &[f64], g: &ConeGeometry) -> Vec<f64> {
    let w = g.vertex(y.len());
    let head = rotation(g.theta).apply([y[0] - w[0], y[1] - w[1]]);
    let mut out = vec![head[0], head[1]];
    out.extend(y[2..].iter().zip(&w[2..]).map(|(a, b)| a - b));
    out
}

/// `⟨z−e₁, (Q²+Q)(z−e₁)⟩ − λ` with `Q₂² + Q₂` multiplied out.
pub fn char_form_reduced(y: &[f64], g: &ConeGeometry) -> f64 {
    let z = z_offset(y, g);
    let m = char_form_matrix(g);
    let head = m.explicit.apply([z[0], z[1]]);
    z[0] * head[0] + z[1] * head[1] + m.block_scalar * sq(&z[2..]) - g.lambda
}

/// Point on `S_λ(w)` from free coordinates `x`, `v = (z−e₁)₂`, `z''`; the
/// remaining coordinate solves `u² − 2uv tanθ − (C − λ) = 0`, root chosen
/// by `upper`. Always real for `λ ≤ 0`.
pub fn point_on_surface(
    g: &ConeGeometry,
    x: &[f64],
    v: f64,
    zpp: &[f64],
    upper: bool,
) -> (Vec<f64>, Vec<f64>) {
    let t = g.tan();
    let e2 = g.epsilon.powi(2);
    let c = sq(x) + g.a() / e2 * v * v + sq(zpp) / e2;
    let disc = (t * t * v * v + c - g.lambda).sqrt();
    let u = if upper { t * v + disc } else { t * v - disc };
    // y − w = R₂ᵀ (u, v), y'' − w'' = z''
    let back = rotation(g.theta).transpose().apply([u, v]);
    let w = g.vertex(2 + zpp.len());
    let mut y = vec![w[0] + back[0], w[1] + back[1]];
    y.extend_from_slice(zpp);
    (x.to_vec(), y)
}

/// Boundary point of `Z_ε` (`y₁ = 0`, `|x|² + |y'|²/ε² = 1`) from a
/// Gaussian direction.
pub fn z_eps_boundary_sample<R: Rng + ?Sized>(
    epsilon: f64,
    sig: SignatureSpec,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let n = sig.d1 + sig.d2 - 1;
    let dir: Vec<f64> = loop {
        let d: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        if sq(&d) > 1e-12 {
            break d;
        }
    };
    let r = sq(&dir).sqrt();
    let x = dir[..sig.d1].iter().map(|v| v / r).collect();
    let mut y = vec![0.0];
    y.extend(dir[sig.d1..].iter().map(|v| epsilon * v / r));
    (x, y)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub samples_per_cell: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            epsilons: vec![0.25, 0.5, 1.0],
            thetas: vec![0.0, pi / 6.0, -pi / 6.0, pi / 3.0, -pi / 3.0],
            lambdas: vec![-1.0, -0.5, -0.1, -1e-3],
            samples_per_cell: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub epsilon: f64,
    pub theta: f64,
    pub lambda: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub direct: f64,
    pub reduced: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub cells: usize,
    pub samples: usize,
    /// Largest `|direct − reduced| / max(1, |direct|)`.
    pub max_disagreement: f64,
    /// Largest `|surface_value|` at generated samples.
    pub max_surface_residual: f64,
    pub min_form: f64,
    /// `min |λ| / 4` over the sweep.
    pub bound: f64,
    /// Smallest `form / |λ|`.
    pub min_form_over_lambda: f64,
    /// First offending samples (at most 20).
    pub failures: Vec<SweepFailure>,
    pub failure_count: usize,
    pub passed: bool,
}

/// Samples each `(ε, θ, λ)` cell on `S_λ(w)` and evaluates the
/// characteristic form both ways.
pub fn noncharacteristic_sweep<R: Rng + ?Sized>(
    cfg: &SweepConfig,
    sig: SignatureSpec,
    rng: &mut R,
) -> Result<SweepReport> {
    if sig.d2 < 2 {
        return Err(Error::Geometry("the hyperboloid family needs d2 >= 2".into()));
    }
    let mut rep = SweepReport {
        cells: 0,
        samples: 0,
        max_disagreement: 0.0,
        max_surface_residual: 0.0,
        min_form: f64::INFINITY,
        bound: f64::INFINITY,
        min_form_over_lambda: f64::INFINITY,
        failures: Vec::new(),
        failure_count: 0,
        passed: true,
    };
    for &epsilon in &cfg.epsilons {
        for &theta in &cfg.thetas {
            for &lambda in &cfg.lambdas {
                if lambda >= 0.0 {
                    return Err(Error::Geometry("sweep needs lambda < 0".into()));
                }
                let g = ConeGeometry::new(epsilon, theta, lambda)?;
                rep.cells += 1;
                rep.bound = rep.bound.min(lambda.abs() / 4.0);
                for i in 0..cfg.samples_per_cell {
                    let x: Vec<f64> = (0..sig.d1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let v = rng.gen_range(-1.0..1.0);
                    let zpp: Vec<f64> = (2..sig.d2).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let (x, y) = point_on_surface(&g, &x, v, &zpp, i % 2 == 0);
                    let on = surface_value(&x, &y, &g, sig)?;
                    let direct = char_form_direct(&x, &y, &g, sig)?;
                    let reduced = char_form_reduced(&y, &g);
                    let scale = direct.abs().max(1.0);
                    let dis = (direct - reduced).abs() / scale;
                    rep.samples += 1;
                    rep.max_disagreement = rep.max_disagreement.max(dis);
                    rep.max_surface_residual = rep.max_surface_residual.max(on.abs() / scale);
                    rep.min_form = rep.min_form.min(direct);
                    rep.min_form_over_lambda = rep.min_form_over_lambda.min(direct / lambda.abs());
                    let ok = dis <= FORM_TOL && direct >= lambda.abs() * (1.0 - FORM_TOL);
                    if !ok {
                        rep.failure_count += 1;
                        if rep.failures.len() < 20 {
                            rep.failures.push(SweepFailure {
                                epsilon,
                                theta,
                                lambda,
                                x,
                                y,
                                direct,
                                reduced,
                            });
                        }
                    }
                }
            }
        }
    }
    rep.passed = rep.failure_count == 0 && rep.min_form >= rep.bound - FORM_TOL;
    Ok(rep)
}

/// Determinants of `Q₂²+Q₂` over an `(ε, θ)` grid: `(max relative error of
/// the printed form, of the explicit product)` against `tan⁴θ`, plus
/// whether `Q₂` had signature `(−,+)` everywhere.
pub fn det_grid(n_eps: usize, n_theta: usize, theta_max: f64) -> Result<DetGridReport> {
    let mut rep = DetGridReport {
        points: 0,
        printed_max_err: 0.0,
        explicit_max_err: 0.0,
        forms_max_diff: 0.0,
        signature_ok: true,
        explicit_psd: true,
    };
    for i in 0..n_eps {
        let epsilon = (i + 1) as f64 / n_eps as f64;
        for j in 0..n_theta {
            let theta = -theta_max + 2.0 * theta_max * j as f64 / (n_theta - 1).max(1) as f64;
            let g = ConeGeometry::new(epsilon, theta, 0.0)?;
            let m = char_form_matrix(&g);
            let s2 = m.scale * m.scale;
            rep.points += 1;
            rep.printed_max_err = rep.printed_max_err.max((m.printed_det - m.tan4).abs() / s2);
            rep.explicit_max_err = rep.explicit_max_err.max((m.explicit_det - m.tan4).abs() / s2);
            rep.forms_max_diff = rep.forms_max_diff.max(m.printed.max_abs_diff(&m.explicit) / m.scale);
            rep.signature_ok &= has_lorentz_signature(&q2_matrix(&g));
            rep.explicit_psd &= m.explicit_psd;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetGridReport {
    pub points: usize,
    /// `max |det − tan⁴θ| / scale²` for the printed closed form.
    pub printed_max_err: f64,
    /// Same for the explicit product `Q₂² + Q₂`.
    pub explicit_max_err: f64,
    /// `max |printed − explicit| / scale`.
    pub forms_max_diff: f64,
    pub signature_ok: bool,
    pub explicit_psd: bool,
}

/// `surface_value` on boundary samples of `Z_ε` at `λ = 0`; returns the
/// largest absolute value.
pub fn z_eps_residual<R: Rng + ?Sized>(
    g: &ConeGeometry,
    b2: &Mat2,
    sig: SignatureSpec,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let g = g.with_lambda(0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x, y) = z_eps_boundary_sample(g.epsilon, sig, rng);
        worst = worst.max(surface_value_with(&x, &y, &g, b2, sig)?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn sig(d1: usize, d2: usize) -> SignatureSpec {
        SignatureSpec::new(d1, d2, d1, 0).unwrap()
    }

    #[test]
    fn q2_examples() {
        let g = ConeGeometry::new(0.5, 0.0, 0.0).unwrap();
        assert_eq!(q2_matrix(&g), Mat2([[-1.0, 0.0], [0.0, 4.0]]));
        let g = ConeGeometry::new(1.0, 0.7, 0.0).unwrap();
        assert_eq!(g.a(), 1.0);
        assert_eq!(q2_matrix(&g), Mat2([[-1.0, 0.7f64.tan()], [0.7f64.tan(), 1.0]]));
        let g = ConeGeometry::new(0.5, FRAC_PI_4, 0.0).unwrap();
        assert_relative_eq!(g.a(), 1.75, max_relative = 1e-15);
        let q = q2_matrix(&g);
        assert!(q.max_abs_diff(&Mat2([[-1.0, 1.0], [1.0, 7.0]])) < 1e-14);
        assert!(has_lorentz_signature(&q));
    }

    #[test]
    fn char_form_examples() {
        // printed closed form: det = tan⁴θ; explicit product carries an extra a/ε²
        let g = ConeGeometry::new(0.5, FRAC_PI_4, 0.0).unwrap();
        let m = char_form_matrix(&g);
        assert_relative_eq!(m.printed_det, 1.0, max_relative = 1e-12);
        assert!(m.printed_det_ok);
        assert_relative_eq!(m.explicit_det, 1.0 + 1.75 * 4.0, max_relative = 1e-12);
        assert!(!m.explicit_det_ok && !m.forms_agree);
        assert_relative_eq!(m.explicit.0[1][1] - m.printed.0[1][1], 7.0, max_relative = 1e-12);

        let g = ConeGeometry::new(0.5, 0.0, 0.0).unwrap();
        let m = char_form_matrix(&g);
        assert_eq!(m.printed, Mat2([[0.0, 0.0], [0.0, 16.0]]));
        assert_eq!(m.explicit.det(), 0.0);
        assert!(m.explicit_psd);
        assert_eq!(m.block_scalar, 20.0);

        for (e, t) in [(0.3, 0.2), (1.0, -1.0), (0.9, 1.3)] {
            let m = char_form_matrix(&ConeGeometry::new(e, t, 0.0).unwrap());
            assert!(m.explicit.trace() > 0.0 && m.explicit.det() > 0.0);
            assert!(m.printed.trace() > 0.0 && m.printed.det() > 0.0);
        }
    }

    #[test]
    fn b2_examples() {
        let g = ConeGeometry::new(0.5, 0.0, 0.0).unwrap();
        let r = b2_matrix(&g);
        assert_eq!(r.first_principles, Mat2([[-1.0, 0.0], [0.0, 4.0]]));
        assert_eq!(r.printed.0[0][0], -0.5);
        assert_eq!(r.discrepancy.0[0][0], 0.5);
        let g = ConeGeometry::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(b2_matrix(&g).first_principles, Mat2([[-1.0, 0.0], [0.0, 1.0]]));
        for (e, t) in [(0.3, 0.4), (0.8, -1.1), (1.0, 0.9)] {
            let r = b2_matrix(&ConeGeometry::new(e, t, 0.0).unwrap());
            assert_relative_eq!(r.first_principles.0[1][1], 1.0 / (e * e), max_relative = 1e-12);
            assert_relative_eq!(r.printed.0[1][1], 1.0 / (e * e), max_relative = 1e-15);
            assert!(r.discrepancy.0[0][1] < 1e-12);
            // b₁₁ with ε² in the denominator matches first principles
            let (s, c) = t.sin_cos();
            let fixed = -(e * e - s * s) / (e * e * c * c);
            assert!((r.first_principles.0[0][0] - fixed).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_examples() {
        let s = sig(2, 2);
        let g = ConeGeometry::new(0.5, 0.0, -0.3).unwrap();
        assert_relative_eq!(surface_value(&[0.0, 0.0], &[0.0, 0.0], &g, s).unwrap(), -1.0 + 0.3, max_relative = 1e-15);
        let g = ConeGeometry::new(0.5, 0.0, -1.0).unwrap();
        assert_eq!(surface_value(&[0.0, 0.0], &[0.0, 0.0], &g, s).unwrap(), 0.0);
        let g = ConeGeometry::new(0.6, 0.4, 0.0).unwrap();
        assert_eq!(surface_value(&[0.0, 0.0], &g.vertex(2), &g, s).unwrap(), 0.0);
        assert!(matches!(surface_value(&[0.0], &[0.0, 0.0], &g, s), Err(Error::Dimension { .. })));
        // affine in λ with slope −1
        let a = surface_value(&[0.3, 0.1], &[0.2, 0.5], &g, s).unwrap();
        let b = surface_value(&[0.3, 0.1], &[0.2, 0.5], &g.with_lambda(-0.25), s).unwrap();
        assert_relative_eq!(b - a, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn z_eps_is_the_lambda_zero_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (e, t) in [(0.5, 0.0), (0.25, 1.0), (1.0, -0.5), (0.7, 1.4)] {
            let g = ConeGeometry::new(e, t, 0.0).unwrap();
            let s = sig(2, 3);
            let fp = z_eps_residual(&g, &b2_first_principles(&g), s, 200, &mut rng).unwrap();
            assert!(fp <= 1e-12, "{e} {t} {fp}");
            if e < 1.0 {
                let pr = z_eps_residual(&g, &b2_printed(&g), s, 50, &mut rng).unwrap();
                assert!(pr > 1e-3, "{e} {t} {pr}");
            }
        }
    }

    #[test]
    fn general_vertex_reduces_to_plane() {
        let s = sig(1, 4);
        let w = [0.6, 0.0, 0.48, 0.64];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (x, y) = z_eps_boundary_sample(0.5, s, &mut rng);
            let v = surface_value_general(&x, &y, 0.5, &w, 0.0, s).unwrap();
            assert!(v.abs() < 1e-12);
        }
        assert!(surface_value_general(&[0.0], &w, 0.5, &w, 0.0, s).unwrap().abs() < 1e-14);
        assert!(VertexFrame::new(&[-0.6, 0.8]).is_err());
    }

    #[test]
    fn reduced_form_at_vertex_axis() {
        // θ = 0, ε = 1/2, λ = −1/2, y' = 0: the form equals −λ
        let s = sig(1, 2);
        let g = ConeGeometry::new(0.5, 0.0, -0.5).unwrap();
        let (x, y) = point_on_surface(&g, &[0.3], 0.0, &[], true);
        assert!(surface_value(&x, &y, &g, s).unwrap().abs() < 1e-14);
        assert_relative_eq!(char_form_direct(&x, &y, &g, s).unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(char_form_reduced(&y, &g), 0.5, max_relative = 1e-12);
        // characteristic limit λ = 0 at the vertex
        let g0 = ConeGeometry::new(0.5, 0.0, 0.0).unwrap();
        assert_eq!(char_form_reduced(&g0.vertex(2), &g0), 0.0);
    }

    #[test]
    fn sweep_passes_and_det_grid() {
        let cfg = SweepConfig {
            samples_per_cell: 100,
            ..SweepConfig::default()
        };
        let rep = noncharacteristic_sweep(&cfg, sig(2, 3), &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!(rep.max_disagreement <= FORM_TOL && rep.max_surface_residual < 1e-12);
        assert!(rep.min_form_over_lambda >= 1.0 - 1e-10);

        let d = det_grid(50, 50, 1.4).unwrap();
        assert!(d.signature_ok && d.explicit_psd);
        assert!(d.printed_max_err <= MATRIX_TOL);
        assert!(d.explicit_max_err > 1e-3);
    }

    proptest! {
        #[test]
        fn q2_signature_and_psd(e in 0.01f64..=1.0, t in -1.5f64..1.5) {
            let g = ConeGeometry::new(e, t, 0.0).unwrap();
            prop_assert!(has_lorentz_signature(&q2_matrix(&g)));
            prop_assert!(char_form_matrix(&g).explicit_psd);
        }
    }
}
