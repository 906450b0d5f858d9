//! Radial bump profiles and their normalization integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a radial bump `g(t)`, `t = |θ| / radius`, vanishing for `t ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `exp(-1 / (1 - t²))`.
    Mollifier,
    /// `(1 - t²)⁴`; four bounded derivatives at the edge.
    PolynomialBump,
    /// Piecewise-linear through samples at `t = i / (n-1)`; the last sample
    /// must be zero.
    Sampled { samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub kind: ProfileKind,
    pub support_radius: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self {
            kind: ProfileKind::Mollifier,
            support_radius: 1.0,
        }
    }
}

impl BumpProfile {
    pub fn new(kind: ProfileKind, support_radius: f64) -> Result<Self> {
        let p = Self {
            kind,
            support_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn mollifier(support_radius: f64) -> Result<Self> {
        Self::new(ProfileKind::Mollifier, support_radius)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.support_radius;
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Profile(format!("support radius {r} not in (0, 1]")));
        }
        if let ProfileKind::Sampled { samples } = &self.kind {
            if samples.len() < 2 {
                return Err(Error::Profile("need at least two samples".into()));
            }
            if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
                return Err(Error::Profile("samples must be finite and non-negative".into()));
            }
            if *samples.last().unwrap() != 0.0 {
                return Err(Error::Profile("last sample must be zero".into()));
            }
            if samples.iter().all(|&s| s == 0.0) {
                return Err(Error::Profile("profile is identically zero".into()));
            }
        }
        Ok(())
    }

    /// `g(t)` for `t ≥ 0`.
    pub fn shape(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        match &self.kind {
            ProfileKind::Mollifier => (-1.0 / (1.0 - t * t)).exp(),
            ProfileKind::PolynomialBump => (1.0 - t * t).powi(4),
            ProfileKind::Sampled { samples } => {
                let n = samples.len() - 1;
                let x = t * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let f = x - i as f64;
                samples[i] * (1.0 - f) + samples[i + 1] * f
            }
        }
    }

    /// `g'(t)` for `t ≥ 0`.
    pub fn shape_derivative(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        match &self.kind {
            ProfileKind::Mollifier => {
                let q = 1.0 - t * t;
                -2.0 * t / (q * q) * (-1.0 / q).exp()
            }
            ProfileKind::PolynomialBump => -8.0 * t * (1.0 - t * t).powi(3),
            ProfileKind::Sampled { samples } => {
                let n = samples.len() - 1;
                let i = ((t * n as f64).floor() as usize).min(n - 1);
                (samples[i + 1] - samples[i]) * n as f64
            }
        }
    }

    /// Unnormalized `ψ(θ) = g(|θ| / radius)`.
    pub fn radial(&self, r: f64) -> f64 {
        self.shape(r.abs() / self.support_radius)
    }

    /// `∫_{ℝ^dim} g(|θ|/radius) dθ`.
    pub fn integral(&self, dim: usize) -> f64 {
        if dim == 0 {
            return self.shape(0.0);
        }
        let rho = self.support_radius;
        sphere_area(dim) * simpson(0.0, rho, 4000, |r| self.radial(r) * r.powi(dim as i32 - 1))
    }

    /// One-dimensional profile normalized to unit integral.
    pub fn normalized_1d(&self) -> Profile1d<'_> {
        Profile1d {
            profile: self,
            norm: self.integral(1),
        }
    }

    /// Off-center bump used for the growing-side kernel: a function of
    /// `(|θ₁|, |θ₂|)` centred at `(2, 0)` with radius `0.7·support_radius`.
    /// On its support `θ₁² − θ₂² > 1.2`.
    pub fn shifted(&self, r1: f64, r2: f64) -> f64 {
        let d = ((r1.abs() - 2.0).powi(2) + r2 * r2).sqrt();
        self.shape(d / (0.7 * self.support_radius))
    }

    /// `∫ shifted(|θ₁|, |θ₂|) dθ₁ dθ₂` over `ℝ^a × ℝ^b`.
    pub fn shifted_integral(&self, a: usize, b: usize) -> f64 {
        assert!(a >= 1, "shifted bump needs a spacelike complement");
        let h = 0.7 * self.support_radius;
        let (lo, hi) = (2.0 - h, 2.0 + h);
        if b == 0 {
            return sphere_area(a)
                * simpson(lo, hi, 4000, |r1| self.shifted(r1, 0.0) * r1.powi(a as i32 - 1));
        }
        let inner = |r1: f64| {
            simpson(0.0, h, 600, |r2| {
                self.shifted(r1, r2) * r2.powi(b as i32 - 1)
            }) * r1.powi(a as i32 - 1)
        };
        sphere_area(a) * sphere_area(b) * simpson(lo, hi, 600, inner)
    }
}

/// `ψ` on `[-radius, radius]` with `∫ψ = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Profile1d<'a> {
    profile: &'a BumpProfile,
    norm: f64,
}

impl Profile1d<'_> {
    pub fn value(&self, theta: f64) -> f64 {
        self.profile.radial(theta) / self.norm
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let rho = self.profile.support_radius;
        theta.signum() * self.profile.shape_derivative(theta.abs() / rho) / (rho * self.norm)
    }

    /// `∫ψ²`.
    pub fn l2_sq(&self) -> f64 {
        let rho = self.profile.support_radius;
        2.0 * simpson(0.0, rho, 4000, |t| self.value(t).powi(2))
    }

    /// `∫|ψ'|²`.
    pub fn derivative_l2_sq(&self) -> f64 {
        let rho = self.profile.support_radius;
        2.0 * simpson(0.0, rho, 4000, |t| self.derivative(t).powi(2))
    }
}

/// Surface area of the unit sphere in `ℝ^n` (`n = 1` counts the two points).
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

/// Composite Simpson rule with `2 * half` panels.
pub fn simpson(a: f64, b: f64, half: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = 2 * half;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}
