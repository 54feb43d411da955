//! Bloch vector of the momentum-space Hamiltonian and its winding number.
//!
//! `H(q) = h(q)·σ` with `h = (−iδ sin q, γ sin q, cos q − h)`. The bilinear
//! square `h·h` (no conjugation) is `f(q)`, so the normalized vector is
//! `h(q)/ω(q)`. The winding number is the signed rotation count of the real
//! loop `(cos q − h, √(ΔαΔβ) sin q)` around the origin, times `sgn Δα`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{omega, ModelParams, CRITICAL_TOL};
use crate::output::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSample {
    pub q: f64,
    pub hx: Complex64,
    pub hy: f64,
    pub hz: f64,
    /// Square root of the bilinear self-product, i.e. `ω(q)`.
    pub norm: Complex64,
}

impl BlochSample {
    pub fn components(&self) -> [Complex64; 3] {
        [self.hx, Complex64::new(self.hy, 0.0), Complex64::new(self.hz, 0.0)]
    }

    /// `hx² + hy² + hz²` without conjugation.
    pub fn bilinear_square(&self) -> Complex64 {
        self.hx * self.hx + self.hy * self.hy + self.hz * self.hz
    }
}

pub fn bloch_vector(params: &ModelParams, q: f64) -> BlochSample {
    let s = q.sin();
    BlochSample {
        q,
        hx: Complex64::new(0.0, -params.delta() * s),
        hy: params.gamma() * s,
        hz: q.cos() - params.h(),
        norm: omega(params, q),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub value: f64,
    pub rounded: i64,
}

/// Winding number by trapezoidal quadrature on `n_grid` uniform points.
pub fn winding_number(params: &ModelParams, n_grid: usize) -> Result<Winding> {
    let p = params.gap_product();
    if p <= 0.0 {
        return Err(Error::Domain(format!(
            "winding number needs ΔαΔβ > 0 for a real loop, got {p}"
        )));
    }
    if n_grid < 64 {
        return Err(Error::Parameter(format!("n_grid must be at least 64, got {n_grid}")));
    }
    let h = params.h();
    if (h.abs() - 1.0).abs() <= CRITICAL_TOL {
        return Err(Error::SingularLoop(format!("loop passes through the origin at h = {h}")));
    }
    let s = p.sqrt();
    let mut sum = 0.0;
    for k in 0..n_grid {
        let q = 2.0 * PI * k as f64 / n_grid as f64;
        let (sn, cs) = q.sin_cos();
        let x = cs - h;
        let y = s * sn;
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return Err(Error::SingularLoop(format!("loop passes through the origin at q = {q}")));
        }
        // (x y' − y x') / (x² + y²)
        sum += (x * s * cs + y * sn) / r2;
    }
    let value = params.delta_alpha().signum() * sum / n_grid as f64;
    Ok(Winding { value, rounded: value.round() as i64 })
}

/// Normalized Bloch vector at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub q: f64,
    pub unit: [Complex64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryPoint>,
    pub closed: bool,
}

impl Trajectory {
    /// Real parts of the normalized components.
    pub fn real_stream(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| s.unit.map(|c| c.re)).collect()
    }

    /// Imaginary parts of the normalized components.
    pub fn imag_stream(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| s.unit.map(|c| c.im)).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "q,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz")?;
        for s in &self.samples {
            write!(w, "{}", fmt_f64(s.q))?;
            for c in s.unit {
                write!(w, ",{},{}", fmt_f64(c.re), fmt_f64(c.im))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `n_samples` normalized Bloch vectors over `q ∈ [0, 2π]`, endpoints included.
pub fn trajectory(params: &ModelParams, n_samples: usize) -> Result<Trajectory> {
    if n_samples < 16 {
        return Err(Error::Parameter(format!("n_samples must be at least 16, got {n_samples}")));
    }
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let q = 2.0 * PI * k as f64 / (n_samples - 1) as f64;
        let b = bloch_vector(params, q);
        if b.norm.norm() == 0.0 {
            return Err(Error::SingularLoop(format!("ω vanishes at q = {q}")));
        }
        samples.push(TrajectoryPoint { q, unit: b.components().map(|c| c / b.norm) });
    }
    let (first, last) = (samples[0].unit, samples[n_samples - 1].unit);
    let closed = first.iter().zip(&last).all(|(a, b)| (a - b).norm() < 1e-12);
    Ok(Trajectory { samples, closed })
}
