//! Phase-diagram scans in the `(h, δ)` plane at fixed `γ`.
//!
//! Each cell records `|Im E₀|` from the chosen engine together with the
//! analytic phase label; a nonzero imaginary ground energy marks the
//! T-breaking region.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ed::{ed_spectrum, lowest_eigenvalue, DENSE_CAP};
use crate::error::{Error, Result};
use crate::model::{classify_phase, ModelParams, PhaseLabel};
use crate::output::fmt_f64;
use crate::spectrum::{ground_state, DEGENERACY_TOL};

/// `|Im E₀|` above this counts as complex.
pub const IM_GROUND_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Engine {
    Analytic,
    Ed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    pub fn count(&self) -> usize {
        match self {
            Axis::Values(v) => v.len(),
            Axis::Range { count, .. } => *count,
        }
    }

    /// Sample points; ranges include both endpoints.
    pub fn points(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, stop, count } => linspace(*start, *stop, *count),
        }
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    pub gamma: f64,
    pub h_axis: Axis,
    /// The `h_axis` samples are `1/h` rather than `h`.
    pub h_axis_inverse: bool,
    pub delta_axis: Axis,
    pub l: usize,
    pub engine: Engine,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.h_axis.count() < 2 || self.delta_axis.count() < 2 {
            return Err(Error::Parameter("scan axes need at least 2 points".into()));
        }
        if self.engine == Engine::Ed && self.l > DENSE_CAP {
            return Err(Error::Capacity { what: "ED phase scan", cap: DENSE_CAP, l: self.l });
        }
        if self.h_axis_inverse && self.h_axis.points().contains(&0.0) {
            return Err(Error::Parameter("1/h axis contains 0".into()));
        }
        ModelParams::new(self.l, self.gamma, 0.0, 0.0).map(|_| ())
    }

    pub fn h_points(&self) -> Vec<f64> {
        let pts = self.h_axis.points();
        if self.h_axis_inverse {
            pts.into_iter().map(|x| 1.0 / x).collect()
        } else {
            pts
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub h: f64,
    pub delta: f64,
    pub im_ground: f64,
    pub phase: PhaseLabel,
}

/// Ground energy through either engine; ties in `Re` go to the smallest `Im`.
pub fn ground_energy(params: &ModelParams, engine: Engine) -> Result<Complex64> {
    match engine {
        Engine::Analytic => Ok(ground_state(params)?.energy),
        Engine::Ed => {
            let ev = ed_spectrum(params)?.all();
            lowest_eigenvalue(&ev, DEGENERACY_TOL)
                .ok_or_else(|| Error::Consistency("empty ED spectrum".into()))
        }
    }
}

/// Row-major scan: one row per `δ`, one column per `h`.
pub fn scan(spec: &ScanSpec) -> Result<Vec<ScanCell>> {
    spec.validate()?;
    let hs = spec.h_points();
    let points: Vec<(f64, f64)> = spec
        .delta_axis
        .points()
        .into_iter()
        .flat_map(|d| hs.iter().map(move |&h| (h, d)))
        .collect();
    points
        .par_iter()
        .map(|&(h, delta)| {
            let params = ModelParams::new(spec.l, spec.gamma, delta, h)?;
            let e0 = ground_energy(&params, spec.engine)?;
            Ok(ScanCell { h, delta, im_ground: e0.im.abs(), phase: classify_phase(&params) })
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(cells: &[ScanCell], mut w: W) -> io::Result<()> {
    writeln!(w, "h,delta,im_ground,phase")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(c.h),
            fmt_f64(c.delta),
            fmt_f64(c.im_ground),
            c.phase.kind
        )?;
    }
    Ok(())
}

/// A phase boundary sampled as `(δ, h)` points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn push_curve(out: &mut Vec<BoundaryCurve>, label: &str, ds: Vec<f64>, h: impl Fn(f64) -> f64) {
    if ds.len() >= 2 {
        out.push(BoundaryCurve {
            label: label.to_string(),
            points: ds.into_iter().map(|d| (d, h(d))).collect(),
        });
    }
}

fn clipped(lo: f64, hi: f64, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let (lo, hi) = (lo.max(a), hi.min(b));
    if hi > lo {
        linspace(lo, hi, samples)
    } else {
        Vec::new()
    }
}

/// Phase boundaries at fixed `γ`, sampled over `δ ∈ [delta_min, delta_max]`.
///
/// * `|h| = 1` where `ΔαΔβ = γ² − δ² > 0` (critical lines),
/// * `ΔαΔβ + h² = 1` with `|h| > 1` (edge of the paramagnetic phase),
/// * `ΔαΔβ = 0` with `|h| < 1` (edge of the kink phases).
pub fn boundary_curves(gamma: f64, delta_min: f64, delta_max: f64, samples: usize) -> Vec<BoundaryCurve> {
    let g = gamma.abs();
    let mut out = Vec::new();
    let inner = clipped(delta_min, delta_max, -g, g, samples);
    push_curve(&mut out, "critical h=+1", inner.clone(), |_| 1.0);
    push_curve(&mut out, "critical h=-1", inner, |_| -1.0);

    let reality = |d: f64| (1.0 - gamma * gamma + d * d).sqrt();
    for (side, lo, hi) in [("left", f64::NEG_INFINITY, -g), ("right", g, f64::INFINITY)] {
        let ds = clipped(delta_min, delta_max, lo, hi, samples);
        push_curve(&mut out, &format!("reality {side} h>1"), ds.clone(), reality);
        push_curve(&mut out, &format!("reality {side} h<-1"), ds, |d| -reality(d));
    }

    for d in [-g, g] {
        if d >= delta_min && d <= delta_max {
            out.push(BoundaryCurve {
                label: format!("pairing zero delta={d}"),
                points: linspace(-1.0, 1.0, samples).into_iter().map(|h| (d, h)).collect(),
            });
        }
    }
    out
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Euclidean distance in the `(δ, h)` plane from a point to the nearest
/// phase boundary at fixed `γ`.
pub fn distance_to_boundary(gamma: f64, h: f64, delta: f64) -> f64 {
    let g = gamma.abs();
    let p = (delta, h);
    let mut best = f64::INFINITY;
    // straight pieces
    if g > 0.0 {
        for hh in [-1.0, 1.0] {
            best = best.min(segment_distance(p, (-g, hh), (g, hh)));
        }
    }
    for d in [-g, g] {
        best = best.min(segment_distance(p, (d, -1.0), (d, 1.0)));
    }
    // h² − δ² = 1 − γ² with |δ| ≥ γ; polyline with spacing well below the
    // distances of interest, refined around the closest vertex
    let span = 2.0 * (delta.abs() + h.abs() + g + 2.0);
    let reality = |d: f64| (1.0 - gamma * gamma + d * d).max(0.0).sqrt();
    for sign_d in [-1.0, 1.0] {
        for sign_h in [-1.0, 1.0] {
            let curve = |t: f64| (sign_d * (g + t), sign_h * reality(g + t));
            let n = 20_000;
            let step = span / n as f64;
            let mut best_t = 0.0;
            let mut local = f64::INFINITY;
            for i in 0..n {
                let (t0, t1) = (i as f64 * step, (i + 1) as f64 * step);
                let d = segment_distance(p, curve(t0), curve(t1));
                if d < local {
                    local = d;
                    best_t = t0;
                }
            }
            let fine = step / 1000.0;
            let start = (best_t - step).max(0.0);
            for i in 0..3000 {
                let (t0, t1) = (start + i as f64 * fine, start + (i + 1) as f64 * fine);
                local = local.min(segment_distance(p, curve(t0), curve(t1)));
            }
            best = best.min(local);
        }
    }
    best
}
