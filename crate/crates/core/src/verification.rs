//! Matching of analytic spectra against the ED oracle.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::ed::{ed_spectrum, EdSpectrum};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::spectrum::{enumerate_channel, sort_lex};

/// Largest `L` accepted by [`channel_match`].
pub const CHANNEL_MATCH_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorResidual {
    pub label: String,
    pub n_levels: usize,
    pub max_residual: f64,
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub n_levels: usize,
    pub max_residual: f64,
    pub unmatched: usize,
    pub tolerance: f64,
    pub channel_breakdown: Vec<SectorResidual>,
    pub pass: bool,
}

impl MatchReport {
    fn merge(tolerance: f64, parts: Vec<(String, MatchReport)>) -> MatchReport {
        let n_levels = parts.iter().map(|(_, r)| r.n_levels).sum();
        let unmatched = parts.iter().map(|(_, r)| r.unmatched).sum();
        let max_residual = parts.iter().map(|(_, r)| r.max_residual).fold(0.0, f64::max);
        let channel_breakdown = parts
            .into_iter()
            .map(|(label, r)| SectorResidual {
                label,
                n_levels: r.n_levels,
                max_residual: r.max_residual,
                unmatched: r.unmatched,
            })
            .collect();
        MatchReport {
            n_levels,
            max_residual,
            unmatched,
            tolerance,
            channel_breakdown,
            pass: unmatched == 0 && max_residual <= tolerance,
        }
    }
}

/// Pairs two multisets after sorting by `(Re, Im)`.
///
/// Each element of `a`, in order, takes the nearest still unused element of
/// `b` whose real part lies within `tol`; elements with no partner within
/// `tol` count as unmatched.
pub fn match_multisets(a: &[Complex64], b: &[Complex64], tol: f64) -> Result<MatchReport> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort_lex(&mut a);
    sort_lex(&mut b);

    let mut used = vec![false; b.len()];
    let mut max_residual = 0.0f64;
    let mut unmatched = 0;
    for z in &a {
        let lo = b.partition_point(|w| w.re < z.re - tol);
        let mut best: Option<(usize, f64)> = None;
        for (j, w) in b.iter().enumerate().skip(lo) {
            if w.re > z.re + tol {
                break;
            }
            if used[j] {
                continue;
            }
            let d = (z - w).norm();
            if best.is_none_or(|(_, bd)| d.partial_cmp(&bd) == Some(Ordering::Less)) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= tol => {
                used[j] = true;
                max_residual = max_residual.max(d);
            }
            _ => unmatched += 1,
        }
    }
    Ok(MatchReport {
        n_levels: a.len(),
        max_residual,
        unmatched,
        tolerance: tol,
        channel_breakdown: Vec::new(),
        pass: unmatched == 0 && max_residual <= tol,
    })
}

/// Matching tolerance `1e−8·(1 + |γ| + |δ| + |h|)·L`.
pub fn default_tolerance(params: &ModelParams) -> f64 {
    1e-8 * (1.0 + params.gamma().abs() + params.delta().abs() + params.h().abs())
        * params.len() as f64
}

/// Odd analytic channel against the odd-`M` ED sector, and likewise for even.
pub fn channel_match(params: &ModelParams) -> Result<MatchReport> {
    channel_match_with_tolerance(params, default_tolerance(params))
}

pub fn channel_match_with_tolerance(params: &ModelParams, tol: f64) -> Result<MatchReport> {
    if params.len() > CHANNEL_MATCH_CAP {
        return Err(Error::Capacity { what: "channel match", cap: CHANNEL_MATCH_CAP, l: params.len() });
    }
    channel_match_against(params, &ed_spectrum(params)?, tol)
}

/// Channel match against an already computed ED spectrum of `params`.
pub fn channel_match_against(params: &ModelParams, ed: &EdSpectrum, tol: f64) -> Result<MatchReport> {
    let mut parts = Vec::with_capacity(2);
    for channel in params.channels() {
        let analytic: Vec<Complex64> =
            enumerate_channel(params, channel)?.into_iter().map(|l| l.energy).collect();
        let sector = ed.sector(channel.fermion_parity);
        let label = format!(
            "{channel} vs {} sector",
            match channel.fermion_parity {
                Parity::Odd => "odd-M",
                Parity::Even => "even-M",
            }
        );
        parts.push((label, match_multisets(&analytic, sector, tol)?));
    }
    Ok(MatchReport::merge(tol, parts))
}
