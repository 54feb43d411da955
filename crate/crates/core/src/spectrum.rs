//! Many-body spectrum of the chain from its free-fermion solution.
//!
//! Each channel decouples into independent `±q` pairs plus the unpaired
//! `q = 0` and `q = π` modes. A pair carries four Fock states: the two
//! even-occupation states mix through the pairing terms and give
//! `2cos q ± 2ω(q)`, the two singly occupied states sit at `2cos q`. The
//! field constant `+h` of every mode is already folded into these numbers.
//! A level of the spin chain is a choice per pair and per special mode whose
//! total fermion parity matches the channel.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{momentum_grid, omega, Channel, ModelParams, MomentumGrid, Parity};

/// Largest `L` accepted by [`enumerate_spectrum`].
pub const ENUMERATION_CAP: usize = 16;

/// Absolute tolerance for calling two real parts degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Lexicographic order on `(Re, Im)`.
pub fn cmp_lex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_lex(values: &mut [Complex64]) {
    values.sort_by(cmp_lex);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairBlock {
    pub q: f64,
    pub even_low: Complex64,
    pub even_high: Complex64,
    /// Energy of each of the two singly occupied states.
    pub odd_level: f64,
}

impl PairBlock {
    pub fn energy(&self, choice: PairChoice) -> Complex64 {
        match choice {
            PairChoice::EvenLow => self.even_low,
            PairChoice::EvenHigh => self.even_high,
            PairChoice::OddA | PairChoice::OddB => Complex64::new(self.odd_level, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairChoice {
    EvenLow,
    EvenHigh,
    OddA,
    OddB,
}

impl PairChoice {
    pub const ALL: [PairChoice; 4] =
        [PairChoice::EvenLow, PairChoice::EvenHigh, PairChoice::OddA, PairChoice::OddB];

    /// Fermion-number contribution used for the parity rule.
    pub fn occupation(&self) -> u32 {
        match self {
            PairChoice::EvenLow => 0,
            PairChoice::EvenHigh => 2,
            PairChoice::OddA | PairChoice::OddB => 1,
        }
    }

    /// Bogoliubov quasiparticles on top of the pair vacuum.
    pub fn quasiparticles(&self) -> u32 {
        self.occupation()
    }
}

/// Level structure of the `±q` pair, `0 < q < π`.
pub fn pair_block(params: &ModelParams, q: f64) -> Result<PairBlock> {
    if !(q > 0.0 && q < PI) {
        return Err(Error::Parameter(format!(
            "pair momentum must lie in (0, π), got {q}; use special_mode_energy for 0 and π"
        )));
    }
    let w = omega(params, q);
    let c = 2.0 * q.cos();
    Ok(PairBlock {
        q,
        even_low: c - 2.0 * w,
        even_high: c + 2.0 * w,
        odd_level: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialMode {
    Zero,
    Pi,
}

/// Energy of the unpaired mode at `q = 0` or `q = π` with occupation `n`.
pub fn special_mode_energy(params: &ModelParams, mode: SpecialMode, n: u8) -> f64 {
    let band = match mode {
        SpecialMode::Zero => 1.0,
        SpecialMode::Pi => -1.0,
    };
    2.0 * (band - params.h()) * n as f64 + params.h()
}

/// One many-body level of the spin chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDescriptor {
    pub energy: Complex64,
    pub channel: Channel,
    /// Choice for every positive paired momentum, in grid order.
    pub pair_choices: Vec<(f64, PairChoice)>,
    pub n_zero: Option<u8>,
    pub n_pi: Option<u8>,
}

impl LevelDescriptor {
    pub fn fermion_number_parity(&self) -> Parity {
        let pairs: u32 = self.pair_choices.iter().map(|(_, c)| c.occupation()).sum();
        let specials = self.n_zero.unwrap_or(0) as u32 + self.n_pi.unwrap_or(0) as u32;
        if (pairs + specials) % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// All `2^L` levels of the chain, both channels merged.
#[derive(Debug, Clone)]
pub struct SpectrumSet {
    pub params: ModelParams,
    pub levels: Vec<LevelDescriptor>,
}

impl SpectrumSet {
    pub fn count(&self) -> usize {
        self.levels.len()
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn channel_energies(&self, channel: Channel) -> Vec<Complex64> {
        self.levels.iter().filter(|l| l.channel == channel).map(|l| l.energy).collect()
    }

    /// Energies sorted by `(Re, Im)`.
    pub fn sorted_energies(&self) -> Vec<Complex64> {
        let mut e = self.energies();
        sort_lex(&mut e);
        e
    }
}

struct ChannelData {
    grid: MomentumGrid,
    blocks: Vec<PairBlock>,
    zero: Option<[f64; 2]>,
    pi: Option<[f64; 2]>,
}

fn channel_data(params: &ModelParams, channel: Channel) -> Result<ChannelData> {
    let grid = momentum_grid(params.len(), channel)?;
    let blocks = grid
        .paired
        .iter()
        .map(|&q| pair_block(params, q))
        .collect::<Result<Vec<_>>>()?;
    let zero = grid.has_zero.then(|| {
        [
            special_mode_energy(params, SpecialMode::Zero, 0),
            special_mode_energy(params, SpecialMode::Zero, 1),
        ]
    });
    let pi = grid.has_pi.then(|| {
        [
            special_mode_energy(params, SpecialMode::Pi, 0),
            special_mode_energy(params, SpecialMode::Pi, 1),
        ]
    });
    Ok(ChannelData { grid, blocks, zero, pi })
}

fn wanted_parity(channel: Channel) -> u32 {
    match channel.fermion_parity {
        Parity::Odd => 1,
        Parity::Even => 0,
    }
}

/// All valid levels of one channel, in a fixed enumeration order.
pub fn enumerate_channel(params: &ModelParams, channel: Channel) -> Result<Vec<LevelDescriptor>> {
    if params.len() > ENUMERATION_CAP {
        return Err(Error::Capacity {
            what: "full spectrum enumeration (use ground_state / spectral_gap)",
            cap: ENUMERATION_CAP,
            l: params.len(),
        });
    }
    let data = channel_data(params, channel)?;
    let n_pairs = data.blocks.len();
    let zero_opts: &[u8] = if data.zero.is_some() { &[0, 1] } else { &[0] };
    let pi_opts: &[u8] = if data.pi.is_some() { &[0, 1] } else { &[0] };
    let want = wanted_parity(channel);

    let mut levels = Vec::with_capacity(1 << (params.len() - 1));
    let mut choice = vec![0usize; n_pairs];
    loop {
        let pair_occ: u32 = choice.iter().map(|&c| PairChoice::ALL[c].occupation()).sum();
        let pair_energy: Complex64 = choice
            .iter()
            .zip(&data.blocks)
            .map(|(&c, b)| b.energy(PairChoice::ALL[c]))
            .sum();
        for &nz in zero_opts {
            for &np in pi_opts {
                if (pair_occ + nz as u32 + np as u32) % 2 != want {
                    continue;
                }
                let mut e = pair_energy;
                if let Some(z) = data.zero {
                    e += z[nz as usize];
                }
                if let Some(p) = data.pi {
                    e += p[np as usize];
                }
                levels.push(LevelDescriptor {
                    energy: e,
                    channel,
                    pair_choices: data
                        .grid
                        .paired
                        .iter()
                        .zip(&choice)
                        .map(|(&q, &c)| (q, PairChoice::ALL[c]))
                        .collect(),
                    n_zero: data.zero.map(|_| nz),
                    n_pi: data.pi.map(|_| np),
                });
            }
        }
        // mixed-radix increment over the pair choices
        let mut i = 0;
        while i < n_pairs {
            choice[i] += 1;
            if choice[i] < 4 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == n_pairs {
            break;
        }
    }
    Ok(levels)
}

/// Full spectrum (`2^L` levels) by enumerating both channels.
pub fn enumerate_spectrum(params: &ModelParams) -> Result<SpectrumSet> {
    let mut levels = Vec::with_capacity(1 << params.len().min(ENUMERATION_CAP));
    for channel in params.channels() {
        levels.extend(enumerate_channel(params, channel)?);
    }
    debug_assert_eq!(levels.len(), 1 << params.len());
    Ok(SpectrumSet { params: *params, levels })
}

/// Additive constants of the diagonalized channel Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelOffsets {
    pub constant: f64,
    /// Coefficient of `n₀` when the grid carries `q = 0`.
    pub zero_mode_coeff: Option<f64>,
    /// Coefficient of `n_π` when the grid carries `q = π`.
    pub pi_mode_coeff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelConstants {
    pub channel: Channel,
    /// `Λ = −Σ ω(q)` over the full grid of the channel.
    pub lambda: Complex64,
    pub offsets: ChannelOffsets,
}

/// Ground-energy constant and special-mode terms of a channel in
/// quasiparticle form. For even `L` the constants are recorded as they are
/// usually quoted; they are not used to build energies.
pub fn channel_constants(params: &ModelParams, channel: Channel) -> Result<ChannelConstants> {
    let grid = momentum_grid(params.len(), channel)?;
    let lambda = -grid.values.iter().map(|&q| omega(params, q)).sum::<Complex64>();
    let h = params.h();
    let offsets = match (channel.site_parity, channel.fermion_parity) {
        (Parity::Odd, Parity::Odd) => ChannelOffsets {
            constant: (h - 1.0).abs() + (h - 1.0),
            zero_mode_coeff: Some(-2.0 * (h - 1.0)),
            pi_mode_coeff: None,
        },
        // Written symmetric to the odd channel; equals 2(h+1) for h >= −1.
        (Parity::Odd, Parity::Even) => ChannelOffsets {
            constant: (h + 1.0).abs() + (h + 1.0),
            zero_mode_coeff: None,
            pi_mode_coeff: Some(-2.0 * (h + 1.0)),
        },
        (Parity::Even, Parity::Odd) => ChannelOffsets {
            constant: (h - 1.0).abs() + 3.0 + h,
            zero_mode_coeff: Some(2.0 * (h - 1.0)),
            pi_mode_coeff: Some(-2.0 * (h + 1.0)),
        },
        (Parity::Even, Parity::Even) => {
            ChannelOffsets { constant: 0.0, zero_mode_coeff: None, pi_mode_coeff: None }
        }
    };
    Ok(ChannelConstants { channel, lambda, offsets })
}

/// Energy of `level` rebuilt as `Λ + constants + Σ 2ω(q)` over occupied
/// quasiparticles. Only defined for odd `L`.
pub fn quasiparticle_form_energy(
    params: &ModelParams,
    level: &LevelDescriptor,
) -> Result<Complex64> {
    if params.site_parity() != Parity::Odd {
        return Err(Error::Parameter(
            "quasiparticle form is only available for odd L".into(),
        ));
    }
    let k = channel_constants(params, level.channel)?;
    let mut e = k.lambda + k.offsets.constant;
    if let (Some(c), Some(n)) = (k.offsets.zero_mode_coeff, level.n_zero) {
        e += c * n as f64;
    }
    if let (Some(c), Some(n)) = (k.offsets.pi_mode_coeff, level.n_pi) {
        e += c * n as f64;
    }
    for &(q, choice) in &level.pair_choices {
        e += 2.0 * omega(params, q) * choice.quasiparticles() as f64;
    }
    Ok(e)
}

/// Minimal-energy level of one channel under `(Re, Im)` order, built from
/// the per-mode minima with the parity repaired by the cheapest single flip.
fn channel_ground(params: &ModelParams, channel: Channel) -> Result<LevelDescriptor> {
    let data = channel_data(params, channel)?;

    // Best choice per pair and the cost of switching its parity class.
    let mut pair_choices = Vec::with_capacity(data.blocks.len());
    let mut parity = 0u32;
    let mut energy = Complex64::new(0.0, 0.0);
    // (component index, replacement, delta); index >= n_pairs marks special modes
    let mut best_flip: Option<(usize, usize, Complex64)> = None;
    let mut consider = |idx: usize, repl: usize, delta: Complex64| {
        if best_flip.is_none_or(|(_, _, d)| cmp_lex(&delta, &d) == Ordering::Less) {
            best_flip = Some((idx, repl, delta));
        }
    };

    for (i, b) in data.blocks.iter().enumerate() {
        let even = if cmp_lex(&b.even_low, &b.even_high) != Ordering::Greater {
            PairChoice::EvenLow
        } else {
            PairChoice::EvenHigh
        };
        let odd = Complex64::new(b.odd_level, 0.0);
        let (best, other) = if cmp_lex(&b.energy(even), &odd) != Ordering::Greater {
            (even, PairChoice::OddA)
        } else {
            (PairChoice::OddA, even)
        };
        consider(i, other as usize, b.energy(other) - b.energy(best));
        parity += best.occupation();
        energy += b.energy(best);
        pair_choices.push((b.q, best));
    }

    let n = data.blocks.len();
    let mut specials = [None, None];
    for (slot, opts) in [data.zero, data.pi].into_iter().enumerate() {
        if let Some(e) = opts {
            let best = if e[0] <= e[1] { 0u8 } else { 1 };
            let other = 1 - best;
            consider(n + slot, other as usize, Complex64::new(e[other as usize] - e[best as usize], 0.0));
            parity += best as u32;
            energy += e[best as usize];
            specials[slot] = Some(best);
        }
    }

    if parity % 2 != wanted_parity(channel) {
        let (idx, repl, delta) =
            best_flip.ok_or_else(|| Error::Consistency("channel without modes".into()))?;
        energy += delta;
        if idx < n {
            pair_choices[idx].1 = PairChoice::ALL[repl];
        } else {
            specials[idx - n] = Some(repl as u8);
        }
    }

    Ok(LevelDescriptor {
        energy,
        channel,
        pair_choices,
        n_zero: specials[0],
        n_pi: specials[1],
    })
}

/// Lowest level of the chain under `(Re, Im)` order, without enumeration.
pub fn ground_state(params: &ModelParams) -> Result<LevelDescriptor> {
    let [odd, even] = params.channels();
    let a = channel_ground(params, odd)?;
    let b = channel_ground(params, even)?;
    Ok(if cmp_lex(&b.energy, &a.energy) == Ordering::Less { b } else { a })
}

/// A set of levels sharing one real part (within [`DEGENERACY_TOL`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyShell {
    pub re: f64,
    pub multiplicity: u128,
    pub channels: Vec<Channel>,
}

const SHELL_DEPTH: usize = 8;
const PARTIAL_MERGE_TOL: f64 = 1e-11;

fn merge_sorted(values: &mut Vec<(f64, u128)>, tol: f64, keep: usize) {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u128)> = Vec::with_capacity(keep);
    for &(v, c) in values.iter() {
        match out.last_mut() {
            Some(last) if v - last.0 <= tol => last.1 += c,
            _ => {
                if out.len() == keep {
                    break;
                }
                out.push((v, c));
            }
        }
    }
    *values = out;
}

/// The `depth` lowest distinct real parts of one channel with multiplicities.
///
/// Keeping only the lowest few distinct partial sums per parity while adding
/// modes one at a time is exact for the lowest few final sums, since every
/// mode contributes a fixed set of options.
fn channel_shells(params: &ModelParams, channel: Channel, depth: usize) -> Result<Vec<(f64, u128)>> {
    let data = channel_data(params, channel)?;
    let mut options: Vec<Vec<(f64, u32, u128)>> = data
        .blocks
        .iter()
        .map(|b| vec![(b.even_low.re, 0, 1), (b.even_high.re, 0, 1), (b.odd_level, 1, 2)])
        .collect();
    for e in [data.zero, data.pi].into_iter().flatten() {
        options.push(vec![(e[0], 0, 1), (e[1], 1, 1)]);
    }
    let mut by_parity: [Vec<(f64, u128)>; 2] = [vec![(0.0, 1)], vec![]];
    for opts in &options {
        let mut next: [Vec<(f64, u128)>; 2] = [Vec::new(), Vec::new()];
        for (p, list) in by_parity.iter().enumerate() {
            for &(v, c) in list {
                for &(e, dp, m) in opts {
                    next[(p + dp as usize) % 2].push((v + e, c * m));
                }
            }
        }
        for list in next.iter_mut() {
            merge_sorted(list, PARTIAL_MERGE_TOL, depth);
        }
        by_parity = next;
    }
    Ok(std::mem::take(&mut by_parity[wanted_parity(channel) as usize]))
}

/// Lowest distinct real parts of the merged spectrum, up to `count` shells.
pub fn low_lying(params: &ModelParams, count: usize) -> Result<Vec<EnergyShell>> {
    let depth = count.max(2) + SHELL_DEPTH;
    let mut all: Vec<(f64, u128, Channel)> = Vec::new();
    for channel in params.channels() {
        all.extend(channel_shells(params, channel, depth)?.into_iter().map(|(v, c)| (v, c, channel)));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut shells: Vec<EnergyShell> = Vec::new();
    for (v, c, ch) in all {
        match shells.last_mut() {
            Some(s) if v - s.re <= DEGENERACY_TOL => {
                s.multiplicity += c;
                if !s.channels.contains(&ch) {
                    s.channels.push(ch);
                }
            }
            _ => shells.push(EnergyShell { re: v, multiplicity: c, channels: vec![ch] }),
        }
    }
    shells.truncate(count);
    Ok(shells)
}

/// Number of levels whose real part is within [`DEGENERACY_TOL`] of the ground.
pub fn ground_degeneracy(params: &ModelParams) -> Result<u128> {
    Ok(low_lying(params, 1)?[0].multiplicity)
}

/// `Re E₁ − Re E₀`, with `E₁` the lowest level above the ground manifold.
pub fn spectral_gap(params: &ModelParams) -> Result<f64> {
    let shells = low_lying(params, 2)?;
    match shells.as_slice() {
        [g, e, ..] => Ok(e.re - g.re),
        _ => Err(Error::Consistency("spectrum has a single shell".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoeffs {
    pub q: f64,
    pub u: f64,
    pub v: f64,
    /// `√(Δα/Δβ)`, present when `ΔαΔβ > 0`.
    pub prefactor_ratio: Option<Complex64>,
}

pub fn bogoliubov_coeffs(params: &ModelParams, q: f64) -> Result<BogoliubovCoeffs> {
    let s = q.sin();
    if s.abs() < 1e-12 {
        return Err(Error::Domain(format!("q = {q} is an unpaired mode")));
    }
    let w = omega(params, q);
    if w.im != 0.0 || w.re == 0.0 {
        return Err(Error::Domain(format!(
            "ω({q}) = {w} is not real and nonzero; coefficients are not normalizable"
        )));
    }
    let ratio = (q.cos() - params.h()) / w.re;
    let u = (0.5 * (1.0 + ratio)).max(0.0).sqrt();
    let v = (0.5 * (1.0 - ratio)).max(0.0).sqrt() * s.signum();
    let prefactor_ratio = (params.gap_product() > 0.0)
        .then(|| Complex64::new(params.delta_alpha() / params.delta_beta(), 0.0).sqrt());
    Ok(BogoliubovCoeffs { q, u, v, prefactor_ratio })
}

/// Diagonalizes the `±q` Fock block straight from the momentum-space
/// Hamiltonian and checks it against [`pair_block`].
pub fn verify_bdg_block(params: &ModelParams, q: f64) -> Result<bool> {
    const TOL: f64 = 1e-10;
    let block = pair_block(params, q)?;
    let (h, s, c) = (params.h(), q.sin(), q.cos());
    // basis {|0⟩, c_q† c_{−q}† |0⟩}
    let a = Complex64::new(2.0 * h, 0.0);
    let d = Complex64::new(4.0 * c - 2.0 * h, 0.0);
    let upper = Complex64::new(0.0, 2.0 * s * params.delta_beta());
    let lower = Complex64::new(0.0, -2.0 * s * params.delta_alpha());
    let mean = (a + d) / 2.0;
    let root = (((a - d) / 2.0).powi(2) + upper * lower).sqrt();
    let (e1, e2) = (mean - root, mean + root);
    let even_ok = ((e1 - block.even_low).norm() < TOL && (e2 - block.even_high).norm() < TOL)
        || ((e1 - block.even_high).norm() < TOL && (e2 - block.even_low).norm() < TOL);
    // singly occupied states are diagonal: 2(cos q − h) + 2h
    let odd_ok = (2.0 * (c - h) + 2.0 * h - block.odd_level).abs() < TOL;
    Ok(even_ok && odd_ok)
}
