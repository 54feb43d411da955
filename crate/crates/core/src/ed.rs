//! Exact diagonalization of the spin chain on the full `2^L` basis.
//!
//! Basis convention: bit `j` of a state index set means spin `j` points down
//! (σᶻ = −1). The Jordan–Wigner occupation is `n_j = (σᶻ_j + 1)/2`, so the
//! fermion number `M` is the number of up spins.
//!
//! Bond action, in the `{↑↑, ↑↓, ↓↑, ↓↓}` basis:
//!
//! ```text
//! ↑↓ ↔ ↓↑ : 1      ↓↓ → ↑↑ : Δα      ↑↑ → ↓↓ : Δβ
//! ```
//!
//! The matrix is real and, for `δ ≠ 0`, not symmetric. Every bond flips zero
//! or two spins, so the parity of `M` is conserved, and the ring is invariant
//! under translation. Two solvers are provided: a dense one per parity
//! sector, and one that further splits each sector into momentum blocks.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::spectrum::sort_lex;

/// Largest `L` for which the full dense operator is built.
pub const DENSE_CAP: usize = 14;
/// Largest matrix handed to the dense eigensolver.
pub const EIGEN_DIM_CAP: usize = 4096;
/// Largest `L` for the momentum-resolved solver.
pub const MOMENTUM_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinBasisIndex(pub u32);

impl SpinBasisIndex {
    pub fn up_count(&self, l: usize) -> usize {
        l - self.0.count_ones() as usize
    }

    pub fn fermion_parity(&self, l: usize) -> Parity {
        Parity::of(self.up_count(l))
    }
}

/// `(amplitude, target)` pairs produced by one bond acting on `state`.
#[inline]
fn bond_action(params: &ModelParams, state: u32, j: usize) -> (f64, u32) {
    let l = params.len();
    let k = (j + 1) % l;
    let (a, b) = ((state >> j) & 1, (state >> k) & 1);
    let target = state ^ (1 << j) ^ (1 << k);
    let amp = match (a, b) {
        (0, 0) => params.delta_beta(),
        (1, 1) => params.delta_alpha(),
        _ => 1.0,
    };
    (amp, target)
}

#[inline]
fn field_energy(params: &ModelParams, state: u32) -> f64 {
    let down = state.count_ones() as f64;
    let up = params.len() as f64 - down;
    -params.h() * (up - down)
}

/// Dense `2^L × 2^L` Hamiltonian.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub l: usize,
    pub dim: usize,
    pub entries: Mat<f64>,
}

impl DenseOperator {
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[(i, i)]).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.entries[(i, j)] == self.entries[(j, i)]))
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        dense_eigenvalues(&self.entries)
    }
}

pub fn build_hamiltonian(params: &ModelParams) -> Result<DenseOperator> {
    let l = params.len();
    if l > DENSE_CAP {
        return Err(Error::Capacity { what: "dense Hamiltonian", cap: DENSE_CAP, l });
    }
    let dim = 1usize << l;
    let mut entries = Mat::<f64>::zeros(dim, dim);
    for s in 0..dim as u32 {
        entries[(s as usize, s as usize)] += field_energy(params, s);
        for j in 0..l {
            let (amp, t) = bond_action(params, s, j);
            entries[(t as usize, s as usize)] += amp;
        }
    }
    Ok(DenseOperator { l, dim, entries })
}

#[derive(Debug, Clone)]
pub struct ParitySector {
    pub parity: Parity,
    pub indices: Vec<SpinBasisIndex>,
    pub block: Mat<f64>,
}

impl ParitySector {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        dense_eigenvalues(&self.block)
    }
}

/// Splits `op` into its odd- and even-`M` blocks, in that order.
pub fn parity_sectors(op: &DenseOperator) -> Result<(ParitySector, ParitySector)> {
    let l = op.l;
    let (odd, even): (Vec<SpinBasisIndex>, Vec<SpinBasisIndex>) = (0..op.dim as u32)
        .map(SpinBasisIndex)
        .partition(|s| s.fermion_parity(l) == Parity::Odd);

    let mut residual = 0.0f64;
    for a in &odd {
        for b in &even {
            let (i, j) = (a.0 as usize, b.0 as usize);
            residual = residual.max(op.entries[(i, j)].abs()).max(op.entries[(j, i)].abs());
        }
    }
    if residual > 1e-14 {
        return Err(Error::Consistency(format!(
            "parity sectors couple with residual {residual:e}"
        )));
    }

    let restrict = |idx: &[SpinBasisIndex]| {
        Mat::<f64>::from_fn(idx.len(), idx.len(), |i, j| {
            op.entries[(idx[i].0 as usize, idx[j].0 as usize)]
        })
    };
    let odd_block = restrict(&odd);
    let even_block = restrict(&even);
    Ok((
        ParitySector { parity: Parity::Odd, indices: odd, block: odd_block },
        ParitySector { parity: Parity::Even, indices: even, block: even_block },
    ))
}

fn eigensolver_error(dim: usize, fro: f64, e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver {
        dim,
        reason: format!("{e:?} (Frobenius norm {fro:.6e})"),
    }
}

/// All eigenvalues of a real square matrix, sorted by `(Re, Im)`.
pub fn dense_eigenvalues(m: &Mat<f64>) -> Result<Vec<Complex64>> {
    let dim = m.nrows();
    if dim > EIGEN_DIM_CAP {
        return Err(Error::Capacity { what: "dense eigensolver dimension", cap: EIGEN_DIM_CAP, l: dim });
    }
    let mut ev = m.eigenvalues().map_err(|e| eigensolver_error(dim, m.norm_l2(), e))?;
    sort_lex(&mut ev);
    Ok(ev)
}

fn dense_complex_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    m.eigenvalues().map_err(|e| eigensolver_error(dim, m.norm_l2(), e))
}

/// Translation orbits of one parity sector.
struct Orbits {
    l: usize,
    /// For every basis state: (index of its representative in `reps`, shift m
    /// with state = T^m rep). `u32::MAX` outside the sector.
    lookup: Vec<(u32, u32)>,
    /// Representative state and orbit period.
    reps: Vec<(u32, usize)>,
}

fn rotate(s: u32, l: usize) -> u32 {
    let mask = (1u32 << l) - 1;
    ((s << 1) | (s >> (l - 1))) & mask
}

impl Orbits {
    fn new(l: usize, parity: Parity) -> Self {
        let dim = 1usize << l;
        let mut lookup = vec![(u32::MAX, 0u32); dim];
        let mut reps = Vec::new();
        for s in 0..dim as u32 {
            if SpinBasisIndex(s).fermion_parity(l) != parity || lookup[s as usize].0 != u32::MAX {
                continue;
            }
            // s is the smallest member of a fresh orbit
            let id = reps.len() as u32;
            let mut t = s;
            let mut m = 0u32;
            loop {
                if lookup[t as usize].0 == u32::MAX {
                    lookup[t as usize] = (id, m);
                }
                t = rotate(t, l);
                m += 1;
                if t == s {
                    break;
                }
            }
            reps.push((s, m as usize));
        }
        Orbits { l, lookup, reps }
    }
}

/// Block of the Hamiltonian at crystal momentum `2πk/L` within a parity sector.
#[derive(Debug, Clone)]
pub struct MomentumBlock {
    pub parity: Parity,
    pub k: usize,
    pub matrix: Mat<Complex64>,
}

fn momentum_block(params: &ModelParams, orbits: &Orbits, parity: Parity, k: usize) -> MomentumBlock {
    let l = orbits.l;
    let compatible = |period: usize| (k * period).is_multiple_of(l);
    let mut index = vec![usize::MAX; orbits.reps.len()];
    let mut n = 0;
    for (i, &(_, period)) in orbits.reps.iter().enumerate() {
        if compatible(period) {
            index[i] = n;
            n += 1;
        }
    }
    let kq = 2.0 * PI * k as f64 / l as f64;
    let mut matrix = Mat::<Complex64>::zeros(n, n);
    for (i, &(r, period)) in orbits.reps.iter().enumerate() {
        let col = index[i];
        if col == usize::MAX {
            continue;
        }
        matrix[(col, col)] += field_energy(params, r);
        for j in 0..l {
            let (amp, t) = bond_action(params, r, j);
            let (rid, m) = orbits.lookup[t as usize];
            let row = index[rid as usize];
            if row == usize::MAX {
                continue;
            }
            let ratio = (period as f64 / orbits.reps[rid as usize].1 as f64).sqrt();
            let phase = Complex64::from_polar(1.0, kq * m as f64);
            matrix[(row, col)] += amp * ratio * phase;
        }
    }
    MomentumBlock { parity, k, matrix }
}

/// Momentum blocks `k = 0..L` of one parity sector.
pub fn momentum_blocks(params: &ModelParams, parity: Parity) -> Result<Vec<MomentumBlock>> {
    let l = params.len();
    if l > MOMENTUM_CAP {
        return Err(Error::Capacity { what: "momentum-resolved ED", cap: MOMENTUM_CAP, l });
    }
    let orbits = Orbits::new(l, parity);
    Ok((0..l).map(|k| momentum_block(params, &orbits, parity, k)).collect())
}

/// Eigenvalues of one parity sector, solved block by block in momentum space.
pub fn sector_spectrum(params: &ModelParams, parity: Parity) -> Result<Vec<Complex64>> {
    let blocks = momentum_blocks(params, parity)?;
    let parts = blocks
        .par_iter()
        .map(|b| dense_complex_eigenvalues(&b.matrix))
        .collect::<Result<Vec<_>>>()?;
    let mut ev: Vec<Complex64> = parts.into_iter().flatten().collect();
    sort_lex(&mut ev);
    Ok(ev)
}

/// ED eigenvalues resolved by fermion parity.
#[derive(Debug, Clone)]
pub struct EdSpectrum {
    pub odd: Vec<Complex64>,
    pub even: Vec<Complex64>,
}

impl EdSpectrum {
    pub fn all(&self) -> Vec<Complex64> {
        let mut ev: Vec<Complex64> = self.odd.iter().chain(&self.even).copied().collect();
        sort_lex(&mut ev);
        ev
    }

    pub fn sector(&self, parity: Parity) -> &[Complex64] {
        match parity {
            Parity::Odd => &self.odd,
            Parity::Even => &self.even,
        }
    }
}

/// Full ED spectrum via the momentum-resolved solver.
pub fn ed_spectrum(params: &ModelParams) -> Result<EdSpectrum> {
    let (odd, even) = rayon::join(
        || sector_spectrum(params, Parity::Odd),
        || sector_spectrum(params, Parity::Even),
    );
    Ok(EdSpectrum { odd: odd?, even: even? })
}

/// Full ED spectrum via dense solves of the two parity blocks.
pub fn ed_spectrum_dense(params: &ModelParams) -> Result<EdSpectrum> {
    let op = build_hamiltonian(params)?;
    let (odd, even) = parity_sectors(&op)?;
    Ok(EdSpectrum { odd: odd.eigenvalues()?, even: even.eigenvalues()? })
}

/// Lowest eigenvalue by real part; among real parts within `tol` of the
/// minimum, the one with the smallest imaginary part.
pub fn lowest_eigenvalue(values: &[Complex64], tol: f64) -> Option<Complex64> {
    let min_re = values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    values
        .iter()
        .filter(|z| z.re - min_re <= tol)
        .copied()
        .min_by(|a, b| a.im.total_cmp(&b.im))
}
