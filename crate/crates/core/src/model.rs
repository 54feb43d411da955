//! Model parameters, momentum bookkeeping, dispersion and phase logic.
//!
//! The spin chain is
//!
//! ```text
//! H = Σ_j [ (1+γ)/2 σˣσˣ + (1−γ)/2 σʸσʸ + iδ/2 (σˣσʸ + σʸσˣ) ]_{j,j+1} − h Σ_j σᶻ_j
//! ```
//!
//! on a ring of `L` sites. After the Jordan–Wigner mapping the pairing
//! amplitudes are `Δα = γ + δ` (creation) and `Δβ = γ − δ` (annihilation),
//! and the boundary condition of the fermions depends on the parity of the
//! fermion number: periodic for odd `M`, antiperiodic for even `M`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `|h| − 1` for the critical line.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Couplings of the chain plus its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    l: usize,
    gamma: f64,
    delta: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(l: usize, gamma: f64, delta: f64, h: f64) -> Result<Self> {
        if l < 3 {
            return Err(Error::Parameter(format!("ring needs L >= 3, got L = {l}")));
        }
        for (name, v) in [("gamma", gamma), ("delta", delta), ("h", h)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self { l, gamma, delta, h })
    }

    /// Same couplings on a ring of a different length.
    pub fn with_length(&self, l: usize) -> Result<Self> {
        Self::new(l, self.gamma, self.delta, self.h)
    }

    /// Same couplings and length with a different field.
    pub fn with_field(&self, h: f64) -> Result<Self> {
        Self::new(self.l, self.gamma, self.delta, h)
    }

    /// Number of sites.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.l
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Creation-pair amplitude `γ + δ`.
    pub fn delta_alpha(&self) -> f64 {
        self.gamma + self.delta
    }

    /// Annihilation-pair amplitude `γ − δ`.
    pub fn delta_beta(&self) -> f64 {
        self.gamma - self.delta
    }

    /// `ΔαΔβ = γ² − δ²`, the only combination entering the dispersion.
    pub fn gap_product(&self) -> f64 {
        self.delta_alpha() * self.delta_beta()
    }

    pub fn site_parity(&self) -> Parity {
        Parity::of(self.l)
    }

    /// The two channels (odd then even fermion parity) for this ring length.
    pub fn channels(&self) -> [Channel; 2] {
        Channel::for_length(self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Site parity of the ring combined with the fermion-number parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    pub site_parity: Parity,
    pub fermion_parity: Parity,
}

impl Channel {
    pub const ODD_ODD: Channel = Channel { site_parity: Parity::Odd, fermion_parity: Parity::Odd };
    pub const ODD_EVEN: Channel = Channel { site_parity: Parity::Odd, fermion_parity: Parity::Even };
    pub const EVEN_ODD: Channel = Channel { site_parity: Parity::Even, fermion_parity: Parity::Odd };
    pub const EVEN_EVEN: Channel =
        Channel { site_parity: Parity::Even, fermion_parity: Parity::Even };

    pub const ALL: [Channel; 4] =
        [Self::ODD_ODD, Self::ODD_EVEN, Self::EVEN_ODD, Self::EVEN_EVEN];

    pub fn for_length(l: usize) -> [Channel; 2] {
        let site_parity = Parity::of(l);
        [
            Channel { site_parity, fermion_parity: Parity::Odd },
            Channel { site_parity, fermion_parity: Parity::Even },
        ]
    }

    /// Odd fermion number gives periodic fermions.
    pub fn is_periodic(&self) -> bool {
        self.fermion_parity == Parity::Odd
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.site_parity {
            Parity::Odd => 'O',
            Parity::Even => 'E',
        };
        let m = match self.fermion_parity {
            Parity::Odd => 'o',
            Parity::Even => 'e',
        };
        write!(f, "({s},{m})")
    }
}

/// Allowed wave numbers of one channel.
///
/// Every momentum is stored as an integer numerator `m` with `q = mπ/L`, so
/// that `±q` pairs are exact negatives of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub channel: Channel,
    pub l: usize,
    pub numerators: Vec<i64>,
    pub values: Vec<f64>,
    pub has_zero: bool,
    pub has_pi: bool,
    /// Positive momenta `0 < q < π` whose partner `−q` is also on the grid.
    pub paired: Vec<f64>,
}

fn numerator_to_q(m: i64, l: usize) -> f64 {
    if m == 0 {
        0.0
    } else if m == l as i64 {
        PI
    } else {
        m as f64 * PI / l as f64
    }
}

/// Momentum grid of `channel` on a ring of `l` sites.
pub fn momentum_grid(l: usize, channel: Channel) -> Result<MomentumGrid> {
    if l < 3 {
        return Err(Error::Parameter(format!("ring needs L >= 3, got L = {l}")));
    }
    if Parity::of(l) != channel.site_parity {
        return Err(Error::Parameter(format!(
            "channel {channel} does not match L = {l}"
        )));
    }
    let li = l as i64;
    // q = mπ/L with m even (periodic) or odd (antiperiodic), restricted to (−π, π].
    let start = if channel.is_periodic() { 0 } else { 1 };
    let numerators: Vec<i64> = (-li + 1..=li)
        .filter(|m| (m - start).rem_euclid(2) == 0)
        .collect();
    debug_assert_eq!(numerators.len(), l);
    let values = numerators.iter().map(|&m| numerator_to_q(m, l)).collect();
    let paired = numerators
        .iter()
        .filter(|&&m| m > 0 && m < li)
        .map(|&m| numerator_to_q(m, l))
        .collect();
    Ok(MomentumGrid {
        channel,
        l,
        has_zero: numerators.contains(&0),
        has_pi: numerators.contains(&li),
        numerators,
        values,
        paired,
    })
}

/// `f(q) = (cos q − h)² + ΔαΔβ sin² q`; the dispersion is real where `f ≥ 0`.
pub fn reality_function(params: &ModelParams, q: f64) -> f64 {
    let c = q.cos() - params.h;
    let s = q.sin();
    c * c + params.gap_product() * s * s
}

/// Quasiparticle dispersion `ω(q) = √f(q)`, taken on the `+i` branch when `f < 0`.
pub fn omega(params: &ModelParams, q: f64) -> Complex64 {
    sqrt_real(reality_function(params, q))
}

pub(crate) fn sqrt_real(f: f64) -> Complex64 {
    if f >= 0.0 {
        Complex64::new(f.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-f).sqrt())
    }
}

/// Minimum of `f(q)` over the Brillouin zone, evaluated in closed form.
pub fn f_min(params: &ModelParams) -> f64 {
    let p = params.gap_product();
    let h = params.h;
    let at_zero = (1.0 - h) * (1.0 - h);
    let at_pi = (1.0 + h) * (1.0 + h);
    let mut best = at_zero.min(at_pi);
    if p != 1.0 {
        let c = h / (1.0 - p);
        if c.abs() <= 1.0 {
            best = best.min(p * (p + h * h - 1.0) / (p - 1.0));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseKind {
    KinkPlus,
    KinkMinus,
    Critical,
    Paramagnetic,
    TBreaking,
}

impl PhaseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseKind::KinkPlus => "kink+",
            PhaseKind::KinkMinus => "kink-",
            PhaseKind::Critical => "critical",
            PhaseKind::Paramagnetic => "paramagnetic",
            PhaseKind::TBreaking => "t-breaking",
        }
    }

    /// True for the phases whose spectrum is entirely real.
    pub fn is_real(&self) -> bool {
        matches!(self, PhaseKind::KinkPlus | PhaseKind::KinkMinus | PhaseKind::Paramagnetic)
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub kind: PhaseKind,
    pub winding_hint: Option<i32>,
}

impl From<PhaseKind> for PhaseLabel {
    fn from(kind: PhaseKind) -> Self {
        let winding_hint = match kind {
            PhaseKind::KinkPlus => Some(1),
            PhaseKind::KinkMinus => Some(-1),
            PhaseKind::Paramagnetic => Some(0),
            PhaseKind::Critical | PhaseKind::TBreaking => None,
        };
        PhaseLabel { kind, winding_hint }
    }
}

/// Phase of the parameter point. The length of the ring plays no role.
pub fn classify_phase(params: &ModelParams) -> PhaseLabel {
    let (a, b) = (params.delta_alpha(), params.delta_beta());
    let p = a * b;
    let h = params.h.abs();
    let kind = if p > 0.0 && (h - 1.0).abs() <= CRITICAL_TOL {
        PhaseKind::Critical
    } else if a > 0.0 && b > 0.0 && h < 1.0 {
        PhaseKind::KinkPlus
    } else if a < 0.0 && b < 0.0 && h < 1.0 {
        PhaseKind::KinkMinus
    } else if p + h * h > 1.0 && h > 1.0 {
        PhaseKind::Paramagnetic
    } else {
        PhaseKind::TBreaking
    };
    kind.into()
}

/// Hermitian chain with both pairing amplitudes replaced by `√(ΔαΔβ)`.
pub fn hermitian_counterpart(params: &ModelParams) -> Result<ModelParams> {
    let p = params.gap_product();
    if p <= 0.0 {
        return Err(Error::Domain(format!(
            "geometric mean of the pairing amplitudes needs ΔαΔβ > 0, got {p}"
        )));
    }
    ModelParams::new(params.l, p.sqrt(), 0.0, params.h)
}
