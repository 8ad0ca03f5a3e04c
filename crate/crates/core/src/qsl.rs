//! Relative-purity quantum-speed-limit times.
//!
//! The bound used is the tightest (operator-norm) one:
//! `τ_QSL = sin²Θ(ρ₀, ρ_τ) · tr[ρ₀²] / Φ_τ^op` with
//! `Φ_τ^x = (1/τ)∫₀^τ ||ρ̇(t)||_x dt`. The numerator is evaluated in the
//! algebraically equal form `tr[ρ₀²] - tr[ρ₀ρ_τ]`, which avoids the
//! sin²(arccos √·) round trip near Θ → 0. Since
//! `|tr[ρ₀ ρ̇]| ≤ ||ρ₀||_tr ||ρ̇||_op = ||ρ̇||_op`, the bound τ_QSL ≤ τ
//! holds for every input.
//!
//! Two routes are provided and must agree: [`qsl_time`] goes through the
//! density-matrix machinery (traces, matrix norms), while
//! [`qsl_closed_form`] uses the Bloch-parameterized closed form
//!
//! ```text
//! numerator   = ½ [ r_z(1+r_z)(1-|k(τ)|²) + (r_x²+r_y²)(1-Re k(τ)) ]
//! integrand   = ½ √( 4(1+r_z)² Re(k* k̇)² + (r_x²+r_y²) |k̇|² )
//! ```
//!
//! which stays valid for complex `k` (detuned channel). The resonance-only
//! variant [`qsl_closed_form_resonant`] keeps the literal real-`k` form for
//! cross-checks at δ = 0, where `k` is real and both reduce to it.

use rayon::prelude::*;

use crate::dynamics::{
    drho_dt_raw, evolve, norms_2x2, population, relative_purity_angle, BlochState, DensityMatrix,
};
use crate::error::Error;
use crate::model::ModelParams;
use crate::nonmarkov::{non_markovianity, witness_roots, Horizon};
use crate::numerics::{simpson_adaptive, QuadratureOptions};
use crate::Result;

/// Time-averaged norms of ρ̇ over the driving window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiNorms {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

/// QSL time and the quantities it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslResult {
    pub tau_qsl: f64,
    /// Actual driving time.
    pub tau: f64,
    /// `tau_qsl / tau`; 1 means the bound is saturated, < 1 means there is
    /// room for speedup.
    pub ratio: f64,
    pub phi_op: f64,
    pub phi_tr: f64,
    pub phi_hs: f64,
    /// Relative-purity angle Θ(ρ₀, ρ_τ).
    pub theta: f64,
    /// Set when the initial state is the stationary |g⟩⟨g|; the formula is
    /// then 0/0 and τ_QSL is defined to be 0.
    pub stationary: bool,
}

impl QslResult {
    fn stationary(tau: f64) -> Self {
        QslResult {
            tau_qsl: 0.0,
            tau,
            ratio: 0.0,
            phi_op: 0.0,
            phi_tr: 0.0,
            phi_hs: 0.0,
            theta: 0.0,
            stationary: true,
        }
    }
}

/// Initial state given by coherence and excited-population component:
/// `c0 = C(ρ₀) = √(r_x²+r_y²)`, `sz0 = ⟨σ_z⟩₀ = r_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceParams {
    c0: f64,
    sz0: f64,
}

impl CoherenceParams {
    pub fn new(c0: f64, sz0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0) {
            return Err(Error::InvalidParams(format!(
                "coherence c0 must lie in [0, 1], got {c0}"
            )));
        }
        if !(-1.0..=1.0).contains(&sz0) {
            return Err(Error::InvalidParams(format!(
                "population component sz0 must lie in [-1, 1], got {sz0}"
            )));
        }
        if c0 * c0 + sz0 * sz0 > 1.0 + 1e-12 {
            return Err(Error::UnphysicalState {
                norm: (c0 * c0 + sz0 * sz0).sqrt(),
            });
        }
        Ok(CoherenceParams { c0, sz0 })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn sz0(&self) -> f64 {
        self.sz0
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::NonPositiveTau(tau));
    }
    Ok(())
}

/// `Φ_τ^op ≤ Φ_τ^hs ≤ Φ_τ^tr`, each `(1/τ)∫₀^τ ||ρ̇||_x dt`.
///
/// The integrand has kinks where the witness changes sign (and nowhere
/// else), so Simpson panels are split at the witness roots.
pub fn phi_norms(p: &ModelParams, b: &BlochState, tau: f64) -> Result<PhiNorms> {
    check_tau(tau)?;
    if b.is_ground() {
        return Ok(PhiNorms {
            op: 0.0,
            tr: 0.0,
            hs: 0.0,
        });
    }
    let rho0 = DensityMatrix::from_bloch(b);
    let breaks = witness_roots(p, tau)?;
    let opts = QuadratureOptions::default();
    let [iop, itr, ihs] = simpson_adaptive(
        |t| {
            let n = norms_2x2(&drho_dt_raw(p, &rho0, t));
            [n.op, n.tr, n.hs]
        },
        0.0,
        tau,
        &breaks,
        &opts,
    )?;
    Ok(PhiNorms {
        op: iop / tau,
        tr: itr / tau,
        hs: ihs / tau,
    })
}

/// QSL time via the general route: matrix traces for the numerator and
/// [`phi_norms`] for the denominator.
pub fn qsl_time(p: &ModelParams, b: &BlochState, tau: f64) -> Result<QslResult> {
    check_tau(tau)?;
    if b.is_ground() {
        return Ok(QslResult::stationary(tau));
    }
    let phi = phi_norms(p, b, tau)?;
    let rho0 = DensityMatrix::from_bloch(b);
    let rhot = evolve(p, &rho0, tau)?;
    let numerator = rho0.purity() - rho0.trace_product(&rhot).re;
    let theta = relative_purity_angle(&rho0, &rhot);
    let tau_qsl = numerator / phi.op;
    Ok(QslResult {
        tau_qsl,
        tau,
        ratio: tau_qsl / tau,
        phi_op: phi.op,
        phi_tr: phi.tr,
        phi_hs: phi.hs,
        theta,
        stationary: false,
    })
}

fn theta_from_bloch(b: &BlochState, numerator: f64) -> f64 {
    let tr00 = 0.5 * (1.0 + b.norm() * b.norm());
    ((tr00 - numerator) / tr00).clamp(0.0, 1.0).sqrt().acos()
}

/// QSL time via the Bloch closed form (complex-safe numerator and
/// integrand). Agrees with [`qsl_time`] to quadrature tolerance for all
/// parameters, including off resonance.
///
/// `phi_tr` and `phi_hs` are filled from the channel identities
/// `Φ_tr = 2 Φ_op`, `Φ_hs = √2 Φ_op` (the independently computed versions
/// live in [`phi_norms`]).
pub fn qsl_closed_form(p: &ModelParams, b: &BlochState, tau: f64) -> Result<QslResult> {
    check_tau(tau)?;
    if b.is_ground() {
        return Ok(QslResult::stationary(tau));
    }
    let c0sq = b.rx() * b.rx() + b.ry() * b.ry();
    let rz = b.rz();
    let breaks = witness_roots(p, tau)?;
    let opts = QuadratureOptions::default();
    let [integral] = simpson_adaptive(
        |t| {
            let s = p.amplitude_raw(t);
            let w = (s.k.conj() * s.kdot).re;
            [0.5
                * (4.0 * (1.0 + rz) * (1.0 + rz) * w * w + c0sq * s.kdot.norm_sqr()).sqrt()]
        },
        0.0,
        tau,
        &breaks,
        &opts,
    )?;
    let phi_op = integral / tau;
    let ktau = p.amplitude_raw(tau).k;
    let numerator =
        0.5 * (rz * (1.0 + rz) * (1.0 - ktau.norm_sqr()) + c0sq * (1.0 - ktau.re));
    let tau_qsl = numerator / phi_op;
    Ok(QslResult {
        tau_qsl,
        tau,
        ratio: tau_qsl / tau,
        phi_op,
        phi_tr: 2.0 * phi_op,
        phi_hs: std::f64::consts::SQRT_2 * phi_op,
        theta: theta_from_bloch(b, numerator),
        stationary: false,
    })
}

/// The literal resonance-only Bloch form, which treats `k` as real:
///
/// ```text
/// τ_QSL = (1-k(τ))[r_x²+r_y²+r_z(1+r_z)(1+k(τ))]
///         / (1/τ)∫₀^τ |k̇ √(r_x²+r_y²+4k²(1+r_z)²)| dt
/// ```
///
/// Valid only at δ = 0 (both numerator and integrand are twice their
/// complex-safe counterparts there, so the ratio is unchanged). Kept as a
/// compatibility cross-check; use [`qsl_closed_form`] off resonance.
pub fn qsl_closed_form_resonant(p: &ModelParams, b: &BlochState, tau: f64) -> Result<QslResult> {
    check_tau(tau)?;
    if b.is_ground() {
        return Ok(QslResult::stationary(tau));
    }
    let c0sq = b.rx() * b.rx() + b.ry() * b.ry();
    let rz = b.rz();
    let breaks = witness_roots(p, tau)?;
    let opts = QuadratureOptions::default();
    let [integral] = simpson_adaptive(
        |t| {
            let s = p.amplitude_raw(t);
            let k = s.k.re;
            let kd = s.kdot.re;
            [(kd * (c0sq + 4.0 * k * k * (1.0 + rz) * (1.0 + rz)).sqrt()).abs()]
        },
        0.0,
        tau,
        &breaks,
        &opts,
    )?;
    let phi = integral / tau;
    let ktau = p.amplitude_raw(tau).k.re;
    let numerator = (1.0 - ktau) * (c0sq + rz * (1.0 + rz) * (1.0 + ktau));
    let tau_qsl = numerator / phi;
    Ok(QslResult {
        tau_qsl,
        tau,
        ratio: tau_qsl / tau,
        phi_op: 0.5 * phi,
        phi_tr: phi,
        phi_hs: std::f64::consts::FRAC_1_SQRT_2 * phi,
        theta: theta_from_bloch(b, 0.5 * numerator),
        stationary: false,
    })
}

/// QSL time from the coherence parameterization: identical to
/// [`qsl_closed_form`] with any (r_x, r_y) of magnitude `c0` and
/// `r_z = sz0`; the result is independent of the coherence phase.
pub fn qsl_from_coherence(p: &ModelParams, cp: &CoherenceParams, tau: f64) -> Result<QslResult> {
    let b = BlochState::new(cp.c0(), 0.0, cp.sz0())?;
    qsl_closed_form(p, &b, tau)
}

/// One δ-sweep sample: QSL result plus the excited population and
/// back-flow measure at that detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPoint {
    pub delta: f64,
    pub qsl: QslResult,
    pub p_tau: f64,
    pub n_value: f64,
}

/// Sweep the detuning at fixed λ. The back-flow measure is computed with
/// `nm_horizon` (pass `Horizon::Fixed(tau)` for back-flow during the
/// driving window).
pub fn sweep_delta(
    p: &ModelParams,
    deltas: &[f64],
    b: &BlochState,
    tau: f64,
    nm_horizon: Horizon,
) -> Result<Vec<DeltaPoint>> {
    check_tau(tau)?;
    if deltas.is_empty() {
        return Err(Error::EmptyGrid("delta sweep needs at least one point".into()));
    }
    let rho0 = DensityMatrix::from_bloch(b);
    deltas
        .par_iter()
        .map(|delta| {
            let params = p.with_delta(*delta)?;
            Ok(DeltaPoint {
                delta: *delta,
                qsl: qsl_time(&params, b, tau)?,
                p_tau: population(&params, &rho0, tau)?,
                n_value: non_markovianity(&params, nm_horizon)?.n_value,
            })
        })
        .collect()
}

/// One τ-sweep sample. `n_value` is the back-flow accumulated up to that τ.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPoint {
    pub tau: f64,
    pub qsl: QslResult,
    pub p_tau: f64,
    pub n_value: f64,
}

/// Sweep the driving time.
pub fn sweep_tau(p: &ModelParams, b: &BlochState, taus: &[f64]) -> Result<Vec<TauPoint>> {
    if taus.is_empty() {
        return Err(Error::EmptyGrid("tau sweep needs at least one point".into()));
    }
    let rho0 = DensityMatrix::from_bloch(b);
    taus.par_iter()
        .map(|tau| {
            check_tau(*tau)?;
            Ok(TauPoint {
                tau: *tau,
                qsl: qsl_time(p, b, *tau)?,
                p_tau: population(p, &rho0, *tau)?,
                n_value: non_markovianity(p, Horizon::Fixed(*tau))?.n_value,
            })
        })
        .collect()
}

/// One coherence-sweep sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherencePoint {
    pub c0: f64,
    pub qsl: QslResult,
}

/// Sweep the initial coherence at fixed `sz0`.
pub fn sweep_coherence(
    p: &ModelParams,
    sz0: f64,
    tau: f64,
    c0s: &[f64],
) -> Result<Vec<CoherencePoint>> {
    check_tau(tau)?;
    if c0s.is_empty() {
        return Err(Error::EmptyGrid(
            "coherence sweep needs at least one point".into(),
        ));
    }
    c0s.par_iter()
        .map(|c0| {
            let cp = CoherenceParams::new(*c0, sz0)?;
            Ok(CoherencePoint {
                c0: *c0,
                qsl: qsl_from_coherence(p, &cp, tau)?,
            })
        })
        .collect()
}
