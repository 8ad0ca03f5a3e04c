//! Qubit states and their evolution under the channel: Bloch vectors,
//! density matrices, the dynamical map, populations, coherence, trace
//! distance, the relative-purity angle, and 2×2 matrix norms of ρ̇.
//!
//! The map acts entrywise through the amplitude `k(t)`:
//! `ρ₁₁(t) = ρ₁₁|k|²`, `ρ₁₂(t) = ρ₁₂ k`, `ρ₂₂(t) = 1 - ρ₁₁|k|²`, which is
//! completely positive and trace preserving for every `t ≥ 0`.

use num_complex::Complex64;

use crate::error::Error;
use crate::model::ModelParams;
use crate::Result;

const HERMITICITY_TOL: f64 = 1e-12;

/// Bloch vector (r_x, r_y, r_z) of a qubit state, |r| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    rx: f64,
    ry: f64,
    rz: f64,
}

impl BlochState {
    /// Rejects vectors with |r| > 1 + 1e-9.
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let norm2 = rx * rx + ry * ry + rz * rz;
        if !norm2.is_finite() || norm2 > 1.0 + 1e-9 {
            return Err(Error::UnphysicalState {
                norm: norm2.sqrt(),
            });
        }
        Ok(BlochState { rx, ry, rz })
    }

    pub fn rx(&self) -> f64 {
        self.rx
    }

    pub fn ry(&self) -> f64 {
        self.ry
    }

    pub fn rz(&self) -> f64 {
        self.rz
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    /// `C(ρ) = √(r_x² + r_y²)`, the l₁ coherence of the corresponding state.
    pub fn coherence(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry).sqrt()
    }

    /// True when this is the ground state (0, 0, -1), the unique stationary
    /// pure state of the channel.
    pub fn is_ground(&self) -> bool {
        self.rx * self.rx + self.ry * self.ry < 1e-24 && (self.rz + 1.0).abs() < 1e-12
    }
}

/// 2×2 density matrix in the {|e⟩, |g⟩} basis.
///
/// Invariants enforced at construction: Hermitian, unit trace, and
/// nonnegative eigenvalues, each within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let rho = DensityMatrix { m: entries };
        rho.check_invariants(HERMITICITY_TOL)?;
        Ok(rho)
    }

    /// Construction without invariant checks, for trusted numerical paths
    /// (integrator output, the dynamical map). Use [`DensityMatrix::new`]
    /// for anything user-facing.
    pub fn from_entries_unchecked(entries: [[Complex64; 2]; 2]) -> Self {
        DensityMatrix { m: entries }
    }

    /// `ρ = ½(I + r·σ)`: ρ₁₁ = (1+r_z)/2, ρ₁₂ = (r_x - i r_y)/2.
    pub fn from_bloch(b: &BlochState) -> Self {
        let off = Complex64::new(0.5 * b.rx(), -0.5 * b.ry());
        DensityMatrix {
            m: [
                [Complex64::new(0.5 * (1.0 + b.rz()), 0.0), off],
                [off.conj(), Complex64::new(0.5 * (1.0 - b.rz()), 0.0)],
            ],
        }
    }

    /// Excited state |e⟩⟨e| = diag(1, 0).
    pub fn excited() -> Self {
        DensityMatrix {
            m: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
        }
    }

    /// Ground state |g⟩⟨g| = diag(0, 1).
    pub fn ground() -> Self {
        DensityMatrix {
            m: [
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    /// Bloch vector of this state.
    pub fn bloch(&self) -> BlochState {
        BlochState {
            rx: 2.0 * self.m[0][1].re,
            ry: -2.0 * self.m[0][1].im,
            rz: (self.m[0][0] - self.m[1][1]).re,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// `tr[self · other]`.
    pub fn trace_product(&self, other: &DensityMatrix) -> Complex64 {
        self.m[0][0] * other.m[0][0]
            + self.m[0][1] * other.m[1][0]
            + self.m[1][0] * other.m[0][1]
            + self.m[1][1] * other.m[1][1]
    }

    /// Purity `tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.trace_product(self).re
    }

    /// Eigenvalues of the Hermitian matrix, descending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.m)
    }

    /// Validates Hermiticity, unit trace, and positivity within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let herm = (self.m[0][1] - self.m[1][0].conj()).norm();
        if herm > tol || self.m[0][0].im.abs() > tol || self.m[1][1].im.abs() > tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian within {tol:e} (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} differs from 1 beyond {tol:e}",
                tr.re
            )));
        }
        let (_, lo) = self.eigenvalues();
        if lo < -tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lo:e} beyond -{tol:e}"
            )));
        }
        Ok(())
    }
}

fn hermitian_eigenvalues(m: &[[Complex64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0].re + m[1][1].re);
    let half_diff = 0.5 * (m[0][0].re - m[1][1].re);
    let r = (half_diff * half_diff + m[0][1].norm_sqr()).sqrt();
    (mean + r, mean - r)
}

/// Image of `rho0` under the dynamical map at time `t`.
pub fn evolve(p: &ModelParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let s = p.amplitude_raw(t);
    Ok(apply_map(rho0, s.k))
}

pub(crate) fn apply_map(rho0: &DensityMatrix, k: Complex64) -> DensityMatrix {
    let m2 = k.norm_sqr();
    let ee = rho0.entry(0, 0).re * m2;
    let off = rho0.entry(0, 1) * k;
    DensityMatrix::from_entries_unchecked([
        [Complex64::new(ee, 0.0), off],
        [off.conj(), Complex64::new(1.0 - ee, 0.0)],
    ])
}

/// Excited-state population `P_t = ρ₁₁(0) |k(t)|²`.
pub fn population(p: &ModelParams, rho0: &DensityMatrix, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(rho0.entry(0, 0).re * p.amplitude_raw(t).population_factor())
}

/// l₁ coherence `C(ρ) = 2|ρ₁₂| = √(r_x² + r_y²)`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    2.0 * rho.entry(0, 1).norm()
}

/// Trace distance `D = ½ ||a - b||_tr`, from the eigenvalues of the
/// Hermitian difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = [
        [a.entry(0, 0) - b.entry(0, 0), a.entry(0, 1) - b.entry(0, 1)],
        [a.entry(1, 0) - b.entry(1, 0), a.entry(1, 1) - b.entry(1, 1)],
    ];
    let (hi, lo) = hermitian_eigenvalues(&d);
    0.5 * (hi.abs() + lo.abs())
}

/// Relative-purity angle `Θ = arccos √(tr[ρ₀ρ_t] / tr[ρ₀²])`.
///
/// The arccos argument is clamped to [0, 1]: rounding can push the ratio
/// marginally above 1 as t → 0, and Θ must stay real with Θ(ρ₀, ρ₀) = 0.
pub fn relative_purity_angle(rho0: &DensityMatrix, rhot: &DensityMatrix) -> f64 {
    let p0 = rho0.purity();
    let overlap = rho0.trace_product(rhot).re;
    let ratio = (overlap / p0).clamp(0.0, 1.0);
    ratio.sqrt().acos()
}

/// Hermitian traceless time derivative of the evolved state, in closed form:
/// `ρ̇₁₁ = ρ₁₁(0) · 2Re(k* k̇)`, `ρ̇₁₂ = ρ₁₂(0) · k̇`.
///
/// Computed analytically from (k, k̇) rather than by differencing so that
/// the Φ integrands stay smooth between kinks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixDerivative {
    m: [[Complex64; 2]; 2],
}

impl MatrixDerivative {
    /// Validates Hermiticity and tracelessness (within 1e-12, scaled by the
    /// magnitude of the entries).
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let scale = entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        let tol = HERMITICITY_TOL * scale;
        let herm = (entries[0][1] - entries[1][0].conj()).norm();
        if herm > tol || entries[0][0].im.abs() > tol || entries[1][1].im.abs() > tol {
            return Err(Error::InvalidMatrixDerivative(format!(
                "not Hermitian within {tol:e}"
            )));
        }
        let tr = entries[0][0] + entries[1][1];
        if tr.norm() > tol {
            return Err(Error::InvalidMatrixDerivative(format!(
                "trace {tr} not zero within {tol:e}"
            )));
        }
        Ok(MatrixDerivative { m: entries })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn zero() -> Self {
        MatrixDerivative {
            m: [[Complex64::new(0.0, 0.0); 2]; 2],
        }
    }
}

/// ρ̇(t) for the state evolved from `rho0`.
pub fn drho_dt(p: &ModelParams, rho0: &DensityMatrix, t: f64) -> Result<MatrixDerivative> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(drho_dt_raw(p, rho0, t))
}

pub(crate) fn drho_dt_raw(p: &ModelParams, rho0: &DensityMatrix, t: f64) -> MatrixDerivative {
    let s = p.amplitude_raw(t);
    let diag = rho0.entry(0, 0).re * s.population_rate();
    let off = rho0.entry(0, 1) * s.kdot;
    MatrixDerivative {
        m: [
            [Complex64::new(diag, 0.0), off],
            [off.conj(), Complex64::new(-diag, 0.0)],
        ],
    }
}

/// Operator, trace, and Hilbert-Schmidt norms of a Hermitian 2×2 matrix.
///
/// For Hermitian input the singular values are |eigenvalues|, available in
/// closed form; a generic solver is only used as a test oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

/// Norms of a Hermitian matrix derivative.
pub fn norms_2x2(m: &MatrixDerivative) -> MatrixNorms {
    let (e1, e2) = hermitian_eigenvalues(&m.m);
    let (a1, a2) = (e1.abs(), e2.abs());
    MatrixNorms {
        op: a1.max(a2),
        tr: a1 + a2,
        hs: (a1 * a1 + a2 * a2).sqrt(),
    }
}
