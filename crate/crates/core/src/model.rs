//! Closed-form physics of the channel: Lorentzian spectral density,
//! environment correlation function, the excited-state survival amplitude
//! `k(t)` with its analytic derivative, and the time-dependent decay rate
//! `γ(t)`.
//!
//! # Amplitude sign convention
//!
//! With `a = (λ - iδ)/2` and `Ω = sqrt((λ - iδ)² - 2γλ)`, the amplitude is
//!
//! ```text
//! k(t) = e^{-a t} [ cosh(Ωt/2) + (2a/Ω) sinh(Ωt/2) ]
//! ```
//!
//! The **plus** sign in front of the sinh term is forced by the initial
//! condition of the memory-kernel equation `k̇(t) = -∫₀ᵗ f(t-t₁)k(t₁)dt₁`,
//! which requires `k̇(0) = 0`: the minus-sign variant gives
//! `k̇(0) = -(λ - iδ) ≠ 0` and breaks the decay-rate identity
//! `γ(t) = -2 Re(k̇/k)`. With the plus sign,
//! `k̇(t) = -(γλ/Ω) e^{-a t} sinh(Ωt/2)` exactly.
//!
//! Internally `k` is evaluated in the equivalent two-exponential form
//! `k = ½[(1+q) e^{(Ω/2 - a)t} + (1-q) e^{-(Ω/2 + a)t}]`, `q = 2a/Ω`; both
//! exponents have negative real part (`Re Ω < λ` holds for every valid
//! parameter set), so the evaluation cannot overflow at large `t` where the
//! naive cosh form does.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Complex rate, used for the pseudo-Rabi rate Ω.
pub type ComplexRate = Complex64;

/// Below `|Ω| t` of this size, cosh and sinh/Ω switch to 3-term Taylor
/// series to avoid 0/0 at the degenerate point Ω → 0.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `decay_rate` reports a pole instead of a finite value when its
/// denominator `Ω cosh(Ωt/2) + (λ-iδ) sinh(Ωt/2)` cancels below this
/// fraction of the magnitude of its terms. The denominator equals
/// `Ω k e^{(λ-iδ)t/2} e^{-Ωt/2}` up to a factor 2, so it vanishes exactly
/// at the zeros of `k` (the non-Markovian revival points where γ(t)
/// diverges) and nowhere else; in particular plain Markovian decay to
/// arbitrarily small `|k|` is not a pole. The value admits times within
/// ~2e-4/γ of a revival zero, comfortably covering the zeros' printed
/// 4-decimal precision.
pub const POLE_TOLERANCE: f64 = 1e-4;

/// The rate triple (γ, λ, δ) defining the channel.
///
/// γ (`gamma0`) is the qubit-environment coupling rate and fixes the time
/// unit; λ is the spectral width of the Lorentzian; δ is the detuning of the
/// qubit transition from the cavity center frequency (may be negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    gamma0: f64,
    lambda: f64,
    delta: f64,
}

impl ModelParams {
    pub fn new(gamma0: f64, lambda: f64, delta: f64) -> Result<Self> {
        if !gamma0.is_finite() || gamma0 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "coupling rate gamma must be positive and finite, got {gamma0}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "spectral width lambda must be positive and finite, got {lambda}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "detuning delta must be finite, got {delta}"
            )));
        }
        Ok(ModelParams {
            gamma0,
            lambda,
            delta,
        })
    }

    /// Resonant channel (δ = 0).
    pub fn resonant(gamma0: f64, lambda: f64) -> Result<Self> {
        ModelParams::new(gamma0, lambda, 0.0)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same channel with a different detuning.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        ModelParams::new(self.gamma0, self.lambda, delta)
    }

    /// Same channel with a different spectral width.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ModelParams::new(self.gamma0, lambda, self.delta)
    }

    /// `a = (λ - iδ)/2`, the complex half-rate of the kernel.
    fn half_rate(&self) -> Complex64 {
        Complex64::new(0.5 * self.lambda, -0.5 * self.delta)
    }

    /// Pseudo-Rabi rate `Ω = sqrt((λ - iδ)² - 2γλ)`, principal branch
    /// (`Re Ω >= 0`). All observable quantities are invariant under
    /// `Ω → -Ω`; the branch is fixed only for reproducibility.
    pub fn omega(&self) -> ComplexRate {
        let b = Complex64::new(self.lambda, -self.delta);
        (b * b - 2.0 * self.gamma0 * self.lambda).sqrt()
    }

    /// Amplitude `k(t)` and its analytic derivative. Rejects `t < 0`.
    pub fn amplitude(&self, t: f64) -> Result<AmplitudeSample> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.amplitude_raw(t))
    }

    /// Amplitude evaluated with a caller-supplied root of Ω², for branch
    /// invariance checks. `root` must square to `(λ-iδ)² - 2γλ`.
    pub fn amplitude_with_root(&self, t: f64, root: ComplexRate) -> Result<AmplitudeSample> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.amplitude_impl(t, root))
    }

    /// Infallible amplitude for internal consumers that have already
    /// validated their time domain.
    pub(crate) fn amplitude_raw(&self, t: f64) -> AmplitudeSample {
        self.amplitude_impl(t, self.omega())
    }

    fn amplitude_impl(&self, t: f64, omega: Complex64) -> AmplitudeSample {
        let a = self.half_rate();
        let gl = self.gamma0 * self.lambda;
        if omega.norm() * t < SERIES_THRESHOLD {
            let (k, kdot) = series_amplitude(a, gl, omega, t);
            AmplitudeSample { t, k, kdot }
        } else {
            let ep = ((omega * 0.5 - a) * t).exp();
            let em = ((-omega * 0.5 - a) * t).exp();
            let q = 2.0 * a / omega;
            let k = 0.5 * ((1.0 + q) * ep + (1.0 - q) * em);
            let kdot = -(gl / (2.0 * omega)) * (ep - em);
            AmplitudeSample { t, k, kdot }
        }
    }

    /// Time-dependent decay rate
    /// `γ(t) = Re[ 2γλ sinh(Ωt/2) / (Ω cosh(Ωt/2) + (λ-iδ) sinh(Ωt/2)) ]`.
    ///
    /// Negative values mark information back-flow. At zeros of `k(t)` the
    /// denominator vanishes; those times are reported as [`DecayRate::Pole`]
    /// rather than an infinity so consumers cannot propagate NaN silently.
    pub fn decay_rate(&self, t: f64) -> Result<DecayRate> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let omega = self.omega();
        let a = self.half_rate();
        let z = omega * t;
        let u = (-z).exp();
        // s = (1 - e^{-z})/Ω; series in z for small |z|
        let s = if z.norm() < SERIES_THRESHOLD {
            t * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0)
        } else {
            (1.0 - u) / omega
        };
        let num = 2.0 * self.gamma0 * self.lambda * s;
        let lead = 1.0 + u;
        let tail = 2.0 * a * s;
        let den = lead + tail;
        // cancellation of the denominator marks a zero of k
        if den.norm() < POLE_TOLERANCE * (lead.norm() + tail.norm()) {
            return Ok(DecayRate::Pole);
        }
        Ok(DecayRate::Finite((num / den).re))
    }

    /// Lorentzian spectral density
    /// `J(ω) = (1/2π) γλ² / ((ω₀ - ω - δ)² + λ²)`.
    ///
    /// `w0` is the qubit transition frequency; only the offset `w0 - w`
    /// matters.
    pub fn spectral_density(&self, w: f64, w0: f64) -> f64 {
        let x = w0 - w - self.delta;
        self.gamma0 * self.lambda * self.lambda
            / (2.0 * std::f64::consts::PI * (x * x + self.lambda * self.lambda))
    }

    /// Environment correlation function `f(Δt) = (γλ/2) e^{-(λ-iδ)Δt}`.
    /// Rejects `Δt < 0`.
    pub fn correlation_function(&self, dt: f64) -> Result<Complex64> {
        if dt.is_nan() || dt < 0.0 {
            return Err(Error::NegativeTime(dt));
        }
        let b = Complex64::new(self.lambda, -self.delta);
        Ok(0.5 * self.gamma0 * self.lambda * (-b * dt).exp())
    }
}

fn series_amplitude(
    a: Complex64,
    gl: f64,
    omega: Complex64,
    t: f64,
) -> (Complex64, Complex64) {
    let x = omega * (0.5 * t);
    let x2 = x * x;
    // sinh(Ωt/2)/Ω and cosh(Ωt/2), 3-term series
    let shc = (0.5 * t) * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    let ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
    let e = (-a * t).exp();
    let k = e * (ch + 2.0 * a * shc);
    let kdot = -gl * shc * e;
    (k, kdot)
}

/// One sample of the survival amplitude: time, `k(t)`, and `k̇(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample {
    pub t: f64,
    pub k: Complex64,
    pub kdot: Complex64,
}

impl AmplitudeSample {
    /// `|k(t)|²`, the excited-state survival probability factor.
    pub fn population_factor(&self) -> f64 {
        self.k.norm_sqr()
    }

    /// `d|k|²/dt = 2 Re(k* k̇)`, the trace-distance witness of the
    /// antipodal pair.
    pub fn population_rate(&self) -> f64 {
        2.0 * (self.k.conj() * self.kdot).re
    }
}

/// Decay rate at one instant: finite, or a tagged pole at a zero of `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayRate {
    Finite(f64),
    Pole,
}

impl DecayRate {
    pub fn is_pole(&self) -> bool {
        matches!(self, DecayRate::Pole)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            DecayRate::Finite(g) => Some(*g),
            DecayRate::Pole => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn p(lambda: f64, delta: f64) -> ModelParams {
        ModelParams::new(1.0, lambda, delta).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -2.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(ModelParams::new(1.0, 1.0, -3.0).is_ok());
    }

    #[test]
    fn omega_examples() {
        // (γ=1, λ=8, δ=0): Ω = √48, purely real
        let w = p(8.0, 0.0).omega();
        assert_relative_eq!(w.re, 48f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn omega_oscillatory_and_degenerate() {
        // (γ=1, λ=0.1, δ=0): Ω = i√0.19
        let w = p(0.1, 0.0).omega();
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.im.abs(), 0.19f64.sqrt(), epsilon = 1e-12);
        // (γ=1, λ=2, δ=0): degenerate Ω = 0
        assert_abs_diff_eq!(p(2.0, 0.0).omega().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn amplitude_initial_conditions_exact() {
        for (lam, del) in [(0.1, 0.0), (3.0, 5.0), (8.0, 2.0), (2.0, 0.0)] {
            let s = p(lam, del).amplitude(0.0).unwrap();
            assert_eq!(s.k, Complex64::new(1.0, 0.0));
            assert_eq!(s.kdot, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn amplitude_rejects_negative_time() {
        assert!(matches!(
            p(1.0, 0.0).amplitude(-0.5),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn degenerate_amplitude_matches_limit() {
        // λ = 2γ, δ = 0: k(t) = e^{-t}(1 + t), so k(1) = 2/e
        let s = p(2.0, 0.0).amplitude(1.0).unwrap();
        assert_relative_eq!(s.k.re, 0.7357588823428847, epsilon = 1e-12);
        assert_abs_diff_eq!(s.k.im, 0.0, epsilon = 1e-14);
        assert_relative_eq!(s.kdot.re, -0.36787944117144233, epsilon = 1e-10);
    }

    #[test]
    fn first_zero_of_oscillatory_amplitude() {
        // λ = 0.1γ, δ = 0: first zero of k at 2(π - arctan(d/λ))/d, d = √0.19
        let params = p(0.1, 0.0);
        let root = crate::numerics::bisect_root(
            |t| params.amplitude_raw(t).k.re,
            8.0,
            9.0,
            1e-12,
        );
        assert_abs_diff_eq!(root, 8.242034311692073, epsilon = 1e-9);
    }

    #[test]
    fn amplitude_no_overflow_at_long_times() {
        // naive cosh(Ωt/2) overflows here; the stabilized form must not
        let s = p(8.0, 0.0).amplitude(200.0).unwrap();
        assert!(s.k.norm().is_finite());
        assert!(s.k.norm() < 1e-30);
        assert!(s.kdot.norm().is_finite());
    }

    #[test]
    fn series_and_direct_paths_agree_near_degeneracy() {
        // λ near 2γ so |Ω| is tiny; compare the two evaluation paths on
        // times straddling the switch
        for lam in [1.999999, 2.000001, 2.0 + 1e-9] {
            let params = p(lam, 0.0);
            let omega = params.omega();
            for t in [1e-3, 0.1, 1.0, 5.0] {
                if omega.norm() * t > 1e-3 {
                    continue;
                }
                let a = params.half_rate();
                let (ks, kds) = series_amplitude(a, lam, omega, t);
                // direct two-exponential path
                let ep = ((omega * 0.5 - a) * t).exp();
                let em = ((-omega * 0.5 - a) * t).exp();
                let q = 2.0 * a / omega;
                let kd_direct = -(lam / (2.0 * omega)) * (ep - em);
                let k_direct = 0.5 * ((1.0 + q) * ep + (1.0 - q) * em);
                assert_abs_diff_eq!((ks - k_direct).norm(), 0.0, epsilon = 1e-10);
                assert_abs_diff_eq!((kds - kd_direct).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn decay_rate_zero_at_origin() {
        for (lam, del) in [(0.1, 0.0), (3.0, 5.0), (8.0, 0.0)] {
            let g = p(lam, del).decay_rate(0.0).unwrap().value().unwrap();
            assert_abs_diff_eq!(g, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn decay_rate_markovian_asymptote() {
        // λ = 8γ, t = 10: γ(t) → 2γλ/(λ + Ω) = 16/(8 + √48)
        let g = p(8.0, 0.0).decay_rate(10.0).unwrap().value().unwrap();
        assert_relative_eq!(g, 1.0717967697244908, epsilon = 1e-6);
    }

    #[test]
    fn decay_rate_pole_at_amplitude_zero() {
        // first zero of k for λ = 0.1γ is at t ≈ 8.2420
        assert!(p(0.1, 0.0).decay_rate(8.2420).unwrap().is_pole());
        assert!(!p(0.1, 0.0).decay_rate(5.0).unwrap().is_pole());
    }

    #[test]
    fn decay_rate_markovian_decay_is_not_a_pole() {
        // at λ = 8γ the amplitude decays below 1e-5 by t ≈ 22 without any
        // zero; γ(t) stays finite at its asymptote
        let params = p(8.0, 0.0);
        for t in [22.0, 30.0, 100.0] {
            assert!(params.amplitude(t).unwrap().k.norm() < 1e-5);
            let g = params.decay_rate(t).unwrap().value().unwrap();
            assert_relative_eq!(g, 1.0717967697244908, epsilon = 1e-6);
        }
    }

    #[test]
    fn spectral_density_examples() {
        // peak at resonance: J(ω₀) = γ/(2π) for λ = 1, δ = 0
        let j = p(1.0, 0.0).spectral_density(5.0, 5.0);
        assert_relative_eq!(j, 1.0 / (2.0 * std::f64::consts::PI), epsilon = 1e-12);
        // detuned: denominator picks up δ² = 4
        let j2 = p(1.0, 2.0).spectral_density(5.0, 5.0);
        assert_relative_eq!(j2, 1.0 / (10.0 * std::f64::consts::PI), epsilon = 1e-12);
        // tails vanish
        assert!(p(1.0, 0.0).spectral_density(1e9, 0.0) < 1e-15);
        assert!(p(1.0, 0.0).spectral_density(-1e9, 0.0) < 1e-15);
    }

    #[test]
    fn correlation_function_examples() {
        let f0 = p(0.1, 0.0).correlation_function(0.0).unwrap();
        assert_relative_eq!(f0.re, 0.05, epsilon = 1e-15);
        let f1 = p(1.0, 0.0).correlation_function(1.0).unwrap();
        assert_relative_eq!(f1.re, 0.5 * (-1.0f64).exp(), epsilon = 1e-12);
        let fpi = p(1.0, std::f64::consts::PI).correlation_function(1.0).unwrap();
        assert_relative_eq!(fpi.re, -0.5 * (-1.0f64).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(fpi.im, 0.0, epsilon = 1e-12);
        assert!(p(1.0, 0.0).correlation_function(-1.0).is_err());
    }

    #[test]
    fn branch_invariance_spot() {
        let params = p(3.0, 5.0);
        let w = params.omega();
        for t in [0.3, 2.0, 17.0] {
            let plus = params.amplitude_with_root(t, w).unwrap();
            let minus = params.amplitude_with_root(t, -w).unwrap();
            assert_abs_diff_eq!((plus.k - minus.k).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!((plus.kdot - minus.kdot).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn delta_parity_spot() {
        let a = p(0.7, 2.5);
        let b = p(0.7, -2.5);
        for t in [0.1, 1.0, 10.0] {
            let sa = a.amplitude(t).unwrap();
            let sb = b.amplitude(t).unwrap();
            assert_abs_diff_eq!((sa.k - sb.k.conj()).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!((sa.kdot - sb.kdot.conj()).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn rate_identity_spot() {
        // γ(t) = -2 Re(k̇/k) wherever |k| is healthy
        for (lam, del) in [(0.1, 0.0), (3.0, 1.0), (8.0, 5.0)] {
            let params = p(lam, del);
            for t in [0.5, 2.0, 7.0] {
                let s = params.amplitude(t).unwrap();
                if s.k.norm() < 1e-6 {
                    continue;
                }
                let direct = params.decay_rate(t).unwrap().value().unwrap();
                let via_k = -2.0 * (s.kdot / s.k).re;
                assert_relative_eq!(direct, via_k, max_relative = 1e-9);
            }
        }
    }
}
