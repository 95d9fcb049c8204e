//! Closed-form single-excitation dynamics of `N` V-type atoms in one
//! Lorentzian reservoir.
//!
//! In the basis of symmetric/antisymmetric upper-level combinations
//! `ζ^± = ζ^A ± ζ^B` the dynamics decouple into two damped modes with
//! effective rates `γ₀(1 ± θ)N`. Each mode evolves with
//!
//! ```text
//! G(t) = e^{-λt/2} (cosh(Dt/2) + (λ/D) sinh(Dt/2)),   D² = λ² − 2γ₀(1 ± θ)λN
//! ```
//!
//! which is the exact solution for the infinite-band kernel
//! `f(τ) = (γ₀λ/2) e^{-λ|τ|}`.

use serde::Serialize;

use crate::{Error, Result, SystemParams, C64};

/// Below `DEGENERATE_THRESHOLD * λ` the ratio `sinh(Dt/2)/D` is replaced by
/// its Taylor expansion.
pub const DEGENERATE_THRESHOLD: f64 = 1e-8;

/// Propagator values at one time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorPair {
    pub g_plus: C64,
    pub g_minus: C64,
    pub g1: C64,
    pub g2: C64,
    pub time: f64,
}

/// Returns `(D₊, D₋)`, the principal square roots of the decay radicands.
///
/// A negative radicand gives a purely imaginary root with positive imaginary
/// part (underdamped oscillation).
pub fn d_pm(params: &SystemParams) -> (C64, C64) {
    let radicand = |sign: f64| {
        let p = params;
        p.lambda * p.lambda - 2.0 * p.gamma0 * (1.0 + sign * p.theta) * p.lambda * p.n()
    };
    (
        C64::new(radicand(1.0), 0.0).sqrt(),
        C64::new(radicand(-1.0), 0.0).sqrt(),
    )
}

/// One damped mode `G(t)` for a given root `d`.
fn damped_mode(lambda: f64, d: C64, t: f64) -> C64 {
    let half_lt = 0.5 * lambda * t;
    if d.norm() < DEGENERATE_THRESHOLD * lambda {
        // e^{-λt/2}[1 + λt/2 + D²t²/8 (1 + λt/6)]
        let d2 = d * d;
        let base = 1.0 + half_lt;
        let corr = d2 * (t * t / 8.0) * (1.0 + lambda * t / 6.0);
        return (-half_lt).exp() * (corr + base);
    }
    let z = d * (0.5 * t);
    // e^{-λt/2} cosh(z) written as a sum of decaying exponentials
    // (Re D ≤ λ, so neither overflows at large t).
    let grow = (z - half_lt).exp();
    let decay = (-z - half_lt).exp();
    let cosh_part = 0.5 * (grow + decay);
    let sinh_part = if z.norm() < 1.0 {
        z.sinh() * (-half_lt).exp()
    } else {
        0.5 * (grow - decay)
    };
    cosh_part + sinh_part * (lambda / d)
}

/// `(G₊(t), G₋(t))`.
///
/// # Panics
///
/// Panics if `t` is negative or not finite.
pub fn g_pm(params: &SystemParams, t: f64) -> (C64, C64) {
    assert!(
        t.is_finite() && t >= 0.0,
        "time must be finite and >= 0, got {t}"
    );
    let (dp, dm) = d_pm(params);
    (
        damped_mode(params.lambda, dp, t),
        damped_mode(params.lambda, dm, t),
    )
}

/// Evaluates `G₊`, `G₋` and the single-atom combinations `G₁`, `G₂` that
/// propagate one initially excited atom in the presence of `N − 1` ground
/// state companions.
pub fn g12(params: &SystemParams, t: f64) -> PropagatorPair {
    let (g_plus, g_minus) = g_pm(params, t);
    let n = params.n();
    let spectator = (n - 1.0) / (2.0 * n);
    let g1 = 0.5 * (g_plus + g_minus) + spectator * (2.0 - g_plus - g_minus);
    let g2 = 0.5 * (g_plus - g_minus) + spectator * (g_minus - g_plus);
    PropagatorPair {
        g_plus,
        g_minus,
        g1,
        g2,
        time: t,
    }
}

/// Ground amplitude plus the two upper-level amplitudes of every atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeState {
    pub zeta0: C64,
    pub zeta_a: Vec<C64>,
    pub zeta_b: Vec<C64>,
}

impl AmplitudeState {
    pub fn new(zeta0: C64, zeta_a: Vec<C64>, zeta_b: Vec<C64>) -> Result<Self> {
        if zeta_a.len() != zeta_b.len() {
            return Err(Error::DimensionMismatch {
                expected: zeta_a.len(),
                got: zeta_b.len(),
            });
        }
        if zeta_a.is_empty() {
            return Err(Error::InvalidInput(
                "amplitude state needs at least one atom".into(),
            ));
        }
        let state = Self {
            zeta0,
            zeta_a,
            zeta_b,
        };
        let norm = state.norm_sqr();
        if !(norm <= 1.0 + 1e-10) {
            return Err(Error::InvalidInput(format!(
                "amplitude norm {norm} exceeds 1"
            )));
        }
        Ok(state)
    }

    /// Only atom 1 excited; the remaining `n_atoms − 1` atoms in `|C⟩`.
    pub fn single_excited(zeta0: C64, a: C64, b: C64, n_atoms: usize) -> Result<Self> {
        let mut zeta_a = vec![C64::new(0.0, 0.0); n_atoms];
        let mut zeta_b = zeta_a.clone();
        if let (Some(za), Some(zb)) = (zeta_a.first_mut(), zeta_b.first_mut()) {
            *za = a;
            *zb = b;
        }
        Self::new(zeta0, zeta_a, zeta_b)
    }

    pub fn n_atoms(&self) -> usize {
        self.zeta_a.len()
    }

    /// Total atomic population `Σ_l |ζ_l^A|² + |ζ_l^B|²`.
    pub fn atomic_population(&self) -> f64 {
        self.zeta_a
            .iter()
            .chain(&self.zeta_b)
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.zeta0.norm_sqr() + self.atomic_population()
    }
}

/// Propagates an arbitrary single-excitation initial state to time `t`.
pub fn evolve_amplitudes(
    params: &SystemParams,
    initial: &AmplitudeState,
    t: f64,
) -> Result<AmplitudeState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("time must be >= 0, got {t}")));
    }
    let n_atoms = initial.n_atoms();
    if n_atoms != params.n_atoms as usize {
        return Err(Error::DimensionMismatch {
            expected: params.n_atoms as usize,
            got: n_atoms,
        });
    }
    let (g_plus, g_minus) = g_pm(params, t);
    let n = params.n();

    let propagate = |initial: &[C64], g: C64| -> Vec<C64> {
        let total: C64 = initial.iter().sum();
        let leak = (1.0 - g) / n;
        initial
            .iter()
            .map(|&z| {
                // Σ_{j≠l} (ζ_j − ζ_l) = total − N ζ_l
                let spread = total - z * n;
                g * z - leak * spread
            })
            .collect()
    };

    let plus: Vec<C64> = initial
        .zeta_a
        .iter()
        .zip(&initial.zeta_b)
        .map(|(a, b)| a + b)
        .collect();
    let minus: Vec<C64> = initial
        .zeta_a
        .iter()
        .zip(&initial.zeta_b)
        .map(|(a, b)| a - b)
        .collect();
    let plus_t = propagate(&plus, g_plus);
    let minus_t = propagate(&minus, g_minus);

    Ok(AmplitudeState {
        zeta0: initial.zeta0,
        zeta_a: plus_t
            .iter()
            .zip(&minus_t)
            .map(|(p, m)| 0.5 * (p + m))
            .collect(),
        zeta_b: plus_t
            .iter()
            .zip(&minus_t)
            .map(|(p, m)| 0.5 * (p - m))
            .collect(),
    })
}
