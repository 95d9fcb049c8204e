//! Brute-force reference: the single-excitation Schrödinger equation with
//! the reservoir continuum replaced by `M` discrete modes.
//!
//! Each mode carries two orthogonal polarization amplitudes. Level `A`
//! couples to `(|g_k|, 0)` and level `B` to `(θ|g_k|, √(1−θ²)|g_k|)`, so the
//! cross kernel is exactly `θ` times the diagonal one. The equations are
//! integrated in the interaction picture with classical fixed-step RK4.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::boundstate::spectral_density;
use crate::propagator::AmplitudeState;
use crate::{Error, Result, SystemParams, C64};

/// Norm drift beyond which a run aborts.
pub const ABORT_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedBath {
    pub mode_freqs: Vec<f64>,
    pub couplings_a: Vec<[f64; 2]>,
    pub couplings_b: Vec<[f64; 2]>,
    pub band: (f64, f64),
    pub spacing: f64,
    pub mode_count: usize,
}

impl DiscretizedBath {
    /// `Σ_k |g_k|² e^{i(ω₀ − ω_k)τ}`, the discrete memory kernel seen by
    /// level `A`.
    pub fn kernel(&self, omega0: f64, tau: f64) -> C64 {
        self.mode_freqs
            .iter()
            .zip(&self.couplings_a)
            .map(|(w, g)| C64::from_polar(g[0] * g[0], (omega0 - w) * tau))
            .sum()
    }
}

/// Samples the Lorentzian on `M` equal-width bins covering
/// `[ω₀ − W, ω₀ + W]`, or `[max(0, ω₀ − W), ω₀ + W]` with `cutoff_at_zero`.
/// Each mode sits at its bin centre with `|g_k|² = J(ω_k) Δω`.
pub fn build_bath(
    params: &SystemParams,
    mode_count: usize,
    half_bandwidth: f64,
    cutoff_at_zero: bool,
) -> Result<DiscretizedBath> {
    if mode_count < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 bath modes, got {mode_count}"
        )));
    }
    if !(half_bandwidth > 0.0) || !half_bandwidth.is_finite() {
        return Err(Error::InvalidInput(format!(
            "half bandwidth must be > 0, got {half_bandwidth}"
        )));
    }
    let mut lo = params.omega0 - half_bandwidth;
    if cutoff_at_zero {
        lo = lo.max(0.0);
    }
    let hi = params.omega0 + half_bandwidth;
    let spacing = (hi - lo) / mode_count as f64;
    let mode_freqs: Vec<f64> = (0..mode_count)
        .map(|k| lo + (k as f64 + 0.5) * spacing)
        .collect();
    let theta = params.theta;
    let orth = (1.0 - theta * theta).max(0.0).sqrt();
    let (couplings_a, couplings_b) = mode_freqs
        .iter()
        .map(|&w| {
            let g = (spectral_density(params, w) * spacing).sqrt();
            ([g, 0.0], [theta * g, orth * g])
        })
        .unzip();
    Ok(DiscretizedBath {
        mode_freqs,
        couplings_a,
        couplings_b,
        band: (lo, hi),
        spacing,
        mode_count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTrajectory {
    pub times: Vec<f64>,
    /// `zeta_a[step][atom]`.
    pub zeta_a: Vec<Vec<C64>>,
    pub zeta_b: Vec<Vec<C64>>,
    /// Final mode amplitudes, two polarizations per mode.
    pub mode_amps: Vec<[C64; 2]>,
    pub norm_drift: f64,
}

impl OracleTrajectory {
    /// Atomic population of all atoms at each stored time.
    pub fn atomic_population(&self) -> Vec<f64> {
        self.zeta_a
            .iter()
            .zip(&self.zeta_b)
            .map(|(a, b)| a.iter().chain(b).map(|z| z.norm_sqr()).sum())
            .collect()
    }
}

/// Integration controls for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    pub t_end: f64,
    pub dt: f64,
    /// Store every `stride`-th step (the final step is always stored).
    pub stride: usize,
}

impl Integration {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            stride: 1,
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self {
            stride: stride.max(1),
            ..self
        }
    }
}

/// Largest step accepted for a bath of half-width `W`: `0.1 / max(W, λ)`.
pub fn max_step(params: &SystemParams, bath: &DiscretizedBath) -> f64 {
    let reach = (params.omega0 - bath.band.0)
        .max(bath.band.1 - params.omega0)
        .max(params.lambda);
    0.1 / reach
}

/// State vector layout: `[ζ^A_1..ζ^A_N, ζ^B_1..ζ^B_N, ν_{1,x}, ν_{1,y}, …]`.
struct System<'a> {
    bath: &'a DiscretizedBath,
    n_atoms: usize,
}

impl System<'_> {
    /// `ẏ` given the per-mode phases `e^{i(ω₀−ω_k)t}`.
    fn derivative(&self, y: &[C64], phases: &[C64], out: &mut [C64]) {
        let n = self.n_atoms;
        let (atoms, modes) = y.split_at(2 * n);
        let sum_a: C64 = atoms[..n].iter().sum();
        let sum_b: C64 = atoms[n..].iter().sum();
        let minus_i = C64::new(0.0, -1.0);

        let mut drive_a = C64::new(0.0, 0.0);
        let mut drive_b = C64::new(0.0, 0.0);
        let (out_atoms, out_modes) = out.split_at_mut(2 * n);
        for (k, phase) in phases.iter().enumerate() {
            let ga = self.bath.couplings_a[k];
            let gb = self.bath.couplings_b[k];
            let nu = [modes[2 * k], modes[2 * k + 1]];
            drive_a += phase * (ga[0] * nu[0] + ga[1] * nu[1]);
            drive_b += phase * (gb[0] * nu[0] + gb[1] * nu[1]);
            let back = minus_i * phase.conj();
            out_modes[2 * k] = back * (ga[0] * sum_a + gb[0] * sum_b);
            out_modes[2 * k + 1] = back * (ga[1] * sum_a + gb[1] * sum_b);
        }
        // every atom sees the same reservoir field
        for z in &mut out_atoms[..n] {
            *z = minus_i * drive_a;
        }
        for z in &mut out_atoms[n..] {
            *z = minus_i * drive_b;
        }
    }
}

/// Integrates the discretized-bath dynamics from `initial` (reservoir in
/// vacuum) up to `t_end`.
pub fn simulate(
    params: &SystemParams,
    bath: &DiscretizedBath,
    initial: &AmplitudeState,
    integration: Integration,
) -> Result<OracleTrajectory> {
    let Integration { t_end, dt, stride } = integration;
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bad time grid: t_end={t_end}, dt={dt}"
        )));
    }
    let limit = max_step(params, bath);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "dt = {dt} does not resolve the band; need dt <= {limit:.3e}"
        )));
    }
    let n = initial.n_atoms();
    let m = bath.mode_count;
    let sys = System { bath, n_atoms: n };

    let mut y = vec![C64::new(0.0, 0.0); 2 * n + 2 * m];
    y[..n].copy_from_slice(&initial.zeta_a);
    y[n..2 * n].copy_from_slice(&initial.zeta_b);
    let norm0 = initial.norm_sqr();
    let ground = initial.zeta0.norm_sqr();

    let steps = (t_end / dt).round() as usize;
    let detunings: Vec<f64> = bath.mode_freqs.iter().map(|w| params.omega0 - w).collect();
    let half_turn: Vec<C64> = detunings
        .iter()
        .map(|d| C64::from_polar(1.0, d * 0.5 * dt))
        .collect();

    let mut times = vec![0.0];
    let mut traj_a = vec![initial.zeta_a.clone()];
    let mut traj_b = vec![initial.zeta_b.clone()];
    let mut drift: f64 = 0.0;

    let len = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![C64::new(0.0, 0.0); len],
        vec![C64::new(0.0, 0.0); len],
        vec![C64::new(0.0, 0.0); len],
        vec![C64::new(0.0, 0.0); len],
        vec![C64::new(0.0, 0.0); len],
    );
    let mut ph0 = vec![C64::new(0.0, 0.0); m];
    let mut ph_half = vec![C64::new(0.0, 0.0); m];
    let mut ph_full = vec![C64::new(0.0, 0.0); m];

    for step in 0..steps {
        let t = step as f64 * dt;
        for k in 0..m {
            // exact phase at the step start; reduce the angle first to keep
            // it accurate over long runs
            let angle = (detunings[k] * t).rem_euclid(TAU);
            ph0[k] = C64::from_polar(1.0, angle);
            ph_half[k] = ph0[k] * half_turn[k];
            ph_full[k] = ph_half[k] * half_turn[k];
        }
        sys.derivative(&y, &ph0, &mut k1);
        for i in 0..len {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        sys.derivative(&tmp, &ph_half, &mut k2);
        for i in 0..len {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        sys.derivative(&tmp, &ph_half, &mut k3);
        for i in 0..len {
            tmp[i] = y[i] + k3[i] * dt;
        }
        sys.derivative(&tmp, &ph_full, &mut k4);
        for i in 0..len {
            y[i] += (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * (dt / 6.0);
        }

        let norm = ground + y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let d = (norm - norm0).abs();
        drift = drift.max(d);
        let t_next = (step + 1) as f64 * dt;
        if d > ABORT_DRIFT {
            return Err(Error::NormDrift {
                drift: d,
                time: t_next,
                dt,
            });
        }
        if (step + 1) % stride == 0 || step + 1 == steps {
            times.push(t_next);
            traj_a.push(y[..n].to_vec());
            traj_b.push(y[n..2 * n].to_vec());
        }
    }

    let mode_amps = y[2 * n..].chunks(2).map(|c| [c[0], c[1]]).collect();
    Ok(OracleTrajectory {
        times,
        zeta_a: traj_a,
        zeta_b: traj_b,
        mode_amps,
        norm_drift: drift,
    })
}

/// Largest absolute deviation between the oracle trajectory and the closed
/// form propagator over all stored times and atoms.
pub fn max_deviation_from_analytic(
    params: &SystemParams,
    initial: &AmplitudeState,
    trajectory: &OracleTrajectory,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, &t) in trajectory.times.iter().enumerate() {
        let exact = crate::propagator::evolve_amplitudes(params, initial, t)?;
        let pairs = exact
            .zeta_a
            .iter()
            .zip(&trajectory.zeta_a[i])
            .chain(exact.zeta_b.iter().zip(&trajectory.zeta_b[i]));
        for (x, y) in pairs {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}
