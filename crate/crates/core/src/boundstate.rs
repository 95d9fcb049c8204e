//! Negative-energy bound state of the atom–reservoir Hamiltonian.
//!
//! A bound state exists when
//!
//! ```text
//! E = ω₀ − N(1 + θ) I(E),    I(E) = ∫₀^∞ J(ω) dω / (ω − E)
//! ```
//!
//! has a root with `E < 0`. For the Lorentzian `J` the dispersion integral
//! has a closed form, and `F(E) = ω₀ − N(1+θ)I(E) − E` is strictly
//! decreasing on `E < 0` with `F(0⁻) = −∞`, so the root is unique.
//!
//! At weak coupling the root approaches zero like `exp(−c/γ₀)` and leaves
//! the range of `f64` long before `γ₀` reaches zero. The solver therefore
//! works with the binding depth `u = ln(−E/ω₀)`, which stays well scaled;
//! [`BoundStateResult::log_depth`] carries it alongside the energy.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::quadrature::{self, QuadratureResult, Tolerance};
use crate::sweep::{self, Execution};
use crate::{Error, Result, SystemParams};

/// Residual required of every reported root, in units of `ω₀`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Initial shallow end of the bracket, `E = −1e-12 ω₀`.
pub const SHALLOW_SEED: f64 = 1e-12;
/// Geometric expansion factor of the deep end of the bracket.
pub const EXPANSION: f64 = 4.0;
const MAX_DEEP_EXPANSIONS: usize = 64;
/// Log-depth below which bracketing gives up (`E ≈ −e^{-10⁵} ω₀`).
const MIN_LOG_DEPTH: f64 = -1e5;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundStateResult {
    /// `E` in units of `ω₀`. Underflows to `-0.0` once `log_depth < −745`.
    pub energy: f64,
    /// `ln(−E/ω₀)`.
    pub log_depth: f64,
    /// `|F(E)|`.
    pub residual: f64,
    /// Final bracket `(lo, hi)` in energy.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Lorentzian spectral density `J(ω)` of the diagonal (A–A, B–B) coupling.
pub fn spectral_density(params: &SystemParams, omega: f64) -> f64 {
    let detuning = params.omega0 - omega;
    let l2 = params.lambda * params.lambda;
    params.gamma0 / (2.0 * PI) * l2 / (detuning * detuning + l2)
}

/// Cross (A–B) spectral density `θ J(ω)`.
pub fn cross_spectral_density(params: &SystemParams, omega: f64) -> f64 {
    params.theta * spectral_density(params, omega)
}

/// `∫₀^∞ J(ω) dω`.
pub fn total_weight(params: &SystemParams) -> f64 {
    params.gamma0 * params.lambda / (2.0 * PI)
        * (FRAC_PI_2 + (params.omega0 / params.lambda).atan())
}

/// Closed-form `I(E)` at depth `s = −E = ω₀ e^{log_depth}`.
///
/// Partial fractions in `u = ω − ω₀`, with `a = ω₀ + s`:
/// `1/((u + a)(u² + λ²)) = [1/(u + a) + (a − u)/(u² + λ²)] / (a² + λ²)`.
pub fn dispersion_integral_at_depth(params: &SystemParams, log_depth: f64) -> f64 {
    let (w0, lam) = (params.omega0, params.lambda);
    let s = w0 * log_depth.exp();
    let ln_s = log_depth + w0.ln();
    let a = w0 + s;
    let bracket =
        0.5 * (w0 * w0 + lam * lam).ln() - ln_s + a / lam * (FRAC_PI_2 + (w0 / lam).atan());
    params.gamma0 * lam * lam / (2.0 * PI) * bracket / (a * a + lam * lam)
}

/// `I(E) = ∫₀^∞ J(ω)/(ω − E) dω` for `E < 0`.
pub fn dispersion_integral(params: &SystemParams, e: f64) -> Result<f64> {
    if !(e < 0.0) || !e.is_finite() {
        return Err(Error::InvalidInput(format!(
            "dispersion integral needs E < 0, got {e}"
        )));
    }
    Ok(dispersion_integral_at_depth(
        params,
        (-e / params.omega0).ln(),
    ))
}

/// Adaptive-quadrature evaluation of `I(E)`: Gauss–Kronrod on
/// `[0, ω₀ + 50λ]` plus the mapped semi-infinite tail.
pub fn dispersion_integral_quadrature(
    params: &SystemParams,
    e: f64,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    if !(e < 0.0) || !e.is_finite() {
        return Err(Error::InvalidInput(format!(
            "dispersion integral needs E < 0, got {e}"
        )));
    }
    let integrand = |w: f64| spectral_density(params, w) / (w - e);
    let split = params.omega0 + 50.0 * params.lambda;
    let body = quadrature::integrate(integrand, 0.0, split, tol)?;
    let tail = quadrature::integrate_to_infinity(integrand, split, tol)?;
    Ok(QuadratureResult {
        value: body.value + tail.value,
        error: body.error + tail.error,
        intervals: body.intervals + tail.intervals,
    })
}

/// `F = ω₀ − N(1+θ) I − E` as a function of the log-depth; increasing in
/// `log_depth`.
pub fn bound_state_function(params: &SystemParams, log_depth: f64) -> f64 {
    let s = params.omega0 * log_depth.exp();
    let weight = params.n() * (1.0 + params.theta);
    params.omega0 + s - weight * dispersion_integral_at_depth(params, log_depth)
}

/// Residual `|F(E)|` of a reported root, recomputed from its log-depth.
pub fn residual_at(params: &SystemParams, log_depth: f64) -> f64 {
    bound_state_function(params, log_depth).abs()
}

fn energy_of(params: &SystemParams, log_depth: f64) -> f64 {
    -params.omega0 * log_depth.exp()
}

pub fn bound_state_energy(params: &SystemParams) -> Result<BoundStateResult> {
    if !(params.gamma0 > 0.0) {
        return Err(Error::InvalidParams(
            "bound-state search needs gamma0 > 0".into(),
        ));
    }
    let f = |u: f64| bound_state_function(params, u);

    let mut deep = 0.0;
    let mut f_deep = f(deep);
    let mut expansions = 0;
    while f_deep <= 0.0 {
        if expansions == MAX_DEEP_EXPANSIONS {
            return Err(Error::Bracketing(format!(
                "F stayed non-positive down to E = {:e}",
                energy_of(params, deep)
            )));
        }
        deep += EXPANSION.ln();
        f_deep = f(deep);
        expansions += 1;
    }

    let step = SHALLOW_SEED.ln();
    let mut shallow = step;
    let mut f_shallow = f(shallow);
    while f_shallow >= 0.0 {
        if shallow < MIN_LOG_DEPTH {
            return Err(Error::Bracketing(format!(
                "no sign change for log-depth down to {shallow:.1}"
            )));
        }
        shallow += step;
        f_shallow = f(shallow);
    }

    let root = brent(f, shallow, f_shallow, deep, f_deep)?;
    let residual = root.f_root.abs();
    if residual > RESIDUAL_TOL * params.omega0 {
        return Err(Error::RootResidual { residual });
    }
    let (lo_u, hi_u) = (root.root.min(root.other), root.root.max(root.other));
    Ok(BoundStateResult {
        energy: energy_of(params, root.root),
        log_depth: root.root,
        residual,
        bracket: (energy_of(params, hi_u), energy_of(params, lo_u)),
        iterations: root.iterations,
    })
}

struct Root {
    root: f64,
    f_root: f64,
    /// Opposite end of the final bracket.
    other: f64,
    iterations: usize,
}

/// Brent's method: inverse quadratic / secant steps guarded by bisection.
fn brent<F: Fn(f64) -> f64>(f: F, a0: f64, fa0: f64, b0: f64, fb0: f64) -> Result<Root> {
    let (mut a, mut fa, mut b, mut fb) = (a0, fa0, b0, fb0);
    if fa * fb > 0.0 {
        return Err(Error::Bracketing("endpoints do not bracket a root".into()));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iteration in 1..=MAX_ITERATIONS {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root {
                root: b,
                f_root: fb,
                other: c,
                iterations: iteration,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Bracketing(format!(
        "Brent iteration cap {MAX_ITERATIONS} reached"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub gamma0: f64,
    pub n_atoms: u32,
    pub theta: f64,
    pub lambda: f64,
    pub result: std::result::Result<BoundStateResult, String>,
}

/// Bound-state energy over a `γ₀ × N` grid, `γ₀`-major. Failures are kept
/// per row.
pub fn spectrum_scan(
    base: &SystemParams,
    gamma0_grid: &[f64],
    n_list: &[u32],
    exec: Execution,
) -> Result<Vec<SpectrumRow>> {
    if gamma0_grid.is_empty() || n_list.is_empty() {
        return Err(Error::InvalidInput(
            "spectrum scan needs non-empty grids".into(),
        ));
    }
    let mut points = Vec::with_capacity(gamma0_grid.len() * n_list.len());
    for &g in gamma0_grid {
        if !(g > 0.0) {
            return Err(Error::InvalidInput(format!(
                "spectrum scan needs gamma0 > 0, got {g}"
            )));
        }
        for &n in n_list {
            points.push(base.with_gamma0(g)?.with_n_atoms(n)?);
        }
    }
    Ok(sweep::map(exec, &points, |p| SpectrumRow {
        gamma0: p.gamma0,
        n_atoms: p.n_atoms,
        theta: p.theta,
        lambda: p.lambda,
        result: bound_state_energy(p).map_err(|e| e.to_string()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma0: f64, theta: f64, n: u32) -> SystemParams {
        SystemParams::new(gamma0, 0.8, theta, n).unwrap()
    }

    #[test]
    fn spectral_density_shape() {
        let p = params(0.7, 0.4, 1);
        assert!((spectral_density(&p, 1.0) - 0.7 / (2.0 * PI)).abs() < 1e-15);
        assert!((spectral_density(&p, 1.8) - 0.7 / (4.0 * PI)).abs() < 1e-15);
        assert!((spectral_density(&p, 0.2) - 0.7 / (4.0 * PI)).abs() < 1e-15);
        assert!((cross_spectral_density(&p, 1.3) - 0.4 * spectral_density(&p, 1.3)).abs() < 1e-17);
        let z = params(0.0, 0.4, 1);
        assert_eq!(spectral_density(&z, 0.3), 0.0);
    }

    #[test]
    fn dispersion_integral_decays_at_deep_energies() {
        let p = params(1.0, 0.5, 1);
        let e = -1e6;
        let i = dispersion_integral(&p, e).unwrap();
        assert!(i > 0.0 && i <= total_weight(&p) / e.abs());
        assert!(i > 0.99 * total_weight(&p) / (e.abs() + 1.0 + 50.0));
    }

    #[test]
    fn dispersion_integral_diverges_towards_zero() {
        let p = params(1.0, 0.5, 1);
        let tol = Tolerance::default();
        let near = dispersion_integral_quadrature(&p, -1e-8, tol)
            .unwrap()
            .value;
        let far = dispersion_integral_quadrature(&p, -1e-4, tol)
            .unwrap()
            .value;
        assert!(near > far);
        assert!(dispersion_integral(&p, -1e-8).unwrap() > dispersion_integral(&p, -1e-4).unwrap());
    }

    #[test]
    fn dispersion_integral_linear_in_gamma() {
        let a = dispersion_integral(&params(0.3, 0.5, 1), -0.2).unwrap();
        let b = dispersion_integral(&params(0.9, 0.5, 1), -0.2).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-15 * b);
    }

    #[test]
    fn dispersion_integral_rejects_non_negative() {
        let p = params(1.0, 0.5, 1);
        assert!(dispersion_integral(&p, 0.0).is_err());
        assert!(dispersion_integral(&p, 0.3).is_err());
        assert!(dispersion_integral_quadrature(&p, 0.0, Tolerance::default()).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p = params(1.3, 0.2, 2);
        for e in crate::sweep::logspace(1e-6, 1e3, 12) {
            let closed = dispersion_integral(&p, -e).unwrap();
            let quad = dispersion_integral_quadrature(&p, -e, Tolerance::default()).unwrap();
            assert!(
                (closed - quad.value).abs() <= 1e-8 * closed,
                "E={e}: {closed} vs {}",
                quad.value
            );
        }
    }

    #[test]
    fn root_satisfies_equation() {
        let p = params(1.0, 1.0, 1);
        let r = bound_state_energy(&p).unwrap();
        assert!(r.energy < 0.0);
        assert!(r.residual <= RESIDUAL_TOL);
        // re-evaluate in energy form
        let i = dispersion_integral(&p, r.energy).unwrap();
        assert!((p.omega0 - 2.0 * i - r.energy).abs() < 1e-10);
        assert!(r.bracket.0 <= r.energy && r.energy <= r.bracket.1 && r.bracket.1 <= 0.0);
        let f_lo = bound_state_function(&p, (-r.bracket.0).ln());
        let f_hi = bound_state_function(&p, (-r.bracket.1).ln());
        assert!(f_lo * f_hi <= 0.0);
    }

    #[test]
    fn depends_only_on_effective_coupling() {
        let g = 0.6;
        let a = bound_state_energy(&params(g, 0.0, 2)).unwrap();
        let b = bound_state_energy(&params(g, 1.0, 1)).unwrap();
        assert!((a.log_depth - b.log_depth).abs() < 1e-12);
        assert!((a.energy - b.energy).abs() < 1e-10);
    }

    #[test]
    fn deeper_with_more_atoms_and_interference() {
        for g in [0.2, 0.5, 1.0] {
            let e1 = bound_state_energy(&params(g, 0.5, 1)).unwrap();
            let e2 = bound_state_energy(&params(g, 0.5, 2)).unwrap();
            assert!(e2.energy < e1.energy);
            let strong = bound_state_energy(&params(g, 1.0, 3)).unwrap();
            let weak = bound_state_energy(&params(g, 0.5, 3)).unwrap();
            assert!(strong.energy < weak.energy);
        }
    }

    #[test]
    fn weak_coupling_root_below_f64_range_is_still_found() {
        let r = bound_state_energy(&params(0.01, 0.0, 1)).unwrap();
        assert!(r.log_depth < -745.0, "{}", r.log_depth);
        assert!(r.residual <= RESIDUAL_TOL);
        assert!(r.energy <= 0.0);
    }

    #[test]
    fn strong_coupling_expands_deep_bracket() {
        let r = bound_state_energy(&params(200.0, 1.0, 10)).unwrap();
        assert!(r.energy < -1.0);
        assert!(r.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn zero_coupling_rejected() {
        assert!(bound_state_energy(&params(0.0, 0.5, 1)).is_err());
    }

    #[test]
    fn scan_rows_and_ordering() {
        let base = params(1.0, 1.0, 1);
        let single = spectrum_scan(&base, &[0.4], &[2], Execution::Sequential).unwrap();
        assert_eq!(single.len(), 1);
        let direct =
            bound_state_energy(&base.with_gamma0(0.4).unwrap().with_n_atoms(2).unwrap()).unwrap();
        assert_eq!(single[0].result.as_ref().unwrap(), &direct);

        let grid = crate::sweep::linspace(0.1, 1.0, 6);
        let rows = spectrum_scan(&base, &grid, &[1, 2, 4], Execution::default()).unwrap();
        assert_eq!(rows.len(), 18);
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.gamma0, grid[k / 3]);
        }
        let depth = |g: usize, n: usize| rows[3 * g + n].result.as_ref().unwrap().log_depth;
        for g in 0..6 {
            assert!(depth(g, 0) < depth(g, 1) && depth(g, 1) < depth(g, 2));
            if g > 0 {
                for n in 0..3 {
                    assert!(depth(g, n) > depth(g - 1, n));
                }
            }
        }
        assert!(spectrum_scan(&base, &[], &[1], Execution::Sequential).is_err());
        assert!(spectrum_scan(&base, &[0.0], &[1], Execution::Sequential).is_err());
    }

    #[test]
    fn vanishing_coupling_approaches_zero_energy() {
        let mut prev = f64::NEG_INFINITY;
        for g in [0.5, 0.3, 0.2, 0.15] {
            let e = bound_state_energy(&params(g, 1.0, 1)).unwrap().energy;
            assert!(e > prev && e < 0.0);
            prev = e;
        }
        assert!(prev > -1e-10);
    }
}
