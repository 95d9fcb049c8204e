//! Partial transpose, Hermitian eigenvalues and negativity of two-qutrit
//! states.

use ndarray::Array2;

use crate::channel::{apply_two, DensityMatrix, KrausSet};
use crate::propagator::g12;
use crate::{Error, Result, SystemParams, C64};

/// Sweep cap for the cyclic Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// Frobenius norm of the input.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

const LOCAL_DIM: usize = 3;

/// Tensor factor to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Real eigenvalues of a Hermitian matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    /// `Σ_i |λ_i|`.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }

    /// Magnitude of the sum of the negative eigenvalues.
    pub fn negative_mass(&self) -> f64 {
        -self.eigenvalues.iter().filter(|&&l| l < 0.0).sum::<f64>()
    }
}

/// Eigenvalues (ascending) and the matching unitary of eigenvectors, stored
/// column-wise.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

fn check_square(m: &Array2<C64>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: c,
        });
    }
    Ok(r)
}

fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[[i, j]].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi diagonalization.
///
/// The input is symmetrized as `(m + m†)/2` first; the caller is expected to
/// pass a matrix that is Hermitian to about 1e-10.
pub fn hermitian_eigen(m: &Array2<C64>) -> Result<Eigen> {
    let n = check_square(m)?;
    let mut a = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    let mut v = Array2::<C64>::eye(n);
    let scale = frobenius(&a);
    let target = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].re.total_cmp(&a[[j, j]].re));
    let values = order.iter().map(|&i| a[[i, i]].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok(Eigen { values, vectors })
}

/// Annihilates `a[p][q]` with `U = D R`, where `D` moves the phase of the
/// pivot onto row/column `q` and `R` is a real Givens rotation.
fn rotate(a: &mut Array2<C64>, v: &mut Array2<C64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.nrows();
    let e_minus = phase.conj();

    // A ← A U
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = c * akp - s * e_minus * akq;
        a[[k, q]] = s * akp + c * e_minus * akq;
    }
    // A ← U† A
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = c * apk - s * phase * aqk;
        a[[q, k]] = s * apk + c * phase * aqk;
    }
    a[[p, q]] = C64::new(0.0, 0.0);
    a[[q, p]] = C64::new(0.0, 0.0);
    a[[p, p]] = C64::new(app - t * r, 0.0);
    a[[q, q]] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = c * vkp - s * e_minus * vkq;
        v[[k, q]] = s * vkp + c * e_minus * vkq;
    }
}

pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Spectrum> {
    hermitian_eigen(m).map(|e| Spectrum {
        eigenvalues: e.values,
    })
}

/// Transposes one qutrit factor of a `9 × 9` operator.
///
/// With `(i, a)` labelling qutrit 1 and qutrit 2, the first-factor transpose
/// sends entry `((i,a),(j,b))` to `((j,a),(i,b))`.
pub fn partial_transpose(m: &Array2<C64>, subsystem: Subsystem) -> Result<Array2<C64>> {
    let dim = LOCAL_DIM * LOCAL_DIM;
    if m.dim() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    let idx = |i: usize, a: usize| LOCAL_DIM * i + a;
    let mut out = Array2::zeros((dim, dim));
    for i in 0..LOCAL_DIM {
        for a in 0..LOCAL_DIM {
            for j in 0..LOCAL_DIM {
                for b in 0..LOCAL_DIM {
                    let (row, col) = match subsystem {
                        Subsystem::First => (idx(j, a), idx(i, b)),
                        Subsystem::Second => (idx(i, b), idx(j, a)),
                    };
                    out[[row, col]] = m[[idx(i, a), idx(j, b)]];
                }
            }
        }
    }
    Ok(out)
}

/// Negativity with respect to the chosen subsystem.
pub fn negativity_wrt(rho: &DensityMatrix, subsystem: Subsystem) -> Result<f64> {
    if rho.dim() != LOCAL_DIM * LOCAL_DIM {
        return Err(Error::DimensionMismatch {
            expected: LOCAL_DIM * LOCAL_DIM,
            got: rho.dim(),
        });
    }
    let pt = partial_transpose(rho.matrix(), subsystem)?;
    let spectrum = hermitian_eigenvalues(&pt)?;
    Ok(spectrum.negative_mass().max(0.0))
}

/// `(‖ρ^{T₁}‖₁ − 1)/2`, evaluated as the magnitude of the negative part of
/// the partial-transpose spectrum.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    negativity_wrt(rho, Subsystem::First)
}

/// Negativity at time `t` of the maximally entangled two-qutrit state after
/// both qutrits pass through their own reservoir with parameters `params`.
pub fn evolved_negativity(params: &SystemParams, t: f64) -> Result<f64> {
    let ks = KrausSet::from_pair(&g12(params, t))?;
    let rho = apply_two(&DensityMatrix::maximally_entangled(), &ks)?;
    negativity(&rho)
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    pub use crate::sampling::random_unitary;
    use rand::Rng;
    use rand_distr::StandardNormal;

    pub fn gauss<R: Rng>(rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }

    pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
        m.t().mapv(|z| z.conj())
    }
}
