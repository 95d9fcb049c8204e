//! Random test objects: parameters, density matrices, unitaries and
//! single-excitation states. Used by the validation suites.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::DensityMatrix;
use crate::{SystemParams, C64};

/// Standard complex Gaussian (independent unit-variance real and imaginary
/// parts).
pub fn complex_gauss<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random normalized vector of length `n`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| complex_gauss(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Random unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array2<C64> {
    let mut m = Array2::from_shape_fn((n, n), |_| complex_gauss(rng));
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = (0..n).map(|i| m[[i, k]].conj() * m[[i, j]]).sum();
            for i in 0..n {
                let mik = m[[i, k]];
                m[[i, j]] -= proj * mik;
            }
        }
        let norm = (0..n).map(|i| m[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            m[[i, j]] /= norm;
        }
    }
    m
}

/// Random density matrix of the given rank: `Σ_r |v_r⟩⟨v_r|`, normalized.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let mut m = Array2::<C64>::zeros((dim, dim));
    for _ in 0..rank.max(1) {
        let v: Vec<C64> = (0..dim).map(|_| complex_gauss(rng)).collect();
        for i in 0..dim {
            for j in 0..dim {
                m[[i, j]] += v[i] * v[j].conj();
            }
        }
    }
    let tr: C64 = (0..dim).map(|i| m[[i, i]]).sum();
    m.mapv_inplace(|z| z / tr);
    // restore exact Hermiticity after the division
    let h = Array2::from_shape_fn((dim, dim), |(i, j)| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    DensityMatrix::new(h).expect("Gram matrices are valid states")
}

/// Parameters drawn from `γ₀ ∈ [0, 3)`, `λ ∈ [0.05, 2)`, `θ ∈ [0, 1]`,
/// `N ∈ [1, 12)`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> SystemParams {
    SystemParams::new(
        rng.random_range(0.0..3.0),
        rng.random_range(0.05..2.0),
        rng.random_range(0.0..=1.0),
        rng.random_range(1..12),
    )
    .expect("sampled ranges are valid")
}
