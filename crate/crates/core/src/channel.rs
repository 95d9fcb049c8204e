//! Kraus representation of the single-qutrit dissipative channel and its
//! action on one- and two-qutrit states.
//!
//! Basis order is `(|A⟩, |B⟩, |C⟩)`; the two-qutrit index is `3 i + a` with
//! `i` the first and `a` the second qutrit.

use ndarray::{array, Array2};

use crate::entanglement::hermitian_eigenvalues;
use crate::propagator::PropagatorPair;
use crate::{Error, Result, C64};

/// Tolerance on `|g1 ± g2| ≤ 1` before a Kraus set is rejected.
pub const MAGNITUDE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(r, c)| {
        a[[r / br, c / bc]] * b[[r % br, c % bc]]
    })
}

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 3 or 9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Array2<C64>);

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(m: Array2<C64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c,
            });
        }
        if r != 3 && r != 9 {
            return Err(Error::DimensionMismatch {
                expected: 9,
                got: r,
            });
        }
        for i in 0..r {
            for j in i..r {
                if (m[[i, j]] - m[[j, i]].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidInput(format!(
                        "density matrix not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        let trace: C64 = (0..r).map(|i| m[[i, i]]).sum();
        if (trace - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidInput(format!("trace {trace} differs from 1")));
        }
        let min = hermitian_eigenvalues(&m)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(m))
    }

    /// Skips validation; used for channel outputs whose validity follows from
    /// the input and a complete Kraus set.
    pub(crate) fn from_trusted(m: Array2<C64>) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector; normalizes first.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize zero state".into()));
        }
        let n = psi.len();
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| {
            psi[i] * psi[j].conj() / (norm * norm)
        }))
    }

    /// `(|AA⟩ + |BB⟩ + |CC⟩)/√3`.
    pub fn maximally_entangled() -> Self {
        let mut m = Array2::zeros((9, 9));
        for i in [0, 4, 8] {
            for j in [0, 4, 8] {
                m[[i, j]] = re(1.0 / 3.0);
            }
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<C64> {
        self.0
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.0[[i, i]]).sum()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != 3 || other.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: self.dim().max(other.dim()),
            });
        }
        Ok(Self(kron(&self.0, &other.0)))
    }
}

/// The three Kraus operators of the single-qutrit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub k1: Array2<C64>,
    pub k2: Array2<C64>,
    pub k3: Array2<C64>,
}

impl KrausSet {
    pub fn identity() -> Self {
        kraus_set(re(1.0), zero()).expect("identity channel is valid")
    }

    pub fn from_pair(pair: &PropagatorPair) -> Result<Self> {
        kraus_set(pair.g1, pair.g2)
    }

    pub fn operators(&self) -> [&Array2<C64>; 3] {
        [&self.k1, &self.k2, &self.k3]
    }

    /// `Σ_i K_i† K_i`.
    pub fn completeness(&self) -> Array2<C64> {
        self.operators()
            .iter()
            .map(|k| dagger(k).dot(*k))
            .fold(Array2::zeros((3, 3)), |acc, m| acc + m)
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn completeness_defect(&self) -> f64 {
        let c = self.completeness();
        c.indexed_iter()
            .map(|((i, j), z)| (z - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    }
}

/// `sqrt((1 − |g|²)/2)` with the radicand clamped at zero inside the
/// magnitude tolerance.
fn decay_prefactor(g: C64, sign: char) -> Result<f64> {
    let mag = g.norm();
    if mag > 1.0 + MAGNITUDE_TOL || !mag.is_finite() {
        return Err(Error::PropagatorOutOfRange {
            sign,
            magnitude: mag,
        });
    }
    Ok(((1.0 - mag * mag).max(0.0) / 2.0).sqrt())
}

/// Kraus operators for the propagator values `(G₁, G₂)`.
pub fn kraus_set(g1: C64, g2: C64) -> Result<KrausSet> {
    let c_minus = decay_prefactor(g1 - g2, '-')?;
    let c_plus = decay_prefactor(g1 + g2, '+')?;
    let z = zero();
    Ok(KrausSet {
        k1: array![[g1, g2, z], [g2, g1, z], [z, z, re(1.0)]],
        k2: array![[z, z, z], [z, z, z], [re(c_minus), re(-c_minus), z]],
        k3: array![[z, z, z], [z, z, z], [re(c_plus), re(c_plus), z]],
    })
}

fn conjugate_sum<'a>(
    rho: &Array2<C64>,
    ops: impl Iterator<Item = Array2<C64>> + 'a,
) -> Array2<C64> {
    let n = rho.nrows();
    ops.fold(Array2::zeros((n, n)), |acc, k| {
        acc + k.dot(rho).dot(&dagger(&k))
    })
}

fn is_zero(m: &Array2<C64>) -> bool {
    m.iter().all(|z| *z == zero())
}

/// `Σ_i K_i ρ K_i†` on a single qutrit.
pub fn apply_single(rho: &DensityMatrix, ks: &KrausSet) -> Result<DensityMatrix> {
    if rho.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: rho.dim(),
        });
    }
    let ops = ks.operators().into_iter().filter(|k| !is_zero(k)).cloned();
    Ok(DensityMatrix::from_trusted(conjugate_sum(
        rho.matrix(),
        ops,
    )))
}

/// `Σ_{k,l} (K_k ⊗ K_l) ρ (K_k ⊗ K_l)†`, the same channel acting on both
/// qutrits.
pub fn apply_two(rho: &DensityMatrix, ks: &KrausSet) -> Result<DensityMatrix> {
    if rho.dim() != 9 {
        return Err(Error::DimensionMismatch {
            expected: 9,
            got: rho.dim(),
        });
    }
    let live: Vec<&Array2<C64>> = ks.operators().into_iter().filter(|k| !is_zero(k)).collect();
    let ops = live
        .iter()
        .flat_map(|a| live.iter().map(move |b| kron(a, b)));
    Ok(DensityMatrix::from_trusted(conjugate_sum(
        rho.matrix(),
        ops,
    )))
}

/// Reduced single-atom state built directly from the amplitudes of atom 1
/// and the ground amplitude; the `|C⟩⟨C|` entry absorbs the population held
/// by the reservoir and other atoms.
pub fn density_from_amplitudes(zeta_a: C64, zeta_b: C64, zeta0: C64) -> Result<DensityMatrix> {
    let excited = zeta_a.norm_sqr() + zeta_b.norm_sqr();
    if excited > 1.0 + 1e-10 {
        return Err(Error::InvalidInput(format!(
            "excited population {excited} exceeds 1"
        )));
    }
    if zeta0.norm_sqr() > 1.0 - excited + 1e-10 {
        return Err(Error::InvalidInput(format!(
            "|zeta0|^2 = {} exceeds the remaining population {}",
            zeta0.norm_sqr(),
            1.0 - excited
        )));
    }
    let m = array![
        [
            re(zeta_a.norm_sqr()),
            zeta_a * zeta_b.conj(),
            zeta_a * zeta0.conj()
        ],
        [
            zeta_b * zeta_a.conj(),
            re(zeta_b.norm_sqr()),
            zeta_b * zeta0.conj()
        ],
        [
            zeta0 * zeta_a.conj(),
            zeta0 * zeta_b.conj(),
            re(1.0 - excited)
        ],
    ];
    Ok(DensityMatrix::from_trusted(m))
}
