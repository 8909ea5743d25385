//! Dense complex linear algebra, matrix functions, distances and entropies.

mod eig;
pub mod matrix;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use eig::{hermitian_eig, Eigh, MAX_SWEEPS, TOL_HERM};
pub(crate) use eig::{eigh, eigvals};
pub use matrix::{c, gell_mann, inner, kron_vec, norm, pauli, r, ComplexMatrix, I, ONE, ZERO};

use crate::error::{Error, Result};

pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_NORM: f64 = 1e-10;
/// Eigenvalues below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Validated density operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.mat
    }
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), got: mat.cols() });
        }
        let defect = mat.hermiticity_defect();
        if defect > TOL_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::BadTrace(tr.re));
        }
        let herm = mat.hermitian_part();
        let lmin = *eigh(&herm).values.last().unwrap();
        if lmin < -TOL_PSD {
            return Err(Error::NotPsd(lmin));
        }
        Ok(DensityMatrix { mat: herm })
    }

    /// Wraps a matrix the caller knows to be a state (e.g. a channel output).
    /// Only the Hermitian part is kept; no spectrum check.
    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        DensityMatrix { mat: mat.hermitian_part() }
    }

    /// Symmetrizes and rescales to unit trace; rejects matrices with no weight.
    pub fn normalized(mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::BadTrace(tr));
        }
        DensityMatrix::new(mat.hermitian_part().scale(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix { mat: ComplexMatrix::identity(d).scale(1.0 / d as f64) }
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        DensityMatrix::new(ComplexMatrix::diag(p))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eig(&self) -> Eigh {
        eigh(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        self.mat.hs_inner(&self.mat).re
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.real_diagonal()
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { mat: self.mat.kron(&other.mat) }
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> DensityMatrix {
        DensityMatrix::new_unchecked(u.matmul(&self.mat).matmul(&u.adjoint()))
    }

    pub fn mix(&self, other: &DensityMatrix, p: f64) -> DensityMatrix {
        DensityMatrix { mat: &self.mat.scale(p) + &other.mat.scale(1.0 - p) }
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureStateVec {
    amplitudes: Vec<C64>,
}

impl PureStateVec {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized(n));
        }
        Ok(PureStateVec { amplitudes })
    }

    pub fn from_unnormalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(PureStateVec { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| r(x)).collect())
    }

    pub fn basis_state(d: usize, k: usize) -> Self {
        let mut a = vec![ZERO; d];
        a[k] = ONE;
        PureStateVec { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { mat: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes) }
    }
}

/// Orthonormal basis fixing the incoherent set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBasis {
    vectors: Vec<Vec<C64>>,
    #[serde(skip)]
    computational: bool,
}

impl ReferenceBasis {
    pub fn computational(d: usize) -> Self {
        let vectors = (0..d).map(|k| PureStateVec::basis_state(d, k).amplitudes).collect();
        ReferenceBasis { vectors, computational: true }
    }

    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::ParamOutOfRange("empty basis".into()));
        }
        let mut worst: f64 = 0.0;
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
            for (j, w) in vectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((inner(v, w) - target).norm());
            }
        }
        if worst > TOL_NORM {
            return Err(Error::NotOrthonormal(worst));
        }
        let computational = vectors
            .iter()
            .enumerate()
            .all(|(i, v)| v.iter().enumerate().all(|(k, z)| if k == i { *z == ONE } else { *z == ZERO }));
        Ok(ReferenceBasis { vectors, computational })
    }

    /// Basis given by the columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::new((0..u.cols()).map(|j| u.col(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn is_computational(&self) -> bool {
        self.computational
    }

    /// Unitary whose columns are the basis vectors.
    pub fn unitary(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.vectors[j][i])
    }

    pub(crate) fn check(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.dim() });
        }
        Ok(())
    }
}

/// Matrix of ρ in the given basis, ⟨b_i|ρ|b_j⟩.
pub fn in_basis(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<DensityMatrix> {
    basis.check(rho.dim())?;
    if basis.is_computational() {
        return Ok(rho.clone());
    }
    let b = basis.unitary();
    Ok(DensityMatrix::new_unchecked(b.adjoint().matmul(rho.mat()).matmul(&b)))
}

pub fn matrix_sqrt(rho: &DensityMatrix) -> ComplexMatrix {
    rho.eig().apply(|l| sqrt_floor(clamp(l)))
}

/// √l with eigenvalues at rounding level treated as exact zeros.
fn sqrt_floor(l: f64) -> f64 {
    if l < 1e-15 { 0.0 } else { l.sqrt() }
}

/// Square root of a PSD matrix; every negative eigenvalue is treated as zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    eigh(m).apply(sqrt_floor)
}

#[inline]
pub(crate) fn clamp(l: f64) -> f64 {
    if l < 0.0 && l > -TOL_PSD {
        0.0
    } else {
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keep {
    A,
    B,
}

pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: da * db, got: rho.dim() });
    }
    Ok(DensityMatrix::new_unchecked(partial_trace_mat(rho.mat(), dims, keep)))
}

pub(crate) fn partial_trace_mat(m: &ComplexMatrix, (da, db): (usize, usize), keep: Keep) -> ComplexMatrix {
    match keep {
        Keep::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Keep::B => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    }
}

/// Reduced state on the listed subsystems (in the given order, which must be increasing).
pub fn reduce(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch { expected: total, got: rho.dim() });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::ParamOutOfRange("subsystem list must be increasing and in range".into()));
    }
    let n = dims.len();
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let digits = |mut idx: usize, sys: &[usize]| -> Vec<usize> {
        let mut out = vec![0; sys.len()];
        for (pos, &s) in sys.iter().enumerate().rev() {
            out[pos] = idx % dims[s];
            idx /= dims[s];
        }
        out
    };
    let compose = |kd: &[usize], td: &[usize]| -> usize {
        let mut full = vec![0; n];
        for (p, &s) in keep.iter().enumerate() {
            full[s] = kd[p];
        }
        for (p, &s) in traced.iter().enumerate() {
            full[s] = td[p];
        }
        full.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
    };
    let m = rho.mat();
    let out = ComplexMatrix::from_fn(dk, dk, |i, j| {
        let (ki, kj) = (digits(i, keep), digits(j, keep));
        (0..dt)
            .map(|t| {
                let td = digits(t, &traced);
                m[(compose(&ki, &td), compose(&kj, &td))]
            })
            .sum()
    });
    Ok(DensityMatrix::new_unchecked(out))
}

/// ρ^{T_B} for a bipartite operator with dims (dA, dB).
pub fn partial_transpose_b(m: &ComplexMatrix, (da, db): (usize, usize)) -> ComplexMatrix {
    ComplexMatrix::from_fn(da * db, da * db, |row, col| {
        let (a, b) = (row / db, row % db);
        let (a2, b2) = (col / db, col % db);
        m[(a * db + b2, a2 * db + b)]
    })
}

/// Reorders a bipartite operator from A⊗B to B⊗A.
pub fn swap_subsystems(m: &ComplexMatrix, (da, db): (usize, usize)) -> ComplexMatrix {
    ComplexMatrix::from_fn(da * db, da * db, |row, col| {
        let (b, a) = (row / da, row % da);
        let (b2, a2) = (col / da, col % da);
        m[(a * db + b, a2 * db + b2)]
    })
}

/// Σ_k (P_k⊗I) m (P_k⊗I) for the rank-one projectors onto the given A-side vectors.
pub fn dephase_a(m: &ComplexMatrix, (da, db): (usize, usize), basis: &[Vec<C64>]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for v in basis {
        // block ⟨v|m|v⟩_A (db×db)
        let blk = ComplexMatrix::from_fn(db, db, |i, j| {
            let mut s = ZERO;
            for a in 0..da {
                for b in 0..da {
                    s += v[a].conj() * v[b] * m[(a * db + i, b * db + j)];
                }
            }
            s
        });
        out = &out + &ComplexMatrix::outer(v, v).kron(&blk);
    }
    out
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    eigvals(&m.adjoint().matmul(m)).into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_hermitian(TOL_HERM) {
        eigvals(m).iter().map(|l| l.abs()).sum()
    } else {
        singular_values(m).iter().sum()
    }
}

pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.frobenius()
}

/// Uhlmann fidelity (tr√(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let s = matrix_sqrt(rho);
    let inner = s.matmul(sigma.mat()).matmul(&s);
    let root: f64 = eigvals(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    (root * root).min(1.0)
}

#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(clamp(x))).sum::<f64>()
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    shannon(&[p, 1.0 - p])
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon(&rho.eigenvalues()).max(0.0)
}

/// S(ρ‖σ) in bits; +∞ when supp ρ ⊄ supp σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let es = sigma.eig();
    let mut cross = 0.0;
    for (k, &mu) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let w = inner(&v, &rho.mat().matvec(&v)).re;
        if mu < SUPPORT_TOL {
            if w > SUPPORT_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        cross -= w * mu.log2();
    }
    (cross - von_neumann_entropy(rho)).max(0.0)
}

/// Full dephasing in the given basis, returned in the original representation.
pub fn dephase(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<DensityMatrix> {
    basis.check(rho.dim())?;
    if basis.is_computational() {
        return Ok(DensityMatrix::new_unchecked(ComplexMatrix::diag(&rho.populations())));
    }
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for v in basis.vectors() {
        let p = inner(v, &rho.mat().matvec(v)).re;
        out = &out + &ComplexMatrix::outer(v, v).scale(p);
    }
    Ok(DensityMatrix::new_unchecked(out))
}

/// Two-qubit Bloch data: x_i = tr ρ(σ_i⊗I), y_j = tr ρ(I⊗σ_j), r_ij = tr ρ(σ_i⊗σ_j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochDecomposition2Q {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub r: [[f64; 3]; 3],
}

impl BlochDecomposition2Q {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(4);
        for i in 0..3 {
            m = &m + &pauli(i + 1).kron(&pauli(0)).scale(self.x[i]);
            m = &m + &pauli(0).kron(&pauli(i + 1)).scale(self.y[i]);
            for j in 0..3 {
                m = &m + &pauli(i + 1).kron(&pauli(j + 1)).scale(self.r[i][j]);
            }
        }
        m.scale(0.25)
    }
}

pub fn bloch_decompose_2q(rho: &DensityMatrix) -> Result<BlochDecomposition2Q> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let m = rho.mat();
    let mut b = BlochDecomposition2Q { x: [0.0; 3], y: [0.0; 3], r: [[0.0; 3]; 3] };
    for i in 0..3 {
        b.x[i] = m.trace_product(&pauli(i + 1).kron(&pauli(0))).re;
        b.y[i] = m.trace_product(&pauli(0).kron(&pauli(i + 1))).re;
        for j in 0..3 {
            b.r[i][j] = m.trace_product(&pauli(i + 1).kron(&pauli(j + 1))).re;
        }
    }
    Ok(b)
}

/// Bloch vector of a qubit state.
pub fn bloch_vector(rho: &DensityMatrix) -> [f64; 3] {
    let m = rho.mat();
    [1, 2, 3].map(|k| m.trace_product(&pauli(k)).re)
}

pub(crate) fn require_dim(rho: &DensityMatrix, d: usize) -> Result<()> {
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho.dim() });
    }
    Ok(())
}

/// Finds a factorization d = dA·dB from an explicit hint or the square default.
pub fn split_dims(d: usize, da: Option<usize>) -> Result<(usize, usize)> {
    let da = match da {
        Some(a) => a,
        None => {
            let s = (d as f64).sqrt().round() as usize;
            if s * s != d {
                return Err(Error::DimensionMismatch { expected: s * s, got: d });
            }
            s
        }
    };
    if da == 0 || d % da != 0 {
        return Err(Error::DimensionMismatch { expected: da, got: d });
    }
    Ok((da, d / da))
}
