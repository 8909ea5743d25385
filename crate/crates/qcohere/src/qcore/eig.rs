use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const TOL_HERM: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 500;
const OFF_TOL: f64 = 1e-14;

/// Eigen-decomposition of a Hermitian matrix: values descending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// V diag(f(λ)) V†
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut s = ZERO;
            for k in 0..n {
                if fv[k] != 0.0 {
                    s += v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            s
        })
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigh> {
    let defect = m.hermiticity_defect();
    if defect > TOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    jacobi(m.hermitian_part())
}

/// Eigen-decomposition of the Hermitian part, skipping the tolerance check.
/// For matrices that are Hermitian by construction but carry rounding noise.
pub(crate) fn eigh(m: &ComplexMatrix) -> Eigh {
    jacobi(m.hermitian_part()).expect("Jacobi iteration cap reached on a small Hermitian matrix")
}

pub(crate) fn eigvals(m: &ComplexMatrix) -> Vec<f64> {
    eigh(m).values
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> Result<Eigh> {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius().max(1.0);
    let mut converged = off_norm(&a) < OFF_TOL * scale;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_norm(&a) < OFF_TOL * scale;
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigh { values, vectors })
}

// One complex Jacobi rotation zeroing a[p][q]. J = diag-phase then real Givens.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let babs = b.norm();
    if babs < 1e-300 {
        return;
    }
    let phase = b / babs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * babs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    // J columns: col p = (c, -s e^{-iφ}), col q = (s, c e^{-iφ}) in rows (p, q)
    let jpp = C64::new(cs, 0.0);
    let jpq = C64::new(sn, 0.0);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}
