//! Small-scale optimizers: projected gradient on the simplex / orthant with multistart,
//! and a log-det barrier interior-point method for linear matrix inequalities.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, ZERO};

#[derive(Debug, Clone, Copy)]
pub struct PgOptions {
    pub max_iter: usize,
    pub step_tol: f64,
}

impl Default for PgOptions {
    fn default() -> Self {
        PgOptions { max_iter: 2000, step_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct PgResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
}

/// Euclidean projection onto {x : x_i ≥ floor, Σx = 1}.
pub fn project_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let d = v.len();
    let budget = 1.0 - floor * d as f64;
    let mut u: Vec<f64> = v.iter().map(|x| x - floor).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - budget) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - floor - tau).max(0.0) + floor).collect()
}

pub fn project_orthant(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0)).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Projected gradient with Barzilai–Borwein steps and Armijo backtracking.
pub fn projected_gradient<F, P>(obj: &F, proj: &P, x0: &[f64], opts: PgOptions) -> PgResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + ?Sized,
    P: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let mut x = proj(x0);
    let (mut fx, mut g) = obj(&x);
    let mut alpha = 1.0;
    let mut iters = 0;
    while iters < opts.max_iter {
        iters += 1;
        let mut a = alpha;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - a * gi).collect();
            let xn = proj(&trial);
            let (fnew, gnew) = obj(&xn);
            if fnew <= fx - 1e-4 * dist2(&xn, &x) / a || dist2(&xn, &x) < 1e-32 {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            a *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else { break };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(p, q)| p - q).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(p, q)| p - q).collect();
        let step = dist2(&xn, &x).sqrt();
        let sy: f64 = s.iter().zip(&y).map(|(p, q)| p * q).sum();
        let ss: f64 = s.iter().map(|p| p * p).sum();
        alpha = if sy > 1e-300 { (ss / sy).clamp(1e-12, 1e6) } else { (a * 2.0).min(1e6) };
        x = xn;
        fx = fnew;
        g = gnew;
        if step < opts.step_tol {
            break;
        }
    }
    PgResult { x, value: fx, iters }
}

/// Runs `projected_gradient` from every start in parallel; the best value wins, ties by start index.
pub fn multistart<F, P>(obj: &F, proj: &P, starts: &[Vec<f64>], opts: PgOptions) -> PgResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync + ?Sized,
    P: Fn(&[f64]) -> Vec<f64> + Sync + ?Sized,
{
    let runs: Vec<PgResult> = starts.par_iter().map(|s| projected_gradient(obj, proj, s, opts)).collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = k;
        }
    }
    runs.into_iter().nth(best).expect("at least one start")
}

/// Affine Hermitian matrix function F(y) = F0 + Σ_k y_k F_k, stored sparsely.
#[derive(Debug, Clone)]
pub struct Lmi {
    pub f0: ComplexMatrix,
    pub terms: Vec<(usize, ComplexMatrix)>,
}

impl Lmi {
    pub fn eval(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = self.f0.clone();
        for (k, fk) in &self.terms {
            if y[*k] != 0.0 {
                for (a, b) in m.data_mut().iter_mut().zip(fk.data()) {
                    *a += b * y[*k];
                }
            }
        }
        m
    }

    /// Scalar constraint a0 + Σ a_k y_k ≥ 0.
    pub fn scalar(a0: f64, coeffs: &[(usize, f64)]) -> Self {
        Lmi {
            f0: ComplexMatrix::diag(&[a0]),
            terms: coeffs.iter().map(|&(k, a)| (k, ComplexMatrix::diag(&[a]))).collect(),
        }
    }
}

/// Hermitian basis of d×d matrices: E_ii, then E_ij + E_ji and i(E_ij − E_ji) for i < j.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(i, j)] = C64::new(1.0, 0.0);
            s[(j, i)] = C64::new(1.0, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = C64::new(0.0, 1.0);
            a[(j, i)] = C64::new(0.0, -1.0);
            out.push(a);
        }
    }
    out
}

/// Lower Cholesky factor of a Hermitian matrix; None unless positive definite.
pub fn cholesky(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut s = m[(j, j)].re;
        for k in 0..j {
            s -= l[(j, k)].norm_sqr();
        }
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        let ljj = s.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / ljj;
        }
    }
    Some(l)
}

/// Inverse and log-determinant from a Cholesky factor.
fn chol_inverse(l: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let n = l.rows();
    let mut linv = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut v = if i == col { C64::new(1.0, 0.0) } else { ZERO };
            for k in col..i {
                v -= l[(i, k)] * linv[(k, col)];
            }
            linv[(i, col)] = v / l[(i, i)];
        }
    }
    let logdet = 2.0 * (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>();
    (linv.adjoint().matmul(&linv), logdet)
}

/// Solves the real symmetric system H x = b by Gaussian elimination with partial pivoting.
pub fn solve_real(h: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut a: Vec<Vec<f64>> = h.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for k in col..=n {
                    a[i][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = a[i][n];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[derive(Debug, Clone)]
pub struct SdpResult {
    pub y: Vec<f64>,
    pub value: f64,
    /// Duality-gap bound m/t at termination.
    pub gap: f64,
}

/// Minimizes c·y subject to every LMI being positive semidefinite, starting from a strictly
/// feasible y0, by the log-det barrier method with damped Newton centering.
pub fn sdp_barrier(c: &[f64], lmis: &[Lmi], y0: &[f64], target_gap: f64) -> Result<SdpResult> {
    let n = c.len();
    let m: f64 = lmis.iter().map(|l| l.f0.rows() as f64).sum();
    let mut y = y0.to_vec();
    if lmis.iter().any(|l| cholesky(&l.eval(&y)).is_none()) {
        return Err(Error::NoSolution("barrier start is not strictly feasible".into()));
    }
    let barrier = |y: &[f64], t: f64| -> Option<f64> {
        let mut phi = t * c.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        for l in lmis {
            let ch = cholesky(&l.eval(y))?;
            phi -= 2.0 * (0..ch.rows()).map(|i| ch[(i, i)].re.ln()).sum::<f64>();
        }
        Some(phi)
    };
    let mut t = 1.0;
    let mut stalled = false;
    loop {
        for _ in 0..100 {
            let mut grad: Vec<f64> = c.iter().map(|ci| t * ci).collect();
            let mut hess = vec![vec![0.0; n]; n];
            for l in lmis {
                let ch = cholesky(&l.eval(&y)).expect("iterate stays strictly feasible");
                let (inv, _) = chol_inverse(&ch);
                let prods: Vec<(usize, ComplexMatrix)> =
                    l.terms.iter().map(|(k, fk)| (*k, inv.matmul(fk))).collect();
                for (a, (k, pk)) in prods.iter().enumerate() {
                    grad[*k] -= pk.trace().re;
                    for (b, (l2, qk)) in prods.iter().enumerate().skip(a) {
                        let v = pk.trace_product(qk).re;
                        hess[*k][*l2] += v;
                        if b != a {
                            hess[*l2][*k] += v;
                        }
                    }
                }
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Some(dy) = solve_real(&hess, &neg) else {
                stalled = true;
                break;
            };
            let dec2: f64 = -grad.iter().zip(&dy).map(|(g, d)| g * d).sum::<f64>();
            if dec2 < 1e-20 {
                break;
            }
            let f0 = barrier(&y, t).expect("feasible");
            let mut s = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let yn: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a + s * b).collect();
                if let Some(fnew) = barrier(&yn, t) {
                    if fnew <= f0 - 0.25 * s * dec2 {
                        y = yn;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
            if dec2 * 0.5 < 1e-12 {
                break;
            }
        }
        let gap = m / t;
        if gap < target_gap || stalled {
            let value = c.iter().zip(&y).map(|(a, b)| a * b).sum();
            if stalled && gap > 1e-6 {
                return Err(Error::OptimizerStalled(gap));
            }
            return Ok(SdpResult { y, value, gap });
        }
        t *= 8.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5], 0.0);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0, -1.0], 0.0);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[2.0, 0.0, -1.0], 0.1);
        assert!((p[0] - 0.8).abs() < 1e-15 && (p[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn pg_quadratic_on_simplex() {
        let target = [0.7, 0.5, -0.2];
        let obj = |x: &[f64]| {
            let v = x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum();
            (v, x.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect())
        };
        let proj = |v: &[f64]| project_simplex(v, 0.0);
        let r = projected_gradient(&obj, &proj, &[1.0 / 3.0; 3], PgOptions::default());
        assert!((r.x[0] - 0.6).abs() < 1e-8 && (r.x[1] - 0.4).abs() < 1e-8 && r.x[2].abs() < 1e-8);
    }

    #[test]
    fn barrier_eigenvalue_bound() {
        // min y s.t. y I − A ⪰ 0 gives λ_max(A).
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let lmi = Lmi { f0: a.scale(-1.0), terms: vec![(0, ComplexMatrix::identity(2))] };
        let r = sdp_barrier(&[1.0], &[lmi], &[10.0], 1e-11).unwrap();
        assert!((r.value - 5f64.sqrt()).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn linear_solver() {
        let h = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let x = solve_real(&h, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14 && (x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
    }
}
