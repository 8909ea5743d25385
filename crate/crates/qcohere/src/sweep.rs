//! Brute-force searches over local projective measurements: a (θ, φ) grid with pattern-search
//! refinement for qubits, a two-sided variant, and random-restart search over U(m) for qudits.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{eigh, ComplexMatrix, ZERO};
use crate::rng;
use crate::states::random_unitary_with;

/// Qubit von Neumann measurement Π± = (I ± n̂·σ)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitProjectivePair {
    pub theta: f64,
    pub phi: f64,
}

impl QubitProjectivePair {
    /// Folds arbitrary angles into θ∈[0,π], φ∈[0,2π) describing the same direction.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(2.0 * PI);
        let mut p = phi;
        if t > PI {
            t = 2.0 * PI - t;
            p += PI;
        }
        QubitProjectivePair { theta: t, phi: p.rem_euclid(2.0 * PI) }
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Eigenvectors |n+⟩, |n−⟩ of n̂·σ.
    pub fn kets(&self) -> [[C64; 2]; 2] {
        kets(self.theta, self.phi)
    }

    pub fn basis(&self) -> Vec<Vec<C64>> {
        self.kets().iter().map(|k| k.to_vec()).collect()
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        self.kets().map(|k| ComplexMatrix::outer(&k, &k))
    }
}

#[inline]
pub fn kets(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSweep {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub refine_iters: usize,
}

impl Default for MeasurementSweep {
    fn default() -> Self {
        MeasurementSweep { grid_theta: 90, grid_phi: 180, refine_iters: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptimum {
    pub value: f64,
    pub angles: QubitProjectivePair,
}

const SEEDS: usize = 4;

impl MeasurementSweep {
    pub fn new(grid_theta: usize, grid_phi: usize, refine_iters: usize) -> Result<Self> {
        let s = MeasurementSweep { grid_theta, grid_phi, refine_iters };
        s.validate()?;
        Ok(s)
    }

    /// Per-side grid for four-angle (two-sided) searches.
    pub fn coarse() -> Self {
        MeasurementSweep { grid_theta: 12, grid_phi: 24, refine_iters: 300 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_theta < 8 || self.grid_phi < 8 {
            return Err(Error::ParamOutOfRange(format!(
                "sweep grid {}x{} below the 8x8 minimum",
                self.grid_theta, self.grid_phi
            )));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        let nt = self.grid_theta;
        let np = self.grid_phi;
        (0..nt)
            .flat_map(|i| (0..np).map(move |j| (i as f64 * PI / (nt - 1) as f64, 2.0 * PI * j as f64 / np as f64)))
            .collect()
    }

    fn spacing(&self) -> [f64; 2] {
        [PI / (self.grid_theta - 1) as f64, 2.0 * PI / self.grid_phi as f64]
    }

    pub fn minimize<F>(&self, f: &F) -> SweepOptimum
    where
        F: Fn(f64, f64) -> f64 + Sync + ?Sized,
    {
        let pts = self.grid();
        let vals: Vec<f64> = pts.par_iter().map(|&(t, p)| f(t, p)).collect();
        let seeds = best_indices(&vals, SEEDS);
        let g = |x: &[f64]| f(x[0], x[1]);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &s in &seeds {
            let (v, x) = pattern_search(&g, vec![pts[s].0, pts[s].1], &self.spacing(), self.refine_iters, vals[s]);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
        let (value, x) = best.expect("nonempty grid");
        SweepOptimum { value, angles: QubitProjectivePair::new(x[0], x[1]) }
    }

    pub fn maximize<F>(&self, f: &F) -> SweepOptimum
    where
        F: Fn(f64, f64) -> f64 + Sync + ?Sized,
    {
        let o = self.minimize(&|t, p| -f(t, p));
        SweepOptimum { value: -o.value, angles: o.angles }
    }

    /// Minimizes f over a pair of qubit measurements, this grid applied to each side.
    pub fn minimize_two_sided<F>(&self, f: &F) -> (f64, [QubitProjectivePair; 2])
    where
        F: Fn(f64, f64, f64, f64) -> f64 + Sync + ?Sized,
    {
        let side = self.grid();
        let n = side.len();
        let vals: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (a, b) = (side[k / n], side[k % n]);
                f(a.0, a.1, b.0, b.1)
            })
            .collect();
        let seeds = best_indices(&vals, SEEDS);
        let [ht, hp] = self.spacing();
        let g = |x: &[f64]| f(x[0], x[1], x[2], x[3]);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &s in &seeds {
            let (a, b) = (side[s / n], side[s % n]);
            let (v, x) = pattern_search(&g, vec![a.0, a.1, b.0, b.1], &[ht, hp, ht, hp], self.refine_iters, vals[s]);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
        let (value, x) = best.expect("nonempty grid");
        (value, [QubitProjectivePair::new(x[0], x[1]), QubitProjectivePair::new(x[2], x[3])])
    }
}

fn best_indices(vals: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Compass search over coordinate and pairwise-diagonal moves with step halving.
pub fn pattern_search<F>(f: &F, mut x: Vec<f64>, h0: &[f64], iters: usize, fx0: f64) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    if n == 2 {
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            dirs.push(vec![a, b]);
        }
    }
    let mut h = h0.to_vec();
    let mut fx = fx0;
    for _ in 0..iters {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for d in &dirs {
            let y: Vec<f64> = (0..n).map(|i| x[i] + h[i] * d[i]).collect();
            let fy = f(&y);
            if fy < fx && best.as_ref().is_none_or(|(bv, _)| fy < *bv) {
                best = Some((fy, y));
            }
        }
        match best {
            Some((fy, y)) => {
                fx = fy;
                x = y;
            }
            None => {
                h.iter_mut().for_each(|v| *v *= 0.5);
                if h.iter().all(|v| *v < 1e-13) {
                    break;
                }
            }
        }
    }
    (fx, x)
}

/// U = exp(iH) for Hermitian H.
pub fn expi_hermitian(h: &ComplexMatrix) -> ComplexMatrix {
    let e = eigh(h);
    let n = h.rows();
    let v = &e.vectors;
    ComplexMatrix::from_fn(n, n, |i, j| {
        let mut s = ZERO;
        for k in 0..n {
            s += v[(i, k)] * v[(j, k)].conj() * C64::from_polar(1.0, e.values[k]);
        }
        s
    })
}

/// Minimizes f over orthonormal bases of C^m (columns of a unitary) by pattern search in the
/// Hermitian generator around random starting unitaries.
pub fn minimize_over_unitaries<F>(m: usize, f: &F, restarts: usize, seed: u64) -> (f64, ComplexMatrix)
where
    F: Fn(&ComplexMatrix) -> f64 + Sync + ?Sized,
{
    let basis = crate::optim::hermitian_basis(m);
    let runs: Vec<(f64, ComplexMatrix)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let u0 = if k == 0 {
                ComplexMatrix::identity(m)
            } else {
                random_unitary_with(m, &mut rng::substream(seed, k as u64))
            };
            let build = |x: &[f64]| {
                let mut h = ComplexMatrix::zeros(m, m);
                for (xi, b) in x.iter().zip(&basis) {
                    h = &h + &b.scale(*xi);
                }
                u0.matmul(&expi_hermitian(&h))
            };
            let g = |x: &[f64]| f(&build(x));
            let x0 = vec![0.0; m * m];
            let f0 = g(&x0);
            let (v, x) = pattern_search(&g, x0, &vec![0.4; m * m], 400, f0);
            (v, build(&x))
        })
        .collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.0 < runs[best].0 {
            best = k;
        }
    }
    runs.into_iter().nth(best).expect("restarts ≥ 1")
}

/// ⟨u|ρ|v⟩_A blocks for a state with a qubit on side A.
#[derive(Debug, Clone)]
pub struct QubitBlocks {
    pub n: usize,
    pub b: [[ComplexMatrix; 2]; 2],
}

impl QubitBlocks {
    pub fn new(m: &ComplexMatrix, n: usize) -> Self {
        let blk = |a: usize, b: usize| ComplexMatrix::from_fn(n, n, |i, j| m[(a * n + i, b * n + j)]);
        QubitBlocks { n, b: [[blk(0, 0), blk(0, 1)], [blk(1, 0), blk(1, 1)]] }
    }

    pub fn sandwich(&self, u: &[C64; 2], v: &[C64; 2]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for a in 0..2 {
            for b in 0..2 {
                let w = u[a].conj() * v[b];
                for (o, x) in out.data_mut().iter_mut().zip(self.b[a][b].data()) {
                    *o += w * x;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kets_are_eigenvectors() {
        let q = QubitProjectivePair::new(0.7, 2.1);
        let n = q.direction();
        let ns = &(&crate::qcore::pauli(1).scale(n[0]) + &crate::qcore::pauli(2).scale(n[1])) + &crate::qcore::pauli(3).scale(n[2]);
        let [p, m] = q.kets();
        let np = ns.matvec(&p);
        let nm = ns.matvec(&m);
        for i in 0..2 {
            assert!((np[i] - p[i]).norm() < 1e-14);
            assert!((nm[i] + m[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn fold_angles() {
        let q = QubitProjectivePair::new(-0.3, 0.0);
        assert!((q.theta - 0.3).abs() < 1e-15 && (q.phi - PI).abs() < 1e-15);
    }

    #[test]
    fn sweep_finds_direction() {
        // maximize n·a for a fixed unit vector a
        let a = [0.3f64, -0.5, 0.8];
        let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        let s = MeasurementSweep::default();
        let o = s.maximize(&|t, p| {
            let d = QubitProjectivePair { theta: t, phi: p }.direction();
            (d[0] * a[0] + d[1] * a[1] + d[2] * a[2]) / na
        });
        assert!((o.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(MeasurementSweep::new(4, 16, 10).is_err());
    }
}
