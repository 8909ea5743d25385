//! Canonical state families, seeded random sampling and class recognizers.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    bloch_decompose_2q, c, require_dim, r, ComplexMatrix, DensityMatrix, PureStateVec, ONE, ZERO,
};
use crate::rng::{self, QRng};

const PSD_EIG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        BellDiagonalParams { c1, c2, c3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Weights on Ψ−, Φ−, Φ+, Ψ+ respectively.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let BellDiagonalParams { c1, c2, c3 } = *self;
        [
            (1.0 - c1 - c2 - c3) / 4.0,
            (1.0 - c1 + c2 + c3) / 4.0,
            (1.0 + c1 - c2 + c3) / 4.0,
            (1.0 + c1 + c2 - c3) / 4.0,
        ]
    }

    pub fn is_valid(&self) -> bool {
        self.eigenvalues().iter().all(|&l| l >= -PSD_EIG_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub diagonal: [f64; 4],
    /// (ρ14, ρ23)
    pub antidiag: [C64; 2],
}

pub fn bell_diagonal(p: BellDiagonalParams) -> Result<DensityMatrix> {
    let lmin = p.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -PSD_EIG_TOL {
        return Err(Error::NotPsd(lmin));
    }
    Ok(DensityMatrix::new_unchecked(bell_diagonal_mat(p.c1, p.c2, p.c3)))
}

fn bell_diagonal_mat(c1: f64, c2: f64, c3: f64) -> ComplexMatrix {
    let q = 0.25;
    ComplexMatrix::from_rows(&[
        vec![r(q * (1.0 + c3)), ZERO, ZERO, r(q * (c1 - c2))],
        vec![ZERO, r(q * (1.0 - c3)), r(q * (c1 + c2)), ZERO],
        vec![ZERO, r(q * (c1 + c2)), r(q * (1.0 - c3)), ZERO],
        vec![r(q * (c1 - c2)), ZERO, ZERO, r(q * (1.0 + c3))],
    ])
}

/// Swap operator F on C^d ⊗ C^d.
pub fn swap(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, j) = (row / d, row % d);
        if col == j * d + i {
            ONE
        } else {
            ZERO
        }
    })
}

/// ρ_W = (d−x)/(d³−d) I + (dx−1)/(d³−d) F, with x = tr(ρF).
pub fn werner(x: f64, d: usize) -> Result<DensityMatrix> {
    if !(-1.0..=1.0).contains(&x) || d < 2 {
        return Err(Error::ParamOutOfRange(format!("werner x={x}, d={d}")));
    }
    let df = d as f64;
    let den = df * df * df - df;
    let m = &ComplexMatrix::identity(d * d).scale((df - x) / den) + &swap(d).scale((df * x - 1.0) / den);
    Ok(DensityMatrix::new_unchecked(m))
}

/// ρ_I = (1−x)/(d²−1) I + (d²x−1)/(d³−d) Σ|ii⟩⟨jj|, with x the overlap with |Φ_d⟩.
pub fn isotropic(x: f64, d: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) || d < 2 {
        return Err(Error::ParamOutOfRange(format!("isotropic x={x}, d={d}")));
    }
    let df = d as f64;
    let a = (1.0 - x) / (df * df - 1.0);
    let b = (df * df * x - 1.0) / (df * df * df - df);
    let m = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let mut v = if row == col { a } else { 0.0 };
        if row % (d + 1) == 0 && col % (d + 1) == 0 {
            v += b;
        }
        r(v)
    });
    Ok(DensityMatrix::new_unchecked(m))
}

pub fn x_state(p: &XStateParams) -> Result<DensityMatrix> {
    let dg = p.diagonal;
    if dg.iter().any(|&v| v < 0.0) || (dg.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::ParamOutOfRange("X-state diagonal must be a probability vector".into()));
    }
    let [a14, a23] = p.antidiag;
    if a14.norm() > (dg[0] * dg[3]).sqrt() + 1e-12 {
        return Err(Error::NotPsd(-(a14.norm() - (dg[0] * dg[3]).sqrt())));
    }
    if a23.norm() > (dg[1] * dg[2]).sqrt() + 1e-12 {
        return Err(Error::NotPsd(-(a23.norm() - (dg[1] * dg[2]).sqrt())));
    }
    let mut m = ComplexMatrix::diag(&dg);
    m[(0, 3)] = a14;
    m[(3, 0)] = a14.conj();
    m[(1, 2)] = a23;
    m[(2, 1)] = a23.conj();
    Ok(DensityMatrix::new_unchecked(m))
}

/// |Ψ_d⟩ = Σ|i⟩/√d
pub fn maximally_coherent(d: usize) -> PureStateVec {
    let a = 1.0 / (d as f64).sqrt();
    PureStateVec::new(vec![r(a); d]).expect("uniform superposition is normalized")
}

/// (1−p) I/d + p |Ψ_d⟩⟨Ψ_d|
pub fn mcms(p: f64, d: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) || d == 0 {
        return Err(Error::ParamOutOfRange(format!("mcms p={p}, d={d}")));
    }
    Ok(DensityMatrix::maximally_mixed(d).mix(&maximally_coherent(d).density(), 1.0 - p))
}

/// |Φ+⟩ = (|00⟩+|11⟩)/√2
pub fn phi_plus() -> PureStateVec {
    let h = 0.5f64.sqrt();
    PureStateVec::new(vec![r(h), ZERO, ZERO, r(h)]).unwrap()
}

pub fn random_pure_with(d: usize, g: &mut QRng) -> PureStateVec {
    let amps: Vec<C64> = (0..d).map(|_| c(rng::normal(g), rng::normal(g))).collect();
    PureStateVec::from_unnormalized(amps).expect("Gaussian vector is nonzero almost surely")
}

pub fn random_pure(d: usize, seed: u64) -> Result<PureStateVec> {
    if d == 0 {
        return Err(Error::ParamOutOfRange("d must be positive".into()));
    }
    Ok(random_pure_with(d, &mut rng::rng(seed)))
}

pub fn random_density_with(d: usize, rank: usize, g: &mut QRng) -> DensityMatrix {
    let gm = ComplexMatrix::from_fn(d, rank, |_, _| c(rng::normal(g), rng::normal(g)));
    let w = gm.matmul(&gm.adjoint());
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale(1.0 / tr))
}

/// Ginibre ensemble: GG†/tr(GG†) with G a d×rank complex Gaussian matrix.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::ParamOutOfRange(format!("rank {rank} outside 1..={d}")));
    }
    Ok(random_density_with(d, rank, &mut rng::rng(seed)))
}

/// Haar unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary_with(d: usize, g: &mut QRng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| c(rng::normal(g), rng::normal(g))).collect();
        for u in &cols {
            let proj = crate::qcore::inner(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
        }
        let n = crate::qcore::norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    random_unitary_with(d, &mut rng::rng(seed))
}

/// Uniform triple from the tetrahedron of valid Bell-diagonal parameters.
pub fn random_bell_diagonal_params(g: &mut QRng) -> BellDiagonalParams {
    loop {
        let p = BellDiagonalParams::new(
            2.0 * rng::uniform(g) - 1.0,
            2.0 * rng::uniform(g) - 1.0,
            2.0 * rng::uniform(g) - 1.0,
        );
        if p.is_valid() {
            return p;
        }
    }
}

pub fn random_x_state_params(g: &mut QRng) -> XStateParams {
    let dg = rng::dirichlet(g, 4);
    let m14 = rng::uniform(g) * (dg[0] * dg[3]).sqrt();
    let m23 = rng::uniform(g) * (dg[1] * dg[2]).sqrt();
    let t1 = 2.0 * std::f64::consts::PI * rng::uniform(g);
    let t2 = 2.0 * std::f64::consts::PI * rng::uniform(g);
    XStateParams {
        diagonal: [dg[0], dg[1], dg[2], dg[3]],
        antidiag: [C64::from_polar(m14, t1), C64::from_polar(m23, t2)],
    }
}

pub fn is_x_state(rho: &DensityMatrix) -> Result<bool> {
    require_dim(rho, 4)?;
    let m = rho.mat();
    Ok((0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || m[(i, j)].norm() <= 1e-10)))
}

pub fn is_bell_diagonal(rho: &DensityMatrix) -> Result<Option<BellDiagonalParams>> {
    let b = bloch_decompose_2q(rho)?;
    let tol = 1e-10;
    let local = b.x.iter().chain(&b.y).all(|v| v.abs() <= tol);
    let offdiag = (0..3).all(|i| (0..3).all(|j| i == j || b.r[i][j].abs() <= tol));
    Ok((local && offdiag).then(|| BellDiagonalParams::new(b.r[0][0], b.r[1][1], b.r[2][2])))
}

/// X-state parameters of an X-shaped state.
pub fn x_state_params(rho: &DensityMatrix) -> Result<Option<XStateParams>> {
    if !is_x_state(rho)? {
        return Ok(None);
    }
    let m = rho.mat();
    Ok(Some(XStateParams { diagonal: [0, 1, 2, 3].map(|i| m[(i, i)].re), antidiag: [m[(0, 3)], m[(1, 2)]] }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{partial_trace, Keep};

    #[test]
    fn bell_diagonal_examples() {
        let i4 = bell_diagonal(BellDiagonalParams::new(0.0, 0.0, 0.0)).unwrap();
        assert!(i4.mat().max_abs_diff(DensityMatrix::maximally_mixed(4).mat()) < 1e-15);
        let phi = bell_diagonal(BellDiagonalParams::new(1.0, -1.0, 1.0)).unwrap();
        assert!(phi.mat().max_abs_diff(phi_plus().density().mat()) < 1e-15);
        assert!(matches!(bell_diagonal(BellDiagonalParams::new(0.8, 0.4, 0.2)), Err(Error::NotPsd(_))));
    }

    #[test]
    fn bell_eigenvalues_match_spectrum() {
        let p = BellDiagonalParams::new(0.5, 0.3, -0.1);
        let mut lam = p.eigenvalues().to_vec();
        lam.sort_by(|a, b| b.total_cmp(a));
        let eig = bell_diagonal(p).unwrap().eigenvalues();
        for (a, b) in lam.iter().zip(&eig) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn werner_and_isotropic() {
        for d in 2..5 {
            let w = werner(1.0 / d as f64, d).unwrap();
            assert!(w.mat().max_abs_diff(DensityMatrix::maximally_mixed(d * d).mat()) < 1e-15);
            let x = werner(0.4, d).unwrap().mat().trace_product(&swap(d));
            assert!((x.re - 0.4).abs() < 1e-14);
            assert!(DensityMatrix::new(isotropic(0.3, d).unwrap().into_mat()).is_ok());
        }
        let iso = isotropic(1.0, 2).unwrap();
        assert!(iso.mat().max_abs_diff(phi_plus().density().mat()) < 1e-15);
        let singlet = werner(-1.0, 2).unwrap();
        let h = 0.5f64.sqrt();
        let psi_m = PureStateVec::from_real(&[0.0, h, -h, 0.0]).unwrap().density();
        assert!(singlet.mat().max_abs_diff(psi_m.mat()) < 1e-15);
        let wa = partial_trace(&werner(0.5, 2).unwrap(), (2, 2), Keep::A).unwrap();
        assert!(wa.mat().max_abs_diff(DensityMatrix::maximally_mixed(2).mat()) < 1e-15);
        assert!(werner(1.5, 2).is_err());
        assert!(isotropic(-0.1, 2).is_err());
    }

    #[test]
    fn mcms_endpoints() {
        let psi = maximally_coherent(3).density();
        assert!(mcms(1.0, 3).unwrap().mat().max_abs_diff(psi.mat()) < 1e-15);
        assert!(mcms(0.0, 3).unwrap().mat().max_abs_diff(DensityMatrix::maximally_mixed(3).mat()) < 1e-15);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        assert_eq!(random_pure(4, 9).unwrap(), random_pure(4, 9).unwrap());
        assert_eq!(random_density(4, 2, 9).unwrap(), random_density(4, 2, 9).unwrap());
        let rho = random_density(4, 4, 3).unwrap();
        assert!(DensityMatrix::new(rho.into_mat()).is_ok());
        assert!(random_density(3, 4, 0).is_err());
        let u = random_unitary(4, 5);
        assert!(u.matmul(&u.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn recognizers() {
        let p = BellDiagonalParams::new(0.3, 0.2, 0.1);
        let back = is_bell_diagonal(&bell_diagonal(p).unwrap()).unwrap().unwrap();
        assert!((back.c1 - 0.3).abs() < 1e-14 && (back.c2 - 0.2).abs() < 1e-14 && (back.c3 - 0.1).abs() < 1e-14);
        let phi = is_bell_diagonal(&phi_plus().density()).unwrap().unwrap();
        assert!((phi.c1 - 1.0).abs() < 1e-14 && (phi.c2 + 1.0).abs() < 1e-14 && (phi.c3 - 1.0).abs() < 1e-14);
        assert!(is_bell_diagonal(&random_density(4, 4, 9).unwrap()).unwrap().is_none());
        assert!(is_x_state(&bell_diagonal(p).unwrap()).unwrap());
        assert!(!is_x_state(&random_density(4, 4, 9).unwrap()).unwrap());
        let mut g = rng::rng(1);
        let xp = random_x_state_params(&mut g);
        let xs = x_state(&xp).unwrap();
        assert!(DensityMatrix::new(xs.clone().into_mat()).is_ok());
        assert_eq!(x_state_params(&xs).unwrap().unwrap(), xp);
    }
}
