//! Discord-type quantifiers for states whose measured party is a qubit.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureResult, Witness};
use crate::qcore::{
    eigh, gell_mann, h2, matrix_sqrt, partial_trace, partial_transpose_b, pauli, psd_sqrt, shannon, swap_subsystems,
    trace_norm, von_neumann_entropy, xlog2x, ComplexMatrix, DensityMatrix, Keep, ZERO,
};
use crate::states::{is_bell_diagonal, x_state_params, BellDiagonalParams};
use crate::sweep::{kets, minimize_over_unitaries, MeasurementSweep, QubitBlocks};

const SWEEP_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Returns the matrix with the measured qubit first, and the dimension of the other party.
fn measured_first(rho: &DensityMatrix, side: Side) -> Result<(ComplexMatrix, usize)> {
    let d = rho.dim();
    if d < 4 || d % 2 != 0 {
        return Err(Error::DimensionMismatch { expected: 4, got: d });
    }
    let n = d / 2;
    Ok(match side {
        Side::A => (rho.mat().clone(), n),
        Side::B => (swap_subsystems(rho.mat(), (n, 2)), n),
    })
}

pub(crate) fn qubit_a(rho: &DensityMatrix) -> Result<(ComplexMatrix, usize)> {
    measured_first(rho, Side::A)
}

/// −Σ μ log2 μ over the eigenvalues of an unnormalized PSD block.
pub(crate) fn raw_entropy(m: &ComplexMatrix) -> f64 {
    -eig_psd(m).into_iter().map(xlog2x).sum::<f64>()
}

pub(crate) fn eig_psd(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let disc = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
        let mid = 0.5 * (a + d);
        vec![(mid + disc).max(0.0), (mid - disc).max(0.0)]
    } else {
        eigh(m).values.into_iter().map(|l| l.max(0.0)).collect()
    }
}

fn median3(mut v: [f64; 3]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[1]
}

pub(crate) fn trace_norm_block(c: &ComplexMatrix) -> f64 {
    if c.rows() == 2 {
        let det = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)];
        let f = c.data().iter().map(|z| z.norm_sqr()).sum::<f64>();
        (f + 2.0 * det.norm()).max(0.0).sqrt()
    } else {
        // Hermitian dilation: eigenvalues ±σ_k, without the √ε noise of tr√(C†C).
        let (r, k) = (c.rows(), c.cols());
        let h = ComplexMatrix::from_fn(r + k, r + k, |i, j| match (i < r, j < r) {
            (true, false) => c[(i, j - r)],
            (false, true) => c[(j, i - r)].conj(),
            _ => ZERO,
        });
        0.5 * eigh(&h).values.iter().map(|l| l.abs()).sum::<f64>()
    }
}

pub(crate) fn angles(o: &crate::sweep::SweepOptimum) -> Witness {
    Witness::Angles(vec![o.angles.theta, o.angles.phi])
}

/// Entropic discord of a two-qubit state, measuring the given side projectively.
pub fn entropic_discord_2q(rho: &DensityMatrix, side: Side, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    crate::qcore::require_dim(rho, 4)?;
    let (m, n) = measured_first(rho, side)?;
    let dm = DensityMatrix::new_unchecked(m.clone());
    let s_a = von_neumann_entropy(&partial_trace(&dm, (2, n), Keep::A)?);
    let cond = von_neumann_entropy(&dm) - s_a;
    let blocks = QubitBlocks::new(&m, n);
    let f = |t: f64, p: f64| {
        kets(t, p)
            .iter()
            .map(|k| {
                let b = blocks.sandwich(k, k);
                raw_entropy(&b) + xlog2x(b.trace().re)
            })
            .sum::<f64>()
    };
    let o = sweep.minimize(&f);
    Ok(MeasureResult::numeric((o.value - cond).max(0.0), SWEEP_TOL).with_witness(angles(&o)))
}

/// Gram matrix G_ik = ½ tr(M_i M_k), M_i = tr_A[m (σ_i ⊗ I)], i = 1..3.
pub(crate) fn local_gram(m: &ComplexMatrix, n: usize) -> [[f64; 3]; 3] {
    let bl = QubitBlocks::new(m, n);
    let ops: Vec<ComplexMatrix> = (1..4)
        .map(|i| {
            let s = pauli(i);
            let mut out = ComplexMatrix::zeros(n, n);
            for a in 0..2 {
                for b in 0..2 {
                    if s[(b, a)] != ZERO {
                        out = &out + &bl.b[a][b].scale_c(s[(b, a)]);
                    }
                }
            }
            out
        })
        .collect();
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            g[i][k] = 0.5 * ops[i].trace_product(&ops[k]).re;
        }
    }
    g
}

fn gram_trace_minus_max(g: &[[f64; 3]; 3]) -> f64 {
    let gm = ComplexMatrix::from_fn(3, 3, |i, k| C64::new(g[i][k], 0.0));
    let e = eigh(&gm);
    (e.values.iter().sum::<f64>() - e.values[0]).max(0.0)
}

/// Hilbert–Schmidt discord for a qubit measured party (any n for the other party).
pub fn hs_discord(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    Ok(MeasureResult::analytic(gram_trace_minus_max(&local_gram(&m, n))))
}

/// ‖ρ − Π(ρ)‖₂² minimized over qubit projective measurements on the grid.
pub fn hs_discord_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let bl = QubitBlocks::new(&m, n);
    let o = sweep.minimize(&|t, p| {
        let [kp, km] = kets(t, p);
        2.0 * bl.sandwich(&kp, &km).frobenius().powi(2)
    });
    Ok(MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(angles(&o)))
}

/// Σ_{j>m} λ_j(CCᵀ) for the full coefficient matrix C of ρ in orthonormal operator bases.
pub fn hs_discord_lower_bound(rho: &DensityMatrix, (da, db): (usize, usize)) -> Result<f64> {
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: da * db, got: rho.dim() });
    }
    let mut xs = vec![ComplexMatrix::identity(da).scale(1.0 / (da as f64).sqrt())];
    xs.extend(gell_mann(da).into_iter().map(|g| g.scale(std::f64::consts::FRAC_1_SQRT_2)));
    let ops: Vec<ComplexMatrix> = xs
        .iter()
        .map(|x| crate::qcore::partial_trace_mat(&rho.mat().matmul(&x.kron(&ComplexMatrix::identity(db))), (da, db), Keep::B))
        .collect();
    let k = ops.len();
    let cc = ComplexMatrix::from_fn(k, k, |i, j| C64::new(ops[i].trace_product(&ops[j]).re, 0.0));
    Ok(eigh(&cc).values.iter().skip(da).map(|l| l.max(0.0)).sum())
}

/// HS discord for an arbitrary measured dimension. Qubit A uses the closed form; larger A
/// is minimized over orthonormal bases and checked against the coefficient-matrix bound.
pub fn hs_discord_dims(rho: &DensityMatrix, (da, db): (usize, usize)) -> Result<MeasureResult> {
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: da * db, got: rho.dim() });
    }
    if da == 2 {
        return hs_discord(rho);
    }
    let purity = rho.purity();
    let m = rho.mat();
    let f = |u: &ComplexMatrix| {
        let mut kept = 0.0;
        for k in 0..da {
            let v = u.col(k);
            let blk = ComplexMatrix::from_fn(db, db, |i, j| {
                let mut s = ZERO;
                for a in 0..da {
                    for b in 0..da {
                        s += v[a].conj() * v[b] * m[(a * db + i, b * db + j)];
                    }
                }
                s
            });
            kept += blk.frobenius().powi(2);
        }
        purity - kept
    };
    let (value, u) = minimize_over_unitaries(da, &f, 8, 0x6864);
    let lower = hs_discord_lower_bound(rho, (da, db))?;
    if value < lower - 1e-6 {
        return Err(Error::BoundViolation(format!("HS discord {value} below lower bound {lower}")));
    }
    let basis: Vec<f64> = u.data().iter().flat_map(|z| [z.re, z.im]).collect();
    Ok(MeasureResult::numeric(value.max(0.0), 1e-6).with_witness(Witness::Point(basis)))
}

fn x_state_trace_discord(rho: &DensityMatrix) -> Result<Option<f64>> {
    let Some(p) = x_state_params(rho)? else { return Ok(None) };
    let [r11, r22, r33, _] = p.diagonal;
    let (a14, a23) = (p.antidiag[0].norm(), p.antidiag[1].norm());
    let xi1 = 2.0 * (a23 + a14);
    let xi2 = 2.0 * (a23 - a14);
    let xi3 = 1.0 - 2.0 * (r22 + r33);
    let xa3 = 2.0 * (r11 + r22) - 1.0;
    let xmax = (xi3 * xi3).max(xi2 * xi2 + xa3 * xa3);
    let xmin = (xi1 * xi1).min(xi3 * xi3);
    let den = xmax - xmin + xi1 * xi1 - xi2 * xi2;
    if den < 1e-12 {
        return Ok(None);
    }
    Ok(Some(((xi1 * xi1 * xmax - xi2 * xi2 * xmin) / den).max(0.0).sqrt()))
}

/// Trace-norm discord: Bell-diagonal and X-state closed forms, otherwise a measurement sweep.
pub fn trace_discord(rho: &DensityMatrix) -> Result<MeasureResult> {
    qubit_a(rho)?;
    if rho.dim() == 4 {
        if let Some(p) = is_bell_diagonal(rho)? {
            return Ok(MeasureResult::analytic(median3(p.as_array().map(f64::abs))));
        }
        if let Some(v) = x_state_trace_discord(rho)? {
            return Ok(MeasureResult::analytic(v));
        }
    }
    trace_discord_sweep(rho, &MeasurementSweep::default())
}

/// X-state closed form only; `None` when the input is not X-shaped or the formula degenerates.
pub fn trace_discord_x_state(rho: &DensityMatrix) -> Result<Option<f64>> {
    crate::qcore::require_dim(rho, 4)?;
    x_state_trace_discord(rho)
}

/// min over qubit measurements of ‖ρ − Π(ρ)‖₁ = 2‖⟨n+|ρ|n−⟩‖₁.
pub fn trace_discord_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let bl = QubitBlocks::new(&m, n);
    let o = sweep.minimize(&|t, p| {
        let [kp, km] = kets(t, p);
        2.0 * trace_norm_block(&bl.sandwich(&kp, &km))
    });
    Ok(MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(angles(&o)))
}

/// (C_T, T_T, C̃_T) for a Bell-diagonal state.
pub fn geometric_classical_total_trace(rho: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let p = is_bell_diagonal(rho)?.ok_or(Error::NotBellDiagonal)?;
    let mut a = p.as_array().map(f64::abs);
    a.sort_by(f64::total_cmp);
    let [cm, c0, cp] = a;
    let ct = cp;
    let tt = 0.5 * (cp + cp.max(c0 + cm));
    let dt = c0;
    if tt > ct + dt + 1e-12 {
        return Err(Error::BoundViolation(format!("T_T = {tt} exceeds C_T + D_T = {}", ct + dt)));
    }
    Ok((ct, tt, (1.0 + cp).sqrt() - 1.0))
}

fn bures_from_fmax(f: f64) -> f64 {
    ((2.0 + 2f64.sqrt()) * (1.0 - f.clamp(0.0, 1.0).sqrt())).max(0.0)
}

/// Maximal fidelity to classical-quantum states of a Bell-diagonal state.
pub fn bures_fmax_bell(p: BellDiagonalParams) -> f64 {
    let c = p.as_array();
    let mut best = f64::NEG_INFINITY;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let a = ((1.0 + c[i]).powi(2) - (c[j] - c[k]).powi(2)).max(0.0).sqrt();
        let b = ((1.0 - c[i]).powi(2) - (c[j] + c[k]).powi(2)).max(0.0).sqrt();
        best = best.max(a + b);
    }
    0.5 + 0.25 * best
}

/// Maximal fidelity over the unit-vector eigenvalue expression, on the sweep grid.
pub fn bures_fmax_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<(f64, Witness)> {
    let (m, n) = qubit_a(rho)?;
    let s = psd_sqrt(&m);
    let ops: Vec<ComplexMatrix> = (1..4).map(|i| s.matmul(&pauli(i).kron(&ComplexMatrix::identity(n))).matmul(&s)).collect();
    let f = |t: f64, p: f64| {
        let u = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let lam = &(&ops[0].scale(u[0]) + &ops[1].scale(u[1])) + &ops[2].scale(u[2]);
        let ev = eigh(&lam).values;
        let tr: f64 = ev.iter().sum();
        0.5 * (1.0 - tr + 2.0 * ev[..n].iter().sum::<f64>())
    };
    let o = sweep.maximize(&f);
    Ok((o.value.min(1.0), angles(&o)))
}

/// Bures discord (2+√2)(1 − √F_max).
pub fn bures_discord(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    if rho.dim() == 4 {
        if let Some(p) = is_bell_diagonal(rho)? {
            return Ok(MeasureResult::analytic(bures_from_fmax(bures_fmax_bell(p))));
        }
    }
    let e = eigh(&m);
    if e.values[1].abs() < 1e-13 {
        let ra = partial_trace(rho, (2, n), Keep::A)?;
        return Ok(MeasureResult::analytic(bures_from_fmax(ra.eigenvalues()[0])));
    }
    let (f, w) = bures_fmax_sweep(rho, &MeasurementSweep::default())?;
    Ok(MeasureResult::numeric(bures_from_fmax(f), SWEEP_TOL).with_witness(w))
}

/// min over qubit measurements of ‖√ρ − Π(√ρ)‖₂², from the local Gram matrix of √ρ.
pub fn hellinger_discord(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let s = psd_sqrt(&m);
    Ok(MeasureResult::analytic(gram_trace_minus_max(&local_gram(&s, n))))
}

/// Bell-diagonal closed form 1 − ¼(h² + max d_i²).
pub fn hellinger_discord_bell(p: BellDiagonalParams) -> f64 {
    let [l4, l1, l2, l3] = p.eigenvalues().map(|l| l.max(0.0).sqrt());
    let h = l1 + l2 + l3 + l4;
    let dmax = [l1, l2, l3].iter().map(|li| (h - 2.0 * l4 - 2.0 * li).powi(2)).fold(0.0, f64::max);
    1.0 - 0.25 * (h * h + dmax)
}

pub fn hellinger_discord_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let bl = QubitBlocks::new(&psd_sqrt(&m), n);
    let o = sweep.minimize(&|t, p| {
        let [kp, km] = kets(t, p);
        2.0 * bl.sandwich(&kp, &km).frobenius().powi(2)
    });
    Ok(MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(angles(&o)))
}

/// Local quantum uncertainty 1 − λ_max(W), W_ij = tr[√ρ(σ_i⊗I)√ρ(σ_j⊗I)].
pub fn lqu(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let s = psd_sqrt(&m);
    let ks: Vec<ComplexMatrix> = (1..4).map(|i| pauli(i).kron(&ComplexMatrix::identity(n))).collect();
    let sk: Vec<ComplexMatrix> = ks.iter().map(|k| s.matmul(k)).collect();
    let w = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(sk[i].trace_product(&sk[j]).re, 0.0));
    let u = (1.0 - eigh(&w).values[0]).max(0.0);
    let dh = gram_trace_minus_max(&local_gram(&s, n));
    if (u - 2.0 * dh).abs() > 1e-9 {
        return Err(Error::BoundViolation(format!("LQU {u} differs from twice the Hellinger discord {dh}")));
    }
    Ok(MeasureResult::analytic(u))
}

/// Σ_k I(ρ, |k⟩⟨k| ⊗ I) for the columns of `u` as the basis of A.
pub fn skew_sum(rho: &DensityMatrix, (da, db): (usize, usize), u: &ComplexMatrix) -> Result<f64> {
    if da * db != rho.dim() || u.rows() != da {
        return Err(Error::DimensionMismatch { expected: da * db, got: rho.dim() });
    }
    let s = matrix_sqrt(rho);
    let id = ComplexMatrix::identity(db);
    let mut total = 0.0;
    for k in 0..da {
        let v = u.col(k);
        let p = ComplexMatrix::outer(&v, &v).kron(&id);
        let c = s.commutator(&p);
        total += -0.5 * c.trace_product(&c).re;
    }
    Ok(total.max(0.0))
}

/// Q_A: skew information summed over a rank-one projective basis of A, minimized over bases.
pub fn q_a(rho: &DensityMatrix, dims: (usize, usize)) -> Result<MeasureResult> {
    skew_sum(rho, dims, &ComplexMatrix::identity(dims.0))?;
    let f = |u: &ComplexMatrix| skew_sum(rho, dims, u).unwrap_or(f64::INFINITY);
    let (v, _) = minimize_over_unitaries(dims.0, &f, 8, 0x7161);
    Ok(MeasureResult::numeric(v, 1e-6))
}

pub fn q_a_werner(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (d - x - ((d * d - 1.0) * (1.0 - x * x)).max(0.0).sqrt()) / (2.0 * (d + 1.0))
}

pub fn q_a_isotropic(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (1.0 - 2.0 * ((d * d - 1.0) * (1.0 - x) * x).max(0.0).sqrt() + (d * d - 2.0) * x) / (d * (d + 1.0))
}

/// Bell states ordered as Ψ−, Φ−, Φ+, Ψ+ (the order of `BellDiagonalParams::eigenvalues`).
fn bell_projectors() -> [ComplexMatrix; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: [f64; 4]| {
        let k: Vec<C64> = a.iter().map(|x| C64::new(x * h, 0.0)).collect();
        ComplexMatrix::outer(&k, &k)
    };
    [v([0.0, 1.0, -1.0, 0.0]), v([1.0, 0.0, 0.0, -1.0]), v([1.0, 0.0, 0.0, 1.0]), v([0.0, 1.0, 1.0, 0.0])]
}

/// (D_R, Q_R, closest classical state, closest separable state) of a Bell-diagonal state.
pub fn rel_entropy_discord_bell(p: BellDiagonalParams) -> Result<(f64, f64, DensityMatrix, DensityMatrix)> {
    let lam = p.eigenvalues();
    let lmin = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -1e-12 {
        return Err(Error::NotPsd(lmin));
    }
    let lam = lam.map(|l| l.max(0.0));
    let proj = bell_projectors();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| lam[b].total_cmp(&lam[a]).then(a.cmp(&b)));
    let build = |w: [f64; 4]| {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (k, &idx) in order.iter().enumerate() {
            m = &m + &proj[idx].scale(w[k]);
        }
        DensityMatrix::new_unchecked(m)
    };
    let sorted = order.map(|i| lam[i]);
    let chi_of = |q: f64| build([q / 2.0, q / 2.0, (1.0 - q) / 2.0, (1.0 - q) / 2.0]);
    let s_chi = |q: f64| 1.0 + h2(q);
    let s_rho = shannon(&sorted);
    let q_rho = sorted[0] + sorted[1];
    let d_r = (s_chi(q_rho) - s_rho).max(0.0);

    let sep = if sorted[0] <= 0.5 {
        sorted
    } else if 1.0 - sorted[0] < 1e-15 {
        [0.5, 0.5, 0.0, 0.0]
    } else {
        let r = 2.0 * (1.0 - sorted[0]);
        [0.5, sorted[1] / r, sorted[2] / r, sorted[3] / r]
    };
    let q_sigma = sep[0] + sep[1];
    let q_r = (s_chi(q_sigma) - shannon(&sep)).max(0.0);
    Ok((d_r, q_r, chi_of(q_rho), build(sep)))
}

/// Δ→ = min over qubit measurements on A of S(Π(ρ)) − S(ρ).
pub fn one_way_deficit(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    let (m, n) = qubit_a(rho)?;
    let s = von_neumann_entropy(rho);
    let bl = QubitBlocks::new(&m, n);
    let o = sweep.minimize(&|t, p| kets(t, p).iter().map(|k| raw_entropy(&bl.sandwich(k, k))).sum::<f64>());
    Ok(MeasureResult::numeric((o.value - s).max(0.0), SWEEP_TOL).with_witness(angles(&o)))
}

/// Δ^∅ = min over product qubit measurements of S(Π^A⊗Π^B(ρ)) − S(ρ); `sweep` is applied per side.
pub fn zero_way_deficit(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    crate::qcore::require_dim(rho, 4)?;
    let s = von_neumann_entropy(rho);
    let m = rho.mat();
    let f = |ta: f64, pa: f64, tb: f64, pb: f64| {
        let ka = kets(ta, pa);
        let kb = kets(tb, pb);
        let mut probs = [0.0; 4];
        for (i, a) in ka.iter().enumerate() {
            for (j, b) in kb.iter().enumerate() {
                let v = crate::qcore::kron_vec(a, b);
                probs[2 * i + j] = crate::qcore::inner(&v, &m.matvec(&v)).re.max(0.0);
            }
        }
        shannon(&probs)
    };
    let (v, [a, b]) = sweep.minimize_two_sided(&f);
    Ok(MeasureResult::numeric((v - s).max(0.0), SWEEP_TOL).with_witness(Witness::Angles(vec![a.theta, a.phi, b.theta, b.phi])))
}

/// (‖ρ^{T_B}‖₁ − 1)/2.
pub fn negativity(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    if dims.0 * dims.1 != rho.dim() {
        return Err(Error::DimensionMismatch { expected: dims.0 * dims.1, got: rho.dim() });
    }
    Ok(((trace_norm(&partial_transpose_b(rho.mat(), dims)) - 1.0) / 2.0).max(0.0))
}

/// Half the minimal trace distance to the post-measurement states of the (qubit) measured side.
pub fn negativity_of_quantumness(rho: &DensityMatrix, side: Side) -> Result<MeasureResult> {
    let (m, _) = measured_first(rho, side)?;
    let r = trace_discord(&DensityMatrix::new_unchecked(m))?;
    Ok(MeasureResult { value: 0.5 * r.value, ..r })
}

/// (D_N, D'_N): commutator norms summed over distinct pairs of blocks ⟨i|ρ|j⟩_A.
pub fn noncommutativity_discord(rho: &DensityMatrix, (da, db): (usize, usize)) -> Result<(f64, f64)> {
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: da * db, got: rho.dim() });
    }
    let m = rho.mat();
    let blocks: Vec<ComplexMatrix> = (0..da * da)
        .map(|ij| {
            let (i, j) = (ij / da, ij % da);
            ComplexMatrix::from_fn(db, db, |r, c| m[(i * db + r, j * db + c)])
        })
        .collect();
    let (mut tn, mut hs) = (0.0, 0.0);
    for p in 0..blocks.len() {
        for q in p + 1..blocks.len() {
            let c = blocks[p].commutator(&blocks[q]);
            if c.max_abs() > 0.0 {
                tn += crate::qcore::singular_values(&c).iter().sum::<f64>();
                hs += c.frobenius();
            }
        }
    }
    Ok((tn, hs))
}

/// Pure-state D_N from Schmidt amplitudes (not probabilities).
pub fn noncommutativity_discord_pure(amps: &[f64]) -> f64 {
    let d = amps.len();
    let mut total = 0.0;
    for i in 0..d {
        for j in i..d {
            let mut inner = 0.0;
            for k in 0..d {
                for l in 0..d {
                    let member = if i < j { (i < k && k <= j && j <= l) || (k == i && l == j) } else { i <= k && k < l };
                    if member {
                        inner += amps[k] * amps[l];
                    }
                }
            }
            total += amps[i] * amps[j] * inner;
        }
    }
    2.0 * total
}

/// Tsallis-q discord min_Π S_q(Π(ρ)) − S_q(ρ) for a qubit measured party (natural units).
pub fn q_discord(rho: &DensityMatrix, q: f64, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::ParamOutOfRange(format!("q = {q} must be positive and different from 1")));
    }
    sweep.validate()?;
    let (m, n) = qubit_a(rho)?;
    let pw = |x: f64| if x > 0.0 { x.powf(q) } else { 0.0 };
    let s_rho = (1.0 - rho.eigenvalues().into_iter().map(pw).sum::<f64>()) / (q - 1.0);
    let bl = QubitBlocks::new(&m, n);
    let o = sweep.minimize(&|t, p| {
        let tr: f64 = kets(t, p).iter().flat_map(|k| eig_psd(&bl.sandwich(k, k))).map(pw).sum();
        (1.0 - tr) / (q - 1.0)
    });
    Ok(MeasureResult::numeric((o.value - s_rho).max(0.0), SWEEP_TOL).with_witness(angles(&o)))
}
