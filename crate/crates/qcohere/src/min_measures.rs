//! Measurement-induced nonlocality: maximal disturbance under local projective measurements
//! that leave the measured marginal unchanged. The measured party is a qubit unless noted.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::discord::{angles, local_gram, qubit_a, raw_entropy, trace_norm_block};
use crate::error::{Error, Result};
use crate::measure::{MeasureResult, Witness};
use crate::qcore::{
    bloch_decompose_2q, eigh, fidelity, h2, partial_trace, partial_trace_mat, pauli, psd_sqrt, von_neumann_entropy,
    xlog2x, ComplexMatrix, DensityMatrix, Keep,
};
use crate::states::{is_bell_diagonal, BellDiagonalParams};
use crate::sweep::{kets, MeasurementSweep, QubitBlocks, QubitProjectivePair};

/// Eigenvalue gap below which the marginal counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
const SWEEP_TOL: f64 = 1e-5;

/// The set of measurements on A that do not disturb ρ_A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocallyInvariantConstraint {
    pub marginal: DensityMatrix,
    pub degenerate: bool,
    /// Indices of the marginal's eigenvalues (descending) grouped by equality within the tolerance.
    pub degenerate_blocks: Vec<Vec<usize>>,
}

impl LocallyInvariantConstraint {
    pub fn new(rho: &DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != rho.dim() {
            return Err(Error::DimensionMismatch { expected: dims.0 * dims.1, got: rho.dim() });
        }
        let marginal = partial_trace(rho, dims, Keep::A)?;
        let ev = marginal.eigenvalues();
        let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..ev.len() {
            if ev[k - 1] - ev[k] < DEGENERACY_TOL {
                blocks.last_mut().unwrap().push(k);
            } else {
                blocks.push(vec![k]);
            }
        }
        let degenerate = blocks.iter().any(|b| b.len() > 1);
        Ok(LocallyInvariantConstraint { marginal, degenerate, degenerate_blocks: blocks })
    }

    /// Whether the rank-one measurement in `basis` leaves the marginal invariant.
    pub fn admits(&self, basis: &[Vec<C64>]) -> bool {
        let m = self.marginal.mat();
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for v in basis {
            let p = ComplexMatrix::outer(v, v);
            out = &out + &p.matmul(m).matmul(&p);
        }
        (&out - m).max_abs() <= DEGENERACY_TOL
    }

    /// Bloch direction of a nondegenerate qubit marginal.
    pub fn qubit_axis(&self) -> Option<[f64; 3]> {
        if self.marginal.dim() != 2 || self.degenerate {
            return None;
        }
        let x = [1, 2, 3].map(|k| self.marginal.mat().trace_product(&pauli(k)).re);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(x.map(|v| v / nx))
    }
}

fn direction_angles(n: [f64; 3]) -> (f64, f64) {
    (n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]))
}

fn qubit_constraint(m: &ComplexMatrix, n: usize) -> LocallyInvariantConstraint {
    LocallyInvariantConstraint::new(&DensityMatrix::new_unchecked(m.clone()), (2, n)).expect("2×n split")
}

/// Maximizes `f` over allowed qubit measurements: the marginal eigenbasis when it is
/// nondegenerate (a single evaluation), otherwise the whole sphere.
fn maximize_allowed<F>(axis: Option<[f64; 3]>, sweep: &MeasurementSweep, f: &F) -> MeasureResult
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    match axis {
        Some(n) => {
            let (t, p) = direction_angles(n);
            let q = QubitProjectivePair::new(t, p);
            MeasureResult::analytic(f(t, p)).with_witness(Witness::Angles(vec![q.theta, q.phi]))
        }
        None => {
            let o = sweep.maximize(f);
            MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(angles(&o))
        }
    }
}

fn sym3(g: &[[f64; 3]; 3]) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, 3, |i, k| C64::new(g[i][k], 0.0))
}

fn quad(g: &[[f64; 3]; 3], n: &[f64; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|k| n[i] * g[i][k] * n[k]).sum::<f64>()).sum()
}

/// tr G − n̂ᵀGn̂ at the forced direction, or tr G − λ_min(G) when every direction is allowed.
fn gram_max_disturbance(g: &[[f64; 3]; 3], axis: Option<[f64; 3]>) -> f64 {
    let tr = g[0][0] + g[1][1] + g[2][2];
    let kept = match axis {
        Some(n) => quad(g, &n),
        None => *eigh(&sym3(g)).values.last().unwrap(),
    };
    (tr - kept).max(0.0)
}

fn axis_witness(r: MeasureResult, axis: Option<[f64; 3]>) -> MeasureResult {
    match axis {
        Some(n) => {
            let (t, p) = direction_angles(n);
            let q = QubitProjectivePair::new(t, p);
            r.with_witness(Witness::Angles(vec![q.theta, q.phi]))
        }
        None => r,
    }
}

/// Hilbert–Schmidt MIN max ‖ρ − Π(ρ)‖₂² for a qubit measured party.
pub fn hs_min(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let v = gram_max_disturbance(&local_gram(&m, n), axis);
    Ok(axis_witness(MeasureResult::analytic(v), axis))
}

/// ‖ρ − Π_n(ρ)‖₂² for the measurement along (θ, φ).
pub fn hs_disturbance(rho: &DensityMatrix, theta: f64, phi: f64) -> Result<f64> {
    let (m, n) = qubit_a(rho)?;
    let [kp, km] = kets(theta, phi);
    Ok(2.0 * QubitBlocks::new(&m, n).sandwich(&kp, &km).frobenius().powi(2))
}

pub fn hs_min_werner(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * x - 1.0).powi(2) / (d * (d + 1.0) * (d * d - 1.0))
}

pub fn hs_min_isotropic(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * d * x - 1.0).powi(2) / (d * (d + 1.0) * (d * d - 1.0))
}

/// Zero-MIN test for arbitrary dimensions: the blocks A_ij = ⟨i|ρ|j⟩_B are mutually commuting
/// normal operators and act as scalars on every eigenspace of ρ_A.
pub fn hs_min_is_zero(rho: &DensityMatrix, (da, db): (usize, usize)) -> Result<bool> {
    let c = LocallyInvariantConstraint::new(rho, (da, db))?;
    let m = rho.mat();
    let blocks: Vec<ComplexMatrix> = (0..db * db)
        .map(|ij| {
            let (i, j) = (ij / db, ij % db);
            ComplexMatrix::from_fn(da, da, |a, b| m[(a * db + i, b * db + j)])
        })
        .collect();
    let tol = DEGENERACY_TOL;
    for (p, a) in blocks.iter().enumerate() {
        if (&a.matmul(&a.adjoint()) - &a.adjoint().matmul(a)).max_abs() > tol {
            return Ok(false);
        }
        if blocks[p + 1..].iter().any(|b| a.commutator(b).max_abs() > tol) {
            return Ok(false);
        }
    }
    let e = c.marginal.eig();
    for blk in &c.degenerate_blocks {
        let mut proj = ComplexMatrix::zeros(da, da);
        for &k in blk {
            let v = e.vectors.col(k);
            proj = &proj + &ComplexMatrix::outer(&v, &v);
        }
        for a in &blocks {
            let ap = a.matmul(&proj);
            let alpha = ap.trace() / blk.len() as f64;
            if (&ap - &proj.scale_c(alpha)).max_abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// ‖ρ − Π_n(ρ)‖₁ = 2‖⟨n+|ρ|n−⟩‖₁.
fn trace_disturbance_fn(bl: &QubitBlocks) -> impl Fn(f64, f64) -> f64 + Sync + '_ {
    move |t, p| {
        let [kp, km] = kets(t, p);
        2.0 * trace_norm_block(&bl.sandwich(&kp, &km))
    }
}

/// Two-qubit closed form for diagonal correlation matrices.
fn trace_min_diagonal(x: [f64; 3], r: [f64; 3]) -> f64 {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx < DEGENERACY_TOL {
        return r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    let n = x.map(|v| v / nx);
    let t = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let mut e1 = cross(n, t);
    let ne = e1.iter().map(|v| v * v).sum::<f64>().sqrt();
    e1 = e1.map(|v| v / ne);
    let e2 = cross(n, e1);
    let w: [C64; 3] = std::array::from_fn(|i| C64::new(r[i] * e1[i], r[i] * e2[i]));
    let a: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let wc = w.map(|z| z.conj());
    let b = [
        wc[1] * w[2] - wc[2] * w[1],
        wc[2] * w[0] - wc[0] * w[2],
        wc[0] * w[1] - wc[1] * w[0],
    ]
    .iter()
    .map(|z| z.norm_sqr())
    .sum::<f64>()
    .sqrt();
    0.5 * ((a + b).sqrt() + (a - b).max(0.0).sqrt())
}

/// Trace-norm MIN max ‖ρ − Π(ρ)‖₁.
pub fn trace_min(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    if n == 2 {
        let b = bloch_decompose_2q(rho)?;
        let off = (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)));
        if off.map(|(i, j)| b.r[i][j].abs()).fold(0.0, f64::max) < 1e-12 {
            let v = trace_min_diagonal(b.x, [b.r[0][0], b.r[1][1], b.r[2][2]]);
            return Ok(axis_witness(MeasureResult::analytic(v), axis));
        }
    }
    trace_min_sweep(rho, &MeasurementSweep::default())
}

/// Trace-norm MIN by direct evaluation over the allowed measurements.
pub fn trace_min_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let bl = QubitBlocks::new(&m, n);
    let f = trace_disturbance_fn(&bl);
    Ok(maximize_allowed(axis, sweep, &f))
}

pub fn trace_min_werner(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * x - 1.0).abs() / (d + 1.0)
}

pub fn trace_min_isotropic(x: f64, d: usize) -> f64 {
    let d = d as f64;
    2.0 * (d * d * x - 1.0).abs() / (d * (d + 1.0))
}

/// Sign patterns of (c1, c2, c3) in the Bell weights, order Ψ−, Φ−, Φ+, Ψ+.
const BELL_SIGNS: [[f64; 3]; 4] = [[-1.0, -1.0, -1.0], [-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]];

/// Uhlmann fidelity F(ρ, Π_i ρ) for a measurement along axis i of a Bell-diagonal state. The
/// measurement averages the two Bell weights sharing the sign of c_i, so both states are
/// diagonal in the Bell basis.
fn bell_axis_fidelity(lam: &[f64; 4], i: usize) -> f64 {
    let mut root = 0.0;
    for sign in [1.0, -1.0] {
        let pair: Vec<f64> = (0..4).filter(|&k| BELL_SIGNS[k][i] == sign).map(|k| lam[k]).collect();
        let avg = 0.5 * (pair[0] + pair[1]);
        root += avg.sqrt() * (pair[0].sqrt() + pair[1].sqrt());
    }
    root * root
}

/// Bures MIN max{1 − √F(ρ, Π(ρ))} of a Bell-diagonal state. The minimal fidelity is reached
/// on a coordinate axis.
pub fn bures_min_bell(p: BellDiagonalParams) -> Result<MeasureResult> {
    let lam = p.eigenvalues();
    let lmin = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -1e-12 {
        return Err(Error::NotPsd(lmin));
    }
    let lam = lam.map(|l| l.max(0.0));
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for i in 0..3 {
        let f = bell_axis_fidelity(&lam, i);
        if f < best - 1e-15 {
            best = f;
            arg = i;
        }
    }
    let axis = [[std::f64::consts::FRAC_PI_2, 0.0], [std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2], [0.0, 0.0]][arg];
    Ok(MeasureResult::analytic((1.0 - best.min(1.0).sqrt()).max(0.0)).with_witness(Witness::Angles(axis.to_vec())))
}

/// The branch expression ½(1 + min|b_i|) built from the Pauli coefficients t_0, t_i of √ρ.
/// It equals min over measurements of tr[√ρ Π(√ρ)], which bounds the Uhlmann fidelity from above.
pub fn bures_min_bell_branch(p: BellDiagonalParams) -> f64 {
    let c = p.as_array();
    let cs = c[0] + c[1] + c[2];
    let s0 = (1.0 - cs).max(0.0).sqrt();
    let sk = c.map(|ck| (1.0 + cs - 2.0 * ck).max(0.0).sqrt());
    let ssum: f64 = sk.iter().sum();
    let t0 = s0 / 8.0 + ssum / 8.0;
    let b = sk.map(|si| {
        let ti = -s0 / 8.0 + ssum / 8.0 - si / 4.0;
        8.0 * (t0 * t0 + ti * ti) - 1.0
    });
    0.5 * (1.0 + b.iter().fold(f64::INFINITY, |a, v| a.min(v.abs())))
}

/// Bures MIN by direct fidelity evaluation over the allowed measurements.
pub fn bures_min_sweep(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let id = ComplexMatrix::identity(n);
    let f = |t: f64, p: f64| {
        let mut post = ComplexMatrix::zeros(2 * n, 2 * n);
        for k in kets(t, p) {
            let pk = ComplexMatrix::outer(&k, &k).kron(&id);
            post = &post + &pk.matmul(&m).matmul(&pk);
        }
        1.0 - fidelity(rho, &DensityMatrix::new_unchecked(post)).min(1.0).sqrt()
    };
    Ok(maximize_allowed(axis, sweep, &f))
}

/// Bures MIN: Bell-diagonal closed form, otherwise direct evaluation.
pub fn bures_min(rho: &DensityMatrix) -> Result<MeasureResult> {
    qubit_a(rho)?;
    if rho.dim() == 4 {
        if let Some(p) = is_bell_diagonal(rho)? {
            return bures_min_bell(p);
        }
    }
    bures_min_sweep(rho, &MeasurementSweep::default())
}

/// Closed form of the relative-entropy MIN of a Bell-diagonal state.
pub fn rel_entropy_min_bell(p: BellDiagonalParams) -> Result<f64> {
    let lam = p.eigenvalues();
    let lmin = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -1e-12 {
        return Err(Error::NotPsd(lmin));
    }
    let cmin = p.as_array().iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    Ok(1.0 + h2((1.0 + cmin) / 2.0) + lam.iter().map(|&l| xlog2x(l.max(0.0))).sum::<f64>())
}

/// Relative-entropy MIN max S(Π(ρ)) − S(ρ), checked against the conditional-entropy,
/// mutual-information and marginal-entropy bounds (and the Bell-diagonal closed form).
pub fn rel_entropy_min(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let s = von_neumann_entropy(rho);
    let bl = QubitBlocks::new(&m, n);
    let f = |t: f64, p: f64| kets(t, p).iter().map(|k| raw_entropy(&bl.sandwich(k, k))).sum::<f64>() - s;
    let mut res = maximize_allowed(axis, sweep, &f);
    res.value = res.value.max(0.0);

    let sa = von_neumann_entropy(&partial_trace(rho, (2, n), Keep::A)?);
    let sb = von_neumann_entropy(&partial_trace(rho, (2, n), Keep::B)?);
    let lower = sb - s;
    let upper = (sa + sb - s).min(sa);
    let slack = 1e-6;
    if res.value < lower - slack || res.value > upper + slack {
        return Err(Error::BoundViolation(format!("N_R = {} outside [{lower}, {upper}]", res.value)));
    }
    if rho.dim() == 4 {
        if let Some(p) = is_bell_diagonal(rho)? {
            let closed = rel_entropy_min_bell(p)?;
            if (closed - res.value).abs() > 1e-6 {
                return Err(Error::BoundViolation(format!("Bell-diagonal N_R {closed} differs from search {}", res.value)));
            }
            return Ok(MeasureResult { value: closed, ..res });
        }
    }
    Ok(res)
}

/// Gram matrix ½ tr(M_i M_k) over σ_0..σ_3, M_i = tr_A[m(σ_i ⊗ I)].
fn local_gram4(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let ops: Vec<ComplexMatrix> =
        (0..4).map(|i| partial_trace_mat(&m.matmul(&pauli(i).kron(&ComplexMatrix::identity(n))), (2, n), Keep::B)).collect();
    ComplexMatrix::from_fn(4, 4, |i, k| C64::new(0.5 * ops[i].trace_product(&ops[k]).re, 0.0))
}

/// Skew-information MIN: Σ_k I(ρ, Π_k ⊗ I) maximized over allowed measurements, i.e. the
/// Hilbert–Schmidt MIN of √ρ. Asserts the 1 − μ_1 upper bound.
pub fn skew_min(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let s = psd_sqrt(&m);
    let v = gram_max_disturbance(&local_gram(&s, n), axis);
    let mu1 = eigh(&local_gram4(&s, n)).values[0];
    if v > 1.0 - mu1 + 1e-9 {
        return Err(Error::BoundViolation(format!("N_SI = {v} exceeds 1 − μ1 = {}", 1.0 - mu1)));
    }
    Ok(axis_witness(MeasureResult::analytic(v), axis))
}

/// Upper bound 1 − μ_1 on the skew-information MIN, μ_1 the largest eigenvalue of ΓΓᵀ.
pub fn skew_min_upper_bound(rho: &DensityMatrix) -> Result<f64> {
    let (m, n) = qubit_a(rho)?;
    Ok(1.0 - eigh(&local_gram4(&psd_sqrt(&m), n)).values[0])
}

pub fn skew_min_werner(x: f64, d: usize) -> f64 {
    let d = d as f64;
    0.5 * ((d - x) / (d + 1.0) - ((d - 1.0) / (d + 1.0) * (1.0 - x * x)).max(0.0).sqrt())
}

pub fn skew_min_isotropic(x: f64, d: usize) -> f64 {
    let d = d as f64;
    (((d - 1.0) * x).max(0.0).sqrt() - ((1.0 - x) / (d + 1.0)).max(0.0).sqrt()).powi(2) / d
}

/// W_ij = tr[√ρ(σ_i⊗I)√ρ(σ_j⊗I)].
fn w_matrix(s: &ComplexMatrix, n: usize) -> [[f64; 3]; 3] {
    let sk: Vec<ComplexMatrix> = (1..4).map(|i| s.matmul(&pauli(i).kron(&ComplexMatrix::identity(n)))).collect();
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w[i][j] = sk[i].trace_product(&sk[j]).re;
        }
    }
    w
}

/// Uncertainty-induced nonlocality max I(ρ, K⊗I) over K = n̂·σ commuting with ρ_A.
pub fn uin(rho: &DensityMatrix) -> Result<MeasureResult> {
    let (m, n) = qubit_a(rho)?;
    let axis = qubit_constraint(&m, n).qubit_axis();
    let w = w_matrix(&psd_sqrt(&m), n);
    let kept = match axis {
        Some(x) => quad(&w, &x),
        None => *eigh(&sym3(&w)).values.last().unwrap(),
    };
    Ok(axis_witness(MeasureResult::analytic((1.0 - kept).max(0.0)), axis))
}

/// Symmetric Hilbert–Schmidt MIN of a two-qubit state: both sides measured, each
/// measurement leaving its own marginal invariant.
pub fn symmetric_hs_min(rho: &DensityMatrix, sweep: &MeasurementSweep) -> Result<MeasureResult> {
    sweep.validate()?;
    crate::qcore::require_dim(rho, 4)?;
    let m = rho.mat();
    let ax_a = LocallyInvariantConstraint::new(rho, (2, 2))?.qubit_axis();
    let swapped = DensityMatrix::new_unchecked(crate::qcore::swap_subsystems(m, (2, 2)));
    let ax_b = LocallyInvariantConstraint::new(&swapped, (2, 2))?.qubit_axis();
    let purity = rho.purity();
    let f = |ta: f64, pa: f64, tb: f64, pb: f64| {
        let mut kept = 0.0;
        for a in kets(ta, pa) {
            for b in kets(tb, pb) {
                let v = crate::qcore::kron_vec(&a, &b);
                kept += crate::qcore::inner(&v, &m.matvec(&v)).re.powi(2);
            }
        }
        purity - kept
    };
    let res = match (ax_a, ax_b) {
        (Some(a), Some(b)) => {
            let ((ta, pa), (tb, pb)) = (direction_angles(a), direction_angles(b));
            MeasureResult::analytic(f(ta, pa, tb, pb)).with_witness(Witness::Angles(vec![ta, pa, tb, pb]))
        }
        (Some(a), None) => {
            let (ta, pa) = direction_angles(a);
            let o = sweep.maximize(&|t, p| f(ta, pa, t, p));
            MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(Witness::Angles(vec![ta, pa, o.angles.theta, o.angles.phi]))
        }
        (None, Some(b)) => {
            let (tb, pb) = direction_angles(b);
            let o = sweep.maximize(&|t, p| f(t, p, tb, pb));
            MeasureResult::numeric(o.value, SWEEP_TOL).with_witness(Witness::Angles(vec![o.angles.theta, o.angles.phi, tb, pb]))
        }
        (None, None) => {
            let (v, [a, b]) = sweep.minimize_two_sided(&|ta, pa, tb, pb| -f(ta, pa, tb, pb));
            MeasureResult::numeric(-v, SWEEP_TOL).with_witness(Witness::Angles(vec![a.theta, a.phi, b.theta, b.phi]))
        }
    };
    Ok(MeasureResult { value: res.value.max(0.0), ..res })
}
