//! Single-system coherence quantifiers relative to a reference basis.

use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureResult, Witness};
use crate::optim::{self, hermitian_basis, sdp_barrier, Lmi, PgOptions};
use crate::qcore::{
    eigh, h2, hermitian_eig, in_basis, partial_trace, reduce, shannon, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Keep, PureStateVec, ReferenceBasis, ZERO,
};
use crate::rng;
use crate::states::random_unitary_with;

const DIAG_TOL: f64 = 1e-14;
const SDP_GAP: f64 = 1e-11;

/// ρ expressed in the reference basis.
fn rep(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<ComplexMatrix> {
    Ok(in_basis(rho, basis)?.into_mat())
}

fn offdiag_l1(m: &ComplexMatrix) -> f64 {
    let d = m.rows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

fn is_incoherent(m: &ComplexMatrix) -> bool {
    m.is_diagonal(DIAG_TOL)
}

/// Nonzero entries only on the main diagonal and anti-diagonal.
pub fn is_x_shaped(m: &ComplexMatrix, tol: f64) -> bool {
    let d = m.rows();
    (0..d).all(|i| (0..d).all(|j| i == j || i + j == d - 1 || m[(i, j)].norm() <= tol))
}

/// Σ_i δ_i |b_i⟩⟨b_i| in the original representation.
pub fn incoherent_state(basis: &ReferenceBasis, delta: &[f64]) -> ComplexMatrix {
    let d = basis.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (v, &p) in basis.vectors().iter().zip(delta) {
        if p != 0.0 {
            out = &out + &ComplexMatrix::outer(v, v).scale(p);
        }
    }
    out
}

fn diag_witness(basis: &ReferenceBasis, m: &ComplexMatrix) -> Witness {
    Witness::State(incoherent_state(basis, &m.real_diagonal()))
}

pub fn c_l1(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    Ok(MeasureResult::analytic(offdiag_l1(&m)).with_witness(diag_witness(basis, &m)))
}

pub fn c_rel_entropy(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let v = if is_incoherent(&m) { 0.0 } else { (shannon(&m.real_diagonal()) - von_neumann_entropy(rho)).max(0.0) };
    Ok(MeasureResult::analytic(v).with_witness(diag_witness(basis, &m)))
}

/// Squared Hilbert–Schmidt distance to the dephased state. Not a monotone under incoherent operations.
pub fn c_l2(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    Ok(MeasureResult::analytic(s).with_witness(diag_witness(basis, &m)))
}

/// Closed-form trace-norm coherence of a pure state in the computational basis.
pub fn c_trace_pure(psi: &PureStateVec) -> MeasureResult {
    let d = psi.dim();
    let mut order: Vec<usize> = (0..d).collect();
    let mods: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
    order.sort_by(|&a, &b| mods[b].total_cmp(&mods[a]).then(a.cmp(&b)));
    let x: Vec<f64> = order.iter().map(|&i| mods[i]).collect();
    let params = |l: usize| {
        let s: f64 = x[..l].iter().sum();
        let m: f64 = x[l..].iter().map(|v| v * v).sum();
        let p = s * s - l as f64 * m - 1.0;
        let q = (p + (p * p + 4.0 * l as f64 * m * s * s).max(0.0).sqrt()) / (2.0 * l as f64 * s);
        (s, m, q)
    };
    let mut k = 1;
    for l in 1..=d {
        let (_, _, q) = params(l);
        if x[l - 1] > q + 1e-15 {
            k = l;
        }
    }
    let (s, m, q) = params(k);
    let value = (2.0 * (q * s + m)).max(0.0);
    let mut delta = vec![0.0; d];
    let denom = s - k as f64 * q;
    for i in 0..k {
        delta[order[i]] = if denom > 0.0 { (x[i] - q) / denom } else { 1.0 / k as f64 };
    }
    MeasureResult::analytic(value).with_witness(Witness::State(ComplexMatrix::diag(&delta)))
}

fn all_offdiag_equal(m: &ComplexMatrix) -> Option<f64> {
    let d = m.rows();
    if d < 2 {
        return None;
    }
    let a = m[(0, 1)];
    let same = (0..d).all(|i| (0..d).all(|j| i == j || (m[(i, j)] - a).norm() <= 1e-13));
    same.then_some(a.norm())
}

fn lambda_max(m: &ComplexMatrix) -> f64 {
    eigh(m).values[0]
}

/// Variables: Hermitian P (d² coordinates) followed by `extra` diagonal weights.
fn trace_norm_sdp(m: &ComplexMatrix, fixed_sum: bool) -> Result<(f64, Vec<f64>, f64)> {
    let d = m.rows();
    let hb = hermitian_basis(d);
    let nd = if fixed_sum { d - 1 } else { d };
    let nvar = d * d + nd;
    let mut c = vec![0.0; nvar];
    for k in 0..d {
        c[k] = 2.0;
    }
    let pos = Lmi { f0: ComplexMatrix::zeros(d, d), terms: hb.iter().cloned().enumerate().collect() };
    let mut f0 = m.scale(-1.0);
    let mut terms: Vec<(usize, ComplexMatrix)> = hb.iter().cloned().enumerate().collect();
    let mut lmis = vec![];
    for i in 0..nd {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = C64::new(1.0, 0.0);
        if fixed_sum {
            e[(d - 1, d - 1)] = C64::new(-1.0, 0.0);
        } else {
            c[d * d + i] = 1.0;
        }
        terms.push((d * d + i, e));
        lmis.push(Lmi::scalar(0.0, &[(d * d + i, 1.0)]));
    }
    if fixed_sum {
        f0[(d - 1, d - 1)] += C64::new(1.0, 0.0);
        let coeffs: Vec<(usize, f64)> = (0..nd).map(|i| (d * d + i, -1.0)).collect();
        lmis.push(Lmi::scalar(1.0, &coeffs));
    }
    lmis.push(pos);
    lmis.push(Lmi { f0, terms });
    let mut y0 = vec![0.0; nvar];
    let scale = lambda_max(m).abs() + 1.0;
    for k in 0..d {
        y0[k] = scale;
    }
    for i in 0..nd {
        y0[d * d + i] = 1.0 / d as f64;
    }
    let r = sdp_barrier(&c, &lmis, &y0, SDP_GAP)?;
    let mut weights: Vec<f64> = r.y[d * d..].to_vec();
    if fixed_sum {
        weights.push(1.0 - weights.iter().sum::<f64>());
    }
    let offset = if fixed_sum { 0.0 } else { -1.0 };
    Ok((r.value + offset, weights.into_iter().map(|w| w.max(0.0)).collect(), r.gap))
}

/// min over incoherent δ of ‖ρ − δ‖₁.
pub fn c_trace(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0).with_witness(diag_witness(basis, &m)));
    }
    if d == 2 || is_x_shaped(&m, 1e-13) {
        return Ok(MeasureResult::analytic(offdiag_l1(&m)).with_witness(diag_witness(basis, &m)));
    }
    if let Some(a) = all_offdiag_equal(&m) {
        return Ok(MeasureResult::analytic(2.0 * (d - 1) as f64 * a).with_witness(diag_witness(basis, &m)));
    }
    let e = eigh(&m);
    if e.values.get(1).is_some_and(|&l| l.abs() < 1e-13) {
        let psi = PureStateVec::from_unnormalized(e.vector(0))?;
        let r = c_trace_pure(&psi);
        let Some(Witness::State(w)) = &r.witness else { unreachable!() };
        return Ok(MeasureResult::analytic(r.value).with_witness(Witness::State(incoherent_state(basis, &w.real_diagonal()))));
    }
    let (value, delta, gap) = trace_norm_sdp(&m, true)?;
    Ok(MeasureResult::numeric(value, gap.max(1e-10)).with_witness(Witness::State(incoherent_state(basis, &delta))))
}

/// min over λ ≥ 0 and incoherent δ of ‖ρ − λδ‖₁. The witness is the matrix λδ.
pub fn c_trace_modified(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0).with_witness(diag_witness(basis, &m)));
    }
    if m.rows() == 2 || is_x_shaped(&m, 1e-13) {
        return Ok(MeasureResult::analytic(offdiag_l1(&m)).with_witness(diag_witness(basis, &m)));
    }
    let (value, u, gap) = trace_norm_sdp(&m, false)?;
    Ok(MeasureResult::numeric(value, gap.max(1e-10)).with_witness(Witness::State(incoherent_state(basis, &u))))
}

fn l1_bracket(value: f64, l1: f64, d: usize, lmax: f64, slack: f64) -> Result<()> {
    let lo = l1 / (d - 1) as f64;
    let hi = l1.min(d as f64 * lmax - 1.0);
    if value < lo - slack || value > hi + slack {
        return Err(Error::BoundViolation(format!("robustness {value} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Robustness of coherence; closed form C_l1 for qubits, pure states and X-shaped states.
pub fn robustness(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0).with_witness(diag_witness(basis, &m)));
    }
    let e = eigh(&m);
    let pure = e.values.get(1).is_some_and(|&l| l.abs() < 1e-13);
    if m.rows() == 2 || pure || is_x_shaped(&m, 1e-13) {
        return Ok(MeasureResult::analytic(offdiag_l1(&m)));
    }
    robustness_numeric(rho, basis)
}

/// Robustness by the semidefinite program min{Σu − 1 : diag(u) ⪰ ρ}, bracket-checked.
pub fn robustness_numeric(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    let lmax = lambda_max(&m);
    let terms = (0..d)
        .map(|i| {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, i)] = C64::new(1.0, 0.0);
            (i, e)
        })
        .collect();
    let lmi = Lmi { f0: m.scale(-1.0), terms };
    let r = sdp_barrier(&vec![1.0; d], &[lmi], &vec![lmax + 1.0; d], SDP_GAP)?;
    let total: f64 = r.y.iter().sum();
    let value = (total - 1.0).max(0.0);
    l1_bracket(value, offdiag_l1(&m), d, lmax, 1e-6)?;
    let delta: Vec<f64> = r.y.iter().map(|u| u / total).collect();
    Ok(MeasureResult::numeric(value, r.gap.max(1e-9)).with_witness(Witness::State(incoherent_state(basis, &delta))))
}

/// Coherence weight: 1 − max{Σu : ρ − diag(u) ⪰ 0, u ≥ 0}.
pub fn coherence_weight(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0).with_witness(diag_witness(basis, &m)));
    }
    let e = eigh(&m);
    let range: Vec<usize> = (0..d).filter(|&k| e.values[k] > 1e-12).collect();
    // Only basis vectors lying inside supp ρ can carry weight.
    let support: Vec<usize> = (0..d)
        .filter(|&i| 1.0 - range.iter().map(|&k| e.vectors[(i, k)].norm_sqr()).sum::<f64>() < 1e-10)
        .collect();
    let l1 = offdiag_l1(&m);
    if support.is_empty() {
        return Ok(MeasureResult::analytic(1.0));
    }
    let r = range.len();
    let lam = ComplexMatrix::diag(&range.iter().map(|&k| e.values[k]).collect::<Vec<_>>());
    let mut lmis = vec![];
    let mut terms = vec![];
    for (v, &i) in support.iter().enumerate() {
        let a: Vec<C64> = range.iter().map(|&k| e.vectors[(i, k)].conj()).collect();
        terms.push((v, ComplexMatrix::outer(&a, &a).scale(-1.0)));
        lmis.push(Lmi::scalar(0.0, &[(v, 1.0)]));
    }
    lmis.push(Lmi { f0: lam, terms });
    let lmin = range.iter().map(|&k| e.values[k]).fold(f64::INFINITY, f64::min);
    let n = support.len();
    let res = sdp_barrier(&vec![-1.0; n], &lmis, &vec![0.5 * lmin; n], SDP_GAP)?;
    let kept: f64 = res.y.iter().sum();
    let value = (1.0 - kept).clamp(0.0, 1.0);
    let lower: f64 = {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s
    };
    let _ = (l1, r);
    if value < lower - 1e-6 {
        return Err(Error::BoundViolation(format!("coherence weight {value} below HS bound {lower}")));
    }
    let mut delta = vec![0.0; d];
    if kept > 0.0 {
        for (v, &i) in support.iter().enumerate() {
            delta[i] = res.y[v].max(0.0) / kept;
        }
    }
    Ok(MeasureResult::numeric(value, res.gap.max(1e-9)).with_witness(Witness::State(incoherent_state(basis, &delta))))
}

/// Coherence concurrence C_z of a qubit, from the spectrum of √ρ σxρ*σx √ρ.
pub fn coherence_concurrence_qubit(rho: &DensityMatrix) -> Result<f64> {
    crate::qcore::require_dim(rho, 2)?;
    let sx = crate::qcore::pauli(1);
    let tilde = sx.matmul(&rho.mat().conj()).matmul(&sx);
    let s = crate::qcore::matrix_sqrt(rho);
    let l = eigh(&s.matmul(&tilde).matmul(&s)).values;
    Ok((l[0].max(0.0).sqrt() - l[1].max(0.0).sqrt()).abs())
}

/// Coherence of formation (intrinsic randomness) of a qubit, H((1+√(1−C_z²))/2).
pub fn coherence_of_formation_qubit(rho: &DensityMatrix) -> Result<MeasureResult> {
    let cz = coherence_concurrence_qubit(rho)?;
    let direct = 2.0 * rho.mat()[(0, 1)].norm();
    if (cz - direct).abs() > 1e-8 {
        return Err(Error::BoundViolation(format!("coherence concurrence {cz} differs from 2|ρ01| = {direct}")));
    }
    let v = h2((1.0 + (1.0 - cz * cz).max(0.0).sqrt()) / 2.0);
    Ok(MeasureResult::analytic(v))
}

/// Σ_{j<k} |⟨ψ|u_jk|ψ*⟩| with u_jk = |j⟩⟨k| + |k⟩⟨j|, in the given basis.
pub fn coherence_concurrence_pure(psi: &PureStateVec, basis: &ReferenceBasis) -> Result<MeasureResult> {
    basis.check(psi.dim())?;
    let amps: Vec<C64> = basis.vectors().iter().map(|v| crate::qcore::inner(v, psi.amplitudes())).collect();
    let d = amps.len();
    let mut s = 0.0;
    for j in 0..d {
        for k in j + 1..d {
            let uval = amps[j].conj() * amps[k].conj() + amps[k].conj() * amps[j].conj();
            s += uval.norm();
        }
    }
    Ok(MeasureResult::analytic(s))
}

pub fn coherence_rank(psi: &PureStateVec) -> usize {
    psi.amplitudes().iter().filter(|a| a.norm() > 1e-10).count()
}

pub fn c0(psi: &PureStateVec) -> f64 {
    (coherence_rank(psi) as f64).log2()
}

/// Sub/super-fidelity bracket for the geometric coherence.
pub fn geometric_coherence_bounds(m: &ComplexMatrix) -> (f64, f64) {
    let d = m.rows() as f64;
    let purity = m.hs_inner(m).re;
    let diag2: f64 = m.real_diagonal().iter().map(|x| x * x).sum();
    let inner = (1.0 - d / (d - 1.0) * (purity - diag2)).max(0.0);
    let lower = 1.0 - 1.0 / d - (d - 1.0) / d * inner.sqrt();
    let s = crate::qcore::psd_sqrt(m);
    let b2: f64 = s.real_diagonal().iter().map(|x| x * x).sum();
    let maxp = m.real_diagonal().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lower, (1.0 - maxp).min(1.0 - b2))
}

/// Root fidelity √F(ρ, diag δ) and its gradient in δ (with ρ given by its square root).
fn root_fidelity_diag(sqrt_rho: &ComplexMatrix, delta: &[f64]) -> (f64, Vec<f64>) {
    let d = delta.len();
    let dm = ComplexMatrix::diag(delta);
    let mm = sqrt_rho.matmul(&dm).matmul(sqrt_rho);
    let e = eigh(&mm);
    let top = e.values[0].max(0.0);
    let val: f64 = e.values.iter().map(|l| l.max(0.0).sqrt()).sum();
    let inv_half = e.apply(|l| if l > 1e-14 * top.max(1e-300) && l > 0.0 { 1.0 / l.sqrt() } else { 0.0 });
    let g = sqrt_rho.matmul(&inv_half).matmul(sqrt_rho);
    (val, (0..d).map(|i| 0.5 * g[(i, i)].re).collect())
}

pub fn geometric_coherence(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0).with_witness(diag_witness(basis, &m)));
    }
    if d == 2 {
        let a = m[(0, 1)].norm();
        return Ok(MeasureResult::analytic(0.5 * (1.0 - (1.0 - 4.0 * a * a).max(0.0).sqrt())));
    }
    let e = eigh(&m);
    if e.values[1].abs() < 1e-13 {
        let maxp = m.real_diagonal().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Ok(MeasureResult::analytic(1.0 - maxp));
    }
    let s = e.apply(|l| l.max(0.0).sqrt());
    let obj = |x: &[f64]| {
        let (v, g) = root_fidelity_diag(&s, x);
        (-v, g.into_iter().map(|t| -t).collect())
    };
    let proj = |v: &[f64]| optim::project_simplex(v, 0.0);
    let mut starts = vec![m.real_diagonal(), vec![1.0 / d as f64; d]];
    let sd: Vec<f64> = s.real_diagonal().iter().map(|x| x * x).collect();
    let tot: f64 = sd.iter().sum();
    starts.push(sd.iter().map(|x| x / tot).collect());
    let mut g = rng::rng(0x6765_6f6d);
    for _ in 0..64 {
        starts.push(rng::dirichlet(&mut g, d));
    }
    let best = optim::multistart(&obj, &proj, &starts, PgOptions::default());
    let f = best.value * best.value;
    let value = (1.0 - f).max(0.0);
    let (lo, hi) = geometric_coherence_bounds(&m);
    if value < lo - 1e-6 || value > hi + 1e-6 {
        return Err(Error::BoundViolation(format!("geometric coherence {value} outside [{lo}, {hi}]")));
    }
    Ok(MeasureResult::numeric(value, 1e-8).with_witness(Witness::State(incoherent_state(basis, &best.x))))
}

/// Tsallis-α relative entropy of coherence.
pub fn tsallis_coherence(rho: &DensityMatrix, basis: &ReferenceBasis, alpha: f64) -> Result<MeasureResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::ParamOutOfRange(format!("Tsallis order α = {alpha} must be positive")));
    }
    if alpha == 1.0 {
        return c_rel_entropy(rho, basis);
    }
    let m = rep(rho, basis)?;
    let d = m.rows() as f64;
    if is_incoherent(&m) {
        return Ok(MeasureResult::analytic(0.0));
    }
    let pa = eigh(&m).apply(|l| if l > 0.0 { l.powf(alpha) } else { 0.0 });
    let s: f64 = pa.real_diagonal().iter().map(|x| x.max(0.0).powf(1.0 / alpha)).sum();
    let value = ((s.powf(alpha) - 1.0) / (alpha - 1.0)).max(0.0);
    if alpha <= 2.0 {
        let dp = d * rho.purity();
        let bound = (dp.powf(alpha - 1.0) - 1.0) / (alpha - 1.0);
        if value > bound + 1e-9 {
            return Err(Error::BoundViolation(format!("Tsallis coherence {value} above bound {bound}")));
        }
    }
    Ok(MeasureResult::analytic(value))
}

pub fn c_max_relative_entropy(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let r = robustness(rho, basis)?;
    Ok(MeasureResult { value: (1.0 + r.value).log2(), ..r })
}

fn check_observable(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<()> {
    if k.rows() != rho.dim() || !k.is_square() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: k.rows() });
    }
    let defect = k.hermiticity_defect();
    if defect > crate::qcore::TOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Wigner–Yanase skew information −½ tr[√ρ, K]².
pub fn k_coherence(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    check_observable(rho, k)?;
    let c = crate::qcore::matrix_sqrt(rho).commutator(k);
    Ok((-0.5 * c.trace_product(&c).re).max(0.0))
}

/// Lower bound −¼ tr[ρ, K]².
pub fn k_coherence_lower(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    check_observable(rho, k)?;
    let c = rho.mat().commutator(k);
    Ok((-0.25 * c.trace_product(&c).re).max(0.0))
}

/// Skew-information coherence 1 − Σ_k ⟨k|√ρ|k⟩².
pub fn c_sk(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<MeasureResult> {
    let m = rep(rho, basis)?;
    let d = m.rows();
    let s = crate::qcore::psd_sqrt(&m);
    let sd: Vec<f64> = s.real_diagonal();
    let value = (1.0 - sd.iter().map(|x| x * x).sum::<f64>()).max(0.0);
    let dm = DensityMatrix::new_unchecked(m.clone());
    let mut skew = 0.0;
    for k in 0..d {
        let mut p = ComplexMatrix::zeros(d, d);
        p[(k, k)] = C64::new(1.0, 0.0);
        skew += k_coherence(&dm, &p)?;
    }
    if (skew - value).abs() > 1e-10 {
        return Err(Error::BoundViolation(format!("skew-information sum {skew} differs from {value}")));
    }
    let l2 = c_l2(&dm, &ReferenceBasis::computational(d))?.value;
    let (lo, hi) = (0.5 * l2, 1.0 - dm.purity() + l2);
    if value < lo - 1e-10 || value > hi + 1e-10 {
        return Err(Error::BoundViolation(format!("C_sk {value} outside [{lo}, {hi}]")));
    }
    let tot: f64 = sd.iter().map(|x| x * x).sum();
    let delta: Vec<f64> = sd.iter().map(|x| x * x / tot).collect();
    Ok(MeasureResult::analytic(value).with_witness(Witness::State(incoherent_state(basis, &delta))))
}

/// √((dP − 1)/(d − 1)), P = tr ρ².
pub fn c_basis_independent(rho: &DensityMatrix) -> f64 {
    let d = rho.dim() as f64;
    ((d * rho.purity() - 1.0) / (d - 1.0)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxCoherenceKind {
    RelEntropy,
    L2,
    Robustness,
    Weight,
    Sk,
}

impl FromStr for MaxCoherenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rel_entropy" => MaxCoherenceKind::RelEntropy,
            "l2" => MaxCoherenceKind::L2,
            "robustness" => MaxCoherenceKind::Robustness,
            "weight" => MaxCoherenceKind::Weight,
            "sk" => MaxCoherenceKind::Sk,
            other => return Err(Error::ParamOutOfRange(format!("unknown measure kind '{other}'"))),
        })
    }
}

/// max over unitaries U of C(UρU†), from the spectrum of ρ.
pub fn max_coherence_over_unitaries(rho: &DensityMatrix, kind: MaxCoherenceKind) -> f64 {
    let d = rho.dim() as f64;
    let l = rho.eigenvalues();
    let v = match kind {
        MaxCoherenceKind::RelEntropy => d.log2() - von_neumann_entropy(rho),
        MaxCoherenceKind::L2 => rho.purity() - 1.0 / d,
        MaxCoherenceKind::Robustness => d * l[0] - 1.0,
        MaxCoherenceKind::Weight => 1.0 - d * l[l.len() - 1].max(0.0),
        MaxCoherenceKind::Sk => {
            let s: f64 = l.iter().map(|x| x.max(0.0).sqrt()).sum();
            1.0 - s * s / d
        }
    };
    v.max(0.0)
}

/// Eigenbasis of a marginal with the eigenvalue groups (gap < 1e-8) that leave it ambiguous.
fn eigen_blocks(m: &ComplexMatrix) -> (ComplexMatrix, Vec<Vec<usize>>) {
    let e = eigh(m);
    let mut blocks: Vec<Vec<usize>> = vec![];
    for k in 0..e.values.len() {
        match blocks.last_mut() {
            Some(b) if (e.values[*b.last().unwrap()] - e.values[k]).abs() < 1e-8 => b.push(k),
            _ => blocks.push(vec![k]),
        }
    }
    (e.vectors, blocks)
}

fn rotate_blocks(v: &ComplexMatrix, blocks: &[Vec<usize>], g: &mut rng::QRng) -> ComplexMatrix {
    let mut out = v.clone();
    for b in blocks.iter().filter(|b| b.len() > 1) {
        let u = random_unitary_with(b.len(), g);
        for row in 0..v.rows() {
            for (jj, &j) in b.iter().enumerate() {
                let mut s = ZERO;
                for (kk, &k) in b.iter().enumerate() {
                    s += v[(row, k)] * u[(kk, jj)];
                }
                out[(row, j)] = s;
            }
        }
    }
    out
}

/// Correlated l1-coherence in the product of marginal eigenbases. Degenerate marginal
/// blocks are resolved by minimizing over 10³ sampled rotations inside each block.
pub fn correlated_coherence(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let ra = partial_trace(rho, dims, Keep::A)?;
    let rb = partial_trace(rho, dims, Keep::B)?;
    let (va, ba) = eigen_blocks(ra.mat());
    let (vb, bb) = eigen_blocks(rb.mat());
    let degenerate = ba.iter().chain(&bb).any(|b| b.len() > 1);
    let samples = if degenerate { 1000 } else { 1 };
    let mut g = rng::rng(0x6363);
    let mut best = f64::INFINITY;
    for s in 0..samples {
        let (ua, ub) = if s == 0 { (va.clone(), vb.clone()) } else { (rotate_blocks(&va, &ba, &mut g), rotate_blocks(&vb, &bb, &mut g)) };
        let u = ua.kron(&ub);
        let total = offdiag_l1(&u.adjoint().matmul(rho.mat()).matmul(&u));
        let la = offdiag_l1(&ua.adjoint().matmul(ra.mat()).matmul(&ua));
        let lb = offdiag_l1(&ub.adjoint().matmul(rb.mat()).matmul(&ub));
        best = best.min(total - la - lb);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonogamyKind {
    RelEntropy,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// C(ρ_{A1…AN}) ≥ Σ_i C(ρ_{Ai}) in the computational product basis.
pub fn monogamy_check(rho: &DensityMatrix, dims: &[usize], kind: MonogamyKind) -> Result<MonogamyReport> {
    let c = |r: &DensityMatrix| -> Result<f64> {
        let b = ReferenceBasis::computational(r.dim());
        Ok(match kind {
            MonogamyKind::RelEntropy => c_rel_entropy(r, &b)?.value,
            MonogamyKind::L1 => c_l1(r, &b)?.value,
        })
    };
    let lhs = c(rho)?;
    let mut rhs = 0.0;
    for k in 0..dims.len() {
        rhs += c(&reduce(rho, dims, &[k])?)?;
    }
    Ok(MonogamyReport { lhs, rhs, slack: lhs - rhs })
}

/// Steered l1-coherence average over Pauli measurements; advantage when above √6.
pub fn naqc_l1(rho: &DensityMatrix) -> Result<(f64, bool)> {
    crate::qcore::require_dim(rho, 4)?;
    use std::f64::consts::FRAC_PI_2;
    let axes = [(FRAC_PI_2, 0.0), (FRAC_PI_2, FRAC_PI_2), (0.0, 0.0)];
    let blocks = crate::sweep::QubitBlocks::new(rho.mat(), 2);
    let mut total = 0.0;
    for (i, &(t, p)) in axes.iter().enumerate() {
        for ket in crate::sweep::kets(t, p) {
            let cond = blocks.sandwich(&ket, &ket);
            let prob = cond.trace().re;
            if prob <= 1e-15 {
                continue;
            }
            let cond = DensityMatrix::new_unchecked(cond.scale(1.0 / prob));
            let r = crate::qcore::bloch_vector(&cond);
            let r2: f64 = r.iter().map(|x| x * x).sum();
            for j in (0..3).filter(|&j| j != i) {
                total += prob * (r2 - r[j] * r[j]).max(0.0).sqrt();
            }
        }
    }
    let v = 0.5 * total;
    Ok((v, v > 6f64.sqrt()))
}

/// Hermitian-checked spectrum helper used by examples and the CLI.
pub fn spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(rho.mat())?.values)
}
