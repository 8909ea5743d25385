//! Coherence accounting in DQC1 and Grover search, teleportation and remote state
//! preparation figures of merit, complementarity relations, and Haar averages.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{c_l1, c_rel_entropy};
use crate::discord::{hs_discord, lqu};
use crate::error::{Error, Result};
use crate::qcore::{
    bloch_decompose_2q, dephase_a, eigh, h2, shannon, swap_subsystems, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, PureStateVec, ReferenceBasis, ONE,
};
use crate::rng;
use crate::states::random_pure_with;

fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dqc1Instance {
    pub n: usize,
    pub u: ComplexMatrix,
}

impl Dqc1Instance {
    pub fn new(n: usize, u: ComplexMatrix) -> Result<Self> {
        let dim = 1usize << n;
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: u.rows() });
        }
        let dev = unitarity_defect(&u);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Dqc1Instance { n, u })
    }

    /// tr U / 2ⁿ.
    pub fn normalized_trace(&self) -> C64 {
        self.u.trace() / (1usize << self.n) as f64
    }

    /// Ancilla after the controlled unitary: ½[[1, tr U†/2ⁿ], [tr U/2ⁿ, 1]].
    pub fn ancilla_state(&self) -> DensityMatrix {
        let t = self.normalized_trace();
        DensityMatrix::new_unchecked(ComplexMatrix::from_rows(&[vec![ONE, t.conj()], vec![t, ONE]]).scale(0.5))
    }

    /// Ancilla–register state ½(I⊗I/2ⁿ + |0⟩⟨1|⊗U†/2ⁿ + |1⟩⟨0|⊗U/2ⁿ).
    pub fn joint_state(&self) -> DensityMatrix {
        let dim = 1usize << self.n;
        let s = 0.5 / dim as f64;
        let unit = |i: usize, j: usize| {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(i, j)] = ONE;
            e
        };
        let m = &(&ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(dim)) + &unit(0, 1).kron(&self.u.adjoint()))
            + &unit(1, 0).kron(&self.u);
        DensityMatrix::new_unchecked(m.scale(s))
    }
}

/// H₂((1 − |tr U|/2ⁿ)/2), cross-checked against C_r(|+⟩⟨+|) − C_r(ρ̃^A).
pub fn dqc1_coherence_consumption(inst: &Dqc1Instance) -> Result<f64> {
    let closed = h2((1.0 - inst.normalized_trace().norm().min(1.0)) / 2.0);
    let basis = ReferenceBasis::computational(2);
    let after = c_rel_entropy(&inst.ancilla_state(), &basis)?.value;
    let direct = 1.0 - after;
    if (closed - direct).abs() > 1e-10 {
        return Err(Error::BoundViolation(format!("DQC1 consumption {closed} vs coherence difference {direct}")));
    }
    Ok(closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverInstance {
    pub n: usize,
    pub j: usize,
    pub r: usize,
}

impl GroverInstance {
    pub fn new(n: usize, j: usize, r: usize) -> Result<Self> {
        if j < 1 || j >= n {
            return Err(Error::ParamOutOfRange(format!("need 1 ≤ j < N, got j = {j}, N = {n}")));
        }
        Ok(GroverInstance { n, j, r })
    }

    fn alpha(&self) -> f64 {
        (2 * self.r + 1) as f64 * (self.j as f64 / (self.n - self.j) as f64).sqrt().atan()
    }
}

/// sin α_r |X⟩ + cos α_r |X⊥⟩, with the j marked items first.
pub fn grover_state(inst: &GroverInstance) -> PureStateVec {
    let a = inst.alpha();
    let (s, c) = (a.sin() / (inst.j as f64).sqrt(), a.cos() / ((inst.n - inst.j) as f64).sqrt());
    let amps = (0..inst.n).map(|k| C64::new(if k < inst.j { s } else { c }, 0.0)).collect();
    PureStateVec::from_unnormalized(amps).expect("Grover amplitudes are normalized")
}

pub fn grover_success(inst: &GroverInstance) -> f64 {
    inst.alpha().sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroverCoherence {
    L1,
    RelEntropy,
}

/// Closed forms in the success probability p, checked against the measure on the full state.
pub fn grover_coherence(inst: &GroverInstance, kind: GroverCoherence) -> Result<f64> {
    let p = grover_success(inst);
    let (n, j) = (inst.n as f64, inst.j as f64);
    let basis = ReferenceBasis::computational(inst.n);
    let rho = grover_state(inst).density();
    let (closed, direct) = match kind {
        GroverCoherence::L1 => (
            ((j * p).sqrt() + ((n - j) * (1.0 - p).max(0.0)).sqrt()).powi(2) - 1.0,
            c_l1(&rho, &basis)?.value,
        ),
        GroverCoherence::RelEntropy => {
            (h2(p) + (n - j).log2() + p * (j / (n - j)).log2(), c_rel_entropy(&rho, &basis)?.value)
        }
    };
    if (closed - direct).abs() > 1e-10 * closed.abs().max(1.0) {
        return Err(Error::BoundViolation(format!("Grover coherence closed form {closed} vs direct {direct}")));
    }
    Ok(closed)
}

/// Upper end of the r_opt search, ⌈(π/4)√(N/j)⌉: it contains the first success peak and
/// stops short of the revivals one period later.
pub fn grover_search_window(n: usize, j: usize) -> usize {
    (std::f64::consts::FRAC_PI_4 * (n as f64 / j as f64).sqrt()).ceil() as usize
}

/// The iteration count with the highest success probability in the search window.
pub fn grover_r_opt(n: usize, j: usize) -> Result<usize> {
    GroverInstance::new(n, j, 0)?;
    let top = grover_search_window(n, j);
    let mut best = (0, f64::NEG_INFINITY);
    for r in 0..=top {
        let s = grover_success(&GroverInstance { n, j, r });
        if s > best.1 + 1e-12 {
            best = (r, s);
        }
    }
    Ok(best.0)
}

/// The closest-integer estimate CI[(π − α)/2α], α = 2 arctan√(j/(N−j)) being the rotation per iteration.
pub fn grover_r_opt_closed_form(n: usize, j: usize) -> Result<usize> {
    GroverInstance::new(n, j, 0)?;
    let a = 2.0 * (j as f64 / (n - j) as f64).sqrt().atan();
    Ok(((std::f64::consts::PI - a) / (2.0 * a)).round().max(0.0) as usize)
}

fn correlation_singular_data(rho: &DensityMatrix) -> Result<([f64; 3], [[f64; 3]; 3], [f64; 3])> {
    let b = bloch_decompose_2q(rho)?;
    let rrt = ComplexMatrix::from_fn(3, 3, |i, k| C64::new((0..3).map(|j| b.r[i][j] * b.r[k][j]).sum(), 0.0));
    let e = eigh(&rrt);
    let vals = [e.values[0].max(0.0), e.values[1].max(0.0), e.values[2].max(0.0)];
    let top = e.vectors.col(0);
    Ok((vals, b.r, [top[0].re, top[1].re, top[2].re]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportFidelity {
    pub fidelity: f64,
    pub lower: f64,
    pub upper: f64,
}

/// F̄ = 1/2 + tr√(RᵀR)/6 with (1 + D̃_G^max)/2 ≤ F̄ ≤ (2 + √D̃_G)/3, where D̃_G = 2 D_G.
pub fn teleport_fidelity_bounds(rho: &DensityMatrix) -> Result<TeleportFidelity> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let (e, r, _) = correlation_singular_data(rho)?;
    let fidelity = 0.5 + e.iter().map(|v| v.sqrt()).sum::<f64>() / 6.0;
    let r2: f64 = r.iter().flatten().map(|v| v * v).sum();
    let dmax = (r2 - e[0]) / 3.0;
    let dg = 2.0 * hs_discord(rho)?.value;
    let out = TeleportFidelity { fidelity, lower: (1.0 + dmax) / 2.0, upper: (2.0 + dg.max(0.0).sqrt()) / 3.0 };
    if out.lower > out.fidelity + 1e-9 || out.fidelity > out.upper + 1e-9 {
        return Err(Error::BoundViolation(format!("teleportation bounds out of order: {out:?}")));
    }
    Ok(out)
}

/// 𝓕 = (E₂ + E₃)/2 over the ordered eigenvalues of RᵀR. When the local vector x is parallel
/// to the top eigenvector, D_G = 𝓕/2 is checked.
pub fn rsp_fidelity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let (e, _, top) = correlation_singular_data(rho)?;
    let f = 0.5 * (e[1] + e[2]);
    let x = bloch_decompose_2q(rho)?.x;
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cross = [x[1] * top[2] - x[2] * top[1], x[2] * top[0] - x[0] * top[2], x[0] * top[1] - x[1] * top[0]];
    let parallel = xn < 1e-12 || cross.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-9 * xn;
    if parallel && (e[0] - e[1]) > 1e-9 {
        let dg = hs_discord(rho)?.value;
        if (dg - f / 2.0).abs() > 1e-9 {
            return Err(Error::BoundViolation(format!("D_G = {dg} but RSP fidelity / 2 = {}", f / 2.0)));
        }
    }
    Ok(f)
}

/// 1/(4·U_A): the single-probe variance bound for black-box phase estimation.
pub fn phase_estimation_bound(rho: &DensityMatrix) -> Result<f64> {
    let u = lqu(rho)?.value;
    if u <= 1e-12 {
        return Err(Error::ZeroLqu);
    }
    Ok(1.0 / (4.0 * u))
}

/// Complete sets of mutually unbiased bases: the Pauli eigenbases for d = 2 and
/// |ψ^k_m⟩ = Σ_j ω^{kj² + mj}|j⟩/√d for odd primes, preceded by the computational basis.
pub fn standard_mubs(d: usize) -> Result<Vec<ReferenceBasis>> {
    let is_prime = d >= 2 && (2..d).take_while(|k| k * k <= d).all(|k| d % k != 0);
    if !is_prime {
        return Err(Error::ParamOutOfRange(format!("built-in MUBs cover prime d only, got {d}")));
    }
    let s = 1.0 / (d as f64).sqrt();
    let mut out = vec![ReferenceBasis::computational(d)];
    if d == 2 {
        let i = C64::new(0.0, 1.0);
        out.push(ReferenceBasis::new(vec![vec![ONE * s, ONE * s], vec![ONE * s, -ONE * s]])?);
        out.push(ReferenceBasis::new(vec![vec![ONE * s, i * s], vec![ONE * s, -i * s]])?);
        return Ok(out);
    }
    let w = |e: usize| C64::from_polar(s, 2.0 * std::f64::consts::PI * (e % d) as f64 / d as f64);
    for k in 0..d {
        let vs = (0..d).map(|m| (0..d).map(|j| w(k * j * j + m * j)).collect()).collect();
        out.push(ReferenceBasis::new(vs)?);
    }
    Ok(out)
}

fn check_mubs(mubs: &[ReferenceBasis], d: usize) -> Result<()> {
    if mubs.len() != d + 1 || mubs.iter().any(|b| b.dim() != d) {
        return Err(Error::ParamOutOfRange(format!("expected {} bases of dimension {d}", d + 1)));
    }
    let mut worst = 0.0f64;
    for (a, ba) in mubs.iter().enumerate() {
        for bb in &mubs[a + 1..] {
            for u in ba.vectors() {
                for v in bb.vectors() {
                    let o: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                    worst = worst.max((o.norm_sqr() - 1.0 / d as f64).abs());
                }
            }
        }
    }
    if worst > 1e-9 {
        return Err(Error::NotMub(worst));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubReport {
    pub l1_lhs: f64,
    pub l1_rhs: f64,
    pub l1_slack: f64,
    pub rel_entropy_lhs: f64,
    pub rel_entropy_rhs: f64,
    pub rel_entropy_slack: f64,
}

/// Σ_j C²_l1(A_j, ρ) ≤ d(d−1)(dP − 1) and the relative-entropy counterpart.
pub fn mub_complementarity(rho: &DensityMatrix, mubs: &[ReferenceBasis]) -> Result<MubReport> {
    let d = rho.dim();
    check_mubs(mubs, d)?;
    let (mut l1, mut re) = (0.0, 0.0);
    for b in mubs {
        l1 += c_l1(rho, b)?.value.powi(2);
        re += c_rel_entropy(rho, b)?.value;
    }
    let df = d as f64;
    let p = rho.purity();
    let l1_rhs = df * (df - 1.0) * (df * p - 1.0);
    let tail = if d == 2 {
        (p - 0.5) * std::f64::consts::LOG2_E
    } else {
        (df - 1.0) * (df * p - 1.0) / (df * (df - 2.0)) * (df - 1.0).log2()
    };
    let re_rhs = (df + 1.0) * (df.log2() - von_neumann_entropy(rho)) - tail;
    Ok(MubReport {
        l1_lhs: l1,
        l1_rhs,
        l1_slack: l1_rhs - l1,
        rel_entropy_lhs: re,
        rel_entropy_rhs: re_rhs,
        rel_entropy_slack: re_rhs - re,
    })
}

/// ε/(d−1) I + (d(1−ε) − 1)/(d−1) |a⟩⟨a|.
pub fn rho_epsilon(eps: f64, a: &[C64]) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::ParamOutOfRange(format!("ε = {eps} outside [0, 1]")));
    }
    let d = a.len() as f64;
    let m = &ComplexMatrix::identity(a.len()).scale(eps / (d - 1.0))
        + &ComplexMatrix::outer(a, a).scale((d * (1.0 - eps) - 1.0) / (d - 1.0));
    DensityMatrix::new(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixednessReport {
    pub c_l1: f64,
    pub mixedness: f64,
    pub lhs: f64,
    pub slack: f64,
    /// Weight p when ρ = (1−p)I/d + p|Ψ_d⟩⟨Ψ_d|.
    pub mcms_weight: Option<f64>,
}

/// C²_l1/(d−1)² + M_l ≤ 1 with M_l = d(1 − tr ρ²)/(d − 1).
pub fn coherence_mixedness(rho: &DensityMatrix) -> Result<MixednessReport> {
    let d = rho.dim();
    let df = d as f64;
    let c = c_l1(rho, &ReferenceBasis::computational(d))?.value;
    let mixedness = df * (1.0 - rho.purity()) / (df - 1.0);
    let lhs = (c / (df - 1.0)).powi(2) + mixedness;
    let p = rho.mat()[(0, 1)].re * df;
    let fit = ComplexMatrix::from_fn(d, d, |i, j| C64::new(p / df + if i == j { (1.0 - p) / df } else { 0.0 }, 0.0));
    let mcms_weight = (fit.max_abs_diff(rho.mat()) <= 1e-10).then_some(p);
    Ok(MixednessReport { c_l1: c, mixedness, lhs, slack: 1.0 - lhs, mcms_weight })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub c_l1: f64,
    pub distinguishability: f64,
    pub sum: f64,
    pub intensity_ratio: f64,
    /// (C_l1/(N−1))² + ((N p_aqsd − 1)/(N−1))² with p_aqsd at its Helstrom upper bound.
    pub aqsd_lhs: f64,
}

/// Path coherence after which-path marking, 𝒟_Q, and the fringe-intensity identity.
pub fn wave_particle_duality(amps: &[C64], overlaps: &ComplexMatrix) -> Result<DualityReport> {
    let n = amps.len();
    if n < 2 || overlaps.rows() != n || overlaps.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: overlaps.rows() });
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    if overlaps.hermiticity_defect() > 1e-10 {
        return Err(Error::InvalidGram("overlap matrix is not Hermitian".into()));
    }
    if (0..n).any(|i| (overlaps[(i, i)] - ONE).norm() > 1e-10) {
        return Err(Error::InvalidGram("overlap matrix needs a unit diagonal".into()));
    }
    let lmin = *eigh(overlaps).values.last().unwrap();
    if lmin < -1e-10 {
        return Err(Error::InvalidGram(format!("overlap matrix has eigenvalue {lmin:.3e}")));
    }
    // ρ'_s = Σ c_i c_j* ⟨ξ_j|ξ_i⟩ |i⟩⟨j|, with overlaps[(i, j)] = ⟨ξ_i|ξ_j⟩
    let rho = ComplexMatrix::from_fn(n, n, |i, j| amps[i] * amps[j].conj() * overlaps[(j, i)]);
    let c = c_l1(&DensityMatrix::new_unchecked(rho), &ReferenceBasis::computational(n))?.value;
    let nf = n as f64;
    let dq = 1.0 - c / (nf - 1.0);
    // fringe at a primary maximum with aligned phases, relative to the phase-randomized intensity
    let mut fringe = 1.0;
    let mut helstrom = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let (cj, ck, o) = (amps[j].norm(), amps[k].norm(), overlaps[(j, k)].norm());
                fringe += cj * ck * o;
                let m = 0.5 * (cj * cj + ck * ck);
                helstrom += 2.0 * (m * m - (cj * ck * o).powi(2)).max(0.0).sqrt();
            }
        }
    }
    let p_aqsd = 1.0 / nf + helstrom / (2.0 * nf);
    let aqsd_lhs = (c / (nf - 1.0)).powi(2) + ((nf * p_aqsd - 1.0) / (nf - 1.0)).powi(2);
    Ok(DualityReport { c_l1: c, distinguishability: dq, sum: c / (nf - 1.0) + dq, intensity_ratio: fringe - 1.0, aqsd_lhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarKind {
    L1,
    /// Relative entropy of coherence in nats.
    RelEntropy,
    /// ‖Δ(ψ) − I/d‖₁.
    DephasedTraceDistance,
}

impl std::str::FromStr for HaarKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(HaarKind::L1),
            "rel_entropy" => Ok(HaarKind::RelEntropy),
            "dephased_trace_distance" => Ok(HaarKind::DephasedTraceDistance),
            _ => Err(Error::Parse(format!("unknown Haar quantity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarAverage {
    pub mean: f64,
    pub stderr: f64,
    pub analytic: f64,
    /// Mean and analytic value in bits, for the relative entropy.
    pub mean_bits: Option<f64>,
    pub analytic_bits: Option<f64>,
}

impl HaarAverage {
    pub fn sigmas(&self) -> f64 {
        (self.mean - self.analytic).abs() / self.stderr.max(1e-300)
    }
}

pub fn haar_analytic(d: usize, kind: HaarKind) -> f64 {
    let df = d as f64;
    match kind {
        HaarKind::L1 => (df - 1.0) * std::f64::consts::FRAC_PI_4,
        HaarKind::RelEntropy => (1..=d).map(|k| 1.0 / k as f64).sum::<f64>() - 1.0,
        HaarKind::DephasedTraceDistance => 2.0 * (1.0 - 1.0 / df).powi(d as i32),
    }
}

const HAAR_SHARDS: u64 = 16;

/// Monte-Carlo average over Haar pure states; shard s draws from substream(seed, s).
pub fn haar_average_coherence(d: usize, n_samples: usize, seed: u64, kind: HaarKind) -> Result<HaarAverage> {
    if n_samples < 1000 || d < 2 {
        return Err(Error::ParamOutOfRange(format!("need d ≥ 2 and at least 10³ samples, got d = {d}, n = {n_samples}")));
    }
    let per = n_samples.div_ceil(HAAR_SHARDS as usize);
    let vals: Vec<f64> = (0..HAAR_SHARDS)
        .into_par_iter()
        .flat_map_iter(|s| {
            let take = per.min(n_samples.saturating_sub(s as usize * per));
            let mut g = rng::substream(seed, s);
            (0..take)
                .map(|_| {
                    let psi = random_pure_with(d, &mut g);
                    let p: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm_sqr()).collect();
                    match kind {
                        HaarKind::L1 => psi.amplitudes().iter().map(|z| z.norm()).sum::<f64>().powi(2) - 1.0,
                        HaarKind::RelEntropy => shannon(&p) * std::f64::consts::LN_2,
                        HaarKind::DephasedTraceDistance => p.iter().map(|x| (x - 1.0 / d as f64).abs()).sum(),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let analytic = haar_analytic(d, kind);
    let bits = (kind == HaarKind::RelEntropy).then_some(std::f64::consts::LOG2_E);
    Ok(HaarAverage {
        mean,
        stderr: (var / n).sqrt(),
        analytic,
        mean_bits: bits.map(|b| mean * b),
        analytic_bits: bits.map(|b| analytic * b),
    })
}

/// l1 coherence of an L-site, N-particle state with off-diagonal long-range order: N(L − N).
pub fn odlro_coherence(l: usize, n: usize) -> Result<f64> {
    if n > l {
        return Err(Error::ParamOutOfRange(format!("N = {n} exceeds L = {l}")));
    }
    Ok((n * (l - n)) as f64)
}

/// S(Δ^{AB}ρ) − S(Δ^Bρ) for a state on R⊗A⊗B, bounding entanglement plus coherence cost of merging.
pub fn merging_bound(rho: &DensityMatrix, (dr, da, db): (usize, usize, usize)) -> Result<f64> {
    if dr * da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: dr * da * db, got: rho.dim() });
    }
    let comp = |d: usize| ReferenceBasis::computational(d).vectors().to_vec();
    // dephase_a acts on the first factor, so the target factor is swapped to the front and back
    let exchange = |m: &ComplexMatrix, front: usize, back: usize| swap_subsystems(m, (front, back));
    let dephase_b = |m: &ComplexMatrix| {
        let moved = exchange(m, dr * da, db);
        exchange(&dephase_a(&moved, (db, dr * da), &comp(db)), db, dr * da)
    };
    let db_only = dephase_b(rho.mat());
    let moved = exchange(&db_only, dr, da * db);
    let both = exchange(&dephase_a(&moved, (da * db, dr), &comp(da * db)), da * db, dr);
    let s = |m: ComplexMatrix| von_neumann_entropy(&DensityMatrix::new_unchecked(m.hermitian_part()));
    Ok(s(both) - s(db_only))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::negativity;
    use crate::qcore::{c, pauli};
    use crate::states::{bell_diagonal, maximally_coherent, mcms, phi_plus, random_density, random_density_with, random_unitary, werner, BellDiagonalParams};

    #[test]
    fn dqc1_endpoints() {
        let id = Dqc1Instance::new(2, ComplexMatrix::identity(4)).unwrap();
        assert!(dqc1_coherence_consumption(&id).unwrap().abs() < 1e-15);
        let x = Dqc1Instance::new(2, pauli(1).kron(&pauli(0))).unwrap();
        assert!((dqc1_coherence_consumption(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(Dqc1Instance::new(1, pauli(1).scale(1.1)), Err(Error::NotUnitary(_))));
        assert!(matches!(Dqc1Instance::new(2, pauli(1)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dqc1_random_and_global_phase() {
        let u = random_unitary(8, 23);
        let inst = Dqc1Instance::new(3, u.clone()).unwrap();
        let v = dqc1_coherence_consumption(&inst).unwrap();
        assert!((0.0..=1.0).contains(&v));
        let phased = Dqc1Instance::new(3, u.scale_c(C64::from_polar(1.0, 0.7))).unwrap();
        assert!((dqc1_coherence_consumption(&phased).unwrap() - v).abs() < 1e-12);
        // the ancilla marginal of the joint state is the stated 2×2 matrix
        let joint = inst.joint_state();
        let a = crate::qcore::partial_trace(&joint, (2, 8), crate::qcore::Keep::A).unwrap();
        assert!(a.mat().max_abs_diff(inst.ancilla_state().mat()) < 1e-14);
    }

    #[test]
    fn grover_examples() {
        let g = GroverInstance::new(4, 1, 1).unwrap();
        assert!((grover_success(&g) - 1.0).abs() < 1e-15);
        assert!(grover_coherence(&g, GroverCoherence::L1).unwrap().abs() < 1e-12);
        assert!(grover_coherence(&g, GroverCoherence::RelEntropy).unwrap().abs() < 1e-12);
        let g0 = GroverInstance::new(4, 1, 0).unwrap();
        assert!((grover_coherence(&g0, GroverCoherence::L1).unwrap() - 3.0).abs() < 1e-12);
        assert!((grover_coherence(&g0, GroverCoherence::RelEntropy).unwrap() - 2.0).abs() < 1e-12);
        for r in 0..6 {
            let g = GroverInstance::new(8, 4, r).unwrap();
            let expect = ((2 * r + 1) as f64 * std::f64::consts::FRAC_PI_4).sin().powi(2);
            assert!((grover_success(&g) - expect).abs() < 1e-14);
        }
        assert!(matches!(GroverInstance::new(4, 4, 0), Err(Error::ParamOutOfRange(_))));
        assert!(matches!(GroverInstance::new(4, 0, 0), Err(Error::ParamOutOfRange(_))));
    }

    #[test]
    fn grover_closed_forms_track_direct_evaluation() {
        for (n, j) in [(4, 1), (8, 1), (16, 3), (32, 5)] {
            for r in 0..=6 {
                let g = GroverInstance::new(n, j, r).unwrap();
                grover_coherence(&g, GroverCoherence::L1).unwrap();
                grover_coherence(&g, GroverCoherence::RelEntropy).unwrap();
                let amps = grover_state(&g);
                let norm: f64 = amps.amplitudes().iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grover_optimal_iterations() {
        assert_eq!(grover_r_opt(4, 1).unwrap(), 1);
        assert_eq!(grover_r_opt_closed_form(4, 1).unwrap(), 1);
        assert_eq!(grover_r_opt(16, 1).unwrap(), 3);
        for (n, j) in [(4, 1), (16, 1), (64, 3), (100, 7), (1024, 1)] {
            let ropt = grover_r_opt(n, j).unwrap();
            let best = grover_success(&GroverInstance::new(n, j, ropt).unwrap());
            for r in 0..=grover_search_window(n, j) {
                assert!(best >= grover_success(&GroverInstance::new(n, j, r).unwrap()) - 1e-12);
            }
            assert!(grover_r_opt_closed_form(n, j).unwrap().abs_diff(ropt) <= 1);
        }
    }

    #[test]
    fn grover_coherence_falls_as_success_rises() {
        for (n, j) in [(16, 1), (64, 3), (256, 2)] {
            let ropt = grover_r_opt(n, j).unwrap();
            let mut prev: Option<(f64, f64, f64)> = None;
            for r in 0..=ropt {
                let g = GroverInstance::new(n, j, r).unwrap();
                let p = grover_success(&g);
                let cl = grover_coherence(&g, GroverCoherence::L1).unwrap();
                let cr = grover_coherence(&g, GroverCoherence::RelEntropy).unwrap();
                if let Some((p0, l0, r0)) = prev {
                    assert!(p > p0 && cl < l0 && cr < r0);
                }
                prev = Some((p, cl, cr));
            }
        }
    }

    #[test]
    fn teleportation_examples() {
        let t = teleport_fidelity_bounds(&phi_plus().density()).unwrap();
        assert!((t.fidelity - 1.0).abs() < 1e-12);
        let t = teleport_fidelity_bounds(&DensityMatrix::maximally_mixed(4)).unwrap();
        assert!((t.fidelity - 0.5).abs() < 1e-15);
        let t = teleport_fidelity_bounds(&werner(-1.0, 2).unwrap()).unwrap();
        assert!((t.fidelity - 1.0).abs() < 1e-12 && t.lower <= t.fidelity && t.fidelity <= t.upper + 1e-12);
        assert!(matches!(teleport_fidelity_bounds(&DensityMatrix::maximally_mixed(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn teleportation_bounds_on_random_states() {
        let mut g = rng::rng(61);
        for _ in 0..200 {
            let rho = random_density_with(4, 1 + (rng::uniform(&mut g) * 4.0) as usize % 4, &mut g);
            let t = teleport_fidelity_bounds(&rho).unwrap();
            // 3F̄ − 2 ≤ N and N² ≤ D̃_G, the two steps behind the upper bound
            let n = negativity(&rho, (2, 2)).unwrap() * 2.0;
            assert!(3.0 * t.fidelity - 2.0 <= n.max(0.0) + 1e-9 || 3.0 * t.fidelity - 2.0 <= 0.0);
        }
    }

    #[test]
    fn rsp_examples() {
        assert!((rsp_fidelity(&phi_plus().density()).unwrap() - 1.0).abs() < 1e-12);
        // classical-quantum: |0⟩⟨0|⊗ρ0 + |1⟩⟨1|⊗ρ1 gives a rank-one R
        let p0 = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let p1 = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let cq = &ComplexMatrix::diag(&[0.5, 0.0]).kron(p0.mat()) + &ComplexMatrix::diag(&[0.0, 0.5]).kron(p1.mat());
        let cq = DensityMatrix::new(cq.hermitian_part()).unwrap();
        assert!(rsp_fidelity(&cq).unwrap().abs() < 1e-14);
        let bd = bell_diagonal(BellDiagonalParams::new(0.8, -0.4, 0.2)).unwrap();
        assert!((rsp_fidelity(&bd).unwrap() - 0.10).abs() < 1e-12);
        assert!((hs_discord(&bd).unwrap().value - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rsp_discord_identity_with_parallel_local_vector() {
        // ρ = ¼(I + a σz⊗I + Σ c_i σ_i⊗σ_i) keeps x along the top eigenvector of RRᵀ
        for (a, cs) in [(0.2, [0.1, -0.2, 0.5]), (0.1, [0.3, 0.2, -0.6])] {
            let mut m = ComplexMatrix::identity(4);
            m = &m + &pauli(3).kron(&pauli(0)).scale(a);
            for (i, ci) in cs.iter().enumerate() {
                m = &m + &pauli(i + 1).kron(&pauli(i + 1)).scale(*ci);
            }
            let rho = DensityMatrix::new(m.scale(0.25)).unwrap();
            let f = rsp_fidelity(&rho).unwrap();
            assert!((hs_discord(&rho).unwrap().value - f / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_estimation_examples() {
        assert!((phase_estimation_bound(&phi_plus().density()).unwrap() - 0.25).abs() < 1e-10);
        let prod = crate::qcore::PureStateVec::basis_state(4, 0).density();
        assert!(matches!(phase_estimation_bound(&prod), Err(Error::ZeroLqu)));
        let w = werner(0.9, 2).unwrap();
        let u = lqu(&w).unwrap().value;
        assert!((phase_estimation_bound(&w).unwrap() - 1.0 / (4.0 * u)).abs() < 1e-12);
    }

    #[test]
    fn mub_examples() {
        let m = standard_mubs(2).unwrap();
        let plus = maximally_coherent(2).density();
        let r = mub_complementarity(&plus, &m).unwrap();
        assert!((r.l1_lhs - 2.0).abs() < 1e-12 && (r.l1_rhs - 2.0).abs() < 1e-12);
        let r = mub_complementarity(&DensityMatrix::maximally_mixed(2), &m).unwrap();
        assert!(r.l1_lhs.abs() < 1e-14 && r.l1_rhs.abs() < 1e-14);
        let a = m[1].vectors()[0].clone();
        let r = mub_complementarity(&rho_epsilon(0.3, &a).unwrap(), &m).unwrap();
        assert!(r.l1_slack.abs() < 1e-9);
        let not_mub = vec![m[0].clone(), m[0].clone(), m[1].clone()];
        assert!(matches!(mub_complementarity(&plus, &not_mub), Err(Error::NotMub(_))));
    }

    #[test]
    fn mub_relations_hold_on_random_states() {
        let mut g = rng::rng(71);
        for d in [2, 3, 5] {
            let m = standard_mubs(d).unwrap();
            check_mubs(&m, d).unwrap();
            let n = if d == 2 { 1000 } else { 100 };
            for _ in 0..n {
                let rho = random_density_with(d, 1 + (rng::uniform(&mut g) * d as f64) as usize % d, &mut g);
                let r = mub_complementarity(&rho, &m).unwrap();
                assert!(r.l1_slack >= -1e-9, "d = {d}: {r:?}");
                assert!(r.rel_entropy_slack >= -1e-9, "d = {d}: {r:?}");
            }
            for eps in [0.0, 0.2, 0.7, 1.0] {
                for b in &m {
                    let r = mub_complementarity(&rho_epsilon(eps, &b.vectors()[1]).unwrap(), &m).unwrap();
                    assert!(r.l1_slack.abs() < 1e-9);
                }
            }
        }
        assert!(matches!(standard_mubs(4), Err(Error::ParamOutOfRange(_))));
    }

    #[test]
    fn coherence_mixedness_examples() {
        let r = coherence_mixedness(&mcms(0.5, 2).unwrap()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14 && (r.c_l1 - 0.5).abs() < 1e-14 && (r.mixedness - 0.75).abs() < 1e-14);
        assert!((r.mcms_weight.unwrap() - 0.5).abs() < 1e-14);
        for d in [2, 3, 4] {
            for p in [0.0, 0.3, 1.0] {
                let r = coherence_mixedness(&mcms(p, d).unwrap()).unwrap();
                assert!(r.slack.abs() < 1e-12 && r.mcms_weight.is_some());
            }
        }
        let psi = crate::states::random_pure(3, 5).unwrap().density();
        let r = coherence_mixedness(&psi).unwrap();
        assert!(r.mixedness.abs() < 1e-12 && r.lhs <= 1.0 + 1e-12);
        let q = random_density(3, 3, 31).unwrap();
        let r = coherence_mixedness(&q).unwrap();
        assert!(r.slack >= 0.0 && r.mcms_weight.is_none());
        let mut g = rng::rng(32);
        for _ in 0..1000 {
            let d = 2 + (rng::uniform(&mut g) * 3.0) as usize;
            let rho = random_density_with(d, d, &mut g);
            assert!(coherence_mixedness(&rho).unwrap().slack >= -1e-9);
        }
    }

    #[test]
    fn wave_particle_examples() {
        let amps = maximally_coherent(3).amplitudes().to_vec();
        let r = wave_particle_duality(&amps, &ComplexMatrix::identity(3)).unwrap();
        assert!(r.c_l1.abs() < 1e-15 && (r.distinguishability - 1.0).abs() < 1e-15);
        let amps = vec![C64::new(0.6, 0.0), c(0.0, 0.48), C64::new(0.64, 0.0)];
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| ONE);
        let r = wave_particle_duality(&amps, &ones).unwrap();
        let pairs = 2.0 * (0.6 * 0.48 + 0.6 * 0.64 + 0.48 * 0.64);
        assert!((r.distinguishability - (1.0 - pairs / 2.0)).abs() < 1e-12);
        assert!((r.sum - 1.0).abs() < 1e-12);
        let amps = maximally_coherent(2).amplitudes().to_vec();
        let half = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(if i == j { 1.0 } else { 0.5 }, 0.0));
        let r = wave_particle_duality(&amps, &half).unwrap();
        assert!((r.c_l1 - 0.5).abs() < 1e-14 && (r.distinguishability - 0.5).abs() < 1e-14);
        assert!((r.intensity_ratio - r.c_l1).abs() < 1e-14);
        let bad = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(if i == j { 1.0 } else { 1.5 }, 0.0));
        assert!(matches!(wave_particle_duality(&amps, &bad), Err(Error::InvalidGram(_))));
    }

    #[test]
    fn wave_particle_identity_on_random_detectors() {
        let mut g = rng::rng(81);
        for _ in 0..50 {
            let n = 2 + (rng::uniform(&mut g) * 3.0) as usize;
            let amps = random_pure_with(n, &mut g).amplitudes().to_vec();
            let xi: Vec<Vec<C64>> = (0..n).map(|_| random_pure_with(3, &mut g).amplitudes().to_vec()).collect();
            let gram = ComplexMatrix::from_fn(n, n, |i, j| xi[i].iter().zip(&xi[j]).map(|(a, b)| a.conj() * b).sum());
            let r = wave_particle_duality(&amps, &gram).unwrap();
            assert!((r.sum - 1.0).abs() < 1e-12);
            assert!((r.intensity_ratio - r.c_l1).abs() < 1e-12);
            assert!(r.aqsd_lhs >= 0.0);
        }
    }

    #[test]
    fn haar_examples() {
        let l1 = haar_average_coherence(2, 10_000, 1, HaarKind::L1).unwrap();
        assert!((l1.analytic - std::f64::consts::FRAC_PI_4).abs() < 1e-15 && l1.sigmas() < 4.0);
        let re = haar_average_coherence(4, 10_000, 2, HaarKind::RelEntropy).unwrap();
        assert!((re.analytic - (25.0 / 12.0 - 1.0)).abs() < 1e-15 && re.sigmas() < 4.0);
        assert!((re.mean_bits.unwrap() - re.mean / std::f64::consts::LN_2).abs() < 1e-12);
        let td = haar_average_coherence(2, 10_000, 3, HaarKind::DephasedTraceDistance).unwrap();
        assert!((td.analytic - 0.5).abs() < 1e-15 && td.sigmas() < 4.0);
        assert!(matches!(haar_average_coherence(2, 10, 1, HaarKind::L1), Err(Error::ParamOutOfRange(_))));
        let again = haar_average_coherence(2, 10_000, 1, HaarKind::L1).unwrap();
        assert_eq!(again.mean, l1.mean);
    }

    #[test]
    fn odlro_examples() {
        assert_eq!(odlro_coherence(5, 0).unwrap(), 0.0);
        assert_eq!(odlro_coherence(4, 2).unwrap(), 4.0);
        assert_eq!(odlro_coherence(4, 4).unwrap(), 0.0);
        assert!(matches!(odlro_coherence(3, 4), Err(Error::ParamOutOfRange(_))));
    }

    #[test]
    fn merging_bound_is_nonnegative_and_matches_pure_case() {
        let mut g = rng::rng(91);
        for _ in 0..20 {
            let rho = random_density_with(8, 3, &mut g);
            assert!(merging_bound(&rho, (2, 2, 2)).unwrap() >= -1e-12);
        }
        // a product of incoherent R, A, B states loses nothing to dephasing
        let prod = DensityMatrix::diagonal(&[0.1, 0.2, 0.05, 0.15, 0.2, 0.1, 0.12, 0.08]).unwrap();
        assert!(merging_bound(&prod, (2, 2, 2)).unwrap().abs() < 1e-12);
        let psi = random_pure_with(8, &mut g).density();
        assert!(merging_bound(&psi, (2, 2, 2)).unwrap() >= -1e-12);
        assert!(matches!(merging_bound(&psi, (2, 2, 3)), Err(Error::DimensionMismatch { .. })));
    }
}
