//! Kraus channels: standard noise models, transfer matrices, classification, freezing
//! predicates, the l1 factorization law, coherence breaking, and cohering/decohering power.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coherence::{c_l1, c_rel_entropy};
use crate::error::{Error, Result};
use crate::measure::{MeasureResult, Witness};
use crate::qcore::{
    eigh, gell_mann, pauli, shannon, von_neumann_entropy, ComplexMatrix, DensityMatrix, ReferenceBasis, ONE,
};
use crate::rng;
use crate::states::{random_pure_with, BellDiagonalParams};
use crate::sweep::pattern_search;

pub const KRAUS_TOL: f64 = 1e-10;
const CLASSIFY_TOL: f64 = 1e-10;
const PRUNE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub kraus_ops: Vec<ComplexMatrix>,
    pub label: String,
}

impl KrausChannel {
    pub fn new(label: impl Into<String>, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus_ops.first() else {
            return Err(Error::ParamOutOfRange("a channel needs at least one Kraus operator".into()));
        };
        let d = first.rows();
        for k in &kraus_ops {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: if k.rows() != d { k.rows() } else { k.cols() } });
            }
        }
        let ch = KrausChannel { kraus_ops, label: label.into() };
        let dev = ch.completeness_defect();
        if dev > KRAUS_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(ch)
    }

    pub fn unitary(label: impl Into<String>, u: ComplexMatrix) -> Result<Self> {
        let dev = unitarity_defect(&u)?;
        if dev > KRAUS_TOL {
            return Err(Error::NotUnitary(dev));
        }
        KrausChannel::new(label, vec![u])
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel { kraus_ops: vec![ComplexMatrix::identity(d)], label: "identity".into() }
    }

    /// Complete dephasing in the computational basis.
    pub fn full_dephasing(d: usize) -> Self {
        let ops = (0..d)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(k, k)] = ONE;
                m
            })
            .collect();
        KrausChannel { kraus_ops: ops, label: "dephasing".into() }
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].rows()
    }

    fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let s = self.kraus_ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(k));
        s.max_abs_diff(&ComplexMatrix::identity(d))
    }

    pub fn apply_mat(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        self.kraus_ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.matmul(m).matmul(&k.adjoint()))
    }

    /// Heisenberg-picture map ℰ†(X) = Σ K†XK.
    pub fn apply_adjoint(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        self.kraus_ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(m).matmul(k))
    }

    /// `self ∘ first`: products K_i L_j, dropping those with Frobenius norm below 1e-12.
    pub fn compose(&self, first: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::new();
        for k in &self.kraus_ops {
            for l in &first.kraus_ops {
                let p = k.matmul(l);
                if p.frobenius() >= PRUNE {
                    ops.push(p);
                }
            }
        }
        KrausChannel { kraus_ops: ops, label: format!("{}∘{}", self.label, first.label) }
    }

    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let ops = self.kraus_ops.iter().flat_map(|k| other.kraus_ops.iter().map(move |l| k.kron(l))).collect();
        KrausChannel { kraus_ops: ops, label: format!("{}⊗{}", self.label, other.label) }
    }

    /// The unitary if the channel has a single unitary Kraus operator.
    pub fn as_unitary(&self) -> Option<&ComplexMatrix> {
        match self.kraus_ops.as_slice() {
            [u] if unitarity_defect(u).is_ok_and(|d| d <= KRAUS_TOL) => Some(u),
            _ => None,
        }
    }
}

fn unitarity_defect(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.rows(), got: u.cols() });
    }
    Ok(u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.rows())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
    /// Generalized amplitude damping with ground-state weight `p` of the bath.
    GeneralizedAmplitudeDamping { p: f64 },
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::BitFlip => write!(f, "bit_flip"),
            ChannelKind::PhaseFlip => write!(f, "phase_flip"),
            ChannelKind::BitPhaseFlip => write!(f, "bit_phase_flip"),
            ChannelKind::Depolarizing => write!(f, "depolarizing"),
            ChannelKind::AmplitudeDamping => write!(f, "amplitude_damping"),
            ChannelKind::PhaseDamping => write!(f, "phase_damping"),
            ChannelKind::GeneralizedAmplitudeDamping { p } => write!(f, "generalized_amplitude_damping:{p}"),
        }
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bit_flip" => ChannelKind::BitFlip,
            "phase_flip" => ChannelKind::PhaseFlip,
            "bit_phase_flip" => ChannelKind::BitPhaseFlip,
            "depolarizing" => ChannelKind::Depolarizing,
            "amplitude_damping" => ChannelKind::AmplitudeDamping,
            "phase_damping" => ChannelKind::PhaseDamping,
            _ => match s.strip_prefix("generalized_amplitude_damping:") {
                Some(p) => ChannelKind::GeneralizedAmplitudeDamping {
                    p: p.parse().map_err(|_| Error::Parse(format!("bad bath weight in {s:?}")))?,
                },
                None => return Err(Error::Parse(format!("unknown channel kind {s:?}"))),
            },
        })
    }
}

fn real2(a: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| C64::new(a[i][j], 0.0))
}

/// Qubit noise channels. `param` is the flip probability, the depolarizing weight
/// (ρ → (1−p)ρ + p I/2), the damping rate γ, or for phase damping the coherence factor p(t).
pub fn standard_channel(kind: ChannelKind, param: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::ParamOutOfRange(format!("{kind} parameter {param} outside [0, 1]")));
    }
    let p = param;
    let flip = |k: usize| vec![ComplexMatrix::identity(2).scale((1.0 - p).sqrt()), pauli(k).scale(p.sqrt())];
    let ops = match kind {
        ChannelKind::BitFlip => flip(1),
        ChannelKind::BitPhaseFlip => flip(2),
        ChannelKind::PhaseFlip => flip(3),
        ChannelKind::Depolarizing => {
            let mut v = vec![ComplexMatrix::identity(2).scale((1.0 - 0.75 * p).sqrt())];
            v.extend((1..4).map(|k| pauli(k).scale((p / 4.0).sqrt())));
            v
        }
        ChannelKind::AmplitudeDamping => {
            vec![real2([[1.0, 0.0], [0.0, (1.0 - p).sqrt()]]), real2([[0.0, p.sqrt()], [0.0, 0.0]])]
        }
        ChannelKind::PhaseDamping => {
            vec![real2([[1.0, 0.0], [0.0, p]]), real2([[0.0, 0.0], [0.0, (1.0 - p * p).sqrt()]])]
        }
        ChannelKind::GeneralizedAmplitudeDamping { p: w } => {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::ParamOutOfRange(format!("bath weight {w} outside [0, 1]")));
            }
            let (a, b) = (w.sqrt(), (1.0 - w).sqrt());
            vec![
                real2([[a, 0.0], [0.0, a * (1.0 - p).sqrt()]]),
                real2([[0.0, a * p.sqrt()], [0.0, 0.0]]),
                real2([[b * (1.0 - p).sqrt(), 0.0], [0.0, b]]),
                real2([[0.0, 0.0], [b * p.sqrt(), 0.0]]),
            ]
        }
    };
    KrausChannel::new(format!("{kind}({param})"), ops)
}

/// Where a channel acts inside a multipartite state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OnSubsystem {
    Whole,
    Part { dims: Vec<usize>, index: usize },
}

fn embed(k: &ComplexMatrix, dims: &[usize], index: usize) -> ComplexMatrix {
    let left: usize = dims[..index].iter().product();
    let right: usize = dims[index + 1..].iter().product();
    ComplexMatrix::identity(left).kron(k).kron(&ComplexMatrix::identity(right))
}

pub fn apply(ch: &KrausChannel, rho: &DensityMatrix, on: &OnSubsystem) -> Result<DensityMatrix> {
    let out = match on {
        OnSubsystem::Whole => {
            if rho.dim() != ch.dim() {
                return Err(Error::DimensionMismatch { expected: ch.dim(), got: rho.dim() });
            }
            ch.apply_mat(rho.mat())
        }
        OnSubsystem::Part { dims, index } => {
            let total: usize = dims.iter().product();
            if total != rho.dim() || *index >= dims.len() || dims[*index] != ch.dim() {
                return Err(Error::DimensionMismatch { expected: total, got: rho.dim() });
            }
            let d = rho.dim();
            ch.kraus_ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
                let e = embed(k, dims, *index);
                &acc + &e.matmul(rho.mat()).matmul(&e.adjoint())
            })
        }
    };
    Ok(DensityMatrix::new_unchecked(out.hermitian_part()))
}

/// The same channel on every subsystem.
pub fn apply_all(ch: &KrausChannel, rho: &DensityMatrix, dims: &[usize]) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    for index in 0..dims.len() {
        out = apply(ch, &out, &OnSubsystem::Part { dims: dims.to_vec(), index })?;
    }
    Ok(out)
}

/// Operator basis X_0 = √(2/d) I followed by the off-diagonal pairs (u_jk, v_jk) and the
/// diagonal w_l, normalized tr(X_i X_j) = 2δ_ij.
pub fn operator_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut v = vec![ComplexMatrix::identity(d).scale((2.0 / d as f64).sqrt())];
    v.extend(gell_mann(d));
    v
}

/// Coordinates x_i = tr(ρ X_i), i = 0..d²−1.
pub fn operator_coords(m: &ComplexMatrix) -> Vec<f64> {
    operator_basis(m.rows()).iter().map(|x| m.trace_product(x).re).collect()
}

/// ℰ†(X_i) = Σ_j T_ij X_j, so that x' = T x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub d: usize,
    pub t: Vec<Vec<f64>>,
}

impl TransferMatrix {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.t.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Rows 1..=d²−d (the off-diagonal coordinates).
    pub fn off_diagonal_rows(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.d * self.d - self.d
    }
}

pub fn transfer_matrix(ch: &KrausChannel) -> TransferMatrix {
    let xs = operator_basis(ch.dim());
    let t = xs
        .iter()
        .map(|xi| {
            let h = ch.apply_adjoint(xi);
            xs.iter().map(|xj| 0.5 * h.trace_product(xj).re).collect()
        })
        .collect();
    TransferMatrix { d: ch.dim(), t }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelClassification {
    pub unital: bool,
    pub semiclassical: bool,
    pub incoherent: bool,
    pub strictly_incoherent: bool,
    pub coherence_breaking: bool,
}

fn at_most_one_per_column(k: &ComplexMatrix) -> bool {
    (0..k.cols()).all(|j| (0..k.rows()).filter(|&i| k[(i, j)].norm() > CLASSIFY_TOL).count() <= 1)
}

fn maps_to_diagonal<F: Fn(&ComplexMatrix) -> ComplexMatrix>(f: F, d: usize) -> bool {
    operator_basis(d).iter().all(|x| f(x).is_diagonal(CLASSIFY_TOL))
}

pub fn classify(ch: &KrausChannel) -> ChannelClassification {
    let d = ch.dim();
    let incoherent = ch.kraus_ops.iter().all(at_most_one_per_column);
    let strictly_incoherent = incoherent && ch.kraus_ops.iter().all(|k| at_most_one_per_column(&k.transpose()));
    let unital = ch.apply_mat(&ComplexMatrix::identity(d)).max_abs_diff(&ComplexMatrix::identity(d)) <= CLASSIFY_TOL;
    let semiclassical = maps_to_diagonal(|x| ch.apply_mat(x), d);
    ChannelClassification { unital, semiclassical, incoherent, strictly_incoherent, coherence_breaking: incoherent && semiclassical }
}

fn require_valid(p: BellDiagonalParams) -> Result<()> {
    let lmin = p.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -1e-12 {
        return Err(Error::NotPsd(lmin));
    }
    Ok(())
}

/// Discord of a Bell-diagonal state is frozen under one-sided phase damping iff
/// c2 = −c1c3 with |c1| > |c3|, or c1 = −c2c3 with |c2| > |c3|.
pub fn discord_freezing_condition(p: BellDiagonalParams) -> Result<bool> {
    require_valid(p)?;
    let BellDiagonalParams { c1, c2, c3 } = p;
    let tol = 1e-10;
    Ok(((c2 + c1 * c3).abs() <= tol && c1.abs() > c3.abs()) || ((c1 + c2 * c3).abs() <= tol && c2.abs() > c3.abs()))
}

/// Coherence of the N-qubit Bell-diagonal family is frozen under local bit flips iff
/// c2 = (−1)^{N/2} c1 c3.
pub fn coherence_freezing_condition(p: BellDiagonalParams, n: usize) -> Result<bool> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::ParamOutOfRange(format!("N = {n} must be a positive even number")));
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok((p.c2 - sign * p.c1 * p.c3).abs() <= 1e-10)
}

/// T_k0 = 0 on the off-diagonal rows, and T restricted to those rows is block diagonal
/// with orthogonal 2×2 blocks.
pub fn l1_freezing_condition_general(t: &TransferMatrix) -> bool {
    let tol = 1e-10;
    let n_off = t.d * t.d - t.d;
    for k in 1..=n_off {
        if t.t[k][0].abs() > tol {
            return false;
        }
        let r = (k - 1) / 2;
        for j in 1..t.d * t.d {
            let in_block = j > 2 * r && j <= 2 * r + 2;
            if !in_block && t.t[k][j].abs() > tol {
                return false;
            }
        }
    }
    (0..n_off / 2).all(|r| {
        let (a, b) = (2 * r + 1, 2 * r + 2);
        let m = [[t.t[a][a], t.t[a][b]], [t.t[b][a], t.t[b][b]]];
        let g = |i: usize, j: usize| m[0][i] * m[0][j] + m[1][i] * m[1][j];
        (g(0, 0) - 1.0).abs() <= tol && (g(1, 1) - 1.0).abs() <= tol && g(0, 1).abs() <= tol
    })
}

/// Which family a factorization check samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// States I/d + Σ_k x_k X_k/2 + diagonal part, for off-diagonal indices k with ℰ†(X_k) = qX_k.
    QLaw { indices: Vec<usize> },
    /// States I/d + χ n̂·X/2 along a fixed unit direction, compared with the probe state.
    Direction { n: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub q: Option<f64>,
    pub probe_value: f64,
    pub max_relative_deviation: f64,
    pub samples: usize,
}

/// Groups the off-diagonal basis operators into eigen-operators of ℰ† by eigenvalue.
pub fn q_law_groups(ch: &KrausChannel) -> Vec<(f64, Vec<usize>)> {
    let xs = operator_basis(ch.dim());
    let d = ch.dim();
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for k in 1..=d * d - d {
        let h = ch.apply_adjoint(&xs[k]);
        let q = 0.5 * h.trace_product(&xs[k]).re;
        if (&h - &xs[k].scale(q)).max_abs() > 1e-8 {
            continue;
        }
        match groups.iter_mut().find(|(g, _)| (g - q).abs() <= 1e-10) {
            Some((_, v)) => v.push(k),
            None => groups.push((q, vec![k])),
        }
    }
    groups
}

fn l1(m: &ComplexMatrix) -> f64 {
    let d = m.rows();
    (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm()).sum()
}

/// Builds I/d + ½ Σ x_i X_i, scaled towards I/d when needed to stay positive.
fn state_from_coords(xs: &[ComplexMatrix], coords: &[(usize, f64)], fraction: f64) -> ComplexMatrix {
    let d = xs[0].rows();
    let a = coords.iter().fold(ComplexMatrix::zeros(d, d), |acc, &(i, c)| &acc + &xs[i].scale(0.5 * c));
    let lmin = *eigh(&a).values.last().unwrap();
    let smax = if lmin < 0.0 { (1.0 / d as f64) / -lmin } else { 1.0 };
    &ComplexMatrix::identity(d).scale(1.0 / d as f64) + &a.scale(fraction * smax.min(1.0))
}

pub fn factorization_check(ch: &KrausChannel, family: &FamilyDescriptor, seed: u64) -> Result<FactorizationReport> {
    let d = ch.dim();
    let xs = operator_basis(d);
    let n_off = d * d - d;
    let mut g = rng::rng(seed);
    let samples = 100;
    let mut worst = 0.0f64;
    match family {
        FamilyDescriptor::QLaw { indices } => {
            if indices.is_empty() || indices.iter().any(|&k| k == 0 || k > n_off) {
                return Err(Error::ParamOutOfRange("q-law indices must be off-diagonal basis indices".into()));
            }
            let mut q = None;
            for &k in indices {
                let h = ch.apply_adjoint(&xs[k]);
                let qk = 0.5 * h.trace_product(&xs[k]).re;
                let dev = (&h - &xs[k].scale(qk)).max_abs();
                if dev > 1e-8 || q.is_some_and(|q0: f64| (q0 - qk).abs() > 1e-8) {
                    return Err(Error::NotApplicable(format!("X_{k} is not an eigen-operator of the adjoint channel with a shared eigenvalue")));
                }
                q = Some(qk);
            }
            let q = q.unwrap();
            for _ in 0..samples {
                let mut coords: Vec<(usize, f64)> = indices.iter().map(|&k| (k, rng::normal(&mut g))).collect();
                coords.extend((n_off + 1..d * d).map(|l| (l, rng::normal(&mut g))));
                let rho = state_from_coords(&xs, &coords, 0.05 + 0.9 * rng::uniform(&mut g));
                let before = l1(&rho);
                let after = l1(&ch.apply_mat(&rho));
                let expect = q.abs() * before;
                worst = worst.max((after - expect).abs() / expect.max(1e-12));
            }
            Ok(FactorizationReport { q: Some(q), probe_value: q.abs(), max_relative_deviation: worst, samples })
        }
        FamilyDescriptor::Direction { n } => {
            if n.len() != d * d - 1 {
                return Err(Error::DimensionMismatch { expected: d * d - 1, got: n.len() });
            }
            let norm = n.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n: Vec<f64> = n.iter().map(|v| v / norm).collect();
            let t = transfer_matrix(ch);
            if (1..=n_off).any(|k| t.t[k][0].abs() > 1e-8) {
                return Err(Error::NotApplicable("channel shifts the off-diagonal coordinates".into()));
            }
            let pair_norm: f64 = (0..n_off / 2).map(|r| (n[2 * r].powi(2) + n[2 * r + 1].powi(2)).sqrt()).sum();
            if pair_norm < 1e-12 {
                return Err(Error::NotApplicable("direction has no coherent component".into()));
            }
            let build = |chi: f64| {
                let mut m = ComplexMatrix::identity(d).scale(1.0 / d as f64);
                for (i, v) in n.iter().enumerate() {
                    m = &m + &xs[i + 1].scale(0.5 * chi * v);
                }
                m
            };
            let probe = l1(&ch.apply_mat(&build(1.0 / pair_norm)));
            let unit = build(1.0);
            let a = &unit - &ComplexMatrix::identity(d).scale(1.0 / d as f64);
            let lmin = *eigh(&a).values.last().unwrap();
            let chi_max = if lmin < 0.0 { (1.0 / d as f64) / -lmin } else { 1.0 };
            for _ in 0..samples {
                let chi = chi_max * (0.05 + 0.9 * rng::uniform(&mut g));
                let rho = build(chi);
                let after = l1(&ch.apply_mat(&rho));
                let expect = l1(&rho) * probe;
                worst = worst.max((after - expect).abs() / expect.max(1e-12));
            }
            Ok(FactorizationReport { q: None, probe_value: probe, max_relative_deviation: worst, samples })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CbIndex {
    Finite(usize),
    Unbounded,
}

/// Smallest n with Φⁿ coherence breaking, found by iterating Φ on a spanning set of inputs.
/// The images of Φⁿ form a decreasing chain that is stationary after at most d² steps, so a
/// finite index never exceeds d²; later powers only see geometric decay, never exact zeros.
pub fn coherence_breaking_index(ch: &KrausChannel, cap: usize) -> CbIndex {
    if !classify(ch).incoherent {
        return CbIndex::Unbounded;
    }
    let d = ch.dim();
    let mut images = operator_basis(d);
    for n in 1..=cap.min(d * d) {
        images = images.iter().map(|x| ch.apply_mat(x)).collect();
        if images.iter().all(|x| x.is_diagonal(CLASSIFY_TOL)) {
            return CbIndex::Finite(n);
        }
    }
    CbIndex::Unbounded
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMeasure {
    L1,
    RelEntropy,
}

impl FromStr for PowerMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(PowerMeasure::L1),
            "rel_entropy" => Ok(PowerMeasure::RelEntropy),
            _ => Err(Error::Parse(format!("unknown measure {s:?}; expected l1 or rel_entropy"))),
        }
    }
}

fn measure_value(m: &ComplexMatrix, kind: PowerMeasure) -> f64 {
    let rho = DensityMatrix::new_unchecked(m.hermitian_part());
    let basis = ReferenceBasis::computational(m.rows());
    match kind {
        PowerMeasure::L1 => c_l1(&rho, &basis).map(|r| r.value).unwrap_or(f64::NAN),
        PowerMeasure::RelEntropy => c_rel_entropy(&rho, &basis).map(|r| r.value).unwrap_or(f64::NAN),
    }
}

fn max_value(d: usize, kind: PowerMeasure) -> f64 {
    match kind {
        PowerMeasure::L1 => d as f64 - 1.0,
        PowerMeasure::RelEntropy => (d as f64).log2(),
    }
}

/// ‖U‖²_{1→1} − 1 for l1, max_j H(|U_1j|², …, |U_dj|²) for the relative entropy.
pub fn cohering_power_unitary(u: &ComplexMatrix, kind: PowerMeasure) -> f64 {
    let d = u.rows();
    match kind {
        PowerMeasure::L1 => {
            let n = (0..d).map(|j| (0..d).map(|i| u[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
            n * n - 1.0
        }
        PowerMeasure::RelEntropy => {
            (0..d).map(|j| shannon(&(0..d).map(|i| u[(i, j)].norm_sqr()).collect::<Vec<_>>())).fold(0.0, f64::max)
        }
    }
}

/// max over incoherent inputs of C(ℰ[δ]); the maximum is attained on a basis state.
pub fn cohering_power(ch: &KrausChannel, kind: PowerMeasure) -> Result<f64> {
    let d = ch.dim();
    let numeric = (0..d)
        .map(|k| {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(k, k)] = ONE;
            measure_value(&ch.apply_mat(&e), kind)
        })
        .fold(0.0, f64::max);
    if let Some(u) = ch.as_unitary() {
        let closed = cohering_power_unitary(u, kind);
        if (closed - numeric).abs() > 1e-9 {
            return Err(Error::BoundViolation(format!("unitary cohering power {closed} vs basis-state value {numeric}")));
        }
        return Ok(closed);
    }
    Ok(numeric)
}

const DP_GRID: usize = 32;
const DP_MAX_DIM: usize = 4;

/// C_max − min over maximally coherent pure states (1/√d)Σ e^{iθ_k}|k⟩ of C(ℰ[·]),
/// on a 32-point grid per relative phase with pattern-search refinement.
pub fn decohering_power(ch: &KrausChannel, kind: PowerMeasure) -> Result<MeasureResult> {
    let d = ch.dim();
    if d > DP_MAX_DIM {
        return Err(Error::ParamOutOfRange(format!("decohering-power search supports d ≤ {DP_MAX_DIM}, got {d}")));
    }
    let free = d - 1;
    let eval = |th: &[f64]| {
        let amp: Vec<C64> = std::iter::once(ONE)
            .chain(th.iter().map(|&t| C64::from_polar(1.0, t)))
            .map(|z| z / (d as f64).sqrt())
            .collect();
        measure_value(&ch.apply_mat(&ComplexMatrix::outer(&amp, &amp)), kind)
    };
    let step = 2.0 * std::f64::consts::PI / DP_GRID as f64;
    let total = DP_GRID.pow(free as u32);
    let mut pts: Vec<(f64, Vec<f64>)> = (0..total)
        .map(|mut idx| {
            let th: Vec<f64> = (0..free)
                .map(|_| {
                    let t = (idx % DP_GRID) as f64 * step;
                    idx /= DP_GRID;
                    t
                })
                .collect();
            (eval(&th), th)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = pts[0].clone();
    for (v, th) in pts.into_iter().take(4) {
        let (rv, rx) = pattern_search(&eval, th, &vec![step; free], 300, v);
        if rv < best.0 {
            best = (rv, rx);
        }
    }
    let dp = (max_value(d, kind) - best.0).max(0.0);
    Ok(MeasureResult::numeric(dp, 1e-4).with_witness(Witness::Point(best.1)))
}

/// (1/(d+1))(1 − (1/d) Σ|U_ij|⁴).
pub fn average_cohering_power_unitary(u: &ComplexMatrix) -> Result<f64> {
    let dev = unitarity_defect(u)?;
    if dev > KRAUS_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let d = u.rows() as f64;
    let s: f64 = u.data().iter().map(|z| z.norm_sqr().powi(2)).sum();
    Ok((1.0 - s / d) / (d + 1.0))
}

/// (1/(d(d+1))) Σ_{i, l≠m} |Σ_k (A_k)_li (A_k)*_mi|² for unital channels.
pub fn average_cohering_power_unital(ch: &KrausChannel) -> Result<f64> {
    if !classify(ch).unital {
        return Err(Error::NotApplicable("channel is not unital".into()));
    }
    let d = ch.dim();
    let mut total = 0.0;
    for i in 0..d {
        for l in 0..d {
            for m in 0..d {
                if l != m {
                    let s: C64 = ch.kraus_ops.iter().map(|a| a[(l, i)] * a[(m, i)].conj()).sum();
                    total += s.norm_sqr();
                }
            }
        }
    }
    Ok(total / (d * (d + 1)) as f64)
}

/// Monte-Carlo estimate of ⟨C_l2(Δ̃ℰΔ[ψ])⟩ over Haar pure states: (mean, standard error).
pub fn average_cohering_power_sampled(ch: &KrausChannel, samples: usize, seed: u64) -> (f64, f64) {
    let d = ch.dim();
    let mut g = rng::rng(seed);
    let vals: Vec<f64> = (0..samples)
        .map(|_| {
            let psi = random_pure_with(d, &mut g);
            let p: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm_sqr()).collect();
            let out = ch.apply_mat(&ComplexMatrix::diag(&p));
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        s += out[(i, j)].norm_sqr();
                    }
                }
            }
            s
        })
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Maximal l1 coherence reachable by stochastic strictly incoherent operations, and the
/// optimal success probability.
pub fn ssio_max_coherence(rho: &DensityMatrix, basis: &ReferenceBasis) -> Result<(f64, f64)> {
    let m = crate::qcore::in_basis(rho, basis)?;
    let m = m.mat();
    let d = m.rows();
    let diag: Vec<f64> = m.real_diagonal();
    if let Some(i) = diag.iter().position(|&p| p <= 1e-10) {
        return Err(Error::SingularDiagonal(i));
    }
    let mut comp = vec![usize::MAX; d];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for s in 0..d {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..d {
                if comp[j] == usize::MAX && m[(i, j)].norm() > 1e-12 {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    let per_block: Vec<(f64, f64, f64)> = blocks
        .iter()
        .map(|b| {
            let weight: f64 = b.iter().map(|&i| diag[i]).sum();
            let k = b.len();
            let mat = ComplexMatrix::from_fn(k, k, |a, c| {
                C64::new(m[(b[a], b[c])].norm() / (diag[b[a]] * diag[b[c]]).sqrt(), 0.0)
            });
            let e = eigh(&mat);
            let phi: Vec<f64> = e.vectors.col(0).iter().map(|z| z.norm()).collect();
            let p = (0..k).map(|a| (diag[b[a]] / weight) / (phi[a] * phi[a]).max(1e-300)).fold(f64::INFINITY, f64::min);
            (e.values[0], weight, p.min(1.0))
        })
        .collect();
    let lmax = per_block.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
    let pmax: f64 = per_block.iter().filter(|b| (b.0 - lmax).abs() <= 1e-9).map(|b| b.1 * b.2).sum();
    Ok(((lmax - 1.0).max(0.0), pmax))
}

fn thermal_populations(h: &[f64], t: f64) -> Vec<f64> {
    let e0 = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = h.iter().map(|&e| (-(e - e0) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn mean_energy(h: &[f64], p: &[f64]) -> f64 {
    h.iter().zip(p).map(|(e, q)| e * q).sum()
}

const T_CEILING: f64 = 1e6;

/// Upper bound S(ρ^{T'}) − S(ρ^T) on the relative entropy of coherence created from a thermal
/// state with energy budget ΔE, T' fixed by the budget. Entropies in bits.
pub fn energy_bounded_max_coherence(h: &[f64], t: f64, de: f64) -> Result<f64> {
    if h.is_empty() || !(t > 0.0) || !(de >= 0.0) {
        return Err(Error::ParamOutOfRange(format!("need a nonempty spectrum, T > 0 and ΔE ≥ 0 (T = {t}, ΔE = {de})")));
    }
    let p0 = thermal_populations(h, t);
    let e0 = mean_energy(h, &p0);
    let s0 = shannon(&p0);
    let target = e0 + de;
    let e_inf = h.iter().sum::<f64>() / h.len() as f64;
    if target > e_inf + 1e-12 {
        return Err(Error::NoSolution(format!("ΔE = {de} exceeds the available gap {}", e_inf - e0)));
    }
    if de == 0.0 {
        return Ok(0.0);
    }
    if target >= e_inf - 1e-12 {
        return Ok((h.len() as f64).log2() - s0);
    }
    let (mut lo, mut hi) = (t, T_CEILING);
    if mean_energy(h, &thermal_populations(h, hi)) < target {
        return Ok(shannon(&thermal_populations(h, hi)) - s0);
    }
    for _ in 0..200 {
        // geometric steps while the bracket spans decades
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mean_energy(h, &thermal_populations(h, mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(shannon(&thermal_populations(h, 0.5 * (lo + hi))) - s0)
}

/// von Neumann entropy of the thermal state, for callers that need the endpoint values.
pub fn thermal_entropy(h: &[f64], t: f64) -> f64 {
    let p = thermal_populations(h, t);
    von_neumann_entropy(&DensityMatrix::new_unchecked(ComplexMatrix::diag(&p)))
}
