//! Bell states seen by a uniformly accelerated observer in the single-mode approximation:
//! fermionic and bosonic Unruh degradation and curves of correlation versus acceleration.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{c_l1, c_rel_entropy};
use crate::discord::{negativity, trace_discord};
use crate::error::{Error, Result};
use crate::qcore::{eigvals, shannon, ComplexMatrix, DensityMatrix, ReferenceBasis};

/// Mode frequency ω and acceleration a; only ω/a enters. a = 0 is inertial, a = ∞ is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnruhParams {
    pub omega: f64,
    pub acceleration: f64,
}

impl UnruhParams {
    pub fn new(omega: f64, acceleration: f64) -> Result<Self> {
        if !(omega > 0.0) || !(acceleration >= 0.0) {
            return Err(Error::ParamOutOfRange(format!("need ω > 0 and a ≥ 0, got ω = {omega}, a = {acceleration}")));
        }
        Ok(UnruhParams { omega, acceleration })
    }

    /// e^{−2πω/a}, the Boltzmann factor at the Unruh temperature.
    fn boltzmann(&self) -> f64 {
        if self.acceleration == 0.0 {
            0.0
        } else {
            (-2.0 * PI * self.omega / self.acceleration).exp()
        }
    }

    /// cos r = (e^{−2πω/a} + 1)^{−1/2}, r ∈ [0, π/4].
    pub fn fermionic_r(&self) -> f64 {
        (1.0 / (self.boltzmann() + 1.0).sqrt()).acos()
    }

    /// tanh r = e^{−πω/a}.
    pub fn bosonic_r(&self) -> f64 {
        self.boltzmann().sqrt().atanh()
    }

    pub fn r(&self, stats: Statistics) -> f64 {
        match stats {
            Statistics::Fermionic => self.fermionic_r(),
            Statistics::Bosonic => self.bosonic_r(),
        }
    }

    /// The acceleration giving mixing angle r at frequency ω.
    pub fn from_r(stats: Statistics, omega: f64, r: f64) -> Result<Self> {
        let b = match stats {
            Statistics::Fermionic => {
                if !(0.0..=PI / 4.0 + 1e-15).contains(&r) {
                    return Err(Error::ParamOutOfRange(format!("fermionic r = {r} outside [0, π/4]")));
                }
                (1.0 / r.cos().powi(2) - 1.0).min(1.0)
            }
            Statistics::Bosonic => {
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(Error::ParamOutOfRange(format!("bosonic r = {r} must be finite and ≥ 0")));
                }
                r.tanh().powi(2)
            }
        };
        let a = if b <= 0.0 {
            0.0
        } else if b >= 1.0 {
            f64::INFINITY
        } else {
            -2.0 * PI * omega / b.ln()
        };
        UnruhParams::new(omega, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

impl FromStr for Statistics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fermionic" => Ok(Statistics::Fermionic),
            "bosonic" => Ok(Statistics::Bosonic),
            _ => Err(Error::Parse(format!("unknown statistics {s:?}; expected fermionic or bosonic"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub n_max: usize,
    pub tail_bound: f64,
}

impl TruncationConfig {
    pub const DEFAULT_TAIL: f64 = 1e-8;

    pub fn new(n_max: usize, tail_bound: f64) -> Result<Self> {
        if n_max < 4 || !(tail_bound > 0.0) {
            return Err(Error::ParamOutOfRange(format!("need n_max ≥ 4 and a positive tail bound, got {n_max}, {tail_bound}")));
        }
        Ok(TruncationConfig { n_max, tail_bound })
    }

    /// Smallest n_max ≥ 4 whose renormalization deficit at r stays within the tail bound.
    pub fn for_r(r: f64, tail_bound: f64) -> Result<Self> {
        TruncationConfig::new(4, tail_bound)?;
        let x = r.tanh().powi(2);
        if x >= 1.0 {
            return Err(Error::TruncationInsufficient(1.0));
        }
        let mut n = 4;
        while truncation_deficit(r, n) > tail_bound {
            n = if n < 64 { n + 1 } else { n + n / 8 };
            if n > 50_000_000 {
                return Err(Error::TruncationInsufficient(truncation_deficit(r, n)));
            }
        }
        // the geometric steps may overshoot; walk back to the minimal n
        while n > 4 && truncation_deficit(r, n - 1) <= tail_bound {
            n -= 1;
        }
        TruncationConfig::new(n, tail_bound)
    }
}

/// Trace lost by keeping vacuum terms n ≤ n_max: ½[x^{N+1} + x^{N+1}((N+2) − (N+1)x)], x = tanh²r.
pub fn truncation_deficit(r: f64, n_max: usize) -> f64 {
    let x = r.tanh().powi(2);
    let n = n_max as f64;
    let head = x.powf(n + 1.0);
    0.5 * (head + head * ((n + 2.0) - (n + 1.0) * x))
}

/// Alice's qubit with Rob's region-I mode after tracing region II, starting from |Φ+⟩:
/// ½[cos²r|00⟩⟨00| + cos r(|00⟩⟨11| + h.c.) + sin²r|01⟩⟨01| + |11⟩⟨11|].
pub fn fermionic_degraded_bell(up: &UnruhParams) -> Result<DensityMatrix> {
    let r = up.fermionic_r();
    let (c, s) = (r.cos(), r.sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(c * c / 2.0, 0.0);
    m[(0, 3)] = C64::new(c / 2.0, 0.0);
    m[(3, 0)] = C64::new(c / 2.0, 0.0);
    m[(1, 1)] = C64::new(s * s / 2.0, 0.0);
    m[(3, 3)] = C64::new(0.5, 0.0);
    DensityMatrix::new(m)
}

/// Bosonic degraded Bell state in its block structure. Before renormalization,
/// ρ = ½ Σ_{n≤N} [a_n|0,n⟩⟨0,n| + b_n(|0,n⟩⟨1,n+1| + h.c.) + c_n|1,n+1⟩⟨1,n+1|]
/// with a_n = t^{2n}/ch², b_n = √(n+1) t^{2n}/ch³, c_n = (n+1) t^{2n}/ch⁴, t = tanh r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BosonicDegradedState {
    pub r: f64,
    pub n_max: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    norm: f64,
}

impl BosonicDegradedState {
    pub fn new(r: f64, tc: &TruncationConfig) -> Result<Self> {
        let deficit = truncation_deficit(r, tc.n_max);
        if deficit > tc.tail_bound {
            return Err(Error::TruncationInsufficient(deficit));
        }
        let x = r.tanh().powi(2);
        let ch2 = r.cosh().powi(2);
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        let mut xn = 1.0;
        for n in 0..=tc.n_max {
            let k = (n + 1) as f64;
            a.push(xn / ch2);
            b.push(k.sqrt() * xn / (ch2 * r.cosh()));
            c.push(k * xn / (ch2 * ch2));
            xn *= x;
        }
        let norm = 0.5 * (a.iter().sum::<f64>() + c.iter().sum::<f64>());
        Ok(BosonicDegradedState { r, n_max: tc.n_max, a, b, c, norm })
    }

    /// Rob's truncated Fock dimension, n_max + 2.
    pub fn rob_dim(&self) -> usize {
        self.n_max + 2
    }

    pub fn deficit(&self) -> f64 {
        1.0 - self.norm
    }

    pub fn to_density(&self) -> DensityMatrix {
        let db = self.rob_dim();
        let mut m = ComplexMatrix::zeros(2 * db, 2 * db);
        let s = 0.5 / self.norm;
        for n in 0..=self.n_max {
            let (i, j) = (n, db + n + 1);
            m[(i, i)] = C64::new(s * self.a[n], 0.0);
            m[(i, j)] = C64::new(s * self.b[n], 0.0);
            m[(j, i)] = C64::new(s * self.b[n], 0.0);
            m[(j, j)] = C64::new(s * self.c[n], 0.0);
        }
        DensityMatrix::new_unchecked(m)
    }

    pub fn c_l1(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.norm
    }

    /// Each {|0,n⟩, |1,n+1⟩} block is rank one (b_n² = a_n c_n).
    pub fn c_rel_entropy(&self) -> f64 {
        let s = 0.5 / self.norm;
        let diag: Vec<f64> = self.a.iter().chain(&self.c).map(|v| v * s).collect();
        let spec: Vec<f64> = self.a.iter().zip(&self.c).map(|(a, c)| (a + c) * s).collect();
        shannon(&diag) - shannon(&spec)
    }

    /// The partial transpose splits into |0,0⟩ and 2×2 blocks {|0,n+1⟩, |1,n⟩} coupled by b_n.
    pub fn negativity(&self) -> f64 {
        let s = 0.5 / self.norm;
        let mut neg = 0.0;
        for n in 0..=self.n_max {
            let p = self.a.get(n + 1).copied().unwrap_or(0.0) * s;
            let q = if n == 0 { 0.0 } else { self.c[n - 1] * s };
            let off = self.b[n] * s;
            let low = 0.5 * ((p + q) - ((p - q).powi(2) + 4.0 * off * off).sqrt());
            if low < 0.0 {
                neg -= low;
            }
        }
        neg
    }
}

pub fn bosonic_degraded_bell(up: &UnruhParams, tc: &TruncationConfig) -> Result<DensityMatrix> {
    Ok(BosonicDegradedState::new(up.bosonic_r(), tc)?.to_density())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMeasure {
    Negativity,
    CL1,
    CRelEntropy,
    TraceDiscord,
}

impl fmt::Display for CurveMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveMeasure::Negativity => "negativity",
            CurveMeasure::CL1 => "c_l1",
            CurveMeasure::CRelEntropy => "c_rel_entropy",
            CurveMeasure::TraceDiscord => "trace_discord",
        })
    }
}

impl FromStr for CurveMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negativity" => Ok(CurveMeasure::Negativity),
            "c_l1" => Ok(CurveMeasure::CL1),
            "c_rel_entropy" => Ok(CurveMeasure::CRelEntropy),
            "trace_discord" => Ok(CurveMeasure::TraceDiscord),
            _ => Err(Error::Parse(format!("unknown curve measure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub acceleration: f64,
    pub r: f64,
    pub measure: CurveMeasure,
    pub value: f64,
    /// Fock cutoff used for bosonic points.
    pub n_max: Option<usize>,
}

fn fermionic_value(up: &UnruhParams, measure: CurveMeasure) -> Result<f64> {
    let rho = fermionic_degraded_bell(up)?;
    let basis = ReferenceBasis::computational(4);
    Ok(match measure {
        CurveMeasure::Negativity => negativity(&rho, (2, 2))?,
        CurveMeasure::CL1 => c_l1(&rho, &basis)?.value,
        CurveMeasure::CRelEntropy => c_rel_entropy(&rho, &basis)?.value,
        CurveMeasure::TraceDiscord => trace_discord(&rho)?.value,
    })
}

/// One row per acceleration, in grid order. Bosonic points pick the smallest cutoff honoring
/// the tail bound.
pub fn degradation_curve(
    stats: Statistics,
    measure: CurveMeasure,
    omega: f64,
    accelerations: &[f64],
    tail_bound: f64,
) -> Result<Vec<CurveRow>> {
    if accelerations.is_empty() {
        return Err(Error::ParamOutOfRange("empty acceleration grid".into()));
    }
    if stats == Statistics::Bosonic && measure == CurveMeasure::TraceDiscord {
        return Err(Error::NotApplicable("trace discord is not evaluated on truncated bosonic modes".into()));
    }
    accelerations
        .par_iter()
        .map(|&a| {
            let up = UnruhParams::new(omega, a)?;
            let r = up.r(stats);
            match stats {
                Statistics::Fermionic => {
                    Ok(CurveRow { acceleration: a, r, measure, value: fermionic_value(&up, measure)?, n_max: None })
                }
                Statistics::Bosonic => {
                    let tc = TruncationConfig::for_r(r, tail_bound)?;
                    let st = BosonicDegradedState::new(r, &tc)?;
                    let value = match measure {
                        CurveMeasure::Negativity => st.negativity(),
                        CurveMeasure::CL1 => st.c_l1(),
                        CurveMeasure::CRelEntropy => st.c_rel_entropy(),
                        CurveMeasure::TraceDiscord => unreachable!(),
                    };
                    Ok(CurveRow { acceleration: a, r, measure, value, n_max: Some(tc.n_max) })
                }
            }
        })
        .collect()
}

/// Eigenvalues of a Hermitian matrix, split along the connected components of its nonzero
/// pattern; used to cross-check the structured bosonic formulas.
pub fn block_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let mut seen = vec![false; d];
    let mut out = Vec::with_capacity(d);
    for s in 0..d {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..d {
                if !seen[j] && m[(i, j)].norm() > 0.0 {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        let sub = ComplexMatrix::from_fn(comp.len(), comp.len(), |a, b| m[(comp[a], comp[b])]);
        out.extend(eigvals(&sub));
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::negativity;
    use crate::qcore::{partial_transpose_b, von_neumann_entropy};
    use crate::states::phi_plus;

    const OMEGA: f64 = 1.0;

    #[test]
    fn inertial_limit_is_bell() {
        let up = UnruhParams::new(OMEGA, 0.0).unwrap();
        let bell = phi_plus().density();
        let f = fermionic_degraded_bell(&up).unwrap();
        assert!(f.mat().max_abs_diff(bell.mat()) < 1e-10);
        // a tiny acceleration should already be indistinguishable
        let up = UnruhParams::new(OMEGA, 1e-3).unwrap();
        assert!(fermionic_degraded_bell(&up).unwrap().mat().max_abs_diff(bell.mat()) < 1e-10);
        let tc = TruncationConfig::new(4, 1e-8).unwrap();
        let b = BosonicDegradedState::new(up.bosonic_r(), &tc).unwrap();
        assert!((b.negativity() - 0.5).abs() < 1e-10);
        assert!((b.c_l1() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fermionic_infinite_acceleration() {
        let up = UnruhParams::new(OMEGA, f64::INFINITY).unwrap();
        let r = up.fermionic_r();
        assert!((r.cos().powi(2) - 0.5).abs() < 1e-14);
        let rho = fermionic_degraded_bell(&up).unwrap();
        assert!((negativity(&rho, (2, 2)).unwrap() - 0.25).abs() < 1e-10);
        let v = fermionic_value(&up, CurveMeasure::CL1).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn r_roundtrip() {
        for stats in [Statistics::Fermionic, Statistics::Bosonic] {
            for r in [0.1, 0.3, 0.6] {
                let up = UnruhParams::from_r(stats, 2.0, r).unwrap();
                assert!((up.r(stats) - r).abs() < 1e-12, "{stats:?} {r}");
            }
        }
        assert!(UnruhParams::from_r(Statistics::Fermionic, 1.0, 1.0).is_err());
        assert!(UnruhParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn curves_monotone() {
        let grid: Vec<f64> = (0..64).map(|k| 0.05 * k as f64 * (1.0 + 0.1 * k as f64)).collect();
        for stats in [Statistics::Fermionic, Statistics::Bosonic] {
            for m in [CurveMeasure::Negativity, CurveMeasure::CL1, CurveMeasure::CRelEntropy] {
                let rows = degradation_curve(stats, m, OMEGA, &grid, 1e-8).unwrap();
                assert_eq!(rows.len(), 64);
                for w in rows.windows(2) {
                    assert!(w[1].value <= w[0].value + 1e-12, "{stats:?} {m} at a = {}", w[1].acceleration);
                }
            }
        }
    }

    #[test]
    fn bosonic_entanglement_nearly_lost_at_large_r() {
        let tc = TruncationConfig::for_r(2.0, 1e-8).unwrap();
        let st = BosonicDegradedState::new(2.0, &tc).unwrap();
        assert!(st.deficit() <= 1e-8);
        assert!(st.negativity() < 0.05);
        assert!(st.negativity() > 0.0);
    }

    #[test]
    fn cutoff_too_small_is_reported() {
        let tc = TruncationConfig::new(20, 1e-8).unwrap();
        match BosonicDegradedState::new(1.0, &tc) {
            Err(Error::TruncationInsufficient(w)) => assert!(w > 1e-8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn for_r_is_minimal() {
        for r in [0.2, 1.0, 1.5] {
            let tc = TruncationConfig::for_r(r, 1e-8).unwrap();
            assert!(truncation_deficit(r, tc.n_max) <= 1e-8);
            if tc.n_max > 4 {
                assert!(truncation_deficit(r, tc.n_max - 1) > 1e-8);
            }
        }
    }

    #[test]
    fn deficit_formula_matches_weights() {
        let r = 0.7;
        let tc = TruncationConfig::new(12, 1.0).unwrap();
        let st = BosonicDegradedState::new(r, &tc).unwrap();
        assert!((st.deficit() - truncation_deficit(r, 12)).abs() < 1e-13);
    }

    #[test]
    fn structured_matches_dense() {
        let tc = TruncationConfig::new(10, 1.0).unwrap();
        for r in [0.2, 0.5, 0.9] {
            let st = BosonicDegradedState::new(r, &tc).unwrap();
            let rho = st.to_density();
            assert!((rho.mat().trace().re - 1.0).abs() < 1e-12);
            let dims = (2, st.rob_dim());
            let neg = negativity(&rho, dims).unwrap();
            assert!((neg - st.negativity()).abs() < 1e-10, "r = {r}: {neg} vs {}", st.negativity());
            let basis = ReferenceBasis::computational(rho.dim());
            assert!((c_l1(&rho, &basis).unwrap().value - st.c_l1()).abs() < 1e-10);
            assert!((c_rel_entropy(&rho, &basis).unwrap().value - st.c_rel_entropy()).abs() < 1e-9);
            let ev = block_eigenvalues(rho.mat());
            let s: f64 = ev.iter().filter(|&&v| v > 1e-15).map(|&v| -v * v.log2()).sum();
            assert!((s - von_neumann_entropy(&rho)).abs() < 1e-9);
            let pt_min = block_eigenvalues(&partial_transpose_b(rho.mat(), dims)).last().copied().unwrap();
            assert!(pt_min < 0.0);
        }
    }

    #[test]
    fn bosonic_trace_discord_not_applicable() {
        let e = degradation_curve(Statistics::Bosonic, CurveMeasure::TraceDiscord, OMEGA, &[1.0], 1e-8);
        assert!(matches!(e, Err(Error::NotApplicable(_))));
        let rows = degradation_curve(Statistics::Fermionic, CurveMeasure::TraceDiscord, OMEGA, &[0.0, 1.0], 1e-8).unwrap();
        assert!((rows[0].value - 1.0).abs() < 1e-6 || rows[0].value > rows[1].value);
        assert!(degradation_curve(Statistics::Fermionic, CurveMeasure::CL1, OMEGA, &[], 1e-8).is_err());
    }

    #[test]
    fn parse_names() {
        for m in ["negativity", "c_l1", "c_rel_entropy", "trace_discord"] {
            assert_eq!(m.parse::<CurveMeasure>().unwrap().to_string(), m);
        }
        assert!("nope".parse::<CurveMeasure>().is_err());
        assert_eq!("bosonic".parse::<Statistics>().unwrap(), Statistics::Bosonic);
    }
}
