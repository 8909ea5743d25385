//! Measure identifiers accepted by `--measure`, with the state shapes each one accepts.

use qcohere::coherence;
use qcohere::measure::MeasureResult;
use qcohere::discord::{self, Side};
use qcohere::error::{Error, Result};
use qcohere::min_measures;
use qcohere::qcore::{in_basis, split_dims, DensityMatrix, ReferenceBasis};
use qcohere::sweep::MeasurementSweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Any,
    Qubit,
    TwoQubit,
    /// Qubit ⊗ n-level, with the qubit measured.
    QubitA,
    /// Any dA ⊗ dB split, from `--dim-a` or the square default.
    Bipartite,
}

impl Shape {
    fn check(self, d: usize, dim_a: Option<usize>) -> std::result::Result<(), String> {
        let ok = match self {
            Shape::Any => true,
            Shape::Qubit => d == 2,
            Shape::TwoQubit => d == 4,
            Shape::QubitA => d >= 4 && d % 2 == 0 && dim_a.is_none_or(|a| a == 2),
            Shape::Bipartite => split_dims(d, dim_a).is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("needs {}, got dimension {d}", self.describe()))
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Shape::Any => "any dimension",
            Shape::Qubit => "a qubit",
            Shape::TwoQubit => "two qubits",
            Shape::QubitA => "a qubit ⊗ n-level state",
            Shape::Bipartite => "a bipartite state",
        }
    }
}

pub struct Ctx {
    pub basis: ReferenceBasis,
    pub dims: Option<(usize, usize)>,
    pub alpha: f64,
    pub sweep: MeasurementSweep,
}

type Run = fn(&DensityMatrix, &Ctx) -> Result<MeasureResult>;

pub struct Entry {
    pub name: &'static str,
    pub shape: Shape,
    /// Whether the result depends on the reference basis.
    pub basis: bool,
    run: Run,
}

fn dims(c: &Ctx) -> (usize, usize) {
    c.dims.expect("bipartite split checked before dispatch")
}

fn value(v: Result<f64>) -> Result<MeasureResult> {
    v.map(MeasureResult::analytic)
}

macro_rules! entry {
    ($name:literal, $shape:ident, $basis:literal, $run:expr) => {
        Entry { name: $name, shape: Shape::$shape, basis: $basis, run: $run }
    };
}

pub static REGISTRY: &[Entry] = &[
    entry!("c_l1", Any, true, |r, c| coherence::c_l1(r, &c.basis)),
    entry!("c_rel_entropy", Any, true, |r, c| coherence::c_rel_entropy(r, &c.basis)),
    entry!("c_l2", Any, true, |r, c| coherence::c_l2(r, &c.basis)),
    entry!("c_trace", Any, true, |r, c| coherence::c_trace(r, &c.basis)),
    entry!("c_trace_modified", Any, true, |r, c| coherence::c_trace_modified(r, &c.basis)),
    entry!("robustness", Any, true, |r, c| coherence::robustness(r, &c.basis)),
    entry!("coherence_weight", Any, true, |r, c| coherence::coherence_weight(r, &c.basis)),
    entry!("geometric_coherence", Any, true, |r, c| coherence::geometric_coherence(r, &c.basis)),
    entry!("tsallis", Any, true, |r, c| coherence::tsallis_coherence(r, &c.basis, c.alpha)),
    entry!("c_max_rel_entropy", Any, true, |r, c| coherence::c_max_relative_entropy(r, &c.basis)),
    entry!("c_sk", Any, true, |r, c| coherence::c_sk(r, &c.basis)),
    entry!("coherence_of_formation", Qubit, true, |r, c| coherence::coherence_of_formation_qubit(&in_basis(r, &c.basis)?)),
    entry!("correlated_coherence", Bipartite, false, |r, c| value(coherence::correlated_coherence(r, dims(c)))),
    entry!("negativity", Bipartite, false, |r, c| value(discord::negativity(r, dims(c)))),
    entry!("entropic_discord", TwoQubit, false, |r, c| discord::entropic_discord_2q(r, Side::A, &c.sweep)),
    entry!("entropic_discord_b", TwoQubit, false, |r, c| discord::entropic_discord_2q(r, Side::B, &c.sweep)),
    entry!("hs_discord", QubitA, false, |r, _| discord::hs_discord(r)),
    entry!("trace_discord", QubitA, false, |r, _| discord::trace_discord(r)),
    entry!("bures_discord", QubitA, false, |r, _| discord::bures_discord(r)),
    entry!("hellinger_discord", QubitA, false, |r, _| discord::hellinger_discord(r)),
    entry!("lqu", QubitA, false, |r, _| discord::lqu(r)),
    entry!("q_a", Bipartite, false, |r, c| discord::q_a(r, dims(c))),
    entry!("one_way_deficit", QubitA, false, |r, c| discord::one_way_deficit(r, &c.sweep)),
    entry!("zero_way_deficit", TwoQubit, false, |r, c| discord::zero_way_deficit(r, &c.sweep)),
    entry!("negativity_of_quantumness", QubitA, false, |r, _| discord::negativity_of_quantumness(r, Side::A)),
    entry!("hs_min", QubitA, false, |r, _| min_measures::hs_min(r)),
    entry!("trace_min", QubitA, false, |r, _| min_measures::trace_min(r)),
    entry!("bures_min", QubitA, false, |r, _| min_measures::bures_min(r)),
    entry!("rel_entropy_min", QubitA, false, |r, c| min_measures::rel_entropy_min(r, &c.sweep)),
    entry!("skew_min", QubitA, false, |r, _| min_measures::skew_min(r)),
    entry!("uin", QubitA, false, |r, _| min_measures::uin(r)),
    entry!("symmetric_hs_min", TwoQubit, false, |r, c| min_measures::symmetric_hs_min(r, &c.sweep)),
];

pub fn lookup(name: &str) -> Result<&'static Entry> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Parse(format!("unknown measure {name:?}; run `qcohere measures` for the list")))
}

impl Entry {
    /// Checks the state shape and basis use, then builds the evaluation context.
    pub fn prepare(
        &self,
        d: usize,
        dim_a: Option<usize>,
        basis: Option<ReferenceBasis>,
        alpha: f64,
    ) -> Result<Ctx> {
        self.shape.check(d, dim_a).map_err(|m| Error::NotApplicable(format!("{}: {m}", self.name)))?;
        if basis.is_some() && !self.basis {
            return Err(Error::NotApplicable(format!("{} does not take a reference basis", self.name)));
        }
        let basis = basis.unwrap_or_else(|| ReferenceBasis::computational(d));
        if basis.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: basis.dim() });
        }
        let dims = match self.shape {
            Shape::Bipartite => Some(split_dims(d, dim_a)?),
            Shape::QubitA | Shape::TwoQubit => Some((2, d / 2)),
            _ => None,
        };
        Ok(Ctx { basis, dims, alpha, sweep: MeasurementSweep::default() })
    }

    pub fn run(&self, rho: &DensityMatrix, ctx: &Ctx) -> Result<MeasureResult> {
        (self.run)(rho, ctx)
    }
}
