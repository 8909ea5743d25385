//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails.

use std::f64::consts::PI;
use std::panic;
use std::time::Instant;

use num_complex::Complex64 as C64;

use qcohere::channels::{
    apply, apply_all, average_cohering_power_unital, average_cohering_power_unitary, cohering_power, cohering_power_unitary,
    coherence_freezing_condition, discord_freezing_condition, factorization_check, q_law_groups, standard_channel, ChannelKind,
    FamilyDescriptor, KrausChannel, OnSubsystem, PowerMeasure,
};
use qcohere::coherence::{
    c_l1, c_l2, c_max_relative_entropy, c_rel_entropy, c_sk, c_trace, c_trace_modified, c_trace_pure, coherence_of_formation_qubit,
    coherence_weight, geometric_coherence, robustness, robustness_numeric, tsallis_coherence,
};
use qcohere::discord::{
    entropic_discord_2q, hellinger_discord, hs_discord, hs_discord_sweep, lqu, q_a_isotropic, q_a_werner, skew_sum, trace_discord,
    trace_discord_sweep, trace_discord_x_state, Side,
};
use qcohere::error::Error;
use qcohere::measure::MeasureResult;
use qcohere::optim::project_simplex;
use qcohere::protocols::{
    coherence_mixedness, dqc1_coherence_consumption, grover_coherence, grover_state, grover_success, haar_average_coherence,
    mub_complementarity, rho_epsilon, standard_mubs, Dqc1Instance, GroverCoherence, GroverInstance, HaarKind,
};
use qcohere::qcore::{h2, pauli, trace_norm, ComplexMatrix, DensityMatrix, ReferenceBasis};
use qcohere::relativistic::{degradation_curve, BosonicDegradedState, CurveMeasure, Statistics, TruncationConfig};
use qcohere::rng::{dirichlet, normal, rng, uniform, QRng};
use qcohere::states::{
    bell_diagonal, isotropic, maximally_coherent, mcms, random_bell_diagonal_params, random_density_with, random_pure_with,
    random_unitary_with, random_x_state_params, werner, x_state, BellDiagonalParams,
};
use qcohere::sweep::{pattern_search, MeasurementSweep};

type Outcome = Result<(bool, String), Error>;

fn comp(d: usize) -> ReferenceBasis {
    ReferenceBasis::computational(d)
}

/// Tracks the worst absolute error against a tolerance.
struct Worst {
    err: f64,
    tol: f64,
}

impl Worst {
    fn new(tol: f64) -> Self {
        Worst { err: 0.0, tol }
    }
    fn see(&mut self, a: f64, b: f64) {
        let e = (a - b).abs();
        // NaN must fail the check
        if e.is_nan() || e > self.err {
            self.err = if e.is_nan() { f64::INFINITY } else { e };
        }
    }
    fn ok(&self) -> bool {
        self.err <= self.tol
    }
    fn show(&self) -> String {
        format!("max err {:.2e} (tol {:.0e})", self.err, self.tol)
    }
}

fn c1_bell_diagonal_trace_discord() -> Outcome {
    let mut g = rng(101);
    let sweep = MeasurementSweep::default();
    let mut w = Worst::new(1e-5);
    for _ in 0..200 {
        let p = random_bell_diagonal_params(&mut g);
        let rho = bell_diagonal(p)?;
        let analytic = trace_discord(&rho)?.value;
        let mut c = p.as_array().map(f64::abs);
        c.sort_by(f64::total_cmp);
        w.see(analytic, c[1]);
        w.see(analytic, trace_discord_sweep(&rho, &sweep)?.value);
    }
    Ok((w.ok(), format!("200 triples, {}", w.show())))
}

fn c2_hs_discord() -> Outcome {
    let mut g = rng(102);
    let sweep = MeasurementSweep::default();
    let mut w = Worst::new(1e-6);
    for k in 0..200 {
        let rho = random_density_with(4, 1 + k % 4, &mut g);
        w.see(hs_discord(&rho)?.value, hs_discord_sweep(&rho, &sweep)?.value);
    }
    let mut wz = Worst::new(1e-12);
    for i in 0..=4 {
        let x = 0.25 * i as f64;
        let d = 2.0;
        let closed = (d * x - 1.0).powi(2) / (d * (d - 1.0) * (d + 1.0).powi(2));
        wz.see(hs_discord(&werner(x, 2)?)?.value, closed);
    }
    Ok((w.ok() && wz.ok(), format!("sweep {}; Werner {}", w.show(), wz.show())))
}

fn c3_x_state_trace_discord() -> Outcome {
    let mut g = rng(103);
    let sweep = MeasurementSweep::default();
    let mut w = Worst::new(1e-5);
    for _ in 0..100 {
        let rho = x_state(&random_x_state_params(&mut g))?;
        let closed = trace_discord_x_state(&rho)?.ok_or(Error::NotApplicable("X-state not recognized".into()))?;
        w.see(closed, trace_discord_sweep(&rho, &sweep)?.value);
    }
    Ok((w.ok(), format!("100 X-states, {}", w.show())))
}

fn c4_lqu_hellinger() -> Outcome {
    let mut g = rng(104);
    let mut w = Worst::new(1e-9);
    for k in 0..200 {
        let n = 2 + k % 2;
        let rho = random_density_with(2 * n, 1 + k % (2 * n), &mut g);
        w.see(lqu(&rho)?.value, 2.0 * hellinger_discord(&rho)?.value);
    }
    // Q_A of these families does not depend on the local basis, so any unitary evaluates it
    let mut wc = Worst::new(1e-10);
    for d in [2, 3] {
        let us = [ComplexMatrix::identity(d), random_unitary_with(d, &mut g)];
        for x in [-1.0, -0.5, 0.0, 0.3, 0.8, 1.0] {
            for u in &us {
                wc.see(skew_sum(&werner(x, d)?, (d, d), u)?, q_a_werner(x, d));
            }
        }
        for f in [0.0, 0.2, 0.5, 0.9, 1.0] {
            for u in &us {
                wc.see(skew_sum(&isotropic(f, d)?, (d, d), u)?, q_a_isotropic(f, d));
            }
        }
    }
    Ok((w.ok() && wc.ok(), format!("duality {}; closed forms {}", w.show(), wc.show())))
}

fn c5_robustness() -> Outcome {
    let mut g = rng(105);
    let mut w = Worst::new(1e-4);
    for k in 0..100 {
        let q = random_density_with(2, 1 + k % 2, &mut g);
        w.see(robustness_numeric(&q, &comp(2))?.value, c_l1(&q, &comp(2))?.value);
        let d = 2 + k % 3;
        let psi = random_pure_with(d, &mut g).density();
        w.see(robustness_numeric(&psi, &comp(d))?.value, c_l1(&psi, &comp(d))?.value);
        let x = x_state(&random_x_state_params(&mut g))?;
        w.see(robustness_numeric(&x, &comp(4))?.value, c_l1(&x, &comp(4))?.value);
    }
    let mut worst_slack = f64::INFINITY;
    for k in 0..1000 {
        let d = 2 + k % 3;
        let rho = random_density_with(d, 1 + (k / 3) % d, &mut g);
        let l1 = c_l1(&rho, &comp(d))?.value;
        let r = match robustness(&rho, &comp(d)) {
            Ok(r) => r.value,
            Err(Error::BoundViolation(_)) => f64::NAN,
            Err(e) => return Err(e),
        };
        let slack = (r - l1 / (d - 1) as f64).min(l1 - r);
        worst_slack = if slack.is_nan() { f64::NEG_INFINITY } else { worst_slack.min(slack) };
    }
    let ok = w.ok() && worst_slack >= -1e-6;
    Ok((ok, format!("numeric vs C_l1 {}; bracket min slack {worst_slack:.2e} on 1000 states", w.show())))
}

/// Grid over the d-simplex with `n` steps per axis.
fn simplex_grid(d: usize, n: usize) -> Vec<Vec<f64>> {
    fn rec(d: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == d - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / n as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(d, left - k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n, n, &mut Vec::new(), &mut out);
    out
}

fn steps_for(d: usize, points: usize) -> usize {
    (1..).find(|&n| simplex_count(d, n) >= points).unwrap()
}

fn simplex_count(d: usize, n: usize) -> usize {
    (1..d).fold(1usize, |acc, k| acc * (n + k) / k)
}

fn c6_pure_trace_norm() -> Outcome {
    let mut g = rng(106);
    let mut w = Worst::new(1e-4);
    for k in 0..100 {
        let d = 2 + k % 3;
        let psi = random_pure_with(d, &mut g);
        let rho = psi.density();
        let f = |delta: &[f64]| trace_norm(&(rho.mat() - &ComplexMatrix::diag(delta)));
        let grid = simplex_grid(d, steps_for(d, 10_000));
        let (mut best, mut arg) = (f64::INFINITY, grid[0].clone());
        for p in &grid {
            let v = f(p);
            if v < best {
                best = v;
                arg = p.clone();
            }
        }
        let proj = |x: &[f64]| f(&project_simplex(x, 0.0));
        let h = 1.0 / steps_for(d, 10_000) as f64;
        let (refined, _) = pattern_search(&proj, arg, &vec![h; d], 400, best);
        w.see(c_trace_pure(&psi).value, refined);
    }
    let mut we = Worst::new(1e-12);
    for d in 2..=4 {
        we.see(c_trace_pure(&maximally_coherent(d)).value, 2.0 * (1.0 - 1.0 / d as f64));
    }
    Ok((w.ok() && we.ok(), format!("grid oracle {}; maximally coherent {}", w.show(), we.show())))
}

fn freezing_triples(g: &mut QRng, n: usize) -> Vec<BellDiagonalParams> {
    let mut out = Vec::new();
    while out.len() < n {
        let c1 = 2.0 * uniform(g) - 1.0;
        let c3 = 2.0 * uniform(g) - 1.0;
        let p = BellDiagonalParams::new(c1, -c1 * c3, c3);
        if p.is_valid() && c1.abs() > c3.abs() + 0.05 {
            out.push(p);
        }
    }
    out
}

fn c7_freezing() -> Outcome {
    let mut g = rng(107);
    let sweep = MeasurementSweep::default();
    let mut wd = Worst::new(1e-6);
    let mut conditions = true;
    for p in freezing_triples(&mut g, 20) {
        conditions &= discord_freezing_condition(p)?;
        let rho = bell_diagonal(p)?;
        let d0 = entropic_discord_2q(&rho, Side::A, &sweep)?.value;
        let lo = p.c3.abs() / p.c1.abs();
        for k in 0..50 {
            let damp = 1.0 - (1.0 - lo) * k as f64 / 49.0;
            let ch = standard_channel(ChannelKind::PhaseDamping, damp)?;
            let out = apply(&ch, &rho, &OnSubsystem::Part { dims: vec![2, 2], index: 0 })?;
            wd.see(entropic_discord_2q(&out, Side::A, &sweep)?.value, d0);
        }
    }
    let mut wc = Worst::new(1e-6);
    let basis = comp(4);
    for p in freezing_triples(&mut g, 20) {
        conditions &= coherence_freezing_condition(p, 2)?;
        let rho = bell_diagonal(p)?;
        let f: [fn(&DensityMatrix, &ReferenceBasis) -> Result<MeasureResult, Error>; 3] = [c_l1, c_rel_entropy, c_trace];
        let start: Vec<f64> = f.iter().map(|m| m(&rho, &basis).map(|r| r.value)).collect::<Result<_, _>>()?;
        for k in 0..50 {
            let ch = standard_channel(ChannelKind::BitFlip, 0.5 * k as f64 / 49.0)?;
            let out = apply_all(&ch, &rho, &[2, 2])?;
            for (m, s) in f.iter().zip(&start) {
                wc.see(m(&out, &basis)?.value, *s);
            }
        }
    }
    let ok = wd.ok() && wc.ok() && conditions;
    Ok((ok, format!("discord {}; coherence {}; conditions recognized: {conditions}", wd.show(), wc.show())))
}

fn c8_factorization() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for kind in [ChannelKind::BitFlip, ChannelKind::PhaseFlip, ChannelKind::BitPhaseFlip, ChannelKind::Depolarizing] {
        for (i, p) in [0.1, 0.35, 0.8].into_iter().enumerate() {
            let ch = standard_channel(kind, p)?;
            for (_, indices) in q_law_groups(&ch) {
                let r = factorization_check(&ch, &FamilyDescriptor::QLaw { indices }, 800 + i as u64)?;
                worst = worst.max(r.max_relative_deviation);
                checked += r.samples;
            }
        }
    }
    Ok((worst <= 1e-9, format!("{checked} states over 4 Pauli families, max rel dev {worst:.2e} (tol 1e-9)")))
}

fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s])
}

fn c9_cohering_power() -> Outcome {
    let h = hadamard();
    let closed = cohering_power_unitary(&h, PowerMeasure::L1);
    let ch = KrausChannel::unitary("hadamard", h.clone())?;
    let basis_max = (0..2)
        .map(|k| {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(k, k)] = C64::new(1.0, 0.0);
            c_l1(&DensityMatrix::new_unchecked(ch.apply_mat(&e)), &comp(2)).map(|r| r.value)
        })
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let via_channel = cohering_power(&ch, PowerMeasure::L1)?;
    let hh = h.kron(&h);
    let cp_hh = cohering_power_unitary(&hh, PowerMeasure::L1);
    let additive = (cp_hh + 1.0 - (closed + 1.0).powi(2)).abs();
    let avg_h = average_cohering_power_unitary(&h)?;
    let avg_h_unital = average_cohering_power_unital(&ch)?;
    let perm = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let avg_perm = average_cohering_power_unitary(&perm)?;
    let ok = (closed - 1.0).abs() <= 1e-12
        && (basis_max - 1.0).abs() <= 1e-6
        && (via_channel - 1.0).abs() <= 1e-6
        && additive <= 1e-12
        && (avg_h - 1.0 / 6.0).abs() <= 1e-12
        && (avg_h_unital - 1.0 / 6.0).abs() <= 1e-12
        && avg_perm.abs() <= 1e-12;
    Ok((
        ok,
        format!(
            "CP(H) = {closed}, basis max {basis_max:.9}, CP(H⊗H) + 1 = {}, avg CP(H) = {avg_h:.12}, avg CP(perm) = {avg_perm:.1e}",
            cp_hh + 1.0
        ),
    ))
}

fn c10_dqc1() -> Outcome {
    let mut g = rng(110);
    let mut w = Worst::new(1e-10);
    for k in 0..50 {
        let n = 1 + k % 3;
        let inst = Dqc1Instance::new(n, random_unitary_with(1 << n, &mut g))?;
        let formula = h2((1.0 - inst.normalized_trace().norm()) / 2.0);
        let difference = 1.0 - c_rel_entropy(&inst.ancilla_state(), &comp(2))?.value;
        w.see(formula, difference);
        w.see(dqc1_coherence_consumption(&inst)?, difference);
    }
    let mut we = Worst::new(1e-12);
    we.see(dqc1_coherence_consumption(&Dqc1Instance::new(2, ComplexMatrix::identity(4))?)?, 0.0);
    we.see(dqc1_coherence_consumption(&Dqc1Instance::new(1, pauli(3))?)?, 1.0);
    we.see(dqc1_coherence_consumption(&Dqc1Instance::new(2, pauli(1).kron(&pauli(3)))?)?, 1.0);
    Ok((w.ok() && we.ok(), format!("50 unitaries {}; endpoints {}", w.show(), we.show())))
}

fn c11_grover() -> Outcome {
    let peak = GroverInstance::new(4, 1, 1)?;
    let rho = grover_state(&peak).density();
    let mut wp = Worst::new(1e-12);
    wp.see(grover_success(&peak), 1.0);
    wp.see(c_l1(&rho, &comp(4))?.value, 0.0);
    wp.see(c_rel_entropy(&rho, &comp(4))?.value, 0.0);
    let mut w = Worst::new(1e-10);
    for (n, j) in [(4, 1), (8, 1), (16, 3), (32, 2)] {
        for r in 0..=6 {
            let inst = GroverInstance::new(n, j, r)?;
            let rho = grover_state(&inst).density();
            for kind in [GroverCoherence::L1, GroverCoherence::RelEntropy] {
                let direct = match kind {
                    GroverCoherence::L1 => c_l1(&rho, &comp(n))?.value,
                    GroverCoherence::RelEntropy => c_rel_entropy(&rho, &comp(n))?.value,
                };
                match grover_coherence(&inst, kind) {
                    Ok(v) => w.see(v, direct),
                    Err(Error::BoundViolation(_)) => w.see(f64::NAN, direct),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok((w.ok() && wp.ok(), format!("peak at r = 1 {}; closed vs direct r = 0..6 {}", wp.show(), w.show())))
}

fn c12_complementarity() -> Outcome {
    let mut g = rng(112);
    let mubs = standard_mubs(2)?;
    let mut min_slack = f64::INFINITY;
    for k in 0..1000 {
        let rho = random_density_with(2, 1 + k % 2, &mut g);
        min_slack = min_slack.min(mub_complementarity(&rho, &mubs)?.l1_slack);
    }
    let mut we = Worst::new(1e-9);
    for b in &mubs {
        for v in b.vectors() {
            for eps in [0.0, 0.25, 0.5, 0.75, 1.0] {
                we.see(mub_complementarity(&rho_epsilon(eps, v)?, &mubs)?.l1_slack, 0.0);
            }
        }
    }
    let mut wm = Worst::new(1e-12);
    for d in 2..=4 {
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            wm.see(coherence_mixedness(&mcms(p, d)?)?.slack, 0.0);
        }
    }
    let mut mix_slack = f64::INFINITY;
    for k in 0..1000 {
        let d = 2 + k % 3;
        let rho = random_density_with(d, 1 + (k / 3) % d, &mut g);
        mix_slack = mix_slack.min(coherence_mixedness(&rho)?.slack);
    }
    let ok = min_slack >= -1e-9 && we.ok() && wm.ok() && mix_slack >= -1e-9;
    Ok((
        ok,
        format!(
            "MUB min slack {min_slack:.2e}, ρ_ε {}; MCMS {}, random min slack {mix_slack:.2e}",
            we.show(),
            wm.show()
        ),
    ))
}

fn c13_haar() -> Outcome {
    let mut cases = Vec::new();
    for d in [2, 3] {
        cases.push((d, HaarKind::L1));
    }
    for d in 2..=5 {
        cases.push((d, HaarKind::RelEntropy));
    }
    for d in 2..=4 {
        cases.push((d, HaarKind::DephasedTraceDistance));
    }
    let mut worst: f64 = 0.0;
    for (i, (d, kind)) in cases.iter().enumerate() {
        let h = haar_average_coherence(*d, 10_000, 1300 + i as u64, *kind)?;
        worst = worst.max(h.sigmas());
    }
    Ok((worst <= 4.0, format!("{} cases at 10^4 samples, worst deviation {worst:.2}σ (limit 4σ)", cases.len())))
}

fn c14_unruh() -> Outcome {
    let mut grid: Vec<f64> = (0..63).map(|k| 0.25 * k as f64 * (1.0 + 0.05 * k as f64)).collect();
    grid.push(f64::INFINITY);
    let rows = degradation_curve(Statistics::Fermionic, CurveMeasure::Negativity, 1.0, &grid, TruncationConfig::DEFAULT_TAIL)?;
    let monotone = rows.windows(2).all(|w| w[1].value <= w[0].value + 1e-12);
    let last = rows.last().unwrap();
    let floor = last.value;
    let at_half = (last.r.cos().powi(2) - 0.5).abs() < 1e-14;
    let tail = 1e-8;
    let n0 = BosonicDegradedState::new(0.0, &TruncationConfig::for_r(0.0, tail)?)?.negativity();
    let tc = TruncationConfig::for_r(2.0, tail)?;
    let st = BosonicDegradedState::new(2.0, &tc)?;
    let ratio = st.negativity() / n0;
    let ok = monotone && floor > 0.0 && at_half && ratio < 0.1 && st.deficit() <= tail;
    Ok((
        ok,
        format!(
            "fermionic monotone over {} points: {monotone}, N(cos²r = 1/2) = {floor:.6}; bosonic N(r=2)/N(0) = {ratio:.4} with n_max = {}, deficit {:.1e}",
            rows.len(),
            tc.n_max,
            st.deficit()
        ),
    ))
}

type CohFn = fn(&DensityMatrix, &ReferenceBasis) -> Result<MeasureResult, Error>;

fn tsallis_half(r: &DensityMatrix, b: &ReferenceBasis) -> Result<MeasureResult, Error> {
    tsallis_coherence(r, b, 0.5)
}

fn tsallis_two(r: &DensityMatrix, b: &ReferenceBasis) -> Result<MeasureResult, Error> {
    tsallis_coherence(r, b, 2.0)
}

fn formation(r: &DensityMatrix, _: &ReferenceBasis) -> Result<MeasureResult, Error> {
    coherence_of_formation_qubit(r)
}

const ALL_MEASURES: &[(&str, CohFn)] = &[
    ("c_l1", c_l1),
    ("c_rel_entropy", c_rel_entropy),
    ("c_l2", c_l2),
    ("c_trace", c_trace),
    ("c_trace_modified", c_trace_modified),
    ("robustness", robustness),
    ("coherence_weight", coherence_weight),
    ("geometric_coherence", geometric_coherence),
    ("tsallis_0.5", tsallis_half),
    ("tsallis_2", tsallis_two),
    ("c_max_rel_entropy", c_max_relative_entropy),
    ("c_sk", c_sk),
];

const MONOTONE: &[(&str, CohFn)] = &[("c_l1", c_l1), ("c_rel_entropy", c_rel_entropy), ("robustness", robustness), ("c_sk", c_sk)];

/// Strictly incoherent channel: Kraus operators K_i = Σ_j √w_ij e^{iφ} |π_i(j)⟩⟨j| with Σ_i w_ij = 1.
fn random_sio(d: usize, g: &mut QRng) -> Result<KrausChannel, Error> {
    let m = 1 + (uniform(g) * 3.0) as usize;
    let weights: Vec<Vec<f64>> = (0..d).map(|_| dirichlet(g, m)).collect();
    let mut ops = Vec::with_capacity(m);
    for i in 0..m {
        let perm = random_permutation(d, g);
        let mut k = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            k[(perm[j], j)] = C64::from_polar(weights[j][i].sqrt(), 2.0 * PI * uniform(g));
        }
        ops.push(k);
    }
    KrausChannel::new("sio", ops)
}

fn random_permutation(d: usize, g: &mut QRng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = (uniform(g) * (i + 1) as f64) as usize % (i + 1);
        p.swap(i, j);
    }
    p
}

fn incoherent_unitary(d: usize, g: &mut QRng) -> ComplexMatrix {
    let perm = random_permutation(d, g);
    let mut u = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        u[(perm[j], j)] = C64::from_polar(1.0, normal(g));
    }
    u
}

fn c15_hygiene() -> Outcome {
    let mut g = rng(115);
    let mut zero = Worst::new(1e-9);
    let mut inv = Worst::new(1e-9);
    let mut worst_name = "";
    for d in [2, 3, 4] {
        for _ in 0..5 {
            let diag = DensityMatrix::diagonal(&dirichlet(&mut g, d))?;
            let rho = random_density_with(d, d, &mut g);
            let u = incoherent_unitary(d, &mut g);
            let moved = DensityMatrix::new_unchecked(u.matmul(rho.mat()).matmul(&u.adjoint()));
            for (name, m) in ALL_MEASURES {
                zero.see(m(&diag, &comp(d))?.value, 0.0);
                let before = inv.err;
                inv.see(m(&moved, &comp(d))?.value, m(&rho, &comp(d))?.value);
                if inv.err > before {
                    worst_name = name;
                }
            }
            if d == 2 {
                zero.see(formation(&diag, &comp(2))?.value, 0.0);
                inv.see(formation(&moved, &comp(2))?.value, formation(&rho, &comp(2))?.value);
            }
        }
    }
    let mut increase = f64::NEG_INFINITY;
    let mut offender = "";
    for k in 0..200 {
        let d = 2 + k % 3;
        let ch = random_sio(d, &mut g)?;
        let rho = random_density_with(d, 1 + k % d, &mut g);
        let out = DensityMatrix::new_unchecked(ch.apply_mat(rho.mat()).hermitian_part());
        for (name, m) in MONOTONE {
            let delta = m(&out, &comp(d))?.value - m(&rho, &comp(d))?.value;
            if delta > increase {
                increase = delta;
                offender = name;
            }
        }
    }
    let ok = zero.ok() && inv.ok() && increase <= 1e-8;
    Ok((
        ok,
        format!(
            "{} measures: zero on diagonal {}, invariance {} (worst {worst_name}); monotone subset max increase {increase:.2e} ({offender}) over 200 SIO channels",
            ALL_MEASURES.len() + 1,
            zero.show(),
            inv.show()
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("Bell-diagonal trace discord", c1_bell_diagonal_trace_discord),
        ("two-qubit HS discord", c2_hs_discord),
        ("X-state trace discord", c3_x_state_trace_discord),
        ("Hellinger/LQU duality", c4_lqu_hellinger),
        ("robustness of coherence", c5_robustness),
        ("pure-state trace-norm coherence", c6_pure_trace_norm),
        ("freezing", c7_freezing),
        ("factorization law", c8_factorization),
        ("cohering power", c9_cohering_power),
        ("DQC1", c10_dqc1),
        ("Grover", c11_grover),
        ("complementarity", c12_complementarity),
        ("Haar averages", c13_haar),
        ("Unruh degradation", c14_unruh),
        ("measure hygiene", c15_hygiene),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match panic::catch_unwind(f) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(p) => (false, format!("panic: {}", p.downcast_ref::<String>().cloned().unwrap_or_default())),
        };
        if !ok {
            failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name}: {detail} ({:.1}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
