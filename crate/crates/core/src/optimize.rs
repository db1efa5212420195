//! Pay-off maximization over product and matched one-way LOCC strategies,
//! and the entanglement measures built on it.
//!
//! All see-saw loops work on `M = W^Θ (x) rho` ordered `[A, A0, B0, B]`, so
//! Alice's space `Ã = [A, A0]` is the left factor and Bob's `B̃ = [B0, B]`
//! the right one.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{payoff_via_witness, shared_state, witness_state_operator};
use crate::qops::{
    self, eig_hermitian, eig_matrix, partial_trace, partial_transpose, permute_subsystems, positive_projector_matrix,
    tensor, CMatrix, QuantumOperator, StateVector, SubsystemLayout, A, A0, B, B0, C64,
};
use crate::random::{haar_projector, haar_unitary, stream};
use crate::strategy::{filter_pullback, matched_one_way, product, slocc_filter, Strategy};
use crate::witness::{decomposable_witness, Witness, WitnessKind};

/// Minimum eigenvalue of the partial transpose at or above this counts as PPT.
pub const PPT_TOL: f64 = 1e-9;
/// Fixed-point sweeps on Alice's POVM per outer iteration.
const ALICE_SWEEPS: usize = 3;
/// Rounds of witness refinement in [`payoff_bullet`].
const WITNESS_ROUNDS: usize = 30;
/// Negative partial-transpose eigenvectors seeding [`payoff_bullet`].
pub const BULLET_FAMILY: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Alice's branch count for matched strategies; `None` means `dim Ã`.
    pub branches: Option<usize>,
    pub execution: Execution,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 16, max_iter: 200, tol: 1e-9, seed: 0, branches: None, execution: Execution::Auto }
    }
}

impl SeesawOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iter == 0 {
            return Err(Error::Validation("restarts and max_iter must be positive".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Validation(format!("tolerance {} must be nonnegative", self.tol)));
        }
        if self.branches == Some(0) {
            return Err(Error::Validation("branch count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffReport {
    pub value: f64,
    pub strategy: Strategy,
    pub upper_bound: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub seed: u64,
    /// Game the strategy is played on, when chosen by the optimizer.
    pub witness: Option<Witness>,
    /// Success probability of the local filter, for filtered strategies.
    pub filter_probability: Option<f64>,
    /// Set when PPT-entangled states could go undetected.
    pub lower_bound_only: bool,
    /// Objective after every iteration of the best restart.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SLambdaVerdict {
    pub lambda: f64,
    pub member: bool,
    pub certificate: PayoffReport,
}

struct Objective {
    m: CMatrix,
    dims: [usize; 4],
    da: usize,
    db: usize,
}

impl Objective {
    fn new(w: &Witness, rho: &QuantumOperator) -> Result<Self> {
        let op = witness_state_operator(w, rho)?;
        let op = permute_subsystems(&op, &[A, A0, B0, B])?;
        let d = op.layout().dims();
        let dims = [d[0], d[1], d[2], d[3]];
        Ok(Self { m: op.into_matrix(), dims, da: dims[0] * dims[1], db: dims[2] * dims[3] })
    }

    /// `Tr_B̃[(I (x) Q) M]`.
    fn reduce_right(&self, q: &CMatrix) -> CMatrix {
        let (da, db) = (self.da, self.db);
        CMatrix::from_fn(da, da, |a, a2| {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..db {
                for b2 in 0..db {
                    s += q[(b, b2)] * self.m[(a * db + b2, a2 * db + b)];
                }
            }
            s
        })
    }

    /// `Tr_Ã[(P (x) I) M]`.
    fn reduce_left(&self, p: &CMatrix) -> CMatrix {
        let db = self.db;
        CMatrix::from_fn(db, db, |b, b2| {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..self.da {
                for a2 in 0..self.da {
                    s += p[(a, a2)] * self.m[(a2 * db + b, a * db + b2)];
                }
            }
            s
        })
    }

    fn alice_layout(&self) -> SubsystemLayout {
        SubsystemLayout::pair((A, self.dims[0]), (A0, self.dims[1])).expect("distinct labels")
    }

    fn bob_layout(&self) -> SubsystemLayout {
        SubsystemLayout::pair((B0, self.dims[2]), (B, self.dims[3])).expect("distinct labels")
    }
}

fn real_trace_product(x: &CMatrix, y: &CMatrix) -> f64 {
    qops::trace_of_product(x, y).re
}

/// `Tr_{A,B}[Z (I (x) rho (x) I)]` on the question slots.
fn question_marginal(z: &QuantumOperator, rho: &QuantumOperator) -> Result<QuantumOperator> {
    let l = z.layout();
    let ia = QuantumOperator::identity(SubsystemLayout::single(A0, l.dim_of(A0)?)?);
    let ib = QuantumOperator::identity(SubsystemLayout::single(B0, l.dim_of(B0)?)?);
    let lifted = tensor(&[&ia, rho, &ib])?;
    partial_trace(&z.mul(&lifted)?, &[A0, B0])
}

/// `Tr[W^Θ (x) rho]`'s spectral ceiling: the positive part of the spectrum of
/// `W (x) rho`, which bounds `Tr[Z (W^Θ (x) rho)]` for every `0 <= Z <= I`.
pub fn upper_bound_global(w: &Witness, rho: &QuantumOperator) -> Result<f64> {
    let rho = shared_state(rho)?;
    if rho.layout().dims() != w.op().layout().dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs witness dims {:?}",
            rho.layout().dims(),
            w.op().layout().dims()
        )));
    }
    let lw = eig_hermitian(w.op())?.values;
    let lr = eig_hermitian(&rho)?.values;
    Ok(lw
        .iter()
        .flat_map(|a| lr.iter().map(move |b| (a * b).max(0.0)))
        .sum())
}

struct Run {
    value: f64,
    alice: Vec<CMatrix>,
    bob: Vec<CMatrix>,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

fn best_run(runs: Vec<Run>) -> Run {
    let mut best: Option<Run> = None;
    for r in runs {
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.expect("at least one restart")
}

fn product_run(obj: &Objective, opts: &SeesawOptions, restart: usize) -> Run {
    let mut rng = stream(opts.seed, restart as u64);
    let mut q = haar_projector(obj.db, &mut rng);
    let mut p = positive_projector_matrix(&obj.reduce_right(&q)).0;
    let mut value = real_trace_product(&p, &obj.reduce_right(&q));
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let (q_new, _) = positive_projector_matrix(&obj.reduce_left(&p));
        let (p_new, v) = positive_projector_matrix(&obj.reduce_right(&q_new));
        history.push(v);
        let gain = v - value;
        if v >= value {
            p = p_new;
            q = q_new;
            value = v;
        }
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    Run { value, alice: vec![p], bob: vec![q], iterations, converged, history }
}

fn branch_operators(obj: &Objective, bob: &[CMatrix]) -> Vec<CMatrix> {
    bob.iter().map(|q| obj.reduce_right(q)).collect()
}

fn matched_value(obj: &Objective, alice: &[CMatrix], bob: &[CMatrix]) -> f64 {
    alice
        .iter()
        .zip(bob)
        .map(|(p, q)| real_trace_product(p, &obj.reduce_right(q)))
        .sum()
}

fn bob_step(obj: &Objective, alice: &[CMatrix]) -> Vec<CMatrix> {
    alice.iter().map(|p| positive_projector_matrix(&obj.reduce_left(p)).0).collect()
}

/// One fixed-point sweep `P_u <- R^{-1/2} S_u P_u S_u R^{-1/2}` with
/// `S_u = N_u + c I >= 0` and `R = sum_u S_u P_u S_u`.
fn alice_sweep(shifted: &[CMatrix], alice: &[CMatrix]) -> Vec<CMatrix> {
    let n = alice[0].nrows();
    let terms: Vec<CMatrix> = shifted.iter().zip(alice).map(|(s, p)| s * p * s).collect();
    let mut r = CMatrix::zeros(n, n);
    for t in &terms {
        r += t;
    }
    let eig = eig_matrix(&r);
    let cutoff = 1e-13 * eig.max().max(1e-300);
    let mut inv_sqrt = CMatrix::zeros(n, n);
    let mut support = CMatrix::zeros(n, n);
    for (k, &l) in eig.values.iter().enumerate() {
        if l > cutoff {
            let v = eig.vectors.column(k);
            let outer = &v * v.adjoint();
            inv_sqrt += outer.scale(1.0 / l.sqrt());
            support += outer;
        }
    }
    let mut out: Vec<CMatrix> = terms.iter().map(|t| qops::hermitize(&(&inv_sqrt * t * &inv_sqrt))).collect();
    out[0] += CMatrix::identity(n, n) - support;
    out
}

fn alice_step(n_ops: &[CMatrix], alice: &mut Vec<CMatrix>, tol: f64) {
    let dim = alice[0].nrows();
    let shift = n_ops.iter().map(|n| eig_matrix(n).min()).fold(0.0_f64, |c, l| c.max(-l));
    let shifted: Vec<CMatrix> = n_ops.iter().map(|n| n + CMatrix::identity(dim, dim).scale(shift)).collect();
    let value = |ps: &[CMatrix]| -> f64 { ps.iter().zip(n_ops).map(|(p, n)| real_trace_product(p, n)).sum() };
    let mut current = value(alice);
    for _ in 0..ALICE_SWEEPS {
        let next = alice_sweep(&shifted, alice);
        let v = value(&next);
        if v <= current {
            break;
        }
        *alice = next;
        let gain = v - current;
        current = v;
        if gain < tol * 1e-2 {
            break;
        }
    }
}

fn matched_ascent(obj: &Objective, mut alice: Vec<CMatrix>, opts: &SeesawOptions) -> Run {
    let mut bob = bob_step(obj, &alice);
    let mut value = matched_value(obj, &alice, &bob);
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let mut next = alice.clone();
        alice_step(&branch_operators(obj, &bob), &mut next, opts.tol);
        let next_bob = bob_step(obj, &next);
        let v = matched_value(obj, &next, &next_bob);
        history.push(v);
        let gain = v - value;
        if v >= value {
            alice = next;
            bob = next_bob;
            value = v;
        }
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    Run { value, alice, bob, iterations, converged, history }
}

fn initial_povm(obj: &Objective, branches: usize, opts: &SeesawOptions, restart: usize) -> Vec<CMatrix> {
    let mut rng = stream(opts.seed, restart as u64);
    let u = haar_unitary(obj.da, &mut rng);
    let mut povm = vec![CMatrix::zeros(obj.da, obj.da); branches];
    for k in 0..obj.da {
        let v = u.column(k);
        povm[k % branches] += &v * v.adjoint();
    }
    povm
}

fn matched_strategy(obj: &Objective, run: &Run) -> Result<Strategy> {
    let alice = run
        .alice
        .iter()
        .map(|p| QuantumOperator::new(obj.alice_layout(), p.clone()))
        .collect::<Result<Vec<_>>>()?;
    let bob = run
        .bob
        .iter()
        .map(|q| QuantumOperator::new(obj.bob_layout(), q.clone()))
        .collect::<Result<Vec<_>>>()?;
    matched_one_way(&alice, &bob)
}

fn finish(w: &Witness, rho: &QuantumOperator, strategy: Strategy, run: Run, opts: &SeesawOptions) -> Result<PayoffReport> {
    let value = payoff_via_witness(w, rho, &strategy)?;
    Ok(PayoffReport {
        value,
        strategy,
        upper_bound: upper_bound_global(w, rho)?,
        iterations: run.iterations,
        restarts: opts.restarts,
        converged: run.converged,
        seed: opts.seed,
        witness: None,
        filter_probability: None,
        lower_bound_only: false,
        history: run.history,
    })
}

/// Best product strategy `P (x) Q`, by alternating exact maximization.
pub fn seesaw_product(w: &Witness, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    opts.validate()?;
    let obj = Objective::new(w, rho)?;
    let run = best_run(map_indexed(opts.restarts, opts.execution, |r| product_run(&obj, opts, r)));
    let p = QuantumOperator::new(obj.alice_layout(), run.alice[0].clone())?;
    let q = QuantumOperator::new(obj.bob_layout(), run.bob[0].clone())?;
    let strategy = product(&p, &q)?;
    finish(w, rho, strategy, run, opts)
}

/// Best matched one-way strategy `sum_u P_u (x) Q_{1|u}`.
pub fn seesaw_matched(w: &Witness, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    opts.validate()?;
    let obj = Objective::new(w, rho)?;
    let branches = opts.branches.unwrap_or(obj.da);
    let run = best_run(map_indexed(opts.restarts, opts.execution, |r| {
        matched_ascent(&obj, initial_povm(&obj, branches, opts, r), opts)
    }));
    let strategy = matched_strategy(&obj, &run)?;
    finish(w, rho, strategy, run, opts)
}

/// Continue a matched ascent on a new witness from a previous strategy's POVM.
fn seesaw_matched_from(
    w: &Witness,
    rho: &QuantumOperator,
    start: &[CMatrix],
    opts: &SeesawOptions,
) -> Result<PayoffReport> {
    let obj = Objective::new(w, rho)?;
    let run = matched_ascent(&obj, start.to_vec(), opts);
    let strategy = matched_strategy(&obj, &run)?;
    finish(w, rho, strategy, run, opts)
}

/// Partial-transpose spectrum of `rho` on `[A, B]`, eigenvalues descending.
fn pt_spectrum(rho: &QuantumOperator) -> Result<qops::HermitianEigen> {
    eig_hermitian(&partial_transpose(rho, &[B])?.hermitized())
}

fn question_vector(rho: &QuantumOperator, v: qops::CVector) -> Result<StateVector> {
    let dims = rho.layout().dims();
    StateVector::new(SubsystemLayout::pair((A0, dims[0]), (B0, dims[1]))?, v)?.normalized()
}

fn trivial_report(w: &Witness, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    let dims = rho.layout().dims();
    let strategy = Strategy::never((dims[0], dims[1]))?;
    Ok(PayoffReport {
        value: 0.0,
        strategy,
        upper_bound: upper_bound_global(w, rho)?,
        iterations: 0,
        restarts: 0,
        converged: true,
        seed: opts.seed,
        witness: None,
        filter_probability: None,
        lower_bound_only: false,
        history: Vec::new(),
    })
}

/// Product strategy projecting both sides onto the maximally entangled vector.
fn phi_plus_product(dims: [usize; 2]) -> Result<Strategy> {
    let p = StateVector::maximally_entangled(SubsystemLayout::pair((A, dims[0]), (A0, dims[0]))?)?.projector();
    let q = StateVector::maximally_entangled(SubsystemLayout::pair((B0, dims[1]), (B, dims[1]))?)?.projector();
    product(&p, &q)
}

/// Best matched strategy on the decomposable game built from `phi`, never
/// below the maximally-entangled product strategy.
fn detecting_inner(v: &Witness, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    let mut inner = seesaw_matched(v, rho, opts)?;
    let dims = rho.layout().dims();
    let fallback = phi_plus_product([dims[0], dims[1]])?;
    let fallback_value = payoff_via_witness(v, rho, &fallback)?;
    if fallback_value > inner.value {
        inner.value = fallback_value;
        inner.strategy = fallback;
    }
    Ok(inner)
}

/// ℘° for a decomposable game: play the best strategy for the game that
/// detects `rho` most strongly, reached from `W`'s source by a local filter.
pub fn payoff_npt(w: &Witness, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    opts.validate()?;
    let rho = shared_state(rho)?;
    let psi = match (w.kind(), w.source_vector()) {
        (WitnessKind::Decomposable, Some(psi)) => psi.clone(),
        _ => return Err(Error::Validation("payoff_npt needs a decomposable witness".into())),
    };
    let d = w.d();
    let rank = qops::schmidt_decompose(&psi, &[A0], &[B0])?.rank();
    if rank != d {
        return Err(Error::Validation(format!("witness source has Schmidt rank {rank}, need {d}")));
    }
    if rho.layout().dims() != w.op().layout().dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs witness dims {:?}",
            rho.layout().dims(),
            w.op().layout().dims()
        )));
    }
    let spectrum = pt_spectrum(&rho)?;
    if spectrum.min() >= -PPT_TOL {
        return trivial_report(w, &rho, opts);
    }
    let phi = question_vector(&rho, spectrum.vector(spectrum.values.len() - 1))?;
    let v = decomposable_witness(&phi)?;
    let inner = detecting_inner(&v, &rho, opts)?;
    let filter = slocc_filter(&psi, &phi)?;
    let (fa, fb) = filter.question_filters()?;
    let strategy = filter_pullback(&inner.strategy, &fa, &fb)?;
    let value = payoff_via_witness(w, &rho, &strategy)?;
    Ok(PayoffReport {
        value,
        strategy,
        upper_bound: upper_bound_global(w, &rho)?,
        filter_probability: Some(filter.q),
        ..inner
    })
}

/// Witness source maximizing `Tr[Z (V_phi^Θ (x) rho)]` for the given strategy,
/// and the resulting value `-D lambda_min(G^{T_A0})`.
fn best_source(z: &QuantumOperator, rho: &QuantumOperator, d: usize) -> Result<(StateVector, f64)> {
    let g = question_marginal(z, rho)?;
    let gt = partial_transpose(&g, &[A0])?.hermitized();
    let eig = eig_hermitian(&gt)?;
    let k = eig.values.len() - 1;
    let phi = StateVector::new(gt.layout().clone(), eig.vector(k))?.normalized()?;
    Ok((phi, -(d as f64) * eig.min()))
}

fn matched_alice(strategy: &Strategy) -> Option<Vec<CMatrix>> {
    match strategy.kind() {
        crate::strategy::StrategyKind::MatchedOneWay { alice_povm, .. } => {
            Some(alice_povm.iter().map(|p| p.matrix().clone()).collect())
        }
        _ => None,
    }
}

/// Alternate between the best matched strategy for a decomposable game and
/// the best decomposable game for that strategy.
fn refine_game(seed_phi: &StateVector, rho: &QuantumOperator, opts: &SeesawOptions) -> Result<(Witness, PayoffReport)> {
    let mut v = decomposable_witness(seed_phi)?;
    let mut report = detecting_inner(&v, rho, opts)?;
    for _ in 0..WITNESS_ROUNDS {
        let Some(alice) = matched_alice(&report.strategy) else { break };
        let (phi, _) = best_source(report.strategy.z11(), rho, v.d())?;
        let Ok(next_v) = decomposable_witness(&phi) else { break };
        let next = seesaw_matched_from(&next_v, rho, &alice, opts)?;
        if next.value <= report.value + opts.tol {
            if next.value > report.value {
                (v, report) = (next_v, next);
            }
            break;
        }
        (v, report) = (next_v, next);
    }
    Ok((v, report))
}

/// Restricted ℘•: best matched-strategy pay-off over decomposable games,
/// seeded by the most negative partial-transpose eigenvectors and the
/// maximally entangled witness, each refined by alternating game and strategy.
pub fn payoff_bullet(rho: &QuantumOperator, opts: &SeesawOptions) -> Result<PayoffReport> {
    opts.validate()?;
    let rho = shared_state(rho)?;
    let dims = rho.layout().dims();
    let lower_bound_only = dims[0] * dims[1] > 6;
    let canonical = StateVector::maximally_entangled(SubsystemLayout::pair((A0, dims[0]), (B0, dims[1]))?)?;
    let spectrum = pt_spectrum(&rho)?;
    if spectrum.min() >= -PPT_TOL {
        let w = decomposable_witness(&canonical)?;
        let mut r = trivial_report(&w, &rho, opts)?;
        r.witness = Some(w);
        r.lower_bound_only = lower_bound_only;
        return Ok(r);
    }
    let n = spectrum.values.len();
    let mut seeds: Vec<StateVector> = (0..BULLET_FAMILY.min(n))
        .map(|j| n - 1 - j)
        .filter(|&k| spectrum.values[k] < -PPT_TOL)
        .map(|k| question_vector(&rho, spectrum.vector(k)))
        .collect::<Result<_>>()?;
    seeds.push(canonical);
    let mut best: Option<(Witness, PayoffReport)> = None;
    for phi in &seeds {
        let Ok(candidate) = refine_game(phi, &rho, opts) else { continue };
        if best.as_ref().is_none_or(|(_, b)| candidate.1.value > b.value) {
            best = Some(candidate);
        }
    }
    let (w, mut report) = best.ok_or_else(|| Error::Solver("no family member produced a game".into()))?;
    report.upper_bound = upper_bound_global(&w, &rho)?;
    report.witness = Some(w);
    report.lower_bound_only = lower_bound_only;
    Ok(report)
}

/// Membership in `S_lambda = {rho : ℘•(rho) <= lambda}`, judged by the
/// restricted measure, so only non-membership is rigorous.
pub fn s_lambda_member(rho: &QuantumOperator, lambda: f64, opts: &SeesawOptions) -> Result<SLambdaVerdict> {
    if !(lambda >= 0.0) {
        return Err(Error::Validation(format!("lambda {lambda} must be nonnegative")));
    }
    let certificate = payoff_bullet(rho, opts)?;
    Ok(SLambdaVerdict { lambda, member: certificate.value <= lambda + 1e-9, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell, werner};
    use crate::strategy::{bell_matched, BellState, IDENTITY_PAIRING};
    use approx::assert_abs_diff_eq;

    fn w_de() -> Witness {
        decomposable_witness(&BellState::PsiMinus.vector(A0, B0)).unwrap()
    }

    fn product_state() -> QuantumOperator {
        StateVector::basis(SubsystemLayout::pair((A, 2), (B, 2)).unwrap(), &[0, 0]).unwrap().projector()
    }

    #[test]
    fn upper_bound_examples() {
        assert_abs_diff_eq!(upper_bound_global(&w_de(), &bell(BellState::PhiPlus)).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = QuantumOperator::maximally_mixed(SubsystemLayout::pair((A, 2), (B, 2)).unwrap());
        // W_de has a single +1 eigenvalue, which pairs with four eigenvalues 1/4.
        assert_abs_diff_eq!(upper_bound_global(&w_de(), &mixed).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_seesaw_examples() {
        let opts = SeesawOptions::default().with_seed(3);
        let r = seesaw_product(&w_de(), &product_state(), &opts).unwrap();
        assert!(r.value.abs() < 1e-9);
        let r = seesaw_product(&w_de(), &bell(BellState::PhiPlus), &opts).unwrap();
        assert!(r.value >= 0.25 - 1e-9);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12) || !r.converged);
    }

    #[test]
    fn matched_seesaw_finds_bell_strategies() {
        let opts = SeesawOptions::default().with_seed(11);
        for which in [BellState::PhiPlus, BellState::PhiMinus] {
            let r = seesaw_matched(&w_de(), &bell(which), &opts).unwrap();
            assert!(r.value >= 1.0 - 1e-6, "{which}: {}", r.value);
            assert!(r.value <= r.upper_bound + 1e-9);
        }
        let r = seesaw_matched(&w_de(), &werner(2.0 / 3.0).unwrap(), &opts).unwrap();
        assert!(r.value >= 0.5 - 1e-9);
    }

    #[test]
    fn npt_measure_examples() {
        let opts = SeesawOptions::default().with_seed(5);
        let r = payoff_npt(&w_de(), &bell(BellState::PhiMinus), &opts).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.filter_probability.unwrap(), 1.0, epsilon = 1e-12);
        let r = payoff_npt(&w_de(), &werner(0.3).unwrap(), &opts).unwrap();
        assert_eq!(r.value, 0.0);
        let r = payoff_npt(&w_de(), &werner(0.5).unwrap(), &opts).unwrap();
        let bell_value = payoff_via_witness(&w_de(), &werner(0.5).unwrap(), &bell_matched(IDENTITY_PAIRING).unwrap()).unwrap();
        assert!(r.value > 0.0 && r.value >= bell_value - 1e-9);
    }

    #[test]
    fn bullet_examples() {
        let opts = SeesawOptions { restarts: 4, ..SeesawOptions::default() };
        assert_eq!(payoff_bullet(&product_state(), &opts).unwrap().value, 0.0);
        let r = payoff_bullet(&bell(BellState::PhiPlus), &opts).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
        assert!(!r.lower_bound_only);
    }

    #[test]
    fn s_lambda_examples() {
        let opts = SeesawOptions { restarts: 4, ..SeesawOptions::default() };
        assert!(s_lambda_member(&product_state(), 0.0, &opts).unwrap().member);
        assert!(!s_lambda_member(&bell(BellState::PhiPlus), 0.5, &opts).unwrap().member);
        assert!(s_lambda_member(&bell(BellState::PhiPlus), 1e3, &opts).unwrap().member);
        assert!(s_lambda_member(&product_state(), -1.0, &opts).is_err());
    }
}
