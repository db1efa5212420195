//! Measurement strategies for the two players and the local-filter and
//! dual-channel constructions that act on them.
//!
//! Alice measures `Ã = [A, A0]`, Bob measures `B̃ = [B0, B]`. Only the joint
//! effect `Z11` that produces the rewarded answer pair matters; it is realized
//! once at construction in the canonical order `[A0, A, B, B0]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qops::{
    self, permute_subsystems, schmidt_decompose, tensor, CMatrix, QuantumOperator, StateVector,
    SubsystemLayout, A, A0, B, B0, C64, CANONICAL, PSD_TOL,
};

pub const ALICE_ORDER: [&str; 2] = [A, A0];
pub const BOB_ORDER: [&str; 2] = [B0, B];
pub const COMPLETENESS_TOL: f64 = 1e-8;
pub const NORM_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyKind {
    Product {
        p: QuantumOperator,
        q: QuantumOperator,
    },
    MatchedOneWay {
        alice_povm: Vec<QuantumOperator>,
        bob_conditional: Vec<QuantumOperator>,
    },
    Filtered {
        filter_a0: QuantumOperator,
        filter_b0: QuantumOperator,
        inner: Box<Strategy>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    kind: StrategyKind,
    z11: QuantumOperator,
}

impl Strategy {
    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    /// Joint effect for the answer pair (1, 1), canonical order.
    pub fn z11(&self) -> &QuantumOperator {
        &self.z11
    }

    /// `I - Z11`, the effect mapped to answer (0, 0).
    pub fn complement(&self) -> QuantumOperator {
        QuantumOperator::identity(self.z11.layout().clone())
            .sub(&self.z11)
            .expect("same layout")
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            StrategyKind::Product { .. } => "product",
            StrategyKind::MatchedOneWay { .. } => "matched_one_way",
            StrategyKind::Filtered { .. } => "filtered",
        }
    }

    /// Rebuild from a variant, re-running every validity check.
    pub fn from_kind(kind: StrategyKind) -> Result<Self> {
        match kind {
            StrategyKind::Product { p, q } => product(&p, &q),
            StrategyKind::MatchedOneWay { alice_povm, bob_conditional } => {
                matched_one_way(&alice_povm, &bob_conditional)
            }
            StrategyKind::Filtered { filter_a0, filter_b0, inner } => {
                filter_pullback(&inner, &filter_a0, &filter_b0)
            }
        }
    }

    /// Strategy whose effect is identically zero: the players never answer (1, 1).
    pub fn never(dims: (usize, usize)) -> Result<Self> {
        let (da, db) = dims;
        let p = QuantumOperator::zeros(SubsystemLayout::pair((A, da), (A0, da))?);
        let q = QuantumOperator::zeros(SubsystemLayout::pair((B0, db), (B, db))?);
        product(&p, &q)
    }
}

fn ordered_effect(op: &QuantumOperator, order: [&str; 2], who: &str) -> Result<QuantumOperator> {
    let mut labels = op.layout().labels();
    labels.sort_unstable();
    let mut want = order.to_vec();
    want.sort_unstable();
    if labels != want {
        return Err(Error::DimensionMismatch(format!(
            "{who}'s effect must act on {order:?}, got {:?}",
            op.layout().labels()
        )));
    }
    permute_subsystems(op, &order)
}

fn check_effect(op: &QuantumOperator, what: &str) -> Result<()> {
    op.validate_effect()
        .map_err(|e| Error::InvalidEffect(format!("{what}: {e}")))
}

fn to_canonical(alice: &QuantumOperator, bob: &QuantumOperator) -> Result<QuantumOperator> {
    permute_subsystems(&tensor(&[alice, bob])?, &CANONICAL)
}

/// `Z11 = P (x) Q` with `P` on `[A, A0]` and `Q` on `[B0, B]`.
pub fn product(p: &QuantumOperator, q: &QuantumOperator) -> Result<Strategy> {
    let p = ordered_effect(p, ALICE_ORDER, "Alice")?;
    let q = ordered_effect(q, BOB_ORDER, "Bob")?;
    check_effect(&p, "Alice")?;
    check_effect(&q, "Bob")?;
    let z11 = to_canonical(&p, &q)?;
    Ok(Strategy { kind: StrategyKind::Product { p, q }, z11 })
}

/// Alice measures a complete POVM `{P_u}` and announces `u`; Bob answers 1
/// with effect `Q_{1|u}`. `Z11 = sum_u P_u (x) Q_{1|u}`.
pub fn matched_one_way(alice_povm: &[QuantumOperator], bob_conditional: &[QuantumOperator]) -> Result<Strategy> {
    if alice_povm.is_empty() || alice_povm.len() != bob_conditional.len() {
        return Err(Error::Validation(format!(
            "need matching, nonempty branch lists ({} vs {})",
            alice_povm.len(),
            bob_conditional.len()
        )));
    }
    let alice = alice_povm
        .iter()
        .map(|p| ordered_effect(p, ALICE_ORDER, "Alice"))
        .collect::<Result<Vec<_>>>()?;
    let bob = bob_conditional
        .iter()
        .map(|q| ordered_effect(q, BOB_ORDER, "Bob"))
        .collect::<Result<Vec<_>>>()?;
    let layout = alice[0].layout().clone();
    let mut total = QuantumOperator::zeros(layout.clone());
    for (u, p) in alice.iter().enumerate() {
        check_effect(p, &format!("Alice branch {u}"))?;
        total = total.add(p)?;
    }
    let defect = total.max_abs_diff(&QuantumOperator::identity(layout));
    if defect > COMPLETENESS_TOL {
        return Err(Error::InvalidEffect(format!("Alice's POVM misses completeness by {defect:e}")));
    }
    for (u, q) in bob.iter().enumerate() {
        check_effect(q, &format!("Bob branch {u}"))?;
        if q.layout() != bob[0].layout() {
            return Err(Error::DimensionMismatch("Bob's branches disagree on dimensions".into()));
        }
    }
    let z11 = matched_effect(&alice, &bob)?;
    Ok(Strategy { kind: StrategyKind::MatchedOneWay { alice_povm: alice, bob_conditional: bob }, z11 })
}

fn matched_effect(alice: &[QuantumOperator], bob: &[QuantumOperator]) -> Result<QuantumOperator> {
    let mut acc: Option<QuantumOperator> = None;
    for (p, q) in alice.iter().zip(bob) {
        let term = tensor(&[p, q])?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    permute_subsystems(&acc.expect("nonempty"), &CANONICAL)
}

/// The four two-qubit Bell vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn amplitudes(self) -> [f64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        }
    }

    pub fn vector(self, first: &str, second: &str) -> StateVector {
        let amps: Vec<C64> = self.amplitudes().iter().map(|&x| C64::new(x, 0.0)).collect();
        let layout = SubsystemLayout::pair((first, 2), (second, 2)).expect("distinct labels");
        StateVector::from_slice(layout, &amps).expect("length 4")
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        })
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" | "phi_plus" => Ok(BellState::PhiPlus),
            "phi-" | "phiminus" | "phi_minus" => Ok(BellState::PhiMinus),
            "psi+" | "psiplus" | "psi_plus" => Ok(BellState::PsiPlus),
            "psi-" | "psiminus" | "psi_minus" => Ok(BellState::PsiMinus),
            other => Err(Error::Validation(format!("unknown Bell state `{other}`"))),
        }
    }
}

/// Pairing that sends every Bell vector to itself.
pub const IDENTITY_PAIRING: [BellState; 4] = BellState::ALL;

/// Alice's outcome `Phi±` is answered by Bob projecting on `Phi∓`, and likewise for `Psi±`.
pub const TWISTED_PAIRING: [BellState; 4] =
    [BellState::PhiMinus, BellState::PhiPlus, BellState::PsiMinus, BellState::PsiPlus];

/// Alice measures the Bell basis on `Ã`; after outcome `k` (in the order of
/// [`BellState::ALL`]) Bob projects `B̃` onto `pairing[k]`.
pub fn bell_matched(pairing: [BellState; 4]) -> Result<Strategy> {
    let mut seen = pairing.to_vec();
    seen.sort_by_key(|b| *b as u8);
    seen.dedup();
    if seen.len() != 4 {
        return Err(Error::Validation(format!("pairing {pairing:?} is not a permutation")));
    }
    let alice: Vec<QuantumOperator> = BellState::ALL.iter().map(|b| b.vector(A, A0).projector()).collect();
    let bob: Vec<QuantumOperator> = pairing.iter().map(|b| b.vector(B0, B).projector()).collect();
    matched_one_way(&alice, &bob)
}

/// A two-sided local filter converting one pure state into another.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterResult {
    /// Contraction on the first slot.
    pub filter: QuantumOperator,
    /// Partial isometry on the second slot aligning the Schmidt bases.
    pub filter_second: QuantumOperator,
    /// Success probability.
    pub q: f64,
}

impl FilterResult {
    /// Filters on the question slots `(A0, B0)` that pull a strategy back
    /// through the conversion: for `W` built from `psi` and `V` from `phi`,
    /// `F W^T F^dagger = q V^T` with `F = conj(K) (x) K'`.
    pub fn question_filters(&self) -> Result<(QuantumOperator, QuantumOperator)> {
        Ok((self.filter.conjugate().with_labels(&[A0])?, self.filter_second.with_labels(&[B0])?))
    }
}

/// Local filter `K (x) K'` with `(K (x) K')|psi> = sqrt(q) |phi>`, built in
/// the Schmidt bases: `K = c sum_i sqrt(nu_i/mu_i) |l_i^phi><l_i^psi|`,
/// `K' = sum_i |r_i^phi><r_i^psi|`, `c = min_i sqrt(mu_i/nu_i)`, `q = c^2`.
pub fn slocc_filter(psi: &StateVector, phi: &StateVector) -> Result<FilterResult> {
    if psi.layout().len() != 2 || psi.layout().dims() != phi.layout().dims() {
        return Err(Error::DimensionMismatch(format!(
            "filter endpoints must share a two-slot layout: {:?} vs {:?}",
            psi.layout().dims(),
            phi.layout().dims()
        )));
    }
    let labels = psi.layout().labels();
    let (l, r) = (labels[0], labels[1]);
    let phi = phi.with_labels(&[l, r])?;
    let sp = schmidt_decompose(psi, &[l], &[r])?;
    let sf = schmidt_decompose(&phi, &[l], &[r])?;
    let (rank_psi, rank_phi) = (sp.rank(), sf.rank());
    if rank_phi > rank_psi {
        return Err(Error::Infeasible(format!(
            "Schmidt rank {rank_phi} target cannot be reached from rank {rank_psi}"
        )));
    }
    let mu = sp.weights();
    let nu = sf.weights();
    let c = (0..rank_phi)
        .map(|i| (mu[i] / nu[i]).sqrt())
        .fold(f64::INFINITY, f64::min);
    let dims = psi.layout().dims();
    let mut k = CMatrix::zeros(dims[0], dims[0]);
    let mut k2 = CMatrix::zeros(dims[1], dims[1]);
    for i in 0..rank_phi {
        k += (&sf.left_basis[i] * sp.left_basis[i].adjoint()).scale(c * (nu[i] / mu[i]).sqrt());
        k2 += &sf.right_basis[i] * sp.right_basis[i].adjoint();
    }
    let q = c * c;
    let filtered = qops::kron(&k, &k2) * psi.vector();
    let residual = (filtered - phi.vector().scale(q.sqrt())).norm();
    if residual > 1e-10 {
        return Err(Error::Solver(format!("filter residual {residual:e}")));
    }
    Ok(FilterResult {
        filter: QuantumOperator::new(SubsystemLayout::single(l, dims[0])?, k)?,
        filter_second: QuantumOperator::new(SubsystemLayout::single(r, dims[1])?, k2)?,
        q,
    })
}

fn single_slot(op: &QuantumOperator, label: &str) -> Result<QuantumOperator> {
    if op.layout().len() != 1 {
        return Err(Error::DimensionMismatch(format!("filter on {label} must act on one slot")));
    }
    op.with_labels(&[label])
}

/// Players apply the filters to their questions before running `inner`:
/// `X11 = (F_A0^dagger (x) F_B0^dagger) Z11 (F_A0 (x) F_B0)` on the question
/// slots, identity on `A`, `B`.
pub fn filter_pullback(inner: &Strategy, filter_a0: &QuantumOperator, filter_b0: &QuantumOperator) -> Result<Strategy> {
    let fa = single_slot(filter_a0, A0)?;
    let fb = single_slot(filter_b0, B0)?;
    for (f, name) in [(&fa, A0), (&fb, B0)] {
        let norm = f.operator_norm();
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::InvalidEffect(format!("filter on {name} has norm {norm} > 1")));
        }
    }
    let layout = inner.z11.layout();
    let ia = QuantumOperator::identity(SubsystemLayout::single(A, layout.dim_of(A)?)?);
    let ib = QuantumOperator::identity(SubsystemLayout::single(B, layout.dim_of(B)?)?);
    let full = tensor(&[&fa, &ia, &ib, &fb])?;
    if full.layout() != layout {
        return Err(Error::DimensionMismatch("filter dims do not match the inner strategy".into()));
    }
    let x = full.dagger().mul(&inner.z11)?.mul(&full)?.hermitized();
    Ok(Strategy {
        kind: StrategyKind::Filtered { filter_a0: fa, filter_b0: fb, inner: Box::new(inner.clone()) },
        z11: x,
    })
}

fn kraus_operator(pair: &(QuantumOperator, QuantumOperator), order: &[&str]) -> Result<QuantumOperator> {
    permute_subsystems(&tensor(&[&pair.0, &pair.1])?, order)
}

fn check_channel(
    target: &QuantumOperator,
    kraus_pairs: &[(QuantumOperator, QuantumOperator)],
    weights: &[f64],
) -> Result<Vec<QuantumOperator>> {
    if kraus_pairs.is_empty() || kraus_pairs.len() != weights.len() {
        return Err(Error::Validation("need one weight per Kraus pair".into()));
    }
    if weights.iter().any(|&q| q < 0.0 || !q.is_finite()) {
        return Err(Error::Validation("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!("weights sum to {total}")));
    }
    let order = target.layout().labels();
    kraus_pairs
        .iter()
        .enumerate()
        .map(|(j, pair)| {
            let f = kraus_operator(pair, &order)?;
            let ff = f.dagger().mul(&f)?;
            let top = qops::eig_hermitian(&ff.hermitized())?.max();
            if top > 1.0 + PSD_TOL {
                return Err(Error::InvalidEffect(format!("Kraus pair {j} increases trace ({top})")));
            }
            Ok(f)
        })
        .collect()
}

/// Dual of the separable operation `X -> sum_j q_j F_j X F_j^dagger` with
/// `F_j = F_j^left (x) F_j^right`: returns `sum_j q_j F_j^dagger Z F_j`.
pub fn channel_dual_pullback(
    z: &QuantumOperator,
    kraus_pairs: &[(QuantumOperator, QuantumOperator)],
    weights: &[f64],
) -> Result<QuantumOperator> {
    let ops = check_channel(z, kraus_pairs, weights)?;
    let mut acc = QuantumOperator::zeros(z.layout().clone());
    for (f, &q) in ops.iter().zip(weights) {
        acc = acc.add(&f.dagger().mul(z)?.mul(f)?.scaled(q))?;
    }
    Ok(acc.hermitized())
}

/// Forward action `sum_j q_j F_j X F_j^dagger` of the same operation.
pub fn channel_apply(
    x: &QuantumOperator,
    kraus_pairs: &[(QuantumOperator, QuantumOperator)],
    weights: &[f64],
) -> Result<QuantumOperator> {
    let ops = check_channel(x, kraus_pairs, weights)?;
    let mut acc = QuantumOperator::zeros(x.layout().clone());
    for (f, &q) in ops.iter().zip(weights) {
        acc = acc.add(&f.mul(x)?.mul(&f.dagger())?.scaled(q))?;
    }
    Ok(acc)
}
