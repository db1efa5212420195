//! Entanglement witnesses on the question slots `[A0, B0]` and their
//! expansion into product-state question ensembles.
//!
//! Sign convention: a witness is block-negative, so `Tr(W sigma) <= 0` for
//! every separable `sigma` and a positive value detects entanglement. Every
//! witness is normalised to `Tr W = -D` with `D = min(d_A0, d_B0)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qops::{
    self, partial_transpose, schmidt_decompose, CMatrix, QuantumOperator, StateVector, SubsystemLayout,
    A0, B0, C64, HERMITIAN_TOL,
};
use crate::random;

pub const TRACE_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Coefficients with magnitude at or below this are dropped from an ensemble.
pub const BETA_DROP_TOL: f64 = 1e-13;
pub const MAX_QUESTION_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Decomposable,
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    op: QuantumOperator,
    d: usize,
    kind: WitnessKind,
    source: Option<StateVector>,
}

impl Witness {
    /// Wrap an arbitrary Hermitian operator on two slots as a generic witness.
    pub fn from_operator(op: &QuantumOperator) -> Result<Self> {
        let op = relabel_questions(op)?;
        op.require_hermitian()?;
        let dims = op.layout().dims();
        let d = dims[0].min(dims[1]);
        let tr = op.trace();
        if (tr.re + d as f64).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!("witness trace {tr} must equal -{d}")));
        }
        Ok(Self { op, d, kind: WitnessKind::Generic, source: None })
    }

    /// Rebuild a witness from its serialized parts, re-checking every invariant.
    pub fn from_parts(
        op: &QuantumOperator,
        d: usize,
        kind: WitnessKind,
        source: Option<StateVector>,
    ) -> Result<Self> {
        match kind {
            WitnessKind::Generic => {
                let w = Self::from_operator(op)?;
                if w.d != d {
                    return Err(Error::Validation(format!("D = {d} does not match dims (expected {})", w.d)));
                }
                Ok(w)
            }
            WitnessKind::Decomposable => {
                let psi = source.ok_or_else(|| {
                    Error::Validation("decomposable witness requires its source vector".into())
                })?;
                let w = decomposable_witness(&psi)?;
                if w.d != d || w.op.max_abs_diff(&relabel_questions(op)?) > 1e-12 {
                    return Err(Error::Validation(
                        "witness operator does not match -D (|psi><psi|)^T_B0".into(),
                    ));
                }
                Ok(w)
            }
        }
    }

    pub fn op(&self) -> &QuantumOperator {
        &self.op
    }

    /// `D = min(d_A0, d_B0)`.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn source_vector(&self) -> Option<&StateVector> {
        self.source.as_ref()
    }

    pub fn question_dims(&self) -> (usize, usize) {
        let dims = self.op.layout().dims();
        (dims[0], dims[1])
    }

    /// Full transpose on both question slots; equals `sum_i beta_i tau_i (x) omega_i`.
    pub fn transposed(&self) -> QuantumOperator {
        self.op.transpose()
    }
}

fn relabel_questions(op: &QuantumOperator) -> Result<QuantumOperator> {
    if op.layout().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "witness must act on two slots, got {:?}",
            op.layout().labels()
        )));
    }
    op.with_labels(&[A0, B0])
}

/// `W = -D (|psi><psi|)^T_B0` for an entangled unit vector `psi`.
pub fn decomposable_witness(psi: &StateVector) -> Result<Witness> {
    if psi.layout().len() != 2 {
        return Err(Error::DimensionMismatch("source vector must live on two slots".into()));
    }
    let psi = psi.with_labels(&[A0, B0])?;
    let schmidt = schmidt_decompose(&psi, &[A0], &[B0])?;
    let rank = schmidt.rank();
    if rank < 2 {
        return Err(Error::NotEntangled { rank });
    }
    let dims = psi.layout().dims();
    let d = dims[0].min(dims[1]);
    let op = partial_transpose(&psi.projector(), &[B0])?.scaled(-(d as f64));
    Ok(Witness { op, d, kind: WitnessKind::Decomposable, source: Some(psi) })
}

/// `-d (|Phi+_d><Phi+_d|)^T_B0`, which is minus the swap operator.
pub fn swap_witness(d: usize) -> Result<Witness> {
    if d < 2 {
        return Err(Error::Validation(format!("swap witness needs d >= 2, got {d}")));
    }
    let layout = SubsystemLayout::pair((A0, d), (B0, d))?;
    decomposable_witness(&StateVector::maximally_entangled(layout)?)
}

/// `Tr(W rho)` for a state with the same slot dimensions.
pub fn evaluate(w: &Witness, rho: &QuantumOperator) -> Result<f64> {
    if rho.layout().dims() != w.op.layout().dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs witness dims {:?}",
            rho.layout().dims(),
            w.op.layout().dims()
        )));
    }
    let v = qops::trace_of_product(w.op.matrix(), rho.matrix());
    if v.im.abs() > HERMITIAN_TOL * 10.0 {
        return Err(Error::NotHermitian { defect: v.im.abs() });
    }
    Ok(v.re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockNegativity {
    pub block_negative: bool,
    /// Largest `<a,b|W|a,b>` found.
    pub worst: f64,
}

/// Sampled block-negativity check. Each of the `n` Haar-random product
/// vectors is refined by alternating top-eigenvector ascent on the two
/// factors, so the reported maximum tracks the supremum over product states.
pub fn is_block_negative_sampled(w: &Witness, n: usize, seed: u64) -> Result<BlockNegativity> {
    if n == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let (da, db) = w.question_dims();
    let m = w.op.matrix();
    let mut rng = random::stream(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let mut a = random::haar_vector(da, &mut rng);
        let mut b = random::haar_vector(db, &mut rng);
        let mut value = product_expectation(m, &a, &b, da, db);
        worst = worst.max(value);
        for _ in 0..20 {
            let wa = contract_right(m, &b, da, db);
            a = qops::eig_matrix(&wa).vector(0);
            let wb = contract_left(m, &a, da, db);
            b = qops::eig_matrix(&wb).vector(0);
            let next = product_expectation(m, &a, &b, da, db);
            worst = worst.max(next);
            if next - value < 1e-14 {
                break;
            }
            value = next;
        }
    }
    Ok(BlockNegativity { block_negative: worst <= 1e-9, worst })
}

fn product_expectation(m: &CMatrix, a: &qops::CVector, b: &qops::CVector, da: usize, db: usize) -> f64 {
    let wa = contract_right(m, b, da, db);
    (a.adjoint() * wa * a)[(0, 0)].re
}

/// `<b|W|b>` as an operator on the first slot.
fn contract_right(m: &CMatrix, b: &qops::CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                acc += b[k].conj() * m[(i * db + k, j * db + l)] * b[l];
            }
        }
        acc
    })
}

/// `<a|W|a>` as an operator on the second slot.
fn contract_left(m: &CMatrix, a: &qops::CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..da {
            for l in 0..da {
                acc += a[k].conj() * m[(k * db + i, l * db + j)] * a[l];
            }
        }
        acc
    })
}

/// One question `(p, beta, tau, omega)` of a witnessing game.
#[derive(Clone, Debug, PartialEq)]
pub struct Question {
    pub p: f64,
    pub beta: f64,
    pub tau: QuantumOperator,
    pub omega: QuantumOperator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuestionEnsemble {
    items: Vec<Question>,
}

impl QuestionEnsemble {
    pub fn new(items: Vec<Question>) -> Result<Self> {
        let e = Self { items };
        e.validate()?;
        Ok(e)
    }

    pub fn items(&self) -> &[Question] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::Validation("empty question ensemble".into()));
        }
        let mut total = 0.0;
        for (i, q) in self.items.iter().enumerate() {
            if q.p <= 0.0 || !q.p.is_finite() {
                return Err(Error::Validation(format!("question {i} has probability {}", q.p)));
            }
            total += q.p;
            q.tau.validate_state()?;
            q.omega.validate_state()?;
            if q.tau.layout().labels() != [A0] || q.omega.layout().labels() != [B0] {
                return Err(Error::Validation(format!("question {i} must carry tau on A0 and omega on B0")));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Ok(())
    }
}

/// The `d^2` pure question states for one side: `|k>`, `(|j>+|k>)/sqrt2`,
/// `(|j>+i|k>)/sqrt2` for `j < k`.
pub fn question_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let unit = |k: usize| {
        let mut v = qops::CVector::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        v
    };
    for k in 0..d {
        let v = unit(k);
        out.push(&v * v.adjoint());
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let v = (unit(j) + unit(k)).scale(s);
            out.push(&v * v.adjoint());
            let v = (unit(j) + unit(k) * C64::new(0.0, 1.0)).scale(s);
            out.push(&v * v.adjoint());
        }
    }
    out
}

/// Columns are row-major vectorisations of `X_j^T` for each basis state.
fn transposed_basis_matrix(basis: &[CMatrix], d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, basis.len(), |r, j| basis[j][(r % d, r / d)])
}

/// Expand `W = sum_i beta_i tau_i^T (x) omega_i^T` over the fixed product
/// question basis, with `p_i = |beta_i| / sum_j |beta_j|`.
pub fn decompose_product_ensemble(w: &Witness) -> Result<QuestionEnsemble> {
    let (da, db) = w.question_dims();
    if da > MAX_QUESTION_DIM || db > MAX_QUESTION_DIM {
        return Err(Error::Validation(format!(
            "question dims ({da}, {db}) exceed {MAX_QUESTION_DIM}"
        )));
    }
    let basis_a = question_basis(da);
    let basis_b = question_basis(db);
    let sa = transposed_basis_matrix(&basis_a, da);
    let sb = transposed_basis_matrix(&basis_b, db);

    // Realignment: R[(a a'), (b b')] = W[(a b), (a' b')], so that
    // X (x) Y maps to vec(X) vec(Y)^T and W maps to S_A beta S_B^T.
    let m = w.op.matrix();
    let realigned = CMatrix::from_fn(da * da, db * db, |r, c| {
        let (a, a2) = (r / da, r % da);
        let (b, b2) = (c / db, c % db);
        m[(a * db + b, a2 * db + b2)]
    });
    let lu_a = sa.lu();
    let partial = lu_a
        .solve(&realigned)
        .ok_or_else(|| Error::Solver("singular question basis on A0".into()))?;
    let lu_b = sb.lu();
    let beta_t = lu_b
        .solve(&partial.transpose())
        .ok_or_else(|| Error::Solver("singular question basis on B0".into()))?;
    let beta: DMatrix<C64> = beta_t.transpose();

    let mut raw = Vec::new();
    for j in 0..basis_a.len() {
        for k in 0..basis_b.len() {
            let b = beta[(j, k)];
            if b.im.abs() > 1e-9 {
                return Err(Error::Solver(format!("complex coefficient {b} for a Hermitian witness")));
            }
            if b.re.abs() > BETA_DROP_TOL {
                raw.push((j, k, b.re));
            }
        }
    }
    if raw.is_empty() {
        return Err(Error::Validation("witness has no nonzero product components".into()));
    }
    let l1: f64 = raw.iter().map(|t| t.2.abs()).sum();
    let la = SubsystemLayout::single(A0, da)?;
    let lb = SubsystemLayout::single(B0, db)?;
    let items = raw
        .into_iter()
        .map(|(j, k, b)| {
            Ok(Question {
                p: b.abs() / l1,
                beta: b,
                tau: QuantumOperator::new(la.clone(), basis_a[j].clone())?,
                omega: QuantumOperator::new(lb.clone(), basis_b[k].clone())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = QuestionEnsemble { items };
    let residual = reconstruct(&ensemble)?.max_abs_diff(&w.op);
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Solver(format!("decomposition residual {residual:e}")));
    }
    Ok(ensemble)
}

/// `sum_i beta_i tau_i^T (x) omega_i^T`.
pub fn reconstruct(ensemble: &QuestionEnsemble) -> Result<QuantumOperator> {
    let first = ensemble
        .items
        .first()
        .ok_or_else(|| Error::Validation("empty question ensemble".into()))?;
    let layout = first.tau.layout().concat(first.omega.layout())?;
    let n = layout.total_dim();
    let mut acc = CMatrix::zeros(n, n);
    for q in &ensemble.items {
        acc += qops::kron(&q.tau.matrix().transpose(), &q.omega.matrix().transpose()).scale(q.beta);
    }
    QuantumOperator::new(layout, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{eig_hermitian, StateVector};
    use approx::assert_abs_diff_eq;

    fn bell(sign_flip: bool, bit_flip: bool) -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sgn = if sign_flip { -s } else { s };
        let amps = if bit_flip {
            [0.0, s, sgn, 0.0]
        } else {
            [s, 0.0, 0.0, sgn]
        };
        let c: Vec<C64> = amps.iter().map(|&x| C64::new(x, 0.0)).collect();
        StateVector::from_slice(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap(), &c).unwrap()
    }

    fn w_de() -> Witness {
        decomposable_witness(&bell(true, true)).unwrap()
    }

    #[test]
    fn psi_minus_gives_two_phi_plus_minus_identity() {
        let expect = bell(false, false)
            .projector()
            .scaled(2.0)
            .sub(&QuantumOperator::identity(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap()))
            .unwrap();
        let w = w_de();
        assert!(w.op().max_abs_diff(&expect) < 1e-15);
        assert_abs_diff_eq!(w.op().trace().re, -2.0, epsilon = 1e-14);
        assert_eq!(w.kind(), WitnessKind::Decomposable);
        let eig = eig_hermitian(w.op()).unwrap();
        for (got, want) in eig.values.iter().zip([1.0, -1.0, -1.0, -1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_source_is_rejected() {
        let v = StateVector::basis(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap(), &[0, 0]).unwrap();
        assert!(matches!(decomposable_witness(&v), Err(Error::NotEntangled { rank: 1 })));
    }

    #[test]
    fn swap_witness_is_minus_swap() {
        let w = swap_witness(2).unwrap();
        let swap = CMatrix::from_fn(4, 4, |i, j| {
            if i / 2 == j % 2 && i % 2 == j / 2 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(qops::max_abs_diff(w.op().matrix(), &(-swap)) < 1e-15);
        assert_abs_diff_eq!(w.op().trace().re, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(evaluate(&w, &bell(true, true).projector()).unwrap(), 1.0, epsilon = 1e-14);
        assert!(swap_witness(1).is_err());
    }

    #[test]
    fn evaluate_bell_and_product() {
        let w = w_de();
        assert_abs_diff_eq!(evaluate(&w, &bell(false, false).projector()).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(evaluate(&w, &bell(true, false).projector()).unwrap(), -1.0, epsilon = 1e-14);
        let prod = StateVector::basis(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap(), &[0, 0]).unwrap();
        assert_abs_diff_eq!(evaluate(&w, &prod.projector()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_dim_mismatch() {
        let rho = QuantumOperator::maximally_mixed(SubsystemLayout::pair((A0, 2), (B0, 3)).unwrap());
        assert!(matches!(evaluate(&w_de(), &rho), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn block_negativity() {
        let r = is_block_negative_sampled(&w_de(), 1000, 3).unwrap();
        assert!(r.block_negative);
        assert!(r.worst >= -1e-9 && r.worst <= 1e-9);

        let id = QuantumOperator::identity(SubsystemLayout::pair((A0, 2), (B0, 2)).unwrap());
        let bad = Witness { op: id, d: 2, kind: WitnessKind::Generic, source: None };
        let r = is_block_negative_sampled(&bad, 10, 3).unwrap();
        assert!(!r.block_negative);
        assert_abs_diff_eq!(r.worst, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ensemble_reconstructs_witness() {
        let w = w_de();
        let e = decompose_product_ensemble(&w).unwrap();
        assert!(e.len() <= 16);
        let total: f64 = e.items().iter().map(|q| q.p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(reconstruct(&e).unwrap().max_abs_diff(w.op()) < 1e-9);
        // Real symmetric witness: the untransposed sum agrees too.
        let mut plain = CMatrix::zeros(4, 4);
        for q in e.items() {
            plain += qops::kron(q.tau.matrix(), q.omega.matrix()).scale(q.beta);
        }
        assert!(qops::max_abs_diff(&plain, w.op().matrix()) < 1e-9);
    }

    #[test]
    fn single_item_reconstruction() {
        let tau = QuantumOperator::maximally_mixed(SubsystemLayout::single(A0, 2).unwrap());
        let omega = QuantumOperator::maximally_mixed(SubsystemLayout::single(B0, 2).unwrap());
        let e = QuestionEnsemble::new(vec![Question { p: 1.0, beta: -2.0, tau: tau.clone(), omega: omega.clone() }])
            .unwrap();
        let expect = qops::tensor(&[&tau, &omega]).unwrap().scaled(-2.0);
        assert!(reconstruct(&e).unwrap().max_abs_diff(&expect) < 1e-15);
        assert!(QuestionEnsemble::new(vec![]).is_err());
    }

    #[test]
    fn question_basis_has_d_squared_states() {
        for d in 2..5 {
            let b = question_basis(d);
            assert_eq!(b.len(), d * d);
            for s in &b {
                assert_abs_diff_eq!(s.trace().re, 1.0, epsilon = 1e-15);
            }
        }
    }
}
