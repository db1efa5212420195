#![allow(dead_code)]

use sqgame::qops::{CMatrix, CVector, QuantumOperator, StateVector, SubsystemLayout, A, A0, B, B0, C64};
use sqgame::random::{haar_unitary, haar_vector, random_effect, StreamRng};
use sqgame::strategy::{matched_one_way, product, BellState, Strategy};
use sqgame::witness::{decomposable_witness, Witness};

pub fn w_de() -> Witness {
    decomposable_witness(&BellState::PsiMinus.vector(A0, B0)).unwrap()
}

pub fn op(labels: &[(&str, usize)], m: CMatrix) -> QuantumOperator {
    QuantumOperator::new(SubsystemLayout::new(labels.iter().map(|&(l, d)| (l, d))).unwrap(), m).unwrap()
}

/// Haar vector on two labelled slots (entangled with probability one).
pub fn entangled_vector(first: (&str, usize), second: (&str, usize), rng: &mut StreamRng) -> StateVector {
    let layout = SubsystemLayout::pair(first, second).unwrap();
    StateVector::new(layout, haar_vector(first.1 * second.1, rng)).unwrap()
}

pub fn random_witness(da: usize, db: usize, rng: &mut StreamRng) -> Witness {
    decomposable_witness(&entangled_vector((A0, da), (B0, db), rng)).unwrap()
}

pub fn random_product_strategy(da: usize, db: usize, rng: &mut StreamRng) -> Strategy {
    let p = op(&[(A, da), (A0, da)], random_effect(da * da, rng));
    let q = op(&[(B0, db), (B, db)], random_effect(db * db, rng));
    product(&p, &q).unwrap()
}

/// Alice measures a random orthonormal basis; Bob answers with random effects.
pub fn random_matched_strategy(da: usize, db: usize, rng: &mut StreamRng) -> Strategy {
    let u = haar_unitary(da * da, rng);
    let alice: Vec<QuantumOperator> = (0..da * da)
        .map(|k| {
            let v: CVector = u.column(k).into_owned();
            op(&[(A, da), (A0, da)], &v * v.adjoint())
        })
        .collect();
    let bob: Vec<QuantumOperator> = (0..da * da)
        .map(|_| op(&[(B0, db), (B, db)], random_effect(db * db, rng)))
        .collect();
    matched_one_way(&alice, &bob).unwrap()
}

pub fn random_strategy(da: usize, db: usize, rng: &mut StreamRng) -> Strategy {
    use rand::Rng;
    if rng.random::<bool>() {
        random_product_strategy(da, db, rng)
    } else {
        random_matched_strategy(da, db, rng)
    }
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
