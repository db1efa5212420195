//! Semiquantum witnessing games.
//!
//! The referee draws question `i` with probability `p_i`, sends `tau_i` to
//! Alice and `omega_i` to Bob, and pays `reward11[i]` only when both answer 1.

use crate::error::{Error, Result};
use crate::qops::{self, permute_subsystems, tensor, QuantumOperator, A, A0, B, B0, CANONICAL};
use crate::strategy::Strategy;
use crate::witness::{decompose_product_ensemble, QuestionEnsemble, Witness};

pub const REWARD_TOL: f64 = 1e-12;
pub const PROBABILITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    witness: Witness,
    ensemble: QuestionEnsemble,
    reward11: Vec<f64>,
}

impl Game {
    pub fn from_witness(w: &Witness) -> Result<Self> {
        let ensemble = decompose_product_ensemble(w)?;
        let reward11 = ensemble.items().iter().map(|q| q.beta / q.p).collect();
        Ok(Self { witness: w.clone(), ensemble, reward11 })
    }

    pub fn from_parts(witness: Witness, ensemble: QuestionEnsemble, reward11: Vec<f64>) -> Result<Self> {
        ensemble.validate()?;
        if reward11.len() != ensemble.len() {
            return Err(Error::Validation(format!(
                "{} rewards for {} questions",
                reward11.len(),
                ensemble.len()
            )));
        }
        for (i, (q, r)) in ensemble.items().iter().zip(&reward11).enumerate() {
            if (r * q.p - q.beta).abs() > REWARD_TOL {
                return Err(Error::Validation(format!("reward {i} does not match beta/p")));
            }
        }
        Ok(Self { witness, ensemble, reward11 })
    }

    pub fn witness(&self) -> &Witness {
        &self.witness
    }

    pub fn ensemble(&self) -> &QuestionEnsemble {
        &self.ensemble
    }

    pub fn reward11(&self) -> &[f64] {
        &self.reward11
    }

    pub fn len(&self) -> usize {
        self.reward11.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reward11.is_empty()
    }

    /// `℘(x, y | i)`: nonzero only for `(1, 1)`.
    pub fn reward(&self, i: usize, x: u8, y: u8) -> f64 {
        if x == 1 && y == 1 {
            self.reward11[i]
        } else {
            0.0
        }
    }

    /// Question dimensions `(d_A0, d_B0)`.
    pub fn dims(&self) -> (usize, usize) {
        self.witness.question_dims()
    }
}

/// Relabel a two-slot state onto `[A, B]` and check it is a density matrix.
pub fn shared_state(rho: &QuantumOperator) -> Result<QuantumOperator> {
    if rho.layout().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "shared state must have two slots, got {:?}",
            rho.layout().labels()
        )));
    }
    let rho = rho.with_labels(&[A, B])?;
    rho.validate_state()?;
    Ok(rho)
}

fn check_dims(dims: (usize, usize), rho: &QuantumOperator, strategy: &Strategy) -> Result<()> {
    let want = vec![dims.0, rho.layout().dims()[0], rho.layout().dims()[1], dims.1];
    if strategy.z11().layout().dims() != want {
        return Err(Error::DimensionMismatch(format!(
            "strategy acts on {:?}, game and state need {want:?}",
            strategy.z11().layout().dims()
        )));
    }
    Ok(())
}

fn checked_probability(p: f64) -> Result<f64> {
    if !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&p) {
        return Err(Error::InvalidEffect(format!("outcome probability {p} outside [0, 1]")));
    }
    Ok(p)
}

fn question_state(game: &Game, rho: &QuantumOperator, i: usize) -> Result<QuantumOperator> {
    let q = game
        .ensemble
        .items()
        .get(i)
        .ok_or_else(|| Error::Validation(format!("question {i} out of range")))?;
    let tau = q.tau.with_labels(&[A0])?;
    let omega = q.omega.with_labels(&[B0])?;
    tensor(&[&tau, rho, &omega])
}

/// Born-rule probability of answers `(x, y)` to question `i`. Only `(1, 1)`
/// and `(0, 0)` occur: the latter carries the complement `I - Z11`.
pub fn outcome_probability(
    game: &Game,
    rho: &QuantumOperator,
    strategy: &Strategy,
    i: usize,
    x: u8,
    y: u8,
) -> Result<f64> {
    let rho = shared_state(rho)?;
    check_dims(game.dims(), &rho, strategy)?;
    let joint = question_state(game, &rho, i)?;
    let p11 = checked_probability(strategy.z11().trace_product(&joint)?.re)?;
    Ok(match (x, y) {
        (1, 1) => p11,
        (0, 0) => 1.0 - p11,
        _ => 0.0,
    })
}

/// Probability of answer `(1, 1)` for every question, in ensemble order.
pub fn win_probabilities(game: &Game, rho: &QuantumOperator, strategy: &Strategy) -> Result<Vec<f64>> {
    let rho = shared_state(rho)?;
    check_dims(game.dims(), &rho, strategy)?;
    (0..game.len())
        .map(|i| {
            let joint = question_state(game, &rho, i)?;
            checked_probability(strategy.z11().trace_product(&joint)?.re)
        })
        .collect()
}

/// `sum_i p_i reward11(i) Pr(1, 1 | i)`.
pub fn average_reward(game: &Game, rho: &QuantumOperator, strategy: &Strategy) -> Result<f64> {
    let probs = win_probabilities(game, rho, strategy)?;
    Ok(game
        .ensemble
        .items()
        .iter()
        .zip(&game.reward11)
        .zip(&probs)
        .map(|((q, r), pr)| q.p * r * pr)
        .sum())
}

/// `W^Θ (x) rho` in canonical order, where `Θ` transposes both question slots.
pub fn witness_state_operator(w: &Witness, rho: &QuantumOperator) -> Result<QuantumOperator> {
    let rho = shared_state(rho)?;
    let wt = w.transposed();
    permute_subsystems(&tensor(&[&wt, &rho])?, &CANONICAL)
}

/// `Tr[Z11 (W^Θ (x) rho)]`.
pub fn payoff_via_witness(w: &Witness, rho: &QuantumOperator, strategy: &Strategy) -> Result<f64> {
    let m = witness_state_operator(w, rho)?;
    if m.layout() != strategy.z11().layout() {
        return Err(Error::DimensionMismatch(format!(
            "strategy acts on {:?}, witness and state need {:?}",
            strategy.z11().layout().dims(),
            m.layout().dims()
        )));
    }
    Ok(qops::trace_of_product(strategy.z11().matrix(), m.matrix()).re)
}
