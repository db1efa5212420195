//! Reading command inputs: a path to a JSON file, or a built-in name.

use std::fs;
use std::path::Path;

use sqgame::json;
use sqgame::qops::{QuantumOperator, StateVector, SubsystemLayout, A, A0, B, B0};
use sqgame::states;
use sqgame::strategy::{self, BellState, IDENTITY_PAIRING, TWISTED_PAIRING};
use sqgame::witness::{decomposable_witness, swap_witness};
use sqgame::{Error, Game, Result, Strategy, Witness};

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read `{path}`: {e}")))
}

/// Files win over built-in names, so a file literally called `bell:phi+` still loads.
fn builtin_name(arg: &str) -> Option<(&str, &str)> {
    if Path::new(arg).exists() {
        None
    } else {
        arg.split_once(':')
    }
}

fn parse_dim(arg: &str) -> Result<usize> {
    arg.parse()
        .map_err(|_| Error::Validation(format!("bad dimension `{arg}`")))
}

pub fn state(arg: &str) -> Result<QuantumOperator> {
    match builtin_name(arg) {
        Some(_) => states::builtin(arg),
        None => json::state_from_str(&read(arg)?),
    }
}

/// Source vector on the question slots.
pub fn source_vector(arg: &str) -> Result<StateVector> {
    match builtin_name(arg) {
        Some(("bell", which)) => Ok(which.parse::<BellState>()?.vector(A0, B0)),
        Some(("maxent", d)) => {
            let d = parse_dim(d)?;
            StateVector::maximally_entangled(SubsystemLayout::pair((A0, d), (B0, d))?)
        }
        Some((kind, _)) => Err(Error::Validation(format!("unknown built-in vector family `{kind}`"))),
        None => json::vector_from_str(&read(arg)?)?.normalized(),
    }
}

pub fn witness(arg: &str) -> Result<Witness> {
    match builtin_name(arg) {
        Some(("swap", d)) => swap_witness(parse_dim(d)?),
        Some(_) => decomposable_witness(&source_vector(arg)?),
        None => json::witness_from_str(&read(arg)?),
    }
}

pub fn game(arg: &str) -> Result<Game> {
    match builtin_name(arg) {
        Some(_) => Game::from_witness(&witness(arg)?),
        None => json::game_from_str(&read(arg)?),
    }
}

fn uniform(d: usize, full: bool) -> Result<Strategy> {
    let a = SubsystemLayout::pair((A, d), (A0, d))?;
    let b = SubsystemLayout::pair((B0, d), (B, d))?;
    if full {
        strategy::product(&QuantumOperator::identity(a), &QuantumOperator::identity(b))
    } else {
        strategy::product(&QuantumOperator::zeros(a), &QuantumOperator::zeros(b))
    }
}

pub fn strategy(arg: &str) -> Result<Strategy> {
    match builtin_name(arg) {
        Some(("bell-matched", "identity")) => strategy::bell_matched(IDENTITY_PAIRING),
        Some(("bell-matched", "twisted")) => strategy::bell_matched(TWISTED_PAIRING),
        Some(("identity", d)) => uniform(parse_dim(d)?, true),
        Some(("never", d)) => uniform(parse_dim(d)?, false),
        Some((kind, _)) => Err(Error::Validation(format!("unknown built-in strategy `{kind}`"))),
        None => json::strategy_from_str(&read(arg)?),
    }
}

/// Relabel a state's two slots onto `[A, B]`.
pub fn shared(rho: &QuantumOperator) -> Result<QuantumOperator> {
    if rho.layout().len() != 2 {
        return Err(Error::DimensionMismatch("shared state must have two slots".into()));
    }
    rho.with_labels(&[A, B])
}
