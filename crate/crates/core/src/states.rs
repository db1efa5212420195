//! Named two-party states on `[A, B]`.

use crate::error::{Error, Result};
use crate::qops::{self, CMatrix, QuantumOperator, StateVector, SubsystemLayout, A, B};
use crate::strategy::BellState;

pub fn bell(which: BellState) -> QuantumOperator {
    which.vector(A, B).projector()
}

/// `v |Phi+><Phi+| + (1 - v) I / 4`.
pub fn werner(v: f64) -> Result<QuantumOperator> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Validation(format!("Werner visibility {v} outside [0, 1]")));
    }
    let mixed = QuantumOperator::maximally_mixed(SubsystemLayout::pair((A, 2), (B, 2))?);
    bell(BellState::PhiPlus).scaled(v).add(&mixed.scaled(1.0 - v))
}

/// Maximally entangled `d x d` state.
pub fn maxent(d: usize) -> Result<QuantumOperator> {
    if d < 1 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    Ok(StateVector::maximally_entangled(SubsystemLayout::pair((A, d), (B, d))?)?.projector())
}

/// Parse `bell:phi+`, `werner:0.5`, `maxent:3`.
pub fn builtin(spec: &str) -> Result<QuantumOperator> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Validation(format!("`{spec}` is not a built-in state")))?;
    match kind {
        "bell" => Ok(bell(arg.parse()?)),
        "werner" => werner(
            arg.parse()
                .map_err(|_| Error::Validation(format!("bad Werner visibility `{arg}`")))?,
        ),
        "maxent" => maxent(
            arg.parse()
                .map_err(|_| Error::Validation(format!("bad dimension `{arg}`")))?,
        ),
        _ => Err(Error::Validation(format!("unknown built-in family `{kind}`"))),
    }
}

fn check_complete(kraus: &[CMatrix], d: usize, side: &str) -> Result<()> {
    let mut sum = CMatrix::zeros(d, d);
    for k in kraus {
        if k.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("{side} Kraus operator has shape {:?}, need {d}x{d}", k.shape())));
        }
        sum += k.adjoint() * k;
    }
    let defect = qops::max_abs_diff(&sum, &CMatrix::identity(d, d));
    if defect > 1e-9 {
        return Err(Error::Validation(format!("{side} Kraus set is not trace preserving ({defect:e})")));
    }
    Ok(())
}

/// `(Λ_A (x) Λ_B)(rho)` for channels given by complete Kraus sets.
pub fn apply_local_channel(rho: &QuantumOperator, kraus_a: &[CMatrix], kraus_b: &[CMatrix]) -> Result<QuantumOperator> {
    let dims = rho.layout().dims();
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch("local channels act on two-slot states".into()));
    }
    check_complete(kraus_a, dims[0], "first")?;
    check_complete(kraus_b, dims[1], "second")?;
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for ka in kraus_a {
        for kb in kraus_b {
            let f = qops::kron(ka, kb);
            out += &f * rho.matrix() * f.adjoint();
        }
    }
    QuantumOperator::new(rho.layout().clone(), qops::hermitize(&out))
}

/// Ginibre-random state on `[A, B]` of the given rank.
pub fn random_state<R: rand::Rng + ?Sized>(da: usize, db: usize, rank: usize, rng: &mut R) -> Result<QuantumOperator> {
    QuantumOperator::new(SubsystemLayout::pair((A, da), (B, db))?, crate::random::random_density(da * db, rank, rng))
}
