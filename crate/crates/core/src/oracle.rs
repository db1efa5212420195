//! Independent reference computations used to check the optimizers.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{shared_state, witness_state_operator};
use crate::optimize::PPT_TOL;
use crate::qops::{
    self, eig_hermitian, partial_transpose, permute_subsystems, CMatrix, QuantumOperator, StateVector,
    SubsystemLayout, A, A0, B, B0,
};
use crate::random::{dirichlet_uniform, haar_unitary, haar_vector, random_effect, stream};
use crate::witness::{decomposable_witness, evaluate, Witness};

pub const MAJORIZATION_TOL: f64 = 1e-9;

fn pt_eigen(rho: &QuantumOperator) -> Result<qops::HermitianEigen> {
    let rho = shared_state(rho)?;
    eig_hermitian(&partial_transpose(&rho, &[B])?.hermitized())
}

pub fn ppt_min_eigenvalue(rho: &QuantumOperator) -> Result<f64> {
    Ok(pt_eigen(rho)?.min())
}

/// Sum of `|lambda|` over partial-transpose eigenvalues below `-PPT_TOL`.
pub fn negativity(rho: &QuantumOperator) -> Result<f64> {
    Ok(pt_eigen(rho)?
        .values
        .iter()
        .filter(|&&l| l < -PPT_TOL)
        .map(|l| -l)
        .sum())
}

/// Decomposable witness from the most negative partial-transpose
/// eigenvector, with its detection value `Tr(V rho) = D |lambda_min|`.
pub fn optimal_decomposable_witness(rho: &QuantumOperator) -> Result<(Witness, f64)> {
    let rho = shared_state(rho)?;
    let eig = pt_eigen(&rho)?;
    if eig.min() >= -PPT_TOL {
        return Err(Error::NoDetection(format!(
            "partial transpose is positive (min eigenvalue {:e})",
            eig.min()
        )));
    }
    let dims = rho.layout().dims();
    let layout = SubsystemLayout::pair((A0, dims[0]), (B0, dims[1]))?;
    let phi = StateVector::new(layout, eig.vector(eig.values.len() - 1))?.normalized()?;
    let v = decomposable_witness(&phi)?;
    let value = evaluate(&v, &rho.with_labels(&[A0, B0])?)?;
    Ok((v, value))
}

/// `sum_i p_i |a_i><a_i| (x) |b_i><b_i|` with Haar factors and Dirichlet weights.
pub fn sample_separable(da: usize, db: usize, terms: usize, seed: u64) -> Result<QuantumOperator> {
    if terms == 0 {
        return Err(Error::Validation("need at least one product term".into()));
    }
    let layout = SubsystemLayout::pair((A, da), (B, db))?;
    let mut rng = stream(seed, 0);
    let weights = dirichlet_uniform(terms, &mut rng);
    let mut rho = CMatrix::zeros(da * db, da * db);
    for p in weights {
        let v = haar_vector(da, &mut rng).kronecker(&haar_vector(db, &mut rng));
        rho += (&v * v.adjoint()).scale(p);
    }
    QuantumOperator::new(layout, qops::hermitize(&rho))
}

/// Largest reward over `trials` random strategies: even trials are random
/// product effects, odd trials a random orthonormal-basis measurement for
/// Alice with random effects for Bob on every branch.
pub fn brute_force_payoff(w: &Witness, rho: &QuantumOperator, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    let m = permute_subsystems(&witness_state_operator(w, rho)?, &[A, A0, B0, B])?;
    let d = m.layout().dims();
    let (da, db) = (d[0] * d[1], d[2] * d[3]);
    let m = m.into_matrix();
    let values = map_indexed(trials, Execution::Auto, |t| {
        let mut rng = stream(seed, t as u64);
        let z = if t % 2 == 0 {
            qops::kron(&random_effect(da, &mut rng), &random_effect(db, &mut rng))
        } else {
            let u = haar_unitary(da, &mut rng);
            let mut z = CMatrix::zeros(da * db, da * db);
            for k in 0..da {
                let v = u.column(k);
                z += qops::kron(&(&v * v.adjoint()), &random_effect(db, &mut rng));
            }
            z
        };
        qops::trace_of_product(&z, &m).re
    });
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn check_distribution(x: &[f64], name: &str) -> Result<()> {
    let s: f64 = x.iter().sum();
    if (s - 1.0).abs() > MAJORIZATION_TOL || x.iter().any(|&v| v < -MAJORIZATION_TOL) {
        return Err(Error::NotNormalized { deviation: (s - 1.0).abs() })
            .map_err(|e| Error::Validation(format!("{name}: {e}")));
    }
    Ok(())
}

/// Whether `x` is majorized by `y`: every partial sum of descending-sorted
/// `x` is at most the matching partial sum of `y`.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    check_distribution(x, "x")?;
    check_distribution(y, "y")?;
    let n = x.len().max(y.len());
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.resize(n, 0.0);
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (xs, ys) = (sorted(x), sorted(y));
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx > sy + MAJORIZATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
