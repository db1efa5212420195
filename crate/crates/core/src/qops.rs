//! Dense multipartite operator algebra.
//!
//! Every operator carries a [`SubsystemLayout`]: an ordered list of labeled
//! tensor factors. Basis indices are row-major over that list, so the first
//! subsystem is the most significant digit. All four-party operators in this
//! crate are held in the canonical order `[A0, A, B, B0]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-10;
pub const RANK_TOL: f64 = 1e-12;
pub const MAX_SIDE: usize = 4096;

pub const A0: &str = "A0";
pub const A: &str = "A";
pub const B: &str = "B";
pub const B0: &str = "B0";

/// Canonical four-party order.
pub const CANONICAL: [&str; 4] = [A0, A, B, B0];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubsystemLayout {
    entries: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<Subsystem> = Vec::new();
        for (label, dim) in entries {
            let label = label.into();
            if dim == 0 {
                return Err(Error::Validation(format!("subsystem `{label}` has dimension 0")));
            }
            if out.iter().any(|s| s.label == label) {
                return Err(Error::LayoutConflict(format!("duplicate label `{label}`")));
            }
            out.push(Subsystem { label, dim });
        }
        let layout = Self { entries: out };
        if layout.total_dim() > MAX_SIDE {
            return Err(Error::Validation(format!(
                "total dimension {} exceeds cap {MAX_SIDE}",
                layout.total_dim()
            )));
        }
        Ok(layout)
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn pair(left: (&str, usize), right: (&str, usize)) -> Result<Self> {
        Self::new([left, right])
    }

    pub fn entries(&self) -> &[Subsystem] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|s| s.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|k| self.entries[k].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .chain(other.entries.iter())
                .map(|s| (s.label.clone(), s.dim)),
        )
    }

    /// Same dimensions, new labels.
    pub fn relabeled(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "relabel with {} labels on a {}-party layout",
                labels.len(),
                self.len()
            )));
        }
        Self::new(labels.iter().zip(self.entries.iter()).map(|(l, s)| (*l, s.dim)))
    }

    fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.position(l).ok_or_else(|| Error::UnknownLabel(l.to_string())))
            .collect()
    }

    /// Digits of every basis index, row-major.
    fn digit_table(&self) -> Vec<Vec<usize>> {
        let dims = self.dims();
        let n = self.total_dim();
        (0..n)
            .map(|mut idx| {
                let mut digits = vec![0; dims.len()];
                for k in (0..dims.len()).rev() {
                    digits[k] = idx % dims[k];
                    idx /= dims[k];
                }
                digits
            })
            .collect()
    }
}

fn compose_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// Dense square operator on a labeled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumOperator {
    layout: SubsystemLayout,
    data: CMatrix,
}

impl QuantumOperator {
    pub fn new(layout: SubsystemLayout, data: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, layout requires {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { layout, data })
    }

    pub fn identity(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, data: CMatrix::identity(n, n) }
    }

    pub fn zeros(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, data: CMatrix::zeros(n, n) }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim() as f64;
        Self::identity(layout).scaled(1.0 / n)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn with_labels(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self { layout: self.layout.relabeled(labels)?, data: self.data.clone() })
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn dagger(&self) -> Self {
        Self { layout: self.layout.clone(), data: self.data.adjoint() }
    }

    /// Full transpose on every subsystem.
    pub fn transpose(&self) -> Self {
        Self { layout: self.layout.clone(), data: self.data.transpose() }
    }

    pub fn conjugate(&self) -> Self {
        Self { layout: self.layout.clone(), data: self.data.map(|z| z.conj()) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { layout: self.layout.clone(), data: self.data.scale(s) }
    }

    fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(format!(
                "layouts differ: {:?} vs {:?}",
                self.layout.labels(),
                other.layout.labels()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(Self { layout: self.layout.clone(), data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(Self { layout: self.layout.clone(), data: &self.data - &other.data })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(Self { layout: self.layout.clone(), data: &self.data * &other.data })
    }

    /// `Tr(self · other)`, requiring identical layouts.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_layout(other)?;
        Ok(trace_of_product(&self.data, &other.data))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.data)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < HERMITIAN_TOL
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect < HERMITIAN_TOL {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect })
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.data)
    }

    /// Hermitian, PSD within [`PSD_TOL`], unit trace within 1e-10.
    pub fn validate_state(&self) -> Result<()> {
        self.require_hermitian()?;
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let eig = eig_hermitian(self)?;
        let min = eig.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `0 <= E <= I` within [`PSD_TOL`].
    pub fn validate_effect(&self) -> Result<()> {
        self.require_hermitian()?;
        let eig = eig_hermitian(self)?;
        let (lo, hi) = (eig.min(), eig.max());
        if lo < -PSD_TOL || hi > 1.0 + PSD_TOL {
            return Err(Error::InvalidEffect(format!(
                "spectrum [{lo:e}, {hi}] is outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// Hermitian part `(H + H^dagger)/2`.
    pub fn hermitized(&self) -> Self {
        Self { layout: self.layout.clone(), data: hermitize(&self.data) }
    }
}

pub fn trace_of_product(x: &CMatrix, y: &CMatrix) -> C64 {
    // sum_ij x_ij y_ji
    let n = x.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

pub fn max_abs_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    if x.shape() != y.shape() {
        return f64::INFINITY;
    }
    x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(x: &CMatrix) -> f64 {
    let n = x.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()).scale(0.5)
}

pub(crate) fn operator_norm(x: &CMatrix) -> f64 {
    x.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn kron(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

/// Kronecker product in the given order. Labels must be pairwise disjoint.
pub fn tensor(factors: &[&QuantumOperator]) -> Result<QuantumOperator> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Validation("tensor of an empty factor list".into()))?;
    let mut layout = first.layout.clone();
    let mut data = first.data.clone();
    for f in iter {
        layout = layout.concat(&f.layout)?;
        data = kron(&data, &f.data);
    }
    QuantumOperator::new(layout, data)
}

/// Map from new basis index to old basis index when reordering subsystems.
fn permutation_map(layout: &SubsystemLayout, new_order: &[&str]) -> Result<(SubsystemLayout, Vec<usize>)> {
    if new_order.len() != layout.len() {
        return Err(Error::UnknownLabel(format!(
            "order {:?} is not a permutation of {:?}",
            new_order,
            layout.labels()
        )));
    }
    let perm = layout.positions_of(new_order)?;
    let new_layout = SubsystemLayout::new(perm.iter().map(|&k| {
        let s = &layout.entries[k];
        (s.label.clone(), s.dim)
    }))?;
    let old_dims = layout.dims();
    let table = new_layout.digit_table();
    let mut old_digits = vec![0; perm.len()];
    let map = table
        .iter()
        .map(|nd| {
            for (k, &p) in perm.iter().enumerate() {
                old_digits[p] = nd[k];
            }
            compose_index(&old_digits, &old_dims)
        })
        .collect();
    Ok((new_layout, map))
}

/// Reorder tensor factors. The result is the same operator expressed in the
/// reordered basis.
pub fn permute_subsystems(op: &QuantumOperator, new_order: &[&str]) -> Result<QuantumOperator> {
    let (layout, map) = permutation_map(&op.layout, new_order)?;
    let n = map.len();
    let data = CMatrix::from_fn(n, n, |i, j| op.data[(map[i], map[j])]);
    Ok(QuantumOperator { layout, data })
}

/// Trace out every subsystem not in `keep`. The remaining subsystems keep their
/// relative order. An empty `keep` yields a 1x1 operator holding the trace.
pub fn partial_trace(op: &QuantumOperator, keep: &[&str]) -> Result<QuantumOperator> {
    for l in keep {
        if !op.layout.contains(l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    let kept: Vec<usize> = (0..op.layout.len())
        .filter(|&k| keep.contains(&op.layout.entries[k].label.as_str()))
        .collect();
    let traced: Vec<usize> = (0..op.layout.len()).filter(|k| !kept.contains(k)).collect();
    let dims = op.layout.dims();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let layout = SubsystemLayout::new(kept.iter().map(|&k| {
        let s = &op.layout.entries[k];
        (s.label.clone(), s.dim)
    }))?;

    // Split every full index into (kept index, traced index).
    let table = op.layout.digit_table();
    let split: Vec<(usize, usize)> = table
        .iter()
        .map(|d| {
            let kd: Vec<usize> = kept.iter().map(|&k| d[k]).collect();
            let td: Vec<usize> = traced.iter().map(|&k| d[k]).collect();
            (compose_index(&kd, &kept_dims), compose_index(&td, &traced_dims))
        })
        .collect();
    let nt: usize = traced_dims.iter().product();
    let nk = layout.total_dim();
    let mut by_traced: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nt];
    for (full, &(k, t)) in split.iter().enumerate() {
        by_traced[t].push((k, full));
    }
    let mut data = CMatrix::zeros(nk, nk);
    for group in &by_traced {
        for &(ki, fi) in group {
            for &(kj, fj) in group {
                data[(ki, kj)] += op.data[(fi, fj)];
            }
        }
    }
    QuantumOperator::new(layout, data)
}

/// Transpose the listed subsystems, leaving the rest untouched.
pub fn partial_transpose(op: &QuantumOperator, on: &[&str]) -> Result<QuantumOperator> {
    let positions = op.layout.positions_of(on)?;
    let dims = op.layout.dims();
    let table = op.layout.digit_table();
    let n = op.dim();
    let mut data = CMatrix::zeros(n, n);
    let mut ri = vec![0; dims.len()];
    let mut rj = vec![0; dims.len()];
    for i in 0..n {
        for j in 0..n {
            ri.copy_from_slice(&table[i]);
            rj.copy_from_slice(&table[j]);
            for &p in &positions {
                std::mem::swap(&mut ri[p], &mut rj[p]);
            }
            data[(i, j)] = op.data[(compose_index(&ri, &dims), compose_index(&rj, &dims))];
        }
    }
    QuantumOperator::new(op.layout.clone(), data)
}

/// Eigendecomposition of a Hermitian operator, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &l) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (&v * v.adjoint()).scale(l);
        }
        out
    }
}

pub(crate) fn eig_matrix(x: &CMatrix) -> HermitianEigen {
    let h = hermitize(x);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = x.nrows();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

pub fn eig_hermitian(op: &QuantumOperator) -> Result<HermitianEigen> {
    op.require_hermitian()?;
    Ok(eig_matrix(&op.data))
}

/// Eigenvalues below this are treated as non-positive when forming projectors.
const POSITIVE_CUTOFF: f64 = 1e-14;

pub(crate) fn positive_projector_matrix(x: &CMatrix) -> (CMatrix, f64) {
    let eig = eig_matrix(x);
    let n = x.nrows();
    let mut proj = CMatrix::zeros(n, n);
    let mut weight = 0.0;
    for (k, &l) in eig.values.iter().enumerate() {
        if l > POSITIVE_CUTOFF {
            let v = eig.vectors.column(k);
            proj += &v * v.adjoint();
            weight += l;
        }
    }
    (proj, weight)
}

/// Projector onto the positive eigenspace and the sum of positive eigenvalues.
/// The projector maximises `Tr(E·op)` over effects `0 <= E <= I`.
pub fn positive_part(op: &QuantumOperator) -> Result<(QuantumOperator, f64)> {
    op.require_hermitian()?;
    let (proj, weight) = positive_projector_matrix(&op.data);
    Ok((QuantumOperator::new(op.layout.clone(), proj)?, weight))
}

/// Pure state on a labeled tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    data: CVector,
}

impl StateVector {
    pub fn new(layout: SubsystemLayout, data: CVector) -> Result<Self> {
        if data.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, layout requires {}",
                data.len(),
                layout.total_dim()
            )));
        }
        Ok(Self { layout, data })
    }

    pub fn from_slice(layout: SubsystemLayout, amplitudes: &[C64]) -> Result<Self> {
        Self::new(layout, CVector::from_column_slice(amplitudes))
    }

    /// Computational basis vector `|digits>`.
    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        let dims = layout.dims();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(Error::Validation(format!("basis digits {digits:?} out of range {dims:?}")));
        }
        let mut v = CVector::zeros(layout.total_dim());
        v[compose_index(digits, &dims)] = C64::new(1.0, 0.0);
        Self::new(layout, v)
    }

    /// `sum_i |ii> / sqrt(D)` over the smaller of two factors.
    pub fn maximally_entangled(layout: SubsystemLayout) -> Result<Self> {
        let dims = layout.dims();
        if dims.len() != 2 {
            return Err(Error::Validation("maximally entangled vector needs two subsystems".into()));
        }
        let d = dims[0].min(dims[1]);
        let mut v = CVector::zeros(layout.total_dim());
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[i * dims[1] + i] = amp;
        }
        Self::new(layout, v)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn vector(&self) -> &CVector {
        &self.data
    }

    pub fn with_labels(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self { layout: self.layout.relabeled(labels)?, data: self.data.clone() })
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn require_normalized(&self) -> Result<()> {
        let deviation = (self.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            Err(Error::NotNormalized { deviation })
        } else {
            Ok(())
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Ok(Self { layout: self.layout.clone(), data: self.data.unscale(n) })
    }

    /// `|v><v|`.
    pub fn projector(&self) -> QuantumOperator {
        QuantumOperator { layout: self.layout.clone(), data: &self.data * self.data.adjoint() }
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Self::new(layout, self.data.kronecker(&other.data))
    }

    pub fn permuted(&self, new_order: &[&str]) -> Result<Self> {
        let (layout, map) = permutation_map(&self.layout, new_order)?;
        let data = CVector::from_fn(map.len(), |i, _| self.data[map[i]]);
        Ok(Self { layout, data })
    }
}

/// Schmidt decomposition `sum_i c_i |l_i> (x) |r_i>`.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<CVector>,
    pub right_basis: Vec<CVector>,
    pub left_layout: SubsystemLayout,
    pub right_layout: SubsystemLayout,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > RANK_TOL).count()
    }

    /// Squared coefficients.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn reconstruct(&self) -> CVector {
        let n = self.left_layout.total_dim() * self.right_layout.total_dim();
        let mut out = CVector::zeros(n);
        for (k, &c) in self.coefficients.iter().enumerate() {
            out += self.left_basis[k].kronecker(&self.right_basis[k]).scale(c);
        }
        out
    }
}

pub fn schmidt_decompose(vec: &StateVector, left: &[&str], right: &[&str]) -> Result<SchmidtForm> {
    vec.require_normalized()?;
    let order: Vec<&str> = left.iter().chain(right.iter()).copied().collect();
    let v = vec.permuted(&order)?;
    let left_layout = SubsystemLayout::new(left.iter().map(|l| (l.to_string(), v.layout.dim_of(l).unwrap())))?;
    let right_layout = SubsystemLayout::new(right.iter().map(|l| (l.to_string(), v.layout.dim_of(l).unwrap())))?;
    let (dl, dr) = (left_layout.total_dim(), right_layout.total_dim());
    // Row-major reshape: amplitude of |l>|r> sits at l*dr + r.
    let m = CMatrix::from_fn(dl, dr, |i, j| v.data[i * dr + j]);
    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Solver("SVD did not return U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Solver("SVD did not return V^T".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left_basis = order.iter().map(|&k| u.column(k).into_owned()).collect();
    // M = U S V^dagger, so the right vectors are the rows of V^dagger.
    let right_basis = order
        .iter()
        .map(|&k| CVector::from_fn(dr, |j, _| v_t[(k, j)]))
        .collect();
    Ok(SchmidtForm { coefficients, left_basis, right_basis, left_layout, right_layout })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn two_qubits(l: &str, r: &str) -> SubsystemLayout {
        SubsystemLayout::pair((l, 2), (r, 2)).unwrap()
    }

    fn phi_plus() -> StateVector {
        StateVector::maximally_entangled(two_qubits(A, B)).unwrap()
    }

    fn swap4() -> CMatrix {
        CMatrix::from_fn(4, 4, |i, j| {
            let (a, b) = (i / 2, i % 2);
            let (c2, d) = (j / 2, j % 2);
            if a == d && b == c2 {
                c(1.0)
            } else {
                c(0.0)
            }
        })
    }

    #[test]
    fn tensor_identities() {
        let ia = QuantumOperator::identity(SubsystemLayout::single(A, 2).unwrap());
        let ib = QuantumOperator::identity(SubsystemLayout::single(B, 2).unwrap());
        let t = tensor(&[&ia, &ib]).unwrap();
        assert_eq!(t.layout().labels(), vec![A, B]);
        assert_eq!(t.matrix(), &CMatrix::identity(4, 4));

        let i3 = QuantumOperator::identity(SubsystemLayout::single(B, 3).unwrap());
        assert_eq!(tensor(&[&ia, &i3]).unwrap().dim(), 6);
    }

    #[test]
    fn tensor_rejects_duplicate_labels() {
        let ia = QuantumOperator::identity(SubsystemLayout::single(A, 2).unwrap());
        assert!(matches!(tensor(&[&ia, &ia]), Err(Error::LayoutConflict(_))));
    }

    #[test]
    fn canonical_tensor_order() {
        let tau = QuantumOperator::maximally_mixed(SubsystemLayout::single(A0, 2).unwrap());
        let omega = QuantumOperator::maximally_mixed(SubsystemLayout::single(B0, 2).unwrap());
        let rho = phi_plus().projector();
        let joint = tensor(&[&tau, &rho, &omega]).unwrap();
        assert_eq!(joint.layout().labels(), CANONICAL.to_vec());
    }

    #[test]
    fn permute_swaps_basis_labels() {
        let ket01 = StateVector::basis(two_qubits(A, B), &[0, 1]).unwrap();
        let swapped = permute_subsystems(&ket01.projector(), &[B, A]).unwrap();
        let ket10 = StateVector::basis(two_qubits(B, A), &[1, 0]).unwrap();
        assert_eq!(swapped, ket10.projector());
        let back = permute_subsystems(&swapped, &[A, B]).unwrap();
        assert_eq!(back, ket01.projector());
    }

    #[test]
    fn permute_unknown_label() {
        let op = QuantumOperator::identity(two_qubits(A, B));
        assert!(matches!(permute_subsystems(&op, &[A, "C"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let r = partial_trace(&phi_plus().projector(), &[A]).unwrap();
        assert!(r.max_abs_diff(&QuantumOperator::maximally_mixed(SubsystemLayout::single(A, 2).unwrap())) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = QuantumOperator::new(
            SubsystemLayout::single(A, 2).unwrap(),
            CMatrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]),
        )
        .unwrap();
        let rb = QuantumOperator::maximally_mixed(SubsystemLayout::single(B, 3).unwrap());
        let joint = tensor(&[&ra, &rb]).unwrap();
        assert!(partial_trace(&joint, &[A]).unwrap().max_abs_diff(&ra) < 1e-15);
        let scalar = partial_trace(&joint, &[]).unwrap();
        assert_eq!(scalar.dim(), 1);
        assert_abs_diff_eq!(scalar.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_transpose_of_bell_is_half_swap() {
        let pt = partial_transpose(&phi_plus().projector(), &[B]).unwrap();
        assert!(max_abs_diff(pt.matrix(), &swap4().scale(0.5)) < 1e-15);
        let twice = partial_transpose(&pt, &[B]).unwrap();
        assert_eq!(twice, phi_plus().projector());
    }

    #[test]
    fn eigen_values_of_bell_partial_transpose() {
        let pt = partial_transpose(&phi_plus().projector(), &[B]).unwrap();
        let eig = eig_hermitian(&pt).unwrap();
        for (got, want) in eig.values.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(max_abs_diff(&eig.reconstruct(), pt.matrix()) < 1e-10);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let op = QuantumOperator::new(
            two_qubits(A, B),
            CMatrix::from_fn(4, 4, |i, j| if i < j { c(1.0) } else { c(0.0) }),
        )
        .unwrap();
        assert!(matches!(eig_hermitian(&op), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn positive_part_cases() {
        let l = two_qubits(A, B);
        let (p, w) = positive_part(&QuantumOperator::identity(l.clone()).scaled(-1.0)).unwrap();
        assert_eq!(w, 0.0);
        assert!(p.max_abs_diff(&QuantumOperator::zeros(l.clone())) < 1e-15);

        let i2 = QuantumOperator::identity(SubsystemLayout::single(A, 2).unwrap());
        let (p, w) = positive_part(&i2).unwrap();
        assert_abs_diff_eq!(w, 2.0, epsilon = 1e-14);
        assert!(p.max_abs_diff(&i2) < 1e-14);

        let w_de = phi_plus().projector().scaled(2.0).sub(&QuantumOperator::identity(l)).unwrap();
        let (p, w) = positive_part(&w_de).unwrap();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-12);
        assert!(p.max_abs_diff(&phi_plus().projector()) < 1e-12);
    }

    #[test]
    fn schmidt_cases() {
        let s = schmidt_decompose(&phi_plus(), &[A], &[B]).unwrap();
        assert_abs_diff_eq!(s.coefficients[0], 0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.coefficients[1], 0.5f64.sqrt(), epsilon = 1e-14);
        assert_eq!(s.rank(), 2);

        let prod = StateVector::basis(two_qubits(A, B), &[0, 0]).unwrap();
        let s = schmidt_decompose(&prod, &[A], &[B]).unwrap();
        assert_abs_diff_eq!(s.coefficients[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coefficients[1], 0.0, epsilon = 1e-14);
        assert_eq!(s.rank(), 1);

        let v = StateVector::from_slice(two_qubits(A, B), &[c(0.8f64.sqrt()), c(0.0), c(0.0), c(0.2f64.sqrt())]).unwrap();
        let s = schmidt_decompose(&v, &[A], &[B]).unwrap();
        assert_abs_diff_eq!(s.coefficients[0], 0.8f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.coefficients[1], 0.2f64.sqrt(), epsilon = 1e-14);
        assert!((s.reconstruct() - v.vector()).norm() < 1e-12);
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let v = StateVector::from_slice(two_qubits(A, B), &[c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert!(matches!(schmidt_decompose(&v, &[A], &[B]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn layout_cap() {
        assert!(SubsystemLayout::new([("X", 64), ("Y", 65)]).is_err());
        assert!(SubsystemLayout::new([("X", 64), ("Y", 64)]).is_ok());
    }
}
