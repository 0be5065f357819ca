//! Dense complex matrix algebra for small quantum systems.
//!
//! Everything here is dense: tensor products, partial traces, Hermitian
//! spectral calculus and a few structural predicates (hollow / diagonal)
//! used by the zero-response checks. Hermitian eigendecomposition is the only
//! route to matrix functions, so exponentials, logarithms and propagators all
//! share one numerical source.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance on `max|M - M^dagger| / max|M|` for a declared Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on trace and eigenvalue positivity of a density matrix.
pub const STATE_TOL: f64 = 1e-12;
/// Default floor applied to eigenvalues before taking a logarithm.
pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-14;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Dense square complex matrix with a declared Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    hermitian: bool,
}

impl Operator {
    /// General square operator; the Hermitian hint is off.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self {
            mat,
            hermitian: false,
        })
    }

    /// Square operator declared Hermitian. Inputs outside [`HERMITIAN_TOL`] are
    /// rejected, never symmetrized.
    pub fn hermitian(mat: CMatrix) -> Result<Self> {
        let op = Self::new(mat)?;
        op.into_hermitian()
    }

    /// Validates the Hermiticity of `self` and sets the hint.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub(crate) fn from_parts(mat: CMatrix, hermitian: bool) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat, hermitian }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_parts(CMatrix::identity(dim, dim), true)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_parts(CMatrix::zeros(dim, dim), true)
    }

    /// Real diagonal operator.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        Self::from_parts(CMatrix::from_diagonal(&d), true)
    }

    /// Row-major real entries.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rows.len(),
            });
        }
        Self::new(CMatrix::from_fn(dim, dim, |i, j| c(rows[i * dim + j])))
    }

    /// Projector `|v><v|`.
    pub fn projector(v: &CVector) -> Self {
        Self::from_parts(v * v.adjoint(), true)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// `max|M - M^dagger| / max|M|`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut defect = 0.0_f64;
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        defect / scale
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        if self.hermitian {
            if let Ok(eig) = hermitian_eig(self) {
                return eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            }
        }
        self.mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0_f64, |a, &v| a.max(v))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.mat.adjoint(), self.hermitian)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts(&self.mat * c(s), self.hermitian)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self::from_parts(&self.mat * s, self.hermitian && s.im == 0.0)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.mat * v
    }

    /// `U^dagger M U`, expressing `self` in the basis given by the columns of `u`.
    pub fn to_basis(&self, u: &Operator) -> Operator {
        Self::from_parts(u.mat.adjoint() * &self.mat * &u.mat, self.hermitian)
    }

    /// `U M U^dagger`, the inverse of [`Operator::to_basis`].
    pub fn from_basis(&self, u: &Operator) -> Operator {
        Self::from_parts(&u.mat * &self.mat * u.mat.adjoint(), self.hermitian)
    }

    fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_parts(
            &self.mat + &other.mat,
            self.hermitian && other.hermitian,
        ))
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_parts(
            &self.mat - &other.mat,
            self.hermitian && other.hermitian,
        ))
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_parts(&self.mat * &other.mat, false))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Accepts amplitudes whose Euclidean norm is 1 within [`STATE_TOL`].
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if amps.is_empty() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "state vector norm {norm} differs from 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self { amps: amps / c(norm) })
    }

    /// Trajectory samples may carry a small, reported norm drift.
    pub(crate) fn unchecked(amps: CVector) -> Self {
        Self { amps }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index: index + 1,
                max: dim,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0);
        Ok(Self { amps: v })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_operator_unchecked(Operator::projector(&self.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amps.dotc(&other.amps).norm_sqr()
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
        }
    }
}

/// Positive semi-definite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and non-negativity (all within [`STATE_TOL`]).
    pub fn new(op: Operator) -> Result<Self> {
        let op = if op.is_hermitian() {
            op
        } else {
            op.into_hermitian()?
        };
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eig(&op)?;
        if let Some(&min) = eig.values.first() {
            if min < -STATE_TOL {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { op })
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self {
            op: Operator::from_parts(op.mat, true),
        }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_operator_unchecked(Operator::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn purity(&self) -> f64 {
        (&self.op.mat * &self.op.mat).trace().re
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_operator_unchecked(kron(&self.op, &other.op))
    }
}

/// Either kind of quantum state.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(p) => p.dim(),
            QuantumState::Mixed(m) => m.dim(),
        }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(p) => p.projector(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        QuantumState::Pure(p)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(m: DensityMatrix) -> Self {
        QuantumState::Mixed(m)
    }
}

/// Which factor of a bipartition to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Tensor factorization `d = d_a * d_b`; A is the leading (slow) index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartitePartition {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartitePartition {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::Partition { d_a, d_b, dim: 0 });
        }
        Ok(Self { d_a, d_b })
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Partition {
                d_a: self.d_a,
                d_b: self.d_b,
                dim,
            });
        }
        Ok(())
    }

    pub fn kept_dim(&self, keep: Subsystem) -> usize {
        match keep {
            Subsystem::A => self.d_a,
            Subsystem::B => self.d_b,
        }
    }
}

/// Kronecker product: entry `(i*d_b + k, j*d_b + l) = a[i,j] * b[k,l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator::from_parts(a.mat.kronecker(&b.mat), a.hermitian && b.hermitian)
}

/// Partial trace of an arbitrary operator on `d_a * d_b`.
pub fn partial_trace_op(
    m: &Operator,
    part: BipartitePartition,
    keep: Subsystem,
) -> Result<Operator> {
    part.check(m.dim())?;
    let (da, db) = (part.d_a, part.d_b);
    let mat = &m.mat;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| mat[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| mat[(i * db + k, i * db + l)]).sum()
        }),
    };
    Ok(Operator::from_parts(out, m.hermitian))
}

/// Reduced density matrix; trace and positivity are preserved.
pub fn partial_trace(
    rho: &DensityMatrix,
    part: BipartitePartition,
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let op = partial_trace_op(&rho.op, part, keep)?;
    Ok(DensityMatrix::from_operator_unchecked(op))
}

/// `AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.check_same_dim(b)?;
    Ok(Operator::from_parts(
        &a.mat * &b.mat - &b.mat * &a.mat,
        false,
    ))
}

/// Spectral decomposition `H = V diag(values) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.mat.column(i).into_owned()
    }

    /// `V f(diag) V^dagger`.
    pub fn apply_real(&self, f: impl Fn(f64) -> f64) -> Operator {
        let d = DVector::from_iterator(self.dim(), self.values.iter().map(|&l| c(f(l))));
        let v = &self.vectors.mat;
        Operator::from_parts(v * CMatrix::from_diagonal(&d) * v.adjoint(), true)
    }

    pub fn reconstruct(&self) -> Operator {
        self.apply_real(|l| l)
    }

    /// Distinct eigenvalues with multiplicities; values closer than `tol` are merged.
    pub fn multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((last, n)) if (v - *last).abs() <= tol => *n += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Smallest gap between consecutive eigenvalues (infinite for dimension 1).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigendecomposition of an operator declared Hermitian.
pub fn hermitian_eig(h: &Operator) -> Result<Eigen> {
    if !h.hermitian {
        return Err(Error::NotHermitian {
            defect: h.hermiticity_defect(),
        });
    }
    let n = h.dim();
    let se = SymmetricEigen::new(h.mat.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| se.eigenvectors[(r, order[k])]);
    Ok(Eigen {
        values,
        vectors: Operator::from_parts(vectors, false),
    })
}

/// Real scalar functions lifted to Hermitian operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Exp,
    Log,
    Power(f64),
}

/// Result of a spectral matrix function; `floored` counts eigenvalues raised
/// to the spectral floor before a logarithm.
#[derive(Clone, Debug)]
pub struct SpectralFunction {
    pub op: Operator,
    pub floored: usize,
}

/// Applies `f` on the eigenvalues of `h` and rotates back.
///
/// For [`MatrixFunction::Log`] every eigenvalue is first replaced by
/// `max(lambda, spectral_floor)`; the number of replaced eigenvalues is
/// reported. With `spectral_floor <= 0` a non-positive eigenvalue is an error.
pub fn matrix_func_hermitian(
    h: &Operator,
    f: MatrixFunction,
    spectral_floor: f64,
) -> Result<SpectralFunction> {
    let eig = hermitian_eig(h)?;
    let mut floored = 0;
    let values: Vec<f64> = match f {
        MatrixFunction::Exp => eig.values.iter().map(|l| l.exp()).collect(),
        MatrixFunction::Log => {
            let mut out = Vec::with_capacity(eig.dim());
            for &l in &eig.values {
                if l < spectral_floor || l <= 0.0 {
                    if spectral_floor <= 0.0 {
                        let count = eig.values.iter().filter(|&&v| v <= 0.0).count();
                        return Err(Error::SingularSpectrum { floored: count });
                    }
                    floored += 1;
                    out.push(spectral_floor.ln());
                } else {
                    out.push(l.ln());
                }
            }
            out
        }
        MatrixFunction::Power(p) => {
            let mut out = Vec::with_capacity(eig.dim());
            for &l in &eig.values {
                let v = l.powf(p);
                if !v.is_finite() {
                    return Err(Error::Numerical(format!(
                        "eigenvalue {l} has no real power {p}"
                    )));
                }
                out.push(v);
            }
            out
        }
    };
    let d = DVector::from_iterator(values.len(), values.into_iter().map(c));
    let v = &eig.vectors.mat;
    let op = Operator::from_parts(v * CMatrix::from_diagonal(&d) * v.adjoint(), true);
    Ok(SpectralFunction { op, floored })
}

/// `tr(rho O)`.
pub fn expectation(o: &Operator, rho: &DensityMatrix) -> Result<C64> {
    o.check_same_dim(&rho.op)?;
    Ok(trace_product(&rho.op.mat, &o.mat))
}

/// `tr(A B)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// All diagonal entries vanish relative to the largest entry.
pub fn is_hollow(m: &Operator, tol: f64) -> bool {
    let scale = m.max_abs();
    let diag = (0..m.dim()).fold(0.0_f64, |a, i| a.max(m.mat[(i, i)].norm()));
    diag <= tol * scale
}

/// All off-diagonal entries vanish relative to the largest entry.
pub fn is_diagonal(m: &Operator, tol: f64) -> bool {
    let scale = m.max_abs();
    let n = m.dim();
    let mut off = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(m.mat[(i, j)].norm());
            }
        }
    }
    off <= tol * scale
}

/// Pauli matrices in the basis `(|0>, |1>)`.
pub mod pauli {
    use super::{c, CMatrix, Operator, C64};

    pub fn x() -> Operator {
        Operator::from_parts(CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]), true)
    }

    pub fn y() -> Operator {
        let i = C64::new(0.0, 1.0);
        Operator::from_parts(CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]), true)
    }

    pub fn z() -> Operator {
        Operator::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn identity() -> Operator {
        Operator::identity(2)
    }
}
