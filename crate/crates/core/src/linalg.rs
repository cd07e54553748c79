//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Joint spaces are laid out as `system ⊗ ancilla` with the system index
//! slow: basis vector `|s⟩⊗|k⟩` sits at flat index `s * m + k`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::Tolerances;

pub type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

const MAX_JACOBI_SWEEPS: usize = 100;

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; rejects non-square or non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim.max(1)).take(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`; `self` carries the slow index.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = Matrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `Tr_a` over the fast (ancilla) factor of dimension `m`.
    pub fn partial_trace_ancilla(&self, d: usize, m: usize) -> Result<Matrix> {
        if d * m != self.dim {
            return Err(Error::DimensionMismatch { expected: d * m, got: self.dim });
        }
        Ok(Matrix::from_fn(d, |s, t| (0..m).map(|k| self[(s * m + k, t * m + k)]).sum()))
    }

    /// `(1_d ⊗ ⟨φ|) X (1_d ⊗ |φ⟩)`, equal to `Tr_a((1 ⊗ |φ⟩⟨φ|) X)`.
    pub fn compress_ancilla(&self, d: usize, program: &[C64]) -> Result<Matrix> {
        let m = program.len();
        if d * m != self.dim {
            return Err(Error::DimensionMismatch { expected: d * m, got: self.dim });
        }
        Ok(Matrix::from_fn(d, |s, t| {
            let mut acc = ZERO;
            for k in 0..m {
                let left = program[k].conj();
                if left == ZERO {
                    continue;
                }
                let row = (s * m + k) * self.dim + t * m;
                let inner: C64 = (0..m).map(|l| self.data[row + l] * program[l]).sum();
                acc += left * inner;
            }
            acc
        }))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix addition dimension mismatch");
        Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction dimension mismatch");
        Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Unit-norm complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose Euclidean norm is 1 within `arithmetic` tolerance.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::new_with_tol(amps, Tolerances::default().arithmetic)
    }

    pub fn new_with_tol(amps: Vec<C64>, tol: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("pure state of dimension 0".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vec_norm(&amps);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm <= 1e-300 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps: amps.into_iter().map(|z| z / norm).collect() })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        PureState { amps }
    }

    pub fn with_phase(&self, phase: f64) -> PureState {
        let w = C64::from_polar(1.0, phase);
        PureState { amps: self.amps.iter().map(|z| z * w).collect() }
    }

    pub fn projector(&self) -> HermitianOperator {
        let n = self.dim();
        HermitianOperator(Matrix::from_fn(n, |r, c| self.amps[r] * self.amps[c].conj()))
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalized vector of independent standard complex Gaussians, seeded.
pub fn random_pure_state(dim: usize, seed: u64) -> PureState {
    let mut rng = rng::seeded(seed);
    random_pure_state_from(&mut rng, dim)
}

pub fn random_pure_state_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    assert!(dim >= 1, "pure state dimension must be positive");
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| C64::new(rng::gaussian(rng), rng::gaussian(rng))).collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

/// Square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(Matrix);

impl HermitianOperator {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with_tol(m, Tolerances::default().arithmetic)
    }

    pub fn new_with_tol(m: Matrix, tol: f64) -> Result<Self> {
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { max_asymmetry: defect });
        }
        Ok(Self(m))
    }

    /// Wraps `m` after symmetrizing it as `(m + m†)/2`.
    pub fn hermitian_part(m: &Matrix) -> Self {
        Self(Matrix::from_fn(m.dim, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(Matrix::diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        HermitianOperator(self.0.scale_real(s))
    }

    pub fn expectation(&self, state: &PureState) -> f64 {
        inner(state.amplitudes(), &self.0.apply(state.amplitudes())).re
    }

    /// Kronecker product; `self` is the system (slow) factor.
    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        tensor(self, other)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(jacobi_eigen(&self.0, Tolerances::default().eig_residual)?.0)
    }

    pub fn op_norm(&self) -> Result<f64> {
        op_norm(self)
    }

    pub fn trace_norm(&self) -> Result<f64> {
        trace_norm(self)
    }
}

pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator(a.0.kron(&b.0))
}

pub fn partial_trace_ancilla(x: &HermitianOperator, d: usize, m: usize) -> Result<HermitianOperator> {
    Ok(HermitianOperator(x.0.partial_trace_ancilla(d, m)?))
}

/// Retained eigenpairs of a Hermitian operator, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<PureState>,
}

impl SpectralDecomposition {
    /// Number of retained terms `I`.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self, dim: usize) -> HermitianOperator {
        let mut acc = Matrix::zeros(dim);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let p = v.projector();
            acc = &acc + &p.0.scale_real(*lambda);
        }
        HermitianOperator(acc)
    }
}

/// Spectral decomposition keeping eigenpairs with `|λ| > cutoff`.
pub fn hermitian_eig(h: &HermitianOperator, cutoff: f64) -> Result<SpectralDecomposition> {
    hermitian_eig_with(h, cutoff, &Tolerances::default())
}

pub fn hermitian_eig_with(h: &HermitianOperator, cutoff: f64, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if cutoff < 0.0 {
        return Err(Error::InvalidArgument(format!("negative rank cutoff {cutoff}")));
    }
    let (values, vectors) = jacobi_eigen(&h.0, tol.eig_residual)?;
    let mut eigenvalues = Vec::new();
    let mut eigenvectors = Vec::new();
    for (lambda, v) in values.into_iter().zip(vectors) {
        if lambda.abs() > cutoff {
            eigenvalues.push(lambda);
            eigenvectors.push(PureState { amps: v });
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Largest absolute eigenvalue.
pub fn op_norm(h: &HermitianOperator) -> Result<f64> {
    Ok(h.eigenvalues()?.iter().fold(0.0f64, |acc, l| acc.max(l.abs())))
}

/// Sum of absolute eigenvalues (sum of singular values).
pub fn trace_norm(h: &HermitianOperator) -> Result<f64> {
    Ok(h.eigenvalues()?.iter().map(|l| l.abs()).sum())
}

/// Extreme eigenvalues `(min, max)`.
pub fn eig_extremes(h: &HermitianOperator) -> Result<(f64, f64)> {
    let values = h.eigenvalues()?;
    // descending order
    Ok((*values.last().unwrap_or(&0.0), *values.first().unwrap_or(&0.0)))
}

/// Cyclic complex Jacobi on a Hermitian matrix.
///
/// Returns eigenvalues sorted descending with matching unit eigenvectors.
/// Entries that are exactly zero stay zero, so block structure in the input
/// is preserved in the eigenvectors.
fn jacobi_eigen(h: &Matrix, residual_tol: f64) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = h.dim;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut a = HermitianOperator::hermitian_part(h).0;
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|i| (a[(i, i)].re, (0..n).map(|r| v[(r, i)]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut residual = 0.0;
    for (lambda, vec) in &pairs {
        let hv = h.apply(vec);
        residual += hv.iter().zip(vec).map(|(x, y)| (x - y * lambda).norm_sqr()).sum::<f64>();
    }
    let residual = residual.sqrt();
    if residual > residual_tol.max(1e-14 * scale) {
        return Err(Error::NoConvergence { sweeps, residual });
    }
    Ok(pairs.into_iter().unzip())
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let n = a.dim;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // e = a_pq / |a_pq|; the phase diag(1, conj e) makes the pivot real.
    let e = apq / b;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ec = e.conj();
    // W restricted to (p, q): [[c, s], [-s ē, c ē]]
    let w_pp = C64::new(c, 0.0);
    let w_pq = C64::new(s, 0.0);
    let w_qp = -ec * s;
    let w_qq = ec * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Ordered list of positive semidefinite operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

/// Outcome of [`validate_povm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmReport {
    pub min_eigenvalue: f64,
    pub identity_deviation: f64,
    pub valid: bool,
}

impl PovmReport {
    pub fn describe(&self, tol: f64) -> String {
        if self.min_eigenvalue < -tol {
            format!("positivity violated: minimum eigenvalue {:.3e}", self.min_eigenvalue)
        } else if self.identity_deviation > tol {
            format!("completeness violated: ||sum - I|| = {:.3e}", self.identity_deviation)
        } else {
            "valid".into()
        }
    }
}

/// Positivity and completeness check for a candidate POVM.
pub fn validate_povm(elements: &[HermitianOperator], tol: f64) -> Result<PovmReport> {
    let dim = elements.first().map(|e| e.dim()).unwrap_or(0);
    if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    let mut min_eigenvalue = f64::INFINITY;
    let mut sum = HermitianOperator::zeros(dim);
    for e in elements {
        let (lo, _) = eig_extremes(e)?;
        min_eigenvalue = min_eigenvalue.min(lo);
        sum = sum.add(e);
    }
    let identity_deviation = op_norm(&sum.sub(&HermitianOperator::identity(dim)))?;
    let valid = !elements.is_empty() && min_eigenvalue >= -tol && identity_deviation <= tol;
    Ok(PovmReport { min_eigenvalue, identity_deviation, valid })
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::new_with_tol(elements, Tolerances::default().povm)
    }

    pub fn new_with_tol(elements: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let report = validate_povm(&elements, tol)?;
        if !report.valid {
            return Err(Error::InvalidPovm(report.describe(tol)));
        }
        Ok(Self { dim: elements[0].dim(), elements })
    }

    /// Projective measurement onto the given orthonormal states.
    pub fn from_projectors(states: &[PureState]) -> Result<Self> {
        Self::new(states.iter().map(PureState::projector).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Born-rule outcome probabilities `tr(ρ P^j)` for a pure input.
    pub fn probabilities(&self, state: &PureState) -> Vec<f64> {
        self.elements.iter().map(|e| e.expectation(state)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(n: usize, seed: u64) -> HermitianOperator {
        let mut r = seeded(seed);
        let m = Matrix::from_fn(n, |_, _| c(rng::gaussian(&mut r), rng::gaussian(&mut r)));
        HermitianOperator::hermitian_part(&m)
    }

    fn random_matrix(n: usize, seed: u64) -> Matrix {
        let mut r = seeded(seed);
        Matrix::from_fn(n, |_, _| c(rng::gaussian(&mut r), rng::gaussian(&mut r)))
    }

    fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn tensor_identities() {
        let i6 = tensor(&HermitianOperator::identity(2), &HermitianOperator::identity(3));
        assert_eq!(i6, HermitianOperator::identity(6));
        let p = HermitianOperator::diag(&[1.0, 0.0]);
        assert_eq!(tensor(&p, &p), HermitianOperator::diag(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_matches_index_loop_on_product_vectors() {
        let a = random_matrix(3, 1);
        let b = random_matrix(4, 2);
        let u = random_pure_state(3, 3);
        let v = random_pure_state(4, 4);
        let lhs = a.kron(&b).apply(u.tensor(&v).amplitudes());
        let au = a.apply(u.amplitudes());
        let bv = b.apply(v.amplitudes());
        // (Au)⊗(Bv) by explicit double loop
        let mut rhs = vec![ZERO; 12];
        for i in 0..3 {
            for k in 0..4 {
                rhs[i * 4 + k] = au[i] * bv[k];
            }
        }
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_product_and_identity() {
        let a = random_hermitian(2, 5);
        let b = random_hermitian(3, 6);
        let pt = partial_trace_ancilla(&tensor(&a, &b), 2, 3).unwrap();
        let expected = a.scale(b.trace());
        assert!(max_abs_diff(pt.matrix(), expected.matrix()) < 1e-12);

        let pt = partial_trace_ancilla(&HermitianOperator::identity(6), 2, 3).unwrap();
        assert_eq!(pt, HermitianOperator::identity(2).scale(3.0));
    }

    #[test]
    fn partial_trace_matches_contraction_oracle() {
        let (d, m) = (3, 4);
        let x = random_hermitian(d * m, 7);
        let pt = partial_trace_ancilla(&x, d, m).unwrap();
        // oracle: sum_k (1⊗⟨k|) x (1⊗|k⟩) via explicit embedding vectors
        let mut oracle = Matrix::zeros(d);
        for k in 0..m {
            for s in 0..d {
                for t in 0..d {
                    let mut es = vec![ZERO; d * m];
                    let mut et = vec![ZERO; d * m];
                    es[s * m + k] = ONE;
                    et[t * m + k] = ONE;
                    oracle[(s, t)] += inner(&es, &x.matrix().apply(&et));
                }
            }
        }
        assert!(max_abs_diff(pt.matrix(), &oracle) < 1e-12);
        assert!((pt.trace() - x.trace()).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let x = HermitianOperator::identity(6);
        assert!(matches!(partial_trace_ancilla(&x, 4, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compress_matches_partial_trace_of_product() {
        let (d, m) = (2, 3);
        let f = random_hermitian(d * m, 8);
        let phi = random_pure_state(m, 9);
        let sigma = phi.projector();
        let joint = &tensor(&HermitianOperator::identity(d), &sigma).0 * f.matrix();
        let via_trace = joint.partial_trace_ancilla(d, m).unwrap();
        let via_compress = f.matrix().compress_ancilla(d, phi.amplitudes()).unwrap();
        assert!(max_abs_diff(&via_trace, &via_compress) < 1e-12);
    }

    #[test]
    fn eig_diagonal_and_pauli_x() {
        let sd = hermitian_eig(&HermitianOperator::diag(&[1.0, 3.0]), 1e-10).unwrap();
        assert_eq!(sd.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(sd.eigenvectors[0], PureState::basis(2, 1));
        assert_eq!(sd.eigenvectors[1], PureState::basis(2, 0));

        let x = HermitianOperator::new(Matrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()).unwrap();
        let sd = hermitian_eig(&x, 1e-10).unwrap();
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] + 1.0).abs() < 1e-14);
        let plus = PureState::new(vec![c(1.0, 0.0) / 2f64.sqrt(), c(1.0, 0.0) / 2f64.sqrt()]).unwrap();
        assert!((sd.eigenvectors[0].inner(&plus).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_random_12_reconstructs() {
        let h = random_hermitian(12, 10);
        let sd = hermitian_eig(&h, 0.0).unwrap();
        assert_eq!(sd.rank(), 12);
        let rec = sd.reconstruct(12);
        assert!(op_norm(&rec.sub(&h)).unwrap() <= 1e-10);
        for i in 0..12 {
            for j in 0..12 {
                let ov = sd.eigenvectors[i].inner(&sd.eigenvectors[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ov - c(want, 0.0)).norm() < 1e-10);
            }
        }
        let sum: f64 = sd.eigenvalues.iter().sum();
        assert!((sum - h.trace()).abs() < 1e-10);
        assert!(sd.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_cutoff_drops_null_space() {
        let p = random_pure_state(5, 11).projector();
        let sd = hermitian_eig(&p, 1e-10).unwrap();
        assert_eq!(sd.rank(), 1);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(hermitian_eig(&p, -1.0).is_err());
    }

    #[test]
    fn norms_of_simple_operators() {
        let h = HermitianOperator::diag(&[2.0, -3.0]);
        assert_eq!(op_norm(&h).unwrap(), 3.0);
        assert_eq!(trace_norm(&h).unwrap(), 5.0);
        let z = PureState::basis(2, 0).projector().sub(&PureState::basis(2, 1).projector());
        assert_eq!(op_norm(&z).unwrap(), 1.0);
        assert_eq!(trace_norm(&z).unwrap(), 2.0);
    }

    #[test]
    fn norm_sandwich_random() {
        for seed in 0..50 {
            let n = 1 + (seed as usize % 7);
            let h = random_hermitian(n, 100 + seed);
            let (op, tr) = (op_norm(&h).unwrap(), trace_norm(&h).unwrap());
            assert!(tr / n as f64 <= op + 1e-12);
            assert!(op <= tr + 1e-12);
        }
    }

    #[test]
    fn povm_validation() {
        let z = Povm::from_projectors(&[PureState::basis(2, 0), PureState::basis(2, 1)]);
        assert!(z.is_ok());
        let half = HermitianOperator::identity(2).scale(0.5);
        assert!(Povm::new(vec![half.clone(), half]).is_ok());

        let p = HermitianOperator::diag(&[1.1, 0.0]);
        let q = HermitianOperator::identity(2).sub(&p);
        let report = validate_povm(&[p.clone(), q.clone()], 1e-9).unwrap();
        assert!(!report.valid);
        assert!((report.min_eigenvalue + 0.1).abs() < 1e-12);
        assert!(matches!(Povm::new(vec![p, q]), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn random_pure_state_contract() {
        let s = random_pure_state(1, 42);
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
        assert_eq!(random_pure_state(5, 3), random_pure_state(5, 3));
        assert_ne!(random_pure_state(5, 3), random_pure_state(5, 4));
    }

    #[test]
    fn haar_overlap_mean_is_one_over_dim() {
        // E|⟨φ|0⟩|² = 1/4 and Var = 1/(d(d+1)) - 1/d² for Haar states in d = 4
        let n = 10_000;
        let mut r = seeded(2024);
        let samples: Vec<f64> = (0..n).map(|_| random_pure_state_from(&mut r, 4).amplitudes()[0].norm_sqr()).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn rejects_non_hermitian_and_unnormalized() {
        let m = Matrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
        assert!(matches!(PureState::new(vec![ONE, ONE]), Err(Error::NotNormalized { .. })));
        assert!(matches!(Matrix::from_rows(&[vec![c(f64::NAN, 0.0)]]), Err(Error::NonFinite)));
    }
}
