//! Dense complex matrices and states at the small fixed dimensions used here.
//!
//! Everything is row-major. Tensor products put the left factor's index
//! first, so for a qubit ⊗ qutrit pair the basis state |j⟩|k⟩ sits at
//! index `3 * j + k`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for Hermiticity and unitarity checks on constructed operators.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Largest imaginary residue accepted from an expectation value.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Squared-norm tolerance accepted for input states.
pub const NORM_TOL: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        ComplexMatrix::from_entries(raw.rows, raw.cols, raw.entries)
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Column vector as an `len × 1` matrix.
    pub fn column(v: &[Complex64]) -> Self {
        ComplexMatrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    /// Outer product |v⟩⟨v|.
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix product; panics on incompatible shapes (use [`try_matmul`]
    /// where shapes come from user input).
    ///
    /// [`try_matmul`]: ComplexMatrix::try_matmul
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_matmul(rhs).expect("incompatible matrix shapes")
    }

    pub fn try_matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Integer power of a square matrix; `pow(0)` is the identity.
    pub fn pow(&self, exp: u32) -> ComplexMatrix {
        assert!(self.is_square(), "pow of non-square matrix");
        (0..exp).fold(Self::identity(self.rows), |acc, _| acc.matmul(self))
    }

    /// Largest absolute entrywise difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.matmul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= STRUCTURE_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= STRUCTURE_TOL
    }

    /// `M² = I` within `tol`.
    pub fn is_involution(&self, tol: f64) -> bool {
        self.is_square() && self.matmul(self).approx_eq(&Self::identity(self.rows), tol)
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &self.matmul(other) - &other.matmul(self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &mut self.entries[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`, `a`'s index major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = s * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// |⟨a|b⟩|, the fidelity between two pure states up to global phase.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm()
}

/// ⟨ψ|op|ψ⟩ for a Hermitian `op`.
pub fn expectation(state: &[Complex64], op: &ComplexMatrix) -> Result<f64> {
    let deviation = op.hermiticity_deviation();
    if deviation > STRUCTURE_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let z = inner(state, &op.apply(state)?);
    if z.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Pure state of a qubit ⊗ qutrit pair; amplitude `c_jk` at index `3j + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct JointState([Complex64; 6]);

impl JointState {
    pub const DIM: usize = 6;

    /// Validates normalization to [`NORM_TOL`].
    pub fn new(amplitudes: [Complex64; 6]) -> Result<Self> {
        let norm_sqr = norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(JointState(amplitudes))
    }

    /// Rescales to unit norm. Fails only on the zero vector.
    pub fn normalized(amplitudes: [Complex64; 6]) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        Ok(JointState(amplitudes.map(|z| z / n)))
    }

    /// Computational basis state |j⟩|k⟩.
    pub fn basis(j: usize, k: usize) -> Result<Self> {
        if j > 1 {
            return Err(Error::IndexOutOfRange {
                index: j as i64,
                len: 2,
            });
        }
        if k > 2 {
            return Err(Error::IndexOutOfRange {
                index: k as i64,
                len: 3,
            });
        }
        let mut amps = [ZERO; 6];
        amps[3 * j + k] = ONE;
        Ok(JointState(amps))
    }

    /// Amplitude `c_jk`.
    pub fn amp(&self, j: usize, k: usize) -> Complex64 {
        self.0[3 * j + k]
    }

    pub fn amplitudes(&self) -> &[Complex64; 6] {
        &self.0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let amps: [Complex64; 6] = std::array::from_fn(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            if let Ok(s) = JointState::normalized(amps) {
                return s;
            }
        }
    }
}

impl TryFrom<Vec<Complex64>> for JointState {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        let arr: [Complex64; 6] = v.try_into().map_err(|v: Vec<_>| Error::DimensionMismatch {
            expected: 6,
            found: v.len(),
        })?;
        JointState::new(arr)
    }
}

impl From<JointState> for Vec<Complex64> {
    fn from(s: JointState) -> Self {
        s.0.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_real(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(
            &d.iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn identity_tensor_identity() {
        let t = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(t, ComplexMatrix::identity(6));
    }

    #[test]
    fn z_tensor_identity_is_block_sign() {
        let t = tensor(&diag_real(&[1.0, -1.0]), &ComplexMatrix::identity(3));
        assert_eq!(t, diag_real(&[1.0, 1.0, 1.0, -1.0, -1.0, -1.0]));
    }

    #[test]
    fn tensor_is_associative() {
        let a = ComplexMatrix::from_entries(2, 2, vec![ONE, I, -I, ONE * 2.0]).unwrap();
        let b = ComplexMatrix::from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        let c = ComplexMatrix::from_entries(2, 1, vec![I, ONE]).unwrap();
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        assert!(left.approx_eq(&right, 0.0));
    }

    #[test]
    fn basis_indexing_matches_convention() {
        let s = JointState::basis(1, 2).unwrap();
        assert_eq!(s.as_slice()[5], ONE);
        assert_eq!(s.amp(1, 2), ONE);
        assert!(JointState::basis(2, 0).is_err());
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let s = JointState::normalized([ONE, I, ONE * 0.3, -I, ONE, ONE]).unwrap();
        let e = expectation(s.as_slice(), &ComplexMatrix::identity(6)).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let v = [ONE, ZERO];
        assert!(matches!(
            expectation(&v, &m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn expectation_rejects_dimension_mismatch() {
        let v = [ONE, ZERO];
        assert!(matches!(
            expectation(&v, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn identity_checks() {
        let id = ComplexMatrix::identity(3);
        assert!(id.is_hermitian());
        assert!(id.is_unitary());
    }

    #[test]
    fn joint_state_rejects_unnormalized() {
        assert!(matches!(
            JointState::new([ONE, ONE, ZERO, ZERO, ZERO, ZERO]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(JointState::normalized([ZERO; 6]).is_err());
    }

    #[test]
    fn matrix_json_shape() {
        let m = ComplexMatrix::from_entries(1, 2, vec![ONE, I]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"rows":1,"cols":2,"entries":[[1.0,0.0],[0.0,1.0]]}"#
        );
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn pow_and_commutator() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(x.pow(0), ComplexMatrix::identity(2));
        assert_eq!(x.pow(2), ComplexMatrix::identity(2));
        assert!(x.commutator(&x).approx_eq(&ComplexMatrix::zeros(2, 2), 0.0));
    }
}
