//! The n-cycle KCBS vectors and observables, Alice's XZ-plane rotations, and
//! the closed-form operators built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, STRUCTURE_TOL};

/// Involution tolerance for observables assembled from several products.
pub const INVOLUTION_TOL: f64 = 1e-10;

/// Constants derived from an odd cycle size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleGeometry {
    pub n: usize,
    /// cos(π/n)
    pub c: f64,
    /// sin(π/2n)
    pub s2: f64,
    /// cos(π/2n)
    pub c2: f64,
    /// (n−1)/2
    pub m: usize,
    /// Doubly degenerate eigenvalue of the cyclic KCBS operator.
    pub lambda1: f64,
    /// Top eigenvalue of the cyclic KCBS operator (the Lovász number of C_n).
    pub lambda3: f64,
}

impl CycleGeometry {
    pub fn new(n: usize) -> Result<Self> {
        validate_cycle(n)?;
        let nf = n as f64;
        let c = (PI / nf).cos();
        let half = PI / (2.0 * nf);
        Ok(CycleGeometry {
            n,
            c,
            s2: half.sin(),
            c2: half.cos(),
            m: (n - 1) / 2,
            lambda1: nf * (1.0 - c) / (1.0 + c),
            lambda3: nf * (3.0 * c - 1.0) / (1.0 + c),
        })
    }

    /// (−1)^m as a float.
    pub fn parity_m(&self) -> f64 {
        if self.m.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// 4(−1)^m s₂ − 2
    pub fn s_minus(&self) -> f64 {
        4.0 * self.parity_m() * self.s2 - 2.0
    }

    /// 4(−1)^m s₂ + 2
    pub fn s_plus(&self) -> f64 {
        4.0 * self.parity_m() * self.s2 + 2.0
    }

    /// Noncontextual bound n − 2.
    pub fn classical_bound(&self) -> f64 {
        self.n as f64 - 2.0
    }
}

pub fn cycle_geometry(n: usize) -> Result<CycleGeometry> {
    CycleGeometry::new(n)
}

pub(crate) fn validate_cycle(n: usize) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidCycle(n as i64));
    }
    Ok(())
}

fn validate_index(n: usize, j: usize) -> Result<()> {
    if j >= n {
        return Err(Error::IndexOutOfRange {
            index: j as i64,
            len: n,
        });
    }
    Ok(())
}

/// A labelled Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub label: String,
    pub matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Observable {
            label: label.into(),
            matrix,
        })
    }

    /// Hermitian and squaring to the identity, i.e. spectrum in {±1}.
    pub fn is_dichotomic(&self) -> bool {
        self.matrix.is_hermitian() && self.matrix.is_involution(INVOLUTION_TOL)
    }

    pub fn product(&self, rhs: &Observable) -> Result<Observable> {
        Observable::new(
            format!("{}{}", self.label, rhs.label),
            self.matrix.try_matmul(&rhs.matrix)?,
        )
    }
}

/// Unit vector |ψ_j⟩ = [cos θ_j, sin θ_j, √c] / √(1+c) with θ_j = j(n−1)π/n.
pub fn kcbs_vector(n: usize, j: usize) -> Result<[Complex64; 3]> {
    let g = CycleGeometry::new(n)?;
    validate_index(n, j)?;
    // reduce j(n−1) mod 2n before scaling so large j stays exact
    let steps = (j * (n - 1)) % (2 * n);
    let theta = steps as f64 * PI / n as f64;
    let norm = (1.0 + g.c).sqrt();
    Ok([
        Complex64::new(theta.cos() / norm, 0.0),
        Complex64::new(theta.sin() / norm, 0.0),
        Complex64::new(g.c.sqrt() / norm, 0.0),
    ])
}

/// B_j = (−1)^j (2|ψ_j⟩⟨ψ_j| − I).
pub fn kcbs_observable(n: usize, j: usize) -> Result<Observable> {
    let v = kcbs_vector(n, j)?;
    let reflection = &ComplexMatrix::projector(&v).scale_real(2.0) - &ComplexMatrix::identity(3);
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    Observable::new(format!("B_{j}"), reflection.scale_real(sign))
}

/// B_j B_{j+1 mod n}, the compatible pair measured in context `j`.
pub fn kcbs_pair(n: usize, j: usize) -> Result<Observable> {
    let a = kcbs_observable(n, j)?;
    let b = kcbs_observable(n, (j + 1) % n)?;
    a.product(&b)
}

/// Closed form of B₀.
pub fn b0_closed_form(n: usize) -> Result<Observable> {
    let g = CycleGeometry::new(n)?;
    let c = g.c;
    let d = 1.0 + c;
    let off = 2.0 * c.sqrt() / d;
    let m = ComplexMatrix::from_real(
        3,
        3,
        &[
            (1.0 - c) / d,
            0.0,
            off,
            0.0,
            -1.0,
            0.0,
            off,
            0.0,
            (c - 1.0) / d,
        ],
    )?;
    Observable::new("B_0", m)
}

/// Closed form of B_m B_{m+1}, m = (n−1)/2.
pub fn bm_bm1_closed_form(n: usize) -> Result<Observable> {
    let g = CycleGeometry::new(n)?;
    let c = g.c;
    let d = 1.0 + c;
    let off = 4.0 * g.parity_m() * g.s2 * c.sqrt() / d;
    let m = ComplexMatrix::from_real(
        3,
        3,
        &[
            (1.0 - 3.0 * c) / d,
            0.0,
            off,
            0.0,
            1.0,
            0.0,
            off,
            0.0,
            (3.0 * c - 1.0) / d,
        ],
    )?;
    Observable::new(format!("B_{}B_{}", g.m, g.m + 1), m)
}

/// R(ω) = Z cos ω + X sin ω.
pub fn alice_rotation(omega: f64) -> Observable {
    let (s, c) = omega.sin_cos();
    let m = ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).expect("2x2");
    Observable {
        label: format!("R({omega})"),
        matrix: m,
    }
}

/// Closed-form cyclic KCBS operator diag(λ₁, λ₁, λ₃).
pub fn s_operator(n: usize) -> Result<Observable> {
    let g = CycleGeometry::new(n)?;
    let d = [g.lambda1, g.lambda1, g.lambda3].map(|x| Complex64::new(x, 0.0));
    Observable::new("S", ComplexMatrix::from_diagonal(&d))
}

/// Σ_{j=0}^{n−2} B_j B_{j+1} − B_{n−1} B_0 assembled from the individual
/// observables.
pub fn assembled_cycle_operator(n: usize) -> Result<ComplexMatrix> {
    validate_cycle(n)?;
    let mut sum = ComplexMatrix::zeros(3, 3);
    for j in 0..n {
        let pair = kcbs_pair(n, j)?.matrix;
        sum = if j + 1 < n {
            &sum + &pair
        } else {
            &sum - &pair
        };
    }
    Ok(sum)
}

/// 4 Σ_j P_j − n I.
pub fn projector_sum_operator(n: usize) -> Result<ComplexMatrix> {
    validate_cycle(n)?;
    let mut sum = ComplexMatrix::zeros(3, 3);
    for j in 0..n {
        sum = &sum + &ComplexMatrix::projector(&kcbs_vector(n, j)?);
    }
    Ok(&sum.scale_real(4.0) - &ComplexMatrix::identity(3).scale_real(n as f64))
}

/// Sign attached to context `j` in the KCBS sum: +1 except for the
/// wraparound pair (B_{n−1}, B_0).
pub fn cycle_sign(n: usize, j: usize) -> f64 {
    if j + 1 == n {
        -1.0
    } else {
        1.0
    }
}
