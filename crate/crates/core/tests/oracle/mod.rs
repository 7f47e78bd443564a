//! Reference implementations for the integration tests. Plain nested `Vec`
//! matrices and loops straight from the definitions; nothing here calls into
//! the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Mat = Vec<Vec<C>>;

pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); c]; r]
}

pub fn eye(d: usize) -> Mat {
    let mut m = zeros(d, d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = re(1.0);
    }
    m
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for j in 0..b[0].len() {
            for k in 0..b.len() {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn lin(a: &Mat, x: f64, b: &Mat, y: f64) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| p * x + q * y).collect())
        .collect()
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn expect(psi: &[C], m: &Mat) -> C {
    let mv = apply(m, psi);
    psi.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).norm());
        }
    }
    worst
}

/// Entries of a library matrix as nested rows.
pub fn from_flat(rows: usize, cols: usize, entries: &[C]) -> Mat {
    (0..rows)
        .map(|r| entries[r * cols..(r + 1) * cols].to_vec())
        .collect()
}

pub fn cos_pi_n(n: usize) -> f64 {
    (PI / n as f64).cos()
}

/// Pentagram-style vectors: angle j(n−1)π/n around the symmetry axis, height
/// fixed so neighbours are orthogonal.
pub fn kcbs_vector(n: usize, j: usize) -> [f64; 3] {
    let c = cos_pi_n(n);
    let a = j as f64 * (n as f64 - 1.0) * PI / n as f64;
    let norm = (1.0 + c).sqrt();
    [a.cos() / norm, a.sin() / norm, c.sqrt() / norm]
}

pub fn observable(n: usize, j: usize) -> Mat {
    let v = kcbs_vector(n, j);
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut m = zeros(3, 3);
    for r in 0..3 {
        for c in 0..3 {
            let delta = if r == c { 1.0 } else { 0.0 };
            m[r][c] = re(sign * (2.0 * v[r] * v[c] - delta));
        }
    }
    m
}

pub fn pair(n: usize, j: usize) -> Mat {
    mul(&observable(n, j), &observable(n, (j + 1) % n))
}

/// Σ_{j<n−1} B_j B_{j+1} − B_{n−1} B_0.
pub fn cycle_operator(n: usize) -> Mat {
    let mut s = zeros(3, 3);
    for j in 0..n {
        let sign = if j == n - 1 { -1.0 } else { 1.0 };
        s = lin(&s, 1.0, &pair(n, j), sign);
    }
    s
}

pub fn lambdas(n: usize) -> (f64, f64) {
    let c = cos_pi_n(n);
    let nf = n as f64;
    (nf * (1.0 - c) / (1.0 + c), nf * (3.0 * c - 1.0) / (1.0 + c))
}

pub fn pauli_z() -> Mat {
    vec![vec![re(1.0), re(0.0)], vec![re(0.0), re(-1.0)]]
}

pub fn pauli_x() -> Mat {
    vec![vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]
}

pub fn rotation(omega: f64) -> Mat {
    lin(&pauli_z(), omega.cos(), &pauli_x(), omega.sin())
}

/// Bob's two CHSH settings: B_mB_{m+1} + B_0 (with ω₂) and B_mB_{m+1} − B_0
/// (with ω₀).
pub fn chsh_bob_parts(n: usize) -> (Mat, Mat) {
    let m = (n - 1) / 2;
    let p = pair(n, m);
    let b0 = observable(n, 0);
    (lin(&p, 1.0, &b0, 1.0), lin(&p, 1.0, &b0, -1.0))
}

pub fn chsh_operator(n: usize, omega0: f64, omega2: f64) -> Mat {
    let (plus, minus) = chsh_bob_parts(n);
    lin(
        &kron(&rotation(omega2), &plus),
        1.0,
        &kron(&rotation(omega0), &minus),
        1.0,
    )
}

/// ⟨Z⊗(P−B₀)⟩, ⟨X⊗(P−B₀)⟩, ⟨Z⊗(P+B₀)⟩, ⟨X⊗(P+B₀)⟩: the CHSH value at
/// (ω₀, ω₂) is their combination with cos/sin weights.
pub fn chsh_basis_expectations(psi: &[C], n: usize) -> [f64; 4] {
    let (plus, minus) = chsh_bob_parts(n);
    [
        expect(psi, &kron(&pauli_z(), &minus)).re,
        expect(psi, &kron(&pauli_x(), &minus)).re,
        expect(psi, &kron(&pauli_z(), &plus)).re,
        expect(psi, &kron(&pauli_x(), &plus)).re,
    ]
}

pub fn chsh_from_basis(e: &[f64; 4], omega0: f64, omega2: f64) -> f64 {
    e[0] * omega0.cos() + e[1] * omega0.sin() + e[2] * omega2.cos() + e[3] * omega2.sin()
}

pub fn chsh_max_from_basis(e: &[f64; 4]) -> f64 {
    e[0].hypot(e[1]) + e[2].hypot(e[3])
}

pub fn kcbs_expectation(psi: &[C], n: usize) -> f64 {
    expect(psi, &kron(&eye(2), &cycle_operator(n))).re
}

/// sin(θ/2)|00⟩ + cos(θ/2) e^{iφ}|12⟩.
pub fn state1(theta: f64, phi: f64) -> Vec<C> {
    let mut v = vec![re(0.0); 6];
    v[0] = re((theta / 2.0).sin());
    v[5] = C::from_polar((theta / 2.0).cos(), phi);
    v
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<C> {
    let v: Vec<C> = (0..dim)
        .map(|_| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// A ⊕ 1 on Alice's qutrit, tensored with Bob's 3×3.
pub fn embedded_joint(alice: &Mat, bob: &Mat) -> Mat {
    let mut a3 = zeros(3, 3);
    for r in 0..2 {
        for c in 0..2 {
            a3[r][c] = alice[r][c];
        }
    }
    a3[2][2] = re(1.0);
    kron(&a3, bob)
}

/// Qubit amplitudes c_jk placed at qutrit index 3j + k.
pub fn embed_state(psi: &[C]) -> Vec<C> {
    let mut v = vec![re(0.0); 9];
    v[..6].copy_from_slice(psi);
    v
}

/// Ancilla outcome distribution of the three-level Fourier test:
/// P_k = ‖(1/3) Σ_a e^{−2πi ak/3} Uᵃ ψ‖².
pub fn fourier_probabilities(u: &Mat, psi: &[C]) -> [f64; 3] {
    let u1 = apply(u, psi);
    let u2 = apply(u, &u1);
    let powers = [psi.to_vec(), u1, u2];
    let mut p = [0.0; 3];
    for (k, pk) in p.iter_mut().enumerate() {
        let mut amp = vec![re(0.0); psi.len()];
        for (a, v) in powers.iter().enumerate() {
            let w = C::from_polar(1.0 / 3.0, -2.0 * PI * (a * k) as f64 / 3.0);
            for (x, y) in amp.iter_mut().zip(v) {
                *x += w * y;
            }
        }
        *pk = amp.iter().map(|z| z.norm_sqr()).sum();
    }
    p
}

/// (n, θ_opt in degrees, overlap) as published.
pub const PUBLISHED_COEXISTENCE: [(usize, f64, f64); 26] = [
    (5, 49.605, 0.343069),
    (7, 46.568, 0.347839),
    (9, 42.804, 0.353697),
    (11, 40.174, 0.328131),
    (13, 37.825, 0.311358),
    (15, 35.922, 0.289453),
    (17, 34.24, 0.272828),
    (19, 32.802, 0.255515),
    (21, 31.515, 0.241466),
    (23, 30.381, 0.227717),
    (25, 29.355, 0.216111),
    (27, 28.432, 0.205008),
    (29, 27.588, 0.195383),
    (31, 26.818, 0.186256),
    (33, 26.107, 0.178192),
    (35, 25.452, 0.170568),
    (37, 24.843, 0.163735),
    (39, 24.277, 0.157276),
    (41, 23.747, 0.151422),
    (43, 23.252, 0.145882),
    (45, 22.785, 0.140814),
    (47, 22.346, 0.136011),
    (49, 21.932, 0.131586),
    (51, 21.54, 0.127384),
    (53, 21.168, 0.123487),
    (55, 20.815, 0.11978),
];
