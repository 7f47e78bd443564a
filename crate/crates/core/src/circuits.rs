//! Qutrit gate library and an exact statevector simulator for the
//! preparation and Fourier-test circuits.
//!
//! Registers are qutrits; register 0 is the most significant digit of the
//! basis index. Alice's physical system is a qubit embedded in the lower two
//! levels of her qutrit, so her level |2⟩ is declared dead and checked after
//! every gate.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, tensor, ComplexMatrix, JointState, I, NORM_TOL, ONE, ZERO};

/// Tolerance on unitarity of gates accepted into a circuit.
pub const GATE_TOL: f64 = 1e-10;

/// Tolerance on amplitudes of a dead level.
pub const DEAD_LEVEL_TOL: f64 = 1e-12;

const QUTRIT: usize = 3;

/// Gell-Mann matrix λ_a, a ∈ 1..=8.
pub fn gell_mann(a: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(3, 3);
    match a {
        1 => {
            m[(0, 1)] = ONE;
            m[(1, 0)] = ONE;
        }
        2 => {
            m[(0, 1)] = -I;
            m[(1, 0)] = I;
        }
        3 => {
            m[(0, 0)] = ONE;
            m[(1, 1)] = -ONE;
        }
        4 => {
            m[(0, 2)] = ONE;
            m[(2, 0)] = ONE;
        }
        5 => {
            m[(0, 2)] = -I;
            m[(2, 0)] = I;
        }
        6 => {
            m[(1, 2)] = ONE;
            m[(2, 1)] = ONE;
        }
        7 => {
            m[(1, 2)] = -I;
            m[(2, 1)] = I;
        }
        8 => {
            let k = 1.0 / 3f64.sqrt();
            m[(0, 0)] = Complex64::new(k, 0.0);
            m[(1, 1)] = Complex64::new(k, 0.0);
            m[(2, 2)] = Complex64::new(-2.0 * k, 0.0);
        }
        _ => {
            return Err(Error::IndexOutOfRange {
                index: a as i64,
                len: 9,
            })
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subspace {
    S01,
    S02,
    S12,
}

impl Subspace {
    pub const ALL: [Subspace; 3] = [Subspace::S01, Subspace::S02, Subspace::S12];

    pub fn levels(self) -> (usize, usize) {
        match self {
            Subspace::S01 => (0, 1),
            Subspace::S02 => (0, 2),
            Subspace::S12 => (1, 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The eight Gell-Mann matrices and the per-subspace rotation generators.
#[derive(Debug, Clone)]
pub struct GateLibrary {
    pub gell_mann: [ComplexMatrix; 8],
}

impl Default for GateLibrary {
    fn default() -> Self {
        GateLibrary {
            gell_mann: std::array::from_fn(|i| gell_mann(i + 1).expect("index in range")),
        }
    }
}

impl GateLibrary {
    /// λ^{(ij)}_axis expressed through the Gell-Mann basis.
    pub fn generator(&self, subspace: Subspace, axis: Axis) -> ComplexMatrix {
        let l = |a: usize| &self.gell_mann[a - 1];
        let r3 = 3f64.sqrt();
        match (subspace, axis) {
            (Subspace::S01, Axis::X) => l(1).clone(),
            (Subspace::S01, Axis::Y) => l(2).clone(),
            (Subspace::S01, Axis::Z) => l(3).clone(),
            (Subspace::S02, Axis::X) => l(4).clone(),
            (Subspace::S02, Axis::Y) => l(5).clone(),
            (Subspace::S02, Axis::Z) => (l(3) + &l(8).scale_real(r3)).scale_real(0.5),
            (Subspace::S12, Axis::X) => l(6).clone(),
            (Subspace::S12, Axis::Y) => l(7).clone(),
            (Subspace::S12, Axis::Z) => (&l(8).scale_real(r3) - l(3)).scale_real(0.5),
        }
    }
}

/// exp(−iθ/2 λ^{(ij)}_axis): an SU(2) rotation on levels (i, j) with the
/// spectator level left untouched.
pub fn rotation(subspace: Subspace, axis: Axis, theta: f64) -> ComplexMatrix {
    let (a, b) = subspace.levels();
    let (s, c) = (theta / 2.0).sin_cos();
    let mut m = ComplexMatrix::identity(3);
    let cc = Complex64::new(c, 0.0);
    match axis {
        Axis::X => {
            m[(a, a)] = cc;
            m[(b, b)] = cc;
            m[(a, b)] = Complex64::new(0.0, -s);
            m[(b, a)] = Complex64::new(0.0, -s);
        }
        Axis::Y => {
            m[(a, a)] = cc;
            m[(b, b)] = cc;
            m[(a, b)] = Complex64::new(-s, 0.0);
            m[(b, a)] = Complex64::new(s, 0.0);
        }
        Axis::Z => {
            m[(a, a)] = Complex64::new(c, -s);
            m[(b, b)] = Complex64::new(c, s);
        }
    }
    m
}

/// D(α, β) = diag(1, e^{iα}, e^{iβ}).
pub fn phase_gate(alpha: f64, beta: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[
        ONE,
        Complex64::from_polar(1.0, alpha),
        Complex64::from_polar(1.0, beta),
    ])
}

/// Qutrit Fourier transform, entries ω^{jk}/√3 with ω = e^{2πi/3}.
pub fn f3() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3, 3);
    let norm = 1.0 / 3f64.sqrt();
    for j in 0..3 {
        for k in 0..3 {
            m[(j, k)] = Complex64::from_polar(norm, TAU * ((j * k) % 3) as f64 / 3.0);
        }
    }
    m
}

/// Swap of levels 0 and 2.
pub fn x02() -> ComplexMatrix {
    ComplexMatrix::from_real(3, 3, &[0., 0., 1., 0., 1., 0., 1., 0., 0.]).expect("3x3")
}

/// Block diagonal diag(I, U, U²) on control-qutrit ⊗ target.
pub fn controlled_power(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let deviation = u.unitarity_deviation();
    if deviation > GATE_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let d = u.rows();
    let mut out = ComplexMatrix::zeros(QUTRIT * d, QUTRIT * d);
    for a in 0..QUTRIT {
        let block = u.pow(a as u32);
        for r in 0..d {
            for c in 0..d {
                out[(a * d + r, a * d + c)] = block[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Embeds a 2×2 Alice operator into her qutrit as `a ⊕ 1`.
pub fn embed_alice(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.rows(),
        });
    }
    let mut m = ComplexMatrix::identity(3);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = a[(r, c)];
        }
    }
    Ok(m)
}

/// Two-qutrit operator `(a ⊕ 1) ⊗ b` on Alice ⊗ Bob.
pub fn joint_observable(alice: &ComplexMatrix, bob: &ComplexMatrix) -> Result<ComplexMatrix> {
    if bob.rows() != 3 || bob.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: bob.rows(),
        });
    }
    Ok(tensor(&embed_alice(alice)?, bob))
}

/// Qubit ⊗ qutrit amplitudes placed into the two-qutrit space.
pub fn embed_joint_state(state: &JointState) -> Vec<Complex64> {
    let mut v = vec![ZERO; 9];
    v[..6].copy_from_slice(state.as_slice());
    v
}

/// Inverse of [`embed_joint_state`]; fails if Alice's level |2⟩ is populated.
pub fn project_joint_state(v: &[Complex64]) -> Result<JointState> {
    if v.len() != 9 {
        return Err(Error::DimensionMismatch {
            expected: 9,
            found: v.len(),
        });
    }
    let leak = v[6..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    if leak > DEAD_LEVEL_TOL {
        return Err(Error::DeadLevelPopulated {
            register: "alice".into(),
            stage: "projection".into(),
            amplitude: leak,
        });
    }
    let mut amps = [ZERO; 6];
    amps.copy_from_slice(&v[..6]);
    JointState::new(amps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterSpec {
    pub name: String,
    /// Levels that must carry no amplitude at any stage.
    pub dead_levels: Vec<usize>,
}

impl RegisterSpec {
    pub fn new(name: impl Into<String>) -> Self {
        RegisterSpec {
            name: name.into(),
            dead_levels: Vec::new(),
        }
    }

    pub fn with_dead_level(mut self, level: usize) -> Self {
        self.dead_levels.push(level);
        self
    }
}

/// A gate acting on `targets`; when `control` is set, the target block gets
/// `matrix^a` for control level `a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateApplication {
    pub label: String,
    pub matrix: ComplexMatrix,
    pub targets: Vec<usize>,
    pub control: Option<usize>,
    #[serde(skip)]
    powers: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub registers: Vec<RegisterSpec>,
    pub gates: Vec<GateApplication>,
}

impl CircuitSpec {
    pub fn new(registers: Vec<RegisterSpec>) -> Self {
        CircuitSpec {
            registers,
            gates: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        QUTRIT.pow(self.registers.len() as u32)
    }

    pub fn gate(
        self,
        label: impl Into<String>,
        matrix: ComplexMatrix,
        targets: &[usize],
    ) -> Result<Self> {
        self.push(label.into(), matrix, targets, None)
    }

    pub fn controlled(
        self,
        label: impl Into<String>,
        matrix: ComplexMatrix,
        control: usize,
        targets: &[usize],
    ) -> Result<Self> {
        self.push(label.into(), matrix, targets, Some(control))
    }

    fn push(
        mut self,
        label: String,
        matrix: ComplexMatrix,
        targets: &[usize],
        control: Option<usize>,
    ) -> Result<Self> {
        let nreg = self.registers.len();
        let mut seen = vec![false; nreg];
        for &r in targets.iter().chain(control.iter()) {
            if r >= nreg {
                return Err(Error::IndexOutOfRange {
                    index: r as i64,
                    len: nreg,
                });
            }
            if seen[r] {
                return Err(Error::InvalidParameter(format!(
                    "register {r} used twice in `{label}`"
                )));
            }
            seen[r] = true;
        }
        let block = QUTRIT.pow(targets.len() as u32);
        if matrix.rows() != block || matrix.cols() != block {
            return Err(Error::DimensionMismatch {
                expected: block,
                found: matrix.rows(),
            });
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > GATE_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let powers = match control {
            Some(_) => (0..QUTRIT as u32).map(|a| matrix.pow(a)).collect(),
            None => vec![matrix.clone()],
        };
        self.gates.push(GateApplication {
            label,
            matrix,
            targets: targets.to_vec(),
            control,
            powers,
        });
        Ok(self)
    }

    /// Basis state with register `r` in level `levels[r]`.
    pub fn basis_state(&self, levels: &[usize]) -> Result<Vec<Complex64>> {
        if levels.len() != self.registers.len() {
            return Err(Error::DimensionMismatch {
                expected: self.registers.len(),
                found: levels.len(),
            });
        }
        let mut v = vec![ZERO; self.dim()];
        let idx = levels.iter().fold(0, |acc, &l| acc * QUTRIT + l);
        v[idx] = ONE;
        Ok(v)
    }

    /// Runs the circuit on `initial`, checking dead levels before the first
    /// gate and after every gate.
    pub fn run(&self, initial: &[Complex64]) -> Result<Vec<Complex64>> {
        if initial.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: initial.len(),
            });
        }
        let norm_sqr = linalg::norm_sqr(initial);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let mut state = initial.to_vec();
        self.check_dead_levels(&state, "input")?;
        for gate in &self.gates {
            self.apply(gate, &mut state);
            self.check_dead_levels(&state, &gate.label)?;
        }
        Ok(state)
    }

    fn digit(&self, index: usize, register: usize) -> usize {
        let shift = self.registers.len() - 1 - register;
        (index / QUTRIT.pow(shift as u32)) % QUTRIT
    }

    fn stride(&self, register: usize) -> usize {
        QUTRIT.pow((self.registers.len() - 1 - register) as u32)
    }

    fn apply(&self, gate: &GateApplication, state: &mut [Complex64]) {
        let block = QUTRIT.pow(gate.targets.len() as u32);
        // offsets of each local target assignment, first target most significant
        let offsets: Vec<usize> = (0..block)
            .map(|local| {
                let mut rem = local;
                let mut off = 0;
                for &t in gate.targets.iter().rev() {
                    off += (rem % QUTRIT) * self.stride(t);
                    rem /= QUTRIT;
                }
                off
            })
            .collect();
        let mut buf = vec![ZERO; block];
        for base in 0..state.len() {
            if gate.targets.iter().any(|&t| self.digit(base, t) != 0) {
                continue;
            }
            let u = match gate.control {
                Some(c) => &gate.powers[self.digit(base, c)],
                None => &gate.powers[0],
            };
            for (slot, &off) in buf.iter_mut().zip(&offsets) {
                *slot = state[base + off];
            }
            let out = u.apply(&buf).expect("block dimension checked on push");
            for (&off, z) in offsets.iter().zip(out) {
                state[base + off] = z;
            }
        }
    }

    fn check_dead_levels(&self, state: &[Complex64], stage: &str) -> Result<()> {
        for (r, reg) in self.registers.iter().enumerate() {
            if reg.dead_levels.is_empty() {
                continue;
            }
            let worst = state
                .iter()
                .enumerate()
                .filter(|(i, _)| reg.dead_levels.contains(&self.digit(*i, r)))
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            if worst > DEAD_LEVEL_TOL {
                return Err(Error::DeadLevelPopulated {
                    register: reg.name.clone(),
                    stage: stage.to_string(),
                    amplitude: worst,
                });
            }
        }
        Ok(())
    }

    /// Probabilities of each level of `register`, tracing out the rest.
    pub fn marginal(&self, state: &[Complex64], register: usize) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (i, z) in state.iter().enumerate() {
            p[self.digit(i, register)] += z.norm_sqr();
        }
        p
    }
}

fn alice_register() -> RegisterSpec {
    RegisterSpec::new("alice").with_dead_level(2)
}

/// R₀₁ʸ(π − θ) and D(φ, 0) on Alice, then Alice-controlled X₀₂ on Bob.
pub fn state1_preparation_circuit(theta: f64, phi: f64) -> Result<CircuitSpec> {
    CircuitSpec::new(vec![alice_register(), RegisterSpec::new("bob")])
        .gate(
            "R01y(pi-theta)",
            rotation(Subspace::S01, Axis::Y, PI - theta),
            &[0],
        )?
        .gate("D(phi,0)", phase_gate(phi, 0.0), &[0])?
        .controlled("C-X02", x02(), 0, &[1])
}

/// Simulates the preparation circuit from |00⟩.
pub fn prepare_state1(theta: f64, phi: f64) -> Result<JointState> {
    let circuit = state1_preparation_circuit(theta, phi)?;
    let out = circuit.run(&circuit.basis_state(&[0, 0])?)?;
    project_joint_state(&out)
}

/// F₃ on the ancilla, controlled-Uᵃ onto (Alice, Bob), F₃† on the ancilla.
pub fn fourier_test_circuit(u: &ComplexMatrix) -> Result<CircuitSpec> {
    let f = f3();
    CircuitSpec::new(vec![
        RegisterSpec::new("ancilla"),
        alice_register(),
        RegisterSpec::new("bob"),
    ])
    .gate("F3", f.clone(), &[0])?
    .controlled("C-U^a", u.clone(), 0, &[1, 2])?
    .gate("F3^dag", f.adjoint(), &[0])
}

/// Ancilla statistics of a Fourier test, exact or sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTestReport {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub shots: Option<u64>,
    pub counts: Option<[u64; 3]>,
    /// (9(P0 − P1 − P2) − 1)/8
    pub estimator_combined: f64,
    /// (9P0 − 5)/4
    pub estimator_p0: f64,
    /// (2 − 9P1)/2
    pub estimator_p1: f64,
    pub seed: Option<u64>,
}

fn estimators(p: [f64; 3]) -> (f64, f64, f64) {
    (
        (9.0 * (p[0] - p[1] - p[2]) - 1.0) / 8.0,
        (9.0 * p[0] - 5.0) / 4.0,
        (2.0 - 9.0 * p[1]) / 2.0,
    )
}

impl FourierTestReport {
    pub fn exact(p: [f64; 3]) -> Self {
        let (combined, e0, e1) = estimators(p);
        FourierTestReport {
            p0: p[0],
            p1: p[1],
            p2: p[2],
            shots: None,
            counts: None,
            estimator_combined: combined,
            estimator_p0: e0,
            estimator_p1: e1,
            seed: None,
        }
    }

    pub fn probabilities(&self) -> [f64; 3] {
        [self.p0, self.p1, self.p2]
    }

    /// Standard error of the combined estimator at `shots` samples:
    /// (9/8)·√(Var(±1 outcome)/shots) using the exact probabilities.
    pub fn standard_error(&self, shots: u64) -> f64 {
        let mean = self.p0 - self.p1 - self.p2;
        9.0 / 8.0 * ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt()
    }
}

/// Exact Fourier test of a Hermitian involution `u` on a two-qutrit state.
pub fn fourier_test_probabilities(
    u: &ComplexMatrix,
    psi: &[Complex64],
) -> Result<FourierTestReport> {
    let deviation = u.hermiticity_deviation();
    if deviation > GATE_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let deviation = u.unitarity_deviation();
    if deviation > GATE_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    if u.rows() != 9 {
        return Err(Error::DimensionMismatch {
            expected: 9,
            found: u.rows(),
        });
    }
    if psi.len() != 9 {
        return Err(Error::DimensionMismatch {
            expected: 9,
            found: psi.len(),
        });
    }
    let circuit = fourier_test_circuit(u)?;
    let input = linalg::tensor_vec(&[ONE, ZERO, ZERO], psi);
    let out = circuit.run(&input)?;
    Ok(FourierTestReport::exact(circuit.marginal(&out, 0)))
}

/// Fourier test of `(alice ⊕ 1) ⊗ bob` on a qubit ⊗ qutrit state.
pub fn fourier_test_joint(
    alice: &ComplexMatrix,
    bob: &ComplexMatrix,
    state: &JointState,
) -> Result<FourierTestReport> {
    fourier_test_probabilities(&joint_observable(alice, bob)?, &embed_joint_state(state))
}

/// Draws `shots` multinomial samples from the ancilla distribution of
/// `report` and recomputes the estimators from the observed frequencies.
pub fn sample_shots(
    report: &FourierTestReport,
    shots: u64,
    seed: u64,
) -> Result<FourierTestReport> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    let p = report.probabilities().map(|x| x.clamp(0.0, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let binomial = |rng: &mut ChaCha8Rng, n: u64, prob: f64| -> Result<u64> {
        if n == 0 || prob <= 0.0 {
            return Ok(0);
        }
        if prob >= 1.0 {
            return Ok(n);
        }
        Binomial::new(n, prob)
            .map(|d| d.sample(rng))
            .map_err(|e| Error::InvalidParameter(e.to_string()))
    };
    let n0 = binomial(&mut rng, shots, p[0])?;
    let rest = p[1] + p[2];
    let n1 = if rest > 0.0 {
        binomial(&mut rng, shots - n0, p[1] / rest)?
    } else {
        0
    };
    let n2 = shots - n0 - n1;
    let freq = [n0, n1, n2].map(|c| c as f64 / shots as f64);
    let (combined, e0, e1) = estimators(freq);
    Ok(FourierTestReport {
        shots: Some(shots),
        counts: Some([n0, n1, n2]),
        estimator_combined: combined,
        estimator_p0: e0,
        estimator_p1: e1,
        seed: Some(seed),
        ..report.clone()
    })
}

/// Per-item seed as a pure function of a master seed and an item index
/// (SplitMix64 finaliser).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Amplitude (1/√2, 1/√2) on |00⟩, |12⟩; handy in tests and demos.
pub fn bell_like_state() -> JointState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    JointState::normalized([h, ZERO, ZERO, ZERO, ZERO, h]).expect("nonzero")
}
