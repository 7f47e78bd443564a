//! Closed-form evaluation of the CHSH and KCBS expressions on qubit ⊗ qutrit
//! states.
//!
//! The CHSH side uses Alice's settings R(ω₀), R(ω₂) and Bob's B₀, B_mB_{m+1}:
//!
//! ```text
//! ⟨R(ω₂)⊗B_mB_{m+1}⟩ + ⟨R(ω₂)⊗B₀⟩ + ⟨R(ω₀)⊗B_mB_{m+1}⟩ − ⟨R(ω₀)⊗B₀⟩
//!   = X₀ cos ω₀ + Y₀ sin ω₀ + X₂ cos ω₂ + Y₂ sin ω₂
//! ```
//!
//! and is optimised independently in each angle. The KCBS side depends on
//! the state only through p₂, the weight on Bob's level |2⟩.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix, JointState, ZERO};
use crate::observables::{alice_rotation, kcbs_observable, kcbs_pair, CycleGeometry};

/// Coefficients of the CHSH expression in Alice's two angles, with the
/// maximising settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshCoefficients {
    pub x0: f64,
    pub y0: f64,
    pub x2: f64,
    pub y2: f64,
    pub omega0: f64,
    pub omega2: f64,
    pub s_opt: f64,
}

impl ChshCoefficients {
    fn from_parts(x0: f64, y0: f64, x2: f64, y2: f64) -> Self {
        ChshCoefficients {
            x0,
            y0,
            x2,
            y2,
            omega0: optimal_angle(x0, y0),
            omega2: optimal_angle(x2, y2),
            s_opt: x0.hypot(y0) + x2.hypot(y2),
        }
    }

    /// The CHSH expression at arbitrary settings.
    pub fn value_at(&self, omega0: f64, omega2: f64) -> f64 {
        self.x0 * omega0.cos()
            + self.y0 * omega0.sin()
            + self.x2 * omega2.cos()
            + self.y2 * omega2.sin()
    }

    pub fn margin(&self) -> f64 {
        self.s_opt - 2.0
    }
}

/// The angle maximising `x cos ω + y sin ω`. Uses the two-argument arctangent
/// so the maximising (not minimising) branch is picked when `x < 0`.
fn optimal_angle(x: f64, y: f64) -> f64 {
    if x == 0.0 && y == 0.0 {
        0.0
    } else {
        y.atan2(x)
    }
}

/// Parameters of the minimal state sin(θ/2)|00⟩ + cos(θ/2)e^{iφ}|12⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateOneParams {
    pub theta: f64,
    pub phi: f64,
}

impl StateOneParams {
    /// θ must lie in [0, π]; φ is wrapped into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside [0, pi] or non-finite phi"
            )));
        }
        Ok(StateOneParams {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }
}

/// Population (Q), coherence (R) and geometry (S±) factors of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceDecomposition {
    pub q0: f64,
    pub q1: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

impl ResourceDecomposition {
    /// Reassembles the CHSH coefficients from the Q/R/S factors.
    pub fn chsh_coefficients(&self, g: &CycleGeometry) -> ChshCoefficients {
        let c = g.c;
        let d = 1.0 + c;
        let k = 2.0 * c.sqrt() / d;
        let x0 = -2.0 * c / d * self.q0 + 2.0 * self.q1 + k * self.r1 * self.s_minus;
        let y0 = -4.0 * c / d * self.r2 + 4.0 * self.r4 + k * self.r3 * self.s_minus;
        let x2 = (2.0 - 4.0 * c) / d * self.q0 + k * self.r1 * self.s_plus;
        let y2 = (4.0 - 8.0 * c) / d * self.r2 + k * self.r3 * self.s_plus;
        ChshCoefficients::from_parts(x0, y0, x2, y2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KcbsReport {
    pub s_kcbs: f64,
    pub p2: f64,
    pub classical_bound: f64,
    pub margin: f64,
}

/// Bilinear forms D_fk = Σ_{e,j} c*_{ef} c_{jk} ⟨e|A|j⟩ split into the parts
/// multiplying cos ω and sin ω of R(ω).
struct AliceForms {
    cos: [[Complex64; 3]; 3],
    sin: [[Complex64; 3]; 3],
}

impl AliceForms {
    fn new(s: &JointState) -> Self {
        let mut cos = [[ZERO; 3]; 3];
        let mut sin = [[ZERO; 3]; 3];
        for f in 0..3 {
            for k in 0..3 {
                cos[f][k] = s.amp(0, f).conj() * s.amp(0, k) - s.amp(1, f).conj() * s.amp(1, k);
                sin[f][k] = s.amp(0, f).conj() * s.amp(1, k) + s.amp(1, f).conj() * s.amp(0, k);
            }
        }
        AliceForms { cos, sin }
    }
}

/// (W₀, W₁, W₂) = (D₀₀ − D₂₂, D₁₁, D₀₂ + D₂₀); all real for a Hermitian form.
fn w_terms(d: &[[Complex64; 3]; 3]) -> (f64, f64, f64) {
    ((d[0][0] - d[2][2]).re, d[1][1].re, (d[0][2] + d[2][0]).re)
}

fn require_normalized(state: &JointState) -> Result<()> {
    // JointState enforces this on construction; re-checked for states built
    // from raw amplitudes elsewhere in the crate.
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > crate::linalg::NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

pub fn chsh_coefficients(state: &JointState, n: usize) -> Result<ChshCoefficients> {
    let g = CycleGeometry::new(n)?;
    require_normalized(state)?;
    let c = g.c;
    let d = 1.0 + c;
    let forms = AliceForms::new(state);

    // B_mB_{m+1} ∓ B₀ share the sparsity pattern: weights on W₀, W₁, W₂.
    let minus = [-2.0 * c / d, 2.0, c.sqrt() / d * g.s_minus()];
    let plus = [(2.0 - 4.0 * c) / d, 0.0, c.sqrt() / d * g.s_plus()];
    let contract = |w: (f64, f64, f64), k: [f64; 3]| k[0] * w.0 + k[1] * w.1 + k[2] * w.2;

    let wc = w_terms(&forms.cos);
    let ws = w_terms(&forms.sin);
    Ok(ChshCoefficients::from_parts(
        contract(wc, minus),
        contract(ws, minus),
        contract(wc, plus),
        contract(ws, plus),
    ))
}

pub fn chsh_value(state: &JointState, n: usize, omega0: f64, omega2: f64) -> Result<f64> {
    Ok(chsh_coefficients(state, n)?.value_at(omega0, omega2))
}

/// The 6×6 CHSH operator
/// R(ω₂)⊗(B_mB_{m+1} + B₀) + R(ω₀)⊗(B_mB_{m+1} − B₀), assembled from the
/// cycle observables.
pub fn chsh_operator(n: usize, omega0: f64, omega2: f64) -> Result<ComplexMatrix> {
    let g = CycleGeometry::new(n)?;
    let b0 = kcbs_observable(n, 0)?.matrix;
    let pair = kcbs_pair(n, g.m)?.matrix;
    let r0 = alice_rotation(omega0).matrix;
    let r2 = alice_rotation(omega2).matrix;
    Ok(&tensor(&r2, &(&pair + &b0)) + &tensor(&r0, &(&pair - &b0)))
}

/// Weight on Bob's level |2⟩.
pub fn population_p2(state: &JointState) -> f64 {
    state.amp(0, 2).norm_sqr() + state.amp(1, 2).norm_sqr()
}

pub fn kcbs_value(state: &JointState, n: usize) -> Result<KcbsReport> {
    let g = CycleGeometry::new(n)?;
    require_normalized(state)?;
    let p2 = population_p2(state);
    let nf = n as f64;
    let s_kcbs = nf * (4.0 * g.c - 2.0) / (1.0 + g.c) * p2 + nf * (1.0 - g.c) / (1.0 + g.c);
    Ok(KcbsReport {
        s_kcbs,
        p2,
        classical_bound: g.classical_bound(),
        margin: s_kcbs - g.classical_bound(),
    })
}

/// Minimum p₂ for a KCBS violation: (nc − 1 − c) / ((2c − 1) n).
pub fn p2_threshold(n: usize) -> Result<f64> {
    let g = CycleGeometry::new(n)?;
    let nf = n as f64;
    Ok((nf * g.c - 1.0 - g.c) / ((2.0 * g.c - 1.0) * nf))
}

pub fn state1(params: StateOneParams) -> JointState {
    let (s, c) = (params.theta / 2.0).sin_cos();
    let mut amps = [ZERO; 6];
    amps[0] = Complex64::new(s, 0.0);
    amps[5] = Complex64::from_polar(c, params.phi);
    JointState::normalized(amps).expect("sin² + cos² = 1")
}

/// (CHSH margin, KCBS margin) of the minimal state in closed form.
pub fn state1_margins(params: StateOneParams, n: usize) -> Result<(f64, f64)> {
    let g = CycleGeometry::new(n)?;
    let c = g.c;
    let coherence = c * (params.theta.sin() * params.phi.cos()).powi(2);
    let chsh = ((4.0 * c * c + coherence * g.s_minus().powi(2)).sqrt()
        + ((2.0 - 4.0 * c).powi(2) + coherence * g.s_plus().powi(2)).sqrt())
        / (1.0 + c)
        - 2.0;
    let cos_half_sq = (params.theta / 2.0).cos().powi(2);
    let kcbs = n as f64 / (1.0 + c) * ((4.0 * c - 2.0) * cos_half_sq - 2.0 * c) + 2.0;
    Ok((chsh, kcbs))
}

pub fn decompose(state: &JointState, n: usize) -> Result<ResourceDecomposition> {
    let g = CycleGeometry::new(n)?;
    require_normalized(state)?;
    let a = |j, k| state.amp(j, k);
    let p = |j, k| a(j, k).norm_sqr();
    Ok(ResourceDecomposition {
        q0: p(0, 0) - p(1, 0) - p(0, 2) + p(1, 2),
        q1: p(0, 1) - p(1, 1),
        r1: (a(0, 0).conj() * a(0, 2) - a(1, 0).conj() * a(1, 2)).re,
        r2: (a(1, 0).conj() * a(0, 0) - a(1, 2).conj() * a(0, 2)).re,
        r3: (a(1, 2).conj() * a(0, 0) + a(0, 2).conj() * a(1, 0)).re,
        r4: (a(1, 1).conj() * a(0, 1)).re,
        s_plus: g.s_plus(),
        s_minus: g.s_minus(),
    })
}

/// √(2/(n+4))|00⟩ + √((n+2)/(n+4)) e^{ikπ}|12⟩.
pub fn psi_n_state(n: usize, k: i64) -> Result<JointState> {
    CycleGeometry::new(n)?;
    let nf = n as f64;
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mut amps = [ZERO; 6];
    amps[0] = Complex64::new((2.0 / (nf + 4.0)).sqrt(), 0.0);
    amps[5] = Complex64::new(sign * ((nf + 2.0) / (nf + 4.0)).sqrt(), 0.0);
    JointState::normalized(amps)
}

/// The state1 parameters equivalent to `psi_n_state(n, k)`.
pub fn psi_n_params(n: usize, k: i64) -> Result<StateOneParams> {
    CycleGeometry::new(n)?;
    let theta = 2.0 * (2.0 / (n as f64 + 4.0)).sqrt().asin();
    let phi = if k.rem_euclid(2) == 0 { 0.0 } else { PI };
    StateOneParams::new(theta, phi)
}

/// Leading-order (KCBS, CHSH) margins of `psi_n_state`: 8/(n+4) and
/// 8(n+2)/(n+4)².
pub fn asymptotic_margins(n: usize) -> Result<(f64, f64)> {
    CycleGeometry::new(n)?;
    let nf = n as f64;
    Ok((8.0 / (nf + 4.0), 8.0 * (nf + 2.0) / (nf + 4.0).powi(2)))
}

/// √(8/(n+4)), radians.
pub fn theta_opt_asymptotic(n: usize) -> Result<f64> {
    CycleGeometry::new(n)?;
    Ok((8.0 / (n as f64 + 4.0)).sqrt())
}

/// Upper edge 2√2/√n of the large-n joint-violation window, radians.
pub fn coexistence_window(n: usize) -> Result<f64> {
    CycleGeometry::new(n)?;
    Ok(2.0 * 2f64.sqrt() / (n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expectation, ONE};
    use crate::observables::s_operator;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn p(theta: f64, phi: f64) -> StateOneParams {
        StateOneParams::new(theta, phi).unwrap()
    }

    #[test]
    fn coefficients_state1_half_pi() {
        let c = chsh_coefficients(&state1(p(FRAC_PI_2, 0.0)), 5).unwrap();
        assert_abs_diff_eq!(c.x0, -0.894427, epsilon = 1e-6);
        assert_abs_diff_eq!(c.y0, -0.379832, epsilon = 1e-6);
        assert_abs_diff_eq!(c.x2, -0.683281, epsilon = 1e-6);
        assert_abs_diff_eq!(c.y2, 1.608992, epsilon = 1e-6);
        assert_abs_diff_eq!(c.s_opt, 2.71980, epsilon = 1e-5);
        assert_abs_diff_eq!(c.value_at(c.omega0, c.omega2), c.s_opt, epsilon = 1e-12);
    }

    #[test]
    fn coefficients_state1_no_coherence() {
        let c = chsh_coefficients(&state1(p(FRAC_PI_2, FRAC_PI_2)), 5).unwrap();
        assert_abs_diff_eq!(c.y0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.s_opt, c.x0.abs() + c.x2.abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.s_opt, 1.577708, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_coefficients_give_zero_angle() {
        assert_eq!(optimal_angle(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(optimal_angle(-1.0, 0.0), PI, epsilon = 1e-15);
    }

    #[test]
    fn chsh_value_at_zero_angles() {
        let v = chsh_value(&state1(p(FRAC_PI_2, 0.0)), 5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(v, -1.577708, epsilon = 1e-6);
        let op = chsh_operator(5, 0.0, 0.0).unwrap();
        let direct = expectation(state1(p(FRAC_PI_2, 0.0)).as_slice(), &op).unwrap();
        assert_abs_diff_eq!(v, direct, epsilon = 1e-10);
    }

    #[test]
    fn chsh_value_is_periodic() {
        let s = state1(p(1.0, 0.4));
        let a = chsh_value(&s, 7, 0.3, 1.9).unwrap();
        let b = chsh_value(&s, 7, 0.3 + TAU, 1.9 - TAU).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn kcbs_endpoints() {
        let top = kcbs_value(&JointState::basis(1, 2).unwrap(), 5).unwrap();
        assert_abs_diff_eq!(top.s_kcbs, 3.944272, epsilon = 1e-6);
        assert_abs_diff_eq!(top.margin, 0.944272, epsilon = 1e-6);
        let bottom = kcbs_value(&JointState::basis(0, 0).unwrap(), 5).unwrap();
        assert_abs_diff_eq!(bottom.s_kcbs, 0.527864, epsilon = 1e-6);
        assert!(bottom.margin < 0.0);
        let s = tensor(&ComplexMatrix::identity(2), &s_operator(5).unwrap().matrix);
        let direct = expectation(JointState::basis(1, 2).unwrap().as_slice(), &s).unwrap();
        assert_abs_diff_eq!(direct, top.s_kcbs, epsilon = 1e-10);
    }

    #[test]
    fn kcbs_margin_vanishes_at_threshold() {
        for n in [5, 7, 9, 11, 21] {
            let t = p2_threshold(n).unwrap();
            let amps = [
                Complex64::new((1.0 - t).sqrt(), 0.0),
                ZERO,
                ZERO,
                ZERO,
                ZERO,
                Complex64::new(t.sqrt(), 0.0),
            ];
            let r = kcbs_value(&JointState::new(amps).unwrap(), n).unwrap();
            assert_abs_diff_eq!(r.margin, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn thresholds_match_reported_values() {
        for (n, want) in [(5, 0.724), (7, 0.785), (11, 0.850)] {
            let t = p2_threshold(n).unwrap();
            assert!((t - want).abs() <= 5e-4, "n={n}: {t}");
        }
        // 0.8234971: quoted as 0.824 in the literature, which is a round-up.
        assert_abs_diff_eq!(p2_threshold(9).unwrap(), 0.8234971, epsilon = 1e-7);
        assert_abs_diff_eq!(p2_threshold(5).unwrap(), 0.723607, epsilon = 1e-6);
        let mut prev = 0.0;
        for n in (5..=201).step_by(2) {
            let t = p2_threshold(n).unwrap();
            assert!(t > prev && t < 1.0);
            prev = t;
        }
    }

    #[test]
    fn state1_special_points() {
        let s = state1(p(PI, 0.0));
        assert_abs_diff_eq!(s.amp(0, 0).re, 1.0, epsilon = 1e-15);
        assert!(s.amp(1, 2).norm() < 1e-15);
        let s = state1(p(0.0, 0.7));
        assert_abs_diff_eq!(s.amp(1, 2).norm(), 1.0, epsilon = 1e-15);
        let s = state1(p(FRAC_PI_2, 0.0));
        assert_abs_diff_eq!(
            s.as_slice()[0].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            s.as_slice()[5].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-6
        );
    }

    #[test]
    fn state_one_params_validation() {
        assert!(StateOneParams::new(-0.1, 0.0).is_err());
        assert!(StateOneParams::new(3.5, 0.0).is_err());
        assert_abs_diff_eq!(
            StateOneParams::new(1.0, TAU).unwrap().phi,
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn state1_margins_half_pi() {
        let (chsh, kcbs) = state1_margins(p(FRAC_PI_2, 0.0), 5).unwrap();
        assert_abs_diff_eq!(chsh, 0.71980, epsilon = 1e-5);
        let g = CycleGeometry::new(5).unwrap();
        let want = 5.0 / (1.0 + g.c) * ((4.0 * g.c - 2.0) * 0.5 - 2.0 * g.c) + 2.0;
        assert_abs_diff_eq!(kcbs, want, epsilon = 1e-12);
        assert!(kcbs < 0.0);
    }

    #[test]
    fn state1_margins_coexistence_row() {
        let (chsh, kcbs) = state1_margins(p(49.605f64.to_radians(), 0.0), 5).unwrap();
        assert_abs_diff_eq!(chsh, 0.3431, epsilon = 2e-4);
        assert_abs_diff_eq!(kcbs, 0.3431, epsilon = 2e-4);
        assert!((chsh - kcbs).abs() <= 2e-4);
    }

    #[test]
    fn state1_margins_agree_with_general_route() {
        for n in [5, 7, 9, 23] {
            for &(t, f) in &[(0.2, 0.0), (1.0, 0.5), (2.5, 3.0), (PI, 1.0), (0.0, 0.0)] {
                let params = p(t, f);
                let (chsh, kcbs) = state1_margins(params, n).unwrap();
                let s = state1(params);
                assert_abs_diff_eq!(
                    chsh,
                    chsh_coefficients(&s, n).unwrap().margin(),
                    epsilon = 1e-10
                );
                assert_abs_diff_eq!(kcbs, kcbs_value(&s, n).unwrap().margin, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kcbs_margin_ignores_phase() {
        let theta = 0.9;
        let base = state1_margins(p(theta, 0.0), 5).unwrap().1;
        for i in 0..64 {
            let phi = TAU * i as f64 / 64.0;
            let k = state1_margins(p(theta, phi), 5).unwrap().1;
            assert!((k - base).abs() <= 1e-12);
        }
    }

    #[test]
    fn decompose_state1_and_basis() {
        let (theta, phi) = (1.3, 0.6);
        let d = decompose(&state1(p(theta, phi)), 5).unwrap();
        assert_abs_diff_eq!(d.q0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.q1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.r1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.r2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.r4, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.r3, 0.5 * theta.sin() * phi.cos(), epsilon = 1e-12);
        let d = decompose(&JointState::basis(0, 0).unwrap(), 5).unwrap();
        assert_eq!((d.q0, d.r1, d.r2, d.r3, d.r4), (1.0, 0.0, 0.0, 0.0, 0.0));
        let g = CycleGeometry::new(5).unwrap();
        assert_abs_diff_eq!(d.s_plus, 4.0 * g.s2 + 2.0, epsilon = 1e-15);
    }

    #[test]
    fn state1_coefficients_closed_form() {
        for n in [5, 7, 9] {
            let g = CycleGeometry::new(n).unwrap();
            let c = g.c;
            for &(t, f) in &[(0.4, 0.0), (1.7, 2.2), (2.9, 5.0)] {
                let co = chsh_coefficients(&state1(p(t, f)), n).unwrap();
                let amp = c.sqrt() * t.sin() * f.cos() / (1.0 + c);
                assert_abs_diff_eq!(co.x0, -2.0 * c / (1.0 + c), epsilon = 1e-12);
                assert_abs_diff_eq!(co.x2, (2.0 - 4.0 * c) / (1.0 + c), epsilon = 1e-12);
                assert_abs_diff_eq!(co.y0, amp * g.s_minus(), epsilon = 1e-12);
                assert_abs_diff_eq!(co.y2, amp * g.s_plus(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn psi_n_family() {
        let s = psi_n_state(5, 0).unwrap();
        assert_abs_diff_eq!(s.as_slice()[0].re, 0.471405, epsilon = 1e-6);
        assert_abs_diff_eq!(s.as_slice()[5].re, 0.881917, epsilon = 1e-6);
        let odd = psi_n_state(5, 1).unwrap();
        assert_abs_diff_eq!(odd.as_slice()[5].re, -0.881917, epsilon = 1e-6);
        let m0 = state1_margins(psi_n_params(5, 0).unwrap(), 5).unwrap();
        let m1 = state1_margins(psi_n_params(5, 1).unwrap(), 5).unwrap();
        assert_abs_diff_eq!(m0.0, m1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m0.1, m1.1, epsilon = 1e-12);
        assert!(psi_n_state(6, 0).is_err());
    }

    #[test]
    fn asymptotics_n5() {
        let (k, c) = asymptotic_margins(5).unwrap();
        assert_abs_diff_eq!(k, 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c, 56.0 / 81.0, epsilon = 1e-15);
        let t = theta_opt_asymptotic(5).unwrap();
        assert_abs_diff_eq!(t, 0.9428, epsilon = 1e-4);
        assert_abs_diff_eq!(t.to_degrees(), 54.0, epsilon = 0.05);
        assert_abs_diff_eq!(
            coexistence_window(8 + 1).unwrap(),
            2.0 * 2f64.sqrt() / 3.0,
            epsilon = 1e-15
        );
        for n in (5..=2001).step_by(2) {
            let (k, c) = asymptotic_margins(n).unwrap();
            assert!(k > 0.0 && c > 0.0);
        }
    }

    #[test]
    fn product_state_does_not_violate() {
        let s = JointState::new([ONE, ZERO, ZERO, ZERO, ZERO, ZERO]).unwrap();
        assert!(chsh_coefficients(&s, 5).unwrap().s_opt <= 2.0);
    }
}
