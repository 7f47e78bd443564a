//! Drivers for the minimal state sin(θ/2)|00⟩ + cos(θ/2)e^{iφ}|12⟩:
//! violation landscapes over (θ, φ), the θ where the CHSH and KCBS margins
//! cross, and how that crossing scales with the cycle size.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    asymptotic_margins, chsh_coefficients, psi_n_params, state1_margins, StateOneParams,
};
use crate::circuits::{
    derive_seed, embed_joint_state, fourier_test_joint, joint_observable, prepare_state1,
    sample_shots, FourierTestReport,
};
use crate::error::{Error, Result};
use crate::linalg::{expectation, ComplexMatrix, JointState};
use crate::observables::{
    alice_rotation, cycle_sign, kcbs_observable, kcbs_pair, validate_cycle, CycleGeometry,
};

/// Bracket offset from the ends of (0, π/2).
pub const BRACKET_EPS: f64 = 1e-6;

/// Final bracket width of the coexistence bisection, radians.
pub const BISECTION_TOL: f64 = 1e-12;

const MAX_BISECTION_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Analytic,
    /// Every correlator estimated by a sampled Fourier test.
    Circuit {
        shots: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    Analytic,
    Circuit,
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModeLabel::Analytic => "analytic",
            ModeLabel::Circuit => "circuit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRecord {
    pub n: usize,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub chsh_margin: f64,
    pub kcbs_margin: f64,
    pub mode: ModeLabel,
    pub shots: Option<u64>,
    /// Seed of this cell, derived from the master seed and the cell index.
    pub seed: Option<u64>,
    /// Standard errors of the sampled margins (circuit mode only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chsh_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kcbs_stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceRecord {
    pub n: usize,
    pub theta_opt_deg: f64,
    pub overlap: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub coexistence: CoexistenceRecord,
    pub psi_n_kcbs_margin: f64,
    pub psi_n_chsh_margin: f64,
    pub asym_kcbs: f64,
    pub asym_chsh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRecord>,
    /// Least-squares slope of ln(overlap) against ln(n); `None` with fewer
    /// than two rows.
    pub overlap_log_log_slope: Option<f64>,
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Evaluates both margins on every (θ, φ) cell, θ-major, angles in degrees.
pub fn landscape_scan(
    n: usize,
    theta_grid_deg: &[f64],
    phi_grid_deg: &[f64],
    mode: Mode,
) -> Result<Vec<LandscapeRecord>> {
    validate_cycle(n)?;
    if theta_grid_deg.is_empty() || phi_grid_deg.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Mode::Circuit { shots: 0, .. } = mode {
        return Err(Error::InvalidParameter(
            "circuit mode requires shots > 0".into(),
        ));
    }
    let ctx = match mode {
        Mode::Analytic => None,
        Mode::Circuit { .. } => Some(CircuitContext::new(n)?),
    };
    let cols = phi_grid_deg.len();
    collect_indexed(theta_grid_deg.len() * cols, |cell| {
        let theta_deg = theta_grid_deg[cell / cols];
        let phi_deg = phi_grid_deg[cell % cols];
        let params = StateOneParams::from_degrees(theta_deg, phi_deg)?;
        match (mode, &ctx) {
            (Mode::Circuit { shots, seed }, Some(ctx)) => {
                let cell_seed = derive_seed(seed, cell as u64);
                let est = ctx.estimate(params, shots, cell_seed)?;
                Ok(LandscapeRecord {
                    n,
                    theta_deg,
                    phi_deg,
                    chsh_margin: est.chsh_margin,
                    kcbs_margin: est.kcbs_margin,
                    mode: ModeLabel::Circuit,
                    shots: Some(shots),
                    seed: Some(cell_seed),
                    chsh_stderr: Some(est.chsh_stderr),
                    kcbs_stderr: Some(est.kcbs_stderr),
                })
            }
            _ => {
                let (chsh_margin, kcbs_margin) = state1_margins(params, n)?;
                Ok(LandscapeRecord {
                    n,
                    theta_deg,
                    phi_deg,
                    chsh_margin,
                    kcbs_margin,
                    mode: ModeLabel::Analytic,
                    shots: None,
                    seed: None,
                    chsh_stderr: None,
                    kcbs_stderr: None,
                })
            }
        }
    })
}

/// Runs `f` on `0..len`, in parallel when the `parallel` feature is on;
/// results keep index order either way.
fn collect_indexed<R: Send>(
    len: usize,
    f: impl Fn(usize) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Sampled margins of one landscape cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitEstimate {
    pub chsh_margin: f64,
    pub kcbs_margin: f64,
    pub chsh_stderr: f64,
    pub kcbs_stderr: f64,
}

/// Bob's observables for a fixed n, reused across cells.
struct CircuitContext {
    geometry: CycleGeometry,
    b0: ComplexMatrix,
    pair_m: ComplexMatrix,
    pairs: Vec<ComplexMatrix>,
}

impl CircuitContext {
    fn new(n: usize) -> Result<Self> {
        let geometry = CycleGeometry::new(n)?;
        Ok(CircuitContext {
            geometry,
            b0: kcbs_observable(n, 0)?.matrix,
            pair_m: kcbs_pair(n, geometry.m)?.matrix,
            pairs: (0..n)
                .map(|j| kcbs_pair(n, j).map(|o| o.matrix))
                .collect::<Result<_>>()?,
        })
    }

    /// Prepares the state with the circuit, then estimates every correlator
    /// with its own sampled Fourier test. Alice's angles are the analytic
    /// optimum for the cell.
    fn estimate(&self, params: StateOneParams, shots: u64, seed: u64) -> Result<CircuitEstimate> {
        let n = self.geometry.n;
        let state = prepare_state1(params.theta, params.phi)?;
        let coeffs = chsh_coefficients(&state, n)?;
        let r0 = alice_rotation(coeffs.omega0).matrix;
        let r2 = alice_rotation(coeffs.omega2).matrix;
        let id2 = ComplexMatrix::identity(2);

        let chsh_terms = [
            (&r2, &self.pair_m, 1.0),
            (&r2, &self.b0, 1.0),
            (&r0, &self.pair_m, 1.0),
            (&r0, &self.b0, -1.0),
        ];
        let kcbs_terms: Vec<_> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(j, p)| (&id2, p, cycle_sign(n, j)))
            .collect();
        let (chsh, chsh_stderr) = sampled_sum(&state, &chsh_terms, shots, seed, 0)?;
        let (kcbs, kcbs_stderr) =
            sampled_sum(&state, &kcbs_terms, shots, seed, chsh_terms.len() as u64)?;
        Ok(CircuitEstimate {
            chsh_margin: chsh - 2.0,
            kcbs_margin: kcbs - self.geometry.classical_bound(),
            chsh_stderr,
            kcbs_stderr,
        })
    }
}

/// Signed sum of sampled correlators with its standard error. Term `i`
/// draws from `derive_seed(seed, first_term + i)`.
fn sampled_sum(
    state: &JointState,
    terms: &[(&ComplexMatrix, &ComplexMatrix, f64)],
    shots: u64,
    seed: u64,
    first_term: u64,
) -> Result<(f64, f64)> {
    let (mut value, mut var) = (0.0, 0.0);
    for (i, &(a, b, sign)) in terms.iter().enumerate() {
        let exact = fourier_test_joint(a, b, state)?;
        let sampled = sample_shots(&exact, shots, derive_seed(seed, first_term + i as u64))?;
        value += sign * sampled.estimator_combined;
        var += exact.standard_error(shots).powi(2);
    }
    Ok((value, var.sqrt()))
}

/// Sampled margins of a single cell; the building block of circuit-mode
/// landscapes, exposed for statistical checks.
pub fn circuit_estimate(
    n: usize,
    params: StateOneParams,
    shots: u64,
    seed: u64,
) -> Result<CircuitEstimate> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    CircuitContext::new(n)?.estimate(params, shots, seed)
}

/// Alice's side of a single Fourier test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AliceSetting {
    /// R(ω₀) at the state's optimal ω₀.
    W0,
    /// R(ω₂) at the state's optimal ω₂.
    W2,
    Identity,
}

impl FromStr for AliceSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w0" => Ok(AliceSetting::W0),
            "w2" => Ok(AliceSetting::W2),
            "id" => Ok(AliceSetting::Identity),
            other => Err(Error::InvalidParameter(format!(
                "unknown Alice setting `{other}`, expected w0, w2 or id"
            ))),
        }
    }
}

/// Bob's side of a single Fourier test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobSetting {
    B0,
    /// B_m B_{m+1}, m = (n−1)/2.
    BmBm1,
    /// B_j B_{j+1 mod n}.
    Pair(usize),
}

impl FromStr for BobSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b0" => Ok(BobSetting::B0),
            "bmbm1" => Ok(BobSetting::BmBm1),
            other => match other.strip_prefix("pair:").map(str::parse::<usize>) {
                Some(Ok(j)) => Ok(BobSetting::Pair(j)),
                _ => Err(Error::InvalidParameter(format!(
                    "unknown Bob setting `{other}`, expected b0, bmbm1 or pair:J"
                ))),
            },
        }
    }
}

/// One Fourier test on the circuit-prepared minimal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierRun {
    pub exact: FourierTestReport,
    pub sampled: Option<FourierTestReport>,
    /// ⟨ψ|(A ⊕ 1) ⊗ B|ψ⟩ by direct matrix expectation.
    pub reference: f64,
    pub standard_error: Option<f64>,
}

pub fn fourier_test_state1(
    n: usize,
    params: StateOneParams,
    alice: AliceSetting,
    bob: BobSetting,
    shots: Option<u64>,
    seed: u64,
) -> Result<FourierRun> {
    let g = CycleGeometry::new(n)?;
    let bob = match bob {
        BobSetting::B0 => kcbs_observable(n, 0)?.matrix,
        BobSetting::BmBm1 => kcbs_pair(n, g.m)?.matrix,
        BobSetting::Pair(j) => kcbs_pair(n, j)?.matrix,
    };
    let state = prepare_state1(params.theta, params.phi)?;
    let alice = match alice {
        AliceSetting::W0 => alice_rotation(chsh_coefficients(&state, n)?.omega0).matrix,
        AliceSetting::W2 => alice_rotation(chsh_coefficients(&state, n)?.omega2).matrix,
        AliceSetting::Identity => ComplexMatrix::identity(2),
    };
    let exact = fourier_test_joint(&alice, &bob, &state)?;
    let reference = expectation(&embed_joint_state(&state), &joint_observable(&alice, &bob)?)?;
    let sampled = shots.map(|s| sample_shots(&exact, s, seed)).transpose()?;
    Ok(FourierRun {
        standard_error: shots.map(|s| exact.standard_error(s)),
        exact,
        sampled,
        reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionResult {
    pub root: f64,
    pub iterations: usize,
}

/// Bisection on a sign change of `f` over `[lo, hi]`, stopping once the
/// bracket is narrower than `tol`. `None` if the endpoints share a sign.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Option<BisectionResult> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(BisectionResult {
            root: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Some(BisectionResult {
            root: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    let mut iterations = 0;
    while hi - lo > tol && iterations < MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Some(BisectionResult {
                root: mid,
                iterations,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(BisectionResult {
        root: 0.5 * (lo + hi),
        iterations,
    })
}

/// Solves chsh_margin(θ) = kcbs_margin(θ) at φ = 0 for θ ∈ (0, π/2).
pub fn coexistence_point(n: usize) -> Result<CoexistenceRecord> {
    validate_cycle(n)?;
    let margins =
        |theta: f64| state1_margins(StateOneParams { theta, phi: 0.0 }, n).expect("valid n");
    let diff = |theta: f64| {
        let (c, k) = margins(theta);
        c - k
    };
    let found = bisect(diff, BRACKET_EPS, FRAC_PI_2 - BRACKET_EPS, BISECTION_TOL)
        .ok_or(Error::NoIntersection(n))?;
    let (chsh, kcbs) = margins(found.root);
    Ok(CoexistenceRecord {
        n,
        theta_opt_deg: found.root.to_degrees(),
        overlap: 0.5 * (chsh + kcbs),
        iterations: found.iterations,
        residual: (chsh - kcbs).abs(),
    })
}

/// Ordinary least-squares slope of ln y against ln x.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Coexistence points for each n, in input order.
pub fn coexistence_curve(ns: &[usize]) -> Result<Vec<CoexistenceRecord>> {
    collect_indexed(ns.len(), |i| coexistence_point(ns[i]))
}

/// Coexistence points and ψ_n margins for every odd n in `[n_min, n_max]`.
pub fn scaling_study(n_min: usize, n_max: usize) -> Result<ScalingStudy> {
    validate_cycle(n_min)?;
    validate_cycle(n_max)?;
    if n_max < n_min {
        return Err(Error::InvalidParameter(format!(
            "n range {n_min}..{n_max} is empty"
        )));
    }
    let ns: Vec<usize> = (n_min..=n_max).step_by(2).collect();
    scaling_study_over(&ns)
}

/// As [`scaling_study`] for an explicit list of cycle sizes.
pub fn scaling_study_over(ns: &[usize]) -> Result<ScalingStudy> {
    let rows = collect_indexed(ns.len(), |i| {
        let n = ns[i];
        let coexistence = coexistence_point(n)?;
        let (psi_n_chsh_margin, psi_n_kcbs_margin) = state1_margins(psi_n_params(n, 0)?, n)?;
        let (asym_kcbs, asym_chsh) = asymptotic_margins(n)?;
        Ok(ScalingRecord {
            coexistence,
            psi_n_kcbs_margin,
            psi_n_chsh_margin,
            asym_kcbs,
            asym_chsh,
        })
    })?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.coexistence.n as f64, r.coexistence.overlap))
        .collect();
    Ok(ScalingStudy {
        overlap_log_log_slope: log_log_slope(&pts),
        rows,
    })
}
