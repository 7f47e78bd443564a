//! WebAssembly bindings for the browser demo in `www/`. Every export returns
//! a JSON string so the page can stay plain JavaScript.

use chsh_kcbs::analytic::{p2_threshold, state1_margins, StateOneParams};
use chsh_kcbs::experiments::{
    coexistence_point, fourier_test_state1, landscape_scan, linspace, Mode,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Landscape {
    n: usize,
    theta_deg: Vec<f64>,
    phi_deg: Vec<f64>,
    /// chsh[i][j] at theta_deg[i], phi_deg[j]
    chsh: Vec<Vec<f64>>,
    kcbs: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Curve {
    n: usize,
    theta_deg: Vec<f64>,
    chsh: Vec<f64>,
    kcbs: Vec<f64>,
    theta_opt_deg: f64,
    overlap: f64,
    /// KCBS margin vanishes here; violated for smaller theta.
    kcbs_edge_deg: f64,
}

#[derive(Serialize)]
struct FourierOut {
    probabilities: [f64; 3],
    counts: Option<[u64; 3]>,
    estimator_combined: f64,
    estimator_p0: f64,
    estimator_p1: f64,
    exact_reference: f64,
    standard_error: Option<f64>,
    seed: u32,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn err(e: chsh_kcbs::Error) -> String {
    e.to_string()
}

/// Analytic CHSH and KCBS margins over θ ∈ [0°, 180°] × φ ∈ [0°, 360°].
#[wasm_bindgen]
pub fn landscape(n: usize, theta_steps: usize, phi_steps: usize) -> Result<String, String> {
    let thetas = linspace(0.0, 180.0, theta_steps);
    let phis = linspace(0.0, 360.0, phi_steps);
    let recs = landscape_scan(n, &thetas, &phis, Mode::Analytic).map_err(err)?;
    let (chsh, kcbs) = recs
        .chunks(phis.len())
        .map(|row| {
            (
                row.iter().map(|r| r.chsh_margin).collect(),
                row.iter().map(|r| r.kcbs_margin).collect(),
            )
        })
        .unzip();
    to_json(&Landscape {
        n,
        theta_deg: thetas,
        phi_deg: phis,
        chsh,
        kcbs,
    })
}

/// Both margins along φ = 0 for θ ∈ [0°, 90°], with their crossing.
#[wasm_bindgen]
pub fn coexistence(n: usize, points: usize) -> Result<String, String> {
    let cross = coexistence_point(n).map_err(err)?;
    let theta_deg = linspace(0.0, 90.0, points.max(2));
    let mut chsh = Vec::with_capacity(theta_deg.len());
    let mut kcbs = Vec::with_capacity(theta_deg.len());
    for &t in &theta_deg {
        let (c, k) =
            state1_margins(StateOneParams::from_degrees(t, 0.0).map_err(err)?, n).map_err(err)?;
        chsh.push(c);
        kcbs.push(k);
    }
    // KCBS is violated iff cos²(θ/2) exceeds the threshold population
    let kcbs_edge_deg = (2.0 * p2_threshold(n).map_err(err)?.sqrt().acos()).to_degrees();
    to_json(&Curve {
        n,
        theta_deg,
        chsh,
        kcbs,
        theta_opt_deg: cross.theta_opt_deg,
        overlap: cross.overlap,
        kcbs_edge_deg,
    })
}

/// Runs one Fourier test on the prepared state. `alice` is w0, w2 or id;
/// `bob` is b0, bmbm1 or pair:J. `shots = 0` reports exact probabilities.
#[wasm_bindgen(js_name = fourierTest)]
pub fn fourier_test(
    n: usize,
    theta_deg: f64,
    phi_deg: f64,
    alice: &str,
    bob: &str,
    shots: u32,
    seed: u32,
) -> Result<String, String> {
    let params = StateOneParams::from_degrees(theta_deg, phi_deg).map_err(err)?;
    let shots = (shots > 0).then_some(u64::from(shots));
    let run = fourier_test_state1(
        n,
        params,
        alice.parse().map_err(err)?,
        bob.parse().map_err(err)?,
        shots,
        u64::from(seed),
    )
    .map_err(err)?;
    let shown = run.sampled.as_ref().unwrap_or(&run.exact);
    to_json(&FourierOut {
        probabilities: run.exact.probabilities(),
        counts: shown.counts,
        estimator_combined: shown.estimator_combined,
        estimator_p0: shown.estimator_p0,
        estimator_p1: shown.estimator_p1,
        exact_reference: run.reference,
        standard_error: run.standard_error,
        seed,
    })
}
