//! Browser bindings: each export runs one experiment on the core crate and
//! returns its result as a JSON string for the page to plot.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use coupled_core::dynamics::{
    integrate, sample_gaussian, train_online, IntegratorConfig, Method, PcaSystem, RateSchedule, Trajectory,
};
use coupled_core::linalg::{make_cross, make_spd};
use coupled_core::rules_pca::{self, PcaRuleKind};
use coupled_core::stability::{analyze_all, StabilityReport};

/// Upper bound on points returned per curve.
const MAX_POINTS: usize = 400;

#[derive(Serialize)]
struct Curve {
    rule: &'static str,
    t: Vec<f64>,
    angle: Vec<f64>,
    lambda: Vec<f64>,
}

#[derive(Serialize)]
struct Curves {
    oracle_lambda: f64,
    curves: Vec<Curve>,
}

#[derive(Serialize)]
struct Stability {
    singulars: Vec<f64>,
    reports: Vec<StabilityReport>,
}

fn thin_for(steps: usize) -> usize {
    steps.div_ceil(MAX_POINTS).max(1)
}

fn curve(rule: &'static str, traj: &Trajectory) -> Curve {
    Curve {
        rule,
        t: traj.records.iter().map(|r| r.t).collect(),
        angle: traj.records.iter().map(|r| r.obs.angle).collect(),
        lambda: traj.records.iter().map(|r| r.state[r.state.len() - 1]).collect(),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Averaged flows of all four PCA rules from the same seed.
pub fn pca_flows(spectrum: &[f64], seed: u64, steps: usize, dt: f64) -> Result<String, String> {
    if !(dt > 0.0 && dt.is_finite()) || steps == 0 {
        return Err("dt must be positive and steps at least 1".into());
    }
    let c = make_spd(spectrum, seed).map_err(|e| e.to_string())?;
    let cfg = IntegratorConfig {
        dt,
        steps,
        method: Method::Rk4,
        thin: thin_for(steps),
        stop_residual: None,
    };
    let mut curves = Vec::new();
    let mut oracle_lambda = 0.0;
    for kind in PcaRuleKind::ALL {
        let sys = PcaSystem::new(kind, c.clone()).map_err(|e| e.to_string())?;
        oracle_lambda = sys.oracle_lambda;
        let z0 = rules_pca::init_state(kind, &c, seed, false).map_err(|e| e.to_string())?;
        let traj = integrate(&sys, &z0.to_vec(), &cfg).map_err(|e| format!("{}: {e}", kind.name()))?;
        curves.push(curve(kind.name(), &traj));
    }
    to_json(&Curves { oracle_lambda, curves })
}

/// One online PCA run on Gaussian samples with an inverse-time rate.
pub fn pca_online(rule: &str, spectrum: &[f64], seed: u64, samples: usize, rate: f64) -> Result<String, String> {
    let kind = PcaRuleKind::ALL
        .into_iter()
        .find(|k| k.name() == rule)
        .ok_or_else(|| format!("unknown PCA rule {rule}"))?;
    let c = make_spd(spectrum, seed).map_err(|e| e.to_string())?;
    let sys = PcaSystem::new(kind, c.clone()).map_err(|e| e.to_string())?;
    let z0 = rules_pca::init_state(kind, &c, seed, true).map_err(|e| e.to_string())?;
    let stream = sample_gaussian(&c, seed, samples).map_err(|e| e.to_string())?;
    let schedule = RateSchedule::InverseTime { rate, offset: 100.0 };
    let traj = train_online(&sys, stream, &z0.to_vec(), &schedule, samples, thin_for(samples))
        .map_err(|e| e.to_string())?;
    to_json(&Curves {
        oracle_lambda: sys.oracle_lambda,
        curves: vec![curve(kind.name(), &traj)],
    })
}

/// Stationary points of the constant-sum SVD rule and their spectra.
pub fn sum_stability(singulars: &[f64], rows: usize, cols: usize, seed: u64) -> Result<String, String> {
    let a = make_cross(singulars, rows, cols, seed).map_err(|e| e.to_string())?;
    let reports = analyze_all(&a).map_err(|e| e.to_string())?;
    to_json(&Stability { singulars: singulars.to_vec(), reports })
}

#[wasm_bindgen(js_name = pcaFlows)]
pub fn pca_flows_js(spectrum: &[f64], seed: u32, steps: usize, dt: f64) -> Result<String, JsValue> {
    pca_flows(spectrum, seed.into(), steps, dt).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pcaOnline)]
pub fn pca_online_js(rule: &str, spectrum: &[f64], seed: u32, samples: usize, rate: f64) -> Result<String, JsValue> {
    pca_online(rule, spectrum, seed.into(), samples, rate).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sumStability)]
pub fn sum_stability_js(singulars: &[f64], rows: usize, cols: usize, seed: u32) -> Result<String, JsValue> {
    sum_stability(singulars, rows, cols, seed.into()).map_err(|e| JsValue::from_str(&e))
}
