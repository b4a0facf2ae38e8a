//! JSON renderings of core results. Every document carries the run config.

use grhcot_core::gram::{LogFit, SweepRecord};
use grhcot_core::qmf::{AsymptoticFit, FitTarget, Lattice, ProbeReport};
use serde_json::{json, Value};

use crate::config::RunConfig;

pub fn with_config(cfg: &RunConfig, kind: &str, mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("command".into(), json!(kind));
        map.insert("config".into(), json!(cfg));
    }
    body
}

/// Non-finite floats become `null`.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn record(r: &SweepRecord) -> Value {
    json!({"N": r.n, "R": num(r.r), "dist2": num(r.dist2), "logdetC": num(r.log_det_c)})
}

pub fn log_fit(f: &LogFit, from: usize, to: usize) -> Value {
    json!({
        "from": from,
        "to": to,
        "slope": num(f.slope),
        "slope_std_error": num(f.slope_std_error),
        "intercept": num(f.intercept),
        "residual": num(f.residual),
        "points": f.points,
    })
}

pub fn target_name(t: &FitTarget) -> String {
    match t {
        FitTarget::HNearOne(Lattice::Integer) => "H_at_1".into(),
        FitTarget::HNearOne(Lattice::HalfInteger) => "H_at_1_half_integer".into(),
        FitTarget::CNearOne => "C_at_1".into(),
        FitTarget::CInverse { residue } => format!("C_at_inverse_integers[{residue}]"),
        FitTarget::HNear { a, c } => format!("H_at_alpha[{a}/{c}]"),
        FitTarget::CNear { a, c } => format!("C_at_alpha[{a}/{c}]"),
    }
}

pub fn asymptotic_fit(f: &AsymptoticFit, n_lo: u64, n_hi: u64) -> Value {
    json!({
        "target": target_name(&f.target),
        "side": if f.side > 0 { "+" } else { "-" },
        "n_range": [n_lo, n_hi],
        "log_coefficient": f.log_coefficient.map(num),
        "log_uncertainty": f.log_uncertainty.map(num),
        "powers": f.powers,
        "coefficients": nums(&f.constants),
        "uncertainties": nums(&f.uncertainties),
        "residual": num(f.residual),
        "points": f.points,
    })
}

pub fn probe(r: &ProbeReport, decay_ratio: f64) -> Value {
    json!({
        "x0": r.x0.to_string(),
        "center": num(r.center),
        "offsets": r.offsets,
        "left": nums(&r.left),
        "right": nums(&r.right),
        "oscillation_left": nums(&r.oscillation_left),
        "oscillation_right": nums(&r.oscillation_right),
        "slope_left": nums(&r.slope_left),
        "slope_right": nums(&r.slope_right),
        "log_fit_left": [num(r.log_fit_left.0), num(r.log_fit_left.1)],
        "log_fit_right": [num(r.log_fit_right.0), num(r.log_fit_right.1)],
        "decay_ratio": decay_ratio,
        "oscillation_decays": r.oscillation_decays(decay_ratio),
    })
}
