//! Browser demo bindings. Each export wraps a plain function returning
//! JSON text, so the logic is testable without a JavaScript host.

use std::f64::consts::PI;
use std::fmt::Write as _;

use jsray_core::asymptotics::{log_ratios, shifted_limit_from_logs};
use jsray_core::conformal::{check_diagram_commutativity, rect_to_round, round_flow};
use jsray_core::qcmap::{dilatation_trajectory, QcMapConfig};
use jsray_core::scalar::parse_rational;
use jsray_core::{detour_metric, limit_distance, optimal_shift, ModuliVector};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "null".into()
    }
}

fn array(values: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = values.into_iter().map(num).collect();
    format!("[{}]", items.join(","))
}

fn moduli(text: &str) -> Result<ModuliVector<num_rational::BigRational>, String> {
    let values = text
        .split(',')
        .map(|s| parse_rational(s).ok_or_else(|| format!("invalid number {:?}", s.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    ModuliVector::new(values).map_err(|e| e.to_string())
}

/// Shifted limit distance over `[s_min, s_max]` with the optimal shift,
/// limit distance and detour metric of two moduli vectors.
pub fn shift_curve(m: &str, mp: &str, s_min: f64, s_max: f64, points: usize) -> Result<String, String> {
    let (m, mp) = (moduli(m)?, moduli(mp)?);
    if m.len() != mp.len() {
        return Err(format!("vectors have {} and {} entries", m.len(), mp.len()));
    }
    if !(s_max > s_min) || !(2..=100_000).contains(&points) {
        return Err("need s_max > s_min and 2 to 100000 points".into());
    }
    let logs = log_ratios(&m, &mp);
    let s: Vec<f64> = (0..points).map(|i| s_min + (s_max - s_min) * i as f64 / (points - 1) as f64).collect();
    let values = s.iter().map(|&x| shifted_limit_from_logs(&logs, x));
    let opt = optimal_shift(&m, &mp).map_err(|e| e.to_string())?;
    let limit = limit_distance(&m, &mp).map_err(|e| e.to_string())?;
    let detour = detour_metric(m.values(), mp.values()).map_err(|e| e.to_string())?;
    Ok(format!(
        "{{\"s\":{},\"value\":{},\"beta\":{},\"min_value\":{},\"limit\":{},\"detour\":{}}}",
        array(s.iter().copied()),
        array(values),
        num(opt.beta),
        num(opt.min_value),
        num(limit),
        num(detour)
    ))
}

/// Dilatation of the explicit maps on an evenly spaced time grid.
#[allow(clippy::too_many_arguments)]
pub fn trajectory(ratio: f64, modulus: f64, epsilon: f64, c_re: f64, c_im: f64, t_max: f64, points: usize) -> Result<String, String> {
    if !(t_max > 0.0) || !(2..=10_000).contains(&points) {
        return Err("need t_max > 0 and 2 to 10000 points".into());
    }
    let cfg = QcMapConfig::new(ratio, modulus, epsilon, Complex64::new(c_re, c_im)).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
    let report = dilatation_trajectory(&cfg, &grid).map_err(|e| e.to_string())?;
    Ok(format!(
        "{{\"t\":{},\"k_p\":{},\"k_q\":{},\"valid\":[{}],\"target\":{},\"power\":{}}}",
        array(report.rows.iter().map(|r| r.t)),
        array(report.rows.iter().map(|r| r.k_p)),
        array(report.rows.iter().map(|r| r.k_q_bound)),
        report.rows.iter().map(|r| r.valid.to_string()).collect::<Vec<_>>().join(","),
        num(report.limit_target),
        num(cfg.choice.power)
    ))
}

/// Images in the round annulus of an `n x n` grid on the lower half of the
/// cylinder `[0, a] x [0, b]`, before and after flowing for time `t`.
pub fn chart_grid(a: f64, b: f64, t: f64, n: usize) -> Result<String, String> {
    if !(a > 0.0 && b > 0.0 && t >= 0.0) || !(1..=256).contains(&n) {
        return Err("need a > 0, b > 0, t >= 0 and 1 to 256 grid lines".into());
    }
    let mut before = (Vec::new(), Vec::new());
    let mut after = (Vec::new(), Vec::new());
    for i in 0..n {
        for k in 0..n {
            let z = Complex64::new(a * i as f64 / n as f64, 0.5 * b * (k + 1) as f64 / n as f64);
            let w = rect_to_round(z, a);
            let f = round_flow(w, t).map_err(|e| e.to_string())?;
            before.0.push(w.re);
            before.1.push(w.im);
            after.0.push(f.re);
            after.1.push(f.im);
        }
    }
    let mut out = String::from("{");
    write!(
        out,
        "\"n\":{n},\"x\":{},\"y\":{},\"fx\":{},\"fy\":{},\"inner\":{},\"inner_flowed\":{},\"error\":{}}}",
        array(before.0),
        array(before.1),
        array(after.0),
        array(after.1),
        num((-PI * b / a).exp()),
        num((-PI * (2.0 * t).exp() * b / a).exp()),
        num(check_diagram_commutativity(a, b, t, n))
    )
    .unwrap();
    Ok(out)
}

#[wasm_bindgen(js_name = shiftCurve)]
pub fn shift_curve_js(m: &str, mp: &str, s_min: f64, s_max: f64, points: usize) -> Result<String, JsValue> {
    shift_curve(m, mp, s_min, s_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = trajectory)]
pub fn trajectory_js(ratio: f64, modulus: f64, epsilon: f64, c_re: f64, c_im: f64, t_max: f64, points: usize) -> Result<String, JsValue> {
    trajectory(ratio, modulus, epsilon, c_re, c_im, t_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = chartGrid)]
pub fn chart_grid_js(a: f64, b: f64, t: f64, n: usize) -> Result<String, JsValue> {
    chart_grid(a, b, t, n).map_err(|e| JsValue::from_str(&e))
}
