//! Explicit quasiconformal maps between the half-cylinder annuli of two
//! rays with equal endpoints, and their dilatation as `t -> ∞`.
//!
//! Fix one punctured disk of the limit surface and let the identification
//! of the two limits be `h(z) = c z + ψ(z)` near the puncture. At time `t`
//! the source annulus is `{δ <= |z| < 1}` with `δ = exp(-e^{2t} m π)` and
//! the target inner radius is `δ^M`, where `M = m'/m`. The map `F_t` is
//!
//! * `P` on `δ <= |z| <= Δ`: an affine twist-and-stretch in logarithmic
//!   coordinates taking `|z| = δ` to `|w| = δ^M` and agreeing with `c z`
//!   on `|z| = Δ`;
//! * `Q(z) = c z + φ(|z|) ψ(z)` with `φ(r) = r/Δ - 1` on `Δ <= |z| <= 2Δ`;
//! * `h` itself on `2Δ <= |z| < 1`.
//!
//! Here `Δ = δ^{M^X}` for an exponent `X` chosen from `M` and a slack `ε`
//! (`Δ = δ^{1/2}` when `M = 1`). The dilatation of `P` tends to
//! `(M - M^X)/(1 - M^X)` (or its reciprocal when `M < 1`), which is below
//! `max(M, 1/M) + ε`; that of `Q` tends to 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::ray::PuncturedDisk;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("DegenerateMap: affine map with alpha = {alpha}, beta = {beta} is not orientation preserving")]
    DegenerateMap { alpha: f64, beta: f64 },
    #[error("OutOfDomain: |z| = {radius} is outside [{inner}, 1)")]
    OutOfDomain { radius: f64, inner: f64 },
    #[error("ValidityThresholdNotMet: construction is not valid at t = {0}")]
    ValidityThresholdNotMet(f64),
    #[error("EmptyGrid: the time grid is empty")]
    EmptyGrid,
    #[error("NonIncreasingGrid: time grid must be strictly increasing")]
    NonIncreasingGrid,
}

/// The three regimes of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `M > 1`, `X < 0`.
    Stretch,
    /// `M < 1`, `X > 2`.
    Shrink,
    /// `M = 1`, `Δ = δ^{1/2}`.
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentChoice {
    pub regime: Regime,
    /// `X`; `None` in the balanced regime.
    pub exponent: Option<f64>,
    /// `M^X`, or `1/2` in the balanced regime.
    pub power: f64,
    /// Limit of the dilatation of `P` as `t -> ∞`.
    pub limit_target: f64,
}

fn admissible_bound(ratio: f64, epsilon: f64) -> f64 {
    if ratio > 1.0 {
        (epsilon / (ratio + epsilon - 1.0)).ln() / ratio.ln()
    } else {
        (ratio * epsilon / (1.0 / ratio - 1.0 + epsilon)).ln() / ratio.ln()
    }
}

fn target_for(ratio: f64, power: f64, regime: Regime) -> f64 {
    match regime {
        Regime::Stretch => (ratio - power) / (1.0 - power),
        Regime::Shrink => (1.0 - power) / (ratio - power),
        Regime::Balanced => 1.0,
    }
}

fn check_inputs(ratio: f64, epsilon: f64) -> Result<(), QcError> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(QcError::Domain(format!("modulus ratio must be positive, got {ratio}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QcError::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Picks `X` strictly inside the admissible region: half a unit past the
/// bound, rounded to the nearest multiple of 1/2 (which stays at least a
/// quarter unit inside).
pub fn choose_exponent(ratio: f64, epsilon: f64) -> Result<ExponentChoice, QcError> {
    check_inputs(ratio, epsilon)?;
    if ratio == 1.0 {
        return Ok(ExponentChoice { regime: Regime::Balanced, exponent: None, power: 0.5, limit_target: 1.0 });
    }
    let (regime, step) = if ratio > 1.0 { (Regime::Stretch, -0.5) } else { (Regime::Shrink, 0.5) };
    let exponent = ((admissible_bound(ratio, epsilon) + step) * 2.0).round() / 2.0;
    exponent_choice(ratio, epsilon, exponent).map(|c| ExponentChoice { regime, ..c })
}

/// Validates a caller-supplied exponent against the admissible region.
pub fn exponent_choice(ratio: f64, epsilon: f64, exponent: f64) -> Result<ExponentChoice, QcError> {
    check_inputs(ratio, epsilon)?;
    if ratio == 1.0 {
        return choose_exponent(ratio, epsilon);
    }
    let bound = admissible_bound(ratio, epsilon);
    let regime = if ratio > 1.0 { Regime::Stretch } else { Regime::Shrink };
    let admissible = match regime {
        Regime::Stretch => exponent < bound,
        _ => exponent > bound,
    };
    if !admissible {
        return Err(QcError::Domain(format!("exponent {exponent} is not admissible (bound {bound})")));
    }
    let power = ratio.powf(exponent);
    Ok(ExponentChoice { regime, exponent: Some(exponent), power, limit_target: target_for(ratio, power, regime) })
}

/// Data of one annulus piece `F_{j,t}^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcMapConfig {
    /// `M = m'/m`.
    pub ratio: f64,
    /// Source modulus `m`.
    pub modulus: f64,
    pub epsilon: f64,
    pub choice: ExponentChoice,
    /// Leading coefficient `c` of the identification at the puncture.
    pub leading: Complex64,
    /// Which disk the piece lives on; fixes the branch of `arg c`.
    pub disk: PuncturedDisk,
    /// Coefficients of `z^2, z^3, ...` in `ψ`.
    pub tail: Vec<Complex64>,
    /// Constant `C` with `|ψ(z)| <= C Δ^2` and `|ψ'(z)| <= 2 C Δ` near 0.
    pub psi_bound: f64,
}

impl QcMapConfig {
    pub fn new(ratio: f64, modulus: f64, epsilon: f64, leading: Complex64) -> Result<Self, QcError> {
        if !(modulus > 0.0) || !modulus.is_finite() {
            return Err(QcError::Domain(format!("modulus must be positive, got {modulus}")));
        }
        if leading.norm() == 0.0 || !leading.norm().is_finite() {
            return Err(QcError::Domain("leading coefficient must be nonzero".into()));
        }
        let choice = choose_exponent(ratio, epsilon)?;
        Ok(QcMapConfig {
            ratio,
            modulus,
            epsilon,
            choice,
            leading,
            disk: PuncturedDisk::Lower,
            tail: Vec::new(),
            psi_bound: 0.0,
        })
    }

    pub fn with_exponent(mut self, exponent: f64) -> Result<Self, QcError> {
        self.choice = exponent_choice(self.ratio, self.epsilon, exponent)?;
        Ok(self)
    }

    pub fn with_disk(mut self, disk: PuncturedDisk) -> Self {
        self.disk = disk;
        self
    }

    /// Polynomial tail; the bound `C` is raised to cover it on `|z| <= 1/2`.
    pub fn with_tail(mut self, coefficients: Vec<Complex64>) -> Self {
        let mut value = 0.0;
        let mut slope = 0.0;
        for (k, c) in coefficients.iter().enumerate() {
            let n = (k + 2) as i32;
            value += c.norm() * 2f64.powi(n);
            slope += n as f64 * c.norm() * 2f64.powi(n - 2);
        }
        self.tail = coefficients;
        self.psi_bound = self.psi_bound.max(value).max(slope);
        self
    }

    /// Bound `C` for a tail that is not given explicitly.
    pub fn with_psi_bound(mut self, bound: f64) -> Self {
        self.psi_bound = self.psi_bound.max(bound);
        self
    }

    /// `arg c` in `(-π, π]` on the lower disk and `[-π, π)` on the upper one.
    pub fn leading_arg(&self) -> f64 {
        let a = self.leading.arg();
        match self.disk {
            PuncturedDisk::Upper if a == PI => -PI,
            PuncturedDisk::Lower if a == -PI => PI,
            _ => a,
        }
    }

    /// `M` in the general regimes, 1 in the balanced one.
    fn effective_ratio(&self) -> f64 {
        match self.choice.regime {
            Regime::Balanced => 1.0,
            _ => self.ratio,
        }
    }

    /// `e^{2t} m π = -log δ(t)`.
    fn depth(&self, t: f64) -> f64 {
        (2.0 * t).exp() * self.modulus * PI
    }

    /// `δ^M < |c| δ^{M^X}`, compared in logarithms so that it stays
    /// meaningful after `δ` underflows.
    pub fn is_valid_at(&self, t: f64) -> bool {
        let log_delta = -self.depth(t);
        (self.effective_ratio() - self.choice.power) * log_delta < self.leading.norm().ln()
    }

    /// `ψ(z)` and `ψ'(z)` for the polynomial tail.
    fn psi(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut derivative = Complex64::new(0.0, 0.0);
        for (k, c) in self.tail.iter().enumerate().rev() {
            value = value * z + c;
            derivative = derivative * z + c * (k + 2) as f64;
        }
        (value * z * z, derivative * z)
    }

    /// `ψ(Δu) / Δ` and `ψ'(Δu)`; stays finite when `Δ` underflows.
    fn psi_rescaled(&self, u: Complex64, big_delta: f64) -> (Complex64, Complex64) {
        let w = u * big_delta;
        let mut value = Complex64::new(0.0, 0.0);
        let mut derivative = Complex64::new(0.0, 0.0);
        for (k, c) in self.tail.iter().enumerate().rev() {
            value = value * w + c;
            derivative = derivative * w + c * (k + 2) as f64;
        }
        (value * w * u, derivative * w)
    }
}

/// `|arg c^1 + arg c^2| < 2π`, needed for `F_t` to lie in the right
/// homotopy class. Recorded only; homotopy classes are not checked.
pub fn twist_is_legitimate(lower: &QcMapConfig, upper: &QcMapConfig) -> bool {
    (lower.leading_arg() + upper.leading_arg()).abs() < 2.0 * PI
}

/// Inner radius `δ` and switching radius `Δ`, with their logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radii {
    pub log_delta: f64,
    pub log_big_delta: f64,
}

impl Radii {
    pub fn delta(&self) -> f64 {
        self.log_delta.exp()
    }

    pub fn big_delta(&self) -> f64 {
        self.log_big_delta.exp()
    }
}

/// `δ = exp(-e^{2t} m π)` and `Δ = δ^{M^X}` (`δ^{1/2}` when `M = 1`).
pub fn radii(config: &QcMapConfig, t: f64) -> Radii {
    let log_delta = -config.depth(t);
    Radii { log_delta, log_big_delta: config.choice.power * log_delta }
}

/// Parameters of the affine map `x + iy -> x + α y + i β y` in the middle
/// of `P`.
pub fn affine_params(config: &QcMapConfig, t: f64) -> (f64, f64) {
    let depth = config.depth(t);
    let gap = 1.0 - config.choice.power;
    let alpha = -config.leading_arg() / (depth * gap);
    let beta = (config.effective_ratio() - config.choice.power + config.leading.norm().ln() / depth) / gap;
    (alpha, beta)
}

/// Maximal dilatation `(|f_z| + |f_zbar|) / (|f_z| - |f_zbar|)` of the
/// affine map with `f_z = (1 + β - iα)/2`, `f_zbar = (1 - β + iα)/2`.
pub fn affine_dilatation(alpha: f64, beta: f64) -> Result<f64, QcError> {
    let p = Complex64::new(1.0 + beta, -alpha).norm();
    let q = Complex64::new(1.0 - beta, alpha).norm();
    // p^2 - q^2 = 4β, so p - q = 4β / (p + q) without cancellation.
    if !(beta > 0.0) || !(p - q > 0.0) {
        return Err(QcError::DegenerateMap { alpha, beta });
    }
    let sum = p + q;
    Ok((sum * sum / (4.0 * beta)).max(1.0))
}

/// Evaluates `F_t` at `z`, dispatching on `|z|`.
pub fn eval_f(config: &QcMapConfig, t: f64, z: Complex64) -> Result<Complex64, QcError> {
    if !config.is_valid_at(t) {
        return Err(QcError::ValidityThresholdNotMet(t));
    }
    let radii = radii(config, t);
    let (delta, big_delta) = (radii.delta(), radii.big_delta());
    let r = z.norm();
    // δ is rebuilt from its logarithm; allow a few ulps on the inner circle.
    if !(r >= delta * (1.0 - 1e-14) && r < 1.0) || delta == 0.0 {
        return Err(QcError::OutOfDomain { radius: r, inner: delta });
    }
    let c = config.leading;
    if r <= big_delta {
        let gap = 1.0 - config.choice.power;
        let shrink = (1.0 - config.effective_ratio()) / gap;
        let log_r = r.ln();
        let twist = 1.0 / gap + log_r / (radii.log_big_delta - radii.log_delta);
        let log_c = Complex64::new(c.norm().ln(), config.leading_arg());
        let modulus_factor = (shrink * (radii.log_big_delta - log_r)).exp();
        Ok((log_c * twist).exp() * modulus_factor * z)
    } else if r <= 2.0 * big_delta {
        let phi = r / big_delta - 1.0;
        Ok(c * z + config.psi(z).0 * phi)
    } else {
        Ok(c * z + config.psi(z).0)
    }
}

/// Upper bound for the dilatation of `Q` from `|ψ| <= C Δ^2` and
/// `|ψ'| <= 2 C Δ`; infinite when the bound degenerates.
pub fn q_dilatation_bound(config: &QcMapConfig, t: f64) -> f64 {
    let c = config.leading.norm();
    let slack = config.psi_bound * radii(config, t).big_delta() * 2.5;
    if slack >= c {
        f64::INFINITY
    } else {
        ((c + slack) / (c - slack)).max(1.0)
    }
}

/// Grid scan of `Q` on `Δ <= |z| <= 2Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QScan {
    pub max_dilatation: f64,
    pub min_jacobian: f64,
}

/// Maximizes the Beltrami quotient of `Q` over an `n x n` polar grid and
/// records the smallest Jacobian, as a cross-check of
/// [`q_dilatation_bound`] and of local injectivity.
pub fn scan_q_map(config: &QcMapConfig, t: f64, n: usize) -> QScan {
    let big_delta = radii(config, t).big_delta();
    let c = config.leading;
    let mut max_dilatation: f64 = 1.0;
    let mut min_jacobian = f64::INFINITY;
    let n = n.max(2);
    // z = Δu with 1 <= |u| <= 2, so nothing underflows for large t.
    for i in 0..n {
        let r = 1.0 + i as f64 / (n - 1) as f64;
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let (psi_scaled, dpsi) = config.psi_rescaled(phase * r, big_delta);
            let f_zbar = phase * psi_scaled * 0.5;
            let f_z = c + phase.conj() * psi_scaled * 0.5 + dpsi * (r - 1.0);
            let (a, b) = (f_z.norm(), f_zbar.norm());
            min_jacobian = min_jacobian.min(a * a - b * b);
            if a > b {
                max_dilatation = max_dilatation.max((a + b) / (a - b));
            } else {
                max_dilatation = f64::INFINITY;
            }
        }
    }
    QScan { max_dilatation, min_jacobian }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub valid: bool,
    pub k_p: f64,
    pub k_q_bound: f64,
    /// `max(K(P), K(Q))`; the identification `h` is conformal.
    pub k_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatationReport {
    pub rows: Vec<TrajectoryRow>,
    pub limit_target: f64,
    /// Smallest grid time at which the construction is valid.
    pub validity_threshold: Option<f64>,
    /// `limit_target < max(M, 1/M) + ε`.
    pub target_within_slack: bool,
}

impl DilatationReport {
    /// `|K_total - target|` at the last valid grid time.
    pub fn final_gap(&self) -> Option<f64> {
        self.rows.iter().rev().find(|r| r.valid).map(|r| (r.k_total - self.limit_target).abs())
    }
}

pub fn dilatation_trajectory(config: &QcMapConfig, t_grid: &[f64]) -> Result<DilatationReport, QcError> {
    if t_grid.is_empty() {
        return Err(QcError::EmptyGrid);
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < 0.0 {
        return Err(QcError::NonIncreasingGrid);
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let valid = config.is_valid_at(t);
        let (alpha, beta) = affine_params(config, t);
        let k_p = affine_dilatation(alpha, beta).unwrap_or(f64::INFINITY);
        let k_q_bound = q_dilatation_bound(config, t);
        rows.push(TrajectoryRow { t, valid, k_p, k_q_bound, k_total: k_p.max(k_q_bound) });
    }
    let validity_threshold = rows.iter().find(|r| r.valid).map(|r| r.t);
    let slack = config.ratio.max(1.0 / config.ratio) + config.epsilon;
    Ok(DilatationReport {
        rows,
        limit_target: config.choice.limit_target,
        validity_threshold,
        target_within_slack: config.choice.limit_target < slack,
    })
}
