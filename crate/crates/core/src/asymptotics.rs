//! Asymptotic comparison of two Jenkins-Strebel rays through their moduli.
//!
//! For rays with absolutely continuous vertical foliations and the same
//! endpoint in the augmented boundary, the Teichmüller distance tends to
//! `(1/2) log max_j max(m'_j / m_j, m_j / m'_j)`. Shifting the second ray
//! in time rescales `m'` by `e^{2s}`; the best shift halves the detour
//! metric `(1/2) log max(m'/m) + (1/2) log max(m/m')`, which is half the
//! Hilbert projective distance between the moduli vectors. The classifier
//! at the end encodes the bounded/divergent/asymptotic tables.

use thiserror::Error;

use crate::extremal::{sup_ratio, ExtremalError, SupRatio};
use crate::scalar::Scalar;
use crate::surface::FoliationRelation;

/// Limit of the distance between rays with equal endpoints.
pub const CITE_MAIN: &str = "Thm-main";
/// Asymptotic iff modularly equivalent with equal endpoints.
pub const CITE_ASYMPTOTIC: &str = "Cor-asymptotic";
pub const CITE_DETOUR: &str = "Thm-detour";
pub const CITE_OPTIMAL_SHIFT: &str = "Prop-optimal-shift";
pub const CITE_MODULAR: &str = "Def-modular";
pub const CITE_IVANOV: &str = "Ivanov";
pub const CITE_LENZHEN_MASUR: &str = "Lenzhen-Masur";
pub const CITE_MASUR: &str = "Masur";
pub const CITE_WALSH: &str = "Walsh";
pub const CITE_KERCKHOFF: &str = "Kerckhoff";
/// The tables leave this case open.
pub const CITE_OPEN: &str = "Open";
/// Moduli scale by `e^{2t}` along the flow.
pub const CITE_FLOW: &str = "Remark-flow";
/// Convergence of the ray to a noded surface.
pub const CITE_ENDPOINT: &str = "Prop-endpoint";
/// Limit of rescaled extremal lengths.
pub const CITE_EXTREMAL_LIMIT: &str = "Thm-extremal-limit";
/// Closed form of the supremum of extremal-length ratios.
pub const CITE_SUP_RATIO: &str = "Thm-sup-ratio";
pub const CITE_LENGTH_AREA: &str = "Length-area";
/// Explicit quasiconformal maps between the rays.
pub const CITE_UPPER_ESTIMATE: &str = "Lemma-upper-estimate";
/// Half-cylinder charts and their regluing.
pub const CITE_CHARTS: &str = "Conformal-charts";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("LengthMismatch: {0} vs {1} entries")]
    LengthMismatch(usize, usize),
    #[error("NonPositiveEntry: moduli must be positive")]
    NonPositiveEntry,
    #[error("NegativeEntry: entries must be nonnegative")]
    NegativeEntry,
    #[error("Empty: a moduli vector needs at least one entry")]
    Empty,
    #[error("AllZero: both vectors vanish at every index")]
    AllZero,
}

impl From<ExtremalError> for AsymptoticsError {
    fn from(e: ExtremalError) -> Self {
        match e {
            ExtremalError::LengthMismatch { expected, got } => AsymptoticsError::LengthMismatch(expected, got),
            ExtremalError::AllZero => AsymptoticsError::AllZero,
            _ => AsymptoticsError::NegativeEntry,
        }
    }
}

/// Nonempty vector of strictly positive cylinder moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliVector<T>(Vec<T>);

impl<T: Scalar> ModuliVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, AsymptoticsError> {
        if values.is_empty() {
            return Err(AsymptoticsError::Empty);
        }
        if values.iter().any(|v| !v.is_finite() || *v <= T::zero()) {
            return Err(AsymptoticsError::NonPositiveEntry);
        }
        Ok(ModuliVector(values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: &T) -> Self {
        ModuliVector(self.0.iter().map(|v| v.clone() * factor.clone()).collect())
    }

    pub fn to_f64(&self) -> ModuliVector<f64> {
        ModuliVector(self.0.iter().map(Scalar::to_f64).collect())
    }
}

fn same_len<T>(m: &ModuliVector<T>, mp: &ModuliVector<T>) -> Result<(), AsymptoticsError> {
    if m.0.len() == mp.0.len() {
        Ok(())
    } else {
        Err(AsymptoticsError::LengthMismatch(m.0.len(), mp.0.len()))
    }
}

/// `max_j m'_j / m_j` and `max_j m_j / m'_j`, both finite for positive input.
fn one_sided_maxima<T: Scalar>(m: &ModuliVector<T>, mp: &ModuliVector<T>) -> Result<(T, T), AsymptoticsError> {
    same_len(m, mp)?;
    let up = sup_ratio(m.values(), mp.values())?.finite().expect("positive moduli");
    let down = sup_ratio(mp.values(), m.values())?.finite().expect("positive moduli");
    Ok((up, down))
}

/// `(1/2) log max_j max(m'_j / m_j, m_j / m'_j)`.
///
/// This is the limit of the Teichmüller distance only when the endpoints
/// agree and the foliations are absolutely continuous; checking that is
/// the caller's job.
pub fn limit_distance<T: Scalar>(m: &ModuliVector<T>, mp: &ModuliVector<T>) -> Result<f64, AsymptoticsError> {
    let (up, down) = one_sided_maxima(m, mp)?;
    Ok(0.5 * up.max_of(down).to_f64().ln())
}

/// [`limit_distance`] against the time-shifted ray, whose moduli are
/// `e^{2s} m'`.
pub fn shifted_limit<T: Scalar>(m: &ModuliVector<T>, mp: &ModuliVector<T>, s: f64) -> Result<f64, AsymptoticsError> {
    same_len(m, mp)?;
    let log_ratios = log_ratios(m, mp);
    Ok(shifted_limit_from_logs(&log_ratios, s))
}

/// `log(m'_j / m_j)` for every index.
pub fn log_ratios<T: Scalar>(m: &ModuliVector<T>, mp: &ModuliVector<T>) -> Vec<f64> {
    m.values()
        .iter()
        .zip(mp.values())
        .map(|(a, b)| (b.clone() / a.clone()).to_f64().ln())
        .collect()
}

/// `max_j |log(m'_j/m_j) + 2s| / 2`, the shifted limit in log coordinates.
pub fn shifted_limit_from_logs(log_ratios: &[f64], s: f64) -> f64 {
    log_ratios.iter().map(|l| (l + 2.0 * s).abs()).fold(0.0, f64::max) * 0.5
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularEquivalence<T> {
    /// Common ratio `m'_j / m_j`.
    pub lambda: T,
    /// Time shift `-(1/2) log λ` that makes the rays asymptotic.
    pub alpha: f64,
}

/// Detects `m' = λ m`; ratios are compared exactly in rational mode and to
/// a relative tolerance of `1e-12` in float mode.
pub fn modular_equivalence<T: Scalar>(
    m: &ModuliVector<T>,
    mp: &ModuliVector<T>,
) -> Result<Option<ModularEquivalence<T>>, AsymptoticsError> {
    same_len(m, mp)?;
    let mut ratios = m.values().iter().zip(mp.values()).map(|(a, b)| b.clone() / a.clone());
    let lambda = ratios.next().expect("nonempty");
    if ratios.all(|r| r.rel_eq(&lambda)) {
        let alpha = -0.5 * lambda.to_f64().ln();
        Ok(Some(ModularEquivalence { lambda, alpha }))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalShift {
    /// Minimizing time shift of the second ray.
    pub beta: f64,
    /// Minimal limit distance, half the detour metric.
    pub min_value: f64,
}

/// Time shift minimizing [`shifted_limit`]:
/// `β = (1/4) log(max(m/m') / max(m'/m))`.
pub fn optimal_shift<T: Scalar>(m: &ModuliVector<T>, mp: &ModuliVector<T>) -> Result<OptimalShift, AsymptoticsError> {
    let (up, down) = one_sided_maxima(m, mp)?;
    let beta = 0.25 * (down.clone() / up.clone()).to_f64().ln();
    let min_value = (0.25 * (up * down).to_f64().ln()).max(0.0);
    Ok(OptimalShift { beta, min_value })
}

/// Detour metric between the Busemann points of two rays,
/// `(1/2) log max(m'/m) + (1/2) log max(m/m')`.
///
/// Zero entries encode cylinders missing from a foliation. Indices where
/// both vanish are ignored; any other support mismatch gives `+∞`.
pub fn detour_metric<T: Scalar>(m: &[T], mp: &[T]) -> Result<f64, AsymptoticsError> {
    if m.len() != mp.len() {
        return Err(AsymptoticsError::LengthMismatch(m.len(), mp.len()));
    }
    let up = sup_ratio(m, mp)?;
    let down = sup_ratio(mp, m)?;
    match (up, down) {
        (SupRatio::Finite(u), SupRatio::Finite(d)) => Ok((0.5 * (u * d).to_f64().ln()).max(0.0)),
        _ => Ok(f64::INFINITY),
    }
}

/// Flags describing a pair of rays, as used by the classification tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairDescriptor {
    pub relation: FoliationRelation,
    pub jenkins_strebel: (bool, bool),
    pub uniquely_ergodic: bool,
    pub critical_graph_has_closed_loops: bool,
    pub modularly_equivalent: bool,
    pub endpoints_equal: bool,
}

impl PairDescriptor {
    /// Descriptor of two Jenkins-Strebel rays with absolutely continuous
    /// foliations; modular equivalence is computed from the moduli.
    pub fn jenkins_strebel_pair<T: Scalar>(
        m: &ModuliVector<T>,
        mp: &ModuliVector<T>,
        endpoints_equal: bool,
    ) -> Result<Self, AsymptoticsError> {
        Ok(PairDescriptor {
            relation: FoliationRelation::TopEquivAbsCont,
            jenkins_strebel: (true, true),
            uniquely_ergodic: false,
            critical_graph_has_closed_loops: true,
            modularly_equivalent: modular_equivalence(m, mp)?.is_some(),
            endpoints_equal,
        })
    }

    /// Reason the flags cannot describe a real pair of rays, if any.
    pub fn inconsistency(&self) -> Option<&'static str> {
        let abs_cont = self.relation == FoliationRelation::TopEquivAbsCont;
        let both_js = self.jenkins_strebel.0 && self.jenkins_strebel.1;
        if self.modularly_equivalent && !abs_cont {
            return Some("modular equivalence requires absolutely continuous foliations");
        }
        if abs_cont && self.jenkins_strebel.0 != self.jenkins_strebel.1 {
            return Some("absolutely continuous foliations are both Jenkins-Strebel or both not");
        }
        if self.endpoints_equal && !(abs_cont && both_js) {
            return Some("endpoints in the augmented boundary need absolutely continuous Jenkins-Strebel foliations");
        }
        if self.relation == FoliationRelation::TopEquivNotAbsCont && both_js {
            return Some("topologically equivalent Jenkins-Strebel foliations are absolutely continuous");
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Bounded,
    Divergent,
    Asymptotic,
    BoundedNotAsymptotic,
    Unknown,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Bounded => "Bounded",
            Outcome::Divergent => "Divergent",
            Outcome::Asymptotic => "Asymptotic",
            Outcome::BoundedNotAsymptotic => "BoundedNotAsymptotic",
            Outcome::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub citation: &'static str,
    /// Whether the rays stay at bounded distance.
    pub bounded: bool,
}

impl Verdict {
    fn new(outcome: Outcome, citation: &'static str) -> Self {
        let bounded = outcome != Outcome::Divergent;
        Verdict { outcome, citation, bounded }
    }

    /// Asymptotic rays are in particular bounded.
    pub fn is_consistent(&self) -> bool {
        match self.outcome {
            Outcome::Divergent => !self.bounded,
            _ => self.bounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("InconsistentFlags: {0}")]
    InconsistentFlags(&'static str),
}

/// First table: bounded or divergent from the foliation relation alone.
pub fn boundedness(relation: FoliationRelation) -> Verdict {
    match relation {
        FoliationRelation::TopEquivAbsCont => Verdict::new(Outcome::Bounded, CITE_IVANOV),
        FoliationRelation::TopEquivNotAbsCont => Verdict::new(Outcome::Divergent, CITE_LENZHEN_MASUR),
        FoliationRelation::NotTopEquivPositiveIntersection => Verdict::new(Outcome::Divergent, CITE_IVANOV),
        FoliationRelation::NotTopEquivZeroIntersection => Verdict::new(Outcome::Divergent, CITE_LENZHEN_MASUR),
    }
}

/// Full decision tree: divergence first, then asymptoticity inside the
/// absolutely continuous branch.
pub fn classify(d: &PairDescriptor) -> Result<Verdict, ClassifyError> {
    if let Some(reason) = d.inconsistency() {
        return Err(ClassifyError::InconsistentFlags(reason));
    }
    let first = boundedness(d.relation);
    if first.outcome == Outcome::Divergent {
        return Ok(first);
    }
    let verdict = if d.jenkins_strebel.0 && d.jenkins_strebel.1 {
        if d.modularly_equivalent && d.endpoints_equal {
            Verdict::new(Outcome::Asymptotic, CITE_ASYMPTOTIC)
        } else {
            Verdict::new(Outcome::BoundedNotAsymptotic, CITE_ASYMPTOTIC)
        }
    } else if d.uniquely_ergodic && !d.critical_graph_has_closed_loops {
        Verdict::new(Outcome::Asymptotic, CITE_MASUR)
    } else {
        Verdict::new(Outcome::Unknown, CITE_OPEN)
    };
    Ok(verdict)
}
