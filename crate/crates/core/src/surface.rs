//! Cylinder-decomposition model of a surface carrying a Jenkins-Strebel
//! differential, and weighted multicurves with their intersection pairing.
//!
//! A surface is a finite list of flat cylinders `[0, a_j] x [0, b_j]` whose
//! vertical sides are identified, together with a gluing table that cuts
//! every horizontal side into segments and pairs the segments by maps
//! `z -> ±z + c`. Only necessary realizability conditions are checked:
//! each side is tiled by its segments, paired segments have equal length
//! and the pairing is a fixed-point-free involution. Cone-angle conditions
//! at the segment endpoints are not checked.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("PartitionError: {0}")]
    Partition(String),
    #[error("PairingError: {0}")]
    Pairing(String),
    #[error("NonPositiveDatum: {0}")]
    NonPositive(String),
    #[error("DuplicateLabel: {0}")]
    DuplicateLabel(String),
    #[error("UnknownCylinder: {0}")]
    UnknownCylinder(String),
    #[error("NotUnitArea: area is {0}")]
    NotUnitArea(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder<T> {
    pub label: String,
    /// Flat horizontal length `a_j`.
    pub circumference: T,
    /// Flat vertical extent `b_j`.
    pub height: T,
}

impl<T: Scalar> Cylinder<T> {
    pub fn new(label: impl Into<String>, circumference: T, height: T) -> Result<Self, SurfaceError> {
        let label = label.into();
        for (name, value) in [("circumference", &circumference), ("height", &height)] {
            if !value.is_finite() || *value <= T::zero() {
                return Err(SurfaceError::NonPositive(format!(
                    "cylinder {label}: {name} must be positive, got {value:?}"
                )));
            }
        }
        Ok(Cylinder { label, circumference, height })
    }

    /// `b_j / a_j`.
    pub fn modulus(&self) -> T {
        self.height.clone() / self.circumference.clone()
    }

    pub fn area(&self) -> T {
        self.circumference.clone() * self.height.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Bottom,
    Top,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Orientation of a segment identification `z -> ±z + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlueSign {
    Plus,
    Minus,
}

impl GlueSign {
    pub fn as_char(self) -> char {
        match self {
            GlueSign::Plus => '+',
            GlueSign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    pub id: String,
    pub cylinder: String,
    pub side: Side,
    pub offset: T,
    pub length: T,
}

/// Segments of the horizontal sides plus the involution pairing them.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingTable<T> {
    segments: Vec<Segment<T>>,
    partner: Vec<usize>,
    sign: Vec<GlueSign>,
}

impl<T: Scalar> GluingTable<T> {
    /// Builds the table from segments and index pairs. Every segment must
    /// occur in exactly one pair, never paired with itself, and paired
    /// segments must have equal length.
    pub fn new(segments: Vec<Segment<T>>, pairs: &[(usize, usize, GlueSign)]) -> Result<Self, SurfaceError> {
        let n = segments.len();
        let mut seen_ids = BTreeSet::new();
        for seg in &segments {
            if !seen_ids.insert(seg.id.as_str()) {
                return Err(SurfaceError::DuplicateLabel(format!("segment {}", seg.id)));
            }
            if !seg.length.is_finite() || seg.length <= T::zero() {
                return Err(SurfaceError::NonPositive(format!("segment {}: length must be positive", seg.id)));
            }
            if !seg.offset.is_finite() || seg.offset < T::zero() {
                return Err(SurfaceError::NonPositive(format!("segment {}: offset must be nonnegative", seg.id)));
            }
        }

        let mut partner = vec![usize::MAX; n];
        let mut sign = vec![GlueSign::Plus; n];
        for &(i, j, s) in pairs {
            if i >= n || j >= n {
                return Err(SurfaceError::Pairing(format!("pair ({i}, {j}) refers to a missing segment")));
            }
            if i == j {
                return Err(SurfaceError::Pairing(format!("segment {} is glued to itself", segments[i].id)));
            }
            for k in [i, j] {
                if partner[k] != usize::MAX {
                    return Err(SurfaceError::Pairing(format!("segment {} is glued twice", segments[k].id)));
                }
            }
            let (li, lj) = (&segments[i].length, &segments[j].length);
            if !li.rel_eq(lj) {
                return Err(SurfaceError::Pairing(format!(
                    "segments {} and {} have different lengths ({li:?} vs {lj:?})",
                    segments[i].id, segments[j].id
                )));
            }
            partner[i] = j;
            partner[j] = i;
            sign[i] = s;
            sign[j] = s;
        }
        if let Some(k) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(SurfaceError::Pairing(format!("segment {} is not glued", segments[k].id)));
        }
        Ok(GluingTable { segments, partner, sign })
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn partner(&self, index: usize) -> usize {
        self.partner[index]
    }

    pub fn sign(&self, index: usize) -> GlueSign {
        self.sign[index]
    }

    /// Each unordered pair once, smaller index first.
    pub fn pairs(&self) -> Vec<(usize, usize, GlueSign)> {
        (0..self.segments.len())
            .filter(|&i| i < self.partner[i])
            .map(|i| (i, self.partner[i], self.sign[i]))
            .collect()
    }

    /// Applies `f` to every offset and length, keeping the combinatorics.
    pub fn map_lengths<U>(&self, mut f: impl FnMut(&T) -> U) -> GluingTable<U> {
        GluingTable {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    id: s.id.clone(),
                    cylinder: s.cylinder.clone(),
                    side: s.side,
                    offset: f(&s.offset),
                    length: f(&s.length),
                })
                .collect(),
            partner: self.partner.clone(),
            sign: self.sign.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSurface<T> {
    cylinders: Vec<Cylinder<T>>,
    gluing: GluingTable<T>,
}

/// Validates the gluing against the cylinders and assembles the surface.
pub fn build_surface<T: Scalar>(
    cylinders: Vec<Cylinder<T>>,
    gluing: GluingTable<T>,
) -> Result<CylinderSurface<T>, SurfaceError> {
    if cylinders.is_empty() {
        return Err(SurfaceError::NonPositive("a surface needs at least one cylinder".into()));
    }
    let mut index = HashMap::new();
    for (i, c) in cylinders.iter().enumerate() {
        if index.insert(c.label.as_str(), i).is_some() {
            return Err(SurfaceError::DuplicateLabel(format!("cylinder {}", c.label)));
        }
        // Cylinder fields are public, so re-check positivity here.
        Cylinder::new(c.label.clone(), c.circumference.clone(), c.height.clone())?;
    }

    let mut sides: BTreeMap<(usize, Side), Vec<&Segment<T>>> = BTreeMap::new();
    for seg in gluing.segments() {
        let &cyl = index
            .get(seg.cylinder.as_str())
            .ok_or_else(|| SurfaceError::UnknownCylinder(format!("segment {} names {}", seg.id, seg.cylinder)))?;
        sides.entry((cyl, seg.side)).or_default().push(seg);
    }

    for (ci, cyl) in cylinders.iter().enumerate() {
        let a = &cyl.circumference;
        for side in [Side::Bottom, Side::Top] {
            let mut segs = sides.remove(&(ci, side)).unwrap_or_default();
            if segs.is_empty() {
                return Err(SurfaceError::Partition(format!("{} side of cylinder {} has no segments", side, cyl.label)));
            }
            segs.sort_by(|x, y| x.offset.partial_cmp(&y.offset).expect("finite offsets"));
            let mut cursor = T::zero();
            for seg in &segs {
                if !seg.offset.tol_eq(&cursor, a) {
                    return Err(SurfaceError::Partition(format!(
                        "{} side of cylinder {}: segment {} starts at {:?}, expected {:?}",
                        side, cyl.label, seg.id, seg.offset, cursor
                    )));
                }
                cursor = seg.offset.clone() + seg.length.clone();
            }
            if !cursor.tol_eq(a, a) {
                return Err(SurfaceError::Partition(format!(
                    "{} side of cylinder {}: segments cover {:?} of circumference {:?}",
                    side, cyl.label, cursor, a
                )));
            }
        }
    }

    Ok(CylinderSurface { cylinders, gluing })
}

impl<T: Scalar> CylinderSurface<T> {
    pub fn cylinders(&self) -> &[Cylinder<T>] {
        &self.cylinders
    }

    pub fn gluing(&self) -> &GluingTable<T> {
        &self.gluing
    }

    pub fn cylinder_count(&self) -> usize {
        self.cylinders.len()
    }

    pub fn cylinder_index(&self, label: &str) -> Option<usize> {
        self.cylinders.iter().position(|c| c.label == label)
    }

    /// Flat area `sum a_j b_j`, the norm of the differential.
    pub fn area(&self) -> T {
        self.cylinders.iter().fold(T::zero(), |acc, c| acc + c.area())
    }

    /// `(m_1, ..., m_k)` with `m_j = b_j / a_j`, in cylinder order.
    pub fn moduli_vector(&self) -> Vec<T> {
        self.cylinders.iter().map(Cylinder::modulus).collect()
    }

    pub fn has_unit_area(&self) -> bool {
        self.area().tol_eq(&T::one(), &T::one())
    }

    pub fn require_unit_area(self) -> Result<Self, SurfaceError> {
        if self.has_unit_area() {
            Ok(self)
        } else {
            Err(SurfaceError::NotUnitArea(self.area().to_f64()))
        }
    }

    /// Rescales horizontal and vertical lengths independently.
    pub(crate) fn map_lengths<U>(&self, mut horizontal: impl FnMut(&T) -> U, mut vertical: impl FnMut(&T) -> U) -> CylinderSurface<U> {
        CylinderSurface {
            cylinders: self
                .cylinders
                .iter()
                .map(|c| Cylinder {
                    label: c.label.clone(),
                    circumference: horizontal(&c.circumference),
                    height: vertical(&c.height),
                })
                .collect(),
            gluing: self.gluing.map_lengths(horizontal),
        }
    }

    pub fn to_f64(&self) -> CylinderSurface<f64> {
        self.map_lengths(|x| x.to_f64(), |x| x.to_f64())
    }
}

/// Free function form of [`CylinderSurface::moduli_vector`].
pub fn moduli_vector<T: Scalar>(surface: &CylinderSurface<T>) -> Vec<T> {
    surface.moduli_vector()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliationError {
    #[error("FamilyMismatch: multicurves are defined over different curve families")]
    FamilyMismatch,
    #[error("InvalidFamily: {0}")]
    InvalidFamily(String),
    #[error("InvalidWeights: {0}")]
    InvalidWeights(String),
    #[error("NotAFoliation: support curves {0} and {1} intersect")]
    NotAFoliation(String, String),
}

/// A labeled family of simple closed curves with its intersection matrix.
///
/// The first `core_count` members are the core curves of the cylinders
/// and must be pairwise disjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily<T> {
    labels: Vec<String>,
    core_count: usize,
    pairing: Vec<Vec<T>>,
}

impl<T: Scalar> CurveFamily<T> {
    pub fn new(labels: Vec<String>, core_count: usize, pairing: Vec<Vec<T>>) -> Result<Self, FoliationError> {
        let n = labels.len();
        if core_count > n {
            return Err(FoliationError::InvalidFamily(format!("{core_count} core curves in a family of {n}")));
        }
        if pairing.len() != n || pairing.iter().any(|row| row.len() != n) {
            return Err(FoliationError::InvalidFamily(format!("pairing must be {n}x{n}")));
        }
        for i in 0..n {
            if pairing[i][i] != T::zero() {
                return Err(FoliationError::InvalidFamily(format!("nonzero self-intersection for {}", labels[i])));
            }
            for j in 0..n {
                let v = &pairing[i][j];
                if !v.is_finite() || *v < T::zero() {
                    return Err(FoliationError::InvalidFamily(format!("negative pairing {}x{}", labels[i], labels[j])));
                }
                if *v != pairing[j][i] {
                    return Err(FoliationError::InvalidFamily(format!("pairing not symmetric at {}x{}", labels[i], labels[j])));
                }
                if i < core_count && j < core_count && *v != T::zero() {
                    return Err(FoliationError::InvalidFamily(format!(
                        "core curves {} and {} must be disjoint",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(CurveFamily { labels, core_count, pairing })
    }

    /// Only the `k` pairwise-disjoint core curves.
    pub fn cores(k: usize) -> Self {
        let labels = (1..=k).map(|j| format!("g{j}")).collect();
        CurveFamily { labels, core_count: k, pairing: vec![vec![T::zero(); k]; k] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn core_count(&self) -> usize {
        self.core_count
    }

    pub fn pairing(&self, i: usize, j: usize) -> &T {
        &self.pairing[i][j]
    }
}

/// Nonnegative weights on the curves of a shared family.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredMulticurve<T> {
    family: Arc<CurveFamily<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> MeasuredMulticurve<T> {
    pub fn new(family: Arc<CurveFamily<T>>, weights: Vec<T>) -> Result<Self, FoliationError> {
        if weights.len() != family.len() {
            return Err(FoliationError::InvalidWeights(format!(
                "{} weights for a family of {} curves",
                weights.len(),
                family.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(FoliationError::InvalidWeights("weights must be nonnegative".into()));
        }
        Ok(MeasuredMulticurve { family, weights })
    }

    pub fn zero(family: Arc<CurveFamily<T>>) -> Self {
        let weights = vec![T::zero(); family.len()];
        MeasuredMulticurve { family, weights }
    }

    /// `H(q) = sum b_j g_j` over the core curves of `family`.
    pub fn horizontal_foliation(surface: &CylinderSurface<T>, family: Arc<CurveFamily<T>>) -> Result<Self, FoliationError> {
        if family.core_count() != surface.cylinder_count() {
            return Err(FoliationError::InvalidFamily(format!(
                "family has {} core curves, surface has {} cylinders",
                family.core_count(),
                surface.cylinder_count()
            )));
        }
        let mut weights = vec![T::zero(); family.len()];
        for (w, c) in weights.iter_mut().zip(surface.cylinders()) {
            *w = c.height.clone();
        }
        Self::new(family, weights)
    }

    pub fn family(&self) -> &Arc<CurveFamily<T>> {
        &self.family
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == T::zero())
    }

    /// Indices carrying a nonzero weight.
    pub fn support(&self) -> BTreeSet<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > T::zero())
            .map(|(i, _)| i)
            .collect()
    }

    fn same_family(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.family, &other.family) || self.family == other.family
    }
}

/// Bilinear extension of the geometric intersection number:
/// `sum_{j,j'} mu_j nu_j' I[j][j']`.
pub fn intersection_number<T: Scalar>(mu: &MeasuredMulticurve<T>, nu: &MeasuredMulticurve<T>) -> Result<T, FoliationError> {
    if !mu.same_family(nu) {
        return Err(FoliationError::FamilyMismatch);
    }
    let family = &mu.family;
    let mut total = T::zero();
    for (i, wi) in mu.weights.iter().enumerate() {
        if *wi == T::zero() {
            continue;
        }
        for (j, wj) in nu.weights.iter().enumerate() {
            let p = family.pairing(i, j);
            if *wj != T::zero() && *p != T::zero() {
                total = total + wi.clone() * wj.clone() * p.clone();
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FoliationRelation {
    TopEquivAbsCont,
    TopEquivNotAbsCont,
    NotTopEquivZeroIntersection,
    NotTopEquivPositiveIntersection,
}

impl FoliationRelation {
    pub fn is_topologically_equivalent(self) -> bool {
        matches!(self, Self::TopEquivAbsCont | Self::TopEquivNotAbsCont)
    }

    pub fn key(self) -> &'static str {
        match self {
            Self::TopEquivAbsCont => "top-equiv-abs-cont",
            Self::TopEquivNotAbsCont => "top-equiv-not-abs-cont",
            Self::NotTopEquivZeroIntersection => "not-top-equiv-zero",
            Self::NotTopEquivPositiveIntersection => "not-top-equiv-positive",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        [
            Self::TopEquivAbsCont,
            Self::TopEquivNotAbsCont,
            Self::NotTopEquivZeroIntersection,
            Self::NotTopEquivPositiveIntersection,
        ]
        .into_iter()
        .find(|r| r.key() == key)
    }
}

/// Relation between two multicurve foliations over the same family.
///
/// On weighted multicurves topological equivalence and absolute continuity
/// coincide (both mean equal supports), so `TopEquivNotAbsCont` is never
/// produced here; it is reachable through classifier flags only.
pub fn foliation_relation<T: Scalar>(
    h: &MeasuredMulticurve<T>,
    h_prime: &MeasuredMulticurve<T>,
) -> Result<FoliationRelation, FoliationError> {
    if !h.same_family(h_prime) {
        return Err(FoliationError::FamilyMismatch);
    }
    for mc in [h, h_prime] {
        let support: Vec<usize> = mc.support().into_iter().collect();
        for (n, &i) in support.iter().enumerate() {
            for &j in &support[n + 1..] {
                if *mc.family.pairing(i, j) != T::zero() {
                    let labels = mc.family.labels();
                    return Err(FoliationError::NotAFoliation(labels[i].clone(), labels[j].clone()));
                }
            }
        }
    }
    if h.support() == h_prime.support() {
        return Ok(FoliationRelation::TopEquivAbsCont);
    }
    let i = intersection_number(h, h_prime)?;
    Ok(if i == T::zero() {
        FoliationRelation::NotTopEquivZeroIntersection
    } else {
        FoliationRelation::NotTopEquivPositiveIntersection
    })
}
