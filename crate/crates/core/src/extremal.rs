//! Extremal-length asymptotics along Jenkins-Strebel rays.
//!
//! Along a ray with moduli `m_j`, `e^{-2t} Ext_{r(t)}(μ)` tends to
//! `E(μ)^2 = sum_j m_j i(g_j, μ)^2`. Comparing two rays through the ratio
//! `E'(μ)^2 / E(μ)^2` gives, via Kerckhoff's formula, lower bounds for the
//! Teichmüller distance; the supremum of the ratio is attained at a
//! coordinate direction and equals `max_j m'_j / m_j`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use thiserror::Error;

use crate::asymptotics::ModuliVector;
use crate::scalar::Scalar;
use crate::surface::{CurveFamily, CylinderSurface, FoliationError, MeasuredMulticurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremalError {
    #[error("LengthMismatch: expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("AllZero: both vectors vanish at every index")]
    AllZero,
    #[error("NegativeEntry: entries must be nonnegative")]
    NegativeEntry,
    #[error("EmptySample: at least one sample curve is required")]
    EmptySample,
    #[error("IndexError: cylinder {index} out of range for {count} cylinders")]
    Index { index: usize, count: usize },
    #[error("NegativeTime: {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

fn check_len(expected: usize, got: usize) -> Result<(), ExtremalError> {
    if expected == got {
        Ok(())
    } else {
        Err(ExtremalError::LengthMismatch { expected, got })
    }
}

/// `sum_j m_j i_j^2`, exact in rational mode.
pub fn e_functional_squared<T: Scalar>(m: &ModuliVector<T>, i_values: &[T]) -> Result<T, ExtremalError> {
    check_len(m.len(), i_values.len())?;
    if i_values.iter().any(|x| *x < T::zero()) {
        return Err(ExtremalError::NegativeEntry);
    }
    Ok(m.values()
        .iter()
        .zip(i_values)
        .fold(T::zero(), |acc, (mj, ij)| acc + mj.clone() * ij.clone() * ij.clone()))
}

/// `(sum_j m_j i_j^2)^{1/2}`.
pub fn e_functional<T: Scalar>(m: &ModuliVector<T>, i_values: &[T]) -> Result<f64, ExtremalError> {
    Ok(e_functional_squared(m, i_values)?.to_f64().sqrt())
}

/// The limit functional of a ray, evaluated on multicurves through the
/// intersection pairing of their family.
#[derive(Debug, Clone)]
pub struct EFunctional<T> {
    moduli: ModuliVector<T>,
    family: Arc<CurveFamily<T>>,
}

impl<T: Scalar> EFunctional<T> {
    pub fn new(moduli: ModuliVector<T>, family: Arc<CurveFamily<T>>) -> Result<Self, ExtremalError> {
        check_len(moduli.len(), family.core_count())?;
        Ok(EFunctional { moduli, family })
    }

    /// `i(g_j, μ)` for every core curve `g_j`.
    pub fn core_intersections(&self, mu: &MeasuredMulticurve<T>) -> Result<Vec<T>, ExtremalError> {
        if **mu.family() != *self.family {
            return Err(FoliationError::FamilyMismatch.into());
        }
        Ok((0..self.family.core_count())
            .map(|j| {
                mu.weights().iter().enumerate().fold(T::zero(), |acc, (k, w)| {
                    acc + w.clone() * self.family.pairing(j, k).clone()
                })
            })
            .collect())
    }

    pub fn squared(&self, mu: &MeasuredMulticurve<T>) -> Result<T, ExtremalError> {
        e_functional_squared(&self.moduli, &self.core_intersections(mu)?)
    }

    pub fn eval(&self, mu: &MeasuredMulticurve<T>) -> Result<f64, ExtremalError> {
        Ok(self.squared(mu)?.to_f64().sqrt())
    }
}

/// Possibly infinite supremum of `E'^2 / E^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum SupRatio<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> SupRatio<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            SupRatio::Finite(x) => x.to_f64(),
            SupRatio::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            SupRatio::Finite(x) => Some(x),
            SupRatio::Infinite => None,
        }
    }
}

/// `sup_μ E'(μ)^2 / E(μ)^2 = max_j m'_j / m_j`.
///
/// Indices where both vectors vanish are dropped; an index with
/// `m_j = 0 < m'_j` makes the supremum infinite.
pub fn sup_ratio<T: Scalar>(m: &[T], m_prime: &[T]) -> Result<SupRatio<T>, ExtremalError> {
    check_len(m.len(), m_prime.len())?;
    if m.iter().chain(m_prime).any(|x| *x < T::zero()) {
        return Err(ExtremalError::NegativeEntry);
    }
    let mut best: Option<T> = None;
    for (mj, mpj) in m.iter().zip(m_prime) {
        let zero = T::zero();
        match (*mj == zero, *mpj == zero) {
            (true, true) => continue,
            (true, false) => return Ok(SupRatio::Infinite),
            _ => {
                let r = mpj.clone() / mj.clone();
                best = Some(match best {
                    Some(b) => b.max_of(r),
                    None => r,
                });
            }
        }
    }
    best.map(SupRatio::Finite).ok_or(ExtremalError::AllZero)
}

/// Draws `count` points uniformly from the standard simplex in `R^k`.
pub fn simplex_samples(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            x
        })
        .collect()
}

fn coordinate_vectors(k: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..k).map(move |j| {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        e
    })
}

/// Brute-force estimate of the supremum: maximum of the ratio over the
/// coordinate vectors and `samples` seeded simplex points.
pub fn sup_ratio_oracle<T: Scalar>(
    m: &ModuliVector<T>,
    m_prime: &[T],
    samples: usize,
    seed: u64,
) -> Result<f64, ExtremalError> {
    check_len(m.len(), m_prime.len())?;
    if m_prime.iter().any(|x| *x < T::zero()) {
        return Err(ExtremalError::NegativeEntry);
    }
    let mf: Vec<f64> = m.values().iter().map(Scalar::to_f64).collect();
    let mpf: Vec<f64> = m_prime.iter().map(Scalar::to_f64).collect();
    let ratio = |x: &[f64]| {
        let num: f64 = mpf.iter().zip(x).map(|(a, xi)| a * xi * xi).sum();
        let den: f64 = mf.iter().zip(x).map(|(a, xi)| a * xi * xi).sum();
        num / den
    };
    let k = m.len();
    let best = coordinate_vectors(k)
        .chain(simplex_samples(k, samples, seed))
        .map(|x| ratio(&x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Kerckhoff-type lower bound `(1/2) log max E'^2 / E^2` over the supplied
/// intersection vectors together with all coordinate vectors.
///
/// Zero sample vectors carry no information and are skipped.
pub fn kerckhoff_lower_bound<T: Scalar>(
    m: &ModuliVector<T>,
    m_prime: &ModuliVector<T>,
    sample_curves: &[Vec<T>],
) -> Result<f64, ExtremalError> {
    if sample_curves.is_empty() {
        return Err(ExtremalError::EmptySample);
    }
    let k = m.len();
    check_len(k, m_prime.len())?;
    let coords = (0..k).map(|j| {
        let mut e = vec![T::zero(); k];
        e[j] = T::one();
        e
    });
    let mut best: Option<T> = None;
    for x in coords.chain(sample_curves.iter().cloned()) {
        let den = e_functional_squared(m, &x)?;
        if den == T::zero() {
            continue;
        }
        let r = e_functional_squared(m_prime, &x)? / den;
        best = Some(match best {
            Some(b) => b.max_of(r),
            None => r,
        });
    }
    let best = best.expect("coordinate vectors always contribute");
    Ok(0.5 * best.to_f64().ln())
}

/// Flat length-area data for a multicurve crossing cylinder `j` exactly
/// `i_j` times.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthAreaBound<T> {
    /// `(sum_j i_j b_j)^2 / area`, a lower bound for the extremal length.
    pub bound: T,
    /// `sum_j m_j i_j^2`.
    pub e_squared: T,
}

impl<T: Scalar> LengthAreaBound<T> {
    pub fn is_tight(&self) -> bool {
        self.bound.rel_eq(&self.e_squared)
    }
}

pub fn length_area_bound<T: Scalar>(surface: &CylinderSurface<T>, i_values: &[T]) -> Result<LengthAreaBound<T>, ExtremalError> {
    check_len(surface.cylinder_count(), i_values.len())?;
    if i_values.iter().any(|x| *x < T::zero()) {
        return Err(ExtremalError::NegativeEntry);
    }
    let length = surface
        .cylinders()
        .iter()
        .zip(i_values)
        .fold(T::zero(), |acc, (c, i)| acc + i.clone() * c.height.clone());
    let bound = length.clone() * length / surface.area();
    let m = ModuliVector::new(surface.moduli_vector()).expect("validated surface has positive moduli");
    let e_squared = e_functional_squared(&m, i_values)?;
    Ok(LengthAreaBound { bound, e_squared })
}

/// Equality case of the length-area bound: `i` is a nonnegative multiple
/// of the circumference vector `a`.
pub fn proportional_to_circumferences<T: Scalar>(surface: &CylinderSurface<T>, i_values: &[T]) -> bool {
    let cyl = surface.cylinders();
    if cyl.len() != i_values.len() {
        return false;
    }
    let lambda = i_values[0].clone() / cyl[0].circumference.clone();
    cyl.iter()
        .zip(i_values)
        .all(|(c, i)| i.rel_eq(&(lambda.clone() * c.circumference.clone())))
}

/// Upper bound `e^{-2t} / m_j` for the extremal length of the core curve of
/// cylinder `j` at time `t`, from the embedded annulus of modulus `e^{2t} m_j`.
pub fn scaled_core_extremal_bound<T: Scalar>(surface: &CylinderSurface<T>, t: f64, j: usize) -> Result<f64, ExtremalError> {
    if !(t >= 0.0) {
        return Err(ExtremalError::NegativeTime(t));
    }
    let count = surface.cylinder_count();
    let c = surface.cylinders().get(j).ok_or(ExtremalError::Index { index: j, count })?;
    Ok((-2.0 * t).exp() / c.modulus().to_f64())
}
