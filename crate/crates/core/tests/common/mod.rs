#![allow(dead_code)]

use jsray_core::scalar::Scalar;
use jsray_core::{build_surface, Cylinder, CylinderSurface, GlueSign, GluingTable, Segment, Side};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    <Q as Scalar>::from_ratio(n, d)
}

/// Surface whose tops, laid end to end in label order, are glued by
/// translation to the bottoms laid end to end in `bottom_order`, cut along
/// the common refinement of both partitions.
pub fn interval_surface(dims: &[(Q, Q)], bottom_order: &[usize]) -> CylinderSurface<Q> {
    let cylinders: Vec<Cylinder<Q>> = dims
        .iter()
        .enumerate()
        .map(|(j, (a, b))| Cylinder::new(format!("c{}", j + 1), a.clone(), b.clone()).unwrap())
        .collect();
    let starts = |order: &[usize]| {
        let mut acc = Q::from_ratio(0, 1);
        let mut out = Vec::new();
        for &j in order {
            out.push((j, acc.clone()));
            acc = acc + dims[j].0.clone();
        }
        out
    };
    let tops = starts(&(0..dims.len()).collect::<Vec<_>>());
    let bottoms = starts(bottom_order);
    let mut cuts: Vec<Q> = tops.iter().chain(&bottoms).map(|(_, s)| s.clone()).collect();
    let total: Q = dims.iter().fold(Q::from_ratio(0, 1), |acc, (a, _)| acc + a.clone());
    cuts.push(total);
    cuts.sort();
    cuts.dedup();
    let locate = |layout: &[(usize, Q)], x: &Q| layout.iter().rev().find(|(_, s)| s <= x).cloned().unwrap();

    let mut segments = Vec::new();
    let mut pairs = Vec::new();
    for (n, w) in cuts.windows(2).enumerate() {
        let len = w[1].clone() - w[0].clone();
        let (tj, ts) = locate(&tops, &w[0]);
        let (bj, bs) = locate(&bottoms, &w[0]);
        segments.push(Segment { id: format!("t{n}"), cylinder: format!("c{}", tj + 1), side: Side::Top, offset: w[0].clone() - ts, length: len.clone() });
        segments.push(Segment { id: format!("b{n}"), cylinder: format!("c{}", bj + 1), side: Side::Bottom, offset: w[0].clone() - bs, length: len });
        pairs.push((2 * n, 2 * n + 1, GlueSign::Plus));
    }
    build_surface(cylinders, GluingTable::new(segments, &pairs).unwrap()).unwrap()
}

/// Rational in `[1/den, num_max/den]`.
pub fn pos_rational(num_max: i64, den_max: i64) -> impl Strategy<Value = Q> {
    (1..=num_max, 1..=den_max).prop_map(|(n, d)| q(n, d))
}

pub fn moduli(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(pos_rational(40, 7), k)
}

pub fn moduli_pair(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
    k.prop_flat_map(|n| (prop::collection::vec(pos_rational(40, 7), n), prop::collection::vec(pos_rational(40, 7), n)))
}

pub fn surface_strategy(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CylinderSurface<Q>> {
    k.prop_flat_map(|n| {
        (prop::collection::vec((pos_rational(6, 3), pos_rational(8, 4)), n), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
    .prop_map(|(dims, order)| interval_surface(&dims, &order))
}

/// Random positive rational vector for the runtime-bounded acceptance loops.
pub fn random_moduli<R: Rng>(rng: &mut R, k: usize) -> Vec<Q> {
    (0..k).map(|_| q(rng.random_range(1..=60), rng.random_range(1..=9))).collect()
}

pub fn to_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}
