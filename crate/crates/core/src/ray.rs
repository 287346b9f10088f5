//! Teichmüller geodesic flow on cylinder surfaces and the endpoint of a
//! Jenkins-Strebel ray in the augmented boundary.
//!
//! Flowing for time `t` shrinks horizontal lengths by `e^{-t}` and
//! stretches vertical ones by `e^{t}`, so every cylinder modulus grows like
//! `e^{2t}` and all core curves are pinched as `t -> ∞`. The limit noded
//! surface replaces each cylinder by two punctured disks joined at a node;
//! what survives of the flat data is the gluing combinatorics of the outer
//! boundaries together with the relative segment proportions. That is
//! exactly what [`EndpointDescriptor`] records.
//!
//! Equality of endpoints is modeled as equality of the labeled canonical
//! forms. Whether this captures every biholomorphism of the limits that is
//! compatible with the markings is an open modeling assumption.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{format_rational, Scalar};
use crate::surface::{CylinderSurface, GlueSign, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RayError {
    #[error("NegativeTime: flow time must be nonnegative, got {0}")]
    NegativeTime(f64),
}

/// Image of `surface` under the Teichmüller flow at time `t`.
///
/// Cylinder `j` becomes `(e^{-t} a_j, e^{t} b_j)` and gluing offsets and
/// lengths scale by `e^{-t}`.
pub fn flow<T: Scalar>(surface: &CylinderSurface<T>, t: f64) -> Result<CylinderSurface<f64>, RayError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(RayError::NegativeTime(t));
    }
    let shrink = (-t).exp();
    let stretch = t.exp();
    Ok(surface.map_lengths(|x| x.to_f64() * shrink, |y| y.to_f64() * stretch))
}

/// A point `r(t)` of the ray issued from `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayState<T> {
    pub base: CylinderSurface<T>,
    pub time: f64,
}

impl<T: Scalar> RayState<T> {
    pub fn new(base: CylinderSurface<T>, time: f64) -> Result<Self, RayError> {
        if !(time >= 0.0) || !time.is_finite() {
            return Err(RayError::NegativeTime(time));
        }
        Ok(RayState { base, time })
    }

    pub fn surface(&self) -> CylinderSurface<f64> {
        flow(&self.base, self.time).expect("time validated on construction")
    }

    /// Moduli at the current time, `e^{2t} m_j`.
    pub fn moduli(&self) -> Vec<f64> {
        let scale = (2.0 * self.time).exp();
        self.base.moduli_vector().iter().map(|m| m.to_f64() * scale).collect()
    }

    pub fn advance(&self, dt: f64) -> Result<Self, RayError> {
        if !(dt >= 0.0) {
            return Err(RayError::NegativeTime(dt));
        }
        Self::new(self.base.clone(), self.time + dt)
    }

    pub fn endpoint(&self) -> EndpointDescriptor {
        endpoint_descriptor(&self.base)
    }
}

/// The two punctured disks `A_j^1(∞)`, `A_j^2(∞)` a pinched cylinder
/// leaves behind, cut at half height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PuncturedDisk {
    /// Lower half, bounded by the bottom side.
    Lower,
    /// Upper half, bounded by the top side.
    Upper,
}

impl PuncturedDisk {
    pub fn boundary_side(self) -> Side {
        match self {
            PuncturedDisk::Lower => Side::Bottom,
            PuncturedDisk::Upper => Side::Top,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndpointNode {
    pub label: String,
    pub disks: [PuncturedDisk; 2],
}

/// Position of a boundary arc: node index, side, rank along the side.
pub type ArcRef = (usize, Side, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryArc {
    pub at: ArcRef,
    /// Offset as a fraction of the circumference.
    pub offset: BigRational,
    /// Length as a fraction of the circumference.
    pub length: BigRational,
    pub partner: ArcRef,
    pub sign: GlueSign,
}

/// Noded-surface combinatorics of `r(∞)`: one node per cylinder and the
/// normalized outer-boundary gluing graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndpointDescriptor {
    nodes: Vec<EndpointNode>,
    arcs: Vec<BoundaryArc>,
}

impl EndpointDescriptor {
    pub fn nodes(&self) -> &[EndpointNode] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        &self.arcs
    }

    /// Orders nodes by label and arcs by position, renumbering references.
    pub fn canonicalize(&self) -> EndpointDescriptor {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| self.nodes[a].label.cmp(&self.nodes[b].label));
        let mut new_index = vec![0; self.nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }

        // Rank arcs on each side by offset.
        let mut keyed: Vec<(ArcRef, &BoundaryArc)> = self.arcs.iter().map(|a| ((new_index[a.at.0], a.at.1, 0), a)).collect();
        keyed.sort_by(|x, y| (x.0 .0, x.0 .1, &x.1.offset).cmp(&(y.0 .0, y.0 .1, &y.1.offset)));
        let mut rank_of = std::collections::HashMap::new();
        let mut prev: Option<(usize, Side)> = None;
        let mut rank = 0;
        for (key, arc) in &keyed {
            if prev != Some((key.0, key.1)) {
                rank = 0;
                prev = Some((key.0, key.1));
            }
            rank_of.insert(arc.at, (key.0, key.1, rank));
            rank += 1;
        }
        let arcs = keyed
            .iter()
            .map(|(_, arc)| BoundaryArc {
                at: rank_of[&arc.at],
                offset: arc.offset.clone(),
                length: arc.length.clone(),
                partner: rank_of[&arc.partner],
                sign: arc.sign,
            })
            .collect();
        let nodes = order.iter().map(|&i| self.nodes[i].clone()).collect();
        EndpointDescriptor { nodes, arcs }
    }

    /// Deterministic line-based text form; equal descriptors give
    /// byte-identical output.
    pub fn canonical_text(&self) -> String {
        let c = self.canonicalize();
        let mut out = String::from("endpoint v1\n");
        for (i, node) in c.nodes.iter().enumerate() {
            writeln!(out, "node {i} label={} disks=lower,upper", node.label).unwrap();
        }
        for arc in &c.arcs {
            writeln!(
                out,
                "arc {}:{}:{} off={} len={} glue={}:{}:{} sign={}",
                arc.at.0,
                arc.at.1,
                arc.at.2,
                format_rational(&arc.offset),
                format_rational(&arc.length),
                arc.partner.0,
                arc.partner.1,
                arc.partner.2,
                arc.sign.as_char()
            )
            .unwrap();
        }
        out
    }
}

/// Endpoint of the Jenkins-Strebel ray issued from `surface`.
///
/// Segment offsets and lengths are divided by the circumference of their
/// cylinder, so the result does not depend on the flow time. Proportions
/// are replaced by the simplest rational within `1e-10`, so exact and float
/// copies of a surface give the same descriptor.
pub fn endpoint_descriptor<T: Scalar>(surface: &CylinderSurface<T>) -> EndpointDescriptor {
    let cylinders = surface.cylinders();
    let nodes = cylinders
        .iter()
        .map(|c| EndpointNode { label: c.label.clone(), disks: [PuncturedDisk::Lower, PuncturedDisk::Upper] })
        .collect();
    let segments = surface.gluing().segments();
    let node_of: Vec<usize> = segments
        .iter()
        .map(|s| surface.cylinder_index(&s.cylinder).expect("validated surface"))
        .collect();
    // Provisional references use the segment index as rank; canonicalize
    // replaces them with the rank along the side.
    let arcs = segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let a = &cylinders[node_of[i]].circumference;
            let p = surface.gluing().partner(i);
            BoundaryArc {
                at: (node_of[i], s.side, i),
                offset: proportion(&s.offset, a),
                length: proportion(&s.length, a),
                partner: (node_of[p], segments[p].side, p),
                sign: surface.gluing().sign(i),
            }
        })
        .collect();
    EndpointDescriptor { nodes, arcs }.canonicalize()
}

fn proportion<T: Scalar>(x: &T, a: &T) -> BigRational {
    let r = (x.clone() / a.clone()).snap_rational();
    if r.is_zero() {
        BigRational::zero()
    } else if r > BigRational::one() {
        BigRational::one()
    } else {
        r
    }
}

/// `true` iff the canonical forms coincide as labeled structures.
pub fn endpoints_equal(d1: &EndpointDescriptor, d2: &EndpointDescriptor) -> bool {
    d1.canonicalize() == d2.canonicalize()
}
