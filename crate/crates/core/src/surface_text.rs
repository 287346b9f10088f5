//! Line-oriented text format for surfaces and multicurves.
//!
//! ```text
//! # two cylinders stacked in a cycle
//! cylinder c1 a=1 b=1
//! cylinder c2 a=1 b=2
//! segment s1 cyl=c1 side=top off=0 len=1
//! segment s2 cyl=c2 side=bottom off=0 len=1
//! segment s3 cyl=c2 side=top off=0 len=1
//! segment s4 cyl=c1 side=bottom off=0 len=1
//! glue s1 s2 sign=+
//! glue s3 s4 sign=+
//! curve mu weights=1,0,2
//! pairing 1 3 2
//! ```
//!
//! Reals are decimals (optionally with an exponent) or fractions `p/q` and
//! are read exactly. The curve family has one member per cylinder (its
//! core curve, in declaration order) followed by extra test curves; its
//! size is the longest of the weight lists and the largest `pairing`
//! index. `pairing j j' v` sets the symmetric entry for the 1-based
//! indices `j`, `j'`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::scalar::{format_rational, parse_rational};
use crate::surface::{
    build_surface, CurveFamily, Cylinder, CylinderSurface, GlueSign, GluingTable, MeasuredMulticurve, Segment, Side,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("SyntaxError(line {line}): {message}")]
    Syntax { line: usize, message: String },
    /// `line` is 0 for whole-file conditions.
    #[error("SemanticError(line {line}): {message}")]
    Semantic { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax { line, message: message.into() }
}

fn semantic(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Semantic { line, message: message.into() }
}

/// A parsed surface together with its curve family and named multicurves.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub surface: CylinderSurface<BigRational>,
    pub family: Arc<CurveFamily<BigRational>>,
    pub curves: Vec<(String, MeasuredMulticurve<BigRational>)>,
}

impl SurfaceSpec {
    pub fn curve(&self, name: &str) -> Option<&MeasuredMulticurve<BigRational>> {
        self.curves.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Vertical foliation `sum b_j g_j` of the differential.
    pub fn horizontal_foliation(&self) -> MeasuredMulticurve<BigRational> {
        MeasuredMulticurve::horizontal_foliation(&self.surface, self.family.clone()).expect("family built from this surface")
    }
}

fn key_value<'a>(line: usize, token: &'a str, key: &str) -> Result<&'a str, SpecError> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected {key}=..., found {token:?}")))
}

fn real(line: usize, text: &str) -> Result<BigRational, SpecError> {
    parse_rational(text).ok_or_else(|| syntax(line, format!("invalid real {text:?}")))
}

fn arity(line: usize, tokens: &[&str], n: usize) -> Result<(), SpecError> {
    if tokens.len() == n {
        Ok(())
    } else {
        Err(syntax(line, format!("{} expects {} fields, found {}", tokens[0], n - 1, tokens.len() - 1)))
    }
}

pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec, SpecError> {
    let mut cylinders: Vec<Cylinder<BigRational>> = Vec::new();
    let mut segments: Vec<Segment<BigRational>> = Vec::new();
    let mut segment_index: HashMap<String, usize> = HashMap::new();
    let mut glues: Vec<(usize, usize, GlueSign)> = Vec::new();
    let mut curves: Vec<(usize, String, Vec<BigRational>)> = Vec::new();
    let mut pairings: Vec<(usize, usize, usize, BigRational)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        last_line = line;
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "cylinder" => {
                arity(line, &tokens, 4)?;
                let label = tokens[1];
                if cylinders.iter().any(|c| c.label == label) {
                    return Err(semantic(line, format!("duplicate cylinder label {label}")));
                }
                let a = real(line, key_value(line, tokens[2], "a")?)?;
                let b = real(line, key_value(line, tokens[3], "b")?)?;
                let cyl = Cylinder::new(label, a, b).map_err(|e| semantic(line, e.to_string()))?;
                cylinders.push(cyl);
            }
            "segment" => {
                arity(line, &tokens, 6)?;
                let id = tokens[1].to_string();
                if segment_index.contains_key(&id) {
                    return Err(semantic(line, format!("duplicate segment id {id}")));
                }
                let cylinder = key_value(line, tokens[2], "cyl")?.to_string();
                let side = match key_value(line, tokens[3], "side")? {
                    "top" => Side::Top,
                    "bottom" => Side::Bottom,
                    other => return Err(syntax(line, format!("side must be top or bottom, found {other:?}"))),
                };
                let offset = real(line, key_value(line, tokens[4], "off")?)?;
                let length = real(line, key_value(line, tokens[5], "len")?)?;
                if length <= BigRational::zero() || offset < BigRational::zero() {
                    return Err(semantic(line, format!("NonPositiveDatum: segment {id} needs off >= 0 and len > 0")));
                }
                segment_index.insert(id.clone(), segments.len());
                segments.push(Segment { id, cylinder, side, offset, length });
            }
            "glue" => {
                arity(line, &tokens, 4)?;
                let lookup = |id: &str| {
                    segment_index
                        .get(id)
                        .copied()
                        .ok_or_else(|| semantic(line, format!("unknown segment {id} (declare segments before gluing)")))
                };
                let (i, j) = (lookup(tokens[1])?, lookup(tokens[2])?);
                let sign = match key_value(line, tokens[3], "sign")? {
                    "+" => GlueSign::Plus,
                    "-" => GlueSign::Minus,
                    other => return Err(syntax(line, format!("sign must be + or -, found {other:?}"))),
                };
                if i == j {
                    return Err(semantic(line, format!("PairingError: segment {} is glued to itself", tokens[1])));
                }
                if segments[i].length != segments[j].length {
                    return Err(semantic(
                        line,
                        format!("PairingError: segments {} and {} have different lengths", tokens[1], tokens[2]),
                    ));
                }
                glues.push((i, j, sign));
            }
            "curve" => {
                arity(line, &tokens, 3)?;
                let name = tokens[1].to_string();
                if curves.iter().any(|(_, n, _)| *n == name) {
                    return Err(semantic(line, format!("duplicate curve name {name}")));
                }
                let list = key_value(line, tokens[2], "weights")?;
                let weights = list.split(',').map(|w| real(line, w)).collect::<Result<Vec<_>, _>>()?;
                if weights.iter().any(|w| *w < BigRational::zero()) {
                    return Err(semantic(line, format!("curve {name}: weights must be nonnegative")));
                }
                curves.push((line, name, weights));
            }
            "pairing" => {
                arity(line, &tokens, 4)?;
                let index = |s: &str| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| syntax(line, format!("curve index must be a positive integer, found {s:?}")))
                };
                let (i, j) = (index(tokens[1])?, index(tokens[2])?);
                let value = real(line, tokens[3])?;
                pairings.push((line, i - 1, j - 1, value));
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }

    if cylinders.is_empty() {
        return Err(semantic(0, "no cylinders"));
    }
    let k = cylinders.len();
    let gluing = GluingTable::new(segments, &glues).map_err(|e| semantic(last_line, e.to_string()))?;
    let surface = build_surface(cylinders, gluing).map_err(|e| semantic(0, e.to_string()))?;

    let n = curves
        .iter()
        .map(|(_, _, w)| w.len())
        .chain(pairings.iter().map(|(_, i, j, _)| i.max(j) + 1))
        .fold(k, usize::max);
    let mut matrix = vec![vec![BigRational::zero(); n]; n];
    for (line, i, j, v) in &pairings {
        if i == j && !v.is_zero() {
            return Err(semantic(*line, "a curve has zero self-intersection"));
        }
        matrix[*i][*j] = v.clone();
        matrix[*j][*i] = v.clone();
    }
    let labels = surface
        .cylinders()
        .iter()
        .map(|c| c.label.clone())
        .chain((k..n).map(|j| format!("x{}", j + 1)))
        .collect();
    let family = CurveFamily::new(labels, k, matrix).map_err(|e| semantic(0, e.to_string()))?;
    let family = Arc::new(family);

    let curves = curves
        .into_iter()
        .map(|(line, name, weights)| {
            if weights.len() != n {
                return Err(semantic(line, format!("curve {name} has {} weights, the family has {n} curves", weights.len())));
            }
            MeasuredMulticurve::new(family.clone(), weights)
                .map(|mc| (name, mc))
                .map_err(|e| semantic(line, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(SurfaceSpec { surface, family, curves })
}

/// Writes `spec` back in the text format; parsing the output gives an
/// equal value.
pub fn to_spec_text(spec: &SurfaceSpec) -> String {
    let mut out = String::new();
    for c in spec.surface.cylinders() {
        writeln!(out, "cylinder {} a={} b={}", c.label, format_rational(&c.circumference), format_rational(&c.height)).unwrap();
    }
    let gluing = spec.surface.gluing();
    for s in gluing.segments() {
        writeln!(
            out,
            "segment {} cyl={} side={} off={} len={}",
            s.id,
            s.cylinder,
            s.side,
            format_rational(&s.offset),
            format_rational(&s.length)
        )
        .unwrap();
    }
    for (i, j, sign) in gluing.pairs() {
        let segs = gluing.segments();
        writeln!(out, "glue {} {} sign={}", segs[i].id, segs[j].id, sign.as_char()).unwrap();
    }
    for (name, mc) in &spec.curves {
        let weights: Vec<String> = mc.weights().iter().map(format_rational).collect();
        writeln!(out, "curve {name} weights={}", weights.join(",")).unwrap();
    }
    let n = spec.family.len();
    for i in 0..n {
        for j in i + 1..n {
            let v = spec.family.pairing(i, j);
            if !v.is_zero() {
                writeln!(out, "pairing {} {} {}", i + 1, j + 1, format_rational(v)).unwrap();
            }
        }
    }
    out
}
