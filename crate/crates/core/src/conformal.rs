//! Coordinate charts on a single cylinder.
//!
//! A flat cylinder of circumference `a` and height `b` is cut at half
//! height. Its lower half maps onto the round annulus
//! `{e^{-mπ} <= |w| < 1}` by `z -> exp(2πi z / a)`, the upper half by the
//! same map after the reflection `z -> a + ib - z`, and the two halves are
//! reglued along `|w| = e^{-mπ}` by `w -> e^{-2mπ} / w`. Under the flow the
//! rectangle chart is replaced by `z_t = e^{-t} x + i e^{t} y`, which in
//! round coordinates is the radial map `r e^{iθ} -> r^{e^{2t}} e^{iθ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ConformalError {
    #[error("ZeroInput: the gluing involution is undefined at w = 0")]
    ZeroInput,
    #[error("DomainError: round flow needs 0 < |w| < 1, got |w| = {0}")]
    Domain(f64),
    #[error("DomainError: invalid annulus radius {0}")]
    Radius(f64),
}

/// `{inner_radius <= |w| < 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundAnnulus {
    inner_radius: f64,
}

impl RoundAnnulus {
    pub fn new(inner_radius: f64) -> Result<Self, ConformalError> {
        if inner_radius > 0.0 && inner_radius < 1.0 {
            Ok(RoundAnnulus { inner_radius })
        } else {
            Err(ConformalError::Radius(inner_radius))
        }
    }

    /// Half-cylinder chart of a cylinder with modulus `m` after flowing for
    /// time `t`: inner radius `exp(-m π e^{2t})`.
    pub fn half_cylinder(m: f64, t: f64) -> Result<Self, ConformalError> {
        Self::new((-m * PI * (2.0 * t).exp()).exp())
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Conformal modulus `log(1/r) / 2π`.
    pub fn modulus(&self) -> f64 {
        -self.inner_radius.ln() / (2.0 * PI)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let r = w.norm();
        r >= self.inner_radius && r < 1.0
    }
}

/// Which half of a cylinder cut at half height a point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Lower,
    Upper,
}

/// `w = exp(2πi z / a)` on the lower half of the cut rectangle.
pub fn rect_to_round(z: Complex64, a: f64) -> Complex64 {
    // Reduce the real part into [0, a) first; for large t the real part is
    // tiny compared to the imaginary part and the reduction keeps the
    // argument of the exponential well conditioned.
    let x = z.re.rem_euclid(a);
    let radius = (-2.0 * PI * z.im / a).exp();
    Complex64::from_polar(radius, 2.0 * PI * x / a)
}

/// Chart of either half of the cylinder `[0, a] x [0, b]`; the upper half
/// is reflected through `z -> a + ib - z` first.
pub fn rect_to_round_half(z: Complex64, a: f64, b: f64, half: Half) -> Complex64 {
    let z = match half {
        Half::Lower => z,
        Half::Upper => Complex64::new(a, b) - z,
    };
    rect_to_round(z, a)
}

/// `w -> exp(-2mπ) / w`, gluing the two half annuli along `|w| = e^{-mπ}`.
pub fn glue_involution(w: Complex64, m: f64) -> Result<Complex64, ConformalError> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(ConformalError::ZeroInput);
    }
    Ok((-2.0 * m * PI).exp() / w)
}

/// `r e^{iθ} -> r^{e^{2t}} e^{iθ}`.
pub fn round_flow(w: Complex64, t: f64) -> Result<Complex64, ConformalError> {
    let r = w.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(ConformalError::Domain(r));
    }
    // w * r^{e^{2t} - 1} keeps the angle untouched.
    let exponent = (2.0 * t).exp_m1();
    Ok(w * (exponent * r.ln()).exp())
}

/// Largest discrepancy between the two routes around the square
/// rectangle -> round annulus -> flowed annulus and
/// rectangle -> flowed rectangle -> flowed annulus,
/// over a `grid_size x grid_size` grid in the lower half-rectangle.
///
/// Grid heights are `(k + 1) / n * b / 2` so that `|w| < 1` everywhere.
pub fn check_diagram_commutativity(a: f64, b: f64, t: f64, grid_size: usize) -> f64 {
    let n = grid_size.max(1);
    let (shrink, stretch) = ((-t).exp(), t.exp());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = a * i as f64 / n as f64;
        for k in 0..n {
            let y = 0.5 * b * (k + 1) as f64 / n as f64;
            let z = Complex64::new(x, y);
            let via_round = match round_flow(rect_to_round(z, a), t) {
                Ok(w) => w,
                Err(_) => return f64::INFINITY,
            };
            let z_t = Complex64::new(shrink * x, stretch * y);
            let via_rect = rect_to_round(z_t, shrink * a);
            worst = worst.max((via_round - via_rect).norm());
        }
    }
    worst
}
