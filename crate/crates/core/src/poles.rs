//! Forcing labels, their Snell-quadratic pole points and torus lifts.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::WedgeConfig;
use crate::elliptic::TorusPoint;
use crate::error::{Error, Result};
use crate::surface::{self, CurvePoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A forcing label (m, σ, ε_w); σ and ε_w are ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub m: u8,
    pub sigma: i8,
    pub eps_w: i8,
}

impl Label {
    pub fn new(m: u8, sigma: i8, eps_w: i8) -> Self {
        assert!(m < 4 && sigma.abs() == 1 && eps_w.abs() == 1);
        Label { m, sigma, eps_w }
    }

    /// Channel index: (+,+)→3, (+,−)→1, (−,+)→4, (−,−)→2.
    pub fn j(&self) -> u8 {
        match (self.sigma, self.eps_w) {
            (1, 1) => 3,
            (1, -1) => 1,
            (-1, 1) => 4,
            _ => 2,
        }
    }

    pub fn eps_j(&self) -> f64 {
        if matches!(self.j(), 1 | 3) {
            1.0
        } else {
            -1.0
        }
    }

    /// The τ²-partner (m + 2, σ, ε_w).
    pub fn partner(&self) -> Label {
        Label::new((self.m + 2) % 4, self.sigma, self.eps_w)
    }

    pub fn is_incident(&self) -> bool {
        *self == INCIDENT
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: i8| if v > 0 { '+' } else { '-' };
        write!(f, "({},{},{})", self.m, s(self.sigma), s(self.eps_w))
    }
}

/// The label carried by the incident wave itself.
pub const INCIDENT: Label = Label {
    m: 0,
    sigma: 1,
    eps_w: -1,
};

/// All 16 labels, ordered lexicographically with + before −.
pub fn all_labels() -> Vec<Label> {
    let mut out = Vec::with_capacity(16);
    for m in 0..4 {
        for sigma in [1, -1] {
            for eps_w in [1, -1] {
                out.push(Label::new(m, sigma, eps_w));
            }
        }
    }
    out
}

/// The 15 labels other than the incident one.
pub fn scattered_labels() -> Vec<Label> {
    all_labels().into_iter().filter(|l| !l.is_incident()).collect()
}

/// b = exp(iσ(ζ_i + ε_w π/4))^{(−1)^m}.
pub fn forcing_phase(l: Label, cfg: &WedgeConfig) -> Result<Complex64> {
    if !(cfg.eps > 0.0) {
        return Err(Error::DegenerateEps { eps: cfg.eps });
    }
    let zeta_i = Complex64::new(cfg.theta_i, cfg.eps);
    let sign = if l.m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok((sign * f64::from(l.sigma) * I * (zeta_i + f64::from(l.eps_w) * FRAC_PI_4)).exp())
}

/// Exact multiplication by i^{−m}.
pub fn rotate_back(m: u8, t: Complex64) -> Complex64 {
    match m % 4 {
        0 => t,
        1 => Complex64::new(t.im, -t.re),
        2 => -t,
        _ => Complex64::new(-t.im, t.re),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub label: Label,
    pub b: Complex64,
    pub point: CurvePoint,
    pub u: TorusPoint,
}

impl PoleRecord {
    pub fn t(&self) -> Complex64 {
        self.point.t
    }

    pub fn y(&self) -> Complex64 {
        self.point.y
    }
}

/// Pole point of a label: solve s(q) = b on |t| < 1, transport by τ^{−m}
/// and lift to the torus.
pub fn pole_record(l: Label, cfg: &WedgeConfig) -> Result<PoleRecord> {
    let guard = cfg.tolerances.pole_guard;
    let b = forcing_phase(l, cfg)?;
    let (tq, _) = surface::pole_roots(b, guard)?;
    let yq = 2.0 * b * tq - SQRT_2 * (tq * tq + 1.0);
    let t = rotate_back(l.m, tq);
    let y = if l.m.is_multiple_of(2) { yq } else { -yq };
    let point = CurvePoint::new(t, y);
    let u = surface::lift_u(&point, guard)?;
    Ok(PoleRecord {
        label: l,
        b,
        point,
        u,
    })
}

/// All 16 pole records for a configuration, in label order.
pub fn all_pole_records(cfg: &WedgeConfig) -> Result<Vec<PoleRecord>> {
    all_labels().into_iter().map(|l| pole_record(l, cfg)).collect()
}

/// Smallest pairwise torus distance among the given records.
pub fn min_separation(records: &[PoleRecord]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            best = best.min(a.u.distance(&b.u));
        }
    }
    best
}
