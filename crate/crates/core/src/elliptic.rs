//! Weierstrass ℘, ℘′, ℘″ and ζ on the square lattice with invariants
//! g₂ = 4, g₃ = 0, plus the inverse map from the cubic y² = x³ − x.
//!
//! Evaluation reduces the argument into the centred period cell, picks the
//! nearest half-period h and sums the Laurent series about 0 in w = u − h,
//! using the half-period addition formulas when h ≠ 0.  On this cell
//! |w| ≤ ω/√2, a third of the distance to the nearest lattice point, so a
//! couple of dozen even terms reach full double precision.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real half-period ω = Γ(1/4)² / (4√(2π)).
pub const OMEGA: f64 = 1.311_028_777_146_059_9;

/// Quasi-period η₁ = ζ(ω) = π/(4ω), from the Legendre relation.
pub const ETA: f64 = PI / (4.0 * OMEGA);

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of non-trivial Laurent coefficients (c₂ … c_{N+1}).
const N_TERMS: usize = 26;

/// Default guard radius around lattice points.
pub const POLE_GUARD: f64 = 1e-8;

fn laurent() -> &'static [f64; N_TERMS] {
    static COEFFS: OnceLock<[f64; N_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // c[k - 2] multiplies u^(2k-2) in ℘ − 1/u²
        let mut c = [0.0; N_TERMS];
        c[0] = 0.2;
        c[1] = 0.0;
        for k in 4..N_TERMS + 2 {
            let s: f64 = (2..=k - 2).map(|m| c[m - 2] * c[k - m - 2]).sum();
            c[k - 2] = 3.0 * s / (((2 * k + 1) * (k - 3)) as f64);
        }
        c
    })
}

/// A point on the torus C / (2ω Z + 2iω Z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub u: Complex64,
}

impl TorusPoint {
    /// Canonical representative in [0, 2ω) × [0, 2ω)·i.
    pub fn reduced(u: Complex64) -> Self {
        let p = 2.0 * OMEGA;
        let wrap = |x: f64| {
            let r = x - p * (x / p).floor();
            if r >= p || r < 0.0 {
                0.0
            } else {
                r
            }
        };
        TorusPoint {
            u: Complex64::new(wrap(u.re), wrap(u.im)),
        }
    }

    /// Distance to the nearest lattice translate of `other`.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        lattice_distance(self.u - other.u)
    }
}

/// Half-periods of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeData {
    pub omega_r: f64,
    pub omega_i: Complex64,
    /// The half-period iω, where ℘ = −1.
    pub u0: TorusPoint,
    pub eta_r: f64,
    pub eta_i: Complex64,
}

pub fn half_periods() -> LatticeData {
    LatticeData {
        omega_r: OMEGA,
        omega_i: Complex64::new(0.0, OMEGA),
        u0: TorusPoint {
            u: Complex64::new(0.0, OMEGA),
        },
        eta_r: ETA,
        eta_i: Complex64::new(0.0, -ETA),
    }
}

/// The half-period iω with ℘ = −1, ℘′ = 0.
pub fn u0() -> Complex64 {
    Complex64::new(0.0, OMEGA)
}

/// Splits u = v + 2ω(n₁ + i n₂) with v in the centred cell [−ω, ω]².
fn centre(u: Complex64) -> (Complex64, f64, f64) {
    let p = 2.0 * OMEGA;
    let n1 = (u.re / p).round();
    let n2 = (u.im / p).round();
    (Complex64::new(u.re - n1 * p, u.im - n2 * p), n1, n2)
}

/// The representative of u in the centred cell [−ω, ω]².
pub fn centred(u: Complex64) -> Complex64 {
    centre(u).0
}

/// Distance from u to the nearest lattice point.
pub fn lattice_distance(u: Complex64) -> f64 {
    centre(u).0.norm()
}

/// ℘, ℘′ and ζ evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassValues {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub zeta: Complex64,
}

/// Evaluates ℘, ℘′ and ζ at u, refusing points within `guard` of the lattice.
pub fn evaluate_with_guard(u: Complex64, guard: f64) -> Result<WeierstrassValues> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::NonFiniteOutput("torus argument".into()));
    }
    let (v, n1, n2) = centre(u);
    let a = (v.re / OMEGA).round();
    let b = (v.im / OMEGA).round();
    let h = Complex64::new(a * OMEGA, b * OMEGA);
    let w = v - h;
    let z = w * w;

    let c = laurent();
    // s0 = Σ c_k z^k, s1 = Σ (2k−2) c_k z^k, s2 = Σ k c_k z^(k−1), s3 = Σ c_k z^(k−1)/(2k−1)
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = s0;
    let mut s2 = s0;
    let mut s3 = s0;
    for idx in (0..N_TERMS).rev() {
        let k = (idx + 2) as f64;
        let ck = c[idx];
        s0 = s0 * z + ck;
        s1 = s1 * z + (2.0 * k - 2.0) * ck;
        s2 = s2 * z + k * ck;
        s3 = s3 * z + ck / (2.0 * k - 1.0);
    }
    let z2 = z * z;
    s0 *= z2;
    s1 *= z2;
    s2 *= z;
    s3 *= z;

    let lattice_shift = 2.0 * ETA * Complex64::new(n1, -n2);
    let (wp, wp_prime, zeta) = if a == 0.0 && b == 0.0 {
        if w.norm() < guard {
            return Err(Error::PoleAtLattice { u });
        }
        let inv = w.inv();
        let inv2 = inv * inv;
        (
            (1.0 + s0) * inv2,
            (s1 - 2.0) * inv2 * inv,
            inv - w * s3,
        )
    } else {
        // e = ℘(h), cc = (e − e')(e − e'') = 3e² − 1
        let e = match ((a as i64).rem_euclid(2), (b as i64).rem_euclid(2)) {
            (1, 0) => 1.0,
            (0, 1) => -1.0,
            _ => 0.0,
        };
        let cc = 3.0 * e * e - 1.0;
        let m = 1.0 - e * z + s0;
        let zeta_h = ETA * Complex64::new(a, -b);
        (
            e + cc * z / m,
            -cc * (s1 - 2.0) * w / (m * m),
            -w * s3 + zeta_h + w * (s2 - e) / m,
        )
    };
    Ok(WeierstrassValues {
        wp,
        wp_prime,
        zeta: zeta + lattice_shift,
    })
}

pub fn evaluate(u: Complex64) -> Result<WeierstrassValues> {
    evaluate_with_guard(u, POLE_GUARD)
}

pub fn wp(u: Complex64) -> Result<Complex64> {
    Ok(evaluate(u)?.wp)
}

pub fn wp_prime(u: Complex64) -> Result<Complex64> {
    Ok(evaluate(u)?.wp_prime)
}

/// ℘″ = 6℘² − 2.
pub fn wp_second(u: Complex64) -> Result<Complex64> {
    let p = wp(u)?;
    Ok(6.0 * p * p - 2.0)
}

pub fn zeta_w(u: Complex64) -> Result<Complex64> {
    Ok(evaluate(u)?.zeta)
}

/// Residual of y² = x³ − x, scaled so it is meaningful for large |x|.
pub fn cubic_residual(x: Complex64, y_half: Complex64) -> f64 {
    let scale = 1.0_f64.max(x.norm().powi(3));
    (y_half * y_half - x * x * x + x).norm() / scale
}

/// Carlson's symmetric integral R_F for complex arguments in the cut plane.
pub fn carlson_rf(x: Complex64, y: Complex64, z: Complex64) -> Result<Complex64> {
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * f64::EPSILON).powf(-1.0 / 6.0)
        * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut a = a0;
    let mut pow4 = 1.0;
    for _ in 0..200 {
        if q / pow4 < a.norm() {
            let xs = (a0 - x0) / (pow4 * a);
            let ys = (a0 - y0) / (pow4 * a);
            let zs = -xs - ys;
            let e2 = xs * ys - zs * zs;
            let e3 = xs * ys * zs;
            let poly = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0;
            return Ok(poly / a.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        a = (a + lam) / 4.0;
        pow4 *= 4.0;
    }
    Err(Error::NoConvergence {
        what: "Carlson R_F duplication",
    })
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0
}

/// A preimage of x under ℘ (sign of ℘′ unspecified), or None when x is on
/// the real cut (−∞, 1) of both the direct and the rotated integral.
fn abel_preimage(x: Complex64) -> Option<Complex64> {
    if !x.is_finite() {
        return None;
    }
    let one = Complex64::new(1.0, 0.0);
    if !(on_cut(x - one) || on_cut(x) || on_cut(x + one)) {
        return carlson_rf(x - one, x, x + one).ok();
    }
    // ℘(iv) = −℘(v)
    let y = -x;
    if !(on_cut(y - one) || on_cut(y) || on_cut(y + one)) {
        return carlson_rf(y - one, y, y + one).ok().map(|v| I * v);
    }
    None
}

/// Torus point u with ℘(u) = x and ℘′(u)/2 = y_half, reduced to [0, 2ω)².
pub fn invert_wp(x: Complex64, y_half: Complex64) -> Result<TorusPoint> {
    invert_wp_with(x, y_half, 1e-12)
}

/// As [`invert_wp`] with an explicit cubic-residual tolerance.
pub fn invert_wp_with(x: Complex64, y_half: Complex64, tol_curve: f64) -> Result<TorusPoint> {
    Ok(TorusPoint::reduced(invert_wp_raw(x, y_half, tol_curve)?))
}

/// The unreduced preimage, which for large |x| is the small u ≈ x^{-1/2}
/// itself rather than its translate into the fundamental square.
pub fn invert_wp_raw(x: Complex64, y_half: Complex64, tol_curve: f64) -> Result<Complex64> {
    let residual = cubic_residual(x, y_half);
    if !(residual <= tol_curve) {
        return Err(Error::NotOnCubic {
            x,
            y: y_half,
            residual,
        });
    }
    let half_pts = [
        (1.0, Complex64::new(OMEGA, 0.0)),
        (-1.0, Complex64::new(0.0, OMEGA)),
        (0.0, Complex64::new(OMEGA, OMEGA)),
    ];
    for (e, h) in half_pts {
        if x == Complex64::new(e, 0.0) && y_half == Complex64::new(0.0, 0.0) {
            return Ok(h);
        }
    }

    // Direct integral plus the three half-period shifts of the argument.
    let one = Complex64::new(1.0, 0.0);
    let shifted = [
        (x, Complex64::new(0.0, 0.0)),
        (one + 2.0 / (x - one), Complex64::new(OMEGA, 0.0)),
        (-one + 2.0 / (x + one), Complex64::new(0.0, OMEGA)),
        (-one / x, Complex64::new(OMEGA, OMEGA)),
    ];
    let misfit = |u: Complex64| -> Option<(f64, Complex64)> {
        let v = evaluate_with_guard(u, 0.0).ok()?;
        let scale = 1.0 + x.norm();
        let plus = (v.wp - x).norm() / scale + (v.wp_prime / 2.0 - y_half).norm() / scale.powf(1.5);
        let minus =
            (v.wp - x).norm() / scale + (-v.wp_prime / 2.0 - y_half).norm() / scale.powf(1.5);
        if plus <= minus {
            Some((plus, u))
        } else {
            Some((minus, -u))
        }
    };
    let mut best: Option<(f64, Complex64)> = None;
    for (xs, h) in shifted {
        if let Some(v) = abel_preimage(xs) {
            if let Some(cand) = misfit(v + h) {
                if best.is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
            }
        }
    }
    let (mut err, mut u) = best.ok_or(Error::NoConvergence {
        what: "Abel map inversion",
    })?;

    // Newton polish on ℘(u) = x, keeping only steps that reduce the misfit.
    for _ in 0..8 {
        let v = evaluate_with_guard(u, 0.0).map_err(|_| Error::NoConvergence {
            what: "Abel map inversion",
        })?;
        if v.wp_prime.norm() == 0.0 {
            break;
        }
        let cand = u - (v.wp - x) / v.wp_prime;
        match misfit(cand) {
            Some((e, c)) if e < err => {
                err = e;
                u = c;
            }
            _ => break,
        }
    }
    if !(err < 1e-6) {
        return Err(Error::NoConvergence {
            what: "Abel map inversion",
        });
    }
    Ok(u)
}

/// Quarter turn of the lattice, used by the lemniscatic symmetry checks.
pub fn rotate(u: Complex64) -> Complex64 {
    I * u
}

/// ζ(h) for the half-period h = ω(a + ib).
pub fn zeta_half_period(a: i32, b: i32) -> Complex64 {
    ETA * Complex64::new(a as f64, -(b as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..40 {
            let n = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = n;
        }
        a
    }

    #[test]
    fn omega_matches_agm_closed_form() {
        let w = PI / (2.0 * 2f64.sqrt() * agm(1.0, 1.0 / 2f64.sqrt()));
        assert!((w - OMEGA).abs() < 1e-15);
    }

    #[test]
    fn laurent_coefficients() {
        let cf = laurent();
        assert_eq!(cf[0], 0.2);
        assert_eq!(cf[1], 0.0);
        // c₄ = 3 c₂² / (9·1) = 1/75
        assert!((cf[2] - 1.0 / 75.0).abs() < 1e-17);
        for (idx, v) in cf.iter().enumerate() {
            if (idx + 2) % 2 == 1 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn half_period_values() {
        assert!((wp(c(OMEGA, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((wp(u0()).unwrap() + 1.0).norm() < 1e-14);
        assert!(wp(c(OMEGA, OMEGA)).unwrap().norm() < 1e-14);
        assert!(wp_prime(u0()).unwrap().norm() < 1e-14);
        assert!((wp_second(u0()).unwrap() - 4.0).norm() < 1e-13);
        let l = half_periods();
        assert_eq!(l.omega_i / l.omega_r, I);
    }

    #[test]
    fn zeta_at_half_periods() {
        assert!((zeta_w(c(OMEGA, 0.0)).unwrap() - ETA).norm() < 1e-14);
        assert!((zeta_w(u0()).unwrap() - c(0.0, -ETA)).norm() < 1e-14);
    }

    #[test]
    fn laurent_leading_terms() {
        let u = Complex64::from_polar(1e-3, 0.4);
        assert!((wp_prime(u).unwrap() * u.powi(3) + 2.0).norm() < 1e-9);
        let u = Complex64::from_polar(1e-4, 1.1);
        assert!((u * zeta_w(u).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn pole_guard_refuses_lattice_points() {
        assert!(matches!(wp(c(0.0, 0.0)), Err(Error::PoleAtLattice { .. })));
        let near = c(2.0 * OMEGA + 1e-10, 2.0 * OMEGA);
        assert!(matches!(zeta_w(near), Err(Error::PoleAtLattice { .. })));
    }

    #[test]
    fn invert_known_points() {
        let u = invert_wp(c(-1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((u.u - u0()).norm() < 1e-15);
        let u = invert_wp(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((u.u - c(OMEGA, 0.0)).norm() < 1e-15);
        // real x > 1 with positive y lands on −(0, ω) reduced
        let u = invert_wp(c(2.0, 0.0), c(6f64.sqrt(), 0.0)).unwrap();
        assert!((wp(u.u).unwrap() - 2.0).norm() < 1e-12);
        assert!((wp_prime(u.u).unwrap() / 2.0 - 6f64.sqrt()).norm() < 1e-11);
    }

    #[test]
    fn invert_real_axis_segments() {
        for &x in &[-3.0, -1.0 + 1e-9, -0.5, -1e-12, 1e-12, 0.5, 0.999, 1.5, 40.0] {
            let xc = c(x, 0.0);
            let y = (xc * xc * xc - xc).sqrt();
            for s in [1.0, -1.0] {
                let u = invert_wp(xc, s * y).unwrap();
                let v = evaluate(u.u).unwrap();
                assert!((v.wp - xc).norm() < 1e-9, "x={x}");
                assert!((v.wp_prime / 2.0 - s * y).norm() < 1e-7, "x={x}");
            }
        }
    }

    #[test]
    fn not_on_cubic() {
        assert!(matches!(
            invert_wp(c(2.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotOnCubic { .. })
        ));
    }

    #[test]
    fn reduce_is_canonical() {
        let u = c(0.3, 0.7);
        let a = TorusPoint::reduced(u + 2.0 * OMEGA);
        let b = TorusPoint::reduced(u + c(0.0, 2.0 * OMEGA));
        let r = TorusPoint::reduced(u);
        assert!((a.u - r.u).norm() < 1e-15);
        assert!((b.u - r.u).norm() < 1e-15);
        let neg = TorusPoint::reduced(c(-1e-3, -5.0));
        assert!(neg.u.re >= 0.0 && neg.u.re < 2.0 * OMEGA);
        assert!(neg.u.im >= 0.0 && neg.u.im < 2.0 * OMEGA);
    }

    fn domain_point() -> impl Strategy<Value = Complex64> {
        (0.0..2.0 * OMEGA, 0.0..2.0 * OMEGA)
            .prop_map(|(a, b)| c(a, b))
            .prop_filter("away from lattice", |u| lattice_distance(*u) > 1e-2)
    }

    proptest! {
        #[test]
        fn ode_residual(u in domain_point()) {
            let v = evaluate(u).unwrap();
            let r = v.wp_prime * v.wp_prime - 4.0 * v.wp.powi(3) + 4.0 * v.wp;
            let scale = 1.0 + v.wp.norm().powi(3);
            prop_assert!(r.norm() / scale < 1e-13);
        }

        #[test]
        fn lemniscatic_symmetry(u in domain_point()) {
            let v = evaluate(u).unwrap();
            let r = evaluate(rotate(u)).unwrap();
            let s = 1.0 + v.wp.norm();
            prop_assert!((r.wp + v.wp).norm() / s < 1e-13);
            prop_assert!((r.wp_prime - I * v.wp_prime).norm() / (s * s) < 1e-12);
            prop_assert!((r.zeta + I * v.zeta).norm() / s < 1e-12);
        }

        #[test]
        fn parity(u in domain_point()) {
            let v = evaluate(u).unwrap();
            let m = evaluate(-u).unwrap();
            let s = 1.0 + v.wp.norm();
            prop_assert!((v.wp - m.wp).norm() / s < 1e-13);
            prop_assert!((v.wp_prime + m.wp_prime).norm() / (s * s) < 1e-12);
            prop_assert!((v.zeta + m.zeta).norm() / s < 1e-12);
        }

        #[test]
        fn zeta_quasi_periodic(u in domain_point(), n1 in -3i32..3, n2 in -3i32..3) {
            let shift = 2.0 * OMEGA * c(n1 as f64, n2 as f64);
            let a = zeta_w(u + shift).unwrap();
            let b = zeta_w(u).unwrap();
            let expect = 2.0 * ETA * c(n1 as f64, -(n2 as f64));
            prop_assert!((a - b - expect).norm() < 1e-11 * (1.0 + b.norm()));
        }

        #[test]
        fn zeta_derivative_is_minus_wp(u in domain_point()) {
            let h = 1e-5;
            let d = (zeta_w(u + h).unwrap() - zeta_w(u - h).unwrap()) / (2.0 * h);
            let p = wp(u).unwrap();
            prop_assert!((d + p).norm() < 1e-6 * (1.0 + p.norm()));
        }

        #[test]
        fn inversion_roundtrip(u in domain_point()) {
            let v = evaluate(u).unwrap();
            let back = invert_wp(v.wp, v.wp_prime / 2.0).unwrap();
            prop_assert!(TorusPoint::reduced(u).distance(&back) < 1e-10,
                "u={} back={}", u, back.u);
        }
    }
}
