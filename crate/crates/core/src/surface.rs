//! The lemniscatic Snell curve Y² = 2(t⁴ + 1), its uniformization by the
//! square torus and the spectral map ζ → (t, Y) → u.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{self, TorusPoint, OMEGA};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    /// |t| < 1 on the sheet where Y → −√2 as t → 0.
    PhysicalPlus,
    Other,
}

/// Which square root of 2(t⁴ + 1) to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// Y = −√2·√(1 + t⁴), principal root.
    Physical,
    /// The other root, Y = +√2·√(1 + t⁴).
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: Complex64,
    #[serde(rename = "Y")]
    pub y: Complex64,
    pub component: Component,
}

fn physical_root(t: Complex64) -> Complex64 {
    let r = 1.0 + t.powi(4);
    if r.norm() < 1e-15 {
        return c(0.0);
    }
    -SQRT_2 * r.sqrt()
}

impl CurvePoint {
    /// Builds a point from (t, Y), deriving its component tag.
    pub fn new(t: Complex64, y: Complex64) -> Self {
        let phys = physical_root(t);
        let on_phys = (y - phys).norm() <= (y + phys).norm();
        let component = if t.norm() < 1.0 && on_phys {
            Component::PhysicalPlus
        } else {
            Component::Other
        };
        CurvePoint { t, y, component }
    }

    pub fn residual(&self) -> f64 {
        (self.y * self.y - 2.0 * (self.t.powi(4) + 1.0)).norm()
    }

    /// D = Y + √2, computed without cancellation near the basepoint.
    pub fn d_shift(&self) -> Complex64 {
        let plus = self.y + SQRT_2;
        let minus = self.y - SQRT_2;
        if minus.norm() >= plus.norm() {
            2.0 * self.t.powi(4) / minus
        } else {
            plus
        }
    }
}

/// The basepoint (0, −√2).
pub fn basepoint() -> CurvePoint {
    CurvePoint::new(c(0.0), c(-SQRT_2))
}

pub fn curve_lift(t: Complex64, sheet: Sheet) -> CurvePoint {
    let phys = physical_root(t);
    let y = match sheet {
        Sheet::Physical => phys,
        Sheet::Opposite => -phys,
    };
    CurvePoint::new(t, y)
}

/// Snell exponential s = (√2(t² + 1) + Y)/(2t).
///
/// Uses whichever of the two equivalent forms has the larger denominator;
/// the rationalized one, √2 t/(t² + 1 − Y/√2), is regular at t = 0 on the
/// physical sheet.
pub fn snell_s(p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    let a = SQRT_2 * (p.t * p.t + 1.0);
    let conj = a - p.y;
    let two_t = 2.0 * p.t;
    if conj.norm() >= two_t.norm() {
        Ok(2.0 * p.t / conj)
    } else if p.t.norm() < pole_guard {
        Err(Error::DivisionNearZero { t_abs: p.t.norm() })
    } else {
        Ok((a + p.y) / two_t)
    }
}

/// g′ = √2(t² − 1)/Y, the Snell-map derivative.
pub fn g_prime(p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    if p.y.norm() < pole_guard {
        return Err(Error::BranchPoint { y: p.y });
    }
    Ok(SQRT_2 * (p.t * p.t - 1.0) / p.y)
}

/// Order-four automorphism (t, Y) ↦ (it, −Y).
pub fn tau(p: &CurvePoint) -> CurvePoint {
    CurvePoint::new(I * p.t, -p.y)
}

/// The birational map to y² = x³ − x, returned as (x, y/2 = ℘′/2).
pub fn uniformize(p: &CurvePoint, pole_guard: f64) -> Result<(Complex64, Complex64)> {
    let (t, y) = (p.t, p.y);
    let t2 = t * t;
    let minus = y - SQRT_2;
    let plus = y + SQRT_2;
    if minus.norm() >= plus.norm() {
        // multiply through by (Y − √2)/t², regular at the basepoint
        let den = 2.0 * t2 - SQRT_2 * y + 2.0;
        if den.norm() < pole_guard {
            return Err(Error::UniformizationPole { t });
        }
        Ok((
            (2.0 * t2 + SQRT_2 * y - 2.0) / den,
            -8.0 * t * minus / (den * den),
        ))
    } else {
        let den = plus - SQRT_2 * t2;
        if den.norm() < pole_guard {
            return Err(Error::UniformizationPole { t });
        }
        Ok(((plus + SQRT_2 * t2) / den, -4.0 * t * plus / (den * den)))
    }
}

/// (℘(u − u₀), ℘′(u − u₀)/2) = (−√2 t²/D, 2t/D) with D = Y + √2.
pub fn uniformize_shifted(p: &CurvePoint) -> Result<(Complex64, Complex64)> {
    let d = p.d_shift();
    if d.norm() == 0.0 {
        return Err(Error::UniformizationPole { t: p.t });
    }
    Ok((-SQRT_2 * p.t * p.t / d, 2.0 * p.t / d))
}

/// (℘(u − ω), ℘′(u − ω)/2) = (D/(√2 t²), D/t³), regular near (0, √2).
pub fn uniformize_shifted_omega(p: &CurvePoint) -> Result<(Complex64, Complex64)> {
    if p.t.norm() == 0.0 {
        return Err(Error::UniformizationPole { t: p.t });
    }
    let d = p.d_shift();
    Ok((d / (SQRT_2 * p.t * p.t), d / p.t.powi(3)))
}

/// Torus coordinate of a curve point.
///
/// Of the three frames (direct, shifted by u₀, shifted by ω) the one with
/// the largest |℘| is inverted, which keeps the inversion away from the
/// critical values ±1.
pub fn lift_u(p: &CurvePoint, pole_guard: f64) -> Result<TorusPoint> {
    let (shift, v) = lift_in_frame(p, pole_guard)?;
    Ok(TorusPoint::reduced(shift + v))
}

/// u − u₀ in the centred cell, without rounding through u₀ itself.
pub fn lift_delta(p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    let (shift, v) = lift_in_frame(p, pole_guard)?;
    let u0 = elliptic::u0();
    Ok(if shift == u0 {
        elliptic::centred(v)
    } else {
        elliptic::centred(shift + v - u0)
    })
}

fn lift_in_frame(p: &CurvePoint, pole_guard: f64) -> Result<(Complex64, Complex64)> {
    let u0 = elliptic::u0();
    if p.t.norm() == 0.0 {
        // (0, −√2) ↦ u₀ and (0, √2) ↦ ω
        return Ok(if p.y.re < 0.0 {
            (u0, c(0.0))
        } else {
            (c(OMEGA), c(0.0))
        });
    }
    let frames = [
        (c(0.0), uniformize(p, pole_guard)),
        (u0, uniformize_shifted(p)),
        (c(OMEGA), uniformize_shifted_omega(p)),
    ];
    let mut best: Option<(Complex64, Complex64, Complex64)> = None;
    let mut first_err = None;
    for (shift, r) in frames {
        match r {
            Ok((x, y)) if x.is_finite() && y.is_finite() => {
                if best.is_none_or(|(_, bx, _)| x.norm() > bx.norm()) {
                    best = Some((shift, x, y));
                }
            }
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let (shift, x, y) =
        best.ok_or_else(|| first_err.unwrap_or(Error::UniformizationPole { t: p.t }))?;
    Ok((shift, elliptic::invert_wp_raw(x, y, 1e-12)?))
}

/// Inverse of the uniformization: the curve point over u.
///
/// Fails with `UniformizationPole` at the two torus points over t = ∞.
pub fn curve_point_of_u(u: Complex64) -> Result<CurvePoint> {
    let v = elliptic::evaluate(u)?;
    let x = v.wp;
    let (t, y) = if (x + 1.0).norm() < 0.5 {
        let s = elliptic::evaluate(u - elliptic::u0())?;
        let (xs, ys) = (s.wp, s.wp_prime / 2.0);
        let t = -SQRT_2 * xs / ys;
        (t, 2.0 * t / ys - SQRT_2)
    } else if (x - 1.0).norm() < 0.5 {
        let s = elliptic::evaluate(u - OMEGA)?;
        let (x1, y1) = (s.wp, s.wp_prime / 2.0);
        let t = SQRT_2 * x1 / y1;
        (t, SQRT_2 * (t * t * x1 - 1.0))
    } else {
        let t = -(x * x - 1.0) / (SQRT_2 * v.wp_prime / 2.0);
        (t, SQRT_2 * t * t * (x + 1.0) / (x - 1.0) - SQRT_2)
    };
    if !(t.is_finite() && y.is_finite()) {
        return Err(Error::UniformizationPole { t });
    }
    Ok(CurvePoint::new(t, y))
}

/// s_ζ = e^{i(ζ − π/4)}.
pub fn spectral_exponential(zeta: Complex64) -> Complex64 {
    (I * (zeta - FRAC_PI_4)).exp()
}

/// Roots of t² − ((b² + 1)/(√2 b)) t + 1 = 0 as (t_in, t_out), |t_in| < 1.
pub fn pole_roots(b: Complex64, pole_guard: f64) -> Result<(Complex64, Complex64)> {
    let disc_poly = b.powi(4) - 6.0 * b * b + 1.0;
    if disc_poly.norm() < pole_guard {
        return Err(Error::DoubleRoot {
            disc: disc_poly.norm(),
        });
    }
    let coef = (b * b + 1.0) / (SQRT_2 * b);
    let d = (coef * coef - 4.0).sqrt();
    let r1 = (coef + d) / 2.0;
    let r2 = (coef - d) / 2.0;
    let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
    let t_in = 1.0 / big;
    if (t_in.norm() - 1.0).abs() < pole_guard {
        return Err(Error::UnitModulusRoot {
            t_abs: t_in.norm(),
        });
    }
    Ok((t_in, big))
}

/// The curve point with s(t, Y) = b and |t| < 1.
pub fn point_of_exponential(b: Complex64, pole_guard: f64) -> Result<CurvePoint> {
    let (t, _) = pole_roots(b, pole_guard)?;
    let y = 2.0 * b * t - SQRT_2 * (t * t + 1.0);
    Ok(CurvePoint::new(t, y))
}

/// Solves s(t, Y) = e^{i(ζ − π/4)} on |t| < 1.
pub fn point_of_zeta(zeta: Complex64, pole_guard: f64) -> Result<CurvePoint> {
    if zeta.im > 700.0 {
        return Ok(basepoint());
    }
    point_of_exponential(spectral_exponential(zeta), pole_guard)
}

pub fn u_of_zeta(zeta: Complex64, pole_guard: f64) -> Result<TorusPoint> {
    lift_u(&point_of_zeta(zeta, pole_guard)?, pole_guard)
}

/// ζ-image of a curve point, π/4 − i log s.
pub fn zeta_of_point(p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    Ok(FRAC_PI_4 - I * snell_s(p, pole_guard)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{evaluate, wp, TorusPoint};
    use proptest::prelude::*;

    const G: f64 = 1e-8;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
    }

    #[test]
    fn lift_examples() {
        let b = curve_lift(c(0.0), Sheet::Physical);
        assert_eq!(b.y, c(-SQRT_2));
        assert_eq!(b.component, Component::PhysicalPlus);
        let p = curve_lift(c(1.0), Sheet::Opposite);
        assert!((p.y - 2.0).norm() < 1e-15);
        let bp = curve_lift(Complex64::from_polar(1.0, FRAC_PI_4), Sheet::Opposite);
        assert!(bp.y.norm() < 1e-7);
    }

    #[test]
    fn snell_examples() {
        let p = curve_lift(c(1.0), Sheet::Opposite);
        assert!((snell_s(&p, G).unwrap() - (SQRT_2 + 1.0)).norm() < 1e-15);
        let t = cx(1e-9, 2e-9);
        let q = curve_lift(t, Sheet::Physical);
        assert!((snell_s(&q, G).unwrap() / t - 1.0 / SQRT_2).norm() < 1e-15);
        let r = curve_lift(c(1e-10), Sheet::Opposite);
        assert!(matches!(
            snell_s(&r, G),
            Err(Error::DivisionNearZero { .. })
        ));
    }

    #[test]
    fn g_prime_examples() {
        assert!((g_prime(&basepoint(), G).unwrap() - 1.0).norm() < 1e-15);
        let p = curve_lift(c(1.0), Sheet::Opposite);
        assert!(g_prime(&p, G).unwrap().norm() < 1e-15);
        let q = CurvePoint::new(c(0.3), c(0.0));
        assert!(matches!(g_prime(&q, G), Err(Error::BranchPoint { .. })));
    }

    #[test]
    fn tau_examples() {
        let img = tau(&basepoint());
        assert_eq!(img.t, c(0.0));
        assert_eq!(img.y, c(SQRT_2));
        assert_eq!(img.component, Component::Other);
    }

    #[test]
    fn uniformize_examples() {
        let (x, y) = uniformize(&basepoint(), G).unwrap();
        assert_eq!((x, y), (c(-1.0), c(0.0)));
        let p = curve_lift(c(1.0), Sheet::Opposite);
        let (x, y) = uniformize(&p, G).unwrap();
        assert!((x - (1.0 + SQRT_2)).norm() < 1e-14);
        assert!((y + (2.0 + SQRT_2)).norm() < 1e-14);
        assert!(elliptic::cubic_residual(x, y) < 1e-15);
    }

    #[test]
    fn basepoint_lifts_to_u0() {
        let u = lift_u(&basepoint(), G).unwrap();
        assert!((u.u - elliptic::u0()).norm() < 1e-15);
        let small = curve_lift(cx(1e-6, 0.0), Sheet::Physical);
        let u = lift_u(&small, G).unwrap();
        assert!(((u.u - elliptic::u0()) / (1e-6 / SQRT_2) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn xw_expansion_has_no_t6_defect() {
        // x + 1 − t² + t⁴/2 = O(t⁶), with x + 1 = 2/(℘(u − u₀) + 1)
        let f = |r: f64| {
            let t = Complex64::from_polar(r, 0.3);
            let p = curve_lift(t, Sheet::Physical);
            let xs = uniformize_shifted(&p).unwrap().0;
            (2.0 / (xs + 1.0) - t * t + t.powi(4) / 2.0).norm()
        };
        let slope = (f(0.1).ln() - f(0.05).ln()) / (0.1f64.ln() - 0.05f64.ln());
        assert!(slope > 5.8, "slope {slope}");
    }

    #[test]
    fn pole_roots_product() {
        let b = Complex64::from_polar((-0.1f64).exp(), FRAC_PI_4);
        let (ti, to) = pole_roots(b, G).unwrap();
        assert!((ti * to - 1.0).norm() < 1e-14);
        assert!(ti.norm() < 1.0);
        let q = |t: Complex64| t * t - (b * b + 1.0) / (SQRT_2 * b) * t + 1.0;
        assert!(q(ti).norm() < 1e-13 && q(to).norm() / to.norm_sqr() < 1e-13);
    }

    #[test]
    fn large_imaginary_zeta_goes_to_basepoint() {
        let p = point_of_zeta(cx(0.4, 30.0), G).unwrap();
        assert!(p.t.norm() < 1e-12);
        assert_eq!(p.component, Component::PhysicalPlus);
        let u = u_of_zeta(cx(0.4, 30.0), G).unwrap();
        assert!((u.u - elliptic::u0()).norm() < 1e-12);
    }

    #[test]
    fn curve_point_of_u_inverts_lift() {
        for t in [cx(0.3, 0.1), cx(-0.2, 0.6), cx(1e-4, 1e-4), cx(0.01, -0.02)] {
            for sheet in [Sheet::Physical, Sheet::Opposite] {
                let p = curve_lift(t, sheet);
                let u = lift_u(&p, G).unwrap();
                let back = curve_point_of_u(u.u).unwrap();
                assert!((back.t - p.t).norm() < 1e-12 * (1.0 + t.norm()), "{t} {sheet:?}");
                assert!((back.y - p.y).norm() < 1e-12, "{t} {sheet:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn curve_residual_small(t in disc_point()) {
            for sheet in [Sheet::Physical, Sheet::Opposite] {
                prop_assert!(curve_lift(t, sheet).residual() < 1e-12);
            }
        }

        #[test]
        fn conjugate_branches_invert(t in disc_point().prop_filter("t≠0", |t| t.norm() > 1e-3)) {
            let p = curve_lift(t, Sheet::Physical);
            let q = curve_lift(t, Sheet::Opposite);
            let prod = snell_s(&p, G).unwrap() * snell_s(&q, G).unwrap();
            prop_assert!((prod - 1.0).norm() < 1e-12);
        }

        #[test]
        fn stable_snell_agrees_with_raw(r in 1e-4..0.9f64, a in 0.0..std::f64::consts::TAU) {
            let t = Complex64::from_polar(r, a);
            let p = curve_lift(t, Sheet::Physical);
            let raw = (SQRT_2 * (t * t + 1.0) + p.y) / (2.0 * t);
            let s = snell_s(&p, G).unwrap();
            prop_assert!((raw - s).norm() < 1e-12);
        }

        #[test]
        fn tau_has_order_four(t in disc_point()) {
            let p = curve_lift(t, Sheet::Physical);
            let q = tau(&tau(&tau(&tau(&p))));
            prop_assert!((q.t - p.t).norm() < 1e-15 && (q.y - p.y).norm() < 1e-15);
            prop_assert!(tau(&p).t.norm() < 1.0);
            prop_assert!(tau(&p).residual() < 1e-12);
        }

        #[test]
        fn g_prime_of_tau(t in disc_point()) {
            let p = curve_lift(t, Sheet::Physical);
            let lhs = g_prime(&tau(&p), G).unwrap();
            let rhs = SQRT_2 * (t * t + 1.0) / p.y;
            prop_assert!((lhs - rhs).norm() < 1e-13);
        }

        #[test]
        fn uniformization_lands_on_cubic(t in disc_point(), plus in any::<bool>()) {
            let p = curve_lift(t, if plus { Sheet::Opposite } else { Sheet::Physical });
            if let Ok((x, y)) = uniformize(&p, G) {
                prop_assert!(elliptic::cubic_residual(x, y) < 1e-12);
            }
        }

        #[test]
        fn lift_reproduces_uniformization(t in disc_point(), plus in any::<bool>()) {
            let p = curve_lift(t, if plus { Sheet::Opposite } else { Sheet::Physical });
            let (x, y) = uniformize(&p, G).unwrap();
            let u = lift_u(&p, G).unwrap();
            let v = evaluate(u.u).unwrap();
            let s = 1.0 + x.norm();
            prop_assert!((v.wp - x).norm() / s < 1e-10);
            prop_assert!((v.wp_prime / 2.0 - y).norm() / s.powf(1.5) < 1e-10);
        }

        #[test]
        fn lift_is_injective(t in disc_point().prop_filter("t≠0", |t| t.norm() > 1e-2)) {
            let p = curve_lift(t, Sheet::Physical);
            let q = CurvePoint::new(-p.t, -p.y);
            let up = lift_u(&p, G).unwrap();
            let uq = lift_u(&q, G).unwrap();
            prop_assert!(up.distance(&uq) > 1e-6);
        }

        #[test]
        fn zeta_roundtrip(re in -3.0..3.0f64, im in 1e-3..3.0f64) {
            let z = cx(re, im);
            let p = point_of_zeta(z, G).unwrap();
            prop_assert!(p.t.norm() < 1.0);
            prop_assert!(p.residual() < 1e-12);
            let s = snell_s(&p, G).unwrap();
            prop_assert!((s - spectral_exponential(z)).norm() < 1e-12 * (1.0 + s.norm()));
            let u1 = u_of_zeta(z, G).unwrap();
            let u2 = u_of_zeta(z + std::f64::consts::TAU, G).unwrap();
            prop_assert!(u1.distance(&u2) < 1e-10);
            let x = uniformize(&p, G).unwrap().0;
            prop_assert!((wp(u1.u).unwrap() - x).norm() < 1e-9 * (1.0 + x.norm()));
            let back: TorusPoint = lift_u(&p, G).unwrap();
            prop_assert!(back.distance(&u1) < 1e-12);
        }
    }
}
