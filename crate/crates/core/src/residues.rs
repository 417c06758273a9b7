//! Per-pole coefficients r_I, α, β, C and d.
//!
//! The closed-form tables are the production path.  [`modes`] rebuilds α, β
//! and C from the 2×2 mode systems and serves as the cross-check.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poles::{Label, PoleRecord};
use crate::surface::CurvePoint;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// Phase symbols (χ_m, ψ_m, κ_m) = (i^m, i^m, i^{m+1}).
pub fn phase_symbols(m: u8) -> (Complex64, Complex64, Complex64) {
    let m = i32::from(m);
    (i_pow(m), i_pow(m), i_pow(m + 1))
}

/// Orbit derivative: i√2(t − 1/t) for even m, −i√2(t + 1/t) for odd m.
pub fn w_m_prime(m: u8, p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    let t = p.t;
    if t.norm() < pole_guard {
        return Err(Error::DivisionNearZero { t_abs: t.norm() });
    }
    Ok(if m.is_multiple_of(2) {
        I * SQRT_2 * (t - 1.0 / t)
    } else {
        -I * SQRT_2 * (t + 1.0 / t)
    })
}

/// r_I = ε_j / w_m′(u_ℓ).
pub fn r_i_of(l: Label, p: &CurvePoint, pole_guard: f64) -> Result<Complex64> {
    let w = w_m_prime(l.m, p, pole_guard)?;
    if w.norm() < pole_guard {
        return Err(Error::ZeroOrbitDerivative { t: p.t });
    }
    Ok(l.eps_j() / w)
}

/// The same residue in its rational form.
pub fn r_i_explicit(l: Label, p: &CurvePoint) -> Complex64 {
    let t = p.t;
    let e = l.eps_j();
    if l.m.is_multiple_of(2) {
        -e * I * t / (SQRT_2 * (t * t - 1.0))
    } else {
        e * I * t / (SQRT_2 * (t * t + 1.0))
    }
}

pub fn alpha_table(l: Label, p: &CurvePoint, r_i: Complex64) -> Complex64 {
    let (t, y) = (p.t, p.y);
    let (chi, psi, kappa) = phase_symbols(l.m);
    let t2 = t * t;
    let t4 = t2 * t2;
    if l.m.is_multiple_of(2) {
        match l.j() {
            1 => -chi * r_i * t2,
            2 => -chi * r_i * (t4 - t2 + 1.0),
            3 => Complex64::new(0.0, 0.0),
            _ => -chi * r_i * I * y / SQRT_2 * (t2 - 1.0),
        }
    } else {
        match l.j() {
            1 => psi * r_i * t4,
            2 => psi * r_i,
            3 => kappa * r_i * y / SQRT_2 * t2,
            _ => -kappa * r_i * y / SQRT_2,
        }
    }
}

pub fn beta_table(l: Label, p: &CurvePoint, r_i: Complex64) -> Complex64 {
    let (t, y) = (p.t, p.y);
    let (chi, psi, kappa) = phase_symbols(l.m);
    let t2 = t * t;
    let t4 = t2 * t2;
    if l.m.is_multiple_of(2) {
        match l.j() {
            1 => chi * r_i * I / SQRT_2 * y * t2,
            2 => chi * r_i * I / SQRT_2 * y,
            3 => -chi * r_i * t4,
            _ => -chi * r_i,
        }
    } else {
        match l.j() {
            1 => Complex64::new(0.0, 0.0),
            2 => kappa * r_i / SQRT_2 * y * (t2 + 1.0),
            3 => psi * r_i * t2,
            _ => -psi * r_i * (t4 + t2 + 1.0),
        }
    }
}

pub fn c_table(l: Label, p: &CurvePoint, r_i: Complex64) -> Complex64 {
    let (t, y) = (p.t, p.y);
    let (chi, _, kappa) = phase_symbols(l.m);
    let t2 = t * t;
    let t4 = t2 * t2;
    let zero = Complex64::new(0.0, 0.0);
    if l.m.is_multiple_of(2) {
        match l.j() {
            1 => -chi * r_i / (2.0 * t2),
            2 if l.m == 0 => -r_i / 2.0 * (2.0 * t4 - 2.0 * t2 + 1.0) / t4,
            2 => r_i / (2.0 * t4),
            _ => zero,
        }
    } else {
        match l.j() {
            1 | 2 => zero,
            3 => r_i / 2.0 * (1.0 + kappa * y / (SQRT_2 * t2)),
            _ => -r_i / (2.0 * t2) * (1.0 + kappa * y / (SQRT_2 * t2)),
        }
    }
}

pub fn d_table(l: Label, p: &CurvePoint, r_i: Complex64) -> Complex64 {
    let (t, y) = (p.t, p.y);
    let (chi, psi, kappa) = phase_symbols(l.m);
    let t2 = t * t;
    let t4 = t2 * t2;
    let t6 = t4 * t2;
    if l.m.is_multiple_of(2) {
        match l.j() {
            1 => chi * r_i / (4.0 * t2) * (t6 - t4 + t2 - 2.0),
            2 => chi * r_i / (4.0 * t4) * (t6 - 2.0 * t4 + 2.0 * t2 - 2.0),
            3 => chi * r_i / 4.0 * I * y / SQRT_2 * (t2 - 1.0),
            _ => Complex64::new(0.0, 0.0),
        }
    } else {
        match l.j() {
            1 => psi * r_i / 4.0,
            2 => psi * r_i / 4.0 * t4,
            3 => kappa * r_i / 4.0 * y / SQRT_2 * (2.0 - t2) / t2,
            _ => kappa * r_i / 4.0 * y / SQRT_2 * (t6 - 2.0) / t4,
        }
    }
}

/// β_ch = (iY/√2)(t² − 1), the coupling of the second zeta sum.
pub fn beta_ch(p: &CurvePoint) -> Complex64 {
    I * p.y / SQRT_2 * (p.t * p.t - 1.0)
}

/// d from α and β: (α − β_ch β)/(4t⁴).
pub fn d_from_alpha_beta(p: &CurvePoint, alpha: Complex64, beta: Complex64) -> Complex64 {
    (alpha - beta_ch(p) * beta) / (4.0 * p.t.powi(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueRecord {
    pub label: Label,
    #[serde(rename = "r_I")]
    pub r_i: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    #[serde(rename = "C")]
    pub c: Complex64,
    pub d: Complex64,
}

/// Where α, β and C come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientSource {
    Tables,
    Modes,
}

pub fn residue_record(rec: &PoleRecord, pole_guard: f64) -> Result<ResidueRecord> {
    let l = rec.label;
    let p = &rec.point;
    let r_i = r_i_of(l, p, pole_guard)?;
    let alpha = alpha_table(l, p, r_i);
    let beta = beta_table(l, p, r_i);
    Ok(ResidueRecord {
        label: l,
        r_i,
        alpha,
        beta,
        c: c_table(l, p, r_i),
        d: d_table(l, p, r_i),
    })
}

/// As [`residue_record`] but with α, β, C from the mode systems and d from
/// its defining combination.
pub fn residue_record_from_modes(rec: &PoleRecord, pole_guard: f64) -> Result<ResidueRecord> {
    let l = rec.label;
    let p = &rec.point;
    let r_i = r_i_of(l, p, pole_guard)?;
    let (alpha, beta, c) = modes::coeff_from_modes(l, p, r_i, pole_guard)?;
    Ok(ResidueRecord {
        label: l,
        r_i,
        alpha,
        beta,
        c,
        d: d_from_alpha_beta(p, alpha, beta),
    })
}

pub mod modes {
    //! The 2×2 mode systems M_{U,k} g_k = v_k at a forcing pole.

    use super::*;

    pub type Mat2 = [[Complex64; 2]; 2];
    pub type Vec2 = [Complex64; 2];

    /// (A₀, B₀, A₁, B₁) from g′ and g′∘τ.
    pub fn mode_halves(p: &CurvePoint) -> (Complex64, Complex64, Complex64, Complex64) {
        let g = SQRT_2 * (p.t * p.t - 1.0) / p.y;
        let gt = SQRT_2 * (p.t * p.t + 1.0) / p.y;
        ((1.0 + g) / 2.0, (1.0 - g) / 2.0, (1.0 - gt) / 2.0, (1.0 + gt) / 2.0)
    }

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ModeMatrices {
        pub k: u8,
        pub m_u: Mat2,
        pub m_v: Mat2,
        pub det_u: Complex64,
        pub det_v: Complex64,
        pub m_u_inv: Mat2,
        pub m_v_inv: Mat2,
    }

    pub fn mode_matrices(k: u8, p: &CurvePoint, pole_guard: f64) -> Result<ModeMatrices> {
        if p.y.norm() < pole_guard {
            return Err(Error::BranchPoint { y: p.y });
        }
        let (a0, b0, a1, b1) = mode_halves(p);
        let wk = i_pow(i32::from(k));
        let wmk = i_pow(-i32::from(k));
        let m_u = [[-wmk * a1, a0], [-wk * b1, b0]];
        let m_v = [[-wmk * b1, b0], [-wk * a1, a0]];
        let det_u = wk * a0 * b1 - wmk * a1 * b0;
        let det_v = wk * a1 * b0 - wmk * a0 * b1;
        if det_u.norm() < pole_guard {
            return Err(Error::SingularModeMatrix {
                k,
                det: det_u.norm(),
            });
        }
        let m_u_inv = [
            [b0 / det_u, -a0 / det_u],
            [wk * b1 / det_u, -wmk * a1 / det_u],
        ];
        let m_v_inv = [
            [a0 / det_v, -b0 / det_v],
            [wk * a1 / det_v, -wmk * b1 / det_v],
        ];
        Ok(ModeMatrices {
            k,
            m_u,
            m_v,
            det_u,
            det_v,
            m_u_inv,
            m_v_inv,
        })
    }

    pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// Residue of the k-th forcing mode at u_ℓ: ω^{−km} r_I v_k^{(m,j)}.
    pub fn forcing_residue_vector(k: u8, l: Label, p: &CurvePoint, r_i: Complex64) -> Vec2 {
        let (a0, b0, a1, b1) = mode_halves(p);
        let (am, bm) = if l.m.is_multiple_of(2) { (a0, b0) } else { (a1, b1) };
        let k = i32::from(k);
        let wk = i_pow(k);
        let wmk = i_pow(-k);
        let v = match l.j() {
            1 => [wmk * am, wk * bm],
            2 => [wmk * bm, wk * am],
            3 => [-am, -bm],
            _ => [-bm, -am],
        };
        let f = i_pow(-k * i32::from(l.m)) * r_i;
        [f * v[0], f * v[1]]
    }

    /// (α, β, C) read off from g_k = M_{U,k}⁻¹ v_k.
    pub fn coeff_from_modes(
        l: Label,
        p: &CurvePoint,
        r_i: Complex64,
        pole_guard: f64,
    ) -> Result<(Complex64, Complex64, Complex64)> {
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 4];
        for k in 0..4u8 {
            let mm = mode_matrices(k, p, pole_guard)?;
            g[k as usize] = mat_vec(&mm.m_u_inv, &forcing_residue_vector(k, l, p, r_i));
        }
        let t4 = p.t.powi(4);
        let c = (g[0][0] + g[1][0] + g[2][0] + g[3][0]) / 4.0;
        Ok((t4 * g[1][0], t4 * g[3][1], c))
    }
}

#[cfg(test)]
mod tests {
    use super::modes::*;
    use super::*;
    use crate::config::WedgeConfig;
    use crate::poles::{self, all_pole_records};
    use crate::surface::{curve_lift, Sheet};
    use proptest::prelude::*;

    const G: f64 = 1e-8;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orbit_derivative_examples() {
        let p = CurvePoint::new(I, cx(2.0, 0.0));
        assert!((w_m_prime(0, &p, G).unwrap() - cx(-2.0 * SQRT_2, 0.0)).norm() < 1e-15);
        let q = curve_lift(cx(1.0, 0.0), Sheet::Opposite);
        assert!((w_m_prime(1, &q, G).unwrap() - cx(0.0, -2.0 * SQRT_2)).norm() < 1e-15);
        let z = CurvePoint::new(cx(0.0, 0.0), cx(-SQRT_2, 0.0));
        assert!(w_m_prime(0, &z, G).is_err());
    }

    #[test]
    fn table_zeros() {
        let p = curve_lift(cx(0.3, 0.2), Sheet::Physical);
        let r = cx(0.7, -0.1);
        assert_eq!(alpha_table(Label::new(0, 1, 1), &p, r), cx(0.0, 0.0));
        assert_eq!(beta_table(Label::new(1, 1, -1), &p, r), cx(0.0, 0.0));
        assert_eq!(c_table(Label::new(2, -1, 1), &p, r), cx(0.0, 0.0));
        assert_eq!(d_table(Label::new(2, -1, 1), &p, r), cx(0.0, 0.0));
        let (_, psi, _) = phase_symbols(3);
        assert_eq!(alpha_table(Label::new(3, -1, -1), &p, r), psi * r);
        assert_eq!(d_table(Label::new(1, 1, -1), &p, r), I * r / 4.0);
    }

    #[test]
    fn beta_channel_examples() {
        let b = crate::surface::basepoint();
        assert!((beta_ch(&b) - I).norm() < 1e-15);
        let p = curve_lift(cx(1.0, 0.0), Sheet::Opposite);
        assert!(beta_ch(&p).norm() < 1e-15);
    }

    #[test]
    fn mode_matrix_inverses() {
        let p = curve_lift(cx(0.4, -0.3), Sheet::Physical);
        let (a0, b0, a1, b1) = mode_halves(&p);
        assert!((a0 + b0 - 1.0).norm() < 1e-15 && (a1 + b1 - 1.0).norm() < 1e-15);
        for k in 0..4 {
            let mm = mode_matrices(k, &p, G).unwrap();
            for (m, inv) in [(mm.m_u, mm.m_u_inv), (mm.m_v, mm.m_v_inv)] {
                let id = mat_mul(&m, &inv);
                assert!((id[0][0] - 1.0).norm() < 1e-12 && (id[1][1] - 1.0).norm() < 1e-12);
                assert!(id[0][1].norm() < 1e-12 && id[1][0].norm() < 1e-12);
            }
            let direct = mm.m_v[0][0] * mm.m_v[1][1] - mm.m_v[0][1] * mm.m_v[1][0];
            assert!((direct - mm.det_v).norm() < 1e-14);
        }
    }

    #[test]
    fn forcing_vectors() {
        let p = curve_lift(cx(0.4, -0.3), Sheet::Physical);
        let (a0, b0, a1, b1) = mode_halves(&p);
        let r = cx(0.2, 0.5);
        let v = forcing_residue_vector(0, Label::new(0, 1, -1), &p, r);
        assert_eq!(v, [r * a0, r * b0]);
        let v = forcing_residue_vector(2, Label::new(1, 1, 1), &p, r);
        let f = i_pow(-2) * r;
        assert_eq!(v, [-f * a1, -f * b1]);
    }

    fn config() -> impl Strategy<Value = WedgeConfig> {
        (0.9..2.3f64, 1e-3..0.1f64).prop_map(|(th, e)| WedgeConfig::new(th, e))
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        if b.norm() == 0.0 || a.norm() == 0.0 {
            (a - b).norm() < 1e-12
        } else {
            (a - b).norm() <= tol * a.norm().max(b.norm())
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn tables_match_modes(c in config()) {
            for rec in all_pole_records(&c).unwrap() {
                let t = residue_record(&rec, G).unwrap();
                let m = residue_record_from_modes(&rec, G).unwrap();
                prop_assert!(close(t.alpha, m.alpha, 1e-9), "{} alpha", rec.label);
                prop_assert!(close(t.beta, m.beta, 1e-9), "{} beta", rec.label);
                prop_assert!(close(t.c, m.c, 1e-9), "{} C", rec.label);
                prop_assert!(close(t.d, m.d, 1e-9), "{} d", rec.label);
                let explicit = r_i_explicit(rec.label, &rec.point);
                prop_assert!((explicit - t.r_i).norm() < 1e-13 * t.r_i.norm());
            }
        }

        #[test]
        fn pairing_compression(c in config()) {
            let recs = all_pole_records(&c).unwrap();
            for rec in &recs {
                let partner = recs.iter().find(|q| q.label == rec.label.partner()).unwrap();
                let a = residue_record(rec, G).unwrap();
                let b = residue_record(partner, G).unwrap();
                prop_assert!((a.r_i + b.r_i).norm() < 1e-12 * (1.0 + a.r_i.norm()));
                prop_assert!((a.alpha - b.alpha).norm() < 1e-12 * (1.0 + a.alpha.norm()));
                prop_assert!((a.beta - b.beta).norm() < 1e-12 * (1.0 + a.beta.norm()));
            }
        }

        #[test]
        fn y_free_entries_ignore_the_sheet(c in config()) {
            // entries without Y are unchanged by Y ↦ −Y
            for rec in all_pole_records(&c).unwrap() {
                let flipped = CurvePoint::new(rec.point.t, -rec.point.y);
                let r = r_i_of(rec.label, &rec.point, G).unwrap();
                let l = rec.label;
                let uses_y_alpha = (l.m.is_multiple_of(2) && l.j() == 4) || (l.m % 2 == 1 && l.j() >= 3);
                if !uses_y_alpha {
                    prop_assert_eq!(alpha_table(l, &rec.point, r), alpha_table(l, &flipped, r));
                } else {
                    prop_assert!((alpha_table(l, &rec.point, r) + alpha_table(l, &flipped, r)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn incident_label_has_a_record_too() {
        let c = WedgeConfig::new(1.2, 0.02);
        let rec = poles::pole_record(poles::INCIDENT, &c).unwrap();
        assert!(residue_record(&rec, G).is_ok());
    }
}
