//! Half-period shift data, the zeta sums A and B, and the cubic
//! polynomials p and q that cancel their jets at the basepoint.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{self, TorusPoint};
use crate::error::{Error, Result};
use crate::poles::{Label, PoleRecord};
use crate::residues::ResidueRecord;
use crate::surface::{self, Sheet};

/// ℘, ℘′, ℘″ at u₀ − u_ℓ, written algebraically in (t_ℓ, Y_ℓ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftData {
    pub label: Label,
    #[serde(rename = "W0")]
    pub w0: Complex64,
    #[serde(rename = "W1")]
    pub w1: Complex64,
    #[serde(rename = "W2")]
    pub w2: Complex64,
}

/// W₀ = −√2t²/D, W₁ = −4t/D, W₂ = 12t⁴/D² − 2 with D = Y + √2.
pub fn shift_data(rec: &PoleRecord, pole_guard: f64) -> Result<ShiftData> {
    let p = &rec.point;
    if (p.y + SQRT_2).norm() < pole_guard {
        return Err(Error::ShiftSingularity {
            d: (p.y + SQRT_2).norm(),
        });
    }
    let d = p.d_shift();
    let t = p.t;
    Ok(ShiftData {
        label: rec.label,
        w0: -SQRT_2 * t * t / d,
        w1: -4.0 * t / d,
        w2: 12.0 * t.powi(4) / (d * d) - 2.0,
    })
}

/// Coefficients of p(t) = p₁t + p₂t² + p₃t³ and q(t) likewise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetCoeffs {
    pub p: [Complex64; 3],
    pub q: [Complex64; 3],
}

impl JetCoeffs {
    pub fn p_of(&self, t: Complex64) -> Complex64 {
        t * (self.p[0] + t * (self.p[1] + t * self.p[2]))
    }

    pub fn q_of(&self, t: Complex64) -> Complex64 {
        t * (self.q[0] + t * (self.q[1] + t * self.q[2]))
    }
}

/// One pole's contribution (c W₀/√2, c W₁/4, c W₂/(12√2)) to a jet sum.
pub fn jet_summand(coef: Complex64, s: &ShiftData) -> [Complex64; 3] {
    [
        coef * s.w0 / SQRT_2,
        coef * s.w1 / 4.0,
        coef * s.w2 / (12.0 * SQRT_2),
    ]
}

/// Sums the per-pole summands over whatever records are passed in.
pub fn jet_coeffs(records: &[ResidueRecord], shifts: &[ShiftData]) -> JetCoeffs {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = JetCoeffs {
        p: [zero; 3],
        q: [zero; 3],
    };
    for (r, s) in records.iter().zip(shifts) {
        let a = jet_summand(r.alpha, s);
        let b = jet_summand(r.beta, s);
        for n in 0..3 {
            out.p[n] += a[n];
            out.q[n] += b[n];
        }
    }
    out
}

/// The differences ζ(u − u_ℓ) − ζ(u₀ − u_ℓ) for a fixed set of poles.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaBasis {
    pub poles: Vec<TorusPoint>,
    at_base: Vec<Complex64>,
    pole_guard: f64,
}

impl ZetaBasis {
    pub fn new(poles: Vec<TorusPoint>, pole_guard: f64) -> Result<Self> {
        let u0 = elliptic::u0();
        let at_base = poles
            .iter()
            .map(|p| elliptic::zeta_w(u0 - p.u))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZetaBasis {
            poles,
            at_base,
            pole_guard,
        })
    }

    /// Torus distance from u to the nearest pole.
    pub fn nearest_pole(&self, u: Complex64) -> f64 {
        let here = TorusPoint { u };
        self.poles
            .iter()
            .map(|p| here.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diffs(&self, u: Complex64) -> Result<Vec<Complex64>> {
        if self.nearest_pole(u) < self.pole_guard {
            return Err(Error::EvaluationAtPole { u });
        }
        self.poles
            .iter()
            .zip(&self.at_base)
            .map(|(p, z0)| Ok(elliptic::evaluate_with_guard(u - p.u, 0.0)?.zeta - z0))
            .collect()
    }
}

/// Σ coef_ℓ·diff_ℓ.
pub fn weighted(coefs: impl Iterator<Item = Complex64>, diffs: &[Complex64]) -> Complex64 {
    coefs.zip(diffs).map(|(c, d)| c * d).sum()
}

/// A(u) = Σ α_ℓ[ζ(u − u_ℓ) − ζ(u₀ − u_ℓ)].
pub fn a_sum(u: Complex64, basis: &ZetaBasis, records: &[ResidueRecord]) -> Result<Complex64> {
    Ok(weighted(records.iter().map(|r| r.alpha), &basis.diffs(u)?))
}

/// B(u) = Σ β_ℓ[ζ(u − u_ℓ) − ζ(u₀ − u_ℓ)].
pub fn b_sum(u: Complex64, basis: &ZetaBasis, records: &[ResidueRecord]) -> Result<Complex64> {
    Ok(weighted(records.iter().map(|r| r.beta), &basis.diffs(u)?))
}

/// δ = u(t) − u₀ along the physical lift, taken in the centred cell.
pub fn delta_of_t(t: Complex64, pole_guard: f64) -> Result<Complex64> {
    surface::lift_delta(&surface::curve_lift(t, Sheet::Physical), pole_guard)
}

/// Torus point over a small physical t.
pub fn u_of_t(t: Complex64, pole_guard: f64) -> Result<Complex64> {
    Ok(elliptic::u0() + delta_of_t(t, pole_guard)?)
}

/// Least-squares slope of log|f| against log r.
pub fn loglog_slope(rs: &[f64], vals: &[f64]) -> f64 {
    let n = rs.len() as f64;
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::WedgeConfig;
    use crate::poles::{all_pole_records, scattered_labels, Label};
    use crate::residues::residue_record;
    use proptest::prelude::*;

    const G: f64 = 1e-8;

    struct Setup {
        poles: Vec<PoleRecord>,
        res: Vec<ResidueRecord>,
        shifts: Vec<ShiftData>,
    }

    fn setup(cfg: &WedgeConfig, scattered_only: bool) -> Setup {
        let keep = scattered_labels();
        let poles: Vec<PoleRecord> = all_pole_records(cfg)
            .unwrap()
            .into_iter()
            .filter(|p| !scattered_only || keep.contains(&p.label))
            .collect();
        let res = poles.iter().map(|p| residue_record(p, G).unwrap()).collect();
        let shifts = poles.iter().map(|p| shift_data(p, G).unwrap()).collect();
        Setup { poles, res, shifts }
    }

    #[test]
    fn shift_data_matches_elliptic_values() {
        let cfg = WedgeConfig::new(1.3, 0.02);
        let s = setup(&cfg, false);
        let u0 = elliptic::u0();
        for (p, w) in s.poles.iter().zip(&s.shifts) {
            let v = elliptic::evaluate(u0 - p.u.u).unwrap();
            assert!((v.wp - w.w0).norm() < 1e-10 * (1.0 + w.w0.norm()));
            assert!((v.wp_prime - w.w1).norm() < 1e-10 * (1.0 + w.w1.norm()));
            assert!((6.0 * w.w0 * w.w0 - 2.0 - w.w2).norm() < 1e-12 * (1.0 + w.w2.norm()));
            // ℘(u₀ − u_ℓ) = (1 − ℘(u_ℓ))/(1 + ℘(u_ℓ))
            let x = elliptic::wp(p.u.u).unwrap();
            assert!(((1.0 - x) / (1.0 + x) - w.w0).norm() < 1e-10 * (1.0 + w.w0.norm()));
        }
        for (p, w) in s.poles.iter().zip(&s.shifts) {
            let j = s.poles.iter().position(|q| q.label == p.label.partner()).unwrap();
            assert!((s.shifts[j].w0 - w.w0).norm() < 1e-13);
            assert!((s.shifts[j].w1 + w.w1).norm() < 1e-13);
            assert!((s.shifts[j].w2 - w.w2).norm() < 1e-13);
        }
    }

    #[test]
    fn broken_pair_carries_p2() {
        let cfg = WedgeConfig::new(1.1, 0.01);
        let full = setup(&cfg, false);
        let all = jet_coeffs(&full.res, &full.shifts);
        assert!(all.p[1].norm() < 1e-12 && all.q[1].norm() < 1e-12);
        let scat = setup(&cfg, true);
        let jc = jet_coeffs(&scat.res, &scat.shifts);
        let k = scat.res.iter().position(|r| r.label == Label::new(2, 1, -1)).unwrap();
        let single = jet_summand(scat.res[k].alpha, &scat.shifts[k]);
        assert!((jc.p[1] - single[1]).norm() < 1e-12);
        let single_q = jet_summand(scat.res[k].beta, &scat.shifts[k]);
        assert!((jc.q[1] - single_q[1]).norm() < 1e-12);
        assert_eq!(jet_summand(scat.res[0].alpha, &scat.shifts[0])[0], scat.res[0].alpha * scat.shifts[0].w0 / SQRT_2);
    }

    #[test]
    fn zeta_sums_vanish_at_basepoint() {
        let cfg = WedgeConfig::new(1.7, 0.03);
        let s = setup(&cfg, true);
        let basis = ZetaBasis::new(s.poles.iter().map(|p| p.u).collect(), G).unwrap();
        assert!(a_sum(elliptic::u0(), &basis, &s.res).unwrap().norm() < 1e-13);
        assert!(b_sum(elliptic::u0(), &basis, &s.res).unwrap().norm() < 1e-13);
        assert!(matches!(
            a_sum(s.poles[3].u.u, &basis, &s.res),
            Err(Error::EvaluationAtPole { .. })
        ));
    }

    #[test]
    fn a_sum_residues() {
        let cfg = WedgeConfig::new(1.7, 0.03);
        let s = setup(&cfg, true);
        let basis = ZetaBasis::new(s.poles.iter().map(|p| p.u).collect(), G).unwrap();
        for (p, r) in s.poles.iter().zip(&s.res) {
            // mean of (u − u_ℓ)A(u) over a small circle
            let rad = 1e-4;
            let n = 16;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let e = Complex64::from_polar(rad, std::f64::consts::TAU * k as f64 / n as f64);
                acc += e * a_sum(p.u.u + e, &basis, &s.res).unwrap();
            }
            let res = acc / n as f64;
            assert!((res - r.alpha).norm() < 1e-8 * (1.0 + r.alpha.norm()), "{}", p.label);
        }
    }

    #[test]
    fn jet_cancellation_slopes() {
        let cfg = WedgeConfig::new(1.4, 0.02);
        let s = setup(&cfg, true);
        let basis = ZetaBasis::new(s.poles.iter().map(|p| p.u).collect(), G).unwrap();
        let jc = jet_coeffs(&s.res, &s.shifts);
        let rs = [1e-3, 2e-3, 4e-3, 1e-2];
        for ray in 0..8 {
            let phi = 0.1 + ray as f64 * std::f64::consts::TAU / 8.0;
            let mut fa = vec![];
            let mut fb = vec![];
            for &r in &rs {
                let t = Complex64::from_polar(r, phi);
                let u = u_of_t(t, G).unwrap();
                fa.push((a_sum(u, &basis, &s.res).unwrap() + jc.p_of(t)).norm());
                fb.push((b_sum(u, &basis, &s.res).unwrap() + jc.q_of(t)).norm());
            }
            assert!(loglog_slope(&rs, &fa) > 3.9, "A ray {ray}: {fa:?}");
            assert!(loglog_slope(&rs, &fb) > 3.9, "B ray {ray}: {fb:?}");
        }
    }

    #[test]
    fn delta_has_no_cubic_term() {
        let rs = [1e-3, 2e-3, 4e-3, 1e-2];
        for ray in 0..8 {
            let phi = 0.2 + ray as f64 * std::f64::consts::TAU / 8.0;
            let vals: Vec<f64> = rs
                .iter()
                .map(|&r| {
                    let t = Complex64::from_polar(r, phi);
                    (delta_of_t(t, G).unwrap() - t / SQRT_2).norm()
                })
                .collect();
            assert!(loglog_slope(&rs, &vals) > 4.9, "ray {ray}: {vals:?}");
        }
        let t = Complex64::new(1e-6, 0.0);
        assert!((delta_of_t(t, G).unwrap() / (t / SQRT_2) - 1.0).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn wp_expansion_about_u0(r in 1e-3..1e-2f64, phi in 0.0..std::f64::consts::TAU) {
            let d = Complex64::from_polar(r, phi);
            let x = elliptic::wp(elliptic::u0() + d).unwrap();
            let lhs = x + 1.0 - 2.0 * d * d + 2.0 * d.powi(4);
            prop_assert!(lhs.norm() < 10.0 * r.powi(6) + 1e-15);
        }

        #[test]
        fn half_period_shift_identity(a in 0.05..2.5f64, b in 0.05..2.5f64) {
            let u = Complex64::new(a, b);
            prop_assume!(elliptic::lattice_distance(u) > 1e-2 && elliptic::lattice_distance(u + elliptic::u0()) > 1e-2);
            let x = elliptic::wp(u).unwrap();
            let lhs = elliptic::wp(u + elliptic::u0()).unwrap();
            let rhs = -1.0 + 2.0 / (x + 1.0);
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn addition_theorem(a in 0.1..2.5f64, b in 0.1..2.5f64, c in 0.1..2.5f64, d in 0.1..2.5f64) {
            let u = Complex64::new(a, b);
            let v = Complex64::new(c, d);
            for w in [u, v, u + v, u - v] {
                prop_assume!(elliptic::lattice_distance(w) > 5e-2);
            }
            let pu = elliptic::evaluate(u).unwrap();
            let pv = elliptic::evaluate(v).unwrap();
            prop_assume!((pu.wp - pv.wp).norm() > 1e-2);
            let q = (pu.wp_prime - pv.wp_prime) / (pu.wp - pv.wp);
            let rhs = q * q / 4.0 - pu.wp - pv.wp;
            let lhs = elliptic::wp(u + v).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()) * (1.0 + q.norm()).powi(2));
        }
    }
}
