//! Assembly of the scattered spectral function from the pole data, and the
//! face coupling S = ½[[1+w′, 1−w′], [1−w′, 1+w′]](Q(θ_b+w), Q(θ_b−w)).

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::WedgeConfig;
use crate::elliptic::{self, TorusPoint};
use crate::error::{Error, Result};
use crate::jet::{self, JetCoeffs, ShiftData, ZetaBasis};
use crate::poles::{self, PoleRecord};
use crate::residues::{self, CoefficientSource, ResidueRecord};
use crate::surface::{self, CurvePoint, Sheet};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cauchy circle for the Taylor series of R about u₀.
const TAYLOR_RADIUS: f64 = 0.3;
const TAYLOR_NODES: usize = 64;
/// Below this |u − u₀| R is summed from its series.
const TAYLOR_SWITCH: f64 = 0.12;

/// Everything needed to evaluate Q_scat for one configuration.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub cfg: WedgeConfig,
    pub source: CoefficientSource,
    /// The 15 scattered poles in label order.
    pub poles: Vec<PoleRecord>,
    pub incident: PoleRecord,
    pub records: Vec<ResidueRecord>,
    pub shifts: Vec<ShiftData>,
    pub jets: JetCoeffs,
    basis: ZetaBasis,
    taylor: Vec<Complex64>,
    /// R(u₀), removed so that Q_scat(u₀) = 0.
    pub gauge_constant: Complex64,
}

impl SpectralSolution {
    pub fn new(cfg: &WedgeConfig) -> Result<Self> {
        Self::with_source(cfg, CoefficientSource::Tables)
    }

    pub fn with_source(cfg: &WedgeConfig, source: CoefficientSource) -> Result<Self> {
        Self::assemble(cfg, source, None)
    }

    /// Same solution with pole ℓ represented by u_ℓ + 2ω(n₁ + i n₂).
    pub fn with_translated_poles(&self, shifts: &[(i32, i32)]) -> Result<Self> {
        Self::assemble(&self.cfg, self.source, Some(shifts))
    }

    fn assemble(
        cfg: &WedgeConfig,
        source: CoefficientSource,
        translate: Option<&[(i32, i32)]>,
    ) -> Result<Self> {
        cfg.validate()?;
        let guard = cfg.tolerances.pole_guard;
        let incident = poles::pole_record(poles::INCIDENT, cfg)?;
        let poles = poles::scattered_labels()
            .into_iter()
            .map(|l| poles::pole_record(l, cfg))
            .collect::<Result<Vec<_>>>()?;
        let records = poles
            .iter()
            .map(|p| match source {
                CoefficientSource::Tables => residues::residue_record(p, guard),
                CoefficientSource::Modes => residues::residue_record_from_modes(p, guard),
            })
            .collect::<Result<Vec<_>>>()?;
        let shifts = poles
            .iter()
            .map(|p| jet::shift_data(p, guard))
            .collect::<Result<Vec<_>>>()?;
        let jets = jet::jet_coeffs(&records, &shifts);
        let period = 2.0 * elliptic::OMEGA;
        let reps = poles
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let (n1, n2) = translate.and_then(|s| s.get(k).copied()).unwrap_or((0, 0));
                TorusPoint {
                    u: p.u.u + period * Complex64::new(f64::from(n1), f64::from(n2)),
                }
            })
            .collect();
        let basis = ZetaBasis::new(reps, guard)?;
        let mut sol = SpectralSolution {
            cfg: *cfg,
            source,
            poles,
            incident,
            records,
            shifts,
            jets,
            basis,
            taylor: Vec::new(),
            gauge_constant: Complex64::new(0.0, 0.0),
        };
        sol.taylor = sol.remainder_taylor()?;
        sol.gauge_constant = sol.taylor[0];
        Ok(sol)
    }

    pub fn basis(&self) -> &ZetaBasis {
        &self.basis
    }

    /// Taylor coefficients of R about u₀ from a trapezoidal Cauchy integral.
    fn remainder_taylor(&self) -> Result<Vec<Complex64>> {
        let u0 = elliptic::u0();
        let vals = (0..TAYLOR_NODES)
            .map(|k| {
                let e = Complex64::from_polar(TAYLOR_RADIUS, TAU * k as f64 / TAYLOR_NODES as f64);
                self.remainder_direct(u0 + e)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = TAYLOR_NODES;
        Ok((0..n / 2)
            .map(|j| {
                let s: Complex64 = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -TAU * (j * k) as f64 / n as f64))
                    .sum();
                s / (n as f64 * TAYLOR_RADIUS.powi(j as i32))
            })
            .collect())
    }

    /// P₁₃(u) = (A + p)/(4t⁴) − β_ch(B + q)/(4t⁴), evaluated as written.
    pub fn p13_direct(&self, u: Complex64) -> Result<Complex64> {
        let diffs = self.basis.diffs(u)?;
        let pt = surface::curve_point_of_u(u)?;
        Ok(self.p13_with(&pt, &diffs))
    }

    fn p13_with(&self, pt: &CurvePoint, diffs: &[Complex64]) -> Complex64 {
        let a = jet::weighted(self.records.iter().map(|r| r.alpha), diffs);
        let b = jet::weighted(self.records.iter().map(|r| r.beta), diffs);
        let t4 = 4.0 * pt.t.powi(4);
        (a + self.jets.p_of(pt.t)) / t4
            - residues::beta_ch(pt) * (b + self.jets.q_of(pt.t)) / t4
    }

    /// R = P₁₃ − Σ d_ℓ[ζ(u − u_ℓ) − ζ(u₀ − u_ℓ)], evaluated as written.
    pub fn remainder_direct(&self, u: Complex64) -> Result<Complex64> {
        let diffs = self.basis.diffs(u)?;
        let pt = surface::curve_point_of_u(u)?;
        if pt.t.norm() < 1e-3 {
            return Err(Error::DivisionNearZero {
                t_abs: pt.t.norm(),
            });
        }
        Ok(self.p13_with(&pt, &diffs) - jet::weighted(self.records.iter().map(|r| r.d), &diffs))
    }

    /// R(u), from its series near u₀.
    pub fn remainder(&self, u: Complex64) -> Result<Complex64> {
        let w = u - elliptic::u0();
        if w.norm() < TAYLOR_SWITCH {
            Ok(self.taylor.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c))
        } else {
            self.remainder_direct(u)
        }
    }

    /// P₁₃(u) = R(u) + Σ d_ℓ diff_ℓ(u), valid also near u₀.
    pub fn p13(&self, u: Complex64) -> Result<Complex64> {
        let diffs = self.basis.diffs(u)?;
        Ok(self.remainder(u)? + jet::weighted(self.records.iter().map(|r| r.d), &diffs))
    }

    /// Q_scat(u) = Σ C_ℓ diff_ℓ(u) + R(u) − R(u₀).
    ///
    /// u is used as given: the zeta sums are not doubly periodic unless the
    /// coefficient sums vanish, so the representative matters.
    pub fn q_scat_u(&self, u: Complex64) -> Result<Complex64> {
        let diffs = self.basis.diffs(u)?;
        let c = jet::weighted(self.records.iter().map(|r| r.c), &diffs);
        let q = c + self.remainder(u)? - self.gauge_constant;
        if !q.is_finite() {
            return Err(Error::NonFiniteOutput(format!("Q_scat at u = {u}")));
        }
        Ok(q)
    }

    /// Torus point over ζ, as u₀ + δ with δ in the centred cell.
    pub fn u_of_zeta(&self, zeta: Complex64) -> Result<Complex64> {
        let guard = self.cfg.tolerances.pole_guard;
        let pt = surface::point_of_zeta(zeta, guard)?;
        Ok(elliptic::u0() + surface::lift_delta(&pt, guard)?)
    }

    pub fn q_scat_zeta(&self, zeta: Complex64) -> Result<Complex64> {
        self.q_scat_u(self.u_of_zeta(zeta)?)
    }

    pub fn zeta_incident(&self) -> Complex64 {
        Complex64::new(self.cfg.theta_i, self.cfg.eps)
    }

    /// Incident pole u on the same representative as [`Self::u_of_zeta`].
    pub fn u_incident(&self) -> Result<Complex64> {
        let guard = self.cfg.tolerances.pole_guard;
        Ok(elliptic::u0() + surface::lift_delta(&self.incident.point, guard)?)
    }

    /// Q_total(ζ) = 1/(ζ − ζ_i) + Q_scat(ζ).
    pub fn q_total(&self, zeta: Complex64) -> Result<Complex64> {
        let d = zeta - self.zeta_incident();
        if d.norm() < self.cfg.tolerances.pole_guard {
            return Err(Error::IncidentPole { zeta });
        }
        Ok(1.0 / d + self.q_scat_zeta(zeta)?)
    }

    /// Sum of all scattered residues C_ℓ.
    pub fn residue_sum(&self) -> Complex64 {
        self.records.iter().map(|r| r.c).sum()
    }

    /// Face coupling at z with Im z > 0 on the face θ_b = face·π/4.
    pub fn face_coupling(&self, face: i8, z: Complex64) -> Result<FaceCoupling> {
        let guard = self.cfg.tolerances.pole_guard;
        let theta_b = f64::from(face.signum()) * FRAC_PI_4;
        let p = surface::curve_lift((I * z).exp(), Sheet::Physical);
        let s = surface::snell_s(&p, guard)?;
        let w_prime = surface::g_prime(&p, guard)?;
        // branch of −i log s that follows z + i log √2
        let mut w = -I * s.ln();
        let lead = z + I * SQRT_2.ln();
        w += TAU * ((lead - w).re / TAU).round();
        let q_plus = self.q_total(theta_b + w)?;
        let q_minus = self.q_total(theta_b - w)?;
        let s_plus = 0.5 * ((1.0 + w_prime) * q_plus + (1.0 - w_prime) * q_minus);
        let s_minus = 0.5 * ((1.0 - w_prime) * q_plus + (1.0 + w_prime) * q_minus);
        Ok(FaceCoupling {
            z,
            w,
            w_prime,
            q_plus,
            q_minus,
            s_plus,
            s_minus,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceCoupling {
    pub z: Complex64,
    pub w: Complex64,
    pub w_prime: Complex64,
    pub q_plus: Complex64,
    pub q_minus: Complex64,
    pub s_plus: Complex64,
    pub s_minus: Complex64,
}

/// Angular gap to the nearest multiple of π/2 (where the map degenerates).
pub fn axis_gap(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI / 2.0);
    r.min(PI / 2.0 - r)
}
