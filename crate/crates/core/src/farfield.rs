//! Diffraction coefficient D(θ, θ_i) in the limit ε → 0⁺, angle sweeps and
//! the reciprocity report.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::WedgeConfig;
use crate::error::{Error, Result};
use crate::numerics;
use crate::reconstruct::SpectralSolution;
use crate::surface;

/// ε values whose Q_scat boundary values are extrapolated to ε = 0.
pub const EPS_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// e^{−3πi/4} √(2/(π k₀)).
pub fn prefactor(k0: f64) -> Complex64 {
    Complex64::from_polar((2.0 / (PI * k0)).sqrt(), -3.0 * FRAC_PI_4)
}

/// θ_k = π/4 + k(3π/2)/(n + 1), k = 1..n: n angles strictly inside the
/// exterior sector.
pub fn default_grid(n: usize) -> Vec<f64> {
    let step = 1.5 * PI / (n as f64 + 1.0);
    (1..=n).map(|k| FRAC_PI_4 + k as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: Complex64,
    pub residual: f64,
}

/// Row-level problems recorded by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowFlag {
    NearPoleDirection,
    ExtrapolationUnstable,
    EvaluationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldRow {
    pub theta: f64,
    #[serde(rename = "D")]
    pub d: Option<Complex64>,
    pub residual: Option<f64>,
    pub pole_distance: f64,
    pub flags: Vec<RowFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldTable {
    pub cfg: WedgeConfig,
    pub eps_ladder: Vec<f64>,
    pub extrapolation: String,
    pub pole_flag_threshold: f64,
    pub unstable_threshold: f64,
    pub rows: Vec<FarFieldRow>,
}

/// One solution per ladder value of ε; θ_i, k₀ and tolerances from `cfg`.
#[derive(Debug, Clone)]
pub struct FarField {
    pub cfg: WedgeConfig,
    ladder: Vec<SpectralSolution>,
    /// ε → 0 limits of the scattered poles' ζ-images.
    pub pole_images: Vec<Complex64>,
}

impl FarField {
    pub fn new(cfg: &WedgeConfig) -> Result<Self> {
        cfg.validate()?;
        let ladder = EPS_LADDER
            .iter()
            .map(|&e| SpectralSolution::new(&cfg.with_eps(e)))
            .collect::<Result<Vec<_>>>()?;
        let guard = cfg.tolerances.pole_guard;
        let n = ladder[0].poles.len();
        let mut pole_images = Vec::with_capacity(n);
        for k in 0..n {
            let zs = ladder
                .iter()
                .map(|s| surface::zeta_of_point(&s.poles[k].point, guard))
                .collect::<Result<Vec<_>>>()?;
            // keep the branch of log continuous along the ladder
            let z0 = zs[0];
            let zs: Vec<Complex64> = zs
                .iter()
                .map(|z| z + TAU * ((z0 - z).re / TAU).round())
                .collect();
            pole_images.push(numerics::neville(&EPS_LADDER, &zs, 0.0).0);
        }
        Ok(FarField {
            cfg: *cfg,
            ladder,
            pole_images,
        })
    }

    pub fn solutions(&self) -> &[SpectralSolution] {
        &self.ladder
    }

    /// ζ-distance from real θ to the nearest extrapolated pole image, mod 2π.
    pub fn pole_distance(&self, theta: f64) -> f64 {
        self.pole_images
            .iter()
            .map(|z| {
                let dr = (theta - z.re).rem_euclid(TAU);
                Complex64::new(dr.min(TAU - dr), z.im).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Q_scat(θ + iε; ε) over the ladder, extrapolated to ε = 0.
    pub fn boundary_value(&self, theta: f64) -> Result<Extrapolated> {
        let vals = self
            .ladder
            .iter()
            .map(|s| s.q_scat_zeta(Complex64::new(theta, s.cfg.eps)))
            .collect::<Result<Vec<_>>>()?;
        let (value, residual) = numerics::neville(&EPS_LADDER, &vals, 0.0);
        Ok(Extrapolated { value, residual })
    }

    pub fn d_coefficient(&self, theta: f64) -> Result<Complex64> {
        let (d, residual) = self.d_with_residual(theta)?;
        let limit = 10.0 * self.cfg.tolerances.tol_eval;
        if residual > limit {
            return Err(Error::ExtrapolationUnstable { residual, limit });
        }
        Ok(d)
    }

    /// D and its extrapolation residual, refusing only pole directions.
    pub fn d_with_residual(&self, theta: f64) -> Result<(Complex64, f64)> {
        let dist = self.pole_distance(theta);
        if dist < 10.0 * self.cfg.tolerances.pole_guard {
            return Err(Error::NearPoleDirection { theta, dist });
        }
        let b = self.boundary_value(theta)?;
        Ok((prefactor(self.cfg.k0) * b.value, b.residual))
    }

    pub fn row(&self, theta: f64) -> FarFieldRow {
        let pole_distance = self.pole_distance(theta);
        let mut row = FarFieldRow {
            theta,
            d: None,
            residual: None,
            pole_distance,
            flags: Vec::new(),
            error: None,
        };
        if pole_distance < 10.0 * self.cfg.tolerances.pole_guard {
            row.flags.push(RowFlag::NearPoleDirection);
            return row;
        }
        match self.boundary_value(theta) {
            Ok(b) => {
                row.d = Some(prefactor(self.cfg.k0) * b.value);
                row.residual = Some(b.residual);
                if b.residual > 10.0 * self.cfg.tolerances.tol_eval {
                    row.flags.push(RowFlag::ExtrapolationUnstable);
                }
            }
            Err(e) => {
                row.flags.push(RowFlag::EvaluationFailed);
                row.error = Some(e.name().to_string());
            }
        }
        row
    }
}

/// D(θ, θ_i) with θ_i, k₀ from `cfg`; `cfg.eps` is not used.
pub fn d_coefficient(theta: f64, cfg: &WedgeConfig) -> Result<Complex64> {
    FarField::new(cfg)?.d_coefficient(theta)
}

/// D from a single ε = `cfg.eps`, without extrapolation.
pub fn d_direct(theta: f64, cfg: &WedgeConfig) -> Result<Complex64> {
    let s = SpectralSolution::new(cfg)?;
    Ok(prefactor(cfg.k0) * s.q_scat_zeta(Complex64::new(theta, cfg.eps))?)
}

pub fn farfield_sweep(grid: &[f64], cfg: &WedgeConfig) -> Result<FarFieldTable> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "grid must be strictly increasing".into(),
        ));
    }
    let ff = FarField::new(cfg)?;
    let rows = grid.par_iter().map(|&th| ff.row(th)).collect();
    Ok(FarFieldTable {
        cfg: *cfg,
        eps_ladder: EPS_LADDER.to_vec(),
        extrapolation: "neville-quadratic".into(),
        pole_flag_threshold: 10.0 * cfg.tolerances.pole_guard,
        unstable_threshold: 10.0 * cfg.tolerances.tol_eval,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityReport {
    pub grid: Vec<f64>,
    /// Δ[a][b] = |D(θ_a; θ_b) − D(θ_b; θ_a)|; `None` where either side is a
    /// pole direction.
    pub delta: Vec<Vec<Option<f64>>>,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<(usize, usize)>,
    pub skipped: usize,
    /// Entries where either D carries an extrapolation residual above
    /// 10·tol_eval; they are included in max and mean.
    pub unstable: usize,
    /// Largest extrapolation residual among the entries used.
    pub max_residual: f64,
}

pub fn reciprocity_report(grid: &[f64], cfg: &WedgeConfig) -> Result<ReciprocityReport> {
    let n = grid.len();
    // d[b][a] = D(θ_a; θ_i = θ_b)
    let d: Vec<Vec<Option<(Complex64, f64)>>> = grid
        .par_iter()
        .map(|&thi| {
            let ff = FarField::new(&cfg.with_theta_i(thi))?;
            Ok(grid.iter().map(|&th| ff.d_with_residual(th).ok()).collect())
        })
        .collect::<Result<_>>()?;
    let limit = 10.0 * cfg.tolerances.tol_eval;
    let mut delta = vec![vec![None; n]; n];
    let (mut max, mut sum, mut count, mut skipped) = (0.0f64, 0.0, 0usize, 0usize);
    let (mut unstable, mut max_residual) = (0usize, 0.0f64);
    let mut argmax = None;
    for a in 0..n {
        for b in 0..n {
            match (d[b][a], d[a][b]) {
                (Some((x, rx)), Some((y, ry))) => {
                    let v = (x - y).norm();
                    if rx.max(ry) > limit {
                        unstable += 1;
                    }
                    max_residual = max_residual.max(rx.max(ry));
                    delta[a][b] = Some(v);
                    sum += v;
                    count += 1;
                    if v > max {
                        max = v;
                        argmax = Some((a, b));
                    }
                }
                _ => skipped += 1,
            }
        }
    }
    Ok(ReciprocityReport {
        grid: grid.to_vec(),
        delta,
        max,
        mean: if count > 0 { sum / count as f64 } else { 0.0 },
        argmax,
        skipped,
        unstable,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefactor_values() {
        let p = prefactor(1.0);
        assert!((p.norm() - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((p.arg() + 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((prefactor(4.0) * 2.0 - p).norm() < 1e-15);
    }

    #[test]
    fn grid_is_inside_sector() {
        let g = default_grid(13);
        assert_eq!(g.len(), 13);
        assert!(g[0] > FRAC_PI_4 && g[12] < 7.0 * FRAC_PI_4);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scaling_and_periodicity() {
        let cfg = WedgeConfig::new(PI / 2.0, 1e-3);
        let ff = FarField::new(&cfg).unwrap();
        let ff4 = FarField::new(&cfg.with_k0(4.0)).unwrap();
        let th = PI / 2.0 + 0.3;
        let d = ff.d_coefficient(th).unwrap();
        assert!((ff4.d_coefficient(th).unwrap() * 2.0 - d).norm() < 1e-14 * d.norm());
        let d2 = ff.d_coefficient(th + TAU).unwrap();
        assert!((d2 - d).norm() < 1e-8);
        let q = ff.boundary_value(th).unwrap().value;
        assert!((d / q - prefactor(1.0)).norm() < 1e-14);
    }

    #[test]
    fn pole_images_are_flagged() {
        let cfg = WedgeConfig::new(PI / 2.0, 1e-3);
        let ff = FarField::new(&cfg).unwrap();
        let z = ff.pole_images.iter().find(|z| z.im.abs() < 1e-9).copied().unwrap();
        let row = ff.row(z.re);
        assert_eq!(row.flags, vec![RowFlag::NearPoleDirection]);
        assert!(matches!(
            ff.d_coefficient(z.re),
            Err(Error::NearPoleDirection { .. })
        ));
    }

    #[test]
    fn sweep_keeps_order_and_rejects_unsorted() {
        let cfg = WedgeConfig::new(PI / 2.0, 1e-3);
        let g = default_grid(9);
        let t = farfield_sweep(&g, &cfg).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.theta).collect::<Vec<_>>(), g);
        assert!(farfield_sweep(&[1.0, 0.5], &cfg).is_err());
    }
}
