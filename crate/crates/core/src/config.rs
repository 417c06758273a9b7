//! Problem parameters and numerical tolerances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Elliptic-function identities (ODE residual, inversion roundtrip).
    pub tol_ell: f64,
    /// Curve and cubic residuals.
    pub tol_curve: f64,
    /// Closed-form tables against the mode-matrix path.
    pub tol_tbl: f64,
    /// Spectral evaluation (gauge, residues, face coupling).
    pub tol_eval: f64,
    /// Finite-difference checks.
    pub tol_fd: f64,
    /// Minimum distance to a pole before an evaluation is refused.
    pub pole_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_ell: 1e-10,
            tol_curve: 1e-12,
            tol_tbl: 1e-9,
            tol_eval: 1e-8,
            tol_fd: 1e-6,
            pole_guard: 1e-8,
        }
    }
}

impl Tolerances {
    /// Apply a `key=value` override as accepted by `--tol-override`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {key} must be positive and finite"
            )));
        }
        let slot = match key {
            "tol_ell" => &mut self.tol_ell,
            "tol_curve" => &mut self.tol_curve,
            "tol_tbl" => &mut self.tol_tbl,
            "tol_eval" => &mut self.tol_eval,
            "tol_fd" => &mut self.tol_fd,
            "pole_guard" => &mut self.pole_guard,
            other => {
                return Err(Error::InvalidConfig(format!("unknown tolerance `{other}`")));
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Wedge problem parameters.
///
/// The geometry is fixed: half-angle π/4, index ratio √2, impedance match.
/// Only the incident direction, the limiting-absorption displacement and the
/// exterior wavenumber vary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeConfig {
    /// Incident angle θ_i in radians.
    pub theta_i: f64,
    /// Limiting-absorption displacement, ζ_i = θ_i + iε.
    pub eps: f64,
    /// Exterior wavenumber k₀.
    pub k0: f64,
    pub tolerances: Tolerances,
}

impl WedgeConfig {
    pub fn new(theta_i: f64, eps: f64) -> Self {
        WedgeConfig {
            theta_i,
            eps,
            k0: 1.0,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_k0(mut self, k0: f64) -> Self {
        self.k0 = k0;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_theta_i(mut self, theta_i: f64) -> Self {
        self.theta_i = theta_i;
        self
    }

    /// Checks ε > 0, k₀ > 0 and finiteness.
    pub fn validate(&self) -> Result<()> {
        if !self.theta_i.is_finite() {
            return Err(Error::InvalidConfig("theta_i must be finite".into()));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::DegenerateEps { eps: self.eps });
        }
        if !(self.k0 > 0.0) || !self.k0.is_finite() {
            return Err(Error::InvalidConfig("k0 must be positive".into()));
        }
        Ok(())
    }
}

impl Default for WedgeConfig {
    fn default() -> Self {
        WedgeConfig::new(std::f64::consts::FRAC_PI_2, 1e-3)
    }
}
