//! Physical parameters, regime classification, and closed-form derived
//! constants.
//!
//! The incoming-flow condition m u_inf^2 >= gamma R T_inf + 1 with u_inf < 0
//! (the Bohm criterion) splits parameter space into the regimes below; the
//! degenerate regime is the measure-zero equality case.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SheathError};

/// Default relative tolerance on u_inf^2 for detecting the degenerate
/// (equality) regime.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PlasmaParams {
    /// Ion mass.
    pub m: f64,
    /// Gas constant.
    pub r: f64,
    /// Adiabatic index, > 1.
    pub gamma: f64,
    /// Far-field temperature.
    pub t_inf: f64,
    /// Far-field velocity (negative for incoming flow).
    pub u_inf: f64,
    /// Boundary potential at the wall.
    pub phi_b: f64,
}

impl PlasmaParams {
    pub fn new(m: f64, r: f64, gamma: f64, t_inf: f64, u_inf: f64, phi_b: f64) -> Result<Self> {
        let p = Self { m, r, gamma, t_inf, u_inf, phi_b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(SheathError::InvalidParams(format!("m must be > 0, got {}", self.m)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(SheathError::InvalidParams(format!("R must be > 0, got {}", self.r)));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(SheathError::InvalidParams(format!(
                "gamma must be > 1, got {}",
                self.gamma
            )));
        }
        if !(self.t_inf > 0.0 && self.t_inf.is_finite()) {
            return Err(SheathError::InvalidParams(format!(
                "T_inf must be > 0, got {}",
                self.t_inf
            )));
        }
        if !self.u_inf.is_finite() || !self.phi_b.is_finite() {
            return Err(SheathError::InvalidParams("u_inf and phi_b must be finite".into()));
        }
        Ok(())
    }

    /// Far-field density; quasi-neutrality fixes it to 1.
    pub const fn n_inf(&self) -> f64 {
        1.0
    }

    /// gamma * R * T_inf, the squared sonic speed scale (times m).
    pub fn grt(&self) -> f64 {
        self.gamma * self.r * self.t_inf
    }

    /// Lower regime threshold on u_inf^2.
    pub fn sonic_threshold(&self) -> f64 {
        self.grt() / self.m
    }

    /// Upper regime threshold on u_inf^2 (the sheath existence threshold).
    pub fn bohm_threshold(&self) -> f64 {
        (self.grt() + 1.0) / self.m
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub enum RegimeKind {
    Subsonic,
    ForbiddenBand,
    Degenerate,
    Nondegenerate,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    /// Distance of u_inf^2 from the nearest regime threshold.
    pub margin: f64,
}

impl Regime {
    pub fn is_supersonic(&self) -> bool {
        matches!(self.kind, RegimeKind::Degenerate | RegimeKind::Nondegenerate)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Critical density c_inf, the unique critical point of f.
    pub c_crit: f64,
    /// Degenerate decay constant; populated only in the degenerate regime.
    pub gamma_const: Option<f64>,
    /// f evaluated at the critical density (branch endpoint, <= 0 when
    /// c_crit >= 1).
    pub f_at_c: f64,
}

/// Classify against the regime thresholds with a relative tolerance band
/// of `tol * u_inf^2` around each threshold.
///
/// Sheath classification needs incoming flow; u_inf >= 0 is rejected.
pub fn classify_regime(params: &PlasmaParams, tol: f64) -> Result<Regime> {
    params.validate()?;
    if tol < 0.0 {
        return Err(SheathError::InvalidParams("classification tol must be >= 0".into()));
    }
    if params.u_inf >= 0.0 {
        return Err(SheathError::InvalidParams(format!(
            "sheath classification requires incoming flow u_inf < 0, got {}",
            params.u_inf
        )));
    }
    let u2 = params.u_inf * params.u_inf;
    let lo = params.sonic_threshold();
    let hi = params.bohm_threshold();
    let band = tol * u2;
    let margin_lo = u2 - lo;
    let margin_hi = u2 - hi;
    let kind = if margin_hi.abs() <= band {
        RegimeKind::Degenerate
    } else if u2 > hi {
        RegimeKind::Nondegenerate
    } else if u2 <= lo {
        RegimeKind::Subsonic
    } else {
        RegimeKind::ForbiddenBand
    };
    let margin = match kind {
        RegimeKind::Degenerate => margin_hi.abs(),
        RegimeKind::Nondegenerate => margin_hi,
        RegimeKind::Subsonic => margin_lo.abs(),
        RegimeKind::ForbiddenBand => margin_lo.min(hi - u2),
    };
    Ok(Regime { kind, margin })
}

/// Closed-form derived constants: critical density, the degenerate decay
/// constant, and the branch-endpoint value of f.
pub fn derived_constants(params: &PlasmaParams, regime: &Regime) -> Result<DerivedConstants> {
    params.validate()?;
    let u2 = params.u_inf * params.u_inf;
    let c_crit = (params.m * u2 / params.grt()).powf(1.0 / (params.gamma + 1.0));
    let gamma_const = if regime.kind == RegimeKind::Degenerate {
        Some(degenerate_gamma(params))
    } else {
        None
    };
    let f_at_c = crate::sagdeev::f(c_crit, params)?;
    Ok(DerivedConstants { c_crit, gamma_const, f_at_c })
}

/// Gamma = sqrt(((gamma^2 + gamma) R T_inf + 2) / 12).
pub fn degenerate_gamma(params: &PlasmaParams) -> f64 {
    let g = params.gamma;
    (((g * g + g) * params.r * params.t_inf + 2.0) / 12.0).sqrt()
}

/// Characteristic speeds of the quasilinear transport system, ascending.
///
/// Pure formula evaluation; no sign restriction on u here.
pub fn characteristic_speeds(u: f64, t: f64, params: &PlasmaParams) -> (f64, f64, f64) {
    let m = params.m;
    let disc = ((m - 1.0) * (m - 1.0) * u * u + 4.0 * params.gamma * params.r * t).sqrt();
    let l1 = 0.5 * ((m + 1.0) * u - disc);
    let l3 = 0.5 * ((m + 1.0) * u + disc);
    (l1, u, l3)
}
