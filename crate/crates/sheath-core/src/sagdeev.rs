//! The Sagdeev potential machinery: f, f', the branch-selected inverse
//! f^{-1}, V(phi), and the stationary existence check.
//!
//! f is strictly decreasing on (0, c_inf] for supersonic far fields, so the
//! inverse branch containing the far-field state n = 1 is well defined there.
//! V(phi) = int_0^phi [f^{-1}(eta) - e^{-eta}] d eta; near phi = 0 the
//! integrand is evaluated through its quartic Taylor expansion (the direct
//! quadrature loses all relative accuracy where the integrand vanishes).

use serde::Serialize;

use crate::error::{Result, SheathError};
use crate::numerics::quad::adaptive_simpson;
use crate::numerics::roots::newton_bisect;
use crate::params::{PlasmaParams, Regime, RegimeKind};

/// Default absolute tolerance on the f-residual in f_inverse.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;
/// Default absolute quadrature tolerance for V.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;
/// Density floor for the inverse bracket.
pub const N_FLOOR: f64 = 1e-8;
/// |phi| below which V is evaluated by its Taylor expansion.
pub const SERIES_RADIUS: f64 = 1e-4;

/// f(n) = gamma R T_inf / (gamma - 1) (n^{gamma-1} - 1) + m u_inf^2 / 2 (1/n^2 - 1).
pub fn f(n: f64, params: &PlasmaParams) -> Result<f64> {
    if !(n > 0.0) {
        return Err(SheathError::DomainError(format!("f requires n > 0, got {n}")));
    }
    let g = params.gamma;
    let a = params.grt() / (g - 1.0);
    let b = 0.5 * params.m * params.u_inf * params.u_inf;
    Ok(a * (n.powf(g - 1.0) - 1.0) + b * (1.0 / (n * n) - 1.0))
}

/// f'(n) = (-m u_inf^2 + gamma R T_inf n^{gamma+1}) / n^3.
pub fn f_prime(n: f64, params: &PlasmaParams) -> Result<f64> {
    if !(n > 0.0) {
        return Err(SheathError::DomainError(format!("f' requires n > 0, got {n}")));
    }
    let mu2 = params.m * params.u_inf * params.u_inf;
    Ok((-mu2 + params.grt() * n.powf(params.gamma + 1.0)) / (n * n * n))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExistenceReport {
    pub exists: bool,
    pub v_at_phib: f64,
    pub f_at_c: f64,
}

/// Branch-selected inverse of f and the Sagdeev potential, with the Taylor
/// data of V at 0 precomputed.
#[derive(Debug, Clone)]
pub struct Sagdeev {
    params: PlasmaParams,
    c_crit: f64,
    f_at_c: f64,
    quad_tol: f64,
    inverse_tol: f64,
    /// d^k V / d phi^k at 0 for k = 2, 3, 4.
    v_taylor: [f64; 3],
}

impl Sagdeev {
    pub fn new(params: PlasmaParams, quad_tol: f64) -> Result<Self> {
        params.validate()?;
        if quad_tol <= 0.0 {
            return Err(SheathError::InvalidParams("quad_tol must be > 0".into()));
        }
        let u2 = params.u_inf * params.u_inf;
        if u2 * params.m <= params.grt() {
            return Err(SheathError::InvalidParams(
                "supersonic branch requires m u_inf^2 > gamma R T_inf".into(),
            ));
        }
        let c_crit = (params.m * u2 / params.grt()).powf(1.0 / (params.gamma + 1.0));
        let f_at_c = f(c_crit, &params)?;

        // Derivatives of f at n = 1, then of the inverse at phi = 0, then of
        // V (V' = f^{-1}(phi) - e^{-phi}).
        let g = params.gamma;
        let grt = params.grt();
        let mu2 = params.m * u2;
        let f1 = grt - mu2;
        let f2 = grt * (g - 2.0) + 3.0 * mu2;
        let f3 = grt * (g - 2.0) * (g - 3.0) - 12.0 * mu2;
        let n1 = 1.0 / f1;
        let n2 = -f2 / (f1 * f1 * f1);
        let n3 = (3.0 * f2 * f2 - f1 * f3) / f1.powi(5);
        let v_taylor = [n1 + 1.0, n2 - 1.0, n3 + 1.0];

        Ok(Self { params, c_crit, f_at_c, quad_tol, inverse_tol: DEFAULT_INVERSE_TOL, v_taylor })
    }

    pub fn params(&self) -> &PlasmaParams {
        &self.params
    }

    pub fn c_crit(&self) -> f64 {
        self.c_crit
    }

    pub fn f_at_c(&self) -> f64 {
        self.f_at_c
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Analytic V''(0) = 1 - 1/(m u_inf^2 - gamma R T_inf).
    pub fn v_pp0(&self) -> f64 {
        self.v_taylor[0]
    }

    /// Analytic V'''(0); equals 12 Gamma^2 in the degenerate regime.
    pub fn v_ppp0(&self) -> f64 {
        self.v_taylor[1]
    }

    /// The unique n in (0, c_inf] with f(n) = phi.
    pub fn f_inverse(&self, phi: f64) -> Result<f64> {
        self.f_inverse_guess(phi, None)
    }

    /// f_inverse with an optional warm-start guess (continuation along a
    /// monotone sweep of phi).
    pub fn f_inverse_guess(&self, phi: f64, guess: Option<f64>) -> Result<f64> {
        if phi < self.f_at_c {
            return Err(SheathError::BranchExceeded { phi, f_at_c: self.f_at_c });
        }
        if phi == 0.0 {
            return Ok(1.0);
        }
        let p = self.params;
        // f is strictly decreasing on the bracket; f' vanishes at c_crit so
        // plain Newton stalls at the endpoint -- the bisection safeguard in
        // newton_bisect covers that.
        newton_bisect(
            |n| f(n, &p).expect("n > 0 on bracket") - phi,
            |n| f_prime(n, &p).expect("n > 0 on bracket"),
            N_FLOOR,
            self.c_crit,
            guess,
            self.inverse_tol,
            200,
        )
    }

    /// Integrand of V: f^{-1}(eta) - e^{-eta}.
    pub fn v_integrand(&self, eta: f64) -> Result<f64> {
        Ok(self.f_inverse(eta)? - (-eta).exp())
    }

    /// Quartic Taylor expansion of V about 0. Relative truncation error is
    /// O(phi^2) even in the degenerate regime (leading term phi^3 there).
    pub fn v_series(&self, phi: f64) -> f64 {
        let [v2, v3, v4] = self.v_taylor;
        phi * phi * (v2 / 2.0 + phi * (v3 / 6.0 + phi * v4 / 24.0))
    }

    /// Sagdeev potential V(phi) by adaptive quadrature (series core below
    /// SERIES_RADIUS).
    pub fn v(&self, phi: f64) -> Result<f64> {
        if phi < self.f_at_c {
            return Err(SheathError::BranchExceeded { phi, f_at_c: self.f_at_c });
        }
        if phi == 0.0 {
            return Ok(0.0);
        }
        let phi_s = phi.signum() * phi.abs().min(SERIES_RADIUS);
        let core = self.v_series(phi_s);
        if phi.abs() <= SERIES_RADIUS {
            return Ok(core);
        }
        let mut err: Option<SheathError> = None;
        let mut g = |eta: f64| match self.v_integrand(eta) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let tail = adaptive_simpson(&mut g, phi_s, phi, self.quad_tol);
        if let Some(e) = err {
            return Err(e);
        }
        Ok(core + tail)
    }

    /// Prop-style existence check for the supersonic branch:
    /// exists iff V(phi_b) >= -quad_tol and phi_b >= f(c_inf).
    pub fn existence_check(&self, regime: &Regime) -> Result<ExistenceReport> {
        match regime.kind {
            RegimeKind::Degenerate | RegimeKind::Nondegenerate => {}
            RegimeKind::ForbiddenBand => {
                return Err(SheathError::InvalidParams(
                    "no nontrivial stationary solution exists in the forbidden band".into(),
                ))
            }
            RegimeKind::Subsonic => {
                return Err(SheathError::InvalidParams(
                    "subsonic stationary construction is not supported".into(),
                ))
            }
        }
        let phi_b = self.params.phi_b;
        let f_at_c = self.f_at_c;
        if phi_b < f_at_c {
            return Ok(ExistenceReport { exists: false, v_at_phib: f64::NAN, f_at_c });
        }
        let v_at_phib = self.v(phi_b)?;
        let exists = v_at_phib >= -self.quad_tol && phi_b >= f_at_c;
        Ok(ExistenceReport { exists, v_at_phib, f_at_c })
    }
}
