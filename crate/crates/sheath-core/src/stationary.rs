//! Stationary sheath construction by quadrature of the first integral
//! (1/2) phi_x^2 = V(phi), plus residual checks and tail-decay fits.
//!
//! The profile is built in the phi variable: x(phi) = int dphi / sqrt(2 V)
//! accumulated over a log-spaced phi table from phi_b down to a cutoff
//! eps_tail * |phi_b|, then each grid node is resolved by inverting the
//! monotone map x(phi) directly (bracketed Newton on the table segment).
//! Direct inversion rather than table interpolation keeps the resample error
//! far below the h^2 discretization floor probed by the convergence tests.
//! Past the cutoff the tail is continued analytically: exponential with the
//! linearized Poisson rate sqrt(V''(0)) in the nondegenerate regime, and the
//! inverse-square algebraic form in the degenerate one.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SheathError};
use crate::numerics::fd::d2_order2;
use crate::numerics::fit::linear_fit;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::roots::newton_bisect;
use crate::params::{
    classify_regime, degenerate_gamma, PlasmaParams, Regime, RegimeKind, DEFAULT_CLASSIFY_TOL,
};
use crate::sagdeev::{f, Sagdeev, DEFAULT_QUAD_TOL, SERIES_RADIUS};

/// Requested grid for the resampled profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridRequest {
    /// Domain length; None picks the regime default
    /// max(20/c_pred, 40/(Gamma sqrt(phi_b))).
    pub length: Option<f64>,
    /// Cell count (nodes = n_cells + 1).
    pub n_cells: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationaryOptions {
    /// Tail cutoff as a fraction of |phi_b|.
    pub eps_tail: f64,
    /// Segments in the log-spaced phi table.
    pub table_segments: usize,
    /// Quadrature tolerance handed to the Sagdeev potential.
    pub quad_tol: f64,
    /// Regime classification tolerance.
    pub classify_tol: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            eps_tail: 1e-6,
            table_segments: 600,
            quad_tol: DEFAULT_QUAD_TOL,
            classify_tol: DEFAULT_CLASSIFY_TOL,
        }
    }
}

/// Construction metadata stored with the profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub h: f64,
    pub length: f64,
    pub eps_tail: f64,
    pub quad_tol: f64,
    /// x past which the analytic tail continuation is used (None when the
    /// quadrature table covers the whole grid).
    pub x_cut: Option<f64>,
    /// Linearized far-field decay rate sqrt(V''(0)) (nondegenerate).
    pub c_pred: Option<f64>,
    /// Degenerate decay constant Gamma.
    pub gamma_const: Option<f64>,
}

/// Discretized stationary solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheathProfile {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub n: Vec<f64>,
    pub u: Vec<f64>,
    pub t: Vec<f64>,
    pub regime: Regime,
    pub params: PlasmaParams,
    pub meta: ProfileMeta,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualReport {
    /// sup |n u - u_inf|
    pub mass_flux: f64,
    /// sup |f(n) - phi|
    pub momentum: f64,
    /// sup |T - T_inf n^{gamma-1}|
    pub entropy: f64,
    /// sup over interior nodes of |phi_xx - (n - e^{-phi})| (centered stencil)
    pub poisson: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum TailReport {
    Nondegenerate { fitted_rate: f64, predicted_rate: f64, r_squared: f64, window: (f64, f64) },
    Degenerate { fitted_exponent: f64, predicted_exponent: f64, r_squared: f64, window: (f64, f64) },
}

impl SheathProfile {
    /// phi_x from the first integral, sign-matched to the monotone descent.
    pub fn phi_x_first_integral(&self, sagdeev: &Sagdeev) -> Result<Vec<f64>> {
        let s = self.params.phi_b.signum();
        self.phi
            .iter()
            .map(|&p| Ok(-s * (2.0 * sagdeev.v(p)?).max(0.0).sqrt()))
            .collect()
    }
}

/// Default domain length for a regime.
pub fn default_length(params: &PlasmaParams, regime: &Regime, sagdeev: &Sagdeev) -> f64 {
    match regime.kind {
        RegimeKind::Degenerate => {
            let gam = degenerate_gamma(params);
            40.0 / (gam * params.phi_b.abs().sqrt().max(1e-12))
        }
        _ => 20.0 / sagdeev.v_pp0().max(1e-12).sqrt(),
    }
}

pub fn solve_stationary(
    params: &PlasmaParams,
    grid: &GridRequest,
    opts: &StationaryOptions,
) -> Result<SheathProfile> {
    params.validate()?;
    if grid.n_cells < 16 {
        return Err(SheathError::InvalidParams("grid needs at least 16 cells".into()));
    }
    let regime = classify_regime(params, opts.classify_tol)?;
    let phi_b = params.phi_b;

    // phi_b = 0 fast path: the trivial constant profile.
    if phi_b == 0.0 {
        let length = grid.length.unwrap_or(40.0);
        return Ok(constant_profile(params, regime, length, grid.n_cells, opts));
    }

    if !regime.is_supersonic() {
        return Err(SheathError::InvalidParams(format!(
            "stationary construction requires the supersonic branch, got {:?}",
            regime.kind
        )));
    }
    if regime.kind == RegimeKind::Degenerate && phi_b < 0.0 {
        return Err(SheathError::InvalidParams(
            "degenerate sheath requires phi_b > 0".into(),
        ));
    }

    let sagdeev = Sagdeev::new(*params, opts.quad_tol)?;
    let report = sagdeev.existence_check(&regime)?;
    if !report.exists {
        return Err(SheathError::ExistenceViolation {
            v_at_phib: report.v_at_phib,
            f_at_c: report.f_at_c,
        });
    }

    let length = grid.length.unwrap_or_else(|| default_length(params, &regime, &sagdeev));
    let n_nodes = grid.n_cells + 1;
    let h = length / grid.n_cells as f64;

    let c_pred = if regime.kind == RegimeKind::Nondegenerate {
        Some(sagdeev.v_pp0().sqrt())
    } else {
        None
    };
    let gamma_const = if regime.kind == RegimeKind::Degenerate {
        Some(degenerate_gamma(params))
    } else {
        None
    };

    // Interior double-root scan on a linear phi mesh: V must stay positive
    // strictly between 0 and phi_b (a vanishing V would make the quadrature
    // singular before the far field is reached).
    let scan = 512;
    for k in 1..scan {
        let phi = phi_b * (k as f64) / scan as f64;
        if phi.abs() <= SERIES_RADIUS {
            // covered by the series; positivity there is checked below via
            // the table edges
            continue;
        }
        if sagdeev.v(phi)? <= 0.0 {
            return Err(SheathError::QuadratureSingularity { phi });
        }
    }

    let table = PhiTable::build(&sagdeev, phi_b, opts, length)?;

    // Resolve phi at every grid node, then apply the pointwise identities.
    let mut x = Vec::with_capacity(n_nodes);
    let mut phi = Vec::with_capacity(n_nodes);
    let mut n_field = Vec::with_capacity(n_nodes);
    let mut u_field = Vec::with_capacity(n_nodes);
    let mut t_field = Vec::with_capacity(n_nodes);
    let mut n_guess: Option<f64> = None;
    for i in 0..n_nodes {
        let xi = i as f64 * h;
        let p = if xi <= table.x_end() {
            table.phi_at(xi)?
        } else {
            analytic_tail(regime.kind, table.phi_last(), table.x_end(), xi, c_pred, gamma_const)
        };
        let n = sagdeev.f_inverse_guess(p, n_guess)?;
        n_guess = Some(n);
        x.push(xi);
        phi.push(p);
        n_field.push(n);
        u_field.push(params.u_inf / n);
        t_field.push(params.t_inf * n.powf(params.gamma - 1.0));
    }

    let x_cut = if table.x_end() < length { Some(table.x_end()) } else { None };
    Ok(SheathProfile {
        x,
        phi,
        n: n_field,
        u: u_field,
        t: t_field,
        regime,
        params: *params,
        meta: ProfileMeta {
            h,
            length,
            eps_tail: opts.eps_tail,
            quad_tol: opts.quad_tol,
            x_cut,
            c_pred,
            gamma_const,
        },
    })
}

fn constant_profile(
    params: &PlasmaParams,
    regime: Regime,
    length: f64,
    n_cells: usize,
    opts: &StationaryOptions,
) -> SheathProfile {
    let n_nodes = n_cells + 1;
    let h = length / n_cells as f64;
    SheathProfile {
        x: (0..n_nodes).map(|i| i as f64 * h).collect(),
        phi: vec![0.0; n_nodes],
        n: vec![1.0; n_nodes],
        u: vec![params.u_inf; n_nodes],
        t: vec![params.t_inf; n_nodes],
        regime,
        params: *params,
        meta: ProfileMeta {
            h,
            length,
            eps_tail: opts.eps_tail,
            quad_tol: opts.quad_tol,
            x_cut: None,
            c_pred: None,
            gamma_const: None,
        },
    }
}

fn analytic_tail(
    kind: RegimeKind,
    phi_end: f64,
    x_end: f64,
    x: f64,
    c_pred: Option<f64>,
    gamma_const: Option<f64>,
) -> f64 {
    match kind {
        RegimeKind::Nondegenerate => {
            let c = c_pred.expect("nondegenerate tail rate");
            phi_end * (-c * (x - x_end)).exp()
        }
        RegimeKind::Degenerate => {
            let gam = gamma_const.expect("degenerate Gamma");
            let g = gam * (x - x_end) + phi_end.powf(-0.5);
            1.0 / (g * g)
        }
        _ => unreachable!("tail continuation only on the supersonic branch"),
    }
}

/// Log-spaced cumulative table of (phi_k, V(phi_k), x(phi_k)).
struct PhiTable {
    /// descending in |phi|; phi[0] = phi_b
    phi: Vec<f64>,
    v: Vec<f64>,
    x: Vec<f64>,
    sign: f64,
    gl8: GaussLegendre,
    sagdeev: Sagdeev,
}

impl PhiTable {
    fn build(
        sagdeev: &Sagdeev,
        phi_b: f64,
        opts: &StationaryOptions,
        length: f64,
    ) -> Result<Self> {
        let sign = phi_b.signum();
        let k_seg = opts.table_segments.max(16);
        let ratio = opts.eps_tail.powf(1.0 / k_seg as f64);
        let mut phi = Vec::with_capacity(k_seg + 1);
        for k in 0..=k_seg {
            phi.push(phi_b * ratio.powi(k as i32));
        }

        let gl16 = GaussLegendre::new(16);
        let gl8 = GaussLegendre::new(8);

        // V at the edges, accumulated upward in |phi| from the series core.
        let mut v = vec![0.0; phi.len()];
        let mut anchor = phi.len() - 1;
        for (k, &p) in phi.iter().enumerate() {
            if p.abs() <= SERIES_RADIUS {
                anchor = k;
                break;
            }
        }
        for k in anchor..phi.len() {
            v[k] = sagdeev.v_series(phi[k]);
        }
        for k in (0..anchor).rev() {
            let lo = phi[k + 1];
            let hi = phi[k];
            let mut err = None;
            let seg = gl16.integrate(lo, hi, |eta| match sagdeev.v_integrand(eta) {
                Ok(val) => val,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            v[k] = v[k + 1] + seg;
            if v[k] <= 0.0 {
                return Err(SheathError::QuadratureSingularity { phi: phi[k] });
            }
        }

        let mut table = Self {
            phi,
            v,
            x: Vec::new(),
            sign,
            gl8,
            sagdeev: sagdeev.clone(),
        };

        // Cumulative x along the edges: x(phi_{k+1}) - x(phi_k)
        // = |int 1/sqrt(2V)|. Stop once the grid is covered.
        let mut xs = vec![0.0];
        for k in 0..k_seg {
            let lo = table.phi[k + 1];
            let hi = table.phi[k];
            let mut err = None;
            let seg = {
                let t = &table;
                t.gl8.integrate(lo, hi, |eta| match t.v_between(eta, k) {
                    Ok(vv) if vv > 0.0 => 1.0 / (2.0 * vv).sqrt(),
                    Ok(_) => {
                        err.get_or_insert(SheathError::QuadratureSingularity { phi: eta });
                        f64::NAN
                    }
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                })
            };
            if let Some(e) = err {
                return Err(e);
            }
            let next = xs[k] + seg.abs();
            xs.push(next);
            if next >= length {
                table.phi.truncate(k + 2);
                table.v.truncate(k + 2);
                break;
            }
        }
        table.x = xs;
        Ok(table)
    }

    fn x_end(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn phi_last(&self) -> f64 {
        *self.phi.last().unwrap()
    }

    /// V(eta) for eta inside segment k (between phi[k+1] and phi[k]),
    /// accumulated from the lower-|phi| edge.
    fn v_between(&self, eta: f64, k: usize) -> Result<f64> {
        if eta.abs() <= SERIES_RADIUS {
            return Ok(self.sagdeev.v_series(eta));
        }
        let base_phi = self.phi[k + 1];
        let base_v = self.v[k + 1];
        if base_phi.abs() <= SERIES_RADIUS {
            // segment straddles the series boundary; integrate from the
            // series radius instead
            let b = self.sign * SERIES_RADIUS;
            return self.accumulate(b, self.sagdeev.v_series(b), eta);
        }
        self.accumulate(base_phi, base_v, eta)
    }

    fn accumulate(&self, from: f64, v_from: f64, eta: f64) -> Result<f64> {
        let mut err = None;
        let seg = self.gl8.integrate(from, eta, |e| match self.sagdeev.v_integrand(e) {
            Ok(val) => val,
            Err(er) => {
                err.get_or_insert(er);
                f64::NAN
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(v_from + seg)
    }

    /// Invert the monotone map x(phi) at a grid position.
    fn phi_at(&self, xq: f64) -> Result<f64> {
        if xq <= 0.0 {
            return Ok(self.phi[0]);
        }
        // binary search for the bracketing segment
        let k = match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(idx) => return Ok(self.phi[idx]),
            Err(idx) => idx.saturating_sub(1).min(self.phi.len() - 2),
        };
        let (plo, phi_hi) = (self.phi[k + 1], self.phi[k]);
        let xk = self.x[k];
        let sign = self.sign;
        let xerr = std::cell::Cell::new(None::<String>);
        let x_of_phi = |p: f64| -> f64 {
            let mut err = None;
            let seg = self.gl8.integrate(p, phi_hi, |eta| match self.v_between(eta, k) {
                Ok(vv) if vv > 0.0 => 1.0 / (2.0 * vv).sqrt(),
                _ => {
                    err.get_or_insert(());
                    f64::NAN
                }
            });
            if err.is_some() {
                xerr.set(Some(format!("singular x(phi) integrand near phi = {p}")));
            }
            xk + seg.abs()
        };
        let root = newton_bisect(
            |p| x_of_phi(p) - xq,
            |p| {
                let vv = self.v_between(p, k).unwrap_or(f64::NAN);
                if vv > 0.0 {
                    -sign / (2.0 * vv).sqrt()
                } else {
                    f64::NAN
                }
            },
            plo.min(phi_hi),
            plo.max(phi_hi),
            None,
            1e-12 * xq.max(1.0),
            100,
        )?;
        if let Some(msg) = xerr.take() {
            return Err(SheathError::ConvergenceFailure(msg));
        }
        Ok(root)
    }
}

pub fn residual_check(profile: &SheathProfile) -> ResidualReport {
    let p = &profile.params;
    let mut mass_flux: f64 = 0.0;
    let mut momentum: f64 = 0.0;
    let mut entropy: f64 = 0.0;
    for i in 0..profile.x.len() {
        let n = profile.n[i];
        mass_flux = mass_flux.max((n * profile.u[i] - p.u_inf).abs());
        let fi = f(n, p).expect("n > 0 in a well-formed profile");
        momentum = momentum.max((fi - profile.phi[i]).abs());
        entropy = entropy.max((profile.t[i] - p.t_inf * n.powf(p.gamma - 1.0)).abs());
    }
    let h = profile.meta.h;
    let phi_xx = d2_order2(&profile.phi, h);
    let mut poisson: f64 = 0.0;
    for i in 1..profile.x.len() - 1 {
        let rhs = profile.n[i] - (-profile.phi[i]).exp();
        poisson = poisson.max((phi_xx[i] - rhs).abs());
    }
    ResidualReport { mass_flux, momentum, entropy, poisson }
}

pub fn tail_decay_fit(profile: &SheathProfile) -> Result<TailReport> {
    let phi_b = profile.params.phi_b;
    let n = profile.x.len();
    if phi_b == 0.0 {
        return Err(SheathError::InsufficientTail("constant profile has no tail".into()));
    }
    // precondition: tail resolved over the last third of the grid
    let last_third = &profile.phi[2 * n / 3..];
    if last_third.iter().any(|p| p.abs() >= 0.1 * phi_b.abs()) {
        return Err(SheathError::InsufficientTail(
            "|phi| >= 0.1 |phi_b| within the last third of the grid".into(),
        ));
    }
    // fit window: below a tenth of the boundary amplitude, above the cutoff
    // noise floor, and inside the quadrature-resolved region
    let floor = 20.0 * profile.meta.eps_tail * phi_b.abs();
    let x_hi = profile.meta.x_cut.unwrap_or(f64::INFINITY);
    let pick: Vec<usize> = (0..n)
        .filter(|&i| {
            let a = profile.phi[i].abs();
            a <= 0.1 * phi_b.abs() && a >= floor && profile.x[i] <= x_hi
        })
        .collect();
    if pick.len() < 10 {
        return Err(SheathError::InsufficientTail(format!(
            "only {} usable tail samples",
            pick.len()
        )));
    }
    let window = (profile.x[pick[0]], profile.x[*pick.last().unwrap()]);
    match profile.regime.kind {
        RegimeKind::Nondegenerate => {
            let xs: Vec<f64> = pick.iter().map(|&i| profile.x[i]).collect();
            let ys: Vec<f64> = pick.iter().map(|&i| profile.phi[i].abs().ln()).collect();
            let (_, slope, r2) = linear_fit(&xs, &ys);
            let predicted = profile.meta.c_pred.ok_or_else(|| {
                SheathError::InvalidParams("profile lacks c_pred metadata".into())
            })?;
            Ok(TailReport::Nondegenerate {
                fitted_rate: -slope,
                predicted_rate: predicted,
                r_squared: r2,
                window,
            })
        }
        RegimeKind::Degenerate => {
            let gam = profile
                .meta
                .gamma_const
                .ok_or_else(|| SheathError::InvalidParams("profile lacks Gamma metadata".into()))?;
            let xs: Vec<f64> = pick
                .iter()
                .map(|&i| (gam * profile.x[i] + phi_b.powf(-0.5)).ln())
                .collect();
            let ys: Vec<f64> = pick.iter().map(|&i| profile.phi[i].abs().ln()).collect();
            let (_, slope, r2) = linear_fit(&xs, &ys);
            Ok(TailReport::Degenerate {
                fitted_exponent: slope,
                predicted_exponent: -2.0,
                r_squared: r2,
                window,
            })
        }
        _ => Err(SheathError::InvalidParams(
            "tail fit defined only on the supersonic branch".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degen_params(phi_b: f64) -> PlasmaParams {
        PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -(2.0f64.sqrt()), phi_b).unwrap()
    }

    fn nondegen_params(phi_b: f64) -> PlasmaParams {
        PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -2.0, phi_b).unwrap()
    }

    #[test]
    fn trivial_profile() {
        let p = nondegen_params(0.0);
        let prof = solve_stationary(
            &p,
            &GridRequest { length: Some(10.0), n_cells: 32 },
            &StationaryOptions::default(),
        )
        .unwrap();
        assert!(prof.phi.iter().all(|&v| v == 0.0));
        assert!(prof.n.iter().all(|&v| v == 1.0));
        let res = residual_check(&prof);
        assert_eq!(res.mass_flux, 0.0);
        assert_eq!(res.momentum, 0.0);
        assert_eq!(res.entropy, 0.0);
        assert_eq!(res.poisson, 0.0);
        assert!(matches!(tail_decay_fit(&prof), Err(SheathError::InsufficientTail(_))));
    }

    #[test]
    fn nondegenerate_profile_basics() {
        let p = nondegen_params(-0.05);
        let prof = solve_stationary(
            &p,
            &GridRequest { length: None, n_cells: 512 },
            &StationaryOptions::default(),
        )
        .unwrap();
        // boundary value and monotone ascent toward 0 (phi_b < 0)
        assert!((prof.phi[0] - p.phi_b).abs() < 1e-12);
        for w in prof.phi.windows(2) {
            assert!(w[1] > w[0] || w[0].abs() < 1e-12, "monotonicity: {w:?}");
        }
        // f decreasing: n(0) = f^{-1}(-0.05) > 1
        assert!(prof.n[0] > 1.0);
        // sign of phi equals sign of phi_b throughout (up to the tiny tail)
        assert!(prof.phi.iter().all(|&v| v <= 0.0));
        // pointwise identities
        let res = residual_check(&prof);
        assert!(res.mass_flux <= 1e-10, "{:?}", res);
        assert!(res.momentum <= 1e-10, "{:?}", res);
        assert!(res.entropy <= 1e-10, "{:?}", res);
    }

    #[test]
    fn poisson_residual_second_order() {
        let p = nondegen_params(-0.05);
        let opts = StationaryOptions::default();
        let mut res = Vec::new();
        for n in [256usize, 512, 1024] {
            let prof = solve_stationary(
                &p,
                &GridRequest { length: Some(20.0), n_cells: n },
                &opts,
            )
            .unwrap();
            res.push(residual_check(&prof).poisson);
        }
        let r1 = res[0] / res[1];
        let r2 = res[1] / res[2];
        assert!(r1 > 3.5 && r1 < 4.5, "ratio {r1}, residuals {res:?}");
        assert!(r2 > 3.5 && r2 < 4.5, "ratio {r2}, residuals {res:?}");
    }

    #[test]
    fn first_integral_conserved() {
        let p = nondegen_params(-0.05);
        let prof = solve_stationary(
            &p,
            &GridRequest { length: Some(15.0), n_cells: 256 },
            &StationaryOptions::default(),
        )
        .unwrap();
        let s = Sagdeev::new(p, 1e-12).unwrap();
        let phix = prof.phi_x_first_integral(&s).unwrap();
        for (i, &px) in phix.iter().enumerate() {
            let v = s.v(prof.phi[i]).unwrap();
            assert!((0.5 * px * px - v).abs() <= 1e-12, "node {i}");
        }
    }

    #[test]
    fn nondegenerate_tail_rate() {
        let p = nondegen_params(-0.05);
        let prof = solve_stationary(
            &p,
            &GridRequest { length: None, n_cells: 2048 },
            &StationaryOptions::default(),
        )
        .unwrap();
        match tail_decay_fit(&prof).unwrap() {
            TailReport::Nondegenerate { fitted_rate, predicted_rate, r_squared, .. } => {
                assert!((predicted_rate - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
                assert!(
                    (fitted_rate - predicted_rate).abs() <= 0.02 * predicted_rate,
                    "fitted {fitted_rate} vs predicted {predicted_rate}"
                );
                assert!(r_squared > 0.999);
            }
            other => panic!("wrong regime: {other:?}"),
        }
    }

    #[test]
    fn degenerate_tail_exponent() {
        let p = degen_params(0.01);
        let prof = solve_stationary(
            &p,
            &GridRequest { length: None, n_cells: 4096 },
            &StationaryOptions::default(),
        )
        .unwrap();
        match tail_decay_fit(&prof).unwrap() {
            TailReport::Degenerate { fitted_exponent, .. } => {
                assert!(
                    (-2.2..=-1.8).contains(&fitted_exponent),
                    "exponent {fitted_exponent}"
                );
            }
            other => panic!("wrong regime: {other:?}"),
        }
    }

    #[test]
    fn amplitude_shrinks_with_phi_b() {
        let opts = StationaryOptions::default();
        let mut sups = Vec::new();
        for phi_b in [-0.02, -0.01, -0.005] {
            let p = nondegen_params(phi_b);
            let prof = solve_stationary(
                &p,
                &GridRequest { length: Some(20.0), n_cells: 256 },
                &opts,
            )
            .unwrap();
            let sup = (0..prof.x.len())
                .map(|i| {
                    (prof.n[i] - 1.0).abs()
                        + (prof.u[i] - p.u_inf).abs()
                        + (prof.t[i] - p.t_inf).abs()
                        + prof.phi[i].abs()
                })
                .fold(0.0f64, f64::max);
            sups.push(sup);
        }
        // each halving of phi_b at least (roughly) halves the sup
        assert!(sups[1] <= 0.55 * sups[0], "{sups:?}");
        assert!(sups[2] <= 0.55 * sups[1], "{sups:?}");
    }

    #[test]
    fn forbidden_band_rejected() {
        let p = PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -1.2, 0.01).unwrap();
        assert!(solve_stationary(
            &p,
            &GridRequest { length: Some(10.0), n_cells: 64 },
            &StationaryOptions::default()
        )
        .is_err());
    }

    #[test]
    fn existence_violation_surfaces() {
        // phi_b far below f(c_inf): construction must refuse
        let p = nondegen_params(-10.0);
        match solve_stationary(
            &p,
            &GridRequest { length: Some(10.0), n_cells: 64 },
            &StationaryOptions::default(),
        ) {
            Err(SheathError::ExistenceViolation { .. }) => {}
            other => panic!("expected ExistenceViolation, got {other:?}"),
        }
    }
}
