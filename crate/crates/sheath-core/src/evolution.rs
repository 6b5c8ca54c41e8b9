//! Explicit time integration of the full Euler-Poisson system on the
//! truncated half line.
//!
//! The hyperbolic part is evolved in (v, u, T) with v = log n, which keeps
//! the density positive by construction:
//!   v_t + u v_x + u_x = 0
//!   m (u_t + u u_x) + R (T_x + T v_x) = phi_x
//!   T_t + u T_x + (gamma - 1) T u_x = 0
//! All characteristic speeds are negative in the sheath regime, so every
//! spatial derivative uses a right-biased (forward) stencil and the wall end
//! x = 0 needs no boundary condition. The far end holds Dirichlet data and
//! the potential is re-solved from the nonlinear Poisson equation
//! phi_xx = e^v - e^{-phi} after every stage of the two-stage SSP advance.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SheathError};
use crate::numerics::fd::d1_forward_upwind;
use crate::numerics::linalg::thomas_solve;
use crate::params::{characteristic_speeds, PlasmaParams};
use crate::stationary::SheathProfile;

pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const DEFAULT_NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub length: f64,
    pub n_cells: usize,
}

impl GridSpec {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if !(length > 0.0) || n_cells < 16 {
            return Err(SheathError::InvalidParams(
                "grid needs positive length and at least 16 cells".into(),
            ));
        }
        Ok(Self { length, n_cells })
    }

    pub fn h(&self) -> f64 {
        self.length / self.n_cells as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionState {
    pub t: f64,
    pub grid: GridSpec,
    /// log density
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub temp: Vec<f64>,
    pub phi: Vec<f64>,
    pub params: PlasmaParams,
}

/// Fields relative to a stored stationary profile on the same grid.
#[derive(Debug, Clone)]
pub struct PerturbationView {
    /// varphi = v - log n_tilde
    pub varphi: Vec<f64>,
    pub psi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl PerturbationView {
    pub fn new(state: &EvolutionState, base: &SheathProfile) -> Result<Self> {
        if base.x.len() != state.v.len() || (base.meta.h - state.grid.h()).abs() > 1e-12 {
            return Err(SheathError::InvalidParams(
                "profile and state grids differ".into(),
            ));
        }
        let n = state.v.len();
        let mut varphi = Vec::with_capacity(n);
        for i in 0..n {
            varphi.push(state.v[i] - base.n[i].ln());
        }
        Ok(Self {
            varphi,
            psi: (0..n).map(|i| state.u[i] - base.u[i]).collect(),
            zeta: (0..n).map(|i| state.temp[i] - base.t[i]).collect(),
            sigma: (0..n).map(|i| state.phi[i] - base.phi[i]).collect(),
        })
    }
}

/// Newton solve of the discrete Poisson problem phi_xx = e^v - e^{-phi} with
/// phi(0) = phi_b and phi(L) = 0.
pub fn poisson_solve(
    v: &[f64],
    phi_b: f64,
    phi_far: f64,
    grid: &GridSpec,
    guess: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = grid.n_nodes();
    if v.len() != n || guess.len() != n {
        return Err(SheathError::InvalidParams("field length mismatch".into()));
    }
    if !(tol > 0.0) {
        return Err(SheathError::InvalidParams("poisson tol must be positive".into()));
    }
    let h2 = grid.h() * grid.h();
    let mut phi = guess.to_vec();
    phi[0] = phi_b;
    // On a truncated domain the far potential is the held boundary datum,
    // not 0; forcing 0 there injects a spurious O(phi(L)) boundary layer.
    phi[n - 1] = phi_far;

    let m = n - 2; // interior unknowns
    let mut residual = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let lower = vec![1.0 / h2; m - 1];
    let upper = vec![1.0 / h2; m - 1];

    let mut res_norm = f64::INFINITY;
    for _ in 0..max_iter {
        res_norm = 0.0f64;
        for i in 1..n - 1 {
            let r = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / h2 - v[i].exp()
                + (-phi[i]).exp();
            residual[i - 1] = r;
            res_norm = res_norm.max(r.abs());
            diag[i - 1] = -2.0 / h2 - (-phi[i]).exp();
        }
        if res_norm <= tol {
            return Ok(phi);
        }
        // J delta = -residual
        let rhs: Vec<f64> = residual.iter().map(|&r| -r).collect();
        let delta = thomas_solve(&lower, &diag, &upper, &rhs);
        for i in 1..n - 1 {
            phi[i] += delta[i - 1];
        }
        if phi.iter().any(|p| !p.is_finite()) {
            break;
        }
    }
    Err(SheathError::NewtonDivergence { iters: max_iter, residual: res_norm })
}

/// Directional action of the Poisson Jacobian at phi on a vector (interior
/// nodes); used by the finite-difference consistency test.
pub fn poisson_jacobian_apply(phi: &[f64], dir: &[f64], grid: &GridSpec) -> Vec<f64> {
    let n = grid.n_nodes();
    let h2 = grid.h() * grid.h();
    let mut out = vec![0.0; n - 2];
    for i in 1..n - 1 {
        out[i - 1] = (dir[i - 1] - 2.0 * dir[i] + dir[i + 1]) / h2 - (-phi[i]).exp() * dir[i];
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepOptions {
    pub cfl: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Strict upwinding: error out if any third characteristic turns
    /// non-negative instead of silently keeping the forward stencil.
    pub strict_upwind: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iter: DEFAULT_NEWTON_MAX_ITER,
            strict_upwind: true,
        }
    }
}

/// Largest admissible time step under the CFL condition.
pub fn max_dt(state: &EvolutionState, cfl: f64) -> f64 {
    let p = &state.params;
    let mut speed = 0.0f64;
    for i in 0..state.u.len() {
        let (l1, _, l3) = characteristic_speeds(state.u[i], state.temp[i], p);
        speed = speed.max(l1.abs()).max(l3.abs());
    }
    cfl * state.grid.h() / speed.max(1e-300)
}

/// Tendencies of (v, u, T); phi in the state must already satisfy the
/// Poisson equation for the current v.
pub fn transport_rhs(
    state: &EvolutionState,
    strict: bool,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let p = &state.params;
    let n = state.v.len();
    let h = state.grid.h();

    if strict {
        for i in 0..n {
            let (_, _, l3) = characteristic_speeds(state.u[i], state.temp[i], p);
            if l3 >= 0.0 {
                return Err(SheathError::CharacteristicSignViolation {
                    x: i as f64 * h,
                    lambda3: l3,
                });
            }
        }
    }

    let vx = d1_forward_upwind(&state.v, h);
    let ux = d1_forward_upwind(&state.u, h);
    let tx = d1_forward_upwind(&state.temp, h);
    let phix = d1_forward_upwind(&state.phi, h);

    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];
    let mut dt_f = vec![0.0; n];
    // last node is Dirichlet data: tendencies stay zero there
    for i in 0..n - 1 {
        let u = state.u[i];
        let temp = state.temp[i];
        dv[i] = -(u * vx[i] + ux[i]);
        du[i] = -(u * ux[i] + (p.r / p.m) * (tx[i] + temp * vx[i])) + phix[i] / p.m;
        dt_f[i] = -(u * tx[i] + (p.gamma - 1.0) * temp * ux[i]);
    }
    Ok((dv, du, dt_f))
}

fn apply_tendency(base: &EvolutionState, k: &(Vec<f64>, Vec<f64>, Vec<f64>), dt: f64)
    -> (Vec<f64>, Vec<f64>, Vec<f64>)
{
    let n = base.v.len();
    let mut v = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut temp = Vec::with_capacity(n);
    for i in 0..n {
        v.push(base.v[i] + dt * k.0[i]);
        u.push(base.u[i] + dt * k.1[i]);
        temp.push(base.temp[i] + dt * k.2[i]);
    }
    (v, u, temp)
}

fn check_positivity(temp: &[f64], h: f64, t: f64) -> Result<()> {
    for (i, &val) in temp.iter().enumerate() {
        if val <= 0.0 {
            return Err(SheathError::PositivityLoss { x: i as f64 * h, t });
        }
    }
    Ok(())
}

/// One Heun (two-stage SSP) step. The Poisson constraint is re-solved after
/// each stage so phi stays consistent with v.
pub fn step(state: &EvolutionState, dt: f64, opts: &StepOptions) -> Result<EvolutionState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let limit = max_dt(state, opts.cfl);
    if dt > limit * (1.0 + 1e-12) {
        return Err(SheathError::CflViolation { dt, limit });
    }
    let phi_b = state.phi[0];
    let h = state.grid.h();

    let k1 = transport_rhs(state, opts.strict_upwind)?;
    let (v1, u1, t1) = apply_tendency(state, &k1, dt);
    check_positivity(&t1, h, state.t)?;
    let phi_far = state.phi[state.phi.len() - 1];
    let phi1 = poisson_solve(&v1, phi_b, phi_far, &state.grid, &state.phi, opts.newton_tol,
        opts.newton_max_iter)?;
    let mid = EvolutionState {
        t: state.t + dt,
        grid: state.grid,
        v: v1,
        u: u1,
        temp: t1,
        phi: phi1,
        params: state.params,
    };

    let k2 = transport_rhs(&mid, opts.strict_upwind)?;
    let n = state.v.len();
    let mut v = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut temp = Vec::with_capacity(n);
    for i in 0..n {
        v.push(0.5 * (state.v[i] + mid.v[i] + dt * k2.0[i]));
        u.push(0.5 * (state.u[i] + mid.u[i] + dt * k2.1[i]));
        temp.push(0.5 * (state.temp[i] + mid.temp[i] + dt * k2.2[i]));
    }
    check_positivity(&temp, h, state.t + dt)?;
    let phi = poisson_solve(&v, phi_b, phi_far, &state.grid, &mid.phi, opts.newton_tol,
        opts.newton_max_iter)?;
    Ok(EvolutionState {
        t: state.t + dt,
        grid: state.grid,
        v,
        u,
        temp,
        phi,
        params: state.params,
    })
}

/// Time series of observer samples.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSeries {
    pub t: Vec<f64>,
    pub names: Vec<String>,
    /// columns[j][k] = observer j at sample k
    pub columns: Vec<Vec<f64>>,
}

pub type Observer<'a> = (&'a str, Box<dyn Fn(&EvolutionState, &PerturbationView) -> f64 + 'a>);

/// Advance to t_end with adaptive CFL steps, sampling observers roughly
/// every observer_period (and always at t = 0 and t = t_end).
pub fn evolve(
    initial: &EvolutionState,
    base: &SheathProfile,
    t_end: f64,
    observer_period: f64,
    observers: &[Observer],
    opts: &StepOptions,
) -> Result<(EvolutionState, DiagnosticsSeries)> {
    if !(t_end >= 0.0) || !(observer_period > 0.0) {
        return Err(SheathError::InvalidParams(
            "t_end must be >= 0 and observer_period > 0".into(),
        ));
    }
    let mut series = DiagnosticsSeries {
        t: Vec::new(),
        names: observers.iter().map(|(n, _)| n.to_string()).collect(),
        columns: vec![Vec::new(); observers.len()],
    };
    let sample = |s: &EvolutionState, series: &mut DiagnosticsSeries| -> Result<()> {
        let view = PerturbationView::new(s, base)?;
        series.t.push(s.t);
        for (j, (_, f)) in observers.iter().enumerate() {
            series.columns[j].push(f(s, &view));
        }
        Ok(())
    };

    let mut state = initial.clone();
    sample(&state, &mut series)?;
    if t_end == 0.0 {
        return Ok((state, series));
    }
    let mut next_sample = observer_period.min(t_end);
    loop {
        let dt_cfl = max_dt(&state, opts.cfl);
        let dt = dt_cfl.min(next_sample - state.t).min(t_end - state.t);
        state = step(&state, dt, opts)?;
        if state.t >= next_sample - 1e-12 {
            sample(&state, &mut series)?;
            next_sample = (next_sample + observer_period).min(t_end);
        }
        if state.t >= t_end - 1e-12 {
            if *series.t.last().unwrap() < state.t - 1e-12 {
                sample(&state, &mut series)?;
            }
            return Ok((state, series));
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationShape {
    Gaussian,
    CompactBump,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub shape: PerturbationShape,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl PerturbationSpec {
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        match self.shape {
            PerturbationShape::Gaussian => self.amplitude * (-0.5 * s * s).exp(),
            PerturbationShape::CompactBump => {
                if s.abs() < 1.0 {
                    // normalized so the peak equals the amplitude
                    self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// State = resampled stationary profile plus a velocity bump, with phi
/// re-solved so the elliptic constraint holds at t = 0.
pub fn make_initial_perturbation(
    profile: &SheathProfile,
    spec: &PerturbationSpec,
    opts: &StepOptions,
) -> Result<EvolutionState> {
    if !(spec.width > 0.0) {
        return Err(SheathError::InvalidParams("perturbation width must be positive".into()));
    }
    let grid = GridSpec::new(profile.meta.length, profile.x.len() - 1)?;
    let n = profile.x.len();
    let p = profile.params;
    let v: Vec<f64> = profile.n.iter().map(|&nn| nn.ln()).collect();
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        let bump = if i == n - 1 { 0.0 } else { spec.eval(profile.x[i]) };
        u.push(profile.u[i] + bump);
    }
    for i in 0..n {
        let (_, _, l3) = characteristic_speeds(u[i], profile.t[i], &p);
        if l3 >= 0.0 {
            return Err(SheathError::CharacteristicSignViolation {
                x: profile.x[i],
                lambda3: l3,
            });
        }
    }
    let phi = poisson_solve(&v, p.phi_b, *profile.phi.last().unwrap(), &grid, &profile.phi, opts.newton_tol,
        opts.newton_max_iter)?;
    Ok(EvolutionState {
        t: 0.0,
        grid,
        v,
        u,
        temp: profile.t.clone(),
        phi,
        params: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::{solve_stationary, GridRequest, StationaryOptions};

    fn nondegen_params(phi_b: f64) -> PlasmaParams {
        PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -2.0, phi_b).unwrap()
    }

    fn nondegen_profile(n_cells: usize) -> SheathProfile {
        solve_stationary(
            &nondegen_params(-0.05),
            &GridRequest { length: Some(24.0), n_cells },
            &StationaryOptions::default(),
        )
        .unwrap()
    }

    fn stationary_state(profile: &SheathProfile) -> EvolutionState {
        make_initial_perturbation(
            profile,
            &PerturbationSpec {
                shape: PerturbationShape::Gaussian,
                amplitude: 0.0,
                center: 0.0,
                width: 1.0,
            },
            &StepOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn poisson_trivial() {
        let grid = GridSpec::new(10.0, 64).unwrap();
        let v = vec![0.0; grid.n_nodes()];
        let guess = vec![0.0; grid.n_nodes()];
        let phi = poisson_solve(&v, 0.0, 0.0, &grid, &guess, 1e-13, 50).unwrap();
        assert!(phi.iter().all(|&p| p.abs() < 1e-13));
    }

    #[test]
    fn poisson_matches_stationary_second_order() {
        let mut errs = Vec::new();
        for n in [256usize, 512, 1024] {
            let prof = nondegen_profile(n);
            let grid = GridSpec::new(prof.meta.length, n).unwrap();
            let v: Vec<f64> = prof.n.iter().map(|&nn| nn.ln()).collect();
            let phi = poisson_solve(&v, prof.params.phi_b, *prof.phi.last().unwrap(), &grid, &prof.phi, 1e-13, 50)
                .unwrap();
            let err = phi
                .iter()
                .zip(&prof.phi)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!(r1 > 3.3 && r1 < 4.7, "{errs:?}");
        assert!(r2 > 3.3 && r2 < 4.7, "{errs:?}");
    }

    #[test]
    fn poisson_jacobian_consistency() {
        let grid = GridSpec::new(12.0, 96).unwrap();
        let n = grid.n_nodes();
        let v: Vec<f64> = (0..n).map(|i| 0.02 * (0.3 * i as f64).sin()).collect();
        let guess = vec![0.0; n];
        let phi = poisson_solve(&v, 0.01, 0.0, &grid, &guess, 1e-13, 50).unwrap();
        let h2 = grid.h() * grid.h();
        let residual = |phi: &[f64]| -> Vec<f64> {
            (1..n - 1)
                .map(|i| {
                    (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / h2 - v[i].exp()
                        + (-phi[i]).exp()
                })
                .collect()
        };
        let dir: Vec<f64> = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.0 } else { (0.11 * i as f64).cos() })
            .collect();
        let eps = 1e-7;
        let shifted: Vec<f64> = phi.iter().zip(&dir).map(|(p, d)| p + eps * d).collect();
        let fd: Vec<f64> = residual(&shifted)
            .iter()
            .zip(residual(&phi))
            .map(|(a, b)| (a - b) / eps)
            .collect();
        let jac = poisson_jacobian_apply(&phi, &dir, &grid);
        for (a, b) in fd.iter().zip(&jac) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn poisson_divergence_reported() {
        let grid = GridSpec::new(10.0, 32).unwrap();
        let v: Vec<f64> = (0..grid.n_nodes()).map(|i| 0.3 * (0.4 * i as f64).sin()).collect();
        let guess = vec![0.0; grid.n_nodes()];
        match poisson_solve(&v, 0.0, 0.0, &grid, &guess, 1e-30, 3) {
            Err(SheathError::NewtonDivergence { .. }) => {}
            other => panic!("expected NewtonDivergence, got {other:?}"),
        }
    }

    #[test]
    fn constant_state_rhs_zero() {
        let p = nondegen_params(0.0);
        let grid = GridSpec::new(20.0, 64).unwrap();
        let n = grid.n_nodes();
        let state = EvolutionState {
            t: 0.0,
            grid,
            v: vec![0.0; n],
            u: vec![p.u_inf; n],
            temp: vec![p.t_inf; n],
            phi: vec![0.0; n],
            params: p,
        };
        let (dv, du, dt) = transport_rhs(&state, true).unwrap();
        assert!(dv.iter().all(|&x| x == 0.0));
        assert!(du.iter().all(|&x| x == 0.0));
        assert!(dt.iter().all(|&x| x == 0.0));
        // and the trivial equilibrium is preserved to round-off
        let s2 = step(&state, max_dt(&state, 0.4), &StepOptions::default()).unwrap();
        assert!(s2.v.iter().all(|&x| x.abs() < 1e-14));
        assert!(s2.u.iter().all(|&x| (x - p.u_inf).abs() < 1e-14));
    }

    #[test]
    fn characteristic_sign_guard() {
        let p = nondegen_params(0.0);
        let grid = GridSpec::new(20.0, 64).unwrap();
        let n = grid.n_nodes();
        let mut u = vec![p.u_inf; n];
        u[10] = 5.0; // forces lambda3 > 0
        let state = EvolutionState {
            t: 0.0,
            grid,
            v: vec![0.0; n],
            u,
            temp: vec![p.t_inf; n],
            phi: vec![0.0; n],
            params: p,
        };
        match transport_rhs(&state, true) {
            Err(SheathError::CharacteristicSignViolation { .. }) => {}
            other => panic!("expected sign violation, got {other:?}"),
        }
        // non-strict mode just evaluates
        assert!(transport_rhs(&state, false).is_ok());
    }

    #[test]
    fn stationary_rhs_small() {
        let prof = nondegen_profile(512);
        let state = stationary_state(&prof);
        let (dv, du, dt) = transport_rhs(&state, true).unwrap();
        let sup = dv
            .iter()
            .chain(&du)
            .chain(&dt)
            .map(|x| x.abs())
            .fold(0.0f64, f64::max);
        // truncation-level residual
        assert!(sup < 5e-3, "sup tendency {sup}");
    }

    #[test]
    fn step_zero_dt_identity() {
        let prof = nondegen_profile(128);
        let state = stationary_state(&prof);
        let s2 = step(&state, 0.0, &StepOptions::default()).unwrap();
        assert_eq!(state.v, s2.v);
        assert_eq!(state.phi, s2.phi);
    }

    #[test]
    fn cfl_violation_rejected() {
        let prof = nondegen_profile(128);
        let state = stationary_state(&prof);
        let limit = max_dt(&state, DEFAULT_CFL);
        match step(&state, 2.0 * limit, &StepOptions::default()) {
            Err(SheathError::CflViolation { .. }) => {}
            other => panic!("expected CflViolation, got {other:?}"),
        }
    }

    #[test]
    fn fixed_point_second_order() {
        // stationary data drifts at the truncation level, order >= 1.8
        let opts = StepOptions::default();
        let mut drifts = Vec::new();
        for n in [256usize, 512] {
            let prof = nondegen_profile(n);
            let state0 = stationary_state(&prof);
            let (state, _) = evolve(&state0, &prof, 2.0, 1.0, &[], &opts).unwrap();
            let drift = state
                .v
                .iter()
                .zip(&state0.v)
                .chain(state.u.iter().zip(&state0.u))
                .chain(state.temp.iter().zip(&state0.temp))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            drifts.push(drift);
        }
        let order = (drifts[0] / drifts[1]).log2();
        assert!(order >= 1.8, "order {order}, drifts {drifts:?}");
    }

    #[test]
    fn evolve_t_end_zero_single_sample() {
        let prof = nondegen_profile(128);
        let state = stationary_state(&prof);
        let obs: Vec<Observer> = vec![(
            "sup_psi",
            Box::new(|_s: &EvolutionState, v: &PerturbationView| {
                v.psi.iter().map(|x| x.abs()).fold(0.0, f64::max)
            }),
        )];
        let (_, series) = evolve(&state, &prof, 0.0, 1.0, &obs, &StepOptions::default())
            .unwrap();
        assert_eq!(series.t.len(), 1);
        assert_eq!(series.columns[0].len(), 1);
    }

    #[test]
    fn perturbation_amplitude_guard() {
        let prof = nondegen_profile(128);
        let spec = PerturbationSpec {
            shape: PerturbationShape::Gaussian,
            amplitude: 10.0,
            center: 6.0,
            width: 1.0,
        };
        match make_initial_perturbation(&prof, &spec, &StepOptions::default()) {
            Err(SheathError::CharacteristicSignViolation { .. }) => {}
            other => panic!("expected sign violation, got {other:?}"),
        }
    }

    #[test]
    fn mass_flux_bookkeeping() {
        // d/dt (integral of n) tracks the boundary fluxes n*u at both ends
        let prof = nondegen_profile(512);
        let spec = PerturbationSpec {
            shape: PerturbationShape::CompactBump,
            amplitude: 1e-3,
            center: 6.0,
            width: 2.0,
        };
        let opts = StepOptions::default();
        let state0 = make_initial_perturbation(&prof, &spec, &opts).unwrap();
        let h = state0.grid.h();
        let mass = |s: &EvolutionState| -> f64 {
            let n: Vec<f64> = s.v.iter().map(|v| v.exp()).collect();
            let mut m = 0.5 * (n[0] + n[n.len() - 1]);
            for val in &n[1..n.len() - 1] {
                m += val;
            }
            m * h
        };
        let flux = |s: &EvolutionState| -> (f64, f64) {
            let n0 = s.v[0].exp();
            let nl = s.v[s.v.len() - 1].exp();
            (n0 * s.u[0], nl * s.u[s.u.len() - 1])
        };
        let mut state = state0.clone();
        let mut flux_integral = 0.0;
        let t_end = 1.0;
        while state.t < t_end {
            let dt = max_dt(&state, opts.cfl).min(t_end - state.t);
            let (f0a, fla) = flux(&state);
            state = step(&state, dt, &opts).unwrap();
            let (f0b, flb) = flux(&state);
            // trapezoid in time: d/dt int n dx = flux(0) - flux(L) with
            // nu < 0 (outflow at the wall, inflow at the far end)
            flux_integral += 0.5 * dt * ((f0a - fla) + (f0b - flb));
        }
        let dm = mass(&state) - mass(&state0);
        assert!(
            (dm - flux_integral).abs() < 5e-4 * mass(&state0).abs().max(1.0),
            "dm {dm} vs flux integral {flux_integral}"
        );
    }
}
