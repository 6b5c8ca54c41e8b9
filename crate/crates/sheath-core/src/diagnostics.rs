//! Weighted norms, decay-rate fitting, the energy-functional monitor, and
//! the quadratic-form positivity checker.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SheathError};
use crate::evolution::{EvolutionState, PerturbationView};
use crate::numerics::fd::{d1_order2, d2_order2};
use crate::numerics::fit::linear_fit;
use crate::numerics::linalg::sym3_eigenvalues;
use crate::params::{classify_regime, degenerate_gamma, PlasmaParams, RegimeKind,
    DEFAULT_CLASSIFY_TOL};
use crate::stationary::SheathProfile;

/// Weight on squared fields: algebraic (1+bx)^a or exponential e^{bx}.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    Algebraic { alpha: f64, beta: f64 },
    Exponential { beta: f64 },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        let beta = match self {
            WeightSpec::Algebraic { beta, .. } | WeightSpec::Exponential { beta } => *beta,
        };
        if !(beta > 0.0) {
            return Err(SheathError::InvalidParams("weight beta must be positive".into()));
        }
        Ok(())
    }

    pub fn w(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Algebraic { alpha, beta } => (1.0 + beta * x).powf(*alpha),
            WeightSpec::Exponential { beta } => (beta * x).exp(),
        }
    }
}

/// ( integral of W * sum over fields of sum_{j <= order} (d^j f)^2 )^{1/2},
/// trapezoidal in x with 2nd-order difference stencils.
pub fn weighted_norm(fields: &[&[f64]], h: f64, weight: &WeightSpec, order: usize) -> f64 {
    assert!(order <= 2, "only orders 0..=2 are supported");
    let n = fields.first().map_or(0, |f| f.len());
    if n < 4 {
        return 0.0;
    }
    let mut density = vec![0.0; n];
    for f in fields {
        assert_eq!(f.len(), n);
        for i in 0..n {
            density[i] += f[i] * f[i];
        }
        if order >= 1 {
            let d1 = d1_order2(f, h);
            for i in 0..n {
                density[i] += d1[i] * d1[i];
            }
        }
        if order >= 2 {
            let d2 = d2_order2(f, h);
            for i in 0..n {
                density[i] += d2[i] * d2[i];
            }
        }
    }
    let mut acc = 0.5 * (weight.w(0.0) * density[0] + weight.w((n - 1) as f64 * h) * density[n - 1]);
    for i in 1..n - 1 {
        acc += weight.w(i as f64 * h) * density[i];
    }
    (acc * h).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FitModel {
    /// norm ~ C e^{-mu t}; fit log(norm) against t.
    Exponential,
    /// norm ~ C (1+beta t)^{exponent}; fit log(norm) against log(1+beta t).
    Algebraic { beta: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FittedDecay {
    Exponential { mu: f64 },
    Algebraic { exponent: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub decay: FittedDecay,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples_used: usize,
}

pub fn decay_fit(
    t: &[f64],
    norm: &[f64],
    model: FitModel,
    window: (f64, f64),
) -> Result<DecayFit> {
    if t.len() != norm.len() {
        return Err(SheathError::InvalidParams("series length mismatch".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &ni) in t.iter().zip(norm) {
        if ti < window.0 || ti > window.1 {
            continue;
        }
        if !(ni > 0.0) {
            return Err(SheathError::InvalidParams(format!(
                "non-positive norm sample {ni} at t = {ti}"
            )));
        }
        let x = match model {
            FitModel::Exponential => ti,
            FitModel::Algebraic { beta } => (1.0 + beta * ti).ln(),
        };
        xs.push(x);
        ys.push(ni.ln());
    }
    if xs.len() < 10 {
        return Err(SheathError::InvalidParams(format!(
            "need at least 10 samples in the window, got {}",
            xs.len()
        )));
    }
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-13 {
        return Err(SheathError::DegenerateFit(
            "norm series constant to round-off".into(),
        ));
    }
    let (_, slope, r_squared) = linear_fit(&xs, &ys);
    let decay = match model {
        FitModel::Exponential => FittedDecay::Exponential { mu: -slope },
        FitModel::Algebraic { beta } => FittedDecay::Algebraic { exponent: slope, beta },
    };
    Ok(DecayFit { decay, r_squared, window, samples_used: xs.len() })
}

/// Weighted energy monitor: integral of
/// W [ e^{-phi_tilde} E0 + E1x + (1/2) n_tilde^2 varphi^2 ]
/// with E0 built from the full temperature and the stationary density, and
/// E1x the same quadratic in the x-derivatives of the perturbation.
pub fn energy_functional(
    state: &EvolutionState,
    view: &PerturbationView,
    base: &SheathProfile,
    weight: &WeightSpec,
) -> f64 {
    let p = &state.params;
    let n = state.v.len();
    let h = state.grid.h();
    let varphi_x = d1_order2(&view.varphi, h);
    let psi_x = d1_order2(&view.psi, h);
    let zeta_x = d1_order2(&view.zeta, h);

    let quad = |nn: f64, temp: f64, a: f64, b: f64, c: f64| -> f64 {
        0.5 * nn * p.r * temp * a * a
            + 0.5 * nn * p.m * b * b
            + nn * p.r / (2.0 * (p.gamma - 1.0) * temp) * c * c
    };

    let mut acc = 0.0;
    for i in 0..n {
        let nn = base.n[i];
        let temp = state.temp[i];
        let e0 = quad(nn, temp, view.varphi[i], view.psi[i], view.zeta[i]);
        let e1x = quad(nn, temp, varphi_x[i], psi_x[i], zeta_x[i]);
        let integrand = (-base.phi[i]).exp() * e0 + e1x
            + 0.5 * nn * nn * view.varphi[i] * view.varphi[i];
        let trap = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += trap * weight.w(i as f64 * h) * integrand;
    }
    acc * h
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QSample {
    pub x: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
    /// q2^2 - 4 q1 q3
    pub disc12: f64,
    /// q5^2 - 4 q3 q4
    pub disc35: f64,
    /// q1 q5^2 + q4 q2^2 - 4 q1 q3 q4
    pub cubic: f64,
    /// smallest eigenvalue of the 3x3 form, times B(x)^2
    pub min_eig_b2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticFormReport {
    pub samples: Vec<QSample>,
    pub pass: bool,
    /// min over samples of -cubic * B(x)^2 (the measured margin constant)
    pub measured_c: f64,
    /// min over samples of min_eig_b2
    pub min_eigenvalue_b2: f64,
    pub epsilon: f64,
    pub beta: f64,
}

/// Evaluates the q1..q5 coefficient functions with
/// B(x) = x + 1/beta and S(x) = (x + 1/beta) / (x + 1/(Gamma sqrt(phi_b))),
/// tests positivity of q1, q3, q4, negativity of both discriminants, and
/// negativity of the cubic combination, at every sample point.
pub fn quadratic_form_check(
    params: &PlasmaParams,
    epsilon: f64,
    beta: f64,
    x_samples: &[f64],
) -> Result<QuadraticFormReport> {
    params.validate()?;
    let regime = classify_regime(params, DEFAULT_CLASSIFY_TOL)?;
    if regime.kind != RegimeKind::Degenerate || params.phi_b <= 0.0 {
        return Err(SheathError::InvalidParams(
            "quadratic-form check needs the degenerate regime with phi_b > 0".into(),
        ));
    }
    let gam = degenerate_gamma(params);
    if !(epsilon > 0.0) || !(beta > 0.0) || beta > gam * params.phi_b.sqrt() {
        return Err(SheathError::InvalidParams(format!(
            "need epsilon > 0 and 0 < beta <= Gamma sqrt(phi_b) = {}",
            gam * params.phi_b.sqrt()
        )));
    }
    if x_samples.is_empty() || x_samples.iter().any(|&x| x < 0.0) {
        return Err(SheathError::InvalidParams("x samples must be >= 0".into()));
    }

    let rt = params.r * params.t_inf;
    let grt = params.gamma * rt;
    let r = params.r;
    let gm1 = params.gamma - 1.0;
    let au = params.u_inf.abs();
    let g2i = 1.0 / (gam * gam);
    let e = epsilon;
    let e_cubic = e * (e - 1.0) * (e - 2.0);

    let mut samples = Vec::with_capacity(x_samples.len());
    let mut pass = true;
    let mut measured_c = f64::INFINITY;
    let mut min_eig_global = f64::INFINITY;
    for &x in x_samples {
        let b = x + 1.0 / beta;
        let s = (x + 1.0 / beta) / (x + 1.0 / (gam * params.phi_b.sqrt()));
        let b2i = 1.0 / (b * b);
        let s2 = s * s;
        let s3 = s2 * s;

        let q1 = 0.5 * e * rt
            + b2i * g2i * (0.5 * (1.0 - rt) * e * s2 + (grt - 1.0) * s3
                - 0.5 * gam * gam * e_cubic);
        let q2 = -rt * e + b2i * g2i * (2.0 * e * rt * s2 + 2.0 * (1.0 - grt) * s3);
        let q3 = 0.5 * e * grt
            + b2i * g2i * (0.5 * (1.0 - grt) * e * s2 + (3.0 * grt + 1.0) * s3);
        let q4 = 0.5 * e * r / (gm1 * params.t_inf)
            + b2i * g2i
                * (-0.5 * e * r / (gm1 * params.t_inf) * s2
                    + params.gamma * r / (gm1 * params.t_inf) * s3);
        let q5 = -e * r + 2.0 * e * r * b2i * g2i * s2;

        let disc12 = q2 * q2 - 4.0 * q1 * q3;
        let disc35 = q5 * q5 - 4.0 * q3 * q4;
        let cubic = q1 * q5 * q5 + q4 * q2 * q2 - 4.0 * q1 * q3 * q4;

        // matrix of Q in (varphi, psi, zeta)
        let mat = [
            [au * q1, 0.5 * q2, 0.0],
            [0.5 * q2, q3 / au, 0.5 * q5],
            [0.0, 0.5 * q5, au * q4],
        ];
        let eigs = sym3_eigenvalues(mat);
        let min_eig_b2 = eigs[0] * b * b;

        if !(q1 > 0.0 && q3 > 0.0 && q4 > 0.0 && disc12 < 0.0 && disc35 < 0.0 && cubic < 0.0) {
            pass = false;
        }
        measured_c = measured_c.min(-cubic * b * b);
        min_eig_global = min_eig_global.min(min_eig_b2);
        samples.push(QSample { x, q1, q2, q3, q4, q5, disc12, disc35, cubic, min_eig_b2 });
    }
    if measured_c <= 0.0 {
        pass = false;
    }
    Ok(QuadraticFormReport {
        samples,
        pass,
        measured_c,
        min_eigenvalue_b2: min_eig_global,
        epsilon,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degenerate::lambda0;
    use proptest::prelude::*;

    fn degen_params(phi_b: f64) -> PlasmaParams {
        PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -(2.0f64.sqrt()), phi_b).unwrap()
    }

    #[test]
    fn norm_zero_field() {
        let f = vec![0.0; 100];
        let w = WeightSpec::Algebraic { alpha: 2.0, beta: 0.5 };
        assert_eq!(weighted_norm(&[&f], 0.1, &w, 2), 0.0);
    }

    #[test]
    fn norm_closed_form_integral() {
        // f = (1+x)^{-1}, alpha = 0: integral of (1+x)^{-2} over [0, inf) = 1
        let l = 1000.0;
        let n = 400_000usize;
        let h = l / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| 1.0 / (1.0 + i as f64 * h)).collect();
        let w = WeightSpec::Algebraic { alpha: 0.0, beta: 1.0 };
        let nn = weighted_norm(&[&f], h, &w, 0);
        assert!((nn - 1.0).abs() < 1.5e-3, "{nn}");
    }

    #[test]
    fn norm_order_one_linear_field() {
        // f = 2 + 3x on [0,1]: order-1 norm^2 = order-0 norm^2 + 9 * int W
        let n = 2000usize;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| 2.0 + 3.0 * i as f64 * h).collect();
        let w = WeightSpec::Exponential { beta: 0.7 };
        let n0 = weighted_norm(&[&f], h, &w, 0);
        let n1 = weighted_norm(&[&f], h, &w, 1);
        let int_w = ((0.7f64).exp() - 1.0) / 0.7;
        assert!(
            ((n1 * n1 - n0 * n0) - 9.0 * int_w).abs() < 1e-6,
            "{} vs {}",
            n1 * n1 - n0 * n0,
            9.0 * int_w
        );
    }

    #[test]
    fn decay_fit_exponential_exact() {
        let t: Vec<f64> = (0..200).map(|i| 0.1 * i as f64).collect();
        let norm: Vec<f64> = t.iter().map(|&ti| (-0.3 * ti).exp()).collect();
        let fit = decay_fit(&t, &norm, FitModel::Exponential, (0.0, 20.0)).unwrap();
        match fit.decay {
            FittedDecay::Exponential { mu } => assert!((mu - 0.3).abs() < 1e-6, "{mu}"),
            other => panic!("{other:?}"),
        }
        assert!(fit.r_squared >= 1.0 - 1e-12);
    }

    #[test]
    fn decay_fit_algebraic_exact() {
        let t: Vec<f64> = (0..200).map(|i| 0.5 * i as f64).collect();
        let norm: Vec<f64> = t.iter().map(|&ti| (1.0 + 0.1 * ti).powf(-4.0 / 3.0)).collect();
        let fit = decay_fit(&t, &norm, FitModel::Algebraic { beta: 0.1 }, (0.0, 100.0))
            .unwrap();
        match fit.decay {
            FittedDecay::Algebraic { exponent, .. } => {
                assert!((exponent + 4.0 / 3.0).abs() < 1e-6, "{exponent}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decay_fit_degenerate_series() {
        let t: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let norm = vec![2.0; 50];
        match decay_fit(&t, &norm, FitModel::Exponential, (0.0, 49.0)) {
            Err(SheathError::DegenerateFit(_)) => {}
            other => panic!("expected DegenerateFit, got {other:?}"),
        }
    }

    #[test]
    fn decay_fit_needs_samples() {
        let t: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let norm: Vec<f64> = t.iter().map(|&ti| (-ti).exp()).collect();
        assert!(decay_fit(&t, &norm, FitModel::Exponential, (0.0, 4.0)).is_err());
    }

    #[test]
    fn q_check_reference_pass() {
        let p = degen_params(1e-4);
        let gam = degenerate_gamma(&p);
        let beta = 0.9 * gam * p.phi_b.sqrt();
        let xs: Vec<f64> = (0..1000).map(|i| 0.1 * i as f64).collect();
        let rep = quadratic_form_check(&p, 4.0, beta, &xs).unwrap();
        assert!(rep.pass);
        assert!(rep.measured_c > 0.0);
        assert!(rep.min_eigenvalue_b2 > 0.0);
        // S(x) >= 1 whenever beta <= Gamma sqrt(phi_b)
        for &x in &xs {
            let s = (x + 1.0 / beta) / (x + 1.0 / (gam * p.phi_b.sqrt()));
            assert!(s >= 1.0);
        }
    }

    #[test]
    fn q_check_fails_beyond_lambda0() {
        let p = degen_params(1e-4);
        let gam = degenerate_gamma(&p);
        let beta = 0.9 * gam * p.phi_b.sqrt();
        let eps = lambda0(p.gamma).unwrap() + 0.5;
        let xs: Vec<f64> = (0..1000).map(|i| 0.1 * i as f64).collect();
        let rep = quadratic_form_check(&p, eps, beta, &xs).unwrap();
        assert!(!rep.pass);
        // the cubic combination changes sign at small x
        assert!(rep.samples.iter().any(|s| s.cubic > 0.0));
    }

    #[test]
    fn q_check_small_beta_limit() {
        // disc12 -> eps^2 R^2 T^2 (1 - gamma) as beta -> 0 along
        // beta = Gamma sqrt(phi_b), where S is identically 1
        let p = degen_params(1e-8);
        let beta = degenerate_gamma(&p) * p.phi_b.sqrt();
        let rep = quadratic_form_check(&p, 4.0, beta, &[0.0, 1.0, 10.0]).unwrap();
        let rt = p.r * p.t_inf;
        let expect = 16.0 * rt * rt * (1.0 - p.gamma);
        for s in &rep.samples {
            assert!((s.disc12 - expect).abs() < 1e-4, "{} vs {expect}", s.disc12);
        }
    }

    #[test]
    fn q_check_rejects_bad_window() {
        let p = degen_params(1e-4);
        let gam = degenerate_gamma(&p);
        // beta above Gamma sqrt(phi_b)
        assert!(quadratic_form_check(&p, 4.0, 2.0 * gam * p.phi_b.sqrt(), &[0.0]).is_err());
        // nondegenerate params
        let nd = PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -2.0, 1e-4).unwrap();
        assert!(quadratic_form_check(&nd, 4.0, 1e-3, &[0.0]).is_err());
    }

    #[test]
    fn energy_zero_perturbation() {
        use crate::evolution::{make_initial_perturbation, PerturbationShape,
            PerturbationSpec, PerturbationView, StepOptions};
        use crate::stationary::{solve_stationary, GridRequest, StationaryOptions};
        let p = PlasmaParams::new(1.0, 1.0, 2.0, 0.5, -2.0, -0.05).unwrap();
        let prof = solve_stationary(
            &p,
            &GridRequest { length: Some(24.0), n_cells: 256 },
            &StationaryOptions::default(),
        )
        .unwrap();
        let opts = StepOptions::default();
        let zero_spec = PerturbationSpec {
            shape: PerturbationShape::Gaussian,
            amplitude: 0.0,
            center: 0.0,
            width: 1.0,
        };
        let state = make_initial_perturbation(&prof, &zero_spec, &opts).unwrap();
        let view = PerturbationView::new(&state, &prof).unwrap();
        let w = WeightSpec::Algebraic { alpha: 4.0, beta: 0.1 };
        let e = energy_functional(&state, &view, &prof, &w);
        // only the Poisson re-solve noise contributes
        assert!(e.abs() < 1e-16, "{e}");

        // coercivity against the order-1 weighted norm for a real bump
        let bump = PerturbationSpec {
            shape: PerturbationShape::Gaussian,
            amplitude: 1e-3,
            center: 6.0,
            width: 1.5,
        };
        let state = make_initial_perturbation(&prof, &bump, &opts).unwrap();
        let view = PerturbationView::new(&state, &prof).unwrap();
        let e = energy_functional(&state, &view, &prof, &w);
        let h = state.grid.h();
        let nrm = weighted_norm(&[&view.varphi, &view.psi, &view.zeta], h, &w, 1);
        let n_min = prof.n.iter().cloned().fold(f64::INFINITY, f64::min);
        let t_min = state.temp.iter().cloned().fold(f64::INFINITY, f64::min);
        let t_max = state.temp.iter().cloned().fold(0.0f64, f64::max);
        let phi_max = prof.phi.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        // pointwise: integrand >= c * (varphi^2+psi^2+zeta^2 and derivatives)
        let c = 0.5
            * n_min
            * (-phi_max).exp()
            * (p.r * t_min).min(p.m).min(p.r / ((p.gamma - 1.0) * t_max));
        assert!(e >= c * nrm * nrm, "{e} vs {}", c * nrm * nrm);
    }

    proptest! {
        #[test]
        fn norm_homogeneity(scale in -100.0f64..100.0, seed in 0u64..1000) {
            let n = 64usize;
            let h = 0.25;
            let f: Vec<f64> = (0..n)
                .map(|i| ((i as f64 + seed as f64) * 0.37).sin())
                .collect();
            let g: Vec<f64> = f.iter().map(|&v| scale * v).collect();
            let w = WeightSpec::Algebraic { alpha: 3.0, beta: 0.2 };
            let a = weighted_norm(&[&f], h, &w, 2);
            let b = weighted_norm(&[&g], h, &w, 2);
            prop_assert!((b - scale.abs() * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn norm_monotone_in_alpha(a1 in 0.0f64..3.0, da in 0.0f64..3.0, seed in 0u64..1000) {
            let n = 64usize;
            let h = 0.25;
            let f: Vec<f64> = (0..n)
                .map(|i| ((i as f64 * 0.61 + seed as f64) * 0.23).cos())
                .collect();
            let lo = weighted_norm(&[&f], h, &WeightSpec::Algebraic { alpha: a1, beta: 0.5 }, 1);
            let hi = weighted_norm(
                &[&f],
                h,
                &WeightSpec::Algebraic { alpha: a1 + da, beta: 0.5 },
                1,
            );
            prop_assert!(hi >= lo - 1e-12);
        }
    }
}
