//! Bracketed scalar root finding: Newton steps safeguarded by bisection.

use crate::error::{Result, SheathError};

/// Find the root of `f` in [a, b] given `f(a)` and `f(b)` of opposite sign.
///
/// Takes a Newton step from the current midpoint estimate when it stays
/// inside the bracket, otherwise bisects. Stops when |f| <= `ftol` or the
/// bracket collapses to machine width.
pub fn newton_bisect<F, D>(
    mut f: F,
    mut df: D,
    mut a: f64,
    mut b: f64,
    guess: Option<f64>,
    ftol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(SheathError::ConvergenceFailure(format!(
            "no sign change on bracket [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    let mut x = match guess {
        Some(g) if g > a && g < b => g,
        _ => 0.5 * (a + b),
    };
    for _ in 0..max_iter {
        let fx = f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            return Ok(x);
        }
    }
    // Bracket is tight even if ftol was not met; report the failure honestly.
    let fx = f(x);
    if fx.abs() <= ftol * 10.0 {
        Ok(x)
    } else {
        Err(SheathError::ConvergenceFailure(format!(
            "residual {fx:e} after {max_iter} iterations (target {ftol:e})"
        )))
    }
}
