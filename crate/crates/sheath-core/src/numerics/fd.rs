//! Finite-difference stencils on uniform grids.
//!
//! Interior stencils are centered; near the boundary the same formal order is
//! kept where practical, otherwise one order lower (noted per function). All
//! coefficients are the standard Fornberg values.

/// First derivative, 2nd order: centered interior, one-sided 2nd order ends.
pub fn d1_order2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3);
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Second derivative, 2nd order: centered interior, one-sided 2nd order ends.
pub fn d2_order2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4);
    let h2 = h * h;
    let mut d = vec![0.0; n];
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

/// First derivative, 4th order centered; 2nd-order one-sided at the two
/// nodes adjacent to each boundary.
pub fn d1_order4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5);
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    for i in 2..n - 2 {
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    }
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Second derivative, 4th order centered; 2nd order near the boundary.
pub fn d2_order4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5);
    let h2 = h * h;
    let mut d = vec![0.0; n];
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[1] = (f[2] - 2.0 * f[1] + f[0]) / h2;
    for i in 2..n - 2 {
        d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
            / (12.0 * h2);
    }
    d[n - 2] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

/// Third derivative, 2nd order centered; 1st order one-sided near boundary.
pub fn d3_order2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6);
    let h3 = h * h * h;
    let mut d = vec![0.0; n];
    d[0] = (-f[0] + 3.0 * f[1] - 3.0 * f[2] + f[3]) / h3;
    d[1] = (-f[1] + 3.0 * f[2] - 3.0 * f[3] + f[4]) / h3;
    for i in 2..n - 2 {
        d[i] = (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]) / (2.0 * h3);
    }
    d[n - 2] = (f[n - 1] - 3.0 * f[n - 2] + 3.0 * f[n - 3] - f[n - 4]) / h3;
    d[n - 1] = (f[n - 1] - 3.0 * f[n - 2] + 3.0 * f[n - 3] - f[n - 4]) / h3;
    d
}

/// Forward-biased first derivative used by the transport scheme for
/// all-negative characteristic speeds: 2nd-order one-sided toward x > 0.
///
/// Node n-2 falls back to 1st-order forward (its stencil would need data past
/// the Dirichlet node); node n-1 is a held boundary value so its entry is 0.
pub fn d1_forward_upwind(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4);
    let mut d = vec![0.0; n];
    for i in 0..n - 2 {
        d[i] = (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) / (2.0 * h);
    }
    d[n - 2] = (f[n - 1] - f[n - 2]) / h;
    d[n - 1] = 0.0;
    d
}
