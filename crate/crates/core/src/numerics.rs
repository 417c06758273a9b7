//! Contour averages and polynomial extrapolation.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;

/// (1/2πi)∮ f over the circle |u − centre| = radius, by the N-point
/// trapezoid rule.  For f with a simple pole at the centre this is the
/// residue, i.e. lim (u − centre) f(u).
pub fn circle_residue<F>(f: F, centre: Complex64, radius: f64, nodes: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let e = Complex64::from_polar(radius, TAU * (k as f64 + 0.5) / nodes as f64);
        acc += e * f(centre + e)?;
    }
    Ok(acc / nodes as f64)
}

/// Largest |(u − centre) f(u)| over the same nodes.
pub fn circle_max<F>(f: F, centre: Complex64, radius: f64, nodes: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut best = 0.0f64;
    for k in 0..nodes {
        let e = Complex64::from_polar(radius, TAU * (k as f64 + 0.5) / nodes as f64);
        best = best.max((e * f(centre + e)?).norm());
    }
    Ok(best)
}

/// Value at x0 of the interpolating polynomial through (xs, ys), with the
/// difference to the next-lower-order estimate as an error indicator.
pub fn neville(xs: &[f64], ys: &[Complex64], x0: f64) -> (Complex64, f64) {
    let n = xs.len();
    assert!(n >= 1 && n == ys.len());
    let mut p: Vec<Complex64> = ys.to_vec();
    let mut prev_top = p[n - 1];
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = ((x0 - xj) * p[i] + (xi - x0) * p[i + 1]) / (xi - xj);
        }
        if level == n - 1 {
            break;
        }
        prev_top = p[n - level - 1];
    }
    let err = if n > 1 { (p[0] - prev_top).norm() } else { 0.0 };
    (p[0], err)
}

/// Residue from shrinking circles, extrapolated to radius 0.
pub fn residue_shrinking<F>(f: F, centre: Complex64, radii: &[f64]) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let vals = radii
        .iter()
        .map(|&r| circle_residue(&f, centre, r, 32))
        .collect::<Result<Vec<_>>>()?;
    Ok(neville(radii, &vals, 0.0).0)
}
