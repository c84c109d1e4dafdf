use crate::error::{Error, Result};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if !diff.is_finite() {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    if diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!("quadrature did not converge on [{a}, {b}]")));
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 40).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = adaptive_simpson(|x: f64| 1.0 / (1.0 - x * x).sqrt(), -0.5, 0.5, 1e-13, 40).unwrap();
        assert!((v - 2.0 * 0.5f64.asin()).abs() < 1e-12);
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-12, 10).unwrap(), 0.0);
    }

    #[test]
    fn reports_non_convergence() {
        assert!(adaptive_simpson(|x: f64| (1.0 / x).sin(), 1e-9, 1.0, 1e-15, 3).is_err());
    }
}
