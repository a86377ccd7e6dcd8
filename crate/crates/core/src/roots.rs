//! Bracketing root finder (Brent's method) for fallible scalar functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Finds a zero of `f` in `[a, b]`, where `f(a)` and `f(b)` have opposite
/// signs, to absolute width `xtol` (plus a few ulps of `|x|`).
///
/// Each step takes an inverse quadratic or secant step when it stays inside
/// the bracket and shrinks it fast enough, and bisects otherwise.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Precondition(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Convergence(format!(
        "Brent iteration did not converge in {max_iter} steps (x = {b}, f = {fb})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = brent(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn handles_flat_and_steep_functions() {
        let r = brent(|x: f64| Ok((x - 1.0).powi(3)), -3.0, 4.0, 1e-12, 200).unwrap();
        assert!((r.x - 1.0).abs() < 1e-4);
        let r = brent(|x: f64| Ok((20.0 * (x - 0.3)).exp() - 1.0), 0.0, 1.0, 1e-14, 200).unwrap();
        assert!((r.x - 0.3).abs() < 1e-13);
    }

    #[test]
    fn rejects_unbracketed_interval() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn propagates_function_errors() {
        let r = brent(
            |x| {
                if x > 0.5 {
                    Err(Error::Domain("x".into()))
                } else {
                    Ok(x - 0.7)
                }
            },
            0.0,
            1.0,
            1e-12,
            50,
        );
        assert!(r.is_err());
    }
}
