//! Spectral integrals of the kinetic kernel over the momentum support:
//!
//! ```text
//! I1(s) = ∫ dp / (G^2(p0, p) + s)        I2(s) = ∫ dp / (G^2(p0, p) + s)^2
//! ```
//!
//! with `s = q^2 = -2 M E`. Both are finite for `s > -min G^2`, `I1` is
//! strictly decreasing in `s` and `I2 = -dI1/ds`.

pub mod adaptive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{kernel_minimum, momentum_support, KernelMinimum, MomentumSupport, TwoBodySystem};

pub use adaptive::{Estimate, QuadratureOptions};

/// Below this distance to threshold (relative to `1 + Gmin2`) the local
/// quadratic part of the integrand is integrated in closed form.
const NEAR_POLE: f64 = 1e-6;

/// Values of both spectral integrals at one spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralIntegrals {
    pub s: f64,
    pub i1: f64,
    pub i2: f64,
    pub err_estimate: f64,
}

/// Integration context for one system and one center-of-mass momentum.
#[derive(Debug, Clone)]
pub struct SpectralProblem<'a> {
    sys: &'a TwoBodySystem,
    p0: f64,
    support: MomentumSupport,
    minimum: KernelMinimum,
    /// `a` in `G^2 ≈ Gmin2 + a (p - p*)^2`; zero when the minimum sits on the
    /// support boundary.
    curvature: f64,
    divergent_lo: bool,
    divergent_hi: bool,
}

impl<'a> SpectralProblem<'a> {
    pub fn new(sys: &'a TwoBodySystem, p0: f64) -> Result<Self> {
        let support = momentum_support(sys, p0);
        if support.is_empty() {
            return Err(Error::EmptySupport { p0 });
        }
        let minimum = kernel_minimum(sys, p0)?;
        let curvature = local_curvature(sys, p0, &support, &minimum);
        let divergent = |c: f64| -> bool {
            if !c.is_finite() {
                return false;
            }
            let hits = |d: &crate::deformation::DeformationFamily, u: f64| {
                d.diverges_at_endpoint() && (u.abs() - d.b()).abs() <= 1e-12 * d.b()
            };
            hits(sys.deformation1(), sys.mu1() * p0 + c) || hits(sys.deformation2(), sys.mu2() * p0 - c)
        };
        Ok(Self {
            sys,
            p0,
            support,
            minimum,
            curvature,
            divergent_lo: divergent(support.c1),
            divergent_hi: divergent(support.c2),
        })
    }

    pub fn system(&self) -> &TwoBodySystem {
        self.sys
    }
    pub fn p0(&self) -> f64 {
        self.p0
    }
    pub fn support(&self) -> MomentumSupport {
        self.support
    }
    pub fn minimum(&self) -> KernelMinimum {
        self.minimum
    }

    /// Smallest admissible spectral parameter (exclusive), `-Gmin2`.
    pub fn threshold(&self) -> f64 {
        -self.minimum.value
    }

    /// Safety margin above the threshold below which integrals are refused.
    pub fn margin(&self) -> f64 {
        1e-14 * self.minimum.value.abs().max(1.0)
    }

    fn check_s(&self, s: f64) -> Result<()> {
        if !s.is_finite() || s <= self.threshold() + self.margin() {
            return Err(Error::Pole {
                s,
                threshold: self.threshold(),
            });
        }
        Ok(())
    }

    /// Integrand `1 / (G^2 + s)` of `I1` and of the phase.
    pub fn integrand(&self, s: f64, p: f64) -> f64 {
        let g2 = self.sys.kernel_unchecked(self.p0, p);
        if g2.is_infinite() {
            0.0
        } else {
            1.0 / (g2 + s)
        }
    }

    pub fn i1(&self, s: f64, tol: f64) -> Result<Estimate> {
        self.check_s(s)?;
        self.integrate_power(s, self.support.c1, self.support.c2, 1, tol)
    }

    pub fn i2(&self, s: f64, tol: f64) -> Result<Estimate> {
        self.check_s(s)?;
        self.integrate_power(s, self.support.c1, self.support.c2, 2, tol)
    }

    /// `∫_{lo}^{hi} dp / (G^2 + s)` for a sub-interval of the support. A
    /// reversed interval gives the negated integral.
    pub fn phase(&self, s: f64, lo: f64, hi: f64, tol: f64) -> Result<Estimate> {
        self.check_s(s)?;
        let slack = 1e-12 * (1.0 + self.support.c1.abs().max(self.support.c2.abs()));
        for p in [lo, hi] {
            if !(p >= self.support.c1 - slack && p <= self.support.c2 + slack) {
                return Err(Error::Domain(format!(
                    "phase limit {p} outside support [{}, {}]",
                    self.support.c1, self.support.c2
                )));
            }
        }
        let lo_c = lo.clamp(self.support.c1, self.support.c2);
        let hi_c = hi.clamp(self.support.c1, self.support.c2);
        if hi_c < lo_c {
            let e = self.integrate_power(s, hi_c, lo_c, 1, tol)?;
            return Ok(Estimate { value: -e.value, ..e });
        }
        self.integrate_power(s, lo_c, hi_c, 1, tol)
    }

    pub fn integrals(&self, s: f64, tol: f64) -> Result<SpectralIntegrals> {
        let a = self.i1(s, tol)?;
        let b = self.i2(s, tol)?;
        Ok(SpectralIntegrals {
            s,
            i1: a.value,
            i2: b.value,
            err_estimate: a.error + b.error,
        })
    }

    fn interior_minimum(&self) -> bool {
        self.curvature > 0.0
    }

    fn integrate_power(&self, s: f64, lo: f64, hi: f64, power: i32, tol: f64) -> Result<Estimate> {
        if !(hi > lo) {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                panels: 0,
            });
        }
        let gmin = self.minimum.value;
        let eps = s + gmin;
        let p_star = self.minimum.p_star;
        let a = self.curvature;
        let subtract = self.interior_minimum() && eps < NEAR_POLE * (1.0 + gmin.abs());

        let raw = |p: f64| -> f64 {
            let g2 = self.sys.kernel_unchecked(self.p0, p);
            if g2.is_infinite() {
                return 0.0;
            }
            let v = 1.0 / (g2 + s);
            if power == 2 {
                v * v
            } else {
                v
            }
        };
        let model = |p: f64| -> f64 {
            let x = p - p_star;
            let v = 1.0 / (a * x * x + eps);
            if power == 2 {
                v * v
            } else {
                v
            }
        };
        let closed = if subtract {
            quadratic_model_integral(a, eps, lo - p_star, hi - p_star, power)
        } else {
            0.0
        };
        let f = |p: f64| -> f64 {
            if subtract {
                raw(p) - model(p)
            } else {
                raw(p)
            }
        };

        let width = if a > 0.0 && eps > 0.0 {
            (eps / a).sqrt()
        } else if lo.is_finite() && hi.is_finite() {
            (hi - lo) / 64.0
        } else {
            1.0 + p_star.abs()
        };

        let mut opts = QuadratureOptions::relative(tol);
        // G^2 + s loses digits to cancellation when s sits close to -Gmin2
        if eps > 0.0 {
            let amplification = (gmin.abs() + s.abs()) / eps;
            opts.noise = f64::EPSILON * amplification.max(1.0) * power as f64;
        }
        if subtract {
            opts.tol_abs = opts.tol_abs.max((opts.tol_rel + 50.0 * opts.noise) * closed.abs());
        }

        // finite core [lo_f, hi_f] plus mapped tails for unbounded ends
        let reach = (1e3 * width).max(10.0 * (1.0 + p_star.abs()));
        let lo_f = if lo.is_finite() { lo } else { (p_star - reach).min(hi) };
        let hi_f = if hi.is_finite() { hi } else { (p_star + reach).max(lo_f) };

        let mut points = graded_breakpoints(lo_f, hi_f, p_star, width);
        let mut total = Estimate {
            value: closed,
            error: 0.0,
            panels: 0,
        };

        // end panels touching a divergent endpoint: p = e ∓ h u^2
        let core_len = hi_f - lo_f;
        if lo == self.support.c1 && self.divergent_lo && points.len() > 2 {
            let h = (points[1] - points[0]).min(0.05 * core_len);
            let e = points[0];
            total = total + adaptive::integrate(|u: f64| f(e + h * u * u) * 2.0 * h * u, &[0.0, 1.0], opts)?;
            points[0] = e + h;
            if points[1] <= points[0] {
                points.remove(1);
            }
        }
        if hi == self.support.c2 && self.divergent_hi && points.len() > 2 {
            let n = points.len();
            let h = (points[n - 1] - points[n - 2]).min(0.05 * core_len);
            let e = points[n - 1];
            total = total + adaptive::integrate(|u: f64| f(e - h * u * u) * 2.0 * h * u, &[0.0, 1.0], opts)?;
            points[n - 1] = e - h;
            if points[n - 2] >= points[n - 1] {
                points.remove(n - 2);
            }
        }
        total = total + adaptive::integrate(f, &points, opts)?;

        if !lo.is_finite() {
            let w = reach;
            total = total + adaptive::integrate(|t: f64| f(lo_f - w * (1.0 - t) / t) * w / (t * t), &[0.0, 1.0], opts)?;
        }
        if !hi.is_finite() {
            let w = reach;
            total = total + adaptive::integrate(|t: f64| f(hi_f + w * (1.0 - t) / t) * w / (t * t), &[0.0, 1.0], opts)?;
        }
        Ok(total)
    }
}

/// Breakpoints on `[lo, hi]` refined geometrically around `center`.
pub(crate) fn graded_breakpoints(lo: f64, hi: f64, center: f64, width: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if center > lo && center < hi {
        pts.push(center);
    }
    let w = width.max(f64::MIN_POSITIVE);
    for sign in [-1.0, 1.0] {
        let mut d = w;
        for _ in 0..80 {
            let p = center + sign * d;
            if (sign < 0.0 && p <= lo) || (sign > 0.0 && p >= hi) {
                break;
            }
            if p > lo && p < hi {
                pts.push(p);
            }
            d *= 4.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_{x_lo}^{x_hi} dx / (a x^2 + eps)^power` for `power` 1 or 2.
fn quadratic_model_integral(a: f64, eps: f64, x_lo: f64, x_hi: f64, power: i32) -> f64 {
    let r = (a / eps).sqrt();
    let root = (a * eps).sqrt();
    let anti = |x: f64| -> f64 {
        let at = (x * r).atan();
        if power == 1 {
            at / root
        } else {
            let rational = if x.is_infinite() {
                0.0
            } else {
                x / (2.0 * eps * (a * x * x + eps))
            };
            rational + at / (2.0 * eps * root)
        }
    };
    anti(x_hi) - anti(x_lo)
}

fn local_curvature(sys: &TwoBodySystem, p0: f64, support: &MomentumSupport, min: &KernelMinimum) -> f64 {
    if support.is_degenerate() {
        return 0.0;
    }
    let p = min.p_star;
    let room = (p - support.c1).min(support.c2 - p);
    if !(room > 0.0) {
        return 0.0;
    }
    let mut h = (1e-3 * (1.0 + p.abs())).min(0.25 * room);
    for _ in 0..12 {
        let up = sys.kernel_unchecked(p0, p + h);
        let dn = sys.kernel_unchecked(p0, p - h);
        let d = up + dn - 2.0 * min.value;
        if !d.is_finite() {
            h *= 0.1;
            continue;
        }
        if d > 1e-6 * min.value.abs() || h >= 0.25 * room {
            return (d / (2.0 * h * h)).max(0.0);
        }
        h = (h * 10.0).min(0.25 * room);
    }
    0.0
}

/// `I1 = ∫ dp / (G^2 + s)` over the support of `p0`.
pub fn integrate_i1(sys: &TwoBodySystem, p0: f64, s: f64, tol: f64) -> Result<Estimate> {
    SpectralProblem::new(sys, p0)?.i1(s, tol)
}

/// `I2 = ∫ dp / (G^2 + s)^2` over the support of `p0`.
pub fn integrate_i2(sys: &TwoBodySystem, p0: f64, s: f64, tol: f64) -> Result<Estimate> {
    SpectralProblem::new(sys, p0)?.i2(s, tol)
}

/// Partial integral of the `I1` integrand over `[p_lo, p_hi] ⊆ [c1, c2]`.
pub fn integrate_phase(sys: &TwoBodySystem, p0: f64, s: f64, p_lo: f64, p_hi: f64, tol: f64) -> Result<Estimate> {
    SpectralProblem::new(sys, p0)?.phase(s, p_lo, p_hi, tol)
}

pub fn spectral_integrals(sys: &TwoBodySystem, p0: f64, s: f64, tol: f64) -> Result<SpectralIntegrals> {
    SpectralProblem::new(sys, p0)?.integrals(s, tol)
}
