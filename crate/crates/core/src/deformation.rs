//! One-particle deformed algebras `[X, P] = i hbar f(P)`.
//!
//! Each family is represented through the momentum map `P = g(p)` acting on an
//! auxiliary momentum `p` confined to `[-b, b]`, with `X = i hbar d/dp`. The map
//! satisfies `dg/dp = f(g(p))`, is odd and strictly increasing. A finite `b`
//! means a nonzero minimal length `pi hbar / (2 b)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The builtin deformation families plus user tabulated maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `g(p) = p`, `f = 1`, with a sharp cutoff at `|p| = b`.
    Cutoff,
    /// `g(p) = tan(sqrt(beta) p) / sqrt(beta)`, `f(P) = 1 + beta P^2`.
    Kempf,
    /// `g(p) = p / sqrt(1 - beta p^2)`, `f(P) = (1 + beta P^2)^(3/2)`.
    InverseSqrt,
    /// Monotone cubic interpolation of a user table.
    Custom,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Cutoff => "cutoff",
            FamilyKind::Kempf => "kempf",
            FamilyKind::InverseSqrt => "inverse_sqrt",
            FamilyKind::Custom => "custom",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cutoff" => Ok(FamilyKind::Cutoff),
            "kempf" => Ok(FamilyKind::Kempf),
            "inverse_sqrt" | "inversesqrt" | "inverse-sqrt" => Ok(FamilyKind::InverseSqrt),
            "custom" => Ok(FamilyKind::Custom),
            other => Err(Error::Config(format!("unknown deformation kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Cutoff,
    Kempf { beta: f64, sqrt_beta: f64 },
    InverseSqrt { beta: f64 },
    Custom(MonotoneTable),
}

/// The deformed algebra felt by one particle.
///
/// Immutable once built. `b = +inf` is the undeformed limit and removes every
/// momentum constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationFamily {
    params: Params,
    b: f64,
}

impl DeformationFamily {
    /// Sharp cutoff at `|p| = b`; `b = f64::INFINITY` is ordinary quantum mechanics.
    pub fn cutoff(b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Config(format!("cutoff b must be positive, got {b}")));
        }
        Ok(Self {
            params: Params::Cutoff,
            b,
        })
    }

    /// The undeformed algebra.
    pub fn undeformed() -> Self {
        Self {
            params: Params::Cutoff,
            b: f64::INFINITY,
        }
    }

    pub fn kempf(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let sqrt_beta = beta.sqrt();
        let b = if beta == 0.0 {
            f64::INFINITY
        } else {
            FRAC_PI_2 / sqrt_beta
        };
        Ok(Self {
            params: Params::Kempf { beta, sqrt_beta },
            b,
        })
    }

    pub fn inverse_sqrt(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let b = if beta == 0.0 { f64::INFINITY } else { 1.0 / beta.sqrt() };
        Ok(Self {
            params: Params::InverseSqrt { beta },
            b,
        })
    }

    /// Custom family from tabulated `(p, g(p))` pairs on `[0, b]`.
    ///
    /// The first pair must be `(0, 0)`; both columns must be strictly
    /// increasing. The map is extended to `[-b, 0)` by oddness and interpolated
    /// with a monotone (Fritsch-Carlson) cubic, so `f` is obtained as the
    /// interpolant's derivative.
    pub fn custom(points: &[(f64, f64)]) -> Result<Self> {
        let table = MonotoneTable::from_half_table(points)?;
        let b = *table.p.last().expect("validated non-empty");
        Ok(Self {
            params: Params::Custom(table),
            b,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        match self.params {
            Params::Cutoff => FamilyKind::Cutoff,
            Params::Kempf { .. } => FamilyKind::Kempf,
            Params::InverseSqrt { .. } => FamilyKind::InverseSqrt,
            Params::Custom(_) => FamilyKind::Custom,
        }
    }

    /// Half-width of the auxiliary momentum domain.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Deformation parameter for the Kempf and inverse-sqrt families.
    pub fn beta(&self) -> Option<f64> {
        match self.params {
            Params::Kempf { beta, .. } | Params::InverseSqrt { beta } => Some(beta),
            _ => None,
        }
    }

    /// Tabulated points (non-negative half) of a custom family.
    pub fn custom_points(&self) -> Option<Vec<(f64, f64)>> {
        match &self.params {
            Params::Custom(t) => Some(t.half_table()),
            _ => None,
        }
    }

    /// True when `g(p)` diverges as `|p| -> b`.
    pub fn diverges_at_endpoint(&self) -> bool {
        match self.params {
            Params::Kempf { beta, .. } | Params::InverseSqrt { beta } => beta > 0.0,
            _ => false,
        }
    }

    pub fn is_undeformed(&self) -> bool {
        self.b.is_infinite()
    }

    /// Upper limit `a` of the physical momentum, `a = lim_{p -> b} g(p)`.
    pub fn physical_limit(&self) -> f64 {
        match &self.params {
            Params::Cutoff => self.b,
            Params::Kempf { .. } | Params::InverseSqrt { .. } => f64::INFINITY,
            Params::Custom(t) => *t.g.last().expect("non-empty"),
        }
    }

    /// Momentum map `P = g(p)`.
    pub fn eval_g(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p.abs() > self.b {
            return Err(Error::Domain(format!("p = {p} outside [-b, b] with b = {}", self.b)));
        }
        if p.abs() == self.b && self.diverges_at_endpoint() {
            return Err(Error::Domain(format!(
                "g diverges at the endpoint |p| = b = {}",
                self.b
            )));
        }
        Ok(self.g_unchecked(p))
    }

    /// Deformation function `f(P)`.
    pub fn eval_f(&self, big_p: f64) -> Result<f64> {
        let a = self.physical_limit();
        if big_p.is_nan() || big_p.abs() > a {
            return Err(Error::Domain(format!(
                "P = {big_p} outside the physical range [-{a}, {a}]"
            )));
        }
        Ok(match &self.params {
            Params::Cutoff => 1.0,
            Params::Kempf { beta, .. } => 1.0 + beta * big_p * big_p,
            Params::InverseSqrt { beta } => (1.0 + beta * big_p * big_p).powf(1.5),
            Params::Custom(t) => t.derivative(t.inverse(big_p)),
        })
    }

    /// Minimal length `pi hbar / (2 b)`; zero in the undeformed limit.
    pub fn minimal_length(&self, hbar: f64) -> f64 {
        if self.b.is_infinite() {
            0.0
        } else {
            PI * hbar / (2.0 * self.b)
        }
    }

    /// `g(p)` without domain checks. At a divergent endpoint this is `±inf`.
    pub(crate) fn g_unchecked(&self, p: f64) -> f64 {
        match &self.params {
            Params::Cutoff => p,
            Params::Kempf { beta, sqrt_beta } => {
                if *beta == 0.0 {
                    return p;
                }
                let ap = p.abs();
                // Near the endpoint evaluate cot of the distance to it, which
                // keeps full relative precision where tan blows up.
                let g = if ap > 0.5 * self.b {
                    let t = (sqrt_beta * (self.b - ap)).tan();
                    if t == 0.0 {
                        f64::INFINITY
                    } else {
                        1.0 / (sqrt_beta * t)
                    }
                } else {
                    (sqrt_beta * ap).tan() / sqrt_beta
                };
                g.copysign(p)
            }
            Params::InverseSqrt { beta } => {
                if *beta == 0.0 {
                    return p;
                }
                let ap = p.abs();
                let d = (self.b - ap) * (self.b + ap);
                if d <= 0.0 {
                    f64::INFINITY.copysign(p)
                } else {
                    p * self.b / d.sqrt()
                }
            }
            Params::Custom(t) => t.eval(p),
        }
    }

    /// `g(p)^2` for the kinetic kernel; `+inf` at (or beyond) divergent endpoints.
    pub(crate) fn g_squared(&self, p: f64) -> f64 {
        if self.diverges_at_endpoint() && p.abs() >= self.b {
            return f64::INFINITY;
        }
        let g = self.g_unchecked(p.clamp(-self.b, self.b));
        g * g
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Config(format!(
            "deformation parameter beta must be finite and non-negative, got {beta}"
        )));
    }
    Ok(())
}

/// Universal constant relating the cutoff to the particle mass, `b = eta m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassScalingRule {
    pub eta: f64,
}

impl MassScalingRule {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::Config(format!("eta must be positive and finite, got {eta}")));
        }
        Ok(Self { eta })
    }

    /// Rule derived from the mass-scaled Kempf parameter `beta = gamma / m^2`,
    /// for which `eta = pi / (2 sqrt(gamma))`.
    pub fn from_kempf_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        Self::new(FRAC_PI_2 / gamma.sqrt())
    }

    /// Family of the given kind whose cutoff is `b = eta m`.
    pub fn from_mass(&self, m: f64, kind: FamilyKind) -> Result<DeformationFamily> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {m}")));
        }
        let b = self.eta * m;
        match kind {
            FamilyKind::Cutoff => DeformationFamily::cutoff(b),
            FamilyKind::Kempf => DeformationFamily::kempf((FRAC_PI_2 / b).powi(2)),
            FamilyKind::InverseSqrt => DeformationFamily::inverse_sqrt(1.0 / (b * b)),
            FamilyKind::Custom => Err(Error::Config(
                "custom families have no cutoff-to-parameter map; tabulate them directly".into(),
            )),
        }
    }
}

/// Odd monotone cubic Hermite interpolant stored over the full symmetric table.
#[derive(Debug, Clone, PartialEq)]
struct MonotoneTable {
    p: Vec<f64>,
    g: Vec<f64>,
    d: Vec<f64>,
    zero: usize,
}

impl MonotoneTable {
    fn from_half_table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("custom table needs at least two points".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::Config("custom table must start at (0, 0)".into()));
        }
        for w in points.windows(2) {
            let ((p0, g0), (p1, g1)) = (w[0], w[1]);
            if !(p1.is_finite() && g1.is_finite()) {
                return Err(Error::Config("custom table entries must be finite".into()));
            }
            if !(p1 > p0 && g1 > g0) {
                return Err(Error::Config(
                    "custom table must be strictly increasing in both p and g".into(),
                ));
            }
        }
        let n = points.len();
        let mut p = Vec::with_capacity(2 * n - 1);
        let mut g = Vec::with_capacity(2 * n - 1);
        for &(pi, gi) in points[1..].iter().rev() {
            p.push(-pi);
            g.push(-gi);
        }
        for &(pi, gi) in points {
            p.push(pi);
            g.push(gi);
        }
        let d = fritsch_carlson_slopes(&p, &g);
        Ok(Self { p, g, d, zero: n - 1 })
    }

    fn half_table(&self) -> Vec<(f64, f64)> {
        self.p[self.zero..]
            .iter()
            .zip(&self.g[self.zero..])
            .map(|(&p, &g)| (p, g))
            .collect()
    }

    fn segment(&self, xs: &[f64], x: f64) -> usize {
        let k = xs.partition_point(|&v| v <= x);
        k.clamp(1, xs.len() - 1) - 1
    }

    fn eval(&self, x: f64) -> f64 {
        let k = self.segment(&self.p, x);
        let h = self.p[k + 1] - self.p[k];
        let t = (x - self.p[k]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.g[k] + h10 * h * self.d[k] + h01 * self.g[k + 1] + h11 * h * self.d[k + 1]
    }

    fn derivative(&self, x: f64) -> f64 {
        let k = self.segment(&self.p, x);
        let h = self.p[k + 1] - self.p[k];
        let t = (x - self.p[k]) / h;
        let t2 = t * t;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * self.g[k] + dh01 * self.g[k + 1]) / h + dh10 * self.d[k] + dh11 * self.d[k + 1]
    }

    /// Solves `g(p) = big_p` on the monotone interpolant.
    fn inverse(&self, big_p: f64) -> f64 {
        let k = self.segment(&self.g, big_p);
        let (mut lo, mut hi) = (self.p[k], self.p[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.eval(mid) < big_p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Shape-preserving node slopes for strictly increasing data.
fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = y.windows(2).zip(&h).map(|(w, hk)| (w[1] - w[0]) / hk).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let w1 = 2.0 * h[k] + h[k - 1];
        let w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    let end_slope = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s <= 0.0 {
            0.5 * d0
        } else if s > 3.0 * d0 {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}
