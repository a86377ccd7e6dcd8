//! Two-body reduction: center-of-mass momentum `p0 = p1 + p2`, relative
//! momentum `p = mu2 p1 - mu1 p2`, and the effective one-body kinetic kernel
//!
//! ```text
//! G^2(p0, p) = g1(mu1 p0 + p)^2 / mu1 + g2(mu2 p0 - p)^2 / mu2
//! ```
//!
//! whose relative momentum lives on a `p0`-dependent interval `[c1, c2]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::deformation::DeformationFamily;
use crate::error::{Error, Result};

/// Which region of the `(p0, p)` plane a support interval comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainLabel {
    /// `|p0| <= b1 - b2`: only the more deformed particle constrains `p`.
    I,
    /// `b1 - b2 < p0 <= b1 + b2`.
    II,
    /// `-(b1 + b2) <= p0 < -(b1 - b2)`.
    III,
    /// Identical cutoffs (`b1 = b2`), where II and III join.
    Merged,
    /// `|p0| > b1 + b2`.
    Empty,
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainLabel::I => "I",
            DomainLabel::II => "II",
            DomainLabel::III => "III",
            DomainLabel::Merged => "Merged",
            DomainLabel::Empty => "Empty",
        };
        f.write_str(s)
    }
}

/// Relative-momentum interval `[c1, c2]` for one value of `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumSupport {
    pub c1: f64,
    pub c2: f64,
    pub label: DomainLabel,
}

impl MomentumSupport {
    pub fn is_empty(&self) -> bool {
        self.label == DomainLabel::Empty
    }

    /// Zero-measure support (the corners `|p0| = b1 + b2`).
    pub fn is_degenerate(&self) -> bool {
        !self.is_empty() && self.c2 <= self.c1
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.c2 - self.c1
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        !self.is_empty() && p >= self.c1 && p <= self.c2
    }

    pub fn is_bounded(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }
}

/// Two particles with their masses and deformed algebras.
///
/// Particles are relabeled at construction so that `b1 >= b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodySystem {
    m1: f64,
    m2: f64,
    deformation1: DeformationFamily,
    deformation2: DeformationFamily,
    hbar: f64,
    total_mass: f64,
    mu1: f64,
    mu2: f64,
    relabeled: bool,
}

impl TwoBodySystem {
    pub fn new(
        m1: f64,
        deformation1: DeformationFamily,
        m2: f64,
        deformation2: DeformationFamily,
        hbar: f64,
    ) -> Result<Self> {
        for (name, v) in [("m1", m1), ("m2", m2), ("hbar", hbar)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let relabeled = deformation1.b() < deformation2.b();
        let (m1, deformation1, m2, deformation2) = if relabeled {
            (m2, deformation2, m1, deformation1)
        } else {
            (m1, deformation1, m2, deformation2)
        };
        let total_mass = m1 + m2;
        Ok(Self {
            m1,
            m2,
            deformation1,
            deformation2,
            hbar,
            total_mass,
            mu1: m1 / total_mass,
            mu2: m2 / total_mass,
            relabeled,
        })
    }

    /// Both particles share one family; convenience for identical particles.
    pub fn identical(m: f64, deformation: DeformationFamily, hbar: f64) -> Result<Self> {
        Self::new(m, deformation.clone(), m, deformation, hbar)
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }
    pub fn m2(&self) -> f64 {
        self.m2
    }
    pub fn deformation1(&self) -> &DeformationFamily {
        &self.deformation1
    }
    pub fn deformation2(&self) -> &DeformationFamily {
        &self.deformation2
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    /// `M = m1 + m2`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn mu2(&self) -> f64 {
        self.mu2
    }
    /// Reduced mass `mu = mu1 mu2 M = m1 m2 / M`.
    pub fn reduced_mass(&self) -> f64 {
        self.m1 * self.m2 / self.total_mass
    }
    pub fn b1(&self) -> f64 {
        self.deformation1.b()
    }
    pub fn b2(&self) -> f64 {
        self.deformation2.b()
    }
    /// True if the particles were swapped to enforce `b1 >= b2`.
    pub fn relabeled(&self) -> bool {
        self.relabeled
    }

    /// Same cutoff on both particles: domains II and III merge.
    pub fn has_equal_cutoffs(&self) -> bool {
        self.b1().is_finite() && self.b1() == self.b2()
    }

    pub fn momentum_support(&self, p0: f64) -> MomentumSupport {
        momentum_support(self, p0)
    }

    pub fn kinetic_kernel(&self, p0: f64, p: f64) -> Result<f64> {
        kinetic_kernel(self, p0, p)
    }

    /// `G^2` without domain checks; `+inf` where a divergent `g` is hit.
    pub(crate) fn kernel_unchecked(&self, p0: f64, p: f64) -> f64 {
        let u1 = self.mu1 * p0 + p;
        let u2 = self.mu2 * p0 - p;
        self.deformation1.g_squared(u1) / self.mu1 + self.deformation2.g_squared(u2) / self.mu2
    }
}

/// Support of the relative momentum from `|p1| <= b1` and `|p2| <= b2`.
pub fn momentum_support(sys: &TwoBodySystem, p0: f64) -> MomentumSupport {
    let (b1, b2) = (sys.b1(), sys.b2());
    let empty = MomentumSupport {
        c1: 0.0,
        c2: 0.0,
        label: DomainLabel::Empty,
    };
    if p0.is_nan() || p0.abs() > b1 + b2 {
        return empty;
    }
    let lo = (-b1 - sys.mu1 * p0).max(sys.mu2 * p0 - b2);
    let hi = (b1 - sys.mu1 * p0).min(sys.mu2 * p0 + b2);
    let (c1, c2) = if lo > hi {
        // rounding at the corner |p0| = b1 + b2
        let m = 0.5 * (lo + hi);
        (m, m)
    } else {
        (lo, hi)
    };
    let label = if sys.has_equal_cutoffs() {
        DomainLabel::Merged
    } else if b1.is_infinite() || p0.abs() <= b1 - b2 {
        DomainLabel::I
    } else if p0 > 0.0 {
        DomainLabel::II
    } else {
        DomainLabel::III
    };
    MomentumSupport { c1, c2, label }
}

/// Effective kinetic kernel `G^2(p0, p)`.
pub fn kinetic_kernel(sys: &TwoBodySystem, p0: f64, p: f64) -> Result<f64> {
    let g1 = sys.deformation1.eval_g(sys.mu1 * p0 + p)?;
    let g2 = sys.deformation2.eval_g(sys.mu2 * p0 - p)?;
    Ok(g1 * g1 / sys.mu1 + g2 * g2 / sys.mu2)
}

/// Location and value of the minimum of `G^2` over the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMinimum {
    pub p_star: f64,
    pub value: f64,
}

const SCAN_POINTS: usize = 512;

/// Global minimum of `G^2(p0, .)` over `[c1, c2]`: a 512-point scan followed
/// by golden-section refinement around the best grid point.
pub fn kernel_minimum(sys: &TwoBodySystem, p0: f64) -> Result<KernelMinimum> {
    let support = momentum_support(sys, p0);
    if support.is_empty() {
        return Err(Error::EmptySupport { p0 });
    }
    if support.is_degenerate() {
        let p = support.c1;
        return Ok(KernelMinimum {
            p_star: p,
            value: sys.kernel_unchecked(p0, p),
        });
    }
    // Unbounded supports only occur when both maps are the identity, but the
    // scan window is kept generic.
    let window = 10.0 * (1.0 + p0.abs());
    let lo = support.c1.max(-window);
    let hi = support.c2.min(window);
    let f = |p: f64| sys.kernel_unchecked(p0, p);

    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..=SCAN_POINTS {
        let v = f(lo + step * i as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) || b - a <= f64::MIN_POSITIVE {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mut p_star = 0.5 * (a + b);
    let mut value = f(p_star);
    // the scan endpoints themselves may be the minimum (minimum on the boundary)
    for cand in [lo, hi] {
        let v = f(cand);
        if v < value {
            value = v;
            p_star = cand;
        }
    }
    if best_val < value {
        p_star = lo + step * best as f64;
        value = best_val;
    }
    Ok(KernelMinimum { p_star, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cutoff_pair(m1: f64, b1: f64, m2: f64, b2: f64) -> TwoBodySystem {
        TwoBodySystem::new(
            m1,
            DeformationFamily::cutoff(b1).unwrap(),
            m2,
            DeformationFamily::cutoff(b2).unwrap(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn derived_masses() {
        let sys = cutoff_pair(3.0, 9.0, 1.0, 3.0);
        assert_eq!(sys.total_mass(), 4.0);
        assert_relative_eq!(sys.mu1() + sys.mu2(), 1.0);
        assert_relative_eq!(sys.reduced_mass(), 0.75);
        assert_relative_eq!(sys.reduced_mass(), sys.mu1() * sys.mu2() * sys.total_mass());
        assert!(!sys.relabeled());
    }

    #[test]
    fn relabels_to_keep_b1_largest() {
        let sys = cutoff_pair(1.0, 2.0, 5.0, 7.0);
        assert!(sys.relabeled());
        assert_eq!(sys.b1(), 7.0);
        assert_eq!(sys.m1(), 5.0);
        assert_eq!(sys.b2(), 2.0);
        assert_eq!(sys.m2(), 1.0);
    }

    #[test]
    fn rejects_bad_masses() {
        let d = DeformationFamily::cutoff(1.0).unwrap();
        assert!(TwoBodySystem::new(0.0, d.clone(), 1.0, d.clone(), 1.0).is_err());
        assert!(TwoBodySystem::new(1.0, d.clone(), 1.0, d, -1.0).is_err());
    }

    #[test]
    fn support_examples() {
        let b = 2.5;
        let sys = cutoff_pair(1.0, b, 1.0, b);
        let s = sys.momentum_support(0.0);
        assert_eq!((s.c1, s.c2, s.label), (-b, b, DomainLabel::Merged));

        let sys = cutoff_pair(1.0, 3.0, 1.0, 1.0);
        let s = sys.momentum_support(1.0);
        assert_eq!(s.label, DomainLabel::I);
        assert_relative_eq!(s.c1, -0.5);
        assert_relative_eq!(s.c2, 1.5);

        let s = sys.momentum_support(4.0);
        assert_eq!(s.label, DomainLabel::II);
        assert_relative_eq!(s.c1, 1.0);
        assert_relative_eq!(s.c2, 1.0);
        assert!(s.is_degenerate());

        assert!(sys.momentum_support(4.0001).is_empty());
        assert_eq!(sys.momentum_support(-3.0).label, DomainLabel::III);
    }

    #[test]
    fn boundary_belongs_to_lower_domain() {
        let sys = cutoff_pair(1.0, 3.0, 1.0, 1.0);
        assert_eq!(sys.momentum_support(2.0).label, DomainLabel::I);
        assert_eq!(sys.momentum_support(-2.0).label, DomainLabel::I);
    }

    #[test]
    fn identical_support_shrinks_with_p0() {
        let b = 4.0;
        let sys = cutoff_pair(1.0, b, 1.0, b);
        let mut prev = f64::INFINITY;
        for i in 0..=16 {
            let p0 = 2.0 * b * i as f64 / 16.0;
            let s = sys.momentum_support(p0);
            assert_eq!(s.label, DomainLabel::Merged);
            assert_relative_eq!(s.c2, b - 0.5 * p0, epsilon = 1e-14);
            assert_relative_eq!(s.c1, -(b - 0.5 * p0), epsilon = 1e-14);
            assert!(s.width() <= prev);
            prev = s.width();
        }
    }

    #[test]
    fn undeformed_support_is_real_line() {
        let d = DeformationFamily::undeformed();
        let sys = TwoBodySystem::new(1.0, d.clone(), 2.0, d, 1.0).unwrap();
        let s = sys.momentum_support(123.0);
        assert_eq!(s.c1, f64::NEG_INFINITY);
        assert_eq!(s.c2, f64::INFINITY);
        assert_eq!(s.label, DomainLabel::I);
    }

    #[test]
    fn cutoff_kernel_examples() {
        let sys = cutoff_pair(1.0, 10.0, 1.0, 10.0);
        assert_relative_eq!(sys.kinetic_kernel(0.0, 1.0).unwrap(), 4.0);
        assert_eq!(sys.kinetic_kernel(0.0, 0.0).unwrap(), 0.0);
        let inv = TwoBodySystem::identical(1.0, DeformationFamily::inverse_sqrt(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(inv.kinetic_kernel(0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(sys.kinetic_kernel(0.0, 10.5), Err(Error::Domain(_))));
    }

    #[test]
    fn cutoff_kernel_cross_terms_cancel() {
        let sys = cutoff_pair(2.7, 50.0, 0.4, 20.0);
        let mm = sys.mu1() * sys.mu2();
        for &(p0, p) in &[(0.3, -1.2), (-4.0, 2.5), (7.5, 0.0), (1.0, 3.0)] {
            let g2 = sys.kinetic_kernel(p0, p).unwrap();
            assert_relative_eq!(g2, p0 * p0 + p * p / mm, max_relative = 1e-13);
        }
    }

    #[test]
    fn kernel_minimum_examples() {
        let sys = cutoff_pair(1.0, 5.0, 1.0, 5.0);
        let m = kernel_minimum(&sys, 0.0).unwrap();
        assert!(m.p_star.abs() < 1e-8);
        assert!(m.value < 1e-15);

        let m = kernel_minimum(&sys, 1.0).unwrap();
        assert!(m.p_star.abs() < 1e-7);
        assert_relative_eq!(m.value, 1.0, max_relative = 1e-14);

        let inv = TwoBodySystem::identical(1.0, DeformationFamily::inverse_sqrt(1.0).unwrap(), 1.0).unwrap();
        let m = kernel_minimum(&inv, 0.0).unwrap();
        assert!(m.p_star.abs() < 1e-8);
        assert!(m.value < 1e-15);

        assert!(matches!(kernel_minimum(&sys, 11.0), Err(Error::EmptySupport { .. })));
    }

    #[test]
    fn kernel_minimum_on_boundary() {
        // domain II of distinct cutoffs: G^2 is smallest at the left endpoint
        let sys = cutoff_pair(1.0, 3.0, 1.0, 1.0);
        let s = sys.momentum_support(3.0);
        let m = kernel_minimum(&sys, 3.0).unwrap();
        assert_relative_eq!(m.p_star, s.c1, epsilon = 1e-12);
        assert_relative_eq!(m.value, sys.kinetic_kernel(3.0, s.c1).unwrap(), max_relative = 1e-14);
    }
}
