//! Closed-form expansions of the bound-state energy in the deformation
//! strength, used as oracles for the numerical solver.
//!
//! All series are written in terms of the unified coupling `kappa`, so one
//! function covers both interactions. Each prediction keeps its terms
//! separately so tests can isolate individual orders.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::TwoBodySystem;
use crate::spectrum::Interaction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFamily {
    Cutoff,
    InverseSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    DistinctMasses,
    Identical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPrediction {
    /// `(label, value)` pairs; `total` is their sum.
    pub terms: Vec<(&'static str, f64)>,
    pub total: f64,
    pub family: SeriesFamily,
    pub regime: Regime,
    /// Set when the parameters leave the regime the expansion assumes.
    pub warning: Option<String>,
}

impl SeriesPrediction {
    fn new(terms: Vec<(&'static str, f64)>, family: SeriesFamily, regime: Regime, warning: Option<String>) -> Self {
        let total = terms.iter().map(|(_, v)| v).sum();
        Self {
            terms,
            total,
            family,
            regime,
            warning,
        }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|(l, _)| *l == label).map(|(_, v)| *v)
    }

    /// Sum of the terms whose label satisfies `keep`.
    pub fn partial(&self, keep: impl Fn(&str) -> bool) -> f64 {
        self.terms.iter().filter(|(l, _)| keep(l)).map(|(_, v)| v).sum()
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Precondition(format!(
            "kappa must be positive and finite, got {kappa}"
        )));
    }
    Ok(())
}

fn leading_terms(sys: &TwoBodySystem, kappa: f64, p0: f64) -> Vec<(&'static str, f64)> {
    let mu = sys.reduced_mass();
    vec![
        ("center_of_mass", p0 * p0 / (2.0 * sys.total_mass())),
        ("order0", -PI * PI * mu / (2.0 * kappa * kappa)),
    ]
}

/// Cutoff family, distinct cutoffs, `|p0| << b1 - b2`: expansion in `1/b2`
/// through second order. The correction depends only on the smaller cutoff.
pub fn series_cutoff_distinct(sys: &TwoBodySystem, kappa: f64, p0: f64, b2: f64) -> Result<SeriesPrediction> {
    check_kappa(kappa)?;
    if sys.has_equal_cutoffs() {
        return Err(Error::Precondition(
            "equal cutoffs have no domain I; use series_cutoff_identical".into(),
        ));
    }
    if !(b2 > 0.0) {
        return Err(Error::Precondition(format!("b2 must be positive, got {b2}")));
    }
    let mu = sys.reduced_mass();
    let k = kappa;
    let mut terms = leading_terms(sys, kappa, p0);
    terms.push(("order1_over_b", 2.0 * PI * PI * mu * mu / (k.powi(3) * b2)));
    terms.push(("order2_over_b2", -6.0 * PI * PI * mu.powi(3) / (k.powi(4) * b2 * b2)));
    let gap = sys.b1() - b2;
    let warning = (p0.abs() > 0.1 * gap).then(|| {
        format!(
            "|p0| = {} exceeds 0.1 (b1 - b2) = {}; domain I expansion is unreliable",
            p0.abs(),
            0.1 * gap
        )
    });
    Ok(SeriesPrediction::new(
        terms,
        SeriesFamily::Cutoff,
        Regime::DistinctMasses,
        warning,
    ))
}

/// Cutoff family, identical particles: expansion in `1/b` through second
/// order, where the second order carries a term linear in `|p0|`.
pub fn series_cutoff_identical(sys: &TwoBodySystem, kappa: f64, p0: f64, b: f64) -> Result<SeriesPrediction> {
    check_kappa(kappa)?;
    if !(b > 0.0) {
        return Err(Error::Precondition(format!("b must be positive, got {b}")));
    }
    if p0.abs() >= 2.0 * b {
        return Err(Error::Precondition(format!(
            "|p0| = {} must be below 2b = {}",
            p0.abs(),
            2.0 * b
        )));
    }
    let mu = sys.reduced_mass();
    let m = sys.total_mass();
    let k = kappa;
    let mut terms = leading_terms(sys, kappa, p0);
    terms.push(("order1_over_b", 2.0 * PI * PI * mu * mu / (k.powi(3) * b)));
    terms.push(("order2_over_b2", -6.0 * PI * PI * mu.powi(3) / (k.powi(4) * b * b)));
    terms.push((
        "order2_abs_p0",
        4.0 * PI * PI * mu.powi(3) * p0.abs() / (k.powi(3) * m * b * b),
    ));
    Ok(SeriesPrediction::new(
        terms,
        SeriesFamily::Cutoff,
        Regime::Identical,
        None,
    ))
}

/// `g(p) = p / sqrt(1 - beta p^2)` for both particles: expansion in
/// `sqrt(beta)` through order `beta`.
pub fn series_inversesqrt_identical(sys: &TwoBodySystem, kappa: f64, p0: f64, beta: f64) -> Result<SeriesPrediction> {
    check_kappa(kappa)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!(
            "beta must be non-negative and finite, got {beta}"
        )));
    }
    let mu = sys.reduced_mass();
    let k = kappa;
    let pi2 = PI * PI;
    let mut terms = leading_terms(sys, kappa, p0);
    terms.push(("order_sqrt_beta", 4.0 * pi2 * mu * mu * beta.sqrt() / k.powi(3)));
    terms.push(("order_beta_p0_4", p0.powi(4) / (32.0 * mu) * beta));
    terms.push(("order_beta_p0_2", 3.0 * mu * pi2 * p0 * p0 / (4.0 * k * k) * beta));
    terms.push((
        "order_beta_pi4",
        -3.0 * mu.powi(3) * pi2 * pi2 / (2.0 * k.powi(4)) * beta,
    ));
    terms.push(("order_beta_pi2", -24.0 * mu.powi(3) * pi2 / k.powi(4) * beta));
    Ok(SeriesPrediction::new(
        terms,
        SeriesFamily::InverseSqrt,
        Regime::Identical,
        None,
    ))
}

/// Energy without deformation: `p0^2 / 2M - 2 pi^2 mu U0^2` for the delta
/// interaction and `p0^2 / 2M - mu alpha^2 / (2 hbar^2 (n + delta)^2)` for the
/// Coulomb-like one.
pub fn undeformed_baseline(sys: &TwoBodySystem, interaction: &Interaction, p0: f64, n: Option<u32>) -> Result<f64> {
    let kappa = interaction.kappa(sys.hbar(), n.unwrap_or(0))?;
    let mu = sys.reduced_mass();
    Ok(p0 * p0 / (2.0 * sys.total_mass()) - PI * PI * mu / (2.0 * kappa * kappa))
}
