//! Bound-state energies from the quantization condition
//!
//! ```text
//! I1(s) = ∫_{c1}^{c2} dp / (G^2(p0, p) + s) = kappa / M,      E = -s / (2 M),
//! ```
//!
//! with `kappa = 1 / (2 U0)` for the delta interaction and
//! `kappa = pi hbar (n + delta) / alpha` for the Coulomb-like one.
//!
//! `I1` is strictly decreasing in `s` on `(-Gmin2, inf)`, so each condition
//! has at most one root. The solver works in `t = ln(s + Gmin2)`, which keeps
//! full relative precision in the distance to threshold for high levels.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{MomentumSupport, TwoBodySystem};
use crate::quadrature::SpectralProblem;
use crate::roots::brent;

/// Largest accepted `|M/kappa I1(s*) - 1|`.
pub const MAX_RESIDUAL: f64 = 1e-9;

/// Default number of Coulomb levels returned by [`solve_coulomb_levels`].
pub const DEFAULT_N_MAX: u32 = 10;

const MAX_HALVINGS: usize = 60;
const MAX_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interaction {
    Delta { u0: f64 },
    Coulomb { alpha: f64, delta: f64 },
}

impl Interaction {
    pub fn delta(u0: f64) -> Result<Self> {
        if !(u0 > 0.0) || !u0.is_finite() {
            return Err(Error::Config(format!("U0 must be positive and finite, got {u0}")));
        }
        Ok(Interaction::Delta { u0 })
    }

    pub fn coulomb(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be positive and finite, got {alpha}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Config(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Interaction::Coulomb { alpha, delta })
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Interaction::Delta { .. })
    }

    /// Unified coupling `kappa`; `n` is ignored for the delta interaction.
    pub fn kappa(&self, hbar: f64, n: u32) -> Result<f64> {
        match *self {
            Interaction::Delta { u0 } => Ok(1.0 / (2.0 * u0)),
            Interaction::Coulomb { alpha, delta } => {
                if n == 0 && delta == 0.0 {
                    return Err(Error::InvalidLevel { n, delta });
                }
                Ok(PI * hbar * (n as f64 + delta) / alpha)
            }
        }
    }
}

/// One solved level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: f64,
    /// `s = q^2 = -2 M E`.
    pub s: f64,
    pub p0: f64,
    /// Coulomb level; `None` for the delta interaction.
    pub n: Option<u32>,
    pub support: MomentumSupport,
    /// `|M/kappa I1(s) - 1|` at the accepted root.
    pub residual: f64,
    pub kappa: f64,
    /// `min G^2` over the support; `s > -gmin2` always holds.
    pub gmin2: f64,
}

/// Solves `I1(s) = kappa / M` for a given `kappa`.
///
/// `tol` is the relative width of the final bracket in `s + Gmin2`; the
/// integrals are evaluated to `min(tol, 1e-11)`.
pub fn solve_condition(sys: &TwoBodySystem, p0: f64, kappa: f64, tol: f64) -> Result<(f64, f64, MomentumSupport, f64)> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Precondition(format!(
            "kappa must be positive and finite, got {kappa}"
        )));
    }
    let tol = tol.clamp(1e-15, 1e-2);
    let support = sys.momentum_support(p0);
    if support.is_empty() {
        return Err(Error::EmptySupport { p0 });
    }
    if support.is_degenerate() {
        return Err(Error::NoBoundState(format!("support for p0 = {p0} is a single point")));
    }
    let problem = SpectralProblem::new(sys, p0)?;
    let gmin = problem.minimum().value;
    let m = sys.total_mass();
    let target = kappa / m;
    let quad_tol = tol.min(1e-11);
    // F(eps) = M/kappa I1(eps - Gmin2) - 1, decreasing in eps
    let f = |eps: f64| -> Result<f64> { Ok(problem.i1(eps - gmin, quad_tol)?.value / target - 1.0) };

    let undeformed = PI * PI * sys.mu1() * sys.mu2() * m * m / (kappa * kappa);
    let mut s_hi = 10.0 * undeformed.max(1.0);
    let mut eps_hi = s_hi + gmin;
    let mut f_hi = f(eps_hi)?;
    let mut expansions = 0;
    while f_hi > 0.0 {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::Convergence(format!("no upper bracket for kappa = {kappa}")));
        }
        s_hi *= 10.0;
        eps_hi = s_hi + gmin;
        f_hi = f(eps_hi)?;
    }

    let floor = 2.0 * problem.margin();
    let mut eps_lo = eps_hi;
    let mut f_lo = f_hi;
    for _ in 0..MAX_HALVINGS {
        let next = 0.5 * eps_lo;
        if next <= floor {
            break;
        }
        eps_lo = next;
        f_lo = f(eps_lo)?;
        if f_lo > 0.0 {
            break;
        }
    }
    if !(f_lo > 0.0) {
        return Err(Error::NoBoundState(format!(
            "M/kappa I1 stays below 1 down to s = {} above threshold {}",
            eps_lo - gmin,
            -gmin
        )));
    }

    let root = brent(|t: f64| f(t.exp()), eps_lo.ln(), eps_hi.ln(), tol, 200)?;
    let eps = root.x.exp();
    let residual = f(eps)?.abs();
    if !(residual < MAX_RESIDUAL) {
        return Err(Error::Convergence(format!(
            "root residual {residual:e} exceeds {MAX_RESIDUAL:e}"
        )));
    }
    Ok((eps - gmin, residual, support, gmin))
}

fn build_state(sys: &TwoBodySystem, p0: f64, kappa: f64, n: Option<u32>, tol: f64) -> Result<BoundState> {
    let (s, residual, support, gmin2) = solve_condition(sys, p0, kappa, tol)?;
    Ok(BoundState {
        energy: -s / (2.0 * sys.total_mass()),
        s,
        p0,
        n,
        support,
        residual,
        kappa,
        gmin2,
    })
}

/// The single delta-interaction level at `p0`.
pub fn solve_delta(sys: &TwoBodySystem, interaction: &Interaction, p0: f64, tol: f64) -> Result<BoundState> {
    match interaction {
        Interaction::Delta { .. } => build_state(sys, p0, interaction.kappa(sys.hbar(), 0)?, None, tol),
        _ => Err(Error::Precondition("solve_delta needs a delta interaction".into())),
    }
}

/// Coulomb-like level `n` at `p0`.
pub fn solve_coulomb(sys: &TwoBodySystem, interaction: &Interaction, p0: f64, n: u32, tol: f64) -> Result<BoundState> {
    match interaction {
        Interaction::Coulomb { .. } => build_state(sys, p0, interaction.kappa(sys.hbar(), n)?, Some(n), tol),
        _ => Err(Error::Precondition("solve_coulomb needs a Coulomb interaction".into())),
    }
}

/// Levels `n = n_min..=n_max` (`n_min` is 1 when `delta = 0`), stopping at
/// the first level without a bound state.
pub fn solve_coulomb_levels(
    sys: &TwoBodySystem,
    interaction: &Interaction,
    p0: f64,
    n_max: u32,
    tol: f64,
) -> Result<Vec<BoundState>> {
    let delta = match interaction {
        Interaction::Coulomb { delta, .. } => *delta,
        _ => {
            return Err(Error::Precondition(
                "solve_coulomb_levels needs a Coulomb interaction".into(),
            ))
        }
    };
    let n_min = if delta == 0.0 { 1 } else { 0 };
    let mut out = Vec::new();
    for n in n_min..=n_max {
        match solve_coulomb(sys, interaction, p0, n, tol) {
            Ok(state) => out.push(state),
            Err(Error::NoBoundState(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Solves one level (`n` for Coulomb, ignored for delta).
pub fn solve(sys: &TwoBodySystem, interaction: &Interaction, p0: f64, n: Option<u32>, tol: f64) -> Result<BoundState> {
    match interaction {
        Interaction::Delta { .. } => solve_delta(sys, interaction, p0, tol),
        Interaction::Coulomb { .. } => solve_coulomb(sys, interaction, p0, n.unwrap_or(0), tol),
    }
}

/// Solves at every grid point, in parallel; results keep the input order and
/// per-point failures are recorded rather than propagated.
pub fn scan_p0(
    sys: &TwoBodySystem,
    interaction: &Interaction,
    p0_grid: &[f64],
    n: Option<u32>,
    tol: f64,
) -> Vec<(f64, Result<BoundState>)> {
    p0_grid
        .par_iter()
        .map(|&p0| (p0, solve(sys, interaction, p0, n, tol)))
        .collect()
}
