//! Momentum-space eigenfunctions at a solved energy.
//!
//! Delta: `phi(p) = C / (G^2 + s)` with `C = 2 M U0 ∫ phi`.
//! Coulomb-like: `phi(p) = C exp(-i varphi(p)) / (G^2 + s)` with
//! `varphi(p) = (2 M alpha / hbar) ∫_anchor^p dp' / (G^2 + s)`.
//! In both cases `C = I2^{-1/2}` normalizes `phi` on `[c1, c2]`.
//!
//! Values live on composite Chebyshev-Lobatto panels, graded towards the
//! minimum of `G^2`, so norms and running integrals are spectrally accurate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::chebyshev::{self, PANEL_ORDER};
use crate::error::{Error, Result};
use crate::kinematics::TwoBodySystem;
use crate::quadrature::{graded_breakpoints, SpectralProblem};
use crate::spectrum::{BoundState, Interaction, MAX_RESIDUAL};

pub const DEFAULT_GRID_SIZE: usize = 2048;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WavefunctionKind {
    Delta,
    Coulomb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWavefunction {
    /// Strictly increasing momenta covering `[c1, c2]`, endpoints included.
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Quadrature weights on `grid`.
    pub weights: Vec<f64>,
    /// `∫ |phi|^2` evaluated with `weights`.
    pub norm_check: f64,
    pub kind: WavefunctionKind,
    /// `varphi(p)` on the grid (zero for the delta interaction).
    pub phase: Vec<f64>,
    /// Momentum where `varphi` vanishes: 0 when inside the support, else `c1`.
    pub anchor: f64,
    /// `C = I2^{-1/2}`.
    pub amplitude_constant: f64,
    /// Index of the first grid point of every panel; panels share endpoints.
    panel_starts: Vec<usize>,
}

impl MomentumWavefunction {
    /// `varphi(c2) - varphi(c1)`.
    pub fn total_phase(&self) -> f64 {
        self.phase[self.phase.len() - 1] - self.phase[0]
    }

    /// `∫_{c1}^{c2} phi`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `∫_{c1}^{p_i} phi` at every grid point.
    pub fn running_integral(&self) -> Vec<Complex64> {
        let panel = chebyshev::panel();
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        let mut base = Complex64::new(0.0, 0.0);
        for &start in &self.panel_starts {
            let nodes = &self.values[start..=start + PANEL_ORDER];
            let half = 0.5 * (self.grid[start + PANEL_ORDER] - self.grid[start]);
            for i in 1..=PANEL_ORDER {
                let row = &panel.cumulative[i];
                let s: Complex64 = row.iter().zip(nodes).map(|(c, v)| v * c).sum();
                out[start + i] = base + s * half;
            }
            base = out[start + PANEL_ORDER];
        }
        out
    }

    /// `|2 M U0 ∫ phi - C| / C`; zero for Coulomb wavefunctions.
    pub fn delta_consistency(&self, sys: &TwoBodySystem, interaction: &Interaction) -> f64 {
        match interaction {
            Interaction::Delta { u0 } => {
                let lhs = 2.0 * sys.total_mass() * u0 * self.integral().re;
                (lhs - self.amplitude_constant).abs() / self.amplitude_constant
            }
            _ => 0.0,
        }
    }
}

/// Panels on `[c1, c2]`, graded around the minimum of `G^2` and refined
/// until their node count reaches `grid_size`.
fn panel_breaks(problem: &SpectralProblem<'_>, s: f64, anchor: Option<f64>, grid_size: usize) -> Vec<f64> {
    let support = problem.support();
    let (c1, c2) = (support.c1, support.c2);
    let p_star = problem.minimum().p_star;
    let width = resolution_width(problem, s);
    let mut pts = graded_breakpoints(c1, c2, p_star, width);
    if let Some(a) = anchor {
        if a > c1 && a < c2 {
            pts.push(a);
        }
    }
    pts.sort_by(f64::total_cmp);
    let floor = 1e-13 * (c2 - c1);
    pts.dedup_by(|b, a| (*b - *a) <= floor);
    if let Some(last) = pts.last_mut() {
        *last = c2;
    }
    let target = grid_size.div_ceil(PANEL_ORDER).max(1);
    while pts.len() - 1 < target {
        // bisect the panel that is longest relative to its distance from p*
        let (i, _) = pts
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let dist = if w[0] <= p_star && p_star <= w[1] {
                    0.0
                } else {
                    (w[0] - p_star).abs().min((w[1] - p_star).abs())
                };
                (i, (w[1] - w[0]) / (dist + width))
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one panel");
        let mid = 0.5 * (pts[i] + pts[i + 1]);
        pts.insert(i + 1, mid);
    }
    pts
}

/// Distance from the minimum over which `G^2 - Gmin2` grows to `s + Gmin2`.
fn resolution_width(problem: &SpectralProblem<'_>, s: f64) -> f64 {
    let support = problem.support();
    let min = problem.minimum();
    let eps = s + min.value;
    let sys = problem.system();
    let p0 = problem.p0();
    let mut best = support.width();
    for dir in [-1.0, 1.0] {
        let room = if dir < 0.0 {
            min.p_star - support.c1
        } else {
            support.c2 - min.p_star
        };
        if !(room > 0.0) {
            continue;
        }
        let rise = |d: f64| sys.kernel_unchecked(p0, min.p_star + dir * d) - min.value;
        if rise(room) <= eps {
            continue;
        }
        let (mut lo, mut hi) = (0.0, room);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if rise(mid) > eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.min(hi);
    }
    best.min(support.width() / 64.0).max(1e-15 * support.width())
}

struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
    panel_starts: Vec<usize>,
}

fn composite_grid(breaks: &[f64]) -> Grid {
    let panel = chebyshev::panel();
    let mut points = vec![breaks[0]];
    let mut weights = vec![0.0];
    let mut panel_starts = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        panel_starts.push(points.len() - 1);
        let last = points.len() - 1;
        weights[last] += half * panel.weights()[0];
        for i in 1..=PANEL_ORDER {
            let x = if i == PANEL_ORDER {
                b
            } else {
                mid + half * panel.nodes[i]
            };
            points.push(x);
            weights.push(half * panel.weights()[i]);
        }
    }
    Grid {
        points,
        weights,
        panel_starts,
    }
}

fn check_state(state: &BoundState) -> Result<()> {
    if !(state.residual < MAX_RESIDUAL) {
        return Err(Error::UnsolvedState {
            residual: state.residual,
        });
    }
    Ok(())
}

fn build(
    state: &BoundState,
    sys: &TwoBodySystem,
    phase_rate: Option<f64>,
    kind: WavefunctionKind,
    grid_size: usize,
) -> Result<MomentumWavefunction> {
    check_state(state)?;
    let problem = SpectralProblem::new(sys, state.p0)?;
    let support = problem.support();
    if !support.is_bounded() {
        return Err(Error::Precondition(
            "wavefunctions need a bounded momentum support".into(),
        ));
    }
    if support.is_degenerate() {
        return Err(Error::Precondition(
            "wavefunctions need a non-degenerate momentum support".into(),
        ));
    }
    let s = state.s;
    let anchor = if support.contains(0.0) { 0.0 } else { support.c1 };
    let breaks = panel_breaks(&problem, s, Some(anchor), grid_size);
    let grid = composite_grid(&breaks);
    let c = problem.i2(s, QUAD_TOL)?.value.powf(-0.5);

    let mut phase = vec![0.0; grid.points.len()];
    if let Some(rate) = phase_rate {
        let mut raw = vec![0.0; grid.points.len()];
        for i in 1..grid.points.len() {
            raw[i] = raw[i - 1] + problem.phase(s, grid.points[i - 1], grid.points[i], QUAD_TOL)?.value;
        }
        let k = (0..grid.points.len())
            .min_by(|&a, &b| {
                (grid.points[a] - anchor)
                    .abs()
                    .total_cmp(&(grid.points[b] - anchor).abs())
            })
            .unwrap_or(0);
        let origin = raw[k];
        for (ph, r) in phase.iter_mut().zip(&raw) {
            *ph = rate * (r - origin);
        }
    }
    let values: Vec<Complex64> = grid
        .points
        .iter()
        .zip(&phase)
        .map(|(&p, &ph)| Complex64::from_polar(c * problem.integrand(s, p), -ph))
        .collect();
    let norm_check = values.iter().zip(&grid.weights).map(|(v, w)| v.norm_sqr() * w).sum();
    Ok(MomentumWavefunction {
        grid: grid.points,
        values,
        weights: grid.weights,
        norm_check,
        kind,
        phase,
        anchor,
        amplitude_constant: c,
        panel_starts: grid.panel_starts,
    })
}

/// `phi = C / (G^2 + s)`, real and positive.
pub fn build_delta_wavefunction(
    state: &BoundState,
    sys: &TwoBodySystem,
    interaction: &Interaction,
    grid_size: usize,
) -> Result<MomentumWavefunction> {
    if !interaction.is_delta() {
        return Err(Error::Precondition(
            "build_delta_wavefunction needs a delta interaction".into(),
        ));
    }
    build(state, sys, None, WavefunctionKind::Delta, grid_size)
}

/// `phi = C exp(-i varphi) / (G^2 + s)`; the winding `varphi(c2) - varphi(c1)`
/// equals `2 pi (n + delta)` at a solved level.
pub fn build_coulomb_wavefunction(
    state: &BoundState,
    sys: &TwoBodySystem,
    interaction: &Interaction,
    grid_size: usize,
) -> Result<MomentumWavefunction> {
    let Interaction::Coulomb { alpha, .. } = *interaction else {
        return Err(Error::Precondition(
            "build_coulomb_wavefunction needs a Coulomb interaction".into(),
        ));
    };
    let rate = 2.0 * sys.total_mass() * alpha / sys.hbar();
    build(state, sys, Some(rate), WavefunctionKind::Coulomb, grid_size)
}

/// Builds the wavefunction matching the interaction kind.
pub fn build_wavefunction(
    state: &BoundState,
    sys: &TwoBodySystem,
    interaction: &Interaction,
    grid_size: usize,
) -> Result<MomentumWavefunction> {
    match interaction {
        Interaction::Delta { .. } => build_delta_wavefunction(state, sys, interaction, grid_size),
        Interaction::Coulomb { .. } => build_coulomb_wavefunction(state, sys, interaction, grid_size),
    }
}

/// Relative residual of the momentum-space Schrödinger equation,
/// `max |G^2 phi / 2M + (U phi) - E phi| / max |E phi|` over the grid, with
/// `E = state.energy`.
///
/// For `delta = 0` the constant `(alpha / 2 hbar)(i + cot(pi delta)) ∫ phi` is
/// an indeterminate `inf * 0`; it is then fixed by the equation at `c1` and
/// `(alpha / hbar) |∫ phi|`, which must vanish, is added to the numerator.
pub fn residual_check(
    wf: &MomentumWavefunction,
    sys: &TwoBodySystem,
    interaction: &Interaction,
    state: &BoundState,
) -> f64 {
    let m = sys.total_mass();
    let e = state.energy;
    let c = wf.amplitude_constant;
    let kinetic: Vec<Complex64> = wf
        .grid
        .iter()
        .zip(&wf.values)
        .zip(&wf.phase)
        .map(|((&p, &v), &ph)| {
            let g2 = sys.kernel_unchecked(state.p0, p);
            if g2.is_finite() {
                v * (g2 / (2.0 * m))
            } else {
                // G^2 phi tends to C exp(-i varphi) where G^2 diverges
                Complex64::from_polar(c / (2.0 * m), -ph)
            }
        })
        .collect();
    let total = wf.integral();
    let scale = wf.values.iter().map(|v| (v * e).norm()).fold(0.0, f64::max);
    let i = Complex64::i();
    let (worst, extra) = match *interaction {
        Interaction::Delta { u0 } => {
            let pot = -total * u0;
            let worst = kinetic
                .iter()
                .zip(&wf.values)
                .map(|(k, v)| (k + pot - v * e).norm())
                .fold(0.0, f64::max);
            (worst, 0.0)
        }
        Interaction::Coulomb { alpha, delta } => {
            let running = wf.running_integral();
            let half = alpha / (2.0 * sys.hbar());
            let constant = if delta == 0.0 {
                kinetic[0] - wf.values[0] * e
            } else {
                (i + 1.0 / (PI * delta).tan()) * total * half
            };
            let extra = if delta == 0.0 { 2.0 * half * total.norm() } else { 0.0 };
            let worst = kinetic
                .iter()
                .zip(&wf.values)
                .zip(&running)
                .map(|((k, v), r)| (k - constant + i * r * (2.0 * half) - v * e).norm())
                .fold(0.0, f64::max);
            (worst, extra)
        }
    };
    (worst + extra) / scale
}
