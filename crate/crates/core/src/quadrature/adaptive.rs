//! Globally adaptive Gauss-Legendre integration on finite intervals.
//!
//! Each panel is integrated with a 15-point rule, once whole and once as two
//! halves; the difference is the panel's error estimate and the halves' sum
//! its value. The panel with the largest estimate is bisected until the total
//! estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const RULE_ORDER: usize = 15;

/// Hard cap on the number of live panels.
pub const MAX_PANELS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_panels: usize,
    /// Relative accuracy of individual integrand values; panels whose two
    /// estimates agree to this level are not refined further.
    pub noise: f64,
}

impl QuadratureOptions {
    /// Relative tolerance `tol` with an absolute floor of `tol * 1e-3`.
    pub fn relative(tol: f64) -> Self {
        let tol = tol.max(4.0 * f64::EPSILON);
        Self {
            tol_rel: tol,
            tol_abs: tol * 1e-3,
            max_panels: MAX_PANELS,
            noise: f64::EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
            panels: self.panels + o.panels,
        }
    }
}

struct Rule {
    nodes: [f64; RULE_ORDER],
    weights: [f64; RULE_ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (nodes, weights) = gauss_legendre(RULE_ORDER);
        let mut r = Rule {
            nodes: [0.0; RULE_ORDER],
            weights: [0.0; RULE_ORDER],
        };
        r.nodes.copy_from_slice(&nodes);
        r.weights.copy_from_slice(&weights);
        r
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Single 15-point panel; also returns the integral of `|f|` for roundoff control.
fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let r = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    let mut sa = 0.0;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        let v = f(c + h * x);
        s += w * v;
        sa += w * v.abs();
    }
    (s * h, sa * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Value of the single-panel rule, reused when the panel is bisected.
    left: f64,
    right: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn evaluate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, noise: f64) -> (Panel, bool) {
    let m = 0.5 * (a + b);
    let (left, la) = panel(f, a, m);
    let (right, ra) = panel(f, m, b);
    let value = left + right;
    let error = (value - whole).abs();
    // panels whose disagreement is at roundoff level cannot be improved
    let settled = error <= 50.0 * noise * (la + ra) || m <= a || m >= b;
    (
        Panel {
            a,
            b,
            value,
            error,
            left,
            right,
        },
        settled,
    )
}

/// Integrates `f` over the finite interval `[points[0], points[last]]`, with
/// the interior breakpoints of `points` as the initial panel boundaries.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadratureOptions) -> Result<Estimate> {
    if points.len() < 2 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("adaptive quadrature needs finite breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    let mut live_value = 0.0;
    let mut live_error = 0.0;
    let mut count = 0usize;

    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (whole, _) = panel(&f, a, b);
        let (p, settled) = evaluate(&f, a, b, whole, opts.noise);
        count += 1;
        if settled {
            settled_value += p.value;
            settled_error += p.error;
        } else {
            live_value += p.value;
            live_error += p.error;
            heap.push(p);
        }
    }

    loop {
        let total = settled_value + live_value;
        let target = (opts.tol_rel * total.abs()).max(opts.tol_abs);
        if live_error + settled_error <= target || heap.is_empty() {
            if !total.is_finite() {
                return Err(Error::Convergence(format!("non-finite integral {total}")));
            }
            return Ok(Estimate {
                value: total,
                error: live_error + settled_error,
                panels: count,
            });
        }
        if count >= opts.max_panels {
            return Err(Error::Convergence(format!(
                "adaptive quadrature exceeded {} panels (estimate {total}, error {})",
                opts.max_panels,
                live_error + settled_error
            )));
        }
        let worst = heap.pop().expect("non-empty");
        live_value -= worst.value;
        live_error -= worst.error;
        let m = 0.5 * (worst.a + worst.b);
        for (a, b, whole) in [(worst.a, m, worst.left), (m, worst.b, worst.right)] {
            let (p, settled) = evaluate(&f, a, b, whole, opts.noise);
            if settled {
                settled_value += p.value;
                settled_error += p.error;
            } else {
                live_value += p.value;
                live_error += p.error;
                heap.push(p);
            }
        }
        count += 1;
        // keep running sums from drifting
        if count.is_multiple_of(4096) {
            live_value = heap.iter().map(|p| p.value).sum();
            live_error = heap.iter().map(|p| p.error).sum();
        }
    }
}
