//! Chebyshev-Lobatto panels: nodes, Clenshaw-Curtis weights and the
//! cumulative (indefinite) integration matrix.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Intervals per panel; each panel carries `PANEL_ORDER + 1` nodes.
pub(crate) const PANEL_ORDER: usize = 32;

pub(crate) struct LobattoPanel {
    /// Ascending nodes on `[-1, 1]`.
    pub nodes: Vec<f64>,
    /// `cumulative[i][j]`: weight of value `j` in `∫_{-1}^{x_i} f`.
    pub cumulative: Vec<Vec<f64>>,
}

impl LobattoPanel {
    /// Clenshaw-Curtis weights, the last row of the cumulative matrix.
    pub fn weights(&self) -> &[f64] {
        self.cumulative.last().expect("non-empty panel")
    }
}

pub(crate) fn panel() -> &'static LobattoPanel {
    static PANEL: OnceLock<LobattoPanel> = OnceLock::new();
    PANEL.get_or_init(|| build(PANEL_ORDER))
}

fn build(n: usize) -> LobattoPanel {
    // ascending x_i = -cos(pi i / n) = cos(theta_i), theta_i = pi (n - i) / n
    let theta: Vec<f64> = (0..=n).map(|i| PI * (n - i) as f64 / n as f64).collect();
    let nodes: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, t)| if 2 * i == n { 0.0 } else { t.cos() })
        .collect();
    let mut cumulative = vec![vec![0.0; n + 1]; n + 1];
    for j in 0..=n {
        // coefficients of the Lagrange basis function l_j: f = sum'' a_k T_k
        let half_j = if j == 0 || j == n { 0.5 } else { 1.0 };
        let mut a = vec![0.0; n + 1];
        for (k, ak) in a.iter_mut().enumerate() {
            *ak = 2.0 / n as f64 * half_j * (k as f64 * theta[j]).cos();
        }
        a[0] *= 0.5;
        a[n] *= 0.5;
        // antiderivative coefficients b_k of sum a_k T_k
        let mut b = vec![0.0; n + 2];
        for (k, &ak) in a.iter().enumerate() {
            match k {
                0 => b[1] += ak,
                1 => b[2] += 0.25 * ak,
                _ => {
                    b[k + 1] += ak / (2.0 * (k + 1) as f64);
                    b[k - 1] -= ak / (2.0 * (k - 1) as f64);
                }
            }
        }
        // fix the constant so the antiderivative vanishes at x = -1
        let at_minus_one: f64 = b
            .iter()
            .enumerate()
            .map(|(k, bk)| if k % 2 == 0 { *bk } else { -bk })
            .sum();
        b[0] -= at_minus_one;
        for i in 0..=n {
            cumulative[i][j] = b
                .iter()
                .enumerate()
                .map(|(k, bk)| bk * (k as f64 * theta[i]).cos())
                .sum();
        }
    }
    LobattoPanel { nodes, cumulative }
}
