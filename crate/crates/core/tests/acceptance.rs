//! Acceptance criteria. Each check prints one `criterion N: PASS|FAIL` line
//! with the measured quantities; the process exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::catch_unwind;
use std::process::ExitCode;
use std::time::Instant;

use minlen::deformation::DeformationFamily;
use minlen::kinematics::{momentum_support, DomainLabel, TwoBodySystem};
use minlen::perturbation::{series_cutoff_distinct, series_cutoff_identical, series_inversesqrt_identical};
use minlen::quadrature::integrate_i1;
use minlen::spectrum::{solve_coulomb, solve_delta, BoundState, Interaction};
use minlen::wavefunction::{build_coulomb_wavefunction, build_delta_wavefunction, residual_check};
use minlen::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SOLVE_TOL: f64 = 1e-15;
const GRID: usize = 2048;

fn report(n: u32, pass: bool, detail: &str) {
    println!("criterion {n}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn identical(b_or_beta: DeformationFamily) -> TwoBodySystem {
    TwoBodySystem::identical(1.0, b_or_beta, 1.0).unwrap()
}

fn criterion_1_undeformed_limits() -> bool {
    const TOL: f64 = 1e-7;
    const BUDGET_S: f64 = 5.0;
    let start = Instant::now();
    let sys = identical(DeformationFamily::cutoff(1e8).unwrap());
    let mu = sys.reduced_mass();
    let mut worst: f64 = 0.0;
    let delta = solve_delta(&sys, &Interaction::delta(1.0 / (2.0 * PI)).unwrap(), 0.0, SOLVE_TOL).unwrap();
    worst = worst.max((delta.energy / -0.25 - 1.0).abs());
    let coulomb = Interaction::coulomb(1.0, 0.5).unwrap();
    for n in 0..=3u32 {
        let st = solve_coulomb(&sys, &coulomb, 0.0, n, SOLVE_TOL).unwrap();
        let exact = -mu / (2.0 * (n as f64 + 0.5).powi(2));
        worst = worst.max((st.energy / exact - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < TOL && secs < BUDGET_S;
    report(
        1,
        pass,
        &format!("max relative error {worst:.3e} (< {TOL:e}), {secs:.2} s (< {BUDGET_S} s)"),
    );
    pass
}

fn criterion_2_distinct_mass_series_order() -> bool {
    const SLOPE1: (f64, f64) = (-2.0, 0.15);
    const SLOPE2: (f64, f64) = (-3.0, 0.3);
    const BUDGET_S: f64 = 30.0;
    let start = Instant::now();
    let u0 = 1.0;
    let kappa = 1.0 / (2.0 * u0);
    let int = Interaction::delta(u0).unwrap();
    let b2s = [1e2, 1e3, 1e4];
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for &b2 in &b2s {
        let sys = TwoBodySystem::new(
            3.0,
            DeformationFamily::cutoff(3.0 * b2).unwrap(),
            1.0,
            DeformationFamily::cutoff(b2).unwrap(),
            1.0,
        )
        .unwrap();
        let e = solve_delta(&sys, &int, 0.0, SOLVE_TOL).unwrap().energy;
        let s = series_cutoff_distinct(&sys, kappa, 0.0, b2).unwrap();
        let first = s.partial(|l| l != "order2_over_b2");
        r1.push((e - first).abs());
        r2.push((e - s.total).abs());
    }
    let k1 = loglog_slope(&b2s, &r1);
    let k2 = loglog_slope(&b2s, &r2);
    let secs = start.elapsed().as_secs_f64();
    let pass = (k1 - SLOPE1.0).abs() <= SLOPE1.1 && (k2 - SLOPE2.0).abs() <= SLOPE2.1 && secs < BUDGET_S;
    report(
        2,
        pass,
        &format!(
            "slope one-correction {k1:.4} (target -2 ± 0.15), two-correction {k2:.4} (target -3 ± 0.3), residuals {r1:?} / {r2:?}, {secs:.2} s"
        ),
    );
    pass
}

fn criterion_3_identical_abs_p0_term() -> bool {
    const REL_TOL: f64 = 0.05;
    const BUDGET_S: f64 = 30.0;
    let start = Instant::now();
    let b = 1e3;
    let sys = identical(DeformationFamily::cutoff(b).unwrap());
    let int = Interaction::coulomb(1.0, 0.5).unwrap();
    let m = sys.total_mass();
    let e0 = solve_coulomb(&sys, &int, 0.0, 0, SOLVE_TOL).unwrap().energy;
    let kappa = int.kappa(1.0, 0).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for frac in [0.05, 0.1, 0.2] {
        let p0 = frac * b;
        let e = solve_coulomb(&sys, &int, p0, 0, SOLVE_TOL).unwrap().energy;
        let d = e - e0 - p0 * p0 / (2.0 * m);
        let series = series_cutoff_identical(&sys, kappa, p0, b).unwrap();
        let predicted = series.term("order2_abs_p0").unwrap();
        let rel = (d / predicted - 1.0).abs();
        pass &= rel <= REL_TOL;
        lines.push(format!("p0={frac}b: D={d:.6e} predicted={predicted:.6e} rel={rel:.4}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < BUDGET_S;
    report(
        3,
        pass,
        &format!("{} (tolerance {REL_TOL}), {secs:.2} s", lines.join("; ")),
    );
    if !pass {
        println!("    exact |p0| dependence enters through 1/(2b - |p0|); the linear series term is off by about |p0| / (2b)");
    }
    pass
}

fn criterion_4_inversesqrt_series() -> bool {
    const SLOPE: (f64, f64) = (1.5, 0.3);
    const COEF_REL: f64 = 0.01;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let u0 = 1.0;
    let kappa = 1.0 / (2.0 * u0);
    let int = Interaction::delta(u0).unwrap();
    let betas = [1e-6, 1e-8];
    let mut pass = true;
    let mut lines = Vec::new();
    for p0 in [0.0, 0.3] {
        let mut resid = Vec::new();
        let mut printed = Vec::new();
        let mut scaled = Vec::new();
        let mut coef = 0.0;
        for &beta in &betas {
            let sys = identical(DeformationFamily::inverse_sqrt(beta).unwrap());
            let e = solve_delta(&sys, &int, p0, SOLVE_TOL).unwrap().energy;
            let s = series_inversesqrt_identical(&sys, kappa, p0, beta).unwrap();
            resid.push((e - s.total).abs());
            let beta_terms = s.partial(|l| l.starts_with("order_beta"));
            printed.push((e - (s.total - 2.0 * beta_terms)).abs());
            let base = s.term("center_of_mass").unwrap() + s.term("order0").unwrap();
            scaled.push((e - base) / beta.sqrt());
            coef = s.term("order_sqrt_beta").unwrap() / beta.sqrt();
        }
        let slope = loglog_slope(&betas, &resid);
        let printed_slope = loglog_slope(&betas, &printed);
        let ratio = (betas[0] / betas[1]).sqrt();
        let richardson = (ratio * scaled[1] - scaled[0]) / (ratio - 1.0);
        let rel = (richardson / coef - 1.0).abs();
        pass &= (slope - SLOPE.0).abs() <= SLOPE.1 && rel <= COEF_REL;
        lines.push(format!(
            "p0={p0}: slope {slope:.4} (printed-sign beta term: {printed_slope:.4}), sqrt(beta) coefficient {richardson:.8} vs {coef:.8} (rel {rel:.2e})"
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < BUDGET_S;
    report(
        4,
        pass,
        &format!(
            "{}; target slope 1.5 ± 0.3, coefficient within 1%, {secs:.2} s",
            lines.join("; ")
        ),
    );
    pass
}

fn random_family(rng: &mut ChaCha8Rng, b: f64) -> DeformationFamily {
    match rng.gen_range(0..3) {
        0 => DeformationFamily::cutoff(b).unwrap(),
        1 => DeformationFamily::kempf((PI / (2.0 * b)).powi(2)).unwrap(),
        _ => DeformationFamily::inverse_sqrt(1.0 / (b * b)).unwrap(),
    }
}

fn random_system(rng: &mut ChaCha8Rng) -> TwoBodySystem {
    let b1 = rng.gen_range(2.0..5.0);
    let b2 = rng.gen_range(0.5..0.7 * b1);
    let f1 = random_family(rng, b1);
    let f2 = random_family(rng, b2);
    TwoBodySystem::new(rng.gen_range(0.5..2.0), f1, rng.gen_range(0.5..2.0), f2, 1.0).unwrap()
}

/// `p0` in domain I or in the interior of domain II.
fn random_p0(rng: &mut ChaCha8Rng, sys: &TwoBodySystem, domain_ii: bool) -> f64 {
    let gap = sys.b1() - sys.b2();
    if domain_ii {
        gap + rng.gen_range(0.05..0.8) * 2.0 * sys.b2()
    } else {
        rng.gen_range(-gap..gap)
    }
}

fn criterion_5_quantization_phase() -> bool {
    const TOL: f64 = 1e-8;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut domains = [0usize; 2];
    while accepted < 20 {
        let sys = random_system(&mut rng);
        let in_ii = accepted % 2 == 1;
        let p0 = random_p0(&mut rng, &sys, in_ii);
        let alpha = rng.gen_range(0.3..2.0);
        let delta = rng.gen_range(0.05..0.95);
        let n = rng.gen_range(0..4u32);
        let int = Interaction::coulomb(alpha, delta).unwrap();
        let st = match solve_coulomb(&sys, &int, p0, n, 1e-13) {
            Ok(st) => st,
            Err(Error::NoBoundState(_)) => continue,
            Err(e) => panic!("solve failed: {e}"),
        };
        let wf = build_coulomb_wavefunction(&st, &sys, &int, GRID).unwrap();
        let err = (wf.total_phase() - 2.0 * PI * (n as f64 + delta)).abs();
        worst = worst.max(err);
        domains[in_ii as usize] += 1;
        assert_eq!(st.support.label, if in_ii { DomainLabel::II } else { DomainLabel::I });
        accepted += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < TOL && secs < BUDGET_S;
    report(
        5,
        pass,
        &format!(
            "20 configurations ({} domain I, {} domain II), max phase error {worst:.3e} (< {TOL:e}), {secs:.2} s",
            domains[0], domains[1]
        ),
    );
    pass
}

fn criterion_6_integral_equation_residual() -> bool {
    const TOL: f64 = 1e-6;
    const RATIO: f64 = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for delta_kind in [true, false] {
        let mut accepted = 0;
        while accepted < 10 {
            let sys = random_system(&mut rng);
            let in_ii = rng.gen_bool(0.5);
            let p0 = random_p0(&mut rng, &sys, in_ii);
            let (int, st): (Interaction, BoundState) = if delta_kind {
                let int = Interaction::delta(rng.gen_range(0.2..2.0)).unwrap();
                match solve_delta(&sys, &int, p0, 1e-13) {
                    Ok(st) => (int, st),
                    Err(Error::NoBoundState(_)) => continue,
                    Err(e) => panic!("{e}"),
                }
            } else {
                let int = Interaction::coulomb(rng.gen_range(0.3..2.0), rng.gen_range(0.0..0.95)).unwrap();
                match solve_coulomb(&sys, &int, p0, rng.gen_range(1..4), 1e-13) {
                    Ok(st) => (int, st),
                    Err(Error::NoBoundState(_)) => continue,
                    Err(e) => panic!("{e}"),
                }
            };
            let wf = if delta_kind {
                build_delta_wavefunction(&st, &sys, &int, GRID).unwrap()
            } else {
                build_coulomb_wavefunction(&st, &sys, &int, GRID).unwrap()
            };
            let r = residual_check(&wf, &sys, &int, &st);
            worst = worst.max(r);
            for sign in [-1.0, 1.0] {
                let detuned = BoundState {
                    energy: st.energy + sign * 1e-3 * st.energy.abs(),
                    ..st
                };
                worst_ratio = worst_ratio.min(residual_check(&wf, &sys, &int, &detuned) / r);
            }
            accepted += 1;
        }
    }
    let pass = worst < TOL && worst_ratio >= RATIO;
    report(
        6,
        pass,
        &format!("10 delta + 10 Coulomb states, max residual {worst:.3e} (< {TOL:e}), min detuned/solved ratio {worst_ratio:.3e} (>= {RATIO})"),
    );
    pass
}

/// Support formulas of the three `p0` domains. Domain III is the mirror image
/// of domain II, `[-(b1 + mu1 p0), b2 + mu2 p0]`.
fn table_support(b1: f64, b2: f64, mu1: f64, mu2: f64, p0: f64) -> (f64, f64, DomainLabel) {
    if p0.abs() <= b1 - b2 {
        (-(b2 - mu2 * p0), b2 + mu2 * p0, DomainLabel::I)
    } else if p0 > 0.0 {
        (-(b2 - mu2 * p0), b1 - mu1 * p0, DomainLabel::II)
    } else {
        (-(b1 + mu1 * p0), b2 + mu2 * p0, DomainLabel::III)
    }
}

fn criterion_7_table_oracle() -> bool {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut labels_ok = true;
    for _ in 0..1000 {
        let b2 = rng.gen_range(0.1..10.0);
        let b1 = b2 + rng.gen_range(0.01..10.0);
        let sys = TwoBodySystem::new(
            rng.gen_range(0.1..10.0),
            DeformationFamily::cutoff(b1).unwrap(),
            rng.gen_range(0.1..10.0),
            DeformationFamily::cutoff(b2).unwrap(),
            1.0,
        )
        .unwrap();
        let p0 = rng.gen_range(-(b1 + b2)..(b1 + b2));
        let s = momentum_support(&sys, p0);
        let (c1, c2, label) = table_support(sys.b1(), sys.b2(), sys.mu1(), sys.mu2(), p0);
        worst = worst.max((s.c1 - c1).abs()).max((s.c2 - c2).abs());
        labels_ok &= s.label == label;
    }
    let pass = worst <= TOL && labels_ok;
    report(
        7,
        pass,
        &format!("1000 draws, max endpoint deviation {worst:.3e} (<= {TOL:e}), labels agree: {labels_ok}"),
    );
    pass
}

/// Antiderivative form for the cutoff family, `G^2 = p0^2 + p^2 / (mu1 mu2)`.
fn cutoff_closed_form(mu1mu2: f64, q: f64, c1: f64, c2: f64) -> f64 {
    let r = (mu1mu2 * q).sqrt();
    (mu1mu2 / q).sqrt() * ((c2 / r).atan() - (c1 / r).atan())
}

/// The same expression with the arctan arguments printed as `c / (p0^2 + q^2)`.
fn printed_form(mu1mu2: f64, q: f64, c1: f64, c2: f64) -> f64 {
    (mu1mu2 / q).sqrt() * ((c2 / q).atan() - (c1 / q).atan())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn criterion_8_corrected_closed_form() -> bool {
    const TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut printed_gap: f64 = 0.0;
    for i in 0..100 {
        let b2 = rng.gen_range(0.2..20.0);
        let b1 = if rng.gen_bool(0.3) {
            b2
        } else {
            b2 * rng.gen_range(1.0..4.0)
        };
        let sys = TwoBodySystem::new(
            rng.gen_range(0.2..5.0),
            DeformationFamily::cutoff(b1).unwrap(),
            rng.gen_range(0.2..5.0),
            DeformationFamily::cutoff(b2).unwrap(),
            1.0,
        )
        .unwrap();
        let p0 = rng.gen_range(-0.95..0.95) * (sys.b1() + sys.b2());
        let s = -p0 * p0 + 10f64.powf(rng.gen_range(-3.0..2.0));
        let q = p0 * p0 + s;
        let sup = momentum_support(&sys, p0);
        let mu1mu2 = sys.mu1() * sys.mu2();
        let closed = cutoff_closed_form(mu1mu2, q, sup.c1, sup.c2);
        let numeric = integrate_i1(&sys, p0, s, 1e-13).unwrap().value;
        worst = worst.max((numeric / closed - 1.0).abs());
        printed_gap = printed_gap.max((printed_form(mu1mu2, q, sup.c1, sup.c2) / closed - 1.0).abs());
        if i < 5 {
            let dense = simpson(|p| 1.0 / (p0 * p0 + p * p / mu1mu2 + s), sup.c1, sup.c2, 1_000_000);
            worst_oracle = worst_oracle.max((dense / closed - 1.0).abs());
        }
    }
    let notes = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../NOTES.md");
    let documented = std::fs::read_to_string(&notes)
        .map(|t| t.contains("arctan"))
        .unwrap_or(false);
    let pass = worst < TOL && worst_oracle < 1e-9 && documented;
    report(
        8,
        pass,
        &format!(
            "100 draws, max |I1/closed - 1| = {worst:.3e} (< {TOL:e}); dense-grid oracle agrees to {worst_oracle:.3e}; printed form deviates by up to {printed_gap:.3e}; NOTES.md documents it: {documented}"
        ),
    );
    pass
}

fn main() -> ExitCode {
    let checks: [(u32, fn() -> bool); 8] = [
        (1, criterion_1_undeformed_limits),
        (2, criterion_2_distinct_mass_series_order),
        (3, criterion_3_identical_abs_p0_term),
        (4, criterion_4_inversesqrt_series),
        (5, criterion_5_quantization_phase),
        (6, criterion_6_integral_equation_residual),
        (7, criterion_7_table_oracle),
        (8, criterion_8_corrected_closed_form),
    ];
    let mut failed = Vec::new();
    for (n, check) in checks {
        match catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed.push(n),
            Err(_) => {
                report(n, false, "panicked");
                failed.push(n);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        checks.len() - failed.len(),
        checks.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
