use translator_lab::radial::*;
use translator_lab::Error;

/// Residual of the radial equation for the truncated series at radius `r`.
fn series_residual(mu: f64, a: f64, c4: f64, c6: f64, r: f64) -> f64 {
    let du = 2.0 * a * r + 4.0 * c4 * r.powi(3) + 6.0 * c6 * r.powi(5);
    let d2u = 2.0 * a + 12.0 * c4 * r * r + 30.0 * c6 * r.powi(4);
    let w = 1.0 + du * du;
    d2u / w + du / r - 1.0 - mu * w.sqrt()
}

/// Fits the coefficient multiplying `r^k` in the residual by solving the
/// linear equation in the unknown coefficient at a small radius.
fn solve_linear(f: impl Fn(f64) -> f64) -> f64 {
    let (f0, f1) = (f(0.0), f(1.0));
    -f0 / (f1 - f0)
}

#[test]
fn series_coefficients_match_substitution() {
    // Frozen from the substitution below: c4 = 1/128, c6 = 1/4608 at mu = 0.
    let (a, c4, c6) = series_coefficients(0.0);
    assert_eq!((a, c4, c6), (0.25, 0.0078125, 1.0 / 4608.0));
    for mu in [0.0, 0.3, 0.5, 1.0, 2.0] {
        let (a, c4, c6) = series_coefficients(mu);
        let r = 1e-2;
        let a_num = solve_linear(|x| series_residual(mu, x, 0.0, 0.0, 1e-6));
        assert!((a_num - a).abs() < 1e-9, "mu={mu}: a {a_num} vs {a}");
        let c4_num = solve_linear(|x| series_residual(mu, a, x, 0.0, r) / (r * r));
        assert!((c4_num - c4).abs() < 1e-4 * (1.0 + c4.abs()), "mu={mu}: c4 {c4_num} vs {c4}");
        let c6_num = solve_linear(|x| series_residual(mu, a, c4, x, r) / r.powi(4));
        assert!((c6_num - c6).abs() < 1e-3 * (1.0 + c6.abs()), "mu={mu}: c6 {c6_num} vs {c6}");
        // The remainder is O(r^6): halving r divides it by about 64.
        let ratio = series_residual(mu, a, c4, c6, 0.1) / series_residual(mu, a, c4, c6, 0.05);
        assert!((ratio - 64.0).abs() < 4.0, "mu={mu}: ratio {ratio}");
    }
}

#[test]
fn picard_reaches_fixed_point() {
    let p = picard_bowl(0.2, 30).unwrap();
    assert!(p.fixed_point_residual < 1e-12, "{}", p.fixed_point_residual);
    assert_eq!((p.profile.u[0], p.profile.du[0]), (0.0, 0.0));
    for w in p.distances.windows(2) {
        assert!(w[1] <= w[0] || w[0] < 1e-14);
    }
    let d2 = second_derivative_at_origin(&p.profile, 16);
    assert!((d2 - 0.5).abs() < 1e-6, "{d2}");
}

#[test]
fn picard_and_rk_agree() {
    let p = picard_bowl(0.2, 30).unwrap();
    let b = bowl_profile(0.2, 1e-3).unwrap();
    let sup = p.profile.r.iter().zip(&p.profile.u).map(|(&r, &u)| (b.eval(r).unwrap() - u).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-8, "{sup}");
    let (_, c4, _) = series_coefficients(0.0);
    let u01 = b.eval(0.1).unwrap();
    assert!((u01 - (0.0025 + c4 * 1e-4)).abs() < 1e-8, "{u01}");
}

#[test]
fn bowl_richardson() {
    let a = bowl_profile(1.0, 1e-3).unwrap().end_value();
    let b = bowl_profile(1.0, 5e-4).unwrap().end_value();
    assert!((a - b).abs() < 1e-8, "{a} {b}");
}

fn fd4_second(u: &[f64], i: usize, h: f64) -> f64 {
    (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h)
}

#[test]
fn bowl_satisfies_equation_at_nodes() {
    let h = 1e-3;
    let b = bowl_profile(2.0, h).unwrap();
    let mut worst = 0.0f64;
    for i in 20..b.r.len() - 2 {
        let res = fd4_second(&b.u, i, h) - radial_rhs(b.r[i], b.du[i], 0.0);
        worst = worst.max(res.abs());
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn bowl_is_increasing_and_convex() {
    let b = bowl_profile(5.0, 1e-3).unwrap();
    assert!(b.u.windows(2).all(|w| w[1] > w[0]));
    for i in 1..b.r.len() {
        assert!(radial_rhs(b.r[i], b.du[i], 0.0) > 0.0, "r = {}", b.r[i]);
    }
}

#[test]
fn winglike_starts_flat() {
    let w = winglike_profile(1.0, 3.0, 1e-3).unwrap();
    assert_eq!(w.du[0], 0.0);
    assert_eq!(w.eval_du(1.0), Some(0.0));
    // u''(r0) = 1 gives u ≈ (r - r0)²/2 near the neck.
    let s = 1e-2;
    let u = w.eval(1.0 + s).unwrap();
    assert!((u / (s * s / 2.0) - 1.0).abs() < 1e-2, "{u}");
    let w2 = winglike_profile(2.0, 3.0, 1e-3).unwrap();
    assert!(w2.u.windows(2).all(|p| p[1] > p[0]));
    assert!(w2.du[1..].iter().all(|&d| d > 0.0));
}

#[test]
fn initial_slope_brackets_profile() {
    let eps = 1e-3;
    let base = integrate_radial(1.0, 0.0, 0.0, 0.0, 2.0, 1e-3).unwrap();
    let up = integrate_radial(1.0, 0.0, eps, 0.0, 2.0, 1e-3).unwrap();
    let down = integrate_radial(1.0, 0.0, -eps, 0.0, 2.0, 1e-3).unwrap();
    for i in 1..base.r.len() {
        assert!(down.u[i] < base.u[i] && base.u[i] < up.u[i], "r = {}", base.r[i]);
        assert!((up.u[i] - down.u[i]).abs() < 10.0 * eps);
    }
}

#[test]
fn mu_radial_reduces_to_bowl() {
    let a = mu_radial_profile(0.0, 1.0, 1e-3).unwrap();
    let b = bowl_profile(1.0, 1e-3).unwrap();
    for (x, y) in a.u.iter().zip(&b.u) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn mu_radial_steepens_towards_cylinder() {
    // Slopes frozen from an independent adaptive integration of the angle form
    // (r sin ψ)' = r cos ψ + μ r.
    let p = mu_radial_profile(0.5, 1.99, 1e-4).unwrap();
    let slopes = [(1.0, 0.9320900618153162), (1.5, 2.1072477688789544), (1.9, 7.641320479390106), (1.99, 19.552795164170785)];
    for (r, want) in slopes {
        let got = p.eval_du(r).unwrap();
        assert!((got - want).abs() < 1e-6 * want, "r={r}: {got} vs {want}");
    }
    assert!(p.du.windows(2).all(|w| w[1] > w[0]));
    assert!(p.eval_du(1.99).unwrap() > 2.5 * p.eval_du(1.9).unwrap());
    assert!(matches!(mu_radial_profile(0.5, 2.0, 1e-3), Err(Error::BadParameter(_))));
}

#[test]
fn mu_radial_curvature_at_origin() {
    for mu in [0.5, 1.0, 2.0] {
        let p = mu_radial_profile(mu, 0.5, 1e-4).unwrap();
        let d2 = second_derivative_at_origin(&p, 8);
        assert!((d2 - (1.0 + mu) / 2.0).abs() < 1e-5, "mu={mu}: {d2}");
    }
}

#[test]
fn bowl_rejects_coarse_step() {
    assert!(matches!(bowl_profile(1.0, 0.02), Err(Error::StepTooLarge { .. })));
}

#[test]
fn picard_rejects_violated_bound() {
    assert!(picard_bowl(1.5, 10).is_err());
}
