use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use translator_lab::closed_form::*;
use translator_lab::{Error, Point};

fn tilts() -> impl Iterator<Item = f64> {
    (0..21).map(|i| -1.5 + 3.0 * (i as f64 + 0.5) / 21.0)
}

#[test]
fn reapers_solve_the_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for theta in tilts() {
        let g = GrimReaper::new(theta, 0.3).unwrap();
        let hw = g.half_width();
        for _ in 0..100 {
            let p = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-0.999..0.999) * hw);
            let r = g.residual(p).unwrap();
            assert!(r.abs() < 1e-10, "theta={theta} p={p:?} residual={r}");
        }
    }
}

#[test]
fn offset_is_a_vertical_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for theta in tilts() {
        let (g0, ga) = (GrimReaper::new(theta, 0.0).unwrap(), GrimReaper::new(theta, 2.5).unwrap());
        for _ in 0..20 {
            let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.9..0.9) * g0.half_width());
            assert_eq!(ga.eval(p).unwrap(), g0.eval(p).unwrap() + 2.5);
        }
    }
}

#[test]
fn tilt_part_is_even_in_y() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for theta in tilts() {
        let g = GrimReaper::new(theta, -1.0).unwrap();
        for _ in 0..20 {
            let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.9..0.9) * g.half_width());
            let q = Point::new(p.x, -p.y);
            let even = |p: Point| g.eval(p).unwrap() - theta.tan() * p.x;
            assert!((even(p) - even(q)).abs() < 1e-12);
        }
    }
}

#[test]
fn strips_nest_with_tilt() {
    let widths: Vec<f64> = (0..20).map(|i| GrimReaper::new(i as f64 * 0.07, 0.0).unwrap().half_width()).collect();
    assert!(widths.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(widths[0], PI / 2.0);
}

#[test]
fn perturbed_reaper_is_not_a_solution() {
    let g = GrimReaper::new(0.0, 0.0).unwrap();
    let p = Point::new(0.0, 0.5);
    let (gr, hs) = (g.gradient(p).unwrap(), g.hessian(p).unwrap());
    let scaled = divergence_residual(gr * 1.1, [1.1 * hs[0], 1.1 * hs[1], 1.1 * hs[2]]);
    // Oracle: for 1.1 w the residual is 1.1 w''/(1+1.21 w'^2)^{3/2} - 1/sqrt(1+1.21 w'^2).
    let wp = 0.5f64.tan();
    let wpp = 1.0 + wp * wp;
    let s = 1.0 + 1.21 * wp * wp;
    let want = 1.1 * wpp / s.powf(1.5) - 1.0 / s.sqrt();
    assert!((scaled - want).abs() < 1e-14, "{scaled} vs {want}");
    assert!(want.abs() > 1e-2);
}

#[test]
fn guards_the_strip_edge() {
    let g = GrimReaper::new(0.0, 0.0).unwrap();
    assert!(matches!(g.eval(Point::new(0.0, PI / 2.0)), Err(Error::OutOfDomain { .. })));
    assert!(matches!(g.residual(Point::new(1.0, -2.0)), Err(Error::OutOfDomain { .. })));
    assert!(GrimReaper::new(PI / 2.0, 0.0).is_err());
}

#[test]
fn strip_solution_values() {
    let s = strip_exact_solution(1.0, 0.0).unwrap();
    assert!((s.eval(Point::default()) - 1f64.cos().ln()).abs() < 1e-15);
    assert!((s.eval(Point::default()) + 0.6156264703860141).abs() < 1e-15);
    assert!(s.eval(Point::new(7.0, 1.0)).abs() < 1e-15);
    let t = strip_exact_solution(0.5, 2.0).unwrap();
    assert!((t.eval(Point::default()) - (0.5f64.cos().ln() + 2.0)).abs() < 1e-15);
    assert!(matches!(strip_exact_solution(1.6, 0.0), Err(Error::BadParameter(_))));
}

#[test]
fn tangent_reaper_touches_line() {
    for (x0, f0, slope) in [(0.0, 0.0, 0.0), (1.0, 0.125, 0.25), (-2.0, 3.0, -1.5)] {
        let g = GrimReaper::tangent(x0, f0, slope, 1.0).unwrap();
        let p = Point::new(x0, 1.0);
        assert!((g.eval(p).unwrap() - f0).abs() < 1e-12);
        assert!((g.gradient(p).unwrap().x - slope).abs() < 1e-12);
        assert!((g.theta().tan() - slope).abs() < 1e-12);
    }
}
