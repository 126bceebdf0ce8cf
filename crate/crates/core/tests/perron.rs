use std::sync::Arc;
use translator_lab::closed_form::{strip_exact_solution, GrimReaper};
use translator_lab::elliptic::*;
use translator_lab::geometry::*;
use translator_lab::perron::*;
use translator_lab::Error;

fn strip_grid(m: f64, l: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::new(&Domain::strip(m, Some(l)).unwrap(), n).unwrap())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn centre_disk() -> Disk {
    Disk { center: Point::new(0.3, 0.1), radius: 0.6 }
}

#[test]
fn lifting_zero_goes_negative() {
    let g = strip_grid(1.0, 2.0, 40);
    let u = ScalarField::from_fn(g.clone(), |_| 0.0);
    let d = centre_disk();
    let lifted = lift_disk(&u, &d, &SolveOptions::default()).unwrap();
    let inside = g.unknowns_in_disk(d.center, d.radius);
    assert!(!inside.is_empty());
    for k in 0..g.num_unknowns() {
        if inside.binary_search(&k).is_ok() {
            assert!(lifted.values()[k] < 0.0);
        } else {
            assert_eq!(lifted.values()[k], 0.0);
        }
    }
}

#[test]
fn lifting_a_discrete_solution_changes_nothing() {
    let s = strip_exact_solution(1.0, 0.0).unwrap();
    let g = strip_grid(1.0, 2.0, 40);
    let solved = continuity_solve(&|p| s.eval(p), g.clone(), &SolveOptions::default()).unwrap().solution;
    let lifted = lift_disk(&solved, &centre_disk(), &SolveOptions::default()).unwrap();
    assert!(sup_diff(lifted.values(), solved.values()) < 1e-9);
    // The sampled closed form moves only by the discretisation error.
    let exact = ScalarField::from_fn(g.clone(), |p| s.eval(p));
    let moved = lift_disk(&exact, &centre_disk(), &SolveOptions::default()).unwrap();
    assert!(sup_diff(moved.values(), exact.values()) < 10.0 * g.h() * g.h());
}

#[test]
fn lifting_the_minimal_solution_lowers_it() {
    let g = strip_grid(1.0, 2.0, 40);
    let v0 = newton_solve(&|p| p.x * p.x / 8.0, &OperatorParams::minimal(), g, &SolveOptions::default()).unwrap().solution;
    let lifted = lift_disk(&v0, &centre_disk(), &SolveOptions::default()).unwrap();
    assert!(max_diff(lifted.values(), v0.values()) <= 0.0);
}

#[test]
fn lifting_preserves_order() {
    let g = strip_grid(1.0, 2.0, 32);
    let h2 = g.h() * g.h();
    let low = ScalarField::from_fn(g.clone(), |p| 0.1 * p.x - 0.2 * p.y * p.y);
    let high = ScalarField::from_fn(g.clone(), |p| 0.1 * p.x - 0.2 * p.y * p.y + 0.05 * (1.0 + p.x.sin()));
    for d in [centre_disk(), Disk { center: Point::new(-1.2, -0.2), radius: 0.5 }] {
        let (a, b) = (lift_disk(&low, &d, &SolveOptions::default()).unwrap(), lift_disk(&high, &d, &SolveOptions::default()).unwrap());
        assert!(max_diff(a.values(), b.values()) <= 10.0 * h2);
    }
}

#[test]
fn lift_requires_an_inner_disk() {
    let g = strip_grid(1.0, 2.0, 24);
    let u = ScalarField::from_fn(g, |_| 0.0);
    let d = Disk { center: Point::new(0.0, 0.5), radius: 0.6 };
    assert!(matches!(lift_disk(&u, &d, &SolveOptions::default()), Err(Error::BadParameter(_))));
}

#[test]
fn strip_sweeps_descend_within_barriers() {
    let g = strip_grid(1.0, 3.0, 48);
    let h2 = g.h() * g.h();
    let f = |x: f64| x * x / 8.0;
    let mut state = perron_strip(&f, g, &PerronOptions::default()).unwrap();
    assert!(state.last_change < 1e-8);
    for rec in &state.trace {
        assert!(rec.max_rise <= 1e-10, "{rec:?}");
        assert!(rec.lower_violation <= 10.0 * h2, "{rec:?}");
        assert!(rec.upper_violation <= 10.0 * h2, "{rec:?}");
    }
    let before = state.iterate.values().to_vec();
    let extra = state.sweep().unwrap();
    assert!(extra.sup_change < 2e-8);
    assert!(sup_diff(&before, state.iterate.values()) < 2e-8);
}

#[test]
fn strip_limit_agrees_with_direct_solve() {
    let g = strip_grid(1.0, 3.0, 48);
    let h = g.h();
    let f = |x: f64| x * x / 8.0;
    let state = perron_strip(&f, g.clone(), &PerronOptions::default()).unwrap();
    let direct = newton_solve_from(state.upper.clone(), &OperatorParams::translator(1.0), &SolveOptions::default()).unwrap();
    let gap = sup_diff(state.iterate.values(), direct.solution.values());
    assert!(gap < 5.0 * (1e-8f64).max(h * h), "{gap}");
}

#[test]
fn affine_data_recovers_tilted_reaper() {
    let slope = 0.3;
    let g = strip_grid(1.0, 3.0, 48);
    let state = perron_strip(&|x| slope * x, g.clone(), &PerronOptions::default()).unwrap();
    let w = GrimReaper::tangent(0.0, 0.0, slope, 1.0).unwrap();
    let mut err = 0.0f64;
    for k in 0..g.num_unknowns() {
        let p = g.unknown_point(k);
        if p.x.abs() <= 1.5 {
            err = err.max((state.iterate.values()[k] - w.eval(p).unwrap()).abs());
        }
    }
    assert!(err < 2e-2, "{err}");
}

#[test]
fn strip_rejects_bad_input() {
    let g = strip_grid(1.0, 3.0, 24);
    assert!(matches!(perron_strip(&|x: f64| x.sin(), g.clone(), &PerronOptions::default()), Err(Error::NotConvex { .. })));
    let wide = strip_grid(1.6, 3.0, 24);
    assert!(matches!(perron_strip(&|_| 0.0, wide, &PerronOptions::default()), Err(Error::NotInStrip { .. })));
    let disk = Arc::new(Grid::new(&Domain::disk(Point::default(), 1.0).unwrap(), 16).unwrap());
    assert!(matches!(perron_strip(&|_| 0.0, disk, &PerronOptions::default()), Err(Error::BadParameter(_))));
    let short = PerronOptions { max_sweeps: 2, ..PerronOptions::default() };
    assert!(matches!(perron_strip(&|x| x * x, g, &short), Err(Error::NoConvergence { sweeps: 2, .. })));
}

#[test]
fn half_strip_is_sandwiched() {
    let d = Domain::truncated(Generator::HalfStrip, 1.0, 6.0, Frame::default()).unwrap();
    let g = Arc::new(Grid::new(&d, 48).unwrap());
    let h = g.h();
    let state = perron_unbounded(g.clone(), &PerronOptions::default()).unwrap();
    let floor = 1f64.cos().ln();
    for k in 0..g.num_unknowns() {
        let v = state.iterate.values()[k];
        assert!(v >= floor - 10.0 * h * h && v <= 0.0, "{v} at {:?}", g.unknown_point(k));
        if g.distance(k) > 3.0 * h {
            assert!(v < 0.0);
        }
    }
    // Near the lateral edge x = 0 the values return to the data.
    let near = (0..g.num_unknowns()).filter(|&k| g.unknown_point(k).x < 1.5 * h).map(|k| state.iterate.values()[k]);
    assert!(near.fold(0.0f64, |a, v| a.max(v.abs())) < 0.25);
}

#[test]
fn tilted_half_strip_uses_its_own_frame() {
    let frame = Frame { angle: 0.6, offset: Point::new(1.0, -0.5) };
    let d = Domain::truncated(Generator::RoundEnd, 0.9, 4.0, frame).unwrap();
    let g = Arc::new(Grid::new(&d, 48).unwrap());
    let state = perron_unbounded(g.clone(), &PerronOptions::default()).unwrap();
    let floor = 0.9f64.cos().ln();
    assert!(state.iterate.values().iter().all(|&v| v >= floor - 1e-2 && v <= 0.0));
}

#[test]
fn full_strip_recovers_closed_form() {
    let g = strip_grid(1.0, 3.0, 48);
    let state = perron_unbounded(g.clone(), &PerronOptions::default()).unwrap();
    let s = strip_exact_solution(1.0, 0.0).unwrap();
    let mut err = 0.0f64;
    for k in 0..g.num_unknowns() {
        err = err.max((state.iterate.values()[k] - s.eval(g.unknown_point(k))).abs());
    }
    assert!(err < 5.0 * g.h() * g.h(), "{err}");
}

#[test]
fn schedule_is_canonical() {
    let g = strip_grid(1.0, 2.0, 32);
    let a = disk_cover(&g, 1.0, 0.4, 0.5);
    let b = disk_cover(&g, 1.0, 0.4, 0.5);
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| (w[0].center.y, w[0].center.x) <= (w[1].center.y, w[1].center.x)));
}
