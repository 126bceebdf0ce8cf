use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use translator_lab::analysis::check_comparison;
use translator_lab::elliptic::*;
use translator_lab::geometry::*;

fn grids() -> &'static [Arc<Grid>; 2] {
    static G: OnceLock<[Arc<Grid>; 2]> = OnceLock::new();
    G.get_or_init(|| {
        let d = Domain::disk(Point::default(), 1.0).unwrap();
        let s = Domain::square(Point::default(), 2.0).unwrap();
        [Arc::new(Grid::new(&d, 32).unwrap()), Arc::new(Grid::new(&s, 32).unwrap())]
    })
}

#[derive(Clone, Debug)]
struct Data {
    base: [f64; 5],
    gap: [f64; 4],
}

impl Data {
    fn lower(&self, p: Point) -> f64 {
        let [c, a, b, k, s] = self.base;
        c + a * p.x + b * p.y + s * (k * PI * p.x + p.y).sin()
    }

    fn upper(&self, p: Point) -> f64 {
        let [c, a, k, phase] = self.gap;
        self.lower(p) + c + a * (1.0 + (k * p.x - p.y + phase).sin()) / 2.0
    }
}

fn data() -> impl Strategy<Value = Data> {
    (
        (-1.0..1.0, -0.5..0.5, -0.5..0.5, 0.5..2.0, -0.3..0.3),
        (0.0..0.2, 0.0..0.5, 0.5..3.0, 0.0..6.3),
    )
        .prop_map(|((c, a, b, k, s), (g0, g1, gk, ph))| Data { base: [c, a, b, k, s], gap: [g0, g1, gk, ph] })
}

fn solve(phi: &dyn Fn(Point) -> f64, g: &Arc<Grid>) -> ScalarField {
    let p = OperatorParams::translator(1.0);
    match newton_solve(phi, &p, g.clone(), &SolveOptions::default()) {
        Ok(r) => r.solution,
        Err(_) => continuity_solve(phi, g.clone(), &SolveOptions::default()).unwrap().solution,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ordered_boundary_data_give_ordered_solutions(d in data(), which in 0usize..2) {
        let g = &grids()[which];
        let u1 = solve(&|p| d.lower(p), g);
        let u2 = solve(&|p| d.upper(p), g);
        let r = check_comparison(&u1, &u2, &OperatorParams::translator(1.0)).unwrap();
        prop_assert!(r.boundary_violation <= 0.0);
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn vertical_shift_commutes_with_solve(d in data(), c in -5.0..5.0f64, which in 0usize..2) {
        let g = &grids()[which];
        let u = solve(&|p| d.lower(p), g);
        let v = solve(&|p| d.lower(p) + c, g);
        for (a, b) in u.values().iter().zip(v.values()) {
            prop_assert!((b - a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobian_agrees_with_difference_quotient(
        d in data(),
        v in proptest::collection::vec(-1.0..1.0f64, 16),
        mode in 0usize..3,
        which in 0usize..2,
    ) {
        let g = &grids()[which];
        let p = [OperatorParams::translator(0.8), OperatorParams::weighted(1.0, 0.3), OperatorParams::serrin(1.0, 0.6, 2.5)][mode];
        let u = ScalarField::from_fn(g.clone(), |q| d.lower(q) + 0.2 * q.x * q.y);
        let dir: Vec<f64> = (0..g.num_unknowns()).map(|k| v[k % v.len()]).collect();
        let jv = jacobian_apply(&u, &p, &dir);
        let eps = 1e-6;
        let shifted = |s: f64| {
            let mut w = u.clone();
            for (x, dv) in w.values_mut().iter_mut().zip(&dir) {
                *x += s * dv;
            }
            residual_values(&w, &p)
        };
        let (fp, fm) = (shifted(eps), shifted(-eps));
        let scale = jv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 0..jv.len() {
            prop_assert!(((fp[k] - fm[k]) / (2.0 * eps) - jv[k]).abs() <= 1e-6 * scale);
        }
    }
}
