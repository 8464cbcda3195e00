use nalgebra::{SVector, Vector1, Vector3};
use proptest::prelude::*;
use riemann_dc::dcsolve::{dca_solve, DcProblem, StoppingCriterion, SubSolverSpec};
use riemann_dc::duality::*;
use riemann_dc::manifolds::Euclidean;
use riemann_dc::{Error, Execution};

fn half_square(x: &Vector1<f64>) -> f64 {
    0.5 * x[0] * x[0]
}

/// g = x⁴ + x², h = 2x², f = x⁴ − x² with minima ±1/√2 and value −1/4.
fn quartic() -> DcProblem<Euclidean<1>> {
    DcProblem::new(
        Euclidean::<1>,
        |x: &Vector1<f64>| x[0].powi(4) + x[0] * x[0],
        |x: &Vector1<f64>| Vector1::new(4.0 * x[0].powi(3) + 2.0 * x[0]),
        |x: &Vector1<f64>| 2.0 * x[0] * x[0],
        |x: &Vector1<f64>| Vector1::new(4.0 * x[0]),
    )
}

fn default_grid() -> Grid1D {
    Grid1D::new(-10.0, 10.0, 20001).unwrap()
}

fn dca_trace(x0: f64) -> riemann_dc::dcsolve::SolverTrace<Vector1<f64>> {
    let sub = SubSolverSpec::trust_region(StoppingCriterion::max_iter(500).with_grad_norm(1e-12));
    dca_solve(&quartic(), Vector1::new(x0), &sub, &StoppingCriterion::max_iter(60).with_grad_norm(1e-10))
        .unwrap()
        .1
}

#[test]
fn conjugate_of_half_square_at_origin() {
    let m = Euclidean::<1>;
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let pts = grid.points1();
    for y in [-3.0, -1.0, 0.0, 0.37, 2.5] {
        let c = conjugate_grid(half_square, &m, &pts, &Vector1::zeros(), &Vector1::new(y), Execution::Sequential).unwrap();
        // the sup misses the true maximizer y by at most half a spacing
        let err_bound = 0.5 * (0.5 * grid.spacing()).powi(2);
        assert!(c.value <= 0.5 * y * y + 1e-15);
        assert!(0.5 * y * y - c.value <= err_bound + 1e-15, "y={y}");
    }
}

#[test]
fn conjugate_at_shifted_base() {
    // f*(p, X) = f*(X) − ⟨X, p⟩ = 1/2 − 1 at p = 1, X = 1
    let m = Euclidean::<1>;
    let pts = default_grid().points1();
    let c = conjugate_grid(half_square, &m, &pts, &Vector1::new(1.0), &Vector1::new(1.0), Execution::Parallel).unwrap();
    assert!((c.value + 0.5).abs() <= 1e-6);
    assert!((c.maximizer[0] - 1.0).abs() <= 1e-3);
}

#[test]
fn conjugate_value_dominates_every_sample() {
    let m = Euclidean::<1>;
    let pts = Grid1D::new(-4.0, 4.0, 401).unwrap().points1();
    let f = |x: &Vector1<f64>| x[0].powi(4) - 3.0 * x[0];
    let (p, x) = (Vector1::new(0.3), Vector1::new(-1.2));
    let c = conjugate_grid(f, &m, &pts, &p, &x, Execution::Sequential).unwrap();
    for q in &pts {
        assert!(c.value >= x[0] * (q[0] - p[0]) - f(q));
    }
}

#[test]
fn parallel_and_sequential_conjugates_agree() {
    let m = Euclidean::<1>;
    let pts = default_grid().points1();
    let f = |x: &Vector1<f64>| (x[0] - 0.2).abs() + x[0].powi(2);
    for y in [-2.0, 0.0, 1.5] {
        let a = conjugate_grid(f, &m, &pts, &Vector1::new(0.5), &Vector1::new(y), Execution::Sequential).unwrap();
        let b = conjugate_grid(f, &m, &pts, &Vector1::new(0.5), &Vector1::new(y), Execution::Parallel).unwrap();
        assert_eq!((a.value, a.maximizer), (b.value, b.maximizer));
    }
}

proptest! {
    #[test]
    fn refinement_never_decreases(y in -5.0f64..5.0, p in -2.0f64..2.0, count in 3usize..300) {
        let m = Euclidean::<1>;
        let g = Grid1D::new(-6.0, 6.0, count).unwrap();
        let f = |x: &Vector1<f64>| x[0].powi(4) + x[0] * x[0];
        let c = conjugate_grid(f, &m, &g.points1(), &Vector1::new(p), &Vector1::new(y), Execution::Sequential).unwrap();
        let r = conjugate_grid(f, &m, &g.refined().points1(), &Vector1::new(p), &Vector1::new(y), Execution::Sequential).unwrap();
        prop_assert!(r.value >= c.value);
    }

    #[test]
    fn fenchel_young_gap_is_nonnegative_up_to_grid_error(y in -3.0f64..3.0, p in -1.0f64..1.0, q in -3.0f64..3.0) {
        let m = Euclidean::<1>;
        let g = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let f = |x: &Vector1<f64>| x[0].powi(4) + x[0] * x[0];
        let c = conjugate_grid(f, &m, &g.points1(), &Vector1::new(p), &Vector1::new(y), Execution::Sequential).unwrap();
        let gap = fenchel_young_gap(f, &m, &c, &Vector1::new(q));
        prop_assert!(gap >= -10.0 * g.spacing());
    }
}

#[test]
fn fenchel_young_equality_cases() {
    let m = Euclidean::<1>;
    let pts = default_grid().points1();
    let c = conjugate_grid(half_square, &m, &pts, &Vector1::zeros(), &Vector1::new(1.0), Execution::Sequential).unwrap();
    assert_eq!(fenchel_young_gap(half_square, &m, &c, &c.maximizer), 0.0);
    // X = 1 is the gradient of x²/2 at q = 1
    assert!(fenchel_young_gap(half_square, &m, &c, &Vector1::new(1.0)).abs() <= 1e-12);
    assert!(fenchel_young_gap(half_square, &m, &c, &Vector1::new(-0.4)) > 0.5);
}

#[test]
fn primal_and_dual_grid_values_agree() {
    let prob = quartic();
    let primal = default_grid().points1();
    let dual = Grid1D::new(-10.0, 10.0, 2001).unwrap().points1();
    let pv = primal_grid_value(&prob, &primal, Execution::Parallel).unwrap();
    let dv = dual_grid_value(&prob, &primal, &dual, Execution::Parallel).unwrap();
    assert!((pv + 0.25).abs() <= 1e-6, "{pv}");
    assert!((pv - dv).abs() <= 1e-3, "{pv} vs {dv}");
}

#[test]
fn sandwich_holds_along_dca() {
    let trace = dca_trace(3.0);
    assert!(trace.iterations() > 3);
    let report = primal_dual_sandwich_check(&trace, &quartic(), &[default_grid()], 1e-3, Execution::Parallel).unwrap();
    assert_eq!(report.rows.len(), trace.iterations());
    assert!(report.holds(), "max residual {}", report.max_residual());
    assert!(report.final_gap <= 1e-3);
    for r in &report.rows {
        assert!(r.primal_next <= r.primal + 1e-12);
    }
}

#[test]
fn sandwich_stationary_start() {
    let trace = dca_trace(std::f64::consts::FRAC_1_SQRT_2);
    let report = primal_dual_sandwich_check(&trace, &quartic(), &[default_grid()], 1e-3, Execution::Sequential).unwrap();
    assert!(report.holds());
    assert!(report.final_gap <= 1e-3);
    for r in &report.rows {
        assert!((r.dual - r.primal).abs() <= 1e-3 && (r.dual - r.primal_next).abs() <= 1e-3);
    }
}

#[test]
fn tampered_conjugate_breaks_sandwich() {
    let trace = dca_trace(3.0);
    let samples = default_grid().points1();
    let report = sandwich_on_samples(&trace, &quartic(), &samples, 1e-3, Execution::Parallel, |d| -d).unwrap();
    assert!(!report.holds());
}

#[test]
fn two_dimensional_sandwich() {
    // separable sum of two quartic problems
    let prob = DcProblem::new(
        Euclidean::<2>,
        |x: &SVector<f64, 2>| x.iter().map(|v| v.powi(4) + v * v).sum(),
        |x: &SVector<f64, 2>| x.map(|v| 4.0 * v.powi(3) + 2.0 * v),
        |x: &SVector<f64, 2>| 2.0 * x.norm_squared(),
        |x: &SVector<f64, 2>| 4.0 * x,
    );
    let sub = SubSolverSpec::trust_region(StoppingCriterion::max_iter(500).with_grad_norm(1e-12));
    let (_, trace) =
        dca_solve(&prob, SVector::from([2.0, -1.5]), &sub, &StoppingCriterion::max_iter(30).with_grad_norm(1e-9)).unwrap();
    let g = Grid1D::new(-3.0, 3.0, 601).unwrap();
    let report = primal_dual_sandwich_check(&trace, &prob, &[g, g], 1e-1, Execution::Parallel).unwrap();
    assert!(report.holds(), "{}", report.max_residual());
}

#[test]
fn higher_dimensions_are_rejected() {
    let g = Grid1D::new(0.0, 1.0, 3).unwrap();
    assert_eq!(product_grid(&[g, g, g]).unwrap_err(), Error::GridIntractable(3));
    let prob = DcProblem::new(
        Euclidean::<3>,
        |x: &Vector3<f64>| x.norm_squared(),
        |x: &Vector3<f64>| 2.0 * x,
        |_: &Vector3<f64>| 0.0,
        |_: &Vector3<f64>| Vector3::zeros(),
    );
    let sub = SubSolverSpec::trust_region(StoppingCriterion::max_iter(50).with_grad_norm(1e-12));
    let (_, trace) = dca_solve(&prob, Vector3::new(1.0, 0.0, 0.0), &sub, &StoppingCriterion::max_iter(3)).unwrap();
    let err = primal_dual_sandwich_check(&trace, &prob, &[g, g, g], 1e-3, Execution::Sequential).unwrap_err();
    assert_eq!(err, Error::GridIntractable(3));
    assert!(conjugate_grid(half_square, &Euclidean::<1>, &[], &Vector1::zeros(), &Vector1::zeros(), Execution::Parallel).is_err());
}
