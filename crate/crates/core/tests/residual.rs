use curved_dirac::conformal::ConformalFactor;
use curved_dirac::discrete::{residual, residual_with_boundary, Boundary, Grid};
use curved_dirac::zeromode::{Branch, PhysicalParams, SpinorSolution};
use curved_dirac::Error;

fn setup() -> (PhysicalParams, ConformalFactor, SpinorSolution) {
    let p = PhysicalParams::new(0.0, 1.0, 0.0, 1.0, Branch::Plus).unwrap();
    let omega = ConformalFactor::polynomial_even(1.0, 1.0, 1).unwrap();
    let sol = SpinorSolution::new(p, omega.clone()).unwrap();
    (p, omega, sol)
}

#[test]
fn parabolic_factor_converges_at_second_order() {
    let (p, omega, sol) = setup();
    let r: Vec<f64> = [4001, 8001, 16001, 32001]
        .iter()
        .map(|&n| residual(&p, &omega, &Grid::symmetric(5.0, n).unwrap(), &sol).unwrap())
        .collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.9..4.1).contains(&ratio), "{r:?}");
    }
    // leading truncation term h^2 (lambda Omega_max)^3 / 6 at n = 4001
    let h: f64 = 10.0 / 4000.0;
    let predicted = h * h * 26f64.powi(3) / 6.0;
    assert!((r[0] / predicted - 1.0).abs() < 0.05, "{} vs {predicted}", r[0]);
    assert!(r[3] < 1e-3);
}

#[test]
fn periodic_and_dirichlet_agree_in_the_interior() {
    let (p, omega, sol) = setup();
    let g = Grid::symmetric(3.0, 2001).unwrap();
    let a = residual_with_boundary(&p, &omega, &g, &sol, Boundary::Dirichlet).unwrap();
    let b = residual_with_boundary(&p, &omega, &g, &sol, Boundary::Periodic).unwrap();
    assert_eq!(a, b);
}

#[test]
fn inadmissible_mode_still_solves_the_ode() {
    let p = PhysicalParams::new(1.0, 0.5, 0.0, 1.0, Branch::Plus).unwrap();
    let omega = ConformalFactor::cosh_power(1.0, 1).unwrap();
    let sol = SpinorSolution::new(p, omega.clone()).unwrap();
    // exponentially growing, but the ODE is still met to second order
    let g = Grid::symmetric(3.0, 4001).unwrap();
    let coarse = residual(&p, &omega, &g, &sol).unwrap();
    let fine = residual(&p, &omega, &g.refined(), &sol).unwrap();
    assert!(coarse < 1e-3, "{coarse}");
    assert!((3.9..4.1).contains(&(coarse / fine)), "{coarse} {fine}");
}

#[test]
fn coarse_grid_is_rejected() {
    let (p, omega, sol) = setup();
    let g = Grid::symmetric(5.0, 101).unwrap();
    assert!(matches!(residual(&p, &omega, &g, &sol), Err(Error::UnderResolved(_))));
}
