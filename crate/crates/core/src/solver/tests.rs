use super::*;
use crate::airy::constant_ca;
use crate::discrete::{extend_halfline, DomainTag, SampledFunction, SpaceTimeField};
use crate::fractional::{gamma_function, riemann_liouville};
use crate::linear::evolved_trace;
use crate::{Complex64, Error};

fn small_config() -> SolverConfig {
    SolverConfig {
        half_width: 20.0,
        x_max: 10.0,
        sponge_width: 6.0,
        n_x: 512,
        t_final: 0.5,
        n_t: 201,
        window_t0: 0.5,
        ..Default::default()
    }
}

fn origin(config: &SolverConfig) -> usize {
    config.box_grid().unwrap().index_of(0.0).unwrap()
}

#[test]
fn config_validation() {
    assert!(SolverConfig::default().validate().is_ok());
    for bad in [
        SolverConfig { s: 0.5, ..small_config() },
        SolverConfig { s: 1.5, ..small_config() },
        SolverConfig { k: 0, ..small_config() },
        SolverConfig { window_t0: 0.8, ..small_config() },
        SolverConfig { picard_tol: 0.0, ..small_config() },
        SolverConfig { n_x: 513, ..small_config() },
        SolverConfig { x_max: 15.0, ..small_config() },
    ] {
        assert!(bad.validate().is_err(), "{bad:?}");
    }
    assert!(SolverConfig { k: 2, s: 0.1, ..small_config() }.warnings().len() == 1);
    assert!(SolverConfig { k: 2, s: 0.3, ..small_config() }.warnings().is_empty());
    assert!((regularity_threshold(6) - 0.5 + 2.0 / 6.0).abs() < 1e-15);
}

#[test]
fn incompatible_corner_is_rejected() {
    let err = BoundaryProblem::from_fns(small_config(), |_| 1.0, |_| 0.0).unwrap_err();
    assert!(matches!(err, Error::Compatibility { .. }));
}

#[test]
fn zero_data_gives_zero_forcing_and_field() {
    let p = BoundaryProblem::from_fns(small_config(), |_| 0.0, |_| 0.0).unwrap();
    assert_eq!(select_forcing(&p, 0.25).unwrap().max_abs(), 0.0);
    assert_eq!(solve_linear_homogeneous(&p, 0.25).unwrap().max_abs(), 0.0);
    let (u, report) = solve_nonlinear(&p).unwrap();
    assert_eq!(u.max_abs(), 0.0);
    assert_eq!(report.picard_iters, vec![1]);
    assert!(report.converged);
}

#[test]
fn free_trace_data_need_no_forcing() {
    let config = small_config();
    let halfline = config.halfline_grid().unwrap();
    let phi = SampledFunction::from_real_fn(halfline, DomainTag::Space, |x| (-(x - 2.0).powi(2)).exp()).unwrap();
    let plan = config.plan().unwrap();
    let ext = extend_halfline(&phi, 0.0, plan.grid()).unwrap();
    let trace = evolved_trace(&plan, &ext, &config.time_grid().unwrap()).unwrap();
    let p = BoundaryProblem::new(phi, trace, config).unwrap();
    let h = select_forcing(&p, 0.2).unwrap();
    assert!(h.max_abs() < 1e-6 * p.phi.max_abs(), "{:e}", h.max_abs());
}

#[test]
fn power_law_boundary_data() {
    let p = BoundaryProblem::from_fns(small_config(), |_| 0.0, |t| t).unwrap();
    let h = select_forcing(&p, 0.2).unwrap();
    let c = constant_ca() * gamma_function(2.0 / 3.0).unwrap() * gamma_function(4.0 / 3.0).unwrap();
    for (n, v) in h.values().iter().enumerate() {
        let t = h.grid().node(n);
        if (0.05..=0.2).contains(&t) {
            let want = t.cbrt() / c;
            assert!((v.re - want).abs() < 1e-3 * want, "t = {t}: {} vs {want}", v.re);
        }
    }
    assert!(h.values().last().unwrap().norm() == 0.0);
}

#[test]
fn forcing_inverts_the_trace_on_the_middle_plateau() {
    let p = BoundaryProblem::from_fns(
        small_config(),
        |x| x * x * (-x).exp(),
        |t| (3.0 * t).sin() + t * t,
    )
    .unwrap();
    let t0 = 0.2;
    let h = select_forcing(&p, t0).unwrap();
    let residual = boundary_residual(&p, t0).unwrap();
    let back = riemann_liouville(&h, 2.0 / 3.0).unwrap().scale(constant_ca() * gamma_function(2.0 / 3.0).unwrap());
    let top = residual.max_abs();
    for n in 0..h.grid().len() {
        if h.grid().node(n) <= 4.0 * t0 / 3.0 {
            assert!((back.values()[n] - residual.values()[n]).norm() < 1e-3 * top);
        }
    }
}

#[test]
fn linear_solution_attains_boundary_and_initial_data() {
    let config = small_config();
    let p = BoundaryProblem::from_fns(config.clone(), |x| x * (-x * x).exp(), |t| t.sin() + 0.3 * t).unwrap();
    let w = solve_linear_homogeneous(&p, 0.5).unwrap();
    let o = origin(&config);
    for n in 0..w.tgrid().len() {
        let f = p.f.values()[n].re;
        assert!((w.at(n, o).re - f).abs() < 1e-3, "t = {}", w.tgrid().node(n));
    }
    for (i, v) in p.phi.values().iter().enumerate() {
        assert!((w.at(0, o + i) - v).norm() < 1e-12);
    }
}

#[test]
fn inhomogeneous_solution_vanishes_on_the_boundary() {
    let config = small_config();
    let g = config.box_grid().unwrap();
    let tg = config.time_grid().unwrap();
    let bump = |x: f64, t: f64| Complex64::new(t * (-(x - 3.0).powi(2)).exp(), 0.0);
    let src = SpaceTimeField::from_fn(g, tg, bump).unwrap();
    let w = solve_linear_inhomogeneous(&src, 0.3, &config).unwrap();
    let o = origin(&config);
    let top = w.max_abs();
    assert!(top > 1e-3);
    for n in 0..w.tgrid().len() {
        assert!(w.at(n, o).norm() < 1e-3 * top);
    }
    let zero = SpaceTimeField::zeros(g, tg);
    assert_eq!(solve_linear_inhomogeneous(&zero, 0.3, &config).unwrap().max_abs(), 0.0);
    let other = SpaceTimeField::from_fn(g, tg, |x, t| Complex64::new((t * x).sin() * (-x * x).exp(), 0.0)).unwrap();
    let combo = src.axpby(2.0, &other, -0.5).unwrap();
    let lhs = solve_linear_inhomogeneous(&combo, 0.3, &config).unwrap();
    let rhs = w.axpby(2.0, &solve_linear_inhomogeneous(&other, 0.3, &config).unwrap(), -0.5).unwrap();
    for (a, b) in lhs.values().iter().zip(rhs.values()) {
        assert!((a - b).norm() < 1e-12 * (1.0 + top));
    }
}

#[test]
fn switching_off_the_nonlinearity_gives_the_linear_solution() {
    let config = SolverConfig { nonlinearity: 0.0, ..small_config() };
    let p = BoundaryProblem::from_fns(config.clone(), |x| x * (-x * x).exp(), |t| t.sin()).unwrap();
    let config = SolverConfig { window_constant: 1e6, ..config };
    let p = BoundaryProblem { config: config.clone(), ..p };
    let (u, report) = solve_nonlinear(&p).unwrap();
    assert_eq!(report.picard_iters, vec![1]);
    let w = solve_linear_homogeneous(&p, 0.5).unwrap();
    let o = origin(&config);
    for n in 0..u.tgrid().len() {
        for i in 0..u.xgrid().len() {
            assert!((u.at(n, i) - w.at(n, o + i)).norm() < 1e-12);
        }
    }
}

#[test]
fn picard_iterates_contract() {
    let config = SolverConfig { picard_tol: 1e-12, ..small_config() };
    let p = BoundaryProblem::from_fns(config, |x| 2.0 * x * (-(x - 1.0).powi(2)).exp(), |t| (2.0 * t).sin()).unwrap();
    let (_, report) = solve_nonlinear(&p).unwrap();
    for history in &report.picard_history {
        assert!(history.len() >= 3, "{history:?}");
        for pair in history.windows(2).skip(1) {
            assert!(pair[1] < 0.9 * pair[0], "{history:?}");
        }
    }
    assert!(report.max_boundary_error() < 1e-3);
}

#[test]
fn rescaling() {
    let config = small_config();
    let p = BoundaryProblem::from_fns(config.clone(), |x| (-x).exp() * x, |t| t * 0.5).unwrap();
    assert_eq!(rescale_problem(&p, 1.0).unwrap(), p);
    let q = BoundaryProblem::from_fns(config.clone(), |x| (-x).exp(), |_| 1.0).unwrap();
    let r = rescale_problem(&q, 0.5).unwrap();
    assert!((r.config.t_final - 4.0).abs() < 1e-12);
    for (i, v) in r.phi.values().iter().enumerate() {
        let x = r.phi.grid().node(i);
        assert!((v.re - 0.25 * (-x / 2.0).exp()).abs() < 1e-14);
    }
    let k2 = BoundaryProblem::from_fns(SolverConfig { k: 2, ..config }, |_| 0.0, |_| 0.0).unwrap();
    assert!(rescale_problem(&k2, 0.5).is_err());
    assert!(rescale_problem(&q, 1.5).is_err());
}

