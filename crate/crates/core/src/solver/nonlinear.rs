use serde::{Deserialize, Serialize};

use crate::diagnostics::{energy_identity_with, mass_series};
use crate::discrete::{
    cutoff_value, extend_halfline, l2_norm, signed_index, taper_value, DomainTag, Grid1D, SampledFunction, SpaceTimeField,
};
use crate::{Complex64, Error, Result};

use super::operators::{boundary_samples, Window};
use super::BoundaryProblem;

/// Diagnostics of a nonlinear solve, one entry per time node unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub times: Vec<f64>,
    /// `|u(0, t) - f(t)|`.
    pub boundary_error: Vec<f64>,
    /// `∫_{x>0} u²`.
    pub mass: Vec<f64>,
    /// Relative imbalance of the energy identity.
    pub energy_residual: Vec<f64>,
    /// Start time of each window.
    pub window_starts: Vec<f64>,
    /// Picard iterations per window.
    pub picard_iters: Vec<usize>,
    /// Successive iterate differences per window.
    pub picard_history: Vec<Vec<f64>>,
    /// `max_x |u(x, 0) - φ(x)|`.
    pub initial_error: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn max_boundary_error(&self) -> f64 {
        self.boundary_error.iter().copied().fold(0.0, f64::max)
    }
}

/// State shared by the Picard iterations of one solve.
struct Marcher<'a> {
    window: Window<'a>,
    taper_from: f64,
    taper_to: f64,
}

impl Marcher<'_> {
    fn halfline_len(&self) -> usize {
        self.window.halfline.len()
    }

    /// `-c E(taper · u^k u_x)` per row, with `u^k u_x` formed
    /// pseudospectrally and dealiased by the 2/3 rule.
    fn source(&self, u: &SpaceTimeField) -> Result<SpaceTimeField> {
        let config = self.window.config;
        let plan = self.window.plan;
        let t = plan.transformer();
        let n = plan.grid().len();
        let mut out = SpaceTimeField::zeros(*plan.grid(), self.window.tgrid);
        if config.nonlinearity == 0.0 {
            return Ok(out);
        }
        let k = config.k as i32;
        let cut = n / 3;
        for row in 0..self.window.tgrid.len() {
            let real: Vec<Complex64> = u.row(row).iter().map(|v| Complex64::new(v.re, 0.0)).collect();
            if real.iter().all(|v| v.re == 0.0) {
                continue;
            }
            let mut c = t.forward(&real);
            for (c, xi) in c.iter_mut().zip(t.wavenumbers()) {
                *c *= Complex64::new(0.0, *xi);
            }
            let ux = t.inverse(&c);
            let product: Vec<Complex64> = real
                .iter()
                .zip(&ux)
                .map(|(u, ux)| Complex64::new(u.re.powi(k) * ux.re, 0.0))
                .collect();
            let mut p = t.forward(&product);
            for (j, p) in p.iter_mut().enumerate() {
                if signed_index(j, n).unsigned_abs() as usize > cut {
                    *p = Complex64::new(0.0, 0.0);
                }
            }
            let p = t.inverse(&p);
            let half: Vec<Complex64> = (0..self.halfline_len())
                .map(|i| {
                    let x = self.window.halfline.node(i);
                    Complex64::new(-config.nonlinearity * p[self.window.origin + i].re * taper_value(x, self.taper_from, self.taper_to), 0.0)
                })
                .collect();
            let half = SampledFunction::new(self.window.halfline, half, DomainTag::Space)?;
            out.row_mut(row).copy_from_slice(extend_halfline(&half, 1.0, plan.grid())?.values());
        }
        Ok(out)
    }

    /// `max_n ‖a_n - b_n‖ / max_n ‖a_n‖` in `L²(0, x_max)`.
    fn relative_difference(&self, a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
        let range = self.window.origin..self.window.origin + self.halfline_len();
        let mut diff: f64 = 0.0;
        let mut size: f64 = 0.0;
        for n in 0..a.tgrid().len() {
            let (ra, rb) = (&a.row(n)[range.clone()], &b.row(n)[range.clone()]);
            diff = diff.max(ra.iter().zip(rb).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>());
            size = size.max(ra.iter().map(|x| x.norm_sqr()).sum::<f64>());
        }
        if diff == 0.0 {
            0.0
        } else {
            (diff / size).sqrt()
        }
    }

    /// Picard iteration on one window; returns the field, the iteration
    /// count and the difference history.
    fn solve_window(&self, phi: &SampledFunction, f: &SampledFunction, start: f64) -> Result<(SpaceTimeField, usize, Vec<f64>)> {
        let config = self.window.config;
        let phi_ext = self.window.extend(phi)?;
        let (linear, _) = self.window.homogeneous(Some(&phi_ext), f)?;
        let mut u = linear.clone();
        let mut history = Vec::new();
        for iteration in 1..=config.picard_max_iter {
            let source = self.source(&u)?;
            let next = linear.axpby(1.0, &self.window.inhomogeneous(&source)?, 1.0)?;
            let diff = self.relative_difference(&next, &u);
            history.push(diff);
            u = next;
            if diff <= config.picard_tol || !diff.is_finite() {
                if !diff.is_finite() {
                    break;
                }
                return Ok((u, iteration, history));
            }
        }
        Err(Error::NonConvergence {
            window_start: start,
            iterations: history.len(),
            last: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }

    /// Initial data for the next window from a box row of the solution: tapered on
    /// the right and corrected near the origin so that `φ(0) = f(t)`.
    fn restart_data(&self, row: &[Complex64], boundary: Complex64) -> Result<SampledFunction> {
        let grid = self.window.halfline;
        let mut values: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new(row[self.window.origin + i].re * taper_value(grid.node(i), self.taper_from, self.taper_to), 0.0))
            .collect();
        let gap = boundary - values[0];
        let reach = (0.25 * grid.end()).min(1.0);
        for (i, v) in values.iter_mut().enumerate() {
            *v += gap * cutoff_value(grid.node(i), 0.25 * reach, reach);
        }
        SampledFunction::new(grid, values, DomainTag::Space)
    }
}

/// Solves `u_t + u_xxx + c u^k u_x = 0` on `x > 0` with `u(x, 0) = φ`,
/// `u(0, t) = f` by Picard iteration on the Duhamel formulation, chaining
/// windows over `[0, t_final]`.
///
/// The window length is `min(window_t0, window_constant / (1 + N)^window_power)`
/// with `N = ‖φ‖_{L²} + max|f|`, rounded to whole time steps (at least 4); it
/// is halved up to `max_retries` times when the iteration fails to converge.
/// The returned field covers `[0, x_max] × [0, t_final]`.
pub fn solve_nonlinear(problem: &BoundaryProblem) -> Result<(SpaceTimeField, RunReport)> {
    let config = &problem.config;
    config.validate()?;
    problem.check_compatibility()?;
    let plan = config.plan()?;
    let tgrid = config.time_grid()?;
    let halfline = config.halfline_grid()?;
    let dt = config.time_step();
    let nt = tgrid.len();

    let norm = l2_norm(&problem.phi) + problem.f.max_abs();
    let heuristic = config.window_constant / (1.0 + norm).powf(config.window_power);
    let mut steps = ((config.window_t0.min(heuristic) / dt).round() as usize).max(4);

    let mut out = SpaceTimeField::zeros(halfline, tgrid);
    out.row_mut(0).copy_from_slice(problem.phi.values());
    let mut phi = problem.phi.clone();
    let mut done = 0usize;
    let mut retries = 0usize;
    let mut window_starts = Vec::new();
    let mut picard_iters = Vec::new();
    let mut picard_history = Vec::new();

    while done < nt - 1 {
        let wgrid = Grid1D::time(dt, steps + 1)?;
        let window = Window::new(&plan, config, wgrid)?;
        let marcher = Marcher {
            window,
            taper_from: 0.75 * halfline.end(),
            taper_to: halfline.end(),
        };
        let f = boundary_samples(&problem.f, done, &wgrid)?;
        let start = tgrid.node(done);
        match marcher.solve_window(&phi, &f, start) {
            Ok((u, iterations, history)) => {
                let keep = steps.min(nt - 1 - done);
                for n in 1..=keep {
                    let row = &u.row(n)[marcher.window.origin..marcher.window.origin + halfline.len()];
                    out.row_mut(done + n).copy_from_slice(row);
                }
                window_starts.push(start);
                picard_iters.push(iterations);
                picard_history.push(history);
                done += keep;
                if done < nt - 1 {
                    phi = marcher.restart_data(u.row(keep), problem.f.values()[done])?;
                }
            }
            Err(Error::NonConvergence { .. }) if retries < config.max_retries && steps / 2 >= 4 => {
                retries += 1;
                steps /= 2;
            }
            Err(e) => return Err(e),
        }
    }

    let report = build_report(problem, &out, window_starts, picard_iters, picard_history)?;
    Ok((out, report))
}

fn build_report(
    problem: &BoundaryProblem,
    u: &SpaceTimeField,
    window_starts: Vec<f64>,
    picard_iters: Vec<usize>,
    picard_history: Vec<Vec<f64>>,
) -> Result<RunReport> {
    let config = &problem.config;
    let boundary_error = (0..u.tgrid().len())
        .map(|n| (u.at(n, 0) - problem.f.values()[n]).norm())
        .collect();
    let initial_error = u
        .row(0)
        .iter()
        .zip(problem.phi.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let ledger = energy_identity_with(u, &problem.f, &problem.phi, config.k, config.nonlinearity)?;
    Ok(RunReport {
        times: u.tgrid().nodes(),
        boundary_error,
        mass: mass_series(u)?,
        energy_residual: ledger.relative_imbalance,
        window_starts,
        picard_iters,
        picard_history,
        initial_error,
        converged: true,
        warnings: config.warnings(),
    })
}
