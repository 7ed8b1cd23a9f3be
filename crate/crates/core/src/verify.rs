//! Quantitative check suites: each check measures one quantity, compares it
//! with a fixed threshold and reports both.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::airy::constant_ca;
use crate::diagnostics::convergence_order;
use crate::discrete::{l2_norm, smooth_cutoff, sobolev_norm, DomainTag, Grid1D, SampledFunction, Transformer};
use crate::fractional::{gamma_function, riemann_liouville};
use crate::linear::forcing_term;
use crate::scenarios::{self, Scenario};
use crate::solver::{
    boundary_residual, rescale_problem, select_forcing, solve_linear_homogeneous, solve_nonlinear, BoundaryProblem, SolverConfig,
};
use crate::{Complex64, Error, Result};

/// Seed of every randomized check.
pub const SEED: u64 = 20_240_611;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    /// How `measured` is compared with `threshold`.
    pub relation: Relation,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Below,
    AtLeast,
    /// `measured` lies in `[threshold, upper]`, with `upper` in the detail.
    Within,
}

impl CheckResult {
    fn new(suite: &str, name: &str, measured: f64, threshold: f64, relation: Relation, passed: bool, started: Instant, detail: String) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            measured,
            threshold,
            relation,
            passed: passed && measured.is_finite(),
            seconds: started.elapsed().as_secs_f64(),
            detail,
        }
    }

    fn below(suite: &str, name: &str, measured: f64, threshold: f64, started: Instant, detail: String) -> Self {
        Self::new(suite, name, measured, threshold, Relation::Below, measured < threshold, started, detail)
    }

    fn at_least(suite: &str, name: &str, measured: f64, threshold: f64, started: Instant, detail: String) -> Self {
        Self::new(suite, name, measured, threshold, Relation::AtLeast, measured >= threshold, started, detail)
    }

    fn failed(suite: &str, name: &str, started: Instant, error: &Error) -> Self {
        Self::new(suite, name, f64::NAN, f64::NAN, Relation::Below, false, started, format!("error: {error}"))
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Within => "in",
        };
        write!(
            f,
            "{} {}/{}: {:.6e} {} {:.6e} ({:.2} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            op,
            self.threshold,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fractional,
    Airy,
    Linear,
    Solver,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fractional" => Ok(Self::Fractional),
            "airy" => Ok(Self::Airy),
            "linear" => Ok(Self::Linear),
            "solver" => Ok(Self::Solver),
            "all" => Ok(Self::All),
            _ => Err(Error::InvalidArgument(format!(
                "unknown suite '{s}', expected fractional, airy, linear, solver or all"
            ))),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fractional => "fractional",
            Self::Airy => "airy",
            Self::Linear => "linear",
            Self::Solver => "solver",
            Self::All => "all",
        }
    }

    /// The individual suites `self` stands for.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Self::All => vec![Self::Fractional, Self::Airy, Self::Linear, Self::Solver],
            s => vec![s],
        }
    }
}

/// Runs one suite (not `All`; see [`Suite::members`]).
pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Fractional => vec![semigroup_law(), semigroup_order()],
        Suite::Airy => airy_constant(),
        Suite::Linear => vec![trace_formula(), local_smoothing()],
        Suite::Solver => {
            let mut out = vec![forcing_inversion()];
            out.extend(boundary_recovery());
            out.extend(soliton_reproduction(1));
            out.extend(soliton_reproduction(2));
            out.extend(mass_decay());
            out.push(scaling_covariance());
            out.push(determinism());
            out
        }
        Suite::All => Suite::All.members().into_iter().flat_map(run_suite).collect(),
    }
}

fn pairs(samples: &[(f64, f64)]) -> String {
    let items: Vec<String> = samples.iter().map(|(d, e)| format!("({d:.3e}, {e:.3e})")).collect();
    items.join(" ")
}

fn guard(suite: &str, name: &str, started: Instant, run: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    run().unwrap_or_else(|e| CheckResult::failed(suite, name, started, &e))
}

fn series(step: f64, end: f64, h: impl Fn(f64) -> f64) -> Result<SampledFunction> {
    let n = (end / step).round() as usize + 1;
    SampledFunction::from_real_fn(Grid1D::time(step, n)?, DomainTag::Time, h)
}

fn semigroup_error(step: f64) -> Result<f64> {
    let h = series(step, 2.0, |t| t * t * (-t).exp())?;
    let twice = riemann_liouville(&riemann_liouville(&h, 1.0 / 3.0)?, 1.0 / 3.0)?;
    let once = riemann_liouville(&h, 2.0 / 3.0)?;
    let diff = twice.values().iter().zip(once.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(diff / h.max_abs())
}

/// `‖I_{1/3} I_{1/3} h - I_{2/3} h‖_∞ / ‖h‖_∞` at `Δt = 1e-3`.
pub fn semigroup_law() -> CheckResult {
    let started = Instant::now();
    guard("fractional", "semigroup_law", started, || {
        let e = semigroup_error(1e-3)?;
        Ok(CheckResult::below("fractional", "semigroup_law", e, 1e-5, started, "h = t^2 e^-t on [0, 2], dt = 1e-3".into()))
    })
}

/// Refinement order of the semigroup defect.
pub fn semigroup_order() -> CheckResult {
    let started = Instant::now();
    guard("fractional", "semigroup_order", started, || {
        let samples = [4e-3, 2e-3, 1e-3, 5e-4]
            .iter()
            .map(|&dt| Ok((dt, semigroup_error(dt)?)))
            .collect::<Result<Vec<_>>>()?;
        let order = convergence_order(&samples)?;
        Ok(CheckResult::at_least("fractional", "semigroup_order", order, 1.9, started, pairs(&samples)))
    })
}

/// `2 Re(e^{iπ/6}) ∫_0^R e^{-r³} dr`: the integral of `e^{iξ³}` over the
/// line after rotating each half-line onto the ray where `iξ³` is real and
/// negative; composite Simpson on `[0, 8]`.
pub fn rotated_contour_integral() -> f64 {
    let (end, n) = (8.0, 20_000);
    let h = end / n as f64;
    let g = |r: f64| (-r * r * r).exp();
    let mut acc = g(0.0) + g(end);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    2.0 * (PI / 6.0).cos() * acc * h / 3.0
}

/// `C_A` against `2π/(3Γ(2/3))` and against contour quadrature.
pub fn airy_constant() -> Vec<CheckResult> {
    let started = Instant::now();
    let closed = 2.0 * PI / (3.0 * statrs::function::gamma::gamma(2.0 / 3.0));
    let ca = constant_ca();
    let quad = rotated_contour_integral();
    vec![
        CheckResult::below("airy", "constant_closed_form", (ca - closed).abs(), 1e-8, started, format!("C_A = {ca:.16e}")),
        CheckResult::below("airy", "constant_quadrature", (ca - quad).abs(), 1e-6, started, format!("quadrature {quad:.16e}")),
    ]
}

/// The forcing term with `h ≡ 1` against `(3/2) C_A t^{2/3}` on `[0.1, 1]`.
pub fn trace_formula() -> CheckResult {
    let started = Instant::now();
    guard("linear", "trace_formula", started, || {
        let tgrid = Grid1D::time(1e-3, 1001)?;
        let h = SampledFunction::from_real_fn(tgrid, DomainTag::Time, |_| 1.0)?;
        let xgrid = Grid1D::with_spacing(0.0, 0.1, 2)?;
        let w = forcing_term(&h, &xgrid, &tgrid)?;
        let ca = constant_ca();
        let mut worst: f64 = 0.0;
        for n in 0..tgrid.len() {
            let t = tgrid.node(n);
            if t >= 0.1 - 1e-12 {
                let want = 1.5 * ca * t.powf(2.0 / 3.0);
                worst = worst.max((w.at(n, 0).re - want).abs() / want);
            }
        }
        Ok(CheckResult::below("linear", "trace_formula", worst, 1e-3, started, "h = 1, dt = 1e-3".into()))
    })
}

/// Random wave packets with frequencies in `[1.5, 2.5]`.
fn packet_data(rng: &mut ChaCha8Rng, grid: Grid1D) -> Result<SampledFunction> {
    let packets: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(1.5..2.5), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    SampledFunction::from_real_fn(grid, DomainTag::Space, |x| {
        packets
            .iter()
            .map(|(a, c, xi, theta)| a * (-(x - c).powi(2) / 18.0).exp() * (xi * x + theta).cos())
            .sum()
    })
}

/// `‖S(·)φ(0)‖²_{Ḣ^{1/3}_t} / ‖φ‖²_{L²}` for one sample of packet data.
fn smoothing_ratio(phi: &SampledFunction, window: Grid1D) -> Result<f64> {
    let transformer = Transformer::new(*phi.grid());
    let coefficients = transformer.forward(phi.values());
    let dxi = transformer.dxi();
    let top = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let modes: Vec<(f64, Complex64)> = transformer
        .wavenumbers()
        .iter()
        .zip(&coefficients)
        .filter(|(_, c)| c.norm() > 1e-15 * top)
        .map(|(&xi, &c)| (xi * xi * xi, c * dxi))
        .collect();
    let half = window.half_width();
    let taper = smooth_cutoff(0.8 * half, 0.95 * half, window, DomainTag::Time)?;
    let trace: Vec<Complex64> = window
        .nodes()
        .iter()
        .zip(taper.values())
        .map(|(&t, w)| modes.iter().map(|(cube, c)| c * Complex64::from_polar(1.0, t * cube)).sum::<Complex64>() * w)
        .collect();
    let trace = SampledFunction::new(window, trace, DomainTag::Time)?;
    let numerator = sobolev_norm(&trace, 1.0 / 3.0, true)?.powi(2);
    Ok(numerator / l2_norm(phi).powi(2))
}

/// Mean local-smoothing ratio over ten random band-limited draws.
pub fn local_smoothing() -> CheckResult {
    let started = Instant::now();
    guard("linear", "local_smoothing", started, || {
        let space = Grid1D::periodic_box(400.0, 16384)?;
        let window = Grid1D::periodic_box(12.0, 4096)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut ratios = Vec::new();
        for _ in 0..10 {
            let phi = packet_data(&mut rng, space)?;
            ratios.push(smoothing_ratio(&phi, window)?);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let (lo, hi) = (0.317, 0.350);
        Ok(CheckResult::new(
            "linear",
            "local_smoothing",
            mean,
            lo,
            Relation::Within,
            (lo..=hi).contains(&mean),
            started,
            format!("upper {hi}, target 1/3, draws {:?}", ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()),
        ))
    })
}

fn random_problem(rng: &mut ChaCha8Rng, config: &SolverConfig) -> Result<BoundaryProblem> {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..5.0), rng.gen_range(0.7..2.0)))
        .collect();
    let waves: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..6.0))).collect();
    let phi = move |x: f64| bumps.iter().map(|(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum::<f64>();
    let corner = phi(0.0);
    BoundaryProblem::from_fns(config.clone(), phi, move |t| {
        corner + waves.iter().map(|(b, w)| b * (w * t).sin()).sum::<f64>()
    })
}

/// `C_A Γ(2/3) I_{2/3}(h)` against the boundary residual on the plateau
/// `[0, 4T0/3]`, worst of twenty random pairs.
pub fn forcing_inversion() -> CheckResult {
    let started = Instant::now();
    guard("solver", "forcing_inversion", started, || {
        let config = SolverConfig::default();
        let t0 = 0.25;
        let scale = constant_ca() * gamma_function(2.0 / 3.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let problem = random_problem(&mut rng, &config)?;
            let h = select_forcing(&problem, t0)?;
            let residual = boundary_residual(&problem, t0)?;
            let back = riemann_liouville(&h, 2.0 / 3.0)?.scale(scale);
            let top = residual.max_abs();
            let plateau = 4.0 * t0 / 3.0 + 1e-12;
            let err = (0..h.grid().len())
                .filter(|&n| h.grid().node(n) <= plateau)
                .map(|n| (back.values()[n] - residual.values()[n]).norm())
                .fold(0.0, f64::max);
            worst = worst.max(err / top);
        }
        Ok(CheckResult::below("solver", "forcing_inversion", worst, 1e-3, started, "20 random pairs, T0 = 0.25".into()))
    })
}

fn boundary_sup_error(scenario: &Scenario, t0: f64) -> Result<f64> {
    let problem = scenario.problem()?;
    let w = solve_linear_homogeneous(&problem, t0)?;
    let origin = problem
        .config
        .box_grid()?
        .index_of(0.0)
        .ok_or_else(|| Error::InvalidGrid("no node at x = 0".into()))?;
    Ok((0..w.tgrid().len())
        .map(|n| (w.at(n, origin) - problem.f.values()[n]).norm())
        .fold(0.0, f64::max))
}

/// Boundary recovery for `φ = 0`, `f = sin 2t` at default grids, and its
/// order under simultaneous refinement.
pub fn boundary_recovery() -> Vec<CheckResult> {
    let started = Instant::now();
    let base = scenarios::boundary_sine();
    let mut samples = Vec::new();
    let mut out = Vec::new();
    for (n_x, n_t) in [(512, 513), (1024, 1025), (2048, 2049)] {
        let mut s = base.clone();
        s.config.n_x = n_x;
        s.config.n_t = n_t;
        match boundary_sup_error(&s, 0.5) {
            Ok(e) => samples.push((s.config.time_step(), e)),
            Err(e) => return vec![CheckResult::failed("solver", "boundary_recovery", started, &e)],
        }
    }
    let at_default = samples.last().map_or(f64::NAN, |s| s.1);
    out.push(CheckResult::below("solver", "boundary_recovery", at_default, 1e-3, started, "n_x = 2048, n_t = 2049, T0 = 0.5".into()));
    out.push(guard("solver", "boundary_recovery_order", started, || {
        let order = convergence_order(&samples)?;
        Ok(CheckResult::at_least("solver", "boundary_recovery_order", order, 1.0, started, pairs(&samples)))
    }));
    out
}

/// Soliton run against the exact solution on `t ∈ [0, 1]`.
pub fn soliton_reproduction(k: u32) -> Vec<CheckResult> {
    let started = Instant::now();
    let name = format!("soliton_k{k}");
    let run = || -> Result<(f64, usize, f64)> {
        let scenario = if k == 1 { scenarios::soliton_k1(1.0, -10.0)? } else { scenarios::soliton_k2(1.0, -10.0)? };
        let problem = scenario.problem()?;
        let (u, report) = solve_nonlinear(&problem)?;
        let err = scenario.relative_error(&u)?.into_iter().fold(0.0, f64::max);
        let iters = report.picard_iters.iter().copied().max().unwrap_or(0);
        Ok((err, iters, report.max_boundary_error()))
    };
    match run() {
        Ok((err, iters, boundary)) => vec![
            CheckResult::below("solver", &name, err, 1e-2, started, format!("c = 1, x0 = -10, boundary error {boundary:.3e}")),
            CheckResult::new(
                "solver",
                &format!("{name}_picard"),
                iters as f64,
                8.0,
                Relation::Below,
                iters <= 8,
                started,
                "most Picard iterations in a window, at most 8".into(),
            ),
        ],
        Err(e) => vec![CheckResult::failed("solver", &name, started, &e)],
    }
}

struct MassRun {
    drift: f64,
    imbalance: f64,
    step: f64,
}

fn mass_run(n_x: usize, n_t: usize) -> Result<MassRun> {
    let mut scenario = scenarios::mass_decay(0.5);
    scenario.config.n_x = n_x;
    scenario.config.n_t = n_t;
    let problem = scenario.problem()?;
    let (_, report) = solve_nonlinear(&problem)?;
    let m0 = report.mass[0];
    let drift = report.mass.windows(2).map(|w| (w[1] - w[0]) / m0).fold(0.0, f64::max);
    let imbalance = report.energy_residual.iter().copied().fold(0.0, f64::max);
    Ok(MassRun { drift, imbalance, step: problem.config.time_step() })
}

/// Mass decay with `f ≡ 0`: per-step increase, energy-identity imbalance and
/// its refinement order.
pub fn mass_decay() -> Vec<CheckResult> {
    let started = Instant::now();
    let mut runs = Vec::new();
    for (n_x, n_t) in [(512, 513), (1024, 1025), (2048, 2049)] {
        match mass_run(n_x, n_t) {
            Ok(r) => runs.push(r),
            Err(e) => return vec![CheckResult::failed("solver", "mass_decay", started, &e)],
        }
    }
    let fine = runs.last().expect("three runs");
    let samples: Vec<(f64, f64)> = runs.iter().map(|r| (r.step, r.imbalance)).collect();
    vec![
        CheckResult::below("solver", "mass_monotone", fine.drift, 1e-6, started, "largest relative increase per step".into()),
        CheckResult::below("solver", "energy_identity", fine.imbalance, 1e-3, started, "f = 0, phi = x^2 e^(-x^2/2) / 2".into()),
        guard("solver", "energy_identity_order", started, || {
            let order = convergence_order(&samples)?;
            Ok(CheckResult::at_least("solver", "energy_identity_order", order, 1.0, started, pairs(&samples)))
        }),
    ]
}

/// `solve(P)` against the pullback of `solve(rescale(P, 1/2))` for the
/// `k = 1` Gaussian scenario, relative `L²` over the space-time grid.
pub fn scaling_covariance() -> CheckResult {
    let started = Instant::now();
    guard("solver", "scaling_covariance", started, || {
        let lambda = 0.5;
        let problem = scenarios::by_name("gaussian_k1")?.problem()?;
        let (u, _) = solve_nonlinear(&problem)?;
        let (v, _) = solve_nonlinear(&rescale_problem(&problem, lambda)?)?;
        let pull = lambda.powi(-2);
        let (mut diff, mut size) = (0.0, 0.0);
        for (a, b) in u.values().iter().zip(v.values()) {
            diff += (a.re - pull * b.re).powi(2);
            size += a.re * a.re;
        }
        let rel = (diff / size).sqrt();
        Ok(CheckResult::below("solver", "scaling_covariance", rel, 5e-2, started, "lambda = 1/2".into()))
    })
}

/// Two solves of the same problem agree bit for bit.
pub fn determinism() -> CheckResult {
    let started = Instant::now();
    guard("solver", "determinism", started, || {
        let scenario = scenarios::soliton_k1(1.0, -10.0)?;
        let mut config = scenario.config.clone();
        config.n_x = 512;
        config.n_t = 257;
        config.t_final = 0.25;
        let scenario = Scenario { config, ..scenario };
        let (a, ra) = solve_nonlinear(&scenario.problem()?)?;
        let (b, rb) = solve_nonlinear(&scenario.problem()?)?;
        let same = a.values().iter().zip(b.values()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
            && ra == rb;
        let mismatches = if same { 0.0 } else { 1.0 };
        Ok(CheckResult::below("solver", "determinism", mismatches, 0.5, started, "repeated solve".into()))
    })
}
