// SPDX-License-Identifier: Apache-2.0

//! Implicit one-step method parameterized by a Hamiltonian matrix `H`:
//!
//! ```text
//! z1 = z0 + tau X(zbar),   zbar = (z0 + z1) / 2 + (tau / 2) H (z1 - z0)
//! ```
//!
//! With `H = 0` this is the implicit midpoint rule. The stage equation is
//! solved by fixed-point iteration, falling back to Newton with a
//! finite-difference Jacobian when the iteration stalls.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hamiltonian_defect, is_non_exceptional_scaled, make_standard_j, max_abs, max_abs_diff, solve,
    solve_vec, symplectic_defect, Matrix, HAMILTONIAN_RTOL,
};
use crate::systems::{method_map, HamiltonianSystem};

pub const DEFAULT_SOLVER_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;
/// Relative rounding floor of the solver tolerance, `8 eps`.
pub const ROUNDOFF_FLOOR: f64 = 8.0 * f64::EPSILON;
/// Fixed-point iteration is abandoned for Newton when a sweep reduces the
/// defect by less than this factor.
const STALL_RATIO: f64 = 0.9;
/// Extra sweeps after the tolerance is met, while the defect keeps falling.
const POLISH_SWEEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    FixedPoint,
    Newton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    tau: f64,
    steps: usize,
    hmat: Option<Matrix>,
    solver: SolverKind,
    solver_tol: f64,
    max_iter: usize,
}

impl IntegratorConfig {
    pub fn new(tau: f64, steps: usize) -> Self {
        Self {
            tau,
            steps,
            hmat: None,
            solver: SolverKind::FixedPoint,
            solver_tol: DEFAULT_SOLVER_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_hmat(mut self, hmat: Option<Matrix>) -> Self {
        self.hmat = hmat;
        self
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.solver_tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn hmat(&self) -> Option<&Matrix> {
        self.hmat.as_ref()
    }

    pub fn solver(&self) -> SolverKind {
        self.solver
    }

    pub fn solver_tol(&self) -> f64 {
        self.solver_tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    /// Checks the configuration against a phase space of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument("tau must be positive and finite"));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::InvalidArgument("solver tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive"));
        }
        if let Some(h) = &self.hmat {
            if h.rows() != dim || h.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.rows(),
                });
            }
            let j = make_standard_j(dim / 2);
            if hamiltonian_defect(h, &j)? > HAMILTONIAN_RTOL * h.max_abs().max(1.0) {
                return Err(Error::Structure("Hmat is not Hamiltonian"));
            }
            if !is_non_exceptional_scaled(&h.scale(self.tau)) {
                return Err(Error::ExceptionalMatrix);
            }
        }
        Ok(())
    }
}

/// Result of one step together with solver statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: Vec<f64>,
    pub iterations: usize,
    /// Final fixed-point defect `||z0 + tau X(zbar) - z1||_max`.
    pub residual: f64,
}

/// Precomputed stage weights for a validated configuration.
struct Stepper<'a> {
    system: &'a dyn HamiltonianSystem,
    tau: f64,
    /// `(I + tau H) / 2` and `(I - tau H) / 2`; `None` means plain midpoint.
    weights: Option<(Matrix, Matrix)>,
    solver: SolverKind,
    tol: f64,
    max_iter: usize,
}

impl<'a> Stepper<'a> {
    fn new(system: &'a dyn HamiltonianSystem, cfg: &IntegratorConfig) -> Result<Self> {
        let dim = 2 * system.n();
        cfg.validate(dim)?;
        let weights = cfg.hmat.as_ref().map(|h| {
            let id = Matrix::identity(dim);
            let th = h.scale(cfg.tau);
            ((&id + &th).scale(0.5), (&id - &th).scale(0.5))
        });
        Ok(Self {
            system,
            tau: cfg.tau,
            weights,
            solver: cfg.solver,
            tol: cfg.solver_tol,
            max_iter: cfg.max_iter,
        })
    }

    fn stage_point(&self, z0: &[f64], z1: &[f64]) -> Vec<f64> {
        match &self.weights {
            None => z0.iter().zip(z1).map(|(a, b)| 0.5 * (a + b)).collect(),
            Some((p, q)) => {
                let a = p.mul_vec(z1);
                let b = q.mul_vec(z0);
                a.iter().zip(&b).map(|(a, b)| a + b).collect()
            }
        }
    }

    /// `z0 + tau X(zbar(z1))`.
    fn update(&self, z0: &[f64], z1: &[f64]) -> Result<Vec<f64>> {
        let f = self.system.field(&self.stage_point(z0, z1))?;
        Ok(z0.iter().zip(&f).map(|(a, b)| a + self.tau * b).collect())
    }

    fn step(&self, z0: &[f64]) -> Result<StepOutcome> {
        let f0 = self.system.field(z0)?;
        let guess: Vec<f64> = z0.iter().zip(&f0).map(|(a, b)| a + self.tau * b).collect();
        match self.solver {
            SolverKind::FixedPoint => self.fixed_point(z0, guess),
            SolverKind::Newton => self.newton(z0, guess, 0),
        }
    }

    /// `tol`, floored at a few ulps of the state so that large states can
    /// still converge.
    fn accepts(&self, defect: f64, z: &[f64]) -> bool {
        defect <= self.tol.max(ROUNDOFF_FLOOR * max_abs(z).max(1.0))
    }

    fn fixed_point(&self, z0: &[f64], mut z: Vec<f64>) -> Result<StepOutcome> {
        let mut prev = f64::INFINITY;
        for iter in 1..=self.max_iter {
            let next = self.update(z0, &z)?;
            let defect = max_abs_diff(&next, &z);
            z = next;
            if self.accepts(defect, &z) {
                return self.polish(z0, z, defect, iter);
            }
            if iter >= 3 && defect > STALL_RATIO * prev {
                return self.newton(z0, z, iter);
            }
            prev = defect;
        }
        Err(Error::Convergence {
            iterations: self.max_iter,
            residual: prev,
        })
    }

    fn polish(
        &self,
        z0: &[f64],
        mut z: Vec<f64>,
        mut defect: f64,
        mut iters: usize,
    ) -> Result<StepOutcome> {
        for _ in 0..POLISH_SWEEPS {
            if defect == 0.0 || iters >= self.max_iter {
                break;
            }
            let next = self.update(z0, &z)?;
            let d = max_abs_diff(&next, &z);
            iters += 1;
            let improving = d < 0.5 * defect;
            z = next;
            defect = d;
            if !improving {
                break;
            }
        }
        Ok(StepOutcome {
            state: z,
            iterations: iters,
            residual: defect,
        })
    }

    /// Newton on `G(z) = z - z0 - tau X(zbar(z))`.
    fn newton(&self, z0: &[f64], mut z: Vec<f64>, used: usize) -> Result<StepOutcome> {
        let dim = z0.len();
        let mut residual = f64::INFINITY;
        for iter in used + 1..=self.max_iter.max(used + 1) {
            let g: Vec<f64> = {
                let u = self.update(z0, &z)?;
                z.iter().zip(&u).map(|(a, b)| a - b).collect()
            };
            residual = max_abs(&g);
            if self.accepts(residual, &z) {
                return self.polish(z0, z, residual, iter);
            }
            let zbar = self.stage_point(z0, &z);
            let df = self.field_jacobian(&zbar)?;
            let dstage = match &self.weights {
                None => Matrix::identity(dim).scale(0.5),
                Some((p, _)) => p.clone(),
            };
            let jac = &Matrix::identity(dim) - &(&df * &dstage).scale(self.tau);
            let delta = solve_vec(&jac, &g)?;
            for (zi, di) in z.iter_mut().zip(&delta) {
                *zi -= di;
            }
        }
        Err(Error::Convergence {
            iterations: self.max_iter,
            residual,
        })
    }

    fn field_jacobian(&self, at: &[f64]) -> Result<Matrix> {
        let dim = at.len();
        let mut jac = Matrix::zeros(dim, dim);
        for i in 0..dim {
            let h = 1e-6 * at[i].abs().max(1.0);
            let mut p = at.to_vec();
            let mut m = at.to_vec();
            p[i] += h;
            m[i] -= h;
            let fp = self.system.field(&p)?;
            let fm = self.system.field(&m)?;
            for r in 0..dim {
                jac[(r, i)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Ok(jac)
    }
}

fn check_state(system: &dyn HamiltonianSystem, z: &[f64]) -> Result<()> {
    if z.len() != 2 * system.n() {
        return Err(Error::DimensionMismatch {
            expected: 2 * system.n(),
            got: z.len(),
        });
    }
    Ok(())
}

/// One step with solver statistics.
pub fn step_with_stats(
    system: &dyn HamiltonianSystem,
    cfg: &IntegratorConfig,
    z0: &[f64],
) -> Result<StepOutcome> {
    check_state(system, z0)?;
    Stepper::new(system, cfg)?.step(z0)
}

/// One step of the method from `z0`.
pub fn step(
    system: &dyn HamiltonianSystem,
    cfg: &IntegratorConfig,
    z0: &[f64],
) -> Result<Vec<f64>> {
    Ok(step_with_stats(system, cfg, z0)?.state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub energy: f64,
    /// `H(phi^{-1} z)` with `phi = cayley(tau H)`; equals `energy` when no
    /// `H` is configured.
    pub surrounding_energy: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// One entry per state; the initial entry has zero iterations.
    pub diagnostics: Vec<StepDiagnostics>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Applies [`step`] `cfg.steps()` times. Errors carry the 1-based index of
/// the failing step.
pub fn integrate(
    system: &dyn HamiltonianSystem,
    cfg: &IntegratorConfig,
    z0: &[f64],
) -> Result<Trajectory> {
    check_state(system, z0)?;
    let stepper = Stepper::new(system, cfg)?;
    let phi_inv = method_map(cfg, z0.len())?.inverse();
    let identity = cfg.hmat.is_none();
    let diag = |z: &[f64], iterations: usize, residual: f64| -> Result<StepDiagnostics> {
        let energy = system.energy(z)?;
        let surrounding_energy = if identity {
            energy
        } else {
            system.energy(&phi_inv.apply(z))?
        };
        Ok(StepDiagnostics {
            energy,
            surrounding_energy,
            iterations,
            residual,
        })
    };

    let mut times = Vec::with_capacity(cfg.steps + 1);
    let mut states = Vec::with_capacity(cfg.steps + 1);
    let mut diagnostics = Vec::with_capacity(cfg.steps + 1);
    times.push(0.0);
    diagnostics.push(diag(z0, 0, 0.0).map_err(|e| e.at_step(0))?);
    states.push(z0.to_vec());
    for k in 1..=cfg.steps {
        let prev = states.last().expect("nonempty");
        let out = stepper.step(prev).map_err(|e| e.at_step(k))?;
        diagnostics.push(diag(&out.state, out.iterations, out.residual).map_err(|e| e.at_step(k))?);
        times.push(k as f64 * cfg.tau);
        states.push(out.state);
    }
    Ok(Trajectory {
        times,
        states,
        diagnostics,
    })
}

/// Closed-form step matrix for a linear field `X(z) = B z`:
/// `(I - tau/2 B - tau^2/2 B H)^{-1} (I + tau/2 B - tau^2/2 B H)`.
pub fn linear_one_step_matrix(b: &Matrix, hmat: &Matrix, tau: f64) -> Result<Matrix> {
    if !b.is_square() || hmat.rows() != b.rows() || !hmat.is_square() {
        return Err(Error::DimensionMismatch {
            expected: b.rows(),
            got: hmat.rows(),
        });
    }
    let id = Matrix::identity(b.rows());
    let half = b.scale(0.5 * tau);
    let coupling = (b * hmat).scale(0.5 * tau * tau);
    let left = &(&id - &half) - &coupling;
    let right = &(&id + &half) - &coupling;
    solve(&left, &right)
}

/// `||D^T J D - J||_max` for the central-difference Jacobian `D` of `map`
/// at `z`.
pub fn jacobian_defect<F>(map: F, z: &[f64], fd_eps: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "state dimension must be even and positive",
        ));
    }
    let dim = z.len();
    let mut jac = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let mut p = z.to_vec();
        let mut m = z.to_vec();
        p[i] += fd_eps;
        m[i] -= fd_eps;
        let (fp, fm) = (map(&p)?, map(&m)?);
        for r in 0..dim {
            jac[(r, i)] = (fp[r] - fm[r]) / (2.0 * fd_eps);
        }
    }
    symplectic_defect(&jac, &make_standard_j(dim / 2))
}

/// Symplecticity defect of the one-step map at `z`.
pub fn symplecticity_defect(
    system: &dyn HamiltonianSystem,
    cfg: &IntegratorConfig,
    z: &[f64],
    fd_eps: f64,
) -> Result<f64> {
    check_state(system, z)?;
    let stepper = Stepper::new(system, cfg)?;
    jacobian_defect(|p| Ok(stepper.step(p)?.state), z, fd_eps)
}

/// Least-squares slope of `ln(error)` against `ln(tau)`. Points with a
/// non-positive error are skipped; fewer than two usable points give NaN.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, e)| *t > 0.0 && *e > 0.0)
        .map(|&(t, e)| (libm::log(t), libm::log(e)))
        .collect();
    if logs.len() < 2 {
        return f64::NAN;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub tau: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    pub slope: f64,
    /// `true` when the reference came from the exact flow.
    pub exact_reference: bool,
}

/// Reference runs for systems without an exact flow use the midpoint rule
/// at a hundredth of the smallest step, solved to this tolerance.
pub const REFERENCE_SOLVER_TOL: f64 = 1e-14;

fn steps_for(t_final: f64, tau: f64) -> Result<usize> {
    let ratio = t_final / tau;
    let steps = libm::round(ratio);
    if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidArgument(
            "final time must be an integer multiple of every step",
        ));
    }
    Ok(steps as usize)
}

/// Endpoint error at `t_final` for `tau = cfg.tau / 2^k`, `k = 0..=levels`.
pub fn convergence_study(
    system: &dyn HamiltonianSystem,
    cfg_base: &IntegratorConfig,
    z0: &[f64],
    t_final: f64,
    levels: usize,
) -> Result<ConvergenceStudy> {
    check_state(system, z0)?;
    let taus: Vec<f64> = (0..=levels)
        .map(|k| cfg_base.tau / (1u64 << k) as f64)
        .collect();
    let step_counts = taus
        .iter()
        .map(|&t| steps_for(t_final, t))
        .collect::<Result<Vec<_>>>()?;

    let (reference, exact_reference) = match system.exact_flow(t_final, z0) {
        Some(z) => (z, true),
        None => {
            let finest = *step_counts.last().expect("levels + 1 entries");
            let cfg = IntegratorConfig::new(taus[levels] / 100.0, finest * 100)
                .with_tolerance(REFERENCE_SOLVER_TOL)
                .with_max_iter(cfg_base.max_iter.max(DEFAULT_MAX_ITER));
            (integrate(system, &cfg, z0)?.last().to_vec(), false)
        }
    };

    let mut points = vec![];
    for (&tau, &steps) in taus.iter().zip(&step_counts) {
        let cfg = cfg_base.clone().with_tau(tau).with_steps(steps);
        let traj = integrate(system, &cfg, z0)?;
        points.push(ConvergencePoint {
            tau,
            error: max_abs_diff(traj.last(), &reference),
        });
    }
    let slope = fit_loglog_slope(&points.iter().map(|p| (p.tau, p.error)).collect::<Vec<_>>());
    Ok(ConvergenceStudy {
        points,
        slope,
        exact_reference,
    })
}
