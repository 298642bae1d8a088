// SPDX-License-Identifier: Apache-2.0

//! Benchmark Hamiltonian systems and surrounding-Hamiltonian diagnostics.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, linear_one_step_matrix, IntegratorConfig};
use crate::linalg::{cayley, expm, logm, make_standard_j, Matrix, SymplecticMap};

/// Collision radius for the Kepler problem.
pub const KEPLER_COLLISION_RADIUS: f64 = 1e-8;

/// A Hamiltonian on `R^{2n}` with state layout `(q_1..q_n, p_1..p_n)`.
pub trait HamiltonianSystem {
    fn name(&self) -> &str;

    /// Degrees of freedom; the state has `2n` entries.
    fn n(&self) -> usize;

    fn energy(&self, z: &[f64]) -> Result<f64>;

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>>;

    /// `X_H = J grad H`.
    fn field(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(apply_j(&self.gradient(z)?))
    }

    /// Exact time-`t` flow, where one is known in closed form.
    fn exact_flow(&self, _t: f64, _z: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// The underlying quadratic form, for systems that are quadratic.
    fn quadratic_form(&self) -> Option<&Matrix> {
        None
    }
}

/// `J v` without forming `J`: `(-v_p, v_q)`.
pub fn apply_j(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = Vec::with_capacity(v.len());
    out.extend(v[n..].iter().map(|x| -x));
    out.extend_from_slice(&v[..n]);
    out
}

fn check_state(z: &[f64], n: usize) -> Result<()> {
    if z.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: z.len(),
        });
    }
    Ok(())
}

/// `H = (|q|^2 + |p|^2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicOscillator {
    n: usize,
}

pub fn make_harmonic_oscillator(n: usize) -> Result<HarmonicOscillator> {
    if n == 0 {
        return Err(Error::InvalidArgument("oscillator needs n >= 1"));
    }
    Ok(HarmonicOscillator { n })
}

impl HamiltonianSystem for HarmonicOscillator {
    fn name(&self) -> &str {
        "oscillator"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn energy(&self, z: &[f64]) -> Result<f64> {
        check_state(z, self.n)?;
        Ok(0.5 * z.iter().map(|x| x * x).sum::<f64>())
    }

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_state(z, self.n)?;
        Ok(z.to_vec())
    }

    /// Rotation by `t` in every `(q_i, p_i)` plane.
    fn exact_flow(&self, t: f64, z: &[f64]) -> Option<Vec<f64>> {
        check_state(z, self.n).ok()?;
        let (s, c) = (libm::sin(t), libm::cos(t));
        let n = self.n;
        let mut out = alloc::vec![0.0; 2 * n];
        for i in 0..n {
            let (q, p) = (z[i], z[n + i]);
            out[i] = c * q - s * p;
            out[n + i] = s * q + c * p;
        }
        Some(out)
    }
}

/// `H = p^2 / 2 - cos q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pendulum;

pub fn make_pendulum() -> Pendulum {
    Pendulum
}

impl HamiltonianSystem for Pendulum {
    fn name(&self) -> &str {
        "pendulum"
    }

    fn n(&self) -> usize {
        1
    }

    fn energy(&self, z: &[f64]) -> Result<f64> {
        check_state(z, 1)?;
        Ok(0.5 * z[1] * z[1] - libm::cos(z[0]))
    }

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_state(z, 1)?;
        Ok(alloc::vec![libm::sin(z[0]), z[1]])
    }
}

/// Planar Kepler problem `H = |p|^2 / 2 - 1 / |q|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Kepler;

pub fn make_kepler() -> Kepler {
    Kepler
}

impl Kepler {
    fn radius(z: &[f64]) -> Result<f64> {
        check_state(z, 2)?;
        let r = libm::hypot(z[0], z[1]);
        if !(r >= KEPLER_COLLISION_RADIUS) {
            return Err(Error::Domain("Kepler collision: |q| below 1e-8"));
        }
        Ok(r)
    }
}

impl HamiltonianSystem for Kepler {
    fn name(&self) -> &str {
        "kepler"
    }

    fn n(&self) -> usize {
        2
    }

    fn energy(&self, z: &[f64]) -> Result<f64> {
        let r = Self::radius(z)?;
        Ok(0.5 * (z[2] * z[2] + z[3] * z[3]) - 1.0 / r)
    }

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let r = Self::radius(z)?;
        let r3 = r * r * r;
        Ok(alloc::vec![z[0] / r3, z[1] / r3, z[2], z[3]])
    }
}

/// `H = z^T C z / 2` with linear field `B z`, `B = J C`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSystem {
    n: usize,
    c: Matrix,
    b: Matrix,
}

pub fn make_quadratic(c: &Matrix) -> Result<QuadraticSystem> {
    let j = crate::linalg::standard_j_for(c)?;
    if !c.is_symmetric(1e-12 * c.max_abs().max(1.0)) {
        return Err(Error::Structure("C is not symmetric"));
    }
    Ok(QuadraticSystem {
        n: c.rows() / 2,
        c: c.clone(),
        b: &j * c,
    })
}

impl QuadraticSystem {
    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// Field matrix `J C`.
    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// `exp(t J C)`.
    pub fn flow_matrix(&self, t: f64) -> Matrix {
        expm(&self.b.scale(t)).expect("square")
    }
}

impl HamiltonianSystem for QuadraticSystem {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn energy(&self, z: &[f64]) -> Result<f64> {
        check_state(z, self.n)?;
        let cz = self.c.mul_vec(z);
        Ok(0.5 * z.iter().zip(&cz).map(|(a, b)| a * b).sum::<f64>())
    }

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_state(z, self.n)?;
        Ok(self.c.mul_vec(z))
    }

    fn field(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_state(z, self.n)?;
        Ok(self.b.mul_vec(z))
    }

    fn exact_flow(&self, t: f64, z: &[f64]) -> Option<Vec<f64>> {
        check_state(z, self.n).ok()?;
        Some(self.flow_matrix(t).mul_vec(z))
    }

    fn quadratic_form(&self) -> Option<&Matrix> {
        Some(&self.c)
    }
}

/// `H_hat = H o phi^{-1}`.
pub struct SurroundingHamiltonian<'a> {
    system: &'a dyn HamiltonianSystem,
    inverse: SymplecticMap,
}

impl<'a> SurroundingHamiltonian<'a> {
    pub fn energy(&self, z: &[f64]) -> Result<f64> {
        self.system.energy(&self.inverse.apply(z))
    }

    pub fn inverse_map(&self) -> &SymplecticMap {
        &self.inverse
    }
}

pub fn surrounding_hamiltonian<'a>(
    system: &'a dyn HamiltonianSystem,
    phi: &SymplecticMap,
) -> SurroundingHamiltonian<'a> {
    SurroundingHamiltonian {
        system,
        inverse: phi.inverse(),
    }
}

/// Matrix `phi^{-T} C phi^{-1}` of the surrounding Hamiltonian of a
/// quadratic `H`.
pub fn surrounding_quadratic(c: &Matrix, phi: &SymplecticMap) -> Matrix {
    let inv = phi.inverse();
    let m = inv.matrix();
    &(&m.transpose() * c) * m
}

/// The map `phi = cayley(tau H)` that defines the surrounding Hamiltonian
/// of a run; identity when no `H` is configured.
pub fn method_map(cfg: &IntegratorConfig, dim: usize) -> Result<SymplecticMap> {
    match cfg.hmat() {
        None => Ok(SymplecticMap::identity(dim / 2)),
        Some(h) => cayley(&h.scale(cfg.tau())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeaReport {
    pub system: String,
    pub tau: f64,
    pub steps: usize,
    #[serde(rename = "Hmat_norm")]
    pub hmat_norm: f64,
    #[serde(rename = "H_drift_max")]
    pub h_drift_max: f64,
    #[serde(rename = "Hhat_drift_max")]
    pub hhat_drift_max: f64,
    /// Quadratic systems only: `||exp(tau J C_fit) - M||_max` where `M` is
    /// the one-step matrix and `C_fit` the symmetric matrix fitted through
    /// its logarithm.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_quadratic_residual: Option<f64>,
    /// Quadratic systems only: `||exp(tau J C_hat) - M||_max` with
    /// `C_hat = phi^{-T} C phi^{-1}`, i.e. how far one step is from the exact
    /// flow of the surrounding Hamiltonian.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub surrounding_flow_gap: Option<f64>,
}

/// Integrates and measures the drift of `H` and of `H_hat` along the orbit.
pub fn bea_report(
    system: &dyn HamiltonianSystem,
    cfg: &IntegratorConfig,
    z0: &[f64],
) -> Result<BeaReport> {
    let traj = integrate(system, cfg, z0)?;
    let drift = |values: &mut dyn Iterator<Item = f64>| {
        let first = values.next().unwrap_or(0.0);
        values.fold(0.0f64, |m, v| m.max((v - first).abs()))
    };
    let h_drift_max = drift(&mut traj.diagnostics.iter().map(|d| d.energy));
    let hhat_drift_max = drift(&mut traj.diagnostics.iter().map(|d| d.surrounding_energy));

    let (mut fitted, mut gap) = (None, None);
    if let Some(c) = system.quadratic_form() {
        let dim = c.rows();
        let j = make_standard_j(dim / 2);
        let b = &j * c;
        let hmat = cfg
            .hmat()
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(dim, dim));
        let m = linear_one_step_matrix(&b, &hmat, cfg.tau())?;
        let generator = logm(&m)?.scale(1.0 / cfg.tau());
        // B_fit = J C_fit  =>  C_fit = -J B_fit
        let c_fit = (-&(&j * &generator)).symmetric_part();
        let refit = expm(&(&j * &c_fit).scale(cfg.tau()))?;
        fitted = Some((&refit - &m).max_abs());

        let phi = method_map(cfg, dim)?;
        let c_hat = surrounding_quadratic(c, &phi);
        let hat_flow = expm(&(&j * &c_hat).scale(cfg.tau()))?;
        gap = Some((&hat_flow - &m).max_abs());
    }

    Ok(BeaReport {
        system: String::from(system.name()),
        tau: cfg.tau(),
        steps: cfg.steps(),
        hmat_norm: cfg.hmat().map_or(0.0, Matrix::frobenius),
        h_drift_max,
        hhat_drift_max,
        fitted_quadratic_residual: fitted,
        surrounding_flow_gap: gap,
    })
}
