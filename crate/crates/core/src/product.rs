// SPDX-License-Identifier: Apache-2.0

//! The quaternionic triple on the product space `R^{2n} x R^{2n}` and the
//! construction of symplectic maps from doubly Hamiltonian Liouville fields.
//!
//! Coordinates on the product are `(x, X)` with `x` in the source copy and
//! `X` in the target copy. With the Euclidean metric the form matrix of
//! `omega_C(u, v) = <u, C v>` is `C` itself, so the three structure matrices
//! double as the three symplectic forms.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    cayley, hamiltonian_defect, make_standard_j, max_abs, max_abs_diff, min_singular_value, Matrix,
    SymplecticMap,
};
use crate::verify::{CheckRecord, VerificationReport};

/// Absolute tolerance (scaled by `max(1, |M|_max)`) for the structural
/// hypotheses on `R` and `S`.
pub const STRUCTURE_TOL: f64 = 1e-12;

fn structure_tol(m: &Matrix) -> f64 {
    STRUCTURE_TOL * m.max_abs().max(1.0)
}

/// The structure matrices `I`, `J`, `K` of size `4n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuaternionicTriple {
    n: usize,
    i: Matrix,
    j: Matrix,
    k: Matrix,
}

impl QuaternionicTriple {
    /// Builds
    /// `I = [[0, -I], [I, 0]]`, `J = [[J, 0], [0, J^T]]`, `K = [[0, J], [J, 0]]`
    /// from the `2n x 2n` Darboux matrix `J`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn new(n: usize) -> Self {
        let j2 = make_standard_j(n);
        let id = Matrix::identity(2 * n);
        let zero = Matrix::zeros(2 * n, 2 * n);
        let i = Matrix::from_blocks(&zero, &-&id, &id, &zero);
        let j = Matrix::from_blocks(&j2, &zero, &zero, &j2.transpose());
        let k = Matrix::from_blocks(&zero, &j2, &j2, &zero);
        Self { n, i, j, k }
    }

    /// Assembles a triple without checking anything, for negative controls.
    pub fn from_parts(n: usize, i: Matrix, j: Matrix, k: Matrix) -> Result<Self> {
        for m in [&i, &j, &k] {
            if m.rows() != 4 * n || m.cols() != 4 * n {
                return Err(Error::DimensionMismatch {
                    expected: 4 * n,
                    got: m.rows(),
                });
            }
        }
        Ok(Self { n, i, j, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn i(&self) -> &Matrix {
        &self.i
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    /// `[("I", I), ("J", J), ("K", K)]`.
    pub fn forms(&self) -> [(&'static str, &Matrix); 3] {
        [("I", &self.i), ("J", &self.j), ("K", &self.k)]
    }

    /// Max-norm residuals of the seven quaternion identities, in order
    /// `I^2=-1, J^2=-1, K^2=-1, IJK=-1, IJ=K, JK=I, KI=J`.
    pub fn relation_residuals(&self) -> [(&'static str, f64); 7] {
        let minus_id = Matrix::identity(4 * self.n).scale(-1.0);
        let (i, j, k) = (&self.i, &self.j, &self.k);
        let ij = i * j;
        let res = |a: &Matrix, b: &Matrix| (a - b).max_abs();
        [
            ("I^2=-1", res(&(i * i), &minus_id)),
            ("J^2=-1", res(&(j * j), &minus_id)),
            ("K^2=-1", res(&(k * k), &minus_id)),
            ("IJK=-1", res(&(&ij * k), &minus_id)),
            ("IJ=K", res(&ij, k)),
            ("JK=I", res(&(j * k), i)),
            ("KI=J", res(&(k * i), j)),
        ]
    }
}

/// One report record per quaternion identity.
pub fn verify_quaternion_relations(t: &QuaternionicTriple, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::default();
    for (name, residual) in t.relation_residuals() {
        report.push(CheckRecord::at_most(name, residual, tol));
    }
    report
}

/// A linear Liouville field `Z = W (x; X)` with `W = (I + A) / 2` and
/// `A = [[R, S], [-J S J, -R^T]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleFieldSpec {
    n: usize,
    r: Matrix,
    s: Matrix,
    a: Matrix,
    w: Matrix,
}

impl LiouvilleFieldSpec {
    /// Requires `S` symmetric and `R` Hamiltonian; `R` need not be symmetric.
    pub fn new(r: &Matrix, s: &Matrix) -> Result<Self> {
        let j = crate::linalg::standard_j_for(r)?;
        if s.rows() != r.rows() || s.cols() != r.cols() {
            return Err(Error::DimensionMismatch {
                expected: r.rows(),
                got: s.rows(),
            });
        }
        if !s.is_symmetric(structure_tol(s)) {
            return Err(Error::Structure("S"));
        }
        if hamiltonian_defect(r, &j)? > structure_tol(r) {
            return Err(Error::Structure("R"));
        }
        let n = r.rows() / 2;
        let lower_left = -&(&(&j * s) * &j);
        let a = Matrix::from_blocks(r, s, &lower_left, &-&r.transpose());
        let w = (&Matrix::identity(4 * n) + &a).scale(0.5);
        Ok(Self {
            n,
            r: r.clone(),
            s: s.clone(),
            a,
            w,
        })
    }

    /// The expanding field `Z_0 = x / 2` (`R = S = 0`).
    pub fn euler(n: usize) -> Self {
        let zero = Matrix::zeros(2 * n, 2 * n);
        Self::new(&zero, &zero).expect("zero matrices satisfy every hypothesis")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    /// The `4n x 4n` Hamiltonian part `A`.
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    /// The field matrix `W = (I + A) / 2`.
    pub fn w(&self) -> &Matrix {
        &self.w
    }
}

/// `(||A^T I + I A||, ||A^T J + J A||)`.
pub fn doubly_hamiltonian_residuals(spec: &LiouvilleFieldSpec) -> (f64, f64) {
    let t = QuaternionicTriple::new(spec.n);
    (
        hamiltonian_defect(&spec.a, t.i()).expect("dimensions agree"),
        hamiltonian_defect(&spec.a, t.j()).expect("dimensions agree"),
    )
}

/// `||A^T K + K A||_max`; zero means `A` is also `K`-Hamiltonian.
pub fn verify_k_nonhamiltonian(spec: &LiouvilleFieldSpec) -> f64 {
    let t = QuaternionicTriple::new(spec.n);
    hamiltonian_defect(&spec.a, t.k()).expect("dimensions agree")
}

/// Form matrix of `d theta` for the linear 1-form
/// `theta_x(u) = (W x)^T Omega u`, which is `W^T Omega + Omega W`.
pub fn exterior_derivative_linear(w: &Matrix, omega: &Matrix) -> Result<Matrix> {
    if !w.is_square() || w.rows() != omega.rows() || !omega.is_square() {
        return Err(Error::DimensionMismatch {
            expected: omega.rows(),
            got: w.rows(),
        });
    }
    Ok(&(&w.transpose() * omega) + &(omega * w))
}

/// `||d(i_Z omega) - omega||_max` for `Z(x) = W x`.
pub fn liouville_residual(w: &Matrix, omega: &Matrix) -> Result<f64> {
    Ok((&exterior_derivative_linear(w, omega)? - omega).max_abs())
}

pub fn is_liouville_linear(w: &Matrix, omega: &Matrix, tol: f64) -> Result<bool> {
    Ok(liouville_residual(w, omega)? <= tol)
}

fn check_len(v: &[f64], expected: usize) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got: v.len(),
        })
    }
}

/// Covector of `theta = i_Z omega` at `point`: the row `(W point)^T Omega`.
pub fn theta_eval(spec: &LiouvilleFieldSpec, omega: &Matrix, point: &[f64]) -> Result<Vec<f64>> {
    check_len(point, 4 * spec.n)?;
    if omega.rows() != 4 * spec.n || !omega.is_square() {
        return Err(Error::DimensionMismatch {
            expected: 4 * spec.n,
            got: omega.rows(),
        });
    }
    let z = spec.w.mul_vec(point);
    Ok(omega.transpose().mul_vec(&z))
}

fn concat(x: &[f64], big_x: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(x.len() + big_x.len());
    v.extend_from_slice(x);
    v.extend_from_slice(big_x);
    v
}

/// `v = Z(x, X) = W (x; X)`.
pub fn pointwise_v(spec: &LiouvilleFieldSpec, x: &[f64], big_x: &[f64]) -> Result<Vec<f64>> {
    check_len(x, 2 * spec.n)?;
    check_len(big_x, 2 * spec.n)?;
    Ok(spec.w.mul_vec(&concat(x, big_x)))
}

/// Checks the hypotheses under which the kernel equation has the Cayley
/// solution: `R` and `S` both symmetric and Hamiltonian.
fn check_map_hypotheses(r: &Matrix, s: &Matrix) -> Result<()> {
    let j = crate::linalg::standard_j_for(r)?;
    if s.rows() != r.rows() || !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: r.rows(),
            got: s.rows(),
        });
    }
    if !r.is_symmetric(structure_tol(r)) {
        return Err(Error::Structure("R is not symmetric"));
    }
    if hamiltonian_defect(r, &j)? > structure_tol(r) {
        return Err(Error::Structure("R is not Hamiltonian"));
    }
    if !s.is_symmetric(structure_tol(s)) {
        return Err(Error::Structure("S is not symmetric"));
    }
    if hamiltonian_defect(s, &j)? > structure_tol(s) {
        return Err(Error::Structure("S is not Hamiltonian"));
    }
    Ok(())
}

/// The symplectic map `x -> X` cut out by the kernel equation, i.e. the
/// Cayley image of `H = R + S`.
pub fn extract_map(r: &Matrix, s: &Matrix) -> Result<SymplecticMap> {
    check_map_hypotheses(r, s)?;
    cayley(&(r + s))
}

/// Residual of the kernel equation
/// `[-J S J x + (I - R^T) X] + [-(I + R) x - S X] = 0`.
pub fn projection_residual(spec: &LiouvilleFieldSpec, x: &[f64], big_x: &[f64]) -> Result<f64> {
    check_len(x, 2 * spec.n)?;
    check_len(big_x, 2 * spec.n)?;
    let j = make_standard_j(spec.n);
    let id = Matrix::identity(2 * spec.n);
    let jsj = &(&j * &spec.s) * &j;
    let first = {
        let a = jsj.mul_vec(x);
        let b = (&id - &spec.r.transpose()).mul_vec(big_x);
        b.iter().zip(&a).map(|(b, a)| b - a).collect::<Vec<_>>()
    };
    let second = {
        let a = (&id + &spec.r).mul_vec(x);
        let b = spec.s.mul_vec(big_x);
        a.iter().zip(&b).map(|(a, b)| -a - b).collect::<Vec<_>>()
    };
    let sum: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a + b).collect();
    Ok(max_abs(&sum))
}

/// Sum of the two `2n` blocks of `C v` for `v = W (x; X)`.
pub fn block_sum(
    c: &Matrix,
    spec: &LiouvilleFieldSpec,
    x: &[f64],
    big_x: &[f64],
) -> Result<Vec<f64>> {
    let v = pointwise_v(spec, x, big_x)?;
    let cv = c.mul_vec(&v);
    let half = 2 * spec.n;
    Ok((0..half).map(|i| cv[i] + cv[half + i]).collect())
}

/// Residuals of the two candidate readings of the perpendicular identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerpResiduals {
    /// `||J X - S (J x)||_max`, the identity as literally stated.
    pub stated: f64,
    /// `||J X - S^{-1} (J x)||_max`.
    pub inverse: f64,
}

pub fn perp_identity_report(r: &Matrix, s: &Matrix, x: &[f64]) -> Result<PerpResiduals> {
    let map = extract_map(r, s)?;
    check_len(x, map.dim())?;
    let j = make_standard_j(map.dim() / 2);
    let big_x = map.apply(x);
    let big_x_perp = j.mul_vec(&big_x);
    let x_perp = j.mul_vec(x);
    Ok(PerpResiduals {
        stated: max_abs_diff(&big_x_perp, &map.apply(&x_perp)),
        inverse: max_abs_diff(&big_x_perp, &map.inverse().apply(&x_perp)),
    })
}

/// Tangent frame `[I; S]` of the graph `{(z, S z)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFrame {
    n: usize,
    frame: Matrix,
}

impl GraphFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }
}

pub fn graph_frame(map: &SymplecticMap) -> GraphFrame {
    let dim = map.dim();
    GraphFrame {
        n: dim / 2,
        frame: Matrix::vstack(&Matrix::identity(dim), map.matrix()),
    }
}

/// Pull-back `F^T Omega F` of a form to the graph.
pub fn restriction(frame: &GraphFrame, omega: &Matrix) -> Result<Matrix> {
    let f = &frame.frame;
    if !omega.is_square() || omega.rows() != f.rows() {
        return Err(Error::DimensionMismatch {
            expected: f.rows(),
            got: omega.rows(),
        });
    }
    Ok(&(&f.transpose() * omega) * f)
}

/// How a graph sits relative to the three forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphResiduals {
    /// `||F^T I F||_max`, zero when the graph is `I`-Lagrangian.
    pub lagrangian_i: f64,
    /// `||F^T J F||_max`, zero when the graph is `J`-Lagrangian.
    pub lagrangian_j: f64,
    /// Smallest singular value of `F^T K F`, positive when the graph is a
    /// `K`-symplectic submanifold.
    pub k_min_singular: f64,
}

pub fn graph_residuals(map: &SymplecticMap) -> Result<GraphResiduals> {
    let t = QuaternionicTriple::new(map.dim() / 2);
    let frame = graph_frame(map);
    Ok(GraphResiduals {
        lagrangian_i: restriction(&frame, t.i())?.max_abs(),
        lagrangian_j: restriction(&frame, t.j())?.max_abs(),
        k_min_singular: min_singular_value(&restriction(&frame, t.k())?)?,
    })
}
