// SPDX-License-Identifier: Apache-2.0

//! Random structured matrices for property suites.
//!
//! Symmetric Hamiltonian matrices are exactly the symmetric matrices that
//! anticommute with `J`. For symmetric `M` the map `M -> (M + J M J) / 2`
//! is the orthogonal projection onto that subspace (it fixes matrices with
//! `J M J = M`, and `J M J = M` is equivalent to `M J = -J M`).

use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::{is_non_exceptional, make_standard_j, Matrix};

/// Draws with `|det(I +/- H)|` below this are rejected.
pub const REJECT_DET: f64 = 1e-8;

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).expect("finite by construction")
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    random_matrix(rng, dim, dim).symmetric_part()
}

/// General Hamiltonian `J C` with `C` symmetric, size `2n`.
pub fn random_hamiltonian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    &make_standard_j(n) * &random_symmetric(rng, 2 * n)
}

/// Hamiltonian and symmetric at once.
pub fn random_symmetric_hamiltonian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    project_symmetric_hamiltonian(&random_symmetric(rng, 2 * n))
}

/// Projects a symmetric `2n x 2n` matrix onto the symmetric Hamiltonian
/// subspace.
pub fn project_symmetric_hamiltonian(m: &Matrix) -> Matrix {
    let j = make_standard_j(m.rows() / 2);
    (m + &(&(&j * m) * &j)).scale(0.5)
}

/// Rescales to the requested Frobenius norm (zero stays zero).
pub fn scale_to_frobenius(m: &Matrix, target: f64) -> Matrix {
    let f = m.frobenius();
    if f == 0.0 {
        m.clone()
    } else {
        m.scale(target / f)
    }
}

/// Random Hamiltonian `H` with `||H||_F <= max_norm` (the norm itself is
/// drawn uniformly), rejecting near-exceptional draws.
pub fn random_cayley_input<R: Rng + ?Sized>(rng: &mut R, n: usize, max_norm: f64) -> Matrix {
    loop {
        let target = rng.gen_range(0.0..=max_norm);
        let h = scale_to_frobenius(&random_hamiltonian(rng, n), target);
        if is_non_exceptional(&h, REJECT_DET) {
            return h;
        }
    }
}

/// `(R, S)` both symmetric Hamiltonian with `R + S` non-exceptional.
///
/// Each factor has Frobenius norm at most `max_norm / 2`.
pub fn random_admissible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_norm: f64,
) -> (Matrix, Matrix) {
    loop {
        let r = scale_to_frobenius(
            &random_symmetric_hamiltonian(rng, n),
            rng.gen_range(0.0..=0.5 * max_norm),
        );
        let s = scale_to_frobenius(
            &random_symmetric_hamiltonian(rng, n),
            rng.gen_range(0.0..=0.5 * max_norm),
        );
        if is_non_exceptional(&(&r + &s), REJECT_DET) {
            return (r, s);
        }
    }
}
