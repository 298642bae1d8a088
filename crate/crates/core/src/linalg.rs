// SPDX-License-Identifier: Apache-2.0

//! Dense real matrices, structural predicates and the Cayley transformation.
//!
//! Everything here is sized for small problems (dimension up to a few dozen),
//! so matrices are plain row-major `Vec<f64>` buffers and factorizations are
//! textbook partial-pivoting LU.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hamiltonian on input.
pub const HAMILTONIAN_RTOL: f64 = 1e-12;
/// Relative floor for `|det(I +/- M)|`, measured against the Hadamard bound.
pub const NON_EXCEPTIONAL_RTOL: f64 = 1e-12;
/// Largest accepted 1-norm condition estimate for a linear solve.
pub const CONDITION_CAP: f64 = 1e12;
/// Relative tolerance for `S^T J S = J` when a map is constructed.
pub const SYMPLECTIC_CONSTRUCTION_RTOL: f64 = 1e-9;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// Builds a matrix from row-major data. Entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    ///
    /// # Panics
    /// If the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Matrix product.
    ///
    /// # Panics
    /// If the inner dimensions disagree.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    ///
    /// # Panics
    /// If `v.len() != self.cols()`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Symmetric part `(M + M^T) / 2`.
    pub fn symmetric_part(&self) -> Matrix {
        (self + &self.transpose()).scale(0.5)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.transpose()).max_abs() <= tol
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self[(r0 + r, c0 + c)];
            }
        }
        out
    }

    /// Assembles `[[a, b], [c, d]]`.
    ///
    /// # Panics
    /// If the block shapes are incompatible.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert!(a.rows == b.rows && c.rows == d.rows, "block rows differ");
        assert!(a.cols == c.cols && b.cols == d.cols, "block cols differ");
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut out = Self::zeros(rows, cols);
        for (blk, r0, c0) in [
            (a, 0, 0),
            (b, 0, a.cols),
            (c, a.rows, 0),
            (d, a.rows, a.cols),
        ] {
            for r in 0..blk.rows {
                for col in 0..blk.cols {
                    out[(r0 + r, c0 + col)] = blk[(r, col)];
                }
            }
        }
        out
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &Matrix, bottom: &Matrix) -> Matrix {
        assert_eq!(top.cols, bottom.cols, "vstack: column counts differ");
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Matrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        }
    }

    fn check_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            })
        }
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    pub fn det(&self) -> Result<f64> {
        Ok(self.lu()?.det())
    }

    /// Inverse through a conditioning-checked solve.
    pub fn inverse(&self) -> Result<Matrix> {
        solve(self, &Matrix::identity(self.rows))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "add: shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "sub: shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

/// Partial-pivoting LU factorization `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        a.check_square()?;
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[(r, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for r in k + 1..n {
                let f = lu[(r, k)] / pivot;
                lu[(r, k)] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        let u = lu[(k, c)];
                        lu[(r, c)] -= f * u;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.lu.rows).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A x = b`. Caller guarantees nonsingularity.
    fn solve_in_place(&self, b: &[f64], x: &mut [f64]) {
        let n = self.lu.rows;
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.lu.rows {
            return Err(Error::DimensionMismatch {
                expected: self.lu.rows,
                got: b.len(),
            });
        }
        if self.singular {
            return Err(Error::Conditioning {
                estimate: f64::INFINITY,
            });
        }
        let mut x = vec![0.0; b.len()];
        self.solve_in_place(b, &mut x);
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.lu.rows;
        if b.rows != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.rows,
            });
        }
        if self.singular {
            return Err(Error::Conditioning {
                estimate: f64::INFINITY,
            });
        }
        let mut out = Matrix::zeros(n, b.cols);
        let mut col = vec![0.0; n];
        let mut x = vec![0.0; n];
        for c in 0..b.cols {
            for r in 0..n {
                col[r] = b[(r, c)];
            }
            self.solve_in_place(&col, &mut x);
            for r in 0..n {
                out[(r, c)] = x[r];
            }
        }
        Ok(out)
    }
}

/// 1-norm condition number `||A||_1 ||A^-1||_1`, infinite when singular.
pub fn condition_estimate(a: &Matrix) -> Result<f64> {
    let lu = a.lu()?;
    if lu.is_singular() {
        return Ok(f64::INFINITY);
    }
    let inv = lu.solve_matrix(&Matrix::identity(a.rows))?;
    Ok(a.norm_1() * inv.norm_1())
}

/// Solves `A X = B`, refusing when the condition estimate exceeds
/// [`CONDITION_CAP`].
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let lu = a.lu()?;
    if lu.is_singular() {
        return Err(Error::Conditioning {
            estimate: f64::INFINITY,
        });
    }
    let inv = lu.solve_matrix(&Matrix::identity(a.rows))?;
    let estimate = a.norm_1() * inv.norm_1();
    if !(estimate <= CONDITION_CAP) {
        return Err(Error::Conditioning { estimate });
    }
    lu.solve_matrix(b)
}

/// Vector version of [`solve`].
pub fn solve_vec(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let rhs = Matrix::new(b.len(), 1, b.to_vec())?;
    Ok(solve(a, &rhs)?.data)
}

/// The standard Darboux matrix `[[0, -I_n], [I_n, 0]]` of size `2n`.
///
/// # Panics
/// If `n == 0`.
pub fn make_standard_j(n: usize) -> Matrix {
    assert!(n >= 1, "make_standard_j: n must be positive");
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// `J` matching the (even) dimension of `m`.
pub fn standard_j_for(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() || m.rows == 0 || !m.rows.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "expected a square matrix of even dimension",
        ));
    }
    Ok(make_standard_j(m.rows / 2))
}

fn check_pair(m: &Matrix, j: &Matrix) -> Result<()> {
    m.check_square()?;
    j.check_square()?;
    if m.rows != j.rows {
        return Err(Error::DimensionMismatch {
            expected: j.rows,
            got: m.rows,
        });
    }
    Ok(())
}

/// `||M^T J + J M||_max`.
pub fn hamiltonian_defect(m: &Matrix, j: &Matrix) -> Result<f64> {
    check_pair(m, j)?;
    Ok((&(&m.transpose() * j) + &(j * m)).max_abs())
}

pub fn is_hamiltonian(m: &Matrix, j: &Matrix, tol: f64) -> Result<bool> {
    Ok(hamiltonian_defect(m, j)? <= tol)
}

/// `||M^T J M - J||_max`.
pub fn symplectic_defect(m: &Matrix, j: &Matrix) -> Result<f64> {
    check_pair(m, j)?;
    Ok((&(&(&m.transpose() * j) * m) - j).max_abs())
}

pub fn is_symplectic(m: &Matrix, j: &Matrix, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(m, j)? <= tol)
}

/// `det(I + sign * M)` together with its Hadamard bound.
fn shifted_det(m: &Matrix, sign: f64) -> Result<(f64, f64)> {
    let shifted = &Matrix::identity(m.rows) + &m.scale(sign);
    let det = shifted.det()?;
    let bound = (0..shifted.rows)
        .map(|r| libm::sqrt(shifted.row(r).iter().map(|x| x * x).sum()))
        .product();
    Ok((det, bound))
}

/// True iff `|det(I - M)| > threshold` and `|det(I + M)| > threshold`.
pub fn is_non_exceptional(m: &Matrix, threshold: f64) -> bool {
    match (shifted_det(m, -1.0), shifted_det(m, 1.0)) {
        (Ok((dm, _)), Ok((dp, _))) => dm.abs() > threshold && dp.abs() > threshold,
        _ => false,
    }
}

/// Non-exceptional test with the threshold scaled by the Hadamard bound of
/// `I +/- M`, which is the largest determinant those rows can produce.
pub fn is_non_exceptional_scaled(m: &Matrix) -> bool {
    match (shifted_det(m, -1.0), shifted_det(m, 1.0)) {
        (Ok((dm, bm)), Ok((dp, bp))) => {
            dm.abs() > NON_EXCEPTIONAL_RTOL * bm && dp.abs() > NON_EXCEPTIONAL_RTOL * bp
        }
        _ => false,
    }
}

/// A matrix validated to satisfy `S^T J S = J`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMap {
    matrix: Matrix,
}

impl fmt::Debug for SymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SymplecticMap").field(&self.matrix).finish()
    }
}

impl SymplecticMap {
    /// Validates `matrix` against `J` with absolute tolerance `tol`.
    pub fn new(matrix: Matrix, tol: f64) -> Result<Self> {
        let j = standard_j_for(&matrix)?;
        if !is_symplectic(&matrix, &j, tol)? {
            return Err(Error::Structure("matrix is not symplectic"));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(2 * n),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(z)
    }

    /// Symplectic inverse `-J S^T J`.
    pub fn inverse(&self) -> SymplecticMap {
        let j = make_standard_j(self.dim() / 2);
        SymplecticMap {
            matrix: -&(&(&j * &self.matrix.transpose()) * &j),
        }
    }
}

/// Cayley transformation `(I - H)^{-1} (I + H)` of a Hamiltonian matrix.
pub fn cayley(h: &Matrix) -> Result<SymplecticMap> {
    let j = standard_j_for(h)?;
    let scale = h.max_abs().max(1.0);
    if hamiltonian_defect(h, &j)? > HAMILTONIAN_RTOL * scale {
        return Err(Error::Structure("H is not Hamiltonian"));
    }
    if !is_non_exceptional_scaled(h) {
        return Err(Error::ExceptionalMatrix);
    }
    let id = Matrix::identity(h.rows);
    let s = solve(&(&id - h), &(&id + h))?;
    let defect = symplectic_defect(&s, &j)?;
    let norm = s.max_abs().max(1.0);
    if defect > SYMPLECTIC_CONSTRUCTION_RTOL * norm * norm {
        return Err(Error::Conditioning {
            estimate: condition_estimate(&(&id - h))?,
        });
    }
    Ok(SymplecticMap { matrix: s })
}

/// Inverse Cayley transformation `(S - I)(S + I)^{-1}`.
pub fn inverse_cayley(s: &SymplecticMap) -> Result<Matrix> {
    let m = s.matrix();
    let id = Matrix::identity(m.rows);
    let plus = m + &id;
    let (det, bound) = shifted_det(m, 1.0)?;
    if det.abs() <= NON_EXCEPTIONAL_RTOL * bound {
        return Err(Error::ExceptionalMatrix);
    }
    // S - I and S + I commute, so the left solve gives the same matrix.
    solve(&plus, &(m - &id))
}

/// Evaluates the bilinear form `u^T Omega v`.
pub fn form_eval(omega: &Matrix, u: &[f64], v: &[f64]) -> Result<f64> {
    omega.check_square()?;
    for len in [u.len(), v.len()] {
        if len != omega.rows {
            return Err(Error::DimensionMismatch {
                expected: omega.rows,
                got: len,
            });
        }
    }
    let ov = omega.mul_vec(v);
    Ok(u.iter().zip(&ov).map(|(a, b)| a * b).sum())
}

/// Matrix exponential by scaling and squaring of a degree-20 Taylor
/// polynomial (scaled norm at most 1/2).
pub fn expm(a: &Matrix) -> Result<Matrix> {
    a.check_square()?;
    let n = a.rows;
    let norm = a.norm_1();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = libm::ceil(libm::log2(norm / 0.5)) as u32;
    }
    let scaled = a.scale(libm::ldexp(1.0, -(squarings as i32)));
    // Horner: I + A(I + A/2(I + A/3(...)))
    let id = Matrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=20).rev() {
        acc = &id + &(&scaled * &acc).scale(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Square roots use the Denman-Beavers iteration; the remaining factor near
/// the identity is handled by the series `2 atanh((X - I)(X + I)^{-1})`.
pub fn logm(a: &Matrix) -> Result<Matrix> {
    a.check_square()?;
    let n = a.rows;
    let id = Matrix::identity(n);
    let mut x = a.clone();
    let mut roots = 0i32;
    while (&x - &id).norm_1() > 0.25 {
        if roots >= 60 {
            return Err(Error::Convergence {
                iterations: roots as usize,
                residual: (&x - &id).norm_1(),
            });
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    let y = solve(&(&x + &id), &(&x - &id))?;
    let y2 = &y * &y;
    let mut term = y.clone();
    let mut sum = y;
    for k in 1..40 {
        term = &term * &y2;
        let add = term.scale(1.0 / (2 * k + 1) as f64);
        if add.max_abs() == 0.0 {
            break;
        }
        sum = &sum + &add;
    }
    Ok(sum.scale(libm::ldexp(2.0, roots)))
}

fn sqrtm(a: &Matrix) -> Result<Matrix> {
    let mut y = a.clone();
    let mut z = Matrix::identity(a.rows);
    for it in 0..100 {
        let y_next = (&y + &z.inverse()?).scale(0.5);
        let z_next = (&z + &y.inverse()?).scale(0.5);
        let change = (&y_next - &y).max_abs();
        y = y_next;
        z = z_next;
        if change <= 1e-15 * y.max_abs().max(1.0) {
            return Ok(y);
        }
        if it == 99 {
            return Err(Error::Convergence {
                iterations: 100,
                residual: change,
            });
        }
    }
    unreachable!()
}

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    a.check_square()?;
    let n = a.rows;
    let mut m = a.symmetric_part();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        let scale = m.frobenius();
        if off <= 1e-30 * scale * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Singular values, ascending, via the eigenvalues of `A^T A`.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let gram = &a.transpose() * a;
    Ok(symmetric_eigenvalues(&gram)?
        .into_iter()
        .map(|x| libm::sqrt(x.max(0.0)))
        .collect())
}

pub fn min_singular_value(a: &Matrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// `max_i |a_i - b_i|`.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
