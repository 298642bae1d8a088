// SPDX-License-Identifier: Apache-2.0

//! Linear symplectic maps from a quaternionic structure on a product space.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * [`linalg`]: a small dense matrix kernel, structural predicates and the
//!   Cayley transformation,
//! * [`product`]: the quaternionic triple on `R^{4n}`, doubly Hamiltonian
//!   Liouville fields and the extraction of symplectic maps from them,
//! * [`integrator`]: the implicit one-step method parameterized by a
//!   Hamiltonian matrix, with fixed-point and Newton solvers,
//! * [`systems`]: benchmark Hamiltonian systems and surrounding-Hamiltonian
//!   diagnostics,
//! * [`verify`]: randomized verification suites producing
//!   [`verify::VerificationReport`]s.
//!
//! Conventions used throughout: `J = [[0, -I_n], [I_n, 0]]`, a form matrix
//! `W` evaluates as `u^T W v`, and Hamiltonian vector fields are
//! `X_H = J grad H`.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod integrator;
pub mod linalg;
pub mod product;
pub mod sampling;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Matrix, SymplecticMap};

/// Version tag of the sign and layout conventions listed in the crate docs.
pub const CONVENTIONS_VERSION: &str = "J=[[0,-I],[I,0]];omega(u,v)=u^T W v;X_H=J*grad(H);v1";
