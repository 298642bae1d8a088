// SPDX-License-Identifier: Apache-2.0

//! File formats and the command-line front end for [`quatsym_core`].
//!
//! * [`matrix_io`]: plain-text matrix files,
//! * [`trajectory`]: trajectory CSV files,
//! * [`run`]: system and `H`-matrix selectors and the configuration echo,
//! * [`cli`]: the `quatsym` commands.

pub mod cli;
pub mod error;
pub mod matrix_io;
pub mod run;
pub mod trajectory;

pub use error::{Error, Result};
pub use quatsym_core as core;
