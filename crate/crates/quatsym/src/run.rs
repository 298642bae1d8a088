// SPDX-License-Identifier: Apache-2.0

//! Run configuration shared by the command-line front end: system and
//! `H`-matrix selectors, state parsing and the configuration echo written
//! into every output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use quatsym_core::sampling::{random_hamiltonian, scale_to_frobenius};
use quatsym_core::systems::{
    make_harmonic_oscillator, make_kepler, make_pendulum, make_quadratic, HamiltonianSystem,
};
use quatsym_core::{Matrix, CONVENTIONS_VERSION};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_io::read_matrix_file;

/// Resolved configuration of a run, kept sorted by key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RunHeader(BTreeMap<String, String>);

impl RunHeader {
    /// A header carrying the command name and the conventions tag.
    pub fn for_command(command: &str) -> Self {
        let mut h = Self::default();
        h.set("command", command);
        h.set("conventions", CONVENTIONS_VERSION);
        h
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.0.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// A JSON document: the configuration echo under `config`, next to the
/// fields of `body`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub config: RunHeader,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Oscillator,
    Pendulum,
    Kepler,
    Quadratic(PathBuf),
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oscillator" => Ok(Self::Oscillator),
            "pendulum" => Ok(Self::Pendulum),
            "kepler" => Ok(Self::Kepler),
            _ => match s.strip_prefix("quadratic:") {
                Some(path) if !path.is_empty() => Ok(Self::Quadratic(path.into())),
                _ => Err(Error::input(
                    "--system",
                    format!("unknown system {s:?}; expected oscillator, pendulum, kepler or quadratic:<path>"),
                )),
            },
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Oscillator => f.write_str("oscillator"),
            Self::Pendulum => f.write_str("pendulum"),
            Self::Kepler => f.write_str("kepler"),
            Self::Quadratic(p) => write!(f, "quadratic:{}", p.display()),
        }
    }
}

impl SystemSpec {
    /// Builds the system. `n` is the number of degrees of freedom; systems
    /// with a fixed size reject any other value.
    pub fn build(&self, n: Option<usize>) -> Result<Box<dyn HamiltonianSystem>> {
        let fixed = |expected: usize| match n {
            Some(n) if n != expected => Err(Error::input(
                "--n",
                format!("{self} has n = {expected}, got {n}"),
            )),
            _ => Ok(()),
        };
        let sys: Box<dyn HamiltonianSystem> = match self {
            Self::Oscillator => {
                let n = n.unwrap_or(1);
                Box::new(
                    make_harmonic_oscillator(n).map_err(|e| Error::input("--n", e.to_string()))?,
                )
            }
            Self::Pendulum => {
                fixed(1)?;
                Box::new(make_pendulum())
            }
            Self::Kepler => {
                fixed(2)?;
                Box::new(make_kepler())
            }
            Self::Quadratic(path) => {
                let c = read_matrix_file(path)?;
                let sys = make_quadratic(&c)
                    .map_err(|e| Error::input(path.display().to_string(), e.to_string()))?;
                fixed(sys.n())?;
                Box::new(sys)
            }
        };
        Ok(sys)
    }

    /// Initial state used when none is given.
    pub fn default_state(&self, dim: usize) -> Vec<f64> {
        match self {
            Self::Kepler => vec![1.0, 0.0, 0.0, 1.0],
            _ => {
                let mut z = vec![0.0; dim];
                if let Some(first) = z.first_mut() {
                    *first = 1.0;
                }
                z
            }
        }
    }
}

/// Source of the matrix `H` that parameterizes the integrator.
#[derive(Debug, Clone, PartialEq)]
pub enum HmatSpec {
    Zero,
    File(PathBuf),
    /// Seeded random Hamiltonian matrix with this Frobenius norm.
    Random(f64),
}

impl FromStr for HmatSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(Self::Zero);
        }
        if let Some(norm) = s.strip_prefix("random:") {
            let norm: f64 = norm
                .parse()
                .map_err(|_| Error::input("--hmat", format!("bad norm in {s:?}")))?;
            if !norm.is_finite() || norm < 0.0 {
                return Err(Error::input(
                    "--hmat",
                    "norm must be finite and non-negative",
                ));
            }
            return Ok(Self::Random(norm));
        }
        if s.is_empty() {
            return Err(Error::input("--hmat", "empty value"));
        }
        Ok(Self::File(s.into()))
    }
}

impl fmt::Display for HmatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::File(p) => write!(f, "{}", p.display()),
            Self::Random(norm) => write!(f, "random:{norm}"),
        }
    }
}

impl HmatSpec {
    /// The matrix for a phase space of dimension `dim`, or `None` for zero.
    pub fn resolve(&self, dim: usize, seed: u64) -> Result<Option<Matrix>> {
        match self {
            Self::Zero => Ok(None),
            Self::File(path) => {
                let m = read_matrix_file(path)?;
                if m.rows() != dim || m.cols() != dim {
                    return Err(Error::input(
                        path.display().to_string(),
                        format!(
                            "expected a {dim}x{dim} matrix, got {}x{}",
                            m.rows(),
                            m.cols()
                        ),
                    ));
                }
                Ok(Some(m))
            }
            Self::Random(norm) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hamiltonian(&mut rng, dim / 2);
                Ok(Some(scale_to_frobenius(&h, *norm)))
            }
        }
    }
}

/// Parses a comma-separated state and checks its length.
pub fn parse_state(text: &str, dim: usize) -> Result<Vec<f64>> {
    let z = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::input("--z0", format!("bad number {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if z.len() != dim {
        return Err(Error::input(
            "--z0",
            format!("expected {dim} components, got {}", z.len()),
        ));
    }
    Ok(z)
}

pub fn format_state(z: &[f64]) -> String {
    z.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Writes `bytes` to `path`, or to standard output when `path` is `None` or `-`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, bytes).map_err(|e| Error::io(p, e)),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}
