// SPDX-License-Identifier: Apache-2.0

//! Randomized verification suites over the algebraic identities.
//!
//! Every suite draws its trials from a ChaCha stream keyed by
//! `(seed, suite, trial)`, so results do not depend on the order in which
//! trials are run.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::integrator::fit_loglog_slope;
use crate::linalg::{
    cayley, expm, form_eval, hamiltonian_defect, inverse_cayley, make_standard_j,
    symplectic_defect, Matrix,
};
use crate::product::{
    doubly_hamiltonian_residuals, extract_map, graph_residuals, liouville_residual,
    perp_identity_report, projection_residual, verify_k_nonhamiltonian, LiouvilleFieldSpec,
    QuaternionicTriple,
};
use crate::sampling;

/// How a record's residual is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Passes when `residual <= tolerance`.
    AtMost,
    /// Passes when `residual > tolerance`.
    Above,
    /// Measured only; always passes.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    /// Absent for [`Relation::Info`] records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub relation: Relation,
    pub passed: bool,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance: Some(tolerance),
            relation: Relation::AtMost,
            passed: residual <= tolerance,
        }
    }

    pub fn above(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance: Some(tolerance),
            relation: Relation::Above,
            passed: residual > tolerance,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: None,
            relation: Relation::Info,
            passed: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
    }

    pub fn records(&self) -> &[CheckRecord] {
        &self.records
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

impl fmt::Display for VerificationReport {
    /// One line per record: `PASS|FAIL|INFO name residual relation tolerance`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            let (tag, rel) = match (r.relation, r.passed) {
                (Relation::Info, _) => ("INFO", "--"),
                (Relation::AtMost, true) => ("PASS", "<="),
                (Relation::AtMost, false) => ("FAIL", "<="),
                (Relation::Above, true) => ("PASS", ">"),
                (Relation::Above, false) => ("FAIL", ">"),
            };
            match r.tolerance {
                Some(tol) if r.relation != Relation::Info => writeln!(
                    f,
                    "{tag} {:<48} residual={:.6e} {rel} {tol:.1e}",
                    r.name, r.residual
                )?,
                _ => writeln!(f, "{tag} {:<48} value={:.6e}", r.name, r.residual)?,
            }
        }
        Ok(())
    }
}

/// Thresholds for every suite; defaults mirror the acceptance criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quaternion: f64,
    pub doubly_hamiltonian: f64,
    /// Lower bound for the `K`-defect when `R` has a nonzero symmetric part.
    pub k_defect_floor: f64,
    pub liouville: f64,
    pub cayley: f64,
    pub roundtrip: f64,
    /// Lower bound on the observed order of `cayley(H) - exp(2H)`.
    pub cayley_exp_order: f64,
    pub lagrangian: f64,
    /// Lower bound on the smallest singular value of the `K` restriction.
    pub k_min_singular: f64,
    pub projection: f64,
    pub perp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quaternion: 1e-12,
            doubly_hamiltonian: 1e-12,
            k_defect_floor: 1e-6,
            liouville: 1e-12,
            cayley: 1e-10,
            roundtrip: 1e-10,
            cayley_exp_order: 2.8,
            lagrangian: 1e-10,
            k_min_singular: 1e-8,
            projection: 1e-10,
            perp: 1e-10,
        }
    }
}

impl Tolerances {
    /// Replaces every upper-bound residual tolerance by `tol`.
    pub fn with_residual_tol(self, tol: f64) -> Self {
        Self {
            quaternion: tol,
            doubly_hamiltonian: tol,
            liouville: tol,
            cayley: tol,
            roundtrip: tol,
            lagrangian: tol,
            projection: tol,
            perp: tol,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Half-dimensions `n` to draw from (uniformly per trial).
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl SuiteConfig {
    pub fn new(dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            dims,
            trials,
            seed,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy)]
enum Suite {
    DoublyHamiltonian = 1,
    Cayley = 2,
    Graph = 3,
    Perp = 4,
    Forms = 5,
    CayleyExp = 6,
}

fn trial_rng(seed: u64, suite: Suite, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 40) | trial as u64);
    rng
}

fn pick_n(rng: &mut ChaCha8Rng, dims: &[usize]) -> usize {
    dims[rng.gen_range(0..dims.len())]
}

/// Tracks a running maximum (or minimum) across trials.
struct Extreme {
    value: f64,
    minimum: bool,
}

impl Extreme {
    fn max() -> Self {
        Self {
            value: 0.0,
            minimum: false,
        }
    }

    fn min() -> Self {
        Self {
            value: f64::INFINITY,
            minimum: true,
        }
    }

    fn update(&mut self, x: f64) {
        // NaN poisons the extreme so it cannot pass silently.
        if x.is_nan() || self.value.is_nan() {
            self.value = f64::NAN;
        } else if self.minimum {
            self.value = self.value.min(x);
        } else {
            self.value = self.value.max(x);
        }
    }
}

/// Seven quaternion identities, maximized over `cfg.dims`.
pub fn quaternion_suite(cfg: &SuiteConfig) -> VerificationReport {
    quaternion_suite_with(cfg, QuaternionicTriple::new)
}

/// Same as [`quaternion_suite`] with a caller-supplied triple builder, used
/// for negative controls.
pub fn quaternion_suite_with(
    cfg: &SuiteConfig,
    build: impl Fn(usize) -> QuaternionicTriple,
) -> VerificationReport {
    let mut worst: Option<[(&'static str, f64); 7]> = None;
    for &n in &cfg.dims {
        let res = build(n).relation_residuals();
        worst = Some(match worst {
            None => res,
            Some(mut w) => {
                for (slot, (_, r)) in w.iter_mut().zip(res) {
                    slot.1 = slot.1.max(r);
                }
                w
            }
        });
    }
    let mut report = VerificationReport::default();
    for (name, residual) in worst.unwrap_or_default() {
        report.push(CheckRecord::at_most(
            format!("quaternion {name}"),
            residual,
            cfg.tolerances.quaternion,
        ));
    }
    report
}

/// Doubly Hamiltonian `A`, its `K`-defect and the Liouville property of
/// `W = (I + A) / 2`.
pub fn doubly_hamiltonian_suite(cfg: &SuiteConfig) -> VerificationReport {
    let tol = cfg.tolerances;
    let mut res_i = Extreme::max();
    let mut res_j = Extreme::max();
    let mut k_floor = Extreme::min();
    let mut liouville_ij = Extreme::max();
    let mut liouville_k_gap = Extreme::max();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, Suite::DoublyHamiltonian, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let r = if trial % 2 == 0 {
            sampling::random_hamiltonian(&mut rng, n)
        } else {
            sampling::random_symmetric_hamiltonian(&mut rng, n)
        };
        let s = sampling::random_symmetric(&mut rng, 2 * n);
        let spec =
            LiouvilleFieldSpec::new(&r, &s).expect("generated inputs satisfy the hypotheses");
        let (ri, rj) = doubly_hamiltonian_residuals(&spec);
        res_i.update(ri);
        res_j.update(rj);
        let k_defect = verify_k_nonhamiltonian(&spec);
        if r.symmetric_part().max_abs() > 1e-3 {
            k_floor.update(k_defect);
        }
        let t = QuaternionicTriple::new(n);
        for omega in [t.i(), t.j()] {
            liouville_ij.update(liouville_residual(spec.w(), omega).expect("dims"));
        }
        // W^T K + K W - K = (A^T K + K A) / 2
        let lk = liouville_residual(spec.w(), t.k()).expect("dims");
        liouville_k_gap.update((lk - 0.5 * k_defect).abs());
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::at_most(
        "doubly hamiltonian A^T I + I A = 0",
        res_i.value,
        tol.doubly_hamiltonian,
    ));
    report.push(CheckRecord::at_most(
        "doubly hamiltonian A^T J + J A = 0",
        res_j.value,
        tol.doubly_hamiltonian,
    ));
    report.push(CheckRecord::above(
        "K-defect (R with symmetric part)",
        k_floor.value,
        tol.k_defect_floor,
    ));
    report.push(CheckRecord::at_most(
        "liouville W=(I+A)/2 for I and J",
        liouville_ij.value,
        tol.liouville,
    ));
    report.push(CheckRecord::at_most(
        "liouville W for K equals K-defect/2",
        liouville_k_gap.value,
        tol.liouville,
    ));
    report
}

/// The expanding field `x / 2` is Liouville for all three forms.
pub fn euler_suite(cfg: &SuiteConfig) -> VerificationReport {
    let mut worst = [0.0f64; 3];
    for &n in &cfg.dims {
        let w = Matrix::identity(4 * n).scale(0.5);
        for (slot, (_, omega)) in worst.iter_mut().zip(QuaternionicTriple::new(n).forms()) {
            *slot = slot.max(liouville_residual(&w, omega).expect("dims"));
        }
    }
    let mut report = VerificationReport::default();
    for (name, r) in ["I", "J", "K"].iter().zip(worst) {
        report.push(CheckRecord::at_most(
            format!("euler field Liouville for {name}"),
            r,
            cfg.tolerances.liouville,
        ));
    }
    report
}

/// Cayley symplecticity, inverse round trip, and the Hamiltonian predicate
/// cross-checked against "J M symmetric".
pub fn cayley_suite(cfg: &SuiteConfig) -> VerificationReport {
    let tol = cfg.tolerances;
    let mut sympl = Extreme::max();
    let mut roundtrip = Extreme::max();
    let mut inverse_ham = Extreme::max();
    let mut failures = 0usize;
    let mut predicate_mismatch = 0usize;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, Suite::Cayley, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let j = make_standard_j(n);
        let h = sampling::random_cayley_input(&mut rng, n, 1.0);
        match cayley(&h) {
            Ok(s) => {
                sympl.update(symplectic_defect(s.matrix(), &j).expect("dims"));
                match inverse_cayley(&s) {
                    Ok(back) => {
                        roundtrip.update((&back - &h).max_abs());
                        inverse_ham.update(hamiltonian_defect(&back, &j).expect("dims"));
                    }
                    Err(_) => failures += 1,
                }
            }
            Err(_) => failures += 1,
        }
        // Dual route: M^T J + J M = 0 iff J M symmetric.
        let m = if rng.gen_bool(0.5) {
            sampling::random_hamiltonian(&mut rng, n)
        } else {
            sampling::random_matrix(&mut rng, 2 * n, 2 * n)
        };
        let a = hamiltonian_defect(&m, &j).expect("dims") <= 1e-12;
        let b = (&j * &m).is_symmetric(1e-12);
        if a != b {
            predicate_mismatch += 1;
        }
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::at_most(
        "cayley S^T J S = J",
        sympl.value,
        tol.cayley,
    ));
    report.push(CheckRecord::at_most(
        "cayley inverse round trip",
        roundtrip.value,
        tol.roundtrip,
    ));
    report.push(CheckRecord::at_most(
        "inverse cayley is Hamiltonian",
        inverse_ham.value,
        tol.roundtrip,
    ));
    report.push(CheckRecord::at_most(
        "cayley construction failures",
        failures as f64,
        0.0,
    ));
    report.push(CheckRecord::at_most(
        "hamiltonian predicate dual-route mismatches",
        predicate_mismatch as f64,
        0.0,
    ));
    report
}

/// Observed order of `||cayley(eps H) - exp(2 eps H)||` in `eps`.
pub fn cayley_exp_order(h: &Matrix) -> f64 {
    let points: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&eps| {
            let he = h.scale(eps / h.max_abs().max(f64::MIN_POSITIVE));
            let c = cayley(&he).expect("small H is admissible");
            let e = expm(&he.scale(2.0)).expect("square");
            (eps, (c.matrix() - &e).max_abs())
        })
        .collect();
    fit_loglog_slope(&points)
}

pub fn cayley_exp_suite(cfg: &SuiteConfig) -> VerificationReport {
    let mut worst = Extreme::min();
    for trial in 0..cfg.trials.min(20) {
        let mut rng = trial_rng(cfg.seed, Suite::CayleyExp, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let h = sampling::random_hamiltonian(&mut rng, n);
        worst.update(cayley_exp_order(&h));
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::above(
        "cayley(H) - exp(2H) observed order",
        worst.value,
        cfg.tolerances.cayley_exp_order,
    ));
    report
}

/// Graph of the extracted map: `I`/`J`-Lagrangian, `K`-symplectic, plus the
/// kernel equation at random probe points.
pub fn graph_suite(cfg: &SuiteConfig, probes: usize) -> VerificationReport {
    let tol = cfg.tolerances;
    let mut lag_i = Extreme::max();
    let mut lag_j = Extreme::max();
    let mut k_sv = Extreme::min();
    let mut proj = Extreme::max();
    let mut map_sym = Extreme::max();
    let mut map_sympl = Extreme::max();
    let mut failures = 0usize;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, Suite::Graph, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let (r, s) = sampling::random_admissible_pair(&mut rng, n, 1.0);
        let Ok(map) = extract_map(&r, &s) else {
            failures += 1;
            continue;
        };
        let g = graph_residuals(&map).expect("dims");
        lag_i.update(g.lagrangian_i);
        lag_j.update(g.lagrangian_j);
        k_sv.update(g.k_min_singular);
        let m = map.matrix();
        map_sym.update((m - &m.transpose()).max_abs());
        map_sympl.update(symplectic_defect(m, &make_standard_j(n)).expect("dims"));
        let spec = LiouvilleFieldSpec::new(&r, &s).expect("admissible pair");
        for _ in 0..probes {
            let x = sampling::random_vector(&mut rng, 2 * n);
            proj.update(projection_residual(&spec, &x, &map.apply(&x)).expect("dims"));
        }
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::at_most(
        "graph I-Lagrangian",
        lag_i.value,
        tol.lagrangian,
    ));
    report.push(CheckRecord::at_most(
        "graph J-Lagrangian",
        lag_j.value,
        tol.lagrangian,
    ));
    report.push(CheckRecord::above(
        "graph K-symplectic (min singular value)",
        k_sv.value,
        tol.k_min_singular,
    ));
    report.push(CheckRecord::at_most(
        "projection residual",
        proj.value,
        tol.projection,
    ));
    report.push(CheckRecord::at_most(
        "extracted map symmetric",
        map_sym.value,
        tol.lagrangian,
    ));
    report.push(CheckRecord::at_most(
        "extracted map symplectic",
        map_sympl.value,
        tol.lagrangian,
    ));
    report.push(CheckRecord::at_most(
        "extraction failures",
        failures as f64,
        0.0,
    ));
    report
}

/// `J X` against `S (J x)` (as literally stated, measured only) and
/// `S^{-1} (J x)` (asserted).
pub fn perp_suite(cfg: &SuiteConfig) -> VerificationReport {
    let mut inverse = Extreme::max();
    let mut stated_max = Extreme::max();
    let mut stated_min = Extreme::min();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, Suite::Perp, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let (r, s) = sampling::random_admissible_pair(&mut rng, n, 1.0);
        let x = sampling::random_vector(&mut rng, 2 * n);
        let p = perp_identity_report(&r, &s, &x).expect("admissible pair");
        inverse.update(p.inverse);
        stated_max.update(p.stated);
        stated_min.update(p.stated);
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::at_most(
        "perp identity with inverse map",
        inverse.value,
        cfg.tolerances.perp,
    ));
    report.push(CheckRecord::info(
        "perp identity as stated (max residual)",
        stated_max.value,
    ));
    report.push(CheckRecord::info(
        "perp identity as stated (min residual)",
        stated_min.value,
    ));
    report
}

/// Antisymmetry and bilinearity of the three product forms.
pub fn forms_suite(cfg: &SuiteConfig) -> VerificationReport {
    let mut worst = Extreme::max();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, Suite::Forms, trial);
        let n = pick_n(&mut rng, &cfg.dims);
        let t = QuaternionicTriple::new(n);
        let u = sampling::random_vector(&mut rng, 4 * n);
        let v = sampling::random_vector(&mut rng, 4 * n);
        let w = sampling::random_vector(&mut rng, 4 * n);
        let a: f64 = rng.gen_range(-2.0..2.0);
        let av_w: Vec<f64> = v.iter().zip(&w).map(|(v, w)| a * v + w).collect();
        for (_, omega) in t.forms() {
            let uv = form_eval(omega, &u, &v).expect("dims");
            let vu = form_eval(omega, &v, &u).expect("dims");
            let uu = form_eval(omega, &u, &u).expect("dims");
            let lin = form_eval(omega, &u, &av_w).expect("dims");
            let uw = form_eval(omega, &u, &w).expect("dims");
            worst.update((uv + vu).abs());
            worst.update(uu.abs());
            worst.update((lin - (a * uv + uw)).abs());
        }
    }
    let mut report = VerificationReport::default();
    report.push(CheckRecord::at_most(
        "forms bilinear and antisymmetric",
        worst.value,
        cfg.tolerances.doubly_hamiltonian,
    ));
    report
}

/// Every suite above, in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> VerificationReport {
    run_all_with(cfg, QuaternionicTriple::new)
}

/// [`run_all`] with the quaternion identities checked on a caller-supplied
/// triple.
pub fn run_all_with(
    cfg: &SuiteConfig,
    build: impl Fn(usize) -> QuaternionicTriple,
) -> VerificationReport {
    let mut report = quaternion_suite_with(cfg, build);
    report.extend(doubly_hamiltonian_suite(cfg));
    report.extend(euler_suite(cfg));
    report.extend(forms_suite(cfg));
    report.extend(cayley_suite(cfg));
    report.extend(cayley_exp_suite(cfg));
    report.extend(graph_suite(cfg, 10));
    report.extend(perp_suite(cfg));
    report
}
