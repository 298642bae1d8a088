// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use quatsym_core::integrator::jacobian_defect;
use quatsym_core::linalg::{
    cayley, expm, form_eval, inverse_cayley, is_hamiltonian, make_standard_j, symplectic_defect,
};
use quatsym_core::product::{extract_map, graph_residuals, QuaternionicTriple};
use quatsym_core::sampling::{
    random_admissible_pair, random_cayley_input, random_symmetric, random_vector,
};
use quatsym_core::systems::{
    make_harmonic_oscillator, make_quadratic, surrounding_hamiltonian, HamiltonianSystem,
};
use quatsym_core::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forms_are_bilinear_and_antisymmetric(
        n in 1usize..4,
        seed in any::<u64>(),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let mut rng = seeded(seed);
        let dim = 4 * n;
        let (u, v, w) = (random_vector(&mut rng, dim), random_vector(&mut rng, dim), random_vector(&mut rng, dim));
        let t = QuaternionicTriple::new(n);
        for (_, omega) in t.forms() {
            let lin: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            let lhs = form_eval(omega, &lin, &w).unwrap();
            let rhs = a * form_eval(omega, &u, &w).unwrap() + b * form_eval(omega, &v, &w).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
            let anti = form_eval(omega, &u, &v).unwrap() + form_eval(omega, &v, &u).unwrap();
            prop_assert!(anti.abs() <= 1e-12);
            prop_assert_eq!(form_eval(omega, &u, &u).unwrap().abs() <= 1e-12, true);
        }
    }

    #[test]
    fn cayley_round_trip(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let h = random_cayley_input(&mut rng, n, 1.0);
        let s = cayley(&h).unwrap();
        let j = make_standard_j(n);
        prop_assert!(symplectic_defect(s.matrix(), &j).unwrap() <= 1e-10);
        let back = inverse_cayley(&s).unwrap();
        prop_assert!((&back - &h).max_abs() <= 1e-10);
        prop_assert!(is_hamiltonian(&back, &j, 1e-10).unwrap());
        let inv = s.inverse();
        prop_assert!((&(s.matrix() * inv.matrix()) - &Matrix::identity(2 * n)).max_abs() <= 1e-10);
    }

    #[test]
    fn cayley_of_negated_input_is_inverse(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let h = random_cayley_input(&mut rng, n, 1.0);
        let s = cayley(&h).unwrap();
        let s_neg = cayley(&h.scale(-1.0)).unwrap();
        prop_assert!((&(s.matrix() * s_neg.matrix()) - &Matrix::identity(2 * n)).max_abs() <= 1e-10);
    }

    #[test]
    fn extracted_maps_are_symmetric_symplectic(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (r, s) = random_admissible_pair(&mut rng, n, 1.0);
        let map = extract_map(&r, &s).unwrap();
        let m = map.matrix();
        prop_assert!((m - &m.transpose()).max_abs() <= 1e-10);
        prop_assert!(symplectic_defect(m, &make_standard_j(n)).unwrap() <= 1e-10);
        let g = graph_residuals(&map).unwrap();
        prop_assert!(g.k_min_singular >= 2.0 - 1e-8);
    }

    #[test]
    fn oscillator_flow_is_a_group(
        s in -5.0f64..5.0,
        t in -5.0f64..5.0,
        z in vec_strategy(4),
    ) {
        let osc = make_harmonic_oscillator(2).unwrap();
        prop_assert_eq!(osc.exact_flow(0.0, &z).unwrap(), z.clone());
        let two = osc.exact_flow(s, &osc.exact_flow(t, &z).unwrap()).unwrap();
        let one = osc.exact_flow(s + t, &z).unwrap();
        prop_assert!(max_diff(&two, &one) <= 1e-10);
    }

    #[test]
    fn quadratic_flow_is_a_group(
        seed in any::<u64>(),
        s in -1.0f64..1.0,
        t in -1.0f64..1.0,
    ) {
        let mut rng = seeded(seed);
        let sys = make_quadratic(&random_symmetric(&mut rng, 4)).unwrap();
        let z = random_vector(&mut rng, 4);
        let two = sys.exact_flow(s, &sys.exact_flow(t, &z).unwrap()).unwrap();
        let one = sys.exact_flow(s + t, &z).unwrap();
        prop_assert!(max_diff(&two, &one) <= 1e-10 * (1.0 + one.iter().fold(0.0f64, |m, x| m.max(x.abs()))));
    }

    #[test]
    fn exact_flows_are_symplectic(seed in any::<u64>(), t in 0.0f64..3.0) {
        let mut rng = seeded(seed);
        let sys = make_quadratic(&random_symmetric(&mut rng, 2)).unwrap();
        let osc = make_harmonic_oscillator(1).unwrap();
        let z = random_vector(&mut rng, 2);
        for system in [&sys as &dyn HamiltonianSystem, &osc] {
            let d = jacobian_defect(|p| Ok(system.exact_flow(t, p).unwrap()), &z, 1e-5).unwrap();
            prop_assert!(d <= 1e-6, "{} defect {d}", system.name());
        }
    }

    #[test]
    fn surrounding_hamiltonian_pulls_back(n in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let c = random_symmetric(&mut rng, 2 * n);
        let sys = make_quadratic(&c).unwrap();
        let phi = cayley(&random_cayley_input(&mut rng, n, 0.5)).unwrap();
        let hat = surrounding_hamiltonian(&sys, &phi);
        let z = random_vector(&mut rng, 2 * n);
        let moved = phi.apply(&z);
        let lhs = hat.energy(&moved).unwrap();
        let rhs = sys.energy(&z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}

#[test]
fn quadratic_flow_matches_matrix_exponential() {
    let mut rng = seeded(3);
    let c = random_symmetric(&mut rng, 4);
    let sys = make_quadratic(&c).unwrap();
    let z = random_vector(&mut rng, 4);
    let b = &make_standard_j(2) * &c;
    let own = expm(&b.scale(0.7)).unwrap().mul_vec(&z);
    assert!(max_diff(&own, &sys.exact_flow(0.7, &z).unwrap()) <= 1e-12);
}
