use cba33::hamiltonian::{
    build_chain, build_charge, build_from_t, check_cba_constraints, decompose, extract_t, on_pattern,
    sector_hamiltonian, validate_pattern, FreeParams,
};
use cba33::linalg::{commutator, eig_general, greedy_pairing, max_abs, CMatrix, ResidualReport};
use cba33::sample::{random_complex, random_matrix, seeded_rng};
use proptest::prelude::*;

fn on_pattern_matrix(seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let r = random_matrix(&mut rng, 9, 9);
    CMatrix::from_fn(9, 9, |i, j| {
        if on_pattern(i + 1, j + 1) {
            r[(i, j)]
        } else {
            r[(i, j)] * 0.0
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn charge_is_conserved(seed in any::<u64>(), len in 2usize..=6) {
        let h = validate_pattern(&on_pattern_matrix(seed)).unwrap();
        let big = build_chain(&h, len).unwrap();
        let q = build_charge(len).unwrap();
        prop_assert!(max_abs(&commutator(&big, &q)) <= 1e-12 * max_abs(&big).max(1.0));
    }

    #[test]
    fn build_and_extract_are_inverse(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let t = random_matrix(&mut rng, 4, 4);
        let (m24, m42) = (random_complex(&mut rng), random_complex(&mut rng));
        let free = FreeParams::random(&mut rng, m24, m42);
        let h = build_from_t(&t, &free).unwrap();
        prop_assert!(check_cba_constraints(&h).max_residual() <= 1e-14);
        prop_assert!(max_abs(&(extract_t(&h).unwrap().t - &t)) <= 1e-14);
        let d = decompose(&h).unwrap();
        prop_assert!(ResidualReport::compare(&d.reconstruct(), h.matrix(), 1e-13).passed);
    }

    #[test]
    fn sector_one_is_inside_full_spectrum(seed in any::<u64>()) {
        let h = validate_pattern(&on_pattern_matrix(seed)).unwrap();
        let full = eig_general(&build_chain(&h, 4).unwrap()).unwrap();
        let (_, s) = sector_hamiltonian(&h, 4, 1).unwrap();
        let ev = eig_general(&s).unwrap();
        prop_assert_eq!(greedy_pairing(&ev, &full, 1e-9).pairs.len(), ev.len());
    }
}
