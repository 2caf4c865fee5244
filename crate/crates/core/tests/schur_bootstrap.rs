//! Realizations of intrinsic codes through equivariant embeddings.

use std::sync::Arc;

use intrinsic_codes::catalog::catalog_load;
use intrinsic_codes::embed::{embedding_family, push_code, realize};
use intrinsic_codes::extrinsic::{sector_kl, weight_enumerators, EXTRINSIC_TOL};
use intrinsic_codes::intrinsic::Code;
use intrinsic_codes::linalg::{isometry_residual, CMat, C64};
use intrinsic_codes::spaces::{build_space, SpaceSpec};
use proptest::prelude::*;

fn unit(z: Vec<(f64, f64)>) -> Vec<C64> {
    let z: Vec<C64> = z.into_iter().map(|(a, b)| C64::new(a, b)).collect();
    let n = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    z.into_iter().map(|x| x / n).collect()
}

fn moduli(m: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m)
        .prop_filter("nonzero", |z| z.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(unit)
}

/// Coefficient table of the first logical state on six qubits, with the sign
/// of z5 flipped to match the canonical copy ordering used here.
fn six_qubit_table(z: &[f64]) -> [f64; 6] {
    let s = f64::sqrt;
    let head = -2.0 * s(15.0) * z[0] - 3.0 * s(10.0) * z[1];
    [
        0.5 * s(5.0 / 3.0) * z[0],
        -z[0] / (2.0 * s(15.0)) + s(0.4) * z[1],
        (head + 15.0 * s(6.0) * z[2]) / 60.0,
        (head - 5.0 * s(6.0) * z[2] + 20.0 * s(3.0) * z[3]) / 60.0,
        (head - 5.0 * s(6.0) * z[2] - 10.0 * s(3.0) * z[3] + 30.0 * z[4]) / 60.0,
        (head - 5.0 * s(6.0) * z[2] - 10.0 * s(3.0) * z[3] - 30.0 * z[4]) / 60.0,
    ]
}

#[test]
fn six_qubit_logical_zero_matches_coefficient_table() {
    let (code, _) = catalog_load("5-2-2").unwrap();
    let six = Arc::new(build_space(&SpaceSpec::qubits(6)).unwrap());
    let family = embedding_family(Arc::clone(&six), 5).unwrap();
    for z in [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [0.3, -0.5, 0.1, 0.7, 0.4],
    ] {
        let zc = unit(z.iter().map(|&x| (x, 0.0)).collect());
        let zr: Vec<f64> = zc.iter().map(|x| x.re).collect();
        let c = push_code(&code, &family.at_point(&zc).unwrap(), Arc::clone(&six)).unwrap();
        let zero = c.codewords().column(0);
        let want = six_qubit_table(&zr);
        for (k, w) in want.iter().enumerate() {
            let single = 1usize << (5 - k);
            assert!((zero[single] - C64::new(*w, 0.0)).norm() < 1e-12, "z={z:?} k={k}");
            assert!((zero[63 ^ single] + C64::new(*w, 0.0)).norm() < 1e-12, "z={z:?} k={k}");
        }
        let support: f64 = want.iter().map(|w| 2.0 * w * w).sum();
        assert!((support - 1.0).abs() < 1e-12);
    }
}

#[test]
fn complex_moduli_keep_distance_two_but_move_b3() {
    let (code, _) = catalog_load("5-2-2").unwrap();
    let six = Arc::new(build_space(&SpaceSpec::qubits(6)).unwrap());
    let family = embedding_family(Arc::clone(&six), 5).unwrap();
    let z = unit(vec![(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    let e = weight_enumerators(&push_code(&code, &family.at_point(&z).unwrap(), six).unwrap()).unwrap();
    assert_eq!(e.distance(), Some(2));
    assert!((e.b[3] - 8.0).abs() > 1e-3, "B3 = {}", e.b[3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn six_qubit_realizations_satisfy_low_sectors(z in moduli(5)) {
        let (code, _) = catalog_load("5-2-2").unwrap();
        let c = realize(&code, &SpaceSpec::qubits(6), Some(&z)).unwrap();
        prop_assert!(isometry_residual(c.codewords()) < 1e-10);
        for l in [0, 1] {
            prop_assert!(sector_kl(&c, l, EXTRINSIC_TOL).unwrap().residual < 1e-8);
        }
        let e = weight_enumerators(&c).unwrap();
        prop_assert!(e.a[1].abs() < 1e-9 && e.b[1].abs() < 1e-9);
        prop_assert_eq!(e.distance(), Some(2));
    }

    #[test]
    fn real_moduli_reproduce_b3_and_b5(z in prop::collection::vec(-1.0..1.0f64, 5)
        .prop_filter("nonzero", |z| z.iter().map(|x| x * x).sum::<f64>() > 1e-3)) {
        let (code, _) = catalog_load("5-2-2").unwrap();
        let z = unit(z.into_iter().map(|x| (x, 0.0)).collect());
        let e = weight_enumerators(&realize(&code, &SpaceSpec::qubits(6), Some(&z)).unwrap()).unwrap();
        prop_assert!((e.b[3] - 8.0).abs() < 1e-9);
        prop_assert!((e.b[5] - 24.0).abs() < 1e-9);
        prop_assert!(e.a[3].abs() < 1e-9 && e.a[5].abs() < 1e-9);
    }

    #[test]
    fn mixed_qudit_family_is_equivariant(z in moduli(2)) {
        let (code, _) = catalog_load("5-2-2").unwrap();
        let c = realize(&code, &"2x3x4".parse().unwrap(), Some(&z)).unwrap();
        for l in [0, 1] {
            prop_assert!(sector_kl(&c, l, EXTRINSIC_TOL).unwrap().residual < 1e-8);
        }
    }

    /// A logical change of basis does not change whether sectors pass.
    #[test]
    fn sector_checks_ignore_logical_basis(theta in 0.0..6.3f64, phi in 0.0..6.3f64, z in moduli(5)) {
        let (code, _) = catalog_load("5-2-2").unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let e = C64::from_polar(1.0, phi);
        let w = CMat::from_row_slice(2, 2, &[C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)]);
        let remixed = Code::new(Arc::clone(code.space()), code.codewords() * w).unwrap();
        let a = realize(&code, &SpaceSpec::qubits(6), Some(&z)).unwrap();
        let b = realize(&remixed, &SpaceSpec::qubits(6), Some(&z)).unwrap();
        for l in [0, 1, 2] {
            let ra = sector_kl(&a, l, EXTRINSIC_TOL).unwrap();
            let rb = sector_kl(&b, l, EXTRINSIC_TOL).unwrap();
            prop_assert_eq!(ra.pass, rb.pass);
            prop_assert!((ra.residual - rb.residual).abs() < 1e-9);
        }
    }
}
