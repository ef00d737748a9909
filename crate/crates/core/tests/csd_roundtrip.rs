use std::path::PathBuf;

use ftwalk::csd::*;
use ftwalk::matcore::{distance, read_matrix};
use ftwalk::ComplexMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let m = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    ComplexMatrix::from_dmatrix(m.qr().q()).unwrap()
}

fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let m = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let q = m.qr().q().map(|x| Complex64::new(x, 0.0));
    ComplexMatrix::from_dmatrix(q).unwrap()
}

/// Every op pairs `p` with `q = p + h` inside an aligned block of size `2h`.
fn assert_block_targets(d: &Decomposition) {
    for op in &d.ops {
        let h = op.q - op.p;
        assert!(h.is_power_of_two(), "{op:?}");
        assert!((op.p - 1) % (2 * h) < h, "{op:?}");
    }
}

fn assert_round_trip(u: &ComplexMatrix) -> Decomposition {
    let padded = pad_to_power_of_two(u).unwrap();
    let d = cs_decompose(&padded).unwrap();
    let dist = distance(&padded, &reconstruct(&d)).unwrap();
    assert!(dist < 1e-9, "dim {} distance {dist}", u.dim());
    assert_block_targets(&d);
    d
}

#[test]
fn random_unitaries_reconstruct() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let dim = 2 + i % 31;
        assert_round_trip(&random_unitary(dim, &mut rng));
    }
}

#[test]
fn non_power_of_two_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(matches!(
        cs_decompose(&random_unitary(3, &mut rng)),
        Err(ftwalk::Error::NotPowerOfTwo(3))
    ));
}

#[test]
fn real_inputs_yield_real_ops() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [2, 3, 4, 7, 8, 16, 32] {
        let d = assert_round_trip(&random_orthogonal(dim, &mut rng));
        assert!(d.ops.iter().all(|o| matches!(o.kind, OpKind::Ry | OpKind::ZGate)));
    }
}

#[test]
fn star8_operator_decomposes_into_rotations() {
    let u = read_matrix(fixture("star8_walk.json")).unwrap();
    let d = cs_decompose(&u).unwrap();
    assert!(d.ops.iter().all(|o| matches!(o.kind, OpKind::Ry | OpKind::ZGate)));
    assert!(reconstruct(&d).max_abs_diff(&u).unwrap() < 1e-10);
    // The first factor is a -90° rotation on (1, 9), as in the published list.
    assert_eq!((d.ops[0].p, d.ops[0].q), (1, 9));
    assert!((d.ops[0].angle_deg + 90.0).abs() < 1e-9);
}

#[test]
fn published_rotation_list_reconstructs_the_operator() {
    let d = decomposition_from_csv(&std::fs::read_to_string(fixture("star8_decomposition.csv")).unwrap()).unwrap();
    assert_eq!(d.padded_dim, 16);
    assert_eq!(d.ops.len(), 34);
    let u = read_matrix(fixture("star8_walk.json")).unwrap();
    assert!(reconstruct(&d).max_abs_diff(&u).unwrap() < 1e-3);
}

#[test]
fn csv_round_trip_preserves_ops() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = cs_decompose(&random_unitary(8, &mut rng)).unwrap();
    let back = decomposition_from_csv(&decomposition_to_csv(&d)).unwrap();
    assert_eq!(back, d);
}
