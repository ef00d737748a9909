use std::path::PathBuf;

use ftwalk::matcore::read_matrix;
use ftwalk::walkgen::*;
use num_complex::Complex64;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn star8() -> (Graph, EdgeStateIndex) {
    let g = Graph::parse(&std::fs::read_to_string(fixture("star8.graph")).unwrap()).unwrap();
    let order = EdgeStateIndex::parse_order(&std::fs::read_to_string(fixture("star8.order")).unwrap()).unwrap();
    let idx = build_state_index_with_order(&g, &order).unwrap();
    (g, idx)
}

#[test]
fn star8_operator_matches_published_matrix() {
    let (g, idx) = star8();
    let op = build_walk_operator(&g, &CoinFamily::Grover, &idx).unwrap();
    let want = read_matrix(fixture("star8_walk.json")).unwrap();
    assert!(op.u.max_abs_diff(&want).unwrap() < 1e-12);
}

#[test]
fn fixture_order_equals_star_ordering() {
    let (g, idx) = star8();
    assert_eq!(idx.states(), star_ordering(&g).as_slice());
}

#[test]
fn one_step_from_the_last_centre_state() {
    let (g, idx) = star8();
    let op = build_walk_operator(&g, &CoinFamily::Grover, &idx).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); 16];
    psi[8] = Complex64::new(1.0, 0.0);
    let out = walk_step(&op, &psi).unwrap();
    let probs: Vec<f64> = out.iter().map(|a| a.norm_sqr()).collect();
    assert!((probs[0] - 0.5625).abs() < 1e-12);
    for p in &probs[1..8] {
        assert!((p - 0.0625).abs() < 1e-12);
    }
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn first_state_moves_to_state_nine() {
    let (g, idx) = star8();
    let op = build_walk_operator(&g, &CoinFamily::Grover, &idx).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); 16];
    psi[0] = Complex64::new(1.0, 0.0);
    let out = walk_step(&op, &psi).unwrap();
    assert!((out[8].norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn default_order_gives_a_unitary_permutation_of_the_same_operator() {
    let (g, idx) = star8();
    let fixed = build_walk_operator(&g, &CoinFamily::Grover, &idx).unwrap();
    let plain = build_walk_operator(&g, &CoinFamily::Grover, &build_state_index(&g)).unwrap();
    assert!(plain.u.is_unitary());
    let lex = build_state_index(&g);
    for (a, &(j, k)) in lex.states().iter().enumerate() {
        for (b, &(x, y)) in lex.states().iter().enumerate() {
            let (fa, fb) = (idx.position(j, k).unwrap(), idx.position(x, y).unwrap());
            assert!((plain.u.get(a, b) - fixed.u.get(fa, fb)).norm() < 1e-15);
        }
    }
}
