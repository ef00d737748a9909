use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use ftwalk::steane::{
    encode, encode_superposition, fidelity, ft_t_gate, inject_and_correct, transversal, LogicalBlock, Pauli,
    PauliError, TBranches,
};
use ftwalk::synth::Gate;
use ftwalk::Result;

const CLIFFORD_TOL: f64 = 1e-10;
const T_TOL: f64 = 1e-9;
const T_SAMPLES: usize = 100;

/// Outcome of one Steane-code check; `min_fidelity` is the worst case over
/// every input the check tried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub cases: usize,
    pub min_fidelity: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(check: String, fidelities: &[f64], tol: f64) -> Self {
        let min_fidelity = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
        CheckResult {
            check,
            cases: fidelities.len(),
            min_fidelity,
            pass: min_fidelity >= 1.0 - tol,
        }
    }
}

pub(crate) fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let theta: f64 = rng.gen::<f64>() * PI;
    let phi: f64 = rng.gen::<f64>() * TAU;
    (
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    )
}

fn basis(bit: u8) -> (Complex64, Complex64) {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    if bit == 0 {
        (o, z)
    } else {
        (z, o)
    }
}

/// Transversal gates, the T protocol on every forced branch pair and the
/// correction of all single-qubit Pauli errors.
pub fn steane_checks<R: Rng + ?Sized>(rng: &mut R) -> Result<Vec<CheckResult>> {
    let block = LogicalBlock::nth(0);
    let mut results = Vec::new();

    for g in [Gate::H, Gate::X, Gate::Z, Gate::S, Gate::Sdg] {
        let m = g.matrix();
        let mut f = Vec::new();
        for bit in [0u8, 1] {
            let (a, b) = basis(bit);
            let out = transversal(g, block, &encode(bit)?)?;
            let want = encode_superposition(m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)?;
            f.push(fidelity(&out, &want)?);
        }
        results.push(CheckResult::new(format!("transversal_{}", g.symbol()), &f, CLIFFORD_TOL));
    }

    let t = Complex64::from_polar(1.0, FRAC_PI_4);
    for ancilla in [0u8, 1] {
        for measurement in [0u8, 1] {
            let mut f = Vec::with_capacity(T_SAMPLES);
            for _ in 0..T_SAMPLES {
                let (a, b) = random_qubit(rng);
                let branches = TBranches {
                    ancilla: Some(ancilla),
                    measurement: Some(measurement),
                };
                let run = ft_t_gate(&encode_superposition(a, b)?, branches, rng)?;
                f.push(fidelity(&run.output, &encode_superposition(a, t * b)?)?);
            }
            results.push(CheckResult::new(format!("t_gate_branch_{ancilla}{measurement}"), &f, T_TOL));
        }
    }

    for pauli in Pauli::ALL {
        let mut f = Vec::new();
        for bit in [0u8, 1] {
            let psi = encode(bit)?;
            for qubit in 1..=7 {
                let (out, _) = inject_and_correct(&psi, block, &[PauliError { pauli, qubit }])?;
                f.push(fidelity(&out, &psi)?);
            }
        }
        results.push(CheckResult::new(format!("correct_{pauli:?}"), &f, CLIFFORD_TOL));
    }
    Ok(results)
}
