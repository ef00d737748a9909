//! State-vector simulation of the Steane `[[7,1,3]]` code.
//!
//! Qubits are numbered from 1; qubit 1 is the most significant bit of a
//! basis index. A 14-qubit register holds block A (qubits 1–7) followed by
//! block B (qubits 8–14).
//!
//! Stabilizer rows are `1010101`, `0110011` and `0001111`, so row `k`
//! covers the qubits whose index has bit `k` set and a single-qubit error on
//! qubit `j` produces the syndrome value `j`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::synth::Gate;

pub const BLOCK_SIZE: usize = 7;
pub const MAX_QUBITS: usize = 14;
const NORM_TOL: f64 = 1e-10;

const STABILIZER_ROWS: [u8; 3] = [0b1010101, 0b0110011, 0b0001111];

type M2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_matrix(p: Pauli) -> M2 {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("qubit count {qubits} outside 1..={MAX_QUBITS}")));
        }
        if amps.len() != 1 << qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << qubits,
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let s = StateVector { qubits, amps };
        if (s.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![c(0.0, 0.0); 1 << qubits.min(MAX_QUBITS + 1)];
        if index >= amps.len() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: amps.len(),
            });
        }
        amps[index] = c(1.0, 0.0);
        Self::new(qubits, amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("{qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { qubits, amps })
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                dim: self.qubits,
            });
        }
        Ok(1 << (self.qubits - qubit))
    }

    pub fn apply_1q(&mut self, qubit: usize, u: &M2) -> Result<()> {
        let m = self.mask(qubit)?;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | m] = u[1][0] * a + u[1][1] * b;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::invalid("CNOT control equals target"));
        }
        let (cm, tm) = (self.mask(control)?, self.mask(target)?);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
        Ok(())
    }

    fn scale(&mut self, s: Complex64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(Error::Internal("projection onto a zero-probability branch".into()));
        }
        self.scale(c(1.0 / n, 0.0));
        Ok(n * n)
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Seven physical qubits holding one encoded qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalBlock {
    qubits: [usize; BLOCK_SIZE],
}

impl LogicalBlock {
    pub fn new(qubits: [usize; BLOCK_SIZE]) -> Result<Self> {
        let mut sorted = qubits;
        sorted.sort_unstable();
        if sorted[0] == 0 || sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("block qubits must be distinct and 1-based"));
        }
        Ok(LogicalBlock { qubits })
    }

    /// Qubits `7·(index) + 1 ..= 7·(index) + 7`.
    pub fn nth(index: usize) -> Self {
        LogicalBlock {
            qubits: std::array::from_fn(|i| BLOCK_SIZE * index + i + 1),
        }
    }

    pub fn qubits(&self) -> [usize; BLOCK_SIZE] {
        self.qubits
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        match self.qubits.iter().find(|&&q| q > psi.qubits) {
            Some(&q) => Err(Error::IndexOutOfRange {
                index: q,
                dim: psi.qubits,
            }),
            None => Ok(()),
        }
    }

    fn overlaps(&self, other: &LogicalBlock) -> bool {
        self.qubits.iter().any(|q| other.qubits.contains(q))
    }
}

fn codewords(bit: u8) -> impl Iterator<Item = usize> {
    (0u8..8).map(move |sel| {
        let even = (0..3)
            .filter(|k| sel >> k & 1 == 1)
            .fold(0u8, |acc, k| acc ^ STABILIZER_ROWS[k]);
        usize::from(if bit == 1 { even ^ 0b1111111 } else { even })
    })
}

/// `|0_L⟩` or `|1_L⟩`.
pub fn encode(bit: u8) -> Result<StateVector> {
    if bit > 1 {
        return Err(Error::invalid(format!("logical bit must be 0 or 1, got {bit}")));
    }
    let mut amps = vec![c(0.0, 0.0); 1 << BLOCK_SIZE];
    let a = c(1.0 / 8f64.sqrt(), 0.0);
    for w in codewords(bit) {
        amps[w] = a;
    }
    StateVector::new(BLOCK_SIZE, amps)
}

/// `alpha |0_L⟩ + beta |1_L⟩`.
pub fn encode_superposition(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!("|alpha|² + |beta|² = {n}, expected 1")));
    }
    let (z, o) = (encode(0)?, encode(1)?);
    let amps = z
        .amps
        .iter()
        .zip(&o.amps)
        .map(|(a, b)| alpha * a + beta * b)
        .collect();
    StateVector::new(BLOCK_SIZE, amps)
}

/// `(⟨0_L|ψ⟩, ⟨1_L|ψ⟩)` for a 7-qubit state.
pub fn logical_amplitudes(psi: &StateVector) -> Result<(Complex64, Complex64)> {
    Ok((encode(0)?.inner(psi)?, encode(1)?.inner(psi)?))
}

fn physical_gate(g: Gate) -> Result<M2> {
    // Logical S is s on every qubit and vice versa.
    match g {
        Gate::H | Gate::X | Gate::Z => Ok(g.matrix()),
        Gate::S => Ok(Gate::Sdg.matrix()),
        Gate::Sdg => Ok(Gate::S.matrix()),
        Gate::T => Err(Error::Unsupported("T has no transversal implementation".into())),
    }
}

pub fn transversal(gate: Gate, block: LogicalBlock, psi: &StateVector) -> Result<StateVector> {
    block.check(psi)?;
    let u = physical_gate(gate)?;
    let mut out = psi.clone();
    for q in block.qubits {
        out.apply_1q(q, &u)?;
    }
    Ok(out)
}

pub fn transversal_cnot(control: LogicalBlock, target: LogicalBlock, psi: &StateVector) -> Result<StateVector> {
    control.check(psi)?;
    target.check(psi)?;
    if control.overlaps(&target) {
        return Err(Error::invalid("control and target blocks overlap"));
    }
    let mut out = psi.clone();
    for (c, t) in control.qubits.iter().zip(&target.qubits) {
        out.apply_cnot(*c, *t)?;
    }
    Ok(out)
}

/// Projects onto the `(-1)^outcome` eigenspace of `Z^{⊗7}` on `block`.
/// Returns the post-measurement state and the outcome probability.
pub fn measure_logical_z(psi: &StateVector, block: LogicalBlock, outcome: u8) -> Result<(StateVector, f64)> {
    block.check(psi)?;
    let mask: usize = block.qubits.iter().map(|&q| psi.mask(q)).sum::<Result<usize>>()?;
    let mut out = psi.clone();
    for (i, a) in out.amps.iter_mut().enumerate() {
        if ((i & mask).count_ones() % 2) as u8 != outcome {
            *a = c(0.0, 0.0);
        }
    }
    let p = out.normalize()?;
    Ok((out, p))
}

/// `Z^{⊗7}` outcome probabilities `(p0, p1)`.
pub fn logical_z_probabilities(psi: &StateVector, block: LogicalBlock) -> Result<(f64, f64)> {
    block.check(psi)?;
    let mask: usize = block.qubits.iter().map(|&q| psi.mask(q)).sum::<Result<usize>>()?;
    let p1: f64 = psi
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| (i & mask).count_ones() % 2 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok((1.0 - p1, p1))
}

/// The logical operator `e^{-iπ/4} S X` applied to a block.
fn apply_sx_phase(psi: &StateVector, block: LogicalBlock) -> Result<StateVector> {
    let mut out = transversal(Gate::X, block, psi)?;
    out = transversal(Gate::S, block, &out)?;
    out.scale(Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4));
    Ok(out)
}

/// Contracts the 7 trailing qubits with `⟨m_L|`, leaving the leading block.
fn collapse_trailing_block(psi: &StateVector, m: u8) -> Result<StateVector> {
    if psi.qubits != 2 * BLOCK_SIZE {
        return Err(Error::invalid("expected a two-block register"));
    }
    let bra = encode(m)?;
    let width = 1 << BLOCK_SIZE;
    let mut amps: Vec<Complex64> = (0..width)
        .map(|i| {
            (0..width)
                .map(|j| bra.amps[j].conj() * psi.amps[i * width + j])
                .sum()
        })
        .collect();
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-12 {
        return Err(Error::Internal("data block left the codespace".into()));
    }
    amps.iter_mut().for_each(|a| *a /= n);
    StateVector::new(BLOCK_SIZE, amps)
}

/// Outcome choices for the two measurements of the T protocol; `None`
/// samples from the Born probabilities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TBranches {
    /// 0 for the `+1` outcome of the ancilla-preparation measurement.
    pub ancilla: Option<u8>,
    /// Logical Z measurement of the data block.
    pub measurement: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptStep {
    pub step: String,
    pub gates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

impl TranscriptStep {
    fn new(step: &str, gates: &[&str]) -> Self {
        TranscriptStep {
            step: step.into(),
            gates: gates.iter().map(|g| g.to_string()).collect(),
            branch: None,
            probability: None,
        }
    }

    fn measured(mut self, branch: u8, probability: f64) -> Self {
        self.branch = Some(branch);
        self.probability = Some(probability);
        self
    }
}

#[derive(Debug, Clone)]
pub struct TGateRun {
    /// The ancilla block after the protocol, holding `T|α⟩` encoded.
    pub output: StateVector,
    pub transcript: Vec<TranscriptStep>,
}

fn choose<R: Rng + ?Sized>(forced: Option<u8>, p1: f64, rng: &mut R) -> Result<u8> {
    match forced {
        Some(b) if b > 1 => Err(Error::invalid(format!("branch must be 0 or 1, got {b}"))),
        Some(b) => Ok(b),
        None => Ok(u8::from(rng.gen::<f64>() < p1)),
    }
}

/// Fault-tolerant T on an encoded qubit using an encoded `|Θ⟩` ancilla.
pub fn ft_t_gate<R: Rng + ?Sized>(alpha: &StateVector, branches: TBranches, rng: &mut R) -> Result<TGateRun> {
    if alpha.qubits != BLOCK_SIZE {
        return Err(Error::invalid("input must be a single 7-qubit block"));
    }
    let (a, b) = (LogicalBlock::nth(0), LogicalBlock::nth(1));
    let mut transcript = vec![TranscriptStep::new("prepare_ancilla", &["0_L"])];

    // Ideal two-outcome measurement of M = e^{-iπ/4} S X on |0_L⟩.
    let zero = encode(0)?;
    let m_zero = apply_sx_phase(&zero, LogicalBlock::nth(0))?;
    let half = |sign: f64| -> Result<StateVector> {
        let amps = zero
            .amps
            .iter()
            .zip(&m_zero.amps)
            .map(|(x, y)| (x + y * sign) * 0.5)
            .collect();
        Ok(StateVector { qubits: BLOCK_SIZE, amps })
    };
    let minus = half(-1.0)?;
    let p_minus = minus.norm().powi(2);
    let outcome = choose(branches.ancilla, p_minus, rng)?;
    let mut ancilla = if outcome == 0 { half(1.0)? } else { minus };
    let p = ancilla.normalize()?;
    transcript.push(TranscriptStep::new("measure_ancilla", &["e^{-iπ/4}SX"]).measured(outcome, p));
    if outcome == 1 {
        ancilla = transversal(Gate::Z, LogicalBlock::nth(0), &ancilla)?;
        transcript.push(TranscriptStep::new("fix_ancilla", &["Z"]));
    }

    let mut psi = ancilla.tensor(alpha)?;
    psi = transversal_cnot(a, b, &psi)?;
    transcript.push(TranscriptStep::new("cnot", &["CNOT"]));

    let (_, p1) = logical_z_probabilities(&psi, b)?;
    let m = choose(branches.measurement, p1, rng)?;
    let (psi, p) = measure_logical_z(&psi, b, m)?;
    transcript.push(TranscriptStep::new("measure_data", &["Z_L"]).measured(m, p));

    let mut out = collapse_trailing_block(&psi, m)?;
    if m == 1 {
        out = transversal(Gate::X, a, &out)?;
        out = transversal(Gate::S, a, &out)?;
        transcript.push(TranscriptStep::new("correct", &["X", "S"]));
    }
    Ok(TGateRun {
        output: out,
        transcript,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliError {
    pub pauli: Pauli,
    /// Position 1..=7 within the block.
    pub qubit: usize,
}

/// Outcomes of the three Z-type and three X-type checks as 3-bit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Syndrome {
    /// Z-type checks; nonzero after an X or Y error, equal to its qubit.
    pub z_checks: u8,
    /// X-type checks; nonzero after a Z or Y error, equal to its qubit.
    pub x_checks: u8,
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        self.z_checks == 0 && self.x_checks == 0
    }
}

fn check_outcome(psi: &StateVector, block: LogicalBlock, row: u8, pauli: Pauli) -> Result<u8> {
    let u = pauli_matrix(pauli);
    let mut flipped = psi.clone();
    for (i, q) in block.qubits.iter().enumerate() {
        if row >> (BLOCK_SIZE - 1 - i) & 1 == 1 {
            flipped.apply_1q(*q, &u)?;
        }
    }
    let e = psi.inner(&flipped)?.re;
    if (e.abs() - 1.0).abs() > 1e-8 {
        return Err(Error::Internal(format!("state is not a stabilizer eigenstate (⟨g⟩ = {e})")));
    }
    Ok(u8::from(e < 0.0))
}

/// Ideal measurement of the six stabilizer generators.
pub fn measure_syndrome(psi: &StateVector, block: LogicalBlock) -> Result<Syndrome> {
    block.check(psi)?;
    let mut s = Syndrome::default();
    for (k, &row) in STABILIZER_ROWS.iter().enumerate() {
        s.z_checks |= check_outcome(psi, block, row, Pauli::Z)? << k;
        s.x_checks |= check_outcome(psi, block, row, Pauli::X)? << k;
    }
    Ok(s)
}

/// Applies at most one single-qubit Pauli error, measures the syndrome and
/// applies the matching correction.
pub fn inject_and_correct(
    psi: &StateVector,
    block: LogicalBlock,
    errors: &[PauliError],
) -> Result<(StateVector, Syndrome)> {
    block.check(psi)?;
    if errors.len() > 1 {
        return Err(Error::invalid("only single-qubit errors are correctable"));
    }
    let mut out = psi.clone();
    for e in errors {
        if e.qubit == 0 || e.qubit > BLOCK_SIZE {
            return Err(Error::IndexOutOfRange {
                index: e.qubit,
                dim: BLOCK_SIZE,
            });
        }
        out.apply_1q(block.qubits[e.qubit - 1], &pauli_matrix(e.pauli))?;
    }
    let s = measure_syndrome(&out, block)?;
    if s.z_checks != 0 {
        out.apply_1q(block.qubits[usize::from(s.z_checks) - 1], &pauli_matrix(Pauli::X))?;
    }
    if s.x_checks != 0 {
        out.apply_1q(block.qubits[usize::from(s.x_checks) - 1], &pauli_matrix(Pauli::Z))?;
    }
    Ok((out, s))
}
