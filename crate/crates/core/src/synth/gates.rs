use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{Ring2x2, RingScalar};

/// Gate alphabet. Declaration order is the tie-break order `H < X < Z < T < S < s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    H,
    X,
    Z,
    T,
    S,
    /// `S†`
    Sdg,
}

impl Gate {
    pub const ALL: [Gate; 6] = [Gate::H, Gate::X, Gate::Z, Gate::T, Gate::S, Gate::Sdg];

    pub fn symbol(self) -> char {
        match self {
            Gate::H => 'H',
            Gate::X => 'X',
            Gate::Z => 'Z',
            Gate::T => 'T',
            Gate::S => 'S',
            Gate::Sdg => 's',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            'H' => Ok(Gate::H),
            'X' => Ok(Gate::X),
            'Z' => Ok(Gate::Z),
            'T' => Ok(Gate::T),
            'S' => Ok(Gate::S),
            's' => Ok(Gate::Sdg),
            other => Err(Error::InvalidSymbol(other)),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Exact matrix.
    pub fn ring_matrix(self) -> Ring2x2 {
        let zero = RingScalar::ZERO;
        let one = RingScalar::ONE;
        let diag = |w: i64| Ring2x2::new(one, zero, zero, RingScalar::omega_pow(w));
        match self {
            Gate::H => {
                let h = RingScalar::inv_sqrt2();
                Ring2x2::new(h, h, h, h.neg())
            }
            Gate::X => Ring2x2::new(zero, one, one, zero),
            Gate::Z => diag(4),
            Gate::T => diag(1),
            Gate::S => diag(2),
            Gate::Sdg => diag(6),
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        self.ring_matrix().to_complex()
    }
}

/// Word over the gate alphabet, read as a matrix product: the leftmost
/// symbol is the last gate applied to a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GateSequence(Vec<Gate>);

impl GateSequence {
    pub fn new(gates: Vec<Gate>) -> Self {
        GateSequence(gates)
    }

    pub fn empty() -> Self {
        GateSequence(Vec::new())
    }

    pub fn gates(&self) -> &[Gate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word; evaluates to the transpose since every alphabet
    /// matrix is symmetric.
    pub fn reversed(&self) -> Self {
        GateSequence(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for GateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for GateSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(Gate::from_symbol).collect::<Result<Vec<_>>>().map(GateSequence)
    }
}

/// Exact left-to-right product of the word's gate matrices.
pub fn evaluate(seq: &GateSequence) -> Result<Ring2x2> {
    seq.gates()
        .iter()
        .try_fold(Ring2x2::identity(), |acc, g| acc.checked_mul(&g.ring_matrix()))
}

/// Floating-point product, accumulated directly in `f64`.
pub fn evaluate_float(seq: &GateSequence) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    seq.gates().iter().fold([[one, zero], [zero, one]], |m, g| {
        let b = g.matrix();
        let mut out = [[zero; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = m[i][0] * b[0][j] + m[i][1] * b[1][j];
            }
        }
        out
    })
}
