//! Breadth-first enumeration of distinct gate-sequence matrices.
//!
//! Length-`L` candidates are formed by prepending each gate to every word
//! kept at length `L-1`. A candidate is dropped when its exact matrix was
//! already seen at a shorter length; among equal matrices at the same
//! length, the lexicographically smallest word (alphabet order
//! `H < X < Z < T < S < s`) survives. Because parents are visited in lex
//! order and the prepended gate is the outer loop, candidate position is
//! lex order, so "first seen" and "lex smallest" coincide.
//!
//! Each generation is kept as a sorted array of canonical encodings and
//! membership is a binary search per earlier generation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{divisible_by_sqrt2, Ring2x2, RingScalar};
use crate::synth::gates::{Gate, GateSequence};

/// Canonical encoding of a 2×2 unitary over `Z[ω, 1/√2]`.
///
/// A unitary is fixed by its first row `(α, β)` and its determinant `ω^det`:
/// the second row is `ω^det (-β*, α*)`. `α` and `β` are stored as numerators
/// over a shared `√2^k` with `k` minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixKey {
    k: u8,
    det: u8,
    alpha: [i32; 4],
    beta: [i32; 4],
}

type Coeffs = [i64; 4];

fn conj(c: &Coeffs) -> Coeffs {
    [c[0], -c[3], -c[2], -c[1]]
}

fn mul_omega_pow(c: &Coeffs, n: u8) -> Coeffs {
    let mut c = *c;
    for _ in 0..(n % 8) {
        c = [-c[3], c[0], c[1], c[2]];
    }
    c
}

fn add(a: &Coeffs, b: &Coeffs) -> Coeffs {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn neg(a: &Coeffs) -> Coeffs {
    a.map(|x| -x)
}

/// `x / √2 = x (ω - ω³) / 2`; caller checks divisibility.
fn div_sqrt2(c: &Coeffs) -> Coeffs {
    let [a0, a1, a2, a3] = *c;
    [(a1 - a3) / 2, (a0 + a2) / 2, (a1 + a3) / 2, (a2 - a0) / 2]
}

fn pack(c: &Coeffs) -> Result<[i32; 4]> {
    let mut out = [0i32; 4];
    for (o, &x) in out.iter_mut().zip(c) {
        *o = i32::try_from(x).map_err(|_| Error::Overflow)?;
    }
    Ok(out)
}

impl MatrixKey {
    pub fn identity() -> Self {
        MatrixKey {
            k: 0,
            det: 0,
            alpha: [1, 0, 0, 0],
            beta: [0; 4],
        }
    }

    fn alpha(&self) -> Coeffs {
        self.alpha.map(i64::from)
    }

    fn beta(&self) -> Coeffs {
        self.beta.map(i64::from)
    }

    fn second_row(&self) -> (Coeffs, Coeffs) {
        let gamma = neg(&mul_omega_pow(&conj(&self.beta()), self.det));
        let delta = mul_omega_pow(&conj(&self.alpha()), self.det);
        (gamma, delta)
    }

    fn build(mut alpha: Coeffs, mut beta: Coeffs, mut k: u32, det: u8) -> Result<Self> {
        while k > 0 && divisible_by_sqrt2(&alpha) && divisible_by_sqrt2(&beta) {
            alpha = div_sqrt2(&alpha);
            beta = div_sqrt2(&beta);
            k -= 1;
        }
        Ok(MatrixKey {
            k: u8::try_from(k).map_err(|_| Error::Overflow)?,
            det: det % 8,
            alpha: pack(&alpha)?,
            beta: pack(&beta)?,
        })
    }

    /// Encoding of `g · self`.
    pub fn left_mul(&self, g: Gate) -> Result<Self> {
        let k = u32::from(self.k);
        match g {
            Gate::H => {
                let (gamma, delta) = self.second_row();
                let alpha = add(&self.alpha(), &gamma);
                let beta = add(&self.beta(), &delta);
                Self::build(alpha, beta, k + 1, self.det + 4)
            }
            Gate::X => {
                let (gamma, delta) = self.second_row();
                Self::build(gamma, delta, k, self.det + 4)
            }
            // Diagonal gates only rescale the second row.
            Gate::Z => Ok(MatrixKey { det: (self.det + 4) % 8, ..*self }),
            Gate::T => Ok(MatrixKey { det: (self.det + 1) % 8, ..*self }),
            Gate::S => Ok(MatrixKey { det: (self.det + 2) % 8, ..*self }),
            Gate::Sdg => Ok(MatrixKey { det: (self.det + 6) % 8, ..*self }),
        }
    }

    /// Encoding of `ω^n · self`.
    pub fn times_global_phase(&self, n: u8) -> Self {
        MatrixKey {
            alpha: mul_omega_pow(&self.alpha(), n).map(|x| x as i32),
            beta: mul_omega_pow(&self.beta(), n).map(|x| x as i32),
            det: (self.det + 2 * (n % 8)) % 8,
            k: self.k,
        }
    }

    /// Smallest encoding among the eight `ω^n` multiples.
    pub fn phase_folded(&self) -> Self {
        (0..8).map(|n| self.times_global_phase(n)).min().unwrap_or(*self)
    }

    pub fn from_ring(m: &Ring2x2) -> Result<Self> {
        let k = m.entries.iter().map(|e| e.k()).max().unwrap_or(0);
        let at = |e: RingScalar| -> Result<Coeffs> {
            let mut c = e.coeffs();
            for _ in e.k()..k {
                let [a0, a1, a2, a3] = c;
                c = [a1 - a3, a0 + a2, a1 + a3, a2 - a0];
            }
            let mut out = [0i64; 4];
            for (o, x) in out.iter_mut().zip(c) {
                *o = i64::try_from(x).map_err(|_| Error::Overflow)?;
            }
            Ok(out)
        };
        let alpha = at(m.get(0, 0))?;
        let beta = at(m.get(0, 1))?;
        // det = α δ - β γ, a unit ω^j.
        let det = m
            .get(0, 0)
            .checked_mul(&m.get(1, 1))?
            .checked_sub(&m.get(0, 1).checked_mul(&m.get(1, 0))?)?;
        let j = (0..8)
            .find(|&j| RingScalar::omega_pow(j) == det)
            .ok_or_else(|| Error::invalid("matrix determinant is not a power of ω"))?;
        Self::build(alpha, beta, k, j as u8)
    }

    pub fn to_ring(&self) -> Result<Ring2x2> {
        let k = u32::from(self.k);
        let scalar = |c: Coeffs| RingScalar::new(c.map(i128::from), k);
        let (gamma, delta) = self.second_row();
        Ok(Ring2x2::new(
            scalar(self.alpha())?,
            scalar(self.beta())?,
            scalar(gamma)?,
            scalar(delta)?,
        ))
    }

    pub fn to_complex(&self) -> [[num_complex::Complex64; 2]; 2] {
        let k = u32::from(self.k);
        let f = |c: Coeffs| {
            RingScalar::new(c.map(i128::from), k)
                .map(|s| s.to_complex())
                .unwrap_or_default()
        };
        let (gamma, delta) = self.second_row();
        [[f(self.alpha()), f(self.beta())], [f(gamma), f(delta)]]
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    key: MatrixKey,
    parent: u32,
    gate: Gate,
}

/// Words kept at one length, in lex order, plus their sorted dedup keys.
#[derive(Debug, Default)]
struct Generation {
    nodes: Vec<Node>,
    sorted_keys: Vec<MatrixKey>,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub max_length: usize,
    pub accept_r: f64,
    /// Worker threads; `None` uses the global rayon pool. Output does not
    /// depend on this.
    pub workers: Option<usize>,
    /// Stop before a generation that would push the total kept count past this.
    pub node_budget: Option<usize>,
    /// Deduplicate up to global phase instead of exactly.
    pub phase_fold: bool,
}

impl SearchOptions {
    pub fn new(max_length: usize) -> Self {
        SearchOptions {
            max_length,
            accept_r: super::form::DEFAULT_ACCEPT_R,
            workers: None,
            node_budget: None,
            phase_fold: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationStats {
    pub length: usize,
    pub candidates: usize,
    pub kept: usize,
}

/// All distinct matrices up to the completed length with their minimal words.
#[derive(Debug)]
pub struct Enumeration {
    generations: Vec<Generation>,
    pub stats: Vec<GenerationStats>,
    pub completed_length: usize,
    /// Set when the search stopped early.
    pub warning: Option<String>,
}

impl Enumeration {
    /// Number of distinct matrices over lengths `1..=completed_length`.
    pub fn distinct_count(&self) -> usize {
        self.generations[1..].iter().map(|g| g.nodes.len()).sum()
    }

    pub fn len_at(&self, length: usize) -> usize {
        self.generations.get(length).map_or(0, |g| g.nodes.len())
    }

    pub fn word(&self, length: usize, index: usize) -> GateSequence {
        let mut gates = Vec::with_capacity(length);
        let (mut l, mut i) = (length, index);
        while l > 0 {
            let node = self.generations[l].nodes[i];
            gates.push(node.gate);
            i = node.parent as usize;
            l -= 1;
        }
        GateSequence::new(gates)
    }

    pub fn key(&self, length: usize, index: usize) -> MatrixKey {
        self.generations[length].nodes[index].key
    }

    /// `(length, index, key)` for every kept word of length >= 1, by length
    /// then lex order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, MatrixKey)> + '_ {
        self.generations
            .iter()
            .enumerate()
            .skip(1)
            .flat_map(|(l, g)| g.nodes.iter().enumerate().map(move |(i, n)| (l, i, n.key)))
    }

    pub(crate) fn keys_at(&self, length: usize) -> impl IndexedParallelIterator<Item = (usize, MatrixKey)> + '_ {
        self.generations[length]
            .nodes
            .par_iter()
            .enumerate()
            .map(|(i, n)| (i, n.key))
    }
}

fn dedup_key(key: &MatrixKey, fold: bool) -> MatrixKey {
    if fold {
        key.phase_folded()
    } else {
        *key
    }
}

fn run<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

pub fn enumerate(opts: &SearchOptions) -> Result<Enumeration> {
    if opts.max_length == 0 {
        return Err(Error::invalid("max_length must be at least 1"));
    }
    run(opts.workers, || enumerate_inner(opts))?
}

fn enumerate_inner(opts: &SearchOptions) -> Result<Enumeration> {
    let fold = opts.phase_fold;
    // The empty word seeds the search but is not part of the dedup set.
    let seed = Generation {
        nodes: vec![Node {
            key: MatrixKey::identity(),
            parent: 0,
            gate: Gate::H,
        }],
        sorted_keys: Vec::new(),
    };
    let mut generations = vec![seed];
    let mut stats = Vec::new();
    let mut total = 0usize;
    let mut warning = None;

    for length in 1..=opts.max_length {
        let prev = &generations[length - 1].nodes;
        let n = prev.len();
        let earlier = &generations[1..];
        let mut fresh: Vec<(MatrixKey, MatrixKey, u64)> = (0..Gate::ALL.len() * n)
            .into_par_iter()
            .map(|pos| {
                let gate = Gate::ALL[pos / n];
                let key = prev[pos % n].key.left_mul(gate)?;
                let dkey = dedup_key(&key, fold);
                let seen = earlier.iter().any(|g| g.sorted_keys.binary_search(&dkey).is_ok());
                Ok((!seen).then_some((dkey, key, pos as u64)))
            })
            .filter_map(|r: Result<Option<_>>| r.transpose())
            .collect::<Result<_>>()?;
        let candidates = fresh.len();

        fresh.par_sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.2.cmp(&b.2)));
        fresh.dedup_by(|later, first| later.0 == first.0);

        if let Some(budget) = opts.node_budget {
            if total + fresh.len() > budget {
                warning = Some(format!(
                    "node budget {budget} exceeded at length {length}; search stopped after length {}",
                    length - 1
                ));
                break;
            }
        }

        let sorted_keys: Vec<MatrixKey> = fresh.iter().map(|f| f.0).collect();
        fresh.par_sort_unstable_by_key(|f| f.2);
        let nodes: Vec<Node> = fresh
            .into_iter()
            .map(|(_, key, pos)| {
                let pos = pos as usize;
                Node {
                    key,
                    parent: (pos % n) as u32,
                    gate: Gate::ALL[pos / n],
                }
            })
            .collect();
        total += nodes.len();
        stats.push(GenerationStats {
            length,
            candidates,
            kept: nodes.len(),
        });
        generations.push(Generation { nodes, sorted_keys });
    }

    let completed_length = generations.len() - 1;
    Ok(Enumeration {
        generations,
        stats,
        completed_length,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gates::evaluate;

    #[test]
    fn left_mul_matches_ring_product() {
        let words = ["", "H", "TH", "HTHS", "sHTHXZTH", "XZHTTHsHT"];
        for w in words {
            let seq: GateSequence = w.parse().unwrap();
            let mut key = MatrixKey::identity();
            for g in seq.gates().iter().rev() {
                key = key.left_mul(*g).unwrap();
            }
            let exact = evaluate(&seq).unwrap();
            assert_eq!(key, MatrixKey::from_ring(&exact).unwrap(), "{w}");
            assert_eq!(key.to_ring().unwrap(), exact, "{w}");
        }
    }

    #[test]
    fn phase_fold_identifies_global_phases() {
        let t: GateSequence = "TSTs".parse().unwrap();
        let k = MatrixKey::from_ring(&evaluate(&t).unwrap()).unwrap();
        assert_eq!(k.times_global_phase(3).phase_folded(), k.phase_folded());
        assert_ne!(k.times_global_phase(3), k);
    }

    #[test]
    fn depth_one_keeps_all_six_gates() {
        let e = enumerate(&SearchOptions::new(1)).unwrap();
        assert_eq!(e.len_at(1), 6);
        let words: Vec<String> = (0..6).map(|i| e.word(1, i).to_string()).collect();
        assert_eq!(words, ["H", "X", "Z", "T", "S", "s"]);
    }

    #[test]
    fn identity_first_appears_at_length_two() {
        let e = enumerate(&SearchOptions::new(2)).unwrap();
        let id = MatrixKey::identity();
        let hits: Vec<_> = e.entries().filter(|(_, _, k)| *k == id).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(e.word(hits[0].0, hits[0].1).to_string(), "HH");
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(enumerate(&SearchOptions::new(0)).is_err());
    }

    #[test]
    fn node_budget_stops_gracefully() {
        let mut opts = SearchOptions::new(6);
        opts.node_budget = Some(40);
        let e = enumerate(&opts).unwrap();
        assert!(e.completed_length < 6);
        assert!(e.warning.is_some());
        assert!(e.distinct_count() <= 40);
    }
}
