//! Coined discrete-time walk operators `U = T·C` on undirected graphs.
//!
//! The walker lives on directed edge states `|j,k⟩`. The coin `C` mixes the
//! states leaving each vertex `j` (grouped by the first index), and the shift
//! `T` maps `|j,k⟩ ↦ |k,j⟩`. Self-loops contribute a single state `|v,v⟩`
//! fixed by `T`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, UNITARY_TOL};

/// Undirected graph on vertices `1..=vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut seen = BTreeSet::new();
        for &(j, k) in &edges {
            for v in [j, k] {
                if v == 0 || v > vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        dim: vertex_count,
                    });
                }
            }
            if !seen.insert((j.min(k), j.max(k))) {
                return Err(Error::invalid(format!("duplicate edge ({j}, {k})")));
            }
        }
        Ok(Graph {
            vertex_count,
            edges,
        })
    }

    /// Star with `leaves` leaves; the centre is vertex 1.
    pub fn star(leaves: usize) -> Result<Self> {
        Graph::new(leaves + 1, (2..=leaves + 1).map(|v| (1, v)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of states leaving each vertex (index 0 unused).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count + 1];
        for &(j, k) in &self.edges {
            deg[j] += 1;
            if j != k {
                deg[k] += 1;
            }
        }
        deg
    }

    /// Parses `vertices N` followed by one `j k` pair per line. Blank lines
    /// and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty graph file".into(),
        })?;
        let mut parts = header.split_whitespace();
        let count = match (parts.next(), parts.next(), parts.next()) {
            (Some("vertices"), Some(n), None) => n.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid vertex count {n:?}"),
            })?,
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected `vertices N`".into(),
                })
            }
        };
        let mut edges = Vec::new();
        for (line_no, line) in lines {
            let pair = parse_pair(line).ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `j k`, found {line:?}"),
            })?;
            edges.push(pair);
        }
        Graph::new(count, edges).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                line: line_no,
                msg: other.to_string(),
            },
        })
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let j = it.next()?.parse().ok()?;
    let k = it.next()?.parse().ok()?;
    it.next().is_none().then_some((j, k))
}

/// Ordered list of directed edge states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStateIndex {
    states: Vec<(usize, usize)>,
    position: HashMap<(usize, usize), usize>,
}

impl EdgeStateIndex {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    /// Zero-based position of `|j,k⟩`.
    pub fn position(&self, j: usize, k: usize) -> Option<usize> {
        self.position.get(&(j, k)).copied()
    }

    fn from_states(states: Vec<(usize, usize)>) -> Self {
        let position = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        EdgeStateIndex { states, position }
    }

    /// Parses an ordering override: one `j k` state per line.
    pub fn parse_order(text: &str) -> Result<Vec<(usize, usize)>> {
        text.lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .map(|(line, l)| {
                parse_pair(l).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("expected `j k`, found {l:?}"),
                })
            })
            .collect()
    }
}

fn all_states(g: &Graph) -> BTreeSet<(usize, usize)> {
    let mut states = BTreeSet::new();
    for &(j, k) in g.edges() {
        states.insert((j, k));
        states.insert((k, j));
    }
    states
}

/// Default ordering: by first vertex, then second vertex, ascending.
pub fn build_state_index(g: &Graph) -> EdgeStateIndex {
    EdgeStateIndex::from_states(all_states(g).into_iter().collect())
}

/// Uses `order` as the state ordering; it must list every state of `g`
/// exactly once.
pub fn build_state_index_with_order(g: &Graph, order: &[(usize, usize)]) -> Result<EdgeStateIndex> {
    let expected = all_states(g);
    let given: BTreeSet<_> = order.iter().copied().collect();
    if given.len() != order.len() {
        return Err(Error::invalid("ordering lists a state more than once"));
    }
    if given != expected {
        let missing = expected.difference(&given).next();
        let extra = given.difference(&expected).next();
        return Err(Error::invalid(match (missing, extra) {
            (_, Some(s)) => format!("ordering contains |{},{}⟩, which is not a graph state", s.0, s.1),
            (Some(s), _) => format!("ordering is missing state |{},{}⟩", s.0, s.1),
            _ => unreachable!(),
        }));
    }
    Ok(EdgeStateIndex::from_states(order.to_vec()))
}

/// The ordering under which the star walk operator takes its standard block
/// form: leaf→centre states first, then centre→leaf, leaves ascending.
pub fn star_ordering(g: &Graph) -> Vec<(usize, usize)> {
    let leaves: Vec<usize> = (2..=g.vertex_count()).collect();
    leaves
        .iter()
        .map(|&l| (l, 1))
        .chain(leaves.iter().map(|&l| (1, l)))
        .collect()
}

/// Grover coin `2/d·J - I`.
pub fn grover_coin(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::invalid("coin dimension must be positive"));
    }
    let diag = 2.0 / d as f64 - 1.0;
    let off = 2.0 / d as f64;
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        Complex64::new(if i == j { diag } else { off }, 0.0)
    }))
}

/// Per-vertex coin assignment.
#[derive(Debug, Clone, Default)]
pub enum CoinFamily {
    #[default]
    Grover,
    Identity,
    /// Explicit coins by vertex; vertices without an entry use Grover.
    PerVertex(BTreeMap<usize, ComplexMatrix>),
}

impl CoinFamily {
    fn coin_for(&self, vertex: usize, degree: usize) -> Result<ComplexMatrix> {
        match self {
            CoinFamily::Grover => grover_coin(degree),
            CoinFamily::Identity => Ok(ComplexMatrix::identity(degree)),
            CoinFamily::PerVertex(map) => match map.get(&vertex) {
                Some(c) => Ok(c.clone()),
                None => grover_coin(degree),
            },
        }
    }
}

/// `U = T·C` together with its factors.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    pub u: ComplexMatrix,
    pub coin: ComplexMatrix,
    /// `shift[i]` is the image position of state `i` under `T`.
    pub shift: Vec<usize>,
}

impl WalkOperator {
    pub fn dim(&self) -> usize {
        self.u.dim()
    }
}

pub fn build_walk_operator(
    g: &Graph,
    coins: &CoinFamily,
    idx: &EdgeStateIndex,
) -> Result<WalkOperator> {
    let n = idx.len();
    if n == 0 {
        return Err(Error::invalid("graph has no edges; the walk has no states"));
    }
    let covers = |j: usize, k: usize| {
        g.edges()
            .iter()
            .any(|&(a, b)| (a, b) == (j, k) || (a, b) == (k, j))
    };
    let expected: usize = g.edges().iter().map(|&(a, b)| if a == b { 1 } else { 2 }).sum();
    if n != expected ||idx.states().iter().any(|&(j, k)| !covers(j, k)) {
        return Err(Error::invalid("state index does not match the graph's edges"));
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, &(j, _)) in idx.states().iter().enumerate() {
        groups.entry(j).or_default().push(pos);
    }

    let mut coin = ComplexMatrix::zeros(n);
    for (&v, members) in &groups {
        let c = coins.coin_for(v, members.len())?;
        if c.dim() != members.len() {
            return Err(Error::invalid(format!(
                "coin for vertex {v} is {0}x{0}, vertex degree is {1}",
                c.dim(),
                members.len()
            )));
        }
        let residual = c.unitarity_residual();
        if residual >= UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        for (a, &row) in members.iter().enumerate() {
            for (b, &col) in members.iter().enumerate() {
                coin.set(row, col, c.get(a, b));
            }
        }
    }

    let shift: Vec<usize> = idx
        .states()
        .iter()
        .map(|&(j, k)| {
            idx.position(k, j)
                .ok_or_else(|| Error::Internal(format!("reverse of |{j},{k}⟩ missing")))
        })
        .collect::<Result<_>>()?;

    // (T·C)[shift[i], :] = C[i, :]
    let mut u = ComplexMatrix::zeros(n);
    for (i, &target) in shift.iter().enumerate() {
        for col in 0..n {
            u.set(target, col, coin.get(i, col));
        }
    }
    Ok(WalkOperator { u, coin, shift })
}

/// One walk step `ψ ↦ Uψ`.
pub fn walk_step(op: &WalkOperator, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if psi.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: psi.len(),
        });
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("state norm {norm} is not 1")));
    }
    op.u.apply(psi)
}
