use crate::csd::{Decomposition, OpKind};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::synth::gates::{evaluate, GateSequence};
use crate::synth::table::{Policy, TableSet};

const HEADER: &str = "sequence,p,q";

/// One gate sequence acting on the 1-based coordinate pair `(p, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramRecord {
    pub seq: GateSequence,
    pub p: usize,
    pub q: usize,
}

/// Compiled walk step. Records are in the same order as the decomposition
/// ops: the first record is the leftmost matrix factor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FtProgram {
    pub records: Vec<ProgramRecord>,
}

impl FtProgram {
    pub fn new(records: Vec<ProgramRecord>) -> Result<Self> {
        for r in &records {
            if r.p == 0 || r.p >= r.q {
                return Err(Error::invalid(format!("invalid record target ({}, {})", r.p, r.q)));
            }
        }
        Ok(FtProgram { records })
    }

    pub fn total_gate_count(&self) -> usize {
        self.records.iter().map(|r| r.seq.len()).sum()
    }

    pub fn max_index(&self) -> usize {
        self.records.iter().map(|r| r.q).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.seq, r.p, r.q));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut saw_header = false;
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != HEADER {
                    return Err(err(format!("expected header `{HEADER}`")));
                }
                saw_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", f.len())));
            }
            let seq: GateSequence = f[0].parse().map_err(|e: Error| err(e.to_string()))?;
            let idx = |s: &str| s.parse::<usize>().map_err(|_| err(format!("invalid index {s:?}")));
            let (p, q) = (idx(f[1])?, idx(f[2])?);
            if p == 0 || p >= q {
                return Err(err(format!("invalid record target ({p}, {q})")));
            }
            records.push(ProgramRecord { seq, p, q });
        }
        if !saw_header {
            return Err(Error::Parse {
                line: 1,
                msg: format!("missing header `{HEADER}`"),
            });
        }
        Ok(FtProgram { records })
    }
}

/// Replaces every rotation with its nearest nonzero table entry and every
/// `Z` with the single gate `Z`.
pub fn compile(d: &Decomposition, tables: &TableSet, policy: Policy) -> Result<FtProgram> {
    let mut records = Vec::with_capacity(d.ops.len());
    for op in &d.ops {
        let seq = match op.kind {
            OpKind::ZGate => "Z".parse()?,
            OpKind::Phase if op.angle_deg == 180.0 => "Z".parse()?,
            OpKind::Ry => tables.lookup_nonzero(policy, op.angle_deg)?.seq.clone(),
            kind => {
                return Err(Error::Unsupported(format!(
                    "{kind}({}) on ({}, {}) has no table",
                    op.angle_deg, op.p, op.q
                )))
            }
        };
        records.push(ProgramRecord { seq, p: op.p, q: op.q });
    }
    Ok(FtProgram { records })
}

/// Product of the embedded record matrices in record order.
pub fn effective_matrix(prog: &FtProgram, dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut m = ComplexMatrix::identity(dim);
    for r in &prog.records {
        if r.q > dim {
            return Err(Error::IndexOutOfRange { index: r.q, dim });
        }
        let block = evaluate(&r.seq)?.to_complex();
        m.mul_two_level_right(&block, r.p - 1, r.q - 1);
    }
    Ok(m)
}
