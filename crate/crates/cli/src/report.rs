use serde::{Deserialize, Serialize};

use ftwalk::matcore::{distance, error_stats};
use ftwalk::synth::{effective_matrix, FtProgram, Policy};
use ftwalk::{ComplexMatrix, Result};

/// Optional `# policy <name>` and `# table_depth <n>` comment lines of a
/// program file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProgramMeta {
    pub policy: Option<Policy>,
    pub table_depth: Option<usize>,
}

impl ProgramMeta {
    pub fn header(&self) -> String {
        let mut s = String::new();
        if let Some(p) = self.policy {
            s.push_str(&format!("# policy {p}\n"));
        }
        if let Some(d) = self.table_depth {
            s.push_str(&format!("# table_depth {d}\n"));
        }
        s
    }
}

pub fn read_program(text: &str) -> Result<(FtProgram, ProgramMeta)> {
    let prog = FtProgram::from_csv(text)?;
    let mut meta = ProgramMeta::default();
    for line in text.lines().map(str::trim) {
        let Some(rest) = line.strip_prefix('#') else { continue };
        let mut words = rest.split_whitespace();
        match (words.next(), words.next()) {
            (Some("policy"), Some(v)) => meta.policy = v.parse().ok(),
            (Some("table_depth"), Some(v)) => meta.table_depth = v.parse().ok(),
            _ => {}
        }
    }
    Ok((prog, meta))
}

/// Accuracy of a program against its target operator.
///
/// `max_rel_real` is a fraction, not a percentage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub distance: f64,
    pub max_abs_real: f64,
    pub max_rel_real: f64,
    pub max_imag: f64,
    pub gate_count: usize,
    pub policy: Option<String>,
    pub table_depth: Option<usize>,
}

/// The target is padded with an identity block when the program acts on a
/// larger space.
pub fn verify(prog: &FtProgram, meta: &ProgramMeta, u: &ComplexMatrix) -> Result<VerificationReport> {
    let dim = u.dim().max(prog.max_index());
    let target = if dim > u.dim() { u.embed(dim)? } else { u.clone() };
    let w = effective_matrix(prog, dim)?;
    let stats = error_stats(&target, &w)?;
    Ok(VerificationReport {
        distance: distance(&target, &w)?,
        max_abs_real: stats.max_abs_real,
        max_rel_real: stats.max_rel_real,
        max_imag: stats.max_imag,
        gate_count: prog.total_gate_count(),
        policy: meta.policy.map(|p| p.to_string()),
        table_depth: meta.table_depth,
    })
}
