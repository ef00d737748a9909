use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ftwalk::csd::{cs_decompose, decomposition_from_csv, decomposition_to_csv, pad_to_power_of_two, reconstruct};
use ftwalk::matcore::{matrix_to_json, read_matrix};
use ftwalk::steane::{encode_superposition, fidelity, ft_t_gate, TBranches, TranscriptStep};
use ftwalk::synth::{angle_key, effective_matrix, search, Policy, SearchOptions, TableSet};
use ftwalk::walkgen::{build_state_index, build_state_index_with_order, build_walk_operator, CoinFamily, EdgeStateIndex, Graph};
use ftwalk::ComplexMatrix;

use crate::checks::{random_qubit, steane_checks};
use crate::report::{read_program, verify, ProgramMeta};
use crate::{CliError, SteaneArgs};

type CmdResult = Result<(), CliError>;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::validation(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn with_path<T>(path: &Path, r: ftwalk::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| {
        let mut c = CliError::from(e);
        c.message = format!("{}: {}", path.display(), c.message);
        c
    })
}

fn coin_family(spec: &str) -> Result<CoinFamily, CliError> {
    match spec {
        "grover" => Ok(CoinFamily::Grover),
        "identity" => Ok(CoinFamily::Identity),
        _ => {
            let Some(dir) = spec.strip_prefix("file:") else {
                return Err(CliError::validation(format!(
                    "unknown coin {spec:?}; expected grover, identity or file:<dir>"
                )));
            };
            let mut coins = BTreeMap::new();
            let entries = std::fs::read_dir(dir).map_err(|e| CliError::validation(format!("{dir}: {e}")))?;
            for entry in entries {
                let path = entry?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let vertex: usize = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        CliError::validation(format!("{}: coin files must be named <vertex>.json", path.display()))
                    })?;
                coins.insert(vertex, with_path(&path, read_matrix(&path))?);
            }
            Ok(CoinFamily::PerVertex(coins))
        }
    }
}

fn state_index(g: &Graph, spec: &str) -> Result<EdgeStateIndex, CliError> {
    if spec == "default" {
        return Ok(build_state_index(g));
    }
    let Some(file) = spec.strip_prefix("file:") else {
        return Err(CliError::validation(format!(
            "unknown order {spec:?}; expected default or file:<path>"
        )));
    };
    let path = Path::new(file);
    let order = with_path(path, EdgeStateIndex::parse_order(&read_text(path)?))?;
    Ok(build_state_index_with_order(g, &order)?)
}

pub(crate) fn walk_build(graph: &Path, coin: &str, order: &str, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let g = with_path(graph, Graph::parse(&read_text(graph)?))?;
    let coins = coin_family(coin)?;
    let idx = state_index(&g, order)?;
    let op = build_walk_operator(&g, &coins, &idx)?;
    emit(path, &matrix_to_json(&op.u), out)
}

pub(crate) fn decompose(matrix: &Path, path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let u = with_path(matrix, read_matrix(matrix))?;
    let padded = pad_to_power_of_two(&u)?;
    let d = cs_decompose(&padded)?;
    let residue = reconstruct(&d).max_abs_diff(&padded)?;
    emit(path, &decomposition_to_csv(&d), out)?;
    let log: &mut dyn Write = if path.is_some() { out } else { err };
    writeln!(log, "residue {residue}")?;
    Ok(())
}

pub(crate) fn table(opts: &SearchOptions, dir: &Path, list_angles: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (tables, e) = search(opts)?;
    if let Some(w) = &e.warning {
        writeln!(err, "warning: {w}")?;
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::validation(format!("{}: {e}", dir.display())))?;
    tables.write_dir(dir)?;
    writeln!(
        out,
        "search: max_length={} completed_length={} distinct={}",
        opts.max_length,
        e.completed_length,
        e.distinct_count()
    )?;
    for t in tables.tables() {
        match t.gap_stats() {
            Some(s) => writeln!(
                out,
                "{} {}: angles={} mean_gap={} max_gap={} min_gap={} gaps_over_1deg={}",
                t.policy, t.sign, s.angle_count, s.mean_gap, s.max_gap, s.min_gap, s.gaps_over_one_degree
            )?,
            None => writeln!(out, "{} {}: angles={}", t.policy, t.sign, t.len())?,
        }
        if list_angles {
            let angles: Vec<String> = t.entries().iter().map(|a| format!("{:.3}", a.angle_deg)).collect();
            writeln!(out, "  {}", angles.join(" "))?;
        }
    }
    Ok(())
}

pub(crate) fn compile(decomposition: &Path, tables: &Path, policy: Policy, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let d = with_path(decomposition, decomposition_from_csv(&read_text(decomposition)?))?;
    let set = TableSet::read_dir(tables)?;
    let prog = ftwalk::synth::compile(&d, &set, policy)?;
    let meta = ProgramMeta {
        policy: Some(policy),
        table_depth: Some(set.max_length()),
    };
    emit(path, &format!("{}{}", meta.header(), prog.to_csv()), out)
}

pub(crate) fn verify_cmd(program: &Path, matrix: &Path, out: &mut dyn Write) -> CmdResult {
    let (prog, meta) = with_path(program, read_program(&read_text(program)?))?;
    let u = with_path(matrix, read_matrix(matrix))?;
    let report = verify(&prog, &meta, &u)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

#[derive(Deserialize)]
struct StateFile {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Probabilities of `psi`, then of `U psi`, ... up to `steps` applications.
pub fn simulate_csv(u: &ComplexMatrix, psi: &[Complex64], steps: usize) -> ftwalk::Result<String> {
    let n = u.dim();
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if psi.len() != n {
        return Err(ftwalk::Error::DimensionMismatch {
            expected: n,
            found: psi.len(),
        });
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(ftwalk::Error::Invalid(format!("initial state has norm² {norm}, expected 1")));
    }
    u.ensure_unitary()?;
    let mut csv = String::from("step");
    for i in 1..=n {
        csv.push_str(&format!(",p{i}"));
    }
    csv.push('\n');
    let mut state = psi.to_vec();
    for step in 0..=steps {
        if step > 0 {
            state = u.apply(&state)?;
        }
        csv.push_str(&step.to_string());
        for a in &state {
            csv.push_str(&format!(",{}", a.norm_sqr()));
        }
        csv.push('\n');
    }
    Ok(csv)
}

pub(crate) fn simulate(
    matrix: Option<&Path>,
    program: Option<&Path>,
    dim: Option<usize>,
    start: usize,
    state: Option<&Path>,
    steps: usize,
    out: &mut dyn Write,
) -> CmdResult {
    let u = match (matrix, program) {
        (Some(m), _) => with_path(m, read_matrix(m))?,
        (None, Some(p)) => {
            let (prog, _) = with_path(p, read_program(&read_text(p)?))?;
            let dim = dim.unwrap_or_else(|| prog.max_index().max(1).next_power_of_two());
            effective_matrix(&prog, dim)?
        }
        (None, None) => return Err(CliError::validation("one of --matrix or --program is required")),
    };
    let psi = match state {
        Some(p) => {
            let f: StateFile = serde_json::from_str(&read_text(p)?)
                .map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?;
            if f.re.len() != f.im.len() {
                return Err(CliError::validation(format!("{}: `re` and `im` differ in length", p.display())));
            }
            f.re.iter().zip(&f.im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        }
        None => {
            if start == 0 || start > u.dim() {
                return Err(CliError::validation(format!("start state {start} not in 1..={}", u.dim())));
            }
            let mut v = vec![Complex64::new(0.0, 0.0); u.dim()];
            v[start - 1] = Complex64::new(1.0, 0.0);
            v
        }
    };
    emit(None, &simulate_csv(&u, &psi, steps)?, out)
}

/// `angle_deg,r` rows: for every table angle magnitude, the smallest `r`
/// found at either sign.
pub fn plot_data(tables: &TableSet) -> String {
    let mut best: BTreeMap<i64, f64> = BTreeMap::new();
    for t in tables.tables() {
        for e in t.entries() {
            let r = best.entry(angle_key(e.angle_deg.abs())).or_insert(f64::INFINITY);
            *r = r.min(e.r);
        }
    }
    let mut csv = String::from("angle_deg,r\n");
    for (key, r) in best {
        csv.push_str(&format!("{:.3},{r}\n", key as f64 / 1000.0));
    }
    csv
}

pub(crate) fn plot_data_cmd(dir: &Path, out: &mut dyn Write) -> CmdResult {
    let tables = TableSet::read_dir(dir)?;
    emit(None, &plot_data(&tables), out)
}

#[derive(Serialize)]
struct FinalStep {
    step: &'static str,
    gates: Vec<String>,
    fidelity: f64,
}

pub(crate) fn steane(args: &SteaneArgs, out: &mut dyn Write) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if args.check.is_some() {
        let results = steane_checks(&mut rng)?;
        for r in &results {
            writeln!(out, "{}", serde_json::to_string(r)?)?;
        }
        let failed = results.iter().filter(|r| !r.pass).count();
        if failed > 0 {
            return Err(CliError::internal(format!("{failed} Steane checks failed")));
        }
        return Ok(());
    }
    let (a, b) = random_qubit(&mut rng);
    let input = encode_superposition(a, b)?;
    let branches = TBranches {
        ancilla: args.ancilla_branch,
        measurement: args.branch,
    };
    let run = ft_t_gate(&input, branches, &mut rng)?;
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let want = encode_superposition(a, b * t)?;
    for step in &run.transcript {
        writeln!(out, "{}", serde_json::to_string::<TranscriptStep>(step)?)?;
    }
    let done = FinalStep {
        step: "verify",
        gates: Vec::new(),
        fidelity: fidelity(&run.output, &want)?,
    };
    writeln!(out, "{}", serde_json::to_string(&done)?)?;
    Ok(())
}
