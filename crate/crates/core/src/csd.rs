//! Recursive cosine-sine decomposition of a padded unitary into an ordered
//! list of two-level operations.
//!
//! At each level a `d×d` block is factored as
//! `(L1 ⊕ L2) · [[C, S], [-S, C]] · (R1 ⊕ R2)` with `C = diag(cos φ_r)`
//! non-negative and `S = diag(sin φ_r)`; the middle factor is emitted as
//! `R_y(φ_r)` rotations on index pairs `(p, p + d/2)`. The four half-size
//! blocks recurse until they are 2×2, which are written as `R_y` (plus a
//! trailing `Z` for reflections) when real, and as `Φ·R_z·R_y·R_z` otherwise.
//!
//! Ops are listed in matrix-product order: `ops[0]` is the leftmost factor,
//! i.e. the operation applied last to a state vector.

use std::fmt;
use std::str::FromStr;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Ops whose angle magnitude is below this (degrees) are dropped.
pub const ANGLE_DROP_DEG: f64 = 1e-9;
/// cs_decompose fails if the re-multiplied ops deviate from the input by this much.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

const REAL_INPUT_TOL: f64 = 1e-14;
const SINE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Ry,
    Rz,
    Phase,
    ZGate,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Ry => "Ry",
            OpKind::Rz => "Rz",
            OpKind::Phase => "Phase",
            OpKind::ZGate => "Z",
        })
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ry" => Ok(OpKind::Ry),
            "Rz" => Ok(OpKind::Rz),
            "Phase" => Ok(OpKind::Phase),
            "Z" => Ok(OpKind::ZGate),
            other => Err(Error::invalid(format!("unknown op kind {other:?}"))),
        }
    }
}

/// One two-level operation on 1-based coordinates `p < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelOp {
    pub kind: OpKind,
    /// Degrees in (-180, 180]; zero for `ZGate`.
    pub angle_deg: f64,
    pub p: usize,
    pub q: usize,
}

impl TwoLevelOp {
    pub fn new(kind: OpKind, angle_deg: f64, p: usize, q: usize) -> Result<Self> {
        if p == 0 || p >= q {
            return Err(Error::invalid(format!("invalid op target ({p}, {q})")));
        }
        let angle_deg = if kind == OpKind::ZGate {
            0.0
        } else {
            normalize_deg(angle_deg)
        };
        Ok(TwoLevelOp {
            kind,
            angle_deg,
            p,
            q,
        })
    }

    pub fn ry(angle_deg: f64, p: usize, q: usize) -> Result<Self> {
        Self::new(OpKind::Ry, angle_deg, p, q)
    }

    pub fn z(p: usize, q: usize) -> Result<Self> {
        Self::new(OpKind::ZGate, 0.0, p, q)
    }

    /// The 2×2 block acting on `(a_p, a_q)`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let phi = self.angle_deg.to_radians();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            OpKind::Ry => {
                let (s, c) = phi.sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                    [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            OpKind::Rz => [
                [Complex64::from_polar(1.0, phi), zero],
                [zero, Complex64::from_polar(1.0, -phi)],
            ],
            OpKind::Phase => [[one, zero], [zero, Complex64::from_polar(1.0, phi)]],
            OpKind::ZGate => [[one, zero], [zero, -one]],
        }
    }
}

/// Normalizes to (-180, 180].
pub fn normalize_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub padded_dim: usize,
    pub ops: Vec<TwoLevelOp>,
}

/// `diag(U, I)` padded up to the smallest power of two `>= dim(U)`.
pub fn pad_to_power_of_two(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.ensure_unitary()?;
    let n = u.dim();
    if n.is_power_of_two() {
        return Ok(u.clone());
    }
    u.embed(n.next_power_of_two())
}

/// Multiplies the ops back together (`ops[0]` leftmost).
pub fn reconstruct(d: &Decomposition) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(d.padded_dim);
    for op in &d.ops {
        m.mul_two_level_right(&op.matrix(), op.p - 1, op.q - 1);
    }
    m
}

pub fn cs_decompose(u: &ComplexMatrix) -> Result<Decomposition> {
    let n = u.dim();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    u.ensure_unitary()?;
    if n == 1 {
        if (u.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < RECONSTRUCTION_TOL {
            return Ok(Decomposition {
                padded_dim: 1,
                ops: Vec::new(),
            });
        }
        return Err(Error::Unsupported(
            "a 1x1 phase has no two-level form; pad the operator first".into(),
        ));
    }

    let mut ops = Vec::new();
    if u.max_imag() <= REAL_INPUT_TOL {
        let real = DMatrix::from_fn(n, n, |i, j| u.get(i, j).re);
        decompose_block(real, 0, &mut ops)?;
    } else {
        decompose_block(u.as_dmatrix().clone(), 0, &mut ops)?;
    }
    let d = Decomposition { padded_dim: n, ops };
    let residual = reconstruct(&d).max_abs_diff(u)?;
    if residual >= RECONSTRUCTION_TOL {
        return Err(Error::DecompositionFailed { residual });
    }
    Ok(d)
}

/// Scalar field the recursion runs over; real inputs stay real so every
/// emitted op is `Ry` or `Z`.
trait CsdField: ComplexField<RealField = f64> + Copy {
    /// `m = L · diag(σ) · R` with `L`, `R` unitary and `σ` non-negative.
    fn svd(m: &DMatrix<Self>) -> Result<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)>;

    fn emit_2x2(m: &DMatrix<Self>, offset: usize, ops: &mut Vec<TwoLevelOp>) -> Result<()>;
}

fn push(ops: &mut Vec<TwoLevelOp>, kind: OpKind, angle_deg: f64, p: usize, q: usize) -> Result<()> {
    let op = TwoLevelOp::new(kind, angle_deg, p, q)?;
    if kind == OpKind::ZGate || op.angle_deg.abs() >= ANGLE_DROP_DEG {
        ops.push(op);
    }
    Ok(())
}

// nalgebra's SVD loses accuracy on clustered singular values, which padded
// operators produce routinely; faer's does not.
fn faer_svd<T: CsdField, F: faer::traits::ComplexField + Copy>(
    m: &DMatrix<T>,
    to: impl Fn(T) -> F,
    from: impl Fn(F) -> T,
) -> Result<(DMatrix<T>, Vec<f64>, DMatrix<T>)> {
    let n = m.nrows();
    let a = faer::Mat::<F>::from_fn(n, n, |i, j| to(m[(i, j)]));
    let svd = a
        .svd()
        .map_err(|e| Error::Internal(format!("SVD did not converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S();
    let sigma = (0..n).map(|i| from(s.column_vector()[i]).real()).collect();
    let l = DMatrix::from_fn(n, n, |i, j| from(u[(i, j)]));
    // R = V^dag
    let r = DMatrix::from_fn(n, n, |i, j| from(v[(j, i)])).map(|x: T| x.conjugate());
    Ok((l, sigma, r))
}

impl CsdField for f64 {
    fn svd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
        faer_svd(m, |x| x, |x| x)
    }

    fn emit_2x2(m: &DMatrix<f64>, offset: usize, ops: &mut Vec<TwoLevelOp>) -> Result<()> {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let (p, q) = (offset + 1, offset + 2);
        if a * d - b * c > 0.0 {
            push(ops, OpKind::Ry, b.atan2(a).to_degrees(), p, q)
        } else {
            // R_y(φ)·Z = [[cos, -sin], [-sin, -cos]]
            push(ops, OpKind::Ry, (-b).atan2(a).to_degrees(), p, q)?;
            push(ops, OpKind::ZGate, 0.0, p, q)
        }
    }
}

impl CsdField for Complex64 {
    fn svd(m: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>)> {
        faer_svd(m, |z| faer::c64::new(z.re, z.im), |z| Complex64::new(z.re, z.im))
    }

    fn emit_2x2(m: &DMatrix<Complex64>, offset: usize, ops: &mut Vec<TwoLevelOp>) -> Result<()> {
        let (p, q) = (offset + 1, offset + 2);
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let delta = det.arg() / 2.0;
        let unphase = Complex64::from_polar(1.0, -delta);
        let alpha = m[(0, 0)] * unphase;
        let beta = m[(0, 1)] * unphase;
        // e^{-iδ} M = R_z(a) R_y(θ) R_z(b)
        let theta = beta.norm().atan2(alpha.norm());
        let (sum, diff) = (alpha.arg(), beta.arg());
        let a = (sum + diff) / 2.0;
        let b = (sum - diff) / 2.0;
        // e^{iδ} R_z(a) = Φ(2δ) R_z(a + δ)
        let phase = normalize_deg((2.0 * delta).to_degrees());
        if (phase - 180.0).abs() < ANGLE_DROP_DEG {
            push(ops, OpKind::ZGate, 0.0, p, q)?;
        } else {
            push(ops, OpKind::Phase, phase, p, q)?;
        }
        push(ops, OpKind::Rz, (a + delta).to_degrees(), p, q)?;
        push(ops, OpKind::Ry, theta.to_degrees(), p, q)?;
        push(ops, OpKind::Rz, b.to_degrees(), p, q)
    }
}

fn decompose_block<T: CsdField>(u: DMatrix<T>, offset: usize, ops: &mut Vec<TwoLevelOp>) -> Result<()> {
    let n = u.nrows();
    if n == 2 {
        return T::emit_2x2(&u, offset, ops);
    }
    let h = n / 2;
    let u11 = u.view((0, 0), (h, h)).into_owned();
    let u12 = u.view((0, h), (h, h)).into_owned();
    let u21 = u.view((h, 0), (h, h)).into_owned();
    let u22 = u.view((h, h), (h, h)).into_owned();

    let (l1, cos, r1) = T::svd(&u11)?;

    // Q = U21 R1^dag = L2 |S|: its columns are orthogonal with norms |sin φ_r|.
    let qmat = &u21 * r1.adjoint();
    let sin: Vec<f64> = (0..h).map(|j| qmat.column(j).norm()).collect();
    let l2 = orthonormal_from_columns(&qmat, &sin)?;

    let angles: Vec<f64> = cos.iter().zip(&sin).map(|(&c, &s)| (-s).atan2(c)).collect();

    // With CS = [[C, S], [-S, C]] and S = -|S|: U12 = L1 S R2, U22 = L2 C R2,
    // so R2 = S (L1^dag U12) + C (L2^dag U22) row by row.
    let x = l1.adjoint() * &u12;
    let y = l2.adjoint() * &u22;
    let mut r2 = DMatrix::<T>::zeros(h, h);
    for (r, &phi) in angles.iter().enumerate() {
        let (s, c) = phi.sin_cos();
        for col in 0..h {
            r2[(r, col)] = x[(r, col)].scale(s) + y[(r, col)].scale(c);
        }
    }

    decompose_block(l1, offset, ops)?;
    decompose_block(l2, offset + h, ops)?;
    for (r, &phi) in angles.iter().enumerate() {
        push(ops, OpKind::Ry, phi.to_degrees(), offset + r + 1, offset + r + h + 1)?;
    }
    decompose_block(r1, offset, ops)?;
    decompose_block(r2, offset + h, ops)
}

/// Normalized columns of `q` (largest norms first), re-orthogonalized, with
/// columns of negligible norm replaced by a deterministic completion.
fn orthonormal_from_columns<T: CsdField>(q: &DMatrix<T>, norms: &[f64]) -> Result<DMatrix<T>> {
    let h = q.nrows();
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let mut out = DMatrix::<T>::zeros(h, h);
    let mut accepted: Vec<usize> = Vec::with_capacity(h);
    let mut deferred = Vec::new();
    for &j in &order {
        if norms[j] <= SINE_FLOOR {
            deferred.push(j);
            continue;
        }
        let v = q.column(j).into_owned().unscale(norms[j]);
        match orthogonalize(v, &out, &accepted) {
            Some(v) => {
                out.set_column(j, &v);
                accepted.push(j);
            }
            None => deferred.push(j),
        }
    }
    for j in deferred {
        // Basis vector with the largest component outside the accepted span.
        let best = (0..h)
            .filter_map(|i| {
                let mut e = nalgebra::DVector::<T>::zeros(h);
                e[i] = T::one();
                let v = project_out(e, &out, &accepted);
                let norm = v.norm();
                (norm > 1e-6).then_some((norm, v))
            })
            .fold(None::<(f64, nalgebra::DVector<T>)>, |best, cand| match best {
                Some(b) if b.0 >= cand.0 => Some(b),
                _ => Some(cand),
            })
            .ok_or_else(|| Error::Internal("orthonormal completion failed".into()))?;
        out.set_column(j, &best.1.unscale(best.0));
        accepted.push(j);
    }
    Ok(out)
}

/// Two passes of Gram-Schmidt against the accepted columns of `basis`.
fn project_out<T: CsdField>(
    mut v: nalgebra::DVector<T>,
    basis: &DMatrix<T>,
    accepted: &[usize],
) -> nalgebra::DVector<T> {
    for _ in 0..2 {
        for &k in accepted {
            let col = basis.column(k);
            let proj = col.dotc(&v);
            v -= col * proj;
        }
    }
    v
}

/// Normalized remainder of `v` after projection, or `None` if most of it
/// was already in the accepted span.
fn orthogonalize<T: CsdField>(
    v: nalgebra::DVector<T>,
    basis: &DMatrix<T>,
    accepted: &[usize],
) -> Option<nalgebra::DVector<T>> {
    let start = v.norm();
    let v = project_out(v, basis, accepted);
    let norm = v.norm();
    (norm > 0.5 * start && norm > 0.0).then(|| v.unscale(norm))
}

/// CSV with header `kind,angle_deg,p,q`, rows in list order. `Z` rows leave
/// the angle empty.
pub fn decomposition_to_csv(d: &Decomposition) -> String {
    let mut out = format!("# padded_dim={}\nkind,angle_deg,p,q\n", d.padded_dim);
    for op in &d.ops {
        let angle = match op.kind {
            OpKind::ZGate => String::new(),
            _ => format!("{}", op.angle_deg),
        };
        out.push_str(&format!("{},{},{},{}\n", op.kind, angle, op.p, op.q));
    }
    out
}

/// Parses the decomposition CSV. `#` lines are comments; a
/// `# padded_dim=N` comment sets the dimension, otherwise it is the smallest
/// power of two covering every index.
pub fn decomposition_from_csv(text: &str) -> Result<Decomposition> {
    let mut padded_dim = None;
    let mut ops = Vec::new();
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("padded_dim=") {
                padded_dim = Some(v.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid padded_dim {v:?}"),
                })?);
            }
            continue;
        }
        if !saw_header {
            if line != "kind,angle_deg,p,q" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected header `kind,angle_deg,p,q`".into(),
                });
            }
            saw_header = true;
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, found {}", fields.len())));
        }
        let kind: OpKind = fields[0].parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let angle = if kind == OpKind::ZGate && fields[1].is_empty() {
            0.0
        } else {
            fields[1]
                .parse::<f64>()
                .map_err(|_| parse_err(format!("invalid angle {:?}", fields[1])))?
        };
        let p: usize = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("invalid index {:?}", fields[2])))?;
        let q: usize = fields[3]
            .parse()
            .map_err(|_| parse_err(format!("invalid index {:?}", fields[3])))?;
        ops.push(TwoLevelOp::new(kind, angle, p, q).map_err(|e| parse_err(e.to_string()))?);
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header `kind,angle_deg,p,q`".into(),
        });
    }
    let max_index = ops.iter().map(|o| o.q).max().unwrap_or(1);
    let padded_dim = padded_dim.unwrap_or_else(|| max_index.next_power_of_two());
    if max_index > padded_dim {
        return Err(Error::IndexOutOfRange {
            index: max_index,
            dim: padded_dim,
        });
    }
    Ok(Decomposition { padded_dim, ops })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ry(deg: f64) -> ComplexMatrix {
        let (s, c) = deg.to_radians().sin_cos();
        ComplexMatrix::from_real_rows(&[vec![c, s], vec![-s, c]]).unwrap()
    }

    #[test]
    fn padding_sizes() {
        for (n, padded) in [(16, 16), (3, 4), (9, 16), (1, 1), (5, 8)] {
            let u = ComplexMatrix::identity(n);
            assert_eq!(pad_to_power_of_two(&u).unwrap().dim(), padded);
        }
        let bad = ComplexMatrix::from_real_rows(&[vec![2.0]]).unwrap();
        assert!(pad_to_power_of_two(&bad).is_err());
    }

    #[test]
    fn base_case_rotation() {
        let d = cs_decompose(&ry(30.0)).unwrap();
        assert_eq!(d.ops.len(), 1);
        let op = d.ops[0];
        assert_eq!((op.kind, op.p, op.q), (OpKind::Ry, 1, 2));
        assert!((op.angle_deg - 30.0).abs() < 1e-12);
    }

    #[test]
    fn base_case_reflection_ends_in_z() {
        let refl = ry(40.0).mul(&ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()).unwrap();
        let d = cs_decompose(&refl).unwrap();
        let kinds: Vec<OpKind> = d.ops.iter().map(|o| o.kind).collect();
        assert_eq!(kinds, vec![OpKind::Ry, OpKind::ZGate]);
        assert!((d.ops[0].angle_deg - 40.0).abs() < 1e-12);
    }

    #[test]
    fn identity_yields_no_ops() {
        for n in [2, 4, 8, 16] {
            let d = cs_decompose(&ComplexMatrix::identity(n)).unwrap();
            assert!(d.ops.is_empty(), "n={n}: {:?}", d.ops);
            assert_eq!(reconstruct(&d), ComplexMatrix::identity(n));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            cs_decompose(&ComplexMatrix::identity(3)),
            Err(Error::NotPowerOfTwo(3))
        ));
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(cs_decompose(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn reconstruct_single_op() {
        let d = Decomposition {
            padded_dim: 16,
            ops: vec![TwoLevelOp::ry(-90.0, 1, 9).unwrap()],
        };
        let m = reconstruct(&d);
        assert!(m.get(0, 0).norm() < 1e-15);
        assert!(m.get(8, 8).norm() < 1e-15);
        assert!((m.get(0, 8).re + 1.0).abs() < 1e-15);
        assert!((m.get(8, 0).re - 1.0).abs() < 1e-15);
        assert_eq!(m.get(3, 3).re, 1.0);
        let empty = Decomposition { padded_dim: 4, ops: vec![] };
        assert_eq!(reconstruct(&empty), ComplexMatrix::identity(4));
    }

    #[test]
    fn complex_2x2_round_trip() {
        let i = Complex64::i();
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.6, 0.0) * i, Complex64::new(0.8, 0.0)],
            vec![Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0) * i],
        ])
        .unwrap();
        let d = cs_decompose(&m).unwrap();
        assert!(reconstruct(&d).max_abs_diff(&m).unwrap() < 1e-12);
    }

    #[test]
    fn angles_are_normalized() {
        assert_eq!(normalize_deg(180.0), 180.0);
        assert_eq!(normalize_deg(-180.0), 180.0);
        assert_eq!(normalize_deg(270.0), -90.0);
        assert_eq!(TwoLevelOp::new(OpKind::Rz, 540.0, 1, 2).unwrap().angle_deg, 180.0);
        assert!(TwoLevelOp::ry(1.0, 2, 2).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = Decomposition {
            padded_dim: 16,
            ops: vec![
                TwoLevelOp::ry(-90.0, 1, 9).unwrap(),
                TwoLevelOp::ry(18.933, 9, 10).unwrap(),
                TwoLevelOp::z(15, 16).unwrap(),
            ],
        };
        let text = decomposition_to_csv(&d);
        assert!(text.contains("Z,,15,16"));
        assert_eq!(decomposition_from_csv(&text).unwrap(), d);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let text = "kind,angle_deg,p,q\nRy,10,1,2\nRy,ten,1,2\n";
        assert!(matches!(decomposition_from_csv(text), Err(Error::Parse { line: 3, .. })));
        assert!(decomposition_from_csv("Ry,10,1,2\n").is_err());
    }
}
