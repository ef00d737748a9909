use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matcore::ComplexMatrix;

/// Phase-insensitive distance `sqrt((w - |tr(W^dag Wl)|) / w)` between two
/// `w×w` unitaries, clamped to `[0, 1]`.
///
/// Evaluated as `‖W - e^{-iθ} Wl‖_F / sqrt(2w)` with `θ = arg tr(W^dag Wl)`,
/// which equals the trace form for unitaries but does not lose half the
/// significant digits to the square root when the two are close.
pub fn distance(w: &ComplexMatrix, wl: &ComplexMatrix) -> Result<f64> {
    w.same_dim(wl)?;
    w.check_finite()?;
    wl.check_finite()?;
    let dim = w.dim() as f64;
    let tr = (w.as_dmatrix().adjoint() * wl.as_dmatrix()).trace();
    let phase = if tr.norm() > 0.0 {
        tr / tr.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sq: f64 = w
        .as_dmatrix()
        .iter()
        .zip(wl.as_dmatrix().iter())
        .map(|(a, b)| (a - phase.conj() * b).norm_sqr())
        .sum();
    Ok((sq / (2.0 * dim)).sqrt().min(1.0))
}

/// Entrywise error statistics of an approximation `wl` of a real target `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub max_abs_real: f64,
    /// Relative error over entries where the target is nonzero (a fraction, not %).
    pub max_rel_real: f64,
    pub max_imag: f64,
}

pub fn error_stats(w: &ComplexMatrix, wl: &ComplexMatrix) -> Result<ErrorStats> {
    w.same_dim(wl)?;
    let mut stats = ErrorStats {
        max_abs_real: 0.0,
        max_rel_real: 0.0,
        max_imag: 0.0,
    };
    for (target, approx) in w.as_dmatrix().iter().zip(wl.as_dmatrix().iter()) {
        let err = (approx.re - target.re).abs();
        stats.max_abs_real = stats.max_abs_real.max(err);
        if target.re != 0.0 {
            stats.max_rel_real = stats.max_rel_real.max(err / target.re.abs());
        }
        stats.max_imag = stats.max_imag.max(approx.im.abs());
    }
    Ok(stats)
}
