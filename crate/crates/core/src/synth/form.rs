use num_complex::Complex64;

/// Acceptance threshold on the largest imaginary magnitude.
pub const DEFAULT_ACCEPT_R: f64 = 0.1;
/// Diagonal real parts must agree to this tolerance.
pub const DIAGONAL_TOL: f64 = 1e-9;
/// Largest tolerated `|sin ε|`; the off-diagonal real parts may then differ
/// from exact negatives of each other by at most twice this.
pub const SIN_DEVIATION_BOUND: f64 = 0.5;

/// Result of matching a 2×2 matrix against the approximate real-rotation form
///
/// ```text
/// [[ cos φ + a i,        sin(φ ± ε) + b i ],
///  [ -sin(φ ± ε) + c i,  cos φ + d i      ]]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RyMatch {
    /// Degrees in [-180, 180].
    pub angle_deg: f64,
    /// `max(|a|, |b|, |c|, |d|)`.
    pub r: f64,
    /// Degrees.
    pub epsilon_deg: f64,
}

/// Matches with the default acceptance threshold `r < 0.1`.
pub fn match_ry_form(m: &[[Complex64; 2]; 2]) -> Option<RyMatch> {
    match_ry_form_with(m, DEFAULT_ACCEPT_R)
}

/// The diagonal carries `cos φ` exactly, so `φ = ±acos(Re m00)` with the sign
/// of `Re m01 - Re m10`; `ε` is how far the off-diagonal sine arguments stray
/// from `φ`.
pub fn match_ry_form_with(m: &[[Complex64; 2]; 2], accept_r: f64) -> Option<RyMatch> {
    let (m00, m01, m10, m11) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    if (m00.re - m11.re).abs() >= DIAGONAL_TOL {
        return None;
    }
    if (m01.re + m10.re).abs() >= 2.0 * SIN_DEVIATION_BOUND {
        return None;
    }
    let r = [m00.im, m01.im, m10.im, m11.im]
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    if r >= accept_r {
        return None;
    }
    let cos = ((m00.re + m11.re) / 2.0).clamp(-1.0, 1.0);
    let magnitude = cos.acos();
    let angle = if m01.re - m10.re < 0.0 {
        -magnitude
    } else {
        magnitude
    };
    let nominal = angle.sin().clamp(-1.0, 1.0).asin();
    let epsilon = [m01.re, -m10.re]
        .iter()
        .map(|&s| (s.clamp(-1.0, 1.0).asin() - nominal).abs())
        .fold(0.0f64, f64::max);
    Some(RyMatch {
        angle_deg: angle.to_degrees(),
        r,
        epsilon_deg: epsilon.to_degrees(),
    })
}
