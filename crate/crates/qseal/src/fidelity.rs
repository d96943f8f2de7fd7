//! Average fidelity of the post-measurement state with the original encoded
//! state, computed two ways: exact simulation of the measurement channel,
//! and the closed forms in terms of the overlap parameter `a` and the
//! information gain `q`.

use crate::attack::{apply_channel, apply_on_public, Povm};
use crate::error::{Error, Result};
use crate::seal::SealScheme;

/// Fidelity outcome bundled with its complement, the detection bound.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReport {
    /// Average fidelity of the disturbed state with the original.
    pub f_bar: f64,
    /// 1 - f_bar: an upper bound on the verifier's detection probability.
    pub detection: f64,
    pub q: f64,
    pub q_max: f64,
    /// Overlap parameter, when a Helstrom decomposition was in play.
    pub a: Option<f64>,
}

impl FidelityReport {
    pub fn new(f_bar: f64, q: f64, q_max: f64, a: Option<f64>) -> Self {
        Self {
            f_bar,
            detection: 1.0 - f_bar,
            q,
            q_max,
            a,
        }
    }
}

/// Average fidelity by direct simulation:
/// (1/2) sum_i sum_j |<psi_i|(N_j ⊗ I)|psi_i>|^2.
pub fn average_fidelity(scheme: &SealScheme, povm: &Povm) -> Result<f64> {
    if povm.dim() != scheme.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "operators act on dimension {} but the public factor has dimension {}",
            povm.dim(),
            scheme.dim_b()
        )));
    }
    let mut total = 0.0;
    for bit in 0..2u8 {
        let psi = scheme.state(bit);
        for op in povm.operators() {
            let moved = apply_on_public(op, psi, scheme.dim_b(), scheme.dim_a());
            total += psi.inner(&moved).norm_sqr();
        }
    }
    Ok(0.5 * total)
}

/// Probability that the post-measurement state passes a projective check
/// onto the original encoded state for one bit value, evaluated through the
/// full channel.
pub fn verification_pass_probability(
    scheme: &SealScheme,
    povm: &Povm,
    bit: u8,
) -> Result<f64> {
    assert!(bit < 2, "bit must be 0 or 1");
    let psi = scheme.state(bit);
    let disturbed = apply_channel(povm, psi, scheme.dim_b(), scheme.dim_a())?;
    Ok(psi.inner(&disturbed.matvec(psi)).re)
}

fn check_q_pair(q: f64, q_max: f64) -> Result<()> {
    if !q_max.is_finite() || q_max < 0.0 || q_max > 1.0 {
        return Err(Error::ParamOutOfRange(format!(
            "q_max must lie in [0, 1], got {q_max}"
        )));
    }
    if !q.is_finite() || q < 0.0 || q > q_max {
        return Err(Error::ParamOutOfRange(format!(
            "q must lie in [0, q_max = {q_max}], got {q}"
        )));
    }
    Ok(())
}

/// Average fidelity of the two-projector reading strategy as a function of
/// the overlap parameter `a`:
///
/// `(1-2a)(1+q_max) + 2a^2 + q_max^2
///  - [2a^2 + (q_max-2a)(1+q_max)] sqrt(1 - q^2/q_max^2)`.
pub fn fbar_at_a(a: f64, q: f64, q_max: f64) -> Result<f64> {
    check_q_pair(q, q_max)?;
    if q_max == 0.0 {
        return Err(Error::QmaxZero);
    }
    // Allow roundoff slack when `a` comes from a measured expectation value.
    if !a.is_finite() || a < q_max - 1e-9 || a > 1.0 + 1e-9 {
        return Err(Error::ParamOutOfRange(format!(
            "overlap a must lie in [q_max = {q_max}, 1], got {a}"
        )));
    }
    let a = a.clamp(q_max, 1.0);
    let ratio = q / q_max;
    let radical = (1.0 - ratio * ratio).max(0.0).sqrt();
    let direct = (1.0 - 2.0 * a) * (1.0 + q_max) + 2.0 * a * a + q_max * q_max;
    let cross = 2.0 * a * a + (q_max - 2.0 * a) * (1.0 + q_max);
    Ok(direct - cross * radical)
}

/// The min-max average fidelity:
/// `(1 + q_max^2)/2 + (1 - q_max^2)/2 * sqrt(1 - q^2/q_max^2)` for q > 0,
/// and exactly 1 at q = 0 (reading nothing disturbs nothing).
///
/// The value is discontinuous at (0, 0); `q_max = 0` is rejected rather
/// than assigned a value there.
pub fn fbar_minmax(q: f64, q_max: f64) -> Result<f64> {
    check_q_pair(q, q_max)?;
    if q_max == 0.0 {
        return Err(Error::QmaxZero);
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    let ratio = q / q_max;
    let radical = (1.0 - ratio * ratio).max(0.0).sqrt();
    Ok((1.0 + q_max * q_max) / 2.0 + (1.0 - q_max * q_max) / 2.0 * radical)
}
