//! Bit sealing schemes: a classical bit encoded as one of two bipartite pure
//! states, with the public factor B readable by anyone and the private
//! factor A reserved for verifiers.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace_over_a, trace_distance, ComplexMatrix, StateVector};

/// Norm deviation tolerated when accepting externally supplied states.
pub const NORM_TOL: f64 = 1e-8;

/// A bit sealing scheme: the two encoded states over B (x) A.
#[derive(Debug, Clone, PartialEq)]
pub struct SealScheme {
    dim_b: usize,
    dim_a: usize,
    psi0: StateVector,
    psi1: StateVector,
}

/// Reduced states visible to the public, and their distinguishability.
#[derive(Debug, Clone)]
pub struct SchemeAnalysis {
    pub rho0: ComplexMatrix,
    pub rho1: ComplexMatrix,
    pub q_max: f64,
}

impl SealScheme {
    /// Wrap two encoded states; states must be normalized within [`NORM_TOL`].
    pub fn new(dim_b: usize, dim_a: usize, psi0: StateVector, psi1: StateVector) -> Result<Self> {
        if dim_b < 2 {
            return Err(Error::ParamOutOfRange(format!(
                "public factor must have dimension >= 2 to carry a bit, got {dim_b}"
            )));
        }
        if dim_a < 1 {
            return Err(Error::ParamOutOfRange(
                "private factor dimension must be >= 1".into(),
            ));
        }
        let dim = dim_b * dim_a;
        if psi0.dim() != dim || psi1.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "encoded states must have dimension {} = {} x {}, got {} and {}",
                dim,
                dim_b,
                dim_a,
                psi0.dim(),
                psi1.dim()
            )));
        }
        for psi in [&psi0, &psi1] {
            let n = psi.norm();
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::NormalizationError(n));
            }
        }
        Ok(Self {
            dim_b,
            dim_a,
            psi0,
            psi1,
        })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    /// Encoded state for the given bit value.
    pub fn state(&self, bit: u8) -> &StateVector {
        match bit {
            0 => &self.psi0,
            1 => &self.psi1,
            _ => panic!("bit must be 0 or 1"),
        }
    }
}

fn check_q_max(q_max: f64) -> Result<()> {
    if !q_max.is_finite() || q_max <= 0.0 || q_max > 1.0 {
        return Err(Error::QmaxOutOfRange(q_max));
    }
    Ok(())
}

/// The scheme whose achievable fidelity matches the min-max closed form:
/// a qubit public factor and a qutrit private factor, with weight
/// `sqrt(1 - q_max)/2` on the four correlated product terms and
/// `sqrt(q_max)` on the distinguishing term.
pub fn make_stringent_scheme(q_max: f64) -> Result<SealScheme> {
    check_q_max(q_max)?;
    let w = (1.0 - q_max).sqrt() / 2.0;
    let r = q_max.sqrt();

    // Index order is B-major, A-minor: entry b * 3 + a.
    let psi0 = StateVector::from_real(&[w, w, r, w, -w, 0.0]);
    let psi1 = StateVector::from_real(&[w, w, 0.0, -w, w, r]);
    SealScheme::new(2, 3, psi0, psi1)
}

/// The ancilla-free qubit scheme: amplitudes sqrt([1 +/- q_max]/2) on the
/// two basis states, swapped between the two bit values.
pub fn make_product_scheme(q_max: f64) -> Result<SealScheme> {
    check_q_max(q_max)?;
    let hi = ((1.0 + q_max) / 2.0).sqrt();
    let lo = ((1.0 - q_max) / 2.0).sqrt();
    let psi0 = StateVector::from_real(&[hi, lo]);
    let psi1 = StateVector::from_real(&[lo, hi]);
    SealScheme::new(2, 1, psi0, psi1)
}

/// Reduced states and their trace distance. Degenerate schemes
/// (identical reductions) are reported with `q_max = 0`, not rejected.
pub fn analyze_scheme(scheme: &SealScheme) -> Result<SchemeAnalysis> {
    let rho0 = partial_trace_over_a(scheme.state(0), scheme.dim_b, scheme.dim_a)?;
    let rho1 = partial_trace_over_a(scheme.state(1), scheme.dim_b, scheme.dim_a)?;
    let q_max = trace_distance(&rho0, &rho1)?;
    Ok(SchemeAnalysis { rho0, rho1, q_max })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    dim_b: usize,
    dim_a: usize,
    psi0: Vec<[f64; 2]>,
    psi1: Vec<[f64; 2]>,
}

fn amplitudes_to_pairs(state: &StateVector) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn pairs_to_state(pairs: &[[f64; 2]]) -> StateVector {
    StateVector::new(
        pairs
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

/// Write a scheme file: key-value text with `dim_b`, `dim_a`, and the two
/// amplitude arrays as `[re, im]` decimal pairs. Decimals are shortest
/// round-trip representations, so `load_scheme(save_scheme(s))` reproduces
/// every amplitude bit-exactly.
pub fn save_scheme(scheme: &SealScheme, path: &Path) -> Result<()> {
    let file = SchemeFile {
        dim_b: scheme.dim_b,
        dim_a: scheme.dim_a,
        psi0: amplitudes_to_pairs(scheme.state(0)),
        psi1: amplitudes_to_pairs(scheme.state(1)),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Read a scheme file written by [`save_scheme`] (or by hand). Unknown
/// fields, wrong array lengths, and malformed values are parse errors;
/// states off unit norm by more than [`NORM_TOL`] are normalization errors.
pub fn load_scheme(path: &Path) -> Result<SealScheme> {
    let text = fs::read_to_string(path)?;
    let file: SchemeFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.dim_b < 2 {
        return Err(Error::Parse(format!(
            "field dim_b: must be >= 2, got {}",
            file.dim_b
        )));
    }
    if file.dim_a < 1 {
        return Err(Error::Parse("field dim_a: must be >= 1".into()));
    }
    let dim = file.dim_b * file.dim_a;
    for (name, arr) in [("psi0", &file.psi0), ("psi1", &file.psi1)] {
        if arr.len() != dim {
            return Err(Error::Parse(format!(
                "field {name}: expected {dim} amplitude pairs (dim_b x dim_a), got {}",
                arr.len()
            )));
        }
        for (k, &[re, im]) in arr.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!(
                    "field {name}[{k}]: non-finite amplitude"
                )));
            }
        }
    }
    SealScheme::new(
        file.dim_b,
        file.dim_a,
        pairs_to_state(&file.psi0),
        pairs_to_state(&file.psi1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn stringent_scheme_at_unit_qmax_is_orthogonal() {
        let s = make_stringent_scheme(1.0).unwrap();
        let expected0 = StateVector::basis_state(2, 0).tensor(&StateVector::basis_state(3, 2));
        let expected1 = StateVector::basis_state(2, 1).tensor(&StateVector::basis_state(3, 2));
        assert!((s.state(0).inner(&expected0).re - 1.0).abs() <= 1e-15);
        assert!((s.state(1).inner(&expected1).re - 1.0).abs() <= 1e-15);
        assert!(s.state(0).inner(s.state(1)).norm() <= 1e-15);
    }

    #[test]
    fn stringent_scheme_reduced_states() {
        let s = make_stringent_scheme(0.6).unwrap();
        let analysis = analyze_scheme(&s).unwrap();
        assert!(analysis
            .rho0
            .max_diff(&ComplexMatrix::diag(&[0.8, 0.2]))
            <= 1e-12);
        assert!(analysis
            .rho1
            .max_diff(&ComplexMatrix::diag(&[0.2, 0.8]))
            <= 1e-12);
        assert!((analysis.q_max - 0.6).abs() <= 1e-10);
    }

    #[test]
    fn qmax_zero_is_rejected_at_construction() {
        assert!(matches!(
            make_stringent_scheme(0.0),
            Err(Error::QmaxOutOfRange(_))
        ));
        assert!(matches!(
            make_product_scheme(0.0),
            Err(Error::QmaxOutOfRange(_))
        ));
        assert!(matches!(
            make_stringent_scheme(1.5),
            Err(Error::QmaxOutOfRange(_))
        ));
        assert!(matches!(
            make_product_scheme(f64::NAN),
            Err(Error::QmaxOutOfRange(_))
        ));
    }

    #[test]
    fn product_scheme_amplitudes() {
        let s = make_product_scheme(0.6).unwrap();
        let a0 = s.state(0).amplitudes();
        assert!((a0[0].re - 0.8_f64.sqrt()).abs() <= 1e-15);
        assert!((a0[1].re - 0.2_f64.sqrt()).abs() <= 1e-15);
        let a1 = s.state(1).amplitudes();
        assert!((a1[0].re - 0.2_f64.sqrt()).abs() <= 1e-15);
        assert!((a1[1].re - 0.8_f64.sqrt()).abs() <= 1e-15);

        let s = make_product_scheme(1.0).unwrap();
        assert!((s.state(0).amplitudes()[0].re - 1.0).abs() <= 1e-15);
        assert!((s.state(1).amplitudes()[1].re - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn product_scheme_analysis_recovers_qmax() {
        let analysis = analyze_scheme(&make_product_scheme(0.6).unwrap()).unwrap();
        assert!((analysis.q_max - 0.6).abs() <= 1e-10);
    }

    #[test]
    fn builtin_schemes_recover_qmax_across_range() {
        for t in 1..=20 {
            let q_max = t as f64 / 20.0;
            for s in [
                make_stringent_scheme(q_max).unwrap(),
                make_product_scheme(q_max).unwrap(),
            ] {
                let analysis = analyze_scheme(&s).unwrap();
                assert!(
                    (analysis.q_max - q_max).abs() <= 1e-10,
                    "q_max {} recovered as {}",
                    q_max,
                    analysis.q_max
                );
            }
        }
    }

    #[test]
    fn builtin_schemes_match_known_reductions() {
        for t in [0.1, 0.35, 0.6, 0.9, 1.0] {
            // The stringent scheme reduces to the diagonal mixture; the
            // product scheme reduces to the pure-state projector with the
            // same diagonal. Both share trace distance t and the same
            // support projectors of rho0 - rho1.
            let a = analyze_scheme(&make_stringent_scheme(t).unwrap()).unwrap();
            let b = analyze_scheme(&make_product_scheme(t).unwrap()).unwrap();
            let hi = (1.0 + t) / 2.0;
            let lo = (1.0 - t) / 2.0;
            assert!(a.rho0.max_diff(&ComplexMatrix::diag(&[hi, lo])) <= 1e-12);
            assert!(a.rho1.max_diff(&ComplexMatrix::diag(&[lo, hi])) <= 1e-12);
            let off = (hi * lo).sqrt();
            let pure0 = ComplexMatrix::from_real(2, 2, &[hi, off, off, lo]);
            assert!(b.rho0.max_diff(&pure0) <= 1e-12);
            assert!((a.q_max - b.q_max).abs() <= 1e-12);
            // The difference rho0 - rho1 is diag(t, -t) for both schemes.
            let expected_diff = ComplexMatrix::diag(&[t, -t]);
            assert!(a.rho0.sub(&a.rho1).max_diff(&expected_diff) <= 1e-12);
            assert!(b.rho0.sub(&b.rho1).max_diff(&expected_diff) <= 1e-12);
        }
    }

    #[test]
    fn identical_states_analyze_to_qmax_zero() {
        let psi = StateVector::from_real(&[0.6, 0.8]);
        let s = SealScheme::new(2, 1, psi.clone(), psi).unwrap();
        let analysis = analyze_scheme(&s).unwrap();
        assert!(analysis.q_max.abs() <= 1e-12);
    }

    #[test]
    fn orthogonal_purifications_of_equal_reductions() {
        // Two orthogonal two-qubit states with the same reduction I/2:
        // (|00> + |11>)/sqrt(2) and (|01> + |10>)/sqrt(2).
        let h = 1.0 / 2.0_f64.sqrt();
        let psi0 = StateVector::from_real(&[h, 0.0, 0.0, h]);
        let psi1 = StateVector::from_real(&[0.0, h, h, 0.0]);
        let s = SealScheme::new(2, 2, psi0, psi1).unwrap();
        let analysis = analyze_scheme(&s).unwrap();
        assert!(analysis.q_max.abs() <= 1e-12);
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.scheme");
        for q_max in [0.037, 0.6, 1.0] {
            let s = make_stringent_scheme(q_max).unwrap();
            save_scheme(&s, &path).unwrap();
            let loaded = load_scheme(&path).unwrap();
            assert_eq!(s, loaded, "round trip must be amplitude-exact");
        }
    }

    #[test]
    fn load_rejects_unknown_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.scheme");
        std::fs::write(
            &path,
            r#"{"dim_b": 2, "dim_a": 1, "psi0": [[1.0, 0.0], [0.0, 0.0]], "psi1": [[0.0, 0.0], [1.0, 0.0]], "extra": 1}"#,
        )
        .unwrap();
        assert!(matches!(load_scheme(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn load_rejects_malformed_field_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.scheme");
        std::fs::write(
            &path,
            r#"{"dimb": 2, "dim_a": 1, "psi0": [[1.0, 0.0], [0.0, 0.0]], "psi1": [[0.0, 0.0], [1.0, 0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(load_scheme(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn load_rejects_short_amplitude_array() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.scheme");
        std::fs::write(
            &path,
            r#"{"dim_b": 2, "dim_a": 2, "psi0": [[1.0, 0.0], [0.0, 0.0]], "psi1": [[0.0, 0.0], [1.0, 0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(load_scheme(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn load_rejects_denormalized_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.scheme");
        std::fs::write(
            &path,
            r#"{"dim_b": 2, "dim_a": 1, "psi0": [[0.9, 0.0], [0.0, 0.0]], "psi1": [[0.0, 0.0], [1.0, 0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_scheme(&path),
            Err(Error::NormalizationError(_))
        ));
    }

    #[test]
    fn load_missing_file_is_io_error() {
        assert!(matches!(
            load_scheme(Path::new("/nonexistent/nope.scheme")),
            Err(Error::Io(_))
        ));
    }
}
