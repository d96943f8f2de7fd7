//! The reader's side: measurement strategies on the public factor.
//!
//! The optimal strategy comes from splitting `rho0 - rho1` into positive
//! parts with orthogonal support, then blending the two support projectors
//! with weights chosen to hit a prescribed information gain `q`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix, StateVector};
use crate::seal::SealScheme;

/// Eigenvalues of `rho0 - rho1` within this band count as kernel and are
/// assigned to the complementary projector.
pub const HELSTROM_KERNEL_TOL: f64 = 1e-10;

/// Completeness tolerance for accepting a measurement operator family.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;

/// Positive parts `q0, q1` of `rho0 - rho1` and the projectors onto their
/// supports (`pi1` also absorbs the kernel).
#[derive(Debug, Clone)]
pub struct HelstromDecomposition {
    pub q0: ComplexMatrix,
    pub q1: ComplexMatrix,
    pub pi0: ComplexMatrix,
    pub pi1: ComplexMatrix,
}

impl HelstromDecomposition {
    /// Trace distance recovered from the decomposition, (Tr q0 + Tr q1)/2.
    pub fn trace_distance(&self) -> f64 {
        0.5 * (self.q0.trace().re + self.q1.trace().re)
    }
}

/// A finite family of measurement operators, complete under
/// conjugate-transpose products.
#[derive(Debug, Clone)]
pub struct Povm {
    operators: Vec<ComplexMatrix>,
}

impl Povm {
    /// Accept a family whose completeness defect is within
    /// [`POVM_COMPLETENESS_TOL`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::ParamOutOfRange(
                "a measurement needs at least one operator".into(),
            ));
        }
        let dim = operators[0].rows();
        for op in &operators {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch(
                    "all measurement operators must be square with equal dimension".into(),
                ));
            }
        }
        let povm = Self { operators };
        let defect = povm.completeness_error();
        if defect > POVM_COMPLETENESS_TOL {
            return Err(Error::ParamOutOfRange(format!(
                "operators do not form a measurement: completeness defect {defect:.3e}"
            )));
        }
        Ok(povm)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// Max-entry deviation of sum N_j^dag N_j from the identity.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for op in &self.operators {
            sum = sum.add(&op.adjoint().matmul(op));
        }
        sum.max_diff(&ComplexMatrix::identity(dim))
    }
}

/// Split `rho0 - rho1` into positive operators with orthogonal support and
/// the projectors onto them. Fails with `QmaxZero` when the difference
/// vanishes (every eigenvalue within `tol`), i.e. the states carry no bit.
pub fn helstrom_decomposition(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    tol: f64,
) -> Result<HelstromDecomposition> {
    if (rho0.rows(), rho0.cols()) != (rho1.rows(), rho1.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            rho0.rows(),
            rho0.cols(),
            rho1.rows(),
            rho1.cols()
        )));
    }
    let n = rho0.rows();
    let diff = rho0.sub(rho1);
    let eig = hermitian_eigendecomposition(&diff)?;

    if eig.eigenvalues.iter().all(|l| l.abs() <= tol) {
        return Err(Error::QmaxZero);
    }

    let mut q0 = ComplexMatrix::zeros(n, n);
    let mut q1 = ComplexMatrix::zeros(n, n);
    let mut pi0 = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= tol {
            continue; // kernel: lands in pi1 via the complement below
        }
        let proj = eig.eigenvector(k).projector();
        if lambda > 0.0 {
            q0 = q0.add(&proj.scale(lambda));
            pi0 = pi0.add(&proj);
        } else {
            q1 = q1.add(&proj.scale(-lambda));
        }
    }
    let pi1 = ComplexMatrix::identity(n).sub(&pi0);

    Ok(HelstromDecomposition { q0, q1, pi0, pi1 })
}

/// The two-outcome reading measurement at information gain `q`:
/// `M_i = sqrt((1 + q/q_max)/2) Pi_i + sqrt((1 - q/q_max)/2) Pi_{1-i}`.
pub fn build_attack(d: &HelstromDecomposition, q: f64, q_max: f64) -> Result<Povm> {
    if !(q_max > 0.0) {
        return Err(Error::QmaxZero);
    }
    if !q.is_finite() || q < 0.0 || q > q_max {
        return Err(Error::QOutOfRange { q, q_max });
    }
    let hi = (0.5 * (1.0 + q / q_max)).sqrt();
    let lo = (0.5 * (1.0 - q / q_max)).sqrt();
    let m0 = d.pi0.scale(hi).add(&d.pi1.scale(lo));
    let m1 = d.pi0.scale(lo).add(&d.pi1.scale(hi));
    Povm::new(vec![m0, m1])
}

/// Outcome probabilities p_j = Tr(N_j^dag N_j rho).
pub fn outcome_distribution(povm: &Povm, rho: &ComplexMatrix) -> Result<Vec<f64>> {
    if rho.rows() != povm.dim() || rho.cols() != povm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{} but operators act on dimension {}",
            rho.rows(),
            rho.cols(),
            povm.dim()
        )));
    }
    let mut probs = Vec::with_capacity(povm.outcomes());
    for op in povm.operators() {
        let p = op.adjoint().matmul(op).matmul(rho).trace().re;
        if p < -1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "outcome probability {p:.3e} below zero"
            )));
        }
        probs.push(p.max(0.0));
    }
    Ok(probs)
}

/// Classical L1 distance between the outcome distributions of the two
/// states: (1/2) sum_j |p_j(rho0) - p_j(rho1)|.
pub fn classical_l1(povm: &Povm, rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<f64> {
    let p0 = outcome_distribution(povm, rho0)?;
    let p1 = outcome_distribution(povm, rho1)?;
    Ok(0.5 * p0.iter().zip(&p1).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Apply a public-factor operator to a bipartite state: (op ⊗ I)|psi>.
pub(crate) fn apply_on_public(
    op: &ComplexMatrix,
    psi: &StateVector,
    dim_b: usize,
    dim_a: usize,
) -> StateVector {
    debug_assert_eq!(psi.dim(), dim_b * dim_a);
    debug_assert_eq!(op.rows(), dim_b);
    let amps = psi.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
    for b in 0..dim_b {
        for bp in 0..dim_b {
            let w = op.get(b, bp);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for a in 0..dim_a {
                out[b * dim_a + a] += w * amps[bp * dim_a + a];
            }
        }
    }
    StateVector::new(out)
}

/// Post-measurement state of the whole pair when the reader measures the
/// public factor: sum_j (N_j ⊗ I)|psi><psi|(N_j ⊗ I)^dag.
pub fn apply_channel(
    povm: &Povm,
    psi: &StateVector,
    dim_b: usize,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    if psi.dim() != dim_b * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} != dim_b {} * dim_a {}",
            psi.dim(),
            dim_b,
            dim_a
        )));
    }
    if povm.dim() != dim_b {
        return Err(Error::DimensionMismatch(format!(
            "operators act on dimension {} but the public factor has dimension {}",
            povm.dim(),
            dim_b
        )));
    }
    let dim = psi.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for op in povm.operators() {
        let branch = apply_on_public(op, psi, dim_b, dim_a);
        out = out.add(&branch.projector());
    }
    Ok(out)
}

/// Probability of correctly reading the sealed bit when outcome `i` is
/// interpreted as bit value `i`: (1/2) sum_i <psi_i|M_i^dag M_i ⊗ I|psi_i>.
pub fn guess_probability(scheme: &SealScheme, povm: &Povm) -> Result<f64> {
    if povm.outcomes() != 2 {
        return Err(Error::WrongOutcomeCount(povm.outcomes()));
    }
    if povm.dim() != scheme.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "operators act on dimension {} but the public factor has dimension {}",
            povm.dim(),
            scheme.dim_b()
        )));
    }
    let mut total = 0.0;
    for bit in 0..2u8 {
        let branch = apply_on_public(
            &povm.operators()[bit as usize],
            scheme.state(bit),
            scheme.dim_b(),
            scheme.dim_a(),
        );
        total += branch.norm().powi(2);
    }
    Ok(0.5 * total)
}

/// The overlap parameter `a = <psi_0|Pi_0 ⊗ I|psi_0>` and the three related
/// expectation values, each computed directly.
#[derive(Debug, Clone, Copy)]
pub struct OverlapReport {
    /// `<psi_0|Pi_0 ⊗ I|psi_0>`.
    pub a: f64,
    /// `<psi_0|Pi_1 ⊗ I|psi_0>`; equals `1 - a`.
    pub one_minus_a: f64,
    /// `<psi_1|Pi_0 ⊗ I|psi_1>`; equals `a - q_max`.
    pub a_minus_qmax: f64,
    /// `<psi_1|Pi_1 ⊗ I|psi_1>`; equals `1 - a + q_max`.
    pub complement: f64,
}

/// Measure the four projector expectation values on the encoded states.
pub fn overlap_report(
    scheme: &SealScheme,
    d: &HelstromDecomposition,
) -> Result<OverlapReport> {
    if d.pi0.rows() != scheme.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "projector dimension {} != public factor dimension {}",
            d.pi0.rows(),
            scheme.dim_b()
        )));
    }
    let expect = |proj: &ComplexMatrix, bit: u8| -> f64 {
        let psi = scheme.state(bit);
        let moved = apply_on_public(proj, psi, scheme.dim_b(), scheme.dim_a());
        psi.inner(&moved).re
    };
    Ok(OverlapReport {
        a: expect(&d.pi0, 0),
        one_minus_a: expect(&d.pi1, 0),
        a_minus_qmax: expect(&d.pi0, 1),
        complement: expect(&d.pi1, 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seal::{analyze_scheme, make_product_scheme, make_stringent_scheme};

    fn stringent_parts(q_max: f64) -> (SealScheme, ComplexMatrix, ComplexMatrix, HelstromDecomposition) {
        let s = make_stringent_scheme(q_max).unwrap();
        let analysis = analyze_scheme(&s).unwrap();
        let d = helstrom_decomposition(&analysis.rho0, &analysis.rho1, HELSTROM_KERNEL_TOL).unwrap();
        (s, analysis.rho0, analysis.rho1, d)
    }

    #[test]
    fn helstrom_on_diagonal_pair() {
        let r0 = ComplexMatrix::diag(&[0.8, 0.2]);
        let r1 = ComplexMatrix::diag(&[0.2, 0.8]);
        let d = helstrom_decomposition(&r0, &r1, HELSTROM_KERNEL_TOL).unwrap();
        assert!(d.pi0.max_diff(&ComplexMatrix::diag(&[1.0, 0.0])) <= 1e-12);
        assert!(d.pi1.max_diff(&ComplexMatrix::diag(&[0.0, 1.0])) <= 1e-12);
        assert!((d.trace_distance() - 0.6).abs() <= 1e-12);
    }

    #[test]
    fn helstrom_equal_states_fails() {
        let rho = ComplexMatrix::diag(&[0.5, 0.5]);
        assert!(matches!(
            helstrom_decomposition(&rho, &rho, HELSTROM_KERNEL_TOL),
            Err(Error::QmaxZero)
        ));
    }

    #[test]
    fn helstrom_kernel_joins_complement() {
        let r0 = ComplexMatrix::diag(&[0.5, 0.3, 0.2]);
        let r1 = ComplexMatrix::diag(&[0.0, 0.3, 0.7]);
        let d = helstrom_decomposition(&r0, &r1, HELSTROM_KERNEL_TOL).unwrap();
        assert!(d.pi0.max_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0])) <= 1e-12);
        assert!(d.pi1.max_diff(&ComplexMatrix::diag(&[0.0, 1.0, 1.0])) <= 1e-12);
        assert!((d.pi0.trace().re - 1.0).abs() <= 1e-12);
        assert!((d.pi1.trace().re - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn helstrom_invariants_hold() {
        use crate::linalg::tests_support::random_density_pair;
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for dim in [2usize, 3, 4] {
            for _ in 0..10 {
                let (r0, r1) = random_density_pair(dim, &mut rng);
                let d = match helstrom_decomposition(&r0, &r1, HELSTROM_KERNEL_TOL) {
                    Ok(d) => d,
                    Err(Error::QmaxZero) => continue,
                    Err(e) => panic!("unexpected error: {e}"),
                };
                let diff = r0.sub(&r1);
                assert!(diff.max_diff(&d.q0.sub(&d.q1)) <= 1e-10);
                assert!(d.q0.matmul(&d.q1).max_abs() <= 1e-10);
                assert!(d.pi0.matmul(&d.q0).max_diff(&d.q0) <= 1e-10);
                assert!(d.pi0.matmul(&d.q1).max_abs() <= 1e-10);
                let sum = d.pi0.add(&d.pi1);
                assert!(sum.max_diff(&ComplexMatrix::identity(dim)) <= 1e-10);
                assert!(d.pi0.matmul(&d.pi0).max_diff(&d.pi0) <= 1e-10);
                assert!(d.pi0.adjoint().max_diff(&d.pi0) <= 1e-10);
            }
        }
    }

    #[test]
    fn attack_at_full_gain_is_helstrom() {
        let (_, _, _, d) = stringent_parts(0.6);
        let povm = build_attack(&d, 0.6, 0.6).unwrap();
        assert!(povm.operators()[0].max_diff(&d.pi0) <= 1e-12);
        assert!(povm.operators()[1].max_diff(&d.pi1) <= 1e-12);
    }

    #[test]
    fn attack_at_zero_gain_is_balanced_identity() {
        let (_, _, _, d) = stringent_parts(0.6);
        let povm = build_attack(&d, 0.0, 0.6).unwrap();
        let half = ComplexMatrix::identity(2).scale(1.0 / 2.0_f64.sqrt());
        assert!(povm.operators()[0].max_diff(&half) <= 1e-12);
        assert!(povm.operators()[1].max_diff(&half) <= 1e-12);
    }

    #[test]
    fn attack_coefficients_at_half_gain() {
        let (_, _, _, d) = stringent_parts(0.6);
        let povm = build_attack(&d, 0.3, 0.6).unwrap();
        let expected = d.pi0.scale(0.75_f64.sqrt()).add(&d.pi1.scale(0.5));
        assert!(povm.operators()[0].max_diff(&expected) <= 1e-12);
    }

    #[test]
    fn attack_completeness_is_tight() {
        let (_, _, _, d) = stringent_parts(0.6);
        for q in [0.0, 0.15, 0.3, 0.45, 0.6] {
            let povm = build_attack(&d, q, 0.6).unwrap();
            assert!(povm.completeness_error() <= 1e-12);
        }
    }

    #[test]
    fn attack_rejects_q_out_of_range() {
        let (_, _, _, d) = stringent_parts(0.6);
        assert!(matches!(
            build_attack(&d, -0.1, 0.6),
            Err(Error::QOutOfRange { .. })
        ));
        assert!(matches!(
            build_attack(&d, 0.7, 0.6),
            Err(Error::QOutOfRange { .. })
        ));
    }

    #[test]
    fn outcome_distribution_identity() {
        let povm = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let rho = ComplexMatrix::diag(&[0.8, 0.2]);
        let p = outcome_distribution(&povm, &rho).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn outcome_distribution_helstrom_and_attack() {
        let (_, rho0, _, d) = stringent_parts(0.6);
        let helstrom = build_attack(&d, 0.6, 0.6).unwrap();
        let p = outcome_distribution(&helstrom, &rho0).unwrap();
        assert!((p[0] - 0.8).abs() <= 1e-12);
        assert!((p[1] - 0.2).abs() <= 1e-12);

        let attack = build_attack(&d, 0.3, 0.6).unwrap();
        let p = outcome_distribution(&attack, &rho0).unwrap();
        assert!((p[0] - 0.65).abs() <= 1e-12);
        assert!((p[1] - 0.35).abs() <= 1e-12);
    }

    #[test]
    fn classical_l1_matches_construction() {
        let (_, rho0, rho1, d) = stringent_parts(0.6);

        let identity = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(classical_l1(&identity, &rho0, &rho1).unwrap().abs() <= 1e-12);

        let helstrom = build_attack(&d, 0.6, 0.6).unwrap();
        assert!((classical_l1(&helstrom, &rho0, &rho1).unwrap() - 0.6).abs() <= 1e-12);

        for t in 0..=4 {
            let q = 0.6 * t as f64 / 4.0;
            let attack = build_attack(&d, q, 0.6).unwrap();
            let got = classical_l1(&attack, &rho0, &rho1).unwrap();
            assert!(
                (got - q).abs() <= 1e-9,
                "attack distance {got} != target {q}"
            );
        }
    }

    #[test]
    fn channel_with_identity_leaves_state() {
        let s = make_stringent_scheme(0.6).unwrap();
        let identity = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let out = apply_channel(&identity, s.state(0), 2, 3).unwrap();
        assert!(out.max_diff(&s.state(0).projector()) <= 1e-12);
    }

    #[test]
    fn channel_with_zero_gain_attack_leaves_state() {
        let (s, _, _, d) = stringent_parts(0.6);
        let povm = build_attack(&d, 0.0, 0.6).unwrap();
        let out = apply_channel(&povm, s.state(0), 2, 3).unwrap();
        assert!(out.max_diff(&s.state(0).projector()) <= 1e-12);
        assert!((out.trace().re - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn channel_at_full_gain_disturbs_to_known_fidelity() {
        let (s, _, _, d) = stringent_parts(0.6);
        let povm = build_attack(&d, 0.6, 0.6).unwrap();
        let out = apply_channel(&povm, s.state(0), 2, 3).unwrap();
        let psi = s.state(0);
        let fidelity = psi.inner(&out.matvec(psi)).re;
        assert!((fidelity - 0.68).abs() <= 1e-12);
        assert!((out.trace().re - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn guess_probability_tracks_gain() {
        let (s, _, _, d) = stringent_parts(0.6);
        for (q, expected) in [(0.0, 0.5), (0.3, 0.65), (0.6, 0.8)] {
            let povm = build_attack(&d, q, 0.6).unwrap();
            let pr = guess_probability(&s, &povm).unwrap();
            assert!(
                (pr - expected).abs() <= 1e-10,
                "guess probability {pr} != {expected} at q = {q}"
            );
        }
    }

    #[test]
    fn guess_probability_needs_two_outcomes() {
        let s = make_stringent_scheme(0.6).unwrap();
        let identity = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(matches!(
            guess_probability(&s, &identity),
            Err(Error::WrongOutcomeCount(1))
        ));
    }

    #[test]
    fn guess_probability_formula_on_both_schemes() {
        for q_max in [0.25, 0.6, 1.0] {
            for s in [
                make_stringent_scheme(q_max).unwrap(),
                make_product_scheme(q_max).unwrap(),
            ] {
                let analysis = analyze_scheme(&s).unwrap();
                let d =
                    helstrom_decomposition(&analysis.rho0, &analysis.rho1, HELSTROM_KERNEL_TOL)
                        .unwrap();
                for t in 0..=5 {
                    let q = q_max * t as f64 / 5.0;
                    let povm = build_attack(&d, q, q_max).unwrap();
                    let pr = guess_probability(&s, &povm).unwrap();
                    assert!((pr - (1.0 + q) / 2.0).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn overlap_on_product_scheme() {
        let s = make_product_scheme(0.6).unwrap();
        let analysis = analyze_scheme(&s).unwrap();
        let d = helstrom_decomposition(&analysis.rho0, &analysis.rho1, HELSTROM_KERNEL_TOL)
            .unwrap();
        let report = overlap_report(&s, &d).unwrap();
        assert!((report.a - 0.8).abs() <= 1e-10);
        assert!((report.a - (1.0 + 0.6) / 2.0).abs() <= 1e-10);
    }

    #[test]
    fn overlap_on_stringent_scheme() {
        let (s, _, _, d) = stringent_parts(0.6);
        let report = overlap_report(&s, &d).unwrap();
        assert!((report.a - 0.8).abs() <= 1e-10);
        assert!((report.one_minus_a - 0.2).abs() <= 1e-10);
        assert!((report.a_minus_qmax - 0.2).abs() <= 1e-10);
        assert!((report.complement - 0.8).abs() <= 1e-10);
    }

    #[test]
    fn overlap_at_perfect_seal() {
        let (s, _, _, d) = stringent_parts(1.0);
        let report = overlap_report(&s, &d).unwrap();
        assert!((report.a - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn overlap_identities_for_any_scheme() {
        use crate::linalg::tests_support::random_scheme;
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        for _ in 0..20 {
            let s = random_scheme(&mut rng);
            let analysis = analyze_scheme(&s).unwrap();
            let d = match helstrom_decomposition(
                &analysis.rho0,
                &analysis.rho1,
                HELSTROM_KERNEL_TOL,
            ) {
                Ok(d) => d,
                Err(Error::QmaxZero) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            let q_max = analysis.q_max;
            let r = overlap_report(&s, &d).unwrap();
            assert!(r.a >= q_max - 1e-9 && r.a <= 1.0 + 1e-9);
            assert!((r.one_minus_a - (1.0 - r.a)).abs() <= 1e-9);
            assert!((r.a_minus_qmax - (r.a - q_max)).abs() <= 1e-9);
            assert!((r.complement - (1.0 - r.a + q_max)).abs() <= 1e-9);
        }
    }
}
