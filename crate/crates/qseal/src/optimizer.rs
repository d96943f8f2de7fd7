//! Brute-force maximization of average fidelity over general K-outcome
//! measurements at a fixed information gain, used to verify the closed-form
//! bound numerically.
//!
//! Measurements on a qubit public factor are parameterized by the raw
//! complex entries of each 2x2 operator. Completeness is enforced exactly
//! by retraction (right-multiplying every operator by `S^{-1/2}` where
//! `S = sum N_j^dag N_j`); the information-gain equality is enforced by a
//! quadratic penalty whose weight doubles across rounds, followed by a hard
//! feasibility filter on the exactly re-evaluated gain.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attack::{
    build_attack, classical_l1, helstrom_decomposition, Povm, HELSTROM_KERNEL_TOL,
};
use crate::error::{Error, Result};
use crate::fidelity::{average_fidelity, fbar_minmax};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix};
use crate::seal::{analyze_scheme, SealScheme};

/// Real parameters per 2x2 operator: re/im of each of the four entries.
pub const PARAMS_PER_OPERATOR: usize = 8;

/// Smallest eigenvalue of `S` accepted by the retraction.
pub const RETRACTION_MIN_EIG: f64 = 1e-12;

/// Feasibility filter on |achieved_q - q_target| for reported results.
pub const Q_FEASIBILITY_TOL: f64 = 1e-6;

/// Slack allowed over the closed-form bound before declaring a violation.
pub const BOUND_TOL: f64 = 1e-6;

const PENALTY_INITIAL_WEIGHT: f64 = 10.0;
// Weight doubling continues until the quadratic penalty pins the gain to
// the 1e-6 filter even where the bound curve has infinite slope (q at the
// top of its range); that takes weights of order 1e9.
const PENALTY_ROUNDS: usize = 28;
const NM_MAX_ITER: usize = 2000;
const NM_SPREAD_TOL: f64 = 1e-10;

/// Raw real-vector encoding of a K-outcome qubit measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmParameterization {
    k: usize,
    raw: Vec<f64>,
}

impl PovmParameterization {
    pub fn new(k: usize, raw: Vec<f64>) -> Self {
        assert_eq!(
            raw.len(),
            k * PARAMS_PER_OPERATOR,
            "expected {} raw parameters for {} operators",
            k * PARAMS_PER_OPERATOR,
            k
        );
        Self { k, raw }
    }

    pub fn outcomes(&self) -> usize {
        self.k
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    fn operators(&self) -> Vec<ComplexMatrix> {
        decode_raw(&self.raw)
            .into_iter()
            .map(|m| {
                ComplexMatrix::new(2, 2, vec![m[0], m[1], m[2], m[3]])
            })
            .collect()
    }
}

/// Draw raw operator entries uniformly from [-1, 1].
pub fn sample_parameterization<R: Rng>(k: usize, rng: &mut R) -> PovmParameterization {
    let raw = (0..k * PARAMS_PER_OPERATOR)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    PovmParameterization::new(k, raw)
}

/// Renormalize a raw operator family into a complete measurement by
/// right-multiplying each operator with `S^{-1/2}`. Idempotent on families
/// that are already complete.
pub fn retract_to_povm(p: &PovmParameterization) -> Result<Povm> {
    let ops = p.operators();
    let mut gram = ComplexMatrix::zeros(2, 2);
    for op in &ops {
        gram = gram.add(&op.adjoint().matmul(op));
    }
    let eig = hermitian_eigendecomposition(&gram)?;
    let min_eig = eig.eigenvalues[0];
    if min_eig <= RETRACTION_MIN_EIG {
        return Err(Error::SingularRetraction(min_eig));
    }
    let mut inv_sqrt = ComplexMatrix::zeros(2, 2);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        let column = eig.eigenvector(idx);
        inv_sqrt = inv_sqrt.add(&column.projector().scale(1.0 / lambda.sqrt()));
    }
    Povm::new(ops.iter().map(|op| op.matmul(&inv_sqrt)).collect())
}

/// Completeness sums over the operator entries: returns
/// `(sum |top-left|^2 + |bottom-right|^2, sum of twice the real part of
/// top-left * conj(bottom-right))` — the two quantities the analytic bound
/// constrains.
pub fn measurement_inequalities(povm: &Povm) -> Result<(f64, f64)> {
    if povm.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "inequality checks apply to qubit measurements".into(),
        ));
    }
    let mut diag_sum = 0.0;
    let mut cross_sum = 0.0;
    for op in povm.operators() {
        let alpha = op.get(0, 0);
        let delta = op.get(1, 1);
        diag_sum += alpha.norm_sqr() + delta.norm_sqr();
        cross_sum += 2.0 * (alpha * delta.conj()).re;
    }
    Ok((diag_sum, cross_sum))
}

/// Outcome of one constrained maximization.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Largest exactly re-evaluated average fidelity among feasible points.
    pub best_fbar: f64,
    pub best_povm: Povm,
    /// Information gain of the winner, exactly re-evaluated.
    pub achieved_q: f64,
    pub restarts_used: usize,
    /// best_fbar minus the closed-form min-max fidelity at the target gain.
    pub gap_to_bound: f64,
}

/// One feasible point retained for inequality auditing.
#[derive(Debug, Clone)]
pub struct FeasibleSample {
    pub fbar: f64,
    pub q: f64,
    pub povm: Povm,
    pub restart: usize,
}

/// [`OptimizationResult`] plus the audit trail `verify_bound` consumes.
#[derive(Debug, Clone)]
pub struct OptimizationDiagnostics {
    pub result: OptimizationResult,
    /// Every feasible point that survived the gain filter, one or more per restart.
    pub feasible_samples: Vec<FeasibleSample>,
    /// Best feasible fidelity found by the warm-started restart.
    pub warm_start_fbar: Option<f64>,
}

// ---------------------------------------------------------------------------
// Fast objective path: fixed-size 2x2 complex arithmetic, no allocation.
// ---------------------------------------------------------------------------

type M2 = [Complex64; 4]; // row-major [m00, m01, m10, m11]

const M2_ZERO: M2 = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
];

#[inline]
fn m2_mul(x: &M2, y: &M2) -> M2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[inline]
fn m2_adjoint(x: &M2) -> M2 {
    [x[0].conj(), x[2].conj(), x[1].conj(), x[3].conj()]
}

#[inline]
fn m2_trace_mul(x: &M2, y: &M2) -> Complex64 {
    x[0] * y[0] + x[1] * y[2] + x[2] * y[1] + x[3] * y[3]
}

fn decode_raw(raw: &[f64]) -> Vec<M2> {
    raw.chunks_exact(PARAMS_PER_OPERATOR)
        .map(|c| {
            [
                Complex64::new(c[0], c[1]),
                Complex64::new(c[2], c[3]),
                Complex64::new(c[4], c[5]),
                Complex64::new(c[6], c[7]),
            ]
        })
        .collect()
}

/// Inverse square root of a 2x2 Hermitian PSD matrix, or `None` when the
/// smallest eigenvalue is at or below [`RETRACTION_MIN_EIG`].
fn m2_hermitian_inv_sqrt(s: &M2) -> Option<M2> {
    let p = s[0].re;
    let r = s[3].re;
    let w = s[1]; // s[2] = conj(w)
    let mean = 0.5 * (p + r);
    let half_gap = 0.5 * (p - r);
    let root = (half_gap * half_gap + w.norm_sqr()).sqrt();
    let lo = mean - root;
    let hi = mean + root;
    if !(lo > RETRACTION_MIN_EIG) {
        return None;
    }
    let inv_lo = 1.0 / lo.sqrt();
    let inv_hi = 1.0 / hi.sqrt();
    if w.norm_sqr() < 1e-60 {
        let (inv_p, inv_r) = if p <= r { (inv_lo, inv_hi) } else { (inv_hi, inv_lo) };
        return Some([
            Complex64::new(inv_p, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(inv_r, 0.0),
        ]);
    }
    // Eigenvector for eigenvalue l is (w, l - p), normalized.
    let mut out = M2_ZERO;
    for (l, inv) in [(lo, inv_lo), (hi, inv_hi)] {
        let v0 = w;
        let v1 = Complex64::new(l - p, 0.0);
        let norm_sqr = v0.norm_sqr() + v1.norm_sqr();
        let scale = inv / norm_sqr;
        out[0] += v0 * v0.conj() * scale;
        out[1] += v0 * v1.conj() * scale;
        out[2] += v1 * v0.conj() * scale;
        out[3] += v1 * v1.conj() * scale;
    }
    Some(out)
}

/// Reusable buffers for the inner objective, evaluated millions of times.
struct Objective {
    rho0: M2,
    rho1: M2,
    delta: M2,
    ops: Vec<M2>,
}

impl Objective {
    fn new(k: usize, rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Self {
        let to_m2 = |m: &ComplexMatrix| [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)];
        let r0 = to_m2(rho0);
        let r1 = to_m2(rho1);
        let delta = [r0[0] - r1[0], r0[1] - r1[1], r0[2] - r1[2], r0[3] - r1[3]];
        Self {
            rho0: r0,
            rho1: r1,
            delta,
            ops: Vec::with_capacity(k),
        }
    }

    /// Retract and evaluate: returns (average fidelity, information gain).
    ///
    /// The fidelity of a measurement on one half of a pure bipartite state
    /// reduces to traces against the reduced states:
    /// F = (1/2) sum_i sum_j |Tr(N_j rho_i)|^2.
    fn eval(&mut self, raw: &[f64]) -> Option<(f64, f64)> {
        self.ops.clear();
        self.ops.extend(decode_raw(raw));

        let mut gram = M2_ZERO;
        for op in &self.ops {
            let prod = m2_mul(&m2_adjoint(op), op);
            for (g, p) in gram.iter_mut().zip(prod.iter()) {
                *g += p;
            }
        }
        let inv_sqrt = m2_hermitian_inv_sqrt(&gram)?;
        for op in &mut self.ops {
            *op = m2_mul(op, &inv_sqrt);
        }

        let mut fbar = 0.0;
        let mut gain = 0.0;
        for op in &self.ops {
            fbar += m2_trace_mul(op, &self.rho0).norm_sqr();
            fbar += m2_trace_mul(op, &self.rho1).norm_sqr();
            let effect = m2_mul(&m2_adjoint(op), op);
            gain += m2_trace_mul(&effect, &self.delta).re.abs();
        }
        Some((0.5 * fbar, 0.5 * gain))
    }

    fn penalized(&mut self, raw: &[f64], q_target: f64, weight: f64) -> f64 {
        match self.eval(raw) {
            Some((fbar, q)) => {
                let residual = q - q_target;
                let value = -fbar + weight * residual * residual;
                if value.is_finite() {
                    value
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    }
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex descent.
// ---------------------------------------------------------------------------

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    spread_tol: f64,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        points.push(x);
    }
    let mut values: Vec<f64> = points.iter().map(|x| f(x)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut candidate = vec![0.0; n];

    for _ in 0..max_iter {
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if values[worst] - values[best] <= spread_tol {
            break;
        }

        // Centroid of all but the worst point.
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in order.iter().take(n) {
            for (c, &xi) in centroid.iter_mut().zip(&points[idx]) {
                *c += xi;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        // Reflection.
        for ((cand, &c), &w) in candidate
            .iter_mut()
            .zip(&centroid)
            .zip(&points[worst])
        {
            *cand = 2.0 * c - w;
        }
        let f_reflect = f(&candidate);

        if f_reflect < values[best] {
            // Expansion.
            let reflected = candidate.clone();
            for ((cand, &c), &w) in candidate
                .iter_mut()
                .zip(&centroid)
                .zip(&points[worst])
            {
                *cand = 3.0 * c - 2.0 * w;
            }
            let f_expand = f(&candidate);
            if f_expand < f_reflect {
                points[worst] = candidate.clone();
                values[worst] = f_expand;
            } else {
                points[worst] = reflected;
                values[worst] = f_reflect;
            }
            continue;
        }

        if f_reflect < values[second_worst] {
            points[worst] = candidate.clone();
            values[worst] = f_reflect;
            continue;
        }

        // Contraction, outside or inside of the worst point.
        if f_reflect < values[worst] {
            for ((cand, &c), &w) in candidate
                .iter_mut()
                .zip(&centroid)
                .zip(&points[worst])
            {
                *cand = 1.5 * c - 0.5 * w;
            }
        } else {
            for ((cand, &c), &w) in candidate
                .iter_mut()
                .zip(&centroid)
                .zip(&points[worst])
            {
                *cand = 0.5 * c + 0.5 * w;
            }
        }
        let f_contract = f(&candidate);
        if f_contract < values[worst].min(f_reflect) {
            points[worst] = candidate.clone();
            values[worst] = f_contract;
            continue;
        }

        // Shrink toward the best point.
        let best_point = points[best].clone();
        for &idx in order.iter().skip(1) {
            for (xi, &bi) in points[idx].iter_mut().zip(&best_point) {
                *xi = 0.5 * (*xi + bi);
            }
            values[idx] = f(&points[idx]);
        }
    }

    let winner = order
        .iter()
        .copied()
        .min_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        })
        .unwrap();
    (points[winner].clone(), values[winner])
}

// ---------------------------------------------------------------------------
// Constrained maximization.
// ---------------------------------------------------------------------------

fn encode_povm(povm: &Povm, k: usize) -> Vec<f64> {
    let mut raw = vec![0.0; k * PARAMS_PER_OPERATOR];
    for (j, op) in povm.operators().iter().enumerate() {
        let base = j * PARAMS_PER_OPERATOR;
        for (slot, (row, col)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
            let z = op.get(*row, *col);
            raw[base + 2 * slot] = z.re;
            raw[base + 2 * slot + 1] = z.im;
        }
    }
    raw
}

struct RestartOutcome {
    feasible: Vec<FeasibleSample>,
    closest_violation: f64,
}

/// Maximize average fidelity over K-outcome measurements whose information
/// gain equals `q_target`, and keep the audit trail.
pub fn maximize_fidelity_detailed(
    scheme: &SealScheme,
    q_target: f64,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationDiagnostics> {
    if scheme.dim_b() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "optimizer handles a qubit public factor, got dimension {}",
            scheme.dim_b()
        )));
    }
    if k < 2 {
        return Err(Error::ParamOutOfRange(format!(
            "need at least 2 measurement outcomes, got {k}"
        )));
    }
    if restarts < 1 {
        return Err(Error::ParamOutOfRange("need at least 1 restart".into()));
    }

    let analysis = analyze_scheme(scheme)?;
    let q_max = analysis.q_max;
    if q_max <= HELSTROM_KERNEL_TOL {
        return Err(Error::QmaxZero);
    }
    if !q_target.is_finite() || q_target < 0.0 || q_target > q_max + 1e-12 {
        return Err(Error::QOutOfRange {
            q: q_target,
            q_max,
        });
    }
    let q_target = q_target.min(q_max);

    let decomposition = helstrom_decomposition(&analysis.rho0, &analysis.rho1, HELSTROM_KERNEL_TOL)?;
    let warm_povm = build_attack(&decomposition, q_target, q_max)?;
    let warm_raw = encode_povm(&warm_povm, k);

    let mut objective = Objective::new(k, &analysis.rho0, &analysis.rho1);

    let exact_eval = |raw: &[f64]| -> Option<(f64, f64, Povm)> {
        let param = PovmParameterization::new(k, raw.to_vec());
        let povm = retract_to_povm(&param).ok()?;
        let fbar = average_fidelity(scheme, &povm).ok()?;
        let q = classical_l1(&povm, &analysis.rho0, &analysis.rho1).ok()?;
        Some((fbar, q, povm))
    };

    let mut run_restart = |restart: usize| -> RestartOutcome {
        let mut x = if restart == 0 {
            warm_raw.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            sample_parameterization(k, &mut rng).raw().to_vec()
        };
        let init_step = if restart == 0 { 0.05 } else { 0.25 };

        let mut feasible = Vec::new();
        let mut closest = f64::INFINITY;
        let mut weight = PENALTY_INITIAL_WEIGHT;
        for round in 0..PENALTY_ROUNDS {
            let step = (init_step * 0.5f64.powi(round as i32)).max(1e-8);
            let (next, _) = nelder_mead(
                |raw| objective.penalized(raw, q_target, weight),
                &x,
                step,
                NM_MAX_ITER,
                NM_SPREAD_TOL,
            );
            x = next;
            weight *= 2.0;

            if let Some((fbar, q, povm)) = exact_eval(&x) {
                let violation = (q - q_target).abs();
                closest = closest.min(violation);
                if violation <= Q_FEASIBILITY_TOL {
                    feasible.push(FeasibleSample {
                        fbar,
                        q,
                        povm,
                        restart,
                    });
                }
            }
        }
        RestartOutcome {
            feasible,
            closest_violation: closest,
        }
    };

    let mut all_samples = Vec::new();
    let mut warm_start_fbar: Option<f64> = None;
    let mut closest_violation = f64::INFINITY;
    for restart in 0..restarts {
        let outcome = run_restart(restart);
        closest_violation = closest_violation.min(outcome.closest_violation);
        if restart == 0 {
            warm_start_fbar = outcome
                .feasible
                .iter()
                .map(|s| s.fbar)
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.max(v)))
                });
        }
        all_samples.extend(outcome.feasible);
    }

    let best = all_samples
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.fbar
                .partial_cmp(&b.fbar)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ib.cmp(ia)) // earlier sample wins ties
        })
        .map(|(idx, _)| idx);

    let Some(best_idx) = best else {
        return Err(Error::NoFeasiblePoint {
            q_target,
            tolerance: Q_FEASIBILITY_TOL,
            closest: closest_violation,
        });
    };
    let winner = all_samples[best_idx].clone();

    let bound = fbar_minmax(q_target, q_max)?;
    let result = OptimizationResult {
        best_fbar: winner.fbar,
        best_povm: winner.povm,
        achieved_q: winner.q,
        restarts_used: restarts,
        gap_to_bound: winner.fbar - bound,
    };
    Ok(OptimizationDiagnostics {
        result,
        feasible_samples: all_samples,
        warm_start_fbar,
    })
}

/// Maximize average fidelity over K-outcome measurements at fixed
/// information gain; reports only exactly re-evaluated objectives.
pub fn maximize_fidelity(
    scheme: &SealScheme,
    q_target: f64,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    Ok(maximize_fidelity_detailed(scheme, q_target, k, restarts, seed)?.result)
}

/// One grid point of a bound verification run.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub q: f64,
    pub bound: f64,
    pub best_fbar: f64,
    pub gap: f64,
    pub achieved_q: f64,
    /// Best feasible fidelity reached by the warm-started restart.
    pub warm_fbar: Option<f64>,
    /// Feasible points audited against the completeness inequalities.
    pub samples_checked: usize,
}

/// Full report of a bound verification sweep.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub q_max: f64,
    pub outcomes: usize,
    pub restarts: usize,
    pub seed: u64,
    pub checks: Vec<BoundCheck>,
}

/// Run the optimizer on the stringent scheme over a grid of gains and
/// assert that no result beats the closed-form fidelity bound, and that
/// every feasible measurement satisfies the two completeness inequalities
/// the analytic argument rests on.
pub fn verify_bound(
    q_max: f64,
    q_grid: &[f64],
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<BoundReport> {
    let scheme = crate::seal::make_stringent_scheme(q_max)?;
    for &q in q_grid {
        if !(q > 0.0 && q <= q_max) {
            return Err(Error::ParamOutOfRange(format!(
                "grid point {q} outside (0, q_max = {q_max}]"
            )));
        }
    }

    let mut checks = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let diagnostics = maximize_fidelity_detailed(&scheme, q, k, restarts, seed)?;
        let bound = fbar_minmax(q, q_max)?;
        let result = &diagnostics.result;
        if result.best_fbar > bound + BOUND_TOL {
            return Err(Error::BoundViolation {
                q,
                best_fbar: result.best_fbar,
                bound,
                povm: Box::new(result.best_povm.clone()),
            });
        }

        for sample in &diagnostics.feasible_samples {
            let (diag_sum, cross_sum) = measurement_inequalities(&sample.povm)?;
            let ratio = (sample.q / q_max).min(1.0);
            let cross_bound = 2.0 * (1.0 - ratio * ratio).max(0.0).sqrt();
            if diag_sum > 2.0 + 1e-9 || cross_sum > cross_bound + 1e-9 {
                return Err(Error::BoundViolation {
                    q,
                    best_fbar: sample.fbar,
                    bound,
                    povm: Box::new(sample.povm.clone()),
                });
            }
        }

        checks.push(BoundCheck {
            q,
            bound,
            best_fbar: result.best_fbar,
            gap: result.gap_to_bound,
            achieved_q: result.achieved_q,
            warm_fbar: diagnostics.warm_start_fbar,
            samples_checked: diagnostics.feasible_samples.len(),
        });
    }

    Ok(BoundReport {
        q_max,
        outcomes: k,
        restarts,
        seed,
        checks,
    })
}
