//! Report assembly for the command-line front end: per-gain analysis
//! records, tradeoff curves, and deterministic text formatting.

use serde::Serialize;

use crate::attack::{
    build_attack, guess_probability, helstrom_decomposition, overlap_report,
    HELSTROM_KERNEL_TOL,
};
use crate::error::{Error, Result};
use crate::fidelity::{average_fidelity, fbar_at_a};
use crate::seal::{analyze_scheme, SealScheme};

/// One row of the information/disturbance tradeoff.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TradeoffPoint {
    pub q: f64,
    pub guess_pr: f64,
    pub fbar_sim: f64,
    pub fbar_closed: f64,
    pub detection_bound: f64,
}

/// Full analysis of one reading strategy on one scheme.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalyzeReport {
    pub q: f64,
    pub q_max: f64,
    pub a: f64,
    pub guess_pr: f64,
    pub fbar_sim: f64,
    pub fbar_closed: f64,
    pub detection_bound: f64,
}

fn point_at(scheme: &SealScheme, q: f64) -> Result<AnalyzeReport> {
    let analysis = analyze_scheme(scheme)?;
    let q_max = analysis.q_max;
    if q_max <= HELSTROM_KERNEL_TOL {
        return Err(Error::QmaxZero);
    }
    if !q.is_finite() || q < 0.0 || q > q_max + 1e-9 {
        return Err(Error::QOutOfRange { q, q_max });
    }
    let q = q.min(q_max);

    let decomposition = helstrom_decomposition(&analysis.rho0, &analysis.rho1, HELSTROM_KERNEL_TOL)?;
    let overlap = overlap_report(scheme, &decomposition)?;

    if q == 0.0 {
        // Reading nothing: the identity operation, which gains no
        // information and disturbs nothing. Reported exactly.
        return Ok(AnalyzeReport {
            q: 0.0,
            q_max,
            a: overlap.a,
            guess_pr: 0.5,
            fbar_sim: 1.0,
            fbar_closed: 1.0,
            detection_bound: 0.0,
        });
    }

    let povm = build_attack(&decomposition, q, q_max)?;
    let fbar_sim = average_fidelity(scheme, &povm)?;
    Ok(AnalyzeReport {
        q,
        q_max,
        a: overlap.a,
        guess_pr: guess_probability(scheme, &povm)?,
        fbar_sim,
        fbar_closed: fbar_at_a(overlap.a, q, q_max)?,
        detection_bound: 1.0 - fbar_sim,
    })
}

/// Analyze the optimal reading strategy at information gain `q`.
pub fn analyze_at(scheme: &SealScheme, q: f64) -> Result<AnalyzeReport> {
    point_at(scheme, q)
}

/// Sweep the tradeoff over `q = q_max * t / steps` for `t = 1..=steps`.
pub fn tradeoff_curve(scheme: &SealScheme, steps: usize) -> Result<Vec<TradeoffPoint>> {
    if steps < 2 {
        return Err(Error::ParamOutOfRange(format!(
            "curve needs at least 2 steps, got {steps}"
        )));
    }
    let q_max = analyze_scheme(scheme)?.q_max;
    if q_max <= HELSTROM_KERNEL_TOL {
        return Err(Error::QmaxZero);
    }
    let mut rows = Vec::with_capacity(steps);
    for t in 1..=steps {
        let q = q_max * t as f64 / steps as f64;
        let report = point_at(scheme, q)?;
        rows.push(TradeoffPoint {
            q: report.q,
            guess_pr: report.guess_pr,
            fbar_sim: report.fbar_sim,
            fbar_closed: report.fbar_closed,
            detection_bound: report.detection_bound,
        });
    }
    Ok(rows)
}

/// Format with exactly 15 significant decimal digits, positional notation.
pub fn fmt_sig15(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponential = format!("{:.14e}", x);
    let (mantissa, exp) = exponential
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.push_str(&"0".repeat(int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat(exp.unsigned_abs() as usize - 1));
        out.push_str(&digits);
    }
    out
}

/// Render curve rows as CSV: fixed header, 15 significant digits,
/// `.` decimal separator, LF line endings.
pub fn curve_to_csv(rows: &[TradeoffPoint]) -> String {
    let mut out = String::from("q,guess_pr,fbar_sim,fbar_closed,detection_bound\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig15(row.q),
            fmt_sig15(row.guess_pr),
            fmt_sig15(row.fbar_sim),
            fmt_sig15(row.fbar_closed),
            fmt_sig15(row.detection_bound),
        ));
    }
    out
}

impl AnalyzeReport {
    /// Deterministic key-value text block.
    pub fn to_text(&self) -> String {
        format!(
            "q = {}\nq_max = {}\na = {}\nguess_pr = {}\nfbar_sim = {}\nfbar_closed = {}\ndetection_bound = {}\n",
            fmt_sig15(self.q),
            fmt_sig15(self.q_max),
            fmt_sig15(self.a),
            fmt_sig15(self.guess_pr),
            fmt_sig15(self.fbar_sim),
            fmt_sig15(self.fbar_closed),
            fmt_sig15(self.detection_bound),
        )
    }
}
