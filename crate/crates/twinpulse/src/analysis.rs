//! Excitation profiles, compensation-order estimation, high-fidelity
//! bandwidths, and sequence-vs-sequence comparison.
//!
//! The numeric route is always the brute-force propagator product; the
//! analytic route is the closed-form profile `P = 1 - sin^e(πε/2)` that the
//! twin families satisfy. Keeping both lets every closed-form claim be
//! checked against matrix arithmetic that knows nothing about it.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use crate::bigprop;
use crate::error::{Error, Result};
use crate::sequence::{CompositeSequence, Family};
use crate::su2::{resonant_propagator, Su2Matrix};

/// Absolute tolerance for "same profile" claims between two sequences.
pub const PROFILE_EQUALITY_TOL: f64 = 1e-10;

/// Termination tolerance (in ε) for numeric bandwidth bisection.
pub const BISECTION_TOL: f64 = 1e-10;

/// Default order-fit window in ε.
pub const ORDER_FIT_WINDOW: (f64, f64) = (1e-3, 1e-2);

const ORDER_FIT_POINTS: usize = 16;

/// Uniform grid specification for ε scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsGrid {
    min: f64,
    max: f64,
    count: usize,
}

impl EpsGrid {
    pub fn uniform(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !min.is_finite() || !max.is_finite() || min >= max {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { min, max, count })
    }

    /// 2001 uniform points on [-1, 1].
    pub fn default_grid() -> Self {
        Self {
            min: -1.0,
            max: 1.0,
            count: 2001,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

/// Chronological product of the phase-shifted pulse propagators.
pub fn sequence_propagator(seq: &CompositeSequence, epsilon: f64) -> Su2Matrix {
    seq.pulses().iter().fold(Su2Matrix::identity(), |acc, p| {
        resonant_propagator(p.area, epsilon)
            .phase_shifted(p.phase.radians())
            .compose(&acc)
    })
}

/// Closed-form transition probability of a twin family member:
/// `1 - sin^{4(N-1)}(πε/2)` for type 1, `1 - sin^{4N-2}(πε/2)` for
/// types 2 and 3.
pub fn analytic_probability(family: Family, n: u32, epsilon: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let exponent = family.profile_exponent(n);
    Ok(1.0 - (FRAC_PI_2 * epsilon).sin().powi(exponent as i32))
}

/// Sampled excitation profile of one sequence.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileTable {
    pub sequence_id: String,
    pub epsilons: Vec<f64>,
    pub p_numeric: Vec<f64>,
    /// Closed-form column; `None` for sequences without one.
    pub p_analytic: Option<Vec<f64>>,
    /// `1 - P` computed as the survival probability `|U₁₁|²`, which stays
    /// accurate where the transition probability saturates at 1.
    pub one_minus_p_numeric: Vec<f64>,
}

/// Evaluates the profile on a grid; the analytic column is filled for twin
/// family members.
pub fn profile(seq: &CompositeSequence, grid: &EpsGrid) -> ProfileTable {
    let epsilons = grid.points();
    let mut p_numeric = Vec::with_capacity(epsilons.len());
    let mut one_minus_p = Vec::with_capacity(epsilons.len());
    for &e in &epsilons {
        let u = sequence_propagator(seq, e);
        p_numeric.push(u.transition_probability());
        one_minus_p.push(u.survival_probability());
    }
    let p_analytic = seq.family().map(|family| {
        let n = seq.n_parameter().expect("twin label carries N");
        epsilons
            .iter()
            .map(|&e| analytic_probability(family, n, e).expect("twin N is valid"))
            .collect()
    });
    ProfileTable {
        sequence_id: seq.label().to_string(),
        epsilons,
        p_numeric,
        p_analytic,
        one_minus_p_numeric: one_minus_p,
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl ProfileTable {
    /// Largest pointwise gap between the numeric and analytic columns.
    pub fn max_numeric_analytic_gap(&self) -> Option<f64> {
        let analytic = self.p_analytic.as_ref()?;
        Some(
            self.p_numeric
                .iter()
                .zip(analytic)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Writes `epsilon,p_numeric,p_analytic,one_minus_p_numeric` rows with
    /// 17 significant digits; the analytic cell is empty when absent.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epsilon,p_numeric,p_analytic,one_minus_p_numeric")?;
        for i in 0..self.epsilons.len() {
            let analytic = match &self.p_analytic {
                Some(col) => fmt17(col[i]),
                None => String::new(),
            };
            writeln!(
                w,
                "{},{},{},{}",
                fmt17(self.epsilons[i]),
                fmt17(self.p_numeric[i]),
                analytic,
                fmt17(self.one_minus_p_numeric[i]),
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Result of a log-log fit of `1 - P` against ε near the origin.
#[derive(Debug, Clone, Serialize)]
pub struct OrderEstimate {
    pub fitted_slope: f64,
    /// Nearest even integer to the fitted slope.
    pub inferred_order: u32,
    /// ε range actually used by the fit.
    pub fit_window: (f64, f64),
    /// Largest absolute fit residual in log10 space.
    pub residual: f64,
}

/// Estimates the error-compensation order: the power of ε at which `1 - P`
/// departs from zero.
///
/// `1 - P` is taken as the survival probability `|U₁₁|²`, with both the
/// product and its log10 evaluated in extended precision: inside the
/// default window the survival of the longer sequences lies far below the
/// rounding floor of a double-precision product, and for long enough
/// sequences below the f64 range outright. Degenerate window points
/// (exactly vanishing survival) are dropped; if fewer than four points
/// survive, the window is moved up a decade (at most twice) before
/// giving up.
pub fn estimate_order(seq: &CompositeSequence) -> Result<OrderEstimate> {
    let peak_defect = sequence_propagator(seq, 0.0).survival_probability();
    if peak_defect > 1e-12 {
        return Err(Error::NotAPiPulse(peak_defect));
    }
    let mut ctx = bigprop::Ctx::for_sequence(seq);
    let (mut lo, mut hi) = ORDER_FIT_WINDOW;
    for _ in 0..3 {
        let ratio: f64 = hi / lo;
        let mut xs = Vec::with_capacity(ORDER_FIT_POINTS);
        let mut ys = Vec::with_capacity(ORDER_FIT_POINTS);
        for i in 0..ORDER_FIT_POINTS {
            let e = lo * ratio.powf(i as f64 / (ORDER_FIT_POINTS - 1) as f64);
            if let Some(y) = bigprop::survival_log10(seq, e, &mut ctx) {
                xs.push(e.log10());
                ys.push(y);
            }
        }
        if xs.len() >= 4 {
            let (slope, intercept) = least_squares(&xs, &ys);
            let residual = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (slope * x + intercept - y).abs())
                .fold(0.0, f64::max);
            let half_order = (slope / 2.0).round();
            if half_order < 1.0 {
                return Err(Error::OrderFitUnderflow);
            }
            return Ok(OrderEstimate {
                fitted_slope: slope,
                inferred_order: 2 * half_order as u32,
                fit_window: (10f64.powf(xs[0]), 10f64.powf(*xs.last().unwrap())),
                residual,
            });
        }
        lo *= 10.0;
        hi *= 10.0;
    }
    Err(Error::OrderFitUnderflow)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Closed-form high-fidelity half-width of a twin family member:
/// the largest ε* with `1 - P(ε) ≤ threshold` for `|ε| ≤ ε*`, obtained by
/// inverting the profile formula.
pub fn analytic_bandwidth(family: Family, n: u32, threshold: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let exponent = f64::from(family.profile_exponent(n));
    Ok(2.0 / PI * threshold.powf(1.0 / exponent).asin())
}

/// Numeric high-fidelity half-width: outward scan from ε = 0 on both sides
/// for the first threshold crossing, then bisection to `BISECTION_TOL`.
/// Capped at 1 when the error stays below the threshold on all of [-1, 1].
pub fn numeric_bandwidth(seq: &CompositeSequence, threshold: f64) -> Result<f64> {
    if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let error_at = |e: f64| sequence_propagator(seq, e).survival_probability();
    if error_at(0.0) > threshold {
        return Ok(0.0);
    }
    let mut best: f64 = 1.0;
    for sign in [1.0, -1.0] {
        let step: f64 = 1.0 / 2048.0;
        let mut lo: f64 = 0.0;
        let mut bracket = None;
        while lo < 1.0 {
            let next = (lo + step).min(1.0);
            if error_at(sign * next) > threshold {
                bracket = Some((lo, next));
                break;
            }
            lo = next;
        }
        if let Some((mut lo, mut hi)) = bracket {
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if error_at(sign * mid) > threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.min(0.5 * (lo + hi));
        }
    }
    Ok(best)
}

/// Which of the two sequences has the smaller error on a grid segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceRegion {
    pub eps_min: f64,
    pub eps_max: f64,
    pub better: Dominance,
}

/// Side-by-side comparison of two sequences on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub sequence_a: String,
    pub sequence_b: String,
    pub threshold: f64,
    pub bandwidth_a: f64,
    pub bandwidth_b: f64,
    pub max_abs_probability_difference: f64,
    /// True when the profiles agree within `PROFILE_EQUALITY_TOL` pointwise.
    pub identical_within_tolerance: bool,
    /// Grid segments classified by the sign of `(1-P_a) - (1-P_b)`;
    /// differences below `PROFILE_EQUALITY_TOL` count as ties.
    pub dominance_regions: Vec<DominanceRegion>,
}

/// Compares excitation profiles pointwise and by threshold bandwidth.
pub fn compare(
    seq_a: &CompositeSequence,
    seq_b: &CompositeSequence,
    grid: &EpsGrid,
    threshold: f64,
) -> Result<ComparisonReport> {
    let eps = grid.points();
    let mut max_diff: f64 = 0.0;
    let mut marks = Vec::with_capacity(eps.len());
    for &e in &eps {
        let ea = sequence_propagator(seq_a, e).survival_probability();
        let eb = sequence_propagator(seq_b, e).survival_probability();
        let d = ea - eb;
        max_diff = max_diff.max(d.abs());
        marks.push(if d.abs() <= PROFILE_EQUALITY_TOL {
            Dominance::Tie
        } else if d < 0.0 {
            Dominance::A
        } else {
            Dominance::B
        });
    }
    let mut regions: Vec<DominanceRegion> = Vec::new();
    for (i, &m) in marks.iter().enumerate() {
        match regions.last_mut() {
            Some(r) if r.better == m => r.eps_max = eps[i],
            _ => regions.push(DominanceRegion {
                eps_min: eps[i],
                eps_max: eps[i],
                better: m,
            }),
        }
    }
    Ok(ComparisonReport {
        sequence_a: seq_a.label().to_string(),
        sequence_b: seq_b.label().to_string(),
        threshold,
        bandwidth_a: numeric_bandwidth(seq_a, threshold)?,
        bandwidth_b: numeric_bandwidth(seq_b, threshold)?,
        max_abs_probability_difference: max_diff,
        identical_within_tolerance: max_diff <= PROFILE_EQUALITY_TOL,
        dominance_regions: regions,
    })
}
