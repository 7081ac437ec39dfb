//! Time-domain integration of shaped pulses on resonance.
//!
//! On resonance the propagator of any pulse depends only on its area, which
//! is what licenses treating pulses abstractly by area everywhere else in
//! the crate. The integrator here makes that checkable: it steps through a
//! sampled envelope, composing the exact propagator of each trapezoid
//! sub-area, so the only error left is the discretization of the envelope
//! itself.

use crate::error::{Error, Result};
use crate::su2::Su2Matrix;
use crate::sequence::CompositeSequence;

/// Tolerance for an envelope realizing a requested pulse area.
pub const AREA_MATCH_TOL: f64 = 1e-9;

const DEFAULT_STEPS: usize = 1000;

/// A sampled Rabi-frequency envelope `Ω(t)` normalized to a target area.
#[derive(Debug, Clone)]
pub struct Envelope {
    times: Vec<f64>,
    omegas: Vec<f64>,
    area: f64,
}

impl Envelope {
    /// Builds an envelope from `(time, Ω)` samples and rescales the
    /// amplitudes so the trapezoid-integrated area equals `target_area`.
    ///
    /// Times must be strictly increasing, Ω must be nonnegative, and both
    /// the raw and target areas must be positive.
    pub fn new(samples: &[(f64, f64)], target_area: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::EnvelopeTooShort);
        }
        if samples.iter().any(|&(t, _)| !t.is_finite())
            || samples.windows(2).any(|w| w[0].0 >= w[1].0)
        {
            return Err(Error::NonMonotonicTime);
        }
        if samples.iter().any(|&(_, omega)| !omega.is_finite() || omega < 0.0) {
            return Err(Error::NegativeRabiFrequency);
        }
        if !target_area.is_finite() || target_area <= 0.0 {
            return Err(Error::NonPositiveArea(target_area));
        }
        let raw: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if raw <= 0.0 {
            return Err(Error::NonPositiveArea(raw));
        }
        let scale = target_area / raw;
        Ok(Self {
            times: samples.iter().map(|s| s.0).collect(),
            omegas: samples.iter().map(|s| s.1 * scale).collect(),
            area: target_area,
        })
    }

    /// Constant envelope on [0, 1] with the given area.
    pub fn rectangular(area: f64) -> Result<Self> {
        Self::with_shape(area, DEFAULT_STEPS, |_| 1.0)
    }

    /// Truncated Gaussian (σ = 0.12, centered) on [0, 1] with the given area.
    pub fn gaussian(area: f64) -> Result<Self> {
        Self::with_shape(area, DEFAULT_STEPS, |t| {
            (-((t - 0.5) / 0.12).powi(2) / 2.0).exp()
        })
    }

    /// Envelope on [0, 1] sampled from an arbitrary nonnegative shape.
    pub fn with_shape(area: f64, steps: usize, shape: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let t = i as f64 / steps as f64;
                (t, shape(t))
            })
            .collect();
        Self::new(&samples, area)
    }

    /// Trapezoid-integrated area (equals the normalization target).
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.omegas.iter().copied())
    }

    /// Parses the envelope CSV format: a `t,omega` header followed by two
    /// numeric columns. The target area is the waveform's own integral.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidEnvelopeFile("empty file".into()))?;
        if header.trim() != "t,omega" {
            return Err(Error::InvalidEnvelopeFile(format!(
                "expected header `t,omega`, found `{}`",
                header.trim()
            )));
        }
        let mut samples = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (t, omega) = match (cols.next(), cols.next(), cols.next()) {
                (Some(t), Some(omega), None) => (t, omega),
                _ => {
                    return Err(Error::InvalidEnvelopeFile(format!(
                        "line {}: expected two comma-separated columns",
                        idx + 2
                    )))
                }
            };
            let parse = |v: &str, what: &str| {
                v.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidEnvelopeFile(format!("line {}: bad {what} `{v}`", idx + 2))
                })
            };
            samples.push((parse(t, "time")?, parse(omega, "omega")?));
        }
        let raw: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        Self::new(&samples, raw)
    }
}

/// Propagator of one shaped pulse: stepwise composition of the exact
/// propagators of the trapezoid sub-areas, then the phase shift.
pub fn integrate(envelope: &Envelope, phase: f64) -> Su2Matrix {
    let mut u = Su2Matrix::identity();
    for i in 1..envelope.times.len() {
        let dt = envelope.times[i] - envelope.times[i - 1];
        let sub_area = 0.5 * (envelope.omegas[i] + envelope.omegas[i - 1]) * dt;
        u = Su2Matrix::from_area(sub_area).compose(&u);
    }
    u.phase_shifted(phase)
}

/// Propagator of a composite sequence realized with shaped pulses: one
/// envelope per pulse, each carrying the pulse's actual area
/// `nominal·(1+ε)`, composed chronologically with the sequence's phases.
pub fn integrate_sequence(
    seq: &CompositeSequence,
    epsilon: f64,
    envelopes: &[Envelope],
) -> Result<Su2Matrix> {
    if envelopes.len() != seq.len() {
        return Err(Error::EnvelopeCountMismatch {
            expected: seq.len(),
            got: envelopes.len(),
        });
    }
    for (pulse, env) in seq.pulses().iter().zip(envelopes) {
        let expected = pulse.area.radians(epsilon);
        if (env.area() - expected).abs() > AREA_MATCH_TOL {
            return Err(Error::EnvelopeAreaMismatch {
                expected,
                got: env.area(),
                tol: AREA_MATCH_TOL,
            });
        }
    }
    let mut total = Su2Matrix::identity();
    for (pulse, env) in seq.pulses().iter().zip(envelopes) {
        total = integrate(env, pulse.phase.radians()).compose(&total);
    }
    Ok(total)
}

/// Ready-made envelope shapes for realizing sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Rectangular,
    Gaussian,
}

/// One envelope per pulse of `seq`, each normalized to the pulse's actual
/// area at error ε, all with the given shape.
pub fn shaped_envelopes(seq: &CompositeSequence, epsilon: f64, shape: Shape) -> Result<Vec<Envelope>> {
    seq.pulses()
        .iter()
        .map(|p| {
            let area = p.area.radians(epsilon);
            match shape {
                Shape::Rectangular => Envelope::rectangular(area),
                Shape::Gaussian => Envelope::gaussian(area),
            }
        })
        .collect()
}
