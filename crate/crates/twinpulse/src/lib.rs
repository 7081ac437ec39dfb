//! Twin composite π-pulse sequences for resonant two-level systems:
//! construction, exact propagators, excitation profiles, and numerical
//! certification of the closed-form properties the families satisfy.
//!
//! A composite π pulse replaces a single resonant π pulse by a train of
//! pulses with prescribed relative phases, canceling systematic pulse area
//! errors to high order while leaving the nominal action untouched. The
//! families built here are *twin* sequences: a half-sequence concatenated
//! with its own reversal, seam pulses merged, with composite phases given
//! by closed-form rational multiples of π for any length. Their excitation
//! profiles follow `P(ε) = 1 - sin^e(πε/2)` with an exponent that grows
//! linearly with the sequence length, so any desired compensation order is
//! reachable.
//!
//! # Modules
//!
//! * [`su2`]: propagators as Cayley-Klein pairs, with construction,
//!   phase shifting, composition, and probabilities.
//! * [`sequence`]: the three twin families, their phase formulas, and the
//!   reference sequences L1–L4; exact rational phase bookkeeping and the
//!   sequence JSON format.
//! * [`analysis`]: excitation profiles, compensation-order estimation,
//!   high-fidelity bandwidths, and profile comparison.
//! * [`identity`]: coefficient extraction from the survival amplitude and
//!   the closed-form product identities behind the profile formulas.
//! * [`waveform`]: time-domain integration of shaped pulses, verifying
//!   that on resonance only the pulse area matters.
//!
//! # Example
//!
//! ```
//! use twinpulse::sequence::{build_twin, Family};
//! use twinpulse::analysis::{profile, EpsGrid};
//!
//! let seq = build_twin(Family::Type1, 3).unwrap();
//! assert_eq!(seq.pulse_table(), "A 0 | B 1/4 | B 1 | B 1/4 | A 0");
//!
//! let table = profile(&seq, &EpsGrid::default_grid());
//! assert!(table.max_numeric_analytic_gap().unwrap() < 1e-10);
//! ```

pub mod analysis;
mod bigprop;
pub mod error;
pub mod identity;
pub mod sequence;
pub mod su2;
pub mod waveform;

pub use error::{Error, Result};
