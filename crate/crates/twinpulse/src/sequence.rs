//! Construction of twin composite π-pulse sequences and the literature
//! reference sequences L1–L4.
//!
//! A twin sequence is a half-sequence concatenated with its own reversal,
//! with the two equal pulses at the seam merged into one pulse of twice the
//! area, giving `2N-1` pulses from an `N`-pulse half. Three families are
//! provided, distinguished by the areas of the half-sequence pulses and by
//! the composite phase formula:
//!
//! * type 1: half `A B … B A`, phases `φ_k = (k-1)²π / (2(N-1))`,
//!   total area `2(N-1)π`;
//! * type 2: half `A B … B B`, phases `φ_k = 2(k-1)²π / (2N-1)`,
//!   total area `(2N-1)π`;
//! * type 3: the reversal of the type-2 half (`B … B A`), twinned the
//!   same way, so every pulse of the result is a `B` pulse; same phases
//!   and total area as type 2.
//!
//! All phases are exact rational multiples of π, stored as reduced integer
//! fractions and normalized into `[0, 2π)`, so sequence equality is exact
//! rather than tolerance-based.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::su2::PulseArea;

/// A phase that is an exact rational multiple of π, reduced to lowest terms
/// with positive denominator and normalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseFraction {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl PhaseFraction {
    pub const ZERO: PhaseFraction = PhaseFraction { num: 0, den: 1 };

    /// Phase `num·π/den`, reduced and brought into `[0, 2π)`.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "phase denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        num = num.rem_euclid(2 * den);
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
        Self { num, den }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }
}

impl fmt::Display for PhaseFraction {
    /// Formats in units of π: `0`, `1`, `1/4`, `3/2`, …
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// One constituent pulse: a nominal area and a composite phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pulse {
    pub area: PulseArea,
    pub phase: PhaseFraction,
}

impl Pulse {
    pub fn new(area: PulseArea, phase: PhaseFraction) -> Self {
        Self { area, phase }
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.area, self.phase)
    }
}

/// The three twin families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Type1,
    Type2,
    Type3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Type1, Family::Type2, Family::Type3];

    /// Exponent of the closed-form excitation profile
    /// `P = 1 - sin^e(πε/2)`: `4(N-1)` for type 1, `4N-2` for types 2 and 3.
    pub fn profile_exponent(&self, n: u32) -> u32 {
        match self {
            Family::Type1 => 4 * (n - 1),
            Family::Type2 | Family::Type3 => 4 * n - 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Type1 => write!(f, "type1"),
            Family::Type2 => write!(f, "type2"),
            Family::Type3 => write!(f, "type3"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "type1" | "1" => Ok(Family::Type1),
            "type2" | "2" => Ok(Family::Type2),
            "type3" | "3" => Ok(Family::Type3),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// Literature reference sequences. `L3` carries its center-pulse sign
/// ambiguity as two explicit variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceName {
    L1,
    L2,
    L3Plus,
    L3Minus,
    L4,
}

impl ReferenceName {
    pub const ALL: [ReferenceName; 5] = [
        ReferenceName::L1,
        ReferenceName::L2,
        ReferenceName::L3Plus,
        ReferenceName::L3Minus,
        ReferenceName::L4,
    ];
}

impl fmt::Display for ReferenceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceName::L1 => write!(f, "L1"),
            ReferenceName::L2 => write!(f, "L2"),
            ReferenceName::L3Plus => write!(f, "L3plus"),
            ReferenceName::L3Minus => write!(f, "L3minus"),
            ReferenceName::L4 => write!(f, "L4"),
        }
    }
}

impl FromStr for ReferenceName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(ReferenceName::L1),
            "l2" => Ok(ReferenceName::L2),
            "l3plus" | "l3+" => Ok(ReferenceName::L3Plus),
            "l3minus" | "l3-" => Ok(ReferenceName::L3Minus),
            "l4" => Ok(ReferenceName::L4),
            _ => Err(Error::UnknownReference(s.to_string())),
        }
    }
}

/// What a sequence is: a twin family member, a literature reference, or an
/// ad-hoc pulse list (single pulses, sequences loaded from files).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SequenceLabel {
    Twin { family: Family, n: u32 },
    Reference(ReferenceName),
    Custom(String),
}

impl fmt::Display for SequenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceLabel::Twin { family, n } => write!(f, "{family}:{n}"),
            SequenceLabel::Reference(r) => write!(f, "{r}"),
            SequenceLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// Total nominal area of a sequence, kept in exact quarter-π units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalArea {
    quarter_pi: u64,
}

impl TotalArea {
    pub fn quarter_pi(&self) -> u64 {
        self.quarter_pi
    }

    /// `Some(n)` when the total area is exactly `n·π`.
    pub fn as_pi_multiple(&self) -> Option<u64> {
        self.quarter_pi
            .is_multiple_of(4)
            .then_some(self.quarter_pi / 4)
    }

    pub fn in_units_of_pi(&self) -> f64 {
        self.quarter_pi as f64 / 4.0
    }
}

/// An ordered pulse train with a label identifying where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    label: SequenceLabel,
    pulses: Vec<Pulse>,
}

impl CompositeSequence {
    /// Ad-hoc sequence under a caller-chosen label. An empty pulse list is
    /// allowed and acts as the identity.
    pub fn custom(label: impl Into<String>, pulses: Vec<Pulse>) -> Self {
        Self {
            label: SequenceLabel::Custom(label.into()),
            pulses,
        }
    }

    /// A lone pulse with zero phase (the bare-pulse comparison curve).
    pub fn single_pulse(area: PulseArea) -> Self {
        Self::custom(
            format!("single-{area}"),
            vec![Pulse::new(area, PhaseFraction::ZERO)],
        )
    }

    pub fn label(&self) -> &SequenceLabel {
        &self.label
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Twin parameter N, when the sequence is a twin family member.
    pub fn n_parameter(&self) -> Option<u32> {
        match self.label {
            SequenceLabel::Twin { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn family(&self) -> Option<Family> {
        match self.label {
            SequenceLabel::Twin { family, .. } => Some(family),
            _ => None,
        }
    }

    /// Exponent `e` of the closed-form profile `P = 1 - sin^e(πε/2)`,
    /// available for twin family members only.
    pub fn profile_exponent(&self) -> Option<u32> {
        match self.label {
            SequenceLabel::Twin { family, n } => Some(family.profile_exponent(n)),
            _ => None,
        }
    }

    /// Sum of nominal pulse areas.
    pub fn total_area(&self) -> TotalArea {
        TotalArea {
            quarter_pi: self
                .pulses
                .iter()
                .map(|p| u64::from(p.area.quarter_pi()))
                .sum(),
        }
    }

    pub fn is_palindrome(&self) -> bool {
        let m = self.pulses.len();
        (0..m / 2).all(|i| self.pulses[i] == self.pulses[m - 1 - i])
    }

    /// Pulse table in the form `A 0 | B 1/4 | B 1 | B 1/4 | A 0`
    /// (phases in units of π).
    pub fn pulse_table(&self) -> String {
        self.pulses
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for CompositeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.pulse_table())
    }
}

/// Composite phases of the type-1 family:
/// `φ_k = (k-1)²π / (2(N-1))`, `k = 1..N`, reduced into `[0, 2π)`.
pub fn phases_type1(n: u32) -> Result<Vec<PhaseFraction>> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let den = i64::from(2 * (n - 1));
    Ok((1..=i64::from(n))
        .map(|k| PhaseFraction::new((k - 1) * (k - 1), den))
        .collect())
}

/// Composite phases shared by the type-2 and type-3 families:
/// `φ_k = 2(k-1)²π / (2N-1)`, `k = 1..N`, reduced into `[0, 2π)`.
pub fn phases_type23(n: u32) -> Result<Vec<PhaseFraction>> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let den = i64::from(2 * n - 1);
    Ok((1..=i64::from(n))
        .map(|k| PhaseFraction::new(2 * (k - 1) * (k - 1), den))
        .collect())
}

/// Concatenates a half-sequence with its reversal, merging the two equal
/// seam pulses into one pulse of doubled area.
fn twin_of(half: &[Pulse]) -> Vec<Pulse> {
    let (seam, body) = half.split_last().expect("half-sequence is nonempty");
    let mut pulses = Vec::with_capacity(2 * half.len() - 1);
    pulses.extend_from_slice(body);
    pulses.push(Pulse::new(seam.area.doubled(), seam.phase));
    pulses.extend(body.iter().rev().copied());
    pulses
}

/// Builds the twin sequence `T_N` of the requested family; `2N-1` pulses.
pub fn build_twin(family: Family, n: u32) -> Result<CompositeSequence> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let half: Vec<Pulse> = match family {
        Family::Type1 => {
            let ph = phases_type1(n)?;
            (0..n as usize)
                .map(|k| {
                    let area = if k == 0 || k == n as usize - 1 {
                        PulseArea::A
                    } else {
                        PulseArea::B
                    };
                    Pulse::new(area, ph[k])
                })
                .collect()
        }
        Family::Type2 => {
            let ph = phases_type23(n)?;
            (0..n as usize)
                .map(|k| {
                    let area = if k == 0 { PulseArea::A } else { PulseArea::B };
                    Pulse::new(area, ph[k])
                })
                .collect()
        }
        // The type-3 half is the reversal of the type-2 half; twinning it
        // puts the k = 1 phase at the center and turns every pulse into a
        // B pulse.
        Family::Type3 => {
            let ph = phases_type23(n)?;
            (0..n as usize)
                .rev()
                .map(|k| {
                    let area = if k == 0 { PulseArea::A } else { PulseArea::B };
                    Pulse::new(area, ph[k])
                })
                .collect()
        }
    };
    Ok(CompositeSequence {
        label: SequenceLabel::Twin { family, n },
        pulses: twin_of(&half),
    })
}

/// Exact pulse lists of the reference sequences.
pub fn reference_sequence(name: ReferenceName) -> CompositeSequence {
    let a = |num: i64, den: i64| Pulse::new(PulseArea::A, PhaseFraction::new(num, den));
    let b = |num: i64, den: i64| Pulse::new(PulseArea::B, PhaseFraction::new(num, den));
    let c = |num: i64, den: i64| Pulse::new(PulseArea::C, PhaseFraction::new(num, den));
    let d = |num: i64, den: i64| Pulse::new(PulseArea::D, PhaseFraction::new(num, den));
    let pulses = match name {
        ReferenceName::L1 => vec![a(0, 1), b(1, 2), a(0, 1)],
        ReferenceName::L2 => vec![a(0, 1), c(2, 3), a(0, 1)],
        ReferenceName::L3Plus | ReferenceName::L3Minus => {
            let center_sign = if name == ReferenceName::L3Plus { 1 } else { -1 };
            vec![
                d(-1, 2),
                a(0, 1),
                a(1, 2),
                d(0, 1),
                b(center_sign, 2),
                d(0, 1),
                a(-1, 2),
                a(0, 1),
                d(1, 2),
            ]
        }
        ReferenceName::L4 => vec![
            a(1, 2),
            a(0, 1),
            a(-1, 2),
            a(0, 1),
            a(0, 1),
            a(-1, 2),
            a(0, 1),
            a(1, 2),
        ],
    };
    CompositeSequence {
        label: SequenceLabel::Reference(name),
        pulses,
    }
}

// --- file format ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    family: String,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    pulses: Vec<PulseRecord>,
}

#[derive(Serialize, Deserialize)]
struct PulseRecord {
    area_quarter_pi: u32,
    phase_num: i64,
    phase_den: i64,
}

impl CompositeSequence {
    /// Serializes to the sequence JSON format:
    /// `{family, N, pulses: [{area_quarter_pi, phase_num, phase_den}]}`,
    /// phases as exact fractions of π. `N` is present for twins only.
    pub fn to_json(&self) -> String {
        let (family, n) = match &self.label {
            SequenceLabel::Twin { family, n } => (family.to_string(), Some(*n)),
            SequenceLabel::Reference(r) => (r.to_string(), None),
            SequenceLabel::Custom(s) => (s.clone(), None),
        };
        let file = SequenceFile {
            family,
            n,
            pulses: self
                .pulses
                .iter()
                .map(|p| PulseRecord {
                    area_quarter_pi: p.area.quarter_pi(),
                    phase_num: p.phase.numerator(),
                    phase_den: p.phase.denominator(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("sequence serialization cannot fail")
    }

    /// Parses the sequence JSON format. When the `family` tag names a twin
    /// family or a reference sequence, the pulse list must match the
    /// constructed one exactly; other tags are accepted as custom labels.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SequenceFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidSequenceFile(e.to_string()))?;
        let mut pulses = Vec::with_capacity(file.pulses.len());
        for rec in &file.pulses {
            if rec.phase_den == 0 {
                return Err(Error::InvalidSequenceFile(
                    "phase denominator must be nonzero".into(),
                ));
            }
            let area = PulseArea::new(rec.area_quarter_pi)
                .map_err(|_| Error::InvalidSequenceFile("pulse area must be positive".into()))?;
            pulses.push(Pulse::new(area, PhaseFraction::new(rec.phase_num, rec.phase_den)));
        }
        if let Ok(family) = file.family.parse::<Family>() {
            let n = file.n.ok_or_else(|| {
                Error::InvalidSequenceFile(format!("family {family} requires the N field"))
            })?;
            let built = build_twin(family, n)?;
            if built.pulses != pulses {
                return Err(Error::InvalidSequenceFile(format!(
                    "pulse list does not match {family} with N={n}"
                )));
            }
            return Ok(built);
        }
        if let Ok(name) = file.family.parse::<ReferenceName>() {
            let built = reference_sequence(name);
            if built.pulses != pulses {
                return Err(Error::InvalidSequenceFile(format!(
                    "pulse list does not match reference {name}"
                )));
            }
            return Ok(built);
        }
        if pulses.is_empty() {
            return Err(Error::InvalidSequenceFile("empty pulse list".into()));
        }
        Ok(CompositeSequence::custom(file.family, pulses))
    }
}
