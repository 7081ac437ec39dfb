//! Extended-precision evaluation of sequence propagators.
//!
//! Broadband sequences are built so that the low orders of the survival
//! amplitude cancel. In plain f64 the cancellation bottoms out at the
//! rounding floor of the matrix product (roughly 1e-16 on entries of order
//! one), which is far above the amplitudes that order fitting and
//! coefficient extraction have to resolve. This module redoes the product
//! in software floating point with enough mantissa bits that the rounding
//! floor sits comfortably below the smallest amplitude of interest.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

use crate::sequence::CompositeSequence;

const RM: RoundingMode = RoundingMode::ToEven;

/// Precision context: mantissa width plus the shared constants cache.
pub(crate) struct Ctx {
    p: usize,
    consts: Consts,
    pi: BigFloat,
}

impl Ctx {
    pub fn new(precision_bits: usize) -> Self {
        let mut consts = Consts::new().expect("constants cache allocation");
        let pi = consts.pi(precision_bits, RM);
        Ctx {
            p: precision_bits,
            consts,
            pi,
        }
    }

    /// Mantissa bits sufficient for a given sequence: the smallest survival
    /// amplitude in the order-fit window scales like `eps^(total area / π)`,
    /// so the requirement grows linearly with the total area.
    pub fn for_sequence(seq: &CompositeSequence) -> Self {
        let quarters = seq.total_area().quarter_pi() as usize;
        Self::new(128 + 5 * quarters)
    }

    pub fn big(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    pub fn pi(&self) -> BigFloat {
        self.pi.clone()
    }

    pub fn add(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.add(y, self.p, RM)
    }

    pub fn sub(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.sub(y, self.p, RM)
    }

    pub fn mul(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.mul(y, self.p, RM)
    }

    pub fn div(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.div(y, self.p, RM)
    }

    pub fn sin(&mut self, x: &BigFloat) -> BigFloat {
        x.sin(self.p, RM, &mut self.consts)
    }

    pub fn cos(&mut self, x: &BigFloat) -> BigFloat {
        x.cos(self.p, RM, &mut self.consts)
    }

    pub fn asin(&mut self, x: &BigFloat) -> BigFloat {
        x.asin(self.p, RM, &mut self.consts)
    }

    pub fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.p, RM)
    }

    pub fn log10(&mut self, x: &BigFloat) -> BigFloat {
        x.log10(self.p, RM, &mut self.consts)
    }
}

/// Rounds a `BigFloat` to the nearest representable f64 (values beyond the
/// f64 range flush to 0 or ±∞).
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    let words = x.mantissa_digits().expect("finite number has a mantissa");
    let top = words[words.len() - 1];
    let e = x.exponent().expect("finite number has an exponent");
    // mantissa is top-bit normalized: value = ±(top/2^64 + …)·2^e
    let frac = top as f64 / 18446744073709551616.0;
    let e1 = e.clamp(-900, 900);
    let v = frac * 2f64.powi(e1) * 2f64.powi(e - e1);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

#[derive(Clone)]
pub(crate) struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn from_f64(re: f64, im: f64, ctx: &Ctx) -> Self {
        BigComplex {
            re: ctx.big(re),
            im: ctx.big(im),
        }
    }

    pub fn add(&self, o: &Self, ctx: &Ctx) -> Self {
        BigComplex {
            re: ctx.add(&self.re, &o.re),
            im: ctx.add(&self.im, &o.im),
        }
    }

    pub fn sub(&self, o: &Self, ctx: &Ctx) -> Self {
        BigComplex {
            re: ctx.sub(&self.re, &o.re),
            im: ctx.sub(&self.im, &o.im),
        }
    }

    pub fn mul(&self, o: &Self, ctx: &Ctx) -> Self {
        BigComplex {
            re: ctx.sub(&ctx.mul(&self.re, &o.re), &ctx.mul(&self.im, &o.im)),
            im: ctx.add(&ctx.mul(&self.re, &o.im), &ctx.mul(&self.im, &o.re)),
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn scale(&self, s: &BigFloat, ctx: &Ctx) -> Self {
        BigComplex {
            re: ctx.mul(&self.re, s),
            im: ctx.mul(&self.im, s),
        }
    }

    pub fn norm_sqr(&self, ctx: &Ctx) -> BigFloat {
        ctx.add(&ctx.mul(&self.re, &self.re), &ctx.mul(&self.im, &self.im))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// Cayley-Klein pair in extended precision.
#[derive(Clone)]
pub(crate) struct BigSu2 {
    pub a: BigComplex,
    pub b: BigComplex,
}

impl BigSu2 {
    pub fn identity(ctx: &Ctx) -> Self {
        BigSu2 {
            a: BigComplex::from_f64(1.0, 0.0, ctx),
            b: BigComplex::from_f64(0.0, 0.0, ctx),
        }
    }

    /// `self · earlier`, same convention as `Su2Matrix::compose`.
    pub fn compose(&self, earlier: &BigSu2, ctx: &Ctx) -> BigSu2 {
        BigSu2 {
            a: self
                .a
                .mul(&earlier.a, ctx)
                .sub(&self.b.mul(&earlier.b.conj(), ctx), ctx),
            b: self
                .a
                .mul(&earlier.b, ctx)
                .add(&self.b.mul(&earlier.a.conj(), ctx), ctx),
        }
    }
}

/// Full sequence propagator at pulse area error ε.
pub(crate) fn propagator(seq: &CompositeSequence, eps: &BigFloat, ctx: &mut Ctx) -> BigSu2 {
    let one_plus_eps = ctx.add(&ctx.big(1.0), eps);
    let mut total = BigSu2::identity(ctx);
    for pulse in seq.pulses() {
        // half-angle = quarter_pi · (π/8) · (1+ε)
        let scale = ctx.div(&ctx.big(f64::from(pulse.area.quarter_pi())), &ctx.big(8.0));
        let half = ctx.mul(&ctx.mul(&ctx.pi(), &scale), &one_plus_eps);
        let (sin_half, cos_half) = (ctx.sin(&half), ctx.cos(&half));
        let phi = ctx.div(
            &ctx.mul(&ctx.pi(), &ctx.big(pulse.phase.numerator() as f64)),
            &ctx.big(pulse.phase.denominator() as f64),
        );
        let (sin_phi, cos_phi) = (ctx.sin(&phi), ctx.cos(&phi));
        // b = -i sin(half) e^{iφ} = sin(half)·(sin φ - i cos φ)
        let u = BigSu2 {
            a: BigComplex {
                re: cos_half,
                im: ctx.big(0.0),
            },
            b: BigComplex {
                re: ctx.mul(&sin_half, &sin_phi),
                im: ctx.mul(&sin_half, &cos_phi).neg(),
            },
        };
        total = u.compose(&total, ctx);
    }
    total
}

/// `log₁₀ |U₁₁|²` at ε, taken while still in extended precision so values
/// far below the f64 range survive. `None` when the amplitude is exactly
/// zero.
pub(crate) fn survival_log10(seq: &CompositeSequence, eps: f64, ctx: &mut Ctx) -> Option<f64> {
    let eps = ctx.big(eps);
    let u = propagator(seq, &eps, ctx);
    let norm_sq = u.a.norm_sqr(ctx);
    if norm_sq.is_zero() || norm_sq.is_negative() {
        return None;
    }
    let log = ctx.log10(&norm_sq);
    let v = to_f64(&log);
    v.is_finite().then_some(v)
}
