//! Numerical certification of the closed-form identities behind the twin
//! profiles.
//!
//! The survival amplitude `U₁₁(ε)` of a type-1 twin is a polynomial of
//! degree N-1 in `s = sin²(πε/2)`; for types 2 and 3 it is `sin(πε/2)`
//! times such a polynomial. The coefficients `Z₁…Z_N` are recovered here by
//! interpolation at Chebyshev-spaced nodes and checked against the claimed
//! structure: a single coefficient of unit magnitude in front of the top
//! power, everything else zero. The interpolation nodes, the propagator
//! products, and the linear solve all run in extended precision: the node
//! system's conditioning and the amplitude cancellations both exceed what
//! double precision can resolve by N = 12.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::analysis::sequence_propagator;
use crate::bigprop::{self, BigComplex, Ctx};
use crate::error::{Error, Result};
use crate::sequence::{build_twin, Family};

/// Acceptance bound on extracted coefficients: `|Z_top - 1|` (type 1),
/// `||Z_top| - 1|` (types 2/3), and every off coefficient.
pub const Z_COEFF_TOL: f64 = 1e-9;

/// Bound on the closed-form product deviating from 1.
pub const ZN_CLOSED_FORM_TOL: f64 = 1e-12;

/// Relative bound on the Chebyshev cosine product identity.
pub const CHEBYSHEV_REL_TOL: f64 = 1e-13;

/// Bound on the pointwise survival-profile identity.
pub const PROFILE_IDENTITY_TOL: f64 = 1e-9;

/// Re-evaluation residual above which the extraction is rejected outright.
const REEVAL_LIMIT: f64 = 1e-8;

const FRESH_POINTS: usize = 50;
const PROFILE_GRID_POINTS: usize = 101;

/// `∏_{j=1..n} cos((2j-1)π/(4n))`; equals `√2 / 2ⁿ`.
pub fn chebyshev_cos_product(n: u32) -> f64 {
    assert!(n >= 1, "product needs at least one factor");
    (1..=n)
        .map(|j| ((2 * j - 1) as f64 * PI / (4 * n) as f64).cos())
        .product()
}

/// Closed form `√2 / 2ⁿ` of the cosine product.
pub fn chebyshev_closed_form(n: u32) -> f64 {
    std::f64::consts::SQRT_2 / 2f64.powi(n as i32)
}

/// The closed-form top coefficient
/// `Z_N = ½·2^{2(N-1)} ∏_{j=1..N-1} cos²((2j-1)π/(4(N-1)))`;
/// equals 1 for every N ≥ 2.
pub fn z_n_closed_form(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let m = n - 1;
    let product: f64 = (1..=m)
        .map(|j| ((2 * j - 1) as f64 * PI / (4 * m) as f64).cos().powi(2))
        .product();
    Ok(0.5 * 4f64.powi(m as i32) * product)
}

/// Coefficients recovered from the survival amplitude, plus the residuals
/// that qualify them.
#[derive(Debug, Clone)]
pub struct ZExtraction {
    /// `Z₁ … Z_N`: coefficients of `s⁰ … s^{N-1}`.
    pub z: Vec<Complex64>,
    /// Largest magnitude of the parity component the model says must
    /// vanish (odd part for type 1, even part for types 2/3), measured at
    /// the interpolation nodes.
    pub structure_residual: f64,
    /// Largest |polynomial - U₁₁| over 50 fresh ε points.
    pub reeval_residual: f64,
}

/// Recovers `Z₁…Z_N` for a twin family member by interpolation at N
/// Chebyshev nodes in `s ∈ (0.05, 0.95)`.
///
/// The amplitude is first split into even and odd parts in `t = sin(πε/2)`
/// by evaluating at ±ε, which both measures the expected parity structure
/// and reduces the fit to a degree-(N-1) system in `s = t²`.
pub fn extract_z_coefficients(family: Family, n: u32) -> Result<ZExtraction> {
    let seq = build_twin(family, n)?;
    let mut ctx = Ctx::for_sequence(&seq);
    let dim = n as usize;

    let half = ctx.big(0.5);
    let two_over_pi = ctx.div(&ctx.big(2.0), &ctx.pi());
    let mut s_nodes = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    let mut structure_residual: f64 = 0.0;
    for i in 1..=dim {
        // s = 1/2 + 0.45·cos((2i-1)π/(2N))
        let angle = ctx.div(
            &ctx.mul(&ctx.big((2 * i - 1) as f64), &ctx.pi()),
            &ctx.big(2.0 * n as f64),
        );
        let cos_angle = ctx.cos(&angle);
        let s = ctx.add(&half, &ctx.mul(&ctx.big(0.45), &cos_angle));
        let t = ctx.sqrt(&s);
        let asin_t = ctx.asin(&t);
        let eps = ctx.mul(&two_over_pi, &asin_t);
        let u_plus = bigprop::propagator(&seq, &eps, &mut ctx).a;
        let u_minus = bigprop::propagator(&seq, &eps.neg(), &mut ctx).a;
        let even = u_plus.add(&u_minus, &ctx).scale(&half, &ctx);
        let odd = u_plus.sub(&u_minus, &ctx).scale(&half, &ctx);
        let (wanted, vanishing) = match family {
            Family::Type1 => (even, odd),
            Family::Type2 | Family::Type3 => (odd.scale(&ctx.div(&ctx.big(1.0), &t), &ctx), even),
        };
        structure_residual =
            structure_residual.max(bigprop::to_f64(&vanishing.norm_sqr(&ctx)).sqrt());
        s_nodes.push(s);
        rhs.push(wanted);
    }

    let z_big = solve_vandermonde(&s_nodes, rhs, &ctx);
    let z: Vec<Complex64> = z_big.iter().map(BigComplex::to_c64).collect();

    // fresh-point check of the recovered polynomial against the plain
    // double-precision product
    let mut reeval_residual: f64 = 0.0;
    for j in 0..FRESH_POINTS {
        let eps = -0.97 + 1.94 * j as f64 / (FRESH_POINTS - 1) as f64;
        let t = (0.5 * PI * eps).sin();
        let s = t * t;
        let mut poly = Complex64::new(0.0, 0.0);
        for &c in z.iter().rev() {
            poly = poly * s + c;
        }
        if family != Family::Type1 {
            poly *= t;
        }
        let u11 = sequence_propagator(&seq, eps).a;
        reeval_residual = reeval_residual.max((poly - u11).norm());
    }

    let worst = structure_residual.max(reeval_residual);
    if worst > REEVAL_LIMIT {
        return Err(Error::IllConditioned(worst));
    }
    Ok(ZExtraction {
        z,
        structure_residual,
        reeval_residual,
    })
}

/// Solves `V c = rhs` for the monomial coefficients of the interpolating
/// polynomial, where `V[i][j] = s_i^j`. Gaussian elimination with partial
/// pivoting; the matrix is real, so the complex right-hand side rides along
/// as two extra columns.
#[allow(clippy::needless_range_loop)] // elimination touches two rows of v at once
fn solve_vandermonde(s_nodes: &[astro_float::BigFloat], rhs: Vec<BigComplex>, ctx: &Ctx) -> Vec<BigComplex> {
    let dim = s_nodes.len();
    let mut v: Vec<Vec<astro_float::BigFloat>> = Vec::with_capacity(dim);
    for s in s_nodes {
        let mut row = Vec::with_capacity(dim);
        let mut power = ctx.big(1.0);
        for _ in 0..dim {
            row.push(power.clone());
            power = ctx.mul(&power, s);
        }
        v.push(row);
    }
    let mut rhs = rhs;
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r1, &r2| {
                let sign = v[r1][col].abs_cmp(&v[r2][col]).expect("finite entries");
                sign.cmp(&0)
            })
            .expect("nonempty column");
        v.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..dim {
            let factor = ctx.div(&v[row][col], &v[col][col]);
            for k in col..dim {
                let sub = ctx.mul(&factor, &v[col][k]);
                v[row][k] = ctx.sub(&v[row][k], &sub);
            }
            let scaled = rhs[col].scale(&factor, ctx);
            rhs[row] = rhs[row].sub(&scaled, ctx);
        }
    }
    let zero = BigComplex::from_f64(0.0, 0.0, ctx);
    let mut coeffs = vec![zero; dim];
    for col in (0..dim).rev() {
        let mut acc = rhs[col].clone();
        for k in col + 1..dim {
            let sub = coeffs[k].scale(&v[col][k], ctx);
            acc = acc.sub(&sub, ctx);
        }
        coeffs[col] = acc.scale(&ctx.div(&ctx.big(1.0), &v[col][col]), ctx);
    }
    coeffs
}

/// Bundle of every identity check for one family member.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub family: String,
    pub n: u32,
    /// `Z₁ … Z_N` as `[re, im]` pairs.
    #[serde(rename = "z")]
    pub z_coefficients: Vec<[f64; 2]>,
    pub z_n_closed_form: [f64; 2],
    /// Relative residual of the cosine product identity at index n.
    pub chebyshev_residual: f64,
    /// Largest magnitude among `Z₁ … Z_{N-1}`.
    pub max_off_coefficient: f64,
    /// `|Z_N - 1|` for type 1, `||Z_N| - 1|` for types 2/3.
    pub top_coefficient_error: f64,
    /// Largest |polynomial - U₁₁| over 50 fresh ε points.
    pub reeval_residual: f64,
    /// Largest pointwise gap between the survival probability and
    /// `sin^e(πε/2)` on a 101-point ε grid.
    pub profile_residual: f64,
    pub passed: bool,
}

/// Runs every appendix-level check for one twin family member and reports
/// each residual; `passed` is the conjunction of all tolerance gates.
pub fn verify_appendix(family: Family, n: u32) -> Result<IdentityReport> {
    let extraction = extract_z_coefficients(family, n)?;
    let dim = n as usize;
    let max_off = extraction.z[..dim - 1]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let top = extraction.z[dim - 1];
    let top_error = match family {
        Family::Type1 => (top - Complex64::new(1.0, 0.0)).norm(),
        Family::Type2 | Family::Type3 => (top.norm() - 1.0).abs(),
    };

    let zn = z_n_closed_form(n)?;
    let zn_error = (zn - 1.0).abs();
    let cheb_residual = (chebyshev_cos_product(n) - chebyshev_closed_form(n)).abs()
        / chebyshev_closed_form(n);

    let seq = build_twin(family, n)?;
    let exponent = family.profile_exponent(n) as i32;
    let mut profile_residual: f64 = 0.0;
    for i in 0..PROFILE_GRID_POINTS {
        let eps = -1.0 + 2.0 * i as f64 / (PROFILE_GRID_POINTS - 1) as f64;
        let survival = sequence_propagator(&seq, eps).survival_probability();
        let formula = (0.5 * PI * eps).sin().powi(exponent);
        profile_residual = profile_residual.max((survival - formula).abs());
    }

    let passed = top_error < Z_COEFF_TOL
        && max_off < Z_COEFF_TOL
        && zn_error < ZN_CLOSED_FORM_TOL
        && cheb_residual < CHEBYSHEV_REL_TOL
        && profile_residual < PROFILE_IDENTITY_TOL
        && extraction.reeval_residual < PROFILE_IDENTITY_TOL;

    Ok(IdentityReport {
        family: family.to_string(),
        n,
        z_coefficients: extraction.z.iter().map(|c| [c.re, c.im]).collect(),
        z_n_closed_form: [zn, 0.0],
        chebyshev_residual: cheb_residual,
        max_off_coefficient: max_off,
        top_coefficient_error: top_error,
        reeval_residual: extraction.reeval_residual,
        profile_residual,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_product_small_cases() {
        assert!((chebyshev_cos_product(1) - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        let want = (PI / 8.0).cos() * (3.0 * PI / 8.0).cos();
        assert!((chebyshev_cos_product(2) - want).abs() < 1e-15);
        assert!((want - std::f64::consts::SQRT_2 / 4.0).abs() < 1e-15);
        assert!((chebyshev_cos_product(10) - std::f64::consts::SQRT_2 / 1024.0).abs() < 1e-16);
    }

    #[test]
    fn chebyshev_product_identity_to_30() {
        for n in 1..=30 {
            let rel = (chebyshev_cos_product(n) - chebyshev_closed_form(n)).abs()
                / chebyshev_closed_form(n);
            assert!(rel < CHEBYSHEV_REL_TOL, "n={n}: rel residual {rel:e}");
        }
    }

    #[test]
    fn z_n_closed_form_is_unity() {
        assert!((z_n_closed_form(2).unwrap() - 1.0).abs() < 1e-15);
        let explicit = 0.5 * 16.0 * (PI / 8.0).cos().powi(2) * (3.0 * PI / 8.0).cos().powi(2);
        assert!((z_n_closed_form(3).unwrap() - explicit).abs() < 1e-15);
        for n in 2..=30 {
            let v = z_n_closed_form(n).unwrap();
            assert!((v - 1.0).abs() < ZN_CLOSED_FORM_TOL, "n={n}: {v}");
        }
        assert!(z_n_closed_form(1).is_err());
    }

    #[test]
    fn extraction_type1_smallest() {
        let ext = extract_z_coefficients(Family::Type1, 2).unwrap();
        assert!((ext.z[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(ext.z[0].norm() < 1e-12);
        assert!(ext.structure_residual < 1e-12);
    }

    #[test]
    fn extraction_type1_n3() {
        let ext = extract_z_coefficients(Family::Type1, 3).unwrap();
        assert!((ext.z[2] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(ext.z[0].norm() < 1e-9 && ext.z[1].norm() < 1e-9);
        assert!(ext.reeval_residual < 1e-9);
    }

    #[test]
    fn extraction_type2_n4_unit_top() {
        let ext = extract_z_coefficients(Family::Type2, 4).unwrap();
        assert!((ext.z[3].norm() - 1.0).abs() < 1e-9);
        for j in 0..3 {
            assert!(ext.z[j].norm() < 1e-9, "Z_{} = {}", j + 1, ext.z[j]);
        }
    }

    #[test]
    fn report_type1_n5_passes() {
        let report = verify_appendix(Family::Type1, 5).unwrap();
        assert!(report.passed);
        assert!(report.max_off_coefficient < 1e-9);
        assert!(report.top_coefficient_error < 1e-9);
        assert!(report.profile_residual < 1e-9);
    }

    #[test]
    fn report_type3_n3_matches_survival_formula() {
        let report = verify_appendix(Family::Type3, 3).unwrap();
        assert!(report.passed);
        assert!(report.profile_residual < 1e-12);
    }

    #[test]
    fn report_serializes_with_schema_fields() {
        let report = verify_appendix(Family::Type1, 2).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        for key in [
            "\"family\"",
            "\"n\"",
            "\"z\"",
            "\"z_n_closed_form\"",
            "\"chebyshev_residual\"",
            "\"max_off_coefficient\"",
            "\"passed\"",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
