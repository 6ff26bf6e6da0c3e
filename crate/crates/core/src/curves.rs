//! The conic and quartic geometry behind the first solution columns.
//!
//! `W(p,2)` is governed by the conic `1 + x^2 = 2y^2` (points give the
//! admissible `f(2)`), with the closed form `floor(p/4) + 1` obtained by
//! counting orbits of the sign-flip involutions on a rational
//! parametrization. One step further, admissible `(f(2), f(3))` pairs sit
//! on the quartic family `v^2 = Q_s(u)`, whose published coefficients are
//! hard-coded here and guarded by the `f(3)-f(2)` consistency identity.

use crate::ffield::{chi_table, OddPrime};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("denominator vanishes at t={t} mod {p}")]
    Pole { t: u64, p: u64 },
    #[error("characteristic {0} too small (need p > 3)")]
    SmallCharacteristic(u64),
    #[error("singular slice: D(s) = 0 for s={s} mod {p}")]
    SingularSlice { s: u64, p: u64 },
}

#[inline]
fn mmul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn msub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

#[inline]
fn madd(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn minv(a: u64, p: OddPrime) -> u64 {
    crate::ffield::mod_inv(a, p)
}

/// Reduce a signed constant mod p.
#[inline]
fn mconst(c: i64, p: u64) -> u64 {
    c.rem_euclid(p as i64) as u64
}

/// Horner evaluation of a polynomial with signed integer coefficients
/// (high degree first) at `s` mod p.
fn poly_mod(coeffs: &[i64], s: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .fold(0u64, |acc, &c| madd(mmul(acc, s, p), mconst(c, p), p))
}

fn poly_rat(coeffs: &[i64], s: &BigRational) -> BigRational {
    coeffs.iter().fold(BigRational::zero(), |acc, &c| {
        acc * s + BigRational::from(BigInt::from(c))
    })
}

/// A point on the conic `1 + x^2 = 2y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConicPointC {
    pub x: u64,
    pub y: u64,
}

/// A point on the conic `1 + 2Y^2 = 3X^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConicPointCprime {
    pub x: u64,
    pub y: u64,
}

/// The line-through-(1,1) parametrization of `1 + x^2 = 2y^2`.
pub fn param_c(t: u64, p: OddPrime) -> Result<ConicPointC, CurveError> {
    let pv = p.value();
    let t = t % pv;
    let den = msub(mmul(2, mmul(t, t, pv), pv), 1, pv);
    if den == 0 {
        return Err(CurveError::Pole { t, p: pv });
    }
    let di = minv(den, p);
    let num = msub(mmul(2, t, pv), 1, pv); // 2t - 1
    let x = msub(1, mmul(2, mmul(num, di, pv), pv), pv);
    let y = msub(1, mmul(mmul(2, t, pv), mmul(num, di, pv), pv), pv);
    debug_assert_eq!(
        madd(1, mmul(x, x, pv), pv),
        mmul(2, mmul(y, y, pv), pv)
    );
    Ok(ConicPointC { x, y })
}

/// Recover the parameter from a point with x != 1.
pub fn param_c_inverse(pt: ConicPointC, p: OddPrime) -> Option<u64> {
    let pv = p.value();
    if pt.x == 1 {
        return None;
    }
    Some(mmul(
        msub(pt.y, 1, pv),
        minv(msub(pt.x, 1, pv), p),
        pv,
    ))
}

/// alpha(t) = (2t-1)/(2(t-1)): the involution (x,y) -> (-x,y).
pub fn involution_alpha(t: u64, p: OddPrime) -> Result<u64, CurveError> {
    let pv = p.value();
    let t = t % pv;
    let den = mmul(2, msub(t, 1, pv), pv);
    if den == 0 {
        return Err(CurveError::Pole { t, p: pv });
    }
    Ok(mmul(msub(mmul(2, t, pv), 1, pv), minv(den, p), pv))
}

/// beta(t) = (t-1)/(2t-1): the involution (x,y) -> (x,-y).
pub fn involution_beta(t: u64, p: OddPrime) -> Result<u64, CurveError> {
    let pv = p.value();
    let t = t % pv;
    let den = msub(mmul(2, t, pv), 1, pv);
    if den == 0 {
        return Err(CurveError::Pole { t, p: pv });
    }
    Ok(mmul(msub(t, 1, pv), minv(den, p), pv))
}

/// The closed form W(p,2) = floor(p/4) + 1.
pub fn count_w2_closed_form(p: OddPrime) -> u64 {
    p.value() / 4 + 1
}

/// The line-through-(1,1) parametrization of `1 + 2Y^2 = 3X^2`.
pub fn param_c_prime(u: u64, p: OddPrime) -> Result<ConicPointCprime, CurveError> {
    let pv = p.value();
    let u = u % pv;
    let den = msub(mmul(2, mmul(u, u, pv), pv), 3, pv);
    if den == 0 {
        return Err(CurveError::Pole { t: u, p: pv });
    }
    let di = minv(den, p);
    let x = msub(1, mmul(2, mmul(msub(mmul(2, u, pv), 3, pv), di, pv), pv), pv);
    // Y = (2u^2 - 6u + 3)/(3 - 2u^2)
    let num = poly_mod(&[2, -6, 3], u, pv);
    let y = mmul(num, minv(msub(0, den, pv), p), pv);
    debug_assert_eq!(
        madd(1, mmul(2, mmul(y, y, pv), pv), pv),
        mmul(3, mmul(x, x, pv), pv)
    );
    Ok(ConicPointCprime { x, y })
}

// The published coefficient polynomials of Q_s(u), high degree first in s.
const POLY_A: [i64; 5] = [4, 16, -28, 8, 1]; // 4s^4+16s^3-28s^2+8s+1
const POLY_B: [i64; 3] = [2, 0, -1]; // 2s^2-1
const POLY_C2: [i64; 5] = [36, -16, -12, -8, 9]; // 36s^4-16s^3-12s^2-8s+9
const POLY_DISC1: [i64; 3] = [2, -4, 1]; // 2s^2-4s+1
const POLY_DISC2: [i64; 3] = [2, -2, 1]; // 2s^2-2s+1

/// The quartic `Q_s(u)` at a parameter `s` mod p, with its discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarticSliceMod {
    pub s: u64,
    pub p: u64,
    /// (c4, c3, c2, c1, c0)
    pub coeffs: [u64; 5],
    pub disc: u64,
}

pub fn quartic_slice_mod(s: u64, p: OddPrime) -> Result<QuarticSliceMod, CurveError> {
    let pv = p.value();
    if pv <= 3 {
        return Err(CurveError::SmallCharacteristic(pv));
    }
    let s = s % pv;
    let a = poly_mod(&POLY_A, s, pv);
    let b = poly_mod(&POLY_B, s, pv);
    let b2 = mmul(b, b, pv);
    let coeffs = [
        mmul(4, a, pv),
        msub(0, mmul(48, b2, pv), pv),
        mmul(12, poly_mod(&POLY_C2, s, pv), pv),
        msub(0, mmul(72, b2, pv), pv),
        mmul(9, a, pv),
    ];
    let c = poly_mod(&POLY_DISC1, s, pv);
    let d = poly_mod(&POLY_DISC2, s, pv);
    let lead = mmul(mod_pow_u64(2, 20, pv), mod_pow_u64(3, 6, pv), pv);
    let prod = mmul(mmul(b, c, pv), d, pv);
    let disc = mmul(lead, mod_pow_u64(prod, 4, pv), pv);
    Ok(QuarticSliceMod {
        s,
        p: pv,
        coeffs,
        disc,
    })
}

fn mod_pow_u64(b: u64, e: u64, p: u64) -> u64 {
    crate::ffield::mod_pow(b, e, p)
}

/// The quartic slice over the rationals, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticSliceRat {
    pub s: BigRational,
    pub coeffs: [BigRational; 5],
    pub disc: BigRational,
}

pub fn quartic_slice(s: &BigRational) -> QuarticSliceRat {
    let int = |n: i64| BigRational::from(BigInt::from(n));
    let a = poly_rat(&POLY_A, s);
    let b = poly_rat(&POLY_B, s);
    let b2 = &b * &b;
    let coeffs = [
        int(4) * &a,
        int(-48) * &b2,
        int(12) * poly_rat(&POLY_C2, s),
        int(-72) * &b2,
        int(9) * &a,
    ];
    let prod = &b * poly_rat(&POLY_DISC1, s) * poly_rat(&POLY_DISC2, s);
    let p4 = {
        let p2 = &prod * &prod;
        &p2 * &p2
    };
    let disc = int(1 << 20) * int(729) * p4;
    QuarticSliceRat {
        s: s.clone(),
        coeffs,
        disc,
    }
}

/// Evaluate `Q_s(u)` mod p.
pub fn quartic_eval_mod(slice: &QuarticSliceMod, u: u64) -> u64 {
    let p = slice.p;
    slice
        .coeffs
        .iter()
        .fold(0u64, |acc, &c| madd(mmul(acc, u % p, p), c, p))
}

/// Affine point count of `v^2 = Q_s(u)` over `F_p`, with the trace under
/// the convention that infinity contributes 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointCount {
    pub s: u64,
    pub p: u64,
    pub affine_count: u64,
    pub trace_estimate: i64,
    /// Character of the leading coefficient; records the split/inert
    /// behavior of the two points at infinity.
    pub chi_c4: i8,
}

pub fn count_affine_points(s: u64, p: OddPrime) -> Result<PointCount, CurveError> {
    let slice = quartic_slice_mod(s, p)?;
    if slice.disc == 0 {
        return Err(CurveError::SingularSlice {
            s: slice.s,
            p: slice.p,
        });
    }
    let pv = p.value();
    let chi = chi_table(p);
    let mut affine = 0u64;
    for u in 0..pv {
        let q = quartic_eval_mod(&slice, u);
        affine = (affine as i64 + 1 + chi[q as usize] as i64) as u64;
    }
    Ok(PointCount {
        s: slice.s,
        p: pv,
        affine_count: affine,
        trace_estimate: pv as i64 - 1 - affine as i64,
        chi_c4: chi[slice.coeffs[0] as usize],
    })
}

/// `f(2)` determined by the parameter s: `x^2 + 1` at `P(s)`.
pub fn f2_from_param(s: u64, p: OddPrime) -> Result<u64, CurveError> {
    let pt = param_c(s, p)?;
    Ok(madd(mmul(pt.x, pt.x, p.value()), 1, p.value()))
}

/// `f(3)` determined by the parameter u: `3 X^2` at `R(u)`.
pub fn f3_from_param(u: u64, p: OddPrime) -> Result<u64, CurveError> {
    let pt = param_c_prime(u, p)?;
    Ok(mmul(3, mmul(pt.x, pt.x, p.value()), p.value()))
}

/// Check the defining identity
/// `f(3) - f(2) = Q_s(u) / ((2s^2-1)^2 (2u^2-3)^2)` mod p.
pub fn f3_minus_f2_consistent(s: u64, u: u64, p: OddPrime) -> Result<bool, CurveError> {
    let pv = p.value();
    let slice = quartic_slice_mod(s, p)?;
    let f2 = f2_from_param(s, p)?;
    let f3 = f3_from_param(u, p)?;
    let bs = poly_mod(&POLY_B, s % pv, pv);
    let bu = msub(mmul(2, mmul(u % pv, u % pv, pv), pv), 3, pv);
    let scale = mmul(mmul(bs, bs, pv), mmul(bu, bu, pv), pv);
    Ok(mmul(msub(f3, f2, pv), scale, pv) == quartic_eval_mod(&slice, u))
}
