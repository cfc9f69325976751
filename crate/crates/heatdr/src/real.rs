//! Thin helpers around multiprecision floats.
//!
//! The whole crate computes with [`rug::Float`] at an explicit precision in
//! bits. Default working precision is 113 bits (quad precision); oracle and
//! cross-check code runs at 160 bits or more.

use num_bigint::BigInt;
use num_rational::BigRational;
use rug::ops::{CompleteRound, Pow};
use rug::{Float, Integer};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 113;

/// A fresh float of precision `prec` with value `v`.
pub fn fl<T>(prec: u32, v: T) -> Float
where
    Float: rug::Assign<T>,
{
    Float::with_val(prec, v)
}

/// π at precision `prec`.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// `base^e` for a possibly negative integer exponent.
pub fn powi(base: &Float, e: i64) -> Float {
    let p = base.prec();
    let mut out = Float::with_val(p, base.pow(Integer::from(e.unsigned_abs())));
    if e < 0 {
        out = fl(p, 1) / out;
    }
    out
}

/// `2^x` for rational `x = num/2` style half-integer exponents and beyond.
pub fn two_pow(prec: u32, num: i64, den: i64) -> Float {
    let x = fl(prec, num) / fl(prec, den);
    x.exp2()
}

fn bigint_to_integer(v: &BigInt) -> Integer {
    let (sign, bytes) = v.to_bytes_le();
    let mut out = Integer::from_digits(&bytes, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        out = -out;
    }
    out
}

/// Exact conversion of a big rational to a float at precision `prec`.
pub fn rat_to_float(prec: u32, v: &BigRational) -> Float {
    let n = bigint_to_integer(v.numer());
    let d = bigint_to_integer(v.denom());
    let fd = Float::with_val(prec, d);
    Float::with_val(prec, n) / fd
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both vanish.
pub fn rel_diff(a: &Float, b: &Float) -> Float {
    let p = a.prec().max(b.prec());
    let num = (a - b).complete(p).abs();
    let den = a
        .clone()
        .abs()
        .max(&b.clone().abs());
    if den.is_zero() {
        num
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_conversion_is_exact() {
        let v = BigRational::new(BigInt::from(-3), BigInt::from(8));
        let f = rat_to_float(113, &v);
        assert_eq!(f, Float::with_val(113, -0.375));
        let one = BigRational::one();
        assert_eq!(rat_to_float(64, &one), 1);
    }

    #[test]
    fn integer_powers() {
        let b = fl(113, 3);
        assert_eq!(powi(&b, 4), 81);
        let inv = powi(&b, -2);
        let want = fl(113, 1) / 9u32;
        assert!(rel_diff(&inv, &want).to_f64() < 1e-30);
    }
}
