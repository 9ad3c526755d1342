//! Number backends.
//!
//! Everything rational in X (classification, switches, closed-form traces)
//! is written once against [`Scalar`] and runs either exactly over
//! [`BigRational`] or approximately over `f64`/`f32`.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// A field element with sign tests.
///
/// Exact backends have zero tolerance; float backends compare with a
/// relative tolerance so that `sign` and `near` are stable under rounding.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True for backends where every comparison is exact.
    const EXACT: bool;

    /// Comparison tolerance (zero for exact backends).
    fn tolerance() -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer conversion")
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_int(p) / Self::from_int(q)
    }

    /// Lossy conversion used for reporting and for float-only algorithms.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Parse "p/q", an integer or a decimal literal.
    fn parse_str(s: &str) -> Option<Self>;

    /// Square root when it exists in the backend (exact: perfect squares only).
    fn sqrt_checked(&self) -> Option<Self>;

    /// Sign with tolerance: 0 when `|self|` is within tolerance of zero.
    fn sign_tol(&self) -> i8 {
        self.sign_rel(1.0)
    }

    /// Sign with tolerance scaled by `scale` (the magnitude of the operands
    /// that produced `self`).
    fn sign_rel(&self, scale: f64) -> i8 {
        if Self::EXACT {
            return if self.is_zero() { 0 } else if self.is_positive() { 1 } else { -1 };
        }
        let v = self.to_f64_lossy();
        if v.abs() <= Self::tolerance() * scale.abs().max(1.0) {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Tolerant three-way comparison.
    fn cmp_tol(&self, other: &Self) -> Ordering {
        let scale = self.to_f64_lossy().abs().max(other.to_f64_lossy().abs());
        match (self.clone() - other.clone()).sign_rel(scale) {
            0 => Ordering::Equal,
            1 => Ordering::Greater,
            _ => Ordering::Less,
        }
    }

    fn near(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> f64 {
        1e-9
    }

    fn parse_str(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
            None => s.trim().parse().ok(),
        }
    }

    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> f64 {
        1e-5
    }

    fn parse_str(s: &str) -> Option<Self> {
        f64::parse_str(s).map(|v| v as f32)
    }

    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> f64 {
        0.0
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            return Some(BigRational::new(p.trim().parse().ok()?, q));
        }
        parse_decimal(s)
    }

    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
    }
}

/// Exact value of a decimal literal such as "-12.0625" or "3e-2".
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Serde helper: write a scalar through its `Display` form ("p/q" for
/// rationals).
pub fn ser_display<T: Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ser_opt_display<T: Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

pub fn ser_opt_array<T: Display, S: serde::Serializer, const N: usize>(
    v: &Option<[T; N]>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(a) => s.collect_seq(a.iter().map(|x| x.to_string())),
        None => s.serialize_none(),
    }
}

/// Nearest rational with denominator `2^bits` (used to keep sampled
/// coordinates at bounded height).
pub fn rationalize(x: f64, bits: u32) -> BigRational {
    let den = BigInt::one() << bits;
    let num = BigInt::from_f64((x * 2f64.powi(bits as i32)).round()).expect("finite float");
    BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::from_ratio(p, r)
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(BigRational::parse_str("3/6"), Some(q(1, 2)));
        assert_eq!(BigRational::parse_str("-2"), Some(q(-2, 1)));
        assert_eq!(BigRational::parse_str("0.125"), Some(q(1, 8)));
        assert_eq!(BigRational::parse_str("1.5e2"), Some(q(150, 1)));
        assert_eq!(BigRational::parse_str("1/0"), None);
        assert_eq!(BigRational::parse_str("abc"), None);
        assert_eq!(f64::parse_str("1/4"), Some(0.25));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(q(9, 4).sqrt_checked(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_checked(), None);
        assert_eq!(q(-1, 1).sqrt_checked(), None);
    }

    #[test]
    fn tolerant_signs() {
        assert_eq!(1e-12f64.sign_tol(), 0);
        assert_eq!((-1e-3f64).sign_tol(), -1);
        assert_eq!(q(1, 1_000_000_000_000).sign_tol(), 1);
        assert!((1.0f64 + 1e-12).near(&1.0));
    }

    #[test]
    fn rationalize_bounds_denominator() {
        let r = rationalize(0.3, 32);
        assert!(r.denom() <= &(BigInt::one() << 32));
        assert!((r.to_f64().unwrap() - 0.3).abs() < 1e-9);
    }
}
