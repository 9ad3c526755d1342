//! Twist dynamics: the Ω₁,₂ slice maps (e = 0) and Vieta involutions on
//! the trace-coordinate variety (e = ±1).

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ser_display, Scalar};

/// A point (a, 1 − a, c, d) of the slice Ω₁,₂.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct OmegaPoint<T> {
    #[serde(serialize_with = "ser_display")]
    pub a: T,
    #[serde(serialize_with = "ser_display")]
    pub c: T,
    #[serde(serialize_with = "ser_display")]
    pub d: T,
}

impl<T: Scalar> OmegaPoint<T> {
    pub fn new(a: T, c: T, d: T) -> Result<Self> {
        if !(a.is_positive() && a < T::one() && c.is_positive() && d.is_positive()) {
            return Err(Error::InvalidInput("need 0 < a < 1 and c, d > 0".into()));
        }
        if (c.clone() + d.clone()).near(&T::one()) {
            return Err(Error::InvalidInput("slice condition c + d ≠ 1".into()));
        }
        Ok(Self { a, c, d })
    }
}

/// S₃: c ↦ (d − 1)²/c.
pub fn s3<T: Scalar>(p: &OmegaPoint<T>) -> Result<OmegaPoint<T>> {
    if p.c.is_zero() {
        return Err(Error::DivByZero);
    }
    let m = p.d.clone() - T::one();
    Ok(OmegaPoint { c: m.clone() * m / p.c.clone(), ..p.clone() })
}

/// S₄: d ↦ (c − 1)²/d.
pub fn s4<T: Scalar>(p: &OmegaPoint<T>) -> Result<OmegaPoint<T>> {
    if p.d.is_zero() {
        return Err(Error::DivByZero);
    }
    let m = p.c.clone() - T::one();
    Ok(OmegaPoint { d: m.clone() * m / p.d.clone(), ..p.clone() })
}

/// τ₃,₄ = S₃ ∘ S₄.
pub fn twist34<T: Scalar>(p: &OmegaPoint<T>) -> Result<OmegaPoint<T>> {
    s3(&s4(p)?)
}

/// k with (c + d − 1)² = (k + 2)cd.
pub fn ellipse_k<T: Scalar>(p: &OmegaPoint<T>) -> Result<T> {
    let cd = p.c.clone() * p.d.clone();
    if cd.is_zero() {
        return Err(Error::DivByZero);
    }
    let s = p.c.clone() + p.d.clone() - T::one();
    Ok(s.clone() * s / cd - T::from_int(2))
}

/// [p, τ(p), …, τⁿ(p)].
pub fn twist34_orbit<T: Scalar>(p: &OmegaPoint<T>, n: usize) -> Result<Vec<OmegaPoint<T>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.clone());
    for _ in 0..n {
        let next = twist34(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// The second coordinate d on the conic E_k for a given c (two branches).
pub fn ellipse_point(a: f64, c: f64, k: f64, upper: bool) -> Result<OmegaPoint<f64>> {
    // d² + d(2(c − 1) − (k + 2)c) + (c − 1)² = 0
    let b = 2.0 * (c - 1.0) - (k + 2.0) * c;
    let disc = b * b - 4.0 * (c - 1.0) * (c - 1.0);
    if disc < 0.0 {
        return Err(Error::NoRealSolution);
    }
    let r = disc.sqrt();
    let d = if upper { (-b + r) / 2.0 } else { (-b - r) / 2.0 };
    OmegaPoint::new(a, c, d)
}

/// Average angular increment of an orbit on the ellipse E_k, in turns.
///
/// The ellipse is centred at c = d = 2/(2 − k); rotating by 45° and scaling
/// the axes by √(1 ∓ k/2) maps it to a circle, where increments are measured
/// in [0, 2π).
pub fn rotation_number_estimate(orbit: &[OmegaPoint<f64>]) -> Result<f64> {
    if orbit.len() < 16 {
        return Err(Error::ShortOrbit(orbit.len()));
    }
    let k = ellipse_k(&orbit[0])?;
    if !(-2.0..2.0).contains(&k) {
        return Err(Error::InvalidInput(format!("k = {k} is not elliptic")));
    }
    let c0 = 2.0 / (2.0 - k);
    let (sx, sy) = ((1.0 - k / 2.0).sqrt(), (1.0 + k / 2.0).sqrt());
    let angle = |p: &OmegaPoint<f64>| {
        let (u, v) = (p.c - c0, p.d - c0);
        let sigma = (u + v) / std::f64::consts::SQRT_2;
        let delta = (u - v) / std::f64::consts::SQRT_2;
        (delta * sy).atan2(sigma * sx)
    };
    let mut total = 0.0;
    let mut prev = angle(&orbit[0]);
    for p in &orbit[1..] {
        let a = angle(p);
        total += (a - prev).rem_euclid(TAU);
        prev = a;
    }
    Ok(total / (orbit.len() - 1) as f64 / TAU)
}

/// Trace coordinates (a, b, c, d, x, y, z) of the e = ±1 variety.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct TraceCoords<T> {
    #[serde(serialize_with = "ser_display")]
    pub a: T,
    #[serde(serialize_with = "ser_display")]
    pub b: T,
    #[serde(serialize_with = "ser_display")]
    pub c: T,
    #[serde(serialize_with = "ser_display")]
    pub d: T,
    #[serde(serialize_with = "ser_display")]
    pub x: T,
    #[serde(serialize_with = "ser_display")]
    pub y: T,
    #[serde(serialize_with = "ser_display")]
    pub z: T,
}

impl<T: Scalar> TraceCoords<T> {
    pub fn from_array(v: [T; 7]) -> Self {
        let [a, b, c, d, x, y, z] = v;
        Self { a, b, c, d, x, y, z }
    }

    pub fn from_ints(v: [i64; 7]) -> Self {
        Self::from_array(v.map(T::from_int))
    }

    pub fn to_array(&self) -> [T; 7] {
        [&self.a, &self.b, &self.c, &self.d, &self.x, &self.y, &self.z].map(|v| v.clone())
    }

    /// A point of the normalized variety: (0, 0, 0, 4, 2, 2, 2).
    pub fn base_point() -> Self {
        Self::from_ints([0, 0, 0, 4, 2, 2, 2])
    }
}

/// −a²−b²−c²−d²+x²+y²+z²+(ab+cd)x+(ad+bc)y+(ac+bd)z+abcd+xyz−4.
pub fn relation_residual<T: Scalar>(t: &TraceCoords<T>) -> T {
    let [a, b, c, d, x, y, z] = t.to_array();
    let sq = |v: &T| v.clone() * v.clone();
    -sq(&a) - sq(&b) - sq(&c) - sq(&d) + sq(&x) + sq(&y) + sq(&z)
        + (a.clone() * b.clone() + c.clone() * d.clone()) * x.clone()
        + (a.clone() * d.clone() + b.clone() * c.clone()) * y.clone()
        + (a.clone() * c.clone() + b.clone() * d.clone()) * z.clone()
        + a * b * c * d
        + x * y * z
        - T::from_int(4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Solves d² − d[2(a+b−c) + (ab+4)c] + (a+b−c)² − 4(ab+4) = 0 with
/// x = y = z = 2. Exact backends need a perfect-square discriminant.
pub fn solve_d<T: Scalar>(a: T, b: T, c: T, branch: Branch) -> Result<TraceCoords<T>> {
    let two = T::from_int(2);
    let four = T::from_int(4);
    let s = a.clone() + b.clone() - c.clone();
    let ab4 = a.clone() * b.clone() + four.clone();
    let bb = two.clone() * s.clone() + ab4.clone() * c.clone();
    let cc = s.clone() * s - four.clone() * ab4;
    let disc = bb.clone() * bb.clone() - four * cc;
    if disc.is_negative() {
        return Err(Error::NoRealSolution);
    }
    let r = disc
        .sqrt_checked()
        .ok_or_else(|| Error::Unsupported("irrational root in an exact backend".into()))?;
    let d = match branch {
        Branch::Plus => (bb + r) / two.clone(),
        Branch::Minus => (bb - r) / two.clone(),
    };
    Ok(TraceCoords { a, b, c, d, x: two.clone(), y: two.clone(), z: two })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    A,
    B,
    C,
    D,
}

/// Replaces one of a, b, c, d by the other root of the relation viewed as a
/// quadratic in that variable.
pub fn vieta_flip<T: Scalar>(t: &TraceCoords<T>, var: Var) -> TraceCoords<T> {
    let [a, b, c, d, x, y, z] = t.to_array();
    let mut out = t.clone();
    match var {
        Var::A => out.a = b.clone() * x + d.clone() * y + c.clone() * z + b * c * d - a,
        Var::B => out.b = a.clone() * x + c.clone() * y + d.clone() * z + a * c * d - b,
        Var::C => out.c = d.clone() * x + b.clone() * y + a.clone() * z + a * b * d - c,
        Var::D => out.d = c.clone() * x + a.clone() * y + b.clone() * z + a * b * c - d,
    }
    out
}

/// Sign of xyz for x, y, z ∈ {±2}.
pub fn euler_sign_bg<T: Scalar>(t: &TraceCoords<T>) -> Result<i8> {
    let two = T::from_int(2);
    let mut sign = 1i8;
    for v in [&t.x, &t.y, &t.z] {
        if !v.abs().near(&two) {
            return Err(Error::InvalidInput("x, y, z must be ±2".into()));
        }
        if v.is_negative() {
            sign = -sign;
        }
    }
    Ok(sign)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    A,
    B,
    C,
}

/// Action of the central character negating one free generator.
pub fn central_character<T: Scalar>(t: &TraceCoords<T>, g: Generator) -> TraceCoords<T> {
    let pattern: [i8; 7] = match g {
        Generator::A => [-1, 1, 1, -1, -1, 1, -1],
        Generator::B => [1, -1, 1, -1, -1, -1, 1],
        Generator::C => [1, 1, -1, -1, 1, -1, -1],
    };
    let v = t.to_array();
    TraceCoords::from_array(std::array::from_fn(|i| {
        if pattern[i] < 0 {
            -v[i].clone()
        } else {
            v[i].clone()
        }
    }))
}

/// −(ab+2), −(cd+2), −(bc+2), −(ad+2), −(ac+2), −(bd+2).
pub fn elliptic_products<T: Scalar>(t: &TraceCoords<T>) -> [T; 6] {
    let p = |u: &T, v: &T| -(u.clone() * v.clone() + T::from_int(2));
    [p(&t.a, &t.b), p(&t.c, &t.d), p(&t.b, &t.c), p(&t.a, &t.d), p(&t.a, &t.c), p(&t.b, &t.d)]
}

/// True when one of the elliptic products lies in (−2, 2).
pub fn ellipse_path_enabled<T: Scalar>(t: &TraceCoords<T>) -> bool {
    let two = T::from_int(2);
    elliptic_products(t).iter().any(|v| v.abs() < two)
}
