//! Matrix-product trace engine for standard-position curves, closed forms
//! for the six edge curves, parabolic signs and the domination comparison.

use std::cmp::Ordering;
use std::ops::Mul;

use serde::{Serialize, Serializer};

use crate::coords::{complement, euler_class, triangle_coords, LambdaLengths, SignVector, TriangleCoords};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::surface::{CurveDescriptor, Edge, Step, Tri, Turn};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn identity() -> Self {
        Mat2([[T::one(), T::zero()], [T::zero(), T::one()]])
    }

    pub fn from_ints(m: [[i64; 2]; 2]) -> Self {
        Mat2(m.map(|r| r.map(T::from_int)))
    }

    pub fn trace(&self) -> T {
        self.0[0][0].clone() + self.0[1][1].clone()
    }

    pub fn det(&self) -> T {
        self.0[0][0].clone() * self.0[1][1].clone() - self.0[0][1].clone() * self.0[1][0].clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat2(self.0.clone().map(|r| r.map(|v| v * s.clone())))
    }
}

impl<T: Scalar> Mul for &Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: &Mat2<T>) -> Mat2<T> {
        let a = &self.0;
        let b = &o.0;
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone())
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HolonomyKind {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

impl HolonomyKind {
    pub fn of<T: Scalar>(abs_trace: &T) -> Self {
        match abs_trace.cmp_tol(&T::from_int(2)) {
            Ordering::Greater => HolonomyKind::Hyperbolic,
            Ordering::Equal => HolonomyKind::Parabolic,
            Ordering::Less => HolonomyKind::Elliptic,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult<T> {
    pub abs_trace: T,
    pub kind: HolonomyKind,
    pub parabolic_sign: Option<i8>,
}

impl<T: Scalar> HolonomyResult<T> {
    pub fn from_abs_trace(abs_trace: T) -> Self {
        Self { kind: HolonomyKind::of(&abs_trace), abs_trace, parabolic_sign: None }
    }

    /// |tr| ≤ 2, i.e. not hyperbolic.
    pub fn is_non_hyperbolic(&self) -> bool {
        self.kind != HolonomyKind::Hyperbolic
    }
}

impl<T: Scalar> Serialize for HolonomyResult<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("abs_trace", &self.abs_trace.to_string())?;
        m.serialize_entry("kind", &self.kind)?;
        if let Some(p) = self.parabolic_sign {
            m.serialize_entry("parabolic_sign", &p)?;
        }
        m.end()
    }
}

/// Left: [[λ(e₁), ε λ(e₃)], [0, λ(e₂)]]; right: [[λ(e₂), 0], [ε λ(e₃), λ(e₁)]]
/// with e₁ = enter, e₂ = exit, e₃ the third edge.
pub fn turn_matrix<T: Scalar>(
    t: Tri,
    enter: Edge,
    exit: Edge,
    turn: Turn,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<Mat2<T>> {
    let third = t
        .third_edge(enter, exit)
        .ok_or_else(|| Error::BadStep(format!("{enter}->{exit} is not a corner of {t}")))?;
    let (l1, l2) = (lambda[enter].clone(), lambda[exit].clone());
    let l3 = T::from_int(eps.get(t) as i64) * lambda[third].clone();
    Ok(match turn {
        Turn::L => Mat2([[l1, l3], [T::zero(), l2]]),
        Turn::R => Mat2([[l2, T::zero()], [l3, l1]]),
    })
}

fn step_matrix<T: Scalar>(s: &Step, lambda: &LambdaLengths<T>, eps: &SignVector) -> Result<Mat2<T>> {
    turn_matrix(s.tri, s.enter, s.exit, s.turn, lambda, eps)
}

/// The unnormalized product M(t₁)···M(tₘ) and the normalizer Π λ(enter edge).
pub fn holonomy<T: Scalar>(
    desc: &CurveDescriptor,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<(Mat2<T>, T)> {
    desc.validate()?;
    let mut m = Mat2::identity();
    let mut den = T::one();
    for s in &desc.steps {
        m = &m * &step_matrix(s, lambda, eps)?;
        den = den * lambda[s.enter].clone();
    }
    Ok((m, den))
}

/// |tr| of a 2-sided curve: |tr(Π M)| / Π λ(enter edges).
pub fn curve_trace<T: Scalar>(
    desc: &CurveDescriptor,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<HolonomyResult<T>> {
    if desc.one_sided {
        return Err(Error::Unsupported("1-sided curve; trace its square".into()));
    }
    let (m, den) = holonomy(desc, lambda, eps)?;
    let mut r = HolonomyResult::from_abs_trace(m.trace().abs() / den.clone());
    if r.kind == HolonomyKind::Parabolic {
        r.parabolic_sign = parabolic_sign(&m.scale(&(T::one() / den))).ok();
    }
    Ok(r)
}

/// (tr γ)² = |tr γ²| − 2 for a 1-sided γ, given the descriptor of γ².
pub fn one_sided_trace_sq<T: Scalar>(
    desc_sq: &CurveDescriptor,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<T> {
    trace_sq_from_square(curve_trace(desc_sq, lambda, eps)?.abs_trace)
}

/// |tr γ²| − 2, rejecting values below 2.
pub fn trace_sq_from_square<T: Scalar>(abs_trace_sq: T) -> Result<T> {
    let two = T::from_int(2);
    match abs_trace_sq.cmp_tol(&two) {
        Ordering::Less => Err(Error::NegativeSquare),
        Ordering::Equal => Ok(T::zero()),
        Ordering::Greater => Ok(abs_trace_sq - two),
    }
}

/// Which of the two ± pairings the e = ±1 closed form uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairingConvention {
    /// (Xᵢ + Xⱼ)² when ε(tᵢ) ≠ ε(tⱼ), (Xᵢ − Xⱼ)² otherwise; this is the
    /// pairing reproduced by the trace engine.
    #[default]
    Printed,
    /// The opposite pairing.
    Swapped,
}

/// Closed-form |tr| of the curve of the edge dual to {i, j}.
pub fn edge_curve_trace<T: Scalar>(
    x: &TriangleCoords<T>,
    eps: &SignVector,
    i: Tri,
    j: Tri,
) -> Result<HolonomyResult<T>> {
    edge_curve_trace_with(x, eps, i, j, PairingConvention::Printed)
}

pub fn edge_curve_trace_with<T: Scalar>(
    x: &TriangleCoords<T>,
    eps: &SignVector,
    i: Tri,
    j: Tri,
    conv: PairingConvention,
) -> Result<HolonomyResult<T>> {
    if i == j {
        return Err(Error::InvalidInput("pair needs two distinct triangles".into()));
    }
    let (k, l) = complement(i, j);
    let (xi, xj, xk, xl) = (x.get(i).clone(), x.get(j).clone(), x.get(k).clone(), x.get(l).clone());
    let kl = xk.clone() * xl.clone();
    let opposite = eps.get(i) != eps.get(j);
    let value = match euler_class(eps) {
        0 => {
            let s = Tri::ALL
                .iter()
                .fold(T::zero(), |a, &t| a + T::from_int(eps.get(t) as i64) * x.get(t).clone());
            if s.sign_rel(x.sum().to_f64_lossy()) == 0 {
                return Err(Error::DegenerateCusp);
            }
            let s2 = s.clone() * s;
            let two_kl = T::from_int(2) * kl.clone();
            if opposite {
                (s2 + two_kl) / kl
            } else {
                ((s2 - two_kl) / kl).abs()
            }
        }
        1 | -1 => {
            let plus = opposite == (conv == PairingConvention::Printed);
            let m = if plus { xi + xj } else { xi - xj };
            ((xk.clone() * xk + xl.clone() * xl - m.clone() * m) / kl).abs()
        }
        e => return Err(Error::Unsupported(format!("closed form for Euler class {e}"))),
    };
    Ok(HolonomyResult::from_abs_trace(value))
}

/// Closed-form traces of all six edge curves, in edge order a..f.
pub fn edge_curve_traces<T: Scalar>(
    x: &TriangleCoords<T>,
    eps: &SignVector,
) -> Result<Vec<(Edge, HolonomyResult<T>)>> {
    Edge::ALL
        .into_iter()
        .map(|e| {
            let (i, j) = e.dual_pair();
            Ok((e, edge_curve_trace(x, eps, i, j)?))
        })
        .collect()
}

/// Sign of a parabolic class: after normalizing to trace +2, sign(M₁₂ − M₂₁).
/// Calibrated so that [[1, x], [0, 1]] ↦ sign(x).
pub fn parabolic_sign<T: Scalar>(m: &Mat2<T>) -> Result<i8> {
    let tr = m.trace();
    let two = T::from_int(2);
    if !tr.abs().near(&two) {
        return Err(Error::NotParabolic);
    }
    let s = if tr.is_negative() { -T::one() } else { T::one() };
    let n = m.scale(&s);
    let scale = n.0.iter().flatten().map(|v| v.to_f64_lossy().abs()).fold(1.0, f64::max);
    match (n.0[0][1].clone() - n.0[1][0].clone()).sign_rel(scale) {
        0 => Err(Error::NotParabolic),
        v => Ok(v),
    }
}

/// (|tr| under ε, |tr| under all-positive signs, whether the curve meets a
/// negative triangle).
pub fn dominate_compare<T: Scalar>(
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
    desc: &CurveDescriptor,
) -> Result<(T, T, bool)> {
    let t = curve_trace(desc, lambda, eps)?.abs_trace;
    let f = curve_trace(desc, lambda, &SignVector::all_positive())?.abs_trace;
    let meets = desc.steps.iter().any(|s| eps.get(s.tri) < 0);
    Ok((t, f, meets))
}

/// Engine trace of an edge curve at coordinates given by λ.
pub fn engine_edge_trace<T: Scalar>(
    edge: Edge,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<HolonomyResult<T>> {
    curve_trace(&crate::surface::edge_curve(edge), lambda, eps)
}

/// Convenience: closed-form traces at the triangle coordinates of λ.
pub fn closed_form_from_lambda<T: Scalar>(
    edge: Edge,
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
) -> Result<HolonomyResult<T>> {
    let (i, j) = edge.dual_pair();
    edge_curve_trace(&triangle_coords(lambda), eps, i, j)
}
