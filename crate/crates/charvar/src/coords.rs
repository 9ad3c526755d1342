//! λ-lengths, triangle coordinates, gauge action, Euler class, cusp signs
//! and component classification.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::surface::{Edge, Tri, Vertex};

/// λ: edges → positive scalars, indexed by [`Edge`].
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaLengths<T>(pub [T; 6]);

impl<T: Scalar> LambdaLengths<T> {
    pub fn new(values: [T; 6]) -> Result<Self> {
        if values.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidInput("λ-lengths must be positive".into()));
        }
        Ok(Self(values))
    }

    pub fn ones() -> Self {
        Self(std::array::from_fn(|_| T::one()))
    }

    pub fn get(&self, e: Edge) -> &T {
        &self.0[e.index()]
    }

    pub fn set(&mut self, e: Edge, v: T) {
        self.0[e.index()] = v;
    }
}

impl<T> Index<Edge> for LambdaLengths<T> {
    type Output = T;
    fn index(&self, e: Edge) -> &T {
        &self.0[e.index()]
    }
}

/// ε: triangles → {−1, +1}, indexed by [`Tri`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(pub [i8; 4]);

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        let arr: [i8; 4] = v.try_into().map_err(|_| Error::InvalidInput("need 4 signs".into()))?;
        SignVector::new(arr)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Vec<i8> {
        s.0.to_vec()
    }
}

impl SignVector {
    pub fn new(v: [i8; 4]) -> Result<Self> {
        if v.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("signs must be ±1".into()));
        }
        Ok(Self(v))
    }

    pub fn all_positive() -> Self {
        Self([1; 4])
    }

    /// εᵢ: only tᵢ negative (Euler class +1).
    pub fn single_negative(t: Tri) -> Self {
        let mut s = [1; 4];
        s[t.index()] = -1;
        Self(s)
    }

    /// εᵢ,ⱼ: tᵢ and tⱼ negative (Euler class 0).
    pub fn pair_negative(s: Tri, t: Tri) -> Self {
        let mut v = [1; 4];
        v[s.index()] = -1;
        v[t.index()] = -1;
        Self(v)
    }

    pub fn get(&self, t: Tri) -> i8 {
        self.0[t.index()]
    }

    pub fn negated(&self) -> Self {
        Self(self.0.map(|s| -s))
    }

    /// Every sign vector with the given Euler class.
    pub fn with_euler(e: i32) -> Vec<SignVector> {
        (0..16u8)
            .map(|m| SignVector(std::array::from_fn(|i| if m >> i & 1 == 1 { -1 } else { 1 })))
            .filter(|s| euler_class(s) == e)
            .collect()
    }
}

/// X = (X₁, X₂, X₃, X₄), Xᵢ the product of λ over the edges of tᵢ.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleCoords<T> {
    pub x: [T; 4],
}

impl<T: Scalar> TriangleCoords<T> {
    pub fn new(x: [T; 4]) -> Result<Self> {
        if x.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidInput("triangle coordinates must be positive".into()));
        }
        Ok(Self { x })
    }

    pub fn from_ints(x: [i64; 4]) -> Self {
        Self { x: x.map(T::from_int) }
    }

    pub fn get(&self, t: Tri) -> &T {
        &self.x[t.index()]
    }

    pub fn sum(&self) -> T {
        self.x.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Projective representative with coordinate sum 1.
    pub fn normalized(&self) -> Self {
        let s = self.sum();
        Self { x: self.x.clone().map(|v| v / s.clone()) }
    }

    pub fn is_normalized(&self) -> bool {
        self.sum().near(&T::one())
    }

    pub fn scaled(&self, r: &T) -> Self {
        Self { x: self.x.clone().map(|v| v * r.clone()) }
    }

    /// Equality up to a positive scalar.
    pub fn projectively_eq(&self, other: &Self) -> bool {
        let (a, b) = (self.normalized(), other.normalized());
        a.x.iter().zip(&b.x).all(|(p, q)| p.near(q))
    }
}

impl<T: Scalar> fmt::Display for TriangleCoords<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x[0], self.x[1], self.x[2], self.x[3])
    }
}

impl<T: Scalar> Serialize for TriangleCoords<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.x.iter().map(|v| v.to_string()))
    }
}

impl<T: Scalar> Serialize for LambdaLengths<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|v| v.to_string()))
    }
}

/// μ: punctures → positive scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge<T>(pub [T; 3]);

impl<T: Scalar> Gauge<T> {
    pub fn new(mu: [T; 3]) -> Result<Self> {
        if mu.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidInput("gauge must be positive".into()));
        }
        Ok(Self(mu))
    }

    pub fn get(&self, v: Vertex) -> &T {
        &self.0[v.index()]
    }
}

/// Cusp sign pattern s = (s(v1), s(v2), s(v3)).
pub type CuspSigns = [i8; 3];

pub const S_PLUS: CuspSigns = [1, 1, 1];
pub const S_MINUS: CuspSigns = [-1, -1, -1];

/// sᵢ⁺: +1 at vᵢ, −1 elsewhere (i = 1..3).
pub fn s_plus_at(i: usize) -> CuspSigns {
    std::array::from_fn(|j| if j + 1 == i { 1 } else { -1 })
}

/// sᵢ⁻ = −sᵢ⁺.
pub fn s_minus_at(i: usize) -> CuspSigns {
    s_plus_at(i).map(|s| -s)
}

/// Short name such as "s+", "s2-".
pub fn signs_name(s: &CuspSigns) -> String {
    let plus = s.iter().filter(|&&v| v == 1).count();
    match plus {
        3 => "s+".into(),
        0 => "s-".into(),
        1 => format!("s{}+", s.iter().position(|&v| v == 1).unwrap() + 1),
        _ => format!("s{}-", s.iter().position(|&v| v == -1).unwrap() + 1),
    }
}

/// Parse "+--", "s1+", "[1,-1,-1]".
pub fn parse_signs(text: &str) -> Option<CuspSigns> {
    let t = text.trim();
    if let Ok(v) = serde_json::from_str::<Vec<i8>>(t) {
        let arr: [i8; 3] = v.try_into().ok()?;
        return arr.iter().all(|&s| s == 1 || s == -1).then_some(arr);
    }
    if t.len() == 3 && t.chars().all(|c| c == '+' || c == '-') {
        let c: Vec<char> = t.chars().collect();
        return Some(std::array::from_fn(|i| if c[i] == '+' { 1 } else { -1 }));
    }
    match t {
        "s+" => return Some(S_PLUS),
        "s-" => return Some(S_MINUS),
        _ => {}
    }
    let rest = t.strip_prefix('s')?;
    let i: usize = rest[..rest.len() - 1].parse().ok()?;
    if !(1..=3).contains(&i) {
        return None;
    }
    match rest.chars().last()? {
        '+' => Some(s_plus_at(i)),
        '-' => Some(s_minus_at(i)),
        _ => None,
    }
}

/// e = ±1 subregion: inside the generalized triangle inequalities, or in
/// Δ^{i,+} (Xᵢ larger than the sum of the other three).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subregion {
    Gti,
    Dominant(Tri),
}

impl fmt::Display for Subregion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subregion::Gti => f.write_str("gti"),
            Subregion::Dominant(t) => write!(f, "delta{}+", t.number()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabel {
    pub euler: i32,
    pub signs: CuspSigns,
    pub subregion: Option<Subregion>,
}

impl Serialize for ComponentLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("euler", &self.euler)?;
        m.serialize_entry("signs", &self.signs)?;
        if let Some(r) = &self.subregion {
            m.serialize_entry("subregion", &r.to_string())?;
        }
        m.end()
    }
}

/// (μ·λ)(e) = μ(p) λ(e) μ(q) for e joining p and q.
pub fn gauge_act<T: Scalar>(mu: &Gauge<T>, lambda: &LambdaLengths<T>) -> LambdaLengths<T> {
    LambdaLengths(std::array::from_fn(|i| {
        let e = Edge::ALL[i];
        let (p, q) = e.endpoints();
        mu.get(p).clone() * lambda[e].clone() * mu.get(q).clone()
    }))
}

pub fn triangle_coords<T: Scalar>(lambda: &LambdaLengths<T>) -> TriangleCoords<T> {
    TriangleCoords {
        x: Tri::ALL.map(|t| t.edges().iter().fold(T::one(), |acc, &e| acc * lambda[e].clone())),
    }
}

/// A λ with triangle coordinates exactly X:
/// λ(edge dual to {i, j}) = √(XᵢXⱼ) / (X₁X₂X₃X₄)^{1/6}.
pub fn section(x: &TriangleCoords<f64>) -> LambdaLengths<f64> {
    let prod: f64 = x.x.iter().product();
    let scale = prod.powf(1.0 / 6.0);
    LambdaLengths(Edge::ALL.map(|e| {
        let (i, j) = e.dual_pair();
        (x.get(i) * x.get(j)).sqrt() / scale
    }))
}

/// e(ρ) = ½ Σ ε(tᵢ).
pub fn euler_class(eps: &SignVector) -> i32 {
    eps.0.iter().map(|&s| s as i32).sum::<i32>() / 2
}

/// Off-diagonal entries of the three peripheral holonomies, in the printed
/// slot order (v1, v2, v3).
pub fn cusp_entries<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector) -> [T; 3] {
    let e = |i: usize| T::from_int(eps.0[i - 1] as i64);
    let xx = |i: usize| x.x[i - 1].clone();
    let term = |order: [usize; 4]| {
        (0..4).fold(T::zero(), |acc, k| acc + e(order[k]) * xx(k + 1))
    };
    [term([2, 1, 4, 3]), term([3, 4, 1, 2]), term([4, 3, 2, 1])]
}

/// Which cusp slot the peripheral curve of a model vertex reads.
pub fn cusp_slot(v: Vertex) -> usize {
    match v {
        Vertex::V1 => 2,
        Vertex::V2 => 1,
        Vertex::V3 => 0,
    }
}

pub fn signs_at_cusps<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector) -> Result<CuspSigns> {
    let entries = cusp_entries(x, eps);
    let scale = x.sum().to_f64_lossy();
    let mut s = [0i8; 3];
    for (k, v) in entries.iter().enumerate() {
        s[k] = v.sign_rel(scale);
        if s[k] == 0 {
            return Err(Error::DegenerateCusp);
        }
    }
    Ok(s)
}

/// ∀i: Xᵢ ≤ Xⱼ + Xₖ + Xₗ.
pub fn gti_satisfied<T: Scalar>(x: &TriangleCoords<T>) -> bool {
    dominant_index(x).is_none()
}

/// The index i with Xᵢ > sum of the others, if any (at most one exists).
pub fn dominant_index<T: Scalar>(x: &TriangleCoords<T>) -> Option<Tri> {
    let total = x.sum();
    Tri::ALL.into_iter().find(|&t| {
        let xi = x.get(t).clone();
        let rest = total.clone() - xi.clone();
        xi.cmp_tol(&rest) == std::cmp::Ordering::Greater
    })
}

/// The complementary pair {k, l} of {i, j}, in increasing order.
pub fn complement(i: Tri, j: Tri) -> (Tri, Tri) {
    let mut rest = Tri::ALL.into_iter().filter(|&t| t != i && t != j);
    (rest.next().unwrap(), rest.next().unwrap())
}

/// (Xₖ + Xₗ − Xᵢ − Xⱼ)² ≤ 4XₖXₗ.
pub fn sq_gti_satisfied<T: Scalar>(x: &TriangleCoords<T>, i: Tri, j: Tri) -> bool {
    let (k, l) = complement(i, j);
    let d = x.get(k).clone() + x.get(l).clone() - x.get(i).clone() - x.get(j).clone();
    let lhs = d.clone() * d;
    let rhs = T::from_int(4) * x.get(k).clone() * x.get(l).clone();
    lhs.cmp_tol(&rhs) != std::cmp::Ordering::Greater
}

/// (e, s, subregion) of an admissible chart.
pub fn classify<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector) -> Result<ComponentLabel> {
    let euler = euler_class(eps);
    let signs = signs_at_cusps(x, eps)?;
    let subregion = match euler.abs() {
        1 => Some(dominant_index(x).map_or(Subregion::Gti, Subregion::Dominant)),
        _ => None,
    };
    Ok(ComponentLabel { euler, signs, subregion })
}

/// The (e, s) pairs that occur, for |e| ≤ 1.
pub fn allowed_components() -> Vec<(i32, CuspSigns)> {
    let mut out = Vec::new();
    for i in 1..=3 {
        out.push((0, s_plus_at(i)));
        out.push((0, s_minus_at(i)));
    }
    out.push((1, S_PLUS));
    out.extend((1..=3).map(|i| (1, s_minus_at(i))));
    out.push((-1, S_MINUS));
    out.extend((1..=3).map(|i| (-1, s_plus_at(i))));
    out
}

pub fn is_allowed(e: i32, s: &CuspSigns) -> bool {
    match e {
        2 => *s == S_PLUS,
        -2 => *s == S_MINUS,
        _ => allowed_components().contains(&(e, *s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use proptest::prelude::*;

    fn xq(v: [i64; 4]) -> TriangleCoords<Exact> {
        TriangleCoords::from_ints(v)
    }

    fn eps(v: [i8; 4]) -> SignVector {
        SignVector::new(v).unwrap()
    }

    #[test]
    fn triangle_coords_examples() {
        let mut l = LambdaLengths::<Exact>::ones();
        assert_eq!(triangle_coords(&l), xq([1, 1, 1, 1]));
        l.set(Edge::B, Exact::from_int(2));
        assert_eq!(triangle_coords(&l), xq([2, 1, 1, 2]));
        let mut l = LambdaLengths::<Exact>::ones();
        l.set(Edge::D, Exact::from_int(3));
        assert_eq!(triangle_coords(&l), xq([3, 3, 1, 1]));
    }

    #[test]
    fn gauge_examples() {
        let l = LambdaLengths::<Exact>::ones();
        let id = Gauge([1, 1, 1].map(Exact::from_int));
        assert_eq!(gauge_act(&id, &l), l);
        let mu = Gauge([2, 1, 1].map(Exact::from_int));
        let g = gauge_act(&mu, &l);
        assert_eq!(g[Edge::A], Exact::from_int(2));
        assert_eq!(g[Edge::B], Exact::from_int(1));
    }

    #[test]
    fn section_examples() {
        let l = section(&TriangleCoords { x: [1.0; 4] });
        assert!(l.0.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let x = TriangleCoords { x: [4.0, 1.0, 1.0, 1.0] };
        let l = section(&x);
        let s = 4f64.powf(1.0 / 6.0);
        for e in Edge::ALL {
            let expect = if e.dual_pair().0 == Tri::T1 { 2.0 / s } else { 1.0 / s };
            assert!((l[e] - expect).abs() < 1e-12, "{e}");
        }
        let back = triangle_coords(&l);
        assert!(back.x.iter().zip(&x.x).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_class(&SignVector::all_positive()), 2);
        assert_eq!(euler_class(&SignVector::single_negative(Tri::T4)), 1);
        assert_eq!(euler_class(&SignVector::pair_negative(Tri::T1, Tri::T2)), 0);
        assert_eq!(SignVector::with_euler(0).len(), 6);
        assert_eq!(SignVector::with_euler(1).len(), 4);
    }

    #[test]
    fn cusp_examples() {
        let q = Exact::from_int;
        let e12 = eps([-1, -1, 1, 1]);
        assert_eq!(cusp_entries(&xq([1, 1, 1, 2]), &e12), [q(1), q(-1), q(-1)]);
        assert_eq!(signs_at_cusps(&xq([1, 1, 1, 2]), &e12).unwrap(), s_plus_at(1));
        let e4 = SignVector::single_negative(Tri::T4);
        assert_eq!(cusp_entries(&xq([1, 1, 1, 4]), &e4), [q(5), q(5), q(5)]);
        let e2 = SignVector::single_negative(Tri::T2);
        assert_eq!(cusp_entries(&xq([4, 1, 1, 1]), &e2), [q(-1), q(5), q(5)]);
        assert_eq!(signs_at_cusps(&xq([4, 1, 1, 1]), &e2).unwrap(), s_minus_at(1));
        assert_eq!(signs_at_cusps(&xq([1, 1, 1, 1]), &e12), Err(Error::DegenerateCusp));
    }

    #[test]
    fn gti_examples() {
        assert!(gti_satisfied(&xq([1, 1, 1, 1])));
        assert!(!gti_satisfied(&xq([1, 1, 1, 4])));
        assert!(gti_satisfied(&xq([1, 1, 1, 2])));
        assert!(gti_satisfied(&xq([1, 1, 1, 3])));
        assert!(sq_gti_satisfied(&xq([1, 1, 1, 2]), Tri::T1, Tri::T2));
        assert!(!sq_gti_satisfied(&xq([1, 1, 9, 1]), Tri::T1, Tri::T2));
        assert!(sq_gti_satisfied(&xq([1, 3, 2, 2]), Tri::T1, Tri::T2));
    }

    #[test]
    fn classify_examples() {
        let l = classify(&xq([1, 1, 1, 2]), &eps([-1, -1, 1, 1])).unwrap();
        assert_eq!(l, ComponentLabel { euler: 0, signs: s_plus_at(1), subregion: None });
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"euler":0,"signs":[1,-1,-1]}"#);
        let l = classify(&xq([1, 1, 1, 4]), &SignVector::single_negative(Tri::T4)).unwrap();
        assert_eq!((l.euler, l.signs, l.subregion), (1, S_PLUS, Some(Subregion::Dominant(Tri::T4))));
        let l = classify(&xq([4, 1, 1, 1]), &SignVector::single_negative(Tri::T2)).unwrap();
        assert_eq!((l.euler, l.signs, l.subregion), (1, s_minus_at(1), Some(Subregion::Dominant(Tri::T1))));
        let l = classify(&xq([1, 2, 3, 4]), &SignVector::all_positive()).unwrap();
        assert_eq!((l.euler, l.signs, l.subregion), (2, S_PLUS, None));
    }

    #[test]
    fn sign_names_roundtrip() {
        for (_, s) in allowed_components() {
            assert_eq!(parse_signs(&signs_name(&s)), Some(s));
        }
        assert_eq!(parse_signs("+--"), Some(s_plus_at(1)));
        assert_eq!(parse_signs("[1,1,1]"), Some(S_PLUS));
        assert_eq!(allowed_components().len(), 14);
    }

    fn rational() -> impl Strategy<Value = Exact> {
        (1i64..60, 1i64..60).prop_map(|(p, q)| Exact::from_ratio(p, q))
    }

    proptest! {
        #[test]
        fn gauge_scales_coordinates(
            l in proptest::array::uniform6(rational()),
            mu in proptest::array::uniform3(rational()),
            s in proptest::array::uniform4(prop_oneof![Just(1i8), Just(-1i8)]),
        ) {
            let lambda = LambdaLengths(l);
            let g = Gauge(mu.clone());
            let x = triangle_coords(&lambda);
            let y = triangle_coords(&gauge_act(&g, &lambda));
            // Φ(μ·λ) = (Π μ(v)²) Φ(λ)
            let f = mu.iter().fold(Exact::from_int(1), |a, m| a * m.clone() * m.clone());
            prop_assert_eq!(&y, &x.scaled(&f));
            let eps = SignVector(s);
            prop_assert_eq!(classify(&x, &eps), classify(&y, &eps));
            prop_assert_eq!(classify(&x, &eps), classify(&x.scaled(&Exact::from_ratio(7, 3)), &eps));
        }

        #[test]
        fn section_roundtrip(x in proptest::array::uniform4(0.01f64..100.0)) {
            let tc = TriangleCoords { x };
            let back = triangle_coords(&section(&tc));
            prop_assert!(back.projectively_eq(&tc));
        }
    }
}
