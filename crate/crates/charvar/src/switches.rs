//! Diagonal flips and triangle switches, for Euler classes 0 and ±1
//! (closed-form formulas) and for any class via four flips.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::coords::{euler_class, LambdaLengths, SignVector, TriangleCoords};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::surface::{Edge, Tri, Vertex};

/// A quadrilateral around the diagonal e: t₁ = (e, e₁, e₂), t₂ = (e, e₃, e₄).
#[derive(Clone, Debug, PartialEq)]
pub struct FlipConfig<T> {
    pub diagonal: T,
    pub sides: [T; 4],
    pub signs: [i8; 2],
}

/// Replaces e by the other diagonal e′. The result is again a FlipConfig
/// around e′, with t₁′ = (e′, e₄, e₁) and t₂′ = (e′, e₂, e₃), so its sides are
/// (e₄, e₁, e₂, e₃).
pub fn diagonal_flip<T: Scalar>(cfg: &FlipConfig<T>) -> Result<FlipConfig<T>> {
    let [l1, l2, l3, l4] = cfg.sides.clone();
    let p13 = l1.clone() * l3.clone();
    let p24 = l2.clone() * l4.clone();
    let [s1, s2] = cfg.signs;
    let (lambda, signs) = if s1 == s2 {
        ((p13 + p24) / cfg.diagonal.clone(), [s1, s2])
    } else {
        match p13.cmp_tol(&p24) {
            Ordering::Equal => return Err(Error::Inadmissible("λ₁λ₃ = λ₂λ₄ across unequal signs".into())),
            Ordering::Less => ((p24 - p13) / cfg.diagonal.clone(), [s1, s2]),
            Ordering::Greater => ((p13 - p24) / cfg.diagonal.clone(), [s2, s1]),
        }
    };
    Ok(FlipConfig { diagonal: lambda, sides: [l4, l1, l2, l3], signs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchResult<T> {
    pub x: TriangleCoords<T>,
    pub eps: SignVector,
    pub admissible: bool,
}

impl<T: Scalar> Serialize for SwitchResult<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(3))?;
        let x: Vec<String> = self.x.x.iter().map(|v| v.to_string()).collect();
        m.serialize_entry("coords", &x)?;
        m.serialize_entry("signs", &self.eps)?;
        m.serialize_entry("admissible", &self.admissible)?;
        m.end()
    }
}

pub(crate) fn others(l: Tri) -> [Tri; 3] {
    let mut o = [l; 3];
    let mut n = 0;
    for t in Tri::ALL {
        if t != l {
            o[n] = t;
            n += 1;
        }
    }
    o
}

fn sgn<T: Scalar>(eps: &SignVector, t: Tri) -> T {
    T::from_int(eps.get(t) as i64)
}

/// The Laurent-polynomial values whose vanishing makes the switch along tₗ
/// inadmissible, one per edge of tₗ (the edge dual to {l, m}).
pub fn switch_quantities<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Result<Vec<(Edge, T)>> {
    let edge = |m: Tri| Edge::between(l, m).expect("distinct triangles share an edge");
    match euler_class(eps) {
        0 => {
            let (s, _, _) = e0_data(x, eps, l);
            Ok(others(l).into_iter().map(|m| (edge(m), s.clone())).collect())
        }
        1 | -1 => Ok(e1_factors(x, eps, l).into_iter().map(|(m, f)| (edge(m), f)).collect()),
        e => Err(Error::Unsupported(format!("switch quantities for Euler class {e}"))),
    }
}

/// Edges of tₗ that would degenerate under the switch along tₗ.
pub fn inadmissible_edges<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Result<Vec<Edge>> {
    let scale = x.sum().to_f64_lossy();
    Ok(switch_quantities(x, eps, l)?
        .into_iter()
        .filter(|(_, v)| v.sign_rel(scale) == 0)
        .map(|(e, _)| e)
        .collect())
}

/// (s = Xᵢ + Xⱼ − Xₖ, k, (i, j)) with ε(tₖ) = ε(tₗ).
fn e0_data<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> (T, Tri, (Tri, Tri)) {
    let o = others(l);
    let k = *o.iter().find(|&&m| eps.get(m) == eps.get(l)).expect("Euler class 0");
    let mut rest = o.into_iter().filter(|&m| m != k);
    let (i, j) = (rest.next().unwrap(), rest.next().unwrap());
    (x.get(i).clone() + x.get(j).clone() - x.get(k).clone(), k, (i, j))
}

/// f_i = −εᵢXᵢ + εⱼXⱼ + εₖXₖ for each i ≠ l.
fn e1_factors<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Vec<(Tri, T)> {
    let o = others(l);
    o.iter()
        .map(|&i| {
            let f = o.iter().fold(T::zero(), |acc, &m| {
                let term = sgn::<T>(eps, m) * x.get(m).clone();
                if m == i {
                    acc - term
                } else {
                    acc + term
                }
            });
            (i, f)
        })
        .collect()
}

/// Switch along tₗ for Euler class 0.
pub fn triangle_switch_e0<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Result<SwitchResult<T>> {
    if euler_class(eps) != 0 {
        return Err(Error::InvalidInput("triangle_switch_e0 needs Euler class 0".into()));
    }
    let (s, k, (i, j)) = e0_data(x, eps, l);
    if s.sign_rel(x.sum().to_f64_lossy()) == 0 {
        return Err(Error::Inadmissible(format!("X{} = X{} + X{}", k.number(), i.number(), j.number())));
    }
    let s = s.abs();
    let xl = x.get(l).clone();
    let ratio = s.clone() / xl.clone();
    let mut nx = x.scaled(&ratio);
    nx.x[l.index()] = s.clone() * s.clone() * s / (xl.clone() * xl);
    let keep = x.get(k).cmp_tol(&(x.get(i).clone() + x.get(j).clone())) == Ordering::Greater;
    let eps2 = if keep { *eps } else { eps.negated() };
    Ok(SwitchResult { x: nx, eps: eps2, admissible: true })
}

/// Switch along tₗ for Euler class ±1 (−1 handled by mirroring all signs).
pub fn triangle_switch_e1<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Result<SwitchResult<T>> {
    match euler_class(eps) {
        1 => {}
        -1 => {
            let r = triangle_switch_e1(x, &eps.negated(), l)?;
            return Ok(SwitchResult { eps: r.eps.negated(), ..r });
        }
        _ => return Err(Error::InvalidInput("triangle_switch_e1 needs Euler class ±1".into())),
    }
    let scale = x.sum().to_f64_lossy();
    let f = e1_factors(x, eps, l);
    if let Some((m, _)) = f.iter().find(|(_, v)| v.sign_rel(scale) == 0) {
        let e = Edge::between(l, *m).expect("shared edge");
        return Err(Error::Inadmissible(format!("edge {e} degenerates")));
    }
    let xl = x.get(l).clone();
    let mut nx = x.clone();
    let mut prod = T::one();
    for (i, fi) in &f {
        nx.x[i.index()] = fi.abs() / xl.clone() * x.get(*i).clone();
        prod = prod * fi.clone();
    }
    nx.x[l.index()] = prod.abs() / (xl.clone() * xl);

    let o = others(l);
    let total: T = o.iter().fold(T::zero(), |a, &m| a + x.get(m).clone());
    let big = o.into_iter().find(|&i| {
        let xi = x.get(i).clone();
        xi.cmp_tol(&(total.clone() - xi.clone())) == Ordering::Greater
    });
    let n = Tri::ALL.into_iter().find(|&t| eps.get(t) < 0).expect("Euler class 1");
    Ok(SwitchResult { x: nx, eps: SignVector::single_negative(e1_next_negative(n, l, big)), admissible: true })
}

/// Where the negative triangle of an e = +1 chart goes under the switch
/// along tₗ; `big` is the i ≠ l with Xᵢ larger than the other two together.
pub(crate) fn e1_next_negative(n: Tri, l: Tri, big: Option<Tri>) -> Tri {
    if n == l {
        return big.unwrap_or(l);
    }
    match big {
        Some(b) if b != n => others(l).into_iter().find(|&m| m != n && m != b).unwrap(),
        _ => l,
    }
}

/// Closed-form switch, dispatched on the Euler class.
pub fn triangle_switch<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, l: Tri) -> Result<SwitchResult<T>> {
    match euler_class(eps) {
        0 => triangle_switch_e0(x, eps, l),
        1 | -1 => triangle_switch_e1(x, eps, l),
        e => Err(Error::Unsupported(format!("closed-form switch for Euler class {e}; use switch_via_flips"))),
    }
}

// Hexagon around tₗ: corners v1, v2, v3 of tₗ at 0, 2, 4, ear tips at 1, 3, 5.
const HEX_LABEL: [Vertex; 6] = [Vertex::V1, Vertex::V3, Vertex::V2, Vertex::V1, Vertex::V3, Vertex::V2];
const FLIPS: [[u8; 4]; 4] = [[0, 1, 2, 4], [2, 3, 4, 1], [4, 5, 0, 1], [1, 3, 4, 5]];

fn key(p: u8, q: u8) -> (u8, u8) {
    (p.min(q), p.max(q))
}

fn tri_key(mut t: [u8; 3]) -> [u8; 3] {
    t.sort_unstable();
    t
}

struct Hexagon<T> {
    lambda: BTreeMap<(u8, u8), T>,
    signs: BTreeMap<[u8; 3], i8>,
}

impl<T: Scalar> Hexagon<T> {
    fn flip(&mut self, [p0, p1, p2, p3]: [u8; 4]) -> Result<()> {
        let cfg = FlipConfig {
            diagonal: self.lambda.remove(&key(p0, p2)).expect("diagonal present"),
            sides: [key(p0, p1), key(p1, p2), key(p2, p3), key(p3, p0)].map(|k| self.lambda[&k].clone()),
            signs: [self.signs.remove(&tri_key([p0, p1, p2])).unwrap(), self.signs.remove(&tri_key([p0, p2, p3])).unwrap()],
        };
        let out = diagonal_flip(&cfg)?;
        self.lambda.insert(key(p1, p3), out.diagonal);
        self.signs.insert(tri_key([p0, p1, p3]), out.signs[0]);
        self.signs.insert(tri_key([p1, p2, p3]), out.signs[1]);
        Ok(())
    }
}

/// Triangle switch along tₗ as four diagonal flips inside the hexagon
/// formed by tₗ and its three neighbours. Works for every Euler class.
/// If an intermediate flip is inadmissible the two rotated flip orders are
/// tried before giving up; at very symmetric points (e.g. X = (1,1,1,4))
/// all three can tie even though the switch itself is admissible.
pub fn switch_via_flips<T: Scalar>(
    lambda: &LambdaLengths<T>,
    eps: &SignVector,
    l: Tri,
) -> Result<(LambdaLengths<T>, SignVector)> {
    let g12 = l.edge_joining(Vertex::V1, Vertex::V2);
    let g23 = l.edge_joining(Vertex::V2, Vertex::V3);
    let g31 = l.edge_joining(Vertex::V3, Vertex::V1);
    let mut hex = Hexagon { lambda: BTreeMap::new(), signs: BTreeMap::new() };
    let mut side_label = BTreeMap::new();
    hex.signs.insert(tri_key([0, 2, 4]), eps.get(l));
    for (p, q, tip, g) in [(0u8, 2u8, 1u8, g12), (2, 4, 3, g23), (4, 0, 5, g31)] {
        hex.lambda.insert(key(p, q), lambda[g].clone());
        let (t1, t2) = g.dual_pair();
        let other = if t1 == l { t2 } else { t1 };
        hex.signs.insert(tri_key([p, q, tip]), eps.get(other));
        for (u, v) in [(p, tip), (tip, q)] {
            let e = other.edge_joining(HEX_LABEL[u as usize], HEX_LABEL[v as usize]);
            side_label.insert(key(u, v), e);
            hex.lambda.insert(key(u, v), lambda[e].clone());
        }
    }

    let mut last_err = None;
    for r in [0u8, 2, 4] {
        let mut h = Hexagon { lambda: hex.lambda.clone(), signs: hex.signs.clone() };
        let run = FLIPS.iter().try_for_each(|quad| h.flip(quad.map(|p| (p + r) % 6)));
        match run {
            Ok(()) => {
                let mut nl = lambda.clone();
                nl.set(g12, h.lambda[&key(3, 5)].clone());
                nl.set(g23, h.lambda[&key(5, 1)].clone());
                nl.set(g31, h.lambda[&key(1, 3)].clone());
                let mut ne = *eps;
                ne.0[l.index()] = h.signs[&tri_key([1, 3, 5])];
                for [a, b, c] in [[5u8, 0, 1], [1, 2, 3], [3, 4, 5]] {
                    let (s1, s2) = (side_label[&key(a, b)], side_label[&key(b, c)]);
                    let t = Tri::ALL.into_iter().find(|t| t.contains(s1) && t.contains(s2)).expect("ear triangle");
                    ne.0[t.index()] = h.signs[&tri_key([a, b, c])];
                }
                return Ok((nl, ne));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::coords::{section, signs_at_cusps, triangle_coords};
    use crate::traces::edge_curve_trace;
    use crate::Exact;
    use proptest::prelude::*;

    fn q(p: i64, r: i64) -> Exact {
        Exact::from_ratio(p, r)
    }

    fn xq(v: [i64; 4]) -> TriangleCoords<Exact> {
        TriangleCoords::from_ints(v)
    }

    #[test]
    fn flip_examples() {
        let cfg = FlipConfig { diagonal: q(1, 1), sides: [1, 1, 1, 1].map(|v| q(v, 1)), signs: [1, 1] };
        assert_eq!(diagonal_flip(&cfg).unwrap().diagonal, q(2, 1));
        let cfg = FlipConfig { diagonal: q(1, 1), sides: [2, 1, 3, 1].map(|v| q(v, 1)), signs: [-1, -1] };
        let out = diagonal_flip(&cfg).unwrap();
        assert_eq!((out.diagonal, out.signs), (q(7, 1), [-1, -1]));
        let cfg = FlipConfig { diagonal: q(1, 1), sides: [2, 3, 3, 2].map(|v| q(v, 1)), signs: [1, -1] };
        assert!(matches!(diagonal_flip(&cfg), Err(Error::Inadmissible(_))));
        let cfg = FlipConfig { diagonal: q(2, 1), sides: [1, 3, 1, 2].map(|v| q(v, 1)), signs: [1, -1] };
        let out = diagonal_flip(&cfg).unwrap();
        assert_eq!((out.diagonal.clone(), out.signs), (q(5, 2), [1, -1]));
        // flipping back restores the diagonal
        assert_eq!(diagonal_flip(&out).unwrap().diagonal, q(2, 1));
    }

    #[test]
    fn e0_examples() {
        let e12 = SignVector::pair_negative(Tri::T1, Tri::T2);
        let r = triangle_switch_e0(&xq([1, 1, 1, 2]), &e12, Tri::T4).unwrap();
        assert!(r.x.projectively_eq(&TriangleCoords { x: [q(1, 1), q(1, 1), q(1, 1), q(1, 2)] }));
        assert_eq!(r.eps, SignVector::pair_negative(Tri::T3, Tri::T4));
        let back = triangle_switch_e0(&r.x, &r.eps, Tri::T4).unwrap();
        assert!(back.x.projectively_eq(&xq([1, 1, 1, 2])));
        assert_eq!(back.eps, e12);
        assert!(matches!(triangle_switch_e0(&xq([1, 1, 2, 1]), &e12, Tri::T4), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn e1_examples() {
        let e4 = SignVector::single_negative(Tri::T4);
        let r = triangle_switch_e1(&xq([1, 1, 1, 4]), &e4, Tri::T4).unwrap();
        assert_eq!(r.x.x, [q(1, 4), q(1, 4), q(1, 4), q(1, 16)]);
        assert_eq!(r.eps, e4);
        let e2 = SignVector::single_negative(Tri::T2);
        let r = triangle_switch_e1(&xq([4, 1, 1, 1]), &e2, Tri::T4).unwrap();
        assert_eq!(r.x, xq([16, 6, 2, 48]));
        assert_eq!(signs_at_cusps(&r.x, &r.eps), signs_at_cusps(&xq([4, 1, 1, 1]), &e2));
        assert!(matches!(triangle_switch_e1(&xq([2, 1, 1, 5]), &e4, Tri::T4), Err(Error::Inadmissible(_))));
        assert_eq!(inadmissible_edges(&xq([2, 1, 1, 5]), &e4, Tri::T4).unwrap(), vec![Edge::B]);
    }

    #[test]
    fn anchor_trace_survives_switch() {
        let e12 = SignVector::pair_negative(Tri::T1, Tri::T2);
        let x = xq([1, 1, 1, 2]);
        let r = triangle_switch(&x, &e12, Tri::T4).unwrap();
        let before = edge_curve_trace(&x, &e12, Tri::T1, Tri::T2).unwrap().abs_trace;
        let after = edge_curve_trace(&r.x, &r.eps, Tri::T1, Tri::T2).unwrap().abs_trace;
        assert_eq!((before, after), (q(3, 2), q(3, 2)));
    }

    #[test]
    fn flips_reproduce_closed_forms_at_examples() {
        let lam = section(&TriangleCoords { x: [1.0, 1.0, 1.0, 2.0] });
        let e12 = SignVector::pair_negative(Tri::T1, Tri::T2);
        let (nl, ne) = switch_via_flips(&lam, &e12, Tri::T4).unwrap();
        assert!(triangle_coords(&nl).projectively_eq(&TriangleCoords { x: [1.0, 1.0, 1.0, 0.5] }));
        assert_eq!(ne, SignVector::pair_negative(Tri::T3, Tri::T4));
        // at the symmetric point every flip order passes through a tie
        let e4 = SignVector::single_negative(Tri::T4);
        let sym = section(&TriangleCoords { x: [1.0, 1.0, 1.0, 4.0] });
        assert!(matches!(switch_via_flips(&sym, &e4, Tri::T4), Err(Error::Inadmissible(_))));
        let x = TriangleCoords { x: [1.0, 2.0, 4.0, 9.0] };
        let want = triangle_switch(&x, &e4, Tri::T4).unwrap();
        let (nl, ne) = switch_via_flips(&section(&x), &e4, Tri::T4).unwrap();
        assert!(triangle_coords(&nl).projectively_eq(&want.x));
        assert_eq!(ne, want.eps);
        let lam = LambdaLengths::<Exact>::ones();
        let (nl, ne) = switch_via_flips(&lam, &SignVector::all_positive(), Tri::T2).unwrap();
        assert!(nl.0.iter().all(|v| v.is_positive()));
        assert_eq!(ne, SignVector::all_positive());
        assert!(switch_via_flips(&nl, &ne, Tri::T2).unwrap().0 == lam);
    }

    fn rational() -> impl Strategy<Value = Exact> {
        (1i64..50, 1i64..50).prop_map(|(p, r)| q(p, r))
    }

    fn tri() -> impl Strategy<Value = Tri> {
        (0usize..4).prop_map(Tri::from_index)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn flips_agree_with_closed_forms(
            l in proptest::array::uniform6(rational()),
            s in proptest::array::uniform4(prop_oneof![Just(1i8), Just(-1i8)]),
            t in tri(),
        ) {
            let lam = LambdaLengths(l);
            let eps = SignVector(s);
            prop_assume!(euler_class(&eps).abs() <= 1);
            let x = triangle_coords(&lam);
            prop_assume!(signs_at_cusps(&x, &eps).is_ok());
            if let Ok(r) = triangle_switch(&x, &eps, t) {
                if let Ok((nl, ne)) = switch_via_flips(&lam, &eps, t) {
                    prop_assert!(triangle_coords(&nl).projectively_eq(&r.x));
                    prop_assert_eq!(ne, r.eps);
                }
            }
        }

        #[test]
        fn switches_are_involutions(
            x in proptest::array::uniform4(rational()),
            s in proptest::array::uniform4(prop_oneof![Just(1i8), Just(-1i8)]),
            t in tri(),
        ) {
            let x = TriangleCoords { x };
            let eps = SignVector(s);
            prop_assume!(euler_class(&eps).abs() <= 1);
            if let Ok(r) = triangle_switch(&x, &eps, t) {
                prop_assert_eq!(euler_class(&r.eps), euler_class(&eps));
                let back = triangle_switch(&r.x, &r.eps, t).unwrap();
                prop_assert!(back.x.projectively_eq(&x));
                prop_assert_eq!(back.eps, eps);
            }
        }
    }
}
