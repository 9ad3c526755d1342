//! Independent oracles for the trace engine and the switch formulas.
//!
//! The developing-map oracle lays decorated ideal triangles out in the
//! light cone (horocycles as vectors in R², λ = |det| of the two endpoint
//! vectors) along a curve and reads the holonomy off the lifts; it shares no
//! code with the turn-matrix engine.

use std::collections::BTreeMap;

use charvar::coords::{triangle_coords, LambdaLengths, SignVector, TriangleCoords};
use charvar::surface::{edge_curve, peripheral_curve, CurveDescriptor, Edge, Tri, Vertex};
use charvar::switches::{switch_via_flips, triangle_switch};
use charvar::traces::{curve_trace, edge_curve_trace};
use charvar::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type V2 = [f64; 2];

fn det(u: V2, v: V2) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn orientation(u: &BTreeMap<Vertex, V2>) -> f64 {
    let (a, b, c) = (u[&Vertex::V1], u[&Vertex::V2], u[&Vertex::V3]);
    (det(a, b) * det(b, c) * det(c, a)).signum()
}

/// Places the third corner r of t across the edge pq, with the orientation
/// prescribed by the sheet parity and the triangle sign.
fn place(u: &mut BTreeMap<Vertex, V2>, t: Tri, parity: f64, eps: &SignVector, lam: &LambdaLengths<f64>, p: Vertex, q: Vertex) {
    let r = Vertex::ALL.into_iter().find(|&v| v != p && v != q).unwrap();
    let g = lam[t.edge_joining(p, q)];
    let a = lam[t.edge_joining(q, r)] / g;
    let b = lam[t.edge_joining(p, r)] / g;
    for sb in [1.0, -1.0] {
        let w = [a * u[&p][0] + sb * b * u[&q][0], a * u[&p][1] + sb * b * u[&q][1]];
        u.insert(r, w);
        if orientation(u) == parity * eps.get(t) as f64 {
            return;
        }
    }
    panic!("no orientation fits");
}

fn developed_trace(curve: &CurveDescriptor, lam: &LambdaLengths<f64>, eps: &SignVector) -> f64 {
    let steps = &curve.steps;
    assert!(steps.len() % 2 == 0, "two-sided curves only");
    let s0 = steps[0];
    let (p, q) = s0.enter.endpoints();
    let mut u = BTreeMap::from([(p, [1.0, 0.0]), (q, [0.0, lam[s0.enter]])]);
    let mut parity = 1.0;
    place(&mut u, s0.tri, parity, eps, lam, p, q);
    let u0 = u.clone();
    for k in 1..=steps.len() {
        let s = steps[k % steps.len()];
        assert_eq!(steps[k - 1].exit, s.enter);
        parity = -parity;
        let (p, q) = s.enter.endpoints();
        u.retain(|&v, _| v == p || v == q);
        place(&mut u, s.tri, parity, eps, lam, p, q);
    }
    // g with g·U0[v] = ±U[v]; the vectors are only defined up to sign
    let (a1, a2, a3) = (u0[&Vertex::V1], u0[&Vertex::V2], u0[&Vertex::V3]);
    let inv_det = 1.0 / det(a1, a2);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            let (b1, b2) = (u[&Vertex::V1].map(|x| s1 * x), u[&Vertex::V2].map(|x| s2 * x));
            // g = [b1 b2]·[a1 a2]⁻¹
            let m = [
                [(b1[0] * a2[1] - b2[0] * a1[1]) * inv_det, (b2[0] * a1[0] - b1[0] * a2[0]) * inv_det],
                [(b1[1] * a2[1] - b2[1] * a1[1]) * inv_det, (b2[1] * a1[0] - b1[1] * a2[0]) * inv_det],
            ];
            let w = [m[0][0] * a3[0] + m[0][1] * a3[1], m[1][0] * a3[0] + m[1][1] * a3[1]];
            let target = u[&Vertex::V3];
            let close = |sg: f64| (0..2).all(|i| (w[i] - sg * target[i]).abs() <= 1e-9 * (1.0 + target[i].abs()));
            let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if (close(1.0) || close(-1.0)) && d > 0.0 {
                return (m[0][0] + m[1][1]).abs() / d.sqrt();
            }
        }
    }
    panic!("no holonomy matches the developed lifts");
}

fn random_lambda(rng: &mut ChaCha8Rng) -> LambdaLengths<f64> {
    LambdaLengths(std::array::from_fn(|_| rng.gen_range(0.2..5.0)))
}

fn all_signs() -> Vec<SignVector> {
    (-2..=2).flat_map(SignVector::with_euler).collect()
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn engine_matches_developing_map_on_edge_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let lam = random_lambda(&mut rng);
        for eps in all_signs() {
            for e in Edge::ALL {
                let c = edge_curve(e);
                let engine = curve_trace(&c, &lam, &eps).unwrap().abs_trace;
                let oracle = developed_trace(&c, &lam, &eps);
                assert!(rel_close(engine, oracle), "{e} {:?}: engine {engine} oracle {oracle}", eps.0);
            }
        }
    }
}

#[test]
fn peripheral_curves_are_parabolic_in_the_developing_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let lam = random_lambda(&mut rng);
        for eps in all_signs() {
            for v in Vertex::ALL {
                let t = developed_trace(&peripheral_curve(v), &lam, &eps);
                assert!((t - 2.0).abs() < 1e-8, "{v:?}: {t}");
            }
        }
    }
}

#[test]
fn closed_forms_match_developing_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let lam = random_lambda(&mut rng);
        let x = triangle_coords(&lam);
        for eps in (-1..=1).flat_map(SignVector::with_euler) {
            for e in Edge::ALL {
                let (i, j) = e.dual_pair();
                let Ok(closed) = edge_curve_trace(&x, &eps, i, j) else { continue };
                let oracle = developed_trace(&edge_curve(e), &lam, &eps);
                assert!(rel_close(closed.abs_trace, oracle), "{e} {:?}", eps.0);
            }
        }
    }
}

#[test]
fn flips_preserve_developed_traces_of_surviving_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..300 {
        let lam = random_lambda(&mut rng);
        let signs = all_signs();
        let eps = signs[rng.gen_range(0..signs.len())];
        let l = Tri::ALL[rng.gen_range(0..4)];
        let Ok((nl, ne)) = switch_via_flips(&lam, &eps, l) else { continue };
        for e in Edge::ALL.into_iter().filter(|&e| !l.contains(e)) {
            let before = developed_trace(&edge_curve(e), &lam, &eps);
            let after = developed_trace(&edge_curve(e), &nl, &ne);
            assert!(rel_close(before, after), "{e} along {l}: {before} vs {after}");
        }
        checked += 1;
    }
    assert!(checked > 250);
}

#[test]
fn closed_form_switch_matches_rational_flips() {
    // Flips need square roots only through the initial λ; starting from
    // rational λ the four Ptolemy steps stay rational, so the comparison is
    // exact.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..300 {
        let lam = LambdaLengths::<Exact>(std::array::from_fn(|_| {
            Exact::new(rng.gen_range(1..=30).into(), rng.gen_range(1..=30).into())
        }));
        let x: TriangleCoords<Exact> = triangle_coords(&lam);
        let eps = SignVector::with_euler([-1, 0, 1][checked % 3])[rng.gen_range(0..4)];
        let l = Tri::ALL[rng.gen_range(0..4)];
        let (Ok(want), Ok((nl, ne))) = (triangle_switch(&x, &eps, l), switch_via_flips(&lam, &eps, l)) else {
            continue;
        };
        assert!(triangle_coords(&nl).projectively_eq(&want.x), "{:?} along {l}", eps.0);
        assert_eq!(ne, want.eps);
        checked += 1;
    }
    assert!(checked > 250);
}
