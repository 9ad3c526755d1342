//! Exact hyperbolicity scan on integer projective coordinates.
//!
//! Triangle coordinates are projective and the e = ±1 switch is homogeneous
//! of degree 3, so multiplying through by X_l² keeps everything integral and
//! avoids a gcd per rational operation. The three edges outside tₗ survive a
//! switch together with their traces, so only three traces are new per child.

use std::cmp::Ordering;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CurveRecord, ScanReport, ZeroRecord};
use crate::coords::{complement, euler_class, SignVector, TriangleCoords};
use crate::error::{Error, Result};
use crate::surface::{Edge, TreeAddress, Tri};
use crate::switches::{e1_next_negative, others};
use crate::Exact;

/// |tr| = n / d.
struct Trace {
    n: BigInt,
    d: BigInt,
    log2: f64,
    hyperbolic: bool,
}

fn log2(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return v.to_f64().unwrap_or(0.0).log2();
    }
    let top: BigInt = v >> (bits - 64);
    top.to_f64().unwrap().log2() + (bits - 64) as f64
}

impl Trace {
    fn new(n: BigInt, d: BigInt) -> Self {
        let hyperbolic = n > (&d << 1u32);
        Self { log2: log2(&n) - log2(&d), n, d, hyperbolic }
    }

    fn less(&self, other: &Trace) -> bool {
        let gap = self.log2 - other.log2;
        if gap.abs() > 1e-6 {
            return gap < 0.0;
        }
        (&self.n * &other.d).cmp(&(&other.n * &self.d)) == Ordering::Less
    }

    fn value(&self) -> Exact {
        Exact::new(self.n.clone(), self.d.clone())
    }
}

fn edge_trace(x: &[BigInt; 4], eps: &SignVector, edge: Edge) -> Trace {
    let (i, j) = edge.dual_pair();
    let (k, l) = complement(i, j);
    let (xi, xj, xk, xl) = (&x[i.index()], &x[j.index()], &x[k.index()], &x[l.index()]);
    let m = if eps.get(i) != eps.get(j) { xi + xj } else { xi - xj };
    let n = (xk * xk + xl * xl - &m * &m).abs();
    Trace::new(n, xk * xl)
}

// Common factors pile up quickly along switch paths (a Laurent-type
// cancellation); stripping them keeps depth-6 coordinates several times shorter.
// num-bigint's gcd is binary (quadratic in bits), so take one full gcd of
// the two shortest entries and fold the rest in through remainders.
fn reduce(n: &mut [BigInt; 4]) {
    let mut idx = [0, 1, 2, 3];
    idx.sort_by_key(|&i| n[i].bits());
    let mut g = n[idx[0]].gcd(&n[idx[1]]);
    for &i in &idx[2..] {
        if g.is_one() {
            return;
        }
        g = g.gcd(&(&n[i] % &g));
    }
    if !g.is_zero() && !g.is_one() {
        for v in n.iter_mut() {
            *v /= &g;
        }
    }
}

fn to_integers(x: &TriangleCoords<Exact>) -> [BigInt; 4] {
    let den = x.x.iter().fold(BigInt::one(), |a, v| a.lcm(v.denom()));
    let mut n: [BigInt; 4] = std::array::from_fn(|i| x.x[i].numer() * (&den / x.x[i].denom()));
    reduce(&mut n);
    n
}

struct Node {
    addr: TreeAddress,
    x: [BigInt; 4],
    eps: SignVector,
    traces: [Option<Rc<Trace>>; 6],
}

/// Same report as the generic scan, for e = ±1 over the rationals.
pub fn scan(x: &TriangleCoords<Exact>, eps: &SignVector, depth: usize) -> Result<ScanReport<Exact>> {
    let e = euler_class(eps);
    if e.abs() != 1 {
        return Err(Error::Unsupported(format!("hyperbolicity scan for Euler class {e}; use trace_reduce")));
    }
    if x.x.iter().any(|v| !v.is_positive()) {
        return Err(Error::InvalidInput("triangle coordinates must be positive".into()));
    }
    let mut report = ScanReport { triangulations: 0, curves: 0, minimum: None, non_hyperbolic: Vec::new(), inadmissible: Vec::new() };
    let mut minimum: Option<(TreeAddress, Edge, Rc<Trace>)> = None;
    let mut stack = vec![Node { addr: TreeAddress::root(), x: to_integers(x), eps: *eps, traces: Default::default() }];

    while let Some(mut node) = stack.pop() {
        report.triangulations += 1;
        for edge in Edge::ALL {
            let t = node.traces[edge.index()].get_or_insert_with(|| Rc::new(edge_trace(&node.x, &node.eps, edge))).clone();
            report.curves += 1;
            if !t.hyperbolic {
                report.non_hyperbolic.push(CurveRecord { address: node.addr.clone(), edge, abs_trace: t.value() });
            }
            if minimum.as_ref().map_or(true, |(_, _, m)| t.less(m)) {
                minimum = Some((node.addr.clone(), edge, t));
            }
        }
        if node.addr.len() == depth {
            continue;
        }

        let pos = if e < 0 { node.eps.negated() } else { node.eps };
        for l in Tri::ALL.into_iter().rev() {
            if node.addr.last() == Some(l) {
                continue;
            }
            let o = others(l);
            let f: Vec<BigInt> = o
                .iter()
                .map(|&i| {
                    o.iter().fold(BigInt::zero(), |acc, &m| {
                        let v = &node.x[m.index()];
                        match (m == i) == (pos.get(m) > 0) {
                            true => acc - v,
                            false => acc + v,
                        }
                    })
                })
                .collect();
            if let Some(z) = f.iter().position(Zero::is_zero) {
                let edge = Edge::between(l, o[z]).expect("shared edge");
                report.inadmissible.push(ZeroRecord { address: node.addr.switched(l), switch: l, edge });
                continue;
            }
            let xl = &node.x[l.index()];
            let mut nx = node.x.clone();
            for (i, fi) in o.iter().zip(&f) {
                nx[i.index()] = fi.abs() * &node.x[i.index()] * xl;
            }
            nx[l.index()] = f.iter().fold(BigInt::one(), |a, v| a * v).abs();
            // leaves are only evaluated, and traces are scale-free
            if node.addr.len() + 1 < depth {
                reduce(&mut nx);
            }

            let total: BigInt = o.iter().map(|m| &node.x[m.index()]).sum();
            let big = o.into_iter().find(|&i| (&node.x[i.index()] << 1u32) > total);
            let n = Tri::ALL.into_iter().find(|&t| pos.get(t) < 0).expect("Euler class ±1");
            let next = SignVector::single_negative(e1_next_negative(n, l, big));
            let traces = std::array::from_fn(|k| if l.contains(Edge::ALL[k]) { None } else { node.traces[k].clone() });
            stack.push(Node {
                addr: node.addr.switched(l),
                x: nx,
                eps: if e < 0 { next.negated() } else { next },
                traces,
            });
        }
    }
    report.minimum = minimum.map(|(address, edge, t)| CurveRecord { address, edge, abs_trace: t.value() });
    Ok(report)
}
