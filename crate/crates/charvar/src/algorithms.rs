//! Trace reduction, component sampling, tree walks and diagnostics.

use std::cmp::Ordering;

use num_traits::Signed;
use rand::Rng;
use serde::Serialize;

use crate::coords::{
    classify, complement, euler_class, gti_satisfied, is_allowed, signs_at_cusps, signs_name, sq_gti_satisfied,
    CuspSigns, SignVector, TriangleCoords,
};
use crate::error::{Error, Result};
use crate::scalar::{rationalize, ser_display, Scalar};
use crate::surface::{Edge, TreeAddress, Tri};
use crate::switches::{switch_quantities, triangle_switch};
use crate::traces::{edge_curve_trace, HolonomyResult};
use crate::Exact;

mod intscan;

pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    FoundNonAdmissibleEdge,
    FoundGtiWitness,
    FoundSqGtiWitness,
    /// GTI holds but none of the six edge curves has |tr| ≤ 2.
    GtiWithoutWitness,
    StepLimit,
    /// The maximal coordinate is not unique; the algorithm is undefined here.
    Tie,
}

impl Outcome {
    /// True when the run ended with a non-hyperbolic curve or a
    /// non-admissible edge.
    pub fn has_witness(self) -> bool {
        matches!(self, Outcome::FoundNonAdmissibleEdge | Outcome::FoundGtiWitness | Outcome::FoundSqGtiWitness)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub enum Witness<T> {
    Curve { edge: Edge, pair: (Tri, Tri), trace: HolonomyResult<T> },
    NonAdmissible { edge: Edge, switch: Tri, address: TreeAddress },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    Switch(Tri),
    Stop,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ReductionStep<T> {
    pub address: TreeAddress,
    pub x: TriangleCoords<T>,
    pub eps: SignVector,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ReductionLog<T> {
    pub steps: Vec<ReductionStep<T>>,
    pub outcome: Outcome,
    pub witness: Option<Witness<T>>,
}

impl<T> ReductionLog<T> {
    /// Number of switches performed.
    pub fn switches(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.action, Action::Switch(_))).count()
    }
}

/// Region of the projected point (a, b, c) for e = ±1 runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    /// c > a + b and b > a.
    L,
    /// b > a + c and c > a.
    R,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct DiagnosticRow<T> {
    pub step: usize,
    #[serde(serialize_with = "crate::scalar::ser_opt_array")]
    pub abc: Option<[T; 3]>,
    pub region: Option<Region>,
    #[serde(serialize_with = "crate::scalar::ser_opt_display")]
    pub u: Option<T>,
    pub h: Option<f64>,
    pub k: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ReductionDiagnostics<T> {
    pub rows: Vec<DiagnosticRow<T>>,
}

impl<T: Scalar> ReductionDiagnostics<T> {
    /// uₙ₊₁ < uₙ along the run (e = 0); vacuous otherwise.
    pub fn u_strictly_decreasing(&self) -> bool {
        let u: Vec<&T> = self.rows.iter().filter_map(|r| r.u.as_ref()).collect();
        u.windows(2).all(|w| w[1].cmp_tol(w[0]) == Ordering::Less)
    }

    /// Consecutive in-region pairs (n, n+1) violating aₙ₊₁(1 − 2aₙ) ≥ aₙ.
    pub fn escape_violations(&self) -> Vec<usize> {
        let two = T::from_int(2);
        self.rows
            .windows(2)
            .filter_map(|w| {
                let (r0, r1) = (&w[0], &w[1]);
                if r0.region.is_none() || r1.region.is_none() {
                    return None;
                }
                let a0 = r0.abc.as_ref()?[0].clone();
                let a1 = r1.abc.as_ref()?[0].clone();
                let lhs = a1 * (T::one() - two.clone() * a0.clone());
                (lhs.cmp_tol(&a0) == Ordering::Less).then_some(r0.step)
            })
            .collect()
    }

    /// CSV with columns step,a,b,c,region,u,h,k (blank where inapplicable).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(["step", "a", "b", "c", "region", "u", "h", "k"]).map_err(io)?;
        for r in &self.rows {
            let abc: [String; 3] = match &r.abc {
                Some(v) => v.clone().map(|x| x.to_string()),
                None => Default::default(),
            };
            let region = match r.region {
                Some(Region::L) => "L",
                Some(Region::R) => "R",
                None if r.abc.is_some() => "-",
                None => "",
            };
            let opt = |v: &Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
            let [a, b, c] = abc;
            w.write_record([
                r.step.to_string(),
                a,
                b,
                c,
                region.to_string(),
                r.u.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                opt(&r.h),
                opt(&r.k),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// The two same-sign pairs of an e = 0 sign vector, pair containing t₁ first.
pub fn same_sign_pairs(eps: &SignVector) -> [(Tri, Tri); 2] {
    let partner = [Tri::T2, Tri::T3, Tri::T4].into_iter().find(|&t| eps.get(t) == eps.get(Tri::T1)).unwrap();
    [(Tri::T1, partner), complement(Tri::T1, partner)]
}

fn e0_row<T: Scalar>(step: usize, x: &TriangleCoords<T>, eps: &SignVector) -> DiagnosticRow<T> {
    let n = x.normalized();
    let [(i, j), (k, l)] = same_sign_pairs(eps);
    let half = T::from_ratio(1, 2);
    let u = (n.get(i).clone() + n.get(j).clone() - half).abs();
    let f = |t: Tri| n.get(t).to_f64_lossy();
    let third = |p: f64, q: f64, r: f64| {
        let (sp, sq, sr) = (p.sqrt(), q.sqrt(), r.sqrt());
        (sp - sq - sr).max(sq - sp - sr).max(sr - sp - sq)
    };
    let h = third(f(i), f(j), f(k) + f(l));
    let kk = third(f(k), f(l), f(i) + f(j));
    DiagnosticRow { step, abc: None, region: None, u: Some(u), h: Some(h), k: Some(kk) }
}

/// Indices for (a, b, c): two smallest, second largest, largest.
fn e1_labelling<T: Scalar>(x: &TriangleCoords<T>) -> [Tri; 4] {
    let mut idx = Tri::ALL;
    idx.sort_by(|&p, &q| x.get(p).partial_cmp(x.get(q)).unwrap_or(Ordering::Equal));
    idx
}

fn e1_row<T: Scalar>(step: usize, x: &TriangleCoords<T>, lab: &[Tri; 4]) -> DiagnosticRow<T> {
    let n = x.normalized();
    let a = n.get(lab[0]).clone() + n.get(lab[1]).clone();
    let b = n.get(lab[2]).clone();
    let c = n.get(lab[3]).clone();
    let gt = |p: &T, q: &T| p.cmp_tol(q) == Ordering::Greater;
    let region = if gt(&c, &(a.clone() + b.clone())) && gt(&b, &a) {
        Some(Region::L)
    } else if gt(&b, &(a.clone() + c.clone())) && gt(&c, &a) {
        Some(Region::R)
    } else {
        None
    };
    DiagnosticRow { step, abc: Some([a, b, c]), region, u: None, h: None, k: None }
}

fn unique_max<T: Scalar>(x: &TriangleCoords<T>) -> Option<Tri> {
    let mut best = Tri::T1;
    for t in [Tri::T2, Tri::T3, Tri::T4] {
        if x.get(t).cmp_tol(x.get(best)) == Ordering::Greater {
            best = t;
        }
    }
    let ties = Tri::ALL.iter().filter(|&&t| x.get(t).near(x.get(best))).count();
    (ties == 1).then_some(best)
}

fn curve_witness<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, i: Tri, j: Tri) -> Result<Witness<T>> {
    let edge = Edge::between(i, j).expect("distinct triangles");
    Ok(Witness::Curve { edge, pair: (i, j), trace: edge_curve_trace(x, eps, i, j)? })
}

/// The greedy trace-reduction algorithm: stop on a non-admissible switch,
/// on GTI (e = ±1) or sqGTI (e = 0); otherwise switch along the unique
/// maximal coordinate. Coordinates are renormalized to sum 1 after each
/// switch.
pub fn trace_reduce<T: Scalar>(
    x: &TriangleCoords<T>,
    eps: &SignVector,
    max_steps: usize,
) -> Result<(ReductionLog<T>, ReductionDiagnostics<T>)> {
    let e = euler_class(eps);
    if e.abs() > 1 {
        return Err(Error::Unsupported(format!("trace reduction for Euler class {e}")));
    }
    let mut x = x.normalized();
    let mut eps = *eps;
    let mut address = TreeAddress::root();
    let mut steps = Vec::new();
    let mut diag = ReductionDiagnostics { rows: Vec::new() };
    let lab = e1_labelling(&x);

    for n in 0..=max_steps {
        diag.rows.push(if e == 0 { e0_row(n, &x, &eps) } else { e1_row(n, &x, &lab) });
        let stop = |outcome, witness, steps: &mut Vec<ReductionStep<T>>, x: TriangleCoords<T>| {
            steps.push(ReductionStep { address: address.clone(), x, eps, action: Action::Stop });
            Ok((ReductionLog { steps: std::mem::take(steps), outcome, witness }, diag.clone()))
        };

        if e == 0 {
            if let Some(&(i, j)) = same_sign_pairs(&eps).iter().find(|&&(i, j)| sq_gti_satisfied(&x, i, j)) {
                let w = curve_witness(&x, &eps, i, j)?;
                return stop(Outcome::FoundSqGtiWitness, Some(w), &mut steps, x);
            }
        } else if gti_satisfied(&x) {
            let mut best: Option<Witness<T>> = None;
            for edge in Edge::ALL {
                let (i, j) = edge.dual_pair();
                let w = curve_witness(&x, &eps, i, j)?;
                if let (Witness::Curve { trace: t, .. }, Some(Witness::Curve { trace: b, .. })) = (&w, &best) {
                    if t.abs_trace >= b.abs_trace {
                        continue;
                    }
                }
                best = Some(w);
            }
            let found = matches!(&best, Some(Witness::Curve { trace, .. }) if trace.is_non_hyperbolic());
            return if found {
                stop(Outcome::FoundGtiWitness, best, &mut steps, x)
            } else {
                stop(Outcome::GtiWithoutWitness, None, &mut steps, x)
            };
        }
        if n == max_steps {
            return stop(Outcome::StepLimit, None, &mut steps, x);
        }
        let Some(l) = unique_max(&x) else {
            return stop(Outcome::Tie, None, &mut steps, x);
        };
        let scale = x.sum().to_f64_lossy();
        if let Some((edge, _)) = switch_quantities(&x, &eps, l)?.into_iter().find(|(_, v)| v.sign_rel(scale) == 0) {
            let w = Witness::NonAdmissible { edge, switch: l, address: address.switched(l) };
            return stop(Outcome::FoundNonAdmissibleEdge, Some(w), &mut steps, x);
        }
        let r = triangle_switch(&x, &eps, l)?;
        steps.push(ReductionStep { address: address.clone(), x: x.clone(), eps, action: Action::Switch(l) });
        address = address.switched(l);
        x = r.x.normalized();
        eps = r.eps;
    }
    unreachable!("the loop returns at n = max_steps")
}

/// Checks a finished log: a curve witness must have |tr| ≤ 2 and a
/// non-admissible witness must name an edge whose quantity vanishes.
pub fn witness_is_valid<T: Scalar>(log: &ReductionLog<T>) -> bool {
    let last = match log.steps.last() {
        Some(s) => s,
        None => return false,
    };
    match &log.witness {
        Some(Witness::Curve { pair: (i, j), trace, .. }) => {
            trace.is_non_hyperbolic()
                && edge_curve_trace(&last.x, &last.eps, *i, *j).map(|t| t == *trace).unwrap_or(false)
        }
        Some(Witness::NonAdmissible { edge, switch, .. }) => switch_quantities(&last.x, &last.eps, *switch)
            .map(|q| q.iter().any(|(e, v)| e == edge && v.sign_rel(last.x.sum().to_f64_lossy()) == 0))
            .unwrap_or(false),
        None => false,
    }
}

/// A Dirichlet(1,1,1,1) point on the simplex, rationalized at denominator 2³².
pub fn sample_chart<R: Rng + ?Sized>(rng: &mut R) -> TriangleCoords<Exact> {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
        let s: f64 = g.iter().sum();
        let x = TriangleCoords { x: g.map(|v| rationalize(v / s, 32)) };
        if x.x.iter().all(|v| v.is_positive()) {
            return x;
        }
    }
}

/// Rejection-samples a chart in the component (e, s): X from
/// [`sample_chart`], ε uniform among the sign vectors of class e.
pub fn sample_component<R: Rng + ?Sized>(
    e: i32,
    s: &CuspSigns,
    rng: &mut R,
) -> Result<(TriangleCoords<Exact>, SignVector)> {
    if e.abs() > 1 {
        return Err(Error::Unsupported(format!("sampling for Euler class {e}")));
    }
    if !is_allowed(e, s) {
        return Err(Error::EmptyComponent { euler: e, signs: signs_name(s) });
    }
    let candidates = SignVector::with_euler(e);
    loop {
        let x = sample_chart(rng);
        let eps = candidates[rng.gen_range(0..candidates.len())];
        if signs_at_cusps(&x, &eps).as_ref() == Ok(s) {
            return Ok((x, eps));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroRecord {
    /// Address of the triangulation that cannot be reached.
    pub address: TreeAddress,
    pub switch: Tri,
    pub edge: Edge,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WalkReport {
    pub visited: usize,
    pub zeros: Vec<ZeroRecord>,
}

/// Depth-first walk over reduced switch words up to `depth`, calling `visit`
/// at every reachable triangulation and `zero` at every non-admissible switch.
fn walk<T: Scalar>(
    x: &TriangleCoords<T>,
    eps: &SignVector,
    depth: usize,
    visit: &mut dyn FnMut(&TreeAddress, &TriangleCoords<T>, &SignVector) -> Result<()>,
    zero: &mut dyn FnMut(ZeroRecord),
) -> Result<()> {
    let e = euler_class(eps);
    if e.abs() > 1 {
        return Err(Error::Unsupported(format!("tree walk for Euler class {e}")));
    }
    let mut stack = vec![(TreeAddress::root(), x.normalized(), *eps)];
    while let Some((addr, x, eps)) = stack.pop() {
        visit(&addr, &x, &eps)?;
        if addr.len() == depth {
            continue;
        }
        let scale = x.sum().to_f64_lossy();
        for l in Tri::ALL.into_iter().rev() {
            if addr.last() == Some(l) {
                continue;
            }
            let q = switch_quantities(&x, &eps, l)?;
            if let Some((edge, _)) = q.iter().find(|(_, v)| v.sign_rel(scale) == 0) {
                zero(ZeroRecord { address: addr.switched(l), switch: l, edge: *edge });
                continue;
            }
            let r = triangle_switch(&x, &eps, l)?;
            stack.push((addr.switched(l), r.x.normalized(), r.eps));
        }
    }
    Ok(())
}

/// Reports every vanishing switch quantity over the tree to `depth`.
pub fn admissibility_walk<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, depth: usize) -> Result<WalkReport> {
    let mut report = WalkReport::default();
    let mut visited = 0;
    walk(x, eps, depth, &mut |_, _, _| {
        visited += 1;
        Ok(())
    }, &mut |z| report.zeros.push(z))?;
    report.visited = visited;
    report.zeros.sort_by(|a, b| (a.address.len(), &a.address).cmp(&(b.address.len(), &b.address)));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct CurveRecord<T> {
    pub address: TreeAddress,
    pub edge: Edge,
    #[serde(serialize_with = "ser_display")]
    pub abs_trace: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ScanReport<T> {
    pub triangulations: usize,
    pub curves: usize,
    pub minimum: Option<CurveRecord<T>>,
    pub non_hyperbolic: Vec<CurveRecord<T>>,
    pub inadmissible: Vec<ZeroRecord>,
}

/// Six closed-form edge-curve traces at every balanced triangulation within
/// `depth` switches (e = ±1 only).
pub fn hyperbolicity_scan<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector, depth: usize) -> Result<ScanReport<T>> {
    let e = euler_class(eps);
    if e.abs() != 1 {
        return Err(Error::Unsupported(format!("hyperbolicity scan for Euler class {e}; use trace_reduce")));
    }
    let mut report = ScanReport { triangulations: 0, curves: 0, minimum: None, non_hyperbolic: Vec::new(), inadmissible: Vec::new() };
    let mut zeros = Vec::new();
    walk(
        x,
        eps,
        depth,
        &mut |addr, x, eps| {
            report.triangulations += 1;
            for edge in Edge::ALL {
                let (i, j) = edge.dual_pair();
                let t = edge_curve_trace(x, eps, i, j)?;
                report.curves += 1;
                let rec = CurveRecord { address: addr.clone(), edge, abs_trace: t.abs_trace.clone() };
                if t.is_non_hyperbolic() {
                    report.non_hyperbolic.push(rec.clone());
                }
                if report.minimum.as_ref().map_or(true, |m| rec.abs_trace < m.abs_trace) {
                    report.minimum = Some(rec);
                }
            }
            Ok(())
        },
        &mut |z| zeros.push(z),
    )?;
    report.inadmissible = zeros;
    Ok(report)
}

/// Exact scan on integer projective coordinates; same report as
/// `hyperbolicity_scan`, much faster at depth ≥ 5.
pub fn hyperbolicity_scan_exact(x: &TriangleCoords<Exact>, eps: &SignVector, depth: usize) -> Result<ScanReport<Exact>> {
    intscan::scan(x, eps, depth)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct PairStatus<T> {
    pub pair: (Tri, Tri),
    pub edge: Edge,
    pub opposite_signs: bool,
    pub trace: HolonomyResult<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SeparationReport<T> {
    pub pairs: Vec<PairStatus<T>>,
    pub opposite_all_hyperbolic: bool,
    pub same_sign_non_hyperbolic: Vec<Edge>,
}

/// e = 0 structure at one chart: opposite-sign pair curves must all be
/// hyperbolic; same-sign pair statuses are reported.
pub fn e0_separation_check<T: Scalar>(x: &TriangleCoords<T>, eps: &SignVector) -> Result<SeparationReport<T>> {
    let e = euler_class(eps);
    if e != 0 {
        return Err(Error::Unsupported(format!("separation check for Euler class {e}")));
    }
    classify(x, eps)?;
    let mut pairs = Vec::new();
    for edge in Edge::ALL {
        let (i, j) = edge.dual_pair();
        pairs.push(PairStatus {
            pair: (i, j),
            edge,
            opposite_signs: eps.get(i) != eps.get(j),
            trace: edge_curve_trace(x, eps, i, j)?,
        });
    }
    let opposite_all_hyperbolic = pairs.iter().filter(|p| p.opposite_signs).all(|p| !p.trace.is_non_hyperbolic());
    let same_sign_non_hyperbolic =
        pairs.iter().filter(|p| !p.opposite_signs && p.trace.is_non_hyperbolic()).map(|p| p.edge).collect();
    Ok(SeparationReport { pairs, opposite_all_hyperbolic, same_sign_non_hyperbolic })
}
