//! Named verification suites. Each suite draws `count` independent samples
//! (sample i uses its own ChaCha stream, so results do not depend on thread
//! scheduling) and reports pass/fail with the first failure.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{
    e0_separation_check, hyperbolicity_scan_exact, sample_chart, sample_component, trace_reduce, witness_is_valid, Outcome,
    Witness,
};
use crate::coords::{
    classify, cusp_entries, cusp_slot, euler_class, gauge_act, gti_satisfied, is_allowed, s_minus_at, s_plus_at,
    section, signs_at_cusps, triangle_coords, CuspSigns, Gauge, LambdaLengths, SignVector, TriangleCoords, S_MINUS,
    S_PLUS,
};
use crate::dynamics::{
    central_character, ellipse_k, ellipse_point, relation_residual, rotation_number_estimate, s3, s4, twist34,
    twist34_orbit, vieta_flip, Generator, OmegaPoint, TraceCoords, Var,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::surface::{edge_curve, peripheral_curve, Edge, Tri, Vertex};
use crate::switches::{switch_via_flips, triangle_switch};
use crate::traces::{curve_trace, dominate_compare, edge_curve_trace, edge_curve_trace_with, PairingConvention};
use crate::Exact;

pub const SUITES: [&str; 10] = [
    "components",
    "switch-involution",
    "invariance",
    "gti-equivalence",
    "reduction-termination",
    "hyperbolicity-scan",
    "e0-dichotomy",
    "domination",
    "omega-dynamics",
    "trace-variety",
];

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pairing: PairingConvention,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { count: 200, seed: 0, tolerance: 1e-9, pairing: PairingConvention::Printed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    pub detail: String,
}

enum Check {
    Pass,
    Skip,
    Fail(String),
}

/// Independent stream for sample `i` of suite `suite`.
pub fn sample_rng(seed: u64, suite: &str, i: usize) -> ChaCha8Rng {
    let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(i as u64);
    rng
}

fn run_checks(name: &str, opts: &SuiteOptions, f: impl Fn(&mut ChaCha8Rng, usize) -> Check + Sync) -> SuiteReport {
    let results: Vec<Check> =
        (0..opts.count).into_par_iter().map(|i| f(&mut sample_rng(opts.seed, name, i), i)).collect();
    let mut rep = SuiteReport {
        suite: name.to_string(),
        pass: true,
        checked: 0,
        skipped: 0,
        failures: 0,
        detail: String::new(),
    };
    for r in results {
        match r {
            Check::Pass => rep.checked += 1,
            Check::Skip => rep.skipped += 1,
            Check::Fail(msg) => {
                rep.checked += 1;
                rep.failures += 1;
                if rep.detail.is_empty() {
                    rep.detail = msg;
                }
            }
        }
    }
    rep.pass = rep.failures == 0 && rep.checked > 0;
    rep
}

fn random_signs<R: Rng>(rng: &mut R, e: i32) -> SignVector {
    let c = SignVector::with_euler(e);
    c[rng.gen_range(0..c.len())]
}

fn random_rational<R: Rng>(rng: &mut R) -> Exact {
    Exact::from_ratio(rng.gen_range(1..=64), rng.gen_range(1..=64))
}

fn random_lambda<R: Rng>(rng: &mut R) -> LambdaLengths<Exact> {
    LambdaLengths(std::array::from_fn(|_| random_rational(rng)))
}

/// Components of Euler class 0 and the two GTI-type e = ±1 components.
pub fn reduction_components() -> Vec<(i32, CuspSigns)> {
    let mut v = vec![(1, S_PLUS), (-1, S_MINUS)];
    for i in 1..=3 {
        v.push((0, s_plus_at(i)));
        v.push((0, s_minus_at(i)));
    }
    v
}

/// The e = ±1 components with two cusp signs agreeing with e.
pub fn hyperbolic_components() -> Vec<(i32, CuspSigns)> {
    let mut v: Vec<(i32, CuspSigns)> = (1..=3).map(|i| (1, s_minus_at(i))).collect();
    v.extend((1..=3).map(|i| (-1, s_plus_at(i))));
    v
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    Ok(match name {
        "components" => components(opts),
        "switch-involution" => switch_involution(opts),
        "invariance" => invariance(opts),
        "gti-equivalence" => gti_equivalence(opts),
        "reduction-termination" => reduction_termination(opts),
        "hyperbolicity-scan" => hyperbolicity(opts),
        "e0-dichotomy" => e0_dichotomy(opts),
        "domination" => domination(opts),
        "omega-dynamics" => omega_dynamics(opts),
        "trace-variety" => trace_variety(opts),
        _ => return Err(Error::InvalidInput(format!("unknown suite {name}"))),
    })
}

fn components(opts: &SuiteOptions) -> SuiteReport {
    let name = "components";
    let seen: Vec<Vec<(i32, CuspSigns)>> = (0..opts.count)
        .into_par_iter()
        .map(|i| {
            let x = sample_chart(&mut sample_rng(opts.seed, name, i));
            [-1, 0, 1]
                .into_iter()
                .flat_map(SignVector::with_euler)
                .filter_map(|eps| classify(&x, &eps).ok().map(|l| (l.euler, l.signs)))
                .collect()
        })
        .collect();
    let mut found = BTreeSet::new();
    let mut bad = Vec::new();
    for (e, s) in seen.iter().flatten() {
        if !is_allowed(*e, s) {
            bad.push((*e, *s));
        }
        found.insert((*e, *s));
    }
    let pass = bad.is_empty() && found.len() == 14;
    SuiteReport {
        suite: name.into(),
        pass,
        checked: seen.iter().map(Vec::len).sum(),
        skipped: 0,
        failures: bad.len(),
        detail: format!("{} distinct components; forbidden: {:?}", found.len(), bad.first()),
    }
}

fn switch_involution(opts: &SuiteOptions) -> SuiteReport {
    run_checks("switch-involution", opts, |rng, i| {
        let e = [-1, 0, 1][i % 3];
        let x = sample_chart(rng);
        let eps = random_signs(rng, e);
        let l = Tri::from_index(rng.gen_range(0..4));
        let Ok(before) = signs_at_cusps(&x, &eps) else { return Check::Skip };
        let r = match triangle_switch(&x, &eps, l) {
            Ok(r) => r,
            Err(Error::Inadmissible(_)) => return Check::Skip,
            Err(err) => return Check::Fail(format!("sample {i}: {err}")),
        };
        if euler_class(&r.eps) != e {
            return Check::Fail(format!("sample {i}: Euler class changed"));
        }
        if signs_at_cusps(&r.x, &r.eps) != Ok(before) {
            return Check::Fail(format!("sample {i}: cusp signs changed"));
        }
        for edge in Edge::ALL.into_iter().filter(|g| !l.contains(*g)) {
            let (p, q) = edge.dual_pair();
            let t0 = edge_curve_trace(&x, &eps, p, q).map(|t| t.abs_trace);
            let t1 = edge_curve_trace(&r.x, &r.eps, p, q).map(|t| t.abs_trace);
            if t0 != t1 {
                return Check::Fail(format!("sample {i}: trace of {edge} changed"));
            }
        }
        match triangle_switch(&r.x, &r.eps, l) {
            Ok(back) if back.x.projectively_eq(&x) && back.eps == eps => Check::Pass,
            _ => Check::Fail(format!("sample {i}: double switch is not the identity")),
        }
    })
}

fn invariance(opts: &SuiteOptions) -> SuiteReport {
    let tol = opts.tolerance;
    run_checks("invariance", opts, move |rng, i| {
        let lam = random_lambda(rng);
        let e = [-1, 0, 1][i % 3];
        let eps = random_signs(rng, e);
        let x = triangle_coords(&lam);
        if signs_at_cusps(&x, &eps).is_err() {
            return Check::Skip;
        }
        // engine = closed form
        for edge in Edge::ALL {
            let (p, q) = edge.dual_pair();
            let engine = curve_trace(&edge_curve(edge), &lam, &eps).map(|t| t.abs_trace);
            let closed = edge_curve_trace(&x, &eps, p, q).map(|t| t.abs_trace);
            if engine != closed {
                return Check::Fail(format!("sample {i}: engine/closed form differ on {edge}"));
            }
        }
        // peripheral parabolics carry the cusp signs
        let cusp = cusp_entries(&x, &eps);
        for v in Vertex::ALL {
            let r = curve_trace(&peripheral_curve(v), &lam, &eps).unwrap();
            let want = if cusp[cusp_slot(v)].is_positive() { 1 } else { -1 };
            if r.abs_trace != Exact::from_int(2) || r.parabolic_sign != Some(want) {
                return Check::Fail(format!("sample {i}: peripheral curve at {v:?}"));
            }
        }
        // gauge invariance
        let mu = Gauge(std::array::from_fn(|_| random_rational(rng)));
        if classify(&triangle_coords(&gauge_act(&mu, &lam)), &eps) != classify(&x, &eps) {
            return Check::Fail(format!("sample {i}: gauge changed the class"));
        }
        // four flips = closed-form switch
        let l = Tri::from_index(rng.gen_range(0..4));
        let Ok(r) = triangle_switch(&x, &eps, l) else { return Check::Pass };
        let xf = TriangleCoords { x: x.x.clone().map(|v| v.to_f64_lossy()) };
        match switch_via_flips(&section(&xf), &eps, l) {
            Ok((nl, ne)) => {
                let got = triangle_coords(&nl).normalized();
                let want = r.x.normalized();
                let ok = ne == r.eps
                    && got.x.iter().zip(&want.x).all(|(g, w)| (g - w.to_f64_lossy()).abs() <= tol * 1e3);
                if ok {
                    Check::Pass
                } else {
                    Check::Fail(format!("sample {i}: flips disagree with the switch formula"))
                }
            }
            Err(_) => Check::Pass,
        }
    })
}

/// Boundary chart: X_l = sum of the others, nudged by ±2⁻⁴⁰.
fn boundary_chart<R: Rng>(rng: &mut R) -> TriangleCoords<Exact> {
    let mut x = sample_chart(rng);
    let l = rng.gen_range(0..4);
    let rest: Exact = (0..4).filter(|&m| m != l).map(|m| x.x[m].clone()).sum();
    let nudge = Exact::new(1.into(), num_bigint::BigInt::from(1u64 << 40));
    x.x[l] = if rng.gen_bool(0.5) { rest + nudge } else { rest - nudge };
    x
}

fn gti_equivalence(opts: &SuiteOptions) -> SuiteReport {
    let conv = opts.pairing;
    run_checks("gti-equivalence", opts, move |rng, i| {
        let x = if i % 100 == 99 { boundary_chart(rng) } else { sample_chart(rng) };
        let eps = random_signs(rng, if i % 2 == 0 { 1 } else { -1 });
        if signs_at_cusps(&x, &eps).is_err() {
            return Check::Skip;
        }
        let all_hyp = Edge::ALL.into_iter().all(|e| {
            let (p, q) = e.dual_pair();
            !edge_curve_trace_with(&x, &eps, p, q, conv).unwrap().is_non_hyperbolic()
        });
        if all_hyp == !gti_satisfied(&x) {
            Check::Pass
        } else {
            Check::Fail(format!("sample {i}: X = {x}, ε = {:?}: all traces > 2 is {all_hyp}, GTI is {}", eps.0, gti_satisfied(&x)))
        }
    })
}

fn reduction_termination(opts: &SuiteOptions) -> SuiteReport {
    let comps = reduction_components();
    run_checks("reduction-termination", opts, move |rng, i| {
        let (e, s) = comps[i % comps.len()];
        let (x, eps) = sample_component(e, &s, rng).expect("allowed component");
        match trace_reduce(&x, &eps, 1000) {
            Ok((log, diag)) => {
                if !log.outcome.has_witness() || !witness_is_valid(&log) {
                    Check::Fail(format!("sample {i} ({e}, {s:?}): {:?} after {} switches", log.outcome, log.switches()))
                } else if e == 0 && !diag.u_strictly_decreasing() {
                    Check::Fail(format!("sample {i}: u_n not decreasing"))
                } else {
                    Check::Pass
                }
            }
            Err(err) => Check::Fail(format!("sample {i}: {err}")),
        }
    })
}

fn hyperbolicity(opts: &SuiteOptions) -> SuiteReport {
    let comps = hyperbolic_components();
    run_checks("hyperbolicity-scan", opts, move |rng, i| {
        let (e, s) = comps[i % comps.len()];
        let (x, eps) = sample_component(e, &s, rng).expect("allowed component");
        match hyperbolicity_scan_exact(&x, &eps, 6) {
            Ok(r) if r.non_hyperbolic.is_empty() => Check::Pass,
            Ok(r) => Check::Fail(format!("sample {i}: |tr| ≤ 2 at {:?}", r.non_hyperbolic.first().map(|c| c.address.to_string()))),
            Err(err) => Check::Fail(format!("sample {i}: {err}")),
        }
    })
}

fn e0_dichotomy(opts: &SuiteOptions) -> SuiteReport {
    run_checks("e0-dichotomy", opts, |rng, i| {
        let s = if i % 2 == 0 { s_plus_at(i / 2 % 3 + 1) } else { s_minus_at(i / 2 % 3 + 1) };
        let (x, eps) = sample_component(0, &s, rng).expect("allowed component");
        let sep = match e0_separation_check(&x, &eps) {
            Ok(r) => r,
            Err(err) => return Check::Fail(format!("sample {i}: {err}")),
        };
        if !sep.opposite_all_hyperbolic {
            return Check::Fail(format!("sample {i}: opposite-sign curve not hyperbolic"));
        }
        match trace_reduce(&x, &eps, 1000) {
            Ok((log, _)) => match &log.witness {
                Some(Witness::Curve { pair: (p, q), trace, .. })
                    if log.outcome == Outcome::FoundSqGtiWitness
                        && trace.is_non_hyperbolic()
                        && log.steps.last().map(|s| s.eps.get(*p) == s.eps.get(*q)).unwrap_or(false) =>
                {
                    Check::Pass
                }
                Some(Witness::NonAdmissible { .. }) if witness_is_valid(&log) => Check::Pass,
                _ => Check::Fail(format!("sample {i}: {:?}", log.outcome)),
            },
            Err(err) => Check::Fail(format!("sample {i}: {err}")),
        }
    })
}

fn domination(opts: &SuiteOptions) -> SuiteReport {
    let tol = opts.tolerance;
    run_checks("domination", opts, move |rng, i| {
        let lam = random_lambda(rng);
        let eps = random_signs(rng, [-1, 0, 1][i % 3]);
        let curve = edge_curve(Edge::ALL[rng.gen_range(0..6)]);
        if signs_at_cusps(&triangle_coords(&lam), &eps).is_err() {
            return Check::Skip;
        }
        let lf = LambdaLengths(lam.0.clone().map(|v| v.to_f64_lossy()));
        let (t, f, meets) = dominate_compare(&lf, &eps, &curve).unwrap();
        let float_ok = t <= f * (1.0 + tol) && ((t < f * (1.0 - tol)) == meets);
        let (te, fe, _) = dominate_compare(&lam, &eps, &curve).unwrap();
        let exact_ok = te <= fe && ((te < fe) == meets);
        if float_ok && exact_ok {
            Check::Pass
        } else {
            Check::Fail(format!("sample {i}: |tr|ε = {t}, |tr|+ = {f}, meets negative = {meets}"))
        }
    })
}

fn omega_dynamics(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = run_checks("omega-dynamics", opts, |rng, i| {
        let q = |rng: &mut ChaCha8Rng| Exact::from_ratio(rng.gen_range(1..=200), rng.gen_range(1..=100));
        let p = OmegaPoint { a: Exact::from_ratio(1, 3), c: q(rng), d: q(rng) };
        let Ok(k) = ellipse_k(&p) else { return Check::Skip };
        let images = [s3(&p), s4(&p), twist34(&p)];
        for im in images.iter().flatten() {
            if im.c.is_zero() || im.d.is_zero() {
                continue;
            }
            if ellipse_k(im).as_ref() != Ok(&k) {
                return Check::Fail(format!("sample {i}: k not invariant"));
            }
        }
        if s3(&s3(&p).unwrap()).as_ref() != Ok(&p) && !p.d.clone().is_one() {
            return Check::Fail(format!("sample {i}: s3 not an involution"));
        }
        Check::Pass
    });
    // rotation numbers at fixed k from several starting points
    let k = -1.75;
    let starts = [0.3, 0.45, 0.6, 0.8, 1.1];
    let est: Vec<f64> = starts
        .iter()
        .filter_map(|&c| ellipse_point(0.5, c, k, true).ok())
        .filter_map(|p| twist34_orbit(&p, 100_000).ok())
        .filter_map(|o| rotation_number_estimate(&o).ok())
        .collect();
    let spread = est.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - est.iter().cloned().fold(f64::INFINITY, f64::min);
    if est.len() < 2 || spread > 1e-4 {
        rep.pass = false;
        rep.failures += 1;
        rep.detail = format!("rotation estimates spread {spread} over {} orbits", est.len());
    }
    rep
}

fn trace_variety(opts: &SuiteOptions) -> SuiteReport {
    run_checks("trace-variety", opts, |rng, i| {
        let vars = [Var::A, Var::B, Var::C, Var::D];
        let mut t = TraceCoords::<Exact>::base_point();
        for _ in 0..rng.gen_range(0..6) {
            t = vieta_flip(&t, vars[rng.gen_range(0..4)]);
        }
        if !relation_residual(&t).is_zero() {
            return Check::Fail(format!("sample {i}: walk left the variety"));
        }
        let v = vars[rng.gen_range(0..4)];
        let f = vieta_flip(&t, v);
        if !relation_residual(&f).is_zero() || vieta_flip(&f, v) != t {
            return Check::Fail(format!("sample {i}: Vieta flip {v:?}"));
        }
        for g in [Generator::A, Generator::B, Generator::C] {
            let c = central_character(&t, g);
            if !relation_residual(&c).is_zero() || central_character(&c, g) != t {
                return Check::Fail(format!("sample {i}: central character {g:?}"));
            }
        }
        Check::Pass
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_ten_suites() {
        assert_eq!(SUITES.len(), 10);
        for s in SUITES {
            assert!(run_suite(s, &SuiteOptions { count: 0, ..Default::default() }).is_ok());
        }
    }

    #[test]
    fn streams_are_independent_of_scheduling() {
        let a: Vec<u64> = (0..4).map(|i| sample_rng(7, "x", i).gen()).collect();
        let b: Vec<u64> = (0..4).rev().map(|i| sample_rng(7, "x", i).gen()).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
    }

    #[test]
    fn swapped_pairing_hook_changes_gti_suite() {
        let opts = SuiteOptions { count: 300, seed: 3, ..Default::default() };
        let printed = gti_equivalence(&opts);
        let swapped = gti_equivalence(&SuiteOptions { pairing: PairingConvention::Swapped, ..opts });
        assert!(!printed.pass);
        assert!(swapped.pass, "{swapped:?}");
    }
}
