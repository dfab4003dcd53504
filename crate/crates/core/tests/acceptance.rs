//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;

use robsat::homotopy::{cocycle_extension_solvable, decide_extension, pullback_cocycle, verify_certificate};
use robsat::integer::{column_hermite, smith_solve, IntMatrix};
use robsat::io::{decide_sampled, fixture_from_extension, freudenthal_grid, sample_polynomial, Instance, InstanceFile, Polynomial, SampledVerdict};
use robsat::oracles::{brute_diophantine, is_rootless, perturbation_witness, WitnessSearchConfig};
use robsat::rational::{frac, int};
use robsat::reduction::{reduce, Chi};
use robsat::robsat::{decide_robsat, decide_robsat_with, robustness};
use robsat::{Complex, CriticalValue, Rational, DeciderOptions, ExtendVerdict, Norm, PLMap, RobVerdict, RobustnessResult, VertexId};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const NORMS: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInf];

fn rat(p: i64, q: i64) -> CriticalValue {
    CriticalValue::Rat(frac(p, q))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Vertices of a path complex in order, starting from an endpoint.
fn along_path(c: &Complex) -> Vec<VertexId> {
    let edges = c.simplices_of_dim(1);
    let degree = |v: VertexId| edges.iter().filter(|e| e.contains_vertex(v)).count();
    let mut order = vec![c.vertices().find(|v| degree(*v) == 1).unwrap()];
    loop {
        let last = *order.last().unwrap();
        let next = edges
            .iter()
            .filter(|e| e.contains_vertex(last))
            .flat_map(|e| e.vertices().iter().copied())
            .find(|v| *v != last && !order.contains(v));
        match next {
            Some(v) => order.push(v),
            None => return order,
        }
    }
}

fn one_d_exactness() -> Outcome {
    let f = path(&[-1, 0, 1]);
    let start = Instant::now();
    for norm in NORMS {
        let r = ok(robustness(&f, norm))?;
        ensure(r == RobustnessResult::Value(rat(1, 1)), || format!("{norm:?}: {r:?}"))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("Value(1) in all norms, {took:?}"))
}

fn worked_trace() -> Outcome {
    let f = path(&[3, -1, 3]);
    let red = ok(reduce(&f, &rat(1, 1), Norm::LInf))?;
    let chi: Vec<Chi> = along_path(red.extremal.complex()).iter().map(|v| red.chi[v]).collect();
    ensure(chi == vec![Chi::One, Chi::Zero, Chi::Half, Chi::Zero, Chi::One], || format!("chi {chi:?}"))?;
    let map = red.sphere_map.ok_or("no sphere map")?;
    let mut imgs: Vec<String> = map.domain().vertices().map(|v| map.image(v).to_string()).collect();
    imgs.sort();
    ensure(imgs == ["+e1", "+e1", "-e1"], || format!("A images {imgs:?}"))?;
    ensure(ok(decide_robsat(&f, &rat(1, 1), Norm::LInf))?.is_yes(), || "alpha = 1 not robust".into())?;
    ensure(ok(decide_robsat(&f, &rat(3, 1), Norm::LInf))?.is_no(), || "alpha = 3 robust".into())?;
    let r = ok(robustness(&f, Norm::LInf))?;
    ensure(r == RobustnessResult::Value(rat(1, 1)), || format!("{r:?}"))?;
    Ok("chi (1,0,1/2,0,1), A = {+e1,+e1,-e1}, Value(1)".into())
}

fn equal_dimension() -> Outcome {
    let start = Instant::now();
    let f = square_identity(2);
    let r = ok(robustness(&f, Norm::LInf))?;
    ensure(r == RobustnessResult::Value(rat(1, 1)), || format!("robustness {r:?}"))?;
    let crit = f.critical_values(Norm::LInf);
    let mut probed = 0;
    for c in crit.iter().filter(|c| c.is_positive()) {
        let v = ok(decide_robsat(&f, c, Norm::LInf))?;
        let expect_yes = *c <= rat(1, 1);
        ensure(v.is_yes() == expect_yes, || format!("at {c}: {}", v.tag()))?;
        probed += 1;
    }
    for above in [rat(11, 10), rat(2, 1)] {
        let v = ok(decide_robsat(&f, &above, Norm::LInf))?;
        ensure(v.is_no(), || format!("at {above}: {}", v.tag()))?;
    }
    let cfg = WitnessSearchConfig { trials: 10_000, ..Default::default() };
    let none = perturbation_witness(&f, &rat(9, 10), Norm::LInf, &cfg);
    ensure(none.is_none(), || "witness found at 9/10".into())?;
    let g = perturbation_witness(&f, &rat(11, 10), Norm::LInf, &cfg).ok_or("no witness at 11/10")?;
    ensure(is_rootless(&g), || "witness has a root".into())?;
    ensure(ok(f.distance(&g, Norm::LInf))? <= rat(11, 10), || "witness too far".into())?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("Value(1), {probed} critical values monotone, witness only above 1, {took:?}"))
}

fn overdetermined() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut decisions = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=3);
        let c = random_complex(&mut rng, 6, n - 1, 4);
        let f = random_map(&mut rng, &c, n, 3);
        let norm = NORMS[rng.gen_range(0..3)];
        let mut alphas: Vec<CriticalValue> = f.critical_values(norm).into_iter().filter(|c| c.is_positive()).collect();
        alphas.push(rat(1, 3));
        for alpha in alphas {
            let v = ok(decide_robsat(&f, &alpha, norm))?;
            ensure(v.is_no(), || format!("dim {:?} < n = {n} gave {} at {alpha}", c.dim(), v.tag()))?;
            decisions += 1;
        }
    }
    Ok(format!("100 instances, {decisions} decisions, all RobustNo"))
}

fn winding() -> Outcome {
    const N: usize = 16;
    let mut seen = Vec::new();
    for w in -2..=2i64 {
        let f = annulus_map(N, w);
        let d = ok(decide_robsat_with(&f, &rat(1, 1), Norm::L1, DeciderOptions::default()))?;
        ensure(d.verdict.is_yes() == (w != 0), || format!("w = {w}: {}", d.verdict.tag()))?;
        let map = d.reduction.sphere_map.as_ref().ok_or("empty A")?;
        let sum = boundary_winding_sum(map.domain(), map.domain(), map, N);
        ensure(sum == 2 * w, || format!("w = {w}: oracle boundary winding {sum}"))?;
        let ext = d.extension.as_ref().ok_or("no extension verdict")?;
        let not_extends = matches!(ext, ExtendVerdict::NotExtends(_));
        ensure(not_extends == (sum != 0), || format!("w = {w}: decider {} vs oracle {sum}", ext.tag()))?;
        seen.push(format!("{w}:{}", d.verdict.tag()));
    }
    Ok(seen.join(" "))
}

fn fixture_correspondence() -> Outcome {
    let below = rat(99, 100);
    let (x, a, deg1) = degree_one_boundary();
    for norm in NORMS {
        let fx = ok(fixture_from_extension(&x, &a, &deg1, norm))?;
        let v = ok(decide_robsat(&fx.f, &below, norm))?;
        ensure(v.is_yes(), || format!("degree 1, {norm:?}: {}", v.tag()))?;
    }
    let constant = sphere_map(&a, 2, &[(1, "+e1"), (2, "+e1"), (3, "+e1"), (4, "+e1")]);
    let fx = ok(fixture_from_extension(&x, &a, &constant, Norm::LInf))?;
    let v = ok(decide_robsat(&fx.f, &rat(1, 2), Norm::LInf))?;
    ensure(v.is_no(), || format!("constant: {}", v.tag()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut compared, mut skipped, mut extends) = (0, 0, 0);
    let mut attempts = 0;
    while compared < 20 {
        attempts += 1;
        ensure(attempts < 2000, || format!("only {compared} comparable fixtures"))?;
        let n = rng.gen_range(1..=3);
        let x = random_complex(&mut rng, 5, 2, 3);
        let a = random_subcomplex(&mut rng, &x);
        if a.is_empty() {
            continue;
        }
        let Some(map) = random_sphere_map(&mut rng, &a, n) else { continue };
        let norm = NORMS[rng.gen_range(0..3)];
        let ext = ok(decide_extension(&x, &a, &map, DeciderOptions::default()))?;
        if matches!(ext, ExtendVerdict::Unknown(_)) {
            skipped += 1;
            continue;
        }
        let fx = ok(fixture_from_extension(&x, &a, &map, norm))?;
        let v = ok(decide_robsat(&fx.f, &below, norm))?;
        if matches!(v, RobVerdict::Unknown) {
            skipped += 1;
            continue;
        }
        let ext_yes = matches!(ext, ExtendVerdict::Extends(_));
        ensure(ext_yes == v.is_no(), || format!("n = {n}, X {x:?}, A {a:?}: {} vs {}", ext.tag(), v.tag()))?;
        extends += ext_yes as usize;
        compared += 1;
    }
    Ok(format!("disk cases hold; {compared} random fixtures agree ({extends} extend), {skipped} unknown skipped"))
}

fn monotone(verdicts: &[RobVerdict]) -> bool {
    let decided: Vec<bool> = verdicts.iter().filter(|v| !matches!(v, RobVerdict::Unknown)).map(RobVerdict::is_yes).collect();
    decided.windows(2).all(|w| w[0] || !w[1])
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decisions = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=3);
        let c = random_complex(&mut rng, 5, 3, 3);
        let f = random_map(&mut rng, &c, n, 2);
        let norm = NORMS[rng.gen_range(0..3)];
        let verdicts: Vec<RobVerdict> = f
            .critical_values(norm)
            .iter()
            .filter(|c| c.is_positive())
            .map(|alpha| decide_robsat(&f, alpha, norm))
            .collect::<robsat::Result<_>>()
            .map_err(|e| format!("instance {i}: {e}"))?;
        decisions += verdicts.len();
        ensure(monotone(&verdicts), || format!("instance {i}: {:?}", verdicts.iter().map(RobVerdict::tag).collect::<Vec<_>>()))?;
    }
    Ok(format!("50 instances, {decisions} decisions, monotone"))
}

/// Whether `x + ker M` meets `[-bound, bound]^n`, using an integer kernel
/// basis from the Hermite transform. Exact for kernels of dimension at most
/// one; larger kernels fall back to a wider exhaustive search.
fn fits_box(m: &IntMatrix, x: &[BigInt], bound: i64) -> bool {
    let hnf = column_hermite(m);
    let kernel: Vec<usize> = (hnf.pivots.len()..m.cols()).collect();
    let bound_q = int(bound);
    match kernel.as_slice() {
        [] => x.iter().all(|v| v.abs() <= BigInt::from(bound)),
        [k] => {
            // |x_r + t u_r| <= bound for every r, over integer t
            let (mut lo, mut hi) = (None::<Rational>, None::<Rational>);
            for (r, xr) in x.iter().enumerate() {
                let ur = hnf.u.get(r, *k);
                let xq = Rational::from_integer(xr.clone());
                if ur.is_zero() {
                    if xq.abs() > bound_q {
                        return false;
                    }
                    continue;
                }
                let uq = Rational::from_integer(ur.clone());
                let (a, b) = ((-&bound_q - &xq) / &uq, (&bound_q - &xq) / &uq);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                lo = Some(lo.map_or(a.clone(), |l| l.max(a)));
                hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
            }
            match (lo, hi) {
                (Some(l), Some(h)) => l.ceil() <= h.floor(),
                _ => true,
            }
        }
        _ => brute_diophantine(m, &m.apply(x), 4 * bound).is_some(),
    }
}

fn integer_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut solvable, mut outside) = (0, 0);
    for i in 0..500 {
        let (m, b) = random_system(&mut rng);
        let fast = smith_solve(&m, &b);
        let slow = brute_diophantine(&m, &b, 10);
        if let Some(x) = &fast {
            ensure(m.apply(x) == b, || format!("system {i}: bad solution"))?;
            solvable += 1;
        }
        match (&fast, &slow) {
            (Some(_), Some(_)) | (None, None) => {}
            (None, Some(x)) => return Err(format!("system {i}: brute found {x:?}, solver none")),
            (Some(x), None) => {
                ensure(!fits_box(&m, x, 10), || format!("system {i}: solver {x:?}, brute none"))?;
                outside += 1;
            }
        }
    }
    let mut certs = 0;
    let mut attempts = 0;
    while certs < 30 && attempts < 3000 {
        attempts += 1;
        let n = rng.gen_range(2..=3);
        let x = random_complex(&mut rng, 6, 3, 4);
        let a = random_subcomplex(&mut rng, &x);
        if a.is_empty() {
            continue;
        }
        let Some(map) = random_sphere_map(&mut rng, &a, n) else { continue };
        let z = pullback_cocycle(&map);
        if let Some(cert) = ok(cocycle_extension_solvable(&x, &a, &z))? {
            ensure(verify_certificate(&x, &a, &z, &cert), || "certificate failed".into())?;
            certs += 1;
        }
    }
    ensure(certs > 0, || "no certificates produced".into())?;
    Ok(format!("500 systems agree ({solvable} solvable, {outside} only outside the box), {certs} certificates re-verify"))
}

fn corpus() -> Vec<(PLMap, Norm)> {
    let mut out = Vec::new();
    for norm in NORMS {
        out.push((path(&[-1, 0, 1]), norm));
        out.push((path(&[3, -1, 3]), norm));
        out.push((path(&[2, 2]), norm));
        out.push((square_identity(2), norm));
    }
    out.push((annulus_map(8, 1), Norm::L1));
    out.push((annulus_map(8, 0), Norm::L1));
    let (x, a, deg1) = degree_one_boundary();
    out.push((fixture_from_extension(&x, &a, &deg1, Norm::LInf).unwrap().f, Norm::LInf));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = rng.gen_range(1..=2);
        let c = random_complex(&mut rng, 5, 2, 3);
        out.push((random_map(&mut rng, &c, n, 2), NORMS[rng.gen_range(0..3)]));
    }
    out
}

fn critical_membership() -> Outcome {
    let mut values = 0;
    let instances = corpus();
    for (i, (f, norm)) in instances.iter().enumerate() {
        let crit = f.critical_values(*norm);
        let r = ok(robustness(f, *norm))?;
        match &r {
            RobustnessResult::Unsatisfiable => ensure(!f.has_root(*norm), || format!("instance {i}: unsatisfiable with a root"))?,
            RobustnessResult::Value(v) => {
                ensure(crit.contains(v), || format!("instance {i}: {v} not critical"))?;
                if v.is_positive() {
                    ensure(ok(decide_robsat(f, v, *norm))?.is_yes(), || format!("instance {i}: not robust at {v}"))?;
                }
                if let Some(next) = crit.iter().find(|c| *c > v) {
                    ensure(ok(decide_robsat(f, next, *norm))?.is_no(), || format!("instance {i}: robust above {v}"))?;
                }
                values += 1;
            }
            RobustnessResult::Interval(lo, hi) => {
                ensure(lo < hi, || format!("instance {i}: empty interval"))?;
                ensure(lo.is_zero() || crit.contains(lo), || format!("instance {i}: lo {lo} not critical"))?;
                ensure(crit.contains(hi), || format!("instance {i}: hi {hi} not critical"))?;
            }
        }
    }
    Ok(format!("{} instances, {values} exact values checked", instances.len()))
}

fn random_polynomial(rng: &mut ChaCha8Rng, m: usize) -> Polynomial {
    let mut p = Polynomial::constant(m, int(rng.gen_range(-3..=3)));
    for _ in 0..rng.gen_range(1..=4) {
        let mut term = Polynomial::constant(m, frac(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        let degree = rng.gen_range(1..=3);
        for _ in 0..degree {
            term = term.mul(&Polynomial::variable(m, rng.gen_range(0..m)));
        }
        p = p.add(&term);
    }
    p
}

fn sampling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..20 {
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let polys: Vec<Polynomial> = (0..k).map(|_| random_polynomial(&mut rng, m)).collect();
        let res = [8, 4, 2][m - 1];
        let grid = ok(freudenthal_grid(&vec![(int(-1), int(1)); m], &vec![res; m]))?;
        let s = ok(sample_polynomial(&polys, &grid))?;
        for _ in 0..1000 {
            let x: Vec<_> = (0..m).map(|_| frac(rng.gen_range(-1000..=1000), 1000)).collect();
            let (simplex, weights) = grid.locate(&x).ok_or("point outside grid")?;
            let pl = s.f.evaluate_local(&simplex, &weights);
            for (j, p) in polys.iter().enumerate() {
                let gap = robsat::rational::abs(&(p.eval(&x) - &pl[j]));
                ensure(gap <= s.component_eps[j], || format!("system {i}, component {j}: gap {gap} > {}", s.component_eps[j]))?;
            }
        }
    }
    let p = ok(Polynomial::parse("x^2 + 1", &["x"]))?;
    let d = ok(decide_sampled(&[p], &[(int(-2), int(2))], 4, &frac(1, 2), &frac(1, 4), Norm::LInf))?;
    ensure(d.verdict == SampledVerdict::ExistsAlphaPlusEpsNoRoot, || format!("x^2+1: {}", d.verdict.tag()))?;
    Ok(format!("20 systems x 1000 points within bound; x^2+1 -> {} at resolution {}", d.verdict.tag(), d.resolution))
}

fn unknown_honesty() -> Outcome {
    let f = four_simplex_instance();
    ensure(f.has_root(Norm::LInf), || "fixture lost its root".into())?;
    for alpha in [rat(1, 10), rat(1, 5)] {
        let v = ok(decide_robsat(&f, &alpha, Norm::LInf))?;
        ensure(matches!(v, RobVerdict::Unknown), || format!("at {alpha}: {}", v.tag()))?;
    }
    let path = std::env::temp_dir().join(format!("robsat-acceptance-{}.json", std::process::id()));
    let file = InstanceFile::from_instance(&Instance::new(f, Norm::LInf));
    std::fs::write(&path, file.to_json()).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_robsat"))
        .args(["decide", "-i"])
        .arg(&path)
        .args(["--alpha", "1/10"])
        .output()
        .map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&path);
    ensure(out.status.code() == Some(3), || format!("exit code {:?}", out.status.code()))?;
    Ok("Unknown at 1/10 and 1/5, CLI exit 3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1-D exactness", one_d_exactness),
        ("worked trace", worked_trace),
        ("equal-dimension square", equal_dimension),
        ("overdetermined rule", overdetermined),
        ("annulus winding", winding),
        ("fixture correspondence", fixture_correspondence),
        ("monotonicity", monotonicity),
        ("integer algebra", integer_algebra),
        ("critical-value membership", critical_membership),
        ("sampling rigor", sampling),
        ("unknown honesty", unknown_honesty),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
