// Acceptance criteria 1-9, one pass/fail line each. Runs without the libtest
// harness so the lines are always printed.

use std::panic;
use std::time::{Duration, Instant};

use sturm_bounds::bounds::{
    best_bound, evaluate_all, optimize_constant_g, remark_comparison_table, thm1_closed_form, thm1_params, thm2_closed_form,
    thm3_closed_form, warmup_constant, GChoice, GStrategy, ProblemNorms, SearchGrid, Theorem,
};
use sturm_bounds::catalogue;
use sturm_bounds::coeff::{Problem, TailFile};
use sturm_bounds::exponent::Exponent;
use sturm_bounds::norms::OmegaContext;
use sturm_bounds::oracle::{discretize, estimate_min_spectrum, min_eigenvalue, OracleOptions};
use sturm_bounds::verify::{fuzz_sobolev_inequalities, validate_bounds, Status, VerifyOptions, IDENTITY_TOL};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:?}, limit {limit:?}"))?;
    Ok(e)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn criterion_1() -> Check {
    let c = warmup_constant(Exponent::Finite(1.5));
    ensure((c - 0.28867).abs() < 1e-5, format!("C(3/2) = {c}"))?;
    ensure((c - 0.5 / 3f64.sqrt()).abs() < 1e-15, format!("C(3/2) = {c} vs 1/(2 sqrt 3)"))?;
    Ok(format!("C(3/2) = {c:.8}"))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let prob = catalogue::get("poschl_teller").unwrap();
    let direct = min_eigenvalue(&discretize(&prob, 32.0, 1 << 15).map_err(|e| e.to_string())?, 1e-10).map_err(|e| e.to_string())?;
    ensure((direct + 1.0).abs() < 1e-3, format!("lambda(L=32, n=2^15) = {direct}"))?;
    let grid = SearchGrid { s: vec![Exponent::ONE, Exponent::Infinite], ..SearchGrid::default() };
    let rep = validate_bounds(&prob, &grid, &VerifyOptions { trials: 0, ..VerifyOptions::default() }).map_err(|e| e.to_string())?;
    let lambda = rep.oracle.lambda_min;
    ensure(rep.oracle.converged && (lambda + 1.0).abs() < 1e-3, format!("oracle {lambda}"))?;
    let warm: Vec<f64> = rep.bounds.iter().filter(|b| b.theorem == Theorem::Warmup).filter_map(|b| b.bound).collect();
    ensure(warm.len() == 2, "expected two warm-up bounds")?;
    ensure((warm[0] + 4.0).abs() < 1e-6 && (warm[1] + 2.0).abs() < 1e-6, format!("warm-up bounds {warm:?}"))?;
    ensure(warm.iter().all(|b| *b <= lambda + rep.margin), "warm-up bound above oracle")?;
    let best_warm = warm.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure((best_warm + 2.0).abs() < 1e-6, format!("best warm-up {best_warm}"))?;
    ensure(rep.status == Status::Pass, format!("status {:?}", rep.status))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("lambda = {lambda:.6} (direct {direct:.6}), warm-up -4 and -2, best -2, {e:.1?}"))
}

/// Even ground state of a depth-`v` well of width 1: `k tan(k/2) = κ`,
/// `k^2 + κ^2 = v`; returns `-κ^2`.
fn square_well_ground(v: f64) -> f64 {
    let f = |k: f64| k * (k / 2.0).tan() - (v - k * k).sqrt();
    let (mut lo, mut hi) = (0.0, v.sqrt().min(std::f64::consts::PI - 1e-12));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    k * k - v
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let prob = catalogue::get("square_well_1").unwrap();
    let best = best_bound(&prob, &SearchGrid { s: vec![Exponent::ONE], ..SearchGrid::default() }, 1e-10);
    let warm = best.results.iter().find(|b| b.theorem == Theorem::Warmup).and_then(|b| b.bound).ok_or("no warm-up bound")?;
    ensure((warm + 0.25).abs() < 1e-9, format!("warm-up bound {warm}"))?;
    let est = estimate_min_spectrum(&prob, &OracleOptions::default()).map_err(|e| e.to_string())?;
    ensure(est.converged, "oracle did not converge")?;
    let lambda = est.lambda_min;
    let mut extra = Vec::new();
    for (l, n) in [(est.half_length, 2 * est.n), (2.0 * est.half_length, 4 * est.n)] {
        let pencil = discretize(&prob, l, n).map_err(|e| e.to_string())?;
        extra.push(min_eigenvalue(&pencil, 1e-10).map_err(|e| e.to_string())?);
    }
    ensure(extra.iter().all(|x| (x - lambda).abs() < 1e-5), format!("extra refinements {extra:?} vs {lambda}"))?;
    let exact = square_well_ground(1.0);
    ensure((lambda - exact).abs() < 1e-4, format!("oracle {lambda} vs transcendental {exact}"))?;
    ensure(-0.25 <= lambda && lambda < 0.0, format!("lambda = {lambda}"))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("-0.25 <= {lambda:.6} < 0 (transcendental {exact:.6}), {e:.1?}"))
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let prob = catalogue::get("growing_p").unwrap();
    let best = best_bound(&prob, &SearchGrid::default(), 1e-10);
    let pi = std::f64::consts::PI;
    let ip1 = best.norms.inv_p_1.value().ok_or("‖1/p‖_1 infinite")?;
    let ip1_hi = best.norms.inv_p_1.upper().unwrap();
    // the 1/x^2 tail beyond the domain cap leaves 2/2^20 unintegrated; it is carried in the error
    ensure(ip1 <= pi && pi <= ip1_hi, format!("π not in [{ip1}, {ip1_hi}]"))?;
    ensure((ip1 - pi).abs() < 2.5 / sturm_bounds::norms::DOMAIN_CAP, format!("‖1/p‖_1 = {ip1}"))?;
    let product = ip1 * best.norms.q_minus_1.value().unwrap();
    ensure((product - 0.2 * pi).abs() < 1e-6 && product < 1.0, format!("product {product}"))?;
    let top = best.best.ok_or("no certified bound")?;
    ensure(top.theorem == Theorem::Prop && top.bound == Some(0.0), format!("best {}", top.tag()))?;
    let est = estimate_min_spectrum(&prob, &OracleOptions::default()).map_err(|e| e.to_string())?;
    ensure(est.lambda_min >= -1e-4, format!("oracle {}", est.lambda_min))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("‖1/p‖_1 = {ip1:.8}, product {product:.4}, bound 0, oracle {:.6}, {e:.1?}", est.lambda_min))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let prob = catalogue::get("vanishing_weight").unwrap();
    let norms = ProblemNorms::compute(&prob, &SearchGrid::default(), 1e-10);
    let (alpha, beta) = thm1_params(norms.q_minus_u.upper().unwrap(), norms.inv_p_sup.upper().unwrap());
    let ctx = OmegaContext {
        ab: prob.ab,
        essinf_outside: norms.r_essinf_outside_ab.ok_or("ess inf missing")?,
        inv_r_tail: prob.tails.inv_r,
        start: prob.base_half_length(),
    };
    let opt = optimize_constant_g(alpha, beta, &prob.r, &ctx).map_err(|e| e.to_string())?;
    ensure(rel_close(opt.c, 4.0 * beta, 0.01), format!("c* = {} vs 4 beta = {}", opt.c, 4.0 * beta))?;
    ensure(rel_close(opt.bound, -8.0 * alpha * beta, 0.01), format!("bound {} vs {}", opt.bound, -8.0 * alpha * beta))?;
    let rep = validate_bounds(&prob, &SearchGrid::default(), &VerifyOptions { trials: 0, ..VerifyOptions::default() })
        .map_err(|e| e.to_string())?;
    ensure(rep.oracle.converged, "oracle did not converge")?;
    let thm1 = rep
        .bounds
        .iter()
        .find(|b| b.theorem == Theorem::Thm1 && matches!(b.g, Some(GChoice::Constant(_))))
        .and_then(|b| b.bound)
        .ok_or("no Thm1 bound with constant g")?;
    ensure(rel_close(thm1, opt.bound, 1e-9), format!("pipeline Thm1 {thm1} vs optimizer {}", opt.bound))?;
    ensure(thm1 <= rep.oracle.lambda_min + rep.margin, format!("{thm1} above oracle {}", rep.oracle.lambda_min))?;
    ensure(rep.all_bounds_below_oracle, "some bound above oracle")?;
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!("c* = {:.6} (4β = {:.6}), bound {:.4} (-8αβ = {:.4}) <= oracle {:.6}, {e:.1?}", opt.c, 4.0 * beta, opt.bound, -8.0 * alpha * beta, rep.oracle.lambda_min))
}

fn criterion_6() -> Check {
    let grid = SearchGrid { g: GStrategy::InvR, ..SearchGrid::default() };
    let mut checked = 0;
    let mut problems = 0;
    for prob in catalogue::problems() {
        let norms = ProblemNorms::compute(&prob, &grid, 1e-10);
        let Some(ir) = norms.inv_r_sup.upper() else { continue };
        problems += 1;
        let ip = norms.inv_p_sup.upper();
        for r in evaluate_all(&prob, &grid, &norms) {
            let Some(general) = r.bound else { continue };
            let closed = match r.theorem {
                Theorem::Thm1 => thm1_closed_form(norms.q_minus_u.upper().unwrap(), ip.unwrap(), ir),
                Theorem::Thm2 => {
                    let s = r.s.unwrap();
                    thm2_closed_form(norms.q_minus_s(s).unwrap().upper().unwrap(), s, ip.unwrap(), ir)
                }
                Theorem::Thm3 => {
                    let (s, eta) = (r.s.unwrap(), r.eta.unwrap());
                    let pe = norms.inv_p_eta(eta).unwrap().upper().unwrap();
                    thm3_closed_form(norms.q_minus_s(s).unwrap().upper().unwrap(), s, pe, eta.finite().unwrap(), ir)
                }
                _ => continue,
            };
            ensure(rel_close(general, closed, 1e-12), format!("{} {}: general {general} vs closed {closed}", prob.name, r.tag()))?;
            checked += 1;
        }
    }
    ensure(checked > 0, "nothing checked")?;
    Ok(format!("{checked} bounds on {problems} problems agree to 1e-12"))
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let mut summary = Vec::new();
    for prob in catalogue::problems() {
        let fuzz = fuzz_sobolev_inequalities(&prob, &[1.0, 2.0], 1000, 0).map_err(|e| e.to_string())?;
        ensure(fuzz.trials == 1000, "wrong trial count")?;
        for s in &fuzz.inequalities {
            ensure(s.violations == 0, format!("{}: {} violations of {}", prob.name, s.violations, s.name))?;
        }
        for name in ["sup_l2", "sup_weighted(eta=1)", "sup_weighted(eta=2)", "unit_interval(eps=0.1)", "unit_interval(eps=1)", "unit_interval(eps=10)"] {
            ensure(fuzz.stats(name).is_some_and(|s| s.checks > 0), format!("{}: {name} never checked", prob.name))?;
        }
        ensure(fuzz.identity_failures == 0 && fuzz.identity_worst_ratio < IDENTITY_TOL, format!("{}: identity {}", prob.name, fuzz.identity_worst_ratio))?;
        summary.push(format!("{}:{}", prob.name, fuzz.nonpositive_form_trials));
    }
    let e = within(t, Duration::from_secs(60))?;
    Ok(format!("0 violations over 7 x 1000 trials (nonpositive-form trials {}), {e:.1?}", summary.join(" ")))
}

fn criterion_8() -> Check {
    let free = Problem::from_strs("free", "1", "0", "1", (-1.0, 1.0), &TailFile::new()).unwrap();
    let eig = |p: &Problem, l: f64, n: usize| -> Result<f64, String> {
        let pencil = discretize(p, l, n).map_err(|e| e.to_string())?;
        min_eigenvalue(&pencil, 1e-13).map_err(|e| e.to_string())
    };
    let mut worst = 0f64;
    for l in [8.0, 16.0, 32.0] {
        let exact = (std::f64::consts::PI / (2.0 * l)).powi(2);
        let got = eig(&free, l, 1 << 12)?;
        let rel = (got - exact).abs() / exact;
        ensure(rel < 1e-4, format!("L = {l}: {got} vs {exact}"))?;
        worst = worst.max(rel);
    }
    let exact = (std::f64::consts::PI / 2.0).powi(2);
    let e1 = (eig(&free, 1.0, 32)? - exact).abs();
    let e2 = (eig(&free, 1.0, 64)? - exact).abs();
    let ratio = e1 / e2;
    ensure((3.5..=4.5).contains(&ratio), format!("mesh-halving ratio {ratio}"))?;
    for prob in catalogue::problems() {
        // same spacing h = 1/64 on every window
        let l8 = eig(&prob, 8.0, 1 << 10)?;
        let l16 = eig(&prob, 16.0, 1 << 11)?;
        let l32 = eig(&prob, 32.0, 1 << 12)?;
        ensure(l8 >= l16 - 1e-10 && l16 >= l32 - 1e-10, format!("{}: {l8} {l16} {l32}", prob.name))?;
    }
    Ok(format!("worst relative error {worst:.2e}, ratio {ratio:.4}, monotone on every catalogue problem"))
}

fn criterion_9() -> Check {
    let table = remark_comparison_table(&[Exponent::ONE, Exponent::Finite(1.5), Exponent::Finite(2.0)]);
    ensure(table[0].thm2_constant == 4.0 && table[0].warmup_constant == 0.25, format!("s = 1 row {:?}", table[0]))?;
    for row in &table {
        ensure(row.thm2_constant > row.warmup_constant, format!("s = {}: {row:?}", row.s))?;
    }
    Ok(table.iter().map(|r| format!("s={}: {:.4} vs {:.4}", r.s, r.thm2_constant, r.warmup_constant)).collect::<Vec<_>>().join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("warm-up constant at s = 3/2", criterion_1),
        ("Pöschl–Teller validation", criterion_2),
        ("square well", criterion_3),
        ("nonnegativity case", criterion_4),
        ("weighted g optimization", criterion_5),
        ("special-case consistency", criterion_6),
        ("lemma fuzzing", criterion_7),
        ("oracle calibration", criterion_8),
        ("comparison table", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL  {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
