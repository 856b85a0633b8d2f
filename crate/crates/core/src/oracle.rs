//! Dirichlet truncation plus a three-point scheme, giving an independent
//! estimate of `min σ(T)` from above.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coeff::{Expr, Problem};
use crate::error::OracleError;

/// Stand-in for `r` at nodes where it vanishes.
pub const R_FLOOR: f64 = 1e-12;

/// `A v = λ R v` for the interior nodes `x_i = -L + i h`, `i = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePencil {
    pub n: usize,
    pub h: f64,
    pub half_length: f64,
    pub diag: Vec<f64>,
    /// `off[i]` couples nodes `i` and `i + 1`
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
}

/// Value at `x`; on a breakpoint the mean of the one-sided limits, since a
/// jump has no meaningful point value.
fn sample(f: &Expr, breaks: &[f64], x: f64, name: &'static str) -> Result<f64, OracleError> {
    let err = |source| OracleError::Coefficient { name, x, source };
    if breaks.binary_search_by(|b| b.total_cmp(&x)).is_ok() {
        let d = 1e-12 * (1.0 + x.abs());
        let lo = f.eval(x - d).map_err(err)?;
        let hi = f.eval(x + d).map_err(err)?;
        return Ok(0.5 * (lo + hi));
    }
    f.eval(x).map_err(err)
}

/// Assembles the pencil on `[-l, l]` with `n` cells.
pub fn discretize(prob: &Problem, l: f64, n: usize) -> Result<DiscretePencil, OracleError> {
    if n < 2 {
        return Err(OracleError::GridTooSmall(n));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(OracleError::BadLength(l));
    }
    let h = 2.0 * l / n as f64;
    let m = n - 1;
    let (pb, qb, rb) = (prob.p.breakpoints(), prob.q.breakpoints(), prob.r.breakpoints());
    let node = |i: usize| -l + i as f64 * h;
    let mut p_mid = Vec::with_capacity(n);
    for i in 0..n {
        p_mid.push(sample(&prob.p, &pb, node(i) + 0.5 * h, "p")?);
    }
    let h2 = h * h;
    let mut diag = Vec::with_capacity(m);
    let mut mass = Vec::with_capacity(m);
    for i in 1..n {
        let x = node(i);
        let q = sample(&prob.q, &qb, x, "q")?;
        diag.push((p_mid[i - 1] + p_mid[i]) / h2 + q);
        let r = sample(&prob.r, &rb, x, "r")?;
        mass.push(if r > R_FLOOR { r } else { R_FLOOR });
    }
    let off = (1..m).map(|i| -p_mid[i] / h2).collect();
    Ok(DiscretePencil { n, h, half_length: l, diag, off, mass })
}

impl DiscretePencil {
    /// Number of pencil eigenvalues below `lambda`: the negative pivots of
    /// `LDLᵀ = A - λR`.
    pub fn sturm_count(&self, lambda: f64) -> Result<usize, OracleError> {
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..self.diag.len() {
            let a = self.diag[i] - lambda * self.mass[i];
            d = if i == 0 { a } else { a - self.off[i - 1] * self.off[i - 1] / d };
            if d == 0.0 || !d.is_finite() {
                return Err(OracleError::PivotBreakdown(lambda));
            }
            if d < 0.0 {
                count += 1;
            }
        }
        Ok(count)
    }

    fn count_retrying(&self, lambda: f64, tol: f64) -> Result<usize, OracleError> {
        let mut x = lambda;
        let step = (tol / 8.0).max(16.0 * f64::EPSILON * lambda.abs());
        for _ in 0..8 {
            match self.sturm_count(x) {
                Err(OracleError::PivotBreakdown(_)) => x += step,
                other => return other,
            }
        }
        Err(OracleError::PivotBreakdown(lambda))
    }

    /// Gershgorin interval of `R^{-1/2} A R^{-1/2}`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let m = self.diag.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..m {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs() / (self.mass[i - 1] * self.mass[i]).sqrt();
            }
            if i + 1 < m {
                radius += self.off[i].abs() / (self.mass[i] * self.mass[i + 1]).sqrt();
            }
            let c = self.diag[i] / self.mass[i];
            lo = lo.min(c - radius);
            hi = hi.max(c + radius);
        }
        (lo, hi)
    }

    /// `vᵀ A v / vᵀ R v`.
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.diag.len() {
            num += self.diag[i] * v[i] * v[i];
            if i + 1 < self.diag.len() {
                num += 2.0 * self.off[i] * v[i] * v[i + 1];
            }
            den += self.mass[i] * v[i] * v[i];
        }
        num / den
    }
}

/// Smallest pencil eigenvalue to absolute accuracy `tol`, bisecting from
/// the default bracket.
pub fn min_eigenvalue(pencil: &DiscretePencil, tol: f64) -> Result<f64, OracleError> {
    min_eigenvalue_near(pencil, tol, None)
}

/// As `min_eigenvalue`; `hint` (usually a certified lower bound) sets the
/// left end of the bracket to `-10 (1 + |hint|)` when that is below the
/// spectrum.
pub fn min_eigenvalue_near(pencil: &DiscretePencil, tol: f64, hint: Option<f64>) -> Result<f64, OracleError> {
    let (g_lo, g_hi) = pencil.gershgorin();
    let mut lo = g_lo;
    if let Some(hint) = hint {
        let guess = -10.0 * (1.0 + hint.abs());
        if guess > g_lo && pencil.count_retrying(guess, tol)? == 0 {
            lo = guess;
        }
    }
    let mut hi = g_hi + tol;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pencil.count_retrying(mid, tol)? >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refinement {
    #[serde(rename = "L")]
    pub half_length: f64,
    pub n: usize,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub lambda_min: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub n: usize,
    pub refinement_history: Vec<Refinement>,
    pub converged: bool,
}

impl SpectralEstimate {
    /// `|λ(final) - λ(previous refinement)|`, infinite with fewer than two
    /// solves.
    pub fn last_change(&self) -> f64 {
        match self.refinement_history.as_slice() {
            [.., a, b] => (b.lambda_min - a.lambda_min).abs(),
            _ => f64::INFINITY,
        }
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("L,n,lambda_min\n");
        for r in &self.refinement_history {
            let _ = writeln!(out, "{},{},{}", r.half_length, r.n, r.lambda_min);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// convergence threshold between successive refinements
    pub tol: f64,
    pub start_l: f64,
    pub max_l: f64,
    pub start_n: usize,
    pub max_n: usize,
    /// certified bound used to narrow the bisection bracket
    pub hint: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { tol: 1e-6, start_l: 8.0, max_l: 16384.0, start_n: 1 << 12, max_n: 1 << 20, hint: None }
    }
}

/// Runs the refinement ladder: for `L = 8, 16, ...` the grid doubles until
/// successive eigenvalues agree to `tol`, and the ladder stops once two
/// successive `L` agree. Each `L` starts from the coarser grid of the pair
/// that settled the previous one. An exhausted ladder returns
/// `converged = false`.
pub fn estimate_min_spectrum(prob: &Problem, opts: &OracleOptions) -> Result<SpectralEstimate, OracleError> {
    let solve_tol = (opts.tol * 1e-3).max(1e-13);
    let mut history: Vec<Refinement> = Vec::new();
    let mut l = opts.start_l;
    let mut n_carry = 0usize;
    let mut lambda_prev_l: Option<f64> = None;
    while l <= opts.max_l {
        let mut n = opts.start_n.max(n_carry).min(opts.max_n);
        let mut lambda_prev_n: Option<f64> = None;
        let mut mesh_converged = false;
        loop {
            let pencil = discretize(prob, l, n)?;
            let lambda = min_eigenvalue_near(&pencil, solve_tol, opts.hint)?;
            history.push(Refinement { half_length: l, n, lambda_min: lambda });
            if lambda_prev_n.is_some_and(|p| (lambda - p).abs() < opts.tol) {
                mesh_converged = true;
                // the next L starts from the coarser grid of the pair
                n_carry = n / 2;
                break;
            }
            lambda_prev_n = Some(lambda);
            if 2 * n > opts.max_n {
                n_carry = n;
                break;
            }
            n *= 2;
        }
        let lambda_l = history.last().expect("at least one solve").lambda_min;
        if mesh_converged && lambda_prev_l.is_some_and(|p| (lambda_l - p).abs() < opts.tol) {
            return Ok(finish(history, true));
        }
        lambda_prev_l = Some(lambda_l);
        l *= 2.0;
    }
    if history.is_empty() {
        return Err(OracleError::Exhausted { steps: 0 });
    }
    Ok(finish(history, false))
}

fn finish(history: Vec<Refinement>, converged: bool) -> SpectralEstimate {
    let last = *history.last().expect("nonempty history");
    SpectralEstimate { lambda_min: last.lambda_min, half_length: last.half_length, n: last.n, refinement_history: history, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::TailFile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prob(p: &str, q: &str, r: &str) -> Problem {
        Problem::from_strs("t", p, q, r, (-1.0, 1.0), &TailFile::new()).unwrap()
    }

    #[test]
    fn single_node() {
        let pencil = discretize(&prob("1", "0", "1"), 1.0, 2).unwrap();
        assert_eq!(pencil.diag, vec![2.0]);
        assert_eq!(pencil.mass, vec![1.0]);
        assert!((min_eigenvalue(&pencil, 1e-12).unwrap() - 2.0).abs() < 1e-11);
        assert_eq!(discretize(&prob("1", "0", "1"), 1.0, 1), Err(OracleError::GridTooSmall(1)));
    }

    #[test]
    fn dirichlet_laplacian() {
        let pencil = discretize(&prob("1", "0", "1"), 10.0, 4096).unwrap();
        let lambda = min_eigenvalue(&pencil, 1e-12).unwrap();
        let exact = (std::f64::consts::PI / 20.0).powi(2);
        assert!(((lambda - exact) / exact).abs() < 1e-4, "{lambda}");
        assert!(pencil.off.iter().all(|&e| e <= 0.0));
    }

    #[test]
    fn shift_identity() {
        let base = discretize(&prob("1", "-2*sech(x)^2", "1"), 8.0, 1024).unwrap();
        let shifted = discretize(&prob("1", "-2*sech(x)^2+3.7", "1"), 8.0, 1024).unwrap();
        let a = min_eigenvalue(&base, 1e-12).unwrap();
        let b = min_eigenvalue(&shifted, 1e-12).unwrap();
        assert!((b - a - 3.7).abs() < 1e-10);
        let q5 = discretize(&prob("1", "5", "1"), 4.0, 256).unwrap();
        let q0 = discretize(&prob("1", "0", "1"), 4.0, 256).unwrap();
        for (x, y) in q5.diag.iter().zip(&q0.diag) {
            assert_eq!(*x, *y + 5.0);
        }
    }

    #[test]
    fn weight_floor() {
        let pencil = discretize(&prob("1", "0", "min(1,abs(x))"), 4.0, 8).unwrap();
        // node 4 sits at x = 0
        assert_eq!(pencil.mass[3], R_FLOOR);
        assert!(pencil.mass.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn poschl_teller_ground_state() {
        let est = estimate_min_spectrum(&prob("1", "-2*sech(x)^2", "1"), &OracleOptions::default()).unwrap();
        assert!(est.converged);
        assert!((est.lambda_min + 1.0).abs() < 1e-3, "{}", est.lambda_min);
    }

    #[test]
    fn free_operator_slow_convergence() {
        let opts = OracleOptions { tol: 1e-2, ..OracleOptions::default() };
        let est = estimate_min_spectrum(&prob("1", "0", "1"), &opts).unwrap();
        assert!(est.converged);
        assert!(est.lambda_min > -1e-3 && est.lambda_min < 1e-2, "{}", est.lambda_min);
    }

    #[test]
    fn sturm_count_monotone() {
        let pencil = discretize(&prob("1", "-2*sech(x)^2", "1"), 8.0, 512).unwrap();
        let mut last = 0;
        for i in 0..200 {
            let lambda = -3.0 + 0.05 * i as f64;
            let c = pencil.sturm_count(lambda).unwrap();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn rayleigh_quotients_above_minimum() {
        let pencil = discretize(&prob("1+x^2", "-3*indicator(-1,1)", "min(1,abs(x))"), 6.0, 500).unwrap();
        let lambda = min_eigenvalue(&pencil, 1e-10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v: Vec<f64> = (0..pencil.diag.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(pencil.rayleigh_quotient(&v) >= lambda - 1e-10);
        }
    }

    #[test]
    fn domain_monotone_at_fixed_mesh() {
        let p = prob("1", "-indicator(0,1)", "1");
        let h = 1.0 / 256.0;
        let lam = |l: f64| {
            let n = (2.0 * l / h) as usize;
            min_eigenvalue(&discretize(&p, l, n).unwrap(), 1e-13).unwrap()
        };
        let (a, b, c) = (lam(8.0), lam(16.0), lam(32.0));
        assert!(a >= b && b >= c - 1e-10, "{a} {b} {c}");
    }

    #[test]
    fn second_order_mesh_convergence() {
        let p = prob("1", "-2*sech(x)^2", "1");
        let lam = |n: usize| min_eigenvalue(&discretize(&p, 8.0, n).unwrap(), 1e-14).unwrap();
        let (a, b, c) = (lam(512), lam(1024), lam(2048));
        let ratio = (a - b) / (b - c);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    /// Even ground state of a finite well of depth `v` on `[0, 1]`:
    /// `k tan(k/2) = κ` with `k² + κ² = v`, so `λ = -κ²`.
    fn well_ground_state(v: f64) -> f64 {
        let f = |k: f64| k * (k / 2.0).tan() - (v - k * k).sqrt();
        let (mut lo, mut hi) = (1e-12, v.sqrt().min(std::f64::consts::PI - 1e-12));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = 0.5 * (lo + hi);
        -(v - k * k)
    }

    #[test]
    fn square_well_against_transcendental_equation() {
        for v in [1.0, 10.0, 50.0] {
            let est = estimate_min_spectrum(&prob("1", &format!("-{v}*indicator(0,1)"), "1"), &OracleOptions::default()).unwrap();
            let exact = well_ground_state(v);
            assert!(est.converged);
            assert!((est.lambda_min - exact).abs() < 1e-4 * exact.abs().max(1.0), "{v}: {} vs {exact}", est.lambda_min);
        }
    }

    #[test]
    fn history_csv_shape() {
        let opts = OracleOptions { tol: 1e-4, ..OracleOptions::default() };
        let est = estimate_min_spectrum(&prob("1", "-2*sech(x)^2", "1"), &opts).unwrap();
        let csv = est.history_csv();
        assert!(csv.starts_with("L,n,lambda_min\n"));
        assert_eq!(csv.lines().count(), est.refinement_history.len() + 1);
        assert!(est.last_change() < 1e-4);
    }
}
