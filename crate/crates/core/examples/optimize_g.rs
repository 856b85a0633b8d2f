// Optimize a constant g when 1/r is unbounded.

use sturm_bounds::bounds::{optimize_constant_g, thm1_params};
use sturm_bounds::catalogue;
use sturm_bounds::coeff::decompose_q;
use sturm_bounds::norms::{self, NormOptions, OmegaContext};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prob = catalogue::get("vanishing_weight").unwrap();
    let start = prob.base_half_length();
    let (_, q_minus) = decompose_q(&prob.q);
    let opts = NormOptions { tol: 1e-10, start, tail: None };
    let qu = norms::uniform_local_norm(&q_minus, &opts)?.upper().unwrap();
    let ip = norms::ess_sup(&prob.inv_p(), &opts).upper().unwrap();
    let (alpha, beta) = thm1_params(qu, ip);
    let ctx = OmegaContext {
        ab: prob.ab,
        essinf_outside: norms::ess_inf_outside(&prob.r, prob.ab, start, None).unwrap(),
        inv_r_tail: None,
        start,
    };
    let opt = optimize_constant_g(alpha, beta, &prob.r, &ctx)?;
    println!("alpha = {alpha}, beta = {beta}");
    println!("c* = {:.6} (4 beta = {:.6})", opt.c, 4.0 * beta);
    println!("bound = {:.6} (-8 alpha beta = {:.6})", opt.bound, -8.0 * alpha * beta);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
