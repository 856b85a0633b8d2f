// Warm-up bounds for a Schrödinger operator across several s.

use sturm_bounds::bounds::{warmup_bound, warmup_constant};
use sturm_bounds::coeff::parse_expr;
use sturm_bounds::exponent::Exponent;
use sturm_bounds::norms::{self, NormOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = parse_expr("-2*sech(x)^2")?;
    let opts = NormOptions { tol: 1e-10, start: 8.0, tail: None };
    for s in Exponent::parse_list("1,3/2,2,inf")?.unwrap() {
        let norm = norms::lp_norm(&q, s, &opts)?;
        let b = warmup_bound(&norm, s, true);
        println!("s = {s:<4} C(s) = {:.6}  bound = {:.6}", warmup_constant(s), b.bound.unwrap());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
