// Parse a coefficient and compute a few of its norms.

use sturm_bounds::coeff::parse_expr;
use sturm_bounds::exponent::Exponent;
use sturm_bounds::norms::{self, NormOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = parse_expr("-2*sech(x)^2")?;
    let opts = NormOptions { tol: 1e-10, start: 8.0, tail: None };
    let l1 = norms::lp_norm(&q, Exponent::ONE, &opts)?;
    let sup = norms::ess_sup(&q, &opts);
    let unif = norms::uniform_local_norm(&q, &opts)?;
    println!("q = {q}");
    println!("‖q‖_1 = {:.10} (error {:.1e})", l1.value().unwrap(), l1.abs_error_estimate);
    println!("‖q‖_inf = {:.10}", sup.value().unwrap());
    println!("‖q‖_u = {:.10}", unif.value().unwrap());
    assert!((l1.value().unwrap() - 4.0).abs() < 1e-8);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
