// Ground state of the Pöschl–Teller well from the refinement ladder.

use sturm_bounds::catalogue;
use sturm_bounds::oracle::{estimate_min_spectrum, OracleOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prob = catalogue::get("poschl_teller").unwrap();
    let est = estimate_min_spectrum(&prob, &OracleOptions::default())?;
    print!("{}", est.history_csv());
    println!("lambda_min = {:.8}, converged = {}", est.lambda_min, est.converged);
    assert!((est.lambda_min + 1.0).abs() < 1e-3);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
