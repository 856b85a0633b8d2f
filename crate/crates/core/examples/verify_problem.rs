// Validate every bound for a user-defined problem against the oracle.

use sturm_bounds::bounds::SearchGrid;
use sturm_bounds::coeff::{Problem, TailFile};
use sturm_bounds::verify::{validate_bounds, Status, VerifyOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prob = Problem::from_strs("gaussian", "1", "-3*exp(-x^2)", "1", (-1.0, 1.0), &TailFile::new())?;
    let opts = VerifyOptions { trials: 100, ..VerifyOptions::default() };
    let rep = validate_bounds(&prob, &SearchGrid::default(), &opts)?;
    let best = rep.best.as_ref().unwrap();
    println!("best {} = {:.6}", best.tag(), best.bound.unwrap());
    println!("oracle = {:.6} +- {:.1e}", rep.oracle.lambda_min, rep.margin);
    println!("status = {:?}", rep.status);
    assert_eq!(rep.status, Status::Pass);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
