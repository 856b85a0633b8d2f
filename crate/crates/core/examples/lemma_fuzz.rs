// Fuzz the Sobolev-type inequalities with random piecewise-linear functions.

use sturm_bounds::catalogue;
use sturm_bounds::verify::fuzz_sobolev_inequalities;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prob = catalogue::get("square_well_10").unwrap();
    let fuzz = fuzz_sobolev_inequalities(&prob, &[1.0, 2.0], 200, 7)?;
    for s in &fuzz.inequalities {
        println!("{:<20} checks {:>5}  violations {}  worst slack {:.3e}", s.name, s.checks, s.violations, s.worst_slack);
    }
    println!("identity worst ratio {:.2e}", fuzz.identity_worst_ratio);
    assert_eq!(fuzz.violations(), 0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
