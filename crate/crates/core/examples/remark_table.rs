// Thm2 versus warm-up constants for p = r = 1.

use sturm_bounds::bounds::remark_comparison_table;
use sturm_bounds::exponent::Exponent;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = Exponent::parse_list("1,5/4,3/2,2,3,inf")?.unwrap();
    println!("{:>5} {:>10} {:>10}", "s", "thm2", "warmup");
    for row in remark_comparison_table(&s) {
        println!("{:>5} {:>10.6} {:>10.6}", row.s.to_string(), row.thm2_constant, row.warmup_constant);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
