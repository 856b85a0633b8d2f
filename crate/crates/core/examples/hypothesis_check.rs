// Check the standing hypotheses on two problems, one of which fails.

use sturm_bounds::coeff::{check_hypotheses, Problem, TailFile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let good = Problem::from_strs("weighted", "1", "-indicator(-1,1)", "min(1,abs(x))", (-1.0, 1.0), &TailFile::new())?;
    let bad = Problem::from_strs("decaying_r", "1", "0", "exp(-abs(x))", (-1.0, 1.0), &TailFile::new())?;
    for prob in [&good, &bad] {
        let rep = check_hypotheses(prob, 1e-8);
        println!("{}: passes = {}", prob.name, rep.passes());
        for f in rep.failures() {
            println!("  {f}");
        }
    }
    assert!(check_hypotheses(&good, 1e-8).passes());
    assert!(!check_hypotheses(&bad, 1e-8).passes());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
