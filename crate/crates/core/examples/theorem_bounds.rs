// Every calculator over the default grid for a problem with p = 1 + x^2.

use sturm_bounds::bounds::{best_bound, SearchGrid};
use sturm_bounds::catalogue;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prob = catalogue::get("growing_p").unwrap();
    let best = best_bound(&prob, &SearchGrid::default(), 1e-8);
    for r in &best.results {
        let g = r.g.map(|g| g.to_string()).unwrap_or_default();
        match r.bound {
            Some(b) => println!("{:<16} {g:<18} {b:.6}", r.tag()),
            None => println!("{:<16} n/a ({})", r.tag(), r.reason.as_deref().unwrap_or("")),
        }
    }
    let top = best.best.ok_or("no certified bound")?;
    println!("best: {} = {}", top.tag(), top.bound.unwrap());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
