// Run the `catalogue` command in-process and print its text table.

use sturm_bounds::cli::{execute, Command, Format, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig { format: Format::Text, ..RunConfig::new(Command::Catalogue) };
    let out = execute(&config);
    print!("{}", out.body);
    println!("exit code {}", out.code);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
