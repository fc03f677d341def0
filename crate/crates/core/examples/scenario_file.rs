//! Drive the library from a bundled scenario file, as the CLI does.
//!
//! cargo run --example scenario_file

use hardy_lab::cli::{bundled_scenarios, run_command, Flags, ScenarioFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = bundled_scenarios().join("hardy-p2.json");
    let file = ScenarioFile::load(&path)?;
    let s = file.scenario()?;
    println!("{}: d = {}, m = {}, p = {:?}", s.name, s.d, s.m(), s.p);
    let flags = Flags { no_timestamp: true, ..Default::default() };
    for command in ["constant", "norms", "check-conditions"] {
        let r = run_command(command, &path, &flags);
        println!("{command}: {:?} (exit {})", r.status, r.exit_code);
        for c in &r.checks {
            println!("  [{}] {}", if c.pass { "ok" } else { "fail" }, c.name);
        }
    }
    Ok(())
}
