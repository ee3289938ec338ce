//! Load the bundled scenario file, shorten it, run it and write the
//! outputs to a temporary directory.

use std::path::Path;

use airsim::output::write_run;
use airsim::scenario::{load_scenario, run_scenario};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/toy_scenario.toml");
    let mut cfg = load_scenario(&path).unwrap_or_else(|e| panic!("{e}"));
    cfg.days = 5;
    println!("scenario: {} people, sigma {}/h, {} days", cfg.population.population_size, cfg.epidemic.sigma_per_hour, cfg.days);

    let run = run_scenario(&cfg).unwrap();
    let dir = std::env::temp_dir().join("airsim-scenario-file");
    for p in write_run(&dir, &run.output, Some(&run.population), run.world.city.projection).unwrap() {
        println!("wrote {}", p.display());
    }
    println!("infections so far: {}", run.output.summary.infections);
}
