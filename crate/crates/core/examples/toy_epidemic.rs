//! A full run on the four-block toy city: 500 residents, one bus line,
//! sixty days. Prints a daily prevalence curve.

use airsim::engine::{run, SeedSpec, SimConfig};
use airsim::epidemic::{EpidemicParams, InfectionStatus};
use airsim::output::format_summary;
use airsim::population::{synthesize_population, DemographicConfig};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let world = generate_synthetic_city(&SyntheticCitySpec::toy(), 1).unwrap();
    let pop = synthesize_population(&world.city, &DemographicConfig::toy(500), seed).unwrap();

    let mut cfg = SimConfig::new(EpidemicParams::with_sigma(0.3), 60, seed);
    cfg.seeding = SeedSpec::Count(std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(3));
    let out = run(&world, pop, cfg).unwrap();

    println!("day  infectious  recovered");
    for r in out.reports.iter().filter(|r| (r.time as u64).is_multiple_of(2 * 86_400)) {
        let sick = r.citywide.get(InfectionStatus::Symptomatic);
        println!(
            "{:3}  {:10}  {:9}  {}",
            (r.time / 86_400.0) as u64,
            sick,
            r.citywide.get(InfectionStatus::Recovered),
            "#".repeat((sick / 4) as usize)
        );
    }
    print!("{}", format_summary(&out.summary));
}
