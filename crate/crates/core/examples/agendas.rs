//! Expand daily agendas for a few residents and tally the activity
//! patterns of a larger sample.

use std::collections::BTreeMap;

use airsim::agenda::{expand_agenda, sample_pattern, AgendaConfig, AgendaContext, AgendaItem, PolicyFactors};
use airsim::population::{synthesize_population, DemographicConfig, PersonClass};
use airsim::rng::{substream, Stream};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};
use airsim::transit::TransitSearch;
use airsim::travel::{CityPlanner, ModeSpeeds};

fn hm(s: f64) -> String {
    format!("{:02}:{:02}", (s / 3600.0) as u32, ((s % 3600.0) / 60.0) as u32)
}

fn main() {
    let world = generate_synthetic_city(&SyntheticCitySpec::toy(), 1).unwrap();
    let pop = synthesize_population(&world.city, &DemographicConfig::toy(400), 2).unwrap();
    let config = AgendaConfig::default();
    let ctx = AgendaContext::new(&config, &world.city);
    let mut planner = CityPlanner::new(&world, TransitSearch::default(), ModeSpeeds::default());

    let mut shown = 0;
    let mut patterns: BTreeMap<String, usize> = BTreeMap::new();
    for person in &pop.persons {
        let mut rng = substream(5, Stream::Agenda, &[u64::from(person.id.0), 0]);
        let pattern = sample_pattern(person.class, &config, &mut rng);
        let agenda = expand_agenda(person, &pattern, &PolicyFactors::NEUTRAL, &ctx, &mut planner, &mut rng).unwrap();
        assert!(agenda.check(person, &world.city).is_empty());
        if person.class == PersonClass::Adult {
            *patterns.entry(agenda.pattern()).or_default() += 1;
        }
        if shown < 3 && person.class == PersonClass::Adult && agenda.items.len() > 3 {
            shown += 1;
            println!("person {} ({}, by {}):", person.id, pattern, agenda.mode.as_str());
            for item in &agenda.items {
                match item {
                    AgendaItem::Activity(a) => {
                        println!("  {}-{} {} at {}", hm(a.start), hm(a.end()), a.activity_type, a.sublocation)
                    }
                    AgendaItem::Travel(t) => println!("  {}-{} travel {} -> {}", hm(t.start), hm(t.end()), t.from, t.to),
                }
            }
        }
    }
    println!("realised adult patterns:");
    for (p, n) in patterns {
        println!("  {p:<8} {n}");
    }
}
