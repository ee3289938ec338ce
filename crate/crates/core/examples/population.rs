//! Synthesize a population and compare class shares with what the age
//! histogram implies.

use airsim::population::{check_population, synthesize_population, DemographicConfig, PersonClass};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};

fn main() {
    let world = generate_synthetic_city(&SyntheticCitySpec::toy(), 1).unwrap();
    let demo = DemographicConfig::toy(5000);
    let pop = synthesize_population(&world.city, &demo, 11).unwrap();

    println!("{} people in {} households", pop.persons.len(), pop.households.len());
    let expected = demo.expected_class_shares();
    for class in PersonClass::ALL {
        let n = pop.persons.iter().filter(|p| p.class == class).count();
        println!(
            "  {:<16} {:5.1}%  (expected {:4.1}%)",
            class.as_str(),
            100.0 * n as f64 / pop.persons.len() as f64,
            100.0 * expected[class.index()]
        );
    }
    let problems = check_population(&world.city, &pop);
    println!("consistency problems: {}", problems.len());

    let p = &pop.persons[0];
    println!(
        "person {}: age {}, {}, lives in {}, works in {:?}",
        p.id,
        p.age,
        p.class,
        p.housing,
        p.office.map(|o| o.to_string())
    );
}
