//! Monte Carlo check of the contact model: one symptomatic and one
//! susceptible person held together for two hours.

use airsim::epidemic::{infection_probability, step_contacts, ContactAccumulator, ContactSpace, EpidemicParams, InfectionStatus, Occupant};
use airsim::population::PersonId;
use airsim::rng::{substream, Stream};

fn main() {
    let dt = 60.0;
    let reps = 20_000;
    let pair = [
        Occupant {
            person: PersonId(0),
            status: InfectionStatus::Symptomatic,
            susceptibility: 1.0,
            immune: false,
        },
        Occupant {
            person: PersonId(1),
            status: InfectionStatus::Susceptible,
            susceptibility: 1.0,
            immune: false,
        },
    ];
    for sigma in [0.1, 0.3, 1.0] {
        let params = EpidemicParams::with_sigma(sigma);
        let mut infected = 0;
        for r in 0..reps {
            let mut rng = substream(1, Stream::Epidemic, &[r]);
            let mut acc = ContactAccumulator::default();
            for _ in 0..(2.0 * 3600.0 / dt) as usize {
                if !step_contacts(&ContactSpace::Vehicle, &pair, &mut acc, dt, &params, &mut rng).is_empty() {
                    infected += 1;
                    break;
                }
            }
        }
        let p = infection_probability(sigma, 7200.0).unwrap();
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        println!(
            "sigma {sigma:>4}/h: simulated {:.4}, expected {p:.4} (standard error {se:.4})",
            infected as f64 / reps as f64
        );
    }
}
