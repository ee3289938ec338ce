//! Fewest-transfer bus itineraries on a grid with a crosstown and an
//! uptown line.

use airsim::geometry::Point;
use airsim::synth::{generate_synthetic_city, LineSpec, StreetAxis, SyntheticCitySpec};
use airsim::transit::TransitSearch;

fn main() {
    let mut spec = SyntheticCitySpec::balanced(10, 10);
    spec.lines = vec![
        LineSpec {
            axis: StreetAxis::Horizontal,
            index: 5,
            headway_s: 600.0,
            speed_kmh: 20.0,
        },
        LineSpec {
            axis: StreetAxis::Vertical,
            index: 8,
            headway_s: 900.0,
            speed_kmh: 20.0,
        },
    ];
    let world = generate_synthetic_city(&spec, 3).unwrap();
    let search = TransitSearch::default();

    let trips = [
        ("same line", Point::new(100.0, 1950.0), Point::new(2300.0, 2080.0)),
        ("one transfer", Point::new(100.0, 2050.0), Point::new(3250.0, 3900.0)),
        ("too far from any stop", Point::new(50.0, 50.0), Point::new(3900.0, 3900.0)),
    ];
    for (label, a, b) in trips {
        print!("{label}: ");
        match world.transit.route(a, b, &search) {
            Ok(it) => {
                println!("{} rides, {} transfers, about {:.0} min", it.legs.len(), it.transfers, it.estimated_time_s / 60.0);
                for leg in &it.legs {
                    println!("    line {} {}: stop {} -> stop {}", leg.line, leg.direction, leg.board, leg.alight);
                }
            }
            Err(e) => println!("{e}"),
        }
    }
}
