//! Road routing: straight lines for short trips, the five-part road
//! composition for long ones.

use airsim::geometry::Point;
use airsim::road::{RoadRoute, DEFAULT_WALK_THRESHOLD_M};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};

fn describe(route: &RoadRoute) -> &'static str {
    match route {
        RoadRoute::Direct(_) => "straight line",
        RoadRoute::Composed { .. } => "via roads",
        RoadRoute::Fallback(_) => "no road connection",
    }
}

fn main() {
    let world = generate_synthetic_city(&SyntheticCitySpec::balanced(10, 10), 1).unwrap();
    let roads = &world.roads;

    let trips = [
        (Point::new(150.0, 130.0), Point::new(900.0, 420.0)),
        (Point::new(150.0, 130.0), Point::new(3850.0, 3620.0)),
        (Point::new(2010.0, 50.0), Point::new(2050.0, 3990.0)),
    ];
    for (a, b) in trips {
        let route = roads.route(a, b, DEFAULT_WALK_THRESHOLD_M);
        let path = route.path();
        println!(
            "({:.0}, {:.0}) -> ({:.0}, {:.0}): {:.0} m apart, {}, path {:.0} m in {} segments",
            a.x,
            a.y,
            b.x,
            b.y,
            a.distance(&b),
            describe(&route),
            path.total_length,
            path.segments.len()
        );
    }

    let (from, to) = (roads.nodes()[0].id, roads.nodes().last().unwrap().id);
    let sp = roads.shortest_path(from, to).expect("grid is connected");
    println!("crossing {from} to crossing {to}: {:.0} m over {} sections", sp.path.total_length, sp.edges.len());
}
