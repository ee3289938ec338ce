//! Generate a synthetic grid city, validate it, and write it as a city file
//! and as GeoJSON.

use airsim::cityfile::{load_city, save_city};
use airsim::geo::world_to_geojson;
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};

fn main() {
    let spec = SyntheticCitySpec::balanced(4, 4);
    let world = generate_synthetic_city(&spec, 7).expect("valid spec");

    let violations = world.validate();
    println!(
        "{} regions, {} sublocations, {} crossings, {} road sections, {} stops",
        world.city.regions().len(),
        world.city.sublocations().len(),
        world.roads.nodes().len(),
        world.roads.edges().len(),
        world.transit.stops().len()
    );
    println!("violations: {}", violations.len());
    for r in world.city.regions().iter().take(4) {
        println!("  region {} is {}", r.id.0, r.region_type.as_str());
    }

    let dir = std::env::temp_dir().join("airsim-city-grid");
    std::fs::create_dir_all(&dir).unwrap();
    let toml_path = dir.join("city.toml");
    save_city(&world, &toml_path).unwrap();
    std::fs::write(dir.join("city.geojson"), world_to_geojson(&world).to_string()).unwrap();

    let again = load_city(&toml_path).expect("written city reloads");
    assert_eq!(again.city.sublocations().len(), world.city.sublocations().len());
    println!("wrote {} and city.geojson", toml_path.display());
}
