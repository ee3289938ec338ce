//! Agent-based simulation of airborne disease spread through a city.
//!
//! People live in typed regions split into sublocations (rooms), follow daily
//! agendas, travel on foot, by bike, car, taxi or bus, and infect each other
//! when they share a space. The pieces:
//!
//! - [`city`], [`road`], [`transit`]: the static world and its routers.
//! - [`population`], [`agenda`], [`travel`]: who lives where and what they do all day.
//! - [`epidemic`]: disease states and the contact model.
//! - [`engine`]: the time-stepped simulation.
//! - [`cityfile`], [`geo`], [`scenario`], [`output`], [`synth`]: files and synthetic cities.
//!
//! ## Examples
//!
//! ```bash
//! cargo run --release --example city_grid
//! cargo run --release --example road_routing
//! cargo run --release --example transit_routing
//! cargo run --release --example population
//! cargo run --release --example agendas
//! cargo run --release --example transmission
//! cargo run --release --example toy_epidemic
//! cargo run --release --example scenario_file
//! ```

// Validation writes `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod city;
pub mod geometry;
pub mod road;
pub mod rng;
pub mod spatial;
pub mod transit;
pub mod epidemic;
pub mod population;
pub mod agenda;
pub mod travel;
pub mod world;
pub mod engine;
pub mod cityfile;
pub mod geo;
pub mod synth;
pub mod scenario;
pub mod output;
