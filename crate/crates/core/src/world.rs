//! A city together with its road and transit networks.

use crate::city::{CityModel, Violation};
use crate::road::RoadGraph;
use crate::transit::TransitGraph;

#[derive(Debug, Clone)]
pub struct World {
    pub city: CityModel,
    pub roads: RoadGraph,
    pub transit: TransitGraph,
}

impl World {
    pub fn new(city: CityModel, roads: RoadGraph, transit: TransitGraph) -> Self {
        World {
            city,
            roads,
            transit,
        }
    }

    /// Violations of the city partition, the road graph and the transit
    /// network, in that order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.city.validate();
        out.extend(self.roads.validate());
        out.extend(self.transit.validate());
        out
    }
}
