//! Travel modes and door-to-door journeys between sublocations.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::city::SlId;
use crate::geometry::Point;
use crate::population::PersonClass;
use crate::road::{RoutePath, Segment, DEFAULT_WALK_THRESHOLD_M};
use crate::transit::{TransitItinerary, TransitSearch};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TravelMode {
    Walk,
    Bike,
    Car,
    Taxi,
    Transit,
}

impl TravelMode {
    pub const ALL: [TravelMode; 5] = [
        TravelMode::Walk,
        TravelMode::Bike,
        TravelMode::Car,
        TravelMode::Taxi,
        TravelMode::Transit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TravelMode::Walk => "walk",
            TravelMode::Bike => "bike",
            TravelMode::Car => "car",
            TravelMode::Taxi => "taxi",
            TravelMode::Transit => "transit",
        }
    }
}

impl fmt::Display for TravelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeSpeeds {
    pub walk_kmh: f64,
    pub bike_kmh: f64,
    pub car_kmh: f64,
    pub taxi_kmh: f64,
}

impl Default for ModeSpeeds {
    fn default() -> Self {
        ModeSpeeds {
            walk_kmh: 5.0,
            bike_kmh: 15.0,
            car_kmh: 30.0,
            taxi_kmh: 30.0,
        }
    }
}

impl ModeSpeeds {
    /// Meters per second over the road network. Transit journeys walk
    /// between stops.
    pub fn mps(&self, mode: TravelMode) -> f64 {
        let kmh = match mode {
            TravelMode::Walk | TravelMode::Transit => self.walk_kmh,
            TravelMode::Bike => self.bike_kmh,
            TravelMode::Car => self.car_kmh,
            TravelMode::Taxi => self.taxi_kmh,
        };
        kmh / 3.6
    }

    pub fn problems(&self) -> Vec<(&'static str, String)> {
        [
            ("speeds.walk_kmh", self.walk_kmh),
            ("speeds.bike_kmh", self.bike_kmh),
            ("speeds.car_kmh", self.car_kmh),
            ("speeds.taxi_kmh", self.taxi_kmh),
        ]
        .into_iter()
        .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(k, v)| (k, format!("speed must be positive, got {v}")))
        .collect()
    }
}

/// Relative weights of the travel modes for one person class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeWeights {
    #[serde(default)]
    pub walk: f64,
    #[serde(default)]
    pub bike: f64,
    #[serde(default)]
    pub car: f64,
    #[serde(default)]
    pub taxi: f64,
    #[serde(default)]
    pub transit: f64,
}

impl ModeWeights {
    fn as_array(&self) -> [f64; 5] {
        [self.walk, self.bike, self.car, self.taxi, self.transit]
    }

    pub fn only(mode: TravelMode) -> Self {
        let mut w = [0.0; 5];
        w[mode as usize] = 1.0;
        ModeWeights {
            walk: w[0],
            bike: w[1],
            car: w[2],
            taxi: w[3],
            transit: w[4],
        }
    }

    fn is_usable(&self) -> bool {
        let w = self.as_array();
        w.iter().all(|x| x.is_finite() && *x >= 0.0) && w.iter().sum::<f64>() > 0.0
    }
}

/// Mode choice per person class. Toddlers never travel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModalSplit {
    pub school_child: ModeWeights,
    pub adult: ModeWeights,
    pub college_student: ModeWeights,
    pub elder: ModeWeights,
}

impl Default for ModalSplit {
    fn default() -> Self {
        let w = |walk, bike, car, taxi, transit| ModeWeights {
            walk,
            bike,
            car,
            taxi,
            transit,
        };
        ModalSplit {
            school_child: w(0.5, 0.2, 0.1, 0.0, 0.2),
            adult: w(0.2, 0.15, 0.3, 0.05, 0.3),
            college_student: w(0.3, 0.3, 0.0, 0.0, 0.4),
            elder: w(0.5, 0.0, 0.2, 0.0, 0.3),
        }
    }
}

impl ModalSplit {
    pub fn uniform(mode: TravelMode) -> Self {
        let w = ModeWeights::only(mode);
        ModalSplit {
            school_child: w,
            adult: w,
            college_student: w,
            elder: w,
        }
    }

    pub fn weights(&self, class: PersonClass) -> &ModeWeights {
        match class {
            PersonClass::SchoolChild | PersonClass::Toddler => &self.school_child,
            PersonClass::Adult => &self.adult,
            PersonClass::CollegeStudent => &self.college_student,
            PersonClass::Elder => &self.elder,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, class: PersonClass, rng: &mut R) -> TravelMode {
        let w = self.weights(class).as_array();
        let idx = WeightedIndex::new(w)
            .map(|d| d.sample(rng))
            .unwrap_or(0);
        TravelMode::ALL[idx]
    }

    pub fn problems(&self) -> Vec<(&'static str, String)> {
        [
            ("modal_split.school_child", self.school_child),
            ("modal_split.adult", self.adult),
            ("modal_split.college_student", self.college_student),
            ("modal_split.elder", self.elder),
        ]
        .into_iter()
        .filter(|(_, w)| !w.is_usable())
        .map(|(k, _)| (k, "weights must be non-negative and not all zero".to_string()))
        .collect()
    }
}

/// One piece of a journey.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    /// Self-propelled movement along a path.
    Move { path: RoutePath, speed_mps: f64 },
    /// A ride on directed line `line` (index into the transit graph) from
    /// position `board_pos` to `alight_pos`.
    Ride {
        line: usize,
        board_pos: usize,
        alight_pos: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Journey {
    /// Mode actually used; a failed transit search falls back to taxi.
    pub mode: TravelMode,
    pub stages: Vec<Stage>,
    /// Planned duration in seconds, including expected waiting time.
    pub estimated_s: f64,
}

impl Journey {
    pub fn uses_transit(&self) -> bool {
        self.stages.iter().any(|s| matches!(s, Stage::Ride { .. }))
    }
}

pub trait TravelPlanner {
    /// Journey between the centers of two distinct sublocations.
    fn plan(&mut self, mode: TravelMode, from: SlId, to: SlId) -> Arc<Journey>;
}

fn polyline_path(points: &[Point]) -> RoutePath {
    RoutePath::from_segments(
        points
            .windows(2)
            .map(|w| Segment::Straight {
                from: w[0],
                to: w[1],
            })
            .collect(),
    )
}

/// Journey stages for a transit itinerary, walking at `walk_mps`.
pub fn transit_stages(world: &World, it: &TransitItinerary, walk_mps: f64) -> Vec<Stage> {
    let mut stages = Vec::new();
    for (i, walk) in it.walks.iter().enumerate() {
        if walk.len() >= 2 {
            stages.push(Stage::Move {
                path: polyline_path(walk),
                speed_mps: walk_mps,
            });
        }
        if let Some(leg) = it.legs.get(i) {
            let line = world
                .transit
                .line_index(leg.line, leg.direction)
                .expect("itinerary leg on a known line");
            stages.push(Stage::Ride {
                line,
                board_pos: leg.board_index,
                alight_pos: leg.alight_index,
            });
        }
    }
    stages
}

/// Planner over a [`World`], memoizing journeys by (mode, from, to).
pub struct CityPlanner<'w> {
    world: &'w World,
    search: TransitSearch,
    speeds: ModeSpeeds,
    walk_threshold_m: f64,
    cache: HashMap<(TravelMode, SlId, SlId), Arc<Journey>>,
    transit_failures: u64,
}

impl<'w> CityPlanner<'w> {
    pub fn new(world: &'w World, search: TransitSearch, speeds: ModeSpeeds) -> Self {
        CityPlanner {
            world,
            search,
            speeds,
            walk_threshold_m: DEFAULT_WALK_THRESHOLD_M,
            cache: HashMap::new(),
            transit_failures: 0,
        }
    }

    pub fn world(&self) -> &'w World {
        self.world
    }

    /// Distinct transit searches that failed and fell back to taxi.
    pub fn transit_failures(&self) -> u64 {
        self.transit_failures
    }

    fn road_journey(&self, mode: TravelMode, ps: Point, pe: Point) -> Journey {
        let path = self.world.roads.route(ps, pe, self.walk_threshold_m).into_path();
        let speed_mps = self.speeds.mps(mode);
        Journey {
            mode,
            estimated_s: path.total_length / speed_mps,
            stages: vec![Stage::Move { path, speed_mps }],
        }
    }

    fn compute(&mut self, mode: TravelMode, from: SlId, to: SlId) -> Journey {
        let center = |id| {
            self.world
                .city
                .sublocation(id)
                .map(|s| s.center)
                .expect("journey endpoints are known sublocations")
        };
        let (ps, pe) = (center(from), center(to));
        if mode != TravelMode::Transit {
            return self.road_journey(mode, ps, pe);
        }
        match self.world.transit.route(ps, pe, &self.search) {
            Ok(it) => Journey {
                mode,
                stages: transit_stages(self.world, &it, self.search.walk_speed_mps),
                estimated_s: it.estimated_time_s,
            },
            Err(e) => {
                log::debug!("transit {from} -> {to}: {e}; taking a taxi");
                self.transit_failures += 1;
                self.road_journey(TravelMode::Taxi, ps, pe)
            }
        }
    }
}

impl TravelPlanner for CityPlanner<'_> {
    fn plan(&mut self, mode: TravelMode, from: SlId, to: SlId) -> Arc<Journey> {
        if let Some(j) = self.cache.get(&(mode, from, to)) {
            return Arc::clone(j);
        }
        let j = Arc::new(self.compute(mode, from, to));
        self.cache.insert((mode, from, to), Arc::clone(&j));
        j
    }
}
