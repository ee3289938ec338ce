//! Synthetic grid cities for tests and examples.
//!
//! The city is a grid of square blocks separated by two-way streets. Each
//! block is one region; region types are shuffled over the blocks. Bus
//! lines run along chosen streets with a stop on each side of the street at
//! every `stop_spacing` crossings.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::city::{CityModel, Exposure, Region, RegionId, RegionType, SlClass, SlId, Sublocation};
use crate::geometry::{Point, Polygon};
use crate::rng::{stream, Stream};
use crate::road::{Directionality, EdgeId, NodeId, RoadEdge, RoadGraph, RoadNode};
use crate::transit::{DirectedLine, Direction, LineId, Stop, StopId, TransitGraph, DEFAULT_HEADWAY_S};
use crate::world::World;

/// Distance of a stop from the street center line.
const STOP_OFFSET_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionCounts {
    pub housing: u32,
    pub office: u32,
    pub school: u32,
    pub university: u32,
    pub medical: u32,
    pub recreational: u32,
}

impl RegionCounts {
    pub fn total(&self) -> u32 {
        self.housing + self.office + self.school + self.university + self.medical + self.recreational
    }

    fn get(&self, t: RegionType) -> u32 {
        match t {
            RegionType::Housing => self.housing,
            RegionType::Office => self.office,
            RegionType::School => self.school,
            RegionType::University => self.university,
            RegionType::Medical => self.medical,
            RegionType::Recreational => self.recreational,
        }
    }
}

/// Sublocations per class placed in one region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlCounts {
    pub housing: u32,
    pub office: u32,
    pub classroom: u32,
    pub patient_room: u32,
    pub recreational: u32,
}

impl SlCounts {
    fn entries(&self) -> [(SlClass, u32); 5] {
        [
            (SlClass::Housing, self.housing),
            (SlClass::Office, self.office),
            (SlClass::Classroom, self.classroom),
            (SlClass::PatientRoom, self.patient_room),
            (SlClass::Recreational, self.recreational),
        ]
    }

    pub fn total(&self) -> u32 {
        self.entries().iter().map(|e| e.1).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlPlan {
    pub housing: SlCounts,
    pub office: SlCounts,
    pub school: SlCounts,
    pub university: SlCounts,
    pub medical: SlCounts,
    pub recreational: SlCounts,
}

impl Default for SlPlan {
    fn default() -> Self {
        let c = |housing, office, classroom, patient_room, recreational| SlCounts {
            housing,
            office,
            classroom,
            patient_room,
            recreational,
        };
        SlPlan {
            housing: c(8, 0, 0, 0, 0),
            office: c(0, 4, 0, 0, 1),
            school: c(0, 1, 4, 0, 0),
            university: c(0, 1, 4, 0, 0),
            medical: c(0, 1, 0, 4, 0),
            recreational: c(0, 0, 0, 0, 3),
        }
    }
}

impl SlPlan {
    pub fn for_type(&self, t: RegionType) -> &SlCounts {
        match t {
            RegionType::Housing => &self.housing,
            RegionType::Office => &self.office,
            RegionType::School => &self.school,
            RegionType::University => &self.university,
            RegionType::Medical => &self.medical,
            RegionType::Recreational => &self.recreational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlRadii {
    pub housing: f64,
    pub office: f64,
    pub classroom: f64,
    pub patient_room: f64,
    pub recreational: f64,
}

impl Default for SlRadii {
    fn default() -> Self {
        SlRadii {
            housing: 5.0,
            office: 8.0,
            classroom: 6.0,
            patient_room: 4.0,
            recreational: 15.0,
        }
    }
}

impl SlRadii {
    fn get(&self, c: SlClass) -> f64 {
        match c {
            SlClass::Housing => self.housing,
            SlClass::Office => self.office,
            SlClass::Classroom => self.classroom,
            SlClass::PatientRoom => self.patient_room,
            SlClass::Recreational => self.recreational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreetAxis {
    /// Along the street `y = index * block`.
    Horizontal,
    /// Along the street `x = index * block`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub axis: StreetAxis,
    pub index: u32,
    #[serde(default = "default_headway")]
    pub headway_s: f64,
    #[serde(default = "default_speed")]
    pub speed_kmh: f64,
}

fn default_headway() -> f64 {
    DEFAULT_HEADWAY_S
}
fn default_speed() -> f64 {
    20.0
}
fn default_block() -> f64 {
    400.0
}
fn default_spacing() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCitySpec {
    pub cols: u32,
    pub rows: u32,
    #[serde(default = "default_block")]
    pub block_m: f64,
    pub regions: RegionCounts,
    #[serde(default)]
    pub sublocations: SlPlan,
    #[serde(default)]
    pub radii: SlRadii,
    #[serde(default)]
    pub outdoor_recreation: bool,
    #[serde(default)]
    pub lines: Vec<LineSpec>,
    /// Stops every this many crossings along a line.
    #[serde(default = "default_spacing")]
    pub stop_spacing: u32,
}

impl SyntheticCitySpec {
    /// A `cols` x `rows` grid with the given region counts and defaults
    /// for everything else.
    pub fn grid(cols: u32, rows: u32, regions: RegionCounts) -> Self {
        SyntheticCitySpec {
            cols,
            rows,
            block_m: default_block(),
            regions,
            sublocations: SlPlan::default(),
            radii: SlRadii::default(),
            outdoor_recreation: false,
            lines: Vec::new(),
            stop_spacing: 1,
        }
    }

    /// Four blocks (housing, office, school, medical) with one bus line
    /// along the middle street. Room for a few hundred residents.
    pub fn toy() -> Self {
        let mut spec = SyntheticCitySpec::grid(
            2,
            2,
            RegionCounts {
                housing: 1,
                office: 1,
                school: 1,
                medical: 1,
                ..Default::default()
            },
        );
        spec.sublocations.housing.housing = 196;
        spec.sublocations.office = SlCounts {
            office: 16,
            recreational: 2,
            ..Default::default()
        };
        spec.sublocations.school.classroom = 8;
        spec.sublocations.medical = SlCounts {
            office: 4,
            patient_room: 4,
            ..Default::default()
        };
        spec.radii = SlRadii {
            housing: 10.0,
            office: 15.0,
            classroom: 12.0,
            patient_room: 6.0,
            recreational: 20.0,
        };
        spec.lines = vec![LineSpec {
            axis: StreetAxis::Horizontal,
            index: 1,
            headway_s: DEFAULT_HEADWAY_S,
            speed_kmh: 20.0,
        }];
        spec
    }

    /// About half the blocks housing, the rest cycling through the other
    /// region types, and one bus line along the middle street.
    pub fn balanced(cols: u32, rows: u32) -> Self {
        let n = cols * rows;
        let mut regions = RegionCounts {
            housing: n.div_ceil(2),
            ..Default::default()
        };
        for k in 0..n - regions.housing {
            match k % 5 {
                0 => regions.office += 1,
                1 => regions.school += 1,
                2 => regions.medical += 1,
                3 => regions.recreational += 1,
                _ => regions.university += 1,
            }
        }
        let mut spec = SyntheticCitySpec::grid(cols, rows, regions);
        spec.lines = vec![LineSpec {
            axis: StreetAxis::Horizontal,
            index: rows / 2,
            headway_s: DEFAULT_HEADWAY_S,
            speed_kmh: 20.0,
        }];
        spec
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.cols == 0 || self.rows == 0 {
            out.push("grid dimensions must be positive".to_string());
        }
        if !(self.block_m > 0.0 && self.block_m.is_finite()) {
            out.push("block_m must be positive".to_string());
        }
        let cells = self.cols * self.rows;
        if self.regions.total() != cells {
            out.push(format!("region counts sum to {} but the grid has {cells} blocks", self.regions.total()));
        }
        for t in RegionType::ALL {
            let counts = self.sublocations.for_type(t);
            for (class, n) in counts.entries() {
                if n > 0 && !t.permits(class) {
                    out.push(format!("{} regions may not hold {} sublocations", t.as_str(), class.as_str()));
                }
            }
            if self.regions.get(t) > 0 && counts.total() == 0 {
                out.push(format!("{} regions need at least one sublocation", t.as_str()));
            }
        }
        for c in [SlClass::Housing, SlClass::Office, SlClass::Classroom, SlClass::PatientRoom, SlClass::Recreational] {
            let r = self.radii.get(c);
            if !(r > 0.0) {
                out.push(format!("radius of {} must be positive", c.as_str()));
            }
        }
        for (i, l) in self.lines.iter().enumerate() {
            let max = match l.axis {
                StreetAxis::Horizontal => self.rows,
                StreetAxis::Vertical => self.cols,
            };
            if l.index > max {
                out.push(format!("line {i}: street index {} outside 0..={max}", l.index));
            }
            if !(l.headway_s > 0.0 && l.speed_kmh > 0.0) {
                out.push(format!("line {i}: headway and speed must be positive"));
            }
        }
        if self.stop_spacing == 0 {
            out.push("stop_spacing must be at least 1".to_string());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("synthetic city spec: {}", .0.join("; "))]
pub struct SpecError(pub Vec<String>);

/// Build the city. Identical spec and seed give an identical city.
pub fn generate_synthetic_city(spec: &SyntheticCitySpec, seed: u64) -> Result<World, SpecError> {
    let problems = spec.problems();
    if !problems.is_empty() {
        return Err(SpecError(problems));
    }
    let b = spec.block_m;
    let (cols, rows) = (spec.cols, spec.rows);

    let mut types: Vec<RegionType> = RegionType::ALL
        .iter()
        .flat_map(|&t| std::iter::repeat_n(t, spec.regions.get(t) as usize))
        .collect();
    types.shuffle(&mut stream(seed, Stream::Synthesis));

    let mut regions = Vec::new();
    let mut sls = Vec::new();
    for (cell, &t) in types.iter().enumerate() {
        let (i, j) = (cell as u32 % cols, cell as u32 / cols);
        let (x0, y0) = (f64::from(i) * b, f64::from(j) * b);
        let id = RegionId(cell as u32 + 1);
        regions.push(Region {
            id,
            region_type: t,
            boundary: Polygon::rectangle(Point::new(x0, y0), Point::new(x0 + b, y0 + b)),
        });
        let classes: Vec<SlClass> = spec
            .sublocations
            .for_type(t)
            .entries()
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat_n(c, n as usize))
            .collect();
        // Sublocations on a k x k lattice inside the block.
        let k = (classes.len() as f64).sqrt().ceil().max(1.0) as usize;
        let step = b / (k as f64 + 1.0);
        for (n, class) in classes.into_iter().enumerate() {
            let (a, c) = (n % k, n / k);
            let exposure = if class == SlClass::Recreational && spec.outdoor_recreation {
                Exposure::Outdoor
            } else {
                Exposure::Indoor
            };
            sls.push(Sublocation {
                id: SlId(sls.len() as u32 + 1),
                class,
                region: id,
                center: Point::new(x0 + step * (a as f64 + 1.0), y0 + step * (c as f64 + 1.0)),
                radius: spec.radii.get(class).min(step / 2.0),
                exposure,
            });
        }
    }
    let city = CityModel::new(regions, sls);

    let node_id = |i: u32, j: u32| NodeId(j * (cols + 1) + i + 1);
    let node_pt = |i: u32, j: u32| Point::new(f64::from(i) * b, f64::from(j) * b);
    let mut nodes = Vec::new();
    for j in 0..=rows {
        for i in 0..=cols {
            nodes.push(RoadNode {
                id: node_id(i, j),
                point: node_pt(i, j),
            });
        }
    }
    let mut edges = Vec::new();
    let mut add_edge = |a: (u32, u32), c: (u32, u32)| {
        let (p, q) = (node_pt(a.0, a.1), node_pt(c.0, c.1));
        let id = EdgeId(edges.len() as u32 + 1);
        edges.push(RoadEdge::new(
            id,
            node_id(a.0, a.1),
            node_id(c.0, c.1),
            vec![p, p.lerp(&q, 0.5), q],
            Directionality::TwoWay,
        ));
    };
    for j in 0..=rows {
        for i in 0..cols {
            add_edge((i, j), (i + 1, j));
        }
    }
    for i in 0..=cols {
        for j in 0..rows {
            add_edge((i, j), (i, j + 1));
        }
    }
    let roads = RoadGraph::new(nodes, edges);

    let mut stops = Vec::new();
    let mut lines = Vec::new();
    for (n, l) in spec.lines.iter().enumerate() {
        let line = LineId(n as u32 + 1);
        let len = match l.axis {
            StreetAxis::Horizontal => cols,
            StreetAxis::Vertical => rows,
        };
        let mut positions: Vec<u32> = (0..=len).step_by(spec.stop_spacing as usize).collect();
        if positions.last() != Some(&len) {
            positions.push(len);
        }
        let mut seq: BTreeMap<Direction, Vec<StopId>> = BTreeMap::new();
        for (direction, side) in [(Direction::Outbound, -1.0), (Direction::Inbound, 1.0)] {
            let ids: Vec<StopId> = positions
                .iter()
                .map(|&p| {
                    let at = match l.axis {
                        StreetAxis::Horizontal => node_pt(p, l.index),
                        StreetAxis::Vertical => node_pt(l.index, p),
                    };
                    let offset = match l.axis {
                        StreetAxis::Horizontal => Point::new(0.0, side * STOP_OFFSET_M),
                        StreetAxis::Vertical => Point::new(-side * STOP_OFFSET_M, 0.0),
                    };
                    let id = StopId(stops.len() as u32 + 1);
                    stops.push(Stop {
                        id,
                        point: Point::new(at.x + offset.x, at.y + offset.y),
                    });
                    id
                })
                .collect();
            seq.insert(direction, ids);
        }
        for (direction, mut ids) in seq {
            if direction == Direction::Inbound {
                ids.reverse();
            }
            lines.push(DirectedLine {
                line,
                direction,
                stops: ids,
                headway_s: l.headway_s,
                speed_mps: l.speed_kmh / 3.6,
            });
        }
    }
    let transit = TransitGraph::new(stops, lines);
    Ok(World::new(city, roads, transit))
}
