//! Native city file: a versioned TOML document holding regions,
//! sublocations, road crossings and sections, transit stops and lines.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::city::{
    CityModel, Entity, Exposure, Region, RegionId, RegionType, SlClass, SlId, Sublocation,
    Violation,
};
use crate::geometry::{Point, Polygon, Projection};
use crate::road::{Directionality, EdgeId, NodeId, RoadEdge, RoadGraph, RoadNode};
use crate::transit::{DirectedLine, Direction, LineId, Stop, StopId, TransitGraph, DEFAULT_HEADWAY_S};
use crate::world::World;

pub const CITY_FILE_VERSION: u32 = 1;

fn default_headway() -> f64 {
    DEFAULT_HEADWAY_S
}
fn default_line_speed() -> f64 {
    20.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionRecord {
    pub id: Spanned<u32>,
    #[serde(rename = "type")]
    pub region_type: RegionType,
    pub boundary: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublocationRecord {
    pub id: Spanned<u32>,
    pub class: SlClass,
    pub region: u32,
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default)]
    pub exposure: Exposure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: Spanned<u32>,
    pub point: [f64; 2],
}

/// A road section. Without `polyline` the section is straight between its
/// crossings; `length` defaults to the polyline length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: Spanned<u32>,
    pub from: u32,
    pub to: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default)]
    pub direction: Directionality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRecord {
    pub id: Spanned<u32>,
    pub point: [f64; 2],
}

/// A line with its outbound stop sequence and, for two-way service, the
/// inbound one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineRecord {
    pub id: Spanned<u32>,
    #[serde(default = "default_headway")]
    pub headway_s: f64,
    #[serde(default = "default_line_speed")]
    pub speed_kmh: f64,
    pub outbound: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inbound: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CityFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Projection>,
    #[serde(default)]
    pub regions: Vec<RegionRecord>,
    #[serde(default)]
    pub sublocations: Vec<SublocationRecord>,
    #[serde(default)]
    pub nodes: Vec<NodeRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub stops: Vec<StopRecord>,
    #[serde(default)]
    pub lines: Vec<LineRecord>,
}

fn pt(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

fn arr(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

fn sp<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

impl CityFile {
    pub fn into_world(self) -> World {
        let regions = self
            .regions
            .into_iter()
            .map(|r| Region {
                id: RegionId(r.id.into_inner()),
                region_type: r.region_type,
                boundary: Polygon::new(r.boundary.into_iter().map(pt).collect()),
            })
            .collect();
        let sublocations = self
            .sublocations
            .into_iter()
            .map(|s| Sublocation {
                id: SlId(s.id.into_inner()),
                class: s.class,
                region: RegionId(s.region),
                center: pt(s.center),
                radius: s.radius,
                exposure: s.exposure,
            })
            .collect();
        let mut city = CityModel::new(regions, sublocations);
        city.projection = self.projection;

        let node_at = |id: u32| {
            self.nodes
                .iter()
                .find(|n| *n.id.get_ref() == id)
                .map(|n| pt(n.point))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let polyline = match &e.polyline {
                    Some(p) => p.iter().copied().map(pt).collect(),
                    None => [node_at(e.from), node_at(e.to)].into_iter().flatten().collect(),
                };
                let mut edge = RoadEdge::new(
                    EdgeId(*e.id.get_ref()),
                    NodeId(e.from),
                    NodeId(e.to),
                    polyline,
                    e.direction,
                );
                if let Some(len) = e.length {
                    edge.length = len;
                }
                edge
            })
            .collect();
        let nodes = self
            .nodes
            .iter()
            .map(|n| RoadNode {
                id: NodeId(*n.id.get_ref()),
                point: pt(n.point),
            })
            .collect();
        let roads = RoadGraph::new(nodes, edges);

        let stops = self
            .stops
            .iter()
            .map(|s| Stop {
                id: StopId(*s.id.get_ref()),
                point: pt(s.point),
            })
            .collect();
        let mut lines = Vec::new();
        for l in &self.lines {
            for (direction, seq) in [(Direction::Outbound, &l.outbound), (Direction::Inbound, &l.inbound)] {
                if direction == Direction::Inbound && seq.is_empty() {
                    continue;
                }
                lines.push(DirectedLine {
                    line: LineId(*l.id.get_ref()),
                    direction,
                    stops: seq.iter().map(|&s| StopId(s)).collect(),
                    headway_s: l.headway_s,
                    speed_mps: l.speed_kmh / 3.6,
                });
            }
        }
        World::new(city, roads, TransitGraph::new(stops, lines))
    }

    pub fn from_world(world: &World) -> CityFile {
        let city = &world.city;
        let mut lines: Vec<LineRecord> = Vec::new();
        for l in world.transit.lines() {
            let seq: Vec<u32> = l.stops.iter().map(|s| s.0).collect();
            match lines.iter_mut().find(|r| *r.id.get_ref() == l.line.0) {
                Some(r) if l.direction == Direction::Inbound => r.inbound = seq,
                Some(r) => r.outbound = seq,
                None => {
                    let (outbound, inbound) = match l.direction {
                        Direction::Outbound => (seq, Vec::new()),
                        Direction::Inbound => (Vec::new(), seq),
                    };
                    lines.push(LineRecord {
                        id: sp(l.line.0),
                        headway_s: l.headway_s,
                        speed_kmh: l.speed_mps * 3.6,
                        outbound,
                        inbound,
                    });
                }
            }
        }
        CityFile {
            version: CITY_FILE_VERSION,
            projection: city.projection,
            regions: city
                .regions()
                .iter()
                .map(|r| RegionRecord {
                    id: sp(r.id.0),
                    region_type: r.region_type,
                    boundary: r.boundary.vertices.iter().copied().map(arr).collect(),
                })
                .collect(),
            sublocations: city
                .sublocations()
                .iter()
                .map(|s| SublocationRecord {
                    id: sp(s.id.0),
                    class: s.class,
                    region: s.region.0,
                    center: arr(s.center),
                    radius: s.radius,
                    exposure: s.exposure,
                })
                .collect(),
            nodes: world
                .roads
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: sp(n.id.0),
                    point: arr(n.point),
                })
                .collect(),
            edges: world
                .roads
                .edges()
                .iter()
                .map(|e| {
                    let straight = e.polyline.len() == 2;
                    EdgeRecord {
                        id: sp(e.id.0),
                        from: e.from.0,
                        to: e.to.0,
                        polyline: (!straight).then(|| e.polyline.iter().copied().map(arr).collect()),
                        length: None,
                        direction: e.directionality,
                    }
                })
                .collect(),
            stops: world
                .transit
                .stops()
                .iter()
                .map(|s| StopRecord {
                    id: sp(s.id.0),
                    point: arr(s.point),
                })
                .collect(),
            lines,
        }
    }

    /// Byte range of the record an entity comes from, if it came from text.
    fn span_of(&self, entity: &Entity) -> Option<std::ops::Range<usize>> {
        let span = match entity {
            Entity::Region(id) => self.regions.iter().find(|r| *r.id.get_ref() == id.0).map(|r| r.id.span()),
            Entity::Sublocation(id) => self
                .sublocations
                .iter()
                .find(|r| *r.id.get_ref() == id.0)
                .map(|r| r.id.span()),
            Entity::Node(id) => self.nodes.iter().find(|r| r.id.get_ref() == id).map(|r| r.id.span()),
            Entity::Edge(id) => self.edges.iter().find(|r| r.id.get_ref() == id).map(|r| r.id.span()),
            Entity::Stop(id) => self.stops.iter().find(|r| r.id.get_ref() == id).map(|r| r.id.span()),
            Entity::Line(id) => self.lines.iter().find(|r| r.id.get_ref() == id).map(|r| r.id.span()),
        }?;
        (!span.is_empty()).then_some(span)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("city file serializes")
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// A violation with the line of the offending record.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedViolation {
    pub line: Option<usize>,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.violation),
            None => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CityFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: unsupported city file version {found} (expected {CITY_FILE_VERSION})")]
    Version { path: PathBuf, found: u32 },
    #[error("{path}: {} violation(s), first: {}", .violations.len(), .violations[0])]
    Invalid {
        path: PathBuf,
        violations: Vec<LocatedViolation>,
    },
    #[error("{path}: {message}")]
    GeoJson { path: PathBuf, message: String },
}

/// A parsed city together with its validation result.
pub struct LoadedCity {
    pub world: World,
    pub violations: Vec<LocatedViolation>,
}

pub fn parse_city(text: &str, path: &Path) -> Result<LoadedCity, CityFileError> {
    let file: CityFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        CityFileError::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    if file.version != CITY_FILE_VERSION {
        return Err(CityFileError::Version {
            path: path.to_path_buf(),
            found: file.version,
        });
    }
    let world = file.clone().into_world();
    let violations = world
        .validate()
        .into_iter()
        .map(|v| LocatedViolation {
            line: file.span_of(&v.entity).map(|s| line_col(text, s.start).0),
            violation: v,
        })
        .collect();
    Ok(LoadedCity { world, violations })
}

/// Read a city from a native TOML file, or from GeoJSON when the extension
/// is `.geojson`/`.json`. Violations are returned, not raised.
pub fn read_city(path: &Path) -> Result<LoadedCity, CityFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| CityFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let is_geojson = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("geojson") || e.eq_ignore_ascii_case("json"));
    if is_geojson {
        let world = crate::geo::world_from_geojson(&text).map_err(|e| CityFileError::GeoJson {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let violations = world
            .validate()
            .into_iter()
            .map(|violation| LocatedViolation { line: None, violation })
            .collect();
        return Ok(LoadedCity { world, violations });
    }
    parse_city(&text, path)
}

/// Read a city and insist that it is valid.
pub fn load_city(path: &Path) -> Result<World, CityFileError> {
    let loaded = read_city(path)?;
    if loaded.violations.is_empty() {
        Ok(loaded.world)
    } else {
        Err(CityFileError::Invalid {
            path: path.to_path_buf(),
            violations: loaded.violations,
        })
    }
}

pub fn save_city(world: &World, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, CityFile::from_world(world).to_toml())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::city::Rule;

    const SMALL: &str = r#"version = 1

[[regions]]
id = 1
type = "housing"
boundary = [[0.0, 0.0], [100.0, 0.0], [100.0, 100.0], [0.0, 100.0]]

[[sublocations]]
id = 1
class = "housing"
region = 1
center = [50.0, 50.0]
radius = 5.0

[[sublocations]]
id = 2
class = "patient_room"
region = 1
center = [20.0, 20.0]
radius = 5.0

[[nodes]]
id = 1
point = [0.0, 0.0]

[[nodes]]
id = 2
point = [100.0, 0.0]

[[edges]]
id = 1
from = 1
to = 2
"#;

    #[test]
    fn violation_points_at_its_record() {
        let loaded = parse_city(SMALL, Path::new("small.toml")).unwrap();
        assert_eq!(loaded.violations.len(), 1);
        let v = &loaded.violations[0];
        assert_eq!(v.violation.rule, Rule::ClassNotPermitted);
        assert_eq!(v.line, Some(16));
    }

    #[test]
    fn parse_error_has_line() {
        let text = SMALL.replace("radius = 5.0\n\n[[sublocations]]", "radius = \"big\"\n\n[[sublocations]]");
        match parse_city(&text, Path::new("x.toml")) {
            Err(CityFileError::Parse { line, .. }) => assert_eq!(line, 13),
            other => panic!("{:?}", other.err()),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = SMALL.replace("radius = 5.0\n", "radius = 5.0\ncolour = \"red\"\n");
        assert!(matches!(parse_city(&text, Path::new("x.toml")), Err(CityFileError::Parse { .. })));
    }

    #[test]
    fn round_trip_through_text() {
        let loaded = parse_city(SMALL, Path::new("small.toml")).unwrap();
        let file = CityFile::from_world(&loaded.world);
        let again: CityFile = toml::from_str(&file.to_toml()).unwrap();
        assert_eq!(again, file);
    }
}
