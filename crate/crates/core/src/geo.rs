//! GeoJSON import and export.
//!
//! Imported features carry a `kind` property: `region` polygons (`id`,
//! `type`), `sublocation` points (`id`, `class`, `region`, `radius`,
//! optional `exposure`) and `road` line strings (`id`, optional
//! `direction`). Road crossings are the distinct line-string endpoints.
//! Coordinates are taken as lon/lat degrees when the collection has a
//! `"crs": "lonlat"` member, planar meters otherwise.

use std::collections::BTreeMap;

use geojson::{Feature, FeatureCollection, Geometry, GeometryValue, JsonObject, JsonValue, Position};

use crate::city::{CityModel, Exposure, Region, RegionId, RegionType, SlClass, SlId, Sublocation};
use crate::engine::Snapshot;
use crate::geometry::{Point, Polygon, Projection};
use crate::road::{Directionality, EdgeId, NodeId, RoadEdge, RoadGraph, RoadNode};
use crate::transit::TransitGraph;
use crate::world::World;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("not a GeoJSON FeatureCollection: {0}")]
    Format(String),
    #[error("feature {index}: {message}")]
    Feature { index: usize, message: String },
}

fn prop<'a>(props: &'a JsonObject, key: &str) -> Option<&'a JsonValue> {
    props.get(key)
}

fn prop_u32(props: &JsonObject, key: &str, index: usize) -> Result<u32, GeoError> {
    prop(props, key)
        .and_then(JsonValue::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| GeoError::Feature {
            index,
            message: format!("property {key:?} must be a non-negative integer"),
        })
}

fn prop_str<'a>(props: &'a JsonObject, key: &str, index: usize) -> Result<&'a str, GeoError> {
    prop(props, key).and_then(JsonValue::as_str).ok_or_else(|| GeoError::Feature {
        index,
        message: format!("property {key:?} must be a string"),
    })
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str, key: &str, index: usize) -> Result<T, GeoError> {
    serde::Deserialize::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s))
        .map_err(|_| GeoError::Feature {
            index,
            message: format!("unknown {key} {s:?}"),
        })
}

fn positions(g: &GeometryValue) -> Vec<&Position> {
    match g {
        GeometryValue::Point { coordinates } => vec![coordinates],
        GeometryValue::LineString { coordinates } => coordinates.iter().collect(),
        GeometryValue::Polygon { coordinates } => coordinates.iter().flatten().collect(),
        _ => Vec::new(),
    }
}

/// Build a world (without transit) from a FeatureCollection.
pub fn world_from_geojson(text: &str) -> Result<World, GeoError> {
    let fc: FeatureCollection = text.parse().map_err(|e: geojson::Error| GeoError::Format(e.to_string()))?;
    let lonlat = fc
        .foreign_members
        .as_ref()
        .and_then(|m| m.get("crs"))
        .and_then(JsonValue::as_str)
        == Some("lonlat");

    let projection = if lonlat {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for f in &fc.features {
            for p in f.geometry.iter().flat_map(|g| positions(&g.value)) {
                let c = p.as_slice();
                for k in 0..2 {
                    lo[k] = lo[k].min(c[k]);
                    hi[k] = hi[k].max(c[k]);
                }
            }
        }
        (lo[0].is_finite()).then(|| Projection {
            lon0: (lo[0] + hi[0]) / 2.0,
            lat0: (lo[1] + hi[1]) / 2.0,
        })
    } else {
        None
    };
    let to_point = |p: &Position| {
        let c = p.as_slice();
        match projection {
            Some(pr) => pr.forward(c[0], c[1]),
            None => Point::new(c[0], c[1]),
        }
    };

    let mut regions = Vec::new();
    let mut sls = Vec::new();
    let mut edges = Vec::new();
    let mut nodes: Vec<RoadNode> = Vec::new();
    let mut node_of: BTreeMap<(u64, u64), NodeId> = BTreeMap::new();
    let mut node_for = |p: Point| {
        let key = (p.x.to_bits(), p.y.to_bits());
        *node_of.entry(key).or_insert_with(|| {
            let id = NodeId(nodes.len() as u32 + 1);
            nodes.push(RoadNode { id, point: p });
            id
        })
    };

    for (index, f) in fc.features.iter().enumerate() {
        let empty = JsonObject::new();
        let props = f.properties.as_ref().unwrap_or(&empty);
        let kind = prop_str(props, "kind", index)?;
        let geom = f.geometry.as_ref().map(|g| &g.value);
        match (kind, geom) {
            ("region", Some(GeometryValue::Polygon { coordinates })) => {
                let ring = coordinates.first().ok_or_else(|| GeoError::Feature {
                    index,
                    message: "polygon without rings".into(),
                })?;
                regions.push(Region {
                    id: RegionId(prop_u32(props, "id", index)?),
                    region_type: parse_enum::<RegionType>(prop_str(props, "type", index)?, "region type", index)?,
                    boundary: Polygon::new(ring.iter().map(to_point).collect()),
                });
            }
            ("sublocation", Some(GeometryValue::Point { coordinates })) => {
                let exposure = match prop(props, "exposure").and_then(JsonValue::as_str) {
                    Some(s) => parse_enum::<Exposure>(s, "exposure", index)?,
                    None => Exposure::Indoor,
                };
                sls.push(Sublocation {
                    id: SlId(prop_u32(props, "id", index)?),
                    class: parse_enum::<SlClass>(prop_str(props, "class", index)?, "class", index)?,
                    region: RegionId(prop_u32(props, "region", index)?),
                    center: to_point(coordinates),
                    radius: prop(props, "radius").and_then(JsonValue::as_f64).ok_or_else(|| GeoError::Feature {
                        index,
                        message: "property \"radius\" must be a number".into(),
                    })?,
                    exposure,
                });
            }
            ("road", Some(GeometryValue::LineString { coordinates })) => {
                let pts: Vec<Point> = coordinates.iter().map(to_point).collect();
                if pts.len() < 2 {
                    return Err(GeoError::Feature {
                        index,
                        message: "road needs at least two positions".into(),
                    });
                }
                let direction = match prop(props, "direction").and_then(JsonValue::as_str) {
                    Some(s) => parse_enum::<Directionality>(s, "direction", index)?,
                    None => Directionality::TwoWay,
                };
                let from = node_for(pts[0]);
                let to = node_for(*pts.last().expect("two points"));
                edges.push(RoadEdge::new(EdgeId(prop_u32(props, "id", index)?), from, to, pts, direction));
            }
            (k, _) => {
                return Err(GeoError::Feature {
                    index,
                    message: format!("unsupported kind {k:?} for this geometry"),
                })
            }
        }
    }
    let mut city = CityModel::new(regions, sls);
    city.projection = projection;
    Ok(World::new(city, RoadGraph::new(nodes, edges), TransitGraph::new(Vec::new(), Vec::new())))
}

fn props(pairs: &[(&str, JsonValue)]) -> Option<JsonObject> {
    let mut m = JsonObject::new();
    for (k, v) in pairs {
        m.insert((*k).to_string(), v.clone());
    }
    Some(m)
}

fn feature(geometry: Geometry, properties: Option<JsonObject>) -> Feature {
    Feature {
        geometry: Some(geometry),
        properties,
        ..Feature::default()
    }
}

struct Coords(Option<Projection>);

impl Coords {
    fn pos(&self, p: &Point) -> Position {
        match self.0 {
            Some(pr) => {
                let (lon, lat) = pr.inverse(p);
                Position::from([lon, lat])
            }
            None => Position::from([p.x, p.y]),
        }
    }

    fn collection(&self, features: Vec<Feature>) -> FeatureCollection {
        let mut fc = FeatureCollection::new(features);
        if self.0.is_some() {
            fc.foreign_members = props(&[("crs", JsonValue::from("lonlat"))]);
        }
        fc
    }
}

/// Every entity of the world as features. Coordinates are lon/lat when the
/// city has a projection.
pub fn world_to_geojson(world: &World) -> FeatureCollection {
    let c = Coords(world.city.projection);
    let mut out = Vec::new();
    for r in world.city.regions() {
        let mut ring: Vec<Position> = r.boundary.vertices.iter().map(|p| c.pos(p)).collect();
        if let Some(first) = ring.first().cloned() {
            ring.push(first);
        }
        out.push(feature(
            Geometry::new_polygon([ring]),
            props(&[
                ("kind", "region".into()),
                ("id", r.id.0.into()),
                ("type", r.region_type.as_str().into()),
            ]),
        ));
    }
    for s in world.city.sublocations() {
        let exposure = match s.exposure {
            Exposure::Indoor => "indoor",
            Exposure::Outdoor => "outdoor",
        };
        out.push(feature(
            Geometry::new_point(c.pos(&s.center)),
            props(&[
                ("kind", "sublocation".into()),
                ("id", s.id.0.into()),
                ("class", s.class.as_str().into()),
                ("region", s.region.0.into()),
                ("radius", s.radius.into()),
                ("exposure", exposure.into()),
            ]),
        ));
    }
    for e in world.roads.edges() {
        let direction = match e.directionality {
            Directionality::OneWay => "one_way",
            Directionality::TwoWay => "two_way",
        };
        out.push(feature(
            Geometry::new_line_string(e.polyline.iter().map(|p| c.pos(p))),
            props(&[
                ("kind", "road".into()),
                ("id", e.id.0.into()),
                ("direction", direction.into()),
            ]),
        ));
    }
    for s in world.transit.stops() {
        out.push(feature(
            Geometry::new_point(c.pos(&s.point)),
            props(&[("kind", "stop".into()), ("id", s.id.0.into())]),
        ));
    }
    for (i, l) in world.transit.lines().iter().enumerate() {
        out.push(feature(
            Geometry::new_line_string(world.transit.line_geometry(i).iter().map(|p| c.pos(p))),
            props(&[
                ("kind", "line".into()),
                ("id", l.line.0.into()),
                ("direction", l.direction.to_string().into()),
            ]),
        ));
    }
    c.collection(out)
}

/// Agents as points with their infection status.
pub fn snapshot_to_geojson(snapshot: &Snapshot, projection: Option<Projection>) -> FeatureCollection {
    let c = Coords(projection);
    let features = snapshot
        .agents
        .iter()
        .map(|a| {
            feature(
                Geometry::new_point(c.pos(&a.position)),
                props(&[
                    ("person", a.person.0.into()),
                    ("status", a.status.as_str().into()),
                    ("traveling", a.traveling.into()),
                    ("time_s", snapshot.time.into()),
                ]),
            )
        })
        .collect();
    c.collection(features)
}
