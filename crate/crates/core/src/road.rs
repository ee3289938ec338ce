//! Road network: crossings joined by one- or two-way sections, shortest
//! paths between crossings and door-to-door routing over the network.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::city::{Entity, Rule, Violation};
use crate::geometry::{point_along, polyline_length, project_on_polyline, Point};
use crate::spatial::PointIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Directionality {
    OneWay,
    #[default]
    TwoWay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNode {
    pub id: NodeId,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadEdge {
    pub id: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
    /// Geometry from `from` to `to`, endpoints included.
    pub polyline: Vec<Point>,
    pub length: f64,
    pub directionality: Directionality,
}

impl RoadEdge {
    pub fn new(
        id: EdgeId,
        from: NodeId,
        to: NodeId,
        polyline: Vec<Point>,
        directionality: Directionality,
    ) -> Self {
        let length = polyline_length(&polyline);
        RoadEdge {
            id,
            from,
            to,
            polyline,
            length,
            directionality,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    edge: usize,
    forward: bool,
}

/// Crossing/section graph. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct RoadGraph {
    nodes: Vec<RoadNode>,
    edges: Vec<RoadEdge>,
    node_lookup: HashMap<NodeId, usize>,
    out_arcs: Vec<Vec<Arc>>,
    in_arcs: Vec<Vec<Arc>>,
    node_index: PointIndex<u32>,
}

/// One piece of a routed path.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Straight {
        from: Point,
        to: Point,
    },
    /// Travel along `edge` between two arc-length offsets measured from the
    /// edge's `from` node. `exit < entry` means travel against the edge's
    /// geometric orientation.
    OnRoad {
        edge: EdgeId,
        entry_offset: f64,
        exit_offset: f64,
        geometry: Vec<Point>,
    },
}

impl Segment {
    pub fn start(&self) -> Point {
        match self {
            Segment::Straight { from, .. } => *from,
            Segment::OnRoad { geometry, .. } => geometry[0],
        }
    }

    pub fn end(&self) -> Point {
        match self {
            Segment::Straight { to, .. } => *to,
            Segment::OnRoad { geometry, .. } => *geometry.last().expect("non-empty geometry"),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Segment::Straight { from, to } => from.distance(to),
            Segment::OnRoad {
                entry_offset,
                exit_offset,
                ..
            } => (exit_offset - entry_offset).abs(),
        }
    }

    pub fn is_straight(&self) -> bool {
        matches!(self, Segment::Straight { .. })
    }

    fn point_at(&self, s: f64) -> Point {
        match self {
            Segment::Straight { from, to } => {
                let len = from.distance(to);
                if len == 0.0 {
                    *from
                } else {
                    from.lerp(to, (s / len).clamp(0.0, 1.0))
                }
            }
            Segment::OnRoad { geometry, .. } => point_along(geometry, s),
        }
    }
}

/// An ordered, contiguous list of segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoutePath {
    pub segments: Vec<Segment>,
    pub total_length: f64,
}

impl RoutePath {
    pub fn from_segments(segments: Vec<Segment>) -> Self {
        let total_length = segments.iter().map(Segment::length).sum();
        RoutePath {
            segments,
            total_length,
        }
    }

    pub fn straight(from: Point, to: Point) -> Self {
        RoutePath::from_segments(vec![Segment::Straight { from, to }])
    }

    pub fn start(&self) -> Option<Point> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<Point> {
        self.segments.last().map(Segment::end)
    }

    /// Position after travelling `s` meters from the start.
    pub fn point_at(&self, s: f64) -> Option<Point> {
        let mut remaining = s.max(0.0);
        for seg in &self.segments {
            let len = seg.length();
            if remaining <= len {
                return Some(seg.point_at(remaining));
            }
            remaining -= len;
        }
        self.end()
    }

    /// Ordered coordinates, duplicates at segment joints removed.
    pub fn coordinates(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for seg in &self.segments {
            let pts = match seg {
                Segment::Straight { from, to } => vec![*from, *to],
                Segment::OnRoad { geometry, .. } => geometry.clone(),
            };
            for p in pts {
                if out.last() != Some(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// True when every segment starts where the previous one ended, within
    /// `tol` meters.
    pub fn is_contiguous(&self, tol: f64) -> bool {
        self.segments
            .windows(2)
            .all(|w| w[0].end().distance(&w[1].start()) <= tol)
    }
}

/// Node sequence and geometry of a crossing-to-crossing shortest path.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRoute {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub path: RoutePath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum RoadError {
    #[error("no directed path from node {from} to node {to}")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// How a door-to-door road route was assembled.
#[derive(Debug, Clone, PartialEq)]
pub enum RoadRoute {
    /// Origin and destination close enough for a straight line.
    Direct(RoutePath),
    /// Straight access to the road, access to the nearest crossing, shortest
    /// crossing-to-crossing path, then the mirrored legs to the destination.
    Composed {
        path: RoutePath,
        start_on_road: Point,
        start_node: NodeId,
        end_node: NodeId,
        end_on_road: Point,
        /// Number of on-road segments in the middle part.
        network_segments: usize,
    },
    /// The network could not connect the endpoints.
    Fallback(RoutePath),
}

impl RoadRoute {
    pub fn path(&self) -> &RoutePath {
        match self {
            RoadRoute::Direct(p) | RoadRoute::Fallback(p) => p,
            RoadRoute::Composed { path, .. } => path,
        }
    }

    pub fn into_path(self) -> RoutePath {
        match self {
            RoadRoute::Direct(p) | RoadRoute::Fallback(p) => p,
            RoadRoute::Composed { path, .. } => path,
        }
    }
}

/// Default straight-line threshold for door-to-door routing (meters).
pub const DEFAULT_WALK_THRESHOLD_M: f64 = 3_000.0;

#[derive(Clone, Copy, PartialEq)]
struct Scored {
    cost: f64,
    node: usize,
}

impl Eq for Scored {}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Point where a position meets the road network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadAccess {
    pub edge: EdgeId,
    pub point: Point,
    pub offset: f64,
    pub distance: f64,
}

impl RoadGraph {
    pub fn new(mut nodes: Vec<RoadNode>, mut edges: Vec<RoadEdge>) -> Self {
        nodes.sort_by_key(|n| n.id);
        edges.sort_by_key(|e| e.id);
        let node_lookup: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut out_arcs = vec![Vec::new(); nodes.len()];
        let mut in_arcs = vec![Vec::new(); nodes.len()];
        for (ei, e) in edges.iter().enumerate() {
            let (Some(&a), Some(&b)) = (node_lookup.get(&e.from), node_lookup.get(&e.to)) else {
                continue;
            };
            out_arcs[a].push(Arc {
                to: b,
                edge: ei,
                forward: true,
            });
            in_arcs[b].push(Arc {
                to: a,
                edge: ei,
                forward: true,
            });
            if e.directionality == Directionality::TwoWay {
                out_arcs[b].push(Arc {
                    to: a,
                    edge: ei,
                    forward: false,
                });
                in_arcs[a].push(Arc {
                    to: b,
                    edge: ei,
                    forward: false,
                });
            }
        }
        let node_index = PointIndex::build(
            nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.point, i as u32)),
        );
        RoadGraph {
            nodes,
            edges,
            node_lookup,
            out_arcs,
            in_arcs,
            node_index,
        }
    }

    pub fn nodes(&self) -> &[RoadNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&RoadNode> {
        self.node_lookup.get(&id).map(|&i| &self.nodes[i])
    }

    /// Ids of nodes directly reachable from `id` along permitted directions.
    pub fn successors(&self, id: NodeId) -> Vec<(NodeId, EdgeId, f64)> {
        let Some(&i) = self.node_lookup.get(&id) else {
            return Vec::new();
        };
        self.out_arcs[i]
            .iter()
            .map(|a| {
                let e = &self.edges[a.edge];
                (self.nodes[a.to].id, e.id, e.length)
            })
            .collect()
    }

    /// Number of sections touching the crossing, regardless of direction.
    pub fn degree(&self, id: NodeId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.from == id) + usize::from(e.to == id))
            .sum()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut degree = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 && self.nodes[i - 1].id == n.id {
                out.push(Violation {
                    entity: Entity::Node(n.id.0),
                    rule: Rule::DuplicateId,
                    detail: "node id appears more than once".into(),
                });
            }
            if !n.point.is_finite() {
                out.push(Violation {
                    entity: Entity::Node(n.id.0),
                    rule: Rule::NonFiniteCoordinate,
                    detail: "node coordinate is not finite".into(),
                });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let entity = Entity::Edge(e.id.0);
            if i > 0 && self.edges[i - 1].id == e.id {
                out.push(Violation {
                    entity,
                    rule: Rule::DuplicateId,
                    detail: "edge id appears more than once".into(),
                });
            }
            let ends = [e.from, e.to].map(|n| self.node_lookup.get(&n).copied());
            for (end, idx) in [e.from, e.to].iter().zip(ends) {
                match idx {
                    Some(k) => degree[k] += 1,
                    None => out.push(Violation {
                        entity,
                        rule: Rule::UnknownNode,
                        detail: format!("endpoint node {end} does not exist"),
                    }),
                }
            }
            if e.polyline.len() < 2 || !(e.length > 0.0) {
                out.push(Violation {
                    entity,
                    rule: Rule::DegenerateEdge,
                    detail: "edge needs at least two distinct polyline points".into(),
                });
                continue;
            }
            let arc = polyline_length(&e.polyline);
            if (arc - e.length).abs() > 1e-6 * arc.max(1e-9) {
                out.push(Violation {
                    entity,
                    rule: Rule::EdgeLengthMismatch,
                    detail: format!("declared length {} but polyline arc length {}", e.length, arc),
                });
            }
            if let (Some(a), Some(b)) = (ends[0], ends[1]) {
                let first = e.polyline[0];
                let last = *e.polyline.last().unwrap();
                if first.distance(&self.nodes[a].point) > 1e-6
                    || last.distance(&self.nodes[b].point) > 1e-6
                {
                    out.push(Violation {
                        entity,
                        rule: Rule::EdgeEndpointMismatch,
                        detail: "polyline endpoints do not coincide with node coordinates".into(),
                    });
                }
            }
        }
        for (k, d) in degree.iter().enumerate() {
            if *d == 0 {
                out.push(Violation {
                    entity: Entity::Node(self.nodes[k].id.0),
                    rule: Rule::IsolatedNode,
                    detail: "node has no incident sections".into(),
                });
            }
        }
        out
    }

    /// Distances to `target` over reversed arcs. Stops once `stop_at` is
    /// settled; entries that were never settled stay infinite.
    fn distances_to(&self, target: usize, stop_at: usize) -> Vec<f64> {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[target] = 0.0;
        heap.push(Scored {
            cost: 0.0,
            node: target,
        });
        while let Some(Scored { cost, node }) = heap.pop() {
            if settled[node] {
                continue;
            }
            settled[node] = true;
            if node == stop_at {
                break;
            }
            for arc in &self.in_arcs[node] {
                let next = cost + self.edges[arc.edge].length;
                if next < dist[arc.to] {
                    dist[arc.to] = next;
                    heap.push(Scored {
                        cost: next,
                        node: arc.to,
                    });
                }
            }
        }
        for (d, s) in dist.iter_mut().zip(&settled) {
            if !s {
                *d = f64::INFINITY;
            }
        }
        dist
    }

    /// Minimum-length directed path between two crossings. Among paths of
    /// equal length the lexicographically smallest node-id sequence wins.
    pub fn shortest_path(&self, src: NodeId, dst: NodeId) -> Result<NodeRoute, RoadError> {
        let &s = self.node_lookup.get(&src).ok_or(RoadError::UnknownNode(src))?;
        let &t = self.node_lookup.get(&dst).ok_or(RoadError::UnknownNode(dst))?;
        if s == t {
            return Ok(NodeRoute {
                nodes: vec![src],
                edges: Vec::new(),
                path: RoutePath::default(),
            });
        }
        let dist = self.distances_to(t, s);
        if !dist[s].is_finite() {
            return Err(RoadError::Unreachable { from: src, to: dst });
        }

        let mut nodes = vec![src];
        let mut edges = Vec::new();
        let mut segments = Vec::new();
        let mut u = s;
        while u != t {
            let tol = 1e-9 * dist[u].max(1.0);
            let mut best: Option<&Arc> = None;
            for arc in &self.out_arcs[u] {
                let e = &self.edges[arc.edge];
                if !dist[arc.to].is_finite() || (e.length + dist[arc.to] - dist[u]).abs() > tol {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let be = &self.edges[b.edge];
                        (self.nodes[arc.to].id, e.length, e.id)
                            < (self.nodes[b.to].id, be.length, be.id)
                    }
                };
                if better {
                    best = Some(arc);
                }
            }
            let arc = best.expect("a tight arc exists on every shortest path");
            let e = &self.edges[arc.edge];
            segments.push(self.traverse(arc.edge, arc.forward));
            edges.push(e.id);
            nodes.push(self.nodes[arc.to].id);
            u = arc.to;
        }
        Ok(NodeRoute {
            nodes,
            edges,
            path: RoutePath::from_segments(segments),
        })
    }

    fn traverse(&self, edge: usize, forward: bool) -> Segment {
        let e = &self.edges[edge];
        let mut geometry = e.polyline.clone();
        let (entry_offset, exit_offset) = if forward {
            (0.0, e.length)
        } else {
            geometry.reverse();
            (e.length, 0.0)
        };
        Segment::OnRoad {
            edge: e.id,
            entry_offset,
            exit_offset,
            geometry,
        }
    }

    /// Nearest point on any section by perpendicular projection; ties go to
    /// the lowest edge id.
    pub fn nearest_on_road(&self, p: &Point) -> Option<RoadAccess> {
        let mut best: Option<RoadAccess> = None;
        for e in &self.edges {
            let Some(proj) = project_on_polyline(p, &e.polyline) else {
                continue;
            };
            if best.is_none_or(|b| proj.distance < b.distance) {
                best = Some(RoadAccess {
                    edge: e.id,
                    point: proj.point,
                    offset: proj.offset,
                    distance: proj.distance,
                });
            }
        }
        best
    }

    /// Nearest crossing; ties go to the lowest node id.
    pub fn nearest_node(&self, p: &Point) -> Option<NodeId> {
        let (_, d) = self.node_index.nearest(p)?;
        self.node_index
            .within(p, d)
            .into_iter()
            .map(|(i, d)| (d, self.nodes[i as usize].id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }

    /// Door-to-door route between two arbitrary points.
    ///
    /// Within `walk_threshold` the route is the straight line. Beyond it the
    /// route is five parts: straight to the nearest on-road point, on to the
    /// nearest crossing, the crossing-to-crossing shortest path, then the
    /// mirrored legs to the destination.
    pub fn route(&self, ps: Point, pe: Point, walk_threshold: f64) -> RoadRoute {
        if ps.distance(&pe) <= walk_threshold {
            return RoadRoute::Direct(RoutePath::straight(ps, pe));
        }
        let fallback = |why: &str| {
            log::warn!(
                "road routing failed ({why}) from ({:.1}, {:.1}) to ({:.1}, {:.1}); using a straight line",
                ps.x,
                ps.y,
                pe.x,
                pe.y
            );
            RoadRoute::Fallback(RoutePath::straight(ps, pe))
        };
        let (Some(rs), Some(re)) = (self.nearest_on_road(&ps), self.nearest_on_road(&pe)) else {
            return fallback("empty road network");
        };
        let (Some(ns), Some(ne)) = (self.nearest_node(&rs.point), self.nearest_node(&re.point))
        else {
            return fallback("empty road network");
        };
        let core = match self.shortest_path(ns, ne) {
            Ok(core) => core,
            Err(e) => return fallback(&e.to_string()),
        };
        let ns_point = self.nodes[self.node_lookup[&ns]].point;
        let ne_point = self.nodes[self.node_lookup[&ne]].point;
        let network_segments = core.path.segments.len();
        let mut segments = Vec::with_capacity(network_segments + 4);
        segments.push(Segment::Straight {
            from: ps,
            to: rs.point,
        });
        segments.push(Segment::Straight {
            from: rs.point,
            to: ns_point,
        });
        segments.extend(core.path.segments);
        segments.push(Segment::Straight {
            from: ne_point,
            to: re.point,
        });
        segments.push(Segment::Straight {
            from: re.point,
            to: pe,
        });
        RoadRoute::Composed {
            path: RoutePath::from_segments(segments),
            start_on_road: rs.point,
            start_node: ns,
            end_node: ne,
            end_on_road: re.point,
            network_segments,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, x: f64, y: f64) -> RoadNode {
        RoadNode {
            id: NodeId(id),
            point: Point::new(x, y),
        }
    }

    fn edge(graph_nodes: &[RoadNode], id: u32, a: u32, b: u32, dir: Directionality) -> RoadEdge {
        let pa = graph_nodes.iter().find(|n| n.id.0 == a).unwrap().point;
        let pb = graph_nodes.iter().find(|n| n.id.0 == b).unwrap().point;
        RoadEdge::new(EdgeId(id), NodeId(a), NodeId(b), vec![pa, pb], dir)
    }

    #[test]
    fn identity_path_is_empty() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 100.0, 0.0)];
        let edges = vec![edge(&nodes, 0, 0, 1, Directionality::TwoWay)];
        let g = RoadGraph::new(nodes, edges);
        let r = g.shortest_path(NodeId(0), NodeId(0)).unwrap();
        assert_eq!(r.nodes, vec![NodeId(0)]);
        assert!(r.path.segments.is_empty());
        assert_eq!(r.path.total_length, 0.0);
        let r = g.shortest_path(NodeId(1), NodeId(0)).unwrap();
        assert_eq!(r.path.total_length, 100.0);
        assert_eq!(r.path.start(), Some(Point::new(100.0, 0.0)));
    }

    #[test]
    fn one_way_edges_are_respected() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 100.0, 0.0)];
        let edges = vec![edge(&nodes, 0, 0, 1, Directionality::OneWay)];
        let g = RoadGraph::new(nodes, edges);
        assert!(g.shortest_path(NodeId(0), NodeId(1)).is_ok());
        assert_eq!(
            g.shortest_path(NodeId(1), NodeId(0)),
            Err(RoadError::Unreachable {
                from: NodeId(1),
                to: NodeId(0)
            })
        );
        assert_eq!(
            g.shortest_path(NodeId(1), NodeId(7)),
            Err(RoadError::UnknownNode(NodeId(7)))
        );
    }

    #[test]
    fn equal_length_paths_pick_smallest_node_sequence() {
        // 0 -> {2, 1} -> 3 on a unit square: both routes 200 m long.
        let nodes = vec![
            node(0, 0.0, 0.0),
            node(2, 100.0, 0.0),
            node(1, 0.0, 100.0),
            node(3, 100.0, 100.0),
        ];
        let edges = vec![
            edge(&nodes, 0, 0, 2, Directionality::TwoWay),
            edge(&nodes, 1, 2, 3, Directionality::TwoWay),
            edge(&nodes, 2, 0, 1, Directionality::TwoWay),
            edge(&nodes, 3, 1, 3, Directionality::TwoWay),
        ];
        let g = RoadGraph::new(nodes, edges);
        let r = g.shortest_path(NodeId(0), NodeId(3)).unwrap();
        assert_eq!(r.nodes, vec![NodeId(0), NodeId(1), NodeId(3)]);
        assert!(r.path.is_contiguous(1e-9));
    }

    #[test]
    fn short_trip_is_straight_and_long_trip_has_five_parts() {
        let mut nodes = Vec::new();
        for i in 0..10u32 {
            nodes.push(node(i, f64::from(i) * 1000.0, 0.0));
        }
        let edges: Vec<RoadEdge> = (0..9)
            .map(|i| edge(&nodes, i, i, i + 1, Directionality::TwoWay))
            .collect();
        let g = RoadGraph::new(nodes, edges);

        let same = g.route(Point::new(5.0, 5.0), Point::new(5.0, 5.0), DEFAULT_WALK_THRESHOLD_M);
        assert_eq!(same.path().total_length, 0.0);

        let short = g.route(Point::new(0.0, 50.0), Point::new(2000.0, 50.0), DEFAULT_WALK_THRESHOLD_M);
        assert!(matches!(short, RoadRoute::Direct(_)));
        assert_eq!(short.path().segments.len(), 1);
        assert!((short.path().total_length - 2000.0).abs() < 1e-9);

        let long = g.route(Point::new(300.0, 40.0), Point::new(5300.0, -30.0), DEFAULT_WALK_THRESHOLD_M);
        let RoadRoute::Composed {
            path,
            start_node,
            end_node,
            network_segments,
            ..
        } = &long
        else {
            panic!("expected composed route, got {long:?}");
        };
        assert_eq!(*start_node, NodeId(0));
        assert_eq!(*end_node, NodeId(5));
        assert_eq!(*network_segments, 5);
        assert_eq!(path.segments.len(), 9);
        assert!(path.is_contiguous(1e-9));
        // 40 + 300 + 5000 + 300 + 30
        assert!((path.total_length - 5670.0).abs() < 1e-9);
    }

    #[test]
    fn disconnected_core_falls_back_to_straight() {
        let nodes = vec![
            node(0, 0.0, 0.0),
            node(1, 100.0, 0.0),
            node(2, 10_000.0, 0.0),
            node(3, 10_100.0, 0.0),
        ];
        let edges = vec![
            edge(&nodes, 0, 0, 1, Directionality::TwoWay),
            edge(&nodes, 1, 2, 3, Directionality::TwoWay),
        ];
        let g = RoadGraph::new(nodes, edges);
        let r = g.route(Point::new(0.0, 0.0), Point::new(10_100.0, 0.0), DEFAULT_WALK_THRESHOLD_M);
        assert!(matches!(r, RoadRoute::Fallback(_)));
        assert_eq!(r.path().segments.len(), 1);
    }

    #[test]
    fn validation_flags_isolated_nodes_and_bad_geometry() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 100.0, 0.0), node(2, 5.0, 5.0)];
        let mut bad = edge(&nodes, 0, 0, 1, Directionality::TwoWay);
        bad.polyline[1] = Point::new(90.0, 0.0);
        bad.length = 90.0;
        let g = RoadGraph::new(nodes, vec![bad]);
        let rules: Vec<Rule> = g.validate().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::EdgeEndpointMismatch));
        assert!(rules.contains(&Rule::IsolatedNode));
        assert_eq!(g.degree(NodeId(0)), 1);
    }

    #[test]
    fn point_at_walks_segments() {
        let p = RoutePath::from_segments(vec![
            Segment::Straight {
                from: Point::new(0.0, 0.0),
                to: Point::new(3.0, 4.0),
            },
            Segment::Straight {
                from: Point::new(3.0, 4.0),
                to: Point::new(3.0, 14.0),
            },
        ]);
        assert_eq!(p.total_length, 15.0);
        assert_eq!(p.point_at(10.0), Some(Point::new(3.0, 9.0)));
        assert_eq!(p.point_at(99.0), Some(Point::new(3.0, 14.0)));
        assert_eq!(p.coordinates().len(), 3);
    }
}
