//! Public-transport network and the two-sided extension-area route search.
//!
//! The search grows stop sets level by level from both trip ends. On the
//! origin side a level is one ride along a directed line followed by a short
//! walk; on the destination side the same step runs backwards in time. The
//! first level at which the two sides share a stop fixes the minimum number
//! of rides, and the cheapest meeting stop (by estimated time) is expanded
//! into a full itinerary.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::city::{Entity, Rule, Violation};
use crate::geometry::Point;
use crate::spatial::PointIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StopId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u32);

impl fmt::Display for StopId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Outbound,
    Inbound,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Outbound => "outbound",
            Direction::Inbound => "inbound",
        })
    }
}

pub const DEFAULT_HEADWAY_S: f64 = 600.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Stop {
    pub id: StopId,
    pub point: Point,
}

/// One direction of a line: the ordered stops its vehicles visit.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedLine {
    pub line: LineId,
    pub direction: Direction,
    pub stops: Vec<StopId>,
    pub headway_s: f64,
    pub speed_mps: f64,
}

/// Ride along one directed line, identified by positions in its stop list.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitLeg {
    pub line: LineId,
    pub direction: Direction,
    pub board: StopId,
    pub alight: StopId,
    pub board_index: usize,
    pub alight_index: usize,
}

/// A complete public-transport trip.
///
/// `walks` has one entry more than `legs`: the access walk, one transfer walk
/// between each pair of consecutive legs, and the egress walk. Each walk is a
/// polyline of straight hops.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitItinerary {
    pub origin: Point,
    pub destination: Point,
    pub legs: Vec<TransitLeg>,
    pub walks: Vec<Vec<Point>>,
    pub transfers: usize,
    pub estimated_time_s: f64,
}

impl TransitItinerary {
    pub fn walk_length(&self) -> f64 {
        self.walks
            .iter()
            .flat_map(|w| w.windows(2))
            .map(|h| h[0].distance(&h[1]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransitFailure {
    #[error("no stop within {radius} m of the origin")]
    NoOriginStops { radius: f64 },
    #[error("no stop within {radius} m of the destination")]
    NoDestinationStops { radius: f64 },
    #[error("no connection found within {levels} expansion levels")]
    Exhausted { levels: usize },
}

/// Parameters of the route search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitSearch {
    /// Radius of the first extension area and of later transfer areas
    /// (meters). Level `i` uses `radii[i - 1]`, the last entry repeating.
    pub radii_m: Vec<f64>,
    /// Bound on the sum of origin-side and destination-side levels.
    pub max_levels: usize,
    pub walk_speed_mps: f64,
}

impl Default for TransitSearch {
    fn default() -> Self {
        TransitSearch {
            radii_m: vec![1000.0, 50.0],
            max_levels: 8,
            walk_speed_mps: 5.0 / 3.6,
        }
    }
}

impl TransitSearch {
    pub fn radius(&self, level: usize) -> f64 {
        let i = level.saturating_sub(1).min(self.radii_m.len().saturating_sub(1));
        self.radii_m.get(i).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Occurrence {
    line: usize,
    pos: usize,
}

/// Stops and directed lines. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct TransitGraph {
    stops: Vec<Stop>,
    lines: Vec<DirectedLine>,
    stop_lookup: HashMap<StopId, usize>,
    /// Per stop index, every (line, position) at which a line visits it.
    serving: Vec<Vec<Occurrence>>,
    /// Per directed line, stop indices (usize::MAX for unknown stops).
    line_stops: Vec<Vec<usize>>,
    /// Per directed line, cumulative section length at each position.
    cumulative: Vec<Vec<f64>>,
    index: PointIndex<u32>,
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Access,
    Ride {
        prev: usize,
        line: usize,
        board_pos: usize,
        alight_pos: usize,
    },
}

#[derive(Debug, Clone, Copy)]
enum Forward {
    Egress,
    Ride {
        next: usize,
        line: usize,
        board_pos: usize,
        alight_pos: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct Label<L> {
    time: f64,
    link: L,
}

/// Stop-indexed labels for one level.
struct Level<L> {
    labels: Vec<Option<Label<L>>>,
    members: Vec<usize>,
}

impl<L: Copy> Level<L> {
    fn new(n: usize) -> Self {
        Level {
            labels: vec![None; n],
            members: Vec::new(),
        }
    }

    fn offer(&mut self, stop: usize, time: f64, link: L) {
        match &mut self.labels[stop] {
            Some(l) if l.time <= time => {}
            Some(l) => *l = Label { time, link },
            slot @ None => {
                *slot = Some(Label { time, link });
                self.members.push(stop);
            }
        }
    }

    fn finish(mut self) -> Self {
        self.members.sort_unstable();
        self
    }

    fn get(&self, stop: usize) -> Option<&Label<L>> {
        self.labels[stop].as_ref()
    }
}

impl TransitGraph {
    pub fn new(mut stops: Vec<Stop>, lines: Vec<DirectedLine>) -> Self {
        stops.sort_by_key(|s| s.id);
        let stop_lookup: HashMap<StopId, usize> =
            stops.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        let mut serving = vec![Vec::new(); stops.len()];
        let mut line_stops = Vec::with_capacity(lines.len());
        let mut cumulative = Vec::with_capacity(lines.len());
        for (li, line) in lines.iter().enumerate() {
            let idx: Vec<usize> = line
                .stops
                .iter()
                .map(|s| stop_lookup.get(s).copied().unwrap_or(usize::MAX))
                .collect();
            let mut cum = Vec::with_capacity(idx.len());
            let mut acc = 0.0;
            for (pos, &si) in idx.iter().enumerate() {
                if pos > 0 {
                    let prev = idx[pos - 1];
                    if prev != usize::MAX && si != usize::MAX {
                        acc += stops[prev].point.distance(&stops[si].point);
                    }
                }
                cum.push(acc);
                if si != usize::MAX {
                    serving[si].push(Occurrence { line: li, pos });
                }
            }
            line_stops.push(idx);
            cumulative.push(cum);
        }
        let index = PointIndex::build(
            stops
                .iter()
                .enumerate()
                .map(|(i, s)| (s.point, i as u32)),
        );
        TransitGraph {
            stops,
            lines,
            stop_lookup,
            serving,
            line_stops,
            cumulative,
            index,
        }
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    pub fn lines(&self) -> &[DirectedLine] {
        &self.lines
    }

    pub fn stop(&self, id: StopId) -> Option<&Stop> {
        self.stop_lookup.get(&id).map(|&i| &self.stops[i])
    }

    pub fn line_index(&self, line: LineId, direction: Direction) -> Option<usize> {
        self.lines
            .iter()
            .position(|l| l.line == line && l.direction == direction)
    }

    /// Arc length along a directed line from its first stop to position `pos`.
    pub fn distance_along(&self, line: usize, pos: usize) -> f64 {
        self.cumulative[line][pos]
    }

    pub fn line_length(&self, line: usize) -> f64 {
        self.cumulative[line].last().copied().unwrap_or(0.0)
    }

    /// Polyline of a directed line through its stops.
    pub fn line_geometry(&self, line: usize) -> Vec<Point> {
        self.line_stops[line]
            .iter()
            .filter(|&&i| i != usize::MAX)
            .map(|&i| self.stops[i].point)
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for w in self.stops.windows(2) {
            if w[0].id == w[1].id {
                out.push(Violation {
                    entity: Entity::Stop(w[1].id.0),
                    rule: Rule::DuplicateId,
                    detail: "stop id appears more than once".into(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for line in &self.lines {
            let entity = Entity::Line(line.line.0);
            if !seen.insert((line.line, line.direction)) {
                out.push(Violation {
                    entity,
                    rule: Rule::DuplicateId,
                    detail: format!("direction {} listed more than once", line.direction),
                });
            }
            for s in &line.stops {
                if !self.stop_lookup.contains_key(s) {
                    out.push(Violation {
                        entity,
                        rule: Rule::UnknownStop,
                        detail: format!("{} direction references missing stop {s}", line.direction),
                    });
                }
            }
            let distinct: BTreeSet<_> = line.stops.iter().collect();
            if distinct.len() < 2 {
                out.push(Violation {
                    entity,
                    rule: Rule::LineTooShort,
                    detail: format!("{} direction visits fewer than 2 distinct stops", line.direction),
                });
            }
            if line.stops.windows(2).any(|w| w[0] == w[1]) {
                out.push(Violation {
                    entity,
                    rule: Rule::RepeatedSuccessiveStop,
                    detail: format!("{} direction repeats a stop back to back", line.direction),
                });
            }
            if !(line.headway_s > 0.0) || !(line.speed_mps > 0.0) {
                out.push(Violation {
                    entity,
                    rule: Rule::BadLineParameter,
                    detail: "headway and speed must be positive".into(),
                });
            }
        }
        out
    }

    fn ex_indices(&self, center: &Point, radius: f64) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self
            .index
            .within(center, radius)
            .into_iter()
            .map(|(i, d)| (i as usize, d))
            .collect();
        v.sort_unstable_by_key(|a| a.0);
        v
    }

    /// Stops within `radius` of `center`, in ascending id order.
    pub fn extension(&self, center: &Point, radius: f64) -> Vec<StopId> {
        self.ex_indices(center, radius)
            .into_iter()
            .map(|(i, _)| self.stops[i].id)
            .collect()
    }

    /// Stops that come immediately after `stop` on every directed line
    /// serving it.
    pub fn directly_reachable(&self, stop: StopId) -> BTreeSet<StopId> {
        let Some(&si) = self.stop_lookup.get(&stop) else {
            return BTreeSet::new();
        };
        self.serving[si]
            .iter()
            .filter_map(|o| self.lines[o.line].stops.get(o.pos + 1).copied())
            .collect()
    }

    fn ride_time(&self, line: usize, from_pos: usize, to_pos: usize) -> f64 {
        let l = &self.lines[line];
        let dist = self.cumulative[line][to_pos] - self.cumulative[line][from_pos];
        dist / l.speed_mps + 0.5 * l.headway_s
    }

    /// Find a public-transport itinerary from `ps` to `pe` with the fewest
    /// rides; ties go to the smallest estimated travel time, then to the
    /// lowest meeting-stop id.
    pub fn route(
        &self,
        ps: Point,
        pe: Point,
        search: &TransitSearch,
    ) -> Result<TransitItinerary, TransitFailure> {
        let n = self.stops.len();
        let walk = |d: f64| d / search.walk_speed_mps;
        let mut near_cache: HashMap<(usize, u64), Vec<(usize, f64)>> = HashMap::new();
        let mut near = |stop: usize, r: f64| -> Vec<(usize, f64)> {
            near_cache
                .entry((stop, r.to_bits()))
                .or_insert_with(|| self.ex_indices(&self.stops[stop].point, r))
                .clone()
        };

        let r1 = search.radius(1);
        let mut s_levels: Vec<Level<Back>> = Vec::new();
        let mut e_levels: Vec<Level<Forward>> = Vec::new();

        let mut s1 = Level::new(n);
        for (i, d) in self.ex_indices(&ps, r1) {
            s1.offer(i, walk(d), Back::Access);
        }
        let mut e1 = Level::new(n);
        for (i, d) in self.ex_indices(&pe, r1) {
            e1.offer(i, walk(d), Forward::Egress);
        }
        if s1.members.is_empty() {
            return Err(TransitFailure::NoOriginStops { radius: r1 });
        }
        if e1.members.is_empty() {
            return Err(TransitFailure::NoDestinationStops { radius: r1 });
        }
        s_levels.push(s1.finish());
        e_levels.push(e1.finish());

        // Level totals below 3 would mean zero rides.
        let mut expand_origin_side = true;
        while s_levels.len() + e_levels.len() < search.max_levels {
            if expand_origin_side {
                let level = s_levels.len() + 1;
                let radius = search.radius(level);
                let prev = s_levels.last().unwrap();
                let mut next = Level::new(n);
                for &s in &prev.members {
                    let base = prev.get(s).unwrap().time;
                    for occ in &self.serving[s] {
                        let stops = &self.line_stops[occ.line];
                        for (pos, &t) in stops.iter().enumerate().skip(occ.pos + 1) {
                            if t == usize::MAX {
                                break;
                            }
                            let arrive = base + self.ride_time(occ.line, occ.pos, pos);
                            for (u, d) in near(t, radius) {
                                next.offer(
                                    u,
                                    arrive + walk(d),
                                    Back::Ride {
                                        prev: s,
                                        line: occ.line,
                                        board_pos: occ.pos,
                                        alight_pos: pos,
                                    },
                                );
                            }
                        }
                    }
                }
                s_levels.push(next.finish());
            } else {
                let level = e_levels.len() + 1;
                let radius = search.radius(level);
                let prev = e_levels.last().unwrap();
                let mut next = Level::new(n);
                for &s in &prev.members {
                    let base = prev.get(s).unwrap().time;
                    for (t, d) in near(s, radius) {
                        let after_alight = base + walk(d);
                        for occ in &self.serving[t] {
                            let stops = &self.line_stops[occ.line];
                            for pos in (0..occ.pos).rev() {
                                let u = stops[pos];
                                if u == usize::MAX {
                                    break;
                                }
                                next.offer(
                                    u,
                                    after_alight + self.ride_time(occ.line, pos, occ.pos),
                                    Forward::Ride {
                                        next: s,
                                        line: occ.line,
                                        board_pos: pos,
                                        alight_pos: occ.pos,
                                    },
                                );
                            }
                        }
                    }
                }
                e_levels.push(next.finish());
            }
            expand_origin_side = !expand_origin_side;

            let s_top = s_levels.last().unwrap();
            let e_top = e_levels.last().unwrap();
            if s_top.members.is_empty() || e_top.members.is_empty() {
                break;
            }
            let best = s_top
                .members
                .iter()
                .filter_map(|&m| {
                    let e = e_top.get(m)?;
                    Some((s_top.get(m).unwrap().time + e.time, m))
                })
                .min_by(|a, b| {
                    a.0.total_cmp(&b.0)
                        .then(self.stops[a.1].id.cmp(&self.stops[b.1].id))
                });
            if let Some((time, meet)) = best {
                return Ok(self.reconstruct(ps, pe, &s_levels, &e_levels, meet, time));
            }
        }
        Err(TransitFailure::Exhausted {
            levels: search.max_levels,
        })
    }

    fn reconstruct(
        &self,
        ps: Point,
        pe: Point,
        s_levels: &[Level<Back>],
        e_levels: &[Level<Forward>],
        meet: usize,
        time: f64,
    ) -> TransitItinerary {
        // Walk points accumulate into `current` until a ride closes them off.
        let mut legs_rev = Vec::new();
        let mut walks_rev: Vec<Vec<Point>> = Vec::new();
        let mut current_rev = vec![self.stops[meet].point];
        let mut at = meet;
        for level in s_levels.iter().rev() {
            match level.get(at).expect("label on reconstruction path").link {
                Back::Access => {
                    current_rev.push(ps);
                    break;
                }
                Back::Ride {
                    prev,
                    line,
                    board_pos,
                    alight_pos,
                } => {
                    let alight = self.line_stops[line][alight_pos];
                    current_rev.push(self.stops[alight].point);
                    walks_rev.push(std::mem::take(&mut current_rev));
                    legs_rev.push(self.leg(line, board_pos, alight_pos));
                    current_rev.push(self.stops[prev].point);
                    at = prev;
                }
            }
        }
        walks_rev.push(current_rev);
        legs_rev.reverse();
        let mut legs = legs_rev;
        let mut walks: Vec<Vec<Point>> = walks_rev
            .into_iter()
            .rev()
            .map(|mut w| {
                w.reverse();
                w
            })
            .collect();

        // The last walk is still open at the meeting stop; extend forwards.
        let mut current = walks.pop().unwrap_or_default();
        let mut at = meet;
        for level in e_levels.iter().rev() {
            match level.get(at).expect("label on reconstruction path").link {
                Forward::Egress => {
                    current.push(pe);
                    break;
                }
                Forward::Ride {
                    next,
                    line,
                    board_pos,
                    alight_pos,
                } => {
                    walks.push(std::mem::take(&mut current));
                    legs.push(self.leg(line, board_pos, alight_pos));
                    let alight = self.line_stops[line][alight_pos];
                    current.push(self.stops[alight].point);
                    current.push(self.stops[next].point);
                    at = next;
                }
            }
        }
        walks.push(current);
        for w in &mut walks {
            w.dedup();
        }
        TransitItinerary {
            origin: ps,
            destination: pe,
            transfers: legs.len().saturating_sub(1),
            legs,
            walks,
            estimated_time_s: time,
        }
    }

    fn leg(&self, line: usize, board_pos: usize, alight_pos: usize) -> TransitLeg {
        let l = &self.lines[line];
        TransitLeg {
            line: l.line,
            direction: l.direction,
            board: l.stops[board_pos],
            alight: l.stops[alight_pos],
            board_index: board_pos,
            alight_index: alight_pos,
        }
    }

    /// Time (seconds from simulation start) at which vehicle `k` of a
    /// directed line reaches position `pos`. Vehicle `k` leaves the first
    /// stop at `k * headway`.
    pub fn vehicle_arrival(&self, line: usize, k: u64, pos: usize) -> f64 {
        let l = &self.lines[line];
        k as f64 * l.headway_s + self.cumulative[line][pos] / l.speed_mps
    }

    /// First vehicle reaching `pos` at or after `t`.
    pub fn next_vehicle(&self, line: usize, pos: usize, t: f64) -> u64 {
        let l = &self.lines[line];
        let offset = self.cumulative[line][pos] / l.speed_mps;
        let k = ((t - offset) / l.headway_s).ceil().max(0.0) as u64;
        // Guard against rounding just below the threshold.
        if self.vehicle_arrival(line, k, pos) < t {
            k + 1
        } else {
            k
        }
    }

    /// Position of vehicle `k` at time `t`, if it is on the road.
    pub fn vehicle_position(&self, line: usize, k: u64, t: f64) -> Option<Point> {
        let l = &self.lines[line];
        let travelled = (t - k as f64 * l.headway_s) * l.speed_mps;
        if travelled < 0.0 || travelled > self.line_length(line) {
            return None;
        }
        Some(crate::geometry::point_along(&self.line_geometry(line), travelled))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stop(id: u32, x: f64, y: f64) -> Stop {
        Stop {
            id: StopId(id),
            point: Point::new(x, y),
        }
    }

    fn line(id: u32, dir: Direction, stops: &[u32]) -> DirectedLine {
        DirectedLine {
            line: LineId(id),
            direction: dir,
            stops: stops.iter().map(|&s| StopId(s)).collect(),
            headway_s: DEFAULT_HEADWAY_S,
            speed_mps: 10.0,
        }
    }

    /// Stops A=1, B=2, C=3 in a row, served both ways.
    fn abc() -> TransitGraph {
        TransitGraph::new(
            vec![stop(1, 0.0, 0.0), stop(2, 1000.0, 0.0), stop(3, 2000.0, 0.0)],
            vec![
                line(1, Direction::Outbound, &[1, 2, 3]),
                line(1, Direction::Inbound, &[3, 2, 1]),
            ],
        )
    }

    #[test]
    fn directly_reachable_semantics() {
        let g = abc();
        let dr = g.directly_reachable(StopId(2));
        assert_eq!(dr.into_iter().collect::<Vec<_>>(), vec![StopId(1), StopId(3)]);

        let one_way = TransitGraph::new(
            vec![stop(1, 0.0, 0.0), stop(2, 1.0, 0.0)],
            vec![line(1, Direction::Outbound, &[1, 2])],
        );
        assert!(one_way.directly_reachable(StopId(2)).is_empty());
        assert!(one_way.directly_reachable(StopId(99)).is_empty());
    }

    #[test]
    fn extension_is_inclusive() {
        let g = abc();
        assert_eq!(g.extension(&Point::new(1000.0, 0.0), 0.0), vec![StopId(2)]);
        assert_eq!(
            g.extension(&Point::new(1000.0, 0.0), 1000.0),
            vec![StopId(1), StopId(2), StopId(3)]
        );
        assert!(g.extension(&Point::new(500.0, 300.0), 100.0).is_empty());
    }

    #[test]
    fn single_line_direct_ride() {
        let g = TransitGraph::new(
            (0..6).map(|i| stop(i, f64::from(i) * 800.0, 0.0)).collect(),
            vec![
                line(1, Direction::Outbound, &[0, 1, 2, 3, 4, 5]),
                line(1, Direction::Inbound, &[5, 4, 3, 2, 1, 0]),
            ],
        );
        let it = g
            .route(Point::new(0.0, 100.0), Point::new(4000.0, 100.0), &TransitSearch::default())
            .unwrap();
        assert_eq!(it.legs.len(), 1);
        assert_eq!(it.transfers, 0);
        assert_eq!(it.legs[0].direction, Direction::Outbound);
        assert!(it.legs[0].board_index < it.legs[0].alight_index);
        assert_eq!(it.walks.len(), 2);
        assert_eq!(it.walks[0][0], Point::new(0.0, 100.0));
        assert_eq!(*it.walks[1].last().unwrap(), Point::new(4000.0, 100.0));

        let back = g
            .route(Point::new(4000.0, 100.0), Point::new(0.0, 100.0), &TransitSearch::default())
            .unwrap();
        assert_eq!(back.legs[0].direction, Direction::Inbound);
    }

    #[test]
    fn two_lines_transfer_at_close_pair() {
        // Line 1 runs east along y=0, line 2 north along x=5000; stop 13
        // (line 1) and stop 20 (line 2) are 30 m apart.
        let mut stops: Vec<Stop> = (0..4).map(|i| stop(10 + i, f64::from(i) * 1500.0, 0.0)).collect();
        stops[3].point = Point::new(4980.0, 0.0);
        stops.extend((0..4).map(|i| stop(20 + i, 5000.0 + 10.0, 25.0 + f64::from(i) * 1500.0)));
        let g = TransitGraph::new(
            stops,
            vec![
                line(1, Direction::Outbound, &[10, 11, 12, 13]),
                line(2, Direction::Outbound, &[20, 21, 22, 23]),
            ],
        );
        let it = g
            .route(Point::new(0.0, -200.0), Point::new(5010.0, 4600.0), &TransitSearch::default())
            .unwrap();
        assert_eq!(it.legs.len(), 2);
        assert_eq!(it.transfers, 1);
        assert_eq!(it.legs[0].alight, StopId(13));
        assert_eq!(it.legs[1].board, StopId(20));
        assert_eq!(it.walks[1].len(), 2);
        assert!(it.walks[1][0].distance(&it.walks[1][1]) < 50.0);
    }

    #[test]
    fn failure_modes() {
        let g = abc();
        let s = TransitSearch::default();
        assert!(matches!(
            g.route(Point::new(0.0, 5000.0), Point::new(2000.0, 0.0), &s),
            Err(TransitFailure::NoOriginStops { .. })
        ));
        assert!(matches!(
            g.route(Point::new(0.0, 0.0), Point::new(9000.0, 0.0), &s),
            Err(TransitFailure::NoDestinationStops { .. })
        ));
        // Two disconnected one-way lines.
        let g = TransitGraph::new(
            vec![stop(1, 0.0, 0.0), stop(2, 3000.0, 0.0), stop(3, 6000.0, 0.0), stop(4, 9000.0, 0.0)],
            vec![line(1, Direction::Outbound, &[1, 2]), line(2, Direction::Outbound, &[3, 4])],
        );
        assert!(matches!(
            g.route(Point::new(0.0, 0.0), Point::new(9000.0, 0.0), &s),
            Err(TransitFailure::Exhausted { .. })
        ));
    }

    #[test]
    fn validation_rules() {
        let g = TransitGraph::new(
            vec![stop(1, 0.0, 0.0), stop(2, 1.0, 0.0)],
            vec![
                line(1, Direction::Outbound, &[1, 1]),
                line(2, Direction::Outbound, &[1, 9]),
            ],
        );
        let rules: Vec<Rule> = g.validate().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::LineTooShort));
        assert!(rules.contains(&Rule::RepeatedSuccessiveStop));
        assert!(rules.contains(&Rule::UnknownStop));
        assert!(abc().validate().is_empty());
    }

    #[test]
    fn vehicle_timing() {
        let g = abc();
        // 1000 m at 10 m/s: stop 2 is reached 100 s after departure.
        assert_eq!(g.vehicle_arrival(0, 0, 1), 100.0);
        assert_eq!(g.next_vehicle(0, 1, 100.0), 0);
        assert_eq!(g.next_vehicle(0, 1, 100.5), 1);
        assert_eq!(g.vehicle_arrival(0, 1, 1), 700.0);
        assert_eq!(g.vehicle_position(0, 0, 50.0), Some(Point::new(500.0, 0.0)));
        assert_eq!(g.vehicle_position(0, 0, 250.0), None);
    }
}
