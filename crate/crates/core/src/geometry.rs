//! Planar geometry in projected meters.

use serde::{Deserialize, Serialize};

/// A point in projected planar coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Closed polygon ring; the closing edge from the last vertex back to the
/// first is implicit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        let mut vertices = vertices;
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Polygon { vertices }
    }

    pub fn rectangle(min: Point, max: Point) -> Self {
        Polygon::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        self.edges()
            .map(|(a, b)| a.x * b.y - b.x * a.y)
            .sum::<f64>()
            / 2.0
    }

    pub fn centroid(&self) -> Point {
        let area = self.signed_area();
        if area.abs() < f64::EPSILON {
            let n = self.vertices.len().max(1) as f64;
            let (sx, sy) = self
                .vertices
                .iter()
                .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
            return Point::new(sx / n, sy / n);
        }
        let (cx, cy) = self.edges().fold((0.0, 0.0), |(cx, cy), (a, b)| {
            let cross = a.x * b.y - b.x * a.y;
            (cx + (a.x + b.x) * cross, cy + (a.y + b.y) * cross)
        });
        Point::new(cx / (6.0 * area), cy / (6.0 * area))
    }

    /// Winding-number containment. Points on the boundary count as inside.
    pub fn contains(&self, p: &Point) -> bool {
        let mut winding = 0i32;
        for (a, b) in self.edges() {
            if point_on_segment(p, &a, &b) {
                return true;
            }
            let cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
            if a.y <= p.y {
                if b.y > p.y && cross > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// True when the ring has at least 3 distinct vertices, non-zero area and
    /// no two non-adjacent edges touch.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 || self.signed_area().abs() <= f64::EPSILON {
            return false;
        }
        let edges: Vec<(Point, Point)> = self.edges().collect();
        if edges.iter().any(|(a, b)| a == b) {
            return false;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges may only share their common vertex; a
                    // collinear fold-back is a self-intersection.
                    let (a, b) = edges[i];
                    let (c, d) = edges[j];
                    let (far_i, far_j) = if j == i + 1 { (a, d) } else { (b, c) };
                    if point_on_segment(&far_j, &a, &b) || point_on_segment(&far_i, &c, &d) {
                        return false;
                    }
                    continue;
                }
                if segments_intersect(&edges[i].0, &edges[i].1, &edges[j].0, &edges[j].1) {
                    return false;
                }
            }
        }
        true
    }
}

fn orientation(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orientation(a, b, p) == 0.0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    point_on_segment(c, a, b)
        || point_on_segment(d, a, b)
        || point_on_segment(a, c, d)
        || point_on_segment(b, c, d)
}

/// Closest point on segment `a..b` to `p`, with the parameter `t` in [0,1].
pub fn project_on_segment(p: &Point, a: &Point, b: &Point) -> (Point, f64) {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return (*a, 0.0);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    (a.lerp(b, t), t)
}

/// Arc length of a polyline.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylineProjection {
    pub point: Point,
    /// Arc-length offset of `point` from the polyline start.
    pub offset: f64,
    pub distance: f64,
}

pub fn project_on_polyline(p: &Point, points: &[Point]) -> Option<PolylineProjection> {
    let mut best: Option<PolylineProjection> = None;
    let mut walked = 0.0;
    for w in points.windows(2) {
        let seg_len = w[0].distance(&w[1]);
        let (q, t) = project_on_segment(p, &w[0], &w[1]);
        let d = p.distance(&q);
        if best.is_none_or(|b| d < b.distance) {
            best = Some(PolylineProjection {
                point: q,
                offset: walked + t * seg_len,
                distance: d,
            });
        }
        walked += seg_len;
    }
    if best.is_none() {
        if let Some(first) = points.first() {
            best = Some(PolylineProjection {
                point: *first,
                offset: 0.0,
                distance: p.distance(first),
            });
        }
    }
    best
}

/// Point located `offset` meters along the polyline (clamped to its ends).
pub fn point_along(points: &[Point], offset: f64) -> Point {
    let Some(first) = points.first() else {
        return Point::default();
    };
    if offset <= 0.0 {
        return *first;
    }
    let mut remaining = offset;
    for w in points.windows(2) {
        let seg_len = w[0].distance(&w[1]);
        if remaining <= seg_len {
            if seg_len == 0.0 {
                return w[0];
            }
            return w[0].lerp(&w[1], remaining / seg_len);
        }
        remaining -= seg_len;
    }
    *points.last().unwrap_or(first)
}

/// Equirectangular projection anchored at a reference lon/lat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub lon0: f64,
    pub lat0: f64,
}

const EARTH_RADIUS_M: f64 = 6_371_008.8;

impl Projection {
    pub fn forward(&self, lon: f64, lat: f64) -> Point {
        let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        Point::new(
            (lon - self.lon0) * k * self.lat0.to_radians().cos(),
            (lat - self.lat0) * k,
        )
    }

    pub fn inverse(&self, p: &Point) -> (f64, f64) {
        let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        (
            self.lon0 + p.x / (k * self.lat0.to_radians().cos()),
            self.lat0 + p.y / k,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_containment_and_boundary() {
        let sq = Polygon::rectangle(Point::new(0.0, 0.0), Point::new(10.0, 10.0));
        assert!(sq.contains(&Point::new(5.0, 5.0)));
        assert!(sq.contains(&Point::new(0.0, 5.0)));
        assert!(!sq.contains(&Point::new(10.5, 5.0)));
        assert!(sq.is_simple());
        assert_eq!(sq.signed_area(), 100.0);
        assert_eq!(sq.centroid(), Point::new(5.0, 5.0));
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bowtie = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(10.0, 0.0),
            Point::new(0.0, 10.0),
        ]);
        assert!(!bowtie.is_simple());
        let degenerate = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]);
        assert!(!degenerate.is_simple());
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 0.0),
        ]);
        assert_eq!(p.vertices.len(), 3);
    }

    #[test]
    fn polyline_projection_offsets() {
        let line = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(10.0, 10.0)];
        let proj = project_on_polyline(&Point::new(12.0, 4.0), &line).unwrap();
        assert_eq!(proj.point, Point::new(10.0, 4.0));
        assert!((proj.offset - 14.0).abs() < 1e-12);
        assert!((proj.distance - 2.0).abs() < 1e-12);
        assert_eq!(point_along(&line, 14.0), Point::new(10.0, 4.0));
        assert_eq!(point_along(&line, 100.0), Point::new(10.0, 10.0));
        assert_eq!(polyline_length(&line), 20.0);
    }

    #[test]
    fn projection_round_trips() {
        let proj = Projection { lon0: 112.9, lat0: 28.2 };
        let p = proj.forward(112.91, 28.21);
        let (lon, lat) = proj.inverse(&p);
        assert!((lon - 112.91).abs() < 1e-9 && (lat - 28.21).abs() < 1e-9);
        // ~1.1 km per 0.01 degree latitude
        assert!((p.y - 1111.95).abs() < 1.0);
    }
}
