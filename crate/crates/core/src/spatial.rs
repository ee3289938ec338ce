use rstar::primitives::GeomWithData;
use rstar::RTree;

use crate::geometry::Point;

type Entry<T> = GeomWithData<[f64; 2], T>;

/// Static point index backed by an R*-tree.
///
/// Circle queries return every indexed point whose Euclidean distance to the
/// center is at most the radius.
#[derive(Debug, Clone)]
pub struct PointIndex<T: Copy + PartialEq> {
    tree: RTree<Entry<T>>,
}

impl<T: Copy + PartialEq> Default for PointIndex<T> {
    fn default() -> Self {
        PointIndex { tree: RTree::new() }
    }
}

impl<T: Copy + PartialEq> PointIndex<T> {
    pub fn build(points: impl IntoIterator<Item = (Point, T)>) -> Self {
        let entries = points
            .into_iter()
            .map(|(p, id)| GeomWithData::new([p.x, p.y], id))
            .collect();
        PointIndex {
            tree: RTree::bulk_load(entries),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.size()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.size() == 0
    }

    /// Items within `radius` of `center`, paired with their distance.
    /// Order is unspecified.
    pub fn within(&self, center: &Point, radius: f64) -> Vec<(T, f64)> {
        if radius.is_nan() || radius < 0.0 {
            return Vec::new();
        }
        // Slightly widened so the exact `hypot` filter below is authoritative.
        let r2 = radius * radius * (1.0 + 1e-9) + 1e-12;
        self.tree
            .locate_within_distance([center.x, center.y], r2)
            .filter_map(|e| {
                let p = Point::new(e.geom()[0], e.geom()[1]);
                let d = center.distance(&p);
                (d <= radius).then_some((e.data, d))
            })
            .collect()
    }

    pub fn nearest(&self, center: &Point) -> Option<(T, f64)> {
        self.tree.nearest_neighbor([center.x, center.y]).map(|e| {
            let p = Point::new(e.geom()[0], e.geom()[1]);
            (e.data, center.distance(&p))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_index_returns_nothing() {
        let idx: PointIndex<u32> = PointIndex::build(Vec::new());
        assert!(idx.is_empty());
        assert!(idx.within(&Point::new(0.0, 0.0), 100.0).is_empty());
        assert!(idx.nearest(&Point::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn zero_radius_hits_exact_point() {
        let idx = PointIndex::build(vec![(Point::new(1.0, 1.0), 7u32), (Point::new(2.0, 1.0), 8)]);
        let hits = idx.within(&Point::new(1.0, 1.0), 0.0);
        assert_eq!(hits, vec![(7, 0.0)]);
        assert_eq!(idx.nearest(&Point::new(1.9, 1.0)).unwrap().0, 8);
    }
}
