//! Regions, sublocations and the spatial queries over them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Polygon, Projection};
use crate::spatial::PointIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlId(pub u32);

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SlId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionType {
    Housing,
    Office,
    School,
    University,
    Medical,
    Recreational,
}

impl RegionType {
    pub const ALL: [RegionType; 6] = [
        RegionType::Housing,
        RegionType::Office,
        RegionType::School,
        RegionType::University,
        RegionType::Medical,
        RegionType::Recreational,
    ];

    /// Sublocation classes a region of this type may contain.
    pub fn permitted_classes(self) -> &'static [SlClass] {
        use SlClass::*;
        match self {
            RegionType::Housing => &[Housing, Office, Recreational, Classroom],
            RegionType::Office => &[Office, Recreational],
            RegionType::School => &[Housing, Office, Classroom, Recreational],
            RegionType::University => &[Housing, Office, Classroom, Recreational],
            RegionType::Medical => &[Office, PatientRoom, Recreational],
            RegionType::Recreational => &[Recreational],
        }
    }

    pub fn permits(self, class: SlClass) -> bool {
        self.permitted_classes().contains(&class)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionType::Housing => "housing",
            RegionType::Office => "office",
            RegionType::School => "school",
            RegionType::University => "university",
            RegionType::Medical => "medical",
            RegionType::Recreational => "recreational",
        }
    }

    pub fn parse(s: &str) -> Option<RegionType> {
        RegionType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for RegionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlClass {
    Housing,
    Office,
    Classroom,
    PatientRoom,
    Recreational,
}

impl SlClass {
    pub const ALL: [SlClass; 5] = [
        SlClass::Housing,
        SlClass::Office,
        SlClass::Classroom,
        SlClass::PatientRoom,
        SlClass::Recreational,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SlClass::Housing => "housing",
            SlClass::Office => "office",
            SlClass::Classroom => "classroom",
            SlClass::PatientRoom => "patient_room",
            SlClass::Recreational => "recreational",
        }
    }
}

impl fmt::Display for SlClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Exposure {
    #[default]
    Indoor,
    Outdoor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: RegionId,
    pub region_type: RegionType,
    pub boundary: Polygon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sublocation {
    pub id: SlId,
    pub class: SlClass,
    pub region: RegionId,
    pub center: Point,
    pub radius: f64,
    pub exposure: Exposure,
}

/// Which invariant a [`Violation`] breaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    DuplicateId,
    RegionNotSimple,
    UnknownRegion,
    ClassNotPermitted,
    CenterOutsideRegion,
    NonPositiveRadius,
    NonFiniteCoordinate,
    IsolatedNode,
    UnknownNode,
    EdgeEndpointMismatch,
    EdgeLengthMismatch,
    DegenerateEdge,
    UnknownStop,
    LineTooShort,
    RepeatedSuccessiveStop,
    BadLineParameter,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::DuplicateId => "duplicate-id",
            Rule::RegionNotSimple => "region-not-simple",
            Rule::UnknownRegion => "unknown-region",
            Rule::ClassNotPermitted => "class-not-permitted",
            Rule::CenterOutsideRegion => "center-outside-region",
            Rule::NonPositiveRadius => "non-positive-radius",
            Rule::NonFiniteCoordinate => "non-finite-coordinate",
            Rule::IsolatedNode => "isolated-node",
            Rule::UnknownNode => "unknown-node",
            Rule::EdgeEndpointMismatch => "edge-endpoint-mismatch",
            Rule::EdgeLengthMismatch => "edge-length-mismatch",
            Rule::DegenerateEdge => "degenerate-edge",
            Rule::UnknownStop => "unknown-stop",
            Rule::LineTooShort => "line-too-short",
            Rule::RepeatedSuccessiveStop => "repeated-successive-stop",
            Rule::BadLineParameter => "bad-line-parameter",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entity {
    Region(RegionId),
    Sublocation(SlId),
    Node(u32),
    Edge(u32),
    Stop(u32),
    Line(u32),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Region(id) => write!(f, "region {id}"),
            Entity::Sublocation(id) => write!(f, "sublocation {id}"),
            Entity::Node(id) => write!(f, "node {id}"),
            Entity::Edge(id) => write!(f, "edge {id}"),
            Entity::Stop(id) => write!(f, "stop {id}"),
            Entity::Line(id) => write!(f, "line {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub entity: Entity,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.entity, self.rule, self.detail)
    }
}

/// Partitioned city: typed regions and the sublocations inside them.
///
/// Immutable after construction. Sublocations are kept sorted by id.
#[derive(Debug, Clone)]
pub struct CityModel {
    regions: Vec<Region>,
    sublocations: Vec<Sublocation>,
    region_lookup: HashMap<RegionId, usize>,
    sl_lookup: HashMap<SlId, usize>,
    index: PointIndex<u32>,
    pub projection: Option<Projection>,
}

impl CityModel {
    pub fn new(mut regions: Vec<Region>, mut sublocations: Vec<Sublocation>) -> Self {
        regions.sort_by_key(|r| r.id);
        sublocations.sort_by_key(|s| s.id);
        let region_lookup = regions.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let sl_lookup = sublocations
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id, i))
            .collect();
        let index = PointIndex::build(
            sublocations
                .iter()
                .enumerate()
                .map(|(i, s)| (s.center, i as u32)),
        );
        CityModel {
            regions,
            sublocations,
            region_lookup,
            sl_lookup,
            index,
            projection: None,
        }
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn sublocations(&self) -> &[Sublocation] {
        &self.sublocations
    }

    pub fn region(&self, id: RegionId) -> Option<&Region> {
        self.region_lookup.get(&id).map(|&i| &self.regions[i])
    }

    pub fn sublocation(&self, id: SlId) -> Option<&Sublocation> {
        self.sl_lookup.get(&id).map(|&i| &self.sublocations[i])
    }

    pub fn region_type_of(&self, sl: SlId) -> Option<RegionType> {
        self.sublocation(sl)
            .and_then(|s| self.region(s.region))
            .map(|r| r.region_type)
    }

    pub fn sublocations_of_class(&self, class: SlClass) -> impl Iterator<Item = &Sublocation> {
        self.sublocations.iter().filter(move |s| s.class == class)
    }

    /// All sublocations within `radius` of `point`, optionally restricted to
    /// one class, ordered by ascending distance then ascending id.
    pub fn sublocations_near(
        &self,
        point: &Point,
        radius: f64,
        class_filter: Option<SlClass>,
    ) -> Vec<&Sublocation> {
        let mut hits: Vec<(f64, &Sublocation)> = self
            .index
            .within(point, radius)
            .into_iter()
            .map(|(i, d)| (d, &self.sublocations[i as usize]))
            .filter(|(_, s)| class_filter.is_none_or(|c| s.class == c))
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)));
        hits.into_iter().map(|(_, s)| s).collect()
    }

    /// Check every region and sublocation invariant. Returns one violation
    /// per breach; an empty list means the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut seen = BTreeSet::new();
        for r in &self.regions {
            if !seen.insert(r.id) {
                out.push(Violation {
                    entity: Entity::Region(r.id),
                    rule: Rule::DuplicateId,
                    detail: "region id appears more than once".into(),
                });
            }
            if r.boundary.vertices.iter().any(|p| !p.is_finite()) {
                out.push(Violation {
                    entity: Entity::Region(r.id),
                    rule: Rule::NonFiniteCoordinate,
                    detail: "boundary has a non-finite vertex".into(),
                });
            } else if !r.boundary.is_simple() {
                out.push(Violation {
                    entity: Entity::Region(r.id),
                    rule: Rule::RegionNotSimple,
                    detail: format!(
                        "boundary with {} vertices is not a simple polygon",
                        r.boundary.vertices.len()
                    ),
                });
            }
        }

        let mut seen = BTreeSet::new();
        for s in &self.sublocations {
            let entity = Entity::Sublocation(s.id);
            if !seen.insert(s.id) {
                out.push(Violation {
                    entity,
                    rule: Rule::DuplicateId,
                    detail: "sublocation id appears more than once".into(),
                });
            }
            if !(s.radius > 0.0) || !s.radius.is_finite() {
                out.push(Violation {
                    entity,
                    rule: Rule::NonPositiveRadius,
                    detail: format!("radius {} must be positive", s.radius),
                });
            }
            if !s.center.is_finite() {
                out.push(Violation {
                    entity,
                    rule: Rule::NonFiniteCoordinate,
                    detail: "center is not finite".into(),
                });
                continue;
            }
            let Some(region) = self.region(s.region) else {
                out.push(Violation {
                    entity,
                    rule: Rule::UnknownRegion,
                    detail: format!("owning region {} does not exist", s.region),
                });
                continue;
            };
            if !region.region_type.permits(s.class) {
                out.push(Violation {
                    entity,
                    rule: Rule::ClassNotPermitted,
                    detail: format!(
                        "{} sublocation not permitted in {} region {}",
                        s.class, region.region_type, region.id
                    ),
                });
            }
            if !region.boundary.contains(&s.center) {
                out.push(Violation {
                    entity,
                    rule: Rule::CenterOutsideRegion,
                    detail: format!(
                        "center ({:.2}, {:.2}) lies outside region {}",
                        s.center.x, s.center.y, region.id
                    ),
                });
            }
        }
        out
    }

    /// Region whose boundary contains `p`, lowest id first.
    pub fn region_at(&self, p: &Point) -> Option<&Region> {
        self.regions.iter().find(|r| r.boundary.contains(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, size: f64) -> Polygon {
        Polygon::rectangle(Point::new(x, y), Point::new(x + size, y + size))
    }

    fn sl(id: u32, class: SlClass, region: u32, x: f64, y: f64) -> Sublocation {
        Sublocation {
            id: SlId(id),
            class,
            region: RegionId(region),
            center: Point::new(x, y),
            radius: 5.0,
            exposure: Exposure::Indoor,
        }
    }

    #[test]
    fn patient_room_in_recreational_region_is_flagged() {
        let city = CityModel::new(
            vec![Region {
                id: RegionId(1),
                region_type: RegionType::Recreational,
                boundary: square(0.0, 0.0, 100.0),
            }],
            vec![
                sl(10, SlClass::PatientRoom, 1, 50.0, 50.0),
                sl(11, SlClass::Recreational, 1, 20.0, 20.0),
            ],
        );
        let v = city.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, Entity::Sublocation(SlId(10)));
        assert_eq!(v[0].rule, Rule::ClassNotPermitted);
    }

    #[test]
    fn compatible_city_has_no_violations() {
        let city = CityModel::new(
            vec![
                Region {
                    id: RegionId(1),
                    region_type: RegionType::Housing,
                    boundary: square(0.0, 0.0, 100.0),
                },
                Region {
                    id: RegionId(2),
                    region_type: RegionType::Medical,
                    boundary: square(100.0, 0.0, 100.0),
                },
            ],
            vec![
                sl(1, SlClass::Housing, 1, 10.0, 10.0),
                sl(2, SlClass::Classroom, 1, 30.0, 10.0),
                sl(3, SlClass::PatientRoom, 2, 150.0, 50.0),
            ],
        );
        assert!(city.validate().is_empty());
    }

    #[test]
    fn bad_radius_and_unknown_region() {
        let mut bad = sl(5, SlClass::Housing, 9, 1.0, 1.0);
        bad.radius = 0.0;
        let city = CityModel::new(vec![], vec![bad]);
        let rules: Vec<Rule> = city.validate().iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::NonPositiveRadius, Rule::UnknownRegion]);
    }

    #[test]
    fn table_of_permitted_pairs() {
        use RegionType as R;
        use SlClass as C;
        assert!(R::Medical.permits(C::PatientRoom));
        for rt in RegionType::ALL {
            if rt != R::Medical {
                assert!(!rt.permits(C::PatientRoom), "{rt}");
            }
        }
        for rt in [R::Office, R::Medical, R::Recreational] {
            assert!(!rt.permits(C::Classroom));
            assert!(!rt.permits(C::Housing));
        }
        assert_eq!(R::Recreational.permitted_classes(), &[C::Recreational]);
        assert_eq!(RegionType::parse("University"), Some(R::University));
        assert_eq!(RegionType::parse("agriculture"), None);
    }

    #[test]
    fn near_orders_by_distance_then_id() {
        let city = CityModel::new(
            vec![Region {
                id: RegionId(1),
                region_type: RegionType::Housing,
                boundary: square(-100.0, -100.0, 200.0),
            }],
            vec![
                sl(3, SlClass::Housing, 1, 10.0, 0.0),
                sl(1, SlClass::Housing, 1, 0.0, 10.0),
                sl(2, SlClass::Office, 1, 5.0, 0.0),
            ],
        );
        let ids: Vec<u32> = city
            .sublocations_near(&Point::new(0.0, 0.0), 10.0, None)
            .iter()
            .map(|s| s.id.0)
            .collect();
        assert_eq!(ids, vec![2, 1, 3]);
        let housing: Vec<u32> = city
            .sublocations_near(&Point::new(0.0, 0.0), 10.0, Some(SlClass::Housing))
            .iter()
            .map(|s| s.id.0)
            .collect();
        assert_eq!(housing, vec![1, 3]);
        let exact = city.sublocations_near(&Point::new(5.0, 0.0), 0.0, None);
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].id, SlId(2));
        assert!(city.sublocations_near(&Point::new(0.0, 0.0), 4.9, None).is_empty());
    }
}
