//! Synthetic population: attributes, demographic classes and anchor
//! sublocations.

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::city::{CityModel, RegionType, SlClass, SlId};
use crate::epidemic::{DiseaseState, InfectionStatus};
use crate::geometry::Point;
use crate::rng::{stream, Stream};
use crate::spatial::PointIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersonId(pub u32);

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    #[serde(rename = "M")]
    Male,
    #[serde(rename = "F")]
    Female,
}

/// Age and lifestyle class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonClass {
    /// Under 3 years; no independent activities.
    Toddler,
    /// 3 to 18 years; daycare or school.
    SchoolChild,
    /// 18 to 60 years, not in college.
    Adult,
    /// 18 to 25 years, in college.
    CollegeStudent,
    /// 60 years and over.
    Elder,
}

impl PersonClass {
    pub const ALL: [PersonClass; 5] = [
        PersonClass::Toddler,
        PersonClass::SchoolChild,
        PersonClass::Adult,
        PersonClass::CollegeStudent,
        PersonClass::Elder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PersonClass::Toddler => "toddler",
            PersonClass::SchoolChild => "school_child",
            PersonClass::Adult => "adult",
            PersonClass::CollegeStudent => "college_student",
            PersonClass::Elder => "elder",
        }
    }

    /// Whether the class has a regular place of work or study.
    pub fn has_workplace(self) -> bool {
        matches!(
            self,
            PersonClass::SchoolChild | PersonClass::Adult | PersonClass::CollegeStudent
        )
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PersonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class from age in whole years. Intervals are half-open: 3 is a school
/// child, 18 an adult (or college student), 60 an elder. The college flag
/// only matters between 18 and 25.
pub fn classify(age: u32, is_college_student: bool) -> PersonClass {
    match age {
        0..=2 => PersonClass::Toddler,
        3..=17 => PersonClass::SchoolChild,
        18..=24 if is_college_student => PersonClass::CollegeStudent,
        18..=59 => PersonClass::Adult,
        _ => PersonClass::Elder,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Person {
    pub id: PersonId,
    pub age: u32,
    pub gender: Gender,
    pub class: PersonClass,
    pub susceptibility: f64,
    pub immune: bool,
    pub disease: DiseaseState,
    pub housing: SlId,
    pub office: Option<SlId>,
}

impl Person {
    pub fn status(&self) -> InfectionStatus {
        self.disease.status
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Household {
    pub housing: SlId,
    pub members: Vec<PersonId>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub persons: Vec<Person>,
    pub households: Vec<Household>,
}

/// Ages drawn uniformly from `[min, max)` once the bin is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeBin {
    pub min: u32,
    pub max: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdSize {
    pub size: u32,
    pub weight: f64,
}

/// Distances drawn uniformly from `[min_m, max_m]`; equal bounds give a
/// point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceBin {
    pub min_m: f64,
    pub max_m: f64,
    pub weight: f64,
}

/// Relative weights of the sublocation classes adults work in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkplaceMix {
    pub office: f64,
    pub recreational: f64,
    pub patient_room: f64,
}

impl Default for WorkplaceMix {
    fn default() -> Self {
        WorkplaceMix {
            office: 0.8,
            recreational: 0.15,
            patient_room: 0.05,
        }
    }
}

/// Inputs of population synthesis. The distributions are scenario inputs;
/// [`DemographicConfig::toy`] supplies illustrative values only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemographicConfig {
    pub population_size: usize,
    pub age_bins: Vec<AgeBin>,
    pub household_sizes: Vec<HouseholdSize>,
    pub commute_distance: Vec<DistanceBin>,
    /// Fraction of 18 to 25 year olds who are college students.
    #[serde(default = "default_college_fraction")]
    pub college_fraction: f64,
    #[serde(default = "default_male_fraction")]
    pub male_fraction: f64,
    #[serde(default = "default_susceptibility")]
    pub susceptibility: f64,
    #[serde(default)]
    pub immune_fraction: f64,
    #[serde(default)]
    pub workplace_mix: WorkplaceMix,
}

fn default_college_fraction() -> f64 {
    0.3
}
fn default_male_fraction() -> f64 {
    0.5
}
fn default_susceptibility() -> f64 {
    1.0
}

impl DemographicConfig {
    pub fn toy(population_size: usize) -> Self {
        DemographicConfig {
            population_size,
            age_bins: vec![
                AgeBin { min: 0, max: 3, weight: 0.04 },
                AgeBin { min: 3, max: 18, weight: 0.16 },
                AgeBin { min: 18, max: 25, weight: 0.12 },
                AgeBin { min: 25, max: 60, weight: 0.52 },
                AgeBin { min: 60, max: 90, weight: 0.16 },
            ],
            household_sizes: vec![
                HouseholdSize { size: 1, weight: 0.15 },
                HouseholdSize { size: 2, weight: 0.3 },
                HouseholdSize { size: 3, weight: 0.35 },
                HouseholdSize { size: 4, weight: 0.15 },
                HouseholdSize { size: 5, weight: 0.05 },
            ],
            commute_distance: vec![
                DistanceBin { min_m: 0.0, max_m: 1000.0, weight: 0.3 },
                DistanceBin { min_m: 1000.0, max_m: 3000.0, weight: 0.4 },
                DistanceBin { min_m: 3000.0, max_m: 8000.0, weight: 0.3 },
            ],
            college_fraction: default_college_fraction(),
            male_fraction: default_male_fraction(),
            susceptibility: default_susceptibility(),
            immune_fraction: 0.0,
            workplace_mix: WorkplaceMix::default(),
        }
    }

    /// Field-level problems, as (field, message) pairs.
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.age_bins.is_empty() {
            out.push(("age_bins", "age distribution is missing".to_string()));
        }
        if self.household_sizes.is_empty() {
            out.push(("household_sizes", "household-size distribution is missing".to_string()));
        }
        if self.commute_distance.is_empty() {
            out.push(("commute_distance", "commute-distance distribution is missing".to_string()));
        }
        if self
            .age_bins
            .iter()
            .any(|b| b.min >= b.max || !(b.weight >= 0.0))
            || (!self.age_bins.is_empty() && self.age_bins.iter().all(|b| b.weight == 0.0))
        {
            out.push(("age_bins", "bins need min < max and non-negative, not all zero, weights".into()));
        }
        if self
            .household_sizes
            .iter()
            .any(|h| h.size == 0 || !(h.weight >= 0.0))
            || (!self.household_sizes.is_empty()
                && self.household_sizes.iter().all(|h| h.weight == 0.0))
        {
            out.push(("household_sizes", "sizes must be >= 1 with usable weights".into()));
        }
        if self
            .commute_distance
            .iter()
            .any(|b| !(b.min_m >= 0.0) || b.min_m > b.max_m || !(b.weight >= 0.0))
            || (!self.commute_distance.is_empty()
                && self.commute_distance.iter().all(|b| b.weight == 0.0))
        {
            out.push(("commute_distance", "bins need 0 <= min_m <= max_m and usable weights".into()));
        }
        for (name, v) in [
            ("college_fraction", self.college_fraction),
            ("male_fraction", self.male_fraction),
            ("susceptibility", self.susceptibility),
            ("immune_fraction", self.immune_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                out.push((name, format!("must be in [0, 1], got {v}")));
            }
        }
        let m = self.workplace_mix;
        if [m.office, m.recreational, m.patient_room]
            .iter()
            .any(|w| !(*w >= 0.0))
            || m.office + m.recreational + m.patient_room <= 0.0
        {
            out.push(("workplace_mix", "weights must be non-negative and not all zero".into()));
        }
        out
    }

    /// Expected share of each class implied by the age bins and the college
    /// fraction, indexed by [`PersonClass::index`].
    pub fn expected_class_shares(&self) -> [f64; 5] {
        let total: f64 = self.age_bins.iter().map(|b| b.weight).sum();
        let mut shares = [0.0; 5];
        for b in &self.age_bins {
            let p_bin = b.weight / total;
            let width = f64::from(b.max - b.min);
            for age in b.min..b.max {
                let p = p_bin / width;
                if (18..25).contains(&age) {
                    shares[PersonClass::CollegeStudent.index()] += p * self.college_fraction;
                    shares[PersonClass::Adult.index()] += p * (1.0 - self.college_fraction);
                } else {
                    shares[classify(age, false).index()] += p;
                }
            }
        }
        shares
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PopulationError {
    #[error("demographic config: {field}: {message}")]
    Config { field: String, message: String },
    #[error("cannot assign {what}: {reason}")]
    Assignment { what: String, reason: String },
}

struct Candidates {
    ids: Vec<(Point, SlId)>,
    index: PointIndex<u32>,
}

impl Candidates {
    fn new(city: &CityModel, keep: impl Fn(SlClass, RegionType) -> bool) -> Self {
        let ids: Vec<(Point, SlId)> = city
            .sublocations()
            .iter()
            .filter(|s| {
                city.region(s.region)
                    .is_some_and(|r| keep(s.class, r.region_type))
            })
            .map(|s| (s.center, s.id))
            .collect();
        let index = PointIndex::build(ids.iter().enumerate().map(|(i, (p, _))| (*p, i as u32)));
        Candidates { ids, index }
    }

    fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// A sublocation roughly `d` meters from `home`: uniformly among those
    /// within +-10% of `d`, otherwise the one whose distance is closest to
    /// `d` (lowest id on ties).
    fn pick<R: Rng + ?Sized>(&self, home: &Point, d: f64, rng: &mut R) -> Option<SlId> {
        let mut annulus: Vec<SlId> = self
            .index
            .within(home, d * 1.1)
            .into_iter()
            .filter(|(_, dist)| *dist >= d * 0.9)
            .map(|(i, _)| self.ids[i as usize].1)
            .collect();
        if !annulus.is_empty() {
            annulus.sort_unstable();
            return annulus.choose(rng).copied();
        }
        self.ids
            .iter()
            .map(|(p, id)| ((home.distance(p) - d).abs(), *id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }
}

fn weighted<T: Copy>(items: &[T], weight: impl Fn(&T) -> f64) -> Result<WeightedIndex<f64>, PopulationError> {
    WeightedIndex::new(items.iter().map(weight)).map_err(|e| PopulationError::Config {
        field: "weights".into(),
        message: e.to_string(),
    })
}

/// Build the population: households attached to Housing sublocations,
/// attributes drawn from `demo`, then a workplace for every class that has
/// one, chosen at a sampled commute distance from home.
pub fn synthesize_population(
    city: &CityModel,
    demo: &DemographicConfig,
    seed: u64,
) -> Result<Population, PopulationError> {
    if let Some((field, message)) = demo.problems().into_iter().next() {
        return Err(PopulationError::Config {
            field: field.to_string(),
            message,
        });
    }
    let housing: Vec<(SlId, Point)> = city
        .sublocations_of_class(SlClass::Housing)
        .map(|s| (s.id, s.center))
        .collect();
    if housing.is_empty() {
        return Err(PopulationError::Assignment {
            what: "households".into(),
            reason: "the city has no Housing sublocation".into(),
        });
    }

    let mut rng = stream(seed, Stream::Population);
    let age_dist = weighted(&demo.age_bins, |b| b.weight)?;
    let size_dist = weighted(&demo.household_sizes, |h| h.weight)?;
    let commute_dist = weighted(&demo.commute_distance, |b| b.weight)?;

    let mut persons = Vec::with_capacity(demo.population_size);
    let mut households = Vec::new();
    while persons.len() < demo.population_size {
        let size = demo.household_sizes[size_dist.sample(&mut rng)].size as usize;
        let size = size.min(demo.population_size - persons.len());
        let (sl, _) = housing[households.len() % housing.len()];
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let bin = demo.age_bins[age_dist.sample(&mut rng)];
            let age = rng.random_range(bin.min..bin.max);
            let gender = if rng.random_bool(demo.male_fraction) {
                Gender::Male
            } else {
                Gender::Female
            };
            let college = (18..25).contains(&age) && rng.random_bool(demo.college_fraction);
            let immune = demo.immune_fraction > 0.0 && rng.random_bool(demo.immune_fraction);
            let id = PersonId(persons.len() as u32);
            persons.push(Person {
                id,
                age,
                gender,
                class: classify(age, college),
                susceptibility: demo.susceptibility,
                immune,
                disease: DiseaseState::default(),
                housing: sl,
                office: None,
            });
            members.push(id);
        }
        households.push(Household {
            housing: sl,
            members,
        });
    }

    let school = Candidates::new(city, |c, r| {
        c == SlClass::Classroom && matches!(r, RegionType::School | RegionType::Housing)
    });
    let college = Candidates::new(city, |c, r| c == SlClass::Classroom && r == RegionType::University);
    let any_classroom = Candidates::new(city, |c, _| c == SlClass::Classroom);
    let office = Candidates::new(city, |c, _| c == SlClass::Office);
    let recreational = Candidates::new(city, |c, _| c == SlClass::Recreational);
    let patient_room = Candidates::new(city, |c, _| c == SlClass::PatientRoom);
    let mix = demo.workplace_mix;
    let job_dist = WeightedIndex::new([mix.office, mix.recreational, mix.patient_room])
        .expect("validated workplace mix");

    let missing = |what: &str| PopulationError::Assignment {
        what: what.to_string(),
        reason: "the city has no suitable sublocation".into(),
    };

    for person in &mut persons {
        if !person.class.has_workplace() {
            continue;
        }
        let pool = match person.class {
            PersonClass::SchoolChild => {
                if !school.is_empty() {
                    &school
                } else if !any_classroom.is_empty() {
                    &any_classroom
                } else {
                    return Err(missing("a classroom for a school child"));
                }
            }
            PersonClass::CollegeStudent => {
                if !college.is_empty() {
                    &college
                } else if !any_classroom.is_empty() {
                    &any_classroom
                } else {
                    return Err(missing("a classroom for a college student"));
                }
            }
            _ => {
                let preferred = [&office, &recreational, &patient_room][job_dist.sample(&mut rng)];
                [preferred, &office, &recreational, &patient_room]
                    .into_iter()
                    .find(|c| !c.is_empty())
                    .ok_or_else(|| missing("a workplace for an adult"))?
            }
        };
        let bin = demo.commute_distance[commute_dist.sample(&mut rng)];
        let d = if bin.max_m > bin.min_m {
            rng.random_range(bin.min_m..=bin.max_m)
        } else {
            bin.min_m
        };
        let home = city
            .sublocation(person.housing)
            .map(|s| s.center)
            .unwrap_or_default();
        person.office = pool.pick(&home, d, &mut rng);
    }

    Ok(Population {
        persons,
        households,
    })
}

/// Every person-level invariant breach, one message each.
pub fn check_population(city: &CityModel, pop: &Population) -> Vec<String> {
    let mut out = Vec::new();
    for p in &pop.persons {
        let college = p.class == PersonClass::CollegeStudent;
        if classify(p.age, college) != p.class {
            out.push(format!("person {}: class {} inconsistent with age {}", p.id, p.class, p.age));
        }
        if city.sublocation(p.housing).map(|s| s.class) != Some(SlClass::Housing) {
            out.push(format!("person {}: housing {} is not a Housing sublocation", p.id, p.housing));
        }
        match (p.class.has_workplace(), p.office) {
            (false, Some(o)) => out.push(format!("person {}: {} must not have office {o}", p.id, p.class)),
            (true, None) => out.push(format!("person {}: {} lacks an office", p.id, p.class)),
            (true, Some(o)) => {
                let class = city.sublocation(o).map(|s| s.class);
                let ok = match p.class {
                    PersonClass::SchoolChild | PersonClass::CollegeStudent => {
                        class == Some(SlClass::Classroom)
                    }
                    _ => matches!(
                        class,
                        Some(SlClass::Office | SlClass::Recreational | SlClass::PatientRoom)
                    ),
                };
                if !ok {
                    out.push(format!("person {}: office {o} has class {class:?}", p.id));
                }
            }
            (false, None) => {}
        }
    }
    for h in &pop.households {
        if h.members.is_empty() {
            out.push(format!("household at {} is empty", h.housing));
        }
        for m in &h.members {
            if pop.persons.get(m.0 as usize).map(|p| p.housing) != Some(h.housing) {
                out.push(format!("household at {}: member {m} lives elsewhere", h.housing));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::city::{Exposure, Region, RegionId, Sublocation};
    use crate::geometry::Polygon;

    fn one_room_city() -> CityModel {
        CityModel::new(
            vec![Region {
                id: RegionId(1),
                region_type: RegionType::Housing,
                boundary: Polygon::rectangle(Point::new(0.0, 0.0), Point::new(100.0, 100.0)),
            }],
            vec![
                Sublocation {
                    id: SlId(1),
                    class: SlClass::Housing,
                    region: RegionId(1),
                    center: Point::new(10.0, 10.0),
                    radius: 5.0,
                    exposure: Exposure::Indoor,
                },
                Sublocation {
                    id: SlId(2),
                    class: SlClass::Office,
                    region: RegionId(1),
                    center: Point::new(60.0, 60.0),
                    radius: 5.0,
                    exposure: Exposure::Indoor,
                },
            ],
        )
    }

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify(1, false), PersonClass::Toddler);
        assert_eq!(classify(3, false), PersonClass::SchoolChild);
        assert_eq!(classify(17, true), PersonClass::SchoolChild);
        assert_eq!(classify(18, false), PersonClass::Adult);
        assert_eq!(classify(20, true), PersonClass::CollegeStudent);
        assert_eq!(classify(25, true), PersonClass::Adult);
        assert_eq!(classify(59, false), PersonClass::Adult);
        assert_eq!(classify(60, false), PersonClass::Elder);
    }

    #[test]
    fn forced_assignment_for_single_adult() {
        let mut demo = DemographicConfig::toy(1);
        demo.age_bins = vec![AgeBin { min: 30, max: 31, weight: 1.0 }];
        let pop = synthesize_population(&one_room_city(), &demo, 1).unwrap();
        assert_eq!(pop.persons.len(), 1);
        let p = &pop.persons[0];
        assert_eq!(p.class, PersonClass::Adult);
        assert_eq!(p.housing, SlId(1));
        assert_eq!(p.office, Some(SlId(2)));
        assert!(check_population(&one_room_city(), &pop).is_empty());
    }

    #[test]
    fn toddler_has_no_office() {
        let mut demo = DemographicConfig::toy(1);
        demo.age_bins = vec![AgeBin { min: 2, max: 3, weight: 1.0 }];
        let pop = synthesize_population(&one_room_city(), &demo, 1).unwrap();
        assert_eq!(pop.persons[0].class, PersonClass::Toddler);
        assert_eq!(pop.persons[0].office, None);
    }

    #[test]
    fn missing_distribution_is_a_config_error() {
        let mut demo = DemographicConfig::toy(10);
        demo.commute_distance.clear();
        assert!(matches!(
            synthesize_population(&one_room_city(), &demo, 1),
            Err(PopulationError::Config { field, .. }) if field == "commute_distance"
        ));
    }

    #[test]
    fn no_classroom_is_an_assignment_error() {
        let mut demo = DemographicConfig::toy(1);
        demo.age_bins = vec![AgeBin { min: 10, max: 11, weight: 1.0 }];
        assert!(matches!(
            synthesize_population(&one_room_city(), &demo, 1),
            Err(PopulationError::Assignment { .. })
        ));
    }

    #[test]
    fn expected_shares_sum_to_one() {
        let shares = DemographicConfig::toy(1).expected_class_shares();
        assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((shares[PersonClass::Toddler.index()] - 0.04).abs() < 1e-12);
        assert!((shares[PersonClass::CollegeStudent.index()] - 0.036).abs() < 1e-12);
    }
}
