//! Contact detection, Poisson infection trials and disease progression.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::city::{Exposure, SlClass};
use crate::geometry::Point;
use crate::population::PersonId;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfectionStatus {
    Susceptible,
    Incubating,
    Symptomatic,
    Recovered,
    Dead,
    VaccinatedPending,
    Immunized,
}

impl InfectionStatus {
    pub const ALL: [InfectionStatus; 7] = [
        InfectionStatus::Susceptible,
        InfectionStatus::Incubating,
        InfectionStatus::Symptomatic,
        InfectionStatus::Recovered,
        InfectionStatus::Dead,
        InfectionStatus::VaccinatedPending,
        InfectionStatus::Immunized,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InfectionStatus::Susceptible => "susceptible",
            InfectionStatus::Incubating => "incubating",
            InfectionStatus::Symptomatic => "symptomatic",
            InfectionStatus::Recovered => "recovered",
            InfectionStatus::Dead => "dead",
            InfectionStatus::VaccinatedPending => "vaccinated_pending",
            InfectionStatus::Immunized => "immunized",
        }
    }

    /// Can acquire infection. Vaccinated persons stay exposed until their
    /// immunity sets in.
    pub fn is_infectable(self) -> bool {
        matches!(
            self,
            InfectionStatus::Susceptible | InfectionStatus::VaccinatedPending
        )
    }

    pub fn is_infectious(self) -> bool {
        self == InfectionStatus::Symptomatic
    }

    /// Ever infected (currently or in the past).
    pub fn was_infected(self) -> bool {
        matches!(
            self,
            InfectionStatus::Incubating
                | InfectionStatus::Symptomatic
                | InfectionStatus::Recovered
                | InfectionStatus::Dead
        )
    }

    /// Edges of the progression graph.
    pub fn can_transition_to(self, to: InfectionStatus) -> bool {
        use InfectionStatus::*;
        matches!(
            (self, to),
            (Susceptible, Incubating)
                | (Susceptible, Symptomatic) // index cases only
                | (Incubating, Symptomatic)
                | (Symptomatic, Recovered)
                | (Symptomatic, Dead)
                | (Susceptible, VaccinatedPending)
                | (VaccinatedPending, Immunized)
                | (VaccinatedPending, Incubating)
        )
    }
}

impl fmt::Display for InfectionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive range of days; durations are drawn uniformly inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayRange {
    pub min: f64,
    pub max: f64,
}

impl DayRange {
    pub const fn new(min: f64, max: f64) -> Self {
        DayRange { min, max }
    }

    pub fn is_valid(&self) -> bool {
        self.min > 0.0 && self.min <= self.max && self.max.is_finite()
    }

    pub fn sample_seconds<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let days = if self.max > self.min {
            rng.random_range(self.min..=self.max)
        } else {
            self.min
        };
        days * SECONDS_PER_DAY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicParams {
    /// Transmission events per hour of close contact between a fully
    /// infectious and a fully susceptible person.
    pub sigma_per_hour: f64,
    /// Pairwise distance at or below which two occupants are in contact.
    #[serde(default = "default_contact_distance")]
    pub contact_distance_m: f64,
    /// Multiplier on sigma in outdoor sublocations.
    #[serde(default = "default_outdoor_factor")]
    pub outdoor_factor: f64,
    #[serde(default = "default_incubation")]
    pub incubation_days: DayRange,
    #[serde(default = "default_symptomatic")]
    pub symptomatic_days: DayRange,
    #[serde(default = "default_vaccination")]
    pub vaccination_days: DayRange,
    /// Probability of death at the end of the symptomatic stage.
    #[serde(default)]
    pub mortality: f64,
}

fn default_contact_distance() -> f64 {
    2.0
}
fn default_outdoor_factor() -> f64 {
    0.5
}
fn default_incubation() -> DayRange {
    DayRange::new(1.0, 2.0)
}
fn default_symptomatic() -> DayRange {
    DayRange::new(1.0, 7.0)
}
fn default_vaccination() -> DayRange {
    DayRange::new(7.0, 21.0)
}

impl EpidemicParams {
    /// Influenza-like stage durations with the given transmissibility.
    pub fn with_sigma(sigma_per_hour: f64) -> Self {
        EpidemicParams {
            sigma_per_hour,
            contact_distance_m: default_contact_distance(),
            outdoor_factor: default_outdoor_factor(),
            incubation_days: default_incubation(),
            symptomatic_days: default_symptomatic(),
            vaccination_days: default_vaccination(),
            mortality: 0.0,
        }
    }

    /// Field-level problems, as (field, message) pairs.
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.sigma_per_hour >= 0.0) || !self.sigma_per_hour.is_finite() {
            out.push(("sigma_per_hour", format!("must be >= 0, got {}", self.sigma_per_hour)));
        }
        if !(self.contact_distance_m > 0.0) {
            out.push((
                "contact_distance_m",
                format!("must be > 0, got {}", self.contact_distance_m),
            ));
        }
        if !(self.outdoor_factor > 0.0 && self.outdoor_factor <= 1.0) {
            out.push(("outdoor_factor", format!("must be in (0, 1], got {}", self.outdoor_factor)));
        }
        for (name, r) in [
            ("incubation_days", self.incubation_days),
            ("symptomatic_days", self.symptomatic_days),
            ("vaccination_days", self.vaccination_days),
        ] {
            if !r.is_valid() {
                out.push((name, format!("needs 0 < min <= max, got [{}, {}]", r.min, r.max)));
            }
        }
        if !(0.0..=1.0).contains(&self.mortality) {
            out.push(("mortality", format!("must be in [0, 1], got {}", self.mortality)));
        }
        out
    }

    /// Effective rate for a space with the given exposure.
    pub fn sigma_for(&self, exposure: Exposure) -> f64 {
        match exposure {
            Exposure::Indoor => self.sigma_per_hour,
            Exposure::Outdoor => self.sigma_per_hour * self.outdoor_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EpidemicError {
    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("contact time must be non-negative, got {0}")]
    NegativeTime(f64),
}

/// Probability of at least one transmission event during `contact_s`
/// seconds of contact at `sigma_per_hour` events per hour.
pub fn infection_probability(sigma_per_hour: f64, contact_s: f64) -> Result<f64, EpidemicError> {
    if !(sigma_per_hour >= 0.0) {
        return Err(EpidemicError::NegativeRate(sigma_per_hour));
    }
    if !(contact_s >= 0.0) {
        return Err(EpidemicError::NegativeTime(contact_s));
    }
    Ok(-(-sigma_per_hour * contact_s / 3600.0).exp_m1())
}

/// Current stage plus the time at which it ends, if it ends on its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiseaseState {
    pub status: InfectionStatus,
    pub since: f64,
    pub until: Option<f64>,
}

impl Default for DiseaseState {
    fn default() -> Self {
        DiseaseState {
            status: InfectionStatus::Susceptible,
            since: 0.0,
            until: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub time: f64,
    pub from: InfectionStatus,
    pub to: InfectionStatus,
}

impl DiseaseState {
    fn enter(&mut self, to: InfectionStatus, at: f64, until: Option<f64>) -> Transition {
        let t = Transition {
            time: at,
            from: self.status,
            to,
        };
        self.status = to;
        self.since = at;
        self.until = until;
        t
    }

    /// Start incubation at `now`. No-op unless currently infectable.
    pub fn infect<R: Rng + ?Sized>(
        &mut self,
        now: f64,
        rng: &mut R,
        params: &EpidemicParams,
    ) -> Option<Transition> {
        if !self.status.is_infectable() {
            return None;
        }
        let d = params.incubation_days.sample_seconds(rng);
        Some(self.enter(InfectionStatus::Incubating, now, Some(now + d)))
    }

    /// Make an index case: symptomatic immediately, skipping incubation.
    pub fn seed_symptomatic<R: Rng + ?Sized>(
        &mut self,
        now: f64,
        rng: &mut R,
        params: &EpidemicParams,
    ) -> Option<Transition> {
        if self.status != InfectionStatus::Susceptible {
            return None;
        }
        let d = params.symptomatic_days.sample_seconds(rng);
        Some(self.enter(InfectionStatus::Symptomatic, now, Some(now + d)))
    }

    pub fn vaccinate<R: Rng + ?Sized>(
        &mut self,
        now: f64,
        rng: &mut R,
        params: &EpidemicParams,
    ) -> Option<Transition> {
        if self.status != InfectionStatus::Susceptible {
            return None;
        }
        let d = params.vaccination_days.sample_seconds(rng);
        Some(self.enter(InfectionStatus::VaccinatedPending, now, Some(now + d)))
    }
}

/// Advance a person's stage up to `now`. Each stage starts exactly when the
/// previous one was scheduled to end, so durations do not depend on the
/// tick length. Returns the transitions taken, in order.
pub fn progress_disease<R: Rng + ?Sized>(
    state: &mut DiseaseState,
    now: f64,
    rng: &mut R,
    params: &EpidemicParams,
) -> Vec<Transition> {
    let mut out = Vec::new();
    while let Some(end) = state.until {
        if end > now {
            break;
        }
        let t = match state.status {
            InfectionStatus::Incubating => {
                let d = params.symptomatic_days.sample_seconds(rng);
                state.enter(InfectionStatus::Symptomatic, end, Some(end + d))
            }
            InfectionStatus::Symptomatic => {
                let dies = params.mortality > 0.0 && rng.random_bool(params.mortality);
                let to = if dies {
                    InfectionStatus::Dead
                } else {
                    InfectionStatus::Recovered
                };
                state.enter(to, end, None)
            }
            InfectionStatus::VaccinatedPending => {
                state.enter(InfectionStatus::Immunized, end, None)
            }
            _ => {
                state.until = None;
                break;
            }
        };
        out.push(t);
    }
    out
}

/// Where an infection happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceKind {
    Housing,
    Office,
    Classroom,
    PatientRoom,
    Recreational,
    Vehicle,
}

impl PlaceKind {
    pub const ALL: [PlaceKind; 6] = [
        PlaceKind::Housing,
        PlaceKind::Office,
        PlaceKind::Classroom,
        PlaceKind::PatientRoom,
        PlaceKind::Recreational,
        PlaceKind::Vehicle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlaceKind::Housing => "housing",
            PlaceKind::Office => "office",
            PlaceKind::Classroom => "classroom",
            PlaceKind::PatientRoom => "patient_room",
            PlaceKind::Recreational => "recreational",
            PlaceKind::Vehicle => "vehicle",
        }
    }
}

impl From<SlClass> for PlaceKind {
    fn from(c: SlClass) -> Self {
        match c {
            SlClass::Housing => PlaceKind::Housing,
            SlClass::Office => PlaceKind::Office,
            SlClass::Classroom => PlaceKind::Classroom,
            SlClass::PatientRoom => PlaceKind::PatientRoom,
            SlClass::Recreational => PlaceKind::Recreational,
        }
    }
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub kind: PlaceKind,
    pub id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfectionEvent {
    pub time: f64,
    pub place: Place,
    pub infector: PersonId,
    pub infectee: PersonId,
}

/// Geometry of a shared space for contact purposes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactSpace {
    /// A disc inside which occupants wander.
    Disc { radius: f64, exposure: Exposure },
    /// Everybody aboard is in contact with everybody else.
    Vehicle,
}

impl ContactSpace {
    fn sigma(&self, params: &EpidemicParams) -> f64 {
        match self {
            ContactSpace::Disc { exposure, .. } => params.sigma_for(*exposure),
            ContactSpace::Vehicle => params.sigma_per_hour,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupant {
    pub person: PersonId,
    pub status: InfectionStatus,
    /// Multiplier in [0, 1] on the per-step infection probability.
    pub susceptibility: f64,
    /// Permanently protected regardless of status.
    pub immune: bool,
}

impl Occupant {
    fn infectable(&self) -> bool {
        self.status.is_infectable() && !self.immune && self.susceptibility > 0.0
    }
}

/// Close-contact time per (infectious, susceptible) pair for the current
/// occupancy episode of one space.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContactAccumulator {
    times: BTreeMap<(PersonId, PersonId), f64>,
}

impl ContactAccumulator {
    pub fn get(&self, infector: PersonId, infectee: PersonId) -> f64 {
        self.times.get(&(infector, infectee)).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// End the episode of every pair in which either party is no longer an
    /// (infectious, infectable) occupant.
    pub fn retain_present(&mut self, occupants: &[Occupant]) {
        if self.times.is_empty() {
            return;
        }
        let present = |id: PersonId, want_infectious: bool| {
            occupants.iter().any(|o| {
                o.person == id
                    && if want_infectious {
                        o.status.is_infectious()
                    } else {
                        o.infectable()
                    }
            })
        };
        self.times.retain(|&(i, j), _| present(i, true) && present(j, false));
    }
}

/// Uniform point in a disc of the given radius around the origin.
pub fn sample_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// One contact step of length `dt_s` inside a single space.
///
/// Positions of infectious and infectable occupants are re-drawn uniformly
/// in the space; every (symptomatic, infectable) pair within the contact
/// distance accumulates `dt_s` and runs one Bernoulli trial with probability
/// `susceptibility * (1 - exp(-sigma * dt))`. Returns (infector, infectee)
/// pairs in trial order. A person is infected at most once per step.
pub fn step_contacts<R: Rng + ?Sized>(
    space: &ContactSpace,
    occupants: &[Occupant],
    acc: &mut ContactAccumulator,
    dt_s: f64,
    params: &EpidemicParams,
    rng: &mut R,
) -> Vec<(PersonId, PersonId)> {
    acc.retain_present(occupants);
    let infectious: Vec<usize> = (0..occupants.len())
        .filter(|&k| occupants[k].status.is_infectious())
        .collect();
    if infectious.is_empty() {
        return Vec::new();
    }
    let targets: Vec<usize> = (0..occupants.len())
        .filter(|&k| occupants[k].infectable())
        .collect();
    if targets.is_empty() {
        return Vec::new();
    }

    let positions: Vec<Point> = match space {
        ContactSpace::Disc { radius, .. } => (0..occupants.len())
            .map(|k| {
                if occupants[k].status.is_infectious() || occupants[k].infectable() {
                    sample_in_disc(*radius, rng)
                } else {
                    Point::default()
                }
            })
            .collect(),
        ContactSpace::Vehicle => vec![Point::default(); occupants.len()],
    };

    let step_p = infection_probability(space.sigma(params), dt_s).unwrap_or(0.0);
    let d_star_sq = params.contact_distance_m * params.contact_distance_m;
    let mut out = Vec::new();
    for &j in &targets {
        let target = &occupants[j];
        let mut infected = false;
        for &i in &infectious {
            if positions[i].distance_sq(&positions[j]) > d_star_sq {
                continue;
            }
            let source = occupants[i].person;
            *acc.times.entry((source, target.person)).or_insert(0.0) += dt_s;
            if infected || step_p == 0.0 {
                continue;
            }
            let p = (step_p * target.susceptibility).clamp(0.0, 1.0);
            if rng.random_bool(p) {
                infected = true;
                out.push((source, target.person));
            }
        }
    }
    out
}
