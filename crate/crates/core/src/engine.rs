//! Fixed-step simulation: agents follow their agendas, ride vehicles, meet
//! in sublocations and vehicles, and progress through the disease.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::index;

use crate::agenda::{
    expand_agenda, sample_pattern, AgendaConfig, AgendaContext, AgendaError, AgendaItem,
    DailyAgenda,
};
use crate::city::{RegionId, SlId};
use crate::epidemic::{
    progress_disease, step_contacts, ContactAccumulator, ContactSpace, EpidemicParams,
    InfectionStatus, Occupant, Place, PlaceKind, Transition, SECONDS_PER_DAY,
};
use crate::geometry::Point;
use crate::population::{Person, PersonId, Population};
use crate::rng::{stream, substream, SimRng, Stream};
use crate::transit::TransitSearch;
use crate::travel::{CityPlanner, Journey, ModeSpeeds, Stage, TravelPlanner};
use crate::world::World;

pub const DEFAULT_DT_S: f64 = 60.0;

/// Who starts out infected.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    Count(usize),
    Persons(Vec<PersonId>),
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Count(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt_s: f64,
    pub days: u32,
    pub seed: u64,
    pub epidemic: EpidemicParams,
    pub agenda: AgendaConfig,
    pub speeds: ModeSpeeds,
    pub transit_search: TransitSearch,
    pub seeding: SeedSpec,
    /// Susceptible people vaccinated at the start.
    pub vaccinated: usize,
    /// Interval between stored tick reports, seconds.
    pub report_every_s: f64,
    /// Interval between agent snapshots; none when unset.
    pub snapshot_every_s: Option<f64>,
}

impl SimConfig {
    pub fn new(epidemic: EpidemicParams, days: u32, seed: u64) -> Self {
        SimConfig {
            dt_s: DEFAULT_DT_S,
            days,
            seed,
            epidemic,
            agenda: AgendaConfig::default(),
            speeds: ModeSpeeds::default(),
            transit_search: TransitSearch::default(),
            seeding: SeedSpec::default(),
            vaccinated: 0,
            report_every_s: 3600.0,
            snapshot_every_s: None,
        }
    }

    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.dt_s > 0.0 && self.dt_s <= 3600.0) {
            out.push(("dt_s", format!("must be in (0, 3600], got {}", self.dt_s)));
        }
        if self.days == 0 {
            out.push(("days", "must be at least 1".to_string()));
        }
        if !(self.report_every_s >= self.dt_s) {
            out.push(("output.report_every_s", "must be at least one tick".to_string()));
        }
        if let Some(s) = self.snapshot_every_s {
            if !(s >= self.dt_s) {
                out.push(("output.snapshot_every_s", "must be at least one tick".to_string()));
            }
        }
        out.extend(self.epidemic.problems());
        out.extend(self.agenda.problems());
        out.extend(self.speeds.problems());
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("cannot seed {requested} infections: only {available} susceptible people")]
    InsufficientSusceptibles { requested: usize, available: usize },
    #[error("person {0} does not exist")]
    UnknownPerson(PersonId),
    #[error(transparent)]
    Agenda(#[from] AgendaError),
}

/// Progress along a journey.
#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub journey: Arc<Journey>,
    pub dest: SlId,
    pub stage: usize,
    /// Meters covered in the current movement stage.
    pub progress_m: f64,
    /// Vehicle awaited or ridden in the current ride stage.
    pub vehicle: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kinematic {
    AtSublocation(SlId),
    /// Moving under own power or waiting at a stop.
    Traveling(Trip),
    Riding(Trip),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub kinematic: Kinematic,
    pub agenda: DailyAgenda,
    /// Index of the current agenda item.
    pub cursor: usize,
    /// Last sublocation visited.
    pub last_sl: SlId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Seed,
    Vaccination,
    Infection,
    Progression,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Seed => "seed",
            EventKind::Vaccination => "vaccination",
            EventKind::Infection => "infection",
            EventKind::Progression => "progression",
        }
    }
}

/// A change of someone's infection status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEvent {
    pub time: f64,
    pub kind: EventKind,
    pub person: PersonId,
    pub from: InfectionStatus,
    pub to: InfectionStatus,
    pub place: Option<Place>,
    pub infector: Option<PersonId>,
}

/// People per infection status, indexed by [`InfectionStatus::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatusCounts(pub [u64; 7]);

impl StatusCounts {
    pub fn get(&self, s: InfectionStatus) -> u64 {
        self.0[s.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    fn add(&mut self, s: InfectionStatus) {
        self.0[s.index()] += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickReport {
    pub time: f64,
    pub citywide: StatusCounts,
    pub regions: BTreeMap<RegionId, StatusCounts>,
    /// Transmissions so far by kind of place, indexed by [`PlaceKind::index`].
    pub infections_by_place: [u64; 6],
}

impl TickReport {
    pub fn cumulative_infections(&self) -> u64 {
        self.infections_by_place.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSnapshot {
    pub person: PersonId,
    pub position: Point,
    pub status: InfectionStatus,
    pub traveling: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub agents: Vec<AgentSnapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub days: u32,
    pub seed: u64,
    pub population: usize,
    pub seeded: usize,
    pub infections: u64,
    pub attack_rate: f64,
    pub peak_symptomatic: u64,
    pub peak_time: f64,
    pub infections_by_place: [u64; 6],
    pub final_counts: StatusCounts,
    pub transit_fallbacks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub reports: Vec<TickReport>,
    pub events: Vec<LogEvent>,
    pub snapshots: Vec<Snapshot>,
}

/// A vehicle on the road with the people on board.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleView {
    pub line: usize,
    pub vehicle: u64,
    pub position: Point,
    pub onboard: Vec<PersonId>,
}

pub struct Simulation<'w> {
    world: &'w World,
    cfg: SimConfig,
    planner: CityPlanner<'w>,
    persons: Vec<Person>,
    agents: Vec<Agent>,
    clock: f64,
    tick: u64,
    day: u32,
    epidemic_rng: SimRng,
    events: Vec<LogEvent>,
    infections_by_place: [u64; 6],
    reports: Vec<TickReport>,
    snapshots: Vec<Snapshot>,
    seeded: usize,
    peak: (u64, f64),
}

fn status_of(p: &Person) -> InfectionStatus {
    p.disease.status
}

impl<'w> Simulation<'w> {
    /// Set up agents, seed infections and vaccinations, and plan day 0.
    pub fn new(world: &'w World, population: Population, cfg: SimConfig) -> Result<Self, SimError> {
        if let Some((field, msg)) = cfg.problems().into_iter().next() {
            return Err(SimError::Config(format!("{field}: {msg}")));
        }
        let planner = CityPlanner::new(world, cfg.transit_search.clone(), cfg.speeds);
        let agents = population
            .persons
            .iter()
            .map(|p| Agent {
                kinematic: Kinematic::AtSublocation(p.housing),
                agenda: DailyAgenda {
                    owner: p.id,
                    mode: crate::travel::TravelMode::Walk,
                    items: Vec::new(),
                },
                cursor: 0,
                last_sl: p.housing,
            })
            .collect();
        let mut sim = Simulation {
            world,
            epidemic_rng: stream(cfg.seed, Stream::Epidemic),
            cfg,
            planner,
            persons: population.persons,
            agents,
            clock: 0.0,
            tick: 0,
            day: 0,
            events: Vec::new(),
            infections_by_place: [0; 6],
            reports: Vec::new(),
            snapshots: Vec::new(),
            seeded: 0,
            peak: (0, 0.0),
        };
        let spec = sim.cfg.seeding.clone();
        let mut rng = stream(sim.cfg.seed, Stream::Seeding);
        sim.seed_infections(&spec, &mut rng)?;
        let n = sim.cfg.vaccinated;
        sim.vaccinate(n, &mut rng)?;
        sim.begin_day()?;
        sim.record(true);
        Ok(sim)
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn persons(&self) -> &[Person] {
        &self.persons
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn reports(&self) -> &[TickReport] {
        &self.reports
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn horizon(&self) -> f64 {
        f64::from(self.cfg.days) * SECONDS_PER_DAY
    }

    pub fn is_finished(&self) -> bool {
        self.clock >= self.horizon() - 1e-9
    }

    fn susceptible_ids(&self) -> Vec<usize> {
        (0..self.persons.len())
            .filter(|&i| status_of(&self.persons[i]) == InfectionStatus::Susceptible && !self.persons[i].immune)
            .collect()
    }

    /// Make the chosen people symptomatic at the current time.
    pub fn seed_infections(&mut self, spec: &SeedSpec, rng: &mut SimRng) -> Result<(), SimError> {
        let chosen: Vec<usize> = match spec {
            SeedSpec::Count(0) => return Ok(()),
            SeedSpec::Count(n) => {
                let pool = self.susceptible_ids();
                if *n > pool.len() {
                    return Err(SimError::InsufficientSusceptibles {
                        requested: *n,
                        available: pool.len(),
                    });
                }
                let mut picked: Vec<usize> = index::sample(rng, pool.len(), *n)
                    .into_iter()
                    .map(|k| pool[k])
                    .collect();
                picked.sort_unstable();
                picked
            }
            SeedSpec::Persons(ids) => {
                let mut idx = Vec::with_capacity(ids.len());
                for id in ids {
                    let i = id.0 as usize;
                    if i >= self.persons.len() {
                        return Err(SimError::UnknownPerson(*id));
                    }
                    idx.push(i);
                }
                idx.sort_unstable();
                idx.dedup();
                let available = idx
                    .iter()
                    .filter(|&&i| status_of(&self.persons[i]) == InfectionStatus::Susceptible)
                    .count();
                if available < idx.len() {
                    return Err(SimError::InsufficientSusceptibles {
                        requested: idx.len(),
                        available,
                    });
                }
                idx
            }
        };
        let now = self.clock;
        for i in chosen {
            let p = &mut self.persons[i];
            if let Some(t) = p.disease.seed_symptomatic(now, rng, &self.cfg.epidemic) {
                self.events.push(event(EventKind::Seed, p.id, t, None, None));
                self.seeded += 1;
            }
        }
        Ok(())
    }

    fn vaccinate(&mut self, n: usize, rng: &mut SimRng) -> Result<(), SimError> {
        if n == 0 {
            return Ok(());
        }
        let pool = self.susceptible_ids();
        if n > pool.len() {
            return Err(SimError::InsufficientSusceptibles {
                requested: n,
                available: pool.len(),
            });
        }
        let mut picked: Vec<usize> = index::sample(rng, pool.len(), n)
            .into_iter()
            .map(|k| pool[k])
            .collect();
        picked.sort_unstable();
        let now = self.clock;
        for i in picked {
            let p = &mut self.persons[i];
            if let Some(t) = p.disease.vaccinate(now, rng, &self.cfg.epidemic) {
                self.events.push(event(EventKind::Vaccination, p.id, t, None, None));
            }
        }
        Ok(())
    }

    fn day_start(&self) -> f64 {
        f64::from(self.day) * SECONDS_PER_DAY
    }

    /// New agendas for everyone, under the alert level reached so far.
    fn begin_day(&mut self) -> Result<(), SimError> {
        let alive = self
            .persons
            .iter()
            .filter(|p| status_of(p) != InfectionStatus::Dead)
            .count()
            .max(1);
        let symptomatic = self
            .persons
            .iter()
            .filter(|p| status_of(p) == InfectionStatus::Symptomatic)
            .count();
        let policy = &self.cfg.agenda.policy;
        let alert = policy.alert_level(symptomatic as f64 / alive as f64);
        let ctx = AgendaContext::new(&self.cfg.agenda, &self.world.city);
        for (person, agent) in self.persons.iter().zip(self.agents.iter_mut()) {
            let mut rng = substream(self.cfg.seed, Stream::Agenda, &[u64::from(person.id.0), u64::from(self.day)]);
            let pattern = sample_pattern(person.class, &self.cfg.agenda, &mut rng);
            let factors = policy.factors(alert, status_of(person));
            agent.agenda = expand_agenda(person, &pattern, &factors, &ctx, &mut self.planner, &mut rng)?;
            agent.cursor = 0;
        }
        Ok(())
    }

    fn progress(&mut self, now: f64) {
        for p in &mut self.persons {
            if p.disease.until.is_some_and(|u| u <= now) {
                for t in progress_disease(&mut p.disease, now, &mut self.epidemic_rng, &self.cfg.epidemic) {
                    self.events.push(event(EventKind::Progression, p.id, t, None, None));
                }
            }
        }
    }

    /// Advance one tick.
    pub fn step(&mut self) -> Result<(), SimError> {
        let t0 = self.clock;
        let t1 = t0 + self.cfg.dt_s;
        let next_day = f64::from(self.day + 1) * SECONDS_PER_DAY;
        if t0 >= next_day - 1e-9 {
            self.day += 1;
            self.begin_day()?;
        }
        self.progress(t0);
        for i in 0..self.agents.len() {
            if status_of(&self.persons[i]) != InfectionStatus::Dead {
                self.move_agent(i, t0, t1);
            }
        }
        self.contacts(t1);
        self.clock = t1;
        self.tick += 1;
        self.record(false);
        Ok(())
    }

    fn record(&mut self, force: bool) {
        let symptomatic = self
            .persons
            .iter()
            .filter(|p| status_of(p) == InfectionStatus::Symptomatic)
            .count() as u64;
        if symptomatic > self.peak.0 {
            self.peak = (symptomatic, self.clock);
        }
        let every = (self.cfg.report_every_s / self.cfg.dt_s).round().max(1.0) as u64;
        if force || self.tick.is_multiple_of(every) {
            let r = self.collect_statistics();
            self.reports.push(r);
        }
        if let Some(s) = self.cfg.snapshot_every_s {
            let every = (s / self.cfg.dt_s).round().max(1.0) as u64;
            if force || self.tick.is_multiple_of(every) {
                let snap = self.snapshot();
                self.snapshots.push(snap);
            }
        }
    }

    /// Run until the horizon and hand back all outputs.
    pub fn run_to_end(mut self) -> Result<RunOutput, SimError> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.finish())
    }

    pub fn finish(mut self) -> RunOutput {
        let last = self.collect_statistics();
        if self.reports.last().map(|r| r.time) != Some(last.time) {
            self.reports.push(last.clone());
        }
        let n = self.persons.len();
        let ever = self
            .persons
            .iter()
            .filter(|p| status_of(p).was_infected())
            .count();
        let summary = RunSummary {
            days: self.cfg.days,
            seed: self.cfg.seed,
            population: n,
            seeded: self.seeded,
            infections: self.infections_by_place.iter().sum(),
            attack_rate: if n == 0 { 0.0 } else { ever as f64 / n as f64 },
            peak_symptomatic: self.peak.0,
            peak_time: self.peak.1,
            infections_by_place: self.infections_by_place,
            final_counts: last.citywide,
            transit_fallbacks: self.planner.transit_failures(),
        };
        RunOutput {
            summary,
            reports: self.reports,
            events: self.events,
            snapshots: self.snapshots,
        }
    }

    fn move_agent(&mut self, i: usize, t0: f64, t1: f64) {
        let tod = t0 - self.day_start();
        let agent = &mut self.agents[i];
        if let Kinematic::AtSublocation(sl) = agent.kinematic {
            let items = &agent.agenda.items;
            let target = match items.get(agent.cursor) {
                Some(AgendaItem::Activity(a)) => a.sublocation,
                Some(AgendaItem::Travel(l)) => l.to,
                None => sl,
            };
            if sl != target {
                // Out of step with today's plan (a late arrival carried
                // over midnight): head for where the plan says to be.
                let journey = self.planner.plan(agent.agenda.mode, sl, target);
                agent.kinematic = Kinematic::Traveling(new_trip(journey, target));
            } else {
                while let Some(next) = items.get(agent.cursor + 1) {
                    if next.start() > tod {
                        break;
                    }
                    agent.cursor += 1;
                    if let AgendaItem::Travel(leg) = next {
                        agent.kinematic = Kinematic::Traveling(new_trip(Arc::clone(&leg.journey), leg.to));
                        break;
                    }
                }
            }
        }
        let trip = match &mut agent.kinematic {
            Kinematic::AtSublocation(_) => return,
            Kinematic::Traveling(t) | Kinematic::Riding(t) => t,
        };
        match advance(trip, t0, t1, self.world) {
            TripState::Arrived => {
                let dest = trip.dest;
                if let Some(AgendaItem::Travel(l)) = agent.agenda.items.get(agent.cursor) {
                    if l.to == dest {
                        agent.cursor += 1;
                    }
                }
                agent.kinematic = Kinematic::AtSublocation(dest);
                agent.last_sl = dest;
            }
            TripState::Riding => {
                let t = trip.clone();
                agent.kinematic = Kinematic::Riding(t);
            }
            TripState::Moving => {
                let t = trip.clone();
                agent.kinematic = Kinematic::Traveling(t);
            }
        }
    }

    fn contacts(&mut self, now: f64) {
        let mut rooms: BTreeMap<SlId, Vec<usize>> = BTreeMap::new();
        let mut vehicles: BTreeMap<(usize, u64), Vec<usize>> = BTreeMap::new();
        for (i, a) in self.agents.iter().enumerate() {
            match &a.kinematic {
                Kinematic::AtSublocation(sl) => rooms.entry(*sl).or_default().push(i),
                Kinematic::Riding(t) => {
                    if let (Some(Stage::Ride { line, .. }), Some(k)) = (t.journey.stages.get(t.stage), t.vehicle) {
                        vehicles.entry((*line, k)).or_default().push(i);
                    }
                }
                Kinematic::Traveling(_) => {}
            }
        }
        let mut spaces: Vec<(Place, ContactSpace, Vec<usize>)> = Vec::new();
        for (sl, idx) in rooms {
            let Some(s) = self.world.city.sublocation(sl) else { continue };
            let space = ContactSpace::Disc {
                radius: s.radius,
                exposure: s.exposure,
            };
            spaces.push((Place { kind: s.class.into(), id: u64::from(sl.0) }, space, idx));
        }
        for ((line, k), idx) in vehicles {
            spaces.push((vehicle_place(line, k), ContactSpace::Vehicle, idx));
        }
        for (place, space, idx) in spaces {
            let live = |s: InfectionStatus| s.is_infectious();
            if !idx.iter().any(|&i| live(status_of(&self.persons[i]))) {
                continue;
            }
            let occupants: Vec<Occupant> = idx
                .iter()
                .map(|&i| {
                    let p = &self.persons[i];
                    Occupant {
                        person: p.id,
                        status: status_of(p),
                        susceptibility: p.susceptibility,
                        immune: p.immune,
                    }
                })
                .collect();
            let mut acc = ContactAccumulator::default();
            let pairs = step_contacts(&space, &occupants, &mut acc, self.cfg.dt_s, &self.cfg.epidemic, &mut self.epidemic_rng);
            for (infector, infectee) in pairs {
                let p = &mut self.persons[infectee.0 as usize];
                if let Some(t) = p.disease.infect(now, &mut self.epidemic_rng, &self.cfg.epidemic) {
                    self.infections_by_place[place.kind.index()] += 1;
                    self.events.push(event(EventKind::Infection, infectee, t, Some(place), Some(infector)));
                }
            }
        }
    }

    /// Counts by status, citywide and per region. People on the move count
    /// toward the region of the last sublocation they were in.
    pub fn collect_statistics(&self) -> TickReport {
        let mut citywide = StatusCounts::default();
        let mut regions: BTreeMap<RegionId, StatusCounts> = self
            .world
            .city
            .regions()
            .iter()
            .map(|r| (r.id, StatusCounts::default()))
            .collect();
        for (p, a) in self.persons.iter().zip(&self.agents) {
            let s = status_of(p);
            citywide.add(s);
            let sl = match a.kinematic {
                Kinematic::AtSublocation(sl) => sl,
                _ => a.last_sl,
            };
            if let Some(r) = self.world.city.sublocation(sl).map(|x| x.region) {
                regions.entry(r).or_default().add(s);
            }
        }
        TickReport {
            time: self.clock,
            citywide,
            regions,
            infections_by_place: self.infections_by_place,
        }
    }

    pub fn position(&self, i: usize) -> Point {
        let city = &self.world.city;
        let center = |sl: SlId| city.sublocation(sl).map(|s| s.center).unwrap_or_default();
        match &self.agents[i].kinematic {
            Kinematic::AtSublocation(sl) => center(*sl),
            Kinematic::Traveling(t) => match t.journey.stages.get(t.stage) {
                Some(Stage::Move { path, .. }) => path.point_at(t.progress_m).unwrap_or_else(|| center(t.dest)),
                Some(Stage::Ride { line, board_pos, .. }) => self.stop_point(*line, *board_pos),
                None => center(t.dest),
            },
            Kinematic::Riding(t) => match (t.journey.stages.get(t.stage), t.vehicle) {
                (Some(Stage::Ride { line, board_pos, .. }), Some(k)) => self
                    .world
                    .transit
                    .vehicle_position(*line, k, self.clock)
                    .unwrap_or_else(|| self.stop_point(*line, *board_pos)),
                _ => center(t.dest),
            },
        }
    }

    fn stop_point(&self, line: usize, pos: usize) -> Point {
        let transit = &self.world.transit;
        transit.lines()[line]
            .stops
            .get(pos)
            .and_then(|s| transit.stop(*s))
            .map(|s| s.point)
            .unwrap_or_default()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            time: self.clock,
            agents: (0..self.agents.len())
                .map(|i| AgentSnapshot {
                    person: self.persons[i].id,
                    position: self.position(i),
                    status: status_of(&self.persons[i]),
                    traveling: !matches!(self.agents[i].kinematic, Kinematic::AtSublocation(_)),
                })
                .collect(),
        }
    }

    /// Vehicles that currently carry someone.
    pub fn vehicles(&self) -> Vec<VehicleView> {
        let mut map: BTreeMap<(usize, u64), Vec<PersonId>> = BTreeMap::new();
        for (p, a) in self.persons.iter().zip(&self.agents) {
            if let Kinematic::Riding(t) = &a.kinematic {
                if let (Some(Stage::Ride { line, .. }), Some(k)) = (t.journey.stages.get(t.stage), t.vehicle) {
                    map.entry((*line, k)).or_default().push(p.id);
                }
            }
        }
        map.into_iter()
            .map(|((line, vehicle), onboard)| VehicleView {
                line,
                vehicle,
                position: self
                    .world
                    .transit
                    .vehicle_position(line, vehicle, self.clock)
                    .unwrap_or_default(),
                onboard,
            })
            .collect()
    }
}

/// Place identifier of vehicle `k` on directed line `line`.
pub fn vehicle_place(line: usize, k: u64) -> Place {
    Place {
        kind: PlaceKind::Vehicle,
        id: line as u64 * 1_000_000 + k,
    }
}

fn event(kind: EventKind, person: PersonId, t: Transition, place: Option<Place>, infector: Option<PersonId>) -> LogEvent {
    LogEvent {
        time: t.time,
        kind,
        person,
        from: t.from,
        to: t.to,
        place,
        infector,
    }
}

fn new_trip(journey: Arc<Journey>, dest: SlId) -> Trip {
    Trip {
        journey,
        dest,
        stage: 0,
        progress_m: 0.0,
        vehicle: None,
    }
}

enum TripState {
    Arrived,
    Moving,
    Riding,
}

/// Move a trip forward over `[t0, t1]`.
fn advance(trip: &mut Trip, t0: f64, t1: f64, world: &World) -> TripState {
    let mut tau = t0;
    let journey = Arc::clone(&trip.journey);
    loop {
        match journey.stages.get(trip.stage) {
            None => return TripState::Arrived,
            Some(Stage::Move { path, speed_mps }) => {
                let need = (path.total_length - trip.progress_m).max(0.0) / speed_mps;
                if tau + need <= t1 {
                    tau += need;
                    trip.stage += 1;
                    trip.progress_m = 0.0;
                } else {
                    trip.progress_m += (t1 - tau) * speed_mps;
                    return TripState::Moving;
                }
            }
            Some(Stage::Ride {
                line,
                board_pos,
                alight_pos,
            }) => {
                let transit = &world.transit;
                let k = *trip
                    .vehicle
                    .get_or_insert_with(|| transit.next_vehicle(*line, *board_pos, tau));
                if transit.vehicle_arrival(*line, k, *board_pos) > t1 {
                    return TripState::Moving;
                }
                let alight = transit.vehicle_arrival(*line, k, *alight_pos);
                if alight > t1 {
                    return TripState::Riding;
                }
                tau = tau.max(alight);
                trip.stage += 1;
                trip.vehicle = None;
            }
        }
    }
}

/// Build the simulation and run it to the horizon.
pub fn run(world: &World, population: Population, cfg: SimConfig) -> Result<RunOutput, SimError> {
    Simulation::new(world, population, cfg)?.run_to_end()
}

/// Replay each person's status changes from Susceptible, reporting every
/// change that does not start from the current status or is not an
/// allowed transition.
pub fn audit_transitions(events: &[LogEvent], population: usize) -> Vec<String> {
    let mut status = vec![InfectionStatus::Susceptible; population];
    let mut last_time = vec![f64::NEG_INFINITY; population];
    let mut out = Vec::new();
    for (n, e) in events.iter().enumerate() {
        let i = e.person.0 as usize;
        let Some(cur) = status.get_mut(i) else {
            out.push(format!("event {n}: unknown person {}", e.person));
            continue;
        };
        if *cur != e.from {
            out.push(format!("event {n}: person {} is {} but event starts from {}", e.person, cur.as_str(), e.from.as_str()));
        }
        if !e.from.can_transition_to(e.to) {
            out.push(format!("event {n}: {} -> {} is not allowed", e.from.as_str(), e.to.as_str()));
        }
        if e.time < last_time[i] {
            out.push(format!("event {n}: person {} goes back in time", e.person));
        }
        last_time[i] = e.time;
        *cur = e.to;
    }
    out
}
