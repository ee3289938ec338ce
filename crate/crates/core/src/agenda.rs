//! Daily activity schedules: pattern sampling, expansion into timed
//! activities joined by travel legs, and behavior adjustment under an
//! epidemic.

use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngExt};
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::city::{CityModel, SlClass, SlId};
use crate::epidemic::{InfectionStatus, SECONDS_PER_DAY};
use crate::geometry::Point;
use crate::population::{Person, PersonClass, PersonId};
use crate::travel::{Journey, ModalSplit, TravelMode, TravelPlanner};

const DAY: f64 = SECONDS_PER_DAY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityType {
    Work,
    Home,
    MedicalCare,
    Recreation,
}

impl ActivityType {
    pub fn as_str(self) -> &'static str {
        match self {
            ActivityType::Work => "work",
            ActivityType::Home => "home",
            ActivityType::MedicalCare => "medical_care",
            ActivityType::Recreation => "recreation",
        }
    }
}

impl fmt::Display for ActivityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activity {
    pub activity_type: ActivityType,
    pub sublocation: SlId,
    /// Seconds since midnight.
    pub start: f64,
    pub duration: f64,
}

impl Activity {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TravelLeg {
    pub from: SlId,
    pub to: SlId,
    pub start: f64,
    /// Planned duration; the actual trip may take longer when waiting for a
    /// vehicle.
    pub duration: f64,
    pub journey: Arc<Journey>,
}

impl TravelLeg {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AgendaItem {
    Activity(Activity),
    Travel(TravelLeg),
}

impl AgendaItem {
    pub fn start(&self) -> f64 {
        match self {
            AgendaItem::Activity(a) => a.start,
            AgendaItem::Travel(l) => l.start,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            AgendaItem::Activity(a) => a.end(),
            AgendaItem::Travel(l) => l.end(),
        }
    }
}

/// One person's day, from midnight to midnight.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyAgenda {
    pub owner: PersonId,
    pub mode: TravelMode,
    pub items: Vec<AgendaItem>,
}

impl DailyAgenda {
    pub fn activities(&self) -> impl Iterator<Item = &Activity> {
        self.items.iter().filter_map(|i| match i {
            AgendaItem::Activity(a) => Some(a),
            AgendaItem::Travel(_) => None,
        })
    }

    pub fn legs(&self) -> impl Iterator<Item = &TravelLeg> {
        self.items.iter().filter_map(|i| match i {
            AgendaItem::Travel(l) => Some(l),
            AgendaItem::Activity(_) => None,
        })
    }

    pub fn time_in(&self, kind: ActivityType) -> f64 {
        self.activities()
            .filter(|a| a.activity_type == kind)
            .map(|a| a.duration)
            .sum()
    }

    pub fn travel_time(&self) -> f64 {
        self.legs().map(|l| l.duration).sum()
    }

    /// Letters of the realized pattern, e.g. "HWH".
    pub fn pattern(&self) -> String {
        self.activities()
            .map(|a| match a.activity_type {
                ActivityType::Home => 'H',
                ActivityType::Work => 'W',
                ActivityType::MedicalCare | ActivityType::Recreation => '*',
            })
            .collect()
    }

    /// Every breach of the agenda invariants, one message each.
    pub fn check(&self, person: &Person, city: &CityModel) -> Vec<String> {
        let mut out = Vec::new();
        let tol = 1e-6;
        let mut t = 0.0;
        for (i, item) in self.items.iter().enumerate() {
            if (item.start() - t).abs() > tol {
                out.push(format!("item {i} starts at {} but the previous ended at {t}", item.start()));
            }
            let dur = item.end() - item.start();
            if !(dur >= 0.0) {
                out.push(format!("item {i} has negative duration {dur}"));
            }
            if let AgendaItem::Activity(a) = item {
                if !(a.duration > 0.0) {
                    out.push(format!("activity {i} has duration {}", a.duration));
                }
                let class = city.sublocation(a.sublocation).map(|s| s.class);
                let ok = match a.activity_type {
                    ActivityType::Home => a.sublocation == person.housing,
                    ActivityType::Work => Some(a.sublocation) == person.office,
                    ActivityType::MedicalCare => class == Some(SlClass::PatientRoom),
                    ActivityType::Recreation => class == Some(SlClass::Recreational),
                };
                if !ok {
                    out.push(format!("activity {i} ({}) at unsuitable {}", a.activity_type, a.sublocation));
                }
            }
            t = item.end();
        }
        if (t - DAY).abs() > tol {
            out.push(format!("agenda ends at {t}, not midnight"));
        }
        match (self.items.first(), self.items.last()) {
            (Some(AgendaItem::Activity(f)), Some(AgendaItem::Activity(l)))
                if f.sublocation == person.housing && l.sublocation == person.housing => {}
            _ => out.push("agenda must start and end at home".to_string()),
        }
        for (i, w) in self.items.windows(2).enumerate() {
            match (&w[0], &w[1]) {
                (AgendaItem::Activity(a), AgendaItem::Activity(b)) if a.sublocation != b.sublocation => {
                    out.push(format!("activities {i} and {} are at different places without travel", i + 1));
                }
                (AgendaItem::Travel(_), AgendaItem::Travel(_)) => {
                    out.push(format!("items {i} and {} are consecutive legs", i + 1));
                }
                (AgendaItem::Activity(a), AgendaItem::Travel(l)) if l.from != a.sublocation => {
                    out.push(format!("leg {} does not leave from {}", i + 1, a.sublocation));
                }
                (AgendaItem::Travel(l), AgendaItem::Activity(a)) if l.to != a.sublocation => {
                    out.push(format!("leg {i} does not arrive at {}", a.sublocation));
                }
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternShare {
    pub pattern: String,
    pub percent: f64,
}

/// Daily patterns of working people and their shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternTable(pub Vec<PatternShare>);

impl Default for PatternTable {
    fn default() -> Self {
        let share = |p: &str, percent| PatternShare {
            pattern: p.to_string(),
            percent,
        };
        PatternTable(vec![
            share("HWH", 53.4),
            share("HWH*H", 10.3),
            share("HW*WH", 2.7),
            share("HWHWH", 27.1),
            share("HWHWH*H", 6.5),
        ])
    }
}

pub fn is_valid_pattern(p: &str) -> bool {
    p.starts_with('H') && p.ends_with('H') && p.chars().all(|c| matches!(c, 'H' | 'W' | '*'))
}

impl PatternTable {
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.0.is_empty() {
            out.push(("agenda.patterns", "pattern table is empty".to_string()));
        }
        for s in &self.0 {
            if !is_valid_pattern(&s.pattern) {
                out.push(("agenda.patterns", format!("{:?} is not a pattern over H, W, * starting and ending with H", s.pattern)));
            }
            if !(s.percent >= 0.0) {
                out.push(("agenda.patterns", format!("{:?} has negative share", s.pattern)));
            }
        }
        let total: f64 = self.0.iter().map(|s| s.percent).sum();
        if !self.0.is_empty() && (total - 100.0).abs() > 0.1 {
            out.push(("agenda.patterns", format!("shares sum to {total}, not 100")));
        }
        out
    }
}

/// Truncated-normal duration in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationParams {
    pub mean_min: f64,
    pub sd_min: f64,
}

/// Multipliers applied to one day's agenda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyFactors {
    /// Total home time multiplier, >= 1.
    pub home_extension: f64,
    /// Probability of skipping each recreation outing, in [0, 1].
    pub recreation_avoidance: f64,
    /// Work duration multiplier, in (0, 1].
    pub work_reduction: f64,
}

impl Default for PolicyFactors {
    fn default() -> Self {
        PolicyFactors::NEUTRAL
    }
}

impl PolicyFactors {
    pub const NEUTRAL: PolicyFactors = PolicyFactors {
        home_extension: 1.0,
        recreation_avoidance: 0.0,
        work_reduction: 1.0,
    };

    pub fn is_neutral(&self) -> bool {
        *self == PolicyFactors::NEUTRAL
    }

    /// Both adjustments applied together.
    pub fn combine(&self, other: &PolicyFactors) -> PolicyFactors {
        PolicyFactors {
            home_extension: self.home_extension * other.home_extension,
            recreation_avoidance: 1.0
                - (1.0 - self.recreation_avoidance) * (1.0 - other.recreation_avoidance),
            work_reduction: self.work_reduction * other.work_reduction,
        }
    }

    fn problems(&self, key: &'static str) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.home_extension >= 1.0 && self.home_extension.is_finite()) {
            out.push((key, format!("home_extension must be >= 1, got {}", self.home_extension)));
        }
        if !(0.0..=1.0).contains(&self.recreation_avoidance) {
            out.push((key, format!("recreation_avoidance must be in [0, 1], got {}", self.recreation_avoidance)));
        }
        if !(self.work_reduction > 0.0 && self.work_reduction <= 1.0) {
            out.push((key, format!("work_reduction must be in (0, 1], got {}", self.work_reduction)));
        }
        out
    }
}

/// Factors that take effect once the share of symptomatic people reaches
/// `prevalence`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlertLevel {
    pub prevalence: f64,
    pub factors: PolicyFactors,
}

/// Behavior under an epidemic. The default is neutral: nobody changes
/// their day.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BehaviorPolicy {
    /// Ascending prevalence thresholds; the highest reached applies.
    pub alerts: Vec<AlertLevel>,
    /// Applied on top of the alert factors to symptomatic people.
    pub symptomatic: PolicyFactors,
}

impl BehaviorPolicy {
    /// 0 when no alert threshold is reached, else the 1-based level.
    pub fn alert_level(&self, prevalence: f64) -> usize {
        self.alerts
            .iter()
            .take_while(|a| prevalence >= a.prevalence)
            .count()
    }

    pub fn factors(&self, alert_level: usize, status: InfectionStatus) -> PolicyFactors {
        let base = match alert_level {
            0 => PolicyFactors::NEUTRAL,
            n => self.alerts[n.min(self.alerts.len()) - 1].factors,
        };
        if status == InfectionStatus::Symptomatic {
            base.combine(&self.symptomatic)
        } else {
            base
        }
    }

    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = self.symptomatic.problems("agenda.policy.symptomatic");
        for a in &self.alerts {
            out.extend(a.factors.problems("agenda.policy.alerts"));
            if !(0.0..=1.0).contains(&a.prevalence) {
                out.push(("agenda.policy.alerts", format!("prevalence must be in [0, 1], got {}", a.prevalence)));
            }
        }
        if self.alerts.windows(2).any(|w| w[0].prevalence >= w[1].prevalence) {
            out.push(("agenda.policy.alerts", "prevalence thresholds must be strictly ascending".into()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgendaConfig {
    pub patterns: PatternTable,
    /// Window for the start of the first work activity, hours of day.
    pub work_start_h: [f64; 2],
    /// Window for the start of a first outing that is not work.
    pub outing_start_h: [f64; 2],
    pub home: DurationParams,
    pub work: DurationParams,
    pub recreation: DurationParams,
    pub medical_care: DurationParams,
    pub min_activity_min: f64,
    pub max_activity_min: f64,
    /// Daily probability that an elder goes out once.
    pub elder_outing_probability: f64,
    pub modal_split: ModalSplit,
    pub policy: BehaviorPolicy,
}

impl Default for AgendaConfig {
    fn default() -> Self {
        AgendaConfig {
            patterns: PatternTable::default(),
            work_start_h: [7.5, 9.0],
            outing_start_h: [9.0, 11.0],
            home: DurationParams {
                mean_min: 744.0,
                sd_min: 308.0,
            },
            work: DurationParams {
                mean_min: 184.0,
                sd_min: 149.0,
            },
            recreation: DurationParams {
                mean_min: 90.0,
                sd_min: 60.0,
            },
            medical_care: DurationParams {
                mean_min: 60.0,
                sd_min: 30.0,
            },
            min_activity_min: 10.0,
            max_activity_min: 960.0,
            elder_outing_probability: 0.3,
            modal_split: ModalSplit::default(),
            policy: BehaviorPolicy::default(),
        }
    }
}

impl AgendaConfig {
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = self.patterns.problems();
        for (key, w) in [
            ("agenda.work_start_h", self.work_start_h),
            ("agenda.outing_start_h", self.outing_start_h),
        ] {
            if !(0.0 <= w[0] && w[0] <= w[1] && w[1] < 20.0) {
                out.push((key, format!("window must satisfy 0 <= start <= end < 20, got {w:?}")));
            }
        }
        for (key, d) in [
            ("agenda.home", self.home),
            ("agenda.work", self.work),
            ("agenda.recreation", self.recreation),
            ("agenda.medical_care", self.medical_care),
        ] {
            if !(d.mean_min > 0.0 && d.sd_min >= 0.0) {
                out.push((key, "mean must be positive and sd non-negative".into()));
            }
        }
        if !(self.min_activity_min > 0.0
            && self.min_activity_min < self.max_activity_min
            && self.max_activity_min <= 24.0 * 60.0)
        {
            out.push(("agenda.min_activity_min", "need 0 < min < max <= 1440".into()));
        }
        if !(0.0..=1.0).contains(&self.elder_outing_probability) {
            out.push(("agenda.elder_outing_probability", "must be in [0, 1]".into()));
        }
        out.extend(self.modal_split.problems());
        out.extend(self.policy.problems());
        out
    }

    fn min_activity_s(&self) -> f64 {
        self.min_activity_min * 60.0
    }

    /// Draw a duration in seconds, normal truncated to the activity bounds.
    pub fn sample_duration<R: Rng + ?Sized>(&self, d: &DurationParams, rng: &mut R) -> f64 {
        truncated_normal(
            d.mean_min,
            d.sd_min,
            self.min_activity_min,
            self.max_activity_min,
            rng,
        ) * 60.0
    }
}

/// Rejection sampling from N(mean, sd) restricted to [lo, hi].
pub fn truncated_normal<R: Rng + ?Sized>(mean: f64, sd: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    if sd <= 0.0 {
        return mean.clamp(lo, hi);
    }
    let normal = Normal::new(mean, sd).expect("finite normal parameters");
    for _ in 0..10_000 {
        let x = normal.sample(rng);
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
    rng.random_range(lo..=hi)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgendaError {
    #[error("person {person}: pattern needs an office but none is assigned")]
    MissingAnchor { person: PersonId },
    #[error("{0:?} is not a valid activity pattern")]
    InvalidPattern(String),
}

/// Pattern for one day. Working people draw from the pattern table; school
/// children always go to school, toddlers stay home, elders go out with the
/// configured probability.
pub fn sample_pattern<R: Rng + ?Sized>(class: PersonClass, config: &AgendaConfig, rng: &mut R) -> String {
    match class {
        PersonClass::Toddler => "H".to_string(),
        PersonClass::SchoolChild => "HWH".to_string(),
        PersonClass::Elder => {
            if rng.random_bool(config.elder_outing_probability) {
                "H*H".to_string()
            } else {
                "H".to_string()
            }
        }
        PersonClass::Adult | PersonClass::CollegeStudent => {
            let table = &config.patterns.0;
            let dist = WeightedIndex::new(table.iter().map(|s| s.percent))
                .expect("validated pattern table");
            table[dist.sample(rng)].pattern.clone()
        }
    }
}

/// Lookup tables shared by all agendas of a run.
pub struct AgendaContext<'a> {
    pub config: &'a AgendaConfig,
    pub city: &'a CityModel,
    recreational: Vec<(SlId, Point)>,
    patient_rooms: Vec<(SlId, Point)>,
}

impl<'a> AgendaContext<'a> {
    pub fn new(config: &'a AgendaConfig, city: &'a CityModel) -> Self {
        let of = |class| {
            city.sublocations_of_class(class)
                .map(|s| (s.id, s.center))
                .collect()
        };
        AgendaContext {
            config,
            city,
            recreational: of(SlClass::Recreational),
            patient_rooms: of(SlClass::PatientRoom),
        }
    }

    fn center(&self, sl: SlId) -> Point {
        self.city.sublocation(sl).map(|s| s.center).unwrap_or_default()
    }
}

/// Candidate drawn with probability inversely proportional to its distance
/// from `from` (distances below 1 m count as 1 m).
pub fn sample_inverse_distance<R: Rng + ?Sized>(
    candidates: &[(SlId, Point)],
    from: &Point,
    rng: &mut R,
) -> Option<SlId> {
    let weights: Vec<f64> = candidates
        .iter()
        .map(|(_, p)| 1.0 / from.distance(p).max(1.0))
        .collect();
    let dist = WeightedIndex::new(weights).ok()?;
    Some(candidates[dist.sample(rng)].0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Planned {
    kind: ActivityType,
    sl: SlId,
    duration: f64,
}

fn leg_time(planner: &mut dyn TravelPlanner, mode: TravelMode, from: SlId, to: SlId) -> f64 {
    if from == to {
        0.0
    } else {
        planner.plan(mode, from, to).estimated_s
    }
}

/// Lay activities end to end from midnight, inserting a leg between
/// different places. The last activity runs until midnight.
fn lay_out(owner: PersonId, mode: TravelMode, acts: &[Planned], planner: &mut dyn TravelPlanner) -> DailyAgenda {
    let mut items = Vec::with_capacity(acts.len() * 2);
    let mut t = 0.0;
    for (i, act) in acts.iter().enumerate() {
        if i > 0 && acts[i - 1].sl != act.sl {
            let journey = planner.plan(mode, acts[i - 1].sl, act.sl);
            let duration = journey.estimated_s;
            items.push(AgendaItem::Travel(TravelLeg {
                from: acts[i - 1].sl,
                to: act.sl,
                start: t,
                duration,
                journey,
            }));
            t += duration;
        }
        let duration = if i + 1 == acts.len() { DAY - t } else { act.duration };
        items.push(AgendaItem::Activity(Activity {
            activity_type: act.kind,
            sublocation: act.sl,
            start: t,
            duration,
        }));
        t += duration;
    }
    DailyAgenda { owner, mode, items }
}

/// Fit drawn activities into the day. An outing is cut short so that the
/// person is home at least the minimum activity time before midnight, and
/// dropped together with everything after it when even the minimum does
/// not fit. A home stay running past midnight ends the day.
fn fit_day(
    housing: SlId,
    mode: TravelMode,
    anchor: f64,
    steps: &[Planned],
    min_act: f64,
    planner: &mut dyn TravelPlanner,
) -> Vec<Planned> {
    let mut out = vec![Planned {
        kind: ActivityType::Home,
        sl: housing,
        duration: DAY,
    }];
    let Some(first) = steps.first() else {
        return out;
    };
    let departure = (anchor - leg_time(planner, mode, housing, first.sl)).clamp(min_act, DAY - min_act);
    out[0].duration = departure;
    let mut t = departure;
    for step in steps {
        let cur = *out.last().expect("non-empty");
        let s = t + leg_time(planner, mode, cur.sl, step.sl);
        if step.kind == ActivityType::Home {
            if s + min_act > DAY {
                break;
            }
            let d = step.duration.min(DAY - s);
            out.push(Planned { duration: d, ..*step });
            t = s + d;
            if t >= DAY {
                break;
            }
        } else {
            let latest_end = DAY - min_act - leg_time(planner, mode, step.sl, housing);
            if s + min_act > latest_end {
                break;
            }
            let d = step.duration.min(latest_end - s);
            out.push(Planned { duration: d, ..*step });
            t = s + d;
        }
    }
    let last = out.last().expect("non-empty");
    if last.kind != ActivityType::Home {
        out.push(Planned {
            kind: ActivityType::Home,
            sl: housing,
            duration: 0.0,
        });
    }
    out
}

/// Turn a pattern into a timed agenda for `person`, then apply `factors`.
pub fn expand_agenda<R: Rng + ?Sized>(
    person: &Person,
    pattern: &str,
    factors: &PolicyFactors,
    ctx: &AgendaContext<'_>,
    planner: &mut dyn TravelPlanner,
    rng: &mut R,
) -> Result<DailyAgenda, AgendaError> {
    if !is_valid_pattern(pattern) {
        return Err(AgendaError::InvalidPattern(pattern.to_string()));
    }
    let cfg = ctx.config;
    let letters: Vec<char> = pattern.chars().collect();
    let inner = if letters.len() >= 2 {
        &letters[1..letters.len() - 1]
    } else {
        &[][..]
    };
    if inner.contains(&'W') && person.office.is_none() {
        return Err(AgendaError::MissingAnchor { person: person.id });
    }
    let mode = if inner.is_empty() {
        TravelMode::Walk
    } else {
        cfg.modal_split.sample(person.class, rng)
    };
    let symptomatic = person.status() == InfectionStatus::Symptomatic;

    let mut steps = Vec::with_capacity(inner.len());
    let mut prev = person.housing;
    for &c in inner {
        let step = match c {
            'H' => Some(Planned {
                kind: ActivityType::Home,
                sl: person.housing,
                duration: cfg.sample_duration(&cfg.home, rng),
            }),
            'W' => Some(Planned {
                kind: ActivityType::Work,
                sl: person.office.expect("checked above"),
                duration: cfg.sample_duration(&cfg.work, rng),
            }),
            _ => {
                let (kind, pool, params) = if symptomatic {
                    (ActivityType::MedicalCare, &ctx.patient_rooms, &cfg.medical_care)
                } else {
                    (ActivityType::Recreation, &ctx.recreational, &cfg.recreation)
                };
                sample_inverse_distance(pool, &ctx.center(prev), rng).map(|sl| Planned {
                    kind,
                    sl,
                    duration: cfg.sample_duration(params, rng),
                })
            }
        };
        if let Some(step) = step {
            prev = step.sl;
            steps.push(step);
        }
    }
    // Two home stays in a row (after an unresolvable '*') are one stay.
    steps.dedup_by(|b, a| a.kind == ActivityType::Home && b.kind == ActivityType::Home);
    if steps.last().is_some_and(|s| s.kind == ActivityType::Home) {
        steps.pop();
    }

    let window = match steps.first().map(|s| s.kind) {
        Some(ActivityType::Work) => cfg.work_start_h,
        _ => cfg.outing_start_h,
    };
    let anchor = rng.random_range(window[0]..=window[1]) * 3600.0;
    let acts = fit_day(person.housing, mode, anchor, &steps, cfg.min_activity_s(), planner);
    let agenda = lay_out(person.id, mode, &acts, planner);
    Ok(apply_policy(&agenda, factors, ctx, planner, rng))
}

/// Adjust an agenda: skip recreation with the avoidance probability,
/// shorten work, then stretch total home time by the extension factor
/// (bounded so every remaining outing keeps the minimum activity time),
/// shrinking outings to make room. Time freed by skipped or shortened
/// activities goes to the final home stay. Neutral factors return the
/// agenda unchanged.
pub fn apply_policy<R: Rng + ?Sized>(
    agenda: &DailyAgenda,
    factors: &PolicyFactors,
    ctx: &AgendaContext<'_>,
    planner: &mut dyn TravelPlanner,
    rng: &mut R,
) -> DailyAgenda {
    if factors.is_neutral() {
        return agenda.clone();
    }
    let mut acts: Vec<Planned> = agenda
        .activities()
        .map(|a| Planned {
            kind: a.activity_type,
            sl: a.sublocation,
            duration: a.duration,
        })
        .collect();
    if acts.len() < 2 {
        return agenda.clone();
    }

    let p = factors.recreation_avoidance;
    if p > 0.0 {
        acts.retain(|a| a.kind != ActivityType::Recreation || !rng.random_bool(p));
        acts.dedup_by(|b, a| {
            if a.sl == b.sl && a.kind == b.kind {
                a.duration += b.duration;
                true
            } else {
                false
            }
        });
    }
    for a in acts.iter_mut().filter(|a| a.kind == ActivityType::Work) {
        a.duration *= factors.work_reduction;
    }

    let n = acts.len();
    if factors.home_extension > 1.0 && n > 1 {
        let travel: f64 = acts
            .windows(2)
            .map(|w| leg_time(planner, agenda.mode, w[0].sl, w[1].sl))
            .sum();
        let is_home = |a: &Planned| a.kind == ActivityType::Home;
        let outings: f64 = acts.iter().filter(|a| !is_home(a)).map(|a| a.duration).sum();
        let n_out = acts.iter().filter(|a| !is_home(a)).count() as f64;
        let home = DAY - travel - outings;
        let target = (factors.home_extension * home)
            .min(DAY - travel - ctx.config.min_activity_s() * n_out)
            .max(home);
        if home > 0.0 && target > home {
            let k = target / home;
            let q = if outings > 0.0 { (DAY - travel - target) / outings } else { 1.0 };
            for a in &mut acts[..n - 1] {
                a.duration *= if is_home(a) { k } else { q };
            }
        }
    }
    lay_out(agenda.owner, agenda.mode, &acts, planner)
}

/// Flat view of an agenda item for CSV export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgendaRow {
    pub person: u32,
    pub item: usize,
    pub kind: &'static str,
    pub what: String,
    pub sublocation: Option<u32>,
    pub from: Option<u32>,
    pub to: Option<u32>,
    pub start_s: f64,
    pub end_s: f64,
}

pub fn agenda_rows(agenda: &DailyAgenda) -> Vec<AgendaRow> {
    agenda
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| match item {
            AgendaItem::Activity(a) => AgendaRow {
                person: agenda.owner.0,
                item: i,
                kind: "activity",
                what: a.activity_type.to_string(),
                sublocation: Some(a.sublocation.0),
                from: None,
                to: None,
                start_s: a.start,
                end_s: a.end(),
            },
            AgendaItem::Travel(l) => AgendaRow {
                person: agenda.owner.0,
                item: i,
                kind: "travel",
                what: l.journey.mode.to_string(),
                sublocation: None,
                from: Some(l.from.0),
                to: Some(l.to.0),
                start_s: l.start,
                end_s: l.end(),
            },
        })
        .collect()
}
