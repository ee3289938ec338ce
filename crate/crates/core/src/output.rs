//! Run artifacts: CSV time series and logs, the summary text and agent
//! snapshots as GeoJSON.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::engine::{EventKind, LogEvent, RunOutput, RunSummary, StatusCounts, TickReport};
use crate::epidemic::{InfectionStatus, PlaceKind};
use crate::geo::snapshot_to_geojson;
use crate::geometry::Projection;
use crate::population::Population;

pub const SUMMARY_FILE: &str = "summary.txt";
pub const REPORTS_FILE: &str = "reports.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const INFECTIONS_FILE: &str = "infections.csv";
pub const POPULATION_FILE: &str = "population.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn report_header() -> Vec<String> {
    let mut h = vec!["time_s".to_string(), "scope".to_string()];
    h.extend(InfectionStatus::ALL.iter().map(|s| s.as_str().to_string()));
    h.extend(PlaceKind::ALL.iter().map(|k| format!("infections_{}", k.as_str())));
    h
}

fn counts_row(time: f64, scope: &str, c: &StatusCounts, by_place: Option<&[u64; 6]>) -> Vec<String> {
    let mut row = vec![time.to_string(), scope.to_string()];
    row.extend(c.0.iter().map(u64::to_string));
    match by_place {
        Some(p) => row.extend(p.iter().map(u64::to_string)),
        None => row.extend(std::iter::repeat_n(String::new(), 6)),
    }
    row
}

/// Tick reports, one citywide row and one row per region per report.
pub fn write_reports<W: Write>(w: W, reports: &[TickReport]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(report_header())?;
    for r in reports {
        out.write_record(counts_row(r.time, "city", &r.citywide, Some(&r.infections_by_place)))?;
        for (id, c) in &r.regions {
            out.write_record(counts_row(r.time, &format!("region:{}", id.0), c, None))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Every status change in order.
pub fn write_events<W: Write>(w: W, events: &[LogEvent]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "event", "person", "from", "to", "place_kind", "place_id", "infector"])?;
    for e in events {
        out.write_record([
            e.time.to_string(),
            e.kind.as_str().to_string(),
            e.person.to_string(),
            e.from.as_str().to_string(),
            e.to.as_str().to_string(),
            opt(e.place.map(|p| p.kind.as_str())),
            opt(e.place.map(|p| p.id)),
            opt(e.infector),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Transmissions only.
pub fn write_infections<W: Write>(w: W, events: &[LogEvent]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "place_id", "place_kind", "infector", "infectee"])?;
    for e in events.iter().filter(|e| e.kind == EventKind::Infection) {
        out.write_record([
            e.time.to_string(),
            opt(e.place.map(|p| p.id)),
            opt(e.place.map(|p| p.kind.as_str())),
            opt(e.infector),
            e.person.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_population<W: Write>(w: W, pop: &Population) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["person_id", "age", "class", "housing_sl", "office_sl", "status"])?;
    for p in &pop.persons {
        out.write_record([
            p.id.to_string(),
            p.age.to_string(),
            p.class.as_str().to_string(),
            p.housing.to_string(),
            opt(p.office),
            p.status().as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn format_summary(s: &RunSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "days: {}", s.days);
    let _ = writeln!(t, "seed: {}", s.seed);
    let _ = writeln!(t, "population: {}", s.population);
    let _ = writeln!(t, "seeded: {}", s.seeded);
    let _ = writeln!(t, "infections: {}", s.infections);
    let _ = writeln!(t, "attack_rate: {:.4}", s.attack_rate);
    let _ = writeln!(t, "peak_symptomatic: {} at day {:.2}", s.peak_symptomatic, s.peak_time / 86_400.0);
    let _ = writeln!(t, "transit_fallbacks: {}", s.transit_fallbacks);
    let _ = writeln!(t, "infections by place:");
    for k in PlaceKind::ALL {
        let _ = writeln!(t, "  {}: {}", k.as_str(), s.infections_by_place[k.index()]);
    }
    let _ = writeln!(t, "final status counts:");
    for st in InfectionStatus::ALL {
        let _ = writeln!(t, "  {}: {}", st.as_str(), s.final_counts.get(st));
    }
    t
}

/// Write all artifacts of a run into `dir`, creating it if needed.
/// Returns the paths written.
pub fn write_run(
    dir: &Path,
    output: &RunOutput,
    population: Option<&Population>,
    projection: Option<Projection>,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, format_summary(&output.summary)).map_err(io_err(&p))?;
    written.push(p);

    type Writer<'a> = &'a dyn Fn(fs::File) -> csv::Result<()>;
    let csvs: [(&str, Writer); 3] = [
        (REPORTS_FILE, &|f| write_reports(f, &output.reports)),
        (EVENTS_FILE, &|f| write_events(f, &output.events)),
        (INFECTIONS_FILE, &|f| write_infections(f, &output.events)),
    ];
    for (name, write) in csvs {
        let p = dir.join(name);
        let f = fs::File::create(&p).map_err(io_err(&p))?;
        write(f).map_err(csv_err(&p))?;
        written.push(p);
    }
    if let Some(pop) = population {
        let p = dir.join(POPULATION_FILE);
        let f = fs::File::create(&p).map_err(io_err(&p))?;
        write_population(f, pop).map_err(csv_err(&p))?;
        written.push(p);
    }
    if !output.snapshots.is_empty() {
        let sd = dir.join(SNAPSHOT_DIR);
        fs::create_dir_all(&sd).map_err(io_err(&sd))?;
        for s in &output.snapshots {
            let p = sd.join(format!("snapshot_{:08}.geojson", s.time.round() as u64));
            fs::write(&p, snapshot_to_geojson(s, projection).to_string()).map_err(io_err(&p))?;
            written.push(p);
        }
    }
    Ok(written)
}

/// One citywide row of a reports file.
#[derive(Debug, Clone, PartialEq)]
pub struct CityRow {
    pub time: f64,
    pub counts: StatusCounts,
    pub infections_by_place: [u64; 6],
}

/// Citywide rows of a reports CSV written by [`write_reports`].
pub fn read_city_rows(path: &Path) -> Result<Vec<CityRow>, OutputError> {
    let bad = |message: String| OutputError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = rdr.headers().map_err(csv_err(path))?.iter().map(String::from).collect();
    if header != report_header() {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        if &rec[1] != "city" {
            continue;
        }
        let num = |i: usize| -> Result<u64, OutputError> {
            rec[i].parse().map_err(|_| bad(format!("bad number {:?}", &rec[i])))
        };
        let time: f64 = rec[0].parse().map_err(|_| bad(format!("bad time {:?}", &rec[0])))?;
        let mut counts = [0u64; 7];
        for (i, c) in counts.iter_mut().enumerate() {
            *c = num(2 + i)?;
        }
        let mut by_place = [0u64; 6];
        for (i, c) in by_place.iter_mut().enumerate() {
            *c = num(9 + i)?;
        }
        rows.push(CityRow {
            time,
            counts: StatusCounts(counts),
            infections_by_place: by_place,
        });
    }
    Ok(rows)
}

/// Text summary of a reports series: peak and final state.
pub fn describe_series(rows: &[CityRow]) -> String {
    let mut t = String::new();
    let Some(last) = rows.last() else {
        return "no reports\n".to_string();
    };
    let peak = rows
        .iter()
        .max_by(|a, b| {
            let (x, y) = (a.counts.get(InfectionStatus::Symptomatic), b.counts.get(InfectionStatus::Symptomatic));
            x.cmp(&y).then(b.time.total_cmp(&a.time))
        })
        .expect("non-empty");
    let _ = writeln!(t, "reports: {} (last at day {:.2})", rows.len(), last.time / 86_400.0);
    let _ = writeln!(
        t,
        "peak symptomatic: {} at day {:.2}",
        peak.counts.get(InfectionStatus::Symptomatic),
        peak.time / 86_400.0
    );
    let total: u64 = last.infections_by_place.iter().sum();
    let _ = writeln!(t, "transmissions: {total}");
    for k in PlaceKind::ALL {
        let _ = writeln!(t, "  {}: {}", k.as_str(), last.infections_by_place[k.index()]);
    }
    let _ = writeln!(t, "final status counts:");
    for st in InfectionStatus::ALL {
        let _ = writeln!(t, "  {}: {}", st.as_str(), last.counts.get(st));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn reports_read_back() {
        let reports = vec![
            TickReport {
                time: 3600.0,
                citywide: StatusCounts([9, 1, 0, 0, 0, 0, 0]),
                regions: BTreeMap::new(),
                infections_by_place: [0; 6],
            },
            TickReport {
                time: 7200.0,
                citywide: StatusCounts([8, 1, 1, 0, 0, 0, 0]),
                regions: BTreeMap::new(),
                infections_by_place: [1, 0, 0, 0, 0, 0],
            },
        ];
        let dir = std::env::temp_dir().join(format!("airsim-out-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join(REPORTS_FILE);
        write_reports(fs::File::create(&p).unwrap(), &reports).unwrap();
        let rows = read_city_rows(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].counts, reports[1].citywide);
        assert_eq!(rows[1].infections_by_place, [1, 0, 0, 0, 0, 0]);
        assert!(describe_series(&rows).contains("peak symptomatic: 1 at day 0.08"));
        fs::remove_dir_all(dir).unwrap();
    }
}
