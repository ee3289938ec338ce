use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use airsim::cityfile::{load_city, read_city, save_city, CityFileError};
use airsim::engine::{SimError, Simulation};
use airsim::geo::world_to_geojson;
use airsim::geometry::Point;
use airsim::output::{describe_series, read_city_rows, write_population, write_run, REPORTS_FILE, SUMMARY_FILE};
use airsim::population::{synthesize_population, PopulationError};
use airsim::road::{RoadRoute, DEFAULT_WALK_THRESHOLD_M};
use airsim::scenario::{load_scenario, RunError, ScenarioConfig, ScenarioError};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};
use airsim::transit::TransitSearch;
use airsim::world::World;

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_CONFIG: u8 = 3;
const EXIT_RUNTIME: u8 = 4;
const OUTPUT_ENV: &str = "AIRSIM_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "airsim", version, about = "Agent-based airborne disease simulation in a synthetic city")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a city file and list every violation.
    ValidateCity { city: PathBuf },
    /// Write a synthetic grid city.
    GenerateCity {
        /// Spec file (TOML). Without it a balanced grid of --cols x --rows is built.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Use the built-in four-block toy city.
        #[arg(long, conflicts_with_all = ["spec", "cols", "rows"])]
        toy: bool,
        #[arg(long, default_value_t = 4)]
        cols: u32,
        #[arg(long, default_value_t = 4)]
        rows: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
        /// Also export the city as GeoJSON.
        #[arg(long)]
        geojson: Option<PathBuf>,
    },
    /// Print the road path between two points, one `x y` pair per line.
    Route {
        city: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = DEFAULT_WALK_THRESHOLD_M)]
        threshold: f64,
    },
    /// Print the fewest-transfer public transport itinerary between two points.
    TransitRoute {
        city: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        /// Search radii in meters; the last one repeats.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Build the population of a scenario and write it as CSV.
    SynthesizePopulation {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the first day's agendas as CSV.
        #[arg(long)]
        agendas: Option<PathBuf>,
    },
    /// Run a scenario and write its outputs.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        days: Option<u32>,
        /// Tick length in seconds.
        #[arg(long)]
        dt: Option<f64>,
        /// Output directory. Overrides $AIRSIM_OUTPUT_DIR and the scenario file.
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Summarize the outputs of a finished run.
    Report { dir: PathBuf },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x = x.trim().parse().map_err(|e| format!("x: {e}"))?;
    let y = y.trim().parse().map_err(|e| format!("y: {e}"))?;
    Ok(Point::new(x, y))
}

struct Failure {
    code: u8,
    message: String,
}

fn config(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.to_string(),
    }
}

fn runtime(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: message.to_string(),
    }
}

impl From<CityFileError> for Failure {
    fn from(e: CityFileError) -> Self {
        match e {
            CityFileError::Io { .. } => runtime(e),
            _ => config(e),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => runtime(e),
            _ => config(e),
        }
    }
}

impl From<PopulationError> for Failure {
    fn from(e: PopulationError) -> Self {
        config(e)
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Agenda(_) => runtime(e),
            _ => config(e),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(e) => e.into(),
            RunError::City(e) => e.into(),
            RunError::Population(e) => e.into(),
            RunError::Sim(e) => e.into(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::ValidateCity { city } => validate_city(&city),
        Command::GenerateCity {
            spec,
            toy,
            cols,
            rows,
            seed,
            out,
            geojson,
        } => {
            let spec = match (spec, toy) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
                    toml::from_str::<SyntheticCitySpec>(&text).map_err(|e| config(format!("{}: {e}", p.display())))?
                }
                (None, true) => SyntheticCitySpec::toy(),
                (None, false) => SyntheticCitySpec::balanced(cols, rows),
            };
            let world = generate_synthetic_city(&spec, seed).map_err(config)?;
            save_city(&world, &out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;
            if let Some(g) = geojson {
                std::fs::write(&g, world_to_geojson(&world).to_string())
                    .map_err(|e| runtime(format!("{}: {e}", g.display())))?;
            }
            println!(
                "wrote {} ({} regions, {} sublocations, {} stops)",
                out.display(),
                world.city.regions().len(),
                world.city.sublocations().len(),
                world.transit.stops().len()
            );
            Ok(0)
        }
        Command::Route {
            city,
            from,
            to,
            threshold,
        } => {
            let world = load_city(&city)?;
            let route = world.roads.route(from, to, threshold);
            let kind = match route {
                RoadRoute::Direct(_) => "direct",
                RoadRoute::Composed { .. } => "composed",
                RoadRoute::Fallback(_) => "straight fallback (no road connection)",
            };
            let path = route.into_path();
            println!("# {kind}, length {:.1} m", path.total_length);
            for p in path.coordinates() {
                println!("{} {}", p.x, p.y);
            }
            Ok(0)
        }
        Command::TransitRoute { city, from, to, radii } => {
            let world = load_city(&city)?;
            let mut search = TransitSearch::default();
            if let Some(r) = radii {
                search.radii_m = r;
            }
            match world.transit.route(from, to, &search) {
                Ok(it) => {
                    println!(
                        "{} legs, {} transfers, about {:.0} s",
                        it.legs.len(),
                        it.transfers,
                        it.estimated_time_s
                    );
                    for (i, leg) in it.legs.iter().enumerate() {
                        println!(
                            "walk {:.0} m, then line {} {} from stop {} to stop {}",
                            polyline(&it.walks[i]),
                            leg.line,
                            leg.direction,
                            leg.board,
                            leg.alight
                        );
                    }
                    println!("walk {:.0} m", polyline(&it.walks[it.legs.len()]));
                    Ok(0)
                }
                Err(e) => Err(runtime(format!("no itinerary: {e}"))),
            }
        }
        Command::SynthesizePopulation {
            scenario,
            seed,
            out,
            agendas,
        } => {
            let mut cfg = load_scenario(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let world = load_city(&cfg.city_path())?;
            let pop = synthesize_population(&world.city, &cfg.population, cfg.seed)?;
            match &out {
                Some(p) => {
                    let f = std::fs::File::create(p).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
                    write_population(f, &pop).map_err(runtime)?;
                }
                None => write_population(std::io::stdout().lock(), &pop).map_err(runtime)?,
            }
            if let Some(p) = agendas {
                write_agendas(&world, &cfg, pop, &p)?;
            }
            Ok(0)
        }
        Command::Run {
            scenario,
            seed,
            days,
            dt,
            output_dir,
        } => {
            let mut cfg = load_scenario(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(d) = days {
                cfg.days = d;
            }
            if let Some(d) = dt {
                cfg.dt_s = d;
            }
            let problems = cfg.problems();
            if let Some((k, m)) = problems.first() {
                return Err(config(format!("{k}: {m}")));
            }
            let dir = output_dir
                .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
                .or_else(|| cfg.output_dir())
                .unwrap_or_else(|| PathBuf::from("airsim-output"));
            let run = airsim::scenario::run_scenario(&cfg)?;
            write_run(&dir, &run.output, Some(&run.population), run.world.city.projection).map_err(runtime)?;
            print!("{}", airsim::output::format_summary(&run.output.summary));
            println!("outputs in {}", dir.display());
            Ok(0)
        }
        Command::Report { dir } => {
            let rows = read_city_rows(&dir.join(REPORTS_FILE)).map_err(runtime)?;
            if let Ok(s) = std::fs::read_to_string(dir.join(SUMMARY_FILE)) {
                print!("{s}");
            }
            print!("{}", describe_series(&rows));
            Ok(0)
        }
    }
}

fn polyline(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

fn validate_city(path: &Path) -> Result<u8, Failure> {
    let loaded = read_city(path)?;
    if loaded.violations.is_empty() {
        println!("{}: ok", path.display());
        return Ok(0);
    }
    for v in &loaded.violations {
        println!("{}: {v}", path.display());
    }
    println!("{} violations", loaded.violations.len());
    Ok(EXIT_VIOLATIONS)
}

fn write_agendas(
    world: &World,
    cfg: &ScenarioConfig,
    pop: airsim::population::Population,
    path: &Path,
) -> Result<(), Failure> {
    let sim = Simulation::new(world, pop, cfg.sim_config())?;
    let mut w = csv::Writer::from_path(path).map_err(runtime)?;
    for agent in sim.agents() {
        for row in airsim::agenda::agenda_rows(&agent.agenda) {
            w.serialize(row).map_err(runtime)?;
        }
    }
    w.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    Ok(())
}
