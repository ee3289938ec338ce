use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn airsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airsim"))
        .args(args)
        .env_remove("AIRSIM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("airsim-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(file)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_validate_and_route() {
    let dir = scratch("gen");
    let city = dir.join("city.toml");
    let geo = dir.join("city.geojson");
    let o = airsim(&["generate-city", "--cols", "3", "--rows", "3", "--seed", "4", "-o", s(&city), "--geojson", s(&geo)]);
    assert!(o.status.success(), "{o:?}");
    assert!(geo.is_file());

    let o = airsim(&["validate-city", s(&city)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": ok"));

    let o = airsim(&["route", s(&city), "--from", "10,10", "--to", "1100,1150"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("# direct"));
    let o = airsim(&["route", s(&city), "--from", "10,10", "--to", "1100,1150", "--threshold", "0"]);
    assert!(stdout(&o).starts_with("# composed"), "{}", stdout(&o));

    let o = airsim(&["route", s(&city), "--from", "10", "--to", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn broken_city_reports_violations() {
    let dir = scratch("broken");
    let text = fs::read_to_string(data("toy_city.toml")).unwrap();
    // Push the first sublocation far outside every region.
    let i = text.find("[[sublocations]]").unwrap();
    let j = i + text[i..].find("center = ").unwrap();
    let k = j + text[j..].find('\n').unwrap();
    let broken = format!("{}center = [-99999.0, -99999.0]{}", &text[..j], &text[k..]);
    let city = dir.join("broken.toml");
    fs::write(&city, broken).unwrap();
    let o = airsim(&["validate-city", s(&city)]);
    assert_eq!(o.status.code(), Some(1), "{o:?}");
    assert!(stdout(&o).contains("1 violations"), "{}", stdout(&o));

    fs::write(&city, "regions = 3").unwrap();
    assert_eq!(airsim(&["validate-city", s(&city)]).status.code(), Some(3));
    assert_eq!(airsim(&["validate-city", s(&dir.join("missing.toml"))]).status.code(), Some(4));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn transit_route_on_the_toy_city() {
    let city = data("toy_city.toml");
    let o = airsim(&["transit-route", s(&city), "--from", "50,450", "--to", "790,450"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("0 transfers"), "{}", stdout(&o));
    let o = airsim(&["transit-route", s(&city), "--from", "50,450", "--to", "790,450", "--radii", "1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn population_and_agendas() {
    let dir = scratch("pop");
    let pop = dir.join("pop.csv");
    let agendas = dir.join("agendas.csv");
    let o = airsim(&[
        "synthesize-population",
        s(&data("toy_scenario.toml")),
        "--seed",
        "3",
        "-o",
        s(&pop),
        "--agendas",
        s(&agendas),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&pop).unwrap();
    assert!(text.starts_with("person_id,age,class,housing_sl,office_sl,status"));
    assert!(text.lines().count() > 500);
    assert!(fs::read_to_string(&agendas).unwrap().lines().count() > 500);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn run_and_report() {
    let dir = scratch("run");
    let out = dir.join("out");
    let o = airsim(&["run", s(&data("toy_scenario.toml")), "--days", "1", "-o", s(&out)]);
    assert!(o.status.success(), "{o:?}");
    for f in ["summary.txt", "reports.csv", "events.csv", "infections.csv", "population.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(out.join("snapshots").is_dir());

    let o = airsim(&["report", s(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("peak symptomatic"));

    // The environment variable stands in for a missing flag.
    let env_out = dir.join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_airsim"))
        .args(["run", s(&data("toy_scenario.toml")), "--days", "1", "--dt", "120"])
        .env("AIRSIM_OUTPUT_DIR", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    assert!(env_out.join("summary.txt").is_file());

    assert_eq!(airsim(&["report", s(&dir.join("nothing"))]).status.code(), Some(4));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_scenario_is_a_config_error() {
    let dir = scratch("bad");
    let text = fs::read_to_string(data("toy_scenario.toml")).unwrap();
    let city = data("toy_city.toml");
    let fixed = text.replace("\"toy_city.toml\"", &format!("{:?}", s(&city)));
    let bad = dir.join("bad.toml");
    fs::write(&bad, fixed.replace("sigma_per_hour = 0.3", "sigma_per_hour = -1.0")).unwrap();
    let o = airsim(&["run", s(&bad), "-o", s(&dir.join("o"))]);
    assert_eq!(o.status.code(), Some(3), "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma_per_hour"));

    let o = airsim(&["run", s(&data("toy_scenario.toml")), "--dt", "0", "-o", s(&dir.join("o"))]);
    assert_eq!(o.status.code(), Some(3));
    fs::remove_dir_all(dir).unwrap();
}
