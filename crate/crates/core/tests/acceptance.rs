//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use airsim::agenda::{sample_pattern, AgendaConfig};
use airsim::engine::{audit_transitions, EventKind, SeedSpec, SimConfig, Simulation};
use airsim::epidemic::{
    infection_probability, step_contacts, ContactAccumulator, ContactSpace, DiseaseState, EpidemicParams,
    InfectionStatus, Occupant,
};
use airsim::geometry::Point;
use airsim::output::write_events;
use airsim::population::{synthesize_population, DemographicConfig, PersonClass, PersonId};
use airsim::road::{Directionality, NodeId, RoadEdge, RoadGraph, RoadNode, RoadRoute, Segment, DEFAULT_WALK_THRESHOLD_M};
use airsim::scenario::{load_scenario, run_scenario};
use airsim::synth::{generate_synthetic_city, SyntheticCitySpec};
use airsim::transit::{DirectedLine, Direction, LineId, Stop, StopId, TransitGraph, TransitItinerary, TransitSearch};
use airsim::world::World;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 routing threshold rule", 5.0, routing_threshold),
        ("2 road shortest paths vs enumeration", 10.0, road_shortest_paths),
        ("3 transit minimum transfers vs BFS", 30.0, transit_min_transfers),
        ("4 activity pattern shares", 5.0, pattern_shares),
        ("5 infection probability closed form", 1.0, closed_form),
        ("6 transmission Monte Carlo", 60.0, transmission_monte_carlo),
        ("7 progression durations", 5.0, progression_durations),
        ("8 toy epidemic end to end", 600.0, toy_epidemic),
        ("9 determinism of event logs", 600.0, determinism),
        ("10 zero transmission control", 600.0, zero_transmission),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs_f64(budget);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} ({}; {:.2} s of {budget} s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- routing

fn project(p: Point, a: Point, b: Point) -> (Point, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let q = Point::new(a.x + t * dx, a.y + t * dy);
    (q, q.distance(&p))
}

fn brute_nearest_on_road(roads: &RoadGraph, p: Point) -> f64 {
    roads
        .edges()
        .iter()
        .flat_map(|e| e.polyline.windows(2).map(|w| project(p, w[0], w[1]).1).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min)
}

/// All-pairs distances by Floyd-Warshall over edge polyline lengths.
fn floyd(roads: &RoadGraph) -> (Vec<Vec<f64>>, std::collections::HashMap<NodeId, usize>) {
    let idx: std::collections::HashMap<NodeId, usize> =
        roads.nodes().iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let n = idx.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in roads.edges() {
        let len: f64 = e.polyline.windows(2).map(|w| w[0].distance(&w[1])).sum();
        let (a, b) = (idx[&e.from], idx[&e.to]);
        d[a][b] = d[a][b].min(len);
        if e.directionality == Directionality::TwoWay {
            d[b][a] = d[b][a].min(len);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    (d, idx)
}

fn routing_threshold() -> Outcome {
    let world = generate_synthetic_city(&SyntheticCitySpec::balanced(10, 10), 5).unwrap();
    let roads = &world.roads;
    let (dist, idx) = floyd(roads);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut short, mut long, mut bad) = (0, 0, Vec::new());
    for k in 0..1000 {
        let ps = Point::new(rng.random_range(0.0..4000.0), rng.random_range(0.0..4000.0));
        let pe = Point::new(rng.random_range(0.0..4000.0), rng.random_range(0.0..4000.0));
        let route = roads.route(ps, pe, DEFAULT_WALK_THRESHOLD_M);
        let segs = &route.path().segments;
        let ok = if ps.distance(&pe) <= DEFAULT_WALK_THRESHOLD_M {
            short += 1;
            matches!(route, RoadRoute::Direct(_))
                && segs.len() == 1
                && segs[0] == Segment::Straight { from: ps, to: pe }
        } else {
            long += 1;
            match &route {
                RoadRoute::Composed {
                    start_on_road,
                    start_node,
                    end_node,
                    end_on_road,
                    network_segments,
                    ..
                } => {
                    let n = segs.len();
                    let node_pt = |id: &NodeId| roads.nodes()[idx[id]].point;
                    let nearest_node = |p: &Point| {
                        roads
                            .nodes()
                            .iter()
                            .map(|nd| nd.point.distance(p))
                            .fold(f64::INFINITY, f64::min)
                    };
                    let middle: f64 = segs[2..n - 2].iter().map(|s| s.length()).sum();
                    n == network_segments + 4
                        && segs[0] == Segment::Straight { from: ps, to: *start_on_road }
                        && segs[1] == Segment::Straight { from: *start_on_road, to: node_pt(start_node) }
                        && segs[n - 2] == Segment::Straight { from: node_pt(end_node), to: *end_on_road }
                        && segs[n - 1] == Segment::Straight { from: *end_on_road, to: pe }
                        && segs[2..n - 2].iter().all(|s| matches!(s, Segment::OnRoad { .. }))
                        && route.path().is_contiguous(1e-6)
                        && (ps.distance(start_on_road) - brute_nearest_on_road(roads, ps)).abs() < 1e-6
                        && (pe.distance(end_on_road) - brute_nearest_on_road(roads, pe)).abs() < 1e-6
                        && (start_on_road.distance(&node_pt(start_node)) - nearest_node(start_on_road)).abs() < 1e-6
                        && (end_on_road.distance(&node_pt(end_node)) - nearest_node(end_on_road)).abs() < 1e-6
                        && (middle - dist[idx[start_node]][idx[end_node]]).abs() < 1e-6
                }
                _ => false,
            }
        };
        if !ok {
            bad.push(k);
        }
    }
    outcome(
        bad.is_empty() && short > 0 && long > 0,
        format!("{short} short and {long} long OD pairs, {} nonconforming", bad.len()),
    )
}

/// Shortest simple-path length from `a` to `b` by exhaustive enumeration.
fn enumerate_paths(adj: &[Vec<(usize, f64)>], a: usize, b: usize) -> Option<f64> {
    fn dfs(adj: &[Vec<(usize, f64)>], at: usize, b: usize, len: f64, seen: &mut Vec<bool>, best: &mut Option<f64>) {
        if at == b {
            *best = Some(best.map_or(len, |x: f64| x.min(len)));
            return;
        }
        for &(v, w) in &adj[at] {
            if !seen[v] {
                seen[v] = true;
                dfs(adj, v, b, len + w, seen, best);
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; adj.len()];
    seen[a] = true;
    let mut best = None;
    dfs(adj, a, b, 0.0, &mut seen, &mut best);
    best
}

fn road_shortest_paths() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut pairs, mut mismatches, mut reachable) = (0, 0, 0);
    for _ in 0..100 {
        let nodes: Vec<RoadNode> = (0..8)
            .map(|i| RoadNode {
                id: NodeId(i + 1),
                point: Point::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)),
            })
            .collect();
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); 8];
        let m = rng.random_range(6..16);
        while edges.len() < m {
            let (a, b) = (rng.random_range(0..8usize), rng.random_range(0..8usize));
            if a == b {
                continue;
            }
            let (pa, pb) = (nodes[a].point, nodes[b].point);
            let mut polyline = vec![pa];
            if rng.random_bool(0.5) {
                let mid = pa.lerp(&pb, 0.5);
                polyline.push(Point::new(mid.x + rng.random_range(-100.0..100.0), mid.y + rng.random_range(-100.0..100.0)));
            }
            polyline.push(pb);
            let len: f64 = polyline.windows(2).map(|w| w[0].distance(&w[1])).sum();
            let dir = if rng.random_bool(0.4) {
                Directionality::OneWay
            } else {
                Directionality::TwoWay
            };
            adj[a].push((b, len));
            if dir == Directionality::TwoWay {
                adj[b].push((a, len));
            }
            let id = airsim::road::EdgeId(edges.len() as u32 + 1);
            edges.push(RoadEdge::new(id, nodes[a].id, nodes[b].id, polyline, dir));
        }
        let graph = RoadGraph::new(nodes.clone(), edges);
        for a in 0..8 {
            for b in 0..8 {
                pairs += 1;
                let oracle = enumerate_paths(&adj, a, b);
                let got = graph.shortest_path(nodes[a].id, nodes[b].id).ok().map(|r| r.path.total_length);
                let ok = match (oracle, got) {
                    (Some(x), Some(y)) => {
                        reachable += 1;
                        (x - y).abs() <= 1e-9
                    }
                    (None, None) => true,
                    _ => false,
                };
                if !ok {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{pairs} ordered pairs ({reachable} reachable), {mismatches} mismatches"),
    )
}

// ---------------------------------------------------------------- transit

/// Side of the square the random networks live in.
const SPAN: f64 = 6000.0;

fn random_network(rng: &mut ChaCha8Rng) -> TransitGraph {
    let mut stops = Vec::new();
    // Clusters of one to three stops a few meters apart make transfers possible.
    while stops.len() < 48 {
        let c = Point::new(rng.random_range(0.0..SPAN), rng.random_range(0.0..SPAN));
        for _ in 0..rng.random_range(1..=3) {
            let id = StopId(stops.len() as u32 + 1);
            stops.push(Stop {
                id,
                point: Point::new(c.x + rng.random_range(-25.0..25.0), c.y + rng.random_range(-25.0..25.0)),
            });
        }
    }
    let n = stops.len();
    let mut lines = Vec::new();
    for l in 0..rng.random_range(7..12u32) {
        let len = rng.random_range(3..8);
        let picked = rand::seq::index::sample(rng, n, len).into_vec();
        let seq: Vec<StopId> = picked.iter().map(|&i| stops[i].id).collect();
        let headway = rng.random_range(300.0..1200.0);
        lines.push(DirectedLine {
            line: LineId(l + 1),
            direction: Direction::Outbound,
            stops: seq.clone(),
            headway_s: headway,
            speed_mps: 6.0,
        });
        if rng.random_bool(0.5) {
            lines.push(DirectedLine {
                line: LineId(l + 1),
                direction: Direction::Inbound,
                stops: seq.into_iter().rev().collect(),
                headway_s: headway,
                speed_mps: 6.0,
            });
        }
    }
    TransitGraph::new(stops, lines)
}

/// Fewest rides by breadth-first search over rides: walk at most `r_first`
/// to board, ride forward along a directed line, walk at most `r_next`
/// between rides, and leave by walking at most `r_next` to a stop within
/// `r_first` of the destination.
fn bfs_min_rides(g: &TransitGraph, ps: Point, pe: Point, r_first: f64, r_next: f64, max_rides: usize) -> Option<usize> {
    let stops = g.stops();
    let pos = |id: StopId| stops.iter().position(|s| s.id == id).unwrap();
    let ride_from = |boards: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for line in g.lines() {
            for (k, &s) in line.stops.iter().enumerate() {
                if boards.contains(&pos(s)) {
                    for &t in &line.stops[k + 1..] {
                        out.insert(pos(t));
                    }
                }
            }
        }
        out
    };
    let exits: BTreeSet<usize> = (0..stops.len())
        .filter(|&a| {
            stops.iter().any(|s| s.point.distance(&stops[a].point) <= r_next && s.point.distance(&pe) <= r_first)
        })
        .collect();
    let mut boards: BTreeSet<usize> = (0..stops.len()).filter(|&i| stops[i].point.distance(&ps) <= r_first).collect();
    let mut seen_alight = BTreeSet::new();
    for rides in 1..=max_rides {
        let alights = ride_from(&boards);
        if alights.iter().any(|a| exits.contains(a)) {
            return Some(rides);
        }
        let fresh: BTreeSet<usize> = alights.difference(&seen_alight).copied().collect();
        if fresh.is_empty() {
            return None;
        }
        seen_alight.extend(fresh.iter().copied());
        boards = (0..stops.len())
            .filter(|&b| fresh.iter().any(|&a| stops[a].point.distance(&stops[b].point) <= r_next))
            .collect();
    }
    None
}

fn itinerary_is_feasible(g: &TransitGraph, it: &TransitItinerary, r_first: f64, r_next: f64) -> bool {
    let eps = 1e-6;
    let hops = |w: &[Point]| w.windows(2).map(|p| p[0].distance(&p[1])).collect::<Vec<_>>();
    let stop_pt = |id: StopId| g.stop(id).unwrap().point;
    if it.legs.is_empty() || it.walks.len() != it.legs.len() + 1 || it.transfers + 1 != it.legs.len() {
        return false;
    }
    let first = hops(&it.walks[0]);
    if first.len() != 1 || first[0] > r_first + eps {
        return false;
    }
    for w in &it.walks[1..it.legs.len()] {
        if hops(w).iter().any(|&h| h > r_next + eps) {
            return false;
        }
    }
    let last = hops(&it.walks[it.legs.len()]);
    if last.last().is_none_or(|&h| h > r_first + eps) || last[..last.len() - 1].iter().any(|&h| h > r_next + eps) {
        return false;
    }
    it.legs.iter().enumerate().all(|(k, leg)| {
        let line = &g.lines()[g.line_index(leg.line, leg.direction).unwrap()];
        leg.board_index < leg.alight_index
            && line.stops[leg.board_index] == leg.board
            && line.stops[leg.alight_index] == leg.alight
            && it.walks[k].last() == Some(&stop_pt(leg.board))
            && it.walks[k + 1].first() == Some(&stop_pt(leg.alight))
    })
}

fn transit_min_transfers() -> Outcome {
    let search = TransitSearch::default();
    let (r_first, r_next) = (search.radius(1), search.radius(2));
    let max_rides = search.max_levels - 2;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut total, mut found, mut infeasible) = (0, 0, 0, 0);
    let mut hist = [0usize; 8];
    for _ in 0..20 {
        let g = random_network(&mut rng);
        for _ in 0..10 {
            let ps = Point::new(rng.random_range(0.0..SPAN), rng.random_range(0.0..SPAN));
            let pe = Point::new(rng.random_range(0.0..SPAN), rng.random_range(0.0..SPAN));
            total += 1;
            let oracle = bfs_min_rides(&g, ps, pe, r_first, r_next, max_rides);
            let got = g.route(ps, pe, &search).ok();
            if let Some(it) = &got {
                found += 1;
                if !itinerary_is_feasible(&g, it, r_first, r_next) {
                    infeasible += 1;
                }
            }
            let got_transfers = got.as_ref().map(|it| it.transfers);
            if oracle.map(|r| r - 1) == got_transfers {
                agree += 1;
            }
            hist[oracle.map_or(0, |r| r.min(7))] += 1;
        }
    }
    outcome(
        agree == total && infeasible == 0,
        format!(
            "{agree}/{total} transfer counts agree, {found} itineraries, {infeasible} infeasible, rides histogram {hist:?}"
        ),
    )
}

// ---------------------------------------------------------------- agendas

fn pattern_shares() -> Outcome {
    let config = AgendaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..n {
        *counts.entry(sample_pattern(PersonClass::Adult, &config, &mut rng)).or_insert(0usize) += 1;
    }
    let table = [("HWH", 53.4), ("HWH*H", 10.3), ("HW*WH", 2.7), ("HWHWH", 27.1), ("HWHWH*H", 6.5)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (p, want) in table {
        let got = 100.0 * *counts.get(p).unwrap_or(&0) as f64 / n as f64;
        worst = worst.max((got - want).abs());
        parts.push(format!("{p} {got:.2}"));
    }
    let others = counts.keys().filter(|k| !table.iter().any(|t| t.0 == k.as_str())).count();
    outcome(
        worst <= 1.0 && others == 0,
        format!("{}; max deviation {worst:.2} pp", parts.join(", ")),
    )
}

// ---------------------------------------------------------------- epidemic

fn closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_factor: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let sigma = 0.01 * 2f64.powi(i);
            let hours = 0.05 * 2f64.powi(j);
            let p = infection_probability(sigma, hours * 3600.0).unwrap();
            worst = worst.max((p - (1.0 - (-sigma * hours).exp())).abs());

            let steps = 1 + (i * 10 + j) % 17;
            let dt = hours * 3600.0 / steps as f64;
            let q = infection_probability(sigma, dt).unwrap();
            let multi = 1.0 - (1.0 - q).powi(steps);
            worst_factor = worst_factor.max((multi - p).abs());
        }
    }
    outcome(
        worst <= 1e-12 && worst_factor <= 1e-9,
        format!("max |p - (1 - e^-sT)| = {worst:.1e}, max multi-step gap = {worst_factor:.1e} over 100 points"),
    )
}

fn transmission_monte_carlo() -> Outcome {
    let reps = 100_000;
    let dt = 60.0;
    let steps = (2.0 * 3600.0 / dt) as usize;
    let pair = [
        Occupant {
            person: PersonId(0),
            status: InfectionStatus::Symptomatic,
            susceptibility: 1.0,
            immune: false,
        },
        Occupant {
            person: PersonId(1),
            status: InfectionStatus::Susceptible,
            susceptibility: 1.0,
            immune: false,
        },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, sigma) in [0.1, 0.3, 1.0].into_iter().enumerate() {
        let params = EpidemicParams::with_sigma(sigma);
        let mut rng = ChaCha8Rng::seed_from_u64(60 + k as u64);
        let mut infected = 0u64;
        for _ in 0..reps {
            let mut acc = ContactAccumulator::default();
            for _ in 0..steps {
                if !step_contacts(&ContactSpace::Vehicle, &pair, &mut acc, dt, &params, &mut rng).is_empty() {
                    infected += 1;
                    break;
                }
            }
        }
        let p = 1.0 - (-2.0 * sigma).exp();
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let got = infected as f64 / reps as f64;
        let z = (got - p) / se;
        pass &= z.abs() <= 3.0;
        parts.push(format!("sigma {sigma}: {got:.4} vs {p:.4} (z {z:+.2})"));
    }
    outcome(pass, parts.join("; "))
}

/// Kolmogorov-Smirnov distance of samples from the uniform law on [a, b].
fn ks_uniform(mut xs: Vec<f64>, a: f64, b: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - a) / (b - a)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn progression_durations() -> Outcome {
    let params = EpidemicParams::with_sigma(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 10_000;
    let day = 86_400.0;
    let (mut inc, mut sym, mut vac) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        let mut s = DiseaseState::default();
        let t0 = rng.random_range(0.0..day);
        s.infect(t0, &mut rng, &params).unwrap();
        let t = airsim::epidemic::progress_disease(&mut s, f64::INFINITY, &mut rng, &params);
        inc.push((t[0].time - t0) / day);
        sym.push((t[1].time - t[0].time) / day);

        let mut v = DiseaseState::default();
        v.vaccinate(t0, &mut rng, &params).unwrap();
        let t = airsim::epidemic::progress_disease(&mut v, f64::INFINITY, &mut rng, &params);
        vac.push((t[0].time - t0) / day);
    }
    // 1% critical value of the one-sample KS statistic.
    let bound = 1.63 / (n as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, xs, a, b) in [("incubation", inc, 1.0, 2.0), ("symptomatic", sym, 1.0, 7.0), ("vaccination", vac, 7.0, 21.0)] {
        let inside = xs.iter().filter(|&&x| x >= a - 1e-9 && x <= b + 1e-9).count();
        let d = ks_uniform(xs, a, b);
        pass &= inside == n && d < bound;
        parts.push(format!("{name} {inside}/{n} in [{a}, {b}] KS {d:.4}"));
    }
    outcome(pass, format!("{} (bound {bound:.4})", parts.join(", ")))
}

// ---------------------------------------------------------------- end to end

const TOY_AGENTS: usize = 500;
const TOY_DAYS: u32 = 60;

fn toy_world() -> World {
    generate_synthetic_city(&SyntheticCitySpec::toy(), 1).unwrap()
}

struct ToyRun {
    conserved: bool,
    audit: Vec<String>,
    attack_rate: f64,
    daily_prevalence: Vec<f64>,
    /// Times of seeding and infection events, ascending.
    case_times: Vec<f64>,
}

fn toy_run(world: &World, seed: u64, sigma: f64) -> ToyRun {
    let pop = synthesize_population(&world.city, &DemographicConfig::toy(TOY_AGENTS), seed).unwrap();
    let mut cfg = SimConfig::new(EpidemicParams::with_sigma(sigma), TOY_DAYS, seed);
    cfg.seeding = SeedSpec::Count(1);
    let mut sim = Simulation::new(world, pop, cfg).unwrap();
    let mut conserved = true;
    let mut daily = vec![0.0; TOY_DAYS as usize];
    let per_day = (86_400.0 / sim.config().dt_s) as usize;
    let mut tick = 0usize;
    while !sim.is_finished() {
        sim.step().unwrap();
        let r = sim.collect_statistics();
        conserved &= r.citywide.total() == TOY_AGENTS as u64
            && r.regions.values().map(|c| c.total()).sum::<u64>() == TOY_AGENTS as u64;
        let prevalent = r.citywide.get(InfectionStatus::Incubating) + r.citywide.get(InfectionStatus::Symptomatic);
        daily[(tick / per_day).min(TOY_DAYS as usize - 1)] += prevalent as f64 / per_day as f64;
        tick += 1;
    }
    let out = sim.finish();
    ToyRun {
        conserved,
        audit: audit_transitions(&out.events, TOY_AGENTS),
        attack_rate: out.summary.attack_rate,
        daily_prevalence: daily,
        case_times: out
            .events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Seed | EventKind::Infection))
            .map(|e| e.time)
            .collect(),
    }
}

/// Rises then declines with one dominant peak: the 3-day moving average
/// climbs more than 15% of its peak above its start, ends more than 15% of
/// the peak below it, and never moves against the trend by more than that.
fn single_peak(daily: &[f64]) -> bool {
    let smooth: Vec<f64> = (0..daily.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(daily.len());
            daily[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let peak = smooth.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return false;
    }
    let tol = 0.15 * peak;
    let at = smooth.iter().position(|&x| x == peak).unwrap();
    let rises = peak - smooth[0] > tol;
    let declines = peak - smooth[smooth.len() - 1] > tol;
    let mut high = 0.0f64;
    let up_ok = smooth[..=at].iter().all(|&x| {
        high = high.max(x);
        x >= high - tol
    });
    let mut low = peak;
    let down_ok = smooth[at..].iter().all(|&x| {
        low = low.min(x);
        x <= low + tol
    });
    rises && declines && up_ok && down_ok
}

/// Final attack rate of a well-mixed SEIR model whose early exponential
/// growth rate matches `r` (per day), integrated with RK4.
fn seir_attack_rate(r: f64, n: f64, latent_days: f64, infectious_days: f64) -> f64 {
    let (kappa, gamma) = (1.0 / latent_days, 1.0 / infectious_days);
    let beta = (r + kappa) * (r + gamma) / kappa;
    let f = |y: [f64; 4]| {
        let inf = beta * y[0] * y[2] / n;
        [-inf, inf - kappa * y[1], kappa * y[1] - gamma * y[2], gamma * y[2]]
    };
    let mut y = [n - 1.0, 0.0, 1.0, 0.0];
    let h = 0.01;
    for _ in 0..(365.0 / h) as usize {
        let k1 = f(y);
        let k2 = f(std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]));
        let k3 = f(std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]));
        let k4 = f(std::array::from_fn(|i| y[i] + h * k3[i]));
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    1.0 - y[0] / n
}

/// Early growth rate per day from the times cumulative cases pass 10 and 100.
fn growth_rate(case_times: &[f64]) -> Option<f64> {
    let (t10, t100) = (case_times.get(9)?, case_times.get(99)?);
    Some(10f64.ln() / ((t100 - t10) / 86_400.0).max(1e-9))
}

fn toy_epidemic() -> Outcome {
    let world = toy_world();
    let seeds: Vec<u64> = (1..=20).collect();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(seeds.len());
    let runs: Vec<(u64, ToyRun)> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(seeds.len().div_ceil(threads))
            .map(|chunk| {
                let world = &world;
                s.spawn(move || chunk.iter().map(|&seed| (seed, toy_run(world, seed, 0.3))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let conserved = runs.iter().all(|(_, r)| r.conserved);
    let audit_ok = runs.iter().all(|(_, r)| r.audit.is_empty());
    let good = runs
        .iter()
        .filter(|(_, r)| single_peak(&r.daily_prevalence) && r.attack_rate > 0.0 && r.attack_rate < 1.0)
        .count();
    let rates: Vec<String> = runs.iter().map(|(_, r)| format!("{:.2}", r.attack_rate)).collect();
    // Well-mixed comparison: same growth rate, incubation and symptomatic means.
    let mut seir: Vec<(f64, f64)> = runs
        .iter()
        .filter_map(|(_, r)| growth_rate(&r.case_times).map(|g| (r.attack_rate, seir_attack_rate(g, TOY_AGENTS as f64, 1.5, 4.0))))
        .collect();
    seir.sort_by(|a, b| a.1.total_cmp(&b.1));
    let below = seir.iter().filter(|(abm, ode)| abm <= ode).count();
    let median_ode = seir.get(seir.len() / 2).map_or(f64::NAN, |x| x.1);
    outcome(
        conserved && audit_ok && good >= 18,
        format!(
            "conservation {}, audit {}, {good}/20 rise-and-decline single peak with attack rate in (0,1); \
             attack rates [{}]; matched well-mixed SEIR attack rate median {median_ode:.3}, bounds {below}/{} runs",
            if conserved { "holds" } else { "broken" },
            if audit_ok { "clean" } else { "violations" },
            rates.join(" "),
            seir.len()
        ),
    )
}

fn scenario_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/toy_scenario.toml")
}

fn determinism() -> Outcome {
    let cfg = load_scenario(&scenario_path()).unwrap();
    let logs: Vec<Vec<u8>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..3)
            .map(|_| {
                let cfg = &cfg;
                s.spawn(move || {
                    let run = run_scenario(cfg).unwrap();
                    let mut buf = Vec::new();
                    write_events(&mut buf, &run.output.events).unwrap();
                    buf
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let same = logs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same && !logs[0].is_empty(),
        format!("3 runs of the toy scenario, event logs of {} bytes, identical: {same}", logs[0].len()),
    )
}

fn zero_transmission() -> Outcome {
    let mut cfg = load_scenario(&scenario_path()).unwrap();
    cfg.epidemic.sigma_per_hour = 0.0;
    let run = run_scenario(&cfg).unwrap();
    let events = &run.output.events;
    let infections = events.iter().filter(|e| e.kind == EventKind::Infection).count();
    let seeded = events.iter().filter(|e| e.kind == EventKind::Seed).count();
    let ever = run.output.summary.final_counts.0.iter().zip(InfectionStatus::ALL).filter(|(_, s)| s.was_infected()).map(|(c, _)| *c).sum::<u64>();
    let want = cfg.seeding.count;
    outcome(
        infections == 0 && seeded == want && ever == want as u64 && run.output.summary.infections == 0,
        format!("{seeded} seeded, {ever} ever infected, {infections} infection events"),
    )
}
