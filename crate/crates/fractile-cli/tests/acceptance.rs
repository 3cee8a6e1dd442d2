//! Acceptance suite: one line per criterion, then a single verdict.
//!
//! Run with `cargo test -p fractile-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fractile::atam::{
    frontier, is_tau_stable, replay, run, Assembly, Glue, Policy, Region, TileSystem, TileType,
};
use fractile::dssf::{
    self, bridges, census, free_point_east, free_point_north, free_point_northeast, is_tree_fractal_generator,
    select_pier_anchor, stage_property, BridgeKind, Generator,
};
use fractile::fixtures;
use fractile::grid::{components, extents, Direction, Point, PointSet};
use fractile::movies::{splice, SpliceError};
use fractile::windows::{encloses, enclosure_slack, partition, translation, window_profile, ClosedWindow, WindowSpec};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tree_generators(max_side: i64) -> Vec<Generator> {
    (2..=max_side)
        .flat_map(|g| census(g, true, |_| false).unwrap().entries)
        .filter(|e| e.tree_fractal)
        .map(|e| e.generator)
        .collect()
}

fn translation_arithmetic() -> Check {
    let t = translation(1, 4, 2, 3, 0, 1, 3, 2).map_err(|e| e.to_string())?;
    ensure(t == Point::new(9, 18), || format!("got {t}"))?;
    Ok(format!("t = {t}"))
}

fn enclosure_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cases = 0;
    for c in 1..=2 {
        for g in 2..=4 {
            for j in 3..=4 {
                for i in 2..j {
                    for _ in 0..12 {
                        let [e, f, p, q] = [(); 4].map(|_| rng.gen_range(0..g));
                        let spec = |s| WindowSpec { c, s, g, e, f, p, q };
                        let wi = spec(i).window().map_err(|e| e.to_string())?;
                        let wj = spec(j).window().map_err(|e| e.to_string())?;
                        let t = translation(c, g, i, j, e, f, p, q).map_err(|e| e.to_string())?;
                        let m = enclosure_slack(c, g, i, j).map_err(|e| e.to_string())?;
                        for (x, y) in [(0, 0), (0, m), (m, 0), (m, m)] {
                            let moved = wi.translate(t + Point::new(x, y));
                            ensure(encloses(&wj, &moved), || format!("c={c} g={g} {i}->{j} ({e},{f},{p},{q}) x={x} y={y}"))?;
                        }
                        for (x, y) in [(m + 1, 0), (0, m + 1)] {
                            let moved = wi.translate(t + Point::new(x, y));
                            ensure(!encloses(&wj, &moved), || format!("enclosed past the slack at x={x} y={y}"))?;
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    ensure(cases >= 200, || format!("only {cases} cases"))?;
    Ok(format!("{cases} anchor cases"))
}

/// Validity straight from the definition.
fn valid_mask(g: i64, mask: u64) -> bool {
    let has = |x: i64, y: i64| mask & (1 << (y * g + x)) != 0;
    has(0, 0) && (0..g).all(|k| (0..g).any(|x| has(x, k)) && (0..g).any(|y| has(k, y)))
}

fn census_g2() -> Check {
    let report = census(2, false, |g| dssf::piers(g).len() >= 2).map_err(|e| e.to_string())?;
    let oracle = (0u64..16).filter(|&m| valid_mask(2, m)).count();
    ensure(oracle == 5 && report.valid() == 5, || format!("valid {} oracle {oracle}", report.valid()))?;
    ensure(report.tree_fractal() == 3, || format!("tree-fractal {}", report.tree_fractal()))?;
    let few = report.entries.iter().filter(|e| e.tree_fractal && !e.predicate).count();
    ensure(few == 0, || format!("{few} tree-fractal generators with fewer than 2 piers"))?;
    Ok("5 valid, 3 tree-fractal, all with at least 2 piers".into())
}

/// Tree test by BFS plus the edge count, independent of the library.
fn tree_oracle(s: &PointSet) -> bool {
    let Some(start) = s.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut edges = 0;
    while let Some(p) = queue.pop_front() {
        for q in [Point::new(p.x + 1, p.y), Point::new(p.x - 1, p.y), Point::new(p.x, p.y + 1), Point::new(p.x, p.y - 1)] {
            if s.contains(q) {
                edges += 1;
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    seen.len() == s.len() && edges / 2 == s.len() - 1
}

fn characterization() -> Check {
    let mut gens: Vec<Generator> = (0u64..16).filter_map(|m| Generator::from_mask(2, m).ok()).collect();
    for g in &gens {
        let claim = is_tree_fractal_generator(g).ok;
        let oracle = tree_oracle(&dssf::stage(g, 3).map_err(|e| e.to_string())?);
        ensure(claim == oracle, || format!("g=2 mask {:#b}: claim {claim} oracle {oracle}", g.mask()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut random = 0;
    while random < 150 {
        if let Ok(g) = Generator::from_mask(3, rng.gen_range(0u64..512)) {
            gens.push(g);
            random += 1;
        }
    }
    gens.extend(tree_generators(3));
    let mut implied = 0;
    for g in &gens {
        if is_tree_fractal_generator(g).ok {
            for s in 1..=3 {
                let holds = stage_property(g, s).map_err(|e| e.to_string())?;
                ensure(holds, || format!("mask {:#b} side {} fails at stage {s}", g.mask(), g.g()))?;
                implied += 1;
            }
        }
    }
    Ok(format!("{} generators ({random} random side-3), {implied} stage checks", gens.len()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    North,
    NorthEast,
    East,
}

fn free_pre(side: Side, g: &Generator, comp: &PointSet) -> bool {
    let e = extents(g.cells()).unwrap();
    let connected = |kind| bridges(g.cells()).iter().any(|b| b.kind == kind && b.connected);
    let top = comp.iter().any(|p| p.y == e.t);
    let right = comp.iter().any(|p| p.x == e.r);
    let left = comp.iter().any(|p| p.x == e.l);
    let bottom = comp.iter().any(|p| p.y == e.b);
    match side {
        Side::North => connected(BridgeKind::Horizontal) && top && !left,
        Side::NorthEast => connected(BridgeKind::Vertical) && right && top && !bottom,
        Side::East => connected(BridgeKind::Vertical) && right && !bottom,
    }
}

fn free_post(side: Side, g: &Generator, comp: &PointSet, p: Point) -> bool {
    let e = extents(g.cells()).unwrap();
    let base = g.contains(p) && !comp.contains(p);
    match side {
        Side::North => base && !g.contains(Point::new(p.x, p.y + 1)) && p.y < e.t,
        Side::NorthEast => base && p.y == e.t && p.x != e.r && !g.contains(Point::new(p.x + 1, p.y)),
        Side::East => base && !g.contains(Point::new(p.x + 1, p.y)) && p.x != e.r,
    }
}

fn free_points() -> Check {
    // Detach components by deleting one or two cells of a tree generator.
    let mut corpus: Vec<(Generator, PointSet)> = Vec::new();
    let mut seen = BTreeSet::new();
    for t in tree_generators(4) {
        let cells: Vec<Point> = t.cells().iter().collect();
        for a in 0..cells.len() {
            for b in a..cells.len() {
                let mut rest = t.cells().clone();
                rest.remove(cells[a]);
                rest.remove(cells[b]);
                let Ok(g) = Generator::new(t.g(), rest) else {
                    continue;
                };
                if !seen.insert((g.g(), g.mask())) {
                    continue;
                }
                let comps = components(g.cells());
                if comps.len() < 2 {
                    continue;
                }
                for c in comps {
                    corpus.push((g.clone(), c));
                }
            }
        }
    }
    let mut summary = Vec::new();
    for (side, name, f) in [
        (Side::North, "north", free_point_north as fn(&Generator, &PointSet) -> Result<Point, dssf::DssfError>),
        (Side::NorthEast, "northeast", free_point_northeast),
        (Side::East, "east", free_point_east),
    ] {
        let mut n = 0;
        for (g, c) in corpus.iter().filter(|(g, c)| free_pre(side, g, c)) {
            let p = f(g, c).map_err(|e| format!("{name}: mask {:#x} side {}: {e}", g.mask(), g.g()))?;
            let oracle: Vec<Point> = g.cells().iter().filter(|&q| free_post(side, g, c, q)).collect();
            ensure(oracle.contains(&p), || format!("{name}: {p} not in the brute-force set {oracle:?}"))?;
            n += 1;
        }
        ensure(n >= 20, || format!("{name}: only {n} fixture pairs"))?;
        summary.push(format!("{name} {n}"));
    }
    Ok(format!("pairs per side: {}", summary.join(", ")))
}

fn pier_anchor() -> Check {
    let mut checked = 0;
    for g in tree_generators(3) {
        let pa = select_pier_anchor(&g).map_err(|e| e.to_string())?;
        for c in 1..=2 {
            let w = pa.window(g.g(), c, 2).window().map_err(|e| e.to_string())?;
            let shape = dssf::scale(&dssf::stage(&g, 2).map_err(|e| e.to_string())?, c).map_err(|e| e.to_string())?;
            let deep = dssf::scale(&dssf::stage(&g, 3).map_err(|e| e.to_string())?, c).map_err(|e| e.to_string())?;
            for (label, s) in [("stage 2", &shape), ("stage 3", &deep)] {
                let prof = window_profile(s, &w);
                ensure(prof.free_sides.len() == 3 && prof.single_glue_line(c as usize), || {
                    format!("mask {:#b} side {} c={c} over {label}: {prof:?}", g.mask(), g.g())
                })?;
            }
            checked += 1;
        }
    }
    let s = fixtures::sierpinski();
    let pa = select_pier_anchor(&s).map_err(|e| e.to_string())?;
    let w = pa.window(2, 1, 2).window().map_err(|e| e.to_string())?;
    ensure(w.inside() == PointSet::from([(2, 1)]), || format!("inside {:?}", w.inside()))?;
    let x2 = dssf::stage(&s, 2).map_err(|e| e.to_string())?;
    let present: Vec<Direction> = Direction::ALL.into_iter().filter(|d| x2.contains(d.apply(Point::new(2, 1)))).collect();
    ensure(present == [Direction::S], || format!("neighbors {present:?}"))?;
    Ok(format!("{checked} (generator, scale) windows"))
}

fn frontier_oracle(sys: &TileSystem, alpha: &Assembly) -> Vec<(Point, usize)> {
    let e = extents(&alpha.domain()).unwrap();
    let mut out = Vec::new();
    for y in e.b - 1..=e.t + 1 {
        for x in e.l - 1..=e.r + 1 {
            let p = Point::new(x, y);
            if alpha.contains(p) {
                continue;
            }
            for (t, tile) in sys.tiles().iter().enumerate() {
                let strength: u32 = Direction::ALL
                    .into_iter()
                    .filter_map(|d| {
                        let n = alpha.get(d.apply(p))?;
                        let (a, b) = (&tile.glues[d.index()], &sys.tile(n).glues[d.inverse().index()]);
                        (a.strength > 0 && a.label == b.label && a.strength == b.strength).then_some(a.strength)
                    })
                    .sum();
                if strength >= sys.temperature() {
                    out.push((p, t));
                }
            }
        }
    }
    out.sort();
    out
}

/// Global min cut as the least `s`-`t` max flow (Edmonds–Karp).
fn stable_oracle(sys: &TileSystem, alpha: &Assembly, tau: u32) -> bool {
    let pts: Vec<(Point, usize)> = alpha.iter().collect();
    let n = pts.len();
    if n < 2 {
        return true;
    }
    let mut cap = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            let (pa, ta) = pts[a];
            let (pb, tb) = pts[b];
            if let Some(d) = Direction::from_delta(pb - pa) {
                let (ga, gb) = (&sys.tile(ta).glues[d.index()], &sys.tile(tb).glues[d.inverse().index()]);
                if ga.strength > 0 && ga == gb {
                    cap[a][b] = i64::from(ga.strength);
                }
            }
        }
    }
    let max_flow = |s: usize, t: usize| {
        let mut res = cap.clone();
        let mut flow = 0;
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[s] = s;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for v in 0..n {
                    if prev[v] == usize::MAX && res[u][v] > 0 {
                        prev[v] = u;
                        q.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return flow;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                push = push.min(res[prev[v]][v]);
                v = prev[v];
            }
            let mut v = t;
            while v != s {
                res[prev[v]][v] -= push;
                res[v][prev[v]] += push;
                v = prev[v];
            }
            flow += push;
        }
    };
    (1..n).all(|t| max_flow(0, t) >= i64::from(tau))
}

fn random_system(rng: &mut ChaCha8Rng) -> TileSystem {
    let labels = ["a", "b", "c"];
    let glue = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.3) {
            Glue::null()
        } else {
            Glue::new(labels[rng.gen_range(0..3)], rng.gen_range(1..=2))
        }
    };
    let mut tiles = vec![TileType::new("s", Glue::new("a", 2), Glue::new("b", 2), Glue::new("a", 2), Glue::new("b", 2))];
    for k in 0..5 {
        let [n, e, s, w] = [(); 4].map(|_| glue(rng));
        tiles.push(TileType::new(format!("r{k}"), n, e, s, w));
    }
    TileSystem::new(tiles, Assembly::singleton(Point::ORIGIN, 0), 2).unwrap()
}

fn simulator() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let one = TileSystem::new(
        vec![TileType::new("u", Glue::new("g", 1), Glue::new("g", 1), Glue::new("g", 1), Glue::new("g", 1))],
        Assembly::singleton(Point::ORIGIN, 0),
        1,
    )
    .unwrap();
    let mut systems = vec![one, fixtures::cooperation_system(), fixtures::ribbon_system(), fixtures::sierpinski_x2_path_run().0];
    systems.extend((0..6).map(|_| random_system(&mut rng)));
    let policies = [Policy::Lexicographic, Policy::Uniform { seed: 1 }, Policy::Uniform { seed: 2 }];
    let (mut assemblies, mut random_configs) = (0, 0);
    for sys in &systems {
        for policy in policies {
            let region = Region::new(Point::new(-6, -6), Point::new(6, 6));
            let seq = run(sys, &region, policy, 19).map_err(|e| e.to_string())?;
            ensure(replay(sys, &seq.events).map_err(|e| e.to_string())? == seq.result, || "replay differs".into())?;
            let prefixes: Vec<Assembly> = seq.prefixes().collect();
            for (k, pair) in prefixes.windows(2).enumerate() {
                let (a, b) = (&pair[0], &pair[1]);
                let grew = b.len() == a.len() + 1 && a.iter().all(|(p, t)| b.get(p) == Some(t));
                ensure(grew, || format!("step {k} is not a single-tile addition"))?;
            }
            for alpha in &prefixes {
                let mut got = frontier(sys, alpha, None);
                got.sort();
                ensure(got == frontier_oracle(sys, alpha), || format!("frontier differs at {} tiles", alpha.len()))?;
                for tau in 1..=2 {
                    ensure(is_tau_stable(sys, alpha, tau) == stable_oracle(sys, alpha, tau), || "stability differs".into())?;
                }
                assemblies += 1;
                // Same domain, arbitrary tiles: mostly unstable configurations.
                let mut scrambled = Assembly::new();
                for (p, _) in alpha.iter() {
                    scrambled.place(p, rng.gen_range(0..sys.tiles().len()));
                }
                for tau in 1..=2 {
                    let (got, want) = (is_tau_stable(sys, &scrambled, tau), stable_oracle(sys, &scrambled, tau));
                    ensure(got == want, || format!("stability differs on a scrambled {}-tile configuration", scrambled.len()))?;
                }
                random_configs += 1;
            }
        }
    }
    Ok(format!("{} systems, {assemblies} producible and {random_configs} scrambled assemblies", systems.len()))
}

fn splice_ribbon() -> Check {
    let (_, seq) = fixtures::ribbon_run(12);
    let sq = |x, y, n| ClosedWindow::square(Point::new(x, y), n).unwrap();
    let (w, w2, c) = (sq(0, 2, 2), sq(0, 4, 2), Point::new(0, 2));
    let out = splice(&seq, &w, &w2, c).map_err(|e| e.to_string())?;
    let replayed = replay(&seq.system, &out.events).map_err(|e| e.to_string())?;
    let (inside, _) = partition(&seq.result, &w);
    let (_, outside) = partition(&seq.result, &w2);
    let want = outside.domain().union(&inside.domain().translate(c));
    ensure(replayed.domain() == want, || "spliced domain differs".into())?;
    let zero = splice(&seq, &w, &w2, Point::ORIGIN);
    ensure(zero == Err(SpliceError::ZeroTranslation), || format!("zero translation: {zero:?}"))?;
    let loose = splice(&seq, &sq(-1, 2, 2), &w2, c);
    ensure(loose == Err(SpliceError::Enclosure), || format!("non-enclosure: {loose:?}"))?;
    let seeded = splice(&seq, &sq(0, 0, 2), &w2, c);
    ensure(matches!(seeded, Err(SpliceError::SeedPlacement(_))), || format!("seed misplacement: {seeded:?}"))?;
    Ok(format!("{} steps replayed; zero, enclosure and seed violations rejected", out.events.len()))
}

fn end_to_end() -> Check {
    let data = |n: &str| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(n);
    let cert = std::env::temp_dir().join(format!("fractile-acceptance-{}.cert", std::process::id()));
    let refute = |tas: &str, out: Option<&PathBuf>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fractile"));
        cmd.arg("refute").arg(data("sierpinski.gen")).arg(data(tas)).args(["--scale", "1", "--max-stage", "4", "--seed", "1"]);
        if let Some(p) = out {
            cmd.arg("--out").arg(p);
        }
        cmd.env_remove("FRACTILE_CELL_CAP").output().map_err(|e| e.to_string())
    };
    let o = refute("sierpinski_uniform.tas", Some(&cert))?;
    ensure(o.status.code() == Some(0), || format!("uniform fixture exit {:?}", o.status.code()))?;
    let text = std::fs::read_to_string(&cert).map_err(|e| e.to_string())?;
    ensure(text.lines().any(|l| l == "replay ok"), || "certificate lacks `replay ok`".into())?;
    let witnesses: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("domain-diff "))
        .and_then(|v| v.parse().ok())
        .ok_or("certificate lacks a domain-diff count")?;
    ensure(witnesses > 0, || "empty domain-diff".into())?;
    let o = refute("sierpinski_indexed.tas", None)?;
    ensure(o.status.code() == Some(3), || format!("indexed fixture exit {:?}", o.status.code()))?;
    let report = String::from_utf8_lossy(&o.stdout);
    let distinct: usize = report
        .lines()
        .find_map(|l| l.strip_prefix("distinct-submovies "))
        .and_then(|v| v.parse().ok())
        .ok_or("report lacks a distinct-submovies count")?;
    ensure(distinct >= 2, || format!("{distinct} distinct submovies"))?;
    Ok(format!("certificate with {witnesses} witnesses; no-match report with {distinct} submovies"))
}

type Criterion = (&'static str, fn() -> Check, Duration);

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("translation arithmetic", translation_arithmetic, Duration::from_secs(1)),
        ("enclosure side suite", enclosure_suite, Duration::from_secs(5)),
        ("side-2 census", census_g2, Duration::from_secs(1)),
        ("characterization cross-check", characterization, Duration::from_secs(10)),
        ("free-point contracts", free_points, Duration::from_secs(5)),
        ("pier-anchor soundness", pier_anchor, Duration::from_secs(5)),
        ("simulator conformance", simulator, Duration::from_secs(10)),
        ("closed window splice", splice_ribbon, Duration::from_secs(5)),
        ("end-to-end refutation", end_to_end, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (k, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if took > budget {
                Err(format!("{detail}; took {took:.2?}, budget {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.2?})", k + 1),
            Err(why) => {
                println!("criterion {} {name}: FAIL ({why}; {took:.2?})", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
