//! `fractile`: command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 search
//! ended without a result.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fractile::atam::{run, Policy, Region, TileSystem};
use fractile::dssf::{self, census, is_tree_fractal_generator, parse_generator, piers, select_pier_anchor, BridgeKind, Generator};
use fractile::formats::{self, certificate_text, grid_text, no_match_text, parse_tas, render_svg, DEFAULT_CELL_CAP};
use fractile::grid::{Point, PointSet};
use fractile::movies::{bond_forming, record_movie};
use fractile::refuter::{refute, RefutationConfig, Refutation};
use fractile::windows::{window_profile, ClosedWindow};

#[derive(Parser)]
#[command(name = "fractile", version, about = "Self-similar tree fractals and tile self-assembly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check a generator and report bridges, piers and the chosen anchor.
    Analyze { generator: PathBuf },
    /// Write a stage of a generator, optionally scaled.
    Stages {
        generator: PathBuf,
        #[arg(long, default_value_t = 1)]
        stage: i64,
        #[arg(long, default_value_t = 1)]
        scale: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace every cell of a grid file by a block.
    Scale {
        grid: PathBuf,
        #[arg(long)]
        scale: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate every generator of one side length.
    Census {
        #[arg(long)]
        side: i64,
        /// Permit side 4 (65536 candidates).
        #[arg(long)]
        allow_side_4: bool,
        /// List each tree-fractal generator.
        #[arg(long)]
        list: bool,
    },
    /// Run a tile system in a square region at the origin.
    Simulate {
        tas: PathBuf,
        #[arg(long)]
        size: i64,
        /// Uniform policy seed; omit for the lexicographic policy.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a splice certificate against a candidate tile system.
    Refute {
        generator: PathBuf,
        tas: PathBuf,
        #[arg(long, default_value_t = 1)]
        scale: i64,
        #[arg(long, default_value_t = RefutationConfig::DEFAULT_MAX_STAGE)]
        max_stage: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the window movie of a run for the square window at `x,y`.
    Movie {
        tas: PathBuf,
        #[arg(long)]
        size: i64,
        #[arg(long, value_parser = parse_pair)]
        corner: (i64, i64),
        #[arg(long)]
        side: i64,
        #[arg(long)]
        seed: Option<u64>,
        /// Keep only the bond-forming events.
        #[arg(long)]
        bond_forming: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of a stage with its pier windows and glue lines.
    Render {
        generator: PathBuf,
        #[arg(long)]
        stage: i64,
        #[arg(long, default_value_t = 1)]
        scale: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `x,y`")?;
    let n = |v: &str| v.trim().parse::<i64>().map_err(|e| e.to_string());
    Ok((n(a)?, n(b)?))
}

/// Error carrying the exit code to report.
struct Failure {
    code: u8,
    msg: String,
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure { code: 2, msg: e.to_string() }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_generator(path: &Path) -> Result<Generator, Failure> {
    parse_generator(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_tas(path: &Path) -> Result<TileSystem, Failure> {
    parse_tas(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cell_cap() -> Result<u128, Failure> {
    match std::env::var("FRACTILE_CELL_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| input(format!("FRACTILE_CELL_CAP: not a count: {v:?}"))),
        Err(_) => Ok(DEFAULT_CELL_CAP),
    }
}

fn positive(name: &str, v: i64) -> Result<(), Failure> {
    if v < 1 {
        Err(input(format!("--{name} must be at least 1, got {v}")))
    } else {
        Ok(())
    }
}

fn policy(seed: Option<u64>) -> Policy {
    seed.map_or(Policy::Lexicographic, |seed| Policy::Uniform { seed })
}

fn scaled_stage(gen: &Generator, stage: i64, scale: i64, cap: u128) -> Result<(PointSet, i64), Failure> {
    positive("stage", stage)?;
    positive("scale", scale)?;
    let side = u32::try_from(stage)
        .ok()
        .and_then(|s| gen.g().checked_pow(s))
        .and_then(|v| v.checked_mul(scale))
        .ok_or_else(|| input("size overflows; try a smaller stage"))?;
    if (side as u128).pow(2) > cap {
        return Err(input(formats::FormatError::CellCap { cells: (side as u128).pow(2), cap }));
    }
    let shape = dssf::scale(&dssf::stage(gen, stage).map_err(input)?, scale).map_err(input)?;
    Ok((shape, side))
}

fn analyze(path: &Path) -> Outcome {
    let gen = read_generator(path)?;
    let s = gen.cells();
    let mut out = String::new();
    writeln!(out, "side: {}; cells: {}", gen.g(), s.len()).unwrap();
    writeln!(out, "tree: {}", if fractile::grid::is_tree(s) { "yes" } else { "no" }).unwrap();
    for b in dssf::bridges(s) {
        let kind = match b.kind {
            BridgeKind::Horizontal => "h-bridge row",
            BridgeKind::Vertical => "v-bridge column",
        };
        let link = if b.connected { "connected" } else { "not connected" };
        writeln!(out, "{kind} {}: {} {} {link}", b.index, b.endpoints.0, b.endpoints.1).unwrap();
    }
    writeln!(out, "nhb: {}; nvb: {}", dssf::nhb(s), dssf::nvb(s)).unwrap();
    let check = is_tree_fractal_generator(&gen);
    if !check.ok {
        writeln!(out, "tree-fractal: no; {}", check.diagnosis.unwrap_or_default()).unwrap();
        print!("{out}");
        return Ok(1);
    }
    let mut ps = piers(&gen);
    ps.sort_by_key(|p| (p.position.y, p.position.x));
    for p in &ps {
        writeln!(out, "pier {} kind {:?}", p, p.kind).unwrap();
    }
    let pa = select_pier_anchor(&gen).map_err(input)?;
    let listed: Vec<String> = ps.iter().map(ToString::to_string).collect();
    writeln!(
        out,
        "tree-fractal: yes; piers: {}; anchor: pier {}, (e,f)={}, glue side {}",
        listed.join(", "),
        pa.pier.position,
        pa.anchor,
        pa.glue_side
    )
    .unwrap();
    print!("{out}");
    Ok(0)
}

fn stages(path: &Path, stage: i64, scale: i64, format: Format, out: &Option<PathBuf>) -> Outcome {
    let gen = read_generator(path)?;
    let cap = cell_cap()?;
    let (shape, side) = scaled_stage(&gen, stage, scale, cap)?;
    let text = match format {
        Format::Text => grid_text(&shape, side, cap),
        Format::Svg => render_svg(&shape, &[], &[], cap),
    }
    .map_err(input)?;
    emit(out, &text)?;
    Ok(0)
}

/// Reads `g=<n>` followed by `n` rows of `#`/`.`, top row first.
fn parse_grid(text: &str) -> Result<(PointSet, i64), String> {
    let mut lines = text.lines();
    let n: i64 = lines
        .next()
        .and_then(|h| h.trim().strip_prefix("g="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or("expected `g=<int>` header")?;
    let rows: Vec<&str> = lines.map(str::trim_end).filter(|l| !l.is_empty()).collect();
    if rows.len() as i64 != n {
        return Err(format!("expected {n} rows, found {}", rows.len()));
    }
    let mut s = PointSet::new();
    for (k, row) in rows.iter().enumerate() {
        if row.chars().count() as i64 != n {
            return Err(format!("row {} has length {}, expected {n}", k + 1, row.chars().count()));
        }
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '#' => {
                    s.insert(Point::new(x as i64, n - 1 - k as i64));
                }
                '.' => {}
                other => return Err(format!("unexpected character {other:?}")),
            }
        }
    }
    Ok((s, n))
}

fn scale_cmd(path: &Path, scale: i64, out: &Option<PathBuf>) -> Outcome {
    positive("scale", scale)?;
    let (s, n) = parse_grid(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let side = n.checked_mul(scale).ok_or_else(|| input("size overflows"))?;
    let scaled = dssf::scale(&s, scale).map_err(input)?;
    emit(out, &grid_text(&scaled, side, cell_cap()?).map_err(input)?)?;
    Ok(0)
}

fn census_cmd(side: i64, allow: bool, list: bool) -> Outcome {
    let report = census(side, allow, |g| piers(g).len() >= 2).map_err(input)?;
    println!("side: {side}; candidates: {}", report.candidates);
    println!("valid: {}", report.valid());
    println!("tree-fractal: {}", report.tree_fractal());
    let few = report.entries.iter().filter(|e| e.tree_fractal && e.piers.len() < 2).count();
    println!("tree-fractal with fewer than 2 piers: {few}");
    for (kind, n) in &report.pier_histogram {
        println!("piers {kind:?}: {n}");
    }
    if list {
        for e in report.entries.iter().filter(|e| e.tree_fractal) {
            println!("mask {:#x}", e.generator.mask());
            print!("{}", e.generator.to_text());
        }
    }
    Ok(0)
}

fn simulate(path: &Path, size: i64, seed: Option<u64>, max_steps: Option<usize>, format: Format, out: &Option<PathBuf>) -> Outcome {
    positive("size", size)?;
    let sys = read_tas(path)?;
    let cap = cell_cap()?;
    if (size as u128).pow(2) > cap {
        return Err(input(formats::FormatError::CellCap { cells: (size as u128).pow(2), cap }));
    }
    let region = Region::square(size);
    let seq = run(&sys, &region, policy(seed), max_steps.unwrap_or(region.area() as usize)).map_err(input)?;
    let domain = seq.result.domain();
    let text = match format {
        Format::Text => {
            let mut t = format!("steps: {}; tiles: {}; clipped: {}\n", seq.events.len(), domain.len(), seq.clipped.len());
            t.push_str(&grid_text(&domain, size, cap).map_err(input)?);
            t
        }
        Format::Svg => render_svg(&domain, &[], &[], cap).map_err(input)?,
    };
    emit(out, &text)?;
    Ok(0)
}

struct MovieArgs<'a> {
    tas: &'a Path,
    size: i64,
    corner: (i64, i64),
    side: i64,
    seed: Option<u64>,
    bond_forming: bool,
}

fn movie(a: MovieArgs<'_>, out: &Option<PathBuf>) -> Outcome {
    positive("size", a.size)?;
    let w = ClosedWindow::square(Point::new(a.corner.0, a.corner.1), a.side).map_err(input)?;
    let sys = read_tas(a.tas)?;
    let region = Region::square(a.size);
    let seq = run(&sys, &region, policy(a.seed), region.area() as usize).map_err(input)?;
    let m = record_movie(&seq, &w);
    let text = if a.bond_forming { bond_forming(&m, &sys, &seq.result).dump() } else { m.dump() };
    emit(out, &text)?;
    Ok(0)
}

fn render(path: &Path, stage: i64, scale: i64, out: &Option<PathBuf>) -> Outcome {
    let gen = read_generator(path)?;
    let cap = cell_cap()?;
    let (shape, _) = scaled_stage(&gen, stage, scale, cap)?;
    let mut windows = Vec::new();
    let mut glue = Vec::new();
    if is_tree_fractal_generator(&gen).ok {
        let pa = select_pier_anchor(&gen).map_err(input)?;
        for s in 2..stage {
            let w = pa.window(gen.g(), scale, s).window().map_err(input)?;
            glue.extend(window_profile(&shape, &w).glue_pairs.iter().map(|&(inside, _)| inside));
            windows.push(w);
        }
    }
    emit(out, &render_svg(&shape, &windows, &glue, cap).map_err(input)?)?;
    Ok(0)
}

struct RefuteArgs<'a> {
    generator: &'a Path,
    tas: &'a Path,
    scale: i64,
    max_stage: i64,
    seed: u64,
}

fn refute_cmd(a: RefuteArgs<'_>, out: &Option<PathBuf>) -> Outcome {
    positive("scale", a.scale)?;
    let gen = read_generator(a.generator)?;
    let sys = read_tas(a.tas)?;
    let cfg = RefutationConfig {
        max_stage: a.max_stage,
        policy: Policy::Uniform { seed: a.seed },
        ..RefutationConfig::new(gen, a.scale, sys)
    };
    if let Ok(side) = u32::try_from(a.max_stage).map(|s| cfg.generator.g().checked_pow(s).and_then(|v| v.checked_mul(a.scale))) {
        let cap = cell_cap()?;
        if side.is_none_or(|v| (v as u128).pow(2) > cap) {
            return Err(input("region exceeds the cell cap; try a smaller --max-stage or raise FRACTILE_CELL_CAP"));
        }
    }
    match refute(&cfg).map_err(input)? {
        Refutation::Certificate(cert) => {
            emit(out, &certificate_text(&cert))?;
            if out.is_some() {
                eprintln!("certificate: stages {} {}, {} witness points", cert.i, cert.j, cert.spliced_domain_diff.len());
            }
            Ok(0)
        }
        Refutation::NoMatch(report) => {
            print!("{}", no_match_text(&report));
            Ok(3)
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze { generator } => analyze(&generator),
        Command::Stages { generator, stage, scale, format, out } => stages(&generator, stage, scale, format, &out),
        Command::Scale { grid, scale, out } => scale_cmd(&grid, scale, &out),
        Command::Census { side, allow_side_4, list } => census_cmd(side, allow_side_4, list),
        Command::Simulate { tas, size, seed, max_steps, format, out } => simulate(&tas, size, seed, max_steps, format, &out),
        Command::Refute { generator, tas, scale, max_stage, seed, out } => {
            refute_cmd(RefuteArgs { generator: &generator, tas: &tas, scale, max_stage, seed }, &out)
        }
        Command::Movie { tas, size, corner, side, seed, bond_forming, out } => {
            movie(MovieArgs { tas: &tas, size, corner, side, seed, bond_forming }, &out)
        }
        Command::Render { generator, stage, scale, out } => render(&generator, stage, scale, &out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
