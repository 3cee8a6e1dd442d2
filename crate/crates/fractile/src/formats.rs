//! Text formats: `.tas` tile systems, stage grids, SVG renderings,
//! certificates and no-match reports.
//!
//! A `.tas` file is line oriented; `#` starts a comment line.
//!
//! ```text
//! temperature 2
//! tile O N=n:2 E=e:2 S=-:0 W=-:0
//! seed 0 0 O
//! ```
//!
//! Glues are `label:strength`; a bare `-` reads as the null glue `-:0`.
//! [`write_tas`] emits the canonical form, which [`parse_tas`] reads back
//! to an equal system and [`write_tas`] reproduces byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::atam::{Assembly, AtamError, Glue, SequenceEvent, TileSystem, TileType};
use crate::dssf::render_rows;
use crate::grid::{extents, Direction, Point, PointSet};
use crate::refuter::{NoMatchReport, SpliceCertificate};
use crate::windows::ClosedWindow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot write {0:?}: names and labels must be nonempty and free of whitespace and `#`")]
    Token(String),
    #[error("rendering {cells} cells exceeds the cap of {cap}; try a smaller stage or scale, or raise FRACTILE_CELL_CAP")]
    CellCap { cells: u128, cap: u128 },
    #[error(transparent)]
    Atam(#[from] AtamError),
}

/// Cell budget for a single rendering unless overridden.
pub const DEFAULT_CELL_CAP: u128 = 1 << 22;

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn parse_glue(line: usize, tok: &str, d: Direction) -> Result<Glue, FormatError> {
    let prefix = format!("{d}=");
    let body = tok.strip_prefix(&prefix).ok_or_else(|| parse_err(line, format!("expected `{prefix}<glue>`, found {tok:?}")))?;
    if body == Glue::NULL_LABEL {
        return Ok(Glue::null());
    }
    let (label, strength) =
        body.rsplit_once(':').ok_or_else(|| parse_err(line, format!("glue {body:?} lacks `:strength`")))?;
    if label.is_empty() {
        return Err(parse_err(line, "empty glue label"));
    }
    let strength = strength.parse().map_err(|_| parse_err(line, format!("bad strength {strength:?}")))?;
    Ok(Glue::new(label, strength))
}

pub fn parse_tas(text: &str) -> Result<TileSystem, FormatError> {
    let mut temperature = None;
    let mut tiles: Vec<TileType> = Vec::new();
    let mut seeds: Vec<(usize, Point, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["temperature", t] => {
                if temperature.is_some() {
                    return Err(parse_err(line, "temperature given twice"));
                }
                temperature = Some(t.parse::<u32>().map_err(|_| parse_err(line, format!("bad temperature {t:?}")))?);
            }
            ["tile", name, n, e, s, w] => {
                let glues = [
                    parse_glue(line, n, Direction::N)?,
                    parse_glue(line, e, Direction::E)?,
                    parse_glue(line, s, Direction::S)?,
                    parse_glue(line, w, Direction::W)?,
                ];
                tiles.push(TileType { name: name.to_string(), glues });
            }
            ["seed", x, y, name] => {
                let coord = |v: &str| v.parse::<i64>().map_err(|_| parse_err(line, format!("bad coordinate {v:?}")));
                seeds.push((line, Point::new(coord(x)?, coord(y)?), name.to_string()));
            }
            _ => return Err(parse_err(line, format!("unrecognized line {l:?}"))),
        }
    }
    let temperature = temperature.ok_or_else(|| parse_err(0, "missing `temperature` line"))?;
    let ids: BTreeMap<&str, usize> = tiles.iter().enumerate().map(|(i, t)| (t.name.as_str(), i)).collect();
    let mut seed = Assembly::new();
    for (line, p, name) in &seeds {
        let id = *ids.get(name.as_str()).ok_or_else(|| parse_err(*line, format!("seed names unknown tile {name:?}")))?;
        if !seed.place(*p, id) {
            return Err(parse_err(*line, format!("second seed tile at {p}")));
        }
    }
    Ok(TileSystem::new(tiles, seed, temperature)?)
}

fn token(s: &str) -> Result<&str, FormatError> {
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains('#') {
        Err(FormatError::Token(s.to_string()))
    } else {
        Ok(s)
    }
}

pub fn write_tas(sys: &TileSystem) -> Result<String, FormatError> {
    let mut out = format!("temperature {}\n", sys.temperature());
    for t in sys.tiles() {
        write!(out, "tile {}", token(&t.name)?).unwrap();
        for d in Direction::ALL {
            let g = t.glue(d);
            write!(out, " {d}={}:{}", token(&g.label)?, g.strength).unwrap();
        }
        out.push('\n');
    }
    for (p, t) in sys.seed().iter() {
        writeln!(out, "seed {} {} {}", p.x, p.y, sys.tile(t).name).unwrap();
    }
    Ok(out)
}

fn check_cap(cells: u128, cap: u128) -> Result<(), FormatError> {
    if cells > cap {
        Err(FormatError::CellCap { cells, cap })
    } else {
        Ok(())
    }
}

/// The `side × side` box at the origin in generator syntax.
pub fn grid_text(shape: &PointSet, side: i64, cap: u128) -> Result<String, FormatError> {
    check_cap((side as u128).pow(2), cap)?;
    Ok(format!("g={side}\n{}", render_rows(shape, side)))
}

/// Minimal SVG: one unit square per shape cell, window outlines and glue
/// line cells drawn on top. The origin is the bottom-left corner.
pub fn render_svg(shape: &PointSet, windows: &[ClosedWindow], glue_line: &[Point], cap: u128) -> Result<String, FormatError> {
    check_cap(shape.len() as u128, cap)?;
    let mut all: PointSet = shape.clone();
    for w in windows {
        let (c, n) = (w.corner(), w.side());
        all.insert(c);
        all.insert(c + Point::new(n - 1, n - 1));
    }
    for &p in glue_line {
        all.insert(p);
    }
    let (x0, y0, width, height) = match extents(&all) {
        Ok(e) => (e.l, e.b, e.r - e.l + 1, e.t - e.b + 1),
        Err(_) => (0, 0, 1, 1),
    };
    let flip = |p: Point, h: i64| (p.x - x0, y0 + height - p.y - h);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{}" height="{}">"#,
        width * 8,
        height * 8
    )
    .unwrap();
    for p in shape.iter() {
        let (x, y) = flip(p, 1);
        writeln!(out, r##"<rect class="shape" x="{x}" y="{y}" width="1" height="1" fill="#222"/>"##).unwrap();
    }
    for &p in glue_line {
        let (x, y) = flip(p, 1);
        writeln!(out, r##"<rect class="glue" x="{x}" y="{y}" width="1" height="1" fill="#1a7fd4"/>"##).unwrap();
    }
    for w in windows {
        let n = w.side();
        let (x, y) = flip(w.corner(), n);
        writeln!(
            out,
            r##"<rect class="window" x="{x}" y="{y}" width="{n}" height="{n}" fill="none" stroke="#d42a1a" stroke-width="0.15"/>"##
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// `x y tile` per event, in order.
pub fn sequence_text(sys: &TileSystem, events: &[SequenceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        writeln!(out, "{} {} {}", e.position.x, e.position.y, sys.tile(e.tile).name).unwrap();
    }
    out
}

pub fn certificate_text(cert: &SpliceCertificate) -> String {
    let pa = &cert.pier_anchor;
    let window_line = |w: &crate::windows::WindowSpec| match w.window() {
        Ok(cw) => format!("s={} corner={} side={}", w.s, cw.corner(), cw.side()),
        Err(e) => format!("s={} invalid: {e}", w.s),
    };
    let seq = &cert.spliced;
    let mut out = String::new();
    writeln!(out, "fractile splice certificate").unwrap();
    writeln!(out, "generator-sha256 {}", sha256_hex(cert.generator.to_text().as_bytes())).unwrap();
    writeln!(out, "scale {}", cert.c).unwrap();
    writeln!(out, "temperature {}", cert.temperature).unwrap();
    writeln!(out, "policy {}", cert.policy).unwrap();
    writeln!(out, "pier {}", pa.pier).unwrap();
    writeln!(out, "anchor {}", pa.anchor).unwrap();
    writeln!(out, "glue-side {}", pa.glue_side).unwrap();
    writeln!(out, "bridge-offset {}", pa.bridge_offset).unwrap();
    writeln!(out, "stages {} {}", cert.i, cert.j).unwrap();
    writeln!(out, "window-i {}", window_line(&cert.w_i)).unwrap();
    writeln!(out, "window-j {}", window_line(&cert.w_j)).unwrap();
    writeln!(out, "translation {}", cert.translation).unwrap();
    writeln!(out, "alignment {}", cert.alignment).unwrap();
    writeln!(out, "c-vec {}", cert.c_vec).unwrap();
    writeln!(out, "submovie {}", cert.submovie.len()).unwrap();
    out.push_str(&cert.submovie.dump());
    writeln!(out, "domain-diff {}", cert.spliced_domain_diff.len()).unwrap();
    for p in &cert.spliced_domain_diff {
        writeln!(out, "{} {}", p.x, p.y).unwrap();
    }
    writeln!(out, "replay {}", if cert.replay_ok { "ok" } else { "failed" }).unwrap();
    writeln!(out, "replay-steps {}", seq.events.len()).unwrap();
    writeln!(out, "replay-sha256 {}", sha256_hex(sequence_text(&seq.system, &seq.events).as_bytes())).unwrap();
    out
}

pub fn no_match_text(report: &NoMatchReport) -> String {
    let mut out = String::new();
    writeln!(out, "no matching window pair up to stage {}", report.max_stage).unwrap();
    writeln!(out, "distinct-submovies {}", report.distinct_submovies.len()).unwrap();
    for (stages, m) in &report.distinct_submovies {
        let list: Vec<String> = stages.iter().map(i64::to_string).collect();
        writeln!(out, "submovie stages={} events={}", list.join(","), m.len()).unwrap();
        out.push_str(&m.dump());
    }
    for (i, j, why) in &report.skipped {
        writeln!(out, "skipped {i} {j}: {why}").unwrap();
    }
    out
}
