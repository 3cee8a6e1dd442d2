//! Window movies: the ordered glues an assembly sequence presents across a
//! closed window, their bond-forming submovies, and splicing.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::atam::{replay, Assembly, AssemblySequence, AtamError, Glue, SequenceEvent, TileId, TileSystem};
use crate::grid::{Direction, Point};
use crate::windows::{encloses, partition, ClosedWindow};

/// A positive-strength glue shown across the cut of a window.
///
/// `vertex` is the cell of the tile showing the glue and `orientation` the
/// side it sits on. Seed tiles show their glues at step 0, the tile of
/// event `k` at step `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlueEvent {
    pub step: usize,
    pub vertex: Point,
    pub orientation: Direction,
    pub glue: Glue,
}

impl GlueEvent {
    /// Within one step, events order by orientation unit vector:
    /// W (-1,0) < S (0,-1) < N (0,1) < E (1,0).
    fn sort_key(&self) -> (usize, i64, i64, Point) {
        let v = self.orientation.delta();
        (self.step, v.x, v.y, self.vertex)
    }

    fn dump_line(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            self.step, self.vertex.x, self.vertex.y, self.orientation, self.glue.label, self.glue.strength
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowMovie {
    pub window: ClosedWindow,
    pub events: Vec<GlueEvent>,
}

/// Events of a movie whose glues end up in positive-strength bonds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BondFormingSubmovie {
    pub events: Vec<GlueEvent>,
}

fn dump(events: &[GlueEvent]) -> String {
    let mut out = String::new();
    for e in events {
        writeln!(out, "{}", e.dump_line()).unwrap();
    }
    out
}

impl WindowMovie {
    /// One line per event: `step x y orientation label strength`.
    pub fn dump(&self) -> String {
        dump(&self.events)
    }
}

impl BondFormingSubmovie {
    pub fn dump(&self) -> String {
        dump(&self.events)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

pub fn record_movie(seq: &AssemblySequence, w: &ClosedWindow) -> WindowMovie {
    let sys = &seq.system;
    let placements = sys
        .seed()
        .iter()
        .map(|(p, t)| (0, p, t))
        .chain(seq.events.iter().enumerate().map(|(k, e)| (k + 1, e.position, e.tile)));
    let mut events = Vec::new();
    for (step, p, t) in placements {
        let mut local: Vec<GlueEvent> = Direction::ALL
            .into_iter()
            .filter(|&d| w.crosses(p, d) && sys.tile(t).glue(d).strength > 0)
            .map(|d| GlueEvent { step, vertex: p, orientation: d, glue: sys.tile(t).glue(d).clone() })
            .collect();
        local.sort_by_key(GlueEvent::sort_key);
        events.extend(local);
    }
    // Seed tiles share step 0; keep the orientation rule across all of them.
    events.sort_by_key(GlueEvent::sort_key);
    WindowMovie { window: w.clone(), events }
}

/// Keeps the events whose cut edge carries a positive bond in `result`.
pub fn bond_forming(movie: &WindowMovie, sys: &TileSystem, result: &Assembly) -> BondFormingSubmovie {
    let events = movie
        .events
        .iter()
        .filter(|e| {
            result.get(e.vertex).is_some()
                && result
                    .get(e.orientation.apply(e.vertex))
                    .is_some_and(|n| e.glue.bond(sys.tile(n).glue(e.orientation.inverse())) > 0)
        })
        .cloned()
        .collect();
    BondFormingSubmovie { events }
}

/// `a + c = b` event by event, including which neighbors share a step.
pub fn translates_to(a: &[GlueEvent], b: &[GlueEvent], c: Point) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.vertex + c == y.vertex && x.orientation == y.orientation && x.glue == y.glue)
        && a.windows(2).zip(b.windows(2)).all(|(x, y)| (x[0].step == x[1].step) == (y[0].step == y[1].step))
}

/// The nonzero `c` with `a + c = b`, if one exists.
pub fn match_up_to_translation(a: &BondFormingSubmovie, b: &BondFormingSubmovie) -> Option<Point> {
    let (first_a, first_b) = (a.events.first()?, b.events.first()?);
    let c = first_b.vertex - first_a.vertex;
    (c != Point::ORIGIN && translates_to(&a.events, &b.events, c)).then_some(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpliceError {
    #[error("zero translation")]
    ZeroTranslation,
    #[error("movie mismatch: bond-forming submovies do not agree under the translation")]
    MovieMismatch,
    #[error("enclosure: translated window is not enclosed in the target window")]
    Enclosure,
    #[error("seed placement: {0}")]
    SeedPlacement(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error("internal: spliced sequence failed replay: {0}")]
    Replay(AtamError),
}

/// Replace the inside of `w2` by the inside of `w` moved by `c`.
///
/// Interleaves the outside-of-`w2` steps with the translated inside-of-`w`
/// steps so that each glue on the matched bond-forming movie appears in its
/// original order, then drains the inside steps, then the outside ones.
/// The result is `α'_O ∪ (α_I + c)` and is checked by replay.
pub fn splice(
    seq: &AssemblySequence,
    w: &ClosedWindow,
    w2: &ClosedWindow,
    c: Point,
) -> Result<AssemblySequence, SpliceError> {
    if c == Point::ORIGIN {
        return Err(SpliceError::ZeroTranslation);
    }
    let sys = &seq.system;
    let result = &seq.result;
    for (p, _) in sys.seed().iter() {
        match (w.contains(p), w2.contains(p)) {
            (false, false) => {}
            (true, true) => {
                return Err(SpliceError::SeedPlacement(format!("seed tile {p} lies inside both windows")))
            }
            _ => return Err(SpliceError::SeedPlacement(format!("seed tile {p} lies inside exactly one window"))),
        }
    }
    if !encloses(w2, &w.translate(c)) {
        return Err(SpliceError::Enclosure);
    }
    let m = bond_forming(&record_movie(seq, w), sys, result);
    let m2 = bond_forming(&record_movie(seq, w2), sys, result);
    if !translates_to(&m.events, &m2.events, c) {
        return Err(SpliceError::MovieMismatch);
    }
    let (a_in, _) = partition(result, w);
    let (_, a2_out) = partition(result, w2);
    let moved = a_in.translate(c);
    if let Some((p, _)) = moved.iter().find(|(p, _)| a2_out.contains(*p)) {
        return Err(SpliceError::Internal(format!("translated inside meets the outside of the target window at {p}")));
    }

    let steps = &seq.events;
    let mut out = Builder { gamma: Vec::new(), placed: sys.seed().iter().map(|(p, _)| p).collect() };
    let missing = || SpliceError::Internal("movie position absent from the sequence".into());
    let (mut i, mut j) = (0usize, 0usize);
    for (ev, ev2) in m.events.iter().zip(&m2.events) {
        if a2_out.contains(ev2.vertex) {
            if out.placed.contains(&ev2.vertex) {
                continue;
            }
            loop {
                let s = steps.get(i).ok_or_else(missing)?;
                i += 1;
                if a2_out.contains(s.position) {
                    out.emit(s.position, s.tile);
                }
                if s.position == ev2.vertex {
                    break;
                }
            }
        } else {
            if out.placed.contains(&(ev.vertex + c)) {
                continue;
            }
            loop {
                let s = steps.get(j).ok_or_else(missing)?;
                j += 1;
                if a_in.contains(s.position) {
                    out.emit(s.position + c, s.tile);
                }
                if s.position == ev.vertex {
                    break;
                }
            }
        }
    }
    for s in &steps[j.min(steps.len())..] {
        if a_in.contains(s.position) {
            out.emit(s.position + c, s.tile);
        }
    }
    for s in &steps[i.min(steps.len())..] {
        if a2_out.contains(s.position) {
            out.emit(s.position, s.tile);
        }
    }
    let gamma = out.gamma;
    let spliced = replay(sys, &gamma).map_err(SpliceError::Replay)?;
    let expected = a2_out.union(&moved).ok_or_else(|| SpliceError::Internal("parts disagree".into()))?;
    let seeded = expected.union(sys.seed()).ok_or_else(|| SpliceError::Internal("seed disagrees".into()))?;
    if spliced != seeded {
        return Err(SpliceError::Internal("spliced result differs from the expected union".into()));
    }
    Ok(AssemblySequence { system: sys.clone(), events: gamma, result: spliced, clipped: Vec::new() })
}

struct Builder {
    gamma: Vec<SequenceEvent>,
    placed: HashSet<Point>,
}

impl Builder {
    fn emit(&mut self, position: Point, tile: TileId) {
        self.placed.insert(position);
        self.gamma.push(SequenceEvent { index: self.gamma.len(), position, tile });
    }
}
