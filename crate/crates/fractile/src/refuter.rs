//! Search for a splice counterexample: a pair of pier windows whose
//! bond-forming submovies agree, spliced into an assembly the candidate
//! system can produce but that is not the scaled fractal.

use rayon::prelude::*;
use thiserror::Error;

use crate::atam::{run, AssemblySequence, AtamError, Policy, Region, TileSystem};
use crate::dssf::{self, is_tree_fractal_generator, select_pier_anchor, DssfError, Generator, PierAnchor};
use crate::grid::{Direction, Point, PointSet};
use crate::movies::{bond_forming, record_movie, splice, translates_to, BondFormingSubmovie, GlueEvent};
use crate::windows::{enclosure_slack, partition, translation, ClosedWindow, WindowError, WindowSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefuteError {
    #[error("characterization failed: {0}")]
    Characterization(String),
    #[error("region too small")]
    RegionTooSmall,
    #[error("scale must be at least 1, got {0}")]
    BadScale(i64),
    #[error("max stage must be at least 3, got {0}")]
    BadMaxStage(i64),
    #[error("arithmetic overflow")]
    Overflow,
    #[error(transparent)]
    Dssf(#[from] DssfError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Atam(#[from] AtamError),
}

/// `t^(2c) · (2c)!` for `t` glue types: the orderings of glues over the
/// `2c` slots of a length-`c` line, counting both sides of each cut edge.
pub fn glue_line_bound_for(glue_types: u64, c: i64) -> Result<u128, RefuteError> {
    if c < 1 {
        return Err(RefuteError::BadScale(c));
    }
    let slots = u32::try_from(2 * c).map_err(|_| RefuteError::Overflow)?;
    let mut bound = u128::from(glue_types).checked_pow(slots).ok_or(RefuteError::Overflow)?;
    for k in 2..=u128::from(slots) {
        bound = bound.checked_mul(k).ok_or(RefuteError::Overflow)?;
    }
    Ok(bound)
}

pub fn glue_line_bound(system: &TileSystem, c: i64) -> Result<u128, RefuteError> {
    glue_line_bound_for(system.glue_types() as u64, c)
}

/// Shift carrying the glue line of `W^c_i`, moved by `translation`, onto
/// the glue line of `W^c_j`.
///
/// Along the glue side, the line of `W^c_s` sits `c·b·(1 + g + … + g^(s-3))`
/// cells from the window corner, `b` being the bridge offset, so the shift
/// there is `c·b·(g^(i-2) + … + g^(j-3))`. Across it, a line on the E or N
/// side also moves by the slack `m` between the window sides; a line on the
/// W or S side already shares the corner's coordinate.
pub fn alignment_offset(gen: &Generator, c: i64, i: i64, j: i64, pa: &PierAnchor) -> Result<Point, RefuteError> {
    if c < 1 {
        return Err(RefuteError::BadScale(c));
    }
    if i < 2 || j <= i {
        return Err(WindowError::BadOrder(i, j).into());
    }
    let g = gen.g();
    let mut sum = 0i64;
    for k in (i - 2)..=(j - 3) {
        let term = g.checked_pow(k as u32).ok_or(RefuteError::Overflow)?;
        sum = sum.checked_add(term).ok_or(RefuteError::Overflow)?;
    }
    let shift = pa
        .bridge_offset
        .checked_mul(c)
        .and_then(|v| v.checked_mul(sum))
        .ok_or(RefuteError::Overflow)?;
    let m = enclosure_slack(c, g, i, j)?;
    Ok(match pa.glue_side {
        Direction::W => Point::new(0, shift),
        Direction::E => Point::new(m, shift),
        Direction::S => Point::new(shift, 0),
        Direction::N => Point::new(shift, m),
    })
}

#[derive(Debug, Clone)]
pub struct RefutationConfig {
    pub generator: Generator,
    pub c: i64,
    pub system: TileSystem,
    pub max_stage: i64,
    /// `None` sizes the region to the `c·g^max_stage` square at the origin.
    pub region: Option<Region>,
    pub policy: Policy,
}

impl RefutationConfig {
    pub const DEFAULT_MAX_STAGE: i64 = 6;

    pub fn new(generator: Generator, c: i64, system: TileSystem) -> Self {
        RefutationConfig { generator, c, system, max_stage: Self::DEFAULT_MAX_STAGE, region: None, policy: Policy::Uniform { seed: 0 } }
    }
}

#[derive(Debug, Clone)]
pub struct SpliceCertificate {
    pub generator: Generator,
    pub c: i64,
    pub temperature: u32,
    pub policy: Policy,
    pub pier_anchor: PierAnchor,
    pub i: i64,
    pub j: i64,
    pub w_i: WindowSpec,
    pub w_j: WindowSpec,
    pub translation: Point,
    pub alignment: Point,
    pub c_vec: Point,
    pub submovie: BondFormingSubmovie,
    /// Points of `dom(spliced) Δ (T^c ∩ region)`, ascending.
    pub spliced_domain_diff: Vec<Point>,
    pub replay_ok: bool,
    pub spliced: AssemblySequence,
}

/// Outcome when no usable window pair exists up to `max_stage`. This is a
/// resource limit of the search, not evidence that the system is correct.
#[derive(Debug, Clone)]
pub struct NoMatchReport {
    pub max_stage: i64,
    /// One representative per translation class, with the stages showing it.
    pub distinct_submovies: Vec<(Vec<i64>, BondFormingSubmovie)>,
    /// Pairs with matching submovies that could not be used, and why.
    pub skipped: Vec<(i64, i64, String)>,
}

#[derive(Debug, Clone)]
pub enum Refutation {
    Certificate(Box<SpliceCertificate>),
    NoMatch(NoMatchReport),
}

/// Translation-free key of a submovie: positions relative to the first
/// event and steps replaced by their rank.
type MovieKey = Vec<(Point, Direction, String, u32, usize)>;

fn movie_key(m: &BondFormingSubmovie) -> MovieKey {
    let Some(first) = m.events.first() else {
        return Vec::new();
    };
    let mut rank = 0usize;
    let mut out = Vec::with_capacity(m.events.len());
    for (k, e) in m.events.iter().enumerate() {
        if k > 0 && e.step != m.events[k - 1].step {
            rank += 1;
        }
        let GlueEvent { vertex, orientation, glue, .. } = e;
        out.push((*vertex - first.vertex, *orientation, glue.label.clone(), glue.strength, rank));
    }
    out
}

fn target_in_region(gen: &Generator, c: i64, region: &Region) -> Result<PointSet, RefuteError> {
    let reach = region.max.x.max(region.max.y).max(0);
    let mut s = 1;
    while c.checked_mul(gen.g().checked_pow(s as u32).ok_or(RefuteError::Overflow)?).ok_or(RefuteError::Overflow)? <= reach {
        s += 1;
    }
    let shape = dssf::scale(&dssf::stage(gen, s)?, c)?;
    Ok(shape.iter().filter(|&p| region.contains(p)).collect())
}

pub fn refute(cfg: &RefutationConfig) -> Result<Refutation, RefuteError> {
    let gen = &cfg.generator;
    let check = is_tree_fractal_generator(gen);
    if !check.ok {
        return Err(RefuteError::Characterization(check.diagnosis.unwrap_or_else(|| "unknown".into())));
    }
    if cfg.c < 1 {
        return Err(RefuteError::BadScale(cfg.c));
    }
    if cfg.max_stage < 3 {
        return Err(RefuteError::BadMaxStage(cfg.max_stage));
    }
    let g = gen.g();
    let side = u32::try_from(cfg.max_stage)
        .ok()
        .and_then(|s| g.checked_pow(s))
        .and_then(|v| v.checked_mul(cfg.c))
        .ok_or(RefuteError::Overflow)?;
    let needed = Region::square(side);
    let region = cfg.region.unwrap_or(needed);
    if !region.contains(needed.min) || !region.contains(needed.max) {
        return Err(RefuteError::RegionTooSmall);
    }

    let pa = select_pier_anchor(gen)?;
    let sys = &cfg.system;
    let seq = run(sys, &region, cfg.policy, region.area() as usize)?;

    let stages: Vec<i64> = (2..=cfg.max_stage).collect();
    let windows: Vec<(WindowSpec, ClosedWindow)> = stages
        .iter()
        .map(|&s| {
            let spec = pa.window(g, cfg.c, s);
            spec.window().map(|w| (spec, w))
        })
        .collect::<Result<_, _>>()?;
    let movies: Vec<BondFormingSubmovie> =
        windows.par_iter().map(|(_, w)| bond_forming(&record_movie(&seq, w), sys, &seq.result)).collect();
    let seed_in: Vec<bool> = windows.iter().map(|(_, w)| sys.seed().iter().any(|(p, _)| w.contains(p))).collect();
    // Windows at different stages are disjoint unless every anchor
    // coordinate is 0, so the seed lies in at most one of them otherwise.
    let last_seed_window = seed_in.iter().rposition(|&b| b);

    let mut target: Option<PointSet> = None;
    let mut skipped = Vec::new();
    for (a, &i) in stages.iter().enumerate() {
        for (b, &j) in stages.iter().enumerate().skip(a + 1) {
            if last_seed_window.is_some_and(|k| a <= k) {
                continue;
            }
            let (m_i, m_j) = (&movies[a], &movies[b]);
            if m_i.is_empty() || movie_key(m_i) != movie_key(m_j) {
                continue;
            }
            let t = translation(cfg.c, g, i, j, pa.anchor.x, pa.anchor.y, pa.pier.position.x, pa.pier.position.y)?;
            let align = alignment_offset(gen, cfg.c, i, j, &pa)?;
            let c_vec = t + align;
            if !translates_to(&m_i.events, &m_j.events, c_vec) {
                skipped.push((i, j, format!("submovies agree only under a translation other than {c_vec}")));
                continue;
            }
            let (w_i, w_j) = (&windows[a].1, &windows[b].1);
            let (in_i, _) = partition(&seq.result, w_i);
            let (in_j, _) = partition(&seq.result, w_j);
            if in_i.translate(c_vec) == in_j {
                skipped.push((i, j, "window interiors are identical".into()));
                continue;
            }
            let spliced = match splice(&seq, w_i, w_j, c_vec) {
                Ok(s) => s,
                Err(e) => {
                    skipped.push((i, j, e.to_string()));
                    continue;
                }
            };
            let target = match &target {
                Some(t) => t,
                None => target.insert(target_in_region(gen, cfg.c, &region)?),
            };
            let diff: Vec<Point> = spliced.result.domain().symmetric_difference(target).iter().collect();
            if diff.is_empty() {
                skipped.push((i, j, "spliced assembly has the target shape".into()));
                continue;
            }
            let replay_ok = crate::atam::replay(sys, &spliced.events).is_ok_and(|r| r == spliced.result);
            return Ok(Refutation::Certificate(Box::new(SpliceCertificate {
                generator: gen.clone(),
                c: cfg.c,
                temperature: sys.temperature(),
                policy: cfg.policy,
                pier_anchor: pa,
                i,
                j,
                w_i: windows[a].0,
                w_j: windows[b].0,
                translation: t,
                alignment: align,
                c_vec,
                submovie: m_i.clone(),
                spliced_domain_diff: diff,
                replay_ok,
                spliced,
            })));
        }
    }

    let mut distinct: Vec<(Vec<i64>, BondFormingSubmovie, MovieKey)> = Vec::new();
    for (&s, m) in stages.iter().zip(&movies) {
        let key = movie_key(m);
        match distinct.iter_mut().find(|(_, _, k)| *k == key) {
            Some((ss, _, _)) => ss.push(s),
            None => distinct.push((vec![s], m.clone(), key)),
        }
    }
    Ok(Refutation::NoMatch(NoMatchReport {
        max_stage: cfg.max_stage,
        distinct_submovies: distinct.into_iter().map(|(s, m, _)| (s, m)).collect(),
        skipped,
    }))
}
