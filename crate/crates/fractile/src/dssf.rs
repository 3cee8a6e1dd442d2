//! Discrete self-similar fractals: generators, stages, bridges, piers and
//! the tree-fractal characterization.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{self, extents, free_count, is_tree, path_within, Direction, Point, PointSet};
use crate::windows::{self, WindowSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DssfError {
    #[error("origin not occupied")]
    OriginMissing,
    #[error("row {0} empty")]
    RowEmpty(i64),
    #[error("column {0} empty")]
    ColumnEmpty(i64),
    #[error("cell outside N_g²")]
    OutsideGrid,
    #[error("generator side must be at least 2, got {0}")]
    SideTooSmall(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("stage index must be at least 1, got {0}")]
    BadStage(i64),
    #[error("scale factor must be at least 1, got {0}")]
    BadScale(i64),
    #[error("coordinate overflow")]
    Overflow,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("characterization failed: {0}")]
    NotTreeFractal(String),
    #[error("census side {0} out of bounds")]
    CensusBound(i64),
    #[error("no pier admits a sound anchor")]
    NoAnchor,
}

/// A `g × g` generator: contains the origin and meets every row and column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    g: i64,
    cells: PointSet,
}

impl Generator {
    pub fn new(g: i64, cells: PointSet) -> Result<Self, DssfError> {
        if g < 2 {
            return Err(DssfError::SideTooSmall(g));
        }
        if cells.iter().any(|p| p.x < 0 || p.y < 0 || p.x >= g || p.y >= g) {
            return Err(DssfError::OutsideGrid);
        }
        if !cells.contains(Point::ORIGIN) {
            return Err(DssfError::OriginMissing);
        }
        for k in 0..g {
            if !cells.iter().any(|p| p.y == k) {
                return Err(DssfError::RowEmpty(k));
            }
        }
        for k in 0..g {
            if !cells.iter().any(|p| p.x == k) {
                return Err(DssfError::ColumnEmpty(k));
            }
        }
        Ok(Generator { g, cells })
    }

    /// Cells from a row-major bitmask, bit `y*g + x`.
    pub fn from_mask(g: i64, mask: u64) -> Result<Self, DssfError> {
        let cells = (0..g * g)
            .filter(|k| mask & (1u64 << k) != 0)
            .map(|k| Point::new(k % g, k / g))
            .collect();
        Generator::new(g, cells)
    }

    /// Row-major bitmask; meaningful for `g ≤ 8`.
    pub fn mask(&self) -> u64 {
        self.cells.iter().map(|p| 1u64 << (p.y * self.g + p.x)).sum()
    }

    pub fn g(&self) -> i64 {
        self.g
    }

    pub fn cells(&self) -> &PointSet {
        &self.cells
    }

    pub fn contains(&self, p: Point) -> bool {
        self.cells.contains(p)
    }

    /// The `.gen` text form; the last grid line is row 0.
    pub fn to_text(&self) -> String {
        let mut out = format!("g={}\n", self.g);
        out.push_str(&render_rows(&self.cells, self.g));
        out
    }
}

/// `#`/`.` rows for the `n × n` box at the origin, top row first.
pub fn render_rows(s: &PointSet, n: i64) -> String {
    let mut out = String::with_capacity(((n + 1) * n) as usize);
    for y in (0..n).rev() {
        for x in 0..n {
            out.push(if s.contains(Point::new(x, y)) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_generator(text: &str) -> Result<Generator, DssfError> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or_else(|| DssfError::Parse("empty input".into()))?;
    let g: i64 = header
        .trim()
        .strip_prefix("g=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| DssfError::Parse(format!("expected `g=<int>`, found {header:?}")))?;
    if g < 2 {
        return Err(DssfError::SideTooSmall(g));
    }
    if g > 64 {
        return Err(DssfError::Parse(format!("side {g} too large")));
    }
    let mut cells = PointSet::new();
    for row in 0..g {
        let line = lines
            .next()
            .ok_or_else(|| DssfError::Parse(format!("expected {g} grid lines, found {row}")))?;
        let y = g - 1 - row;
        let chars: Vec<char> = line.chars().collect();
        if chars.len() as i64 != g {
            return Err(DssfError::Parse(format!("grid line {} has length {}, expected {g}", row + 1, chars.len())));
        }
        for (x, ch) in chars.into_iter().enumerate() {
            match ch {
                '#' => {
                    cells.insert(Point::new(x as i64, y));
                }
                '.' => {}
                other => return Err(DssfError::Parse(format!("unexpected character {other:?}"))),
            }
        }
    }
    if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
        return Err(DssfError::Parse(format!("trailing garbage {extra:?}")));
    }
    Generator::new(g, cells)
}

fn checked_pow(g: i64, e: i64) -> Result<i64, DssfError> {
    let e = u32::try_from(e).map_err(|_| DssfError::Overflow)?;
    g.checked_pow(e).ok_or(DssfError::Overflow)
}

/// `X_1 = G`, `X_{i+1} = X_i + g^i G`.
pub fn stage(gen: &Generator, i: i64) -> Result<PointSet, DssfError> {
    if i < 1 {
        return Err(DssfError::BadStage(i));
    }
    // Coordinates stay below g^i; check before allocating anything.
    checked_pow(gen.g, i)?;
    let mut x = gen.cells.clone();
    for k in 1..i {
        let step = checked_pow(gen.g, k)?;
        let mut next = PointSet::new();
        for base in gen.cells.iter() {
            let off = base.scale(step);
            for p in x.iter() {
                next.insert(p + off);
            }
        }
        x = next;
    }
    Ok(x)
}

/// Replace each point by a `c × c` block.
pub fn scale(s: &PointSet, c: i64) -> Result<PointSet, DssfError> {
    if c < 1 {
        return Err(DssfError::BadScale(c));
    }
    let mut out = PointSet::new();
    for p in s.iter() {
        let (bx, by) = (p.x.checked_mul(c).ok_or(DssfError::Overflow)?, p.y.checked_mul(c).ok_or(DssfError::Overflow)?);
        for dy in 0..c {
            for dx in 0..c {
                out.insert(Point::new(bx + dx, by + dy));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BridgeKind {
    Horizontal,
    Vertical,
}

/// `hb_S(y) = {(l,y),(r,y)}` or `vb_S(x) = {(x,b),(x,t)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bridge {
    pub kind: BridgeKind,
    pub index: i64,
    pub endpoints: (Point, Point),
    pub connected: bool,
}

impl Bridge {
    pub fn contains(&self, p: Point) -> bool {
        self.endpoints.0 == p || self.endpoints.1 == p
    }
}

/// All h-bridges by ascending `y`, then all v-bridges by ascending `x`.
/// Empty input has no bridges.
pub fn bridges(s: &PointSet) -> Vec<Bridge> {
    let Ok(e) = extents(s) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for y in e.b..=e.t {
        let (a, b) = (Point::new(e.l, y), Point::new(e.r, y));
        if s.contains(a) && s.contains(b) {
            let connected = path_within(s, a, b).is_some();
            out.push(Bridge { kind: BridgeKind::Horizontal, index: y, endpoints: (a, b), connected });
        }
    }
    for x in e.l..=e.r {
        let (a, b) = (Point::new(x, e.b), Point::new(x, e.t));
        if s.contains(a) && s.contains(b) {
            let connected = path_within(s, a, b).is_some();
            out.push(Bridge { kind: BridgeKind::Vertical, index: x, endpoints: (a, b), connected });
        }
    }
    out
}

pub fn nhb(s: &PointSet) -> usize {
    bridges(s).iter().filter(|b| b.kind == BridgeKind::Horizontal).count()
}

pub fn nvb(s: &PointSet) -> usize {
    bridges(s).iter().filter(|b| b.kind == BridgeKind::Vertical).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFractalCheck {
    pub ok: bool,
    /// First failing clause, `None` when `ok`.
    pub diagnosis: Option<String>,
}

/// Tree with exactly one h-bridge and one v-bridge.
pub fn is_tree_fractal_generator(gen: &Generator) -> TreeFractalCheck {
    let fail = |d: String| TreeFractalCheck { ok: false, diagnosis: Some(d) };
    if !is_tree(&gen.cells) {
        return fail("not a tree".into());
    }
    let (h, v) = (nhb(&gen.cells), nvb(&gen.cells));
    if h != 1 {
        return fail(format!("nhb = {h}, expected 1"));
    }
    if v != 1 {
        return fail(format!("nvb = {v}, expected 1"));
    }
    TreeFractalCheck { ok: true, diagnosis: None }
}

/// `X_s` is a tree and `nhb = nvb = 1`.
pub fn stage_property(gen: &Generator, s: i64) -> Result<bool, DssfError> {
    let x = stage(gen, s)?;
    Ok(is_tree(&x) && nhb(&x) == 1 && nvb(&x) == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PierKind {
    Real,
    ParallelSingleBridge,
    OrthogonalSingleBridge,
    DoubleBridge,
}

impl PierKind {
    pub fn short(self) -> &'static str {
        match self {
            PierKind::Real => "real",
            PierKind::ParallelSingleBridge => "parallel",
            PierKind::OrthogonalSingleBridge => "orthogonal",
            PierKind::DoubleBridge => "double",
        }
    }
}

/// A point free in exactly three directions.
///
/// `pointing` is the `D` with `D⁻¹(position)` occupied, so a pier points
/// away from its single occupied neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pier {
    pub position: Point,
    pub pointing: Direction,
    pub kind: PierKind,
}

impl fmt::Display for Pier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}/{}", self.position, self.pointing, self.kind.short())
    }
}

/// Piers in ascending position order.
pub fn piers(gen: &Generator) -> Vec<Pier> {
    let s = &gen.cells;
    let bs = bridges(s);
    s.iter()
        .filter(|&p| free_count(s, p) == 3)
        .map(|p| {
            let occupied = Direction::ALL.into_iter().find(|d| s.contains(d.apply(p))).unwrap();
            let pointing = occupied.inverse();
            let on_h = bs.iter().any(|b| b.kind == BridgeKind::Horizontal && b.contains(p));
            let on_v = bs.iter().any(|b| b.kind == BridgeKind::Vertical && b.contains(p));
            let vertical_pointing = matches!(pointing, Direction::N | Direction::S);
            let kind = match (on_h, on_v) {
                (false, false) => PierKind::Real,
                (true, true) => PierKind::DoubleBridge,
                (false, true) if vertical_pointing => PierKind::ParallelSingleBridge,
                (true, false) if !vertical_pointing => PierKind::ParallelSingleBridge,
                _ => PierKind::OrthogonalSingleBridge,
            };
            Pier { position: p, pointing, kind }
        })
        .collect()
}

/// One of the eight symmetries of the square `N_n²`: optional transpose,
/// then optional mirror of `x`, then optional mirror of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub transpose: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { transpose: false, flip_x: false, flip_y: false };

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8u8).map(|k| Symmetry { transpose: k & 1 != 0, flip_x: k & 2 != 0, flip_y: k & 4 != 0 })
    }

    pub fn apply(self, p: Point, n: i64) -> Point {
        let (mut x, mut y) = if self.transpose { (p.y, p.x) } else { (p.x, p.y) };
        if self.flip_x {
            x = n - 1 - x;
        }
        if self.flip_y {
            y = n - 1 - y;
        }
        Point::new(x, y)
    }

    /// Action on displacement vectors.
    pub fn apply_vec(self, v: Point) -> Point {
        let (mut x, mut y) = if self.transpose { (v.y, v.x) } else { (v.x, v.y) };
        if self.flip_x {
            x = -x;
        }
        if self.flip_y {
            y = -y;
        }
        Point::new(x, y)
    }

    pub fn apply_dir(self, d: Direction) -> Direction {
        Direction::from_delta(self.apply_vec(d.delta())).expect("symmetries permute unit vectors")
    }

    pub fn inverse(self) -> Symmetry {
        let probe = [Point::new(1, 0), Point::new(0, 1)];
        Symmetry::all()
            .find(|s| probe.iter().all(|&v| s.apply_vec(self.apply_vec(v)) == v))
            .expect("the symmetry group is closed")
    }

    pub fn apply_set(self, s: &PointSet, n: i64) -> PointSet {
        s.iter().map(|p| self.apply(p, n)).collect()
    }

    pub fn apply_generator(self, gen: &Generator) -> Generator {
        Generator { g: gen.g, cells: self.apply_set(&gen.cells, gen.g) }
    }
}

/// A pier together with the block whose windows cut it off from the rest
/// of the fractal on a single side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PierAnchor {
    pub pier: Pier,
    pub anchor: Point,
    /// The one non-free side of every window `W^c_s(anchor, pier)`.
    pub glue_side: Direction,
    /// Row of the h-bridge when the glue side is E or W, column of the
    /// v-bridge when it is N or S.
    pub bridge_offset: i64,
}

impl PierAnchor {
    pub fn window(&self, g: i64, c: i64, s: i64) -> WindowSpec {
        WindowSpec {
            c,
            s,
            g,
            e: self.anchor.x,
            f: self.anchor.y,
            p: self.pier.position.x,
            q: self.pier.position.y,
        }
    }
}

fn lowest_north_free(gen: &Generator, x: i64, y_below: i64) -> Option<Point> {
    (0..y_below)
        .map(|y| Point::new(x, y))
        .find(|&p| gen.contains(p) && !gen.contains(Direction::N.apply(p)))
}

/// Symmetry carrying the pier into the canonical orientation for its
/// class: north-pointing for parallel piers, east-pointing at the top row
/// for orthogonal ones.
fn canonical_symmetry(gen: &Generator, pier: &Pier) -> Symmetry {
    let sym = |transpose, flip_x, flip_y| Symmetry { transpose, flip_x, flip_y };
    match pier.kind {
        PierKind::ParallelSingleBridge => match pier.pointing {
            Direction::N => Symmetry::IDENTITY,
            Direction::S => sym(false, false, true),
            Direction::E => sym(true, false, false),
            Direction::W => sym(true, true, true),
        },
        _ => {
            let base = match pier.pointing {
                Direction::E => Symmetry::IDENTITY,
                Direction::W => sym(false, true, false),
                Direction::N => sym(true, false, false),
                Direction::S => sym(true, true, false),
            };
            let moved = base.apply(pier.position, gen.g);
            if moved.y == gen.g - 1 {
                base
            } else {
                Symmetry { flip_y: !base.flip_y, ..base }
            }
        }
    }
}

/// The anchor for a specific pier, following the case analysis for its
/// class. Errors when the pier is double-bridge, the case hypotheses fail,
/// or the resulting stage-2 window does not have three free sides.
pub fn anchor_for_pier(gen: &Generator, pier: &Pier) -> Result<PierAnchor, DssfError> {
    let g = gen.g;
    let glue_side = pier.pointing.inverse();
    let anchor = match pier.kind {
        PierKind::DoubleBridge => {
            return Err(DssfError::Precondition("double-bridge piers have no anchor".into()))
        }
        PierKind::Real => pier.position,
        PierKind::ParallelSingleBridge | PierKind::OrthogonalSingleBridge => {
            let sym = canonical_symmetry(gen, pier);
            let cg = sym.apply_generator(gen);
            let cp = sym.apply(pier.position, g);
            let found = if pier.kind == PierKind::ParallelSingleBridge {
                debug_assert_eq!(sym.apply_dir(pier.pointing), Direction::N);
                if cp.y != g - 1 {
                    return Err(DssfError::Construction("parallel pier off the top row".into()));
                }
                let column = if cp.x == 0 { 1 } else { cp.x - 1 };
                lowest_north_free(&cg, column, g - 1)
            } else {
                debug_assert_eq!(sym.apply_dir(pier.pointing), Direction::E);
                if g <= 2 || cp.y != g - 1 {
                    return Err(DssfError::Construction("orthogonal pier outside its case".into()));
                }
                if cp.x < g - 1 {
                    lowest_north_free(&cg, cp.x, g - 2)
                } else {
                    lowest_north_free(&cg, 0, g - 1)
                }
            };
            let found = found.ok_or_else(|| DssfError::Construction("no north-free anchor".into()))?;
            sym.inverse().apply(found, g)
        }
    };
    let bridge_offset = {
        let want = match glue_side {
            Direction::E | Direction::W => BridgeKind::Horizontal,
            Direction::N | Direction::S => BridgeKind::Vertical,
        };
        bridges(&gen.cells)
            .into_iter()
            .find(|b| b.kind == want)
            .map(|b| b.index)
            .ok_or_else(|| DssfError::Precondition("missing bridge".into()))?
    };
    let pa = PierAnchor { pier: *pier, anchor, glue_side, bridge_offset };
    let profile = windows::window_profile_in_fractal(gen, &pa.window(g, 1, 2))?;
    if profile.free_sides.len() != 3 || profile.glue_side() != Some(glue_side) {
        return Err(DssfError::Construction(format!(
            "window at anchor {anchor} for pier {} has free sides {:?}",
            pier.position, profile.free_sides
        )));
    }
    Ok(pa)
}

/// Priority: real, then parallel single-bridge, then orthogonal
/// single-bridge; ties by position.
pub fn select_pier_anchor(gen: &Generator) -> Result<PierAnchor, DssfError> {
    let check = is_tree_fractal_generator(gen);
    if !check.ok {
        return Err(DssfError::NotTreeFractal(check.diagnosis.unwrap_or_default()));
    }
    let mut ps: Vec<Pier> = piers(gen).into_iter().filter(|p| p.kind != PierKind::DoubleBridge).collect();
    ps.sort_by_key(|p| (p.kind, p.position));
    ps.iter().find_map(|p| anchor_for_pier(gen, p).ok()).ok_or(DssfError::NoAnchor)
}

fn require(cond: bool, msg: &str) -> Result<(), DssfError> {
    if cond {
        Ok(())
    } else {
        Err(DssfError::Precondition(msg.into()))
    }
}

fn check_component(gen: &Generator, comp: &PointSet) -> Result<(), DssfError> {
    require(!comp.is_empty() && comp.is_subset(&gen.cells), "component is not a nonempty subset of G")?;
    let is_component = grid::components(&gen.cells).iter().any(|c| c == comp);
    require(is_component, "C is not a connected component of G")
}

fn connected_bridge_path(gen: &Generator, kind: BridgeKind) -> Option<Vec<Point>> {
    bridges(&gen.cells)
        .into_iter()
        .find(|b| b.kind == kind && b.connected)
        .and_then(|b| path_within(&gen.cells, b.endpoints.0, b.endpoints.1))
}

/// Point of `G ∖ C`, north-free in `G`, below the top row.
///
/// A path `π` across a connected h-bridge passes below the bottommost point
/// `p` of `C` (least `x` on ties). The result is the topmost point of `G`
/// under `p` in its column: the topmost point of `π` there, unless a branch
/// of `G` off `π` sits higher.
pub fn free_point_north(gen: &Generator, comp: &PointSet) -> Result<Point, DssfError> {
    let eg = extents(&gen.cells).expect("generators are nonempty");
    check_component(gen, comp)?;
    let pi = connected_bridge_path(gen, BridgeKind::Horizontal)
        .ok_or_else(|| DssfError::Precondition("no connected h-bridge".into()))?;
    require(comp.iter().any(|p| p.y == eg.t), "C does not meet the top row")?;
    require(comp.iter().all(|p| p.x != eg.l), "C meets the leftmost column")?;
    let bottom = comp.iter().min_by_key(|p| (p.y, p.x)).unwrap();
    let below = |q: &Point| q.x == bottom.x && q.y < bottom.y;
    require_path(pi.iter().any(below), "path does not pass below C")?;
    let q = gen.cells.iter().filter(below).max_by_key(|q| q.y).expect("the path point is in G");
    let ok = gen.contains(q) && !comp.contains(q) && !gen.contains(Direction::N.apply(q)) && q.y < eg.t;
    require_built(ok, q)
}

/// Point of `G ∖ C` in the top row, off the rightmost column, east-free in `G`.
///
/// A path `π` across a connected v-bridge meets the top row left of `C`.
/// The result is the rightmost point of `G` in the top row left of `C`: the
/// rightmost top-row point of `π`, unless a branch of `G` off `π` sits
/// further right.
pub fn free_point_northeast(gen: &Generator, comp: &PointSet) -> Result<Point, DssfError> {
    let eg = extents(&gen.cells).expect("generators are nonempty");
    check_component(gen, comp)?;
    let pi = connected_bridge_path(gen, BridgeKind::Vertical)
        .ok_or_else(|| DssfError::Precondition("no connected v-bridge".into()))?;
    require(comp.iter().any(|p| p.x == eg.r), "C does not meet the rightmost column")?;
    require(comp.iter().any(|p| p.y == eg.t), "C does not meet the top row")?;
    require(comp.iter().all(|p| p.y != eg.b), "C meets the bottom row")?;
    let c_left = comp.iter().filter(|p| p.y == eg.t).map(|p| p.x).min().unwrap();
    let left_of_c = |q: &Point| q.y == eg.t && q.x < c_left;
    require_path(pi.iter().any(left_of_c), "path misses the top row left of C")?;
    let q = gen.cells.iter().filter(left_of_c).max_by_key(|q| q.x).expect("the path point is in G");
    let ok = gen.contains(q)
        && !comp.contains(q)
        && q.y == eg.t
        && q.x != eg.r
        && !gen.contains(Direction::E.apply(q));
    require_built(ok, q)
}

/// Point of `G ∖ C`, east-free in `G`, off the rightmost column.
///
/// A path `π` across a connected v-bridge passes left of the leftmost point
/// `p` of `C` (least `y` on ties). The result is the rightmost point of `G`
/// left of `p` in its row.
pub fn free_point_east(gen: &Generator, comp: &PointSet) -> Result<Point, DssfError> {
    let eg = extents(&gen.cells).expect("generators are nonempty");
    check_component(gen, comp)?;
    let pi = connected_bridge_path(gen, BridgeKind::Vertical)
        .ok_or_else(|| DssfError::Precondition("no connected v-bridge".into()))?;
    require(comp.iter().any(|p| p.x == eg.r), "C does not meet the rightmost column")?;
    require(comp.iter().all(|p| p.y != eg.b), "C meets the bottom row")?;
    let left = comp.iter().min_by_key(|p| (p.x, p.y)).unwrap();
    let west = |q: &Point| q.y == left.y && q.x < left.x;
    require_path(pi.iter().any(west), "path does not pass left of C")?;
    let q = gen.cells.iter().filter(west).max_by_key(|q| q.x).expect("the path point is in G");
    let ok = gen.contains(q) && !comp.contains(q) && !gen.contains(Direction::E.apply(q)) && q.x != eg.r;
    require_built(ok, q)
}

fn require_path(ok: bool, what: &str) -> Result<(), DssfError> {
    if ok {
        Ok(())
    } else {
        Err(DssfError::Construction(what.into()))
    }
}

fn require_built(ok: bool, q: Point) -> Result<Point, DssfError> {
    if ok {
        Ok(q)
    } else {
        Err(DssfError::Construction(format!("candidate {q} misses the postcondition")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub generator: Generator,
    pub tree_fractal: bool,
    pub piers: Vec<Pier>,
    pub predicate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub g: i64,
    pub candidates: u64,
    /// Valid generators ordered by cell bitmask.
    pub entries: Vec<CensusEntry>,
    /// Pier kinds over tree-fractal generators.
    pub pier_histogram: BTreeMap<PierKind, usize>,
}

impl CensusReport {
    pub fn valid(&self) -> usize {
        self.entries.len()
    }

    pub fn tree_fractal(&self) -> usize {
        self.entries.iter().filter(|e| e.tree_fractal).count()
    }

    pub fn predicate_hits(&self) -> usize {
        self.entries.iter().filter(|e| e.predicate).count()
    }
}

/// Largest side enumerated without opting in.
pub const CENSUS_DEFAULT_MAX: i64 = 3;

/// Enumerate every valid generator of side `g` and evaluate `predicate` on each.
pub fn census<P>(g: i64, allow_g4: bool, predicate: P) -> Result<CensusReport, DssfError>
where
    P: Fn(&Generator) -> bool + Sync,
{
    let max = if allow_g4 { 4 } else { CENSUS_DEFAULT_MAX };
    if !(2..=max).contains(&g) {
        return Err(DssfError::CensusBound(g));
    }
    let candidates = 1u64 << (g * g);
    let entries: Vec<CensusEntry> = (0..candidates)
        .into_par_iter()
        .filter(|m| m & 1 == 1)
        .filter_map(|m| Generator::from_mask(g, m).ok())
        .map(|generator| {
            let tree_fractal = is_tree_fractal_generator(&generator).ok;
            let piers = piers(&generator);
            let predicate = predicate(&generator);
            CensusEntry { generator, tree_fractal, piers, predicate }
        })
        .collect();
    let mut pier_histogram = BTreeMap::new();
    for e in entries.iter().filter(|e| e.tree_fractal) {
        for p in &e.piers {
            *pier_histogram.entry(p.kind).or_insert(0) += 1;
        }
    }
    Ok(CensusReport { g, candidates, entries, pier_histogram })
}
