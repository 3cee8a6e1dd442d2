//! Abstract Tile Assembly Model: tile systems, stability, frontiers and
//! seeded assembly sequences over bounded regions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{Direction, Point, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtamError {
    #[error("points {0} and {1} are not adjacent")]
    NotAdjacent(Point, Point),
    #[error("no tile placed at {0}")]
    NotPlaced(Point),
    #[error("invalid at step {0}: insufficient strength")]
    InsufficientStrength(usize),
    #[error("invalid at step {0}: position occupied")]
    PositionOccupied(usize),
    #[error("invalid at step {0}: unknown tile")]
    UnknownTileAt(usize),
    #[error("seed outside region")]
    SeedOutsideRegion,
    #[error("invalid tile system: {0}")]
    InvalidSystem(String),
}

/// A glue binds only to an identical glue of positive strength.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Glue {
    pub label: String,
    pub strength: u32,
}

impl Default for Glue {
    fn default() -> Self {
        Glue::null()
    }
}

impl Glue {
    pub const NULL_LABEL: &'static str = "-";

    pub fn new(label: impl Into<String>, strength: u32) -> Self {
        Glue { label: label.into(), strength }
    }

    pub fn null() -> Self {
        Glue::new(Self::NULL_LABEL, 0)
    }

    pub fn is_null(&self) -> bool {
        self.strength == 0
    }

    /// Strength of the bond formed when `self` abuts `other`.
    pub fn bond(&self, other: &Glue) -> u32 {
        if self.strength > 0 && self == other {
            self.strength
        } else {
            0
        }
    }
}

impl fmt::Display for Glue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.strength)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileType {
    pub name: String,
    /// Indexed by `Direction::index`: N, E, S, W.
    pub glues: [Glue; 4],
}

impl TileType {
    pub fn new(name: impl Into<String>, n: Glue, e: Glue, s: Glue, w: Glue) -> Self {
        TileType { name: name.into(), glues: [n, e, s, w] }
    }

    pub fn glue(&self, d: Direction) -> &Glue {
        &self.glues[d.index()]
    }
}

/// Index into `TileSystem::tiles`.
pub type TileId = usize;

/// Partial map from points to tile types. Assemblies proper are nonempty
/// and connected; restrictions of them (window parts) need not be.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assembly {
    cells: BTreeMap<Point, TileId>,
}

impl Assembly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(p: Point, t: TileId) -> Self {
        let mut a = Self::new();
        a.place(p, t);
        a
    }

    /// Returns false, leaving the assembly unchanged, when `p` is occupied.
    pub fn place(&mut self, p: Point, t: TileId) -> bool {
        use std::collections::btree_map::Entry;
        match self.cells.entry(p) {
            Entry::Vacant(v) => {
                v.insert(t);
                true
            }
            Entry::Occupied(_) => false,
        }
    }

    pub fn get(&self, p: Point) -> Option<TileId> {
        self.cells.get(&p).copied()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.cells.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, TileId)> + '_ {
        self.cells.iter().map(|(&p, &t)| (p, t))
    }

    pub fn domain(&self) -> PointSet {
        self.cells.keys().copied().collect()
    }

    pub fn translate(&self, v: Point) -> Assembly {
        Assembly { cells: self.cells.iter().map(|(&p, &t)| (p + v, t)).collect() }
    }

    /// Union of configurations that agree where they overlap.
    pub fn union(&self, other: &Assembly) -> Option<Assembly> {
        let mut out = self.clone();
        for (p, t) in other.iter() {
            match out.get(p) {
                Some(u) if u != t => return None,
                _ => {
                    out.cells.insert(p, t);
                }
            }
        }
        Some(out)
    }
}

/// Inclusive axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub min: Point,
    pub max: Point,
}

impl Region {
    pub fn new(min: Point, max: Point) -> Self {
        Region { min, max }
    }

    /// `[0, side)²`.
    pub fn square(side: i64) -> Self {
        Region { min: Point::ORIGIN, max: Point::new(side - 1, side - 1) }
    }

    /// Moved by `(d, d)`.
    pub fn shifted(self, d: i64) -> Self {
        let v = Point::new(d, d);
        Region { min: self.min + v, max: self.max + v }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.y >= self.min.y && p.x <= self.max.x && p.y <= self.max.y
    }

    pub fn area(&self) -> u64 {
        let w = (self.max.x - self.min.x + 1).max(0) as u64;
        let h = (self.max.y - self.min.y + 1).max(0) as u64;
        w * h
    }
}

/// `(T, σ, τ)` with a glue index for frontier queries.
#[derive(Debug, Clone)]
pub struct TileSystem {
    tiles: Vec<TileType>,
    seed: Assembly,
    temperature: u32,
    by_name: HashMap<String, TileId>,
    /// `(side, glue)` to the tiles showing that glue on that side.
    by_glue: HashMap<(usize, Glue), Vec<TileId>>,
}

impl PartialEq for TileSystem {
    fn eq(&self, o: &Self) -> bool {
        self.tiles == o.tiles && self.seed == o.seed && self.temperature == o.temperature
    }
}

impl Eq for TileSystem {}

impl TileSystem {
    pub fn new(tiles: Vec<TileType>, seed: Assembly, temperature: u32) -> Result<Self, AtamError> {
        let bad = |m: String| Err(AtamError::InvalidSystem(m));
        if temperature == 0 {
            return bad("temperature must be positive".into());
        }
        let mut by_name = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            if by_name.insert(t.name.clone(), i).is_some() {
                return bad(format!("duplicate tile name {:?}", t.name));
            }
            for g in &t.glues {
                if g.label == Glue::NULL_LABEL && g.strength > 0 {
                    return bad(format!("tile {:?} gives the null label a positive strength", t.name));
                }
            }
        }
        if seed.is_empty() {
            return bad("seed is empty".into());
        }
        if seed.iter().any(|(_, t)| t >= tiles.len()) {
            return bad("seed uses an unknown tile".into());
        }
        let mut by_glue: HashMap<(usize, Glue), Vec<TileId>> = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            for d in Direction::ALL {
                let g = t.glue(d);
                if g.strength > 0 {
                    by_glue.entry((d.index(), g.clone())).or_default().push(i);
                }
            }
        }
        let sys = TileSystem { tiles, seed, temperature, by_name, by_glue };
        if !is_tau_stable(&sys, &sys.seed, temperature) {
            return bad("seed is not stable at the system temperature".into());
        }
        Ok(sys)
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    pub fn tile(&self, id: TileId) -> &TileType {
        &self.tiles[id]
    }

    pub fn tile_id(&self, name: &str) -> Option<TileId> {
        self.by_name.get(name).copied()
    }

    pub fn seed(&self) -> &Assembly {
        &self.seed
    }

    pub fn temperature(&self) -> u32 {
        self.temperature
    }

    /// Number of distinct positive-strength glues.
    pub fn glue_types(&self) -> usize {
        let mut gs: Vec<&Glue> = self.tiles.iter().flat_map(|t| t.glues.iter()).filter(|g| g.strength > 0).collect();
        gs.sort();
        gs.dedup();
        gs.len()
    }

    /// Strength between tile `a` and tile `b` placed one step in direction `d` from it.
    pub fn bond(&self, a: TileId, d: Direction, b: TileId) -> u32 {
        self.tiles[a].glue(d).bond(self.tiles[b].glue(d.inverse()))
    }

    /// Total strength tile `t` would gain at the empty point `p`.
    pub fn attach_strength(&self, alpha: &Assembly, p: Point, t: TileId) -> u32 {
        Direction::ALL
            .iter()
            .filter_map(|&d| alpha.get(d.apply(p)).map(|n| self.bond(t, d, n)))
            .sum()
    }

    /// Tiles able to attach at the empty point `p`, ascending by id.
    pub fn attachable(&self, alpha: &Assembly, p: Point) -> Vec<TileId> {
        let mut sums: BTreeMap<TileId, u32> = BTreeMap::new();
        for d in Direction::ALL {
            let Some(n) = alpha.get(d.apply(p)) else { continue };
            let facing = self.tiles[n].glue(d.inverse());
            if facing.strength == 0 {
                continue;
            }
            if let Some(ts) = self.by_glue.get(&(d.index(), facing.clone())) {
                for &t in ts {
                    *sums.entry(t).or_insert(0) += facing.strength;
                }
            }
        }
        sums.into_iter().filter(|&(_, s)| s >= self.temperature).map(|(t, _)| t).collect()
    }
}

pub fn bond_strength(sys: &TileSystem, alpha: &Assembly, a: Point, b: Point) -> Result<u32, AtamError> {
    let d = Direction::from_delta(b - a).ok_or(AtamError::NotAdjacent(a, b))?;
    let ta = alpha.get(a).ok_or(AtamError::NotPlaced(a))?;
    let tb = alpha.get(b).ok_or(AtamError::NotPlaced(b))?;
    Ok(sys.bond(ta, d, tb))
}

/// Weighted binding graph as a dense symmetric matrix over `alpha.iter()` order.
fn binding_matrix(sys: &TileSystem, alpha: &Assembly) -> Vec<Vec<u64>> {
    let pts: Vec<(Point, TileId)> = alpha.iter().collect();
    let index: HashMap<Point, usize> = pts.iter().enumerate().map(|(i, &(p, _))| (p, i)).collect();
    let mut w = vec![vec![0u64; pts.len()]; pts.len()];
    for (i, &(p, t)) in pts.iter().enumerate() {
        for d in [Direction::E, Direction::N] {
            if let Some(&j) = index.get(&d.apply(p)) {
                let s = sys.bond(t, d, pts[j].1) as u64;
                w[i][j] = s;
                w[j][i] = s;
            }
        }
    }
    w
}

/// Global minimum cut of a symmetric weight matrix (Stoer–Wagner).
/// `None` for fewer than two vertices.
pub fn min_cut(weights: &[Vec<u64>]) -> Option<u64> {
    let n = weights.len();
    if n < 2 {
        return None;
    }
    let mut w: Vec<Vec<u64>> = weights.to_vec();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while alive.len() > 1 {
        let mut conn = vec![0u64; n];
        let mut added = vec![false; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let next = *alive
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (conn[v], std::cmp::Reverse(v)))
                .unwrap();
            added[next] = true;
            if step == alive.len() - 1 {
                best = best.min(conn[next]);
                prev = last;
                last = next;
            } else {
                last = next;
                for &v in &alive {
                    if !added[v] {
                        conn[v] += w[next][v];
                    }
                }
            }
        }
        // Merge the last vertex into the one added before it.
        for &v in &alive {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    Some(best)
}

/// Every cut of the binding graph has weight at least `tau`.
pub fn is_tau_stable(sys: &TileSystem, alpha: &Assembly, tau: u32) -> bool {
    if alpha.len() <= 1 {
        return true;
    }
    let w = binding_matrix(sys, alpha);
    if tau == 1 {
        let pts: Vec<Point> = alpha.iter().map(|(p, _)| p).collect();
        let mut seen = vec![false; pts.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..pts.len() {
                if w[i][j] > 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        return seen.into_iter().all(|s| s);
    }
    min_cut(&w).is_some_and(|c| c >= tau as u64)
}

/// Empty cells adjacent to `alpha`, in ascending point order.
fn perimeter(alpha: &Assembly) -> Vec<Point> {
    let mut out: Vec<Point> = alpha
        .iter()
        .flat_map(|(p, _)| p.neighbors())
        .filter(|&q| !alpha.contains(q))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Attachable `(point, tile)` pairs inside `region`, sorted. For a stable
/// `alpha`, a single attachment is stable exactly when its new bonds sum to τ.
pub fn frontier(sys: &TileSystem, alpha: &Assembly, region: Option<&Region>) -> Vec<(Point, TileId)> {
    perimeter(alpha)
        .into_iter()
        .filter(|&p| region.is_none_or(|r| r.contains(p)))
        .flat_map(|p| sys.attachable(alpha, p).into_iter().map(move |t| (p, t)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Uniform over all frontier pairs, driven by a seeded ChaCha8 stream.
    Uniform { seed: u64 },
    /// Least `(y, x, tile name)`.
    Lexicographic,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Uniform { seed } => write!(f, "uniform(seed={seed})"),
            Policy::Lexicographic => write!(f, "lexicographic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceEvent {
    pub index: usize,
    pub position: Point,
    pub tile: TileId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblySequence {
    pub system: TileSystem,
    pub events: Vec<SequenceEvent>,
    pub result: Assembly,
    /// Attachments still possible at the end but cut off by the region.
    pub clipped: Vec<(Point, TileId)>,
}

impl AssemblySequence {
    /// Assemblies `α_0 = σ, α_1, …` along the sequence.
    pub fn prefixes(&self) -> impl Iterator<Item = Assembly> + '_ {
        let mut cur = self.system.seed().clone();
        std::iter::once(cur.clone()).chain(self.events.iter().map(move |e| {
            cur.place(e.position, e.tile);
            cur.clone()
        }))
    }
}

/// Grow from the seed inside `region` until nothing attaches or
/// `max_steps` placements have been made.
pub fn run(sys: &TileSystem, region: &Region, policy: Policy, max_steps: usize) -> Result<AssemblySequence, AtamError> {
    if sys.seed().iter().any(|(p, _)| !region.contains(p)) {
        return Err(AtamError::SeedOutsideRegion);
    }
    let mut alpha = sys.seed().clone();
    // Keyed by (y, x) so iteration order is the lexicographic policy order.
    let mut open: BTreeMap<(i64, i64), Vec<TileId>> = BTreeMap::new();
    let mut total = 0usize;
    let refresh = |alpha: &Assembly, open: &mut BTreeMap<(i64, i64), Vec<TileId>>, total: &mut usize, p: Point| {
        if let Some(old) = open.remove(&(p.y, p.x)) {
            *total -= old.len();
        }
        if alpha.contains(p) || !region.contains(p) {
            return;
        }
        let ts = sys.attachable(alpha, p);
        if !ts.is_empty() {
            *total += ts.len();
            open.insert((p.y, p.x), ts);
        }
    };
    for p in perimeter(&alpha) {
        refresh(&alpha, &mut open, &mut total, p);
    }
    let mut rng = match policy {
        Policy::Uniform { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Policy::Lexicographic => None,
    };
    let mut events = Vec::new();
    while events.len() < max_steps && total > 0 {
        let (pos, tile) = match rng.as_mut() {
            Some(rng) => {
                let mut k = rng.gen_range(0..total);
                let mut pick = None;
                for (&(y, x), ts) in &open {
                    if k < ts.len() {
                        pick = Some((Point::new(x, y), ts[k]));
                        break;
                    }
                    k -= ts.len();
                }
                pick.expect("index below the pair count")
            }
            None => {
                let (&(y, x), ts) = open.iter().next().unwrap();
                let t = *ts.iter().min_by_key(|&&t| &sys.tile(t).name).unwrap();
                (Point::new(x, y), t)
            }
        };
        alpha.place(pos, tile);
        events.push(SequenceEvent { index: events.len(), position: pos, tile });
        refresh(&alpha, &mut open, &mut total, pos);
        for q in pos.neighbors() {
            refresh(&alpha, &mut open, &mut total, q);
        }
    }
    let clipped = frontier(sys, &alpha, None).into_iter().filter(|(p, _)| !region.contains(*p)).collect();
    Ok(AssemblySequence { system: sys.clone(), events, result: alpha, clipped })
}

/// Apply `events` to the seed, checking each placement is a legal attachment.
pub fn replay(sys: &TileSystem, events: &[SequenceEvent]) -> Result<Assembly, AtamError> {
    let mut alpha = sys.seed().clone();
    for (k, e) in events.iter().enumerate() {
        if e.tile >= sys.tiles().len() {
            return Err(AtamError::UnknownTileAt(k));
        }
        if alpha.contains(e.position) {
            return Err(AtamError::PositionOccupied(k));
        }
        if sys.attach_strength(&alpha, e.position, e.tile) < sys.temperature() {
            return Err(AtamError::InsufficientStrength(k));
        }
        alpha.place(e.position, e.tile);
    }
    Ok(alpha)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictVerdict {
    /// Some producible assembly has a tile at `witness ∉ target`.
    Violation { witness: Point, policy: Policy },
    /// Every explored run stayed on target; `clipped` lists target points
    /// left attachable beyond the region. Not a proof of strictness.
    IncompleteOk { clipped: Vec<Point> },
}

/// Bounded check that the runs driven by `policies` place tiles only on `target`.
pub fn check_strict_self_assembly(
    sys: &TileSystem,
    target: &PointSet,
    region: &Region,
    policies: &[Policy],
) -> Result<StrictVerdict, AtamError> {
    if sys.seed().iter().any(|(p, _)| !region.contains(p)) {
        return Err(AtamError::SeedOutsideRegion);
    }
    let seed_off = sys.seed().iter().map(|(p, _)| p).find(|&p| !target.contains(p));
    let mut clipped = std::collections::BTreeSet::new();
    for &policy in policies {
        if let Some(w) = seed_off {
            return Ok(StrictVerdict::Violation { witness: w, policy });
        }
        let seq = run(sys, region, policy, region.area() as usize)?;
        if let Some(e) = seq.events.iter().find(|e| !target.contains(e.position)) {
            return Ok(StrictVerdict::Violation { witness: e.position, policy });
        }
        for (p, _) in &seq.clipped {
            if !target.contains(*p) {
                return Ok(StrictVerdict::Violation { witness: *p, policy });
            }
            clipped.insert(*p);
        }
    }
    Ok(StrictVerdict::IncompleteOk { clipped: clipped.into_iter().collect() })
}

/// The policies `check_strict_self_assembly` uses when none are given.
pub fn default_policies() -> Vec<Policy> {
    let mut v = vec![Policy::Lexicographic];
    v.extend((0..4).map(|seed| Policy::Uniform { seed }));
    v
}
