//! Closed square windows, the stage-indexed window family and translations
//! between its members.

use thiserror::Error;

use crate::atam::Assembly;
use crate::dssf::{self, DssfError, Generator};
use crate::grid::{Direction, Point, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("window stage must be at least 2, got {0}")]
    BadStage(i64),
    #[error("scale factor must be at least 1, got {0}")]
    BadScale(i64),
    #[error("anchor coordinate {0} outside N_{1}")]
    BadAnchor(i64, i64),
    #[error("translation needs i < j, got i={0}, j={1}")]
    BadOrder(i64, i64),
    #[error("window inside must be a nonempty axis-aligned square")]
    NotSquare,
    #[error("coordinate overflow")]
    Overflow,
}

impl From<WindowError> for DssfError {
    fn from(e: WindowError) -> Self {
        DssfError::Construction(e.to_string())
    }
}

/// A closed window given by a finite square inside; everything else is outside.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedWindow {
    corner: Point,
    side: i64,
}

impl ClosedWindow {
    pub fn square(corner: Point, side: i64) -> Result<Self, WindowError> {
        if side < 1 {
            return Err(WindowError::NotSquare);
        }
        Ok(ClosedWindow { corner, side })
    }

    /// Accepts exactly the point sets that fill an axis-aligned square.
    pub fn from_inside(inside: &PointSet) -> Result<Self, WindowError> {
        let e = crate::grid::extents(inside).map_err(|_| WindowError::NotSquare)?;
        let side = e.r - e.l + 1;
        if e.t - e.b + 1 != side || inside.len() as i64 != side * side {
            return Err(WindowError::NotSquare);
        }
        Ok(ClosedWindow { corner: Point::new(e.l, e.b), side })
    }

    pub fn corner(&self) -> Point {
        self.corner
    }

    pub fn side(&self) -> i64 {
        self.side
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.corner.x
            && p.y >= self.corner.y
            && p.x < self.corner.x + self.side
            && p.y < self.corner.y + self.side
    }

    pub fn inside(&self) -> PointSet {
        let mut s = PointSet::new();
        for dy in 0..self.side {
            for dx in 0..self.side {
                s.insert(self.corner + Point::new(dx, dy));
            }
        }
        s
    }

    pub fn translate(&self, v: Point) -> ClosedWindow {
        ClosedWindow { corner: self.corner + v, side: self.side }
    }

    /// Whether the unit edge from `p` in direction `d` crosses the cut.
    pub fn crosses(&self, p: Point, d: Direction) -> bool {
        self.contains(p) != self.contains(d.apply(p))
    }

    /// Cut edges as `(inside cell, outward direction)`.
    pub fn cut_edges(&self) -> Vec<(Point, Direction)> {
        let mut out = Vec::new();
        for p in self.inside().iter() {
            for d in Direction::ALL {
                if !self.contains(d.apply(p)) {
                    out.push((p, d));
                }
            }
        }
        out
    }

    /// Cells inside the window along side `d`.
    pub fn side_cells(&self, d: Direction) -> Vec<Point> {
        let (c, n) = (self.corner, self.side);
        (0..n)
            .map(|k| match d {
                Direction::N => Point::new(c.x + k, c.y + n - 1),
                Direction::S => Point::new(c.x + k, c.y),
                Direction::E => Point::new(c.x + n - 1, c.y + k),
                Direction::W => Point::new(c.x, c.y + k),
            })
            .collect()
    }
}

/// Parameters of the window `W^c_s(e,f,p,q)` over a side-`g` generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub c: i64,
    pub s: i64,
    pub g: i64,
    pub e: i64,
    pub f: i64,
    pub p: i64,
    pub q: i64,
}

fn pow(g: i64, k: i64) -> Result<i64, WindowError> {
    let k = u32::try_from(k).map_err(|_| WindowError::Overflow)?;
    g.checked_pow(k).ok_or(WindowError::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64, WindowError> {
    a.checked_mul(b).ok_or(WindowError::Overflow)
}

impl WindowSpec {
    fn validate(&self) -> Result<(), WindowError> {
        if self.s < 2 {
            return Err(WindowError::BadStage(self.s));
        }
        if self.c < 1 {
            return Err(WindowError::BadScale(self.c));
        }
        for v in [self.e, self.f, self.p, self.q] {
            if !(0..self.g).contains(&v) {
                return Err(WindowError::BadAnchor(v, self.g));
            }
        }
        Ok(())
    }

    /// Side `c·g^(s-2)`, southwest corner `c·g^(s-1)(e,f) + c·g^(s-2)(p,q)`.
    pub fn window(&self) -> Result<ClosedWindow, WindowError> {
        self.validate()?;
        let small = mul(self.c, pow(self.g, self.s - 2)?)?;
        let big = mul(self.c, pow(self.g, self.s - 1)?)?;
        let corner = Point::new(
            mul(big, self.e)? + mul(small, self.p)?,
            mul(big, self.f)? + mul(small, self.q)?,
        );
        ClosedWindow::square(corner, small)
    }
}

pub fn window_inside(spec: &WindowSpec) -> Result<PointSet, WindowError> {
    Ok(spec.window()?.inside())
}

/// `inner.inside ⊆ outer.inside`.
pub fn encloses(outer: &ClosedWindow, inner: &ClosedWindow) -> bool {
    let (o, i) = (outer.corner, inner.corner);
    i.x >= o.x && i.y >= o.y && i.x + inner.side <= o.x + outer.side && i.y + inner.side <= o.y + outer.side
}

/// Vector from the southwest corner of `W^c_i` to that of `W^c_j`.
#[allow(clippy::too_many_arguments)]
pub fn translation(c: i64, g: i64, i: i64, j: i64, e: i64, f: i64, p: i64, q: i64) -> Result<Point, WindowError> {
    if i >= j {
        return Err(WindowError::BadOrder(i, j));
    }
    if i < 2 {
        return Err(WindowError::BadStage(i));
    }
    let outer = mul(c, pow(g, j - 1)? - pow(g, i - 1)?)?;
    let inner = mul(c, pow(g, j - 2)? - pow(g, i - 2)?)?;
    Ok(Point::new(mul(outer, e)? + mul(inner, p)?, mul(outer, f)? + mul(inner, q)?))
}

/// `m = c(g^(j-2) - g^(i-2))`, the slack of `W_i + t` inside `W_j`.
pub fn enclosure_slack(c: i64, g: i64, i: i64, j: i64) -> Result<i64, WindowError> {
    if i >= j {
        return Err(WindowError::BadOrder(i, j));
    }
    if i < 2 {
        return Err(WindowError::BadStage(i));
    }
    mul(c, pow(g, j - 2)? - pow(g, i - 2)?)
}

/// `x ≤ m` and `y ≤ m`; false on invalid `(i, j)`.
pub fn enclosure_bound_ok(c: i64, g: i64, i: i64, j: i64, x: i64, y: i64) -> bool {
    match enclosure_slack(c, g, i, j) {
        Ok(m) => x >= 0 && y >= 0 && x <= m && y <= m,
        Err(_) => false,
    }
}

/// `(α_I, α_O)`: the restrictions of `α` to the inside and outside of `w`.
/// Either part may be empty or disconnected.
pub fn partition(alpha: &Assembly, w: &ClosedWindow) -> (Assembly, Assembly) {
    let mut inside = Assembly::new();
    let mut outside = Assembly::new();
    for (p, t) in alpha.iter() {
        if w.contains(p) {
            inside.place(p, t);
        } else {
            outside.place(p, t);
        }
    }
    (inside, outside)
}

/// How a window sits against a shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowProfile {
    /// Sides with no shape cell just beyond them.
    pub free_sides: Vec<Direction>,
    /// Shape adjacencies `(inside, outside)` across non-free sides.
    pub glue_pairs: Vec<(Point, Point)>,
    pub occupied_inside: usize,
}

impl WindowProfile {
    /// The single non-free side, when exactly one exists.
    pub fn glue_side(&self) -> Option<Direction> {
        let busy: Vec<Direction> = Direction::ALL.into_iter().filter(|d| !self.free_sides.contains(d)).collect();
        match busy.as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Exactly one non-free side carrying `len` glue pairs in one straight run.
    pub fn single_glue_line(&self, len: usize) -> bool {
        let Some(d) = self.glue_side() else {
            return false;
        };
        if self.glue_pairs.len() != len || self.occupied_inside == 0 {
            return false;
        }
        let mut along: Vec<i64> = self
            .glue_pairs
            .iter()
            .map(|(p, _)| if matches!(d, Direction::N | Direction::S) { p.x } else { p.y })
            .collect();
        along.sort_unstable();
        along.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

pub fn window_profile(shape: &PointSet, w: &ClosedWindow) -> WindowProfile {
    let mut free_sides = Vec::new();
    let mut glue_pairs = Vec::new();
    for d in Direction::ALL {
        let mut free = true;
        for p in w.side_cells(d) {
            let o = d.apply(p);
            if shape.contains(o) {
                free = false;
                if shape.contains(p) {
                    glue_pairs.push((p, o));
                }
            }
        }
        if free {
            free_sides.push(d);
        }
    }
    let occupied_inside = w.inside().iter().filter(|&p| shape.contains(p)).count();
    WindowProfile { free_sides, glue_pairs, occupied_inside }
}

/// Profile of `W^c_s` against the scaled fractal. Stage `s+1` covers the
/// window together with every cell adjacent to it.
pub fn window_profile_in_fractal(gen: &Generator, spec: &WindowSpec) -> Result<WindowProfile, DssfError> {
    let shape = dssf::scale(&dssf::stage(gen, spec.s + 1)?, spec.c)?;
    Ok(window_profile(&shape, &spec.window()?))
}
