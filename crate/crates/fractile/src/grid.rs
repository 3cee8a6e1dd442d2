//! Integer lattice geometry over the full grid graph.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("empty point set")]
    EmptySet,
    #[error("point not in set")]
    NotInSet,
}

/// Lattice point. Ordering is lexicographic on `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, k: i64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn is_adjacent(self, other: Point) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn neighbors(self) -> [Point; 4] {
        Direction::ALL.map(|d| d.apply(self))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Compass direction, usable as a function on points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    N,
    E,
    S,
    W,
}

impl Direction {
    /// Index order N, E, S, W; tile glues are stored in this order.
    pub const ALL: [Direction; 4] = [Direction::N, Direction::E, Direction::S, Direction::W];

    pub fn index(self) -> usize {
        match self {
            Direction::N => 0,
            Direction::E => 1,
            Direction::S => 2,
            Direction::W => 3,
        }
    }

    pub fn delta(self) -> Point {
        match self {
            Direction::N => Point::new(0, 1),
            Direction::E => Point::new(1, 0),
            Direction::S => Point::new(0, -1),
            Direction::W => Point::new(-1, 0),
        }
    }

    pub fn apply(self, p: Point) -> Point {
        p + self.delta()
    }

    pub fn inverse(self) -> Direction {
        match self {
            Direction::N => Direction::S,
            Direction::E => Direction::W,
            Direction::S => Direction::N,
            Direction::W => Direction::E,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::N => 'N',
            Direction::E => 'E',
            Direction::S => 'S',
            Direction::W => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Direction> {
        match c {
            'N' => Some(Direction::N),
            'E' => Some(Direction::E),
            'S' => Some(Direction::S),
            'W' => Some(Direction::W),
            _ => None,
        }
    }

    /// The direction whose unit vector is `v`, if any.
    pub fn from_delta(v: Point) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.delta() == v)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Finite set of lattice points with deterministic iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PointSet(BTreeSet<Point>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(BTreeSet::new())
    }

    pub fn contains(&self, p: Point) -> bool {
        self.0.contains(&p)
    }

    pub fn insert(&mut self, p: Point) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: Point) -> bool {
        self.0.remove(&p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.0.iter().copied()
    }

    pub fn translate(&self, v: Point) -> PointSet {
        self.iter().map(|p| p + v).collect()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn symmetric_difference(&self, other: &PointSet) -> PointSet {
        self.0.symmetric_difference(&other.0).copied().collect()
    }

    pub fn as_set(&self) -> &BTreeSet<Point> {
        &self.0
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        PointSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[(i64, i64); N]> for PointSet {
    fn from(pts: [(i64, i64); N]) -> Self {
        pts.into_iter().map(|(x, y)| Point::new(x, y)).collect()
    }
}

impl IntoIterator for PointSet {
    type Item = Point;
    type IntoIter = std::collections::btree_set::IntoIter<Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::collections::btree_set::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Bounding box of a nonempty point set: `l ≤ r`, `b ≤ t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Extents {
    pub l: i64,
    pub r: i64,
    pub b: i64,
    pub t: i64,
}

pub fn extents(s: &PointSet) -> Result<Extents, GridError> {
    let mut it = s.iter();
    let first = it.next().ok_or(GridError::EmptySet)?;
    let mut e = Extents { l: first.x, r: first.x, b: first.y, t: first.y };
    for p in it {
        e.l = e.l.min(p.x);
        e.r = e.r.max(p.x);
        e.b = e.b.min(p.y);
        e.t = e.t.max(p.y);
    }
    Ok(e)
}

/// Number of unit edges of the full grid graph of `s`.
pub fn edge_count(s: &PointSet) -> usize {
    s.iter()
        .map(|p| {
            [Direction::E, Direction::N]
                .into_iter()
                .filter(|d| s.contains(d.apply(p)))
                .count()
        })
        .sum()
}

/// Connected components, each listed once, ordered by their least point.
pub fn components(s: &PointSet) -> Vec<PointSet> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for start in s.iter() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = PointSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(p) = queue.pop_front() {
            comp.insert(p);
            for q in p.neighbors() {
                if s.contains(q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// The empty set is not connected.
pub fn is_connected(s: &PointSet) -> bool {
    !s.is_empty() && components(s).len() == 1
}

/// Connected with exactly `|S| - 1` edges.
pub fn is_tree(s: &PointSet) -> bool {
    is_connected(s) && edge_count(s) + 1 == s.len()
}

pub fn d_free(s: &PointSet, p: Point, d: Direction) -> Result<bool, GridError> {
    if !s.contains(p) {
        return Err(GridError::NotInSet);
    }
    Ok(!s.contains(d.apply(p)))
}

/// Number of directions in which `p ∈ s` is free.
pub fn free_count(s: &PointSet, p: Point) -> usize {
    Direction::ALL.iter().filter(|d| !s.contains(d.apply(p))).count()
}

/// Shortest path from `a` to `b` inside `s`, both ends included.
/// Among shortest paths, neighbors are explored in `Direction::ALL` order.
pub fn path_within(s: &PointSet, a: Point, b: Point) -> Option<Vec<Point>> {
    if !s.contains(a) || !s.contains(b) {
        return None;
    }
    let mut prev: HashMap<Point, Point> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    prev.insert(a, a);
    while let Some(p) = queue.pop_front() {
        if p == b {
            let mut path = vec![b];
            let mut cur = b;
            while cur != a {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for q in p.neighbors() {
            if s.contains(q) && !prev.contains_key(&q) {
                prev.insert(q, p);
                queue.push_back(q);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierp() -> PointSet {
        PointSet::from([(0, 0), (1, 0), (0, 1)])
    }

    /// Iterative DFS that reports a cycle when it meets a visited non-parent.
    fn has_cycle_dfs(s: &PointSet) -> bool {
        let mut seen = BTreeSet::new();
        for root in s.iter() {
            if seen.contains(&root) {
                continue;
            }
            let mut stack = vec![(root, None::<Point>)];
            seen.insert(root);
            while let Some((p, parent)) = stack.pop() {
                for q in p.neighbors() {
                    if !s.contains(q) || Some(q) == parent {
                        continue;
                    }
                    if !seen.insert(q) {
                        return true;
                    }
                    stack.push((q, Some(p)));
                }
            }
        }
        false
    }

    fn union_find_connected(s: &PointSet) -> bool {
        let pts: Vec<Point> = s.iter().collect();
        if pts.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..pts.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if pts[i].is_adjacent(pts[j]) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let r0 = find(&mut parent, 0);
        (0..pts.len()).all(|i| find(&mut parent, i) == r0)
    }

    fn subset_3x3(mask: u32) -> PointSet {
        (0..9)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| Point::new(k % 3, k / 3))
            .collect()
    }

    #[test]
    fn extents_examples() {
        assert_eq!(extents(&sierp()).unwrap(), Extents { l: 0, r: 1, b: 0, t: 1 });
        assert_eq!(extents(&PointSet::from([(3, 6)])).unwrap(), Extents { l: 3, r: 3, b: 6, t: 6 });
        let s = PointSet::from([(0, 0), (3, 0), (2, 1), (0, 3)]);
        assert_eq!(extents(&s).unwrap(), Extents { l: 0, r: 3, b: 0, t: 3 });
        assert_eq!(extents(&PointSet::new()), Err(GridError::EmptySet));
        assert_eq!(GridError::EmptySet.to_string(), "empty point set");
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&sierp()));
        assert!(!is_connected(&PointSet::from([(0, 0), (1, 1)])));
        assert!(is_connected(&PointSet::from([(0, 0)])));
        assert!(!is_connected(&PointSet::new()));
        assert!(!is_tree(&PointSet::new()));
    }

    #[test]
    fn tree_examples() {
        assert!(is_tree(&sierp()));
        assert!(!is_tree(&PointSet::from([(0, 0), (1, 0), (0, 1), (1, 1)])));
        assert!(!is_tree(&PointSet::from([(0, 0), (1, 1)])));
    }

    #[test]
    fn d_free_examples() {
        let s = sierp();
        assert!(!d_free(&s, Point::new(0, 0), Direction::N).unwrap());
        assert!(d_free(&s, Point::new(0, 0), Direction::W).unwrap());
        assert!(d_free(&s, Point::new(1, 0), Direction::N).unwrap());
        let err = d_free(&s, Point::new(5, 5), Direction::N).unwrap_err();
        assert_eq!(err.to_string(), "point not in set");
    }

    #[test]
    fn direction_inverse_roundtrip() {
        for d in Direction::ALL {
            let p = Point::new(4, -7);
            assert_eq!(d.inverse().apply(d.apply(p)), p);
            assert_eq!(d.inverse().inverse(), d);
        }
        assert_eq!(Direction::N.inverse(), Direction::S);
        assert_eq!(Direction::W.inverse(), Direction::E);
    }

    #[test]
    fn all_3x3_subsets_match_union_find() {
        for mask in 0..512u32 {
            let s = subset_3x3(mask);
            assert_eq!(is_connected(&s), union_find_connected(&s), "mask {mask}");
        }
    }

    #[test]
    fn edge_count_tree_agrees_with_dfs() {
        for mask in 0..512u32 {
            let s = subset_3x3(mask);
            let dfs_tree = union_find_connected(&s) && !has_cycle_dfs(&s);
            assert_eq!(is_tree(&s), dfs_tree, "mask {mask}");
        }
    }

    #[test]
    fn path_within_finds_shortest() {
        let s = PointSet::from([(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]);
        let p = path_within(&s, Point::new(0, 0), Point::new(2, 2)).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.windows(2).all(|w| w[0].is_adjacent(w[1])));
        assert!(path_within(&s, Point::new(0, 0), Point::new(9, 9)).is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_set() -> impl Strategy<Value = PointSet> {
            proptest::collection::btree_set((-3i64..4, -3i64..4), 0..20)
                .prop_map(|s| s.into_iter().map(|(x, y)| Point::new(x, y)).collect())
        }

        fn dir() -> impl Strategy<Value = Direction> {
            prop_oneof![
                Just(Direction::N),
                Just(Direction::E),
                Just(Direction::S),
                Just(Direction::W)
            ]
        }

        proptest! {
            #[test]
            fn d_free_flips_when_neighbor_added(s in small_set(), d in dir(), idx in 0usize..20) {
                prop_assume!(!s.is_empty());
                let p = s.iter().nth(idx % s.len()).unwrap();
                let mut with = s.clone();
                with.insert(d.apply(p));
                // The equivalence only has content when d(p) is not already present.
                if !s.contains(d.apply(p)) {
                    prop_assert_eq!(d_free(&s, p, d).unwrap(), !d_free(&with, p, d).unwrap());
                }
                prop_assert!(!d_free(&with, p, d).unwrap());
            }

            #[test]
            fn trees_are_connected_with_two_leaves(s in small_set()) {
                if is_tree(&s) {
                    prop_assert!(is_connected(&s));
                    if s.len() >= 2 {
                        let leaves = s.iter().filter(|&p| free_count(&s, p) == 3).count();
                        prop_assert!(leaves >= 2);
                    }
                }
            }

            #[test]
            fn components_partition_the_set(s in small_set()) {
                let comps = components(&s);
                let total: usize = comps.iter().map(PointSet::len).sum();
                prop_assert_eq!(total, s.len());
                for c in &comps {
                    prop_assert!(is_connected(c));
                }
            }
        }
    }
}
