//! Small generators and tile systems with known behavior.

use std::collections::{BTreeMap, VecDeque};

use crate::atam::{run, Assembly, AssemblySequence, Glue, Policy, Region, TileSystem, TileType};
use crate::dssf::{self, select_pier_anchor, DssfError, Generator};
use crate::grid::{Direction, Point, PointSet};
use crate::windows::window_profile;

fn gen(g: i64, cells: &[(i64, i64)]) -> Generator {
    Generator::new(g, cells.iter().map(|&(x, y)| Point::new(x, y)).collect()).expect("fixture generator is valid")
}

/// `{(0,0), (1,0), (0,1)}`.
pub fn sierpinski() -> Generator {
    gen(2, &[(0, 0), (1, 0), (0, 1)])
}

/// `{(0,0), (1,0), (1,1)}`.
pub fn l_shape() -> Generator {
    gen(2, &[(0, 0), (1, 0), (1, 1)])
}

/// Side-4 tree generator whose pier `(3,2)` points east off a horizontal
/// bar, so its h-bridge sits on row 2.
pub fn fig1_generator() -> Generator {
    gen(4, &[(0, 0), (0, 1), (0, 2), (0, 3), (1, 2), (2, 2), (3, 2)])
}

/// Comb with a tooth at `(2,1)` that belongs to neither bridge.
pub fn real_pier_generator() -> Generator {
    gen(4, &[(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (0, 2), (0, 3), (2, 1)])
}

/// Temperature 2. Arms `E` at `(1,0)` and `N` at `(0,1)` bind the seed with
/// strength 2; the corner `C` at `(1,1)` has one strength-1 glue per arm.
pub fn cooperation_system() -> TileSystem {
    let null = Glue::null;
    let tiles = vec![
        TileType::new("O", Glue::new("n", 2), Glue::new("e", 2), null(), null()),
        TileType::new("E", Glue::new("ce", 1), null(), null(), Glue::new("e", 2)),
        TileType::new("N", null(), Glue::new("cn", 1), Glue::new("n", 2), null()),
        TileType::new("C", null(), null(), Glue::new("ce", 1), Glue::new("cn", 1)),
    ];
    TileSystem::new(tiles, Assembly::singleton(Point::ORIGIN, 0), 2).expect("fixture system is valid")
}

/// One tile type per cell of a connected `shape`, glued along a BFS
/// spanning tree rooted at `root` with distinct strength-1 labels, at
/// temperature 1. `labels` overrides the label on chosen tree edges, keyed
/// by the parent cell and the direction toward the child.
///
/// Panics if `shape` is disconnected or misses `root`.
pub fn tree_system(shape: &PointSet, root: Point, labels: &BTreeMap<(Point, Direction), String>) -> TileSystem {
    assert!(shape.contains(root), "root outside shape");
    let mut glues: BTreeMap<Point, [Glue; 4]> = shape.iter().map(|p| (p, Default::default())).collect();
    let mut seen = PointSet::new();
    seen.insert(root);
    let mut queue = VecDeque::from([root]);
    let mut next = 0usize;
    while let Some(p) = queue.pop_front() {
        for d in Direction::ALL {
            let q = d.apply(p);
            if !shape.contains(q) || seen.contains(q) {
                continue;
            }
            seen.insert(q);
            queue.push_back(q);
            let label = labels.get(&(p, d)).cloned().unwrap_or_else(|| format!("e{next}"));
            next += 1;
            glues.get_mut(&p).unwrap()[d.index()] = Glue::new(label.clone(), 1);
            glues.get_mut(&q).unwrap()[d.inverse().index()] = Glue::new(label, 1);
        }
    }
    assert_eq!(seen.len(), shape.len(), "shape is disconnected");
    let mut tiles = Vec::with_capacity(shape.len());
    let mut root_id = 0;
    for (p, [n, e, s, w]) in glues {
        if p == root {
            root_id = tiles.len();
        }
        tiles.push(TileType::new(format!("t{}_{}", p.x, p.y), n, e, s, w));
    }
    TileSystem::new(tiles, Assembly::singleton(root, root_id), 1).expect("tree system is valid")
}

/// Stage 2 of [`sierpinski`] grown by [`tree_system`] from the origin,
/// with its deterministic run.
pub fn sierpinski_x2_path_run() -> (TileSystem, AssemblySequence) {
    let shape = dssf::stage(&sierpinski(), 2).expect("stage fits");
    let sys = tree_system(&shape, Point::ORIGIN, &BTreeMap::new());
    let seq = run(&sys, &Region::square(4), Policy::Lexicographic, 64).expect("run succeeds");
    (sys, seq)
}

/// Column at `x = 0` growing north from a seed at the origin. Rows above
/// the seed alternate `A`, `B` with north/south labels `y` then `x`, so the
/// column repeats with period 2 from row 1. East and west sides are null.
pub fn ribbon_system() -> TileSystem {
    let null = Glue::null;
    let tiles = vec![
        TileType::new("S", Glue::new("x", 1), null(), null(), null()),
        TileType::new("A", Glue::new("y", 1), null(), Glue::new("x", 1), null()),
        TileType::new("B", Glue::new("x", 1), null(), Glue::new("y", 1), null()),
    ];
    TileSystem::new(tiles, Assembly::singleton(Point::ORIGIN, 0), 1).expect("fixture system is valid")
}

/// [`ribbon_system`] run to rows `0..=height`.
pub fn ribbon_run(height: i64) -> (TileSystem, AssemblySequence) {
    let sys = ribbon_system();
    let region = Region::new(Point::ORIGIN, Point::new(0, height));
    let seq = run(&sys, &region, Policy::Lexicographic, height as usize + 1).expect("run succeeds");
    (sys, seq)
}

/// Labels for the glue lines of the windows `W^c_s`, `2 ≤ s ≤ max_stage`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PierLineGlues {
    /// One shared label `p` on every glue line.
    Uniform,
    /// Label `p<s>` on the glue line of `W^c_s`.
    StageIndexed,
}

/// [`tree_system`] for `scale(stage(gen, max_stage), c)` rooted at the
/// origin, with the glue lines of the selected pier windows relabelled.
pub fn pier_line_system(gen: &Generator, c: i64, max_stage: i64, glues: PierLineGlues) -> Result<TileSystem, DssfError> {
    let shape = dssf::scale(&dssf::stage(gen, max_stage)?, c)?;
    let pa = select_pier_anchor(gen)?;
    let mut labels = BTreeMap::new();
    for s in 2..=max_stage {
        let w = pa.window(gen.g(), c, s).window()?;
        for (inside, outside) in window_profile(&shape, &w).glue_pairs {
            let d = Direction::from_delta(inside - outside).expect("glue pair is adjacent");
            let label = match glues {
                PierLineGlues::Uniform => "p".to_string(),
                PierLineGlues::StageIndexed => format!("p{s}"),
            };
            labels.insert((outside, d), label);
        }
    }
    Ok(tree_system(&shape, Point::ORIGIN, &labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atam::{check_strict_self_assembly, default_policies, StrictVerdict};

    #[test]
    fn tree_system_assembles_its_shape() {
        let (sys, seq) = sierpinski_x2_path_run();
        assert_eq!(sys.tiles().len(), 9);
        assert_eq!(seq.result.domain(), dssf::stage(&sierpinski(), 2).unwrap());
    }

    #[test]
    fn ribbon_alternates() {
        let (sys, seq) = ribbon_run(5);
        let names: Vec<&str> = (0..=5).map(|y| sys.tile(seq.result.get(Point::new(0, y)).unwrap()).name.as_str()).collect();
        assert_eq!(names, ["S", "A", "B", "A", "B", "A"]);
    }

    #[test]
    fn stage_indexed_system_is_strict() {
        let g = sierpinski();
        let sys = pier_line_system(&g, 1, 3, PierLineGlues::StageIndexed).unwrap();
        let target = dssf::stage(&g, 3).unwrap();
        let v = check_strict_self_assembly(&sys, &target, &Region::square(8), &default_policies()).unwrap();
        assert_eq!(v, StrictVerdict::IncompleteOk { clipped: vec![] });
    }

    #[test]
    fn glue_lines_are_relabelled() {
        let sys = pier_line_system(&sierpinski(), 1, 4, PierLineGlues::Uniform).unwrap();
        let shared = sys.tiles().iter().filter(|t| Direction::ALL.iter().any(|&d| t.glue(d).label == "p")).count();
        // Three windows, one edge each, two tiles per edge.
        assert_eq!(shared, 6);
    }
}
