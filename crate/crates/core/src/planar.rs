//! Holes of a planar cell region, winding numbers of their boundary loops, and
//! the partition of boundary components those winding numbers induce.
//!
//! Cell `(i, j)` occupies `[i, i+1] × [j, j+1]` in vertex coordinates.

use std::fmt::Write as _;

use crate::components::{label_grid, Adjacency, Labeling, NO_LABEL};
use crate::error::{EvasionError, Result};
use crate::limit::{partition_from_functionals, PartitionAlgebra};
use crate::rasterize::{face_cells, FACE_DIRS};

pub type Vertex = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hole {
    /// Least cell index of the hole.
    pub representative: usize,
    /// Counterclockwise vertex loop around the filled hole; the last vertex
    /// connects back to the first.
    pub cycle: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HoleBasis {
    pub holes: Vec<Hole>,
}

fn flood_from_frame(blocked: &[bool], nx: usize, ny: usize) -> Vec<bool> {
    let mut seen = vec![false; nx * ny];
    let mut stack = Vec::new();
    for idx in 0..nx * ny {
        let (i, j) = (idx % nx, idx / nx);
        if (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) && !blocked[idx] {
            seen[idx] = true;
            stack.push(idx);
        }
    }
    while let Some(idx) = stack.pop() {
        let (i, j) = (idx % nx, idx / nx);
        let nbrs = [
            (i > 0).then(|| idx - 1),
            (i + 1 < nx).then(|| idx + 1),
            (j > 0).then(|| idx - nx),
            (j + 1 < ny).then(|| idx + nx),
        ];
        for m in nbrs.into_iter().flatten() {
            if !blocked[m] && !seen[m] {
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    seen
}

// counterclockwise boundary of a 4-connected cell set with 4-connected complement
fn trace_outer(filled: &[bool], nx: usize, ny: usize) -> Vec<Vertex> {
    let inside = |i: i64, j: i64| {
        i >= 0
            && j >= 0
            && (i as usize) < nx
            && (j as usize) < ny
            && filled[j as usize * nx + i as usize]
    };
    let mut next: std::collections::HashMap<Vertex, Vertex> = std::collections::HashMap::new();
    let mut start: Option<Vertex> = None;
    for idx in 0..nx * ny {
        if !filled[idx] {
            continue;
        }
        let (i, j) = ((idx % nx) as i64, (idx / nx) as i64);
        // each edge keeps the cell on its left
        let edges = [
            (!inside(i, j - 1), [i, j], [i + 1, j]),
            (!inside(i + 1, j), [i + 1, j], [i + 1, j + 1]),
            (!inside(i, j + 1), [i + 1, j + 1], [i, j + 1]),
            (!inside(i - 1, j), [i, j + 1], [i, j]),
        ];
        for (exposed, a, b) in edges {
            if exposed {
                start.get_or_insert(a);
                next.insert(a, b);
            }
        }
    }
    let Some(start) = start else {
        return Vec::new();
    };
    let mut cycle = vec![start];
    let mut v = next[&start];
    while v != start {
        cycle.push(v);
        v = next[&v];
    }
    debug_assert_eq!(cycle.len(), next.len(), "boundary is not a single loop");
    cycle
}

/// Bounded complement components of `region` (face-connected, since the
/// region itself is corner-connected) with their outer boundary loops.
pub fn holes(region: &[bool], nx: usize, ny: usize) -> HoleBasis {
    let complement: Vec<bool> = region.iter().map(|&r| !r).collect();
    let lab = label_grid(&complement, nx, ny, Adjacency::Four);
    let mut touches = vec![false; lab.count];
    for (idx, &l) in lab.labels.iter().enumerate() {
        let (i, j) = (idx % nx, idx / nx);
        if l != NO_LABEL && (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) {
            touches[l as usize] = true;
        }
    }
    let reps = lab.representatives();
    let holes = (0..lab.count)
        .filter(|&h| !touches[h])
        .map(|h| {
            let in_hole: Vec<bool> = lab.labels.iter().map(|&l| l == h as u32).collect();
            let outside = flood_from_frame(&in_hole, nx, ny);
            let filled: Vec<bool> = outside.iter().map(|&o| !o).collect();
            Hole {
                representative: reps[h],
                cycle: trace_outer(&filled, nx, ny),
            }
        })
        .collect();
    HoleBasis { holes }
}

/// Winding number of a closed vertex loop around `p`, counted by signed
/// crossings of the rightward horizontal ray from `p`.
pub fn winding(cycle: &[Vertex], p: [f64; 2]) -> Result<i64> {
    let mut w = 0i64;
    let n = cycle.len();
    for k in 0..n {
        let a = [cycle[k][0] as f64, cycle[k][1] as f64];
        let b = [cycle[(k + 1) % n][0] as f64, cycle[(k + 1) % n][1] as f64];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        let within = p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1]);
        if cross == 0.0 && within {
            return Err(EvasionError::Precondition(format!(
                "point {p:?} lies on the cycle"
            )));
        }
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            w -= 1;
        }
    }
    Ok(w)
}

/// Representative point of every boundary component: the midpoint of its
/// least face, moved a quarter cell into the uncovered side.
pub fn boundary_representatives(
    covered: &[bool],
    b: &Labeling,
    nx: usize,
    ny: usize,
) -> Vec<[f64; 2]> {
    let mut reps = vec![[f64::NAN; 2]; b.count];
    let mut done = vec![false; b.count];
    for (f, &l) in b.labels.iter().enumerate() {
        if l == NO_LABEL || done[l as usize] {
            continue;
        }
        let (a, c) = face_cells(f, nx, ny, 1).expect("interface face");
        let free = if covered[a] { c } else { a };
        let (i, j) = ((free % nx) as f64, (free / nx) as f64);
        let center = [i + 0.5, j + 0.5];
        let (ai, aj) = ((a % nx) as f64, (a / nx) as f64);
        let mid = match f % FACE_DIRS {
            0 => [ai + 1.0, aj + 0.5],
            _ => [ai + 0.5, aj + 1.0],
        };
        reps[l as usize] = [
            0.75 * mid[0] + 0.25 * center[0],
            0.75 * mid[1] + 0.25 * center[1],
        ];
        done[l as usize] = true;
    }
    reps
}

/// Partition of the boundary components cut out by the winding functionals of
/// the hole loops of `c_region`.
pub fn alexander_image(
    c_region: &[bool],
    b: &Labeling,
    nx: usize,
    ny: usize,
) -> Result<PartitionAlgebra> {
    let basis = holes(c_region, nx, ny);
    let reps = boundary_representatives(c_region, b, nx, ny);
    let functionals = basis
        .holes
        .iter()
        .map(|h| {
            reps.iter()
                .map(|&p| winding(&h.cycle, p))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    partition_from_functionals(b.count, &functionals)
}

/// SVG path data for a loop, in vertex coordinates with `y` pointing up.
pub fn cycle_path(cycle: &[Vertex], ny: usize) -> String {
    let mut out = String::new();
    for (k, v) in cycle.iter().enumerate() {
        let _ = write!(
            out,
            "{}{} {}",
            if k == 0 { "M" } else { " L" },
            v[0],
            ny as i64 - v[1]
        );
    }
    out.push_str(" Z");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&str]) -> (Vec<bool>, usize, usize) {
        let ny = rows.len();
        let nx = rows[0].len();
        let mut mask = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            for (i, ch) in row.chars().enumerate() {
                mask[(ny - 1 - r) * nx + i] = ch == '#';
            }
        }
        (mask, nx, ny)
    }

    #[test]
    fn solid_square_has_no_holes() {
        let (m, nx, ny) = grid(&[".....", ".###.", ".###.", ".###.", "....."]);
        assert!(holes(&m, nx, ny).holes.is_empty());
    }

    #[test]
    fn square_annulus_has_one_hole() {
        let (m, nx, ny) = grid(&[".....", ".###.", ".#.#.", ".###.", "....."]);
        let h = holes(&m, nx, ny);
        assert_eq!(h.holes.len(), 1);
        assert_eq!(h.holes[0].representative, 2 * nx + 2);
        assert_eq!(h.holes[0].cycle, vec![[2, 2], [3, 2], [3, 3], [2, 3]]);
        assert_eq!(winding(&h.holes[0].cycle, [2.5, 2.5]).unwrap(), 1);
    }

    #[test]
    fn diagonal_gaps_do_not_open_holes() {
        // the region is corner-connected, so the complement leaks only through faces
        let (m, nx, ny) = grid(&[".....", ".##..", ".#.#.", "..##.", "....."]);
        assert_eq!(holes(&m, nx, ny).holes.len(), 1);
        let (m, nx, ny) = grid(&[".....", ".#...", ".#.#.", "..##.", "....."]);
        assert_eq!(holes(&m, nx, ny).holes.len(), 0);
    }

    #[test]
    fn winding_of_squares() {
        let sq = vec![[0, 0], [1, 0], [1, 1], [0, 1]];
        assert_eq!(winding(&sq, [0.5, 0.5]).unwrap(), 1);
        assert_eq!(winding(&sq, [1.5, 0.5]).unwrap(), 0);
        assert_eq!(winding(&sq, [-0.5, 0.5]).unwrap(), 0);
        let twice: Vec<Vertex> = sq.iter().chain(sq.iter()).copied().collect();
        assert_eq!(winding(&twice, [0.5, 0.5]).unwrap(), 2);
        let clockwise: Vec<Vertex> = sq.iter().rev().copied().collect();
        assert_eq!(winding(&clockwise, [0.5, 0.5]).unwrap(), -1);
        assert!(winding(&sq, [1.0, 0.5]).is_err());
        assert!(winding(&sq, [0.0, 0.0]).is_err());
    }

    #[test]
    fn nested_holes_wind_around_inner_points() {
        let (m, nx, ny) = grid(&[
            ".........",
            ".#######.",
            ".#.....#.",
            ".#.###.#.",
            ".#.#.#.#.",
            ".#.###.#.",
            ".#.....#.",
            ".#######.",
            ".........",
        ]);
        let h = holes(&m, nx, ny);
        assert_eq!(h.holes.len(), 2);
        // the outer hole's loop encloses the inner hole
        assert_eq!(winding(&h.holes[0].cycle, [4.5, 4.5]).unwrap(), 1);
        assert_eq!(winding(&h.holes[1].cycle, [2.5, 2.5]).unwrap(), 0);
    }

    #[test]
    fn cycle_path_format() {
        assert_eq!(cycle_path(&[[0, 0], [1, 0], [1, 1]], 2), "M0 2 L1 2 L1 1 Z");
    }
}
