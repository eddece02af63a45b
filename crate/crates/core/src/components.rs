//! Union-find labeling of cell sets on planar grids and on stacks of grids.

pub const NO_LABEL: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn with_size(size: usize) -> Self {
        UnionFind {
            parent: (0..size as u32).collect(),
            rank: vec![0; size],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] = self.rank[ra].saturating_add(1);
            }
        }
    }
}

/// Planar neighborhood used within one grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    Four,
    Eight,
}

/// Which cells of the next grid in a stack count as neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Temporal {
    SameCell,
    SameOrFour,
    SameOrEight,
}

/// Component labels; `labels[i] == NO_LABEL` for cells outside the set.
/// Labels are numbered in order of each component's least cell index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<u32>,
    pub count: usize,
}

impl Labeling {
    pub fn label(&self, idx: usize) -> Option<usize> {
        match self.labels[idx] {
            NO_LABEL => None,
            l => Some(l as usize),
        }
    }

    /// Least cell index of every component.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps = vec![usize::MAX; self.count];
        for (idx, &l) in self.labels.iter().enumerate() {
            if l != NO_LABEL && reps[l as usize] == usize::MAX {
                reps[l as usize] = idx;
            }
        }
        reps
    }

    /// Cells of every component, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (idx, &l) in self.labels.iter().enumerate() {
            if l != NO_LABEL {
                out[l as usize].push(idx);
            }
        }
        out
    }
}

fn canonical(mask: &[bool], uf: &mut UnionFind) -> Labeling {
    let mut root_label = vec![NO_LABEL; mask.len()];
    let mut labels = vec![NO_LABEL; mask.len()];
    let mut count = 0u32;
    for idx in 0..mask.len() {
        if !mask[idx] {
            continue;
        }
        let r = uf.find(idx);
        if root_label[r] == NO_LABEL {
            root_label[r] = count;
            count += 1;
        }
        labels[idx] = root_label[r];
    }
    Labeling {
        labels,
        count: count as usize,
    }
}

const FORWARD_FOUR: [(isize, isize); 2] = [(1, 0), (0, 1)];
const FORWARD_EIGHT: [(isize, isize); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];
const ALL_FOUR: [(isize, isize); 5] = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)];
const ALL_EIGHT: [(isize, isize); 9] = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

fn offset(i: usize, j: usize, d: (isize, isize), nx: usize, ny: usize) -> Option<usize> {
    let a = i as isize + d.0;
    let b = j as isize + d.1;
    if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
        None
    } else {
        Some(b as usize * nx + a as usize)
    }
}

fn union_layer(
    mask: &[bool],
    base: usize,
    nx: usize,
    ny: usize,
    adj: Adjacency,
    uf: &mut UnionFind,
) {
    let forward: &[(isize, isize)] = match adj {
        Adjacency::Four => &FORWARD_FOUR,
        Adjacency::Eight => &FORWARD_EIGHT,
    };
    for j in 0..ny {
        for i in 0..nx {
            let idx = base + j * nx + i;
            if !mask[idx] {
                continue;
            }
            for &d in forward {
                if let Some(n) = offset(i, j, d, nx, ny) {
                    if mask[base + n] {
                        uf.union(idx, base + n);
                    }
                }
            }
        }
    }
}

/// Components of `mask` on an `nx × ny` grid (row-major, `idx = j·nx + i`).
pub fn label_grid(mask: &[bool], nx: usize, ny: usize, adj: Adjacency) -> Labeling {
    assert_eq!(mask.len(), nx * ny);
    let mut uf = UnionFind::with_size(mask.len());
    union_layer(mask, 0, nx, ny, adj, &mut uf);
    canonical(mask, &mut uf)
}

/// Components of a stack of `nt` grids stored contiguously, slice-major.
///
/// Each slice is labeled on its own first; the slice components are then
/// joined across consecutive slices.
pub fn label_stack(
    mask: &[bool],
    nx: usize,
    ny: usize,
    nt: usize,
    spatial: Adjacency,
    temporal: Temporal,
) -> Labeling {
    let layer = nx * ny;
    assert_eq!(mask.len(), layer * nt);
    let slices: Vec<Labeling> = (0..nt)
        .map(|k| label_grid(&mask[k * layer..(k + 1) * layer], nx, ny, spatial))
        .collect();
    let mut base = Vec::with_capacity(nt + 1);
    base.push(0usize);
    for l in &slices {
        base.push(base.last().expect("nonempty") + l.count);
    }
    let mut uf = UnionFind::with_size(base[nt]);
    let between: &[(isize, isize)] = match temporal {
        Temporal::SameCell => &ALL_FOUR[..1],
        Temporal::SameOrFour => &ALL_FOUR,
        Temporal::SameOrEight => &ALL_EIGHT,
    };
    for k in 0..nt.saturating_sub(1) {
        let (lo, hi) = (&slices[k].labels, &slices[k + 1].labels);
        let mut last = (NO_LABEL, NO_LABEL);
        for j in 0..ny {
            for i in 0..nx {
                let a = lo[j * nx + i];
                if a == NO_LABEL {
                    continue;
                }
                for &d in between {
                    if let Some(n) = offset(i, j, d, nx, ny) {
                        let b = hi[n];
                        if b != NO_LABEL && (a, b) != last {
                            last = (a, b);
                            uf.union(base[k] + a as usize, base[k + 1] + b as usize);
                        }
                    }
                }
            }
        }
    }
    let mut root_label = vec![NO_LABEL; base[nt]];
    let mut labels = vec![NO_LABEL; mask.len()];
    let mut count = 0u32;
    for (k, l) in slices.iter().enumerate() {
        for (idx, &a) in l.labels.iter().enumerate() {
            if a == NO_LABEL {
                continue;
            }
            let r = uf.find(base[k] + a as usize);
            if root_label[r] == NO_LABEL {
                root_label[r] = count;
                count += 1;
            }
            labels[k * layer + idx] = root_label[r];
        }
    }
    Labeling {
        labels,
        count: count as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&str]) -> (Vec<bool>, usize, usize) {
        // rows are listed top to bottom
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
    fn empty_mask_has_no_components() {
        let l = label_grid(&[false; 12], 4, 3, Adjacency::Four);
        assert_eq!(l.count, 0);
    }

    #[test]
    fn diagonal_cells_depend_on_adjacency() {
        let (m, nx, ny) = grid(&["#.", ".#"]);
        assert_eq!(label_grid(&m, nx, ny, Adjacency::Four).count, 2);
        assert_eq!(label_grid(&m, nx, ny, Adjacency::Eight).count, 1);
    }

    #[test]
    fn labels_follow_least_index() {
        let (m, nx, ny) = grid(&["#..#", "#..."]);
        let l = label_grid(&m, nx, ny, Adjacency::Four);
        assert_eq!(l.count, 2);
        assert_eq!(l.label(0), Some(0));
        assert_eq!(l.label(7), Some(1));
        assert_eq!(l.representatives(), vec![0, 7]);
    }

    #[test]
    fn stack_temporal_links() {
        // two slices, a single cell that moves by a diagonal step
        let nx = 3;
        let ny = 3;
        let mut mask = vec![false; 18];
        mask[4] = true;
        mask[9 + 8] = true;
        assert_eq!(
            label_stack(&mask, nx, ny, 2, Adjacency::Four, Temporal::SameCell).count,
            2
        );
        assert_eq!(
            label_stack(&mask, nx, ny, 2, Adjacency::Four, Temporal::SameOrFour).count,
            2
        );
        assert_eq!(
            label_stack(&mask, nx, ny, 2, Adjacency::Four, Temporal::SameOrEight).count,
            1
        );
        mask[9 + 8] = false;
        mask[9 + 5] = true;
        assert_eq!(
            label_stack(&mask, nx, ny, 2, Adjacency::Four, Temporal::SameOrFour).count,
            1
        );
    }
}
