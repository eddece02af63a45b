//! Inverse limits of zigzag diagrams of finite sets and of partition algebras.
//!
//! A diagram has fibers `F_0, F_1, …` and cobordisms `K_0, K_1, …`. Cobordism
//! `K_i` receives `left_maps[i]: F_i → K_i` and `right_maps[i]: F_{i+1} → K_i`.
//! On a circle there are as many fibers as cobordisms and `F_n` is `F_0`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::components::UnionFind;
use crate::error::{EvasionError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Interval,
    Circle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagSetDiagram {
    pub shape: Shape,
    pub fiber_sizes: Vec<usize>,
    pub cobordism_sizes: Vec<usize>,
    pub left_maps: Vec<Vec<usize>>,
    pub right_maps: Vec<Vec<usize>>,
}

impl ZigzagSetDiagram {
    pub fn new(
        shape: Shape,
        fiber_sizes: Vec<usize>,
        cobordism_sizes: Vec<usize>,
        left_maps: Vec<Vec<usize>>,
        right_maps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let z = ZigzagSetDiagram {
            shape,
            fiber_sizes,
            cobordism_sizes,
            left_maps,
            right_maps,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn cobordism_count(&self) -> usize {
        self.cobordism_sizes.len()
    }

    /// Index of the fiber on the right of cobordism `i`.
    pub fn right_fiber(&self, i: usize) -> usize {
        match self.shape {
            Shape::Interval => i + 1,
            Shape::Circle => (i + 1) % self.fiber_sizes.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.cobordism_sizes.len();
        let expected = match self.shape {
            Shape::Interval => n + 1,
            Shape::Circle => n,
        };
        if n == 0 && self.shape == Shape::Circle {
            return Err(EvasionError::IncompatibleDiagram(
                "circle with no cobordisms".into(),
            ));
        }
        if self.fiber_sizes.len() != expected
            || self.left_maps.len() != n
            || self.right_maps.len() != n
        {
            return Err(EvasionError::IncompatibleDiagram(format!(
                "{} fibers, {} left maps and {} right maps for {n} cobordisms",
                self.fiber_sizes.len(),
                self.left_maps.len(),
                self.right_maps.len()
            )));
        }
        for i in 0..n {
            for (map, fiber, side) in [
                (&self.left_maps[i], i, "left"),
                (&self.right_maps[i], self.right_fiber(i), "right"),
            ] {
                if map.len() != self.fiber_sizes[fiber] {
                    return Err(EvasionError::IncompatibleDiagram(format!(
                        "{side} map {i} has domain size {}, fiber {fiber} has {}",
                        map.len(),
                        self.fiber_sizes[fiber]
                    )));
                }
                if map.iter().any(|&u| u >= self.cobordism_sizes[i]) {
                    return Err(EvasionError::IncompatibleDiagram(format!(
                        "{side} map {i} leaves cobordism {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of fiber entries in a limit element.
    pub fn element_len(&self) -> usize {
        self.fiber_sizes.len()
    }

    /// Whether `x` (one label per fiber) is a compatible family.
    pub fn is_element(&self, x: &[usize]) -> bool {
        x.len() == self.element_len()
            && x.iter().zip(&self.fiber_sizes).all(|(&a, &n)| a < n)
            && (0..self.cobordism_count())
                .all(|i| self.left_maps[i][x[i]] == self.right_maps[i][x[self.right_fiber(i)]])
    }

    // preimages of the right map: for each cobordism element, the fiber elements over it
    fn right_preimages(&self) -> Vec<Vec<Vec<usize>>> {
        (0..self.cobordism_count())
            .map(|i| {
                let mut pre = vec![Vec::new(); self.cobordism_sizes[i]];
                for (y, &u) in self.right_maps[i].iter().enumerate() {
                    pre[u].push(y);
                }
                pre
            })
            .collect()
    }

    // feasible[i][x]: some compatible continuation exists from x in fiber i to the end;
    // on a circle the continuation must close up at `closing`.
    fn feasibility(&self, closing: Option<usize>) -> Vec<Vec<bool>> {
        let m = self.fiber_sizes.len();
        let mut feas: Vec<Vec<bool>> = self.fiber_sizes.iter().map(|&k| vec![false; k]).collect();
        match closing {
            None => feas[m - 1].iter_mut().for_each(|f| *f = true),
            Some(x0) => {
                let last = self.cobordism_count() - 1;
                let target = self.right_maps[last][x0];
                for y in 0..self.fiber_sizes[m - 1] {
                    feas[m - 1][y] = self.left_maps[last][y] == target;
                }
            }
        }
        for i in (0..m - 1).rev() {
            let mut reach = vec![false; self.cobordism_sizes[i]];
            for (y, &u) in self.right_maps[i].iter().enumerate() {
                if feas[i + 1][y] {
                    reach[u] = true;
                }
            }
            for x in 0..self.fiber_sizes[i] {
                feas[i][x] = reach[self.left_maps[i][x]];
            }
        }
        feas
    }
}

// one transfer step through cobordism i
fn transfer(z: &ZigzagSetDiagram, i: usize, v: &[BigUint]) -> Vec<BigUint> {
    let mut w = vec![BigUint::zero(); z.cobordism_sizes[i]];
    for (a, &u) in z.left_maps[i].iter().enumerate() {
        w[u] += &v[a];
    }
    z.right_maps[i].iter().map(|&u| w[u].clone()).collect()
}

/// Cardinality of the inverse limit by transfer counting. On a circle this is
/// the trace of the composed relation.
pub fn limit_cardinality(z: &ZigzagSetDiagram) -> BigUint {
    let n = z.cobordism_count();
    match z.shape {
        Shape::Interval => {
            let mut v = vec![BigUint::one(); z.fiber_sizes[0]];
            for i in 0..n {
                v = transfer(z, i, &v);
            }
            v.into_iter().sum()
        }
        Shape::Circle => {
            let mut total = BigUint::zero();
            for x0 in 0..z.fiber_sizes[0] {
                let mut v = vec![BigUint::zero(); z.fiber_sizes[0]];
                v[x0] = BigUint::one();
                for i in 0..n {
                    v = transfer(z, i, &v);
                }
                total += &v[x0];
            }
            total
        }
    }
}

/// Lexicographic enumeration of limit elements, computed on demand.
pub struct LimitElements<'a> {
    z: &'a ZigzagSetDiagram,
    pre: Vec<Vec<Vec<usize>>>,
    feas: Vec<Vec<bool>>,
    stack: Vec<(Vec<usize>, usize)>,
    cur: Vec<usize>,
    started: bool,
}

impl<'a> LimitElements<'a> {
    pub fn new(z: &'a ZigzagSetDiagram) -> Self {
        let feas = match z.shape {
            Shape::Interval => z.feasibility(None),
            Shape::Circle => Vec::new(),
        };
        LimitElements {
            z,
            pre: z.right_preimages(),
            feas,
            stack: Vec::new(),
            cur: vec![0; z.element_len()],
            started: false,
        }
    }
}

impl Iterator for LimitElements<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let z = self.z;
        let m = z.element_len();
        if !self.started {
            self.started = true;
            if m == 0 {
                return None;
            }
            let first: Vec<usize> = (0..z.fiber_sizes[0])
                .filter(|&x| z.shape == Shape::Circle || self.feas[0][x])
                .collect();
            self.stack.push((first, 0));
        }
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            let (cands, pos) = self.stack.last_mut().expect("nonempty");
            if *pos >= cands.len() {
                self.stack.pop();
                continue;
            }
            let x = cands[*pos];
            *pos += 1;
            self.cur[depth] = x;
            if depth == 0 && z.shape == Shape::Circle {
                self.feas = z.feasibility(Some(x));
                if !self.feas[0][x] {
                    continue;
                }
            }
            if depth + 1 == m {
                return Some(self.cur.clone());
            }
            let u = z.left_maps[depth][x];
            let next: Vec<usize> = self.pre[depth][u]
                .iter()
                .copied()
                .filter(|&y| self.feas[depth + 1][y])
                .collect();
            self.stack.push((next, 0));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitResult {
    pub cardinality: BigUint,
    pub elements: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Cardinality plus at most `cap` elements in lexicographic order.
pub fn inverse_limit(z: &ZigzagSetDiagram, cap: usize) -> LimitResult {
    let cardinality = limit_cardinality(z);
    let mut elements: Vec<Vec<usize>> = LimitElements::new(z).take(cap.saturating_add(1)).collect();
    let truncated = elements.len() > cap;
    elements.truncate(cap);
    LimitResult {
        cardinality,
        elements,
        truncated,
    }
}

/// A subalgebra of functions on `{0, …, n−1}`, stored as the coarsest
/// partition on which all its functions are constant. Blocks are numbered by
/// their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionAlgebra {
    block_of: Vec<usize>,
    block_count: usize,
}

impl PartitionAlgebra {
    /// Builds a partition from arbitrary block keys, renumbering canonically.
    pub fn from_keys<K: Ord + Clone>(keys: &[K]) -> Self {
        let mut seen: BTreeMap<K, usize> = BTreeMap::new();
        let mut block_of = Vec::with_capacity(keys.len());
        for k in keys {
            let next = seen.len();
            block_of.push(*seen.entry(k.clone()).or_insert(next));
        }
        PartitionAlgebra {
            block_count: seen.len(),
            block_of,
        }
    }

    /// Every element in its own block: the full function algebra.
    pub fn discrete(n: usize) -> Self {
        PartitionAlgebra {
            block_of: (0..n).collect(),
            block_count: n,
        }
    }

    /// One block: the constants.
    pub fn unit(n: usize) -> Self {
        PartitionAlgebra {
            block_of: vec![0; n],
            block_count: usize::from(n > 0),
        }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut keys = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(EvasionError::IncompatibleDiagram("empty block".into()));
            }
            for &x in block {
                if x >= n || keys[x] != usize::MAX {
                    return Err(EvasionError::IncompatibleDiagram(format!(
                        "element {x} is out of range or repeated"
                    )));
                }
                keys[x] = b;
            }
        }
        if keys.contains(&usize::MAX) {
            return Err(EvasionError::IncompatibleDiagram(
                "blocks do not cover the ground set".into(),
            ));
        }
        Ok(PartitionAlgebra::from_keys(&keys))
    }

    pub fn ground_size(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    /// Blocks as ascending element lists, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// Whether `f` is constant on every block.
    pub fn contains(&self, f: &[i64]) -> bool {
        let mut val: Vec<Option<i64>> = vec![None; self.block_count];
        for (x, &v) in f.iter().enumerate() {
            let slot = &mut val[self.block_of[x]];
            match slot {
                Some(w) if *w != v => return false,
                _ => *slot = Some(v),
            }
        }
        true
    }
}

/// Coarsest partition on which every functional (and the unit) is constant.
pub fn partition_from_functionals(n: usize, vs: &[Vec<i64>]) -> Result<PartitionAlgebra> {
    if let Some(v) = vs.iter().find(|v| v.len() != n) {
        return Err(EvasionError::Precondition(format!(
            "functional defined on {} elements, ground set has {n}",
            v.len()
        )));
    }
    let keys: Vec<Vec<i64>> = (0..n).map(|x| vs.iter().map(|v| v[x]).collect()).collect();
    Ok(PartitionAlgebra::from_keys(&keys))
}

/// Algebra morphisms to the field: one evaluation per block.
pub fn dualize(a: &PartitionAlgebra) -> Vec<Vec<usize>> {
    a.blocks()
}

/// Partition of `{u on S : u∘g constant on every block of p}` for `g: T → S`.
pub fn pullback_partition(
    g: &[usize],
    target_size: usize,
    p: &PartitionAlgebra,
) -> Result<PartitionAlgebra> {
    if g.len() != p.ground_size() {
        return Err(EvasionError::Precondition(format!(
            "map defined on {} elements, partition has {}",
            g.len(),
            p.ground_size()
        )));
    }
    if let Some(&u) = g.iter().find(|&&u| u >= target_size) {
        return Err(EvasionError::Precondition(format!(
            "map value {u} out of range"
        )));
    }
    let mut uf = UnionFind::with_size(target_size);
    let mut first = vec![usize::MAX; p.block_count()];
    for (x, &u) in g.iter().enumerate() {
        let b = p.block_of(x);
        if first[b] == usize::MAX {
            first[b] = u;
        } else {
            uf.union(first[b], u);
        }
    }
    let keys: Vec<usize> = (0..target_size).map(|u| uf.find(u)).collect();
    Ok(PartitionAlgebra::from_keys(&keys))
}

/// A zigzag of partition algebras whose structure maps are ground-set maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagAlgebraDiagram {
    pub shape: Shape,
    pub fiber_algebras: Vec<PartitionAlgebra>,
    pub cobordism_algebras: Vec<PartitionAlgebra>,
    pub left_maps: Vec<Vec<usize>>,
    pub right_maps: Vec<Vec<usize>>,
}

impl ZigzagAlgebraDiagram {
    /// The ground-set diagram underlying the algebras.
    pub fn ground_diagram(&self) -> Result<ZigzagSetDiagram> {
        ZigzagSetDiagram::new(
            self.shape,
            self.fiber_algebras
                .iter()
                .map(|a| a.ground_size())
                .collect(),
            self.cobordism_algebras
                .iter()
                .map(|a| a.ground_size())
                .collect(),
            self.left_maps.clone(),
            self.right_maps.clone(),
        )
    }
}

fn block_map(
    g: &[usize],
    from: &PartitionAlgebra,
    to: &PartitionAlgebra,
    what: &str,
) -> Result<Vec<usize>> {
    let mut out = vec![usize::MAX; from.block_count()];
    for (x, &u) in g.iter().enumerate() {
        let b = from.block_of(x);
        let c = to.block_of(u);
        if out[b] == usize::MAX {
            out[b] = c;
        } else if out[b] != c {
            return Err(EvasionError::IncompatibleDiagram(format!(
                "{what}: fiber block {b} meets cobordism blocks {} and {c}",
                out[b]
            )));
        }
    }
    Ok(out)
}

/// The set diagram of algebra morphisms to the field.
pub fn dual_diagram(za: &ZigzagAlgebraDiagram) -> Result<ZigzagSetDiagram> {
    let ground = za.ground_diagram()?;
    let n = ground.cobordism_count();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let cob = &za.cobordism_algebras[i];
        left.push(block_map(
            &za.left_maps[i],
            &za.fiber_algebras[i],
            cob,
            &format!("left map {i}"),
        )?);
        let j = ground.right_fiber(i);
        right.push(block_map(
            &za.right_maps[i],
            &za.fiber_algebras[j],
            cob,
            &format!("right map {i}"),
        )?);
    }
    ZigzagSetDiagram::new(
        za.shape,
        za.fiber_algebras.iter().map(|a| a.block_count()).collect(),
        za.cobordism_algebras
            .iter()
            .map(|a| a.block_count())
            .collect(),
        left,
        right,
    )
}

pub fn limit_of_algebras(za: &ZigzagAlgebraDiagram, cap: usize) -> Result<LimitResult> {
    Ok(inverse_limit(&dual_diagram(za)?, cap))
}

/// Whether the given bijections (fibers first, then cobordisms) form an
/// isomorphism `a → b` commuting with all maps.
pub fn is_isomorphism(
    a: &ZigzagSetDiagram,
    b: &ZigzagSetDiagram,
    fiber_maps: &[Vec<usize>],
    cobordism_maps: &[Vec<usize>],
) -> bool {
    fn bijective(f: &[usize], n: usize, m: usize) -> bool {
        if f.len() != n || n != m {
            return false;
        }
        let mut seen = vec![false; m];
        f.iter()
            .all(|&y| y < m && !std::mem::replace(&mut seen[y], true))
    }
    if a.shape != b.shape
        || a.fiber_sizes.len() != b.fiber_sizes.len()
        || a.cobordism_count() != b.cobordism_count()
        || fiber_maps.len() != a.fiber_sizes.len()
        || cobordism_maps.len() != a.cobordism_count()
    {
        return false;
    }
    for (i, f) in fiber_maps.iter().enumerate() {
        if !bijective(f, a.fiber_sizes[i], b.fiber_sizes[i]) {
            return false;
        }
    }
    for (i, f) in cobordism_maps.iter().enumerate() {
        if !bijective(f, a.cobordism_sizes[i], b.cobordism_sizes[i]) {
            return false;
        }
    }
    (0..a.cobordism_count()).all(|i| {
        let j = a.right_fiber(i);
        (0..a.fiber_sizes[i])
            .all(|x| cobordism_maps[i][a.left_maps[i][x]] == b.left_maps[i][fiber_maps[i][x]])
            && (0..a.fiber_sizes[j])
                .all(|y| cobordism_maps[i][a.right_maps[i][y]] == b.right_maps[i][fiber_maps[j][y]])
    })
}

/// Searches for an isomorphism by backtracking over fiber bijections.
/// Returns `(fiber_maps, cobordism_maps)`.
pub fn find_isomorphism(
    a: &ZigzagSetDiagram,
    b: &ZigzagSetDiagram,
) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    if a.shape != b.shape
        || a.fiber_sizes != b.fiber_sizes
        || a.cobordism_sizes != b.cobordism_sizes
    {
        return None;
    }
    let mut fibers: Vec<Vec<usize>> = Vec::new();
    let mut budget = 1_000_000usize;
    if search_fibers(a, b, &mut fibers, &mut budget) {
        let cobs = (0..a.cobordism_count())
            .map(|i| complete_cobordism(a, b, &fibers, i).expect("consistent"))
            .collect();
        Some((fibers, cobs))
    } else {
        None
    }
}

// cobordism bijection forced by the fiber bijections on both sides, if consistent
fn complete_cobordism(
    a: &ZigzagSetDiagram,
    b: &ZigzagSetDiagram,
    fibers: &[Vec<usize>],
    i: usize,
) -> Option<Vec<usize>> {
    let k = a.cobordism_sizes[i];
    let mut sigma = vec![usize::MAX; k];
    let mut used = vec![false; k];
    let j = a.right_fiber(i);
    let pairs = (0..a.fiber_sizes[i])
        .map(|x| (a.left_maps[i][x], b.left_maps[i][fibers[i][x]]))
        .chain((0..a.fiber_sizes[j]).map(|y| (a.right_maps[i][y], b.right_maps[i][fibers[j][y]])));
    for (u, v) in pairs {
        if sigma[u] == usize::MAX {
            if used[v] {
                return None;
            }
            sigma[u] = v;
            used[v] = true;
        } else if sigma[u] != v {
            return None;
        }
    }
    // elements hit by neither map are interchangeable
    let mut free = (0..k).filter(|&v| !used[v]);
    for s in sigma.iter_mut() {
        if *s == usize::MAX {
            *s = free.next()?;
        }
    }
    Some(sigma)
}

// partial consistency of the left map of cobordism i given only fiber i
fn left_consistent(a: &ZigzagSetDiagram, b: &ZigzagSetDiagram, f: &[usize], i: usize) -> bool {
    let k = a.cobordism_sizes[i];
    let mut sigma = vec![usize::MAX; k];
    let mut inv = vec![usize::MAX; k];
    for x in 0..f.len() {
        let (u, v) = (a.left_maps[i][x], b.left_maps[i][f[x]]);
        if (sigma[u] != usize::MAX && sigma[u] != v) || (inv[v] != usize::MAX && inv[v] != u) {
            return false;
        }
        sigma[u] = v;
        inv[v] = u;
    }
    true
}

fn search_fibers(
    a: &ZigzagSetDiagram,
    b: &ZigzagSetDiagram,
    fibers: &mut Vec<Vec<usize>>,
    budget: &mut usize,
) -> bool {
    let i = fibers.len();
    if i == a.fiber_sizes.len() {
        return (0..a.cobordism_count()).all(|c| complete_cobordism(a, b, fibers, c).is_some());
    }
    let n = a.fiber_sizes[i];
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    permute(a, b, fibers, &mut perm, &mut used, budget)
}

fn permute(
    a: &ZigzagSetDiagram,
    b: &ZigzagSetDiagram,
    fibers: &mut Vec<Vec<usize>>,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let i = fibers.len();
    let n = a.fiber_sizes[i];
    if perm.len() == n {
        // check the cobordism between the previous fiber and this one
        if i > 0 {
            fibers.push(perm.clone());
            let ok = complete_cobordism(a, b, fibers, i - 1).is_some();
            if ok && search_fibers(a, b, fibers, budget) {
                return true;
            }
            fibers.pop();
            return false;
        }
        fibers.push(perm.clone());
        if search_fibers(a, b, fibers, budget) {
            return true;
        }
        fibers.pop();
        return false;
    }
    for y in 0..n {
        if used[y] {
            continue;
        }
        perm.push(y);
        used[y] = true;
        let ok = i >= a.cobordism_count() || left_consistent(a, b, perm, i);
        if ok && permute(a, b, fibers, perm, used, budget) {
            return true;
        }
        perm.pop();
        used[y] = false;
    }
    false
}
