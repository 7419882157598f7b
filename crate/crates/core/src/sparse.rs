//! Sparse families, sparse operators, and two stopping-time constructions.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dyadic::{mean_over, Cell, Grid, GridFunction, GridTree};
use crate::math::{ceil, ln, powf};
use crate::maximal::weak_type_constant;
use crate::{Error, Result};

/// A family of cells of one grid in which every member's strict
/// descendants cover at most half of it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SparseFamily {
    pub grid: Grid,
    /// Members, level-major and index-ascending.
    pub members: Vec<Cell>,
    /// For each member, `E_Q` as indices into `grid.cells(L)`.
    pub exceptional: Vec<Vec<u32>>,
    /// Fraction of each member covered by its strict descendants.
    pub covered: Vec<f64>,
    /// Largest covered fraction.
    pub packing: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SparseError {
    #[error("descendants cover {covered} of a level-{} cell", cell.level)]
    Violation { cell: Cell, covered: f64 },
    #[error("cell does not belong to the grid")]
    ForeignCell(Cell),
    #[error(transparent)]
    Core(#[from] Error),
}

/// Finest cells of a grid, located per axis by their lower endpoint.
struct Atoms {
    dim: usize,
    /// Per axis: lower endpoints in increasing order, the segment end, and
    /// the enumeration position of that segment.
    los: [Vec<u64>; 2],
    his: [Vec<u64>; 2],
    enum_pos: [Vec<u32>; 2],
    count1: usize,
}

impl Atoms {
    fn new(grid: &Grid) -> Self {
        let d = grid.domain();
        let cells = grid.cells(d.depth());
        let dim = d.dim();
        let mut los: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
        let mut his: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
        let mut enum_pos: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        // Segments per axis in enumeration order.
        let per_axis: [Vec<(u64, u64)>; 2] = if dim == 1 {
            [cells.iter().map(|c| (c.region.lo()[0], c.region.hi()[0])).collect(), vec![(0, 1)]]
        } else {
            let count1 = {
                let first = cells[0].index[0];
                cells.iter().take_while(|c| c.index[0] == first && c.piece[0] == cells[0].piece[0]).count()
            };
            [
                cells.iter().step_by(count1).map(|c| (c.region.lo()[0], c.region.hi()[0])).collect(),
                cells[..count1].iter().map(|c| (c.region.lo()[1], c.region.hi()[1])).collect(),
            ]
        };
        for a in 0..2 {
            let mut order: Vec<usize> = (0..per_axis[a].len()).collect();
            order.sort_by_key(|&i| per_axis[a][i].0);
            los[a] = order.iter().map(|&i| per_axis[a][i].0).collect();
            his[a] = order.iter().map(|&i| per_axis[a][i].1).collect();
            enum_pos[a] = order.iter().map(|&i| i as u32).collect();
        }
        let count1 = per_axis[1].len();
        Atoms {
            dim,
            los,
            his,
            enum_pos,
            count1,
        }
    }

    /// Sorted-position ranges of the atoms inside a region, per axis.
    fn ranges(&self, cell: &Cell) -> [(usize, usize); 2] {
        let mut out = [(0, 1); 2];
        for (a, slot) in out.iter_mut().enumerate().take(self.dim) {
            let (lo, hi) = (cell.region.lo()[a], cell.region.hi()[a]);
            *slot = (self.los[a].partition_point(|&x| x < lo), self.los[a].partition_point(|&x| x < hi));
        }
        out
    }

    fn measure(&self, a0: usize, a1: usize) -> u64 {
        let m0 = self.his[0][a0] - self.los[0][a0];
        if self.dim == 1 {
            m0
        } else {
            m0 * (self.his[1][a1] - self.los[1][a1])
        }
    }

    fn id(&self, a0: usize, a1: usize) -> u32 {
        if self.dim == 1 {
            self.enum_pos[0][a0]
        } else {
            self.enum_pos[0][a0] * self.count1 as u32 + self.enum_pos[1][a1]
        }
    }
}

fn key(c: &Cell) -> (u32, [u32; 2], [u8; 2]) {
    (c.level, c.index, c.piece)
}

/// Whether `inner` is a strict descendant of `outer` in the sparse sense:
/// contained and either smaller or the same set at a deeper level.
fn strict_descendant(inner: &Cell, outer: &Cell) -> bool {
    outer.region.contains(&inner.region) && (inner.region != outer.region || inner.level > outer.level)
}

/// Checks the half-packing condition by direct measure arithmetic on the
/// grid's finest cells and builds the exceptional sets.
pub fn sparse_check(grid: &Grid, cells: &[Cell]) -> core::result::Result<SparseFamily, SparseError> {
    let d = grid.domain();
    for c in cells {
        if c.shift != grid.shift() || c.level > d.depth() || c.region.lo().len() != 2 {
            return Err(SparseError::ForeignCell(*c));
        }
    }
    let mut members: Vec<Cell> = Vec::new();
    let mut seen = BTreeSet::new();
    for c in cells {
        if seen.insert(key(c)) {
            members.push(*c);
        }
    }
    members.sort_by_key(key);
    let atoms = Atoms::new(grid);
    let mut exceptional = Vec::with_capacity(members.len());
    let mut covered = Vec::with_capacity(members.len());
    let mut packing: f64 = 0.0;
    for q in &members {
        let [(a0, b0), (a1, b1)] = atoms.ranges(q);
        let w1 = b1 - a1;
        let mut marked = vec![false; (b0 - a0) * w1];
        for p in members.iter().filter(|p| strict_descendant(p, q)) {
            let [(c0, e0), (c1, e1)] = atoms.ranges(p);
            for i in c0..e0 {
                for j in c1..e1 {
                    marked[(i - a0) * w1 + (j - a1)] = true;
                }
            }
        }
        let mut cov = 0u64;
        let mut e_q = Vec::new();
        for i in a0..b0 {
            for j in a1..b1 {
                if marked[(i - a0) * w1 + (j - a1)] {
                    cov += atoms.measure(i, j);
                } else {
                    e_q.push(atoms.id(i, j));
                }
            }
        }
        let total = q.region.measure_units();
        let frac = cov as f64 / total as f64;
        if 2 * cov > total {
            return Err(SparseError::Violation { cell: *q, covered: frac });
        }
        e_q.sort_unstable();
        exceptional.push(e_q);
        covered.push(frac);
        packing = packing.max(frac);
    }
    Ok(SparseFamily {
        grid: *grid,
        members,
        exceptional,
        covered,
        packing,
    })
}

impl SparseFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Re-derives the invariants without trusting the stored data:
    /// half-packing, `E_Q ⊂ Q`, pairwise disjoint `E_Q`, `|Q| <= 2|E_Q|`.
    pub fn verify(&self) -> core::result::Result<(), SparseError> {
        let again = sparse_check(&self.grid, &self.members)?;
        let atoms = self.grid.cells(self.grid.domain().depth());
        let mut owner = vec![false; atoms.len()];
        for (q, e_q) in self.members.iter().zip(&self.exceptional) {
            let mut m = 0u64;
            for &a in e_q {
                let cell = atoms.get(a as usize).ok_or(Error::InvalidParameter("atom index out of range"))?;
                if !q.region.contains(&cell.region) || owner[a as usize] {
                    return Err(SparseError::Violation { cell: *q, covered: 1.0 });
                }
                owner[a as usize] = true;
                m += cell.region.measure_units();
            }
            if q.region.measure_units() > 2 * m {
                return Err(SparseError::Violation { cell: *q, covered: 1.0 - m as f64 / q.region.measure_units() as f64 });
            }
        }
        if again.members != self.members || again.exceptional != self.exceptional {
            return Err(SparseError::Core(Error::InvalidParameter("stored exceptional sets differ")));
        }
        Ok(())
    }
}

/// `T^S f = Σ_{Q ∈ S} (⨍_Q f) χ_Q`.
pub fn sparse_apply(family: &SparseFamily, f: &GridFunction) -> Result<GridFunction> {
    if family.grid.domain() != f.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut out = vec![0.0; f.len()];
    for q in &family.members {
        let avg = mean_over(f.values(), &q.region);
        q.region.for_each_center(|i| out[i] += avg);
    }
    GridFunction::new(f.domain(), out)
}

/// `T^S(f, g) = Σ_{Q ∈ S} (⨍_Q f)(⨍_Q g) χ_Q`.
pub fn sparse_apply2(family: &SparseFamily, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if family.grid.domain() != f.domain() || f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut out = vec![0.0; f.len()];
    for q in &family.members {
        let avg = mean_over(f.values(), &q.region) * mean_over(g.values(), &q.region);
        q.region.for_each_center(|i| out[i] += avg);
    }
    GridFunction::new(f.domain(), out)
}

/// Top-down stopping on one grid: starting from the level-0 cells, select
/// a cell when `value(cell) > factor · value(last selected ancestor)`.
pub fn stopping_family<V: FnMut(&Cell) -> f64>(tree: &GridTree, factor: f64, mut value: V) -> Vec<Cell> {
    let cells = tree.cells();
    let vals: Vec<f64> = cells.iter().map(&mut value).collect();
    let mut selected = Vec::new();
    let mut queue: Vec<usize> = tree.level(0).collect();
    while let Some(q) = queue.pop() {
        selected.push(cells[q]);
        let threshold = factor * vals[q];
        if vals[q] == 0.0 {
            continue;
        }
        let mut stack: Vec<usize> = tree.children(q).to_vec();
        while let Some(c) = stack.pop() {
            if vals[c] > threshold {
                queue.push(c);
            } else {
                stack.extend_from_slice(tree.children(c));
            }
        }
    }
    selected
}

/// Result of [`sparse_dominate`].
#[derive(Clone, Debug)]
pub struct Domination {
    pub families: Vec<SparseFamily>,
    /// `Σ_k T^{S_k} |f|`.
    pub majorant: GridFunction,
    /// `max_x |Tf(x)| / Σ_k T^{S_k}|f|(x)`.
    pub ratio: f64,
    /// Flat index attaining the ratio.
    pub witness: usize,
}

/// Stopping factor used by [`sparse_dominate`]: a child is selected when
/// its `|f|` average exceeds twice that of its selected ancestor, so the
/// selected children of a cell cover less than half of it.
pub const DOMINATION_FACTOR: f64 = 2.0;

/// One sparse family per grid by average stopping on `|f|` with
/// [`DOMINATION_FACTOR`].
pub fn average_families(f: &GridFunction, grids: &[Grid]) -> core::result::Result<Vec<SparseFamily>, SparseError> {
    let a = f.abs();
    grids
        .iter()
        .map(|g| {
            if g.domain() != f.domain() {
                return Err(Error::DomainMismatch.into());
            }
            let chosen = stopping_family(&g.tree(), DOMINATION_FACTOR, |c| mean_over(a.values(), &c.region));
            sparse_check(g, &chosen)
        })
        .collect()
}

/// Stopping factor of [`product_families`]. Within one grid the bilinear
/// maximal function maps `L^1 × L^1` to `L^{1/2,∞}` with constant 2, so the
/// selected children of `P` cover at most `2|P|/√16 = |P|/2`.
pub const BILINEAR_FACTOR: f64 = 16.0;

/// One sparse family per grid by stopping on `⨍|f| · ⨍|g|`.
pub fn product_families(
    f: &GridFunction,
    g: &GridFunction,
    grids: &[Grid],
) -> core::result::Result<Vec<SparseFamily>, SparseError> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch.into());
    }
    let (fa, ga) = (f.abs(), g.abs());
    grids
        .iter()
        .map(|grid| {
            if grid.domain() != f.domain() {
                return Err(Error::DomainMismatch.into());
            }
            let chosen = stopping_family(&grid.tree(), BILINEAR_FACTOR, |c| {
                mean_over(fa.values(), &c.region) * mean_over(ga.values(), &c.region)
            });
            sparse_check(grid, &chosen)
        })
        .collect()
}

/// `Σ_k T^{S_k} f`.
pub fn sparse_majorant(families: &[SparseFamily], f: &GridFunction) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(f.domain());
    for fam in families {
        out = out.zip_map(&sparse_apply(fam, f)?, |a, b| a + b)?;
    }
    Ok(out)
}

/// `Σ_k T^{S_k}(f, g)`.
pub fn sparse_majorant2(families: &[SparseFamily], f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(f.domain());
    for fam in families {
        out = out.zip_map(&sparse_apply2(fam, f, g)?, |a, b| a + b)?;
    }
    Ok(out)
}

/// Builds one sparse family per grid by average stopping on `|f|` and
/// measures how well `Σ_k T^{S_k}|f|` dominates `|tf|` pointwise.
pub fn sparse_dominate(f: &GridFunction, tf: &GridFunction, grids: &[Grid]) -> core::result::Result<Domination, SparseError> {
    let d = f.domain();
    if tf.domain() != d {
        return Err(Error::DomainMismatch.into());
    }
    let families = average_families(f, grids)?;
    let majorant = sparse_majorant(&families, &f.abs())?.into_values();
    let (mut ratio, mut witness) = (0.0, 0);
    for (i, (&t, &m)) in tf.values().iter().zip(&majorant).enumerate() {
        let r = if t == 0.0 {
            0.0
        } else if m == 0.0 {
            f64::INFINITY
        } else {
            t.abs() / m
        };
        if r > ratio {
            ratio = r;
            witness = i;
        }
    }
    Ok(Domination {
        families,
        majorant: GridFunction::new(d, majorant)?,
        ratio,
        witness,
    })
}

/// Output of [`stopping_sparse`].
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StoppingFamily {
    pub a: f64,
    /// Threshold scale: class `k` is `τ a^k < product <= τ a^{k+1}`.
    pub anchor: f64,
    pub family: SparseFamily,
    /// `(k, members of S^k)` with members as indices into `family.members`.
    pub levels: Vec<(i64, Vec<usize>)>,
    /// Whether every cell with positive product average lies in a member
    /// of its level class.
    pub covering: bool,
}

/// `(⨍_{3Q} |f|)(⨍_{3Q} |g|)` for every cell of the standard tree.
pub fn triple_products(tree: &GridTree, f: &GridFunction, g: &GridFunction) -> Vec<f64> {
    let (fa, ga) = (f.abs(), g.abs());
    tree.cells()
        .iter()
        .map(|c| {
            let r = c.region.dilate3();
            mean_over(fa.values(), &r) * mean_over(ga.values(), &r)
        })
        .collect()
}

/// The class index `k` with `a^k < v <= a^{k+1}`.
fn class_of(v: f64, a: f64) -> i64 {
    let mut k = ceil(ln(v) / ln(a)) as i64 - 1;
    while powf(a, k as f64) >= v {
        k -= 1;
    }
    while powf(a, (k + 1) as f64) < v {
        k += 1;
    }
    k
}

/// On the standard grid: `S^k` = maximal cells with
/// `(⨍_{3Q} f)(⨍_{3Q} g) > τ a^k`, `S = ∪_k S^k`, checked for sparsity.
///
/// The ladder is anchored just below the product of the whole box, so
/// the box opens class 0 and the next class starts near `a` times its
/// value. Without a parent above the box, an unanchored ladder can place
/// the box's product just under a threshold and let class 1 swallow most
/// of it.
pub fn stopping_sparse(f: &GridFunction, g: &GridFunction, a: f64) -> core::result::Result<StoppingFamily, SparseError> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::InvalidParameter("stopping parameter must exceed 1").into());
    }
    let d = f.domain();
    if g.domain() != d {
        return Err(Error::DomainMismatch.into());
    }
    let grid = Grid::standard(d);
    let tree = grid.tree();
    let raw = triple_products(&tree, f, g);
    let root = tree.level(0).start;
    let anchor = raw[root] * (1.0 - 1e-12);
    let prod: Vec<f64> = if anchor > 0.0 { raw.iter().map(|v| v / anchor).collect() } else { raw };
    let positive: Vec<f64> = prod.iter().copied().filter(|&v| v > 0.0).collect();
    if positive.is_empty() {
        return Ok(StoppingFamily {
            a,
            anchor: 0.0,
            family: sparse_check(&grid, &[])?,
            levels: Vec::new(),
            covering: true,
        });
    }
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(0.0, f64::max);
    let (k_lo, k_hi) = (class_of(lo, a), class_of(hi, a));
    let cells = tree.cells();
    let mut by_k: Vec<(i64, Vec<usize>)> = Vec::new();
    let mut chosen = Vec::new();
    for k in k_lo..=k_hi {
        let t = powf(a, k as f64);
        let mut sel = Vec::new();
        let mut stack: Vec<usize> = tree.level(0).collect();
        while let Some(c) = stack.pop() {
            if prod[c] > t {
                sel.push(c);
            } else {
                stack.extend_from_slice(tree.children(c));
            }
        }
        sel.sort_unstable();
        chosen.extend(sel.iter().map(|&i| cells[i]));
        by_k.push((k, sel));
    }
    // Covering: each cell of class k sits inside a member of S^k.
    let mut covering = true;
    for (i, &v) in prod.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let k = class_of(v, a);
        let sel = &by_k[(k - k_lo) as usize].1;
        let mut cur = Some(i);
        let mut found = false;
        while let Some(c) = cur {
            if sel.binary_search(&c).is_ok() {
                found = true;
                break;
            }
            cur = tree.parent(c);
        }
        covering &= found;
    }
    let family = sparse_check(&grid, &chosen)?;
    let levels = by_k
        .into_iter()
        .map(|(k, sel)| {
            let idx = sel
                .iter()
                .map(|&i| family.members.iter().position(|m| key(m) == key(&cells[i])).expect("member"))
                .collect();
            (k, idx)
        })
        .collect();
    Ok(StoppingFamily {
        a,
        anchor: if anchor > 0.0 { anchor } else { 1.0 },
        family,
        levels,
        covering,
    })
}

/// `max(4·36^n·C_w², 4)` with `C_w` the measured weak-type constant of
/// the bilinear maximal operator on this pair.
///
/// For a non-root member `Q` of class `k`, its parent has product at most
/// `τ a^k`, so `⨍_{3Q} f ⨍_{3Q} g <= 4^n τ a^k` and `|3Q| <= 3^n |Q|`;
/// the weak-type bound then caps the covered part of `Q` by
/// `6^n C_w a^{-1/2} |Q|`, which this choice keeps at or below `|Q|/2`.
pub fn default_stopping_parameter(f: &GridFunction, g: &GridFunction, grids: &[Grid]) -> Result<f64> {
    let c = weak_type_constant(f, g, grids)?;
    let geometric = powf(36.0, f.domain().dim() as f64);
    Ok((4.0 * geometric * c * c).max(4.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integral::czo_apply;
    use crate::{Domain, Shift};

    fn d1(l: u32) -> Domain {
        Domain::new(1, l).unwrap()
    }

    #[test]
    fn single_cube_and_full_tree() {
        let g = Grid::standard(d1(4));
        let top = g.cells(0);
        let fam = sparse_check(&g, &top).unwrap();
        assert_eq!(fam.exceptional[0].len(), 16);
        assert_eq!(fam.packing, 0.0);
        let all = g.all_cells();
        match sparse_check(&g, &all) {
            Err(SparseError::Violation { cell, covered }) => {
                assert_eq!(cell.level, 0);
                assert_eq!(covered, 1.0);
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn every_other_level_tree() {
        // Levels 0, 2, 4 of a full tree: each cell's grandchildren tile it.
        let g = Grid::standard(d1(4));
        let cells: Vec<Cell> = [0, 2, 4].iter().flat_map(|&k| g.cells(k)).collect();
        assert!(matches!(sparse_check(&g, &cells), Err(SparseError::Violation { .. })));
        // A single chain of left-most cells covers exactly half at each step.
        let chain: Vec<Cell> = (0..=4).map(|k| g.cells(k)[0]).collect();
        let fam = sparse_check(&g, &chain).unwrap();
        assert_eq!(fam.packing, 0.5);
        fam.verify().unwrap();
    }

    #[test]
    fn operators() {
        let d = d1(4);
        let g = Grid::standard(d);
        let fam = sparse_check(&g, &g.cells(0)).unwrap();
        let f = GridFunction::from_fn(d, |x| x[0]);
        let t = sparse_apply(&fam, &f).unwrap();
        let avg = f.average(&d.whole()).unwrap();
        assert!(t.values().iter().all(|&v| (v - avg).abs() < 1e-15));
        let one = GridFunction::constant(d, 1.0);
        assert_eq!(sparse_apply2(&fam, &f, &one).unwrap(), t);
    }

    #[test]
    fn domination_of_the_test_kernel() {
        let d = d1(8);
        let mut v = vec![0.0; d.len()];
        v[77] = 1.0;
        let f = GridFunction::new(d, v).unwrap();
        let tf = czo_apply(&f).unwrap();
        let dom = sparse_dominate(&f, &tf, &Grid::family(d)).unwrap();
        assert!(dom.ratio.is_finite() && dom.ratio > 0.0);
        for fam in &dom.families {
            fam.verify().unwrap();
        }
        let dom2 = sparse_dominate(&f.scale(2.0), &tf.scale(2.0), &Grid::family(d)).unwrap();
        assert!((dom2.ratio - dom.ratio).abs() < 1e-12 * dom.ratio);
    }

    #[test]
    fn stopping_on_constants_selects_top() {
        let d = d1(5);
        let one = GridFunction::constant(d, 1.0);
        let s = stopping_sparse(&one, &one, 4.0).unwrap();
        assert_eq!(s.family.members.len(), 1);
        assert_eq!(s.family.members[0].level, 0);
        assert!(s.covering);
    }

    #[test]
    fn stopping_on_a_spike_is_a_tower() {
        let d = d1(8);
        let mut v = vec![0.0; d.len()];
        v[100] = 1.0;
        let f = GridFunction::new(d, v).unwrap();
        let a = default_stopping_parameter(&f, &f, &Grid::family(d)).unwrap();
        let s = stopping_sparse(&f, &f, a).unwrap();
        assert!(s.covering);
        s.family.verify().unwrap();
        let x = 100.5 / 256.0;
        for m in &s.family.members {
            let (lo, hi) = m.region.dilate3().bounds();
            assert!(lo[0] <= x && x < hi[0]);
        }
        let coarse = stopping_sparse(&f, &f, a * a).unwrap();
        let fine: BTreeSet<_> = s.family.members.iter().map(key).collect();
        assert!(coarse.family.members.iter().all(|m| fine.contains(&key(m))));
    }

    #[test]
    fn foreign_cells_are_rejected() {
        let d = d1(3);
        let shifted = Grid::new(d, Shift([1, 0]));
        assert!(matches!(
            sparse_check(&Grid::standard(d), &shifted.cells(1)),
            Err(SparseError::ForeignCell(_))
        ));
    }
}
