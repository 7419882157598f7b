//! Shifted dyadic grids on `[0,1)^n`, `n ∈ {1, 2}`, and functions sampled
//! on the finest standard cells.
//!
//! Coordinates are integers: each axis is split into `3·2^L` units so that
//! every cell of every one-third shifted grid has integer endpoints. A
//! shifted cube that wraps around the box is split into its clipped pieces;
//! all averages use the pieces with their true measure.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::powf;
use crate::{Error, Result};

/// Floor applied to weights before taking negative powers.
pub const W_MIN: f64 = 1e-12;

/// Dimension and depth of the sampling domain `[0,1)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    dim: usize,
    depth: u32,
}

impl Domain {
    pub fn new(dim: usize, depth: u32) -> Result<Self> {
        match (dim, depth) {
            (1, 0..=20) | (2, 0..=10) => Ok(Domain { dim, depth }),
            (1 | 2, _) => Err(Error::InvalidParameter("grid depth too large")),
            _ => Err(Error::Unsupported("only dimensions 1 and 2 are supported")),
        }
    }

    /// Depth 10 in one dimension, 6 in two.
    pub fn default_for(dim: usize) -> Result<Self> {
        Self::new(dim, if dim == 2 { 6 } else { 10 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Finest cells per axis, `2^L`.
    pub fn side(&self) -> usize {
        1 << self.depth
    }

    /// Number of samples, `2^{Ln}`.
    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integer units per axis, `3·2^L`.
    pub fn units(&self) -> u64 {
        3 << self.depth
    }

    /// Measure of one finest cell, `2^{-Ln}`.
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Side length of one finest cell, `2^{-L}`.
    pub fn cell_side(&self) -> f64 {
        1.0 / self.side() as f64
    }

    /// Flat sample index of a multi-index (row-major, first axis slowest).
    #[inline]
    pub fn flat(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.side() + idx[1]
        }
    }

    /// Multi-index of a flat sample index.
    #[inline]
    pub fn multi(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.side(), flat % self.side()]
        }
    }

    /// Center of the finest cell with the given flat index.
    pub fn center(&self, flat: usize) -> [f64; 2] {
        let h = self.cell_side();
        let m = self.multi(flat);
        let c = [(m[0] as f64 + 0.5) * h, (m[1] as f64 + 0.5) * h];
        if self.dim == 1 {
            [c[0], 0.0]
        } else {
            c
        }
    }

    /// The box itself as a region.
    pub fn whole(&self) -> Region {
        Region {
            dim: self.dim as u8,
            lo: [0, 0],
            hi: [self.units(), if self.dim == 2 { self.units() } else { 1 }],
            units: self.units(),
        }
    }
}

/// One-third shift per axis, stored in thirds (`0`, `1` or `2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Shift(pub [u8; 2]);

impl Shift {
    pub const ZERO: Shift = Shift([0, 0]);

    pub fn new(thirds: [u8; 2]) -> Result<Self> {
        if thirds.iter().all(|&t| t < 3) {
            Ok(Shift(thirds))
        } else {
            Err(Error::InvalidParameter("shift entries are thirds in {0, 1, 2}"))
        }
    }

    /// The `3^n` shifts of a dimension, the zero shift first.
    pub fn all(dim: usize) -> Vec<Shift> {
        let mut out = Vec::new();
        for a in 0..3 {
            if dim == 1 {
                out.push(Shift([a, 0]));
            } else {
                for b in 0..3 {
                    out.push(Shift([a, b]));
                }
            }
        }
        out
    }

    pub fn fractions(&self) -> [f64; 2] {
        [self.0[0] as f64 / 3.0, self.0[1] as f64 / 3.0]
    }
}

/// An axis-parallel box with integer endpoints in units of `1/(3·2^L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    dim: u8,
    lo: [u64; 2],
    hi: [u64; 2],
    units: u64,
}

impl Region {
    /// Builds a region from unit coordinates; the second axis is ignored
    /// in one dimension.
    pub fn from_units(domain: &Domain, lo: [u64; 2], hi: [u64; 2]) -> Result<Self> {
        let n = domain.units();
        let (lo, hi) = if domain.dim == 1 {
            ([lo[0], 0], [hi[0], 1])
        } else {
            (lo, hi)
        };
        for a in 0..domain.dim {
            if !(lo[a] < hi[a] && hi[a] <= n) {
                return Err(Error::ZeroMeasure);
            }
        }
        Ok(Region {
            dim: domain.dim as u8,
            lo,
            hi,
            units: n,
        })
    }

    pub fn lo(&self) -> [u64; 2] {
        self.lo
    }

    pub fn hi(&self) -> [u64; 2] {
        self.hi
    }

    /// Endpoints as fractions of the box side.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let u = self.units as f64;
        (
            [self.lo[0] as f64 / u, self.lo[1] as f64 / u],
            [self.hi[0] as f64 / u, self.hi[1] as f64 / u],
        )
    }

    pub fn measure_units(&self) -> u64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    /// Lebesgue measure as a fraction of the box.
    pub fn measure(&self) -> f64 {
        let u = self.units as f64;
        let m = self.measure_units() as f64;
        if self.dim == 1 {
            m / u
        } else {
            m / (u * u)
        }
    }

    pub fn contains(&self, other: &Region) -> bool {
        (0..self.dim as usize).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    /// The concentric triple, clipped to the box.
    pub fn dilate3(&self) -> Region {
        let mut out = *self;
        for a in 0..self.dim as usize {
            let len = self.hi[a] - self.lo[a];
            out.lo[a] = self.lo[a].saturating_sub(len);
            out.hi[a] = (self.hi[a] + len).min(self.units);
        }
        out
    }

    /// Calls `visit(flat, overlap_units)` for every finest standard cell
    /// meeting the region, in flat-index order. The overlap is measured in
    /// `(1/(3·2^L))^n` units, so a full cell contributes `3^n`.
    #[inline]
    pub fn for_each_overlap<F: FnMut(usize, u64)>(&self, mut visit: F) {
        let (i0, i1) = (self.lo[0] / 3, (self.hi[0] - 1) / 3);
        if self.dim == 1 {
            for i in i0..=i1 {
                let w = self.hi[0].min(3 * i + 3) - self.lo[0].max(3 * i);
                visit(i as usize, w);
            }
            return;
        }
        let side = self.units / 3;
        let (j0, j1) = (self.lo[1] / 3, (self.hi[1] - 1) / 3);
        for i in i0..=i1 {
            let wi = self.hi[0].min(3 * i + 3) - self.lo[0].max(3 * i);
            for j in j0..=j1 {
                let wj = self.hi[1].min(3 * j + 3) - self.lo[1].max(3 * j);
                visit((i * side + j) as usize, wi * wj);
            }
        }
    }

    /// Calls `visit(flat)` for every finest standard cell whose center lies
    /// in the region.
    #[inline]
    pub fn for_each_center<F: FnMut(usize)>(&self, mut visit: F) {
        // Center of cell i sits at 3i + 1.5 units.
        let range = |lo: u64, hi: u64| -> Option<(u64, u64)> {
            let first = if 2 * lo <= 3 { 0 } else { (2 * lo - 3).div_ceil(6) };
            if 2 * hi <= 3 {
                return None;
            }
            let last = (2 * hi - 3).div_ceil(6).checked_sub(1)?;
            (first <= last).then_some((first, last))
        };
        let Some((i0, i1)) = range(self.lo[0], self.hi[0]) else {
            return;
        };
        if self.dim == 1 {
            for i in i0..=i1 {
                visit(i as usize);
            }
            return;
        }
        let Some((j0, j1)) = range(self.lo[1], self.hi[1]) else {
            return;
        };
        let side = self.units / 3;
        for i in i0..=i1 {
            for j in j0..=j1 {
                visit((i * side + j) as usize);
            }
        }
    }
}

/// A clipped piece of a dyadic cube of some shifted grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub shift: Shift,
    pub level: u32,
    /// Cube index per axis at this level (second entry 0 in one dimension).
    pub index: [u32; 2],
    /// Which clipped piece per axis: 0 for the part at or after the
    /// shifted origin, 1 for the part wrapped to the start of the box.
    pub piece: [u8; 2],
    pub region: Region,
}

impl Cell {
    pub fn measure(&self) -> f64 {
        self.region.measure()
    }

    /// Whether this is a whole (unclipped) cube.
    pub fn is_whole(&self) -> bool {
        let side = self.region.units >> self.level;
        (0..self.region.dim as usize).all(|a| self.region.hi[a] - self.region.lo[a] == side)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Segment {
    index: u32,
    piece: u8,
    lo: u64,
    hi: u64,
}

/// A dyadic grid: the standard one or a one-third shift of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    domain: Domain,
    shift: Shift,
}

impl Grid {
    pub fn new(domain: Domain, shift: Shift) -> Self {
        let mut shift = shift;
        if domain.dim == 1 {
            shift.0[1] = 0;
        }
        Grid { domain, shift }
    }

    pub fn standard(domain: Domain) -> Self {
        Grid::new(domain, Shift::ZERO)
    }

    /// All `3^n` one-third shifted grids, the standard grid first.
    pub fn family(domain: Domain) -> Vec<Grid> {
        Shift::all(domain.dim)
            .into_iter()
            .map(|s| Grid::new(domain, s))
            .collect()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    fn segments(&self, axis: usize, level: u32) -> Vec<Segment> {
        let l = self.domain.depth;
        let period = 3u64 << level;
        let scale = 1u64 << (l - level);
        let offset = (self.shift.0[axis] as u64) << level;
        let mut out = Vec::with_capacity((1usize << level) + 1);
        for j in 0..(1u64 << level) {
            let start = (offset + 3 * j) % period;
            let end = start + 3;
            if end <= period {
                out.push(Segment {
                    index: j as u32,
                    piece: 0,
                    lo: start * scale,
                    hi: end * scale,
                });
            } else {
                out.push(Segment {
                    index: j as u32,
                    piece: 0,
                    lo: start * scale,
                    hi: period * scale,
                });
                out.push(Segment {
                    index: j as u32,
                    piece: 1,
                    lo: 0,
                    hi: (end - period) * scale,
                });
            }
        }
        out
    }

    /// Clipped cells of one level, in cube-index order (pieces of one cube
    /// adjacent). Exactly `2^{kn}` cubes are represented.
    pub fn cells(&self, level: u32) -> Vec<Cell> {
        assert!(level <= self.domain.depth, "level beyond grid depth");
        let units = self.domain.units();
        let s0 = self.segments(0, level);
        let make = |a: &Segment, b: Option<&Segment>| {
            let (bi, bp, blo, bhi) = b.map_or((0, 0, 0, 1), |b| (b.index, b.piece, b.lo, b.hi));
            Cell {
                shift: self.shift,
                level,
                index: [a.index, bi],
                piece: [a.piece, bp],
                region: Region {
                    dim: self.domain.dim as u8,
                    lo: [a.lo, blo],
                    hi: [a.hi, bhi],
                    units,
                },
            }
        };
        if self.domain.dim == 1 {
            return s0.iter().map(|a| make(a, None)).collect();
        }
        let s1 = self.segments(1, level);
        let mut out = Vec::with_capacity(s0.len() * s1.len());
        for a in &s0 {
            for b in &s1 {
                out.push(make(a, Some(b)));
            }
        }
        out
    }

    /// Cells of all levels `0..=L`, level-major.
    pub fn all_cells(&self) -> Vec<Cell> {
        (0..=self.domain.depth).flat_map(|k| self.cells(k)).collect()
    }

    /// Cells with parent and child links.
    pub fn tree(&self) -> GridTree {
        GridTree::new(*self)
    }
}

/// All cells of one grid with parent/child links.
#[derive(Clone, Debug)]
pub struct GridTree {
    grid: Grid,
    cells: Vec<Cell>,
    level_start: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl GridTree {
    fn new(grid: Grid) -> Self {
        let mut cells = Vec::new();
        let mut level_start = Vec::new();
        for k in 0..=grid.domain.depth {
            level_start.push(cells.len());
            cells.extend(grid.cells(k));
        }
        level_start.push(cells.len());
        let mut parent = vec![None; cells.len()];
        let mut children = vec![Vec::new(); cells.len()];
        for k in 1..=grid.domain.depth as usize {
            let (a, b) = (level_start[k - 1], level_start[k]);
            // Parents sorted by lower corner for a binary search.
            let mut order: Vec<usize> = (a..b).collect();
            order.sort_by_key(|&i| cells[i].region.lo);
            for c in b..level_start[k + 1] {
                let lo = cells[c].region.lo;
                let pos = order.partition_point(|&i| cells[i].region.lo <= lo);
                let found = order[..pos]
                    .iter()
                    .rev()
                    .copied()
                    .find(|&i| cells[i].region.contains(&cells[c].region));
                let p = found.expect("dyadic nesting");
                parent[c] = Some(p);
                children[p].push(c);
            }
        }
        GridTree {
            grid,
            cells,
            level_start,
            parent,
            children,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn level(&self, k: u32) -> core::ops::Range<usize> {
        self.level_start[k as usize]..self.level_start[k as usize + 1]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }
}

/// A function sampled on the finest standard cells, piecewise constant.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridFunction {
    domain: Domain,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { domain, values })
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        GridFunction {
            domain,
            values: vec![c; domain.len()],
        }
    }

    pub fn zeros(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    /// Samples `f` at cell centers.
    pub fn from_fn<F: FnMut([f64; 2]) -> f64>(domain: Domain, mut f: F) -> Self {
        let values = (0..domain.len()).map(|i| f(domain.center(i))).collect();
        GridFunction { domain, values }
    }

    /// Indicator of the finest cells whose centers lie in `region`.
    pub fn indicator(domain: Domain, region: &Region) -> Self {
        let mut out = Self::zeros(domain);
        region.for_each_center(|i| out.values[i] = 1.0);
        out
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Self {
        GridFunction {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<F: FnMut(f64, f64) -> f64>(&self, other: &Self, mut f: F) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(GridFunction {
            domain: self.domain,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `|f|^e`, with `0^e = 0` for positive `e`.
    pub fn pow(&self, e: f64) -> Self {
        self.map(|v| powf(v.abs(), e))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    /// Values floored at [`W_MIN`].
    pub fn as_weight(&self) -> Self {
        self.map(|v| v.max(W_MIN))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `∫ f` over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.cell_volume()
    }

    /// Measure-weighted mean over a region.
    pub fn average(&self, region: &Region) -> Result<f64> {
        if region.units != self.domain.units() || region.dim as usize != self.domain.dim {
            return Err(Error::DomainMismatch);
        }
        let total = region.measure_units();
        if total == 0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(mean_over(&self.values, region))
    }

    /// `(∫ |f|^p)^{1/p}`; a quasi-norm for `p < 1`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| powf(v.abs(), p)).sum();
        powf(s * self.domain.cell_volume(), 1.0 / p)
    }

    /// `(∫ |f|^p w)^{1/p}`.
    pub fn weighted_lp_norm(&self, w: &Self, p: f64) -> Result<f64> {
        if self.domain != w.domain {
            return Err(Error::DomainMismatch);
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&w.values)
            .map(|(v, w)| powf(v.abs(), p) * w)
            .sum();
        Ok(powf(s * self.domain.cell_volume(), 1.0 / p))
    }
}

/// Measure-weighted mean of samples over a region with positive measure.
#[inline]
pub(crate) fn mean_over(values: &[f64], region: &Region) -> f64 {
    let mut acc = 0.0;
    region.for_each_overlap(|i, w| acc += values[i] * w as f64);
    acc / region.measure_units() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(dim: usize, depth: u32) -> Domain {
        Domain::new(dim, depth).unwrap()
    }

    #[test]
    fn standard_cells() {
        let g = Grid::standard(dom(1, 3));
        let c = g.cells(2);
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.measure() == 0.25 && c.is_whole()));
        let g2 = Grid::standard(dom(2, 3));
        let c2 = g2.cells(1);
        assert_eq!(c2.len(), 4);
        assert!(c2.iter().all(|c| c.measure() == 0.25));
    }

    #[test]
    fn third_shift_level_one() {
        let g = Grid::new(dom(1, 3), Shift([1, 0]));
        let c = g.cells(1);
        let (lo, hi) = c[0].region.bounds();
        assert_eq!((lo[0], hi[0]), (1.0 / 3.0, 5.0 / 6.0));
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].index, c[2].index);
        let (a, b) = (c[1].region.bounds(), c[2].region.bounds());
        assert_eq!((a.0[0], a.1[0]), (5.0 / 6.0, 1.0));
        assert_eq!((b.0[0], b.1[0]), (0.0, 1.0 / 3.0));
    }

    #[test]
    fn levels_partition_the_box() {
        for d in [dom(1, 5), dom(2, 3)] {
            let full = d.whole().measure_units();
            for g in Grid::family(d) {
                for k in 0..=d.depth() {
                    let cells = g.cells(k);
                    let total: u64 = cells.iter().map(|c| c.region.measure_units()).sum();
                    assert_eq!(total, full);
                    let cubes: alloc::collections::BTreeSet<_> = cells.iter().map(|c| c.index).collect();
                    assert_eq!(cubes.len(), 1 << (k as usize * d.dim()));
                }
            }
        }
    }

    #[test]
    fn tree_links_are_nested() {
        for d in [dom(1, 5), dom(2, 3)] {
            for g in Grid::family(d) {
                let t = g.tree();
                for (i, c) in t.cells().iter().enumerate() {
                    if let Some(p) = t.parent(i) {
                        assert!(t.cells()[p].region.contains(&c.region));
                        assert_eq!(t.cells()[p].level + 1, c.level);
                    } else {
                        assert_eq!(c.level, 0);
                    }
                    let kids: u64 = t.children(i).iter().map(|&k| t.cells()[k].region.measure_units()).sum();
                    if c.level < d.depth() {
                        assert_eq!(kids, c.region.measure_units());
                    }
                }
            }
        }
    }

    #[test]
    fn averages() {
        let d = dom(1, 4);
        let one = GridFunction::constant(d, 1.0);
        for c in Grid::new(d, Shift([2, 0])).all_cells() {
            assert!((one.average(&c.region).unwrap() - 1.0).abs() < 1e-15);
        }
        let left = GridFunction::from_fn(d, |x| if x[0] < 0.5 { 1.0 } else { 0.0 });
        assert_eq!(left.average(&d.whole()).unwrap(), 0.5);
        let f = GridFunction::from_fn(d, |x| x[0] * x[0]);
        for c in Grid::standard(d).cells(4) {
            let mut idx = 0;
            c.region.for_each_center(|i| idx = i);
            assert_eq!(f.average(&c.region).unwrap(), f.values()[idx]);
        }
    }

    #[test]
    fn dilation() {
        let d = dom(1, 3);
        let half = Region::from_units(&d, [0, 0], [12, 0]).unwrap();
        assert_eq!(half.dilate3(), d.whole());
        assert_eq!(d.whole().dilate3(), d.whole());
        let quarter = Region::from_units(&d, [6, 0], [12, 0]).unwrap();
        let (lo, hi) = quarter.dilate3().bounds();
        assert_eq!((lo[0], hi[0]), (0.0, 0.75));
    }

    #[test]
    fn centers_of_shifted_cells() {
        let d = dom(2, 4);
        for g in Grid::family(d) {
            for k in 0..=d.depth() {
                let mut hits = vec![0u32; d.len()];
                for c in g.cells(k) {
                    c.region.for_each_center(|i| hits[i] += 1);
                }
                assert!(hits.iter().all(|&h| h == 1));
            }
        }
    }

    #[test]
    fn length_is_checked() {
        let d = dom(1, 3);
        assert!(GridFunction::new(d, vec![0.0; 8]).is_ok());
        assert_eq!(
            GridFunction::new(d, vec![0.0; 7]),
            Err(Error::LengthMismatch { expected: 8, found: 7 })
        );
        assert!(GridFunction::new(d, vec![f64::NAN; 8]).is_err());
    }
}
