//! Weight characteristics as maxima over every cell of a grid family, and
//! generators for weights in the classical classes.

use alloc::vec::Vec;

use crate::dyadic::{mean_over, Cell, Grid, GridFunction, Region, Shift};
use crate::math::{dual, powf};
use crate::maximal::maximal;
use crate::orlicz::Gauge;
use crate::young::YoungFunction;
use crate::{Error, Result};

/// Characteristic above which a weight is treated as outside its class.
pub const DEFAULT_MEMBERSHIP_THRESHOLD: f64 = 1e6;
/// Exponents tried by [`best_rh_exponent`].
pub const RH_SEARCH: [f64; 5] = [1.1, 1.25, 1.5, 2.0, 4.0];

/// Which characteristic a report holds.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "class", rename_all = "snake_case"))]
pub enum WeightClass {
    Ap { p: f64 },
    A1,
    Rh { s: f64 },
    RhInf,
    RhPsi { psi: YoungFunction },
}

/// Address of a cell: grid shift, level, cube index and clipped piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellRef {
    pub shift: Shift,
    pub level: u32,
    pub index: [u32; 2],
    pub piece: [u8; 2],
}

impl From<&Cell> for CellRef {
    fn from(c: &Cell) -> Self {
        CellRef {
            shift: c.shift,
            level: c.level,
            index: c.index,
            piece: c.piece,
        }
    }
}

/// A characteristic with the cell attaining it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightReport {
    pub class: WeightClass,
    pub value: f64,
    pub attaining: CellRef,
    /// Shifts of the grids swept.
    pub grids: Vec<Shift>,
}

impl WeightReport {
    pub fn is_member(&self, threshold: f64) -> bool {
        self.value.is_finite() && self.value <= threshold
    }
}

fn all_cells(w: &GridFunction, grids: &[Grid]) -> Result<Vec<Cell>> {
    if grids.is_empty() {
        return Err(Error::InvalidParameter("at least one grid is required"));
    }
    if grids.iter().any(|g| g.domain() != w.domain()) {
        return Err(Error::DomainMismatch);
    }
    Ok(grids.iter().flat_map(|g| g.all_cells()).collect())
}

/// First cell (in enumeration order) attaining the maximum of `value`.
fn sweep_max<V: FnMut(&Region) -> Result<f64>>(cells: &[Cell], mut value: V) -> Result<(f64, usize)> {
    let (mut best, mut at) = (f64::NEG_INFINITY, 0);
    for (i, c) in cells.iter().enumerate() {
        let v = value(&c.region)?;
        if v > best {
            best = v;
            at = i;
        }
    }
    Ok((best, at))
}

fn report(class: WeightClass, cells: &[Cell], (value, at): (f64, usize), grids: &[Grid]) -> WeightReport {
    WeightReport {
        class,
        value,
        attaining: CellRef::from(&cells[at]),
        grids: grids.iter().map(|g| g.shift()).collect(),
    }
}

fn max_over(values: &[f64], r: &Region) -> f64 {
    let mut m = f64::NEG_INFINITY;
    r.for_each_overlap(|i, _| m = m.max(values[i]));
    m
}

/// `[w]_{A_p} = max_Q (⨍_Q w)(⨍_Q w^{1-p'})^{p-1}`.
pub fn ap_characteristic(w: &GridFunction, p: f64, grids: &[Grid]) -> Result<WeightReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter("A_p needs 1 < p < ∞"));
    }
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let dualw = w.pow(1.0 - dual(p));
    let found = sweep_max(&cells, |r| {
        Ok(mean_over(w.values(), r) * powf(mean_over(dualw.values(), r), p - 1.0))
    })?;
    Ok(report(WeightClass::Ap { p }, &cells, found, grids))
}

/// `[w]_{A_1} = max_Q (⨍_Q w) · max_{x ∈ Q} w(x)^{-1}`.
pub fn a1_characteristic(w: &GridFunction, grids: &[Grid]) -> Result<WeightReport> {
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let inv = w.map(|v| 1.0 / v);
    let found = sweep_max(&cells, |r| Ok(mean_over(w.values(), r) * max_over(inv.values(), r)))?;
    Ok(report(WeightClass::A1, &cells, found, grids))
}

/// `[w]_{RH_s} = max_Q (⨍_Q w^s)^{1/s} / ⨍_Q w`.
pub fn rh_characteristic(w: &GridFunction, s: f64, grids: &[Grid]) -> Result<WeightReport> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter("RH_s needs 1 < s < ∞"));
    }
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let ws = w.pow(s);
    let found = sweep_max(&cells, |r| Ok(powf(mean_over(ws.values(), r), 1.0 / s) / mean_over(w.values(), r)))?;
    Ok(report(WeightClass::Rh { s }, &cells, found, grids))
}

/// `[w]_{RH_∞} = max_Q max_{x ∈ Q} w(x) / ⨍_Q w`.
pub fn rh_inf_characteristic(w: &GridFunction, grids: &[Grid]) -> Result<WeightReport> {
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let found = sweep_max(&cells, |r| Ok(max_over(w.values(), r) / mean_over(w.values(), r)))?;
    Ok(report(WeightClass::RhInf, &cells, found, grids))
}

/// `max_Q ‖w‖_{Ψ,Q} / ⨍_Q w`.
pub fn rh_psi_characteristic(w: &GridFunction, psi: &YoungFunction, grids: &[Grid]) -> Result<WeightReport> {
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let gauge = Gauge::new(psi)?;
    let mut buf = Vec::new();
    let found = sweep_max(&cells, |r| Ok(gauge.norm_with(w.values(), r, &mut buf)? / mean_over(w.values(), r)))?;
    Ok(report(WeightClass::RhPsi { psi: psi.clone() }, &cells, found, grids))
}

/// Dispatches on the class.
pub fn characteristic(w: &GridFunction, class: &WeightClass, grids: &[Grid]) -> Result<WeightReport> {
    match class {
        WeightClass::Ap { p } => ap_characteristic(w, *p, grids),
        WeightClass::A1 => a1_characteristic(w, grids),
        WeightClass::Rh { s } => rh_characteristic(w, *s, grids),
        WeightClass::RhInf => rh_inf_characteristic(w, grids),
        WeightClass::RhPsi { psi } => rh_psi_characteristic(w, psi, grids),
    }
}

/// Result of [`ainfty_condition`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AInftyReport {
    pub alpha: f64,
    /// `max w(E)/w(Q)` over cells `Q` and unions `E` with `|E| < α|Q|`.
    pub beta: f64,
    pub attaining: CellRef,
    /// `|E|/|Q|` of the maximizing set.
    pub fraction: f64,
}

/// The `A_∞` condition at a fixed `α`: for each cell, `E` collects the
/// pieces of finest cells with the largest density while `|E| < α|Q|`.
///
/// When all pieces of `Q` have equal measure (every standard cell) this
/// greedy choice is the exact maximum; for clipped shifted cells with
/// unequal boundary pieces it is the density-greedy fill, which skips a
/// piece that no longer fits and keeps trying smaller ones.
pub fn ainfty_condition(w: &GridFunction, alpha: f64, grids: &[Grid]) -> Result<AInftyReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)"));
    }
    let cells = all_cells(w, grids)?;
    let w = w.as_weight();
    let vals = w.values();
    let mut items: Vec<(f64, u64, usize)> = Vec::new();
    let (mut beta, mut at, mut fraction) = (f64::NEG_INFINITY, 0, 0.0);
    for (ci, c) in cells.iter().enumerate() {
        items.clear();
        c.region.for_each_overlap(|i, m| items.push((vals[i], m, i)));
        items.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
        let total = c.region.measure_units();
        let cap = alpha * total as f64;
        let (mut used, mut mass_e, mut mass_q) = (0u64, 0.0, 0.0);
        for &(v, m, _) in &items {
            mass_q += v * m as f64;
            if ((used + m) as f64) < cap {
                used += m;
                mass_e += v * m as f64;
            }
        }
        let ratio = mass_e / mass_q;
        if ratio > beta {
            beta = ratio;
            at = ci;
            fraction = used as f64 / total as f64;
        }
    }
    Ok(AInftyReport {
        alpha,
        beta,
        attaining: CellRef::from(&cells[at]),
        fraction,
    })
}

/// `(Mw)^r`, an `A_1` weight for `0 < r < 1`.
pub fn gen_a1(w: &GridFunction, r: f64, grids: &[Grid]) -> Result<GridFunction> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter("exponent must lie in (0, 1)"));
    }
    Ok(maximal(w, grids)?.pow(r))
}

/// `w^{1-p'}` of an `A_1` weight: in `RH_∞ ∩ A_p`.
pub fn gen_rhinf_ap_pair(w_a1: &GridFunction, p: f64) -> Result<GridFunction> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter("needs 1 < p < ∞"));
    }
    Ok(w_a1.as_weight().pow(1.0 - dual(p)))
}

/// The largest exponent of [`RH_SEARCH`] whose characteristic stays at or
/// below `threshold`, with its report.
pub fn best_rh_exponent(w: &GridFunction, grids: &[Grid], threshold: f64) -> Result<Option<WeightReport>> {
    let mut best = None;
    for s in RH_SEARCH {
        let r = rh_characteristic(w, s, grids)?;
        if r.is_member(threshold) {
            best = Some(r);
        }
    }
    Ok(best)
}
