//! Dyadic maximal operators over a family of shifted grids.
//!
//! Each operator evaluates its cube functional on every cell of every
//! grid and assigns it to the finest-cell centers the cell contains,
//! keeping the maximum.

use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::{mean_over, Cell, Grid, GridFunction, Region};
use crate::math::{powf, sqrt};
use crate::orlicz::Gauge;
use crate::young::YoungFunction;
use crate::{Domain, Error, Result};

fn common_domain(grids: &[Grid], fs: &[&GridFunction]) -> Result<Domain> {
    let d = fs[0].domain();
    if fs.iter().any(|f| f.domain() != d) || grids.iter().any(|g| g.domain() != d) {
        return Err(Error::DomainMismatch);
    }
    if grids.is_empty() {
        return Err(Error::InvalidParameter("at least one grid is required"));
    }
    Ok(d)
}

/// Cells of every grid, level-major within each grid, skipping pieces
/// that contain no finest-cell center.
pub fn family_cells(grids: &[Grid]) -> Vec<Cell> {
    let mut out = Vec::new();
    for g in grids {
        for c in g.all_cells() {
            let mut hit = false;
            c.region.for_each_center(|_| hit = true);
            if hit {
                out.push(c);
            }
        }
    }
    out
}

/// `max_{Q ∋ x} value(Q)` over the given cells. When `bound` is supplied,
/// cells whose bound cannot beat the current minimum over their centers
/// are skipped.
fn sweep<V, B>(domain: Domain, cells: &[Cell], mut value: V, mut bound: Option<B>) -> Result<GridFunction>
where
    V: FnMut(&Region) -> Result<f64>,
    B: FnMut(&Region) -> f64,
{
    let mut out = vec![0.0f64; domain.len()];
    for c in cells {
        if let Some(b) = bound.as_mut() {
            let cap = b(&c.region);
            let mut floor = f64::INFINITY;
            c.region.for_each_center(|i| floor = floor.min(out[i]));
            if cap <= floor {
                continue;
            }
        }
        let v = value(&c.region)?;
        c.region.for_each_center(|i| {
            if v > out[i] {
                out[i] = v;
            }
        });
    }
    GridFunction::new(domain, out)
}

type NoBound = fn(&Region) -> f64;

/// Hardy–Littlewood maximal function `Mf(x) = max_{Q ∋ x} ⨍_Q |f|`.
pub fn maximal(f: &GridFunction, grids: &[Grid]) -> Result<GridFunction> {
    let d = common_domain(grids, &[f])?;
    let a = f.abs();
    sweep(d, &family_cells(grids), |r| Ok(mean_over(a.values(), r)), None::<NoBound>)
}

/// Orlicz maximal function `M_Φ f(x) = max_{Q ∋ x} ‖f‖_{Φ,Q}`.
///
/// Pure powers take the shortcut `M(|f|^p)^{1/p}`.
pub fn orlicz_maximal(f: &GridFunction, phi: &YoungFunction, grids: &[Grid]) -> Result<GridFunction> {
    let d = common_domain(grids, &[f])?;
    if let (Some(p), false) = (phi.power_exponent(), phi.is_normalized()) {
        return Ok(maximal(&f.pow(p), grids)?.map(|v| powf(v, 1.0 / p)));
    }
    let cells = family_cells(grids);
    orlicz_maximal_cells(d, f, phi, &cells)
}

pub(crate) fn orlicz_maximal_cells(
    d: Domain,
    f: &GridFunction,
    phi: &YoungFunction,
    cells: &[Cell],
) -> Result<GridFunction> {
    let gauge = Gauge::new(phi)?;
    let inv_one = phi.inverse(1.0)?;
    let a = f.abs();
    let mut buf = Vec::new();
    let vals = a.values();
    sweep(
        d,
        cells,
        |r| gauge.norm_with(vals, r, &mut buf),
        Some(|r: &Region| {
            let mut m = 0.0f64;
            r.for_each_overlap(|i, _| m = m.max(vals[i]));
            m / inv_one * (1.0 + 1e-12)
        }),
    )
}

/// `𝓜_{Φ₁,Φ₂}(f,g)(x) = max_{Q ∋ x} ‖f‖_{Φ₁,Q} ‖g‖_{Φ₂,Q}`.
pub fn bisublinear_maximal(
    f: &GridFunction,
    g: &GridFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    grids: &[Grid],
) -> Result<GridFunction> {
    let d = common_domain(grids, &[f, g])?;
    let (g1, g2) = (Gauge::new(phi1)?, Gauge::new(phi2)?);
    let (fa, ga) = (f.abs(), g.abs());
    let mut buf = Vec::new();
    sweep(
        d,
        &family_cells(grids),
        |r| Ok(g1.norm_with(fa.values(), r, &mut buf)? * g2.norm_with(ga.values(), r, &mut buf)?),
        None::<NoBound>,
    )
}

/// `𝓜_α(f,g)(x) = max_{Q ∋ x} |Q|^{α/n} ⨍_Q |f| ⨍_Q |g|`; clipped pieces
/// use their own measure.
pub fn frac_maximal_bilinear(f: &GridFunction, g: &GridFunction, alpha: f64, grids: &[Grid]) -> Result<GridFunction> {
    let d = common_domain(grids, &[f, g])?;
    if !(alpha >= 0.0 && alpha < 2.0 * d.dim() as f64) {
        return Err(Error::InvalidParameter("alpha must lie in [0, 2n)"));
    }
    let (fa, ga) = (f.abs(), g.abs());
    let n = d.dim() as f64;
    sweep(
        d,
        &family_cells(grids),
        |r| Ok(powf(r.measure(), alpha / n) * mean_over(fa.values(), r) * mean_over(ga.values(), r)),
        None::<NoBound>,
    )
}

/// Empirical weak-type constant of `𝓜 = 𝓜_0`: the least `C` with
/// `|{𝓜(f,g) > λ}| <= C (‖f‖₁ ‖g‖₁ / λ)^{1/2}` at every level the
/// sampled function attains.
pub fn weak_type_constant(f: &GridFunction, g: &GridFunction, grids: &[Grid]) -> Result<f64> {
    let m = frac_maximal_bilinear(f, g, 0.0, grids)?;
    let norms = f.abs().integral() * g.abs().integral();
    if norms == 0.0 {
        return Ok(0.0);
    }
    let mut vals: Vec<f64> = m.values().to_vec();
    vals.sort_by(|a, b| b.total_cmp(a));
    let cell = m.domain().cell_volume();
    let mut c: f64 = 0.0;
    let mut i = 0;
    while i < vals.len() {
        let mut j = i;
        while j + 1 < vals.len() && vals[j + 1] == vals[i] {
            j += 1;
        }
        // Just below level vals[i] the set has measure (j + 1) cells.
        if vals[i] > 0.0 {
            c = c.max((j + 1) as f64 * cell * sqrt(vals[i] / norms));
        }
        i = j + 1;
    }
    Ok(c)
}

/// Maximal function over every interval of whole finest cells (`n = 1`):
/// `max_{a <= x < b} ⨍_{[a,b)} |f|`, in `O(N²)`.
pub fn interval_maximal(f: &GridFunction) -> Result<GridFunction> {
    let d = f.domain();
    if d.dim() != 1 {
        return Err(Error::InvalidParameter("interval maximal is one-dimensional"));
    }
    let n = d.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in f.values().iter().enumerate() {
        prefix[i + 1] = prefix[i] + v.abs();
    }
    let mut out = vec![0.0f64; n];
    let mut best = vec![0.0f64; n + 1];
    for a in 0..n {
        // best[x] = max over b > x of the average on [a, b).
        best[n] = 0.0;
        for b in (a + 1..=n).rev() {
            let avg = (prefix[b] - prefix[a]) / (b - a) as f64;
            best[b - 1] = if b == n { avg } else { avg.max(best[b]) };
        }
        for x in a..n {
            out[x] = out[x].max(best[x]);
        }
    }
    GridFunction::new(d, out)
}

/// `max_x M_all f(x) / M f(x)`: how far the shifted-grid maximum falls
/// below the maximum over all intervals (`n = 1`, zero where both vanish).
pub fn comparability_constant(f: &GridFunction, grids: &[Grid]) -> Result<f64> {
    let all = interval_maximal(f)?;
    let fam = maximal(f, grids)?;
    let mut c: f64 = 0.0;
    for (a, b) in all.values().iter().zip(fam.values()) {
        if *a > 0.0 {
            c = c.max(a / b);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Shift;

    fn d1(l: u32) -> Domain {
        Domain::new(1, l).unwrap()
    }

    #[test]
    fn constants_are_fixed() {
        for d in [d1(5), Domain::new(2, 3).unwrap()] {
            let one = GridFunction::constant(d, 1.0);
            let m = maximal(&one, &Grid::family(d)).unwrap();
            assert!(m.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn half_indicator_profile() {
        let d = d1(6);
        let chi = GridFunction::from_fn(d, |x| if x[0] < 0.5 { 1.0 } else { 0.0 });
        let m = maximal(&chi, &Grid::family(d)).unwrap();
        for (i, &v) in m.values().iter().enumerate() {
            assert!(v >= 0.5 - 1e-15);
            assert!(v >= chi.values()[i]);
            if i < 32 {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
        // Brute force: every standard dyadic interval [a 2^-k, (a+1) 2^-k).
        let std_only = maximal(&chi, &[Grid::standard(d)]).unwrap();
        for i in 32..64 {
            let mut best: f64 = 0.0;
            for k in 0..=6u32 {
                let len = 64 >> k;
                let start = i / len * len;
                let ones = (start..start + len).filter(|&j| j < 32).count();
                best = best.max(ones as f64 / len as f64);
            }
            assert_eq!(std_only.values()[i], best);
        }
    }

    #[test]
    fn power_maximal_matches_solver() {
        let d = d1(5);
        let f = GridFunction::from_fn(d, |x| (x[0] * 9.0).sin().abs() + 0.05);
        let grids = Grid::family(d);
        let p = YoungFunction::power(2.0).unwrap();
        let fast = orlicz_maximal(&f, &p, &grids).unwrap();
        let slow = orlicz_maximal_cells(d, &f, &p, &family_cells(&grids)).unwrap();
        for (a, b) in fast.values().iter().zip(slow.values()) {
            assert!((a - b).abs() <= 1e-11 * a);
        }
        let lin = orlicz_maximal(&f, &YoungFunction::power(1.0).unwrap(), &grids).unwrap();
        assert_eq!(lin, maximal(&f, &grids).unwrap());
    }

    #[test]
    fn bilinear_bounds() {
        let d = d1(5);
        let grids = Grid::family(d);
        let f = GridFunction::from_fn(d, |x| 1.0 + x[0]);
        let g = GridFunction::from_fn(d, |x| (6.0 * x[0]).cos().abs());
        let p1 = YoungFunction::power(1.0).unwrap();
        let b = bisublinear_maximal(&f, &g, &p1, &p1, &grids).unwrap();
        let m0 = frac_maximal_bilinear(&f, &g, 0.0, &grids).unwrap();
        let (mf, mg) = (maximal(&f, &grids).unwrap(), maximal(&g, &grids).unwrap());
        for i in 0..d.len() {
            assert!((b.values()[i] - m0.values()[i]).abs() <= 1e-12 * b.values()[i]);
            assert!(b.values()[i] <= mf.values()[i] * mg.values()[i] * (1.0 + 1e-12));
        }
        let one = GridFunction::constant(d, 1.0);
        let ma = frac_maximal_bilinear(&one, &one, 0.5, &grids).unwrap();
        assert!(ma.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(frac_maximal_bilinear(&one, &one, 2.0, &grids).is_err());
    }

    #[test]
    fn interval_maximal_against_brute_force() {
        let d = d1(5);
        let f = GridFunction::from_fn(d, |x| (x[0] * 13.0).sin().abs() + if x[0] > 0.7 { 3.0 } else { 0.0 });
        let m = interval_maximal(&f).unwrap();
        for x in 0..32 {
            let mut best: f64 = 0.0;
            for a in 0..=x {
                for b in x + 1..=32 {
                    best = best.max(f.values()[a..b].iter().sum::<f64>() / (b - a) as f64);
                }
            }
            assert!((m.values()[x] - best).abs() <= 1e-12 * best);
        }
        let c = comparability_constant(&f, &Grid::family(d)).unwrap();
        let c_std = comparability_constant(&f, &[Grid::standard(d)]).unwrap();
        assert!((1.0..=6.0).contains(&c) && c <= c_std);
        let mut spike = vec![0.0; 64];
        spike[31] = 1.0;
        let spike = GridFunction::new(d1(6), spike).unwrap();
        // The standard grid alone is not comparable at the midpoint.
        assert!(comparability_constant(&spike, &[Grid::standard(d1(6))]).unwrap() >= 16.0);
        assert!(comparability_constant(&spike, &Grid::family(d1(6))).unwrap() <= 6.0);
        assert!(interval_maximal(&GridFunction::constant(Domain::new(2, 2).unwrap(), 1.0)).is_err());
    }

    #[test]
    fn shifted_cells_only_with_centers() {
        let d = d1(3);
        let cells = family_cells(&[Grid::new(d, Shift([1, 0]))]);
        assert!(cells.iter().all(|c| {
            let mut hit = false;
            c.region.for_each_center(|_| hit = true);
            hit
        }));
    }
}
