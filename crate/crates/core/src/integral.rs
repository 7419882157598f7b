//! Kernel operators evaluated by direct summation over finest cells: the
//! Hilbert-type test CZO and the bilinear fractional family.

use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::{Domain, GridFunction};
use crate::math::{powf, sqrt};
use crate::{Error, Result};

/// `Tf(x_i) = Σ_{j ≠ i} f_j / (i - j)`: the kernel `1/(x - y)` at cell
/// centers with the diagonal omitted (one dimension only).
pub fn czo_apply(f: &GridFunction) -> Result<GridFunction> {
    let d = f.domain();
    if d.dim() != 1 {
        return Err(Error::Unsupported("the test CZO is one-dimensional"));
    }
    let v = f.values();
    let n = v.len();
    let out = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, &fj) in v.iter().enumerate() {
                if j != i {
                    acc += fj / (i as f64 - j as f64);
                }
            }
            acc
        })
        .collect();
    GridFunction::new(d, out)
}

fn check_pair(f: &GridFunction, g: &GridFunction, alpha: f64, upper: f64) -> Result<Domain> {
    let d = f.domain();
    if g.domain() != d {
        return Err(Error::DomainMismatch);
    }
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::InvalidParameter("alpha outside the operator's range"));
    }
    Ok(d)
}

/// Calls `visit(fx_minus, gx_plus, m)` for every lattice offset `m` with
/// both `x - m` and `x + m` inside the box.
#[inline]
fn for_each_offset<F: FnMut(f64, f64, [i64; 2])>(d: Domain, f: &[f64], g: &[f64], x: usize, mut visit: F) {
    let side = d.side() as i64;
    let xm = d.multi(x);
    let (x0, x1) = (xm[0] as i64, xm[1] as i64);
    let r0 = x0.min(side - 1 - x0);
    if d.dim() == 1 {
        for m in -r0..=r0 {
            visit(f[(x0 - m) as usize], g[(x0 + m) as usize], [m, 0]);
        }
        return;
    }
    let r1 = x1.min(side - 1 - x1);
    for m0 in -r0..=r0 {
        let (a, b) = ((x0 - m0) * side, (x0 + m0) * side);
        for m1 in -r1..=r1 {
            visit(f[(a + x1 - m1) as usize], g[(b + x1 + m1) as usize], [m0, m1]);
        }
    }
}

/// `|m|^2` of a lattice offset.
#[inline]
fn norm2(m: [i64; 2]) -> i64 {
    m[0] * m[0] + m[1] * m[1]
}

/// `BI_α(f,g)(x) = ∫ f(x-y) g(x+y) |y|^{α-n} dy` by the midpoint rule on
/// the lattice `y = m h`, omitting `y = 0`; `f`, `g` vanish off the box.
pub fn bi_fractional_direct(f: &GridFunction, g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let d = check_pair(f, g, alpha, d_n(f))?;
    let n = d.dim() as f64;
    let h = d.cell_side();
    let max2 = 2 * (d.side() as i64).pow(2);
    let kernel: Vec<f64> = (0..=max2)
        .map(|r2| if r2 == 0 { 0.0 } else { powf(sqrt(r2 as f64) * h, alpha - n) })
        .collect();
    let vol = d.cell_volume();
    let out = (0..d.len())
        .map(|x| {
            let mut acc = 0.0;
            for_each_offset(d, f.values(), g.values(), x, |a, b, m| acc += a * b * kernel[norm2(m) as usize]);
            acc * vol
        })
        .collect();
    GridFunction::new(d, out)
}

fn d_n(f: &GridFunction) -> f64 {
    f.domain().dim() as f64
}

/// `BM_α(f,g)(x) = sup_r (2r)^{α-n} ∫_{[-r,r]^n} |f(x-y) g(x+y)| dy` over
/// the radii `r = (R + 1/2) h`, `R ∈ {0, 1, 2, 4, …, 2^L}`.
pub fn bm_alpha(f: &GridFunction, g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let d = check_pair(f, g, alpha, d_n(f))?;
    let n = d.dim() as f64;
    let h = d.cell_side();
    let mut radii = vec![0i64];
    let mut r = 1i64;
    while r <= d.side() as i64 {
        radii.push(r);
        r *= 2;
    }
    let vol = d.cell_volume();
    let out = (0..d.len())
        .map(|x| {
            // Mass in each sup-norm shell, then cumulative over radii.
            let mut shells = vec![0.0; d.side() + 1];
            for_each_offset(d, f.values(), g.values(), x, |a, b, m| {
                shells[m[0].unsigned_abs().max(m[1].unsigned_abs()) as usize] += (a * b).abs();
            });
            let mut best: f64 = 0.0;
            let mut acc = 0.0;
            let mut next = 0;
            for (rad, mass) in shells.iter().enumerate() {
                acc += mass;
                while next < radii.len() && radii[next] == rad as i64 {
                    let side = (2 * rad + 1) as f64 * h;
                    best = best.max(powf(side, alpha - n) * acc * vol);
                    next += 1;
                }
            }
            best
        })
        .collect();
    GridFunction::new(d, out)
}

/// `𝓘_α(f,g)(x) = ∫∫ f(y) g(z) (|x-y| + |x-z|)^{α-2n} dy dz` on the
/// lattice, omitting `y = z = x` (one dimension only; cubic cost).
pub fn i_alpha(f: &GridFunction, g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let d = check_pair(f, g, alpha, 2.0 * d_n(f))?;
    if d.dim() != 1 {
        return Err(Error::Unsupported("the less singular operator is one-dimensional"));
    }
    let h = d.cell_side();
    let n = d.len();
    let kernel: Vec<f64> = (0..2 * n)
        .map(|c| if c == 0 { 0.0 } else { powf(c as f64 * h, alpha - 2.0) })
        .collect();
    let (fv, gv) = (f.values(), g.values());
    let out = (0..n)
        .map(|x| {
            // F(a) = Σ_{|x-j| = a} f_j, likewise G; then Σ_{a,b} F(a) G(b) K(a+b).
            let mut fa = vec![0.0; n];
            let mut ga = vec![0.0; n];
            for j in 0..n {
                let a = x.abs_diff(j);
                fa[a] += fv[j];
                ga[a] += gv[j];
            }
            let mut acc = 0.0;
            for (a, &fa) in fa.iter().enumerate() {
                if fa == 0.0 {
                    continue;
                }
                for (b, &gb) in ga.iter().enumerate() {
                    acc += fa * gb * kernel[a + b];
                }
            }
            acc * h * h
        })
        .collect();
    GridFunction::new(d, out)
}

/// `BI_α^D(f,g)(x) = Σ_{Q ∋ x} |Q|^{α/n - 1} ∫_{|y| <= ℓ(Q)} f(x-y) g(x+y) dy`
/// over the standard cubes of levels `0..=L`, with `y` on the lattice
/// (including `y = 0`).
pub fn bi_fractional_dyadic(f: &GridFunction, g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let d = check_pair(f, g, alpha, d_n(f))?;
    let n = d.dim() as f64;
    let l = d.depth();
    let vol = d.cell_volume();
    // Level k covers |m| <= 2^{L-k}; weight 2^{-k(α-n)}.
    let weight: Vec<f64> = (0..=l).map(|k| powf(2.0, -(k as f64) * (alpha - n))).collect();
    let max2 = 2 * (d.side() as i64).pow(2);
    let deepest: Vec<usize> = (0..=max2)
        .map(|r2| (0..=l).rev().find(|&k| r2 <= 1i64 << (2 * (l - k))).unwrap_or(0) as usize)
        .collect();
    let out = (0..d.len())
        .map(|x| {
            let mut by_level = vec![0.0; l as usize + 1];
            for_each_offset(d, f.values(), g.values(), x, |a, b, m| {
                by_level[deepest[norm2(m) as usize]] += a * b;
            });
            // A term admitted at level k also counts at every coarser level.
            let (mut acc, mut suffix) = (0.0, 0.0);
            for k in (0..=l as usize).rev() {
                suffix += by_level[k];
                acc += weight[k] * suffix;
            }
            acc * vol
        })
        .collect();
    GridFunction::new(d, out)
}
