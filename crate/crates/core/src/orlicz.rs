//! Localized Luxemburg norms `‖f‖_{Φ,Q} = inf{λ > 0 : ⨍_Q Φ(|f|/λ) <= 1}`
//! and the Hölder inequalities built on them.

use alloc::vec::Vec;

use crate::dyadic::{GridFunction, Region};
use crate::math::{exp, ln};
use crate::young::{inverse_product_constant, YoungFunction};
use crate::{Error, Result};

/// Stop once the bracket on `ln λ` is this narrow.
pub const NORM_TOL: f64 = 1e-12;
/// Iteration cap of the norm solver.
pub const NORM_MAX_ITER: usize = 200;

/// A Young function prepared for repeated norm evaluations.
#[derive(Clone, Debug)]
pub struct Gauge<'a> {
    phi: &'a YoungFunction,
    inv_one: f64,
}

impl<'a> Gauge<'a> {
    pub fn new(phi: &'a YoungFunction) -> Result<Self> {
        let inv_one = phi.inverse(1.0)?;
        if !(inv_one > 0.0 && inv_one.is_finite()) {
            return Err(Error::InvalidParameter("Φ^{-1}(1) must be positive and finite"));
        }
        Ok(Gauge { phi, inv_one })
    }

    pub fn phi(&self) -> &YoungFunction {
        self.phi
    }

    /// Norm of a discrete distribution: `entries` holds `(|value|, mass)`
    /// with masses summing to one.
    ///
    /// Solves `ln ⨍ Φ(|f|/λ) = 0` in `ln λ` with a safeguarded
    /// regula falsi (Illinois) iteration inside the bracket
    /// `[avg/Φ^{-1}(1), max/Φ^{-1}(1)]`, which Jensen's inequality and
    /// monotonicity guarantee.
    pub fn norm_of_distribution(&self, entries: &[(f64, f64)]) -> Result<f64> {
        let (mut max, mut avg) = (0.0f64, 0.0);
        for &(a, w) in entries {
            max = max.max(a);
            avg += a * w;
        }
        if max == 0.0 {
            return Ok(0.0);
        }
        let g = |u: f64| {
            let lam = exp(u);
            let s: f64 = entries.iter().map(|&(a, w)| w * self.phi.eval(a / lam)).sum();
            ln(s)
        };
        let (mut a, mut b) = (ln(avg / self.inv_one), ln(max / self.inv_one));
        if b - a <= NORM_TOL {
            return Ok(exp(0.5 * (a + b)));
        }
        let (mut ga, mut gb) = (g(a), g(b));
        debug_assert!(!(ga < gb), "defining average must decrease in λ");
        if ga <= 0.0 {
            return Ok(exp(a));
        }
        if gb >= 0.0 {
            return Ok(exp(b));
        }
        let mut side = 0i8;
        for _ in 0..NORM_MAX_ITER {
            if b - a <= NORM_TOL * (1.0 + a.abs().min(b.abs())) {
                return Ok(exp(0.5 * (a + b)));
            }
            let mut x = if ga.is_finite() && gb.is_finite() {
                (a * gb - b * ga) / (gb - ga)
            } else {
                0.5 * (a + b)
            };
            if !(x > a && x < b) {
                x = 0.5 * (a + b);
            }
            let gx = g(x);
            if gx == 0.0 || gx.abs() < 1e-15 {
                return Ok(exp(x));
            }
            if gx > 0.0 {
                a = x;
                ga = gx;
                if side == 1 {
                    gb *= 0.5;
                }
                side = 1;
            } else {
                b = x;
                gb = gx;
                if side == -1 {
                    ga *= 0.5;
                }
                side = -1;
            }
        }
        Err(Error::NoConvergence(NORM_MAX_ITER))
    }

    /// `‖f‖_{Φ,Q}` using `buf` as scratch space.
    pub fn norm_with(&self, values: &[f64], region: &Region, buf: &mut Vec<(f64, f64)>) -> Result<f64> {
        buf.clear();
        let total = region.measure_units() as f64;
        if total == 0.0 {
            return Err(Error::ZeroMeasure);
        }
        region.for_each_overlap(|i, w| buf.push((values[i].abs(), w as f64 / total)));
        self.norm_of_distribution(buf)
    }

    pub fn norm(&self, f: &GridFunction, region: &Region) -> Result<f64> {
        self.norm_with(f.values(), region, &mut Vec::new())
    }
}

/// `‖f‖_{Φ,Q}`; zero when `f` vanishes on `Q`.
pub fn orlicz_norm(f: &GridFunction, q: &Region, phi: &YoungFunction) -> Result<f64> {
    Gauge::new(phi)?.norm(f, q)
}

/// `‖χ_E‖_{Φ̄,Q} = 1 / Φ̄^{-1}(|Q|/|E|)` for `frac = |E|/|Q|`.
pub fn indicator_norm_formula(frac: f64, phibar: &YoungFunction) -> Result<f64> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::InvalidParameter("indicator fraction must lie in (0, 1]"));
    }
    Ok(1.0 / phibar.inverse(1.0 / frac)?)
}

/// Both sides of `⨍_Q |fg| <= 2 ‖f‖_{Φ,Q} ‖g‖_{Φ̄,Q}`.
pub fn holder_pair(f: &GridFunction, g: &GridFunction, q: &Region, phi: &YoungFunction) -> Result<(f64, f64)> {
    holder_pair_with(f, g, q, phi, &phi.conjugate()?)
}

/// [`holder_pair`] with a precomputed conjugate.
pub fn holder_pair_with(
    f: &GridFunction,
    g: &GridFunction,
    q: &Region,
    phi: &YoungFunction,
    phibar: &YoungFunction,
) -> Result<(f64, f64)> {
    let lhs = f.mul(g)?.abs().average(q)?;
    let rhs = 2.0 * orlicz_norm(f, q, phi)? * orlicz_norm(g, q, phibar)?;
    Ok((lhs, rhs))
}

/// Generalized Hölder: `‖fg‖_{Θ,Q} <= 2κ ‖f‖_{Φ,Q} ‖g‖_{Ψ,Q}` where
/// `κ = sup_t Φ^{-1}(t) Ψ^{-1}(t) / Θ^{-1}(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenHolder {
    pub lhs: f64,
    pub rhs: f64,
    pub kappa: f64,
}

pub fn gen_holder(
    f: &GridFunction,
    g: &GridFunction,
    q: &Region,
    phi: &YoungFunction,
    psi: &YoungFunction,
    theta: &YoungFunction,
) -> Result<GenHolder> {
    let kappa = inverse_product_constant(phi, psi, theta)?;
    gen_holder_with_kappa(f, g, q, phi, psi, theta, kappa)
}

/// [`gen_holder`] with a precomputed constant.
pub fn gen_holder_with_kappa(
    f: &GridFunction,
    g: &GridFunction,
    q: &Region,
    phi: &YoungFunction,
    psi: &YoungFunction,
    theta: &YoungFunction,
    kappa: f64,
) -> Result<GenHolder> {
    let lhs = orlicz_norm(&f.mul(g)?, q, theta)?;
    let rhs = 2.0 * kappa * orlicz_norm(f, q, phi)? * orlicz_norm(g, q, psi)?;
    Ok(GenHolder { lhs, rhs, kappa })
}
