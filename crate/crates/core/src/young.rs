//! Young functions: a closed-form catalog plus numerically conjugated and
//! rescaled wrappers.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::math::{self, dual, exp, ln, powf};
use crate::{Error, Result};

/// Relative slack for discrete convexity and monotonicity checks.
pub const EPS_CONVEX: f64 = 1e-9;
/// Relative tolerance targeted by [`YoungFunction::inverse`].
pub const TOL_REL: f64 = 1e-10;
/// Number of samples in a conjugate table.
pub const CONJUGATE_SAMPLES: usize = 512;
/// Range of `s` covered by a conjugate table.
pub const CONJUGATE_RANGE: (f64, f64) = (1e-6, 1e6);
/// Truncation point of the numeric `B_p` integral.
pub const BP_TRUNCATION: f64 = 1e8;
/// A fitted tail exponent this close to `p` makes a numeric `B_p` test inconclusive.
pub const BP_MARGIN: f64 = 0.05;

const E: f64 = core::f64::consts::E;
/// `e^e`, the offset inside the oscillatory exponent.
const E_POW_E: f64 = 15.154_262_241_479_262;
/// Relative step of the one-sided difference slopes used by conjugation.
const SLOPE_STEP: f64 = 1e-7;
/// Samples used by the convexity checks.
const CHECK_GRID: (f64, f64, usize) = (1e-6, 1e6, 241);

/// The shape of a Young function.
#[derive(Clone, Debug, PartialEq)]
pub enum Variant {
    /// `t^p`.
    Power { p: f64 },
    /// `t^p log(e + t)^(p - 1 + delta)`.
    LogBump { p: f64, delta: f64 },
    /// `t^(s + a sin(log log(e^e + t)))`.
    Oscillatory { s: f64, a: f64 },
    /// `t -> base(t^(1/r))`.
    OuterRescale { base: Box<YoungFunction>, r: f64 },
    /// Legendre conjugate of `base`, tabulated.
    NumericConjugate {
        base: Box<YoungFunction>,
        table: ConjugateTable,
    },
}

/// A convex gauge `Φ` with `Φ(0) = 0`.
///
/// Values are immutable after construction; conjugate tables are built
/// eagerly, so a `YoungFunction` can be shared freely between threads.
#[derive(Clone, Debug, PartialEq)]
pub struct YoungFunction {
    variant: Variant,
    normalized: bool,
    scale: f64,
}

impl YoungFunction {
    fn from_variant(variant: Variant) -> Self {
        YoungFunction {
            variant,
            normalized: false,
            scale: 1.0,
        }
    }

    /// `t^p`. `p = 1` is accepted as the degenerate linear gauge; it has
    /// no conjugate.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter("power exponent must be >= 1"));
        }
        Ok(Self::from_variant(Variant::Power { p }))
    }

    pub fn log_bump(p: f64, delta: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter("log-bump exponent must be > 1"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter("log-bump delta must be > 0"));
        }
        Ok(Self::from_variant(Variant::LogBump { p, delta }))
    }

    pub fn oscillatory(s: f64, a: f64) -> Result<Self> {
        if !(s.is_finite() && a > 0.0 && a < s - 1.0) {
            return Err(Error::InvalidParameter(
                "oscillatory parameters need 0 < a < s - 1",
            ));
        }
        Ok(Self::from_variant(Variant::Oscillatory { s, a }))
    }

    /// Returns the same function divided by its value at 1 (when `on`), or
    /// the literal formula (when not).
    pub fn with_normalization(mut self, on: bool) -> Self {
        self.normalized = on;
        self.scale = 1.0;
        if on {
            let at_one = self.eval(1.0);
            if at_one > 0.0 && at_one.is_finite() {
                self.scale = 1.0 / at_one;
            }
        }
        self
    }

    pub fn normalized(self) -> Self {
        self.with_normalization(true)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    /// The exponent when this function is literally a power `c t^p`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.variant {
            Variant::Power { p } => Some(p),
            _ => None,
        }
    }

    /// `Φ(t)`; `+∞` once the value overflows.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let raw = match &self.variant {
            Variant::Power { p } => powf(t, *p),
            Variant::LogBump { p, delta } => powf(t, *p) * powf(ln(E + t), p - 1.0 + delta),
            Variant::Oscillatory { s, a } => powf(t, s + a * math::sin(ln(ln(E_POW_E + t)))),
            Variant::OuterRescale { base, r } => base.eval(powf(t, 1.0 / r)),
            Variant::NumericConjugate { base, table } => match table.eval(t) {
                Some(v) => v,
                None => legendre(base, t).map(|(v, _)| v).unwrap_or(f64::INFINITY),
            },
        };
        raw * self.scale
    }

    /// `Φ(t)`, failing on negative, non-finite or overflowing input.
    pub fn try_eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::OutOfRange(t));
        }
        let v = self.eval(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::OutOfRange(t))
        }
    }

    /// `Φ^{-1}(y)`: closed form for powers and their rescalings, monotone
    /// bisection over a geometrically grown bracket otherwise.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter("inverse needs a finite y >= 0"));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let y_raw = y / self.scale;
        match &self.variant {
            Variant::Power { p } => Ok(powf(y_raw, 1.0 / p)),
            Variant::OuterRescale { base, r } => Ok(powf(base.inverse(y_raw)?, *r)),
            _ => self.bisect_inverse(y),
        }
    }

    fn bisect_inverse(&self, y: f64) -> Result<f64> {
        let (mut lo, mut hi): (f64, f64) = (1.0, 1.0);
        if self.eval(1.0) < y {
            loop {
                lo = hi;
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::BracketFailure(y));
                }
                if self.eval(hi) >= y {
                    break;
                }
            }
        } else {
            loop {
                hi = lo;
                lo *= 0.5;
                if lo == 0.0 {
                    return Err(Error::BracketFailure(y));
                }
                if self.eval(lo) < y {
                    break;
                }
            }
        }
        for _ in 0..200 {
            let mid = math::sqrt(lo) * math::sqrt(hi);
            if mid <= lo || mid >= hi || hi / lo - 1.0 < 1e-15 {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (dl, dh) = ((self.eval(lo) - y).abs(), (self.eval(hi) - y).abs());
        Ok(if dl < dh { lo } else { hi })
    }

    /// The complementary function `Φ̄(s) = sup_t (st - Φ(t))`.
    ///
    /// Powers map to powers exactly, a numeric conjugate maps back to its
    /// base, and anything else is tabulated.
    pub fn conjugate(&self) -> Result<Self> {
        match &self.variant {
            Variant::Power { p } if self.scale == 1.0 => {
                if *p == 1.0 {
                    Err(Error::InvalidParameter("the linear gauge has no finite conjugate"))
                } else {
                    Ok(Self::from_variant(Variant::Power { p: dual(*p) }))
                }
            }
            Variant::NumericConjugate { base, .. } if self.scale == 1.0 => Ok((**base).clone()),
            _ => {
                let table = ConjugateTable::build(self)?;
                Ok(Self::from_variant(Variant::NumericConjugate {
                    base: Box::new(self.clone()),
                    table,
                }))
            }
        }
    }

    /// `Ψ(t) = Φ₀(t^{1/r})` for `0 < r <= 1`.
    pub fn rescale_outer(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter("rescale exponent must lie in (0, 1]"));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        let variant = match &self.variant {
            Variant::Power { p } if self.scale == 1.0 => Variant::Power { p: p / r },
            Variant::OuterRescale { base, r: inner } if self.scale == 1.0 => Variant::OuterRescale {
                base: base.clone(),
                r: inner * r,
            },
            _ => Variant::OuterRescale {
                base: Box::new(self.clone()),
                r,
            },
        };
        let mut out = Self::from_variant(variant);
        out.normalized = self.normalized;
        Ok(out)
    }

    /// Classifies membership in `B_p`, analytically where the catalog
    /// allows it and by truncated integration otherwise.
    pub fn bp_test(&self, p: f64) -> Result<BpReport> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter("B_p needs p > 1"));
        }
        let analytic = |inside: bool, reason: &'static str| BpReport {
            verdict: if inside {
                BpVerdict::InBp
            } else {
                BpVerdict::NotInBp
            },
            certificate: BpCertificate::Analytic { reason },
        };
        match &self.variant {
            Variant::Power { p: q } => Ok(analytic(*q < p, "power: integrable iff q < p")),
            Variant::LogBump { p: q, .. } => Ok(analytic(
                *q < p,
                "log bump: integrable iff q < p; at q = p the log exponent exceeds -1",
            )),
            Variant::Oscillatory { s, a } if s + a < p => {
                Ok(analytic(true, "oscillatory: dominated by t^(s+a)"))
            }
            Variant::Oscillatory { s, a } if s - a >= p => {
                Ok(analytic(false, "oscillatory: dominates t^(s-a)"))
            }
            Variant::OuterRescale { base, r } => {
                if p * r > 1.0 {
                    let inner = base.bp_test(p * r)?;
                    Ok(match inner.certificate {
                        BpCertificate::Analytic { .. } => {
                            analytic(inner.verdict == BpVerdict::InBp, "rescale: substitute u = t^(1/r)")
                        }
                        _ => inner,
                    })
                } else {
                    Ok(analytic(false, "rescale: p r <= 1 and Young functions grow linearly"))
                }
            }
            _ => Ok(self.bp_numeric(p)),
        }
    }

    fn bp_numeric(&self, p: f64) -> BpReport {
        // ∫_1^T Φ(t) t^{-p} dt/t = ∫_0^{ln T} Φ(e^u) e^{-pu} du by Simpson.
        let intervals = 4000;
        let top = ln(BP_TRUNCATION);
        let h = top / intervals as f64;
        let f = |u: f64| self.eval(exp(u)) * exp(-p * u);
        let mut acc = f(0.0) + f(top);
        for i in 1..intervals {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let partial = acc * h / 3.0;
        let at_t = self.eval(BP_TRUNCATION);
        let gamma = ln(at_t / self.eval(BP_TRUNCATION / 10.0)) / ln(10.0);
        if (gamma - p).abs() <= BP_MARGIN || !gamma.is_finite() {
            return BpReport {
                verdict: BpVerdict::Inconclusive,
                certificate: BpCertificate::Boundary {
                    partial,
                    tail_exponent: gamma,
                },
            };
        }
        if gamma < p {
            let tail_bound = at_t * powf(BP_TRUNCATION, -p) / (p - gamma);
            BpReport {
                verdict: BpVerdict::InBp,
                certificate: BpCertificate::Integral {
                    partial,
                    tail_exponent: gamma,
                    tail_bound,
                },
            }
        } else {
            BpReport {
                verdict: BpVerdict::NotInBp,
                certificate: BpCertificate::Divergent {
                    partial,
                    tail_exponent: gamma,
                },
            }
        }
    }

    /// Whether `t -> Φ(t^{1/a})` is convex and nondecreasing on the
    /// sampled grid.
    pub fn is_a_young(&self, a: f64) -> bool {
        if !(a > 1.0) {
            return false;
        }
        let ts = math::log_space(CHECK_GRID.0, CHECK_GRID.1, CHECK_GRID.2);
        let vs: Vec<f64> = ts.iter().map(|&t| self.eval(powf(t, 1.0 / a))).collect();
        discrete_convex(&ts, &vs).is_ok()
    }

    /// Checks the defining properties on the sampled grid: `Φ(0) = 0`,
    /// monotone, convex, and `Φ(t)/t` still increasing at the top sample.
    pub fn check_young(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidParameter("Φ(0) must vanish"));
        }
        let ts = math::log_space(CHECK_GRID.0, CHECK_GRID.1, CHECK_GRID.2);
        let vs: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        discrete_convex(&ts, &vs)?;
        let top = CHECK_GRID.1;
        if self.eval(top) / top <= self.eval(top / 2.0) / (top / 2.0) {
            return Err(Error::InvalidParameter("Φ(t)/t does not grow at the top sample"));
        }
        Ok(())
    }
}

/// Monotone and convex within [`EPS_CONVEX`], on a sorted sample.
fn discrete_convex(ts: &[f64], vs: &[f64]) -> Result<()> {
    let mut prev_slope: Option<f64> = None;
    for i in 0..ts.len() - 1 {
        let (v0, v1) = (vs[i], vs[i + 1]);
        if !(v0.is_finite() && v1.is_finite()) {
            return Err(Error::OutOfRange(ts[i + 1]));
        }
        if v1 < v0 - EPS_CONVEX * v0.abs() {
            return Err(Error::NonConvex(ts[i]));
        }
        let slope = (v1 - v0) / (ts[i + 1] - ts[i]);
        if let Some(prev) = prev_slope {
            if slope < prev - EPS_CONVEX * (prev.abs() + slope.abs()) {
                return Err(Error::NonConvex(ts[i]));
            }
        }
        prev_slope = Some(slope);
    }
    Ok(())
}

/// `sup_t (st - Φ(t))` and its maximizer, by bisection on the sign of the
/// one-sided slope of `Φ` against `s`.
fn legendre(phi: &YoungFunction, s: f64) -> Result<(f64, f64)> {
    if s <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let slope = |t: f64| (phi.eval(t * (1.0 + SLOPE_STEP)) - phi.eval(t)) / (t * SLOPE_STEP);
    let gain = |t: f64| s * t - phi.eval(t);
    let (mut lo, mut hi): (f64, f64) = (1.0, 1.0);
    if slope(1.0) < s {
        loop {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 || !phi.eval(hi).is_finite() {
                return Err(Error::OutOfRange(s));
            }
            if slope(hi) >= s {
                break;
            }
        }
    } else {
        loop {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok((gain(lo).max(0.0), 0.0));
            }
            if slope(lo) < s {
                break;
            }
        }
    }
    for _ in 0..200 {
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
        let mid = math::sqrt(lo) * math::sqrt(hi);
        let (gl, gm, gh) = (gain(lo), gain(mid), gain(hi));
        if gm < gl.min(gh) - EPS_CONVEX * (s * hi + phi.eval(hi)) {
            return Err(Error::NonConvex(mid));
        }
        if slope(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gl, gh) = (gain(lo), gain(hi));
    let (value, arg) = if gl >= gh { (gl, lo) } else { (gh, hi) };
    Ok((value.max(0.0), arg))
}

/// Conjugate values on [`CONJUGATE_SAMPLES`] log-spaced points of
/// [`CONJUGATE_RANGE`], interpolated by cubic Hermite splines in log-log
/// coordinates using the exact derivative `Φ̄'(s) = t*(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateTable {
    ln_s0: f64,
    step: f64,
    values: Vec<f64>,
    /// `d ln Φ̄ / d ln s` at each sample (zero where `Φ̄` vanishes).
    log_slopes: Vec<f64>,
}

impl ConjugateTable {
    fn build(phi: &YoungFunction) -> Result<Self> {
        let (lo, hi) = CONJUGATE_RANGE;
        let ln_s0 = ln(lo);
        let step = (ln(hi) - ln_s0) / (CONJUGATE_SAMPLES - 1) as f64;
        let mut values = Vec::with_capacity(CONJUGATE_SAMPLES);
        let mut log_slopes = Vec::with_capacity(CONJUGATE_SAMPLES);
        for i in 0..CONJUGATE_SAMPLES {
            let s = exp(ln_s0 + step * i as f64);
            let (v, t) = legendre(phi, s)?;
            values.push(v);
            log_slopes.push(if v > 0.0 { s * t / v } else { 0.0 });
        }
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(Error::NonConvex(w[0]));
            }
        }
        Ok(ConjugateTable {
            ln_s0,
            step,
            values,
            log_slopes,
        })
    }

    fn eval(&self, s: f64) -> Option<f64> {
        let x = (ln(s) - self.ln_s0) / self.step;
        let last = (self.values.len() - 1) as f64;
        if !(x >= 0.0 && x <= last) {
            return None;
        }
        let i = (math::floor(x) as usize).min(self.values.len() - 2);
        let u = x - i as f64;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if v0 <= 0.0 || v1 <= 0.0 {
            let s0 = exp(self.ln_s0 + self.step * i as f64);
            let s1 = exp(self.ln_s0 + self.step * (i + 1) as f64);
            return Some(v0 + (s - s0) / (s1 - s0) * (v1 - v0));
        }
        let (y0, y1) = (ln(v0), ln(v1));
        let (m0, m1) = (self.log_slopes[i] * self.step, self.log_slopes[i + 1] * self.step);
        let (u2, u3) = (u * u, u * u * u);
        let y = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        Some(exp(y))
    }
}

/// Outcome of a `B_p` classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BpVerdict {
    InBp,
    NotInBp,
    Inconclusive,
}

/// Evidence behind a [`BpVerdict`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum BpCertificate {
    Analytic {
        reason: &'static str,
    },
    /// `∫_1^T` plus a bound on the fitted power tail.
    Integral {
        partial: f64,
        tail_exponent: f64,
        tail_bound: f64,
    },
    /// The fitted tail exponent is at least `p`.
    Divergent { partial: f64, tail_exponent: f64 },
    /// The fitted tail exponent is within [`BP_MARGIN`] of `p`.
    Boundary { partial: f64, tail_exponent: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BpReport {
    pub verdict: BpVerdict,
    pub certificate: BpCertificate,
}

/// `sup_t Φ^{-1}(t) Ψ^{-1}(t) / Θ^{-1}(t)` over a log grid: the constant in
/// the generalized Hölder inequality `‖fg‖_Θ <= 2κ ‖f‖_Φ ‖g‖_Ψ`.
pub fn inverse_product_constant(
    phi: &YoungFunction,
    psi: &YoungFunction,
    theta: &YoungFunction,
) -> Result<f64> {
    let mut kappa: f64 = 0.0;
    for t in math::log_space(1e-10, 1e10, 401) {
        let ratio = phi.inverse(t)? * psi.inverse(t)? / theta.inverse(t)?;
        kappa = kappa.max(ratio);
    }
    Ok(kappa)
}

#[cfg(feature = "serde")]
mod descriptor {
    use super::{Variant, YoungFunction};
    use alloc::boxed::Box;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "variant", content = "params", rename_all = "snake_case")]
    enum Repr {
        Power { p: f64 },
        LogBump { p: f64, delta: f64 },
        Oscillatory { s: f64, a: f64 },
        OuterRescale { base: Box<Descriptor>, r: f64 },
        NumericConjugate { base: Box<Descriptor> },
    }

    #[derive(Serialize, Deserialize)]
    struct Descriptor {
        #[serde(flatten)]
        repr: Repr,
        #[serde(default, skip_serializing_if = "core::ops::Not::not")]
        normalized: bool,
    }

    impl From<&YoungFunction> for Descriptor {
        fn from(phi: &YoungFunction) -> Self {
            let repr = match &phi.variant {
                Variant::Power { p } => Repr::Power { p: *p },
                Variant::LogBump { p, delta } => Repr::LogBump { p: *p, delta: *delta },
                Variant::Oscillatory { s, a } => Repr::Oscillatory { s: *s, a: *a },
                Variant::OuterRescale { base, r } => Repr::OuterRescale {
                    base: Box::new(Descriptor::from(&**base)),
                    r: *r,
                },
                Variant::NumericConjugate { base, .. } => Repr::NumericConjugate {
                    base: Box::new(Descriptor::from(&**base)),
                },
            };
            Descriptor {
                repr,
                normalized: phi.normalized,
            }
        }
    }

    impl TryFrom<Descriptor> for YoungFunction {
        type Error = crate::Error;

        fn try_from(d: Descriptor) -> crate::Result<Self> {
            let phi = match d.repr {
                Repr::Power { p } => YoungFunction::power(p)?,
                Repr::LogBump { p, delta } => YoungFunction::log_bump(p, delta)?,
                Repr::Oscillatory { s, a } => YoungFunction::oscillatory(s, a)?,
                Repr::OuterRescale { base, r } => {
                    let base = YoungFunction::try_from(*base)?;
                    if !(r > 0.0 && r <= 1.0) {
                        return Err(crate::Error::InvalidParameter(
                            "rescale exponent must lie in (0, 1]",
                        ));
                    }
                    YoungFunction::from_variant(Variant::OuterRescale {
                        base: Box::new(base),
                        r,
                    })
                }
                Repr::NumericConjugate { base } => YoungFunction::try_from(*base)?.conjugate()?,
            };
            Ok(phi.with_normalization(d.normalized))
        }
    }

    impl Serialize for YoungFunction {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            Descriptor::from(self).serialize(serializer)
        }
    }

    impl<'de> Deserialize<'de> for YoungFunction {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            let d = Descriptor::deserialize(deserializer)?;
            YoungFunction::try_from(d).map_err(de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn catalog_values() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(3.0), 9.0);
        assert_eq!(YoungFunction::power(2.5).unwrap().eval(0.0), 0.0);
        assert_eq!(YoungFunction::oscillatory(3.0, 1.0).unwrap().eval(1.0), 1.0);
        let lb = YoungFunction::log_bump(2.0, 1.0).unwrap();
        assert!(close(lb.eval(1.0), ln(E + 1.0) * ln(E + 1.0), 1e-15));
    }

    #[test]
    fn parameters_are_validated() {
        assert!(YoungFunction::power(0.5).is_err());
        assert!(YoungFunction::log_bump(1.0, 1.0).is_err());
        assert!(YoungFunction::log_bump(2.0, 0.0).is_err());
        assert!(YoungFunction::oscillatory(2.0, 1.0).is_err());
        assert!(YoungFunction::power(2.0).unwrap().rescale_outer(1.5).is_err());
        assert!(YoungFunction::power(1.0).unwrap().conjugate().is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.inverse(9.0).unwrap(), 3.0);
        assert_eq!(p2.inverse(0.0).unwrap(), 0.0);
        let lb = YoungFunction::log_bump(2.0, 1.0).unwrap();
        let y = lb.eval(5.0);
        let t = lb.inverse(y).unwrap();
        assert!(close(t, 5.0, 1e-12));
        assert!((lb.eval(t) - y).abs() <= TOL_REL * y.max(1.0));
        assert!(lb.inverse(f64::INFINITY).is_err());
        assert!(lb.inverse(-1.0).is_err());
    }

    #[test]
    fn power_conjugates_are_exact() {
        let c = YoungFunction::power(3.0).unwrap().conjugate().unwrap();
        assert_eq!(c.power_exponent(), Some(1.5));
        let cc = YoungFunction::power(2.0).unwrap().conjugate().unwrap().conjugate().unwrap();
        assert_eq!(cc.power_exponent(), Some(2.0));
    }

    #[test]
    fn numeric_conjugate_matches_power_formula() {
        // Force the numeric path with a normalized rescaled power.
        let phi = YoungFunction::power(1.5).unwrap().normalized();
        let wrapped = YoungFunction::from_variant(Variant::OuterRescale {
            base: Box::new(phi),
            r: 0.5,
        });
        let conj = wrapped.conjugate().unwrap();
        // (t^3)‾(s) = 2 (s/3)^{3/2}
        for &s in &[1e-4, 0.3, 1.0, 7.5, 2e3, 9e5] {
            let exact = 2.0 * powf(s / 3.0, 1.5);
            assert!(close(conj.eval(s), exact, 1e-8), "s = {s}");
        }
        assert_eq!(conj.conjugate().unwrap(), wrapped);
    }

    #[test]
    fn rescale_outer_algebra() {
        let p4 = YoungFunction::power(4.0).unwrap();
        assert_eq!(p4.rescale_outer(0.5).unwrap().power_exponent(), Some(8.0));
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!(close(p2.rescale_outer(2.0 / 3.0).unwrap().power_exponent().unwrap(), 3.0, 1e-15));
        let lb = YoungFunction::log_bump(2.0, 1.0).unwrap();
        assert_eq!(lb.rescale_outer(1.0).unwrap(), lb);
        let twice = lb.rescale_outer(0.5).unwrap().rescale_outer(0.5).unwrap();
        assert!(matches!(twice.variant(), Variant::OuterRescale { r, .. } if *r == 0.25));
    }

    #[test]
    fn bp_catalog() {
        let v = |phi: YoungFunction, p: f64| phi.bp_test(p).unwrap().verdict;
        assert_eq!(v(YoungFunction::power(1.5).unwrap(), 2.0), BpVerdict::InBp);
        assert_eq!(v(YoungFunction::power(2.0).unwrap(), 2.0), BpVerdict::NotInBp);
        assert_eq!(v(YoungFunction::oscillatory(2.0, 0.5).unwrap(), 3.0), BpVerdict::InBp);
        assert_eq!(v(YoungFunction::oscillatory(4.0, 0.5).unwrap(), 3.0), BpVerdict::NotInBp);
        assert_eq!(v(YoungFunction::log_bump(2.0, 1.0).unwrap(), 2.0), BpVerdict::NotInBp);
        let b = YoungFunction::log_bump(2.0, 1.0).unwrap().rescale_outer(0.5).unwrap();
        assert_eq!(v(b.clone(), 5.0), BpVerdict::InBp);
        assert_eq!(v(b, 3.0), BpVerdict::NotInBp);
        assert!(YoungFunction::power(2.0).unwrap().bp_test(1.0).is_err());
    }

    #[test]
    fn bp_numeric_paths() {
        let c = YoungFunction::log_bump(3.0, 1.0).unwrap().conjugate().unwrap();
        let r = c.bp_test(2.0).unwrap();
        assert_eq!(r.verdict, BpVerdict::InBp);
        assert!(matches!(r.certificate, BpCertificate::Integral { .. }));
        assert_eq!(c.bp_test(1.2).unwrap().verdict, BpVerdict::NotInBp);
        let boundary = c.bp_test(1.42).unwrap();
        assert_eq!(boundary.verdict, BpVerdict::Inconclusive);
    }

    #[test]
    fn a_young_examples() {
        assert!(YoungFunction::power(6.0).unwrap().is_a_young(2.0));
        assert!(!YoungFunction::power(1.5).unwrap().is_a_young(2.0));
        assert!(YoungFunction::log_bump(3.0, 1.0).unwrap().is_a_young(2.0));
    }

    #[test]
    fn catalog_members_are_young() {
        for phi in [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::log_bump(2.0, 1.0).unwrap(),
            YoungFunction::log_bump(1.2, 0.3).unwrap(),
            YoungFunction::oscillatory(3.0, 1.0).unwrap(),
            YoungFunction::oscillatory(2.5, 0.4).unwrap(),
        ] {
            phi.check_young().unwrap();
            phi.conjugate().unwrap().check_young().unwrap();
        }
        assert!(YoungFunction::power(1.0).unwrap().check_young().is_err());
    }

    #[test]
    fn normalization_divides_by_value_at_one() {
        let lb = YoungFunction::log_bump(2.0, 0.5).unwrap().normalized();
        assert!(close(lb.eval(1.0), 1.0, 1e-15));
        assert!(close(lb.inverse(1.0).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn kappa_of_cauchy_schwarz() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let p1 = YoungFunction::power(1.0).unwrap();
        assert!(close(inverse_product_constant(&p2, &p2, &p1).unwrap(), 1.0, 1e-12));
    }
}
