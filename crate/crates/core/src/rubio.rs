//! Extrapolation exponents, operator-norm estimates and the Rubio de
//! Francia iteration `𝓡h = Σ_k M_Φ^k h / (2‖M_Φ‖)^k`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::{Grid, GridFunction, Region};
use crate::math::powf;
use crate::maximal::{maximal, orlicz_maximal};
use crate::orlicz::Gauge;
use crate::weights::{rh_inf_characteristic, rh_psi_characteristic, WeightReport};
use crate::young::{inverse_product_constant, BpVerdict, YoungFunction};
use crate::{Domain, Error, Result};

/// Default truncation depth of the iteration.
pub const DEFAULT_DEPTH: usize = 40;
/// Default factor applied to empirical operator norms.
pub const DEFAULT_SAFETY: f64 = 2.0;
/// Terms whose whole remaining tail falls below this fraction of `min 𝓡h`
/// are not evaluated.
const NEGLIGIBLE: f64 = 1.0 / (1u64 << 60) as f64;

/// Where `p` sits in `[p0, q0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    /// `p = p0`: nothing to extrapolate.
    Base,
    /// `p0 < p < q0`.
    Interior,
    /// `p = q0`: requires `RH_∞` weights.
    Endpoint,
}

/// `(p0, q0, p)` with `r = (q0/p0)'/(q0/p)'` and `1/s = 1/r - p0/p`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentTriple {
    pub p0: f64,
    pub q0: f64,
    pub p: f64,
    pub r: f64,
    pub inv_s: f64,
    pub regime: Regime,
}

impl ExponentTriple {
    /// Requires `0 < p0 < q0 < ∞` and `p0 <= p <= q0`.
    ///
    /// `r` and `1/s` use the cancellation-free forms
    /// `r = (q0 - p)/(q0 - p0)` and `1/s = q0 (p - p0) / (p (q0 - p))`.
    pub fn new(p0: f64, q0: f64, p: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0 < q0 && q0.is_finite()) {
            return Err(Error::InvalidParameter("need 0 < p0 < q0 < ∞"));
        }
        if !(p >= p0 && p <= q0) {
            return Err(Error::OutOfRange(p));
        }
        let regime = if p == p0 {
            Regime::Base
        } else if p == q0 {
            Regime::Endpoint
        } else {
            Regime::Interior
        };
        let r = (q0 - p) / (q0 - p0);
        let inv_s = q0 * (p - p0) / (p * (q0 - p));
        Ok(ExponentTriple {
            p0,
            q0,
            p,
            r,
            inv_s,
            regime,
        })
    }

    pub fn s(&self) -> f64 {
        1.0 / self.inv_s
    }

    /// `(p/p0)'`, the exponent of the dual space the majorant lives in.
    pub fn dual_p_p0(&self) -> f64 {
        self.p / (self.p - self.p0)
    }

    /// `(q0/p)'`.
    pub fn dual_q0_p(&self) -> f64 {
        self.q0 / (self.q0 - self.p)
    }

    /// `(q0/p0)'`.
    pub fn dual_q0_p0(&self) -> f64 {
        self.q0 / (self.q0 - self.p0)
    }

    /// Relative residual of `(1/s)(p/p0)' = (q0/p)'`; defined in the
    /// interior regime only.
    pub fn identity_residual(&self) -> Option<f64> {
        if self.regime != Regime::Interior {
            return None;
        }
        let lhs = self.inv_s * self.dual_p_p0();
        let rhs = self.dual_q0_p();
        Some((lhs - rhs).abs() / rhs)
    }

    /// `Ψ(t) = Ψ₀(t^{1/r})`, so that `Ψ₀(t) = Ψ(t^r)`.
    pub fn psi(&self, psi0: &YoungFunction) -> Result<YoungFunction> {
        match self.regime {
            Regime::Endpoint => Err(Error::Unsupported("no rescaled bump at the endpoint")),
            _ => psi0.rescale_outer(self.r),
        }
    }

    /// `B(t) = Ψ(t^s) = Ψ₀(t^{s/r})`; `Ψ₀` itself at the endpoint.
    pub fn b_function(&self, psi0: &YoungFunction) -> Result<YoungFunction> {
        match self.regime {
            Regime::Base => Err(Error::Unsupported("p = p0 needs no majorant")),
            Regime::Interior => psi0.rescale_outer(self.q0 * (self.p - self.p0) / (self.p * (self.q0 - self.p0))),
            Regime::Endpoint => Ok(psi0.clone()),
        }
    }

    /// `C(t) = Ψ(t^{p/p0}) = Ψ₀(t^{p/(p0 r)})`; the plain average at the
    /// endpoint.
    pub fn c_function(&self, psi0: &YoungFunction) -> Result<YoungFunction> {
        match self.regime {
            Regime::Base => Err(Error::Unsupported("p = p0 needs no majorant")),
            Regime::Interior => psi0.rescale_outer(self.p0 * self.r / self.p),
            Regime::Endpoint => YoungFunction::power(1.0),
        }
    }
}

/// Deterministic probes for [`estimate_opnorm`]: a constant, dyadic
/// indicators, spikes at a corner and at the center, and a Haar-like
/// oscillation.
pub fn standard_probes(d: Domain) -> Vec<GridFunction> {
    let spike = |flat: usize| {
        let mut v = vec![0.0; d.len()];
        v[flat] = 1.0;
        GridFunction::new(d, v).expect("finite spike")
    };
    let mid = d.side() / 2;
    vec![
        GridFunction::constant(d, 1.0),
        GridFunction::from_fn(d, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }),
        GridFunction::from_fn(d, |x| if x[0] < 0.125 && x[1] < 0.125 { 1.0 } else { 0.0 }),
        spike(0),
        spike(d.flat([mid, if d.dim() == 2 { mid } else { 0 }])),
        GridFunction::from_fn(d, |x| if ((x[0] * 8.0) as u32).is_multiple_of(2) { 1.0 } else { 0.25 }),
    ]
}

/// Result of [`estimate_opnorm`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpNormEstimate {
    /// `safety · max_probe ‖M_Φ f‖_q / ‖f‖_q`.
    pub value: f64,
    pub ratios: Vec<f64>,
    /// Probe attaining the maximum ratio.
    pub argmax: usize,
    pub safety: f64,
}

/// Empirical norm of `M_Φ` on `L^q`, rejecting `Φ ∉ B_q`.
pub fn estimate_opnorm(
    phi: &YoungFunction,
    q: f64,
    probes: &[GridFunction],
    grids: &[Grid],
    safety: f64,
) -> Result<OpNormEstimate> {
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(Error::InvalidParameter("safety factor must be at least 1"));
    }
    if phi.bp_test(q)?.verdict != BpVerdict::InBp {
        return Err(Error::NotInBp(q));
    }
    let mut ratios = Vec::with_capacity(probes.len());
    for f in probes {
        let base = f.lp_norm(q);
        ratios.push(if base > 0.0 {
            orlicz_maximal(f, phi, grids)?.lp_norm(q) / base
        } else {
            0.0
        });
    }
    let (mut argmax, mut best) = (0, f64::NEG_INFINITY);
    for (i, &r) in ratios.iter().enumerate() {
        if r > best {
            best = r;
            argmax = i;
        }
    }
    if !(best > 0.0) {
        return Err(Error::InvalidParameter("no nonzero probe"));
    }
    Ok(OpNormEstimate {
        value: safety * best,
        ratios,
        argmax,
        safety,
    })
}

/// The scaled terms `M_Φ^k h / (2 opnorm)^k`, starting from `|h|`.
pub struct RubioSeries<'a> {
    phi: &'a YoungFunction,
    grids: &'a [Grid],
    ratio: f64,
    current: Option<GridFunction>,
    k: usize,
}

impl<'a> RubioSeries<'a> {
    pub fn new(h: &GridFunction, phi: &'a YoungFunction, opnorm: f64, grids: &'a [Grid]) -> Result<Self> {
        if !(opnorm > 0.0 && opnorm.is_finite()) {
            return Err(Error::InvalidParameter("operator norm must be positive"));
        }
        Ok(RubioSeries {
            phi,
            grids,
            ratio: 1.0 / (2.0 * opnorm),
            current: Some(h.abs()),
            k: 0,
        })
    }
}

impl Iterator for RubioSeries<'_> {
    type Item = Result<(usize, GridFunction)>;

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.k;
        if k > 0 {
            let prev = self.current.take()?;
            match orlicz_maximal(&prev, self.phi, self.grids) {
                Ok(next) => self.current = Some(next.scale(self.ratio)),
                Err(e) => return Some(Err(e)),
            }
        }
        self.k += 1;
        self.current.clone().map(|t| Ok((k, t)))
    }
}

/// Measured properties of an iteration.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RubioProperties {
    /// (a) `|h| <= 𝓡h` everywhere; the first violating point otherwise.
    pub dominates: bool,
    pub dominance_witness: Option<usize>,
    /// (b) `‖𝓡h‖_q / ‖h‖_q`, to be compared with `2(1 + 2^{-K})`.
    pub norm_ratio: f64,
    pub norm_ceiling: f64,
    /// (c) `max M_Φ(𝓡h)/𝓡h` and where it is attained, against `2 opnorm`.
    pub c_measured: f64,
    pub c_witness: usize,
    pub c_bound: f64,
    /// (d) the `RH_Φ` characteristic of `𝓡h`.
    pub rh: WeightReport,
}

impl RubioProperties {
    /// (a)–(c) hold up to `slack` in (b) and (c), and (d) is below `ceiling`.
    pub fn pass(&self, slack: f64, ceiling: f64) -> bool {
        self.dominates
            && self.norm_ratio <= self.norm_ceiling * (1.0 + slack)
            && self.c_measured <= self.c_bound * (1.0 + slack)
            && self.rh.is_member(ceiling)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationResult {
    pub rh: GridFunction,
    pub depth: usize,
    /// Terms actually summed; later ones lie below rounding.
    pub terms: usize,
    pub opnorm: f64,
    pub q: f64,
    pub h_norm: f64,
    /// `2^{-K} ‖h‖_q`.
    pub tail_bound: f64,
    pub properties: RubioProperties,
}

/// Sums the series through `k = depth` and measures properties (a)–(d).
pub fn rubio_iterate(
    h: &GridFunction,
    phi: &YoungFunction,
    q: f64,
    depth: usize,
    opnorm: f64,
    grids: &[Grid],
) -> Result<IterationResult> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter("q must be at least 1"));
    }
    let sup_factor = 1.0 / (phi.inverse(1.0)? * 2.0 * opnorm);
    let mut rh: Option<Vec<f64>> = None;
    let mut terms = 0;
    for item in RubioSeries::new(h, phi, opnorm, grids)? {
        let (k, term) = item?;
        terms += 1;
        let sum = match rh.as_mut() {
            None => rh.insert(term.values().to_vec()),
            Some(acc) => {
                for (a, t) in acc.iter_mut().zip(term.values()) {
                    *a += t;
                }
                acc
            }
        };
        if k == depth {
            break;
        }
        // Every later term is at most sup(term) · sup_factor^j pointwise.
        if sup_factor < 1.0 {
            let tail = term.max() * sup_factor / (1.0 - sup_factor);
            let floor = sum.iter().copied().fold(f64::INFINITY, f64::min);
            if tail <= NEGLIGIBLE * floor {
                break;
            }
        }
    }
    let rh = GridFunction::new(h.domain(), rh.expect("series has a first term"))?;
    let properties = measure_properties(h, &rh, phi, q, depth, opnorm, grids)?;
    let h_norm = h.lp_norm(q);
    Ok(IterationResult {
        rh,
        depth,
        terms,
        opnorm,
        q,
        h_norm,
        tail_bound: powf(2.0, -(depth as f64)) * h_norm,
        properties,
    })
}

fn measure_properties(
    h: &GridFunction,
    rh: &GridFunction,
    phi: &YoungFunction,
    q: f64,
    depth: usize,
    opnorm: f64,
    grids: &[Grid],
) -> Result<RubioProperties> {
    let dominance_witness = h.values().iter().zip(rh.values()).position(|(a, b)| a.abs() > *b);
    let h_norm = h.lp_norm(q);
    let norm_ratio = if h_norm > 0.0 { rh.lp_norm(q) / h_norm } else { 0.0 };
    let m = orlicz_maximal(rh, phi, grids)?;
    let (mut c_measured, mut c_witness) = (0.0, 0);
    for (i, (a, b)) in m.values().iter().zip(rh.values()).enumerate() {
        let ratio = if *b > 0.0 { a / b } else if *a > 0.0 { f64::INFINITY } else { 0.0 };
        if ratio > c_measured {
            c_measured = ratio;
            c_witness = i;
        }
    }
    Ok(RubioProperties {
        dominates: dominance_witness.is_none(),
        dominance_witness,
        norm_ratio,
        norm_ceiling: 2.0 * (1.0 + powf(2.0, -(depth as f64))),
        c_measured,
        c_witness,
        c_bound: 2.0 * opnorm,
        rh: rh_psi_characteristic(rh, phi, grids)?,
    })
}

/// The majorant `H = 𝓡h` built with `M_B` for the weighted case, and the
/// measurements of its three properties.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HConstruction {
    pub triple: ExponentTriple,
    pub b: YoungFunction,
    pub c: YoungFunction,
    /// `(p/p0)'`.
    pub q: f64,
    pub iteration: IterationResult,
    /// `sup_t B^{-1}(t) C^{-1}(t) / Ψ₀^{-1}(t)`.
    pub kappa: f64,
    /// `max_Q ‖H w^{p0/p}‖_{Ψ₀,Q} / (2κ ‖H‖_{B,Q} ‖w^{p0/p}‖_{C,Q})`.
    pub holder_ratio: f64,
    /// `[w^{p0/p}]_{RH_C}`.
    pub weight_rh: WeightReport,
    /// (c): `[H w^{p0/p}]_{RH_{Ψ₀}}`.
    pub product_rh: WeightReport,
}

/// Builds `H` from `h`, a weight `w` and the hypothesis bump `Ψ₀`.
pub fn build_h(
    h: &GridFunction,
    w: &GridFunction,
    triple: &ExponentTriple,
    psi0: &YoungFunction,
    depth: usize,
    safety: f64,
    grids: &[Grid],
) -> Result<HConstruction> {
    let b = triple.b_function(psi0)?;
    let c = triple.c_function(psi0)?;
    b.check_young()?;
    let q = triple.dual_p_p0();
    let d = h.domain();
    let opnorm = estimate_opnorm(&b, q, &standard_probes(d), grids, safety)?.value;
    let iteration = rubio_iterate(h, &b, q, depth, opnorm, grids)?;
    let wp = w.as_weight().pow(triple.p0 / triple.p);
    let product = iteration.rh.mul(&wp)?;
    let kappa = inverse_product_constant(&b, &c, psi0)?;
    let (gp, gb, gc) = (Gauge::new(psi0)?, Gauge::new(&b)?, Gauge::new(&c)?);
    let mut buf = Vec::new();
    let mut holder_ratio: f64 = 0.0;
    let mut visit = |r: &Region| -> Result<()> {
        let lhs = gp.norm_with(product.values(), r, &mut buf)?;
        let rhs = 2.0 * kappa * gb.norm_with(iteration.rh.values(), r, &mut buf)? * gc.norm_with(wp.values(), r, &mut buf)?;
        if rhs > 0.0 {
            holder_ratio = holder_ratio.max(lhs / rhs);
        }
        Ok(())
    };
    for g in grids {
        for cell in g.all_cells() {
            visit(&cell.region)?;
        }
    }
    Ok(HConstruction {
        triple: *triple,
        weight_rh: rh_psi_characteristic(&wp, &c, grids)?,
        product_rh: rh_psi_characteristic(&product, psi0, grids)?,
        b,
        c,
        q,
        iteration,
        kappa,
        holder_ratio,
    })
}

/// The majorant for `0 < p < p0`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SmallPConstruction {
    pub h: GridFunction,
    /// `p·rr / (p0/p)'`.
    pub exponent: f64,
    /// `a` in `H^{-p0/p} = M(g^{1/rr})^{-a}`.
    pub weight_exponent: f64,
    /// `[H^{-p0/p}]_{RH_∞}`.
    pub rh_inf: WeightReport,
}

/// `H = M(g^{1/rr})^{p·rr/(p0/p)'}` with `rr > 1/p`.
pub fn build_h_small_p(g: &GridFunction, p: f64, p0: f64, rr: f64, grids: &[Grid]) -> Result<SmallPConstruction> {
    if !(p > 0.0 && p < p0 && p0.is_finite()) {
        return Err(Error::InvalidParameter("need 0 < p < p0"));
    }
    if !(rr > 1.0 / p && rr.is_finite()) {
        return Err(Error::InvalidParameter("need rr > 1/p"));
    }
    let mg = maximal(&g.abs().pow(1.0 / rr), grids)?;
    if !(mg.min() > 0.0) {
        return Err(Error::InvalidParameter("g must not vanish identically"));
    }
    let exponent = p * rr * (p0 - p) / p0;
    let h = mg.pow(exponent);
    let weight_exponent = exponent * p0 / p;
    let rh_inf = rh_inf_characteristic(&mg.pow(-weight_exponent), grids)?;
    Ok(SmallPConstruction {
        h,
        exponent,
        weight_exponent,
        rh_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::DEFAULT_MEMBERSHIP_THRESHOLD;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn worked_triple() {
        let t = ExponentTriple::new(1.0, 2.0, 1.5).unwrap();
        assert_eq!(t.regime, Regime::Interior);
        assert_eq!(t.r, 0.5);
        assert_eq!(t.s(), 0.75);
        assert_eq!(t.inv_s * t.dual_p_p0(), 4.0);
        assert_eq!(t.dual_q0_p(), 4.0);
        // Definitional form of r.
        assert!(rel(t.r, crate::math::dual(2.0) / crate::math::dual(4.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn degenerate_regimes() {
        let base = ExponentTriple::new(1.0, 3.0, 1.0).unwrap();
        assert_eq!((base.regime, base.r, base.inv_s), (Regime::Base, 1.0, 0.0));
        assert!(base.identity_residual().is_none());
        let psi0 = YoungFunction::log_bump(2.0, 1.0).unwrap();
        assert_eq!(base.psi(&psi0).unwrap(), psi0);
        let end = ExponentTriple::new(1.0, 3.0, 3.0).unwrap();
        assert_eq!((end.regime, end.r), (Regime::Endpoint, 0.0));
        assert_eq!(end.b_function(&psi0).unwrap(), psi0);
        assert_eq!(end.c_function(&psi0).unwrap(), YoungFunction::power(1.0).unwrap());
        let near = ExponentTriple::new(1.0, 3.0, 3.0 - 1e-9).unwrap();
        assert!(near.r > 0.0 && near.r < 1e-9);
        assert!(ExponentTriple::new(1.0, 3.0, 0.5).is_err());
        assert!(ExponentTriple::new(2.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn b_and_c_wiring() {
        let t = ExponentTriple::new(1.0, 2.0, 1.5).unwrap();
        let psi0 = YoungFunction::power(1.5).unwrap();
        // Ψ = t^3, B(t) = Ψ(t^{3/4}) = t^{9/4}, C(t) = Ψ(t^{3/2}) = t^{9/2}.
        assert_eq!(t.psi(&psi0).unwrap().power_exponent(), Some(3.0));
        assert!(rel(t.b_function(&psi0).unwrap().power_exponent().unwrap(), 2.25) < 1e-15);
        assert!(rel(t.c_function(&psi0).unwrap().power_exponent().unwrap(), 4.5) < 1e-15);
        let lb = YoungFunction::log_bump(1.5, 1.0).unwrap();
        let b = t.b_function(&lb).unwrap();
        let psi = t.psi(&lb).unwrap();
        for x in [0.3, 1.0, 2.0, 7.0] {
            assert!(rel(b.eval(x), psi.eval(powf(x, 0.75))) < 1e-12);
        }
        assert!(b.check_young().is_ok());
        assert_eq!(b.bp_test(t.dual_p_p0()).unwrap().verdict, BpVerdict::InBp);
    }

    #[test]
    fn opnorm_estimates() {
        let d = Domain::new(1, 6).unwrap();
        let grids = Grid::family(d);
        let probes = standard_probes(d);
        let lin = YoungFunction::power(1.0).unwrap();
        let one = estimate_opnorm(&lin, 2.0, &probes, &grids, 1.0).unwrap();
        assert!(one.value >= 1.0);
        let two = estimate_opnorm(&lin, 2.0, &probes, &grids, 2.0).unwrap();
        assert_eq!(two.value, 2.0 * one.value);
        assert!(matches!(
            estimate_opnorm(&YoungFunction::power(2.0).unwrap(), 2.0, &probes, &grids, 2.0),
            Err(Error::NotInBp(_))
        ));
    }

    #[test]
    fn depth_zero_is_identity() {
        let d = Domain::new(1, 5).unwrap();
        let grids = Grid::family(d);
        let h = GridFunction::from_fn(d, |x| x[0] - 0.4);
        let r = rubio_iterate(&h, &YoungFunction::power(1.0).unwrap(), 2.0, 0, 3.0, &grids).unwrap();
        assert_eq!(r.rh, h.abs());
        assert_eq!(r.terms, 1);
        assert!(r.properties.dominates);
    }

    #[test]
    fn constant_closed_form() {
        // M_Φ(1) = 1/Φ^{-1}(1) everywhere, so 𝓡1 = Σ_k (c/(2 op))^k.
        let d = Domain::new(1, 5).unwrap();
        let grids = Grid::family(d);
        let phi = YoungFunction::log_bump(1.5, 1.0).unwrap();
        let c = 1.0 / phi.inverse(1.0).unwrap();
        let op = 3.0;
        let one = GridFunction::constant(d, 1.0);
        for depth in [1usize, 5, 40] {
            let r = rubio_iterate(&one, &phi, 2.0, depth, op, &grids).unwrap();
            let ratio = c / (2.0 * op);
            let direct: f64 = (0..=depth).map(|k| powf(ratio, k as f64)).sum();
            for &v in r.rh.values() {
                assert!(rel(v, direct) < 1e-9, "{v} vs {direct}");
            }
        }
    }

    #[test]
    fn spike_properties() {
        let d = Domain::new(1, 6).unwrap();
        let grids = Grid::family(d);
        let phi = YoungFunction::log_bump(1.5, 1.0).unwrap();
        let op = estimate_opnorm(&phi, 2.0, &standard_probes(d), &grids, DEFAULT_SAFETY).unwrap();
        let mut v = vec![0.0; d.len()];
        v[21] = 5.0;
        let h = GridFunction::new(d, v).unwrap();
        let r = rubio_iterate(&h, &phi, 2.0, DEFAULT_DEPTH, op.value, &grids).unwrap();
        assert!(r.properties.pass(1e-9, DEFAULT_MEMBERSHIP_THRESHOLD), "{:?}", r.properties);
        assert!(r.terms <= DEFAULT_DEPTH + 1);
        let short = rubio_iterate(&h, &phi, 2.0, 20, op.value, &grids).unwrap();
        let diff = r.rh.zip_map(&short.rh, |a, b| a - b).unwrap().lp_norm(2.0);
        assert!(diff <= powf(2.0, -19.0) * h.lp_norm(2.0));
    }

    #[test]
    fn weighted_majorant() {
        let d = Domain::new(1, 6).unwrap();
        let grids = Grid::family(d);
        let t = ExponentTriple::new(1.0, 2.0, 1.5).unwrap();
        let psi0 = YoungFunction::log_bump(1.5, 1.0).unwrap();
        let h = GridFunction::from_fn(d, |x| 1.0 + (5.0 * x[0]).sin());
        let one = GridFunction::constant(d, 1.0);
        let built = build_h(&h, &one, &t, &psi0, 20, DEFAULT_SAFETY, &grids).unwrap();
        assert_eq!(built.q, 3.0);
        assert!(built.iteration.properties.dominates);
        assert!(built.holder_ratio <= 1.0);
        assert!(built.product_rh.is_member(DEFAULT_MEMBERSHIP_THRESHOLD));
        let w = GridFunction::from_fn(d, |x| 0.5 + x[0]);
        let weighted = build_h(&h, &w, &t, &psi0, 20, DEFAULT_SAFETY, &grids).unwrap();
        assert!(weighted.holder_ratio <= 1.0);
        assert!(weighted.weight_rh.is_member(DEFAULT_MEMBERSHIP_THRESHOLD));
    }

    #[test]
    fn small_p_majorant() {
        let d = Domain::new(1, 6).unwrap();
        let grids = Grid::family(d);
        let one = GridFunction::constant(d, 1.0);
        let s = build_h_small_p(&one, 0.5, 1.0, 3.0, &grids).unwrap();
        assert!(s.h.values().iter().all(|&v| rel(v, 1.0) < 1e-15));
        // (p0/p)' = 2, so the exponent is p·rr/2.
        assert_eq!(s.exponent, 0.75);
        assert!(s.weight_exponent > 0.0);
        let g = GridFunction::from_fn(d, |x| if x[0] < 0.1 { 4.0 } else { 0.0 });
        let s = build_h_small_p(&g, 0.5, 1.0, 3.0, &grids).unwrap();
        assert!(s.rh_inf.is_member(DEFAULT_MEMBERSHIP_THRESHOLD));
        assert!(build_h_small_p(&g, 0.5, 1.0, 1.5, &grids).is_err());
    }
}
