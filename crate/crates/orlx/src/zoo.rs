//! Seeded test functions and weights.

use orlx_core::dyadic::W_MIN;
use orlx_core::maximal::maximal;
use orlx_core::rubio::{estimate_opnorm, rubio_iterate, standard_probes, DEFAULT_SAFETY};
use orlx_core::weights::{gen_a1, gen_rhinf_ap_pair};
use orlx_core::{Domain, Grid, GridFunction, Region, YoungFunction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::Result;

/// Generator for trial `index` of a run seeded with `seed`: one ChaCha
/// stream per trial, so trials can run in any order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    /// Indicator of a standard dyadic cube.
    Indicator,
    /// One finest cell.
    Spike,
    /// `exp` of a multiscale Gaussian field.
    LogNormal,
    /// `χ_{I_-} - χ_{I_+}` on the two halves of a dyadic cube.
    Haar,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 4] = [
        FunctionKind::Indicator,
        FunctionKind::Spike,
        FunctionKind::LogNormal,
        FunctionKind::Haar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Indicator => "indicator",
            FunctionKind::Spike => "spike",
            FunctionKind::LogNormal => "lognormal",
            FunctionKind::Haar => "haar",
        }
    }
}

/// Standard dyadic cube at `level` containing the finest cell `flat`.
fn cube_of(d: Domain, level: u32, flat: usize) -> Region {
    let m = d.multi(flat);
    let shift = d.depth() - level;
    let lo = [(m[0] >> shift) << shift, (m[1] >> shift) << shift];
    let len = 1usize << shift;
    let u = 3u64;
    let hi = if d.dim() == 1 {
        [(lo[0] + len) as u64 * u, 0]
    } else {
        [(lo[0] + len) as u64 * u, (lo[1] + len) as u64 * u]
    };
    Region::from_units(&d, [lo[0] as u64 * u, lo[1] as u64 * u], hi).expect("cube inside the box")
}

pub fn sample_function<R: Rng>(kind: FunctionKind, d: Domain, rng: &mut R) -> GridFunction {
    let l = d.depth();
    match kind {
        FunctionKind::Indicator => {
            let level = rng.random_range(1..l);
            let at = rng.random_range(0..d.len());
            GridFunction::indicator(d, &cube_of(d, level, at))
        }
        FunctionKind::Spike => {
            let mut v = vec![0.0; d.len()];
            v[rng.random_range(0..d.len())] = 1.0;
            GridFunction::new(d, v).expect("finite")
        }
        FunctionKind::LogNormal => {
            // One Gaussian per standard cube of each level, damped by 2^{-k/2}.
            let mut logs = vec![0.0; d.len()];
            for k in 0..=l {
                let per_axis = 1usize << k;
                let count = if d.dim() == 1 { per_axis } else { per_axis * per_axis };
                let xi: Vec<f64> = (0..count).map(|_| StandardNormal.sample(rng)).collect();
                let amp = 0.6 * (-(k as f64) * 0.5 * std::f64::consts::LN_2).exp();
                let shift = l - k;
                for (i, v) in logs.iter_mut().enumerate() {
                    let m = d.multi(i);
                    let idx = if d.dim() == 1 {
                        m[0] >> shift
                    } else {
                        (m[0] >> shift) * per_axis + (m[1] >> shift)
                    };
                    *v += amp * xi[idx];
                }
            }
            GridFunction::new(d, logs.into_iter().map(f64::exp).collect()).expect("finite")
        }
        FunctionKind::Haar => {
            let level = rng.random_range(0..l);
            let at = rng.random_range(0..d.len());
            let cube = cube_of(d, level, at);
            let (lo, hi) = cube.bounds();
            let mid = 0.5 * (lo[0] + hi[0]);
            let mut v = vec![0.0; d.len()];
            cube.for_each_center(|i| v[i] = if d.center(i)[0] < mid { 1.0 } else { -1.0 });
            GridFunction::new(d, v).expect("finite")
        }
    }
}

/// A function of a uniformly chosen kind.
pub fn random_function<R: Rng>(d: Domain, rng: &mut R) -> (FunctionKind, GridFunction) {
    let kind = FunctionKind::ALL[rng.random_range(0..FunctionKind::ALL.len())];
    (kind, sample_function(kind, d, rng))
}

/// A single finest cell of height one on the `W_MIN` floor: outside
/// `A_∞` and every reverse Hölder class at any useful threshold.
pub fn spike_weight(d: Domain, flat: usize) -> GridFunction {
    let mut v = vec![W_MIN; d.len()];
    v[flat] = 1.0;
    GridFunction::new(d, v).expect("finite")
}

/// How to generate a weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRecipe {
    Constant {
        c: f64,
    },
    /// `(M δ)^r` for a random finest cell `δ`: in `A_1` for `0 < r < 1`.
    MaximalPower {
        r: f64,
    },
    /// `((M δ)^r)^{1-p'}`: in `RH_∞ ∩ A_p`.
    RhInfPair {
        r: f64,
        p: f64,
    },
    /// The Rubio de Francia image `𝓡h` of a random nonnegative `h` with
    /// `M_Ψ` on `L^q`, truncated at `depth`; `psi` defaults to the bump
    /// of the class being sampled.
    Rubio {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<YoungFunction>,
        q: f64,
        depth: usize,
    },
    /// A log-normal field with log-amplitude scaled by `sigma`.
    LogNormal {
        sigma: f64,
    },
}

impl WeightRecipe {
    pub fn label(&self) -> String {
        match self {
            WeightRecipe::Constant { c } => format!("constant({c})"),
            WeightRecipe::MaximalPower { r } => format!("maximal_power(r={r})"),
            WeightRecipe::RhInfPair { r, p } => format!("rhinf_pair(r={r},p={p})"),
            WeightRecipe::Rubio { q, depth, .. } => format!("rubio(q={q},K={depth})"),
            WeightRecipe::LogNormal { sigma } => format!("lognormal(sigma={sigma})"),
        }
    }

    /// Draws a weight; `class_bump` stands in for an unset Rubio bump.
    pub fn sample<R: Rng>(
        &self,
        d: Domain,
        grids: &[Grid],
        class_bump: Option<&YoungFunction>,
        rng: &mut R,
    ) -> Result<GridFunction> {
        Ok(match self {
            WeightRecipe::Constant { c } => GridFunction::constant(d, *c),
            WeightRecipe::MaximalPower { r } => gen_a1(&sample_function(FunctionKind::Spike, d, rng), *r, grids)?,
            WeightRecipe::RhInfPair { r, p } => gen_rhinf_ap_pair(&gen_a1(&sample_function(FunctionKind::Spike, d, rng), *r, grids)?, *p)?,
            WeightRecipe::Rubio { psi, q, depth } => {
                let psi = psi
                    .as_ref()
                    .or(class_bump)
                    .ok_or_else(|| crate::Error::Format("rubio recipe needs a bump".into()))?;
                let kind = [FunctionKind::Indicator, FunctionKind::Spike, FunctionKind::LogNormal][rng.random_range(0..3)];
                let h = sample_function(kind, d, rng).abs();
                let op = estimate_opnorm(psi, *q, &standard_probes(d), grids, DEFAULT_SAFETY)?;
                rubio_iterate(&h, psi, *q, *depth, op.value, grids)?.rh
            }
            WeightRecipe::LogNormal { sigma } => {
                let f = sample_function(FunctionKind::LogNormal, d, rng);
                f.map(|v| v.ln()).scale(*sigma / 0.6).map(f64::exp)
            }
        })
    }
}

/// `M δ` for tests that want a smooth profile around a cell.
pub fn maximal_spike(d: Domain, flat: usize, grids: &[Grid]) -> Result<GridFunction> {
    let mut v = vec![0.0; d.len()];
    v[flat] = 1.0;
    Ok(maximal(&GridFunction::new(d, v)?, grids)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let d = Domain::new(1, 6).unwrap();
        let a: Vec<_> = (0..4).map(|i| random_function(d, &mut trial_rng(7, i)).1).collect();
        let b: Vec<_> = (0..4).rev().map(|i| random_function(d, &mut trial_rng(7, i)).1).collect();
        for (x, y) in a.iter().zip(b.iter().rev()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn kinds_have_expected_shape() {
        let d = Domain::new(2, 4).unwrap();
        let mut rng = trial_rng(1, 0);
        let ind = sample_function(FunctionKind::Indicator, d, &mut rng);
        let mass = ind.integral();
        assert!(mass > 0.0 && mass < 1.0);
        let haar = sample_function(FunctionKind::Haar, d, &mut rng);
        assert!(haar.integral().abs() < 1e-12);
        let ln = sample_function(FunctionKind::LogNormal, d, &mut rng);
        assert!(ln.min() > 0.0);
    }

    #[test]
    fn recipes_give_positive_weights() {
        let d = Domain::new(1, 6).unwrap();
        let grids = Grid::family(d);
        let psi = YoungFunction::log_bump(1.5, 1.0).unwrap();
        let recipes = [
            WeightRecipe::Constant { c: 2.0 },
            WeightRecipe::MaximalPower { r: 0.5 },
            WeightRecipe::RhInfPair { r: 0.5, p: 2.0 },
            WeightRecipe::Rubio { psi: None, q: 4.0, depth: 8 },
            WeightRecipe::LogNormal { sigma: 1.0 },
        ];
        for r in &recipes {
            let w = r.sample(d, &grids, Some(&psi), &mut trial_rng(3, 0)).unwrap();
            assert!(w.min() > 0.0, "{}", r.label());
        }
        assert!(WeightRecipe::Rubio { psi: None, q: 4.0, depth: 8 }
            .sample(d, &grids, None, &mut trial_rng(3, 0))
            .is_err());
    }
}
