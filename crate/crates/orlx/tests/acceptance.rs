//! Acceptance criteria, one line each: `cargo test -p orlx --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use orlx::config::{BilinearRegime, ExperimentConfig, Suite};
use orlx::report::InequalityReport;
use orlx::suites;
use orlx::zoo::{random_function, trial_rng};
use orlx_core::orlicz::{gen_holder_with_kappa, holder_pair, orlicz_norm};
use orlx_core::young::inverse_product_constant;
use orlx_core::rubio::{estimate_opnorm, rubio_iterate, standard_probes, ExponentTriple, DEFAULT_SAFETY};
use orlx_core::sparse::{
    average_families, default_stopping_parameter, product_families, sparse_check, stopping_sparse, SparseFamily,
};
use orlx_core::{Domain, Grid, GridFunction, Region, Shift, YoungFunction};
use rand::Rng;

/// Relative tolerance of the power-gauge Orlicz norm against `L^p` averages.
const ORLICZ_TOL: f64 = 1e-9;
/// Upper constant in `t <= Φ^{-1}(t) Φ̄^{-1}(t) <= C t`.
const DUALITY_UPPER: f64 = 2.0 + 1e-9;
/// Slack of Young's inequality.
const YOUNG_SLACK: f64 = 1e-6;
/// Relative slack of the Hölder checks (rounding only).
const HOLDER_SLACK: f64 = 1e-9;
/// Tolerance of the exponent identities.
const EXPONENT_TOL: f64 = 1e-12;
/// Relative slack on the Rubio properties (rounding only).
const RUBIO_SLACK: f64 = 1e-9;
/// Truncation depths compared by the Rubio criterion.
const RUBIO_DEPTHS: (usize, usize) = (40, 20);
/// Wall-clock budget per suite.
const SUITE_BUDGET_SECS: f64 = 60.0;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn random_region<R: Rng>(d: Domain, rng: &mut R) -> Region {
    let shift = Shift([rng.random_range(0..3), if d.dim() == 2 { rng.random_range(0..3) } else { 0 }]);
    let cells = Grid::new(d, shift).cells(rng.random_range(0..=d.depth()));
    cells[rng.random_range(0..cells.len())].region
}

fn random_field<R: Rng>(d: Domain, rng: &mut R) -> GridFunction {
    let v = (0..d.len()).map(|_| rng.random_range(0.0..10.0f64).powi(2)).collect();
    GridFunction::new(d, v).unwrap()
}

fn orlicz_specialization() -> Outcome {
    let d = Domain::new(1, 8).unwrap();
    let mut worst: f64 = 0.0;
    for (k, p) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        let phi = YoungFunction::power(p).unwrap();
        let mut rng = trial_rng(1, k as u64);
        for _ in 0..1000 {
            let f = random_field(d, &mut rng);
            let q = random_region(d, &mut rng);
            let direct = f.pow(p).average(&q).unwrap().powf(1.0 / p);
            worst = worst.max(rel(orlicz_norm(&f, &q, &phi).unwrap(), direct));
        }
    }
    outcome(worst <= ORLICZ_TOL, format!("max relative error {worst:.2e} over 3x1000 pairs"))
}

fn conjugate_duality() -> Outcome {
    let mut ok = true;
    for (p, q) in [(1.5, 3.0), (2.0, 2.0), (3.0, 1.5)] {
        ok &= YoungFunction::power(p).unwrap().conjugate().unwrap().power_exponent() == Some(q);
    }
    let bumps = [
        YoungFunction::log_bump(1.5, 1.0).unwrap(),
        YoungFunction::log_bump(3.0, 0.5).unwrap(),
        YoungFunction::oscillatory(2.5, 0.5).unwrap(),
        YoungFunction::oscillatory(3.0, 0.8).unwrap(),
    ];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut young_worst: f64 = 0.0;
    for phi in &bumps {
        let bar = phi.conjugate().unwrap();
        for i in 0..1000 {
            let t = 10f64.powf(-4.0 + 8.0 * i as f64 / 999.0);
            let r = phi.inverse(t).unwrap() * bar.inverse(t).unwrap() / t;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        for i in 0..100 {
            for j in 0..100 {
                let s = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
                let t = 10f64.powf(-3.0 + 6.0 * j as f64 / 99.0);
                young_worst = young_worst.max(s * t / (phi.eval(s) + bar.eval(t)) - 1.0);
            }
        }
    }
    ok &= lo >= 1.0 - 1e-9 && hi <= DUALITY_UPPER && young_worst <= YOUNG_SLACK;
    outcome(
        ok,
        format!("product/t in [{lo:.6}, {hi:.6}], Young excess {young_worst:.2e}, power conjugates exact"),
    )
}

fn holder_suites() -> Outcome {
    let d = Domain::new(1, 7).unwrap();
    let pairs = [
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::log_bump(1.5, 1.0).unwrap(),
        YoungFunction::oscillatory(2.5, 0.5).unwrap(),
    ];
    let triples = [
        (YoungFunction::power(3.0).unwrap(), YoungFunction::power(6.0).unwrap(), YoungFunction::power(2.0).unwrap()),
        (
            YoungFunction::log_bump(3.0, 1.0).unwrap(),
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::log_bump(1.5, 0.5).unwrap(),
        ),
    ];
    let kappas: Vec<f64> = triples.iter().map(|(a, b, c)| inverse_product_constant(a, b, c).unwrap()).collect();
    let mut violations = 0;
    let mut rng = trial_rng(3, 0);
    for i in 0..1000 {
        let f = random_field(d, &mut rng);
        let g = random_field(d, &mut rng);
        let q = random_region(d, &mut rng);
        let (lhs, rhs) = holder_pair(&f, &g, &q, &pairs[i % 3]).unwrap();
        violations += (lhs > rhs * (1.0 + HOLDER_SLACK)) as usize;
        let (phi, psi, theta) = &triples[i % 2];
        let h = gen_holder_with_kappa(&f, &g, &q, phi, psi, theta, kappas[i % 2]).unwrap();
        violations += (h.lhs > h.rhs * (1.0 + HOLDER_SLACK)) as usize;
    }
    outcome(violations == 0, format!("{violations} violations in 2x1000 trials"))
}

fn exponent_calculus() -> Outcome {
    let mut rng = trial_rng(5, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p0 = rng.random_range(0.05..8.0);
        let q0 = p0 * (1.0 + rng.random_range(0.01..20.0));
        let p = p0 + rng.random_range(0.001..0.999) * (q0 - p0);
        let t = ExponentTriple::new(p0, q0, p).unwrap();
        worst = worst.max(t.identity_residual().unwrap());
    }
    let t = ExponentTriple::new(1.0, 2.0, 1.5).unwrap();
    let worked = t.r == 0.5 && t.s() == 0.75 && t.inv_s * t.dual_p_p0() == 4.0;
    outcome(
        worst <= EXPONENT_TOL && worked,
        format!("max identity residual {worst:.2e} over 10^4 triples; worked instance r=0.5, s=0.75, product 4: {worked}"),
    )
}

fn rubio_iteration() -> Outcome {
    let d = Domain::default_for(1).unwrap();
    let grids = Grid::family(d);
    let cases = [
        (YoungFunction::power(2.0).unwrap(), 3.0),
        (YoungFunction::power(3.0).unwrap(), 4.0),
        (YoungFunction::log_bump(1.5, 1.0).unwrap(), 2.0),
        (YoungFunction::log_bump(2.0, 0.5).unwrap(), 3.0),
        (YoungFunction::oscillatory(2.5, 0.5).unwrap(), 4.0),
    ];
    let ops: Vec<f64> = cases
        .iter()
        .map(|(phi, q)| estimate_opnorm(phi, *q, &standard_probes(d), &grids, DEFAULT_SAFETY).unwrap().value)
        .collect();
    let (deep, shallow) = RUBIO_DEPTHS;
    let b_ceiling = 2.0 * (1.0 + 2f64.powi(-39));
    let mut failures = Vec::new();
    let (mut worst_b, mut worst_tail): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let (phi, q) = &cases[i % cases.len()];
        let h = random_function(d, &mut trial_rng(6, i as u64)).1.abs();
        let a = rubio_iterate(&h, phi, *q, deep, ops[i % cases.len()], &grids).unwrap();
        let b = rubio_iterate(&h, phi, *q, shallow, ops[i % cases.len()], &grids).unwrap();
        let pr = &a.properties;
        // M_Φ(𝓡h) <= 2·op·𝓡h gives ‖𝓡h‖_{Φ,Q} <= 2·op·⨍_Q 𝓡h.
        let ok = pr.dominates
            && pr.norm_ratio <= b_ceiling * (1.0 + RUBIO_SLACK)
            && pr.c_measured <= pr.c_bound * (1.0 + RUBIO_SLACK)
            && pr.rh.value <= pr.c_bound * (1.0 + RUBIO_SLACK);
        let diff = a.rh.zip_map(&b.rh, |x, y| x - y).unwrap().lp_norm(*q);
        worst_b = worst_b.max(pr.norm_ratio);
        worst_tail = worst_tail.max(if b.tail_bound > 0.0 { diff / b.tail_bound } else { 0.0 });
        if !ok || diff > b.tail_bound * (1.0 + RUBIO_SLACK) {
            failures.push(i);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "100 cases at L=10, failing {failures:?}; max norm ratio {worst_b:.6}, max |R40-R20|/tail bound {worst_tail:.3e}"
        ),
    )
}

fn exceptional_ok(fam: &SparseFamily, finest: &[orlx_core::Cell]) -> bool {
    fam.members.iter().zip(&fam.exceptional).all(|(q, e)| {
        let m: f64 = e.iter().map(|&i| finest[i as usize].measure()).sum();
        q.measure() <= 2.0 * m * (1.0 + 1e-12)
    })
}

fn recheck(fam: &SparseFamily) -> bool {
    sparse_check(&fam.grid, &fam.members).map(|x| x == *fam).unwrap_or(false)
}

fn sparse_machinery() -> Outcome {
    let d = Domain::default_for(1).unwrap();
    let grids = Grid::family(d);
    let finest: Vec<Vec<orlx_core::Cell>> = grids.iter().map(|g| g.cells(d.depth())).collect();
    let mut bad = Vec::new();
    let mut families = 0;
    for i in 0..100 {
        let mut rng = trial_rng(7, i as u64);
        let f = random_function(d, &mut rng).1;
        let g = random_function(d, &mut rng).1;
        let a = default_stopping_parameter(&f, &g, &grids).unwrap();
        let s = stopping_sparse(&f, &g, a).unwrap();
        let mut ok = s.covering && s.family.packing <= 0.5 && recheck(&s.family) && exceptional_ok(&s.family, &finest[0]);
        for fams in [average_families(&f, &grids).unwrap(), product_families(&f, &g, &grids).unwrap()] {
            for (k, fam) in fams.iter().enumerate() {
                ok &= recheck(fam) && exceptional_ok(fam, &finest[k]);
                families += 1;
            }
        }
        families += 1;
        if !ok {
            bad.push(i);
        }
    }
    outcome(bad.is_empty(), format!("{families} families over 100 pairs, failing pairs {bad:?}"))
}

fn timed(config: &ExperimentConfig) -> (InequalityReport, f64) {
    let start = Instant::now();
    let r = suites::run(config).unwrap();
    (r, start.elapsed().as_secs_f64())
}

fn suite_line(r: &InequalityReport, secs: f64) -> String {
    format!(
        "{} max {:.4} <= {} over {} trials, controls failed: {} ({secs:.1}s)",
        r.config.suite,
        r.max,
        r.ceiling,
        r.trials.len(),
        r.controls_ok
    )
}

fn reference_suite(suite: Suite, regime: Option<BilinearRegime>) -> (InequalityReport, f64, bool) {
    let (r, secs) = timed(&ExperimentConfig::reference(suite, regime));
    let ok = r.ok() && secs < SUITE_BUDGET_SECS;
    (r, secs, ok)
}

fn lemma_suite() -> Outcome {
    let (r, secs, ok) = reference_suite(Suite::Lemma34, None);
    let below_one = r.trials.iter().all(|t| t.ratio < 1.0);
    let bound = r.measured["lemma_bound_ratio_max"];
    outcome(
        ok && below_one && r.trials.len() == 150 && bound <= 1.0,
        format!("{}; beta / Holder bound <= {bound:.3}", suite_line(&r, secs)),
    )
}

fn sparse_domination() -> Outcome {
    let (r, secs, ok) = reference_suite(Suite::SparseDomination, None);
    outcome(ok && r.trials.len() == 100, suite_line(&r, secs))
}

fn operator_suites() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (s, regime) in [
        (Suite::TwoWeightCzo, None),
        (Suite::Bilinear, Some(BilinearRegime::Banach)),
        (Suite::Bilinear, Some(BilinearRegime::Quasi)),
    ] {
        let (r, secs, pass) = reference_suite(s, regime);
        ok &= pass && r.trials.len() == 100;
        lines.push(suite_line(&r, secs));
    }
    outcome(ok, lines.join("; "))
}

fn bifractional() -> Outcome {
    let (r, secs, ok) = reference_suite(Suite::BifractionalCf, None);
    let pointwise = r.measured["pointwise_bi_ratio_max"];
    let packing = r.measured["stopping_packing_max"];
    let uncovered = r.measured["stopping_uncovered"];
    outcome(
        ok && pointwise <= 1.0 && packing <= 0.5 && uncovered == 0.0,
        format!(
            "{}; BI / (2^(n-alpha) BI^D) <= {pointwise:.4}, stopping packing {packing:.4}",
            suite_line(&r, secs)
        ),
    )
}

fn determinism() -> Outcome {
    let mut configs = Vec::new();
    for mut c in ExperimentConfig::all_reference() {
        c.trials = c.trials.min(6);
        c.depth = c.depth.min(8);
        configs.push(c);
    }
    let run_with = |threads: usize| -> Vec<String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| configs.iter().map(|c| suites::run(c).unwrap().to_json().unwrap()).collect())
    };
    let a = run_with(1);
    let b = run_with(3);
    let c = run_with(1);
    let same = a == b && a == c;
    outcome(same, format!("{} suite configs byte-identical across 1, 3, 1 threads: {same}", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Orlicz norm of powers equals L^p averages", orlicz_specialization),
        ("conjugate duality and Young's inequality", conjugate_duality),
        ("Holder and generalized Holder", holder_suites),
        ("reverse Holder weights satisfy A_inf with beta < 1", lemma_suite),
        ("exponent calculus", exponent_calculus),
        ("Rubio de Francia properties and truncation", rubio_iteration),
        ("sparse families and stopping time", sparse_machinery),
        ("pointwise sparse domination of the test CZO", sparse_domination),
        ("two-weight and bilinear sparse bounds", operator_suites),
        ("bilinear fractional Coifman-Fefferman", bifractional),
        ("determinism across runs and thread counts", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {:>2}: {} | {name} | {} [{:.1}s]",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
