//! One function per experiment, each filling a [`ResultTable`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ParameterSpec};
use super::table::ResultTable;
use crate::coupling::{mixing_bound_from_coupling, run_trial, time_statistics, Observers, StopRule};
use crate::effective::{
    direct_excursion, direct_renormalized_step, effective_law, effective_step, effective_tunneling_time, expected_absorption,
    hit_prob, run_discrepancy_walk, single_discrepancy_start, walk_params, DiscrepancyState, RenormalizedOutcome,
};
use crate::error::Result;
use crate::exact::{
    distance_curve, exact_mixing_time, gibbs, glauber_kernel, pca_kernel, row_sum_error, stationarity_residual,
    stationary_pca, theorem1_report, tv_distance, tv_via_f, KERNEL_MAX_SIDE,
};
use crate::kernel::{derive_seed, glauber_tunneling_time, weak_symmetry_exponents, PcaParameters};
use crate::lattice::{Site, TorusGeometry};
use crate::spin::SpinConfiguration;
use crate::stats::{loglog_fit, proportion_stderr, semilog_fit, summarize, Fit, Summary};

/// Total-variation threshold of the mixing time.
pub const MIXING_THRESHOLD: f64 = 0.25;

/// A power-law fit is materially worse than an exponential one when its
/// unexplained variance is at least this many times larger.
pub const MATERIAL_FACTOR: f64 = 4.0;

pub fn materially_worse(power: &Fit, exponential: &Fit) -> bool {
    (1.0 - power.r_squared) >= MATERIAL_FACTOR * (1.0 - exponential.r_squared)
        && exponential.r_squared > power.r_squared
}

fn seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.trials).map(|i| derive_seed(cfg.seed, i)).collect()
}

fn all_trials(cfg: &ExperimentConfig) -> (u64, u64) {
    (0, cfg.trials - 1)
}

fn quantile_cols(s: &Summary) -> [Value; 6] {
    let q = s.quantiles;
    [
        json!(s.censored),
        json!(q.map(|q| q.median)),
        json!(q.map(|q| q.q25)),
        json!(q.map(|q| q.q75)),
        json!(s.mean),
        json!(s.stderr),
    ]
}

fn fit_json(f: &Fit) -> Value {
    json!({ "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared })
}

pub(super) fn exact_verify(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        cfg,
        &["L", "J", "q", "stationarity_residual", "row_sum_error", "weak_symmetry_failures", "tv_distance", "tv_via_f", "tv_gap"],
    );
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let g = TorusGeometry::new(l)?;
        let pi = stationary_pca(&p, &g)?;
        let (residual, rows) = if l <= KERNEL_MAX_SIDE {
            let k = pca_kernel(&p, &g)?;
            (Some(stationarity_residual(&pi, &k)), Some(row_sum_error(&k)))
        } else {
            (None, None)
        };
        let failures = crate::exact::enumerate(&g)?
            .filter(|s| {
                let (dl, ur) = weak_symmetry_exponents(s);
                dl != ur
            })
            .count();
        let tv = tv_distance(&pi, &gibbs(&p, &g)?)?;
        let tvf = tv_via_f(&p, &g)?;
        t.push(
            all_trials(cfg),
            vec![
                json!(l),
                json!(p.coupling),
                json!(p.self_interaction),
                json!(residual),
                json!(rows),
                json!(failures),
                json!(tv),
                json!(tvf),
                json!((tv - tvf).abs()),
            ],
        );
    }
    Ok(t)
}

pub(super) fn tv_theorem1(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "k", "c", "J", "q", "tv_exact", "bound_shape"]);
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let row = theorem1_report(&p, &TorusGeometry::new(l)?)?;
        t.push(
            all_trials(cfg),
            vec![
                json!(l),
                json!(row.k),
                json!(row.c),
                json!(p.coupling),
                json!(p.self_interaction),
                json!(row.tv_exact),
                json!(row.bound_shape),
            ],
        );
    }
    Ok(t)
}

pub(super) fn mixing_exact(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "chain", "steps", "censored", "sweeps"]);
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let g = TorusGeometry::new(l)?;
        let chains = [
            ("pca", pca_kernel(&p, &g)?, stationary_pca(&p, &g)?),
            ("glauber", glauber_kernel(&p, &g)?, gibbs(&p, &g)?),
        ];
        for (name, k, pi) in chains {
            let m = exact_mixing_time(&k, &pi, MIXING_THRESHOLD, cfg.budget);
            t.push(
                all_trials(cfg),
                vec![json!(l), json!(name), json!(m.steps), json!(m.censored()), json!(m.sweeps(g.site_count()))],
            );
        }
    }
    Ok(t)
}

/// Doubling grid `1, 2, 4, …` capped by `budget` (which is always included).
pub fn time_grid(budget: u64) -> Vec<u64> {
    let mut v: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2)).take_while(|&t| t < budget).collect();
    v.push(budget);
    v
}

pub(super) fn coupling_bound(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "t", "estimate", "stderr", "lower", "upper", "n", "exact_distance", "dominates"]);
    let mut all = true;
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let g = TorusGeometry::new(l)?;
        let grid = time_grid(cfg.budget);
        let bound = mixing_bound_from_coupling(&p, &g, &seeds(cfg), &grid);
        let exact = if l <= KERNEL_MAX_SIDE {
            Some(distance_curve(&pca_kernel(&p, &g)?, &stationary_pca(&p, &g)?, &grid))
        } else {
            None
        };
        for (i, b) in bound.iter().enumerate() {
            let d = exact.as_ref().map(|e| e[i]);
            let dominates = d.map(|d| b.upper >= d);
            all &= dominates.unwrap_or(true);
            t.push(
                all_trials(cfg),
                vec![
                    json!(l),
                    json!(b.t),
                    json!(b.estimate),
                    json!(b.stderr),
                    json!(b.lower),
                    json!(b.upper),
                    json!(b.n),
                    json!(d),
                    json!(dominates),
                ],
            );
        }
    }
    t.note("bound_dominates_exact", all);
    Ok(t)
}

pub(super) fn stopping_times(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "trial_seed", "s", "t", "r", "t_plus", "steps_run", "atypical_total"]);
    let obs = Observers { conditioned: false, stop: StopRule::FirstReturn };
    let seeds = seeds(cfg);
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let g = TorusGeometry::new(l)?;
        let start = SpinConfiguration::all_minus(&g);
        let records = seeds
            .par_iter()
            .map(|&s| run_trial(&p, &start, s, cfg.budget, obs))
            .collect::<Result<Vec<_>>>()?;
        for (i, r) in records.iter().enumerate() {
            t.push(
                (i as u64, i as u64),
                vec![
                    json!(l),
                    json!(r.seed),
                    json!(r.s),
                    json!(r.t),
                    json!(r.r),
                    json!(r.t_plus),
                    json!(r.steps_run),
                    json!(r.atypical_total),
                ],
            );
        }
        let stats = match time_statistics(&records) {
            Ok(s) => serde_json::to_value(s).expect("serializes"),
            Err(e) => json!({ "error": e.to_string() }),
        };
        t.note(&format!("L={l}"), stats);
    }
    Ok(t)
}

/// Starting configurations with a single discrepancy at `(0, 0)`, in
/// `D_0`: favorable when `D_1` is plus, unfavorable when all is minus.
pub fn discrepancy_start(g: &TorusGeometry, favorable: bool) -> SpinConfiguration {
    let mut xi = vec![-1i8; g.side()];
    if favorable {
        xi[1] = 1;
    }
    single_discrepancy_start(g, &xi, Site::new(0, 0))
}

pub(super) fn discrepancy_walk(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        cfg,
        &[
            "L",
            "class",
            "method",
            "runs",
            "censored",
            "hits",
            "p_hat",
            "stderr",
            "hit_prob",
            "mean_duration",
            "expected_absorption",
            "violations",
        ],
    );
    let seeds = seeds(cfg);
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let g = TorusGeometry::new(l)?;
        for fav in [true, false] {
            let w = walk_params(&p, fav);
            let h = hit_prob(w.p_plus, w.p_minus, l, 1);
            let e = expected_absorption(w.p_plus, w.p_minus, l, 1);
            let class = if fav { "favorable" } else { "unfavorable" };
            let start = discrepancy_start(&g, fav);
            let direct = seeds
                .par_iter()
                .map(|&s| direct_excursion(&p, &start, s, cfg.budget))
                .collect::<Result<Vec<_>>>()?;
            let done: Vec<_> = direct.iter().filter(|d| d.absorbed_at.is_some()).collect();
            let hits = done.iter().filter(|d| d.absorbed_at == Some(l)).count() as u64;
            let violations: u64 = direct.iter().map(|d| d.arc_violations + d.frame_violations).sum();
            let mean_d = done.iter().map(|d| d.duration as f64).sum::<f64>() / done.len().max(1) as f64;
            let n = done.len() as u64;
            t.push(
                all_trials(cfg),
                vec![
                    json!(l),
                    json!(class),
                    json!("direct"),
                    json!(n),
                    json!(cfg.trials - n),
                    json!(hits),
                    json!(hits as f64 / n.max(1) as f64),
                    json!(proportion_stderr(hits, n.max(1))),
                    json!(h),
                    json!(mean_d),
                    json!(e),
                    json!(violations),
                ],
            );
            let walks: Vec<_> = seeds
                .par_iter()
                .map(|&s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    run_discrepancy_walk(&p, DiscrepancyState::single(l, 0, 0, fav), &mut rng)
                })
                .collect();
            let hits = walks.iter().filter(|w| w.absorbed_at == l).count() as u64;
            let mean_d = walks.iter().map(|w| w.duration as f64).sum::<f64>() / walks.len() as f64;
            t.push(
                all_trials(cfg),
                vec![
                    json!(l),
                    json!(class),
                    json!("walk"),
                    json!(cfg.trials),
                    json!(0),
                    json!(hits),
                    json!(hits as f64 / cfg.trials as f64),
                    json!(proportion_stderr(hits, cfg.trials)),
                    json!(h),
                    json!(mean_d),
                    json!(e),
                    json!(0),
                ],
            );
        }
    }
    Ok(t)
}

/// Empirical one-step laws from `−𝟏`: index `m < L` is a flip of `D_m`,
/// index `L` no change.
#[derive(Debug, Clone, PartialEq)]
pub struct OneStepComparison {
    pub law: Vec<f64>,
    pub effective: Vec<u64>,
    pub direct: Vec<u64>,
    /// Unconditioned continuation after `S`; index `L + 1` counts returns
    /// that are neither a single flip nor no change.
    pub unconditioned: Vec<u64>,
    /// Zero-temperature samples discarded because `T = S`.
    pub rejected: u64,
    pub censored: u64,
}

fn freqs(counts: &[u64]) -> Vec<f64> {
    let n = counts.iter().sum::<u64>().max(1) as f64;
    counts.iter().map(|&c| c as f64 / n).collect()
}

pub fn tv_between(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n).map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs()).sum::<f64>()
}

impl OneStepComparison {
    pub fn tv_direct_effective(&self) -> f64 {
        tv_between(&freqs(&self.direct), &freqs(&self.effective))
    }

    pub fn tv_direct_law(&self) -> f64 {
        tv_between(&freqs(&self.direct), &self.law)
    }

    pub fn rejected_rate(&self) -> f64 {
        self.rejected as f64 / (self.rejected + self.direct.iter().sum::<u64>()).max(1) as f64
    }

    /// Share of unconditioned renormalized steps that are not a single flip
    /// or no change.
    pub fn other_rate(&self) -> f64 {
        let l = self.law.len() - 1;
        self.unconditioned[l + 1] as f64 / self.unconditioned.iter().sum::<u64>().max(1) as f64
    }
}

/// Sample `samples` zero-temperature direct steps (discarding `T = S`),
/// as many unconditioned ones, and `samples` effective steps, all from `−𝟏`.
pub fn one_step_comparison(p: &PcaParameters<f64>, side: usize, master: u64, samples: u64, budget: u64) -> Result<OneStepComparison> {
    let xi = vec![-1i8; side];
    let index = |o: RenormalizedOutcome| match o {
        RenormalizedOutcome::Flip(m) => Some(m),
        RenormalizedOutcome::Stay => Some(side),
        RenormalizedOutcome::Other => Some(side + 1),
        RenormalizedOutcome::Rejected | RenormalizedOutcome::Censored => None,
    };
    // zero-temperature draws until `samples` are kept
    let mut direct = vec![0u64; side + 1];
    let (mut rejected, mut censored, mut kept, mut next) = (0u64, 0u64, 0u64, 0u64);
    while kept < samples {
        let batch: Vec<u64> = (next..next + (samples - kept)).collect();
        next += batch.len() as u64;
        let outs = batch
            .par_iter()
            .map(|&i| direct_renormalized_step(p, &xi, derive_seed(master, i), budget, true))
            .collect::<Result<Vec<_>>>()?;
        for o in outs {
            match o.outcome {
                RenormalizedOutcome::Rejected => rejected += 1,
                RenormalizedOutcome::Censored => censored += 1,
                other => {
                    direct[index(other).expect("single flip or stay")] += 1;
                    kept += 1;
                }
            }
        }
        if censored > samples {
            break;
        }
    }
    let uncond_seed = derive_seed(master, u64::MAX);
    let uncond = (0..samples)
        .into_par_iter()
        .map(|i| direct_renormalized_step(p, &xi, derive_seed(uncond_seed, i), budget, false))
        .collect::<Result<Vec<_>>>()?;
    let mut unconditioned = vec![0u64; side + 2];
    for o in uncond {
        match index(o.outcome) {
            Some(k) => unconditioned[k] += 1,
            None => censored += 1,
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, u64::MAX - 1));
    let mut effective = vec![0u64; side + 1];
    for _ in 0..samples {
        let mut x = xi.clone();
        effective[effective_step(p, &mut x, &mut rng).unwrap_or(side)] += 1;
    }
    Ok(OneStepComparison { law: effective_law(p, &xi), effective, direct, unconditioned, rejected, censored })
}

pub(super) fn effective_validate(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(
        cfg,
        &["L", "outcome", "effective_prob", "effective_freq", "direct_freq", "unconditioned_freq"],
    );
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let cmp = one_step_comparison(&p, l, derive_seed(cfg.seed, l as u64), cfg.trials, cfg.budget)?;
        let (fe, fd, fu) = (freqs(&cmp.effective), freqs(&cmp.direct), freqs(&cmp.unconditioned));
        for k in 0..=l + 1 {
            let label = match k {
                k if k < l => json!(k),
                k if k == l => json!("stay"),
                _ => json!("other"),
            };
            t.push(
                all_trials(cfg),
                vec![
                    json!(l),
                    label,
                    json!(cmp.law.get(k)),
                    json!(fe.get(k).copied().unwrap_or(0.0)),
                    json!(fd.get(k).copied().unwrap_or(0.0)),
                    json!(fu[k]),
                ],
            );
        }
        t.note(
            &format!("L={l}"),
            json!({
                "tv_direct_vs_effective": cmp.tv_direct_effective(),
                "tv_direct_vs_law": cmp.tv_direct_law(),
                "tv_unconditioned_vs_law": tv_between(&fu, &cmp.law),
                "rejected_t_equals_s": cmp.rejected_rate(),
                "other_outcome_rate": cmp.other_rate(),
                "censored": cmp.censored,
            }),
        );
    }
    Ok(t)
}

fn scaling_fits(t: &mut ResultTable, points: &[(f64, f64)], exponential: bool) {
    if points.len() < 3 {
        t.note("fit", "needs medians at three or more side lengths");
        return;
    }
    match loglog_fit(points) {
        Ok(f) => t.note("power_fit", fit_json(&f)),
        Err(e) => t.note("power_fit", e.to_string()),
    }
    if exponential {
        match semilog_fit(points) {
            Ok(f) => t.note("exponential_fit", fit_json(&f)),
            Err(e) => t.note("exponential_fit", e.to_string()),
        }
        if let (Ok(a), Ok(b)) = (loglog_fit(points), semilog_fit(points)) {
            t.note("power_materially_worse", materially_worse(&a, &b));
        }
    }
}

pub(super) fn tunneling_scaling(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "J", "q", "trials", "censored", "median", "q25", "q75", "mean", "stderr"]);
    let seeds = seeds(cfg);
    let mut points = Vec::new();
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let times: Vec<Option<f64>> = seeds
            .par_iter()
            .map(|&s| effective_tunneling_time(&p, l, s, cfg.budget).map(|v| v as f64))
            .collect();
        let s = summarize(&times)?;
        if let Some(q) = s.quantiles {
            points.push((l as f64, q.median));
        }
        let mut row = vec![json!(l), json!(p.coupling), json!(p.self_interaction), json!(cfg.trials)];
        row.extend(quantile_cols(&s));
        t.push(all_trials(cfg), row);
    }
    if let ParameterSpec::Regime { c, .. } = cfg.parameters() {
        t.note("regime_c", c);
    }
    scaling_fits(&mut t, &points, false);
    Ok(t)
}

pub(super) fn glauber_compare(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["L", "J", "trials", "censored", "median", "q25", "q75", "mean", "stderr"]);
    let seeds = seeds(cfg);
    let mut points = Vec::new();
    for &l in &cfg.sides {
        let p = cfg.parameters().at(l)?;
        let sweeps = (l * l) as f64;
        let times = seeds
            .par_iter()
            .map(|&s| glauber_tunneling_time(&p, l, s, cfg.budget).map(|v| v.map(|v| v as f64 / sweeps)))
            .collect::<Result<Vec<_>>>()?;
        let s = summarize(&times)?;
        if let Some(q) = s.quantiles {
            points.push((l as f64, q.median));
        }
        let mut row = vec![json!(l), json!(p.coupling), json!(cfg.trials)];
        row.extend(quantile_cols(&s));
        t.push(all_trials(cfg), row);
    }
    t.note("time_unit", "sweeps (L^2 single-site updates); budget counts single-site updates");
    scaling_fits(&mut t, &points, true);
    Ok(t)
}
