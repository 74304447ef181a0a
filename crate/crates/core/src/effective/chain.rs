//! The renormalized chain `ξ(n)` on diagonal configurations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::walk::{hit_prob, walk_params};
use crate::error::{Error, Result};
use crate::kernel::PcaParameters;
use crate::lattice::Site;
use crate::scalar::Real;
use crate::spin::SpinConfiguration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalChainState {
    /// `xi[m]` is the spin of `D_m`.
    pub xi: Vec<i8>,
    pub step_count: u64,
}

impl DiagonalChainState {
    pub fn all_minus(side: usize) -> Self {
        DiagonalChainState { xi: vec![-1; side], step_count: 0 }
    }

    pub fn is_all_plus(&self) -> bool {
        self.xi.iter().all(|&s| s > 0)
    }
}

/// `D_m` is favorable when `D_{m+1}` already has the opposite spin, so a
/// discrepancy born in `D_m` grows into agreement with it.
pub fn is_favorable(xi: &[i8], m: usize) -> bool {
    xi[m] != xi[(m + 1) % xi.len()]
}

/// Relative birth weight `|I_x| / (1 − |I_x|) = e^{−4J − 2q σ_x σ_x^l}`
/// with the common `e^{−4J}` dropped. An atypical update at `x ∈ D_{m+1}`
/// leaves a discrepancy in diagonal `m` of the moving frame, and
/// `σ_x ≠ σ_x^l` there exactly when `D_m` is favorable.
fn birth_weight<R: Real>(p: &PcaParameters<R>, favorable: bool) -> f64 {
    let q = p.self_interaction.to_f64_lossy();
    if favorable {
        (2.0 * q).exp()
    } else {
        (-2.0 * q).exp()
    }
}

/// Exact law of the defect site in a diagonal configuration, conditional on
/// exactly one atypical update. Per-site probabilities for sites with
/// `σ_x = σ_x^l` and with `σ_x ≠ σ_x^l`, and the class sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancySiteLaw {
    pub aligned_prob: f64,
    pub opposed_prob: f64,
    pub aligned_count: usize,
    pub opposed_count: usize,
}

pub fn discrepancy_site_law<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration) -> Result<DiscrepancySiteLaw> {
    let xi = s.is_diagonal().ok_or(Error::NotDiagonal)?;
    let l = xi.len();
    // σ_x = σ_x^l iff x's diagonal equals the previous one
    let aligned_diagonals = (0..l).filter(|&m| xi[m] == xi[(m + l - 1) % l]).count();
    let aligned_count = aligned_diagonals * l;
    let opposed_count = l * l - aligned_count;
    // aligned sites have σ_x σ_x^l = +1 and the smaller window
    let (wa, wo) = (birth_weight(p, false), birth_weight(p, true));
    let z = aligned_count as f64 * wa + opposed_count as f64 * wo;
    Ok(DiscrepancySiteLaw { aligned_prob: wa / z, opposed_prob: wo / z, aligned_count, opposed_count })
}

/// Sample the site of the single atypical update from a diagonal
/// configuration.
pub fn sample_discrepancy_site<R: Real, G: Rng + ?Sized>(
    p: &PcaParameters<R>,
    s: &SpinConfiguration,
    rng: &mut G,
) -> Result<Site> {
    let law = discrepancy_site_law(p, s)?;
    let l = s.side();
    let aligned_mass = law.aligned_prob * law.aligned_count as f64;
    let want_aligned = law.opposed_count == 0 || (law.aligned_count > 0 && rng.random::<f64>() < aligned_mass);
    let xi = s.is_diagonal().expect("checked by the law");
    let class: Vec<usize> = (0..l).filter(|&m| (xi[m] == xi[(m + l - 1) % l]) == want_aligned).collect();
    let m = class[rng.random_range(0..class.len())];
    let i = rng.random_range(0..l);
    Ok(Site::new(i, (m + l - i) % l))
}

/// Per-step flip probabilities of the favorable and unfavorable classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipRates {
    pub favorable: f64,
    pub unfavorable: f64,
}

/// Probability that a renormalized step flips one given diagonal of each
/// class in a configuration with `n_favorable` favorable diagonals.
pub fn flip_rates<R: Real>(p: &PcaParameters<R>, side: usize, n_favorable: usize) -> FlipRates {
    let (bf, bu) = (birth_weight(p, true), birth_weight(p, false));
    let z = n_favorable as f64 * bf + (side - n_favorable) as f64 * bu;
    let hit = |fav: bool| {
        let w = walk_params(p, fav);
        hit_prob(w.p_plus, w.p_minus, side, 1).to_f64_lossy()
    };
    FlipRates { favorable: bf / z * hit(true), unfavorable: bu / z * hit(false) }
}

/// One-step law of the effective chain: entry `m` is the probability of
/// flipping `D_m`, the last entry the probability of no change.
pub fn effective_law<R: Real>(p: &PcaParameters<R>, xi: &[i8]) -> Vec<f64> {
    let l = xi.len();
    let fav: Vec<bool> = (0..l).map(|m| is_favorable(xi, m)).collect();
    let rates = flip_rates(p, l, fav.iter().filter(|&&f| f).count());
    let mut law: Vec<f64> = fav.iter().map(|&f| if f { rates.favorable } else { rates.unfavorable }).collect();
    law.push(1.0 - law.iter().sum::<f64>());
    law
}

/// One renormalized step. Returns the flipped diagonal, if any.
pub fn effective_step<R: Real, G: Rng + ?Sized>(p: &PcaParameters<R>, xi: &mut [i8], rng: &mut G) -> Option<usize> {
    let law = effective_law(p, xi);
    let mut u = rng.random::<f64>();
    for (m, &pm) in law[..xi.len()].iter().enumerate() {
        if u < pm {
            xi[m] = -xi[m];
            return Some(m);
        }
        u -= pm;
    }
    None
}

/// A diagonal flip of the effective chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveEvent {
    pub step: u64,
    pub diagonal: usize,
    /// `+1` when the diagonal turned plus.
    pub direction: i8,
}

/// Run the effective chain until `stop` holds or `budget` renormalized
/// steps pass, skipping the steps without a flip geometrically. Returns
/// whether `stop` was reached.
pub fn run_effective<R: Real, G: Rng + ?Sized>(
    p: &PcaParameters<R>,
    state: &mut DiagonalChainState,
    budget: u64,
    rng: &mut G,
    mut stop: impl FnMut(&[i8]) -> bool,
    mut record: Option<&mut Vec<EffectiveEvent>>,
) -> bool {
    let l = state.xi.len();
    let mut fav: Vec<usize> = Vec::with_capacity(l);
    let mut unf: Vec<usize> = Vec::with_capacity(l);
    while !stop(&state.xi) {
        fav.clear();
        unf.clear();
        for m in 0..l {
            if is_favorable(&state.xi, m) {
                fav.push(m);
            } else {
                unf.push(m);
            }
        }
        let rates = flip_rates(p, l, fav.len());
        let mass_f = rates.favorable * fav.len() as f64;
        let mass_u = rates.unfavorable * unf.len() as f64;
        let total = mass_f + mass_u;
        if total <= 0.0 {
            state.step_count = state.step_count.max(budget);
            return false;
        }
        let skip = if total >= 1.0 { 0 } else { geometric_failures(total, rng) };
        let at = state.step_count.saturating_add(skip).saturating_add(1);
        if at > budget {
            state.step_count = budget;
            return false;
        }
        state.step_count = at;
        let pool = if rng.random::<f64>() * total < mass_f { &fav } else { &unf };
        let m = pool[rng.random_range(0..pool.len())];
        state.xi[m] = -state.xi[m];
        if let Some(r) = record.as_deref_mut() {
            r.push(EffectiveEvent { step: at, diagonal: m, direction: state.xi[m] });
        }
    }
    true
}

/// Failures before the first success at rate `p`, as `⌊E / −ln(1 − p)⌋`
/// with `E` standard exponential; exact down to rates far below `f64`
/// epsilon.
fn geometric_failures<G: Rng + ?Sized>(p: f64, rng: &mut G) -> u64 {
    let e: f64 = Exp1.sample(rng);
    let k = (e / -(-p).ln_1p()).floor();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64
    }
}

/// Renormalized steps from `−𝟏` until `𝟏`, `None` when `budget` runs out.
pub fn effective_tunneling_time<R: Real>(p: &PcaParameters<R>, side: usize, seed: u64, budget: u64) -> Option<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = DiagonalChainState::all_minus(side);
    run_effective(p, &mut st, budget, &mut rng, |xi| xi.iter().all(|&s| s > 0), None).then_some(st.step_count)
}

/// Flip records of an effective trajectory from `start`.
pub fn effective_trajectory<R: Real>(
    p: &PcaParameters<R>,
    start: &[i8],
    seed: u64,
    budget: u64,
) -> (Vec<EffectiveEvent>, DiagonalChainState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = DiagonalChainState { xi: start.to_vec(), step_count: 0 };
    let mut events = Vec::new();
    run_effective(p, &mut st, budget, &mut rng, |xi| xi.iter().all(|&s| s > 0), Some(&mut events));
    (events, st)
}

/// Start from a single plus diagonal and report whether `𝟏` is reached
/// before `−𝟏`. With `favorable_only`, unfavorable flips are suppressed so
/// the plus diagonals stay one block whose length is a walk.
pub fn plus_excursion<R: Real, G: Rng + ?Sized>(p: &PcaParameters<R>, side: usize, favorable_only: bool, rng: &mut G) -> bool {
    let mut xi = vec![-1i8; side];
    xi[0] = 1;
    loop {
        let law = effective_law(p, &xi);
        let mut u = rng.random::<f64>() * if favorable_only {
            (0..side).filter(|&m| is_favorable(&xi, m)).map(|m| law[m]).sum::<f64>()
        } else {
            law[..side].iter().sum::<f64>()
        };
        for m in 0..side {
            if favorable_only && !is_favorable(&xi, m) {
                continue;
            }
            if u < law[m] {
                xi[m] = -xi[m];
                break;
            }
            u -= law[m];
        }
        let plus = xi.iter().filter(|&&s| s > 0).count();
        if plus == 0 {
            return false;
        }
        if plus == side {
            return true;
        }
    }
}

/// `ℙ(reach L before 0 from 1)` for the number of plus diagonals when every
/// diagonal flips at the same rate: `1 / Σ_j 1/C(L−1, j)`.
pub fn uniform_rate_excursion_prob(side: usize) -> f64 {
    let mut sum = 0.0;
    let mut c = 1.0;
    for j in 0..side {
        sum += 1.0 / c;
        c = c * (side - 1 - j) as f64 / (j + 1) as f64;
    }
    1.0 / sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::walk::expected_absorption;
    use crate::lattice::{Direction, TorusGeometry};

    fn params(j: f64, q: f64) -> PcaParameters<f64> {
        PcaParameters::new(j, q).unwrap()
    }

    #[test]
    fn classification_examples() {
        let mut xi = vec![-1i8; 8];
        assert!((0..8).all(|m| !is_favorable(&xi, m)));
        xi[3] = 1;
        let fav: Vec<usize> = (0..8).filter(|&m| is_favorable(&xi, m)).collect();
        assert_eq!(fav, vec![2, 3]);
        let law = effective_law(&params(1.2, 0.3), &vec![-1i8; 8]);
        assert!(law[..8].windows(2).all(|w| w[0] == w[1]));
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn site_law_bounds_and_sampling() {
        let g = TorusGeometry::new(8).unwrap();
        let p = params(1.2, 0.2);
        let minus = SpinConfiguration::all_minus(&g);
        let law = discrepancy_site_law(&p, &minus).unwrap();
        assert_eq!(law.aligned_count, 64);
        assert!((law.aligned_prob - 1.0 / 64.0).abs() < 1e-15);
        let law0 = discrepancy_site_law(&params(1.2, 0.0), &SpinConfiguration::from_diagonals(&g, &[1, 1, -1, 1, -1, -1, 1, -1])).unwrap();
        assert!((law0.aligned_prob - law0.opposed_prob).abs() < 1e-15);

        let s = SpinConfiguration::from_diagonals(&g, &[1, 1, -1, -1, -1, -1, -1, -1]);
        let law = discrepancy_site_law(&p, &s).unwrap();
        let (lo, hi) = ((-0.8f64).exp() / 64.0, 0.8f64.exp() / 64.0);
        for v in [law.aligned_prob, law.opposed_prob] {
            assert!(lo <= v && v <= hi);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut opposed = 0usize;
        for _ in 0..n {
            let x = sample_discrepancy_site(&p, &s, &mut rng).unwrap();
            let l = g.neighbor(x, Direction::Left);
            opposed += usize::from(s.at(x) != s.at(l));
        }
        let want = law.opposed_prob * law.opposed_count as f64;
        let f = opposed as f64 / n as f64;
        assert!((f - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt(), "{f} vs {want}");

        let mut bad = s.clone();
        bad.flip_in_place(Site::new(0, 0));
        assert!(matches!(sample_discrepancy_site(&p, &bad, &mut rng), Err(Error::NotDiagonal)));
    }

    #[test]
    fn tunneling_small_and_censored() {
        let p = params(1.2, 0.2);
        let mut times = Vec::new();
        for seed in 0..200 {
            times.push(effective_tunneling_time(&p, 2, seed, 1 << 40).unwrap());
        }
        let mean = times.iter().sum::<u64>() as f64 / times.len() as f64;
        assert!(mean.is_finite() && mean > 1.0);
        assert_eq!(effective_tunneling_time(&p, 16, 1, 10), None);
        assert_eq!(effective_tunneling_time(&p, 8, 3, 1 << 40), effective_tunneling_time(&p, 8, 3, 1 << 40));
    }

    #[test]
    fn geometric_skipping_matches_plain_steps() {
        // mean time of the first flip from −𝟏 at L=4 against 1 / total rate
        let p = params(1.0, 0.1);
        let l = 4;
        let total = effective_law(&p, &vec![-1; l])[..l].iter().sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20_000;
        let (mut fast, mut slow) = (0u64, 0u64);
        for _ in 0..n {
            let mut st = DiagonalChainState::all_minus(l);
            run_effective(&p, &mut st, u64::MAX, &mut rng, |xi| xi.iter().any(|&s| s > 0), None);
            fast += st.step_count;
            let mut xi = vec![-1i8; l];
            let mut k = 0;
            while effective_step(&p, &mut xi, &mut rng).is_none() {
                k += 1;
            }
            slow += k + 1;
        }
        let want = 1.0 / total;
        for got in [fast, slow] {
            let mean = got as f64 / n as f64;
            assert!((mean - want).abs() < 0.05 * want, "{mean} vs {want}");
        }
    }

    #[test]
    fn trajectory_records() {
        let p = params(1.0, 0.4);
        let (events, end) = effective_trajectory(&p, &vec![-1; 4], 11, 1 << 50);
        assert!(end.is_all_plus());
        assert_eq!(events.last().unwrap().step, end.step_count);
        let mut xi = vec![-1i8; 4];
        for e in &events {
            xi[e.diagonal] = -xi[e.diagonal];
            assert_eq!(xi[e.diagonal], e.direction);
        }
        assert!(events.windows(2).all(|w| w[0].step < w[1].step));
    }

    #[test]
    fn excursions_at_zero_q() {
        let p = params(1.2, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let l = 16;
        let n = 100_000;
        let block = (0..n).filter(|_| plus_excursion(&p, l, true, &mut rng)).count();
        let h = 1.0 / l as f64;
        let se = (h * (1.0 - h) / n as f64).sqrt();
        assert!((block as f64 / n as f64 - h).abs() < 4.0 * se);

        let l = 6;
        let want = uniform_rate_excursion_prob(l);
        let n = 50_000;
        let full = (0..n).filter(|_| plus_excursion(&p, l, false, &mut rng)).count();
        let se = (want * (1.0 - want) / n as f64).sqrt();
        assert!((full as f64 / n as f64 - want).abs() < 4.0 * se, "{} vs {want}", full as f64 / n as f64);
        assert!((uniform_rate_excursion_prob(2) - 0.5).abs() < 1e-15);
        let _ = expected_absorption(0.25, 0.25, 16, 1);
    }
}
