//! Brute-force enumeration for small tori: exact stationary and Gibbs
//! measures, total variation, dense kernels and exact mixing times.
//!
//! Configurations are indexed by their canonical code (bit `i + L*j` is
//! site `(i, j)`). Measures are available up to `L = 4`; full kernels up to
//! `L = 3`.

mod mixing;

pub use mixing::{distance_curve, distance_to, exact_mixing_time, matrix_power, MixingTime};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{glauber_acceptance, log_z_sigma, PcaKernel, PcaParameters};
use crate::lattice::TorusGeometry;
use crate::scalar::{log_sum_exp, Real};
use crate::spin::{log_f, SpinConfiguration};

pub const MEASURE_MAX_SIDE: usize = 4;
pub const KERNEL_MAX_SIDE: usize = 3;

pub(crate) fn guard_measure(g: &TorusGeometry) -> Result<()> {
    if g.side() > MEASURE_MAX_SIDE {
        return Err(Error::SizeGuard { what: "exact measure enumeration", limit: "L <= 4", side: g.side() });
    }
    Ok(())
}

pub(crate) fn guard_kernel(g: &TorusGeometry) -> Result<()> {
    if g.side() > KERNEL_MAX_SIDE {
        return Err(Error::SizeGuard { what: "dense transition kernel", limit: "L <= 3", side: g.side() });
    }
    Ok(())
}

/// Every configuration once, in code order.
pub fn enumerate(g: &TorusGeometry) -> Result<impl Iterator<Item = SpinConfiguration> + '_> {
    guard_measure(g)?;
    Ok((0..1u64 << g.site_count()).map(move |c| SpinConfiguration::from_code(g, c)))
}

/// Probability table over all `2^{L²}` configurations, indexed by code.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<R> {
    pub side: usize,
    pub weights: Vec<R>,
}

impl<R: Real> ExactDistribution<R> {
    /// Normalize unnormalized log-weights.
    pub fn from_log_weights(side: usize, log_w: &[R]) -> Self {
        let z = log_sum_exp(log_w);
        ExactDistribution { side, weights: log_w.iter().map(|&w| (w - z).exp()).collect() }
    }

    pub fn prob(&self, s: &SpinConfiguration) -> R {
        self.weights[s.code() as usize]
    }

    pub fn total(&self) -> R {
        self.weights.iter().copied().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `π_PCA(σ) = Z_σ / Σ Z_σ'`.
pub fn stationary_pca<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<ExactDistribution<R>> {
    let lw: Vec<R> = enumerate(g)?.map(|s| log_z_sigma(p, &s)).collect();
    Ok(ExactDistribution::from_log_weights(g.side(), &lw))
}

/// Contour form of the Gibbs measure, `π_G(σ) ∝ e^{-2J l(σ)}`.
pub fn gibbs<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<ExactDistribution<R>> {
    let two_j = R::lit(2.0) * p.coupling;
    let lw: Vec<R> = enumerate(g)?.map(|s| -two_j * R::from_count(s.contour_stats().length)).collect();
    Ok(ExactDistribution::from_log_weights(g.side(), &lw))
}

/// Gibbs measure from the Ising energy, `π_G(σ) ∝ e^{-H(σ)}`.
pub fn gibbs_from_energy<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<ExactDistribution<R>> {
    let lw: Vec<R> = enumerate(g)?.map(|s| -crate::kernel::ising_energy(p, &s)).collect();
    Ok(ExactDistribution::from_log_weights(g.side(), &lw))
}

pub fn tv_distance<R: Real>(mu: &ExactDistribution<R>, nu: &ExactDistribution<R>) -> Result<R> {
    if mu.len() != nu.len() {
        return Err(Error::GeometryMismatch(mu.side, nu.side));
    }
    let s: R = mu.weights.iter().zip(&nu.weights).map(|(&a, &b)| (a - b).abs()).sum();
    Ok(s / R::lit(2.0))
}

/// `‖π_PCA − π_G‖_TV` through the reweighting factor: `π_PCA = π_G f / π_G(f)`,
/// so half of `π_G[|f / π_G(f) − 1|]` is the total variation distance
/// (the half matches the `(1/2) Σ |μ − ν|` normalization of [`tv_distance`]).
pub fn tv_via_f<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<R> {
    let pg = gibbs(p, g)?;
    let lf: Vec<R> = enumerate(g)?.map(|s| log_f(&s, p).log_f).collect();
    // log π_G(f)
    let terms: Vec<R> = pg.weights.iter().zip(&lf).map(|(&w, &l)| w.ln() + l).collect();
    let log_mean = log_sum_exp(&terms);
    let mean_abs: R = pg.weights.iter().zip(&lf).map(|(&w, &l)| w * ((l - log_mean).exp() - R::one()).abs()).sum();
    Ok(mean_abs / R::lit(2.0))
}

/// Dense PCA transition matrix, rows indexed by the source code.
pub fn pca_kernel<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<Array2<R>> {
    guard_kernel(g)?;
    let n = g.site_count();
    let size = 1usize << n;
    let kernel = PcaKernel::new(*p);
    let mut m = Array2::<R>::zeros((size, size));
    let l = g.side();
    let mut plus_prob = vec![R::zero(); n];
    for from in 0..size {
        let s = SpinConfiguration::from_code(g, from as u64);
        for (k, pr) in plus_prob.iter_mut().enumerate() {
            let (i, j) = (k % l, k / l);
            *pr = kernel.threshold(s.get(i, (j + l - 1) % l), s.get((i + l - 1) % l, j), s.get(i, j));
        }
        let mut row = m.row_mut(from);
        for to in 0..size {
            let mut v = R::one();
            for (k, &pr) in plus_prob.iter().enumerate() {
                v = v * if (to >> k) & 1 == 1 { pr } else { R::one() - pr };
            }
            row[to] = v;
        }
    }
    Ok(m)
}

/// Dense Metropolis single-site kernel: one uniformly chosen site per step.
pub fn glauber_kernel<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<Array2<R>> {
    guard_kernel(g)?;
    let n = g.site_count();
    let size = 1usize << n;
    let pick = R::one() / R::from_count(n);
    let mut m = Array2::<R>::zeros((size, size));
    for from in 0..size {
        let s = SpinConfiguration::from_code(g, from as u64);
        let mut stay = R::one();
        for (k, x) in g.sites().enumerate() {
            let a = pick * glauber_acceptance(p, &s, x);
            m[[from, from ^ (1 << k)]] = a;
            stay = stay - a;
        }
        m[[from, from]] = stay;
    }
    Ok(m)
}

/// `max_τ |Σ_σ π(σ) P(σ, τ) − π(τ)|`.
pub fn stationarity_residual<R: Real>(pi: &ExactDistribution<R>, kernel: &Array2<R>) -> R {
    let v = ndarray::ArrayView1::from(&pi.weights);
    let moved = v.dot(kernel);
    moved.iter().zip(&pi.weights).map(|(&a, &b)| (a - b).abs()).fold(R::zero(), R::max)
}

/// Largest `|row sum − 1|`.
pub fn row_sum_error<R: Real>(kernel: &Array2<R>) -> R {
    kernel.rows().into_iter().map(|r| (r.sum() - R::one()).abs()).fold(R::zero(), R::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    #[serde(rename = "L")]
    pub side: usize,
    pub k: f64,
    pub c: f64,
    pub tv_exact: f64,
    /// `L^{1 − c/2} + L^{2 − 2k}`, without the constant.
    pub bound_shape: f64,
}

pub fn bound_shape(side: usize, k: f64, c: f64) -> f64 {
    let l = side as f64;
    l.powf(1.0 - c / 2.0) + l.powf(2.0 - 2.0 * k)
}

/// Exact TV distance next to the constant-free bound, for regime parameters.
pub fn theorem1_report<R: Real>(p: &PcaParameters<R>, g: &TorusGeometry) -> Result<Theorem1Row> {
    let r = p
        .regime
        .ok_or_else(|| Error::InvalidParameters("theorem1 report needs regime constants (k, c)".into()))?;
    if r.side != g.side() {
        return Err(Error::GeometryMismatch(r.side, g.side()));
    }
    let (k, c) = (r.k.to_f64_lossy(), r.c.to_f64_lossy());
    let tv = tv_distance(&stationary_pca(p, g)?, &gibbs(p, g)?)?;
    Ok(Theorem1Row { side: g.side(), k, c, tv_exact: tv.to_f64_lossy(), bound_shape: bound_shape(g.side(), k, c) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::transition_log_prob;
    use crate::lattice::Site;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(j: f64, q: f64) -> PcaParameters<f64> {
        PcaParameters::new(j, q).unwrap()
    }

    fn g(l: usize) -> TorusGeometry {
        TorusGeometry::new(l).unwrap()
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate(&g(2)).unwrap().count(), 16);
        assert_eq!(enumerate(&g(3)).unwrap().count(), 512);
        assert!(matches!(enumerate(&g(5)).err(), Some(Error::SizeGuard { .. })));
        for (c, s) in enumerate(&g(2)).unwrap().enumerate() {
            assert_eq!(s.code(), c as u64);
            let back: SpinConfiguration = s.to_string().parse().unwrap();
            assert_eq!(back, s);
        }
        assert!(pca_kernel(&p(1.0, 0.0), &g(4)).is_err());
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_pca(&p(0.0, 0.0), &g(3)).unwrap();
        assert!(pi.weights.iter().all(|&w| (w - 1.0 / 512.0).abs() < 1e-15));
        let gg = g(3);
        let pi = stationary_pca(&p(1.3, 0.4), &gg).unwrap();
        assert!((pi.total() - 1.0).abs() < 1e-12);
        let a = pi.prob(&SpinConfiguration::all_plus(&gg));
        let b = pi.prob(&SpinConfiguration::all_minus(&gg));
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn stationarity_and_row_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for l in [2usize, 3] {
            for _ in 0..3 {
                let pp = p(rng.random_range(0.0..3.0), rng.random_range(0.0..1.0));
                let k = pca_kernel(&pp, &g(l)).unwrap();
                assert!(row_sum_error(&k) < 1e-12);
                let pi = stationary_pca(&pp, &g(l)).unwrap();
                assert!(stationarity_residual(&pi, &k) < 1e-12);
                let gk = glauber_kernel(&pp, &g(l)).unwrap();
                assert!(row_sum_error(&gk) < 1e-12);
                // Metropolis leaves the Gibbs measure invariant
                assert!(stationarity_residual(&gibbs(&pp, &g(l)).unwrap(), &gk) < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_entries_match_transition_log_prob() {
        let gg = g(2);
        let pp = p(1.0, 0.3);
        let k = pca_kernel(&pp, &gg).unwrap();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let s = SpinConfiguration::from_code(&gg, a);
                let t = SpinConfiguration::from_code(&gg, b);
                let lp = transition_log_prob(&pp, &s, &t).unwrap();
                assert!((k[[a as usize, b as usize]] - lp.exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gibbs_examples() {
        let u = gibbs(&p(0.0, 0.3), &g(3)).unwrap();
        assert!(u.weights.iter().all(|&w| (w - 1.0 / 512.0).abs() < 1e-15));
        let gg = g(3);
        let pg = gibbs(&p(0.5, 0.0), &gg).unwrap();
        let top = pg.weights.iter().copied().fold(0.0, f64::max);
        assert_eq!(pg.prob(&SpinConfiguration::all_plus(&gg)), top);
        assert_eq!(pg.prob(&SpinConfiguration::all_minus(&gg)), top);
        let others = pg.weights.iter().filter(|&&w| w == top).count();
        assert_eq!(others, 2);
        for l in [2usize, 3] {
            let a = gibbs(&p(0.8, 0.1), &g(l)).unwrap();
            let b = gibbs_from_energy(&p(0.8, 0.1), &g(l)).unwrap();
            assert!(tv_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn tv_examples() {
        let gg = g(2);
        let a = gibbs(&p(0.4, 0.0), &gg).unwrap();
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let mut d1 = ExactDistribution { side: 2, weights: vec![0.0; 16] };
        let mut d2 = d1.clone();
        d1.weights[0] = 1.0;
        d2.weights[5] = 1.0;
        assert_eq!(tv_distance(&d1, &d2).unwrap(), 1.0);
        assert!(tv_via_f(&p(0.0, 0.0), &g(3)).unwrap().abs() < 1e-15);
        let pp = p(1.0, 0.5);
        let direct = tv_distance(&stationary_pca(&pp, &gg).unwrap(), &gibbs(&pp, &gg).unwrap()).unwrap();
        assert!((direct - tv_via_f(&pp, &gg).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tv_decreases_with_coupling() {
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 3.0].iter().map(|&j| tv_via_f(&p(j, 0.2), &g(3)).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn f_exceeds_one_away_from_constants() {
        let gg = g(3);
        let pp = p(3.0, 0.2);
        assert!(pp.delta() >= 0.5);
        for s in enumerate(&gg).unwrap() {
            let lf = log_f(&s, &pp).log_f;
            if s.is_all_plus() || s.is_all_minus() {
                assert_eq!(lf, 0.0);
            } else {
                assert!(lf > 0.0);
            }
        }
    }

    #[test]
    fn f32_instantiation() {
        let pp = PcaParameters::new(1.0f32, 0.3).unwrap();
        let gg = g(2);
        let pi = stationary_pca(&pp, &gg).unwrap();
        assert!((pi.total() - 1.0).abs() < 1e-5);
        let k = pca_kernel(&pp, &gg).unwrap();
        assert!(stationarity_residual(&pi, &k) < 1e-5);
        let tv64 = tv_via_f(&p(1.0, 0.3), &gg).unwrap();
        assert!((tv_via_f(&pp, &gg).unwrap() as f64 - tv64).abs() < 1e-5);
    }

    #[test]
    fn theorem1_rows() {
        let rows: Vec<Theorem1Row> = [2usize, 3, 4]
            .iter()
            .map(|&l| theorem1_report(&PcaParameters::from_regime(2.0, 3.0, l).unwrap(), &g(l)).unwrap())
            .collect();
        assert!(rows.windows(2).all(|w| w[1].bound_shape < w[0].bound_shape));
        assert!(rows.iter().all(|r| r.tv_exact > 0.0 && r.tv_exact < 1.0));
        let json = serde_json::to_value(rows[1]).unwrap();
        for key in ["L", "k", "c", "tv_exact", "bound_shape"] {
            assert!(json.get(key).is_some());
        }
        assert!(theorem1_report(&p(1.0, 0.1), &g(3)).is_err());
        let _ = Site::new(0, 0);
    }
}
