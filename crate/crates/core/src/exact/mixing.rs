//! Exact `d(t) = max_σ ‖P^t(σ, ·) − π‖_TV` and the mixing time from dense
//! matrix powers.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::ExactDistribution;
use crate::scalar::Real;

/// Mixing time in kernel steps; `None` when it exceeds `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingTime {
    pub steps: Option<u64>,
    pub cap: u64,
}

impl MixingTime {
    pub fn censored(&self) -> bool {
        self.steps.is_none()
    }

    /// Steps divided by `sites` (sweeps for a single-site kernel).
    pub fn sweeps(&self, sites: usize) -> Option<f64> {
        self.steps.map(|t| t as f64 / sites as f64)
    }
}

/// `max_σ ‖M(σ, ·) − π‖_TV` for a (power of a) transition matrix.
pub fn distance_to<R: Real>(m: &Array2<R>, pi: &ExactDistribution<R>) -> R {
    m.rows()
        .into_iter()
        .map(|row| row.iter().zip(&pi.weights).map(|(&a, &b)| (a - b).abs()).sum::<R>() / R::lit(2.0))
        .fold(R::zero(), R::max)
}

pub fn matrix_power<R: Real>(p: &Array2<R>, mut t: u64) -> Array2<R> {
    let n = p.nrows();
    let mut out = Array2::<R>::eye(n);
    let mut base = p.clone();
    while t > 0 {
        if t & 1 == 1 {
            out = out.dot(&base);
        }
        t >>= 1;
        if t > 0 {
            base = base.dot(&base);
        }
    }
    out
}

/// `d(t)` at each requested `t`.
pub fn distance_curve<R: Real>(p: &Array2<R>, pi: &ExactDistribution<R>, ts: &[u64]) -> Vec<R> {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by_key(|&i| ts[i]);
    let mut out = vec![R::zero(); ts.len()];
    let mut cur = Array2::<R>::eye(p.nrows());
    let mut at = 0u64;
    for i in order {
        cur = cur.dot(&matrix_power(p, ts[i] - at));
        at = ts[i];
        out[i] = distance_to(&cur, pi);
    }
    out
}

/// Smallest `t >= 1` with `d(t) <= threshold`, searching up to `cap`.
///
/// Doubles `t` by squaring until the threshold is met, then fixes the
/// binary digits from the top, using that `d(t)` is non-increasing.
pub fn exact_mixing_time<R: Real>(p: &Array2<R>, pi: &ExactDistribution<R>, threshold: R, cap: u64) -> MixingTime {
    let mut powers = vec![p.clone()];
    loop {
        let last = powers.last().expect("non-empty");
        if distance_to(last, pi) <= threshold {
            break;
        }
        if (1u64 << (powers.len() - 1)) > cap {
            return MixingTime { steps: None, cap };
        }
        let sq = last.dot(last);
        powers.push(sq);
    }
    // largest t with d(t) > threshold is below 2^{len-1}
    let mut t = 0u64;
    let mut cur: Option<Array2<R>> = None;
    for k in (0..powers.len() - 1).rev() {
        let cand = match &cur {
            Some(c) => c.dot(&powers[k]),
            None => powers[k].clone(),
        };
        if distance_to(&cand, pi) > threshold {
            t += 1 << k;
            cur = Some(cand);
        }
    }
    let steps = t + 1;
    MixingTime { steps: (steps <= cap).then_some(steps), cap }
}
