//! The lazy `(p₊, p₋)` walk of the discrepancy size and its gambler's-ruin
//! closed forms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kernel::PcaParameters;
use crate::scalar::{sigmoid, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParameters<R> {
    pub p_plus: R,
    pub p_minus: R,
}

impl<R: Real> WalkParameters<R> {
    /// Both boundary sites grow the discrepancy independently with
    /// probability `s`: `p₊ = s²`, `p₋ = (1 − s)²`.
    pub fn from_growth(s: R) -> Self {
        WalkParameters { p_plus: s * s, p_minus: (R::one() - s) * (R::one() - s) }
    }
}

/// Probability that a boundary site of the discrepancy takes the
/// discrepancy's spin, under the zero-temperature window when it is proper:
/// `s = e^{±q} / (2 cosh q)`, then `(s − w) / (1 − 2w)`.
pub fn growth_probability<R: Real>(p: &PcaParameters<R>, favorable: bool) -> R {
    let sign = if favorable { R::one() } else { -R::one() };
    let s = sigmoid(R::lit(2.0) * p.self_interaction * sign);
    if p.window_is_proper() {
        let w = p.atypical_window();
        (s - w) / (R::one() - R::lit(2.0) * w)
    } else {
        s
    }
}

/// Walk of the number of discrepancy spins in its home diagonal. The walk
/// is favorable when the next diagonal already carries the discrepancy's
/// spin.
pub fn walk_params<R: Real>(p: &PcaParameters<R>, favorable: bool) -> WalkParameters<R> {
    WalkParameters::from_growth(growth_probability(p, favorable))
}

/// `P(H_L < H_0)` from `start` for the walk on `{0, …, L}` moving up with
/// `p₊` and down with `p₋`: `(1 − r^i) / (1 − r^L)`, `r = p₋/p₊`, and
/// `i / L` when `p₊ = p₋`.
pub fn hit_prob<R: Real>(p_plus: R, p_minus: R, side: usize, start: usize) -> R {
    assert!(start <= side, "start must lie in 0..=L");
    if start == 0 {
        return R::zero();
    }
    if start == side {
        return R::one();
    }
    let (i, l) = (R::from_count(start), R::from_count(side));
    if p_plus == p_minus {
        return i / l;
    }
    // a = ln(p₊/p₋); r^n = e^{-na}
    let a = p_plus.ln() - p_minus.ln();
    if a > R::zero() {
        (-i * a).exp_m1() / (-l * a).exp_m1()
    } else {
        let b = -a;
        ((i - l) * b).exp() * (-i * b).exp_m1() / (-l * b).exp_m1()
    }
}

/// Expected absorption time at `{0, L}` from `start`:
/// `(L·P(H_L < H_0) − i) / (p₊ − p₋)`, and `i (L − i) / (2p)` when
/// `p₊ = p₋ = p`.
pub fn expected_absorption<R: Real>(p_plus: R, p_minus: R, side: usize, start: usize) -> R {
    assert!(start <= side, "start must lie in 0..=L");
    if start == 0 || start == side {
        return R::zero();
    }
    let (i, l) = (R::from_count(start), R::from_count(side));
    if p_plus == p_minus {
        return i * (l - i) / (R::lit(2.0) * p_plus);
    }
    let a = p_plus.ln() - p_minus.ln();
    if (l * a).abs() >= R::one() {
        return (l * hit_prob(p_plus, p_minus, side, start) - i) / (p_plus - p_minus);
    }
    // Near-symmetric: with b = −a,
    // L·expm1(ib) − i·expm1(Lb) = Σ_{n≥2} (L iⁿ − i Lⁿ) bⁿ / n!
    // and p₊ − p₋ = (p₊ + p₋) tanh(a/2).
    let b = -a;
    let mut num = R::zero();
    let (mut ib, mut lb) = (i * b, l * b);
    let mut fact = R::one();
    for n in 2..80 {
        fact = fact * R::from_count(n);
        ib = ib * i * b;
        lb = lb * l * b;
        let term = (l * ib - i * lb) / fact;
        num = num + term;
        if term.abs() <= R::epsilon() * num.abs() {
            break;
        }
    }
    let half = a / R::lit(2.0);
    num / ((l * b).exp_m1() * (p_plus + p_minus) * half.tanh())
}

/// Outcome of one discrepancy excursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkOutcome {
    /// `0` (the discrepancy vanished) or `L` (the whole diagonal flipped).
    pub absorbed_at: usize,
    pub duration: u64,
}

/// A single discrepancy arc in its home diagonal, positions in the frame
/// that follows the diagonal (`η`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyState {
    pub side: usize,
    pub home: usize,
    /// First column of the arc.
    pub arc_start: usize,
    /// Number of discrepancy spins, the walker position.
    pub size: usize,
    /// The next diagonal carries the discrepancy's spin.
    pub favorable: bool,
}

impl DiscrepancyState {
    pub fn single(side: usize, home: usize, column: usize, favorable: bool) -> Self {
        DiscrepancyState { side, home, arc_start: column, size: 1, favorable }
    }

    /// One zero-temperature step: the two sites bordering the arc each
    /// join it with probability `s`; every other site copies its neighbours.
    pub fn step<G: Rng + ?Sized>(&mut self, s: f64, rng: &mut G) {
        let l = self.side;
        let left_joins = rng.random::<f64>() < s;
        let right_joins = rng.random::<f64>() < s;
        let grown = self.size - 1 + usize::from(left_joins) + usize::from(right_joins);
        // the arc [a, a+N−1] feeds columns a..a+N of the next diagonal, which
        // are columns a−1..a+N−1 here
        self.arc_start = (self.arc_start + l - 1 + usize::from(!left_joins)) % l;
        self.size = grown;
    }
}

/// Run the arc walk until the discrepancy vanishes or fills the diagonal.
pub fn run_discrepancy_walk<R: Real, G: Rng + ?Sized>(
    p: &PcaParameters<R>,
    state: DiscrepancyState,
    rng: &mut G,
) -> WalkOutcome {
    let s = growth_probability(p, state.favorable).to_f64_lossy();
    let mut st = state;
    let mut duration = 0;
    while st.size > 0 && st.size < st.side {
        st.step(s, rng);
        duration += 1;
    }
    WalkOutcome { absorbed_at: st.size, duration }
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Hitting probability of `L` and expected absorption time for every
    /// start, by tridiagonal solves of the absorbing chain.
    pub fn solve(p_plus: f64, p_minus: f64, l: usize) -> (Vec<f64>, Vec<f64>) {
        // interior unknowns x_1..x_{L−1}:
        // (p₊+p₋) x_i − p₊ x_{i+1} − p₋ x_{i−1} = rhs_i
        let thomas = |rhs: &dyn Fn(usize) -> f64, right_boundary: f64| -> Vec<f64> {
            let n = l - 1;
            let (a, b, c) = (-p_minus, p_plus + p_minus, -p_plus);
            let mut cp = vec![0.0; n];
            let mut dp = vec![0.0; n];
            for k in 0..n {
                let i = k + 1;
                let mut d = rhs(i);
                if i == l - 1 {
                    d += p_plus * right_boundary;
                }
                let denom = if k == 0 { b } else { b - a * cp[k - 1] };
                cp[k] = c / denom;
                dp[k] = if k == 0 { d / denom } else { (d - a * dp[k - 1]) / denom };
            }
            let mut x = vec![0.0; n];
            for k in (0..n).rev() {
                x[k] = dp[k] - if k + 1 < n { cp[k] * x[k + 1] } else { 0.0 };
            }
            let mut full = vec![0.0];
            full.extend(x);
            full.push(right_boundary);
            full
        };
        (thomas(&|_| 0.0, 1.0), thomas(&|_| 1.0, 0.0))
    }
}
