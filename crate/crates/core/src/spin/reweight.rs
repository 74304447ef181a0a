//! The reweighting factor `f(σ)` relating the PCA stationary measure to
//! the Gibbs measure, normalized so that `f(𝟏) = 1`. Always in log domain.

use serde::{Deserialize, Serialize};

use super::SpinConfiguration;
use crate::kernel::PcaParameters;
use crate::scalar::{softplus, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReweightingValue<R> {
    /// Natural log of the normalized `f(σ)`.
    pub log_f: R,
    /// `δ = e^{-2q}`.
    pub delta: R,
}

/// `log f(σ)` from contour counts:
/// `n_ur · ln[(1+δe^{4J})/(1+δe^{-4J})] + (l - 2 n_ur) · ln[(1+δ)/(1+δe^{-4J})]`.
pub fn log_f<R: Real>(s: &SpinConfiguration, p: &PcaParameters<R>) -> ReweightingValue<R> {
    let st = s.contour_stats();
    let (j, q) = (p.coupling, p.self_interaction);
    let four_j = R::lit(4.0) * j;
    let two_q = R::lit(2.0) * q;
    let base = softplus(-four_j - two_q);
    let elbow = softplus(four_j - two_q) - base;
    let single = softplus(-two_q) - base;
    ReweightingValue {
        log_f: R::from_count(st.n_ur) * elbow + R::from_count(st.unpaired_bonds()) * single,
        delta: p.delta(),
    }
}

/// `log f(σ)` from the site product `Π_x (1 + δ φ_x)` divided by its value at `𝟏`,
/// with `φ_x = exp(-2J(σ_x σ_x^u + σ_x σ_x^r))`.
pub fn log_f_site_product<R: Real>(s: &SpinConfiguration, p: &PcaParameters<R>) -> R {
    let l = s.side();
    let (j, q) = (p.coupling, p.self_interaction);
    let two_q = R::lit(2.0) * q;
    let sp = |i: usize, jj: usize| if s.get(i, jj) { 1i32 } else { -1 };
    let mut total = R::zero();
    for r in 0..l {
        for c in 0..l {
            let x = sp(c, r);
            let a = x * sp(c, (r + 1) % l) + x * sp((c + 1) % l, r);
            total = total + softplus(-two_q - R::lit(2.0) * j * R::lit(a as f64));
        }
    }
    total - R::from_count(l * l) * softplus(-R::lit(4.0) * j - two_q)
}
