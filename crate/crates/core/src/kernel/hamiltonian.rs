//! Asymmetric pair Hamiltonian `H(σ, τ)`, the normalizer `Z_σ` and the
//! transition log-probabilities built from them.

use serde::{Deserialize, Serialize};

use super::PcaParameters;
use crate::error::Result;
use crate::scalar::{log_cosh, Real};
use crate::spin::SpinConfiguration;

#[inline]
fn sp(s: &SpinConfiguration, i: usize, j: usize) -> i64 {
    if s.get(i, j) {
        1
    } else {
        -1
    }
}

/// `H(σ, τ) = -Σ_x [J σ_x (τ_x^u + τ_x^r) + q σ_x τ_x]`.
pub fn pair_hamiltonian<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration, t: &SpinConfiguration) -> Result<R> {
    s.check_same(t)?;
    let l = s.side();
    let (mut nb, mut own) = (0i64, 0i64);
    for j in 0..l {
        for i in 0..l {
            let x = sp(s, i, j);
            nb += x * (sp(t, i, (j + 1) % l) + sp(t, (i + 1) % l, j));
            own += x * sp(t, i, j);
        }
    }
    Ok(-(p.coupling * R::lit(nb as f64) + p.self_interaction * R::lit(own as f64)))
}

/// The same quantity written from the target side:
/// `-Σ_x [J τ_x (σ_x^d + σ_x^l) + q σ_x τ_x]`.
pub fn pair_hamiltonian_dual<R: Real>(
    p: &PcaParameters<R>,
    s: &SpinConfiguration,
    t: &SpinConfiguration,
) -> Result<R> {
    s.check_same(t)?;
    let l = s.side();
    let (mut nb, mut own) = (0i64, 0i64);
    for j in 0..l {
        for i in 0..l {
            let y = sp(t, i, j);
            nb += y * (sp(s, i, (j + l - 1) % l) + sp(s, (i + l - 1) % l, j));
            own += y * sp(s, i, j);
        }
    }
    Ok(-(p.coupling * R::lit(nb as f64) + p.self_interaction * R::lit(own as f64)))
}

/// Exponents `(a, b, c)` in `2^{L²} cosh(2J-q)^a cosh(q)^b cosh(2J+q)^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub elbows: usize,
    pub split: usize,
    pub aligned: usize,
}

impl ExponentTriple {
    fn new(elbows: usize, length: usize, sites: usize) -> Self {
        ExponentTriple { elbows, split: length - 2 * elbows, aligned: sites + elbows - length }
    }
}

/// Exponent triples of `Σ_τ e^{-H(σ,τ)}` (down/left elbows) and of
/// `Σ_τ e^{-H(τ,σ)}` (up/right elbows). Weak symmetry is their equality.
pub fn weak_symmetry_exponents(s: &SpinConfiguration) -> (ExponentTriple, ExponentTriple) {
    let st = s.contour_stats();
    let n = s.site_count();
    (ExponentTriple::new(st.n_dl, st.length, n), ExponentTriple::new(st.n_ur, st.length, n))
}

/// `log Z_σ` from contour counts.
pub fn log_z_sigma<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration) -> R {
    let (e, _) = weak_symmetry_exponents(s);
    let two_j = R::lit(2.0) * p.coupling;
    let q = p.self_interaction;
    R::from_count(s.site_count()) * R::LN_2()
        + R::from_count(e.elbows) * log_cosh(two_j - q)
        + R::from_count(e.split) * log_cosh(q)
        + R::from_count(e.aligned) * log_cosh(two_j + q)
}

/// `log Z_σ = Σ_x log(2 cosh h_x)`, `h_x = J(σ_x^d + σ_x^l) + q σ_x`.
pub fn log_z_sigma_site_product<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration) -> R {
    let l = s.side();
    let mut total = R::zero();
    for j in 0..l {
        for i in 0..l {
            let nb = sp(s, i, (j + l - 1) % l) + sp(s, (i + l - 1) % l, j);
            let h = p.coupling * R::lit(nb as f64) + p.self_interaction * R::lit(sp(s, i, j) as f64);
            total = total + R::LN_2() + log_cosh(h);
        }
    }
    total
}

/// `log P(σ, τ) = -H(σ, τ) - log Z_σ`.
pub fn transition_log_prob<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration, t: &SpinConfiguration) -> Result<R> {
    Ok(-pair_hamiltonian(p, s, t)? - log_z_sigma(p, s))
}
