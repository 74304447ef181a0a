use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sigmoid, Real};

/// Low-temperature regime constants: `J = k ln L`, `q = c ln L / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime<R> {
    pub k: R,
    pub c: R,
    pub side: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaParameters<R> {
    /// Nearest-neighbour coupling `J >= 0`.
    pub coupling: R,
    /// Self-interaction `q >= 0`.
    pub self_interaction: R,
    pub regime: Option<Regime<R>>,
}

impl<R: Real> PcaParameters<R> {
    pub fn new(coupling: R, self_interaction: R) -> Result<Self> {
        let ok = |v: R| v.is_finite() && v >= R::zero();
        if !ok(coupling) || !ok(self_interaction) {
            return Err(Error::InvalidParameters(format!(
                "J and q must be finite and non-negative (J={coupling}, q={self_interaction})"
            )));
        }
        Ok(PcaParameters { coupling, self_interaction, regime: None })
    }

    pub fn from_regime(k: R, c: R, side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidGeometry(side));
        }
        let ln_l = R::from_count(side).ln();
        let mut p = Self::new(k * ln_l, c * ln_l / R::from_count(side))?;
        p.regime = Some(Regime { k, c, side });
        Ok(p)
    }

    /// `δ = e^{-2q}`.
    pub fn delta(&self) -> R {
        (-R::lit(2.0) * self.self_interaction).exp()
    }

    /// Half-width of the excluded band in the zero-temperature conditioning:
    /// `e^{-2J+q} / (2 cosh(2J - q)) = 1 / (1 + e^{4J - 2q})`.
    pub fn atypical_window(&self) -> R {
        sigmoid(R::lit(2.0) * self.self_interaction - R::lit(4.0) * self.coupling)
    }

    /// Probability of an atypical update at a site with aligned down/left
    /// neighbours, given `own * neighbour` (the product of the site spin with
    /// the common neighbour spin): `1 / (1 + e^{4J + 2q·own·nbr})`.
    pub fn atypical_probability(&self, own_times_neighbor: i8) -> R {
        let s = R::lit(own_times_neighbor as f64);
        sigmoid(-(R::lit(4.0) * self.coupling + R::lit(2.0) * self.self_interaction * s))
    }

    /// Whether the conditioned (no atypical update) dynamics is well defined.
    pub fn window_is_proper(&self) -> bool {
        self.atypical_window() < R::lit(0.5)
    }

    pub fn cast<S: Real>(&self) -> PcaParameters<S> {
        let c = |v: R| S::lit(v.to_f64_lossy());
        PcaParameters {
            coupling: c(self.coupling),
            self_interaction: c(self.self_interaction),
            regime: self.regime.map(|r| Regime { k: c(r.k), c: c(r.c), side: r.side }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_resolution() {
        let p = PcaParameters::from_regime(2.0_f64, 3.0, 10).unwrap();
        assert!((p.coupling - 2.0 * 10f64.ln()).abs() < 1e-14);
        assert!((p.self_interaction - 0.3 * 10f64.ln()).abs() < 1e-14);
        assert_eq!(p.regime.unwrap().side, 10);
    }

    #[test]
    fn rejects_negative() {
        assert!(PcaParameters::new(-1.0_f64, 0.0).is_err());
        assert!(PcaParameters::new(1.0_f64, f64::NAN).is_err());
    }

    #[test]
    fn window_width() {
        let p = PcaParameters::new(1.1_f64, 0.3).unwrap();
        let (j, q) = (1.1_f64, 0.3);
        let direct = (-2.0 * j + q).exp() / (2.0 * (2.0 * j - q).cosh());
        assert!((p.atypical_window() - direct).abs() < 1e-15);
        assert!(p.window_is_proper());
        assert!(!PcaParameters::new(0.0_f64, 0.0).unwrap().window_is_proper());
        // aligned-minus site with plus spin has exactly the window width
        assert!((p.atypical_probability(-1) - p.atypical_window()).abs() < 1e-15);
        assert!(p.atypical_probability(1) < p.atypical_window());
    }
}
