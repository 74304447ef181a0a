//! Simultaneous update of all sites from their down and left neighbours.

use serde::{Deserialize, Serialize};

use super::{PcaParameters, RandomField};
use crate::lattice::Site;
use crate::scalar::{sigmoid, Real};
use crate::spin::SpinConfiguration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateClass {
    /// Aligned neighbours, outcome follows them.
    Typical,
    /// Aligned neighbours, outcome opposes them.
    Atypical,
    /// Split neighbours.
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub site: Site,
    pub step: u64,
    pub class: UpdateClass,
}

/// Probability that the new spin is `+1` given the down neighbour, left
/// neighbour and current spin: `1 / (1 + e^{-2h})` with
/// `h = J (σ^d + σ^l) + q σ`.
pub fn local_prob<R: Real>(p: &PcaParameters<R>, down: i8, left: i8, own: i8) -> R {
    let h = p.coupling * R::lit((down + left) as f64) + p.self_interaction * R::lit(own as f64);
    sigmoid(R::lit(2.0) * h)
}

pub fn classify_event(before: &SpinConfiguration, site: Site, outcome: i8) -> UpdateClass {
    let l = before.side();
    let down = before.get(site.i, (site.j + l - 1) % l);
    let left = before.get((site.i + l - 1) % l, site.j);
    if down != left {
        UpdateClass::Neutral
    } else if (outcome > 0) == down {
        UpdateClass::Typical
    } else {
        UpdateClass::Atypical
    }
}

/// Per-step counts gathered while updating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepTally {
    pub atypical: u32,
    pub neutral: u32,
    /// Sites whose uniform fell outside `(w, 1 - w)` (the band used by the
    /// zero-temperature conditioning).
    pub window_exits: u32,
    /// Lowest site index with an atypical update.
    pub first_atypical: Option<usize>,
}

#[inline]
fn code(down: bool, left: bool, own: bool) -> usize {
    (usize::from(down) << 2) | (usize::from(left) << 1) | usize::from(own)
}

/// Precomputed thresholds for one parameter set.
///
/// Site `x` becomes `+1` iff `U_x(n) <= threshold(σ^d, σ^l, σ_x)`, which is
/// the realization by conditions (A), (B), (C).
#[derive(Debug, Clone)]
pub struct PcaKernel<R> {
    params: PcaParameters<R>,
    thresholds: [R; 8],
    window_edge: R,
}

impl<R: Real> PcaKernel<R> {
    pub fn new(params: PcaParameters<R>) -> Self {
        let sp = |b: bool| if b { 1i8 } else { -1 };
        let mut thresholds = [R::zero(); 8];
        for (k, t) in thresholds.iter_mut().enumerate() {
            *t = local_prob(&params, sp(k & 4 != 0), sp(k & 2 != 0), sp(k & 1 != 0));
        }
        PcaKernel { params, thresholds, window_edge: params.atypical_window() }
    }

    pub fn params(&self) -> &PcaParameters<R> {
        &self.params
    }

    pub fn threshold(&self, down: bool, left: bool, own: bool) -> R {
        self.thresholds[code(down, left, own)]
    }

    /// Update every site of `from` with the step's uniforms (site-index
    /// order) into `to`.
    pub fn advance(&self, from: &SpinConfiguration, to: &mut SpinConfiguration, uniforms: &[R]) -> StepTally {
        let l = from.side();
        debug_assert_eq!(uniforms.len(), l * l);
        if to.side() != l {
            *to = from.clone();
        }
        let lo = self.window_edge;
        let hi = R::one() - lo;
        let mut tally = StepTally::default();
        if from.single_word_rows() {
            let mask = from.mask();
            for j in 0..l {
                let own = from.row(j);
                let down = from.row((j + l - 1) % l);
                let left = ((own << 1) | (own >> (l - 1))) & mask;
                let us = &uniforms[j * l..(j + 1) * l];
                let mut out = 0u64;
                for (i, &u) in us.iter().enumerate() {
                    let c = ((((down >> i) & 1) << 2) | (((left >> i) & 1) << 1) | ((own >> i) & 1)) as usize;
                    out |= u64::from(u <= self.thresholds[c]) << i;
                    tally.window_exits += u32::from(u <= lo || u >= hi);
                }
                let split = (down ^ left) & mask;
                let atypical = !split & (out ^ down) & mask;
                tally.neutral += split.count_ones();
                if atypical != 0 {
                    tally.atypical += atypical.count_ones();
                    if tally.first_atypical.is_none() {
                        tally.first_atypical = Some(j * l + atypical.trailing_zeros() as usize);
                    }
                }
                to.set_row(j, out);
            }
        } else {
            for j in 0..l {
                for i in 0..l {
                    let down = from.get(i, (j + l - 1) % l);
                    let left = from.get((i + l - 1) % l, j);
                    let u = uniforms[j * l + i];
                    let plus = u <= self.thresholds[code(down, left, from.get(i, j))];
                    to.set(i, j, plus);
                    tally.window_exits += u32::from(u <= lo || u >= hi);
                    if down != left {
                        tally.neutral += 1;
                    } else if plus != down {
                        tally.atypical += 1;
                        tally.first_atypical.get_or_insert(j * l + i);
                    }
                }
            }
        }
        tally
    }

    /// One step driven by `field` at step index `step`.
    pub fn step(&self, from: &SpinConfiguration, field: &RandomField, step: u64) -> (SpinConfiguration, StepTally) {
        let mut buf = vec![R::zero(); from.site_count()];
        field.fill(step, &mut buf);
        let mut to = from.clone();
        let t = self.advance(from, &mut to, &buf);
        (to, t)
    }
}

/// One parallel step with the full per-site event list.
pub fn pca_step<R: Real>(
    params: &PcaParameters<R>,
    s: &SpinConfiguration,
    field: &RandomField,
    step: u64,
) -> (SpinConfiguration, Vec<UpdateEvent>) {
    let kernel = PcaKernel::new(*params);
    let (next, _) = kernel.step(s, field, step);
    let l = s.side();
    let events = (0..l * l)
        .map(|k| {
            let site = Site::new(k % l, k / l);
            let outcome = if next.at(site) { 1 } else { -1 };
            UpdateEvent { site, step, class: classify_event(s, site, outcome) }
        })
        .collect();
    (next, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusGeometry;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(j: f64, q: f64) -> PcaParameters<f64> {
        PcaParameters::new(j, q).unwrap()
    }

    #[test]
    fn local_prob_examples() {
        assert_eq!(local_prob(&p(0.0, 0.0), 1, -1, 1), 0.5);
        assert_eq!(local_prob(&p(1.7, 0.0), 1, -1, -1), 0.5);
        assert_eq!(local_prob(&p(1.7, 0.0), -1, 1, 1), 0.5);
        // 2J + q = ln 3
        let q = 0.2;
        let j = (3f64.ln() - q) / 2.0;
        assert!((local_prob(&p(j, q), 1, 1, 1) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn local_prob_matches_product_form_definition() {
        let pp = p(0.8, 0.3);
        for d in [-1i8, 1] {
            for l in [-1i8, 1] {
                for o in [-1i8, 1] {
                    let h = 0.8 * (d + l) as f64 + 0.3 * o as f64;
                    let direct = h.exp() / (2.0 * h.cosh());
                    assert!((local_prob(&pp, d, l, o) - direct).abs() < 1e-15);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn normalization_and_stability(j in 0.0f64..1e4, q in 0.0f64..10.0, d in prop::bool::ANY, l in prop::bool::ANY, o in prop::bool::ANY) {
            let sp = |b: bool| if b { 1i8 } else { -1 };
            let pp = p(j, q);
            let plus = local_prob(&pp, sp(d), sp(l), sp(o));
            let minus = local_prob(&pp, -sp(d), -sp(l), -sp(o));
            prop_assert!(plus.is_finite() && (0.0..=1.0).contains(&plus));
            // P(+1 | σ) + P(-1 | σ) = 1: the -1 outcome under σ has the +1 probability under -σ
            prop_assert!((plus + minus - 1.0).abs() < 1e-15);
            let p32 = PcaParameters::new(j as f32, q as f32).unwrap();
            let v = local_prob(&p32, sp(d), sp(l), sp(o));
            prop_assert!(v.is_finite() && (0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn classification() {
        let g = TorusGeometry::new(4).unwrap();
        let plus = SpinConfiguration::all_plus(&g);
        let x = Site::new(1, 1);
        assert_eq!(classify_event(&plus, x, 1), UpdateClass::Typical);
        assert_eq!(classify_event(&plus, x, -1), UpdateClass::Atypical);
        let split = plus.flip_at(Site::new(1, 0));
        assert_eq!(classify_event(&split, x, 1), UpdateClass::Neutral);
        assert_eq!(classify_event(&split, x, -1), UpdateClass::Neutral);
    }

    #[test]
    fn window_makes_diagonal_motion_rigid() {
        let g = TorusGeometry::new(9).unwrap();
        let pp = p(2.0, 0.3);
        let field = RandomField::conditioned(4, pp.atypical_window());
        let xi = [1, 1, -1, 1, -1, -1, -1, 1, -1];
        let mut s = SpinConfiguration::from_diagonals(&g, &xi);
        for n in 1..200 {
            let (next, events) = pca_step(&pp, &s, &field, n);
            assert_eq!(next, s.horizontal_shift(1));
            assert!(events.iter().all(|e| e.class == UpdateClass::Typical));
            s = next;
        }
    }

    #[test]
    fn small_uniforms_keep_all_plus() {
        let g = TorusGeometry::new(5).unwrap();
        let k = PcaKernel::new(p(0.4, 0.1));
        let plus = SpinConfiguration::all_plus(&g);
        let mut to = plus.clone();
        let t = k.advance(&plus, &mut to, &vec![1e-9; 25]);
        assert_eq!(to, plus);
        assert_eq!(t.atypical, 0);
    }

    #[test]
    fn fast_and_fallback_paths_agree() {
        // L = 65 uses the multi-word path; compare with a per-site recomputation
        let g = TorusGeometry::new(65).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SpinConfiguration::random(&g, &mut rng);
        let pp = p(0.7, 0.2);
        let field = RandomField::new(8);
        let (next, events) = pca_step(&pp, &s, &field, 3);
        for x in g.sites() {
            let down = s.spin(g.neighbor(x, crate::lattice::Direction::Down));
            let left = s.spin(g.neighbor(x, crate::lattice::Direction::Left));
            let u = field.uniform(g.index(x), 3);
            assert_eq!(next.at(x), u <= local_prob(&pp, down, left, s.spin(x)));
        }
        let k = PcaKernel::new(pp);
        let (_, t) = k.step(&s, &field, 3);
        let at = events.iter().filter(|e| e.class == UpdateClass::Atypical).count();
        let ne = events.iter().filter(|e| e.class == UpdateClass::Neutral).count();
        assert_eq!((t.atypical as usize, t.neutral as usize), (at, ne));
        // single-word path on L = 64
        let g64 = TorusGeometry::new(64).unwrap();
        let s64 = SpinConfiguration::random(&g64, &mut rng);
        let (n64, ev64) = pca_step(&pp, &s64, &field, 9);
        let (_, t64) = k.step(&s64, &field, 9);
        assert_eq!(t64.atypical as usize, ev64.iter().filter(|e| e.class == UpdateClass::Atypical).count());
        let first = ev64.iter().position(|e| e.class == UpdateClass::Atypical);
        assert_eq!(t64.first_atypical, first);
        for x in g64.sites() {
            let down = s64.spin(g64.neighbor(x, crate::lattice::Direction::Down));
            let left = s64.spin(g64.neighbor(x, crate::lattice::Direction::Left));
            assert_eq!(n64.at(x), field.uniform(g64.index(x), 9) <= local_prob(&pp, down, left, s64.spin(x)));
        }
    }

    #[test]
    fn empirical_marginal_matches_local_prob() {
        let g = TorusGeometry::new(3).unwrap();
        let pp = p(1.0, 0.1);
        let k = PcaKernel::new(pp);
        let field = RandomField::new(2024);
        let s = SpinConfiguration::from_code(&g, 0b101_100_011);
        let n = 100_000u64;
        let mut counts = [0u64; 9];
        let mut buf = vec![0.0; 9];
        let mut to = s.clone();
        for step in 1..=n {
            field.fill(step, &mut buf);
            k.advance(&s, &mut to, &buf);
            for (idx, c) in counts.iter_mut().enumerate() {
                *c += u64::from(to.get_index(idx));
            }
        }
        for x in g.sites() {
            let down = s.spin(g.neighbor(x, crate::lattice::Direction::Down));
            let left = s.spin(g.neighbor(x, crate::lattice::Direction::Left));
            let pr = local_prob(&pp, down, left, s.spin(x));
            let freq = counts[g.index(x)] as f64 / n as f64;
            let se = (pr * (1.0 - pr) / n as f64).sqrt();
            assert!((freq - pr).abs() <= 4.0 * se, "site {x:?}: {freq} vs {pr}");
        }
    }
}
