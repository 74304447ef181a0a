//! Sequential Metropolis dynamics for the Ising Hamiltonian
//! `H(σ) = -J Σ_{bonds} σ_x σ_y`, the reversible baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PcaParameters;
use crate::error::Result;
use crate::lattice::{Site, TorusGeometry};
use crate::scalar::Real;
use crate::spin::SpinConfiguration;

/// Ising energy, one term per bond label (`2 L²` of them).
pub fn ising_energy<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration) -> R {
    let l = s.side();
    let mut sum = 0i64;
    for j in 0..l {
        for i in 0..l {
            let x = s.get(i, j);
            sum += if x == s.get(i, (j + 1) % l) { 1 } else { -1 };
            sum += if x == s.get((i + 1) % l, j) { 1 } else { -1 };
        }
    }
    -p.coupling * R::lit(sum as f64)
}

/// Number of the four neighbours of `x` that agree with `σ_x`.
fn agreeing_neighbors(s: &SpinConfiguration, x: Site) -> usize {
    let l = s.side();
    let v = s.at(x);
    [
        s.get(x.i, (x.j + 1) % l),
        s.get((x.i + 1) % l, x.j),
        s.get(x.i, (x.j + l - 1) % l),
        s.get((x.i + l - 1) % l, x.j),
    ]
    .into_iter()
    .filter(|&n| n == v)
    .count()
}

/// `min(1, e^{-ΔH})` for flipping `x`, `ΔH = 2J σ_x Σ_{y~x} σ_y`.
pub fn glauber_acceptance<R: Real>(p: &PcaParameters<R>, s: &SpinConfiguration, x: Site) -> R {
    let agree = agreeing_neighbors(s, x) as i64;
    let dh = R::lit((2 * (2 * agree - 4)) as f64) * p.coupling;
    (-dh).exp().min(R::one())
}

/// Flip `x` in place iff `u < acceptance`. Returns whether it flipped.
pub fn glauber_update<R: Real>(p: &PcaParameters<R>, s: &mut SpinConfiguration, x: Site, u: R) -> bool {
    let flip = u < glauber_acceptance(p, s, x);
    if flip {
        s.flip_in_place(x);
    }
    flip
}

/// One Metropolis update at a uniformly chosen site.
pub fn glauber_step<R: Real, G: Rng + ?Sized>(
    p: &PcaParameters<R>,
    s: &SpinConfiguration,
    rng: &mut G,
) -> SpinConfiguration {
    let l = s.side();
    let x = Site::new(rng.random_range(0..l), rng.random_range(0..l));
    let mut out = s.clone();
    glauber_update(p, &mut out, x, R::lit(rng.random::<f64>()));
    out
}

/// Metropolis sampler with the five acceptance values tabulated, for long runs.
#[derive(Debug, Clone)]
pub struct GlauberSampler {
    // indexed by the number of agreeing neighbours
    acceptance: [f64; 5],
}

impl GlauberSampler {
    pub fn new<R: Real>(p: &PcaParameters<R>) -> Self {
        let j = p.coupling.to_f64_lossy();
        let mut acceptance = [0.0; 5];
        for (agree, a) in acceptance.iter_mut().enumerate() {
            *a = (-(2.0 * (2.0 * agree as f64 - 4.0)) * j).exp().min(1.0);
        }
        GlauberSampler { acceptance }
    }

    /// One update in place; returns whether a spin flipped.
    pub fn update<G: Rng + ?Sized>(&self, s: &mut SpinConfiguration, rng: &mut G) -> bool {
        let l = s.side();
        let x = Site::new(rng.random_range(0..l), rng.random_range(0..l));
        self.update_at(s, x, rng)
    }

    /// Metropolis update of the given site.
    pub fn update_at<G: Rng + ?Sized>(&self, s: &mut SpinConfiguration, x: Site, rng: &mut G) -> bool {
        let a = self.acceptance[agreeing_neighbors(s, x)];
        let flip = a >= 1.0 || rng.random::<f64>() < a;
        if flip {
            s.flip_in_place(x);
        }
        flip
    }
}

/// Single-site updates from `−𝟏` until `𝟏`, `None` past `budget`.
pub fn glauber_tunneling_time<R: Real>(p: &PcaParameters<R>, side: usize, seed: u64, budget: u64) -> Result<Option<u64>> {
    let g = TorusGeometry::new(side)?;
    let sampler = GlauberSampler::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SpinConfiguration::all_minus(&g);
    let mut plus = 0usize;
    let n = g.site_count();
    for t in 1..=budget {
        let x = Site::new(rng.random_range(0..side), rng.random_range(0..side));
        if sampler.update_at(&mut s, x, &mut rng) {
            if s.at(x) {
                plus += 1;
                if plus == n {
                    return Ok(Some(t));
                }
            } else {
                plus -= 1;
            }
        }
    }
    Ok(None)
}
