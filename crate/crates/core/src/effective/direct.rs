//! Direct simulation of the PCA around the diagonal set, for comparison
//! with the walk and the effective chain.

use serde::{Deserialize, Serialize};

use crate::coupling::Chain;
use crate::error::{Error, Result};
use crate::kernel::{derive_seed, PcaParameters, RandomField};
use crate::lattice::{Site, TorusGeometry};
use crate::scalar::Real;
use crate::spin::SpinConfiguration;

/// Diagonal configuration `ξ` with the spin at `x` flipped.
pub fn single_discrepancy_start(g: &TorusGeometry, xi: &[i8], x: Site) -> SpinConfiguration {
    let mut s = SpinConfiguration::from_diagonals(g, xi);
    s.flip_in_place(x);
    s
}

/// Zero-temperature excursion of a single discrepancy observed in the
/// moving frame `η(n) = θ^{−n} σ(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectExcursion {
    pub home: usize,
    pub favorable: bool,
    /// `0` or `L`, `None` when the budget ran out.
    pub absorbed_at: Option<usize>,
    pub duration: u64,
    /// Steps at which the defect set was not one arc growing or shrinking
    /// by at most one site at its ends.
    pub arc_violations: u64,
    /// Steps at which a diagonal other than the home one changed.
    pub frame_violations: u64,
}

/// Spin at column `c` of diagonal `m` of `η(n)`.
#[inline]
fn eta(s: &SpinConfiguration, n: u64, m: usize, c: usize) -> bool {
    let l = s.side();
    s.get((c + (n % l as u64) as usize) % l, (m + l - c) % l)
}

/// Whether the cyclic membership pattern is a single arc (or empty/full).
fn is_arc(member: &[bool]) -> bool {
    let l = member.len();
    (0..l).filter(|&c| member[c] != member[(c + 1) % l]).count() <= 2
}

/// Run the zero-temperature dynamics from a configuration with a single
/// discrepancy until it returns to the diagonal set.
pub fn direct_excursion<R: Real>(
    p: &PcaParameters<R>,
    start: &SpinConfiguration,
    seed: u64,
    budget: u64,
) -> Result<DirectExcursion> {
    let g = TorusGeometry::new(start.side())?;
    let l = g.side();
    let (x, home) = start.single_discrepancy(&g).ok_or(Error::NotDiagonal)?;
    let spin = start.at(x);
    let xi: Vec<bool> = (0..l)
        .map(|k| if k == home { !spin } else { start.diagonal_value(k).expect("single defect") })
        .collect();
    let favorable = xi[(home + 1) % l] == spin;
    let mut chain = Chain::conditioned(*p, start.clone(), seed)?;
    let mut member = vec![false; l];
    member[x.i] = true;
    let mut size = 1usize;
    let mut next = vec![false; l];
    let mut out = DirectExcursion {
        home,
        favorable,
        absorbed_at: None,
        duration: 0,
        arc_violations: 0,
        frame_violations: 0,
    };
    while chain.step() < budget {
        chain.advance();
        let n = chain.step();
        let s = chain.state();
        let frame_ok = (0..l).filter(|&k| k != home).all(|k| (0..l).all(|c| eta(s, n, k, c) == xi[k]));
        if !frame_ok {
            out.frame_violations += 1;
        }
        for (c, v) in next.iter_mut().enumerate() {
            *v = eta(s, n, home, c) == spin;
        }
        let new_size = next.iter().filter(|&&v| v).count();
        let fed = (0..l).all(|c| !next[c] || member[c] || member[(c + 1) % l]);
        if !is_arc(&next) || !fed || new_size.abs_diff(size) > 1 {
            out.arc_violations += 1;
        }
        std::mem::swap(&mut member, &mut next);
        size = new_size;
        if size == 0 || size == l {
            out.absorbed_at = Some(size);
            out.duration = n;
            return Ok(out);
        }
    }
    out.duration = budget;
    Ok(out)
}

/// Result of one renormalized step simulated directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RenormalizedOutcome {
    /// `ξ(1) = ξ`.
    Stay,
    /// `ξ(1)` differs from `ξ` in diagonal `m` only.
    Flip(usize),
    /// Any other diagonal configuration.
    Other,
    /// More than one atypical update at the first atypical step; excluded
    /// from the zero-temperature law.
    Rejected,
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectStep {
    pub outcome: RenormalizedOutcome,
    /// First step with an atypical update.
    pub s: Option<u64>,
    /// First return to the diagonal set after `S`.
    pub r: Option<u64>,
}

/// Simulate `ξ(1)` from the diagonal configuration `ξ`: run the PCA until
/// the first atypical update, then either the zero-temperature dynamics
/// (`zero_temperature`) or the unconditioned one until the configuration
/// is diagonal again, and read `ξ(1)` in the moving frame.
pub fn direct_renormalized_step<R: Real>(
    p: &PcaParameters<R>,
    xi: &[i8],
    seed: u64,
    budget: u64,
    zero_temperature: bool,
) -> Result<DirectStep> {
    let g = TorusGeometry::new(xi.len())?;
    let start = SpinConfiguration::from_diagonals(&g, xi);
    let mut chain = Chain::new(*p, start, RandomField::new(seed));
    let mut out = DirectStep { outcome: RenormalizedOutcome::Censored, s: None, r: None };
    let s_step = loop {
        if chain.step() >= budget {
            return Ok(out);
        }
        let tally = chain.advance();
        if tally.atypical > 0 {
            if zero_temperature && tally.atypical > 1 {
                out.s = Some(chain.step());
                out.outcome = RenormalizedOutcome::Rejected;
                return Ok(out);
            }
            break chain.step();
        }
    };
    out.s = Some(s_step);
    let mut walker = if zero_temperature {
        Chain::conditioned(*p, chain.state().clone(), derive_seed(seed, 1))?
    } else {
        chain
    };
    let offset = if zero_temperature { s_step } else { 0 };
    loop {
        let n = walker.step() + offset;
        if walker.state().in_diagonal_set() {
            let eta = walker.state().horizontal_shift(-(n as i64));
            let next = eta.is_diagonal().expect("checked");
            out.r = Some(n);
            let diff: Vec<usize> = (0..xi.len()).filter(|&m| next[m] != xi[m]).collect();
            out.outcome = match diff.as_slice() {
                [] => RenormalizedOutcome::Stay,
                [m] => RenormalizedOutcome::Flip(*m),
                _ => RenormalizedOutcome::Other,
            };
            return Ok(out);
        }
        if n >= budget {
            return Ok(out);
        }
        walker.advance();
    }
}
