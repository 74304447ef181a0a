//! Peierls contour statistics.

use serde::{Deserialize, Serialize};

use super::SpinConfiguration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourStats {
    /// `l(σ)`: number of bonds with unequal endpoint spins.
    pub length: usize,
    /// Sites whose up and right bonds both lie on the contour.
    pub n_ur: usize,
    /// Sites whose down and left bonds both lie on the contour.
    pub n_dl: usize,
    pub n_plus: usize,
    /// Bonds lying on complete diagonal staircases (`γ_D`).
    pub diagonal_part_size: usize,
    /// `l(σ) - |γ_D|`.
    pub nondiagonal_part_size: usize,
}

impl ContourStats {
    /// `l - 2 n_ur`: contour bonds not covered by an ur-elbow.
    pub fn unpaired_bonds(&self) -> usize {
        self.length - 2 * self.n_ur
    }
}

/// Diagonals `m` whose whole staircase `{x, x^u}, {x, x^r}` (`x ∈ D_m`) lies
/// on the contour. Each such block contributes `2L` bonds to `γ_D`.
///
/// The staircase between `D_m` and `D_{m+1}` is fully on the contour exactly
/// when both diagonals are constant with opposite spins.
pub fn diagonal_bond_blocks(s: &SpinConfiguration) -> Vec<usize> {
    let l = s.side();
    let values: Vec<Option<bool>> = (0..l).map(|m| s.diagonal_value(m)).collect();
    (0..l)
        .filter(|&m| match (values[m], values[(m + 1) % l]) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        })
        .collect()
}

impl SpinConfiguration {
    pub fn contour_stats(&self) -> ContourStats {
        let l = self.side();
        let (mut length, mut n_ur, mut n_dl) = (0usize, 0usize, 0usize);
        if self.single_word_rows() {
            let mask = self.mask();
            let right = |r: u64| ((r >> 1) | (r << (l - 1))) & mask;
            let left = |r: u64| ((r << 1) | (r >> (l - 1))) & mask;
            // bit i of horiz[j]: bond {(i,j),(i+1,j)}; of vert[j]: {(i,j),(i,j+1)}
            let horiz: Vec<u64> = (0..l).map(|j| self.row(j) ^ right(self.row(j))).collect();
            let vert: Vec<u64> = (0..l).map(|j| self.row(j) ^ self.row((j + 1) % l)).collect();
            for j in 0..l {
                length += (horiz[j].count_ones() + vert[j].count_ones()) as usize;
                n_ur += (horiz[j] & vert[j]).count_ones() as usize;
                n_dl += (vert[(j + l - 1) % l] & left(horiz[j])).count_ones() as usize;
            }
        } else {
            for j in 0..l {
                for i in 0..l {
                    let x = self.get(i, j);
                    let up = x != self.get(i, (j + 1) % l);
                    let rt = x != self.get((i + 1) % l, j);
                    let dn = x != self.get(i, (j + l - 1) % l);
                    let lf = x != self.get((i + l - 1) % l, j);
                    length += usize::from(up) + usize::from(rt);
                    n_ur += usize::from(up && rt);
                    n_dl += usize::from(dn && lf);
                }
            }
        }
        let diagonal_part_size = 2 * l * diagonal_bond_blocks(self).len();
        ContourStats {
            length,
            n_ur,
            n_dl,
            n_plus: self.n_plus(),
            diagonal_part_size,
            nondiagonal_part_size: length - diagonal_part_size,
        }
    }
}
