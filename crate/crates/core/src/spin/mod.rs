//! Bit-packed spin configurations on the torus.
//!
//! Bit value 1 is spin `+1`, bit 0 is spin `-1`. Each row occupies
//! `ceil(L / 64)` words; for `L <= 64` a row is a single word and the row
//! kernels below run as word operations.

mod contour;
mod reweight;
mod text;

pub use contour::{diagonal_bond_blocks, ContourStats};
pub use reweight::{log_f, log_f_site_product, ReweightingValue};

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Site, TorusGeometry};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    side: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

#[inline]
fn row_mask(side: usize) -> u64 {
    if side >= 64 {
        u64::MAX
    } else {
        (1u64 << side) - 1
    }
}

impl SpinConfiguration {
    fn filled(side: usize, plus: bool) -> Self {
        let words_per_row = side.div_ceil(64);
        let mut s = SpinConfiguration {
            side,
            words_per_row,
            bits: vec![if plus { u64::MAX } else { 0 }; side * words_per_row],
        };
        s.clear_padding();
        s
    }

    pub fn all_plus(g: &TorusGeometry) -> Self {
        Self::filled(g.side(), true)
    }

    pub fn all_minus(g: &TorusGeometry) -> Self {
        Self::filled(g.side(), false)
    }

    pub fn from_fn(g: &TorusGeometry, mut plus: impl FnMut(Site) -> bool) -> Self {
        let mut s = Self::all_minus(g);
        for x in g.sites() {
            if plus(x) {
                s.set(x.i, x.j, true);
            }
        }
        s
    }

    /// Uniformly random configuration.
    pub fn random<G: Rng + ?Sized>(g: &TorusGeometry, rng: &mut G) -> Self {
        let mut s = Self::all_minus(g);
        for w in s.bits.iter_mut() {
            *w = rng.random();
        }
        s.clear_padding();
        s
    }

    fn clear_padding(&mut self) {
        let tail = self.side % 64;
        if tail == 0 {
            return;
        }
        let mask = (1u64 << tail) - 1;
        for j in 0..self.side {
            self.bits[j * self.words_per_row + self.words_per_row - 1] &= mask;
        }
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn site_count(&self) -> usize {
        self.side * self.side
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.side != other.side {
            return Err(Error::GeometryMismatch(self.side, other.side));
        }
        Ok(())
    }

    /// `true` when the spin at column `i`, row `j` is `+1`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let w = self.bits[j * self.words_per_row + i / 64];
        (w >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, plus: bool) {
        let w = &mut self.bits[j * self.words_per_row + i / 64];
        let b = 1u64 << (i % 64);
        if plus {
            *w |= b;
        } else {
            *w &= !b;
        }
    }

    #[inline]
    pub fn at(&self, x: Site) -> bool {
        self.get(x.i, x.j)
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> bool {
        self.get(index % self.side, index / self.side)
    }

    /// Spin value as `+1` / `-1`.
    #[inline]
    pub fn spin(&self, x: Site) -> i8 {
        if self.at(x) {
            1
        } else {
            -1
        }
    }

    pub fn flip_in_place(&mut self, x: Site) {
        let w = &mut self.bits[x.j * self.words_per_row + x.i / 64];
        *w ^= 1u64 << (x.i % 64);
    }

    /// `σ^x`: the configuration with the spin at `x` reversed.
    pub fn flip_at(&self, x: Site) -> Self {
        let mut s = self.clone();
        s.flip_in_place(x);
        s
    }

    pub fn n_plus(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_plus(&self) -> bool {
        self.n_plus() == self.site_count()
    }

    pub fn is_all_minus(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Componentwise order: `σ_x <= σ'_x` at every site.
    pub fn leq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.side, other.side);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Componentwise maximum, used to build ordered pairs.
    pub fn join(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (a, b) in s.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        s
    }

    /// Row `j` as a single word. Only valid for `L <= 64`.
    #[inline]
    pub(crate) fn row(&self, j: usize) -> u64 {
        debug_assert_eq!(self.words_per_row, 1);
        self.bits[j]
    }

    #[inline]
    pub(crate) fn set_row(&mut self, j: usize, w: u64) {
        debug_assert_eq!(self.words_per_row, 1);
        self.bits[j] = w;
    }

    #[inline]
    pub(crate) fn single_word_rows(&self) -> bool {
        self.words_per_row == 1
    }

    pub(crate) fn mask(&self) -> u64 {
        row_mask(self.side)
    }

    /// Canonical code: bit `i + L*j` holds site `(i, j)`. Requires `L^2 <= 64`.
    pub fn code(&self) -> u64 {
        assert!(self.side * self.side <= 64, "code needs L^2 <= 64");
        let mut c = 0u64;
        for j in 0..self.side {
            c |= self.bits[j] << (self.side * j);
        }
        c
    }

    pub fn from_code(g: &TorusGeometry, code: u64) -> Self {
        let l = g.side();
        assert!(l * l <= 64, "code needs L^2 <= 64");
        let mut s = Self::all_minus(g);
        for j in 0..l {
            s.bits[j] = (code >> (l * j)) & row_mask(l);
        }
        s
    }

    /// `θ^n σ`, the configuration after `n` typical (rigid) steps: every
    /// spin pattern moves `n` columns to the right, so `(θσ)_x = σ_{x^l}`.
    /// Negative `n` shifts back.
    pub fn horizontal_shift(&self, n: i64) -> Self {
        let l = self.side as i64;
        let k = n.rem_euclid(l) as usize;
        if k == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        if self.single_word_rows() {
            let mask = self.mask();
            let l = self.side;
            for j in 0..l {
                let r = self.row(j);
                out.set_row(j, ((r << k) | (r >> (l - k))) & mask);
            }
        } else {
            for j in 0..self.side {
                for i in 0..self.side {
                    out.set((i + k) % self.side, j, self.get(i, j));
                }
            }
        }
        out
    }

    /// Whether `self == prev.horizontal_shift(1)`, without allocating.
    pub fn is_shift_of(&self, prev: &Self) -> bool {
        if self.side != prev.side {
            return false;
        }
        let l = self.side;
        if self.single_word_rows() {
            let mask = self.mask();
            (0..l).all(|j| {
                let r = prev.row(j);
                self.row(j) == ((r << 1) | (r >> (l - 1))) & mask
            })
        } else {
            (0..l).all(|j| (0..l).all(|i| self.get((i + 1) % l, j) == prev.get(i, j)))
        }
    }

    /// Spin of diagonal `D_m` if that diagonal is constant.
    pub fn diagonal_value(&self, m: usize) -> Option<bool> {
        let l = self.side;
        let first = self.get(0, m % l);
        (1..l).all(|i| self.get(i, (m + l - i) % l) == first).then_some(first)
    }

    /// Whether the configuration is constant on every NW-SE diagonal.
    ///
    /// Sites `(i, j+1)` and `(i+1, j)` share a diagonal, so the test is
    /// `row(j+1) == row(j) >> 1` (cyclically) for every row.
    pub fn in_diagonal_set(&self) -> bool {
        let l = self.side;
        if self.single_word_rows() {
            let mask = self.mask();
            (0..l).all(|j| {
                let r = self.row(j);
                let right = ((r >> 1) | (r << (l - 1))) & mask;
                self.row((j + 1) % l) == right
            })
        } else {
            (0..l).all(|j| (0..l).all(|i| self.get(i, (j + 1) % l) == self.get((i + 1) % l, j)))
        }
    }

    /// Diagonal spins `ξ` (index `m` holds the spin of `D_m`) if the
    /// configuration is diagonal.
    pub fn is_diagonal(&self) -> Option<Vec<i8>> {
        if !self.in_diagonal_set() {
            return None;
        }
        Some(
            (0..self.side)
                .map(|m| if self.get(0, m) { 1 } else { -1 })
                .collect(),
        )
    }

    /// Configuration that is constant on diagonals with the given spins.
    pub fn from_diagonals(g: &TorusGeometry, xi: &[i8]) -> Self {
        assert_eq!(xi.len(), g.side());
        Self::from_fn(g, |x| xi[g.diagonal_index(x)] > 0)
    }

    /// The defect site and its diagonal when the configuration is diagonal
    /// except for exactly one site.
    pub fn single_discrepancy(&self, g: &TorusGeometry) -> Option<(Site, usize)> {
        let l = self.side;
        if l < 3 {
            // with two sites per diagonal a lone defect has no majority
            return None;
        }
        let mut found = None;
        for m in 0..l {
            let plus = g.diagonal_sites(m).filter(|&x| self.at(x)).count();
            let minority = plus.min(l - plus);
            match minority {
                0 => {}
                1 if found.is_none() => {
                    let odd_is_plus = plus == 1;
                    let x = g.diagonal_sites(m).find(|&x| self.at(x) == odd_is_plus)?;
                    found = Some((x, m));
                }
                _ => return None,
            }
        }
        found
    }
}

impl std::fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "SpinConfiguration(L={})", self.side)?;
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(l: usize) -> TorusGeometry {
        TorusGeometry::new(l).unwrap()
    }

    #[test]
    fn constructors() {
        let g3 = g(3);
        assert_eq!(SpinConfiguration::all_plus(&g3).n_plus(), 9);
        assert_eq!(SpinConfiguration::all_minus(&g3).n_plus(), 0);
        let x = Site::new(1, 2);
        let s = SpinConfiguration::all_plus(&g3).flip_at(x);
        assert_eq!(s.n_plus(), 8);
        assert_eq!(s.flip_at(x), SpinConfiguration::all_plus(&g3));
    }

    #[test]
    fn wide_lattice_padding() {
        let g70 = g(70);
        let s = SpinConfiguration::all_plus(&g70);
        assert_eq!(s.n_plus(), 4900);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = SpinConfiguration::random(&g70, &mut rng);
        assert!(r.n_plus() <= 4900);
        assert!(r.leq(&s));
    }

    #[test]
    fn order_examples() {
        let g4 = g(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bottom = SpinConfiguration::all_minus(&g4);
        let top = SpinConfiguration::all_plus(&g4);
        for _ in 0..50 {
            let s = SpinConfiguration::random(&g4, &mut rng);
            assert!(bottom.leq(&s));
            assert!(s.leq(&top));
        }
        let a = bottom.flip_at(Site::new(0, 0));
        let b = bottom.flip_at(Site::new(1, 0));
        assert!(!a.leq(&b) && !b.leq(&a));
    }

    #[test]
    fn diagonal_detection() {
        let g5 = g(5);
        assert_eq!(SpinConfiguration::all_minus(&g5).is_diagonal(), Some(vec![-1; 5]));
        let d0 = SpinConfiguration::from_fn(&g5, |x| g5.diagonal_index(x) == 0);
        assert_eq!(d0.is_diagonal(), Some(vec![1, -1, -1, -1, -1]));
        let defect = SpinConfiguration::all_minus(&g5).flip_at(Site::new(2, 2));
        assert_eq!(defect.is_diagonal(), None);
        for l in [3usize, 7, 66] {
            let gl = g(l);
            let xi: Vec<i8> = (0..l).map(|m| if m % 3 == 1 { 1 } else { -1 }).collect();
            let s = SpinConfiguration::from_diagonals(&gl, &xi);
            assert_eq!(s.is_diagonal(), Some(xi.clone()));
            assert!(s.flip_at(Site::new(1, 1)).is_diagonal().is_none());
        }
    }

    #[test]
    fn discrepancy_detection() {
        let g5 = g(5);
        let minus = SpinConfiguration::all_minus(&g5);
        let x = Site::new(3, 4);
        assert_eq!(minus.flip_at(x).single_discrepancy(&g5), Some((x, g5.diagonal_index(x))));
        assert_eq!(minus.single_discrepancy(&g5), None);
        // two defects on D_2
        let two = minus.flip_at(Site::new(0, 2)).flip_at(Site::new(1, 1));
        assert_eq!(two.single_discrepancy(&g5), None);
        // defect on a plus diagonal
        let xi = [1, -1, -1, 1, -1];
        let s = SpinConfiguration::from_diagonals(&g5, &xi).flip_at(Site::new(1, 2));
        assert_eq!(s.single_discrepancy(&g5), Some((Site::new(1, 2), 3)));
    }

    #[test]
    fn shift_examples() {
        let g6 = g(6);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = SpinConfiguration::random(&g6, &mut rng);
        assert_eq!(s.horizontal_shift(6), s);
        assert_eq!(s.horizontal_shift(1).horizontal_shift(-1), s);
        let xi = [1, -1, -1, -1, -1, -1];
        let d = SpinConfiguration::from_diagonals(&g6, &xi);
        assert_eq!(d.horizontal_shift(1).is_diagonal().unwrap(), vec![-1, 1, -1, -1, -1, -1]);
        // (θσ)_x = σ_{x^l}
        let t = s.horizontal_shift(1);
        for x in g6.sites() {
            assert_eq!(t.at(x), s.at(Site::new((x.i + 5) % 6, x.j)));
        }
    }

    #[test]
    fn shift_multiword_agrees_with_definition() {
        let g = g(67);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = SpinConfiguration::random(&g, &mut rng);
        let t = s.horizontal_shift(-3);
        for x in g.sites() {
            assert_eq!(t.at(x), s.at(Site::new((x.i + 3) % 67, x.j)));
        }
        assert_eq!(t.horizontal_shift(3), s);
    }

    #[test]
    fn shift_detection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for l in [3usize, 8, 64, 66] {
            let g = g(l);
            let s = SpinConfiguration::random(&g, &mut rng);
            let t = s.horizontal_shift(1);
            assert!(t.is_shift_of(&s));
            assert!(!t.flip_at(Site::new(1, 1)).is_shift_of(&s));
            assert_eq!(s.is_shift_of(&s), s == t);
        }
    }

    proptest! {
        #[test]
        fn code_round_trip(code in 0u64..(1u64 << 16)) {
            let g4 = TorusGeometry::new(4).unwrap();
            prop_assert_eq!(SpinConfiguration::from_code(&g4, code).code(), code);
        }

        #[test]
        fn leq_is_partial_order(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let g = TorusGeometry::new(8).unwrap();
            let (x, y, z) = (
                SpinConfiguration::from_code(&g, a),
                SpinConfiguration::from_code(&g, b),
                SpinConfiguration::from_code(&g, c),
            );
            prop_assert!(x.leq(&x));
            if x.leq(&y) && y.leq(&x) { prop_assert_eq!(&x, &y); }
            let (xy, xyz) = (x.join(&y), x.join(&y).join(&z));
            prop_assert!(x.leq(&xy) && xy.leq(&xyz));
            prop_assert!(x.leq(&xyz));
        }

        #[test]
        fn diagonal_fast_path_matches_scan(code in any::<u64>(), keep in any::<bool>()) {
            let g = TorusGeometry::new(8).unwrap();
            let s = if keep {
                let xi: Vec<i8> = (0..8).map(|m| if (code >> m) & 1 == 1 { 1 } else { -1 }).collect();
                SpinConfiguration::from_diagonals(&g, &xi)
            } else {
                SpinConfiguration::from_code(&g, code)
            };
            let scan = (0..8).all(|m| s.diagonal_value(m).is_some());
            prop_assert_eq!(s.in_diagonal_set(), scan);
        }
    }
}
