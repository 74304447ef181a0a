//! Geometry of the periodic square lattice `(Z/LZ)^2`.
//!
//! Sites are addressed by a linear index `i + L*j` where `i` is the column
//! and `j` the row. Neighbor maps are precomputed tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: usize,
    pub j: usize,
}

impl Site {
    pub const fn new(i: usize, j: usize) -> Self {
        Site { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Right => Direction::Left,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
        }
    }
}

/// Orientation of a bond. Every bond is `{x, x^u}` or `{x, x^r}` for a unique
/// base site `x`, so bonds are labelled by `(x, axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Vertical,
    Horizontal,
}

/// A nearest-neighbour bond labelled by its lower/left endpoint.
///
/// At `L = 2` the two bonds `{x, x^u}` and `{x, x^d}` join the same pair of
/// sites; they remain distinct labels, so the bond set always has `2 L^2`
/// members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub base: Site,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusGeometry {
    side: usize,
    // [up, right, down, left] per linear index
    neighbors: Vec<[usize; 4]>,
}

impl TorusGeometry {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidGeometry(side));
        }
        let l = side;
        let neighbors = (0..l * l)
            .map(|idx| {
                let (i, j) = (idx % l, idx / l);
                [
                    i + l * ((j + 1) % l),
                    (i + 1) % l + l * j,
                    i + l * ((j + l - 1) % l),
                    (i + l - 1) % l + l * j,
                ]
            })
            .collect();
        Ok(TorusGeometry { side, neighbors })
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn site_count(&self) -> usize {
        self.side * self.side
    }

    #[inline]
    pub fn index(&self, x: Site) -> usize {
        debug_assert!(self.contains(x));
        x.i + self.side * x.j
    }

    #[inline]
    pub fn site(&self, index: usize) -> Site {
        Site::new(index % self.side, index / self.side)
    }

    pub fn contains(&self, x: Site) -> bool {
        x.i < self.side && x.j < self.side
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.site_count()).map(move |k| self.site(k))
    }

    #[inline]
    pub fn neighbor_index(&self, index: usize, dir: Direction) -> usize {
        let slot = match dir {
            Direction::Up => 0,
            Direction::Right => 1,
            Direction::Down => 2,
            Direction::Left => 3,
        };
        self.neighbors[index][slot]
    }

    pub fn neighbor(&self, x: Site, dir: Direction) -> Site {
        self.site(self.neighbor_index(self.index(x), dir))
    }

    /// Index `m = (i + j) mod L` of the NW-SE diagonal `D_m` containing `x`.
    pub fn diagonal_index(&self, x: Site) -> usize {
        (x.i + x.j) % self.side
    }

    /// Horizontal shift `(i, j) -> (i + 1, j)`.
    pub fn shift_site(&self, x: Site) -> Site {
        Site::new((x.i + 1) % self.side, x.j)
    }

    /// Sites of diagonal `D_m`, ordered by column.
    pub fn diagonal_sites(&self, m: usize) -> impl Iterator<Item = Site> + '_ {
        let l = self.side;
        (0..l).map(move |i| Site::new(i, (m % l + l - i) % l))
    }

    pub fn bonds(&self) -> impl Iterator<Item = Bond> + '_ {
        self.sites().flat_map(|base| {
            [Axis::Vertical, Axis::Horizontal]
                .into_iter()
                .map(move |axis| Bond { base, axis })
        })
    }

    /// The two sites joined by a bond.
    pub fn endpoints(&self, b: Bond) -> (Site, Site) {
        let dir = match b.axis {
            Axis::Vertical => Direction::Up,
            Axis::Horizontal => Direction::Right,
        };
        (b.base, self.neighbor(b.base, dir))
    }
}
