//! Search graphs.
//!
//! [`GridGraph`] is the rectangular lattice used by every scenario. Vertex
//! ids run row-major from the south-west corner, `id = iy * nx + ix`, and
//! successor lists are sorted by ascending id so traversal order is fixed.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flowfield::lattice_coord;
use crate::geom::{Point, Region};

/// Read-only adjacency view used by the search engine.
pub trait Graph: Sync {
    fn num_vertices(&self) -> usize;
    fn position(&self, v: usize) -> Point;
    fn successors(&self, v: usize) -> &[usize];
}

/// Lattice connectivity. Larger rings add offsets with coprime components,
/// shrinking the angular gap between admissible headings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    N4,
    N8,
    N16,
    N32,
}

impl Neighborhood {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            4 => Ok(Self::N4),
            8 => Ok(Self::N8),
            16 => Ok(Self::N16),
            32 => Ok(Self::N32),
            _ => Err(Error::InvalidConfig("neighborhood must be 4, 8, 16 or 32")),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Self::N4 => 4,
            Self::N8 => 8,
            Self::N16 => 16,
            Self::N32 => 32,
        }
    }

    /// Lattice offsets `(dx, dy)` of this ring.
    pub fn offsets(self) -> Vec<(i64, i64)> {
        let mut base: Vec<(i64, i64)> = alloc::vec![(1, 0), (0, 1)];
        if self.order() >= 8 {
            base.push((1, 1));
        }
        if self.order() >= 16 {
            base.extend([(1, 2), (2, 1)]);
        }
        if self.order() >= 32 {
            base.extend([(1, 3), (3, 1), (2, 3), (3, 2)]);
        }
        let mut out = Vec::with_capacity(self.order());
        for (a, b) in base {
            for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let o = (a * sa, b * sb);
                if !out.contains(&o) {
                    out.push(o);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub neighborhood: Neighborhood,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidConfig("grid needs at least 2 points per axis"));
        }
        if !(self.x_max > self.x_min && self.y_max > self.y_min) {
            return Err(Error::InvalidConfig("grid bounds must satisfy min < max"));
        }
        Ok(())
    }

    pub fn region(&self) -> Region {
        Region::new(self.x_min, self.x_max, self.y_min, self.y_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridGraph {
    spec: GridSpec,
    positions: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
}

impl GridGraph {
    pub fn build(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let (nx, ny) = (spec.nx, spec.ny);
        let mut positions = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            let y = lattice_coord(spec.y_min, spec.y_max, iy, ny);
            for ix in 0..nx {
                positions.push(Point::new(lattice_coord(spec.x_min, spec.x_max, ix, nx), y));
            }
        }
        let offsets = spec.neighborhood.offsets();
        let mut adjacency = Vec::with_capacity(nx * ny);
        for iy in 0..ny as i64 {
            for ix in 0..nx as i64 {
                let mut succ: Vec<usize> = offsets
                    .iter()
                    .map(|&(dx, dy)| (ix + dx, iy + dy))
                    .filter(|&(x, y)| x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64)
                    .map(|(x, y)| y as usize * nx + x as usize)
                    .collect();
                succ.sort_unstable();
                adjacency.push(succ);
            }
        }
        Ok(Self { spec, positions, adjacency })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn vertex(&self, ix: usize, iy: usize) -> usize {
        iy * self.spec.nx + ix
    }

    /// Closest lattice vertex to `p`; ties go to the lowest id.
    pub fn nearest_vertex(&self, p: Point) -> Result<usize> {
        let s = &self.spec;
        if !s.region().contains(p) {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        let fx = (p.x - s.x_min) / (s.x_max - s.x_min) * (s.nx - 1) as f64;
        let fy = (p.y - s.y_min) / (s.y_max - s.y_min) * (s.ny - 1) as f64;
        // The nearest lattice point lies among the floor/ceil neighbours of
        // the fractional index; widen by one to absorb rounding of the
        // lattice coordinates themselves.
        let span = |f: f64, n: usize| {
            let lo = (libm::floor(f) as i64 - 1).max(0) as usize;
            let hi = ((libm::ceil(f) as i64 + 1) as usize).min(n - 1);
            lo..=hi
        };
        let mut best = (f64::INFINITY, usize::MAX);
        for iy in span(fy, s.ny) {
            for ix in span(fx, s.nx) {
                let id = self.vertex(ix, iy);
                let d = self.positions[id].distance(p);
                if d < best.0 || (d == best.0 && id < best.1) {
                    best = (d, id);
                }
            }
        }
        Ok(best.1)
    }
}

impl Graph for GridGraph {
    fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    fn successors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }
}

/// Arbitrary positions with explicit adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct PointGraph {
    positions: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
}

impl PointGraph {
    /// Successor lists are sorted and deduplicated; self-loops and
    /// dangling ids are rejected.
    pub fn new(positions: Vec<Point>, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        if positions.len() != adjacency.len() {
            return Err(Error::InvalidConfig("adjacency length differs from vertex count"));
        }
        for (v, succ) in adjacency.iter_mut().enumerate() {
            succ.sort_unstable();
            succ.dedup();
            if let Some(&bad) = succ.iter().find(|&&w| w == v || w >= positions.len()) {
                return Err(Error::UnknownVertex(bad));
            }
        }
        Ok(Self { positions, adjacency })
    }
}

impl Graph for PointGraph {
    fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    fn successors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }
}
