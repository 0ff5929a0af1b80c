//! Synthetic 2.5D terrains and the heightmap patches cut out of them.
//!
//! A [`TerrainMap`] is the continuous ground truth: `sample_height` is total
//! and deterministic. Planners never look at it directly; they see a
//! [`Heightmap`] extracted around a point of interest and aligned with the
//! robot's horizontal frame.

mod heightmap;

pub use heightmap::{extract_heightmap, Heightmap, HeightmapError};

use crate::Scalar;

/// Straight staircase climbing along world +x.
///
/// Steps are `going` deep and `rise` tall. The first riser sits at `start_x`.
/// With `platform_length` set, the flight is followed by a flat landing of
/// that length and a mirrored descending flight back to ground level.
#[derive(Debug, Clone, PartialEq)]
pub struct StairSpec<T> {
    pub rise: T,
    pub going: T,
    pub n_steps: u32,
    pub start_x: T,
    pub platform_length: Option<T>,
}

impl<T: Scalar> StairSpec<T> {
    pub fn new(rise: T, going: T, n_steps: u32, start_x: T) -> Self {
        Self { rise, going, n_steps, start_x, platform_length: None }
    }

    pub fn with_platform(mut self, length: T) -> Self {
        self.platform_length = Some(length);
        self
    }

    /// x coordinate of the top riser.
    pub fn top_riser_x(&self) -> T {
        self.start_x + self.going * T::from_count(self.n_steps.saturating_sub(1) as usize)
    }

    /// x of the first drop of the descending flight, if any.
    pub fn descent_start_x(&self) -> Option<T> {
        self.platform_length.map(|l| self.top_riser_x() + l)
    }

    /// World x of every height discontinuity, ascending and descending.
    pub fn edge_positions(&self) -> Vec<T> {
        let n = self.n_steps as usize;
        let mut edges: Vec<T> = (0..n).map(|k| self.start_x + self.going * T::from_count(k)).collect();
        if let Some(d) = self.descent_start_x() {
            edges.extend((0..n).map(|k| d + self.going * T::from_count(k)));
        }
        edges
    }

    /// Mirrors descent coordinates onto the ascending flight.
    fn fold_x(&self, x: T) -> T {
        match self.platform_length {
            Some(l) => {
                let mid = self.top_riser_x() + l * T::lit(0.5);
                if x > mid {
                    mid + mid - x
                } else {
                    x
                }
            }
            None => x,
        }
    }

    fn ascending_height(&self, x: T) -> T {
        if self.n_steps == 0 || x < self.start_x {
            return T::zero();
        }
        let steps = ((x - self.start_x) / self.going).floor() + T::one();
        let top = T::from_count(self.n_steps as usize);
        self.rise * steps.min(top)
    }

    pub fn height(&self, x: T) -> T {
        self.ascending_height(self.fold_x(x))
    }
}

/// Staircase whose treads end in a hole of `gap_width` in front of every
/// riser except the first. Gap cells read `tread − gap_depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct GappedStairSpec<T> {
    pub stairs: StairSpec<T>,
    pub gap_width: T,
    pub gap_depth: T,
}

impl<T: Scalar> GappedStairSpec<T> {
    pub fn height(&self, x: T) -> T {
        let s = &self.stairs;
        let xf = s.fold_x(x);
        let tread = s.ascending_height(xf);
        if s.n_steps < 2 || xf < s.start_x {
            return tread;
        }
        let rel = xf - s.start_x;
        let k = (rel / s.going).floor();
        // Tread k (0-based) ends at the riser of step k + 1.
        let last_gapped = T::from_count(s.n_steps as usize - 2);
        let next_riser = s.going * (k + T::one());
        if k <= last_gapped && rel >= next_riser - self.gap_width {
            tread - self.gap_depth
        } else {
            tread
        }
    }
}

/// Seeded value-noise field: uniform lattice values in `[0, amplitude]`
/// bilinearly interpolated over square cells of `cell_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughSpec<T> {
    pub cell_size: T,
    pub amplitude: T,
    pub seed: u64,
}

impl<T: Scalar> RoughSpec<T> {
    fn lattice(&self, i: i64, j: i64) -> T {
        let mut h = self.seed ^ 0x9E37_79B9_7F4A_7C15;
        h = splitmix64(h ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
        h = splitmix64(h ^ (j as u64).wrapping_mul(0x8CB9_2BA7_2F3D_8DD7));
        // 53 high bits -> [0, 1)
        let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
        self.amplitude * T::lit(unit)
    }

    pub fn height(&self, x: T, y: T) -> T {
        let u = x / self.cell_size;
        let v = y / self.cell_size;
        let (fu, fv) = (u.floor(), v.floor());
        let (tu, tv) = (u - fu, v - fv);
        let i = fu.to_i64().unwrap_or(0);
        let j = fv.to_i64().unwrap_or(0);
        let h00 = self.lattice(i, j);
        let h10 = self.lattice(i + 1, j);
        let h01 = self.lattice(i, j + 1);
        let h11 = self.lattice(i + 1, j + 1);
        let one = T::one();
        (h00 * (one - tu) + h10 * tu) * (one - tv) + (h01 * (one - tu) + h11 * tu) * tv
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainKind {
    Flat,
    Stairs,
    GappedStairs,
    Rough,
    Composite,
}

/// Continuous ground-truth terrain.
#[derive(Debug, Clone, PartialEq)]
pub enum TerrainMap<T> {
    Flat,
    Stairs(StairSpec<T>),
    GappedStairs(GappedStairSpec<T>),
    Rough(RoughSpec<T>),
    /// Pointwise sum of the layers, e.g. stairs with cobbles on top.
    Composite(Vec<TerrainMap<T>>),
}

impl<T: Scalar> TerrainMap<T> {
    pub fn kind(&self) -> TerrainKind {
        match self {
            TerrainMap::Flat => TerrainKind::Flat,
            TerrainMap::Stairs(_) => TerrainKind::Stairs,
            TerrainMap::GappedStairs(_) => TerrainKind::GappedStairs,
            TerrainMap::Rough(_) => TerrainKind::Rough,
            TerrainMap::Composite(_) => TerrainKind::Composite,
        }
    }

    /// The staircase geometry, if the terrain contains one.
    pub fn stairs(&self) -> Option<&StairSpec<T>> {
        match self {
            TerrainMap::Stairs(s) => Some(s),
            TerrainMap::GappedStairs(g) => Some(&g.stairs),
            TerrainMap::Composite(layers) => layers.iter().find_map(|l| l.stairs()),
            _ => None,
        }
    }

    pub fn sample_height(&self, x: T, y: T) -> T {
        match self {
            TerrainMap::Flat => T::zero(),
            TerrainMap::Stairs(s) => s.height(x),
            TerrainMap::GappedStairs(g) => g.height(x),
            TerrainMap::Rough(r) => r.height(x, y),
            TerrainMap::Composite(layers) => {
                layers.iter().fold(T::zero(), |acc, l| acc + l.sample_height(x, y))
            }
        }
    }
}

/// Free-function form of [`TerrainMap::sample_height`].
pub fn sample_height<T: Scalar>(terrain: &TerrainMap<T>, x: T, y: T) -> T {
    terrain.sample_height(x, y)
}
