use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::terrain::TerrainMap;
use crate::{Scalar, Vec3};

#[derive(Debug, Error)]
pub enum HeightmapError {
    #[error("heightmap dimensions must be odd and non-zero, got {h_x}x{h_y}")]
    EvenDimensions { h_x: usize, h_y: usize },
    #[error("heightmap resolution must be positive and finite")]
    BadResolution,
    #[error("malformed heightmap csv: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Square-cell height grid in the robot's horizontal frame.
///
/// Cell `(i, j)` sits at grid offset `((i - ci)·res, (j - cj)·res)` from the
/// center cell, rotated by `yaw` about gravity. Row-major storage, `i` major.
#[derive(Debug, Clone, PartialEq)]
pub struct Heightmap<T> {
    h_x: usize,
    h_y: usize,
    resolution: T,
    center: (T, T),
    yaw: T,
    yaw_sin: T,
    yaw_cos: T,
    cells: Vec<T>,
}

impl<T: Scalar> Heightmap<T> {
    pub fn from_cells(
        h_x: usize,
        h_y: usize,
        resolution: T,
        center: (T, T),
        yaw: T,
        cells: Vec<T>,
    ) -> Result<Self, HeightmapError> {
        if h_x == 0 || h_y == 0 || h_x.is_multiple_of(2) || h_y.is_multiple_of(2) {
            return Err(HeightmapError::EvenDimensions { h_x, h_y });
        }
        if !(resolution > T::zero() && resolution.is_finite()) {
            return Err(HeightmapError::BadResolution);
        }
        if cells.len() != h_x * h_y {
            return Err(HeightmapError::Parse(format!("expected {} cells, got {}", h_x * h_y, cells.len())));
        }
        let (yaw_sin, yaw_cos) = yaw.sin_cos();
        Ok(Self { h_x, h_y, resolution, center, yaw, yaw_sin, yaw_cos, cells })
    }

    pub fn h_x(&self) -> usize {
        self.h_x
    }

    pub fn h_y(&self) -> usize {
        self.h_y
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn center(&self) -> (T, T) {
        self.center
    }

    pub fn yaw(&self) -> T {
        self.yaw
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn center_index(&self) -> (usize, usize) {
        ((self.h_x - 1) / 2, (self.h_y - 1) / 2)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.h_y + j
    }

    #[inline]
    pub fn height(&self, i: usize, j: usize) -> T {
        self.cells[i * self.h_y + j]
    }

    /// Offset of a cell from the center, in the grid frame.
    pub fn cell_offset(&self, i: usize, j: usize) -> (T, T) {
        let (ci, cj) = self.center_index();
        let di = T::from_count(i) - T::from_count(ci);
        let dj = T::from_count(j) - T::from_count(cj);
        (di * self.resolution, dj * self.resolution)
    }

    pub fn cell_world_xy(&self, i: usize, j: usize) -> (T, T) {
        let (ox, oy) = self.cell_offset(i, j);
        let (s, c) = (self.yaw_sin, self.yaw_cos);
        (self.center.0 + c * ox - s * oy, self.center.1 + s * ox + c * oy)
    }

    /// The candidate foothold a cell stands for.
    pub fn candidate(&self, i: usize, j: usize) -> Vec3<T> {
        let (x, y) = self.cell_world_xy(i, j);
        Vec3::new(x, y, self.height(i, j))
    }

    /// Continuous grid coordinates of a world point; integer values are cell
    /// centers.
    #[inline]
    pub fn to_grid(&self, x: T, y: T) -> (T, T) {
        let (s, c) = (self.yaw_sin, self.yaw_cos);
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let (ci, cj) = self.center_index();
        (
            (c * dx + s * dy) / self.resolution + T::from_count(ci),
            (-s * dx + c * dy) / self.resolution + T::from_count(cj),
        )
    }

    /// Cell whose footprint contains the world point.
    pub fn nearest_cell(&self, x: T, y: T) -> Option<(usize, usize)> {
        let (u, v) = self.to_grid(x, y);
        let (ri, rj) = (u.round(), v.round());
        let max_i = T::from_count(self.h_x - 1);
        let max_j = T::from_count(self.h_y - 1);
        if ri < T::zero() || rj < T::zero() || ri > max_i || rj > max_j {
            return None;
        }
        Some((ri.to_usize()?, rj.to_usize()?))
    }

    /// Upper envelope of the grid at a continuous grid coordinate: the max
    /// over the cells whose centers lie within one cell (Chebyshev, strict)
    /// of the point. Points off the grid read the nearest border cells.
    #[inline]
    pub fn envelope_at_grid(&self, u: T, v: T) -> T {
        let (i0, i1) = bracket(u.to_f64_lossy(), self.h_x - 1);
        let (j0, j1) = bracket(v.to_f64_lossy(), self.h_y - 1);
        let a = self.height(i0, j0).max(self.height(i0, j1));
        let b = self.height(i1, j0).max(self.height(i1, j1));
        a.max(b)
    }

    /// [`Self::envelope_at_grid`] at a world point.
    pub fn envelope_height(&self, x: T, y: T) -> T {
        let (u, v) = self.to_grid(x, y);
        self.envelope_at_grid(u, v)
    }

    pub fn max_height(&self) -> T {
        self.cells.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min_height(&self) -> T {
        self.cells.iter().copied().fold(T::infinity(), T::min)
    }

    /// Writes the header line, a metadata line, then `h_x` rows of `h_y`
    /// heights.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), HeightmapError> {
        writeln!(out, "h_x,h_y,resolution,center_x,center_y,yaw")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            self.h_x, self.h_y, self.resolution, self.center.0, self.center.1, self.yaw
        )?;
        let mut line = String::new();
        for i in 0..self.h_x {
            line.clear();
            for j in 0..self.h_y {
                if j > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{}", self.height(i, j));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, HeightmapError> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| HeightmapError::Parse("empty input".into()))??;
        if header.trim() != "h_x,h_y,resolution,center_x,center_y,yaw" {
            return Err(HeightmapError::Parse(format!("unexpected header `{header}`")));
        }
        let meta = lines.next().ok_or_else(|| HeightmapError::Parse("missing metadata".into()))??;
        let meta: Vec<&str> = meta.trim().split(',').collect();
        if meta.len() != 6 {
            return Err(HeightmapError::Parse("metadata needs 6 fields".into()));
        }
        let dim = |s: &str| s.trim().parse::<usize>().map_err(|e| HeightmapError::Parse(e.to_string()));
        let h_x = dim(meta[0])?;
        let h_y = dim(meta[1])?;
        let resolution = parse_scalar::<T>(meta[2])?;
        let center = (parse_scalar::<T>(meta[3])?, parse_scalar::<T>(meta[4])?);
        let yaw = parse_scalar::<T>(meta[5])?;
        let mut cells = Vec::with_capacity(h_x * h_y);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for field in line.trim().split(',') {
                cells.push(parse_scalar::<T>(field)?);
            }
        }
        Self::from_cells(h_x, h_y, resolution, center, yaw, cells)
    }
}

fn parse_scalar<T: Scalar>(s: &str) -> Result<T, HeightmapError> {
    T::from_str_radix(s.trim(), 10).map_err(|_| HeightmapError::Parse(format!("bad number `{s}`")))
}

/// Samples `terrain` on an `h_x × h_y` grid centered at `center` and
/// rotated by `yaw`.
/// `(floor(x), ceil(x))` clamped to `[0, max]`, without a libm call.
#[inline]
fn bracket(x: f64, max: usize) -> (usize, usize) {
    if !(x > 0.0) {
        return (0, 0);
    }
    let lo = x as usize;
    let hi = if (lo as f64) < x { lo + 1 } else { lo };
    (lo.min(max), hi.min(max))
}

pub fn extract_heightmap<T: Scalar>(
    terrain: &TerrainMap<T>,
    center: (T, T),
    yaw: T,
    h_x: usize,
    h_y: usize,
    resolution: T,
) -> Result<Heightmap<T>, HeightmapError> {
    let mut hm = Heightmap::from_cells(h_x, h_y, resolution, center, yaw, vec![T::zero(); h_x * h_y])?;
    for i in 0..h_x {
        for j in 0..h_y {
            let (x, y) = hm.cell_world_xy(i, j);
            hm.cells[i * h_y + j] = terrain.sample_height(x, y);
        }
    }
    Ok(hm)
}
