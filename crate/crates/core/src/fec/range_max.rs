use crate::terrain::Heightmap;
use crate::Scalar;

/// Constant-time maximum over axis-aligned cell rectangles (2D sparse
/// table).
#[derive(Debug, Clone)]
pub(super) struct RangeMax<T> {
    h_x: usize,
    h_y: usize,
    levels_y: usize,
    /// `tables[a * levels_y + b][i * h_y + j]`: max over the
    /// `2^a × 2^b` block starting at `(i, j)`.
    tables: Vec<Vec<T>>,
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

impl<T: Scalar> RangeMax<T> {
    pub(super) fn new(hm: &Heightmap<T>) -> Self {
        let (h_x, h_y) = (hm.h_x(), hm.h_y());
        let (levels_x, levels_y) = (floor_log2(h_x) + 1, floor_log2(h_y) + 1);
        let mut tables: Vec<Vec<T>> = Vec::with_capacity(levels_x * levels_y);
        for a in 0..levels_x {
            for b in 0..levels_y {
                let t = if a == 0 && b == 0 {
                    hm.cells().to_vec()
                } else if b > 0 {
                    let prev = &tables[a * levels_y + b - 1];
                    let half = 1 << (b - 1);
                    let mut t = prev.clone();
                    for i in 0..h_x {
                        for j in 0..h_y.saturating_sub(half) {
                            t[i * h_y + j] = prev[i * h_y + j].max(prev[i * h_y + j + half]);
                        }
                    }
                    t
                } else {
                    let prev = &tables[(a - 1) * levels_y];
                    let half = 1 << (a - 1);
                    let mut t = prev.clone();
                    for i in 0..h_x.saturating_sub(half) {
                        for j in 0..h_y {
                            t[i * h_y + j] = prev[i * h_y + j].max(prev[(i + half) * h_y + j]);
                        }
                    }
                    t
                };
                tables.push(t);
            }
        }
        Self { h_x, h_y, levels_y, tables }
    }

    /// Max over cells `i0..=i1` × `j0..=j1`; bounds are clamped to the grid.
    pub(super) fn query(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> T {
        let (i1, j1) = (i1.min(self.h_x - 1), j1.min(self.h_y - 1));
        let (a, b) = (floor_log2(i1 - i0 + 1), floor_log2(j1 - j0 + 1));
        let t = &self.tables[a * self.levels_y + b];
        let (ii, jj) = (i1 + 1 - (1 << a), j1 + 1 - (1 << b));
        let hy = self.h_y;
        t[i0 * hy + j0].max(t[i0 * hy + jj]).max(t[ii * hy + j0].max(t[ii * hy + jj]))
    }

    /// Max over every cell the envelope may read for a point whose grid
    /// coordinates lie in `[u0, u1] × [v0, v1]`, with at least one cell of
    /// slack.
    pub(super) fn envelope_bound(&self, u0: f64, u1: f64, v0: f64, v1: f64) -> T {
        // truncation is within one of floor and ceil either side of zero
        let lo = |x: f64, max: usize| ((x as i64) - 2).clamp(0, max as i64) as usize;
        let hi = |x: f64, max: usize| ((x as i64) + 2).clamp(0, max as i64) as usize;
        let (mi, mj) = (self.h_x - 1, self.h_y - 1);
        self.query(lo(u0, mi), hi(u1, mi), lo(v0, mj), hi(v1, mj))
    }
}
