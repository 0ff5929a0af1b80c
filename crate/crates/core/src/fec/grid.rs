use std::io::Write;

/// Boolean matrix the same shape as the heightmap it was evaluated on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolGrid {
    h_x: usize,
    h_y: usize,
    cells: Vec<bool>,
}

impl BoolGrid {
    pub fn filled(h_x: usize, h_y: usize, value: bool) -> Self {
        Self { h_x, h_y, cells: vec![value; h_x * h_y] }
    }

    pub fn from_fn(h_x: usize, h_y: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(h_x * h_y);
        for i in 0..h_x {
            for j in 0..h_y {
                cells.push(f(i, j));
            }
        }
        Self { h_x, h_y, cells }
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.h_y + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * self.h_y + j] = v;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Element-wise AND. Panics on shape mismatch.
    pub fn and(&self, other: &BoolGrid) -> BoolGrid {
        assert_eq!((self.h_x, self.h_y), (other.h_x, other.h_y), "grid shape mismatch");
        BoolGrid {
            h_x: self.h_x,
            h_y: self.h_y,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| *a && *b).collect(),
        }
    }

    /// True cells within Chebyshev distance `radius` of a false cell become
    /// false. Cells outside the grid are ignored. Separable: rows, then
    /// columns.
    pub fn erode(&self, radius: usize) -> BoolGrid {
        if radius == 0 || self.cells.is_empty() {
            return self.clone();
        }
        let (hx, hy) = (self.h_x, self.h_y);
        let mut rows = vec![false; hx * hy];
        for i in 0..hx {
            let row = &self.cells[i * hy..(i + 1) * hy];
            for j in 0..hy {
                let lo = j.saturating_sub(radius);
                let hi = (j + radius).min(hy - 1);
                rows[i * hy + j] = row[lo..=hi].iter().all(|&c| c);
            }
        }
        let mut out = vec![false; hx * hy];
        for j in 0..hy {
            for i in 0..hx {
                let lo = i.saturating_sub(radius);
                let hi = (i + radius).min(hx - 1);
                out[i * hy + j] = (lo..=hi).all(|k| rows[k * hy + j]);
            }
        }
        BoolGrid { h_x: hx, h_y: hy, cells: out }
    }

    /// `h_x` lines of comma-separated 0/1 values.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = String::with_capacity(self.h_y * 2);
        for i in 0..self.h_x {
            line.clear();
            for j in 0..self.h_y {
                if j > 0 {
                    line.push(',');
                }
                line.push(if self.get(i, j) { '1' } else { '0' });
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}
