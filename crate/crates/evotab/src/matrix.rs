//! A small dense row-major matrix.
//!
//! The problems handled by this crate are tiny (tens of rows, single-digit
//! column counts), so a flat `Vec<f64>` with hand-rolled elimination beats
//! pulling in a linear-algebra dependency.

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from nested rows. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            assert_eq!(row.len(), m, "ragged rows passed to Matrix::from_rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    /// Borrow row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy column `j` out.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Matrix-vector product.
    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mat_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Numerical rank via Gaussian elimination with partial pivoting.
    ///
    /// Pivots smaller than `1e-10` times the largest pivot encountered count
    /// as zero.
    pub fn rank(&self) -> usize {
        const REL_TOL: f64 = 1e-10;
        let mut work = self.clone();
        let mut pivots: Vec<f64> = Vec::new();
        let mut pivot_row = 0;
        for col in 0..work.cols {
            if pivot_row == work.rows {
                break;
            }
            // partial pivot: largest |entry| in this column at/below pivot_row
            let (best_row, best_val) = (pivot_row..work.rows)
                .map(|r| (r, work.get(r, col).abs()))
                .fold((pivot_row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_val == 0.0 {
                continue;
            }
            pivots.push(best_val);
            if best_row != pivot_row {
                work.swap_rows(best_row, pivot_row);
            }
            let pivot = work.get(pivot_row, col);
            for r in pivot_row + 1..work.rows {
                let factor = work.get(r, col) / pivot;
                if factor != 0.0 {
                    for c in col..work.cols {
                        let val = work.get(r, c) - factor * work.get(pivot_row, c);
                        work.set(r, c, val);
                    }
                }
            }
            pivot_row += 1;
        }
        let largest = pivots.iter().cloned().fold(0.0_f64, f64::max);
        if largest == 0.0 {
            return 0;
        }
        pivots.iter().filter(|p| **p > REL_TOL * largest).count()
    }

    /// Solve the square system `self * x = b` by Gaussian elimination with
    /// partial pivoting. Returns `None` when the matrix is (numerically)
    /// singular.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        assert_eq!(self.rows, self.cols, "solve requires a square matrix");
        assert_eq!(b.len(), self.rows, "solve dimension mismatch");
        let n = self.rows;
        if n == 0 {
            return Some(Vec::new());
        }
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        let scale = self.max_abs().max(1.0);

        for col in 0..n {
            let (best_row, best_val) = (col..n)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_val <= 1e-12 * scale {
                return None;
            }
            if best_row != col {
                a.swap_rows(best_row, col);
                rhs.swap(best_row, col);
            }
            let pivot = a.get(col, col);
            for r in col + 1..n {
                let factor = a.get(r, col) / pivot;
                if factor != 0.0 {
                    for c in col..n {
                        let val = a.get(r, c) - factor * a.get(col, c);
                        a.set(r, c, val);
                    }
                    rhs[r] -= factor * rhs[col];
                }
            }
        }

        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let tail: f64 = (row + 1..n).map(|c| a.get(row, c) * x[c]).sum();
            x[row] = (rhs[row] - tail) / a.get(row, row);
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}
