use num_complex::Complex64;

use crate::error::{Error, Result};

/// Banded LU with partial pivoting, stored as in LAPACK's `gbtrf`: row `i`
/// of `U` keeps columns `i..=i + 2 * bw`, and the multipliers of step `i`
/// are kept unpermuted, so the row interchanges are replayed during the
/// forward solve.
#[derive(Debug, Clone)]
pub(crate) struct BandLu {
    n: usize,
    bw: usize,
    /// Row `i` covers absolute columns `i - bw ..= i + 2 bw`.
    rows: Vec<Complex64>,
    /// `lower[i * bw + m - 1]` eliminates row `i + m` at step `i`.
    lower: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn width(bw: usize) -> usize {
        3 * bw + 1
    }

    /// Slot of absolute column `j` within stored row `i`.
    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * Self::width(self.bw) + (j + self.bw - i)
    }

    pub(crate) fn factor(
        n: usize,
        bw: usize,
        entries: &[(usize, usize, Complex64)],
    ) -> Result<BandLu> {
        let width = Self::width(bw);
        let mut lu = BandLu {
            n,
            bw,
            rows: vec![Complex64::new(0.0, 0.0); n * width],
            lower: vec![Complex64::new(0.0, 0.0); n * bw],
            pivots: vec![0; n],
        };
        for &(i, j, v) in entries {
            debug_assert!(i.abs_diff(j) <= bw);
            let s = lu.slot(i, j);
            lu.rows[s] += v;
        }

        let scale = lu.rows.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..n {
            let last_row = (i + bw).min(n - 1);
            let last_col = (i + 2 * bw).min(n - 1);

            let mut pivot = i;
            let mut best = lu.rows[lu.slot(i, i)].norm();
            for r in i + 1..=last_row {
                let v = lu.rows[lu.slot(r, i)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if !(best > f64::EPSILON * scale) {
                return Err(Error::Singular(i));
            }
            lu.pivots[i] = pivot;
            if pivot != i {
                for j in i..=last_col {
                    let (a, b) = (lu.slot(i, j), lu.slot(pivot, j));
                    lu.rows.swap(a, b);
                }
            }

            let diag = lu.rows[lu.slot(i, i)];
            for r in i + 1..=last_row {
                let sr = lu.slot(r, i);
                let m = lu.rows[sr] / diag;
                lu.rows[sr] = Complex64::new(0.0, 0.0);
                lu.lower[i * bw + (r - i) - 1] = m;
                if m == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in i + 1..=last_col {
                    let u = lu.rows[lu.slot(i, j)];
                    let s = lu.slot(r, j);
                    lu.rows[s] -= m * u;
                }
            }
        }
        Ok(lu)
    }

    pub(crate) fn stored_entries(&self) -> usize {
        // U has at most 2 bw + 1 entries per row, L at most bw per column
        (0..self.n)
            .map(|i| (i + 2 * self.bw).min(self.n - 1) - i + 1 + (i + self.bw).min(self.n - 1) - i)
            .sum()
    }

    pub(crate) fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let p = self.pivots[i];
            if p != i {
                b.swap(i, p);
            }
            let bi = b[i];
            let last_row = (i + bw).min(n - 1);
            for r in i + 1..=last_row {
                b[r] -= self.lower[i * bw + (r - i) - 1] * bi;
            }
        }
        for i in (0..n).rev() {
            let last_col = (i + 2 * bw).min(n - 1);
            let mut acc = b[i];
            for j in i + 1..=last_col {
                acc -= self.rows[self.slot(i, j)] * b[j];
            }
            b[i] = acc / self.rows[self.slot(i, i)];
        }
    }
}
