//! Sparse LU factorisation of simplex bases with Markowitz pivoting, plus a
//! product-form eta file for the updates between refactorisations.

const NONE: usize = usize::MAX;
/// Row-relative threshold for pivot eligibility.
const THRESHOLD: f64 = 0.1;
const ABS_PIVOT_TOL: f64 = 1e-11;
/// Number of candidate rows/columns examined before accepting the best pivot.
const SEARCH_DEPTH: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct Singular {
    /// Basis positions left without a pivot.
    pub positions: Vec<usize>,
    /// Rows left without a pivot.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct LuFactors {
    m: usize,
    pivot_row: Vec<usize>,
    pivot_col: Vec<usize>,
    l_cols: Vec<Vec<(usize, f64)>>,
    u_rows: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
}

/// Lazily maintained buckets of indices keyed by their current count.
struct Buckets {
    lists: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(m: usize) -> Self {
        Buckets {
            lists: vec![Vec::new(); m + 2],
        }
    }

    fn push(&mut self, count: usize, idx: usize) {
        if count < self.lists.len() {
            self.lists[count].push(idx);
        } else {
            self.lists.last_mut().unwrap().push(idx);
        }
    }
}

impl LuFactors {
    /// Factorises the `m × m` matrix whose columns are given as sparse
    /// `(row, value)` lists, indexed by basis position.
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<LuFactors, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                if v != 0.0 {
                    rows[i].push((j, v));
                    col_rows[j].push(i);
                }
            }
        }
        let mut row_done = vec![false; m];
        let mut col_done = vec![false; m];
        let mut row_buckets = Buckets::new(m);
        let mut col_buckets = Buckets::new(m);
        for i in 0..m {
            row_buckets.push(rows[i].len(), i);
        }
        for j in 0..m {
            col_buckets.push(col_rows[j].len(), j);
        }

        let mut lu = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            pivot_col: Vec::with_capacity(m),
            l_cols: Vec::with_capacity(m),
            u_rows: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
        };
        let mut slot = vec![NONE; m];

        for _step in 0..m {
            let pivot = find_pivot(
                &rows,
                &col_rows,
                &row_done,
                &col_done,
                &row_buckets,
                &col_buckets,
            );
            let Some((r, c)) = pivot else {
                break;
            };
            row_done[r] = true;
            col_done[c] = true;
            let prow = std::mem::take(&mut rows[r]);
            let mut piv = 0.0;
            let mut urow = Vec::with_capacity(prow.len().saturating_sub(1));
            for &(j, v) in &prow {
                if j == c {
                    piv = v;
                } else {
                    urow.push((j, v));
                }
                if let Some(pos) = col_rows[j].iter().position(|&i| i == r) {
                    col_rows[j].swap_remove(pos);
                }
                if j != c {
                    col_buckets.push(col_rows[j].len(), j);
                }
            }
            let mut lcol = Vec::new();
            let others = std::mem::take(&mut col_rows[c]);
            for i in others {
                let pos = rows[i]
                    .iter()
                    .position(|&(j, _)| j == c)
                    .expect("pattern out of sync");
                let (_, a_ic) = rows[i].swap_remove(pos);
                let l = a_ic / piv;
                lcol.push((i, l));
                for (k, &(j, _)) in rows[i].iter().enumerate() {
                    slot[j] = k;
                }
                for &(j, v) in &urow {
                    if slot[j] != NONE {
                        rows[i][slot[j]].1 -= l * v;
                    } else {
                        rows[i].push((j, -l * v));
                        col_rows[j].push(i);
                        col_buckets.push(col_rows[j].len(), j);
                    }
                }
                for &(j, _) in &rows[i] {
                    slot[j] = NONE;
                }
                row_buckets.push(rows[i].len(), i);
            }
            lu.pivot_row.push(r);
            lu.pivot_col.push(c);
            lu.l_cols.push(lcol);
            lu.u_rows.push(urow);
            lu.u_diag.push(piv);
        }

        if lu.pivot_row.len() < m {
            return Err(Singular {
                positions: (0..m).filter(|&j| !col_done[j]).collect(),
                rows: (0..m).filter(|&i| !row_done[i]).collect(),
            });
        }
        Ok(lu)
    }

    /// Solves `B x = b` in place: `b` is indexed by row on entry and by basis
    /// position on exit.
    pub fn solve(&self, b: &mut [f64]) {
        for (k, lcol) in self.l_cols.iter().enumerate() {
            let t = b[self.pivot_row[k]];
            if t != 0.0 {
                for &(i, l) in lcol {
                    b[i] -= l * t;
                }
            }
        }
        let mut x = vec![0.0; self.m];
        for k in (0..self.m).rev() {
            let mut s = b[self.pivot_row[k]];
            for &(j, v) in &self.u_rows[k] {
                s -= v * x[j];
            }
            x[self.pivot_col[k]] = s / self.u_diag[k];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `Bᵀ y = c` in place: `c` is indexed by basis position on entry
    /// and by row on exit.
    pub fn solve_transpose(&self, c: &mut [f64]) {
        let mut w = vec![0.0; self.m];
        for k in 0..self.m {
            let wr = c[self.pivot_col[k]] / self.u_diag[k];
            w[self.pivot_row[k]] = wr;
            if wr != 0.0 {
                for &(j, v) in &self.u_rows[k] {
                    c[j] -= v * wr;
                }
            }
        }
        for k in (0..self.m).rev() {
            let s: f64 = self.l_cols[k].iter().map(|&(i, l)| l * w[i]).sum();
            w[self.pivot_row[k]] -= s;
        }
        c.copy_from_slice(&w);
    }

    #[cfg(test)]
    pub fn nonzeros(&self) -> usize {
        self.l_cols.iter().map(Vec::len).sum::<usize>()
            + self.u_rows.iter().map(Vec::len).sum::<usize>()
            + self.m
    }
}

fn row_max(row: &[(usize, f64)]) -> f64 {
    row.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max)
}

fn find_pivot(
    rows: &[Vec<(usize, f64)>],
    col_rows: &[Vec<usize>],
    row_done: &[bool],
    col_done: &[bool],
    row_buckets: &Buckets,
    col_buckets: &Buckets,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, f64, usize, usize)> = None; // merit, |a|, row, col
    let mut searched = 0;
    let consider = |merit: usize,
                    a: f64,
                    i: usize,
                    j: usize,
                    best: &mut Option<(usize, f64, usize, usize)>| {
        let better = match best {
            None => true,
            Some((bm, ba, _, _)) => merit < *bm || (merit == *bm && a > *ba),
        };
        if better {
            *best = Some((merit, a, i, j));
        }
    };
    let nb = col_buckets.lists.len();
    for count in 1..nb {
        for &j in &col_buckets.lists[count] {
            if col_done[j] || col_rows[j].len() != count {
                continue;
            }
            for &i in &col_rows[j] {
                let row = &rows[i];
                let Some(&(_, a)) = row.iter().find(|&&(k, _)| k == j) else {
                    continue;
                };
                let a = a.abs();
                if a > ABS_PIVOT_TOL && a >= THRESHOLD * row_max(row) {
                    consider((row.len() - 1) * (count - 1), a, i, j, &mut best);
                }
            }
            searched += 1;
            if best.is_some() && searched >= SEARCH_DEPTH {
                return best.map(|(_, _, i, j)| (i, j));
            }
        }
        for &i in &row_buckets.lists[count] {
            if row_done[i] || rows[i].len() != count {
                continue;
            }
            let row = &rows[i];
            let rmax = row_max(row);
            for &(j, a) in row {
                let a = a.abs();
                if a > ABS_PIVOT_TOL && a >= THRESHOLD * rmax {
                    consider((count - 1) * (col_rows[j].len() - 1), a, i, j, &mut best);
                }
            }
            searched += 1;
            if best.is_some() && searched >= SEARCH_DEPTH {
                return best.map(|(_, _, i, j)| (i, j));
            }
        }
        if let Some((merit, _, _, _)) = best {
            if merit <= count * count {
                break;
            }
        }
    }
    best.map(|(_, _, i, j)| (i, j))
}

/// Product-form update `B_new⁻¹ = E B⁻¹` for a column replaced at `pos`.
#[derive(Debug, Clone)]
pub(crate) struct Eta {
    pub pos: usize,
    pub pivot: f64,
    pub entries: Vec<(usize, f64)>,
}

impl Eta {
    pub fn new(pos: usize, alpha: &[f64]) -> Eta {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect();
        Eta {
            pos,
            pivot: alpha[pos],
            entries,
        }
    }

    pub fn apply(&self, x: &mut [f64]) {
        let xp = x[self.pos] / self.pivot;
        x[self.pos] = xp;
        if xp != 0.0 {
            for &(i, a) in &self.entries {
                x[i] -= a * xp;
            }
        }
    }

    pub fn apply_transpose(&self, y: &mut [f64]) {
        let s: f64 = self.entries.iter().map(|&(i, a)| a * y[i]).sum();
        y[self.pos] = (y[self.pos] - s) / self.pivot;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(cols: &[Vec<(usize, f64)>], x: &[f64], m: usize) -> Vec<f64> {
        let mut b = vec![0.0; m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                b[i] += v * x[j];
            }
        }
        b
    }

    fn dense_mul_t(cols: &[Vec<(usize, f64)>], y: &[f64]) -> Vec<f64> {
        cols.iter()
            .map(|col| col.iter().map(|&(i, v)| v * y[i]).sum())
            .collect()
    }

    fn sample() -> Vec<Vec<(usize, f64)>> {
        vec![
            vec![(0, 2.0), (2, 1.0)],
            vec![(1, -1.0), (3, 4.0)],
            vec![(0, 1.0), (1, 3.0), (2, 5.0)],
            vec![(3, 1.0), (2, -2.0)],
        ]
    }

    #[test]
    fn solve_and_transpose_roundtrip() {
        let cols = sample();
        let lu = LuFactors::factorize(4, &cols).unwrap();
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut b = dense_mul(&cols, &x_true, 4);
        lu.solve(&mut b);
        for (a, e) in b.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-12);
        }
        let y_true = [0.3, 1.0, -1.5, 2.0];
        let mut c = dense_mul_t(&cols, &y_true);
        lu.solve_transpose(&mut c);
        for (a, e) in c.iter().zip(y_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reports_missing_pivots() {
        let cols = vec![
            vec![(0, 1.0), (1, 1.0)],
            vec![(0, 2.0), (1, 2.0)],
            vec![(2, 1.0)],
        ];
        let err = LuFactors::factorize(3, &cols).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }

    #[test]
    fn eta_update_matches_refactorisation() {
        let mut cols = sample();
        let lu = LuFactors::factorize(4, &cols).unwrap();
        let new_col = vec![(0, 1.0), (3, -1.0), (1, 2.0)];
        let mut alpha = vec![0.0; 4];
        for &(i, v) in &new_col {
            alpha[i] = v;
        }
        lu.solve(&mut alpha);
        let eta = Eta::new(2, &alpha);
        cols[2] = new_col;
        let x_true = [0.5, 1.0, -1.0, 2.0];
        let mut b = dense_mul(&cols, &x_true, 4);
        lu.solve(&mut b);
        eta.apply(&mut b);
        for (a, e) in b.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-12);
        }
        let y_true = [1.0, 2.0, -0.5, 0.25];
        let mut c = dense_mul_t(&cols, &y_true);
        eta.apply_transpose(&mut c);
        lu.solve_transpose(&mut c);
        for (a, e) in c.iter().zip(y_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_like_basis_has_no_fill() {
        let m = 50;
        let cols: Vec<_> = (0..m).map(|i| vec![(i, -1.0)]).collect();
        let lu = LuFactors::factorize(m, &cols).unwrap();
        assert_eq!(lu.nonzeros(), m);
    }
}
