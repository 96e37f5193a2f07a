//! Sparse LU factors of a simplex basis, updated in product form.
//!
//! Columns are factored left-looking (Gilbert–Peierls) in order of
//! increasing length with threshold partial pivoting, so slack columns cost
//! nothing. Basis changes append eta columns until the next refactorization.

/// Pivot candidates must be at least this fraction of the largest entry.
const THRESHOLD: f64 = 0.1;
/// Entries below this are dropped from the factors.
const DROP: f64 = 1e-14;

/// A basis column that could not be pivoted, and a row left without a pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    /// Off-pivot entries of the entering column in basis positions.
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    /// Pivot row of each elimination step.
    prow: Vec<usize>,
    /// Basis position factored at each step.
    pcol: Vec<usize>,
    /// Below-pivot multipliers of each step, by original row.
    lcols: Vec<Vec<(usize, f64)>>,
    /// Above-diagonal entries of each step, by earlier step.
    ucols: Vec<Vec<(usize, f64)>>,
    udiag: Vec<f64>,
    etas: Vec<Eta>,
    /// Entries of L and U plus the diagonal.
    factor_nnz: usize,
    eta_nnz: usize,
}

impl BasisFactor {
    /// Factors the `m x m` matrix whose `k`-th column is `columns[k]`
    /// (entries by row). `tiny` is the smallest acceptable pivot.
    pub fn new(m: usize, columns: &[Vec<(usize, f64)>], tiny: f64) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), m);
        let mut row_count = vec![0usize; m];
        for col in columns {
            for &(i, _) in col {
                row_count[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| (columns[k].len(), k));

        let mut f = BasisFactor {
            prow: Vec::with_capacity(m),
            pcol: Vec::with_capacity(m),
            lcols: Vec::with_capacity(m),
            ucols: Vec::with_capacity(m),
            udiag: Vec::with_capacity(m),
            etas: Vec::new(),
            factor_nnz: m,
            eta_nnz: 0,
        };
        let mut row_step = vec![usize::MAX; m];
        let mut x = vec![0.0; m];
        let mut visited = vec![false; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut singular = Vec::new();

        for &k in &order {
            // symbolic: rows reachable from the column through earlier L columns
            pattern.clear();
            for &(i, v) in &columns[k] {
                x[i] += v;
                if visited[i] {
                    continue;
                }
                visited[i] = true;
                stack.push((i, 0));
                while let Some(top) = stack.last_mut() {
                    let (node, next) = *top;
                    let step = row_step[node];
                    let children: &[(usize, f64)] = if step == usize::MAX { &[] } else { &f.lcols[step] };
                    if let Some(&(child, _)) = children.get(next) {
                        top.1 += 1;
                        if !visited[child] {
                            visited[child] = true;
                            stack.push((child, 0));
                        }
                    } else {
                        pattern.push(node);
                        stack.pop();
                    }
                }
            }
            // numeric: reverse post-order is a topological order
            for &i in pattern.iter().rev() {
                let step = row_step[i];
                if step != usize::MAX && x[i] != 0.0 {
                    let xi = x[i];
                    for &(r, l) in &f.lcols[step] {
                        x[r] -= l * xi;
                    }
                }
            }
            let mut max_abs: f64 = 0.0;
            for &i in &pattern {
                if row_step[i] == usize::MAX {
                    max_abs = max_abs.max(x[i].abs());
                }
            }
            let mut pivot_row = None;
            if max_abs > tiny {
                let mut best = (usize::MAX, usize::MAX);
                for &i in &pattern {
                    if row_step[i] == usize::MAX && x[i].abs() >= THRESHOLD * max_abs && (row_count[i], i) < best {
                        best = (row_count[i], i);
                        pivot_row = Some(i);
                    }
                }
            }
            match pivot_row {
                None => singular.push(k),
                Some(p) => {
                    let step = f.prow.len();
                    let piv = x[p];
                    let mut ucol = Vec::new();
                    let mut lcol = Vec::new();
                    for &i in &pattern {
                        let v = x[i];
                        if i == p || v.abs() < DROP {
                            continue;
                        }
                        match row_step[i] {
                            usize::MAX => lcol.push((i, v / piv)),
                            s => ucol.push((s, v)),
                        }
                    }
                    lcol.sort_unstable_by_key(|e| e.0);
                    ucol.sort_unstable_by_key(|e| e.0);
                    row_step[p] = step;
                    f.prow.push(p);
                    f.pcol.push(k);
                    f.factor_nnz += lcol.len() + ucol.len();
                    f.lcols.push(lcol);
                    f.ucols.push(ucol);
                    f.udiag.push(piv);
                }
            }
            for &i in &pattern {
                x[i] = 0.0;
                visited[i] = false;
            }
        }
        if singular.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&i| row_step[i] == usize::MAX).collect();
            Err(Singular { positions: singular, rows })
        }
    }

    /// True once the eta file is twice the size of the factors.
    pub fn eta_heavy(&self) -> bool {
        self.eta_nnz > 2 * self.factor_nnz
    }

    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Overwrites `a` (indexed by row) with `B^-1 a` (indexed by basis position).
    pub fn ftran(&self, a: &mut [f64]) {
        let steps = self.prow.len();
        for k in 0..steps {
            let v = a[self.prow[k]];
            if v != 0.0 {
                for &(r, l) in &self.lcols[k] {
                    a[r] -= l * v;
                }
            }
        }
        let mut z: Vec<f64> = self.prow.iter().map(|&p| a[p]).collect();
        for k in (0..steps).rev() {
            let w = z[k] / self.udiag[k];
            z[k] = w;
            if w != 0.0 {
                for &(j, u) in &self.ucols[k] {
                    z[j] -= u * w;
                }
            }
        }
        for (k, &c) in self.pcol.iter().enumerate() {
            a[c] = z[k];
        }
        for eta in &self.etas {
            let xr = a[eta.pos] / eta.pivot;
            a[eta.pos] = xr;
            if xr != 0.0 {
                for &(i, v) in &eta.entries {
                    a[i] -= v * xr;
                }
            }
        }
    }

    /// Overwrites `c` (indexed by basis position) with `B^-T c` (indexed by row).
    pub fn btran(&self, c: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let dot: f64 = eta.entries.iter().map(|&(i, v)| v * c[i]).sum();
            c[eta.pos] = (c[eta.pos] - dot) / eta.pivot;
        }
        let steps = self.prow.len();
        let mut v: Vec<f64> = self.pcol.iter().map(|&p| c[p]).collect();
        for k in 0..steps {
            let dot: f64 = self.ucols[k].iter().map(|&(j, u)| u * v[j]).sum();
            v[k] = (v[k] - dot) / self.udiag[k];
        }
        for k in (0..steps).rev() {
            let dot: f64 = self.lcols[k].iter().map(|&(r, l)| l * c[r]).sum();
            c[self.prow[k]] = v[k] - dot;
        }
    }

    /// Records that the column with representation `alpha = B^-1 a_q`
    /// replaced the basis column at position `pos`.
    pub fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, v)| i != pos && v.abs() >= DROP)
            .map(|(i, &v)| (i, v))
            .collect::<Vec<_>>();
        self.eta_nnz += entries.len() + 1;

        self.etas.push(Eta { pos, pivot: alpha[pos], entries });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m).map(|k| (0..m).filter(|&i| a[i][k] != 0.0).map(|i| (i, a[i][k])).collect()).collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    fn mat_t_vec(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        (0..a.len()).map(|k| (0..a.len()).map(|i| a[i][k] * y[i]).sum()).collect()
    }

    #[test]
    fn solves_match_matrix() {
        let a = vec![
            vec![2.0, 0.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.0, 0.0],
            vec![0.0, 1.0, 4.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let f = BasisFactor::new(4, &dense_cols(&a), 1e-11).unwrap();
        let b = vec![1.0, -2.0, 0.5, 3.0];
        let mut x = b.clone();
        f.ftran(&mut x);
        for (u, v) in matvec(&a, &x).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut y = b.clone();
        f.btran(&mut y);
        for (u, v) in mat_t_vec(&a, &y).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_matches_refactor() {
        let mut a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let mut f = BasisFactor::new(3, &dense_cols(&a), 1e-11).unwrap();
        let q = vec![2.0, 1.0, -1.0];
        let mut alpha = q.clone();
        f.ftran(&mut alpha);
        f.push_eta(1, &alpha);
        for i in 0..3 {
            a[i][1] = q[i];
        }
        let b = vec![0.3, 1.0, 2.0];
        let mut x = b.clone();
        f.ftran(&mut x);
        for (u, v) in matvec(&a, &x).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut y = b.clone();
        f.btran(&mut y);
        for (u, v) in mat_t_vec(&a, &y).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_singular_columns() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = BasisFactor::new(3, &dense_cols(&a), 1e-11).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
