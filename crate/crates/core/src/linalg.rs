//! Dense Gaussian elimination over a finite field given by [`FieldOps`] on packed codes.

use crate::ff::FieldOps;

/// Row-reduces `rows` in place to reduced echelon form, drops zero rows and returns the pivot
/// column of each remaining row.
pub fn rref<F: FieldOps + ?Sized>(f: &F, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = f.inv(rows[r][c]);
        if inv != 1 {
            for x in rows[r][c..].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0 {
                let nf = f.neg(factor);
                for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    if y != 0 {
                        *x = f.add(*x, f.mul(nf, y));
                    }
                }
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: FieldOps + ?Sized>(f: &F, mut rows: Vec<Vec<u32>>) -> usize {
    rref(f, &mut rows).len()
}

/// Basis of `{x : A x = 0}` for the `m x ncols` matrix given by rows.
pub fn kernel<F: FieldOps + ?Sized>(f: &F, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let mut a: Vec<Vec<u32>> = rows.to_vec();
    if a.is_empty() {
        return (0..ncols)
            .map(|i| {
                let mut v = vec![0; ncols];
                v[i] = 1;
                v
            })
            .collect();
    }
    let pivots = rref(f, &mut a);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; ncols];
        v[free] = 1;
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    basis
}

/// Transpose of a list of equal-length column vectors.
pub fn columns_to_rows(cols: &[Vec<u32>], nrows: usize) -> Vec<Vec<u32>> {
    let mut rows = vec![vec![0u32; cols.len()]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            rows[i][j] = x;
        }
    }
    rows
}

/// Kernel of the linear map whose images of the standard basis are `cols`.
pub fn kernel_of_columns<F: FieldOps + ?Sized>(
    f: &F,
    cols: &[Vec<u32>],
    nrows: usize,
) -> Vec<Vec<u32>> {
    kernel(f, &columns_to_rows(cols, nrows), cols.len())
}

/// `sum coeffs[k] * vectors[k]`.
pub fn combine<F: FieldOps + ?Sized>(f: &F, coeffs: &[u32], vectors: &[Vec<u32>]) -> Vec<u32> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut out = vec![0u32; n];
    for (&c, v) in coeffs.iter().zip(vectors) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(v) {
            if x != 0 {
                *o = f.add(*o, f.mul(c, x));
            }
        }
    }
    out
}

/// An incrementally built subspace of `F^n` in semi-echelon form.
///
/// Optionally tracks, for each stored row, its expression in terms of the vectors that were
/// accepted by [`Subspace::insert`], which makes [`Subspace::coordinates`] available.
pub struct Subspace<'a, F: FieldOps + ?Sized> {
    field: &'a F,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    combos: Option<Vec<Vec<u32>>>,
}

impl<'a, F: FieldOps + ?Sized> Subspace<'a, F> {
    pub fn new(field: &'a F, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: None,
        }
    }

    pub fn with_coordinates(field: &'a F, ambient: usize) -> Self {
        Subspace {
            combos: Some(Vec::new()),
            ..Self::new(field, ambient)
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Residual of `v` after elimination, plus the combination of stored rows removed.
    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let f = self.field;
        let mut w = v.to_vec();
        let mut used = vec![0u32; self.rows.len()];
        for (k, (row, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = w[pc];
            if c == 0 {
                continue;
            }
            used[k] = c;
            let nc = f.neg(c);
            for (x, &y) in w.iter_mut().zip(row) {
                if y != 0 {
                    *x = f.add(*x, f.mul(nc, y));
                }
            }
        }
        (w, used)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let (mut w, used) = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pc]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        if let Some(combos) = self.combos.as_mut() {
            // new row = inv * (v - sum used_k row_k), with row_k = sum combos[k][j] gen_j
            let ngen = combos.len() + 1;
            let mut expr = vec![0u32; ngen];
            expr[ngen - 1] = inv;
            for (k, &u) in used.iter().enumerate() {
                if u == 0 {
                    continue;
                }
                let s = f.neg(f.mul(inv, u));
                for (j, &c) in combos[k].iter().enumerate() {
                    expr[j] = f.add(expr[j], f.mul(s, c));
                }
            }
            combos.push(expr);
        }
        self.rows.push(w);
        self.pivots.push(pc);
        true
    }

    /// Coefficients of `v` in terms of the accepted vectors, in insertion order.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let combos = self.combos.as_ref()?;
        let (w, used) = self.reduce(v);
        if w.iter().any(|&x| x != 0) {
            return None;
        }
        let f = self.field;
        let mut out = vec![0u32; combos.len()];
        for (k, &u) in used.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &c) in combos[k].iter().enumerate() {
                out[j] = f.add(out[j], f.mul(u, c));
            }
        }
        Some(out)
    }

    /// A basis of the subspace in reduced echelon form.
    pub fn echelon_basis(&self) -> Vec<Vec<u32>> {
        let mut rows = self.rows.clone();
        rref(self.field, &mut rows);
        rows
    }
}
