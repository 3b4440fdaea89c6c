//! Sparse matrices over `F_p`.
//!
//! The tensor-power kernels produce matrices whose dimension grows like
//! `(total dim)^p` but whose rows stay a few entries wide (signed
//! permutations, Koszul-signed differentials). Everything here is stored
//! sparsely: a row is a sorted list of `(column, nonzero value)` pairs.

use serde_json::Value;

use crate::scalar::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpMat {
    field: PrimeField,
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, u64)>>,
}

impl SpMat {
    pub fn zero(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        SpMat {
            field,
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.rows[i].push((i, 1));
        }
        m
    }

    pub fn from_triplets(
        field: PrimeField,
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        let mut dense: Vec<std::collections::BTreeMap<usize, u64>> = vec![Default::default(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            let v = field.from_i64(v);
            let e = dense[r].entry(c).or_insert(0);
            *e = field.add(*e, v);
        }
        let rows = dense
            .into_iter()
            .map(|m| m.into_iter().filter(|&(_, v)| v != 0).collect())
            .collect();
        SpMat {
            field,
            nrows,
            ncols,
            rows,
        }
    }

    pub fn from_dense(field: PrimeField, entries: &[Vec<i64>]) -> Self {
        let nrows = entries.len();
        let ncols = entries.first().map_or(0, |r| r.len());
        let mut triplets = Vec::new();
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(field, nrows, ncols, triplets)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(j, _)| j)
            .map(|k| self.rows[r][k].1)
            .unwrap_or(0)
    }

    pub fn row(&self, r: usize) -> &[(usize, u64)] {
        &self.rows[r]
    }

    fn set_row(&mut self, r: usize, row: Vec<(usize, u64)>) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        self.rows[r] = row;
    }

    pub fn add(&self, other: &SpMat) -> SpMat {
        self.zip(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &SpMat) -> SpMat {
        self.zip(other, |f, a, b| f.sub(a, b))
    }

    fn zip(&self, other: &SpMat, op: impl Fn(&PrimeField, u64, u64) -> u64) -> SpMat {
        assert_eq!(self.field, other.field);
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = SpMat::zero(self.field, self.nrows, self.ncols);
        for r in 0..self.nrows {
            let mut row = Vec::new();
            let (a, b) = (&self.rows[r], &other.rows[r]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let (c, v) = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                    let t = (a[i].0, op(&self.field, a[i].1, 0));
                    i += 1;
                    t
                } else if i >= a.len() || b[j].0 < a[i].0 {
                    let t = (b[j].0, op(&self.field, 0, b[j].1));
                    j += 1;
                    t
                } else {
                    let t = (a[i].0, op(&self.field, a[i].1, b[j].1));
                    i += 1;
                    j += 1;
                    t
                };
                if v != 0 {
                    row.push((c, v));
                }
            }
            out.set_row(r, row);
        }
        out
    }

    pub fn neg(&self) -> SpMat {
        self.scale(self.field.modulus() - 1)
    }

    pub fn scale(&self, s: u64) -> SpMat {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.retain_mut(|(_, v)| {
                *v = self.field.mul(*v, s);
                *v != 0
            });
        }
        out
    }

    /// Matrix product `self * other` (column-vector convention: this is the
    /// composition "other, then self").
    pub fn mul(&self, other: &SpMat) -> SpMat {
        assert_eq!(self.field, other.field);
        assert_eq!(
            self.ncols, other.nrows,
            "shape mismatch: {}x{} * {}x{}",
            self.nrows, self.ncols, other.nrows, other.ncols
        );
        let mut out = SpMat::zero(self.field, self.nrows, other.ncols);
        for r in 0..self.nrows {
            let mut acc: std::collections::BTreeMap<usize, u64> = Default::default();
            for &(k, v) in &self.rows[r] {
                for &(c, w) in &other.rows[k] {
                    let e = acc.entry(c).or_insert(0);
                    *e = self.field.add(*e, self.field.mul(v, w));
                }
            }
            out.set_row(r, acc.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        out
    }

    pub fn transpose(&self) -> SpMat {
        let mut out = SpMat::zero(self.field, self.ncols, self.nrows);
        let mut cols: Vec<Vec<(usize, u64)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        for (c, col) in cols.into_iter().enumerate() {
            out.set_row(c, col);
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ncols);
        let mut out = vec![0u64; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = 0u64;
            for &(c, w) in row {
                acc = self.field.add(acc, self.field.mul(w, v[c] % self.field.modulus()));
            }
            out[r] = acc;
        }
        out
    }

    /// Restriction to row indices `rows` and column indices `cols`
    /// (the block of the matrix supported there).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SpMat {
        let col_pos: std::collections::HashMap<usize, usize> =
            cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = SpMat::zero(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            let mut row: Vec<(usize, u64)> = self.rows[r]
                .iter()
                .filter_map(|&(c, v)| col_pos.get(&c).map(|&j| (j, v)))
                .collect();
            row.sort_unstable_by_key(|&(j, _)| j);
            out.set_row(i, row);
        }
        out
    }

    // ---- elimination ----

    /// Row-reduced echelon form. Returns the reduced rows (zero rows
    /// dropped) and the pivot column of each.
    pub fn rref(&self) -> (Vec<Vec<(usize, u64)>>, Vec<usize>) {
        let f = self.field;
        let mut work: Vec<std::collections::BTreeMap<usize, u64>> = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.iter().copied().collect())
            .collect();
        let mut done: Vec<(usize, std::collections::BTreeMap<usize, u64>)> = Vec::new();
        while let Some(best) = (0..work.len()).min_by_key(|&i| *work[i].keys().next().unwrap()) {
            let mut row = work.swap_remove(best);
            let pivot = *row.keys().next().unwrap();
            let inv = f.inv(row[&pivot]);
            for v in row.values_mut() {
                *v = f.mul(*v, inv);
            }
            // eliminate from remaining work rows
            let mut i = 0;
            while i < work.len() {
                let c = work[i].get(&pivot).copied().unwrap_or(0);
                if c != 0 {
                    eliminate(&f, &mut work[i], &row, c);
                    if work[i].is_empty() {
                        work.swap_remove(i);
                        continue;
                    }
                }
                i += 1;
            }
            // and from already-finished rows (full reduction)
            for (_, drow) in done.iter_mut() {
                let c = drow.get(&pivot).copied().unwrap_or(0);
                if c != 0 {
                    eliminate(&f, drow, &row, c);
                }
            }
            done.push((pivot, row));
        }
        done.sort_by_key(|(p, _)| *p);
        let pivots = done.iter().map(|(p, _)| *p).collect();
        let rows = done
            .into_iter()
            .map(|(_, r)| r.into_iter().collect())
            .collect();
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `ker(self)` as dense vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let (rows, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; self.ncols];
            v[free] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                let c = row
                    .iter()
                    .find(|&&(j, _)| j == free)
                    .map(|&(_, x)| x)
                    .unwrap_or(0);
                if c != 0 {
                    v[p] = f.neg(c);
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn kernel_dim(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Solve `self * x = b`; `None` when inconsistent. Free variables are
    /// set to zero, so the solution is deterministic.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.nrows);
        let f = self.field;
        let mut aug = SpMat::zero(f, self.nrows, self.ncols + 1);
        for (r, row) in self.rows.iter().enumerate() {
            let mut new_row = row.clone();
            let bv = b[r] % f.modulus();
            if bv != 0 {
                new_row.push((self.ncols, bv));
            }
            aug.set_row(r, new_row);
        }
        let (rows, pivots) = aug.rref();
        let mut x = vec![0u64; self.ncols];
        for (row, &p) in rows.iter().zip(&pivots) {
            if p == self.ncols {
                return None; // 0 = 1 row
            }
            let rhs = row
                .iter()
                .find(|&&(j, _)| j == self.ncols)
                .map(|&(_, v)| v)
                .unwrap_or(0);
            // free variables are pinned to zero, so the pivot carries the rhs
            x[p] = rhs;
        }
        // verify (cheap, and guards the free-variable convention)
        if self.apply(&x) == b.iter().map(|&v| v % f.modulus()).collect::<Vec<_>>() {
            Some(x)
        } else {
            None
        }
    }

    /// Echelon basis of the column space (image), as reduced row vectors of
    /// the transpose. Useful for canonical coset representatives.
    pub fn image_echelon(&self) -> Vec<Vec<(usize, u64)>> {
        self.transpose().rref().0
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[r][c] = v;
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "rows": self.nrows,
            "cols": self.ncols,
            "entries": self.to_dense(),
        })
    }
}

fn eliminate(
    f: &PrimeField,
    target: &mut std::collections::BTreeMap<usize, u64>,
    pivot_row: &std::collections::BTreeMap<usize, u64>,
    factor: u64,
) {
    for (&c, &v) in pivot_row {
        let cur = target.get(&c).copied().unwrap_or(0);
        let nv = f.sub(cur, f.mul(factor, v));
        if nv == 0 {
            target.remove(&c);
        } else {
            target.insert(c, nv);
        }
    }
}

/// Reduce a dense vector against echelon rows (as returned by
/// [`SpMat::image_echelon`]), yielding the canonical coset representative.
pub fn reduce_against_echelon(f: &PrimeField, v: &[u64], rows: &[Vec<(usize, u64)>]) -> Vec<u64> {
    let mut out: Vec<u64> = v.iter().map(|&x| x % f.modulus()).collect();
    for row in rows {
        let &(pivot, pval) = match row.first() {
            Some(t) => t,
            None => continue,
        };
        let c = out[pivot];
        if c != 0 {
            let factor = f.mul(c, f.inv(pval));
            for &(j, w) in row {
                out[j] = f.sub(out[j], f.mul(factor, w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn mul_identity() {
        let m = SpMat::from_dense(f3(), &[vec![1, 2], vec![0, 1], vec![2, 2]]);
        let id = SpMat::identity(f3(), 2);
        assert_eq!(m.mul(&id), m);
    }

    #[test]
    fn rank_and_kernel() {
        // circulant P - I over F_3 where P is the 3-cycle: rank 2, kernel = <(1,1,1)>
        let p = SpMat::from_dense(f3(), &[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let tau = p.sub(&SpMat::identity(f3(), 3));
        assert_eq!(tau.rank(), 2);
        let ker = tau.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert_eq!(tau.apply(&ker[0]), vec![0, 0, 0]);

        // norm = I + P + P^2: rank 1
        let norm = SpMat::identity(f3(), 3).add(&p).add(&p.mul(&p));
        assert_eq!(norm.rank(), 1);
        assert_eq!(norm.kernel_dim(), 2);
    }

    #[test]
    fn solve_small() {
        let m = SpMat::from_dense(f3(), &[vec![1, 1], vec![0, 1]]);
        let x = m.solve(&[2, 1]).unwrap();
        assert_eq!(m.apply(&x), vec![2, 1]);
        // inconsistent: zero row equals nonzero rhs
        let z = SpMat::zero(f3(), 1, 2);
        assert!(z.solve(&[1]).is_none());
    }

    #[test]
    fn coset_reduction() {
        let f = f3();
        let m = SpMat::from_dense(f, &[vec![1], vec![1], vec![1]]); // image = <(1,1,1)>
        let ech = m.image_echelon();
        let red = reduce_against_echelon(&f, &[2, 2, 2], &ech);
        assert_eq!(red, vec![0, 0, 0]);
        let red = reduce_against_echelon(&f, &[1, 0, 0], &ech);
        assert_eq!(red, vec![0, 2, 2]); // (1,0,0) - (1,1,1)
    }
}
