//! Sparse exact Gaussian elimination over ℚ.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::Q;

/// Sparse vector: coordinate index to nonzero coefficient.
pub type SVec = BTreeMap<usize, Q>;

pub fn unit(i: usize) -> SVec {
    let mut v = SVec::new();
    v.insert(i, Q::one());
    v
}

/// `v += c·w`, dropping cancelled entries.
pub fn axpy(v: &mut SVec, c: &Q, w: &SVec) {
    if c.is_zero() {
        return;
    }
    for (k, a) in w {
        let e = v.entry(*k).or_insert_with(Q::zero);
        *e += c * a;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

pub fn scaled(v: &SVec, c: &Q) -> SVec {
    if c.is_zero() {
        return SVec::new();
    }
    v.iter().map(|(k, a)| (*k, a * c)).collect()
}

#[derive(Clone, Debug)]
struct Row {
    vec: SVec,
    tag: SVec,
}

/// Incremental row echelon form. Each stored row has pivot equal to its
/// smallest index with coefficient 1, and remembers (when tracking) how it was
/// combined from the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    by_pivot: HashMap<usize, usize>,
    track: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    /// Record combination tags so that kernels and solutions can be read off.
    pub fn tracking() -> Self {
        Echelon { track: true, ..Echelon::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| *r.vec.keys().next().expect("nonzero row"))
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.by_pivot.contains_key(&i)
    }

    pub fn rows(&self) -> impl Iterator<Item = &SVec> {
        self.rows.iter().map(|r| &r.vec)
    }

    /// Reduce `v` (with companion `tag`) against the stored rows.
    pub fn reduce_tagged(&self, mut v: SVec, mut tag: SVec) -> (SVec, SVec) {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(k, _)| self.by_pivot.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let row = &self.rows[self.by_pivot[&k]];
            let neg = -c;
            axpy(&mut v, &neg, &row.vec);
            if self.track {
                axpy(&mut tag, &neg, &row.tag);
            }
            cursor = k + 1;
        }
        (v, tag)
    }

    pub fn reduce(&self, v: SVec) -> SVec {
        self.reduce_tagged(v, SVec::new()).0
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Insert `v` labelled by `tag`. Returns `Some(kernel tag)` when `v` was
    /// already in the span (the tag then records a linear relation).
    pub fn insert_tagged(&mut self, v: SVec, tag: SVec) -> Option<SVec> {
        let (mut v, mut tag) = self.reduce_tagged(v, tag);
        let Some((&p, c)) = v.iter().next() else {
            return Some(tag);
        };
        let inv = Q::one() / c;
        v = scaled(&v, &inv);
        if self.track {
            tag = scaled(&tag, &inv);
        }
        self.by_pivot.insert(p, self.rows.len());
        self.rows.push(Row { vec: v, tag });
        None
    }

    /// Insert without tags; returns whether the rank grew.
    pub fn insert(&mut self, v: SVec) -> bool {
        let tag = SVec::new();
        self.insert_tagged(v, tag).is_none()
    }

    /// Express `b` through the inserted vectors: returns `x` with
    /// `Σ x_k · inserted_k = b` in terms of their tags, or `None`.
    pub fn solve(&self, b: &SVec) -> Option<SVec> {
        debug_assert!(self.track);
        let (rem, tag) = self.reduce_tagged(b.clone(), SVec::new());
        if rem.is_empty() {
            Some(scaled(&tag, &-Q::one()))
        } else {
            None
        }
    }

    /// Stored rows whose pivot satisfies `pred`. With coordinates ordered so
    /// that "outside" indices come first, the rows with inside pivots span the
    /// intersection of the row space with the inside coordinate subspace.
    pub fn rows_with_pivot(&self, mut pred: impl FnMut(usize) -> bool) -> Vec<SVec> {
        self.rows
            .iter()
            .filter(|r| pred(*r.vec.keys().next().expect("nonzero")))
            .map(|r| r.vec.clone())
            .collect()
    }
}

/// Columns of a linear map (each column a sparse vector in the target).
#[derive(Clone, Debug, Default)]
pub struct ColMatrix {
    pub nrows: usize,
    pub cols: Vec<SVec>,
}

impl ColMatrix {
    pub fn new(nrows: usize, cols: Vec<SVec>) -> Self {
        ColMatrix { nrows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new();
        for c in &self.cols {
            e.insert(c.clone());
        }
        e.rank()
    }

    /// Rank computed on the transpose; an independent check of [`ColMatrix::rank`].
    pub fn rank_transpose(&self) -> usize {
        let mut rows: Vec<SVec> = vec![SVec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, a) in c {
                rows[*i].insert(j, a.clone());
            }
        }
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r);
        }
        e.rank()
    }

    /// A basis of the kernel, as vectors of column coefficients.
    pub fn kernel(&self) -> Vec<SVec> {
        let mut e = Echelon::tracking();
        let mut out = Vec::new();
        for (j, c) in self.cols.iter().enumerate() {
            if let Some(k) = e.insert_tagged(c.clone(), unit(j)) {
                out.push(k);
            }
        }
        out
    }

    pub fn apply(&self, x: &SVec) -> SVec {
        let mut out = SVec::new();
        for (j, c) in x {
            axpy(&mut out, c, &self.cols[*j]);
        }
        out
    }

    /// Some `x` with `self · x = b`.
    pub fn solve(&self, b: &SVec) -> Option<SVec> {
        let mut e = Echelon::tracking();
        for (j, c) in self.cols.iter().enumerate() {
            e.insert_tagged(c.clone(), unit(j));
        }
        e.solve(b)
    }
}

/// Small dense matrices over ℚ for constant-coefficient bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut m = DenseMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        DenseMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &DenseMat) -> DenseMat {
        assert_eq!(self.cols, other.rows);
        DenseMat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Q::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new();
        for i in 0..self.rows {
            let r: SVec = (0..self.cols).filter(|&j| !self[(i, j)].is_zero()).map(|j| (j, self[(i, j)].clone())).collect();
            e.insert(r);
        }
        e.rank()
    }

    /// Inverse by Gauss–Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<DenseMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = DenseMat::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
                inv.data.swap(p * n + j, c * n + j);
            }
            let f = Q::one() / &a[(c, c)];
            for j in 0..n {
                a[(c, j)] *= &f;
                inv[(c, j)] *= &f;
            }
            for r in 0..n {
                if r != c && !a[(r, c)].is_zero() {
                    let g = a[(r, c)].clone();
                    for j in 0..n {
                        let t = &g * &a[(c, j)];
                        a[(r, j)] -= t;
                        let t = &g * &inv[(c, j)];
                        inv[(r, j)] -= t;
                    }
                }
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::q;

    fn v(entries: &[(usize, i64)]) -> SVec {
        entries.iter().map(|&(i, c)| (i, q(c))).collect()
    }

    #[test]
    fn kernel_and_rank() {
        let m = ColMatrix::new(2, vec![v(&[(0, 1), (1, 1)]), v(&[(0, 2), (1, 2)]), v(&[(1, 1)])]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_transpose(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn solve_roundtrip() {
        let m = ColMatrix::new(3, vec![v(&[(0, 1), (2, 3)]), v(&[(1, 2)])]);
        let b = v(&[(0, 2), (1, 4), (2, 6)]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        assert!(m.solve(&v(&[(2, 1)])).is_none());
    }

    #[test]
    fn intersection_by_pivot_order() {
        // span{e0 + e2, e0 + e3} meets span{e2, e3} in span{e2 - e3}
        let mut e = Echelon::new();
        e.insert(v(&[(0, 1), (2, 1)]));
        e.insert(v(&[(0, 1), (3, 1)]));
        let inside = e.rows_with_pivot(|p| p >= 2);
        assert_eq!(inside, vec![v(&[(2, 1), (3, -1)])]);
    }

    #[test]
    fn dense_inverse() {
        let m = DenseMat::from_fn(2, 2, |i, j| q([[2, 1], [1, 1]][i][j]));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMat::identity(2));
        assert!(DenseMat::zeros(2, 2).inverse().is_none());
    }
}
