//! Exact linear algebra: sparse vectors and dense matrices over a [`Ring`],
//! with elimination routines over a [`Field`].

use std::collections::BTreeMap;

use crate::coeff::{Field, Ring};

/// Sparse vector in a finite free module, keyed by basis index. Never stores zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector<R> {
    entries: BTreeMap<usize, R>,
}

impl<R: Ring> Default for Vector<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Ring> Vector<R> {
    pub fn zero() -> Self {
        Vector { entries: BTreeMap::new() }
    }

    pub fn basis(i: usize) -> Self {
        Self::single(i, R::one())
    }

    pub fn single(i: usize, c: R) -> Self {
        let mut v = Self::zero();
        v.add_term(i, &c);
        v
    }

    pub fn from_dense(values: &[R]) -> Self {
        let mut v = Self::zero();
        for (i, c) in values.iter().enumerate() {
            v.add_term(i, c);
        }
        v
    }

    pub fn to_dense(&self, len: usize) -> Vec<R> {
        let mut out = vec![R::zero(); len];
        for (&i, c) in &self.entries {
            out[i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> R {
        self.entries.get(&i).cloned().unwrap_or_else(R::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &R)> {
        self.entries.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: &R) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&i) {
            Some(e) => {
                let s = e.add(c);
                if s.is_zero() {
                    self.entries.remove(&i);
                } else {
                    *e = s;
                }
            }
            None => {
                self.entries.insert(i, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &R) {
        if c.is_zero() {
            return;
        }
        for (&i, x) in &other.entries {
            self.add_term(i, &x.mul(c));
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (&i, x) in &other.entries {
            self.add_term(i, x);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &R::one().neg());
        out
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|(&i, c)| (i, c.neg())).collect() }
    }

    /// Coefficientwise image under a map of scalars.
    pub fn map_scalars<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> Vector<S> {
        let mut out = Vector::zero();
        for (&i, c) in &self.entries {
            out.add_term(i, &f(c));
        }
        out
    }

    pub fn try_map_scalars<S: Ring, E>(&self, mut f: impl FnMut(&R) -> Result<S, E>) -> Result<Vector<S>, E> {
        let mut out = Vector::zero();
        for (&i, c) in &self.entries {
            out.add_term(i, &f(c)?);
        }
        Ok(out)
    }

    /// Reindexes basis elements.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero();
        for (&i, c) in &self.entries {
            out.add_term(f(i), c);
        }
        out
    }
}

impl<R: Ring> FromIterator<(usize, R)> for Vector<R> {
    fn from_iter<T: IntoIterator<Item = (usize, R)>>(iter: T) -> Self {
        let mut v = Vector::zero();
        for (i, c) in iter {
            v.add_term(i, &c);
        }
        v
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given sparse vectors.
    pub fn from_columns(rows: usize, cols: &[Vector<R>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, v) in cols.iter().enumerate() {
            for (i, c) in v.iter() {
                m.set(i, j, c.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<R> {
        (0..self.rows).map(|i| (i, self.get(i, j).clone())).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.neg()).collect() }
    }

    pub fn apply(&self, v: &Vector<R>) -> Vector<R> {
        let mut out = Vector::zero();
        for (j, c) in v.iter() {
            for i in 0..self.rows {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out.add_term(i, &a.mul(c));
                }
            }
        }
        out
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Matrix<S>, E> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_, _>>()? })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += c * row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, c: &R) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(source, j);
            if !s.is_zero() {
                let v = self.get(target, j).add(&c.mul(s));
                self.set(target, j, v);
            }
        }
    }

    /// col[target] += c * col[source]
    pub fn add_col_multiple(&mut self, target: usize, source: usize, c: &R) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, source);
            if !s.is_zero() {
                let v = self.get(i, target).add(&c.mul(s));
                self.set(i, target, v);
            }
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &R) {
        for j in 0..self.cols {
            let v = self.get(i, j).mul(c);
            self.set(i, j, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &R) {
        for i in 0..self.rows {
            let v = self.get(i, j).mul(c);
            self.set(i, j, v);
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }
}

/// Reduced row echelon form of a matrix over a field.
#[derive(Debug, Clone)]
pub struct Rref<F> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv();
            m.scale_row(r, &inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c).clone();
                    if !f.is_zero() {
                        m.add_row_multiple(i, r, &f.neg());
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space, one vector per free column (free variable set to 1).
    pub fn kernel(&self) -> Vec<Vector<F>> {
        let Rref { matrix, pivots } = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = Vector::basis(free);
            for (r, &pc) in pivots.iter().enumerate() {
                let a = matrix.get(r, free);
                if !a.is_zero() {
                    v.add_term(pc, &a.neg());
                }
            }
            out.push(v);
        }
        out
    }

    /// A solution of `self * x = b` with free variables zero, if one exists.
    pub fn solve(&self, b: &Vector<F>) -> Option<Vector<F>> {
        let aug = self.hstack(&Matrix::from_columns(self.rows, std::slice::from_ref(b)));
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = Vector::zero();
        for (r, &pc) in pivots.iter().enumerate() {
            x.add_term(pc, matrix.get(r, self.cols));
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let Rref { matrix, pivots } = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, matrix.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// Incremental column echelon basis of a subspace, remembering how each
/// stored vector is expressed in the inserted generators.
#[derive(Debug, Clone)]
pub struct Echelon<F> {
    rows: Vec<(usize, Vector<F>, Vector<F>)>,
    inserted: usize,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored basis; returns (remainder, combination)
    /// with `v = remainder + Σ combination_k · generator_k`.
    pub fn reduce(&self, v: &Vector<F>) -> (Vector<F>, Vector<F>) {
        let mut rem = v.clone();
        let mut comb = Vector::zero();
        for (pivot, row, row_comb) in &self.rows {
            let c = rem.get(*pivot);
            if !c.is_zero() {
                rem.add_scaled(row, &c.neg());
                comb.add_scaled(row_comb, &c);
            }
        }
        (rem, comb)
    }

    /// Inserts a generator; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &Vector<F>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (rem, comb) = self.reduce(v);
        let Some((pivot, lead)) = rem.iter().next().map(|(i, c)| (i, c.clone())) else {
            return false;
        };
        let inv = lead.inv();
        let mut comb = comb.neg();
        comb.add_term(id, &F::one());
        let row = rem.scale(&inv);
        let comb = comb.scale(&inv);
        // keep rows reduced against each other on the new pivot
        for (_, r, rc) in &mut self.rows {
            let c = r.get(pivot);
            if !c.is_zero() {
                r.add_scaled(&row, &c.neg());
                rc.add_scaled(&comb, &c.neg());
            }
        }
        self.rows.push((pivot, row, comb));
        true
    }

    pub fn contains(&self, v: &Vector<F>) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coefficients expressing `v` in the inserted generators, if `v` is in the span.
    pub fn express(&self, v: &Vector<F>) -> Option<Vector<F>> {
        let (rem, comb) = self.reduce(v);
        rem.is_zero().then_some(comb)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn kernel_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).is_zero());
        }
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        let b = Vector::from_dense(&[q(3), q(2)]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        let singular = m(&[&[1, 1], &[1, 1]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&Vector::from_dense(&[q(1), q(0)])).is_none());
    }

    #[test]
    fn echelon_expresses_in_generators() {
        let mut e = Echelon::new();
        let g0 = Vector::from_dense(&[q(1), q(1), q(0)]);
        let g1 = Vector::from_dense(&[q(0), q(1), q(1)]);
        assert!(e.insert(&g0));
        assert!(e.insert(&g1));
        assert!(!e.insert(&g0.plus(&g1)));
        let target = g0.scale(&q(2)).minus(&g1);
        let c = e.express(&target).unwrap();
        let rebuilt = g0.scale(&c.get(0)).plus(&g1.scale(&c.get(1)));
        assert_eq!(rebuilt, target);
        assert!(e.express(&Vector::basis(0)).is_none());
    }
}
