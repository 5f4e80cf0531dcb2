//! Graded spaces, graded linear maps, sparse multilinear operations and the
//! sign bookkeeping shared by every relation in the engine.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::coeff::{Field, Ring};
use crate::linalg::{Matrix, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("arity mismatch: operation has arity {expected}, got {found} arguments")]
    Arity { expected: usize, found: usize },
    #[error("degree violation at {entry}: inputs have total degree {input}, operation degree {op}, output term {output} has degree {output_degree}")]
    Degree { entry: String, input: i32, op: i32, output: String, output_degree: i32 },
    #[error("index {0} out of range")]
    Index(usize),
}

/// Finite free graded module with a labelled basis, ordered by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    labels: Vec<String>,
    degrees: Vec<i32>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    /// Builds a space from `(label, degree)` pairs. Basis order is by degree,
    /// keeping the given order within a degree.
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, i32)>) -> Result<Self, GradedError> {
        let mut items: Vec<(String, i32)> = basis.into_iter().map(|(l, d)| (l.into(), d)).collect();
        items.sort_by_key(|(_, d)| *d);
        let mut index = HashMap::new();
        for (i, (l, _)) in items.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(GradedError::DuplicateLabel(l.clone()));
            }
        }
        let (labels, degrees) = items.into_iter().unzip();
        Ok(GradedSpace { labels, degrees, index })
    }

    pub fn zero() -> Self {
        GradedSpace { labels: Vec::new(), degrees: Vec::new(), index: HashMap::new() }
    }

    /// Space with `dims[d]` basis vectors `prefix{d}_{i}` in each listed degree.
    pub fn with_dims(prefix: &str, dims: &BTreeMap<i32, usize>) -> Self {
        let basis = dims
            .iter()
            .flat_map(|(&d, &n)| (0..n).map(move |i| (format!("{prefix}{d}_{i}"), d)))
            .collect::<Vec<_>>();
        Self::new(basis).expect("generated labels are unique")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize, GradedError> {
        self.index.get(label).copied().ok_or_else(|| GradedError::UnknownLabel(label.to_string()))
    }

    /// Sorted list of degrees carrying at least one basis vector.
    pub fn support(&self) -> Vec<i32> {
        let set: BTreeSet<i32> = self.degrees.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn has_degree(&self, d: i32) -> bool {
        self.degrees.binary_search(&d).is_ok()
    }

    /// Basis indices in degree `d` (contiguous because the basis is sorted).
    pub fn indices_in(&self, d: i32) -> std::ops::Range<usize> {
        let start = self.degrees.partition_point(|&x| x < d);
        let end = self.degrees.partition_point(|&x| x <= d);
        start..end
    }

    pub fn dim_in(&self, d: i32) -> usize {
        self.indices_in(d).len()
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.support().into_iter().map(|d| (d, self.dim_in(d))).collect()
    }

    /// Direct sum; labels of the second summand get `suffix` appended on
    /// collision. Returns the sum and the positions of both summands' bases.
    pub fn direct_sum(&self, other: &Self, suffix: &str) -> (Self, Vec<usize>, Vec<usize>) {
        let mut basis: Vec<(String, i32)> = self.labels.iter().cloned().zip(self.degrees.iter().copied()).collect();
        let mut second = Vec::new();
        for (l, &d) in other.labels.iter().zip(&other.degrees) {
            let mut l = l.clone();
            while self.index.contains_key(&l) {
                l.push_str(suffix);
            }
            second.push(l.clone());
            basis.push((l, d));
        }
        let sum = Self::new(basis).expect("suffix resolves collisions");
        let a = self.labels.iter().map(|l| sum.index[l]).collect();
        let b = second.iter().map(|l| sum.index[l]).collect();
        (sum, a, b)
    }

    /// Same labels, every degree shifted by `shift`.
    pub fn shifted(&self, shift: i32) -> Self {
        Self::new(self.labels.iter().cloned().zip(self.degrees.iter().map(|d| d + shift))).unwrap()
    }

    /// Degree of a homogeneous nonzero vector, or `None` if zero or inhomogeneous.
    pub fn vector_degree<R: Ring>(&self, v: &Vector<R>) -> Option<i32> {
        let mut degs = v.support().map(|i| self.degrees[i]);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

// ---------------------------------------------------------------------------
// Signs

/// `(-1)^e` as a ring element.
pub fn sign<R: Ring>(e: i64) -> R {
    if e.rem_euclid(2) == 0 {
        R::one()
    } else {
        R::one().neg()
    }
}

/// The single home of every sign used by relations, compositions and the bar
/// construction.
#[derive(Debug, Clone, Copy)]
pub struct SignConvention;

impl SignConvention {
    /// Exponent `jk + l` of the Stasheff relation term `m_{j+1+l}(id^j ⊗ m_k ⊗ id^l)`.
    pub fn stasheff(j: usize, k: usize, l: usize) -> i64 {
        (j * k + l) as i64
    }

    /// Exponent `s = Σ_{2≤u≤r} (1 − i_u) Σ_{v<u} i_v` for a composition
    /// `m_r(f_{i_1} ⊗ … ⊗ f_{i_r})`. The inner sum is over strictly smaller indices.
    pub fn morphism(blocks: &[usize]) -> i64 {
        let mut s = 0i64;
        let mut prefix = 0i64;
        for (u, &i) in blocks.iter().enumerate() {
            if u >= 1 {
                s += (1 - i as i64) * prefix;
            }
            prefix += i as i64;
        }
        s
    }

    /// Koszul exponent for moving a map of degree `map_degree` past elements of
    /// total degree `passed`.
    pub fn koszul(map_degree: i32, passed: i32) -> i64 {
        map_degree as i64 * passed as i64
    }

    /// Exponent `i − 1 + deg m_i` of the suspension `d_i = ± s ∘ m_i ∘ (s^{-1})^{⊗i}`.
    pub fn suspension(arity: usize, op_degree: i32) -> i64 {
        arity as i64 - 1 + op_degree as i64
    }

    /// Koszul exponent of `(s^{-1})^{⊗i}` applied to `s x_1 ⊗ … ⊗ s x_i`:
    /// `Σ_v (i − v)(|x_v| − 1)` with `v` counted from 1.
    pub fn desuspension(degrees: &[i32]) -> i64 {
        let i = degrees.len() as i64;
        degrees.iter().enumerate().map(|(v, &d)| (i - v as i64 - 1) * (d as i64 - 1)).sum()
    }
}

// ---------------------------------------------------------------------------
// Graded maps

/// Homogeneous linear map between graded spaces, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap<R> {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i32,
    columns: Vec<Vector<R>>,
}

impl<R: Ring> GradedMap<R> {
    pub fn zero(source: &GradedSpace, target: &GradedSpace, degree: i32) -> Self {
        GradedMap { source: source.clone(), target: target.clone(), degree, columns: vec![Vector::zero(); source.dim()] }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        GradedMap {
            source: space.clone(),
            target: space.clone(),
            degree: 0,
            columns: (0..space.dim()).map(Vector::basis).collect(),
        }
    }

    /// Builds a map from column images; checks homogeneity.
    pub fn from_columns(
        source: &GradedSpace,
        target: &GradedSpace,
        degree: i32,
        columns: Vec<Vector<R>>,
    ) -> Result<Self, GradedError> {
        if columns.len() != source.dim() {
            return Err(GradedError::SpaceMismatch(format!(
                "{} columns for a source of dimension {}",
                columns.len(),
                source.dim()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for (i, _) in col.iter() {
                if i >= target.dim() {
                    return Err(GradedError::Index(i));
                }
                if target.degree(i) != source.degree(j) + degree {
                    return Err(GradedError::Degree {
                        entry: source.label(j).to_string(),
                        input: source.degree(j),
                        op: degree,
                        output: target.label(i).to_string(),
                        output_degree: target.degree(i),
                    });
                }
            }
        }
        Ok(GradedMap { source: source.clone(), target: target.clone(), degree, columns })
    }

    pub fn column(&self, j: usize) -> &Vector<R> {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector<R>] {
        &self.columns
    }

    pub fn apply(&self, v: &Vector<R>) -> Vector<R> {
        let mut out = Vector::zero();
        for (j, c) in v.iter() {
            out.add_scaled(&self.columns[j], c);
        }
        out
    }

    /// `self ∘ f`
    pub fn compose(&self, f: &GradedMap<R>) -> Result<Self, GradedError> {
        if f.target != self.source {
            return Err(GradedError::SpaceMismatch("composition of non-composable maps".into()));
        }
        Ok(GradedMap {
            source: f.source.clone(),
            target: self.target.clone(),
            degree: self.degree + f.degree,
            columns: f.columns.iter().map(|c| self.apply(c)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, GradedError> {
        if self.source != other.source || self.target != other.target || self.degree != other.degree {
            return Err(GradedError::SpaceMismatch("sum of maps with different shapes".into()));
        }
        Ok(GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn scale(&self, c: &R) -> Self {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    /// Full matrix (rows = target basis, columns = source basis).
    pub fn to_matrix(&self) -> Matrix<R> {
        Matrix::from_columns(self.target.dim(), &self.columns)
    }

    /// Block from the degree-`d` component of the source.
    pub fn block(&self, d: i32) -> Matrix<R> {
        let src = self.source.indices_in(d);
        let tgt = self.target.indices_in(d + self.degree);
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (jj, j) in src.clone().enumerate() {
            for (i, c) in self.columns[j].iter() {
                m.set(i - tgt.start, jj, c.clone());
            }
        }
        m
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> GradedMap<S> {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().map(|c| c.map_scalars(&f)).collect(),
        }
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<GradedMap<S>, E> {
        Ok(GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            columns: self.columns.iter().map(|c| c.try_map_scalars(&f)).collect::<Result<_, _>>()?,
        })
    }

    /// Views the map as an arity-one operation.
    pub fn to_op(&self) -> MultiOp<R> {
        let mut op = MultiOp::new(1, self.degree);
        for (j, c) in self.columns.iter().enumerate() {
            op.set(vec![j], c.clone());
        }
        op
    }

    pub fn from_op(op: &MultiOp<R>, source: &GradedSpace, target: &GradedSpace) -> Result<Self, GradedError> {
        if op.arity() != 1 {
            return Err(GradedError::Arity { expected: 1, found: op.arity() });
        }
        let columns = (0..source.dim()).map(|j| op.apply_basis(&[j])).collect();
        Self::from_columns(source, target, op.degree(), columns)
    }
}

impl<F: Field> GradedMap<F> {
    /// Rank of the block leaving degree `d`.
    pub fn rank_in(&self, d: i32) -> usize {
        self.block(d).rank()
    }
}

/// `g ∘ f` for graded maps.
pub fn compose_graded<R: Ring>(g: &GradedMap<R>, f: &GradedMap<R>) -> Result<GradedMap<R>, GradedError> {
    g.compose(f)
}

// ---------------------------------------------------------------------------
// Multilinear operations

/// Sparse multilinear map `V_1 ⊗ … ⊗ V_k → W` of a fixed degree, keyed by
/// basis-index tuples. Slot spaces are supplied by the owning structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiOp<R> {
    arity: usize,
    degree: i32,
    table: BTreeMap<Vec<usize>, Vector<R>>,
}

impl<R: Ring> MultiOp<R> {
    pub fn new(arity: usize, degree: i32) -> Self {
        MultiOp { arity, degree, table: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector<R>)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn set(&mut self, tuple: Vec<usize>, value: Vector<R>) {
        assert_eq!(tuple.len(), self.arity, "tuple length does not match arity");
        if value.is_zero() {
            self.table.remove(&tuple);
        } else {
            self.table.insert(tuple, value);
        }
    }

    pub fn add_to(&mut self, tuple: &[usize], value: &Vector<R>) {
        if value.is_zero() {
            return;
        }
        assert_eq!(tuple.len(), self.arity, "tuple length does not match arity");
        let e = self.table.entry(tuple.to_vec()).or_default();
        e.add_assign(value);
        if e.is_zero() {
            self.table.remove(tuple);
        }
    }

    pub fn get(&self, tuple: &[usize]) -> Option<&Vector<R>> {
        self.table.get(tuple)
    }

    pub fn apply_basis(&self, tuple: &[usize]) -> Vector<R> {
        self.table.get(tuple).cloned().unwrap_or_default()
    }

    /// Multilinear extension of the table. No signs are introduced here.
    pub fn apply(&self, args: &[Vector<R>]) -> Result<Vector<R>, GradedError> {
        if args.len() != self.arity {
            return Err(GradedError::Arity { expected: self.arity, found: args.len() });
        }
        let mut out = Vector::zero();
        if args.iter().any(|a| a.is_zero()) {
            return Ok(out);
        }
        let terms: Vec<Vec<(usize, R)>> = args.iter().map(|a| a.iter().map(|(i, c)| (i, c.clone())).collect()).collect();
        let mut idx = vec![0usize; self.arity];
        loop {
            let tuple: Vec<usize> = idx.iter().enumerate().map(|(s, &t)| terms[s][t].0).collect();
            if let Some(v) = self.table.get(&tuple) {
                let mut c = R::one();
                for (s, &t) in idx.iter().enumerate() {
                    c = c.mul(&terms[s][t].1);
                }
                out.add_scaled(v, &c);
            }
            let mut s = self.arity;
            loop {
                if s == 0 {
                    return Ok(out);
                }
                s -= 1;
                idx[s] += 1;
                if idx[s] < terms[s].len() {
                    break;
                }
                idx[s] = 0;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.arity, self.degree), (other.arity, other.degree), "adding operations of different shape");
        let mut out = self.clone();
        for (t, v) in &other.table {
            out.add_to(t, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&R::one().neg()))
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = MultiOp::new(self.arity, self.degree);
        for (t, v) in &self.table {
            out.set(t.clone(), v.scale(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&R::one().neg())
    }

    pub fn map_scalars<S: Ring>(&self, f: impl Fn(&R) -> S) -> MultiOp<S> {
        let mut out = MultiOp::new(self.arity, self.degree);
        for (t, v) in &self.table {
            out.set(t.clone(), v.map_scalars(&f));
        }
        out
    }

    pub fn try_map_scalars<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<MultiOp<S>, E> {
        let mut out = MultiOp::new(self.arity, self.degree);
        for (t, v) in &self.table {
            out.set(t.clone(), v.try_map_scalars(&f)?);
        }
        Ok(out)
    }

    /// Checks that every entry is degree-consistent for the given slot and target spaces.
    pub fn validate(&self, slots: &[&GradedSpace], target: &GradedSpace) -> Result<(), GradedError> {
        if slots.len() != self.arity {
            return Err(GradedError::Arity { expected: self.arity, found: slots.len() });
        }
        for (tuple, v) in &self.table {
            let mut input = 0;
            for (s, &i) in tuple.iter().enumerate() {
                if i >= slots[s].dim() {
                    return Err(GradedError::Index(i));
                }
                input += slots[s].degree(i);
            }
            for (o, _) in v.iter() {
                if o >= target.dim() {
                    return Err(GradedError::Index(o));
                }
                if target.degree(o) != input + self.degree {
                    let names: Vec<&str> = tuple.iter().enumerate().map(|(s, &i)| slots[s].label(i)).collect();
                    return Err(GradedError::Degree {
                        entry: format!("({})", names.join(", ")),
                        input,
                        op: self.degree,
                        output: target.label(o).to_string(),
                        output_degree: target.degree(o),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Evaluates `op` on basis or vector arguments.
pub fn apply_multi<R: Ring>(op: &MultiOp<R>, args: &[Vector<R>]) -> Result<Vector<R>, GradedError> {
    op.apply(args)
}

/// Table of `d = (−1)^{k−1+deg m} s ∘ m ∘ (s^{−1})^{⊗k}` expressed in the same
/// basis labels (the suspended slot degrees are one lower). `slot_degrees[s]`
/// gives the unsuspended degrees of slot `s`.
pub fn suspend_op<R: Ring>(m: &MultiOp<R>, slots: &[&GradedSpace]) -> MultiOp<R> {
    let k = m.arity();
    let mut d = MultiOp::new(k, m.degree() + k as i32 - 1);
    let base = SignConvention::suspension(k, m.degree());
    for (tuple, v) in m.entries() {
        let degs: Vec<i32> = tuple.iter().enumerate().map(|(s, &i)| slots[s].degree(i)).collect();
        let e = base + SignConvention::desuspension(&degs);
        d.set(tuple.clone(), v.scale(&sign(e)));
    }
    d
}

/// Inverse of [`suspend_op`].
pub fn desuspend_op<R: Ring>(d: &MultiOp<R>, slots: &[&GradedSpace]) -> MultiOp<R> {
    let k = d.arity();
    let m_degree = d.degree() - k as i32 + 1;
    let mut m = MultiOp::new(k, m_degree);
    let base = SignConvention::suspension(k, m_degree);
    for (tuple, v) in d.entries() {
        let degs: Vec<i32> = tuple.iter().enumerate().map(|(s, &i)| slots[s].degree(i)).collect();
        let e = base + SignConvention::desuspension(&degs);
        m.set(tuple.clone(), v.scale(&sign(e)));
    }
    m
}

/// Lexicographic enumeration of basis tuples, one index per slot, keeping only
/// tuples whose total degree lies in `allowed` (all tuples when `None`).
pub fn tensor_basis(slots: &[&GradedSpace], allowed: Option<&BTreeSet<i32>>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if slots.iter().any(|s| s.dim() == 0) {
        return out;
    }
    let n = slots.len();
    // bounds on the degree still to come after position p
    let mut rest_min = vec![0i32; n + 1];
    let mut rest_max = vec![0i32; n + 1];
    for p in (0..n).rev() {
        let sup = slots[p].support();
        rest_min[p] = rest_min[p + 1] + sup[0];
        rest_max[p] = rest_max[p + 1] + sup[sup.len() - 1];
    }
    let mut cur = Vec::with_capacity(n);
    fn rec(
        p: usize,
        sum: i32,
        slots: &[&GradedSpace],
        allowed: Option<&BTreeSet<i32>>,
        rest_min: &[i32],
        rest_max: &[i32],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if let Some(a) = allowed {
            if a.range(sum + rest_min[p]..=sum + rest_max[p]).next().is_none() {
                return;
            }
        }
        if p == slots.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..slots[p].dim() {
            cur.push(i);
            rec(p + 1, sum + slots[p].degree(i), slots, allowed, rest_min, rest_max, cur, out);
            cur.pop();
        }
    }
    rec(0, 0, slots, allowed, &rest_min, &rest_max, &mut cur, &mut out);
    out
}

/// Largest arity beyond which a homogeneous operation is forced to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArityBound {
    Finite(usize),
    Unbounded,
}

impl ArityBound {
    pub fn finite(self) -> Option<usize> {
        match self {
            ArityBound::Finite(n) => Some(n),
            ArityBound::Unbounded => None,
        }
    }

    /// True when arity `k` is beyond the bound.
    pub fn excludes(self, k: usize) -> bool {
        matches!(self, ArityBound::Finite(n) if k > n)
    }
}

/// Largest number `q` of algebra inputs for which some choice of degrees
/// `d_0 + Σ_{i≤q} (a_i − 1) + offset` lands in `target`, where `d_0` ranges over
/// `first` (or is 0 when absent) and each `a_i` over `alg`.
///
/// Unbounded when some `a_i − 1` vanishes or both signs occur, since then
/// arbitrarily long inputs can keep the output degree fixed.
pub fn arity_bound(first: Option<&[i32]>, alg: &[i32], target: &[i32], offset: i32) -> ArityBound {
    let firsts: BTreeSet<i32> = match first {
        Some(f) => f.iter().map(|d| d + offset).collect(),
        None => [offset].into_iter().collect(),
    };
    let target: BTreeSet<i32> = target.iter().copied().collect();
    let steps: BTreeSet<i32> = alg.iter().map(|a| a - 1).collect();
    let (Some(&tmin), Some(&tmax)) = (target.first(), target.last()) else {
        return ArityBound::Finite(0);
    };
    if firsts.is_empty() || steps.is_empty() {
        return ArityBound::Finite(0);
    }
    let all_pos = steps.iter().all(|&e| e > 0);
    let all_neg = steps.iter().all(|&e| e < 0);
    if !all_pos && !all_neg {
        return ArityBound::Unbounded;
    }
    let mut best = 0;
    let mut sums = firsts;
    let mut q = 0;
    loop {
        if sums.iter().any(|s| target.contains(s)) {
            best = q;
        }
        let alive = if all_pos { *sums.first().unwrap() <= tmax } else { *sums.last().unwrap() >= tmin };
        if !alive {
            return ArityBound::Finite(best);
        }
        sums = sums.iter().flat_map(|s| steps.iter().map(move |e| s + e)).collect();
        q += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;

    fn space(basis: &[(&str, i32)]) -> GradedSpace {
        GradedSpace::new(basis.iter().map(|&(l, d)| (l, d))).unwrap()
    }

    #[test]
    fn tensor_basis_lex_and_count() {
        let a = space(&[("a", 0)]);
        assert_eq!(tensor_basis(&[&a], None), vec![vec![0]]);
        let xy = space(&[("x", 0), ("y", 0)]);
        assert_eq!(tensor_basis(&[&xy, &xy], None), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let three = space(&[("p", 1), ("q", 1), ("r", 1)]);
        for k in 1..=4 {
            assert_eq!(tensor_basis(&vec![&three; k], None).len(), 3usize.pow(k as u32));
        }
    }

    #[test]
    fn tensor_basis_window() {
        let s = space(&[("u", 0), ("v", 1)]);
        let allowed: BTreeSet<i32> = [1].into_iter().collect();
        assert_eq!(tensor_basis(&[&s, &s], Some(&allowed)), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn suspension_round_trip_and_degree() {
        let s = space(&[("a", 0), ("b", 1), ("c", 2)]);
        let mut m = MultiOp::<Q>::new(3, -1);
        m.set(vec![1, 1, 1], Vector::basis(2));
        m.set(vec![0, 1, 2], Vector::single(2, Q::from_int(3)));
        let d = suspend_op(&m, &[&s, &s, &s]);
        assert_eq!(d.degree(), 1);
        assert_eq!(desuspend_op(&d, &[&s, &s, &s]), m);
    }

    #[test]
    fn suspension_arity_one() {
        // d_1 = (−1)^{0+1} s m_1 s^{-1} with no Koszul sign: d_1 = −m_1.
        let s = space(&[("x", 0), ("y", 1)]);
        let mut m1 = MultiOp::<Q>::new(1, 1);
        m1.set(vec![0], Vector::basis(1));
        let d1 = suspend_op(&m1, &[&s]);
        assert_eq!(d1.apply_basis(&[0]), Vector::single(1, Q::from_int(-1)));
    }

    #[test]
    fn saturation_examples() {
        // degree-0 algebra: output Σ(a−1)+2 = 2−k must be 0
        assert_eq!(arity_bound(None, &[0], &[0], 2), ArityBound::Finite(2));
        // degrees 2..4: m_k lands in 2k+2−k = k+2.. ; k ≤ 2
        assert_eq!(arity_bound(None, &[2, 3, 4], &[2, 3, 4], 2), ArityBound::Finite(2));
        // degree 1 inputs keep the output degree fixed
        assert_eq!(arity_bound(None, &[0, 1, 2], &[0, 1, 2], 2), ArityBound::Unbounded);
        // module in degrees 0..2 over a degree-0 algebra: d0 − q + 1 ∈ [0,2]
        assert_eq!(arity_bound(Some(&[0, 1, 2]), &[0], &[0, 1, 2], 1), ArityBound::Finite(3));
    }

    #[test]
    fn morphism_sign_examples() {
        assert_eq!(SignConvention::morphism(&[1]), 0);
        // blocks (1,2): (1−2)·1 = −1
        assert_eq!(SignConvention::morphism(&[1, 2]).rem_euclid(2), 1);
        // blocks (2,1): (1−1)·2 = 0
        assert_eq!(SignConvention::morphism(&[2, 1]), 0);
    }

    #[test]
    fn graded_map_compose() {
        let s = space(&[("x", 0), ("y", 0)]);
        let f = GradedMap::from_columns(
            &s,
            &s,
            0,
            vec![Vector::from_dense(&[Q::from_int(1), Q::from_int(2)]), Vector::from_dense(&[Q::from_int(3), Q::from_int(4)])],
        )
        .unwrap();
        let id = GradedMap::identity(&s);
        assert_eq!(compose_graded(&id, &f).unwrap(), f);
        let z = GradedMap::zero(&s, &s, 0);
        assert!(compose_graded(&z, &f).unwrap().is_zero());
        assert_eq!(f.compose(&f).unwrap().to_matrix(), f.to_matrix().mul(&f.to_matrix()));
    }

    #[test]
    fn validate_rejects_bad_degree() {
        let s = space(&[("x", 0), ("y", 1)]);
        let mut m = MultiOp::<Q>::new(2, 0);
        m.set(vec![0, 0], Vector::basis(1));
        assert!(matches!(m.validate(&[&s, &s], &s), Err(GradedError::Degree { .. })));
    }
}
