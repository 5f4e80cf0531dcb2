//! Bounded complexes of finite free modules over `F[h]`.
//!
//! `F[h]` stands in for a complete discrete valuation ring: only the
//! `h`-primary part of torsion is recorded, since every other irreducible
//! factor is a unit after completing at `h = 0` and is invisible to both the
//! special fibre `h = 0` and the generic fibre `F(h)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{Field, Poly, RatFunc, Ring};
use crate::linalg::{Matrix, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HbarError {
    #[error("differential in degree {degree} has shape {found:?}, expected {expected:?}")]
    Shape { degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("d∘d is nonzero starting in degree {0}")]
    NotAComplex(i32),
    #[error("inconsistent fibre accounting in degree {degree}: {detail}")]
    Inconsistent { degree: i32, detail: String },
}

/// `mat = u · d · v` with `d` in Smith normal form. The inverses are kept
/// alongside so that `u_inv · mat · v_inv = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf<F: Field> {
    pub u: Matrix<Poly<F>>,
    pub d: Matrix<Poly<F>>,
    pub v: Matrix<Poly<F>>,
    pub u_inv: Matrix<Poly<F>>,
    pub v_inv: Matrix<Poly<F>>,
}

impl<F: Field> Snf<F> {
    /// Nonzero diagonal entries, monic and forming a divisibility chain.
    pub fn invariant_factors(&self) -> Vec<Poly<F>> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).take_while(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Elementary operations applied to `d` while keeping `mat = u d v`.
struct Reducer<F: Field> {
    s: Snf<F>,
}

impl<F: Field> Reducer<F> {
    fn add_row(&mut self, target: usize, source: usize, c: &Poly<F>) {
        self.s.d.add_row_multiple(target, source, c);
        self.s.u_inv.add_row_multiple(target, source, c);
        self.s.u.add_col_multiple(source, target, &c.neg());
    }

    fn add_col(&mut self, target: usize, source: usize, c: &Poly<F>) {
        self.s.d.add_col_multiple(target, source, c);
        self.s.v_inv.add_col_multiple(target, source, c);
        self.s.v.add_row_multiple(source, target, &c.neg());
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.d.swap_rows(a, b);
        self.s.u_inv.swap_rows(a, b);
        self.s.u.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.d.swap_cols(a, b);
        self.s.v_inv.swap_cols(a, b);
        self.s.v.swap_rows(a, b);
    }

    /// `(R_a, R_b) ← (s R_a + x R_b, y R_a + z R_b)` for `[s, x, y, z]` of determinant 1.
    fn bezout_rows(&mut self, a: usize, b: usize, [s, x, y, z]: [Poly<F>; 4]) {
        combine_rows(&mut self.s.d, a, b, [&s, &x, &y, &z]);
        combine_rows(&mut self.s.u_inv, a, b, [&s, &x, &y, &z]);
        // u ← u E⁻¹ with E⁻¹ = [z, −x; −y, s]
        combine_cols(&mut self.s.u, a, b, [&z, &y.neg(), &x.neg(), &s]);
    }

    /// `(C_a, C_b) ← (s C_a + x C_b, y C_a + z C_b)` for `[s, x, y, z]` of determinant 1.
    fn bezout_cols(&mut self, a: usize, b: usize, [s, x, y, z]: [Poly<F>; 4]) {
        combine_cols(&mut self.s.d, a, b, [&s, &x, &y, &z]);
        combine_cols(&mut self.s.v_inv, a, b, [&s, &x, &y, &z]);
        combine_rows(&mut self.s.v, a, b, [&z, &y.neg(), &x.neg(), &s]);
    }

    fn scale_row(&mut self, i: usize, c: &F) {
        self.s.d.scale_row(i, &Poly::constant(c.clone()));
        self.s.u_inv.scale_row(i, &Poly::constant(c.clone()));
        self.s.u.scale_col(i, &Poly::constant(c.inv()));
    }

    fn entry(&self, i: usize, j: usize) -> &Poly<F> {
        self.s.d.get(i, j)
    }

    fn deg(&self, i: usize, j: usize) -> usize {
        self.entry(i, j).degree().expect("nonzero entry")
    }
}

fn combine_rows<F: Field>(m: &mut Matrix<Poly<F>>, a: usize, b: usize, [s, x, y, z]: [&Poly<F>; 4]) {
    for j in 0..m.cols() {
        let (p, q) = (m.get(a, j).clone(), m.get(b, j).clone());
        m.set(a, j, s.mul(&p).add(&x.mul(&q)));
        m.set(b, j, y.mul(&p).add(&z.mul(&q)));
    }
}

fn combine_cols<F: Field>(m: &mut Matrix<Poly<F>>, a: usize, b: usize, [s, x, y, z]: [&Poly<F>; 4]) {
    for i in 0..m.rows() {
        let (p, q) = (m.get(i, a).clone(), m.get(i, b).clone());
        m.set(i, a, s.mul(&p).add(&x.mul(&q)));
        m.set(i, b, y.mul(&p).add(&z.mul(&q)));
    }
}

/// `(g, s, t)` with `g = gcd(a, b)` monic and `s a + t b = g`.
fn xgcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> (Poly<F>, Poly<F>, Poly<F>) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        (r0, r1, s0, s1, t0, t1) = (r1, r, s1, s2, t1, t2);
    }
    let l = r0.leading().expect("gcd of a nonzero pair").inv();
    (r0.scale(&l), s0.scale(&l), t0.scale(&l))
}

/// Smith normal form over `F[h]`. Pivots are chosen by minimal degree, ties
/// broken by (row, column); an entry not divisible by the pivot is merged
/// into it by a unimodular `2 × 2` Bezout transform. Diagonal entries are
/// made monic.
pub fn smith_normal_form<F: Field>(mat: &Matrix<Poly<F>>) -> Snf<F> {
    let (rows, cols) = (mat.rows(), mat.cols());
    let mut r = Reducer {
        s: Snf {
            u: Matrix::identity(rows),
            d: mat.clone(),
            v: Matrix::identity(cols),
            u_inv: Matrix::identity(rows),
            v_inv: Matrix::identity(cols),
        },
    };
    for t in 0..rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !r.entry(i, j).is_zero())
            .min_by_key(|&(i, j)| (r.deg(i, j), i, j));
        let Some((pi, pj)) = pivot else { break };
        r.swap_rows(t, pi);
        r.swap_cols(t, pj);
        let lead = r.entry(t, t).leading().expect("nonzero pivot").inv();
        r.scale_row(t, &lead);
        loop {
            for i in t + 1..rows {
                let (a, b) = (r.entry(t, t).clone(), r.entry(i, t).clone());
                if b.is_zero() {
                    continue;
                }
                let (q, rem) = b.div_rem(&a);
                if rem.is_zero() {
                    r.add_row(i, t, &q.neg());
                } else {
                    let (g, s, x) = xgcd(&a, &b);
                    r.bezout_rows(t, i, [s, x, b.exact_div(&g).neg(), a.exact_div(&g)]);
                }
            }
            for j in t + 1..cols {
                let (a, b) = (r.entry(t, t).clone(), r.entry(t, j).clone());
                if b.is_zero() {
                    continue;
                }
                let (q, rem) = b.div_rem(&a);
                if rem.is_zero() {
                    r.add_col(j, t, &q.neg());
                } else {
                    let (g, s, x) = xgcd(&a, &b);
                    r.bezout_cols(t, j, [s, x, b.exact_div(&g).neg(), a.exact_div(&g)]);
                }
            }
            // column merges can refill the pivot column
            if (t + 1..rows).any(|i| !r.entry(i, t).is_zero()) {
                continue;
            }
            let p = r.entry(t, t).clone();
            let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !p.divides(r.entry(i, j)));
            match bad {
                Some((i, _)) => r.add_row(t, i, &Poly::one()),
                None => break,
            }
        }
    }
    r.s
}

/// A solution of `mat · x = b` over `F[h]`, if one exists.
pub fn solve_over_poly<F: Field>(mat: &Matrix<Poly<F>>, b: &Vector<Poly<F>>) -> Option<Vector<Poly<F>>> {
    let s = smith_normal_form(mat);
    let c = s.u_inv.apply(b);
    let factors = s.invariant_factors();
    let mut y = Vector::zero();
    for (i, ci) in c.iter() {
        let di = factors.get(i)?;
        let (q, rem) = ci.div_rem(di);
        if !rem.is_zero() {
            return None;
        }
        y.add_term(i, &q);
    }
    Some(s.v_inv.apply(&y))
}

/// `⋯ → C^i → C^{i+1} → ⋯` with `d^i` stored as a `rank(i+1) × rank(i)` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyComplex<F: Field> {
    ranks: BTreeMap<i32, usize>,
    diffs: BTreeMap<i32, Matrix<Poly<F>>>,
}

impl<F: Field> PolyComplex<F> {
    pub fn new(ranks: BTreeMap<i32, usize>, diffs: BTreeMap<i32, Matrix<Poly<F>>>) -> Result<Self, HbarError> {
        let ranks: BTreeMap<i32, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let c = PolyComplex { ranks, diffs };
        for (&i, m) in &c.diffs {
            let expected = (c.rank(i + 1), c.rank(i));
            if (m.rows(), m.cols()) != expected {
                return Err(HbarError::Shape { degree: i, expected, found: (m.rows(), m.cols()) });
            }
        }
        let mut diffs = BTreeMap::new();
        for (i, m) in c.diffs {
            if !m.is_zero() {
                diffs.insert(i, m);
            }
        }
        let c = PolyComplex { ranks: c.ranks, diffs };
        for &i in c.diffs.keys() {
            if c.diffs.contains_key(&(i + 1)) && !c.diff(i + 1).mul(&c.diff(i)).is_zero() {
                return Err(HbarError::NotAComplex(i));
            }
        }
        Ok(c)
    }

    pub fn rank(&self, i: i32) -> usize {
        self.ranks.get(&i).copied().unwrap_or(0)
    }

    /// `d^i: C^i → C^{i+1}`.
    pub fn diff(&self, i: i32) -> Matrix<Poly<F>> {
        self.diffs.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(self.rank(i + 1), self.rank(i)))
    }

    pub fn ranks(&self) -> &BTreeMap<i32, usize> {
        &self.ranks
    }

    /// Degrees carrying a nonzero term.
    pub fn degrees(&self) -> Vec<i32> {
        self.ranks.keys().copied().collect()
    }

    pub fn map_entries(&self, f: impl Fn(&Poly<F>) -> Poly<F>) -> Result<Self, HbarError> {
        Self::new(self.ranks.clone(), self.diffs.iter().map(|(&i, m)| (i, m.map(&f))).collect())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().map(|(&i, &r)| if i % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCohomology {
    pub free_rank: usize,
    /// Orders `k` of the summands `F[h]/h^k`, sorted.
    pub torsion: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyDecomposition<F: Field> {
    pub degrees: BTreeMap<i32, DegreeCohomology>,
    /// Nonunit invariant factors of `d^{i−1}` per degree `i`, including any
    /// prime-to-`h` part.
    pub factors: BTreeMap<i32, Vec<Poly<F>>>,
}

impl<F: Field> CohomologyDecomposition<F> {
    pub fn get(&self, i: i32) -> DegreeCohomology {
        self.degrees.get(&i).cloned().unwrap_or(DegreeCohomology { free_rank: 0, torsion: Vec::new() })
    }

    pub fn is_torsion_free(&self) -> bool {
        self.degrees.values().all(|d| d.torsion.is_empty())
    }
}

/// `H^i = ker d^i / im d^{i−1}`. The kernel is a saturated summand of rank
/// `n_i − rk d^i` containing the image, so the quotient is free of rank
/// `n_i − rk d^i − rk d^{i−1}` plus `⊕ F[h]/(e_k)` over the invariant factors
/// of `d^{i−1}`.
pub fn poly_cohomology<F: Field>(c: &PolyComplex<F>) -> CohomologyDecomposition<F> {
    let mut snfs: BTreeMap<i32, Snf<F>> = BTreeMap::new();
    for i in c.degrees() {
        snfs.insert(i, smith_normal_form(&c.diff(i)));
    }
    let rank_of = |i: i32| snfs.get(&i).map_or(0, |s| s.rank());
    let mut degrees = BTreeMap::new();
    let mut factors = BTreeMap::new();
    for i in c.degrees() {
        let incoming = snfs.get(&(i - 1)).map(|s| s.invariant_factors()).unwrap_or_default();
        let nonunit: Vec<Poly<F>> = incoming.into_iter().filter(|e| e.degree() != Some(0)).collect();
        let mut torsion: Vec<usize> =
            nonunit.iter().map(|e| e.valuation().expect("nonzero")).filter(|&k| k > 0).collect();
        torsion.sort_unstable();
        let free_rank = c.rank(i) - rank_of(i) - rank_of(i - 1);
        degrees.insert(i, DegreeCohomology { free_rank, torsion });
        factors.insert(i, nonunit);
    }
    CohomologyDecomposition { degrees, factors }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fibre {
    /// `h = 0`.
    Special,
    /// The fraction field `F(h)`.
    Generic,
}

fn dims_from_ranks(c: &PolyComplex<impl Field>, rank: impl Fn(i32) -> usize) -> BTreeMap<i32, usize> {
    c.degrees().into_iter().map(|i| (i, c.rank(i) - rank(i) - rank(i - 1))).collect()
}

/// Cohomology dimensions of a fibre, by ranks of the specialized matrices.
pub fn fibre_dims<F: Field>(c: &PolyComplex<F>, which: Fibre) -> BTreeMap<i32, usize> {
    match which {
        Fibre::Special => {
            let zero = F::zero();
            dims_from_ranks(c, |i| c.diff(i).map(|x| x.eval(&zero)).rank())
        }
        Fibre::Generic => dims_from_ranks(c, |i| c.diff(i).map(|x| RatFunc::from_poly(x.clone())).rank()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Freeness {
    Free { ranks: BTreeMap<i32, usize> },
    /// `degree` carries the torsion `F[h]/h^k` for each `k` listed.
    NotFree { degree: i32, torsion: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessReport {
    pub verdict: Freeness,
    pub special: BTreeMap<i32, usize>,
    pub generic: BTreeMap<i32, usize>,
    pub decomposition: BTreeMap<i32, DegreeCohomology>,
}

/// Decides freeness by comparing fibre dimensions, then reconciles the answer
/// with the Smith decomposition: for every degree
/// `dim H^i(C|_{h=0}) = d_i + r_i + r_{i+1}` and `dim H^i(C ⊗ F(h)) = d_i`,
/// where `r_i` counts the torsion summands of `H^i`.
pub fn freeness_test<F: Field>(c: &PolyComplex<F>) -> Result<FreenessReport, HbarError> {
    let special = fibre_dims(c, Fibre::Special);
    let generic = fibre_dims(c, Fibre::Generic);
    let dec = poly_cohomology(c);
    for i in c.degrees() {
        let h = dec.get(i);
        let r_next = dec.get(i + 1).torsion.len();
        let expected = h.free_rank + h.torsion.len() + r_next;
        if special[&i] != expected {
            return Err(HbarError::Inconsistent { degree: i, detail: format!("special {} vs {expected}", special[&i]) });
        }
        if generic[&i] != h.free_rank {
            return Err(HbarError::Inconsistent { degree: i, detail: format!("generic {} vs {}", generic[&i], h.free_rank) });
        }
    }
    let mismatch = c.degrees().into_iter().find(|i| special[i] != generic[i]);
    let verdict = match mismatch {
        None => Freeness::Free { ranks: generic.clone() },
        Some(i) => {
            // the first excess sits in H^i or, via Tor, in H^{i+1}
            let degree = if dec.get(i).torsion.is_empty() { i + 1 } else { i };
            Freeness::NotFree { degree, torsion: dec.get(degree).torsion }
        }
    };
    if matches!(verdict, Freeness::Free { .. }) != dec.is_torsion_free() {
        let degree = mismatch.unwrap_or(0);
        return Err(HbarError::Inconsistent { degree, detail: "fibre comparison disagrees with torsion".into() });
    }
    Ok(FreenessReport { verdict, special, generic, decomposition: dec.degrees })
}

/// Two-term complex `F[h]^cols → F[h]^rows` in degrees `0, 1`.
pub fn two_term<F: Field>(d: Matrix<Poly<F>>) -> PolyComplex<F> {
    let ranks = BTreeMap::from([(0, d.cols()), (1, d.rows())]);
    PolyComplex::new(ranks, BTreeMap::from([(0, d)])).expect("two-term complexes are valid")
}
