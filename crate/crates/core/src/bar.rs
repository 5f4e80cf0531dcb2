//! Bar constructions as an independent check of the A-infinity relations.
//!
//! Words are tuples of basis indices read in the suspended space (each letter
//! has degree one lower). The coderivation extends the suspended operations
//! `d_k = (−1)^{k−1+deg m_k} s ∘ m_k ∘ (s^{−1})^{⊗k}` by
//! `d(w_1…w_n) = Σ (−1)^{|w_1|+…+|w_j|} w_1…w_j d_k(w_{j+1}…w_{j+k}) w_{j+k+1}…w_n`.
//! For modules the first letter lives in `M[1]` and operations starting there
//! are the suspended module operations.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::AInfAlgebra;
use crate::coeff::Ring;
use crate::graded::{sign, suspend_op, tensor_basis, GradedSpace, MultiOp};
use crate::linalg::Vector;
use crate::module::AInfModule;

/// Linear combination of bar words.
pub type Chain<R> = BTreeMap<Vec<usize>, R>;

fn add_to_chain<R: Ring>(chain: &mut Chain<R>, word: Vec<usize>, c: &R) {
    if c.is_zero() {
        return;
    }
    match chain.get_mut(&word) {
        Some(e) => {
            let s = e.add(c);
            if s.is_zero() {
                chain.remove(&word);
            } else {
                *e = s;
            }
        }
        None => {
            chain.insert(word, c.clone());
        }
    }
}

/// The coderivation on the (module) bar construction, restricted to words of
/// bounded length.
#[derive(Debug, Clone)]
pub struct BarDifferential<R> {
    alg_space: GradedSpace,
    module_space: Option<GradedSpace>,
    alg_ops: BTreeMap<usize, MultiOp<R>>,
    module_ops: BTreeMap<usize, MultiOp<R>>,
    max_len: usize,
}

impl<R: Ring> BarDifferential<R> {
    /// Bar construction `B(A)` on words of length at most `max_len`.
    pub fn algebra(a: &AInfAlgebra<R>, max_len: usize) -> Self {
        let alg_ops = a
            .ops()
            .filter(|(k, _)| *k <= max_len)
            .map(|(k, op)| (k, suspend_op(op, &vec![&a.space; k])))
            .collect();
        BarDifferential { alg_space: a.space.clone(), module_space: None, alg_ops, module_ops: BTreeMap::new(), max_len }
    }

    /// Module bar construction `M[1] ⊗ B(A)` on words of length at most `max_len`.
    pub fn module(m: &AInfModule<R>, max_len: usize) -> Self {
        let mut bar = Self::algebra(&m.algebra, max_len);
        bar.module_ops = m
            .ops()
            .filter(|(k, _)| *k <= max_len)
            .map(|(k, op)| (k, suspend_op(op, &m.slots(k))))
            .collect();
        bar.module_space = Some(m.space.clone());
        bar
    }

    fn letter_degree(&self, pos: usize, i: usize) -> i32 {
        match (&self.module_space, pos) {
            (Some(ms), 0) => ms.degree(i) - 1,
            _ => self.alg_space.degree(i) - 1,
        }
    }

    /// `d` applied to a single word.
    pub fn apply_word(&self, word: &[usize]) -> Chain<R> {
        let mut out = Chain::new();
        let n = word.len();
        let mut passed = 0i32;
        for j in 0..n {
            let ops = if self.module_space.is_some() && j == 0 { &self.module_ops } else { &self.alg_ops };
            let s: R = sign(passed as i64);
            for k in 1..=n - j {
                let Some(d) = ops.get(&k) else { continue };
                let Some(v) = d.get(&word[j..j + k]) else { continue };
                for (y, c) in v.iter() {
                    let mut w = Vec::with_capacity(n - k + 1);
                    w.extend_from_slice(&word[..j]);
                    w.push(y);
                    w.extend_from_slice(&word[j + k..]);
                    add_to_chain(&mut out, w, &c.mul(&s));
                }
            }
            passed += self.letter_degree(j, word[j]);
        }
        out
    }

    pub fn apply(&self, chain: &Chain<R>) -> Chain<R> {
        let mut out = Chain::new();
        for (w, c) in chain {
            for (u, e) in self.apply_word(w) {
                add_to_chain(&mut out, u, &e.mul(c));
            }
        }
        out
    }

    /// `d ∘ d` on a single word.
    pub fn square_word(&self, word: &[usize]) -> Chain<R> {
        let once = self.apply_word(word);
        self.apply(&once)
    }

    /// Component of `d ∘ d` in word length one.
    pub fn square_projected(&self, word: &[usize]) -> Vector<R> {
        let once = self.apply_word(word);
        let mut out = Vector::zero();
        for (u, c) in once {
            let ops = if self.module_space.is_some() { &self.module_ops } else { &self.alg_ops };
            if let Some(d) = ops.get(&u.len()) {
                out.add_scaled(&d.apply_basis(&u), &c);
            }
        }
        out
    }

    fn slots(&self, len: usize) -> Vec<&GradedSpace> {
        let mut v = Vec::with_capacity(len);
        for p in 0..len {
            match (&self.module_space, p) {
                (Some(ms), 0) => v.push(ms),
                _ => v.push(&self.alg_space),
            }
        }
        v
    }

    /// Checks `d² = 0`. Every word of length at most `max_len` whose degree
    /// allows a nonzero length-one output is tested on the length-one
    /// component; words of length at most `full_len` are tested on every
    /// component.
    pub fn square_vanishes(&self, full_len: usize) -> Result<(), Vec<usize>> {
        let out_space = self.module_space.as_ref().unwrap_or(&self.alg_space);
        let support: BTreeSet<i32> = out_space.support().into_iter().collect();
        for len in 1..=self.max_len {
            // d² has degree 2 on the suspended space; input Σ(|x|−1) + 2 = |y| − 1
            let allowed: BTreeSet<i32> = support.iter().map(|d| d - 3 + len as i32).collect();
            for w in tensor_basis(&self.slots(len), Some(&allowed)) {
                if !self.square_projected(&w).is_zero() {
                    return Err(w);
                }
            }
            if len <= full_len {
                for w in tensor_basis(&self.slots(len), None) {
                    if !self.square_word(&w).is_empty() {
                        return Err(w);
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `d` from words of length `from_len` to words of length `to_len`,
    /// as a map from input word to output chain restricted to `to_len`.
    pub fn block(&self, from_len: usize, to_len: usize) -> BTreeMap<Vec<usize>, Chain<R>> {
        let mut out = BTreeMap::new();
        for w in tensor_basis(&self.slots(from_len), None) {
            let c: Chain<R> = self.apply_word(&w).into_iter().filter(|(u, _)| u.len() == to_len).collect();
            if !c.is_empty() {
                out.insert(w, c);
            }
        }
        out
    }
}

/// `d² = 0` on the bar construction truncated at word length `up_to`.
pub fn bar_check<R: Ring>(a: &AInfAlgebra<R>, up_to: usize) -> bool {
    BarDifferential::algebra(a, up_to).square_vanishes(up_to.min(3)).is_ok()
}

/// `d² = 0` on the module bar construction truncated at word length `up_to`,
/// tested on the `M[1]` component (the other components only involve the
/// algebra's own bar differential).
pub fn module_bar_check<R: Ring>(m: &AInfModule<R>, up_to: usize) -> bool {
    BarDifferential::module(m, up_to).square_vanishes(0).is_ok()
}

pub fn bar_differential<R: Ring>(a: &AInfAlgebra<R>, max_len: usize) -> BarDifferential<R> {
    BarDifferential::algebra(a, max_len)
}
