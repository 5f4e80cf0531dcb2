//! Finite decreasing filtrations and their Rees deformations over `F[h]`.
//!
//! For `F^0 = V ⊇ F^1 ⊇ … ⊇ F^N = 0` on a graded space `V`, an adapted basis
//! `b` with weights `w(b)` spans `F^i` by the `b` with `w(b) ≥ i`. The Rees
//! object `⊕ F^i h^i` is free on `b h^{w(b)}`; an operation with structure
//! constants `c` in the adapted basis gets constants `c h^{Σ w(inputs) − w(output)}`.
//! At `h = 1` this is the carrier in the adapted basis, at `h = 0` the
//! associated graded.

use std::collections::BTreeSet;

use crate::algebra::{AInfAlgebra, AlgMorphism};
use crate::coeff::{Field, Poly};
use crate::graded::{GradedMap, GradedSpace, MultiOp};
use crate::hochschild::HochschildError;
use crate::linalg::{Echelon, Vector};
use crate::module::{restrict_along, AInfModule, ModMorphism};

/// A finite decreasing filtration of a graded space. `levels[i − 1]` spans
/// `F^i` for `i = 1..N−1`; `F^0` is the whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration<F> {
    pub space: GradedSpace,
    pub levels: Vec<Vec<Vector<F>>>,
    adapted: Vec<Vector<F>>,
    weights: Vec<usize>,
    labels: Vec<String>,
}

impl<F: Field> Filtration<F> {
    pub fn new(space: &GradedSpace, levels: Vec<Vec<Vector<F>>>) -> Result<Self, HochschildError> {
        for (i, level) in levels.iter().enumerate() {
            for v in level {
                if v.support().any(|j| j >= space.dim()) {
                    return Err(HochschildError::Filtration(format!("F^{} has a vector outside the space", i + 1)));
                }
                if !v.is_zero() && space.vector_degree(v).is_none() {
                    return Err(HochschildError::Filtration(format!("F^{} has an inhomogeneous vector", i + 1)));
                }
            }
        }
        for i in 1..levels.len() {
            let mut upper = Echelon::new();
            for v in &levels[i - 1] {
                upper.insert(v);
            }
            if levels[i].iter().any(|v| !upper.contains(v)) {
                return Err(HochschildError::Filtration(format!("F^{} is not contained in F^{}", i + 1, i)));
            }
        }
        let mut adapted = Vec::new();
        let mut weights = Vec::new();
        let mut labels = Vec::new();
        let mut used = BTreeSet::new();
        for d in space.support() {
            let mut span = Echelon::new();
            let mut chosen: Vec<(Vector<F>, usize)> = Vec::new();
            for (i, level) in levels.iter().enumerate().rev() {
                for v in level.iter().filter(|v| !v.is_zero() && space.vector_degree(v) == Some(d)) {
                    if span.insert(v) {
                        chosen.push((v.clone(), i + 1));
                    }
                }
            }
            for j in space.indices_in(d) {
                if span.insert(&Vector::basis(j)) {
                    chosen.push((Vector::basis(j), 0));
                }
            }
            // keep the original order as far as possible
            chosen.sort_by_key(|(v, _)| v.support().next());
            for (v, w) in chosen {
                let lead = v.support().next().expect("nonzero");
                let base = if v == Vector::basis(lead) { space.label(lead).to_string() } else { format!("({})", space.label(lead)) };
                let mut label = base.clone();
                let mut k = 1;
                while used.contains(&label) {
                    label = format!("{base}#{k}");
                    k += 1;
                }
                used.insert(label.clone());
                adapted.push(v);
                weights.push(w);
                labels.push(label);
            }
        }
        Ok(Filtration { space: space.clone(), levels, adapted, weights, labels })
    }

    /// The filtration with only `F^0`.
    pub fn trivial(space: &GradedSpace) -> Self {
        Self::new(space, Vec::new()).expect("no levels to check")
    }

    /// Filtration length `N`: `F^N = 0`.
    pub fn length(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    /// Space of the adapted basis.
    pub fn adapted_space(&self) -> GradedSpace {
        GradedSpace::new(self.labels.iter().zip(&self.adapted).map(|(l, v)| (l.clone(), self.space.vector_degree(v).unwrap())))
            .expect("labels are unique")
    }

    /// The change of basis from the adapted basis to the original one, and its inverse.
    pub fn change_of_basis(&self) -> (GradedMap<F>, GradedMap<F>) {
        let adapted = self.adapted_space();
        let p = GradedMap::from_columns(&adapted, &self.space, 0, self.adapted.clone()).expect("adapted basis is homogeneous");
        let inv = p.to_matrix().inverse().expect("adapted basis is a basis");
        let cols = (0..self.space.dim()).map(|j| inv.column(j)).collect();
        let pinv = GradedMap::from_columns(&self.space, &adapted, 0, cols).expect("inverse is homogeneous");
        (p, pinv)
    }

    /// Largest `i` with `v ∈ F^i` (`None` for `v = 0`).
    pub fn weight_of(&self, v: &Vector<F>) -> Option<usize> {
        let (_, pinv) = self.change_of_basis();
        pinv.apply(v).support().map(|j| self.weights[j]).min()
    }
}

/// Multiplies every constant of `op` (given in adapted bases) by
/// `h^{Σ w(inputs) − w(output)}`.
fn rees_op<F: Field>(op: &MultiOp<F>, slot_weights: &[&[usize]], out_weights: &[usize]) -> Result<MultiOp<Poly<F>>, HochschildError> {
    let mut out = MultiOp::new(op.arity(), op.degree());
    for (t, v) in op.entries() {
        let w: usize = t.iter().enumerate().map(|(s, &i)| slot_weights[s][i]).sum();
        let mut image = Vector::zero();
        for (y, c) in v.iter() {
            if out_weights[y] < w {
                return Err(HochschildError::Filtration(format!("arity {} operation lowers the filtration on {t:?}", op.arity())));
            }
            image.add_term(y, &Poly::monomial(c.clone(), out_weights[y] - w));
        }
        out.set(t.clone(), image);
    }
    Ok(out)
}

/// Rees deformation of a filtered algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesAlgebra<F: Field> {
    pub carrier: AInfAlgebra<F>,
    pub filtration: Filtration<F>,
    pub rees: AInfAlgebra<Poly<F>>,
}

pub fn rees_deformation<F: Field>(a: &AInfAlgebra<F>, filtration: &Filtration<F>) -> Result<ReesAlgebra<F>, HochschildError> {
    if filtration.space != a.space {
        return Err(HochschildError::Shape("filtration is on a different space".into()));
    }
    let (p, pinv) = filtration.change_of_basis();
    let adapted = crate::fixtures::conjugate_algebra(a, &p, &pinv);
    let w = filtration.weights();
    let space = filtration.adapted_space();
    let mut rees = match adapted.truncation() {
        Some(n) => AInfAlgebra::truncated(space.clone(), n),
        None => AInfAlgebra::new(space.clone()),
    };
    for (k, op) in adapted.ops() {
        rees.set_op(rees_op(op, &vec![w; k], w)?).map_err(|e| HochschildError::Shape(e.to_string()))?;
    }
    if let Some(u) = a.unit() {
        let image = pinv.apply(&Vector::basis(u));
        if let Some(j) = (0..w.len()).find(|&j| image == Vector::basis(j)) {
            rees.set_unit(space.label(j)).map_err(|e| HochschildError::Shape(e.to_string()))?;
        }
    }
    Ok(ReesAlgebra { carrier: a.clone(), filtration: filtration.clone(), rees })
}

impl<F: Field> ReesAlgebra<F> {
    pub fn fibre(&self, t: &F) -> AInfAlgebra<F> {
        self.rees.map_scalars(|c| c.eval(t))
    }

    /// `Gr_F` of the carrier, the fibre at `h = 0`.
    pub fn associated_graded(&self) -> AInfAlgebra<F> {
        self.fibre(&F::zero())
    }

    /// Strict isomorphism from the fibre at `h = 1` to the carrier.
    pub fn general_fibre_witness(&self) -> AlgMorphism<F> {
        let (p, _) = self.filtration.change_of_basis();
        AlgMorphism::strict(&self.fibre(&F::one()), &self.carrier, &p).expect("spaces match")
    }
}

/// Rees deformation of a filtered module over a filtered algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesModule<F: Field> {
    pub algebra: ReesAlgebra<F>,
    pub carrier: AInfModule<F>,
    pub filtration: Filtration<F>,
    pub rees: AInfModule<Poly<F>>,
}

pub fn rees_module_deformation<F: Field>(
    algebra: &ReesAlgebra<F>,
    m: &AInfModule<F>,
    filtration: &Filtration<F>,
) -> Result<ReesModule<F>, HochschildError> {
    if filtration.space != m.space || m.algebra != algebra.carrier {
        return Err(HochschildError::Shape("module does not match the filtered algebra".into()));
    }
    let (pa, _) = algebra.filtration.change_of_basis();
    let (p, pinv) = filtration.change_of_basis();
    let adapted_algebra = algebra.fibre(&F::one());
    let adapted = crate::fixtures::conjugate_module(m, &adapted_algebra, &p, &pinv, &pa);
    let (wm, wa) = (filtration.weights(), algebra.filtration.weights());
    let space = filtration.adapted_space();
    let mut rees = match adapted.truncation() {
        Some(n) => AInfModule::truncated(algebra.rees.clone(), space.clone(), n),
        None => AInfModule::new(algebra.rees.clone(), space),
    };
    for (k, op) in adapted.ops() {
        let mut slots = vec![wm];
        slots.extend(std::iter::repeat(wa).take(k - 1));
        rees.set_op(rees_op(op, &slots, wm)?).map_err(|e| HochschildError::Shape(e.to_string()))?;
    }
    Ok(ReesModule { algebra: algebra.clone(), carrier: m.clone(), filtration: filtration.clone(), rees })
}

impl<F: Field> ReesModule<F> {
    pub fn fibre(&self, t: &F) -> AInfModule<F> {
        self.rees.map_scalars(|c| c.eval(t))
    }

    pub fn associated_graded(&self) -> AInfModule<F> {
        self.fibre(&F::zero())
    }

    /// Strict isomorphism from the fibre at `h = 1` to the carrier pulled back
    /// along [`ReesAlgebra::general_fibre_witness`].
    pub fn general_fibre_witness(&self) -> ModMorphism<F> {
        let target = restrict_along(&self.algebra.general_fibre_witness(), &self.carrier).expect("algebras match");
        let (p, _) = self.filtration.change_of_basis();
        ModMorphism::strict(&self.fibre(&F::one()), &target, &p).expect("spaces match")
    }
}
