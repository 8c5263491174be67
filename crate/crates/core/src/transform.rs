//! Conversions between model presentations. All three keep state names,
//! state order and valuation unchanged.

use thiserror::Error;

use crate::model::{
    all_subsets, CompositeClass, Family, FrameProperty, KripkeModel, NeighborhoodModel, StateSet,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("not a quasi-filter model: property {0} fails")]
    NotQuasiFilter(FrameProperty),
    #[error("{0} states is too many for a neighborhood model")]
    TooManyStates(usize),
}

/// Closes every neighborhood family under complements:
/// `cN(s) = {X : X ∈ N(s) or S∖X ∈ N(s)}`.
pub fn c_variation(model: &NeighborhoodModel) -> NeighborhoodModel {
    let n = model.len();
    let families = model
        .families()
        .iter()
        .map(|family| {
            let mut closed = family.clone();
            for x in family.iter() {
                closed.insert(x.complement(n));
            }
            closed
        })
        .collect();
    model
        .with_neighborhoods(families)
        .expect("same shape as input")
}

/// Neighborhood model of a Kripke model:
/// `qfN(s) = {X : R(s) ⊆ X or R(s) ⊆ S∖X}`.
pub fn qf_variation(kripke: &KripkeModel) -> Result<NeighborhoodModel, TransformError> {
    let n = kripke.len();
    if n > crate::model::MAX_NEIGHBORHOOD_STATES {
        return Err(TransformError::TooManyStates(n));
    }
    let families = (0..n)
        .map(|s| {
            let succ = kripke.successors(s);
            Family::from_sets(
                n,
                all_subsets(n).filter(|x| succ.is_subset(*x) || succ.is_subset(x.complement(n))),
            )
        })
        .collect();
    Ok(NeighborhoodModel::new(
        kripke.states().to_vec(),
        families,
        kripke.valuation().clone(),
    )
    .expect("same states and valuation as a valid Kripke model"))
}

/// Kripke model pointwise equivalent to a finite quasi-filter model:
/// `sRt` iff `t` lies in some neighborhood of `s` and `{t} ∉ N(s)`.
pub fn qf_to_kripke(model: &NeighborhoodModel) -> Result<KripkeModel, TransformError> {
    for &property in CompositeClass::QuasiFilter.properties() {
        if !model.has_property(property) {
            return Err(TransformError::NotQuasiFilter(property));
        }
    }
    let n = model.len();
    let successors = (0..n)
        .map(|s| {
            let family = model.neighborhoods(s);
            let covered = family.iter().fold(StateSet::EMPTY, StateSet::union);
            StateSet::from_indices(
                covered
                    .iter()
                    .filter(|&t| !family.contains(StateSet::singleton(t))),
            )
        })
        .collect();
    Ok(KripkeModel::new(
        model.states().to_vec(),
        successors,
        model.valuation().clone(),
    )
    .expect("same states and valuation as a valid model"))
}
