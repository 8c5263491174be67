//! Finite-model workbench for contingency logic (the language with `Δ`,
//! "it is non-contingent that") under neighborhood and Kripke semantics.

pub mod bisim;
pub mod budget;
pub mod definability;
pub mod enumerate;
pub mod formula;
pub mod io;
pub mod model;
pub mod proofsys;
pub mod semantics;
pub mod transform;

pub use budget::Budget;
pub use formula::{parse, Formula, ParseError};
pub use model::{
    AnyModel, CompositeClass, Family, FrameProperty, KripkeModel, ModelRef, NeighborhoodModel,
    StateSet, Valuation,
};
pub use semantics::SemanticsKind;
