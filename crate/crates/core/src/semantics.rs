//! Truth of formulas in finite models.
//!
//! Three readings of `D φ` are supported:
//!
//! * [`SemanticsKind::Old`]: `φ`'s extension or its complement is a neighborhood of `s`.
//! * [`SemanticsKind::New`]: `φ`'s extension is a neighborhood of `s`.
//! * [`SemanticsKind::Kripke`]: all successors of `s` agree on `φ`.
//!
//! `B φ` is the neighborhood box (`φ`'s extension is a neighborhood) under
//! Old/New and the relational box under Kripke.
//!
//! Evaluation compiles the formula into a shared postorder DAG and computes
//! each distinct subformula's extension once.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::budget::Budget;
use crate::formula::Formula;
use crate::model::{KripkeModel, ModelRef, NeighborhoodModel, StateSet, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemanticsKind {
    Old,
    New,
    Kripke,
}

impl SemanticsKind {
    pub fn name(self) -> &'static str {
        match self {
            SemanticsKind::Old => "old",
            SemanticsKind::New => "new",
            SemanticsKind::Kripke => "kripke",
        }
    }

    pub fn from_name(name: &str) -> Option<SemanticsKind> {
        match name {
            "old" => Some(SemanticsKind::Old),
            "new" => Some(SemanticsKind::New),
            "kripke" => Some(SemanticsKind::Kripke),
            _ => None,
        }
    }

    pub fn accepts(self, model: ModelRef<'_>) -> bool {
        matches!(
            (self, model),
            (SemanticsKind::Kripke, ModelRef::Kripke(_))
                | (
                    SemanticsKind::Old | SemanticsKind::New,
                    ModelRef::Neighborhood(_)
                )
        )
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("state {0:?} not found")]
    StateNotFound(String),
    #[error("{kind} semantics cannot be applied to a {model} model")]
    Mismatch {
        kind: SemanticsKind,
        model: &'static str,
    },
    #[error("valuation search needs 2^{needed} valuations; budget allows 2^{limit}")]
    BudgetExceeded { needed: usize, limit: usize },
}

fn check_kind(model: ModelRef<'_>, kind: SemanticsKind) -> Result<(), SemanticsError> {
    if kind.accepts(model) {
        Ok(())
    } else {
        Err(SemanticsError::Mismatch {
            kind,
            model: match model {
                ModelRef::Neighborhood(_) => "neighborhood",
                ModelRef::Kripke(_) => "Kripke",
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom(usize),
    Top,
    Not(usize),
    And(usize, usize),
    Delta(usize),
    Box(usize),
}

/// A formula compiled to a postorder node list with shared subformulas.
#[derive(Clone, Debug)]
pub struct Compiled {
    nodes: Vec<Node>,
    atoms: Vec<String>,
}

impl Compiled {
    pub fn new(formula: &Formula) -> Compiled {
        let mut builder = Builder::default();
        builder.add(&formula.expand_sugar());
        Compiled {
            nodes: builder.nodes,
            atoms: builder.atoms,
        }
    }

    /// Atom names in first-occurrence order; `extension_with` takes their
    /// values in this order.
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Extension in `model` with atom values given positionally.
    pub fn extension_with(
        &self,
        model: ModelRef<'_>,
        kind: SemanticsKind,
        atoms: &[StateSet],
    ) -> StateSet {
        let mut values: Vec<StateSet> = Vec::with_capacity(self.nodes.len());
        let n = model.len();
        let full = StateSet::full(n);
        for node in &self.nodes {
            let v = match *node {
                Node::Atom(i) => atoms[i],
                Node::Top => full,
                Node::Not(a) => values[a].complement(n),
                Node::And(a, b) => values[a].intersection(values[b]),
                Node::Delta(a) => modal_extension(model, kind, values[a], false),
                Node::Box(a) => modal_extension(model, kind, values[a], true),
            };
            values.push(v);
        }
        *values.last().expect("compiled formula has a root")
    }

    /// Extension in `model` reading atoms from its valuation.
    pub fn extension(&self, model: ModelRef<'_>, kind: SemanticsKind) -> StateSet {
        let atoms: Vec<StateSet> = self.atoms.iter().map(|p| model.atom(p)).collect();
        self.extension_with(model, kind, &atoms)
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    atoms: Vec<String>,
    seen: HashMap<Node, usize>,
}

impl Builder {
    fn push(&mut self, node: Node) -> usize {
        if let Some(&i) = self.seen.get(&node) {
            return i;
        }
        self.nodes.push(node);
        self.seen.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn add(&mut self, f: &Formula) -> usize {
        let node = match f {
            Formula::Atom(p) => {
                let i = match self.atoms.iter().position(|a| a == p) {
                    Some(i) => i,
                    None => {
                        self.atoms.push(p.clone());
                        self.atoms.len() - 1
                    }
                };
                Node::Atom(i)
            }
            Formula::Top => Node::Top,
            Formula::Not(g) => Node::Not(self.add(g)),
            Formula::And(l, r) => {
                let l = self.add(l);
                Node::And(l, self.add(r))
            }
            Formula::Delta(g) => Node::Delta(self.add(g)),
            Formula::Box(g) => Node::Box(self.add(g)),
            other => unreachable!("sugar survived expansion: {other:?}"),
        };
        self.push(node)
    }
}

/// States where `D` (or `B` when `is_box`) holds of a formula with extension `ext`.
pub fn modal_extension(
    model: ModelRef<'_>,
    kind: SemanticsKind,
    ext: StateSet,
    is_box: bool,
) -> StateSet {
    let n = model.len();
    let mut out = StateSet::EMPTY;
    match model {
        ModelRef::Neighborhood(m) => {
            let comp = ext.complement(n);
            for s in 0..n {
                if neighborhood_delta(m, s, kind, ext, comp, is_box) {
                    out.insert(s);
                }
            }
        }
        ModelRef::Kripke(k) => {
            for s in 0..n {
                if kripke_delta(k, s, ext, is_box) {
                    out.insert(s);
                }
            }
        }
    }
    out
}

#[inline]
fn neighborhood_delta(
    m: &NeighborhoodModel,
    s: usize,
    kind: SemanticsKind,
    ext: StateSet,
    comp: StateSet,
    is_box: bool,
) -> bool {
    let family = m.neighborhoods(s);
    match kind {
        SemanticsKind::Old if !is_box => family.contains(ext) || family.contains(comp),
        _ => family.contains(ext),
    }
}

#[inline]
fn kripke_delta(k: &KripkeModel, s: usize, ext: StateSet, is_box: bool) -> bool {
    let succ = k.successors(s);
    succ.is_subset(ext) || (!is_box && succ.is_subset(ext.complement(k.len())))
}

/// The Δ clause of `kind` at state `s` of a model, for a set `ext`.
pub fn delta_clause(model: ModelRef<'_>, kind: SemanticsKind, s: usize, ext: StateSet) -> bool {
    match model {
        ModelRef::Neighborhood(m) => {
            neighborhood_delta(m, s, kind, ext, ext.complement(m.len()), false)
        }
        ModelRef::Kripke(k) => kripke_delta(k, s, ext, false),
    }
}

pub fn extension<'a>(
    model: impl Into<ModelRef<'a>>,
    formula: &Formula,
    kind: SemanticsKind,
) -> Result<StateSet, SemanticsError> {
    let model = model.into();
    check_kind(model, kind)?;
    Ok(Compiled::new(formula).extension(model, kind))
}

pub fn eval<'a>(
    model: impl Into<ModelRef<'a>>,
    state: usize,
    formula: &Formula,
    kind: SemanticsKind,
) -> Result<bool, SemanticsError> {
    let model = model.into();
    if state >= model.len() {
        return Err(SemanticsError::StateNotFound(state.to_string()));
    }
    Ok(extension(model, formula, kind)?.contains(state))
}

/// `eval` addressing the state by name.
pub fn eval_named<'a>(
    model: impl Into<ModelRef<'a>>,
    state: &str,
    formula: &Formula,
    kind: SemanticsKind,
) -> Result<bool, SemanticsError> {
    let model = model.into();
    let index = model
        .states()
        .iter()
        .position(|s| s == state)
        .ok_or_else(|| SemanticsError::StateNotFound(state.to_string()))?;
    eval(model, index, formula, kind)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A valuation of the formula's atoms and a state where it fails.
    Refuted {
        valuation: Valuation,
        state: usize,
    },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Validity of `formula` on the frame underlying `frame` (its valuation is
/// ignored): true at every state under every valuation of the formula's atoms.
///
/// Valuations are visited in descending mask order per atom, so the first
/// refuting valuation reported makes atoms as large as possible.
pub fn frame_valid<'a>(
    frame: impl Into<ModelRef<'a>>,
    formula: &Formula,
    kind: SemanticsKind,
    budget: &Budget,
) -> Result<Validity, SemanticsError> {
    let frame = frame.into();
    check_kind(frame, kind)?;
    let compiled = Compiled::new(formula);
    let n = frame.len();
    let k = compiled.atoms().len();
    let needed = n * k;
    if needed > budget.valuation_bits {
        return Err(SemanticsError::BudgetExceeded {
            needed,
            limit: budget.valuation_bits,
        });
    }
    let full = StateSet::full(n);
    let mut values = vec![full; k];
    loop {
        let ext = compiled.extension_with(frame, kind, &values);
        if ext != full {
            let state = ext
                .complement(n)
                .iter()
                .next()
                .expect("nonempty complement");
            let valuation = compiled
                .atoms()
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect();
            return Ok(Validity::Refuted { valuation, state });
        }
        // Descending odometer, last atom fastest.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Validity::Valid);
            }
            i -= 1;
            if values[i].is_empty() {
                values[i] = full;
            } else {
                values[i] = StateSet(values[i].0 - 1);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::model::Family;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    /// S = {0,1}, N ≡ {∅, S}, V(p) = {0}.
    fn trivial_algebra() -> NeighborhoodModel {
        let fam = Family::from_sets(2, [StateSet(0), StateSet(0b11)]);
        NeighborhoodModel::new(
            vec!["0".into(), "1".into()],
            vec![fam.clone(), fam],
            Valuation::from([("p".into(), StateSet(0b01))]),
        )
        .unwrap()
    }

    #[test]
    fn new_semantics_examples() {
        let m = trivial_algebra();
        assert!(!eval(&m, 0, &f("D p"), SemanticsKind::New).unwrap());
        assert!(eval(&m, 0, &f("D top"), SemanticsKind::New).unwrap());
        assert_eq!(
            extension(&m, &f("D p"), SemanticsKind::New).unwrap(),
            StateSet::EMPTY
        );
    }

    #[test]
    fn old_semantics_examples() {
        let m = trivial_algebra();
        assert!(!eval(&m, 0, &f("D p"), SemanticsKind::Old).unwrap());
        assert!(eval(&m, 0, &f("D p <-> D ~p"), SemanticsKind::Old).unwrap());
    }

    #[test]
    fn kripke_examples() {
        let k = KripkeModel::new(
            vec!["0".into(), "1".into()],
            vec![StateSet(0b11), StateSet(0)],
            Valuation::from([("p".into(), StateSet(0b01))]),
        )
        .unwrap();
        assert!(!eval(&k, 0, &f("D p"), SemanticsKind::Kripke).unwrap());
        assert!(eval(&k, 1, &f("D p"), SemanticsKind::Kripke).unwrap());
        assert!(!eval(&k, 0, &f("B p"), SemanticsKind::Kripke).unwrap());
        assert!(eval(&k, 1, &f("B bot"), SemanticsKind::Kripke).unwrap());
    }

    #[test]
    fn trivial_extensions() {
        let m = trivial_algebra();
        for kind in [SemanticsKind::Old, SemanticsKind::New] {
            assert_eq!(extension(&m, &Formula::Top, kind).unwrap(), m.full());
            assert_eq!(extension(&m, &f("p"), kind).unwrap(), StateSet(0b01));
            assert_eq!(extension(&m, &f("q"), kind).unwrap(), StateSet::EMPTY);
        }
    }

    #[test]
    fn errors() {
        let m = trivial_algebra();
        assert_eq!(
            eval(&m, 5, &f("p"), SemanticsKind::New),
            Err(SemanticsError::StateNotFound("5".into()))
        );
        assert!(matches!(
            eval(&m, 0, &f("p"), SemanticsKind::Kripke),
            Err(SemanticsError::Mismatch { .. })
        ));
        assert!(eval_named(&m, "1", &f("~p"), SemanticsKind::New).unwrap());
        assert!(eval_named(&m, "x", &f("p"), SemanticsKind::New).is_err());
    }

    fn one_state(sets: &[u32]) -> NeighborhoodModel {
        NeighborhoodModel::frame(vec![Family::from_sets(
            1,
            sets.iter().map(|&m| StateSet(m)),
        )])
        .unwrap()
    }

    #[test]
    fn frame_validity_examples() {
        let budget = Budget::default();
        let c_frame = one_state(&[0, 1]);
        assert_eq!(
            frame_valid(&c_frame, &f("D p <-> D ~p"), SemanticsKind::New, &budget).unwrap(),
            Validity::Valid
        );

        let unit_only = one_state(&[1]);
        assert_eq!(
            frame_valid(&unit_only, &f("D p <-> D ~p"), SemanticsKind::New, &budget).unwrap(),
            Validity::Refuted {
                valuation: Valuation::from([("p".into(), StateSet(1))]),
                state: 0
            }
        );

        assert_eq!(
            frame_valid(&c_frame, &f("D p -> p"), SemanticsKind::New, &budget).unwrap(),
            Validity::Refuted {
                valuation: Valuation::from([("p".into(), StateSet(0))]),
                state: 0
            }
        );
    }

    #[test]
    fn frame_validity_budget() {
        let budget = Budget {
            valuation_bits: 2,
            ..Budget::default()
        };
        let m = trivial_algebra();
        assert_eq!(
            frame_valid(&m, &f("p & q"), SemanticsKind::New, &budget),
            Err(SemanticsError::BudgetExceeded {
                needed: 4,
                limit: 2
            })
        );
    }

    #[test]
    fn shared_subformulas_are_compiled_once() {
        let c = Compiled::new(&f("D p & D p & D p"));
        // p, D p, D p & D p, (D p & D p) & D p
        assert_eq!(c.nodes.len(), 4);
        assert_eq!(c.atoms(), ["p".to_string()]);
    }
}
