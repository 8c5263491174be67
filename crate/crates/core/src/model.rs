//! Finite neighborhood and Kripke structures.
//!
//! States are addressed by their position in the model's ordered state list;
//! names are kept only for I/O and reporting. A frame is a model whose
//! valuation is empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::is_atom_name;

/// Largest state count for neighborhood models (families are bitsets over
/// all `2^n` subsets).
pub const MAX_NEIGHBORHOOD_STATES: usize = 16;
/// Largest state count for Kripke models.
pub const MAX_KRIPKE_STATES: usize = 32;

/// A subset of a model's states as a bitmask over state indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(pub u32);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> StateSet {
        debug_assert!(n <= 32);
        if n == 32 {
            StateSet(u32::MAX)
        } else {
            StateSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> StateSet {
        StateSet(1 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> StateSet {
        StateSet(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: StateSet) -> StateSet {
        StateSet(self.0 & !other.0)
    }

    /// Complement relative to `{0, .., n-1}`.
    #[inline]
    pub fn complement(self, n: usize) -> StateSet {
        StateSet(!self.0 & StateSet::full(n).0)
    }

    #[inline]
    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterates over every subset of `{0, .., n-1}` in ascending mask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = StateSet> {
    (0..1u64 << n).map(|m| StateSet(m as u32))
}

/// A set of subsets of an `n`-element state space, stored as a bitset
/// indexed by subset mask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family {
    words: Vec<u64>,
}

impl Family {
    pub fn empty(n: usize) -> Family {
        let bits = 1usize << n;
        Family {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    /// The full powerset `2^S`.
    pub fn powerset(n: usize) -> Family {
        let mut family = Family::empty(n);
        for x in all_subsets(n) {
            family.insert(x);
        }
        family
    }

    pub fn from_sets(n: usize, sets: impl IntoIterator<Item = StateSet>) -> Family {
        let mut family = Family::empty(n);
        for x in sets {
            family.insert(x);
        }
        family
    }

    /// Decodes a family from its integer code over `2^(2^n)` (bit `m` set
    /// iff the subset with mask `m` is a member). Requires `n <= 6`.
    pub fn from_code(n: usize, code: u64) -> Family {
        debug_assert!(n <= 6);
        let mut family = Family::empty(n);
        let width = 1usize << n;
        family.words[0] = if width == 64 {
            code
        } else {
            code & ((1u64 << width) - 1)
        };
        family
    }

    /// Integer code of the family; only meaningful for `n <= 6`.
    pub fn code(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn contains(&self, x: StateSet) -> bool {
        let m = x.0 as usize;
        self.words[m / 64] >> (m % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: StateSet) {
        let m = x.0 as usize;
        self.words[m / 64] |= 1 << (m % 64);
    }

    pub fn remove(&mut self, x: StateSet) {
        let m = x.0 as usize;
        self.words[m / 64] &= !(1 << (m % 64));
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Members in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = StateSet> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(StateSet((wi * 64 + b) as u32))
                }
            })
        })
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Atom name to extension. Atoms not present are false everywhere.
pub type Valuation = BTreeMap<String, StateSet>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no states")]
    NoStates,
    #[error("model has {count} states; at most {max} are supported")]
    TooManyStates { count: usize, max: usize },
    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodModel {
    states: Vec<String>,
    neighborhoods: Vec<Family>,
    valuation: Valuation,
}

impl NeighborhoodModel {
    /// Builds a model from index-addressed parts. Fails if the state count is
    /// out of range or the parts disagree in size.
    pub fn new(
        states: Vec<String>,
        neighborhoods: Vec<Family>,
        valuation: Valuation,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        if n > MAX_NEIGHBORHOOD_STATES {
            return Err(ModelError::TooManyStates {
                count: n,
                max: MAX_NEIGHBORHOOD_STATES,
            });
        }
        let mut violations = Vec::new();
        if neighborhoods.len() != n {
            violations.push(Violation::MissingNeighborhoods {
                state: format!("{} of {} states", neighborhoods.len(), n),
            });
        }
        let full = StateSet::full(n);
        for (atom, ext) in &valuation {
            if !ext.is_subset(full) {
                violations.push(Violation::UnknownState {
                    context: format!("V({atom})"),
                    name: format!("index outside 0..{n}"),
                });
            }
        }
        if neighborhoods
            .iter()
            .any(|f| f.words.len() != Family::empty(n).words.len())
        {
            violations.push(Violation::UnknownState {
                context: "N".into(),
                name: "family sized for a different state count".into(),
            });
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(NeighborhoodModel {
            states,
            neighborhoods,
            valuation,
        })
    }

    /// A frame with states named `0..n-1` and empty valuation.
    pub fn frame(neighborhoods: Vec<Family>) -> Result<Self, ModelError> {
        let states = (0..neighborhoods.len()).map(|i| i.to_string()).collect();
        NeighborhoodModel::new(states, neighborhoods, Valuation::new())
    }

    /// Frame whose state `i` has the family with integer code `codes[i]`.
    pub fn frame_from_codes(codes: &[u64]) -> Result<Self, ModelError> {
        let n = codes.len();
        NeighborhoodModel::frame(codes.iter().map(|&c| Family::from_code(n, c)).collect())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn full(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn neighborhoods(&self, s: usize) -> &Family {
        &self.neighborhoods[s]
    }

    pub fn families(&self) -> &[Family] {
        &self.neighborhoods
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn atom(&self, name: &str) -> StateSet {
        self.valuation.get(name).copied().unwrap_or_default()
    }

    /// Same frame, new valuation.
    pub fn with_valuation(&self, valuation: Valuation) -> Result<Self, ModelError> {
        NeighborhoodModel::new(self.states.clone(), self.neighborhoods.clone(), valuation)
    }

    /// Same states and valuation, new neighborhood function.
    pub fn with_neighborhoods(&self, neighborhoods: Vec<Family>) -> Result<Self, ModelError> {
        NeighborhoodModel::new(self.states.clone(), neighborhoods, self.valuation.clone())
    }

    /// The underlying frame (valuation dropped).
    pub fn to_frame(&self) -> NeighborhoodModel {
        NeighborhoodModel {
            states: self.states.clone(),
            neighborhoods: self.neighborhoods.clone(),
            valuation: Valuation::new(),
        }
    }

    pub fn has_property(&self, property: FrameProperty) -> bool {
        (0..self.len()).all(|s| self.state_has_property(s, property))
    }

    /// Whether `N(s)` satisfies the property at the single state `s`.
    pub fn state_has_property(&self, s: usize, property: FrameProperty) -> bool {
        let n = self.len();
        let family = &self.neighborhoods[s];
        let full = self.full();
        match property {
            FrameProperty::N => family.contains(full),
            FrameProperty::R => {
                let core = family.iter().fold(full, |acc, x| acc.intersection(x));
                family.contains(core)
            }
            FrameProperty::I => family
                .iter()
                .all(|x| family.iter().all(|y| family.contains(x.intersection(y)))),
            FrameProperty::S => family
                .iter()
                .all(|x| supersets(x, n).all(|y| family.contains(y))),
            FrameProperty::C => family.iter().all(|x| family.contains(x.complement(n))),
            FrameProperty::D => family.iter().all(|x| !family.contains(x.complement(n))),
            FrameProperty::T => family.iter().all(|x| x.contains(s)),
            FrameProperty::B => all_subsets(n).filter(|x| x.contains(s)).all(|x| {
                let co = x.complement(n);
                let derived =
                    StateSet::from_indices((0..n).filter(|&u| !self.neighborhoods[u].contains(co)));
                family.contains(derived)
            }),
            FrameProperty::Four => family.iter().all(|x| {
                let derived =
                    StateSet::from_indices((0..n).filter(|&u| self.neighborhoods[u].contains(x)));
                family.contains(derived)
            }),
            FrameProperty::Five => all_subsets(n).filter(|x| !family.contains(*x)).all(|x| {
                let derived =
                    StateSet::from_indices((0..n).filter(|&u| !self.neighborhoods[u].contains(x)));
                family.contains(derived)
            }),
            // For all Y, Z: X ∪ Y ∈ N or (S∖X) ∪ Z ∈ N. Quantifying Y and Z
            // independently, this is: every superset of X is in N, or every
            // superset of S∖X is in N.
            FrameProperty::Ws => family.iter().all(|x| {
                supersets(x, n).all(|y| family.contains(y))
                    || supersets(x.complement(n), n).all(|z| family.contains(z))
            }),
        }
    }

    pub fn properties(&self) -> BTreeSet<FrameProperty> {
        FrameProperty::ALL
            .iter()
            .copied()
            .filter(|p| self.has_property(*p))
            .collect()
    }

    pub fn classify(&self) -> BTreeSet<CompositeClass> {
        CompositeClass::ALL
            .iter()
            .copied()
            .filter(|c| self.is_in(*c))
            .collect()
    }

    pub fn is_in(&self, class: CompositeClass) -> bool {
        class.properties().iter().all(|p| self.has_property(*p))
    }
}

/// All supersets of `x` within `{0, .., n-1}`.
pub fn supersets(x: StateSet, n: usize) -> impl Iterator<Item = StateSet> {
    let free = x.complement(n).0;
    // Enumerate subsets of `free` by the standard decrement-and-mask walk.
    let mut sub = Some(free);
    std::iter::from_fn(move || {
        let current = sub?;
        sub = if current == 0 {
            None
        } else {
            Some((current - 1) & free)
        };
        Some(StateSet(x.0 | current))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    successors: Vec<StateSet>,
    valuation: Valuation,
}

impl KripkeModel {
    pub fn new(
        states: Vec<String>,
        successors: Vec<StateSet>,
        valuation: Valuation,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        if n > MAX_KRIPKE_STATES {
            return Err(ModelError::TooManyStates {
                count: n,
                max: MAX_KRIPKE_STATES,
            });
        }
        let full = StateSet::full(n);
        let mut violations = Vec::new();
        if successors.len() != n {
            violations.push(Violation::MissingNeighborhoods {
                state: format!("{} of {} states", successors.len(), n),
            });
        }
        for (i, r) in successors.iter().enumerate() {
            if !r.is_subset(full) {
                violations.push(Violation::UnknownState {
                    context: format!("R({})", states.get(i).map(String::as_str).unwrap_or("?")),
                    name: format!("index outside 0..{n}"),
                });
            }
        }
        for (atom, ext) in &valuation {
            if !ext.is_subset(full) {
                violations.push(Violation::UnknownState {
                    context: format!("V({atom})"),
                    name: format!("index outside 0..{n}"),
                });
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(KripkeModel {
            states,
            successors,
            valuation,
        })
    }

    pub fn frame(successors: Vec<StateSet>) -> Result<Self, ModelError> {
        let states = (0..successors.len()).map(|i| i.to_string()).collect();
        KripkeModel::new(states, successors, Valuation::new())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn full(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn successors(&self, s: usize) -> StateSet {
        self.successors[s]
    }

    pub fn relation(&self) -> &[StateSet] {
        &self.successors
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn atom(&self, name: &str) -> StateSet {
        self.valuation.get(name).copied().unwrap_or_default()
    }

    pub fn with_valuation(&self, valuation: Valuation) -> Result<Self, ModelError> {
        KripkeModel::new(self.states.clone(), self.successors.clone(), valuation)
    }

    pub fn to_frame(&self) -> KripkeModel {
        KripkeModel {
            states: self.states.clone(),
            successors: self.successors.clone(),
            valuation: Valuation::new(),
        }
    }
}

/// Either kind of model, borrowed.
#[derive(Clone, Copy, Debug)]
pub enum ModelRef<'a> {
    Neighborhood(&'a NeighborhoodModel),
    Kripke(&'a KripkeModel),
}

impl<'a> ModelRef<'a> {
    pub fn len(&self) -> usize {
        match self {
            ModelRef::Neighborhood(m) => m.len(),
            ModelRef::Kripke(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn states(&self) -> &'a [String] {
        match self {
            ModelRef::Neighborhood(m) => m.states(),
            ModelRef::Kripke(k) => k.states(),
        }
    }

    pub fn valuation(&self) -> &'a Valuation {
        match self {
            ModelRef::Neighborhood(m) => m.valuation(),
            ModelRef::Kripke(k) => k.valuation(),
        }
    }

    pub fn atom(&self, name: &str) -> StateSet {
        self.valuation().get(name).copied().unwrap_or_default()
    }
}

impl<'a> From<&'a NeighborhoodModel> for ModelRef<'a> {
    fn from(m: &'a NeighborhoodModel) -> Self {
        ModelRef::Neighborhood(m)
    }
}

impl<'a> From<&'a KripkeModel> for ModelRef<'a> {
    fn from(k: &'a KripkeModel) -> Self {
        ModelRef::Kripke(k)
    }
}

/// The neighborhood properties checked state by state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameProperty {
    /// Contains the unit.
    N,
    /// Contains its core (`∩∅ = S`).
    R,
    /// Closed under binary intersections.
    I,
    /// Closed under supersets.
    S,
    /// Closed under complements.
    C,
    D,
    T,
    B,
    Four,
    Five,
    /// Closed under supersets or co-supersets.
    Ws,
}

impl FrameProperty {
    pub const ALL: [FrameProperty; 11] = [
        FrameProperty::N,
        FrameProperty::R,
        FrameProperty::I,
        FrameProperty::S,
        FrameProperty::C,
        FrameProperty::D,
        FrameProperty::T,
        FrameProperty::B,
        FrameProperty::Four,
        FrameProperty::Five,
        FrameProperty::Ws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameProperty::N => "n",
            FrameProperty::R => "r",
            FrameProperty::I => "i",
            FrameProperty::S => "s",
            FrameProperty::C => "c",
            FrameProperty::D => "d",
            FrameProperty::T => "t",
            FrameProperty::B => "b",
            FrameProperty::Four => "4",
            FrameProperty::Five => "5",
            FrameProperty::Ws => "ws",
        }
    }

    pub fn from_name(name: &str) -> Option<FrameProperty> {
        FrameProperty::ALL.iter().copied().find(|p| {
            p.name() == name
                || (name == "four" && *p == FrameProperty::Four)
                || (name == "five" && *p == FrameProperty::Five)
        })
    }

    /// Whether the property of `N(s)` depends only on `N(s)` and `s`.
    pub fn is_local(self) -> bool {
        !matches!(
            self,
            FrameProperty::B | FrameProperty::Four | FrameProperty::Five
        )
    }
}

impl fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.name())
    }
}

/// Named frame classes defined by conjunctions of properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompositeClass {
    /// (c)
    CModel,
    /// (c), (s)
    MonotonicC,
    /// (c), (s), (i)
    Csi,
    /// (s), (i), (n)
    Filter,
    /// (n), (i), (c), (ws)
    QuasiFilter,
}

impl CompositeClass {
    pub const ALL: [CompositeClass; 5] = [
        CompositeClass::CModel,
        CompositeClass::MonotonicC,
        CompositeClass::Csi,
        CompositeClass::Filter,
        CompositeClass::QuasiFilter,
    ];

    pub fn properties(self) -> &'static [FrameProperty] {
        use FrameProperty::*;
        match self {
            CompositeClass::CModel => &[C],
            CompositeClass::MonotonicC => &[C, S],
            CompositeClass::Csi => &[C, S, I],
            CompositeClass::Filter => &[S, I, N],
            CompositeClass::QuasiFilter => &[N, I, C, Ws],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CompositeClass::CModel => "c-model",
            CompositeClass::MonotonicC => "monotonic-c",
            CompositeClass::Csi => "csi",
            CompositeClass::Filter => "filter",
            CompositeClass::QuasiFilter => "quasi-filter",
        }
    }

    pub fn from_name(name: &str) -> Option<CompositeClass> {
        let name = match name {
            "c" | "c-frames" | "c-frame" => "c-model",
            "cs" => "monotonic-c",
            "qf" => "quasi-filter",
            other => other,
        };
        CompositeClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
    }
}

impl fmt::Display for CompositeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A model description keyed by state names, as read from a file, before
/// index resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelDescription {
    Neighborhood {
        states: Vec<String>,
        neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
        valuation: BTreeMap<String, Vec<String>>,
    },
    Kripke {
        states: Vec<String>,
        successors: BTreeMap<String, Vec<String>>,
        valuation: BTreeMap<String, Vec<String>>,
    },
}

/// Built model of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyModel {
    Neighborhood(NeighborhoodModel),
    Kripke(KripkeModel),
}

impl AnyModel {
    pub fn as_ref(&self) -> ModelRef<'_> {
        match self {
            AnyModel::Neighborhood(m) => ModelRef::Neighborhood(m),
            AnyModel::Kripke(k) => ModelRef::Kripke(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    TooManyStates { count: usize, max: usize },
    DuplicateState { name: String },
    BadAtomName { name: String },
    UnknownState { context: String, name: String },
    DuplicateEntry { context: String, entry: String },
    MissingNeighborhoods { state: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "model has no states"),
            Violation::TooManyStates { count, max } => {
                write!(f, "{count} states exceeds the supported maximum {max}")
            }
            Violation::DuplicateState { name } => write!(f, "duplicate state {name:?}"),
            Violation::BadAtomName { name } => write!(f, "invalid atom name {name:?}"),
            Violation::UnknownState { context, name } => {
                write!(f, "unknown state {name:?} in {context}")
            }
            Violation::DuplicateEntry { context, entry } => {
                write!(f, "duplicate entry {entry} in {context}")
            }
            Violation::MissingNeighborhoods { state } => {
                write!(f, "missing entry for state {state:?}")
            }
        }
    }
}

impl ModelDescription {
    /// Every invariant violation in the description; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (states, valuation, max) = match self {
            ModelDescription::Neighborhood {
                states, valuation, ..
            } => (states, valuation, MAX_NEIGHBORHOOD_STATES),
            ModelDescription::Kripke {
                states, valuation, ..
            } => (states, valuation, MAX_KRIPKE_STATES),
        };
        if states.is_empty() {
            out.push(Violation::NoStates);
        }
        if states.len() > max {
            out.push(Violation::TooManyStates {
                count: states.len(),
                max,
            });
        }
        let mut seen = BTreeSet::new();
        for s in states {
            if !seen.insert(s.as_str()) {
                out.push(Violation::DuplicateState { name: s.clone() });
            }
        }
        let check_set = |context: String, set: &[String], out: &mut Vec<Violation>| {
            let mut members = BTreeSet::new();
            for name in set {
                if !seen.contains(name.as_str()) {
                    out.push(Violation::UnknownState {
                        context: context.clone(),
                        name: name.clone(),
                    });
                }
                if !members.insert(name.as_str()) {
                    out.push(Violation::DuplicateEntry {
                        context: context.clone(),
                        entry: name.clone(),
                    });
                }
            }
        };
        for (atom, ext) in valuation {
            if !is_atom_name(atom) {
                out.push(Violation::BadAtomName { name: atom.clone() });
            }
            check_set(format!("V({atom})"), ext, &mut out);
        }
        match self {
            ModelDescription::Neighborhood { neighborhoods, .. } => {
                for (state, family) in neighborhoods {
                    if !seen.contains(state.as_str()) {
                        out.push(Violation::UnknownState {
                            context: "N".into(),
                            name: state.clone(),
                        });
                    }
                    let mut distinct = BTreeSet::new();
                    for set in family {
                        check_set(format!("N({state})"), set, &mut out);
                        let mut sorted = set.clone();
                        sorted.sort();
                        sorted.dedup();
                        if !distinct.insert(sorted) {
                            out.push(Violation::DuplicateEntry {
                                context: format!("N({state})"),
                                entry: format!("{set:?}"),
                            });
                        }
                    }
                }
                for s in states {
                    if !neighborhoods.contains_key(s) {
                        out.push(Violation::MissingNeighborhoods { state: s.clone() });
                    }
                }
            }
            ModelDescription::Kripke { successors, .. } => {
                for (state, succ) in successors {
                    if !seen.contains(state.as_str()) {
                        out.push(Violation::UnknownState {
                            context: "R".into(),
                            name: state.clone(),
                        });
                    }
                    check_set(format!("R({state})"), succ, &mut out);
                }
                for s in states {
                    if !successors.contains_key(s) {
                        out.push(Violation::MissingNeighborhoods { state: s.clone() });
                    }
                }
            }
        }
        out
    }

    /// Resolves names to indices; fails with every violation found.
    pub fn build(&self) -> Result<AnyModel, ModelError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let index = |states: &[String], names: &[String]| {
            StateSet::from_indices(
                names
                    .iter()
                    .map(|n| states.iter().position(|s| s == n).expect("validated")),
            )
        };
        match self {
            ModelDescription::Neighborhood {
                states,
                neighborhoods,
                valuation,
            } => {
                let n = states.len();
                let families = states
                    .iter()
                    .map(|s| {
                        Family::from_sets(n, neighborhoods[s].iter().map(|set| index(states, set)))
                    })
                    .collect();
                let valuation = valuation
                    .iter()
                    .map(|(p, ext)| (p.clone(), index(states, ext)))
                    .collect();
                Ok(AnyModel::Neighborhood(NeighborhoodModel::new(
                    states.clone(),
                    families,
                    valuation,
                )?))
            }
            ModelDescription::Kripke {
                states,
                successors,
                valuation,
            } => {
                let succ = states
                    .iter()
                    .map(|s| index(states, &successors[s]))
                    .collect();
                let valuation = valuation
                    .iter()
                    .map(|(p, ext)| (p.clone(), index(states, ext)))
                    .collect();
                Ok(AnyModel::Kripke(KripkeModel::new(
                    states.clone(),
                    succ,
                    valuation,
                )?))
            }
        }
    }
}

/// Names of the members of `set`, sorted.
pub fn set_names(states: &[String], set: StateSet) -> Vec<String> {
    let mut names: Vec<String> = set.iter().map(|i| states[i].clone()).collect();
    names.sort();
    names
}

impl NeighborhoodModel {
    pub fn describe(&self) -> ModelDescription {
        let neighborhoods = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut sets: Vec<Vec<String>> = self.neighborhoods[i]
                    .iter()
                    .map(|x| set_names(&self.states, x))
                    .collect();
                sets.sort();
                (s.clone(), sets)
            })
            .collect();
        ModelDescription::Neighborhood {
            states: self.states.clone(),
            neighborhoods,
            valuation: describe_valuation(&self.states, &self.valuation),
        }
    }
}

impl KripkeModel {
    pub fn describe(&self) -> ModelDescription {
        let successors = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), set_names(&self.states, self.successors[i])))
            .collect();
        ModelDescription::Kripke {
            states: self.states.clone(),
            successors,
            valuation: describe_valuation(&self.states, &self.valuation),
        }
    }
}

fn describe_valuation(states: &[String], valuation: &Valuation) -> BTreeMap<String, Vec<String>> {
    valuation
        .iter()
        .map(|(p, ext)| (p.clone(), set_names(states, *ext)))
        .collect()
}
