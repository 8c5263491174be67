//! Bisimulation notions for the contingency language, greatest bisimilarity,
//! and logical-equivalence partitions with characteristic formulas.
//!
//! Most notions quantify over *coherent* pairs `(U, U')`: for every `(x, y)`
//! in the relation, `x ∈ U` iff `y ∈ U'`. Coherent pairs are exactly the
//! unions of connected components of the relation's bipartite graph (states
//! outside the relation form singleton components), so they are enumerated
//! as subsets of components rather than as pairs of subsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::budget::Budget;
use crate::formula::Formula;
use crate::model::{AnyModel, CompositeClass, ModelRef, NeighborhoodModel, StateSet};
use crate::semantics::{delta_clause, SemanticsKind};

/// A set of `(left state, right state)` index pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairRelation {
    pairs: BTreeSet<(usize, usize)>,
}

impl PairRelation {
    pub fn new() -> Self {
        PairRelation::default()
    }

    pub fn insert(&mut self, left: usize, right: usize) -> bool {
        self.pairs.insert((left, right))
    }

    pub fn remove(&mut self, left: usize, right: usize) -> bool {
        self.pairs.remove(&(left, right))
    }

    pub fn contains(&self, left: usize, right: usize) -> bool {
        self.pairs.contains(&(left, right))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_subset(&self, other: &PairRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Identity on `0..n`.
    pub fn identity(n: usize) -> Self {
        (0..n).map(|i| (i, i)).collect()
    }

    /// `Z[X]`: right states related to some member of `x`.
    pub fn image(&self, x: StateSet) -> StateSet {
        StateSet::from_indices(self.iter().filter(|(l, _)| x.contains(*l)).map(|(_, r)| r))
    }

    /// `Z⁻¹[X']`: left states related to some member of `x`.
    pub fn preimage(&self, x: StateSet) -> StateSet {
        StateSet::from_indices(self.iter().filter(|(_, r)| x.contains(*r)).map(|(l, _)| l))
    }
}

impl FromIterator<(usize, usize)> for PairRelation {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        PairRelation {
            pairs: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BisimKind {
    /// Coherence with the old Δ clause, between arbitrary neighborhood models.
    NbhDelta,
    /// Coherence with neighborhood membership, between c-models.
    C,
    /// As [`BisimKind::C`], between monotonic c-models.
    MonotonicC,
    /// Zig/zag on neighborhoods, between monotonic c-models.
    CMonotonic,
    /// Coherence with neighborhood membership, between quasi-filter models.
    Qf,
    /// Coherence with the relational Δ clause, between Kripke models.
    RelDelta,
}

impl BisimKind {
    pub const ALL: [BisimKind; 6] = [
        BisimKind::NbhDelta,
        BisimKind::C,
        BisimKind::MonotonicC,
        BisimKind::CMonotonic,
        BisimKind::Qf,
        BisimKind::RelDelta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BisimKind::NbhDelta => "nbh-delta",
            BisimKind::C => "c",
            BisimKind::MonotonicC => "monotonic-c",
            BisimKind::CMonotonic => "c-monotonic",
            BisimKind::Qf => "qf",
            BisimKind::RelDelta => "rel-delta",
        }
    }

    pub fn from_name(name: &str) -> Option<BisimKind> {
        BisimKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Model class both sides must belong to; `None` for no constraint
    /// beyond the model type.
    pub fn required_class(self) -> Option<CompositeClass> {
        match self {
            BisimKind::NbhDelta | BisimKind::RelDelta => None,
            BisimKind::C => Some(CompositeClass::CModel),
            BisimKind::MonotonicC | BisimKind::CMonotonic => Some(CompositeClass::MonotonicC),
            BisimKind::Qf => Some(CompositeClass::QuasiFilter),
        }
    }

    /// Semantics under which this notion preserves truth.
    pub fn semantics(self) -> SemanticsKind {
        match self {
            BisimKind::NbhDelta => SemanticsKind::Old,
            BisimKind::RelDelta => SemanticsKind::Kripke,
            _ => SemanticsKind::New,
        }
    }
}

impl fmt::Display for BisimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("{kind} bisimulation needs {expected} models on both sides")]
    WrongModelType {
        kind: BisimKind,
        expected: &'static str,
    },
    #[error("{kind} bisimulation needs {class} models; the {side} model is not one")]
    ClassPrecondition {
        kind: BisimKind,
        class: CompositeClass,
        side: Side,
    },
    #[error("a bisimulation is a nonempty relation")]
    EmptyRelation,
    #[error("pair ({0}, {1}) refers to a state outside the models")]
    PairOutOfRange(usize, usize),
    #[error("coherent-pair enumeration over {needed} states exceeds the budget of {limit}")]
    BudgetExceeded { needed: usize, limit: usize },
    #[error("semantics {0} does not apply to every model in the list")]
    SemanticsMismatch(SemanticsKind),
    #[error("partition depth {requested} not computed (stabilized at {available})")]
    DepthOutOfRange { requested: usize, available: usize },
    #[error("block {block} does not exist at depth {depth}")]
    BlockOutOfRange { block: usize, depth: usize },
}

/// Why a relation fails to be a bisimulation of some kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimViolation {
    Atoms {
        pair: (usize, usize),
        atom: String,
    },
    Coherent {
        pair: (usize, usize),
        left_set: StateSet,
        right_set: StateSet,
    },
    /// No right neighborhood inside the image of `set`.
    Zig {
        pair: (usize, usize),
        set: StateSet,
    },
    /// No left neighborhood inside the preimage of `set`.
    Zag {
        pair: (usize, usize),
        set: StateSet,
    },
}

impl BisimViolation {
    pub fn pair(&self) -> (usize, usize) {
        match self {
            BisimViolation::Atoms { pair, .. }
            | BisimViolation::Coherent { pair, .. }
            | BisimViolation::Zig { pair, .. }
            | BisimViolation::Zag { pair, .. } => *pair,
        }
    }
}

/// Whether `(u, u2)` is coherent for `z`: each related pair agrees on membership.
pub fn is_coherent(z: &PairRelation, u: StateSet, u2: StateSet) -> bool {
    z.iter().all(|(x, y)| u.contains(x) == u2.contains(y))
}

/// All coherent pairs of `z` between an `n`-state and an `m`-state model.
pub fn coherent_pairs(
    z: &PairRelation,
    n: usize,
    m: usize,
    budget: &Budget,
) -> Result<Vec<(StateSet, StateSet)>, BisimError> {
    if n + m > budget.subset_states {
        return Err(BisimError::BudgetExceeded {
            needed: n + m,
            limit: budget.subset_states,
        });
    }
    // Union-find over left states 0..n and right states n..n+m.
    let mut parent: Vec<usize> = (0..n + m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (l, r) in z.iter() {
        let a = find(&mut parent, l);
        let b = find(&mut parent, n + r);
        if a != b {
            parent[a] = b;
        }
    }
    let mut components: BTreeMap<usize, (StateSet, StateSet)> = BTreeMap::new();
    for x in 0..n + m {
        let root = find(&mut parent, x);
        let entry = components.entry(root).or_default();
        if x < n {
            entry.0.insert(x);
        } else {
            entry.1.insert(x - n);
        }
    }
    let components: Vec<(StateSet, StateSet)> = components.into_values().collect();
    let k = components.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u64..1 << k {
        let mut u = StateSet::EMPTY;
        let mut u2 = StateSet::EMPTY;
        for (i, (l, r)) in components.iter().enumerate() {
            if mask >> i & 1 == 1 {
                u = u.union(*l);
                u2 = u2.union(*r);
            }
        }
        out.push((u, u2));
    }
    Ok(out)
}

struct Sides<'a> {
    kind: BisimKind,
    left: ModelRef<'a>,
    right: ModelRef<'a>,
    atoms: Vec<String>,
}

impl<'a> Sides<'a> {
    fn new(kind: BisimKind, left: ModelRef<'a>, right: ModelRef<'a>) -> Result<Self, BisimError> {
        match (kind, left, right) {
            (BisimKind::RelDelta, ModelRef::Kripke(_), ModelRef::Kripke(_)) => {}
            (BisimKind::RelDelta, _, _) => {
                return Err(BisimError::WrongModelType {
                    kind,
                    expected: "Kripke",
                })
            }
            (_, ModelRef::Neighborhood(l), ModelRef::Neighborhood(r)) => {
                if let Some(class) = kind.required_class() {
                    for (side, m) in [(Side::Left, l), (Side::Right, r)] {
                        if !m.is_in(class) {
                            return Err(BisimError::ClassPrecondition { kind, class, side });
                        }
                    }
                }
            }
            _ => {
                return Err(BisimError::WrongModelType {
                    kind,
                    expected: "neighborhood",
                })
            }
        }
        let atoms: BTreeSet<String> = left
            .valuation()
            .keys()
            .chain(right.valuation().keys())
            .cloned()
            .collect();
        Ok(Sides {
            kind,
            left,
            right,
            atoms: atoms.into_iter().collect(),
        })
    }

    fn atom_disagreement(&self, s: usize, t: usize) -> Option<&str> {
        self.atoms
            .iter()
            .find(|p| self.left.atom(p).contains(s) != self.right.atom(p).contains(t))
            .map(String::as_str)
    }

    fn atom_agreeing(&self) -> PairRelation {
        (0..self.left.len())
            .flat_map(|s| (0..self.right.len()).map(move |t| (s, t)))
            .filter(|&(s, t)| self.atom_disagreement(s, t).is_none())
            .collect()
    }

    fn nbh(model: ModelRef<'_>) -> &NeighborhoodModel {
        match model {
            ModelRef::Neighborhood(m) => m,
            ModelRef::Kripke(_) => unreachable!("checked in Sides::new"),
        }
    }

    /// The side condition of the coherence clause for one model.
    fn side_condition(&self, model: ModelRef<'_>, s: usize, u: StateSet) -> bool {
        match self.kind {
            BisimKind::NbhDelta => delta_clause(model, SemanticsKind::Old, s, u),
            BisimKind::RelDelta => delta_clause(model, SemanticsKind::Kripke, s, u),
            BisimKind::C | BisimKind::MonotonicC | BisimKind::Qf => {
                Sides::nbh(model).neighborhoods(s).contains(u)
            }
            BisimKind::CMonotonic => unreachable!("not a coherence notion"),
        }
    }

    /// Checks the non-atom clauses for one pair.
    fn check_pair(
        &self,
        z: &PairRelation,
        coherent: &[(StateSet, StateSet)],
        s: usize,
        t: usize,
    ) -> Option<BisimViolation> {
        let pair = (s, t);
        if self.kind == BisimKind::CMonotonic {
            let left = Sides::nbh(self.left).neighborhoods(s);
            let right = Sides::nbh(self.right).neighborhoods(t);
            for x in left.iter() {
                let image = z.image(x);
                if !right.iter().any(|x2| x2.is_subset(image)) {
                    return Some(BisimViolation::Zig { pair, set: x });
                }
            }
            for x2 in right.iter() {
                let preimage = z.preimage(x2);
                if !left.iter().any(|x| x.is_subset(preimage)) {
                    return Some(BisimViolation::Zag { pair, set: x2 });
                }
            }
            return None;
        }
        coherent
            .iter()
            .find(|(u, u2)| {
                self.side_condition(self.left, s, *u) != self.side_condition(self.right, t, *u2)
            })
            .map(|&(left_set, right_set)| BisimViolation::Coherent {
                pair,
                left_set,
                right_set,
            })
    }

    fn coherent_for(
        &self,
        z: &PairRelation,
        budget: &Budget,
    ) -> Result<Vec<(StateSet, StateSet)>, BisimError> {
        if self.kind == BisimKind::CMonotonic {
            return Ok(Vec::new());
        }
        coherent_pairs(z, self.left.len(), self.right.len(), budget)
    }
}

/// Checks that `z` is a bisimulation of the given kind between two models.
/// `Ok(None)` means it is one; `Ok(Some(v))` reports the first failing pair.
pub fn check_bisim<'a>(
    kind: BisimKind,
    z: &PairRelation,
    left: impl Into<ModelRef<'a>>,
    right: impl Into<ModelRef<'a>>,
    budget: &Budget,
) -> Result<Option<BisimViolation>, BisimError> {
    let sides = Sides::new(kind, left.into(), right.into())?;
    if z.is_empty() {
        return Err(BisimError::EmptyRelation);
    }
    if let Some((s, t)) = z
        .iter()
        .find(|&(s, t)| s >= sides.left.len() || t >= sides.right.len())
    {
        return Err(BisimError::PairOutOfRange(s, t));
    }
    for (s, t) in z.iter() {
        if let Some(atom) = sides.atom_disagreement(s, t) {
            return Ok(Some(BisimViolation::Atoms {
                pair: (s, t),
                atom: atom.to_string(),
            }));
        }
    }
    let coherent = sides.coherent_for(z, budget)?;
    Ok(z.iter()
        .find_map(|(s, t)| sides.check_pair(z, &coherent, s, t)))
}

/// Greatest bisimulation of the given kind (possibly empty, meaning no
/// bisimilar pairs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxBisim {
    pub relation: PairRelation,
    /// Refinement rounds until the relation stopped shrinking.
    pub rounds: usize,
}

impl MaxBisim {
    pub fn no_bisimilar_pairs(&self) -> bool {
        self.relation.is_empty()
    }
}

/// Greatest fixpoint of the clause operator, starting from all atom-agreeing
/// pairs and removing failing pairs until none fail.
pub fn max_bisim<'a>(
    kind: BisimKind,
    left: impl Into<ModelRef<'a>>,
    right: impl Into<ModelRef<'a>>,
    budget: &Budget,
) -> Result<MaxBisim, BisimError> {
    let sides = Sides::new(kind, left.into(), right.into())?;
    let mut z = sides.atom_agreeing();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let coherent = sides.coherent_for(&z, budget)?;
        let failing: Vec<(usize, usize)> = z
            .iter()
            .filter(|&(s, t)| sides.check_pair(&z, &coherent, s, t).is_some())
            .collect();
        if failing.is_empty() {
            return Ok(MaxBisim {
                relation: z,
                rounds,
            });
        }
        for (s, t) in failing {
            z.remove(s, t);
        }
    }
}

/// A state of one model in a list of models.
pub type GlobalState = (usize, usize);

/// Logical-equivalence classes of the states of several models, refined
/// depth by depth until stable.
#[derive(Clone, Debug)]
pub struct Partition {
    kind: SemanticsKind,
    vocab: Vec<String>,
    models: Vec<AnyModel>,
    offsets: Vec<usize>,
    /// `history[d][g]` is the depth-`d` block of global state `g`.
    history: Vec<Vec<usize>>,
}

impl Partition {
    pub fn kind(&self) -> SemanticsKind {
        self.kind
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Depth at which refinement stabilized.
    pub fn depth(&self) -> usize {
        self.history.len() - 1
    }

    pub fn block_count(&self, depth: usize) -> usize {
        self.history[depth.min(self.depth())]
            .iter()
            .max()
            .map_or(0, |b| b + 1)
    }

    fn global(&self, (model, state): GlobalState) -> usize {
        self.offsets[model] + state
    }

    fn local(&self, g: usize) -> GlobalState {
        let model = self.offsets.partition_point(|&o| o <= g) - 1;
        (model, g - self.offsets[model])
    }

    pub fn total_states(&self) -> usize {
        self.history[0].len()
    }

    /// Block of a state at the stable depth.
    pub fn block_of(&self, state: GlobalState) -> usize {
        self.block_at(state, self.depth())
    }

    pub fn block_at(&self, state: GlobalState, depth: usize) -> usize {
        self.history[depth.min(self.depth())][self.global(state)]
    }

    pub fn equivalent(&self, a: GlobalState, b: GlobalState) -> bool {
        self.block_of(a) == self.block_of(b)
    }

    /// Blocks at `depth`, each listing its states.
    pub fn blocks(&self, depth: usize) -> Vec<Vec<GlobalState>> {
        let row = &self.history[depth.min(self.depth())];
        let mut blocks = vec![Vec::new(); self.block_count(depth)];
        for (g, &b) in row.iter().enumerate() {
            blocks[b].push(self.local(g));
        }
        blocks
    }

    /// Pairs `(s, t)` with `s` in model `left`, `t` in model `right`, in one block.
    pub fn cross_pairs(&self, left: usize, right: usize) -> PairRelation {
        let n = self.models[left].as_ref().len();
        let m = self.models[right].as_ref().len();
        (0..n)
            .flat_map(|s| (0..m).map(move |t| (s, t)))
            .filter(|&(s, t)| self.equivalent((left, s), (right, t)))
            .collect()
    }

    fn model(&self, index: usize) -> ModelRef<'_> {
        self.models[index].as_ref()
    }

    /// Δ clause at global state `g` for the union of the depth-`d` blocks in `union`.
    fn delta_for_union(&self, depth: usize, union: u64, g: usize) -> bool {
        let (mi, s) = self.local(g);
        let row = &self.history[depth];
        let offset = self.offsets[mi];
        let model = self.model(mi);
        let ext =
            StateSet::from_indices((0..model.len()).filter(|&t| union >> row[offset + t] & 1 == 1));
        delta_clause(model, self.kind, s, ext)
    }
}

/// Partitions the states of `models` by the formulas over `vocab`.
/// `vocab = None` takes every atom mentioned in some valuation.
pub fn logical_equiv_partition(
    models: &[ModelRef<'_>],
    vocab: Option<&[String]>,
    kind: SemanticsKind,
    budget: &Budget,
) -> Result<Partition, BisimError> {
    if models.iter().any(|m| !kind.accepts(*m)) {
        return Err(BisimError::SemanticsMismatch(kind));
    }
    let vocab: Vec<String> = match vocab {
        Some(v) => {
            let set: BTreeSet<String> = v.iter().cloned().collect();
            set.into_iter().collect()
        }
        None => {
            let set: BTreeSet<String> = models
                .iter()
                .flat_map(|m| m.valuation().keys().cloned())
                .collect();
            set.into_iter().collect()
        }
    };
    let mut offsets = Vec::with_capacity(models.len());
    let mut total = 0;
    for m in models {
        offsets.push(total);
        total += m.len();
    }
    let owned: Vec<AnyModel> = models
        .iter()
        .map(|m| match m {
            ModelRef::Neighborhood(n) => AnyModel::Neighborhood((*n).clone()),
            ModelRef::Kripke(k) => AnyModel::Kripke((*k).clone()),
        })
        .collect();
    let mut partition = Partition {
        kind,
        vocab,
        models: owned,
        offsets,
        history: Vec::new(),
    };

    let atoms_row: Vec<Vec<bool>> = (0..total)
        .map(|g| {
            let (mi, s) = partition.local(g);
            let model = partition.model(mi);
            partition
                .vocab
                .iter()
                .map(|p| model.atom(p).contains(s))
                .collect()
        })
        .collect();
    partition.history.push(number_by_key(&atoms_row));

    loop {
        let depth = partition.depth();
        let blocks = partition.block_count(depth);
        if blocks > budget.partition_blocks || blocks > 63 {
            return Err(BisimError::BudgetExceeded {
                needed: blocks,
                limit: budget.partition_blocks.min(63),
            });
        }
        let keys: Vec<(usize, Vec<bool>)> = (0..total)
            .map(|g| {
                let sig = (0..1u64 << blocks)
                    .map(|union| partition.delta_for_union(depth, union, g))
                    .collect();
                (partition.history[depth][g], sig)
            })
            .collect();
        let next = number_by_key(&keys);
        let next_count = next.iter().max().map_or(0, |b| b + 1);
        if next_count == blocks {
            return Ok(partition);
        }
        partition.history.push(next);
    }
}

/// Numbers distinct keys by first appearance.
fn number_by_key<K: std::hash::Hash + Eq + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k.clone()).or_insert(next)
        })
        .collect()
}

/// A formula over the partition's vocabulary true exactly on the states of
/// `block` at depth `depth`, in every model of the partition.
pub fn char_formula(
    partition: &Partition,
    block: usize,
    depth: usize,
) -> Result<Formula, BisimError> {
    if depth > partition.depth() {
        return Err(BisimError::DepthOutOfRange {
            requested: depth,
            available: partition.depth(),
        });
    }
    if block >= partition.block_count(depth) {
        return Err(BisimError::BlockOutOfRange { block, depth });
    }
    let mut memo = HashMap::new();
    Ok(char_rec(partition, block, depth, &mut memo))
}

fn char_rec(
    partition: &Partition,
    block: usize,
    depth: usize,
    memo: &mut HashMap<(usize, usize), Formula>,
) -> Formula {
    if let Some(f) = memo.get(&(block, depth)) {
        return f.clone();
    }
    let row = &partition.history[depth];
    let representative = row.iter().position(|&b| b == block).expect("block exists");
    let formula = if partition.block_count(depth) == 1 {
        Formula::Top
    } else if depth == 0 {
        let (mi, s) = partition.local(representative);
        let model = partition.model(mi);
        Formula::conj(partition.vocab.iter().map(|p| {
            if model.atom(p).contains(s) {
                Formula::atom(p.clone())
            } else {
                Formula::not(Formula::atom(p.clone()))
            }
        }))
    } else {
        let prev = depth - 1;
        let parent = partition.history[prev][representative];
        let base = char_rec(partition, parent, prev, memo);
        let prev_blocks = partition.block_count(prev);
        let siblings: BTreeSet<usize> = (0..row.len())
            .filter(|&g| partition.history[prev][g] == parent && row[g] != block)
            .map(|g| row[g])
            .collect();
        // Unions of previous blocks, fewest members first.
        let mut unions: Vec<u64> = (0..1u64 << prev_blocks).collect();
        unions.sort_by_key(|u| (u.count_ones(), *u));
        let mut conjuncts = vec![base];
        for sibling in siblings {
            let other = row
                .iter()
                .position(|&b| b == sibling)
                .expect("block exists");
            let union = *unions
                .iter()
                .find(|&&u| {
                    partition.delta_for_union(prev, u, representative)
                        != partition.delta_for_union(prev, u, other)
                })
                .expect("distinct blocks differ on some union");
            let members = (0..prev_blocks)
                .filter(|b| union >> b & 1 == 1)
                .collect::<Vec<_>>();
            let target = Formula::disj(
                members
                    .into_iter()
                    .map(|b| char_rec(partition, b, prev, memo)),
            );
            let delta = Formula::delta(target);
            conjuncts.push(if partition.delta_for_union(prev, union, representative) {
                delta
            } else {
                Formula::not(delta)
            });
        }
        Formula::conj(conjuncts)
    };
    memo.insert((block, depth), formula.clone());
    formula
}
