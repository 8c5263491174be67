//! Exhaustive and seeded-random generation of frames, models and formulas.
//!
//! Exhaustive neighborhood frames on `n` states are indexed by
//! `k = Σ code(N(i)) · (2^(2^n))^i`, where `code(N(i))` has bit `m` set iff the
//! subset with mask `m` is a neighborhood of state `i`. Streams visit frames
//! in ascending `k`, so frame `k` is reproducible from `(n, k)` alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::budget::Budget;
use crate::formula::Formula;
use crate::model::{
    all_subsets, supersets, CompositeClass, Family, FrameProperty, KripkeModel, NeighborhoodModel,
    StateSet, Valuation,
};

/// Seeded RNG used by every random generator in the crate.
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random,
}

/// What to generate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub states: usize,
    pub required: Vec<FrameProperty>,
    pub seed: u64,
    pub mode: Mode,
    /// Maximum number of items to produce; `None` means all (exhaustive mode only).
    pub limit: Option<usize>,
}

impl GenSpec {
    pub fn exhaustive(states: usize) -> Self {
        GenSpec {
            states,
            required: Vec::new(),
            seed: 0,
            mode: Mode::Exhaustive,
            limit: None,
        }
    }

    pub fn random(states: usize, seed: u64, count: usize) -> Self {
        GenSpec {
            states,
            required: Vec::new(),
            seed,
            mode: Mode::Random,
            limit: Some(count),
        }
    }

    pub fn with_properties(mut self, properties: &[FrameProperty]) -> Self {
        for p in properties {
            if !self.required.contains(p) {
                self.required.push(*p);
            }
        }
        self
    }

    pub fn with_class(self, class: CompositeClass) -> Self {
        self.with_properties(class.properties())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error(
        "exhaustive enumeration of {kind} frames is limited to {limit} states (asked for {states})"
    )]
    BudgetExceeded {
        kind: &'static str,
        states: usize,
        limit: usize,
    },
    #[error("frames need at least one state")]
    NoStates,
    #[error(
        "random generation gave up after {0} rejected samples; the filter may be unsatisfiable"
    )]
    RetryLimit(usize),
    #[error("random mode needs a count limit")]
    MissingLimit,
}

/// Exhaustive frame enumeration as a mixed-radix index space over the
/// per-state families allowed by the local properties; non-local properties
/// ((b), (4), (5)) are checked per frame.
#[derive(Clone, Debug)]
pub struct FrameSpace {
    states: usize,
    allowed: Vec<Vec<u64>>,
    nonlocal: Vec<FrameProperty>,
}

impl FrameSpace {
    pub fn new(
        states: usize,
        required: &[FrameProperty],
        budget: &Budget,
    ) -> Result<Self, EnumError> {
        if states == 0 {
            return Err(EnumError::NoStates);
        }
        if states > budget.max_frame_states || states > 6 {
            return Err(EnumError::BudgetExceeded {
                kind: "neighborhood",
                states,
                limit: budget.max_frame_states.min(6),
            });
        }
        let codes = 1u64 << (1u64 << states);
        let local: Vec<FrameProperty> = required.iter().copied().filter(|p| p.is_local()).collect();
        let allowed = (0..states)
            .map(|s| {
                (0..codes)
                    .filter(|&code| {
                        local.is_empty() || {
                            // Build a frame where only state `s` matters for local checks.
                            let mut families = vec![Family::empty(states); states];
                            families[s] = Family::from_code(states, code);
                            let frame = NeighborhoodModel::frame(families).expect("valid shape");
                            local.iter().all(|p| frame.state_has_property(s, *p))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(FrameSpace {
            states,
            allowed,
            nonlocal: required.iter().copied().filter(|p| !p.is_local()).collect(),
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Number of candidate frames (before the non-local filter).
    pub fn candidates(&self) -> u64 {
        self.allowed.iter().map(|a| a.len() as u64).product()
    }

    /// Family codes of candidate `i`, state 0 varying fastest.
    pub fn codes(&self, mut i: u64) -> Vec<u64> {
        self.allowed
            .iter()
            .map(|a| {
                let len = a.len() as u64;
                let code = a[(i % len) as usize];
                i /= len;
                code
            })
            .collect()
    }

    /// Candidate `i` if it passes every required property.
    pub fn frame(&self, i: u64) -> Option<NeighborhoodModel> {
        let frame = NeighborhoodModel::frame_from_codes(&self.codes(i)).expect("valid shape");
        self.nonlocal
            .iter()
            .all(|p| frame.has_property(*p))
            .then_some(frame)
    }

    pub fn iter(&self) -> impl Iterator<Item = NeighborhoodModel> + '_ {
        (0..self.candidates()).filter_map(move |i| self.frame(i))
    }
}

/// Index of a frame in the unfiltered canonical order on its state count.
pub fn frame_index(frame: &NeighborhoodModel) -> u128 {
    let radix = 1u128 << (1u32 << frame.len());
    frame
        .families()
        .iter()
        .rev()
        .fold(0u128, |acc, f| acc * radix + f.code() as u128)
}

/// Unfiltered frame number `k` on `n` states.
pub fn frame_at(n: usize, mut k: u128) -> NeighborhoodModel {
    let radix = 1u128 << (1u32 << n);
    let codes: Vec<u64> = (0..n)
        .map(|_| {
            let code = (k % radix) as u64;
            k /= radix;
            code
        })
        .collect();
    NeighborhoodModel::frame_from_codes(&codes).expect("valid shape")
}

/// Frames matching `spec`: every one in canonical order (exhaustive), or
/// `limit` seeded samples (random).
pub fn enum_frames(
    spec: &GenSpec,
    budget: &Budget,
) -> Result<Box<dyn Iterator<Item = NeighborhoodModel>>, EnumError> {
    match spec.mode {
        Mode::Exhaustive => {
            let space = FrameSpace::new(spec.states, &spec.required, budget)?;
            let limit = spec.limit.unwrap_or(usize::MAX);
            let candidates = space.candidates();
            Ok(Box::new(
                (0..candidates)
                    .filter_map(move |i| space.frame(i))
                    .take(limit),
            ))
        }
        Mode::Random => {
            let count = spec.limit.ok_or(EnumError::MissingLimit)?;
            let mut rng = rng(spec.seed);
            let frames = (0..count)
                .map(|_| random_frame_with(&mut rng, spec.states, &spec.required))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Box::new(frames.into_iter()))
        }
    }
}

/// Every Kripke frame on `n` states, successor sets as codes with state 0
/// varying fastest.
pub fn enum_kripke_frames(
    n: usize,
    budget: &Budget,
) -> Result<impl Iterator<Item = KripkeModel>, EnumError> {
    if n == 0 {
        return Err(EnumError::NoStates);
    }
    if n > budget.max_kripke_states || n > 5 {
        return Err(EnumError::BudgetExceeded {
            kind: "Kripke",
            states: n,
            limit: budget.max_kripke_states.min(5),
        });
    }
    let radix = 1u64 << n;
    let total = radix.pow(n as u32);
    Ok((0..total).map(move |mut k| {
        let succ = (0..n)
            .map(|_| {
                let r = StateSet((k % radix) as u32);
                k /= radix;
                r
            })
            .collect();
        KripkeModel::frame(succ).expect("valid shape")
    }))
}

/// Every valuation of `atoms` over `n` states, ascending.
pub fn all_valuations(n: usize, atoms: &[String]) -> impl Iterator<Item = Valuation> + '_ {
    let per = 1u64 << n;
    let total = per.pow(atoms.len() as u32);
    (0..total).map(move |mut k| {
        atoms
            .iter()
            .map(|p| {
                let ext = StateSet((k % per) as u32);
                k /= per;
                (p.clone(), ext)
            })
            .collect()
    })
}

const RETRY_LIMIT: usize = 10_000;

/// Applies the closure rules for (c), (s), (n), (i) that appear in
/// `required` until nothing changes.
pub fn close_family(family: &mut Family, n: usize, required: &[FrameProperty]) {
    let full = StateSet::full(n);
    loop {
        let before = family.len();
        if required.contains(&FrameProperty::N) {
            family.insert(full);
        }
        if required.contains(&FrameProperty::C) {
            for x in family.clone().iter() {
                family.insert(x.complement(n));
            }
        }
        if required.contains(&FrameProperty::S) {
            for x in family.clone().iter() {
                for y in supersets(x, n) {
                    family.insert(y);
                }
            }
        }
        if required.contains(&FrameProperty::I) {
            let members: Vec<StateSet> = family.iter().collect();
            for x in &members {
                for y in &members {
                    family.insert(x.intersection(*y));
                }
            }
        }
        if family.len() == before {
            return;
        }
    }
}

fn random_family(rng: &mut Rng64, n: usize) -> Family {
    let subsets: Vec<StateSet> = all_subsets(n).collect();
    if rng.gen_bool(0.5) {
        let density: f64 = rng.gen_range(0.0..=1.0);
        Family::from_sets(n, subsets.iter().copied().filter(|_| rng.gen_bool(density)))
    } else {
        let seeds = rng.gen_range(0..=3usize);
        Family::from_sets(
            n,
            (0..seeds).map(|_| *subsets.choose(rng).expect("nonempty")),
        )
    }
}

/// A random frame satisfying `required`: random families are closed under
/// the closure-style properties, then the remaining ones are checked.
pub fn random_frame_with(
    rng: &mut Rng64,
    n: usize,
    required: &[FrameProperty],
) -> Result<NeighborhoodModel, EnumError> {
    if n == 0 {
        return Err(EnumError::NoStates);
    }
    for _ in 0..RETRY_LIMIT {
        let families = (0..n)
            .map(|_| {
                let mut family = random_family(rng, n);
                close_family(&mut family, n, required);
                family
            })
            .collect();
        let frame = NeighborhoodModel::frame(families).expect("valid shape");
        if required.iter().all(|p| frame.has_property(*p)) {
            return Ok(frame);
        }
    }
    Err(EnumError::RetryLimit(RETRY_LIMIT))
}

pub fn random_valuation(rng: &mut Rng64, n: usize, atoms: &[String]) -> Valuation {
    let full = StateSet::full(n).0;
    atoms
        .iter()
        .map(|p| (p.clone(), StateSet(rng.gen::<u32>() & full)))
        .collect()
}

/// A seeded random neighborhood model satisfying the spec's properties,
/// with a random valuation of `atoms`.
pub fn random_model(spec: &GenSpec, atoms: &[String]) -> Result<NeighborhoodModel, EnumError> {
    let mut rng = rng(spec.seed);
    random_model_with(&mut rng, spec.states, &spec.required, atoms)
}

pub fn random_model_with(
    rng: &mut Rng64,
    n: usize,
    required: &[FrameProperty],
    atoms: &[String],
) -> Result<NeighborhoodModel, EnumError> {
    let frame = random_frame_with(rng, n, required)?;
    let valuation = random_valuation(rng, n, atoms);
    Ok(frame
        .with_valuation(valuation)
        .expect("valuation within states"))
}

pub fn random_kripke_with(rng: &mut Rng64, n: usize, atoms: &[String]) -> KripkeModel {
    let density: f64 = rng.gen_range(0.0..=1.0);
    let succ = (0..n)
        .map(|_| StateSet::from_indices((0..n).filter(|_| rng.gen_bool(density))))
        .collect();
    let frame = KripkeModel::frame(succ).expect("valid shape");
    frame
        .with_valuation(random_valuation(rng, n, atoms))
        .expect("valuation within states")
}

/// A seeded random formula over `atoms` with modal depth at most `depth`.
/// Uses the full surface syntax (sugar included) but never `B`.
pub fn random_formula(depth: usize, atoms: &[String], seed: u64) -> Formula {
    let mut rng = rng(seed);
    random_formula_with(&mut rng, depth, atoms)
}

pub fn random_formula_with(rng: &mut Rng64, depth: usize, atoms: &[String]) -> Formula {
    gen_formula(rng, depth, atoms, 12)
}

fn gen_formula(rng: &mut Rng64, depth: usize, atoms: &[String], size: usize) -> Formula {
    if size <= 1 || rng.gen_bool(0.2) {
        return leaf(rng, atoms);
    }
    let modal = if depth > 0 { 4 } else { 0 };
    // not, and, or, imp, iff, delta, nabla
    let weights = [2, 2, 1, 1, 1, modal, modal / 2];
    let total: u32 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut choice = 0;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            choice = i;
            break;
        }
        pick -= w;
    }
    let sub = size - 1;
    let split = |rng: &mut Rng64| {
        let left = rng.gen_range(1..=sub.max(2) - 1).max(1);
        (left, sub.saturating_sub(left).max(1))
    };
    match choice {
        0 => Formula::not(gen_formula(rng, depth, atoms, sub)),
        5 => Formula::delta(gen_formula(rng, depth - 1, atoms, sub)),
        6 => Formula::nabla(gen_formula(rng, depth - 1, atoms, sub)),
        binary => {
            let (ls, rs) = split(rng);
            let l = gen_formula(rng, depth, atoms, ls);
            let r = gen_formula(rng, depth, atoms, rs);
            match binary {
                1 => Formula::and(l, r),
                2 => Formula::or(l, r),
                3 => Formula::imp(l, r),
                _ => Formula::iff(l, r),
            }
        }
    }
}

fn leaf(rng: &mut Rng64, atoms: &[String]) -> Formula {
    if atoms.is_empty() || rng.gen_bool(0.1) {
        if rng.gen_bool(0.5) {
            Formula::Top
        } else {
            Formula::Bot
        }
    } else {
        Formula::atom(atoms.choose(rng).expect("nonempty").clone())
    }
}
