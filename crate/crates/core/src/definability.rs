//! Bounded verification of frame-definability claims: a frame has the
//! property iff it validates the formula (new semantics), checked frame by
//! frame over a background class.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Budget;
use crate::enumerate::{self, EnumError, FrameSpace};
use crate::formula::{parse, Formula};
use crate::model::{FrameProperty, NeighborhoodModel, Valuation};
use crate::semantics::{frame_valid, SemanticsError, SemanticsKind, Validity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Background {
    AllFrames,
    CFrames,
}

impl Background {
    pub fn name(self) -> &'static str {
        match self {
            Background::AllFrames => "all-frames",
            Background::CFrames => "c-frames",
        }
    }

    pub fn from_name(name: &str) -> Option<Background> {
        match name {
            "all-frames" | "all" => Some(Background::AllFrames),
            "c-frames" | "c" => Some(Background::CFrames),
            _ => None,
        }
    }

    pub fn properties(self) -> &'static [FrameProperty] {
        match self {
            Background::AllFrames => &[],
            Background::CFrames => &[FrameProperty::C],
        }
    }
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinabilityClaim {
    pub property: FrameProperty,
    pub formula: Formula,
    pub background: Background,
    pub semantics: SemanticsKind,
}

impl DefinabilityClaim {
    pub fn new(property: FrameProperty, formula: Formula, background: Background) -> Self {
        DefinabilityClaim {
            property,
            formula,
            background,
            semantics: SemanticsKind::New,
        }
    }
}

/// The ten shipped claims. No claim is shipped for (r).
pub fn builtin_table() -> Vec<DefinabilityClaim> {
    use Background::*;
    use FrameProperty as P;
    [
        (P::N, "D top", CFrames),
        (P::I, "D p & D q -> D (p & q)", CFrames),
        (P::S, "D (p & q) -> D p & D q", CFrames),
        (P::C, "D p <-> D ~p", AllFrames),
        (P::D, "N p", CFrames),
        (P::T, "D p -> p", CFrames),
        (P::B, "p -> D N p", CFrames),
        (P::Four, "D p -> D D p", CFrames),
        (P::Five, "N p -> D N p", CFrames),
        (P::Ws, "D p -> D (p -> q) | D (~p -> r)", AllFrames),
    ]
    .into_iter()
    .map(|(p, f, bg)| DefinabilityClaim::new(p, parse(f).expect("builtin formula"), bg))
    .collect()
}

pub fn builtin(property: FrameProperty) -> Option<DefinabilityClaim> {
    builtin_table().into_iter().find(|c| c.property == property)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    PropertyHoldsFormulaInvalid,
    FormulaValidPropertyFails,
}

impl Direction {
    pub fn describe(self) -> &'static str {
        match self {
            Direction::PropertyHoldsFormulaInvalid => "property holds, formula invalid",
            Direction::FormulaValidPropertyFails => "formula valid, property fails",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub frame: NeighborhoodModel,
    pub direction: Direction,
    /// Refuting valuation and state, when the formula is invalid.
    pub witness: Option<(Valuation, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every background frame checked agrees; `frames[k]` counts those with `k + 1` states.
    Confirmed {
        frames: Vec<u64>,
    },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, Verdict::Confirmed { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DefinabilityError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Compares the property with validity on one frame; `None` when they agree.
/// Frames outside the background class are not the claim's concern and pass.
pub fn check_frame(
    claim: &DefinabilityClaim,
    frame: &NeighborhoodModel,
    budget: &Budget,
) -> Result<Option<Counterexample>, SemanticsError> {
    if !claim
        .background
        .properties()
        .iter()
        .all(|p| frame.has_property(*p))
    {
        return Ok(None);
    }
    let holds = frame.has_property(claim.property);
    let validity = frame_valid(frame, &claim.formula, claim.semantics, budget)?;
    let direction = match (holds, &validity) {
        (true, Validity::Refuted { .. }) => Direction::PropertyHoldsFormulaInvalid,
        (false, Validity::Valid) => Direction::FormulaValidPropertyFails,
        _ => return Ok(None),
    };
    let witness = match validity {
        Validity::Refuted { valuation, state } => Some((valuation, state)),
        Validity::Valid => None,
    };
    Ok(Some(Counterexample {
        frame: frame.clone(),
        direction,
        witness,
    }))
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

/// First frame in `space` (canonical order) where `check` reports something.
pub(crate) fn sweep<T: Send>(
    space: &FrameSpace,
    jobs: usize,
    check: impl Fn(&NeighborhoodModel) -> Option<T> + Sync,
) -> (u64, Option<T>) {
    let candidates = space.candidates();
    if jobs <= 1 {
        let mut count = 0;
        for i in 0..candidates {
            if let Some(frame) = space.frame(i) {
                count += 1;
                if let Some(hit) = check(&frame) {
                    return (count, Some(hit));
                }
            }
        }
        return (count, None);
    }
    pool(jobs).install(|| {
        let hit = (0..candidates)
            .into_par_iter()
            .find_map_first(|i| space.frame(i).and_then(|f| check(&f).map(|hit| (i, hit))));
        match hit {
            Some((i, hit)) => (
                (0..=i).filter(|&k| space.frame(k).is_some()).count() as u64,
                Some(hit),
            ),
            None => (
                (0..candidates)
                    .into_par_iter()
                    .filter(|&k| space.frame(k).is_some())
                    .count() as u64,
                None,
            ),
        }
    })
}

/// Checks the claim on every background frame with at most `max_states`
/// states, smallest frames first; reports the first disagreement.
pub fn defines(
    claim: &DefinabilityClaim,
    max_states: usize,
    budget: &Budget,
    jobs: usize,
) -> Result<Verdict, DefinabilityError> {
    let vars = claim.formula.vars().len();
    let mut frames = Vec::new();
    for n in 1..=max_states {
        if n * vars > budget.valuation_bits {
            return Err(SemanticsError::BudgetExceeded {
                needed: n * vars,
                limit: budget.valuation_bits,
            }
            .into());
        }
        let space = FrameSpace::new(n, claim.background.properties(), budget)?;
        let (count, hit) = sweep(&space, jobs, |frame| {
            check_frame(claim, frame, budget).expect("budget checked")
        });
        frames.push(count);
        if let Some(cx) = hit {
            return Ok(Verdict::Counterexample(cx));
        }
    }
    Ok(Verdict::Confirmed { frames })
}

/// Checks the claim on `count` seeded random background frames with
/// `states` states.
pub fn defines_sampled(
    claim: &DefinabilityClaim,
    states: usize,
    count: usize,
    seed: u64,
    budget: &Budget,
    jobs: usize,
) -> Result<Verdict, DefinabilityError> {
    let mut rng = enumerate::rng(seed);
    let frames = (0..count)
        .map(|_| enumerate::random_frame_with(&mut rng, states, claim.background.properties()))
        .collect::<Result<Vec<_>, _>>()?;
    let check = |frame: &NeighborhoodModel| check_frame(claim, frame, budget);
    let hit = pool(jobs).install(|| {
        frames
            .par_iter()
            .map(check)
            .find_map_first(|r| r.transpose())
            .transpose()
    })?;
    Ok(match hit {
        Some(cx) => Verdict::Counterexample(cx),
        None => {
            let mut by_size = vec![0; states];
            if states > 0 {
                by_size[states - 1] = count as u64;
            }
            Verdict::Confirmed { frames: by_size }
        }
    })
}
