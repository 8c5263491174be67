//! Axiom systems E, M, R, K for contingency logic: schema matching,
//! tautology recognition, proof checking, bounded soundness audits and
//! countermodel search.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::Budget;
use crate::definability::sweep;
use crate::enumerate::{EnumError, FrameSpace};
use crate::formula::{parse, Formula};
use crate::model::{CompositeClass, FrameProperty, NeighborhoodModel, Valuation};
use crate::semantics::{frame_valid, SemanticsError, SemanticsKind, Validity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    DeltaEqu,
    DeltaM,
    DeltaC,
    DeltaTop,
    DeltaCon,
    DeltaDis,
}

impl Schema {
    pub const ALL: [Schema; 6] = [
        Schema::DeltaEqu,
        Schema::DeltaM,
        Schema::DeltaC,
        Schema::DeltaTop,
        Schema::DeltaCon,
        Schema::DeltaDis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::DeltaEqu => "ΔEqu",
            Schema::DeltaM => "ΔM",
            Schema::DeltaC => "ΔC",
            Schema::DeltaTop => "ΔTop",
            Schema::DeltaCon => "ΔCon",
            Schema::DeltaDis => "ΔDis",
        }
    }

    /// Accepts the unicode names and ASCII spellings with a leading `D`.
    pub fn from_name(name: &str) -> Option<Schema> {
        let rest = name.strip_prefix('Δ').or_else(|| name.strip_prefix('D'))?;
        Some(match rest {
            "Equ" => Schema::DeltaEqu,
            "M" => Schema::DeltaM,
            "C" => Schema::DeltaC,
            "Top" => Schema::DeltaTop,
            "Con" => Schema::DeltaCon,
            "Dis" => Schema::DeltaDis,
            _ => return None,
        })
    }

    /// The schema with metavariables written as atoms `phi`, `psi`, `chi`.
    fn text(self) -> &'static str {
        match self {
            Schema::DeltaEqu => "D phi <-> D ~phi",
            Schema::DeltaM => "D (phi & psi) -> D phi & D psi",
            Schema::DeltaC | Schema::DeltaCon => "D phi & D psi -> D (phi & psi)",
            Schema::DeltaTop => "D top",
            Schema::DeltaDis => "D phi -> D (phi -> psi) | D (~phi -> chi)",
        }
    }

    pub fn pattern(self) -> Pattern {
        Pattern::new(parse(self.text()).expect("schema text"), &METAVARIABLES)
    }

    /// The instance with metavariables replaced by `p`, `q`, `r`.
    pub fn fresh_instance(self) -> Formula {
        let subst: Substitution = METAVARIABLES
            .iter()
            .zip(["p", "q", "r"])
            .map(|(m, a)| (m.to_string(), Formula::atom(a)))
            .collect();
        self.pattern().instantiate(&subst)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const METAVARIABLES: [&str; 3] = ["phi", "psi", "chi"];

pub type Substitution = BTreeMap<String, Formula>;

/// A formula whose designated atoms match arbitrary subformulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    formula: Formula,
    metas: Vec<String>,
}

impl Pattern {
    pub fn new(formula: Formula, metas: &[&str]) -> Pattern {
        Pattern {
            formula,
            metas: metas.iter().map(|m| m.to_string()).collect(),
        }
    }

    /// Matches the surface syntax first, then the sugar-free forms of both.
    pub fn matches(&self, f: &Formula) -> Option<Substitution> {
        let mut subst = Substitution::new();
        if self.bind(&self.formula, f, &mut subst) {
            return Some(subst);
        }
        let mut subst = Substitution::new();
        self.bind(&self.formula.expand_sugar(), &f.expand_sugar(), &mut subst)
            .then_some(subst)
    }

    fn bind(&self, pattern: &Formula, f: &Formula, subst: &mut Substitution) -> bool {
        use Formula::*;
        match (pattern, f) {
            (Atom(m), _) if self.metas.contains(m) => match subst.get(m) {
                Some(bound) => bound == f,
                None => {
                    subst.insert(m.clone(), f.clone());
                    true
                }
            },
            (Atom(a), Atom(b)) => a == b,
            (Top, Top) | (Bot, Bot) => true,
            (Not(a), Not(b)) | (Delta(a), Delta(b)) | (Box(a), Box(b)) | (Nabla(a), Nabla(b)) => {
                self.bind(a, b, subst)
            }
            (And(a, b), And(c, d))
            | (Or(a, b), Or(c, d))
            | (Imp(a, b), Imp(c, d))
            | (Iff(a, b), Iff(c, d)) => self.bind(a, c, subst) && self.bind(b, d, subst),
            _ => false,
        }
    }

    pub fn instantiate(&self, subst: &Substitution) -> Formula {
        fn go(f: &Formula, subst: &Substitution) -> Formula {
            use Formula::*;
            match f {
                Atom(a) => subst.get(a).cloned().unwrap_or_else(|| f.clone()),
                Top | Bot => f.clone(),
                Not(a) => Formula::not(go(a, subst)),
                Delta(a) => Formula::delta(go(a, subst)),
                Nabla(a) => Formula::nabla(go(a, subst)),
                Box(a) => Formula::boxed(go(a, subst)),
                And(a, b) => Formula::and(go(a, subst), go(b, subst)),
                Or(a, b) => Formula::or(go(a, subst), go(b, subst)),
                Imp(a, b) => Formula::imp(go(a, subst), go(b, subst)),
                Iff(a, b) => Formula::iff(go(a, subst), go(b, subst)),
            }
        }
        go(&self.formula, subst)
    }
}

pub fn match_schema(schema: Schema, f: &Formula) -> Option<Substitution> {
    schema.pattern().matches(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("propositional abstraction has {found} atoms; the limit is {limit}")]
    TooManyAtoms { found: usize, limit: usize },
}

/// Whether `f` is a tautology once every maximal `Δ`/`B` subformula is
/// replaced by a fresh atom (equal subformulas share an atom).
pub fn is_taut_instance(f: &Formula, budget: &Budget) -> Result<bool, TautError> {
    let core = f.expand_sugar();
    let mut atoms: Vec<Formula> = Vec::new();
    collect_atoms(&core, &mut atoms);
    if atoms.len() > budget.taut_atoms {
        return Err(TautError::TooManyAtoms {
            found: atoms.len(),
            limit: budget.taut_atoms,
        });
    }
    // Rows of the truth table in 64-row words.
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let k = atoms.len();
    let rows = 1u64 << k;
    let mask = if rows >= 64 {
        u64::MAX
    } else {
        (1u64 << rows) - 1
    };
    let words = (rows / 64).max(1);
    for w in 0..words {
        let values: Vec<u64> = (0..k)
            .map(|i| {
                if i < 6 {
                    PATTERNS[i]
                } else if (w >> (i - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            })
            .collect();
        if truth_word(&core, &atoms, &values) & mask != mask {
            return Ok(false);
        }
    }
    Ok(true)
}

fn collect_atoms(f: &Formula, atoms: &mut Vec<Formula>) {
    match f {
        Formula::Top => {}
        Formula::Not(a) => collect_atoms(a, atoms),
        Formula::And(a, b) => {
            collect_atoms(a, atoms);
            collect_atoms(b, atoms);
        }
        _ => {
            if !atoms.contains(f) {
                atoms.push(f.clone());
            }
        }
    }
}

fn truth_word(f: &Formula, atoms: &[Formula], values: &[u64]) -> u64 {
    match f {
        Formula::Top => u64::MAX,
        Formula::Not(a) => !truth_word(a, atoms, values),
        Formula::And(a, b) => truth_word(a, atoms, values) & truth_word(b, atoms, values),
        _ => values[atoms.iter().position(|a| a == f).expect("collected")],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomSystem {
    E,
    M,
    R,
    K,
}

impl AxiomSystem {
    pub const ALL: [AxiomSystem; 4] = [
        AxiomSystem::E,
        AxiomSystem::M,
        AxiomSystem::R,
        AxiomSystem::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomSystem::E => "E",
            AxiomSystem::M => "M",
            AxiomSystem::R => "R",
            AxiomSystem::K => "K",
        }
    }

    pub fn from_name(name: &str) -> Option<AxiomSystem> {
        let name = name.trim_end_matches('Δ').trim_end_matches("^D");
        AxiomSystem::ALL
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
    }

    pub fn schemas(self) -> &'static [Schema] {
        match self {
            AxiomSystem::E => &[Schema::DeltaEqu],
            AxiomSystem::M => &[Schema::DeltaEqu, Schema::DeltaM],
            AxiomSystem::R => &[Schema::DeltaEqu, Schema::DeltaM, Schema::DeltaC],
            AxiomSystem::K => &[
                Schema::DeltaEqu,
                Schema::DeltaTop,
                Schema::DeltaCon,
                Schema::DeltaDis,
            ],
        }
    }

    /// Frame class the system is sound for.
    pub fn class(self) -> CompositeClass {
        match self {
            AxiomSystem::E => CompositeClass::CModel,
            AxiomSystem::M => CompositeClass::MonotonicC,
            AxiomSystem::R => CompositeClass::Csi,
            AxiomSystem::K => CompositeClass::QuasiFilter,
        }
    }
}

impl fmt::Display for AxiomSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One line of a proof file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofLine {
    pub formula: String,
    pub by: String,
}

pub type ProofScript = Vec<ProofLine>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Taut,
    Axiom(Schema),
    /// `MP i j`: line `j` is line `i` → this line.
    Mp(usize, usize),
    /// `REΔ i`: line `i` is `φ↔ψ` and this line is `Δφ↔Δψ`.
    Re(usize),
}

impl Justification {
    pub fn parse(text: &str) -> Option<Justification> {
        let words: Vec<&str> = text.split_whitespace().collect();
        let number = |w: &str| w.parse::<usize>().ok();
        match words.as_slice() {
            ["TAUT"] => Some(Justification::Taut),
            ["MP", i, j] => Some(Justification::Mp(number(i)?, number(j)?)),
            [re, i] if matches!(*re, "REΔ" | "RED" | "RE") => Some(Justification::Re(number(i)?)),
            [name] => Schema::from_name(name).map(Justification::Axiom),
            _ => None,
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => f.write_str("TAUT"),
            Justification::Axiom(s) => write!(f, "{s}"),
            Justification::Mp(i, j) => write!(f, "MP {i} {j}"),
            Justification::Re(i) => write!(f, "REΔ {i}"),
        }
    }
}

/// First rejected line (1-based; 0 for an empty script) and why.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct InvalidLine {
    pub line: usize,
    pub reason: String,
}

pub fn check_proof(
    sys: AxiomSystem,
    script: &[ProofLine],
    budget: &Budget,
) -> Result<(), InvalidLine> {
    if script.is_empty() {
        return Err(InvalidLine {
            line: 0,
            reason: "empty proof".into(),
        });
    }
    let mut proved: Vec<Formula> = Vec::new();
    for (k, line) in script.iter().enumerate() {
        let here = k + 1;
        let fail = |reason: String| InvalidLine { line: here, reason };
        let f = parse(&line.formula).map_err(|e| fail(format!("formula does not parse: {e}")))?;
        let by = Justification::parse(&line.by)
            .ok_or_else(|| fail(format!("unknown justification {:?}", line.by)))?;
        let cited = |i: usize| {
            if i >= 1 && i < here {
                Ok(&proved[i - 1])
            } else {
                Err(fail(format!("line {i} is not an earlier line")))
            }
        };
        match by {
            Justification::Taut => match is_taut_instance(&f, budget) {
                Ok(true) => {}
                Ok(false) => return Err(fail("not a tautology instance".into())),
                Err(e) => return Err(fail(e.to_string())),
            },
            Justification::Axiom(schema) => {
                if !sys.schemas().contains(&schema) {
                    return Err(fail(format!("{schema} is not an axiom of {sys}")));
                }
                if match_schema(schema, &f).is_none() {
                    return Err(fail(format!("not an instance of {schema}")));
                }
            }
            Justification::Mp(i, j) => {
                let (a, b) = (cited(i)?, cited(j)?);
                if b.expand_sugar() != Formula::imp(a.clone(), f.clone()).expand_sugar() {
                    return Err(fail(format!("line {j} is not line {i} -> this line")));
                }
            }
            Justification::Re(i) => {
                let premise = cited(i)?;
                let shape =
                    Pattern::new(parse("D phi <-> D psi").expect("pattern"), &["phi", "psi"]);
                let ok = shape.matches(&f).is_some_and(|s| {
                    premise.expand_sugar()
                        == Formula::iff(s["phi"].clone(), s["psi"].clone()).expand_sugar()
                });
                if !ok {
                    return Err(fail(format!("not REΔ applied to line {i}")));
                }
            }
        }
        proved.push(f);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A frame, a valuation of the formula's atoms and a state where it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub frame: NeighborhoodModel,
    pub valuation: Valuation,
    pub state: usize,
}

impl Refutation {
    /// The frame with the refuting valuation attached.
    pub fn model(&self) -> NeighborhoodModel {
        self.frame
            .with_valuation(self.valuation.clone())
            .expect("valuation within states")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub schema: Schema,
    pub instance: Formula,
    pub frames: u64,
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub system: AxiomSystem,
    pub class: CompositeClass,
    pub max_states: usize,
    pub axioms: Vec<AxiomVerdict>,
}

impl AuditReport {
    pub fn all_valid(&self) -> bool {
        self.axioms.iter().all(|a| a.refutation.is_none())
    }
}

/// First frame (smallest first, canonical order) with all `required`
/// properties and none of `excluded` that refutes `f` under the new semantics.
pub fn find_refutation(
    f: &Formula,
    required: &[FrameProperty],
    excluded: &[FrameProperty],
    max_states: usize,
    budget: &Budget,
    jobs: usize,
) -> Result<(u64, Option<Refutation>), AuditError> {
    let vars = f.vars().len();
    let mut total = 0;
    for n in 1..=max_states {
        if n * vars > budget.valuation_bits {
            return Err(SemanticsError::BudgetExceeded {
                needed: n * vars,
                limit: budget.valuation_bits,
            }
            .into());
        }
        let space = FrameSpace::new(n, required, budget)?;
        let (count, hit) = sweep(&space, jobs, |frame| {
            if excluded.iter().any(|p| frame.has_property(*p)) {
                return None;
            }
            match frame_valid(frame, f, SemanticsKind::New, budget).expect("budget checked") {
                Validity::Valid => None,
                Validity::Refuted { valuation, state } => Some(Refutation {
                    frame: frame.clone(),
                    valuation,
                    state,
                }),
            }
        });
        total += count;
        if hit.is_some() {
            return Ok((total, hit));
        }
    }
    Ok((total, None))
}

/// Validity of each axiom of `sys` (instantiated with fresh atoms) on every
/// frame of the system's class with at most `max_states` states.
pub fn audit_soundness(
    sys: AxiomSystem,
    max_states: usize,
    budget: &Budget,
    jobs: usize,
) -> Result<AuditReport, AuditError> {
    let class = sys.class();
    let axioms = sys
        .schemas()
        .iter()
        .map(|&schema| {
            let instance = schema.fresh_instance();
            let (frames, refutation) =
                find_refutation(&instance, class.properties(), &[], max_states, budget, jobs)?;
            Ok(AxiomVerdict {
                schema,
                instance,
                frames,
                refutation,
            })
        })
        .collect::<Result<_, AuditError>>()?;
    Ok(AuditReport {
        system: sys,
        class,
        max_states,
        axioms,
    })
}

/// A filter frame ((s), (i), (n) but not (c)) refuting `Δp↔Δ¬p`.
pub fn filter_delta_equ_witness(
    max_states: usize,
    budget: &Budget,
    jobs: usize,
) -> Result<Option<Refutation>, AuditError> {
    let (_, hit) = find_refutation(
        &Schema::DeltaEqu.fresh_instance(),
        CompositeClass::Filter.properties(),
        &[FrameProperty::C],
        max_states,
        budget,
        jobs,
    )?;
    Ok(hit)
}

/// A model of the class with at most `max_states` states and a state
/// falsifying `f` (new semantics), if one exists within the bound.
pub fn countermodel_search(
    f: &Formula,
    class: CompositeClass,
    max_states: usize,
    budget: &Budget,
    jobs: usize,
) -> Result<Option<(NeighborhoodModel, usize)>, AuditError> {
    let (_, hit) = find_refutation(f, class.properties(), &[], max_states, budget, jobs)?;
    Ok(hit.map(|r| (r.model(), r.state)))
}

/// Sample derivations in K, as (name, script).
pub fn shipped_proofs() -> Vec<(&'static str, ProofScript)> {
    [
        (
            "delta-top-negated",
            include_str!("../proofs/delta-top-negated.json"),
        ),
        ("re-commute", include_str!("../proofs/re-commute.json")),
        ("con-negated", include_str!("../proofs/con-negated.json")),
        ("dis-top", include_str!("../proofs/dis-top.json")),
        ("equ-converse", include_str!("../proofs/equ-converse.json")),
    ]
    .into_iter()
    .map(|(name, text)| (name, serde_json::from_str(text).expect("shipped proof")))
    .collect()
}

/// Single-line mutations of a script: each line negated, replaced by the
/// fresh atom `zz`, or wrapped in `Δ`.
pub fn mutations(script: &[ProofLine]) -> Vec<ProofScript> {
    let mut out = Vec::new();
    for (k, line) in script.iter().enumerate() {
        for mutate in [
            |f: &str| format!("~({f})"),
            |_: &str| "zz".to_string(),
            |f: &str| format!("D ({f})"),
        ] {
            let mut mutated = script.to_vec();
            mutated[k].formula = mutate(&line.formula);
            out.push(mutated);
        }
    }
    out
}
