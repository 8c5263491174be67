//! `delta-lab`: command-line front end.
//!
//! Exit codes: 0 ok / claim holds, 1 counterexample or violation (witness on
//! stdout), 2 usage or validation error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use delta_lab::bisim::{
    char_formula, check_bisim, logical_equiv_partition, max_bisim, BisimKind, BisimViolation,
};
use delta_lab::definability::{
    builtin, builtin_table, defines, defines_sampled, Background, DefinabilityClaim, Verdict,
};
use delta_lab::enumerate::{self, enum_frames, enum_kripke_frames, GenSpec, Mode};
use delta_lab::io::{self, model_to_json, model_to_value, relation_to_value};
use delta_lab::model::set_names;
use delta_lab::proofsys::{
    audit_soundness, check_proof, countermodel_search, filter_delta_equ_witness, AxiomSystem,
    Refutation,
};
use delta_lab::semantics::extension;
use delta_lab::transform::{c_variation, qf_to_kripke, qf_variation};
use delta_lab::{
    parse, AnyModel, Budget, CompositeClass, Formula, FrameProperty, ModelRef, NeighborhoodModel,
    SemanticsKind, StateSet, Valuation,
};

#[derive(Parser)]
#[command(
    name = "delta-lab",
    version,
    about = "Contingency logic workbench on finite models"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "human")]
    format: Format,
    /// Worker threads for frame sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a state, or print its extension.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
        /// old | new | kripke (default: new for neighborhood models, kripke for Kripke models).
        #[arg(long)]
        semantics: Option<String>,
    },
    /// Convert between model presentations; prints the resulting model.
    Transform {
        #[arg(value_enum)]
        op: TransformOp,
        #[arg(long)]
        model: PathBuf,
    },
    /// Check a relation, or compute the largest bisimulation.
    Bisim {
        #[command(subcommand)]
        op: BisimOp,
    },
    /// Group the states of the given models by logical equivalence.
    EquivPartition {
        #[arg(long = "model", required = true)]
        models: Vec<PathBuf>,
        #[arg(long)]
        semantics: Option<String>,
        /// Comma-separated atoms (default: every atom in some valuation).
        #[arg(long, value_delimiter = ',')]
        vocab: Option<Vec<String>>,
        /// Also print a characteristic formula for every block.
        #[arg(long)]
        characterize: bool,
    },
    /// Check a frame-definability claim on bounded frames.
    Definability(DefinabilityArgs),
    /// Check axiom validity over a system's frame class.
    Audit {
        /// E | M | R | K
        #[arg(long, required_unless_present = "negative")]
        system: Option<String>,
        /// Search for the filter frame refuting ΔEqu.
        #[arg(long, value_enum)]
        negative: Option<Negative>,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
    },
    /// Check a proof file against an axiom system.
    ProofCheck {
        #[arg(long)]
        system: String,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Search a frame class for a model falsifying a formula.
    Countermodel {
        #[arg(long)]
        formula: String,
        /// c-model | monotonic-c | csi | filter | quasi-filter
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
    },
    /// List frames or random models, one model per line.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    CVariation,
    QfVariation,
    QfToKripke,
}

#[derive(Clone, Copy, ValueEnum)]
enum Negative {
    FilterDeltaequ,
}

#[derive(Subcommand)]
enum BisimOp {
    Check {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        relation: PathBuf,
    },
    Max {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
}

#[derive(Args)]
struct DefinabilityArgs {
    /// A builtin claim by property name, or `all`.
    #[arg(long, conflicts_with_all = ["property", "formula"])]
    builtin: Option<String>,
    /// Property of a custom claim.
    #[arg(long, requires = "formula")]
    property: Option<String>,
    /// Formula of a custom claim.
    #[arg(long, requires = "property")]
    formula: Option<String>,
    /// all-frames | c-frames (overrides the builtin background).
    #[arg(long)]
    background: Option<String>,
    #[arg(long, default_value_t = 2)]
    max_states: usize,
    /// Check this many random frames with `--max-states` states instead.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    states: usize,
    /// Comma-separated frame properties to require.
    #[arg(long, value_delimiter = ',')]
    property: Vec<String>,
    /// Composite class to require.
    #[arg(long)]
    class: Option<String>,
    /// Kripke frames instead of neighborhood frames.
    #[arg(long, conflicts_with_all = ["property", "class", "random"])]
    kripke: bool,
    /// Seeded random models instead of exhaustive frames.
    #[arg(long, requires = "count")]
    random: bool,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated atoms for random valuations.
    #[arg(long, value_delimiter = ',')]
    atoms: Vec<String>,
    /// Print only the number of items.
    #[arg(long)]
    count_only: bool,
}

struct Ctx {
    format: Format,
    jobs: usize,
    budget: Budget,
}

impl Ctx {
    fn json(&self) -> bool {
        self.format == Format::Json
    }

    /// Prints the JSON value or the human text.
    fn emit(&self, value: Value, human: impl FnOnce() -> String) {
        if self.json() {
            println!("{value}");
        } else {
            println!("{}", human());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        format: cli.format,
        jobs: cli.jobs,
        budget: Budget::from_env(),
    };
    match run(&ctx, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<u8> {
    match command {
        Command::Eval {
            model,
            formula,
            state,
            semantics,
        } => cmd_eval(
            ctx,
            &model,
            &formula,
            state.as_deref(),
            semantics.as_deref(),
        ),
        Command::Transform { op, model } => cmd_transform(&model, op),
        Command::Bisim { op } => cmd_bisim(ctx, op),
        Command::EquivPartition {
            models,
            semantics,
            vocab,
            characterize,
        } => cmd_partition(ctx, &models, semantics.as_deref(), vocab, characterize),
        Command::Definability(args) => cmd_definability(ctx, args),
        Command::Audit {
            system,
            negative,
            max_states,
        } => cmd_audit(ctx, system.as_deref(), negative, max_states),
        Command::ProofCheck { system, proof } => cmd_proof_check(ctx, &system, &proof),
        Command::Countermodel {
            formula,
            class,
            max_states,
        } => cmd_countermodel(ctx, &formula, &class, max_states),
        Command::Enumerate(args) => cmd_enumerate(ctx, args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<AnyModel> {
    io::model_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn parse_formula(text: &str) -> Result<Formula> {
    parse(text).map_err(|e| anyhow!("formula {text:?}: {e}"))
}

fn semantics_for(model: ModelRef<'_>, name: Option<&str>) -> Result<SemanticsKind> {
    let kind = match name {
        Some(n) => SemanticsKind::from_name(n).ok_or_else(|| anyhow!("unknown semantics {n:?}"))?,
        None => match model {
            ModelRef::Neighborhood(_) => SemanticsKind::New,
            ModelRef::Kripke(_) => SemanticsKind::Kripke,
        },
    };
    if !kind.accepts(model) {
        bail!("{kind} semantics does not apply to this model");
    }
    Ok(kind)
}

fn parse_class(name: &str) -> Result<CompositeClass> {
    CompositeClass::from_name(name).ok_or_else(|| anyhow!("unknown class {name:?}"))
}

fn parse_property(name: &str) -> Result<FrameProperty> {
    FrameProperty::from_name(name).ok_or_else(|| anyhow!("unknown frame property {name:?}"))
}

fn parse_system(name: &str) -> Result<AxiomSystem> {
    AxiomSystem::from_name(name).ok_or_else(|| anyhow!("unknown axiom system {name:?}"))
}

fn names(states: &[String], set: StateSet) -> Vec<String> {
    set_names(states, set)
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn valuation_value(states: &[String], valuation: &Valuation) -> Value {
    Value::Object(
        valuation
            .iter()
            .map(|(p, ext)| (p.clone(), json!(names(states, *ext))))
            .collect(),
    )
}

fn valuation_human(states: &[String], valuation: &Valuation) -> String {
    valuation
        .iter()
        .map(|(p, ext)| format!("V({p}) = {}", braces(&names(states, *ext))))
        .collect::<Vec<_>>()
        .join(", ")
}

fn frame_human(frame: &NeighborhoodModel) -> String {
    let states = frame.states();
    let families = (0..frame.len())
        .map(|s| {
            let sets: Vec<String> = frame
                .neighborhoods(s)
                .iter()
                .map(|x| braces(&names(states, x)))
                .collect();
            format!("N({}) = {}", states[s], braces(&sets))
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!("S = {}, {families}", braces(states))
}

fn cmd_eval(
    ctx: &Ctx,
    path: &Path,
    formula: &str,
    state: Option<&str>,
    semantics: Option<&str>,
) -> Result<u8> {
    let model = load_model(path)?;
    let m = model.as_ref();
    let kind = semantics_for(m, semantics)?;
    let f = parse_formula(formula)?;
    let ext = extension(m, &f, kind)?;
    let states = m.states();
    match state {
        Some(name) => {
            let s = states
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| anyhow!("state {name:?} not found"))?;
            let value = ext.contains(s);
            ctx.emit(
                json!({"state": name, "formula": f.to_string(), "semantics": kind.name(), "value": value}),
                || value.to_string(),
            );
        }
        None => {
            let members = names(states, ext);
            ctx.emit(
                json!({"formula": f.to_string(), "semantics": kind.name(), "extension": members}),
                || braces(&members),
            );
        }
    }
    Ok(0)
}

fn cmd_transform(path: &Path, op: TransformOp) -> Result<u8> {
    let model = load_model(path)?;
    let out = match (op, &model) {
        (TransformOp::CVariation, AnyModel::Neighborhood(m)) => model_to_json(&c_variation(m)),
        (TransformOp::QfVariation, AnyModel::Kripke(k)) => model_to_json(&qf_variation(k)?),
        (TransformOp::QfToKripke, AnyModel::Neighborhood(m)) => model_to_json(&qf_to_kripke(m)?),
        (TransformOp::QfVariation, _) => bail!("qf-variation needs a Kripke model"),
        _ => bail!("this transform needs a neighborhood model"),
    };
    println!("{out}");
    Ok(0)
}

fn parse_kind(name: &str) -> Result<BisimKind> {
    BisimKind::from_name(name).ok_or_else(|| anyhow!("unknown bisimulation kind {name:?}"))
}

fn cmd_bisim(ctx: &Ctx, op: BisimOp) -> Result<u8> {
    match op {
        BisimOp::Check {
            kind,
            left,
            right,
            relation,
        } => {
            let kind = parse_kind(&kind)?;
            let (l, r) = (load_model(&left)?, load_model(&right)?);
            let (ls, rs) = (l.as_ref().states(), r.as_ref().states());
            let z = io::relation_from_json(&read(&relation)?, ls, rs)?;
            match check_bisim(kind, &z, l.as_ref(), r.as_ref(), &ctx.budget)? {
                None => {
                    ctx.emit(json!({"kind": kind.name(), "bisimulation": true}), || {
                        format!("ok: the relation is a {kind} bisimulation")
                    });
                    Ok(0)
                }
                Some(v) => {
                    let (s, t) = v.pair();
                    let pair = json!([ls[s], rs[t]]);
                    let (detail, human) = match &v {
                        BisimViolation::Atoms { atom, .. } => (
                            json!({"reason": "atoms", "atom": atom}),
                            format!("states disagree on atom {atom}"),
                        ),
                        BisimViolation::Coherent {
                            left_set,
                            right_set,
                            ..
                        } => {
                            let (a, b) = (names(ls, *left_set), names(rs, *right_set));
                            let h = format!(
                                "coherent pair ({}, {}) separates the neighborhoods",
                                braces(&a),
                                braces(&b)
                            );
                            (
                                json!({"reason": "coherent", "left_set": a, "right_set": b}),
                                h,
                            )
                        }
                        BisimViolation::Zig { set, .. } => {
                            let a = names(ls, *set);
                            let h = format!("zig fails for left neighborhood {}", braces(&a));
                            (json!({"reason": "zig", "left_set": a}), h)
                        }
                        BisimViolation::Zag { set, .. } => {
                            let b = names(rs, *set);
                            let h = format!("zag fails for right neighborhood {}", braces(&b));
                            (json!({"reason": "zag", "right_set": b}), h)
                        }
                    };
                    let mut value =
                        json!({"kind": kind.name(), "bisimulation": false, "pair": pair});
                    value
                        .as_object_mut()
                        .expect("object")
                        .extend(detail.as_object().expect("object").clone());
                    ctx.emit(value, || {
                        format!("violation at ({}, {}): {human}", ls[s], rs[t])
                    });
                    Ok(1)
                }
            }
        }
        BisimOp::Max { kind, left, right } => {
            let kind = parse_kind(&kind)?;
            let (l, r) = (load_model(&left)?, load_model(&right)?);
            let (ls, rs) = (l.as_ref().states(), r.as_ref().states());
            let result = max_bisim(kind, l.as_ref(), r.as_ref(), &ctx.budget)?;
            let z = &result.relation;
            ctx.emit(relation_to_value(z, ls, rs), || {
                if z.is_empty() {
                    "no bisimilar pairs".to_string()
                } else {
                    z.iter()
                        .map(|(s, t)| format!("{} ~ {}", ls[s], rs[t]))
                        .collect::<Vec<_>>()
                        .join("\n")
                }
            });
            Ok(0)
        }
    }
}

fn cmd_partition(
    ctx: &Ctx,
    paths: &[PathBuf],
    semantics: Option<&str>,
    vocab: Option<Vec<String>>,
    characterize: bool,
) -> Result<u8> {
    let models = paths
        .iter()
        .map(|p| load_model(p))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<ModelRef<'_>> = models.iter().map(|m| m.as_ref()).collect();
    let kind = semantics_for(refs[0], semantics)?;
    let partition = logical_equiv_partition(&refs, vocab.as_deref(), kind, &ctx.budget)?;
    let depth = partition.depth();
    let blocks = partition.blocks(depth);
    let formulas = if characterize {
        (0..blocks.len())
            .map(|b| char_formula(&partition, b, depth).map(|f| f.to_string()))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let label = |(mi, s): (usize, usize)| format!("{}:{}", mi, refs[mi].states()[s]);
    let value = json!({
        "semantics": kind.name(),
        "vocab": partition.vocab(),
        "depth": depth,
        "blocks": blocks.iter().enumerate().map(|(b, members)| {
            let mut entry = json!({
                "members": members.iter().map(|&(mi, s)| json!({"model": mi, "state": refs[mi].states()[s]})).collect::<Vec<_>>(),
            });
            if characterize {
                entry["formula"] = json!(formulas[b]);
            }
            entry
        }).collect::<Vec<_>>(),
    });
    ctx.emit(value, || {
        blocks
            .iter()
            .enumerate()
            .map(|(b, members)| {
                let ms: Vec<String> = members.iter().map(|&g| label(g)).collect();
                let mut line = format!("block {b}: {}", braces(&ms));
                if characterize {
                    line.push_str(&format!("  [{}]", formulas[b]));
                }
                line
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(0)
}

fn claims(args: &DefinabilityArgs) -> Result<Vec<DefinabilityClaim>> {
    let mut claims = match (&args.builtin, &args.property, &args.formula) {
        (Some(name), _, _) if name == "all" => builtin_table(),
        (Some(name), _, _) => {
            let p = parse_property(name)?;
            vec![builtin(p).ok_or_else(|| anyhow!("no builtin claim for ({name})"))?]
        }
        (None, Some(p), Some(f)) => vec![DefinabilityClaim::new(
            parse_property(p)?,
            parse_formula(f)?,
            Background::CFrames,
        )],
        _ => bail!("give --builtin, or --property with --formula"),
    };
    if let Some(bg) = &args.background {
        let bg = Background::from_name(bg).ok_or_else(|| anyhow!("unknown background {bg:?}"))?;
        for c in &mut claims {
            c.background = bg;
        }
    }
    Ok(claims)
}

fn cmd_definability(ctx: &Ctx, args: DefinabilityArgs) -> Result<u8> {
    let claims = claims(&args)?;
    let mut code = 0;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for claim in &claims {
        let verdict = match args.sample {
            Some(count) => defines_sampled(
                claim,
                args.max_states,
                count,
                args.seed,
                &ctx.budget,
                ctx.jobs,
            )?,
            None => defines(claim, args.max_states, &ctx.budget, ctx.jobs)?,
        };
        let head = format!(
            "{} {} on {}",
            claim.property, claim.formula, claim.background
        );
        let mut report = json!({
            "property": claim.property.name(),
            "formula": claim.formula.to_string(),
            "background": claim.background.name(),
            "max_states": args.max_states,
        });
        match verdict {
            Verdict::Confirmed { frames } => {
                let total: u64 = frames.iter().sum();
                let largest = frames.last().copied().unwrap_or(0);
                lines.push(format!(
                    "{head}: confirmed ({largest} frames at {} states; {total} frames in total)",
                    args.max_states
                ));
                report["verdict"] = json!("confirmed");
                report["frames"] = json!(frames);
            }
            Verdict::Counterexample(cx) => {
                code = 1;
                let mut line = format!(
                    "{head}: counterexample ({}): {}",
                    cx.direction.describe(),
                    frame_human(&cx.frame)
                );
                report["verdict"] = json!("counterexample");
                report["direction"] = json!(cx.direction.describe());
                report["frame"] = model_to_value(&cx.frame);
                if let Some((valuation, state)) = &cx.witness {
                    let states = cx.frame.states();
                    line.push_str(&format!(
                        "; refuted at {} with {}",
                        states[*state],
                        valuation_human(states, valuation)
                    ));
                    report["state"] = json!(states[*state]);
                    report["valuation"] = valuation_value(states, valuation);
                }
                lines.push(line);
            }
        }
        reports.push(report);
    }
    ctx.emit(json!(reports), || lines.join("\n"));
    Ok(code)
}

fn refutation_value(r: &Refutation) -> Value {
    let states = r.frame.states();
    json!({
        "model": model_to_value(&r.model()),
        "state": states[r.state],
    })
}

fn refutation_human(r: &Refutation) -> String {
    let states = r.frame.states();
    format!(
        "{}; {} at state {}",
        frame_human(&r.frame),
        valuation_human(states, &r.valuation),
        states[r.state]
    )
}

fn cmd_audit(
    ctx: &Ctx,
    system: Option<&str>,
    negative: Option<Negative>,
    max_states: usize,
) -> Result<u8> {
    if let Some(Negative::FilterDeltaequ) = negative {
        return Ok(
            match filter_delta_equ_witness(max_states, &ctx.budget, ctx.jobs)? {
                Some(w) => {
                    ctx.emit(
                    json!({"negative": "filter-deltaequ", "found": true, "witness": refutation_value(&w)}),
                    || format!("filter frame refuting ΔEqu: {}", refutation_human(&w)),
                );
                    1
                }
                None => {
                    ctx.emit(
                    json!({"negative": "filter-deltaequ", "found": false, "max_states": max_states}),
                    || format!("no filter frame with at most {max_states} states refutes ΔEqu"),
                );
                    0
                }
            },
        );
    }
    let sys = parse_system(system.expect("required by clap"))?;
    let report = audit_soundness(sys, max_states, &ctx.budget, ctx.jobs)?;
    let value = json!({
        "system": sys.name(),
        "class": report.class.name(),
        "max_states": max_states,
        "axioms": report.axioms.iter().map(|a| {
            let mut v = json!({
                "schema": a.schema.name(),
                "instance": a.instance.to_string(),
                "frames": a.frames,
                "valid": a.refutation.is_none(),
            });
            if let Some(r) = &a.refutation {
                v["witness"] = refutation_value(r);
            }
            v
        }).collect::<Vec<_>>(),
    });
    ctx.emit(value, || {
        let mut lines = vec![format!(
            "system {sys} over {} frames with at most {max_states} states",
            report.class
        )];
        for a in &report.axioms {
            lines.push(match &a.refutation {
                None => format!("{}: valid ({} frames)", a.schema, a.frames),
                Some(r) => format!("{}: refuted: {}", a.schema, refutation_human(r)),
            });
        }
        lines.join("\n")
    });
    Ok(if report.all_valid() { 0 } else { 1 })
}

fn cmd_proof_check(ctx: &Ctx, system: &str, path: &Path) -> Result<u8> {
    let sys = parse_system(system)?;
    let script =
        io::proof_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(match check_proof(sys, &script, &ctx.budget) {
        Ok(()) => {
            ctx.emit(
                json!({"system": sys.name(), "valid": true, "lines": script.len()}),
                || format!("ok: {} lines checked in {sys}", script.len()),
            );
            0
        }
        Err(e) => {
            ctx.emit(
                json!({"system": sys.name(), "valid": false, "line": e.line, "reason": e.reason}),
                || format!("invalid: {e}"),
            );
            1
        }
    })
}

fn cmd_countermodel(ctx: &Ctx, formula: &str, class: &str, max_states: usize) -> Result<u8> {
    let f = parse_formula(formula)?;
    let class = parse_class(class)?;
    Ok(
        match countermodel_search(&f, class, max_states, &ctx.budget, ctx.jobs)? {
            Some((model, state)) => {
                let name = model.states()[state].clone();
                ctx.emit(
                    json!({"found": true, "model": model_to_value(&model), "state": name}),
                    || {
                        format!(
                            "countermodel: {}; {}; fails at state {name}",
                            frame_human(&model),
                            valuation_human(model.states(), model.valuation())
                        )
                    },
                );
                1
            }
            None => {
                ctx.emit(json!({"found": false, "max_states": max_states}), || {
                    format!("no countermodel with at most {max_states} states")
                });
                0
            }
        },
    )
}

fn cmd_enumerate(ctx: &Ctx, args: EnumerateArgs) -> Result<u8> {
    if args.kripke {
        let frames = enum_kripke_frames(args.states, &ctx.budget)?;
        return print_models(ctx, &args, frames.map(|k| model_to_json(&k)));
    }
    let mut required = args
        .property
        .iter()
        .map(|p| parse_property(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(class) = &args.class {
        required.extend_from_slice(parse_class(class)?.properties());
    }
    let mut spec = GenSpec::exhaustive(args.states).with_properties(&required);
    spec.seed = args.seed;
    spec.limit = args.count;
    if args.random {
        spec.mode = Mode::Random;
        let mut rng = enumerate::rng(spec.seed);
        let models = (0..args.count.expect("required by clap"))
            .map(|_| {
                enumerate::random_model_with(&mut rng, spec.states, &spec.required, &args.atoms)
            })
            .collect::<Result<Vec<_>, _>>()?;
        return print_models(ctx, &args, models.iter().map(model_to_json));
    }
    print_models(
        ctx,
        &args,
        enum_frames(&spec, &ctx.budget)?.map(|f| model_to_json(&f)),
    )
}

fn print_models(
    ctx: &Ctx,
    args: &EnumerateArgs,
    models: impl Iterator<Item = String>,
) -> Result<u8> {
    if args.count_only {
        let n = models.count();
        ctx.emit(json!({"count": n}), || n.to_string());
    } else {
        for m in models {
            println!("{m}");
        }
    }
    Ok(0)
}
