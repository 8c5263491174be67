use proptest::prelude::*;
use rand::Rng;

use delta_lab::bisim::{
    char_formula, check_bisim, logical_equiv_partition, max_bisim, BisimKind, PairRelation,
};
use delta_lab::enumerate::{
    frame_at, frame_index, random_formula, random_formula_with, random_kripke_with,
    random_model_with, rng, Rng64,
};
use delta_lab::io::{model_from_json, model_to_json};
use delta_lab::proofsys::{countermodel_search, is_taut_instance, shipped_proofs, Pattern};
use delta_lab::semantics::{extension, Compiled};
use delta_lab::transform::{c_variation, qf_to_kripke, qf_variation};
use delta_lab::{
    parse, AnyModel, Budget, CompositeClass, Formula, FrameProperty, ModelRef, NeighborhoodModel,
    SemanticsKind,
};

fn atoms() -> Vec<String> {
    vec!["p".into(), "q".into()]
}

fn model(r: &mut Rng64, max: usize, required: &[FrameProperty]) -> NeighborhoodModel {
    let n = r.gen_range(1..=max);
    random_model_with(r, n, required, &atoms()).unwrap()
}

fn agree_on(
    fs: &[Formula],
    kind: SemanticsKind,
    a: ModelRef<'_>,
    b: ModelRef<'_>,
    z: &PairRelation,
) -> bool {
    fs.iter().all(|f| {
        let c = Compiled::new(f);
        let (ea, eb) = (c.extension(a, kind), c.extension(b, kind));
        z.iter().all(|(s, t)| ea.contains(s) == eb.contains(t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printing_round_trips(seed in any::<u64>(), depth in 0usize..5) {
        let f = random_formula(depth, &atoms(), seed);
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f.clone());
        prop_assert!(f.modal_depth() <= depth);
    }

    #[test]
    fn sugar_expansion_is_idempotent_and_core(seed in any::<u64>()) {
        let f = random_formula(3, &atoms(), seed);
        let e = f.expand_sugar();
        prop_assert!(e.is_core());
        prop_assert_eq!(e.expand_sugar(), e.clone());
        prop_assert_eq!(e.vars(), f.vars());
        prop_assert_eq!(e.modal_depth(), f.modal_depth());
    }

    #[test]
    fn old_equals_new_on_c_models(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = model(&mut r, 5, &[FrameProperty::C]);
        let f = random_formula_with(&mut r, 4, &atoms());
        prop_assert_eq!(
            extension(&m, &f, SemanticsKind::Old).unwrap(),
            extension(&m, &f, SemanticsKind::New).unwrap()
        );
    }

    #[test]
    fn c_variation_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = model(&mut r, 5, &[]);
        let c = c_variation(&m);
        let f = random_formula_with(&mut r, 4, &atoms());
        prop_assert_eq!(
            extension(&m, &f, SemanticsKind::Old).unwrap(),
            extension(&c, &f, SemanticsKind::New).unwrap()
        );
        prop_assert_eq!(c_variation(&c), c.clone());
        prop_assert!(c.has_property(FrameProperty::C));
    }

    #[test]
    fn qf_round_trip_preserves_kripke_truth(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let k = random_kripke_with(&mut r, n, &atoms());
        let q = qf_variation(&k).unwrap();
        prop_assert!(q.is_in(CompositeClass::QuasiFilter));
        let k2 = qf_to_kripke(&q).unwrap();
        let f = random_formula_with(&mut r, 4, &atoms());
        let ek = extension(&k, &f, SemanticsKind::Kripke).unwrap();
        prop_assert_eq!(ek, extension(&q, &f, SemanticsKind::New).unwrap());
        prop_assert_eq!(ek, extension(&k2, &f, SemanticsKind::Kripke).unwrap());
    }

    #[test]
    fn frames_are_index_addressable(k in 0u128..(1u128 << 24)) {
        prop_assert_eq!(frame_index(&frame_at(3, k)), k);
    }

    #[test]
    fn models_round_trip_through_json(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = model(&mut r, 6, &[]);
        prop_assert_eq!(model_from_json(&model_to_json(&m)).unwrap(), AnyModel::Neighborhood(m.clone()));
        let n = r.gen_range(1..=6);
        let k = random_kripke_with(&mut r, n, &atoms());
        prop_assert_eq!(model_from_json(&model_to_json(&k)).unwrap(), AnyModel::Kripke(k.clone()));
    }

    #[test]
    fn max_bisim_is_greatest_and_invariant(seed in any::<u64>(), kind_index in 0usize..5) {
        let budget = Budget::default();
        let mut r = rng(seed);
        let (kind, class, sem) = [
            (BisimKind::NbhDelta, None, SemanticsKind::Old),
            (BisimKind::C, Some(CompositeClass::CModel), SemanticsKind::New),
            (BisimKind::MonotonicC, Some(CompositeClass::MonotonicC), SemanticsKind::New),
            (BisimKind::CMonotonic, Some(CompositeClass::MonotonicC), SemanticsKind::New),
            (BisimKind::Qf, Some(CompositeClass::QuasiFilter), SemanticsKind::New),
        ][kind_index];
        let required = class.map_or(&[][..], |c| c.properties());
        let (a, b) = (model(&mut r, 4, required), model(&mut r, 4, required));
        let z = max_bisim(kind, &a, &b, &budget).unwrap().relation;
        if !z.is_empty() {
            prop_assert!(check_bisim(kind, &z, &a, &b, &budget).unwrap().is_none());
        }
        // Every pair outside breaks the bisimulation when added.
        for s in 0..a.len() {
            for t in 0..b.len() {
                if !z.contains(s, t) {
                    let mut bigger = z.clone();
                    bigger.insert(s, t);
                    prop_assert!(check_bisim(kind, &bigger, &a, &b, &budget).unwrap().is_some());
                }
            }
        }
        let fs: Vec<Formula> = (0..20).map(|_| random_formula_with(&mut r, 4, &atoms())).collect();
        prop_assert!(agree_on(&fs, sem, (&a).into(), (&b).into(), &z));
    }

    #[test]
    fn rel_delta_bisimilarity_is_invariant(seed in any::<u64>()) {
        let budget = Budget::default();
        let mut r = rng(seed);
        let (n, m) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = random_kripke_with(&mut r, n, &atoms());
        let b = random_kripke_with(&mut r, m, &atoms());
        let z = max_bisim(BisimKind::RelDelta, &a, &b, &budget).unwrap().relation;
        let fs: Vec<Formula> = (0..20).map(|_| random_formula_with(&mut r, 4, &atoms())).collect();
        prop_assert!(agree_on(&fs, SemanticsKind::Kripke, (&a).into(), (&b).into(), &z));
    }

    #[test]
    fn partition_blocks_are_characterized(seed in any::<u64>()) {
        let budget = Budget::default();
        let mut r = rng(seed);
        let (a, b) = (model(&mut r, 4, &[]), model(&mut r, 3, &[]));
        let models = [ModelRef::from(&a), ModelRef::from(&b)];
        let partition = logical_equiv_partition(&models, None, SemanticsKind::New, &budget).unwrap();
        for depth in 0..=partition.depth() {
            let blocks = partition.blocks(depth);
            for (block, members) in blocks.iter().enumerate() {
                let f = char_formula(&partition, block, depth).unwrap();
                prop_assert!(f.modal_depth() <= depth);
                for (mi, m) in models.iter().enumerate() {
                    let ext = extension(*m, &f, SemanticsKind::New).unwrap();
                    for s in 0..m.len() {
                        prop_assert_eq!(ext.contains(s), members.contains(&(mi, s)));
                    }
                }
            }
            if depth > 0 {
                prop_assert!(partition.block_count(depth) >= partition.block_count(depth - 1));
            }
        }
        // Equivalent states agree on random formulas.
        for _ in 0..10 {
            let f = random_formula_with(&mut r, 4, &atoms());
            let (ea, eb) = (
                extension(&a, &f, SemanticsKind::New).unwrap(),
                extension(&b, &f, SemanticsKind::New).unwrap(),
            );
            for (s, t) in partition.cross_pairs(0, 1).iter() {
                prop_assert_eq!(ea.contains(s), eb.contains(t));
            }
        }
    }

    #[test]
    fn tautology_schemas_pass(seed in any::<u64>()) {
        let budget = Budget::default();
        let mut r = rng(seed);
        let phi = random_formula_with(&mut r, 2, &atoms());
        let psi = random_formula_with(&mut r, 2, &atoms());
        for taut in ["a -> a", "a & b -> a", "(a -> b) -> (~b -> ~a)", "a | ~a", "~(a & ~a)"] {
            let pattern = Pattern::new(parse(taut).unwrap(), &["a", "b"]);
            let subst = [("a".to_string(), phi.clone()), ("b".to_string(), psi.clone())].into();
            let instance = pattern.instantiate(&subst);
            prop_assert!(is_taut_instance(&instance, &budget).unwrap(), "{}", instance);
            prop_assert!(pattern.matches(&instance).is_some());
        }
    }
}

#[test]
fn shipped_conclusions_have_no_small_countermodels() {
    let budget = Budget::default();
    for (name, script) in shipped_proofs() {
        let conclusion = parse(&script.last().unwrap().formula).unwrap();
        let found =
            countermodel_search(&conclusion, CompositeClass::QuasiFilter, 2, &budget, 1).unwrap();
        assert!(found.is_none(), "{name}");
    }
}

#[test]
fn hennessy_milner_gap_between_separate_models() {
    // a ≡ a' yet no c-bisimulation relates them: b and c have no partners on
    // the right, so ({b}, ∅) is coherent for {(a, a')}.
    let budget = Budget::default();
    let left = model_from_json(
        r#"{"type":"neighborhood","states":["a","b","c"],"N":{"a":[["a","c"],["b"]],"b":[],"c":[]},"V":{"q":["a"]}}"#,
    )
    .unwrap();
    let right = model_from_json(
        r#"{"type":"neighborhood","states":["a'"],"N":{"a'":[]},"V":{"q":["a'"]}}"#,
    )
    .unwrap();
    let (AnyModel::Neighborhood(l), AnyModel::Neighborhood(r)) = (&left, &right) else {
        panic!()
    };
    assert!(l.is_in(CompositeClass::CModel) && r.is_in(CompositeClass::CModel));
    let partition =
        logical_equiv_partition(&[l.into(), r.into()], None, SemanticsKind::New, &budget).unwrap();
    assert!(partition.equivalent((0, 0), (1, 0)));
    assert!(max_bisim(BisimKind::C, l, r, &budget)
        .unwrap()
        .no_bisimilar_pairs());
}
