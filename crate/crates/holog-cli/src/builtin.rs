//! Built-in demonstration data: default structures for the relation suites
//! and the gallery behind the `examples` subcommand.

use std::collections::BTreeMap;

use holog::gen::test_signature;
use holog::groupoid::{FinGroupoid, GroupoidModel, GroupoidStructure};
use holog::model::{interpret_formula, Model, ModelError};
use holog::set_model::{SetModel, SetStructure};
use holog::syntax::{FuncDecl, Signature};
use holog::term_cat::CtxObject;

use crate::report::ExampleEntry;

/// Default two-sort set structure for `relations` runs without `--structure`:
/// carriers of sizes 2 and 3 with mixed-arithmetic tables.
pub fn default_set() -> (Signature, SetStructure) {
    let sig = test_signature();
    let sizes = BTreeMap::from([("A".to_string(), 2), ("B".to_string(), 3)]);
    let st = SetStructure::build(&sig, &sizes, |name, args| match name {
        "a" => 0,
        "h" => args[0] % 3,
        "m" => (args[0] + args[1]) % 2,
        _ => (args[0] + 1) % 3,
    })
    .expect("default set structure is total");
    (sig, st)
}

/// Default two-sort groupoid structure for `relations` runs: one carrier is
/// the two-element group, the other adds an isolated point.
pub fn default_groupoid() -> (Signature, GroupoidStructure) {
    let sig = test_signature();
    let a = FinGroupoid::cyclic_group(2);
    let b = FinGroupoid::disjoint_union(&FinGroupoid::cyclic_group(2), &FinGroupoid::discrete(1));
    let st = GroupoidStructure::build(
        &sig,
        BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]),
        |name, _| match name {
            "e" => 1,
            _ => 0,
        },
        |name, t| match name {
            "a" => 0,
            "h" => t[0],
            "m" => (t[0] + usize::from(t[1] == 1)) % 2,
            _ => 2,
        },
    )
    .expect("default groupoid structure is lawful");
    (sig, st)
}

const CONTRACTIBLE: &str = "exists x:A. forall y:A. x = y";
const WEAKLY_CONTRACTIBLE: &str = "exists x:A. forall y:A. !!(x = y)";
const CLASSICAL_INSTANCE: &str =
    "(exists x:A. forall y:A. !!(x = y)) -> (exists x:A. forall y:A. x = y)";
const SELF_IMPLICATION: &str =
    "(exists x:A. forall y:A. x = y) -> (exists x:A. forall y:A. x = y)";
const PARALLEL_MAPS_AGREE: &str = "forall x:A. f(x) = g(x)";

/// Runs the gallery: fixed sentences against fixed structures, with the
/// expected verdict recorded per entry. `inhabited == expected` everywhere
/// is the pass condition; entries are reported either way.
pub fn run_examples(max_fiber: usize) -> Result<Vec<ExampleEntry>, ModelError> {
    let mut entries = Vec::new();

    // Part 1: sentences about a bare carrier (one sort, no symbols).
    let sig = Signature::new(vec!["A".to_string()], vec![])
        .expect("one empty sort is a valid signature");
    let carriers: [(&'static str, FinGroupoid); 4] = [
        ("terminal", FinGroupoid::discrete(1)),
        ("indiscrete-pair", FinGroupoid::indiscrete(2)),
        ("discrete-pair", FinGroupoid::discrete(2)),
        ("group-z2", FinGroupoid::cyclic_group(2)),
    ];
    // (sentence, expectations per carrier above)
    let cases: [(&'static str, [bool; 4]); 4] = [
        (CONTRACTIBLE, [true, true, false, false]),
        (WEAKLY_CONTRACTIBLE, [true, true, false, true]),
        (CLASSICAL_INSTANCE, [true, true, true, false]),
        (SELF_IMPLICATION, [true, true, true, true]),
    ];
    for (i, (name, g)) in carriers.iter().enumerate() {
        let st = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), g.clone())]),
            |_, _| 0,
            |_, _| 0,
        )?;
        let model = GroupoidModel::new(&sig, &st).with_max_fiber(max_fiber);
        for (sentence, expected) in &cases {
            entries.push(entry_groupoid(&model, &sig, name, sentence, expected[i])?);
        }
    }

    // Part 2: the same sentences under set semantics, where equality is
    // decidable and the double negation collapses.
    let set_carriers: [(&'static str, usize); 2] = [("singleton", 1), ("pair", 2)];
    let set_cases: [(&'static str, [bool; 2]); 3] = [
        (CONTRACTIBLE, [true, false]),
        (WEAKLY_CONTRACTIBLE, [true, false]),
        (CLASSICAL_INSTANCE, [true, true]),
    ];
    for (i, (name, size)) in set_carriers.iter().enumerate() {
        let sizes = BTreeMap::from([("A".to_string(), *size)]);
        let st = SetStructure::build(&sig, &sizes, |_, _| 0)?;
        let model = SetModel::new(&sig, &st).with_max_fiber(max_fiber);
        for (sentence, expected) in &set_cases {
            entries.push(entry_set(&model, &sig, name, sentence, expected[i])?);
        }
    }

    // Part 3: agreement of two parallel endomaps, which here means a path
    // between them rather than pointwise sameness.
    let sig2 = Signature::new(
        vec!["A".to_string()],
        vec![
            (
                "f".to_string(),
                FuncDecl {
                    arity: vec!["A".to_string()],
                    codomain: "A".to_string(),
                },
            ),
            (
                "g".to_string(),
                FuncDecl {
                    arity: vec!["A".to_string()],
                    codomain: "A".to_string(),
                },
            ),
        ],
    )
    .expect("endo-pair signature is valid");
    let swap_cases: [(&'static str, FinGroupoid, bool); 3] = [
        ("endos-equal-on-z2", FinGroupoid::cyclic_group(2), true),
        ("swap-on-discrete-pair", FinGroupoid::discrete(2), false),
        ("swap-on-indiscrete-pair", FinGroupoid::indiscrete(2), true),
    ];
    for (name, g, expected) in swap_cases {
        let n = g.n_objects();
        let swap_obj = move |x: usize| if n == 1 { 0 } else { 1 - x };
        let gc = g.clone();
        let st = GroupoidStructure::build(
            &sig2,
            BTreeMap::from([("A".to_string(), g)]),
            move |sym, t| match sym {
                "f" => t[0],
                _ => swap_obj(t[0]),
            },
            move |sym, t| match sym {
                "f" => t[0],
                _ => {
                    // The swap functor's action on a morphism lands in the
                    // unique hom-set between the swapped endpoints.
                    let (s, tg) = (gc.src(t[0]), gc.tgt(t[0]));
                    if gc.n_objects() == 1 {
                        t[0]
                    } else {
                        gc.hom(swap_obj(s), swap_obj(tg))[0]
                    }
                }
            },
        )?;
        let model = GroupoidModel::new(&sig2, &st).with_max_fiber(max_fiber);
        entries.push(entry_groupoid(&model, &sig2, name, PARALLEL_MAPS_AGREE, expected)?);
    }

    Ok(entries)
}

fn entry_groupoid(
    model: &GroupoidModel,
    sig: &Signature,
    structure: &'static str,
    sentence: &'static str,
    expected: bool,
) -> Result<ExampleEntry, ModelError> {
    let phi = holog::formats::parse_formula_in(sig, &[], sentence)
        .map_err(|e| ModelError::Shape(format!("gallery sentence failed to parse: {e}")))?;
    let pred = interpret_formula(model, sig, &CtxObject::empty(), &phi)?;
    Ok(ExampleEntry {
        backend: "groupoid",
        structure,
        sentence,
        inhabited: model.inhabited(&pred, &[])?,
        expected,
    })
}

fn entry_set(
    model: &SetModel,
    sig: &Signature,
    structure: &'static str,
    sentence: &'static str,
    expected: bool,
) -> Result<ExampleEntry, ModelError> {
    let phi = holog::formats::parse_formula_in(sig, &[], sentence)
        .map_err(|e| ModelError::Shape(format!("gallery sentence failed to parse: {e}")))?;
    let pred = interpret_formula(model, sig, &CtxObject::empty(), &phi)?;
    Ok(ExampleEntry {
        backend: "set",
        structure,
        sentence,
        inhabited: model.inhabited(&pred, &[])?,
        expected,
    })
}
