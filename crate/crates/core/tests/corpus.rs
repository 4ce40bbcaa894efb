mod common;

use std::collections::BTreeMap;

use idts::rewrite::{check_rule, normalize, RuleSystem, Strategy};
use idts::schema::{acc_vector, check_rule_schema, check_system, replay, Derivation, DerivationNode, SystemVerdict};
use idts::syntax::{elaborate_term, parse, parse_term, Document};
use idts::transforms::{curried_name, currify, encode_conditional, generate_recursors, TransformError};
use idts::{Signature, Term, TermKind, Type};

#[test]
fn every_fixture_has_its_expected_verdict() {
    let verdicts: BTreeMap<&str, SystemVerdict> = [
        ("ack", SystemVerdict::SnGuaranteed),
        ("append_map", SystemVerdict::SnGuaranteed),
        ("bin", SystemVerdict::SnGuaranteed),
        ("derivative", SystemVerdict::SchemaPassedUnclaimed),
        ("division", SystemVerdict::NotGuaranteed),
        ("foldl_sum", SystemVerdict::SnGuaranteed),
        ("injection", SystemVerdict::SnGuaranteed),
        ("insert", SystemVerdict::SnGuaranteed),
        ("miniscoping", SystemVerdict::SchemaPassedUnclaimed),
        ("natrec", SystemVerdict::SnGuaranteed),
        ("nnf", SystemVerdict::SchemaPassedUnclaimed),
        ("ord_addition", SystemVerdict::SnGuaranteed),
        ("ord_limit", SystemVerdict::SnGuaranteed),
        ("ordrec", SystemVerdict::SnGuaranteed),
        ("proc", SystemVerdict::SchemaPassedUnclaimed),
        ("treerec", SystemVerdict::SnGuaranteed),
        ("types", SystemVerdict::SnGuaranteed),
    ]
    .into_iter()
    .collect();
    let corpus = common::corpus();
    assert_eq!(corpus.len(), verdicts.len());
    for (name, d) in &corpus {
        let report = check_system(&d.system);
        assert_eq!(report.verdict, verdicts[name.as_str()], "{name}");
        let rejected: Vec<usize> = report.rejected().map(|r| r.index).collect();
        assert_eq!(rejected, common::expected_rejections(name), "{name}");
        assert!(d.warnings.is_empty(), "{name}: {:?}", d.warnings);
    }
}

#[test]
fn rule_counts_match_the_worked_examples() {
    let counts = [
        ("ack", 3),
        ("append_map", 7),
        ("bin", 5),
        ("derivative", 14),
        ("division", 6),
        ("foldl_sum", 6),
        ("injection", 2),
        ("insert", 6),
        ("miniscoping", 4),
        ("natrec", 2),
        ("nnf", 3),
        ("ord_addition", 3),
        ("ord_limit", 2),
        ("ordrec", 3),
        ("proc", 9),
        ("treerec", 3),
    ];
    for (name, n) in counts {
        assert_eq!(common::load(name).rules().len(), n, "{name}");
    }
}

#[test]
fn parse_then_print_is_the_identity() {
    for name in common::fixture_names() {
        let spec = parse(&common::fixture_text(&name)).unwrap();
        let printed = spec.to_string();
        assert_eq!(parse(&printed).unwrap(), spec, "{name}:\n{printed}");
        assert_eq!(parse(&printed).unwrap().to_string(), printed);
    }
}

#[test]
fn positivity_matrix() {
    let d = common::load("types");
    let sig = d.signature();
    let report = |n: &str| sig.positivity(n).unwrap().clone();
    for n in ["nat", "bool", "listnat", "tree", "listtree", "R", "proc", "data", "ord", "form", "indiv"] {
        assert!(report(n).strictly_positive, "{n}");
    }
    let basic: Vec<&str> = ["nat", "bool", "listnat", "tree", "listtree", "R", "data", "indiv", "ord", "form", "proc"]
        .into_iter()
        .filter(|n| report(n).basic)
        .collect();
    assert_eq!(basic, ["nat", "bool", "listnat", "tree", "listtree", "R", "data", "indiv"]);
    assert!(sig.dependency().equiv("tree", "listtree"));

    let err = match Document::parse(&common::fixture_text("nonpositive")) {
        Err(idts::syntax::LoadError::Signature(e)) => e,
        _ => panic!("the self-applying type must be rejected"),
    };
    let r = &err.report.positivity["d"];
    assert!(!r.strictly_positive);
    assert_eq!(r.violations.len(), 1);
    assert_eq!((r.violations[0].argument, r.violations[0].position.to_string()), (1, "1".to_string()));
}

fn assert_generated_rules_pass(sig: &Signature, rules: &[idts::rewrite::Rule], what: &str) {
    for (i, r) in rules.iter().enumerate() {
        check_rule(r, sig).unwrap_or_else(|e| panic!("{what}: {r}: {e}"));
        let report = check_rule_schema(r, i + 1, sig);
        assert!(report.accepted, "{what}: {r}: {:?}", report.diagnosis);
        assert!(!report.constructor_headed);
        for d in report.derivations() {
            replay(d, sig, r.head().unwrap(), r.lhs_args()).unwrap();
        }
    }
}

#[test]
fn recursors_of_every_class_pass_the_schema() {
    let d = common::load("types");
    let sig = d.signature();
    let targets = [Type::ind("nat"), Type::arrow(Type::ind("nat"), Type::ind("ord")), Type::ind("form")];
    for member in sig.inductive_names() {
        for target in targets.iter().cloned().chain([Type::ind(member.clone())]) {
            let b = generate_recursors(sig, member, &target).unwrap();
            assert_generated_rules_pass(&b.delta.signature, &b.delta.rules, &format!("{member} into {target}"));
            let class = sig.dependency().class_members(member).unwrap();
            let ctor_count: usize = class.iter().map(|s| sig.constructors(s).len()).sum();
            assert_eq!(b.delta.rules.len(), ctor_count);
        }
    }
}

#[test]
fn basic_recursors_take_one_hypothesis_per_recursive_argument() {
    let d = common::load("types");
    let sig = d.signature();
    for member in sig.inductive_names().filter(|n| sig.positivity(n).unwrap().basic) {
        let b = generate_recursors(sig, member, &Type::ind("bool")).unwrap();
        let class = sig.dependency().class_members(member).unwrap();
        let ctors: Vec<_> = class.iter().flat_map(|s| sig.constructors(s).iter()).collect();
        for ((c, rule), hyps) in ctors.iter().zip(&b.delta.rules).zip(&b.hypotheses) {
            let recursive = c
                .arg_types()
                .iter()
                .filter(|t| t.as_ind().is_some_and(|n| class.contains(n)))
                .count();
            assert_eq!(*hyps, recursive, "{}", c.name());
            let (head, args) = rule.rhs.spine();
            assert!(head.as_var().is_some());
            assert_eq!(args.len(), c.arity() + recursive, "{rule}");
            let calls = args[c.arity()..].iter().filter(|a| a.head_symbol().is_some()).count();
            assert_eq!(calls, recursive);
        }
    }
}

/// Structural recursion on nat, computed directly.
fn fold(n: u64, base: u64, step: impl Fn(u64, u64) -> u64 + Copy) -> u64 {
    if n == 0 {
        base
    } else {
        step(n - 1, fold(n - 1, base, step))
    }
}

fn numeral(n: u64) -> String {
    (0..n).fold("z".to_string(), |t, _| format!("s({t})"))
}

fn value(t: &Term) -> u64 {
    match t.kind() {
        TermKind::Fun(c, args) if &**c.name() == "s" => 1 + value(&args[0]),
        TermKind::Fun(c, _) if &**c.name() == "z" => 0,
        _ => panic!("not a numeral: {t}"),
    }
}

#[test]
fn generated_recursor_computes_structural_recursion() {
    let d = common::load("natrec");
    let b = generate_recursors(d.signature(), "nat", &Type::ind("nat")).unwrap();
    let sig = b.delta.signature.clone();
    let rules = d.rules().iter().chain(&b.delta.rules).cloned().collect();
    let rs = RuleSystem::new(sig.clone(), rules).unwrap();
    let cases: [(&str, u64, fn(u64, u64) -> u64); 3] = [
        ("\\u:nat. \\r:nat. s(s(r))", 0, |_, r| r + 2),
        ("\\u:nat. \\r:nat. u", 3, |u, _| u),
        ("\\u:nat. \\r:nat. s(natrec(r, \\a:nat. \\b:nat. s(b), u))", 1, |u, r| 1 + r + u),
    ];
    for (step_text, base, step) in cases {
        for n in 0..12 {
            let text = format!("natrec_nat({}, {step_text}, {})", numeral(base), numeral(n));
            let t = elaborate_term(&sig, &parse_term(&text).unwrap()).unwrap();
            let nf = normalize(&rs, &t, 100_000, Strategy::Outermost).unwrap().normal_form;
            assert_eq!(value(&nf), fold(n, base, step), "{text}");
        }
    }
}

#[test]
fn currified_and_encoded_rules_pass_the_schema() {
    for (name, d) in common::systems() {
        let sig = d.signature();
        for f in sig.symbols().filter(|f| f.arity() > 0 && !f.is_constructor()) {
            if sig.symbol(&curried_name(f.name())).is_some() {
                assert!(matches!(currify(sig, f.name()), Err(TransformError::NameClash(_))));
                continue;
            }
            let delta = currify(sig, f.name()).unwrap();
            assert_eq!(delta.rules.len(), 1);
            assert_generated_rules_pass(&delta.signature, &delta.rules, &format!("{name}: {}", f.name()));
        }
    }
    let d = common::load("insert");
    let enc = encode_conditional(d.signature(), d.rules()).unwrap();
    assert_eq!(enc.rewritten, vec![1, 2]);
    assert!(enc.rules.iter().all(|r| !r.is_conditional()));
    assert_generated_rules_pass(&enc.delta.signature, &enc.rules, "insert encoded");
}

/// Leaves are variables, accessible terms or constants.
fn audit(d: &Derivation, acc: &idts::schema::Accessible) -> Result<(), String> {
    let kids = d.children();
    if kids.is_empty() {
        let ok = match &d.node {
            DerivationNode::Var => d.term.as_var().is_some(),
            DerivationNode::Accessible { .. } => acc.contains(&d.term),
            DerivationNode::Smaller { .. } | DerivationNode::Recursive { .. } => {
                matches!(d.term.kind(), TermKind::Fun(_, a) if a.is_empty())
            }
            _ => false,
        };
        if !ok {
            return Err(format!("unjustified leaf {} for {}", d.label(), d.term));
        }
    }
    kids.into_iter().try_for_each(|k| audit(k, acc))
}

#[test]
fn every_certificate_replays_and_is_grounded() {
    let mut checked = 0;
    for (name, d) in common::systems() {
        let report = check_system(&d.system);
        for r in &report.rules {
            let acc = acc_vector(r.rule.lhs_args(), d.signature());
            for der in r.derivations() {
                replay(der, d.signature(), r.rule.head().unwrap(), r.rule.lhs_args())
                    .unwrap_or_else(|e| panic!("{name} rule {}: {e}", r.index));
                audit(der, &acc).unwrap_or_else(|e| panic!("{name} rule {}: {e}", r.index));
                checked += 1;
            }
        }
    }
    assert!(checked > 80);
}

#[test]
fn spot_checks() {
    let ack = common::load("ack");
    let nf = |d: &Document, name: &str| {
        normalize(&d.system, &d.terms[name], 100_000, Strategy::Outermost).unwrap().normal_form
    };
    assert_eq!(value(&nf(&ack, "ack22")), 7);
    let bin = common::load("bin");
    assert_eq!(value(&nf(&bin, "bin22")), 6);
    let ins = common::load("insert");
    assert_eq!(
        nf(&ins, "ins").to_string(),
        "cons(z, cons(s(z), cons(s(s(z)), cons(s(s(s(z))), nil))))"
    );
    let d = common::load("derivative");
    assert_eq!(nf(&d, "dsin").to_string(), "\\x:R. cos(x)");
}

#[test]
fn subject_reduction_on_sampled_terms() {
    for (name, d) in common::systems() {
        for t in common::closed_terms(d.signature(), 5).iter().take(200) {
            d.system.subject_reduction_probe(t, 3).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn interpretation_lemmas_on_small_terms() {
    for (name, d) in common::systems() {
        let r = common::interpretation_lemmas(&d, 4, 20_000);
        assert!(r.violations.is_empty(), "{name}: {:?}", &r.violations[..r.violations.len().min(5)]);
        assert!(r.undecided.is_empty(), "{name}: {:?}", r.undecided);
    }
}
