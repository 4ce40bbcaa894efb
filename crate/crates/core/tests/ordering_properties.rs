mod common;

use idts::rewrite::Rule;
use idts::schema::{check_rule_schema, descents, greater_arg, multiset_greater, status_greater, Descent};
use idts::{substitute, Status, Substitution, Term, TermKind, Var};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn greater(status: &Status, l: &[u8], r: &[u8]) -> bool {
    status_greater(status, l, r, |a, b| a > b, |a, b| a == b)
}

/// A linear status over some of `1..=n`, grouped at random.
fn arb_status() -> impl Strategy<Value = (Status, usize)> {
    (1usize..=4).prop_flat_map(|n| {
        (Just(n), Just((1..=n).collect::<Vec<_>>()).prop_shuffle(), 1..=n, proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(n, perm, keep, cuts)| {
                let mut groups: Vec<Vec<usize>> = vec![Vec::new()];
                for (k, &i) in perm[..keep].iter().enumerate() {
                    if k > 0 && cuts[k] {
                        groups.push(Vec::new());
                    }
                    groups.last_mut().unwrap().push(i);
                }
                (Status::new(groups), n)
            })
    })
}

fn tuples(n: usize, base: u8) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| (0..base).map(move |x| [t.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

proptest! {
    #[test]
    fn status_matches_reference(
        (status, n) in arb_status(),
        l in proptest::collection::vec(0u8..=5, 4),
        r in proptest::collection::vec(0u8..=5, 4),
    ) {
        prop_assert_eq!(greater(&status, &l[..n], &r[..n]), common::reference_status(&status, &l[..n], &r[..n]));
    }

    #[test]
    fn multiset_extension_matches_reference(
        m in proptest::collection::vec(0u8..=5, 0..6),
        n in proptest::collection::vec(0u8..=5, 0..6),
    ) {
        prop_assert_eq!(multiset_greater(&m, &n, |a, b| a > b, |a, b| a == b), common::reference_multiset(&m, &n));
    }

    #[test]
    fn status_is_a_strict_order((status, n) in arb_status()) {
        let all = tuples(n.min(3), 3);
        let status = Status::new(status.groups.iter().map(|g| g.iter().copied().filter(|&i| i <= 3).collect::<Vec<_>>()).filter(|g| !g.is_empty()).collect());
        for a in &all {
            prop_assert!(!greater(&status, a, a));
            for b in &all {
                if !greater(&status, a, b) {
                    continue;
                }
                prop_assert!(!greater(&status, b, a));
                for c in &all {
                    if greater(&status, b, c) {
                        prop_assert!(greater(&status, a, c), "{status}: {a:?} > {b:?} > {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn extreme_statuses_are_lex_and_multiset(
        l in proptest::collection::vec(0u8..=5, 1..5),
        r in proptest::collection::vec(0u8..=5, 1..5),
    ) {
        let n = l.len().min(r.len());
        let (l, r) = (&l[..n], &r[..n]);
        prop_assert_eq!(greater(&Status::lexicographic(n), l, r), l > r);
        prop_assert_eq!(greater(&Status::multiset(n), l, r), common::reference_multiset(l, r));
    }
}

/// Raw, locally closed subterms of `u` of the same type, with `u` itself.
fn comparable_subterms(u: &Term) -> Vec<Term> {
    u.positions()
        .into_iter()
        .filter_map(|p| u.subterm_raw(&p).cloned())
        .filter(|s| s.ty() == u.ty() && s.is_locally_closed())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn argument_ordering_is_irreflexive_with_valid_witnesses(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, d) = common::corpus().choose(&mut rng).unwrap().clone();
        let types = common::interesting_types(d.signature());
        let ty = types.choose(&mut rng).unwrap().clone();
        let u = common::random_term(d.signature(), &ty, 5, &mut rng);
        prop_assert!(!greater_arg(&u, &u, d.signature()).unwrap());
        for v in comparable_subterms(&u) {
            for w in descents(&u, &v, d.signature()).unwrap() {
                match w {
                    Descent::Positive { position, extra_args } => {
                        let base = u.subterm_raw(&position).unwrap().clone();
                        prop_assert_eq!(Term::apps(base, extra_args).unwrap(), v.clone());
                    }
                    Descent::Subterm { position } => {
                        prop_assert_eq!(u.subterm_raw(&position).unwrap(), &v);
                    }
                }
            }
        }
    }

    #[test]
    fn subterm_descent_is_transitive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, d) = common::corpus().choose(&mut rng).unwrap().clone();
        let sig = d.signature();
        let arrows: Vec<_> = common::interesting_types(sig).into_iter().filter(|t| t.is_arrow()).collect();
        prop_assume!(!arrows.is_empty());
        let ty = arrows.choose(&mut rng).unwrap().clone();
        let u = common::random_term(sig, &ty, 6, &mut rng);
        let subs = comparable_subterms(&u);
        for v in &subs {
            if !greater_arg(&u, v, sig).unwrap() {
                continue;
            }
            for w in comparable_subterms(v) {
                if greater_arg(v, &w, sig).unwrap() {
                    prop_assert!(greater_arg(&u, &w, sig).unwrap(), "{u} > {v} > {w}");
                }
            }
        }
    }
}

/// Renames every free variable apart.
fn rename(rule: &Rule) -> Rule {
    let mut theta = Substitution::new();
    for x in rule.lhs.free_vars() {
        let y = Var::fresh(format!("{}r", x.name), x.ty.clone());
        theta.insert(x, Term::var(y)).unwrap();
    }
    let s = |t: &Term| substitute(t, &theta);
    Rule::conditional(s(&rule.lhs), s(&rule.rhs), rule.condition.iter().map(|(u, v)| (s(u), s(v))).collect())
}

#[test]
fn renaming_never_changes_a_verdict() {
    for (name, d) in common::systems() {
        for (i, rule) in d.rules().iter().enumerate() {
            let before = check_rule_schema(rule, i + 1, d.signature());
            let renamed = rename(rule);
            assert!(!matches!(renamed.lhs.kind(), TermKind::Var(_)));
            let after = check_rule_schema(&renamed, i + 1, d.signature());
            assert_eq!(before.accepted, after.accepted, "{name} rule {}", i + 1);
            assert_eq!(before.constructor_headed, after.constructor_headed);
        }
    }
}
