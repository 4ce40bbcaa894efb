//! Fixture loading and random term generation shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use idts::enumerate::Enumerator;
use idts::syntax::Document;
use idts::{Signature, Status, SymbolKind, Term, Type, Var};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// File stems of the corpus, sorted.
pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "idts").then(|| p.file_stem()?.to_str().map(String::from))?
        })
        .collect();
    names.sort();
    names
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(format!("{name}.idts"))).expect("fixture readable")
}

pub fn load(name: &str) -> Document {
    Document::parse(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every fixture with a valid signature.
pub fn corpus() -> Vec<(String, Document)> {
    fixture_names()
        .into_iter()
        .filter_map(|n| Document::parse(&fixture_text(&n)).ok().map(|d| (n, d)))
        .collect()
}

/// Corpus fixtures that declare rules.
pub fn systems() -> Vec<(String, Document)> {
    corpus().into_iter().filter(|(_, d)| !d.rules().is_empty()).collect()
}

/// Closed terms of every inductive type up to `max_weight`.
pub fn closed_terms(sig: &Signature, max_weight: usize) -> Vec<Term> {
    let mut e = Enumerator::new(sig);
    let types: Vec<Type> = sig.inductive_names().map(|n| Type::ind(n.clone())).collect();
    types.iter().flat_map(|t| e.up_to(t, max_weight)).collect()
}

/// Argument lists `B1..Bk` with `t = B1 -> .. -> Bk -> goal`.
pub fn spines_to(t: &Type, goal: &Type) -> Vec<Vec<Type>> {
    let mut out = Vec::new();
    let mut args = Vec::new();
    let mut cur = t;
    loop {
        if cur == goal {
            out.push(args.clone());
        }
        match cur {
            Type::Arrow(d, c) => {
                args.push((**d).clone());
                cur = c;
            }
            Type::Ind(_) => return out,
        }
    }
}

/// Free variable number `k` of type `t`; two per type keeps collisions frequent.
pub fn pool_var(t: &Type, k: usize) -> Var {
    Var::new(format!("V{k}_{t}"), t.clone())
}

/// Random well-typed term, possibly open. Past `depth` only leaves are chosen.
pub fn random_term(sig: &Signature, ty: &Type, depth: usize, rng: &mut impl Rng) -> Term {
    go(sig, ty, &mut Vec::new(), depth, rng)
}

fn go(sig: &Signature, ty: &Type, ctx: &mut Vec<Type>, depth: usize, rng: &mut impl Rng) -> Term {
    enum Head {
        Free,
        Bound(usize, Vec<Type>),
        Sym(idts::Symbol, Vec<Type>),
        Lambda,
    }
    let mut heads = vec![Head::Free];
    if ty.is_arrow() {
        heads.push(Head::Lambda);
    }
    for (level, h) in ctx.iter().enumerate() {
        for extra in spines_to(h, ty) {
            if depth > 0 || extra.is_empty() {
                heads.push(Head::Bound(level, extra));
            }
        }
    }
    for s in sig.symbols().filter(|s| !matches!(s.kind(), SymbolKind::Bottom)) {
        for extra in spines_to(s.result(), ty) {
            if depth > 0 || (s.arity() == 0 && extra.is_empty()) {
                heads.push(Head::Sym(s.clone(), extra));
            }
        }
    }
    match heads.choose(rng).expect("a free variable is always possible") {
        Head::Free => Term::var(pool_var(ty, rng.gen_range(0..2))),
        Head::Lambda => {
            let Type::Arrow(d, c) = ty else { unreachable!() };
            ctx.push((**d).clone());
            let body = go(sig, c, ctx, depth, rng);
            ctx.pop();
            Term::abs_raw("x", (**d).clone(), body)
        }
        Head::Bound(level, extra) => {
            let index = (ctx.len() - 1 - level) as u32;
            let head = Term::bound(index, ctx[*level].clone());
            let args: Vec<Term> = extra.iter().map(|t| go(sig, t, ctx, depth - 1, rng)).collect();
            Term::apps(head, args).expect("typed by construction")
        }
        Head::Sym(s, extra) => {
            let own: Vec<Term> = s.arg_types().iter().map(|t| go(sig, t, ctx, depth.saturating_sub(1), rng)).collect();
            let rest: Vec<Term> = extra.iter().map(|t| go(sig, t, ctx, depth.saturating_sub(1), rng)).collect();
            let head = Term::fun(s.clone(), own).expect("typed by construction");
            Term::apps(head, rest).expect("typed by construction")
        }
    }
}

/// Every type that occurs as a symbol argument or result, arrows included.
pub fn interesting_types(sig: &Signature) -> Vec<Type> {
    let mut out: Vec<Type> = Vec::new();
    for s in sig.symbols().filter(|s| !matches!(s.kind(), SymbolKind::Bottom)) {
        for t in s.arg_types().iter().chain(std::iter::once(s.result())) {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// Rule indices (1-based) expected to fail the schema, per fixture.
pub fn expected_rejections(name: &str) -> Vec<usize> {
    match name {
        "division" => vec![6],
        _ => Vec::new(),
    }
}

/// Outcome of the erasure and reduct-set lemma checks.
#[derive(Default)]
pub struct LemmaReport {
    /// (term, focus type) pairs examined.
    pub checked: usize,
    pub violations: Vec<String>,
    /// Reduct sets larger than the fuel: the inclusion cannot be decided.
    pub undecided: Vec<String>,
}

/// Checks the erasure and reduct-set lemmas on closed terms up to `max_weight`,
/// for every inductive focus type. `fuel` bounds each reduct set.
pub fn interpretation_lemmas(d: &Document, max_weight: usize, fuel: usize) -> LemmaReport {
    use idts::interp::{co_s_step, erase, is_positive_occurrence, s_positive_subterms, s_reducts, s_step};
    use std::collections::HashSet;

    let rs = &d.system;
    let sig = d.signature();
    let focus: Vec<String> = sig.inductive_names().map(|n| n.to_string()).collect();
    let mut out = LemmaReport::default();
    for u in closed_terms(sig, max_weight) {
        for s in &focus {
            out.checked += 1;
            let eu = erase(&u, s);
            if eu.ty() != u.ty() {
                out.violations.push(format!("erase({u}, {s}) changes type"));
            }
            for (p, v) in s_positive_subterms(&u, s) {
                if p.is_root() {
                    continue;
                }
                if eu.subterm_raw(&p) != Some(&erase(&v, s)) || !is_positive_occurrence(&eu, &p, s) {
                    out.violations.push(format!("erase({u}, {s}) loses the positive subterm at {p}"));
                }
            }
            for (p, v) in co_s_step(rs, &u, s) {
                if erase(&v, s) != eu {
                    out.violations.push(format!("co-step at {p} of {u} changes the erasure for {s}"));
                }
            }
            let steps = s_step(rs, &u, s);
            if steps.is_empty() {
                continue;
            }
            let Ok(ru) = s_reducts(rs, &u, s, fuel) else {
                out.undecided.push(format!("{u} for {s}"));
                continue;
            };
            let ru: HashSet<Term> = ru.into_iter().collect();
            for (p, v) in steps {
                // A larger set than u's already breaks the inclusion.
                let included = s_reducts(rs, &v, s, fuel).is_ok_and(|rv| rv.iter().all(|t| ru.contains(t)));
                if !included {
                    out.violations.push(format!("reducts shrink along the {s}-step at {p} of {u}"));
                }
            }
        }
    }
    out
}

/// Dershowitz-Manna on naturals: differ, and every extra element on the right
/// is dominated by an extra element on the left.
pub fn reference_multiset(m: &[u8], n: &[u8]) -> bool {
    let mut count = [0i32; 256];
    for &x in m {
        count[x as usize] += 1;
    }
    for &y in n {
        count[y as usize] -= 1;
    }
    let left: Vec<usize> = (0..256).filter(|&k| count[k] > 0).collect();
    let right: Vec<usize> = (0..256).filter(|&k| count[k] < 0).collect();
    if left.is_empty() && right.is_empty() {
        return false;
    }
    right.iter().all(|&y| left.iter().any(|&x| x > y))
}

/// Groups compared in order; the first unequal group decides.
pub fn reference_status(status: &Status, l: &[u8], r: &[u8]) -> bool {
    for g in &status.groups {
        let mut a: Vec<u8> = g.iter().map(|&i| l[i - 1]).collect();
        let mut b: Vec<u8> = g.iter().map(|&i| r[i - 1]).collect();
        a.sort();
        b.sort();
        if a != b {
            return reference_multiset(&a, &b);
        }
    }
    false
}
