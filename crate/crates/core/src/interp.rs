//! Positive subterms, positive and co-positive reductions, reduct sets and
//! the erasing function, for a focus inductive type `s`.
//!
//! A term is `s`-positive when `s` occurs in its type, and only positively.
//! An occurrence is `s`-positive when it and all its ancestors are.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::rewrite::{Candidate, RuleSystem};
use crate::signature::BOTTOM_PREFIX;
use crate::term::{Position, Symbol, SymbolKind, Term, TermKind};
use crate::transforms::mangle;
use crate::types::{occurs_positively, Type};

pub fn s_positive(u: &Term, s: &str) -> bool {
    occurs_positively(s, u.ty())
}

/// Every prefix of `p`, `p` included, addresses an `s`-positive subterm.
pub fn is_positive_occurrence(u: &Term, p: &Position, s: &str) -> bool {
    let mut cur = u;
    if !s_positive(cur, s) {
        return false;
    }
    for &k in &p.0 {
        let kids = cur.children();
        let Some(next) = kids.get((k as usize).wrapping_sub(1)) else {
            return false;
        };
        cur = next;
        if !s_positive(cur, s) {
            return false;
        }
    }
    true
}

/// The `s`-positive subterm occurrences of `u`, pre-order. Subterms are raw.
pub fn s_positive_subterms(u: &Term, s: &str) -> Vec<(Position, Term)> {
    fn go(t: &Term, s: &str, path: &mut Vec<u32>, out: &mut Vec<(Position, Term)>) {
        if !s_positive(t, s) {
            return;
        }
        out.push((Position(path.clone()), t.clone()));
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i as u32 + 1);
            go(c, s, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(u, s, &mut Vec::new(), &mut out);
    out
}

/// The reserved constant `⊥_t`.
pub fn bottom(t: &Type) -> Term {
    let name = format!("{BOTTOM_PREFIX}_{}", mangle(t));
    Term::constant(Symbol::new(name, vec![], t.clone(), SymbolKind::Bottom)).expect("arity 0")
}

/// Collapses every maximal non-`s`-positive subterm to `⊥` of its type.
pub fn erase(u: &Term, s: &str) -> Term {
    if !s_positive(u, s) {
        return bottom(u.ty());
    }
    match u.kind() {
        TermKind::Var(_) | TermKind::Bound(_) => u.clone(),
        _ => {
            let kids = u.children().into_iter().map(|c| erase(c, s)).collect();
            u.with_children(kids).expect("erasure preserves types")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("reduct saturation exceeded {fuel} terms")]
pub struct ReductsExhausted {
    pub fuel: usize,
}

fn split_candidates(rs: &RuleSystem, u: &Term, s: &str, positive: bool) -> Vec<(Position, Term)> {
    rs.rewrite_candidates(u)
        .into_iter()
        .filter_map(|Candidate { position, result, .. }| {
            let r = result?;
            (is_positive_occurrence(u, &position, s) == positive).then_some((position, r))
        })
        .collect()
}

/// One-step reducts at `s`-positive occurrences.
pub fn s_step(rs: &RuleSystem, u: &Term, s: &str) -> Vec<(Position, Term)> {
    split_candidates(rs, u, s, true)
}

/// One-step reducts at occurrences that are not `s`-positive.
pub fn co_s_step(rs: &RuleSystem, u: &Term, s: &str) -> Vec<(Position, Term)> {
    split_candidates(rs, u, s, false)
}

/// The least set containing `u` and closed under `s`-steps, in discovery order.
/// `fuel` bounds the number of distinct terms.
pub fn s_reducts(rs: &RuleSystem, u: &Term, s: &str, fuel: usize) -> Result<Vec<Term>, ReductsExhausted> {
    let mut seen: HashSet<Term> = HashSet::from([u.clone()]);
    let mut order = vec![u.clone()];
    let mut queue = VecDeque::from([u.clone()]);
    while let Some(t) = queue.pop_front() {
        for (_, r) in s_step(rs, &t, s) {
            if seen.insert(r.clone()) {
                if order.len() >= fuel {
                    return Err(ReductsExhausted { fuel });
                }
                order.push(r.clone());
                queue.push_back(r);
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Document;

    fn doc() -> Document {
        Document::parse(
            "inductive nat = z : nat | s : nat -> nat .\n\
             inductive ord = o : ord | succ : ord -> ord | lim : (nat -> ord) -> ord .\n\
             inductive wrap = w : nat -> ord -> wrap .\n\
             symbol plus : nat -> nat -> nat arity 2 .\n\
             symbol add : ord -> ord -> ord arity 2 .\n\
             precedence add > plus .\n\
             rule plus(X, z) --> X .\n\
             rule plus(X, s(Y)) --> s(plus(X, Y)) .\n\
             rule add(X, o) --> X .\n\
             rule add(X, succ(Y)) --> succ(add(X, Y)) .\n\
             rule add(X, lim(F)) --> lim(\\n:nat. add(X, F n)) .\n",
        )
        .unwrap()
    }

    #[test]
    fn positivity_of_terms() {
        let d = doc();
        let x = Term::var(crate::term::Var::new("X", Type::ind("ord")));
        assert!(s_positive(&x, "ord"));
        assert!(s_positive(&d.term("lim(F)").unwrap(), "ord"));
        let f = d.term("lim(F)").unwrap();
        let TermKind::Fun(_, args) = f.kind() else { panic!() };
        assert!(s_positive(&args[0], "ord"));
        assert!(!s_positive(&d.term("z").unwrap(), "ord"));
    }

    #[test]
    fn positive_subterm_of_sum() {
        let d = doc();
        let u = d.term("add(X, lim(F))").unwrap();
        let subs = s_positive_subterms(&u, "ord");
        assert!(subs.iter().any(|(p, t)| p.to_string() == "2" && *t == d.term("lim(F)").unwrap()));
        assert_eq!(erase(&u, "ord"), u);
    }

    #[test]
    fn erasure_collapses_other_types() {
        let d = doc();
        let u = d.term("w(plus(z, z), add(o, o))").unwrap();
        assert_eq!(erase(&d.term("plus(z, z)").unwrap(), "ord").to_string(), "⊥_nat");
        assert_eq!(erase(&u, "ord").to_string(), "⊥_wrap");
        let v = d.term("lim(\\n:nat. add(o, o))").unwrap();
        assert_eq!(erase(&v, "ord"), v);
    }

    #[test]
    fn reducts_of_sum() {
        let d = doc();
        let u = d.term("plus(z, z)").unwrap();
        let r = s_reducts(&d.system, &u, "nat", 100).unwrap();
        assert_eq!(r, vec![u.clone(), d.term("z").unwrap()]);
        let nf = d.term("s(z)").unwrap();
        assert_eq!(s_reducts(&d.system, &nf, "nat", 100).unwrap(), vec![nf]);
    }

    #[test]
    fn buried_redex_is_co_positive() {
        let d = doc();
        let u = d.term("w(plus(z, z), o)").unwrap();
        assert!(s_step(&d.system, &u, "ord").is_empty());
        let co = co_s_step(&d.system, &u, "ord");
        assert_eq!(co.len(), 1);
        assert_eq!(erase(&u, "ord"), erase(&co[0].1, "ord"));
    }

    #[test]
    fn non_terminating_saturation_runs_out() {
        let d = Document::parse(
            "inductive nat = z : nat | s : nat -> nat .\nsymbol f : nat -> nat arity 1 .\nrule f(X) --> f(s(X)) .",
        )
        .unwrap();
        let u = d.term("f(z)").unwrap();
        assert_eq!(s_reducts(&d.system, &u, "nat", 100), Err(ReductsExhausted { fuel: 100 }));
    }
}
