//! Exhaustive generation of closed, well-typed terms by size.
//!
//! Size counts symbol and variable occurrences; abstraction and application
//! nodes are free. Every leaf is counted, so each size class is finite.

use std::collections::HashMap;
use std::sync::Arc;

use crate::signature::Signature;
use crate::term::{SymbolKind, Term, TermKind};
use crate::types::Type;

/// Symbol plus variable occurrences.
pub fn weight(t: &Term) -> usize {
    match t.kind() {
        TermKind::Var(_) | TermKind::Bound(_) => 1,
        TermKind::Abs { body, .. } => weight(body),
        TermKind::App(a, b) => weight(a) + weight(b),
        TermKind::Fun(_, args) => 1 + args.iter().map(weight).sum::<usize>(),
    }
}

type Key = (Type, Vec<Type>, usize);

/// Memoizing generator over one signature.
pub struct Enumerator<'a> {
    sig: &'a Signature,
    memo: HashMap<Key, Arc<Vec<Term>>>,
}

/// Argument types `B1…Bk` with `t = B1 -> … -> Bk -> goal`, for every such `k`.
fn spines_to(t: &Type, goal: &Type) -> Vec<Vec<Type>> {
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

impl<'a> Enumerator<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Enumerator {
            sig,
            memo: HashMap::new(),
        }
    }

    /// Closed terms of type `ty` and weight exactly `n`.
    pub fn exact(&mut self, ty: &Type, n: usize) -> Arc<Vec<Term>> {
        self.gen(ty, &[], n)
    }

    /// Closed terms of type `ty` and weight `1..=max`, smallest first.
    pub fn up_to(&mut self, ty: &Type, max: usize) -> Vec<Term> {
        (1..=max).flat_map(|n| self.exact(ty, n).as_ref().clone()).collect()
    }

    fn gen(&mut self, ty: &Type, ctx: &[Type], n: usize) -> Arc<Vec<Term>> {
        let key = (ty.clone(), ctx.to_vec(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n > 0 {
            if let Type::Arrow(d, c) = ty {
                let mut inner = ctx.to_vec();
                inner.push((**d).clone());
                for body in self.gen(c, &inner, n).iter() {
                    out.push(Term::abs_raw("x", (**d).clone(), body.clone()));
                }
            }
            let symbols: Vec<_> = self
                .sig
                .symbols()
                .filter(|s| !matches!(s.kind(), SymbolKind::Bottom))
                .cloned()
                .collect();
            for sym in symbols {
                for extra in spines_to(sym.result(), ty) {
                    let mut types = sym.arg_types().to_vec();
                    let k = types.len();
                    types.extend(extra);
                    for args in self.splits(&types, ctx, n - 1) {
                        let (own, rest) = args.split_at(k);
                        let head = Term::fun(sym.clone(), own.to_vec()).expect("typed by construction");
                        out.push(Term::apps(head, rest.iter().cloned()).expect("typed by construction"));
                    }
                }
            }
            for (level, h) in ctx.iter().enumerate() {
                let index = (ctx.len() - 1 - level) as u32;
                for extra in spines_to(h, ty) {
                    for args in self.splits(&extra, ctx, n - 1) {
                        let head = Term::bound(index, h.clone());
                        out.push(Term::apps(head, args).expect("typed by construction"));
                    }
                }
            }
        }
        let v = Arc::new(out);
        self.memo.insert(key, v.clone());
        v
    }

    /// Tuples of terms of the given types whose weights sum to exactly `n`.
    fn splits(&mut self, types: &[Type], ctx: &[Type], n: usize) -> Vec<Vec<Term>> {
        let Some((first, rest)) = types.split_first() else {
            return if n == 0 { vec![Vec::new()] } else { Vec::new() };
        };
        let mut out = Vec::new();
        for k in 1..=n.saturating_sub(rest.len()) {
            let heads = self.gen(first, ctx, k);
            if heads.is_empty() {
                continue;
            }
            let tails = self.splits(rest, ctx, n - k);
            for h in heads.iter() {
                for t in &tails {
                    let mut v = Vec::with_capacity(types.len());
                    v.push(h.clone());
                    v.extend(t.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Document;

    #[test]
    fn naturals_have_one_term_per_size() {
        let d = Document::parse("inductive nat = z : nat | s : nat -> nat .").unwrap();
        let mut e = Enumerator::new(d.signature());
        for n in 1..=6 {
            let ts = e.exact(&Type::ind("nat"), n);
            assert_eq!(ts.len(), 1);
            assert_eq!(weight(&ts[0]), n);
        }
    }

    #[test]
    fn binary_trees_follow_catalan() {
        let d = Document::parse("inductive t = leaf : t | bin : t -> t -> t .").unwrap();
        let mut e = Enumerator::new(d.signature());
        let counts: Vec<usize> = (1..=9).map(|n| e.exact(&Type::ind("t"), n).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 0, 2, 0, 5, 0, 14]);
    }

    #[test]
    fn higher_order_arguments_are_abstractions() {
        let d = Document::parse(
            "inductive nat = z : nat | s : nat -> nat .\n\
             inductive ord = o : ord | lim : (nat -> ord) -> ord .",
        )
        .unwrap();
        let mut e = Enumerator::new(d.signature());
        let shown: Vec<String> = e.exact(&Type::ind("ord"), 2).iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, vec!["lim(\\x:nat. o)"]);
        let three: Vec<String> = e.exact(&Type::ind("ord"), 3).iter().map(|t| t.to_string()).collect();
        assert_eq!(three, vec!["lim(\\x:nat. lim(\\x':nat. o))"]);
        for t in e.up_to(&Type::ind("ord"), 6) {
            assert!(t.is_locally_closed() && t.free_vars().is_empty());
        }
    }
}
