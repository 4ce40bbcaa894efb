//! Independent checker for closure derivations.
//!
//! Shares no code with the search: every node is re-validated directly
//! against the clause definitions.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{AccPath, AccStep, ArgWitness, Derivation, DerivationNode, GroupEvidence};
use crate::signature::Signature;
use crate::term::{Position, Symbol, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {clause} node for {term}: {message}")]
pub struct ReplayError {
    pub clause: String,
    pub term: String,
    pub message: String,
}

struct Ctx<'a> {
    sig: &'a Signature,
    head: &'a Symbol,
    lhs: &'a [Term],
}

/// Re-validates `d` as a derivation of `d.term ∈ CC_head(lhs)`.
pub fn replay(d: &Derivation, sig: &Signature, head: &Symbol, lhs: &[Term]) -> Result<(), ReplayError> {
    Ctx { sig, head, lhs }.check(d)
}

impl Ctx<'_> {
    fn err(&self, d: &Derivation, message: impl Into<String>) -> ReplayError {
        ReplayError {
            clause: d.label(),
            term: d.term.to_string(),
            message: message.into(),
        }
    }

    fn check(&self, d: &Derivation) -> Result<(), ReplayError> {
        let t = &d.term;
        match &d.node {
            DerivationNode::Var => {
                if t.as_var().is_none() {
                    return Err(self.err(d, "not a variable"));
                }
            }
            DerivationNode::Accessible { path } => {
                let reached = self.follow(path).map_err(|m| self.err(d, m))?;
                if reached != *t {
                    return Err(self.err(d, format!("path reaches {reached}")));
                }
            }
            DerivationNode::App { func, arg } => {
                let TermKind::App(u, v) = t.kind() else {
                    return Err(self.err(d, "not an application"));
                };
                if func.term != *u || arg.term != *v {
                    return Err(self.err(d, "children do not match the application"));
                }
                self.check(func)?;
                self.check(arg)?;
            }
            DerivationNode::Abs { var, body } => {
                let TermKind::Abs { domain, .. } = t.kind() else {
                    return Err(self.err(d, "not an abstraction"));
                };
                if *domain != var.ty || t.has_free_var(var) {
                    return Err(self.err(d, format!("{var} cannot open this binder")));
                }
                if t.open_with(var).as_ref() != Some(&body.term) {
                    return Err(self.err(d, "body does not match the opened abstraction"));
                }
                self.check(body)?;
            }
            DerivationNode::Smaller { symbol, args } => {
                self.check_fun(d, symbol, args)?;
                if !self.sig.precedence().greater(self.head.name(), symbol.name()) {
                    return Err(self.err(d, format!("{symbol} is not below {}", self.head)));
                }
            }
            DerivationNode::Recursive { symbol, args, evidence } => {
                self.check_fun(d, symbol, args)?;
                if !self.sig.precedence().equiv(self.head.name(), symbol.name()) {
                    return Err(self.err(d, format!("{symbol} is not equivalent to {}", self.head)));
                }
                let status = self.sig.status(self.head).ok_or_else(|| self.err(d, "head has no status"))?;
                if evidence.status != status {
                    return Err(self.err(d, "evidence uses another status"));
                }
                let TermKind::Fun(_, us) = t.kind() else { unreachable!() };
                let n = evidence.groups.len();
                if n == 0 || n > status.groups.len() {
                    return Err(self.err(d, "wrong number of compared groups"));
                }
                for (k, (ev, group)) in evidence.groups.iter().zip(&status.groups).enumerate() {
                    let group: BTreeSet<usize> = group.iter().copied().collect();
                    match ev {
                        GroupEvidence::Equal { pairs } => {
                            if k + 1 == n {
                                return Err(self.err(d, "no strictly decreasing group"));
                            }
                            self.check_pairs(d, pairs, us, &group, &group)?;
                        }
                        GroupEvidence::Greater {
                            common,
                            remaining_lhs,
                            dominated,
                        } => {
                            if k + 1 != n {
                                return Err(self.err(d, "decreasing group is not the last one compared"));
                            }
                            if remaining_lhs.is_empty() {
                                return Err(self.err(d, "nothing left on the left after removing common elements"));
                            }
                            let lset: BTreeSet<usize> = common.iter().map(|p| p.0).chain(remaining_lhs.iter().copied()).collect();
                            let rset: BTreeSet<usize> = common.iter().map(|p| p.1).chain(dominated.iter().map(|x| x.1)).collect();
                            if lset.len() != common.len() + remaining_lhs.len()
                                || rset.len() != common.len() + dominated.len()
                                || lset != group
                                || rset != group
                            {
                                return Err(self.err(d, "group partition is inconsistent"));
                            }
                            self.check_pairs(d, common, us, &group, &group)?;
                            for (i, j, w) in dominated {
                                if !remaining_lhs.contains(i) {
                                    return Err(self.err(d, format!("l{i} was already removed")));
                                }
                                self.check_witness(d, &self.lhs[i - 1], &us[j - 1], w)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_fun(&self, d: &Derivation, symbol: &Symbol, args: &[std::sync::Arc<Derivation>]) -> Result<(), ReplayError> {
        let TermKind::Fun(g, us) = d.term.kind() else {
            return Err(self.err(d, "not a symbol application"));
        };
        if g != symbol || us.len() != args.len() {
            return Err(self.err(d, "symbol or arity mismatch"));
        }
        for (u, a) in us.iter().zip(args) {
            if a.term != *u {
                return Err(self.err(d, "argument derivation for another term"));
            }
            self.check(a)?;
        }
        Ok(())
    }

    fn check_pairs(
        &self,
        d: &Derivation,
        pairs: &[(usize, usize)],
        us: &[Term],
        lgroup: &BTreeSet<usize>,
        rgroup: &BTreeSet<usize>,
    ) -> Result<(), ReplayError> {
        for &(i, j) in pairs {
            if !lgroup.contains(&i) || !rgroup.contains(&j) || i > self.lhs.len() || j > us.len() {
                return Err(self.err(d, format!("pair ({i}, {j}) outside the group")));
            }
            if self.lhs[i - 1] != us[j - 1] {
                return Err(self.err(d, format!("l{i} and u{j} differ")));
            }
        }
        Ok(())
    }

    fn check_witness(&self, d: &Derivation, l: &Term, u: &Term, w: &ArgWitness) -> Result<(), ReplayError> {
        let positive = |t: &Term| t.ty().as_ind().is_some_and(|n| self.sig.is_strictly_positive(n));
        match w {
            ArgWitness::Positive { position, extra_args } => {
                if !positive(l) || !positive(u) {
                    return Err(self.err(d, "positive descent on a type that is not strictly positive"));
                }
                if l.ty() != u.ty() {
                    let (a, b) = (l.ty().as_ind().unwrap(), u.ty().as_ind().unwrap());
                    if !self.sig.dependency().equiv(a, b) {
                        return Err(self.err(d, "descent between unrelated types"));
                    }
                }
                if position.is_root() {
                    return Err(self.err(d, "descent at the root"));
                }
                let mut cur = l;
                for (depth, &k) in position.0.iter().enumerate() {
                    let TermKind::Fun(c, args) = cur.kind() else {
                        return Err(self.err(d, "ancestor is not a symbol application"));
                    };
                    if depth > 0 && !c.is_constructor() {
                        return Err(self.err(d, format!("ancestor headed by {c}, not a constructor")));
                    }
                    cur = args
                        .get((k as usize).wrapping_sub(1))
                        .ok_or_else(|| self.err(d, format!("no argument {k}")))?;
                }
                let mut applied = cur.clone();
                for x in extra_args {
                    applied = Term::app(applied, x.term.clone()).map_err(|e| self.err(d, e.to_string()))?;
                }
                if applied != *u {
                    return Err(self.err(d, format!("{applied} is not {u}")));
                }
                for x in extra_args {
                    self.check(x)?;
                }
            }
            ArgWitness::Subterm { position } => {
                if positive(l) || l.ty() != u.ty() {
                    return Err(self.err(d, "subterm descent on the wrong kind of type"));
                }
                if position.is_root() {
                    return Err(self.err(d, "not a strict subterm"));
                }
                let sub = raw_subterm(l, position).ok_or_else(|| self.err(d, "invalid position"))?;
                if !sub.is_locally_closed() || sub != *u || !u.free_vars().is_subset(&l.free_vars()) {
                    return Err(self.err(d, "subterm does not match"));
                }
            }
        }
        Ok(())
    }

    fn follow(&self, path: &AccPath) -> Result<Term, String> {
        let mut steps = path.0.iter();
        let Some(AccStep::Root(i)) = steps.next() else {
            return Err("path does not start at an argument".into());
        };
        let root = self
            .lhs
            .get(i.wrapping_sub(1))
            .ok_or_else(|| format!("no argument l{i}"))?;
        let root_fv = root.free_vars();
        let mut cur = root.clone();
        let mut at_root = true;
        for s in steps {
            cur = match s {
                AccStep::Root(_) => return Err("nested root step".into()),
                AccStep::Body(x) => {
                    let TermKind::Abs { domain, .. } = cur.kind() else {
                        return Err(format!("{cur} is not an abstraction"));
                    };
                    if *domain != x.ty || cur.has_free_var(x) {
                        return Err(format!("{x} cannot open {cur}"));
                    }
                    cur.open_with(x).expect("abstraction")
                }
                AccStep::Arg(k) => match cur.kind() {
                    TermKind::Fun(c, args) if c.is_constructor() => args
                        .get(k.wrapping_sub(1))
                        .cloned()
                        .ok_or_else(|| format!("no argument {k}"))?,
                    _ => return Err(format!("{cur} is not constructor-headed")),
                },
                AccStep::Eta(x) => match cur.kind() {
                    TermKind::App(u, v) if v.as_var() == Some(x) && !u.has_free_var(x) && !root_fv.contains(x) => u.clone(),
                    _ => return Err(format!("{cur} is not (u {x}) with {x} fresh")),
                },
                AccStep::BasicSubterm(p) => {
                    if !at_root {
                        return Err("basic subterm taken below the root".into());
                    }
                    let sub = raw_subterm(&cur, p).ok_or("invalid position")?;
                    if !sub.is_locally_closed() || !self.sig.is_basic_type(sub.ty()) || !sub.free_vars().is_subset(&root_fv) {
                        return Err(format!("{sub} is not a basic subterm"));
                    }
                    sub
                }
            };
            at_root = false;
        }
        Ok(cur)
    }
}

fn raw_subterm(t: &Term, p: &Position) -> Option<Term> {
    let mut cur = t;
    for &k in &p.0 {
        let kids: Vec<&Term> = match cur.kind() {
            TermKind::Var(_) | TermKind::Bound(_) => return None,
            TermKind::Abs { body, .. } => vec![body],
            TermKind::App(a, b) => vec![a, b],
            TermKind::Fun(_, args) => args.iter().collect(),
        };
        cur = kids.get((k as usize).checked_sub(1)?)?;
    }
    Some(cur.clone())
}
