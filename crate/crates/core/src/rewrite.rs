//! Rewrite rules, matching modulo α, βη-steps and fuel-bounded normalization.
//!
//! Reduction works on raw subterms: a redex below binders keeps its loose
//! de Bruijn indices, and every contraction is index-correct, so no binder is
//! ever opened during rewriting.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::signature::Signature;
use crate::term::{instantiate, shift, Position, PositionError, Substitution, Symbol, Term, TermKind, Var};
use crate::types::{Name, Type};

pub const DEFAULT_FUEL: usize = 10_000;
pub const DEFAULT_CONDITION_FUEL: usize = 1_000;
pub const MAX_CONDITION_DEPTH: usize = 8;

// ---------------------------------------------------------------------------
// Rules

#[derive(Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    /// Pairs that must have a common reduct.
    pub condition: Vec<(Term, Term)>,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Rule {
            lhs,
            rhs,
            condition: Vec::new(),
        }
    }

    pub fn conditional(lhs: Term, rhs: Term, condition: Vec<(Term, Term)>) -> Self {
        Rule { lhs, rhs, condition }
    }

    pub fn head(&self) -> Option<&Symbol> {
        self.lhs.head_symbol()
    }

    /// The lhs arguments `l⃗`.
    pub fn lhs_args(&self) -> &[Term] {
        match self.lhs.kind() {
            TermKind::Fun(_, args) => args,
            _ => &[],
        }
    }

    pub fn is_conditional(&self) -> bool {
        !self.condition.is_empty()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --> {}", self.lhs, self.rhs)?;
        for (i, (u, v)) in self.condition.iter().enumerate() {
            write!(f, "{}{u} = {v}", if i == 0 { " if " } else { ", " })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("condition 1: the left-hand side {lhs} is not headed by a function symbol")]
    NotFunctionHeaded { lhs: String },
    #[error("condition 2: variables {vars:?} of the right-hand side do not occur in the left-hand side")]
    FreeVariables { vars: Vec<String> },
    #[error("condition 3: left-hand side has type {lhs} but right-hand side has type {rhs}")]
    TypeMismatch { lhs: Type, rhs: Type },
    #[error("condition variables {vars:?} do not occur in the left-hand side")]
    ConditionVariables { vars: Vec<String> },
    #[error("condition {left} = {right} compares terms of different types")]
    ConditionType { left: String, right: String },
    #[error("symbol {symbol} is not declared in the signature")]
    UnknownSymbol { symbol: Name },
    #[error("rule headed by constructor {symbol} (enable allow-constructor-rules)")]
    ConstructorHeaded { symbol: Name },
}

/// Rule well-formedness.
pub fn check_rule(rule: &Rule, sig: &Signature) -> Result<(), RuleError> {
    let Some(head) = rule.head() else {
        return Err(RuleError::NotFunctionHeaded {
            lhs: rule.lhs.to_string(),
        });
    };
    let mut syms = rule.lhs.symbols();
    syms.extend(rule.rhs.symbols());
    for (u, v) in &rule.condition {
        syms.extend(u.symbols());
        syms.extend(v.symbols());
    }
    for s in syms {
        if sig.symbol(s.name()).is_none() {
            return Err(RuleError::UnknownSymbol {
                symbol: s.name().clone(),
            });
        }
    }
    if head.is_constructor() && !sig.options().allow_constructor_rules {
        return Err(RuleError::ConstructorHeaded {
            symbol: head.name().clone(),
        });
    }
    let lfv = rule.lhs.free_vars();
    let escaped: Vec<String> = rule
        .rhs
        .free_vars()
        .difference(&lfv)
        .map(|v| v.to_string())
        .collect();
    if !escaped.is_empty() {
        return Err(RuleError::FreeVariables { vars: escaped });
    }
    if rule.lhs.ty() != rule.rhs.ty() {
        return Err(RuleError::TypeMismatch {
            lhs: rule.lhs.ty().clone(),
            rhs: rule.rhs.ty().clone(),
        });
    }
    for (u, v) in &rule.condition {
        if u.ty() != v.ty() {
            return Err(RuleError::ConditionType {
                left: u.to_string(),
                right: v.to_string(),
            });
        }
        let mut cfv = u.free_vars();
        cfv.extend(v.free_vars());
        let escaped: Vec<String> = cfv.difference(&lfv).map(|v| v.to_string()).collect();
        if !escaped.is_empty() {
            return Err(RuleError::ConditionVariables { vars: escaped });
        }
    }
    Ok(())
}

/// A sealed signature with its rules, indexed by head symbol.
#[derive(Clone)]
pub struct RuleSystem {
    sig: Arc<Signature>,
    rules: Vec<Rule>,
    by_head: HashMap<Name, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rule {index} ({rule}): {error}")]
pub struct RuleSystemError {
    /// 1-based.
    pub index: usize,
    pub rule: String,
    pub error: RuleError,
}

impl RuleSystem {
    pub fn new(sig: Arc<Signature>, rules: Vec<Rule>) -> Result<Self, RuleSystemError> {
        for (i, r) in rules.iter().enumerate() {
            check_rule(r, &sig).map_err(|error| RuleSystemError {
                index: i + 1,
                rule: r.to_string(),
                error,
            })?;
        }
        Ok(Self::new_unchecked(sig, rules))
    }

    /// Skips well-formedness; for negative controls only.
    pub fn new_unchecked(sig: Arc<Signature>, rules: Vec<Rule>) -> Self {
        let mut by_head: HashMap<Name, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if let Some(h) = r.head() {
                by_head.entry(h.name().clone()).or_default().push(i);
            }
        }
        RuleSystem { sig, rules, by_head }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// `R_f`, as indices into [`Self::rules`].
    pub fn rules_for(&self, f: &str) -> &[usize] {
        self.by_head.get(f).map_or(&[], Vec::as_slice)
    }
}

// ---------------------------------------------------------------------------
// Matching

/// Syntactic matching modulo α. Repeated pattern variables must bind α-equal terms.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut binding = BTreeMap::new();
    if match_rec(pattern, subject, 0, &mut binding) {
        let mut theta = Substitution::new();
        for (x, v) in binding {
            theta.insert(x, v).ok()?;
        }
        Some(theta)
    } else {
        None
    }
}

fn match_rec(p: &Term, s: &Term, depth: u32, binding: &mut BTreeMap<Var, Term>) -> bool {
    if p.ty() != s.ty() {
        return false;
    }
    match (p.kind(), s.kind()) {
        (TermKind::Var(x), _) => {
            if depth > 0 && has_loose_below(s, depth) {
                return false;
            }
            let value = shift(s, -(depth as i64), 0);
            match binding.get(x) {
                Some(prev) => *prev == value,
                None => {
                    binding.insert(x.clone(), value);
                    true
                }
            }
        }
        (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
        (TermKind::Abs { domain: d1, body: b1, .. }, TermKind::Abs { domain: d2, body: b2, .. }) => {
            d1 == d2 && match_rec(b1, b2, depth + 1, binding)
        }
        (TermKind::App(f1, a1), TermKind::App(f2, a2)) => {
            match_rec(f1, f2, depth, binding) && match_rec(a1, a2, depth, binding)
        }
        (TermKind::Fun(f, xs), TermKind::Fun(g, ys)) => {
            f == g && xs.iter().zip(ys).all(|(x, y)| match_rec(x, y, depth, binding))
        }
        _ => false,
    }
}

/// Some loose index `< depth` occurs in `t`.
fn has_loose_below(t: &Term, depth: u32) -> bool {
    fn go(t: &Term, depth: u32, under: u32) -> bool {
        if t.loose_bound() <= under {
            return false;
        }
        match t.kind() {
            TermKind::Bound(i) => *i >= under && *i < under + depth,
            _ => t.children().into_iter().any(|c| {
                let extra = matches!(t.kind(), TermKind::Abs { .. }) as u32;
                go(c, depth, under + extra)
            }),
        }
    }
    go(t, depth, 0)
}

/// Loose index `i` occurs in `t`.
pub fn occurs_loose(t: &Term, i: u32) -> bool {
    if t.loose_bound() <= i {
        return false;
    }
    match t.kind() {
        TermKind::Bound(j) => *j == i,
        TermKind::Abs { body, .. } => occurs_loose(body, i + 1),
        _ => t.children().into_iter().any(|c| occurs_loose(c, i)),
    }
}

// ---------------------------------------------------------------------------
// Steps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    /// 0-based index into the rule list.
    Rule(usize),
    Beta,
    Eta,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Rule(i) => write!(f, "rule {}", i + 1),
            StepKind::Beta => write!(f, "beta"),
            StepKind::Eta => write!(f, "eta"),
        }
    }
}

impl Serialize for StepKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("not a {kind} redex at {position}")]
    NotARedex { kind: StepKind, position: Position },
    #[error(transparent)]
    Position(#[from] PositionError),
}

/// `(λx.u v) → u{x↦v}` at `u|_p`.
pub fn beta_step(u: &Term, p: &Position) -> Result<Term, RewriteError> {
    step_at(u, p, StepKind::Beta, contract_beta)
}

/// `λx.(u x) → u` at `u|_p`, when `x ∉ FV(u)`.
pub fn eta_step(u: &Term, p: &Position) -> Result<Term, RewriteError> {
    step_at(u, p, StepKind::Eta, contract_eta)
}

fn step_at(u: &Term, p: &Position, kind: StepKind, contract: fn(&Term) -> Option<Term>) -> Result<Term, RewriteError> {
    let sub = u.subterm_raw(p).ok_or_else(|| PositionError {
        position: p.clone(),
        term: u.to_string(),
    })?;
    let c = contract(sub).ok_or(RewriteError::NotARedex {
        kind,
        position: p.clone(),
    })?;
    Ok(u.replace_at(p, c).expect("contraction preserves the type"))
}

fn contract_beta(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::App(f, a) => match f.kind() {
            TermKind::Abs { body, .. } => Some(instantiate(body, a)),
            _ => None,
        },
        _ => None,
    }
}

fn contract_eta(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::Abs { body, .. } => match body.kind() {
            TermKind::App(f, a) if matches!(a.kind(), TermKind::Bound(0)) && !occurs_loose(f, 0) => {
                Some(shift(f, -1, 0))
            }
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionOutcome {
    Unconditional,
    Joined,
    /// Joinability could not be decided within the condition budget.
    FuelExhausted,
}

/// One single-step reduct of a term.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub position: Position,
    pub kind: StepKind,
    /// `None` when the rule's condition ran out of fuel.
    pub result: Option<Term>,
    pub condition: ConditionOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Outermost,
    Innermost,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "outermost" => Ok(Strategy::Outermost),
            "innermost" => Ok(Strategy::Innermost),
            _ => Err(format!("unknown strategy {s}")),
        }
    }
}

/// Local contraction at the root of a raw term.
enum Contraction {
    Done(Term),
    Blocked,
}

impl RuleSystem {
    /// Contractions of `t` at its root, in the fixed order rules, β, η.
    fn root_contractions(&self, t: &Term, cond_depth: usize, first_only: bool) -> Vec<(StepKind, Contraction)> {
        let mut out = Vec::new();
        match t.kind() {
            TermKind::Fun(f, _) => {
                for &i in self.rules_for(f.name()) {
                    let rule = &self.rules[i];
                    let Some(theta) = match_term(&rule.lhs, t) else { continue };
                    let Some(outcome) = self.check_condition(rule, &theta, cond_depth) else { continue };
                    match outcome {
                        ConditionOutcome::Unconditional | ConditionOutcome::Joined => {
                            out.push((StepKind::Rule(i), Contraction::Done(theta.apply(&rule.rhs))));
                            if first_only {
                                return out;
                            }
                        }
                        ConditionOutcome::FuelExhausted => out.push((StepKind::Rule(i), Contraction::Blocked)),
                    }
                }
            }
            TermKind::App(..) => {
                if let Some(c) = contract_beta(t) {
                    out.push((StepKind::Beta, Contraction::Done(c)));
                }
            }
            TermKind::Abs { .. } => {
                if let Some(c) = contract_eta(t) {
                    out.push((StepKind::Eta, Contraction::Done(c)));
                }
            }
            _ => {}
        }
        out
    }

    /// `None` when some condition pair has distinct normal forms.
    fn check_condition(&self, rule: &Rule, theta: &Substitution, depth: usize) -> Option<ConditionOutcome> {
        if rule.condition.is_empty() {
            return Some(ConditionOutcome::Unconditional);
        }
        match self.conditions_join(rule, theta, depth) {
            Some(true) => Some(ConditionOutcome::Joined),
            Some(false) => None,
            None => Some(ConditionOutcome::FuelExhausted),
        }
    }

    /// `Some(joinable)` or `None` when out of budget.
    fn conditions_join(&self, rule: &Rule, theta: &Substitution, depth: usize) -> Option<bool> {
        if depth >= MAX_CONDITION_DEPTH {
            return None;
        }
        let opts = NormalizeOptions {
            fuel: DEFAULT_CONDITION_FUEL,
            record_trace: false,
            ..NormalizeOptions::default()
        };
        for (u, v) in &rule.condition {
            let a = self.normalize_at_depth(&theta.apply(u), &opts, depth + 1).ok()?;
            let b = self.normalize_at_depth(&theta.apply(v), &opts, depth + 1).ok()?;
            if a.normal_form != b.normal_form {
                return Some(false);
            }
        }
        Some(true)
    }

    /// All single-step reducts, leftmost-outermost, rules before β before η.
    pub fn rewrite_candidates(&self, u: &Term) -> Vec<Candidate> {
        let mut out = Vec::new();
        for p in u.positions() {
            let sub = u.subterm_raw(&p).expect("position from the term");
            for (kind, c) in self.root_contractions(sub, 0, false) {
                let (result, condition) = match c {
                    Contraction::Done(c) => {
                        let cond = match kind {
                            StepKind::Rule(i) if self.rules[i].is_conditional() => ConditionOutcome::Joined,
                            _ => ConditionOutcome::Unconditional,
                        };
                        match u.replace_at(&p, c) {
                            Ok(r) => (Some(r), cond),
                            Err(_) => continue,
                        }
                    }
                    Contraction::Blocked => (None, ConditionOutcome::FuelExhausted),
                };
                out.push(Candidate {
                    position: p.clone(),
                    kind,
                    result,
                    condition,
                });
            }
        }
        out
    }

    /// Raw contractions at every position, without splicing; `(position, kind, redex, contractum)`.
    pub fn raw_contractions(&self, u: &Term) -> Vec<(Position, StepKind, Term, Term)> {
        let mut out = Vec::new();
        for p in u.positions() {
            let sub = u.subterm_raw(&p).expect("position from the term");
            for (kind, c) in self.root_contractions(sub, 0, false) {
                if let Contraction::Done(c) = c {
                    out.push((p.clone(), kind, sub.clone(), c));
                }
            }
        }
        out
    }

    /// The step the strategy would take, as `(position, kind, new term)`.
    pub fn first_step(&self, u: &Term, strategy: Strategy) -> Option<(Position, StepKind, Term)> {
        self.first_step_at_depth(u, strategy, 0)
    }

    fn first_step_at_depth(&self, u: &Term, strategy: Strategy, depth: usize) -> Option<(Position, StepKind, Term)> {
        let mut path = Vec::new();
        let (kind, t) = self.find_step(u, strategy, depth, &mut path)?;
        Some((Position(path), kind, t))
    }

    fn find_step(&self, t: &Term, strategy: Strategy, depth: usize, path: &mut Vec<u32>) -> Option<(StepKind, Term)> {
        let here = |this: &Self| {
            this.root_contractions(t, depth, true)
                .into_iter()
                .find_map(|(k, c)| match c {
                    Contraction::Done(c) => Some((k, c)),
                    Contraction::Blocked => None,
                })
        };
        if strategy == Strategy::Outermost {
            if let Some(r) = here(self) {
                return Some(r);
            }
        }
        let children = t.children();
        for (i, c) in children.iter().enumerate() {
            path.push(i as u32 + 1);
            if let Some((k, newc)) = self.find_step(c, strategy, depth, path) {
                let mut kids: Vec<Term> = children.iter().map(|&c| c.clone()).collect();
                kids[i] = newc;
                let rebuilt = t.with_children(kids).expect("contraction preserves the type");
                return Some((k, rebuilt));
            }
            path.pop();
        }
        if strategy == Strategy::Innermost {
            return here(self);
        }
        None
    }

    pub fn normalize(&self, u: &Term, opts: &NormalizeOptions) -> Result<Normalized, FuelExhausted> {
        self.normalize_at_depth(u, opts, 0)
    }

    fn normalize_at_depth(&self, u: &Term, opts: &NormalizeOptions, depth: usize) -> Result<Normalized, FuelExhausted> {
        let mut trace = ReductionTrace {
            initial: u.clone(),
            steps: Vec::new(),
        };
        let mut cur = u.clone();
        let mut count = 0;
        loop {
            let Some((position, kind, next)) = self.first_step_at_depth(&cur, opts.strategy, depth) else {
                return Ok(Normalized {
                    normal_form: cur,
                    steps: count,
                    trace,
                });
            };
            if count >= opts.fuel {
                return Err(FuelExhausted {
                    fuel: opts.fuel,
                    last: cur,
                    trace,
                });
            }
            count += 1;
            if opts.record_trace {
                trace.steps.push(TraceStep {
                    position,
                    kind,
                    term: next.clone(),
                });
            }
            cur = next;
        }
    }

    /// Explores all reducts up to `depth` steps, checking that types never change.
    pub fn subject_reduction_probe(&self, u: &Term, depth: usize) -> Result<usize, SubjectReductionViolation> {
        let mut seen: HashSet<Term> = HashSet::new();
        let mut queue = VecDeque::from([(u.clone(), 0usize)]);
        seen.insert(u.clone());
        let mut explored = 0;
        while let Some((t, d)) = queue.pop_front() {
            explored += 1;
            if d == depth {
                continue;
            }
            for (position, kind, redex, contractum) in self.raw_contractions(&t) {
                if contractum.ty() != redex.ty() {
                    return Err(SubjectReductionViolation {
                        term: t.to_string(),
                        position,
                        kind,
                        before: redex.ty().clone(),
                        after: contractum.ty().clone(),
                    });
                }
                let next = t.replace_at(&position, contractum).expect("types checked above");
                if next.ty() != u.ty() {
                    return Err(SubjectReductionViolation {
                        term: t.to_string(),
                        position: Position::root(),
                        kind,
                        before: u.ty().clone(),
                        after: next.ty().clone(),
                    });
                }
                if seen.insert(next.clone()) {
                    queue.push_back((next, d + 1));
                }
            }
        }
        Ok(explored)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("step {kind} at {position} of {term} changes type {before} into {after}")]
pub struct SubjectReductionViolation {
    pub term: String,
    pub position: Position,
    pub kind: StepKind,
    pub before: Type,
    pub after: Type,
}

// ---------------------------------------------------------------------------
// Normalization

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    pub fuel: usize,
    pub strategy: Strategy,
    pub record_trace: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            fuel: DEFAULT_FUEL,
            strategy: Strategy::Outermost,
            record_trace: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub position: Position,
    pub kind: StepKind,
    pub term: Term,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionTrace {
    pub initial: Term,
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    /// Re-executes every step from the initial term.
    pub fn replay(&self, rs: &RuleSystem) -> bool {
        let mut cur = self.initial.clone();
        for s in &self.steps {
            let Some(sub) = cur.subterm_raw(&s.position) else { return false };
            let found = rs.root_contractions(sub, 0, false).into_iter().find_map(|(k, c)| match c {
                Contraction::Done(c) if k == s.kind => Some(c),
                _ => None,
            });
            let Some(c) = found else { return false };
            match cur.replace_at(&s.position, c) {
                Ok(next) if next == s.term => cur = next,
                _ => return false,
            }
        }
        true
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in self.steps.iter().enumerate() {
            writeln!(f, "step {}: {} @ {} ⇒ {}", n + 1, s.kind, s.position, s.term)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Normalized {
    pub normal_form: Term,
    pub steps: usize,
    pub trace: ReductionTrace,
}

#[derive(Debug, Clone, Error, Serialize)]
#[error("fuel exhausted after {fuel} steps at {last}")]
pub struct FuelExhausted {
    pub fuel: usize,
    pub last: Term,
    pub trace: ReductionTrace,
}

/// Convenience wrapper over [`RuleSystem::normalize`].
pub fn normalize(rs: &RuleSystem, u: &Term, fuel: usize, strategy: Strategy) -> Result<Normalized, FuelExhausted> {
    rs.normalize(
        u,
        &NormalizeOptions {
            fuel,
            strategy,
            record_trace: true,
        },
    )
}
