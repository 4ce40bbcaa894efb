//! The General Schema: accessible subterms, the ordering on arguments,
//! computable-closure membership with checkable derivations, and verdicts.

mod replay;
mod status;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::rewrite::{Rule, RuleSystem};
use crate::signature::{Signature, Status};
use crate::term::{Position, Symbol, Term, TermKind, TypeError, Var};
use crate::types::Type;

pub use replay::{replay, ReplayError};
pub use status::{compare_status, multiset_greater, status_greater, GroupEvidence, StatusEvidence};

// ---------------------------------------------------------------------------
// Accessible subterms

/// One clause application while extracting an accessible subterm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AccStep {
    /// Clause 1 on the `i`-th (1-based) lhs argument.
    Root(usize),
    /// Clause 2: body of an abstraction, opened with `Var`.
    Body(Var),
    /// Clause 3: `k`-th (1-based) argument of a constructor application.
    Arg(usize),
    /// Clause 4: `(u x)` to `u`.
    Eta(Var),
    /// Clause 5: raw subterm of the root, of basic type.
    BasicSubterm(Position),
}

impl AccStep {
    pub fn clause(&self) -> u8 {
        match self {
            AccStep::Root(_) => 1,
            AccStep::Body(_) => 2,
            AccStep::Arg(_) => 3,
            AccStep::Eta(_) => 4,
            AccStep::BasicSubterm(_) => 5,
        }
    }
}

impl fmt::Display for AccStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccStep::Root(i) => write!(f, "Acc1(l{i})"),
            AccStep::Body(x) => write!(f, "Acc2({x})"),
            AccStep::Arg(k) => write!(f, "Acc3({k})"),
            AccStep::Eta(x) => write!(f, "Acc4({x})"),
            AccStep::BasicSubterm(p) => write!(f, "Acc5({p})"),
        }
    }
}

/// Clause steps from an lhs argument to an accessible term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AccPath(pub Vec<AccStep>);

impl fmt::Display for AccPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" > "))
    }
}

impl Serialize for AccPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A saturated accessibility set with one justification per member.
#[derive(Debug, Clone, Default)]
pub struct Accessible {
    entries: Vec<(Term, AccPath)>,
    index: HashMap<Term, usize>,
}

impl Accessible {
    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    pub fn path(&self, t: &Term) -> Option<&AccPath> {
        self.index.get(t).map(|&i| &self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &AccPath)> {
        self.entries.iter().map(|(t, p)| (t, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn push(&mut self, t: Term, path: AccPath) -> bool {
        if self.index.contains_key(&t) {
            return false;
        }
        self.index.insert(t.clone(), self.entries.len());
        self.entries.push((t, path));
        true
    }

    fn saturate_from(&mut self, root: &Term, i: usize, sig: &Signature) {
        let root_fv = root.free_vars();
        let start = self.entries.len();
        self.push(root.clone(), AccPath(vec![AccStep::Root(i)]));
        for p in root.positions() {
            if p.is_root() {
                continue;
            }
            let sub = root.subterm_raw(&p).expect("own position");
            if sub.is_locally_closed() && sig.is_basic_type(sub.ty()) {
                self.push(
                    sub.clone(),
                    AccPath(vec![AccStep::Root(i), AccStep::BasicSubterm(p)]),
                );
            }
        }
        let mut k = start;
        while k < self.entries.len() {
            let (t, path) = self.entries[k].clone();
            k += 1;
            match t.kind() {
                TermKind::Abs { .. } => {
                    let (x, body) = t.open().expect("abstraction");
                    let mut p = path.clone();
                    p.0.push(AccStep::Body(x));
                    self.push(body, p);
                }
                TermKind::Fun(c, args) if c.is_constructor() => {
                    for (j, a) in args.iter().enumerate() {
                        let mut p = path.clone();
                        p.0.push(AccStep::Arg(j + 1));
                        self.push(a.clone(), p);
                    }
                }
                TermKind::App(u, x) => {
                    if let Some(xv) = x.as_var() {
                        if !u.has_free_var(xv) && !root_fv.contains(xv) {
                            let mut p = path.clone();
                            p.0.push(AccStep::Eta(xv.clone()));
                            self.push(u.clone(), p);
                        }
                    }
                }
                _ => {}
            }
        }
    }
}

/// `Acc(v)`, justified from `v` as argument 1.
pub fn accessible(v: &Term, sig: &Signature) -> Accessible {
    let mut acc = Accessible::default();
    acc.saturate_from(v, 1, sig);
    acc
}

/// `Acc(l⃗) = ⋃ Acc(l_i)`.
pub fn acc_vector(lhs: &[Term], sig: &Signature) -> Accessible {
    let mut acc = Accessible::default();
    for (i, l) in lhs.iter().enumerate() {
        acc.saturate_from(l, i + 1, sig);
    }
    acc
}

// ---------------------------------------------------------------------------
// Ordering on arguments

/// How `v` sits below `u` in the ordering on arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descent {
    /// `v = (u|_p v⃗)` through constructor-headed ancestors.
    Positive { position: Position, extra_args: Vec<Term> },
    /// `v` is a strict, locally closed subterm of `u`.
    Subterm { position: Position },
}

fn positive_inductive<'a>(t: &'a Type, sig: &Signature) -> Option<&'a str> {
    t.as_ind().filter(|n| sig.is_strictly_positive(n)).map(|n| &**n)
}

/// Types comparable by the ordering: equal, or strictly positive inductives of one `=_I` class.
pub fn comparable_types(a: &Type, b: &Type, sig: &Signature) -> bool {
    if a == b {
        return true;
    }
    match (positive_inductive(a, sig), positive_inductive(b, sig)) {
        (Some(x), Some(y)) => sig.dependency().equiv(x, y),
        _ => false,
    }
}

/// Every way in which `u > v`.
pub fn descents(u: &Term, v: &Term, sig: &Signature) -> Result<Vec<Descent>, TypeError> {
    if !comparable_types(u.ty(), v.ty(), sig) {
        return Err(TypeError::new(format!(
            "cannot compare {u} : {} with {v} : {}",
            u.ty(),
            v.ty()
        )));
    }
    let mut out = Vec::new();
    if positive_inductive(u.ty(), sig).is_some() {
        // The root may be any symbol application; ancestors below it must be constructor-headed.
        if u.head_symbol().is_none() {
            return Ok(out);
        }
        let mut stack = vec![(u.clone(), Vec::<u32>::new())];
        while let Some((t, path)) = stack.pop() {
            let TermKind::Fun(_, args) = t.kind() else { continue };
            for (k, a) in args.iter().enumerate() {
                let mut p = path.clone();
                p.push(k as u32 + 1);
                let mut extra = Vec::new();
                let mut cur = v;
                loop {
                    if cur == a {
                        extra.reverse();
                        out.push(Descent::Positive {
                            position: Position(p.clone()),
                            extra_args: extra,
                        });
                        break;
                    }
                    match cur.kind() {
                        TermKind::App(f, x) => {
                            extra.push(x.clone());
                            cur = f;
                        }
                        _ => break,
                    }
                }
                if a.is_constructor_headed() {
                    stack.push((a.clone(), p));
                }
            }
        }
        out.sort_by(|a, b| match (a, b) {
            (Descent::Positive { position: p, .. }, Descent::Positive { position: q, .. }) => p.cmp(q),
            _ => std::cmp::Ordering::Equal,
        });
    } else {
        let fv = u.free_vars();
        for p in u.positions() {
            if p.is_root() {
                continue;
            }
            let sub = u.subterm_raw(&p).expect("own position");
            if sub.is_locally_closed() && sub == v && v.free_vars().is_subset(&fv) {
                out.push(Descent::Subterm { position: p });
            }
        }
    }
    Ok(out)
}

/// `u > v`.
pub fn greater_arg(u: &Term, v: &Term, sig: &Signature) -> Result<bool, TypeError> {
    Ok(!descents(u, v, sig)?.is_empty())
}

// ---------------------------------------------------------------------------
// Derivations

/// Justification of one comparison `l_i > u_j` used by clause 6.
#[derive(Debug, Clone)]
pub enum ArgWitness {
    Positive {
        position: Position,
        /// Each applied argument with its own closure derivation.
        extra_args: Vec<Arc<Derivation>>,
    },
    Subterm {
        position: Position,
    },
}

impl Serialize for ArgWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ArgWitness::Positive { position, extra_args } => {
                let mut st = s.serialize_struct("ArgWitness", 3)?;
                st.serialize_field("kind", "positive")?;
                st.serialize_field("position", position)?;
                st.serialize_field("extra_args", extra_args)?;
                st.end()
            }
            ArgWitness::Subterm { position } => {
                let mut st = s.serialize_struct("ArgWitness", 2)?;
                st.serialize_field("kind", "subterm")?;
                st.serialize_field("position", position)?;
                st.end()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum DerivationNode {
    /// CC1.
    Var,
    /// CC2.
    Accessible { path: AccPath },
    /// CC3.
    App { func: Arc<Derivation>, arg: Arc<Derivation> },
    /// CC4: the body opened with `var`.
    Abs { var: Var, body: Arc<Derivation> },
    /// CC5.
    Smaller { symbol: Symbol, args: Vec<Arc<Derivation>> },
    /// CC6.
    Recursive {
        symbol: Symbol,
        args: Vec<Arc<Derivation>>,
        evidence: StatusEvidence<ArgWitness>,
    },
}

/// Certificate that a term belongs to the computable closure.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub term: Term,
    pub node: DerivationNode,
}

impl Derivation {
    pub fn clause(&self) -> u8 {
        match &self.node {
            DerivationNode::Var => 1,
            DerivationNode::Accessible { .. } => 2,
            DerivationNode::App { .. } => 3,
            DerivationNode::Abs { .. } => 4,
            DerivationNode::Smaller { .. } => 5,
            DerivationNode::Recursive { .. } => 6,
        }
    }

    pub fn label(&self) -> String {
        match &self.node {
            DerivationNode::Smaller { symbol, .. } | DerivationNode::Recursive { symbol, .. } => {
                format!("CC{}[{}]", self.clause(), symbol.name())
            }
            _ => format!("CC{}", self.clause()),
        }
    }

    /// Direct sub-derivations, including those of clause-6 extra arguments.
    pub fn children(&self) -> Vec<&Arc<Derivation>> {
        match &self.node {
            DerivationNode::Var | DerivationNode::Accessible { .. } => Vec::new(),
            DerivationNode::App { func, arg } => vec![func, arg],
            DerivationNode::Abs { body, .. } => vec![body],
            DerivationNode::Smaller { args, .. } => args.iter().collect(),
            DerivationNode::Recursive { args, evidence, .. } => {
                let mut out: Vec<&Arc<Derivation>> = args.iter().collect();
                for g in &evidence.groups {
                    if let GroupEvidence::Greater { dominated, .. } = g {
                        for (_, _, w) in dominated {
                            if let ArgWitness::Positive { extra_args, .. } = w {
                                out.extend(extra_args.iter());
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// One-line form: `CC6[map] { args: CC2, CC2; status: lex(mul 1, mul 2): eq, mul-dec }`.
    pub fn summary(&self) -> String {
        let args = |args: &[Arc<Derivation>]| args.iter().map(|a| a.label()).collect::<Vec<_>>().join(", ");
        match &self.node {
            DerivationNode::Smaller { args: a, .. } if !a.is_empty() => {
                format!("{} {{ args: {} }}", self.label(), args(a))
            }
            DerivationNode::Recursive { args: a, evidence, .. } => {
                format!("{} {{ args: {}; status: {} }}", self.label(), args(a), evidence)
            }
            DerivationNode::App { func, arg } => format!("{} {{ {}, {} }}", self.label(), func.label(), arg.label()),
            DerivationNode::Abs { body, .. } => format!("{} {{ {} }}", self.label(), body.label()),
            _ => self.label(),
        }
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match &self.node {
            DerivationNode::Accessible { path } => writeln!(f, "{pad}{}  {}  via {path}", self.label(), self.term)?,
            DerivationNode::Abs { var, .. } => writeln!(f, "{pad}{}  {}  opened with {var}", self.label(), self.term)?,
            DerivationNode::Recursive { evidence, .. } => {
                writeln!(f, "{pad}{}  {}  status {evidence}", self.label(), self.term)?
            }
            _ => writeln!(f, "{pad}{}  {}", self.label(), self.term)?,
        }
        for c in self.children() {
            c.write_tree(f, indent + 1)?;
        }
        Ok(())
    }
}

/// Indented tree rendering.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

impl Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Derivation", 5)?;
        st.serialize_field("clause", &format!("CC{}", self.clause()))?;
        st.serialize_field("term", &self.term)?;
        match &self.node {
            DerivationNode::Var => {}
            DerivationNode::Accessible { path } => st.serialize_field("access", path)?,
            DerivationNode::App { func, arg } => st.serialize_field("children", &[func, arg])?,
            DerivationNode::Abs { var, body } => {
                st.serialize_field("var", &var.to_string())?;
                st.serialize_field("children", &[body])?;
            }
            DerivationNode::Smaller { symbol, args } => {
                st.serialize_field("symbol", &**symbol.name())?;
                st.serialize_field("children", args)?;
            }
            DerivationNode::Recursive { symbol, args, evidence } => {
                st.serialize_field("symbol", &**symbol.name())?;
                st.serialize_field("children", args)?;
                st.serialize_field("status", evidence)?;
            }
        }
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Closure search

/// Why a term is not in the closure; `cause` points to the failing part.
#[derive(Debug, Clone)]
pub struct Failure {
    pub term: Term,
    pub reasons: Vec<String>,
    pub cause: Option<Arc<Failure>>,
}

impl Failure {
    /// The innermost failure on the cause chain.
    pub fn frontier(&self) -> &Failure {
        let mut cur = self;
        while let Some(c) = &cur.cause {
            cur = c;
        }
        cur
    }
}

/// The failure frontier of a rejected rule.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnosis {
    pub term: Term,
    pub reasons: Vec<String>,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.term, self.reasons.join("; "))
    }
}

type Outcome = Result<Arc<Derivation>, Arc<Failure>>;

/// Membership in `CC_f(l⃗)` for one rule; the memo table lives as long as the search.
pub struct ClosureSearch<'a> {
    sig: &'a Signature,
    head: &'a Symbol,
    lhs: &'a [Term],
    acc: Accessible,
    memo: HashMap<Term, Outcome>,
}

impl<'a> ClosureSearch<'a> {
    pub fn new(sig: &'a Signature, head: &'a Symbol, lhs: &'a [Term]) -> Self {
        ClosureSearch {
            sig,
            head,
            lhs,
            acc: acc_vector(lhs, sig),
            memo: HashMap::new(),
        }
    }

    pub fn accessible(&self) -> &Accessible {
        &self.acc
    }

    /// Backward search over the clauses in order 1 to 6.
    pub fn derive(&mut self, t: &Term) -> Outcome {
        if let Some(o) = self.memo.get(t) {
            return o.clone();
        }
        let out = self.derive_uncached(t);
        self.memo.insert(t.clone(), out.clone());
        out
    }

    fn fail(t: &Term, reason: impl Into<String>, cause: Option<Arc<Failure>>) -> Outcome {
        Err(Arc::new(Failure {
            term: t.clone(),
            reasons: vec![reason.into()],
            cause,
        }))
    }

    fn ok(t: &Term, node: DerivationNode) -> Outcome {
        Ok(Arc::new(Derivation { term: t.clone(), node }))
    }

    fn derive_uncached(&mut self, t: &Term) -> Outcome {
        if t.as_var().is_some() {
            return Self::ok(t, DerivationNode::Var);
        }
        if let Some(path) = self.acc.path(t) {
            return Self::ok(t, DerivationNode::Accessible { path: path.clone() });
        }
        match t.kind() {
            TermKind::App(u, v) => {
                let func = self.derive(u);
                let arg = self.derive(v);
                match (func, arg) {
                    (Ok(func), Ok(arg)) => Self::ok(t, DerivationNode::App { func, arg }),
                    (Err(e), _) | (_, Err(e)) => Self::fail(t, "application with an argument outside the closure", Some(e)),
                }
            }
            TermKind::Abs { .. } => {
                let (x, body) = t.open().expect("abstraction");
                match self.derive(&body) {
                    Ok(body) => Self::ok(t, DerivationNode::Abs { var: x, body }),
                    Err(e) => Self::fail(t, "abstraction body outside the closure", Some(e)),
                }
            }
            TermKind::Fun(g, args) => self.derive_fun(t, g, args),
            TermKind::Bound(_) => Self::fail(t, "dangling bound variable", None),
            TermKind::Var(_) => unreachable!("handled by clause 1"),
        }
    }

    fn derive_args(&mut self, t: &Term, args: &[Term]) -> Result<Vec<Arc<Derivation>>, Arc<Failure>> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            match self.derive(a) {
                Ok(d) => out.push(d),
                Err(e) => {
                    return Err(Arc::new(Failure {
                        term: t.clone(),
                        reasons: vec![format!("argument {a} is outside the closure")],
                        cause: Some(e),
                    }))
                }
            }
        }
        Ok(out)
    }

    fn derive_fun(&mut self, t: &Term, g: &Symbol, args: &[Term]) -> Outcome {
        let f = self.head;
        let prec = self.sig.precedence();
        if prec.greater(f.name(), g.name()) {
            let ds = self.derive_args(t, args)?;
            return Self::ok(
                t,
                DerivationNode::Smaller {
                    symbol: g.clone(),
                    args: ds,
                },
            );
        }
        if !prec.equiv(f.name(), g.name()) {
            return Self::fail(t, format!("{g} is neither below nor equivalent to {f} in the precedence"), None);
        }
        let ds = self.derive_args(t, args)?;
        let Some(status) = self.sig.status(f) else {
            return Self::fail(t, format!("{f} has no status"), None);
        };
        if args.len() < status.arity() {
            return Self::fail(t, format!("{g} has fewer arguments than the status of {f}"), None);
        }

        // Comparison table `l_i > u_j`, keeping only witnesses whose extra arguments are in CC.
        let mut table: HashMap<(usize, usize), ArgWitness> = HashMap::new();
        let mut notes = Vec::new();
        let lhs = self.lhs;
        for (i, l) in lhs.iter().enumerate() {
            for (j, u) in args.iter().enumerate() {
                let ds = match descents(l, u, self.sig) {
                    Ok(ds) => ds,
                    Err(e) => {
                        if status_mentions(&status, i + 1, j + 1) {
                            notes.push(e.to_string());
                        }
                        continue;
                    }
                };
                for d in ds {
                    match d {
                        Descent::Subterm { position } => {
                            table.insert((i + 1, j + 1), ArgWitness::Subterm { position });
                            break;
                        }
                        Descent::Positive { position, extra_args } => {
                            let extra: Result<Vec<_>, _> = extra_args.iter().map(|x| self.derive(x)).collect();
                            if let Ok(extra_args) = extra {
                                table.insert((i + 1, j + 1), ArgWitness::Positive { position, extra_args });
                                break;
                            }
                        }
                    }
                }
            }
        }
        let idx: Vec<usize> = (1..=self.lhs.len().max(args.len())).collect();
        let evidence = compare_status(
            &status,
            &idx[..self.lhs.len()],
            &idx[..args.len()],
            |&i, &j| table.get(&(i, j)).cloned(),
            |&i, &j| self.lhs[i - 1] == args[j - 1],
        );
        match evidence {
            Some(evidence) => Self::ok(
                t,
                DerivationNode::Recursive {
                    symbol: g.clone(),
                    args: ds,
                    evidence,
                },
            ),
            None => {
                let lhs: Vec<String> = self.lhs.iter().map(|l| l.to_string()).collect();
                let rhs: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                let mut reasons = vec![format!(
                    "recursive call: ({}) is not greater than ({}) under {status}",
                    lhs.join(", "),
                    rhs.join(", ")
                )];
                reasons.extend(notes);
                Err(Arc::new(Failure {
                    term: t.clone(),
                    reasons,
                    cause: None,
                }))
            }
        }
    }
}

fn status_mentions(status: &Status, i: usize, j: usize) -> bool {
    status.groups.iter().any(|g| g.contains(&i) && g.contains(&j))
}

/// `r ∈ CC_f(l⃗)`, with a derivation or the failure frontier.
pub fn in_closure(sig: &Signature, f: &Symbol, lhs: &[Term], r: &Term) -> Result<Arc<Derivation>, Diagnosis> {
    let mut search = ClosureSearch::new(sig, f, lhs);
    search.derive(r).map_err(|e| {
        let fr = e.frontier();
        Diagnosis {
            term: fr.term.clone(),
            reasons: fr.reasons.clone(),
        }
    })
}

// ---------------------------------------------------------------------------
// Rule and system verdicts

#[derive(Debug, Clone, Serialize)]
pub struct VariableAccess {
    pub var: String,
    pub access: Option<AccPath>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    /// 1-based.
    pub index: usize,
    pub rule: Rule,
    pub accepted: bool,
    pub constructor_headed: bool,
    pub derivation: Option<Arc<Derivation>>,
    pub condition_derivations: Vec<Arc<Derivation>>,
    pub variables: Vec<VariableAccess>,
    pub diagnosis: Option<Diagnosis>,
}

impl RuleReport {
    /// Every derivation in this report, top-level ones first.
    pub fn derivations(&self) -> impl Iterator<Item = &Arc<Derivation>> {
        self.derivation.iter().chain(self.condition_derivations.iter())
    }
}

/// Checks one rule against the General Schema.
pub fn check_rule_schema(rule: &Rule, index: usize, sig: &Signature) -> RuleReport {
    let mut report = RuleReport {
        index,
        rule: rule.clone(),
        accepted: false,
        constructor_headed: false,
        derivation: None,
        condition_derivations: Vec::new(),
        variables: Vec::new(),
        diagnosis: None,
    };
    let Some(head) = rule.head() else {
        report.diagnosis = Some(Diagnosis {
            term: rule.lhs.clone(),
            reasons: vec!["left-hand side is not headed by a function symbol".into()],
        });
        return report;
    };
    report.constructor_headed = head.is_constructor();
    let lhs = rule.lhs_args();
    let mut search = ClosureSearch::new(sig, head, lhs);

    let mut missing = Vec::new();
    for x in rule.rhs.free_vars() {
        let access = search.accessible().path(&Term::var(x.clone())).cloned();
        if access.is_none() {
            missing.push(x.to_string());
        }
        report.variables.push(VariableAccess {
            var: x.to_string(),
            access,
        });
    }

    let mut failure: Option<Diagnosis> = None;
    match search.derive(&rule.rhs) {
        Ok(d) => report.derivation = Some(d),
        Err(e) => {
            let fr = e.frontier();
            failure = Some(Diagnosis {
                term: fr.term.clone(),
                reasons: fr.reasons.clone(),
            });
        }
    }
    for (u, v) in &rule.condition {
        for t in [u, v] {
            match search.derive(t) {
                Ok(d) => report.condition_derivations.push(d),
                Err(e) => {
                    if failure.is_none() {
                        let fr = e.frontier();
                        failure = Some(Diagnosis {
                            term: fr.term.clone(),
                            reasons: fr.reasons.clone(),
                        });
                    }
                }
            }
        }
    }
    if failure.is_none() && !missing.is_empty() {
        failure = Some(Diagnosis {
            term: rule.rhs.clone(),
            reasons: vec![format!(
                "free variable(s) {} not accessible in the left-hand side",
                missing.join(", ")
            )],
        });
    }
    report.accepted = failure.is_none();
    report.diagnosis = failure;
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemVerdict {
    /// Every rule follows the schema and both assumptions hold.
    SnGuaranteed,
    /// Every rule follows the schema, but some rules are constructor-headed,
    /// for which no termination claim is made.
    SchemaPassedUnclaimed,
    NotGuaranteed,
}

impl fmt::Display for SystemVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemVerdict::SnGuaranteed => "SN guaranteed",
            SystemVerdict::SchemaPassedUnclaimed => "schema passed, SN not claimed (constructor-headed rules)",
            SystemVerdict::NotGuaranteed => "SN not guaranteed",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemaReport {
    /// All inductive types strictly positive.
    pub assumption1: bool,
    /// Equivalent symbols share statuses (enforced when sealing).
    pub assumption2: bool,
    pub rules: Vec<RuleReport>,
    pub verdict: SystemVerdict,
}

impl SchemaReport {
    pub fn rejected(&self) -> impl Iterator<Item = &RuleReport> {
        self.rules.iter().filter(|r| !r.accepted)
    }
}

/// Assumptions plus every rule; rules are checked independently.
pub fn check_system(rs: &RuleSystem) -> SchemaReport {
    let sig = rs.signature();
    let check = |(i, r): (usize, &Rule)| check_rule_schema(r, i + 1, sig);
    #[cfg(feature = "parallel")]
    let rules: Vec<RuleReport> = {
        use rayon::prelude::*;
        rs.rules().par_iter().enumerate().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rules: Vec<RuleReport> = rs.rules().iter().enumerate().map(check).collect();

    let assumption1 = sig.inductive_names().all(|n| sig.is_strictly_positive(n));
    let verdict = if !assumption1 || rules.iter().any(|r| !r.accepted) {
        SystemVerdict::NotGuaranteed
    } else if rules.iter().any(|r| r.constructor_headed) {
        SystemVerdict::SchemaPassedUnclaimed
    } else {
        SystemVerdict::SnGuaranteed
    };
    SchemaReport {
        assumption1,
        assumption2: true,
        rules,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::SignatureBuilder;
    use crate::term::SymbolKind;

    fn t(n: &str) -> Type {
        Type::ind(n)
    }

    fn sig() -> Signature {
        let mut b = SignatureBuilder::new();
        b.inductive("nat", &[("z", t("nat")), ("s", Type::arrow(t("nat"), t("nat")))]);
        b.inductive(
            "ord",
            &[
                ("oz", t("ord")),
                ("os", Type::arrow(t("ord"), t("ord"))),
                ("lim", Type::arrow(Type::arrow(t("nat"), t("ord")), t("ord"))),
            ],
        );
        b.symbol("plus", Type::arrows(&[t("nat"), t("nat")], t("nat")), 2, None);
        b.seal().unwrap()
    }

    fn fun(sig: &Signature, f: &str, args: Vec<Term>) -> Term {
        Term::fun(sig.symbol(f).unwrap().clone(), args).unwrap()
    }

    #[test]
    fn lim_is_greater_than_application() {
        let sig = sig();
        let f = Term::var(Var::new("F", Type::arrow(t("nat"), t("ord"))));
        let g = Term::var(Var::new("G", Type::arrow(t("nat"), t("ord"))));
        let n = Term::var(Var::new("n", t("nat")));
        let lim_f = fun(&sig, "lim", vec![f.clone()]);
        assert!(greater_arg(&lim_f, &Term::app(f, n.clone()).unwrap(), &sig).unwrap());
        assert!(!greater_arg(&lim_f, &Term::app(g, n).unwrap(), &sig).unwrap());
        assert!(!greater_arg(&lim_f, &lim_f, &sig).unwrap());
    }

    #[test]
    fn successor_is_greater_than_predecessor() {
        let sig = sig();
        let x = Term::var(Var::new("x", t("nat")));
        assert!(greater_arg(&fun(&sig, "s", vec![x.clone()]), &x, &sig).unwrap());
        assert!(greater_arg(&x, &x, &sig).is_ok_and(|b| !b));
        let o = Term::var(Var::new("o", t("ord")));
        assert!(greater_arg(&x, &o, &sig).is_err());
    }

    #[test]
    fn functional_branch_requires_free_variables() {
        let sig = sig();
        let x = Var::new("x", t("nat"));
        let sx = fun(&sig, "s", vec![Term::var(x.clone())]);
        let lam = Term::lambda(&x, sx.clone());
        // Not comparable: the types differ.
        assert!(greater_arg(&lam, &sx, &sig).is_err());
        let h = Var::new("H", Type::arrow(t("nat"), t("nat")));
        let z = fun(&sig, "z", vec![]);
        let lam2 = Term::lambda(&x, Term::app(Term::var(h.clone()), z.clone()).unwrap());
        let inner = Term::lambda(&x, Term::var(x.clone()));
        assert!(!greater_arg(&lam2, &inner, &sig).unwrap());
    }

    #[test]
    fn accessibility_through_constructors_and_basic_types() {
        let sig = sig();
        let x = Term::var(Var::new("X", t("nat")));
        let y = Term::var(Var::new("Y", t("nat")));
        let sx = fun(&sig, "s", vec![x.clone()]);
        assert!(accessible(&sx, &sig).contains(&x));
        let p = fun(&sig, "plus", vec![x.clone(), y.clone()]);
        let acc = accessible(&p, &sig);
        assert!(acc.contains(&x) && acc.contains(&y));
        assert!(matches!(acc.path(&x).unwrap().0[1], AccStep::BasicSubterm(_)));

        let f = Term::var(Var::new("F", Type::arrow(t("nat"), t("ord"))));
        let lim = fun(&sig, "lim", vec![f.clone()]);
        let acc = accessible(&lim, &sig);
        assert!(acc.contains(&f));
        assert!(acc.iter().all(|(_, p)| p.0.iter().all(|s| s.clause() != 5)));
    }

    #[test]
    fn bottom_symbols_are_foreign_to_precedence() {
        let sig = sig();
        let bot = Symbol::new("⊥_nat", vec![], t("nat"), SymbolKind::Bottom);
        let plus = sig.symbol("plus").unwrap().clone();
        let r = in_closure(&sig, &plus, &[], &Term::constant(bot).unwrap());
        assert!(r.is_err());
    }
}
