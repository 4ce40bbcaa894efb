//! Typed terms: variables, abstractions, applications and fully-applied symbols.
//!
//! Terms are locally nameless. Bound variables are de Bruijn indices, so derived
//! equality and hashing coincide with α-equivalence; binder names are kept only
//! as printing hints. Free variables carry their type and an identity number
//! (`0` for user-written variables, a fresh number for variables introduced
//! when a binder is opened).

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::types::{Name, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error: {message}")]
pub struct TypeError {
    pub message: String,
}

impl TypeError {
    pub fn new(message: impl Into<String>) -> Self {
        TypeError { message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid position {position} in {term}")]
pub struct PositionError {
    pub position: Position,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Position(#[from] PositionError),
}

// ---------------------------------------------------------------------------
// Symbols

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    Constructor { inductive: Name },
    Defined,
    /// `⊥_t` constants generated by the erasing function.
    Bottom,
}

#[derive(Debug)]
pub struct SymbolData {
    pub name: Name,
    pub arg_types: Vec<Type>,
    pub result: Type,
    pub kind: SymbolKind,
}

/// A function symbol with a fixed arity. Symbols compare by name.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    pub fn new(name: impl Into<Name>, arg_types: Vec<Type>, result: Type, kind: SymbolKind) -> Self {
        Symbol(Arc::new(SymbolData {
            name: name.into(),
            arg_types,
            result,
            kind,
        }))
    }

    pub fn name(&self) -> &Name {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arg_types.len()
    }

    pub fn arg_types(&self) -> &[Type] {
        &self.0.arg_types
    }

    pub fn result(&self) -> &Type {
        &self.0.result
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.0.kind
    }

    /// `τ(f) = s1 -> ... -> sn -> s`.
    pub fn ty(&self) -> Type {
        Type::arrows(&self.0.arg_types, self.0.result.clone())
    }

    pub fn is_constructor(&self) -> bool {
        matches!(self.0.kind, SymbolKind::Constructor { .. })
    }

    pub fn constructor_of(&self) -> Option<&Name> {
        match &self.0.kind {
            SymbolKind::Constructor { inductive } => Some(inductive),
            _ => None,
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}
impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}

// ---------------------------------------------------------------------------
// Variables

static FRESH: AtomicU32 = AtomicU32::new(1);

/// A typed free variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub id: u32,
    pub ty: Type,
}

impl Var {
    pub fn new(name: impl Into<Name>, ty: Type) -> Self {
        Var {
            name: name.into(),
            id: 0,
            ty,
        }
    }

    /// A variable distinct from every user variable and every other fresh one.
    pub fn fresh(hint: impl Into<Name>, ty: Type) -> Self {
        Var {
            name: hint.into(),
            id: FRESH.fetch_add(1, AtomicOrdering::Relaxed),
            ty,
        }
    }

    pub fn is_fresh(&self) -> bool {
        self.id != 0
    }

    fn display_name(&self) -> String {
        if self.id == 0 {
            self.name.to_string()
        } else {
            format!("{}#{}", self.name, self.id)
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.display_name(), self.ty)
    }
}

// ---------------------------------------------------------------------------
// Positions

/// Dewey position in a term. Children are numbered from 1: the arguments of
/// `f(u1..un)`, then `1` = function and `2` = argument of an application, and
/// `1` = body of an abstraction.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// Strict prefix, i.e. `self < other` in the prefix order.
    pub fn is_strict_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// ---------------------------------------------------------------------------
// Terms

#[derive(Clone)]
pub enum TermKind {
    Var(Var),
    /// de Bruijn index, 0 = innermost enclosing binder.
    Bound(u32),
    Abs {
        hint: Name,
        domain: Type,
        body: Term,
    },
    App(Term, Term),
    Fun(Symbol, Vec<Term>),
}

struct Node {
    kind: TermKind,
    ty: Type,
    /// 1 + the largest loose de Bruijn index, 0 when locally closed.
    loose: u32,
    size: u32,
    hash: u64,
}

/// A well-typed term. Equality is α-equivalence.
#[derive(Clone)]
pub struct Term(Arc<Node>);

fn mix(tag: u8, parts: &[u64]) -> u64 {
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    parts.hash(&mut h);
    h.finish()
}

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

impl Term {
    fn mk(kind: TermKind, ty: Type) -> Term {
        let (loose, size, hash) = match &kind {
            TermKind::Var(v) => (0, 1, mix(0, &[hash_of(v)])),
            TermKind::Bound(i) => (i + 1, 1, mix(1, &[*i as u64, hash_of(&ty)])),
            TermKind::Abs { domain, body, .. } => (
                body.0.loose.saturating_sub(1),
                body.0.size,
                mix(2, &[hash_of(domain), body.0.hash]),
            ),
            TermKind::App(a, b) => (
                a.0.loose.max(b.0.loose),
                a.0.size + b.0.size,
                mix(3, &[a.0.hash, b.0.hash]),
            ),
            TermKind::Fun(f, args) => {
                let mut parts = Vec::with_capacity(args.len() + 1);
                parts.push(hash_of(f));
                parts.extend(args.iter().map(|a| a.0.hash));
                (
                    args.iter().map(|a| a.0.loose).max().unwrap_or(0),
                    1 + args.iter().map(|a| a.0.size).sum::<u32>(),
                    mix(4, &parts),
                )
            }
        };
        Term(Arc::new(Node {
            kind,
            ty,
            loose,
            size,
            hash,
        }))
    }

    pub fn var(v: Var) -> Term {
        let ty = v.ty.clone();
        Term::mk(TermKind::Var(v), ty)
    }

    /// A raw de Bruijn index. Only meaningful underneath matching binders.
    pub fn bound(index: u32, ty: Type) -> Term {
        Term::mk(TermKind::Bound(index), ty)
    }

    /// Abstraction over a raw body whose index 0 refers to the new binder.
    pub fn abs_raw(hint: impl Into<Name>, domain: Type, body: Term) -> Term {
        let ty = Type::arrow(domain.clone(), body.ty().clone());
        Term::mk(
            TermKind::Abs {
                hint: hint.into(),
                domain,
                body,
            },
            ty,
        )
    }

    /// `λx.body`, binding every free occurrence of `x` in `body`.
    pub fn lambda(x: &Var, body: Term) -> Term {
        let closed = close(&body, x, 0);
        Term::abs_raw(x.name.clone(), x.ty.clone(), closed)
    }

    pub fn app(func: Term, arg: Term) -> Result<Term, TypeError> {
        let ty = match func.ty() {
            Type::Arrow(d, c) if **d == *arg.ty() => (**c).clone(),
            Type::Arrow(d, _) => {
                return Err(TypeError::new(format!(
                    "in ({func} {arg}): argument has type {} but {d} was expected",
                    arg.ty()
                )))
            }
            t @ Type::Ind(_) => {
                return Err(TypeError::new(format!(
                    "in ({func} {arg}): {func} has type {t}, which is not a function type"
                )))
            }
        };
        Ok(Term::mk(TermKind::App(func, arg), ty))
    }

    /// `(head a1 ... an)`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TypeError> {
        args.into_iter().try_fold(head, Term::app)
    }

    pub fn fun(sym: Symbol, args: Vec<Term>) -> Result<Term, TypeError> {
        if args.len() != sym.arity() {
            return Err(TypeError::new(format!(
                "{} expects {} argument(s), got {}",
                sym.name(),
                sym.arity(),
                args.len()
            )));
        }
        for (i, (a, t)) in args.iter().zip(sym.arg_types()).enumerate() {
            if a.ty() != t {
                return Err(TypeError::new(format!(
                    "argument {} of {}: {a} has type {} but {t} was expected",
                    i + 1,
                    sym.name(),
                    a.ty()
                )));
            }
        }
        let ty = sym.result().clone();
        Ok(Term::mk(TermKind::Fun(sym, args), ty))
    }

    pub fn constant(sym: Symbol) -> Result<Term, TypeError> {
        Term::fun(sym, Vec::new())
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// The unique type of the term.
    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    /// Number of variable occurrences and symbol nodes.
    pub fn size(&self) -> usize {
        self.0.size as usize
    }

    pub fn is_locally_closed(&self) -> bool {
        self.0.loose == 0
    }

    /// 1 + the largest loose de Bruijn index (0 when locally closed).
    pub fn loose_bound(&self) -> u32 {
        self.0.loose
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.kind {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn head_symbol(&self) -> Option<&Symbol> {
        match &self.0.kind {
            TermKind::Fun(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn is_constructor_headed(&self) -> bool {
        self.head_symbol().is_some_and(Symbol::is_constructor)
    }

    /// Splits `(h a1 ... an)` into `h` and `[a1..an]`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TermKind::App(f, a) = &cur.0.kind {
            args.push(a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn children(&self) -> Vec<&Term> {
        match &self.0.kind {
            TermKind::Var(_) | TermKind::Bound(_) => Vec::new(),
            TermKind::Abs { body, .. } => vec![body],
            TermKind::App(a, b) => vec![a, b],
            TermKind::Fun(_, args) => args.iter().collect(),
        }
    }

    /// Same head, new children (same count); re-checks types.
    pub fn with_children(&self, children: Vec<Term>) -> Result<Term, TypeError> {
        match &self.0.kind {
            TermKind::Var(_) | TermKind::Bound(_) => Ok(self.clone()),
            TermKind::Abs { hint, domain, .. } => {
                let body = children.into_iter().next().expect("abstraction has one child");
                Ok(Term::abs_raw(hint.clone(), domain.clone(), body))
            }
            TermKind::App(..) => {
                let mut it = children.into_iter();
                let a = it.next().expect("application has two children");
                let b = it.next().expect("application has two children");
                Term::app(a, b)
            }
            TermKind::Fun(f, _) => Term::fun(f.clone(), children),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Var>) {
        match &self.0.kind {
            TermKind::Var(v) => {
                out.insert(v.clone());
            }
            TermKind::Bound(_) => {}
            _ => {
                for c in self.children() {
                    c.collect_free_vars(out);
                }
            }
        }
    }

    pub fn has_free_var(&self, x: &Var) -> bool {
        match &self.0.kind {
            TermKind::Var(v) => v == x,
            TermKind::Bound(_) => false,
            _ => self.children().into_iter().any(|c| c.has_free_var(x)),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let TermKind::Fun(f, _) = t.kind() {
                out.insert(f.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// All positions, in pre-order (leftmost-outermost first).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Vec<u32>, out: &mut Vec<Position>) {
        out.push(Position(path.clone()));
        for (i, c) in self.children().into_iter().enumerate() {
            path.push(i as u32 + 1);
            c.collect_positions(path, out);
            path.pop();
        }
    }

    /// Raw subterm: loose indices refer to binders crossed on the way down.
    pub fn subterm_raw(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in &pos.0 {
            cur = *cur.children().get((i as usize).checked_sub(1)?)?;
        }
        Some(cur)
    }

    /// `u|_p`, with every binder crossed on the way opened with a fresh variable.
    pub fn subterm_at(&self, pos: &Position) -> Result<Term, PositionError> {
        let err = || PositionError {
            position: pos.clone(),
            term: self.to_string(),
        };
        let mut cur = self.clone();
        for &i in &pos.0 {
            let next = match cur.kind() {
                TermKind::Abs { .. } if i == 1 => cur.open().expect("abstraction").1,
                _ => (*cur.children().get((i as usize).checked_sub(1).ok_or_else(err)?).ok_or_else(err)?).clone(),
            };
            cur = next;
        }
        Ok(cur)
    }

    /// `u[v]_p`. `v` is inserted as-is: its loose indices (if any) refer to
    /// the binders above `p`, and its free variables are never captured.
    pub fn replace_at(&self, pos: &Position, v: Term) -> Result<Term, TermError> {
        self.replace_rec(&pos.0, v, pos)
    }

    fn replace_rec(&self, path: &[u32], v: Term, full: &Position) -> Result<Term, TermError> {
        let Some((&i, rest)) = path.split_first() else {
            if v.ty() != self.ty() {
                return Err(TypeError::new(format!(
                    "cannot replace {self} : {} by {v} : {}",
                    self.ty(),
                    v.ty()
                ))
                .into());
            }
            return Ok(v);
        };
        let children = self.children();
        let idx = (i as usize)
            .checked_sub(1)
            .filter(|&k| k < children.len())
            .ok_or_else(|| PositionError {
                position: full.clone(),
                term: self.to_string(),
            })?;
        let new_child = children[idx].replace_rec(rest, v, full)?;
        let mut new_children: Vec<Term> = children.into_iter().cloned().collect();
        new_children[idx] = new_child;
        Ok(self.with_children(new_children)?)
    }

    /// Opens an abstraction with a fresh variable named after its binder.
    pub fn open(&self) -> Option<(Var, Term)> {
        match &self.0.kind {
            TermKind::Abs { hint, domain, body } => {
                let x = Var::fresh(hint.clone(), domain.clone());
                let opened = instantiate(body, &Term::var(x.clone()));
                Some((x, opened))
            }
            _ => None,
        }
    }

    /// Opens an abstraction with a given variable.
    pub fn open_with(&self, x: &Var) -> Option<Term> {
        match &self.0.kind {
            TermKind::Abs { body, .. } => Some(instantiate(body, &Term::var(x.clone()))),
            _ => None,
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.size != other.0.size {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Var(a), TermKind::Var(b)) => a == b,
            (TermKind::Bound(i), TermKind::Bound(j)) => i == j && self.0.ty == other.0.ty,
            (
                TermKind::Abs {
                    domain: d1, body: b1, ..
                },
                TermKind::Abs {
                    domain: d2, body: b2, ..
                },
            ) => d1 == d2 && b1 == b2,
            (TermKind::App(f1, a1), TermKind::App(f2, a2)) => f1 == f2 && a1 == a2,
            (TermKind::Fun(f, xs), TermKind::Fun(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

/// α-equivalence. Terms are stored modulo α, so this is plain equality.
pub fn alpha_equal(u: &Term, v: &Term) -> bool {
    u == v
}

// ---------------------------------------------------------------------------
// de Bruijn plumbing

/// Adds `delta` to every index `>= cutoff`.
pub fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if delta == 0 || t.0.loose <= cutoff {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Bound(i) => {
            let j = *i as i64 + delta;
            assert!(j >= 0, "negative de Bruijn index after shift");
            Term::bound(j as u32, t.ty().clone())
        }
        TermKind::Var(_) => t.clone(),
        TermKind::Abs { hint, domain, body } => {
            Term::abs_raw(hint.clone(), domain.clone(), shift(body, delta, cutoff + 1))
        }
        TermKind::App(a, b) => Term::mk(
            TermKind::App(shift(a, delta, cutoff), shift(b, delta, cutoff)),
            t.ty().clone(),
        ),
        TermKind::Fun(f, args) => Term::mk(
            TermKind::Fun(f.clone(), args.iter().map(|a| shift(a, delta, cutoff)).collect()),
            t.ty().clone(),
        ),
    }
}

/// `body[0 := value]`: the body of an abstraction with its binder replaced.
/// `value` is interpreted in the context of the abstraction itself.
pub fn instantiate(body: &Term, value: &Term) -> Term {
    instantiate_at(body, value, 0)
}

fn instantiate_at(t: &Term, value: &Term, depth: u32) -> Term {
    if t.0.loose <= depth {
        return t.clone();
    }
    match &t.0.kind {
        TermKind::Bound(i) if *i == depth => shift(value, depth as i64, 0),
        TermKind::Bound(i) if *i > depth => Term::bound(i - 1, t.ty().clone()),
        TermKind::Bound(_) | TermKind::Var(_) => t.clone(),
        TermKind::Abs { hint, domain, body } => {
            Term::abs_raw(hint.clone(), domain.clone(), instantiate_at(body, value, depth + 1))
        }
        TermKind::App(a, b) => Term::mk(
            TermKind::App(instantiate_at(a, value, depth), instantiate_at(b, value, depth)),
            t.ty().clone(),
        ),
        TermKind::Fun(f, args) => Term::mk(
            TermKind::Fun(
                f.clone(),
                args.iter().map(|a| instantiate_at(a, value, depth)).collect(),
            ),
            t.ty().clone(),
        ),
    }
}

/// Replaces free `x` by the index of a binder sitting `depth` levels above.
fn close(t: &Term, x: &Var, depth: u32) -> Term {
    match &t.0.kind {
        TermKind::Var(v) if v == x => Term::bound(depth, x.ty.clone()),
        TermKind::Var(_) => t.clone(),
        TermKind::Bound(i) if *i >= depth => Term::bound(i + 1, t.ty().clone()),
        TermKind::Bound(_) => t.clone(),
        TermKind::Abs { hint, domain, body } => {
            Term::abs_raw(hint.clone(), domain.clone(), close(body, x, depth + 1))
        }
        TermKind::App(a, b) => Term::mk(
            TermKind::App(close(a, x, depth), close(b, x, depth)),
            t.ty().clone(),
        ),
        TermKind::Fun(f, args) => Term::mk(
            TermKind::Fun(f.clone(), args.iter().map(|a| close(a, x, depth)).collect()),
            t.ty().clone(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Substitutions

/// Finite, type-preserving map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Var, v: Term) -> Result<Self, TypeError> {
        let mut s = Self::new();
        s.insert(x, v)?;
        Ok(s)
    }

    /// Identity bindings are dropped so that `dom` only holds moved variables.
    pub fn insert(&mut self, x: Var, v: Term) -> Result<(), TypeError> {
        if x.ty != *v.ty() {
            return Err(TypeError::new(format!(
                "substitution maps {} : {} to {v} : {}",
                x,
                x.ty,
                v.ty()
            )));
        }
        if v.as_var() == Some(&x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, v);
        }
        Ok(())
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Capture-avoiding application. Binders are nameless, so no renaming is needed.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        self.apply_at(t, 0)
    }

    fn apply_at(&self, t: &Term, depth: u32) -> Term {
        match &t.0.kind {
            TermKind::Var(v) => match self.map.get(v) {
                Some(val) => shift(val, depth as i64, 0),
                None => t.clone(),
            },
            TermKind::Bound(_) => t.clone(),
            TermKind::Abs { hint, domain, body } => {
                Term::abs_raw(hint.clone(), domain.clone(), self.apply_at(body, depth + 1))
            }
            TermKind::App(a, b) => Term::mk(
                TermKind::App(self.apply_at(a, depth), self.apply_at(b, depth)),
                t.ty().clone(),
            ),
            TermKind::Fun(f, args) => Term::mk(
                TermKind::Fun(f.clone(), args.iter().map(|a| self.apply_at(a, depth)).collect()),
                t.ty().clone(),
            ),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} -> {v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `substitute(u, θ)`.
pub fn substitute(u: &Term, theta: &Substitution) -> Term {
    theta.apply(u)
}

// ---------------------------------------------------------------------------
// Printing

struct Printer {
    taken: HashSet<String>,
    binders: Vec<String>,
}

impl Printer {
    fn write(&mut self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &t.0.kind {
            TermKind::Var(v) => write!(f, "{}", v.display_name()),
            TermKind::Bound(i) => {
                let idx = self.binders.len() as i64 - 1 - *i as i64;
                if idx >= 0 {
                    write!(f, "{}", self.binders[idx as usize])
                } else {
                    write!(f, "#{i}")
                }
            }
            TermKind::Abs { hint, domain, body } => {
                let mut name = hint.to_string();
                while self.taken.contains(&name) || self.binders.contains(&name) {
                    name.push('\'');
                }
                write!(f, "\\{name}:{domain}. ")?;
                self.binders.push(name);
                let r = self.write(body, f);
                self.binders.pop();
                r
            }
            TermKind::App(..) => {
                let (head, args) = t.spine();
                write!(f, "(")?;
                self.write_spine_item(head, f)?;
                for a in args {
                    write!(f, " ")?;
                    self.write_spine_item(a, f)?;
                }
                write!(f, ")")
            }
            TermKind::Fun(s, args) => {
                write!(f, "{}", s.name())?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        self.write(a, f)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }

    fn write_spine_item(&mut self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if matches!(t.kind(), TermKind::Abs { .. }) {
            write!(f, "(")?;
            self.write(t, f)?;
            write!(f, ")")
        } else {
            self.write(t, f)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut taken: HashSet<String> = self.free_vars().iter().map(Var::display_name).collect();
        taken.extend(self.symbols().iter().map(|s| s.name().to_string()));
        Printer {
            taken,
            binders: Vec::new(),
        }
        .write(self, f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Type {
        Type::ind("nat")
    }
    fn zero() -> Symbol {
        Symbol::new("z", vec![], nat(), SymbolKind::Constructor { inductive: "nat".into() })
    }
    fn succ() -> Symbol {
        Symbol::new("s", vec![nat()], nat(), SymbolKind::Constructor { inductive: "nat".into() })
    }
    fn z() -> Term {
        Term::constant(zero()).unwrap()
    }
    fn s(t: Term) -> Term {
        Term::fun(succ(), vec![t]).unwrap()
    }

    #[test]
    fn lambda_types() {
        let x = Var::new("x", nat());
        let id_s = Term::lambda(&x, s(Term::var(x.clone())));
        assert_eq!(*id_s.ty(), Type::arrow(nat(), nat()));
        assert_eq!(id_s.to_string(), "\\x:nat. s(x)");
    }

    #[test]
    fn ill_typed_application_is_rejected() {
        let err = Term::app(z(), z()).unwrap_err();
        assert!(err.message.contains("not a function type"), "{err}");
        assert!(Term::fun(succ(), vec![]).is_err());
    }

    #[test]
    fn alpha_equivalence() {
        let x = Var::new("x", nat());
        let y = Var::new("y", nat());
        let a = Term::lambda(&x, Term::var(x.clone()));
        let b = Term::lambda(&y, Term::var(y.clone()));
        assert!(alpha_equal(&a, &b));
        let c = Term::lambda(&x, Term::var(y.clone()));
        assert!(!alpha_equal(&a, &c));
    }

    #[test]
    fn substitution_without_capture() {
        let nn = Type::arrow(nat(), nat());
        let f = Var::new("F", nn.clone());
        let x = Var::new("x", nat());
        let zz = Var::new("z", nat());
        let u = Term::lambda(&x, Term::app(Term::var(f.clone()), Term::var(x.clone())).unwrap());
        let v = Term::lambda(&zz, s(Term::var(zz.clone())));
        let theta = Substitution::singleton(f, v.clone()).unwrap();
        let expected = Term::lambda(&x, Term::app(v, Term::var(x.clone())).unwrap());
        assert_eq!(substitute(&u, &theta), expected);
    }

    #[test]
    fn substitution_renames_binder_on_display() {
        let x = Var::new("x", nat());
        let y = Var::new("y", nat());
        let u = Term::lambda(&x, Term::var(y.clone()));
        let theta = Substitution::singleton(y, Term::var(x.clone())).unwrap();
        let r = substitute(&u, &theta);
        assert!(r.has_free_var(&x));
        assert_eq!(r.to_string(), "\\x':nat. x");
    }

    #[test]
    fn positions_and_replacement() {
        let t = s(s(z()));
        assert_eq!(t.positions().len(), 3);
        let p = Position(vec![1, 1]);
        assert_eq!(t.subterm_at(&p).unwrap(), z());
        assert_eq!(t.replace_at(&p, s(z())).unwrap(), s(s(s(z()))));
        assert!(matches!(
            t.subterm_at(&Position(vec![2])),
            Err(PositionError { .. })
        ));
        let nn = Term::lambda(&Var::new("x", nat()), z());
        assert!(matches!(
            t.replace_at(&Position(vec![1]), nn),
            Err(TermError::Type(_))
        ));
    }

    #[test]
    fn subterm_under_binder_is_opened() {
        let x = Var::new("x", nat());
        let t = Term::lambda(&x, s(Term::var(x.clone())));
        let body = t.subterm_at(&Position(vec![1])).unwrap();
        assert!(body.is_locally_closed());
        let fv = body.free_vars();
        assert_eq!(fv.len(), 1);
        assert!(fv.iter().next().unwrap().is_fresh());
        assert!(!t.subterm_raw(&Position(vec![1])).unwrap().is_locally_closed());
    }

    #[test]
    fn identity_substitution() {
        let x = Var::new("x", nat());
        let mut theta = Substitution::new();
        theta.insert(x.clone(), Term::var(x.clone())).unwrap();
        assert!(theta.is_empty());
        let t = s(Term::var(x));
        assert_eq!(theta.apply(&t), t);
    }
}
