//! Inductive declarations, function symbols, statuses and precedence.
//!
//! A [`SignatureBuilder`] collects raw declarations; [`SignatureBuilder::seal`]
//! validates them and produces an immutable [`Signature`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::term::{Symbol, SymbolKind};
use crate::types::{negative_positions, Name, Type, TypePosition};

/// Prefix reserved for the bottom constants of the erasing function.
pub const BOTTOM_PREFIX: &str = "⊥";

// ---------------------------------------------------------------------------
// Statuses

/// `lex(mul i.., mul j.., ...)` with 1-based argument indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Status {
    pub groups: Vec<Vec<usize>>,
}

impl Status {
    pub fn new(groups: Vec<Vec<usize>>) -> Self {
        Status { groups }
    }

    /// `lex(mul 1, ..., mul n)`.
    pub fn lexicographic(n: usize) -> Self {
        Status {
            groups: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// `lex(mul 1 ... n)`.
    pub fn multiset(n: usize) -> Self {
        Status {
            groups: vec![(1..=n).collect()],
        }
    }

    /// Greatest index used.
    pub fn arity(&self) -> usize {
        self.groups.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Indices occurring as singleton groups.
    pub fn lex_positions(&self) -> Vec<usize> {
        self.groups
            .iter()
            .filter(|g| g.len() == 1)
            .map(|g| g[0])
            .collect()
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lex(")?;
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "mul")?;
            for k in g {
                write!(f, " {k}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Status {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatusError {
    #[error("status of {symbol}: symbols of arity 0 take no status")]
    NullaryHasStatus { symbol: Name },
    #[error("status of {symbol}: empty group")]
    EmptyGroup { symbol: Name },
    #[error("status of {symbol}: index 0 is not an argument (indices start at 1)")]
    ZeroIndex { symbol: Name },
    #[error("status of {symbol} is not linear: argument {index} occurs twice")]
    NonLinear { symbol: Name, index: usize },
    #[error("status of {symbol}: group mul {group:?} mixes argument types {first} and {other}")]
    MixedTypes {
        symbol: Name,
        group: Vec<usize>,
        first: Type,
        other: Type,
    },
    #[error("status of {symbol} has arity {status_arity}, greater than the symbol arity {symbol_arity}")]
    ArityExceeded {
        symbol: Name,
        status_arity: usize,
        symbol_arity: usize,
    },
}

/// Linearity, same type inside each `mul` group, and `1 <= arity <= n`.
pub fn check_status(symbol: &Name, arg_types: &[Type], status: &Status) -> Result<(), StatusError> {
    if arg_types.is_empty() {
        return Err(StatusError::NullaryHasStatus {
            symbol: symbol.clone(),
        });
    }
    let mut seen = BTreeSet::new();
    for g in &status.groups {
        if g.is_empty() {
            return Err(StatusError::EmptyGroup {
                symbol: symbol.clone(),
            });
        }
        for &i in g {
            if i == 0 {
                return Err(StatusError::ZeroIndex {
                    symbol: symbol.clone(),
                });
            }
            if !seen.insert(i) {
                return Err(StatusError::NonLinear {
                    symbol: symbol.clone(),
                    index: i,
                });
            }
        }
    }
    let arity = status.arity();
    if arity == 0 {
        return Err(StatusError::EmptyGroup {
            symbol: symbol.clone(),
        });
    }
    if arity > arg_types.len() {
        return Err(StatusError::ArityExceeded {
            symbol: symbol.clone(),
            status_arity: arity,
            symbol_arity: arg_types.len(),
        });
    }
    for g in &status.groups {
        let first = &arg_types[g[0] - 1];
        if let Some(&k) = g.iter().find(|&&k| arg_types[k - 1] != *first) {
            return Err(StatusError::MixedTypes {
                symbol: symbol.clone(),
                group: g.clone(),
                first: first.clone(),
                other: arg_types[k - 1].clone(),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Dependency order on inductive types

/// `≥_I` as equivalence classes plus the strict order between them.
#[derive(Debug, Clone, Serialize)]
pub struct DependencyOrder {
    /// Classes in declaration order of their first member.
    pub classes: Vec<Vec<Name>>,
    #[serde(skip)]
    class_of: HashMap<Name, usize>,
    /// `reach[a][b]`: class `a` ≥ class `b` (reflexive, transitive).
    #[serde(skip)]
    reach: Vec<Vec<bool>>,
    /// Pairs `(a, b)` of class indices with `a >_I b`.
    pub strict: BTreeSet<(usize, usize)>,
    /// Always true on a finite signature.
    pub well_founded: bool,
}

impl DependencyOrder {
    /// `inductives`: name and constructor types, in declaration order.
    pub fn compute(inductives: &[(Name, Vec<Type>)]) -> Self {
        let idx: HashMap<&Name, usize> = inductives.iter().enumerate().map(|(i, (n, _))| (n, i)).collect();
        let n = inductives.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, (_, ctor_types)) in inductives.iter().enumerate() {
            reach[i][i] = true;
            for t in ctor_types {
                for dep in t.inductives() {
                    if let Some(&j) = idx.get(&dep) {
                        reach[i][j] = true;
                    }
                }
            }
        }
        transitive_closure(&mut reach);

        let mut class_of_idx = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if class_of_idx[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let members: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &members {
                class_of_idx[j] = c;
            }
            classes.push(members);
        }
        let k = classes.len();
        let mut creach = vec![vec![false; k]; k];
        let mut strict = BTreeSet::new();
        for a in 0..k {
            for b in 0..k {
                creach[a][b] = reach[classes[a][0]][classes[b][0]];
                if a != b && creach[a][b] {
                    strict.insert((a, b));
                }
            }
        }
        let class_of = inductives
            .iter()
            .enumerate()
            .map(|(i, (name, _))| (name.clone(), class_of_idx[i]))
            .collect();
        DependencyOrder {
            classes: classes
                .into_iter()
                .map(|c| c.into_iter().map(|i| inductives[i].0.clone()).collect())
                .collect(),
            class_of,
            reach: creach,
            strict,
            well_founded: true,
        }
    }

    pub fn class_of(&self, name: &str) -> Option<usize> {
        self.class_of.get(name).copied()
    }

    pub fn class_members(&self, name: &str) -> Option<&[Name]> {
        self.class_of(name).map(|c| self.classes[c].as_slice())
    }

    /// `a ≥_I b`.
    pub fn geq(&self, a: &str, b: &str) -> bool {
        match (self.class_of(a), self.class_of(b)) {
            (Some(x), Some(y)) => self.reach[x][y],
            _ => false,
        }
    }

    /// `a =_I b`.
    pub fn equiv(&self, a: &str, b: &str) -> bool {
        match (self.class_of(a), self.class_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// `a >_I b`.
    pub fn greater(&self, a: &str, b: &str) -> bool {
        self.geq(a, b) && !self.geq(b, a)
    }
}

fn transitive_closure(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Strict positivity

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityViolation {
    pub constructor: Name,
    /// 1-based argument index.
    pub argument: usize,
    /// Position inside the argument type.
    pub position: TypePosition,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub strictly_positive: bool,
    pub basic: bool,
    pub violations: Vec<PositivityViolation>,
}

/// Checks one inductive type, given the constructors' argument types.
pub fn check_strict_positivity(
    name: &Name,
    constructors: &[(Name, Vec<Type>)],
    deps: &DependencyOrder,
) -> PositivityReport {
    let mut violations = Vec::new();
    let mut functional = false;
    for (ctor, args) in constructors {
        for (j, arg) in args.iter().enumerate() {
            functional |= arg.is_arrow();
            let mut path = Vec::new();
            let mut cur = arg;
            while let Type::Arrow(d, c) = cur {
                path.push(1u8);
                for p in d.occurrences(name) {
                    let mut full = path.clone();
                    full.extend(p.0);
                    violations.push(PositivityViolation {
                        constructor: ctor.clone(),
                        argument: j + 1,
                        position: TypePosition(full),
                        reason: format!("{name} occurs in the argument type {d} of {arg}"),
                    });
                }
                path.pop();
                path.push(2);
                cur = c;
            }
            for p in negative_positions(arg) {
                let Some(Type::Ind(t)) = arg.at(&p) else { continue };
                if deps.equiv(t, name) && !violations.iter().any(|v| v.constructor == *ctor && v.argument == j + 1 && v.position == p) {
                    violations.push(PositivityViolation {
                        constructor: ctor.clone(),
                        argument: j + 1,
                        position: p.clone(),
                        reason: format!("{t}, equivalent to {name}, occurs negatively in {arg}"),
                    });
                }
            }
        }
    }
    let strictly_positive = violations.is_empty();
    PositivityReport {
        strictly_positive,
        basic: strictly_positive && !functional,
        violations,
    }
}

// ---------------------------------------------------------------------------
// Builder and validation

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SignatureOptions {
    /// Permit rules whose head is a constructor; no SN claim is made for them.
    pub allow_constructor_rules: bool,
    /// Seal even when some inductive type is not strictly positive.
    pub allow_non_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecedenceDecl {
    Greater(Name, Name),
    Equivalent(Name, Name),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveDecl {
    pub name: Name,
    pub constructors: Vec<(Name, Type)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: Name,
    pub ty: Type,
    pub arity: usize,
    pub status: Option<Status>,
}

/// Raw declarations, in input order.
#[derive(Debug, Clone, Default)]
pub struct SignatureBuilder {
    pub inductives: Vec<InductiveDecl>,
    pub symbols: Vec<SymbolDecl>,
    pub precedence: Vec<PrecedenceDecl>,
    pub options: SignatureOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "message", rename_all = "snake_case")]
pub enum ValidationIssue {
    Declaration(String),
    Status(String),
    Precedence(String),
    SameClassStatus(String),
    NotStrictlyPositive(String),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::Declaration(m)
            | ValidationIssue::Status(m)
            | ValidationIssue::Precedence(m)
            | ValidationIssue::SameClassStatus(m)
            | ValidationIssue::NotStrictlyPositive(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dependency: DependencyOrder,
    pub positivity: BTreeMap<Name, PositivityReport>,
    pub issues: Vec<ValidationIssue>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    /// No issue at all.
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    /// Clean up to the relaxations enabled in `options`.
    pub fn is_acceptable(&self, options: SignatureOptions) -> bool {
        self.issues.iter().all(|i| match i {
            ValidationIssue::NotStrictlyPositive(_) => options.allow_non_positive,
            _ => false,
        })
    }

    /// Assumption 1 holds.
    pub fn all_strictly_positive(&self) -> bool {
        self.positivity.values().all(|r| r.strictly_positive)
    }
}

#[derive(Debug, Clone, Error)]
#[error("invalid signature: {}", .report.issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError {
    pub report: Box<ValidationReport>,
}

impl SignatureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inductive(&mut self, name: &str, constructors: &[(&str, Type)]) -> &mut Self {
        self.inductives.push(InductiveDecl {
            name: name.into(),
            constructors: constructors.iter().map(|(n, t)| (Name::from(*n), t.clone())).collect(),
        });
        self
    }

    pub fn symbol(&mut self, name: &str, ty: Type, arity: usize, status: Option<Status>) -> &mut Self {
        self.symbols.push(SymbolDecl {
            name: name.into(),
            ty,
            arity,
            status,
        });
        self
    }

    pub fn greater(&mut self, a: &str, b: &str) -> &mut Self {
        self.precedence.push(PrecedenceDecl::Greater(a.into(), b.into()));
        self
    }

    pub fn equivalent(&mut self, a: &str, b: &str) -> &mut Self {
        self.precedence.push(PrecedenceDecl::Equivalent(a.into(), b.into()));
        self
    }

    pub fn options(&mut self, options: SignatureOptions) -> &mut Self {
        self.options = options;
        self
    }

    /// Validates and seals. Fails unless every issue is covered by an enabled relaxation.
    pub fn seal(&self) -> Result<Signature, ValidationError> {
        let (sig, report) = self.build();
        if report.is_acceptable(self.options) {
            Ok(sig)
        } else {
            Err(ValidationError {
                report: Box::new(report),
            })
        }
    }

    pub fn validate(&self) -> ValidationReport {
        self.build().1
    }

    fn build(&self) -> (Signature, ValidationReport) {
        let mut issues = Vec::new();
        let declared: BTreeSet<Name> = self.inductives.iter().map(|d| d.name.clone()).collect();
        let check_type = |what: &str, t: &Type, issues: &mut Vec<ValidationIssue>| {
            for n in t.inductives() {
                if !declared.contains(&n) {
                    issues.push(ValidationIssue::Declaration(format!(
                        "{what} mentions undeclared type {n}"
                    )));
                }
            }
        };

        let mut seen_types = BTreeSet::new();
        for d in &self.inductives {
            if !seen_types.insert(d.name.clone()) {
                issues.push(ValidationIssue::Declaration(format!("type {} declared twice", d.name)));
            }
        }

        let mut symbols: IndexMap<Name, Symbol> = IndexMap::new();
        let mut add = |sym: Symbol, issues: &mut Vec<ValidationIssue>| {
            let name = sym.name().clone();
            if name.starts_with(BOTTOM_PREFIX) {
                issues.push(ValidationIssue::Declaration(format!("{name} uses a reserved name")));
            }
            if symbols.contains_key(&name) {
                issues.push(ValidationIssue::Declaration(format!("symbol {name} declared twice")));
            } else {
                symbols.insert(name, sym);
            }
        };

        let mut inductives: IndexMap<Name, Vec<Symbol>> = IndexMap::new();
        for d in &self.inductives {
            let mut ctors = Vec::new();
            for (cname, cty) in &d.constructors {
                check_type(&format!("constructor {cname}"), cty, &mut issues);
                let (args, target) = cty.uncurry();
                if **target != *d.name {
                    issues.push(ValidationIssue::Declaration(format!(
                        "constructor {cname} of {} has result type {target}",
                        d.name
                    )));
                }
                let sym = Symbol::new(
                    cname.clone(),
                    args.into_iter().cloned().collect(),
                    Type::Ind(d.name.clone()),
                    SymbolKind::Constructor {
                        inductive: d.name.clone(),
                    },
                );
                ctors.push(sym.clone());
                add(sym, &mut issues);
            }
            inductives.entry(d.name.clone()).or_insert(ctors);
        }

        let mut statuses = HashMap::new();
        for d in &self.symbols {
            check_type(&format!("symbol {}", d.name), &d.ty, &mut issues);
            let mut args = Vec::new();
            let mut cur = &d.ty;
            for _ in 0..d.arity {
                match cur {
                    Type::Arrow(a, c) => {
                        args.push((**a).clone());
                        cur = c;
                    }
                    Type::Ind(_) => break,
                }
            }
            if args.len() < d.arity {
                issues.push(ValidationIssue::Declaration(format!(
                    "symbol {} has arity {} but type {} has only {} argument(s)",
                    d.name,
                    d.arity,
                    d.ty,
                    args.len()
                )));
            }
            if let Some(st) = &d.status {
                if let Err(e) = check_status(&d.name, &args, st) {
                    issues.push(ValidationIssue::Status(e.to_string()));
                }
                statuses.insert(d.name.clone(), st.clone());
            }
            add(
                Symbol::new(d.name.clone(), args, cur.clone(), SymbolKind::Defined),
                &mut issues,
            );
        }

        let ind_types: Vec<(Name, Vec<Type>)> = self
            .inductives
            .iter()
            .map(|d| (d.name.clone(), d.constructors.iter().map(|(_, t)| t.clone()).collect()))
            .collect();
        let dependency = DependencyOrder::compute(&ind_types);

        let mut positivity = BTreeMap::new();
        for d in &self.inductives {
            let ctors: Vec<(Name, Vec<Type>)> = d
                .constructors
                .iter()
                .map(|(n, t)| (n.clone(), t.uncurry().0.into_iter().cloned().collect()))
                .collect();
            let rep = check_strict_positivity(&d.name, &ctors, &dependency);
            if !rep.strictly_positive {
                issues.push(ValidationIssue::NotStrictlyPositive(format!(
                    "type {} is not strictly positive",
                    d.name
                )));
            }
            positivity.insert(d.name.clone(), rep);
        }

        let precedence = Precedence::build(&symbols, &self.precedence, &mut issues);

        // Same class, same status.
        let status_of = |s: &Symbol| -> Option<Status> {
            if s.arity() == 0 {
                None
            } else {
                Some(statuses.get(s.name()).cloned().unwrap_or_else(|| Status::lexicographic(s.arity())))
            }
        };
        for class in precedence.classes() {
            let members: Vec<&Symbol> = class.iter().filter_map(|n| symbols.get(n)).collect();
            if let Some((first, rest)) = members.split_first() {
                for m in rest {
                    if status_of(first) != status_of(m) {
                        issues.push(ValidationIssue::SameClassStatus(format!(
                            "{} and {} are equivalent in the precedence but have statuses {} and {}",
                            first.name(),
                            m.name(),
                            status_of(first).map_or("none".to_string(), |s| s.to_string()),
                            status_of(m).map_or("none".to_string(), |s| s.to_string()),
                        )));
                    }
                }
            }
        }

        let notes = vec![
            "the dependency order on a finite signature is well-founded".to_string(),
        ];
        let sig = Signature {
            inductives,
            symbols,
            statuses,
            precedence,
            dependency: dependency.clone(),
            positivity: positivity.clone(),
            options: self.options,
            decls: self.clone(),
        };
        (
            sig,
            ValidationReport {
                dependency,
                positivity,
                issues,
                notes,
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Precedence

/// `≥_F`: union-find classes of `~`, user `>` edges, and the implicit
/// placement of defined symbols above constructors.
#[derive(Debug, Clone)]
pub struct Precedence {
    class_of: HashMap<Name, usize>,
    members: Vec<Vec<Name>>,
    /// `greater[a][b]`: class `a` > class `b`.
    greater: Vec<Vec<bool>>,
}

impl Precedence {
    fn build(symbols: &IndexMap<Name, Symbol>, decls: &[PrecedenceDecl], issues: &mut Vec<ValidationIssue>) -> Self {
        let n = symbols.len();
        let index = |name: &Name, issues: &mut Vec<ValidationIssue>| {
            let i = symbols.get_index_of(name);
            if i.is_none() {
                issues.push(ValidationIssue::Precedence(format!(
                    "precedence mentions undeclared symbol {name}"
                )));
            }
            i
        };

        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        let mut edges = Vec::new();
        for d in decls {
            match d {
                PrecedenceDecl::Equivalent(a, b) => {
                    if let (Some(i), Some(j)) = (index(a, issues), index(b, issues)) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
                PrecedenceDecl::Greater(a, b) => {
                    if let (Some(i), Some(j)) = (index(a, issues), index(b, issues)) {
                        edges.push((i, j));
                    }
                }
            }
        }

        let mut root_class = HashMap::new();
        let mut members: Vec<Vec<Name>> = Vec::new();
        let mut class_of = HashMap::new();
        for (i, name) in symbols.keys().enumerate() {
            let r = find(&mut parent, i);
            let c = *root_class.entry(r).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[c].push(name.clone());
            class_of.insert(name.clone(), c);
        }
        let k = members.len();
        let mut user = vec![vec![false; k]; k];
        for &(i, j) in &edges {
            let (a, b) = (class_of[symbols.get_index(i).unwrap().0], class_of[symbols.get_index(j).unwrap().0]);
            if a == b {
                issues.push(ValidationIssue::Precedence(format!(
                    "precedence cycle: {} > {} but they are equivalent",
                    symbols.get_index(i).unwrap().0,
                    symbols.get_index(j).unwrap().0
                )));
            }
            user[a][b] = true;
        }
        let mut user_reach = user.clone();
        for (c, row) in user_reach.iter_mut().enumerate() {
            row[c] = true;
        }
        transitive_closure(&mut user_reach);

        let mut greater = user;
        for f in symbols.values().filter(|s| !s.is_constructor()) {
            for c in symbols.values().filter(|s| s.is_constructor()) {
                let (fc, cc) = (class_of[f.name()], class_of[c.name()]);
                if !user_reach[cc][fc] {
                    greater[fc][cc] = true;
                }
            }
        }
        transitive_closure(&mut greater);
        for (c, row) in greater.iter().enumerate() {
            if row[c] {
                issues.push(ValidationIssue::Precedence(format!(
                    "precedence cycle through {}",
                    members[c].join(", ")
                )));
            }
        }
        Precedence {
            class_of,
            members,
            greater,
        }
    }

    pub fn classes(&self) -> &[Vec<Name>] {
        &self.members
    }

    /// `f =_F g`.
    pub fn equiv(&self, f: &str, g: &str) -> bool {
        match (self.class_of.get(f), self.class_of.get(g)) {
            (Some(a), Some(b)) => a == b,
            _ => f == g,
        }
    }

    /// `f >_F g`.
    pub fn greater(&self, f: &str, g: &str) -> bool {
        match (self.class_of.get(f), self.class_of.get(g)) {
            (Some(&a), Some(&b)) => self.greater[a][b],
            _ => false,
        }
    }

    pub fn class_members(&self, f: &str) -> &[Name] {
        self.class_of.get(f).map_or(&[], |&c| self.members[c].as_slice())
    }
}

// ---------------------------------------------------------------------------
// Sealed signature

/// A validated, immutable signature.
#[derive(Debug, Clone)]
pub struct Signature {
    inductives: IndexMap<Name, Vec<Symbol>>,
    symbols: IndexMap<Name, Symbol>,
    statuses: HashMap<Name, Status>,
    precedence: Precedence,
    dependency: DependencyOrder,
    positivity: BTreeMap<Name, PositivityReport>,
    options: SignatureOptions,
    decls: SignatureBuilder,
}

impl Signature {
    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn inductive_names(&self) -> impl Iterator<Item = &Name> {
        self.inductives.keys()
    }

    pub fn is_inductive(&self, name: &str) -> bool {
        self.inductives.contains_key(name)
    }

    /// Constructors in declaration order.
    pub fn constructors(&self, inductive: &str) -> &[Symbol] {
        self.inductives.get(inductive).map_or(&[], Vec::as_slice)
    }

    /// Explicit or default status; `None` for arity 0.
    pub fn status(&self, f: &Symbol) -> Option<Status> {
        if f.arity() == 0 {
            return None;
        }
        Some(
            self.statuses
                .get(f.name())
                .cloned()
                .unwrap_or_else(|| Status::lexicographic(f.arity())),
        )
    }

    pub fn precedence(&self) -> &Precedence {
        &self.precedence
    }

    pub fn dependency(&self) -> &DependencyOrder {
        &self.dependency
    }

    pub fn positivity(&self, inductive: &str) -> Option<&PositivityReport> {
        self.positivity.get(inductive)
    }

    pub fn is_strictly_positive(&self, inductive: &str) -> bool {
        self.positivity(inductive).is_some_and(|r| r.strictly_positive)
    }

    /// A base type that is a basic inductive type.
    pub fn is_basic_type(&self, t: &Type) -> bool {
        t.as_ind()
            .and_then(|n| self.positivity(n))
            .is_some_and(|r| r.basic)
    }

    pub fn options(&self) -> SignatureOptions {
        self.options
    }

    /// The declarations this signature was sealed from.
    pub fn declarations(&self) -> &SignatureBuilder {
        &self.decls
    }

    /// A builder holding the same declarations, for extension.
    pub fn to_builder(&self) -> SignatureBuilder {
        self.decls.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: &str) -> Type {
        Type::ind(n)
    }
    fn arr(a: Type, b: Type) -> Type {
        Type::arrow(a, b)
    }

    fn nat_ord() -> SignatureBuilder {
        let mut b = SignatureBuilder::new();
        b.inductive("nat", &[("z", t("nat")), ("s", arr(t("nat"), t("nat")))]);
        b.inductive(
            "ord",
            &[
                ("oz", t("ord")),
                ("os", arr(t("ord"), t("ord"))),
                ("lim", arr(arr(t("nat"), t("ord")), t("ord"))),
            ],
        );
        b
    }

    #[test]
    fn dependency_between_ord_and_nat() {
        let sig = nat_ord().seal().unwrap();
        let d = sig.dependency();
        assert!(d.greater("ord", "nat"));
        assert!(!d.geq("nat", "ord"));
        assert!(d.well_founded);
    }

    #[test]
    fn bool_alone_is_one_class() {
        let mut b = SignatureBuilder::new();
        b.inductive("bool", &[("true", t("bool")), ("false", t("bool"))]);
        let d = b.seal().unwrap().dependency().clone();
        assert_eq!(d.classes.len(), 1);
        assert!(d.strict.is_empty());
    }

    #[test]
    fn ord_is_strictly_positive_not_basic() {
        let sig = nat_ord().seal().unwrap();
        let ord = sig.positivity("ord").unwrap();
        assert!(ord.strictly_positive && !ord.basic);
        let nat = sig.positivity("nat").unwrap();
        assert!(nat.strictly_positive && nat.basic);
    }

    #[test]
    fn negative_type_is_rejected_unless_allowed() {
        let mut b = SignatureBuilder::new();
        b.inductive("d", &[("c", arr(arr(t("d"), t("d")), t("d")))]);
        let rep = b.validate();
        let d = &rep.positivity["d"];
        assert!(!d.strictly_positive);
        assert!(d.violations.iter().all(|v| v.argument == 1));
        assert!(b.seal().is_err());
        b.options(SignatureOptions {
            allow_non_positive: true,
            ..Default::default()
        });
        assert!(b.seal().is_ok());
    }

    #[test]
    fn status_checks() {
        let n = t("nat");
        let ack: Name = "ack".into();
        assert!(check_status(&ack, &[n.clone(), n.clone()], &Status::new(vec![vec![1], vec![2]])).is_ok());
        assert!(check_status(&ack, &[n.clone(), n.clone()], &Status::new(vec![vec![1, 2]])).is_ok());
        assert!(matches!(
            check_status(&ack, &[n.clone(), n.clone()], &Status::new(vec![vec![1, 3]])),
            Err(StatusError::ArityExceeded { .. })
        ));
        assert!(matches!(
            check_status(&ack, &[n.clone(), n.clone()], &Status::new(vec![vec![1], vec![1]])),
            Err(StatusError::NonLinear { index: 1, .. })
        ));
        let mixed = [n.clone(), t("list")];
        assert!(matches!(
            check_status(&ack, &mixed, &Status::new(vec![vec![1, 2]])),
            Err(StatusError::MixedTypes { .. })
        ));
    }

    #[test]
    fn precedence_cycle_is_rejected() {
        let mut b = nat_ord();
        let nn = arr(t("nat"), t("nat"));
        b.symbol("f", nn.clone(), 1, None).symbol("g", nn, 1, None);
        b.greater("f", "g").greater("g", "f");
        let err = b.seal().unwrap_err();
        assert!(err.report.issues.iter().any(|i| matches!(i, ValidationIssue::Precedence(_))));
    }

    #[test]
    fn equivalent_symbols_need_equal_statuses() {
        let mut b = nat_ord();
        let nnn = arr(t("nat"), arr(t("nat"), t("nat")));
        b.symbol("f", nnn.clone(), 2, Some(Status::multiset(2)))
            .symbol("g", nnn, 2, None);
        b.equivalent("f", "g");
        let err = b.seal().unwrap_err();
        assert!(err.report.issues.iter().any(|i| matches!(i, ValidationIssue::SameClassStatus(_))));
    }

    #[test]
    fn defined_symbols_sit_above_constructors() {
        let mut b = nat_ord();
        b.symbol("plus", arr(t("nat"), arr(t("nat"), t("nat"))), 2, None);
        let sig = b.seal().unwrap();
        assert!(sig.precedence().greater("plus", "s"));
        assert!(!sig.precedence().greater("s", "plus"));
        assert!(!sig.precedence().greater("s", "z"));
    }

    #[test]
    fn status_display() {
        assert_eq!(Status::new(vec![vec![1], vec![2, 4]]).to_string(), "lex(mul 1, mul 2 4)");
    }
}
