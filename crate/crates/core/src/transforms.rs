//! Source-to-source generators: recursors, curried wrappers and the
//! encoding of conditional rules.
//!
//! Generators are pure. Each returns a [`Delta`] holding the new declarations
//! and rules; the rules are built over the extended, sealed signature.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::rewrite::Rule;
use crate::signature::{PrecedenceDecl, Signature, SignatureBuilder, SymbolDecl, ValidationError};
use crate::syntax::{rule_statement, Statement};
use crate::term::{Term, TypeError, Var};
use crate::types::{Name, Type};

#[derive(Debug, Clone, Error)]
pub enum TransformError {
    #[error("{0} is not an inductive type")]
    UnknownType(Name),
    #[error("type {0} is not strictly positive; no recursor is generated")]
    NotStrictlyPositive(Name),
    #[error("target type mentions undeclared type {0}")]
    UnknownTarget(Name),
    #[error("symbol {0} already exists")]
    NameClash(Name),
    #[error("symbol {0} is not declared")]
    UnknownSymbol(Name),
    #[error("symbol {0} has arity 0 and needs no curried form")]
    Arity(Name),
    #[error("rule {index}: condition variables {vars:?} do not occur in the left-hand side")]
    Encoding { index: usize, vars: Vec<String> },
    #[error(transparent)]
    Signature(#[from] ValidationError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// New declarations plus rules over the extended signature.
#[derive(Debug, Clone)]
pub struct Delta {
    pub symbols: Vec<SymbolDecl>,
    pub precedence: Vec<PrecedenceDecl>,
    pub rules: Vec<Rule>,
    pub signature: Arc<Signature>,
}

impl Delta {
    /// `base` extended with the new declarations.
    pub fn extend(&self, base: &SignatureBuilder) -> SignatureBuilder {
        let mut b = base.clone();
        b.symbols.extend(self.symbols.iter().cloned());
        b.precedence.extend(self.precedence.iter().cloned());
        b
    }

    /// Spec-file statements for the delta, declarations first.
    pub fn statements(&self) -> Vec<Statement> {
        let mut out: Vec<Statement> = self
            .symbols
            .iter()
            .map(|d| Statement::Symbol {
                name: d.name.clone(),
                ty: d.ty.clone(),
                arity: d.arity,
                status: d.status.clone(),
            })
            .collect();
        out.extend(self.precedence.iter().cloned().map(Statement::Precedence));
        out.extend(self.rules.iter().map(rule_statement));
        out
    }
}

/// Identifier-safe rendering of a type: `nat`, `nat_to_ord`, `Lnat_to_ordR_to_ord`.
pub fn mangle(t: &Type) -> String {
    match t {
        Type::Ind(n) => n.to_string(),
        Type::Arrow(d, c) => {
            let dom = if d.is_arrow() { format!("L{}R", mangle(d)) } else { mangle(d) };
            format!("{dom}_to_{}", mangle(c))
        }
    }
}

/// Variable names that cannot be confused with a declared symbol.
struct Names<'a> {
    sig: &'a Signature,
    taken: BTreeSet<Name>,
}

impl<'a> Names<'a> {
    fn new(sig: &'a Signature, taken: impl IntoIterator<Item = Name>) -> Self {
        Names {
            sig,
            taken: taken.into_iter().collect(),
        }
    }

    fn var(&mut self, base: &str, ty: Type) -> Var {
        let mut name = base.to_string();
        while self.sig.symbol(&name).is_some() || self.taken.contains(name.as_str()) {
            name.push('\'');
        }
        self.taken.insert(name.as_str().into());
        Var::new(name, ty)
    }
}

fn seal_delta(
    sig: &Signature,
    symbols: Vec<SymbolDecl>,
    precedence: Vec<PrecedenceDecl>,
) -> Result<(Vec<SymbolDecl>, Vec<PrecedenceDecl>, Arc<Signature>), TransformError> {
    for d in &symbols {
        if sig.symbol(&d.name).is_some() {
            return Err(TransformError::NameClash(d.name.clone()));
        }
    }
    let mut b = sig.to_builder();
    b.symbols.extend(symbols.iter().cloned());
    b.precedence.extend(precedence.iter().cloned());
    Ok((symbols, precedence, Arc::new(b.seal()?)))
}

// ---------------------------------------------------------------------------
// Recursors

/// Recursors on one dependency class for one target type.
#[derive(Debug, Clone)]
pub struct RecursorBundle {
    /// Class members with their recursor names, in declaration order.
    pub recursors: Vec<(Name, Name)>,
    /// Branch-argument types, one per constructor of the class.
    pub branches: Vec<(Name, Type)>,
    /// Hypothesis count per branch.
    pub hypotheses: Vec<usize>,
    pub delta: Delta,
}

pub fn recursor_name(inductive: &str, target: &Type) -> String {
    format!("{inductive}rec_{}", mangle(target))
}

/// Recursors for the class of `member` into `target`.
///
/// For `C : a1 -> … -> ak -> s` the branch has type `a1 -> … -> ak -> h… -> target`,
/// with one hypothesis `b⃗ -> target` per argument `b⃗ -> s'`, `s'` in the class.
pub fn generate_recursors(sig: &Signature, member: &str, target: &Type) -> Result<RecursorBundle, TransformError> {
    if !sig.is_inductive(member) {
        return Err(TransformError::UnknownType(member.into()));
    }
    if let Some(n) = target.inductives().into_iter().find(|n| !sig.is_inductive(n)) {
        return Err(TransformError::UnknownTarget(n));
    }
    let dep = sig.dependency();
    let class: Vec<Name> = sig
        .inductive_names()
        .filter(|n| dep.equiv(n, member))
        .cloned()
        .collect();
    if let Some(bad) = class.iter().find(|n| !sig.is_strictly_positive(n)) {
        return Err(TransformError::NotStrictlyPositive(bad.clone()));
    }
    let in_class = |t: &Type| -> Option<(Vec<Type>, Name)> {
        let (doms, res) = t.uncurry();
        class.contains(res).then(|| (doms.into_iter().cloned().collect(), res.clone()))
    };

    let mut branches = Vec::new();
    let mut hypotheses = Vec::new();
    for s in &class {
        for c in sig.constructors(s) {
            let mut args: Vec<Type> = c.arg_types().to_vec();
            let hyps: Vec<Type> = c
                .arg_types()
                .iter()
                .filter_map(&in_class)
                .map(|(bs, _)| Type::arrows(&bs, target.clone()))
                .collect();
            hypotheses.push(hyps.len());
            args.extend(hyps);
            branches.push((c.name().clone(), Type::arrows(&args, target.clone())));
        }
    }

    let recursors: Vec<(Name, Name)> = class
        .iter()
        .map(|s| (s.clone(), Name::from(recursor_name(s, target).as_str())))
        .collect();
    let branch_types: Vec<Type> = branches.iter().map(|(_, t)| t.clone()).collect();
    let symbols = recursors
        .iter()
        .map(|(s, r)| {
            let mut args = branch_types.clone();
            args.push(Type::ind(s.clone()));
            SymbolDecl {
                name: r.clone(),
                ty: Type::arrows(&args, target.clone()),
                arity: args.len(),
                status: None,
            }
        })
        .collect();
    let precedence = recursors
        .windows(2)
        .map(|w| PrecedenceDecl::Equivalent(w[0].1.clone(), w[1].1.clone()))
        .collect();
    let (symbols, precedence, ext) = seal_delta(sig, symbols, precedence)?;

    let mut names = Names::new(&ext, []);
    let branch_vars: Vec<Var> = branch_types
        .iter()
        .enumerate()
        .map(|(i, t)| names.var(&format!("X{}", i + 1), t.clone()))
        .collect();
    let branch_terms: Vec<Term> = branch_vars.iter().cloned().map(Term::var).collect();
    let rec_of = |s: &Name| {
        let r = &recursors.iter().find(|(m, _)| m == s).expect("class member").1;
        ext.symbol(r).expect("declared").clone()
    };

    let mut rules = Vec::new();
    let mut k = 0;
    for s in &class {
        let rec = rec_of(s);
        for c in ext.constructors(s) {
            let mut local = Names::new(&ext, names.taken.iter().cloned());
            let us: Vec<Var> = c
                .arg_types()
                .iter()
                .enumerate()
                .map(|(i, t)| local.var(&format!("U{}", i + 1), t.clone()))
                .collect();
            let lhs_args: Vec<Term> = branch_terms
                .iter()
                .cloned()
                .chain([Term::fun(c.clone(), us.iter().cloned().map(Term::var).collect())?])
                .collect();
            let lhs = Term::fun(rec.clone(), lhs_args)?;

            let mut rhs_args: Vec<Term> = us.iter().cloned().map(Term::var).collect();
            for (u, t) in us.iter().zip(c.arg_types()) {
                let Some((bs, s2)) = in_class(t) else { continue };
                let ys: Vec<Var> = bs
                    .iter()
                    .enumerate()
                    .map(|(j, b)| Var::new(format!("y{}", j + 1), b.clone()))
                    .collect();
                let applied = Term::apps(Term::var(u.clone()), ys.iter().cloned().map(Term::var))?;
                let call_args: Vec<Term> = branch_terms.iter().cloned().chain([applied]).collect();
                let mut h = Term::fun(rec_of(&s2), call_args)?;
                for y in ys.iter().rev() {
                    h = Term::lambda(y, h);
                }
                rhs_args.push(h);
            }
            let rhs = Term::apps(branch_terms[k].clone(), rhs_args)?;
            rules.push(Rule::new(lhs, rhs));
            k += 1;
        }
    }
    Ok(RecursorBundle {
        recursors,
        branches,
        hypotheses,
        delta: Delta {
            symbols,
            precedence,
            rules,
            signature: ext,
        },
    })
}

// ---------------------------------------------------------------------------
// Currying

pub fn curried_name(f: &str) -> String {
    format!("{f}_c")
}

/// `f_c --> \x1 … xn. f(x1, …, xn)`, with `f_c` of arity 0 placed above `f`.
pub fn currify(sig: &Signature, f: &str) -> Result<Delta, TransformError> {
    let sym = sig.symbol(f).ok_or_else(|| TransformError::UnknownSymbol(f.into()))?;
    if sym.arity() == 0 {
        return Err(TransformError::Arity(f.into()));
    }
    let name: Name = curried_name(f).as_str().into();
    let symbols = vec![SymbolDecl {
        name: name.clone(),
        ty: sym.ty(),
        arity: 0,
        status: None,
    }];
    let precedence = vec![PrecedenceDecl::Greater(name.clone(), f.into())];
    let (symbols, precedence, ext) = seal_delta(sig, symbols, precedence)?;
    let sym = ext.symbol(f).expect("declared").clone();
    let xs: Vec<Var> = sym
        .arg_types()
        .iter()
        .enumerate()
        .map(|(i, t)| Var::new(format!("x{}", i + 1), t.clone()))
        .collect();
    let mut rhs = Term::fun(sym, xs.iter().cloned().map(Term::var).collect())?;
    for x in xs.iter().rev() {
        rhs = Term::lambda(x, rhs);
    }
    let lhs = Term::constant(ext.symbol(&name).expect("declared").clone())?;
    Ok(Delta {
        symbols,
        precedence,
        rules: vec![Rule::new(lhs, rhs)],
        signature: ext,
    })
}

// ---------------------------------------------------------------------------
// Conditional rules

/// Name of the equality-test symbol for condition types `ts` and result `t`.
pub fn eq_name(ts: &[Type], t: &Type) -> String {
    let mut s = format!("eq{}", ts.len());
    for x in ts.iter().chain([t]) {
        s.push('_');
        s.push_str(&mangle(x));
    }
    s
}

/// Result of [`encode_conditional`]: the rewritten rule list replaces each
/// conditional rule in place and ends with the equality-test rules.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub delta: Delta,
    /// All rules, over the extended signature.
    pub rules: Vec<Rule>,
    /// 0-based indices of the rules that were rewritten.
    pub rewritten: Vec<usize>,
}

/// `l --> r if u1 = v1, …` becomes `l --> eqN(u1, v1, …, r)` plus
/// `eqN(X1, X1, …, Z) --> Z`. Equality symbols sit below every defined symbol.
pub fn encode_conditional(sig: &Signature, rules: &[Rule]) -> Result<Encoded, TransformError> {
    let mut wanted: Vec<(Name, Vec<Type>, Type)> = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if !r.is_conditional() {
            continue;
        }
        let lhs_fv = r.lhs.free_vars();
        let escaped: Vec<String> = r
            .condition
            .iter()
            .flat_map(|(u, v)| u.free_vars().into_iter().chain(v.free_vars()))
            .filter(|x| !lhs_fv.contains(x))
            .map(|x| x.to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !escaped.is_empty() {
            return Err(TransformError::Encoding { index: i + 1, vars: escaped });
        }
        let ts: Vec<Type> = r.condition.iter().map(|(u, _)| u.ty().clone()).collect();
        let name: Name = eq_name(&ts, r.rhs.ty()).as_str().into();
        if !wanted.iter().any(|(n, _, _)| *n == name) {
            wanted.push((name, ts, r.rhs.ty().clone()));
        }
    }
    let fresh: Vec<&(Name, Vec<Type>, Type)> = wanted.iter().filter(|(n, _, _)| sig.symbol(n).is_none()).collect();
    let symbols: Vec<SymbolDecl> = fresh
        .iter()
        .map(|(n, ts, t)| {
            let args: Vec<Type> = ts.iter().flat_map(|x| [x.clone(), x.clone()]).chain([t.clone()]).collect();
            SymbolDecl {
                name: n.clone(),
                ty: Type::arrows(&args, t.clone()),
                arity: args.len(),
                status: None,
            }
        })
        .collect();
    let defined: Vec<Name> = sig
        .symbols()
        .filter(|s| !s.is_constructor() && !wanted.iter().any(|(n, _, _)| n == s.name()))
        .map(|s| s.name().clone())
        .collect();
    let precedence: Vec<PrecedenceDecl> = fresh
        .iter()
        .flat_map(|(n, _, _)| defined.iter().map(move |f| PrecedenceDecl::Greater(f.clone(), n.clone())))
        .collect();
    let (symbols, precedence, ext) = seal_delta(sig, symbols, precedence)?;

    let mut out = Vec::new();
    let mut rewritten = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if !r.is_conditional() {
            out.push(r.clone());
            continue;
        }
        let ts: Vec<Type> = r.condition.iter().map(|(u, _)| u.ty().clone()).collect();
        let eq = ext.symbol(&eq_name(&ts, r.rhs.ty())).expect("declared").clone();
        let args: Vec<Term> = r
            .condition
            .iter()
            .flat_map(|(u, v)| [u.clone(), v.clone()])
            .chain([r.rhs.clone()])
            .collect();
        out.push(Rule::new(r.lhs.clone(), Term::fun(eq, args)?));
        rewritten.push(i);
    }
    let mut eq_rules = Vec::new();
    for (n, ts, t) in &wanted {
        if rules.iter().any(|r| r.head().is_some_and(|h| h.name() == n)) {
            continue;
        }
        let mut names = Names::new(&ext, []);
        let xs: Vec<Var> = ts
            .iter()
            .enumerate()
            .map(|(i, x)| names.var(&format!("X{}", i + 1), x.clone()))
            .collect();
        let z = names.var("Z", t.clone());
        let args: Vec<Term> = xs
            .iter()
            .flat_map(|x| [Term::var(x.clone()), Term::var(x.clone())])
            .chain([Term::var(z.clone())])
            .collect();
        let eq = ext.symbol(n).expect("declared").clone();
        eq_rules.push(Rule::new(Term::fun(eq, args)?, Term::var(z)));
    }
    out.extend(eq_rules.iter().cloned());
    Ok(Encoded {
        delta: Delta {
            symbols,
            precedence,
            rules: eq_rules,
            signature: ext,
        },
        rules: out,
        rewritten,
    })
}
