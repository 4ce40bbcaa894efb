//! Elaboration of parsed spec files into a signature, rules and named terms.
//!
//! Identifiers that are neither bound nor declared symbols are free variables.
//! Their types are inferred by first-order unification, per statement.

use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use super::ast::{Span, SpecFile, Statement, TermExpr};
use super::parse::{parse, parse_term, Diagnostic};
use crate::rewrite::{Rule, RuleSystem};
use crate::signature::{Signature, SignatureBuilder, SignatureOptions, ValidationError, ValidationReport};
use crate::term::{Term, Var};
use crate::types::{Name, Type};

#[derive(Debug, Clone, Error)]
pub enum LoadError {
    /// Lexical, grammatical or typing error.
    #[error("{0}")]
    Syntax(Diagnostic),
    /// Declarations are well-formed but the signature fails validation.
    #[error(transparent)]
    Signature(ValidationError),
    /// A rule violates the well-formedness conditions.
    #[error("{0}")]
    Rule(Diagnostic),
}

impl LoadError {
    /// Validation failures are verdicts on well-formed input; the rest are input errors.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, LoadError::Signature(_))
    }
}

/// A fully elaborated spec file.
#[derive(Clone)]
pub struct Document {
    pub spec: SpecFile,
    pub system: RuleSystem,
    pub terms: IndexMap<Name, Term>,
    /// Lint output; never fatal.
    pub warnings: Vec<Diagnostic>,
    pub validation: ValidationReport,
}

impl Document {
    pub fn signature(&self) -> &Signature {
        self.system.signature()
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        self.system.signature_arc()
    }

    pub fn rules(&self) -> &[Rule] {
        self.system.rules()
    }

    /// Parses and elaborates a closed or open term against this signature.
    pub fn term(&self, text: &str) -> Result<Term, Diagnostic> {
        elaborate_term(self.signature(), &parse_term(text)?)
    }

    pub fn parse(text: &str) -> Result<Document, LoadError> {
        let spec = parse(text).map_err(LoadError::Syntax)?;
        Document::elaborate(spec)
    }

    pub fn elaborate(spec: SpecFile) -> Result<Document, LoadError> {
        let builder = declarations(&spec).map_err(LoadError::Syntax)?;
        let validation = builder.validate();
        let sig = Arc::new(builder.seal().map_err(LoadError::Signature)?);
        let mut rules = Vec::new();
        let mut spans = Vec::new();
        let mut terms = IndexMap::new();
        let mut warnings = Vec::new();
        for st in &spec.statements {
            match st {
                Statement::Rule { lhs, rhs, condition, span } => {
                    let (rule, lint) = elaborate_rule(&sig, lhs, rhs, condition).map_err(LoadError::Syntax)?;
                    rules.push(rule);
                    spans.push(*span);
                    warnings.extend(lint);
                }
                Statement::Term { name, term } => {
                    let t = elaborate_term(&sig, term).map_err(LoadError::Syntax)?;
                    if terms.insert(name.clone(), t).is_some() {
                        return Err(LoadError::Syntax(Diagnostic::at(term.span(), format!("term {name} defined twice"))));
                    }
                }
                _ => {}
            }
        }
        let system = RuleSystem::new(sig, rules)
            .map_err(|e| LoadError::Rule(Diagnostic::at(spans[e.index - 1], e.to_string())))?;
        Ok(Document {
            spec,
            system,
            terms,
            warnings,
            validation,
        })
    }
}

/// Collects declarations and options into a builder without validating them.
pub fn declarations(spec: &SpecFile) -> Result<SignatureBuilder, Diagnostic> {
    let mut b = SignatureBuilder::new();
    let mut options = SignatureOptions::default();
    for st in &spec.statements {
        match st {
            Statement::Inductive { name, constructors } => {
                b.inductives.push(crate::signature::InductiveDecl {
                    name: name.clone(),
                    constructors: constructors.clone(),
                });
            }
            Statement::Symbol { name, ty, arity, status } => {
                b.symbols.push(crate::signature::SymbolDecl {
                    name: name.clone(),
                    ty: ty.clone(),
                    arity: *arity,
                    status: status.clone(),
                });
            }
            Statement::Precedence(p) => b.precedence.push(p.clone()),
            Statement::Option(o) => match &**o {
                "allow-constructor-rules" => options.allow_constructor_rules = true,
                "allow-non-positive" => options.allow_non_positive = true,
                other => return Err(Diagnostic::at(Span::default(), format!("unknown option `{other}`"))),
            },
            Statement::Rule { .. } | Statement::Term { .. } => {}
        }
    }
    b.options = options;
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Ind(Name),
    Arrow(Box<Ty>, Box<Ty>),
    Meta(usize),
}

impl Ty {
    fn of(t: &Type) -> Ty {
        match t {
            Type::Ind(n) => Ty::Ind(n.clone()),
            Type::Arrow(d, c) => Ty::Arrow(Box::new(Ty::of(d)), Box::new(Ty::of(c))),
        }
    }
}

#[derive(Default, Clone)]
struct Unifier {
    metas: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.metas.push(None);
        Ty::Meta(self.metas.len() - 1)
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(m) = t {
            match &self.metas[m] {
                Some(s) => t = s.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Meta(k) => k == m,
            Ty::Ind(_) => false,
            Ty::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        match (self.shallow(a), self.shallow(b)) {
            (Ty::Meta(m), Ty::Meta(k)) if m == k => true,
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(m, &t) {
                    return false;
                }
                self.metas[m] = Some(t);
                true
            }
            (Ty::Ind(x), Ty::Ind(y)) => x == y,
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => self.unify(&a1, &a2) && self.unify(&b1, &b2),
            _ => false,
        }
    }

    fn resolve(&self, t: &Ty) -> Option<Type> {
        match self.shallow(t) {
            Ty::Meta(_) => None,
            Ty::Ind(n) => Some(Type::Ind(n)),
            Ty::Arrow(a, b) => Some(Type::arrow(self.resolve(&a)?, self.resolve(&b)?)),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.shallow(t) {
            Ty::Meta(m) => format!("?{m}"),
            Ty::Ind(n) => n.to_string(),
            Ty::Arrow(a, b) => {
                let d = self.show(&a);
                let d = if matches!(self.shallow(&a), Ty::Arrow(..)) { format!("({d})") } else { d };
                format!("{d} -> {}", self.show(&b))
            }
        }
    }
}

struct Elab<'a> {
    sig: &'a Signature,
    u: Unifier,
    /// Free variables in order of first use.
    vars: IndexMap<Name, (Ty, Span)>,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature) -> Self {
        Elab {
            sig,
            u: Unifier::default(),
            vars: IndexMap::new(),
        }
    }

    fn infer(&mut self, e: &TermExpr, env: &mut Vec<(Name, Type)>) -> Result<Ty, Diagnostic> {
        match e {
            TermExpr::Ident(n, span) => {
                if let Some((_, t)) = env.iter().rev().find(|(x, _)| x == n) {
                    return Ok(Ty::of(t));
                }
                if let Some(sym) = self.sig.symbol(n) {
                    if sym.arity() > 0 {
                        return Err(Diagnostic::at(
                            *span,
                            format!("symbol {n} has arity {} and cannot be partially applied", sym.arity()),
                        ));
                    }
                    return Ok(Ty::of(&sym.ty()));
                }
                if let Some((t, _)) = self.vars.get(n) {
                    return Ok(t.clone());
                }
                let t = self.u.fresh();
                self.vars.insert(n.clone(), (t.clone(), *span));
                Ok(t)
            }
            TermExpr::Call(n, args, span) => {
                let Some(sym) = self.sig.symbol(n).cloned() else {
                    return Err(Diagnostic::at(*span, format!("{n} is not a declared symbol")));
                };
                if env.iter().any(|(x, _)| x == n) {
                    return Err(Diagnostic::at(*span, format!("{n} is shadowed by a bound variable")));
                }
                if sym.arity() != args.len() {
                    return Err(Diagnostic::at(
                        *span,
                        format!("symbol {n} expects {} arguments, got {}", sym.arity(), args.len()),
                    ));
                }
                for (a, want) in args.iter().zip(sym.arg_types()) {
                    let got = self.infer(a, env)?;
                    if !self.u.unify(&got, &Ty::of(want)) {
                        return Err(Diagnostic::at(
                            a.span(),
                            format!("argument {a} of {n} has type {}, expected {want}", self.u.show(&got)),
                        ));
                    }
                }
                Ok(Ty::of(sym.result()))
            }
            TermExpr::Lambda(x, ty, body, _) => {
                for n in ty.inductives() {
                    if !self.sig.is_inductive(&n) {
                        return Err(Diagnostic::at(e.span(), format!("unknown type {n}")));
                    }
                }
                env.push((x.clone(), ty.clone()));
                let b = self.infer(body, env);
                env.pop();
                Ok(Ty::Arrow(Box::new(Ty::of(ty)), Box::new(b?)))
            }
            TermExpr::App(f, a, span) => {
                let tf = self.infer(f, env)?;
                let ta = self.infer(a, env)?;
                let r = self.u.fresh();
                let want = Ty::Arrow(Box::new(ta.clone()), Box::new(r.clone()));
                if !self.u.unify(&tf, &want) {
                    return Err(Diagnostic::at(
                        *span,
                        format!(
                            "cannot apply {f} of type {} to {a} of type {}",
                            self.u.show(&tf),
                            self.u.show(&ta)
                        ),
                    ));
                }
                Ok(r)
            }
        }
    }

    /// Unifies when possible; a mismatch is left for the well-formedness check.
    fn try_unify(&mut self, a: &Ty, b: &Ty) {
        let saved = self.u.clone();
        if !self.u.unify(a, b) {
            self.u = saved;
        }
    }

    fn resolve_vars(&self) -> Result<IndexMap<Name, Var>, Diagnostic> {
        let mut out = IndexMap::new();
        for (n, (t, span)) in &self.vars {
            let ty = self
                .u
                .resolve(t)
                .ok_or_else(|| Diagnostic::at(*span, format!("cannot determine the type of variable {n}")))?;
            out.insert(n.clone(), Var::new(n.clone(), ty));
        }
        Ok(out)
    }

    fn build(&self, e: &TermExpr, vars: &IndexMap<Name, Var>, env: &mut Vec<(Name, Var)>) -> Result<Term, Diagnostic> {
        let err = |m: String| Diagnostic::at(e.span(), m);
        match e {
            TermExpr::Ident(n, _) => {
                if let Some((_, v)) = env.iter().rev().find(|(x, _)| x == n) {
                    return Ok(Term::var(v.clone()));
                }
                if let Some(sym) = self.sig.symbol(n) {
                    return Term::constant(sym.clone()).map_err(|e| err(e.to_string()));
                }
                Ok(Term::var(vars[n].clone()))
            }
            TermExpr::Call(n, args, _) => {
                let sym = self.sig.symbol(n).expect("checked during inference").clone();
                let args = args
                    .iter()
                    .map(|a| self.build(a, vars, env))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::fun(sym, args).map_err(|e| err(e.to_string()))
            }
            TermExpr::Lambda(x, ty, body, _) => {
                let v = Var::fresh(x.clone(), ty.clone());
                env.push((x.clone(), v.clone()));
                let b = self.build(body, vars, env);
                env.pop();
                Ok(Term::lambda(&v, b?))
            }
            TermExpr::App(f, a, _) => {
                let f = self.build(f, vars, env)?;
                let a = self.build(a, vars, env)?;
                Term::app(f, a).map_err(|e| err(e.to_string()))
            }
        }
    }
}

/// Elaborates one term; free variables must have inferable types.
pub fn elaborate_term(sig: &Signature, e: &TermExpr) -> Result<Term, Diagnostic> {
    let mut el = Elab::new(sig);
    el.infer(e, &mut Vec::new())?;
    let vars = el.resolve_vars()?;
    el.build(e, &vars, &mut Vec::new())
}

/// Elaborates a rule, returning lint warnings for lowercase variables.
pub fn elaborate_rule(
    sig: &Signature,
    lhs: &TermExpr,
    rhs: &TermExpr,
    condition: &[(TermExpr, TermExpr)],
) -> Result<(Rule, Vec<Diagnostic>), Diagnostic> {
    let mut el = Elab::new(sig);
    let env = &mut Vec::new();
    let tl = el.infer(lhs, env)?;
    let tr = el.infer(rhs, env)?;
    let mut tc = Vec::new();
    for (u, v) in condition {
        tc.push((el.infer(u, env)?, el.infer(v, env)?));
    }
    el.try_unify(&tl, &tr);
    for (a, b) in &tc {
        el.try_unify(a, b);
    }
    let vars = el.resolve_vars()?;
    let lint = el
        .vars
        .iter()
        .filter(|(n, _)| n.chars().next().is_some_and(|c| c.is_lowercase()))
        .map(|(n, (_, span))| Diagnostic::at(*span, format!("rule variable {n} is lowercase; did you mean a symbol?")))
        .collect();
    let env = &mut Vec::new();
    let l = el.build(lhs, &vars, env)?;
    let r = el.build(rhs, &vars, env)?;
    let mut cond = Vec::new();
    for (u, v) in condition {
        cond.push((el.build(u, &vars, env)?, el.build(v, &vars, env)?));
    }
    Ok((Rule::conditional(l, r, cond), lint))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "inductive nat = z : nat | s : nat -> nat .\n\
                       inductive ord = o : ord | succ : ord -> ord | lim : (nat -> ord) -> ord .\n";

    #[test]
    fn addition_rule() {
        let src = format!(
            "{NAT}symbol plus : ord -> ord -> ord arity 2 .\n\
             rule plus(X, succ(Y)) --> succ(plus(X, Y)) .\n\
             rule plus(X, lim(F)) --> lim(\\n:nat. plus(X, F n)) ."
        );
        let doc = Document::parse(&src).unwrap();
        assert_eq!(doc.rules().len(), 2);
        assert_eq!(doc.rules()[1].to_string(), "plus(X, lim(F)) --> lim(\\n:nat. plus(X, (F n)))");
        assert!(doc.warnings.is_empty());
    }

    #[test]
    fn type_mismatch_is_a_rule_error() {
        let src = "inductive nat = z : nat | s : nat -> nat .\ninductive bool = t : bool | f : bool .\n\
                   symbol g : nat -> nat arity 1 .\nrule g(X) --> t .";
        let Err(LoadError::Rule(d)) = Document::parse(src) else { panic!() };
        assert!(d.message.contains("condition 3"), "{d}");
        assert_eq!(d.line, 4);
    }

    #[test]
    fn partial_application_rejected() {
        let src = format!("{NAT}symbol plus : nat -> nat -> nat arity 2 .\nterm t = plus z .");
        let Err(LoadError::Syntax(d)) = Document::parse(&src) else { panic!() };
        assert!(d.message.contains("partially applied"));
    }

    #[test]
    fn lowercase_variable_linted() {
        let src = format!("{NAT}symbol p : nat -> nat arity 1 .\nrule p(x) --> x .");
        let doc = Document::parse(&src).unwrap();
        assert_eq!(doc.warnings.len(), 1);
    }

    #[test]
    fn uninferable_variable() {
        let src = format!("{NAT}term t = X .");
        assert!(matches!(Document::parse(&src), Err(LoadError::Syntax(_))));
    }
}
