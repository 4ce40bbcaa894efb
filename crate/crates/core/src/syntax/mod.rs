//! Spec-file surface syntax: parsing, printing and elaboration.

mod ast;
mod elaborate;
mod parse;

pub use ast::{Span, SpecFile, Statement, TermExpr};
pub use elaborate::{declarations, elaborate_rule, elaborate_term, Document, LoadError};
pub use parse::{parse, parse_term, parse_type, Diagnostic};

use crate::rewrite::Rule;
use crate::signature::{PrecedenceDecl, SignatureBuilder};
use crate::term::Term;

/// Surface form of an internal term. Free variables must not be fresh.
pub fn term_expr(t: &Term) -> TermExpr {
    let text = t.to_string();
    parse_term(&text).unwrap_or_else(|e| panic!("printed term `{text}` does not re-parse: {e}"))
}

pub fn rule_statement(r: &Rule) -> Statement {
    Statement::Rule {
        lhs: term_expr(&r.lhs),
        rhs: term_expr(&r.rhs),
        condition: r.condition.iter().map(|(u, v)| (term_expr(u), term_expr(v))).collect(),
        span: Span::default(),
    }
}

/// Declarations of `b` followed by `rules`, in spec-file order.
pub fn spec_of(b: &SignatureBuilder, rules: &[Rule]) -> SpecFile {
    let mut statements = Vec::new();
    if b.options.allow_constructor_rules {
        statements.push(Statement::Option("allow-constructor-rules".into()));
    }
    if b.options.allow_non_positive {
        statements.push(Statement::Option("allow-non-positive".into()));
    }
    for d in &b.inductives {
        statements.push(Statement::Inductive {
            name: d.name.clone(),
            constructors: d.constructors.clone(),
        });
    }
    for d in &b.symbols {
        statements.push(Statement::Symbol {
            name: d.name.clone(),
            ty: d.ty.clone(),
            arity: d.arity,
            status: d.status.clone(),
        });
    }
    for p in &b.precedence {
        statements.push(Statement::Precedence(match p {
            PrecedenceDecl::Greater(a, c) => PrecedenceDecl::Greater(a.clone(), c.clone()),
            PrecedenceDecl::Equivalent(a, c) => PrecedenceDecl::Equivalent(a.clone(), c.clone()),
        }));
    }
    statements.extend(rules.iter().map(rule_statement));
    SpecFile { statements }
}
