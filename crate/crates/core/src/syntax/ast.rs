//! Abstract syntax of spec files and its printer.
//!
//! Printing then re-parsing yields an equal tree; spans never take part in equality.

use std::fmt;

use crate::signature::{PrecedenceDecl, Status};
use crate::types::{Name, Type};

/// 1-based source location.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    /// `self` starts right after the identifier `name` that starts at `prev`.
    pub(crate) fn follows(&self, prev: &Span, name: &str) -> bool {
        self.line == prev.line && self.column == prev.column + name.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermExpr {
    Ident(Name, Span),
    /// `f(t, …)`: a declared symbol at full arity.
    Call(Name, Vec<TermExpr>, Span),
    Lambda(Name, Type, Box<TermExpr>, Span),
    App(Box<TermExpr>, Box<TermExpr>, Span),
}

impl TermExpr {
    pub fn span(&self) -> Span {
        match self {
            TermExpr::Ident(_, s) | TermExpr::Call(_, _, s) | TermExpr::Lambda(_, _, _, s) | TermExpr::App(_, _, s) => *s,
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermExpr::Ident(..) | TermExpr::Call(..) => write!(f, "{self}"),
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermExpr::Ident(n, _) => write!(f, "{n}"),
            TermExpr::Call(n, args, _) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            TermExpr::Lambda(x, ty, body, _) => write!(f, "\\{x}:{ty}. {body}"),
            TermExpr::App(a, b, _) => {
                // Left spine prints flat; only the argument may need parentheses.
                match **a {
                    TermExpr::Lambda(..) => a.fmt_atom(f)?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " ")?;
                b.fmt_atom(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Inductive { name: Name, constructors: Vec<(Name, Type)> },
    Symbol { name: Name, ty: Type, arity: usize, status: Option<Status> },
    Precedence(PrecedenceDecl),
    Rule { lhs: TermExpr, rhs: TermExpr, condition: Vec<(TermExpr, TermExpr)>, span: Span },
    Term { name: Name, term: TermExpr },
    Option(Name),
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Inductive { name, constructors } => {
                write!(f, "inductive {name} =")?;
                for (i, (c, ty)) in constructors.iter().enumerate() {
                    let sep = if i == 0 { "" } else { "\n  |" };
                    write!(f, "{sep} {c} : {ty}")?;
                }
                write!(f, " .")
            }
            Statement::Symbol { name, ty, arity, status } => {
                write!(f, "symbol {name} : {ty} arity {arity}")?;
                if let Some(st) = status {
                    write!(f, " status {st}")?;
                }
                write!(f, " .")
            }
            Statement::Precedence(PrecedenceDecl::Greater(a, b)) => write!(f, "precedence {a} > {b} ."),
            Statement::Precedence(PrecedenceDecl::Equivalent(a, b)) => write!(f, "precedence {a} ~ {b} ."),
            Statement::Rule { lhs, rhs, condition, .. } => {
                write!(f, "rule {lhs} --> {rhs}")?;
                for (i, (u, v)) in condition.iter().enumerate() {
                    write!(f, "{} {u} = {v}", if i == 0 { " if" } else { "," })?;
                }
                write!(f, " .")
            }
            Statement::Term { name, term } => write!(f, "term {name} = {term} ."),
            Statement::Option(o) => write!(f, "option {o} ."),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub statements: Vec<Statement>,
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
