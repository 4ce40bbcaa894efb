//! Lexer and parser for the spec-file syntax.

use std::fmt;

use thiserror::Error;

use super::ast::{Span, SpecFile, Statement, TermExpr};
use crate::signature::{PrecedenceDecl, Status};
use crate::types::{Name, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn at(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Arrow,
    RuleArrow,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Pipe,
    Equals,
    Gt,
    Tilde,
    Lambda,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "number {n}"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::RuleArrow => write!(f, "`-->`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                out.push((Tok::RuleArrow, span));
                advance(3, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, span));
                advance(2, &mut i, &mut col);
            }
            '(' | ')' | ',' | '.' | ':' | '|' | '=' | '>' | '~' | '\\' => {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '|' => Tok::Pipe,
                    '=' => Tok::Equals,
                    '>' => Tok::Gt,
                    '~' => Tok::Tilde,
                    _ => Tok::Lambda,
                };
                out.push((t, span));
                advance(1, &mut i, &mut col);
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len()
                    && (is_ident_char(chars[i])
                        || (chars[i] == '-' && chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric())))
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.parse::<usize>() {
                    Ok(n) if word.chars().all(|c| c.is_ascii_digit()) => Tok::Int(n),
                    _ => Tok::Ident(word),
                };
                out.push((tok, span));
            }
            other => {
                return Err(Diagnostic::at(span, format!("unexpected character `{other}`")));
            }
        }
    }
    out.push((Tok::Eof, Span { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(Diagnostic::at(self.span(), format!("expected {t}, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.bump() {
            Tok::Ident(s) => Ok(s.into()),
            Tok::Int(n) => Ok(n.to_string().into()),
            other => {
                self.pos -= 1;
                Err(Diagnostic::at(self.span(), format!("expected an identifier, found {other}")))
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(Diagnostic::at(self.span(), format!("expected `{kw}`, found {other}"))),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            other => {
                self.pos -= 1;
                Err(Diagnostic::at(self.span(), format!("expected a number, found {other}")))
            }
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        let dom = match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            _ => Type::Ind(self.ident()?),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    /// `if` is reserved so that a condition can follow a right-hand side.
    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s != "if",
            t => matches!(t, Tok::Int(_) | Tok::LParen | Tok::Lambda),
        }
    }

    fn term(&mut self) -> PResult<TermExpr> {
        let span = self.span();
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = TermExpr::App(Box::new(t), Box::new(a), span);
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<TermExpr> {
        let span = self.span();
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Lambda => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(TermExpr::Lambda(x, ty, Box::new(body), span))
            }
            _ => {
                let name = self.ident()?;
                if *self.peek() == Tok::LParen && self.toks[self.pos].1.follows(&self.toks[self.pos - 1].1, &name) {
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.term()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.term()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(TermExpr::Call(name, args, span))
                } else {
                    Ok(TermExpr::Ident(name, span))
                }
            }
        }
    }

    fn status(&mut self) -> PResult<Status> {
        self.keyword("lex")?;
        self.expect(Tok::LParen)?;
        let mut groups = Vec::new();
        loop {
            self.keyword("mul")?;
            let mut g = Vec::new();
            while let Tok::Int(_) = self.peek() {
                g.push(self.int()?);
            }
            if g.is_empty() {
                return Err(Diagnostic::at(self.span(), "empty `mul` group"));
            }
            groups.push(g);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Status::new(groups))
    }

    fn statement(&mut self) -> PResult<Statement> {
        let span = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            other => return Err(Diagnostic::at(span, format!("expected a statement, found {other}"))),
        };
        self.bump();
        let st = match kw.as_str() {
            "inductive" => {
                let name = self.ident()?;
                self.expect(Tok::Equals)?;
                let mut ctors = Vec::new();
                loop {
                    let c = self.ident()?;
                    self.expect(Tok::Colon)?;
                    ctors.push((c, self.ty()?));
                    if *self.peek() == Tok::Pipe {
                        self.bump();
                    } else {
                        break;
                    }
                }
                Statement::Inductive { name, constructors: ctors }
            }
            "symbol" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.keyword("arity")?;
                let arity = self.int()?;
                let status = match self.peek() {
                    Tok::Ident(s) if s == "status" => {
                        self.bump();
                        Some(self.status()?)
                    }
                    _ => None,
                };
                Statement::Symbol { name, ty, arity, status }
            }
            "precedence" => {
                let a = self.ident()?;
                let decl = match self.bump() {
                    Tok::Gt => PrecedenceDecl::Greater(a, self.ident()?),
                    Tok::Tilde => PrecedenceDecl::Equivalent(a, self.ident()?),
                    other => {
                        self.pos -= 1;
                        return Err(Diagnostic::at(self.span(), format!("expected `>` or `~`, found {other}")));
                    }
                };
                Statement::Precedence(decl)
            }
            "rule" => {
                let lhs = self.term()?;
                self.expect(Tok::RuleArrow)?;
                let rhs = self.term()?;
                let mut condition = Vec::new();
                if matches!(self.peek(), Tok::Ident(s) if s == "if") {
                    self.bump();
                    loop {
                        let u = self.term()?;
                        self.expect(Tok::Equals)?;
                        condition.push((u, self.term()?));
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                Statement::Rule { lhs, rhs, condition, span }
            }
            "term" => {
                let name = self.ident()?;
                self.expect(Tok::Equals)?;
                Statement::Term {
                    name,
                    term: self.term()?,
                }
            }
            "option" => Statement::Option(self.ident()?),
            other => return Err(Diagnostic::at(span, format!("unknown statement `{other}`"))),
        };
        if *self.peek() != Tok::Dot {
            return Err(Diagnostic::at(
                self.span(),
                format!("expected `.` to end the statement started at {}:{}, found {}", span.line, span.column, self.peek()),
            ));
        }
        self.bump();
        Ok(st)
    }
}

/// Parses a whole spec file.
pub fn parse(text: &str) -> Result<SpecFile, Diagnostic> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut statements = Vec::new();
    while *p.peek() != Tok::Eof {
        statements.push(p.statement()?);
    }
    Ok(SpecFile { statements })
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<TermExpr, Diagnostic> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(Diagnostic::at(p.span(), format!("unexpected {} after the term", p.peek())));
    }
    Ok(t)
}

/// Parses a single type.
pub fn parse_type(text: &str) -> Result<Type, Diagnostic> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return Err(Diagnostic::at(p.span(), format!("unexpected {} after the type", p.peek())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements() {
        let src = "# naturals\ninductive nat = z : nat | s : nat -> nat .\n\
                   symbol plus : nat -> nat -> nat arity 2 status lex(mul 1 2) .\n\
                   precedence plus > s .\n\
                   rule plus(X, s(Y)) --> s(plus(X, Y)) .\n\
                   option allow-constructor-rules .\n";
        let f = parse(src).unwrap();
        assert_eq!(f.statements.len(), 5);
        match &f.statements[1] {
            Statement::Symbol { arity, status, .. } => {
                assert_eq!(*arity, 2);
                assert_eq!(status.as_ref().unwrap().groups, vec![vec![1, 2]]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(&f.statements[4], Statement::Option(o) if &**o == "allow-constructor-rules"));
    }

    #[test]
    fn unterminated_statement_reports_position() {
        let err = parse("inductive nat = z : nat\nrule f(X) --> X .").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 1);
    }

    #[test]
    fn lambda_and_application() {
        let t = parse_term("\\x:nat. (F x) y").unwrap();
        let TermExpr::Lambda(_, ty, body, _) = t else { panic!() };
        assert_eq!(ty, Type::ind("nat"));
        assert!(matches!(*body, TermExpr::App(..)));
    }

    #[test]
    fn keywords_are_positional() {
        let f = parse("inductive term = var : term .").unwrap();
        assert!(matches!(&f.statements[0], Statement::Inductive { name, .. } if &**name == "term"));
    }
}
