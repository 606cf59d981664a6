//! Surface syntax: parsing and printing.
//!
//! ```text
//! term := atom+                      (application, left associative)
//! atom := ident | "\" ident "." term | "λ" ident "." term | "(" term ")"
//! ```
//!
//! An abstraction body extends as far right as possible.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::term::{Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub offset: usize,
    pub message: String,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ' || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\''
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    binders: Vec<String>,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if is_ident_start(c) => {
                let start = self.pos;
                while self.pos < self.chars.len() && is_ident_continue(self.chars[self.pos]) {
                    self.pos += 1;
                }
                Ok(self.chars[start..self.pos].iter().collect())
            }
            Some(c) => self.error(format!("expected identifier, found '{c}'")),
            None => self.error("expected identifier, found end of input"),
        }
    }

    fn starts_atom(c: char) -> bool {
        is_ident_start(c) || c == '\\' || c == 'λ' || c == '('
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = match self.peek() {
            Some(c) if Self::starts_atom(c) => self.atom()?,
            Some(c) => return self.error(format!("expected a term, found '{c}'")),
            None => return self.error("expected a term, found end of input"),
        };
        while let Some(c) = self.peek() {
            if !Self::starts_atom(c) {
                break;
            }
            acc = Term::app(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('\\') | Some('λ') => {
                self.pos += 1;
                let name = self.ident()?;
                match self.peek() {
                    Some('.') => self.pos += 1,
                    Some(c) => return self.error(format!("expected '.', found '{c}'")),
                    None => return self.error("expected '.', found end of input"),
                }
                self.binders.push(name);
                let body = self.term();
                self.binders.pop();
                Ok(Term::abs(body?))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.term()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(c) => self.error(format!("expected ')', found '{c}'")),
                    None => self.error("expected ')', found end of input"),
                }
            }
            _ => {
                let name = self.ident()?;
                Ok(match self.binders.iter().rev().position(|b| *b == name) {
                    Some(index) => Term::bound(index),
                    None => Term::free(&name),
                })
            }
        }
    }
}

/// Parses surface syntax into a term. Unbound identifiers become free variables.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        binders: Vec::new(),
    };
    let t = p.term()?;
    match p.peek() {
        None => Ok(t),
        Some(c) => p.error(format!("unexpected '{c}'")),
    }
}

/// Renders a term in parseable surface syntax, naming binders `x0, x1, ...`
/// by nesting level.
pub fn print_term(t: &Term) -> String {
    t.to_string()
}

fn binder_prefix(t: &Term) -> String {
    let free: HashSet<String> = t.free_names().iter().map(|n| n.to_string()).collect();
    let mut prefix = String::from("x");
    loop {
        let clash = free.iter().any(|n| {
            n.strip_prefix(prefix.as_str())
                .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
        });
        if !clash {
            return prefix;
        }
        prefix.push('_');
    }
}

struct Printer<'a> {
    prefix: &'a str,
}

impl Printer<'_> {
    fn term(&self, t: &Term, depth: usize, out: &mut String) {
        match t.kind() {
            TermKind::Abs(body) => {
                out.push('\\');
                out.push_str(self.prefix);
                out.push_str(&depth.to_string());
                out.push('.');
                self.term(body, depth + 1, out);
            }
            TermKind::App(f, a) => {
                if f.is_abs() {
                    out.push('(');
                    self.term(f, depth, out);
                    out.push(')');
                } else {
                    self.term(f, depth, out);
                }
                out.push(' ');
                if a.is_value() && !a.is_abs() {
                    self.term(a, depth, out);
                } else {
                    out.push('(');
                    self.term(a, depth, out);
                    out.push(')');
                }
            }
            TermKind::Bound(i) => {
                // Out-of-scope indices cannot be named; print them raw so the
                // output is at least diagnosable.
                match depth.checked_sub(i + 1) {
                    Some(level) => {
                        out.push_str(self.prefix);
                        out.push_str(&level.to_string());
                    }
                    None => {
                        out.push('#');
                        out.push_str(&i.to_string());
                    }
                }
            }
            TermKind::Free(n) => out.push_str(n),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = binder_prefix(self);
        let mut out = String::new();
        Printer { prefix: &prefix }.term(self, 0, &mut out);
        f.write_str(&out)
    }
}
