//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := implies
//! implies := or ("->" implies)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | quant | atom | "(" formula ")"
//! quant   := ("A"|"E"|"E=" N|"AS"|"ES"|"ASW"|"ESW") name "." formula
//! atom    := "true" | "false" | name "(" name ("," name)* ")" | name "=" name
//! ```
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Formula, SetKind, Term};
use super::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected}, used with {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Equals,
    Eof,
}

const KEYWORDS: &[&str] = &["A", "E", "AS", "ES", "ASW", "ESW", "true", "false"];

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => adv(1, &mut i),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                toks.push((Tok::LParen, l0, c0));
                adv(1, &mut i)
            }
            ')' => {
                toks.push((Tok::RParen, l0, c0));
                adv(1, &mut i)
            }
            ',' => {
                toks.push((Tok::Comma, l0, c0));
                adv(1, &mut i)
            }
            '.' => {
                toks.push((Tok::Dot, l0, c0));
                adv(1, &mut i)
            }
            '~' => {
                toks.push((Tok::Tilde, l0, c0));
                adv(1, &mut i)
            }
            '&' => {
                toks.push((Tok::Amp, l0, c0));
                adv(1, &mut i)
            }
            '|' => {
                toks.push((Tok::Bar, l0, c0));
                adv(1, &mut i)
            }
            '=' => {
                toks.push((Tok::Equals, l0, c0));
                adv(1, &mut i)
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, l0, c0));
                adv(2, &mut i)
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s
                    .parse()
                    .map_err(|_| err(l0, c0, format!("integer `{s}` out of range")))?;
                toks.push((Tok::Int(n), l0, c0));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                toks.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    /// Set variables in scope, innermost last.
    sets: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, col) = &self.toks[self.pos];
        Err(ParseError::Syntax {
            line: *line,
            col: *col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or(parts))
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(kw) if self.is_quantifier(&kw) => self.quant(&kw),
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(_) => self.atom(),
            _ => self.error("expected a formula"),
        }
    }

    fn is_quantifier(&self, kw: &str) -> bool {
        matches!(kw, "A" | "E" | "AS" | "ES" | "ASW" | "ESW")
    }

    fn quant(&mut self, kw: &str) -> Result<Formula, ParseError> {
        self.bump();
        let count = if kw == "E" && *self.peek() == Tok::Equals {
            self.bump();
            match self.bump() {
                Tok::Int(n) => Some(n),
                _ => {
                    self.pos -= 1;
                    return self.error("expected a count after `E=`");
                }
            }
        } else {
            None
        };
        let var = self.name("a variable name")?;
        self.expect(Tok::Dot, "`.` after quantified variable")?;
        let set_kind = match kw {
            "AS" | "ES" => Some(SetKind::Strong),
            "ASW" | "ESW" => Some(SetKind::Weak),
            _ => None,
        };
        if let Some(kind) = set_kind {
            self.sets.push(var.clone());
            let body = self.implies();
            self.sets.pop();
            let body = Box::new(body?);
            return Ok(if kw.starts_with('A') {
                Formula::SetForall(kind, var, body)
            } else {
                Formula::SetExists(kind, var, body)
            });
        }
        let body = self.implies()?;
        Ok(match (kw, count) {
            ("A", _) => Formula::forall(var, body),
            (_, Some(n)) => Formula::count_exists(n, var, body),
            _ => Formula::exists(var, body),
        })
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let head = self.name("a name")?;
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let mut args = vec![Term::Var(self.name("an argument")?)];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(Term::Var(self.name("an argument")?));
                }
                self.expect(Tok::RParen, "`)` closing the argument list")?;
                if self.sets.contains(&head) {
                    if args.len() != 1 {
                        return self.error(format!("set variable `{head}` takes one argument"));
                    }
                    return Ok(Formula::SetMember(head, args.pop().unwrap()));
                }
                Ok(Formula::Rel(head, args))
            }
            Tok::Equals => {
                self.bump();
                let rhs = self.name("right-hand side of `=`")?;
                Ok(Formula::Eq(Term::Var(head), Term::Var(rhs)))
            }
            _ => self.error("expected `(` or `=` after a name"),
        }
    }
}

/// Parses one formula. Names not bound by a quantifier become free variables.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let lexer = lex(text)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        sets: Vec::new(),
    };
    let f = p.implies()?;
    if *p.peek() != Tok::Eof {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}

/// Parses against a vocabulary: free names listed as constants become
/// constant terms, and relation symbols must exist with matching arity.
pub fn parse_with_vocabulary(text: &str, voc: &Vocabulary) -> Result<Formula, ParseError> {
    let f = parse(text)?.bind_constants(&voc.constants);
    check_relations(&f, voc)?;
    Ok(f)
}

/// Parses with the given constant names and no relation check.
pub fn parse_with_constants(text: &str, constants: &BTreeSet<String>) -> Result<Formula, ParseError> {
    Ok(parse(text)?.bind_constants(constants))
}

fn check_relations(f: &Formula, voc: &Vocabulary) -> Result<(), ParseError> {
    let mut result = Ok(());
    f.visit(&mut |g| {
        if result.is_err() {
            return;
        }
        if let Formula::Rel(r, ts) = g {
            match voc.relations.get(r) {
                None => result = Err(ParseError::UnknownRelation(r.clone())),
                Some(&a) if a != ts.len() => {
                    result = Err(ParseError::Arity {
                        name: r.clone(),
                        expected: a,
                        found: ts.len(),
                    })
                }
                _ => {}
            }
        }
    });
    result
}
