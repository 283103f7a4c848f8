//! Recursive descent parser for the formula DSL.
//!
//! ```text
//! formula := quant | or
//! quant   := ("E" | "A") var+ "." formula
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | "(" formula ")" | quant | atom
//! atom    := "R(" var "," var ")" | var "=" var | "Con(" var ")" | "true" | "false"
//! ```
//!
//! A quantifier in operand position extends to the end of the enclosing
//! group. `!Con(v)` is read directly as the inconsistency atom.

use std::collections::BTreeSet;

use super::ast::{Formula, Sort};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident { name: String, sort: Option<Sort> },
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Eq,
    End,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let read_ident = |mut i: usize| -> (usize, String) {
        let start = i;
        while i < chars.len() && is_ident_char(chars[i].1) {
            i += 1;
        }
        let end = chars.get(i).map_or(text.len(), |c| c.0);
        (i, text[chars[start].0..end].to_string())
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((pos, tok));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if is_ident_start(c) {
            let (next, name) = read_ident(i);
            let explicit = matches!(name.as_str(), "p" | "s")
                && chars.get(next).map(|c| c.1) == Some(':')
                && chars.get(next + 1).is_some_and(|c| is_ident_start(c.1));
            if explicit {
                let sort = if name == "p" { Sort::Point } else { Sort::State };
                let (after, real) = read_ident(next + 1);
                out.push((
                    pos,
                    Tok::Ident {
                        name: real,
                        sort: Some(sort),
                    },
                ));
                i = after;
            } else {
                out.push((pos, Tok::Ident { name, sort: None }));
                i = next;
            }
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    cursor: usize,
    // names occurring in the input; fresh variables avoid them
    used: BTreeSet<String>,
    fresh: usize,
    // quantified names with their declared sorts, innermost last
    bound: Vec<(String, Sort)>,
}

/// A variable occurrence whose sort is known or still to be inferred.
struct VarRef {
    pos: usize,
    name: String,
    sort: Option<Sort>,
    // sorts of enclosing binders of this name, innermost last
    binders: Vec<Sort>,
}

impl VarRef {
    fn sort(&self) -> Result<Sort> {
        self.sort
            .or_else(|| self.binders.last().copied())
            .or_else(|| Sort::infer(&self.name))
            .ok_or_else(|| Error::Sort {
            pos: self.pos,
            msg: format!(
                "cannot infer the sort of `{}`; use a leading x/y/z/p or a/b/c/s, or a `p:`/`s:` prefix",
                self.name
            ),
        })
    }

    fn expect(self, sort: Sort) -> Result<String> {
        if self.sort.is_none() && (self.binders.contains(&sort) || Sort::infer(&self.name) == Some(sort)) {
            return Ok(self.name);
        }
        let actual = self.sort()?;
        if actual != sort {
            return Err(Error::Sort {
                pos: self.pos,
                msg: format!("`{}` is a {} variable, expected a {}", self.name, actual.name(), sort.name()),
            });
        }
        Ok(self.name)
    }
}

const KEYWORDS: [&str; 6] = ["E", "A", "R", "Con", "true", "false"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.toks[self.cursor].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.cursor].1.clone();
        if t != Tok::End {
            self.cursor += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident { name, sort: None } if name == kw)
    }

    fn keyword_at(&self, offset: usize, kw: &str) -> bool {
        matches!(self.toks.get(self.cursor + offset), Some((_, Tok::Ident { name, sort: None })) if name == kw)
    }

    fn var(&mut self) -> Result<VarRef> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident { name, sort } if sort.is_some() || !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                let binders = self.bound.iter().filter(|(n, _)| *n == name).map(|(_, s)| *s).collect();
                Ok(VarRef {
                    pos,
                    name,
                    sort,
                    binders,
                })
            }
            _ => self.error("expected a variable"),
        }
    }

    fn fresh_point(&mut self) -> String {
        loop {
            let name = format!("p#{}", self.fresh);
            self.fresh += 1;
            if !self.used.contains(&name) {
                return name;
            }
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.keyword("E") || self.keyword("A") {
            self.quant()
        } else {
            self.or()
        }
    }

    fn quant(&mut self) -> Result<Formula> {
        let exists = self.keyword("E");
        self.bump();
        let mut vars = Vec::new();
        while *self.peek() != Tok::Dot {
            vars.push(self.var()?);
        }
        if vars.is_empty() {
            return self.error("quantifier needs at least one variable");
        }
        self.bump();
        // a block declares its variables, so enclosing binders do not count
        for v in &mut vars {
            v.binders.clear();
        }
        let sort = vars[0].sort()?;
        let mut names = Vec::with_capacity(vars.len());
        for v in vars {
            let (pos, name) = (v.pos, v.name.clone());
            if v.sort()? != sort {
                return Err(Error::Sort {
                    pos,
                    msg: format!("quantifier block mixes sorts at `{name}`"),
                });
            }
            names.push(name);
        }
        let depth = self.bound.len();
        self.bound.extend(names.iter().map(|n| (n.clone(), sort)));
        let body = self.formula();
        self.bound.truncate(depth);
        let body = Box::new(body?);
        Ok(if exists {
            Formula::Exists(sort, names, body)
        } else {
            Formula::Forall(sort, names, body)
        })
    }

    fn or(&mut self) -> Result<Formula> {
        let mut items = vec![self.and()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn and(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                if self.keyword("Con") && self.toks.get(self.cursor + 1).map(|t| &t.1) == Some(&Tok::LParen) {
                    let s = self.con_arg()?;
                    return Ok(Formula::Incon(s));
                }
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ if self.keyword("E") || self.keyword("A") => self.quant(),
            _ => self.atom(),
        }
    }

    fn con_arg(&mut self) -> Result<String> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let s = self.var()?.expect(Sort::State)?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(s)
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.keyword("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if self.keyword("false") {
            self.bump();
            return Ok(Formula::False);
        }
        let next_is_paren = self.toks.get(self.cursor + 1).map(|t| &t.1) == Some(&Tok::LParen);
        if self.keyword("R") && next_is_paren {
            self.bump();
            self.bump();
            let p = self.var()?.expect(Sort::Point)?;
            self.expect(Tok::Comma, "`,`")?;
            let s = self.var()?.expect(Sort::State)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Formula::Rel(p, s));
        }
        if self.keyword("Con") && next_is_paren {
            let s = self.con_arg()?;
            let p = self.fresh_point();
            return Ok(Formula::con(p, s));
        }
        if self.keyword_at(0, "E") || self.keyword_at(0, "A") {
            return self.quant();
        }
        let lhs = self.var()?;
        self.expect(Tok::Eq, "`=` or an atom")?;
        let rhs = self.var()?;
        let sort = lhs.sort()?;
        let (l, r) = (lhs.expect(sort)?, rhs.expect(sort)?);
        Ok(match sort {
            Sort::Point => Formula::PointEq(l, r),
            Sort::State => Formula::StateEq(l, r),
        })
    }
}

/// Parses the DSL into a formula, inferring sorts from variable spelling.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let used = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let mut parser = Parser {
        toks,
        cursor: 0,
        used,
        fresh: 0,
        bound: Vec::new(),
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return parser.error("unexpected trailing input");
    }
    Ok(f)
}
