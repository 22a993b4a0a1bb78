//! Lexer and recursive-descent parser for `.ttc` definition files.

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::state::StateId;
use crate::transducer::Rule;
use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Int(usize),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const PUNCT: [&str; 11] = ["->", "{", "}", "(", ")", ",", ":", ";", "|", "<", ">"];

pub(crate) fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| Error::Syntax {
                line: tl,
                column: tc,
                message: format!("number {digits} is too large"),
            })?;
            out.push(Token {
                tok: Tok::Int(n),
                line: tl,
                column: tc,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token {
                    tok: Tok::Punct(p),
                    line: tl,
                    column: tc,
                });
            }
            None => {
                return Err(Error::Syntax {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// A rule as written, before validation against its machine.
#[derive(Debug, Clone)]
pub(crate) struct RawRule {
    pub rule: Rule,
    pub arity: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawMachine {
    pub name: String,
    pub line: usize,
    pub column: usize,
    pub input: Option<RankedAlphabet>,
    pub output: Option<RankedAlphabet>,
    pub initial: Option<StateId>,
    pub states: Option<Vec<StateId>>,
    pub rules: Vec<RawRule>,
    pub base: Option<(String, usize, usize)>,
    pub la: Option<(String, usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawItem {
    Transducer(RawMachine),
    Lookahead(RawMachine),
    Chain {
        name: String,
        line: usize,
        column: usize,
        stages: Vec<(String, usize, usize)>,
    },
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

pub(crate) fn is_variable(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl Parser {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Name(n) => format!("name {n:?}"),
            Tok::Int(n) => format!("number {n}"),
            Tok::Punct(p) => format!("{p:?}"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.error(format!("expected {p:?}, found {}", Self::describe(&self.peek().tok)))
        }
    }

    fn name(&mut self) -> Result<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Name(n) => {
                self.next();
                Ok((n, t.line, t.column))
            }
            other => self.error(format!("expected a name, found {}", Self::describe(&other))),
        }
    }

    pub fn at_end(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error(format!("unexpected {}", Self::describe(&self.peek().tok)))
        }
    }

    pub fn items(&mut self) -> Result<Vec<RawItem>> {
        let mut items = Vec::new();
        while !self.at_end() {
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> Result<RawItem> {
        let (kw, line, column) = self.name()?;
        match kw.as_str() {
            "transducer" | "lookahead" => {
                let (name, ..) = self.name()?;
                let mut m = RawMachine {
                    name,
                    line,
                    column,
                    ..RawMachine::default()
                };
                let la = kw == "lookahead";
                self.expect("{")?;
                while !self.eat("}") {
                    self.section(&mut m, la)?;
                }
                Ok(if la {
                    RawItem::Lookahead(m)
                } else {
                    RawItem::Transducer(m)
                })
            }
            "chain" => {
                let (name, ..) = self.name()?;
                self.expect("{")?;
                let mut stages = vec![self.name()?];
                while self.eat(",") {
                    stages.push(self.name()?);
                }
                self.expect("}")?;
                Ok(RawItem::Chain {
                    name,
                    line,
                    column,
                    stages,
                })
            }
            other => Err(Error::Syntax {
                line,
                column,
                message: format!("expected transducer, lookahead or chain, found {other:?}"),
            }),
        }
    }

    fn section(&mut self, m: &mut RawMachine, la: bool) -> Result<()> {
        let t = self.peek().clone();
        let (kw, ..) = self.name()?;
        let dup = |p: &Parser| p.error::<()>(format!("duplicate {kw} section"));
        match kw.as_str() {
            "input" if m.input.is_none() => m.input = Some(self.alphabet()?),
            "output" if m.output.is_none() => m.output = Some(self.alphabet()?),
            "initial" if m.initial.is_none() => m.initial = Some(self.state()?),
            "states" if m.states.is_none() => {
                self.expect("{")?;
                let mut states = Vec::new();
                if !self.eat("}") {
                    states.push(self.state()?);
                    while self.eat(",") {
                        states.push(self.state()?);
                    }
                    self.expect("}")?;
                }
                m.states = Some(states);
            }
            "rules" if m.rules.is_empty() => {
                self.expect("{")?;
                while !self.eat("}") {
                    m.rules.extend(self.rule(la)?);
                }
            }
            "base" if la && m.base.is_none() => m.base = Some(self.name()?),
            "la" if la && m.la.is_none() => m.la = Some(self.name()?),
            "input" | "output" | "initial" | "states" | "rules" | "base" | "la" => {
                if (kw == "base" || kw == "la") && !la {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("{kw} is only allowed in a lookahead block"),
                    });
                }
                dup(self)?
            }
            other => {
                return Err(Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: format!("unknown section {other:?}"),
                })
            }
        }
        Ok(())
    }

    fn alphabet(&mut self) -> Result<RankedAlphabet> {
        self.expect("{")?;
        let mut a = RankedAlphabet::new();
        if self.eat("}") {
            return Ok(a);
        }
        loop {
            let t = self.peek().clone();
            let sym = self.symbol()?;
            if let Some(n) = sym.plain_name() {
                if is_variable(n).is_some() {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("{n} is reserved for variables"),
                    });
                }
            }
            self.expect(":")?;
            let rank = match self.next().tok {
                Tok::Int(n) => n,
                other => {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("expected a rank, found {}", Self::describe(&other)),
                    })
                }
            };
            a.insert(sym, rank).map_err(|e| Error::Syntax {
                line: t.line,
                column: t.column,
                message: e.to_string(),
            })?;
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(a)
    }

    /// `NAME | <sym,state,...>`
    pub fn symbol(&mut self) -> Result<Symbol> {
        if self.eat("<") {
            let base = self.symbol()?;
            let mut ls = Vec::new();
            while self.eat(",") {
                ls.push(self.state()?);
            }
            self.expect(">")?;
            return Ok(Symbol::annotated(base, ls));
        }
        let (n, ..) = self.name()?;
        Ok(Symbol::new(&n))
    }

    /// `NAME | (s,s) | (s,s,s) | {s,...}`
    pub fn state(&mut self) -> Result<StateId> {
        if self.eat("(") {
            let a = self.state()?;
            self.expect(",")?;
            let b = self.state()?;
            let st = if self.eat(",") {
                let c = self.state()?;
                StateId::triple(a, b, c)
            } else {
                StateId::pair(a, b)
            };
            self.expect(")")?;
            return Ok(st);
        }
        if self.eat("{") {
            let mut members = Vec::new();
            if !self.eat("}") {
                members.push(self.state()?);
                while self.eat(",") {
                    members.push(self.state()?);
                }
                self.expect("}")?;
            }
            return Ok(StateId::set(members));
        }
        let (n, ..) = self.name()?;
        Ok(StateId::base(n))
    }

    fn variable(&mut self) -> Result<usize> {
        let t = self.peek().clone();
        let (n, ..) = self.name()?;
        is_variable(&n).ok_or(Error::Syntax {
            line: t.line,
            column: t.column,
            message: format!("expected a variable x1, x2, ..., found {n:?}"),
        })
    }

    fn rule(&mut self, la: bool) -> Result<Vec<RawRule>> {
        let start = self.peek().clone();
        let state = self.state()?;
        self.expect("(")?;
        let symbol = self.symbol()?;
        let mut arity = 0;
        let mut lookahead = Vec::new();
        if self.eat("(") {
            loop {
                let t = self.peek().clone();
                let i = self.variable()?;
                arity += 1;
                if i != arity {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("expected x{arity}, found x{i}"),
                    });
                }
                if self.eat(":") {
                    if !la {
                        return self.error("look-ahead annotation in a plain transducer");
                    }
                    lookahead.push(self.state()?);
                } else if la {
                    return self.error(format!("x{i} needs a look-ahead state"));
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        self.expect(")")?;
        self.expect("->")?;
        let mut rhss = vec![self.rhs()?];
        while self.eat("|") {
            rhss.push(self.rhs()?);
        }
        self.expect(";")?;
        Ok(rhss
            .into_iter()
            .map(|rhs| {
                let mut rule = Rule::new(state.clone(), symbol.clone(), rhs);
                if la {
                    rule.lookahead = Some(lookahead.clone());
                }
                RawRule {
                    rule,
                    arity,
                    line: start.line,
                    column: start.column,
                }
            })
            .collect())
    }

    /// A right-hand side: `STATE(xN)` marks a state call, anything else is
    /// an output symbol with optional children.
    fn rhs(&mut self) -> Result<Tree> {
        let compound = self.is_punct("(") || self.is_punct("{");
        let call = compound
            || (matches!(self.peek_at(0), Tok::Name(_))
                && matches!(self.peek_at(1), Tok::Punct("("))
                && matches!(self.peek_at(2), Tok::Name(n) if is_variable(n).is_some())
                && matches!(self.peek_at(3), Tok::Punct(")")));
        if call {
            let q = self.state()?;
            self.expect("(")?;
            let i = self.variable()?;
            self.expect(")")?;
            return Ok(Tree::state_var(q, i));
        }
        if let Tok::Name(n) = self.peek_at(0) {
            if is_variable(n).is_some() {
                return self.error(format!("variable {n} must be wrapped in a state"));
            }
        }
        let sym = self.symbol()?;
        let mut children = Vec::new();
        if self.eat("(") {
            children.push(self.rhs()?);
            while self.eat(",") {
                children.push(self.rhs()?);
            }
            self.expect(")")?;
        }
        Ok(Tree::new(sym, children))
    }

    /// `tree := sym | sym '(' tree (',' tree)* ')'`
    pub fn tree(&mut self) -> Result<Tree> {
        let sym = self.symbol()?;
        let mut children = Vec::new();
        if self.eat("(") {
            children.push(self.tree()?);
            while self.eat(",") {
                children.push(self.tree()?);
            }
            self.expect(")")?;
        }
        Ok(Tree::new(sym, children))
    }
}

/// Parses a ground tree such as `f(a(e),b)`.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut p = Parser::new(text)?;
    let t = p.tree()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a state name such as `(q1,{qh1,qh2})`.
pub fn parse_state(text: &str) -> Result<StateId> {
    let mut p = Parser::new(text)?;
    let s = p.state()?;
    p.expect_end()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_positions() {
        let toks = lex("a(x1)\n  -> q'").unwrap();
        assert_eq!(toks[0].tok, Tok::Name("a".into()));
        let arrow = toks.iter().find(|t| t.tok == Tok::Punct("->")).unwrap();
        assert_eq!((arrow.line, arrow.column), (2, 3));
        assert_eq!(toks[5].tok, Tok::Name("q'".into()));
    }

    #[test]
    fn parses_trees_and_states() {
        assert_eq!(parse_tree("f(a(e), f(e,e))").unwrap().to_string(), "f(a(e),f(e,e))");
        assert_eq!(parse_tree("<f,{q},u>(e,e)").unwrap().to_string(), "<f,{q},u>(e,e)");
        let s = parse_state("(q1,{qh2,qh1},qh1)").unwrap();
        assert_eq!(s.name(), "(q1,{qh1,qh2},qh1)");
        assert!(s.as_triple().is_some());
        assert!(matches!(
            parse_tree("f(a,"),
            Err(Error::Syntax { line: 1, column: 5, .. })
        ));
        assert!(parse_tree("f(a) b").is_err());
    }

    #[test]
    fn state_markers_in_rhs() {
        let mut p = Parser::new("f(q(x1), a(e), {p,r}(x2))").unwrap();
        let t = p.rhs().unwrap();
        assert_eq!(t.to_string(), "f(q(x1),a(e),{p,r}(x2))");
        assert!(Parser::new("f(a, x1)").unwrap().rhs().is_err());
    }
}
