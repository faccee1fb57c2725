use std::collections::BTreeSet;

use num_rational::Ratio;

use super::lex::{lex, Tok};
use super::ParseError;
use crate::kernel::Sequent;
use crate::syntax::{Judgement, Polarity, Prop, Sort, Term};
use crate::worlds::{sym, DomainId, Sym, World, WorldExpr, Q};

const KEYWORDS: [&str; 9] = ["fa", "ex", "faw", "exw", "dn", "at", "top", "id", "goal"];

/// Recursive-descent parser over a token stream. Bound names live in
/// `scope`, innermost last.
pub(crate) struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
    scope: Vec<(String, Sort)>,
    pub pos: BTreeSet<Sym>,
    /// Whether identifiers may start with `_` (machine-written files).
    pub allow_reserved: bool,
}

impl Parser {
    pub fn new(src: &str, line0: usize) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src, line0)?, at: 0, scope: Vec::new(), pos: BTreeSet::new(), allow_reserved: false })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.at];
        (*l, *c)
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (_, l, c) = &self.toks[self.at];
        Err(ParseError::new(*l, *c, msg.into()))
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, self.peek()))
        }
    }

    pub fn expect_kw(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, self.peek()))
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.peek()))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if s.starts_with('_') && !self.allow_reserved {
                    return self.err(format!("identifier `{}` is reserved (leading underscore)", s));
                }
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected an identifier, found {}", t)),
        }
    }

    fn lookup(&self, name: &str) -> Option<(u32, Sort)> {
        self.scope.iter().rev().position(|(n, _)| n == name).map(|i| (i as u32, self.scope[self.scope.len() - 1 - i].1))
    }

    pub fn rational(&mut self) -> Result<Q, ParseError> {
        let n = self.integer()?;
        if self.eat_sym("/") {
            let d = self.integer()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            Ok(Ratio::new(n, d))
        } else {
            Ok(Ratio::from_integer(n))
        }
    }

    pub fn integer(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Num(s) => match s.parse::<i64>() {
                Ok(n) => {
                    self.bump();
                    Ok(n)
                }
                Err(_) => self.err("number too large"),
            },
            t => self.err(format!("expected a number, found {}", t)),
        }
    }

    /// The raw digits of the next number token, if it is one.
    pub fn digits(&mut self) -> Option<String> {
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Some(s)
            }
            _ => None,
        }
    }

    pub fn world(&mut self) -> Result<WorldExpr, ParseError> {
        let mut w = self.world_atom()?;
        while self.eat_sym(".") {
            let rhs = self.world_atom()?;
            w = WorldExpr::compose(w, rhs);
        }
        Ok(w)
    }

    fn world_atom(&mut self) -> Result<WorldExpr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "id" => {
                self.bump();
                Ok(WorldExpr::Id)
            }
            Tok::Num(_) => Ok(WorldExpr::Lit(World::Temporal(self.rational()?))),
            Tok::Sym("[") => {
                self.bump();
                let mut rs = Vec::new();
                if !self.is_sym("]") {
                    loop {
                        let r = self.rational()?;
                        if r <= Q::from_integer(0) {
                            return self.err("rates must be positive");
                        }
                        rs.push(r);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("]")?;
                Ok(WorldExpr::Lit(World::Rates(rs)))
            }
            Tok::Sym("(") => {
                self.bump();
                let w = self.world()?;
                self.expect_sym(")")?;
                Ok(w)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                match self.lookup(&name) {
                    Some((i, Sort::World)) => Ok(WorldExpr::Var(i)),
                    Some((_, Sort::Term)) => self.err(format!("`{}` is a term variable, not a world", name)),
                    None => Ok(WorldExpr::Param(sym(&name))),
                }
            }
            t => self.err(format!("expected a world, found {}", t)),
        }
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        if self.eat_sym("{") {
            let w = self.world()?;
            self.expect_sym("}")?;
            return Ok(Term::World(w));
        }
        let name = self.ident()?;
        if let Some((i, sort)) = self.lookup(&name) {
            return Ok(match sort {
                Sort::Term => Term::Var(i),
                Sort::World => Term::World(WorldExpr::Var(i)),
            });
        }
        Ok(Term::Fn(sym(&name), self.args()?))
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.eat_sym("(") {
            loop {
                args.push(self.term()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        Ok(args)
    }

    pub fn prop(&mut self) -> Result<Prop, ParseError> {
        let binder = match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "fa" => Some((true, Some(Sort::Term))),
                "faw" => Some((true, Some(Sort::World))),
                "ex" => Some((false, Some(Sort::Term))),
                "exw" => Some((false, Some(Sort::World))),
                "dn" => Some((true, None)),
                _ => None,
            },
            _ => None,
        };
        if let Some((forall, sort)) = binder {
            self.bump();
            let name = self.ident()?;
            self.expect_sym(".")?;
            self.scope.push((name, sort.unwrap_or(Sort::World)));
            let body = self.prop();
            self.scope.pop();
            let body = body?;
            return Ok(match (forall, sort) {
                (_, None) => Prop::local(body),
                (true, Some(s)) => Prop::forall(s, body),
                (false, Some(s)) => Prop::exists(s, body),
            });
        }
        let lhs = self.with()?;
        if self.eat_sym("-o") {
            let rhs = self.prop()?;
            return Ok(Prop::lolli(lhs, rhs));
        }
        Ok(lhs)
    }

    fn with(&mut self) -> Result<Prop, ParseError> {
        let mut p = self.plus()?;
        while self.eat_sym("&") {
            let q = self.plus()?;
            p = Prop::with(p, q);
        }
        Ok(p)
    }

    fn plus(&mut self) -> Result<Prop, ParseError> {
        let mut p = self.tensor()?;
        while self.eat_sym("+") {
            let q = self.tensor()?;
            p = Prop::plus(p, q);
        }
        Ok(p)
    }

    fn tensor(&mut self) -> Result<Prop, ParseError> {
        let mut p = self.prefix()?;
        while self.eat_sym("*") {
            let q = self.prefix()?;
            p = Prop::tensor(p, q);
        }
        Ok(p)
    }

    fn prefix(&mut self) -> Result<Prop, ParseError> {
        if self.eat_sym("!") {
            return Ok(Prop::bang(self.prefix()?));
        }
        if self.eat_sym("↑") {
            return Ok(Prop::up(self.prefix()?));
        }
        if self.eat_sym("↓") {
            return Ok(Prop::down(self.prefix()?));
        }
        self.atomic()
    }

    fn atomic(&mut self) -> Result<Prop, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) if n == "1" => {
                self.bump();
                Ok(Prop::One)
            }
            Tok::Num(n) if n == "0" => {
                self.bump();
                Ok(Prop::Zero)
            }
            // A binder in operand position extends as far right as possible.
            Tok::Ident(s) if matches!(s.as_str(), "fa" | "ex" | "faw" | "exw" | "dn") => self.prop(),
            Tok::Ident(s) if s == "top" => {
                self.bump();
                Ok(Prop::Top)
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.prop()?;
                if self.is_kw("at") {
                    self.bump();
                    let w = self.world()?;
                    self.expect_sym(")")?;
                    return Ok(Prop::at(p, w));
                }
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.lookup(&name).is_some() {
                    return self.err(format!("bound variable `{}` used as a proposition", name));
                }
                let args = self.args()?;
                let pol = if self.pos.contains(name.as_str()) { Polarity::Pos } else { Polarity::Neg };
                Ok(Prop::Atom(pol, sym(&name), args))
            }
            t => self.err(format!("expected a proposition, found {}", t)),
        }
    }

    pub fn judgement(&mut self) -> Result<Judgement, ParseError> {
        let p = self.prop()?;
        self.expect_sym("@")?;
        let w = self.world()?;
        Ok(Judgement::new(p, w))
    }

    /// A comma-separated list of judgements, or `.` for none.
    pub fn judgements(&mut self) -> Result<Vec<Judgement>, ParseError> {
        if self.eat_sym(".") {
            return Ok(Vec::new());
        }
        let mut out = vec![self.judgement()?];
        while self.eat_sym(",") {
            out.push(self.judgement()?);
        }
        Ok(out)
    }

    /// `Γ ; Δ |- C @ w`
    pub fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let gamma = self.judgements()?;
        self.expect_sym(";")?;
        let delta = if self.is_sym("|-") { Vec::new() } else { self.judgements()? };
        self.expect_sym("|-")?;
        let goal = self.judgement()?;
        Ok(Sequent::new(gamma, delta, goal))
    }

    pub fn names(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat_sym(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }
}

fn whole<T>(src: &str, pos: &BTreeSet<Sym>, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(src, 1)?;
    p.pos = pos.clone();
    p.allow_reserved = true;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

/// Parses a proposition; atoms named in `pos` are positive.
pub fn parse_prop(src: &str, pos: &BTreeSet<Sym>) -> Result<Prop, ParseError> {
    whole(src, pos, Parser::prop)
}

pub fn parse_world(src: &str) -> Result<WorldExpr, ParseError> {
    whole(src, &BTreeSet::new(), Parser::world)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    whole(src, &BTreeSet::new(), Parser::term)
}

pub fn parse_judgement(src: &str, pos: &BTreeSet<Sym>) -> Result<Judgement, ParseError> {
    whole(src, pos, Parser::judgement)
}

pub fn parse_sequent(src: &str, pos: &BTreeSet<Sym>) -> Result<Sequent, ParseError> {
    whole(src, pos, Parser::sequent)
}

/// A `.hyll` goal file.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalFile {
    pub domain: Option<DomainId>,
    pub pos: BTreeSet<Sym>,
    pub goals: Vec<NamedGoal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedGoal {
    pub name: String,
    pub sequent: Sequent,
}

/// Goal file syntax, one declaration per line (`#` starts a comment):
///
/// ```text
/// domain rates
/// pos p, q
/// goal swap :: . ; p * q @ w |- q * p @ w
/// ```
///
/// The `name ::` part is optional.
pub fn parse_goal_file(src: &str) -> Result<GoalFile, ParseError> {
    let mut file = GoalFile { domain: None, pos: BTreeSet::new(), goals: Vec::new() };
    for (n, line) in src.lines().enumerate() {
        let mut p = Parser::new(line, n + 1)?;
        p.pos = file.pos.clone();
        match p.peek().clone() {
            Tok::Eof => continue,
            Tok::Ident(k) if k == "domain" => {
                p.bump();
                let name = match p.bump() {
                    Tok::Ident(s) => s,
                    t => return p.err(format!("expected a domain name, found {}", t)),
                };
                file.domain = Some(DomainId::parse(&name).ok_or_else(|| ParseError::new(n + 1, 8, format!("unknown domain `{}`", name)))?);
            }
            Tok::Ident(k) if k == "pos" => {
                p.bump();
                for name in p.names()? {
                    file.pos.insert(sym(&name));
                }
            }
            Tok::Ident(k) if k == "goal" => {
                p.bump();
                let name = if matches!(p.peek(), Tok::Ident(_)) && matches!(p.peek2(), Tok::Sym("::")) {
                    let s = p.ident()?;
                    p.bump();
                    s
                } else {
                    format!("goal{}", file.goals.len() + 1)
                };
                let sequent = p.sequent()?;
                file.goals.push(NamedGoal { name, sequent });
            }
            t => return p.err(format!("expected `domain`, `pos` or `goal`, found {}", t)),
        }
        p.expect_eof()?;
    }
    Ok(file)
}

/// Prints a goal file that [`parse_goal_file`] reads back.
pub fn write_goal_file(f: &GoalFile) -> String {
    let mut out = String::new();
    if let Some(d) = f.domain {
        out.push_str(&format!("domain {}\n", d));
    }
    if !f.pos.is_empty() {
        let names: Vec<&str> = f.pos.iter().map(|s| &**s).collect();
        out.push_str(&format!("pos {}\n", names.join(", ")));
    }
    for g in &f.goals {
        out.push_str(&format!("goal {} :: {}\n", g.name, g.sequent));
    }
    out
}
