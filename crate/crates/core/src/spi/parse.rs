//! Concrete syntax for process files and traces.
//!
//! ```text
//! # comments run to the end of the line
//! def Cell(x, v) = x!(v).Cell(x, v) + x?(w).Cell(x, w)
//! channel c : 2
//! run new(1/2) v in Cell(c, v) | c?(y).tau(0.5).0
//! ```
//!
//! `|` binds loosest, then `+`; a prefix continuation is a single unit,
//! and `new(r) x in P` extends as far right as possible. Traces are
//! line-oriented: `initial P`, then `step EVENT world W` and `after P`
//! lines.

use std::fmt;

use num_rational::Ratio;

use super::{is_local, Chan, Env, Event, Process, RateTable, SpiError, Sum, Trace, TraceStep};
use crate::text::{ParseError, Parser, Tok};
use crate::worlds::{sym, Sym, World, Q};

const SPI_KEYWORDS: [&str; 6] = ["def", "channel", "run", "new", "in", "tau"];

/// A parsed process file.
#[derive(Debug, Clone, Default)]
pub struct SpiFile {
    pub env: Env,
    pub rates: RateTable,
    pub run: Option<Process>,
}

struct Call {
    name: String,
    arity: usize,
    at: (usize, usize),
}

struct SpiParser {
    p: Parser,
    /// Channel binders in scope, innermost last.
    scope: Vec<String>,
    calls: Vec<Call>,
}

fn located(at: (usize, usize), msg: impl Into<String>) -> SpiError {
    SpiError::Parse(ParseError::new(at.0, at.1, msg))
}

impl SpiParser {
    fn new(src: &str, line0: usize, reserved: bool) -> Result<SpiParser, ParseError> {
        let mut p = Parser::new(src, line0)?;
        p.allow_reserved = reserved;
        Ok(SpiParser { p, scope: Vec::new(), calls: Vec::new() })
    }

    fn name(&mut self) -> Result<String, ParseError> {
        if let Tok::Ident(s) = self.p.peek() {
            if SPI_KEYWORDS.contains(&s.as_str()) {
                return self.p.err(format!("`{}` is a keyword", s));
            }
        }
        self.p.ident()
    }

    fn chan(&mut self) -> Result<Chan, ParseError> {
        let n = self.name()?;
        Ok(match self.scope.iter().rev().position(|b| *b == n) {
            Some(i) => Chan::Bound(i as u32),
            None => Chan::Name(sym(&n)),
        })
    }

    /// `p/q`, an integer, or a decimal; must be positive.
    fn rate(&mut self) -> Result<Q, ParseError> {
        let at = self.p.here();
        let whole = self.p.integer()?;
        let r = if self.p.eat_sym("/") {
            let d = self.p.integer()?;
            if d == 0 {
                return self.p.err("zero denominator");
            }
            Ratio::new(whole, d)
        } else if self.p.is_sym(".") && matches!(self.p.peek2(), Tok::Num(_)) {
            self.p.bump();
            let digits = self.p.digits().unwrap_or_default();
            let scale = 10i64.checked_pow(digits.len() as u32);
            let frac = digits.parse::<i64>().ok();
            match (scale, frac) {
                (Some(s), Some(f)) => Ratio::new(whole, 1) + Ratio::new(f, s),
                _ => return Err(ParseError::new(at.0, at.1, "too many decimal digits")),
            }
        } else {
            Ratio::from_integer(whole)
        };
        if r <= Ratio::from_integer(0) {
            return Err(ParseError::new(at.0, at.1, "rates must be positive"));
        }
        Ok(r)
    }

    fn process(&mut self) -> Result<Process, ParseError> {
        let mut parts = vec![self.choice()?];
        while self.p.eat_sym("|") {
            parts.push(self.choice()?);
        }
        let last = parts.pop().expect("one part");
        Ok(parts.into_iter().rev().fold(last, |acc, p| Process::par(p, acc)))
    }

    fn choice(&mut self) -> Result<Process, ParseError> {
        let at = self.p.here();
        let first = self.unit()?;
        if !self.p.is_sym("+") {
            return Ok(first);
        }
        let mut sums = vec![first];
        while self.p.eat_sym("+") {
            sums.push(self.unit()?);
        }
        let sums = sums
            .into_iter()
            .map(|p| match p {
                Process::Sum(s) => Ok(s),
                _ => Err(ParseError::new(at.0, at.1, "only prefixed processes can be combined with `+`")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut it = sums.into_iter().rev();
        let last = it.next().expect("two sums");
        Ok(Process::Sum(it.fold(last, |acc, s| Sum::Plus(Box::new(s), Box::new(acc)))))
    }

    fn cont(&mut self) -> Result<Process, ParseError> {
        if self.p.eat_sym(".") {
            self.unit()
        } else {
            Ok(Process::Nil)
        }
    }

    fn binder_cont(&mut self, name: String) -> Result<Process, ParseError> {
        self.scope.push(name);
        let body = self.cont();
        self.scope.pop();
        body
    }

    fn unit(&mut self) -> Result<Process, ParseError> {
        let at = self.p.here();
        if self.p.eat_sym("(") {
            let p = self.process()?;
            self.p.expect_sym(")")?;
            return Ok(p);
        }
        if let Tok::Num(n) = self.p.peek() {
            if n == "0" {
                self.p.bump();
                return Ok(Process::Nil);
            }
            return self.p.err("expected a process");
        }
        if self.p.is_kw("new") {
            self.p.bump();
            self.p.expect_sym("(")?;
            let r = self.rate()?;
            self.p.expect_sym(")")?;
            let x = self.name()?;
            self.p.expect_kw("in")?;
            self.scope.push(x);
            let body = self.process();
            self.scope.pop();
            return Ok(Process::nu(r, body?));
        }
        if self.p.is_kw("tau") {
            self.p.bump();
            self.p.expect_sym("(")?;
            let r = self.rate()?;
            self.p.expect_sym(")")?;
            let k = self.cont()?;
            return Ok(Process::tau(r, k));
        }
        let Tok::Ident(_) = self.p.peek() else { return self.p.err(format!("expected a process, found {}", self.p.peek())) };
        if self.p.peek2() == &Tok::Sym("!") {
            let x = self.chan()?;
            self.p.bump();
            self.p.expect_sym("(")?;
            let m = self.chan()?;
            self.p.expect_sym(")")?;
            let k = self.cont()?;
            return Ok(Process::out(x, m, k));
        }
        if self.p.peek2() == &Tok::Sym("?") {
            let x = self.chan()?;
            self.p.bump();
            self.p.expect_sym("(")?;
            let y = self.name()?;
            self.p.expect_sym(")")?;
            let k = self.binder_cont(y)?;
            return Ok(Process::inp(x, k));
        }
        let x = self.name()?;
        let mut args = Vec::new();
        if self.p.eat_sym("(") {
            if !self.p.is_sym(")") {
                args.push(self.chan()?);
                while self.p.eat_sym(",") {
                    args.push(self.chan()?);
                }
            }
            self.p.expect_sym(")")?;
        }
        self.calls.push(Call { name: x.clone(), arity: args.len(), at });
        Ok(Process::Call(sym(&x), args))
    }

    fn params(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        if self.p.eat_sym("(") {
            if !self.p.is_sym(")") {
                out.push(self.name()?);
                while self.p.eat_sym(",") {
                    out.push(self.name()?);
                }
            }
            self.p.expect_sym(")")?;
        }
        Ok(out)
    }

    fn check_calls(&self, env: &Env) -> Result<(), SpiError> {
        for c in &self.calls {
            match env.get(&c.name) {
                None => return Err(located(c.at, format!("unknown definition {}", c.name))),
                Some(d) if d.arity != c.arity => {
                    return Err(located(c.at, format!("{} expects {} channels, got {}", c.name, d.arity, c.arity)))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Parses a process file: definitions, channel rates and one `run`.
pub fn parse_spi(src: &str) -> Result<SpiFile, SpiError> {
    let mut sp = SpiParser::new(src, 1, false)?;
    let mut file = SpiFile::default();
    let mut def_at = Vec::new();
    let mut run_at = None;
    while !sp.p.at_eof() {
        let at = sp.p.here();
        if sp.p.is_kw("def") {
            sp.p.bump();
            let x = sp.name()?;
            let ps = sp.params()?;
            sp.p.expect_sym("=")?;
            // The first parameter is the outermost binder.
            sp.scope = ps.clone();
            let body = sp.process();
            sp.scope.clear();
            file.env.define(&x, ps.len(), body?).map_err(|e| located(at, e.to_string()))?;
            def_at.push((x, at));
        } else if sp.p.is_kw("channel") {
            sp.p.bump();
            let x = sp.name()?;
            sp.p.expect_sym(":")?;
            let r = sp.rate()?;
            if file.rates.contains(&x) {
                return Err(located(at, format!("channel {} is declared twice", x)));
            }
            file.rates.insert(&x, r);
        } else if sp.p.is_kw("run") {
            sp.p.bump();
            if file.run.is_some() {
                return Err(located(at, "a file has at most one `run`"));
            }
            file.run = Some(sp.process()?);
            run_at = Some(at);
        } else {
            return sp.p.err(format!("expected `def`, `channel` or `run`, found {}", sp.p.peek())).map_err(Into::into);
        }
    }
    sp.check_calls(&file.env)?;
    let def_loc = |x: &str| def_at.iter().find(|(d, _)| d == x).map(|(_, at)| *at).unwrap_or((1, 1));
    if let Err(e) = file.env.validate() {
        let at = match &e {
            SpiError::Unguarded(x) | SpiError::UnknownDef(x) | SpiError::Duplicate(x) => def_loc(x),
            _ => (1, 1),
        };
        return Err(located(at, e.to_string()));
    }
    for (x, at) in &def_at {
        let def = file.env.get(x).expect("defined above");
        file.rates.covers(&def.body).map_err(|e| located(*at, e.to_string()))?;
    }
    if let (Some(p), Some(at)) = (&file.run, run_at) {
        file.rates.covers(p).map_err(|e| located(at, e.to_string()))?;
    }
    Ok(file)
}

/// Parses a single process; calls are not checked against any
/// environment.
pub fn parse_process(src: &str) -> Result<Process, SpiError> {
    parse_process_in(src, 1, false)
}

fn parse_process_in(src: &str, line: usize, reserved: bool) -> Result<Process, SpiError> {
    let mut sp = SpiParser::new(src, line, reserved)?;
    let p = sp.process()?;
    sp.p.expect_eof()?;
    Ok(p)
}

// Printing.

struct Printer {
    /// Names of the binders in scope, innermost last.
    scope: Vec<String>,
    avoid: std::collections::BTreeSet<Sym>,
}

impl Printer {
    fn for_process(p: &Process) -> Printer {
        Printer { scope: Vec::new(), avoid: p.names() }
    }

    fn fresh(&self) -> String {
        (1..)
            .map(|i| format!("y{}", i))
            .find(|n| !self.scope.contains(n) && !self.avoid.contains(n.as_str()))
            .expect("infinitely many names")
    }

    fn chan(&self, c: &Chan) -> String {
        match c {
            Chan::Name(n) => n.to_string(),
            Chan::Bound(i) => match self.scope.len().checked_sub(1 + *i as usize) {
                Some(j) => self.scope[j].clone(),
                None => format!("#{}", i),
            },
        }
    }

    /// Levels: 0 anywhere, 1 an operand of `|`, 2 an operand of `+`,
    /// 3 a prefix continuation.
    fn proc(&mut self, out: &mut String, p: &Process, level: u8) {
        match p {
            Process::Nil => out.push('0'),
            Process::Par(a, b) => {
                let paren = level >= 1;
                if paren {
                    out.push('(');
                }
                self.proc(out, a, 1);
                out.push_str(" | ");
                self.proc(out, b, 1);
                if paren {
                    out.push(')');
                }
            }
            Process::Nu(r, body) => {
                let paren = level >= 1;
                if paren {
                    out.push('(');
                }
                let y = self.fresh();
                out.push_str(&format!("new({}) {} in ", r, y));
                self.scope.push(y);
                self.proc(out, body, 0);
                self.scope.pop();
                if paren {
                    out.push(')');
                }
            }
            Process::Call(x, args) => {
                out.push_str(x);
                out.push('(');
                out.push_str(&args.iter().map(|a| self.chan(a)).collect::<Vec<_>>().join(", "));
                out.push(')');
            }
            Process::Sum(s) => self.sum(out, s, level),
        }
    }

    fn sum(&mut self, out: &mut String, s: &Sum, level: u8) {
        match s {
            Sum::Plus(a, b) => {
                let paren = level >= 2;
                if paren {
                    out.push('(');
                }
                self.sum(out, a, 2);
                out.push_str(" + ");
                self.sum(out, b, 2);
                if paren {
                    out.push(')');
                }
            }
            Sum::Out(x, m, k) => {
                out.push_str(&format!("{}!({})", self.chan(x), self.chan(m)));
                self.cont(out, k);
            }
            Sum::In(x, k) => {
                let y = self.fresh();
                out.push_str(&format!("{}?({})", self.chan(x), y));
                self.scope.push(y);
                self.cont(out, k);
                self.scope.pop();
            }
            Sum::Tau(r, k) => {
                out.push_str(&format!("tau({})", r));
                self.cont(out, k);
            }
        }
    }

    fn cont(&mut self, out: &mut String, k: &Process) {
        if *k != Process::Nil {
            out.push('.');
            self.proc(out, k, 3);
        }
    }
}

/// A process in the concrete syntax.
pub fn write_process(p: &Process) -> String {
    let mut out = String::new();
    Printer::for_process(p).proc(&mut out, p, 0);
    out
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_process(self))
    }
}

/// A process file that [`parse_spi`] reads back to the same contents.
pub fn write_spi(file: &SpiFile) -> String {
    let mut out = String::new();
    for (x, def) in file.env.iter() {
        let params: Vec<String> = (1..=def.arity).map(|i| format!("x{}", i)).collect();
        let mut pr = Printer { scope: params.clone(), avoid: def.body.names() };
        let mut body = String::new();
        pr.proc(&mut body, &def.body, 0);
        if params.is_empty() {
            out.push_str(&format!("def {} = {}\n", x, body));
        } else {
            out.push_str(&format!("def {}({}) = {}\n", x, params.join(", "), body));
        }
    }
    for (x, r) in file.rates.iter() {
        out.push_str(&format!("channel {} : {}\n", x, r));
    }
    if let Some(p) = &file.run {
        out.push_str(&format!("run {}\n", write_process(p)));
    }
    out
}

// Traces.

const TRACE_HEADER: &str = "spi-trace 1";

/// One event per `step` line with its world after, each followed by the
/// successor on an `after` line.
pub fn write_trace(t: &Trace) -> String {
    let mut out = format!("{}\ninitial {}\n", TRACE_HEADER, write_process(&t.initial));
    for (k, s) in t.steps.iter().enumerate() {
        out.push_str(&format!("step {} world {}\n", s.event, t.world_after(k + 1)));
        out.push_str(&format!("after {}\n", write_process(&s.after)));
    }
    out
}

fn event(sp: &mut SpiParser) -> Result<Event, ParseError> {
    let kind = sp.p.ident()?;
    sp.p.expect_sym("(")?;
    let ev = match kind.as_str() {
        "internal" => Event::Internal { rate: sp.rate()? },
        "synchronize" => {
            let x = sp.p.ident()?;
            sp.p.expect_sym(",")?;
            let r = sp.rate()?;
            sp.p.expect_sym(",")?;
            let m = sp.p.ident()?;
            Event::Sync { channel: sym(&x), rate: r, message: sym(&m) }
        }
        k => return sp.p.err(format!("unknown event kind `{}`", k)),
    };
    sp.p.expect_sym(")")?;
    Ok(ev)
}

fn world_list(sp: &mut SpiParser) -> Result<Vec<Q>, ParseError> {
    if sp.p.is_kw("id") {
        sp.p.bump();
        return Ok(Vec::new());
    }
    sp.p.expect_sym("[")?;
    let mut rs = Vec::new();
    if !sp.p.is_sym("]") {
        rs.push(sp.rate()?);
        while sp.p.eat_sym(",") {
            rs.push(sp.rate()?);
        }
    }
    sp.p.expect_sym("]")?;
    Ok(rs)
}

/// Reads a trace written by [`write_trace`] and checks every claimed
/// world against the rates of the events so far. Channel names with a
/// leading underscore are accepted here, since traces mention opened
/// channels.
pub fn parse_trace(src: &str) -> Result<Trace, SpiError> {
    let (trace, claims) = parse_trace_claims(src)?;
    for (k, (line, col, w)) in claims.iter().enumerate() {
        let actual = trace.world_after(k + 1);
        if *w != actual {
            return Err(located((*line, *col), format!("world after the step is {} but the rates so far give {}", w, actual)));
        }
    }
    Ok(trace)
}

/// Like [`parse_trace`] but returns each step's claimed world, with its
/// line and column, unchecked.
pub fn parse_trace_claims(src: &str) -> Result<(Trace, Vec<(usize, usize, World)>), SpiError> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    match lines.next() {
        Some((_, l)) if l.trim() == TRACE_HEADER => {}
        Some((n, _)) => return Err(located((n, 1), format!("expected `{}`", TRACE_HEADER))),
        None => return Err(located((1, 1), "empty trace file")),
    }
    let mut initial = None;
    let mut pending: Option<(Event, usize)> = None;
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut claims = Vec::new();
    for (n, line) in lines {
        let t = line.trim_start();
        let col = line.len() - t.len() + 1;
        let (kw, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let rest_col = col + kw.len() + 1;
        let pad = " ".repeat(rest_col - 1);
        let src = format!("{}{}", pad, rest);
        match kw {
            "initial" if initial.is_none() && steps.is_empty() => initial = Some(parse_process_in(&src, n, true)?),
            "step" if initial.is_some() && pending.is_none() => {
                let mut sp = SpiParser::new(&src, n, true)?;
                let ev = event(&mut sp)?;
                sp.p.expect_kw("world")?;
                let w = world_list(&mut sp)?;
                sp.p.expect_eof()?;
                claims.push((n, col, World::Rates(w)));
                pending = Some((ev, n));
            }
            "after" if pending.is_some() => {
                let (event, _) = pending.take().expect("checked");
                steps.push(TraceStep { event, after: parse_process_in(&src, n, true)? });
            }
            _ => return Err(located((n, col), format!("unexpected `{}` line", kw))),
        }
    }
    if let Some((_, n)) = pending {
        return Err(located((n, 1), "step without an `after` line"));
    }
    let initial = initial.ok_or_else(|| located((1, 1), "trace has no `initial` line"))?;
    for (k, s) in steps.iter().enumerate() {
        if !s.after.is_closed() {
            return Err(SpiError::Replay { step: k + 1, msg: "successor has unbound channels".into() });
        }
    }
    if steps.iter().any(|s| s.after.names().iter().any(|n| is_local(n))) {
        return Err(located((1, 1), "successors must bind their opened channels with `new`"));
    }
    Ok((Trace { initial, steps }, claims))
}
