//! Canonical printing of terms, worlds and propositions.
//!
//! Bound variables are named by binder depth (`x3` for a term binder,
//! `u3` for a world binder), primed as needed to avoid free names.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Prop, Sort, Term};
use crate::worlds::{Sym, WorldExpr};

pub struct Names {
    stack: Vec<String>,
    taken: BTreeSet<Sym>,
}

impl Names {
    pub fn for_prop(p: &Prop) -> Names {
        let mut taken = BTreeSet::new();
        p.names(&mut taken);
        Names { stack: Vec::new(), taken }
    }

    pub fn empty() -> Names {
        Names { stack: Vec::new(), taken: BTreeSet::new() }
    }

    fn push(&mut self, sort: Sort) -> String {
        let prefix = match sort {
            Sort::Term => "x",
            Sort::World => "u",
        };
        let mut name = format!("{}{}", prefix, self.stack.len());
        while self.taken.contains(name.as_str()) {
            name.push('\'');
        }
        self.stack.push(name.clone());
        name
    }

    fn pop(&mut self) {
        self.stack.pop();
    }

    fn var(&self, i: u32) -> String {
        let i = i as usize;
        if i < self.stack.len() {
            self.stack[self.stack.len() - 1 - i].clone()
        } else {
            format!("#{}", i - self.stack.len())
        }
    }
}

pub fn write_world(f: &mut dyn fmt::Write, w: &WorldExpr, names: &Names) -> fmt::Result {
    match w {
        WorldExpr::Id => f.write_str("id"),
        WorldExpr::Lit(v) => write!(f, "{}", v),
        WorldExpr::Var(i) => f.write_str(&names.var(*i)),
        WorldExpr::Param(p) => f.write_str(p),
        WorldExpr::Meta(m) => write!(f, "?w{}", m),
        WorldExpr::Compose(a, b) => {
            write_world(f, a, names)?;
            f.write_str(" . ")?;
            match **b {
                WorldExpr::Compose(..) => {
                    f.write_str("(")?;
                    write_world(f, b, names)?;
                    f.write_str(")")
                }
                _ => write_world(f, b, names),
            }
        }
    }
}

pub fn write_term(f: &mut dyn fmt::Write, t: &Term, names: &Names) -> fmt::Result {
    match t {
        Term::Var(i) => f.write_str(&names.var(*i)),
        Term::Meta(m) => write!(f, "?t{}", m),
        Term::World(w) => {
            f.write_str("{")?;
            write_world(f, w, names)?;
            f.write_str("}")
        }
        Term::Fn(name, args) => {
            f.write_str(name)?;
            write_args(f, args, names)
        }
    }
}

fn write_args(f: &mut dyn fmt::Write, args: &[Term], names: &Names) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_term(f, a, names)?;
    }
    f.write_str(")")
}

const LOLLI: u8 = 1;
const WITH: u8 = 2;
const PLUS: u8 = 3;
const TENSOR: u8 = 4;
const PREFIX: u8 = 5;

pub fn write_prop(f: &mut dyn fmt::Write, p: &Prop, names: &mut Names, ctx: u8) -> fmt::Result {
    use Prop::*;
    let level = match p {
        Lolli(..) => LOLLI,
        With(..) => WITH,
        Plus(..) => PLUS,
        Tensor(..) => TENSOR,
        Bang(_) | Up(_) | Down(_) => PREFIX,
        Forall(..) | Exists(..) | Local(_) => 0,
        _ => 6,
    };
    let paren = level < ctx;
    if paren {
        f.write_str("(")?;
    }
    match p {
        Atom(_, name, args) => {
            f.write_str(name)?;
            write_args(f, args, names)?;
        }
        One => f.write_str("1")?,
        Top => f.write_str("top")?,
        Zero => f.write_str("0")?,
        Tensor(a, b) => binary(f, a, " * ", b, names, TENSOR)?,
        Plus(a, b) => binary(f, a, " + ", b, names, PLUS)?,
        With(a, b) => binary(f, a, " & ", b, names, WITH)?,
        Lolli(a, b) => {
            write_prop(f, a, names, LOLLI + 1)?;
            f.write_str(" -o ")?;
            write_prop(f, b, names, LOLLI)?;
        }
        Bang(a) => {
            f.write_str("!")?;
            write_prop(f, a, names, PREFIX)?;
        }
        Up(a) => {
            f.write_str("↑")?;
            write_prop(f, a, names, PREFIX)?;
        }
        Down(a) => {
            f.write_str("↓")?;
            write_prop(f, a, names, PREFIX)?;
        }
        Forall(s, a) | Exists(s, a) => {
            let kw = match (matches!(p, Forall(..)), s) {
                (true, Sort::Term) => "fa",
                (true, Sort::World) => "faw",
                (false, Sort::Term) => "ex",
                (false, Sort::World) => "exw",
            };
            let n = names.push(*s);
            write!(f, "{} {}. ", kw, n)?;
            write_prop(f, a, names, 0)?;
            names.pop();
        }
        Local(a) => {
            let n = names.push(Sort::World);
            write!(f, "dn {}. ", n)?;
            write_prop(f, a, names, 0)?;
            names.pop();
        }
        At(a, w) => {
            f.write_str("(")?;
            write_prop(f, a, names, PREFIX)?;
            f.write_str(" at ")?;
            write_world(f, w, names)?;
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn binary(f: &mut dyn fmt::Write, a: &Prop, op: &str, b: &Prop, names: &mut Names, level: u8) -> fmt::Result {
    write_prop(f, a, names, level)?;
    f.write_str(op)?;
    write_prop(f, b, names, level + 1)
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prop(f, self, &mut Names::for_prop(self), 0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, &Names::empty())
    }
}

/// Display adapter for world expressions outside any binder.
pub struct WorldDisplay<'a> {
    w: &'a WorldExpr,
}

impl<'a> WorldDisplay<'a> {
    pub fn new(w: &'a WorldExpr) -> Self {
        WorldDisplay { w }
    }
}

impl fmt::Display for WorldDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_world(f, self.w, &Names::empty())
    }
}

impl fmt::Display for WorldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_world(f, self, &Names::empty())
    }
}
