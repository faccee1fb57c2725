//! Text certificates for kernel proofs.
//!
//! ```text
//! hyll-certificate 1
//! domain unit
//! pos p
//! node 0 tensorR
//!   sequent . ; p @ w, q @ w |- p * q @ w
//!   split 0
//!   premises 1 2
//! node 1 init
//!   sequent . ; p @ w |- p @ w
//! ```
//!
//! Nodes are numbered in preorder and each lists its fields in a fixed
//! order: `sequent`, `principal`, `split`, `inst`, `eigen`, `cut`,
//! `premises`. Absent witnesses are omitted.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{ParseError, Parser, Tok};
use crate::kernel::{Proof, Rule, Sequent, Witness};
use crate::syntax::{Inst, Judgement, Polarity, Prop};
use crate::worlds::{sym, DomainId, Sym};

const HEADER: &str = "hyll-certificate 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub domain: DomainId,
    pub proof: Proof,
}

fn atoms(p: &Prop, out: &mut Vec<(Polarity, Sym)>) {
    use Prop::*;
    match p {
        Atom(pol, n, _) => out.push((*pol, n.clone())),
        Tensor(a, b) | Lolli(a, b) | With(a, b) | Plus(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        Bang(a) | Forall(_, a) | Exists(_, a) | At(a, _) | Local(a) | Up(a) | Down(a) => atoms(a, out),
        One | Top | Zero => {}
    }
}

fn judgements(p: &Proof) -> impl Iterator<Item = &Judgement> {
    let s = &p.conclusion;
    s.gamma.iter().chain(&s.delta).chain(std::iter::once(&s.goal)).chain(p.witness.cut.iter())
}

/// Nodes in preorder with the preorder ids of their premises.
fn preorder(p: &Proof) -> Vec<(&Proof, Vec<usize>)> {
    let mut out: Vec<(&Proof, Vec<usize>)> = Vec::new();
    let mut stack: Vec<(&Proof, Option<usize>)> = vec![(p, None)];
    while let Some((n, parent)) = stack.pop() {
        let id = out.len();
        if let Some(q) = parent {
            out[q].1.push(id);
        }
        out.push((n, Vec::new()));
        stack.extend(n.premises.iter().rev().map(|k| (k, Some(id))));
    }
    out
}

/// Prints a certificate. Fails if one atom name is used with both
/// polarities, which the `pos` line cannot express.
pub fn write_certificate(c: &Certificate) -> Result<String, String> {
    let nodes = preorder(&c.proof);
    let mut seen = Vec::new();
    for (n, _) in &nodes {
        for j in judgements(n) {
            atoms(&j.prop, &mut seen);
        }
    }
    let pos: BTreeSet<Sym> = seen.iter().filter(|(p, _)| *p == Polarity::Pos).map(|(_, n)| n.clone()).collect();
    if let Some((_, n)) = seen.iter().find(|(p, n)| *p == Polarity::Neg && pos.contains(n)) {
        return Err(format!("atom {} occurs with both polarities", n));
    }
    let mut out = format!("{}\ndomain {}\n", HEADER, c.domain);
    if !pos.is_empty() {
        let names: Vec<&str> = pos.iter().map(|s| &**s).collect();
        let _ = writeln!(out, "pos {}", names.join(", "));
    }
    for (i, (n, kids)) in nodes.iter().enumerate() {
        let w = &n.witness;
        let _ = writeln!(out, "node {} {}", i, n.rule);
        let _ = writeln!(out, "  sequent {}", n.conclusion);
        if let Some(k) = w.principal {
            let _ = writeln!(out, "  principal {}", k);
        }
        if !w.split.is_empty() {
            let s: Vec<String> = w.split.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "  split {}", s.join(" "));
        }
        match &w.inst {
            Some(Inst::Term(t)) => {
                let _ = writeln!(out, "  inst term {}", t);
            }
            Some(Inst::World(v)) => {
                let _ = writeln!(out, "  inst world {}", v);
            }
            None => {}
        }
        if let Some(e) = &w.eigen {
            let _ = writeln!(out, "  eigen {}", e);
        }
        if let Some(j) = &w.cut {
            let _ = writeln!(out, "  cut {}", j);
        }
        if !kids.is_empty() {
            let ks: Vec<String> = kids.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "  premises {}", ks.join(" "));
        }
    }
    Ok(out)
}

struct Node {
    line: usize,
    rule: Rule,
    sequent: Option<Sequent>,
    witness: Witness,
    premises: Vec<(usize, usize)>,
}

fn line_parser(line: &str, n: usize, pos: &BTreeSet<Sym>) -> Result<Parser, ParseError> {
    let mut p = Parser::new(line, n)?;
    p.pos = pos.clone();
    p.allow_reserved = true;
    Ok(p)
}

fn index(p: &mut Parser) -> Result<(usize, usize), ParseError> {
    let at = p.here();
    match p.bump() {
        Tok::Num(s) => s.parse().map(|k| (k, at.1)).map_err(|_| ParseError::new(at.0, at.1, "index too large")),
        t => Err(ParseError::new(at.0, at.1, format!("expected an index, found {}", t))),
    }
}

/// Reads a certificate written by [`write_certificate`].
pub fn parse_certificate(src: &str) -> Result<Certificate, ParseError> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        Some((n, _)) => return Err(ParseError::new(n, 1, format!("expected `{}`", HEADER))),
        None => return Err(ParseError::new(1, 1, "empty certificate")),
    }
    let mut domain = None;
    let mut pos = BTreeSet::new();
    let mut nodes: Vec<Node> = Vec::new();
    for (n, line) in lines {
        let mut p = line_parser(line, n, &pos)?;
        let at = p.here();
        let kw = match p.bump() {
            Tok::Ident(s) => s,
            t => return Err(ParseError::new(at.0, at.1, format!("expected a field name, found {}", t))),
        };
        match kw.as_str() {
            "domain" if domain.is_none() && nodes.is_empty() => {
                let name = p.ident()?;
                domain = Some(DomainId::parse(&name).ok_or_else(|| ParseError::new(at.0, at.1 + 7, format!("unknown domain `{}`", name)))?);
            }
            "pos" if nodes.is_empty() => {
                for x in p.names()? {
                    pos.insert(sym(&x));
                }
            }
            "node" => {
                let (id, col) = index(&mut p)?;
                if id != nodes.len() {
                    return Err(ParseError::new(n, col, format!("expected node {}", nodes.len())));
                }
                let rat = p.here();
                let name = match p.bump() {
                    Tok::Ident(s) => s,
                    Tok::Sym(s) => s.to_string(),
                    t => return Err(ParseError::new(rat.0, rat.1, format!("expected a rule name, found {}", t))),
                };
                // `cut!` lexes as `cut` followed by `!`.
                let name = if name == "cut" && p.eat_sym("!") { "cut!".to_string() } else { name };
                let rule = Rule::parse(&name).ok_or_else(|| ParseError::new(rat.0, rat.1, format!("unknown rule `{}`", name)))?;
                nodes.push(Node { line: n, rule, sequent: None, witness: Witness::default(), premises: Vec::new() });
            }
            field => {
                let Some(node) = nodes.last_mut() else {
                    return Err(ParseError::new(at.0, at.1, format!("unexpected `{}` before the first node", field)));
                };
                let w = &mut node.witness;
                match field {
                    "sequent" if node.sequent.is_none() => node.sequent = Some(p.sequent()?),
                    "principal" if w.principal.is_none() => w.principal = Some(index(&mut p)?.0),
                    "split" if w.split.is_empty() => {
                        while !p.at_eof() {
                            w.split.push(index(&mut p)?.0);
                        }
                    }
                    "inst" if w.inst.is_none() => {
                        w.inst = Some(if p.is_kw("term") {
                            p.bump();
                            Inst::Term(p.term()?)
                        } else if p.is_kw("world") {
                            p.bump();
                            Inst::World(p.world()?)
                        } else {
                            return p.err("expected `term` or `world`");
                        })
                    }
                    "eigen" if w.eigen.is_none() => w.eigen = Some(sym(&p.ident()?)),
                    "cut" if w.cut.is_none() => w.cut = Some(p.judgement()?),
                    "premises" if node.premises.is_empty() => {
                        while !p.at_eof() {
                            node.premises.push(index(&mut p)?);
                        }
                    }
                    f => return Err(ParseError::new(at.0, at.1, format!("unexpected field `{}`", f))),
                }
            }
        }
        p.expect_eof()?;
    }
    let domain = domain.ok_or_else(|| ParseError::new(1, 1, "certificate has no `domain` line"))?;
    if nodes.is_empty() {
        return Err(ParseError::new(1, 1, "certificate has no nodes"));
    }
    // Premises point forward, so building from the last node up never
    // needs a node that is not yet built.
    let mut built: Vec<Option<Proof>> = (0..nodes.len()).map(|_| None).collect();
    for (id, node) in nodes.into_iter().enumerate().rev() {
        let mut premises = Vec::new();
        for (k, col) in node.premises {
            if k <= id || k >= built.len() {
                return Err(ParseError::new(node.line, col, format!("premise {} must be a later node", k)));
            }
            premises.push(built[k].take().ok_or_else(|| ParseError::new(node.line, col, format!("node {} is used twice", k)))?);
        }
        let conclusion = node.sequent.ok_or_else(|| ParseError::new(node.line, 1, "node has no `sequent`"))?;
        built[id] = Some(Proof { rule: node.rule, conclusion, premises, witness: node.witness });
    }
    if let Some(k) = built.iter().skip(1).position(Option::is_some) {
        return Err(ParseError::new(1, 1, format!("node {} is not used", k + 1)));
    }
    Ok(Certificate { domain, proof: built[0].take().expect("root") })
}
