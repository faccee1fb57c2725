//! Constraint domains: monoids of worlds labelling HyLL judgements.
//!
//! Three instances are provided. The unit domain has a single world and
//! recovers plain intuitionistic linear logic. The temporal domain is
//! nonnegative rationals under addition. The rates domain is finite lists of
//! positive rationals under concatenation.
//!
//! Proof checking compares worlds through [`NormWorld`], a symbolic normal
//! form that also accommodates eigen-parameters and (during search)
//! metavariables.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact rational used for time values and rate constants.
pub type Q = Ratio<i64>;

/// Interned-ish symbol: names of constants, predicates, parameters.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainId {
    Unit,
    Temporal,
    Rates,
}

impl DomainId {
    pub const ALL: [DomainId; 3] = [DomainId::Unit, DomainId::Temporal, DomainId::Rates];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::Unit => "unit",
            DomainId::Temporal => "temporal",
            DomainId::Rates => "rates",
        }
    }

    pub fn parse(s: &str) -> Option<DomainId> {
        match s {
            "unit" => Some(DomainId::Unit),
            "temporal" => Some(DomainId::Temporal),
            "rates" => Some(DomainId::Rates),
            _ => None,
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("cannot combine a {left} world with a {right} world")]
    DomainMismatch { left: DomainId, right: DomainId },
    #[error("unbound world variable `{0}`")]
    Unbound(Sym),
    #[error("world expression mentions bound variable #{0}")]
    Open(u32),
    #[error("world expression mentions unresolved metavariable ?{0}")]
    Meta(u32),
    #[error("temporal worlds must be nonnegative, got {0}")]
    NegativeTime(Q),
    #[error("rate constants must be positive, got {0}")]
    NonPositiveRate(Q),
}

/// A concrete element of one of the constraint domains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum World {
    Unit,
    Temporal(Q),
    Rates(Vec<Q>),
}

impl World {
    pub fn rid(domain: DomainId) -> World {
        match domain {
            DomainId::Unit => World::Unit,
            DomainId::Temporal => World::Temporal(Q::zero()),
            DomainId::Rates => World::Rates(Vec::new()),
        }
    }

    pub fn temporal(t: Q) -> Result<World, WorldError> {
        if t.is_negative() {
            return Err(WorldError::NegativeTime(t));
        }
        Ok(World::Temporal(t))
    }

    pub fn rates(rs: Vec<Q>) -> Result<World, WorldError> {
        if let Some(bad) = rs.iter().find(|r| !r.is_positive()) {
            return Err(WorldError::NonPositiveRate(*bad));
        }
        Ok(World::Rates(rs))
    }

    /// Singleton rate list; rates and one-element lists are identified.
    pub fn rate(r: Q) -> Result<World, WorldError> {
        World::rates(vec![r])
    }

    pub fn domain(&self) -> DomainId {
        match self {
            World::Unit => DomainId::Unit,
            World::Temporal(_) => DomainId::Temporal,
            World::Rates(_) => DomainId::Rates,
        }
    }

    pub fn is_rid(&self) -> bool {
        *self == World::rid(self.domain())
    }

    pub fn to_norm(&self) -> NormWorld {
        match self {
            World::Unit => NormWorld::Unit,
            World::Temporal(t) => NormWorld::Temporal { offset: *t, atoms: Vec::new() },
            World::Rates(rs) => NormWorld::Rates(rs.iter().map(|r| RItem::Rate(*r)).collect()),
        }
    }
}

fn same_domain(u: &World, v: &World) -> Result<DomainId, WorldError> {
    let (l, r) = (u.domain(), v.domain());
    if l != r {
        return Err(WorldError::DomainMismatch { left: l, right: r });
    }
    Ok(l)
}

/// Monoid product.
pub fn compose(u: &World, v: &World) -> Result<World, WorldError> {
    same_domain(u, v)?;
    Ok(match (u, v) {
        (World::Unit, World::Unit) => World::Unit,
        (World::Temporal(a), World::Temporal(b)) => World::Temporal(a + b),
        (World::Rates(a), World::Rates(b)) => World::Rates(a.iter().chain(b).copied().collect()),
        _ => unreachable!("domains checked"),
    })
}

/// Residual of the reachability relation: `Some(v)` with `u . v = w`.
pub fn reaches(u: &World, w: &World) -> Result<Option<World>, WorldError> {
    same_domain(u, w)?;
    Ok(match (u, w) {
        (World::Unit, World::Unit) => Some(World::Unit),
        (World::Temporal(a), World::Temporal(b)) => (b >= a).then(|| World::Temporal(b - a)),
        (World::Rates(a), World::Rates(b)) => b.strip_prefix(a.as_slice()).map(|rest| World::Rates(rest.to_vec())),
        _ => unreachable!("domains checked"),
    })
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            World::Unit => f.write_str("id"),
            World::Temporal(t) => write!(f, "{}", t),
            World::Rates(rs) => {
                f.write_str("[")?;
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", r)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Syntax of worlds as they occur in propositions and judgements.
///
/// `Var` is a de Bruijn index into the enclosing binders of a proposition;
/// `Param` is a free, named world (an eigen-parameter or a symbolic world
/// such as `s` in a canonical sequent); `Meta` only appears during search.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorldExpr {
    Id,
    Lit(World),
    Var(u32),
    Param(Sym),
    Meta(u32),
    Compose(Box<WorldExpr>, Box<WorldExpr>),
}

impl WorldExpr {
    /// A literal; the unit world is written as the identity.
    pub fn lit(w: World) -> WorldExpr {
        match w {
            World::Unit => WorldExpr::Id,
            w => WorldExpr::Lit(w),
        }
    }

    pub fn param(name: &str) -> WorldExpr {
        WorldExpr::Param(sym(name))
    }

    pub fn rate(r: Q) -> WorldExpr {
        WorldExpr::Lit(World::Rates(vec![r]))
    }

    pub fn compose(a: WorldExpr, b: WorldExpr) -> WorldExpr {
        WorldExpr::Compose(Box::new(a), Box::new(b))
    }

    /// Closed means no bound variables; parameters are allowed.
    pub fn is_closed(&self) -> bool {
        match self {
            WorldExpr::Var(_) => false,
            WorldExpr::Compose(a, b) => a.is_closed() && b.is_closed(),
            _ => true,
        }
    }

    pub fn has_meta(&self) -> bool {
        match self {
            WorldExpr::Meta(_) => true,
            WorldExpr::Compose(a, b) => a.has_meta() || b.has_meta(),
            _ => false,
        }
    }

    pub fn mentions_param(&self, name: &str) -> bool {
        match self {
            WorldExpr::Param(p) => &**p == name,
            WorldExpr::Compose(a, b) => a.mentions_param(name) || b.mentions_param(name),
            _ => false,
        }
    }

    pub fn params(&self, out: &mut Vec<Sym>) {
        match self {
            WorldExpr::Param(p) => out.push(p.clone()),
            WorldExpr::Compose(a, b) => {
                a.params(out);
                b.params(out);
            }
            _ => {}
        }
    }

    /// Rebuild every leaf with `f`; compositions are preserved.
    pub fn map_leaves(&self, f: &mut impl FnMut(&WorldExpr) -> Option<WorldExpr>) -> WorldExpr {
        if let Some(e) = f(self) {
            return e;
        }
        match self {
            WorldExpr::Compose(a, b) => WorldExpr::compose(a.map_leaves(f), b.map_leaves(f)),
            other => other.clone(),
        }
    }

    /// The single literal domain mentioned, if any.
    pub fn literal_domain(&self) -> Option<DomainId> {
        match self {
            WorldExpr::Lit(w) => Some(w.domain()),
            WorldExpr::Compose(a, b) => a.literal_domain().or_else(|| b.literal_domain()),
            _ => None,
        }
    }
}

impl From<World> for WorldExpr {
    fn from(w: World) -> Self {
        WorldExpr::lit(w)
    }
}

/// Homomorphic evaluation of a variable-free expression, resolving
/// parameters through `env`.
pub fn eval(e: &WorldExpr, domain: DomainId, env: &HashMap<Sym, World>) -> Result<World, WorldError> {
    match e {
        WorldExpr::Id => Ok(World::rid(domain)),
        WorldExpr::Lit(w) => {
            same_domain(&World::rid(domain), w)?;
            Ok(w.clone())
        }
        WorldExpr::Var(i) => Err(WorldError::Open(*i)),
        WorldExpr::Meta(m) => Err(WorldError::Meta(*m)),
        WorldExpr::Param(p) => {
            let w = env.get(p).ok_or_else(|| WorldError::Unbound(p.clone()))?;
            same_domain(&World::rid(domain), w)?;
            Ok(w.clone())
        }
        WorldExpr::Compose(a, b) => compose(&eval(a, domain, env)?, &eval(b, domain, env)?),
    }
}

/// Extend `env` so that `eval(pattern) = target`.
///
/// Parameters already bound in `env` are substituted. At most one unbound
/// parameter may remain and it must be the rightmost factor (any factor in
/// the commutative temporal domain, any at all in the unit domain, where it
/// is forced to the unit world).
pub fn match_world(pattern: &WorldExpr, target: &World, env: &HashMap<Sym, World>) -> Option<HashMap<Sym, World>> {
    let domain = target.domain();
    let mut free = Vec::new();
    let known = pattern.map_leaves(&mut |leaf| match leaf {
        WorldExpr::Param(p) => match env.get(p) {
            Some(w) => Some(WorldExpr::Lit(w.clone())),
            None => {
                free.push(p.clone());
                Some(WorldExpr::Id)
            }
        },
        _ => None,
    });
    let mut out = env.clone();
    free.sort();
    free.dedup();
    match free.len() {
        0 => (eval(&known, domain, env).ok()? == *target).then_some(out),
        1 => {
            let var = free.pop().unwrap();
            if domain == DomainId::Rates && !rightmost_is(pattern, &var) {
                return None;
            }
            if domain == DomainId::Rates && count_param(pattern, &var) != 1 {
                return None;
            }
            let prefix = eval(&known, domain, env).ok()?;
            let residual = match domain {
                DomainId::Unit => World::Unit,
                DomainId::Temporal => {
                    let n = count_param(pattern, &var) as i64;
                    let diff = reaches(&prefix, target).ok()??;
                    match diff {
                        World::Temporal(d) => World::Temporal(d / Q::from_integer(n)),
                        _ => return None,
                    }
                }
                DomainId::Rates => reaches(&prefix, target).ok()??,
            };
            out.insert(var, residual);
            Some(out)
        }
        _ if domain == DomainId::Unit => {
            for v in free {
                out.insert(v, World::Unit);
            }
            Some(out)
        }
        _ => None,
    }
}

fn rightmost_is(e: &WorldExpr, var: &Sym) -> bool {
    match e {
        WorldExpr::Param(p) => p == var,
        WorldExpr::Compose(a, b) => {
            if matches!(**b, WorldExpr::Id) {
                rightmost_is(a, var)
            } else {
                rightmost_is(b, var)
            }
        }
        _ => false,
    }
}

fn count_param(e: &WorldExpr, var: &Sym) -> usize {
    match e {
        WorldExpr::Param(p) => usize::from(p == var),
        WorldExpr::Compose(a, b) => count_param(a, var) + count_param(b, var),
        _ => 0,
    }
}

/// Symbolic atom of a world normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WAtom {
    Param(Sym),
    Meta(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RItem {
    Rate(Q),
    Atom(WAtom),
}

/// Normal form of a closed world expression in a fixed domain: the free
/// monoid (rates), the free commutative monoid over a rational offset
/// (temporal), or the trivial monoid (unit).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormWorld {
    Unit,
    Temporal { offset: Q, atoms: Vec<WAtom> },
    Rates(Vec<RItem>),
}

impl NormWorld {
    pub fn rid(domain: DomainId) -> NormWorld {
        World::rid(domain).to_norm()
    }

    pub fn of(e: &WorldExpr, domain: DomainId) -> Result<NormWorld, WorldError> {
        let atom = |a: WAtom| -> NormWorld {
            match domain {
                DomainId::Unit => NormWorld::Unit,
                DomainId::Temporal => NormWorld::Temporal { offset: Q::zero(), atoms: vec![a] },
                DomainId::Rates => NormWorld::Rates(vec![RItem::Atom(a)]),
            }
        };
        match e {
            WorldExpr::Id => Ok(NormWorld::rid(domain)),
            WorldExpr::Lit(w) => {
                same_domain(&World::rid(domain), w)?;
                Ok(w.to_norm())
            }
            WorldExpr::Var(i) => Err(WorldError::Open(*i)),
            WorldExpr::Param(p) => Ok(atom(WAtom::Param(p.clone()))),
            WorldExpr::Meta(m) => Ok(atom(WAtom::Meta(*m))),
            WorldExpr::Compose(a, b) => Ok(NormWorld::of(a, domain)?.compose(&NormWorld::of(b, domain)?)),
        }
    }

    pub fn compose(&self, other: &NormWorld) -> NormWorld {
        match (self, other) {
            (NormWorld::Temporal { offset: a, atoms: xs }, NormWorld::Temporal { offset: b, atoms: ys }) => {
                let mut atoms: Vec<WAtom> = xs.iter().chain(ys).cloned().collect();
                atoms.sort();
                NormWorld::Temporal { offset: a + b, atoms }
            }
            (NormWorld::Rates(xs), NormWorld::Rates(ys)) => NormWorld::Rates(xs.iter().chain(ys).cloned().collect()),
            _ => NormWorld::Unit,
        }
    }

    /// Symbolic residual: `Some(v)` with `self . v = target`.
    pub fn residual(&self, target: &NormWorld) -> Option<NormWorld> {
        match (self, target) {
            (NormWorld::Unit, NormWorld::Unit) => Some(NormWorld::Unit),
            (NormWorld::Temporal { offset: a, atoms: xs }, NormWorld::Temporal { offset: b, atoms: ys }) => {
                if b < a {
                    return None;
                }
                let mut rest = ys.clone();
                for x in xs {
                    let pos = rest.iter().position(|y| y == x)?;
                    rest.remove(pos);
                }
                Some(NormWorld::Temporal { offset: b - a, atoms: rest })
            }
            (NormWorld::Rates(xs), NormWorld::Rates(ys)) => ys.strip_prefix(xs.as_slice()).map(|rest| NormWorld::Rates(rest.to_vec())),
            _ => None,
        }
    }

    pub fn metas(&self) -> Vec<u32> {
        let atoms: Vec<&WAtom> = match self {
            NormWorld::Unit => Vec::new(),
            NormWorld::Temporal { atoms, .. } => atoms.iter().collect(),
            NormWorld::Rates(items) => items
                .iter()
                .filter_map(|i| match i {
                    RItem::Atom(a) => Some(a),
                    _ => None,
                })
                .collect(),
        };
        atoms
            .into_iter()
            .filter_map(|a| match a {
                WAtom::Meta(m) => Some(*m),
                _ => None,
            })
            .collect()
    }

    /// The normal form as an expression (literals coalesced).
    pub fn to_expr(&self) -> WorldExpr {
        let atom_expr = |a: &WAtom| match a {
            WAtom::Param(p) => WorldExpr::Param(p.clone()),
            WAtom::Meta(m) => WorldExpr::Meta(*m),
        };
        let chain = |parts: Vec<WorldExpr>| -> WorldExpr { parts.into_iter().reduce(WorldExpr::compose).unwrap_or(WorldExpr::Id) };
        match self {
            NormWorld::Unit => WorldExpr::Id,
            NormWorld::Temporal { offset, atoms } => {
                let mut parts = Vec::new();
                if !offset.is_zero() || atoms.is_empty() {
                    parts.push(WorldExpr::Lit(World::Temporal(*offset)));
                }
                parts.extend(atoms.iter().map(atom_expr));
                if parts.len() == 1 && atoms.is_empty() && offset.is_zero() {
                    return WorldExpr::Lit(World::Temporal(*offset));
                }
                chain(parts)
            }
            NormWorld::Rates(items) => {
                if items.is_empty() {
                    return WorldExpr::Lit(World::Rates(Vec::new()));
                }
                let mut parts = Vec::new();
                let mut run: Vec<Q> = Vec::new();
                for it in items {
                    match it {
                        RItem::Rate(r) => run.push(*r),
                        RItem::Atom(a) => {
                            if !run.is_empty() {
                                parts.push(WorldExpr::Lit(World::Rates(std::mem::take(&mut run))));
                            }
                            parts.push(atom_expr(a));
                        }
                    }
                }
                if !run.is_empty() {
                    parts.push(WorldExpr::Lit(World::Rates(run)));
                }
                chain(parts)
            }
        }
    }

    /// Concrete world, if no symbolic atoms remain.
    pub fn to_world(&self) -> Option<World> {
        match self {
            NormWorld::Unit => Some(World::Unit),
            NormWorld::Temporal { offset, atoms } => atoms.is_empty().then_some(World::Temporal(*offset)),
            NormWorld::Rates(items) => items
                .iter()
                .map(|i| match i {
                    RItem::Rate(r) => Some(*r),
                    RItem::Atom(_) => None,
                })
                .collect::<Option<Vec<_>>>()
                .map(World::Rates),
        }
    }
}

/// World equality by evaluated monoid value.
pub fn world_eq(a: &WorldExpr, b: &WorldExpr, domain: DomainId) -> bool {
    match (NormWorld::of(a, domain), NormWorld::of(b, domain)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}
