//! Random generators for worlds, terms and propositions, driven by the
//! crate's own PRNG so that test corpora are reproducible.

use num_rational::Ratio;

use crate::rng::Rng;
use crate::syntax::{Polarity, Prop, Sort, Term};
use crate::worlds::{sym, DomainId, World, WorldExpr, Q};

pub fn rational(rng: &mut Rng, lo: i64, hi: i64) -> Q {
    let den = 1 + rng.below(4) as i64;
    let num = lo * den + rng.below(((hi - lo) * den + 1) as usize) as i64;
    Ratio::new(num, den)
}

/// A world value of `d`; rates are positive, times nonnegative.
pub fn world(rng: &mut Rng, d: DomainId) -> World {
    match d {
        DomainId::Unit => World::Unit,
        DomainId::Temporal => World::Temporal(rational(rng, 0, 5)),
        DomainId::Rates => {
            let n = rng.below(4);
            World::Rates((0..n).map(|_| rational(rng, 1, 5)).collect())
        }
    }
}

/// Shape parameters for random propositions.
#[derive(Debug, Clone)]
pub struct PropGen {
    pub domain: DomainId,
    pub depth: usize,
    /// Allow `at`, `↓`, and world quantifiers.
    pub hybrid: bool,
    /// Allow term quantifiers and atom arguments.
    pub first_order: bool,
    pub atoms: Vec<&'static str>,
    pub pos_atoms: Vec<&'static str>,
    pub params: Vec<&'static str>,
}

impl PropGen {
    pub fn new(domain: DomainId, depth: usize) -> PropGen {
        PropGen { domain, depth, hybrid: true, first_order: true, atoms: vec!["a", "b", "c"], pos_atoms: Vec::new(), params: vec!["w"] }
    }

    pub fn pure(domain: DomainId, depth: usize) -> PropGen {
        PropGen { hybrid: false, first_order: false, ..PropGen::new(domain, depth) }
    }

    pub fn prop(&self, rng: &mut Rng) -> Prop {
        self.go(rng, self.depth, &mut Vec::new())
    }

    pub fn world_expr(&self, rng: &mut Rng, scope: &[Sort]) -> WorldExpr {
        let vars: Vec<u32> = (0..scope.len() as u32).filter(|&i| scope[scope.len() - 1 - i as usize] == Sort::World).collect();
        let leaf = |rng: &mut Rng| -> WorldExpr {
            match rng.below(4) {
                0 if !vars.is_empty() => WorldExpr::Var(*rng.pick(&vars)),
                1 if !self.params.is_empty() => WorldExpr::param(rng.pick(&self.params)),
                2 => WorldExpr::Id,
                _ => WorldExpr::lit(world(rng, self.domain)),
            }
        };
        if rng.chance(0.3) {
            WorldExpr::compose(leaf(rng), leaf(rng))
        } else {
            leaf(rng)
        }
    }

    fn term(&self, rng: &mut Rng, scope: &[Sort], depth: usize) -> Term {
        let vars: Vec<u32> = (0..scope.len() as u32).filter(|&i| scope[scope.len() - 1 - i as usize] == Sort::Term).collect();
        match rng.below(4) {
            0 if !vars.is_empty() => Term::Var(*rng.pick(&vars)),
            1 if depth > 0 => Term::Fn(sym("f"), vec![self.term(rng, scope, depth - 1)]),
            2 if self.hybrid && scope.contains(&Sort::World) => Term::World(self.world_expr(rng, scope)),
            _ => Term::cnst(["k", "m"][rng.below(2)]),
        }
    }

    fn atom(&self, rng: &mut Rng, scope: &[Sort]) -> Prop {
        let use_pos = !self.pos_atoms.is_empty() && rng.chance(0.3);
        let (pol, name) = if use_pos { (Polarity::Pos, *rng.pick(&self.pos_atoms)) } else { (Polarity::Neg, *rng.pick(&self.atoms)) };
        let args = if self.first_order && rng.chance(0.4) { vec![self.term(rng, scope, 1)] } else { Vec::new() };
        Prop::Atom(pol, sym(name), args)
    }

    fn go(&self, rng: &mut Rng, depth: usize, scope: &mut Vec<Sort>) -> Prop {
        if depth == 0 || rng.chance(0.15) {
            return match rng.below(8) {
                0 => Prop::One,
                1 => Prop::Top,
                2 => Prop::Zero,
                _ => self.atom(rng, scope),
            };
        }
        let k = rng.below(if self.hybrid { 12 } else { 8 });
        let k = if !self.first_order && (k == 6 || k == 7) { rng.below(6) } else { k };
        let sub = |rng: &mut Rng, scope: &mut Vec<Sort>| self.go(rng, depth - 1, scope);
        match k {
            0 => Prop::tensor(sub(rng, scope), sub(rng, scope)),
            1 => Prop::lolli(sub(rng, scope), sub(rng, scope)),
            2 => Prop::with(sub(rng, scope), sub(rng, scope)),
            3 => Prop::plus(sub(rng, scope), sub(rng, scope)),
            4 | 5 => Prop::bang(sub(rng, scope)),
            6 | 7 => {
                scope.push(Sort::Term);
                let body = sub(rng, scope);
                scope.pop();
                if k == 6 {
                    Prop::forall(Sort::Term, body)
                } else {
                    Prop::exists(Sort::Term, body)
                }
            }
            8 => {
                let w = self.world_expr(rng, scope);
                Prop::at(sub(rng, scope), w)
            }
            9 => {
                scope.push(Sort::World);
                let body = sub(rng, scope);
                scope.pop();
                Prop::local(body)
            }
            _ => {
                scope.push(Sort::World);
                let body = sub(rng, scope);
                scope.pop();
                if k == 10 {
                    Prop::forall(Sort::World, body)
                } else {
                    Prop::exists(Sort::World, body)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_and_well_formed() {
        let mut rng = Rng::new(11);
        for d in DomainId::ALL {
            let g = PropGen::new(d, 5);
            for _ in 0..200 {
                let p = g.prop(&mut rng);
                assert!(p.is_closed(), "{:?}", p);
                assert!(p.well_formed(&mut Vec::new()), "{}", p);
            }
        }
    }

    #[test]
    fn pure_has_no_hybrid() {
        let mut rng = Rng::new(5);
        let g = PropGen::pure(DomainId::Unit, 4);
        for _ in 0..200 {
            assert!(g.prop(&mut rng).is_pure());
        }
    }
}
