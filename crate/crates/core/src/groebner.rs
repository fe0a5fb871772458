//! Buchberger's algorithm, normal forms, and elimination ideals.
//!
//! Output bases are reduced (monic, no leading monomial divides any monomial
//! of another generator) and sorted ascending by leading monomial, so a
//! reduced basis is a canonical form for its ideal under a fixed order.

use std::sync::Arc;

use thiserror::Error;

use crate::exactpoly::{Monomial, MonomialOrder, PolyError, Polynomial, Rat, VarTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("S-pair limit of {0} exceeded")]
    PairLimit(usize),
    #[error("basis size limit of {0} exceeded")]
    BasisLimit(usize),
    #[error("cannot eliminate unknown variable `{0}`")]
    UnknownVar(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Hard caps that turn runaway computations into explicit failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_pairs: 100_000, max_basis: 5_000 }
    }
}

/// Generators of an ideal together with the order they were computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealBasis {
    pub vars: Arc<VarTable>,
    pub generators: Vec<Polynomial>,
    pub order: MonomialOrder,
    pub reduced: bool,
}

impl IdealBasis {
    pub fn contains(&self, f: &Polynomial) -> bool {
        normal_form(f, &self.generators, self.order).is_zero()
    }
}

/// Full remainder of `f` under multivariate division by `gens`.
///
/// Reduction always uses the first divisor in generator-list order, so the
/// result is deterministic for a fixed list; no monomial of the remainder is
/// divisible by any generator's leading monomial.
pub fn normal_form(f: &Polynomial, gens: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let leads: Vec<(&Polynomial, &Monomial, &Rat)> = gens
        .iter()
        .filter_map(|g| g.leading_term(order).map(|(m, c)| (g, m, c)))
        .collect();
    let mut p = f.clone();
    let mut remainder: Vec<(Monomial, Rat)> = Vec::new();
    while !p.is_zero() {
        let (lm, lc) = {
            let (m, c) = p.leading_term(order).expect("nonzero");
            (m.clone(), c.clone())
        };
        match leads.iter().find(|(_, glm, _)| glm.divides(&lm)) {
            Some((g, glm, glc)) => {
                let q = lm.div(glm);
                let factor = &lc / *glc;
                p = &p - &g.mul_term(&q, &factor);
            }
            None => {
                p = &p - &Polynomial::from_terms(f.vars(), vec![(lm.clone(), lc.clone())]);
                remainder.push((lm, lc));
            }
        }
    }
    Polynomial::from_terms(f.vars(), remainder)
}

/// S-polynomial of `f` and `g`: the cancellation of their leading terms over
/// the lcm of their leading monomials.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let a = f.mul_term(&l.div(fm), &fc.recip());
    let b = g.mul_term(&l.div(gm), &gc.recip());
    &a - &b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TieBreak {
    IndexPair,
    /// Only constructed by order-independence tests.
    #[cfg_attr(not(test), allow(dead_code))]
    ReversedIndexPair,
}

/// Reduced Groebner basis of the ideal generated by `gens`.
///
/// Pair selection follows the normal strategy: minimal lcm under `order`,
/// ties broken by generator-index pair. Pairs with coprime leading monomials
/// are discarded without reduction.
pub fn buchberger(
    gens: &[Polynomial],
    order: MonomialOrder,
    limits: GroebnerLimits,
) -> Result<IdealBasis, GroebnerError> {
    buchberger_with(gens, order, limits, TieBreak::IndexPair)
}

pub(crate) fn buchberger_with(
    gens: &[Polynomial],
    order: MonomialOrder,
    limits: GroebnerLimits,
    tie: TieBreak,
) -> Result<IdealBasis, GroebnerError> {
    assert!(!gens.is_empty(), "buchberger needs at least one generator");
    let vars = Arc::clone(gens[0].vars());
    let mut basis: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 1..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        let best = select_pair(&pairs, &basis, order, tie);
        let (i, j) = pairs.swap_remove(best);
        processed += 1;
        if processed > limits.max_pairs {
            return Err(GroebnerError::PairLimit(limits.max_pairs));
        }

        let (mi, _) = basis[i].leading_term(order).expect("nonzero");
        let (mj, _) = basis[j].leading_term(order).expect("nonzero");
        if mi.lcm(mj) == mi.mul(mj) {
            continue;
        }

        let s = s_polynomial(&basis[i], &basis[j], order);
        let r = normal_form(&s, &basis, order);
        if !r.is_zero() {
            let new = basis.len();
            for k in 0..new {
                pairs.push((k, new));
            }
            basis.push(r);
            if basis.len() > limits.max_basis {
                return Err(GroebnerError::BasisLimit(limits.max_basis));
            }
        }
    }

    let generators = reduce_basis(basis, order);
    Ok(IdealBasis { vars, generators, order, reduced: true })
}

fn select_pair(
    pairs: &[(usize, usize)],
    basis: &[Polynomial],
    order: MonomialOrder,
    tie: TieBreak,
) -> usize {
    let lcm_of = |&(i, j): &(usize, usize)| {
        let (mi, _) = basis[i].leading_term(order).expect("nonzero");
        let (mj, _) = basis[j].leading_term(order).expect("nonzero");
        mi.lcm(mj)
    };
    let mut best = 0;
    let mut best_lcm = lcm_of(&pairs[0]);
    for (idx, pair) in pairs.iter().enumerate().skip(1) {
        let l = lcm_of(pair);
        let better = match order.cmp(&l, &best_lcm) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => match tie {
                TieBreak::IndexPair => *pair < pairs[best],
                TieBreak::ReversedIndexPair => *pair > pairs[best],
            },
        };
        if better {
            best = idx;
            best_lcm = l;
        }
    }
    best
}

/// Minimizes, inter-reduces, normalizes to monic, sorts by leading monomial.
fn reduce_basis(mut basis: Vec<Polynomial>, order: MonomialOrder) -> Vec<Polynomial> {
    basis.sort_by(|a, b| {
        let (ma, _) = a.leading_term(order).expect("nonzero");
        let (mb, _) = b.leading_term(order).expect("nonzero");
        order.cmp(ma, mb)
    });
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis {
        let (gm, _) = g.leading_term(order).expect("nonzero");
        let redundant = minimal.iter().any(|h| {
            let (hm, _) = h.leading_term(order).expect("nonzero");
            hm.divides(gm)
        });
        if !redundant {
            minimal.push(g);
        }
    }

    loop {
        let mut changed = false;
        for i in 0..minimal.len() {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, h)| h.clone())
                .collect();
            let r = normal_form(&minimal[i], &others, order);
            if r != minimal[i] {
                changed = true;
                minimal[i] = r;
            }
        }
        minimal.retain(|g| !g.is_zero());
        if !changed {
            break;
        }
    }

    let mut out: Vec<Polynomial> = minimal.iter().map(|g| g.monic(order)).collect();
    out.sort_by(|a, b| {
        let (ma, _) = a.leading_term(order).expect("nonzero");
        let (mb, _) = b.leading_term(order).expect("nonzero");
        order.cmp(ma, mb)
    });
    out
}

/// Ideal membership by reduction against a reduced basis of `gens`.
pub fn ideal_membership(
    f: &Polynomial,
    gens: &[Polynomial],
    order: MonomialOrder,
    limits: GroebnerLimits,
) -> Result<bool, GroebnerError> {
    let basis = buchberger(gens, order, limits)?;
    Ok(basis.contains(f))
}

/// Generators of the elimination ideal obtained by dropping `drop` variables.
///
/// Internally reorders the table so the dropped block comes first, runs
/// Buchberger under the block order, and keeps the generators free of every
/// dropped variable, re-expressed over the kept-variable table.
pub fn eliminate(
    gens: &[Polynomial],
    drop: &[&str],
    limits: GroebnerLimits,
) -> Result<IdealBasis, GroebnerError> {
    eliminate_with(gens, drop, limits, TieBreak::IndexPair)
}

pub(crate) fn eliminate_with(
    gens: &[Polynomial],
    drop: &[&str],
    limits: GroebnerLimits,
    tie: TieBreak,
) -> Result<IdealBasis, GroebnerError> {
    assert!(!gens.is_empty(), "eliminate needs at least one generator");
    let vars = gens[0].vars();
    let mut drop_idx = Vec::new();
    for name in drop {
        let i = vars
            .index(name)
            .ok_or_else(|| GroebnerError::UnknownVar((*name).into()))?;
        if !drop_idx.contains(&i) {
            drop_idx.push(i);
        }
    }
    drop_idx.sort_unstable();
    let keep_idx: Vec<usize> = (0..vars.len()).filter(|i| !drop_idx.contains(i)).collect();

    // permuted table: dropped block first, kept block second
    let perm: Vec<usize> = drop_idx.iter().chain(&keep_idx).copied().collect();
    let permuted = VarTable::new(perm.iter().map(|&i| vars.name(i).to_string()))?;
    let reordered: Vec<Polynomial> = gens
        .iter()
        .map(|g| remap(g, &permuted, &perm))
        .collect();

    let k = drop_idx.len();
    let basis = buchberger_with(&reordered, MonomialOrder::Block { eliminated: k }, limits, tie)?;

    let kept_table = VarTable::new(keep_idx.iter().map(|&i| vars.name(i).to_string()))?;
    let generators: Vec<Polynomial> = basis
        .generators
        .iter()
        .filter(|g| {
            g.terms()
                .iter()
                .all(|(m, _)| m.exps()[..k].iter().all(|&e| e == 0))
        })
        .map(|g| {
            let terms = g
                .terms()
                .iter()
                .map(|(m, c)| (Monomial::from_exps(m.exps()[k..].to_vec()), c.clone()))
                .collect();
            Polynomial::from_terms(&kept_table, terms)
        })
        .collect();

    Ok(IdealBasis { vars: kept_table, generators, order: MonomialOrder::Grevlex, reduced: true })
}

fn remap(p: &Polynomial, table: &Arc<VarTable>, perm: &[usize]) -> Polynomial {
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let exps = perm.iter().map(|&old| m.exp(old)).collect();
            (Monomial::from_exps(exps), c.clone())
        })
        .collect();
    Polynomial::from_terms(table, terms)
}
