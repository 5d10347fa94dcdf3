//! First-order formulas over ordered abelian groups with `p`-divisibility
//! predicates: construction, serialization and bounded evaluation.

mod eval;
mod sexpr;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oag::{Component, OagError};

pub use eval::{bound_notes, eval_bounded, Assignment, EvalConfig, EvalOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable {0:?} is neither bound nor declared free")]
    UnboundVariable(String),
    #[error("free variable {0:?} has no assigned value")]
    Unassigned(String),
    #[error("scalar multiple with coefficient 0")]
    ZeroCoefficient,
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("bounded evaluation supports only Z and Q components, found {0}")]
    UnsupportedComponent(Component),
    #[error("coordinate does not fit in 64-bit rationals")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] OagError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(String),
    Zero,
    Add(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Scale(i64, Box<Term>),
    /// `|t| = max(t, -t)`.
    Abs(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(self, other: Term) -> Term {
        Term::Add(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: Term) -> Term {
        self.add(Term::Neg(Box::new(other)))
    }

    pub fn scale(self, c: i64) -> Term {
        Term::Scale(c, Box::new(self))
    }

    pub fn abs(self) -> Term {
        Term::Abs(Box::new(self))
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::Zero => false,
            Term::Add(a, b) => a.mentions(x) || b.mentions(x),
            Term::Neg(a) | Term::Scale(_, a) | Term::Abs(a) => a.mentions(x),
        }
    }

    /// Whether `x` occurs underneath an absolute value.
    pub(crate) fn mentions_under_abs(&self, x: &str) -> bool {
        match self {
            Term::Var(_) | Term::Zero => false,
            Term::Add(a, b) => a.mentions_under_abs(x) || b.mentions_under_abs(x),
            Term::Neg(a) | Term::Scale(_, a) => a.mentions_under_abs(x),
            Term::Abs(a) => a.mentions(x),
        }
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero => {}
            Term::Add(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Neg(a) | Term::Scale(_, a) | Term::Abs(a) => a.vars(out),
        }
    }

    fn first_abs(&self) -> Option<&Term> {
        match self {
            Term::Var(_) | Term::Zero => None,
            Term::Add(a, b) => a.first_abs().or_else(|| b.first_abs()),
            Term::Neg(a) | Term::Scale(_, a) => a.first_abs(),
            Term::Abs(a) => a.first_abs().or(Some(self)),
        }
    }

    fn replace(&self, target: &Term, with: &Term) -> Term {
        if self == target {
            return with.clone();
        }
        match self {
            Term::Var(_) | Term::Zero => self.clone(),
            Term::Add(a, b) => a.replace(target, with).add(b.replace(target, with)),
            Term::Neg(a) => Term::Neg(Box::new(a.replace(target, with))),
            Term::Scale(c, a) => a.replace(target, with).scale(*c),
            Term::Abs(a) => a.replace(target, with).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    True,
    False,
    Lt(Term, Term),
    Le(Term, Term),
    Eq(Term, Term),
    /// `t` lies in `p` times the group.
    DivP(u32, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn implies(self, then: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(then))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    fn atom_terms(&self) -> Option<Vec<&Term>> {
        match self {
            Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => Some(vec![a, b]),
            Formula::DivP(_, t) => Some(vec![t]),
            _ => None,
        }
    }

    fn map_atom_terms(&self, f: impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Lt(a, b) => Formula::Lt(f(a), f(b)),
            Formula::Le(a, b) => Formula::Le(f(a), f(b)),
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::DivP(p, t) => Formula::DivP(*p, f(t)),
            _ => self.clone(),
        }
    }

    /// Free occurrences of `x` outside any `DivP` atom, or inside one under
    /// an absolute value, or in `DivP` atoms for more than one prime, make
    /// `x` non-residual. Returns the prime when `x` is residual.
    pub(crate) fn residue_prime(&self, x: &str) -> Result<Option<u32>, ()> {
        let mut prime = None;
        self.residue_walk(x, &mut prime)?;
        Ok(prime)
    }

    fn residue_walk(&self, x: &str, prime: &mut Option<u32>) -> Result<(), ()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => {
                if a.mentions(x) || b.mentions(x) {
                    Err(())
                } else {
                    Ok(())
                }
            }
            Formula::DivP(p, t) => {
                if !t.mentions(x) {
                    return Ok(());
                }
                if t.mentions_under_abs(x) || prime.is_some_and(|q| q != *p) {
                    return Err(());
                }
                *prime = Some(*p);
                Ok(())
            }
            Formula::Not(f) => f.residue_walk(x, prime),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.residue_walk(x, prime)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.residue_walk(x, prime)?;
                b.residue_walk(x, prime)
            }
            Formula::Forall(y, f) | Formula::Exists(y, f) => {
                if y == x {
                    Ok(())
                } else {
                    f.residue_walk(x, prime)
                }
            }
        }
    }

    fn check(&self, bound: &mut Vec<String>) -> Result<(), FormulaError> {
        if let Some(ts) = self.atom_terms() {
            if let Formula::DivP(p, _) = self {
                if !crate::oag::is_prime(*p) {
                    return Err(FormulaError::NotPrime(*p));
                }
            }
            for t in ts {
                check_term(t, bound)?;
            }
            return Ok(());
        }
        match self {
            Formula::Not(f) => f.check(bound),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.check(bound)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.check(bound)?;
                b.check(bound)
            }
            Formula::Forall(x, f) | Formula::Exists(x, f) => {
                bound.push(x.clone());
                let r = f.check(bound);
                bound.pop();
                r
            }
            _ => Ok(()),
        }
    }
}

fn check_term(t: &Term, bound: &[String]) -> Result<(), FormulaError> {
    if let Term::Scale(0, _) = t {
        return Err(FormulaError::ZeroCoefficient);
    }
    let mut vs = BTreeSet::new();
    t.vars(&mut vs);
    match vs.into_iter().find(|v| !bound.contains(v)) {
        Some(v) => Err(FormulaError::UnboundVariable(v)),
        None => match t {
            Term::Add(a, b) => check_term(a, bound).and(check_term(b, bound)),
            Term::Neg(a) | Term::Scale(_, a) | Term::Abs(a) => check_term(a, bound),
            _ => Ok(()),
        },
    }
}

/// A formula together with its declared free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OagFormula {
    pub free: Vec<String>,
    pub body: Formula,
}

impl OagFormula {
    pub fn new(free: &[&str], body: Formula) -> Result<Self, FormulaError> {
        let f = OagFormula {
            free: free.iter().map(|s| s.to_string()).collect(),
            body,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn sentence(body: Formula) -> Result<Self, FormulaError> {
        OagFormula::new(&[], body)
    }

    pub fn validate(&self) -> Result<(), FormulaError> {
        let mut bound = self.free.clone();
        self.body.check(&mut bound)
    }

    pub fn to_sexpr(&self) -> String {
        sexpr::print(self)
    }

    pub fn from_sexpr(s: &str) -> Result<Self, FormulaError> {
        let f = sexpr::parse(s)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("formulas serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, FormulaError> {
        let f: OagFormula = serde_json::from_str(s).map_err(|e| FormulaError::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    /// Equivalent formula without absolute values: an atom `A(|u|)` becomes
    /// `(0 <= u and A(u)) or (u < 0 and A(-u))`.
    pub fn expand_abs(&self) -> OagFormula {
        OagFormula {
            free: self.free.clone(),
            body: expand(&self.body),
        }
    }
}

fn expand(f: &Formula) -> Formula {
    if let Some(ts) = f.atom_terms() {
        let Some(abs) = ts.iter().find_map(|t| t.first_abs()).cloned() else {
            return f.clone();
        };
        let Term::Abs(inner) = &abs else { unreachable!() };
        let inner = (**inner).clone();
        let neg = Term::Neg(Box::new(inner.clone()));
        let pos_case = f.map_atom_terms(|t| t.replace(&abs, &inner));
        let neg_case = f.map_atom_terms(|t| t.replace(&abs, &neg));
        return Formula::Or(vec![
            Formula::And(vec![Formula::Le(Term::Zero, inner.clone()), expand(&pos_case)]),
            Formula::And(vec![Formula::Lt(inner, Term::Zero), expand(&neg_case)]),
        ]);
    }
    match f {
        Formula::Not(a) => expand(a).not(),
        Formula::And(fs) => Formula::And(fs.iter().map(expand).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(expand).collect()),
        Formula::Implies(a, b) => expand(a).implies(expand(b)),
        Formula::Iff(a, b) => Formula::Iff(Box::new(expand(a)), Box::new(expand(b))),
        Formula::Forall(x, a) => Formula::forall(x, expand(a)),
        Formula::Exists(x, a) => Formula::exists(x, expand(a)),
        other => other.clone(),
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn chain_var(i: u32) -> String {
    format!("g{i}")
}

/// Every interval `[a, b]` containing `p + 1` strictly increasing elements
/// meets `p` times the group. Written with one guard per quantifier so each
/// universal step can be refuted independently.
pub fn p_regularity_sentence(p: u32) -> OagFormula {
    let p_i = i64::from(p);
    let last = chain_var(p);
    let mut body = Formula::exists(
        "d",
        Formula::And(vec![
            Formula::Le(v("g0"), v("d").scale(p_i)),
            Formula::Le(v("d").scale(p_i), v(&last)),
        ]),
    );
    for i in (1..=p).rev() {
        let (prev, cur) = (chain_var(i - 1), chain_var(i));
        body = Formula::forall(&cur, Formula::Lt(v(&prev), v(&cur)).implies(body));
    }
    OagFormula::sentence(Formula::forall("g0", body)).expect("well formed")
}

/// For every `g` some coset of `p` times the group avoids the whole window
/// `[-p|g|, p|g|]` shifted by its representative.
pub fn p_antiregularity_sentence(p: u32) -> OagFormula {
    let window = Formula::Le(v("e").abs(), v("g").abs().scale(i64::from(p)));
    let body = Formula::forall(
        "g",
        Formula::exists(
            "d",
            Formula::forall("e", window.implies(Formula::DivP(p, v("d").add(v("e"))).not())),
        ),
    );
    OagFormula::sentence(body).expect("well formed")
}

/// Membership of the free variable `g` in the smallest convex subgroup with
/// `p`-divisible quotient, valid under that construction's hypotheses.
pub fn delta0_membership(p: u32) -> OagFormula {
    let body = Formula::exists(
        "e",
        Formula::forall(
            "a",
            Formula::Lt(v("a").abs(), v("g").abs()).implies(Formula::DivP(p, v("e").sub(v("a"))).not()),
        ),
    );
    OagFormula::new(&["g"], body).expect("well formed")
}

/// Membership of the free variable `d` in the convex subgroup attached to
/// the positive parameter `g`: `[0, p|d|]` lies in `[0, p*g] + p*G`.
pub fn delta_gamma_membership(p: u32) -> OagFormula {
    let p_i = i64::from(p);
    let inner = Formula::exists(
        "r",
        Formula::And(vec![
            Formula::Le(Term::Zero, v("r")),
            Formula::Le(v("r"), v("g").scale(p_i)),
            Formula::DivP(p, v("b").sub(v("r"))),
        ]),
    );
    let guard = Formula::And(vec![
        Formula::Le(Term::Zero, v("b")),
        Formula::Le(v("b"), v("d").abs().scale(p_i)),
    ]);
    OagFormula::new(&["g", "d"], Formula::forall("b", guard.implies(inner))).expect("well formed")
}

/// Number of leading universal quantifiers, counting through guards of the
/// form `A -> forall x ...`.
pub fn universal_prefix_len(f: &Formula) -> usize {
    match f {
        Formula::Forall(_, b) => 1 + universal_prefix_len(b),
        Formula::Implies(_, b) => universal_prefix_len(b),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_arity() {
        for p in [2u32, 3, 5] {
            let f = p_regularity_sentence(p);
            assert!(f.free.is_empty());
            assert_eq!(universal_prefix_len(&f.body), p as usize + 1);
        }
    }

    #[test]
    fn validation() {
        let bad = OagFormula::sentence(Formula::Lt(v("x"), Term::Zero));
        assert_eq!(bad, Err(FormulaError::UnboundVariable("x".into())));
        let bad = OagFormula::new(&["x"], Formula::DivP(4, v("x")));
        assert_eq!(bad, Err(FormulaError::NotPrime(4)));
        let bad = OagFormula::new(&["x"], Formula::Eq(v("x").scale(0), Term::Zero));
        assert_eq!(bad, Err(FormulaError::ZeroCoefficient));
    }

    #[test]
    fn residual_variables() {
        let f = delta0_membership(3);
        let Formula::Exists(x, body) = &f.body else { panic!() };
        assert_eq!(body.residue_prime(x), Ok(Some(3)));
        let Formula::Forall(a, inner) = &**body else { panic!() };
        assert!(inner.residue_prime(a).is_err());
        let g = p_antiregularity_sentence(2);
        let Formula::Forall(_, inner) = &g.body else { panic!() };
        let Formula::Exists(d, body) = &**inner else { panic!() };
        assert_eq!(body.residue_prime(d), Ok(Some(2)));
    }

    #[test]
    fn abs_expansion_removes_abs() {
        let f = p_antiregularity_sentence(2).expand_abs();
        assert!(!f.to_sexpr().contains("abs"));
    }
}
