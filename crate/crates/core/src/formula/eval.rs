//! Bounded model checking of formulas over finite `Z`/`Q` spines.
//!
//! Each quantifier ranges over one of three candidate sets:
//! - residue representatives, when the variable only occurs inside
//!   `DivP(p, .)` atoms for a single `p` (truth then depends only on the
//!   class modulo `pG`, so the set is exhaustive);
//! - the exact finite solution set of a guard interval `lo <= x <= hi`,
//!   when the endpoints agree except in a last `Z` coordinate (exhaustive);
//! - a box of elements ordered by distance from zero (not exhaustive).
//!
//! A value is definitive when every quantifier on the decisive path was
//! exhaustive or was settled by a definitive witness (for `exists`) or
//! counterexample (for `forall`).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Formula, FormulaError, OagFormula, Term};
use crate::oag::{Component, Element, Spine};

type Value = Vec<Rational64>;

/// Candidate sets bigger than this are not enumerated as exact solutions.
const MAX_FINITE_SOLUTIONS: i64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Bound on `|coordinate|` for `Z` and on `|numerator|` for `Q`.
    pub radius: u32,
    /// Largest denominator of sampled `Q` coordinates.
    pub denom_bound: u32,
    /// Maximum number of atom evaluations before giving up.
    pub step_budget: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            radius: 4,
            denom_bound: 4,
            step_budget: 2_000_000,
        }
    }
}

pub type Assignment = BTreeMap<String, Element>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EvalOutcome {
    True { trail: Vec<String> },
    False { trail: Vec<String> },
    /// Not decided; `in_box_value` is the truth value computed when every
    /// non-exhaustive quantifier is read as ranging over the box only.
    BoundExhausted { in_box_value: bool, trail: Vec<String> },
}

impl EvalOutcome {
    pub fn definite(&self) -> Option<bool> {
        match self {
            EvalOutcome::True { .. } => Some(true),
            EvalOutcome::False { .. } => Some(false),
            EvalOutcome::BoundExhausted { .. } => None,
        }
    }

    /// The definite value, or the in-box value when undecided.
    pub fn in_box_value(&self) -> bool {
        match self {
            EvalOutcome::True { .. } => true,
            EvalOutcome::False { .. } => false,
            EvalOutcome::BoundExhausted { in_box_value, .. } => *in_box_value,
        }
    }

    pub fn trail(&self) -> &[String] {
        match self {
            EvalOutcome::True { trail } | EvalOutcome::False { trail } => trail,
            EvalOutcome::BoundExhausted { trail, .. } => trail,
        }
    }
}

/// Evaluates `f` on the finite spine `g`, with free variables taken from
/// `assignment`.
pub fn eval_bounded(
    f: &OagFormula,
    g: &Spine,
    cfg: &EvalConfig,
    assignment: &Assignment,
) -> Result<EvalOutcome, FormulaError> {
    f.validate()?;
    let positions = g.finite_positions().ok_or(crate::oag::OagError::NotFinite)?;
    let comps = g.finite_components().ok_or(crate::oag::OagError::NotFinite)?;
    if let Some(c) = comps.iter().find(|c| !matches!(c, Component::Z | Component::Q)) {
        return Err(FormulaError::UnsupportedComponent(*c));
    }
    let mut env = Vec::new();
    for x in &f.free {
        let e = assignment.get(x).ok_or_else(|| FormulaError::Unassigned(x.clone()))?;
        e.check_on(g)?;
        let coords = positions
            .iter()
            .map(|p| to_small(&e.coord(*p)))
            .collect::<Option<Value>>()
            .ok_or(FormulaError::Overflow)?;
        env.push((x.clone(), coords));
    }
    let mut ctx = Ctx::new(comps, cfg);
    let r = ctx.formula(&f.body, &mut env);
    let mut trail = r.trail;
    if ctx.steps > ctx.budget {
        trail.push(format!("step budget of {} exhausted", ctx.budget));
    }
    Ok(match (r.value, r.definitive) {
        (true, true) => EvalOutcome::True { trail },
        (false, true) => EvalOutcome::False { trail },
        (v, false) => EvalOutcome::BoundExhausted { in_box_value: v, trail },
    })
}

fn to_small(x: &num_rational::BigRational) -> Option<Rational64> {
    Some(Rational64::new(x.numer().to_i64()?, x.denom().to_i64()?))
}

fn fmt_value(v: &[Rational64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn lex_sign(v: &[Rational64]) -> Ordering {
    v.iter()
        .find(|x| !x.is_zero())
        .map_or(Ordering::Equal, |x| if x.is_positive() { Ordering::Greater } else { Ordering::Less })
}

fn lex_cmp(a: &[Rational64], b: &[Rational64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

struct Res {
    value: bool,
    definitive: bool,
    trail: Vec<String>,
}

impl Res {
    fn exact(value: bool) -> Res {
        Res {
            value,
            definitive: true,
            trail: Vec::new(),
        }
    }
}

enum Candidates {
    Finite(Vec<Value>, &'static str),
    /// The box, preceded by a few points of the guard interval (if any).
    Box(Vec<Value>),
}

#[derive(Clone, Copy)]
enum Dir {
    Upper,
    Lower,
    Exact,
    /// `c|x| <= u`, i.e. `-u/c <= x <= u/c`.
    Symmetric,
}

struct BoundAtom<'a> {
    dir: Dir,
    coef: i64,
    rhs: &'a Term,
    strict: bool,
}

/// `(c, under_abs)` when `t` is `c*x` or `c*|x|`.
fn x_side(t: &Term, x: &str) -> Option<(i64, bool)> {
    match t {
        Term::Var(v) if v == x => Some((1, false)),
        Term::Scale(c, inner) => match &**inner {
            Term::Var(v) if v == x => Some((*c, false)),
            Term::Abs(a) if matches!(&**a, Term::Var(v) if v == x) && *c > 0 => Some((*c, true)),
            _ => None,
        },
        Term::Abs(inner) => match &**inner {
            Term::Var(v) if v == x => Some((1, true)),
            Term::Scale(c, a) if matches!(&**a, Term::Var(v) if v == x) => Some((c.abs(), true)),
            _ => None,
        },
        _ => None,
    }
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(fs) => fs.iter().for_each(|g| conjuncts(g, out)),
        other => out.push(other),
    }
}

/// Conjuncts that every value of `x` making the body non-vacuous must satisfy.
fn guard_conjuncts<'a>(universal: bool, body: &'a Formula) -> Vec<&'a Formula> {
    let mut out = Vec::new();
    match (universal, body) {
        (true, Formula::Implies(guard, _)) => conjuncts(guard, &mut out),
        (true, _) => {}
        (false, f) => conjuncts(f, &mut out),
    }
    out
}

fn bound_atoms<'a>(x: &str, guards: &[&'a Formula]) -> Vec<BoundAtom<'a>> {
    let mut out = Vec::new();
    for g in guards {
        let (a, b, strict, eq) = match g {
            Formula::Lt(a, b) => (a, b, true, false),
            Formula::Le(a, b) => (a, b, false, false),
            Formula::Eq(a, b) => (a, b, false, true),
            _ => continue,
        };
        if let (Some((c, abs)), false) = (x_side(a, x), b.mentions(x)) {
            // c*x REL b, or c|x| REL b
            let dir = match (abs, eq, c > 0) {
                (true, _, _) => Dir::Symmetric,
                (false, true, _) => Dir::Exact,
                (false, false, true) => Dir::Upper,
                (false, false, false) => Dir::Lower,
            };
            out.push(BoundAtom { dir, coef: c, rhs: b, strict });
        } else if let (Some((c, abs)), false) = (x_side(b, x), a.mentions(x)) {
            // a REL c*x; a lower bound on |x| gives no interval
            let dir = match (abs, eq, c > 0) {
                (true, true, _) => Dir::Symmetric,
                (true, false, _) => continue,
                (false, true, _) => Dir::Exact,
                (false, false, true) => Dir::Lower,
                (false, false, false) => Dir::Upper,
            };
            out.push(BoundAtom { dir, coef: c, rhs: a, strict });
        }
    }
    out
}

/// Describes, per quantifier, how bounded evaluation chooses its candidates.
pub fn bound_notes(f: &OagFormula) -> Vec<String> {
    fn walk(f: &Formula, out: &mut Vec<String>) {
        match f {
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let universal = matches!(f, Formula::Forall(..));
                let kind = if universal { "forall" } else { "exists" };
                let note = match body.residue_prime(x) {
                    Ok(None) => format!("{kind} {x}: unused, a single candidate decides"),
                    Ok(Some(p)) => format!("{kind} {x}: residue classes modulo {p}G (exhaustive)"),
                    Err(()) => {
                        let atoms = bound_atoms(x, &guard_conjuncts(universal, body));
                        let lower = atoms.iter().any(|a| !matches!(a.dir, Dir::Upper));
                        let upper = atoms.iter().any(|a| !matches!(a.dir, Dir::Lower));
                        if lower && upper {
                            format!(
                                "{kind} {x}: guard interval, exact when its endpoints differ only in a last Z coordinate, box otherwise"
                            )
                        } else {
                            format!("{kind} {x}: box (witnesses are definitive only for {})", if universal { "refutation" } else { "existence" })
                        }
                    }
                };
                out.push(note);
                walk(body, out);
            }
            Formula::Not(a) => walk(a, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| walk(g, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(&f.body, &mut out);
    out
}

struct Ctx {
    comps: Vec<Component>,
    /// Per coordinate, values grouped by absolute value in increasing order.
    levels: std::rc::Rc<Vec<Vec<Vec<Rational64>>>>,
    steps: u64,
    budget: u64,
}

fn level_values(c: Component, radius: u32, denom_bound: u32) -> Vec<Vec<Rational64>> {
    let r = i64::from(radius);
    let mut abs: Vec<Rational64> = match c {
        Component::Q => {
            let mut v: Vec<Rational64> = (1..=i64::from(denom_bound.max(1)))
                .flat_map(|d| (1..=r).map(move |n| Rational64::new(n, d)))
                .collect();
            v.sort();
            v.dedup();
            v
        }
        _ => (1..=r).map(Rational64::from_integer).collect(),
    };
    abs.insert(0, Rational64::zero());
    abs.into_iter()
        .map(|a| if a.is_zero() { vec![a] } else { vec![a, -a] })
        .collect()
}

impl Ctx {
    fn new(comps: Vec<Component>, cfg: &EvalConfig) -> Ctx {
        let levels = comps
            .iter()
            .map(|&c| level_values(c, cfg.radius, cfg.denom_bound))
            .collect();
        Ctx {
            comps,
            levels: std::rc::Rc::new(levels),
            steps: 0,
            budget: cfg.step_budget,
        }
    }

    fn out_of_budget(&self) -> bool {
        self.steps > self.budget
    }

    fn term(&self, t: &Term, env: &[(String, Value)]) -> Value {
        match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, v)| v.clone())
                .expect("validated formulas bind every variable"),
            Term::Zero => vec![Rational64::zero(); self.comps.len()],
            Term::Add(a, b) => {
                let (a, b) = (self.term(a, env), self.term(b, env));
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
            Term::Neg(a) => self.term(a, env).into_iter().map(|x| -x).collect(),
            Term::Scale(c, a) => {
                let c = Rational64::from_integer(*c);
                self.term(a, env).into_iter().map(|x| x * c).collect()
            }
            Term::Abs(a) => {
                let v = self.term(a, env);
                if lex_sign(&v) == Ordering::Less {
                    v.into_iter().map(|x| -x).collect()
                } else {
                    v
                }
            }
        }
    }

    fn in_p_multiple(&self, p: u32, v: &[Rational64]) -> bool {
        let p = Rational64::from_integer(i64::from(p));
        self.comps
            .iter()
            .zip(v)
            .all(|(c, x)| *c == Component::Q || (x / p).is_integer())
    }

    fn is_legal(&self, v: &[Rational64]) -> bool {
        self.comps.iter().zip(v).all(|(c, x)| *c == Component::Q || x.is_integer())
    }

    fn formula(&mut self, f: &Formula, env: &mut Vec<(String, Value)>) -> Res {
        match f {
            Formula::True => Res::exact(true),
            Formula::False => Res::exact(false),
            Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => {
                self.steps += 1;
                let o = lex_cmp(&self.term(a, env), &self.term(b, env));
                Res::exact(match f {
                    Formula::Lt(..) => o == Ordering::Less,
                    Formula::Le(..) => o != Ordering::Greater,
                    _ => o == Ordering::Equal,
                })
            }
            Formula::DivP(p, t) => {
                self.steps += 1;
                let v = self.term(t, env);
                Res::exact(self.in_p_multiple(*p, &v))
            }
            Formula::Not(a) => {
                let mut r = self.formula(a, env);
                r.value = !r.value;
                r
            }
            Formula::And(fs) => self.junction(fs.iter(), false, env),
            Formula::Or(fs) => self.junction(fs.iter(), true, env),
            Formula::Implies(a, b) => {
                let ra = self.formula(a, env);
                if !ra.value && ra.definitive {
                    return Res::exact(true);
                }
                let rb = self.formula(b, env);
                let value = !ra.value || rb.value;
                let definitive = (rb.value && rb.definitive) || (ra.definitive && rb.definitive);
                Res {
                    value,
                    definitive,
                    trail: if ra.value { rb.trail } else { ra.trail },
                }
            }
            Formula::Iff(a, b) => {
                let (ra, rb) = (self.formula(a, env), self.formula(b, env));
                Res {
                    value: ra.value == rb.value,
                    definitive: ra.definitive && rb.definitive,
                    trail: Vec::new(),
                }
            }
            Formula::Forall(x, body) => self.quantifier(true, x, body, env),
            Formula::Exists(x, body) => self.quantifier(false, x, body, env),
        }
    }

    /// Conjunction (`decisive = false`) or disjunction (`decisive = true`).
    fn junction<'f>(
        &mut self,
        fs: impl Iterator<Item = &'f Formula>,
        decisive: bool,
        env: &mut Vec<(String, Value)>,
    ) -> Res {
        let mut all_definitive = true;
        let mut hit: Option<Res> = None;
        for g in fs {
            let r = self.formula(g, env);
            if r.value == decisive {
                if r.definitive {
                    return r;
                }
                hit.get_or_insert(r);
            } else if !r.definitive {
                all_definitive = false;
            }
        }
        match hit {
            Some(r) => r,
            None => Res {
                value: !decisive,
                definitive: all_definitive,
                trail: Vec::new(),
            },
        }
    }

    fn candidates(&mut self, universal: bool, x: &str, body: &Formula, env: &[(String, Value)]) -> Candidates {
        let n = self.comps.len();
        match body.residue_prime(x) {
            Ok(None) => return Candidates::Finite(vec![vec![Rational64::zero(); n]], "unused variable"),
            Ok(Some(p)) => return Candidates::Finite(self.residue_reps(p), "residue classes"),
            Err(()) => {}
        }
        let guards = guard_conjuncts(universal, body);
        let mut lo: Option<(Value, bool)> = None;
        let mut hi: Option<(Value, bool)> = None;
        for b in bound_atoms(x, &guards) {
            let c = Rational64::from_integer(b.coef);
            let u: Value = self.term(b.rhs, env).into_iter().map(|v| v / c).collect();
            match b.dir {
                Dir::Upper => tighten(&mut hi, u, b.strict, Ordering::Less),
                Dir::Lower => tighten(&mut lo, u, b.strict, Ordering::Greater),
                Dir::Exact => {
                    tighten(&mut lo, u.clone(), false, Ordering::Greater);
                    tighten(&mut hi, u, false, Ordering::Less);
                }
                Dir::Symmetric => {
                    let neg = u.iter().map(|v| -v).collect();
                    tighten(&mut lo, neg, b.strict, Ordering::Greater);
                    tighten(&mut hi, u, b.strict, Ordering::Less);
                }
            }
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => match self.interval_solutions(&lo, &hi) {
                Some(v) => Candidates::Finite(v, "guard interval"),
                None => Candidates::Box(self.interval_seeds(&lo.0, &hi.0)),
            },
            _ => Candidates::Box(Vec::new()),
        }
    }

    /// Legal points of an infinite interval that the box may miss: the
    /// endpoints and a point strictly between them at the first coordinate
    /// where they differ.
    fn interval_seeds(&self, lo: &[Rational64], hi: &[Rational64]) -> Vec<Value> {
        let mut out: Vec<Value> = [lo, hi].iter().filter(|v| self.is_legal(v)).map(|v| v.to_vec()).collect();
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] != hi[i]) {
            let mid = if self.comps[i] == Component::Q {
                Some((lo[i] + hi[i]) / Rational64::from_integer(2))
            } else {
                let m = lo[i].floor() + Rational64::from_integer(1);
                (m < hi[i]).then_some(m)
            };
            if let Some(m) = mid {
                let mut v = lo[..i].to_vec();
                v.push(m);
                v.resize(lo.len(), Rational64::zero());
                if self.is_legal(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    fn residue_reps(&self, p: u32) -> Vec<Value> {
        let mut out: Vec<Value> = vec![Vec::new()];
        for c in &self.comps {
            let choices: Vec<i64> = if *c == Component::Q { vec![0] } else { (0..i64::from(p)).collect() };
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&k| {
                        let mut v = prefix.clone();
                        v.push(Rational64::from_integer(k));
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// All legal `x` with `lo <= x <= hi` (strictness per endpoint), or
    /// `None` if there are infinitely many (or too many to list).
    fn interval_solutions(&self, lo: &(Value, bool), hi: &(Value, bool)) -> Option<Vec<Value>> {
        let ((l, ls), (h, hs)) = (lo, hi);
        let n = self.comps.len();
        match lex_cmp(l, h) {
            Ordering::Greater => return Some(Vec::new()),
            Ordering::Equal => {
                return Some(if *ls || *hs || !self.is_legal(l) { Vec::new() } else { vec![l.clone()] });
            }
            Ordering::Less => {}
        }
        let i = (0..n).find(|&i| l[i] != h[i]).expect("distinct endpoints");
        if !self.is_legal(&l[..i]) {
            return Some(Vec::new());
        }
        if self.comps[i] == Component::Q {
            return None;
        }
        let (a, b) = (l[i], h[i]);
        if i + 1 < n {
            // the tail is unconstrained once some integer fits between a and b
            return if a.ceil() <= b.floor() { None } else { Some(Vec::new()) };
        }
        let first = if *ls { a.floor().to_integer() + 1 } else { a.ceil().to_integer() };
        let last = if *hs { b.ceil().to_integer() - 1 } else { b.floor().to_integer() };
        if last - first >= MAX_FINITE_SOLUTIONS {
            return None;
        }
        Some(
            (first..=last)
                .map(|m| {
                    let mut v = l[..i].to_vec();
                    v.push(Rational64::from_integer(m));
                    v
                })
                .collect(),
        )
    }

    fn quantifier(&mut self, universal: bool, x: &str, body: &Formula, env: &mut Vec<(String, Value)>) -> Res {
        let kind = if universal { "forall" } else { "exists" };
        // exists looks for a true instance, forall for a false one
        let decisive = !universal;
        let mut all_definitive = true;
        let mut undecided_hit: Option<(Value, Res)> = None;
        let mut count = 0u64;
        let cands = self.candidates(universal, x, body, env);

        let mut visit = |ctx: &mut Ctx, cand: &[Rational64]| -> Option<Res> {
            count += 1;
            env.push((x.to_string(), cand.to_vec()));
            let r = ctx.formula(body, env);
            env.pop();
            if r.value == decisive {
                if r.definitive {
                    let mut trail = vec![format!("{x} = {}", fmt_value(cand))];
                    trail.extend(r.trail);
                    return Some(Res {
                        value: decisive,
                        definitive: true,
                        trail,
                    });
                }
                if undecided_hit.is_none() {
                    undecided_hit = Some((cand.to_vec(), r));
                }
            } else if !r.definitive {
                all_definitive = false;
            }
            None
        };

        let (exhaustive, source) = match cands {
            Candidates::Finite(cands, source) => {
                for c in &cands {
                    if let Some(r) = visit(self, c) {
                        return r;
                    }
                    if self.out_of_budget() {
                        break;
                    }
                }
                (true, source)
            }
            Candidates::Box(seeds) => {
                for c in &seeds {
                    if let Some(r) = visit(self, c) {
                        return r;
                    }
                }
                let levels = self.levels.clone();
                let mut found = None;
                for_each_in_box(&levels, &mut |c| {
                    if let Some(r) = visit(self, c) {
                        found = Some(r);
                        return false;
                    }
                    !self.out_of_budget()
                });
                if let Some(r) = found {
                    return r;
                }
                (false, "box")
            }
        };

        let stopped = self.out_of_budget();
        if let Some((cand, r)) = undecided_hit {
            let mut trail = vec![format!("{x} = {} (not definitive)", fmt_value(&cand))];
            trail.extend(r.trail);
            return Res {
                value: decisive,
                definitive: false,
                trail,
            };
        }
        let definitive = exhaustive && all_definitive && !stopped;
        let what = if universal { "counterexample" } else { "witness" };
        let mut trail = vec![format!("{kind} {x}: no {what} among {count} candidates ({source})")];
        if stopped {
            trail.push(format!("{kind} {x}: stopped early, step budget reached"));
        }
        Res {
            value: !decisive,
            definitive,
            trail,
        }
    }
}

/// Keeps the tighter of the current bound and `(u, strict)`; `better` is the
/// ordering a tighter bound has relative to a looser one.
fn tighten(slot: &mut Option<(Value, bool)>, u: Value, strict: bool, better: Ordering) {
    match slot {
        None => *slot = Some((u, strict)),
        Some((cur, cur_strict)) => match lex_cmp(&u, cur) {
            Ordering::Equal => *cur_strict |= strict,
            o if o == better => *slot = Some((u, strict)),
            _ => {}
        },
    }
}

/// Visits every box element in shells of increasing distance from zero,
/// stopping as soon as `f` returns false.
fn for_each_in_box(levels: &[Vec<Vec<Rational64>>], f: &mut dyn FnMut(&[Rational64]) -> bool) {
    let max_level = levels.iter().map(|l| l.len() - 1).max().unwrap_or(0);
    let mut cur = Vec::with_capacity(levels.len());
    for k in 0..=max_level {
        if !shell(levels, k, false, &mut cur, f) {
            return;
        }
    }
}

fn shell(
    levels: &[Vec<Vec<Rational64>>],
    k: usize,
    hit: bool,
    cur: &mut Vec<Rational64>,
    f: &mut dyn FnMut(&[Rational64]) -> bool,
) -> bool {
    let i = cur.len();
    if i == levels.len() {
        return !hit || f(cur);
    }
    if !hit && levels[i..].iter().all(|l| l.len() <= k) {
        return true;
    }
    for (lvl, vals) in levels[i].iter().enumerate().take(k + 1) {
        for v in vals {
            cur.push(*v);
            let go = shell(levels, k, hit || lvl == k, cur, f);
            cur.pop();
            if !go {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::oag::Component::{Q, Z};

    fn cfg(radius: u32) -> EvalConfig {
        EvalConfig {
            radius,
            denom_bound: 4,
            step_budget: 5_000_000,
        }
    }

    fn assign(pairs: &[(&str, Element)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn atoms() {
        let g = Spine::finite(&[Z]);
        let t = OagFormula::sentence(Formula::Eq(Term::Zero, Term::Zero)).unwrap();
        assert_eq!(eval_bounded(&t, &g, &cfg(2), &Assignment::new()).unwrap().definite(), Some(true));
        let d = OagFormula::new(&["x"], Formula::DivP(2, Term::var("x"))).unwrap();
        let a = assign(&[("x", Element::from_ints(&g, &[3]).unwrap())]);
        assert_eq!(eval_bounded(&d, &g, &cfg(2), &a).unwrap().definite(), Some(false));
        assert_eq!(
            eval_bounded(&d, &g, &cfg(2), &Assignment::new()),
            Err(FormulaError::Unassigned("x".into()))
        );
    }

    #[test]
    fn box_shells_cover_box_once() {
        let levels = vec![level_values(Z, 2, 1), level_values(Q, 2, 2)];
        let mut seen = Vec::new();
        for_each_in_box(&levels, &mut |v| {
            seen.push(v.to_vec());
            true
        });
        // Z: 5 values, Q: {0, +-1/2, +-1, +-2} = 7 values
        assert_eq!(seen.len(), 35);
        let mut dedup = seen.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 35);
        assert!(seen[0].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn regularity_on_zz_is_refuted() {
        let g = Spine::finite(&[Z, Z]);
        let out = eval_bounded(&p_regularity_sentence(2), &g, &cfg(4), &Assignment::new()).unwrap();
        assert_eq!(out.definite(), Some(false), "{out:?}");
    }

    #[test]
    fn regularity_on_qz_is_not_refuted() {
        let g = Spine::finite(&[Q, Z]);
        let out = eval_bounded(&p_regularity_sentence(2), &g, &cfg(6), &Assignment::new()).unwrap();
        assert!(matches!(out, EvalOutcome::BoundExhausted { in_box_value: true, .. }), "{out:?}");
    }

    #[test]
    fn antiregularity_fails_on_z_and_q() {
        for comps in [[Z], [Q]] {
            let g = Spine::finite(&comps);
            let out = eval_bounded(&p_antiregularity_sentence(2), &g, &cfg(6), &Assignment::new()).unwrap();
            assert_eq!(out.definite(), Some(false), "{comps:?}: {out:?}");
        }
    }

    #[test]
    fn delta_gamma_membership_examples() {
        let g = Spine::finite(&[Z, Z]);
        let f = delta_gamma_membership(2);
        let gamma = Element::from_ints(&g, &[0, 1]).unwrap();
        let run = |d: &[i64]| {
            let a = assign(&[("g", gamma.clone()), ("d", Element::from_ints(&g, d).unwrap())]);
            eval_bounded(&f, &g, &cfg(8), &a).unwrap().definite()
        };
        assert_eq!(run(&[0, 3]), Some(true));
        assert_eq!(run(&[1, 0]), Some(false));
        assert_eq!(run(&[0, 1]), Some(true));
    }

    #[test]
    fn delta0_membership_of_zero() {
        let g = Spine::finite(&[Z, Z]);
        let a = assign(&[("g", Element::zero())]);
        let out = eval_bounded(&delta0_membership(2), &g, &cfg(4), &a).unwrap();
        assert_eq!(out.definite(), Some(true));
    }

    #[test]
    fn abs_expansion_preserves_value() {
        let g = Spine::finite(&[Z, Q]);
        let f = delta0_membership(3);
        let e = f.expand_abs();
        for gamma in [[0, 0], [0, 2], [1, -1], [-2, 0]] {
            let a = assign(&[("g", Element::from_ints(&g, &gamma).unwrap())]);
            let c = EvalConfig {
                radius: 3,
                denom_bound: 2,
                step_budget: 1_000_000,
            };
            let x = eval_bounded(&f, &g, &c, &a).unwrap().in_box_value();
            let y = eval_bounded(&e, &g, &c, &a).unwrap().in_box_value();
            assert_eq!(x, y, "gamma = {gamma:?}");
        }
    }

    #[test]
    fn notes_describe_every_quantifier() {
        let notes = bound_notes(&p_antiregularity_sentence(3));
        assert_eq!(notes.len(), 3);
        assert!(notes[1].contains("residue classes modulo 3G"));
        assert!(notes[2].contains("guard interval"));
    }
}
