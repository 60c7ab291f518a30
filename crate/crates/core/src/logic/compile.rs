//! Compilation of formulas to automata.
//!
//! Terms are flattened into fresh existential variables (named with a `#`
//! prefix so they cannot clash with user variables) constrained by the
//! addition, multiplication, division and constant automata. Atoms are
//! compiled once per shape: variables are replaced by placeholders, the
//! result is cached, and each use re-binds the tracks by name.
//!
//! Quantifiers are mini-scoped: `E` over a conjunction only touches the
//! conjuncts that mention the bound variables, combines them greedily, and
//! projects each variable as soon as no remaining conjunct needs it. `A`
//! is `~E~`, with the inner negation pushed through `=>`, `|` and `~`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rustc_hash::FxHashMap;

use super::ast::{CmpOp, Formula, Term};
use crate::arith;
use crate::automata::{Automaton, Kind, Rel};
use crate::error::{Error, Result};

/// Named automata visible to formulas: `$name(…)` for DFAs, `Name[…]` for
/// DFAOs.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, Automaton>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Automaton> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn insert(&mut self, name: &str, a: Automaton) -> Option<Automaton> {
        self.entries.insert(name.to_string(), a)
    }

    pub fn remove(&mut self, name: &str) -> Option<Automaton> {
        self.entries.remove(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Automaton)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Automata for the primitive relations, built on first use.
#[derive(Default)]
struct Primitives {
    add: Option<Automaton>,
    eq: Option<Automaton>,
    lt: Option<Automaton>,
    leq: Option<Automaton>,
    constants: FxHashMap<u64, Automaton>,
    mul: FxHashMap<u64, Automaton>,
    div: FxHashMap<u64, Automaton>,
}

/// Compiles formulas against a catalog.
pub struct Engine {
    catalog: Catalog,
    prims: Mutex<Primitives>,
    atoms: Mutex<FxHashMap<String, Rel>>,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new(Catalog::new())
    }
}

/// Placeholder for the `i`-th distinct variable of an atom.
fn placeholder(i: usize) -> String {
    format!("'{i:03}")
}

struct Flattener<'e> {
    engine: &'e Engine,
    fresh: usize,
    parts: Vec<Rel>,
}

impl Flattener<'_> {
    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("#{:03}", self.fresh)
    }

    fn push(&mut self, a: &Automaton, args: &[&str]) -> Result<()> {
        self.parts.push(Rel::from_atom(a, args)?);
        Ok(())
    }

    /// A variable carrying the value of `t`.
    fn var_of(&mut self, t: &Term) -> Result<String> {
        match t {
            Term::Var(v) => Ok(v.clone()),
            _ => {
                let u = self.fresh();
                self.assign(t, &u)?;
                Ok(u)
            }
        }
    }

    /// Constrain `target = t`.
    fn assign(&mut self, t: &Term, target: &str) -> Result<()> {
        let e = self.engine;
        match t {
            Term::Var(v) => self.push(&e.prim_eq(), &[target, v]),
            Term::Const(c) => self.push(&e.prim_const(*c), &[target]),
            Term::Add(a, b) => {
                let (ua, ub) = (self.var_of(a)?, self.var_of(b)?);
                self.push(&e.prim_add(), &[&ua, &ub, target])
            }
            Term::Sub(a, b) => {
                let (ua, ub) = (self.var_of(a)?, self.var_of(b)?);
                self.push(&e.prim_add(), &[target, &ub, &ua])
            }
            Term::Mul(c, a) => {
                let ua = self.var_of(a)?;
                self.push(&e.prim_mul(*c)?, &[&ua, target])
            }
            Term::Div(a, c) => {
                let ua = self.var_of(a)?;
                self.push(&e.prim_div(*c)?, &[&ua, target])
            }
        }
    }

    fn finish(self) -> Result<Rel> {
        let fresh: Vec<String> = self
            .parts
            .iter()
            .flat_map(|r| r.vars().iter().filter(|v| v.starts_with('#')).cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        conjoin_and_project(self.parts, &fresh)
    }
}

/// Conjunction of `parts`, existentially closing `bound`, combining greedily
/// so each bound variable is projected as soon as possible.
fn conjoin_and_project(mut parts: Vec<Rel>, bound: &[String]) -> Result<Rel> {
    let mut bound: Vec<String> = bound.to_vec();
    // conjuncts free of bound variables stay outside the projections
    let (inner, outer): (Vec<Rel>, Vec<Rel>) =
        parts.drain(..).partition(|r| r.vars().iter().any(|v| bound.contains(v)));
    bound.retain(|v| inner.iter().any(|r| r.vars().contains(v)));

    let mut acc: Option<Rel> = None;
    let mut rest = inner;
    while !rest.is_empty() {
        let pick = match &acc {
            None => (0..rest.len()).min_by_key(|&i| rest[i].vars().len()).unwrap(),
            Some(a) => {
                let score = |i: usize| {
                    let r = &rest[i];
                    // variables this conjunct lets us project right away
                    let closes = bound
                        .iter()
                        .filter(|v| {
                            (a.vars().contains(v) || r.vars().contains(v))
                                && rest.iter().enumerate().all(|(j, o)| j == i || !o.vars().contains(v))
                        })
                        .count();
                    let new = r.vars().iter().filter(|v| !a.vars().contains(v)).count();
                    let shared = r.vars().iter().filter(|v| a.vars().contains(v)).count();
                    (closes as isize * 4 + shared as isize * 2 - new as isize * 3, usize::MAX - i)
                };
                (0..rest.len()).max_by_key(|&i| score(i)).unwrap()
            }
        };
        let r = rest.swap_remove(pick);
        let mut cur = match acc.take() {
            None => r,
            Some(a) => a.and(&r)?,
        };
        let done: Vec<String> = bound
            .iter()
            .filter(|v| cur.vars().contains(v) && !rest.iter().any(|o| o.vars().contains(v)))
            .cloned()
            .collect();
        for v in &done {
            cur = cur.exists(v)?;
        }
        bound.retain(|v| !done.contains(v));
        acc = Some(cur);
    }
    let mut result = match acc {
        Some(a) => a,
        None => Rel::constant(true),
    };
    for r in outer {
        result = result.and(&r)?;
    }
    Ok(result)
}

/// Flatten nested `&` into a list.
fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Negation pushed one level where it yields a conjunction or quantifier.
fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => (**g).clone(),
        Formula::Implies(a, b) => Formula::and((**a).clone(), negate(b)),
        Formula::Or(a, b) => Formula::and(negate(a), negate(b)),
        Formula::Forall(vs, g) => Formula::Exists(vs.clone(), Box::new(negate(g))),
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Cmp(CmpOp::Eq, a, b) => Formula::Cmp(CmpOp::Ne, a.clone(), b.clone()),
        Formula::Cmp(CmpOp::Ne, a, b) => Formula::Cmp(CmpOp::Eq, a.clone(), b.clone()),
        other => Formula::negation(other.clone()),
    }
}

impl Engine {
    pub fn new(catalog: Catalog) -> Self {
        Self { catalog, prims: Mutex::new(Primitives::default()), atoms: Mutex::new(FxHashMap::default()) }
    }

    /// Independent engine over a copy of the catalog.
    pub fn fork(&self) -> Engine {
        Engine::new(self.catalog.clone())
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Replace or add a catalog entry; cached atoms using it are dropped.
    pub fn set(&mut self, name: &str, a: Automaton) {
        if self.catalog.insert(name, a).is_some() {
            self.atoms.get_mut().unwrap().clear();
        }
    }

    pub fn remove(&mut self, name: &str) -> Option<Automaton> {
        let old = self.catalog.remove(name);
        if old.is_some() {
            self.atoms.get_mut().unwrap().clear();
        }
        old
    }

    fn prim_add(&self) -> Automaton {
        let mut p = self.prims.lock().unwrap();
        p.add.get_or_insert_with(arith::add).clone()
    }

    fn prim_eq(&self) -> Automaton {
        let mut p = self.prims.lock().unwrap();
        p.eq.get_or_insert_with(arith::eq).clone()
    }

    fn prim_lt(&self) -> Automaton {
        let mut p = self.prims.lock().unwrap();
        p.lt.get_or_insert_with(arith::lt).clone()
    }

    fn prim_leq(&self) -> Automaton {
        let mut p = self.prims.lock().unwrap();
        p.leq.get_or_insert_with(arith::leq).clone()
    }

    fn prim_const(&self, c: u64) -> Automaton {
        let mut p = self.prims.lock().unwrap();
        p.constants.entry(c).or_insert_with(|| arith::constant(c)).clone()
    }

    fn prim_mul(&self, c: u64) -> Result<Automaton> {
        if let Some(a) = self.prims.lock().unwrap().mul.get(&c) {
            return Ok(a.clone());
        }
        let a = arith::const_mul(c)?;
        self.prims.lock().unwrap().mul.insert(c, a.clone());
        Ok(a)
    }

    fn prim_div(&self, c: u64) -> Result<Automaton> {
        if let Some(a) = self.prims.lock().unwrap().div.get(&c) {
            return Ok(a.clone());
        }
        let a = arith::const_div(c)?;
        self.prims.lock().unwrap().div.insert(c, a.clone());
        Ok(a)
    }

    fn lookup(&self, name: &str) -> Result<&Automaton> {
        self.catalog.get(name).ok_or_else(|| Error::UnknownAutomaton(name.to_string()))
    }

    /// Compile to a relation over the formula's free variables (sorted).
    pub fn compile(&self, f: &Formula) -> Result<Rel> {
        self.check_names(f)?;
        self.compile_inner(f)
    }

    fn check_names(&self, f: &Formula) -> Result<()> {
        let mut names = BTreeSet::new();
        f.referenced_names(&mut names);
        for n in names {
            self.lookup(&n)?;
        }
        Ok(())
    }

    fn compile_inner(&self, f: &Formula) -> Result<Rel> {
        match f {
            Formula::True => Ok(Rel::constant(true)),
            Formula::False => Ok(Rel::constant(false)),
            Formula::Cmp(..) | Formula::Call(..) | Formula::Output { .. } => self.atom(f),
            Formula::Not(g) => Ok(self.compile_inner(g)?.not()),
            Formula::And(..) => {
                let mut cs = Vec::new();
                conjuncts(f, &mut cs);
                let rels = cs.iter().map(|c| self.compile_inner(c)).collect::<Result<Vec<_>>>()?;
                conjoin_and_project(rels, &[])
            }
            Formula::Or(a, b) => self.compile_inner(a)?.or(&self.compile_inner(b)?),
            Formula::Implies(a, b) => self.compile_inner(a)?.not().or(&self.compile_inner(b)?),
            Formula::Iff(a, b) => {
                let (x, y) = (self.compile_inner(a)?, self.compile_inner(b)?);
                x.and(&y)?.or(&x.not().and(&y.not())?)
            }
            Formula::Exists(vs, g) => self.exists(vs, g),
            Formula::Forall(vs, g) => Ok(self.exists(vs, &negate(g))?.not()),
        }
    }

    fn exists(&self, vs: &[String], body: &Formula) -> Result<Rel> {
        let mut cs = Vec::new();
        conjuncts(body, &mut cs);
        let rels = cs.iter().map(|c| self.compile_inner(c)).collect::<Result<Vec<_>>>()?;
        let bound: Vec<String> = vs.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        conjoin_and_project(rels, &bound)
    }

    /// Atoms are compiled over placeholders and cached by shape.
    fn atom(&self, f: &Formula) -> Result<Rel> {
        let mut order: Vec<String> = Vec::new();
        let mut rename = |v: &str| {
            let i = match order.iter().position(|o| o == v) {
                Some(i) => i,
                None => {
                    order.push(v.to_string());
                    order.len() - 1
                }
            };
            placeholder(i)
        };
        let shape = match f {
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, a.map_vars(&mut rename), b.map_vars(&mut rename)),
            Formula::Call(n, args) => {
                Formula::Call(n.clone(), args.iter().map(|t| t.map_vars(&mut rename)).collect())
            }
            Formula::Output { name, arg, value, negated } => Formula::Output {
                name: name.clone(),
                arg: arg.map_vars(&mut rename),
                value: *value,
                negated: *negated,
            },
            _ => unreachable!("not an atom"),
        };
        let key = format!("{shape:?}");
        let cached = self.atoms.lock().unwrap().get(&key).cloned();
        let rel = match cached {
            Some(r) => r,
            None => {
                let r = self.compile_atom(&shape)?;
                self.atoms.lock().unwrap().insert(key, r.clone());
                r
            }
        };
        // placeholders sort in first-appearance order, so the tracks of
        // `rel` line up with `order`
        let names: Vec<&str> = rel
            .vars()
            .iter()
            .map(|p| {
                let i: usize = p[1..].parse().expect("placeholder");
                order[i].as_str()
            })
            .collect();
        Rel::from_atom(rel.dfa(), &names)
    }

    fn compile_atom(&self, f: &Formula) -> Result<Rel> {
        let mut fl = Flattener { engine: self, fresh: 0, parts: Vec::new() };
        match f {
            Formula::Cmp(op, a, b) => match op {
                CmpOp::Eq | CmpOp::Ne => {
                    match (a, b) {
                        (Term::Var(x), t) | (t, Term::Var(x)) => fl.assign(t, x)?,
                        _ => {
                            let u = fl.var_of(a)?;
                            fl.assign(b, &u)?;
                        }
                    }
                    let r = fl.finish()?;
                    return Ok(if *op == CmpOp::Ne { r.not() } else { r });
                }
                _ => {
                    let (x, y) = (fl.var_of(a)?, fl.var_of(b)?);
                    match op {
                        CmpOp::Lt => fl.push(&self.prim_lt(), &[&x, &y])?,
                        CmpOp::Le => fl.push(&self.prim_leq(), &[&x, &y])?,
                        CmpOp::Gt => fl.push(&self.prim_lt(), &[&y, &x])?,
                        CmpOp::Ge => fl.push(&self.prim_leq(), &[&y, &x])?,
                        _ => unreachable!(),
                    }
                }
            },
            Formula::Call(name, args) => {
                let a = self.lookup(name)?;
                if a.kind() != Kind::Dfa {
                    return Err(Error::WrongKind { expected: "DFA", found: a.kind().name() });
                }
                if a.arity() != args.len() {
                    return Err(Error::CallArity { name: name.clone(), expected: a.arity(), found: args.len() });
                }
                let vars = args.iter().map(|t| fl.var_of(t)).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                fl.push(a, &refs)?;
            }
            Formula::Output { name, arg, value, negated } => {
                let a = self.lookup(name)?;
                if a.arity() != 1 {
                    return Err(Error::CallArity { name: name.clone(), expected: a.arity(), found: 1 });
                }
                let want = *value;
                let test = if *negated {
                    a.output_filter(|o| o != want)
                } else {
                    a.output_filter(|o| o == want)
                };
                let x = fl.var_of(arg)?;
                fl.push(&test.minimize(), &[&x])?;
            }
            _ => unreachable!("not an atom"),
        }
        fl.finish()
    }

    /// Truth value of a closed formula.
    pub fn eval(&self, f: &Formula) -> Result<bool> {
        let free = f.free_vars();
        if !free.is_empty() {
            return Err(Error::FreeVariables(free.into_iter().collect::<Vec<_>>().join(", ")));
        }
        Ok(self.compile(f)?.truth().expect("closed formula"))
    }

    /// Automaton for `f` over its sorted free variables, restricted to
    /// valid tracks.
    pub fn relation(&self, f: &Formula) -> Result<Rel> {
        Ok(self.compile(f)?.restrict_valid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn engine() -> Engine {
        Engine::default()
    }

    fn rel(e: &Engine, s: &str) -> Rel {
        e.relation(&parse_formula(s).unwrap()).unwrap()
    }

    fn truth(e: &Engine, s: &str) -> bool {
        e.eval(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn even_numbers() {
        let e = engine();
        let r = rel(&e, "Ek n=2*k");
        assert_eq!(r.vars(), ["n"]);
        for n in 0..500 {
            assert_eq!(r.dfa().accepts_values(&[n]), n % 2 == 0);
        }
    }

    #[test]
    fn x_equals_x_is_valid() {
        let e = engine();
        assert!(rel(&e, "x=x").dfa().equivalent(&arith::valid()).unwrap());
    }

    #[test]
    fn closed_formulas() {
        let e = engine();
        assert!(!truth(&e, "Ex x=x+1"));
        assert!(truth(&e, "Ax x=x"));
        assert!(truth(&e, "Ax,y x<y | x=y | y<x"));
        assert!(truth(&e, "Ax Ey y=x+1"));
        assert!(!truth(&e, "Ax Ey x=y+1"));
        assert!(truth(&e, "An (n>0) => Em m+1=n"));
        assert!(truth(&e, "Ax,y (x<y) => (Ez z>0 & x+z=y)"));
        assert!(truth(&e, "Ax (x+x)/2=x"));
        assert!(truth(&e, "Ax,y,z (x<y & y<z) => x<z"));
    }

    #[test]
    fn subtraction_is_relational() {
        let e = engine();
        let r = rel(&e, "z=x-y");
        assert_eq!(r.vars(), ["x", "y", "z"]);
        for x in 0..40 {
            for y in 0..40 {
                for z in 0..40 {
                    assert_eq!(r.dfa().accepts_values(&[x, y, z]), x >= y && z == x - y);
                }
            }
        }
        assert!(!truth(&e, "Ex,y x<y & x-y=0"));
    }

    #[test]
    fn track_order_is_sorted_names() {
        let e = engine();
        let r = rel(&e, "y=2*b");
        assert_eq!(r.vars(), ["b", "y"]);
        assert!(r.dfa().accepts_values(&[3, 6]));
        assert!(!r.dfa().accepts_values(&[6, 3]));
    }

    #[test]
    fn exists_equals_not_forall_not() {
        let e = engine();
        let a = rel(&e, "Ek n=3*k+1");
        let b = rel(&e, "~Ak ~(n=3*k+1)");
        assert!(a.dfa().equivalent(b.dfa()).unwrap());
    }

    #[test]
    fn unknown_names_and_free_variables() {
        let e = engine();
        let err = e.eval(&parse_formula("$nope(x)").unwrap()).unwrap_err();
        assert!(matches!(err, Error::FreeVariables(_)));
        let err = e.compile(&parse_formula("Ax $nope(x)").unwrap()).unwrap_err();
        assert_eq!(err, Error::UnknownAutomaton("nope".into()));
    }

    #[test]
    fn calls_bind_by_position() {
        let mut e = engine();
        let lt = rel(&e, "a<b").into_dfa();
        e.set("less", lt);
        assert!(truth(&e, "Ax,y $less(x,y) <=> x<y"));
        assert!(truth(&e, "Ax ~$less(x,x)"));
        assert!(truth(&e, "Ax $less(x,x+1)"));
        let err = e.compile(&parse_formula("$less(x)").unwrap()).unwrap_err();
        assert!(matches!(err, Error::CallArity { expected: 2, found: 1, .. }));
    }

    #[test]
    fn output_tests() {
        let mut e = engine();
        e.set("F", arith::fibword());
        let r = rel(&e, "F[n]=@1");
        let word = arith::fibonacci_word_prefix(300);
        for (n, &b) in word.iter().enumerate() {
            assert_eq!(r.dfa().accepts_values(&[n as u64]), b == 1);
        }
        assert!(truth(&e, "An F[n]=@1 => F[n+1]=@0"));
    }
}
