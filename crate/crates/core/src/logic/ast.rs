//! Syntax trees for queries and script commands.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u64),
    Add(Box<Term>, Box<Term>),
    /// Natural subtraction, relational: `a - b` names the `u` with `u + b = a`.
    Sub(Box<Term>, Box<Term>),
    Mul(u64, Box<Term>),
    Div(Box<Term>, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    /// `$name(t1, …, tk)`.
    Call(String, Vec<Term>),
    /// `Name[t] = @v` (or `!=` when `negated`).
    Output { name: String, arg: Term, value: u32, negated: bool },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Mul(_, a) | Term::Div(a, _) => a.collect_vars(out),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Const(c) => Term::Const(*c),
            Term::Add(a, b) => Term::Add(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Term::Sub(a, b) => Term::Sub(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Term::Mul(c, a) => Term::Mul(*c, Box::new(a.map_vars(f))),
            Term::Div(a, c) => Term::Div(Box::new(a.map_vars(f)), *c),
        }
    }

    /// Value under an assignment; `None` when a subtraction underflows.
    pub fn eval(&self, env: &impl Fn(&str) -> u64) -> Option<u64> {
        Some(match self {
            Term::Var(v) => env(v),
            Term::Const(c) => *c,
            Term::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Term::Sub(a, b) => a.eval(env)?.checked_sub(b.eval(env)?)?,
            Term::Mul(c, a) => c * a.eval(env)?,
            Term::Div(a, c) => a.eval(env)? / c,
        })
    }
}

impl Formula {
    pub fn negation(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Call(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Output { arg, .. } => arg.collect_vars(out),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                for v in vs {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    /// Names of automata referenced by `$name(…)` or `Name[…]`.
    pub fn referenced_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Call(n, _) | Formula::Output { name: n, .. } => {
                out.insert(n.clone());
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.referenced_names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.referenced_names(out);
                b.referenced_names(out);
            }
            _ => {}
        }
    }
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) | Term::Div(..) => 2,
        _ => 3,
    }
}

fn fmt_term(t: &Term, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = term_prec(t);
    if p < min {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v)?,
        Term::Const(c) => write!(f, "{c}")?,
        Term::Add(a, b) => {
            fmt_term(a, 1, f)?;
            f.write_str("+")?;
            fmt_term(b, 2, f)?;
        }
        Term::Sub(a, b) => {
            fmt_term(a, 1, f)?;
            f.write_str("-")?;
            fmt_term(b, 2, f)?;
        }
        Term::Mul(c, a) => {
            write!(f, "{c}*")?;
            fmt_term(a, 3, f)?;
        }
        Term::Div(a, c) => {
            fmt_term(a, 2, f)?;
            write!(f, "/{c}")?;
        }
    }
    if p < min {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

/// Binding strength used by the printer; mirrors the parser.
fn formula_prec(x: &Formula) -> u8 {
    match x {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn fmt_formula(x: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = formula_prec(x);
    if p < min {
        f.write_str("(")?;
    }
    match x {
        Formula::True => f.write_str("true")?,
        Formula::False => f.write_str("false")?,
        Formula::Cmp(op, a, b) => write!(f, "{a}{}{b}", op.symbol())?,
        Formula::Call(name, args) => {
            write!(f, "${name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Formula::Output { name, arg, value, negated } => {
            write!(f, "{name}[{arg}]{}@{value}", if *negated { "!=" } else { "=" })?
        }
        Formula::Not(g) => {
            f.write_str("~")?;
            fmt_formula(g, 5, f)?;
        }
        Formula::And(a, b) => {
            fmt_formula(a, 4, f)?;
            f.write_str(" & ")?;
            fmt_formula(b, 5, f)?;
        }
        Formula::Or(a, b) => {
            fmt_formula(a, 3, f)?;
            f.write_str(" | ")?;
            fmt_formula(b, 4, f)?;
        }
        Formula::Implies(a, b) => {
            fmt_formula(a, 3, f)?;
            f.write_str(" => ")?;
            fmt_formula(b, 2, f)?;
        }
        Formula::Iff(a, b) => {
            fmt_formula(a, 2, f)?;
            f.write_str(" <=> ")?;
            fmt_formula(b, 2, f)?;
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let q = if matches!(x, Formula::Exists(..)) { "E" } else { "A" };
            write!(f, "{q}{} ", vs.join(","))?;
            fmt_formula(g, 0, f)?;
        }
    }
    if p < min {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

/// One script command, with the line it starts on.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Def { name: String, formula: Formula, line: usize },
    Eval { name: String, formula: Formula, line: usize },
    Reg { name: String, arity: usize, pattern: String, line: usize },
    Combine { name: String, parts: Vec<(String, u32)>, line: usize },
}

impl Command {
    pub fn name(&self) -> &str {
        match self {
            Command::Def { name, .. }
            | Command::Eval { name, .. }
            | Command::Reg { name, .. }
            | Command::Combine { name, .. } => name,
        }
    }

    pub fn line(&self) -> usize {
        match self {
            Command::Def { line, .. }
            | Command::Eval { line, .. }
            | Command::Reg { line, .. }
            | Command::Combine { line, .. } => *line,
        }
    }
}
