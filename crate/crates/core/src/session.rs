//! A session: the catalog of named automata, the on-disk store, and the
//! command runner shared by scripts and the REPL.
//!
//! Builtins are built on first reference. Synthesized builtins are
//! certified before they enter the catalog; every builtin is also checked
//! against its oracle on a finite prefix. Built automata are cached in the
//! store as `.aut` files and trusted on later loads unless `rebuild` is set.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::arith;
use crate::automata::{combine, deserialize, regex_compile, serialize, Automaton, Kind};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, parse_script, Command, Engine, Formula};
use crate::numeration::floor_phi_u64;
use crate::seqs;
use crate::synth::{self, Certificate, SynthesisReport, DEFAULT_SCHEDULE};

/// Names a session can build on demand, besides `mod2` … `mod9`.
pub const BUILTINS: &[&str] = &[
    "phin", "phi2n", "F", "fibword", "a007067", "a007064", "a035487", "a004937", "a003623", "a105774", "a21",
    "nestedb", "lucasvar", "p0", "p1", "p2", "a368200", "aprime",
];

/// Prefix length for oracle checks of builtins.
pub const ORACLE_CHECK: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct Settings {
    pub schedule: Vec<usize>,
    /// Ignore cached builtins and build them again.
    pub rebuild: bool,
    /// Print progress lines for builtin construction to stderr.
    pub verbose: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self { schedule: DEFAULT_SCHEDULE.to_vec(), rebuild: false, verbose: false }
    }
}

/// Result of one executed command.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub line: usize,
    pub command: &'static str,
    pub name: String,
    /// Truth value of an `eval` or of a closed `def`.
    pub truth: Option<bool>,
    pub arity: usize,
    pub states: usize,
    pub millis: u128,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.truth != Some(false)
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.truth {
            Some(t) => write!(f, "{} {}: {}", self.command, self.name, if t { "TRUE" } else { "FALSE" })?,
            None => write!(f, "{} {}: arity {}, {} states", self.command, self.name, self.arity, self.states)?,
        }
        write!(f, " ({} ms)", self.millis)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScriptReport {
    pub outcomes: Vec<Outcome>,
}

impl ScriptReport {
    pub fn all_true(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

/// What the REPL should do after a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplAction {
    Continue(String),
    Quit,
}

pub struct Session {
    engine: Engine,
    store: Option<PathBuf>,
    settings: Settings,
    reports: Vec<SynthesisReport>,
    building: BTreeSet<String>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new(Settings::default())
    }
}

fn is_mod_name(name: &str) -> Option<u64> {
    let k: u64 = name.strip_prefix("mod")?.parse().ok()?;
    (2..=9).contains(&k).then_some(k)
}

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name) || is_mod_name(name).is_some()
}

fn script_error(line: usize, e: Error) -> Error {
    match e {
        Error::Syntax { .. } | Error::Script { .. } => e,
        other => Error::Script { line, message: other.to_string() },
    }
}

impl Session {
    /// A session without a store.
    pub fn new(settings: Settings) -> Self {
        let mut engine = Engine::default();
        engine.set("valid", arith::valid());
        engine.set("eq", arith::eq());
        engine.set("lt", arith::lt());
        engine.set("leq", arith::leq());
        engine.set("add", arith::add());
        Self { engine, store: None, settings, reports: Vec::new(), building: BTreeSet::new() }
    }

    /// A session caching builtins in `dir`, which is created if missing.
    pub fn with_store(dir: impl AsRef<Path>, settings: Settings) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        let mut s = Self::new(settings);
        s.store = Some(dir.as_ref().to_path_buf());
        Ok(s)
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn store(&self) -> Option<&Path> {
        self.store.as_deref()
    }

    /// Synthesis reports of builtins built in this session.
    pub fn reports(&self) -> &[SynthesisReport] {
        &self.reports
    }

    pub fn names(&self) -> Vec<String> {
        self.engine.catalog().names().map(String::from).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.engine.catalog().contains(name)
    }

    /// The automaton named `name`, building a builtin if needed.
    pub fn get(&mut self, name: &str) -> Result<Automaton> {
        self.ensure(name)?;
        self.engine.catalog().get(name).cloned().ok_or_else(|| Error::UnknownAutomaton(name.to_string()))
    }

    /// Make `name` available if it is a builtin; unknown names are left
    /// for the compiler to report.
    pub fn ensure(&mut self, name: &str) -> Result<()> {
        if self.contains(name) || !is_builtin(name) {
            return Ok(());
        }
        if !self.building.insert(name.to_string()) {
            return Err(Error::InvalidArgument(format!("builtin `{name}` depends on itself")));
        }
        let result = self.load_or_build(name);
        self.building.remove(name);
        let a = result?;
        self.engine.set(name, a);
        Ok(())
    }

    fn ensure_referenced(&mut self, f: &Formula) -> Result<()> {
        let mut names = BTreeSet::new();
        f.referenced_names(&mut names);
        for n in names {
            self.ensure(&n)?;
        }
        Ok(())
    }

    fn store_path(&self, name: &str) -> Option<PathBuf> {
        self.store.as_ref().map(|d| d.join(format!("{name}.aut")))
    }

    fn load_or_build(&mut self, name: &str) -> Result<Automaton> {
        if let Some(path) = self.store_path(name) {
            if !self.settings.rebuild && path.exists() {
                let text = fs::read_to_string(&path)?;
                return deserialize(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())));
            }
        }
        let start = Instant::now();
        let a = self.build(name)?;
        if self.settings.verbose {
            eprintln!("built {name}: {} states ({} ms)", a.live_state_count(), start.elapsed().as_millis());
        }
        if let Some(path) = self.store_path(name) {
            fs::write(&path, serialize(&a))?;
        }
        Ok(a)
    }

    fn formula_relation(&mut self, text: &str) -> Result<Automaton> {
        let f = parse_formula(text)?;
        self.ensure_referenced(&f)?;
        Ok(self.engine.relation(&f)?.into_dfa())
    }

    fn synthesize(&mut self, name: &str, oracle: &dyn Fn(usize) -> Vec<i128>, cert: Certificate) -> Result<Automaton> {
        let report = synth::synthesize_certified(&self.engine, name, oracle, cert, &self.settings.schedule)?;
        if let Some(path) = self.store.as_ref().map(|d| d.join(format!("{name}.json"))) {
            fs::write(path, report.to_json())?;
        }
        let a = report.automaton.clone();
        let outcome = report.attempts.last().map(|a| a.outcome.clone()).unwrap_or_default();
        self.reports.push(report);
        a.ok_or_else(|| Error::Synthesis(format!("`{name}` not certified within the schedule: {outcome}")))
    }

    fn build(&mut self, name: &str) -> Result<Automaton> {
        if let Some(k) = is_mod_name(name) {
            return self.build_mod(k);
        }
        let a = match name {
            "phin" => {
                let a = self.synthesize(name, &table("beatty_b"), Certificate::Wythoff)?;
                check_function(name, &a, 1 << 20, floor_phi_u64)?;
                return Ok(a);
            }
            "phi2n" => self.formula_relation("Ex $phin(n,x) & z=x+n")?,
            "F" | "fibword" => arith::fibword(),
            "a007067" => self.formula_relation("Ex $phin(2*n,x) & z=(x+1)/2")?,
            "a007064" => self.formula_relation("Ex $phin(2*n+1,x) & z=n+1+x/2")?,
            "a004937" => self.formula_relation("Ex $phi2n(2*n,x) & z=(x+1)/2")?,
            "a003623" => self.formula_relation("Ex $phi2n(n,x) & $phin(x,z)")?,
            "a035487" => {
                let a = self.formula_relation("Ex (Em $a007064(m,x)) & $a007067(x,n)")?;
                let limit = 10_000u64;
                let mut members = vec![false; limit as usize];
                let lower = seqs::table("a007067", limit as usize).unwrap();
                for x in (0..limit).map(seqs::a007064).take_while(|&x| x < limit) {
                    if let Some(&v) = lower.get(x as usize) {
                        if v < limit as i128 {
                            members[v as usize] = true;
                        }
                    }
                }
                if let Some(n) = (0..limit).find(|&n| a.accepts_values(&[n]) != members[n as usize]) {
                    return Err(Error::Certification(format!("a035487 disagrees with its oracle at {n}")));
                }
                return Ok(a);
            }
            "a105774" => self.synthesize(name, &table("a105774"), Certificate::Fibonacci { x: 1, y: 1 })?,
            "a21" => self.synthesize(name, &table("a21"), Certificate::Fibonacci { x: 2, y: 1 })?,
            "nestedb" => self.synthesize(name, &table("nested_b"), Certificate::Nested)?,
            "lucasvar" => self.synthesize(name, &table("lucas_variant"), Certificate::Lucas)?,
            "p0" | "p1" | "p2" | "a368200" | "aprime" => {
                let oracle = match name {
                    "a368200" => "sorted_a",
                    "aprime" => "distinct",
                    other => other,
                };
                let a = self.synthesize(name, &table(oracle), Certificate::Function)?;
                let values = seqs::table(oracle, 10_000).unwrap();
                check_function(name, &a, 10_000, |n| values[n as usize] as u64)?;
                return Ok(a);
            }
            other => return Err(Error::UnknownAutomaton(other.to_string())),
        };
        match name {
            "F" | "fibword" => {
                let w = arith::fibonacci_word_prefix(ORACLE_CHECK as usize);
                if let Some(n) = (0..ORACLE_CHECK).find(|&n| a.value(n) != w[n as usize] as u32) {
                    return Err(Error::Certification(format!("{name} disagrees with the Fibonacci word at {n}")));
                }
            }
            _ => {
                if !synth::certify_function(&self.engine, &a)? {
                    return Err(Error::Certification(format!("`{name}` is not a function")));
                }
                let values = match name {
                    "phi2n" => (0..ORACLE_CHECK).map(|n| (floor_phi_u64(n) + n) as i128).collect(),
                    "nestedb" => seqs::table("nested_b", ORACLE_CHECK as usize).unwrap(),
                    "lucasvar" => seqs::table("lucas_variant", ORACLE_CHECK as usize).unwrap(),
                    other => seqs::table(other, ORACLE_CHECK as usize).expect("builtin has an oracle"),
                };
                check_function(name, &a, ORACLE_CHECK, |n| values[n as usize] as u64)?;
            }
        }
        Ok(a)
    }

    /// Minimal DFAO for `n mod k`, learned and then proved residue by residue.
    fn build_mod(&mut self, k: u64) -> Result<Automaton> {
        let name = format!("mod{k}");
        let bound = *self.settings.schedule.last().unwrap_or(&(1 << 16));
        let values: Vec<i128> = (0..bound as u64).map(|n| (n % k) as i128).collect();
        let a = synth::guess_dfao(&values)?;
        let mut e = self.engine.fork();
        e.set(&name, a.clone());
        for r in 0..k {
            let q = parse_formula(&format!("An {name}[n]=@{r} <=> Eq n={k}*q+{r}"))?;
            if !e.eval(&q)? {
                return Err(Error::Certification(format!("`{name}` misclassifies residue {r}")));
            }
        }
        Ok(a)
    }

    /// Store `a` under `name`. An existing or builtin name may only be
    /// redefined by an equivalent automaton unless `force` is set.
    pub fn insert(&mut self, name: &str, a: Automaton, force: bool) -> Result<()> {
        if !force {
            self.ensure(name)?;
            if let Some(old) = self.engine.catalog().get(name) {
                let same = old.arity() == a.arity() && old.kind() == a.kind() && old.equivalent(&a)?;
                if !same {
                    return Err(Error::Redefinition(name.to_string()));
                }
                return Ok(());
            }
        }
        self.engine.set(name, a);
        Ok(())
    }

    /// Compile `text` and store it under `name`.
    pub fn define(&mut self, name: &str, text: &str) -> Result<Automaton> {
        let a = self.formula_relation(text)?;
        self.insert(name, a.clone(), false)?;
        Ok(a)
    }

    /// Truth value of a closed formula.
    pub fn eval(&mut self, text: &str) -> Result<bool> {
        let f = parse_formula(text)?;
        self.eval_formula(&f)
    }

    pub fn eval_formula(&mut self, f: &Formula) -> Result<bool> {
        self.ensure_referenced(f)?;
        self.engine.eval(f)
    }

    pub fn execute(&mut self, cmd: &Command) -> Result<Outcome> {
        let start = Instant::now();
        let (command, truth, a) = match cmd {
            Command::Def { name, formula, .. } => {
                self.ensure_referenced(formula)?;
                let a = self.engine.relation(formula)?.into_dfa();
                self.insert(name, a.clone(), false)?;
                let truth = (a.arity() == 0).then(|| a.accepts(&[]));
                ("def", truth, Some(a))
            }
            Command::Eval { formula, .. } => ("eval", Some(self.eval_formula(formula)?), None),
            Command::Reg { name, arity, pattern, .. } => {
                let a = regex_compile(pattern, *arity)?.intersect(&valid_tracks(*arity)?)?.minimize();
                self.insert(name, a.clone(), false)?;
                ("reg", None, Some(a))
            }
            Command::Combine { name, parts, .. } => {
                let mut inputs = Vec::new();
                for (part, v) in parts {
                    let p = self.get(part)?;
                    inputs.push((p, *v));
                }
                let a = combine(&inputs)?.minimize();
                self.insert(name, a.clone(), false)?;
                ("combine", None, Some(a))
            }
        };
        Ok(Outcome {
            line: cmd.line(),
            command,
            name: cmd.name().to_string(),
            truth,
            arity: a.as_ref().map_or(0, Automaton::arity),
            states: a.as_ref().map_or(0, Automaton::live_state_count),
            millis: start.elapsed().as_millis(),
        })
    }

    /// Run a script, calling `progress` after each command. Errors carry the
    /// script line.
    pub fn run_script_with(&mut self, src: &str, mut progress: impl FnMut(&Outcome)) -> Result<ScriptReport> {
        let cmds = parse_script(src)?;
        let mut report = ScriptReport::default();
        for cmd in &cmds {
            let o = self.execute(cmd).map_err(|e| script_error(cmd.line(), e))?;
            progress(&o);
            report.outcomes.push(o);
        }
        Ok(report)
    }

    pub fn run_script(&mut self, src: &str) -> Result<ScriptReport> {
        self.run_script_with(src, |_| {})
    }

    /// One REPL line: a command, or `:quit`, `:list`, `:show NAME`,
    /// `:dot NAME FILE`.
    pub fn repl_line(&mut self, line: &str) -> Result<ReplAction> {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(':') {
            let words: Vec<&str> = rest.split_whitespace().collect();
            return match words.as_slice() {
                ["quit"] | ["q"] => Ok(ReplAction::Quit),
                ["list"] => Ok(ReplAction::Continue(self.names().join("\n"))),
                ["show", name] => Ok(ReplAction::Continue(serialize(&self.get(name)?))),
                ["dot", name, file] => {
                    let a = self.get(name)?;
                    fs::write(file, crate::automata::export_dot(&a))?;
                    Ok(ReplAction::Continue(format!("wrote {file}")))
                }
                _ => Err(Error::InvalidArgument(format!("unknown REPL command `:{rest}`"))),
            };
        }
        if line.is_empty() || line.starts_with('#') {
            return Ok(ReplAction::Continue(String::new()));
        }
        let report = self.run_script(line)?;
        Ok(ReplAction::Continue(report.outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("\n")))
    }
}

fn table(oracle: &str) -> impl Fn(usize) -> Vec<i128> + '_ {
    move |n| seqs::table(oracle, n).expect("known oracle")
}

/// Automaton requiring every track to be a valid representation.
fn valid_tracks(arity: usize) -> Result<Automaton> {
    let v = arith::valid();
    let mut acc = Automaton::universal(arity);
    for t in 0..arity {
        acc = acc.intersect(&v.cylindrify(arity, &[t])?)?;
    }
    Ok(acc)
}

/// `a` accepts `(n, f(n))` for every `n < limit`.
fn check_function(name: &str, a: &Automaton, limit: u64, f: impl Fn(u64) -> u64) -> Result<()> {
    if a.kind() != Kind::Dfa || a.arity() != 2 {
        return Err(Error::Certification(format!("`{name}` is not a binary relation")));
    }
    match (0..limit).find(|&n| !a.accepts_values(&[n, f(n)])) {
        Some(n) => Err(Error::Certification(format!("`{name}` disagrees with its oracle at n = {n}"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Session {
        Session::new(Settings { schedule: vec![1 << 12, 1 << 14], ..Settings::default() })
    }

    #[test]
    fn builtins_are_lazy() {
        let mut s = quick();
        assert!(!s.contains("phin"));
        assert!(s.eval("An,x,y ($phin(n,x) & $phin(n+1,y)) => (y=x+1|y=x+2)").unwrap());
        assert!(s.contains("phin"));
        assert!(!s.contains("a105774"));
    }

    #[test]
    fn beatty_partition() {
        let mut s = quick();
        let q = "Az z>0 => ((Em,x m>0 & $phin(m,x) & z=x) <=> ~(Em,x m>0 & $phi2n(m,x) & z=x))";
        assert!(s.eval(q).unwrap());
    }

    #[test]
    fn script_defs_and_evals() {
        let mut s = quick();
        let r = s
            .run_script("def even \"?msd_fib Ek n=2*k\":\neval e4 \"?msd_fib $even(4)\":\neval e5 \"$even(5)\":")
            .unwrap();
        assert_eq!(r.outcomes.len(), 3);
        assert_eq!(r.get("e4").unwrap().truth, Some(true));
        assert_eq!(r.get("e5").unwrap().truth, Some(false));
        assert!(!r.all_true());
    }

    #[test]
    fn equivalent_redefinition_is_accepted() {
        let mut s = quick();
        s.define("t", "n<5").unwrap();
        s.define("t", "n<=4").unwrap();
        assert_eq!(s.define("t", "n<4").unwrap_err(), Error::Redefinition("t".into()));
    }

    #[test]
    fn script_errors_carry_lines() {
        let mut s = quick();
        let e = s.run_script("def t \"n<5\":\n\neval bad \"$nope(3)\":").unwrap_err();
        match e {
            Error::Script { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("nope"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn closed_def_reports_truth() {
        let mut s = quick();
        let r = s.run_script("def yes \"Ax x=x\":").unwrap();
        assert_eq!(r.outcomes[0].truth, Some(true));
        assert_eq!(s.get("yes").unwrap().arity(), 0);
    }

    #[test]
    fn mod_dfaos_have_two_k_squared_states() {
        let mut s = quick();
        for k in 2..=3u64 {
            assert_eq!(s.get(&format!("mod{k}")).unwrap().live_state_count() as u64, 2 * k * k);
        }
    }

    #[test]
    fn repl_commands() {
        let mut s = quick();
        match s.repl_line("eval t \"Ax x=x\"").unwrap() {
            ReplAction::Continue(out) => assert!(out.starts_with("eval t: TRUE")),
            other => panic!("{other:?}"),
        }
        s.repl_line("def t \"n<5\"").unwrap();
        match s.repl_line(":list").unwrap() {
            ReplAction::Continue(out) => assert!(out.lines().any(|l| l == "t")),
            other => panic!("{other:?}"),
        }
        match s.repl_line(":show phin").unwrap() {
            ReplAction::Continue(out) => assert!(out.starts_with("fibaut 1")),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.repl_line(":quit").unwrap(), ReplAction::Quit);
        assert!(s.repl_line(":bogus").is_err());
    }

    #[test]
    fn store_caches_builtins() {
        let dir = tempfile::tempdir().unwrap();
        let settings = Settings { schedule: vec![1 << 12], ..Settings::default() };
        let mut s = Session::with_store(dir.path(), settings.clone()).unwrap();
        let a = s.get("phin").unwrap();
        assert!(dir.path().join("phin.aut").exists());
        let mut t = Session::with_store(dir.path(), settings).unwrap();
        assert_eq!(t.get("phin").unwrap(), a);
        assert!(t.reports().is_empty());
    }
}
