//! Relations over named variables: a DFA whose tracks are bound to
//! variable names in sorted order.
//!
//! A relation is only meaningful on tuples whose tracks are all valid
//! Zeckendorf strings. Complement is a plain flip, so invalid tuples may be
//! accepted in intermediate results; quantification and
//! [`Rel::restrict_valid`] cut them away.

use std::sync::OnceLock;

use super::ops::product_mapped;
use super::{symbol_bit, Automaton, Kind};
use crate::error::{Error, Result};

/// Strings without `11`, leading zeros allowed.
pub fn valid_dfa() -> &'static Automaton {
    static VALID: OnceLock<Automaton> = OnceLock::new();
    VALID.get_or_init(|| {
        Automaton::explore(
            1,
            Kind::Dfa,
            0u32,
            |&last, s| if last == 1 && s == 1 { None } else { Some(s) },
            |_| 1,
        )
        .minimize()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rel {
    vars: Vec<String>,
    dfa: Automaton,
}

impl Rel {
    /// `vars` must be sorted and distinct, one per track.
    pub fn new(vars: Vec<String>, dfa: Automaton) -> Result<Self> {
        if vars.len() != dfa.arity() {
            return Err(Error::ArityMismatch { expected: vars.len(), found: dfa.arity() });
        }
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("relation variables must be sorted and distinct".into()));
        }
        Ok(Self { vars, dfa })
    }

    pub fn constant(value: bool) -> Self {
        Self { vars: Vec::new(), dfa: Automaton::constant(0, Kind::Dfa, value as u32) }
    }

    /// Apply an automaton to a list of variables (repeats allowed).
    pub fn from_atom(dfa: &Automaton, args: &[&str]) -> Result<Self> {
        if args.len() != dfa.arity() {
            return Err(Error::ArityMismatch { expected: dfa.arity(), found: args.len() });
        }
        let mut vars: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        vars.sort();
        vars.dedup();
        let map: Vec<usize> = args
            .iter()
            .map(|a| vars.iter().position(|v| v == a).unwrap())
            .collect();
        let identity = map.iter().enumerate().all(|(i, &m)| i == m) && map.len() == vars.len();
        let dfa = if identity {
            dfa.clone()
        } else {
            dfa.reindex(vars.len(), &map)?.minimize()
        };
        Ok(Self { vars, dfa })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dfa(&self) -> &Automaton {
        &self.dfa
    }

    pub fn into_dfa(self) -> Automaton {
        self.dfa
    }

    /// Truth value of a relation without free variables.
    pub fn truth(&self) -> Option<bool> {
        self.vars.is_empty().then(|| self.dfa.is_accepting(self.dfa.initial()))
    }

    fn lift(&self, vars: &[String]) -> (Vec<u32>, usize) {
        let k = vars.len();
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("variable in union"))
            .collect();
        let map = (0..1u32 << k)
            .map(|s| pos.iter().fold(0u32, |acc, &p| (acc << 1) | symbol_bit(s, k, p)))
            .collect();
        (map, k)
    }

    fn combine(&self, other: &Self, out: impl Fn(u32, u32) -> u32) -> Result<Self> {
        let mut vars: Vec<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        vars.sort();
        vars.dedup();
        if vars.len() > super::MAX_ARITY {
            return Err(Error::InvalidArgument(format!(
                "{} simultaneous free variables exceed the track limit",
                vars.len()
            )));
        }
        let (amap, k) = self.lift(&vars);
        let (bmap, _) = other.lift(&vars);
        let dfa = product_mapped(&self.dfa, &amap, &other.dfa, &bmap, k, Kind::Dfa, out).minimize();
        Ok(Self { vars, dfa })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| (x != 0 && y != 0) as u32)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| (x != 0 || y != 0) as u32)
    }

    pub fn not(&self) -> Self {
        Self { vars: self.vars.clone(), dfa: self.dfa.complement().expect("relations are DFAs") }
    }

    fn restrict_track(&self, track: usize) -> Automaton {
        let k = self.vars.len();
        let amap: Vec<u32> = (0..1u32 << k).collect();
        let bmap: Vec<u32> = (0..1u32 << k).map(|s| symbol_bit(s, k, track)).collect();
        product_mapped(&self.dfa, &amap, valid_dfa(), &bmap, k, Kind::Dfa, |x, y| {
            (x != 0 && y != 0) as u32
        })
    }

    /// Existential quantification over valid values of `var`.
    pub fn exists(&self, var: &str) -> Result<Self> {
        let Some(track) = self.vars.iter().position(|v| v == var) else {
            return Ok(self.clone());
        };
        let dfa = self.restrict_track(track).minimize().project(track)?;
        let mut vars = self.vars.clone();
        vars.remove(track);
        Ok(Self { vars, dfa })
    }

    /// Intersect with validity on every track.
    pub fn restrict_valid(&self) -> Self {
        let mut dfa = self.dfa.clone();
        for t in 0..self.vars.len() {
            let r = Self { vars: self.vars.clone(), dfa };
            dfa = r.restrict_track(t).minimize();
        }
        Self { vars: self.vars.clone(), dfa }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::regex_compile;

    fn eq2() -> Automaton {
        Automaton::explore(2, Kind::Dfa, (), |_, s| (s == 0 || s == 3).then_some(()), |_| 1)
    }

    #[test]
    fn valid_rejects_adjacent_ones() {
        let v = valid_dfa();
        assert!(v.accepts(&[1, 0, 0, 1, 0, 0, 0, 1]));
        assert!(v.accepts(&[]));
        assert!(!v.accepts(&[0, 1, 1, 0]));
    }

    #[test]
    fn atoms_share_tracks_by_name() {
        let r = Rel::from_atom(&eq2(), &["y", "x"]).unwrap();
        assert_eq!(r.vars(), ["x", "y"]);
        let diag = Rel::from_atom(&eq2(), &["x", "x"]).unwrap();
        assert_eq!(diag.vars(), ["x"]);
        assert!(diag.dfa().equivalent(&Automaton::universal(1)).unwrap());
    }

    #[test]
    fn conjunction_then_exists() {
        // x = y and y = z, project y: x = z
        let a = Rel::from_atom(&eq2(), &["x", "y"]).unwrap();
        let b = Rel::from_atom(&eq2(), &["y", "z"]).unwrap();
        let c = a.and(&b).unwrap().exists("y").unwrap();
        assert_eq!(c.vars(), ["x", "z"]);
        let expect = eq2().intersect(&valid_dfa().cylindrify(2, &[0]).unwrap()).unwrap();
        assert!(c.restrict_valid().dfa().equivalent(&expect).unwrap());
    }

    #[test]
    fn exists_ignores_invalid_witnesses() {
        // `11` is not a valid representation, so there is no witness
        let only_11 = regex_compile("0*11", 1).unwrap();
        let r = Rel::from_atom(&only_11, &["y"]).unwrap().exists("y").unwrap();
        assert_eq!(r.truth(), Some(false));
    }
}
