//! Regular expressions over tuple symbols.
//!
//! Symbols are written `[b1,…,bk]`, or as bare `0`/`1` for one track.
//! Operators: concatenation, `|`, `*`, `+`, `?`, parentheses, and
//! `{w1,w2,…}` as a finite alternative (`ε` or an empty item is the empty
//! word). Whitespace is ignored.

use super::{Automaton, Nfa};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Re {
    Empty,
    Sym(u32),
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    arity: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, arity: usize) -> Self {
        let chars = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Self { chars, pos: 0, arity, _src: src }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or_else(
            || self.chars.last().map_or(0, |(i, c)| i + c.len_utf8()),
            |(i, _)| *i,
        )
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Regex { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn alt(&mut self, stop: &[char]) -> Result<Re> {
        let mut branches = vec![self.cat(stop)?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.cat(stop)?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Re::Alt(branches) })
    }

    fn cat(&mut self, stop: &[char]) -> Result<Re> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' || stop.contains(&c) {
                break;
            }
            items.push(self.repeat()?);
        }
        Ok(match items.len() {
            0 => Re::Empty,
            1 => items.pop().unwrap(),
            _ => Re::Cat(items),
        })
    }

    fn repeat(&mut self) -> Result<Re> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => r = Re::Star(Box::new(r)),
                Some('+') => r = Re::Cat(vec![r.clone(), Re::Star(Box::new(r))]),
                Some('?') => r = Re::Alt(vec![r, Re::Empty]),
                _ => break,
            }
            self.pos += 1;
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Re> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let r = self.alt(&[])?;
                self.expect(')')?;
                Ok(r)
            }
            Some('{') => {
                self.pos += 1;
                let mut items = vec![self.alt(&[',', '}'])?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    items.push(self.alt(&[',', '}'])?);
                }
                self.expect('}')?;
                Ok(Re::Alt(items))
            }
            Some('ε') => {
                self.pos += 1;
                Ok(Re::Empty)
            }
            Some('[') => {
                self.pos += 1;
                let mut sym = 0u32;
                for i in 0..self.arity {
                    if i > 0 {
                        self.expect(',')?;
                    }
                    sym = (sym << 1) | self.bit()?;
                }
                self.expect(']')?;
                Ok(Re::Sym(sym))
            }
            Some('0' | '1') if self.arity == 1 => Ok(Re::Sym(self.bit()?)),
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of pattern"),
        }
    }

    fn bit(&mut self) -> Result<u32> {
        match self.peek() {
            Some('0') => {
                self.pos += 1;
                Ok(0)
            }
            Some('1') => {
                self.pos += 1;
                Ok(1)
            }
            _ => self.err("expected 0 or 1"),
        }
    }
}

/// Thompson construction with ε-edges kept separately.
struct Thompson {
    eps: Vec<Vec<u32>>,
    edges: Vec<Vec<(u32, u32)>>,
}

impl Thompson {
    fn state(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() as u32 - 1
    }

    /// Returns (entry, exit).
    fn build(&mut self, re: &Re) -> (u32, u32) {
        match re {
            Re::Empty => {
                let s = self.state();
                (s, s)
            }
            Re::Sym(sym) => {
                let (s, t) = (self.state(), self.state());
                self.edges[s as usize].push((*sym, t));
                (s, t)
            }
            Re::Cat(items) => {
                let (entry, mut exit) = self.build(&items[0]);
                for item in &items[1..] {
                    let (s, t) = self.build(item);
                    self.eps[exit as usize].push(s);
                    exit = t;
                }
                (entry, exit)
            }
            Re::Alt(items) => {
                let (s, t) = (self.state(), self.state());
                for item in items {
                    let (a, b) = self.build(item);
                    self.eps[s as usize].push(a);
                    self.eps[b as usize].push(t);
                }
                (s, t)
            }
            Re::Star(inner) => {
                let (s, t) = (self.state(), self.state());
                let (a, b) = self.build(inner);
                self.eps[s as usize].extend([a, t]);
                self.eps[b as usize].extend([a, t]);
                (s, t)
            }
        }
    }

    fn closure(&self, q: u32) -> Vec<u32> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack = vec![q];
        seen[q as usize] = true;
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            out.push(p);
            for &r in &self.eps[p as usize] {
                if !std::mem::replace(&mut seen[r as usize], true) {
                    stack.push(r);
                }
            }
        }
        out
    }
}

/// Minimal DFA for the exact language of `pattern` (no implicit padding).
pub fn regex_compile(pattern: &str, arity: usize) -> Result<Automaton> {
    let mut p = Parser::new(pattern, arity);
    let re = p.alt(&[])?;
    if p.peek().is_some() {
        return p.err("unbalanced `)`");
    }
    let mut th = Thompson { eps: Vec::new(), edges: Vec::new() };
    let (entry, exit) = th.build(&re);
    let n = th.eps.len();
    let closures: Vec<Vec<u32>> = (0..n as u32).map(|q| th.closure(q)).collect();
    let mut nfa = Nfa::new(arity);
    for closure in &closures {
        nfa.add_state(closure.contains(&exit));
    }
    for (q, closure) in closures.iter().enumerate() {
        for &p in closure {
            for &(sym, t) in &th.edges[p as usize] {
                nfa.add_transition(q as u32, sym, t);
            }
        }
    }
    nfa.initial = vec![entry];
    Ok(nfa.determinize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{encode_tuple, word_from_digits};
    use crate::numeration::{encode_u64, fib_u64};

    #[test]
    fn adjacent_fibonacci_pairs() {
        let d = regex_compile("[0,0]*[0,1][1,0][0,0]*", 2).unwrap();
        assert!(d.accepts(&encode_tuple(&[1, 2])));
        for k in 2..30 {
            assert!(d.accepts(&encode_tuple(&[fib_u64(k), fib_u64(k + 1)])));
        }
        assert!(!d.accepts(&encode_tuple(&[2, 5])));
    }

    #[test]
    fn fibonacci_numbers() {
        let d = regex_compile("0*10*", 1).unwrap();
        for k in 2..=25 {
            assert!(d.accepts(&word_from_digits(encode_u64(fib_u64(k)).digits())));
        }
        assert!(!d.accepts(&word_from_digits(encode_u64(4).digits())));
    }

    #[test]
    fn suffix_minima_shape() {
        let d = regex_compile("10(100*10)*0*", 1).unwrap();
        assert!(d.accepts(&[1, 0]));
        assert!(d.accepts(&[1, 0, 0, 0]));
        assert!(d.accepts(&[1, 0, 1, 0, 0, 1, 0]));
        assert!(!d.accepts(&[1, 0, 1, 0, 0]));
        assert!(!d.accepts(&[1]));
    }

    #[test]
    fn finite_alternative_with_epsilon() {
        let d = regex_compile("1(00100*1)*{ε,01,010,0100}", 1).unwrap();
        assert!(d.accepts(&[1]));
        assert!(d.accepts(&[1, 0, 1, 0]));
        assert!(!d.accepts(&[1, 0]));
        let e = regex_compile("(|1)0", 1).unwrap();
        assert!(e.accepts(&[0]) && e.accepts(&[1, 0]));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match regex_compile("[0,1", 2) {
            Err(Error::Regex { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(regex_compile("(0", 1).is_err());
        assert!(regex_compile("0)", 1).is_err());
        assert!(regex_compile("2", 1).is_err());
    }
}
