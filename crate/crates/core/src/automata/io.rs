//! Line-oriented text format and Graphviz export.
//!
//! ```text
//! fibaut 1
//! arity 2
//! states 3
//! initial 0
//! accepting 0          # DFA only
//! output 0 1           # DFAO only, one line per state
//! trans 0 [0,0] 0
//! ```

use std::fmt::Write as _;

use super::{format_symbol, Automaton, Kind};
use crate::error::{Error, Result};

pub fn serialize(a: &Automaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fibaut 1");
    let _ = writeln!(s, "arity {}", a.arity());
    let _ = writeln!(s, "states {}", a.num_states());
    let _ = writeln!(s, "initial {}", a.initial());
    match a.kind() {
        Kind::Dfa => {
            let acc: Vec<String> = (0..a.num_states() as u32)
                .filter(|&q| a.is_accepting(q))
                .map(|q| q.to_string())
                .collect();
            let _ = writeln!(s, "accepting {}", acc.join(" ").trim_end());
        }
        Kind::Dfao => {
            for q in 0..a.num_states() as u32 {
                let _ = writeln!(s, "output {q} {}", a.output(q));
            }
        }
    }
    for q in 0..a.num_states() as u32 {
        for sym in 0..a.num_symbols() {
            let _ = writeln!(s, "trans {q} {} {}", format_symbol(sym, a.arity()), a.next(q, sym));
        }
    }
    s
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<u64> {
    let tok = tok.ok_or_else(|| Error::Format { line, message: format!("missing {what}") })?;
    tok.parse()
        .map_err(|_| Error::Format { line, message: format!("bad {what} `{tok}`") })
}

fn parse_symbol(tok: &str, arity: usize, line: usize) -> Result<u32> {
    let inner = tok
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Format { line, message: format!("bad symbol `{tok}`") })?;
    let bits: Vec<&str> = if inner.is_empty() { Vec::new() } else { inner.split(',').collect() };
    if bits.len() != arity {
        return Err(Error::Format {
            line,
            message: format!("symbol `{tok}` has {} tracks, expected {arity}", bits.len()),
        });
    }
    bits.iter().try_fold(0u32, |acc, b| match b.trim() {
        "0" => Ok(acc << 1),
        "1" => Ok((acc << 1) | 1),
        other => Err(Error::Format { line, message: format!("bad bit `{other}`") }),
    })
}

/// Parse the text format. Missing transitions go to a fresh rejecting sink.
pub fn deserialize(text: &str) -> Result<Automaton> {
    let mut arity: Option<usize> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<u32> = None;
    let mut accepting: Option<Vec<u32>> = None;
    let mut outputs: Vec<(u32, u32)> = Vec::new();
    let mut trans: Vec<(usize, u32, u32, u32)> = Vec::new();
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let key = toks.next().unwrap();
        if !saw_header {
            if key != "fibaut" {
                return Err(Error::Format { line, message: "expected `fibaut 1` header".into() });
            }
            let version = parse_num(toks.next(), line, "version")?;
            if version != 1 {
                return Err(Error::Format { line, message: format!("unsupported version {version}") });
            }
            saw_header = true;
            continue;
        }
        match key {
            "arity" => arity = Some(parse_num(toks.next(), line, "arity")? as usize),
            "states" => states = Some(parse_num(toks.next(), line, "state count")? as usize),
            "initial" => initial = Some(parse_num(toks.next(), line, "initial state")? as u32),
            "accepting" => {
                let qs = toks
                    .map(|t| parse_num(Some(t), line, "state").map(|q| q as u32))
                    .collect::<Result<Vec<_>>>()?;
                accepting = Some(qs);
            }
            "output" => {
                let q = parse_num(toks.next(), line, "state")? as u32;
                let v = parse_num(toks.next(), line, "output")? as u32;
                outputs.push((q, v));
            }
            "trans" => {
                let k = arity.ok_or(Error::Format { line, message: "`arity` must come first".into() })?;
                let q = parse_num(toks.next(), line, "source state")? as u32;
                let sym_tok = toks
                    .next()
                    .ok_or(Error::Format { line, message: "missing symbol".into() })?;
                let sym = parse_symbol(sym_tok, k, line)?;
                let t = parse_num(toks.next(), line, "target state")? as u32;
                trans.push((line, q, sym, t));
            }
            other => {
                return Err(Error::Format { line, message: format!("unknown directive `{other}`") })
            }
        }
    }

    let last = text.lines().count().max(1);
    let missing = |what: &str| Error::Format { line: last, message: format!("missing `{what}`") };
    let arity = arity.ok_or_else(|| missing("arity"))?;
    if arity > super::MAX_ARITY {
        return Err(Error::Format { line: last, message: format!("arity {arity} too large") });
    }
    let n = states.ok_or_else(|| missing("states"))?;
    if n == 0 {
        return Err(Error::Format { line: last, message: "automaton needs a state".into() });
    }
    let initial = initial.ok_or_else(|| missing("initial"))?;
    if initial as usize >= n {
        return Err(Error::Format { line: last, message: format!("initial state {initial} out of range") });
    }
    let kind = if accepting.is_some() { Kind::Dfa } else { Kind::Dfao };
    let mut out = vec![0u32; n];
    if let Some(acc) = &accepting {
        for &q in acc {
            if q as usize >= n {
                return Err(Error::Format { line: last, message: format!("accepting state {q} out of range") });
            }
            out[q as usize] = 1;
        }
    }
    for &(q, v) in &outputs {
        if q as usize >= n {
            return Err(Error::Format { line: last, message: format!("output state {q} out of range") });
        }
        out[q as usize] = v;
    }
    let nsym = 1usize << arity;
    const UNSET: u32 = u32::MAX;
    let mut table = vec![UNSET; n * nsym];
    for &(line, q, sym, t) in &trans {
        if q as usize >= n || t as usize >= n {
            return Err(Error::Format { line, message: format!("transition {q} -> {t} uses a state out of range") });
        }
        let slot = &mut table[q as usize * nsym + sym as usize];
        if *slot != UNSET && *slot != t {
            return Err(Error::Format { line, message: "conflicting transition".into() });
        }
        *slot = t;
    }
    if table.contains(&UNSET) {
        let sink = n as u32;
        out.push(0);
        table.extend(std::iter::repeat_n(sink, nsym));
        for t in table.iter_mut() {
            if *t == UNSET {
                *t = sink;
            }
        }
    }
    Automaton::from_parts(arity, kind, initial, out, table)
}

/// Graphviz rendering: `q/v` labels for DFAO states, double circles for
/// accepting DFA states, one edge per (state, symbol).
pub fn export_dot(a: &Automaton) -> String {
    let mut s = String::from("digraph automaton {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in 0..a.num_states() as u32 {
        let (label, shape) = match a.kind() {
            Kind::Dfa => (q.to_string(), if a.is_accepting(q) { "doublecircle" } else { "circle" }),
            Kind::Dfao => (format!("{q}/{}", a.output(q)), "circle"),
        };
        let _ = writeln!(s, "  {q} [label=\"{label}\", shape={shape}];");
    }
    let _ = writeln!(s, "  __start -> {};", a.initial());
    for q in 0..a.num_states() as u32 {
        for sym in 0..a.num_symbols() {
            let _ = writeln!(
                s,
                "  {q} -> {} [label=\"{}\"];",
                a.next(q, sym),
                format_symbol(sym, a.arity())
            );
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::regex_compile;

    #[test]
    fn round_trip() {
        let a = regex_compile("[0,0]*[0,1][1,0][0,0]*", 2).unwrap();
        let b = deserialize(&serialize(&a)).unwrap();
        assert_eq!(a, b);
        let c = a.clone().into_dfao();
        assert_eq!(deserialize(&serialize(&c)).unwrap(), c);
    }

    #[test]
    fn dot_has_one_edge_per_transition() {
        let a = regex_compile("0*10*", 1).unwrap();
        let dot = export_dot(&a);
        let edges = dot.lines().filter(|l| l.contains("->") && !l.contains("__start")).count();
        assert_eq!(edges, a.num_states() * 2);
        assert!(dot.contains("doublecircle"));
    }

    #[test]
    fn rejects_out_of_range_target() {
        let text = "fibaut 1\narity 1\nstates 1\ninitial 0\naccepting 0\ntrans 0 [0] 0\ntrans 0 [1] 3\n";
        match deserialize(text) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn completes_partial_tables() {
        let text = "fibaut 1\narity 1\nstates 1\ninitial 0\naccepting 0\ntrans 0 [0] 0 # zeros only\n";
        let a = deserialize(text).unwrap();
        assert_eq!(a.num_states(), 2);
        assert!(a.accepts(&[0, 0]));
        assert!(!a.accepts(&[1]));
    }
}
