//! Hopcroft partition refinement and canonical numbering.

use super::Automaton;

struct Partition {
    elems: Vec<u32>,
    loc: Vec<u32>,
    blk: Vec<u32>,
    first: Vec<u32>,
    end: Vec<u32>,
    mid: Vec<u32>,
}

impl Partition {
    fn by_key(keys: &[u32]) -> Self {
        let n = keys.len();
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&q| keys[q as usize]);
        let mut loc = vec![0u32; n];
        let mut blk = vec![0u32; n];
        let (mut first, mut end) = (Vec::new(), Vec::new());
        for (i, &q) in elems.iter().enumerate() {
            loc[q as usize] = i as u32;
            if i == 0 || keys[q as usize] != keys[elems[i - 1] as usize] {
                if i > 0 {
                    end.push(i as u32);
                }
                first.push(i as u32);
            }
            blk[q as usize] = first.len() as u32 - 1;
        }
        end.push(n as u32);
        let mid = first.clone();
        Self { elems, loc, blk, first, end, mid }
    }

    fn num_blocks(&self) -> usize {
        self.first.len()
    }

    fn size(&self, b: u32) -> u32 {
        self.end[b as usize] - self.first[b as usize]
    }

    /// Returns true when this is the first mark in the block.
    fn mark(&mut self, q: u32) -> bool {
        let b = self.blk[q as usize] as usize;
        let i = self.loc[q as usize];
        let m = self.mid[b];
        if i < m {
            return false;
        }
        let other = self.elems[m as usize];
        self.elems.swap(i as usize, m as usize);
        self.loc[q as usize] = m;
        self.loc[other as usize] = i;
        self.mid[b] = m + 1;
        m == self.first[b]
    }

    /// Split off the marked part of `b`; returns the new block id.
    fn split(&mut self, b: u32) -> Option<u32> {
        let bi = b as usize;
        let (f, m, e) = (self.first[bi], self.mid[bi], self.end[bi]);
        if m == e {
            self.mid[bi] = f;
            return None;
        }
        let nb = self.first.len() as u32;
        self.first.push(f);
        self.end.push(m);
        self.mid.push(f);
        for i in f..m {
            self.blk[self.elems[i as usize] as usize] = nb;
        }
        self.first[bi] = m;
        self.mid[bi] = m;
        Some(nb)
    }
}

/// Coarsest partition compatible with outputs and transitions.
fn refine(a: &Automaton) -> Partition {
    let n = a.num_states();
    let nsym = a.num_symbols() as usize;
    let trans = a.transitions();
    let mut part = Partition::by_key(a.outputs());

    // inverse transitions, CSR keyed by (target, symbol)
    let mut start = vec![0u32; n * nsym + 1];
    for q in 0..n {
        for s in 0..nsym {
            let t = trans[q * nsym + s] as usize;
            start[t * nsym + s + 1] += 1;
        }
    }
    for i in 1..start.len() {
        start[i] += start[i - 1];
    }
    let mut fill = start.clone();
    let mut sources = vec![0u32; n * nsym];
    for q in 0..n {
        for s in 0..nsym {
            let key = trans[q * nsym + s] as usize * nsym + s;
            sources[fill[key] as usize] = q as u32;
            fill[key] += 1;
        }
    }
    drop(fill);

    let mut pending: Vec<bool> = vec![false; part.num_blocks() * nsym];
    let mut work: Vec<(u32, u32)> = Vec::new();
    let largest = (0..part.num_blocks() as u32).max_by_key(|&b| part.size(b)).unwrap_or(0);
    for b in 0..part.num_blocks() as u32 {
        if b == largest && part.num_blocks() > 1 {
            continue;
        }
        for s in 0..nsym as u32 {
            pending[b as usize * nsym + s as usize] = true;
            work.push((b, s));
        }
    }

    let mut splitter: Vec<u32> = Vec::new();
    let mut touched: Vec<u32> = Vec::new();
    while let Some((b, s)) = work.pop() {
        pending[b as usize * nsym + s as usize] = false;
        splitter.clear();
        let (f, e) = (part.first[b as usize], part.end[b as usize]);
        splitter.extend_from_slice(&part.elems[f as usize..e as usize]);
        for &t in &splitter {
            let key = t as usize * nsym + s as usize;
            for &src in &sources[start[key] as usize..start[key + 1] as usize] {
                if part.mark(src) {
                    touched.push(part.blk[src as usize]);
                }
            }
        }
        for x in touched.drain(..) {
            if let Some(y) = part.split(x) {
                pending.extend(std::iter::repeat_n(false, nsym));
                let smaller = if part.size(y) <= part.size(x) { y } else { x };
                for c in 0..nsym {
                    if pending[x as usize * nsym + c] {
                        pending[y as usize * nsym + c] = true;
                        work.push((y, c as u32));
                    } else {
                        let idx = smaller as usize * nsym + c;
                        if !pending[idx] {
                            pending[idx] = true;
                            work.push((smaller, c as u32));
                        }
                    }
                }
            }
        }
    }
    part
}

/// Whether two states of `a` accept the same language (same output function).
pub(super) fn states_equivalent(a: &Automaton, p: u32, q: u32) -> bool {
    let part = refine(a);
    part.blk[p as usize] == part.blk[q as usize]
}

pub(super) fn minimize(a: &Automaton) -> Automaton {
    let nsym = a.num_symbols();
    // restrict to reachable states first
    let reach = a.reachable();
    let mut index = vec![u32::MAX; a.num_states()];
    for (i, &q) in reach.iter().enumerate() {
        index[q as usize] = i as u32;
    }
    let mut trans = Vec::with_capacity(reach.len() * nsym as usize);
    for &q in &reach {
        for s in 0..nsym {
            trans.push(index[a.next(q, s) as usize]);
        }
    }
    let outputs: Vec<u32> = reach.iter().map(|&q| a.output(q)).collect();
    let trimmed = Automaton::from_parts_unchecked(
        a.arity(),
        a.kind(),
        0,
        outputs,
        trans,
        a.is_zero_normalized(),
    );
    let part = refine(&trimmed);

    // canonical BFS over blocks
    let nb = part.num_blocks();
    let mut id = vec![u32::MAX; nb];
    let mut order: Vec<u32> = Vec::with_capacity(nb);
    let b0 = part.blk[0];
    id[b0 as usize] = 0;
    order.push(b0);
    let mut new_trans = Vec::with_capacity(nb * nsym as usize);
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        let rep = part.elems[part.first[b as usize] as usize];
        for s in 0..nsym {
            let tb = part.blk[trimmed.next(rep, s) as usize];
            if id[tb as usize] == u32::MAX {
                id[tb as usize] = order.len() as u32;
                order.push(tb);
            }
            new_trans.push(id[tb as usize]);
        }
        i += 1;
    }
    let new_outputs = order
        .iter()
        .map(|&b| trimmed.output(part.elems[part.first[b as usize] as usize]))
        .collect();
    let mut out = Automaton::from_parts_unchecked(
        a.arity(),
        a.kind(),
        0,
        new_outputs,
        new_trans,
        false,
    );
    // in a minimal automaton, invariance means the 0-successor is the start
    let zn = out.next(0, 0) == 0;
    out.set_zero_normalized(zn);
    out
}

#[cfg(test)]
mod tests {
    use super::super::{Automaton, Kind};

    /// n mod k over plain binary, with deliberately duplicated states.
    fn redundant_mod(k: u32, copies: u32) -> Automaton {
        Automaton::explore(
            1,
            Kind::Dfa,
            (0u32, 0u32),
            move |&(r, c), s| Some(((2 * r + s) % k, (c + 1) % copies)),
            |&(r, _)| (r == 0) as u32,
        )
    }

    #[test]
    fn collapses_duplicates() {
        let a = redundant_mod(5, 3);
        assert_eq!(a.num_states(), 15);
        let m = a.minimize();
        assert_eq!(m.num_states(), 5);
        for w in 0u32..512 {
            let word: Vec<u32> = (0..9).rev().map(|i| (w >> i) & 1).collect();
            assert_eq!(a.accepts(&word), m.accepts(&word));
        }
    }

    #[test]
    fn idempotent_and_canonical() {
        let m1 = redundant_mod(7, 2).minimize();
        let m2 = redundant_mod(7, 5).minimize();
        assert_eq!(m1, m2);
        assert_eq!(m1.minimize(), m1);
        assert!(m1.equivalent(&m2).unwrap());
    }
}
