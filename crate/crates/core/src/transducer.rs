//! Deterministic complete transducers and the automata underneath them.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::dynamics::BlockMap;
use crate::error::{Error, Result};
use crate::words::{least_rotation, primitive_root, Letter, Word};

fn check_alphabet(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::BadAlphabet(n));
    }
    Ok(())
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::DuplicateState(name.clone()));
        }
    }
    Ok(index)
}

/// A complete deterministic automaton over `{0, .., n-1}`. States are
/// indexed `0..len()`; names are only for display and file exchange.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    n: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
    next: Vec<usize>,
}

impl Automaton {
    /// `next[q * n + x]` is the state reached from `q` on `x`.
    pub fn new(n: usize, names: Vec<String>, next: Vec<usize>) -> Result<Self> {
        check_alphabet(n)?;
        if names.is_empty() {
            return Err(Error::NoStates);
        }
        assert_eq!(next.len(), names.len() * n, "transition table has the wrong size");
        assert!(next.iter().all(|&t| t < names.len()), "transition to a missing state");
        let index = index_names(&names)?;
        Ok(Automaton { n, names, index, next })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn next(&self, q: usize, x: Letter) -> usize {
        self.next[q * self.n + x as usize]
    }

    pub fn run(&self, q: usize, w: &[Letter]) -> usize {
        w.iter().fold(q, |p, &x| self.next(p, x))
    }

    /// The set `{ next(q, x) : q in states, x a letter }`, sorted.
    pub fn image(&self, states: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        for &q in states {
            for x in 0..self.n as Letter {
                seen[self.next(q, x)] = true;
            }
        }
        (0..self.len()).filter(|&q| seen[q]).collect()
    }
}

/// A complete deterministic transducer: an automaton with a finite output
/// word on every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    aut: Automaton,
    out: Vec<Word>,
}

impl Transducer {
    /// `out[q * n + x]` is the output on the edge leaving `q` with `x`.
    pub fn new(aut: Automaton, out: Vec<Word>) -> Result<Self> {
        assert_eq!(out.len(), aut.next.len(), "output table has the wrong size");
        let n = aut.n;
        for w in &out {
            if let Some(&a) = w.iter().find(|&&a| a as usize >= n) {
                return Err(Error::LetterOutOfRange { letter: a, n });
            }
        }
        Ok(Transducer { aut, out })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.aut
    }

    pub fn n(&self) -> usize {
        self.aut.n
    }

    pub fn len(&self) -> usize {
        self.aut.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aut.is_empty()
    }

    pub fn name(&self, q: usize) -> &str {
        self.aut.name(q)
    }

    pub fn names(&self) -> &[String] {
        self.aut.names()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.aut.index_of(name)
    }

    pub fn next(&self, q: usize, x: Letter) -> usize {
        self.aut.next(q, x)
    }

    pub fn output(&self, q: usize, x: Letter) -> &Word {
        &self.out[q * self.aut.n + x as usize]
    }

    /// Final state and concatenated output of reading `w` from `q`.
    pub fn run(&self, q: usize, w: &[Letter]) -> (usize, Word) {
        let mut p = q;
        let mut out = Word::new();
        for &x in w {
            out.extend_from(self.output(p, x));
            p = self.next(p, x);
        }
        (p, out)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.aut.n as Letter
    }

    pub fn is_synchronous(&self) -> bool {
        self.out.iter().all(|w| w.len() == 1)
    }

    pub fn max_output_len(&self) -> usize {
        self.out.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Checks that no cycle has empty total output.
    pub fn validate(&self) -> Result<()> {
        // Colour-marking DFS restricted to edges with empty output.
        let len = self.len();
        let mut colour = vec![0u8; len];
        let mut parent = vec![usize::MAX; len];
        for root in 0..len {
            if colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0 as Letter)];
            colour[root] = 1;
            while let Some(&mut (q, ref mut x)) = stack.last_mut() {
                if *x as usize == self.n() {
                    colour[q] = 2;
                    stack.pop();
                    continue;
                }
                let letter = *x;
                *x += 1;
                if !self.output(q, letter).is_empty() {
                    continue;
                }
                let t = self.next(q, letter);
                match colour[t] {
                    0 => {
                        colour[t] = 1;
                        parent[t] = q;
                        stack.push((t, 0));
                    }
                    1 => {
                        let mut states = vec![self.name(q).to_string()];
                        let mut p = q;
                        while p != t {
                            p = parent[p];
                            states.push(self.name(p).to_string());
                        }
                        states.reverse();
                        return Err(Error::EmptyOutputCycle { states });
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Restriction to a set of states closed under transitions. Returns the
    /// new transducer and, for each new state, its old index.
    pub fn restrict(&self, keep: &[usize]) -> (Transducer, Vec<usize>) {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &q) in keep.iter().enumerate() {
            new_index[q] = i;
        }
        let n = self.n();
        let mut next = Vec::with_capacity(keep.len() * n);
        let mut out = Vec::with_capacity(keep.len() * n);
        for &q in &keep {
            for x in self.letters() {
                let t = new_index[self.next(q, x)];
                assert_ne!(t, usize::MAX, "restriction to a set that is not closed");
                next.push(t);
                out.push(self.output(q, x).clone());
            }
        }
        let names = keep.iter().map(|&q| self.name(q).to_string()).collect();
        let aut = Automaton::new(n, names, next).expect("restriction keeps names unique");
        (Transducer { aut, out }, keep)
    }

    /// Same machine with new state names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Transducer> {
        assert_eq!(names.len(), self.len());
        let aut = Automaton::new(self.n(), names, self.aut.next.clone())?;
        Ok(Transducer { aut, out: self.out.clone() })
    }

    /// Same machine with outputs replaced by `f(state, letter)`.
    pub fn map_outputs(&self, mut f: impl FnMut(usize, Letter) -> Word) -> Transducer {
        let mut out = Vec::with_capacity(self.out.len());
        for q in 0..self.len() {
            for x in self.letters() {
                out.push(f(q, x));
            }
        }
        Transducer { aut: self.aut.clone(), out }
    }

    /// Renumbers states so that new state `i` is old state `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Transducer {
        assert_eq!(order.len(), self.len());
        let mut new_index = vec![0; self.len()];
        for (i, &q) in order.iter().enumerate() {
            new_index[q] = i;
        }
        let mut next = Vec::with_capacity(self.aut.next.len());
        let mut out = Vec::with_capacity(self.out.len());
        for &q in order {
            for x in self.letters() {
                next.push(new_index[self.next(q, x)]);
                out.push(self.output(q, x).clone());
            }
        }
        let names = order.iter().map(|&q| self.name(q).to_string()).collect();
        let aut = Automaton::new(self.n(), names, next).expect("permutation keeps names unique");
        Transducer { aut, out }
    }

    /// Equal transition and output tables, ignoring state names.
    pub fn same_tables(&self, other: &Transducer) -> bool {
        self.aut.n == other.aut.n && self.aut.next == other.aut.next && self.out == other.out
    }

    /// Order in which breadth-first search from `start` first meets states,
    /// trying letters in increasing order.
    pub fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for x in self.letters() {
                let t = self.next(q, x);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
        }
        order
    }
}

/// Incremental construction from named states and edges.
#[derive(Clone, Debug)]
pub struct TransducerBuilder {
    n: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Option<(usize, Word)>>,
}

impl TransducerBuilder {
    pub fn new<S: AsRef<str>>(n: usize, names: &[S]) -> Result<Self> {
        check_alphabet(n)?;
        if names.is_empty() {
            return Err(Error::NoStates);
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let edges = vec![None; names.len() * n];
        Ok(TransducerBuilder { n, names, index, edges })
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn edge(&mut self, from: &str, x: Letter, to: &str, output: impl Into<Word>) -> Result<&mut Self> {
        let p = self.lookup(from)?;
        let t = self.lookup(to)?;
        if x as usize >= self.n {
            return Err(Error::LetterOutOfRange { letter: x, n: self.n });
        }
        let output = output.into();
        if let Some(&a) = output.iter().find(|&&a| a as usize >= self.n) {
            return Err(Error::LetterOutOfRange { letter: a, n: self.n });
        }
        let slot = &mut self.edges[p * self.n + x as usize];
        if slot.is_some() {
            return Err(Error::DuplicateEdge { state: from.to_string(), letter: x });
        }
        *slot = Some((t, output));
        Ok(self)
    }

    pub fn build(self) -> Result<Transducer> {
        let mut next = Vec::with_capacity(self.edges.len());
        let mut out = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.into_iter().enumerate() {
            match e {
                Some((t, w)) => {
                    next.push(t);
                    out.push(w);
                }
                None => {
                    return Err(Error::MissingEdge {
                        state: self.names[i / self.n].clone(),
                        letter: (i % self.n) as Letter,
                    })
                }
            }
        }
        let aut = Automaton::new(self.n, self.names, next)?;
        Transducer::new(aut, out)
    }
}

/// A transducer together with a distinguished initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialTransducer {
    pub transducer: Transducer,
    pub initial: usize,
}

/// The constant map onto the periodic point `...rrr...`, with `root` the
/// least rotation of a prime word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZConstant {
    n: usize,
    root: Word,
}

impl ZConstant {
    /// Normalizes any nonempty `w` to the least rotation of its primitive root.
    pub fn new(n: usize, w: &[Letter]) -> Result<Self> {
        check_alphabet(n)?;
        if w.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if let Some(&a) = w.iter().find(|&&a| a as usize >= n) {
            return Err(Error::LetterOutOfRange { letter: a, n });
        }
        Ok(ZConstant {
            n,
            root: least_rotation(&primitive_root(w)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Word {
        &self.root
    }

    /// One state writing the whole root on every letter.
    pub fn to_transducer(&self) -> Transducer {
        let aut = Automaton::new(self.n, vec!["z".to_string()], vec![0; self.n]).unwrap();
        Transducer::new(aut, vec![self.root.clone(); self.n]).unwrap()
    }
}

fn unique_names(raw: Vec<String>) -> Vec<String> {
    let mut used = HashSet::new();
    raw.into_iter()
        .map(|name| {
            let mut candidate = name.clone();
            let mut k = 1;
            while !used.insert(candidate.clone()) {
                candidate = format!("{name}_{k}");
                k += 1;
            }
            candidate
        })
        .collect()
}

/// The product `T * U`: read with `T`, feed each output word to `U`.
/// States are all pairs, with `(p, q)` at index `p * |U| + q`.
pub fn product_raw(t: &Transducer, u: &Transducer) -> Result<Transducer> {
    if t.n() != u.n() {
        return Err(Error::AlphabetMismatch { left: t.n(), right: u.n() });
    }
    let n = t.n();
    let mut names = Vec::with_capacity(t.len() * u.len());
    let mut next = Vec::with_capacity(t.len() * u.len() * n);
    let mut out = Vec::with_capacity(t.len() * u.len() * n);
    for p in 0..t.len() {
        for q in 0..u.len() {
            names.push(format!("{}_{}", t.name(p), u.name(q)));
            for x in t.letters() {
                let (q2, w) = u.run(q, t.output(p, x));
                next.push(t.next(p, x) * u.len() + q2);
                out.push(w);
            }
        }
    }
    let aut = Automaton::new(n, unique_names(names), next)?;
    Transducer::new(aut, out)
}

fn debruijn_name(n: usize, w: &Word) -> String {
    if w.is_empty() {
        "e".to_string()
    } else if n <= 10 {
        w.iter().map(|a| char::from_digit(*a, 10).unwrap()).collect()
    } else {
        let parts: Vec<String> = w.iter().map(|a| a.to_string()).collect();
        format!("w{}", parts.join("_"))
    }
}

/// The de Bruijn automaton `G(n, m)`: states are words of length `m`,
/// reading `x` from `a_0..a_{m-1}` leads to `a_1..a_{m-1}x`. State `i` is
/// the word of rank `i`.
pub fn de_bruijn(n: usize, m: usize) -> Result<Automaton> {
    check_alphabet(n)?;
    let size = n.pow(m as u32);
    let names = (0..size).map(|r| debruijn_name(n, &Word::unrank(r, n, m))).collect();
    let mut next = Vec::with_capacity(size * n);
    for r in 0..size {
        for x in 0..n {
            next.push((r * n + x) % size);
        }
    }
    Automaton::new(n, names, next)
}

/// The synchronous transducer of a block map of width `m + 1`, on `G(n, m)`,
/// writing `f(a_0..a_{m-1}x)` when reading `x` from `a_0..a_{m-1}`.
pub fn transducer_from_block_map(f: &BlockMap) -> Result<Transducer> {
    let n = f.n();
    let m = f.width() - 1;
    let aut = de_bruijn(n, m)?;
    let mut out = Vec::with_capacity(aut.len() * n);
    for r in 0..aut.len() {
        for x in 0..n {
            out.push(Word::letter(f.value_at_rank(r * n + x)));
        }
    }
    Transducer::new(aut, out)
}

/// One state copying its input.
pub fn identity_transducer(n: usize) -> Result<Transducer> {
    check_alphabet(n)?;
    let aut = Automaton::new(n, vec!["e".to_string()], vec![0; n])?;
    Transducer::new(aut, (0..n as Letter).map(Word::letter).collect())
}

/// The shift transducer: state `i` remembers the last letter and writes it.
pub fn shift_transducer(n: usize) -> Result<Transducer> {
    check_alphabet(n)?;
    let names = (0..n).map(|i| debruijn_name(n, &Word::letter(i as Letter))).collect();
    let next = (0..n).flat_map(|_| 0..n).collect();
    let aut = Automaton::new(n, names, next)?;
    let out = (0..n).flat_map(|i| std::iter::repeat_n(Word::letter(i as Letter), n)).collect();
    Transducer::new(aut, out)
}

/// One state applying the letter permutation `perm`.
pub fn permutation_transducer(perm: &[Letter]) -> Result<Transducer> {
    let n = perm.len();
    check_alphabet(n)?;
    let mut seen = vec![false; n];
    for &a in perm {
        if a as usize >= n || std::mem::replace(&mut seen[a as usize], true) {
            return Err(Error::NotInvertible { state: "e".to_string() });
        }
    }
    let aut = Automaton::new(n, vec!["e".to_string()], vec![0; n])?;
    Transducer::new(aut, perm.iter().map(|&a| Word::letter(a)).collect())
}

/// Inverse of a synchronous transducer whose every state permutes the
/// alphabet: from `q` on `x`, write `y` with `λ(y, q) = x` and move to `π(y, q)`.
pub fn invert_synchronous(t: &Transducer) -> Result<Transducer> {
    if !t.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    let n = t.n();
    let mut next = vec![0; t.len() * n];
    let mut out = vec![Word::new(); t.len() * n];
    for q in 0..t.len() {
        let mut filled = vec![false; n];
        for y in t.letters() {
            let x = t.output(q, y)[0] as usize;
            if std::mem::replace(&mut filled[x], true) {
                return Err(Error::NotInvertible { state: t.name(q).to_string() });
            }
            next[q * n + x] = t.next(q, y);
            out[q * n + x] = Word::letter(y);
        }
    }
    let aut = Automaton::new(n, t.names().to_vec(), next)?;
    Transducer::new(aut, out)
}

/// A bijection `a -> b` of states matching transitions and outputs and
/// sending `start_a` to `start_b`, if one exists. Both machines must have
/// every state reachable from their start.
pub fn find_isomorphism(a: &Transducer, start_a: usize, b: &Transducer, start_b: usize) -> Option<Vec<usize>> {
    if a.n() != b.n() || a.len() != b.len() {
        return None;
    }
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    map[start_a] = start_b;
    used[start_b] = true;
    let mut queue = VecDeque::from([start_a]);
    while let Some(p) = queue.pop_front() {
        let q = map[p];
        for x in a.letters() {
            if a.output(p, x) != b.output(q, x) {
                return None;
            }
            let (pt, qt) = (a.next(p, x), b.next(q, x));
            if map[pt] == usize::MAX {
                if used[qt] {
                    return None;
                }
                map[pt] = qt;
                used[qt] = true;
                queue.push_back(pt);
            } else if map[pt] != qt {
                return None;
            }
        }
    }
    map.iter().all(|&q| q != usize::MAX).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma2() -> Transducer {
        let mut b = TransducerBuilder::new(2, &["a1", "a2"]).unwrap();
        b.edge("a1", 0, "a1", [0]).unwrap();
        b.edge("a1", 1, "a2", [0]).unwrap();
        b.edge("a2", 0, "a1", [1]).unwrap();
        b.edge("a2", 1, "a2", [1]).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn builder_reports_missing_and_duplicate_edges() {
        let mut b = TransducerBuilder::new(2, &["p"]).unwrap();
        b.edge("p", 0, "p", [0]).unwrap();
        assert!(matches!(b.edge("p", 0, "p", [1]), Err(Error::DuplicateEdge { .. })));
        assert!(matches!(b.edge("p", 2, "p", [1]), Err(Error::LetterOutOfRange { .. })));
        assert!(matches!(b.edge("r", 1, "p", [1]), Err(Error::UnknownState(_))));
        assert_eq!(b.build(), Err(Error::MissingEdge { state: "p".into(), letter: 1 }));
        assert_eq!(TransducerBuilder::new(1, &["p"]).unwrap_err(), Error::BadAlphabet(1));
    }

    #[test]
    fn empty_output_cycle_is_found() {
        let mut b = TransducerBuilder::new(2, &["p", "q"]).unwrap();
        b.edge("p", 0, "q", Word::new()).unwrap();
        b.edge("q", 0, "p", Word::new()).unwrap();
        b.edge("p", 1, "p", [1]).unwrap();
        b.edge("q", 1, "q", [1]).unwrap();
        let t = b.build().unwrap();
        match t.validate() {
            Err(Error::EmptyOutputCycle { states }) => assert_eq!(states.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(sigma2().validate().is_ok());
    }

    #[test]
    fn run_concatenates_outputs() {
        let t = sigma2();
        let (q, w) = t.run(0, &[1, 1, 0]);
        assert_eq!(t.name(q), "a1");
        assert_eq!(w, Word::from([0, 1, 1]));
    }

    #[test]
    fn de_bruijn_appends_letter() {
        let g = de_bruijn(2, 3).unwrap();
        assert_eq!(g.len(), 8);
        let q = g.index_of("011").unwrap();
        assert_eq!(g.name(g.next(q, 0)), "110");
        assert_eq!(g.name(g.run(q, &[1, 0, 1])), "101");
        let g0 = de_bruijn(3, 0).unwrap();
        assert_eq!(g0.len(), 1);
    }

    #[test]
    fn shift_matches_hand_built_machine() {
        let s = shift_transducer(2).unwrap();
        let iso = find_isomorphism(&s, 0, &sigma2(), 0);
        assert_eq!(iso, Some(vec![0, 1]));
    }

    #[test]
    fn product_with_identity_is_isomorphic() {
        let s = sigma2();
        let id = identity_transducer(2).unwrap();
        let p = product_raw(&s, &id).unwrap();
        assert_eq!(p.name(1), "a2_e");
        assert!(find_isomorphism(&p, 0, &s, 0).is_some());
    }

    #[test]
    fn synchronous_inverse_undoes() {
        let t = permutation_transducer(&[2, 0, 1]).unwrap();
        let inv = invert_synchronous(&t).unwrap();
        let p = product_raw(&t, &inv).unwrap();
        let id = identity_transducer(3).unwrap();
        assert!(find_isomorphism(&p, 0, &id, 0).is_some());
        assert!(matches!(invert_synchronous(&sigma2()), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn zconstant_normalizes() {
        let z = ZConstant::new(2, &[1, 0, 1, 0]).unwrap();
        assert_eq!(z.root(), &Word::from([0, 1]));
        let t = z.to_transducer();
        assert_eq!(t.run(0, &[1, 1]).1, Word::from([0, 1, 0, 1]));
    }
}
