//! Incomplete response, ω-equivalence, and minimization.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::synchro::is_core;
use crate::transducer::{Automaton, InitialTransducer, Transducer, ZConstant};
use crate::words::{least_rotation, primitive_root, Letter, Word};

/// Longest common prefix of everything a state can write.
///
/// When a state has a single possible output it is the ultimately periodic
/// word `prefix period period ...`, kept in its shortest form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extent {
    Finite(Word),
    Infinite { prefix: Word, period: Word },
}

impl Extent {
    fn infinite(prefix: Vec<Letter>, period: &[Letter]) -> Extent {
        let mut prefix = prefix;
        let mut period = primitive_root(period).into_vec();
        while let (Some(&a), Some(&b)) = (prefix.last(), period.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Extent::Infinite {
            prefix: prefix.into(),
            period: period.into(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extent::Finite(_))
    }

    pub fn finite(&self) -> Option<&Word> {
        match self {
            Extent::Finite(w) => Some(w),
            Extent::Infinite { .. } => None,
        }
    }

    /// Least rotation of the period, for the single-output case.
    pub fn root(&self) -> Option<Word> {
        match self {
            Extent::Finite(_) => None,
            Extent::Infinite { period, .. } => Some(least_rotation(period)),
        }
    }

    /// The extent of `w` followed by this.
    pub fn prepend(&self, w: &[Letter]) -> Extent {
        match self {
            Extent::Finite(u) => Extent::Finite(Word::from(w).concat(u)),
            Extent::Infinite { prefix, period } => Extent::infinite(Word::from(w).concat(prefix).into_vec(), period),
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(w) => write!(f, "{w}"),
            Extent::Infinite { prefix, period } => write!(f, "{prefix}({period})^w"),
        }
    }
}

/// Extent of state `q`, by tracking the set of pending outputs (state,
/// unconsumed word) and consuming letters while they all agree. A repeated
/// pending set means the agreement never stops.
pub fn extent(t: &Transducer, q: usize) -> Result<Extent> {
    type Frontier = BTreeSet<(usize, Vec<Letter>)>;
    let mut frontier: Frontier = BTreeSet::from([(q, Vec::new())]);
    let mut consumed: Vec<Letter> = Vec::new();
    let mut seen: HashMap<Frontier, usize> = HashMap::new();
    loop {
        let mut passes = 0;
        while frontier.iter().any(|(_, w)| w.is_empty()) {
            passes += 1;
            if passes > t.len() {
                t.validate()?;
                unreachable!("empty outputs along an acyclic path outlasted the state count");
            }
            let mut expanded = Frontier::new();
            for (s, w) in frontier {
                if w.is_empty() {
                    for x in t.letters() {
                        expanded.insert((t.next(s, x), t.output(s, x).to_vec()));
                    }
                } else {
                    expanded.insert((s, w));
                }
            }
            frontier = expanded;
        }
        let a = frontier.first().unwrap().1[0];
        if frontier.iter().any(|(_, w)| w[0] != a) {
            return Ok(Extent::Finite(consumed.into()));
        }
        consumed.push(a);
        frontier = frontier.into_iter().map(|(s, w)| (s, w[1..].to_vec())).collect();
        if let Some(start) = seen.insert(frontier.clone(), consumed.len()) {
            return Ok(Extent::infinite(consumed[..start].to_vec(), &consumed[start..]));
        }
    }
}

pub fn extents(t: &Transducer) -> Result<Vec<Extent>> {
    (0..t.len()).map(|q| extent(t, q)).collect()
}

/// `Λ(w, q)`: the output of `w` from `q` together with the extent reached.
pub fn big_lambda(t: &Transducer, w: &[Letter], q: usize) -> Result<Word> {
    let (p, out) = t.run(q, w);
    match extent(t, p)? {
        Extent::Finite(e) => Ok(out.concat(&e)),
        Extent::Infinite { .. } => Err(Error::InfiniteExtent { state: t.name(p).to_string() }),
    }
}

fn stripped_outputs(t: &Transducer, ext: &[Extent]) -> Result<Vec<Word>> {
    let mut out = Vec::with_capacity(t.len() * t.n());
    for q in 0..t.len() {
        let own = ext[q].finite().ok_or_else(|| Error::InfiniteExtent { state: t.name(q).to_string() })?;
        for x in t.letters() {
            let p = t.next(q, x);
            let succ = ext[p].finite().ok_or_else(|| Error::InfiniteExtent { state: t.name(p).to_string() })?;
            let full = t.output(q, x).concat(succ);
            out.push(full.strip_prefix(own).expect("extent is a prefix of every continuation"));
        }
    }
    Ok(out)
}

/// Adds a fresh initial state writing `Λ(x, q0)` and rewrites every other
/// edge to `Λ(x, q) - Λ(ε, q)`, so no state has incomplete response.
pub fn remove_incomplete_response(it: &InitialTransducer) -> Result<InitialTransducer> {
    let t = &it.transducer;
    let ext = extents(t)?;
    let stripped = stripped_outputs(t, &ext)?;
    let n = t.n();
    let q0 = it.initial;
    let mut fresh = format!("{}_i", t.name(q0));
    while t.index_of(&fresh).is_some() {
        fresh.push('i');
    }
    let mut names = t.names().to_vec();
    names.push(fresh);
    let mut next: Vec<usize> = (0..t.len()).flat_map(|q| t.letters().map(move |x| (q, x))).map(|(q, x)| t.next(q, x)).collect();
    let mut out = stripped;
    for x in t.letters() {
        next.push(t.next(q0, x));
        out.push(big_lambda(t, &[x], q0)?);
    }
    let aut = Automaton::new(n, names, next)?;
    Ok(InitialTransducer {
        transducer: Transducer::new(aut, out)?,
        initial: t.len(),
    })
}

/// Moore refinement: states start grouped by `initial`, then split until
/// the key of every edge (which may mention the class of the target) agrees.
fn refine<K: Hash + Eq, E: Hash + Eq>(
    t: &Transducer,
    initial: &[K],
    edge: impl Fn(usize, Letter, &[usize]) -> E,
) -> (Vec<usize>, usize) {
    fn number<T: Hash + Eq>(keys: impl Iterator<Item = T>) -> (Vec<usize>, usize) {
        let mut ids = HashMap::new();
        let classes = keys
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        (classes, ids.len())
    }
    let (mut class, mut count) = number(initial.iter());
    loop {
        let (refined, refined_count) = number(
            (0..t.len()).map(|q| (class[q], t.letters().map(|x| edge(q, x, &class)).collect::<Vec<_>>())),
        );
        class = refined;
        if refined_count == count {
            return (class, count);
        }
        count = refined_count;
    }
}

#[derive(Hash, PartialEq, Eq)]
enum EdgeKey {
    Finite(Word, usize),
    Point(Extent),
}

/// Classes of ω-equivalent states (equal maps on infinite inputs), numbered
/// by first occurrence.
pub fn omega_classes(t: &Transducer) -> Result<Vec<usize>> {
    let ext = extents(t)?;
    let (class, _) = refine(t, &ext, |q, x, class| {
        let p = t.next(q, x);
        match (&ext[q], &ext[p]) {
            (Extent::Finite(own), Extent::Finite(succ)) => {
                let full = t.output(q, x).concat(succ);
                EdgeKey::Finite(full.strip_prefix(own).unwrap(), class[p])
            }
            (_, e) => EdgeKey::Point(e.prepend(t.output(q, x))),
        }
    });
    Ok(class)
}

pub fn omega_equivalent(t: &Transducer, p: usize, q: usize) -> Result<bool> {
    let class = omega_classes(t)?;
    Ok(class[p] == class[q])
}

/// The output of minimization: a minimal transducer or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimal {
    Machine(Transducer),
    Constant(ZConstant),
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub minimal: Minimal,
    /// Class of each input state, as a state index of the minimal machine.
    pub kappa: Vec<usize>,
    pub extents: Vec<Extent>,
}

fn quotient(t: &Transducer, class: &[usize], count: usize, out: impl Fn(usize, Letter) -> Word) -> Transducer {
    let mut reps = vec![usize::MAX; count];
    for (q, &c) in class.iter().enumerate() {
        if reps[c] == usize::MAX {
            reps[c] = q;
        }
    }
    let names = reps.iter().map(|&q| t.name(q).to_string()).collect();
    let mut next = Vec::with_capacity(count * t.n());
    let mut outs = Vec::with_capacity(count * t.n());
    for &q in &reps {
        for x in t.letters() {
            next.push(class[t.next(q, x)]);
            outs.push(out(q, x));
        }
    }
    Transducer::new(Automaton::new(t.n(), names, next).unwrap(), outs).unwrap()
}

/// Removes incomplete response and identifies ω-equivalent states of a
/// strongly synchronizing core transducer. Minimal states are named after
/// the first state of their class.
pub fn minimize(t: &Transducer) -> Result<Minimized> {
    t.validate()?;
    if !is_core(t.automaton())? {
        return Err(Error::NotCore);
    }
    let ext = extents(t)?;
    if let Some(root) = ext[0].root() {
        return Ok(Minimized {
            minimal: Minimal::Constant(ZConstant::new(t.n(), &root)?),
            kappa: vec![0; t.len()],
            extents: ext,
        });
    }
    let stripped = stripped_outputs(t, &ext)?;
    let n = t.n();
    let (class, count) = refine(t, &vec![(); t.len()], |q, x, class| {
        (stripped[q * n + x as usize].clone(), class[t.next(q, x)])
    });
    let machine = quotient(t, &class, count, |q, x| stripped[q * n + x as usize].clone());
    Ok(Minimized {
        minimal: Minimal::Machine(machine),
        kappa: class,
        extents: ext,
    })
}

/// Identifies states of a synchronous transducer that write the same word
/// on every input. Returns the quotient and the class of each state.
pub fn weak_minimize(t: &Transducer) -> Result<(Transducer, Vec<usize>)> {
    if !t.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    let (class, count) = refine(t, &vec![(); t.len()], |q, x, class| (t.output(q, x)[0], class[t.next(q, x)]));
    let machine = quotient(t, &class, count, |q, x| t.output(q, x).clone());
    Ok((machine, class))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::synchro::tests::five_state;
    use crate::transducer::{find_isomorphism, identity_transducer, shift_transducer, TransducerBuilder};
    use crate::words::all_words;
    use proptest::prelude::*;

    pub(crate) fn six_state() -> Transducer {
        let mut b = TransducerBuilder::new(2, &["d0", "d1", "d2", "d3", "d4", "d5"]).unwrap();
        for (p, x, q, y) in [
            ("d0", 0, "d0", 0),
            ("d0", 1, "d1", 0),
            ("d1", 0, "d3", 0),
            ("d1", 1, "d2", 0),
            ("d2", 0, "d0", 1),
            ("d2", 1, "d4", 1),
            ("d3", 0, "d5", 1),
            ("d3", 1, "d1", 1),
            ("d4", 0, "d5", 1),
            ("d4", 1, "d4", 1),
            ("d5", 0, "d0", 1),
            ("d5", 1, "d1", 1),
        ] {
            b.edge(p, x, q, [y]).unwrap();
        }
        b.build().unwrap()
    }

    /// Longest common prefix of the outputs of all words of length `depth`,
    /// together with the shortest such output.
    fn extent_by_enumeration(t: &Transducer, q: usize, depth: usize) -> (Word, usize) {
        let outs: Vec<Word> = all_words(t.n(), depth).map(|w| t.run(q, &w).1).collect();
        let reach = outs.iter().map(|w| w.len()).min().unwrap();
        let len = outs.iter().map(|w| crate::words::lcp_len(&outs[0], w)).min().unwrap().min(reach);
        (Word::from(&outs[0][..len]), reach)
    }

    #[test]
    fn six_state_extents() {
        let p = six_state();
        let lens: Vec<usize> = extents(&p).unwrap().iter().map(|e| e.finite().unwrap().len()).collect();
        assert_eq!(lens, vec![2, 2, 1, 1, 2, 2]);
    }

    #[test]
    fn six_state_minimizes_to_five_state() {
        let p = six_state();
        let m = minimize(&p).unwrap();
        let Minimal::Machine(min) = &m.minimal else { panic!() };
        assert_eq!(min.len(), 5);
        let l = five_state();
        let iso = find_isomorphism(min, 0, &l, 0).expect("isomorphic to the five-state machine");
        let image: Vec<&str> = m.kappa.iter().map(|&c| l.name(iso[c])).collect();
        assert_eq!(image, vec!["a0", "a1", "a4", "a3", "a2", "a0"]);
    }

    #[test]
    fn shift_minimizes_to_identity() {
        for n in 2..=4 {
            let s = shift_transducer(n).unwrap();
            let m = minimize(&s).unwrap();
            let Minimal::Machine(min) = &m.minimal else { panic!() };
            assert!(find_isomorphism(min, 0, &identity_transducer(n).unwrap(), 0).is_some());
            assert!(m.extents.iter().all(|e| e.finite().unwrap().len() == 1));
        }
    }

    #[test]
    fn constant_machine_is_detected() {
        // Writes 0 and 1 alternately whatever it reads.
        let aut = Automaton::new(2, vec!["p".into(), "q".into()], vec![1, 1, 0, 0]).unwrap();
        let t = Transducer::new(aut, vec![Word::from([0]), Word::from([0]), Word::from([1]), Word::from([1])]).unwrap();
        let e = extent(&t, 1).unwrap();
        assert_eq!(e, Extent::Infinite { prefix: Word::new(), period: Word::from([1, 0]) });
        assert_eq!(e.root(), Some(Word::from([0, 1])));
        assert!(big_lambda(&t, &[0], 0).is_err());
        let z = ZConstant::new(2, &[1, 0]).unwrap().to_transducer();
        let m = minimize(&z).unwrap();
        assert_eq!(m.minimal, Minimal::Constant(ZConstant::new(2, &[0, 1]).unwrap()));
    }

    #[test]
    fn removal_gives_initial_the_big_lambda() {
        let p = six_state();
        let it = remove_incomplete_response(&InitialTransducer { transducer: p.clone(), initial: 0 }).unwrap();
        let t = &it.transducer;
        assert_eq!(t.len(), 7);
        assert_eq!(t.output(6, 0), &big_lambda(&p, &[0], 0).unwrap());
        assert!(extents(t).unwrap()[..6].iter().all(|e| e == &Extent::Finite(Word::new())));
        for w in all_words(2, 5) {
            let before = big_lambda(&p, &w, 0).unwrap();
            let after = t.run(6, &w).1;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn weak_minimize_merges_equal_writers() {
        let (w, class) = weak_minimize(&six_state()).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(class, vec![0, 1, 2, 3, 4, 5]);
        let s = shift_transducer(3).unwrap();
        let doubled = crate::transducer::product_raw(&identity_transducer(3).unwrap(), &s).unwrap();
        assert_eq!(weak_minimize(&doubled).unwrap().0.len(), 3);
        assert!(weak_minimize(&five_state()).is_err());
    }

    fn random_sync(max_states: usize) -> impl Strategy<Value = Transducer> {
        (1..=max_states).prop_flat_map(|len| {
            (prop::collection::vec(0..len, 2 * len), prop::collection::vec(prop::collection::vec(0u32..2, 0..3), 2 * len))
                .prop_filter_map("degenerate", move |(next, outs)| {
                    let aut = Automaton::new(2, (0..len).map(|i| format!("s{i}")).collect(), next).ok()?;
                    let t = Transducer::new(aut, outs.into_iter().map(Word::from).collect()).ok()?;
                    t.validate().ok()?;
                    Some(t)
                })
        })
    }

    proptest! {
        #[test]
        fn extent_agrees_with_enumeration(t in random_sync(4)) {
            for q in 0..t.len() {
                let (brute, reach) = extent_by_enumeration(&t, q, 2 * t.len() + 5);
                let expected: Vec<Letter> = match extent(&t, q).unwrap() {
                    Extent::Finite(e) => e[..e.len().min(reach)].to_vec(),
                    Extent::Infinite { prefix, period } => {
                        prefix.iter().copied().chain(period.iter().copied().cycle()).take(reach).collect()
                    }
                };
                prop_assert_eq!(brute.into_vec(), expected);
            }
        }

        #[test]
        fn equivalent_states_agree_on_words(t in random_sync(4)) {
            let class = omega_classes(&t).unwrap();
            let ext = extents(&t).unwrap();
            for p in 0..t.len() {
                for q in 0..t.len() {
                    if class[p] == class[q] {
                        for w in all_words(2, 5) {
                            let (a, wa) = t.run(p, &w);
                            let (b, wb) = t.run(q, &w);
                            prop_assert_eq!(ext[a].prepend(&wa), ext[b].prepend(&wb));
                        }
                    }
                }
            }
        }
    }
}
