//! Minimal transducers as monoid elements, their products, and the
//! invariants that separate the submonoids.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::minimize::{minimize, weak_minimize, Extent, Minimal};
use crate::synchro::{core, loop_state};
use crate::transducer::{identity_transducer, product_raw, Transducer, ZConstant};
use crate::words::{Letter, Word};

/// A minimal strongly synchronizing core transducer, or a constant.
///
/// Machines are stored with states in breadth-first order from the state
/// forced by `0^k`, so equal elements have equal tables.
#[derive(Clone, Debug)]
pub enum MonoidElement {
    Machine(Transducer),
    Constant(ZConstant),
}

impl PartialEq for MonoidElement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MonoidElement::Machine(a), MonoidElement::Machine(b)) => a.same_tables(b),
            (MonoidElement::Constant(a), MonoidElement::Constant(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for MonoidElement {}

/// Puts a strongly synchronizing core machine in canonical state order.
/// Returns the machine and the new index of every old state.
fn canonical_order(t: &Transducer) -> Result<(Transducer, Vec<usize>)> {
    let start = loop_state(t.automaton(), 0)?;
    let order = t.bfs_order(start);
    if order.len() != t.len() {
        return Err(Error::NotCore);
    }
    let mut position = vec![0; t.len()];
    for (i, &q) in order.iter().enumerate() {
        position[q] = i;
    }
    Ok((t.permuted(&order), position))
}

/// An element together with the map from the states it came from.
pub(crate) struct Reduction {
    pub element: MonoidElement,
    pub kappa: Vec<usize>,
    pub extents: Vec<Extent>,
}

/// Minimizes a strongly synchronizing core transducer into canonical form.
pub(crate) fn reduce(t: &Transducer) -> Result<Reduction> {
    let m = minimize(t)?;
    match m.minimal {
        Minimal::Constant(z) => Ok(Reduction {
            element: MonoidElement::Constant(z),
            kappa: m.kappa,
            extents: m.extents,
        }),
        Minimal::Machine(machine) => {
            let (machine, position) = canonical_order(&machine)?;
            Ok(Reduction {
                element: MonoidElement::Machine(machine),
                kappa: m.kappa.iter().map(|&c| position[c]).collect(),
                extents: m.extents,
            })
        }
    }
}

fn renumbered(t: &Transducer) -> Transducer {
    t.renamed((0..t.len()).map(|i| format!("q{i}")).collect()).expect("fresh names are unique")
}

impl MonoidElement {
    /// The element a strongly synchronizing transducer represents: its core,
    /// minimized.
    pub fn from_transducer(t: &Transducer) -> Result<Self> {
        t.validate()?;
        Ok(reduce(&core(t)?)?.element)
    }

    /// Accepts `t` only if it is already minimal (core, no incomplete
    /// response, no two equivalent states). State names are kept.
    pub fn from_minimal(t: &Transducer) -> Result<Self> {
        t.validate()?;
        if core(t)?.len() != t.len() {
            return Err(Error::NotCore);
        }
        let r = reduce(t)?;
        match r.element {
            MonoidElement::Machine(m) if m.len() == t.len() && r.extents.iter().all(|e| e.finite().is_some_and(|w| w.is_empty())) => {
                Ok(MonoidElement::Machine(m))
            }
            MonoidElement::Constant(z) if t.len() == 1 && t.output(0, 0) == z.root() && t.is_synchronous() == (z.root().len() == 1) => {
                Ok(MonoidElement::Constant(z))
            }
            _ => Err(Error::NotMinimal),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_transducer(&identity_transducer(n)?)
    }

    pub fn n(&self) -> usize {
        match self {
            MonoidElement::Machine(t) => t.n(),
            MonoidElement::Constant(z) => z.n(),
        }
    }

    pub fn machine(&self) -> Option<&Transducer> {
        match self {
            MonoidElement::Machine(t) => Some(t),
            MonoidElement::Constant(_) => None,
        }
    }

    /// The element as a transducer; a constant becomes a one-state machine.
    pub fn to_transducer(&self) -> Transducer {
        match self {
            MonoidElement::Machine(t) => t.clone(),
            MonoidElement::Constant(z) => z.to_transducer(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MonoidElement::Machine(t) => t.len(),
            MonoidElement::Constant(_) => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_identity(&self) -> bool {
        match self {
            MonoidElement::Machine(t) => t.len() == 1 && t.letters().all(|x| t.output(0, x).letters() == [x]),
            MonoidElement::Constant(_) => false,
        }
    }
}

/// Product in the monoid of minimal transducers: `a` then `b`.
pub fn m_product(a: &MonoidElement, b: &MonoidElement) -> Result<MonoidElement> {
    let p = product_raw(&a.to_transducer(), &b.to_transducer())?;
    Ok(match reduce(&core(&p)?)?.element {
        MonoidElement::Machine(t) => MonoidElement::Machine(renumbered(&t)),
        constant => constant,
    })
}

/// Product of synchronous strongly synchronizing transducers, reduced only
/// by merging states that write the same words.
pub fn spn_product(p: &Transducer, r: &Transducer) -> Result<Transducer> {
    if !p.is_synchronous() || !r.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    let prod = core(&product_raw(p, r)?)?;
    Ok(renumbered(&weak_minimize(&prod)?.0))
}

/// Smallest `m <= bound` with `e^m` the identity.
pub fn order_bounded(e: &MonoidElement, bound: usize) -> Result<Option<usize>> {
    let mut power = e.clone();
    for m in 1..=bound {
        if power.is_identity() {
            return Ok(Some(m));
        }
        power = m_product(&power, e)?;
    }
    Ok(None)
}

/// An integer `ψ` with `ψ(π(x, q)) = ψ(q) + |λ(x, q)| - 1` on every edge,
/// zero at `start`, if the states reachable from `start` admit one.
pub fn potential(t: &Transducer, start: usize) -> Result<Vec<Option<i64>>> {
    let mut psi = vec![None; t.len()];
    psi[start] = Some(0);
    let mut stack = vec![start];
    while let Some(q) = stack.pop() {
        let here = psi[q].unwrap();
        for x in t.letters() {
            let p = t.next(q, x);
            let want = here + t.output(q, x).len() as i64 - 1;
            match psi[p] {
                None => {
                    psi[p] = Some(want);
                    stack.push(p);
                }
                Some(v) if v != want => return Err(Error::NotLipschitz { state: t.name(p).to_string() }),
                Some(_) => {}
            }
        }
    }
    Ok(psi)
}

/// Whether the element lies in the Lipschitz submonoid: a constant onto a
/// single letter, or a machine whose circuits all have equal input and
/// output length.
pub fn is_lipschitz(e: &MonoidElement) -> bool {
    match e {
        MonoidElement::Constant(z) => z.root().len() == 1,
        MonoidElement::Machine(t) => potential(t, 0).is_ok(),
    }
}

/// Whether `n` is not a proper power.
pub fn splits(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for k in 2..64u32 {
        let root = (n as f64).powf(1.0 / k as f64).round() as u64;
        if root < 2 {
            break;
        }
        for r in root.saturating_sub(1)..=root + 1 {
            if r >= 2 && r.checked_pow(k) == Some(n) {
                return false;
            }
        }
    }
    true
}

/// Pairs of states from which two inputs can keep writing the same thing
/// forever, by repeatedly discarding pairs without a surviving successor.
fn infinite_agreement(t: &Transducer) -> Vec<bool> {
    let len = t.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); len * len];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); len * len];
    for p in 0..len {
        for q in 0..len {
            for x in t.letters() {
                for y in t.letters() {
                    if t.output(p, x) == t.output(q, y) {
                        let to = t.next(p, x) * len + t.next(q, y);
                        succ[p * len + q].push(to);
                        pred[to].push(p * len + q);
                    }
                }
            }
        }
    }
    let mut alive = vec![true; len * len];
    let mut count: Vec<usize> = succ.iter().map(|s| s.len()).collect();
    let mut dead: Vec<usize> = (0..len * len).filter(|&i| count[i] == 0).collect();
    for &i in &dead {
        alive[i] = false;
    }
    while let Some(i) = dead.pop() {
        for &j in &pred[i] {
            if alive[j] {
                count[j] -= 1;
                if count[j] == 0 {
                    alive[j] = false;
                    dead.push(j);
                }
            }
        }
    }
    alive
}

/// Whether every state of a synchronous transducer is injective on
/// infinite inputs.
pub fn states_injective(t: &Transducer) -> Result<bool> {
    Ok(first_non_injective(t)?.is_none())
}

fn first_non_injective(t: &Transducer) -> Result<Option<usize>> {
    if !t.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    let alive = infinite_agreement(t);
    let len = t.len();
    for s in 0..len {
        for x in t.letters() {
            for y in t.letters().filter(|&y| y > x) {
                if t.output(s, x) == t.output(s, y) && alive[t.next(s, x) * len + t.next(s, y)] {
                    return Ok(Some(s));
                }
            }
        }
    }
    Ok(None)
}

/// The maximal cylinders `[ν]` inside the image of state `q`, or `None`
/// if the image is not open.
pub fn image_basis(t: &Transducer, q: usize) -> Result<Option<Vec<Word>>> {
    if !t.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    // Subset construction on output letters.
    let mut sets: Vec<Vec<usize>> = vec![vec![q]];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(vec![q], 0)]);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = Vec::with_capacity(t.n());
        for b in t.letters() {
            let mut s: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&p| t.letters().filter(move |&x| t.output(p, x)[0] == b).map(move |x| (p, x)))
                .map(|(p, x)| t.next(p, x))
                .collect();
            s.sort_unstable();
            s.dedup();
            let id = *index.entry(s.clone()).or_insert_with(|| {
                sets.push(s);
                sets.len() - 1
            });
            row.push(id);
        }
        edges.push(row);
        i += 1;
    }
    // A set covers everything exactly when it cannot reach the empty set.
    let empty = index.get(&Vec::new()).copied();
    let mut reaches_empty = vec![false; sets.len()];
    if let Some(e) = empty {
        reaches_empty[e] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..sets.len() {
                if !reaches_empty[s] && edges[s].iter().any(|&d| reaches_empty[d]) {
                    reaches_empty[s] = true;
                    changed = true;
                }
            }
        }
    }
    let full = |s: usize| !reaches_empty[s];
    let partial = |s: usize| Some(s) != empty && !full(s);
    // Open exactly when the partial sets carry no cycle.
    let mut colour = vec![0u8; sets.len()];
    fn has_cycle(s: usize, edges: &[Vec<usize>], partial: &dyn Fn(usize) -> bool, colour: &mut [u8]) -> bool {
        colour[s] = 1;
        for &d in &edges[s] {
            if partial(d) && (colour[d] == 1 || (colour[d] == 0 && has_cycle(d, edges, partial, colour))) {
                return true;
            }
        }
        colour[s] = 2;
        false
    }
    if partial(0) && has_cycle(0, &edges, &partial, &mut colour) {
        return Ok(None);
    }
    let mut basis = Vec::new();
    let mut stack = vec![(0usize, Word::new())];
    while let Some((s, nu)) = stack.pop() {
        if full(s) {
            basis.push(nu);
        } else if partial(s) {
            for b in t.letters() {
                stack.push((edges[s][b as usize], nu.concat(&[b])));
            }
        }
    }
    basis.sort();
    Ok(Some(basis))
}

/// `m` reduced mod `n - 1` into `{1, .., n-1}`.
pub fn residue(m: u64, n: u64) -> u64 {
    let r = m % (n - 1);
    if r == 0 {
        n - 1
    } else {
        r
    }
}

/// Number of maximal cylinders in the image of each state, as a residue.
pub fn state_sigs(t: &Transducer) -> Result<Vec<u64>> {
    if let Some(s) = first_non_injective(t)? {
        return Err(Error::NotInjective { state: t.name(s).to_string() });
    }
    (0..t.len())
        .map(|q| match image_basis(t, q)? {
            Some(b) => Ok(residue(b.len() as u64, t.n() as u64)),
            None => Err(Error::NotClopen { state: t.name(q).to_string() }),
        })
        .collect()
}

/// The signature residue of a synchronous transducer whose states are
/// injective with clopen image.
pub fn sig(t: &Transducer) -> Result<u64> {
    Ok(state_sigs(t)?[0])
}

/// Subgroup of units mod `n - 1` generated by the divisors of `n`.
pub fn divisor_subgroup(n: u64) -> BTreeSet<u64> {
    assert!(n >= 2, "alphabet size must be at least 2");
    let gens: Vec<u64> = (1..=n).filter(|d| n % d == 0).map(|d| residue(d, n)).collect();
    let mut group = BTreeSet::from([residue(1, n)]);
    let mut frontier = vec![residue(1, n)];
    while let Some(g) = frontier.pop() {
        for &d in &gens {
            let h = residue(g * d, n);
            if group.insert(h) {
                frontier.push(h);
            }
        }
    }
    group
}

/// Whether `s * r = r` mod `n - 1`.
pub fn stabilizer_check(s: u64, r: u64, n: u64) -> bool {
    residue(s * r, n) == residue(r, n)
}

/// Images of the letters under a one-state synchronous machine, if it is one.
pub fn letter_permutation(e: &MonoidElement) -> Option<Vec<Letter>> {
    let t = e.machine()?;
    (t.len() == 1 && t.is_synchronous()).then(|| t.letters().map(|x| t.output(0, x)[0]).collect())
}
