//! The action on bi-infinite sequences: block maps, periodic points,
//! annotated elements acting by sliding windows, and the necklace map.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::annotate::{asl_product, check_annotation, phi, AnnotatedElement};
use crate::error::{Error, Result};
use crate::monoid::MonoidElement;
use crate::synchro::sync_level;
use crate::transducer::{transducer_from_block_map, Transducer};
use crate::words::{all_words, necklace_of, prime_necklaces, primitive_root, Letter, Necklace, Word};

/// A local rule `X_n^width -> X_n`, tabulated by window rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockMap {
    n: usize,
    width: usize,
    table: Vec<Letter>,
}

impl BlockMap {
    pub fn new(n: usize, width: usize, table: Vec<Letter>) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadAlphabet(n));
        }
        let expected = n.pow(width as u32);
        if width == 0 || table.len() != expected {
            return Err(Error::BlockMapSize { n, width, expected, got: table.len() });
        }
        if let Some(&a) = table.iter().find(|&&a| a as usize >= n) {
            return Err(Error::LetterOutOfRange { letter: a, n });
        }
        Ok(BlockMap { n, width, table })
    }

    pub fn from_fn(n: usize, width: usize, f: impl Fn(&[Letter]) -> Letter) -> Result<Self> {
        let table = all_words(n, width).map(|w| f(&w)).collect();
        Self::new(n, width, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &[Letter] {
        &self.table
    }

    pub fn value_at_rank(&self, r: usize) -> Letter {
        self.table[r]
    }

    pub fn apply(&self, window: &[Letter]) -> Letter {
        assert_eq!(window.len(), self.width);
        self.table[Word::from(window).rank(self.n)]
    }

    fn permutive(&self, last: bool) -> bool {
        let k = self.width - 1;
        all_words(self.n, k).all(|u| {
            let mut seen = vec![false; self.n];
            (0..self.n as Letter).all(|a| {
                let w = if last { u.concat(&[a]) } else { Word::letter(a).concat(&u) };
                !std::mem::replace(&mut seen[self.apply(&w) as usize], true)
            })
        })
    }

    /// Whether the last letter of a window always determines the value bijectively.
    pub fn is_right_permutive(&self) -> bool {
        self.permutive(true)
    }

    pub fn is_left_permutive(&self) -> bool {
        self.permutive(false)
    }
}

/// A bi-infinite sequence with `x_i = word[i mod p]`, stored by its
/// primitive period so equal sequences compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicPoint {
    word: Word,
}

impl PeriodicPoint {
    pub fn new(w: impl Into<Word>) -> Result<Self> {
        let w = w.into();
        if w.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(PeriodicPoint { word: primitive_root(&w) })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn at(&self, i: i64) -> Letter {
        self.word[i.rem_euclid(self.word.len() as i64) as usize]
    }

    /// `σ^i`: the sequence `y_j = x_{j-i}`.
    pub fn shifted(&self, i: i64) -> PeriodicPoint {
        let p = self.word.len() as i64;
        PeriodicPoint::new((0..p).map(|j| self.at(j - i)).collect::<Word>()).unwrap()
    }
}

impl fmt::Display for PeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^Z", self.word)
    }
}

/// `y_j = f(x_{j-m+1} .. x_j)` for a block map of width `m`.
pub fn apply_block_map_periodic(f: &BlockMap, x: &PeriodicPoint) -> PeriodicPoint {
    let m = f.width() as i64;
    let p = x.period() as i64;
    let y: Word = (0..p)
        .map(|j| {
            let window: Vec<Letter> = (j - m + 1..=j).map(|i| x.at(i)).collect();
            f.apply(&window)
        })
        .collect();
    PeriodicPoint::new(y).unwrap()
}

/// `σ^i f_∞` applied to `x`.
pub fn apply_shifted_block_map(i: i64, f: &BlockMap, x: &PeriodicPoint) -> PeriodicPoint {
    apply_block_map_periodic(f, x).shifted(i)
}

/// Action of a strongly synchronizing transducer with a valid annotation:
/// reading `x_i` in the state forced by `x_{i-k} .. x_{i-1}` writes
/// `λ(x_i, q)` starting at position `i + α(q)`.
#[derive(Clone, Debug)]
pub struct Action<'a> {
    t: &'a Transducer,
    alpha: &'a [i64],
    level: usize,
}

impl<'a> Action<'a> {
    pub fn new(t: &'a Transducer, alpha: &'a [i64]) -> Result<Self> {
        check_annotation(t, alpha)?;
        Ok(Action { t, alpha, level: sync_level(t.automaton())? })
    }

    pub fn apply(&self, x: &PeriodicPoint) -> PeriodicPoint {
        let (t, k, p) = (self.t, self.level as i64, x.period() as i64);
        let context: Vec<Letter> = (-k..0).map(|i| x.at(i)).collect();
        let mut q = t.automaton().run(0, &context);
        let mut y: Vec<Option<Letter>> = vec![None; p as usize];
        for i in 0..p {
            let a = x.at(i);
            let start = i + self.alpha[q];
            for (j, &b) in t.output(q, a).iter().enumerate() {
                let slot = &mut y[(start + j as i64).rem_euclid(p) as usize];
                assert!(slot.is_none(), "annotation does not tile the output");
                *slot = Some(b);
            }
            q = t.next(q, a);
        }
        PeriodicPoint::new(y.into_iter().map(|b| b.expect("annotation does not tile the output")).collect::<Word>()).unwrap()
    }
}

pub fn act_with_annotation(t: &Transducer, alpha: &[i64], x: &PeriodicPoint) -> Result<PeriodicPoint> {
    Ok(Action::new(t, alpha)?.apply(x))
}

pub fn act_periodic(e: &AnnotatedElement, x: &PeriodicPoint) -> Result<PeriodicPoint> {
    match (e.element(), e.values()) {
        (MonoidElement::Machine(t), Some(alpha)) => act_with_annotation(t, alpha, x),
        (MonoidElement::Constant(z), _) => PeriodicPoint::new(z.root().clone()),
        _ => unreachable!("annotated machines carry values"),
    }
}

/// Context an element needs around an output position: letters to the
/// left and to the right of the input at the same position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reach {
    pub left: usize,
    pub right: usize,
}

pub fn reach(e: &AnnotatedElement) -> Result<Reach> {
    match (e.element(), e.values()) {
        (MonoidElement::Machine(t), Some(alpha)) => {
            let k = sync_level(t.automaton())? as i64;
            let (lo, hi) = (*alpha.iter().min().unwrap(), *alpha.iter().max().unwrap());
            Ok(Reach {
                left: (k + hi).max(0) as usize,
                right: (-lo).max(0) as usize,
            })
        }
        _ => Ok(Reach { left: 0, right: 0 }),
    }
}

/// Output letters at the positions of `center`, given the input letters
/// `left`, `center`, `right` in a row.
pub fn act_window(e: &AnnotatedElement, left: &[Letter], center: &[Letter], right: &[Letter]) -> Result<Word> {
    let r = reach(e)?;
    if left.len() < r.left || right.len() < r.right {
        return Err(Error::InsufficientContext { left: r.left, right: r.right });
    }
    let (t, alpha) = match (e.element(), e.values()) {
        (MonoidElement::Machine(t), Some(alpha)) => (t, alpha),
        (MonoidElement::Constant(z), _) => return Ok(Word::repeat(z.root()[0], center.len())),
        _ => unreachable!("annotated machines carry values"),
    };
    let block: Vec<Letter> = left.iter().chain(center).chain(right).copied().collect();
    let k = sync_level(t.automaton())?;
    let lo = left.len() as i64;
    let hi = lo + center.len() as i64;
    let mut y: Vec<Option<Letter>> = vec![None; center.len()];
    let mut q = t.automaton().run(0, &block[..k]);
    for (i, &a) in block.iter().enumerate().skip(k) {
        let start = i as i64 + alpha[q];
        for (j, &b) in t.output(q, a).iter().enumerate() {
            let pos = start + j as i64;
            if (lo..hi).contains(&pos) {
                y[(pos - lo) as usize] = Some(b);
            }
        }
        q = t.next(q, a);
    }
    Ok(y.into_iter().map(|b| b.expect("reach covers every center position")).collect())
}

/// A shift `i` and block map `f` with `σ^i f_∞` acting like `e`.
pub fn to_block_map(e: &AnnotatedElement) -> Result<(i64, BlockMap)> {
    let r = reach(e)?;
    let width = r.left + r.right + 1;
    let f = BlockMap::from_fn(e.n(), width, |w| {
        act_window(e, &w[..r.left], &w[r.left..=r.left], &w[r.left + 1..]).unwrap()[0]
    })?;
    Ok((-(r.right as i64), f))
}

/// Looks for `σ^j g_∞` inverting `e`, trying windows of width
/// `1..=dmax`, and certifies it by multiplying both ways.
pub fn invert_automorphism(e: &AnnotatedElement, dmax: usize) -> Result<AnnotatedElement> {
    if matches!(e.element(), MonoidElement::Constant(_)) {
        return Err(Error::ConstantElement);
    }
    let n = e.n();
    let r = reach(e)?;
    let identity = AnnotatedElement::identity(n)?;
    for w in 1..=dmax {
        let len = r.left + w + r.right;
        // Each input block gives an output window and the letters under it.
        let samples: Vec<(usize, Word)> = all_words(n, len)
            .map(|block| {
                let out = act_window(e, &block[..r.left], &block[r.left..r.left + w], &block[r.left + w..]).unwrap();
                (out.rank(n), block)
            })
            .collect();
        // Window ends at block position r.left + w - 1; input at offset s behind it.
        let end = (r.left + w - 1) as i64;
        for s in (end - len as i64 + 1)..=end {
            let pos = (end - s) as usize;
            let mut table: Vec<Option<Letter>> = vec![None; n.pow(w as u32)];
            let consistent = samples.iter().all(|(rank, block)| {
                let want = block[pos];
                *table[*rank].get_or_insert(want) == want
            });
            if !consistent {
                continue;
            }
            let g = BlockMap::new(n, w, table.into_iter().map(|a| a.unwrap_or(0)).collect())?;
            let inverse = phi(-s, &transducer_from_block_map(&g)?)?;
            if asl_product(e, &inverse)? == identity && asl_product(&inverse, e)? == identity {
                return Ok(inverse);
            }
        }
    }
    Err(Error::InverseNotFound(dmax))
}

/// The necklace of what `e` writes around the loop labelled by the prime word `g`.
pub fn pi_word(e: &MonoidElement, g: &[Letter]) -> Result<Necklace> {
    if g.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    match e {
        MonoidElement::Constant(z) => Ok(necklace_of(z.root())),
        MonoidElement::Machine(t) => {
            let k = sync_level(t.automaton())?;
            let reps = k.div_ceil(g.len()).max(1);
            let power: Vec<Letter> = g.iter().copied().cycle().take(reps * g.len()).collect();
            let q = t.automaton().run(0, &power);
            let (back, out) = t.run(q, g);
            assert_eq!(back, q, "a forced state returns to itself around the loop");
            Ok(necklace_of(&out))
        }
    }
}

pub fn pi_table(e: &MonoidElement, k: usize) -> Result<BTreeMap<Necklace, Necklace>> {
    prime_necklaces(e.n(), k).into_iter().map(|c| Ok((c.clone(), pi_word(e, c.word())?))).collect()
}

/// Whether the necklace map permutes the prime necklaces of each length up to `k`.
pub fn pi_bijective_upto(e: &MonoidElement, k: usize) -> Result<bool> {
    let mut images = BTreeSet::new();
    for len in 1..=k {
        for (_, image) in pi_table(e, len)? {
            if image.len() > k || !images.insert(image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::tests::five_state_element;
    use crate::annotate::{asl_product_all, AnnotatedElement};
    use crate::minimize::tests::six_state;
    use crate::monoid::m_product;
    use crate::transducer::ZConstant;
    use proptest::prelude::*;

    fn points(n: usize, max_period: usize) -> Vec<PeriodicPoint> {
        (1..=max_period).flat_map(|p| all_words(n, p)).map(|w| PeriodicPoint::new(w).unwrap()).collect()
    }

    #[test]
    fn periodic_points_normalize() {
        let a = PeriodicPoint::new(vec![0, 1, 0, 1]).unwrap();
        assert_eq!(a, PeriodicPoint::new(vec![0, 1]).unwrap());
        assert_ne!(a, PeriodicPoint::new(vec![1, 0]).unwrap());
        assert_eq!(a.shifted(1), PeriodicPoint::new(vec![1, 0]).unwrap());
    }

    #[test]
    fn shift_element_acts_as_shift() {
        let s = AnnotatedElement::shift(3).unwrap();
        for x in points(3, 4) {
            assert_eq!(act_periodic(&s, &x).unwrap(), x.shifted(1));
        }
    }

    #[test]
    fn six_state_action_matches_its_block_map() {
        let p = six_state();
        let e = phi(0, &p).unwrap();
        assert_eq!(e.element(), five_state_element().element());
        for x in points(2, 6) {
            let direct = act_with_annotation(&p, &[0; 6], &x).unwrap();
            assert_eq!(act_periodic(&e, &x).unwrap(), direct);
        }
    }

    #[test]
    fn window_needs_context() {
        let l = five_state_element();
        assert_eq!(reach(&l).unwrap(), Reach { left: 3, right: 1 });
        assert!(matches!(act_window(&l, &[0, 0], &[1], &[0]), Err(Error::InsufficientContext { .. })));
        let (i, f) = to_block_map(&l).unwrap();
        assert_eq!((i, f.width()), (-1, 5));
        for x in points(2, 6) {
            assert_eq!(apply_shifted_block_map(i, &f, &x), act_periodic(&l, &x).unwrap());
        }
    }

    #[test]
    fn five_state_inverse() {
        let l = five_state_element();
        let inv = invert_automorphism(&l, 6).unwrap();
        let id = AnnotatedElement::identity(2).unwrap();
        assert_eq!(asl_product(&l, &inv).unwrap(), id);
        assert_eq!(asl_product(&inv, &l).unwrap(), id);
    }

    #[test]
    fn non_invertible_is_reported() {
        let f = BlockMap::from_fn(2, 2, |w| w[0] ^ w[1]).unwrap();
        let e = phi(0, &transducer_from_block_map(&f).unwrap()).unwrap();
        assert_eq!(invert_automorphism(&e, 3), Err(Error::InverseNotFound(3)));
    }

    #[test]
    fn permutivity() {
        let f = BlockMap::from_fn(2, 2, |w| w[0] ^ w[1]).unwrap();
        assert!(f.is_right_permutive() && f.is_left_permutive());
        let g = BlockMap::from_fn(2, 2, |w| w[0] & w[1]).unwrap();
        assert!(!g.is_right_permutive());
    }

    #[test]
    fn pi_of_constant_and_identity() {
        let z0 = MonoidElement::Constant(ZConstant::new(2, &[0]).unwrap());
        assert!(!pi_bijective_upto(&z0, 1).unwrap());
        let id = MonoidElement::identity(3).unwrap();
        for (c, image) in pi_table(&id, 4).unwrap() {
            assert_eq!(c, image);
        }
        let l = five_state_element();
        assert!(pi_bijective_upto(l.element(), 6).unwrap());
    }

    fn generator(n: usize) -> impl Strategy<Value = AnnotatedElement> {
        let perms: Vec<Vec<Letter>> = if n == 2 { vec![vec![1, 0]] } else { vec![vec![1, 2, 0], vec![1, 0, 2]] };
        prop_oneof![
            Just(AnnotatedElement::shift(n).unwrap()),
            Just(AnnotatedElement::shift_inverse(n).unwrap()),
            prop::sample::select(perms).prop_map(|p| AnnotatedElement::permutation(&p).unwrap()),
        ]
    }

    fn word_of(n: usize) -> impl Strategy<Value = Vec<AnnotatedElement>> {
        prop::collection::vec(generator(n), 1..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn product_acts_in_order(a in word_of(2), b in word_of(2)) {
            let mut a = a;
            a.push(five_state_element());
            let (ea, eb) = (asl_product_all(&a).unwrap(), asl_product_all(&b).unwrap());
            let ab = asl_product(&ea, &eb).unwrap();
            for x in points(2, 5) {
                let stepwise = act_periodic(&eb, &act_periodic(&ea, &x).unwrap()).unwrap();
                prop_assert_eq!(act_periodic(&ab, &x).unwrap(), stepwise);
            }
        }

        #[test]
        fn pi_is_multiplicative(a in word_of(3), b in word_of(3)) {
            let (ea, eb) = (asl_product_all(&a).unwrap(), asl_product_all(&b).unwrap());
            let ab = m_product(ea.element(), eb.element()).unwrap();
            for k in 1..=4 {
                for c in prime_necklaces(3, k) {
                    let via = pi_word(eb.element(), pi_word(ea.element(), c.word()).unwrap().word()).unwrap();
                    prop_assert_eq!(pi_word(&ab, c.word()).unwrap(), via);
                }
            }
        }

        #[test]
        fn block_map_round_trip(i in -2i64..3, table in prop::collection::vec(0u32..2, 8)) {
            let f = BlockMap::new(2, 3, table).unwrap();
            let e = phi(i, &transducer_from_block_map(&f).unwrap()).unwrap();
            let (j, g) = to_block_map(&e).unwrap();
            prop_assert_eq!(&phi(j, &transducer_from_block_map(&g).unwrap()).unwrap(), &e);
            for x in points(2, 6) {
                let want = apply_shifted_block_map(i, &f, &x);
                prop_assert_eq!(act_periodic(&e, &x).unwrap(), want.clone());
                prop_assert_eq!(apply_shifted_block_map(j, &g, &x), want);
            }
        }
    }
}
