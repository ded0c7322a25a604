//! Finite words over `{0, .., n-1}`, rotations, and necklaces.

use std::fmt;
use std::ops::Deref;

pub type Letter = u32;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn repeat(a: Letter, len: usize) -> Self {
        Word(vec![a; len])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    /// Returns `self` with the prefix `p` removed, or `None` if `p` is not a prefix.
    pub fn strip_prefix(&self, p: &[Letter]) -> Option<Word> {
        self.0.strip_prefix(p).map(|s| Word(s.to_vec()))
    }

    pub fn is_over(&self, n: usize) -> bool {
        self.0.iter().all(|&a| (a as usize) < n)
    }

    /// Reads a word as a base-`n` numeral, first letter most significant.
    pub fn rank(&self, n: usize) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * n + a as usize)
    }

    /// Inverse of [`Word::rank`] for words of length `len`.
    pub fn unrank(mut r: usize, n: usize, len: usize) -> Word {
        let mut v = vec![0; len];
        for slot in v.iter_mut().rev() {
            *slot = (r % n) as Letter;
            r /= n;
        }
        Word(v)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl<const N: usize> From<[Letter; N]> for Word {
    fn from(v: [Letter; N]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Comma separated letters, `-` for the empty word.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Longest common prefix length.
pub fn lcp_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn least_rotation(w: &[Letter]) -> Word {
    let len = w.len();
    if len == 0 {
        return Word::new();
    }
    let mut best = 0;
    for s in 1..len {
        let better = (0..len)
            .map(|i| (w[(s + i) % len], w[(best + i) % len]))
            .find(|(a, b)| a != b)
            .is_some_and(|(a, b)| a < b);
        if better {
            best = s;
        }
    }
    (0..len).map(|i| w[(best + i) % len]).collect()
}

/// The shortest `r` with `w = r^j`.
pub fn primitive_root(w: &[Letter]) -> Word {
    let len = w.len();
    for d in 1..=len {
        if len % d == 0 && (d..len).all(|i| w[i] == w[i - d]) {
            return Word::from(&w[..d]);
        }
    }
    Word::new()
}

/// A nonempty word that is not a proper power.
pub fn is_prime_word(w: &[Letter]) -> bool {
    !w.is_empty() && primitive_root(w).len() == w.len()
}

/// Equivalence class of a prime word under rotation, stored as its least rotation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Necklace {
    word: Word,
}

impl Necklace {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.word)
    }
}

/// Necklace of the primitive root of `w`.
pub fn necklace_of(w: &[Letter]) -> Necklace {
    Necklace {
        word: least_rotation(&primitive_root(w)),
    }
}

/// All prime necklaces of length `k` over `n` letters, in lexicographic order.
///
/// Uses the Fredricksen-Kessler-Maiorana successor rule, which visits
/// Lyndon words in order.
pub fn prime_necklaces(n: usize, k: usize) -> Vec<Necklace> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let top = (n - 1) as Letter;
    let mut w: Vec<Letter> = vec![0];
    loop {
        if w.len() == k {
            out.push(Necklace {
                word: Word::from(w.clone()),
            });
        }
        let m = w.len();
        while w.len() < k {
            let a = w[w.len() - m];
            w.push(a);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(a) => *a += 1,
            None => break,
        }
    }
    out
}

fn mobius(mut d: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            d /= p;
            if d % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if d > 1 {
        mu = -mu;
    }
    mu
}

/// Number of prime necklaces of length `k` over `n` letters.
pub fn necklace_count(n: u64, k: u64) -> u128 {
    if k == 0 {
        return 0;
    }
    let mut total: i128 = 0;
    for d in (1..=k).filter(|d| k % d == 0) {
        total += mobius(d) as i128 * (n as i128).pow((k / d) as u32);
    }
    (total / k as i128) as u128
}

/// Every word of length `k` over `n` letters, in lexicographic order.
pub fn all_words(n: usize, k: usize) -> impl Iterator<Item = Word> {
    let count = n.checked_pow(k as u32).expect("word space too large");
    (0..count).map(move |r| Word::unrank(r, n, k))
}
