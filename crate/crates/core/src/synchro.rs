//! Strong synchronization, forced states, and cores.

use crate::error::{Error, Result};
use crate::transducer::{Automaton, Transducer};
use crate::words::{all_words, Letter, Word};

/// Witness that every word of length `level` forces a unique state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyncCertificate {
    level: usize,
}

impl SyncCertificate {
    pub fn level(&self) -> usize {
        self.level
    }

    /// State reached after reading the last `level` letters of `w` from anywhere.
    pub fn forced_state(&self, aut: &Automaton, w: &[Letter]) -> usize {
        assert!(w.len() >= self.level, "word shorter than the synchronizing level");
        aut.run(0, &w[w.len() - self.level..])
    }

    /// Forced state of every word of length `level`, indexed by rank.
    pub fn forced_map(&self, aut: &Automaton) -> Vec<usize> {
        all_words(aut.n(), self.level).map(|w| aut.run(0, &w)).collect()
    }
}

/// Smallest `k` such that every word of length `k` sends all states to one.
///
/// A set of states is collapsed by `w` exactly when every pair in it is, so
/// the level is the longest path in the graph of unequal pairs, plus one.
/// A cycle in that graph means some pair is never collapsed.
pub fn sync_level(aut: &Automaton) -> Result<usize> {
    let len = aut.len();
    let n = aut.n();
    let key = |p: usize, q: usize| if p < q { p * len + q } else { q * len + p };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; len * len];
    let mut height = vec![0u32; len * len];
    let mut best = 0;
    for p0 in 0..len {
        for q0 in p0 + 1..len {
            if state[key(p0, q0)] == 2 {
                continue;
            }
            let mut stack: Vec<(usize, usize, usize)> = vec![(p0, q0, 0)];
            state[key(p0, q0)] = 1;
            while let Some(top) = stack.last_mut() {
                let (p, q, x) = *top;
                if x == n {
                    stack.pop();
                    let k = key(p, q);
                    state[k] = 2;
                    best = best.max(height[k]);
                    if let Some(&(pp, qq, _)) = stack.last() {
                        let kp = key(pp, qq);
                        height[kp] = height[kp].max(height[k] + 1);
                    }
                    continue;
                }
                top.2 += 1;
                let (pt, qt) = (aut.next(p, x as Letter), aut.next(q, x as Letter));
                let k = key(p, q);
                if pt == qt {
                    height[k] = height[k].max(1);
                    continue;
                }
                let kt = key(pt, qt);
                match state[kt] {
                    0 => {
                        state[kt] = 1;
                        stack.push((pt, qt, 0));
                    }
                    1 => return Err(Error::NotSynchronizing),
                    _ => height[k] = height[k].max(height[kt] + 1),
                }
            }
        }
    }
    Ok(best as usize)
}

pub fn certificate(aut: &Automaton) -> Result<SyncCertificate> {
    sync_level(aut).map(|level| SyncCertificate { level })
}

pub fn is_strongly_synchronizing(aut: &Automaton) -> bool {
    sync_level(aut).is_ok()
}

/// States forced by some word of the synchronizing length, sorted.
pub fn core_states(aut: &Automaton) -> Result<Vec<usize>> {
    let level = sync_level(aut)?;
    let mut states: Vec<usize> = (0..aut.len()).collect();
    for _ in 0..level {
        states = aut.image(&states);
    }
    Ok(states)
}

/// Restriction of a strongly synchronizing transducer to its core.
pub fn core(t: &Transducer) -> Result<Transducer> {
    let states = core_states(t.automaton())?;
    Ok(t.restrict(&states).0)
}

pub fn is_core(aut: &Automaton) -> Result<bool> {
    Ok(core_states(aut)?.len() == aut.len())
}

/// The state forced by `a^k`, which carries a loop labelled `a`.
pub fn loop_state(aut: &Automaton, a: Letter) -> Result<usize> {
    let cert = certificate(aut)?;
    Ok(cert.forced_state(aut, &Word::repeat(a, cert.level())))
}
