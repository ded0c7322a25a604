//! Annotated elements: a Lipschitz machine with an integer offset per state,
//! or a constant with offset `∞`.

use std::fmt;

use crate::error::{Error, Result};
use crate::monoid::{m_product, potential, reduce, MonoidElement};
use crate::synchro::{core, loop_state};
use crate::transducer::{identity_transducer, permutation_transducer, product_raw, shift_transducer, Transducer, ZConstant};
use crate::words::Letter;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Annotation {
    Values(Vec<i64>),
    Infinite,
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Infinite => f.write_str("inf"),
            Annotation::Values(v) => {
                let parts: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// Checks `α(π(x, q)) = α(q) + |λ(x, q)| - 1` on every edge.
pub fn check_annotation(t: &Transducer, alpha: &[i64]) -> Result<()> {
    if alpha.len() != t.len() {
        return Err(Error::AnnotationLength { expected: t.len(), got: alpha.len() });
    }
    for q in 0..t.len() {
        for x in t.letters() {
            if alpha[t.next(q, x)] != alpha[q] + t.output(q, x).len() as i64 - 1 {
                return Err(Error::BadAnnotation { state: t.name(q).to_string(), letter: x });
            }
        }
    }
    Ok(())
}

/// The annotation vanishing at state `start`. Every state must be
/// reachable from `start`.
pub fn annotation_zero_at(t: &Transducer, start: usize) -> Result<Vec<i64>> {
    potential(t, start)?.into_iter().map(|v| v.ok_or(Error::NotCore)).collect()
}

/// The annotation vanishing at the state forced by `a^k`, the state with a
/// loop labelled `a`.
pub fn loop_annotation(t: &Transducer, a: Letter) -> Result<Vec<i64>> {
    annotation_zero_at(t, loop_state(t.automaton(), a)?)
}

/// The annotation vanishing at the state with a `0`-loop.
pub fn zero_loop_annotation(t: &Transducer) -> Result<Vec<i64>> {
    loop_annotation(t, 0)
}

/// The annotation vanishing at the state forced by the least word of the
/// synchronizing length. That word is `0^k`, so this is the `0`-loop
/// annotation.
pub fn canonical_annotation(t: &Transducer) -> Result<Vec<i64>> {
    zero_loop_annotation(t)
}

/// A monoid element with a compatible annotation. Machines are in the
/// canonical order of [`MonoidElement`], so derived equality is equality of
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedElement {
    element: MonoidElement,
    annotation: Annotation,
}

impl AnnotatedElement {
    /// Pairs an element with an annotation. Machines need a valid integer
    /// annotation; constants need `∞` and a one-letter root.
    pub fn new(element: MonoidElement, annotation: Annotation) -> Result<Self> {
        match (&element, &annotation) {
            (MonoidElement::Machine(t), Annotation::Values(a)) => check_annotation(t, a)?,
            (MonoidElement::Constant(z), Annotation::Infinite) if z.root().len() == 1 => {}
            (MonoidElement::Constant(_), Annotation::Infinite) => {
                return Err(Error::NotLipschitz { state: "z".to_string() })
            }
            (MonoidElement::Machine(t), Annotation::Infinite) => {
                return Err(Error::BadAnnotation { state: t.name(0).to_string(), letter: 0 })
            }
            (MonoidElement::Constant(_), Annotation::Values(_)) => return Err(Error::ConstantElement),
        }
        Ok(AnnotatedElement { element, annotation })
    }

    /// The element represented by any strongly synchronizing transducer `t`
    /// carrying a valid annotation `beta`: minimize, and give each minimal
    /// state `β(q) + |Λ(ε, q)|` for any `q` in its class.
    pub fn from_transducer(t: &Transducer, beta: &[i64]) -> Result<Self> {
        check_annotation(t, beta)?;
        t.validate()?;
        let c = core(t)?;
        let beta: Vec<i64> = c.names().iter().map(|name| beta[t.index_of(name).unwrap()]).collect();
        let r = reduce(&c)?;
        match r.element {
            MonoidElement::Constant(z) => Self::new(MonoidElement::Constant(z), Annotation::Infinite),
            MonoidElement::Machine(m) => {
                let mut alpha = vec![None; m.len()];
                for (q, &k) in r.kappa.iter().enumerate() {
                    let v = beta[q] + r.extents[q].finite().unwrap().len() as i64;
                    match alpha[k] {
                        None => alpha[k] = Some(v),
                        Some(u) => assert_eq!(u, v, "annotation disagrees inside an equivalence class"),
                    }
                }
                let alpha = alpha.into_iter().map(Option::unwrap).collect();
                Self::new(MonoidElement::Machine(m), Annotation::Values(alpha))
            }
        }
    }

    /// A minimal machine with its canonical annotation shifted by `offset`.
    pub fn with_offset(element: MonoidElement, offset: i64) -> Result<Self> {
        match &element {
            MonoidElement::Machine(t) => {
                let alpha = canonical_annotation(t)?.into_iter().map(|a| a + offset).collect();
                Self::new(element, Annotation::Values(alpha))
            }
            MonoidElement::Constant(_) => Self::new(element, Annotation::Infinite),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_transducer(&identity_transducer(n)?, &[0])
    }

    /// The shift `(1, +1)`: writes `x_{i-1}` at position `i`.
    pub fn shift(n: usize) -> Result<Self> {
        Self::with_offset(MonoidElement::identity(n)?, 1)
    }

    /// `(1, -1)`, the inverse of [`AnnotatedElement::shift`].
    pub fn shift_inverse(n: usize) -> Result<Self> {
        Self::with_offset(MonoidElement::identity(n)?, -1)
    }

    /// The letter permutation `x -> perm[x]` with offset zero.
    pub fn permutation(perm: &[Letter]) -> Result<Self> {
        Self::from_transducer(&permutation_transducer(perm)?, &[0])
    }

    pub fn constant(n: usize, a: Letter) -> Result<Self> {
        Self::new(MonoidElement::Constant(ZConstant::new(n, &[a])?), Annotation::Infinite)
    }

    pub fn element(&self) -> &MonoidElement {
        &self.element
    }

    pub fn annotation(&self) -> &Annotation {
        &self.annotation
    }

    pub fn values(&self) -> Option<&[i64]> {
        match &self.annotation {
            Annotation::Values(v) => Some(v),
            Annotation::Infinite => None,
        }
    }

    pub fn n(&self) -> usize {
        self.element.n()
    }

    pub fn is_identity(&self) -> bool {
        self.element.is_identity() && self.values() == Some(&[0])
    }
}

/// `([P], i + |Λ(ε, q)|)` for a synchronous strongly synchronizing `P`.
pub fn annotation_from_extents(p: &Transducer, i: i64) -> Result<AnnotatedElement> {
    if !p.is_synchronous() {
        return Err(Error::NotSynchronous);
    }
    AnnotatedElement::from_transducer(p, &vec![i; p.len()])
}

/// The embedding of `σ^i f_P` into the annotated monoid.
pub fn phi(i: i64, p: &Transducer) -> Result<AnnotatedElement> {
    annotation_from_extents(p, i)
}

/// Product of annotated elements: `a` then `b`.
pub fn asl_product(a: &AnnotatedElement, b: &AnnotatedElement) -> Result<AnnotatedElement> {
    match (&a.annotation, &b.annotation) {
        (Annotation::Values(alpha), Annotation::Values(beta)) => {
            let (l, m) = (a.element.to_transducer(), b.element.to_transducer());
            let prod = product_raw(&l, &m)?;
            let ann: Vec<i64> = (0..prod.len()).map(|s| alpha[s / m.len()] + beta[s % m.len()]).collect();
            AnnotatedElement::from_transducer(&prod, &ann)
        }
        _ => AnnotatedElement::new(m_product(&a.element, &b.element)?, Annotation::Infinite),
    }
}

/// Left-to-right product of a nonempty sequence.
pub fn asl_product_all<'a>(items: impl IntoIterator<Item = &'a AnnotatedElement>) -> Result<AnnotatedElement> {
    let mut it = items.into_iter();
    let first = it.next().expect("empty product").clone();
    it.try_fold(first, |acc, e| asl_product(&acc, e))
}

fn lipschitz_machine(e: &MonoidElement) -> Result<&Transducer> {
    e.machine().ok_or(Error::ConstantElement)
}

/// How far the product of `(T, β_T)` and `(U, β_U)` sits above `β_{TU}`,
/// where each `β` is a function choosing an annotation of a machine.
pub fn cocycle_with_section(
    t: &MonoidElement,
    u: &MonoidElement,
    section: impl Fn(&Transducer) -> Result<Vec<i64>>,
) -> Result<i64> {
    let (tm, um) = (lipschitz_machine(t)?, lipschitz_machine(u)?);
    let at = AnnotatedElement::new(t.clone(), Annotation::Values(section(tm)?))?;
    let au = AnnotatedElement::new(u.clone(), Annotation::Values(section(um)?))?;
    let prod = asl_product(&at, &au)?;
    let tu = lipschitz_machine(&prod.element)?;
    let base = section(tu)?;
    check_annotation(tu, &base)?;
    let vals = prod.values().unwrap();
    let c = vals[0] - base[0];
    debug_assert!(vals.iter().zip(&base).all(|(v, b)| v - b == c));
    Ok(c)
}

/// The cocycle for the section vanishing at `0`-loop states.
pub fn cocycle_c(t: &MonoidElement, u: &MonoidElement) -> Result<i64> {
    cocycle_with_section(t, u, zero_loop_annotation)
}

/// Checks that another section changes the cocycle by the coboundary of
/// `d(X) = β_X(q0) - α_{X,0}(q0)`.
pub fn coboundary_check(
    t: &MonoidElement,
    u: &MonoidElement,
    section: impl Fn(&Transducer) -> Result<Vec<i64>> + Copy,
) -> Result<bool> {
    let d = |e: &MonoidElement| -> Result<i64> {
        let m = lipschitz_machine(e)?;
        Ok(section(m)?[0] - zero_loop_annotation(m)?[0])
    };
    let c = cocycle_c(t, u)?;
    let c2 = cocycle_with_section(t, u, section)?;
    let tu = m_product(t, u)?;
    Ok(c2 - c == d(t)? + d(u)? - d(&tu)?)
}

/// `(Σ_n, 0)`, the shift transducer as an annotated element.
pub fn shift_machine_element(n: usize) -> Result<AnnotatedElement> {
    AnnotatedElement::from_transducer(&shift_transducer(n)?, &vec![0; n])
}
