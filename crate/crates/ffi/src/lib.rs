//! C interface to the transducer library.
//!
//! Every fallible function returns an [`SttStatus`] and writes its result
//! through an out pointer. On failure `stt_last_error` describes the
//! problem. Handles and strings returned here must be released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use stt::annotate::{asl_product, canonical_annotation, Annotation, AnnotatedElement};
use stt::dynamics::{act_periodic, PeriodicPoint};
use stt::io::{parse, serialize, Document};
use stt::minimize::{minimize, Minimal};
use stt::monoid::{is_lipschitz, m_product, order_bounded, MonoidElement};
use stt::synchro::sync_level;
use stt::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SttStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidTransducer = 4,
    NotSynchronizing = 5,
    Unsupported = 6,
    Annotation = 7,
    NotFound = 8,
    Panic = 9,
}

/// A transducer with an optional annotation.
pub struct SttDocument {
    doc: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(SttStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => SttStatus::Parse,
            Error::BadAlphabet(_)
            | Error::LetterOutOfRange { .. }
            | Error::NoStates
            | Error::DuplicateState(_)
            | Error::UnknownState(_)
            | Error::DuplicateEdge { .. }
            | Error::MissingEdge { .. }
            | Error::EmptyOutputCycle { .. }
            | Error::AlphabetMismatch { .. }
            | Error::BlockMapSize { .. }
            | Error::EmptyPeriod => SttStatus::InvalidTransducer,
            Error::NotSynchronizing => SttStatus::NotSynchronizing,
            Error::BadAnnotation { .. } | Error::AnnotationLength { .. } | Error::MissingAnnotation => {
                SttStatus::Annotation
            }
            Error::InverseNotFound(_) => SttStatus::NotFound,
            _ => SttStatus::Unsupported,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SttStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SttStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SttStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SttStatus::Panic
        }
    }
}

unsafe fn doc_ref<'a>(p: *const SttDocument, what: &str) -> Result<&'a Document, Failure> {
    p.as_ref().map(|d| &d.doc).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed(doc: Document) -> *mut SttDocument {
    Box::into_raw(Box::new(SttDocument { doc }))
}

fn annotated(doc: &Document) -> Result<AnnotatedElement, Failure> {
    Ok(doc.to_annotated()?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn stt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses the text format into a new document.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_parse(text: *const c_char, out: *mut *mut SttDocument) -> SttStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(SttStatus::InvalidUtf8, e.to_string()))?;
        let doc = parse(s)?;
        put(out, boxed(doc))
    })
}

/// # Safety
/// `doc` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn stt_document_free(doc: *mut SttDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Writes the document in the text format. Free the result with `stt_string_free`.
///
/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_serialize(doc: *const SttDocument, out: *mut *mut c_char) -> SttStatus {
    guard(|| {
        let text = serialize(doc_ref(doc, "doc")?);
        put(out, CString::new(text).unwrap().into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn stt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_state_count(doc: *const SttDocument, out: *mut usize) -> SttStatus {
    guard(|| put(out, doc_ref(doc, "doc")?.transducer.len()))
}

/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_alphabet_size(doc: *const SttDocument, out: *mut usize) -> SttStatus {
    guard(|| put(out, doc_ref(doc, "doc")?.transducer.n()))
}

/// Synchronizing level of the underlying automaton.
///
/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_sync_level(doc: *const SttDocument, out: *mut usize) -> SttStatus {
    guard(|| {
        let level = sync_level(doc_ref(doc, "doc")?.transducer.automaton())?;
        put(out, level)
    })
}

/// Minimal form of a core transducer. A constant result is returned as
/// its one-state machine with an infinite annotation.
///
/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_minimize(doc: *const SttDocument, out: *mut *mut SttDocument) -> SttStatus {
    guard(|| {
        let m = minimize(&doc_ref(doc, "doc")?.transducer)?;
        let result = match m.minimal {
            Minimal::Machine(t) => Document::new(t),
            Minimal::Constant(z) => {
                let mut d = Document::new(z.to_transducer());
                d.annotation = Some(Annotation::Infinite);
                d
            }
        };
        put(out, boxed(result))
    })
}

/// Product of the elements `a` then `b` in the monoid of minimal transducers.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_product(a: *const SttDocument, b: *const SttDocument, out: *mut *mut SttDocument) -> SttStatus {
    guard(|| {
        let ea = MonoidElement::from_transducer(&doc_ref(a, "a")?.transducer)?;
        let eb = MonoidElement::from_transducer(&doc_ref(b, "b")?.transducer)?;
        put(out, boxed(Document::from_element(&m_product(&ea, &eb)?)))
    })
}

/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_is_lipschitz(doc: *const SttDocument, out: *mut bool) -> SttStatus {
    guard(|| {
        let e = MonoidElement::from_transducer(&doc_ref(doc, "doc")?.transducer)?;
        put(out, is_lipschitz(&e))
    })
}

/// Smallest power up to `bound` that is the identity, or 0 if there is none.
///
/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_order(doc: *const SttDocument, bound: usize, out: *mut usize) -> SttStatus {
    guard(|| {
        let e = MonoidElement::from_transducer(&doc_ref(doc, "doc")?.transducer)?;
        put(out, order_bounded(&e, bound)?.unwrap_or(0))
    })
}

/// Copy of a minimal Lipschitz transducer carrying its canonical annotation.
///
/// # Safety
/// `doc` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_canonical_annotation(doc: *const SttDocument, out: *mut *mut SttDocument) -> SttStatus {
    guard(|| {
        let d = doc_ref(doc, "doc")?;
        let alpha = canonical_annotation(&d.transducer)?;
        let mut result = Document::new(d.transducer.clone());
        result.annotation = Some(Annotation::Values(alpha));
        put(out, boxed(result))
    })
}

/// Product of annotated elements, `a` acting first.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stt_annotated_product(
    a: *const SttDocument,
    b: *const SttDocument,
    out: *mut *mut SttDocument,
) -> SttStatus {
    guard(|| {
        let ea = annotated(doc_ref(a, "a")?)?;
        let eb = annotated(doc_ref(b, "b")?)?;
        put(out, boxed(Document::from_annotated(&asl_product(&ea, &eb)?)))
    })
}

/// Applies an annotated document to the periodic point with period
/// `word[0..len]`. The primitive period of the image is written to a new
/// buffer released with `stt_word_free`.
///
/// # Safety
/// `doc` must be a live handle, `word` must point to `len` letters, and
/// `out`, `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stt_act_periodic(
    doc: *const SttDocument,
    word: *const u32,
    len: usize,
    out: *mut *mut u32,
    out_len: *mut usize,
) -> SttStatus {
    guard(|| {
        let e = annotated(doc_ref(doc, "doc")?)?;
        if word.is_null() {
            return Err(null("word"));
        }
        let letters = std::slice::from_raw_parts(word, len).to_vec();
        if let Some(&a) = letters.iter().find(|&&a| a as usize >= e.n()) {
            return Err(Error::LetterOutOfRange { letter: a, n: e.n() }.into());
        }
        let y = act_periodic(&e, &PeriodicPoint::new(letters)?)?;
        let buf = y.word().letters().to_vec().into_boxed_slice();
        if out.is_null() || out_len.is_null() {
            return Err(null("output pointer"));
        }
        out_len.write(buf.len());
        out.write(Box::into_raw(buf) as *mut u32);
        Ok(())
    })
}

/// # Safety
/// `word` and `len` must come from `stt_act_periodic`. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn stt_word_free(word: *mut u32, len: usize) {
    if !word.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(word, len)));
    }
}
