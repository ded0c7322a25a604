use thiserror::Error;

use crate::words::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    BadAlphabet(usize),
    #[error("letter {letter} is outside the alphabet of size {n}")]
    LetterOutOfRange { letter: Letter, n: usize },
    #[error("a transducer needs at least one state")]
    NoStates,
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{state}` has two edges on letter {letter}")]
    DuplicateEdge { state: String, letter: Letter },
    #[error("state `{state}` has no edge on letter {letter}")]
    MissingEdge { state: String, letter: Letter },
    #[error("cycle through {states:?} has empty output")]
    EmptyOutputCycle { states: Vec<String> },
    #[error("alphabet sizes differ: {left} and {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("transducer is not strongly synchronizing")]
    NotSynchronizing,
    #[error("transducer is not synchronous")]
    NotSynchronous,
    #[error("transducer is not equal to its core")]
    NotCore,
    #[error("transducer is not minimal")]
    NotMinimal,
    #[error("no consistent annotation exists (conflict at state `{state}`)")]
    NotLipschitz { state: String },
    #[error("state `{state}` has an infinite incomplete response")]
    InfiniteExtent { state: String },
    #[error("operation is undefined for a constant element")]
    ConstantElement,
    #[error("output map at state `{state}` is not a permutation of the alphabet")]
    NotInvertible { state: String },
    #[error("state `{state}` is not injective")]
    NotInjective { state: String },
    #[error("image of state `{state}` is not clopen")]
    NotClopen { state: String },
    #[error("annotation does not satisfy the rule at the edge from `{state}` on {letter}")]
    BadAnnotation { state: String, letter: Letter },
    #[error("annotation covers {got} states, transducer has {expected}")]
    AnnotationLength { expected: usize, got: usize },
    #[error("no annotation given; add `annot` lines or run `stt annotate`")]
    MissingAnnotation,
    #[error("window needs {left} letters of left context and {right} of right context")]
    InsufficientContext { left: usize, right: usize },
    #[error("no inverse found with window width up to {0}")]
    InverseNotFound(usize),
    #[error("block map of width {width} over {n} letters needs {expected} entries, got {got}")]
    BlockMapSize { n: usize, width: usize, expected: usize, got: usize },
    #[error("periodic word must be nonempty")]
    EmptyPeriod,
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
