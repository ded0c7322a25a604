//! Line-oriented text format for transducers and block maps, and DOT export.
//!
//! ```text
//! # comment
//! alphabet 2
//! states a0 a1
//! initial a0
//! edge a0 0 a0 0
//! edge a0 1 a1 1,0
//! edge a1 0 a0 -
//! edge a1 1 a1 1
//! annot a0 0
//! annot a1 1
//! ```
//!
//! Outputs are comma separated letters, `-` for the empty word. Annotation
//! lines are all-or-none; `annot <state> inf` marks a constant.

use std::fmt::Write as _;

use crate::annotate::{AnnotatedElement, Annotation};
use crate::dynamics::BlockMap;
use crate::error::{Error, Result};
use crate::monoid::MonoidElement;
use crate::transducer::{Transducer, TransducerBuilder};
use crate::words::{all_words, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub transducer: Transducer,
    pub initial: Option<usize>,
    pub annotation: Option<Annotation>,
}

impl Document {
    pub fn new(transducer: Transducer) -> Self {
        Document { transducer, initial: None, annotation: None }
    }

    pub fn from_element(e: &MonoidElement) -> Self {
        Document::new(e.to_transducer())
    }

    pub fn from_annotated(e: &AnnotatedElement) -> Self {
        Document {
            transducer: e.element().to_transducer(),
            initial: None,
            annotation: Some(e.annotation().clone()),
        }
    }

    /// The annotated element this document describes. An infinite
    /// annotation must sit on a machine that minimizes to a constant.
    pub fn to_annotated(&self) -> Result<AnnotatedElement> {
        match &self.annotation {
            Some(Annotation::Values(v)) => AnnotatedElement::from_transducer(&self.transducer, v),
            Some(Annotation::Infinite) => {
                AnnotatedElement::new(MonoidElement::from_transducer(&self.transducer)?, Annotation::Infinite)
            }
            None => Err(Error::MissingAnnotation),
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn err(&self, token: usize, msg: impl Into<String>) -> Error {
        let col = self.tokens.get(token).map_or(1, |t| t.0);
        Error::Parse { line: self.number, col, msg: msg.into() }
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            return Err(self.err(0, format!("`{}` takes {} fields, found {}", self.tokens[0].1, n - 1, self.tokens.len() - 1)));
        }
        Ok(())
    }

    fn number<T: std::str::FromStr>(&self, token: usize) -> Result<T> {
        self.tokens[token].1.parse().map_err(|_| self.err(token, format!("expected a number, found `{}`", self.tokens[token].1)))
    }

    fn word(&self, token: usize) -> Result<Word> {
        let text = self.tokens[token].1;
        if text == "-" {
            return Ok(Word::new());
        }
        text.split(',')
            .map(|a| a.parse::<Letter>().map_err(|_| self.err(token, format!("bad letter `{a}`"))))
            .collect()
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap();
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((s + 1, &content[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
    })
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn expect_keyword<'a>(line: Option<Line<'a>>, keyword: &str) -> Result<Line<'a>> {
    let line = line.ok_or_else(|| Error::Parse { line: 0, col: 0, msg: format!("missing `{keyword}` line") })?;
    if line.tokens[0].1 != keyword {
        return Err(line.err(0, format!("expected `{keyword}`, found `{}`", line.tokens[0].1)));
    }
    Ok(line)
}

fn located(line: &Line, token: usize, e: Error) -> Error {
    line.err(token, e.to_string())
}

pub fn parse(text: &str) -> Result<Document> {
    let mut it = lines(text);
    let head = expect_keyword(it.next(), "alphabet")?;
    head.arity(2)?;
    let n: usize = head.number(1)?;
    if n < 2 {
        return Err(head.err(1, Error::BadAlphabet(n).to_string()));
    }
    let states = expect_keyword(it.next(), "states")?;
    let names: Vec<&str> = states.tokens[1..].iter().map(|t| t.1).collect();
    if let Some(i) = names.iter().position(|s| !valid_name(s)) {
        return Err(states.err(i + 1, format!("bad state name `{}`", names[i])));
    }
    let mut builder = TransducerBuilder::new(n, &names).map_err(|e| located(&states, 0, e))?;
    let mut initial = None;
    let mut annots: Vec<Option<Option<i64>>> = vec![None; names.len()];
    let mut annot_count = 0;
    let mut first_annot = None;
    for line in it {
        let state_index = |token: usize| -> Result<usize> {
            let name = line.tokens[token].1;
            names.iter().position(|s| *s == name).ok_or_else(|| line.err(token, format!("unknown state `{name}`")))
        };
        match line.tokens[0].1 {
            "initial" => {
                line.arity(2)?;
                if initial.is_some() {
                    return Err(line.err(0, "second `initial` line"));
                }
                initial = Some(state_index(1)?);
            }
            "edge" => {
                line.arity(5)?;
                state_index(1)?;
                state_index(3)?;
                let x: Letter = line.number(2)?;
                let out = line.word(4)?;
                builder.edge(line.tokens[1].1, x, line.tokens[3].1, out).map_err(|e| {
                    let token = match e {
                        Error::LetterOutOfRange { .. } if (x as usize) < n => 4,
                        _ => 2,
                    };
                    located(&line, token, e)
                })?;
            }
            "annot" => {
                line.arity(3)?;
                let q = state_index(1)?;
                let value = if line.tokens[2].1 == "inf" { None } else { Some(line.number::<i64>(2)?) };
                if annots[q].replace(value).is_some() {
                    return Err(line.err(1, format!("second annotation for `{}`", names[q])));
                }
                annot_count += 1;
                first_annot.get_or_insert(line.number);
            }
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }
    let transducer = builder.build().map_err(|e| match e {
        Error::MissingEdge { .. } => Error::Parse { line: states.number, col: 1, msg: e.to_string() },
        e => e,
    })?;
    let annotation = if annot_count == 0 {
        None
    } else {
        let at = |msg: String| Error::Parse { line: first_annot.unwrap(), col: 1, msg };
        if annot_count != names.len() {
            return Err(at(format!("annotation given for {annot_count} of {} states", names.len())));
        }
        let values: Vec<Option<i64>> = annots.into_iter().map(Option::unwrap).collect();
        if values.iter().all(Option::is_none) {
            Some(Annotation::Infinite)
        } else if values.iter().all(Option::is_some) {
            Some(Annotation::Values(values.into_iter().map(Option::unwrap).collect()))
        } else {
            return Err(at("`inf` mixed with integer annotations".to_string()));
        }
    };
    Ok(Document { transducer, initial, annotation })
}

pub fn serialize(doc: &Document) -> String {
    let t = &doc.transducer;
    let mut s = String::new();
    writeln!(s, "alphabet {}", t.n()).unwrap();
    writeln!(s, "states {}", t.names().join(" ")).unwrap();
    if let Some(q) = doc.initial {
        writeln!(s, "initial {}", t.name(q)).unwrap();
    }
    for q in 0..t.len() {
        for x in t.letters() {
            writeln!(s, "edge {} {} {} {}", t.name(q), x, t.name(t.next(q, x)), t.output(q, x)).unwrap();
        }
    }
    match &doc.annotation {
        Some(Annotation::Values(v)) => {
            for (q, a) in v.iter().enumerate() {
                writeln!(s, "annot {} {}", t.name(q), a).unwrap();
            }
        }
        Some(Annotation::Infinite) => {
            for q in 0..t.len() {
                writeln!(s, "annot {} inf", t.name(q)).unwrap();
            }
        }
        None => {}
    }
    s
}

pub fn to_dot(doc: &Document) -> String {
    let t = &doc.transducer;
    let mut s = String::from("digraph transducer {\n  rankdir=LR;\n");
    for q in 0..t.len() {
        let label = match &doc.annotation {
            Some(Annotation::Values(v)) => format!("{} ({})", t.name(q), v[q]),
            Some(Annotation::Infinite) => format!("{} (inf)", t.name(q)),
            None => t.name(q).to_string(),
        };
        let shape = if doc.initial == Some(q) { "doublecircle" } else { "circle" };
        writeln!(s, "  \"{}\" [label=\"{}\", shape={}];", t.name(q), label, shape).unwrap();
    }
    for q in 0..t.len() {
        for x in t.letters() {
            let out = t.output(q, x);
            let out = if out.is_empty() { "ε".to_string() } else { out.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("") };
            writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}|{}\"];", t.name(q), t.name(t.next(q, x)), x, out).unwrap();
        }
    }
    s.push_str("}\n");
    s
}

/// A block map with an optional shift, meaning `σ^shift f_∞`:
///
/// ```text
/// blockmap 2 2
/// shift 1
/// map 0,0 0
/// map 0,1 1
/// map 1,0 1
/// map 1,1 0
/// ```
pub fn parse_block_map(text: &str) -> Result<(i64, BlockMap)> {
    let mut it = lines(text).peekable();
    let head = expect_keyword(it.next(), "blockmap")?;
    head.arity(3)?;
    let n: usize = head.number(1)?;
    let width: usize = head.number(2)?;
    if n < 2 {
        return Err(head.err(1, Error::BadAlphabet(n).to_string()));
    }
    if width == 0 {
        return Err(head.err(2, "width must be positive"));
    }
    let size = n.checked_pow(width as u32).ok_or_else(|| head.err(2, "window space too large"))?;
    let mut shift = 0;
    if it.peek().is_some_and(|l| l.tokens[0].1 == "shift") {
        let line = it.next().unwrap();
        line.arity(2)?;
        shift = line.number(1)?;
    }
    let mut table: Vec<Option<Letter>> = vec![None; size];
    for line in it {
        if line.tokens[0].1 != "map" {
            return Err(line.err(0, format!("expected `map`, found `{}`", line.tokens[0].1)));
        }
        line.arity(3)?;
        let window = line.word(1)?;
        if window.len() != width || !window.is_over(n) {
            return Err(line.err(1, format!("window must be {width} letters below {n}")));
        }
        let a: Letter = line.number(2)?;
        if a as usize >= n {
            return Err(line.err(2, Error::LetterOutOfRange { letter: a, n }.to_string()));
        }
        if table[window.rank(n)].replace(a).is_some() {
            return Err(line.err(1, format!("window {window} given twice")));
        }
    }
    if let Some(r) = table.iter().position(Option::is_none) {
        return Err(Error::Parse {
            line: head.number,
            col: 1,
            msg: format!("no value for window {}", Word::unrank(r, n, width)),
        });
    }
    Ok((shift, BlockMap::new(n, width, table.into_iter().map(Option::unwrap).collect())?))
}

pub fn serialize_block_map(shift: i64, f: &BlockMap) -> String {
    let mut s = format!("blockmap {} {}\nshift {}\n", f.n(), f.width(), shift);
    for w in all_words(f.n(), f.width()) {
        writeln!(s, "map {} {}", w, f.apply(&w)).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synchro::tests::five_state;
    use proptest::prelude::*;

    const FIVE_STATE: &str = "\
# the five-state example
alphabet 2
states a0 a1 a2 a3 a4
edge a0 0 a0 0
edge a0 1 a1 1
edge a1 0 a3 -
edge a1 1 a4 -
edge a2 0 a0 0
edge a2 1 a2 1
edge a3 0 a0 1,0
edge a3 1 a1 0,1
edge a4 0 a0 0,0   # trailing comment
edge a4 1 a2 1,1
annot a0 0
annot a1 0
annot a2 0
annot a3 -1
annot a4 -1
";

    #[test]
    fn parses_five_state() {
        let doc = parse(FIVE_STATE).unwrap();
        assert_eq!(doc.transducer, five_state());
        assert_eq!(doc.annotation, Some(Annotation::Values(vec![0, 0, 0, -1, -1])));
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
        assert!(doc.to_annotated().is_ok());
    }

    fn parse_err(text: &str) -> (usize, usize) {
        match parse(text) {
            Err(Error::Parse { line, col, .. }) => (line, col),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn error_positions() {
        assert_eq!(parse_err("alphabet 2\nstates p\nedge p 0 q 0\n"), (3, 10));
        assert_eq!(parse_err("alphabet 2\nstates p\nedge p 2 p 0\n"), (3, 8));
        assert_eq!(parse_err("alphabet 2\nstates p\nedge p 0 p 0\nedge p 0 p 1\n"), (4, 8));
        assert_eq!(parse_err("alphabet 2\nstates p\nedge p 0 p 0\n"), (2, 1));
        assert_eq!(parse_err("alphabet 2\nstates p q\nedge p 0 p 0\nedge p 1 p 0\nedge q 0 p 0\nedge q 1 p 0\nannot p 1\n"), (7, 1));
        assert_eq!(parse_err("states p\n"), (1, 1));
        assert_eq!(parse_err("alphabet 2\nstates p\nfrob\n"), (3, 1));
        assert_eq!(parse_err("alphabet 2\nstates p\nedge p 0 p 0,x\n"), (3, 12));
    }

    #[test]
    fn dot_mentions_every_edge() {
        let dot = to_dot(&parse(FIVE_STATE).unwrap());
        assert_eq!(dot.matches("->").count(), 10);
        assert!(dot.contains("\"a1\" -> \"a3\" [label=\"0|ε\"]"));
    }

    #[test]
    fn block_map_round_trip() {
        let f = BlockMap::from_fn(3, 2, |w| (w[0] + 2 * w[1]) % 3).unwrap();
        assert_eq!(parse_block_map(&serialize_block_map(-2, &f)).unwrap(), (-2, f));
        assert!(parse_block_map("blockmap 2 1\nmap 0 1\n").is_err());
        assert_eq!(parse_block_map("blockmap 2 1\nmap 0 1\nmap 1 0\n").unwrap().0, 0);
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(
            len in 1usize..5,
            seed in prop::collection::vec((0usize..5, prop::collection::vec(0u32..3, 0..3)), 15),
            annotate in any::<bool>(),
        ) {
            let names: Vec<String> = (0..len).map(|i| format!("s{i}")).collect();
            let mut b = TransducerBuilder::new(3, &names).unwrap();
            for q in 0..len {
                for x in 0..3u32 {
                    let (t, out) = &seed[q * 3 + x as usize];
                    b.edge(&names[q], x, &names[t % len], out.clone()).unwrap();
                }
            }
            let mut doc = Document::new(b.build().unwrap());
            if annotate {
                doc.annotation = Some(Annotation::Values((0..len as i64).map(|a| a - 2).collect()));
                doc.initial = Some(len - 1);
            }
            prop_assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
        }
    }
}
