use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stt::annotate::{annotation_from_extents, canonical_annotation, cocycle_c, zero_loop_annotation, AnnotatedElement, Annotation};
use stt::dynamics::{act_periodic, invert_automorphism, pi_bijective_upto, pi_table, to_block_map, PeriodicPoint};
use stt::error::{Error, Result};
use stt::io::{parse, parse_block_map, serialize, serialize_block_map, to_dot, Document};
use stt::minimize::{minimize, Minimal};
use stt::monoid::{image_basis, is_lipschitz, m_product, order_bounded, sig, spn_product, splits, states_injective, MonoidElement};
use stt::synchro::{certificate, core};
use stt::transducer::{de_bruijn, product_raw, transducer_from_block_map, Transducer};
use stt::words::{all_words, Letter, Word};

/// Synchronizing transducers and their action on the full shift.
///
/// Files use the `alphabet / states / edge / annot` text format; `-` reads
/// standard input. Exit status is 0 on success, 1 for a negative answer,
/// 2 on error.
#[derive(Parser)]
#[command(name = "stt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that no cycle has empty output.
    Validate { file: String },
    /// Print the de Bruijn automaton G(n, m) with empty outputs.
    Debruijn { n: usize, m: usize },
    /// Build the synchronous transducer of a block map file.
    FromBlockmap { file: String },
    /// Print the synchronizing level and the forced state of each word.
    Sync { file: String },
    /// Restrict to the core.
    Core { file: String },
    /// Minimize a core transducer, listing classes and extents as comments.
    Minimize { file: String },
    /// Multiply two transducers.
    Product {
        a: String,
        b: String,
        #[command(flatten)]
        kind: ProductKind,
    },
    /// Attach an annotation.
    Annotate {
        file: String,
        #[command(flatten)]
        how: AnnotateHow,
    },
    /// Apply an annotated transducer to the periodic point with period `w`.
    Act {
        file: String,
        #[arg(long)]
        periodic: String,
    },
    /// Shift and block map with the same action as an annotated transducer.
    ToBlockmap { file: String },
    /// Necklace map on prime necklaces of length k.
    Pi {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Answer a yes/no question about a transducer.
    Check {
        file: String,
        #[command(flatten)]
        what: CheckWhat,
    },
    /// Signature residue of a synchronous transducer.
    Sig { file: String },
    /// Cocycle value of two Lipschitz elements.
    Cocycle { a: String, b: String },
    /// Search for the inverse of an annotated automorphism.
    Invert {
        file: String,
        #[arg(long, default_value_t = 6)]
        dmax: usize,
    },
    /// Order of an element, if at most the bound.
    Order {
        file: String,
        #[arg(long, default_value_t = 12)]
        bound: usize,
    },
    /// Whether n is not a proper power.
    Splits { n: u64 },
    /// Graphviz rendering.
    Dot { file: String },
}

#[derive(Args)]
#[group(multiple = false)]
struct ProductKind {
    /// Every pair of states, unreduced.
    #[arg(long)]
    raw: bool,
    /// Core of the product with states writing equal words merged.
    #[arg(long)]
    spn: bool,
    /// Minimized core of the product (the default).
    #[arg(long)]
    m: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AnnotateHow {
    #[arg(long)]
    canonical: bool,
    #[arg(long, value_name = "I", allow_hyphen_values = true)]
    from_extents: Option<i64>,
    #[arg(long)]
    zero_loop: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CheckWhat {
    #[arg(long)]
    lipschitz: bool,
    #[arg(long)]
    injective: bool,
    #[arg(long)]
    clopen: bool,
    #[arg(long, value_name = "K")]
    pi_bijective: Option<usize>,
}

enum Outcome {
    Yes(String),
    No(String),
}

fn read(path: &str) -> std::result::Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn load(path: &str) -> std::result::Result<Document, String> {
    parse(&read(path)?).map_err(|e| format!("{path}: {e}"))
}

fn element(doc: &Document) -> Result<MonoidElement> {
    MonoidElement::from_transducer(&doc.transducer)
}

/// Comma separated letters, or bare digits when `n <= 10`.
fn parse_word(text: &str, n: usize) -> Result<Word> {
    let bad = || Error::Parse { line: 0, col: 0, msg: format!("bad word `{text}`") };
    let w: Word = if text.contains(',') || n > 10 {
        text.split(',').map(|a| a.trim().parse::<Letter>().map_err(|_| bad())).collect::<Result<_>>()?
    } else {
        text.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_>>()?
    };
    if let Some(&a) = w.iter().find(|&&a| a as usize >= n) {
        return Err(Error::LetterOutOfRange { letter: a, n });
    }
    Ok(w)
}

fn annotated_doc(e: &AnnotatedElement) -> String {
    serialize(&Document::from_annotated(e))
}

fn with_annotation(t: Transducer, alpha: Vec<i64>) -> String {
    let mut doc = Document::new(t);
    doc.annotation = Some(Annotation::Values(alpha));
    serialize(&doc)
}

fn yes_no(b: bool) -> Outcome {
    if b {
        Outcome::Yes("true".into())
    } else {
        Outcome::No("false".into())
    }
}

fn run(cmd: Command) -> std::result::Result<Outcome, String> {
    let out = match cmd {
        Command::Validate { file } => {
            let doc = load(&file)?;
            match doc.transducer.validate() {
                Ok(()) => Outcome::Yes("valid".into()),
                Err(e) => Outcome::No(e.to_string()),
            }
        }
        Command::Debruijn { n, m } => {
            let aut = de_bruijn(n, m).map_err(|e| e.to_string())?;
            let t = Transducer::new(aut, vec![Word::new(); n.pow(m as u32 + 1)]).map_err(|e| e.to_string())?;
            Outcome::Yes(format!("# outputs left empty\n{}", serialize(&Document::new(t))))
        }
        Command::FromBlockmap { file } => {
            let (shift, f) = parse_block_map(&read(&file)?).map_err(|e| format!("{file}: {e}"))?;
            let t = transducer_from_block_map(&f).map_err(|e| e.to_string())?;
            let len = t.len();
            Outcome::Yes(with_annotation(t, vec![shift; len]))
        }
        Command::Sync { file } => {
            let doc = load(&file)?;
            let aut = doc.transducer.automaton();
            match certificate(aut) {
                Err(Error::NotSynchronizing) => Outcome::No("not strongly synchronizing".into()),
                Err(e) => return Err(e.to_string()),
                Ok(cert) => {
                    let mut s = format!("level {}\n", cert.level());
                    if aut.n().checked_pow(cert.level() as u32).is_some_and(|c| c <= 4096) {
                        for (w, q) in all_words(aut.n(), cert.level()).zip(cert.forced_map(aut)) {
                            writeln!(s, "forced {} {}", w, aut.name(q)).unwrap();
                        }
                    }
                    Outcome::Yes(s.trim_end().to_string())
                }
            }
        }
        Command::Core { file } => {
            let doc = load(&file)?;
            Outcome::Yes(serialize(&Document::new(core(&doc.transducer).map_err(|e| e.to_string())?)))
        }
        Command::Minimize { file } => {
            let doc = load(&file)?;
            let t = &doc.transducer;
            let m = minimize(t).map_err(|e| e.to_string())?;
            let (machine, mut s) = match &m.minimal {
                Minimal::Machine(machine) => (machine.clone(), String::new()),
                Minimal::Constant(z) => (z.to_transducer(), format!("# constant {}\n", z.root())),
            };
            s.push_str(&serialize(&Document::new(machine.clone())));
            for (q, &k) in m.kappa.iter().enumerate() {
                writeln!(s, "# kappa {} {}", t.name(q), machine.name(k)).unwrap();
            }
            for (q, e) in m.extents.iter().enumerate() {
                writeln!(s, "# extent {} {}", t.name(q), e).unwrap();
            }
            Outcome::Yes(s)
        }
        Command::Product { a, b, kind } => {
            let (da, db) = (load(&a)?, load(&b)?);
            let (ta, tb) = (&da.transducer, &db.transducer);
            let t = if kind.raw {
                product_raw(ta, tb)
            } else if kind.spn {
                spn_product(ta, tb)
            } else {
                element(&da).and_then(|ea| m_product(&ea, &element(&db)?)).map(|e| e.to_transducer())
            };
            Outcome::Yes(serialize(&Document::new(t.map_err(|e| e.to_string())?)))
        }
        Command::Annotate { file, how } => {
            let doc = load(&file)?;
            let t = doc.transducer;
            let text = if let Some(i) = how.from_extents {
                annotated_doc(&annotation_from_extents(&t, i).map_err(|e| e.to_string())?)
            } else {
                let alpha = if how.canonical { canonical_annotation(&t) } else { zero_loop_annotation(&t) };
                with_annotation(t, alpha.map_err(|e| e.to_string())?)
            };
            Outcome::Yes(text)
        }
        Command::Act { file, periodic } => {
            let doc = load(&file)?;
            let e = doc.to_annotated().map_err(|e| e.to_string())?;
            let w = parse_word(&periodic, e.n()).map_err(|e| e.to_string())?;
            let x = PeriodicPoint::new(w).map_err(|e| e.to_string())?;
            Outcome::Yes(act_periodic(&e, &x).map_err(|e| e.to_string())?.word().to_string())
        }
        Command::ToBlockmap { file } => {
            let e = load(&file)?.to_annotated().map_err(|e| e.to_string())?;
            let (i, f) = to_block_map(&e).map_err(|e| e.to_string())?;
            Outcome::Yes(serialize_block_map(i, &f))
        }
        Command::Pi { file, k } => {
            let e = element(&load(&file)?).map_err(|e| e.to_string())?;
            let mut s = String::new();
            for (c, image) in pi_table(&e, k).map_err(|e| e.to_string())? {
                writeln!(s, "{c} -> {image}").unwrap();
            }
            Outcome::Yes(s)
        }
        Command::Check { file, what } => {
            let doc = load(&file)?;
            let t = &doc.transducer;
            let answer = if what.lipschitz {
                element(&doc).map(|e| is_lipschitz(&e))
            } else if what.injective {
                states_injective(t)
            } else if what.clopen {
                (0..t.len()).try_fold(true, |acc, q| Ok(acc && image_basis(t, q)?.is_some()))
            } else {
                element(&doc).and_then(|e| pi_bijective_upto(&e, what.pi_bijective.unwrap()))
            };
            yes_no(answer.map_err(|e| e.to_string())?)
        }
        Command::Sig { file } => {
            let doc = load(&file)?;
            Outcome::Yes(sig(&doc.transducer).map_err(|e| e.to_string())?.to_string())
        }
        Command::Cocycle { a, b } => {
            let ea = element(&load(&a)?).map_err(|e| e.to_string())?;
            let eb = element(&load(&b)?).map_err(|e| e.to_string())?;
            Outcome::Yes(cocycle_c(&ea, &eb).map_err(|e| e.to_string())?.to_string())
        }
        Command::Invert { file, dmax } => {
            let e = load(&file)?.to_annotated().map_err(|e| e.to_string())?;
            match invert_automorphism(&e, dmax) {
                Ok(inv) => Outcome::Yes(annotated_doc(&inv)),
                Err(e @ Error::InverseNotFound(_)) => Outcome::No(e.to_string()),
                Err(e) => return Err(e.to_string()),
            }
        }
        Command::Order { file, bound } => {
            let e = element(&load(&file)?).map_err(|e| e.to_string())?;
            match order_bounded(&e, bound).map_err(|e| e.to_string())? {
                Some(m) => Outcome::Yes(m.to_string()),
                None => Outcome::No(format!("order exceeds {bound}")),
            }
        }
        Command::Splits { n } => {
            if n < 2 {
                return Err(Error::BadAlphabet(n as usize).to_string());
            }
            yes_no(splits(n))
        }
        Command::Dot { file } => Outcome::Yes(to_dot(&load(&file)?)),
    };
    Ok(out)
}

fn emit(s: &str) {
    // A closed pipe (`stt ... | head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", s.trim_end());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Yes(s)) => {
            emit(&s);
            ExitCode::SUCCESS
        }
        Ok(Outcome::No(s)) => {
            emit(&s);
            ExitCode::from(1)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
