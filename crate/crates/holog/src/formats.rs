//! Plain-text file formats for signatures, structures, comparison maps, and
//! proof terms.
//!
//! The line-oriented formats (everything except proof terms) share one
//! lexical convention: UTF-8 text, one directive per line, `#` starts a
//! comment running to the end of the line, blank lines are ignored.
//! Whitespace inside a line is free. The formats are:
//!
//! **Signature files** — sort declarations and typed function symbols:
//!
//! ```text
//! sort A
//! sort B
//! fn a : -> A          # a constant: empty argument list
//! fn m : A, B -> A
//! ```
//!
//! **Set structure files** — named finite carriers and function tables:
//!
//! ```text
//! carrier A = x y
//! map a : -> x
//! map m : x u -> y     # one row per argument tuple, total
//! ```
//!
//! **Groupoid structure files** — one `groupoid` block per sort giving
//! objects, named morphisms, and the full composition table (identities and
//! inverses are derived and the groupoid axioms checked), then one `functor`
//! block per function symbol giving its action on object tuples and
//! morphism tuples:
//!
//! ```text
//! groupoid A
//! objects 1
//! mor e : 0 -> 0
//! mor s : 0 -> 0
//! compose s s = e      # s∘s = e; every composable pair appears
//! ...
//! end
//!
//! functor f
//! obj 0 -> 0
//! mor s -> s           # one argument morphism name per slot
//! ...
//! end
//! ```
//!
//! **Comparison map files** — a map between two groupoid structures over the
//! same signature: per-sort `sort` blocks (object and morphism images), one
//! `cell` block per function symbol (the invertible filler of its naturality
//! square at each argument object tuple), and optionally quasi-inverse data
//! (`inverse` blocks plus `unit`/`counit` lines) upgrading the map to an
//! equivalence:
//!
//! ```text
//! sort A
//! obj 0 -> 1
//! mor e -> i1
//! end
//!
//! cell f
//! 0 -> e               # argument objects in the source, morphism in the target
//! end
//!
//! inverse A            # optional, same row shapes as `sort`, mapping back
//! ...
//! end
//! unit A = e           # per source object: id ⇒ inverse∘forward
//! counit A = i1 i2     # per target object: forward∘inverse ⇒ id
//! ```
//!
//! **Proof terms** are free-form (newlines allowed anywhere) functional
//! syntax over the deduction constructors, with arguments separated by `;`:
//! contexts are bracketed sort lists, formulas use the formula grammar with
//! positional variables `x1, x2, …`:
//!
//! ```text
//! comp(proj1([A]; T; x1 = x1);
//!      pair(id([A]; T); bang([A]; T)))
//! ```
//!
//! Errors distinguish grammatical problems (malformed lines, unknown
//! directives, unresolvable names — [`FormatError::is_parse_error`]) from
//! validation failures on well-formed files (ill-typed formulas, partial
//! tables, broken functor laws), which surface through the same validators
//! used for programmatically built values.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::groupoid::{FinGroupoid, GroupoidStructure, SymbolFunctor};
use crate::invariance::{HomotopyEquivalence, HomotopyHomomorphism};
use crate::model::ModelError;
use crate::proof::{typecheck, Deduction, ProofError};
use crate::set_model::SetStructure;
use crate::syntax::{
    canonicalize, parse_formula, parse_term, Context, Formula, FuncDecl, Signature, SyntaxError,
    Term,
};
use crate::term_cat::{CtxObject, TermMorphism};

/// Errors from reading the text formats.
///
/// `Line` and `Structure` are grammatical: the text itself is malformed or
/// mentions names that do not exist. The transparent variants re-surface
/// validation errors from the usual constructors ([`Signature::new`],
/// [`SetStructure::new`], [`GroupoidStructure::new`], [`typecheck`], …) when
/// a well-formed file describes an ill-typed or law-breaking value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

impl FormatError {
    /// True for grammatical failures, as opposed to typing or validation
    /// failures on a grammatically well-formed file.
    pub fn is_parse_error(&self) -> bool {
        fn lexical(e: &SyntaxError) -> bool {
            matches!(e, SyntaxError::Lex { .. } | SyntaxError::Parse { .. })
        }
        match self {
            FormatError::Line { .. } | FormatError::Structure(_) => true,
            FormatError::Syntax(e) => lexical(e),
            FormatError::Model(ModelError::Syntax(e)) => lexical(e),
            FormatError::Proof(ProofError::Syntax(e)) => lexical(e),
            _ => false,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        msg: msg.into(),
    }
}

/// Strips comments and blanks; yields `(1-based line number, content)`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn ident(line: usize, s: &str) -> Result<String, FormatError> {
    let t = s.trim();
    let ok = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !t.chars().next().unwrap().is_ascii_digit();
    if ok {
        Ok(t.to_string())
    } else {
        Err(err(line, format!("expected a name, found `{t}`")))
    }
}

fn number(line: usize, s: &str) -> Result<usize, FormatError> {
    s.trim()
        .parse()
        .map_err(|_| err(line, format!("expected a number, found `{}`", s.trim())))
}

/// Splits `left -> right`, requiring exactly one arrow.
fn arrow(line: usize, s: &str) -> Result<(&str, &str), FormatError> {
    s.split_once("->")
        .ok_or_else(|| err(line, "expected `... -> ...`"))
}

// ---------------------------------------------------------------------------
// Signature files
// ---------------------------------------------------------------------------

/// Reads a signature file: `sort NAME` and `fn NAME : S1, S2 -> T` lines.
pub fn parse_signature(text: &str) -> Result<Signature, FormatError> {
    let mut sorts = Vec::new();
    let mut functions = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("sort ") {
            sorts.push(ident(no, rest)?);
        } else if let Some(rest) = line.strip_prefix("fn ") {
            let (name, ty) = rest
                .split_once(':')
                .ok_or_else(|| err(no, "expected `fn NAME : S1, S2 -> T`"))?;
            let (args, cod) = arrow(no, ty)?;
            let arity = args
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(|a| ident(no, a))
                .collect::<Result<Vec<_>, _>>()?;
            functions.push((
                ident(no, name)?,
                FuncDecl {
                    arity,
                    codomain: ident(no, cod)?,
                },
            ));
        } else {
            return Err(err(no, format!("expected `sort` or `fn`, found `{line}`")));
        }
    }
    Ok(Signature::new(sorts, functions)?)
}

// ---------------------------------------------------------------------------
// Set structure files
// ---------------------------------------------------------------------------

/// Reads a set structure file against `sig`: `carrier S = e1 e2 …` lines
/// naming the elements of each carrier, then `map f : a b -> c` rows (one
/// per argument tuple, written with element names). Totality and sort
/// discipline are checked by [`SetStructure::new`].
pub fn parse_set_structure(text: &str, sig: &Signature) -> Result<SetStructure, FormatError> {
    let mut carriers: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut rows: Vec<(usize, String, Vec<String>, String)> = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("carrier ") {
            let (name, elems) = rest
                .split_once('=')
                .ok_or_else(|| err(no, "expected `carrier S = e1 e2 …`"))?;
            let name = ident(no, name)?;
            let elems = elems
                .split_whitespace()
                .map(|e| ident(no, e))
                .collect::<Result<Vec<_>, _>>()?;
            if carriers.insert(name.clone(), elems).is_some() {
                return Err(err(no, format!("carrier `{name}` declared twice")));
            }
        } else if let Some(rest) = line.strip_prefix("map ") {
            let (name, rule) = rest
                .split_once(':')
                .ok_or_else(|| err(no, "expected `map f : a b -> c`"))?;
            let (args, out) = arrow(no, rule)?;
            let args = args
                .split_whitespace()
                .map(|a| ident(no, a))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((no, ident(no, name)?, args, ident(no, out)?));
        } else {
            return Err(err(
                no,
                format!("expected `carrier` or `map`, found `{line}`"),
            ));
        }
    }

    let elem_index = |no: usize, sort: &str, name: &str| -> Result<usize, FormatError> {
        let elems = carriers
            .get(sort)
            .ok_or_else(|| err(no, format!("no carrier declared for sort `{sort}`")))?;
        elems
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| err(no, format!("`{name}` is not an element of carrier `{sort}`")))
    };

    let mut funcs: BTreeMap<String, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    for (no, name, args, out) in rows {
        let decl = sig
            .func(&name)
            .ok_or_else(|| err(no, format!("unknown function symbol `{name}`")))?;
        if args.len() != decl.arity.len() {
            return Err(err(
                no,
                format!(
                    "`{name}` takes {} argument(s), row has {}",
                    decl.arity.len(),
                    args.len()
                ),
            ));
        }
        let key = args
            .iter()
            .zip(&decl.arity)
            .map(|(a, sort)| elem_index(no, sort, a))
            .collect::<Result<Vec<_>, _>>()?;
        let val = elem_index(no, &decl.codomain, &out)?;
        if funcs.entry(name.clone()).or_default().insert(key, val).is_some() {
            return Err(err(no, format!("duplicate row for `{name}`")));
        }
    }
    Ok(SetStructure::new(sig, carriers, funcs)?)
}

// ---------------------------------------------------------------------------
// Groupoid structure files
// ---------------------------------------------------------------------------

/// A groupoid structure read from a file, with the file's morphism names
/// kept (per sort, index-aligned with the carrier's morphisms) so that
/// comparison-map files and reports can refer to morphisms by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedGroupoidStructure {
    pub structure: GroupoidStructure,
    pub mor_names: BTreeMap<String, Vec<String>>,
}

impl NamedGroupoidStructure {
    /// Resolves a morphism name in the carrier of `sort`.
    fn mor(&self, line: usize, sort: &str, name: &str) -> Result<usize, FormatError> {
        let names = self
            .mor_names
            .get(sort)
            .ok_or_else(|| err(line, format!("no groupoid declared for sort `{sort}`")))?;
        names.iter().position(|n| n == name).ok_or_else(|| {
            err(
                line,
                format!("`{name}` is not a morphism of the `{sort}` carrier"),
            )
        })
    }
}

struct RawGroupoid {
    name: String,
    objects: Option<usize>,
    /// `(line, name, src, tgt)` in declaration order; index = position.
    mors: Vec<(usize, String, usize, usize)>,
    /// `compose a b = c` rows as `(line, a, b, c)`, meaning `a∘b = c`.
    compose: Vec<(usize, String, String, String)>,
}

struct RawFunctor {
    line: usize,
    name: String,
    obj_rows: Vec<(usize, Vec<usize>, usize)>,
    mor_rows: Vec<(usize, Vec<String>, String)>,
}

/// Reads a groupoid structure file against `sig`. Identities and inverses
/// of each carrier are derived from its composition table, and the groupoid
/// axioms plus the functor laws for every symbol action are checked.
pub fn parse_groupoid_structure(
    text: &str,
    sig: &Signature,
) -> Result<NamedGroupoidStructure, FormatError> {
    enum Block {
        None,
        Groupoid(RawGroupoid),
        Functor(RawFunctor),
    }
    let mut block = Block::None;
    let mut groupoids: Vec<RawGroupoid> = Vec::new();
    let mut functors: Vec<RawFunctor> = Vec::new();

    for (no, line) in content_lines(text) {
        match &mut block {
            Block::None => {
                if let Some(rest) = line.strip_prefix("groupoid ") {
                    block = Block::Groupoid(RawGroupoid {
                        name: ident(no, rest)?,
                        objects: None,
                        mors: Vec::new(),
                        compose: Vec::new(),
                    });
                } else if let Some(rest) = line.strip_prefix("functor ") {
                    block = Block::Functor(RawFunctor {
                        line: no,
                        name: ident(no, rest)?,
                        obj_rows: Vec::new(),
                        mor_rows: Vec::new(),
                    });
                } else {
                    return Err(err(
                        no,
                        format!("expected `groupoid` or `functor`, found `{line}`"),
                    ));
                }
            }
            Block::Groupoid(g) => {
                if line == "end" {
                    let done = std::mem::replace(&mut block, Block::None);
                    if let Block::Groupoid(g) = done {
                        groupoids.push(g);
                    }
                } else if let Some(rest) = line.strip_prefix("objects ") {
                    if g.objects.replace(number(no, rest)?).is_some() {
                        return Err(err(no, "`objects` given twice"));
                    }
                } else if let Some(rest) = line.strip_prefix("mor ") {
                    let (name, ends) = rest
                        .split_once(':')
                        .ok_or_else(|| err(no, "expected `mor NAME : src -> tgt`"))?;
                    let (src, tgt) = arrow(no, ends)?;
                    g.mors
                        .push((no, ident(no, name)?, number(no, src)?, number(no, tgt)?));
                } else if let Some(rest) = line.strip_prefix("compose ") {
                    let (pair, out) = rest
                        .split_once('=')
                        .ok_or_else(|| err(no, "expected `compose a b = c`"))?;
                    let names: Vec<&str> = pair.split_whitespace().collect();
                    if names.len() != 2 {
                        return Err(err(no, "expected `compose a b = c`"));
                    }
                    g.compose.push((
                        no,
                        ident(no, names[0])?,
                        ident(no, names[1])?,
                        ident(no, out)?,
                    ));
                } else {
                    return Err(err(
                        no,
                        format!("expected `objects`, `mor`, `compose`, or `end`, found `{line}`"),
                    ));
                }
            }
            Block::Functor(f) => {
                if line == "end" {
                    let done = std::mem::replace(&mut block, Block::None);
                    if let Block::Functor(f) = done {
                        functors.push(f);
                    }
                } else if let Some(rest) = line.strip_prefix("obj") {
                    let (args, out) = arrow(no, rest)?;
                    let args = args
                        .split_whitespace()
                        .map(|a| number(no, a))
                        .collect::<Result<Vec<_>, _>>()?;
                    f.obj_rows.push((no, args, number(no, out)?));
                } else if let Some(rest) = line.strip_prefix("mor") {
                    let (args, out) = arrow(no, rest)?;
                    let args = args
                        .split_whitespace()
                        .map(|a| ident(no, a))
                        .collect::<Result<Vec<_>, _>>()?;
                    f.mor_rows.push((no, args, ident(no, out)?));
                } else {
                    return Err(err(
                        no,
                        format!("expected `obj`, `mor`, or `end`, found `{line}`"),
                    ));
                }
            }
        }
    }
    if !matches!(block, Block::None) {
        return Err(FormatError::Structure("unterminated block: missing `end`".into()));
    }

    // Build the carriers, recording morphism names in declaration order.
    let mut carriers: BTreeMap<String, FinGroupoid> = BTreeMap::new();
    let mut mor_names: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for g in groupoids {
        let n_objects = g
            .objects
            .ok_or_else(|| FormatError::Structure(format!("groupoid `{}` has no `objects` line", g.name)))?;
        let mut names = Vec::new();
        let mut mors = Vec::new();
        for (no, name, src, tgt) in g.mors {
            if names.contains(&name) {
                return Err(err(no, format!("morphism `{name}` declared twice")));
            }
            names.push(name);
            mors.push((src, tgt));
        }
        let lookup = |no: usize, n: &str| -> Result<usize, FormatError> {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| err(no, format!("unknown morphism `{n}`")))
        };
        let mut table = BTreeMap::new();
        for (no, a, b, c) in g.compose {
            let key = (lookup(no, &a)?, lookup(no, &b)?);
            if table.insert(key, lookup(no, &c)?).is_some() {
                return Err(err(no, format!("duplicate `compose {a} {b}` row")));
            }
        }
        let carrier = FinGroupoid::new(n_objects, mors, table)
            .map_err(|e| FormatError::Model(shape_in(&g.name, e)))?;
        if carriers.insert(g.name.clone(), carrier).is_some() {
            return Err(FormatError::Structure(format!(
                "groupoid `{}` declared twice",
                g.name
            )));
        }
        mor_names.insert(g.name, names);
    }

    // Resolve the functor blocks now that every carrier name is known.
    let mut funcs: BTreeMap<String, SymbolFunctor> = BTreeMap::new();
    for f in functors {
        let decl = sig
            .func(&f.name)
            .ok_or_else(|| err(f.line, format!("unknown function symbol `{}`", f.name)))?;
        let mut obj_map = BTreeMap::new();
        for (no, args, out) in f.obj_rows {
            if args.len() != decl.arity.len() {
                return Err(err(
                    no,
                    format!(
                        "`{}` takes {} argument(s), row has {}",
                        f.name,
                        decl.arity.len(),
                        args.len()
                    ),
                ));
            }
            if obj_map.insert(args, out).is_some() {
                return Err(err(no, format!("duplicate `obj` row for `{}`", f.name)));
            }
        }
        let mut mor_map = BTreeMap::new();
        for (no, args, out) in f.mor_rows {
            if args.len() != decl.arity.len() {
                return Err(err(
                    no,
                    format!(
                        "`{}` takes {} argument(s), row has {}",
                        f.name,
                        decl.arity.len(),
                        args.len()
                    ),
                ));
            }
            let key = args
                .iter()
                .zip(&decl.arity)
                .map(|(a, sort)| {
                    let names = mor_names
                        .get(sort)
                        .ok_or_else(|| err(no, format!("no groupoid declared for sort `{sort}`")))?;
                    names
                        .iter()
                        .position(|x| x == a)
                        .ok_or_else(|| err(no, format!("unknown morphism `{a}` in sort `{sort}`")))
                })
                .collect::<Result<Vec<_>, FormatError>>()?;
            let out_names = mor_names
                .get(&decl.codomain)
                .ok_or_else(|| err(no, format!("no groupoid declared for sort `{}`", decl.codomain)))?;
            let val = out_names
                .iter()
                .position(|x| x == &out)
                .ok_or_else(|| err(no, format!("unknown morphism `{out}` in sort `{}`", decl.codomain)))?;
            if mor_map.insert(key, val).is_some() {
                return Err(err(no, format!("duplicate `mor` row for `{}`", f.name)));
            }
        }
        if funcs
            .insert(f.name.clone(), SymbolFunctor { obj_map, mor_map })
            .is_some()
        {
            return Err(FormatError::Structure(format!(
                "functor `{}` declared twice",
                f.name
            )));
        }
    }

    let structure = GroupoidStructure::new(sig, carriers, funcs)?;
    Ok(NamedGroupoidStructure {
        structure,
        mor_names,
    })
}

/// Prefixes carrier-level shape errors with the groupoid's name.
fn shape_in(name: &str, e: ModelError) -> ModelError {
    match e {
        ModelError::Shape(msg) => ModelError::Shape(format!("groupoid `{name}`: {msg}")),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Comparison map files
// ---------------------------------------------------------------------------

/// A comparison map read from a file: the forward map plus any quasi-inverse
/// data the file supplied. [`ParsedComparison::equivalence`] assembles a full
/// equivalence when inverse, unit, and counit cover every sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedComparison {
    pub map: HomotopyHomomorphism,
    pub inverses: BTreeMap<String, crate::groupoid::PlainFunctor>,
    pub unit: BTreeMap<String, Vec<usize>>,
    pub counit: BTreeMap<String, Vec<usize>>,
}

impl ParsedComparison {
    /// The file's quasi-inverse data as a full equivalence, if it covered
    /// every sort; `None` when any block is missing.
    pub fn equivalence(&self, sig: &Signature) -> Option<HomotopyEquivalence> {
        fn total<T>(sig: &Signature, m: &BTreeMap<String, T>) -> bool {
            sig.sorts().iter().all(|s| m.contains_key(s))
        }
        if total(sig, &self.inverses) && total(sig, &self.unit) && total(sig, &self.counit) {
            Some(HomotopyEquivalence {
                map: self.map.clone(),
                inverses: self.inverses.clone(),
                unit: self.unit.clone(),
                counit: self.counit.clone(),
            })
        } else {
            None
        }
    }
}

/// Reads a comparison map file between two named groupoid structures over
/// `sig`. Object images are indices; morphisms are referred to by the names
/// the structure files declared. The returned data is *not* yet checked for
/// functoriality or naturality — pass it to the comparison checkers.
pub fn parse_comparison(
    text: &str,
    sig: &Signature,
    m: &NamedGroupoidStructure,
    n: &NamedGroupoidStructure,
) -> Result<ParsedComparison, FormatError> {
    enum Block {
        None,
        /// `sort` or `inverse` block: (line, sort, obj rows, mor rows, fwd?).
        Functor {
            line: usize,
            sort: String,
            obj_rows: Vec<(usize, usize, usize)>,
            mor_rows: Vec<(usize, String, String)>,
            forward: bool,
        },
        /// `cell` block: symbol plus rows `(line, arg objects, morphism name)`.
        Cell {
            symbol: String,
            rows: Vec<(usize, Vec<usize>, String)>,
        },
    }

    // (line, sort, obj rows, mor rows, forward?) — `obj` rows are
    // (line, src, dst) and `mor` rows (line, src name, dst name).
    type FunctorBlock = (
        usize,
        String,
        Vec<(usize, usize, usize)>,
        Vec<(usize, String, String)>,
        bool,
    );
    // Symbol name plus rows (line, argument objects, filler morphism name).
    type CellBlock = (String, Vec<(usize, Vec<usize>, String)>);
    let mut block = Block::None;
    let mut sort_blocks: Vec<FunctorBlock> = Vec::new();
    let mut cell_blocks: Vec<CellBlock> = Vec::new();
    let mut unit: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut counit: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();

    for (no, line) in content_lines(text) {
        match &mut block {
            Block::None => {
                if let Some(rest) = line.strip_prefix("sort ") {
                    block = Block::Functor {
                        line: no,
                        sort: ident(no, rest)?,
                        obj_rows: Vec::new(),
                        mor_rows: Vec::new(),
                        forward: true,
                    };
                } else if let Some(rest) = line.strip_prefix("inverse ") {
                    block = Block::Functor {
                        line: no,
                        sort: ident(no, rest)?,
                        obj_rows: Vec::new(),
                        mor_rows: Vec::new(),
                        forward: false,
                    };
                } else if let Some(rest) = line.strip_prefix("cell ") {
                    block = Block::Cell {
                        symbol: ident(no, rest)?,
                        rows: Vec::new(),
                    };
                } else if let Some(rest) = line.strip_prefix("unit ") {
                    let (sort, names) = rest
                        .split_once('=')
                        .ok_or_else(|| err(no, "expected `unit S = m1 m2 …`"))?;
                    let sort = ident(no, sort)?;
                    let rows = names
                        .split_whitespace()
                        .map(|x| Ok((no, ident(no, x)?)))
                        .collect::<Result<Vec<_>, FormatError>>()?;
                    if unit.insert(sort.clone(), rows).is_some() {
                        return Err(err(no, format!("`unit {sort}` given twice")));
                    }
                } else if let Some(rest) = line.strip_prefix("counit ") {
                    let (sort, names) = rest
                        .split_once('=')
                        .ok_or_else(|| err(no, "expected `counit S = m1 m2 …`"))?;
                    let sort = ident(no, sort)?;
                    let rows = names
                        .split_whitespace()
                        .map(|x| Ok((no, ident(no, x)?)))
                        .collect::<Result<Vec<_>, FormatError>>()?;
                    if counit.insert(sort.clone(), rows).is_some() {
                        return Err(err(no, format!("`counit {sort}` given twice")));
                    }
                } else {
                    return Err(err(
                        no,
                        format!(
                            "expected `sort`, `inverse`, `cell`, `unit`, or `counit`, found `{line}`"
                        ),
                    ));
                }
            }
            Block::Functor {
                obj_rows, mor_rows, ..
            } => {
                if line == "end" {
                    if let Block::Functor {
                        line,
                        sort,
                        obj_rows,
                        mor_rows,
                        forward,
                    } = std::mem::replace(&mut block, Block::None)
                    {
                        sort_blocks.push((line, sort, obj_rows, mor_rows, forward));
                    }
                } else if let Some(rest) = line.strip_prefix("obj") {
                    let (src, dst) = arrow(no, rest)?;
                    obj_rows.push((no, number(no, src)?, number(no, dst)?));
                } else if let Some(rest) = line.strip_prefix("mor") {
                    let (src, dst) = arrow(no, rest)?;
                    mor_rows.push((no, ident(no, src)?, ident(no, dst)?));
                } else {
                    return Err(err(
                        no,
                        format!("expected `obj`, `mor`, or `end`, found `{line}`"),
                    ));
                }
            }
            Block::Cell { rows, .. } => {
                if line == "end" {
                    if let Block::Cell { symbol, rows } =
                        std::mem::replace(&mut block, Block::None)
                    {
                        cell_blocks.push((symbol, rows));
                    }
                } else {
                    let (args, out) = arrow(no, line)?;
                    let args = args
                        .split_whitespace()
                        .map(|a| number(no, a))
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push((no, args, ident(no, out)?));
                }
            }
        }
    }
    if !matches!(block, Block::None) {
        return Err(FormatError::Structure("unterminated block: missing `end`".into()));
    }

    // Resolve functor blocks into total object/morphism index maps.
    let build_functor = |line: usize,
                         sort: &str,
                         obj_rows: &[(usize, usize, usize)],
                         mor_rows: &[(usize, String, String)],
                         dom: &NamedGroupoidStructure,
                         cod: &NamedGroupoidStructure|
     -> Result<crate::groupoid::PlainFunctor, FormatError> {
        let dg = dom
            .structure
            .carriers
            .get(sort)
            .ok_or_else(|| err(line, format!("unknown sort `{sort}`")))?;
        let mut obj_map = vec![usize::MAX; dg.n_objects()];
        for &(no, src, dst) in obj_rows {
            if src >= dg.n_objects() {
                return Err(err(no, format!("object {src} out of range for `{sort}`")));
            }
            if obj_map[src] != usize::MAX {
                return Err(err(no, format!("object {src} mapped twice")));
            }
            obj_map[src] = dst;
        }
        if let Some(missing) = obj_map.iter().position(|&x| x == usize::MAX) {
            return Err(err(
                line,
                format!("no `obj` row for object {missing} of `{sort}`"),
            ));
        }
        let mut mor_map = vec![usize::MAX; dg.n_mors()];
        for (no, src, dst) in mor_rows {
            let s = dom.mor(*no, sort, src)?;
            let d = cod.mor(*no, sort, dst)?;
            if mor_map[s] != usize::MAX {
                return Err(err(*no, format!("morphism `{src}` mapped twice")));
            }
            mor_map[s] = d;
        }
        if let Some(missing) = mor_map.iter().position(|&x| x == usize::MAX) {
            let name = &dom.mor_names[sort][missing];
            return Err(err(
                line,
                format!("no `mor` row for morphism `{name}` of `{sort}`"),
            ));
        }
        Ok(crate::groupoid::PlainFunctor { obj_map, mor_map })
    };

    let mut sorts = BTreeMap::new();
    let mut inverses = BTreeMap::new();
    for (line, sort, obj_rows, mor_rows, forward) in &sort_blocks {
        let (dom, cod, target): (_, _, &mut BTreeMap<_, _>) = if *forward {
            (m, n, &mut sorts)
        } else {
            (n, m, &mut inverses)
        };
        let f = build_functor(*line, sort, obj_rows, mor_rows, dom, cod)?;
        if target.insert(sort.clone(), f).is_some() {
            return Err(err(*line, format!("sort `{sort}` given twice")));
        }
    }
    for s in sig.sorts() {
        if !sorts.contains_key(s) {
            return Err(FormatError::Structure(format!(
                "no `sort {s}` block: the forward map must cover every sort"
            )));
        }
    }

    // Resolve cell blocks: argument objects in M, filler morphism in N.
    let mut cells: BTreeMap<String, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    for (symbol, rows) in &cell_blocks {
        let decl = sig
            .func(symbol)
            .ok_or_else(|| FormatError::Structure(format!("unknown function symbol `{symbol}`")))?;
        let mut table = BTreeMap::new();
        for (no, args, out) in rows {
            if args.len() != decl.arity.len() {
                return Err(err(
                    *no,
                    format!(
                        "`{symbol}` takes {} argument(s), row has {}",
                        decl.arity.len(),
                        args.len()
                    ),
                ));
            }
            let val = n.mor(*no, &decl.codomain, out)?;
            if table.insert(args.clone(), val).is_some() {
                return Err(err(*no, format!("duplicate cell row for `{symbol}`")));
            }
        }
        if cells.insert(symbol.clone(), table).is_some() {
            return Err(FormatError::Structure(format!(
                "cell block for `{symbol}` given twice"
            )));
        }
    }
    for (name, _) in sig.functions() {
        if !cells.contains_key(name) {
            return Err(FormatError::Structure(format!(
                "no `cell {name}` block: every function symbol needs its fillers"
            )));
        }
    }

    // Resolve unit (morphisms of M) and counit (morphisms of N) components.
    let resolve_components = |table: BTreeMap<String, Vec<(usize, String)>>,
                              home: &NamedGroupoidStructure|
     -> Result<BTreeMap<String, Vec<usize>>, FormatError> {
        let mut out = BTreeMap::new();
        for (sort, rows) in table {
            let g = home
                .structure
                .carriers
                .get(&sort)
                .ok_or_else(|| FormatError::Structure(format!("unknown sort `{sort}`")))?;
            if rows.len() != g.n_objects() {
                let line = rows.first().map(|r| r.0).unwrap_or(0);
                return Err(err(
                    line,
                    format!(
                        "`{sort}` has {} object(s), got {} component(s)",
                        g.n_objects(),
                        rows.len()
                    ),
                ));
            }
            let mors = rows
                .into_iter()
                .map(|(no, name)| home.mor(no, &sort, &name))
                .collect::<Result<Vec<_>, _>>()?;
            out.insert(sort, mors);
        }
        Ok(out)
    };
    let unit = resolve_components(unit, m)?;
    let counit = resolve_components(counit, n)?;

    Ok(ParsedComparison {
        map: HomotopyHomomorphism { sorts, cells },
        inverses,
        unit,
        counit,
    })
}

// ---------------------------------------------------------------------------
// Proof terms
// ---------------------------------------------------------------------------

/// Parses a formula over the positional context of `sorts` and canonicalizes
/// it (bound variables renamed by binder depth).
pub fn parse_formula_in(
    sig: &Signature,
    sorts: &[String],
    text: &str,
) -> Result<Formula, FormatError> {
    let ctx = Context::positional(sorts);
    let phi = parse_formula(text.trim(), sig, &ctx)?;
    Ok(canonicalize(&phi, &ctx)?)
}

/// Parses a term over the positional context of `sorts`.
pub fn parse_term_in(sig: &Signature, sorts: &[String], text: &str) -> Result<Term, FormatError> {
    let ctx = Context::positional(sorts);
    Ok(parse_term(text.trim(), sig, &ctx)?)
}

/// Reads a proof term: functional syntax over the deduction constructor
/// names, with `;`-separated arguments, bracketed sort lists for contexts,
/// and the formula grammar (over `x1, x2, …`) for formulas. Newlines and
/// `#` comments may appear anywhere. The result is structurally well-formed
/// but not typechecked, except where a constructor's own syntax requires
/// inference (the equality-elimination target's context).
pub fn parse_deduction(text: &str, sig: &Signature) -> Result<Deduction, FormatError> {
    let cleaned = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    proof_expr(&cleaned, sig)
}

/// Splits at `sep` occurring outside any `()`/`[]` nesting.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i64;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn perr(msg: impl Into<String>) -> FormatError {
    FormatError::Line {
        line: 0,
        msg: msg.into(),
    }
}

fn ctx_arg(sig: &Signature, s: &str) -> Result<CtxObject, FormatError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| perr(format!("expected a context like `[A, B]`, found `{t}`")))?;
    let sorts = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|x| x.trim().to_string())
            .collect::<Vec<_>>()
    };
    for s in &sorts {
        if !sig.has_sort(s) {
            return Err(SyntaxError::UnknownSort(s.clone()).into());
        }
    }
    Ok(CtxObject::new(sorts))
}

fn proof_expr(s: &str, sig: &Signature) -> Result<Deduction, FormatError> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| perr(format!("expected `name(…)`, found `{s}`")))?;
    let name = s[..open].trim();
    if !s.ends_with(')') {
        return Err(perr(format!("unbalanced parentheses in `{s}`")));
    }
    let body = &s[open + 1..s.len() - 1];
    let args = split_top(body, ';');

    let need = |n: usize| -> Result<(), FormatError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(perr(format!(
                "`{name}` takes {n} argument(s) separated by `;`, got {}",
                args.len()
            )))
        }
    };
    let formula = |ctx: &CtxObject, s: &str| parse_formula_in(sig, ctx.sorts(), s);

    match name {
        "id" | "bang" | "absurd" | "forall_counit" | "exists_unit" => {
            need(2)?;
            let ctx = ctx_arg(sig, args[0])?;
            let p = formula(&ctx, args[1])?;
            Ok(match name {
                "id" => Deduction::Id { ctx, p },
                "bang" => Deduction::Bang { ctx, p },
                "absurd" => Deduction::Absurd { ctx, p },
                "forall_counit" => Deduction::ForallCounit { ctx, p },
                _ => Deduction::ExistsUnit { ctx, p },
            })
        }
        "proj1" | "proj2" | "inj1" | "inj2" | "eval" => {
            need(3)?;
            let ctx = ctx_arg(sig, args[0])?;
            let p = formula(&ctx, args[1])?;
            let q = formula(&ctx, args[2])?;
            Ok(match name {
                "proj1" => Deduction::Proj1 { ctx, p, q },
                "proj2" => Deduction::Proj2 { ctx, p, q },
                "inj1" => Deduction::Inj1 { ctx, p, q },
                "inj2" => Deduction::Inj2 { ctx, p, q },
                _ => Deduction::Eval { ctx, p, q },
            })
        }
        "comp" | "pair" | "case" => {
            need(2)?;
            let a = Box::new(proof_expr(args[0], sig)?);
            let b = Box::new(proof_expr(args[1], sig)?);
            Ok(match name {
                "comp" => Deduction::Comp(a, b),
                "pair" => Deduction::Pair(a, b),
                _ => Deduction::Case(a, b),
            })
        }
        "curry" | "lambda" | "mu" => {
            need(1)?;
            let f = Box::new(proof_expr(args[0], sig)?);
            Ok(match name {
                "curry" => Deduction::Curry(f),
                "lambda" => Deduction::Lambda(f),
                _ => Deduction::Mu(f),
            })
        }
        "refl" => {
            need(1)?;
            let sort = args[0].trim();
            if !sig.has_sort(sort) {
                return Err(SyntaxError::UnknownSort(sort.into()).into());
            }
            Ok(Deduction::Refl(sort.to_string()))
        }
        "xi" => {
            need(2)?;
            let f = proof_expr(args[0], sig)?;
            // The target lives over the doubled context (B, B); find B by
            // typing the premise proof, whose context must be a single sort.
            let seq = typecheck(sig, &f)?;
            let sorts = seq.context.sorts();
            if sorts.len() != 1 {
                return Err(perr(format!(
                    "the first argument of `xi` must live over a one-sort context, found `{}`",
                    seq.context
                )));
            }
            let doubled = vec![sorts[0].clone(), sorts[0].clone()];
            let target = parse_formula_in(sig, &doubled, args[1])?;
            Ok(Deduction::Xi(Box::new(f), target))
        }
        "reindex" => {
            need(4)?;
            let dom = ctx_arg(sig, args[0])?;
            let cod = ctx_arg(sig, args[1])?;
            let terms = if args[2].trim().is_empty() {
                Vec::new()
            } else {
                split_top(args[2], ',')
                    .iter()
                    .map(|t| parse_term_in(sig, dom.sorts(), t))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let t = TermMorphism::new(sig, dom, cod, terms)
                .map_err(|e| FormatError::Proof(ProofError::Cat(e)))?;
            let f = Box::new(proof_expr(args[3], sig)?);
            Ok(Deduction::Reindex(t, f))
        }
        "" => Err(perr("missing constructor name before `(`")),
        other => Err(perr(format!("unknown proof constructor `{other}`"))),
    }
}
