//! Ground terms over a finite ranked signature.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index into a [`Signature`]'s symbol table.
pub type SymbolId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("signature has no constant symbol")]
    NoConstants,
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
}

/// A finite ranked alphabet. Symbol ids are dense indices in declaration
/// order. At least one symbol must be a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
    by_name: HashMap<String, SymbolId>,
    max_arity: usize,
}

fn valid_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '='))
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: Vec<(S, usize)>) -> Result<Self, SignatureError> {
        let mut by_name = HashMap::new();
        let mut table = Vec::with_capacity(symbols.len());
        let mut max_arity = 0;
        let mut has_constant = false;
        for (name, arity) in symbols {
            let name = name.into();
            if !valid_symbol_name(&name) {
                return Err(SignatureError::InvalidName(name));
            }
            if by_name.insert(name.clone(), table.len()).is_some() {
                return Err(SignatureError::DuplicateSymbol(name));
            }
            max_arity = max_arity.max(arity);
            has_constant |= arity == 0;
            table.push((name, arity));
        }
        if !has_constant {
            return Err(SignatureError::NoConstants);
        }
        Ok(Signature {
            symbols: table,
            by_name,
            max_arity,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, s: SymbolId) -> usize {
        self.symbols[s].1
    }

    pub fn name(&self, s: SymbolId) -> &str {
        &self.symbols[s].0
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// True when every symbol has arity 0 or 1.
    pub fn is_unary(&self) -> bool {
        self.max_arity <= 1
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        0..self.symbols.len()
    }

    pub fn constants(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, (_, a))| *a == 0)
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("symbol `{name}` has arity {expected} but was applied to {got} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
}

/// A ground term: a symbol applied to exactly `arity` child terms.
/// Structural equality and ordering; value-like at this interface even
/// when shared inside a dag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    symbol: SymbolId,
    children: Vec<Term>,
}

impl Term {
    pub fn new(sig: &Signature, symbol: SymbolId, children: Vec<Term>) -> Result<Self, TermError> {
        let expected = sig.arity(symbol);
        if children.len() != expected {
            return Err(TermError::ArityMismatch {
                name: sig.name(symbol).to_string(),
                expected,
                got: children.len(),
            });
        }
        Ok(Term { symbol, children })
    }

    pub fn constant(sig: &Signature, symbol: SymbolId) -> Result<Self, TermError> {
        Term::new(sig, symbol, Vec::new())
    }

    // For rebuilding terms from dag vertices, whose shapes were validated
    // when they were interned.
    pub(crate) fn from_parts_unchecked(symbol: SymbolId, children: Vec<Term>) -> Self {
        Term { symbol, children }
    }

    pub fn symbol(&self) -> SymbolId {
        self.symbol
    }

    pub fn children(&self) -> &[Term] {
        &self.children
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    /// 0 for constants, otherwise 1 + max child height.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// All distinct subterms, including the term itself.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        for c in &self.children {
            c.collect_subterms(out);
        }
        out.insert(self.clone());
    }

    /// Subterm at a 1-based position, if valid.
    pub fn at(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in &pos.0 {
            cur = cur.children.get(i.checked_sub(1)?)?;
        }
        Some(cur)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }

    pub fn to_text(&self, sig: &Signature) -> String {
        self.display(sig).to_string()
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sig.name(self.term.symbol))?;
        if !self.term.children.is_empty() {
            write!(f, "(")?;
            for (i, c) in self.term.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", c.display(self.sig))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A position in a term: a sequence of 1-based child indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One spine level of a 1-context: a symbol, which child carries the hole,
/// and the remaining children as complete terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextFrame {
    pub symbol: SymbolId,
    /// 0-based child index of the hole.
    pub hole_index: usize,
    /// The other `arity - 1` children, in child order with the hole omitted.
    pub fillers: Vec<Term>,
}

/// A 1-context over the signature: a term with exactly one hole. Stored as
/// the spine of frames from the root down to the hole; the empty spine is
/// the hole itself.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context1 {
    frames: Vec<ContextFrame>,
}

impl Context1 {
    pub fn hole() -> Self {
        Context1 { frames: Vec::new() }
    }

    pub fn from_frames(frames: Vec<ContextFrame>) -> Self {
        Context1 { frames }
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[ContextFrame] {
        &self.frames
    }

    /// Wraps the context in one more frame at the outside.
    pub fn wrapped(mut self, frame: ContextFrame) -> Self {
        self.frames.insert(0, frame);
        self
    }

    /// Position of the hole.
    pub fn addr(&self) -> Position {
        Position(self.frames.iter().map(|f| f.hole_index + 1).collect())
    }

    /// Replaces the hole by `t`.
    pub fn plug(&self, t: &Term) -> Term {
        let mut acc = t.clone();
        for frame in self.frames.iter().rev() {
            let mut children = frame.fillers.clone();
            children.insert(frame.hole_index, acc);
            acc = Term {
                symbol: frame.symbol,
                children,
            };
        }
        acc
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermParseError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` has arity {expected} but was applied to {got} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("trailing input after term")]
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Open,
    Close,
    Comma,
}

fn tokenize(input: &str) -> Result<Vec<Token>, TermParseError> {
    let mut tokens = Vec::new();
    let mut name = String::new();
    for c in input.chars() {
        let tok = match c {
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            ',' => Some(Token::Comma),
            '=' => return Err(TermParseError::UnexpectedChar('=')),
            c if c.is_whitespace() => None,
            c => {
                name.push(c);
                continue;
            }
        };
        if !name.is_empty() {
            tokens.push(Token::Name(std::mem::take(&mut name)));
        }
        if let Some(tok) = tok {
            tokens.push(tok);
        }
    }
    if !name.is_empty() {
        tokens.push(Token::Name(name));
    }
    Ok(tokens)
}

struct TermParser<'a> {
    sig: &'a Signature,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    // Iterative with an explicit frame stack, so arbitrarily deep input
    // cannot overflow the call stack.
    fn term(&mut self) -> Result<Term, TermParseError> {
        struct Frame {
            name: String,
            symbol: SymbolId,
            children: Vec<Term>,
        }
        let mut frames: Vec<Frame> = Vec::new();
        'head: loop {
            let name = match self.next() {
                Some(Token::Name(n)) => n.clone(),
                Some(Token::Open) => return Err(TermParseError::UnexpectedChar('(')),
                Some(Token::Close) => return Err(TermParseError::UnexpectedChar(')')),
                Some(Token::Comma) => return Err(TermParseError::UnexpectedChar(',')),
                None => return Err(TermParseError::UnexpectedEnd),
            };
            let symbol = self
                .sig
                .lookup(&name)
                .ok_or(TermParseError::UnknownSymbol(name.clone()))?;
            let mut done = if matches!(self.peek(), Some(Token::Open)) {
                self.next();
                frames.push(Frame {
                    name,
                    symbol,
                    children: Vec::new(),
                });
                continue 'head;
            } else {
                let expected = self.sig.arity(symbol);
                if expected != 0 {
                    return Err(TermParseError::ArityMismatch {
                        name,
                        expected,
                        got: 0,
                    });
                }
                Term {
                    symbol,
                    children: Vec::new(),
                }
            };
            loop {
                let Some(top) = frames.last_mut() else {
                    return Ok(done);
                };
                match self.next() {
                    Some(Token::Comma) => {
                        top.children.push(done);
                        continue 'head;
                    }
                    Some(Token::Close) => {
                        top.children.push(done);
                        let frame = frames.pop().expect("frame present");
                        let expected = self.sig.arity(frame.symbol);
                        if frame.children.len() != expected {
                            return Err(TermParseError::ArityMismatch {
                                name: frame.name,
                                expected,
                                got: frame.children.len(),
                            });
                        }
                        done = Term {
                            symbol: frame.symbol,
                            children: frame.children,
                        };
                    }
                    Some(Token::Open) => return Err(TermParseError::UnexpectedChar('(')),
                    Some(Token::Name(_)) => return Err(TermParseError::UnexpectedChar(' ')),
                    None => return Err(TermParseError::UnexpectedEnd),
                }
            }
        }
    }
}

/// Parses the concrete term syntax: constants are bare tokens, compound
/// terms are `f(t1,...,tm)`. Whitespace is insignificant.
pub fn parse_term(sig: &Signature, input: &str) -> Result<Term, TermParseError> {
    let tokens = tokenize(input)?;
    let mut parser = TermParser {
        sig,
        tokens,
        pos: 0,
    };
    let t = parser.term()?;
    if parser.pos != parser.tokens.len() {
        return Err(TermParseError::TrailingInput);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(vec![("#", 0), ("$", 0), ("f", 2), ("g", 1)]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(&sig(), s).unwrap()
    }

    #[test]
    fn signature_requires_a_constant() {
        let err = Signature::new(vec![("f", 1)]).unwrap_err();
        assert_eq!(err, SignatureError::NoConstants);
    }

    #[test]
    fn signature_rejects_duplicates_and_bad_names() {
        assert_eq!(
            Signature::new(vec![("#", 0), ("#", 1)]).unwrap_err(),
            SignatureError::DuplicateSymbol("#".into())
        );
        assert!(matches!(
            Signature::new(vec![("a=b", 0)]).unwrap_err(),
            SignatureError::InvalidName(_)
        ));
    }

    #[test]
    fn size_examples() {
        assert_eq!(t("#").size(), 1);
        assert_eq!(t("f(#,$)").size(), 3);
        assert_eq!(t("f(#,f(#,#))").size(), 5);
    }

    #[test]
    fn height_examples() {
        assert_eq!(t("#").height(), 0);
        assert_eq!(t("f(#,#)").height(), 1);
        assert_eq!(t("f(#,f(#,#))").height(), 2);
    }

    #[test]
    fn subterm_examples() {
        let subs = t("f(#,$)").subterms();
        assert_eq!(subs, [t("#"), t("$"), t("f(#,$)")].into_iter().collect());
        let subs = t("f(#,f(#,#))").subterms();
        assert_eq!(
            subs,
            [t("#"), t("f(#,#)"), t("f(#,f(#,#))")]
                .into_iter()
                .collect()
        );
        assert_eq!(t("#").subterms(), [t("#")].into_iter().collect());
    }

    #[test]
    fn plug_examples() {
        let sig = sig();
        assert_eq!(Context1::hole().plug(&t("#")), t("#"));

        // f(<>, #)
        let c = Context1::from_frames(vec![ContextFrame {
            symbol: sig.lookup("f").unwrap(),
            hole_index: 0,
            fillers: vec![t("#")],
        }]);
        assert_eq!(c.plug(&t("$")), t("f($,#)"));
        assert_eq!(c.addr(), Position(vec![1]));

        // g(f(<>, #))
        let c = c.wrapped(ContextFrame {
            symbol: sig.lookup("g").unwrap(),
            hole_index: 0,
            fillers: vec![],
        });
        assert_eq!(c.plug(&t("g(#)")), t("g(f(g(#),#))"));
        assert_eq!(c.addr(), Position(vec![1, 1]));
        assert_eq!(c.plug(&t("g(#)")).at(&c.addr()), Some(&t("g(#)")));
    }

    #[test]
    fn plug_size_identity() {
        let c = Context1::from_frames(vec![ContextFrame {
            symbol: sig().lookup("f").unwrap(),
            hole_index: 1,
            fillers: vec![t("g(#)")],
        }]);
        let filler = t("f($,$)");
        // size(c) counts the hole as one symbol occurrence: f, g, #, hole.
        let ctx_size = 4;
        assert_eq!(c.plug(&filler).size(), ctx_size - 1 + filler.size());
    }

    #[test]
    fn parse_rejects_bad_input() {
        let sig = sig();
        assert_eq!(
            parse_term(&sig, "h"),
            Err(TermParseError::UnknownSymbol("h".into()))
        );
        assert!(matches!(
            parse_term(&sig, "f(#)"),
            Err(TermParseError::ArityMismatch { .. })
        ));
        assert_eq!(
            parse_term(&sig, "f(#,$) #"),
            Err(TermParseError::TrailingInput)
        );
        assert_eq!(parse_term(&sig, "f(#,"), Err(TermParseError::UnexpectedEnd));
    }

    #[test]
    fn parser_handles_very_deep_input() {
        let sig = Signature::new(vec![("#", 0), ("f", 1)]).unwrap();
        let depth = 10_000;
        let text = format!("{}#{}", "f(".repeat(depth), ")".repeat(depth));
        let t = parse_term(&sig, &text).unwrap();
        assert_eq!(t.symbol(), sig.lookup("f").unwrap());
        let mut dag = crate::gtes::SubtermDag::new();
        dag.intern_term(&t);
        assert_eq!(dag.len(), depth + 1);
    }

    #[test]
    fn term_constructor_checks_arity() {
        let sig = sig();
        let f = sig.lookup("f").unwrap();
        let hash = Term::constant(&sig, sig.lookup("#").unwrap()).unwrap();
        assert!(matches!(
            Term::new(&sig, f, vec![hash]),
            Err(TermError::ArityMismatch { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_term(depth: u32) -> BoxedStrategy<Term> {
            let sig = sig();
            let leaf = prop_oneof![Just(t("#")), Just(t("$"))];
            leaf.prop_recursive(depth, 64, 2, move |inner| {
                let sig = sig.clone();
                let sig2 = sig.clone();
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(move |(a, b)| Term::new(
                        &sig,
                        sig.lookup("f").unwrap(),
                        vec![a, b]
                    )
                    .unwrap()),
                    inner.prop_map(
                        move |a| Term::new(&sig2, sig2.lookup("g").unwrap(), vec![a]).unwrap()
                    ),
                ]
            })
            .boxed()
        }

        proptest! {
            #[test]
            fn print_parse_roundtrip(t in arb_term(4)) {
                let sig = sig();
                let printed = t.to_text(&sig);
                prop_assert_eq!(parse_term(&sig, &printed).unwrap(), t);
            }

            #[test]
            fn height_below_size(t in arb_term(4)) {
                prop_assert!(t.height() < t.size());
            }

            #[test]
            fn subterms_are_subterm_closed(t in arb_term(3)) {
                let subs = t.subterms();
                prop_assert!(subs.len() <= t.size());
                for s in &subs {
                    for inner in s.subterms() {
                        prop_assert!(subs.contains(&inner));
                    }
                }
            }
        }
    }
}
