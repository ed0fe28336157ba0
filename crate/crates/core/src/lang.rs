//! Text syntax for Lie polynomials, identity files, and the Grassmann and
//! matrix values that appear in witnesses.
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*  |  '0'
//! term    := [coeff ('*' | '·')] bracket  |  [coeff ('*' | '·')] var
//! bracket := '[' item (',' item)+ ']'
//! item    := (bracket | var) ['^' '(' int ')']
//! var     := letter digits?
//! coeff   := int ['/' int]
//! ```
//!
//! Lists are left-normalized and `z^(m)` repeats its item `m >= 1` times.
//! The printer is [`LiePoly`]'s `Display`, which emits this grammar with `*`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::BigInt;

use crate::freelie::{LiePoly, LieTerm, Var};
use crate::grassmann::{GrassmannContext, GrassmannElement, GrassmannWord};
use crate::scalars::{Field, Scalar};
use crate::supermatrix::{MatrixError, SuperMatrix};

pub type Span = Range<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnicodeMinus,
    ZeroPower,
    SingleItemBracket,
    BadNumber(String),
    Value(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at {}..{}", span.start, span.end)]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnicodeMinus => f.write_str("unicode minus sign; use ASCII '-'"),
            ParseErrorKind::ZeroPower => f.write_str("power must be at least 1"),
            ParseErrorKind::SingleItemBracket => f.write_str("bracket needs at least two items"),
            ParseErrorKind::BadNumber(s) => write!(f, "bad number {s:?}"),
            ParseErrorKind::Value(s) => f.write_str(s),
        }
    }
}

/// Non-fatal notes produced while lowering, e.g. a term that vanishes
/// because it contains `[a, a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)
    }
}

// ---------------------------------------------------------------------------
// Source trees

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceItem {
    Var { var: Var, span: Span },
    List { items: Vec<(SourceItem, u32)>, span: Span },
}

impl SourceItem {
    pub fn span(&self) -> Span {
        match self {
            SourceItem::Var { span, .. } | SourceItem::List { span, .. } => span.clone(),
        }
    }

    /// Desugars lists and powers into a bracket tree.
    pub fn to_term(&self) -> LieTerm {
        match self {
            SourceItem::Var { var, .. } => LieTerm::Var(*var),
            SourceItem::List { items, .. } => LieTerm::left_normed(
                items
                    .iter()
                    .flat_map(|(it, m)| core::iter::repeat_n(it.to_term(), *m as usize)),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceTerm {
    pub negative: bool,
    /// Coefficient literal as written (`"3"`, `"3/2"`), if any.
    pub coeff: Option<(String, Span)>,
    pub body: SourceItem,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceExpr {
    pub terms: Vec<SourceTerm>,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn err<T>(&self, kind: ParseErrorKind, start: usize) -> Result<T, ParseError> {
        Err(ParseError {
            span: start..self.pos.max(start + 1).min(self.src.len().max(start + 1)),
            kind,
        })
    }

    fn unexpected<T>(&mut self) -> Result<T, ParseError> {
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError {
                span: self.src.len()..self.src.len(),
                kind: ParseErrorKind::UnexpectedEnd,
            }),
            Some('−') => {
                let s = self.pos;
                Err(ParseError {
                    span: s..s + '−'.len_utf8(),
                    kind: ParseErrorKind::UnicodeMinus,
                })
            }
            Some(c) => {
                let s = self.pos.max(start);
                Err(ParseError {
                    span: s..s + c.len_utf8(),
                    kind: ParseErrorKind::UnexpectedChar(c),
                })
            }
        }
    }

    fn expect(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(d) if d == c => {
                self.bump();
                Ok(())
            }
            None => self.unexpected(),
            Some('−') => self.unexpected(),
            Some(_) => {
                let s = self.pos;
                Err(ParseError {
                    span: s..s + 1,
                    kind: ParseErrorKind::Expected(what),
                })
            }
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }
}

fn parse_var(lx: &mut Lexer<'_>) -> Result<SourceItem, ParseError> {
    lx.skip_ws();
    let start = lx.pos;
    let c = match lx.peek_raw() {
        Some(c) if c.is_ascii_alphabetic() => c,
        _ => return lx.unexpected(),
    };
    lx.pos += 1;
    let digits = lx.digits();
    let var = if digits.is_empty() {
        Var::named(c)
    } else {
        let sub: u32 = digits
            .parse()
            .map_err(|_| ParseError {
                span: start..lx.pos,
                kind: ParseErrorKind::BadNumber(digits.to_string()),
            })?;
        Var::indexed(c, sub)
    };
    Ok(SourceItem::Var {
        var,
        span: start..lx.pos,
    })
}

fn parse_item(lx: &mut Lexer<'_>) -> Result<(SourceItem, u32), ParseError> {
    let item = match lx.peek() {
        Some('[') => parse_bracket(lx)?,
        _ => parse_var(lx)?,
    };
    if lx.peek() != Some('^') {
        return Ok((item, 1));
    }
    lx.bump();
    lx.expect('(', "'(' after '^'")?;
    lx.skip_ws();
    let start = lx.pos;
    let digits = lx.digits();
    if digits.is_empty() {
        return lx.unexpected();
    }
    let m: u32 = digits.parse().map_err(|_| ParseError {
        span: start..lx.pos,
        kind: ParseErrorKind::BadNumber(digits.to_string()),
    })?;
    if m == 0 {
        return lx.err(ParseErrorKind::ZeroPower, start);
    }
    lx.expect(')', "')' closing the power")?;
    Ok((item, m))
}

fn parse_bracket(lx: &mut Lexer<'_>) -> Result<SourceItem, ParseError> {
    lx.skip_ws();
    let start = lx.pos;
    lx.expect('[', "'['")?;
    let mut items = alloc::vec![parse_item(lx)?];
    loop {
        match lx.peek() {
            Some(',') => {
                lx.bump();
                items.push(parse_item(lx)?);
            }
            Some(']') => {
                lx.bump();
                break;
            }
            _ => return lx.unexpected(),
        }
    }
    if items.len() == 1 && items[0].1 == 1 {
        return Err(ParseError {
            span: start..lx.pos,
            kind: ParseErrorKind::SingleItemBracket,
        });
    }
    Ok(SourceItem::List {
        items,
        span: start..lx.pos,
    })
}

fn parse_coeff(lx: &mut Lexer<'_>) -> Option<(String, Span)> {
    lx.skip_ws();
    let start = lx.pos;
    let num = lx.digits();
    if num.is_empty() {
        return None;
    }
    let mut text = num.to_string();
    let save = lx.pos;
    if lx.peek() == Some('/') {
        lx.bump();
        lx.skip_ws();
        let den = lx.digits();
        if den.is_empty() {
            lx.pos = save;
        } else {
            text.push('/');
            text.push_str(den);
        }
    }
    Some((text, start..lx.pos))
}

fn parse_term(lx: &mut Lexer<'_>, negative: bool) -> Result<SourceTerm, ParseError> {
    lx.skip_ws();
    let start = lx.pos;
    let coeff = parse_coeff(lx);
    if coeff.is_some() {
        match lx.peek() {
            Some('*') | Some('·') => {
                lx.bump();
            }
            _ => {
                let s = lx.pos;
                return Err(ParseError {
                    span: s..s + 1,
                    kind: ParseErrorKind::Expected("'*' after coefficient"),
                });
            }
        }
    }
    let body = match lx.peek() {
        Some('[') => parse_bracket(lx)?,
        Some(c) if c.is_ascii_alphabetic() => parse_var(lx)?,
        _ => return lx.unexpected(),
    };
    Ok(SourceTerm {
        negative,
        coeff,
        body,
        span: start..lx.pos,
    })
}

/// Parses the concrete syntax into a source tree with spans.
pub fn parse_source(input: &str) -> Result<SourceExpr, ParseError> {
    let mut lx = Lexer::new(input);
    if input.trim() == "0" {
        return Ok(SourceExpr { terms: Vec::new() });
    }
    let mut terms = Vec::new();
    let mut negative = false;
    if lx.peek() == Some('-') {
        lx.bump();
        negative = true;
    }
    terms.push(parse_term(&mut lx, negative)?);
    loop {
        match lx.peek() {
            None => break,
            Some('+') => {
                lx.bump();
                terms.push(parse_term(&mut lx, false)?);
            }
            Some('-') => {
                lx.bump();
                terms.push(parse_term(&mut lx, true)?);
            }
            _ => return lx.unexpected(),
        }
    }
    Ok(SourceExpr { terms })
}

/// Lowers a source tree to a Lie polynomial over `field`.
pub fn lower(src: &SourceExpr, field: Field) -> Result<(LiePoly, Vec<Warning>), ParseError> {
    let mut poly = LiePoly::zero(field);
    let mut warnings = Vec::new();
    for t in &src.terms {
        let mut c = match &t.coeff {
            None => Scalar::one(field),
            Some((text, span)) => Scalar::parse(field, text).map_err(|e| ParseError {
                span: span.clone(),
                kind: ParseErrorKind::Value(e.to_string()),
            })?,
        };
        if t.negative {
            c = -c;
        }
        let term = t.body.to_term();
        if term.has_square_bracket() {
            warnings.push(Warning {
                span: t.span.clone(),
                message: format!("term {term} contains a bracket [a,a] and is zero"),
            });
            continue;
        }
        let single = LiePoly::from_term(c, term);
        poly = poly.try_add(&single).expect("same field");
    }
    Ok((poly, warnings))
}

/// Parses and lowers in one step.
pub fn parse(input: &str, field: Field) -> Result<(LiePoly, Vec<Warning>), ParseError> {
    lower(&parse_source(input)?, field)
}

/// Parses a polynomial and fails on any warning-free syntax error only.
pub fn parse_poly(input: &str, field: Field) -> Result<LiePoly, ParseError> {
    parse(input, field).map(|(p, _)| p)
}

// ---------------------------------------------------------------------------
// Identity files

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedIdentity {
    pub name: String,
    pub poly: LiePoly,
    pub line: usize,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentityFileError {
    #[error("line {line}: expected `name: expression = 0`")]
    Malformed { line: usize },
    #[error("line {line}: duplicate identity name {name:?} (first defined on line {first})")]
    Duplicate { name: String, line: usize, first: usize },
    #[error("line {line}: {error}")]
    Syntax { line: usize, error: ParseError },
}

/// Parses lines `name: expr = 0`; `#` starts a comment, blank lines are
/// skipped, names must be unique.
pub fn parse_identity_str(text: &str, field: Field) -> Result<Vec<NamedIdentity>, IdentityFileError> {
    let mut out: Vec<NamedIdentity> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (name, rest) = body.split_once(':').ok_or(IdentityFileError::Malformed { line })?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(IdentityFileError::Malformed { line });
        }
        let expr = rest
            .trim()
            .strip_suffix('0')
            .and_then(|s| s.trim_end().strip_suffix('='))
            .ok_or(IdentityFileError::Malformed { line })?;
        let (poly, warnings) = parse(expr, field).map_err(|error| IdentityFileError::Syntax { line, error })?;
        if let Some(&first) = seen.get(name) {
            return Err(IdentityFileError::Duplicate {
                name: name.to_string(),
                line,
                first,
            });
        }
        seen.insert(name.to_string(), line);
        out.push(NamedIdentity {
            name: name.to_string(),
            poly,
            line,
            warnings,
        });
    }
    Ok(out)
}

/// Letters, digits, `_` and `-`, starting with a letter or `_`.
pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

// ---------------------------------------------------------------------------
// Values

/// Parses a Grassmann element printed as `2·e1e2 − 3·e3e4 + 1` (ASCII `*`
/// and `-` also accepted). Coefficients must be constants.
pub fn parse_grassmann(text: &str, ctx: GrassmannContext) -> Result<GrassmannElement, ParseError> {
    let s = text.trim();
    let mut acc = GrassmannElement::zero(ctx);
    if s == "0" {
        return Ok(acc);
    }
    let value_err = |span: Span, msg: String| ParseError {
        span,
        kind: ParseErrorKind::Value(msg),
    };
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    let mut negative = false;
    let mut first = true;
    while i < chars.len() {
        // sign
        while i < chars.len() && chars[i].1.is_whitespace() {
            i += 1;
        }
        if i < chars.len() && (chars[i].1 == '-' || chars[i].1 == '−' || chars[i].1 == '+') {
            negative = chars[i].1 != '+';
            i += 1;
        } else if !first {
            let at = chars.get(i).map(|c| c.0).unwrap_or(s.len());
            return Err(ParseError {
                span: at..at + 1,
                kind: ParseErrorKind::Expected("'+' or '-' between terms"),
            });
        }
        first = false;
        while i < chars.len() && chars[i].1.is_whitespace() {
            i += 1;
        }
        let start = chars.get(i).map(|c| c.0).unwrap_or(s.len());
        let mut j = i;
        while j < chars.len() && !matches!(chars[j].1, '+' | '-' | '−') {
            j += 1;
        }
        let end = chars.get(j).map(|c| c.0).unwrap_or(s.len());
        let piece = s[start..end].trim();
        if piece.is_empty() {
            return Err(ParseError {
                span: start..end.max(start + 1),
                kind: ParseErrorKind::UnexpectedEnd,
            });
        }
        let (coeff, word) = match piece.split_once(['·', '*']) {
            Some((c, w)) => (Some(c.trim()), w.trim()),
            None if piece.starts_with('e') => (None, piece),
            None => (Some(piece), "1"),
        };
        let c = match coeff {
            None => Scalar::one(ctx.field),
            Some(c) => Scalar::parse(ctx.field, c).map_err(|e| value_err(start..end, e.to_string()))?,
        };
        let c = if negative { -c } else { c };
        let w = parse_word(word).ok_or_else(|| value_err(start..end, format!("bad Grassmann word {word:?}")))?;
        let term = GrassmannElement::scalar_word(ctx, w, c).map_err(|e| value_err(start..end, e.to_string()))?;
        acc = acc.add(&term).map_err(|e| value_err(start..end, e.to_string()))?;
        i = j;
    }
    Ok(acc)
}

/// `"e1e2e5"` or `"1"`; generators must be strictly increasing.
pub fn parse_word(text: &str) -> Option<GrassmannWord> {
    if text == "1" {
        return Some(GrassmannWord::EMPTY);
    }
    let mut gens = Vec::new();
    for part in text.split('e').skip(1) {
        let g: u32 = part.parse().ok()?;
        if g == 0 || gens.last().is_some_and(|&l| l >= g) {
            return None;
        }
        gens.push(g);
    }
    if gens.is_empty() || !text.starts_with('e') {
        return None;
    }
    Some(GrassmannWord::from_generators(&gens))
}

/// Parses `((a, b), (d, c))` as printed by [`SuperMatrix`]'s `Display`.
pub fn parse_matrix(text: &str, ctx: GrassmannContext) -> Result<SuperMatrix, ParseError> {
    let s = text.trim();
    let bad = |msg: &str| ParseError {
        span: 0..s.len(),
        kind: ParseErrorKind::Value(msg.to_string()),
    };
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad("matrix must look like ((a, b), (d, c))"))?;
    let rows = split_top(inner);
    if rows.len() != 2 {
        return Err(bad("matrix needs two rows"));
    }
    let mut cells = Vec::new();
    for r in rows {
        let r = r.trim();
        let r = r
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| bad("row must look like (x, y)"))?;
        let parts = split_top(r);
        if parts.len() != 2 {
            return Err(bad("row needs two entries"));
        }
        for p in parts {
            cells.push(parse_grassmann(p, ctx)?);
        }
    }
    let mut it = cells.into_iter();
    let (a, b, d, c) = (
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    );
    SuperMatrix::new(a, b, d, c).map_err(|e| match e {
        MatrixError::Parity { entry } => bad(&format!("entry {entry} has the wrong parity")),
        other => bad(&other.to_string()),
    })
}

fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Smallest generator budget able to hold every word in `text`; used to
/// size the context before parsing a witness.
pub fn max_generator_in(text: &str) -> u32 {
    let mut best = 0;
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'e' {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(g) = text[i + 1..j].parse::<u32>() {
                best = best.max(g);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

/// Variables of an expression in first-occurrence order (for reports).
pub fn variables_in_order(src: &SourceExpr) -> Vec<Var> {
    fn walk(it: &SourceItem, seen: &mut BTreeSet<Var>, out: &mut Vec<Var>) {
        match it {
            SourceItem::Var { var, .. } => {
                if seen.insert(*var) {
                    out.push(*var);
                }
            }
            SourceItem::List { items, .. } => items.iter().for_each(|(i, _)| walk(i, seen, out)),
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in &src.terms {
        walk(&t.body, &mut seen, &mut out);
    }
    out
}

/// Rational scalar from machine integers (test and library helper).
pub fn rational(n: i64, d: i64) -> Scalar {
    Scalar::rational(BigInt::from(n), BigInt::from(d)).expect("nonzero denominator")
}
