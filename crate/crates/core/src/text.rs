//! Text grammar.
//!
//! ```text
//! document  := header* element
//! header    := "# name:" text | "# ring:" primes      (one line each)
//! element   := piece (";" piece)*
//! piece     := "(" endpoint "," endpoint "):" matrix
//! endpoint  := "-inf" | "+inf" | number
//! matrix    := "[[" rational "," rational "],[" rational "," rational "]]"
//! number    := "-"? rational [ ("+" | "-") rational "*sqrt(" digits ")" ]
//!            | "-"? rational "*sqrt(" digits ")"
//! rational  := digits [ "/" digits ]
//! primes    := [ digits ("," digits)* ]
//! ```
//!
//! Whitespace is allowed between tokens, and other lines starting with `#`
//! are comments. [`format_document`] writes the normal form back with no
//! spaces, one piece list per line.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::constructions::IntervalSpec;
use crate::moebius::{MatrixError, Sl2};
use crate::numbers::{ExtReal, NumberError, PrimeSet, Quadratic, Rational};
use crate::piecewise::{PPMap, Piece, Violation};

/// A position in the input, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unexpected trailing input")]
    Trailing,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("invalid element: {0}")]
    Invalid(Box<Violation>),
    #[error("piece is not over the declared ring {0}")]
    NotInRing(PrimeSet),
    #[error("duplicate header {0:?}")]
    DuplicateHeader(&'static str),
}

impl ParseErrorKind {
    /// Syntax problems, as opposed to well-formed input that fails an
    /// invariant.
    pub fn is_syntax(&self) -> bool {
        matches!(
            self,
            Self::Expected(_) | Self::Trailing | Self::ZeroDenominator | Self::DuplicateHeader(_)
        )
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{location}: {kind}")]
pub struct ParseError {
    pub location: Location,
    pub kind: ParseErrorKind,
}

/// A parsed document: the element and its optional headers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementDocument {
    pub name: Option<String>,
    pub ring: Option<PrimeSet>,
    pub element: PPMap,
}

impl ElementDocument {
    pub fn new(element: PPMap) -> Self {
        Self {
            name: None,
            ring: None,
            element,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    /// Offset added to reported lines, for fragments of a larger input.
    line_base: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line_base: 0,
        }
    }

    fn location_of(&self, pos: usize) -> Location {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1 + self.line_base;
        let start = before.rfind('\n').map_or(0, |i| i + 1);
        Location {
            line,
            column: before[start..].chars().count() + 1,
        }
    }

    fn error_at(&self, pos: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
        ParseError {
            location: self.location_of(pos),
            kind: kind.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &'static str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error_at(self.pos, ParseErrorKind::Expected(token)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error_at(self.pos, ParseErrorKind::Trailing))
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error_at(self.pos, ParseErrorKind::Expected("digits")));
        }
        self.pos += len;
        Ok(rest[..len].parse().expect("ascii digits"))
    }

    /// `digits ["/" digits]`, without sign.
    fn unsigned_rational(&mut self) -> Result<Rational, ParseError> {
        let n = self.digits()?;
        let save = self.pos;
        if self.eat("/") {
            let at = self.pos;
            let d = self.digits()?;
            if d.is_zero() {
                return Err(self.error_at(at, ParseErrorKind::ZeroDenominator));
            }
            return Ok(Rational::new(n, d));
        }
        self.pos = save;
        Ok(Rational::from_integer(n))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = self.eat("-");
        let r = self.unsigned_rational()?;
        Ok(if negative { -r } else { r })
    }

    fn sqrt_suffix(&mut self) -> Result<Option<BigInt>, ParseError> {
        if !self.eat("*") {
            return Ok(None);
        }
        self.expect("sqrt(")?;
        let d = self.digits()?;
        self.expect(")")?;
        Ok(Some(d))
    }

    fn number(&mut self) -> Result<Quadratic, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let first = self.rational()?;
        let built = if let Some(d) = self.sqrt_suffix()? {
            Quadratic::new(Rational::zero(), first, d)
        } else {
            let save = self.pos;
            let sign = if self.eat("+") {
                Some(false)
            } else if self.eat("-") {
                Some(true)
            } else {
                None
            };
            match sign {
                None => Ok(Quadratic::rational(first)),
                Some(negative) => {
                    let coeff = self.unsigned_rational()?;
                    let Some(d) = self.sqrt_suffix()? else {
                        self.pos = save;
                        return Err(self.error_at(self.pos, ParseErrorKind::Expected("*sqrt(")));
                    };
                    let coeff = if negative { -coeff } else { coeff };
                    Quadratic::new(first, coeff, d)
                }
            }
        };
        built.map_err(|e| self.error_at(start, e))
    }

    fn endpoint(&mut self) -> Result<ExtReal, ParseError> {
        if self.eat("-inf") {
            return Ok(ExtReal::NegInf);
        }
        if self.eat("+inf") {
            return Ok(ExtReal::PosInf);
        }
        Ok(ExtReal::Finite(self.number()?))
    }

    fn matrix(&mut self) -> Result<Sl2, ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.expect("[")?;
        self.expect("[")?;
        let a = self.rational()?;
        self.expect(",")?;
        let b = self.rational()?;
        self.expect("]")?;
        self.expect(",")?;
        self.expect("[")?;
        let c = self.rational()?;
        self.expect(",")?;
        let d = self.rational()?;
        self.expect("]")?;
        self.expect("]")?;
        Sl2::new(a, b, c, d).map_err(|e| self.error_at(start, e))
    }

    fn piece(&mut self) -> Result<Piece, ParseError> {
        self.expect("(")?;
        let lo = self.endpoint()?;
        self.expect(",")?;
        let hi = self.endpoint()?;
        self.expect(")")?;
        self.expect(":")?;
        let m = self.matrix()?;
        Ok(Piece::new(lo, hi, m))
    }

    /// Pieces with their start offsets.
    fn pieces(&mut self) -> Result<(Vec<Piece>, Vec<usize>), ParseError> {
        let mut pieces = Vec::new();
        let mut starts = Vec::new();
        loop {
            self.skip_ws();
            starts.push(self.pos);
            pieces.push(self.piece()?);
            if !self.eat(";") {
                break;
            }
        }
        Ok((pieces, starts))
    }

    fn element(&mut self, ring: Option<&PrimeSet>) -> Result<PPMap, ParseError> {
        let (pieces, starts) = self.pieces()?;
        self.finish()?;
        let locate = |i: usize| starts[i.min(starts.len() - 1)];
        if let Some(ring) = ring {
            if let Some(i) = pieces.iter().position(|p| !p.matrix.entries_in_ring(ring)) {
                return Err(self.error_at(locate(i), ParseErrorKind::NotInRing(ring.clone())));
            }
        }
        PPMap::new(pieces).map_err(|e| {
            let v = e.first().clone();
            self.error_at(locate(v.piece_index()), ParseErrorKind::Invalid(Box::new(v)))
        })
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Cursor) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut c = Cursor::new(src);
    let out = f(&mut c)?;
    c.finish()?;
    Ok(out)
}

pub fn parse_number(src: &str) -> Result<Quadratic, ParseError> {
    whole(src, |c| c.number())
}

pub fn parse_rational(src: &str) -> Result<Rational, ParseError> {
    whole(src, |c| c.rational())
}

pub fn parse_matrix(src: &str) -> Result<Sl2, ParseError> {
    whole(src, |c| c.matrix())
}

/// An interval such as `[0,1]`, `(1/2,+inf)` or `[-1,1/2+1/2*sqrt(5))`.
pub fn parse_interval(src: &str) -> Result<IntervalSpec, ParseError> {
    whole(src, |c| {
        let lo_closed = if c.eat("[") {
            true
        } else {
            c.expect("(")?;
            false
        };
        let lo = c.endpoint()?;
        c.expect(",")?;
        let hi = c.endpoint()?;
        let hi_closed = if c.eat("]") {
            true
        } else {
            c.expect(")")?;
            false
        };
        Ok(IntervalSpec {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    })
}

/// Comma-separated primes; the empty string is the empty set.
pub fn parse_primes(src: &str) -> Result<PrimeSet, ParseError> {
    whole(src, |c| {
        let mut primes = Vec::new();
        if c.at_end() {
            return Ok(PrimeSet::empty());
        }
        loop {
            c.skip_ws();
            let at = c.pos;
            let n = c.digits()?;
            let p: u64 = n
                .try_into()
                .map_err(|_| c.error_at(at, ParseErrorKind::Expected("a prime below 2^64")))?;
            PrimeSet::new([p]).map_err(|e| c.error_at(at, e))?;
            primes.push(p);
            if !c.eat(",") {
                break;
            }
        }
        Ok(PrimeSet::new(primes).expect("checked"))
    })
}

/// A bare element with no headers.
pub fn parse_element(src: &str) -> Result<PPMap, ParseError> {
    Cursor::new(src).element(None)
}

pub fn parse_document(src: &str) -> Result<ElementDocument, ParseError> {
    let mut name = None;
    let mut ring = None;
    let mut offset = 0;
    let mut line_no = 0;
    for line in src.split_inclusive('\n') {
        let trimmed = line.trim();
        if !(trimmed.is_empty() || trimmed.starts_with('#')) {
            break;
        }
        let body = trimmed.trim_start_matches('#').trim_start();
        if let Some(v) = body.strip_prefix("name:") {
            if name.is_some() {
                return Err(header_error(line_no, "name"));
            }
            name = Some(v.trim().to_string());
        } else if let Some(v) = body.strip_prefix("ring:") {
            if ring.is_some() {
                return Err(header_error(line_no, "ring"));
            }
            let column = line.find("ring:").expect("prefix") + "ring:".len();
            ring = Some(parse_primes(v).map_err(|mut e| {
                e.location.line = line_no + 1;
                e.location.column += column;
                e
            })?);
        }
        offset += line.len();
        line_no += 1;
    }
    let mut c = Cursor {
        src: &src[offset..],
        pos: 0,
        line_base: line_no,
    };
    let element = c.element(ring.as_ref())?;
    Ok(ElementDocument {
        name,
        ring,
        element,
    })
}

fn header_error(line_no: usize, which: &'static str) -> ParseError {
    ParseError {
        location: Location {
            line: line_no + 1,
            column: 1,
        },
        kind: ParseErrorKind::DuplicateHeader(which),
    }
}

pub fn format_element(f: &PPMap) -> String {
    f.to_string()
}

/// Headers, then the element on one line, newline-terminated.
pub fn format_document(doc: &ElementDocument) -> String {
    let mut out = String::new();
    if let Some(name) = &doc.name {
        out.push_str(&format!("# name: {name}\n"));
    }
    if let Some(ring) = &doc.ring {
        out.push_str(&format!("# ring: {}\n", ring.to_list()));
    }
    out.push_str(&format_element(&doc.element));
    out.push('\n');
    out
}

/// Interval in the form read by [`parse_interval`].
pub fn format_interval(i: &IntervalSpec) -> String {
    i.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, ratio};

    #[test]
    fn global_translation() {
        let f = parse_element("(-inf,+inf):[[1,1],[0,1]]").unwrap();
        assert_eq!(f, PPMap::global(Sl2::from_ints(1, 1, 0, 1)).unwrap());
        assert_eq!(format_element(&f), "(-inf,+inf):[[1,1],[0,1]]");
    }

    #[test]
    fn discontinuity_is_located() {
        let src = "(-inf,0):[[1,1],[0,1]];(0,+inf):[[1,0],[0,1]]";
        let err = parse_element(src).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(ref v) if matches!(**v, Violation::Discontinuity { .. })));
        assert_eq!(err.location, Location { line: 1, column: 24 });
    }

    #[test]
    fn quadratic_breakpoints() {
        let phi = parse_number("1/2+1/2*sqrt(5)").unwrap();
        let expected = Quadratic::new(ratio(1, 2), ratio(1, 2), 5.into()).unwrap();
        assert_eq!(phi, expected);
        assert_eq!(phi.to_string(), "1/2+1/2*sqrt(5)");
        assert_eq!(parse_number("-1/2*sqrt(5)").unwrap().to_string(), "-1/2*sqrt(5)");
        assert_eq!(parse_number("1-2*sqrt(8)").unwrap().to_string(), "1-4*sqrt(2)");
        assert_eq!(parse_number("3+1*sqrt(4)").unwrap(), Quadratic::from_int(5));
        let src = format!(
            "(-inf,0):[[1,0],[0,1]];(0,{phi}):[[1,0],[0,1]];({phi},+inf):[[1,0],[0,1]]"
        );
        let f = parse_element(&src).unwrap();
        assert!(f.is_identity());
    }

    #[test]
    fn documents() {
        let src = "# name: shift\n# ring: 3,2\n(-inf, +inf) : [[1,1/2],[0,1]]\n";
        let doc = parse_document(src).unwrap();
        assert_eq!(doc.name.as_deref(), Some("shift"));
        assert_eq!(doc.ring, Some(PrimeSet::new([2, 3]).unwrap()));
        let out = format_document(&doc);
        assert_eq!(out, "# name: shift\n# ring: 2,3\n(-inf,+inf):[[1,1/2],[0,1]]\n");
        assert_eq!(format_document(&parse_document(&out).unwrap()), out);

        let err = parse_document("# ring: 3\n(-inf,+inf):[[1,1/2],[0,1]]").unwrap_err();
        assert_eq!(err.location, Location { line: 2, column: 1 });
        assert!(matches!(err.kind, ParseErrorKind::NotInRing(_)));
        let err = parse_document("# ring: 4\n(-inf,+inf):[[1,1],[0,1]]").unwrap_err();
        assert_eq!(err.location.line, 1);
        assert!(matches!(err.kind, ParseErrorKind::Number(NumberError::NotPrime(4))));
    }

    #[test]
    fn syntax_errors_are_located() {
        let err = parse_element("(-inf,+inf):[[1,1],[0,1]\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Expected("]"));
        assert_eq!(err.location, Location { line: 2, column: 1 });
        let err = parse_element("(-inf,+inf):[[1,1],[0,1/0]]").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(err.location.column, 25);
        let err = parse_element("(-inf,+inf):[[2,1],[0,1]]").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Matrix(_)));
        let err = parse_element("(-inf,+inf):[[1,1],[0,1]] x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Trailing);
        assert!(parse_number("1+2").is_err());
    }

    #[test]
    fn small_parsers() {
        assert_eq!(parse_matrix("[[1,-1/2],[0,1]]").unwrap(), Sl2::translation(ratio(-1, 2)));
        let i = parse_interval("[0,1/2)").unwrap();
        assert!(i.lo_closed && !i.hi_closed);
        assert_eq!(format_interval(&i), "[0,1/2)");
        assert_eq!(parse_primes("2, 3,5").unwrap().to_list(), "2,3,5");
        assert!(parse_primes("").unwrap().is_empty());
        assert!(parse_primes("2,9").is_err());
        assert_eq!(parse_rational("-7/14").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
    }
}
