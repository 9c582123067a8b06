//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := uint | 'u' | 't' | 'x' | 'y' uint | '(' expr ')'
//! ```
//!
//! Whitespace is insignificant. Integer literals are reduced mod p; `u` is the
//! generator of an extension field.

use std::collections::BTreeMap;
use std::fmt;

use sqfree_core::ff_poly::FiniteField;
use sqfree_core::{BivarPoly, FieldSpec, FqPoly, MultivarPoly};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    OutOfField(String),
    UnknownVariable(String),
    ExponentTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            ParseErrorKind::OutOfField(s) => write!(f, "coefficient out of field: {s}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::ExponentTooLarge(e) => write!(f, "exponent {e} exceeds {MAX_EXPONENT}"),
        }
    }
}

/// Which variables an expression may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vars {
    /// `t` only.
    T,
    /// `t` and `x`.
    TX,
    /// `t` and `y0, y1, ...`.
    TY,
    /// `u` as the polynomial variable over the prime field, for moduli.
    U,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Letter(char),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Letter(c) => format!("`{c}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let (l, col) = (line, column);
        column += 1;
        let tok = match c {
            '\n' => {
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut s = c.to_string();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    chars.next();
                    column += 1;
                }
                Tok::Int(s)
            }
            '+' | '-' | '*' | '^' | '(' | ')' => Tok::Op(c),
            c if c.is_alphabetic() || c == '_' => Tok::Letter(c),
            c => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    kind: ParseErrorKind::Syntax {
                        expected: "a term".into(),
                        found: format!("`{c}`"),
                    },
                })
            }
        };
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

/// Sparse polynomial in `x, y0, y1, ...` (slot 0 is `x`, slot `i + 1` is
/// `y_i`) over F_q[t]. Keys carry no trailing zeros.
#[derive(Clone)]
struct Value {
    field: FieldSpec,
    terms: BTreeMap<Vec<u32>, FqPoly>,
}

impl Value {
    fn constant(c: FqPoly) -> Self {
        let field = c.field().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Value { field, terms }
    }

    fn slot(field: &FieldSpec, slot: usize) -> Self {
        let mut key = vec![0; slot + 1];
        key[slot] = 1;
        Value {
            field: field.clone(),
            terms: BTreeMap::from([(key, FqPoly::one(field))]),
        }
    }

    fn add_term(&mut self, key: Vec<u32>, c: FqPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn add(mut self, other: Value) -> Value {
        for (k, c) in other.terms {
            self.add_term(k, c);
        }
        self
    }

    fn neg(mut self) -> Value {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }

    fn mul(&self, other: &Value) -> Value {
        let mut out = Value {
            field: self.field.clone(),
            terms: BTreeMap::new(),
        };
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let n = ka.len().max(kb.len());
                let key: Vec<u32> = (0..n)
                    .map(|i| ka.get(i).copied().unwrap_or(0) + kb.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    fn pow(&self, mut e: u32) -> Value {
        let mut acc = Value::constant(FqPoly::one(&self.field));
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    field: &'a FieldSpec,
    vars: Vars,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let s = self.peek();
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax {
            expected: expected.into(),
            found: self.peek().tok.describe(),
        })
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek().tok == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let negate = self.eat_op('-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat_op('+') {
                acc = acc.add(self.term()?);
            } else if self.eat_op('-') {
                acc = acc.add(self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.factor()?;
        while self.eat_op('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value, ParseError> {
        let base = self.base()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let digits = match &self.peek().tok {
            Tok::Int(s) => s.clone(),
            _ => return Err(self.syntax("an exponent")),
        };
        let e = digits
            .parse::<u32>()
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| self.error(ParseErrorKind::ExponentTooLarge(digits.clone())))?;
        self.pos += 1;
        Ok(base.pow(e))
    }

    fn t_var(&self) -> Value {
        Value::constant(FqPoly::monomial(self.field, 1, 1))
    }

    fn base(&mut self) -> Result<Value, ParseError> {
        let tok = self.peek().tok.clone();
        match tok {
            Tok::Int(s) => {
                let p = self.field.p() as u64;
                let r = s.bytes().fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p);
                self.pos += 1;
                Ok(Value::constant(FqPoly::constant(self.field, self.field.from_u64(r))))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat_op(')') {
                    return Err(self.syntax("`)`"));
                }
                Ok(v)
            }
            Tok::Letter('u') if self.vars == Vars::U => {
                self.pos += 1;
                Ok(self.t_var())
            }
            Tok::Letter('u') => match self.field.generator() {
                Some(g) => {
                    self.pos += 1;
                    Ok(Value::constant(FqPoly::constant(self.field, g)))
                }
                None => Err(self.error(ParseErrorKind::OutOfField(format!(
                    "`u` is not an element of {}",
                    self.field
                )))),
            },
            Tok::Letter('t') if self.vars != Vars::U => {
                self.pos += 1;
                Ok(self.t_var())
            }
            Tok::Letter('x') if self.vars == Vars::TX => {
                self.pos += 1;
                Ok(Value::slot(self.field, 0))
            }
            Tok::Letter('y') if self.vars == Vars::TY => {
                self.pos += 1;
                let i = match &self.peek().tok {
                    Tok::Int(s) => s.parse::<usize>().ok().filter(|&i| i < 64),
                    _ => return Err(self.syntax("a variable index after `y`")),
                };
                let i = i.ok_or_else(|| self.syntax("a variable index below 64"))?;
                self.pos += 1;
                Ok(Value::slot(self.field, i + 1))
            }
            Tok::Letter(c) => Err(self.error(ParseErrorKind::UnknownVariable(c.to_string()))),
            _ => Err(self.syntax("a term")),
        }
    }
}

fn parse_value(text: &str, field: &FieldSpec, vars: Vars) -> Result<Value, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        field,
        vars,
    };
    let v = parser.expr()?;
    if parser.peek().tok != Tok::End {
        return Err(parser.syntax("an operator or end of input"));
    }
    Ok(v)
}

/// Parses an element of F_q[t].
pub fn parse_fq_poly(text: &str, field: &FieldSpec) -> Result<FqPoly, ParseError> {
    let v = parse_value(text, field, Vars::T)?;
    Ok(v.terms.into_values().next().unwrap_or_else(|| FqPoly::zero(field)))
}

/// Parses an element of F_q[t, x].
pub fn parse_bivar(text: &str, field: &FieldSpec) -> Result<BivarPoly, ParseError> {
    let v = parse_value(text, field, Vars::TX)?;
    let deg = v.terms.keys().map(|k| k.first().copied().unwrap_or(0)).max().unwrap_or(0);
    let mut coeffs = vec![FqPoly::zero(field); deg as usize + 1];
    for (k, c) in v.terms {
        coeffs[k.first().copied().unwrap_or(0) as usize] = c;
    }
    Ok(BivarPoly::new(field, coeffs))
}

/// Parses an element of F_q[t, y0, ..., y_{nvars-1}]; `nvars` is at least one
/// more than the largest index used.
pub fn parse_multivar(text: &str, field: &FieldSpec, nvars: usize) -> Result<MultivarPoly, ParseError> {
    let v = parse_value(text, field, Vars::TY)?;
    let used = v.terms.keys().map(|k| k.len().saturating_sub(1)).max().unwrap_or(0);
    let nvars = nvars.max(used);
    let terms = v.terms.into_iter().map(|(k, c)| {
        let mut e: Vec<u32> = k.into_iter().skip(1).collect();
        e.resize(nvars, 0);
        (e, c)
    });
    Ok(MultivarPoly::from_terms(field, nvars, terms))
}

/// Parses a polynomial in `u` over F_p, returning its coefficient list, for
/// extension-field moduli such as `u^2 + u + 1`.
pub fn parse_modulus(text: &str, p: u32) -> Result<Vec<u32>, ParseError> {
    let base = FieldSpec::prime(p).expect("caller passes a prime");
    let v = parse_value(text, &base, Vars::U)?;
    Ok(v
        .terms
        .into_values()
        .next()
        .map(|c| c.coeffs().to_vec())
        .unwrap_or_default())
}
