//! Surface syntax for ring elements.
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := ('-')? factor ('*' factor)*
//! factor  := atom ('^' INT)?
//! atom    := INT | VAR | '(' expr ')' | '[' expr (',' expr)+ ']'
//! VAR     := 'x' INT
//! ```
//!
//! Products need an explicit `*`; brackets are left-normed.

use std::fmt;

use num_bigint::BigInt;

use crate::error::ParseError;
use crate::freering::{commutator, Poly};

/// Nesting beyond this is rejected rather than risking the stack.
const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(u32),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Exponent is at least 1.
    Pow(Box<Expr>, u32),
    /// At least two children.
    Bracket(Vec<Expr>),
}

impl Expr {
    pub fn eval(&self) -> Poly {
        match self {
            Expr::Int(n) => Poly::constant(n.clone()),
            Expr::Var(i) => Poly::var(*i),
            Expr::Neg(e) => -e.eval(),
            Expr::Add(a, b) => a.eval() + b.eval(),
            Expr::Sub(a, b) => a.eval() - b.eval(),
            Expr::Mul(a, b) => a.eval() * b.eval(),
            Expr::Pow(e, k) => e.eval().pow(*k),
            Expr::Bracket(args) => {
                let vals: Vec<Poly> = args.iter().map(Expr::eval).collect();
                commutator(&vals).expect("bracket has at least two children")
            }
        }
    }
}

impl fmt::Display for Expr {
    // Fully parenthesized where precedence could be ambiguous; re-parses to
    // the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) if n.sign() == num_bigint::Sign::Minus => write!(f, "({n})"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Pow(e, k) => write!(f, "({e})^{k}"),
            Expr::Bracket(args) => {
                f.write_str("[")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(u32),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> &'static str {
        match self {
            Tok::Int(_) => "integer",
            Tok::Var(_) => "variable",
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Star => "'*'",
            Tok::Caret => "'^'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBrack => "'['",
            Tok::RBrack => "']'",
            Tok::Comma => "','",
            Tok::End => "end of input",
        }
    }
}

const ATOM_START: &[&str] = &["integer", "variable", "'('", "'['"];

fn err(offset: usize, message: impl Into<String>, expected: &[&'static str]) -> ParseError {
    ParseError {
        offset,
        message: message.into(),
        expected: expected.to_vec(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'0'..=b'9' => {
                let end = digits(i);
                i = end - 1;
                Tok::Int(src[start..end].parse().expect("ascii digits"))
            }
            b'x' => {
                let end = digits(i + 1);
                if end == i + 1 {
                    return Err(err(i + 1, "variable needs an index", &["integer"]));
                }
                let idx: u32 = src[i + 1..end]
                    .parse()
                    .map_err(|_| err(i + 1, "variable index too large", &[]))?;
                if idx == 0 {
                    return Err(err(i + 1, "variable indices start at 1", &[]));
                }
                i = end - 1;
                Tok::Var(idx)
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character {ch:?}"), ATOM_START));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        err(
            self.offset(),
            format!("unexpected {}", self.peek().describe()),
            expected,
        )
    }

    fn expect(&mut self, t: Tok, expected: &[&'static str]) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(self.offset(), "expression nested too deeply", &[]));
        }
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let negate = *self.peek() == Tok::Minus;
        if negate {
            self.bump();
        }
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(if negate { Expr::Neg(Box::new(lhs)) } else { lhs })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let k: u32 = u32::try_from(&n).map_err(|_| err(at, "exponent too large", &[]))?;
                if k == 0 {
                    return Err(err(at, "exponent must be at least 1", &[]));
                }
                Ok(Expr::Pow(Box::new(base), k))
            }
            _ => Err(err(at, "exponent must be an integer", &["integer"])),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Var(i) => {
                self.bump();
                Ok(Expr::Var(i))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, &["')'", "'+'", "'-'", "'*'", "'^'"])?;
                Ok(e)
            }
            Tok::LBrack => {
                let open = self.offset();
                self.bump();
                if *self.peek() == Tok::RBrack {
                    return Err(err(open, "empty bracket", ATOM_START));
                }
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                if args.len() < 2 {
                    return Err(self.unexpected(&["','"]));
                }
                self.expect(Tok::RBrack, &["']'", "','", "'+'", "'-'", "'*'", "'^'"])?;
                Ok(Expr::Bracket(args))
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(e)
}

pub fn eval(e: &Expr) -> Poly {
    e.eval()
}

/// Parses and evaluates in one step.
pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    parse(text).map(|e| e.eval())
}

/// Canonical text; the inverse of [`parse_poly`] on canonical forms.
pub fn format(p: &Poly) -> String {
    p.to_string()
}
