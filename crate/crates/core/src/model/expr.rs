//! Expressions for period-matrix entries.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := number | 'i' | 'tau' | 'conj' '(' 'tau' ')' | 'x' integer | '(' expr ')'
//! ```

use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// Denominators with modulus below this value are reported as poles.
pub const POLE_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Complex64),
    /// The complex coordinate `τ = x + iy` of the upper half plane.
    Tau,
    /// `conj(τ) = x - iy`.
    ConjTau,
    /// Real chart coordinate, zero based (`x1` is `Coord(0)`).
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Symbols a parser accepts.
#[derive(Debug, Clone, Copy)]
pub struct Symbols {
    pub tau: bool,
    pub coords: usize,
}

/// Point at which an expression is evaluated.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub tau: Complex64,
    pub coords: &'a [f64],
}

impl Expr {
    pub fn real(x: f64) -> Expr {
        Expr::Num(Complex64::new(x, 0.0))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(z) if *z == Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Num(z) if *z == Complex64::new(1.0, 0.0))
    }

    fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::neg(b)
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    fn neg(a: Expr) -> Expr {
        if a.is_zero() {
            a
        } else {
            Expr::Neg(Box::new(a))
        }
    }

    fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::real(0.0)
        } else if a.is_one() {
            b
        } else if b.is_one() {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            a
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    pub fn eval(&self, env: &Env) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(z) => *z,
            Expr::Tau => env.tau,
            Expr::ConjTau => env.tau.conj(),
            Expr::Coord(k) => Complex64::new(
                *env.coords.get(*k).ok_or_else(|| {
                    Error::Invalid(format!("coordinate x{} is outside the chart", k + 1))
                })?,
                0.0,
            ),
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d.norm() < POLE_THRESHOLD {
                    return Err(Error::Pole {
                        what: format!("denominator `{b}`"),
                        at: format!("{:?}", env.coords),
                    });
                }
                a.eval(env)? / d
            }
            Expr::Pow(a, k) => {
                let base = a.eval(env)?;
                if *k < 0 && base.norm() < POLE_THRESHOLD {
                    return Err(Error::Pole {
                        what: format!("negative power of `{a}`"),
                        at: format!("{:?}", env.coords),
                    });
                }
                base.powi(*k)
            }
        })
    }

    /// Derivative with respect to the real chart coordinate `k`.  On the
    /// upper half plane `x1 = Re τ` and `x2 = Im τ`.
    pub fn derivative(&self, k: usize) -> Expr {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Expr::Num(_) => Expr::real(0.0),
            Expr::Tau => match k {
                0 => Expr::real(1.0),
                1 => Expr::Num(i),
                _ => Expr::real(0.0),
            },
            Expr::ConjTau => match k {
                0 => Expr::real(1.0),
                1 => Expr::Num(-i),
                _ => Expr::real(0.0),
            },
            Expr::Coord(j) => Expr::real(if *j == k { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.derivative(k)),
            Expr::Add(a, b) => Expr::add(a.derivative(k), b.derivative(k)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(k), b.derivative(k)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(k), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(k)),
            ),
            Expr::Div(a, b) => Expr::sub(
                Expr::div(a.derivative(k), (**b).clone()),
                Expr::div(
                    Expr::mul((**a).clone(), b.derivative(k)),
                    Expr::Pow(b.clone(), 2),
                ),
            ),
            Expr::Pow(a, n) => {
                if *n == 0 {
                    return Expr::real(0.0);
                }
                let lower = if *n == 1 {
                    Expr::real(1.0)
                } else {
                    Expr::Pow(a.clone(), n - 1)
                };
                Expr::mul(Expr::mul(Expr::real(*n as f64), lower), a.derivative(k))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(z) if z.im != 0.0 && z.re != 0.0 => 5,
            Expr::Num(z) if z.im != 0.0 && z.im != 1.0 => 2,
            Expr::Num(z) if z.re < 0.0 || z.re.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.re == 0.0 && z.im == 1.0 {
                    write!(f, "i")
                } else if z.re == 0.0 {
                    write!(f, "{}*i", z.im)
                } else {
                    write!(f, "({} + {}*i)", z.re, z.im)
                }
            }
            Expr::Tau => write!(f, "tau"),
            Expr::ConjTau => write!(f, "conj(tau)"),
            Expr::Coord(k) => write!(f, "x{}", k + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.fmt_at(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.fmt_at(f, 3)
            }
            Expr::Pow(a, k) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

/// Parser-compatible text.  Parsing the output of a parsed expression gives
/// back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let column = col0 + k;
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse {
                line,
                column,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token { tok: Tok::Num(v), line, column });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..k].iter().collect()),
                line,
                column,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Op(c), line, column });
            k += 1;
        } else {
            return Err(Error::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col0 + chars.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    symbols: &'a Symbols,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Op(c) {
            Ok(())
        } else {
            Err(self.error(&t, format!("expected `{c}`, found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.next();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Op('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.next();
        let negative = if self.peek().tok == Tok::Op('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match t.tok {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                let k = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
            }
            _ => Err(self.error(&t, "exponent must be an integer literal")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::real(*v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.symbol(name, &t),
            other => Err(self.error(&t, format!("expected an operand, found {}", describe(other)))),
        }
    }

    fn symbol(&mut self, name: &str, t: &Token) -> Result<Expr> {
        let unknown = || Error::UnknownSymbol {
            symbol: name.to_string(),
            line: t.line,
            column: t.column,
        };
        match name {
            "i" => Ok(Expr::Num(Complex64::new(0.0, 1.0))),
            "tau" if self.symbols.tau => Ok(Expr::Tau),
            "conj" if self.symbols.tau => {
                self.expect('(')?;
                let arg = self.next();
                if arg.tok != Tok::Ident("tau".into()) {
                    return Err(self.error(&arg, "conj applies only to `tau`"));
                }
                self.expect(')')?;
                Ok(Expr::ConjTau)
            }
            _ => {
                let idx = name
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&k| k >= 1 && k <= self.symbols.coords);
                idx.map(|k| Expr::Coord(k - 1)).ok_or_else(unknown)
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of expression".into(),
    }
}

/// Parses `src`, reporting positions relative to `line` and the 1-based
/// starting column `column`.
pub fn parse_at(src: &str, symbols: &Symbols, line: usize, column: usize) -> Result<Expr> {
    let toks = lex(src, line, column)?;
    let mut p = Parser { toks, pos: 0, symbols };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.error(&t, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(e)
}

/// Parses a single-line expression.
pub fn parse(src: &str, symbols: &Symbols) -> Result<Expr> {
    parse_at(src, symbols, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UHP: Symbols = Symbols { tau: true, coords: 2 };

    fn eval(src: &str, tau: Complex64) -> Complex64 {
        let coords = [tau.re, tau.im];
        parse(src, &UHP).unwrap().eval(&Env { tau, coords: &coords }).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let t = Complex64::new(0.5, 2.0);
        assert_eq!(eval("1 - 2 - 3", t), Complex64::new(-4.0, 0.0));
        assert_eq!(eval("2 * 3 ^ 2", t), Complex64::new(18.0, 0.0));
        assert_eq!(eval("-2 ^ 2", t), Complex64::new(-4.0, 0.0));
        assert_eq!(eval("8 / 4 / 2", t), Complex64::new(1.0, 0.0));
        assert_eq!(eval("tau - conj(tau)", t), Complex64::new(0.0, 4.0));
        assert_eq!(eval("x1 + i*x2", t), t);
        assert_eq!(eval("tau^-1", t), t.inv());
    }

    #[test]
    fn error_positions() {
        match parse("tau + * 2", &UHP) {
            Err(Error::Parse { line: 1, column: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("tau + foo", &UHP) {
            Err(Error::UnknownSymbol { column: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("x3", &UHP) {
            Err(Error::UnknownSymbol { .. }) => {}
            other => panic!("{other:?}"),
        }
        let flat = Symbols { tau: false, coords: 3 };
        assert!(matches!(parse("tau", &flat), Err(Error::UnknownSymbol { .. })));
        assert!(parse("(1 + x3", &flat).is_err());
        assert!(parse("x1^1.5", &flat).is_err());
    }

    #[test]
    fn pole_detection() {
        let e = parse("1/(tau - conj(tau))", &UHP).unwrap();
        let coords = [0.0, 0.0];
        let env = Env { tau: Complex64::new(0.0, 0.0), coords: &coords };
        assert!(matches!(e.eval(&env), Err(Error::Pole { .. })));
    }

    #[test]
    fn printer_round_trip() {
        for src in [
            "(tau^2/2)*(tau + 3*conj(tau))",
            "-(3/2)*tau*(tau + conj(tau))",
            "1 - (2 - 3)",
            "--x1",
            "2*-x2",
            "(x1^2)^3",
            "-1/tau",
            "0.001 + 12345.5",
            "i*tau - (x1/x2)/x1",
        ] {
            let e = parse(src, &UHP).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed, &UHP).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn derivative_of_holomorphic_monomial() {
        // d/dx τ³ = 3τ², d/dy τ³ = 3iτ².
        let e = parse("tau^3", &UHP).unwrap();
        let t = Complex64::new(0.3, 1.1);
        let coords = [t.re, t.im];
        let env = Env { tau: t, coords: &coords };
        let dx = e.derivative(0).eval(&env).unwrap();
        let dy = e.derivative(1).eval(&env).unwrap();
        assert!((dx - 3.0 * t * t).norm() < 1e-14);
        assert!((dy - Complex64::new(0.0, 3.0) * t * t).norm() < 1e-14);
    }
}
