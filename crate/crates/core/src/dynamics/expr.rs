//! Arithmetic expressions over phase-space coordinates with symbolic
//! partial derivatives. Grammar: see `docs/expr-grammar.md`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate index into `z = (x1..xn, y1..yn)`.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

use Expr::*;

fn num(v: f64) -> Expr {
    Num(v)
}

// Smart constructors fold constants and drop neutral elements so that
// repeated differentiation stays small.
fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x + y),
        (Num(z), e) | (e, Num(z)) if z == 0.0 => e,
        (a, b) => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x - y),
        (e, Num(z)) if z == 0.0 => e,
        (Num(z), e) if z == 0.0 => neg(e),
        (a, b) => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x * y),
        (Num(z), _) | (_, Num(z)) if z == 0.0 => Num(0.0),
        (Num(o), e) | (e, Num(o)) if o == 1.0 => e,
        (a, b) => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(z), _) if z == 0.0 => Num(0.0),
        (e, Num(o)) if o == 1.0 => e,
        (a, b) => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Num(x) => Num(-x),
        Neg(e) => *e,
        e => Neg(Box::new(e)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (_, Num(z)) if z == 0.0 => Num(1.0),
        (e, Num(o)) if o == 1.0 => e,
        (a, b) => Pow(Box::new(a), Box::new(b)),
    }
}

impl Expr {
    /// Parses an expression in the variables `x1..xn, y1..yn`.
    pub fn parse(src: &str, n: usize) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, n };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expr(format!("unexpected trailing input at token {}", p.pos)));
        }
        Ok(e)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            Num(v) => *v,
            Var(i) => z[*i],
            Add(a, b) => a.eval(z) + b.eval(z),
            Sub(a, b) => a.eval(z) - b.eval(z),
            Mul(a, b) => a.eval(z) * b.eval(z),
            Div(a, b) => a.eval(z) / b.eval(z),
            Neg(a) => -a.eval(z),
            Pow(a, b) => {
                let (x, p) = (a.eval(z), b.eval(z));
                if p.fract() == 0.0 && p.abs() < 64.0 {
                    x.powi(p as i32)
                } else {
                    x.powf(p)
                }
            }
            Exp(a) => a.eval(z).exp(),
            Ln(a) => a.eval(z).ln(),
        }
    }

    fn is_const(&self) -> bool {
        match self {
            Num(_) => true,
            Var(_) => false,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.is_const() && b.is_const(),
            Neg(a) | Exp(a) | Ln(a) => a.is_const(),
        }
    }

    /// Symbolic partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Num(_) => num(0.0),
            Var(j) => num(if *j == i { 1.0 } else { 0.0 }),
            Add(a, b) => add(a.diff(i), b.diff(i)),
            Sub(a, b) => sub(a.diff(i), b.diff(i)),
            Mul(a, b) => add(mul(a.diff(i), (**b).clone()), mul((**a).clone(), b.diff(i))),
            Div(a, b) => div(
                sub(mul(a.diff(i), (**b).clone()), mul((**a).clone(), b.diff(i))),
                pow((**b).clone(), num(2.0)),
            ),
            Neg(a) => neg(a.diff(i)),
            Pow(a, b) if b.is_const() => {
                let p = b.eval(&[]);
                mul(mul(num(p), pow((**a).clone(), num(p - 1.0))), a.diff(i))
            }
            Pow(a, b) => mul(
                self.clone(),
                add(mul(b.diff(i), Ln(a.clone())), div(mul((**b).clone(), a.diff(i)), (**a).clone())),
            ),
            Exp(a) => mul(self.clone(), a.diff(i)),
            Ln(a) => div(a.diff(i), (**a).clone()),
        }
    }

    pub fn gradient(&self, dim: usize) -> Vec<Expr> {
        (0..dim).map(|i| self.diff(i)).collect()
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
        let var = |i: usize| if i < n { format!("x{}", i + 1) } else { format!("y{}", i - n + 1) };
        match self {
            Num(v) => write!(f, "{v:?}"),
            Var(i) => write!(f, "{}", var(*i)),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                let op = match self {
                    Add(..) => "+",
                    Sub(..) => "-",
                    Mul(..) => "*",
                    Div(..) => "/",
                    _ => "^",
                };
                write!(f, "(")?;
                a.fmt_with(f, n)?;
                write!(f, " {op} ")?;
                b.fmt_with(f, n)?;
                write!(f, ")")
            }
            Neg(a) => {
                write!(f, "(-")?;
                a.fmt_with(f, n)?;
                write!(f, ")")
            }
            Exp(a) | Ln(a) => {
                write!(f, "{}(", if matches!(self, Exp(_)) { "exp" } else { "ln" })?;
                a.fmt_with(f, n)?;
                write!(f, ")")
            }
        }
    }

    /// Renders in the input grammar for a phase space of dimension `2n`.
    pub fn render(&self, n: usize) -> String {
        struct D<'a>(&'a Expr, usize);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, n).to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Expr(format!("bad number '{s}'")))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek_op(&self, c: char) -> bool {
        self.tokens.get(self.pos) == Some(&Tok::Op(c))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_op(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Expr(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                e = Add(Box::new(e), Box::new(self.term()?));
            } else if self.peek_op('-') {
                self.pos += 1;
                e = Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                e = Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.peek_op('/') {
                self.pos += 1;
                e = Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(Neg(Box::new(self.unary()?)));
        }
        if self.peek_op('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op('^') {
            self.pos += 1;
            // right associative: a^b^c = a^(b^c)
            return Ok(Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Expr("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "exp" | "ln" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(')')?;
                    Ok(if name == "exp" { Exp(Box::new(a)) } else { Ln(Box::new(a)) })
                }
                "pow" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(',')?;
                    let b = self.expr()?;
                    self.expect(')')?;
                    Ok(Pow(Box::new(a), Box::new(b)))
                }
                "pi" => Ok(Num(std::f64::consts::PI)),
                _ => self.variable(&name),
            },
            Tok::Op(c) => Err(Error::Expr(format!("unexpected '{c}'"))),
        }
    }

    fn variable(&self, name: &str) -> Result<Expr> {
        let (head, idx) = name.split_at(1);
        let k: usize = idx.parse().map_err(|_| Error::Expr(format!("unknown identifier '{name}'")))?;
        if k == 0 || k > self.n {
            return Err(Error::Expr(format!("variable '{name}' out of range 1..={}", self.n)));
        }
        match head {
            "x" => Ok(Var(k - 1)),
            "y" => Ok(Var(self.n + k - 1)),
            _ => Err(Error::Expr(format!("unknown identifier '{name}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_eval() {
        let e = Expr::parse("1 + 2*x1^2 - y1/4", 1).unwrap();
        assert_eq!(e.eval(&[3.0, 2.0]), 1.0 + 18.0 - 0.5);
        let e = Expr::parse("-x1^2", 1).unwrap();
        assert_eq!(e.eval(&[3.0, 0.0]), -9.0);
        let e = Expr::parse("2^3^2", 1).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]), 512.0);
        let e = Expr::parse("pow(x2, 3) * exp(-y1)", 2).unwrap();
        assert!((e.eval(&[0.0, 2.0, 0.0, 0.0]) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let e = Expr::parse("exp(-(x1^2 + y1^2)) * (x1 - 2*y1)^3 / (1 + x1^2) + pow(1 + y1^2, x1)", 1).unwrap();
        let z = [0.3, -0.7];
        for i in 0..2 {
            let d = e.diff(i).eval(&z);
            let h = 1e-6;
            let mut zp = z;
            let mut zm = z;
            zp[i] += h;
            zm[i] -= h;
            let fd = (e.eval(&zp) - e.eval(&zm)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8, "{d} vs {fd}");
        }
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("x3", 2).is_err());
        assert!(Expr::parse("q1", 1).is_err());
        assert!(Expr::parse("(x1", 1).is_err());
        assert!(Expr::parse("x1 x1", 1).is_err());
        assert!(Expr::parse("x1 $", 1).is_err());
    }

    #[test]
    fn render_round_trip() {
        let e = Expr::parse("x1^2 - 3*y2 + exp(x2)", 2).unwrap();
        let back = Expr::parse(&e.render(2), 2).unwrap();
        let z = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(e.eval(&z), back.eval(&z));
    }
}
