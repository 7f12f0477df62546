use super::AtlasError;
use crate::cas::{CasError, Var, Q, RF};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Exponent: a constant, or the formal twist n plus an offset (offset >= -1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Int(u32),
    Twist(i32),
}

impl Exponent {
    pub fn instantiate(&self, n: u32) -> Option<u32> {
        match *self {
            Exponent::Int(e) => Some(e),
            Exponent::Twist(off) => {
                let v = n as i64 + off as i64;
                if v < 0 {
                    None
                } else {
                    Some(v as u32)
                }
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Exponent::Int(e) => write!(f, "{}", e),
            Exponent::Twist(0) => f.write_str("n"),
            Exponent::Twist(off) if off < 0 => write!(f, "(n-{})", -off),
            Exponent::Twist(off) => write!(f, "(n+{})", off),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        if n < 0 {
            Expr::Neg(Box::new(Expr::Int(BigInt::from(-n))))
        } else {
            Expr::Int(BigInt::from(n))
        }
    }

    pub fn ident(s: &str) -> Expr {
        Expr::Ident(s.to_string())
    }

    pub fn parse(text: &str) -> Result<Expr, AtlasError> {
        parse_expr_at(text, 1, 1)
    }

    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Ident(s) => {
                out.insert(s.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_identifiers(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_identifiers(out);
                b.collect_identifiers(out);
            }
        }
    }

    pub fn has_twist(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Ident(_) => false,
            Expr::Neg(a) => a.has_twist(),
            Expr::Pow(a, e) => matches!(e, Exponent::Twist(_)) || a.has_twist(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_twist() || b.has_twist()
            }
        }
    }

    /// Replace every twist exponent by its value at n.
    pub fn instantiate(&self, n: u32) -> Result<Expr, AtlasError> {
        let bin = |a: &Expr, b: &Expr| -> Result<(Box<Expr>, Box<Expr>), AtlasError> {
            Ok((Box::new(a.instantiate(n)?), Box::new(b.instantiate(n)?)))
        };
        Ok(match self {
            Expr::Int(_) | Expr::Ident(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.instantiate(n)?)),
            Expr::Pow(a, e) => {
                let v = e
                    .instantiate(n)
                    .ok_or(AtlasError::NegativeExponentAfterInstantiation {
                        exponent: e.to_string(),
                        twist: n,
                    })?;
                let base = a.instantiate(n)?;
                match v {
                    0 => Expr::int(1),
                    1 => base,
                    _ => Expr::Pow(Box::new(base), Exponent::Int(v)),
                }
            }
            Expr::Add(a, b) => {
                let (a, b) = bin(a, b)?;
                Expr::Add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = bin(a, b)?;
                Expr::Sub(a, b)
            }
            Expr::Mul(a, b) => {
                let (a, b) = bin(a, b)?;
                if a.is_one() {
                    *b
                } else if b.is_one() {
                    *a
                } else {
                    Expr::Mul(a, b)
                }
            }
            Expr::Div(a, b) => {
                let (a, b) = bin(a, b)?;
                if b.is_one() {
                    *a
                } else {
                    Expr::Div(a, b)
                }
            }
        })
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Int(v) if *v == BigInt::from(1))
    }

    /// Build the rational function. Twist exponents must already be instantiated.
    pub fn to_rf(&self) -> Result<RF, AtlasError> {
        Ok(match self {
            Expr::Int(k) => RF::constant(Q::from_integer(k.clone())),
            Expr::Ident(s) => RF::var(Var::new(s)),
            Expr::Neg(a) => -&a.to_rf()?,
            Expr::Add(a, b) => &a.to_rf()? + &b.to_rf()?,
            Expr::Sub(a, b) => &a.to_rf()? - &b.to_rf()?,
            Expr::Mul(a, b) => &a.to_rf()? * &b.to_rf()?,
            Expr::Div(a, b) => a.to_rf()?.checked_div(&b.to_rf()?)?,
            Expr::Pow(a, e) => match e {
                Exponent::Int(k) => a.to_rf()?.pow(*k),
                Exponent::Twist(_) => {
                    return Err(AtlasError::UninstantiatedTwist(self.render()));
                }
            },
        })
    }

    /// Evaluate at a rational point without forming a rational function.
    pub fn evaluate(&self, point: &HashMap<String, Q>, n: Option<u32>) -> Result<Q, AtlasError> {
        Ok(match self {
            Expr::Int(k) => Q::from_integer(k.clone()),
            Expr::Ident(s) => point
                .get(s)
                .cloned()
                .ok_or_else(|| AtlasError::Cas(CasError::UnboundVariable(s.clone())))?,
            Expr::Neg(a) => -a.evaluate(point, n)?,
            Expr::Add(a, b) => a.evaluate(point, n)? + b.evaluate(point, n)?,
            Expr::Sub(a, b) => a.evaluate(point, n)? - b.evaluate(point, n)?,
            Expr::Mul(a, b) => a.evaluate(point, n)? * b.evaluate(point, n)?,
            Expr::Div(a, b) => {
                let d = b.evaluate(point, n)?;
                if d.is_zero() {
                    return Err(AtlasError::Cas(CasError::EvaluationPole));
                }
                a.evaluate(point, n)? / d
            }
            Expr::Pow(a, e) => {
                let k = match e {
                    Exponent::Int(k) => *k,
                    Exponent::Twist(_) => {
                        let n = n.ok_or_else(|| AtlasError::UninstantiatedTwist(self.render()))?;
                        e.instantiate(n)
                            .ok_or(AtlasError::NegativeExponentAfterInstantiation {
                                exponent: e.to_string(),
                                twist: n,
                            })?
                    }
                };
                num_traits::pow(a.evaluate(point, n)?, k as usize)
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) | Expr::Pow(..) => 3,
            Expr::Int(_) | Expr::Ident(_) => 4,
        }
    }

    fn render_at(&self, min: u8, out: &mut String) {
        if self.precedence() < min {
            out.push('(');
            self.render_at(0, out);
            out.push(')');
            return;
        }
        match self {
            Expr::Int(k) => out.push_str(&k.to_string()),
            Expr::Ident(s) => out.push_str(s),
            Expr::Neg(a) => {
                out.push('-');
                a.render_at(3, out);
            }
            Expr::Add(a, b) => {
                a.render_at(1, out);
                out.push_str(" + ");
                b.render_at(2, out);
            }
            Expr::Sub(a, b) => {
                a.render_at(1, out);
                out.push_str(" - ");
                b.render_at(2, out);
            }
            Expr::Mul(a, b) => {
                a.render_at(2, out);
                out.push('*');
                b.render_at(3, out);
            }
            Expr::Div(a, b) => {
                a.render_at(2, out);
                out.push('/');
                b.render_at(3, out);
            }
            Expr::Pow(a, e) => {
                a.render_at(4, out);
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_at(0, &mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A vector field written as a sum of coefficient * d/d<coordinate>.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldExpr {
    pub terms: Vec<(Expr, String)>,
}

impl FieldExpr {
    pub fn zero() -> FieldExpr {
        FieldExpr { terms: Vec::new() }
    }

    pub fn parse(text: &str) -> Result<FieldExpr, AtlasError> {
        parse_field_at(text, 1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn instantiate(&self, n: u32) -> Result<FieldExpr, AtlasError> {
        Ok(FieldExpr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| Ok((e.instantiate(n)?, c.clone())))
                .collect::<Result<_, AtlasError>>()?,
        })
    }

    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (e, _) in &self.terms {
            out.extend(e.identifiers());
        }
        out
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (e, coord)) in self.terms.iter().enumerate() {
            let (neg, body) = match e {
                Expr::Neg(inner) if i > 0 => (true, inner.as_ref()),
                _ => (false, e),
            };
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !matches!(body, Expr::Int(k) if k.is_one()) {
                s.push_str(&body.render());
                s.push(' ');
            }
            s.push_str("d/d");
            s.push_str(coord);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    D(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexed, AtlasError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |i: usize, msg: String| AtlasError::Parse {
        line,
        column: col0 + i,
        message: msg,
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                Tok::Int(s.parse().expect("digits"))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                if s == "d" && i + 2 < chars.len() && chars[i + 1] == '/' && chars[i + 2] == 'd' {
                    let mut j = i + 3;
                    let name_start = j;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    if j == name_start {
                        return Err(err(start, "expected coordinate after d/d".into()));
                    }
                    let name: String = chars[name_start..j].iter().collect();
                    i = j - 1;
                    Tok::D(name)
                } else {
                    Tok::Ident(s)
                }
            }
            other => return Err(err(start, format!("unexpected character '{}'", other))),
        };
        toks.push((tok, start));
        i += 1;
    }
    Ok(Lexed {
        toks,
        end: chars.len(),
    })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    line: usize,
    col0: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn column(&self) -> usize {
        self.col0 + self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> AtlasError {
        AtlasError::Parse {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, AtlasError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, AtlasError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, AtlasError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, AtlasError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.bump();
                Ok(Expr::Ident(s))
            }
            Some(Tok::Int(k)) => {
                self.bump();
                Ok(Expr::Int(k))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.bump();
                let f = self.factor()?;
                Ok(Expr::Neg(Box::new(f)))
            }
            Some(t) => Err(self.error(format!("unexpected token {:?}", t))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, AtlasError> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                let v = k.to_u32().ok_or_else(|| self.error("exponent too large"))?;
                self.bump();
                Ok(Exponent::Int(v))
            }
            Some(Tok::Ident(s)) if s == "n" => {
                self.bump();
                Ok(Exponent::Twist(0))
            }
            Some(Tok::LParen) => {
                self.bump();
                match self.bump() {
                    Some(Tok::Ident(s)) if s == "n" => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("expected n in exponent"));
                    }
                }
                if self.peek() != Some(&Tok::Minus) {
                    return Err(self.error("expected '-' in twist exponent"));
                }
                self.bump();
                let off = match self.peek().cloned() {
                    Some(Tok::Int(k)) => k,
                    _ => return Err(self.error("expected integer offset")),
                };
                if off.is_negative() || off > BigInt::one() {
                    return Err(self.error("twist exponent offset must be 0 or 1"));
                }
                self.bump();
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(Exponent::Twist(-off.to_i32().expect("small offset")))
            }
            _ => Err(self.error("expected exponent")),
        }
    }
}

pub(crate) fn parse_expr_at(text: &str, line: usize, col0: usize) -> Result<Expr, AtlasError> {
    let lx = lex(text, line, col0)?;
    let mut p = Parser {
        toks: lx.toks,
        pos: 0,
        end: lx.end,
        line,
        col0,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

pub(crate) fn parse_field_at(text: &str, line: usize, col0: usize) -> Result<FieldExpr, AtlasError> {
    let lx = lex(text, line, col0)?;
    let mut p = Parser {
        toks: lx.toks,
        pos: 0,
        end: lx.end,
        line,
        col0,
    };
    if p.toks.len() == 1 && p.toks[0].0 == Tok::Int(BigInt::zero()) {
        return Ok(FieldExpr::zero());
    }
    let mut terms = Vec::new();
    let mut negate = false;
    loop {
        let coeff = if let Some(Tok::D(_)) = p.peek() {
            Expr::Int(BigInt::one())
        } else {
            p.expr()?
        };
        let coord = match p.bump() {
            Some(Tok::D(c)) => c,
            _ => {
                p.pos -= 1;
                return Err(p.error("expected d/d<coordinate>"));
            }
        };
        let coeff = if negate {
            Expr::Neg(Box::new(coeff))
        } else {
            coeff
        };
        terms.push((coeff, coord));
        match p.bump() {
            None => break,
            Some(Tok::Plus) => negate = false,
            Some(Tok::Minus) => negate = true,
            Some(_) => {
                p.pos -= 1;
                return Err(p.error("expected '+' or '-' between field terms"));
            }
        }
    }
    Ok(FieldExpr { terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_render() {
        let e = Expr::parse("-a1 + y1*x1^2/(t+x9)^(n-1)").unwrap();
        assert_eq!(e.render(), "-a1 + y1*x1^2/(t + x9)^(n-1)");
        assert_eq!(Expr::parse(&e.render()).unwrap(), e);
    }

    #[test]
    fn negative_base_power() {
        let e = Expr::parse("(-1)^n*x").unwrap();
        assert_eq!(e.render(), "(-1)^n*x");
        let v = e.instantiate(3).unwrap().to_rf().unwrap();
        assert_eq!(v, -&RF::var(Var::new("x")));
    }

    #[test]
    fn right_associativity_is_preserved() {
        for s in ["a - (b - c)", "a/(b*c)", "a*(b/c)", "-(a + b)", "--a", "a^2^3"] {
            match Expr::parse(s) {
                Ok(e) => assert_eq!(Expr::parse(&e.render()).unwrap(), e, "{}", s),
                Err(_) => assert_eq!(s, "a^2^3"),
            }
        }
    }

    #[test]
    fn field_parse() {
        let f = FieldExpr::parse("(1 - y5)/x5 d/dy5 - x d/dx5").unwrap();
        assert_eq!(f.terms.len(), 2);
        assert_eq!(f.terms[1].1, "x5");
        assert_eq!(FieldExpr::parse(&f.render()).unwrap(), f);
        assert!(FieldExpr::parse("0").unwrap().is_zero());
        let g = FieldExpr::parse("d/dy12").unwrap();
        assert_eq!(g.render(), "d/dy12");
    }

    #[test]
    fn parse_errors_carry_columns() {
        match Expr::parse("x + * y") {
            Err(AtlasError::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{:?}", other),
        }
        assert!(Expr::parse("x^(n-2)").is_err());
    }

    #[test]
    fn negative_exponent_after_instantiation() {
        let e = Expr::parse("x^(n-1)").unwrap();
        assert!(matches!(
            e.instantiate(0),
            Err(AtlasError::NegativeExponentAfterInstantiation { .. })
        ));
        assert_eq!(e.instantiate(1).unwrap().to_rf().unwrap(), RF::one());
    }

    #[test]
    fn evaluate_pole() {
        let e = Expr::parse("t/(t-t)").unwrap();
        let mut p = HashMap::new();
        p.insert("t".to_string(), Q::one());
        assert!(matches!(
            e.evaluate(&p, None),
            Err(AtlasError::Cas(CasError::EvaluationPole))
        ));
    }
}
