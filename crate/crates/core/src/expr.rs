//! Small expression language for scalars and algebra elements.
//!
//! Grammar: sums and differences of products of factors; a factor is an
//! integer, `z` (the primitive root of the session conductor), a basis label,
//! or a parenthesised expression, optionally raised to an integer power.
//! Division is only allowed by scalars.

use crate::error::{Error, Result};
use crate::scalar::CycScalar;

/// Resolves basis labels and multiplies algebra elements.
pub trait ExprContext {
    fn conductor(&self) -> u32;
    fn lookup(&self, _name: &str) -> Option<Vec<CycScalar>> {
        None
    }
    fn multiply(&self, _a: &[CycScalar], _b: &[CycScalar]) -> Option<Vec<CycScalar>> {
        None
    }
    fn unit(&self) -> Option<Vec<CycScalar>> {
        None
    }
}

struct ScalarOnly(u32);

impl ExprContext for ScalarOnly {
    fn conductor(&self) -> u32 {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

#[derive(Clone, Debug)]
enum Val {
    S(CycScalar),
    V(Vec<CycScalar>),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| Error::parse(format!("column {}", start + 1), "integer too large"))?;
            out.push((start, Tok::Int(v)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::parse(format!("column {}", i + 1), format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a, C: ExprContext> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a C,
    len: usize,
}

impl<'a, C: ExprContext> Parser<'a, C> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let col = self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len) + 1;
        Err(Error::parse(format!("column {col}"), msg))
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.add(acc, rhs, op == '-')?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { self.mul(acc, rhs)? } else { self.div(acc, rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(match v {
                Val::S(s) => Val::S(-s),
                Val::V(v) => Val::V(v.iter().map(|x| -x).collect()),
            });
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Val> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let mut neg = false;
        if self.peek_op() == Some('-') {
            neg = true;
            self.pos += 1;
        }
        let e = match self.toks.get(self.pos) {
            Some((_, Tok::Int(e))) => *e,
            _ => return self.err("expected integer exponent"),
        };
        self.pos += 1;
        let e = if neg { -e } else { e };
        match base {
            Val::S(s) => match s.pow(e) {
                Ok(v) => Ok(Val::S(v)),
                Err(_) => self.err("zero raised to a negative power"),
            },
            Val::V(v) => {
                if e < 1 {
                    return self.err("algebra elements only take positive powers");
                }
                let mut acc = v.clone();
                for _ in 1..e {
                    acc = self.vmul(&acc, &v)?;
                }
                Ok(Val::V(acc))
            }
        }
    }

    fn atom(&mut self) -> Result<Val> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Int(v) => {
                self.pos += 1;
                Ok(Val::S(CycScalar::from_int(v)))
            }
            Tok::Ident(name) => {
                if name == "z" {
                    self.pos += 1;
                    return Ok(Val::S(CycScalar::root_of_unity(self.ctx.conductor())));
                }
                match self.ctx.lookup(&name) {
                    Some(v) => {
                        self.pos += 1;
                        Ok(Val::V(v))
                    }
                    None => self.err(format!("unknown symbol '{name}'")),
                }
            }
            Tok::Op('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
        }
    }

    fn as_vector(&self, s: CycScalar) -> Result<Vec<CycScalar>> {
        match self.ctx.unit() {
            Some(u) => Ok(u.iter().map(|x| x * &s).collect()),
            None => self.err("cannot mix scalars and algebra elements without a unit"),
        }
    }

    fn add(&self, a: Val, b: Val, sub: bool) -> Result<Val> {
        let f = |x: &CycScalar, y: &CycScalar| if sub { x - y } else { x + y };
        Ok(match (a, b) {
            (Val::S(x), Val::S(y)) => Val::S(f(&x, &y)),
            (Val::V(x), Val::V(y)) => Val::V(x.iter().zip(&y).map(|(p, q)| f(p, q)).collect()),
            (Val::S(x), Val::V(y)) => {
                let x = self.as_vector(x)?;
                Val::V(x.iter().zip(&y).map(|(p, q)| f(p, q)).collect())
            }
            (Val::V(x), Val::S(y)) => {
                let y = self.as_vector(y)?;
                Val::V(x.iter().zip(&y).map(|(p, q)| f(p, q)).collect())
            }
        })
    }

    fn vmul(&self, a: &[CycScalar], b: &[CycScalar]) -> Result<Vec<CycScalar>> {
        match self.ctx.multiply(a, b) {
            Some(v) => Ok(v),
            None => self.err("product of algebra elements is not available here"),
        }
    }

    fn mul(&self, a: Val, b: Val) -> Result<Val> {
        Ok(match (a, b) {
            (Val::S(x), Val::S(y)) => Val::S(&x * &y),
            (Val::S(s), Val::V(v)) | (Val::V(v), Val::S(s)) => Val::V(v.iter().map(|x| x * &s).collect()),
            (Val::V(x), Val::V(y)) => Val::V(self.vmul(&x, &y)?),
        })
    }

    fn div(&self, a: Val, b: Val) -> Result<Val> {
        let Val::S(d) = b else {
            return self.err("division by an algebra element");
        };
        let Ok(inv) = d.inv() else {
            return self.err("division by zero");
        };
        Ok(match a {
            Val::S(x) => Val::S(&x * &inv),
            Val::V(v) => Val::V(v.iter().map(|x| x * &inv).collect()),
        })
    }
}

fn run<C: ExprContext>(text: &str, ctx: &C) -> Result<Val> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, ctx, len: text.chars().count() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

pub fn parse_scalar(text: &str, conductor: u32) -> Result<CycScalar> {
    match run(text, &ScalarOnly(conductor))? {
        Val::S(s) => Ok(s),
        Val::V(_) => Err(Error::parse("column 1", "expected a scalar")),
    }
}

/// Evaluates an algebra-valued expression (a bare scalar is multiplied by the unit).
pub fn parse_element<C: ExprContext>(text: &str, ctx: &C) -> Result<Vec<CycScalar>> {
    match run(text, ctx)? {
        Val::V(v) => Ok(v),
        Val::S(s) => match ctx.unit() {
            Some(u) => Ok(u.iter().map(|x| x * &s).collect()),
            None => Err(Error::parse("column 1", "expected an algebra element")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Poly2;
    impl ExprContext for Poly2 {
        fn conductor(&self) -> u32 {
            4
        }
        fn lookup(&self, name: &str) -> Option<Vec<CycScalar>> {
            match name {
                "a" => Some(vec![CycScalar::one(), CycScalar::zero()]),
                "b" => Some(vec![CycScalar::zero(), CycScalar::one()]),
                _ => None,
            }
        }
        fn multiply(&self, x: &[CycScalar], y: &[CycScalar]) -> Option<Vec<CycScalar>> {
            Some(x.iter().zip(y).map(|(p, q)| p * q).collect())
        }
        fn unit(&self) -> Option<Vec<CycScalar>> {
            Some(vec![CycScalar::one(), CycScalar::one()])
        }
    }

    #[test]
    fn scalars_round_trip() {
        for s in ["1/2 + 1/2*z^3", "1 - z", "-3*z", "0", "7/3"] {
            let v = parse_scalar(s, 8).unwrap();
            assert_eq!(v.format_in(8), s);
        }
        assert_eq!(parse_scalar("z^4", 4).unwrap(), CycScalar::one());
        assert_eq!(parse_scalar("(1+z)*(1-z)", 4).unwrap(), CycScalar::from_int(2));
        assert_eq!(parse_scalar("z^-1", 4).unwrap(), parse_scalar("z^3", 4).unwrap());
    }

    #[test]
    fn elements() {
        let v = parse_element("1 - 2*a + z*b*b", &Poly2).unwrap();
        assert_eq!(v[0], CycScalar::from_int(-1));
        assert_eq!(v[1], parse_scalar("1 + z", 4).unwrap());
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_scalar("1 + $", 3).unwrap_err();
        assert_eq!(e, Error::parse("column 5", "unexpected character '$'"));
        let e = parse_element("a + c", &Poly2).unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "column 5"));
    }
}
