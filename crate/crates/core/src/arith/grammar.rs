//! Text form of polynomials and rational functions.
//!
//! Numerators print expanded in ascending term order, e.g. `1-q*t`; denominators print as a
//! product of their recorded factors, e.g. `(1+t^2)/((1-t)(1-t^2)(1-t^3))`.

use super::poly::IntPoly;
use super::rational::{RationalFn, Signature};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed};

pub fn render_poly(p: &IntPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in p.terms().enumerate() {
        let mono: Vec<String> = e
            .iter()
            .zip(names)
            .filter(|(k, _)| **k > 0)
            .map(|(k, name)| {
                if *k == 1 {
                    name.clone()
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        let neg = c.is_negative();
        if neg {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        let a = c.abs();
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                out.push_str(&a.to_string());
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    out
}

pub fn render(w: &RationalFn) -> String {
    let names = w.sig().var_names();
    let num = render_poly(w.num(), &names);
    if w.den() == &IntPoly::one(w.sig().nvars()) {
        return num;
    }
    let num = if w.num().len() > 1 {
        format!("({num})")
    } else {
        num
    };
    let den = match w.den_factors() {
        Some(fs) => {
            let groups: Vec<String> = fs
                .iter()
                .map(|(f, k)| {
                    let body = format!("({})", render_poly(f, &names));
                    if *k == 1 {
                        body
                    } else {
                        format!("{body}^{k}")
                    }
                })
                .collect();
            if groups.len() == 1 {
                groups[0].clone()
            } else {
                format!("({})", groups.concat())
            }
        }
        None => format!("({})", render_poly(w.den(), &names)),
    };
    format!("{num}/{den}")
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = s[start..i].parse().expect("digits");
            out.push((start, Tok::Num(n)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(ch) {
            out.push((i, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

/// A parsed product: its value and, when it is a pure product, the factors.
struct Product {
    value: IntPoly,
    factors: Vec<(IntPoly, u32)>,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: Vec<String>,
    nvars: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.src.len())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// expr := ['+'|'-'] product (('+'|'-') product)*
    fn expr(&mut self) -> Result<(IntPoly, Option<Vec<(IntPoly, u32)>>)> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let first = self.product()?;
        let mut value = if neg { -first.value } else { first.value };
        let mut single = !neg;
        let factors = first.factors;
        loop {
            if self.eat('+') {
                value = &value + &self.product()?.value;
            } else if self.eat('-') {
                value = &value - &self.product()?.value;
            } else {
                break;
            }
            single = false;
        }
        Ok((value, if single { Some(factors) } else { None }))
    }

    /// product := power (['*'] power)*
    fn product(&mut self) -> Result<Product> {
        let mut value = IntPoly::one(self.nvars);
        let mut factors = Vec::new();
        loop {
            let (base, inner, k) = self.power()?;
            value = &value * &base.pow(k);
            match inner {
                Some(fs) => factors.extend(fs.into_iter().map(|(f, j)| (f, j * k))),
                None => factors.push((base, k)),
            }
            if self.eat('*') {
                continue;
            }
            match self.peek() {
                Some(Tok::Sym('(')) | Some(Tok::Ident(_)) | Some(Tok::Num(_)) => continue,
                _ => break,
            }
        }
        Ok(Product { value, factors })
    }

    /// power := atom ['^' uint]; returns the base, the base's own factors and the exponent.
    fn power(&mut self) -> Result<(IntPoly, Option<Vec<(IntPoly, u32)>>, u32)> {
        let (base, inner) = self.atom()?;
        let mut k = 1u32;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    k = u32::try_from(&n).or_else(|_| self.err("exponent too large"))?;
                }
                _ => return self.err("expected exponent"),
            }
        }
        Ok((base, inner, k))
    }

    fn atom(&mut self) -> Result<(IntPoly, Option<Vec<(IntPoly, u32)>>)> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok((IntPoly::constant(self.nvars, n), None))
            }
            Some(Tok::Ident(name)) => {
                let Some(i) = self.names.iter().position(|x| *x == name) else {
                    return self.err(format!("unknown variable `{name}`"));
                };
                self.pos += 1;
                Ok((IntPoly::var(self.nvars, i), None))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let (v, fs) = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                // a parenthesised sum is itself a factor; a parenthesised product is flattened
                let fs = fs.filter(|fs| fs.len() > 1 || fs.iter().any(|(_, k)| *k > 1));
                Ok((v, fs))
            }
            _ => self.err("expected a number, variable or `(`"),
        }
    }
}

/// Parses the rendered grammar back into a rational function over `sig`.
pub fn parse(s: &str, sig: &Signature) -> Result<RationalFn> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        names: sig.var_names(),
        nvars: sig.nvars(),
        src: s,
    };
    let (num, _) = p.expr()?;
    let w = if p.eat('/') {
        let den = p.product()?;
        RationalFn::with_factors(sig.clone(), num, den.factors)?
    } else {
        RationalFn::from_poly(sig.clone(), num)
    };
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(w)
}

/// Parses a polynomial over the variables `names`.
pub fn parse_poly(s: &str, names: &[String]) -> Result<IntPoly> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        names: names.to_vec(),
        nvars: names.len(),
        src: s,
    };
    let (v, _) = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_formula_text() {
        let sig = Signature::univariate();
        let w = parse("(1+t^2)/((1-t)(1-t^2)(1-t^3))", &sig).unwrap();
        assert_eq!(w.den_factors().unwrap().len(), 3);
        assert_eq!(render(&w), "(1+t^2)/((1-t)(1-t^2)(1-t^3))");
    }

    #[test]
    fn powers_and_coefficients() {
        let sig = Signature::univariate();
        let w = parse("(1+2*t^3-2*t^4-t^7)/((1-t)^3(1-t^3)(1-t^5)(1-q*t^4))", &sig).unwrap();
        let back = parse(&render(&w), &sig).unwrap();
        assert_eq!(render(&back), render(&w));
        assert_eq!(w.den_factors().unwrap()[0].1, 3);
    }

    #[test]
    fn errors_carry_positions() {
        let sig = Signature::univariate();
        match parse("1/(1-x)", &sig) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse("1/(1-t", &sig).is_err());
    }

    #[test]
    fn multivariate_names() {
        let sig = Signature::multivariate(2);
        let w = parse("1/((1-t1)(1-q*t1)(1-t1^2*t2))", &sig).unwrap();
        assert_eq!(render(&w), "1/((1-t1)(1-q*t1)(1-t1^2*t2))");
    }
}
