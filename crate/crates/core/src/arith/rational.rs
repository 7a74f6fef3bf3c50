use super::poly::{Exponents, IntPoly};
use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A formal quantity such as a point count that transforms as `s -> q^{-w} s` under inversion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusSymbol {
    pub name: String,
    pub inversion_weight: u32,
}

/// Variable layout of a rational function: `[q, t_1..t_a, symbols..]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    t_names: Vec<String>,
    symbols: Vec<FrobeniusSymbol>,
}

impl Signature {
    /// One variable `t`.
    pub fn univariate() -> Self {
        Self::with_t_names(vec!["t".into()])
    }

    /// Variables `t1..ta` (or plain `t` when `a == 1`).
    pub fn multivariate(a: usize) -> Self {
        if a == 1 {
            return Self::univariate();
        }
        Self::with_t_names((1..=a).map(|i| format!("t{i}")).collect())
    }

    pub fn with_t_names(t_names: Vec<String>) -> Self {
        Signature {
            t_names,
            symbols: Vec::new(),
        }
    }

    pub fn with_symbol(mut self, symbol: FrobeniusSymbol) -> Self {
        self.symbols.push(symbol);
        self
    }

    pub fn arity(&self) -> usize {
        self.t_names.len()
    }

    pub fn symbols(&self) -> &[FrobeniusSymbol] {
        &self.symbols
    }

    pub fn t_names(&self) -> &[String] {
        &self.t_names
    }

    pub fn nvars(&self) -> usize {
        1 + self.t_names.len() + self.symbols.len()
    }

    pub fn t_range(&self) -> std::ops::Range<usize> {
        1..1 + self.arity()
    }

    pub fn symbol_range(&self) -> std::ops::Range<usize> {
        1 + self.arity()..self.nvars()
    }

    pub fn var_names(&self) -> Vec<String> {
        std::iter::once("q".to_string())
            .chain(self.t_names.iter().cloned())
            .chain(self.symbols.iter().map(|s| s.name.clone()))
            .collect()
    }

    /// Same arity and symbols; variable names may differ.
    pub fn compatible(&self, other: &Signature) -> bool {
        self.arity() == other.arity() && self.symbols == other.symbols
    }

    /// The monomial `q^qe * t^te` as an exponent vector.
    pub fn exps(&self, qe: u32, te: &[u32]) -> Exponents {
        assert_eq!(te.len(), self.arity());
        let mut e = vec![0; self.nvars()];
        e[0] = qe;
        e[self.t_range()].copy_from_slice(te);
        e
    }

    /// `1 - q^qe t^te`.
    pub fn one_minus(&self, qe: u32, te: &[u32]) -> IntPoly {
        &IntPoly::one(self.nvars()) - &IntPoly::monomial(self.exps(qe, te), 1)
    }

    /// `q^qe t^te`.
    pub fn monomial(&self, c: i64, qe: u32, te: &[u32]) -> IntPoly {
        IntPoly::monomial(self.exps(qe, te), c)
    }
}

/// Ratio of integer polynomials, kept in a canonical (not necessarily reduced) form.
///
/// Canonical form: the common monomial factor is removed, the combined content is 1 and the
/// trailing (lexicographically smallest) denominator coefficient is positive. An optional
/// factorization of the denominator is kept for rendering.
#[derive(Clone, Debug)]
pub struct RationalFn {
    sig: Signature,
    num: IntPoly,
    den: IntPoly,
    den_factors: Option<Vec<(IntPoly, u32)>>,
}

/// `W1 / W2 = sign * q^q_exp * prod t_i^{t_exps[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialRatio {
    pub sign: i8,
    pub q_exp: i64,
    pub t_exps: Vec<i64>,
}

impl RationalFn {
    pub fn new(sig: Signature, num: IntPoly, den: IntPoly) -> Result<Self> {
        Self::build(sig, num, den, None)
    }

    /// Builds `num / prod f^k`, remembering the factorization.
    pub fn with_factors(sig: Signature, num: IntPoly, factors: Vec<(IntPoly, u32)>) -> Result<Self> {
        let mut num = num;
        let mut fs = Vec::new();
        for (f, k) in factors {
            if k == 0 {
                continue;
            }
            if f.is_zero() {
                return invalid("zero denominator factor");
            }
            let f = if f.trailing_is_negative() {
                if k % 2 == 1 {
                    num = -num;
                }
                -f
            } else {
                f
            };
            if f == IntPoly::one(sig.nvars()) {
                continue;
            }
            fs.push((f, k));
        }
        let den = fs
            .iter()
            .fold(IntPoly::one(sig.nvars()), |acc, (f, k)| &acc * &f.pow(*k));
        Self::build(sig, num, den, Some(fs))
    }

    pub fn from_poly(sig: Signature, num: IntPoly) -> Self {
        let one = IntPoly::one(sig.nvars());
        Self::build(sig, num, one, Some(Vec::new())).expect("unit denominator")
    }

    pub fn one(sig: Signature) -> Self {
        let one = IntPoly::one(sig.nvars());
        Self::from_poly(sig, one)
    }

    fn build(
        sig: Signature,
        num: IntPoly,
        den: IntPoly,
        den_factors: Option<Vec<(IntPoly, u32)>>,
    ) -> Result<Self> {
        if num.nvars() != sig.nvars() || den.nvars() != sig.nvars() {
            return invalid("polynomial variable count does not match signature");
        }
        if den.is_zero() {
            return invalid("zero denominator");
        }
        let syms = sig.symbol_range();
        if den.terms().any(|(e, _)| e[syms.clone()].iter().any(|&k| k > 0)) {
            return invalid("symbols may not appear in a denominator");
        }
        let mut w = RationalFn {
            sig,
            num,
            den,
            den_factors,
        };
        w.normalize();
        Ok(w)
    }

    fn normalize(&mut self) {
        let n = self.sig.nvars();
        if self.num.is_zero() {
            self.den = IntPoly::one(n);
            self.den_factors = Some(Vec::new());
            return;
        }
        let mn = self.num.min_exponents().unwrap();
        let md = self.den.min_exponents().unwrap();
        let common: Exponents = mn.iter().zip(&md).map(|(a, b)| *a.min(b)).collect();
        if common.iter().any(|&k| k > 0) {
            self.num = self.num.unshift(&common);
            self.den = self.den.unshift(&common);
        }
        let g = self.num.content().gcd(&self.den.content());
        if !g.is_one() {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        if self.den.trailing_is_negative() {
            self.num = -&self.num;
            self.den = -&self.den;
        }
        if let Some(fs) = &self.den_factors {
            let prod = fs
                .iter()
                .fold(IntPoly::one(n), |acc, (f, k)| &acc * &f.pow(*k));
            if prod != self.den {
                self.den_factors = None;
            }
        }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn arity(&self) -> usize {
        self.sig.arity()
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn den_factors(&self) -> Option<&[(IntPoly, u32)]> {
        self.den_factors.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn check_compatible(&self, other: &RationalFn) {
        assert!(
            self.sig.compatible(&other.sig),
            "rational functions over different variable sets"
        );
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        self.check_compatible(other);
        let num = &self.num * &other.num;
        match (&self.den_factors, &other.den_factors) {
            (Some(a), Some(b)) => {
                let fs = merge_factors(a, b);
                RationalFn::with_factors(self.sig.clone(), num, fs).expect("nonzero factors")
            }
            _ => RationalFn::build(self.sig.clone(), num, &self.den * &other.den, None)
                .expect("nonzero denominator"),
        }
    }

    pub fn pow(&self, k: u32) -> RationalFn {
        (0..k).fold(RationalFn::one(self.sig.clone()), |acc, _| acc.mul(self))
    }

    /// Multiplies the numerator by a polynomial.
    pub fn scale(&self, p: &IntPoly) -> RationalFn {
        let mut w = self.clone();
        w.num = &w.num * p;
        w.normalize();
        w
    }

    pub fn neg(&self) -> RationalFn {
        let mut w = self.clone();
        w.num = -&w.num;
        w
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        self.check_compatible(other);
        if let (Some(a), Some(b)) = (&self.den_factors, &other.den_factors) {
            // common multiple of the two factor lists
            let lcm = lcm_factors(a, b);
            let ca = cofactor(&lcm, a, self.sig.nvars());
            let cb = cofactor(&lcm, b, self.sig.nvars());
            let num = &(&self.num * &ca) + &(&other.num * &cb);
            return RationalFn::with_factors(self.sig.clone(), num, lcm).expect("nonzero factors");
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RationalFn::build(self.sig.clone(), num, &self.den * &other.den, None)
            .expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    /// Equality of the represented functions, decided by cross-multiplication.
    pub fn equals(&self, other: &RationalFn) -> bool {
        self.sig.compatible(&other.sig) && &self.num * &other.den == &other.num * &self.den
    }

    /// Substitutes `q -> q^{-1}`, `t_i -> t_i^{-1}` and `s -> q^{-w} s` for every symbol.
    pub fn invert_qt(&self) -> Result<RationalFn> {
        if self.is_zero() {
            return invalid("cannot invert the zero function");
        }
        let (num_rev, sn) = self.reverse(&self.num);
        let (den_rev, sd, factors) = match &self.den_factors {
            Some(fs) => {
                let mut shift = vec![0i64; self.sig.nvars()];
                let mut out = Vec::new();
                for (f, k) in fs {
                    let (fr, s) = self.reverse(f);
                    for (acc, x) in shift.iter_mut().zip(&s) {
                        *acc += x * *k as i64;
                    }
                    out.push((fr, *k));
                }
                let prod = out
                    .iter()
                    .fold(IntPoly::one(self.sig.nvars()), |acc, (f, k)| &acc * &f.pow(*k));
                (prod, shift, Some(out))
            }
            None => {
                let (dr, s) = self.reverse(&self.den);
                (dr, s, None)
            }
        };
        // W(1/x) = x^{sd - sn} num_rev / den_rev
        let diff: Vec<i64> = sd.iter().zip(&sn).map(|(a, b)| a - b).collect();
        let pos: Exponents = diff.iter().map(|&d| d.max(0) as u32).collect();
        let neg: Exponents = diff.iter().map(|&d| (-d).max(0) as u32).collect();
        let num = num_rev.shift(&pos);
        let neg_mono = IntPoly::monomial(neg.clone(), 1);
        match factors {
            Some(mut fs) => {
                if neg.iter().any(|&k| k > 0) {
                    fs.push((neg_mono, 1));
                }
                RationalFn::with_factors(self.sig.clone(), num, fs)
            }
            None => RationalFn::build(self.sig.clone(), num, den_rev.shift(&neg), None),
        }
    }

    /// Returns `(x^S P(1/x), S)` where `S` is the smallest shift clearing negative exponents.
    fn reverse(&self, p: &IntPoly) -> (IntPoly, Vec<i64>) {
        let n = self.sig.nvars();
        let syms = self.sig.symbol_range();
        let weights: Vec<u32> = self.sig.symbols.iter().map(|s| s.inversion_weight).collect();
        let inverted: Vec<(Vec<i64>, BigInt)> = p
            .terms()
            .map(|(e, c)| {
                let mut v: Vec<i64> = e.iter().map(|&k| -(k as i64)).collect();
                for (j, w) in syms.clone().zip(&weights) {
                    v[0] -= (*w as i64) * e[j] as i64;
                    v[j] = e[j] as i64;
                }
                (v, c.clone())
            })
            .collect();
        let mut shift = vec![0i64; n];
        for i in 0..n {
            if syms.contains(&i) {
                continue;
            }
            shift[i] = inverted.iter().map(|(v, _)| -v[i]).max().unwrap_or(0);
        }
        let out = IntPoly::from_terms(
            n,
            inverted.into_iter().map(|(v, c)| {
                let e = v.iter().zip(&shift).map(|(a, s)| (a + s) as u32).collect();
                (e, c)
            }),
        );
        (out, shift)
    }

    /// Sets every `t_i` equal to a single `t`.
    pub fn specialize_t(&self) -> RationalFn {
        let sig = Signature {
            t_names: vec!["t".into()],
            symbols: self.sig.symbols.clone(),
        };
        let a = self.arity();
        let map = |e: &[u32]| -> Exponents {
            let mut out = vec![e[0], e[1..1 + a].iter().sum()];
            out.extend_from_slice(&e[1 + a..]);
            out
        };
        let n = sig.nvars();
        let num = self.num.map_exponents(n, map);
        match &self.den_factors {
            Some(fs) => {
                let fs = fs.iter().map(|(f, k)| (f.map_exponents(n, map), *k)).collect();
                RationalFn::with_factors(sig, num, fs).expect("nonzero factors")
            }
            None => RationalFn::build(sig, num, self.den.map_exponents(n, map), None)
                .expect("nonzero denominator"),
        }
    }

    /// Replaces each symbol by an integer value, dropping it from the signature.
    pub fn substitute_symbols(&self, values: &[BigInt]) -> RationalFn {
        assert_eq!(values.len(), self.sig.symbols.len());
        let sig = Signature::with_t_names(self.sig.t_names.clone());
        let keep = 1 + self.arity();
        let n = sig.nvars();
        let mut num = IntPoly::zero(n);
        for (e, c) in self.num.terms() {
            let v = e[keep..]
                .iter()
                .zip(values)
                .fold(c.clone(), |acc, (k, x)| acc * num_traits::pow(x.clone(), *k as usize));
            num.add_term(e[..keep].to_vec(), v);
        }
        let trunc = |e: &[u32]| e[..keep].to_vec();
        match &self.den_factors {
            Some(fs) => {
                let fs = fs.iter().map(|(f, k)| (f.map_exponents(n, trunc), *k)).collect();
                RationalFn::with_factors(sig, num, fs).expect("nonzero factors")
            }
            None => RationalFn::build(sig, num, self.den.map_exponents(n, trunc), None)
                .expect("nonzero denominator"),
        }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::grammar::render(self))
    }
}

fn merge_factors(a: &[(IntPoly, u32)], b: &[(IntPoly, u32)]) -> Vec<(IntPoly, u32)> {
    let mut out: Vec<(IntPoly, u32)> = a.to_vec();
    for (f, k) in b {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some(slot) => slot.1 += k,
            None => out.push((f.clone(), *k)),
        }
    }
    out
}

fn lcm_factors(a: &[(IntPoly, u32)], b: &[(IntPoly, u32)]) -> Vec<(IntPoly, u32)> {
    let mut out: Vec<(IntPoly, u32)> = a.to_vec();
    for (f, k) in b {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some(slot) => slot.1 = slot.1.max(*k),
            None => out.push((f.clone(), *k)),
        }
    }
    out
}

/// Product of the factors of `lcm` not accounted for by `part`.
fn cofactor(lcm: &[(IntPoly, u32)], part: &[(IntPoly, u32)], nvars: usize) -> IntPoly {
    lcm.iter().fold(IntPoly::one(nvars), |acc, (f, k)| {
        let used = part.iter().find(|(g, _)| g == f).map(|(_, j)| *j).unwrap_or(0);
        &acc * &f.pow(k - used)
    })
}

/// Decides whether `w1 / w2` is `± q^b t^c` for a Laurent monomial, returning the data if so.
pub fn monomial_ratio(w1: &RationalFn, w2: &RationalFn) -> Option<MonomialRatio> {
    w1.check_compatible(w2);
    let a = &w1.num * &w2.den;
    let b = &w2.num * &w1.den;
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let (ea, ca) = a.leading().unwrap();
    let (eb, cb) = b.leading().unwrap();
    let shift: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| *x as i64 - *y as i64).collect();
    let sig = &w1.sig;
    if sig.symbol_range().any(|j| shift[j] != 0) {
        return None;
    }
    let sign: i8 = if ca == cb {
        1
    } else if *ca == -cb {
        -1
    } else {
        return None;
    };
    let pos: Exponents = shift.iter().map(|&d| d.max(0) as u32).collect();
    let neg: Exponents = shift.iter().map(|&d| (-d).max(0) as u32).collect();
    let lhs = a.shift(&neg);
    let rhs = b.shift(&pos);
    let rhs = if sign < 0 { -rhs } else { rhs };
    if lhs != rhs {
        return None;
    }
    Some(MonomialRatio {
        sign,
        q_exp: shift[0],
        t_exps: shift[sig.t_range()].to_vec(),
    })
}

impl MonomialRatio {
    /// `sign * q^b * t^c` as a rational function over `sig`.
    pub fn to_rational(&self, sig: &Signature) -> RationalFn {
        let mut exps: Vec<i64> = vec![0; sig.nvars()];
        exps[0] = self.q_exp;
        exps[sig.t_range()].copy_from_slice(&self.t_exps);
        let pos: Exponents = exps.iter().map(|&d| d.max(0) as u32).collect();
        let neg: Exponents = exps.iter().map(|&d| (-d).max(0) as u32).collect();
        let num = IntPoly::monomial(pos, self.sign as i64);
        RationalFn::new(sig.clone(), num, IntPoly::monomial(neg, 1)).expect("monomial denominator")
    }

    pub fn render(&self, sig: &Signature) -> String {
        let mut parts = Vec::new();
        let names = sig.var_names();
        let mut push = |name: &str, k: i64| {
            if k == 1 {
                parts.push(name.to_string());
            } else if k != 0 {
                parts.push(format!("{name}^{k}"));
            }
        };
        push("q", self.q_exp);
        for (i, k) in self.t_exps.iter().enumerate() {
            push(&names[1 + i], *k);
        }
        let body = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        };
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(sig: &Signature, qe: u32, te: &[u32]) -> RationalFn {
        RationalFn::with_factors(
            sig.clone(),
            IntPoly::one(sig.nvars()),
            vec![(sig.one_minus(qe, te), 1)],
        )
        .unwrap()
    }

    #[test]
    fn invert_geometric() {
        let sig = Signature::univariate();
        let w = geometric(&sig, 0, &[1]);
        let inv = w.invert_qt().unwrap();
        let expected = RationalFn::with_factors(
            sig.clone(),
            sig.monomial(-1, 0, &[1]),
            vec![(sig.one_minus(0, &[1]), 1)],
        )
        .unwrap();
        assert_eq!(inv, expected);
        assert_eq!(inv.to_string(), "-t/(1-t)");
    }

    #[test]
    fn heisenberg_symmetry() {
        let sig = Signature::univariate();
        let w = geometric(&sig, 0, &[1])
            .mul(&geometric(&sig, 1, &[1]))
            .mul(&geometric(&sig, 2, &[3]));
        let r = monomial_ratio(&w.invert_qt().unwrap(), &w).unwrap();
        assert_eq!(r, MonomialRatio { sign: -1, q_exp: 3, t_exps: vec![5] });
    }

    #[test]
    fn ratio_examples() {
        let sig = Signature::univariate();
        let w = geometric(&sig, 0, &[1]);
        let r = monomial_ratio(&w.invert_qt().unwrap(), &w).unwrap();
        assert_eq!(r, MonomialRatio { sign: -1, q_exp: 0, t_exps: vec![1] });
        assert_eq!(
            monomial_ratio(&w, &w).unwrap(),
            MonomialRatio { sign: 1, q_exp: 0, t_exps: vec![0] }
        );
        assert!(monomial_ratio(&w, &geometric(&sig, 0, &[2])).is_none());
    }

    #[test]
    fn symbol_weight_enters_q_exponent() {
        let sig = Signature::univariate().with_symbol(FrobeniusSymbol {
            name: "E".into(),
            inversion_weight: 1,
        });
        let e = IntPoly::var(sig.nvars(), 2);
        let w = RationalFn::from_poly(sig.clone(), e);
        let r = monomial_ratio(&w.invert_qt().unwrap(), &w).unwrap();
        assert_eq!(r, MonomialRatio { sign: 1, q_exp: -1, t_exps: vec![0] });
    }

    #[test]
    fn add_keeps_factorization() {
        let sig = Signature::univariate();
        let a = geometric(&sig, 0, &[1]);
        let b = geometric(&sig, 1, &[1]);
        let s = a.add(&b);
        assert_eq!(s.den_factors().unwrap().len(), 2);
        let direct = RationalFn::new(
            sig.clone(),
            &sig.one_minus(0, &[1]) + &sig.one_minus(1, &[1]),
            &sig.one_minus(0, &[1]) * &sig.one_minus(1, &[1]),
        )
        .unwrap();
        assert_eq!(s, direct);
    }
}
