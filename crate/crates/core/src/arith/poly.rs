use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with big-integer coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration is lexicographic in the
/// exponent vectors and no zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Exponents, c: impl Into<BigInt>) -> Self {
        let mut p = IntPoly::zero(exps.len());
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigInt)>,
    {
        let mut p = IntPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Exponents, BigInt> {
        self.terms
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Adds `c * x^e` in place.
    pub fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Largest term in lexicographic order.
    pub fn leading(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Smallest term in lexicographic order.
    pub fn trailing(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next()
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return IntPoly::zero(self.nvars);
        }
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// Divides every coefficient by `c`; panics unless the division is exact.
    pub fn div_exact(&self, c: &BigInt) -> Self {
        IntPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| {
                    let (q, r) = a.div_rem(c);
                    assert!(r.is_zero(), "inexact coefficient division");
                    (e.clone(), q)
                })
                .collect(),
        }
    }

    /// Componentwise minimum of the exponent vectors.
    pub fn min_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect()
        }))
    }

    /// Componentwise maximum of the exponent vectors.
    pub fn max_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.max(b)).collect()
        }))
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[u32]) -> Self {
        IntPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (add_exps(e, shift), c.clone()))
                .collect(),
        }
    }

    /// Divides by the monomial `x^shift`; panics if some term is not divisible.
    pub fn unshift(&self, shift: &[u32]) -> Self {
        IntPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let d = e
                        .iter()
                        .zip(shift)
                        .map(|(a, b)| a.checked_sub(*b).expect("monomial does not divide"))
                        .collect();
                    (d, c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = IntPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rewrites every exponent vector through `f`, collecting like terms.
    pub fn map_exponents<F>(&self, nvars: usize, f: F) -> Self
    where
        F: Fn(&[u32]) -> Exponents,
    {
        let mut out = IntPoly::zero(nvars);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Substitutes the integer `value` for variable `var`; the variable keeps its slot with exponent 0.
    pub fn substitute(&self, var: usize, value: &BigInt) -> Self {
        let mut out = IntPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[var], 0);
            out.add_term(e2, c * num_traits::pow(value.clone(), k as usize));
        }
        out
    }

    /// Full evaluation at integer values.
    pub fn evaluate(&self, values: &[BigInt]) -> BigInt {
        assert_eq!(values.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(values).fold(c.clone(), |acc, (k, v)| {
                    acc * num_traits::pow(v.clone(), *k as usize)
                })
            })
            .sum()
    }

    /// Degree in the variables selected by `mask`, i.e. max over terms of the summed exponents.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e[vars.clone()].iter().sum())
            .max()
    }

    /// Sign of the trailing coefficient.
    pub fn trailing_is_negative(&self) -> bool {
        self.trailing().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
}

pub(crate) fn add_exps(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = IntPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exps(ea, eb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[u32], i64)]) -> IntPoly {
        IntPoly::from_terms(2, terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))))
    }

    #[test]
    fn cancellation_drops_terms() {
        let a = p(&[(&[1, 0], 2), (&[0, 1], 1)]);
        let b = p(&[(&[1, 0], 2)]);
        let d = &a - &b;
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&[0, 1]), BigInt::from(1));
    }

    #[test]
    fn binomial_square() {
        let x = IntPoly::var(2, 0);
        let y = IntPoly::var(2, 1);
        let s = (&x + &y).pow(2);
        assert_eq!(s, p(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
    }

    #[test]
    fn evaluate_and_substitute() {
        let f = p(&[(&[2, 1], 3), (&[0, 0], -1)]);
        let v = [BigInt::from(2), BigInt::from(5)];
        assert_eq!(f.evaluate(&v), BigInt::from(59));
        let g = f.substitute(0, &BigInt::from(2));
        assert_eq!(g, p(&[(&[0, 1], 12), (&[0, 0], -1)]));
    }

    #[test]
    fn content_and_extremes() {
        let f = p(&[(&[2, 1], 6), (&[1, 3], -4)]);
        assert_eq!(f.content(), BigInt::from(2));
        assert_eq!(f.min_exponents().unwrap(), vec![1, 1]);
        assert_eq!(f.max_exponents().unwrap(), vec![2, 3]);
        assert_eq!(f.leading().unwrap().0, &vec![2, 1]);
    }
}
