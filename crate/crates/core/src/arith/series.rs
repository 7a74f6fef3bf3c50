use super::poly::{Exponents, IntPoly};
use super::rational::{RationalFn, Signature};
use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// `q^shift * poly`, where `poly` lives in the variables `[q, symbols..]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QLaurent {
    pub shift: i64,
    pub poly: IntPoly,
}

impl QLaurent {
    fn new(shift: i64, poly: IntPoly) -> Self {
        let mut c = QLaurent { shift, poly };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        if self.poly.is_zero() {
            self.shift = 0;
            return;
        }
        let k = self.poly.min_exponents().unwrap()[0];
        if k > 0 {
            let mut s = vec![0; self.poly.nvars()];
            s[0] = k;
            self.poly = self.poly.unshift(&s);
            self.shift += k as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The coefficient as a polynomial in q, if it has no negative powers.
    pub fn as_poly(&self) -> Option<IntPoly> {
        if self.shift < 0 {
            return None;
        }
        let mut s = vec![0; self.poly.nvars()];
        s[0] = self.shift as u32;
        Some(self.poly.shift(&s))
    }

    fn add(&self, other: &QLaurent) -> QLaurent {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(other.shift);
        let lift = |c: &QLaurent| {
            let mut s = vec![0; c.poly.nvars()];
            s[0] = (c.shift - m) as u32;
            c.poly.shift(&s)
        };
        QLaurent::new(m, &lift(self) + &lift(other))
    }

    fn mul(&self, other: &QLaurent) -> QLaurent {
        QLaurent::new(self.shift + other.shift, &self.poly * &other.poly)
    }

    /// Evaluates at integer `q` and symbol values; fails if a negative power does not cancel.
    pub fn evaluate(&self, q: &BigInt, symbols: &[BigInt]) -> Result<BigInt> {
        let mut vals = vec![q.clone()];
        vals.extend_from_slice(symbols);
        let v = self.poly.evaluate(&vals);
        if self.shift >= 0 {
            Ok(v * num_traits::pow(q.clone(), self.shift as usize))
        } else {
            let d = num_traits::pow(q.clone(), (-self.shift) as usize);
            let (quo, rem) = v.div_rem(&d);
            if !rem.is_zero() {
                return invalid(format!("coefficient is not integral at q = {q}"));
            }
            Ok(quo)
        }
    }
}

/// Truncated multivariate power series in the t-variables with coefficients in `q` (and symbols).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    sig: Signature,
    bound: u32,
    coeffs: BTreeMap<Exponents, QLaurent>,
}

/// All exponent vectors of `arity` entries with total degree at most `bound`, by degree.
pub fn exponent_vectors(arity: usize, bound: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for d in 0..=bound {
        compositions(arity, d, &mut Vec::new(), &mut out);
    }
    out
}

fn compositions(parts: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponents>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=total).rev() {
        prefix.push(k);
        compositions(parts - 1, total - k, prefix, out);
        prefix.pop();
    }
}

/// Splits a polynomial over `[q, t.., symbols..]` into its t-exponent slices.
fn slice_by_t(p: &IntPoly, sig: &Signature) -> BTreeMap<Exponents, IntPoly> {
    let tr = sig.t_range();
    let cvars = sig.nvars() - sig.arity();
    let mut out: BTreeMap<Exponents, IntPoly> = BTreeMap::new();
    for (e, c) in p.terms() {
        let te = e[tr.clone()].to_vec();
        let mut ce = vec![e[0]];
        ce.extend_from_slice(&e[tr.end..]);
        out.entry(te)
            .or_insert_with(|| IntPoly::zero(cvars))
            .add_term(ce, c.clone());
    }
    out
}

/// Expands `w` as a power series up to total t-degree `bound`.
pub fn series_expand(w: &RationalFn, bound: u32) -> Result<PowerSeries> {
    let sig = w.sig().clone();
    let a = sig.arity();
    let cvars = sig.nvars() - a;
    let dslices = slice_by_t(w.den(), &sig);
    let nslices = slice_by_t(w.num(), &sig);
    let zero_t = vec![0u32; a];
    let d0 = dslices.get(&zero_t).cloned().unwrap_or_else(|| IntPoly::zero(cvars));
    let names: Vec<String> = std::iter::once("q".to_string())
        .chain(sig.symbols().iter().map(|s| s.name.clone()))
        .collect();
    let unit = match (d0.len(), d0.leading()) {
        (1, Some((e, c))) if c.abs().is_one() && e[1..].iter().all(|&k| k == 0) => {
            Some((e[0], c.is_positive()))
        }
        _ => None,
    };
    let Some((k, positive)) = unit else {
        return Err(Error::NonUnitDenominator(super::grammar::render_poly(&d0, &names)));
    };
    let qpow = |m: u64| {
        let mut e = vec![0u32; cvars];
        e[0] = u32::try_from(m).expect("q exponent overflow");
        IntPoly::monomial(e, 1)
    };
    let higher: Vec<(&Exponents, &IntPoly, u32)> = dslices
        .iter()
        .filter(|(b, _)| b.iter().any(|&x| x > 0))
        .map(|(b, p)| (b, p, b.iter().sum::<u32>()))
        .collect();
    // c_alpha = q^{-k(|alpha|+1)} P_alpha with P_alpha an honest polynomial
    let mut pcoef: HashMap<Exponents, IntPoly> = HashMap::new();
    let mut coeffs = BTreeMap::new();
    for alpha in exponent_vectors(a, bound) {
        let deg: u32 = alpha.iter().sum();
        let mut acc = match nslices.get(&alpha) {
            Some(n) => n * &qpow(k as u64 * deg as u64),
            None => IntPoly::zero(cvars),
        };
        for (beta, db, bdeg) in &higher {
            if beta.iter().zip(&alpha).any(|(b, x)| b > x) {
                continue;
            }
            let rest: Exponents = alpha.iter().zip(beta.iter()).map(|(x, b)| x - b).collect();
            if let Some(prev) = pcoef.get(&rest) {
                let term = &(*db * &qpow(k as u64 * (*bdeg as u64 - 1))) * prev;
                acc = &acc - &term;
            }
        }
        if !positive {
            acc = -acc;
        }
        if !acc.is_zero() {
            let shift = -(k as i64) * (deg as i64 + 1);
            coeffs.insert(alpha.clone(), QLaurent::new(shift, acc.clone()));
            pcoef.insert(alpha, acc);
        }
    }
    Ok(PowerSeries { sig, bound, coeffs })
}

impl PowerSeries {
    pub fn zero(sig: Signature, bound: u32) -> Self {
        PowerSeries {
            sig,
            bound,
            coeffs: BTreeMap::new(),
        }
    }

    /// Truncation of a polynomial over the full signature.
    pub fn from_poly(sig: Signature, p: &IntPoly, bound: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        for (te, c) in slice_by_t(p, &sig) {
            if te.iter().sum::<u32>() <= bound && !c.is_zero() {
                coeffs.insert(te, QLaurent::new(0, c));
            }
        }
        PowerSeries { sig, bound, coeffs }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponents, QLaurent> {
        &self.coeffs
    }

    /// Coefficient of `t^te`, zero when absent.
    pub fn coeff(&self, te: &[u32]) -> QLaurent {
        self.coeffs.get(te).cloned().unwrap_or_else(|| QLaurent {
            shift: 0,
            poly: IntPoly::zero(self.sig.nvars() - self.sig.arity()),
        })
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let bound = self.bound.min(other.bound);
        let mut coeffs = BTreeMap::new();
        for te in self.coeffs.keys().chain(other.coeffs.keys()) {
            if te.iter().sum::<u32>() > bound || coeffs.contains_key(te) {
                continue;
            }
            let c = self.coeff(te).add(&other.coeff(te));
            if !c.is_zero() {
                coeffs.insert(te.clone(), c);
            }
        }
        PowerSeries {
            sig: self.sig.clone(),
            bound,
            coeffs,
        }
    }

    /// Truncated product (convolution).
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let bound = self.bound.min(other.bound);
        let mut coeffs: BTreeMap<Exponents, QLaurent> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if e.iter().sum::<u32>() > bound {
                    continue;
                }
                let prod = ca.mul(cb);
                let slot = coeffs.entry(e).or_insert_with(|| QLaurent {
                    shift: 0,
                    poly: IntPoly::zero(prod.poly.nvars()),
                });
                *slot = slot.add(&prod);
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        PowerSeries {
            sig: self.sig.clone(),
            bound,
            coeffs,
        }
    }

    /// Multiplies by `q^qe t^te` (dropping what exceeds the bound).
    pub fn shift(&self, qe: u32, te: &[u32]) -> PowerSeries {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let e2: Exponents = e.iter().zip(te).map(|(x, y)| x + y).collect();
            if e2.iter().sum::<u32>() <= self.bound {
                coeffs.insert(
                    e2,
                    QLaurent::new(c.shift + qe as i64, c.poly.clone()),
                );
            }
        }
        PowerSeries {
            sig: self.sig.clone(),
            bound: self.bound,
            coeffs,
        }
    }

    pub fn truncate(&self, bound: u32) -> PowerSeries {
        PowerSeries {
            sig: self.sig.clone(),
            bound: bound.min(self.bound),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= bound)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates every coefficient at `q` and the given symbol values.
    pub fn evaluate(&self, q: u64, symbols: &[BigInt]) -> Result<BTreeMap<Exponents, BigInt>> {
        if symbols.len() != self.sig.symbols().len() {
            return invalid("wrong number of symbol values");
        }
        let q = BigInt::from(q);
        let mut out = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let v = c.evaluate(&q, symbols)?;
            if !v.is_zero() {
                out.insert(e.clone(), v);
            }
        }
        Ok(out)
    }

    /// Univariate coefficients `0..=bound` at integer `q`.
    pub fn univariate_at(&self, q: u64, symbols: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.sig.arity() != 1 {
            return invalid("series is not univariate");
        }
        let vals = self.evaluate(q, symbols)?;
        Ok((0..=self.bound)
            .map(|d| vals.get(&vec![d]).cloned().unwrap_or_default())
            .collect())
    }
}
