//! Sublattices of `Z_p^n` of finite index, in Hermite normal form.

use crate::error::{invalid, Result};
use crate::linalg::{valuation, IntMatrix};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Row-span lattice with upper-triangular Hermite basis: row `i` has `p^{a_i}` on the diagonal
/// and entries `(i, j)`, `j > i`, reduced into `[0, p^{a_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalLattice {
    p: u64,
    exps: Vec<u32>,
    /// Row-major `n x n`, diagonal included.
    entries: Vec<i64>,
}

pub(crate) fn ipow(p: u64, e: u32) -> i64 {
    i64::try_from(p.checked_pow(e).expect("prime power overflows u64"))
        .expect("prime power overflows i64")
}

impl LocalLattice {
    pub fn full(n: usize, p: u64) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        LocalLattice {
            p,
            exps: vec![0; n],
            entries,
        }
    }

    /// Builds a lattice from its Hermite data, checking the normal-form conditions.
    pub fn from_hnf(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("Hermite matrix must be square");
        }
        let mut exps = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let d = row[i];
            let Some(a) = (d > 0).then(|| valuation(&BigInt::from(d), p)).flatten() else {
                return invalid(format!("diagonal entry {d} is not a power of {p}"));
            };
            if ipow(p, a) != d {
                return invalid(format!("diagonal entry {d} is not a power of {p}"));
            }
            exps.push(a);
        }
        for i in 0..n {
            for j in 0..n {
                let x = rows[i][j];
                let ok = match j.cmp(&i) {
                    std::cmp::Ordering::Less => x == 0,
                    std::cmp::Ordering::Equal => true,
                    std::cmp::Ordering::Greater => (0..ipow(p, exps[j])).contains(&x),
                };
                if !ok {
                    return invalid(format!("entry ({i},{j}) = {x} violates the normal form"));
                }
            }
        }
        Ok(LocalLattice {
            p,
            exps,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// The `p`-local lattice spanned by the rows of a nonsingular integer matrix.
    pub fn from_matrix(m: &IntMatrix, p: u64) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return invalid("lattice matrix must be square");
        }
        let det = m.determinant();
        let Some(k) = valuation(&det, p) else {
            return invalid("lattice matrix is singular");
        };
        // M Z^n + p^k Z^n has p-power index and the same localization at p
        let pk = BigInt::from(p).pow(k);
        let stacked = m.vconcat(&IntMatrix::identity(n).scale(&pk));
        let (h, _, rank) = stacked.hnf();
        debug_assert_eq!(rank, n);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| h.row(i).iter().map(|x| x.to_i64().expect("entry fits in i64")).collect())
            .collect();
        LocalLattice::from_hnf(p, &rows)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    /// Diagonal exponents `a_1, ..., a_n`.
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// `e` with index `p^e`.
    pub fn index_exponent(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim() + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let n = self.dim();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let n = self.dim();
        IntMatrix::from_i64(n, n, &self.entries)
    }

    /// Whether `x` lies in the lattice, given `modulus = p^E` with `E` at least the index
    /// exponent. `x` is used as scratch space.
    pub fn contains_mod(&self, x: &mut [i64], modulus: i64) -> bool {
        let n = self.dim();
        let m = modulus as i128;
        for v in x.iter_mut() {
            *v = v.rem_euclid(modulus);
        }
        for j in 0..n {
            let d = self.entries[j * n + j];
            if x[j] % d != 0 {
                return false;
            }
            let c = (x[j] / d) as i128;
            if c == 0 {
                continue;
            }
            let row = &self.entries[j * n..(j + 1) * n];
            for k in j + 1..n {
                x[k] = (x[k] as i128 - c * row[k] as i128).rem_euclid(m) as i64;
            }
        }
        true
    }

    /// Whether `x` lies in the lattice (exact, no modulus needed).
    pub fn contains(&self, x: &[BigInt]) -> bool {
        let n = self.dim();
        let mut x = x.to_vec();
        for j in 0..n {
            let d = BigInt::from(self.entries[j * n + j]);
            if !(&x[j] % &d).is_zero() {
                return false;
            }
            let c = &x[j] / &d;
            for k in j..n {
                x[k] -= &c * self.entries[j * n + k];
            }
        }
        true
    }
}

/// Compositions of `e` into `n` non-negative parts, lexicographically decreasing.
fn next_composition(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    // find the rightmost non-zero part before the last one, move one unit right
    let Some(i) = (0..n - 1).rev().find(|&i| a[i] > 0) else {
        return false;
    };
    a[i] -= 1;
    let tail: u32 = a[i + 1..].iter().sum::<u32>() + 1;
    for x in &mut a[i + 1..] {
        *x = 0;
    }
    a[i + 1] = tail;
    true
}

/// Every sublattice of `Z_p^n` of index `p^e`, each once, in a fixed order: diagonal exponents
/// run through compositions of `e`, and for each the entries above the diagonal run through
/// their residues as an odometer.
pub struct Sublattices {
    p: u64,
    n: usize,
    exps: Vec<u32>,
    moduli: Vec<i64>,
    entries: Vec<i64>,
    started: bool,
    done: bool,
}

pub fn enum_sublattices(n: usize, p: u64, e: u32) -> Sublattices {
    let mut exps = vec![0; n];
    let done = if n == 0 {
        e != 0
    } else {
        exps[0] = e;
        false
    };
    let mut it = Sublattices {
        p,
        n,
        exps,
        moduli: vec![],
        entries: vec![0; n * n],
        started: false,
        done,
    };
    it.reset_entries();
    it
}

impl Sublattices {
    fn reset_entries(&mut self) {
        let n = self.n;
        self.moduli = self.exps.iter().map(|&a| ipow(self.p, a)).collect();
        self.entries.iter_mut().for_each(|x| *x = 0);
        for i in 0..n {
            self.entries[i * n + i] = self.moduli[i];
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.n;
        // odometer over (i, j), j > i, last position fastest
        for i in (0..n).rev() {
            for j in (i + 1..n).rev() {
                let x = &mut self.entries[i * n + j];
                *x += 1;
                if *x < self.moduli[j] {
                    return true;
                }
                *x = 0;
            }
        }
        if next_composition(&mut self.exps) {
            self.reset_entries();
            true
        } else {
            false
        }
    }
}

impl Iterator for Sublattices {
    type Item = LocalLattice;

    fn next(&mut self) -> Option<LocalLattice> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(LocalLattice {
            p: self.p,
            exps: self.exps.clone(),
            entries: self.entries.clone(),
        })
    }
}

/// Sublattices of index `p^e` for `e = 0..=max_exp`, in order of `e`.
pub fn enum_sublattices_upto(n: usize, p: u64, max_exp: u32) -> impl Iterator<Item = LocalLattice> {
    (0..=max_exp).flat_map(move |e| enum_sublattices(n, p, e))
}

/// Number of index-`p^e` sublattices of `Z_p^n` for `e = 0..=max_exp`: the coefficients of
/// `prod_{i<n} 1/(1 - p^i t)`.
pub fn sublattice_counts(n: usize, p: u64, max_exp: u32) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    let len = max_exp as usize + 1;
    let mut coeffs = vec![BigUint::zero(); len];
    coeffs[0] = BigUint::one();
    for i in 0..n {
        let q = BigUint::from(p).pow(i as u32);
        for e in 1..len {
            let prev = coeffs[e - 1].clone();
            coeffs[e] += &q * prev;
        }
    }
    coeffs
}

/// One lattice per vertex, all for the same prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeTuple {
    lattices: Vec<LocalLattice>,
}

impl LatticeTuple {
    pub fn new(lattices: Vec<LocalLattice>) -> Result<Self> {
        if let Some(first) = lattices.first() {
            if lattices.iter().any(|l| l.p() != first.p()) {
                return invalid("lattices of a tuple must share the prime");
            }
        }
        Ok(LatticeTuple { lattices })
    }

    pub fn full(ranks: &[usize], p: u64) -> Self {
        LatticeTuple {
            lattices: ranks.iter().map(|&n| LocalLattice::full(n, p)).collect(),
        }
    }

    pub fn lattices(&self) -> &[LocalLattice] {
        &self.lattices
    }

    pub fn get(&self, v: usize) -> &LocalLattice {
        &self.lattices[v]
    }

    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn p(&self) -> Option<u64> {
        self.lattices.first().map(LocalLattice::p)
    }

    pub fn index_exponents(&self) -> Vec<u32> {
        self.lattices.iter().map(LocalLattice::index_exponent).collect()
    }

    pub fn matrices(&self) -> Vec<IntMatrix> {
        self.lattices.iter().map(LocalLattice::to_matrix).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let one: Vec<_> = enum_sublattices(1, 2, 3).collect();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].entry(0, 0), 8);
        let two: Vec<_> = enum_sublattices(2, 2, 1).collect();
        assert_eq!(two.len(), 3);
        assert_eq!(enum_sublattices(3, 2, 2).count(), 35);
        assert_eq!(enum_sublattices(0, 2, 0).count(), 1);
        assert_eq!(enum_sublattices(0, 2, 1).count(), 0);
    }

    #[test]
    fn counts_match_generating_function() {
        for n in 0..=3 {
            for p in [2, 3] {
                let expected = sublattice_counts(n, p, 4);
                for e in 0..=4u32 {
                    let got = enum_sublattices(n, p, e).count();
                    assert_eq!(num_bigint::BigUint::from(got), expected[e as usize], "n={n} p={p} e={e}");
                }
            }
        }
    }

    #[test]
    fn enumeration_is_duplicate_free_and_normalized() {
        let all: Vec<_> = enum_sublattices(3, 3, 2).collect();
        let set: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for l in &all {
            assert_eq!(&LocalLattice::from_matrix(&l.to_matrix(), 3).unwrap(), l);
        }
    }

    #[test]
    fn membership_agrees() {
        let l = LocalLattice::from_hnf(2, &[vec![2, 1], vec![0, 4]]).unwrap();
        for a in -5i64..5 {
            for b in -9i64..9 {
                let exact = l.contains(&[a.into(), b.into()]);
                let mut x = [a, b];
                assert_eq!(l.contains_mod(&mut x, 16), exact, "({a},{b})");
            }
        }
        assert!(l.contains(&[2.into(), 1.into()]));
        assert!(!l.contains(&[1.into(), 0.into()]));
    }

    #[test]
    fn local_normal_form_ignores_other_primes() {
        let m = IntMatrix::from_i64(2, 2, &[3, 0, 0, 2]);
        let l = LocalLattice::from_matrix(&m, 2).unwrap();
        assert_eq!(l.exponents(), &[0, 1]);
        assert!(LocalLattice::from_hnf(2, &[vec![3]]).is_err());
        assert!(LocalLattice::from_hnf(2, &[vec![2, 2], vec![0, 2]]).is_err());
    }
}
