//! Dense integer matrices and the lattice algorithms built on them: Hermite normal form,
//! diagonalization with both transforms, kernels, saturation and adjugates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMatrix {
            rows: r,
            cols,
            data,
        }
    }

    /// Row-major construction from machine integers.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        IntMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zero(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| x * self.get(i, j))
                    .sum()
            })
            .collect()
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zero(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        IntMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    pub fn vconcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hconcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Places `block` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        assert!(self.is_square());
        (0..k).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_zero()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= k * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] -= v;
        }
    }

    /// col[dst] -= k * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] -= v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }

    /// Row-style Hermite normal form `H = U A` with `U` unimodular; returns `(H, U, rank)`.
    ///
    /// The first `rank` rows of `H` are in echelon form with positive pivots and entries above
    /// each pivot reduced into `[0, pivot)`; the remaining rows are zero.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix, usize) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            loop {
                let piv = (r..self.rows)
                    .filter(|&i| !h.get(i, c).is_zero())
                    .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
                let Some(piv) = piv else { break };
                h.swap_rows(r, piv);
                u.swap_rows(r, piv);
                let mut clean = true;
                for i in r + 1..self.rows {
                    if h.get(i, c).is_zero() {
                        continue;
                    }
                    let q = h.get(i, c).div_floor(h.get(r, c));
                    h.row_axpy(i, r, &q);
                    u.row_axpy(i, r, &q);
                    if !h.get(i, c).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if h.get(r, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            for i in 0..r {
                let q = h.get(i, c).div_floor(h.get(r, c));
                h.row_axpy(i, r, &q);
                u.row_axpy(i, r, &q);
            }
            r += 1;
        }
        (h, u, r)
    }

    pub fn rank(&self) -> usize {
        self.hnf().2
    }

    /// Hermite basis of the row lattice.
    pub fn row_basis(&self) -> IntMatrix {
        let (h, _, r) = self.hnf();
        h.submatrix(0..r, 0..self.cols)
    }

    /// Basis (as rows) of `{x : x A = 0}`; always a pure sublattice.
    pub fn left_kernel(&self) -> IntMatrix {
        let (_, u, r) = self.hnf();
        u.submatrix(r..self.rows, 0..self.rows)
    }

    /// Basis (as rows) of `{x : A x^T = 0}`.
    pub fn right_kernel(&self) -> IntMatrix {
        self.transpose().left_kernel()
    }

    /// Basis of the pure closure of the row lattice (rational span intersected with `Z^n`).
    pub fn saturate(&self) -> IntMatrix {
        let k = self.right_kernel();
        if k.rows == 0 {
            return IntMatrix::identity(self.cols);
        }
        k.transpose().left_kernel().row_basis()
    }

    /// True if the row lattice is pure (equal to its saturation).
    pub fn is_pure(&self) -> bool {
        let d = self.diagonalize();
        d.diag.iter().all(|x| x.is_zero() || x.abs().is_one())
    }

    /// Diagonalizes `U A V = D` with unimodular `U`, `V`; also returns `V^{-1}`.
    ///
    /// Pivots are chosen as the first entry of least absolute value in row-major order of the
    /// remaining block. The diagonal is made nonnegative; no divisibility chain is enforced.
    pub fn diagonalize(&self) -> Diagonal {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        let mut vinv = IntMatrix::identity(n);
        let k = m.min(n);
        for t in 0..k {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            vinv.swap_rows(t, pj);
            loop {
                for i in t + 1..m {
                    let q = a.get(i, t).div_floor(a.get(t, t));
                    a.row_axpy(i, t, &q);
                    u.row_axpy(i, t, &q);
                }
                for j in t + 1..n {
                    let q = a.get(t, j).div_floor(a.get(t, t));
                    a.col_axpy(j, t, &q);
                    v.col_axpy(j, t, &q);
                    // V <- V E with E = I - q e_t e_j^T, so V^{-1} <- (I + q e_t e_j^T) V^{-1}
                    vinv.row_axpy(t, j, &(-&q));
                }
                let row_left = (t + 1..n)
                    .filter(|&j| !a.get(t, j).is_zero())
                    .min_by(|&x, &y| a.get(t, x).abs().cmp(&a.get(t, y).abs()));
                let col_left = (t + 1..m)
                    .filter(|&i| !a.get(i, t).is_zero())
                    .min_by(|&x, &y| a.get(x, t).abs().cmp(&a.get(y, t).abs()));
                match (row_left, col_left) {
                    (None, None) => break,
                    (Some(j), _) => {
                        a.swap_cols(t, j);
                        v.swap_cols(t, j);
                        vinv.swap_rows(t, j);
                    }
                    (None, Some(i)) => {
                        a.swap_rows(t, i);
                        u.swap_rows(t, i);
                    }
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        let diag = (0..k).map(|i| a.get(i, i).clone()).collect();
        Diagonal { diag, u, v, vinv }
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    /// Adjugate: `A adj(A) = adj(A) A = det(A) I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut adj = IntMatrix::zero(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let keep_r: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let keep_c: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = IntMatrix::from_rows(
                    keep_r
                        .iter()
                        .map(|&r| keep_c.iter().map(|&c| self.get(r, c).clone()).collect())
                        .collect(),
                    n - 1,
                );
                let d = minor.determinant();
                let d = if (i + j) % 2 == 1 { -d } else { d };
                adj.set(j, i, d);
            }
        }
        adj
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let d = self.determinant();
        if !d.abs().is_one() {
            return None;
        }
        Some(self.adjugate().scale(&d))
    }

    /// Integer coordinates of `v` in the row lattice of `basis` (independent rows), if any.
    pub fn coordinates(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let (h, u, r) = basis.hnf();
        let mut rest = v.to_vec();
        let mut y = vec![BigInt::zero(); r];
        let mut row = 0;
        for c in 0..basis.cols {
            if row < r && !h.get(row, c).is_zero() {
                let (q, m) = rest[c].div_rem(h.get(row, c));
                if !m.is_zero() {
                    return None;
                }
                for (j, x) in rest.iter_mut().enumerate() {
                    *x -= &q * h.get(row, j);
                }
                y[row] = q;
                row += 1;
            } else if !rest[c].is_zero() {
                return None;
            }
        }
        // v = y H = y U_r A, with U_r the first r rows of U
        let ur = u.submatrix(0..r, 0..basis.rows);
        Some(ur.apply(&y))
    }

    /// Whether `v` lies in the row lattice.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        IntMatrix::coordinates(self, v).is_some()
    }

    /// Minimum p-adic valuation over all entries (`None` for the zero matrix).
    pub fn min_valuation(&self, p: u64) -> Option<u32> {
        self.data.iter().filter_map(|x| valuation(x, p)).min()
    }
}

/// Result of [`IntMatrix::diagonalize`].
#[derive(Clone, Debug)]
pub struct Diagonal {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub vinv: IntMatrix,
}

/// p-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        x = q;
        k += 1;
    }
}

/// Extends a basis of a pure sublattice `sub` of the pure lattice `sup` to a basis of `sup`,
/// returning only the added rows.
///
/// Rows of the Hermite basis of `sup` are tried greedily first, so that the result stays close to
/// the standard basis; if this gets stuck a complement is read off from a diagonalization.
pub fn complement(sub: &IntMatrix, sup: &IntMatrix) -> IntMatrix {
    let n = sup.cols;
    let target = sup.rank();
    let mut cur = sub.clone();
    let mut added: Vec<Vec<BigInt>> = Vec::new();
    let hb = sup.row_basis();
    for i in 0..hb.rows {
        if cur.rows == target {
            break;
        }
        let trial = cur.vconcat(&hb.select_rows(&[i]));
        if trial.rank() == trial.rows && trial.is_pure() {
            added.push(hb.row(i).to_vec());
            cur = trial;
        }
    }
    if cur.rows == target {
        return IntMatrix::from_rows(added, n);
    }
    // coordinates X of `sub` in the basis `hb`; pure means X has unit elementary divisors
    let x = IntMatrix::from_rows(
        (0..sub.rows)
            .map(|i| IntMatrix::coordinates(&hb, sub.row(i)).expect("sub lies in sup"))
            .collect(),
        hb.rows,
    );
    let d = x.diagonalize();
    let rest = d.vinv.submatrix(sub.rows..hb.rows, 0..hb.rows);
    rest.mul(&hb)
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e)
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = m(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]);
        let (h, u, r) = a.hnf();
        assert_eq!(u.mul(&a), h);
        assert_eq!(r, 3);
        assert!(u.determinant().abs().is_one());
        for i in 0..3 {
            for j in 0..i {
                assert!(h.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn diagonalize_reconstructs() {
        let a = m(3, 4, &[2, 4, 4, 1, -6, 6, 12, 0, 10, -4, -16, 3]);
        let d = a.diagonalize();
        let mut dm = IntMatrix::zero(3, 4);
        for (i, x) in d.diag.iter().enumerate() {
            dm.set(i, i, x.clone());
        }
        assert_eq!(d.u.mul(&a).mul(&d.v), dm);
        assert_eq!(d.v.mul(&d.vinv), IntMatrix::identity(4));
    }

    #[test]
    fn kernels_and_saturation() {
        let a = m(2, 3, &[2, 0, 0, 0, 2, 0]);
        assert_eq!(a.saturate(), m(2, 3, &[1, 0, 0, 0, 1, 0]));
        let k = a.right_kernel();
        assert_eq!(k, m(1, 3, &[0, 0, 1]));
        assert!(!a.is_pure());
        let b = m(3, 1, &[1, 1, 0]);
        assert_eq!(b.left_kernel().rows(), 2);
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = m(3, 3, &[4, 1, 3, 0, 2, 1, 0, 0, 1]);
        assert_eq!(a.determinant(), BigInt::from(8));
        let adj = a.adjugate();
        assert_eq!(a.mul(&adj), IntMatrix::identity(3).scale(&BigInt::from(8)));
        let s = m(3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]);
        assert_eq!(s.determinant(), BigInt::from(-1));
    }

    #[test]
    fn membership() {
        let l = m(2, 2, &[2, 1, 0, 3]);
        assert!(l.contains(&[BigInt::from(2), BigInt::from(4)]));
        assert!(!l.contains(&[BigInt::from(1), BigInt::from(0)]));
    }

    #[test]
    fn complement_fills_basis() {
        let sub = m(1, 3, &[1, 1, 1]);
        let sup = IntMatrix::identity(3);
        let c = complement(&sub, &sup);
        let full = sub.vconcat(&c);
        assert!(full.determinant().abs().is_one());
        let sub = m(1, 3, &[2, 3, 5]);
        let full = sub.vconcat(&complement(&sub, &sup));
        assert!(full.determinant().abs().is_one());
    }
}
