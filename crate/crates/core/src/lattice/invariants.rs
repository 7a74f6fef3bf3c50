//! Elementary-divisor data of lattices and the invariants `m~_1`, `m_2` of lattice tuples.

use super::count::is_subrep_matrices;
use super::local::{ipow, LatticeTuple, LocalLattice};
use crate::error::{invalid, Error, Result};
use crate::linalg::{valuation, IntMatrix};
use crate::quiver::grading::{check_homogeneity, Grading};
use crate::quiver::Representation;
use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

/// Elementary divisor type of a lattice: exponents `e_1 >= ... >= e_n` encoded by the descent set
/// `I = {i : e_i > e_{i+1}}`, the jumps `r_i = e_i - e_{i+1}` for `i in I`, and `r_n = e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuInvariant {
    pub n: usize,
    /// 1-based descent positions.
    pub descents: Vec<usize>,
    pub jumps: Vec<u32>,
    pub trailing: u32,
}

impl NuInvariant {
    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        let n = exps.len();
        let mut descents = Vec::new();
        let mut jumps = Vec::new();
        for i in 0..n.saturating_sub(1) {
            if exps[i] > exps[i + 1] {
                descents.push(i + 1);
                jumps.push(exps[i] - exps[i + 1]);
            }
        }
        NuInvariant {
            n,
            descents,
            jumps,
            trailing: exps.last().copied().unwrap_or(0),
        }
    }

    /// Diagonal exponents of `D` rebuilt from the encoding, largest first.
    pub fn exponents(&self) -> Vec<u32> {
        (1..=self.n)
            .map(|i| {
                self.trailing
                    + self
                        .descents
                        .iter()
                        .zip(&self.jumps)
                        .filter(|(&d, _)| d >= i)
                        .map(|(_, &r)| r)
                        .sum::<u32>()
            })
            .collect()
    }

    /// `sum_{i in I*} i r_i`, the index exponent.
    pub fn index_exponent(&self) -> u32 {
        self.descents
            .iter()
            .zip(&self.jumps)
            .map(|(&i, &r)| i as u32 * r)
            .sum::<u32>()
            + self.n as u32 * self.trailing
    }

    /// `tau = sum_{i in I*} r_i`, the largest elementary exponent.
    pub fn tau(&self) -> u32 {
        self.jumps.iter().sum::<u32>() + self.trailing
    }
}

/// Elementary divisor exponents of a nonsingular matrix, largest first.
pub fn elementary_exponents(m: &IntMatrix, p: u64) -> Vec<u32> {
    let mut e: Vec<u32> = m
        .diagonalize()
        .diag
        .iter()
        .map(|d| valuation(d, p).expect("nonsingular"))
        .collect();
    e.sort_unstable_by(|a, b| b.cmp(a));
    e
}

pub fn nu_invariant(lattice: &LocalLattice) -> NuInvariant {
    NuInvariant::from_exponents(elementary_exponents(&lattice.to_matrix(), lattice.p()))
}

/// A tuple is maximal in its homothety class iff some vertex has valuation 0.
pub fn is_maximal(tuple: &LatticeTuple) -> bool {
    tuple
        .lattices()
        .iter()
        .filter(|l| l.dim() > 0)
        .any(|l| nu_invariant(l).trailing == 0)
}

/// A homogeneous representation with a cocentral grading, in graded coordinates.
///
/// Lattice matrices `M_v` (rows in standard coordinates) become `M_v B_v^{-1}`, arrow matrices
/// become `B_t F B_h^{-1}`, and `delta_v` scales layer `j` by `p^{c-j}`.
pub struct GradedRep<'a> {
    rep: &'a Representation,
    grading: Grading,
    bases: Vec<IntMatrix>,
    inverses: Vec<IntMatrix>,
    graded_maps: Vec<IntMatrix>,
    /// `delta_pow[v][i] = c - layer` of coordinate `i` at vertex `v`.
    delta_pow: Vec<Vec<u32>>,
}

impl<'a> GradedRep<'a> {
    /// Fails with `NotHomogeneous` unless the arrow maps are homogeneous for the grading.
    pub fn new(rep: &'a Representation, grading: &Grading) -> Result<Self> {
        let report = check_homogeneity(rep, grading, &rep.arrow_extensions())?;
        if let Some(w) = report.witness {
            return Err(Error::NotHomogeneous {
                k: w.k,
                tail: w.tail,
                head: w.head,
                from: w.from,
                to: w.to,
            });
        }
        let bases = grading.bases.clone();
        let inverses: Vec<IntMatrix> = bases
            .iter()
            .map(|b| b.inverse_unimodular().expect("unimodular basis"))
            .collect();
        let graded_maps = rep
            .quiver
            .arrows
            .iter()
            .zip(&rep.maps)
            .map(|(a, f)| bases[a.tail].mul(f).mul(&inverses[a.head]))
            .collect();
        let c = grading.class as u32;
        let delta_pow = grading
            .layers
            .iter()
            .map(|ls| {
                ls.iter()
                    .enumerate()
                    .flat_map(|(j, &r)| std::iter::repeat_n(c - 1 - j as u32, r))
                    .collect()
            })
            .collect();
        Ok(GradedRep {
            rep,
            grading: grading.clone(),
            bases,
            inverses,
            graded_maps,
            delta_pow,
        })
    }

    pub fn class(&self) -> usize {
        self.grading.class
    }

    fn check_tuple(&self, tuple: &LatticeTuple) -> Result<u64> {
        if tuple.len() != self.rep.num_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} lattices for {} vertices",
                tuple.len(),
                self.rep.num_vertices()
            )));
        }
        for (v, l) in tuple.lattices().iter().enumerate() {
            if l.dim() != self.rep.ranks[v] {
                return Err(Error::DimensionMismatch(format!(
                    "lattice at vertex `{}` has dimension {}, rank is {}",
                    self.rep.quiver.vertices[v],
                    l.dim(),
                    self.rep.ranks[v]
                )));
            }
        }
        Ok(tuple.p().unwrap_or(2))
    }

    /// `M_v B_v^{-1}` for every vertex.
    pub fn graded_matrices(&self, tuple: &LatticeTuple) -> Vec<IntMatrix> {
        tuple
            .matrices()
            .iter()
            .zip(&self.inverses)
            .map(|(m, binv)| m.mul(binv))
            .collect()
    }

    fn delta(&self, v: usize, p: u64, m: u32) -> IntMatrix {
        let diag: Vec<BigInt> = self.delta_pow[v]
            .iter()
            .map(|&k| BigInt::from(p).pow(k * m))
            .collect();
        IntMatrix::diagonal(&diag)
    }

    /// `M delta^m` in graded coordinates.
    pub fn delta_shift(&self, graded: &[IntMatrix], p: u64, m: u32) -> Vec<IntMatrix> {
        graded
            .iter()
            .enumerate()
            .map(|(v, g)| g.mul(&self.delta(v, p, m)))
            .collect()
    }

    /// Whether `T delta^m` is a subrepresentation, tested in standard coordinates.
    pub fn shifted_is_subrep(&self, tuple: &LatticeTuple, m: u32) -> Result<bool> {
        let p = self.check_tuple(tuple)?;
        let graded = self.graded_matrices(tuple);
        let standard: Vec<IntMatrix> = self
            .delta_shift(&graded, p, m)
            .iter()
            .zip(&self.bases)
            .map(|(g, b)| g.mul(b))
            .collect();
        is_subrep_matrices(self.rep, &standard, p)
    }

    /// `tau(M) = sum_v tau(v)`.
    pub fn tau(&self, tuple: &LatticeTuple) -> u32 {
        tuple.lattices().iter().map(|l| nu_invariant(l).tau()).sum()
    }

    /// Least `m >= 0` with `T delta^m` a subrepresentation, found by trying `m = 0, 1, ...`.
    pub fn m_tilde_1_search(&self, tuple: &LatticeTuple) -> Result<u32> {
        let bound = self.tau(tuple);
        for m in 0..=bound {
            if self.shifted_is_subrep(tuple, m)? {
                return Ok(m);
            }
        }
        invalid(format!("no shift up to tau = {bound} yields a subrepresentation"))
    }

    /// `m~_1 = tau(M) - m_1(M)` with `m_1` the minimum over vertex pairs `(t, h)` of
    /// `tau'(h) + m^{(th)}`, read off from `M_h = D_h alpha_h^{-1}`.
    pub fn m_tilde_1_formula(&self, tuple: &LatticeTuple) -> Result<u32> {
        let p = self.check_tuple(tuple)?;
        let graded = self.graded_matrices(tuple);
        let nv = graded.len();
        // per vertex: exponents e_1 >= ... >= e_n and alpha, alpha^{-1}
        let mut exps = Vec::with_capacity(nv);
        let mut alpha = Vec::with_capacity(nv);
        let mut alpha_inv = Vec::with_capacity(nv);
        for g in &graded {
            let (e, a, ainv) = smith_split(g, p);
            exps.push(e);
            alpha.push(a);
            alpha_inv.push(ainv);
        }
        let tau_v: Vec<i64> = exps.iter().map(|e| e.first().copied().unwrap_or(0) as i64).collect();
        let tau: i64 = tau_v.iter().sum();
        let mut m1 = i64::MAX;
        for t in 0..nv {
            for h in 0..nv {
                let mut m_th = tau_v[h];
                for (k, a) in self.rep.quiver.arrows.iter().enumerate() {
                    if a.tail != t || a.head != h {
                        continue;
                    }
                    // R_(i) columns: alpha_t^{-1} C alpha_h, one column per i
                    let q = alpha_inv[t].mul(&self.graded_maps[k]).mul(&alpha[h]);
                    for rho in 0..q.rows() {
                        for i in 0..q.cols() {
                            if let Some(v) = valuation(q.get(rho, i), p) {
                                let term = exps[t][rho] as i64 + tau_v[h] - exps[h][i] as i64 + v as i64;
                                m_th = m_th.min(term);
                            }
                        }
                    }
                }
                m1 = m1.min(tau - tau_v[h] + m_th);
            }
        }
        if nv == 0 {
            return Ok(0);
        }
        Ok((tau - m1) as u32)
    }

    /// `min_v v(M_{v,c})`, the last-layer columns in graded coordinates.
    pub fn m_2(&self, tuple: &LatticeTuple) -> Result<u32> {
        let p = self.check_tuple(tuple)?;
        if !is_maximal(tuple) {
            return Err(Error::NotMaximal);
        }
        let c = self.grading.class;
        let graded = self.graded_matrices(tuple);
        graded
            .iter()
            .enumerate()
            .filter_map(|(v, g)| {
                let n = g.rows();
                let last = self.grading.layers[v].get(c.wrapping_sub(1)).copied().unwrap_or(0);
                (last > 0).then(|| g.submatrix(0..n, n - last..n).min_valuation(p))
            })
            .flatten()
            .min()
            .ok_or_else(|| Error::InvalidInput("no last-layer coordinates".into()))
    }

    /// `m_2` via `min over i of e_i + min_{iota >= i} v((alpha^{adj})_{iota, sigma})` over the
    /// last-layer columns `sigma`.
    pub fn m_2_formula(&self, tuple: &LatticeTuple) -> Result<u32> {
        let p = self.check_tuple(tuple)?;
        if !is_maximal(tuple) {
            return Err(Error::NotMaximal);
        }
        let c = self.grading.class;
        let mut best = None::<u32>;
        for (v, g) in self.graded_matrices(tuple).iter().enumerate() {
            let n = g.rows();
            let last = self.grading.layers[v].get(c.wrapping_sub(1)).copied().unwrap_or(0);
            if last == 0 {
                continue;
            }
            let (e, _, ainv) = smith_split(g, p);
            let mut m_v = e[0];
            for i in 0..n {
                let v2 = (i..n)
                    .flat_map(|iota| (n - last..n).map(move |s| (iota, s)))
                    .filter_map(|(iota, s)| valuation(ainv.get(iota, s), p))
                    .min();
                if let Some(v2) = v2 {
                    m_v = m_v.min(e[i] + v2);
                }
            }
            best = Some(best.map_or(m_v, |b| b.min(m_v)));
        }
        best.ok_or_else(|| Error::InvalidInput("no last-layer coordinates".into()))
    }

    /// `(v(M), v(M delta))` over all entries in graded coordinates.
    pub fn valuation_pair(&self, tuple: &LatticeTuple) -> Result<(u32, u32)> {
        let p = self.check_tuple(tuple)?;
        let graded = self.graded_matrices(tuple);
        let shifted = self.delta_shift(&graded, p, 1);
        let v = |ms: &[IntMatrix]| ms.iter().filter_map(|m| m.min_valuation(p)).min().unwrap_or(0);
        Ok((v(&graded), v(&shifted)))
    }

    /// Subrepresentation flags of `T delta^m` for `m = 0..=upto`.
    pub fn delta_ray(&self, tuple: &LatticeTuple, upto: u32) -> Result<Vec<bool>> {
        (0..=upto).map(|m| self.shifted_is_subrep(tuple, m)).collect()
    }
}

/// Writes `g = U^{-1} D V^{-1}` and reorders so that `g ~ D_desc alpha^{-1}` with exponents
/// descending; returns `(exponents, alpha, alpha^{-1})`.
fn smith_split(g: &IntMatrix, p: u64) -> (Vec<u32>, IntMatrix, IntMatrix) {
    let d = g.diagonalize();
    let n = g.rows();
    let vals: Vec<u32> = d.diag.iter().map(|x| valuation(x, p).expect("nonsingular")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
    let exps = order.iter().map(|&i| vals[i]).collect();
    // alpha^{-1} = P V^{-1}: rows of V^{-1} in the new order; alpha = V P^T
    let alpha_inv = d.vinv.select_rows(&order);
    let alpha = d.v.transpose().select_rows(&order).transpose();
    (exps, alpha, alpha_inv)
}

pub fn m_tilde_1(rep: &Representation, grading: &Grading, tuple: &LatticeTuple) -> Result<(u32, u32)> {
    let g = GradedRep::new(rep, grading)?;
    Ok((g.m_tilde_1_search(tuple)?, g.m_tilde_1_formula(tuple)?))
}

pub fn m_2(rep: &Representation, grading: &Grading, tuple: &LatticeTuple) -> Result<u32> {
    GradedRep::new(rep, grading)?.m_2(tuple)
}

/// A lattice with uniformly random diagonal exponents summing to at most `max_exp` and uniformly
/// random entries above the diagonal.
pub fn random_lattice<R: Rng>(rng: &mut R, n: usize, p: u64, max_exp: u32) -> LocalLattice {
    if n == 0 {
        return LocalLattice::full(0, p);
    }
    let total = rng.gen_range(0..=max_exp);
    let mut exps = vec![0u32; n];
    for _ in 0..total {
        exps[rng.gen_range(0..n)] += 1;
    }
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => ipow(p, exps[i]),
                    std::cmp::Ordering::Greater => rng.gen_range(0..ipow(p, exps[j])),
                })
                .collect()
        })
        .collect();
    LocalLattice::from_hnf(p, &rows).expect("valid normal form")
}

pub fn random_tuple<R: Rng>(rng: &mut R, ranks: &[usize], p: u64, max_exp: u32) -> LatticeTuple {
    LatticeTuple::new(ranks.iter().map(|&n| random_lattice(rng, n, p, max_exp)).collect())
        .expect("same prime")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::builtins::{graded_heisenberg, heisenberg};
    use crate::quiver::cocentral_grading;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lat(p: u64, rows: &[&[i64]]) -> LocalLattice {
        LocalLattice::from_hnf(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn nu_examples() {
        let id = nu_invariant(&LocalLattice::full(3, 2));
        assert!(id.descents.is_empty());
        assert_eq!(id.trailing, 0);
        let a = nu_invariant(&lat(2, &[&[4, 0, 0], &[0, 2, 0], &[0, 0, 1]]));
        assert_eq!((a.descents.clone(), a.jumps.clone(), a.trailing), (vec![1, 2], vec![1, 1], 0));
        let b = nu_invariant(&lat(2, &[&[4, 0], &[0, 2]]));
        assert_eq!((b.descents.clone(), b.jumps.clone(), b.trailing), (vec![1], vec![1], 1));
        assert_eq!(b.exponents(), vec![2, 1]);
        assert_eq!(b.index_exponent(), 3);
    }

    #[test]
    fn graded_heisenberg_shift() {
        let rep = graded_heisenberg();
        let g = cocentral_grading(&rep).unwrap();
        let t = LatticeTuple::new(vec![LocalLattice::full(2, 2), lat(2, &[&[2]])]).unwrap();
        assert_eq!(m_tilde_1(&rep, &g, &t).unwrap(), (1, 1));
        let full = LatticeTuple::full(&[2, 1], 2);
        assert_eq!(m_tilde_1(&rep, &g, &full).unwrap(), (0, 0));
    }

    #[test]
    fn m2_examples() {
        let rep = heisenberg();
        let g = cocentral_grading(&rep).unwrap();
        let four = LatticeTuple::new(vec![lat(2, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 4]])]).unwrap();
        assert_eq!(m_2(&rep, &g, &four).unwrap(), 2);
        assert_eq!(m_2(&rep, &g, &LatticeTuple::full(&[3], 2)).unwrap(), 0);
        let two = LatticeTuple::new(vec![lat(2, &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]])]).unwrap();
        assert!(matches!(m_2(&rep, &g, &two), Err(Error::NotMaximal)));
    }

    #[test]
    fn random_tuples_agree() {
        let rep = heisenberg();
        let g = GradedRep::new(&rep, &cocentral_grading(&rep).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = random_tuple(&mut rng, &rep.ranks, 3, 6);
            let s = g.m_tilde_1_search(&t).unwrap();
            assert_eq!(s, g.m_tilde_1_formula(&t).unwrap());
            assert!(s <= g.tau(&t));
            if is_maximal(&t) {
                assert_eq!(g.m_2(&t).unwrap(), g.m_2_formula(&t).unwrap());
            }
        }
    }

    #[test]
    fn inhomogeneous_rejected() {
        let rep = crate::quiver::builtins::fil4();
        let g = cocentral_grading(&rep).unwrap();
        assert!(matches!(GradedRep::new(&rep, &g), Err(Error::NotHomogeneous { .. })));
    }
}
