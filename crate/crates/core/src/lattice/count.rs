//! Subrepresentation tests and counts by index.

use super::local::{enum_sublattices, enum_sublattices_upto, ipow, sublattice_counts, LatticeTuple, LocalLattice};
use crate::error::{Error, Result};
use crate::linalg::{valuation, IntMatrix};
use crate::quiver::Representation;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{Map, Number, Value};
use std::collections::BTreeMap;

/// Whether `x` lies in the `p`-local row span of a nonsingular matrix `m`, given `adj(m)`:
/// `x adj(m)` must vanish modulo `p^{v_p(det m)}`.
pub fn in_local_span(adj: &IntMatrix, det_val: u32, x: &[BigInt], p: u64) -> bool {
    adj.apply(x)
        .iter()
        .all(|y| valuation(y, p).is_none_or(|v| v >= det_val))
}

/// Reference test: for every arrow, each row of `M_t F_phi` lies in the span of `M_h`.
/// `mats[v]` is any nonsingular matrix whose rows span the lattice at `v`.
pub fn is_subrep_matrices(rep: &Representation, mats: &[IntMatrix], p: u64) -> Result<bool> {
    if mats.len() != rep.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "{} lattices for {} vertices",
            mats.len(),
            rep.num_vertices()
        )));
    }
    for (v, m) in mats.iter().enumerate() {
        if m.rows() != rep.ranks[v] || m.cols() != rep.ranks[v] {
            return Err(Error::DimensionMismatch(format!(
                "lattice at vertex `{}` is {}x{}, rank is {}",
                rep.quiver.vertices[v],
                m.rows(),
                m.cols(),
                rep.ranks[v]
            )));
        }
    }
    let mut cache: Vec<Option<(IntMatrix, u32)>> = vec![None; mats.len()];
    for (k, a) in rep.quiver.arrows.iter().enumerate() {
        let images = mats[a.tail].mul(&rep.maps[k]);
        let h = a.head;
        if cache[h].is_none() {
            let det = mats[h].determinant();
            let val = valuation(&det, p).ok_or_else(|| {
                Error::InvalidInput(format!("lattice at vertex `{}` is singular", rep.quiver.vertices[h]))
            })?;
            cache[h] = Some((mats[h].adjugate(), val));
        }
        let (adj, val) = cache[h].as_ref().unwrap();
        for r in 0..images.rows() {
            if !in_local_span(adj, *val, images.row(r), p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_subrep(rep: &Representation, tuple: &LatticeTuple) -> Result<bool> {
    let Some(p) = tuple.p() else {
        return is_subrep_matrices(rep, &[], 2);
    };
    is_subrep_matrices(rep, &tuple.matrices(), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Univariate,
    Multivariate,
}

/// Counts of subrepresentations keyed by index exponent: `[e]` in univariate mode, one exponent
/// per vertex in multivariate mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub prime: u64,
    pub mode: Mode,
    pub counts: BTreeMap<Vec<u32>, BigUint>,
}

impl CountTable {
    pub fn get(&self, key: &[u32]) -> BigUint {
        self.counts.get(key).cloned().unwrap_or_default()
    }

    /// Univariate coefficients `a_{p^0}, ..., a_{p^E}` (summing a multivariate table).
    pub fn univariate(&self, max_exp: u32) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); max_exp as usize + 1];
        for (k, v) in &self.counts {
            let e: u32 = k.iter().sum();
            if e <= max_exp {
                out[e as usize] += v;
            }
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let mut counts = Map::new();
        for (k, v) in &self.counts {
            let key = k.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            let num: Number = v.to_string().parse().expect("integer literal");
            counts.insert(key, Value::Number(num));
        }
        serde_json::json!({
            "prime": self.prime,
            "mode": self.mode,
            "counts": Value::Object(counts),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let bad = |m: &str| Error::InvalidInput(format!("count table: {m}"));
        let prime = v["prime"].as_u64().ok_or_else(|| bad("`prime` missing"))?;
        let mode: Mode = serde_json::from_value(v["mode"].clone())?;
        let mut counts = BTreeMap::new();
        for (k, c) in v["counts"].as_object().ok_or_else(|| bad("`counts` missing"))? {
            let key = k
                .split(',')
                .map(|s| s.parse::<u32>().map_err(|_| bad("bad exponent key")))
                .collect::<Result<Vec<_>>>()?;
            let Value::Number(n) = c else {
                return Err(bad("count is not a number"));
            };
            let n: BigUint = n.to_string().parse().map_err(|_| bad("count is not a natural number"))?;
            counts.insert(key, n);
        }
        Ok(CountTable { prime, mode, counts })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Largest number of candidate tuples the enumeration may visit.
    pub ceiling: u128,
    /// Enumerate each tail lattice inside the preimage of the already chosen heads instead of
    /// testing every candidate (acyclic quivers only; otherwise ignored).
    pub accelerate: bool,
    /// Largest number of per-vertex candidate lattices the plain enumeration keeps in memory.
    pub max_stored: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            ceiling: 100_000_000,
            accelerate: false,
            max_stored: 4_000_000,
        }
    }
}

/// Number of candidate tuples with total exponent at most `max_exp`.
pub fn predicted_candidates(ranks: &[usize], p: u64, max_exp: u32) -> BigUint {
    let len = max_exp as usize + 1;
    let mut acc = vec![BigUint::zero(); len];
    acc[0] = 1u32.into();
    for &n in ranks {
        let c = sublattice_counts(n, p, max_exp);
        let mut next = vec![BigUint::zero(); len];
        for i in 0..len {
            for j in 0..len - i {
                next[i + j] += &acc[i] * &c[j];
            }
        }
        acc = next;
    }
    acc.into_iter().sum()
}

fn guard(ranks: &[usize], p: u64, max_exp: u32, ceiling: u128) -> Result<()> {
    let predicted = predicted_candidates(ranks, p, max_exp);
    let as_u128 = predicted.to_u128().unwrap_or(u128::MAX);
    if as_u128 > ceiling {
        return Err(Error::ResourceLimit {
            predicted: as_u128,
            ceiling,
        });
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 || !(2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    Ok(())
}

/// A candidate lattice with its arrow images reduced modulo `p^E`.
struct Candidate {
    lattice: LocalLattice,
    /// `images[k]`: rows of `M F_k` for each out-arrow `k` of the vertex, flattened.
    images: Vec<Vec<i64>>,
}

fn reduce_matrix(m: &IntMatrix, modulus: i64) -> Vec<i64> {
    let big = BigInt::from(modulus);
    m.entries()
        .map(|x| {
            let r = ((x % &big) + &big) % &big;
            r.to_i64().unwrap()
        })
        .collect()
}

struct Plan<'a> {
    rep: &'a Representation,
    modulus: i64,
    max_exp: u32,
    /// Per vertex, candidates sorted by index exponent.
    lists: Vec<Vec<Candidate>>,
    /// Arrow indices into `out`-position of the tail's image list.
    image_slot: Vec<usize>,
    /// Arrows to check once vertex `v` is assigned (both endpoints `<= v`).
    checks: Vec<Vec<usize>>,
}

impl<'a> Plan<'a> {
    fn new(rep: &'a Representation, p: u64, max_exp: u32) -> Self {
        let modulus = ipow(p, max_exp);
        let nv = rep.num_vertices();
        let mut image_slot = vec![0; rep.num_arrows()];
        let mut outs: Vec<Vec<usize>> = vec![vec![]; nv];
        for (k, a) in rep.quiver.arrows.iter().enumerate() {
            image_slot[k] = outs[a.tail].len();
            outs[a.tail].push(k);
        }
        let lists = (0..nv)
            .map(|v| {
                let maps: Vec<IntMatrix> = outs[v].iter().map(|&k| rep.maps[k].clone()).collect();
                let lattices: Vec<LocalLattice> = enum_sublattices_upto(rep.ranks[v], p, max_exp).collect();
                lattices
                    .into_par_iter()
                    .map(|lattice| {
                        let m = lattice.to_matrix();
                        let images = maps.iter().map(|f| reduce_matrix(&m.mul(f), modulus)).collect();
                        Candidate { lattice, images }
                    })
                    .collect()
            })
            .collect();
        let mut checks = vec![vec![]; nv];
        for (k, a) in rep.quiver.arrows.iter().enumerate() {
            checks[a.tail.max(a.head)].push(k);
        }
        Plan {
            rep,
            modulus,
            max_exp,
            lists,
            image_slot,
            checks,
        }
    }

    fn arrow_ok(&self, k: usize, chosen: &[&Candidate], scratch: &mut Vec<i64>) -> bool {
        let a = &self.rep.quiver.arrows[k];
        let images = &chosen[a.tail].images[self.image_slot[k]];
        let target = &chosen[a.head].lattice;
        let w = self.rep.ranks[a.head];
        if w == 0 {
            return true;
        }
        images.chunks(w).all(|row| {
            scratch.clear();
            scratch.extend_from_slice(row);
            target.contains_mod(scratch, self.modulus)
        })
    }

    fn descend<'b>(
        &'b self,
        v: usize,
        budget: u32,
        chosen: &mut Vec<&'b Candidate>,
        key: &mut Vec<u32>,
        out: &mut BTreeMap<Vec<u32>, u64>,
        scratch: &mut Vec<i64>,
    ) {
        if v == self.lists.len() {
            *out.entry(key.clone()).or_default() += 1;
            return;
        }
        for cand in &self.lists[v] {
            let e = cand.lattice.index_exponent();
            if e > budget {
                break;
            }
            chosen.push(cand);
            if self.checks[v].iter().all(|&k| self.arrow_ok(k, chosen, scratch)) {
                key.push(e);
                self.descend(v + 1, budget - e, chosen, key, out, scratch);
                key.pop();
            }
            chosen.pop();
        }
    }

    fn run(&self) -> BTreeMap<Vec<u32>, BigUint> {
        let merge = |mut a: BTreeMap<Vec<u32>, BigUint>, b: BTreeMap<Vec<u32>, BigUint>| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        };
        if self.lists.is_empty() {
            return BTreeMap::from([(vec![], BigUint::from(1u32))]);
        }
        self.lists[0]
            .par_iter()
            .filter(|c| c.lattice.index_exponent() <= self.max_exp)
            .map(|first| {
                let mut out = BTreeMap::new();
                let mut chosen = vec![first];
                let mut scratch = Vec::new();
                if self.checks[0].iter().all(|&k| self.arrow_ok(k, &chosen, &mut scratch)) {
                    let e = first.lattice.index_exponent();
                    let mut key = vec![e];
                    self.descend(1, self.max_exp - e, &mut chosen, &mut key, &mut out, &mut scratch);
                }
                out.into_iter().map(|(k, v)| (k, BigUint::from(v))).collect()
            })
            .reduce(BTreeMap::new, merge)
    }
}

/// Vertices ordered so that every arrow's head precedes its tail, if the quiver is acyclic.
fn heads_first_order(rep: &Representation) -> Option<Vec<usize>> {
    let nv = rep.num_vertices();
    let mut pending_out: Vec<usize> = (0..nv).map(|v| rep.out_arrows(v).count()).collect();
    let mut order = Vec::with_capacity(nv);
    let mut placed = vec![false; nv];
    while order.len() < nv {
        let v = (0..nv).find(|&v| !placed[v] && pending_out[v] == 0)?;
        placed[v] = true;
        order.push(v);
        for k in rep.in_arrows(v) {
            pending_out[rep.quiver.arrows[k].tail] -= 1;
        }
    }
    Some(order)
}

/// `{x : x F_k in Lambda_h for every out-arrow k of t}` as a lattice, together with its index.
fn preimage(rep: &Representation, t: usize, heads: &[Option<LocalLattice>], p: u64) -> LocalLattice {
    let n = rep.ranks[t];
    let mut cond = IntMatrix::zero(n, 0);
    let mut moduli = Vec::new();
    for k in rep.out_arrows(t) {
        let h = rep.quiver.arrows[k].head;
        let target = heads[h].as_ref().expect("head assigned");
        let m = target.to_matrix();
        let det = BigInt::from(p).pow(target.index_exponent());
        cond = cond.hconcat(&rep.maps[k].mul(&m.adjugate()));
        moduli.extend(std::iter::repeat_n(det, rep.ranks[h]));
    }
    if cond.cols() == 0 || n == 0 {
        return LocalLattice::full(n, p);
    }
    let stacked = cond.vconcat(&IntMatrix::diagonal(&moduli));
    let kernel = stacked.left_kernel();
    let basis = kernel.submatrix(0..kernel.rows(), 0..n).row_basis();
    LocalLattice::from_matrix(&basis, p).expect("preimage has full rank")
}

fn run_accelerated(rep: &Representation, p: u64, max_exp: u32, order: &[usize]) -> BTreeMap<Vec<u32>, BigUint> {
    fn go(
        rep: &Representation,
        p: u64,
        order: &[usize],
        depth: usize,
        budget: u32,
        chosen: &mut Vec<Option<LocalLattice>>,
        out: &mut BTreeMap<Vec<u32>, BigUint>,
    ) {
        if depth == order.len() {
            let key = chosen.iter().map(|l| l.as_ref().unwrap().index_exponent()).collect();
            *out.entry(key).or_default() += 1u32;
            return;
        }
        let t = order[depth];
        let pre = preimage(rep, t, chosen, p);
        let base = pre.index_exponent();
        if base > budget {
            return;
        }
        let pm = pre.to_matrix();
        for e in 0..=budget - base {
            for sub in enum_sublattices(rep.ranks[t], p, e) {
                let lattice = if base == 0 {
                    sub
                } else {
                    LocalLattice::from_matrix(&sub.to_matrix().mul(&pm), p).expect("full rank")
                };
                let used = lattice.index_exponent();
                chosen[t] = Some(lattice);
                go(rep, p, order, depth + 1, budget - used, chosen, out);
            }
        }
        chosen[t] = None;
    }
    let mut out = BTreeMap::new();
    let mut chosen = vec![None; rep.num_vertices()];
    go(rep, p, order, 0, max_exp, &mut chosen, &mut out);
    out
}

/// Counts subrepresentations of finite `p`-power index: `a_{p^e}` for `e <= max_exp`
/// (univariate) or one count per exponent vector with sum at most `max_exp` (multivariate).
pub fn count_subreps(
    rep: &Representation,
    p: u64,
    max_exp: u32,
    mode: Mode,
    options: &CountOptions,
) -> Result<CountTable> {
    check_prime(p)?;
    if rep.total_rank() == 0 {
        return Err(Error::InvalidInput("representation has total rank 0".into()));
    }
    guard(&rep.ranks, p, max_exp, options.ceiling)?;
    let order = options.accelerate.then(|| heads_first_order(rep)).flatten();
    let by_vector = match order {
        Some(order) => run_accelerated(rep, p, max_exp, &order),
        None => {
            let stored: BigUint = rep.ranks.iter().map(|&n| predicted_candidates(&[n], p, max_exp)).sum();
            let stored = stored.to_u128().unwrap_or(u128::MAX);
            if stored > options.max_stored {
                return Err(Error::ResourceLimit {
                    predicted: stored,
                    ceiling: options.max_stored,
                });
            }
            Plan::new(rep, p, max_exp).run()
        }
    };
    let counts = match mode {
        Mode::Multivariate => by_vector,
        Mode::Univariate => {
            let mut out = BTreeMap::new();
            for (k, v) in by_vector {
                *out.entry(vec![k.iter().sum::<u32>()]).or_insert_with(BigUint::zero) += v;
            }
            for e in 0..=max_exp {
                out.entry(vec![e]).or_insert_with(BigUint::zero);
            }
            out
        }
    };
    Ok(CountTable {
        prime: p,
        mode,
        counts,
    })
}

/// Sublattices of `Z_p^n` of index at most `p^max_exp` invariant under every operator.
pub fn count_invariant_sublattices(
    operators: &[IntMatrix],
    n: usize,
    p: u64,
    max_exp: u32,
    ceiling: u128,
) -> Result<CountTable> {
    check_prime(p)?;
    for (k, op) in operators.iter().enumerate() {
        if op.rows() != n || op.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator {k} is {}x{}, expected {n}x{n}",
                op.rows(),
                op.cols()
            )));
        }
    }
    guard(&[n], p, max_exp, ceiling)?;
    let modulus = ipow(p, max_exp);
    let counts: Vec<u64> = (0..=max_exp)
        .into_par_iter()
        .map(|e| {
            let mut scratch = Vec::with_capacity(n);
            enum_sublattices(n, p, e)
                .filter(|l| {
                    let m = l.to_matrix();
                    operators.iter().all(|op| {
                        let img = reduce_matrix(&m.mul(op), modulus);
                        n == 0
                            || img.chunks(n).all(|row| {
                                scratch.clear();
                                scratch.extend_from_slice(row);
                                l.contains_mod(&mut scratch, modulus)
                            })
                    })
                })
                .count() as u64
        })
        .collect();
    Ok(CountTable {
        prime: p,
        mode: Mode::Univariate,
        counts: counts
            .into_iter()
            .enumerate()
            .map(|(e, c)| (vec![e as u32], BigUint::from(c)))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::builtins::{graded_heisenberg, heisenberg, star, to_submodule_instance};

    fn nat(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn heisenberg_examples() {
        let rep = heisenberg();
        let bad = LocalLattice::from_hnf(2, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]).unwrap();
        let good = LocalLattice::from_hnf(2, &[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(!is_subrep(&rep, &LatticeTuple::new(vec![bad]).unwrap()).unwrap());
        assert!(is_subrep(&rep, &LatticeTuple::new(vec![good]).unwrap()).unwrap());
        assert!(is_subrep(&rep, &LatticeTuple::full(&[3], 5)).unwrap());
        let table = count_subreps(&rep, 2, 2, Mode::Univariate, &Default::default()).unwrap();
        assert_eq!(table.univariate(2), nat(&[1, 3, 7]));
    }

    #[test]
    fn graded_heisenberg_multivariate() {
        let t = count_subreps(&graded_heisenberg(), 2, 3, Mode::Multivariate, &Default::default()).unwrap();
        assert_eq!(t.get(&[0, 0]), 1u32.into());
        assert_eq!(t.get(&[1, 0]), 3u32.into());
        // t2 only occurs together with t1^2
        assert_eq!(t.get(&[0, 1]), 0u32.into());
        assert_eq!(t.get(&[2, 1]), 1u32.into());
    }

    #[test]
    fn trivial_and_guard() {
        let rep = Representation::new(vec![("v".into(), 1)], vec![]).unwrap();
        let t = count_subreps(&rep, 3, 4, Mode::Univariate, &Default::default()).unwrap();
        assert_eq!(t.univariate(4), nat(&[1; 5]));
        let opts = CountOptions {
            ceiling: 10,
            ..Default::default()
        };
        assert!(matches!(
            count_subreps(&heisenberg(), 2, 3, Mode::Univariate, &opts),
            Err(Error::ResourceLimit { .. })
        ));
        let opts = CountOptions {
            max_stored: 10,
            ..Default::default()
        };
        assert!(matches!(
            count_subreps(&heisenberg(), 2, 3, Mode::Univariate, &opts),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(count_subreps(&rep, 4, 1, Mode::Univariate, &Default::default()).is_err());
    }

    #[test]
    fn acceleration_agrees() {
        let rep = star(2, 3).unwrap();
        let plain = count_subreps(&rep, 2, 4, Mode::Multivariate, &Default::default()).unwrap();
        let fast = count_subreps(
            &rep,
            2,
            4,
            Mode::Multivariate,
            &CountOptions {
                accelerate: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(plain, fast);
    }

    #[test]
    fn invariant_sublattices_cross_check() {
        let rep = star(1, 2).unwrap();
        let direct = count_subreps(&rep, 2, 3, Mode::Univariate, &Default::default()).unwrap();
        let ops = to_submodule_instance(&rep);
        let via_ops = count_invariant_sublattices(&ops, 2, 2, 3, u128::MAX).unwrap();
        assert_eq!(direct.univariate(3), via_ops.univariate(3));
        let h = heisenberg();
        let t = count_invariant_sublattices(&h.maps, 3, 2, 2, u128::MAX).unwrap();
        assert_eq!(t.univariate(2), nat(&[1, 3, 7]));
        let none = count_invariant_sublattices(&[], 1, 5, 3, u128::MAX).unwrap();
        assert_eq!(none.univariate(3), nat(&[1; 4]));
    }

    #[test]
    fn json_round_trip() {
        let t = count_subreps(&graded_heisenberg(), 2, 3, Mode::Multivariate, &Default::default()).unwrap();
        let text = t.to_json();
        assert!(text.contains("\"1,0\": 3"));
        assert_eq!(CountTable::from_json(&text).unwrap(), t);
    }
}
