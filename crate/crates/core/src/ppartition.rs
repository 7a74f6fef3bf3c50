//! Posets, P-partitions and Stanley's generating function, with the thin Hasse-quiver bridge.

use crate::arith::{IntPoly, RationalFn, Signature};
use crate::error::{invalid, Error, Result};
use crate::quiver::{builtins, Representation};
use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Largest poset for which linear extensions are enumerated unless a bound is given.
pub const DEFAULT_EXTENSION_BOUND: usize = 10;

/// A partial order on `1..=n` with a natural labelling (`i < j` in P implies `i < j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    covers: Vec<(usize, usize)>,
    /// `below[i][j]`: `i + 1 < j + 1` in P (strict).
    below: Vec<Vec<bool>>,
    /// Original label of each element, when the input was relabelled.
    relabeling: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PosetFile {
    n: usize,
    covers: Vec<(usize, usize)>,
}

fn closure(n: usize, relations: &[(usize, usize)]) -> Result<Vec<Vec<bool>>> {
    let mut below = vec![vec![false; n]; n];
    for &(x, y) in relations {
        if x == 0 || y == 0 || x > n || y > n {
            return invalid(format!("relation {x} < {y} outside 1..={n}"));
        }
        below[x - 1][y - 1] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if below[i][k] {
                for j in 0..n {
                    if below[k][j] {
                        below[i][j] = true;
                    }
                }
            }
        }
    }
    if (0..n).any(|i| below[i][i]) {
        return invalid("relations contain a cycle");
    }
    Ok(below)
}

fn hasse_covers(below: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = below.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below[i][j] && !(0..n).any(|k| below[i][k] && below[k][j]) {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

impl Poset {
    /// Builds the order generated by `relations` (pairs `x < y`, 1-based). Redundant relations
    /// are reduced to covers; a non-natural labelling is replaced by the one read off the
    /// lexicographically first linear extension, and the original labels are recorded.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let below = closure(n, relations)?;
        let natural = (0..n).all(|i| (0..n).all(|j| !below[i][j] || i < j));
        if natural {
            return Ok(Poset {
                n,
                covers: hasse_covers(&below),
                below,
                relabeling: None,
            });
        }
        let order = first_extension(&below);
        let mut new_label = vec![0; n];
        for (k, &x) in order.iter().enumerate() {
            new_label[x] = k + 1;
        }
        let relabeled: Vec<(usize, usize)> = relations
            .iter()
            .map(|&(x, y)| (new_label[x - 1], new_label[y - 1]))
            .collect();
        let mut poset = Poset::new(n, &relabeled)?;
        poset.relabeling = Some(order.iter().map(|x| x + 1).collect());
        Ok(poset)
    }

    pub fn chain(n: usize) -> Self {
        let covers: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Poset::new(n, &covers).expect("chain")
    }

    pub fn antichain(n: usize) -> Self {
        Poset::new(n, &[]).expect("antichain")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PosetFile = serde_json::from_str(text)?;
        Poset::new(file.n, &file.covers)
    }

    pub fn to_json(&self) -> String {
        let file = PosetFile {
            n: self.n,
            covers: self.covers.clone(),
        };
        serde_json::to_string(&file).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cover relations `(x, y)`, `y` covering `x`, 1-based.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Original label of each element if the input labelling was not natural.
    pub fn relabeling(&self) -> Option<&[usize]> {
        self.relabeling.as_deref()
    }

    /// `x < y` in P (1-based, strict).
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.below[x - 1][y - 1]
    }

    fn upper_covers(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers.iter().filter(move |c| c.0 == x).map(|c| c.1)
    }
}

fn first_extension(below: &[Vec<bool>]) -> Vec<usize> {
    let n = below.len();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = (0..n)
            .find(|&x| !placed[x] && (0..n).all(|y| !below[y][x] || placed[y]))
            .expect("acyclic");
        placed[x] = true;
        out.push(x);
    }
    out
}

/// Descent statistics of a permutation in one-line notation on `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermStats {
    pub perm: Vec<usize>,
    /// Positions `i` (1-based) with `w(i) > w(i+1)`.
    pub descents: BTreeSet<usize>,
    pub maj: usize,
    pub des: usize,
    /// Number of inversions.
    pub length: usize,
}

impl PermStats {
    pub fn new(perm: &[usize]) -> Self {
        let descents: BTreeSet<usize> = (1..perm.len()).filter(|&i| perm[i - 1] > perm[i]).collect();
        let length = perm
            .iter()
            .tuple_combinations()
            .filter(|(a, b)| a > b)
            .count();
        PermStats {
            perm: perm.to_vec(),
            maj: descents.iter().sum(),
            des: descents.len(),
            descents,
            length,
        }
    }
}

/// Linear extensions in lexicographic order, as sequences of elements.
pub fn linear_extensions(poset: &Poset) -> Result<Vec<Vec<usize>>> {
    linear_extensions_bounded(poset, DEFAULT_EXTENSION_BOUND)
}

pub fn linear_extensions_bounded(poset: &Poset, bound: usize) -> Result<Vec<Vec<usize>>> {
    if poset.n > bound {
        return invalid(format!(
            "poset has {} elements; linear extensions are enumerated up to {bound}",
            poset.n
        ));
    }
    fn go(p: &Poset, prefix: &mut Vec<usize>, placed: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == p.n {
            out.push(prefix.clone());
            return;
        }
        for x in 1..=p.n {
            if !placed[x - 1] && (1..=p.n).all(|y| !p.lt(y, x) || placed[y - 1]) {
                placed[x - 1] = true;
                prefix.push(x);
                go(p, prefix, placed, out);
                prefix.pop();
                placed[x - 1] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(poset, &mut Vec::new(), &mut vec![false; poset.n], &mut out);
    Ok(out)
}

/// `sum_{pi in L(P)} X^maj(pi) / prod_{i=1}^{n} (1 - X^i)`, in the single variable `X`.
pub fn stanley_gf(poset: &Poset) -> Result<RationalFn> {
    let sig = Signature::with_t_names(vec!["X".into()]);
    let mut num = IntPoly::zero(sig.nvars());
    for pi in linear_extensions(poset)? {
        num.add_term(sig.exps(0, &[PermStats::new(&pi).maj as u32]), BigInt::one());
    }
    let factors = (1..=poset.n as u32).map(|i| (sig.one_minus(0, &[i]), 1)).collect();
    RationalFn::with_factors(sig, num, factors)
}

/// Number of order-reversing maps `P -> N_0` with values summing to `m`.
pub fn ppartition_count(poset: &Poset, m: u32) -> BigUint {
    // natural labelling: every element above x has a larger label, so assign from n down to 1
    fn go(p: &Poset, x: usize, left: u32, sigma: &mut [u32]) -> u128 {
        if x == 0 {
            return u128::from(left == 0);
        }
        let floor = p.upper_covers(x).map(|y| sigma[y - 1]).max().unwrap_or(0);
        let mut total = 0;
        for v in floor..=left {
            sigma[x - 1] = v;
            total += go(p, x - 1, left - v, sigma);
        }
        total
    }
    BigUint::from(go(poset, poset.n, m, &mut vec![0; poset.n]))
}

/// Outcome of the delta-chain test together with `delta(P)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaChain {
    pub holds: bool,
    /// Sum over `x` of the number of elements in a longest chain starting at `x`.
    pub delta: usize,
}

/// Whether, for every `x`, all maximal chains of `{y >= x}` have the same length.
pub fn delta_chain(poset: &Poset) -> DeltaChain {
    let n = poset.n;
    let mut longest = vec![0usize; n + 1];
    let mut shortest = vec![0usize; n + 1];
    for x in (1..=n).rev() {
        let ups: Vec<usize> = poset.upper_covers(x).collect();
        longest[x] = 1 + ups.iter().map(|&y| longest[y]).max().unwrap_or(0);
        shortest[x] = 1 + ups.iter().map(|&y| shortest[y]).min().unwrap_or(0);
    }
    DeltaChain {
        holds: (1..=n).all(|x| longest[x] == shortest[x]),
        delta: longest[1..].iter().sum(),
    }
}

/// Thin representation on the Hasse quiver: rank one everywhere, identity arrows along covers.
pub fn hasse_rep(poset: &Poset) -> Representation {
    builtins::hasse_rep(poset.n, &poset.covers).expect("covers lie in 1..=n")
}

fn check_descent_set(n: usize, set: &BTreeSet<usize>) -> Result<()> {
    match set.iter().find(|&&i| i == 0 || i >= n) {
        Some(i) => invalid(format!("{i} is not in [1, {}]", n.saturating_sub(1))),
        None => Ok(()),
    }
}

/// Gaussian binomial `[n choose k]_X` by the Pascal recurrence.
fn gaussian_binomial(n: usize, k: usize) -> IntPoly {
    let mut row = vec![IntPoly::one(1)];
    for m in 1..=n {
        let mut next = vec![IntPoly::one(1); m + 1];
        for j in 1..m {
            // [m, j] = [m-1, j-1] + X^j [m-1, j]
            next[j] = &row[j - 1] + &row[j].shift(&[j as u32]);
        }
        row = next;
    }
    row[k].clone()
}

/// `[n; I]_X` as the product of Gaussian binomials along `I`.
pub fn q_multinomial_product(n: usize, set: &BTreeSet<usize>) -> Result<IntPoly> {
    check_descent_set(n, set)?;
    let mut tops: Vec<usize> = set.iter().copied().collect();
    tops.push(n);
    let mut out = IntPoly::one(1);
    for w in tops.windows(2).rev() {
        out = &out * &gaussian_binomial(w[1], w[0]);
    }
    Ok(out)
}

/// `sum_{w in S_n, Des(w) within I} X^length(w)`.
pub fn q_multinomial_sum(n: usize, set: &BTreeSet<usize>) -> Result<IntPoly> {
    check_descent_set(n, set)?;
    let mut out = IntPoly::zero(1);
    for w in (1..=n).permutations(n) {
        let stats = PermStats::new(&w);
        if stats.descents.is_subset(set) {
            out.add_term(vec![stats.length as u32], BigInt::one());
        }
    }
    Ok(out)
}

/// The X-multinomial coefficient, computed both ways; disagreement is reported as an error.
pub fn q_multinomial_descent(n: usize, set: &BTreeSet<usize>) -> Result<IntPoly> {
    let product = q_multinomial_product(n, set)?;
    let sum = q_multinomial_sum(n, set)?;
    if product != sum {
        return Err(Error::Validation(vec![format!(
            "multinomial for n = {n}, I = {set:?}: product and descent sum differ"
        )]));
    }
    Ok(product)
}

/// For every `w` in `S_n`, with `w w0` meaning `w` followed by `w0`:
/// `Des(w w0)` is the complement of `Des(w)` and `length(w) + length(w w0) = n(n-1)/2`.
pub fn coxeter_identity_check(n: usize) -> Result<bool> {
    if n > 8 {
        return invalid(format!("coxeter identity check supports n <= 8, got {n}"));
    }
    let all: BTreeSet<usize> = (1..n).collect();
    Ok((1..=n).permutations(n).all(|w| {
        let ww0: Vec<usize> = w.iter().map(|&x| n + 1 - x).collect();
        let (a, b) = (PermStats::new(&w), PermStats::new(&ww0));
        let complement: BTreeSet<usize> = all.difference(&a.descents).copied().collect();
        b.descents == complement && a.length + b.length == n * n.saturating_sub(1) / 2
    }))
}

/// Small posets used by the test suites: chains, antichains, stars, dual stars, a diamond,
/// a grid and two posets failing the delta-chain condition.
pub fn poset_catalog() -> Vec<(&'static str, Poset)> {
    let p = |n, covers: &[(usize, usize)]| Poset::new(n, covers).expect("catalog poset");
    vec![
        ("chain2", Poset::chain(2)),
        ("chain3", Poset::chain(3)),
        ("chain5", Poset::chain(5)),
        ("antichain2", Poset::antichain(2)),
        ("antichain3", Poset::antichain(3)),
        ("star3", p(3, &[(1, 2), (1, 3)])),
        ("star4", p(4, &[(1, 2), (1, 3), (1, 4)])),
        ("star5", p(5, &[(1, 2), (1, 3), (1, 4), (1, 5)])),
        ("dual_star3", p(3, &[(1, 3), (2, 3)])),
        ("dual_star4", p(4, &[(1, 4), (2, 4), (3, 4)])),
        ("chain_and_point", p(3, &[(1, 2)])),
        ("n_shape", p(4, &[(1, 3), (2, 3), (2, 4)])),
        ("diamond", p(4, &[(1, 2), (1, 3), (2, 4), (3, 4)])),
        ("grid2x3", p(6, &[(1, 2), (1, 3), (2, 4), (2, 5), (3, 5), (4, 6), (5, 6)])),
        ("unbalanced_fork", p(4, &[(1, 2), (1, 3), (3, 4)])),
        ("long_and_short", p(4, &[(1, 2), (2, 3), (1, 4)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{monomial_ratio, parse, series_expand, MonomialRatio};
    use crate::lattice::{count_subreps, CountOptions, Mode};
    use crate::quiver::centralizer_series;

    fn gf(s: &str) -> RationalFn {
        parse(s, &Signature::with_t_names(vec!["X".into()])).unwrap()
    }

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn extensions_of_small_posets() {
        assert_eq!(linear_extensions(&Poset::chain(3)).unwrap(), vec![vec![1, 2, 3]]);
        assert_eq!(
            linear_extensions(&Poset::antichain(2)).unwrap(),
            vec![vec![1, 2], vec![2, 1]]
        );
        let star = Poset::new(3, &[(1, 2), (1, 3)]).unwrap();
        assert_eq!(linear_extensions(&star).unwrap().len(), 2);
        assert!(linear_extensions_bounded(&Poset::antichain(4), 3).is_err());
    }

    #[test]
    fn stanley_examples() {
        assert!(stanley_gf(&Poset::antichain(2)).unwrap().equals(&gf("1/(1-X)^2")));
        let chain = gf("1/((1-X)(1-X^2)(1-X^3))");
        assert!(stanley_gf(&Poset::chain(3)).unwrap().equals(&chain));
        let star = Poset::new(3, &[(1, 2), (1, 3)]).unwrap();
        let expect = gf("(1+X^2)/((1-X)(1-X^2)(1-X^3))");
        assert!(stanley_gf(&star).unwrap().equals(&expect));
    }

    #[test]
    fn ppartition_examples() {
        for (_, p) in poset_catalog() {
            assert_eq!(ppartition_count(&p, 0), BigUint::one());
        }
        assert_eq!(ppartition_count(&Poset::antichain(2), 2), BigUint::from(3u32));
        assert_eq!(ppartition_count(&Poset::chain(2), 2), BigUint::from(2u32));
    }

    #[test]
    fn delta_chain_examples() {
        assert_eq!(delta_chain(&Poset::chain(4)), DeltaChain { holds: true, delta: 10 });
        assert_eq!(delta_chain(&Poset::antichain(3)), DeltaChain { holds: true, delta: 3 });
        let fork = Poset::new(4, &[(1, 2), (1, 3), (3, 4)]).unwrap();
        assert!(!delta_chain(&fork).holds);
    }

    #[test]
    fn relabels_non_natural_input() {
        let p = Poset::new(3, &[(3, 1), (1, 2)]).unwrap();
        assert_eq!(p.covers(), &[(1, 2), (2, 3)]);
        assert_eq!(p.relabeling(), Some(&[3, 1, 2][..]));
        let redundant = Poset::new(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(redundant, Poset::chain(3));
        assert!(Poset::new(2, &[(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Poset::from_json(r#"{"n":4,"covers":[[1,3],[2,3],[3,4]]}"#).unwrap();
        assert_eq!(Poset::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn hasse_shapes() {
        let rep = hasse_rep(&Poset::antichain(3));
        assert_eq!((rep.num_vertices(), rep.num_arrows()), (3, 0));
        let star = hasse_rep(&Poset::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap());
        assert!(star.quiver.arrows.iter().all(|a| a.tail == 0));
    }

    #[test]
    fn triple_agreement() {
        let bound = 10;
        for (name, p) in poset_catalog() {
            let series = series_expand(&stanley_gf(&p).unwrap(), bound)
                .unwrap()
                .univariate_at(1, &[])
                .unwrap();
            let direct: Vec<BigInt> =
                (0..=bound).map(|m| BigInt::from(ppartition_count(&p, m))).collect();
            assert_eq!(series, direct, "{name}");
            for prime in [2, 3] {
                let counts: Vec<BigInt> = count_subreps(
                    &hasse_rep(&p),
                    prime,
                    bound,
                    Mode::Univariate,
                    &CountOptions::default(),
                )
                .unwrap()
                .univariate(bound)
                .into_iter()
                .map(BigInt::from)
                .collect();
                assert_eq!(counts, direct, "{name} at p = {prime}");
            }
        }
    }

    #[test]
    fn reciprocity_iff_delta_chain() {
        for (name, p) in poset_catalog() {
            let g = stanley_gf(&p).unwrap();
            let ratio = monomial_ratio(&g.invert_qt().unwrap(), &g);
            let dc = delta_chain(&p);
            let expected = MonomialRatio {
                sign: if p.len() % 2 == 0 { 1 } else { -1 },
                q_exp: 0,
                t_exps: vec![dc.delta as i64],
            };
            assert_eq!(ratio.as_ref() == Some(&expected), dc.holds, "{name}");
        }
    }

    #[test]
    fn delta_matches_corank_sum() {
        for (name, p) in poset_catalog() {
            let dc = delta_chain(&p);
            if !dc.holds {
                continue;
            }
            let series = centralizer_series(&hasse_rep(&p)).unwrap();
            let totals = series.totals();
            assert_eq!(dc.delta, totals[..series.class].iter().sum::<usize>(), "{name}");
        }
    }

    #[test]
    fn multinomial_examples() {
        let x = |s: &str| crate::arith::parse_poly(s, &["X".into()]).unwrap();
        assert_eq!(q_multinomial_descent(2, &set(&[1])).unwrap(), x("1+X"));
        assert_eq!(q_multinomial_descent(4, &set(&[])).unwrap(), IntPoly::one(1));
        assert_eq!(q_multinomial_descent(3, &set(&[1, 2])).unwrap(), x("1+2*X+2*X^2+X^3"));
        assert!(q_multinomial_descent(3, &set(&[3])).is_err());
    }

    #[test]
    fn multinomial_two_ways() {
        for n in 0..=6 {
            for k in 0..n.max(1) {
                for subset in (1..n).combinations(k) {
                    let s: BTreeSet<usize> = subset.into_iter().collect();
                    q_multinomial_descent(n, &s).unwrap();
                }
            }
        }
    }

    #[test]
    fn coxeter_identities() {
        for n in 0..=6 {
            assert!(coxeter_identity_check(n).unwrap(), "n = {n}");
        }
        assert!(coxeter_identity_check(9).is_err());
    }

    #[test]
    fn perm_stats() {
        let s = PermStats::new(&[3, 1, 4, 2]);
        assert_eq!(s.descents, set(&[1, 3]));
        assert_eq!((s.maj, s.des, s.length), (4, 2, 3));
    }
}
