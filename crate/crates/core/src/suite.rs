//! The acceptance suite: seven groups of exact checks tying counts, formulas, functional
//! equations, posets, lattice invariants and homogeneity together.

use crate::arith::{series_expand, RationalFn};
use crate::closed_forms::{
    builtin_formula, elliptic_parts, elliptic_point_count, macmahon_identity_check,
    zeta_free_local,
};
use crate::funeq::{predicted_symmetry, verify_funeq};
use crate::lattice::{
    count_invariant_sublattices, count_subreps, enum_sublattices, enum_sublattices_upto,
    is_subrep, random_tuple, CountOptions, GradedRep, LatticeTuple, Mode,
};
use crate::ppartition::{
    coxeter_identity_check, delta_chain, hasse_rep, poset_catalog, ppartition_count,
    q_multinomial_descent, stanley_gf,
};
use crate::quiver::{
    builtin_rep, check_homogeneity, cocentral_grading, to_submodule_instance, BuiltinRep,
    Grading, Params, Representation,
};
use crate::Result;
use itertools::Itertools;
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::time::Instant;

pub const CRITERIA: [&str; 7] = [
    "counts agree with closed formulas",
    "functional equations",
    "P-partitions, Stanley reciprocity and delta-chains",
    "enumeration self-checks",
    "lattice invariants",
    "combinatorial identities",
    "homogeneity classification",
];

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Smaller bounds and fewer random samples.
    pub fast: bool,
    pub seed: u64,
    /// Use the accelerated enumeration for acyclic quivers.
    pub accelerate: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            fast: false,
            seed: 1,
            accelerate: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub fast: bool,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    /// Records an error as a failed check; returns the value otherwise.
    fn attempt<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }
}

pub fn run_all(opts: &SuiteOptions) -> SuiteReport {
    let criteria: Vec<CriterionReport> = (1..=CRITERIA.len()).map(|id| run_criterion(id, opts)).collect();
    SuiteReport {
        seed: opts.seed,
        fast: opts.fast,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, opts: &SuiteOptions) -> CriterionReport {
    let start = Instant::now();
    let mut tally = Tally::default();
    match id {
        1 => formulas_vs_counts(&mut tally, opts),
        2 => functional_equations(&mut tally),
        3 => posets(&mut tally, opts),
        4 => enumeration(&mut tally, opts),
        5 => invariants(&mut tally, opts),
        6 => combinatorics(&mut tally),
        7 => homogeneity(&mut tally),
        _ => tally.check(false, || format!("no criterion {id}")),
    }
    CriterionReport {
        id,
        title: CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown").to_string(),
        passed: tally.failures.is_empty() && tally.checks > 0,
        checks: tally.checks,
        failures: tally.failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn params(text: &str) -> Params {
    Params::parse(text).expect("fixture parameters")
}

fn first_difference(label: &str, counts: &[BigInt], expected: &[BigInt]) -> String {
    let k = counts.iter().zip(expected).position(|(a, b)| a != b).unwrap_or(0);
    format!(
        "{label}: coefficient of t^{k} is {} by enumeration, {} by formula (counts {:?}, formula {:?})",
        counts[k],
        expected[k],
        counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        expected.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    )
}

struct Fixture {
    rep: &'static str,
    rep_params: String,
    formula: &'static str,
    formula_params: String,
    prime: u64,
    max_exp: u32,
}

fn fixtures(fast: bool) -> Vec<Fixture> {
    let f = |rep, rp: &str, formula, fp: &str, prime, max_exp: u32| Fixture {
        rep,
        rep_params: rp.to_string(),
        formula,
        formula_params: fp.to_string(),
        prime,
        max_exp: if fast { max_exp.min(4) } else { max_exp },
    };
    let mut out = Vec::new();
    for p in [2, 3] {
        out.push(f("heisenberg", "", "heisenberg", "", p, 6));
        for a in 1..=5 {
            let rp = format!("m=1 a={a}");
            out.push(f("star", &rp, "star_thin", &format!("a={a}"), p, 8));
        }
        for a in 1..=3 {
            out.push(f("star", &format!("m=2 a={a}"), "star_v2", &format!("a={a}"), p, 5));
        }
        for m in 1..=2 {
            for a in 1..=3 {
                let rp = format!("m={m} a={a}");
                out.push(f("dual_star", &rp, "dual_star", &rp, p, 5));
            }
        }
        out.push(f("d4", "", "d4", "", p, 6));
    }
    for p in [3, 5] {
        out.push(f("kron2", "", "kron2", &format!("p={p}"), p, 5));
    }
    for p in [3, 5] {
        if fast && p == 5 {
            continue;
        }
        out.push(f("elliptic", "D=1", "elliptic", "D=1", p, 4));
    }
    out
}

fn counts_for(
    tally: &mut Tally,
    label: &str,
    rep: &Representation,
    prime: u64,
    max_exp: u32,
    mode: Mode,
    opts: &SuiteOptions,
) -> Option<crate::lattice::CountTable> {
    let options = CountOptions {
        accelerate: opts.accelerate,
        ..CountOptions::default()
    };
    tally.attempt(label, count_subreps(rep, prime, max_exp, mode, &options))
}

fn formulas_vs_counts(tally: &mut Tally, opts: &SuiteOptions) {
    for fx in fixtures(opts.fast) {
        let label = format!(
            "{}[{}] vs {}[{}] at p={} (E={})",
            fx.rep, fx.rep_params, fx.formula, fx.formula_params, fx.prime, fx.max_exp
        );
        let Some(built) = tally.attempt(&label, builtin_rep(fx.rep, &params(&fx.rep_params))) else {
            continue;
        };
        let Some(w) = tally.attempt(&label, builtin_formula(fx.formula, &params(&fx.formula_params)))
        else {
            continue;
        };
        let symbols: Vec<BigInt> = if w.sig().symbols().is_empty() {
            vec![]
        } else {
            match tally.attempt(&label, elliptic_point_count(1, fx.prime)) {
                Some(e) => vec![BigInt::from(e)],
                None => continue,
            }
        };
        let Some(table) =
            counts_for(tally, &label, &built.rep, fx.prime, fx.max_exp, Mode::Univariate, opts)
        else {
            continue;
        };
        let counts: Vec<BigInt> = table.univariate(fx.max_exp).into_iter().map(BigInt::from).collect();
        let Some(expected) = tally.attempt(
            &label,
            series_expand(&w, fx.max_exp).and_then(|s| s.univariate_at(fx.prime, &symbols)),
        ) else {
            continue;
        };
        tally.check(counts == expected, || first_difference(&label, &counts, &expected));
    }
    // multivariate graded Heisenberg
    let bound = if opts.fast { 4 } else { 5 };
    let rep = builtin_rep("graded_heisenberg", &Params::default()).expect("builtin").rep;
    let w = builtin_formula("graded_heisenberg", &Params::default()).expect("catalog");
    for p in [2, 3] {
        let label = format!("graded_heisenberg multivariate at p={p} (sum of exponents <= {bound})");
        let Some(table) = counts_for(tally, &label, &rep, p, bound, Mode::Multivariate, opts) else {
            continue;
        };
        let Some(series) = tally.attempt(&label, series_expand(&w, bound).and_then(|s| s.evaluate(p, &[])))
        else {
            continue;
        };
        for e1 in 0..=bound {
            for e2 in 0..=bound - e1 {
                let got = BigInt::from(table.get(&[e1, e2]));
                let want = series.get(&vec![e1, e2]).cloned().unwrap_or_default();
                tally.check(got == want, || {
                    format!("{label}: coefficient of t1^{e1} t2^{e2} is {got} by enumeration, {want} by formula")
                });
            }
        }
    }
}

fn functional_equations(tally: &mut Tally) {
    let mut cases: Vec<(String, RationalFn, Representation, Mode)> = Vec::new();
    let rep = |name: &str, p: &str| builtin_rep(name, &params(p)).map(|b| b.rep);
    let mut push = |label: String, w: Result<RationalFn>, r: Result<Representation>, mode: Mode| {
        match (w, r) {
            (Ok(w), Ok(r)) => cases.push((label, w, r, mode)),
            (Err(e), _) | (_, Err(e)) => tally.attempt::<()>(&label, Err(e)).unwrap_or(()),
        }
    };
    for n in 1..=5 {
        push(format!("free n={n}"), Ok(zeta_free_local(n)), rep("free_nilpotent", &format!("c=1 d={n}")), Mode::Univariate);
    }
    push("heisenberg".into(), builtin_formula("heisenberg", &params("")), rep("heisenberg", ""), Mode::Univariate);
    let gh = || builtin_formula("graded_heisenberg", &params(""));
    push("graded_heisenberg".into(), gh(), rep("graded_heisenberg", ""), Mode::Multivariate);
    push("graded_heisenberg, t1 = t2".into(), gh().map(|w| w.specialize_t()), rep("graded_heisenberg", ""), Mode::Univariate);
    for m in 1..=3 {
        for a in 1..=4 {
            let p = format!("m={m} a={a}");
            push(format!("dual_star {p}"), builtin_formula("dual_star", &params(&p)), rep("dual_star", &p), Mode::Univariate);
        }
    }
    for a in 1..=7 {
        push(format!("star_thin a={a}"), builtin_formula("star_thin", &params(&format!("a={a}"))), rep("star", &format!("m=1 a={a}")), Mode::Univariate);
    }
    for a in 1..=4 {
        push(format!("star_v2 a={a}"), builtin_formula("star_v2", &params(&format!("a={a}"))), rep("star", &format!("m=2 a={a}")), Mode::Univariate);
    }
    push("d4".into(), builtin_formula("d4", &params("")), rep("d4", ""), Mode::Univariate);
    for branch in [1, 3] {
        push(format!("kron2 q = {branch} mod 4"), builtin_formula("kron2", &params(&format!("q_mod4={branch}"))), rep("kron2", ""), Mode::Univariate);
    }
    push("elliptic W1 + E W2".into(), builtin_formula("elliptic", &params("D=1")), rep("elliptic", "D=1"), Mode::Univariate);

    for (label, w, r, mode) in cases {
        let Some(sym) = tally.attempt(&label, predicted_symmetry(&r)) else {
            continue;
        };
        let Some(report) = tally.attempt(&label, verify_funeq(&w, &sym, mode)) else {
            continue;
        };
        tally.check(report.holds, || {
            format!(
                "{label}: predicted {:?}, observed {:?}, residual {}",
                report.predicted,
                report.observed,
                report.residual.clone().unwrap_or_default()
            )
        });
    }

    // the fork poset violates the delta-chain condition, so its generating function must fail
    let witness = poset_catalog().into_iter().find(|(n, _)| *n == "unbalanced_fork").expect("catalog").1;
    let label = "negative control: unbalanced fork poset";
    if let (Some(g), Some(sym)) = (
        tally.attempt(label, stanley_gf(&witness)),
        tally.attempt(label, predicted_symmetry(&hasse_rep(&witness))),
    ) {
        if let Some(report) = tally.attempt(label, verify_funeq(&g, &sym, Mode::Univariate)) {
            tally.check(!report.holds, || format!("{label}: functional equation unexpectedly holds"));
        }
    }
}

fn posets(tally: &mut Tally, opts: &SuiteOptions) {
    let bound = if opts.fast { 6 } else { 10 };
    for (name, p) in poset_catalog() {
        let Some(g) = tally.attempt(name, stanley_gf(&p)) else {
            continue;
        };
        let direct: Vec<BigInt> = (0..=bound).map(|m| BigInt::from(ppartition_count(&p, m))).collect();
        if let Some(series) = tally.attempt(name, series_expand(&g, bound).and_then(|s| s.univariate_at(1, &[]))) {
            tally.check(series == direct, || first_difference(&format!("{name}: Stanley vs P-partitions"), &series, &direct));
        }
        let rep = hasse_rep(&p);
        for prime in [2, 3] {
            let label = format!("{name}: Hasse quiver counts at p={prime}");
            if let Some(t) = counts_for(tally, &label, &rep, prime, bound, Mode::Univariate, opts) {
                let counts: Vec<BigInt> = t.univariate(bound).into_iter().map(BigInt::from).collect();
                tally.check(counts == direct, || first_difference(&label, &counts, &direct));
            }
        }
        let dc = delta_chain(&p);
        let Some(inv) = tally.attempt(name, g.invert_qt()) else {
            continue;
        };
        let ratio = crate::arith::monomial_ratio(&inv, &g);
        let reciprocal = ratio.as_ref().is_some_and(|r| {
            r.sign == if p.len() % 2 == 0 { 1 } else { -1 } && r.q_exp == 0 && r.t_exps == [dc.delta as i64]
        });
        tally.check(reciprocal == dc.holds, || {
            format!("{name}: delta-chain {} but reciprocity ratio {ratio:?} (delta = {})", dc.holds, dc.delta)
        });
        if dc.holds {
            if let Some(series) = tally.attempt(name, crate::quiver::centralizer_series(&rep)) {
                let sum: usize = series.totals()[..series.class].iter().sum();
                tally.check(sum == dc.delta, || format!("{name}: delta(P) = {} but sum of N_i = {sum}", dc.delta));
            }
        }
    }
}

fn enumeration(tally: &mut Tally, opts: &SuiteOptions) {
    let max_e = if opts.fast { 3 } else { 5 };
    for n in 1..=4 {
        for p in [2u64, 3] {
            let label = format!("sublattices of Z_{p}^{n}");
            let Some(expected) = tally.attempt(&label, series_expand(&zeta_free_local(n), max_e).and_then(|s| s.univariate_at(p, &[]))) else {
                continue;
            };
            for e in 0..=max_e {
                let total = BigInt::from(enum_sublattices(n, p, e).count());
                tally.check(total == expected[e as usize], || {
                    format!("{label}: {total} lattices of index p^{e}, formula gives {}", expected[e as usize])
                });
            }
        }
    }
    for (name, rp) in [("heisenberg", ""), ("d4", ""), ("star", "m=2 a=2")] {
        let label = format!("{name}[{rp}] as invariant sublattices at p=2");
        let Some(rep) = tally.attempt(&label, builtin_rep(name, &params(rp))).map(|b| b.rep) else {
            continue;
        };
        let ops = to_submodule_instance(&rep);
        let n = rep.total_rank();
        let (Some(a), Some(b)) = (
            tally.attempt(&label, count_invariant_sublattices(&ops, n, 2, 3, CountOptions::default().ceiling)),
            counts_for(tally, &label, &rep, 2, 3, Mode::Univariate, opts),
        ) else {
            continue;
        };
        tally.check(a.univariate(3) == b.univariate(3), || {
            format!("{label}: {:?} as submodules, {:?} as subrepresentations", a.univariate(3), b.univariate(3))
        });
    }
}

/// Every tuple with total index exponent at most `max_exp`.
fn all_tuples(ranks: &[usize], p: u64, max_exp: u32) -> Vec<LatticeTuple> {
    fn go(ranks: &[usize], p: u64, left: u32, prefix: &mut Vec<crate::lattice::LocalLattice>, out: &mut Vec<LatticeTuple>) {
        let Some((&n, rest)) = ranks.split_first() else {
            out.push(LatticeTuple::new(prefix.clone()).expect("one prime"));
            return;
        };
        for l in enum_sublattices_upto(n, p, left) {
            let used = l.index_exponent();
            prefix.push(l);
            go(rest, p, left - used, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(ranks, p, max_exp, &mut Vec::new(), &mut out);
    out
}

fn graded(b: &BuiltinRep) -> Result<Grading> {
    match &b.grading {
        Some(g) => Ok(g.clone()),
        None => cocentral_grading(&b.rep),
    }
}

fn invariants(tally: &mut Tally, opts: &SuiteOptions) {
    let max_exp = if opts.fast { 3 } else { 4 };
    let samples = if opts.fast { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for name in ["heisenberg", "graded_heisenberg", "m4"] {
        let Some(b) = tally.attempt(name, builtin_rep(name, &Params::default())) else {
            continue;
        };
        let Some(grading) = tally.attempt(name, graded(&b)) else {
            continue;
        };
        let Some(g) = tally.attempt(name, GradedRep::new(&b.rep, &grading)) else {
            continue;
        };
        let p = 2;
        let compare = |t: &LatticeTuple, tally: &mut Tally, origin: &str| {
            let (Some(s), Some(f)) = (
                tally.attempt(name, g.m_tilde_1_search(t)),
                tally.attempt(name, g.m_tilde_1_formula(t)),
            ) else {
                return;
            };
            tally.check(s == f, || format!("{name} ({origin}): m~1 by search {s}, by formula {f} for {t:?}"));
            let tau = g.tau(t);
            tally.check(s <= tau, || format!("{name} ({origin}): m~1 = {s} exceeds tau = {tau}"));
        };
        for t in all_tuples(&b.rep.ranks, p, max_exp) {
            compare(&t, tally, "enumerated");
            if tally.attempt(name, is_subrep(&b.rep, &t)) == Some(true) {
                if let Some((v, vd)) = tally.attempt(name, g.valuation_pair(&t)) {
                    tally.check(v == vd, || format!("{name}: subrepresentation with v(M) = {v} but v(M delta) = {vd}: {t:?}"));
                }
            }
        }
        for _ in 0..samples {
            let t = random_tuple(&mut rng, &b.rep.ranks, p, 6);
            compare(&t, tally, "random");
        }
    }
}

fn combinatorics(tally: &mut Tally) {
    for n in 0..=6usize {
        for k in 0..n.max(1) {
            for subset in (1..n).combinations(k) {
                let set: BTreeSet<usize> = subset.into_iter().collect();
                let label = format!("multinomial n={n} I={set:?}");
                if tally.attempt(&label, q_multinomial_descent(n, &set)).is_some() {
                    tally.checks += 1;
                }
            }
        }
        let label = format!("Coxeter identities n={n}");
        if let Some(ok) = tally.attempt(&label, coxeter_identity_check(n)) {
            tally.check(ok, || format!("{label} fail"));
        }
    }
    for a in 1..=5 {
        let label = format!("MacMahon a={a}");
        if let Some(ok) = tally.attempt(&label, macmahon_identity_check(a, 12)) {
            tally.check(ok, || format!("{label}: series differ up to degree 12"));
        }
    }
    let (w1, w2) = elliptic_parts();
    for (label, w, qe) in [("W1", &w1, 6), ("W2", &w2, 7)] {
        let Some(inv) = tally.attempt(label, w.invert_qt()) else {
            continue;
        };
        let ratio = crate::arith::monomial_ratio(&inv, w);
        let ok = ratio.as_ref().is_some_and(|r| r.sign == 1 && r.q_exp == qe && r.t_exps == [9]);
        tally.check(ok, || format!("{label}: inversion ratio {ratio:?}, expected q^{qe} t^9"));
    }
}

fn homogeneity(tally: &mut Tally) {
    let expect = |label: String, b: Result<BuiltinRep>, want: bool, tally: &mut Tally| {
        let Some(b) = tally.attempt(&label, b) else {
            return;
        };
        let Some(grading) = tally.attempt(&label, graded(&b)) else {
            return;
        };
        if let Some(report) = tally.attempt(&label, check_homogeneity(&b.rep, &grading, &b.rep.arrow_extensions())) {
            tally.check(report.homogeneous == want, || {
                format!("{label}: homogeneous = {}, expected {want} (witness {:?})", report.homogeneous, report.witness)
            });
        }
    };
    let builtin = |name: &str, p: &str| builtin_rep(name, &params(p));
    expect("graded_heisenberg".into(), builtin("graded_heisenberg", ""), true, tally);
    expect("graded_m4".into(), builtin("graded_m4", ""), true, tally);
    for d in 2..=4 {
        expect(format!("free_nilpotent c=2 d={d}"), builtin("free_nilpotent", &format!("c=2 d={d}")), true, tally);
    }
    for lambda in ["2,2", "3,3", "2,2,2", "2,1", "2,2,1", "3,3,1", "3,1,1"] {
        expect(format!("l_lambda {lambda}"), builtin("l_lambda", &format!("lambda={lambda}")), true, tally);
    }
    expect("fil4".into(), builtin("fil4", ""), false, tally);
    for (name, p) in poset_catalog() {
        let covers = p.covers().iter().map(|(x, y)| format!("{x}<{y}")).join(",");
        let b = builtin_rep("hasse", &Params::from_pairs([("n", p.len().to_string()), ("covers", covers)]));
        expect(format!("Hasse quiver of {name}"), b, delta_chain(&p).holds, tally);
    }
}
