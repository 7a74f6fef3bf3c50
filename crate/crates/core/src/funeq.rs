//! Functional equations under `q -> q^{-1}`: the symmetry predicted from ranks and the upper
//! centralizer series, and its exact verification on a rational function.

use crate::arith::{monomial_ratio, render, render_poly, IntPoly, MonomialRatio, RationalFn};
use crate::error::{invalid, Result};
use crate::lattice::Mode;
use crate::quiver::{centralizer_series, CentralizerSeries, Representation};
use serde::Serialize;

/// `W(q^{-1}, t^{-1}) = sign * q^q_exp * prod_v t_v^{t_exps[v]} * W(q, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryData {
    pub sign: i8,
    /// `sum_v binom(n_v, 2)`.
    pub q_exp: i64,
    /// Per vertex, `sum_{i < c} N_{v,i}`.
    pub t_exps: Vec<i64>,
}

impl SymmetryData {
    /// Exponent of `t` once every `t_v` is set to `t`.
    pub fn univariate_exp(&self) -> i64 {
        self.t_exps.iter().sum()
    }

    pub fn univariate(&self) -> SymmetryData {
        SymmetryData {
            sign: self.sign,
            q_exp: self.q_exp,
            t_exps: vec![self.univariate_exp()],
        }
    }

    fn ratio(&self, mode: Mode) -> MonomialRatio {
        MonomialRatio {
            sign: self.sign,
            q_exp: self.q_exp,
            t_exps: match mode {
                Mode::Univariate => vec![self.univariate_exp()],
                Mode::Multivariate => self.t_exps.clone(),
            },
        }
    }
}

/// Symmetry predicted for `rep`; fails if `rep` is not nilpotent.
pub fn predicted_symmetry(rep: &Representation) -> Result<SymmetryData> {
    Ok(predicted_from_series(rep, &centralizer_series(rep)?))
}

pub fn predicted_from_series(rep: &Representation, series: &CentralizerSeries) -> SymmetryData {
    let n: usize = rep.ranks.iter().sum();
    SymmetryData {
        sign: if n.is_multiple_of(2) { 1 } else { -1 },
        q_exp: rep.ranks.iter().map(|&r| (r * r.saturating_sub(1) / 2) as i64).sum(),
        t_exps: series
            .coranks
            .iter()
            .map(|row| row[..series.class].iter().sum::<usize>() as i64)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunEqReport {
    pub holds: bool,
    pub predicted: MonomialRatio,
    /// `invert(W) / W` when it is a signed monomial.
    pub observed: Option<MonomialRatio>,
    /// `invert(W) / (predicted * W)` in lowest monomial terms, when the check fails.
    pub residual: Option<String>,
}

/// Compares `invert_qt(W) / W` with the predicted monomial, exactly.
pub fn verify_funeq(w: &RationalFn, symmetry: &SymmetryData, mode: Mode) -> Result<FunEqReport> {
    let arity = match mode {
        Mode::Univariate => 1,
        Mode::Multivariate => symmetry.t_exps.len(),
    };
    if w.arity() != arity {
        return invalid(format!(
            "function has {} t-variables, the {} symmetry expects {arity}",
            w.arity(),
            match mode {
                Mode::Univariate => "univariate",
                Mode::Multivariate => "multivariate",
            }
        ));
    }
    let predicted = symmetry.ratio(mode);
    let inverted = w.invert_qt()?;
    let observed = monomial_ratio(&inverted, w);
    let holds = observed.as_ref() == Some(&predicted);
    let residual = (!holds).then(|| residual(&inverted, w, &predicted));
    Ok(FunEqReport {
        holds,
        predicted,
        observed,
        residual,
    })
}

fn residual(inverted: &RationalFn, w: &RationalFn, predicted: &MonomialRatio) -> String {
    let sig = w.sig();
    let mut exps = vec![predicted.q_exp];
    exps.extend(&predicted.t_exps);
    exps.resize(sig.nvars(), 0);
    let pos: Vec<u32> = exps.iter().map(|&d| d.max(0) as u32).collect();
    let neg: Vec<u32> = exps.iter().map(|&d| (-d).max(0) as u32).collect();
    let num = &(inverted.num() * w.den()) * &IntPoly::monomial(neg, 1);
    let den = &(inverted.den() * w.num()) * &IntPoly::monomial(pos, i64::from(predicted.sign));
    match RationalFn::new(sig.clone(), num.clone(), den.clone()) {
        Ok(r) => render(&r),
        Err(_) => {
            let names = sig.var_names();
            format!("({})/({})", render_poly(&num, &names), render_poly(&den, &names))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{builtin_formula, zeta_free_local};
    use crate::ppartition::{hasse_rep, stanley_gf, Poset};
    use crate::quiver::{builtin_rep, Params};

    fn rep(name: &str, params: &str) -> Representation {
        builtin_rep(name, &Params::parse(params).unwrap()).unwrap().rep
    }

    fn formula(name: &str, params: &str) -> RationalFn {
        builtin_formula(name, &Params::parse(params).unwrap()).unwrap()
    }

    fn check(f: &RationalFn, r: &Representation, mode: Mode) -> FunEqReport {
        verify_funeq(f, &predicted_symmetry(r).unwrap(), mode).unwrap()
    }

    #[test]
    fn predicted_examples() {
        let h = predicted_symmetry(&rep("heisenberg", "")).unwrap();
        assert_eq!((h.sign, h.q_exp, h.univariate_exp()), (-1, 3, 5));
        let g = predicted_symmetry(&rep("graded_heisenberg", "")).unwrap();
        assert_eq!(g, SymmetryData { sign: -1, q_exp: 1, t_exps: vec![4, 1] });
        let free = predicted_symmetry(&rep("free_nilpotent", "c=1 d=4")).unwrap();
        assert_eq!(free, SymmetryData { sign: 1, q_exp: 6, t_exps: vec![4] });
        let d4 = predicted_symmetry(&rep("d4", "")).unwrap();
        assert_eq!((d4.sign, d4.q_exp, d4.univariate_exp()), (-1, 1, 8));
        let k2 = predicted_symmetry(&rep("kron2", "")).unwrap();
        assert_eq!((k2.sign, k2.q_exp, k2.univariate_exp()), (1, 2, 6));
    }

    #[test]
    fn catalog_formulas_satisfy_predicted_symmetry() {
        let uni = Mode::Univariate;
        for n in 1..=5 {
            let r = rep("free_nilpotent", &format!("c=1 d={n}"));
            assert!(check(&zeta_free_local(n), &r, uni).holds, "free {n}");
        }
        assert!(check(&formula("heisenberg", ""), &rep("heisenberg", ""), uni).holds);
        let gh = formula("graded_heisenberg", "");
        let ghr = rep("graded_heisenberg", "");
        assert!(check(&gh, &ghr, Mode::Multivariate).holds);
        assert!(check(&gh.specialize_t(), &ghr, uni).holds);
        assert!(check(&formula("d4", ""), &rep("d4", ""), uni).holds);
        for branch in ["q_mod4=1", "q_mod4=3"] {
            assert!(check(&formula("kron2", branch), &rep("kron2", ""), uni).holds, "{branch}");
        }
        for a in 1..=7 {
            let p = format!("m=1 a={a}");
            assert!(check(&formula("star", &p), &rep("star", &p), uni).holds, "star {a}");
        }
        for a in 1..=4 {
            let p = format!("m=2 a={a}");
            assert!(check(&formula("star", &p), &rep("star", &p), uni).holds, "V2,{a}");
        }
        for m in 1..=3 {
            for a in 1..=4 {
                let p = format!("m={m} a={a}");
                let r = rep("dual_star", &p);
                assert!(check(&formula("dual_star", &p), &r, uni).holds, "dual {m},{a}");
            }
        }
        let ell = check(&formula("elliptic", "D=1"), &rep("elliptic", "D=1"), uni);
        assert!(ell.holds);
        assert_eq!(ell.observed.unwrap().t_exps, vec![9]);
    }

    #[test]
    fn d4_ratio() {
        let report = check(&formula("d4", ""), &rep("d4", ""), Mode::Univariate);
        let MonomialRatio { sign, q_exp, t_exps } = report.observed.unwrap();
        assert_eq!((sign, q_exp, t_exps), (-1, 1, vec![8]));
    }

    #[test]
    fn non_delta_chain_poset_fails() {
        let p = Poset::new(4, &[(1, 2), (1, 3), (3, 4)]).unwrap();
        let g = stanley_gf(&p).unwrap();
        let report = check(&g, &hasse_rep(&p), Mode::Univariate);
        assert!(!report.holds);
        assert!(report.residual.is_some());
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let gh = formula("graded_heisenberg", "");
        let s = predicted_symmetry(&rep("graded_heisenberg", "")).unwrap();
        assert!(verify_funeq(&gh, &s, Mode::Univariate).is_err());
    }
}
