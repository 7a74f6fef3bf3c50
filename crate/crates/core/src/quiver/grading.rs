//! Cocentral gradings and the homogeneity condition.

use super::algebra::algebra_closure;
use super::centralizer::{centralizer_series, CentralizerSeries};
use super::rep::Representation;
use crate::error::{Error, Result};
use crate::linalg::{complement, IntMatrix};
use num_traits::{Signed, ToPrimitive, Zero, One};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Per vertex, a unimodular basis change whose consecutive row blocks span the layers
/// `L_{v,1}, ..., L_{v,c}`, with `Z_{v,i}` spanned by the last `i` blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub class: usize,
    /// `layers[v][j-1] = n_{v,j}`.
    pub layers: Vec<Vec<usize>>,
    pub bases: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct GradingVertex {
    id: String,
    layers: Vec<usize>,
    basis: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct GradingFile {
    vertices: Vec<GradingVertex>,
}

/// First forbidden nonzero block: generator `k`, block `(tail, head)`, layers `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub k: usize,
    pub tail: usize,
    pub head: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub homogeneous: bool,
    pub witness: Option<Violation>,
}

pub fn cocentral_grading(rep: &Representation) -> Result<Grading> {
    let series = centralizer_series(rep)?;
    Ok(grading_from_series(rep, &series))
}

pub fn grading_from_series(rep: &Representation, series: &CentralizerSeries) -> Grading {
    let c = series.class;
    let mut layers = Vec::new();
    let mut bases = Vec::new();
    for v in 0..rep.num_vertices() {
        let n = rep.ranks[v];
        // blocks[j-1] spans L_{v,j} = complement of Z_{c-j} in Z_{c-j+1}
        let mut blocks = vec![IntMatrix::zero(0, n); c];
        let mut cur = IntMatrix::zero(0, n);
        for i in 1..=c {
            let block = complement(&cur, series.level(i, v));
            cur = cur.vconcat(&block);
            blocks[c - i] = block;
        }
        layers.push(blocks.iter().map(|b| b.rows()).collect());
        let basis = blocks
            .iter()
            .fold(IntMatrix::zero(0, n), |acc, b| acc.vconcat(b));
        bases.push(basis);
    }
    Grading {
        class: c,
        layers,
        bases,
    }
}

impl Grading {
    /// Layer (1-based) of every global coordinate after the basis change.
    pub fn coordinate_layers(&self) -> Vec<usize> {
        self.layers
            .iter()
            .flat_map(|ls| {
                ls.iter()
                    .enumerate()
                    .flat_map(|(j, &r)| std::iter::repeat_n(j + 1, r))
            })
            .collect()
    }

    /// Vertex of every global coordinate.
    pub fn coordinate_vertices(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(v, ls)| std::iter::repeat_n(v, ls.iter().sum()))
            .collect()
    }

    /// Block-diagonal basis change `B` and its inverse.
    pub fn basis_change(&self) -> (IntMatrix, IntMatrix) {
        let n: usize = self.bases.iter().map(|b| b.rows()).sum();
        let mut b = IntMatrix::zero(n, n);
        let mut binv = IntMatrix::zero(n, n);
        let mut off = 0;
        for m in &self.bases {
            b.set_block(off, off, m);
            binv.set_block(off, off, &m.inverse_unimodular().expect("unimodular basis"));
            off += m.rows();
        }
        (b, binv)
    }

    /// `B C B^{-1}`: the endomorphism `C` written in the graded basis.
    pub fn transform(&self, gens: &[IntMatrix]) -> Vec<IntMatrix> {
        let (b, binv) = self.basis_change();
        gens.iter().map(|g| b.mul(g).mul(&binv)).collect()
    }

    /// Checks shapes, unimodularity and that trailing blocks span the centralizer series.
    pub fn validate(&self, rep: &Representation, series: &CentralizerSeries) -> Result<()> {
        let mut problems = Vec::new();
        if self.class != series.class {
            problems.push(format!(
                "grading has {} layers but the nilpotency class is {}",
                self.class, series.class
            ));
        }
        if self.layers.len() != rep.num_vertices() || self.bases.len() != rep.num_vertices() {
            problems.push("grading does not cover every vertex".into());
            return Err(Error::Validation(problems));
        }
        for v in 0..rep.num_vertices() {
            let id = &rep.quiver.vertices[v];
            let n = rep.ranks[v];
            if self.layers[v].len() != self.class {
                problems.push(format!("vertex `{id}`: {} layer ranks given", self.layers[v].len()));
                continue;
            }
            if self.layers[v].iter().sum::<usize>() != n {
                problems.push(format!("vertex `{id}`: layer ranks do not sum to {n}"));
                continue;
            }
            let b = &self.bases[v];
            if b.rows() != n || b.cols() != n {
                problems.push(format!("vertex `{id}`: basis change is not {n}x{n}"));
                continue;
            }
            if !b.determinant().abs().is_one() {
                problems.push(format!("vertex `{id}`: basis change is not unimodular"));
                continue;
            }
            if self.class != series.class {
                continue;
            }
            for i in 1..=self.class {
                let start: usize = self.layers[v][..self.class - i].iter().sum();
                let trailing = b.submatrix(start..n, 0..n);
                let z = series.level(i, v);
                let same = trailing.rows() == z.rows()
                    && (0..z.rows()).all(|r| trailing.contains(z.row(r)))
                    && (0..trailing.rows()).all(|r| z.rows() > 0 && z.contains(trailing.row(r)));
                if !same {
                    problems.push(format!(
                        "vertex `{id}`: trailing {i} layer block(s) do not span Z_{i}"
                    ));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn from_json(text: &str, rep: &Representation) -> Result<Self> {
        let file: GradingFile = serde_json::from_str(text)?;
        let mut problems = Vec::new();
        let mut layers = vec![Vec::new(); rep.num_vertices()];
        let mut bases = vec![IntMatrix::zero(0, 0); rep.num_vertices()];
        let mut seen = vec![false; rep.num_vertices()];
        let mut class = None;
        for (k, entry) in file.vertices.iter().enumerate() {
            let Some(v) = rep.vertex_index(&entry.id) else {
                problems.push(format!("vertices[{k}].id: unknown vertex `{}`", entry.id));
                continue;
            };
            seen[v] = true;
            match class {
                None => class = Some(entry.layers.len()),
                Some(c) if c != entry.layers.len() => problems.push(format!(
                    "vertices[{k}].layers: {} layers, other vertices have {c}",
                    entry.layers.len()
                )),
                _ => {}
            }
            let n = rep.ranks[v];
            if entry.basis.len() != n || entry.basis.iter().any(|r| r.len() != n) {
                problems.push(format!("vertices[{k}].basis: expected a {n}x{n} matrix"));
                continue;
            }
            let flat: Vec<i64> = entry.basis.iter().flatten().copied().collect();
            layers[v] = entry.layers.clone();
            bases[v] = IntMatrix::from_i64(n, n, &flat);
        }
        for (v, s) in seen.iter().enumerate() {
            if !s {
                problems.push(format!("vertex `{}` missing from grading", rep.quiver.vertices[v]));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Grading {
            class: class.unwrap_or(0),
            layers,
            bases,
        })
    }

    pub fn to_json(&self, rep: &Representation) -> Result<String> {
        let file = GradingFile {
            vertices: (0..rep.num_vertices())
                .map(|v| GradingVertex {
                    id: rep.quiver.vertices[v].clone(),
                    layers: self.layers[v].clone(),
                    basis: self.bases[v]
                        .row_vecs()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_i64().expect("small entry")).collect())
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

/// Checks that `gens` lie in and generate the algebra spanned by the arrow extensions.
pub fn validate_generators(rep: &Representation, gens: &[IntMatrix]) -> Result<()> {
    let n = rep.total_rank();
    let e = algebra_closure(&rep.arrow_extensions(), n)?;
    for (k, g) in gens.iter().enumerate() {
        if !e.contains(g) {
            return Err(Error::InvalidGenerators(format!(
                "generator {k} does not lie in the algebra of the representation"
            )));
        }
    }
    let f = algebra_closure(gens, n)?;
    for (k, a) in rep.arrow_extensions().iter().enumerate() {
        if !f.contains(a) {
            return Err(Error::InvalidGenerators(format!(
                "generators do not generate the algebra: arrow `{}` is missing",
                rep.quiver.arrows[k].id
            )));
        }
    }
    Ok(())
}

/// Whether every generator, in the graded basis, maps layer `i` into layer `i+1` only.
pub fn check_homogeneity(
    rep: &Representation,
    grading: &Grading,
    gens: &[IntMatrix],
) -> Result<HomogeneityReport> {
    let series = centralizer_series(rep)?;
    grading.validate(rep, &series)?;
    validate_generators(rep, gens)?;
    let layer = grading.coordinate_layers();
    let vertex = grading.coordinate_vertices();
    let nv = rep.num_vertices();
    let c = grading.class;
    for (k, g) in grading.transform(gens).iter().enumerate() {
        // collect the nonzero blocks, then report the first forbidden one in (t, h, i, j) order
        let mut blocks = BTreeSet::new();
        for r in 0..g.rows() {
            for s in 0..g.cols() {
                if !g.get(r, s).is_zero() {
                    blocks.insert((vertex[r], vertex[s], layer[r], layer[s]));
                }
            }
        }
        debug_assert!(blocks.iter().all(|b| b.0 < nv && b.2 <= c));
        if let Some(&(t, h, i, j)) = blocks.iter().find(|(_, _, i, j)| *j != i + 1) {
            return Ok(HomogeneityReport {
                homogeneous: false,
                witness: Some(Violation {
                    k,
                    tail: t,
                    head: h,
                    from: i,
                    to: j,
                }),
            });
        }
    }
    Ok(HomogeneityReport {
        homogeneous: true,
        witness: None,
    })
}

/// Exponents by which conjugation with `delta = diag(p^{c-j})` scales the nonzero entries of each
/// graded generator: entry `(r, s)` picks up `(c - layer r) - (c - layer s)`.
pub fn delta_conjugation_shifts(grading: &Grading, gens: &[IntMatrix]) -> BTreeSet<i64> {
    let layer = grading.coordinate_layers();
    let c = grading.class as i64;
    let mut out = BTreeSet::new();
    for g in grading.transform(gens) {
        for r in 0..g.rows() {
            for s in 0..g.cols() {
                if !g.get(r, s).is_zero() {
                    out.insert((c - layer[r] as i64) - (c - layer[s] as i64));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::builtins::builtin_rep;

    #[test]
    fn heisenberg_grading_is_identity() {
        let rep = builtin_rep("heisenberg", &Default::default()).unwrap().rep;
        let g = cocentral_grading(&rep).unwrap();
        assert_eq!(g.layers, vec![vec![2, 1]]);
        assert_eq!(g.bases[0], IntMatrix::identity(3));
        let report = check_homogeneity(&rep, &g, &rep.arrow_extensions()).unwrap();
        assert!(report.homogeneous);
    }

    #[test]
    fn fil4_fails_with_witness() {
        let rep = builtin_rep("fil4", &Default::default()).unwrap().rep;
        let g = cocentral_grading(&rep).unwrap();
        assert_eq!(g.layers, vec![vec![2, 1, 1, 1]]);
        let report = check_homogeneity(&rep, &g, &rep.arrow_extensions()).unwrap();
        let w = report.witness.unwrap();
        assert_eq!((w.k, w.from, w.to), (1, 2, 4));
    }

    #[test]
    fn graded_fil4_depends_on_generators() {
        let rep = builtin_rep("graded_fil4", &Default::default()).unwrap().rep;
        let g = cocentral_grading(&rep).unwrap();
        let all = rep.arrow_extensions();
        assert!(!check_homogeneity(&rep, &g, &all).unwrap().homogeneous);
        let shared = all[..4].to_vec();
        assert!(check_homogeneity(&rep, &g, &shared).unwrap().homogeneous);
    }

    #[test]
    fn grading_json_round_trip() {
        let rep = builtin_rep("graded_heisenberg", &Default::default()).unwrap().rep;
        let g = cocentral_grading(&rep).unwrap();
        let back = Grading::from_json(&g.to_json(&rep).unwrap(), &rep).unwrap();
        assert_eq!(back, g);
        let series = centralizer_series(&rep).unwrap();
        back.validate(&rep, &series).unwrap();
    }

    #[test]
    fn generators_outside_the_algebra_are_rejected() {
        let rep = builtin_rep("heisenberg", &Default::default()).unwrap().rep;
        let g = cocentral_grading(&rep).unwrap();
        let stray = IntMatrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 0, 0, 0, 0]);
        assert!(matches!(
            check_homogeneity(&rep, &g, &[stray]),
            Err(Error::InvalidGenerators(_))
        ));
        let partial = vec![rep.arrow_extension(0)];
        assert!(check_homogeneity(&rep, &g, &partial).is_err());
    }
}
