//! Nilpotency class and the upper centralizer series.

use super::rep::Representation;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// `W_k` of the image chain: per vertex, a basis of the span of all images of length-`k` walks.
pub fn image_chain_step(rep: &Representation, w: &[IntMatrix]) -> Vec<IntMatrix> {
    (0..rep.num_vertices())
        .map(|h| {
            let mut acc = IntMatrix::zero(0, rep.ranks[h]);
            for k in rep.in_arrows(h) {
                let t = rep.quiver.arrows[k].tail;
                acc = acc.vconcat(&w[t].mul(&rep.maps[k]));
            }
            acc.row_basis()
        })
        .collect()
}

/// The chain `W_0 ⊇ W_1 ⊇ ...` until it vanishes or stabilises; the flag reports vanishing.
pub fn image_chain(rep: &Representation) -> (Vec<Vec<IntMatrix>>, bool) {
    let mut chain = vec![rep.ranks.iter().map(|&r| IntMatrix::identity(r)).collect::<Vec<_>>()];
    loop {
        let cur = chain.last().unwrap();
        let rank: usize = cur.iter().map(|m| m.rows()).sum();
        if rank == 0 {
            return (chain, true);
        }
        let next = image_chain_step(rep, cur);
        let next_rank: usize = next.iter().map(|m| m.rows()).sum();
        if next_rank == rank {
            return (chain, false);
        }
        chain.push(next);
    }
}

/// Least `c` such that every walk of length `c` evaluates to zero; `None` if not nilpotent.
pub fn nilpotency_class(rep: &Representation) -> Option<usize> {
    let (chain, vanished) = image_chain(rep);
    vanished.then(|| chain.len() - 1)
}

/// The series `0 = Z_0 ⊆ Z_1 ⊆ ... ⊆ Z_c` with per-vertex pure bases and corank table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerSeries {
    /// `levels[i][v]`: basis rows of `Z_{v,i}`.
    pub levels: Vec<Vec<IntMatrix>>,
    /// `coranks[v][i] = n_v - rank Z_{v,i}` for `i = 0..=c`.
    pub coranks: Vec<Vec<usize>>,
    pub class: usize,
}

impl CentralizerSeries {
    /// `N_i = sum_v N_{v,i}`.
    pub fn totals(&self) -> Vec<usize> {
        (0..=self.class)
            .map(|i| self.coranks.iter().map(|row| row[i]).sum())
            .collect()
    }

    /// `Z_{v,i}`.
    pub fn level(&self, i: usize, v: usize) -> &IntMatrix {
        &self.levels[i][v]
    }
}

pub fn centralizer_series(rep: &Representation) -> Result<CentralizerSeries> {
    let nv = rep.num_vertices();
    let n = rep.total_rank();
    let mut levels: Vec<Vec<IntMatrix>> =
        vec![rep.ranks.iter().map(|&r| IntMatrix::zero(0, r)).collect()];
    loop {
        let cur = levels.last().unwrap();
        if (0..nv).all(|v| cur[v].rows() == rep.ranks[v]) {
            break;
        }
        if levels.len() > n + 1 {
            return Err(Error::NotNilpotent);
        }
        // columns spanning the orthogonal complement of each Z_{h,i}
        let perp: Vec<IntMatrix> = cur
            .iter()
            .zip(&rep.ranks)
            .map(|(z, &r)| {
                if z.rows() == 0 {
                    IntMatrix::identity(r)
                } else {
                    z.right_kernel().transpose()
                }
            })
            .collect();
        let next: Vec<IntMatrix> = (0..nv)
            .map(|v| {
                let mut cond = IntMatrix::zero(rep.ranks[v], 0);
                for k in rep.out_arrows(v) {
                    let h = rep.quiver.arrows[k].head;
                    cond = cond.hconcat(&rep.maps[k].mul(&perp[h]));
                }
                if cond.cols() == 0 {
                    IntMatrix::identity(rep.ranks[v])
                } else {
                    cond.left_kernel().row_basis()
                }
            })
            .collect();
        let grew = (0..nv).any(|v| next[v].rows() > cur[v].rows());
        if !grew {
            return Err(Error::NotNilpotent);
        }
        levels.push(next);
    }
    let class = levels.len() - 1;
    let coranks = (0..nv)
        .map(|v| (0..=class).map(|i| rep.ranks[v] - levels[i][v].rows()).collect())
        .collect();
    Ok(CentralizerSeries {
        levels,
        coranks,
        class,
    })
}
