use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

/// Integral representation: a free module of rank `ranks[i]` at each vertex and an integer
/// matrix per arrow. Vectors are rows and maps act by right multiplication, so the matrix of an
/// arrow has shape `rank(tail) x rank(head)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub quiver: Quiver,
    pub ranks: Vec<usize>,
    pub maps: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct ArrowEntry {
    id: String,
    tail: String,
    head: String,
    matrix: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RepFile {
    vertices: Vec<VertexEntry>,
    arrows: Vec<ArrowEntry>,
}

impl Representation {
    /// Builds a representation from `(id, rank)` vertices and `(id, tail, head, matrix)` arrows
    /// given by vertex index, checking every shape.
    pub fn new(
        vertices: Vec<(String, usize)>,
        arrows: Vec<(String, usize, usize, IntMatrix)>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        let mut seen = BTreeSet::new();
        for (id, _) in &vertices {
            if !seen.insert(id.clone()) {
                problems.push(format!("vertex id `{id}` is not unique"));
            }
        }
        let mut seen_arrows = BTreeSet::new();
        let ranks: Vec<usize> = vertices.iter().map(|(_, r)| *r).collect();
        let mut quiver_arrows = Vec::new();
        let mut maps = Vec::new();
        for (id, t, h, m) in arrows {
            if !seen_arrows.insert(id.clone()) {
                problems.push(format!("arrow id `{id}` is not unique"));
            }
            if t >= ranks.len() || h >= ranks.len() {
                problems.push(format!("arrow `{id}` references a missing vertex"));
                continue;
            }
            if m.rows() != ranks[t] || m.cols() != ranks[h] {
                problems.push(format!(
                    "arrow `{id}`: matrix is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[t],
                    ranks[h]
                ));
            }
            quiver_arrows.push(Arrow { id, tail: t, head: h });
            maps.push(m);
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Representation {
            quiver: Quiver {
                vertices: vertices.into_iter().map(|(id, _)| id).collect(),
                arrows: quiver_arrows,
            },
            ranks,
            maps,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RepFile = serde_json::from_str(text)?;
        let mut problems = Vec::new();
        let index = |id: &str| file.vertices.iter().position(|v| v.id == id);
        let mut arrows = Vec::new();
        for (k, a) in file.arrows.iter().enumerate() {
            let t = index(&a.tail);
            let h = index(&a.head);
            if t.is_none() {
                problems.push(format!("arrows[{k}].tail: unknown vertex `{}`", a.tail));
            }
            if h.is_none() {
                problems.push(format!("arrows[{k}].head: unknown vertex `{}`", a.head));
            }
            let (Some(t), Some(h)) = (t, h) else { continue };
            let (rt, rh) = (file.vertices[t].rank, file.vertices[h].rank);
            if a.matrix.len() != rt {
                problems.push(format!(
                    "arrows[{k}].matrix: {} rows, expected rank of `{}` = {rt}",
                    a.matrix.len(),
                    a.tail
                ));
                continue;
            }
            let mut ok = true;
            for (i, row) in a.matrix.iter().enumerate() {
                if row.len() != rh {
                    problems.push(format!(
                        "arrows[{k}].matrix[{i}]: {} entries, expected rank of `{}` = {rh}",
                        row.len(),
                        a.head
                    ));
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let entries: Vec<i64> = a.matrix.iter().flatten().copied().collect();
            arrows.push((a.id.clone(), t, h, IntMatrix::from_i64(rt, rh, &entries)));
        }
        let vertices: Vec<(String, usize)> =
            file.vertices.iter().map(|v| (v.id.clone(), v.rank)).collect();
        match Representation::new(vertices, arrows) {
            Ok(rep) if problems.is_empty() => Ok(rep),
            Ok(_) => Err(Error::Validation(problems)),
            Err(Error::Validation(more)) => {
                problems.extend(more);
                Err(Error::Validation(problems))
            }
            Err(e) => Err(e),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = RepFile {
            vertices: self
                .quiver
                .vertices
                .iter()
                .zip(&self.ranks)
                .map(|(id, r)| VertexEntry {
                    id: id.clone(),
                    rank: *r,
                })
                .collect(),
            arrows: self
                .quiver
                .arrows
                .iter()
                .zip(&self.maps)
                .map(|(a, m)| ArrowEntry {
                    id: a.id.clone(),
                    tail: self.quiver.vertices[a.tail].clone(),
                    head: self.quiver.vertices[a.head].clone(),
                    matrix: (0..m.rows())
                        .map(|i| {
                            m.row(i)
                                .iter()
                                .map(|x| x.to_i64().expect("entry fits in i64"))
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn num_vertices(&self) -> usize {
        self.ranks.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.maps.len()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Start of each vertex's coordinates in `Z^n`.
    pub fn offsets(&self) -> Vec<usize> {
        self.ranks
            .iter()
            .scan(0, |acc, r| {
                let o = *acc;
                *acc += r;
                Some(o)
            })
            .collect()
    }

    /// The endomorphism `e_phi` of `Z^n` that is `F_phi` on the (tail, head) block.
    pub fn arrow_extension(&self, k: usize) -> IntMatrix {
        let n = self.total_rank();
        let off = self.offsets();
        let a = &self.quiver.arrows[k];
        let mut e = IntMatrix::zero(n, n);
        e.set_block(off[a.tail], off[a.head], &self.maps[k]);
        e
    }

    pub fn arrow_extensions(&self) -> Vec<IntMatrix> {
        (0..self.num_arrows()).map(|k| self.arrow_extension(k)).collect()
    }

    /// The idempotent projecting onto vertex `v`.
    pub fn projection(&self, v: usize) -> IntMatrix {
        let n = self.total_rank();
        let off = self.offsets()[v];
        let mut e = IntMatrix::zero(n, n);
        for i in 0..self.ranks[v] {
            e.set(off + i, off + i, BigInt::from(1));
        }
        e
    }

    /// The matrix of a walk `a_1, ..., a_k` (each arrow's head is the next arrow's tail),
    /// i.e. `F_{a_1} ... F_{a_k}`; `None` if the arrows do not compose.
    pub fn walk_matrix(&self, walk: &[usize]) -> Option<IntMatrix> {
        let first = walk.first()?;
        let mut m = self.maps[*first].clone();
        for w in walk.windows(2) {
            if self.quiver.arrows[w[0]].head != self.quiver.arrows[w[1]].tail {
                return None;
            }
            m = m.mul(&self.maps[w[1]]);
        }
        Some(m)
    }

    /// Arrows leaving vertex `v`.
    pub fn out_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_arrows()).filter(move |&k| self.quiver.arrows[k].tail == v)
    }

    /// Arrows entering vertex `v`.
    pub fn in_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_arrows()).filter(move |&k| self.quiver.arrows[k].head == v)
    }

    /// All walks of `len >= 1` composable arrows.
    pub fn walks(&self, len: usize) -> Vec<Vec<usize>> {
        let mut walks: Vec<Vec<usize>> = (0..self.num_arrows()).map(|k| vec![k]).collect();
        for _ in 1..len {
            walks = walks
                .into_iter()
                .flat_map(|w| {
                    let h = self.quiver.arrows[*w.last().unwrap()].head;
                    self.out_arrows(h).map(move |k| {
                        let mut next = w.clone();
                        next.push(k);
                        next
                    })
                })
                .collect();
        }
        walks
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.quiver.vertices.iter().position(|v| v == id)
    }
}
