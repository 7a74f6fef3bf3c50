//! Example representations used throughout the crate.
//!
//! Every builder fixes a vertex order and writes arrow matrices in the row convention: row `i`
//! of `F_phi` holds the image of the `i`-th basis vector of the tail.

use super::centralizer::centralizer_series;
use super::grading::Grading;
use super::rep::Representation;
use crate::error::{invalid, Error, Result};
use crate::linalg::IntMatrix;
use std::collections::BTreeMap;

pub const BUILTIN_NAMES: &[&str] = &[
    "heisenberg",
    "graded_heisenberg",
    "fil4",
    "graded_fil4",
    "m4",
    "graded_m4",
    "free_nilpotent",
    "l_lambda",
    "star",
    "dual_star",
    "d4",
    "kron1",
    "kron2",
    "elliptic",
    "hasse",
];

/// `key=value` parameters, separated by whitespace or `;`. Values may contain commas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for token in text.split(|c: char| c.is_whitespace() || c == ';') {
            if token.is_empty() {
                continue;
            }
            let Some((k, v)) = token.split_once('=') else {
                return invalid(format!("parameter `{token}` is not of the form key=value"));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    pub fn from_pairs<K: Into<String>, V: ToString>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        Params(pairs.into_iter().map(|(k, v)| (k.into(), v.to_string())).collect())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Rejects keys outside `allowed`.
    pub fn expect_only(&self, family: &str, allowed: &[&str]) -> Result<()> {
        for k in self.0.keys() {
            if !allowed.contains(&k.as_str()) {
                return invalid(format!("`{family}` does not take parameter `{k}`"));
            }
        }
        Ok(())
    }

    pub fn int(&self, key: &str, default: Option<i64>) -> Result<i64> {
        match (self.get(key), default) {
            (Some(v), _) => v
                .parse()
                .map_err(|_| Error::InvalidInput(format!("parameter `{key}`: `{v}` is not an integer"))),
            (None, Some(d)) => Ok(d),
            (None, None) => invalid(format!("missing parameter `{key}`")),
        }
    }

    pub fn count(&self, key: &str, default: Option<usize>) -> Result<usize> {
        let v = self.int(key, default.map(|d| d as i64))?;
        usize::try_from(v)
            .map_err(|_| Error::InvalidInput(format!("parameter `{key}` must be non-negative")))
    }

    pub fn list(&self, key: &str) -> Result<Vec<i64>> {
        let Some(v) = self.get(key) else {
            return invalid(format!("missing parameter `{key}`"));
        };
        v.trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("parameter `{key}`: `{s}` is not an integer"))
                })
            })
            .collect()
    }

    /// A matrix written as JSON, e.g. `[[1,0],[0,2]]`.
    pub fn matrix(&self, key: &str) -> Result<IntMatrix> {
        let Some(v) = self.get(key) else {
            return invalid(format!("missing parameter `{key}`"));
        };
        let rows: Vec<Vec<i64>> = serde_json::from_str(v)
            .map_err(|e| Error::InvalidInput(format!("parameter `{key}`: {e}")))?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid(format!("parameter `{key}`: rows have different lengths"));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Ok(IntMatrix::from_i64(rows.len(), cols, &flat))
    }
}

#[derive(Clone, Debug)]
pub struct BuiltinRep {
    pub rep: Representation,
    pub grading: Option<Grading>,
}

type ArrowSpec = (String, usize, usize, IntMatrix);

fn vertices(ids: &[&str], ranks: &[usize]) -> Vec<(String, usize)> {
    ids.iter().map(|s| s.to_string()).zip(ranks.iter().copied()).collect()
}

fn arrow(id: &str, t: usize, h: usize, rows: usize, cols: usize, entries: &[i64]) -> ArrowSpec {
    (id.to_string(), t, h, IntMatrix::from_i64(rows, cols, entries))
}

/// Sparse `rows x cols` matrix from `(row, col, value)` triples.
fn sparse(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::zero(rows, cols);
    for &(r, c, v) in entries {
        m.set(r, c, v.into());
    }
    m
}

/// Grading that puts all of vertex `v` into layer `layer_of[v]`, if it is cocentral.
fn layered_grading(rep: &Representation, layer_of: &[usize]) -> Option<Grading> {
    let series = centralizer_series(rep).ok()?;
    let c = series.class;
    let layers = rep
        .ranks
        .iter()
        .zip(layer_of)
        .map(|(&r, &l)| (1..=c).map(|j| if j == l { r } else { 0 }).collect())
        .collect();
    let grading = Grading {
        class: c,
        layers,
        bases: rep.ranks.iter().map(|&r| IntMatrix::identity(r)).collect(),
    };
    grading.validate(rep, &series).ok().map(|_| grading)
}

pub fn heisenberg() -> Representation {
    Representation::new(
        vertices(&["L"], &[3]),
        vec![
            ("f1".into(), 0, 0, sparse(3, 3, &[(1, 2, -1)])),
            ("f2".into(), 0, 0, sparse(3, 3, &[(0, 2, 1)])),
        ],
    )
    .expect("valid builtin")
}

/// Two vertices `L1 = Z^2` and `L2 = Z` joined by the two generators' brackets.
pub fn graded_heisenberg() -> Representation {
    Representation::new(
        vertices(&["L1", "L2"], &[2, 1]),
        vec![arrow("f1", 0, 1, 2, 1, &[0, -1]), arrow("f2", 0, 1, 2, 1, &[1, 0])],
    )
    .expect("valid builtin")
}

fn filiform(with_extra: bool) -> Representation {
    // basis x1..x5; rows give y.ad(x) = [y, x]
    let ad1 = sparse(5, 5, &[(1, 2, -1), (2, 3, -1), (3, 4, -1)]);
    let mut ad2 = vec![(0, 2, 1)];
    if with_extra {
        ad2.push((2, 4, -1));
    }
    Representation::new(
        vertices(&["L"], &[5]),
        vec![
            ("ad_x1".into(), 0, 0, ad1),
            ("ad_x2".into(), 0, 0, sparse(5, 5, &ad2)),
        ],
    )
    .expect("valid builtin")
}

pub fn fil4() -> Representation {
    filiform(true)
}

pub fn m4() -> Representation {
    filiform(false)
}

fn graded_filiform(with_extra: bool) -> Representation {
    let mut arrows = vec![
        arrow("ad_x1_12", 0, 1, 2, 1, &[0, -1]),
        arrow("ad_x2_12", 0, 1, 2, 1, &[1, 0]),
        arrow("ad_x1_23", 1, 2, 1, 1, &[-1]),
        arrow("ad_x1_34", 2, 3, 1, 1, &[-1]),
    ];
    if with_extra {
        arrows.push(arrow("ad_x2_24", 1, 3, 1, 1, &[-1]));
    }
    Representation::new(vertices(&["L1", "L2", "L3", "L4"], &[2, 1, 1, 1]), arrows)
        .expect("valid builtin")
}

pub fn graded_m4() -> Representation {
    graded_filiform(false)
}

pub fn graded_fil4() -> Representation {
    graded_filiform(true)
}

/// Pairs `(i, k)` with `i < k`, in the order used for the basis `e_i ^ e_k` of the second layer.
pub fn wedge_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i + 1..d).map(move |k| (i, k))).collect()
}

/// Free nilpotent Lie ring of class `c <= 2` on `d` generators, one vertex per layer.
pub fn free_nilpotent(c: usize, d: usize) -> Result<Representation> {
    match c {
        1 => Representation::new(vertices(&["L1"], &[d]), vec![]),
        2 => {
            let pairs = wedge_pairs(d);
            let arrows = (0..d)
                .map(|k| {
                    let mut m = IntMatrix::zero(d, pairs.len());
                    for (col, &(i, j)) in pairs.iter().enumerate() {
                        // [x_i, x_k]: +e_{ik} when i < k, -e_{ki} when i > k
                        if j == k {
                            m.set(i, col, 1.into());
                        } else if i == k {
                            m.set(j, col, (-1).into());
                        }
                    }
                    (format!("ad_x{}", k + 1), 0, 1, m)
                })
                .collect();
            Representation::new(vertices(&["L1", "L2"], &[d, pairs.len()]), arrows)
        }
        _ => invalid(format!(
            "free nilpotent builder supports class 1 and 2 only, got {c}"
        )),
    }
}

/// Graded adjoint representation of `L_lambda` with `[x0, x_{i,j}] = x_{i,j+1}`.
///
/// Vertex `v_j` has basis `x_{i,j}` over the parts with `lambda_i >= j`, preceded by `x0` in `v_1`.
pub fn l_lambda(lambda: &[usize]) -> Result<Representation> {
    if lambda.is_empty() || lambda.contains(&0) {
        return invalid("partition parts must be positive");
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return invalid("partition must be non-increasing");
    }
    let c = lambda[0];
    let parts_at = |j: usize| -> Vec<usize> { (0..lambda.len()).filter(|&i| lambda[i] >= j).collect() };
    let mut ranks = Vec::new();
    for j in 1..=c {
        ranks.push(parts_at(j).len() + usize::from(j == 1));
    }
    let ids: Vec<String> = (1..=c).map(|j| format!("v{j}")).collect();
    // position of x_{i,j} within v_j
    let pos = |i: usize, j: usize| -> usize {
        parts_at(j).iter().position(|&k| k == i).unwrap() + usize::from(j == 1)
    };
    let mut arrows = Vec::new();
    for j in 1..c {
        let mut m = IntMatrix::zero(ranks[j - 1], ranks[j]);
        for i in parts_at(j + 1) {
            m.set(pos(i, j), pos(i, j + 1), (-1).into());
        }
        arrows.push((format!("ad_x0_{j}"), j - 1, j, m));
    }
    for i in parts_at(2) {
        let mut m = IntMatrix::zero(ranks[0], ranks[1]);
        m.set(0, pos(i, 2), 1.into());
        arrows.push((format!("ad_x{}_1", i + 1), 0, 1, m));
    }
    Representation::new(ids.into_iter().zip(ranks).collect(), arrows)
}

/// `V_{m,a}`: centre `v1` with identity arrows to `v2, ..., va`, every vertex `Z^m`.
pub fn star(m: usize, a: usize) -> Result<Representation> {
    star_with(m, a, false)
}

/// `V*_{m,a}`: identity arrows from `v2, ..., va` into the centre `v1`.
pub fn dual_star(m: usize, a: usize) -> Result<Representation> {
    star_with(m, a, true)
}

fn star_with(m: usize, a: usize, dual: bool) -> Result<Representation> {
    if a == 0 {
        return invalid("star needs at least one vertex");
    }
    let verts = (1..=a).map(|j| (format!("v{j}"), m)).collect();
    let arrows = (2..=a)
        .map(|j| {
            let (t, h) = if dual { (j - 1, 0) } else { (0, j - 1) };
            (format!("a{j}"), t, h, IntMatrix::identity(m))
        })
        .collect();
    Representation::new(verts, arrows)
}

/// Three rank-one leaves mapping into a rank-two centre by `(1,1)`, `(0,1)` and `(1,0)`.
pub fn d4() -> Representation {
    Representation::new(
        vertices(&["c", "x", "y", "z"], &[2, 1, 1, 1]),
        vec![
            arrow("f_x", 1, 0, 1, 2, &[1, 1]),
            arrow("f_y", 2, 0, 1, 2, &[0, 1]),
            arrow("f_z", 3, 0, 1, 2, &[1, 0]),
        ],
    )
    .expect("valid builtin")
}

/// One arrow `Z^{n1} -> Z^{n2}` given by `phi`.
pub fn kron1(phi: IntMatrix) -> Result<Representation> {
    Representation::new(
        vec![("v1".into(), phi.rows()), ("v2".into(), phi.cols())],
        vec![("phi".into(), 0, 1, phi)],
    )
}

/// `Z^2 => Z^2` by the identity and a quarter rotation.
pub fn kron2() -> Representation {
    Representation::new(
        vertices(&["v1", "v2"], &[2, 2]),
        vec![
            arrow("f1", 0, 1, 2, 2, &[1, 0, 0, 1]),
            arrow("f2", 0, 1, 2, 2, &[0, 1, -1, 0]),
        ],
    )
    .expect("valid builtin")
}

/// Three maps `Z^3 -> Z^3` whose determinant cuts out `Y^2 = X^3 - D X`.
pub fn elliptic(d: i64) -> Result<Representation> {
    if d == 0 {
        return invalid("elliptic example needs D != 0");
    }
    Representation::new(
        vertices(&["M1", "M2"], &[3, 3]),
        vec![
            arrow("f1", 0, 1, 3, 3, &[0, 0, d, 1, 0, 0, 0, 1, 0]),
            arrow("f2", 0, 1, 3, 3, &[1, 0, 0, 0, 0, 1, 0, 0, 0]),
            arrow("f3", 0, 1, 3, 3, &[0, 1, 0, 0, 0, 0, 1, 0, 0]),
        ],
    )
}

/// Thin representation of a poset on `1..=n`: rank one everywhere, an identity arrow `x -> y`
/// for every cover `x < y`.
pub fn hasse_rep(n: usize, covers: &[(usize, usize)]) -> Result<Representation> {
    let verts = (1..=n).map(|i| (i.to_string(), 1)).collect();
    let mut arrows = Vec::new();
    for &(x, y) in covers {
        if x == 0 || y == 0 || x > n || y > n {
            return invalid(format!("cover {x}<{y} outside 1..={n}"));
        }
        arrows.push((format!("{x}<{y}"), x - 1, y - 1, IntMatrix::identity(1)));
    }
    Representation::new(verts, arrows)
}

/// Parses `1<2,1<3,3<4`.
pub fn parse_covers(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let (x, y) = s
                .split_once('<')
                .ok_or_else(|| Error::InvalidInput(format!("cover `{s}` is not of the form x<y")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("cover `{s}`: bad element `{t}`")))
            };
            Ok((parse(x)?, parse(y)?))
        })
        .collect()
}

/// The quiver with `d` arrows `phi_{t,h,k}` between any two blocks of a decomposition
/// `Z^n = V_1 + ... + V_a`, with `f_{phi_{t,h,k}}` the `(t,h)` block of `c_k`.
pub fn graded_submodule_rep(generators: &[IntMatrix], block_ranks: &[usize]) -> Result<Representation> {
    let n: usize = block_ranks.iter().sum();
    let mut off = vec![0];
    for r in block_ranks {
        off.push(off.last().unwrap() + r);
    }
    let mut arrows = Vec::new();
    for (k, c) in generators.iter().enumerate() {
        if c.rows() != n || c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator {k} is {}x{}, expected {n}x{n}",
                c.rows(),
                c.cols()
            )));
        }
        for t in 0..block_ranks.len() {
            for h in 0..block_ranks.len() {
                let block = c.submatrix(off[t]..off[t + 1], off[h]..off[h + 1]);
                arrows.push((format!("c{}_{}_{}", k + 1, t + 1, h + 1), t, h, block));
            }
        }
    }
    let verts = block_ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (format!("V{}", i + 1), r))
        .collect();
    Representation::new(verts, arrows)
}

pub fn builtin_rep(name: &str, params: &Params) -> Result<BuiltinRep> {
    let plain = |rep: Representation| BuiltinRep { rep, grading: None };
    let layered = |rep: Representation| {
        let layers: Vec<usize> = (1..=rep.num_vertices()).collect();
        let grading = layered_grading(&rep, &layers);
        BuiltinRep { rep, grading }
    };
    let built = match name {
        "heisenberg" => {
            params.expect_only(name, &[])?;
            plain(heisenberg())
        }
        "graded_heisenberg" => {
            params.expect_only(name, &[])?;
            layered(graded_heisenberg())
        }
        "fil4" => {
            params.expect_only(name, &[])?;
            plain(fil4())
        }
        "m4" => {
            params.expect_only(name, &[])?;
            plain(m4())
        }
        "graded_m4" => {
            params.expect_only(name, &[])?;
            layered(graded_m4())
        }
        "graded_fil4" => {
            params.expect_only(name, &[])?;
            plain(graded_fil4())
        }
        "free_nilpotent" => {
            params.expect_only(name, &["c", "d"])?;
            layered(free_nilpotent(params.count("c", Some(2))?, params.count("d", None)?)?)
        }
        "l_lambda" => {
            params.expect_only(name, &["lambda"])?;
            let parts = params
                .list("lambda")?
                .into_iter()
                .map(|x| usize::try_from(x).map_err(|_| Error::InvalidInput("negative part".into())))
                .collect::<Result<Vec<_>>>()?;
            layered(l_lambda(&parts)?)
        }
        "star" | "dual_star" => {
            params.expect_only(name, &["m", "a"])?;
            let (m, a) = (params.count("m", Some(1))?, params.count("a", None)?);
            plain(if name == "star" { star(m, a)? } else { dual_star(m, a)? })
        }
        "d4" => {
            params.expect_only(name, &[])?;
            plain(d4())
        }
        "kron1" => {
            params.expect_only(name, &["phi"])?;
            plain(kron1(params.matrix("phi")?)?)
        }
        "kron2" => {
            params.expect_only(name, &[])?;
            plain(kron2())
        }
        "elliptic" => {
            params.expect_only(name, &["D"])?;
            plain(elliptic(params.int("D", Some(1))?)?)
        }
        "hasse" => {
            params.expect_only(name, &["covers", "n"])?;
            let covers = parse_covers(params.get("covers").unwrap_or(""))?;
            let top = covers.iter().map(|&(x, y)| x.max(y)).max().unwrap_or(0);
            plain(hasse_rep(params.count("n", Some(top))?, &covers)?)
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(built)
}

/// Vertex projections followed by arrow extensions: the sublattices of `Z^n` invariant under
/// all of them are exactly the subrepresentations.
pub fn to_submodule_instance(rep: &Representation) -> Vec<IntMatrix> {
    (0..rep.num_vertices())
        .map(|v| rep.projection(v))
        .chain(rep.arrow_extensions())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::centralizer::nilpotency_class;

    fn all_defaults() -> Vec<Representation> {
        let with = |n: &str, p: &str| builtin_rep(n, &Params::parse(p).unwrap()).unwrap().rep;
        vec![
            with("heisenberg", ""),
            with("graded_heisenberg", ""),
            with("fil4", ""),
            with("m4", ""),
            with("graded_m4", ""),
            with("graded_fil4", ""),
            with("free_nilpotent", "c=2 d=3"),
            with("l_lambda", "lambda=3,3,1"),
            with("star", "m=2 a=3"),
            with("dual_star", "m=1 a=4"),
            with("d4", ""),
            with("kron1", "phi=[[1,0],[0,2]]"),
            with("kron2", ""),
            with("elliptic", "D=1"),
            with("hasse", "covers=1<2,1<3,3<4"),
        ]
    }

    #[test]
    fn heisenberg_entries() {
        let rep = heisenberg();
        assert_eq!(rep.total_rank(), 3);
        assert_eq!(rep.maps[0].get(1, 2), &(-1).into());
        assert_eq!(rep.maps[1].get(0, 2), &1.into());
    }

    #[test]
    fn classes() {
        assert_eq!(nilpotency_class(&heisenberg()), Some(2));
        assert_eq!(nilpotency_class(&fil4()), Some(4));
        assert_eq!(nilpotency_class(&m4()), Some(4));
        assert_eq!(nilpotency_class(&l_lambda(&[3, 3, 1]).unwrap()), Some(3));
        assert_eq!(nilpotency_class(&star(1, 2).unwrap()), Some(2));
        assert_eq!(nilpotency_class(&elliptic(1).unwrap()), Some(2));
    }

    #[test]
    fn walks_of_length_class_vanish() {
        for rep in all_defaults() {
            let c = nilpotency_class(&rep).expect("nilpotent builtin");
            let vanish = |len: usize| {
                rep.walks(len)
                    .iter()
                    .all(|w| rep.walk_matrix(w).unwrap().is_zero())
            };
            assert!(vanish(c));
            if c >= 2 {
                assert!(!vanish(c - 1));
            }
        }
    }

    #[test]
    fn gradings_attached_to_layered_families() {
        for (n, p) in [("graded_heisenberg", ""), ("graded_m4", ""), ("free_nilpotent", "d=3"), ("l_lambda", "lambda=2,2")] {
            let b = builtin_rep(n, &Params::parse(p).unwrap()).unwrap();
            assert!(b.grading.is_some(), "{n}");
        }
    }

    #[test]
    fn l_lambda_shape() {
        let rep = l_lambda(&[3, 3, 1]).unwrap();
        assert_eq!(rep.ranks, vec![4, 2, 2]);
        // ad x0 on two layers and ad x_{1,1}, ad x_{2,1}
        assert_eq!(rep.num_arrows(), 4);
    }

    #[test]
    fn free_nilpotent_brackets() {
        let rep = free_nilpotent(2, 3).unwrap();
        assert_eq!(rep.ranks, vec![3, 3]);
        // [x1, x2] = e12 appears in ad x2 with +1 and in ad x1 with -1
        assert_eq!(rep.maps[1].get(0, 0), &1.into());
        assert_eq!(rep.maps[0].get(1, 0), &(-1).into());
        assert!(free_nilpotent(3, 2).is_err());
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(builtin_rep("nope", &Params::default()), Err(Error::UnknownName(_))));
        assert!(builtin_rep("elliptic", &Params::parse("D=0").unwrap()).is_err());
        assert!(builtin_rep("heisenberg", &Params::parse("a=1").unwrap()).is_err());
        assert!(Params::parse("a").is_err());
    }

    #[test]
    fn submodule_instance() {
        let one = Representation::new(vec![("v".into(), 2)], vec![]).unwrap();
        assert_eq!(to_submodule_instance(&one), vec![IntMatrix::identity(2)]);
        let s = to_submodule_instance(&star(1, 2).unwrap());
        assert_eq!(s.len(), 3);
        assert_eq!(s[2], IntMatrix::from_i64(2, 2, &[0, 1, 0, 0]));
        assert_eq!(to_submodule_instance(&heisenberg()).len(), 3);
    }

    #[test]
    fn graded_submodule_of_heisenberg() {
        let h = heisenberg();
        let rep = graded_submodule_rep(&h.arrow_extensions(), &[2, 1]).unwrap();
        assert_eq!(rep.num_arrows(), 8);
        // the only nonzero blocks go from the first block to the second
        let nonzero: Vec<_> = (0..rep.num_arrows())
            .filter(|&k| !rep.maps[k].is_zero())
            .map(|k| (rep.quiver.arrows[k].tail, rep.quiver.arrows[k].head))
            .collect();
        assert_eq!(nonzero, vec![(0, 1), (0, 1)]);
    }
}
