use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use num_bigint::BigInt;

/// The Z-algebra (without unit) generated by a list of nilpotent `n x n` matrices, stored as a
/// Hermite basis of its span inside `Z^{n^2}`.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    n: usize,
    generators: Vec<IntMatrix>,
    span: IntMatrix,
}

fn flatten(m: &IntMatrix) -> Vec<BigInt> {
    m.entries().cloned().collect()
}

fn unflatten(v: &[BigInt], n: usize) -> IntMatrix {
    IntMatrix::from_rows(v.chunks(n).map(|r| r.to_vec()).collect(), n)
}

/// Spans products of the generators of every length until they vanish.
pub fn algebra_closure(generators: &[IntMatrix], n: usize) -> Result<EndAlgebra> {
    for (k, g) in generators.iter().enumerate() {
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator {k} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_nilpotent() {
            return Err(Error::InvalidGenerators(format!("generator {k} is not nilpotent")));
        }
    }
    let width = n * n;
    let mut layer = IntMatrix::from_rows(generators.iter().map(flatten).collect(), width).row_basis();
    let mut total = layer.clone();
    let mut depth = 1;
    while layer.rows() > 0 {
        if depth > n + 1 {
            return Err(Error::InvalidGenerators(
                "generated algebra is not nilpotent".into(),
            ));
        }
        let mut products = Vec::new();
        for i in 0..layer.rows() {
            let b = unflatten(layer.row(i), n);
            for g in generators {
                products.push(flatten(&b.mul(g)));
            }
        }
        layer = IntMatrix::from_rows(products, width).row_basis();
        total = total.vconcat(&layer).row_basis();
        depth += 1;
    }
    Ok(EndAlgebra {
        n,
        generators: generators.to_vec(),
        span: total,
    })
}

impl EndAlgebra {
    pub fn dim(&self) -> usize {
        self.span.rows()
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// A Z-basis of the algebra.
    pub fn basis(&self) -> Vec<IntMatrix> {
        (0..self.span.rows())
            .map(|i| unflatten(self.span.row(i), self.n))
            .collect()
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        if m.rows() != self.n || m.cols() != self.n {
            return false;
        }
        if m.is_zero() {
            return true;
        }
        self.span.rows() > 0 && self.span.contains(&flatten(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_block() {
        let j = IntMatrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]);
        let e = algebra_closure(std::slice::from_ref(&j), 3).unwrap();
        assert_eq!(e.dim(), 2);
        assert!(e.contains(&j.mul(&j)));
        assert!(!e.contains(&IntMatrix::identity(3)));
    }

    #[test]
    fn empty_and_rejections() {
        let e = algebra_closure(&[], 2).unwrap();
        assert_eq!(e.dim(), 0);
        assert!(e.contains(&IntMatrix::zero(2, 2)));
        let x = IntMatrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let y = IntMatrix::from_i64(2, 2, &[0, 0, 1, 0]);
        assert!(algebra_closure(&[x, y], 2).is_err());
        assert!(algebra_closure(&[IntMatrix::identity(2)], 2).is_err());
    }
}
