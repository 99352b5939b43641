//! Graded monomial bases and evaluation (Vandermonde) matrices.
//!
//! Real bases are ordered graded-lexicographically: by total degree, then by
//! descending exponent of the first variable, then the second, and so on. For
//! `d = 2, m = 2` this gives `1, x, y, x², xy, y²`.
//!
//! Complex bases (one complex variable) index the monomials `z̄^i z^j` by the pair
//! `(i, j)`, ordered by `i + j` and then by `i`, so the columns read
//! `1, Z, Z̄, Z², ZZ̄, Z̄², …`.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Exponent vector of a real monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|i|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Evaluates `t^i` by iterated multiplication.
    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.0.len());
        let mut acc = 1.0;
        for (&e, &x) in self.0.iter().zip(point) {
            for _ in 0..e {
                acc *= x;
            }
        }
        acc
    }
}

/// `N_{m,d} = C(m + d, d)`, the dimension of real polynomials of degree ≤ m in d variables.
pub fn num_monomials(d: usize, m: usize) -> usize {
    // C(m+d, d) computed incrementally; each partial product is itself a binomial.
    let mut acc: usize = 1;
    for k in 1..=d {
        acc = acc * (m + k) / k;
    }
    acc
}

/// Ordered basis of `R_{m,d}[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBasis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
}

/// Enumerates the graded-lex basis of real polynomials of total degree ≤ `m` in `d` variables.
pub fn enumerate_real(d: usize, m: usize) -> Result<RealBasis> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut indices = Vec::with_capacity(num_monomials(d, m));
    let mut scratch = vec![0u32; d];
    for deg in 0..=m {
        compositions(deg as u32, 0, &mut scratch, &mut indices);
    }
    Ok(RealBasis {
        dim: d,
        degree: m,
        indices,
    })
}

// Compositions of `rest` into scratch[pos..], first part largest first.
fn compositions(rest: u32, pos: usize, scratch: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = rest;
        out.push(MultiIndex(scratch.to_vec()));
        return;
    }
    for e in (0..=rest).rev() {
        scratch[pos] = e;
        compositions(rest - e, pos + 1, scratch, out);
    }
    scratch[pos] = 0;
}

impl RealBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|i| i == index)
    }

    /// The sub-basis of degree ≤ `m`, which is a prefix of this one.
    pub fn truncate(&self, m: usize) -> RealBasis {
        let m = m.min(self.degree);
        RealBasis {
            dim: self.dim,
            degree: m,
            indices: self.indices[..num_monomials(self.dim, m)].to_vec(),
        }
    }

    /// Evaluates every basis monomial at `point`, reusing per-coordinate power tables.
    pub fn eval_into(&self, point: &[f64], out: &mut [f64]) {
        debug_assert_eq!(point.len(), self.dim);
        let m = self.degree;
        let mut powers = vec![1.0; self.dim * (m + 1)];
        for (c, &x) in point.iter().enumerate() {
            let row = &mut powers[c * (m + 1)..(c + 1) * (m + 1)];
            for p in 1..=m {
                row[p] = row[p - 1] * x;
            }
        }
        for (slot, idx) in out.iter_mut().zip(&self.indices) {
            let mut acc = 1.0;
            for (c, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    acc *= powers[c * (m + 1) + e as usize];
                }
            }
            *slot = acc;
        }
    }
}

/// Evaluation matrix: rows are basis monomials, columns are nodes.
pub fn vandermonde<'a, I>(basis: &RealBasis, nodes: I) -> Result<DMatrix<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut columns: Vec<f64> = Vec::new();
    let mut ncols = 0;
    let mut col = vec![0.0; basis.len()];
    for node in nodes {
        if node.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: node.len(),
            });
        }
        basis.eval_into(node, &mut col);
        columns.extend_from_slice(&col);
        ncols += 1;
    }
    Ok(DMatrix::from_vec(basis.len(), ncols, columns))
}

/// Ordered pairs `(i, j)` with `i + j ≤ n`, labelling the monomials `z̄^i z^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexPairBasis {
    degree: usize,
    pairs: Vec<(usize, usize)>,
}

pub fn enumerate_complex(n: usize) -> ComplexPairBasis {
    let mut pairs = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for deg in 0..=n {
        for i in 0..=deg {
            pairs.push((i, deg - i));
        }
    }
    ComplexPairBasis { degree: n, pairs }
}

impl ComplexPairBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Position of `z̄^i z^j`, if within degree.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let deg = i + j;
        (deg <= self.degree).then(|| pair_index(i, j))
    }
}

/// Position of `(i, j)` in any complex pair basis of sufficient degree.
pub fn pair_index(i: usize, j: usize) -> usize {
    let deg = i + j;
    deg * (deg + 1) / 2 + i
}

/// Number of pairs with `i + j ≤ n`.
pub fn num_pairs(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(b: &RealBasis) -> Vec<Vec<u32>> {
        b.indices().iter().map(|i| i.exponents().to_vec()).collect()
    }

    // Independent oracle: all exponent tuples in the box with sum ≤ m.
    fn brute_count(d: usize, m: usize) -> usize {
        let mut count = 0;
        let total = (m + 1).pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let mut s = 0;
            for _ in 0..d {
                s += c % (m + 1);
                c /= m + 1;
            }
            if s <= m {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn univariate_basis() {
        let b = enumerate_real(1, 3).unwrap();
        assert_eq!(exps(&b), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn bivariate_graded_lex() {
        let b = enumerate_real(2, 2).unwrap();
        assert_eq!(
            exps(&b),
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn trivariate_size_matches_enumeration() {
        assert_eq!(brute_count(3, 4), 35);
        assert_eq!(enumerate_real(3, 4).unwrap().len(), 35);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(enumerate_real(0, 2), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn sizes_and_prefixes() {
        for d in 1..=6 {
            for m in 0..=10 {
                let b = enumerate_real(d, m).unwrap();
                assert_eq!(b.len(), num_monomials(d, m));
                assert_eq!(b.len(), brute_count(d, m), "d={d} m={m}");
                if m > 0 {
                    assert_eq!(b.truncate(m - 1), enumerate_real(d, m - 1).unwrap());
                }
                let mut sorted = b.indices().to_vec();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), b.len());
            }
        }
    }

    #[test]
    fn complex_pairs() {
        assert_eq!(enumerate_complex(1).pairs(), &[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(enumerate_complex(2).len(), 6);
        let brute = (0..=4)
            .flat_map(|i| (0..=4).map(move |j| (i, j)))
            .filter(|(i, j)| i + j <= 4)
            .count();
        assert_eq!(brute, 15);
        let b4 = enumerate_complex(4);
        assert_eq!(b4.len(), 15);
        for (k, &(i, j)) in b4.pairs().iter().enumerate() {
            assert_eq!(b4.index_of(i, j), Some(k));
        }
        assert_eq!(b4.index_of(3, 2), None);
    }

    #[test]
    fn vandermonde_columns() {
        let b = enumerate_real(1, 2).unwrap();
        let v = vandermonde(&b, [&[2.0][..]]).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 2.0, 4.0]);

        let b = enumerate_real(2, 1).unwrap();
        let v = vandermonde(&b, [&[0.0, 0.0][..]]).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0]);

        let err = vandermonde(&b, [&[1.0][..]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn eval_is_exact_on_integers() {
        let b = enumerate_real(3, 5).unwrap();
        let p = [2.0, -3.0, 5.0];
        let mut out = vec![0.0; b.len()];
        b.eval_into(&p, &mut out);
        for (idx, v) in b.indices().iter().zip(&out) {
            let e = idx.exponents();
            let exact = 2i64.pow(e[0]) * (-3i64).pow(e[1]) * 5i64.pow(e[2]);
            assert_eq!(*v, exact as f64);
            assert_eq!(idx.eval(&p), exact as f64);
        }
    }
}
