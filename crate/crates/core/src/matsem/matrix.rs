use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lang::{Letter, ParikhVector};

/// Square matrix over ℕ with sparse rows (`(column, value)` sorted by
/// column, no stored zeros).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(u32, BigUint)>>,
}

/// Dense scratch row reused across a product.
struct Accumulator {
    values: Vec<BigUint>,
    marked: Vec<bool>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn new(dim: usize) -> Self {
        Accumulator {
            values: vec![BigUint::zero(); dim],
            marked: vec![false; dim],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, col: u32, value: BigUint) {
        let c = col as usize;
        if !self.marked[c] {
            self.marked[c] = true;
            self.touched.push(col);
        }
        self.values[c] += value;
    }

    fn drain(&mut self) -> Vec<(u32, BigUint)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = std::mem::take(&mut self.values[c as usize]);
            self.marked[c as usize] = false;
            if !v.is_zero() {
                out.push((c, v));
            }
        }
        self.touched.clear();
        out
    }
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            rows: (0..dim).map(|i| vec![(i as u32, BigUint::one())]).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicate positions add up.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigUint)>,
    ) -> Result<Self> {
        let mut buckets: Vec<Vec<(u32, BigUint)>> = vec![Vec::new(); dim];
        for (i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside a {dim}x{dim} matrix"
                )));
            }
            buckets[i].push((j as u32, v));
        }
        let mut acc = Accumulator::new(dim);
        let rows = buckets
            .into_iter()
            .map(|row| {
                for (j, v) in row {
                    acc.add(j, v);
                }
                acc.drain()
            })
            .collect();
        Ok(SparseMatrix { dim, rows })
    }

    /// Builds from dense rows; convenient for small literals.
    pub fn from_dense(rows: &[&[u64]]) -> Result<Self> {
        let dim = rows.len();
        let mut t = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch("matrix is not square".into()));
            }
            for (j, &v) in r.iter().enumerate() {
                t.push((i, j, BigUint::from(v)));
            }
        }
        Self::from_triplets(dim, t)
    }

    pub(crate) fn from_rows(dim: usize, rows: Vec<Vec<(u32, BigUint)>>) -> Self {
        debug_assert_eq!(rows.len(), dim);
        SparseMatrix { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(u32, BigUint)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> BigUint {
        let row = &self.rows[i];
        match row.binary_search_by_key(&(j as u32), |(c, _)| *c) {
            Ok(k) => row[k].1.clone(),
            Err(_) => BigUint::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|(j, _)| *j as usize >= i))
    }

    /// Indices of rows with at least one nonzero entry.
    pub fn nonzero_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(i, _)| i)
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j as usize, v)))
    }

    fn check_dims(&self, other: &SparseMatrix) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{0}x{0} times {1}x{1}",
                self.dim, other.dim
            )))
        }
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_dims(other)?;
        let mut acc = Accumulator::new(self.dim);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for (k, a) in row {
                    for (j, b) in &other.rows[*k as usize] {
                        acc.add(*j, a * b);
                    }
                }
                acc.drain()
            })
            .collect();
        Ok(SparseMatrix {
            dim: self.dim,
            rows,
        })
    }

    /// `self^n` by binary exponentiation; `self^0` is the identity.
    pub fn pow(&self, n: &BigUint) -> SparseMatrix {
        let mut result = SparseMatrix::identity(self.dim);
        let bits = n.bits();
        for i in (0..bits).rev() {
            result = result.mul(&result).expect("square");
            if n.bit(i) {
                result = result.mul(self).expect("square");
            }
        }
        result
    }

    pub fn pow_u64(&self, n: u64) -> SparseMatrix {
        self.pow(&BigUint::from(n))
    }

    /// Row vector times matrix, with letters as indices.
    pub fn vec_mul(&self, v: &ParikhVector) -> ParikhVector {
        let mut acc = Accumulator::new(self.dim);
        for (l, c) in v.iter() {
            for (j, m) in &self.rows[l.index()] {
                acc.add(*j, c * m);
            }
        }
        acc.drain()
            .into_iter()
            .map(|(j, v)| (Letter::new(j as usize), v))
            .collect()
    }

    pub fn row_vector(&self, i: usize) -> ParikhVector {
        self.rows[i]
            .iter()
            .map(|(j, v)| (Letter::new(*j as usize), v.clone()))
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &SparseMatrix) -> SparseMatrix {
        let db = other.dim;
        let dim = self.dim * db;
        let mut rows = Vec::with_capacity(dim);
        for ra in &self.rows {
            for rb in &other.rows {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (ja, a) in ra {
                    for (jb, b) in rb {
                        row.push((*ja * db as u32 + *jb, a * b));
                    }
                }
                rows.push(row);
            }
        }
        SparseMatrix { dim, rows }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &SparseMatrix) -> SparseMatrix {
        let shift = self.dim as u32;
        let mut rows = self.rows.clone();
        rows.extend(
            other
                .rows
                .iter()
                .map(|r| r.iter().map(|(j, v)| (j + shift, v.clone())).collect()),
        );
        SparseMatrix {
            dim: self.dim + other.dim,
            rows,
        }
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> SparseMatrix {
        SparseMatrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap()
    }

    #[test]
    fn powers_of_n() {
        for k in 0..20u64 {
            let expected = SparseMatrix::from_dense(&[&[1, k], &[0, 1]]).unwrap();
            assert_eq!(n().pow_u64(k), expected);
        }
    }

    #[test]
    fn identity_is_neutral() {
        let a = SparseMatrix::from_dense(&[&[1, 2, 0], &[0, 3, 4], &[0, 0, 5]]).unwrap();
        let i = SparseMatrix::identity(3);
        assert_eq!(a.mul(&i).unwrap(), a);
        assert_eq!(i.mul(&a).unwrap(), a);
    }

    #[test]
    fn kronecker_square_cubed() {
        let n2 = n().kronecker(&n());
        let expected =
            SparseMatrix::from_dense(&[&[1, 1, 1, 1], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]])
                .unwrap();
        assert_eq!(n2, expected);
        // direct cube: ((N⊗N)·(N⊗N))·(N⊗N)
        let cube = n2.mul(&n2).unwrap().mul(&n2).unwrap();
        assert_eq!(cube.get(0, 3), BigUint::from(9u32));
        assert_eq!(n2.pow_u64(3), cube);
    }

    #[test]
    fn mismatched_dims_rejected() {
        assert!(n().mul(&SparseMatrix::identity(3)).is_err());
        assert!(SparseMatrix::from_triplets(2, [(2, 0, BigUint::one())]).is_err());
    }

    #[test]
    fn no_stored_zeros() {
        let m =
            SparseMatrix::from_triplets(2, [(0, 1, BigUint::zero()), (1, 1, 2u32.into())]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert!(SparseMatrix::zeros(4).is_zero());
        assert!(m.is_upper_triangular());
        let lower = SparseMatrix::from_dense(&[&[0, 0], &[1, 0]]).unwrap();
        assert!(!lower.is_upper_triangular());
    }
}
