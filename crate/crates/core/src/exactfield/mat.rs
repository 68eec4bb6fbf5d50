//! Row-sparse exact matrices.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, FieldSpec, Rational, Scalar};
use super::sparse::{self, SparseVec};
use crate::par;

/// A `rows x cols` matrix over a [`Field`], stored as sorted sparse rows.
#[derive(Clone)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Mat) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Mat {}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.field.format(&self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, field.one())]).collect(),
        }
    }

    pub fn from_rows(field: &Field, cols: usize, data: Vec<SparseVec>) -> Mat {
        debug_assert!(data.iter().all(|r| r.iter().all(|(j, _)| *j < cols)));
        Mat {
            field: field.clone(),
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn from_dense(field: &Field, rows: Vec<Vec<Scalar>>) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().map(|r| sparse::from_dense(r)).collect();
        Mat::from_rows(field, cols, data)
    }

    pub fn from_rationals(field: &Field, rows: &[Vec<Rational>]) -> Mat {
        Mat::from_dense(
            field,
            rows.iter()
                .map(|r| r.iter().map(|q| field.from_rational(q.clone())).collect())
                .collect(),
        )
    }

    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Mat {
        Mat::from_dense(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
                .collect(),
        )
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        field: &Field,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Mat {
        let mut acc: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); rows];
        for (i, j, v) in entries {
            let slot = acc[i].entry(j).or_insert_with(|| field.zero());
            slot.add_assign(&v);
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Mat::from_rows(field, cols, data)
    }

    /// Rebuilds a `rows x cols` matrix from its row-major vectorization.
    pub fn from_vector(field: &Field, rows: usize, cols: usize, v: &SparseVec) -> Mat {
        let mut data = vec![Vec::new(); rows];
        for (idx, x) in v {
            data[idx / cols].push((idx % cols, x.clone()));
        }
        Mat::from_rows(field, cols, data)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_data(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        sparse::get(&self.data[i], j)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self
                .data
                .iter()
                .enumerate()
                .all(|(i, r)| r.len() == 1 && r[0].0 == i && r[0].1.is_one())
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        self.data
            .iter()
            .map(|r| sparse::to_dense(&self.field, r, self.cols))
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                data[*j].push((i, v.clone()));
            }
        }
        Mat::from_rows(&self.field, self.rows, data)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| sparse::add(f, a, b))
            .collect();
        Mat::from_rows(f, self.cols, data)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let minus = f.from_int(-1);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| sparse::axpy(f, a, &minus, b))
            .collect();
        Mat::from_rows(f, self.cols, data)
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        let f = &self.field;
        let data = self.data.iter().map(|r| sparse::scale(f, r, s)).collect();
        Mat::from_rows(f, self.cols, data)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &Scalar, other: &Mat) -> Mat {
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| sparse::axpy(f, a, s, b))
            .collect();
        Mat::from_rows(f, self.cols, data)
    }

    /// Matrix product; rows are computed in parallel when that feature is on.
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let f: &FieldSpec = &self.field;
        let data = par::map(&self.data, |row| {
            let terms: Vec<(Scalar, &SparseVec)> = row
                .iter()
                .map(|(k, a)| (a.clone(), &other.data[*k]))
                .collect();
            sparse::combine(f, &Vec::new(), &terms)
        });
        Mat::from_rows(&self.field, other.cols, data)
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let f = &self.field;
        let mut out = Vec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = f.zero();
            let (mut a, mut b) = (0, 0);
            while a < row.len() && b < v.len() {
                match row[a].0.cmp(&v[b].0) {
                    Ordering::Less => a += 1,
                    Ordering::Greater => b += 1,
                    Ordering::Equal => {
                        f.mul_add_assign(&mut acc, &row[a].1, &v[b].1);
                        a += 1;
                        b += 1;
                    }
                }
            }
            if !acc.is_zero() {
                out.push((i, acc));
            }
        }
        out
    }

    /// Kronecker product, first factor most significant.
    pub fn kron(&self, other: &Mat) -> Mat {
        let f = &self.field;
        let mut data = Vec::with_capacity(self.rows * other.rows);
        for arow in &self.data {
            for brow in &other.data {
                let mut row = Vec::with_capacity(arow.len() * brow.len());
                for (ja, a) in arow {
                    for (jb, b) in brow {
                        row.push((ja * other.cols + jb, f.mul(a, b)));
                    }
                }
                data.push(row);
            }
        }
        Mat::from_rows(f, self.cols * other.cols, data)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut data = self.data.clone();
        for r in &other.data {
            data.push(r.iter().map(|(j, v)| (j + self.cols, v.clone())).collect());
        }
        Mat::from_rows(&self.field, self.cols + other.cols, data)
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = self.field.zero();
        for (i, row) in self.data.iter().enumerate() {
            if let Some(v) = sparse::get(row, i) {
                acc.add_assign(v);
            }
        }
        acc
    }

    /// Row-major flattening into a vector of length `rows * cols`.
    pub fn vectorize(&self) -> SparseVec {
        let mut out = Vec::with_capacity(self.nnz());
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out.push((i * self.cols + j, v.clone()));
            }
        }
        out
    }

    pub fn commutes_with(&self, other: &Mat) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn rank(&self) -> usize {
        super::rref(self).1
    }

    /// Restriction to the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut colmap = vec![usize::MAX; self.cols];
        for (k, &c) in cols.iter().enumerate() {
            colmap[c] = k;
        }
        let data = rows
            .iter()
            .map(|&r| {
                let mut row: SparseVec = self.data[r]
                    .iter()
                    .filter(|(j, _)| colmap[*j] != usize::MAX)
                    .map(|(j, v)| (colmap[*j], v.clone()))
                    .collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        Mat::from_rows(&self.field, cols.len(), data)
    }

    /// Row-major lexicographic comparison of entries.
    pub fn lex_cmp(&self, other: &Mat) -> Ordering {
        let a = self.to_dense();
        let b = other.to_dense();
        a.cmp(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;

    #[test]
    fn product_transpose_and_kron() {
        let f = FieldSpec::rationals();
        let a = Mat::from_ints(&f, &[vec![1, 2], vec![0, 1]]);
        let b = Mat::from_ints(&f, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), Mat::from_ints(&f, &[vec![2, 1], vec![1, 0]]));
        assert_eq!(a.transpose(), Mat::from_ints(&f, &[vec![1, 0], vec![2, 1]]));
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 1), f.from_int(1));
        assert_eq!(k.get(1, 2), f.from_int(2));
        assert_eq!(k.trace(), f.from_int(0));
        let v = a.vectorize();
        assert_eq!(Mat::from_vector(&f, 2, 2, &v), a);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let f = FieldSpec::rationals();
        let m = Mat::from_triplets(
            &f,
            2,
            2,
            vec![
                (0, 0, f.from_int(1)),
                (0, 0, f.from_int(2)),
                (1, 1, f.from_int(1)),
                (1, 1, f.from_int(-1)),
            ],
        );
        assert_eq!(m, Mat::from_ints(&f, &[vec![3, 0], vec![0, 0]]));
    }
}
