//! Exact arithmetic over Q and simple extensions, and the linear algebra
//! every other module is built on.

mod echelon;
mod field;
mod mat;
mod poly;
pub mod sparse;

pub use echelon::Echelon;
pub use field::{format_rational, parse_rational, rational_sqrt, Field, FieldSpec, Rational, Scalar};
pub use mat::Mat;
pub use poly::{rational_roots, roots_in_field, Poly, RootSplit};
pub use sparse::SparseVec;

/// Reduced row echelon form with rank and pivot columns.
///
/// Pivots are chosen leftmost-first; zero rows are appended so the result has
/// the shape of the input.
pub fn rref(m: &Mat) -> (Mat, usize, Vec<usize>) {
    let mut ech = Echelon::new(m.field(), m.cols());
    for row in m.row_data() {
        ech.insert(row);
    }
    let rank = ech.rank();
    let pivots = ech.pivot_columns();
    let mut rows = ech.basis();
    rows.resize(m.rows(), Vec::new());
    (Mat::from_rows(m.field(), m.cols(), rows), rank, pivots)
}

/// Basis of the right null space, one vector per free column (in order).
pub fn kernel_basis(m: &Mat) -> Vec<SparseVec> {
    let (r, rank, pivots) = rref(m);
    kernel_from_rref(m.field(), &r.row_data()[..rank], &pivots, m.cols())
}

pub(crate) fn kernel_from_rref(
    f: &Field,
    rows: &[SparseVec],
    pivots: &[usize],
    cols: usize,
) -> Vec<SparseVec> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    // column -> list of (pivot col, entry) for rows with a nonzero there
    let mut by_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
    for (row, &p) in rows.iter().zip(pivots) {
        for (j, x) in row {
            if *j != p {
                by_col[*j].push((p, x.neg()));
            }
        }
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|c| {
            let mut v: SparseVec = std::mem::take(&mut by_col[c]);
            v.push((c, f.one()));
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}

/// Monic minimal polynomial, by finding the first linear dependency among
/// `I, M, M^2, ...`.
pub fn min_poly_of(m: &Mat) -> Poly {
    assert!(m.is_square(), "minimal polynomial of a non-square matrix");
    let f = m.field();
    let n = m.rows();
    let mut ech = Echelon::tracked(f, n * n);
    let mut power = Mat::identity(f, n);
    for k in 0..=n {
        let v = power.vectorize();
        if let Some(combo) = ech.express(&v) {
            // M^k = sum c_j M^j
            let mut coeffs = vec![f.zero(); k + 1];
            for (j, c) in combo {
                coeffs[j] = c.neg();
            }
            coeffs[k] = f.one();
            return Poly::new(coeffs);
        }
        ech.insert_tracked(&v, k);
        power = power.mul(m);
    }
    unreachable!("Cayley-Hamilton bounds the degree by the dimension")
}

/// Exact inverse of a square matrix, `None` when singular.
pub fn inverse(m: &Mat) -> Option<Mat> {
    assert!(m.is_square());
    let n = m.rows();
    let f = m.field();
    if n == 0 {
        return Some(Mat::zeros(f, 0, 0));
    }
    // rref of [M | I]
    let aug: Vec<SparseVec> = m
        .row_data()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.push((n + i, f.one()));
            row
        })
        .collect();
    let (r, rank, pivots) = rref(&Mat::from_rows(f, 2 * n, aug));
    if rank < n || pivots[n - 1] >= n {
        return None;
    }
    let rows = r
        .row_data()
        .iter()
        .map(|row| {
            row.iter()
                .filter(|(j, _)| *j >= n)
                .map(|(j, x)| (j - n, x.clone()))
                .collect()
        })
        .collect();
    Some(Mat::from_rows(f, n, rows))
}

/// Reduced basis of `span(a) + span(b)`.
pub fn span_union(f: &Field, width: usize, a: &[SparseVec], b: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new(f, width);
    for v in a.iter().chain(b) {
        ech.insert(v);
    }
    ech.basis()
}
