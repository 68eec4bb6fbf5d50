//! Incremental reduced row echelon form over sparse vectors.
//!
//! Rows are kept fully reduced: every pivot column is zero in all other rows,
//! so a vector is reduced in a single pass using its own coefficients at the
//! pivot columns. Optionally each row remembers the combination of inserted
//! vectors it came from, which is how witness words are tracked.

use std::collections::HashMap;

use super::field::{Field, Scalar};
use super::sparse::{self, SparseVec};

#[derive(Clone)]
pub struct Echelon {
    field: Field,
    width: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_row: HashMap<usize, usize>,
    combos: Option<Vec<SparseVec>>,
}

impl Echelon {
    pub fn new(field: &Field, width: usize) -> Echelon {
        Echelon {
            field: field.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: HashMap::new(),
            combos: None,
        }
    }

    /// Like [`Echelon::new`], additionally tracking source combinations.
    pub fn tracked(field: &Field, width: usize) -> Echelon {
        let mut e = Echelon::new(field, width);
        e.combos = Some(Vec::new());
        e
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `(coefficient per hit row, residual)`
    fn split(&self, v: &SparseVec) -> (Vec<(Scalar, usize)>, SparseVec) {
        let f = &self.field;
        let hits: Vec<(Scalar, usize)> = v
            .iter()
            .filter_map(|(c, x)| self.pivot_row.get(c).map(|&r| (x.neg(), r)))
            .collect();
        let terms: Vec<(Scalar, &SparseVec)> =
            hits.iter().map(|(s, r)| (s.clone(), &self.rows[*r])).collect();
        let residual = sparse::combine(f, v, &terms);
        (hits, residual)
    }

    /// Residual of `v` after reduction; zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.split(v).1
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Writes `v` as a combination of the tracked source vectors, if `v` lies
    /// in the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let combos = self.combos.as_ref().expect("echelon is not tracked");
        let (hits, residual) = self.split(v);
        if !residual.is_empty() {
            return None;
        }
        // v = sum (-s_r) row_r
        let terms: Vec<(Scalar, &SparseVec)> =
            hits.iter().map(|(s, r)| (s.neg(), &combos[*r])).collect();
        Some(sparse::combine(&self.field, &Vec::new(), &terms))
    }

    /// Inserts `v`; returns the new pivot column, or `None` when dependent.
    pub fn insert(&mut self, v: &SparseVec) -> Option<usize> {
        self.insert_inner(v, None)
    }

    /// Inserts `v` recorded as source number `source`.
    pub fn insert_tracked(&mut self, v: &SparseVec, source: usize) -> Option<usize> {
        self.insert_inner(v, Some(source))
    }

    fn insert_inner(&mut self, v: &SparseVec, source: Option<usize>) -> Option<usize> {
        let f = self.field.clone();
        let (hits, mut residual) = self.split(v);
        if residual.is_empty() {
            return None;
        }
        let mut combo = match (&self.combos, source) {
            (Some(combos), Some(src)) => {
                let terms: Vec<(Scalar, &SparseVec)> =
                    hits.iter().map(|(s, r)| (s.clone(), &combos[*r])).collect();
                Some(sparse::combine(&f, &vec![(src, f.one())], &terms))
            }
            (Some(_), None) => panic!("tracked echelon requires a source index"),
            _ => None,
        };
        let (pivot, lead) = residual[0].clone();
        if !lead.is_one() {
            let inv = f.inv(&lead).unwrap();
            residual = sparse::scale(&f, &residual, &inv);
            combo = combo.map(|c| sparse::scale(&f, &c, &inv));
        }
        // Clear the new pivot column from existing rows.
        for r in 0..self.rows.len() {
            if let Some(x) = sparse::get(&self.rows[r], pivot) {
                let s = x.neg();
                self.rows[r] = sparse::axpy(&f, &self.rows[r], &s, &residual);
                if let (Some(combos), Some(c)) = (self.combos.as_mut(), combo.as_ref()) {
                    combos[r] = sparse::axpy(&f, &combos[r], &s, c);
                }
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(residual);
        self.pivots.push(pivot);
        if let (Some(combos), Some(c)) = (self.combos.as_mut(), combo) {
            combos.push(c);
        }
        Some(pivot)
    }

    /// Rows ordered by increasing pivot column.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.order().into_iter().map(|r| self.rows[r].clone()).collect()
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut p = self.pivots.clone();
        p.sort_unstable();
        p
    }

    /// Source combinations aligned with [`Echelon::basis`].
    pub fn basis_combos(&self) -> Option<Vec<SparseVec>> {
        let combos = self.combos.as_ref()?;
        Some(self.order().into_iter().map(|r| combos[r].clone()).collect())
    }

    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&r| self.pivots[r]);
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;

    #[test]
    fn tracked_combination_reconstructs_input() {
        let f = FieldSpec::rationals();
        let mut e = Echelon::tracked(&f, 3);
        let a = vec![(0, f.from_int(2)), (1, f.from_int(4))];
        let b = vec![(1, f.from_int(1)), (2, f.from_int(3))];
        assert_eq!(e.insert_tracked(&a, 0), Some(0));
        assert_eq!(e.insert_tracked(&b, 1), Some(1));
        let c = vec![(0, f.from_int(2)), (1, f.from_int(5)), (2, f.from_int(3))];
        assert_eq!(e.insert_tracked(&c, 2), None);
        let combo = e.express(&c).unwrap();
        assert_eq!(combo, vec![(0, f.from_int(1)), (1, f.from_int(1))]);
        assert!(e.express(&vec![(2, f.from_int(1))]).is_none());
    }
}
