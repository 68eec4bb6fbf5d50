//! Sorted sparse vectors of scalars.

use std::collections::BTreeMap;

use super::field::{FieldSpec, Scalar};

/// `(index, value)` pairs, strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn get(v: &SparseVec, idx: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&idx, |e| e.0).ok().map(|k| &v[k].1)
}

pub fn scale(f: &FieldSpec, v: &SparseVec, s: &Scalar) -> SparseVec {
    if s.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, f.mul(x, s))).collect()
}

pub fn neg(v: &SparseVec) -> SparseVec {
    v.iter().map(|(i, x)| (*i, x.neg())).collect()
}

/// `a + s * b`
pub fn axpy(f: &FieldSpec, a: &SparseVec, s: &Scalar, b: &SparseVec) -> SparseVec {
    if s.is_zero() || b.is_empty() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ai = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let bj = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ai < bj {
            out.push(a[i].clone());
            i += 1;
        } else if bj < ai {
            out.push((bj, f.mul(s, &b[j].1)));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            f.mul_add_assign(&mut v, s, &b[j].1);
            if !v.is_zero() {
                out.push((ai, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn add(f: &FieldSpec, a: &SparseVec, b: &SparseVec) -> SparseVec {
    axpy(f, a, &f.one(), b)
}

/// `base + sum_k s_k * v_k`, merged in one pass for many terms.
pub fn combine(f: &FieldSpec, base: &SparseVec, terms: &[(Scalar, &SparseVec)]) -> SparseVec {
    match terms.len() {
        0 => base.clone(),
        1..=3 => {
            let mut out = base.clone();
            for (s, v) in terms {
                out = axpy(f, &out, s, v);
            }
            out
        }
        _ => {
            let mut acc: BTreeMap<usize, Scalar> = base.iter().cloned().collect();
            for (s, v) in terms {
                for (i, x) in v.iter() {
                    match acc.get_mut(i) {
                        Some(slot) => f.mul_add_assign(slot, s, x),
                        None => {
                            acc.insert(*i, f.mul(s, x));
                        }
                    }
                }
            }
            acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
        }
    }
}

pub fn from_dense(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(f: &FieldSpec, v: &SparseVec, len: usize) -> Vec<Scalar> {
    let mut out = vec![f.zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::field::FieldSpec;

    #[test]
    fn axpy_cancels_and_merges() {
        let f = FieldSpec::rationals();
        let a = vec![(0, f.from_int(1)), (3, f.from_int(2))];
        let b = vec![(1, f.from_int(5)), (3, f.from_int(1))];
        let out = axpy(&f, &a, &f.from_int(-2), &b);
        assert_eq!(out, vec![(0, f.from_int(1)), (1, f.from_int(-10))]);
        let many: Vec<(Scalar, &SparseVec)> = (0..5).map(|_| (f.from_int(1), &b)).collect();
        let c = combine(&f, &a, &many);
        assert_eq!(
            c,
            vec![(0, f.from_int(1)), (1, f.from_int(25)), (3, f.from_int(7))]
        );
    }
}
