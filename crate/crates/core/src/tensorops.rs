//! Operators on tensor powers `V^{⊗n}`: single-factor actions, Koszul-signed
//! permutations, the pairing/copairing built from the polarization, the
//! rank-one projector onto the twist line, antisymmetrizers and compression
//! to exterior powers.
//!
//! Basis convention: `e_{i_1} ⊗ ... ⊗ e_{i_n}` has index
//! `i_1 m^{n-1} + ... + i_n`, so the first factor is most significant and
//! Kronecker products compose in reading order.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactfield::{inverse, Field, Mat, Rational, Scalar, SparseVec};

/// Index arithmetic for `V^{⊗n}` with `dim V = base_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    pub base_dim: usize,
    pub power: usize,
}

impl TensorSpace {
    pub fn new(base_dim: usize, power: usize) -> TensorSpace {
        TensorSpace { base_dim, power }
    }

    pub fn dim(&self) -> usize {
        self.base_dim.pow(self.power as u32)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.power);
        tuple.iter().fold(0, |acc, &i| acc * self.base_dim + i)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.power];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.base_dim;
            idx /= self.base_dim;
        }
        out
    }
}

/// Tate-twist annotation on a rank-one invariant line. Composition adds twists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct WeightTag {
    pub twist: i64,
}

impl WeightTag {
    pub fn compose(self, other: WeightTag) -> WeightTag {
        WeightTag {
            twist: self.twist + other.twist,
        }
    }
}

/// A permutation of `{0, .., n-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    /// Swaps `a` and `b` (0-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Permutation {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(a, b);
        Permutation(p)
    }

    /// Returns `None` unless `images` is a bijection of `0..len`.
    pub fn from_images(images: Vec<usize>) -> Option<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    /// From 1-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Option<Permutation> {
        let mut p: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                if a == 0 || a > n || touched[a - 1] {
                    return None;
                }
                touched[a - 1] = true;
                let b = cyc[(k + 1) % cyc.len()];
                if b == 0 || b > n {
                    return None;
                }
                p[a - 1] = b - 1;
            }
        }
        Permutation::from_images(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn sign(&self) -> i64 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut parity = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            parity += len - 1;
        }
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Disjoint cycles of length at least 2, 1-based, each starting at its
    /// smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i + 1);
                i = self.0[i];
            }
            out.push(cyc);
        }
        out
    }

    /// All permutations of `n` in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

/// `Id^{⊗(pos-1)} ⊗ M ⊗ Id^{⊗(n-pos)}` with 1-based `pos`.
pub fn factor_embed(m: &Mat, pos: usize, n: usize) -> Result<Mat> {
    if pos == 0 || pos > n {
        return Err(Error::PositionOutOfRange { pos, n });
    }
    assert!(m.is_square(), "factor_embed needs a square matrix");
    let f = m.field();
    let dim = m.rows();
    let left = Mat::identity(f, dim.pow((pos - 1) as u32));
    let right = Mat::identity(f, dim.pow((n - pos) as u32));
    Ok(left.kron(m).kron(&right))
}

/// `sum_pos factor_embed(X, pos, n)`: the Lie-algebra action on `V^{⊗n}`.
pub fn diagonal_lie_action(x: &Mat, n: usize) -> Mat {
    let f = x.field();
    let dim = x.rows().pow(n as u32);
    let mut acc = Mat::zeros(f, dim, dim);
    for pos in 1..=n {
        acc = acc.add(&factor_embed(x, pos, n).expect("position in range"));
    }
    acc
}

/// `h^{⊗n}`: the group action on `V^{⊗n}`.
pub fn tensor_power(h: &Mat, n: usize) -> Mat {
    let mut acc = Mat::identity(h.field(), 1);
    for _ in 0..n {
        acc = acc.kron(h);
    }
    acc
}

/// Koszul-signed factor permutation on `V^{⊗n}`, `n = sigma.len()`:
/// the factor in position `p` moves to position `sigma(p)`, with overall
/// sign `sgn(sigma)`. This is a homomorphism:
/// `signed_perm(σ∘τ) = signed_perm(σ) signed_perm(τ)`.
pub fn signed_perm(field: &Field, sigma: &Permutation, base_dim: usize) -> Mat {
    let n = sigma.len();
    let space = TensorSpace::new(base_dim, n);
    let sign = field.from_int(sigma.sign());
    let mut rows: Vec<SparseVec> = vec![Vec::new(); space.dim()];
    let mut out = vec![0; n];
    for col in 0..space.dim() {
        let input = space.decode(col);
        for (p, &i) in input.iter().enumerate() {
            out[sigma.apply(p)] = i;
        }
        rows[space.encode(&out)].push((col, sign.clone()));
    }
    Mat::from_rows(field, space.dim(), rows)
}

fn check_form(phi: &Mat) -> Result<Mat> {
    if !phi.is_square() || phi.rows() % 2 == 1 || phi.rows() == 0 {
        return Err(Error::OddDimension);
    }
    let minus = phi.field().from_int(-1);
    if phi.transpose() != phi.scale(&minus) {
        return Err(Error::NotAlternating);
    }
    inverse(phi).ok_or(Error::NotInvertible)
}

/// `π: V ⊗ V → F`, `π(e_i ⊗ e_j) = φ_ij`, as a `1 x m²` matrix.
pub fn pairing_pi(phi: &Mat) -> Result<Mat> {
    check_form(phi)?;
    Ok(Mat::from_rows(phi.field(), phi.rows() * phi.rows(), vec![phi.vectorize()]))
}

/// `ι: F → V ⊗ V`, `ι(1) = sum_{i,j} (φ⁻¹)_ji e_i ⊗ e_j`, as an `m² x 1` matrix.
pub fn copairing_iota(phi: &Mat) -> Result<Mat> {
    let inv = check_form(phi)?;
    let col = inv.transpose().vectorize();
    let m2 = phi.rows() * phi.rows();
    let mut rows: Vec<SparseVec> = vec![Vec::new(); m2];
    for (idx, v) in col {
        rows[idx].push((0, v));
    }
    Ok(Mat::from_rows(phi.field(), 1, rows))
}

/// The idempotent `P = (1/m) ι∘π` on `V ⊗ V` together with the twist of its
/// rank-one image.
#[derive(Clone, Debug)]
pub struct TwistProjector {
    pub matrix: Mat,
    pub image_tag: WeightTag,
}

pub fn projector_p(phi: &Mat) -> Result<TwistProjector> {
    let iota = copairing_iota(phi)?;
    let pi = pairing_pi(phi)?;
    let f = phi.field();
    let inv_m = f.inv(&f.from_int(phi.rows() as i64)).unwrap();
    Ok(TwistProjector {
        matrix: iota.mul(&pi).scale(&inv_m),
        image_tag: WeightTag { twist: -1 },
    })
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(1/n!) sum_σ signed_perm(σ)` on `V^{⊗n}`, `dim V = base_dim`: the
/// projector onto the exterior power. Zero when `n > base_dim`.
pub fn antisymmetrizer(field: &Field, n: usize, base_dim: usize) -> Mat {
    let space = TensorSpace::new(base_dim, n);
    let dim = space.dim();
    if n > base_dim {
        return Mat::zeros(field, dim, dim);
    }
    let weight = Rational::new(BigInt::one(), factorial(n));
    let perms = Permutation::all(n);
    let mut rows: Vec<SparseVec> = vec![Vec::new(); dim];
    for col in 0..dim {
        let input = space.decode(col);
        if has_repeat(&input) {
            continue;
        }
        let mut out = vec![0; n];
        for sigma in &perms {
            for (p, &i) in input.iter().enumerate() {
                out[sigma.apply(p)] = i;
            }
            let value = field.from_rational(&weight * Rational::from_integer(sigma.sign().into()));
            rows[space.encode(&out)].push((col, value));
        }
    }
    for r in rows.iter_mut() {
        r.sort_by_key(|e| e.0);
    }
    Mat::from_rows(field, dim, rows)
}

fn has_repeat(t: &[usize]) -> bool {
    (0..t.len()).any(|a| (a + 1..t.len()).any(|b| t[a] == t[b]))
}

/// Strictly increasing `i`-tuples from `0..m`, lexicographic. Indexes `Λ^i`.
pub fn wedge_basis(m: usize, i: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(i);
    fn rec(m: usize, i: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == i {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            cur.push(a);
            rec(m, i, a + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, i, 0, &mut cur, &mut out);
    out
}

/// `A T A` with `A` the antisymmetrizer; always wedge-compatible.
pub fn bracket_with_antisymmetrizer(t: &Mat, antisym: &Mat) -> Mat {
    antisym.mul(t).mul(antisym)
}

/// Matrix of a wedge-compatible operator on `Λ^i V` in the basis
/// `b_J = sum_σ sgn(σ) e_{σ·J}`, `J` strictly increasing.
///
/// `antisym` must be `antisymmetrizer(i, m)`; `T` must commute with it.
pub fn compress_to_wedge(t: &Mat, antisym: &Mat, i: usize, m: usize) -> Result<Mat> {
    if t.mul(antisym) != antisym.mul(t) {
        return Err(Error::NotWedgeCompatible);
    }
    Ok(compress_unchecked(t, i, m))
}

/// [`compress_to_wedge`] without the commutation check.
pub(crate) fn compress_unchecked(t: &Mat, i: usize, m: usize) -> Mat {
    let f = t.field();
    let space = TensorSpace::new(m, i);
    let basis = wedge_basis(m, i);
    let index: HashMap<Vec<usize>, usize> =
        basis.iter().enumerate().map(|(k, b)| (b.clone(), k)).collect();
    let k = basis.len();
    let mut rows: Vec<SparseVec> = Vec::with_capacity(k);
    for tuple in &basis {
        let mut acc: Vec<Option<Scalar>> = vec![None; k];
        for (col, v) in t.row(space.encode(tuple)) {
            let ct = space.decode(*col);
            if has_repeat(&ct) {
                continue;
            }
            let (sorted, sign) = sort_with_sign(&ct);
            let j = index[&sorted];
            let term = if sign > 0 { v.clone() } else { v.neg() };
            match &mut acc[j] {
                Some(s) => s.add_assign(&term),
                slot => *slot = Some(term),
            }
        }
        rows.push(
            acc.into_iter()
                .enumerate()
                .filter_map(|(j, s)| s.filter(|x| !x.is_zero()).map(|x| (j, x)))
                .collect(),
        );
    }
    Mat::from_rows(f, k, rows)
}

fn sort_with_sign(t: &[usize]) -> (Vec<usize>, i64) {
    let mut v = t.to_vec();
    let mut sign = 1;
    for a in 0..v.len() {
        for b in 0..v.len() - 1 - a {
            if v[b] > v[b + 1] {
                v.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    (v, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rref, FieldSpec};
    use proptest::prelude::*;

    fn j2(f: &Field) -> Mat {
        Mat::from_ints(f, &[vec![0, 1], vec![-1, 0]])
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn tensor_space_roundtrip() {
        let s = TensorSpace::new(3, 4);
        for idx in 0..s.dim() {
            assert_eq!(s.encode(&s.decode(idx)), idx);
        }
        assert_eq!(s.encode(&[0, 0, 1, 2]), 5);
    }

    #[test]
    fn factor_embed_cases() {
        let f = FieldSpec::rationals();
        let m = Mat::from_ints(&f, &[vec![1, 2], vec![3, 4]]);
        assert_eq!(factor_embed(&m, 1, 1).unwrap(), m);
        assert!(factor_embed(&Mat::identity(&f, 2), 2, 3).unwrap().is_identity());
        assert_eq!(
            factor_embed(&m, 0, 2),
            Err(Error::PositionOutOfRange { pos: 0, n: 2 })
        );
        assert!(factor_embed(&m, 3, 2).is_err());
    }

    #[test]
    fn factor_embeds_at_distinct_positions_commute() {
        let f = FieldSpec::rationals();
        let a = Mat::from_ints(&f, &[vec![1, 2], vec![3, 4]]);
        let b = Mat::from_ints(&f, &[vec![0, -1], vec![5, 2]]);
        for (p, q) in [(1, 2), (1, 3), (2, 3)] {
            let x = factor_embed(&a, p, 3).unwrap();
            let y = factor_embed(&b, q, 3).unwrap();
            assert_eq!(x.mul(&y), y.mul(&x));
        }
    }

    proptest! {
        #[test]
        fn factor_embed_trace_identity(
            entries in prop::collection::vec(-5i64..6, 9),
            pos in 1usize..4,
        ) {
            let f = FieldSpec::rationals();
            let rows: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let m = Mat::from_ints(&f, &rows);
            let e = factor_embed(&m, pos, 3).unwrap();
            // trace(M) * m^(n-1) computed independently
            let expected = f.mul(&m.trace(), &f.from_int(9));
            prop_assert_eq!(e.trace(), expected);
        }
    }

    #[test]
    fn signed_perm_basics() {
        let f = FieldSpec::rationals();
        assert!(signed_perm(&f, &Permutation::identity(3), 2).is_identity());
        let s = signed_perm(&f, &Permutation::transposition(2, 0, 1), 3);
        assert!(s.mul(&s).is_identity());
        // e_0 ⊗ e_1 -> -e_1 ⊗ e_0
        let sp = TensorSpace::new(3, 2);
        assert_eq!(s.get(sp.encode(&[1, 0]), sp.encode(&[0, 1])), f.from_int(-1));
    }

    #[test]
    fn signed_perm_is_a_homomorphism_on_s3_and_s4() {
        let f = FieldSpec::rationals();
        for n in [3usize, 4] {
            let perms = Permutation::all(n);
            let mats: Vec<Mat> = perms.iter().map(|p| signed_perm(&f, p, 2)).collect();
            for (a, ma) in perms.iter().zip(&mats) {
                for (b, mb) in perms.iter().zip(&mats) {
                    let ab = signed_perm(&f, &a.compose(b), 2);
                    assert_eq!(ma.mul(mb), ab);
                }
            }
        }
    }

    #[test]
    fn permutation_cycles_roundtrip() {
        for p in Permutation::all(4) {
            let cyc = p.cycles();
            assert_eq!(Permutation::from_cycles(4, &cyc).unwrap(), p);
        }
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::from_cycles(3, &[vec![1, 4]]).is_none());
    }

    #[test]
    fn pairing_times_copairing_is_dim() {
        let f = FieldSpec::rationals();
        let phi1 = j2(&f);
        let phi2 = phi1.direct_sum(&phi1);
        for (phi, expect) in [(phi1.clone(), 2), (phi2, 4)] {
            let pi = pairing_pi(&phi).unwrap();
            let iota = copairing_iota(&phi).unwrap();
            assert_eq!(pi.mul(&iota), Mat::identity(&f, 1).scale(&f.from_int(expect)));
        }
        // rescaling is invisible
        for c in [2i64, -3, 7] {
            let phi = phi1.scale(&f.from_int(c));
            let pi = pairing_pi(&phi).unwrap();
            let iota = copairing_iota(&phi).unwrap();
            assert_eq!(pi.mul(&iota).get(0, 0), f.from_int(2));
        }
    }

    #[test]
    fn pairing_rejects_bad_forms() {
        let f = FieldSpec::rationals();
        let sym = Mat::from_ints(&f, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(pairing_pi(&sym).unwrap_err(), Error::NotAlternating);
        assert_eq!(
            copairing_iota(&Mat::zeros(&f, 2, 2)).unwrap_err(),
            Error::NotInvertible
        );
        assert_eq!(
            pairing_pi(&Mat::zeros(&f, 3, 3)).unwrap_err(),
            Error::OddDimension
        );
    }

    #[test]
    fn projector_is_rank_one_idempotent() {
        let f = FieldSpec::rationals();
        let phi = j2(&f);
        let p = projector_p(&phi).unwrap();
        assert!(p.matrix.is_idempotent());
        assert_eq!(p.matrix.rank(), 1);
        assert_eq!(p.image_tag, WeightTag { twist: -1 });
        let comp = Mat::identity(&f, 4).sub(&p.matrix);
        assert!(comp.is_idempotent());
        assert_eq!(comp.rank(), 3);
        assert!(comp.mul(&p.matrix).is_zero());
    }

    #[test]
    fn antisymmetrizer_ranks_small_sweep() {
        let f = FieldSpec::rationals();
        for m in 1..=6usize {
            for n in 0..=m + 1 {
                if m.pow(n as u32) > 6000 {
                    continue;
                }
                let a = antisymmetrizer(&f, n, m);
                assert!(a.is_idempotent(), "m={m} n={n}");
                assert_eq!(rref(&a).1, binom(m, n), "m={m} n={n}");
            }
        }
        assert!(antisymmetrizer(&f, 1, 4).is_identity());
        assert!(antisymmetrizer(&f, 3, 2).is_zero());
    }

    #[test]
    fn compression_basics() {
        let f = FieldSpec::rationals();
        let (m, i) = (4, 2);
        let a = antisymmetrizer(&f, i, m);
        let id = Mat::identity(&f, 16);
        assert!(compress_to_wedge(&id, &a, i, m).unwrap().is_identity());
        assert!(compress_to_wedge(&a, &a, i, m).unwrap().is_identity());
        assert_eq!(compress_to_wedge(&id, &a, i, m).unwrap().rows(), 6);
        let x = Mat::from_ints(&f, &[vec![1, 2, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        let t = factor_embed(&x, 1, 2).unwrap();
        assert_eq!(compress_to_wedge(&t, &a, i, m), Err(Error::NotWedgeCompatible));
    }

    #[test]
    fn compression_is_multiplicative_on_diagonal_actions() {
        let f = FieldSpec::rationals();
        let (m, i) = (4, 3);
        let a = antisymmetrizer(&f, i, m);
        let x = Mat::from_ints(&f, &[vec![1, 2, 0, -1], vec![0, 1, 3, 0], vec![1, 0, 1, 0], vec![0, 0, 2, 1]]);
        let y = Mat::from_ints(&f, &[vec![0, 1, 0, 0], vec![1, 0, 0, 1], vec![0, 0, 2, 0], vec![1, 0, 0, 1]]);
        let tx = tensor_power(&x, i);
        let ty = tensor_power(&y, i);
        let cx = compress_to_wedge(&tx, &a, i, m).unwrap();
        let cy = compress_to_wedge(&ty, &a, i, m).unwrap();
        let cxy = compress_to_wedge(&tx.mul(&ty), &a, i, m).unwrap();
        assert_eq!(cx.mul(&cy), cxy);
    }
}
