//! The polarized datum `(V, φ, E)`, the Lie algebra of its Lefschetz group,
//! and the commutant `End_Lef(V^{⊗n})` computed by brute-force linear
//! equivariance. This is the oracle that knows nothing about generators or
//! diagrams.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};
use crate::exactfield::{inverse, kernel_basis, Echelon, Field, Mat, Scalar, SparseVec};
use crate::par;
use crate::tensorops::{diagonal_lie_action, tensor_power, TensorSpace};

/// Size limits shared by every solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Upper bound on `dim End(V^{⊗n}) = m^{2n}`.
    pub max_operator_dim: usize,
    pub max_closure_waves: usize,
    pub idempotent_retries: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_operator_dim: 5000,
            max_closure_waves: 64,
            idempotent_retries: 16,
        }
    }
}

impl Budget {
    /// Lifts the operator-dimension cap.
    pub fn allow_large(mut self) -> Budget {
        self.max_operator_dim = usize::MAX;
        self
    }

    pub fn check(&self, base_dim: usize, n: usize) -> Result<()> {
        let dim = (base_dim as u128).pow(2 * n as u32);
        if dim > self.max_operator_dim as u128 {
            return Err(Error::SizeBudgetExceeded {
                dim: usize::try_from(dim).unwrap_or(usize::MAX),
                budget: self.max_operator_dim,
            });
        }
        Ok(())
    }
}

/// `(V = F^{2g}, φ, E)` plus explicit elements of the Lefschetz group that
/// reach components the Lie algebra cannot see.
#[derive(Clone, Debug)]
pub struct PolarizedData {
    field: Field,
    g: usize,
    phi: Mat,
    phi_inv: Mat,
    e_basis: Vec<Mat>,
    extra_generators: Vec<Mat>,
}

impl PolarizedData {
    pub fn new(
        field: &Field,
        g: usize,
        phi: Mat,
        e_basis: Vec<Mat>,
        extra_generators: Vec<Mat>,
    ) -> std::result::Result<PolarizedData, ValidationError> {
        if g == 0 {
            return Err(ValidationError::ZeroDimension);
        }
        let m = 2 * g;
        if phi.rows() != m || phi.cols() != m {
            return Err(ValidationError::PhiShape {
                expected: m,
                rows: phi.rows(),
                cols: phi.cols(),
            });
        }
        if phi.transpose() != phi.scale(&field.from_int(-1)) {
            return Err(ValidationError::PhiNotAlternating);
        }
        let phi_inv = inverse(&phi).ok_or(ValidationError::PhiNotInvertible)?;
        if e_basis.is_empty() {
            return Err(ValidationError::EmptyEBasis);
        }
        for (k, e) in e_basis.iter().enumerate() {
            if e.rows() != m || e.cols() != m {
                return Err(ValidationError::EShape(k));
            }
        }
        let mut span = Echelon::new(field, m * m);
        for e in &e_basis {
            span.insert(&e.vectorize());
        }
        if !span.contains(&Mat::identity(field, m).vectorize()) {
            return Err(ValidationError::IdentityNotInESpan);
        }
        for (a, ea) in e_basis.iter().enumerate() {
            for (b, eb) in e_basis.iter().enumerate() {
                if !span.contains(&ea.mul(eb).vectorize()) {
                    return Err(ValidationError::ENotClosed(a, b));
                }
            }
        }
        for (k, e) in e_basis.iter().enumerate() {
            let rosati = phi_inv.mul(&e.transpose()).mul(&phi);
            if !span.contains(&rosati.vectorize()) {
                return Err(ValidationError::RosatiUnstable(k));
            }
        }
        for (k, h) in extra_generators.iter().enumerate() {
            if h.rows() != m || h.cols() != m {
                return Err(ValidationError::ExtraShape(k));
            }
            if let Some(j) = e_basis.iter().position(|e| !h.commutes_with(e)) {
                return Err(ValidationError::ExtraNotCommuting(k, j));
            }
            if h.transpose().mul(&phi).mul(h) != phi {
                return Err(ValidationError::ExtraNotIsometry(k));
            }
        }
        Ok(PolarizedData {
            field: field.clone(),
            g,
            phi,
            phi_inv,
            e_basis,
            extra_generators,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// `dim V = 2g`
    pub fn m(&self) -> usize {
        2 * self.g
    }

    pub fn phi(&self) -> &Mat {
        &self.phi
    }

    pub fn phi_inv(&self) -> &Mat {
        &self.phi_inv
    }

    pub fn e_basis(&self) -> &[Mat] {
        &self.e_basis
    }

    pub fn extra_generators(&self) -> &[Mat] {
        &self.extra_generators
    }

    /// `f* = φ⁻¹ fᵀ φ`
    pub fn rosati(&self, f: &Mat) -> Mat {
        self.phi_inv.mul(&f.transpose()).mul(&self.phi)
    }

    /// Same data with `φ` replaced; revalidated.
    pub fn with_phi(&self, phi: Mat) -> std::result::Result<PolarizedData, ValidationError> {
        PolarizedData::new(
            &self.field,
            self.g,
            phi,
            self.e_basis.clone(),
            self.extra_generators.clone(),
        )
    }

    /// The datum transported along a change of basis `u`: `φ ↦ uᵀφu`,
    /// `e ↦ u⁻¹ e u`, `h ↦ u⁻¹ h u`.
    pub fn change_basis(&self, u: &Mat) -> std::result::Result<PolarizedData, ValidationError> {
        let u_inv = inverse(u).ok_or(ValidationError::PhiNotInvertible)?;
        let conj = |x: &Mat| u_inv.mul(x).mul(u);
        PolarizedData::new(
            &self.field,
            self.g,
            u.transpose().mul(&self.phi).mul(u),
            self.e_basis.iter().map(conj).collect(),
            self.extra_generators.iter().map(conj).collect(),
        )
    }

    /// Same data over a larger field (all entries are reinterpreted).
    pub fn extend_scalars(&self, target: &Field) -> PolarizedData {
        let lift = |x: &Mat| lift_mat(x, target);
        PolarizedData {
            field: target.clone(),
            g: self.g,
            phi: lift(&self.phi),
            phi_inv: lift(&self.phi_inv),
            e_basis: self.e_basis.iter().map(lift).collect(),
            extra_generators: self.extra_generators.iter().map(lift).collect(),
        }
    }
}

/// Reinterprets a matrix with rational entries over another field.
pub fn lift_mat(x: &Mat, target: &Field) -> Mat {
    let src = x.field();
    let rows = x
        .row_data()
        .iter()
        .map(|r| {
            r.iter()
                .map(|(j, v)| {
                    let q = v
                        .as_rational()
                        .unwrap_or_else(|| panic!("entry {} is not rational", src.format(v)));
                    (*j, target.from_rational(q.clone()))
                })
                .collect()
        })
        .collect();
    Mat::from_rows(target, x.cols(), rows)
}

/// A linearly independent family of operators on `V^{⊗n}`, kept as the
/// reduced row echelon basis of their row-major vectorizations.
#[derive(Clone)]
pub struct OperatorSpan {
    op_dim: usize,
    echelon: Echelon,
}

impl OperatorSpan {
    pub fn empty(field: &Field, op_dim: usize) -> OperatorSpan {
        OperatorSpan {
            op_dim,
            echelon: Echelon::new(field, op_dim * op_dim),
        }
    }

    pub fn from_operators<'a>(
        field: &Field,
        op_dim: usize,
        ops: impl IntoIterator<Item = &'a Mat>,
    ) -> OperatorSpan {
        let mut span = OperatorSpan::empty(field, op_dim);
        for op in ops {
            span.insert(op);
        }
        span
    }

    pub fn from_vectors(field: &Field, op_dim: usize, vecs: &[SparseVec]) -> OperatorSpan {
        let mut span = OperatorSpan::empty(field, op_dim);
        for v in vecs {
            span.echelon.insert(v);
        }
        span
    }

    /// Adds `op`; returns whether the span grew.
    pub fn insert(&mut self, op: &Mat) -> bool {
        debug_assert_eq!(op.rows(), self.op_dim);
        self.echelon.insert(&op.vectorize()).is_some()
    }

    pub fn field(&self) -> &Field {
        self.echelon.field()
    }

    pub fn op_dim(&self) -> usize {
        self.op_dim
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    pub fn basis_vectors(&self) -> Vec<SparseVec> {
        self.echelon.basis()
    }

    pub fn basis(&self) -> Vec<Mat> {
        self.echelon
            .basis()
            .iter()
            .map(|v| Mat::from_vector(self.field(), self.op_dim, self.op_dim, v))
            .collect()
    }

    pub fn contains(&self, op: &Mat) -> bool {
        self.echelon.contains(&op.vectorize())
    }

    pub fn contains_span(&self, other: &OperatorSpan) -> bool {
        other
            .echelon
            .basis()
            .iter()
            .all(|v| self.echelon.contains(v))
    }

    /// Equal subspaces have identical reduced bases.
    pub fn same_span(&self, other: &OperatorSpan) -> bool {
        self.op_dim == other.op_dim && self.echelon.basis() == other.echelon.basis()
    }

    /// Closed under products of basis elements.
    pub fn is_algebra(&self) -> bool {
        let basis = self.basis();
        let pairs: Vec<(usize, usize)> = (0..basis.len())
            .flat_map(|a| (0..basis.len()).map(move |b| (a, b)))
            .collect();
        par::all(&pairs, |&(a, b)| self.contains(&basis[a].mul(&basis[b])))
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&Mat::identity(self.field(), self.op_dim))
    }
}

impl std::fmt::Debug for OperatorSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OperatorSpan(op_dim={}, dim={})", self.op_dim, self.dim())
    }
}

/// Basis of `{X : Xe = eX for all e in E, Xᵀφ + φX = 0}`.
pub fn lie_algebra_basis(data: &PolarizedData) -> Vec<Mat> {
    let f = data.field();
    let m = data.m();
    let var = |i: usize, j: usize| i * m + j;
    let mut rows: Vec<SparseVec> = Vec::new();
    let mut push = |entries: Vec<(usize, Scalar)>| {
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for (k, v) in entries {
            acc.entry(k).or_insert_with(|| f.zero()).add_assign(&v);
        }
        let mut row: SparseVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        row.sort_by_key(|e| e.0);
        if !row.is_empty() {
            rows.push(row);
        }
    };
    for e in data.e_basis() {
        for i in 0..m {
            for j in 0..m {
                // (Xe - eX)_ij
                let mut entries = Vec::new();
                for k in 0..m {
                    let ekj = e.get(k, j);
                    if !ekj.is_zero() {
                        entries.push((var(i, k), ekj));
                    }
                    let eik = e.get(i, k);
                    if !eik.is_zero() {
                        entries.push((var(k, j), eik.neg()));
                    }
                }
                push(entries);
            }
        }
    }
    let phi = data.phi();
    for i in 0..m {
        for j in 0..m {
            // (Xᵀφ + φX)_ij
            let mut entries = Vec::new();
            for k in 0..m {
                let pkj = phi.get(k, j);
                if !pkj.is_zero() {
                    entries.push((var(k, i), pkj));
                }
                let pik = phi.get(i, k);
                if !pik.is_zero() {
                    entries.push((var(k, j), pik));
                }
            }
            push(entries);
        }
    }
    let system = Mat::from_rows(f, m * m, rows);
    kernel_basis(&system)
        .iter()
        .map(|v| Mat::from_vector(f, m, m, v))
        .collect()
}

/// Diagonal elements spanning `lie ∩ diagonal matrices`, as weight vectors.
fn diagonal_weights(f: &Field, lie: &[Mat], m: usize) -> Vec<Vec<Scalar>> {
    if lie.is_empty() {
        return Vec::new();
    }
    // Coefficient vectors c with sum c_k X_k having zero off-diagonal part.
    let mut rows: Vec<SparseVec> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let row: SparseVec = lie
                .iter()
                .enumerate()
                .map(|(k, x)| (k, x.get(i, j)))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    let sys = Mat::from_rows(f, lie.len(), rows);
    kernel_basis(&sys)
        .iter()
        .map(|c| {
            (0..m)
                .map(|i| {
                    let mut acc = f.zero();
                    for (k, ck) in c {
                        f.mul_add_assign(&mut acc, ck, &lie[*k].get(i, i));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `End_Lef(V^{⊗n})`: operators commuting with `Δ(X)` for every Lie-algebra
/// basis element and with `h^{⊗n}` for every extra group generator.
///
/// Positions of nonzero weight under the diagonal part of the Lie algebra are
/// eliminated up front; the remaining constraint rows are assembled per
/// generator (in parallel) and fed into one incremental echelon.
pub fn centralizer_basis(data: &PolarizedData, n: usize, budget: &Budget) -> Result<OperatorSpan> {
    let m = data.m();
    budget.check(m, n)?;
    let f = data.field();
    let space = TensorSpace::new(m, n);
    let dim = space.dim();

    let lie = lie_algebra_basis(data);
    let weights = diagonal_weights(f, &lie, m);
    let tuples: Vec<Vec<usize>> = (0..dim).map(|i| space.decode(i)).collect();
    let tuple_weight = |t: &[usize], w: &[Scalar]| {
        let mut acc = f.zero();
        for &i in t {
            acc.add_assign(&w[i]);
        }
        acc
    };
    // weight signature of each basis tuple
    let signature: Vec<Vec<Scalar>> = tuples
        .iter()
        .map(|t| weights.iter().map(|w| tuple_weight(t, w)).collect())
        .collect();
    let mut by_signature: HashMap<&[Scalar], Vec<usize>> = HashMap::new();
    for (i, s) in signature.iter().enumerate() {
        by_signature.entry(s.as_slice()).or_default().push(i);
    }
    // surviving variables (a, b) with equal signatures, row-major order
    let mut survivors: Vec<(usize, usize)> = Vec::new();
    for a in 0..dim {
        for &b in &by_signature[signature[a].as_slice()] {
            survivors.push((a, b));
        }
    }
    survivors.sort_unstable();

    let mut constraint_ops: Vec<Mat> = lie.iter().map(|x| diagonal_lie_action(x, n)).collect();
    constraint_ops.extend(data.extra_generators().iter().map(|h| tensor_power(h, n)));

    let blocks: Vec<Vec<SparseVec>> = par::map(&constraint_ops, |op| {
        commutator_rows(op, &survivors)
    });

    let mut ech = Echelon::new(f, survivors.len());
    for row in blocks.iter().flatten() {
        ech.insert(row);
    }
    let pivots = ech.pivot_columns();
    let rows = ech.basis();
    let kernel = crate::exactfield::kernel_from_rref(f, &rows, &pivots, survivors.len());
    let vectors: Vec<SparseVec> = kernel
        .iter()
        .map(|v| {
            let mut full: SparseVec = v
                .iter()
                .map(|(k, x)| {
                    let (a, b) = survivors[*k];
                    (a * dim + b, x.clone())
                })
                .collect();
            full.sort_by_key(|e| e.0);
            full
        })
        .collect();
    Ok(OperatorSpan::from_vectors(f, dim, &vectors))
}

/// Rows of `[A, F] = 0` in the surviving variables of `F`.
fn commutator_rows(a: &Mat, survivors: &[(usize, usize)]) -> Vec<SparseVec> {
    let at = a.transpose();
    // equation (r, c) -> entries
    let mut eqs: HashMap<(usize, usize), Vec<(usize, Scalar)>> = HashMap::new();
    for (v, &(k, b)) in survivors.iter().enumerate() {
        // (A F)_{r b} gets A[r, k] F[k, b]
        for (r, x) in at.row(k) {
            eqs.entry((*r, b)).or_default().push((v, x.clone()));
        }
        // (F A)_{k c} gets F[k, b] A[b, c]
        for (c, x) in a.row(b) {
            eqs.entry((k, *c)).or_default().push((v, x.neg()));
        }
    }
    let mut keys: Vec<(usize, usize)> = eqs.keys().copied().collect();
    keys.sort_unstable();
    keys.into_iter()
        .filter_map(|key| {
            let mut entries = eqs.remove(&key).unwrap();
            entries.sort_by_key(|e| e.0);
            let mut row: SparseVec = Vec::with_capacity(entries.len());
            for (v, x) in entries {
                match row.last_mut() {
                    Some((lv, lx)) if *lv == v => lx.add_assign(&x),
                    _ => row.push((v, x)),
                }
            }
            row.retain(|(_, x)| !x.is_zero());
            (!row.is_empty()).then_some(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::tensorops::factor_embed;

    fn j(f: &Field) -> Mat {
        Mat::from_ints(f, &[vec![0, 1], vec![-1, 0]])
    }

    fn siegel(g: usize) -> PolarizedData {
        let f = FieldSpec::rationals();
        let mut phi = j(&f);
        for _ in 1..g {
            phi = phi.direct_sum(&j(&f));
        }
        PolarizedData::new(&f, g, phi, vec![Mat::identity(&f, 2 * g)], vec![]).unwrap()
    }

    fn cm() -> PolarizedData {
        let f = FieldSpec::rationals();
        let jm = Mat::from_ints(&f, &[vec![0, -1], vec![1, 0]]);
        PolarizedData::new(&f, 1, j(&f), vec![Mat::identity(&f, 2), jm], vec![]).unwrap()
    }

    #[test]
    fn validation_rejects_broken_data() {
        let f = FieldSpec::rationals();
        let id = Mat::identity(&f, 2);
        assert_eq!(
            PolarizedData::new(&f, 0, Mat::zeros(&f, 0, 0), vec![], vec![]).unwrap_err(),
            ValidationError::ZeroDimension
        );
        let sym = Mat::from_ints(&f, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(
            PolarizedData::new(&f, 1, sym, vec![id.clone()], vec![]).unwrap_err(),
            ValidationError::PhiNotAlternating
        );
        assert_eq!(
            PolarizedData::new(&f, 1, Mat::zeros(&f, 2, 2), vec![id.clone()], vec![]).unwrap_err(),
            ValidationError::PhiNotInvertible
        );
        let e11 = Mat::from_ints(&f, &[vec![1, 0], vec![0, 0]]);
        assert_eq!(
            PolarizedData::new(&f, 1, j(&f), vec![e11.clone()], vec![]).unwrap_err(),
            ValidationError::IdentityNotInESpan
        );
        // on a plane the Rosati involution is the adjugate, so test in dimension 4
        let j2 = j(&f).direct_sum(&j(&f));
        let id4 = Mat::identity(&f, 4);
        let e11 = Mat::from_ints(&f, &[vec![1, 0], vec![0, 0]]).direct_sum(&Mat::zeros(&f, 2, 2));
        assert_eq!(
            PolarizedData::new(&f, 2, j2, vec![id4, e11], vec![]).unwrap_err(),
            ValidationError::RosatiUnstable(1)
        );
        let not_iso = Mat::from_ints(&f, &[vec![2, 0], vec![0, 1]]);
        assert_eq!(
            PolarizedData::new(&f, 1, j(&f), vec![id], vec![not_iso]).unwrap_err(),
            ValidationError::ExtraNotIsometry(0)
        );
    }

    #[test]
    fn lie_algebra_dimensions() {
        assert_eq!(lie_algebra_basis(&siegel(1)).len(), 3);
        assert_eq!(lie_algebra_basis(&siegel(2)).len(), 10);
        let cm_lie = lie_algebra_basis(&cm());
        assert_eq!(cm_lie.len(), 1);
        let f = cm_lie[0].field().clone();
        let jm = Mat::from_ints(&f, &[vec![0, -1], vec![1, 0]]);
        let span = OperatorSpan::from_operators(&f, 2, [&jm]);
        assert!(span.contains(&cm_lie[0]));
    }

    #[test]
    fn lie_elements_satisfy_both_conditions() {
        for data in [siegel(1), siegel(2), cm()] {
            for x in lie_algebra_basis(&data) {
                for e in data.e_basis() {
                    assert!(x.commutes_with(e));
                }
                let s = x.transpose().mul(data.phi()).add(&data.phi().mul(&x));
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn centralizer_small_dimensions() {
        let b = Budget::default();
        assert_eq!(centralizer_basis(&siegel(1), 1, &b).unwrap().dim(), 1);
        assert_eq!(centralizer_basis(&siegel(1), 2, &b).unwrap().dim(), 2);
        assert_eq!(centralizer_basis(&siegel(2), 2, &b).unwrap().dim(), 3);
        assert_eq!(centralizer_basis(&cm(), 1, &b).unwrap().dim(), 2);
        assert_eq!(centralizer_basis(&cm(), 2, &b).unwrap().dim(), 6);
    }

    #[test]
    fn centralizer_is_a_unital_algebra_commuting_with_lie() {
        let b = Budget::default();
        for data in [siegel(1), cm()] {
            let c = centralizer_basis(&data, 2, &b).unwrap();
            assert!(c.contains_identity());
            assert!(c.is_algebra());
            let lie = lie_algebra_basis(&data);
            for op in c.basis() {
                for x in &lie {
                    assert!(op.commutes_with(&diagonal_lie_action(x, 2)));
                }
            }
        }
    }

    #[test]
    fn centralizer_at_one_is_e_span() {
        let b = Budget::default();
        let data = cm();
        let c = centralizer_basis(&data, 1, &b).unwrap();
        let e = OperatorSpan::from_operators(data.field(), 2, data.e_basis());
        assert!(c.same_span(&e));
    }

    #[test]
    fn budget_is_enforced() {
        let b = Budget {
            max_operator_dim: 100,
            ..Budget::default()
        };
        assert_eq!(
            centralizer_basis(&siegel(1), 4, &b).unwrap_err(),
            Error::SizeBudgetExceeded {
                dim: 256,
                budget: 100
            }
        );
    }

    #[test]
    fn extra_generator_cuts_the_commutant() {
        // Lie algebra of E = {Id} with a torus-only polarization is still sp2;
        // adding -Id as a group element changes nothing at even n.
        let f = FieldSpec::rationals();
        let minus = Mat::identity(&f, 2).scale(&f.from_int(-1));
        let data = PolarizedData::new(&f, 1, j(&f), vec![Mat::identity(&f, 2)], vec![minus]).unwrap();
        let b = Budget::default();
        assert_eq!(centralizer_basis(&data, 2, &b).unwrap().dim(), 2);
        // single-factor embedding of J is not equivariant for sp2
        let c = centralizer_basis(&data, 2, &b).unwrap();
        assert!(!c.contains(&factor_embed(&j(&f), 1, 2).unwrap()));
    }
}
