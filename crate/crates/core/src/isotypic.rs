//! Isotypic decomposition of `Λ^i(V^{⊕r})`: the center of the compressed
//! algebra, its primitive idempotents by eigen-splitting a random central
//! element, certificates, witnesses, optional finer (non-canonical)
//! splittings and intertwiners between pieces.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{kernel_basis, roots_in_field, Echelon, Field, Mat, Poly, Scalar, SparseVec};
use crate::lefschetz::{lie_algebra_basis, Budget, OperatorSpan, PolarizedData};
use crate::motivicalg::{
    bir_algebra, compressed_centralizer, cor_princ_report, product_data, CorPrincReport, Witness,
};
use crate::par;
use crate::tensorops::{
    antisymmetrizer, compress_unchecked, diagonal_lie_action, tensor_power, wedge_basis, WeightTag,
};

const COEFF_RANGE: i64 = 16;

/// `{z in span : zb = bz for every basis element b}`.
pub fn center_basis(alg: &OperatorSpan) -> OperatorSpan {
    let f = alg.field();
    let basis = alg.basis();
    let d = alg.op_dim();
    if basis.is_empty() {
        return OperatorSpan::empty(f, d);
    }
    // column k of the system: the commutators [b_k, b_j] stacked over j
    let columns: Vec<SparseVec> = par::map(&basis, |bk| {
        let mut col: SparseVec = Vec::new();
        for (j, bj) in basis.iter().enumerate() {
            let offset = j * d * d;
            let c = bk.mul(bj).sub(&bj.mul(bk));
            col.extend(c.vectorize().into_iter().map(|(x, v)| (offset + x, v)));
        }
        col
    });
    let system = Mat::from_rows(f, basis.len() * d * d, columns).transpose();
    let kernel = kernel_basis(&system);
    let elements: Vec<Mat> = kernel
        .iter()
        .map(|c| {
            c.iter()
                .fold(Mat::zeros(f, d, d), |acc, (k, x)| acc.axpy(x, &basis[*k]))
        })
        .collect();
    OperatorSpan::from_operators(f, d, &elements)
}

/// Monic minimal polynomial of `x` inside an algebra with unit `unit`.
pub fn min_poly_with_unit(x: &Mat, unit: &Mat) -> Poly {
    let f = x.field();
    let d = x.rows();
    let mut ech = Echelon::tracked(f, d * d);
    let mut power = unit.clone();
    for k in 0..=d * d {
        let v = power.vectorize();
        if let Some(combo) = ech.express(&v) {
            let mut coeffs = vec![f.zero(); k + 1];
            for (j, c) in combo {
                coeffs[j] = c.neg();
            }
            coeffs[k] = f.one();
            return Poly::new(coeffs);
        }
        ech.insert_tracked(&v, k);
        power = power.mul(x);
    }
    unreachable!("powers live in a space of dimension d^2")
}

fn random_combination(f: &Field, basis: &[Mat], rng: &mut ChaCha8Rng) -> Mat {
    let d = basis[0].rows();
    basis.iter().fold(Mat::zeros(f, d, d), |acc, b| {
        let c = rng.gen_range(-COEFF_RANGE..=COEFF_RANGE);
        acc.axpy(&f.from_int(c), b)
    })
}

/// `prod_{j != k} (x - λ_j u) / (λ_k - λ_j)` for each root `λ_k`.
fn lagrange_idempotents(x: &Mat, unit: &Mat, roots: &[Scalar]) -> Vec<Mat> {
    let f = x.field();
    roots
        .iter()
        .enumerate()
        .map(|(k, lk)| {
            let mut acc = unit.clone();
            for (j, lj) in roots.iter().enumerate() {
                if j == k {
                    continue;
                }
                let denom = f.inv(&lk.sub(lj)).expect("distinct roots");
                let factor = x.sub(&unit.scale(lj)).scale(&denom);
                acc = acc.mul(&factor);
            }
            acc
        })
        .collect()
}

enum Split {
    Done(Vec<Mat>),
    TooSmall,
    Repeated,
}

/// Tries to split `unit` by the eigenvalues of `x`.
fn try_split(x: &Mat, unit: &Mat) -> Result<Split> {
    let f = x.field();
    let p = min_poly_with_unit(x, unit);
    if p.degree().unwrap_or(0) < 2 {
        return Ok(Split::TooSmall);
    }
    let rs = roots_in_field(f, &p);
    if !rs.splits() {
        return Err(splitting_error(f, &rs.residual));
    }
    if rs.roots.iter().any(|(_, mult)| *mult > 1) {
        return Ok(Split::Repeated);
    }
    let roots: Vec<Scalar> = rs.roots.into_iter().map(|(r, _)| r).collect();
    Ok(Split::Done(lagrange_idempotents(x, unit, &roots)))
}

fn splitting_error(f: &Field, residual: &Poly) -> Error {
    Error::SplittingFieldRequired {
        poly: residual.format(f),
        coeffs: residual.coeffs().iter().map(|c| f.format(c)).collect(),
    }
}

fn sort_idempotents(mut ids: Vec<Mat>) -> Vec<Mat> {
    ids.sort_by(|a, b| match a.rank().cmp(&b.rank()) {
        Ordering::Equal => a.lex_cmp(b),
        o => o,
    });
    ids
}

/// Primitive central idempotents of a semisimple algebra containing the
/// identity, ordered by `(rank, entries)`.
///
/// A random central element generates the whole center exactly when its
/// minimal polynomial has degree `dim Z`; that element is then split by
/// Lagrange interpolation over its roots, which must lie in the field.
pub fn primitive_idempotents(alg: &OperatorSpan, seed: u64, retries: usize) -> Result<Vec<Mat>> {
    let f = alg.field().clone();
    let d = alg.op_dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    let id = Mat::identity(&f, d);
    let center = center_basis(alg).basis();
    if center.len() <= 1 {
        return Ok(vec![id]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries.max(1) {
        let z = random_combination(&f, &center, &mut rng);
        let p = min_poly_with_unit(&z, &id);
        if p.degree() != Some(center.len()) {
            continue;
        }
        if let Split::Done(ids) = try_split(&z, &id)? {
            return Ok(sort_idempotents(ids));
        }
    }
    Err(Error::CenterNotSeparated { retries })
}

/// Splits an idempotent `e` of the algebra into idempotents `e_k` with
/// `e_k alg e_k` one-dimensional. Not canonical: the result depends on the
/// seed.
pub fn fine_idempotents(alg: &OperatorSpan, e: &Mat, seed: u64, retries: usize) -> Result<Vec<Mat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = alg.basis();
    let mut out = Vec::new();
    let mut todo = vec![e.clone()];
    while let Some(u) = todo.pop() {
        let corner: Vec<Mat> = OperatorSpan::from_operators(
            alg.field(),
            alg.op_dim(),
            &basis.iter().map(|b| u.mul(b).mul(&u)).collect::<Vec<_>>(),
        )
        .basis();
        if corner.len() <= 1 {
            out.push(u);
            continue;
        }
        let mut candidates: Vec<Mat> = corner.clone();
        for _ in 0..retries.max(1) {
            candidates.push(random_combination(alg.field(), &corner, &mut rng));
        }
        let mut split = None;
        for x in &candidates {
            match try_split(x, &u) {
                Ok(Split::Done(ids)) => {
                    split = Some(ids);
                    break;
                }
                Ok(_) | Err(Error::SplittingFieldRequired { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        match split {
            Some(ids) => todo.extend(ids),
            None => return Err(Error::CenterNotSeparated { retries }),
        }
    }
    Ok(sort_idempotents(out))
}

/// Outcome of [`intertwiner`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intertwining {
    /// `u` in `q alg p`, `v` in `p alg q` with `vu = p` and `uv = q`.
    Isomorphic { u: Mat, v: Mat },
    NotIsomorphic,
}

/// Searches `q·alg·p` for an isomorphism between the images of `p` and `q`.
pub fn intertwiner(alg: &OperatorSpan, p: &Mat, q: &Mat, seed: u64, tries: usize) -> Intertwining {
    let rank = p.rank();
    if rank != q.rank() {
        return Intertwining::NotIsomorphic;
    }
    let f = alg.field().clone();
    let basis = alg.basis();
    let sandwich = |a: &Mat, b: &Mat| -> Vec<Mat> {
        OperatorSpan::from_operators(
            &f,
            alg.op_dim(),
            &basis.iter().map(|x| a.mul(x).mul(b)).collect::<Vec<_>>(),
        )
        .basis()
    };
    let forward = sandwich(q, p);
    let backward = sandwich(p, q);
    if forward.is_empty() || backward.is_empty() {
        return Intertwining::NotIsomorphic;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = forward.clone();
    for _ in 0..tries {
        candidates.push(random_combination(&f, &forward, &mut rng));
    }
    let d = alg.op_dim();
    for u in candidates {
        if u.rank() != rank {
            continue;
        }
        let mut ech = Echelon::tracked(&f, d * d);
        for (k, w) in backward.iter().enumerate() {
            ech.insert_tracked(&w.mul(&u).vectorize(), k);
        }
        let Some(combo) = ech.express(&p.vectorize()) else {
            continue;
        };
        let v = combo
            .iter()
            .fold(Mat::zeros(&f, d, d), |acc, (k, c)| acc.axpy(c, &backward[*k]));
        if u.mul(&v) == *q {
            return Intertwining::Isomorphic { u, v };
        }
    }
    Intertwining::NotIsomorphic
}

#[derive(Clone, Debug)]
pub struct Component {
    pub idempotent: Mat,
    pub rank: usize,
    pub witness: Witness,
    /// Set when the group acts trivially on the image.
    pub weight: Option<WeightTag>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certificates {
    pub idempotent: bool,
    pub orthogonal: bool,
    pub complete: bool,
    pub equivariant: bool,
    pub witnesses_verified: bool,
    pub ranks_sum_to_wedge_dim: bool,
    pub seed_independent: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.idempotent
            && self.orthogonal
            && self.complete
            && self.equivariant
            && self.witnesses_verified
            && self.ranks_sum_to_wedge_dim
            && self.seed_independent
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub i: usize,
    pub r: usize,
    pub field: Field,
    pub wedge_dim: usize,
    pub algebra_dim: usize,
    pub center_dim: usize,
    pub seed: u64,
    pub cor_princ: CorPrincReport,
    pub components: Vec<Component>,
    /// Finer splitting of each component, when requested.
    pub fine: Option<Vec<Vec<Mat>>>,
    pub certificates: Certificates,
    pub warnings: Vec<String>,
}

/// Options for [`decompose`].
#[derive(Clone, Copy, Debug, Default)]
pub struct DecomposeOptions {
    pub seed: u64,
    pub fine: bool,
}

/// The canonical decomposition of `Λ^i(V^{⊕r})` by primitive central
/// idempotents of the compressed algebra, each expressed as a word
/// combination and certified.
pub fn decompose(
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
    opts: DecomposeOptions,
) -> Result<DecompositionReport> {
    if i == 0 {
        return Err(Error::InvalidParams("exterior degree i must be at least 1".into()));
    }
    let pd = product_data(data, r)?;
    let f = pd.field().clone();
    let m = pd.m();
    let (bir, gens) = bir_algebra(data, i, r, budget)?;
    let cent = compressed_centralizer(data, i, r, budget)?;
    let cor_princ = cor_princ_report(&bir, &gens, &cent, i, r);
    let wedge_dim = wedge_basis(m, i).len();
    let mut warnings = Vec::new();
    if !f.irreducibility_verified() {
        warnings.push("field modulus has degree >= 4; irreducibility not verified".to_string());
    }
    if !cor_princ.pass {
        warnings.push("compressed algebra differs from the compressed commutant".to_string());
    }

    let alg = bir.span();
    let center_dim = center_basis(alg).dim();
    let retries = budget.idempotent_retries;
    let ids = primitive_idempotents(alg, opts.seed, retries)?;
    let other_seed = opts.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let seed_independent = primitive_idempotents(alg, other_seed, retries)? == ids;

    let group_ops = wedge_group_actions(&pd, i);
    let components: Vec<Component> = ids
        .iter()
        .map(|e| {
            let witness = bir.express(e).unwrap_or_default();
            Component {
                idempotent: e.clone(),
                rank: e.rank(),
                weight: weight_tag(e, &group_ops, i),
                witness,
            }
        })
        .collect();

    let id = Mat::identity(&f, wedge_dim);
    let pairs: Vec<(usize, usize)> = (0..ids.len())
        .flat_map(|a| (0..ids.len()).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let certificates = Certificates {
        idempotent: par::all(&ids, |e| e.is_idempotent()),
        orthogonal: par::all(&pairs, |&(a, b)| ids[a].mul(&ids[b]).is_zero()),
        complete: ids.iter().fold(Mat::zeros(&f, wedge_dim, wedge_dim), |acc, e| acc.add(e)) == id,
        equivariant: par::all(&ids, |e| group_ops.iter().all(|g| g.op.commutes_with(e))),
        witnesses_verified: par::all(&components, |c| {
            !c.witness.is_empty() && bir.evaluate(&gens, &c.witness) == c.idempotent
        }),
        ranks_sum_to_wedge_dim: components.iter().map(|c| c.rank).sum::<usize>() == wedge_dim,
        seed_independent,
    };

    let fine = if opts.fine {
        let mut out = Vec::new();
        for e in &ids {
            out.push(fine_idempotents(alg, e, opts.seed, retries)?);
        }
        Some(out)
    } else {
        None
    };

    Ok(DecompositionReport {
        i,
        r,
        field: f,
        wedge_dim,
        algebra_dim: bir.dim(),
        center_dim,
        seed: opts.seed,
        cor_princ,
        components,
        fine,
        certificates,
        warnings,
    })
}

struct GroupOp {
    op: Mat,
    /// Lie-algebra elements act by zero on invariants, group elements by one.
    infinitesimal: bool,
}

/// Compressed `Δ(X)` for the Lie algebra and `h^{⊗i}` for extra generators.
fn wedge_group_actions(pd: &PolarizedData, i: usize) -> Vec<GroupOp> {
    let m = pd.m();
    if wedge_basis(m, i).is_empty() {
        return Vec::new();
    }
    let anti = antisymmetrizer(pd.field(), i, m);
    let compress = |x: &Mat| compress_unchecked(&anti.mul(x).mul(&anti), i, m);
    let lie = lie_algebra_basis(pd);
    let mut ops: Vec<GroupOp> = par::map(&lie, |x| GroupOp {
        op: compress(&diagonal_lie_action(x, i)),
        infinitesimal: true,
    });
    ops.extend(pd.extra_generators().iter().map(|h| GroupOp {
        op: compress(&tensor_power(h, i)),
        infinitesimal: false,
    }));
    ops
}

/// Twist `-i/2` on components where the group acts trivially.
fn weight_tag(e: &Mat, ops: &[GroupOp], i: usize) -> Option<WeightTag> {
    if i % 2 == 1 {
        return None;
    }
    let trivial = ops.iter().all(|g| {
        let image = g.op.mul(e);
        if g.infinitesimal {
            image.is_zero()
        } else {
            image == *e
        }
    });
    trivial.then_some(WeightTag {
        twist: -(i as i64) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::lefschetz::centralizer_basis;
    use crate::tensorops::projector_p;

    fn j(f: &Field) -> Mat {
        Mat::from_ints(f, &[vec![0, 1], vec![-1, 0]])
    }

    fn siegel() -> PolarizedData {
        let f = FieldSpec::rationals();
        PolarizedData::new(&f, 1, j(&f), vec![Mat::identity(&f, 2)], vec![]).unwrap()
    }

    fn cm(f: &Field) -> PolarizedData {
        let jm = Mat::from_ints(f, &[vec![0, -1], vec![1, 0]]);
        PolarizedData::new(f, 1, j(f), vec![Mat::identity(f, 2), jm], vec![]).unwrap()
    }

    fn gaussian() -> Field {
        FieldSpec::from_strings(&["1".into(), "0".into(), "1".into()]).unwrap()
    }

    #[test]
    fn center_of_full_matrix_algebra_is_scalars() {
        let f = FieldSpec::rationals();
        let units: Vec<Mat> = (0..9)
            .map(|k| Mat::from_triplets(&f, 3, 3, [(k / 3, k % 3, f.one())]))
            .collect();
        let alg = OperatorSpan::from_operators(&f, 3, &units);
        assert_eq!(center_basis(&alg).dim(), 1);
    }

    #[test]
    fn siegel_pair_splits_into_p_and_complement() {
        let d = siegel();
        let alg = centralizer_basis(&d, 2, &Budget::default()).unwrap();
        assert_eq!(center_basis(&alg).dim(), 2);
        let ids = primitive_idempotents(&alg, 0, 8).unwrap();
        let p = projector_p(d.phi()).unwrap().matrix;
        let id = Mat::identity(d.field(), 4);
        assert_eq!(ids, vec![p.clone(), id.sub(&p)]);
        assert_eq!(ids.iter().map(Mat::rank).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn cm_needs_the_gaussian_field() {
        let q = FieldSpec::rationals();
        let alg = centralizer_basis(&cm(&q), 2, &Budget::default()).unwrap();
        match primitive_idempotents(&alg, 0, 8) {
            Err(Error::SplittingFieldRequired { coeffs, .. }) => assert_eq!(coeffs.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        let qi = gaussian();
        let alg = centralizer_basis(&cm(&qi), 2, &Budget::default()).unwrap();
        let ids = primitive_idempotents(&alg, 0, 8).unwrap();
        assert_eq!(ids.iter().map(Mat::rank).collect::<Vec<_>>(), vec![1, 1, 2]);
    }

    #[test]
    fn decompose_siegel_two_two() {
        let rep = decompose(&siegel(), 2, 2, &Budget::default(), DecomposeOptions::default()).unwrap();
        assert_eq!(rep.center_dim, 2);
        assert_eq!(rep.components.iter().map(|c| c.rank).collect::<Vec<_>>(), vec![3, 3]);
        assert!(rep.certificates.all(), "{:?}", rep.certificates);
        assert!(rep.cor_princ.pass);
        let tags: Vec<_> = rep.components.iter().map(|c| c.weight).collect();
        assert_eq!(tags.iter().filter(|t| t.is_some()).count(), 1);
    }

    #[test]
    fn decompose_twist_line_and_vanishing() {
        let b = Budget::default();
        let rep = decompose(&siegel(), 2, 1, &b, DecomposeOptions::default()).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.components[0].rank, 1);
        assert_eq!(rep.components[0].weight, Some(WeightTag { twist: -1 }));
        let rep = decompose(&siegel(), 3, 1, &b, DecomposeOptions::default()).unwrap();
        assert!(rep.components.is_empty());
        assert_eq!(rep.wedge_dim, 0);
        assert!(rep.certificates.all());
    }

    #[test]
    fn fine_split_and_intertwiners() {
        let opts = DecomposeOptions { seed: 3, fine: true };
        let (bir, _) = bir_algebra(&siegel(), 2, 2, &Budget::default()).unwrap();
        let rep = decompose(&siegel(), 2, 2, &Budget::default(), opts).unwrap();
        let fine = rep.fine.unwrap();
        let trivial = rep.components.iter().position(|c| c.weight.is_some()).unwrap();
        let lines = &fine[trivial];
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|p| p.rank() == 1 && p.is_idempotent()));
        let alg = bir.span();
        match intertwiner(alg, &lines[0], &lines[1], 0, 8) {
            Intertwining::Isomorphic { u, v } => {
                assert_eq!(v.mul(&u), lines[0]);
                assert_eq!(u.mul(&v), lines[1]);
            }
            Intertwining::NotIsomorphic => panic!("copies of the trivial line must be isomorphic"),
        }
        let other = &rep.components[1 - trivial].idempotent;
        assert_eq!(intertwiner(alg, &lines[0], other, 0, 8), Intertwining::NotIsomorphic);
        let p = &rep.components[0].idempotent;
        assert!(matches!(intertwiner(alg, p, p, 0, 8), Intertwining::Isomorphic { .. }));
    }

    #[test]
    fn min_poly_with_unit_matches_global_on_identity() {
        let f = FieldSpec::rationals();
        let x = Mat::from_ints(&f, &[vec![2, 1], vec![0, 3]]);
        assert_eq!(min_poly_with_unit(&x, &Mat::identity(&f, 2)), crate::exactfield::min_poly_of(&x));
    }
}
