//! The algebra generated by signed permutations, endomorphisms acting on the
//! first factor and the twist projector on the first two factors; its closure
//! with word witnesses, the product datum for `A^r`, the compressed algebra on
//! `Λ^i(V^{⊕r})`, and the span-equality checks against the oracles.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactfield::{Echelon, Field, Mat, Scalar, SparseVec};
use crate::lefschetz::{centralizer_basis, Budget, OperatorSpan, PolarizedData};
use crate::par;
use crate::tensorops::{
    antisymmetrizer, compress_unchecked, factor_embed, projector_p, signed_perm, wedge_basis,
    Permutation,
};
use crate::weyldiagrams::{diagnose, diagram_span, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorAtom {
    Perm(Permutation),
    /// `e_j` acting on the first factor.
    Endo(usize),
    /// `P ⊗ Id^{⊗(n-2)}`
    Proj,
    /// The antisymmetrizer; only used to bracket words acting on wedges.
    Antisym,
}

impl GeneratorAtom {
    /// `["perm", [[1, 2]]]`, `["endo", j]`, `["proj"]`, `["antisym"]`.
    pub fn to_json(&self) -> Value {
        match self {
            GeneratorAtom::Perm(p) => json!(["perm", p.cycles()]),
            GeneratorAtom::Endo(j) => json!(["endo", j]),
            GeneratorAtom::Proj => json!(["proj"]),
            GeneratorAtom::Antisym => json!(["antisym"]),
        }
    }
}

/// A product of atoms, read left to right as matrix products.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<GeneratorAtom>);

impl Word {
    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(GeneratorAtom::to_json).collect())
    }
}

/// A linear combination of words.
pub type Witness = Vec<(Scalar, Word)>;

pub fn witness_to_json(f: &Field, w: &Witness) -> Value {
    Value::Array(
        w.iter()
            .map(|(c, word)| json!([f.format(c), word.to_json()]))
            .collect(),
    )
}

/// Matrices of the atoms for a fixed datum and tensor power.
#[derive(Clone, Debug)]
pub struct Generators {
    data: PolarizedData,
    n: usize,
    items: Vec<(GeneratorAtom, Mat)>,
}

/// Adjacent transpositions, one `Endo` per E basis element, and `Proj` when
/// `n >= 2`. For `n = 1` the identity permutation stands in for the empty
/// set of transpositions.
pub fn bn_generators(data: &PolarizedData, n: usize) -> Result<Generators> {
    if n == 0 {
        return Err(Error::InvalidParams("tensor power n must be at least 1".into()));
    }
    let mut atoms = Vec::new();
    if n == 1 {
        atoms.push(GeneratorAtom::Perm(Permutation::identity(1)));
    }
    for k in 0..n.saturating_sub(1) {
        atoms.push(GeneratorAtom::Perm(Permutation::transposition(n, k, k + 1)));
    }
    atoms.extend((0..data.e_basis().len()).map(GeneratorAtom::Endo));
    if n >= 2 {
        atoms.push(GeneratorAtom::Proj);
    }
    let items = par::map(&atoms, |a| (a.clone(), atom_matrix(data, n, a)));
    Ok(Generators {
        data: data.clone(),
        n,
        items,
    })
}

fn atom_matrix(data: &PolarizedData, n: usize, atom: &GeneratorAtom) -> Mat {
    let f = data.field();
    let m = data.m();
    match atom {
        GeneratorAtom::Perm(p) => signed_perm(f, p, m),
        GeneratorAtom::Endo(j) => factor_embed(&data.e_basis()[*j], 1, n).unwrap(),
        GeneratorAtom::Proj => {
            let p = projector_p(data.phi()).expect("validated form").matrix;
            p.kron(&Mat::identity(f, m.pow(n as u32 - 2)))
        }
        GeneratorAtom::Antisym => antisymmetrizer(f, n, m),
    }
}

impl Generators {
    pub fn data(&self) -> &PolarizedData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn op_dim(&self) -> usize {
        self.data.m().pow(self.n as u32)
    }

    pub fn items(&self) -> &[(GeneratorAtom, Mat)] {
        &self.items
    }

    /// Keeps only the atoms accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(&GeneratorAtom) -> bool) -> Generators {
        Generators {
            data: self.data.clone(),
            n: self.n,
            items: self.items.iter().filter(|(a, _)| keep(a)).cloned().collect(),
        }
    }

    pub fn atom(&self, atom: &GeneratorAtom) -> Mat {
        self.items
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| atom_matrix(&self.data, self.n, atom))
    }

    pub fn eval(&self, word: &Word) -> Mat {
        let mut acc = Mat::identity(self.data.field(), self.op_dim());
        for a in &word.0 {
            acc = acc.mul(&self.atom(a));
        }
        acc
    }

    pub fn eval_witness(&self, w: &Witness) -> Mat {
        let f = self.data.field();
        let d = self.op_dim();
        w.iter()
            .fold(Mat::zeros(f, d, d), |acc, (c, word)| acc.axpy(c, &self.eval(word)))
    }
}

/// A span with, for every basis element, a combination of words evaluating
/// to it. With `wedge = Some(i)` words act on `V^{⊗i}` and are compressed to
/// `Λ^i V` after evaluation.
#[derive(Clone, Debug)]
pub struct WitnessedSpan {
    span: OperatorSpan,
    witnesses: Vec<Witness>,
    wedge: Option<usize>,
}

impl WitnessedSpan {
    pub fn span(&self) -> &OperatorSpan {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn wedge(&self) -> Option<usize> {
        self.wedge
    }

    /// Evaluates a witness in this span's operator space.
    pub fn evaluate(&self, gens: &Generators, w: &Witness) -> Mat {
        let full = gens.eval_witness(w);
        match self.wedge {
            Some(i) => compress_unchecked(&full, i, gens.data().m()),
            None => full,
        }
    }

    /// Every basis element equals the evaluation of its witness.
    pub fn verify_witnesses(&self, gens: &Generators) -> bool {
        let basis = self.span.basis();
        let idx: Vec<usize> = (0..basis.len()).collect();
        par::all(&idx, |&k| self.evaluate(gens, &self.witnesses[k]) == basis[k])
    }

    /// A witness for `op`, when it lies in the span.
    pub fn express(&self, op: &Mat) -> Option<Witness> {
        let f = self.span.field();
        let mut ech = Echelon::tracked(f, self.span.op_dim() * self.span.op_dim());
        for (k, v) in self.span.basis_vectors().iter().enumerate() {
            ech.insert_tracked(v, k);
        }
        let combo = ech.express(&op.vectorize())?;
        Some(merge_witnesses(
            f,
            combo.iter().map(|(k, c)| (c, &self.witnesses[*k])),
        ))
    }
}

fn merge_witnesses<'a>(
    f: &Field,
    terms: impl IntoIterator<Item = (&'a Scalar, &'a Witness)>,
) -> Witness {
    let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
    for (c, w) in terms {
        for (x, word) in w {
            acc.entry(word.clone())
                .or_insert_with(|| f.zero())
                .add_assign(&f.mul(c, x));
        }
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| (c, w))
        .collect()
}

fn combos_to_witnesses(f: &Field, combos: &[SparseVec], words: &[Word]) -> Vec<Witness> {
    combos
        .iter()
        .map(|combo| {
            let singles: Vec<(Scalar, Witness)> = combo
                .iter()
                .map(|(k, c)| (c.clone(), vec![(f.one(), words[*k].clone())]))
                .collect();
            merge_witnesses(f, singles.iter().map(|(c, w)| (c, w)))
        })
        .collect()
}

/// Breadth-first closure: start from the empty word and the generators, then
/// repeatedly multiply the elements added in the last wave by every
/// generator on the left, until a wave adds nothing.
pub fn algebra_closure(gens: &Generators, budget: &Budget) -> Result<WitnessedSpan> {
    budget.check(gens.data().m(), gens.n())?;
    let f = gens.data().field().clone();
    let d = gens.op_dim();
    let mut ech = Echelon::tracked(&f, d * d);
    let mut words: Vec<Word> = Vec::new();
    let mut frontier: Vec<(Word, Mat)> = Vec::new();

    let seeds = std::iter::once((Word::default(), Mat::identity(&f, d))).chain(
        gens.items()
            .iter()
            .map(|(a, m)| (Word(vec![a.clone()]), m.clone())),
    );
    for (w, m) in seeds {
        if ech.insert_tracked(&m.vectorize(), words.len()).is_some() {
            words.push(w.clone());
            frontier.push((w, m));
        }
    }

    let mut waves = 0;
    while !frontier.is_empty() {
        if waves == budget.max_closure_waves {
            return Err(Error::ClosureWavesExceeded { waves });
        }
        waves += 1;
        let pairs: Vec<(usize, usize)> = (0..frontier.len())
            .flat_map(|k| (0..gens.items().len()).map(move |g| (k, g)))
            .collect();
        let products = par::map(&pairs, |&(k, g)| gens.items()[g].1.mul(&frontier[k].1));
        let mut next = Vec::new();
        for (&(k, g), prod) in pairs.iter().zip(products) {
            if ech.insert_tracked(&prod.vectorize(), words.len()).is_some() {
                let mut w = vec![gens.items()[g].0.clone()];
                w.extend(frontier[k].0 .0.iter().cloned());
                words.push(Word(w.clone()));
                next.push((Word(w), prod));
            }
        }
        frontier = next;
    }

    let basis = ech.basis();
    let witnesses = combos_to_witnesses(&f, &ech.basis_combos().unwrap(), &words);
    Ok(WitnessedSpan {
        span: OperatorSpan::from_vectors(&f, d, &basis),
        witnesses,
        wedge: None,
    })
}

/// `V^{⊕r}` with `φ^{⊕r}`, E basis `unit_ab ⊗ e_j` ordered by `(a, b, j)`,
/// and extra generators acting diagonally.
pub fn product_data(data: &PolarizedData, r: usize) -> Result<PolarizedData> {
    if r == 0 {
        return Err(Error::InvalidParams("r must be at least 1".into()));
    }
    let f = data.field();
    let id_r = Mat::identity(f, r);
    let unit = |a: usize, b: usize| Mat::from_triplets(f, r, r, [(a, b, f.one())]);
    let mut e_basis = Vec::with_capacity(r * r * data.e_basis().len());
    for a in 0..r {
        for b in 0..r {
            for e in data.e_basis() {
                e_basis.push(unit(a, b).kron(e));
            }
        }
    }
    let extra = data.extra_generators().iter().map(|h| id_r.kron(h)).collect();
    Ok(PolarizedData::new(
        f,
        data.g() * r,
        id_r.kron(data.phi()),
        e_basis,
        extra,
    )?)
}

/// `P_i ∘ B_i(product datum) ∘ P_i` compressed to `Λ^i(V^{⊕r})`, together
/// with the generators its witnesses refer to.
pub fn bir_algebra(
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
) -> Result<(WitnessedSpan, Generators)> {
    let pd = product_data(data, r)?;
    let gens = bn_generators(&pd, i)?;
    let f = pd.field().clone();
    let m = pd.m();
    let k = wedge_basis(m, i).len();
    if k == 0 {
        return Ok((
            WitnessedSpan {
                span: OperatorSpan::empty(&f, 0),
                witnesses: Vec::new(),
                wedge: Some(i),
            },
            gens,
        ));
    }
    let closure = algebra_closure(&gens, budget)?;
    let anti = antisymmetrizer(&f, i, m);
    let basis = closure.span().basis();
    let compressed = par::map(&basis, |b| compress_unchecked(&anti.mul(b).mul(&anti), i, m));
    let mut ech = Echelon::tracked(&f, k * k);
    for (s, c) in compressed.iter().enumerate() {
        ech.insert_tracked(&c.vectorize(), s);
    }
    let bracketed: Vec<Witness> = closure
        .witnesses()
        .iter()
        .map(|w| {
            w.iter()
                .map(|(c, word)| {
                    let mut atoms = vec![GeneratorAtom::Antisym];
                    atoms.extend(word.0.iter().cloned());
                    atoms.push(GeneratorAtom::Antisym);
                    (c.clone(), Word(atoms))
                })
                .collect()
        })
        .collect();
    let witnesses = ech
        .basis_combos()
        .unwrap()
        .iter()
        .map(|combo| merge_witnesses(&f, combo.iter().map(|(s, c)| (c, &bracketed[*s]))))
        .collect();
    Ok((
        WitnessedSpan {
            span: OperatorSpan::from_vectors(&f, k, &ech.basis()),
            witnesses,
            wedge: Some(i),
        },
        gens,
    ))
}

/// The commutant of the product datum at power `i`, bracketed by the
/// antisymmetrizer and compressed to `Λ^i(V^{⊕r})`.
pub fn compressed_centralizer(
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
) -> Result<OperatorSpan> {
    let pd = product_data(data, r)?;
    let f = pd.field().clone();
    let m = pd.m();
    let k = wedge_basis(m, i).len();
    if k == 0 {
        return Ok(OperatorSpan::empty(&f, 0));
    }
    let c = centralizer_basis(&pd, i, budget)?;
    let anti = antisymmetrizer(&f, i, m);
    let basis = c.basis();
    let compressed = par::map(&basis, |b| compress_unchecked(&anti.mul(b).mul(&anti), i, m));
    Ok(OperatorSpan::from_operators(&f, k, &compressed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThmCleReport {
    pub n: usize,
    pub closure_dim: usize,
    pub centralizer_dim: usize,
    pub diagram_dim: usize,
    pub closure_eq_centralizer: bool,
    pub closure_eq_diagram: bool,
    pub centralizer_eq_diagram: bool,
    /// Each generator commutes with the group.
    pub generators_in_centralizer: bool,
    pub closure_is_algebra: bool,
    pub witnesses_verified: bool,
    pub diagnostic: Diagnostic,
    pub pass: bool,
}

/// Three-way comparison of the generated algebra, the brute-force commutant
/// and the diagram span at tensor power `n`.
pub fn verify_thm_cle(data: &PolarizedData, n: usize, budget: &Budget) -> Result<ThmCleReport> {
    let gens = bn_generators(data, n)?;
    verify_thm_cle_with(&gens, budget)
}

/// [`verify_thm_cle`] for an arbitrary generator set.
pub fn verify_thm_cle_with(gens: &Generators, budget: &Budget) -> Result<ThmCleReport> {
    Ok(verify_thm_cle_detailed(gens, budget)?.0)
}

/// [`verify_thm_cle_with`], also returning the witnessed closure.
pub fn verify_thm_cle_detailed(
    gens: &Generators,
    budget: &Budget,
) -> Result<(ThmCleReport, WitnessedSpan)> {
    let data = gens.data();
    let n = gens.n();
    let closure = algebra_closure(gens, budget)?;
    let centralizer = centralizer_basis(data, n, budget)?;
    let diagrams = diagram_span(data, n, budget)?;
    let c = closure.span();
    let closure_eq_centralizer = c.same_span(&centralizer);
    let closure_eq_diagram = c.same_span(&diagrams);
    let centralizer_eq_diagram = centralizer.same_span(&diagrams);
    let generators_in_centralizer = gens.items().iter().all(|(_, g)| centralizer.contains(g));
    let report = ThmCleReport {
        n,
        closure_dim: c.dim(),
        centralizer_dim: centralizer.dim(),
        diagram_dim: diagrams.dim(),
        closure_eq_centralizer,
        closure_eq_diagram,
        centralizer_eq_diagram,
        generators_in_centralizer,
        closure_is_algebra: c.is_algebra(),
        witnesses_verified: closure.verify_witnesses(gens),
        diagnostic: diagnose(&diagrams, &centralizer),
        pass: closure_eq_centralizer && closure_eq_diagram && centralizer_eq_diagram,
    };
    Ok((report, closure))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorPrincReport {
    pub i: usize,
    pub r: usize,
    pub wedge_dim: usize,
    pub bir_dim: usize,
    pub centralizer_dim: usize,
    pub bir_in_centralizer: bool,
    pub centralizer_in_bir: bool,
    pub witnesses_verified: bool,
    pub pass: bool,
}

pub fn verify_cor_princ(
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
) -> Result<CorPrincReport> {
    let (bir, gens) = bir_algebra(data, i, r, budget)?;
    let cent = compressed_centralizer(data, i, r, budget)?;
    Ok(cor_princ_report(&bir, &gens, &cent, i, r))
}

/// Compares an already computed compressed algebra with the compressed
/// commutant.
pub fn cor_princ_report(
    bir: &WitnessedSpan,
    gens: &Generators,
    cent: &OperatorSpan,
    i: usize,
    r: usize,
) -> CorPrincReport {
    let bir_in_centralizer = cent.contains_span(bir.span());
    let centralizer_in_bir = bir.span().contains_span(cent);
    CorPrincReport {
        i,
        r,
        wedge_dim: bir.span().op_dim(),
        bir_dim: bir.dim(),
        centralizer_dim: cent.dim(),
        bir_in_centralizer,
        centralizer_in_bir,
        witnesses_verified: bir.verify_witnesses(gens),
        pass: bir_in_centralizer && centralizer_in_bir,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;

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
    fn generator_counts() {
        let g1 = bn_generators(&siegel(1), 1).unwrap();
        assert_eq!(
            g1.items().iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(),
            vec![GeneratorAtom::Perm(Permutation::identity(1)), GeneratorAtom::Endo(0)]
        );
        let g2 = bn_generators(&siegel(1), 2).unwrap();
        assert_eq!(g2.items().len(), 3);
        assert!(bn_generators(&siegel(1), 0).is_err());
    }

    #[test]
    fn closure_of_identity_is_one_dimensional() {
        let gens = bn_generators(&siegel(1), 2)
            .unwrap()
            .filtered(|a| matches!(a, GeneratorAtom::Endo(_)));
        let c = algebra_closure(&gens, &Budget::default()).unwrap();
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn closure_dims_and_witnesses() {
        let b = Budget::default();
        for (d, n, dim) in [(siegel(1), 2, 2), (cm(), 2, 6), (siegel(1), 3, 5)] {
            let gens = bn_generators(&d, n).unwrap();
            let c = algebra_closure(&gens, &b).unwrap();
            assert_eq!(c.dim(), dim);
            assert!(c.verify_witnesses(&gens));
            assert!(c.span().is_algebra());
        }
    }

    #[test]
    fn closure_wave_limit_is_enforced() {
        let gens = bn_generators(&siegel(1), 3).unwrap();
        let b = Budget {
            max_closure_waves: 0,
            ..Budget::default()
        };
        assert!(matches!(
            algebra_closure(&gens, &b),
            Err(Error::ClosureWavesExceeded { .. })
        ));
    }

    #[test]
    fn word_serialization() {
        let w = Word(vec![
            GeneratorAtom::Perm(Permutation::transposition(3, 0, 1)),
            GeneratorAtom::Endo(2),
            GeneratorAtom::Proj,
        ]);
        assert_eq!(w.to_json().to_string(), r#"[["perm",[[1,2]]],["endo",2],["proj"]]"#);
    }

    #[test]
    fn product_data_shapes() {
        let p = product_data(&siegel(1), 2).unwrap();
        assert_eq!(p.m(), 4);
        assert_eq!(p.e_basis().len(), 4);
        let same = product_data(&cm(), 1).unwrap();
        assert_eq!(same.e_basis(), cm().e_basis());
        assert_eq!(same.phi(), cm().phi());
    }

    #[test]
    fn thm_cle_small_cases() {
        let b = Budget::default();
        let rep = verify_thm_cle(&siegel(1), 2, &b).unwrap();
        assert!(rep.pass && rep.witnesses_verified && rep.generators_in_centralizer);
        assert_eq!((rep.closure_dim, rep.centralizer_dim, rep.diagram_dim), (2, 2, 2));
        let rep = verify_thm_cle(&cm(), 1, &b).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.closure_dim, 2);
    }

    #[test]
    fn removing_proj_breaks_siegel_two() {
        let b = Budget::default();
        let gens = bn_generators(&siegel(2), 2)
            .unwrap()
            .filtered(|a| *a != GeneratorAtom::Proj);
        let rep = verify_thm_cle_with(&gens, &b).unwrap();
        assert!(!rep.pass);
        assert_eq!((rep.closure_dim, rep.centralizer_dim), (2, 3));
    }

    #[test]
    fn bir_small_cases() {
        let b = Budget::default();
        for (i, r, dim) in [(1, 1, 1), (1, 2, 4), (2, 1, 1), (2, 2, 10)] {
            let rep = verify_cor_princ(&siegel(1), i, r, &b).unwrap();
            assert!(rep.pass && rep.witnesses_verified, "{rep:?}");
            assert_eq!(rep.bir_dim, dim);
        }
        let (span, _) = bir_algebra(&siegel(1), 3, 1, &b).unwrap();
        assert_eq!((span.dim(), span.span().op_dim()), (0, 0));
    }

    #[test]
    fn bir_witness_of_an_arbitrary_element() {
        let b = Budget::default();
        let (bir, gens) = bir_algebra(&siegel(1), 2, 2, &b).unwrap();
        let basis = bir.span().basis();
        let f = bir.span().field().clone();
        let x = basis[0].add(&basis[3].scale(&f.from_int(-2)));
        let w = bir.express(&x).unwrap();
        assert_eq!(bir.evaluate(&gens, &w), x);
    }
}
