//! Decorated perfect matchings on `n` input and `n` output slots, realized as
//! operators on `V^{⊗n}`. Their span is a second, generator-free description
//! of the commutant.

use serde::Serialize;

use crate::error::Result;
use crate::exactfield::Mat;
use crate::lefschetz::{Budget, OperatorSpan, PolarizedData};
use crate::par;
use crate::tensorops::{copairing_iota, factor_embed, pairing_pi, signed_perm, Permutation};

/// Slots `0..n` are inputs, `n..2n` outputs. Each pair is stored with its
/// smaller slot first and pairs are sorted by that slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DecoratedMatching {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Index into the E basis, one per pair.
    pub decorations: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrandKind {
    Through,
    Cap,
    Cup,
}

impl DecoratedMatching {
    pub fn undecorated(n: usize, pairs: Vec<(usize, usize)>) -> DecoratedMatching {
        let k = pairs.len();
        DecoratedMatching {
            n,
            pairs,
            decorations: vec![0; k],
        }
    }

    /// Undecorated through strands `in_k -> out_k`.
    pub fn identity(n: usize) -> DecoratedMatching {
        DecoratedMatching::undecorated(n, (0..n).map(|k| (k, n + k)).collect())
    }

    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; 2 * self.n];
        if self.pairs.len() != self.n || self.decorations.len() != self.n {
            return false;
        }
        for &(a, b) in &self.pairs {
            if a >= b || b >= 2 * self.n || seen[a] || seen[b] {
                return false;
            }
            seen[a] = true;
            seen[b] = true;
        }
        true
    }

    pub fn kind(&self, pair: (usize, usize)) -> StrandKind {
        match (pair.0 < self.n, pair.1 < self.n) {
            (true, true) => StrandKind::Cap,
            (false, false) => StrandKind::Cup,
            _ => StrandKind::Through,
        }
    }
}

/// All perfect matchings of `0..2n`, pairing the smallest free slot first.
pub fn enumerate_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for k in 0..free.len() {
            let b = free.remove(k);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(k, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (0..2 * n).collect(), &mut Vec::new(), &mut out);
    out
}

/// `(2n-1)!!`
pub fn matching_count(n: usize) -> u128 {
    (1..=n as u128).map(|k| 2 * k - 1).product()
}

/// Every matching with every decoration tuple drawn from `0..e_count`.
pub fn enumerate_decorated(n: usize, e_count: usize) -> Vec<DecoratedMatching> {
    let mut out = Vec::new();
    let tuples = e_count.pow(n as u32);
    for pairs in enumerate_matchings(n) {
        for t in 0..tuples {
            let mut decorations = Vec::with_capacity(n);
            let mut rest = t;
            for _ in 0..n {
                decorations.push(rest % e_count);
                rest /= e_count;
            }
            decorations.reverse();
            out.push(DecoratedMatching {
                n,
                pairs: pairs.clone(),
                decorations,
            });
        }
    }
    out
}

/// `S_out (Id^{⊗t} ⊗ cups) (Id^{⊗t} ⊗ caps) S_in D`, where `D` applies the
/// decorations of through strands and caps on their input slot, cups carry
/// theirs on the first output slot, and `S_in`, `S_out` are the signed
/// permutations that sort through strands (by input slot) in front of the
/// caps/cups.
pub fn matching_to_operator(mu: &DecoratedMatching, data: &PolarizedData) -> Mat {
    assert!(mu.is_well_formed(), "malformed matching {mu:?}");
    let f = data.field();
    let m = data.m();
    let n = mu.n;
    let e = data.e_basis();

    let mut through: Vec<(usize, usize, usize)> = Vec::new();
    let mut caps: Vec<(usize, usize, usize)> = Vec::new();
    let mut cups: Vec<(usize, usize, usize)> = Vec::new();
    for (&(a, b), &d) in mu.pairs.iter().zip(&mu.decorations) {
        match mu.kind((a, b)) {
            StrandKind::Through => through.push((a, b - n, d)),
            StrandKind::Cap => caps.push((a, b, d)),
            StrandKind::Cup => cups.push((a - n, b - n, d)),
        }
    }
    through.sort_unstable();
    let t = through.len();

    let mut op = Mat::identity(f, m.pow(n as u32));
    for &(slot, _, d) in through.iter().chain(caps.iter()) {
        op = factor_embed(&e[d], slot + 1, n).unwrap().mul(&op);
    }

    let mut in_order: Vec<usize> = through.iter().map(|s| s.0).collect();
    for &(a, b, _) in &caps {
        in_order.extend([a, b]);
    }
    let mut sigma_in = vec![0; n];
    for (k, &slot) in in_order.iter().enumerate() {
        sigma_in[slot] = k;
    }
    let s_in = signed_perm(f, &Permutation::from_images(sigma_in).unwrap(), m);

    let pi = pairing_pi(data.phi()).expect("validated form");
    let iota = copairing_iota(data.phi()).expect("validated form");
    let mut contract = Mat::identity(f, m.pow(t as u32));
    for _ in &caps {
        contract = contract.kron(&pi);
    }
    let mut expand = Mat::identity(f, m.pow(t as u32));
    for &(_, _, d) in &cups {
        let cup = factor_embed(&e[d], 1, 2).unwrap().mul(&iota);
        expand = expand.kron(&cup);
    }

    let mut out_order: Vec<usize> = through.iter().map(|s| s.1).collect();
    for &(a, b, _) in &cups {
        out_order.extend([a, b]);
    }
    let s_out = signed_perm(f, &Permutation::from_images(out_order).unwrap(), m);

    s_out.mul(&expand).mul(&contract).mul(&s_in).mul(&op)
}

/// Span of all decorated matching operators.
pub fn diagram_span(data: &PolarizedData, n: usize, budget: &Budget) -> Result<OperatorSpan> {
    budget.check(data.m(), n)?;
    let all = enumerate_decorated(n, data.e_basis().len());
    let ops = par::map(&all, |mu| matching_to_operator(mu, data));
    Ok(OperatorSpan::from_operators(
        data.field(),
        data.m().pow(n as u32),
        &ops,
    ))
}

/// How the diagram span sits inside the commutant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Diagnostic {
    Equal,
    /// The commutant is strictly larger: the Lie algebra plus the supplied
    /// extra generators probably miss components of the group.
    MissingComponents,
    /// Some diagram does not commute with the group: the datum is inconsistent.
    NotContained,
}

pub fn diagnose(diagrams: &OperatorSpan, centralizer: &OperatorSpan) -> Diagnostic {
    if !centralizer.contains_span(diagrams) {
        Diagnostic::NotContained
    } else if diagrams.dim() < centralizer.dim() {
        Diagnostic::MissingComponents
    } else {
        Diagnostic::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::lefschetz::centralizer_basis;
    use crate::tensorops::projector_p;

    fn siegel(g: usize) -> PolarizedData {
        let f = FieldSpec::rationals();
        let j = Mat::from_ints(&f, &[vec![0, 1], vec![-1, 0]]);
        let mut phi = j.clone();
        for _ in 1..g {
            phi = phi.direct_sum(&j);
        }
        PolarizedData::new(&f, g, phi, vec![Mat::identity(&f, 2 * g)], vec![]).unwrap()
    }

    fn cm() -> PolarizedData {
        let f = FieldSpec::rationals();
        let phi = Mat::from_ints(&f, &[vec![0, 1], vec![-1, 0]]);
        let jm = Mat::from_ints(&f, &[vec![0, -1], vec![1, 0]]);
        PolarizedData::new(&f, 1, phi, vec![Mat::identity(&f, 2), jm], vec![]).unwrap()
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        for n in 0..=5 {
            let all = enumerate_matchings(n);
            assert_eq!(all.len() as u128, matching_count(n));
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
        }
        assert_eq!(matching_count(3), 15);
    }

    #[test]
    fn enumeration_is_canonical() {
        assert_eq!(
            enumerate_matchings(2),
            vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]
        );
    }

    #[test]
    fn basic_diagrams() {
        let d = siegel(1);
        let f = d.field().clone();
        let id = matching_to_operator(&DecoratedMatching::identity(2), &d);
        assert!(id.is_identity());

        let cap_cup = DecoratedMatching::undecorated(2, vec![(0, 1), (2, 3)]);
        let p = projector_p(d.phi()).unwrap().matrix;
        assert_eq!(matching_to_operator(&cap_cup, &d), p.scale(&f.from_int(2)));

        let crossing = DecoratedMatching::undecorated(2, vec![(0, 3), (1, 2)]);
        let swap = signed_perm(&f, &Permutation::transposition(2, 0, 1), 2);
        assert_eq!(matching_to_operator(&crossing, &d), swap);
    }

    #[test]
    fn small_diagram_spans() {
        let b = Budget::default();
        assert_eq!(diagram_span(&siegel(1), 2, &b).unwrap().dim(), 2);
        assert_eq!(diagram_span(&siegel(2), 2, &b).unwrap().dim(), 3);
        for d in [siegel(1), cm()] {
            let one = diagram_span(&d, 1, &b).unwrap();
            let e = OperatorSpan::from_operators(d.field(), 2, d.e_basis());
            assert!(one.same_span(&e));
        }
    }

    #[test]
    fn diagrams_commute_with_the_group() {
        let b = Budget::default();
        for (d, n) in [(siegel(1), 3), (cm(), 2), (siegel(2), 2)] {
            let c = centralizer_basis(&d, n, &b).unwrap();
            let diag = diagram_span(&d, n, &b).unwrap();
            assert_eq!(diagnose(&diag, &c), Diagnostic::Equal);
        }
    }

    #[test]
    fn missing_components_are_flagged() {
        let b = Budget::default();
        let d = siegel(1);
        let c = centralizer_basis(&d, 2, &b).unwrap();
        let id_only = OperatorSpan::from_operators(d.field(), 4, [&Mat::identity(d.field(), 4)]);
        assert_eq!(diagnose(&id_only, &c), Diagnostic::MissingComponents);
        let junk = factor_embed(&Mat::from_ints(d.field(), &[vec![1, 0], vec![0, 0]]), 1, 2).unwrap();
        let bad = OperatorSpan::from_operators(d.field(), 4, [&junk]);
        assert_eq!(diagnose(&bad, &c), Diagnostic::NotContained);
    }
}
