//! Univariate polynomials over a [`FieldSpec`], plus the rational-root test.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{FieldSpec, Rational, Scalar};
use super::mat::Mat;

/// Coefficients low to high; the leading coefficient is never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(s: Scalar) -> Poly {
        Poly::new(vec![s])
    }

    pub fn new(mut coeffs: Vec<Scalar>) -> Poly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_rationals(f: &FieldSpec, coeffs: &[Rational]) -> Poly {
        Poly::new(coeffs.iter().map(|c| f.from_rational(c.clone())).collect())
    }

    /// `x - root`
    pub fn linear(f: &FieldSpec, root: &Scalar) -> Poly {
        Poly::new(vec![root.neg(), f.one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn monic(&self, f: &FieldSpec) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = f.inv(lc).expect("nonzero leading coefficient");
                self.scale(f, &inv)
            }
        }
    }

    pub fn scale(&self, f: &FieldSpec, s: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| f.mul(c, s)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, f: &FieldSpec, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                f.mul_add_assign(&mut out[i + j], a, b);
            }
        }
        Poly::new(out)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, f: &FieldSpec, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = f.mul(&rem[top], &lead_inv);
            let shift = top - dd;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] = rem[shift + j].sub(&f.mul(&c, dc));
                }
            }
            quot[shift] = c;
            rem.pop();
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, f: &FieldSpec, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::constant(f.one()), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::constant(f.one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(f, &r1);
            let s = s0.sub(&q.mul(f, &s1));
            let t = t0.sub(&q.mul(f, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = f.inv(lc).unwrap();
                (r0.scale(f, &inv), s0.scale(f, &inv), t0.scale(f, &inv))
            }
        }
    }

    pub fn derivative(&self, f: &FieldSpec) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| f.mul(c, &f.from_int(k as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, f: &FieldSpec, x: &Scalar) -> Scalar {
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.mul(&acc, x).add(c);
        }
        acc
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_mat(&self, m: &Mat) -> Mat {
        let f = m.field();
        let n = m.rows();
        let mut acc = Mat::zeros(f, n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&Mat::identity(f, n).scale(c));
        }
        acc
    }

    /// Coefficients as rationals, when they all lie in Q.
    pub fn to_rationals(&self) -> Option<Vec<Rational>> {
        self.coeffs
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    pub fn format(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = if f.degree() == 1 {
                c.coords()[0].to_string()
            } else {
                format!("({})", f.format(c))
            };
            terms.push(match (k, coeff.as_str()) {
                (0, _) => coeff,
                (1, "1") => "x".to_string(),
                (1, _) => format!("{coeff}*x"),
                (_, "1") => format!("x^{k}"),
                _ => format!("{coeff}*x^{k}"),
            });
        }
        terms.join(" + ")
    }
}

impl fmt::Display for Poly {
    /// Rational-coefficient rendering; extension coefficients show as coordinate lists.
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(fm, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = match c.as_rational() {
                Some(q) => q.to_string(),
                None => format!(
                    "({})",
                    c.coords()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            };
            if !first {
                write!(fm, " + ")?;
            }
            first = false;
            match (k, coeff.as_str()) {
                (0, _) => write!(fm, "{coeff}")?,
                (1, "1") => write!(fm, "x")?,
                (1, _) => write!(fm, "{coeff}*x")?,
                (_, "1") => write!(fm, "x^{k}")?,
                _ => write!(fm, "{coeff}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// All distinct rational roots of a polynomial with rational coefficients
/// (low to high), in increasing order.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut ints = clear_denominators(coeffs);
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    if ints.len() < 2 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // zero roots
    let lowest = ints.iter().position(|c| !c.is_zero()).unwrap();
    if lowest > 0 {
        roots.push(Rational::zero());
        ints.drain(..lowest);
    }
    if ints.len() >= 2 {
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let ps = divisors(&a0);
        let qs = divisors(&an);
        for p in &ps {
            for q in &qs {
                if !p.gcd(q).is_one() {
                    continue;
                }
                for sign in [1i32, -1] {
                    let cand = Rational::new(p * BigInt::from(sign), q.clone());
                    if eval_int_poly(&ints, &cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

fn clear_denominators(coeffs: &[Rational]) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

fn eval_int_poly(coeffs: &[BigInt], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + Rational::from_integer(c.clone());
    }
    acc
}

/// Positive divisors by trial division. Cofactors that survive trial division
/// up to `TRIAL_LIMIT` are treated as prime.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    const TRIAL_LIMIT: u64 = 2_000_000;
    let mut rest = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (prime, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= &prime;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Outcome of trying to split a polynomial into linear factors over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSplit {
    /// Distinct roots found, each with its multiplicity.
    pub roots: Vec<(Scalar, usize)>,
    /// Monic cofactor with no root found in the field (constant 1 on success).
    pub residual: Poly,
}

impl RootSplit {
    pub fn splits(&self) -> bool {
        self.residual.degree() == Some(0)
    }
}

/// Finds roots in the field by the rational-root test on the rational part of
/// the polynomial, then the quadratic formula on any remaining quadratic
/// factor. No general factorization is attempted.
pub fn roots_in_field(f: &FieldSpec, p: &Poly) -> RootSplit {
    let mut rest = p.monic(f);
    let mut roots: Vec<(Scalar, usize)> = Vec::new();

    // A rational root of p is a common root of every coordinate polynomial.
    let d = f.degree();
    let q = FieldSpec::rationals();
    let mut common = Poly::zero();
    for k in 0..d {
        let comp: Vec<Rational> = rest.coeffs.iter().map(|c| c.coords()[k].clone()).collect();
        common = common.gcd(&q, &Poly::from_rationals(&q, &comp));
    }
    let common_rat = common.to_rationals().unwrap_or_default();
    for r in rational_roots(&common_rat) {
        let root = f.from_rational(r);
        let mult = divide_out(f, &mut rest, &root);
        roots.push((root, mult));
    }

    if rest.degree() == Some(2) {
        // x^2 + b x + c
        let b = &rest.coeffs[1];
        let c = &rest.coeffs[0];
        let disc = f.mul(b, b).sub(&f.mul(&f.from_int(4), c));
        if let Some(s) = f.sqrt(&disc) {
            let half = f.inv(&f.from_int(2)).unwrap();
            let r1 = f.mul(&b.neg().add(&s), &half);
            let r2 = f.mul(&b.neg().sub(&s), &half);
            if r1 == r2 {
                roots.push((r1, 2));
            } else {
                roots.push((r1, 1));
                roots.push((r2, 1));
            }
            rest = Poly::constant(f.one());
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    RootSplit {
        roots,
        residual: rest,
    }
}

fn divide_out(f: &FieldSpec, p: &mut Poly, root: &Scalar) -> usize {
    let lin = Poly::linear(f, root);
    let mut mult = 0;
    loop {
        let (quot, rem) = p.div_rem(f, &lin);
        if !rem.is_zero() {
            break;
        }
        *p = quot;
        mult += 1;
    }
    mult
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::field::FieldSpec;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rational_roots_of_simple_polys() {
        // 2x^2 - 3x + 1 = (2x - 1)(x - 1)
        let roots = rational_roots(&[q(1), q(-3), q(2)]);
        assert_eq!(roots, vec![Rational::new(1.into(), 2.into()), q(1)]);
        assert!(rational_roots(&[q(1), q(0), q(1)]).is_empty());
        assert_eq!(rational_roots(&[q(0), q(0), q(1)]), vec![q(0)]);
    }

    #[test]
    fn divisors_of_twelve() {
        let ds: Vec<i64> = divisors(&BigInt::from(12))
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect();
        assert_eq!(ds, vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn gcd_and_ext_gcd() {
        let f = FieldSpec::rationals();
        // (x-1)(x-2) and (x-1)(x+3)
        let a = Poly::from_rationals(&f, &[q(2), q(-3), q(1)]);
        let b = Poly::from_rationals(&f, &[q(-3), q(2), q(1)]);
        let g = a.gcd(&f, &b);
        assert_eq!(g, Poly::from_rationals(&f, &[q(-1), q(1)]));
        let (g2, s, t) = a.ext_gcd(&f, &b);
        assert_eq!(g2, g);
        assert_eq!(s.mul(&f, &a).add(&t.mul(&f, &b)), g);
    }

    #[test]
    fn x2_plus_1_splits_only_over_gaussian() {
        let qf = FieldSpec::rationals();
        let p = Poly::from_rationals(&qf, &[q(1), q(0), q(1)]);
        let split = roots_in_field(&qf, &p);
        assert!(!split.splits());
        assert_eq!(split.residual, p);

        let gi = FieldSpec::new(vec![q(1), q(0), q(1)]).unwrap();
        let p = Poly::from_rationals(&gi, &[q(-1), q(1), q(-1), q(1)]); // (x-1)(x^2+1)
        let split = roots_in_field(&gi, &p);
        assert!(split.splits());
        assert_eq!(split.roots.len(), 3);
        for (r, m) in &split.roots {
            assert_eq!(*m, 1);
            assert!(p.eval(&gi, r).is_zero());
        }
    }

    #[test]
    fn repeated_roots_get_multiplicities() {
        let f = FieldSpec::rationals();
        // (x - 2)^2 (x + 1)
        let p = Poly::from_rationals(&f, &[q(4), q(0), q(-3), q(1)]);
        let split = roots_in_field(&f, &p);
        assert!(split.splits());
        assert_eq!(split.roots, vec![(f.from_int(-1), 1), (f.from_int(2), 2)]);
    }
}
