//! Exact scalars: elements of Q or of a simple extension Q[x]/(m(x)).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::poly::{rational_roots, Poly};
use crate::error::FieldError;

pub type Rational = BigRational;

/// Shared handle to a validated coefficient field.
pub type Field = Arc<FieldSpec>;

/// Coordinates in the power basis `1, a, ..., a^(d-1)` of `Q[x]/(m)`.
///
/// A scalar carries no reference to its field; multiplication and inversion
/// go through [`FieldSpec`]. Addition and negation are coordinate-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    coords: SmallVec<[Rational; 2]>,
}

impl Scalar {
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the scalar lies in the prime field.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        Scalar {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Scalar) {
        for (a, b) in self.coords.iter_mut().zip(other.coords.iter()) {
            *a += b;
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Scalar {
        Scalar {
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }
}

/// A validated simple extension of Q, given by a monic squarefree modulus.
///
/// Degree 1 (`m(x) = x - c`) encodes Q itself.
#[derive(Debug, PartialEq, Eq)]
pub struct FieldSpec {
    min_poly: Vec<Rational>,
    irreducibility_verified: bool,
}

impl FieldSpec {
    /// The rational numbers, `m(x) = x`.
    pub fn rationals() -> Field {
        Arc::new(FieldSpec {
            min_poly: vec![Rational::zero(), Rational::one()],
            irreducibility_verified: true,
        })
    }

    /// Validates `m` (coefficients low to high) and builds the field.
    ///
    /// Irreducibility is decided exactly for degree at most 3 by the rational
    /// root test. Above that only squarefreeness is enforced and
    /// [`FieldSpec::irreducibility_verified`] reports `false`.
    pub fn new(min_poly: Vec<Rational>) -> Result<Field, FieldError> {
        if min_poly.len() < 2 {
            return Err(FieldError::DegreeZero);
        }
        if !min_poly.last().unwrap().is_one() {
            return Err(FieldError::NotMonic);
        }
        let degree = min_poly.len() - 1;
        let mut irreducibility_verified = true;
        if degree >= 2 {
            let q = FieldSpec::rationals();
            let m = Poly::from_rationals(&q, &min_poly);
            let g = m.gcd(&q, &m.derivative(&q));
            if g.degree() != Some(0) {
                return Err(FieldError::NotSquarefree);
            }
            if let Some(r) = rational_roots(&min_poly).into_iter().next() {
                return Err(FieldError::Reducible(format_rational(&r)));
            }
            irreducibility_verified = degree <= 3;
        }
        Ok(Arc::new(FieldSpec {
            min_poly,
            irreducibility_verified,
        }))
    }

    /// Parses rational strings such as `"1"`, `"-3/4"`.
    pub fn from_strings(min_poly: &[String]) -> Result<Field, FieldError> {
        let coeffs = min_poly
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| FieldError::Parse(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        FieldSpec::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[Rational] {
        &self.min_poly
    }

    pub fn irreducibility_verified(&self) -> bool {
        self.irreducibility_verified
    }

    pub fn is_rational_field(&self) -> bool {
        self.degree() == 1
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            coords: (0..self.degree()).map(|_| Rational::zero()).collect(),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(&self, q: Rational) -> Scalar {
        let mut s = self.zero();
        s.coords[0] = q;
        s
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// Builds a scalar from power-basis coordinates; missing trailing
    /// coordinates are zero, extra ones are reduced modulo `m`.
    pub fn from_coords(&self, coords: &[Rational]) -> Scalar {
        let d = self.degree();
        if coords.len() <= d {
            let mut s = self.zero();
            for (slot, c) in s.coords.iter_mut().zip(coords) {
                *slot = c.clone();
            }
            return s;
        }
        let mut buf = coords.to_vec();
        self.reduce_in_place(&mut buf);
        Scalar {
            coords: buf.into_iter().take(d).collect(),
        }
    }

    /// The class of `x` in `Q[x]/(m)`.
    pub fn generator(&self) -> Scalar {
        if self.degree() == 1 {
            return self.from_rational(-self.min_poly[0].clone());
        }
        let mut s = self.zero();
        s.coords[1] = Rational::one();
        s
    }

    fn reduce_in_place(&self, buf: &mut Vec<Rational>) {
        let d = self.degree();
        while buf.len() > d {
            let top = buf.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = buf.len() - d;
            for (j, mj) in self.min_poly[..d].iter().enumerate() {
                buf[shift + j] -= &top * mj;
            }
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let d = self.degree();
        if d == 1 {
            return Scalar {
                coords: SmallVec::from_elem(&a.coords[0] * &b.coords[0], 1),
            };
        }
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce_in_place(&mut prod);
        Scalar {
            coords: prod.into_iter().collect(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        let d = self.degree();
        if d == 1 {
            return Some(self.from_rational(a.coords[0].recip()));
        }
        // Solve (a * c) = 1 through the multiplication-by-a matrix.
        let mut columns = Vec::with_capacity(d);
        let mut basis = self.one();
        for _ in 0..d {
            columns.push(self.mul(a, &basis).coords.to_vec());
            basis = self.mul(&basis, &self.generator());
        }
        let mut rhs = vec![Rational::zero(); d];
        rhs[0] = Rational::one();
        let sol = solve_dense_rational(&columns, rhs)?;
        Some(Scalar {
            coords: sol.into_iter().collect(),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// `a * b + acc`, accumulated in place.
    pub fn mul_add_assign(&self, acc: &mut Scalar, a: &Scalar, b: &Scalar) {
        if self.degree() == 1 {
            acc.coords[0] += &a.coords[0] * &b.coords[0];
        } else {
            acc.add_assign(&self.mul(a, b));
        }
    }

    pub fn pow(&self, a: &Scalar, mut e: u32) -> Scalar {
        let mut base = a.clone();
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        out
    }

    /// A square root inside the field, if one exists and can be found.
    ///
    /// Complete for degree 1 and 2. For higher degree only rational squares
    /// of rationals are recognised.
    pub fn sqrt(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if let Some(q) = a.as_rational() {
            if let Some(r) = rational_sqrt(q) {
                return Some(self.from_rational(r));
            }
        }
        if self.degree() != 2 {
            return None;
        }
        // m = x^2 + b x + c; s = x + b/2 satisfies s^2 = disc.
        let b = &self.min_poly[1];
        let c = &self.min_poly[0];
        let two = Rational::from_integer(BigInt::from(2));
        let half_b = b / &two;
        let disc = &half_b * &half_b - c;
        // a = alpha + beta * s
        let beta = a.coords[1].clone();
        let alpha = &a.coords[0] - &beta * &half_b;
        let s = self.from_coords(&[half_b.clone(), Rational::one()]);
        let compose = |u: Rational, v: Rational| {
            // u + v s
            self.from_rational(u).add(&self.mul(&self.from_rational(v), &s))
        };
        if beta.is_zero() {
            let ratio = &alpha / &disc;
            if let Some(v) = rational_sqrt(&ratio) {
                return Some(compose(Rational::zero(), v));
            }
            return None;
        }
        // (u + v s)^2 = u^2 + disc v^2 + 2uv s
        let norm = &alpha * &alpha - &disc * &beta * &beta;
        let root = rational_sqrt(&norm)?;
        for cand in [(&alpha + &root) / &two, (&alpha - &root) / &two] {
            if let Some(u) = rational_sqrt(&cand) {
                if u.is_zero() {
                    continue;
                }
                let v = &beta / (&two * &u);
                let out = compose(u, v);
                if self.mul(&out, &out) == *a {
                    return Some(out);
                }
            }
        }
        None
    }

    /// Canonical text form: `"p/q"` over Q, `"p/q + r/s*a + ..."` otherwise.
    pub fn format(&self, a: &Scalar) -> String {
        if self.degree() == 1 {
            return format_rational(&a.coords[0]);
        }
        let mut terms = Vec::new();
        for (k, c) in a.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let body = format_rational(c);
            terms.push(match k {
                0 => body,
                1 => format!("{body}*a"),
                _ => format!("{body}*a^{k}"),
            });
        }
        if terms.is_empty() {
            "0/1".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// `"p/q"` with `q >= 1`, integers included (`"3/1"`).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"p"`, `"p/q"`, optionally signed, surrounding whitespace ignored.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        BigInt::from_str(t).ok().map(Rational::from_integer)
    }
}

pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Solves `sum_j x_j * columns[j] = rhs` for square systems.
fn solve_dense_rational(columns: &[Vec<Rational>], rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            return write!(f, "Q");
        }
        let q = FieldSpec::rationals();
        write!(f, "Q[x]/({})", Poly::from_rationals(&q, &self.min_poly))
    }
}
