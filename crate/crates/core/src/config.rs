//! JSON configuration of a polarized datum and the built-in presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};
use crate::exactfield::{format_rational, parse_rational, Field, FieldSpec, Mat, Rational, Scalar};
use crate::lefschetz::{Budget, PolarizedData};

/// A matrix entry: a rational such as `"-3/4"` or an integer, or the
/// coordinates of a field element in the power basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Rational(String),
    Coords(Vec<String>),
}

pub type MatrixSpec = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Coefficients of the monic modulus, low degree first.
    pub min_poly: Vec<String>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            min_poly: vec!["0".into(), "1".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub field: FieldConfig,
    pub g: usize,
    pub phi: MatrixSpec,
    #[serde(rename = "E_basis")]
    pub e_basis: Vec<MatrixSpec>,
    #[serde(default)]
    pub extra_generators: Vec<MatrixSpec>,
    #[serde(default)]
    pub budgets: Budget,
    #[serde(default)]
    pub seed: u64,
}

fn parse_entry(f: &Field, e: &Entry) -> std::result::Result<Scalar, ValidationError> {
    match e {
        Entry::Int(n) => Ok(f.from_int(*n)),
        Entry::Rational(s) => parse_rational(s)
            .map(|q| f.from_rational(q))
            .ok_or_else(|| ValidationError::Parse(s.clone())),
        Entry::Coords(cs) => {
            if cs.len() > f.degree() {
                return Err(ValidationError::Parse(format!("{cs:?}")));
            }
            let coords = cs
                .iter()
                .map(|s| parse_rational(s).ok_or_else(|| ValidationError::Parse(s.clone())))
                .collect::<std::result::Result<Vec<Rational>, _>>()?;
            Ok(f.from_coords(&coords))
        }
    }
}

fn parse_matrix(f: &Field, m: &MatrixSpec) -> std::result::Result<Mat, ValidationError> {
    let rows = m
        .iter()
        .map(|r| r.iter().map(|e| parse_entry(f, e)).collect())
        .collect::<std::result::Result<Vec<Vec<Scalar>>, _>>()?;
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(ValidationError::Parse("ragged matrix".into()));
    }
    Ok(Mat::from_dense(f, rows))
}

fn matrix_spec(m: &Mat) -> MatrixSpec {
    m.to_dense()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| match x.as_rational() {
                    Some(q) => Entry::Rational(format_rational(q)),
                    None => Entry::Coords(x.coords().iter().map(format_rational).collect()),
                })
                .collect()
        })
        .collect()
}

impl Config {
    pub fn from_json(text: &str) -> std::result::Result<Config, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn field(&self) -> std::result::Result<Field, ValidationError> {
        Ok(FieldSpec::from_strings(&self.field.min_poly)?)
    }

    /// Parses and validates the datum.
    pub fn to_data(&self) -> std::result::Result<PolarizedData, ValidationError> {
        let f = self.field()?;
        let phi = parse_matrix(&f, &self.phi)?;
        let e = self
            .e_basis
            .iter()
            .map(|m| parse_matrix(&f, m))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let extra = self
            .extra_generators
            .iter()
            .map(|m| parse_matrix(&f, m))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PolarizedData::new(&f, self.g, phi, e, extra)
    }

    /// Config describing `data`, with entries in canonical `"p/q"` form.
    pub fn from_data(data: &PolarizedData) -> Config {
        let f = data.field();
        Config {
            field: FieldConfig {
                min_poly: f.min_poly().iter().map(format_rational).collect(),
            },
            g: data.g(),
            phi: matrix_spec(data.phi()),
            e_basis: data.e_basis().iter().map(matrix_spec).collect(),
            extra_generators: data
                .extra_generators()
                .iter()
                .map(matrix_spec)
                .collect(),
            budgets: Budget::default(),
            seed: 0,
        }
    }
}

/// Parameters of the built-in presets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `E = Q` on `F^{2g}` with `φ = J ⊕ ... ⊕ J`.
    Siegel { g: usize },
    /// The regular representation of `Q(√-d)` on `F^2`.
    Cm { d: i64 },
    /// Two non-isogenous elliptic curves: `E = Q × Q` blockwise.
    Product,
}

impl Preset {
    pub fn from_name(name: &str, g: Option<usize>, d: Option<i64>) -> Result<Preset> {
        match name {
            "siegel" => Ok(Preset::Siegel { g: g.unwrap_or(1) }),
            "cm" => Ok(Preset::Cm { d: d.unwrap_or(1) }),
            "product" => Ok(Preset::Product),
            other => Err(Error::InvalidParams(format!(
                "unknown preset {other:?} (expected siegel, cm or product)"
            ))),
        }
    }

    pub fn data(&self, field: &Field) -> Result<PolarizedData> {
        let f = field;
        let j = Mat::from_ints(f, &[vec![0, 1], vec![-1, 0]]);
        let data = match *self {
            Preset::Siegel { g } => {
                if g == 0 {
                    return Err(Error::InvalidParams("siegel needs g >= 1".into()));
                }
                let mut phi = j.clone();
                for _ in 1..g {
                    phi = phi.direct_sum(&j);
                }
                PolarizedData::new(f, g, phi, vec![Mat::identity(f, 2 * g)], vec![])?
            }
            Preset::Cm { d } => {
                if d <= 0 || !squarefree(d) {
                    return Err(Error::InvalidParams(format!(
                        "cm needs a positive squarefree d, got {d}"
                    )));
                }
                let root = Mat::from_ints(f, &[vec![0, -d], vec![1, 0]]);
                PolarizedData::new(f, 1, j, vec![Mat::identity(f, 2), root], vec![])?
            }
            Preset::Product => {
                let id = Mat::identity(f, 2);
                let zero = Mat::zeros(f, 2, 2);
                PolarizedData::new(
                    f,
                    2,
                    j.direct_sum(&j),
                    vec![id.direct_sum(&zero), zero.direct_sum(&id)],
                    vec![],
                )?
            }
        };
        Ok(data)
    }

    /// The quadratic field over which the cm preset splits, `x^2 + d`.
    pub fn splitting_field(&self) -> Option<Field> {
        match *self {
            Preset::Cm { d } => FieldSpec::new(vec![
                Rational::from_integer(d.into()),
                Rational::from_integer(0.into()),
                Rational::from_integer(1.into()),
            ])
            .ok(),
            _ => None,
        }
    }

    pub fn config(&self, field: &Field) -> Result<Config> {
        Ok(Config::from_data(&self.data(field)?))
    }
}

fn squarefree(d: i64) -> bool {
    let mut k = 2;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_their_descriptions() {
        let q = FieldSpec::rationals();
        let s = Preset::Siegel { g: 1 }.data(&q).unwrap();
        assert_eq!(s.phi(), &Mat::from_ints(&q, &[vec![0, 1], vec![-1, 0]]));
        assert_eq!(s.e_basis(), &[Mat::identity(&q, 2)]);
        let c = Preset::Cm { d: 1 }.data(&q).unwrap();
        assert_eq!(c.e_basis()[1], Mat::from_ints(&q, &[vec![0, -1], vec![1, 0]]));
        let p = Preset::Product.data(&q).unwrap();
        assert_eq!((p.m(), p.e_basis().len()), (4, 2));
    }

    #[test]
    fn bad_preset_params() {
        let q = FieldSpec::rationals();
        assert!(Preset::Cm { d: 4 }.data(&q).is_err());
        assert!(Preset::Cm { d: -1 }.data(&q).is_err());
        assert!(Preset::Siegel { g: 0 }.data(&q).is_err());
        assert!(Preset::from_name("hilbert", None, None).is_err());
    }

    #[test]
    fn config_roundtrip() {
        let q = FieldSpec::rationals();
        let data = Preset::Cm { d: 2 }.data(&q).unwrap();
        let cfg = Config::from_data(&data);
        let text = serde_json::to_string(&cfg).unwrap();
        let back = Config::from_json(&text).unwrap().to_data().unwrap();
        assert_eq!(back.phi(), data.phi());
        assert_eq!(back.e_basis(), data.e_basis());
    }

    #[test]
    fn config_validation_names_the_invariant() {
        let text = r#"{"g": 1, "phi": [[0, 1], [1, 0]], "E_basis": [[[1, 0], [0, 1]]]}"#;
        let cfg = Config::from_json(text).unwrap();
        assert_eq!(cfg.to_data().unwrap_err(), ValidationError::PhiNotAlternating);
        let text = r#"{"g": 1, "phi": [["0", "1/2"], ["-1/2", 0]], "E_basis": [[[1, 0], [0, 0]]]}"#;
        let cfg = Config::from_json(text).unwrap();
        assert_eq!(cfg.to_data().unwrap_err(), ValidationError::IdentityNotInESpan);
    }

    #[test]
    fn extension_entries_parse() {
        let text = r#"{"field": {"min_poly": ["1", "0", "1"]}, "g": 1,
            "phi": [[0, 1], [-1, 0]], "E_basis": [[[1, 0], [0, 1]], [[["0", "1"], 0], [0, ["0", "-1"]]]]}"#;
        let data = Config::from_json(text).unwrap().to_data().unwrap();
        assert_eq!(data.field().degree(), 2);
        assert!(!data.e_basis()[1].get(0, 0).is_zero());
    }
}
