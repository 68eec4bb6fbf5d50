//! Report assembly: every command fills the same JSON schema, emitted with
//! sorted keys and `"p/q"` rationals so that reports are byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde_json::{json, Map, Value};

use lefalg::config::Preset;
use lefalg::exactfield::{Field, FieldSpec, Mat};
use lefalg::isotypic::{self, DecomposeOptions};
use lefalg::lefschetz::{centralizer_basis, Budget, PolarizedData};
use lefalg::motivicalg::{
    bir_algebra, bn_generators, compressed_centralizer, cor_princ_report, verify_thm_cle_detailed,
    witness_to_json, WitnessedSpan,
};
use lefalg::tensorops::{copairing_iota, pairing_pi, projector_p};
use lefalg::weyldiagrams::{diagnose, diagram_span, enumerate_decorated, matching_count, Diagnostic};
use lefalg::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Usage,
    Limit,
}

pub struct Report {
    pub command: String,
    pub config_echo: Value,
    pub dims: Map<String, Value>,
    pub verdicts: Map<String, Value>,
    pub components: Vec<Value>,
    pub witnesses: Vec<Value>,
    pub timings: BTreeMap<String, u64>,
    pub record_timings: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub error: Option<Value>,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(command: &str, record_timings: bool) -> Report {
        Report {
            command: command.to_string(),
            config_echo: Value::Null,
            dims: Map::new(),
            verdicts: Map::new(),
            components: Vec::new(),
            witnesses: Vec::new(),
            timings: BTreeMap::new(),
            record_timings,
            seed: 0,
            warnings: Vec::new(),
            error: None,
            outcome: Outcome::Fail,
        }
    }

    /// Stage timings are zero unless recording was requested.
    pub fn time(&mut self, stage: &str, started: Instant) {
        let ms = if self.record_timings {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        self.timings.insert(stage.to_string(), ms);
    }

    pub fn fail_with(&mut self, e: &Error) {
        let (kind, outcome) = match e {
            Error::SizeBudgetExceeded { .. } => ("SizeBudgetExceeded", Outcome::Limit),
            Error::SplittingFieldRequired { .. } => ("SplittingFieldRequired", Outcome::Limit),
            Error::ClosureWavesExceeded { .. } => ("ClosureWavesExceeded", Outcome::Limit),
            Error::CenterNotSeparated { .. } => ("CenterNotSeparated", Outcome::Limit),
            Error::Validation(_) => ("ValidationError", Outcome::Usage),
            Error::InvalidParams(_) => ("InvalidParams", Outcome::Usage),
            _ => ("InvalidInput", Outcome::Usage),
        };
        let mut err = json!({"kind": kind, "message": e.to_string()});
        match e {
            Error::SplittingFieldRequired { poly, coeffs } => {
                err["poly"] = json!(poly);
                err["coeffs"] = json!(coeffs);
            }
            Error::SizeBudgetExceeded { dim, budget } => {
                err["dim"] = json!(dim);
                err["budget"] = json!(budget);
            }
            _ => {}
        }
        self.error = Some(err);
        self.outcome = outcome;
    }

    fn set_pass(&mut self, pass: bool) {
        self.verdicts.insert("pass".into(), json!(pass));
        self.outcome = if pass { Outcome::Pass } else { Outcome::Fail };
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "config_echo": self.config_echo,
            "dims": self.dims,
            "verdicts": self.verdicts,
            "components": self.components,
            "witnesses": self.witnesses,
            "timings_ms": self.timings,
            "seed": self.seed,
            "warnings": self.warnings,
        });
        if let Some(e) = &self.error {
            v["error"] = e.clone();
        }
        canonical(v)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("serializable report")
    }

    pub fn pretty(&self) -> String {
        let mut s = String::new();
        let status = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Usage => "USAGE ERROR",
            Outcome::Limit => "LIMIT",
        };
        let _ = writeln!(s, "{}: {status}", self.command);
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  error: {}", e["message"].as_str().unwrap_or(""));
        }
        for (k, v) in &self.dims {
            let _ = writeln!(s, "  dim {k}: {v}");
        }
        for (k, v) in &self.verdicts {
            let _ = writeln!(s, "  {k}: {v}");
        }
        for c in &self.components {
            let _ = writeln!(
                s,
                "  component {}: rank {}, twist {}",
                c["index"], c["rank"], c["weight_twist"]
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        s
    }
}

/// Rebuilds objects with keys inserted in sorted order.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> =
                map.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

fn matrix_json(m: &Mat) -> Value {
    let f = m.field();
    Value::Array(
        m.to_dense()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(f.format(x))).collect()))
            .collect(),
    )
}

fn span_witnesses(f: &Field, span: &WitnessedSpan) -> Vec<Value> {
    span.witnesses()
        .iter()
        .enumerate()
        .map(|(k, w)| json!({"basis_index": k, "witness": witness_to_json(f, w)}))
        .collect()
}

fn diagnostic_name(d: Diagnostic) -> &'static str {
    match d {
        Diagnostic::Equal => "Equal",
        Diagnostic::MissingComponents => "MissingComponents",
        Diagnostic::NotContained => "NotContained",
    }
}

pub fn verify(rep: &mut Report, data: &PolarizedData, n: usize, budget: &Budget) -> Result<(), Error> {
    let started = Instant::now();
    let gens = bn_generators(data, n)?;
    let (r, closure) = verify_thm_cle_detailed(&gens, budget)?;
    rep.time("verify", started);
    rep.dims.insert("closure".into(), json!(r.closure_dim));
    rep.dims.insert("centralizer".into(), json!(r.centralizer_dim));
    rep.dims.insert("diagram".into(), json!(r.diagram_dim));
    rep.dims.insert("tensor_space".into(), json!(data.m().pow(n as u32)));
    for (k, v) in [
        ("closure_eq_centralizer", r.closure_eq_centralizer),
        ("closure_eq_diagram", r.closure_eq_diagram),
        ("centralizer_eq_diagram", r.centralizer_eq_diagram),
        ("generators_in_centralizer", r.generators_in_centralizer),
        ("closure_is_algebra", r.closure_is_algebra),
        ("witnesses_verified", r.witnesses_verified),
    ] {
        rep.verdicts.insert(k.into(), json!(v));
    }
    rep.verdicts
        .insert("diagnostic".into(), json!(diagnostic_name(r.diagnostic)));
    if r.diagnostic == Diagnostic::MissingComponents {
        rep.warnings.push(
            "commutant strictly contains the diagram span: extra group generators are probably missing"
                .into(),
        );
    }
    rep.witnesses = span_witnesses(data.field(), &closure);
    rep.set_pass(r.pass && r.witnesses_verified);
    Ok(())
}

pub fn verify_bir(
    rep: &mut Report,
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
) -> Result<(), Error> {
    let started = Instant::now();
    let (bir, gens) = bir_algebra(data, i, r, budget)?;
    let cent = compressed_centralizer(data, i, r, budget)?;
    let c = cor_princ_report(&bir, &gens, &cent, i, r);
    rep.time("verify_bir", started);
    rep.dims.insert("bir".into(), json!(c.bir_dim));
    rep.dims.insert("centralizer".into(), json!(c.centralizer_dim));
    rep.dims.insert("wedge".into(), json!(c.wedge_dim));
    rep.verdicts
        .insert("bir_in_centralizer".into(), json!(c.bir_in_centralizer));
    rep.verdicts
        .insert("centralizer_in_bir".into(), json!(c.centralizer_in_bir));
    rep.verdicts
        .insert("witnesses_verified".into(), json!(c.witnesses_verified));
    rep.witnesses = span_witnesses(data.field(), &bir);
    rep.set_pass(c.pass && c.witnesses_verified);
    Ok(())
}

pub fn decompose(
    rep: &mut Report,
    data: &PolarizedData,
    i: usize,
    r: usize,
    budget: &Budget,
    seed: u64,
    fine: bool,
) -> Result<(), Error> {
    let started = Instant::now();
    let d = isotypic::decompose(data, i, r, budget, DecomposeOptions { seed, fine })?;
    rep.time("decompose", started);
    let f = data.field();
    rep.dims.insert("wedge".into(), json!(d.wedge_dim));
    rep.dims.insert("algebra".into(), json!(d.algebra_dim));
    rep.dims.insert("center".into(), json!(d.center_dim));
    rep.dims.insert("components".into(), json!(d.components.len()));
    let certs = serde_json::to_value(&d.certificates).expect("plain struct");
    if let Value::Object(m) = certs {
        rep.verdicts.extend(m);
    }
    rep.verdicts.insert("cor_princ".into(), json!(d.cor_princ.pass));
    rep.components = d
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut v = json!({
                "index": k,
                "rank": c.rank,
                "weight_twist": c.weight.map(|w| w.twist),
                "idempotent": matrix_json(&c.idempotent),
                "witness": witness_to_json(f, &c.witness),
            });
            if let Some(fine) = &d.fine {
                v["fine"] = Value::Array(
                    fine[k]
                        .iter()
                        .map(|p| json!({"rank": p.rank(), "idempotent": matrix_json(p)}))
                        .collect(),
                );
            }
            v
        })
        .collect();
    rep.witnesses = d
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| json!({"component": k, "witness": witness_to_json(f, &c.witness)}))
        .collect();
    rep.warnings.extend(d.warnings.iter().cloned());
    if fine {
        rep.warnings
            .push("fine splitting depends on the seed and is not canonical".into());
    }
    rep.set_pass(d.certificates.all() && d.cor_princ.pass);
    Ok(())
}

pub fn oracle_diagram(
    rep: &mut Report,
    data: &PolarizedData,
    n: usize,
    budget: &Budget,
) -> Result<(), Error> {
    let started = Instant::now();
    let diagrams = diagram_span(data, n, budget)?;
    let cent = centralizer_basis(data, n, budget)?;
    rep.time("oracle_diagram", started);
    let diag = diagnose(&diagrams, &cent);
    rep.dims.insert("diagram".into(), json!(diagrams.dim()));
    rep.dims.insert("centralizer".into(), json!(cent.dim()));
    rep.dims
        .insert("matchings".into(), json!(matching_count(n) as u64));
    rep.dims.insert(
        "decorated_matchings".into(),
        json!(enumerate_decorated(n, data.e_basis().len()).len()),
    );
    rep.verdicts
        .insert("diagnostic".into(), json!(diagnostic_name(diag)));
    rep.set_pass(diag == Diagnostic::Equal);
    Ok(())
}

fn record(rep: &mut Report, label: &str, dims: Value, pass: bool) {
    rep.dims.insert(label.to_string(), dims);
    rep.verdicts.insert(label.to_string(), json!(pass));
}

fn record_error(rep: &mut Report, label: &str, e: &Error) {
    rep.verdicts.insert(label.to_string(), json!(false));
    rep.warnings.push(format!("{label}: {e}"));
}

/// The default suite over all presets: twist projector identities, the
/// three-way span equality, the compressed equality, one decomposition and
/// the scalar-extension check.
pub fn suite(rep: &mut Report, budget: &Budget, seed: u64) {
    let q = FieldSpec::rationals();
    let gaussian = Preset::Cm { d: 1 }.splitting_field().expect("x^2 + 1");
    let presets: Vec<(String, Preset)> = vec![
        ("siegel g=1".into(), Preset::Siegel { g: 1 }),
        ("siegel g=2".into(), Preset::Siegel { g: 2 }),
        ("siegel g=3".into(), Preset::Siegel { g: 3 }),
        ("cm d=1".into(), Preset::Cm { d: 1 }),
        ("product".into(), Preset::Product),
    ];

    for (name, p) in &presets {
        let data = p.data(&q).expect("presets are valid");
        let f = data.field();
        let pi = pairing_pi(data.phi()).expect("valid form");
        let iota = copairing_iota(data.phi()).expect("valid form");
        let proj = projector_p(data.phi()).expect("valid form").matrix;
        let m = data.m() as i64;
        let ok = pi.mul(&iota) == Mat::identity(f, 1).scale(&f.from_int(m))
            && proj.is_idempotent()
            && proj.rank() == 1;
        record(rep, &format!("gen_ind {name}"), json!({"pi_iota": m}), ok);
    }

    let cle_cases: Vec<(&str, Preset, Vec<usize>)> = vec![
        ("siegel g=1", Preset::Siegel { g: 1 }, vec![1, 2, 3]),
        ("siegel g=2", Preset::Siegel { g: 2 }, vec![1, 2]),
        ("cm d=1", Preset::Cm { d: 1 }, vec![1, 2]),
        ("product", Preset::Product, vec![1, 2]),
    ];
    for (name, p, ns) in &cle_cases {
        let data = p.data(&q).expect("presets are valid");
        for &n in ns {
            let label = format!("thm_cle {name} n={n}");
            let res = bn_generators(&data, n).and_then(|g| verify_thm_cle_detailed(&g, budget));
            match res {
                Ok((r, _)) => record(
                    rep,
                    &label,
                    json!({"closure": r.closure_dim, "centralizer": r.centralizer_dim, "diagram": r.diagram_dim}),
                    r.pass && r.witnesses_verified,
                ),
                Err(e) => record_error(rep, &label, &e),
            }
        }
    }

    for (name, p) in [("siegel g=1", Preset::Siegel { g: 1 }), ("cm d=1", Preset::Cm { d: 1 })] {
        let data = p.data(&q).expect("presets are valid");
        for (i, r) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let label = format!("cor_princ {name} i={i} r={r}");
            let res = bir_algebra(&data, i, r, budget).and_then(|(bir, gens)| {
                let cent = compressed_centralizer(&data, i, r, budget)?;
                Ok(cor_princ_report(&bir, &gens, &cent, i, r))
            });
            match res {
                Ok(c) => record(
                    rep,
                    &label,
                    json!({"bir": c.bir_dim, "centralizer": c.centralizer_dim, "wedge": c.wedge_dim}),
                    c.pass && c.witnesses_verified,
                ),
                Err(e) => record_error(rep, &label, &e),
            }
        }
    }

    let siegel = Preset::Siegel { g: 1 }.data(&q).expect("valid");
    for (i, r) in [(2, 2), (3, 1)] {
        let label = format!("decompose siegel g=1 i={i} r={r}");
        match isotypic::decompose(&siegel, i, r, budget, DecomposeOptions { seed, fine: false }) {
            Ok(d) => {
                let ranks: Vec<usize> = d.components.iter().map(|c| c.rank).collect();
                record(
                    rep,
                    &label,
                    json!({"wedge": d.wedge_dim, "ranks": ranks}),
                    d.certificates.all() && d.cor_princ.pass,
                )
            }
            Err(e) => record_error(rep, &label, &e),
        }
    }

    let label = "scalar_extension cm d=1 n=2";
    let dims: Result<Vec<usize>, Error> = [&q, &gaussian]
        .iter()
        .map(|f| {
            let data = Preset::Cm { d: 1 }.data(f)?;
            let (r, _) = verify_thm_cle_detailed(&bn_generators(&data, 2)?, budget)?;
            Ok(r.closure_dim)
        })
        .collect();
    match dims {
        Ok(d) => record(rep, label, json!({"over_Q": d[0], "over_Q_i": d[1]}), d[0] == d[1]),
        Err(e) => record_error(rep, label, &e),
    }

    let all = rep.verdicts.values().all(|v| v.as_bool() == Some(true));
    rep.set_pass(all);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorts_nested_keys() {
        let v = canonical(json!({"b": {"z": 1, "a": 2}, "a": [{"y": 0, "x": 1}]}));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"a":[{"x":1,"y":0}],"b":{"a":2,"z":1}}"#
        );
    }

    #[test]
    fn errors_map_to_outcomes() {
        let mut rep = Report::new("verify", false);
        rep.fail_with(&Error::SizeBudgetExceeded { dim: 10, budget: 5 });
        assert_eq!(rep.outcome, Outcome::Limit);
        assert_eq!(rep.to_value()["error"]["dim"], 10);
        rep.fail_with(&Error::InvalidParams("x".into()));
        assert_eq!(rep.outcome, Outcome::Usage);
    }

    #[test]
    fn timings_zeroed_unless_requested() {
        let mut rep = Report::new("verify", false);
        rep.time("total", Instant::now() - std::time::Duration::from_millis(50));
        assert_eq!(rep.timings["total"], 0);
    }
}
