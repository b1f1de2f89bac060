//! Query descriptors and the output records the CLI emits.
//!
//! JSON records look like
//! `{"query": {...}, "count": 5, "sp_count": 5, "mass": "4/3",
//!   "breakdown": [{"label": "...", "value": "4/3"}], "case": "..."}`.
//! Rationals are always `"num/den"` strings; counts are JSON integers of
//! arbitrary size.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use crate::census::{self, CensusResult};
use crate::error::{Error, Result};
use crate::exact_arith::{Discriminant, ExactRational};
use crate::genus::{genus_partition_oracle, principal_genus_count, CmAlgebraSpec};
use crate::quadratic_forms::{
    class_number_imaginary, class_number_order, class_number_real, narrow_class_number,
    ImaginaryOrderSpec,
};
use crate::real_units::{fundamental_unit, unit_symbols};
use crate::zeta::zeta_minus_one;

/// Largest `|f^2 D0|` for which `class-number --conductor` also enumerates
/// forms as a cross-check.
const ENUMERATION_CROSS_CHECK_LIMIT: i64 = 10_000_000;

/// Everything the CLI can evaluate, echoed back in each record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Query {
    CensusSqrtQ {
        p: u64,
        a: u32,
    },
    CensusEven {
        p: u64,
        a: u32,
    },
    CensusSqrtMinusP {
        p: u64,
    },
    CensusChain {
        p: u64,
        d0: i64,
        #[serde(rename = "D")]
        d: u64,
        n: u32,
        a_list: Vec<u32>,
    },
    ClassNumber {
        disc: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conductor: Option<u64>,
    },
    Zeta {
        disc: i64,
    },
    Unit {
        p: u64,
    },
    Genus {
        discs: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputRecord {
    pub query: Query,
    pub count: Option<BigInt>,
    pub sp_count: Option<u64>,
    pub mass: Option<ExactRational>,
    pub breakdown: Vec<(String, ExactRational)>,
    pub case: String,
    /// Extra named values (unit coefficients, zeta value, ...).
    pub details: BTreeMap<String, String>,
}

impl OutputRecord {
    fn from_census(query: Query, res: CensusResult) -> Self {
        OutputRecord {
            query,
            count: Some(res.count),
            sp_count: res.sp_count,
            mass: res.mass,
            breakdown: res.breakdown,
            case: res.case,
            details: BTreeMap::new(),
        }
    }

    fn bare(query: Query, case: &str) -> Self {
        OutputRecord {
            query,
            count: None,
            sp_count: None,
            mass: None,
            breakdown: Vec::new(),
            case: case.to_string(),
            details: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        let count = match &self.count {
            Some(c) => Value::Number(Number::from_str(&c.to_string()).expect("integer literal")),
            None => Value::Null,
        };
        let breakdown: Vec<Value> = self
            .breakdown
            .iter()
            .map(|(l, v)| json!({"label": l, "value": v.to_string()}))
            .collect();
        let mut obj = Map::new();
        obj.insert(
            "query".into(),
            serde_json::to_value(&self.query).expect("query serializes"),
        );
        obj.insert("count".into(), count);
        obj.insert(
            "sp_count".into(),
            self.sp_count.map_or(Value::Null, |s| json!(s)),
        );
        obj.insert(
            "mass".into(),
            self.mass
                .as_ref()
                .map_or(Value::Null, |m| json!(m.to_string())),
        );
        obj.insert("breakdown".into(), Value::Array(breakdown));
        obj.insert("case".into(), json!(self.case));
        if !self.details.is_empty() {
            obj.insert("details".into(), json!(self.details));
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::domain(format!("malformed record: {what}"));
        let obj = v.as_object().ok_or_else(|| bad("not an object"))?;
        let query: Query =
            serde_json::from_value(obj.get("query").cloned().ok_or_else(|| bad("query"))?)
                .map_err(|e| bad(&e.to_string()))?;
        let count = match obj.get("count") {
            None | Some(Value::Null) => None,
            Some(Value::Number(n)) => {
                Some(n.to_string().parse::<BigInt>().map_err(|_| bad("count"))?)
            }
            Some(_) => return Err(bad("count")),
        };
        let sp_count = match obj.get("sp_count") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| bad("sp_count"))?),
        };
        let mass = match obj.get("mass") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.parse()?),
            Some(_) => return Err(bad("mass")),
        };
        let mut breakdown = Vec::new();
        for item in obj
            .get("breakdown")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("breakdown"))?
        {
            let label = item
                .get("label")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("label"))?;
            let value = item
                .get("value")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("value"))?;
            breakdown.push((label.to_string(), value.parse()?));
        }
        let case = obj
            .get("case")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("case"))?
            .to_string();
        let details = match obj.get("details") {
            None => BTreeMap::new(),
            Some(d) => serde_json::from_value(d.clone()).map_err(|e| bad(&e.to_string()))?,
        };
        Ok(OutputRecord {
            query,
            count,
            sp_count,
            mass,
            breakdown,
            case,
            details,
        })
    }
}

/// Evaluates a query.
pub fn evaluate(query: &Query) -> Result<OutputRecord> {
    let q = query.clone();
    match *query {
        Query::CensusSqrtQ { p, a } => {
            Ok(OutputRecord::from_census(q, census::census_sqrt_q(p, a)?))
        }
        Query::CensusEven { p, a } => Ok(OutputRecord::from_census(q, census::census_even(p, a)?)),
        Query::CensusSqrtMinusP { p } => Ok(OutputRecord::from_census(
            q,
            census::census_sqrt_minus_p(p)?,
        )),
        Query::CensusChain {
            p,
            d0,
            d,
            n,
            ref a_list,
        } => Ok(OutputRecord::from_census(
            q.clone(),
            census::census_divisor_chain(p, d0, d, n, a_list)?,
        )),
        Query::ClassNumber { disc, conductor } => class_number_record(q, disc, conductor),
        Query::Zeta { disc } => {
            let d = Discriminant::new(disc)?;
            let z = zeta_minus_one(&d)?;
            let mut rec = OutputRecord::bare(q, "siegel");
            rec.details.insert("zeta".into(), z.to_string());
            rec.breakdown.push(("ζ_F(-1)".into(), z));
            Ok(rec)
        }
        Query::Unit { p } => {
            let u = fundamental_unit(p)?;
            let mut rec = OutputRecord::bare(q, "continued-fraction");
            rec.details.insert("x".into(), u.x.to_string());
            rec.details.insert("y".into(), u.y.to_string());
            rec.details.insert("denom".into(), u.denom.to_string());
            rec.details.insert("norm".into(), u.norm.to_string());
            if p % 4 == 1 {
                let s = unit_symbols(p)?;
                rec.details.insert("varpi".into(), s.varpi_p.to_string());
                rec.details
                    .insert("delta".into(), s.delta_1_varpi.to_string());
                rec.details.insert("beta".into(), s.beta_p.to_string());
            }
            Ok(rec)
        }
        Query::Genus { ref discs } => {
            let spec = CmAlgebraSpec::from_values(discs)?;
            let count = principal_genus_count(&spec)?;
            let mut rec = OutputRecord::bare(q.clone(), "genus");
            let mut oracle_product = 1u64;
            for d in spec.factors() {
                let part = genus_partition_oracle(d)?;
                let principal = part.principal_genus().len() as u64;
                oracle_product *= principal;
                rec.details.insert(
                    format!("genera[{d}]"),
                    format!("{}x{}", part.genera.len(), principal),
                );
            }
            if oracle_product != count {
                return Err(Error::integrality(format!(
                    "principal genus count {count} disagrees with the character partition {oracle_product}"
                )));
            }
            // Factor counts multiply, so the breakdown is the single product term.
            rec.breakdown
                .push(("prod h(K_i)/2^(t_i-1)".into(), ExactRational::from(count)));
            rec.count = Some(count.into());
            Ok(rec)
        }
    }
}

fn class_number_record(q: Query, disc: i64, conductor: Option<u64>) -> Result<OutputRecord> {
    let d = Discriminant::new(disc)?;
    if d.is_negative() {
        if let Some(f) = conductor {
            let spec = ImaginaryOrderSpec::new(d, f)?;
            let h = class_number_order(&spec)?;
            let mut rec = OutputRecord::bare(q, "conductor-formula");
            let full = spec.discriminant();
            if let Ok(small) = i64::try_from(&full) {
                if small.unsigned_abs() <= ENUMERATION_CROSS_CHECK_LIMIT as u64 {
                    let by_forms = class_number_imaginary(&Discriminant::new(small)?)?;
                    if BigInt::from(by_forms) != h {
                        return Err(Error::integrality(format!(
                            "conductor formula {h} disagrees with {by_forms} reduced forms of {small}"
                        )));
                    }
                    rec.details
                        .insert("reduced_forms".into(), by_forms.to_string());
                }
            }
            rec.details
                .insert("order_discriminant".into(), full.to_string());
            rec.breakdown
                .push(("h(R_f)".into(), ExactRational::from(&h)));
            rec.count = Some(h);
            Ok(rec)
        } else {
            let h = class_number_imaginary(&d)?;
            let mut rec = OutputRecord::bare(q, "reduced-forms");
            rec.details
                .insert("fundamental".into(), d.is_fundamental().to_string());
            rec.breakdown.push(("h(D)".into(), ExactRational::from(h)));
            rec.count = Some(h.into());
            Ok(rec)
        }
    } else {
        if conductor.is_some() {
            return Err(Error::domain(
                "--conductor applies to negative discriminants only",
            ));
        }
        let h = class_number_real(&d)?;
        let mut rec = OutputRecord::bare(q, "rho-cycles");
        rec.details
            .insert("narrow".into(), narrow_class_number(&d)?.to_string());
        rec.breakdown.push(("h(D)".into(), ExactRational::from(h)));
        rec.count = Some(h.into());
        Ok(rec)
    }
}

/// Output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

fn query_fields(q: &Query) -> Vec<(String, String)> {
    let v = serde_json::to_value(q).expect("query serializes");
    v.as_object()
        .expect("query is an object")
        .iter()
        .map(|(k, v)| {
            let s = match v {
                Value::String(s) => s.clone(),
                Value::Array(items) => items
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                other => other.to_string(),
            };
            (k.clone(), s)
        })
        .collect()
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn row(rec: &OutputRecord) -> Vec<(String, String)> {
    let mut cols = query_fields(&rec.query);
    cols.push(("count".into(), opt(&rec.count)));
    cols.push(("sp_count".into(), opt(&rec.sp_count)));
    cols.push(("mass".into(), opt(&rec.mass)));
    cols.push(("case".into(), rec.case.clone()));
    cols.extend(rec.details.iter().map(|(k, v)| (k.clone(), v.clone())));
    cols
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders records. `single` prints one JSON object instead of an array and
/// appends the breakdown to tables.
pub fn render(records: &[OutputRecord], format: Format, single: bool) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            let v = if single && records.len() == 1 {
                records[0].to_json()
            } else {
                Value::Array(records.iter().map(OutputRecord::to_json).collect())
            };
            out.push_str(&serde_json::to_string_pretty(&v).expect("json renders"));
            out.push('\n');
        }
        Format::Csv => {
            let rows: Vec<_> = records.iter().map(row).collect();
            if let Some(first) = rows.first() {
                let header: Vec<_> = first.iter().map(|(k, _)| csv_escape(k)).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            for r in &rows {
                let vals: Vec<_> = r.iter().map(|(_, v)| csv_escape(v)).collect();
                let _ = writeln!(out, "{}", vals.join(","));
            }
        }
        Format::Table => {
            let rows: Vec<_> = records.iter().map(row).collect();
            let Some(first) = rows.first() else {
                return out;
            };
            let header: Vec<String> = first.iter().map(|(k, _)| k.clone()).collect();
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for r in &rows {
                for (i, (_, v)) in r.iter().enumerate() {
                    if i < widths.len() {
                        widths[i] = widths[i].max(v.chars().count());
                    }
                }
            }
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(header.iter().map(String::as_str).collect()));
            for r in &rows {
                let _ = writeln!(out, "{}", line(r.iter().map(|(_, v)| v.as_str()).collect()));
            }
            if single && records.len() == 1 && !records[0].breakdown.is_empty() {
                let _ = writeln!(out, "\nbreakdown:");
                for (label, value) in &records[0].breakdown {
                    let _ = writeln!(out, "  {label} = {value}");
                }
            }
        }
    }
    out
}
