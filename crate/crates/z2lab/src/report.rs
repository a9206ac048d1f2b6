//! Serializable report shapes and the json / csv / text renderers.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use z2lab_core::intsets::{GroupElement, Z2Report};
use z2lab_core::rcnorms::{CertificateSource, NormBracket};
use z2lab_core::witness::ViolationReport;

use crate::io::{mats_json, MatrixJson, TupleJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Serialize)]
pub struct DifferenceCount {
    pub difference: GroupElement,
    pub count: usize,
}

#[derive(Debug, Serialize)]
pub struct Z2Json {
    pub size: usize,
    pub z2: usize,
    pub argmax_difference: Option<GroupElement>,
    pub histogram: Vec<DifferenceCount>,
}

impl Z2Json {
    pub fn new(size: usize, r: Z2Report) -> Self {
        Self {
            size,
            z2: r.z2,
            argmax_difference: r.argmax_difference,
            histogram: r
                .histogram
                .into_iter()
                .map(|(difference, count)| DifferenceCount { difference, count })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BracketJson {
    pub lower: f64,
    pub upper: f64,
    pub relative_gap: f64,
    pub converged: bool,
    pub certificate_source: CertificateSource,
    pub dual_certificate: Vec<MatrixJson>,
    pub column_part: Vec<MatrixJson>,
    pub row_part: Vec<MatrixJson>,
}

impl From<&NormBracket> for BracketJson {
    fn from(b: &NormBracket) -> Self {
        Self {
            lower: b.lower,
            upper: b.upper,
            relative_gap: b.relative_gap(),
            converged: b.converged,
            certificate_source: b.certificate_source,
            dual_certificate: mats_json(&b.dual_certificate),
            column_part: mats_json(&b.column_part),
            row_part: mats_json(&b.row_part),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub pattern: z2lab_core::intsets::PatternWitness,
    pub polynomial: TupleJson,
    pub l1: z2lab_core::quad::QuadratureResult,
    pub s1rc: BracketJson,
    pub ratio_interval: [f64; 2],
    pub threshold: f64,
    pub violates: bool,
}

impl From<&ViolationReport> for ViolationJson {
    fn from(v: &ViolationReport) -> Self {
        Self {
            pattern: v.pattern.clone(),
            polynomial: TupleJson::from(&v.polynomial),
            l1: v.l1,
            s1rc: BracketJson::from(&v.s1rc),
            ratio_interval: [v.ratio_interval.0, v.ratio_interval.1],
            threshold: z2lab_core::INV_SQRT2,
            violates: v.violates,
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Renders a report. JSON keeps struct field order; csv and text list
/// flattened `a.b.0` paths in sorted order.
pub fn render<T: Serialize>(report: &T, format: Format) -> Result<String, serde_json::Error> {
    if format == Format::Json {
        return Ok(serde_json::to_string_pretty(report)? + "\n");
    }
    let mut fields = Vec::new();
    flatten("", &serde_json::to_value(report)?, &mut fields);
    Ok(match format {
        Format::Text => fields.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| serde_json::Error::io(std::io::Error::other(e));
            w.write_record(fields.iter().map(|f| f.0.as_str()))
                .map_err(io)?;
            w.write_record(fields.iter().map(|f| f.1.as_str()))
                .map_err(io)?;
            String::from_utf8(w.into_inner().map_err(|e| io(e.into_error().into()))?)
                .expect("csv output is UTF-8")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Demo {
        name: &'static str,
        values: Vec<f64>,
        ok: bool,
    }

    #[test]
    fn renderers() {
        let d = Demo {
            name: "x,y",
            values: vec![1.5, 2.0],
            ok: true,
        };
        assert_eq!(
            render(&d, Format::Text).unwrap(),
            "name: x,y\nok: true\nvalues.0: 1.5\nvalues.1: 2.0\n"
        );
        assert_eq!(
            render(&d, Format::Csv).unwrap(),
            "name,ok,values.0,values.1\n\"x,y\",true,1.5,2.0\n"
        );
        assert!(render(&d, Format::Json)
            .unwrap()
            .starts_with("{\n  \"name\": \"x,y\""));
    }
}
