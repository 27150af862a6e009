//! Report serialization: a CSV table or a JSON document, both with a fixed
//! column order and stable row order so identical inputs produce identical
//! bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::{ComponentReport, VerificationVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn join_i64(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn join_usize(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct JsonRow<'a> {
    i: usize,
    u: &'a [i64],
    a: usize,
    b: usize,
    l: usize,
    alpha: &'a [usize],
    t: usize,
    mu0: usize,
    mu1: usize,
    #[serde(rename = "dimQ")]
    dim_q: usize,
    #[serde(rename = "dimFp")]
    dim_fp: usize,
    block: String,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    reports: Vec<JsonRow<'a>>,
    verdict: Option<&'a VerificationVerdict>,
}

/// Serialize reports (and an optional verdict) into the requested format.
///
/// CSV columns: `i,u,a,b,l,alpha,t,mu0,mu1,dimQ,dimFp,block`; vector-valued
/// fields are space-joined, and the verdict is appended as `#`-prefixed
/// summary lines. JSON produces `{"reports": [...], "verdict": ...}`.
pub fn emit_report(
    reports: &[ComponentReport],
    verdict: Option<&VerificationVerdict>,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Csv => emit_csv(reports, verdict),
        ReportFormat::Json => emit_json(reports, verdict),
    }
}

fn emit_csv(reports: &[ComponentReport], verdict: Option<&VerificationVerdict>) -> String {
    let mut out = String::new();
    out.push_str("i,u,a,b,l,alpha,t,mu0,mu1,dimQ,dimFp,block\n");
    for rep in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            rep.i,
            join_i64(&rep.u),
            rep.shape.a,
            rep.shape.b,
            rep.shape.l,
            join_usize(&rep.shape.alpha),
            rep.shape.torsion_count(),
            rep.mu0,
            rep.mu1,
            rep.dim_q.0,
            rep.dim_fp.0,
            rep.block().label()
        )
        .unwrap();
    }
    if let Some(v) = verdict {
        let constant = v.constancy.iter().all(|c| c.constant && c.mu_constant);
        writeln!(
            out,
            "# verdict: {}",
            if v.passed() { "PASS" } else { "FAIL" }
        )
        .unwrap();
        writeln!(
            out,
            "# constancy: {}",
            if constant { "PASS" } else { "FAIL" }
        )
        .unwrap();
        writeln!(
            out,
            "# torsion-bound: m={} s={} {}",
            v.torsion.m,
            v.torsion.s,
            if v.torsion.bound_ok { "PASS" } else { "FAIL" }
        )
        .unwrap();
        writeln!(
            out,
            "# oracle-identities: {} (q-failures={} fp-failures={} euler-failures={})",
            if v.oracle.passed() { "PASS" } else { "FAIL" },
            v.oracle.q_failures.len(),
            v.oracle.fp_failures.len(),
            v.oracle.euler_failures.len()
        )
        .unwrap();
        for line in v.failures() {
            writeln!(out, "# {line}").unwrap();
        }
    }
    out
}

fn emit_json(reports: &[ComponentReport], verdict: Option<&VerificationVerdict>) -> String {
    let rows: Vec<JsonRow> = reports
        .iter()
        .map(|rep| JsonRow {
            i: rep.i,
            u: &rep.u,
            a: rep.shape.a,
            b: rep.shape.b,
            l: rep.shape.l,
            alpha: &rep.shape.alpha,
            t: rep.shape.torsion_count(),
            mu0: rep.mu0,
            mu1: rep.mu1,
            dim_q: rep.dim_q.0,
            dim_fp: rep.dim_fp.0,
            block: rep.block().label(),
        })
        .collect();
    let doc = JsonDocument {
        reports: rows,
        verdict,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{CMonomialGenerator, IdealSpec};
    use crate::scalar::{PrimeParam, Scalar};
    use crate::verify::sweep;

    fn sample_reports() -> Vec<ComponentReport> {
        let ideal = IdealSpec::new(
            PrimeParam::new(5).unwrap(),
            1,
            vec![CMonomialGenerator {
                coeff: Scalar::from_int(5),
                exponent: vec![1],
            }],
        )
        .unwrap();
        sweep(&ideal, 1, &[1]).unwrap()
    }

    #[test]
    fn csv_contract() {
        let text = emit_report(&sample_reports(), None, ReportFormat::Csv);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "i,u,a,b,l,alpha,t,mu0,mu1,dimQ,dimFp,block"
        );
        assert_eq!(lines.next().unwrap(), "1,-1,0,1,0,,0,0,0,1,0,-");
        assert_eq!(lines.next().unwrap(), "1,0,0,0,1,,0,1,0,0,0,1");
        assert_eq!(lines.next().unwrap(), "1,1,0,0,1,,0,1,0,0,0,1");
        assert!(lines.next().is_none());
    }

    #[test]
    fn json_contract() {
        let text = emit_report(&sample_reports(), None, ReportFormat::Json);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let rows = doc["reports"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1]["l"], 1);
        assert_eq!(rows[1]["block"], "1");
        assert!(doc["verdict"].is_null());
    }

    #[test]
    fn unknown_format_is_rejected() {
        let err = "yaml".parse::<ReportFormat>().unwrap_err();
        assert!(matches!(err, Error::UnknownFormat(_)));
    }
}
