//! CSV and JSON serialization. Every artifact carries the code version and
//! the config that produced it; rationals are written as `"num/den"` in JSON
//! and as separate numerator/denominator columns in CSV.

use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::arith::{rational_string, Rational};
use crate::criteria::{CriterionLabel, CriterionResult};
use crate::equidist::DiscrepancyReport;
use crate::error::{Error, Result};
use crate::sieve::{CompositeConstellation, Constellation, LemmaScan};

/// `"<crate> <version>"`, embedded in every report.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(x))
}

pub fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(rational_string))
}

/// First line of every CSV file: `# <version> config=<compact json>`.
pub fn csv_header(config: &Value) -> String {
    format!("# {VERSION} config={config}\n")
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Precondition(format!("csv: {e}"))
}

fn write_csv<R: AsRef<[u8]>>(
    config: &Value,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<R>>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    let body = w.into_inner().map_err(csv_error)?;
    let mut out = csv_header(config);
    out.push_str(&String::from_utf8(body).map_err(csv_error)?);
    Ok(out)
}

/// JSON object `{version, config, ...payload}`; the payload must serialize to
/// an object. Keys come out sorted, so output is stable.
pub fn json_report(config: &Value, payload: &impl Serialize) -> Result<String> {
    let mut map = Map::new();
    map.insert("version".into(), Value::String(VERSION.into()));
    map.insert("config".into(), config.clone());
    match serde_json::to_value(payload).map_err(|e| Error::Precondition(e.to_string()))? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map))
        .map_err(|e| Error::Precondition(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn criteria_csv(config: &Value, results: &[CriterionResult]) -> Result<String> {
    write_csv(
        config,
        &[
            "label",
            "q_or_n",
            "value_num",
            "value_den",
            "distance_num",
            "distance_den",
            "comparator",
            "satisfied",
        ],
        results.iter().map(|r| {
            vec![
                r.label.as_str().to_string(),
                r.q_or_n.to_string(),
                r.value.numer().to_string(),
                r.value.denom().to_string(),
                r.distance.value().numer().to_string(),
                r.distance.value().denom().to_string(),
                r.comparator.to_string(),
                r.satisfied.to_string(),
            ]
        }),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceStats {
    pub label: CriterionLabel,
    pub count: usize,
    pub satisfied: usize,
    #[serde(serialize_with = "ser_rational")]
    pub min_distance: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub max_distance: Rational,
    /// Lower median for even counts, so the value stays exact.
    #[serde(serialize_with = "ser_rational")]
    pub median_distance: Rational,
}

/// Min/max/median distance per label, labels in first-seen order.
pub fn criteria_summary(results: &[CriterionResult]) -> Vec<DistanceStats> {
    let mut labels: Vec<CriterionLabel> = Vec::new();
    for r in results {
        if !labels.contains(&r.label) {
            labels.push(r.label);
        }
    }
    labels
        .into_iter()
        .map(|label| {
            let group: Vec<&CriterionResult> =
                results.iter().filter(|r| r.label == label).collect();
            let mut d: Vec<Rational> = group.iter().map(|r| r.distance.value().clone()).collect();
            d.sort();
            DistanceStats {
                label,
                count: group.len(),
                satisfied: group.iter().filter(|r| r.satisfied).count(),
                min_distance: d[0].clone(),
                max_distance: d[d.len() - 1].clone(),
                median_distance: d[(d.len() - 1) / 2].clone(),
            }
        })
        .collect()
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn constellations_csv(config: &Value, items: &[Constellation]) -> Result<String> {
    write_csv(
        config,
        &["q", "cofactors", "modulus_class"],
        items.iter().map(|c| {
            vec![
                c.q.to_string(),
                join(&c.cofactors),
                c.modulus_class.to_string(),
            ]
        }),
    )
}

pub fn composite_csv(config: &Value, items: &[CompositeConstellation]) -> Result<String> {
    write_csv(
        config,
        &["q", "p", "r", "cofactors", "modulus_class"],
        items.iter().map(|c| {
            vec![
                c.q.to_string(),
                c.p.to_string(),
                c.r.to_string(),
                join(&c.cofactors),
                c.modulus_class.to_string(),
            ]
        }),
    )
}

pub fn lemma_csv(config: &Value, scan: &LemmaScan) -> Result<String> {
    write_csv(
        config,
        &["p", "lpfs", "modulus_class"],
        scan.primes.iter().map(|l| {
            vec![
                l.p.to_string(),
                join(&[l.lpf1, l.lpf2]),
                (l.p % 6).to_string(),
            ]
        }),
    )
}

/// `{range, count, density_ratio}` plus the scan parameters.
pub fn lemma_summary(scan: &LemmaScan) -> Value {
    json!({
        "range": scan.range,
        "exponent": rational_string(&scan.exponent),
        "mode": scan.mode,
        "count": scan.count(),
        "density_ratio": scan.density_ratio,
    })
}

/// `(h, |S_h|, vdc_bound)` rows.
pub fn equidist_csv(config: &Value, report: &DiscrepancyReport) -> Result<String> {
    write_csv(
        config,
        &["h", "abs_exp_sum", "vdc_bound"],
        report
            .exp_sums
            .iter()
            .zip(&report.vdc_bounds)
            .map(|(s, b)| {
                vec![
                    b.h.to_string(),
                    format!("{s:.12e}"),
                    format!("{:.12e}", b.total),
                ]
            }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{default_epsilon, eq1_eval};

    #[test]
    fn criteria_csv_layout() {
        let cfg = json!({"k": 2});
        let r = eq1_eval(2, 13, &default_epsilon()).unwrap();
        let csv = criteria_csv(&cfg, std::slice::from_ref(&r)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# {VERSION} config={{\"k\":2}}"));
        assert_eq!(
            lines[1],
            "label,q_or_n,value_num,value_den,distance_num,distance_den,comparator,satisfied"
        );
        assert!(lines[2].starts_with("eq1,13,"));
        assert!(lines[2].contains(",1,4,"));
        let stats = criteria_summary(&[r]);
        assert_eq!(stats[0].median_distance, crate::arith::ratio(1, 4));
    }

    #[test]
    fn json_report_embeds_config() {
        let cfg = json!({"seed": 7});
        let s = json_report(&cfg, &json!({"count": 3})).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["seed"], 7);
        assert_eq!(v["count"], 3);
        let wrapped: Value =
            serde_json::from_str(&json_report(&cfg, &vec![1, 2]).unwrap()).unwrap();
        assert_eq!(wrapped["data"], json!([1, 2]));
    }
}
