//! Plot-ready CSV and machine JSON rendering for experiment summaries,
//! oracle tables and profiles. Rendering is pure string building so that
//! identical results serialize to identical bytes.

use std::collections::BTreeSet;

use crate::chain::LcsProfile;
use crate::experiments::ExperimentSummary;
use crate::oracle::{ExactDistribution, VarianceEntry};

/// Comment header naming the producer; prepended to every output file.
pub fn provenance_header(subcommand: &str, master_seed: u64, config_hash: &str) -> String {
    format!("# producer={subcommand} seed={master_seed} config_hash={config_hash}\n")
}

/// One row per summary; extras become extra columns (sorted by key, so the
/// schema is deterministic).
pub fn summaries_to_csv(summaries: &[ExperimentSummary]) -> String {
    let extra_keys: BTreeSet<&str> = summaries
        .iter()
        .flat_map(|s| s.extras.keys().map(String::as_str))
        .collect();
    let mut out = String::new();
    out.push_str("experiment,estimate,std_error,ci95_lo,ci95_hi,replicates,master_seed");
    for key in &extra_keys {
        out.push(',');
        out.push_str(key);
    }
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}",
            s.experiment, s.estimate, s.std_error, s.ci95.0, s.ci95.1, s.replicates, s.master_seed
        ));
        for key in &extra_keys {
            out.push(',');
            if let Some(v) = s.extras.get(*key) {
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn summaries_to_json(
    producer: &str,
    master_seed: u64,
    config_hash: &str,
    summaries: &[ExperimentSummary],
) -> String {
    let body = serde_json::json!({
        "schema_version": 1,
        "producer": producer,
        "master_seed": master_seed,
        "config_hash": config_hash,
        "results": summaries,
    });
    serde_json::to_string_pretty(&body).expect("summary serialization")
}

/// `k, L(k)` rows.
pub fn profile_to_csv(profile: &LcsProfile) -> String {
    let mut out = String::from("k,L\n");
    for (k, v) in profile.values().iter().enumerate() {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// `value, probability, probability_f64` rows of an exact law.
pub fn distribution_to_csv(n: usize, dist: &ExactDistribution) -> String {
    let mut out = String::from("n,value,probability,probability_f64\n");
    for (v, p) in dist.support() {
        out.push_str(&format!("{n},{v},{p},{}\n", p.to_f64()));
    }
    out
}

pub fn distribution_to_json(n: usize, dist: &ExactDistribution) -> String {
    let rows: Vec<serde_json::Value> = dist
        .support()
        .map(|(v, p)| {
            serde_json::json!({
                "value": v,
                "probability": p.to_string(),
                "probability_f64": p.to_f64(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": 1,
        "n": n,
        "mean": dist.mean_f64(),
        "variance": dist.variance_f64(),
        "support": rows,
    }))
    .expect("distribution serialization")
}

/// `n, variance, variance_f64, mean_f64, efron_stein_upper` rows.
pub fn variance_table_to_csv(table: &[VarianceEntry]) -> String {
    let mut out = String::from("n,variance,variance_f64,mean_f64,efron_stein_upper\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.variance, row.variance_f64, row.mean_f64, row.efron_stein_upper
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{estimate_lc_variance, ExperimentConfig};
    use crate::words::ModelParams;

    #[test]
    fn csv_has_stable_schema() {
        let params = ModelParams::new(2, 1, 2).unwrap();
        let cfg = ExperimentConfig::new(params, 10, 50, 1).unwrap();
        let s = estimate_lc_variance(&cfg).unwrap();
        let csv = summaries_to_csv(&[s.clone(), s.clone()]);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("experiment,estimate,std_error"));
        assert!(header.contains("efron_stein_upper"));
        assert_eq!(lines.count(), 2);

        let json = summaries_to_json("simulate", 1, "feed", &[s]);
        assert!(json.contains("\"config_hash\": \"feed\""));
        assert!(json.contains("\"schema_version\": 1"));
    }

    #[test]
    fn provenance_line() {
        let h = provenance_header("simulate", 42, "abcd");
        assert_eq!(h, "# producer=simulate seed=42 config_hash=abcd\n");
    }

    #[test]
    fn distribution_rendering() {
        let params = ModelParams::new(2, 1, 2).unwrap();
        let dist = crate::oracle::exact_lc_distribution(&params, 1).unwrap();
        let csv = distribution_to_csv(1, &dist);
        assert!(csv.contains("1,1,1/4,0.25"));
        let json = distribution_to_json(1, &dist);
        assert!(json.contains("\"variance\": 0.1875"));
    }
}
