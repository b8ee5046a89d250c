//! Seeded Monte Carlo estimators for the empirical quantities the
//! variance argument predicts: LC_n variance and linearity, the
//! all-matched event, the drift of the LCS profile, the local slope
//! event, non-empty match counts of minimal pairs, and the conditional
//! variance of the extra-letter count.
//!
//! Every estimator is a deterministic function of `(config, master_seed)`:
//! replicate r draws from ChaCha streams derived from r alone, and
//! aggregation runs over the replicate-ordered value vector, so results
//! are identical for any worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chain::{build_chain, lcs_profile};
use crate::constants::{build_ledger, conditional_variance_n_lower_bound, efron_stein_upper};
use crate::lcs::{enumerate_matches, extract_minimal_matching, lcs_length_bitparallel};
use crate::stats::{
    jackknife_variance_se, mean, mean_se, proportion_se, sample_variance, PHI_WINDOW_ONE_SIGMA,
};
use crate::words::{sample_x_word, sample_y_word, strip_extra_letter, ModelParams, SeedSpec};
use crate::{map_replicates, Error, Result};

/// Which estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    Variance,
    EventE,
    Drift,
    Slope,
    Matches,
    CondVarN,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Variance => "variance",
            ExperimentKind::EventE => "eventE",
            ExperimentKind::Drift => "drift",
            ExperimentKind::Slope => "slope",
            ExperimentKind::Matches => "matches",
            ExperimentKind::CondVarN => "condvarN",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" => Ok(ExperimentKind::Variance),
            "eventE" => Ok(ExperimentKind::EventE),
            "drift" => Ok(ExperimentKind::Drift),
            "slope" => Ok(ExperimentKind::Slope),
            "matches" => Ok(ExperimentKind::Matches),
            "condvarN" => Ok(ExperimentKind::CondVarN),
            other => Err(Error::InvalidParams(format!(
                "unknown experiment '{other}' (expected variance|eventE|drift|slope|matches|condvarN)"
            ))),
        }
    }
}

/// Full configuration of a single estimator run. The interval `I` is
/// always recomputed from `(params, n)` and never user-set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub n: usize,
    pub replicates: u64,
    pub master_seed: u64,
    /// Fraction of n below which the all-matched regime is checked;
    /// defaults to the ledger's nu = 1/2m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Chain length for the drift and matches estimators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Slope constant override (ledger K is far below desk visibility).
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub slope_k: Option<f64>,
    /// Window length override for the slope event.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Unmatched-letter proportion override feeding lambda.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Compartment-length threshold override feeding lambda.
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(params: ModelParams, n: usize, replicates: u64, master_seed: u64) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::InvalidParams("replicates must be >= 1".into()));
        }
        Ok(ExperimentConfig {
            params,
            n,
            replicates,
            master_seed,
            nu: None,
            k: None,
            slope_k: None,
            h: None,
            epsilon: None,
            d: None,
        })
    }

    /// `I = [np - sqrt(np(1-p)), np + sqrt(np(1-p))]`.
    pub fn interval_i(&self) -> (f64, f64) {
        let p = self.params.p();
        let center = self.n as f64 * p;
        let radius = (self.n as f64 * p * (1.0 - p)).sqrt();
        (center - radius, center + radius)
    }

    fn seed(&self, stream: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, stream)
    }
}

/// Point estimate with uncertainty and provenance. `wall_time_s` is
/// telemetry; it stays out of serialized results so reruns are
/// byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub replicates: u64,
    pub master_seed: u64,
    pub extras: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ExperimentSummary {
    fn new(experiment: &str, estimate: f64, std_error: f64, cfg: &ExperimentConfig) -> Self {
        let half = 1.96 * std_error;
        ExperimentSummary {
            experiment: experiment.to_string(),
            estimate,
            std_error,
            ci95: (estimate - half, estimate + half),
            replicates: cfg.replicates,
            master_seed: cfg.master_seed,
            extras: BTreeMap::new(),
            note: None,
            wall_time_s: 0.0,
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    /// Structural invariants embedded in every experiment; violations make
    /// the CLI exit nonzero.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.estimate.is_nan() {
            // Degenerate-but-reported case (e.g. no replicate in I); the
            // note explains it and no further structure is expected.
            return out;
        }
        if self.std_error.is_nan() || self.std_error < 0.0 {
            out.push(format!("std_error {} is negative or NaN", self.std_error));
        }
        if !(self.ci95.0 <= self.estimate && self.estimate <= self.ci95.1) {
            out.push(format!(
                "ci95 {:?} does not contain estimate {}",
                self.ci95, self.estimate
            ));
        }
        let is_probability = matches!(self.experiment.as_str(), "eventE" | "drift" | "slope");
        if is_probability && !(0.0..=1.0).contains(&self.estimate) {
            out.push(format!(
                "probability estimate {} outside [0,1]",
                self.estimate
            ));
        }
        out
    }
}

/// Unbiased sample variance of LC_n over replicates, with a jackknife
/// standard error and the Efron-Stein bound alongside.
pub fn estimate_lc_variance(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let values = map_replicates(cfg.replicates, |r| {
        let x = sample_x_word(&cfg.params, cfg.n, cfg.seed(2 * r));
        let y = sample_y_word(&cfg.params, cfg.n, cfg.seed(2 * r + 1));
        lcs_length_bitparallel(&x, &y) as f64
    });
    let variance = sample_variance(&values);
    let se = jackknife_variance_se(&values);
    let mut summary = ExperimentSummary::new("variance", variance, se, cfg)
        .with("n", cfg.n as f64)
        .with("mean_lc", mean(&values))
        .with("var_per_n", variance / cfg.n as f64)
        .with("efron_stein_upper", efron_stein_upper(&cfg.params, cfg.n));
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Empirical probability that every letter of the length-floor(nu n) chain
/// word matches into Y.
pub fn estimate_event_e(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let ledger = build_ledger(&cfg.params)?;
    let nu = cfg.nu.unwrap_or(ledger.nu);
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParams(format!(
            "nu must be in (0,1), got {nu}"
        )));
    }
    let k = (nu * cfg.n as f64).floor() as usize;
    let hits: u64 = if k == 0 {
        cfg.replicates
    } else {
        map_replicates(cfg.replicates, |r| {
            let chain = build_chain(&cfg.params, k, cfg.seed(2 * r)).expect("k >= 1");
            let z = chain.materialize(k).expect("k in range");
            let y = sample_y_word(&cfg.params, cfg.n, cfg.seed(2 * r + 1));
            u64::from(lcs_length_bitparallel(&z, &y) == k)
        })
        .into_iter()
        .sum()
    };
    let p_hat = hits as f64 / cfg.replicates as f64;
    let se = proportion_se(p_hat, cfg.replicates);
    let c1 = crate::constants::c1(nu, cfg.params.m())?;
    let mut summary = ExperimentSummary::new("eventE", p_hat, se, cfg)
        .with("n", cfg.n as f64)
        .with("nu", nu)
        .with("k", k as f64)
        .with("c1", c1)
        .with("chernoff_lower", 1.0 - (-c1 * cfg.n as f64).exp());
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Empirical `P(L_n(k+1) - L_n(k) = 1)` over fresh chains and Y-words.
pub fn estimate_drift(cfg: &ExperimentConfig, k: usize) -> Result<ExperimentSummary> {
    let start = Instant::now();
    if k == 0 || k >= cfg.n {
        return Err(Error::OutOfRange(format!(
            "drift requires 1 <= k < n, got k = {k}, n = {}",
            cfg.n
        )));
    }
    let hits: u64 = map_replicates(cfg.replicates, |r| {
        let chain = build_chain(&cfg.params, k + 1, cfg.seed(2 * r)).expect("k+1 >= 1");
        let y = sample_y_word(&cfg.params, cfg.n, cfg.seed(2 * r + 1));
        let z_k = chain.materialize(k).expect("k in range");
        let z_k1 = chain.materialize(k + 1).expect("k+1 in range");
        let inc = lcs_length_bitparallel(&z_k1, &y) - lcs_length_bitparallel(&z_k, &y);
        u64::from(inc == 1)
    })
    .into_iter()
    .sum();
    let p_hat = hits as f64 / cfg.replicates as f64;
    let se = proportion_se(p_hat, cfg.replicates);
    let ledger = build_ledger(&cfg.params)?;
    let mut summary = ExperimentSummary::new("drift", p_hat, se, cfg)
        .with("n", cfg.n as f64)
        .with("k", k as f64)
        .with(
            "ledger_lambda_over_m",
            ledger.lambda / cfg.params.m() as f64,
        );
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Empirical probability of the local slope event: for all integer
/// `i, j` in `I` with `j - i >= h`, the profile satisfies
/// `L(j) - L(i) >= K (j - i)`.
pub fn estimate_slope_event(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let ledger = build_ledger(&cfg.params)?;
    let nu = cfg.nu.unwrap_or(ledger.nu);
    let (lo, hi) = cfg.interval_i();
    if hi < nu * cfg.n as f64 || lo > cfg.n as f64 {
        return Err(Error::EmptySlopeWindow(format!(
            "[nu n, n] = [{}, {}] does not meet I = [{lo:.3}, {hi:.3}]",
            nu * cfg.n as f64,
            cfg.n
        )));
    }
    let slope_k = cfg.slope_k.unwrap_or(ledger.slope_k);
    let h = match cfg.h {
        Some(h) => h,
        None => ledger.h_of(cfg.n)?,
    };
    let i_lo = lo.ceil().max(0.0) as usize;
    let i_hi = (hi.floor() as usize).min(cfg.n);

    // Index pairs are the same for every replicate.
    let mut pairs = Vec::new();
    for i in i_lo..=i_hi {
        for j in i..=i_hi {
            if (j - i) as f64 >= h {
                pairs.push((i, j));
            }
        }
    }

    let hits: u64 = map_replicates(cfg.replicates, |r| {
        let chain = build_chain(&cfg.params, cfg.n, cfg.seed(2 * r)).expect("n >= 1");
        let y = sample_y_word(&cfg.params, cfg.n, cfg.seed(2 * r + 1));
        let profile = lcs_profile(&chain, &y);
        let ok = pairs.iter().all(|&(i, j)| {
            let gain = profile.value(j) as f64 - profile.value(i) as f64;
            gain >= slope_k * (j - i) as f64
        });
        u64::from(ok)
    })
    .into_iter()
    .sum();
    let p_hat = hits as f64 / cfg.replicates as f64;
    let se = proportion_se(p_hat, cfg.replicates);
    let mut summary = ExperimentSummary::new("slope", p_hat, se, cfg)
        .with("n", cfg.n as f64)
        .with("K_used", slope_k)
        .with("h_used", h)
        .with("ledger_K", ledger.slope_k)
        .with("i_lo", i_lo as f64)
        .with("i_hi", i_hi as f64)
        .with("pairs_checked", pairs.len() as f64);
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Mean non-empty-match count of the canonical minimal matching of the
/// length-k chain word against Y, with the fraction of replicates below
/// the ledger's `lambda * n` reported alongside.
pub fn estimate_nonempty_matches(cfg: &ExperimentConfig, k: usize) -> Result<ExperimentSummary> {
    let start = Instant::now();
    if k == 0 || k > cfg.n {
        return Err(Error::OutOfRange(format!(
            "matches requires 1 <= k <= n, got k = {k}, n = {}",
            cfg.n
        )));
    }
    let ledger = build_ledger(&cfg.params)?;
    let lambda = match (cfg.epsilon, cfg.d) {
        (None, None) => ledger.lambda,
        (eps, d) => {
            let eps = eps.unwrap_or(ledger.epsilon);
            let d = d.unwrap_or(ledger.d) as f64;
            (ledger.xi_m * ledger.nu / 2.0 * eps / (d - 1.0)).min(1.0)
        }
    };
    let counts = map_replicates(cfg.replicates, |r| {
        let chain = build_chain(&cfg.params, k, cfg.seed(2 * r)).expect("k >= 1");
        let z = chain.materialize(k).expect("k in range");
        let y = sample_y_word(&cfg.params, cfg.n, cfg.seed(2 * r + 1));
        let pair = extract_minimal_matching(&z, &y);
        enumerate_matches(&pair)
            .iter()
            .filter(|m| m.is_non_empty())
            .count() as f64
    });
    let estimate = mean(&counts);
    let se = mean_se(&counts);
    let lambda_n = lambda * cfg.n as f64;
    let below = counts.iter().filter(|&&c| c < lambda_n).count() as f64 / cfg.replicates as f64;
    let mut summary = ExperimentSummary::new("matches", estimate, se, cfg)
        .with("n", cfg.n as f64)
        .with("k", k as f64)
        .with("lambda", lambda)
        .with("lambda_n", lambda_n)
        .with("frac_below_lambda_n", below)
        .with("min", counts.iter().copied().fold(f64::INFINITY, f64::min))
        .with("max", counts.iter().copied().fold(0.0, f64::max));
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Sample variance of the extra-letter count N conditional on N landing in
/// the one-sigma interval I, with the empirical `P(N in I)` against the
/// Berry-Esseen window.
pub fn estimate_conditional_variance_n(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let counts = map_replicates(cfg.replicates, |r| {
        let x = sample_x_word(&cfg.params, cfg.n, cfg.seed(r));
        strip_extra_letter(&x, cfg.params.m()).1 as f64
    });
    let (lo, hi) = cfg.interval_i();
    let inside: Vec<f64> = counts
        .iter()
        .copied()
        .filter(|&v| v >= lo && v <= hi)
        .collect();
    let p = cfg.params.p();
    let np1p = cfg.n as f64 * p * (1.0 - p);
    let p_in_i = inside.len() as f64 / cfg.replicates as f64;

    let (estimate, se, note) = if inside.len() < 2 {
        (
            f64::NAN,
            f64::NAN,
            Some("no replicate landed in I".to_string()),
        )
    } else {
        (
            sample_variance(&inside),
            jackknife_variance_se(&inside),
            None,
        )
    };
    let mut summary = ExperimentSummary::new("condvarN", estimate, se, cfg)
        .with("n", cfg.n as f64)
        .with("i_lo", lo)
        .with("i_hi", hi)
        .with("replicates_in_i", inside.len() as f64)
        .with("p_in_i", p_in_i)
        .with("be_reference", PHI_WINDOW_ONE_SIGMA)
        .with("be_radius", 1.0 / np1p.sqrt())
        .with("variance_floor", p * (1.0 - p) * cfg.n as f64 / 1000.0)
        .with(
            "closed_form_bound",
            conditional_variance_n_lower_bound(&cfg.params, cfg.n),
        );
    summary.note = note;
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Dispatches on the experiment kind; `k` is taken from the config where
/// needed.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    match kind {
        ExperimentKind::Variance => estimate_lc_variance(cfg),
        ExperimentKind::EventE => estimate_event_e(cfg),
        ExperimentKind::Drift => {
            let k = cfg.k.ok_or_else(|| {
                Error::InvalidParams("drift requires k (flag --k or config key)".into())
            })?;
            estimate_drift(cfg, k)
        }
        ExperimentKind::Slope => estimate_slope_event(cfg),
        ExperimentKind::Matches => {
            let k = cfg.k.ok_or_else(|| {
                Error::InvalidParams("matches requires k (flag --k or config key)".into())
            })?;
            estimate_nonempty_matches(cfg, k)
        }
        ExperimentKind::CondVarN => estimate_conditional_variance_n(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, reps: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(ModelParams::new(2, 1, 2).unwrap(), n, reps, seed).unwrap()
    }

    #[test]
    fn variance_estimate_on_tiny_oracle_instance() {
        // Exact Var LC_1 = 3/16 at m = 2, p = 1/2; 4 jackknife sigmas.
        let summary = estimate_lc_variance(&cfg(1, 20_000, 11)).unwrap();
        let exact = 3.0 / 16.0;
        assert!(
            (summary.estimate - exact).abs() <= 4.0 * summary.std_error,
            "estimate {} vs exact {exact} (se {})",
            summary.estimate,
            summary.std_error
        );
        assert!(summary.ci95.0 <= summary.estimate && summary.estimate <= summary.ci95.1);
    }

    #[test]
    fn variance_respects_efron_stein() {
        let summary = estimate_lc_variance(&cfg(60, 4_000, 12)).unwrap();
        let bound = summary.extras["efron_stein_upper"];
        assert!(summary.estimate <= bound + 4.0 * summary.std_error);
    }

    #[test]
    fn event_e_single_letter_case() {
        // nu n = 1: the single chain letter must appear somewhere in Y, so
        // the probability is at least 1 - (1 - 1/m)^n.
        let mut c = cfg(8, 20_000, 13);
        c.nu = Some(0.125);
        let summary = estimate_event_e(&c).unwrap();
        let floor = 1.0 - (0.5f64).powi(8);
        assert!(summary.estimate >= floor - 4.0 * summary.std_error);
        assert!((0.0..=1.0).contains(&summary.estimate));
    }

    #[test]
    fn drift_in_all_matched_regime_is_near_one() {
        let summary = estimate_drift(&cfg(100, 2_000, 14), 10).unwrap();
        assert!(summary.estimate > 0.95, "drift {}", summary.estimate);
    }

    #[test]
    fn drift_bounds_and_preconditions() {
        let summary = estimate_drift(&cfg(40, 500, 15), 39).unwrap();
        assert!((0.0..=1.0).contains(&summary.estimate));
        assert!(summary.estimate > summary.extras["ledger_lambda_over_m"]);
        assert!(estimate_drift(&cfg(40, 10, 15), 0).is_err());
        assert!(estimate_drift(&cfg(40, 10, 15), 40).is_err());
    }

    #[test]
    fn slope_event_trivial_k_values() {
        // K = 0: non-decreasing profile always passes.
        let mut c = cfg(64, 200, 16);
        c.slope_k = Some(0.0);
        c.h = Some(5.0);
        let summary = estimate_slope_event(&c).unwrap();
        assert_eq!(summary.estimate, 1.0);
        assert!(summary.extras["pairs_checked"] > 0.0);

        // K > 1: increments are capped at 1, so any checked pair fails.
        let mut c = cfg(64, 200, 16);
        c.slope_k = Some(1.0 + 1.0 / 64.0);
        c.h = Some(5.0);
        let summary = estimate_slope_event(&c).unwrap();
        assert_eq!(summary.estimate, 0.0);
    }

    #[test]
    fn slope_window_error() {
        // p so small that I sits entirely below nu n.
        let params = ModelParams::new(2, 1, 100).unwrap();
        let c = ExperimentConfig::new(params, 100, 10, 17).unwrap();
        assert!(matches!(
            estimate_slope_event(&c),
            Err(Error::EmptySlopeWindow(_))
        ));
    }

    #[test]
    fn nonempty_matches_summary() {
        let summary = estimate_nonempty_matches(&cfg(60, 300, 18), 30).unwrap();
        assert!(summary.estimate >= 0.0);
        assert!(summary.extras["min"] <= summary.extras["max"]);
        // Ledger lambda is tiny, so no replicate should fall below it.
        assert_eq!(summary.extras["frac_below_lambda_n"], 0.0);
    }

    #[test]
    fn cond_var_n_reports_interval() {
        let summary = estimate_conditional_variance_n(&cfg(400, 20_000, 19)).unwrap();
        // P(N in I) should be near the one-sigma normal window.
        let be = summary.extras["be_radius"];
        assert!(
            (summary.extras["p_in_i"] - PHI_WINDOW_ONE_SIGMA).abs()
                <= be + 4.0 * proportion_se(summary.extras["p_in_i"], 20_000),
        );
        assert!(summary.estimate > 0.0);
        assert_eq!(
            summary.extras["i_lo"] + summary.extras["i_hi"],
            2.0 * 400.0 * 0.5
        );
    }

    #[test]
    fn estimators_are_deterministic() {
        let a = estimate_lc_variance(&cfg(40, 500, 99)).unwrap();
        let b = estimate_lc_variance(&cfg(40, 500, 99)).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.std_error, b.std_error);
        let c = estimate_lc_variance(&cfg(40, 500, 100)).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "condvarN".parse::<ExperimentKind>().unwrap(),
            ExperimentKind::CondVarN
        );
        assert!("bogus".parse::<ExperimentKind>().is_err());
    }
}
