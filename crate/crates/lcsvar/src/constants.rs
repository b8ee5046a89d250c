//! Closed-form evaluation of every constant, bound and threshold used by
//! the variance argument: the Efron-Stein upper bound, the Chernoff rate
//! of the all-matched event, the compartment-length threshold `D`, the
//! drift `lambda`, the slope constant `K`, the exponential-tail constants
//! `C1..C9, A, B`, and the window rule `h(n)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::rational::Rational;
use crate::words::ModelParams;
use crate::{Error, Result};

/// `(n/2) * (2 - p^2 - (1 + (1-p)^2)/m)`, the Efron-Stein variance upper
/// bound for the biased letter model.
pub fn efron_stein_upper(params: &ModelParams, n: usize) -> f64 {
    let p = params.p();
    let m = params.m() as f64;
    (n as f64 / 2.0) * (2.0 - p * p - (1.0 + (1.0 - p) * (1.0 - p)) / m)
}

/// Chernoff rate of the all-matched event:
/// `C1 = ln( m (m-1)^(nu-1) nu^nu / (1-nu)^(nu-1) )`, positive for
/// `nu < 1/m` and zero at `nu = 1/m`.
pub fn c1(nu: f64, m: usize) -> Result<f64> {
    if nu <= 0.0 || nu > 1.0 / m as f64 {
        return Err(Error::InvalidParams(format!(
            "c1 requires 0 < nu <= 1/m, got nu = {nu}, m = {m}"
        )));
    }
    let mf = m as f64;
    Ok(mf.ln() + (nu - 1.0) * (mf - 1.0).ln() + nu * nu.ln() - (nu - 1.0) * (1.0 - nu).ln())
}

/// `C2 = m / (2(m-1))`, the rate in the subsequence-containment bound.
pub fn c2(m: usize) -> f64 {
    let mf = m as f64;
    mf / (2.0 * (mf - 1.0))
}

/// `delta(eps) = eps + sqrt((2/C2)(eps(ln m - ln eps) - (1-eps)ln(1-eps)))`.
pub fn delta_of_epsilon(epsilon: f64, m: usize) -> Result<f64> {
    if epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "delta_of_epsilon requires 0 < eps < 1, got {epsilon}"
        )));
    }
    let mf = m as f64;
    let inner = epsilon * (mf.ln() - epsilon.ln()) - (1.0 - epsilon) * (1.0 - epsilon).ln();
    Ok(epsilon + (2.0 / c2(m) * inner).sqrt())
}

/// Half the expected two-letter LCS of two uniform words:
/// `(4m^2 - 5m + 3) / (2m^3)`.
pub fn expected_l22_half(m: usize) -> f64 {
    let mf = m as f64;
    (4.0 * mf * mf - 5.0 * mf + 3.0) / (2.0 * mf * mf * mf)
}

/// Same value as an exact fraction.
pub fn expected_l22_half_rational(m: usize) -> Result<Rational> {
    let mi = m as i128;
    Rational::new(4 * mi * mi - 5 * mi + 3, 2 * mi * mi * mi)
}

/// `sqrt(2*pi)`.
fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// `int_{-1}^{1} e^{-x^2/2} dx`.
fn gauss_window_integral() -> f64 {
    sqrt_2pi() * crate::stats::PHI_WINDOW_ONE_SIGMA
}

/// `int_{-1}^{1} x^2 e^{-x^2/2} dx` (integration by parts).
fn gauss_window_second_moment() -> f64 {
    gauss_window_integral() - 2.0 * (-0.5f64).exp()
}

/// Lower bound on `Var(N | N in I)` from the Berry-Esseen step; vacuous
/// (zero) when `n p (1-p)` is too small for the estimate to bite.
pub fn conditional_variance_n_lower_bound(params: &ModelParams, n: usize) -> f64 {
    let s = (n as f64 * params.p() * (1.0 - params.p())).sqrt();
    let g0 = gauss_window_integral();
    let g2 = gauss_window_second_moment();
    let inner = (g2 - 2.0 * sqrt_2pi() / s) / (g0 + sqrt_2pi() / s);
    let denom = g0 / sqrt_2pi() - 1.0 / s;
    if inner <= 0.0 || denom <= 0.0 {
        return 0.0;
    }
    let term1 = s * inner.sqrt();
    let term2 = 2.0 / denom;
    let diff = term1 - term2;
    if diff <= 0.0 {
        0.0
    } else {
        diff * diff
    }
}

/// One inequality of the ledger's self-check report.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// All constants of the estimation section for a given `(m, p)`, with the
/// paper's choices `nu = 1/2m`, `eps = e^-9/(1+ln m)`, `xi_m = 11/10m`,
/// `c(tau_m) = 1/1000m`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsLedger {
    pub m: usize,
    pub p: f64,
    pub nu: f64,
    pub epsilon: f64,
    pub delta_epsilon: f64,
    pub xi_m: f64,
    pub tau_m: f64,
    pub c_tau: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    #[serde(rename = "C4")]
    pub c4: f64,
    #[serde(rename = "C5")]
    pub c5: f64,
    #[serde(rename = "C6")]
    pub c6: f64,
    #[serde(rename = "C7")]
    pub c7: f64,
    #[serde(rename = "C8")]
    pub c8: f64,
    #[serde(rename = "C9")]
    pub c9: f64,
    /// Min of empirical `Var LC_n / n` over a user-supplied small-n range;
    /// the full defining range is astronomically large, so this is always
    /// partial and `None` until supplied.
    #[serde(rename = "C10_partial")]
    pub c10_partial: Option<f64>,
    #[serde(rename = "D")]
    pub d: u64,
    pub lambda: f64,
    #[serde(rename = "K")]
    pub slope_k: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "A")]
    pub tail_a: f64,
    #[serde(rename = "B")]
    pub tail_b: f64,
    /// The window rule, as a human-readable reminder that `h` is a
    /// function of `n`, not a number.
    pub h_rule: String,
    /// Smallest n for which `ceil(2 ln n / K^2) <= K1 sqrt(n)`.
    pub h_window_min_n: f64,
    /// Exact fractions for the constants that are rational in `m`.
    pub rational_forms: BTreeMap<String, String>,
}

/// Builds the ledger and validates its defining inequalities, reporting
/// the first violated one.
pub fn build_ledger(params: &ModelParams) -> Result<ConstantsLedger> {
    let m = params.m();
    let mf = m as f64;
    let p = params.p();

    let nu = 1.0 / (2.0 * mf);
    let epsilon = (-9.0f64).exp() / (1.0 + mf.ln());
    let delta_epsilon = delta_of_epsilon(epsilon, m)?;
    let xi_m = 11.0 / (10.0 * mf);
    let e_l22 = 2.0 * expected_l22_half(m);
    let tau_m = e_l22 - 2.0 * xi_m;
    let c_tau = 1.0 / (1000.0 * mf);

    let c1_val = c1(nu, m)?;
    let c2_val = c2(m);
    let c3 = (delta_epsilon - epsilon).powi(2) * c2_val / 2.0;
    let c4 = 1.0 / (1.0 - (-c3).exp());
    let c5 = {
        let z = (c_tau / 2.0).exp();
        z / (z - 1.0)
    };
    let c6 = c_tau * nu / 2.0;

    // D = 1 / (y (ln x)^2), x = (m-1)/m, y = xi_m nu eps / 2m, rounded up.
    let x = (mf - 1.0) / mf;
    let y = xi_m * nu * epsilon / (2.0 * mf);
    let d_real = 1.0 / (y * x.ln() * x.ln());
    let d = d_real.ceil() as u64;
    let c7 = d as f64;
    // c(delta) = -ln P(window in one compartment) with the Bernoulli bound
    // P <= m x^D, so C8 = c(delta)/D = ln(m/(m-1)) - ln(m)/D.
    let c8 = (mf / (mf - 1.0)).ln() - mf.ln() / d as f64;

    let lambda = (xi_m * nu / 2.0 * epsilon / (d as f64 - 1.0)).min(1.0);
    let slope_k = lambda / (2.0 * mf);
    let k1 = (p * (1.0 - p)).sqrt() / (20.0 * 5.0f64.sqrt());
    let c9 = slope_k * slope_k / 64000.0 * p * (1.0 - p);

    let tail_a = (1.0 + 2000.0 * mf).max(20.0 * 9.0f64.exp());
    let tail_b = (-10.0f64).exp() / (mf * mf);

    // Smallest n with a nonempty window 2 ln n / K^2 <= h <= K1 sqrt(n):
    // bisect on t = ln n for 2t/K^2 = K1 e^(t/2).
    let h_window_min_n = {
        let f = |t: f64| k1 * (t / 2.0).exp() - 2.0 * t / (slope_k * slope_k);
        let (mut lo, mut hi) = (1.0f64, 708.0f64);
        if f(hi) <= 0.0 {
            f64::INFINITY
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi.exp()
        }
    };

    let mut rational_forms = BTreeMap::new();
    let mi = m as i128;
    rational_forms.insert("nu".into(), Rational::new(1, 2 * mi)?.to_string());
    rational_forms.insert("xi_m".into(), Rational::new(11, 10 * mi)?.to_string());
    rational_forms.insert("c_tau".into(), Rational::new(1, 1000 * mi)?.to_string());
    rational_forms.insert("C6".into(), Rational::new(1, 4000 * mi * mi)?.to_string());
    rational_forms.insert(
        "expected_l22_half".into(),
        expected_l22_half_rational(m)?.to_string(),
    );
    rational_forms.insert(
        "tau_m".into(),
        Rational::new(9 * mi * mi - 25 * mi + 15, 5 * mi * mi * mi)?.to_string(),
    );

    let ledger = ConstantsLedger {
        m,
        p,
        nu,
        epsilon,
        delta_epsilon,
        xi_m,
        tau_m,
        c_tau,
        c1: c1_val,
        c2: c2_val,
        c3,
        c4,
        c5,
        c6,
        c7,
        c8,
        c9,
        c10_partial: None,
        d,
        lambda,
        slope_k,
        k1,
        tail_a,
        tail_b,
        h_rule: "h(n) = ceil(2 ln n / K^2)".into(),
        h_window_min_n,
        rational_forms,
    };

    for check in ledger.invariant_checks() {
        if !check.holds {
            return Err(Error::LedgerInvariant(format!(
                "{}: lhs = {}, rhs = {}",
                check.name, check.lhs, check.rhs
            )));
        }
    }
    Ok(ledger)
}

impl ConstantsLedger {
    /// The defining inequalities of the ledger, in checkable form.
    pub fn invariant_checks(&self) -> Vec<InequalityCheck> {
        let mf = self.m as f64;
        let mut out = Vec::new();
        let mut push = |name: &str, lhs: f64, rhs: f64, holds: bool| {
            out.push(InequalityCheck {
                name: name.into(),
                lhs,
                rhs,
                holds,
            });
        };
        push("nu < 1/m", self.nu, 1.0 / mf, self.nu < 1.0 / mf);
        push("1/m < xi_m", 1.0 / mf, self.xi_m, 1.0 / mf < self.xi_m);
        push(
            "xi_m < E L2(2)/2",
            self.xi_m,
            expected_l22_half(self.m),
            self.xi_m < expected_l22_half(self.m),
        );
        push(
            "1/(1 - delta(eps)) < xi_m * m",
            1.0 / (1.0 - self.delta_epsilon),
            self.xi_m * mf,
            1.0 / (1.0 - self.delta_epsilon) < self.xi_m * mf,
        );
        push("lambda <= 1", self.lambda, 1.0, self.lambda <= 1.0);
        push(
            "K <= 1/2m",
            self.slope_k,
            1.0 / (2.0 * mf),
            self.slope_k <= 1.0 / (2.0 * mf),
        );
        // 2 D m x^D < xi_m nu eps, compared in log space since x^D
        // underflows f64 for the actual D.
        let x = (mf - 1.0) / mf;
        let log_lhs = (2.0 * self.d as f64 * mf).ln() + self.d as f64 * x.ln();
        let log_rhs = (self.xi_m * self.nu * self.epsilon).ln();
        push(
            "ln(2 D m ((m-1)/m)^D) < ln(xi_m nu eps)",
            log_lhs,
            log_rhs,
            log_lhs < log_rhs,
        );
        push(
            "C3 >= e^-10",
            self.c3,
            (-10.0f64).exp(),
            self.c3 >= (-10.0f64).exp(),
        );
        push(
            "C4 <= e^11",
            self.c4,
            11.0f64.exp(),
            self.c4 <= 11.0f64.exp(),
        );
        push(
            "C5 <= 1 + 2000 m",
            self.c5,
            1.0 + 2000.0 * mf,
            self.c5 <= 1.0 + 2000.0 * mf,
        );
        push(
            "C8 >= 1/2m",
            self.c8,
            1.0 / (2.0 * mf),
            self.c8 >= 1.0 / (2.0 * mf),
        );
        out
    }

    /// `h(n) = ceil(2 ln n / K^2)`, admissible only while `h(n) <= K1
    /// sqrt(n)`; errors below the window threshold.
    pub fn h_of(&self, n: usize) -> Result<f64> {
        let h = (2.0 * (n as f64).ln() / (self.slope_k * self.slope_k)).ceil();
        if h > self.k1 * (n as f64).sqrt() {
            return Err(Error::OutOfRange(format!(
                "h(n) window empty at n = {n}; smallest admissible n is {:.3e}",
                self.h_window_min_n
            )));
        }
        Ok(h)
    }

    /// Same rule without the window admissibility check, for desk-scale
    /// slope experiments with an overridden K.
    pub fn h_unchecked(n: usize, slope_k: f64) -> f64 {
        (2.0 * (n as f64).ln() / (slope_k * slope_k)).ceil()
    }

    /// `1 - A e^(-Bn) - n e^(-2 K^2 h(n))`, the tail bound of the slope
    /// event with `h(n) = ceil(2 ln n / K^2)`.
    pub fn slope_event_tail_bound(&self, n: usize) -> f64 {
        let nf = n as f64;
        let first = self.tail_a * (-self.tail_b * nf).exp();
        let h = Self::h_unchecked(n, self.slope_k);
        let second = (nf.ln() - 2.0 * self.slope_k * self.slope_k * h).exp();
        1.0 - first - second
    }

    /// Threshold `e^10 m^2 ln(80 e^9 + 8000 m)` past which the slope-event
    /// probability bound reaches 1/2.
    pub fn slope_half_threshold(&self) -> f64 {
        let mf = self.m as f64;
        10.0f64.exp() * mf * mf * (80.0 * 9.0f64.exp() + 8000.0 * mf).ln()
    }

    /// `C = min(C9, C10)` with a supplied partial `C10 > 0`.
    pub fn lower_bound_constant(&self, c10_partial: f64) -> Result<f64> {
        if c10_partial.is_nan() || c10_partial <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "partial C10 must be positive, got {c10_partial}"
            )));
        }
        Ok(self.c9.min(c10_partial))
    }

    /// Aligned two-column text rendering.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("m".into(), self.m.to_string()),
            ("p".into(), format!("{}", self.p)),
            ("nu".into(), format!("{:.6e}", self.nu)),
            ("epsilon".into(), format!("{:.6e}", self.epsilon)),
            ("delta(eps)".into(), format!("{:.6e}", self.delta_epsilon)),
            ("xi_m".into(), format!("{:.6e}", self.xi_m)),
            ("tau_m".into(), format!("{:.6e}", self.tau_m)),
            ("c(tau_m)".into(), format!("{:.6e}", self.c_tau)),
            ("C1".into(), format!("{:.6e}", self.c1)),
            ("C2".into(), format!("{:.6e}", self.c2)),
            ("C3".into(), format!("{:.6e}", self.c3)),
            ("C4".into(), format!("{:.6e}", self.c4)),
            ("C5".into(), format!("{:.6e}", self.c5)),
            ("C6".into(), format!("{:.6e}", self.c6)),
            ("C7 (= D)".into(), format!("{:.6e}", self.c7)),
            ("C8".into(), format!("{:.6e}", self.c8)),
            ("C9".into(), format!("{:.6e}", self.c9)),
            (
                "C10 (partial)".into(),
                self.c10_partial
                    .map(|v| format!("{v:.6e}"))
                    .unwrap_or_else(|| "unset".into()),
            ),
            ("D".into(), self.d.to_string()),
            ("lambda".into(), format!("{:.6e}", self.lambda)),
            ("K".into(), format!("{:.6e}", self.slope_k)),
            ("K1".into(), format!("{:.6e}", self.k1)),
            ("A".into(), format!("{:.6e}", self.tail_a)),
            ("B".into(), format!("{:.6e}", self.tail_b)),
            ("h(n)".into(), self.h_rule.clone()),
            (
                "min n with h-window".into(),
                format!("{:.3e}", self.h_window_min_n),
            ),
        ];
        for (k, v) in &self.rational_forms {
            rows.push((format!("{k} (exact)"), v.clone()));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Free-function form of [`ConstantsLedger::lower_bound_constant`].
pub fn lower_bound_constant(params: &ModelParams, c10_partial: f64) -> Result<f64> {
    build_ledger(params)?.lower_bound_constant(c10_partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize) -> ModelParams {
        ModelParams::new(m, 1, 2).unwrap()
    }

    #[test]
    fn efron_stein_closed_form() {
        assert!((efron_stein_upper(&params(2), 100) - 56.25).abs() < 1e-12);
        // p -> 1 limit with m = 2 gives n/4.
        let near_one = ModelParams::new(2, 999_999, 1_000_000).unwrap();
        let v = efron_stein_upper(&near_one, 100);
        assert!((v - 25.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn c1_vanishes_at_inverse_m() {
        for m in 2..=6 {
            let v = c1(1.0 / m as f64, m).unwrap();
            assert!(v.abs() < 1e-12, "m = {m}: {v}");
        }
    }

    #[test]
    fn c1_value_at_quarter() {
        // Frozen from two independent evaluations: the closed form and the
        // direct Chernoff infimum (see c1_matches_chernoff_infimum).
        let v = c1(0.25, 2).unwrap();
        assert!((v - 0.130812).abs() < 1e-6, "{v}");
    }

    #[test]
    fn c1_matches_chernoff_infimum() {
        // exp(-C1) should equal inf_s e^-s/nu * E e^(s T) per unit nu,
        // i.e. e^-s (e^s/(m - (m-1)e^s))^nu at the minimizing s.
        let (nu, m) = (0.25f64, 2usize);
        let mf = m as f64;
        let mut best = f64::INFINITY;
        let mut s = 1e-4;
        while s < (mf / (mf - 1.0)).ln() - 1e-9 {
            let es = s.exp();
            let val = (-s).exp() * (es / (mf - (mf - 1.0) * es)).powf(nu);
            best = best.min(val);
            s += 1e-6;
        }
        let c1_num = -best.ln();
        assert!((c1_num - c1(nu, m).unwrap()).abs() < 1e-6, "{c1_num}");
    }

    #[test]
    fn c1_decreasing_in_nu() {
        let a = c1(0.10, 2).unwrap();
        let b = c1(0.25, 2).unwrap();
        let c = c1(0.49, 2).unwrap();
        assert!(a > b && b > c);
        assert!(c1(0.5, 2).unwrap().abs() < 1e-12);
        assert!(c1(0.6, 2).is_err());
    }

    #[test]
    fn delta_epsilon_values() {
        // C2 for m = 2 is 1.
        assert!((c2(2) - 1.0).abs() < 1e-12);
        // At the ledger epsilon the value stays below 1/11.
        let eps = (-9.0f64).exp() / (1.0 + 2.0f64.ln());
        let d = delta_of_epsilon(eps, 2).unwrap();
        assert!(d < 1.0 / 11.0, "{d}");
        // delta(eps) -> 0 as eps -> 0.
        assert!(delta_of_epsilon(1e-12, 2).unwrap() < 1e-4);
        assert!(delta_of_epsilon(0.0, 2).is_err());
        assert!(delta_of_epsilon(1.0, 2).is_err());
    }

    #[test]
    fn expected_l22_half_values() {
        assert!((expected_l22_half(2) - 0.5625).abs() < 1e-12);
        assert_eq!(
            expected_l22_half_rational(2).unwrap(),
            Rational::new(9, 16).unwrap()
        );
        // 11/(10m) < E L2(2)/2 across a sweep.
        for m in 2..=64 {
            assert!(11.0 / (10.0 * m as f64) < expected_l22_half(m), "m = {m}");
        }
    }

    #[test]
    fn ledger_builds_and_checks_pass() {
        for m in 2..=10 {
            let ledger = build_ledger(&params(m)).unwrap();
            for check in ledger.invariant_checks() {
                assert!(check.holds, "m = {m}: {}", check.name);
            }
            assert!((ledger.nu - 1.0 / (2.0 * m as f64)).abs() < 1e-15);
            assert!((ledger.xi_m - 1.1 / m as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn ledger_m2_values() {
        let ledger = build_ledger(&params(2)).unwrap();
        assert!((ledger.nu - 0.25).abs() < 1e-15);
        assert!((ledger.xi_m - 0.55).abs() < 1e-15);
        let eps = (-9.0f64).exp() / (1.0 + 2.0f64.ln());
        assert!((ledger.epsilon - eps).abs() < 1e-18);
        // D from the closed form 40 e^9 m^3 (1 + ln m) / (11 ln^2((m-1)/m)).
        let d_closed =
            40.0 * 9.0f64.exp() * 8.0 * (1.0 + 2.0f64.ln()) / (11.0 * 0.5f64.ln().powi(2));
        assert_eq!(ledger.d, d_closed.ceil() as u64);
        assert_eq!(ledger.rational_forms["nu"], "1/4");
        assert_eq!(ledger.rational_forms["expected_l22_half"], "9/16");
        assert_eq!(ledger.rational_forms["tau_m"], "1/40");
    }

    #[test]
    fn slope_tail_reaches_half_past_threshold() {
        for m in 2..=4usize {
            let ledger = build_ledger(&params(m)).unwrap();
            let n0 = ledger.slope_half_threshold().ceil() as usize;
            for n in [n0, 2 * n0, 10 * n0] {
                let tail = ledger.slope_event_tail_bound(n);
                assert!(tail >= 0.5, "m = {m}, n = {n}: {tail}");
            }
        }
    }

    #[test]
    fn conditional_variance_bound_sweep() {
        // For n >= 900/(p(1-p)) the closed-form bound dominates
        // p(1-p)n/1000.
        for &(num, den) in &[(1u64, 2u64), (1, 4), (3, 4)] {
            let p = ModelParams::new(2, num, den).unwrap();
            let pf = p.p();
            let n_min = (900.0 / (pf * (1.0 - pf))).ceil() as usize;
            for mult in [1usize, 2, 5, 20, 100] {
                let n = n_min * mult;
                let bound = conditional_variance_n_lower_bound(&p, n);
                let target = pf * (1.0 - pf) * n as f64 / 1000.0;
                assert!(bound >= target, "p={pf}, n={n}: {bound} < {target}");
            }
        }
    }

    #[test]
    fn lower_bound_constant_semantics() {
        let ledger = build_ledger(&params(2)).unwrap();
        assert_eq!(
            ledger.lower_bound_constant(1.0).unwrap(),
            ledger.c9,
            "C9 wins when C10 is larger"
        );
        let tiny = ledger.c9 / 2.0;
        assert_eq!(ledger.lower_bound_constant(tiny).unwrap(), tiny);
        assert!(ledger.lower_bound_constant(0.0).is_err());
        assert!(ledger.lower_bound_constant(-1.0).is_err());
        assert!(lower_bound_constant(&params(2), 0.5).unwrap() > 0.0);
    }

    #[test]
    fn h_window_check() {
        let ledger = build_ledger(&params(2)).unwrap();
        // Desk-scale n sits far below the admissible window.
        assert!(ledger.h_of(1000).is_err());
        assert!(ledger.h_window_min_n > 1e20);
        // With an overridden K the unchecked rule is usable.
        assert_eq!(ConstantsLedger::h_unchecked(500, 0.1), 1243.0);
    }
}
