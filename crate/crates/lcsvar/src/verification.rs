//! Runtime verification: independent brute-force oracles and the check
//! suite behind the `verify` subcommand.
//!
//! The oracles here share no code with the paths they check: LCS by
//! exhaustive subsequence enumeration (not dynamic programming),
//! matchings by exhaustive maximal-pair search, event probabilities by
//! exact enumeration.

use serde::Serialize;

use crate::chain::{build_chain, exact_chain_law_is_uniform, lcs_profile};
use crate::constants::{build_ledger, expected_l22_half};
use crate::experiments::{estimate_lc_variance, ExperimentConfig};
use crate::lcs::{
    decompose_compartments, enumerate_matches, extract_minimal_matching, lcs_length,
    lcs_length_bitparallel, suffix_lcs_table, MatchingPair,
};
use crate::oracle::{exact_lc_distribution, exact_ln_k_distribution, mixture_lc_distribution};
use crate::rational::Rational;
use crate::stats::chi_square_uniform;
use crate::words::{sample_x_word, sample_y_word, strip_extra_letter, ModelParams, SeedSpec, Word};
use crate::{Error, Result};

/// LCS length by exhaustive subsequence enumeration over the shorter word.
/// Exponential; intended for words up to ~20 letters.
pub fn lcs_brute_force(a: &Word, b: &Word) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let s = short.letters();
    let l = long.letters();
    let mut best = 0usize;
    for mask in 0u32..(1u32 << s.len()) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let mut pos = 0usize;
        let mut ok = true;
        for (i, &c) in s.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            match l[pos..].iter().position(|&x| x == c) {
                Some(off) => pos += off + 1,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = len;
        }
    }
    best
}

/// All maximal-length matching pairs of `a` and `b`, by depth-first search
/// pruned with a suffix LCS table. Errors out past `cap` pairs.
pub fn enumerate_maximal_pairs(a: &Word, b: &Word, cap: usize) -> Result<Vec<MatchingPair>> {
    let (al, bl) = (a.letters(), b.letters());
    let suffix = suffix_lcs_table(al, bl);
    let total = suffix[0][0] as usize;
    let mut out = Vec::new();
    if total == 0 {
        out.push(MatchingPair {
            pi: Vec::new(),
            eta: Vec::new(),
        });
        return Ok(out);
    }
    let mut pi = Vec::with_capacity(total);
    let mut eta = Vec::with_capacity(total);

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        al: &[u8],
        bl: &[u8],
        suffix: &[Vec<u32>],
        total: usize,
        from_i: usize,
        from_j: usize,
        pi: &mut Vec<usize>,
        eta: &mut Vec<usize>,
        out: &mut Vec<MatchingPair>,
        cap: usize,
    ) -> Result<()> {
        let s = pi.len();
        if s == total {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded(format!(
                    "more than {cap} maximal pairs"
                )));
            }
            out.push(MatchingPair {
                pi: pi.clone(),
                eta: eta.clone(),
            });
            return Ok(());
        }
        let needed = (total - s - 1) as u32;
        for i in from_i..al.len() {
            for j in from_j..bl.len() {
                if al[i] == bl[j] && suffix[i + 1][j + 1] >= needed {
                    pi.push(i + 1);
                    eta.push(j + 1);
                    dfs(al, bl, suffix, total, i + 1, j + 1, pi, eta, out, cap)?;
                    pi.pop();
                    eta.pop();
                }
            }
        }
        Ok(())
    }

    dfs(
        al, bl, &suffix, total, 0, 0, &mut pi, &mut eta, &mut out, cap,
    )?;
    Ok(out)
}

/// The coordinatewise-minimal members of a maximal-pair set.
pub fn minimal_pairs(pairs: &[MatchingPair]) -> Vec<MatchingPair> {
    pairs
        .iter()
        .filter(|x| {
            !pairs
                .iter()
                .any(|y| y.le(x) && (y.pi != x.pi || y.eta != x.eta))
        })
        .cloned()
        .collect()
}

/// All words of length `0..=max_len` over `alphabet` letters, in
/// lexicographic order.
pub fn all_words(alphabet: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        let total = (alphabet as u64).pow(len as u32);
        for mut idx in 0..total {
            let mut letters = vec![0u8; len];
            for slot in letters.iter_mut().rev() {
                *slot = (idx % alphabet as u64) as u8;
                idx /= alphabet as u64;
            }
            out.push(Word::new(letters));
        }
    }
    out
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &str, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

/// DP LCS against exhaustive subsequence brute force over every word pair
/// with lengths up to `max_len` over `alphabet` letters.
pub fn check_oracle_equivalence(alphabet: usize, max_len: usize) -> CheckOutcome {
    let words = all_words(alphabet, max_len);
    let mismatches: usize = crate::map_replicates(words.len() as u64, |i| {
        let a = &words[i as usize];
        words
            .iter()
            .filter(|b| lcs_length(a, b) != lcs_brute_force(a, b))
            .count()
    })
    .into_iter()
    .sum();
    let total = words.len() * words.len();
    let name = "oracle_equivalence";
    if mismatches == 0 {
        CheckOutcome::pass(name, format!("{total} pairs, 0 mismatches"))
    } else {
        CheckOutcome::fail(name, format!("{mismatches} mismatches out of {total}"))
    }
}

/// Bit-parallel kernel against the DP on random pairs.
pub fn check_kernel_equivalence(
    pairs: u64,
    max_n: usize,
    max_m: usize,
    master_seed: u64,
) -> CheckOutcome {
    let mismatches: u64 = crate::map_replicates(pairs, |r| {
        let mut rng = SeedSpec::new(master_seed, r).rng();
        use rand::Rng;
        let m = rng.random_range(2..=max_m as u64) as usize;
        let la = rng.random_range(0..=max_n as u64) as usize;
        let lb = rng.random_range(0..=max_n as u64) as usize;
        let params = ModelParams::new(m, 1, 2).unwrap();
        let a = sample_x_word(&params, la, SeedSpec::new(master_seed, 3 * r + 1));
        let b = sample_y_word(&params, lb, SeedSpec::new(master_seed, 3 * r + 2));
        u64::from(lcs_length_bitparallel(&a, &b) != lcs_length(&a, &b))
    })
    .into_iter()
    .sum();
    let name = "kernel_equivalence";
    if mismatches == 0 {
        CheckOutcome::pass(name, format!("{pairs} random pairs, 0 mismatches"))
    } else {
        CheckOutcome::fail(name, format!("{mismatches} mismatches out of {pairs}"))
    }
}

/// Exact uniformity of the chain law for small k (rational equality).
pub fn check_chain_law_exact(m_max: usize, k_max: usize) -> CheckOutcome {
    let name = "chain_law_exact";
    for m in 2..=m_max {
        for k in 1..=k_max {
            match exact_chain_law_is_uniform(m, k) {
                Ok(true) => {}
                Ok(false) => {
                    return CheckOutcome::fail(name, format!("law not uniform at m = {m}, k = {k}"))
                }
                Err(e) => return CheckOutcome::fail(name, format!("m = {m}, k = {k}: {e}")),
            }
        }
    }
    CheckOutcome::pass(
        name,
        format!("uniform law for m <= {m_max}, k <= {k_max} (exact)"),
    )
}

/// Ledger inequalities over a range of alphabet sizes.
pub fn check_ledger_invariants(m_max: usize) -> CheckOutcome {
    let name = "ledger_invariants";
    for m in 2..=m_max {
        let params = match ModelParams::new(m, 1, 2) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(name, e.to_string()),
        };
        match build_ledger(&params) {
            Ok(ledger) => {
                if let Some(bad) = ledger.invariant_checks().iter().find(|c| !c.holds) {
                    return CheckOutcome::fail(
                        name,
                        format!("m = {m}: {} ({} vs {})", bad.name, bad.lhs, bad.rhs),
                    );
                }
            }
            Err(e) => return CheckOutcome::fail(name, format!("m = {m}: {e}")),
        }
    }
    CheckOutcome::pass(name, format!("all inequalities hold for m in 2..={m_max}"))
}

/// Exact mixture identity: sum_k P(N = n-k) law(L_n(k)) = law(LC_n).
pub fn check_mixture_identity(params: &ModelParams, n: usize) -> CheckOutcome {
    let name = "mixture_identity";
    match (
        exact_lc_distribution(params, n),
        mixture_lc_distribution(params, n),
    ) {
        (Ok(direct), Ok(mixed)) => {
            if direct == mixed {
                CheckOutcome::pass(name, format!("exact rational equality at n = {n}"))
            } else {
                CheckOutcome::fail(name, format!("laws differ at n = {n}"))
            }
        }
        (Err(e), _) | (_, Err(e)) => CheckOutcome::fail(name, e.to_string()),
    }
}

/// Closed form (4m^2-5m+3)/(2m^3) against the exact uniform enumeration.
pub fn check_expected_l22(m_max: usize) -> CheckOutcome {
    let name = "expected_l22";
    for m in 2..=m_max {
        let dist = match exact_ln_k_distribution(m, 2, 2) {
            Ok(d) => d,
            Err(e) => return CheckOutcome::fail(name, e.to_string()),
        };
        let half_mean = dist
            .mean()
            .and_then(|r| r.checked_div(Rational::from_integer(2)));
        let closed = crate::constants::expected_l22_half_rational(m);
        match (half_mean, closed) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => {
                return CheckOutcome::fail(name, format!("m = {m}: {a} != {b}"));
            }
            (Err(e), _) | (_, Err(e)) => return CheckOutcome::fail(name, e.to_string()),
        }
        // The float projection agrees too.
        let f = dist.mean_f64() / 2.0;
        if (f - expected_l22_half(m)).abs() > 1e-12 {
            return CheckOutcome::fail(name, format!("m = {m}: float projection off ({f})"));
        }
    }
    CheckOutcome::pass(name, format!("exact match for m in 2..={m_max}"))
}

/// Profile monotonicity with unit increments, plus spot-checked agreement
/// with per-length recomputation.
pub fn check_profile_sanity(
    params: &ModelParams,
    chains: u64,
    n: usize,
    spot_chains: u64,
    spot_n: usize,
    master_seed: u64,
) -> CheckOutcome {
    let name = "profile_sanity";
    let bad_monotone: u64 = crate::map_replicates(chains, |r| {
        let chain = build_chain(params, n, SeedSpec::new(master_seed, 2 * r)).unwrap();
        let y = sample_y_word(params, n, SeedSpec::new(master_seed, 2 * r + 1));
        u64::from(!lcs_profile(&chain, &y).increments_are_unit())
    })
    .into_iter()
    .sum();
    if bad_monotone > 0 {
        return CheckOutcome::fail(
            name,
            format!("{bad_monotone} profiles with non-unit increments"),
        );
    }
    let bad_spot: u64 = crate::map_replicates(spot_chains, |r| {
        let chain = build_chain(params, spot_n, SeedSpec::new(master_seed + 1, 2 * r)).unwrap();
        let y = sample_y_word(params, spot_n, SeedSpec::new(master_seed + 1, 2 * r + 1));
        let profile = lcs_profile(&chain, &y);
        let mismatch = (1..=spot_n).any(|k| {
            let z = chain.materialize(k).unwrap();
            profile.value(k) as usize != lcs_length(&z, &y)
        });
        u64::from(mismatch || profile.value(0) != 0)
    })
    .into_iter()
    .sum();
    if bad_spot > 0 {
        CheckOutcome::fail(
            name,
            format!("{bad_spot} profiles disagree with recomputation"),
        )
    } else {
        CheckOutcome::pass(
            name,
            format!("{chains} profiles monotone with unit increments; {spot_chains} spot-checked"),
        )
    }
}

/// Exhaustive minimality of the canonical matching over all binary word
/// pairs with lengths up to `max_len`, plus the one-compartment property
/// of minimal-pair matches.
pub fn check_minimality(max_len: usize) -> CheckOutcome {
    let name = "canonical_minimality";
    let words = all_words(2, max_len);
    let failures: Vec<String> = crate::map_replicates(words.len() as u64, |ai| {
        let a = &words[ai as usize];
        let mut local = Vec::new();
        for b in &words {
            let canonical = extract_minimal_matching(a, b);
            if canonical.len() != lcs_length(a, b) {
                local.push(format!("length mismatch at {:?} / {:?}", a, b));
                continue;
            }
            let maximal = match enumerate_maximal_pairs(a, b, 100_000) {
                Ok(p) => p,
                Err(e) => {
                    local.push(e.to_string());
                    continue;
                }
            };
            let minimal = minimal_pairs(&maximal);
            if !minimal.contains(&canonical) {
                local.push(format!("canonical not minimal for {:?} / {:?}", a, b));
            }
            // Any maximal pair below the canonical one must be it.
            if maximal
                .iter()
                .any(|p| p.le(&canonical) && (p.pi != canonical.pi || p.eta != canonical.eta))
            {
                local.push(format!("dominated canonical pair for {:?} / {:?}", a, b));
            }
            // One-compartment property of minimal pairs (binary alphabet).
            if let Ok(decomp) = decompose_compartments(b, 2) {
                for pair in &minimal {
                    for mat in enumerate_matches(pair) {
                        let comps: std::collections::BTreeSet<usize> = mat
                            .unmatched_positions()
                            .filter_map(|pos| decomp.compartment_of(pos))
                            .collect();
                        if comps.len() > 1 {
                            local.push(format!(
                                "match spans {} compartments for {:?} / {:?}",
                                comps.len(),
                                a,
                                b
                            ));
                        }
                    }
                }
            }
        }
        local
    })
    .into_iter()
    .flatten()
    .collect();
    if failures.is_empty() {
        CheckOutcome::pass(
            name,
            format!(
                "{}^2 binary word pairs: canonical pair minimal, matches single-compartment",
                words.len()
            ),
        )
    } else {
        CheckOutcome::fail(
            name,
            format!("{} failures; first: {}", failures.len(), failures[0]),
        )
    }
}

/// Exact variance table stays below the Efron-Stein bound.
pub fn check_efron_stein_exact(n_max: usize) -> CheckOutcome {
    let name = "efron_stein_exact";
    for &(num, den) in &[(1u64, 4u64), (1, 2)] {
        let params = ModelParams::new(2, num, den).unwrap();
        match crate::oracle::exact_variance_table(&params, n_max) {
            Ok(table) => {
                for row in table {
                    if row.variance_f64 > row.efron_stein_upper {
                        return CheckOutcome::fail(
                            name,
                            format!(
                                "p = {num}/{den}, n = {}: {} > {}",
                                row.n, row.variance_f64, row.efron_stein_upper
                            ),
                        );
                    }
                }
            }
            Err(e) => return CheckOutcome::fail(name, e.to_string()),
        }
    }
    CheckOutcome::pass(
        name,
        format!("exact variances below bound up to n = {n_max}"),
    )
}

/// Monte Carlo agreement with the exact oracle over the tiny grid
/// (4 sigma on both mean and variance).
pub fn check_mc_against_oracle(replicates: u64, master_seed: u64) -> CheckOutcome {
    let name = "mc_vs_oracle";
    for m in 2..=3usize {
        for &(num, den) in &[(1u64, 4u64), (1, 2)] {
            for n in 1..=5usize {
                let params = ModelParams::new(m, num, den).unwrap();
                let exact = match exact_lc_distribution(&params, n) {
                    Ok(d) => d,
                    Err(e) => return CheckOutcome::fail(name, e.to_string()),
                };
                let cfg = ExperimentConfig::new(params, n, replicates, master_seed).unwrap();
                let summary = estimate_lc_variance(&cfg).unwrap();
                let dv = (summary.estimate - exact.variance_f64()).abs();
                if dv > 4.0 * summary.std_error {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "variance off at m={m}, p={num}/{den}, n={n}: {} vs {} (se {})",
                            summary.estimate,
                            exact.variance_f64(),
                            summary.std_error
                        ),
                    );
                }
                let mean_mc = summary.extras["mean_lc"];
                let mean_se = (summary.estimate / replicates as f64).sqrt();
                if (mean_mc - exact.mean_f64()).abs() > 4.0 * mean_se {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "mean off at m={m}, p={num}/{den}, n={n}: {mean_mc} vs {}",
                            exact.mean_f64()
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::pass(name, "tiny grid within 4 sigma of the oracle".into())
}

/// Chi-square uniformity of the stripped X-word conditional on its length
/// (the other route to the distribution identity).
pub fn check_strip_conditional_uniformity(master_seed: u64) -> CheckOutcome {
    let name = "strip_conditional_uniformity";
    let params = ModelParams::new(2, 1, 2).unwrap();
    let (n, k, samples) = (8usize, 3usize, 60_000u64);
    let kept = crate::map_replicates(samples, |r| {
        let x = sample_x_word(&params, n, SeedSpec::new(master_seed, r));
        let (stripped, _) = strip_extra_letter(&x, 2);
        if stripped.len() == k {
            let mut idx = 0usize;
            for &c in stripped.letters() {
                idx = idx * 2 + usize::from(c);
            }
            Some(idx)
        } else {
            None
        }
    });
    let mut counts = vec![0u64; 1 << k];
    let mut total = 0u64;
    for idx in kept.into_iter().flatten() {
        counts[idx] += 1;
        total += 1;
    }
    if total < 1000 {
        return CheckOutcome::fail(name, format!("only {total} conditioned samples"));
    }
    let res = chi_square_uniform(&counts);
    if res.p_value > 1e-3 {
        CheckOutcome::pass(
            name,
            format!(
                "chi2 = {:.3}, p = {:.4} over {total} samples",
                res.statistic, res.p_value
            ),
        )
    } else {
        CheckOutcome::fail(name, format!("chi2 = {:?}", res))
    }
}

/// Byte-identical estimator output across worker counts (needs rayon).
#[cfg(feature = "parallel")]
pub fn check_reproducibility_across_workers(master_seed: u64) -> CheckOutcome {
    let name = "reproducibility_across_workers";
    let params = ModelParams::new(2, 1, 2).unwrap();
    let cfg = ExperimentConfig::new(params, 50, 2_000, master_seed).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let summary = estimate_lc_variance(&cfg).unwrap();
            crate::report::summaries_to_csv(&[summary])
        })
    };
    let single = run(1);
    let eight = run(8);
    if single == eight {
        CheckOutcome::pass(
            name,
            "1-worker and 8-worker CSV outputs byte-identical".into(),
        )
    } else {
        CheckOutcome::fail(name, "outputs differ across worker counts".into())
    }
}

/// The quick tier: exactness and small-instance checks, <1 minute.
pub fn quick_suite(master_seed: u64) -> Vec<CheckOutcome> {
    #[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
    let mut out = vec![
        check_oracle_equivalence(3, 4),
        check_kernel_equivalence(1_000, 128, 4, master_seed),
        check_chain_law_exact(3, 4),
        check_ledger_invariants(10),
        check_mixture_identity(&ModelParams::new(2, 1, 2).unwrap(), 4),
        check_expected_l22(6),
        check_profile_sanity(
            &ModelParams::new(2, 1, 2).unwrap(),
            100,
            64,
            10,
            32,
            master_seed,
        ),
        check_minimality(5),
        check_efron_stein_exact(4),
    ];
    #[cfg(feature = "parallel")]
    out.push(check_reproducibility_across_workers(master_seed));
    out
}

/// The full tier: the quick tier plus Monte Carlo-scale statistics.
pub fn full_suite(master_seed: u64) -> Vec<CheckOutcome> {
    #[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
    let mut out = vec![
        check_oracle_equivalence(3, 6),
        check_kernel_equivalence(10_000, 512, 4, master_seed),
        check_chain_law_exact(3, 5),
        check_ledger_invariants(10),
        check_mixture_identity(&ModelParams::new(2, 1, 2).unwrap(), 4),
        check_expected_l22(10),
        check_profile_sanity(
            &ModelParams::new(2, 1, 2).unwrap(),
            1_000,
            200,
            50,
            64,
            master_seed,
        ),
        check_minimality(6),
        check_efron_stein_exact(4),
        check_mc_against_oracle(30_000, master_seed),
        check_strip_conditional_uniformity(master_seed),
    ];
    #[cfg(feature = "parallel")]
    out.push(check_reproducibility_across_workers(master_seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_known_values() {
        let a = Word::new(vec![0, 1, 0, 1]);
        let b = Word::new(vec![1, 0, 1, 0]);
        assert_eq!(lcs_brute_force(&a, &b), 3);
        assert_eq!(lcs_brute_force(&a, &a), 4);
        assert_eq!(lcs_brute_force(&Word::empty(), &a), 0);
    }

    #[test]
    fn maximal_pair_enumeration_small() {
        let a = Word::new(vec![0, 1]);
        let b = Word::new(vec![1, 0, 1]);
        let pairs = enumerate_maximal_pairs(&a, &b, 100).unwrap();
        // Only one maximal pair: pi=(1,2), eta=(2,3).
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].pi, vec![1, 2]);
        let min = minimal_pairs(&pairs);
        assert_eq!(min.len(), 1);
    }

    #[test]
    fn minimal_filter_drops_dominated() {
        let a = Word::new(vec![0]);
        let b = Word::new(vec![0, 0]);
        let pairs = enumerate_maximal_pairs(&a, &b, 100).unwrap();
        assert_eq!(pairs.len(), 2);
        let min = minimal_pairs(&pairs);
        assert_eq!(min.len(), 1);
        assert_eq!(min[0].eta, vec![1]);
    }

    #[test]
    fn quick_checks_pass() {
        // A fast subset; the full tiers run in tests/acceptance.rs and via
        // the CLI.
        assert!(check_oracle_equivalence(2, 3).passed);
        assert!(check_kernel_equivalence(100, 64, 3, 7).passed);
        assert!(check_chain_law_exact(2, 3).passed);
        assert!(check_ledger_invariants(4).passed);
        assert!(check_expected_l22(4).passed);
        assert!(check_minimality(4).passed);
    }
}
