//! The random insertion chain and its incremental LCS profile.
//!
//! The chain grows a word one letter at a time: the first two letters are
//! appended, and from length 3 on, letter `U_k` is inserted at position
//! `T_k`, uniform on `{2, ..., k-1}`. The length-k word of the chain is
//! distributed exactly like a uniform word over the shared alphabet, which
//! is what ties it to the stripped X-word conditioned on its length.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lcs::lcs_length_bitparallel;
use crate::rational::Rational;
use crate::stats::{chi_square_uniform, ChiSquare};
use crate::words::{ModelParams, SeedSpec, Word};
use crate::{Error, Result};

/// Row-cache profiles are kept for words up to this length; beyond it the
/// profile falls back to per-length recomputation with the bit-parallel
/// kernel (the cache would need O(n^2) memory).
const PROFILE_CACHE_MAX: usize = 2048;

/// The randomness of the chain: letters `U_1..U_n` and insertion positions
/// `T_3..T_n` with `T_k` uniform on `{2, ..., k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertionChain {
    #[serde(rename = "U")]
    u: Vec<u8>,
    #[serde(rename = "T")]
    t: Vec<usize>,
    m: usize,
}

impl InsertionChain {
    /// Builds a chain from explicit randomness. `t[i]` is `T_{i+3}` and
    /// must lie in `{2, ..., i+2}`.
    pub fn from_parts(m: usize, u: Vec<u8>, t: Vec<usize>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::OutOfRange("chain length must be >= 1".into()));
        }
        if t.len() != u.len().saturating_sub(2) {
            return Err(Error::OutOfRange(format!(
                "need {} insertion positions for {} letters, got {}",
                u.len().saturating_sub(2),
                u.len(),
                t.len()
            )));
        }
        for (i, &tk) in t.iter().enumerate() {
            let k = i + 3;
            if tk < 2 || tk > k - 1 {
                return Err(Error::OutOfRange(format!(
                    "T_{k} = {tk} outside {{2, ..., {}}}",
                    k - 1
                )));
            }
        }
        if u.iter().any(|&c| usize::from(c) >= m) {
            return Err(Error::OutOfRange("chain letter not below m".into()));
        }
        Ok(InsertionChain { u, t, m })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letters(&self) -> &[u8] {
        &self.u
    }

    pub fn positions(&self) -> &[usize] {
        &self.t
    }

    /// The word of length `k`, obtained by replaying insertions.
    pub fn materialize(&self, k: usize) -> Result<Word> {
        if k == 0 || k > self.n() {
            return Err(Error::OutOfRange(format!(
                "materialize: k = {k} outside 1..={}",
                self.n()
            )));
        }
        let mut z: Vec<u8> = Vec::with_capacity(k);
        z.push(self.u[0]);
        if k >= 2 {
            z.push(self.u[1]);
        }
        for j in 3..=k {
            z.insert(self.t[j - 3] - 1, self.u[j - 1]);
        }
        Ok(Word::new(z))
    }
}

/// Samples a chain of length `n`: all letters first, then all positions,
/// from a single stream.
pub fn build_chain(params: &ModelParams, n: usize, seed: SeedSpec) -> Result<InsertionChain> {
    if n == 0 {
        return Err(Error::OutOfRange("chain length must be >= 1".into()));
    }
    let mut rng = seed.rng();
    let m = params.m() as u64;
    let u: Vec<u8> = (0..n).map(|_| rng.random_range(0..m) as u8).collect();
    let t: Vec<usize> = (3..=n).map(|k| rng.random_range(2..=(k - 1))).collect();
    InsertionChain::from_parts(params.m(), u, t)
}

/// The sequence `L(0), L(1), ..., L(n)` of LCS lengths of the chain's
/// words against a fixed Y-word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcsProfile {
    values: Vec<u32>,
}

impl LcsProfile {
    /// `L(k)`; `k` may be `0..=n`.
    pub fn value(&self, k: usize) -> u32 {
        self.values[k]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// True iff non-decreasing with increments in {0, 1}.
    pub fn increments_are_unit(&self) -> bool {
        self.values
            .windows(2)
            .all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }
}

/// Computes the full profile of a chain against `y`.
///
/// Incremental scheme: DP rows (one per chain letter) are cached; an
/// insertion at position `t` invalidates rows from `t` on, so only those
/// are recomputed. Expected cost is about half of recomputing each length
/// from scratch, with O(n^2) cache memory; above [`PROFILE_CACHE_MAX`]
/// the profile is recomputed per length with the bit-parallel kernel.
pub fn lcs_profile(chain: &InsertionChain, y: &Word) -> LcsProfile {
    if chain.n() > PROFILE_CACHE_MAX {
        let mut values = Vec::with_capacity(chain.n() + 1);
        values.push(0);
        for k in 1..=chain.n() {
            let z = chain.materialize(k).expect("k in range");
            values.push(lcs_length_bitparallel(&z, y) as u32);
        }
        return LcsProfile { values };
    }

    let yl = y.letters();
    let cols = yl.len() + 1;
    let mut letters: Vec<u8> = Vec::with_capacity(chain.n());
    // rows[i] = DP row for the length-i prefix of the current word.
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(chain.n() + 1);
    rows.push(vec![0u32; cols]);

    let push_row = |rows: &mut Vec<Vec<u32>>, c: u8| {
        let prev = &rows[rows.len() - 1];
        let mut cur = vec![0u32; cols];
        for (j, &cy) in yl.iter().enumerate() {
            cur[j + 1] = if cy == c {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        rows.push(cur);
    };

    let mut values = Vec::with_capacity(chain.n() + 1);
    values.push(0);
    for k in 1..=chain.n() {
        let (pos0, c) = if k <= 2 {
            (k - 1, chain.u[k - 1])
        } else {
            (chain.t[k - 3] - 1, chain.u[k - 1])
        };
        letters.insert(pos0, c);
        rows.truncate(pos0 + 1);
        let tail: Vec<u8> = letters[pos0..k].to_vec();
        for letter in tail {
            push_row(&mut rows, letter);
        }
        values.push(rows[k][cols - 1]);
    }
    LcsProfile { values }
}

/// Report of the distribution check for the length-k chain word: exact
/// enumeration of all `(U, T)` outcomes (small k) plus a chi-square test of
/// sampled words against the uniform law on `m^k` strings.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionIdentityReport {
    pub m: usize,
    pub k: usize,
    pub cells: usize,
    /// Exact per-string probabilities all equal m^-k (None when k too
    /// large to enumerate).
    pub exact_uniform: Option<bool>,
    pub chi_square: ChiSquare,
    pub samples: u64,
}

/// Exact enumeration bound: (k-2)! * m^k outcomes.
const EXACT_ENUM_MAX_OUTCOMES: u128 = 10_000_000;

/// Enumerates every `(U_1..U_k, T_3..T_k)` outcome with its exact
/// probability and tallies the law of the length-k word. Returns whether
/// every string has probability exactly `m^-k`.
pub fn exact_chain_law_is_uniform(m: usize, k: usize) -> Result<bool> {
    let mut outcomes: u128 = (m as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::BudgetExceeded(format!("m^k overflows for m={m}, k={k}")))?;
    for j in 3..=k {
        outcomes = outcomes
            .checked_mul((j - 2) as u128)
            .ok_or_else(|| Error::BudgetExceeded("outcome count overflow".into()))?;
    }
    if outcomes > EXACT_ENUM_MAX_OUTCOMES {
        return Err(Error::BudgetExceeded(format!(
            "{outcomes} chain outcomes exceed the enumeration budget"
        )));
    }

    let cells = m.pow(k as u32);
    let mut law = vec![Rational::ZERO; cells];

    // Odometers over letters (base m) and positions (mixed radix).
    let mut u = vec![0u8; k];
    loop {
        let mut t: Vec<usize> = (3..=k).map(|_| 2).collect();
        loop {
            let chain = InsertionChain::from_parts(m, u.clone(), t.clone())?;
            let z = chain.materialize(k)?;
            let mut weight = Rational::new(1, (m as i128).pow(k as u32))?;
            for j in 3..=k {
                weight = weight.checked_mul(Rational::new(1, (j - 2) as i128)?)?;
            }
            let idx = word_index(&z, m);
            law[idx] = law[idx].checked_add(weight)?;

            // advance the position odometer: digit i has radix i + 1
            let mut done = true;
            for i in 0..t.len() {
                if t[i] < i + 2 {
                    t[i] += 1;
                    for prev in t.iter_mut().take(i) {
                        *prev = 2;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        // advance the letter odometer
        let mut done = true;
        for digit in u.iter_mut() {
            if usize::from(*digit) < m - 1 {
                *digit += 1;
                done = false;
                break;
            }
            *digit = 0;
        }
        if done {
            break;
        }
    }

    let target = Rational::new(1, (m as i128).pow(k as u32))?;
    Ok(law.iter().all(|p| *p == target))
}

fn word_index(w: &Word, m: usize) -> usize {
    w.letters()
        .iter()
        .fold(0usize, |acc, &c| acc * m + usize::from(c))
}

/// Tabulation limit for the chi-square part: m^k <= 10^6.
fn check_tabulation(m: usize, k: usize) -> Result<usize> {
    match (m as u128).checked_pow(k as u32) {
        Some(c) if c <= 1_000_000 => Ok(c as usize),
        _ => Err(Error::BudgetExceeded(format!(
            "m^k = {m}^{k} too large to tabulate"
        ))),
    }
}

/// Verifies that the length-k chain word is uniform over `m^k` strings:
/// exactly (by enumeration, when affordable) and empirically (chi-square
/// over `samples` freshly built chains).
pub fn verify_distribution_identity(
    params: &ModelParams,
    k: usize,
    samples: u64,
    seed: SeedSpec,
) -> Result<DistributionIdentityReport> {
    let m = params.m();
    let cells = check_tabulation(m, k)?;
    let exact_uniform = exact_chain_law_is_uniform(m, k).ok();

    let tallies = crate::map_replicates(samples, |r| {
        let chain = build_chain(
            params,
            k,
            SeedSpec::new(seed.master_seed, seed.stream_index.wrapping_add(r)),
        )
        .expect("k >= 1");
        let z = chain.materialize(k).expect("k in range");
        word_index(&z, m)
    });
    let mut counts = vec![0u64; cells];
    for idx in tallies {
        counts[idx] += 1;
    }
    let chi_square = chi_square_uniform(&counts);
    Ok(DistributionIdentityReport {
        m,
        k,
        cells,
        exact_uniform,
        chi_square,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params2() -> ModelParams {
        ModelParams::new(2, 1, 2).unwrap()
    }

    #[test]
    fn short_chains_have_no_positions() {
        let c = build_chain(&params2(), 2, SeedSpec::new(1, 0)).unwrap();
        assert!(c.positions().is_empty());
        let c = build_chain(&params2(), 3, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(c.positions(), &[2]); // T_3 is the constant 2
    }

    #[test]
    fn materialize_applies_insertions() {
        let c = InsertionChain::from_parts(2, vec![0, 1, 0], vec![2]).unwrap();
        assert_eq!(c.materialize(1).unwrap(), Word::new(vec![0]));
        assert_eq!(c.materialize(2).unwrap(), Word::new(vec![0, 1]));
        assert_eq!(c.materialize(3).unwrap(), Word::new(vec![0, 0, 1]));
        assert!(c.materialize(0).is_err());
        assert!(c.materialize(4).is_err());
    }

    #[test]
    fn deleting_inserted_position_recovers_previous_word() {
        let c = build_chain(&params2(), 24, SeedSpec::new(5, 3)).unwrap();
        for k in 3..=24usize {
            let prev = c.materialize(k - 1).unwrap();
            let cur = c.materialize(k).unwrap();
            let t = c.positions()[k - 3];
            let mut deleted = cur.letters().to_vec();
            deleted.remove(t - 1);
            assert_eq!(Word::new(deleted), prev, "k = {k}");
        }
    }

    #[test]
    fn t5_is_uniform_on_its_range() {
        // Chi-square over {2, 3, 4} at significance 1e-3.
        let params = params2();
        let reps = 100_000u64;
        let mut counts = [0u64; 3];
        for r in 0..reps {
            let c = build_chain(&params, 5, SeedSpec::new(77, r)).unwrap();
            counts[c.positions()[2] - 2] += 1;
        }
        let res = chi_square_uniform(&counts);
        assert!(res.p_value > 1e-3, "chi2 = {:?}", res);
    }

    #[test]
    fn profile_empty_y_is_zero() {
        let c = build_chain(&params2(), 8, SeedSpec::new(2, 0)).unwrap();
        let p = lcs_profile(&c, &Word::empty());
        assert!(p.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn profile_full_match_when_identical_letters() {
        let c = InsertionChain::from_parts(2, vec![0; 6], vec![2, 2, 2, 2]).unwrap();
        let y = Word::new(vec![0; 6]);
        let p = lcs_profile(&c, &y);
        for k in 0..=6 {
            assert_eq!(p.value(k), k as u32);
        }
    }

    #[test]
    fn profile_matches_per_length_recomputation() {
        use crate::lcs::lcs_length;
        use crate::words::sample_y_word;
        let params = params2();
        for r in 0..20 {
            let c = build_chain(&params, 8, SeedSpec::new(101, 2 * r)).unwrap();
            let y = sample_y_word(&params, 8, SeedSpec::new(101, 2 * r + 1));
            let p = lcs_profile(&c, &y);
            assert_eq!(p.value(0), 0);
            for k in 1..=8 {
                let z = c.materialize(k).unwrap();
                assert_eq!(p.value(k), lcs_length(&z, &y) as u32, "k = {k}");
            }
        }
    }

    #[test]
    fn profile_increments_are_unit() {
        use crate::words::sample_y_word;
        let params = params2();
        for r in 0..50 {
            let c = build_chain(&params, 40, SeedSpec::new(55, 2 * r)).unwrap();
            let y = sample_y_word(&params, 40, SeedSpec::new(55, 2 * r + 1));
            assert!(lcs_profile(&c, &y).increments_are_unit());
        }
    }

    #[test]
    fn exact_law_uniform_small_k() {
        // Two independent uniforms for k = 2; the T_3 average for k = 3.
        assert!(exact_chain_law_is_uniform(2, 2).unwrap());
        assert!(exact_chain_law_is_uniform(2, 3).unwrap());
        assert!(exact_chain_law_is_uniform(2, 4).unwrap());
        assert!(exact_chain_law_is_uniform(3, 2).unwrap());
        assert!(exact_chain_law_is_uniform(3, 3).unwrap());
    }

    #[test]
    fn distribution_identity_report() {
        let rep =
            verify_distribution_identity(&params2(), 3, 20_000, SeedSpec::new(500, 0)).unwrap();
        assert_eq!(rep.cells, 8);
        assert_eq!(rep.exact_uniform, Some(true));
        assert!(rep.chi_square.p_value > 1e-3);
    }

    #[test]
    fn tabulation_budget_enforced() {
        let params = params2();
        assert!(matches!(
            verify_distribution_identity(&params, 40, 10, SeedSpec::new(1, 0)),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
