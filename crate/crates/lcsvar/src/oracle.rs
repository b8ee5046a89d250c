//! Brute-force ground truth at tiny sizes: exact laws, means and
//! variances by full enumeration with exact rational weights.
//!
//! Enumeration order is lexicographic and deterministic; parallel shards
//! merge integer tallies, so results are schedule-independent. Rational
//! weights enter only once per tally bucket.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lcs::lcs_length;
use crate::rational::Rational;
use crate::words::{ModelParams, Word};
use crate::{Error, Result};

/// Pair-count budget for full (X, Y) enumeration.
const PAIR_BUDGET: u128 = 100_000_000;
/// String-count budget for single-word tabulations.
const WORD_BUDGET: u128 = 1_000_000;

/// A finitely supported distribution on integers with exact rational
/// probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactDistribution {
    support: BTreeMap<u32, Rational>,
}

impl ExactDistribution {
    pub fn point_mass(v: u32) -> Self {
        let mut support = BTreeMap::new();
        support.insert(v, Rational::ONE);
        ExactDistribution { support }
    }

    fn from_weighted(entries: Vec<(u32, Rational)>) -> Result<Self> {
        let mut support: BTreeMap<u32, Rational> = BTreeMap::new();
        for (v, w) in entries {
            if w.is_zero() {
                continue;
            }
            let slot = support.entry(v).or_insert(Rational::ZERO);
            *slot = slot.checked_add(w)?;
        }
        support.retain(|_, w| !w.is_zero());
        Ok(ExactDistribution { support })
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, Rational)> + '_ {
        self.support.iter().map(|(&v, &p)| (v, p))
    }

    pub fn probability(&self, v: u32) -> Rational {
        self.support.get(&v).copied().unwrap_or(Rational::ZERO)
    }

    /// Exact total mass; a healthy distribution returns exactly 1.
    pub fn total_mass(&self) -> Result<Rational> {
        let mut acc = Rational::ZERO;
        for (_, p) in self.support() {
            acc = acc.checked_add(p)?;
        }
        Ok(acc)
    }

    pub fn mean(&self) -> Result<Rational> {
        let mut acc = Rational::ZERO;
        for (v, p) in self.support() {
            acc = acc.checked_add(p.checked_mul(Rational::from_integer(v as i128))?)?;
        }
        Ok(acc)
    }

    pub fn variance(&self) -> Result<Rational> {
        let mean = self.mean()?;
        let mut second = Rational::ZERO;
        for (v, p) in self.support() {
            let v2 = Rational::from_integer((v as i128) * (v as i128));
            second = second.checked_add(p.checked_mul(v2)?)?;
        }
        second.checked_sub(mean.checked_mul(mean)?)
    }

    pub fn mean_f64(&self) -> f64 {
        self.mean().map(Rational::to_f64).unwrap_or(f64::NAN)
    }

    pub fn variance_f64(&self) -> f64 {
        self.variance().map(Rational::to_f64).unwrap_or(f64::NAN)
    }

    /// Mixes `self` into an accumulator with weight `w`.
    fn scaled(&self, w: Rational) -> Result<Vec<(u32, Rational)>> {
        self.support()
            .map(|(v, p)| Ok((v, p.checked_mul(w)?)))
            .collect()
    }
}

fn decode_word(mut index: u128, radix: usize, len: usize) -> Word {
    let mut letters = vec![0u8; len];
    for slot in letters.iter_mut().rev() {
        *slot = (index % radix as u128) as u8;
        index /= radix as u128;
    }
    Word::new(letters)
}

fn count_extra(w: &Word, m: usize) -> usize {
    w.letters().iter().filter(|&&c| usize::from(c) == m).count()
}

/// Exact binomial(n, p) probability of `j` successes with `p` rational.
pub fn binomial_pmf(n: usize, j: usize, p_num: u64, p_den: u64) -> Result<Rational> {
    if j > n {
        return Ok(Rational::ZERO);
    }
    let mut coeff = Rational::ONE;
    // C(n, j) built multiplicatively to stay reduced.
    for i in 0..j {
        coeff = coeff
            .checked_mul(Rational::from_integer((n - i) as i128))?
            .checked_div(Rational::from_integer((i + 1) as i128))?;
    }
    let p = Rational::new(p_num as i128, p_den as i128)?;
    let q = Rational::ONE.checked_sub(p)?;
    coeff
        .checked_mul(p.checked_pow(j as u32)?)?
        .checked_mul(q.checked_pow((n - j) as u32)?)
}

/// Tallies LCS values over the full (X, Y) product, bucketed by the number
/// of extra letters in X. Integer work only; weights attach afterwards.
fn tally_lc(m: usize, n: usize) -> Result<Vec<Vec<u64>>> {
    let x_total = ((m + 1) as u128).pow(n as u32);
    let y_total = (m as u128).pow(n as u32);
    if x_total.saturating_mul(y_total) > PAIR_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "(m+1)^n * m^n = {} pairs at m = {m}, n = {n}",
            x_total.saturating_mul(y_total)
        )));
    }

    let shards = crate::map_replicates(x_total as u64, |xi| {
        let x = decode_word(xi as u128, m + 1, n);
        let e = count_extra(&x, m);
        let mut counts = vec![0u64; n + 1];
        for yi in 0..y_total {
            let y = decode_word(yi, m, n);
            counts[lcs_length(&x, &y)] += 1;
        }
        (e, counts)
    });

    let mut tally = vec![vec![0u64; n + 1]; n + 1];
    for (e, counts) in shards {
        for (lc, c) in counts.into_iter().enumerate() {
            tally[e][lc] += c;
        }
    }
    Ok(tally)
}

/// Exact law of the LCS length of a random (X, Y) pair of length `n`.
pub fn exact_lc_distribution(params: &ModelParams, n: usize) -> Result<ExactDistribution> {
    let m = params.m();
    if n == 0 {
        return Ok(ExactDistribution::point_mass(0));
    }
    let tally = tally_lc(m, n)?;
    let (a, b) = params.p_rational();
    let p = Rational::new(a as i128, b as i128)?;
    // (1 - p)/m per shared letter.
    let shared = Rational::new((b - a) as i128, (b as i128) * (m as i128))?;
    let y_weight = Rational::new(1, (m as i128).pow(n as u32))?;

    let mut entries = Vec::new();
    for (e, counts) in tally.iter().enumerate() {
        if counts.iter().all(|&c| c == 0) {
            continue;
        }
        let x_weight = p
            .checked_pow(e as u32)?
            .checked_mul(shared.checked_pow((n - e) as u32)?)?;
        let w = x_weight.checked_mul(y_weight)?;
        for (lc, &c) in counts.iter().enumerate() {
            if c > 0 {
                entries.push((lc as u32, w.checked_mul(Rational::from_integer(c as i128))?));
            }
        }
    }
    ExactDistribution::from_weighted(entries)
}

/// Exact law of the LCS of a uniform length-k word against the fixed `y`.
pub fn exact_profile_distribution(
    params: &ModelParams,
    y: &Word,
    k: usize,
) -> Result<ExactDistribution> {
    let m = params.m();
    if k == 0 {
        return Ok(ExactDistribution::point_mass(0));
    }
    let z_total = (m as u128).pow(k as u32);
    if z_total > WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "m^k = {z_total} strings at m = {m}, k = {k}"
        )));
    }
    let counts_shards = crate::map_replicates(z_total as u64, |zi| {
        let z = decode_word(zi as u128, m, k);
        lcs_length(&z, y)
    });
    let mut counts = vec![0u64; k + 1];
    for lc in counts_shards {
        counts[lc] += 1;
    }
    let w = Rational::new(1, z_total as i128)?;
    let entries = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(lc, &c)| Ok((lc as u32, w.checked_mul(Rational::from_integer(c as i128))?)))
        .collect::<Result<Vec<_>>>()?;
    ExactDistribution::from_weighted(entries)
}

/// Exact law of the LCS of a uniform length-k word against a uniform
/// length-n Y-word (both over the m shared letters).
pub fn exact_ln_k_distribution(m: usize, n: usize, k: usize) -> Result<ExactDistribution> {
    if k == 0 || n == 0 {
        return Ok(ExactDistribution::point_mass(0));
    }
    let z_total = (m as u128).pow(k as u32);
    let y_total = (m as u128).pow(n as u32);
    if z_total.saturating_mul(y_total) > PAIR_BUDGET || z_total > WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "m^k * m^n = {} pairs at m = {m}, n = {n}, k = {k}",
            z_total.saturating_mul(y_total)
        )));
    }
    let shards = crate::map_replicates(z_total as u64, |zi| {
        let z = decode_word(zi as u128, m, k);
        let mut counts = vec![0u64; k + 1];
        for yi in 0..y_total {
            let y = decode_word(yi, m, n);
            counts[lcs_length(&z, &y)] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; k + 1];
    for shard in shards {
        for (lc, c) in shard.into_iter().enumerate() {
            counts[lc] += c;
        }
    }
    let w = Rational::new(1, (z_total * y_total) as i128)?;
    let entries = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(lc, &c)| Ok((lc as u32, w.checked_mul(Rational::from_integer(c as i128))?)))
        .collect::<Result<Vec<_>>>()?;
    ExactDistribution::from_weighted(entries)
}

/// The conditional mixture `sum_k P(N = n - k) law(L_n(k))`, which must
/// reproduce the LC_n law exactly.
pub fn mixture_lc_distribution(params: &ModelParams, n: usize) -> Result<ExactDistribution> {
    let m = params.m();
    let (a, b) = params.p_rational();
    let mut entries = Vec::new();
    for k in 0..=n {
        let weight = binomial_pmf(n, n - k, a, b)?;
        if weight.is_zero() {
            continue;
        }
        let law = exact_ln_k_distribution(m, n, k)?;
        entries.extend(law.scaled(weight)?);
    }
    ExactDistribution::from_weighted(entries)
}

/// One row of the exact variance table.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceEntry {
    pub n: usize,
    pub variance: String,
    pub variance_f64: f64,
    pub mean_f64: f64,
    pub efron_stein_upper: f64,
}

/// Exact `Var LC_n` for `n = 1..=n_max`, with the Efron-Stein bound
/// alongside.
pub fn exact_variance_table(params: &ModelParams, n_max: usize) -> Result<Vec<VarianceEntry>> {
    (1..=n_max)
        .map(|n| {
            let dist = exact_lc_distribution(params, n)?;
            Ok(VarianceEntry {
                n,
                variance: dist.variance()?.to_string(),
                variance_f64: dist.variance_f64(),
                mean_f64: dist.mean_f64(),
                efron_stein_upper: crate::constants::efron_stein_upper(params, n),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params2() -> ModelParams {
        ModelParams::new(2, 1, 2).unwrap()
    }

    #[test]
    fn single_letter_law() {
        // P(LC_1 = 1) = P(X1 = Y1) = m * (1-p)/m * 1/m = (1-p)/m = 1/4.
        let dist = exact_lc_distribution(&params2(), 1).unwrap();
        assert_eq!(dist.probability(1), Rational::new(1, 4).unwrap());
        assert_eq!(dist.probability(0), Rational::new(3, 4).unwrap());
        assert_eq!(dist.total_mass().unwrap(), Rational::ONE);
        assert_eq!(dist.variance().unwrap(), Rational::new(3, 16).unwrap());
        assert!(dist.support().all(|(v, _)| v <= 1));
    }

    #[test]
    fn mass_sums_to_exactly_one() {
        for n in 1..=4 {
            let dist = exact_lc_distribution(&params2(), n).unwrap();
            assert_eq!(dist.total_mass().unwrap(), Rational::ONE, "n = {n}");
        }
    }

    #[test]
    fn small_p_recovers_uniform_two_letter_mean() {
        // E L_2(2) = 9/8 for two uniform binary words; with p = 1e-6 the
        // biased mean is within 1e-4 of it.
        let params = ModelParams::new(2, 1, 1_000_000).unwrap();
        let dist = exact_lc_distribution(&params, 2).unwrap();
        assert!((dist.mean_f64() - 1.125).abs() < 1e-4);
        // And the uniform enumeration itself is exactly 9/8.
        let uniform = exact_ln_k_distribution(2, 2, 2).unwrap();
        assert_eq!(uniform.mean().unwrap(), Rational::new(9, 8).unwrap());
    }

    #[test]
    fn profile_distribution_fixed_y() {
        // y = 00, k = 2: P(L=2) = 1/4 (z = 00), P(L=1) = 1/2, P(L=0) = 1/4.
        let y = Word::new(vec![0, 0]);
        let dist = exact_profile_distribution(&params2(), &y, 2).unwrap();
        assert_eq!(dist.probability(2), Rational::new(1, 4).unwrap());
        assert_eq!(dist.probability(1), Rational::new(1, 2).unwrap());
        assert_eq!(dist.probability(0), Rational::new(1, 4).unwrap());

        let zero = exact_profile_distribution(&params2(), &y, 0).unwrap();
        assert_eq!(zero.probability(0), Rational::ONE);
    }

    #[test]
    fn mixture_identity_small_n() {
        for n in 1..=4 {
            let direct = exact_lc_distribution(&params2(), n).unwrap();
            let mixed = mixture_lc_distribution(&params2(), n).unwrap();
            assert_eq!(direct, mixed, "n = {n}");
        }
    }

    #[test]
    fn variance_table_consistency() {
        let table = exact_variance_table(&params2(), 3).unwrap();
        let first = exact_lc_distribution(&params2(), 1).unwrap();
        assert!((table[0].variance_f64 - first.variance_f64()).abs() < 1e-15);
        for row in &table {
            assert!(row.variance_f64 > 0.0, "n = {}", row.n);
            assert!(
                row.variance_f64 <= row.efron_stein_upper,
                "n = {}: {} > {}",
                row.n,
                row.variance_f64,
                row.efron_stein_upper
            );
        }
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let mut acc = Rational::ZERO;
        for j in 0..=7 {
            acc = acc.checked_add(binomial_pmf(7, j, 1, 4).unwrap()).unwrap();
        }
        assert_eq!(acc, Rational::ONE);
        assert_eq!(
            binomial_pmf(2, 1, 1, 2).unwrap(),
            Rational::new(1, 2).unwrap()
        );
        assert_eq!(binomial_pmf(2, 5, 1, 2).unwrap(), Rational::ZERO);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            exact_lc_distribution(&params2(), 30),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
