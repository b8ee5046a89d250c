//! The letter model and reproducible word sampling.
//!
//! One word (`Y`) draws i.i.d. letters uniformly from the `m` shared
//! letters, coded `0..m`. The other (`X`) draws each shared letter with
//! probability `(1-p)/m` and the extra letter, coded `m`, with
//! probability `p`. Sampling is a pure function of `(params, n, seed)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Alphabet size `m` and bias `p`, with `p` carried both as an exact
/// fraction (for sampling thresholds and the enumeration oracle) and as a
/// double (for closed-form constants).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    m: usize,
    p_num: u64,
    p_den: u64,
}

impl ModelParams {
    /// Builds parameters with `p = p_num / p_den`. Requires `m >= 2` and
    /// `0 < p < 1`.
    pub fn new(m: usize, p_num: u64, p_den: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!(
                "alphabet size m must be >= 2, got {m}"
            )));
        }
        if m > usize::from(u8::MAX) {
            return Err(Error::InvalidParams(format!(
                "alphabet size m must fit a byte code, got {m}"
            )));
        }
        if p_den == 0 || p_num == 0 || p_num >= p_den {
            return Err(Error::InvalidParams(format!(
                "extra-letter probability must satisfy 0 < p < 1, got {p_num}/{p_den}"
            )));
        }
        let g = gcd(p_num, p_den);
        Ok(ModelParams {
            m,
            p_num: p_num / g,
            p_den: p_den / g,
        })
    }

    /// Parses a decimal probability string ("0.5", "1e-6", "0.25") into an
    /// exact fraction and validates as in [`ModelParams::new`].
    pub fn from_decimal(m: usize, p: &str) -> Result<Self> {
        let (num, den) = parse_probability(p)?;
        ModelParams::new(m, num, den)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The bias as a double (ratio of the exact fraction).
    pub fn p(&self) -> f64 {
        self.p_num as f64 / self.p_den as f64
    }

    /// The bias as an exact fraction `(num, den)` in lowest terms.
    pub fn p_rational(&self) -> (u64, u64) {
        (self.p_num, self.p_den)
    }

    /// Letter code of the extra letter.
    pub fn extra_code(&self) -> u8 {
        self.m as u8
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Parses a decimal literal (optional fraction, optional exponent) into an
/// exact `num/den` pair. This keeps denominators like 10^6 small instead of
/// going through the dyadic expansion of the nearest double.
pub fn parse_probability(s: &str) -> Result<(u64, u64)> {
    let bad = |msg: &str| Error::InvalidParams(format!("probability '{s}': {msg}"));
    let t = s.trim();
    let (mantissa, exp_str) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], Some(&t[i + 1..])),
        None => (t, None),
    };
    let exp: i32 = match exp_str {
        Some(e) => e.parse().map_err(|_| bad("bad exponent"))?,
        None => 0,
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    let digits: String = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad("non-digit characters"));
    }
    let num: u128 = digits.parse().map_err(|_| bad("mantissa too large"))?;
    // value = num * 10^(exp - frac_len)
    let shift = exp - frac_part.len() as i32;
    let (mut num, mut den): (u128, u128) = (num, 1);
    if shift >= 0 {
        num = num
            .checked_mul(
                10u128
                    .checked_pow(shift as u32)
                    .ok_or_else(|| bad("overflow"))?,
            )
            .ok_or_else(|| bad("overflow"))?;
    } else {
        den = 10u128
            .checked_pow((-shift) as u32)
            .ok_or_else(|| bad("overflow"))?;
    }
    let g = {
        let (mut a, mut b) = (num, den);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    };
    num /= g;
    den /= g;
    let num = u64::try_from(num).map_err(|_| bad("numerator too large"))?;
    let den = u64::try_from(den).map_err(|_| bad("denominator too large"))?;
    Ok((num, den))
}

/// A finite word over letter codes `{0, ..., m}`; code `m` is the extra
/// letter and never appears in a Y-word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn max_code(&self) -> Option<u8> {
        self.letters.iter().copied().max()
    }

    /// Compact text form: one base-36 digit per letter. Errors above code 35.
    pub fn to_text_line(&self) -> Result<String> {
        self.letters
            .iter()
            .map(|&c| {
                char::from_digit(u32::from(c), 36)
                    .ok_or_else(|| Error::OutOfRange(format!("letter code {c} exceeds base-36")))
            })
            .collect()
    }

    pub fn from_text_line(line: &str) -> Result<Self> {
        let letters = line
            .trim()
            .chars()
            .map(|ch| {
                ch.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::OutOfRange(format!("invalid base-36 digit '{ch}'")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Word { letters })
    }
}

impl std::ops::Index<usize> for Word {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.letters[i]
    }
}

/// Counter-based seeding: a master seed plus a stream index. Distinct
/// stream indices give independent ChaCha streams under the same master
/// seed, so replicate results do not depend on worker scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    /// Instantiates the generator for this (seed, stream) pair.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Samples an X-word of length `n`: each shared letter with probability
/// `(1-p)/m`, the extra letter (code `m`) with probability `p`.
///
/// Letters are drawn by inverse CDF over exact integer thresholds: with
/// `p = a/b`, a uniform draw `r` from `{0, ..., b*m - 1}` maps to the
/// extra letter when `r >= (b-a)*m` and to shared letter `r / (b-a)`
/// otherwise. No floating point enters the letter decision.
pub fn sample_x_word(params: &ModelParams, n: usize, seed: SeedSpec) -> Word {
    let mut rng = seed.rng();
    let (a, b) = params.p_rational();
    let m = params.m as u64;
    let shared_span = (b - a) * m;
    let total = b * m;
    let letters = (0..n)
        .map(|_| {
            let r = rng.random_range(0..total);
            if r < shared_span {
                (r / (b - a)) as u8
            } else {
                params.extra_code()
            }
        })
        .collect();
    Word { letters }
}

/// Samples a Y-word of length `n`: i.i.d. uniform over the `m` shared
/// letters; never emits the extra code.
pub fn sample_y_word(params: &ModelParams, n: usize, seed: SeedSpec) -> Word {
    let mut rng = seed.rng();
    let m = params.m as u64;
    let letters = (0..n).map(|_| rng.random_range(0..m) as u8).collect();
    Word { letters }
}

/// Removes every extra letter (code `m`) from `x`, preserving order.
/// Returns the stripped word and the number of removed letters.
pub fn strip_extra_letter(x: &Word, m: usize) -> (Word, usize) {
    let extra = m as u8;
    let kept: Vec<u8> = x.letters.iter().copied().filter(|&c| c != extra).collect();
    let removed = x.len() - kept.len();
    (Word { letters: kept }, removed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freq(word: &Word, code: u8) -> f64 {
        word.letters.iter().filter(|&&c| c == code).count() as f64 / word.len() as f64
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(1, 1, 2).is_err());
        assert!(ModelParams::new(2, 0, 2).is_err());
        assert!(ModelParams::new(2, 2, 2).is_err());
        assert!(ModelParams::new(2, 3, 2).is_err());
    }

    #[test]
    fn parse_probability_decimals() {
        assert_eq!(parse_probability("0.5").unwrap(), (1, 2));
        assert_eq!(parse_probability("0.25").unwrap(), (1, 4));
        assert_eq!(parse_probability("1e-6").unwrap(), (1, 1_000_000));
        assert_eq!(parse_probability("2.5e-1").unwrap(), (1, 4));
        assert!(parse_probability("abc").is_err());
    }

    #[test]
    fn zero_length_words() {
        let params = ModelParams::new(2, 1, 2).unwrap();
        assert!(sample_x_word(&params, 0, SeedSpec::new(1, 0)).is_empty());
        assert!(sample_y_word(&params, 0, SeedSpec::new(1, 0)).is_empty());
    }

    #[test]
    fn x_letter_frequencies_match_model() {
        // 3-sigma of a Binomial(1e5, 0.5) frequency is ~0.0047.
        let params = ModelParams::new(2, 1, 2).unwrap();
        let x = sample_x_word(&params, 100_000, SeedSpec::new(42, 0));
        let f2 = freq(&x, 2);
        assert!((0.49..=0.51).contains(&f2), "extra-letter freq {f2}");

        // (1-p)/m = 0.25 for m=3, p=0.25; 3-sigma ~ 0.0041.
        let params = ModelParams::new(3, 1, 4).unwrap();
        let x = sample_x_word(&params, 100_000, SeedSpec::new(42, 1));
        for code in 0..3u8 {
            let f = freq(&x, code);
            assert!((f - 0.25).abs() < 0.005, "code {code} freq {f}");
        }
    }

    #[test]
    fn y_letter_frequencies_match_model() {
        let params = ModelParams::new(2, 1, 2).unwrap();
        let y = sample_y_word(&params, 100_000, SeedSpec::new(7, 0));
        let f0 = freq(&y, 0);
        assert!((f0 - 0.5).abs() < 0.005, "freq {f0}");
        assert!(y.max_code().unwrap() <= 1);
    }

    #[test]
    fn strip_removes_extras() {
        let (stripped, n_removed) = strip_extra_letter(&Word::new(vec![0, 2, 1, 2]), 2);
        assert_eq!(stripped, Word::new(vec![0, 1]));
        assert_eq!(n_removed, 2);

        let w = Word::new(vec![0, 1, 1, 0]);
        let (same, zero) = strip_extra_letter(&w, 2);
        assert_eq!(same, w);
        assert_eq!(zero, 0);
    }

    #[test]
    fn strip_count_matches_binomial_moments() {
        // N ~ Binomial(100, 0.3): mean 30 (3-sigma of the estimate ~0.044,
        // spec allows 0.5) and variance 21 (3-sigma ~0.28).
        let params = ModelParams::new(2, 3, 10).unwrap();
        let reps = 100_000u64;
        let counts: Vec<f64> = (0..reps)
            .map(|r| {
                let x = sample_x_word(&params, 100, SeedSpec::new(9, r));
                strip_extra_letter(&x, 2).1 as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        assert!((mean - 30.0).abs() < 0.5, "mean N = {mean}");
        let variance =
            counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (reps - 1) as f64;
        assert!((variance - 21.0).abs() < 0.3, "Var N = {variance}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let params = ModelParams::new(3, 1, 4).unwrap();
        let a = sample_x_word(&params, 1000, SeedSpec::new(5, 17));
        let b = sample_x_word(&params, 1000, SeedSpec::new(5, 17));
        assert_eq!(a, b);
        let c = sample_x_word(&params, 1000, SeedSpec::new(5, 18));
        assert_ne!(a, c);
    }

    #[test]
    fn text_line_round_trip() {
        let w = Word::new(vec![0, 1, 35, 9]);
        let line = w.to_text_line().unwrap();
        assert_eq!(line, "01z9");
        assert_eq!(Word::from_text_line(&line).unwrap(), w);
        assert!(Word::new(vec![36]).to_text_line().is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = Word::new(vec![0, 2, 1]);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "[0,2,1]");
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }
}
