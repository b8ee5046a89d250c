//! Exact LCS lengths, canonical minimal matchings, match enumeration and
//! compartment decomposition.
//!
//! Two length kernels are provided: a two-row dynamic program
//! ([`lcs_length`]) and a bit-parallel kernel ([`lcs_length_bitparallel`])
//! that processes 64 DP columns per word operation. They compute the same
//! value on every input; the bit-parallel kernel is the fast path for
//! Monte Carlo work.

use serde::{Deserialize, Serialize};

use crate::words::Word;
use crate::{Error, Result};

/// LCS length by the classic dynamic program, keeping two rows.
pub fn lcs_length(a: &Word, b: &Word) -> usize {
    let (a, b) = (a.letters(), b.letters());
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; b.len() + 1];
    let mut cur = vec![0u32; b.len() + 1];
    for &ca in a {
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()] as usize
}

/// Bit-parallel LCS length.
///
/// Maintains a bit vector `L` over the positions of `a` in which set bits
/// mark DP row increments. For each letter `c` of `b`:
///
/// ```text
/// X = L | M[c]
/// L = X & !(X - ((L << 1) | 1))
/// ```
///
/// with the subtraction borrowing across 64-bit words. The answer is the
/// popcount of `L`.
pub fn lcs_length_bitparallel(a: &Word, b: &Word) -> usize {
    let (a, b) = (a.letters(), b.letters());
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let words = a.len().div_ceil(64);
    let n_codes = usize::from(a.iter().chain(b.iter()).copied().max().unwrap()) + 1;

    // Per-letter position masks over a.
    let mut masks = vec![0u64; n_codes * words];
    for (i, &c) in a.iter().enumerate() {
        masks[usize::from(c) * words + (i / 64)] |= 1u64 << (i % 64);
    }

    let mut l = vec![0u64; words];
    let mut x = vec![0u64; words];
    for &c in b {
        let mask = &masks[usize::from(c) * words..usize::from(c) * words + words];
        // X = L | M[c]
        for w in 0..words {
            x[w] = l[w] | mask[w];
        }
        // L = X & !(X - ((L << 1) | 1)), multiword
        let mut carry_in = 1u64; // the "| 1" bit of (L << 1) | 1
        let mut borrow = 0u64;
        for w in 0..words {
            let shifted = (l[w] << 1) | carry_in;
            carry_in = l[w] >> 63;
            let (d1, b1) = x[w].overflowing_sub(shifted);
            let (d2, b2) = d1.overflowing_sub(borrow);
            borrow = u64::from(b1) | u64::from(b2);
            l[w] = x[w] & !d2;
        }
    }
    // Bits beyond a.len() never get set: masks only cover real positions
    // and the update keeps L inside X.
    l.iter().map(|w| w.count_ones() as usize).sum()
}

/// A pair of strictly increasing index maps witnessing a common
/// subsequence. Indices are 1-based as in the match quadruples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingPair {
    pub pi: Vec<usize>,
    pub eta: Vec<usize>,
}

impl MatchingPair {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Checks structural validity against the underlying words.
    pub fn is_valid_for(&self, a: &Word, b: &Word) -> bool {
        self.pi.len() == self.eta.len()
            && self.pi.windows(2).all(|w| w[0] < w[1])
            && self.eta.windows(2).all(|w| w[0] < w[1])
            && self.pi.iter().zip(&self.eta).all(|(&i, &j)| {
                i >= 1 && j >= 1 && i <= a.len() && j <= b.len() && a[i - 1] == b[j - 1]
            })
    }

    /// Coordinatewise partial order: every pi and eta index <= the other's.
    pub fn le(&self, other: &MatchingPair) -> bool {
        self.len() == other.len()
            && self.pi.iter().zip(&other.pi).all(|(x, y)| x <= y)
            && self.eta.iter().zip(&other.eta).all(|(x, y)| x <= y)
    }
}

/// Suffix DP table: `table[i][j]` = LCS length of `a[i..]` and `b[j..]`.
pub(crate) fn suffix_lcs_table(a: &[u8], b: &[u8]) -> Vec<Vec<u32>> {
    let (la, lb) = (a.len(), b.len());
    let mut table = vec![vec![0u32; lb + 1]; la + 1];
    for i in (0..la).rev() {
        for j in (0..lb).rev() {
            table[i][j] = if a[i] == b[j] {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    table
}

/// Extracts the canonical minimal matching of maximal length: scanning
/// matches left to right, pick the smallest feasible eta index, then the
/// smallest feasible pi index. Any maximal pair coordinatewise below this
/// one equals it, so the result is a member of the minimal set.
pub fn extract_minimal_matching(a: &Word, b: &Word) -> MatchingPair {
    let (al, bl) = (a.letters(), b.letters());
    let suffix = suffix_lcs_table(al, bl);
    let total = suffix[0][0] as usize;

    // Positions of each letter in a, for smallest-pi lookup.
    let n_codes = usize::from(al.iter().copied().max().unwrap_or(0)) + 1;
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); n_codes];
    for (i, &c) in al.iter().enumerate() {
        positions[usize::from(c)].push(i);
    }

    // Smallest position of letter c in a at or after `from`.
    let first_at_or_after = |c: usize, from: usize| -> Option<usize> {
        let list = positions.get(c)?;
        let k = match list.binary_search(&from) {
            Ok(k) | Err(k) => k,
        };
        list.get(k).copied()
    };

    let mut pi = Vec::with_capacity(total);
    let mut eta = Vec::with_capacity(total);
    let (mut prev_i, mut prev_j) = (0usize, 0usize); // 0-based "next free" cursors
    for s in 0..total {
        let needed = (total - s - 1) as u32;
        let mut j = prev_j;
        loop {
            // Smallest i >= prev_i with a[i] == b[j]. The suffix table is
            // non-increasing in i, so if this candidate cannot complete the
            // remaining length, no larger i can either and j is infeasible.
            if let Some(i) = first_at_or_after(usize::from(bl[j]), prev_i) {
                if suffix[i + 1][j + 1] >= needed {
                    pi.push(i + 1);
                    eta.push(j + 1);
                    prev_i = i + 1;
                    prev_j = j + 1;
                    break;
                }
            }
            j += 1;
        }
    }
    MatchingPair { pi, eta }
}

/// A match quadruple of a matching pair, per definition: the segment
/// between consecutive matched positions. The quadruple for interior index
/// i is `(pi_i, pi_next, eta_i, eta_next)`; it is non-empty when at least
/// one Y position is skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub pi_i: usize,
    pub pi_next: usize,
    pub eta_i: usize,
    pub eta_next: usize,
}

impl Match {
    /// Non-empty iff `eta_i + 2 <= eta_next`.
    pub fn is_non_empty(&self) -> bool {
        self.eta_i + 2 <= self.eta_next
    }

    /// 1-based Y positions strictly between the matched endpoints.
    pub fn unmatched_positions(&self) -> impl Iterator<Item = usize> {
        self.eta_i + 1..self.eta_next
    }

    pub fn unmatched_count(&self) -> usize {
        self.eta_next - self.eta_i - 1
    }
}

/// The interior matches of a pair, in order. With pair length l there are
/// l-1 of them (none for l <= 1).
pub fn enumerate_matches(pair: &MatchingPair) -> Vec<Match> {
    let l = pair.len();
    if l < 2 {
        return Vec::new();
    }
    (0..l - 1)
        .map(|i| Match {
            pi_i: pair.pi[i],
            pi_next: pair.pi[i + 1],
            eta_i: pair.eta[i],
            eta_next: pair.eta[i + 1],
        })
        .collect()
}

/// Interior matches plus the two boundary quadruples built from the
/// sentinels `pi(0) = eta(0) = 0` and `pi(l+1) = a_len + 1`,
/// `eta(l+1) = b_len + 1`. Only the interior quadruples are matches
/// proper; the sentinels expose the segments before the first and after
/// the last matched position.
pub fn enumerate_matches_with_sentinels(
    pair: &MatchingPair,
    a_len: usize,
    b_len: usize,
) -> Vec<Match> {
    let l = pair.len();
    let mut pi = Vec::with_capacity(l + 2);
    let mut eta = Vec::with_capacity(l + 2);
    pi.push(0);
    eta.push(0);
    pi.extend_from_slice(&pair.pi);
    eta.extend_from_slice(&pair.eta);
    pi.push(a_len + 1);
    eta.push(b_len + 1);
    (0..l + 1)
        .map(|i| Match {
            pi_i: pi[i],
            pi_next: pi[i + 1],
            eta_i: eta[i],
            eta_next: eta[i + 1],
        })
        .collect()
}

/// Compartment decomposition of a Y-word: 1-based starts `j_1 < ... < j_d`.
///
/// Boundaries follow the defining recursion: `j_1 = 1` and `j_i` is the
/// smallest `s > j_{i-1}` such that `Y[j_{i-1}..=s]` contains `m` distinct
/// letters (capped at `n + 1`, ending the recursion). Compartment `i` is
/// `[j_i, j_{i+1} - 1]`; the final compartment may contain fewer than `m`
/// distinct letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompartmentDecomposition {
    pub boundaries: Vec<usize>,
    pub n: usize,
}

impl CompartmentDecomposition {
    pub fn count(&self) -> usize {
        self.boundaries.len()
    }

    /// 1-based inclusive ranges of the compartments.
    pub fn compartments(&self) -> Vec<(usize, usize)> {
        let d = self.boundaries.len();
        (0..d)
            .map(|i| {
                let start = self.boundaries[i];
                let end = if i + 1 < d {
                    self.boundaries[i + 1] - 1
                } else {
                    self.n
                };
                (start, end)
            })
            .collect()
    }

    /// Index (0-based) of the compartment containing 1-based position `pos`.
    pub fn compartment_of(&self, pos: usize) -> Option<usize> {
        if pos == 0 || pos > self.n {
            return None;
        }
        match self.boundaries.binary_search(&pos) {
            Ok(i) => Some(i),
            Err(i) => Some(i - 1),
        }
    }
}

/// Decomposes `y` into compartments. Rejects words containing the extra
/// letter (code `m` or larger).
pub fn decompose_compartments(y: &Word, m: usize) -> Result<CompartmentDecomposition> {
    if let Some(c) = y.max_code() {
        if usize::from(c) >= m {
            return Err(Error::OutOfRange(format!(
                "decompose_compartments: letter code {c} not below alphabet size {m}"
            )));
        }
    }
    let letters = y.letters();
    let n = letters.len();
    let mut boundaries = Vec::new();
    if n == 0 {
        return Ok(CompartmentDecomposition { boundaries, n });
    }
    boundaries.push(1);
    // Smallest s in [boundary + 1, n] such that Y[boundary..=s] contains
    // m distinct letters; None once the word runs out.
    let next_boundary = |boundary: usize| -> Option<usize> {
        let mut seen = vec![false; m];
        let mut distinct = 0usize;
        for s in boundary..=n {
            let c = usize::from(letters[s - 1]);
            if !seen[c] {
                seen[c] = true;
                distinct += 1;
            }
            if distinct == m && s > boundary {
                return Some(s);
            }
        }
        None
    };
    let mut boundary = 1usize; // 1-based
    while let Some(s) = next_boundary(boundary) {
        boundaries.push(s);
        boundary = s;
    }
    Ok(CompartmentDecomposition { boundaries, n })
}

/// Total number of letters contained in compartments of length >= `threshold`.
pub fn letters_in_long_compartments(decomp: &CompartmentDecomposition, threshold: usize) -> usize {
    decomp
        .compartments()
        .iter()
        .map(|&(s, e)| e - s + 1)
        .filter(|&len| len >= threshold)
        .sum()
}
