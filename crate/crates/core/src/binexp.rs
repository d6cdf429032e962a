//! Binary-expansion combinatorics.
//!
//! [`BitString`] is a fixed-length big-endian expansion `(x_{k-1}, ..., x_0)`.
//! The sets of admissible patterns that index the nonzero coefficients of the
//! ideal generators are built from the family `Δ_k`: length-`k` strings read
//! from the most significant end as a sequence of the tokens `1` and `00`
//! (equivalently, every maximal run of zeros has even length). Its sizes follow
//! the Fibonacci numbers.

use std::fmt;

use thiserror::Error;

/// Longest supported bit string.
pub const MAX_BITS: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinExpError {
    #[error("{x} does not fit in {k} bits")]
    OutOfRange { x: u64, k: u32 },
    #[error("bit strings longer than {MAX_BITS} bits are not supported (got {0})")]
    TooLong(u32),
    #[error("length parameter must be at least 2 (got {0})")]
    LengthTooSmall(u32),
}

/// A length-`k` big-endian binary expansion.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u32,
    value: u64,
}

impl BitString {
    pub const EMPTY: BitString = BitString { len: 0, value: 0 };

    pub fn new(value: u64, len: u32) -> Result<Self, BinExpError> {
        if len > MAX_BITS {
            return Err(BinExpError::TooLong(len));
        }
        if value >> len != 0 {
            return Err(BinExpError::OutOfRange { x: value, k: len });
        }
        Ok(BitString { len, value })
    }

    /// Parses from a most-significant-first slice of 0/1 digits.
    pub fn from_bits(bits: &[u8]) -> Result<Self, BinExpError> {
        let len = u32::try_from(bits.len()).map_err(|_| BinExpError::TooLong(u32::MAX))?;
        if len > MAX_BITS {
            return Err(BinExpError::TooLong(len));
        }
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1));
        Ok(BitString { len, value })
    }

    pub fn ones(len: u32) -> Self {
        BitString { len, value: low_mask(len) }
    }

    pub fn zeros(len: u32) -> Self {
        BitString { len, value: 0 }
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// `Σ x_i 2^i`.
    pub fn value(self) -> u64 {
        self.value
    }

    /// Digit `x_i` (position 0 is least significant).
    pub fn bit(self, i: u32) -> u8 {
        ((self.value >> i) & 1) as u8
    }

    /// Digits most significant first.
    pub fn bits(self) -> Vec<u8> {
        (0..self.len).rev().map(|i| self.bit(i)).collect()
    }

    pub fn complement(self) -> Self {
        BitString { len: self.len, value: !self.value & low_mask(self.len) }
    }

    pub fn is_all_ones(self) -> bool {
        self.value == low_mask(self.len)
    }

    /// `self` followed by `low` (so `low` supplies the least significant digits).
    pub fn concat(self, low: BitString) -> Result<Self, BinExpError> {
        let len = self.len + low.len;
        if len > MAX_BITS {
            return Err(BinExpError::TooLong(len));
        }
        Ok(BitString { len, value: (self.value << low.len) | low.value })
    }

    /// Splits into the top `len - low_len` digits and the bottom `low_len` digits.
    pub fn split(self, low_len: u32) -> (BitString, BitString) {
        assert!(low_len <= self.len, "split point beyond string length");
        (
            BitString { len: self.len - low_len, value: self.value >> low_len },
            BitString { len: low_len, value: self.value & low_mask(low_len) },
        )
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, b) in self.bits().into_iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

fn low_mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// `ε_k(x)`: the `k`-digit expansion of `x`.
pub fn bits(x: u64, k: u32) -> Result<BitString, BinExpError> {
    BitString::new(x, k)
}

/// `C(n, k) mod 2` by Lucas: odd iff the binary support of `k` lies inside
/// that of `n`. Zero when `k > n`.
pub fn binom_parity(n: u64, k: u64) -> u8 {
    u8::from(k & !n == 0)
}

/// Membership in `Δ_k`, read from the most significant digit: consume a `1`,
/// or a `00` pair, until the string is exhausted.
pub fn delta_member(v: BitString) -> bool {
    let mut rest = v.len;
    while rest > 0 {
        if v.bit(rest - 1) == 1 {
            rest -= 1;
        } else if rest >= 2 && v.bit(rest - 2) == 0 {
            rest -= 2;
        } else {
            return false;
        }
    }
    true
}

/// All members of `Δ_k`, sorted ascending by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSet {
    pub k: u32,
    pub members: Vec<BitString>,
}

impl DeltaSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: BitString) -> bool {
        v.len == self.k && self.members.binary_search(&v).is_ok()
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|b| b.value)
    }
}

/// Enumerates `Δ_k` via `Δ_k = 1·Δ_{k-1} ⊔ 00·Δ_{k-2}`.
pub fn delta_enumerate(k: u32) -> Result<DeltaSet, BinExpError> {
    if k > MAX_BITS {
        return Err(BinExpError::TooLong(k));
    }
    // values only; level j holds Δ_j
    let mut prev: Vec<u64> = Vec::new(); // Δ_{j-2}
    let mut cur: Vec<u64> = vec![0]; // Δ_0 = {()}
    for j in 1..=k {
        let top = 1u64 << (j - 1);
        // 00-prefixed members are all below 2^{j-2}, the 1-prefixed ones above
        let mut next: Vec<u64> = prev.clone();
        next.extend(cur.iter().map(|&v| top | v));
        prev = cur;
        cur = next;
    }
    Ok(DeltaSet {
        k,
        members: cur.into_iter().map(|value| BitString { len: k, value }).collect(),
    })
}

/// `2^{k+1} - 4`.
pub fn n_of(k: u32) -> u64 {
    (1u64 << (k + 1)) - 4
}

/// True when no `0` digit at position `j < k - 1` is followed (one place up)
/// by another `0`.
fn zeros_are_isolated(s: u64, k: u32) -> bool {
    (0..k.saturating_sub(1)).all(|j| (s >> j) & 1 == 1 || (s >> (j + 1)) & 1 == 1)
}

fn check_len(k: u32) -> Result<(), BinExpError> {
    if k < 2 {
        Err(BinExpError::LengthTooSmall(k))
    } else if k + 1 > MAX_BITS {
        Err(BinExpError::TooLong(k))
    } else {
        Ok(())
    }
}

/// Integers `s` with `(n(k)+2)/3 <= s <= (n(k)+2)/2` whose `k`-digit
/// expansion has no two adjacent zeros. Sorted ascending.
pub fn s_set(k: u32) -> Result<Vec<u64>, BinExpError> {
    check_len(k)?;
    let r = n_of(k) + 2;
    let out: Vec<u64> =
        (r.div_ceil(3)..=r / 2).filter(|&s| zeros_are_isolated(s, k)).collect();
    debug_assert!(out.iter().all(|&s| (s >> (k - 1)) & 1 == 1 && s >> k == 0));
    Ok(out)
}

/// As [`s_set`] over `(n(k)+3)/3 <= s <= (n(k)+3)/2`, additionally requiring
/// the lowest digit to be 1.
pub fn s_prime_set(k: u32) -> Result<Vec<u64>, BinExpError> {
    check_len(k)?;
    let r = n_of(k) + 3;
    let out: Vec<u64> = (r.div_ceil(3)..=r / 2)
        .filter(|&s| s & 1 == 1 && zeros_are_isolated(s, k))
        .collect();
    debug_assert!(out.iter().all(|&s| (s >> (k - 1)) & 1 == 1 && s >> k == 0));
    Ok(out)
}

/// `{3s - (n(k)+2) | s ∈ s_set(k)}`: the `w2` exponents of the degree
/// `n(k)+2` generator.
pub fn p_set(k: u32) -> Result<Vec<u64>, BinExpError> {
    let shift = n_of(k) + 2;
    Ok(s_set(k)?.into_iter().map(|s| 3 * s - shift).collect())
}

/// `{3s - (n(k)+3) | s ∈ s_prime_set(k)}`: the `w2` exponents of the degree
/// `n(k)+3` generator.
pub fn p_prime_set(k: u32) -> Result<Vec<u64>, BinExpError> {
    let shift = n_of(k) + 3;
    Ok(s_prime_set(k)?.into_iter().map(|s| 3 * s - shift).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(bits: &[u8]) -> BitString {
        BitString::from_bits(bits).unwrap()
    }

    /// Pascal's triangle mod 2, rows `0..size`.
    fn pascal_parity(size: usize) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(size);
        for n in 0..size {
            let mut row = vec![1u8; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] ^ rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    }

    /// Run-length reading of `Δ_k` with missing high digits treated as
    /// violating the condition: scanning up from `p_{-1} = 1`, every run of
    /// zeros directly above a one must have even length.
    fn delta_by_runs(v: BitString) -> bool {
        let mut i = 0;
        while i < v.len() {
            if v.bit(i) == 1 {
                i += 1;
                continue;
            }
            let start = i;
            while i < v.len() && v.bit(i) == 0 {
                i += 1;
            }
            if (i - start) % 2 == 1 {
                return false;
            }
        }
        true
    }

    #[test]
    fn bits_examples() {
        assert_eq!(bits(7, 3).unwrap().bits(), vec![1, 1, 1]);
        assert_eq!(bits(0, 3).unwrap().bits(), vec![0, 0, 0]);
        assert_eq!(bits(6, 3).unwrap().bits(), vec![1, 1, 0]);
        assert_eq!(bits(8, 3), Err(BinExpError::OutOfRange { x: 8, k: 3 }));
        for k in 0..12 {
            assert!(bits((1 << k) - 1, k).unwrap().is_all_ones());
        }
    }

    #[test]
    fn bit_string_invariants() {
        for k in 0..=10u32 {
            for x in 0..(1u64 << k) {
                let v = bits(x, k).unwrap();
                let rebuilt = v.bits().iter().fold(0u64, |a, &b| 2 * a + u64::from(b));
                assert_eq!(rebuilt, x);
                assert_eq!(bits((1 << k) - 1 - x, k).unwrap(), v.complement());
            }
        }
    }

    #[test]
    fn binom_parity_examples() {
        for n in 0..20 {
            assert_eq!(binom_parity(n, 0), 1);
        }
        assert_eq!(binom_parity(4, 2), 0);
        assert_eq!(binom_parity(3, 2), 1);
        assert_eq!(binom_parity(2, 5), 0);
    }

    #[test]
    fn binom_parity_matches_pascal() {
        let rows = pascal_parity(512);
        for (n, row) in rows.iter().enumerate() {
            for (k, &b) in row.iter().enumerate() {
                assert_eq!(binom_parity(n as u64, k as u64), b, "C({n},{k})");
            }
        }
    }

    #[test]
    fn delta_member_examples() {
        assert!(delta_member(bs(&[1, 1])));
        assert!(delta_member(bs(&[0, 0])));
        assert!(!delta_member(bs(&[1, 0])));
        assert!(!delta_member(bs(&[0, 1])));
        assert!(delta_member(BitString::EMPTY));
        assert!(!delta_member(bs(&[0])));
        for k in 0..20 {
            assert!(delta_member(BitString::ones(k)));
        }
    }

    #[test]
    fn delta_enumerate_examples() {
        assert_eq!(delta_enumerate(2).unwrap().members, vec![bs(&[0, 0]), bs(&[1, 1])]);
        let sizes: Vec<usize> = (0..=6).map(|k| delta_enumerate(k).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(delta_enumerate(0).unwrap().members, vec![BitString::EMPTY]);
    }

    #[test]
    fn delta_fibonacci_growth() {
        for k in 2..=20 {
            let n = |j| delta_enumerate(j).unwrap().len();
            assert_eq!(n(k), n(k - 1) + n(k - 2));
        }
    }

    #[test]
    fn delta_enumeration_agrees_with_membership_and_runs() {
        for k in 0..=14 {
            let set = delta_enumerate(k).unwrap();
            assert!(set.members.windows(2).all(|w| w[0] < w[1]));
            for x in 0..(1u64 << k) {
                let v = bits(x, k).unwrap();
                assert_eq!(set.contains(v), delta_member(v), "{v}");
                assert_eq!(delta_by_runs(v), delta_member(v), "{v}");
            }
        }
    }

    #[test]
    fn delta_closure_properties() {
        for k in 0..=14 {
            for v in delta_enumerate(k).unwrap().members {
                assert!(delta_member(BitString::ones(1).concat(v).unwrap()));
                assert!(delta_member(v.concat(BitString::ones(1)).unwrap()));
            }
        }
    }

    #[test]
    fn delta_split_is_a_partition() {
        for k in 2..=14 {
            let whole = delta_enumerate(k).unwrap().members;
            let mut parts: Vec<BitString> = delta_enumerate(k - 1)
                .unwrap()
                .members
                .into_iter()
                .map(|v| BitString::ones(1).concat(v).unwrap())
                .collect();
            let with_ones = parts.len();
            parts.extend(
                delta_enumerate(k - 2)
                    .unwrap()
                    .members
                    .into_iter()
                    .map(|v| BitString::zeros(2).concat(v).unwrap()),
            );
            parts.sort();
            parts.dedup();
            assert_eq!(parts.len(), with_ones + delta_enumerate(k - 2).unwrap().len());
            assert_eq!(parts, whole);
        }
    }

    #[test]
    fn s_and_p_set_examples() {
        assert_eq!(s_set(2).unwrap(), vec![2, 3]);
        assert_eq!(s_prime_set(2).unwrap(), vec![3]);
        assert_eq!(p_set(2).unwrap(), vec![0, 3]);
        assert_eq!(p_prime_set(2).unwrap(), vec![2]);
        assert_eq!(s_set(1), Err(BinExpError::LengthTooSmall(1)));
        for k in 2..=12 {
            assert!(s_set(k).unwrap().iter().all(|s| (s >> (k - 1)) & 1 == 1));
        }
    }

    #[test]
    fn s_sets_index_odd_coefficients() {
        for m in 2..=10u32 {
            let n = n_of(m);
            let r = n + 2;
            let odd: Vec<u64> =
                (r.div_ceil(3)..=r / 2).filter(|&s| binom_parity(s, 3 * s - r) == 1).collect();
            assert_eq!(odd, s_set(m).unwrap(), "m = {m}");
            let r = n + 3;
            let odd: Vec<u64> =
                (r.div_ceil(3)..=r / 2).filter(|&s| binom_parity(s, 3 * s - r) == 1).collect();
            assert_eq!(odd, s_prime_set(m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn p_sets_are_delta_patterns() {
        for m in 2..=10u32 {
            let from_delta: Vec<u64> = delta_enumerate(m).unwrap().values().collect();
            assert_eq!(p_set(m).unwrap(), from_delta, "m = {m}");
            let mut shifted: Vec<u64> =
                delta_enumerate(m - 1).unwrap().values().map(|v| v << 1).collect();
            shifted.sort();
            assert_eq!(p_prime_set(m).unwrap(), shifted, "m = {m}");
        }
    }

    #[test]
    fn doubling_maps_s_onto_s_prime() {
        for m in 3..=10u32 {
            let image: Vec<u64> = s_set(m - 1).unwrap().into_iter().map(|s| 2 * s + 1).collect();
            assert_eq!(image, s_prime_set(m).unwrap(), "m = {m}");
        }
    }
}
