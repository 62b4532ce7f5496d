//! Fixed-length vectors over F_2.
//!
//! Bits are addressed 1-based: bit `i` of a vector of length `n` is valid for
//! `1 <= i <= n`. Internally bit `i` lives at machine bit position `i`, so the
//! raw word *is* the order key `sum v(i) * 2^i`.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported vector length. Keeps `order_key` inside a `u64`.
pub const MAX_LEN: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitVecError {
    #[error("vector length {0} is outside 1..={MAX_LEN}")]
    BadLength(usize),
    #[error("bit range {start}..={end} is invalid for a vector of length {len}")]
    Range {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    BadChar(char),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// An element of F_2^n, `1 <= n <= 62`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: u8,
    word: u64,
}

impl BitVec {
    pub fn zeros(len: usize) -> Result<Self, BitVecError> {
        if len == 0 || len > MAX_LEN {
            return Err(BitVecError::BadLength(len));
        }
        Ok(BitVec {
            len: len as u8,
            word: 0,
        })
    }

    /// All-ones vector `e`.
    pub fn ones(len: usize) -> Result<Self, BitVecError> {
        let z = Self::zeros(len)?;
        Ok(BitVec {
            word: mask(len),
            ..z
        })
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Result<Self, BitVecError> {
        let z = Self::zeros(len)?;
        if i == 0 || i > len {
            return Err(BitVecError::Range {
                start: i,
                end: i,
                len,
            });
        }
        Ok(BitVec { word: 1 << i, ..z })
    }

    /// Builds a vector from bits listed in order `v(1), v(2), ...`.
    pub fn from_bits(bits: &[bool]) -> Result<Self, BitVecError> {
        let mut v = Self::zeros(bits.len())?;
        for (idx, &b) in bits.iter().enumerate() {
            if b {
                v.word |= 1 << (idx + 1);
            }
        }
        Ok(v)
    }

    /// Rebuilds a vector from its order key. Bits above `len` and bit 0 must be clear.
    pub fn from_order_key(len: usize, key: u64) -> Result<Self, BitVecError> {
        let z = Self::zeros(len)?;
        if key & !mask(len) != 0 {
            return Err(BitVecError::Range {
                start: 1,
                end: 63,
                len,
            });
        }
        Ok(BitVec { word: key, ..z })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bit `i`, 1-based. Panics when `i` is out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i >= 1 && i <= self.len(),
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.word >> i) & 1 == 1
    }

    /// Returns a copy with bit `i` set to `value`.
    pub fn with(self, i: usize, value: bool) -> Self {
        assert!(i >= 1 && i <= self.len(), "bit index {i} out of range");
        let word = if value {
            self.word | (1 << i)
        } else {
            self.word & !(1 << i)
        };
        BitVec { word, ..self }
    }

    /// Returns a copy with bit `i` flipped, i.e. `self ⊕ e_i`.
    pub fn flip(self, i: usize) -> Self {
        assert!(i >= 1 && i <= self.len(), "bit index {i} out of range");
        BitVec {
            word: self.word ^ (1 << i),
            ..self
        }
    }

    /// `self ⊕ e`.
    pub fn complement(self) -> Self {
        BitVec {
            word: self.word ^ mask(self.len()),
            ..self
        }
    }

    pub fn weight(&self) -> usize {
        self.word.count_ones() as usize
    }

    /// Number of ones among bits `start..=end`.
    pub fn partial_weight(&self, start: usize, end: usize) -> Result<usize, BitVecError> {
        if start == 0 || start > end || end > self.len() {
            return Err(BitVecError::Range {
                start,
                end,
                len: self.len(),
            });
        }
        let window = mask(end) & !mask(start - 1);
        Ok((self.word & window).count_ones() as usize)
    }

    /// `sum v(i) * 2^i`; strictly monotone in the vector's total order.
    pub fn order_key(&self) -> u64 {
        self.word
    }

    pub fn xor(self, other: BitVec) -> Result<BitVec, BitVecError> {
        if self.len != other.len {
            return Err(BitVecError::LengthMismatch(self.len(), other.len()));
        }
        Ok(BitVec {
            word: self.word ^ other.word,
            ..self
        })
    }

    /// Indices `i` (1-based, ascending) with `v(i) = 1`.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.len()).filter(move |&i| self.get(i))
    }

    /// Every vector of length `len` and weight `weight`, ascending by order key.
    pub fn all_of_weight(len: usize, weight: usize) -> Result<Vec<BitVec>, BitVecError> {
        let z = Self::zeros(len)?;
        if weight > len {
            return Ok(Vec::new());
        }
        // Gosper's hack over the raw `len`-bit pattern, shifted into place.
        let mut out = Vec::new();
        if weight == 0 {
            out.push(z);
            return Ok(out);
        }
        let limit: u64 = 1 << len;
        let mut x: u64 = (1 << weight) - 1;
        while x < limit {
            out.push(BitVec { word: x << 1, ..z });
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        Ok(out)
    }
}

fn mask(len: usize) -> u64 {
    // bits 1..=len
    ((1u64 << len) - 1) << 1
}

impl BitXor for BitVec {
    type Output = BitVec;

    /// Panics on a length mismatch; use [`BitVec::xor`] for the fallible form.
    fn bitxor(self, rhs: BitVec) -> BitVec {
        self.xor(rhs)
            .expect("xor of vectors with different lengths")
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by length, then by order key.
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len, self.word).cmp(&(other.len, other.word))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = BitVecError;

    /// Parses the text form, bit 1 leftmost: `"1101"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitVecError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        BitVec::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn partial_weight_examples() {
        assert_eq!(bv("1110").partial_weight(2, 4).unwrap(), 2);
        assert_eq!(bv("1111").partial_weight(1, 4).unwrap(), 4);
        assert_eq!(bv("0111").partial_weight(3, 4).unwrap(), 2);
    }

    #[test]
    fn partial_weight_matches_bit_sum() {
        let v = bv("0111");
        let by_hand: usize = (3..=4).map(|i| v.get(i) as usize).sum();
        assert_eq!(v.partial_weight(3, 4).unwrap(), by_hand);
    }

    #[test]
    fn partial_weight_range_errors() {
        let v = bv("1010");
        assert!(v.partial_weight(0, 2).is_err());
        assert!(v.partial_weight(3, 2).is_err());
        assert!(v.partial_weight(1, 5).is_err());
    }

    #[test]
    fn order_key_examples() {
        assert_eq!(bv("1100").order_key(), 6);
        assert_eq!(bv("0000").order_key(), 0);
        assert_eq!(bv("0110").order_key(), 12);
    }

    #[test]
    fn unit_and_ones() {
        assert_eq!(BitVec::unit(4, 2).unwrap(), bv("0100"));
        assert_eq!(BitVec::ones(3).unwrap(), bv("111"));
        assert!(BitVec::unit(4, 5).is_err());
        assert!(BitVec::zeros(0).is_err());
        assert!(BitVec::zeros(63).is_err());
        assert_eq!(bv("1010").complement(), bv("0101"));
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(bv("1101").to_string(), "1101");
        assert!("10x1".parse::<BitVec>().is_err());
        assert!("".parse::<BitVec>().is_err());
    }

    #[test]
    fn xor_rejects_length_mismatch() {
        assert!(bv("10").xor(bv("100")).is_err());
    }

    #[test]
    fn order_key_injective_up_to_length_12() {
        for len in 1..=12 {
            let mut seen = std::collections::HashSet::new();
            for raw in 0u64..(1 << len) {
                let bits: Vec<bool> = (0..len).map(|b| raw >> b & 1 == 1).collect();
                let v = BitVec::from_bits(&bits).unwrap();
                assert!(seen.insert(v.order_key()));
            }
            assert_eq!(seen.len(), 1 << len);
        }
    }

    #[test]
    fn all_of_weight_sorted_and_complete() {
        let vs = BitVec::all_of_weight(4, 3).unwrap();
        let text: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        assert_eq!(text, ["1110", "1101", "1011", "0111"]);
        for len in 1..=10 {
            for w in 0..=len {
                let vs = BitVec::all_of_weight(len, w).unwrap();
                assert_eq!(vs.len() as u64, num_integer::binomial(len as u64, w as u64));
                assert!(vs.windows(2).all(|p| p[0].order_key() < p[1].order_key()));
                assert!(vs.iter().all(|v| v.weight() == w));
            }
        }
    }

    fn arb_pair() -> impl Strategy<Value = (BitVec, BitVec, BitVec)> {
        (1usize..=20).prop_flat_map(|len| {
            let v = proptest::collection::vec(any::<bool>(), len);
            (v.clone(), v.clone(), v).prop_map(|(a, b, c)| {
                (
                    BitVec::from_bits(&a).unwrap(),
                    BitVec::from_bits(&b).unwrap(),
                    BitVec::from_bits(&c).unwrap(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn xor_group_laws((a, b, c) in arb_pair()) {
            prop_assert_eq!((a ^ b) ^ c, a ^ (b ^ c));
            prop_assert_eq!(a ^ b, b ^ a);
            prop_assert_eq!((a ^ a).weight(), 0);
            prop_assert_eq!((a ^ b).weight() % 2, (a.weight() + b.weight()) % 2);
            prop_assert_eq!(a.partial_weight(1, a.len()).unwrap(), a.weight());
        }
    }
}
