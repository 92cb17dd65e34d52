use std::fmt;

use super::Gf2Error;

/// Binary vector stored as the sorted positions of its ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    support: Vec<usize>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            support: Vec::new(),
        }
    }

    /// Builds a vector from arbitrary one-positions. Positions are sorted; a
    /// repeated position is rejected rather than cancelled.
    pub fn from_support(len: usize, mut support: Vec<usize>) -> Result<Self, Gf2Error> {
        support.sort_unstable();
        for w in support.windows(2) {
            if w[0] == w[1] {
                return Err(Gf2Error::DuplicateIndex { index: w[0] });
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Gf2Error::IndexOutOfRange {
                    index: last,
                    bound: len,
                });
            }
        }
        Ok(BitVector { len, support })
    }

    pub(crate) fn from_sorted_unchecked(len: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(support.last().is_none_or(|&l| l < len));
        BitVector { len, support }
    }

    /// Any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let support = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(|(i, _)| i)
            .collect();
        BitVector {
            len: bits.len(),
            support,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let support = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect();
        BitVector {
            len: bits.len(),
            support,
        }
    }

    /// Parses a string of ASCII `0`/`1` characters. Whitespace is ignored.
    pub fn parse_ascii(text: &str) -> Result<Self, Gf2Error> {
        let mut bits = Vec::with_capacity(text.len());
        for (pos, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(0u8),
                '1' => bits.push(1u8),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Gf2Error::Parse {
                        line: 1,
                        message: format!("unexpected character {c:?} at position {}", pos + 1),
                    })
                }
            }
        }
        Ok(BitVector::from_bits(&bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.support.binary_search(&index).is_ok()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = vec![0u8; self.len];
        for &i in &self.support {
            bits[i] = 1;
        }
        bits
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector, Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        let (a, b) = (&self.support, &other.support);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(BitVector {
            len: self.len,
            support: out,
        })
    }

    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize, Gf2Error> {
        self.xor(other).map(|v| v.weight())
    }

    /// Concatenates `self` followed by `tail`.
    pub fn concat(&self, tail: &BitVector) -> BitVector {
        let mut support = self.support.clone();
        support.extend(tail.support.iter().map(|&i| i + self.len));
        BitVector {
            len: self.len + tail.len,
            support,
        }
    }

    /// Copy of the positions `start..end`, re-indexed from zero.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len, "slice out of range");
        let support = self
            .support
            .iter()
            .copied()
            .filter(|&i| i >= start && i < end)
            .map(|i| i - start)
            .collect();
        BitVector {
            len: end - start,
            support,
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut next = self.support.iter().peekable();
        for i in 0..self.len {
            if next.peek() == Some(&&i) {
                next.next();
                f.write_str("1")?;
            } else {
                f.write_str("0")?;
            }
        }
        Ok(())
    }
}
