//! Bit vectors and the Kronecker-power transform they are encoded with.

use crate::error::{Error, Result};

/// A vector of bits (each element 0 or 1).
///
/// Used for information vectors (length K), u-domain vectors and codewords
/// (length N or sqrt(N)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    /// Builds a bit block, rejecting any element outside {0, 1}.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "bit value {b} outside {{0,1}}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(BitBlock(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a ^ b)
                .collect(),
        ))
    }
}

impl std::ops::Deref for BitBlock {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for BitBlock {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Applies v * F^{(x)m} over GF(2) in place, where F = [[1,0],[1,1]] and
/// 2^m is the vector length. The transform is its own inverse.
pub fn kronecker_transform_in_place(v: &mut [u8]) -> Result<()> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { got: n });
    }
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                v[j] ^= v[j + h];
            }
            i += 2 * h;
        }
        h *= 2;
    }
    Ok(())
}

/// Returns v * F^{(x)m} over GF(2). Involution: applying it twice gives v back.
pub fn kronecker_transform(v: &BitBlock) -> Result<BitBlock> {
    let mut out = v.bits().to_vec();
    kronecker_transform_in_place(&mut out)?;
    Ok(BitBlock(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(bits: &[u8]) -> BitBlock {
        BitBlock::from_bits(bits.to_vec()).unwrap()
    }

    #[test]
    fn transform_length_two() {
        assert_eq!(kronecker_transform(&bb(&[1, 0])).unwrap().bits(), &[1, 0]);
        assert_eq!(kronecker_transform(&bb(&[0, 1])).unwrap().bits(), &[1, 1]);
    }

    #[test]
    fn transform_all_zero() {
        for m in 0..6 {
            let z = BitBlock::zeros(1 << m);
            assert_eq!(kronecker_transform(&z).unwrap(), z);
        }
    }

    #[test]
    fn transform_rejects_bad_length() {
        for len in [0usize, 3, 6, 12] {
            let mut v = vec![0u8; len];
            assert!(matches!(
                kronecker_transform_in_place(&mut v),
                Err(Error::NotPowerOfTwo { .. })
            ));
        }
    }

    #[test]
    fn from_bits_rejects_non_binary() {
        assert!(BitBlock::from_bits(vec![0, 1, 2]).is_err());
    }

    #[test]
    fn length_four_by_hand() {
        // u = (0,0,0,1) -> row 3 of F^{(x)2} = (1,1,1,1)
        assert_eq!(
            kronecker_transform(&bb(&[0, 0, 0, 1])).unwrap().bits(),
            &[1, 1, 1, 1]
        );
    }
}
