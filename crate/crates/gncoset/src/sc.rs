//! Hard-output successive-cancellation decoder for one component code.

use crate::error::{Error, Result};

/// LLR magnitude cap. Chosen large enough that the damping additions in the
/// LLR generator cannot push a value past the representable working range
/// while keeping headroom for summation.
pub const LLR_MAX: f64 = 128.0;

/// A block of finite LLRs (natural log domain; positive means bit 0 more
/// likely). Values are clamped to [-LLR_MAX, LLR_MAX] on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrBlock(Vec<f64>);

impl LlrBlock {
    /// Clamps every value into [-LLR_MAX, LLR_MAX]; rejects NaN.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN LLR".into()));
        }
        Ok(Self(
            values.into_iter().map(|v| v.clamp(-LLR_MAX, LLR_MAX)).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for LlrBlock {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Check-node (f) kernel, min-sum form: sign(a) sign(b) min(|a|, |b|).
#[cfg(not(feature = "exact-kernel"))]
#[inline]
pub fn check_node(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) ^ (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Check-node (f) kernel, exact form: 2 atanh(tanh(a/2) tanh(b/2)).
#[cfg(feature = "exact-kernel")]
#[inline]
pub fn check_node(a: f64, b: f64) -> f64 {
    let t = (a / 2.0).tanh() * (b / 2.0).tanh();
    // tanh saturates at 1.0 for |x| beyond ~19; keep the result finite
    (2.0 * t.atanh()).clamp(-LLR_MAX, LLR_MAX)
}

/// Variable-node (g) kernel: b + (1 - 2 u_hat) * a.
#[inline]
pub fn variable_node(a: f64, b: f64, u_hat: u8) -> f64 {
    debug_assert!(u_hat <= 1);
    b + if u_hat == 0 { a } else { -a }
}

/// Successive-cancellation decoder for a code of length 2^m with a fixed
/// frozen set. Owns its scratch buffers; instances are cheap and independent.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    m: usize,
    frozen: Vec<bool>,
    // scratch[s] holds the f/g outputs consumed by a node at stage s+1
    scratch: Vec<Vec<f64>>,
}

impl ScDecoder {
    /// `m` is the length exponent; `frozen` lists frozen u-indices (any
    /// order, duplicates ignored).
    pub fn new(m: usize, frozen: &[usize]) -> Result<Self> {
        let len = 1usize << m;
        let mut mask = vec![false; len];
        for &f in frozen {
            if f >= len {
                return Err(Error::InvalidArgument(format!(
                    "frozen index {f} out of range for length {len}"
                )));
            }
            mask[f] = true;
        }
        Ok(Self::from_mask(m, mask))
    }

    pub fn from_mask(m: usize, frozen: Vec<bool>) -> Self {
        assert_eq!(frozen.len(), 1 << m);
        let scratch = (0..m).map(|s| vec![0.0; 1 << s]).collect();
        Self { m, frozen, scratch }
    }

    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes one block: standard SC recursion, frozen decisions forced to
    /// 0, ties resolved to 0. Returns the re-encoded hard codeword, which by
    /// construction passes the syndrome check for this frozen set.
    pub fn decode(&mut self, llrs: &[f64], codeword_out: &mut [u8]) -> Result<()> {
        if llrs.len() != self.len() || codeword_out.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: llrs.len().max(codeword_out.len()),
            });
        }
        sc_recurse(self.m, llrs, &self.frozen, codeword_out, &mut self.scratch);
        Ok(())
    }
}

fn sc_recurse(
    stage: usize,
    llrs: &[f64],
    frozen: &[bool],
    out: &mut [u8],
    scratch: &mut [Vec<f64>],
) {
    if stage == 0 {
        out[0] = if frozen[0] {
            0
        } else {
            u8::from(llrs[0] < 0.0)
        };
        return;
    }
    let half = 1 << (stage - 1);
    let (child_scratch, rest) = scratch.split_at_mut(stage - 1);
    let buf = &mut rest[0];
    let (out_l, out_r) = out.split_at_mut(half);

    for i in 0..half {
        buf[i] = check_node(llrs[i], llrs[i + half]);
    }
    sc_recurse(stage - 1, buf, &frozen[..half], out_l, child_scratch);

    for i in 0..half {
        buf[i] = variable_node(llrs[i], llrs[i + half], out_l[i]);
    }
    sc_recurse(stage - 1, buf, &frozen[half..], out_r, child_scratch);

    // combine sub-codewords: x = (x_l ^ x_r, x_r)
    for i in 0..half {
        out_l[i] ^= out_r[i];
    }
}

/// One-shot convenience wrapper around [`ScDecoder`].
pub fn sc_decode(llrs: &LlrBlock, frozen: &[usize]) -> Result<Vec<u8>> {
    let len = llrs.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { got: len });
    }
    let m = len.trailing_zeros() as usize;
    let mut dec = ScDecoder::new(m, frozen)?;
    let mut out = vec![0u8; len];
    dec.decode(llrs.values(), &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::syndrome_check;

    fn llr(values: &[f64]) -> LlrBlock {
        LlrBlock::new(values.to_vec()).unwrap()
    }

    #[test]
    #[cfg(not(feature = "exact-kernel"))]
    fn check_node_examples() {
        assert_eq!(check_node(2.0, -3.0), -2.0);
        assert_eq!(check_node(0.0, 5.0), 0.0);
        assert_eq!(check_node(0.0, -5.0), 0.0);
        assert_eq!(check_node(1.5, 2.5), check_node(2.5, 1.5));
        assert_eq!(check_node(-1.5, 2.5), check_node(2.5, -1.5));
    }

    #[test]
    fn variable_node_examples() {
        assert_eq!(variable_node(1.0, 3.0, 0), 4.0);
        assert_eq!(variable_node(1.0, 3.0, 1), 2.0);
        assert_eq!(variable_node(0.0, 3.5, 1), 3.5);
    }

    #[test]
    fn decode_length_two_frozen_first() {
        // u0 frozen, g(-1, 3, 0) = 2 > 0 => u = (0,0), x = (0,0)
        let out = sc_decode(&llr(&[-1.0, 3.0]), &[0]).unwrap();
        assert_eq!(out, vec![0, 0]);
    }

    #[test]
    fn decode_length_two_rate_one() {
        // f(-1,3) = -1 < 0 => u0 = 1; g(-1,3,1) = 4 > 0 => u1 = 0; x = (1,0)
        let out = sc_decode(&llr(&[-1.0, 3.0]), &[]).unwrap();
        assert_eq!(out, vec![1, 0]);
    }

    #[test]
    fn decode_all_frozen_is_zero() {
        let out = sc_decode(&llr(&[-9.0, -7.0, 13.0, -2.0]), &[0, 1, 2, 3]).unwrap();
        assert_eq!(out, vec![0, 0, 0, 0]);
    }

    #[test]
    fn rate_one_equals_hard_decision() {
        // exhaustive over sign patterns at length 8
        for pattern in 0..256u32 {
            let llrs: Vec<f64> = (0..8)
                .map(|i| {
                    let mag = 0.5 + i as f64;
                    if pattern >> i & 1 == 1 {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect();
            let hard: Vec<u8> = llrs.iter().map(|&l| u8::from(l < 0.0)).collect();
            let out = sc_decode(&llr(&llrs), &[]).unwrap();
            assert_eq!(out, hard, "pattern {pattern:#010b}");
        }
    }

    #[test]
    fn output_is_always_a_component_codeword() {
        // a couple of fixed cases; randomized coverage lives in the property suite
        let frozen = [0usize, 1, 4];
        let out = sc_decode(&llr(&[0.3, -1.2, 0.9, -0.4, 2.2, -0.1, 0.8, 1.4]), &frozen).unwrap();
        assert!(syndrome_check(&out, &frozen).unwrap());
    }

    #[test]
    fn decode_rejects_length_mismatch() {
        let mut dec = ScDecoder::new(2, &[0]).unwrap();
        let mut out = vec![0u8; 4];
        assert!(dec.decode(&[1.0, 2.0], &mut out).is_err());
    }

    #[test]
    fn ties_resolve_to_zero() {
        let out = sc_decode(&llr(&[0.0, 0.0]), &[]).unwrap();
        assert_eq!(out, vec![0, 0]);
    }
}
