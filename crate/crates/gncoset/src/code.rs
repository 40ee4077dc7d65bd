//! Code definition: information set, encoding, component frozen sets and
//! syndrome checking.
//!
//! A code of length N = 2^n (n even) is defined by an information set
//! A within {0..N-1}. Codeword index k maps to the sqrt(N) x sqrt(N) matrix
//! cell (r, c) = (k / sqrt(N), k mod sqrt(N)). The column components (graph G)
//! are the columns of this matrix, the row components (graph G_pi) its rows.

use std::path::Path;

use crate::bits::{kronecker_transform_in_place, BitBlock};
use crate::error::{Error, Result};

/// Code definition: length exponent, information set and the derived
/// frozen sets of the column/row component codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    info_set: Vec<usize>,
    info_mask: Vec<bool>,
    col_frozen: Vec<usize>,
    row_frozen: Vec<usize>,
    col_frozen_mask: Vec<bool>,
    row_frozen_mask: Vec<bool>,
}

impl CodeSpec {
    /// Builds a spec from the length exponent and information set. The set
    /// may be given in any order; duplicates are rejected.
    pub fn new(n: usize, info_set: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidCodeSpec(format!(
                "n must be even and >= 2, got {n}"
            )));
        }
        if n >= usize::BITS as usize {
            return Err(Error::InvalidCodeSpec(format!("n = {n} too large")));
        }
        let big_n = 1usize << n;
        let mut info_set: Vec<usize> = info_set.into_iter().collect();
        info_set.sort_unstable();
        if let Some(&i) = info_set.iter().find(|&&i| i >= big_n) {
            return Err(Error::InvalidCodeSpec(format!(
                "information index {i} out of range for N = {big_n}"
            )));
        }
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCodeSpec(
                "duplicate information index".into(),
            ));
        }
        if info_set.is_empty() {
            return Err(Error::InvalidCodeSpec("information set is empty".into()));
        }
        let mut info_mask = vec![false; big_n];
        for &i in &info_set {
            info_mask[i] = true;
        }
        let (col_frozen, row_frozen) = derive_component_frozen_sets(n, &info_set)?;
        let sqrt_n = 1usize << (n / 2);
        let mut col_frozen_mask = vec![false; sqrt_n];
        for &r in &col_frozen {
            col_frozen_mask[r] = true;
        }
        let mut row_frozen_mask = vec![false; sqrt_n];
        for &c in &row_frozen {
            row_frozen_mask[c] = true;
        }
        Ok(Self {
            n,
            info_set,
            info_mask,
            col_frozen,
            row_frozen,
            col_frozen_mask,
            row_frozen_mask,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code length N = 2^n.
    pub fn big_n(&self) -> usize {
        1 << self.n
    }

    /// Component code length sqrt(N) = 2^(n/2).
    pub fn sqrt_n(&self) -> usize {
        1 << (self.n / 2)
    }

    /// Number of information bits K.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    /// Information set, ascending.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen positions of every column component code (graph G).
    pub fn col_frozen(&self) -> &[usize] {
        &self.col_frozen
    }

    /// Frozen positions of every row component code (graph G_pi).
    pub fn row_frozen(&self) -> &[usize] {
        &self.row_frozen
    }

    pub fn col_frozen_mask(&self) -> &[bool] {
        &self.col_frozen_mask
    }

    pub fn row_frozen_mask(&self) -> &[bool] {
        &self.row_frozen_mask
    }

    /// Scatters the information bits into the u-domain at the information
    /// set (ascending) and applies the transform.
    pub fn encode(&self, info: &BitBlock) -> Result<BitBlock> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: info.len(),
            });
        }
        let mut u = vec![0u8; self.big_n()];
        for (&idx, &bit) in self.info_set.iter().zip(info.bits()) {
            u[idx] = bit;
        }
        kronecker_transform_in_place(&mut u)?;
        BitBlock::from_bits(u)
    }

    /// Inverse of `encode`: transform back to the u-domain (the transform is
    /// an involution) and gather the information positions.
    pub fn extract_info(&self, codeword: &BitBlock) -> Result<BitBlock> {
        if codeword.len() != self.big_n() {
            return Err(Error::LengthMismatch {
                expected: self.big_n(),
                got: codeword.len(),
            });
        }
        let mut u = codeword.bits().to_vec();
        kronecker_transform_in_place(&mut u)?;
        BitBlock::from_bits(self.info_set.iter().map(|&i| u[i]).collect())
    }

    /// Loads a spec from the plain-text format:
    /// line 1 `n=<int>`, line 2 `K=<int>`, line 3 `A=<comma-separated
    /// ascending 0-based indices>`. Frozen sets are recomputed.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let n = parse_kv(lines.next(), "n")?;
        let k = parse_kv(lines.next(), "K")?;
        let (line_no, a_line) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 3, msg: "missing A= line".into() })?;
        let a_body = a_line
            .trim()
            .strip_prefix("A=")
            .ok_or_else(|| Error::Parse {
                line: line_no + 1,
                msg: format!("expected `A=...`, got `{}`", a_line.trim()),
            })?;
        let mut info_set = Vec::new();
        if !a_body.trim().is_empty() {
            for part in a_body.split(',') {
                let idx: usize = part.trim().parse().map_err(|_| Error::Parse {
                    line: line_no + 1,
                    msg: format!("bad index `{}`", part.trim()),
                })?;
                info_set.push(idx);
            }
        }
        if info_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse {
                line: line_no + 1,
                msg: "A must be strictly ascending".into(),
            });
        }
        if info_set.len() != k {
            return Err(Error::InvalidCodeSpec(format!(
                "K = {k} but A lists {} indices",
                info_set.len()
            )));
        }
        Self::new(n, info_set)
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let a: Vec<String> = self.info_set.iter().map(|i| i.to_string()).collect();
        format!("n={}\nK={}\nA={}\n", self.n, self.k(), a.join(","))
    }
}

fn parse_kv(line: Option<(usize, &str)>, key: &str) -> Result<usize> {
    let (line_no, l) = line.ok_or_else(|| Error::Parse {
        line: 0,
        msg: format!("missing `{key}=` line"),
    })?;
    let body = l.trim().strip_prefix(key).and_then(|r| r.strip_prefix('='));
    match body {
        Some(v) => v.trim().parse().map_err(|_| Error::Parse {
            line: line_no + 1,
            msg: format!("bad value for `{key}`: `{}`", v.trim()),
        }),
        None => Err(Error::Parse {
            line: line_no + 1,
            msg: format!("expected `{key}=...`, got `{}`", l.trim()),
        }),
    }
}

/// Derives the frozen sets of the column and row component codes from the
/// information set.
///
/// Arrange A as a sqrt(N) x sqrt(N) mask M with M[r][c] set iff
/// r*sqrt(N) + c is in A. Because G_N = G_sqrtN (x) G_sqrtN, the u-domain
/// input of every column component is a GF(2) combination of the rows of the
/// u-matrix, so column components see frozen zeros exactly at the all-frozen
/// rows; symmetrically, row components at the all-frozen columns.
pub fn derive_component_frozen_sets(
    n: usize,
    info_set: &[usize],
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidCodeSpec(format!(
            "n must be even and >= 2, got {n}"
        )));
    }
    let sqrt_n = 1usize << (n / 2);
    let mut row_has_info = vec![false; sqrt_n];
    let mut col_has_info = vec![false; sqrt_n];
    for &k in info_set {
        row_has_info[k / sqrt_n] = true;
        col_has_info[k % sqrt_n] = true;
    }
    let col_frozen = (0..sqrt_n).filter(|&r| !row_has_info[r]).collect();
    let row_frozen = (0..sqrt_n).filter(|&c| !col_has_info[c]).collect();
    Ok((col_frozen, row_frozen))
}

/// Returns true (no error detected) iff the transform of `v` is zero at every
/// frozen position, i.e. `v` lies in the component coset code.
pub fn syndrome_check(v: &[u8], frozen: &[usize]) -> Result<bool> {
    let mut u = v.to_vec();
    kronecker_transform_in_place(&mut u)?;
    Ok(frozen.iter().all(|&f| u[f] == 0))
}

/// Allocation-free syndrome check against a frozen mask; `scratch` must have
/// the same length as `v`.
pub(crate) fn syndrome_check_into(v: &[u8], frozen_mask: &[bool], scratch: &mut [u8]) -> bool {
    scratch.copy_from_slice(v);
    kronecker_transform_in_place(scratch).expect("component length is a power of two");
    scratch
        .iter()
        .zip(frozen_mask)
        .all(|(&u, &frozen)| !frozen || u == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_n2_single_info_bit() {
        // A = {3}: u = (0,0,0,1), codeword = (1,1,1,1)
        let spec = CodeSpec::new(2, [3]).unwrap();
        let info = BitBlock::from_bits(vec![1]).unwrap();
        assert_eq!(spec.encode(&info).unwrap().bits(), &[1, 1, 1, 1]);
        let back = spec
            .extract_info(&BitBlock::from_bits(vec![1, 1, 1, 1]).unwrap())
            .unwrap();
        assert_eq!(back.bits(), &[1]);
    }

    #[test]
    fn encode_all_zero() {
        let spec = CodeSpec::new(4, 0..16).unwrap();
        let info = BitBlock::zeros(16);
        assert_eq!(spec.encode(&info).unwrap(), BitBlock::zeros(16));
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let spec = CodeSpec::new(2, [3]).unwrap();
        assert!(matches!(
            spec.encode(&BitBlock::zeros(2)),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            spec.extract_info(&BitBlock::zeros(8)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn frozen_sets_full_and_empty() {
        let (col, row) = derive_component_frozen_sets(4, &(0..16).collect::<Vec<_>>()).unwrap();
        assert!(col.is_empty() && row.is_empty());
        let (col, row) = derive_component_frozen_sets(4, &[]).unwrap();
        assert_eq!(col, vec![0, 1, 2, 3]);
        assert_eq!(row, vec![0, 1, 2, 3]);
    }

    #[test]
    fn frozen_sets_corner_cell() {
        // A = {15} = cell (3,3): rows 0..2 and columns 0..2 all-frozen
        let (col, row) = derive_component_frozen_sets(4, &[15]).unwrap();
        assert_eq!(col, vec![0, 1, 2]);
        assert_eq!(row, vec![0, 1, 2]);
    }

    #[test]
    fn frozen_sets_order_invariant() {
        let spec_a = CodeSpec::new(4, [3, 7, 12, 15]).unwrap();
        let spec_b = CodeSpec::new(4, [15, 3, 12, 7]).unwrap();
        assert_eq!(spec_a, spec_b);
    }

    #[test]
    fn spec_rejects_bad_input() {
        assert!(CodeSpec::new(3, [0]).is_err()); // odd n
        assert!(CodeSpec::new(0, [0]).is_err());
        assert!(CodeSpec::new(2, [4]).is_err()); // out of range
        assert!(CodeSpec::new(2, [1, 1]).is_err()); // duplicate
        assert!(CodeSpec::new(2, Vec::new()).is_err()); // empty
    }

    #[test]
    fn syndrome_all_zero_passes() {
        assert!(syndrome_check(&[0, 0, 0, 0], &[0, 2]).unwrap());
        assert!(syndrome_check(&[0, 0, 0, 0], &[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn syndrome_fully_frozen_rejects_nonzero() {
        assert!(!syndrome_check(&[1, 0, 0, 0], &[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn spec_file_round_trip() {
        let spec = CodeSpec::new(4, [5, 7, 13, 15]).unwrap();
        let text = spec.to_text();
        let parsed = CodeSpec::from_text(&text).unwrap();
        assert_eq!(spec, parsed);
    }

    #[test]
    fn spec_file_rejects_inconsistencies() {
        assert!(CodeSpec::from_text("n=4\nK=3\nA=1,2\n").is_err()); // K mismatch
        assert!(CodeSpec::from_text("n=4\nK=2\nA=2,1\n").is_err()); // not ascending
        assert!(CodeSpec::from_text("n=3\nK=1\nA=1\n").is_err()); // odd n
        assert!(CodeSpec::from_text("n=4\nK=1\n").is_err()); // missing A
        assert!(CodeSpec::from_text("K=1\nn=4\nA=1\n").is_err()); // wrong order
    }
}
