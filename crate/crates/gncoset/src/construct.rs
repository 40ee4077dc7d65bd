//! Gaussian-approximation construction.
//!
//! Tracks the mean of the all-zero-codeword LLR under BPSK/AWGN through the
//! polar transform, assuming consistent Gaussians (variance = 2 * mean).
//! Channel mean is 2/sigma^2 = 4 * Es/N0. Per stage, a pair (check, variable)
//! is produced from each mean: variable doubles it, check evolves it through
//! phi. The K indices with the largest final mean form the information set,
//! ties broken toward the lower index.

use crate::code::CodeSpec;
use crate::error::{Error, Result};

/// Switch point of the two-piece phi approximation:
/// phi(x) = exp(0.0218 - 0.4527 x^0.86)              for x <= 10,
/// phi(x) = sqrt(pi/x) exp(-x/4) (1 - 10/(7x))       for x  > 10.
const PHI_SWITCH: f64 = 10.0;

/// ln phi(m). Working in the log domain keeps the large-mean branch finite
/// far beyond the point where phi itself underflows.
fn phi_ln(m: f64) -> f64 {
    debug_assert!(m >= 0.0);
    if m <= PHI_SWITCH {
        0.0218 - 0.4527 * m.powf(0.86)
    } else {
        0.5 * (std::f64::consts::PI / m).ln() - m / 4.0 + (-10.0 / (7.0 * m)).ln_1p()
    }
}

/// Inverse of phi given ln(target), branch-consistent with `phi_ln`.
fn phi_inv_ln(ln_q: f64) -> f64 {
    let seam = 0.0218 - 0.4527 * PHI_SWITCH.powf(0.86);
    if ln_q >= seam {
        // analytic inverse of the small branch
        ((0.0218 - ln_q) / 0.4527).powf(1.0 / 0.86)
    } else {
        // bisect the strictly decreasing large branch
        let mut lo = PHI_SWITCH;
        let mut hi = 2.0 * PHI_SWITCH;
        while phi_ln(hi) > ln_q {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi_ln(mid) > ln_q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Mean after check-combining two independent channels of mean `m`:
/// phi_inv(1 - (1 - phi(m))^2), evaluated as 2p - p^2 in the log domain.
fn check_mean(m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let ln_p = phi_ln(m);
    let ln_q = std::f64::consts::LN_2 + ln_p + (-0.5 * ln_p.exp()).ln_1p();
    phi_inv_ln(ln_q)
}

/// Final mean LLR of every synthetic channel, in u-index order.
pub(crate) fn channel_means(n: usize, design_es_n0_db: f64) -> Vec<f64> {
    let m_ch = 4.0 * 10f64.powf(design_es_n0_db / 10.0);
    let mut means = vec![m_ch];
    for _ in 0..n {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &m in &means {
            next.push(check_mean(m));
            next.push(2.0 * m);
        }
        means = next;
    }
    means
}

/// Builds a code by Gaussian approximation at the given design Es/N0: the K
/// most reliable u-indices become the information set. Deterministic; ties
/// broken by lower index.
pub fn construct_gaussian_approx(n: usize, k: usize, design_es_n0_db: f64) -> Result<CodeSpec> {
    construct_reserved(n, k, design_es_n0_db, 0, 0)
}

/// Gaussian-approximation construction with guaranteed component structure:
/// the lowest-index `reserved_rows` rows and `reserved_cols` columns of the
/// sqrt(N) x sqrt(N) u-matrix stay fully frozen, and the K most reliable of
/// the remaining cells become the information set.
///
/// Plain reliability ranking at high rates leaves no u-matrix row or column
/// entirely frozen, which makes both component codes rate-1 and blinds the
/// per-component error detectors (every vector passes). Reserving the
/// weakest lines (low indices minorize all others under the channel
/// degradation order) gives every column component at least `reserved_rows`
/// frozen positions and every row component at least `reserved_cols`.
/// Both reservations zero reproduce `construct_gaussian_approx` exactly.
pub fn construct_reserved(
    n: usize,
    k: usize,
    design_es_n0_db: f64,
    reserved_rows: usize,
    reserved_cols: usize,
) -> Result<CodeSpec> {
    if n < 2 || n % 2 != 0 || n >= usize::BITS as usize {
        return Err(Error::InvalidCodeSpec(format!(
            "n must be even and >= 2, got {n}"
        )));
    }
    let big_n = 1usize << n;
    let sqrt_n = 1usize << (n / 2);
    if reserved_rows >= sqrt_n || reserved_cols >= sqrt_n {
        return Err(Error::InvalidArgument(format!(
            "cannot reserve {reserved_rows} rows / {reserved_cols} columns of {sqrt_n}"
        )));
    }
    let avail = (sqrt_n - reserved_rows) * (sqrt_n - reserved_cols);
    if k == 0 || k > avail {
        return Err(Error::InvalidArgument(format!(
            "K must satisfy 0 < K <= {avail}, got {k}"
        )));
    }
    let means = channel_means(n, design_es_n0_db);
    let mut order: Vec<usize> = (0..big_n)
        .filter(|&i| i / sqrt_n >= reserved_rows && i % sqrt_n >= reserved_cols)
        .collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    let mut info: Vec<usize> = order[..k].to_vec();
    info.sort_unstable();
    CodeSpec::new(n, info)
}
