//! Compensated accumulation and the entropy kernel.
//!
//! All probability sums and entropy accumulations in this crate go through
//! [`compensated_sum`] so that the 1e-12 normalization checks and the 1e-9
//! identity tolerances measure model error, not summation round-off.

/// Probabilities at or below this magnitude are treated as exact zeros, which
/// enforces the 0·log 0 = 0 convention well before `log2` can underflow.
pub const ZERO_PROB_CUTOFF: f64 = 1e-300;

/// Absolute tolerance on "sums to one" checks for pmfs, channel rows and
/// joint distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Neumaier's variant of Kahan summation: a running compensation term catches
/// the low-order bits lost by each addition, including the case where the next
/// term is larger than the running sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Shannon entropy in bits, −Σ p·log2 p, over anything yielding probabilities.
///
/// Inputs below [`ZERO_PROB_CUTOFF`] contribute exactly zero. A tiny negative
/// total (possible when a marginal entry rounds a hair above 1) is clamped to
/// zero so the result honors the H ≥ 0 range contract.
pub fn entropy_bits<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    let h = compensated_sum(probs.into_iter().map(|p| {
        if p > ZERO_PROB_CUTOFF {
            -p * p.log2()
        } else {
            0.0
        }
    }));
    if h < 0.0 && h > -1e-9 {
        0.0
    } else {
        h
    }
}

/// erf with enforced odd symmetry: erf(−z) is computed as −erf(z) bit for bit,
/// so Gaussian bin masses mirrored around a row center come out identical.
pub fn erf_odd(z: f64) -> f64 {
    if z.is_sign_negative() {
        -libm::erf(-z)
    } else {
        libm::erf(z)
    }
}
