//! Monte Carlo cross-checks: draw samples from a model joint, rebuild the
//! entropies from plug-in (empirical frequency) estimates, and report how far
//! they fall from the exact enumeration. Deterministic for a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::identities::residual_identity_of;
use crate::joint::Joint2;
use crate::map::DeterministicMap;
use crate::math::{compensated_sum, entropy_bits};
use crate::pmf::Pmf;

/// Plug-in entropy estimates from a sampled joint, with their deviations from
/// the exact values.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub samples: u64,
    pub seed: u64,
    /// Plug-in estimate of the residual entropy H(x − x_p).
    pub h_residual: f64,
    /// Plug-in estimate of the conditional entropy H(x | x_p).
    pub h_cond: f64,
    /// Plug-in estimate of H(x | f(x_p)), when a bottleneck map was supplied.
    pub h_cond_tilde: Option<f64>,
    /// |estimate − exact| for the fields above.
    pub dev_h_residual: f64,
    pub dev_h_cond: f64,
    pub dev_h_cond_tilde: Option<f64>,
}

/// Draws `samples` i.i.d. pairs (row symbol, column symbol) from a joint
/// distribution using inverse-CDF sampling: the joint is flattened to a
/// cumulative array once, then each uniform draw is located with a binary
/// search (`partition_point`), costing O(log(rows·cols)) per sample.
pub fn sample_joint(joint: &Joint2, samples: u64, seed: u64) -> Vec<(i32, i32)> {
    let cols = joint.col_alphabet().len();
    let mut cumulative = Vec::with_capacity(joint.probs().len());
    let mut acc = 0.0;
    let mut comp = 0.0;
    for &p in joint.probs() {
        // Neumaier running sum keeps the final edge at 1 within rounding.
        let t = acc + p;
        comp += if acc.abs() >= p.abs() { (acc - t) + p } else { (p - t) + acc };
        acc = t;
        cumulative.push(acc + comp);
    }
    if let Some(last) = cumulative.last_mut() {
        *last = 1.0; // close the final bin against rounding shortfall
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let u: f64 = rng.random();
        // First cell whose cumulative mass exceeds u.
        let cell = cumulative.partition_point(|&c| c <= u);
        let cell = cell.min(cumulative.len() - 1);
        let i = cell / cols;
        let j = cell % cols;
        pairs.push((
            joint.row_alphabet().symbol(i),
            joint.col_alphabet().symbol(j),
        ));
    }
    pairs
}

fn plugin_entropy(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    entropy_bits(counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n))
}

/// Samples the model joint of `prior` and `channel` and compares plug-in
/// estimates of the residual, conditional, and (optionally) bottlenecked
/// conditional entropies against exact enumeration.
pub fn monte_carlo_check(
    prior: &Pmf,
    channel: &ChannelModel,
    bottleneck: Option<&DeterministicMap>,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let joint = Joint2::from_channel(prior, channel)?;
    if let Some(f) = bottleneck {
        if f.input() != joint.col_alphabet() {
            return Err(Error::mismatch(format!(
                "bottleneck map expects input alphabet {:?}, joint columns are {:?}",
                f.input(),
                joint.col_alphabet()
            )));
        }
    }

    let exact = residual_identity_of(&joint);
    let exact_tilde = bottleneck
        .map(|f| -> Result<f64> {
            let mapped = joint.apply_map_to_col(f)?;
            Ok(mapped.conditional_entropy_row_given_col())
        })
        .transpose()?;

    let rows = joint.row_alphabet().len();
    let cols = joint.col_alphabet().len();
    let row_off = joint.row_alphabet().offset();
    let col_off = joint.col_alphabet().offset();
    let residual_len = rows + cols - 1;
    let residual_off = row_off - joint.col_alphabet().max_symbol();

    // Dense count tables: the alphabets are small (≤ 2^20 cells), so counting
    // arrays beat hash maps and keep iteration order deterministic.
    let mut joint_counts = vec![0u64; rows * cols];
    let mut col_counts = vec![0u64; cols];
    let mut residual_counts = vec![0u64; residual_len];
    let tilde_cols = bottleneck.map(|f| f.output().len()).unwrap_or(0);
    let mut tilde_joint_counts = vec![0u64; rows * tilde_cols];
    let mut tilde_col_counts = vec![0u64; tilde_cols];

    for (x, xp) in sample_joint(&joint, samples, seed) {
        let i = (x - row_off) as usize;
        let j = (xp - col_off) as usize;
        joint_counts[i * cols + j] += 1;
        col_counts[j] += 1;
        residual_counts[(x - xp - residual_off) as usize] += 1;
        if let Some(f) = bottleneck {
            let jt = f.map_index(j);
            tilde_joint_counts[i * tilde_cols + jt] += 1;
            tilde_col_counts[jt] += 1;
        }
    }

    let h_joint = plugin_entropy(&joint_counts, samples);
    let h_col = plugin_entropy(&col_counts, samples);
    let h_residual = plugin_entropy(&residual_counts, samples);
    let h_cond = h_joint - h_col;
    let h_cond_tilde = bottleneck.map(|_| {
        plugin_entropy(&tilde_joint_counts, samples) - plugin_entropy(&tilde_col_counts, samples)
    });

    Ok(McEstimate {
        samples,
        seed,
        h_residual,
        h_cond,
        h_cond_tilde,
        dev_h_residual: (h_residual - exact.h_residual).abs(),
        dev_h_cond: (h_cond - exact.h_conditional).abs(),
        dev_h_cond_tilde: h_cond_tilde
            .zip(exact_tilde)
            .map(|(est, ex)| (est - ex).abs()),
    })
}

/// Sanity helper for tests: total variation distance between the empirical
/// cell frequencies of `pairs` and the joint they were drawn from.
pub fn empirical_total_variation(joint: &Joint2, pairs: &[(i32, i32)]) -> f64 {
    let cols = joint.col_alphabet().len();
    let mut counts = vec![0u64; joint.probs().len()];
    for &(x, xp) in pairs {
        let i = joint.row_alphabet().index_of(x).expect("row symbol in alphabet");
        let j = joint.col_alphabet().index_of(xp).expect("col symbol in alphabet");
        counts[i * cols + j] += 1;
    }
    let n = pairs.len() as f64;
    0.5 * compensated_sum(
        counts
            .iter()
            .zip(joint.probs())
            .map(|(&c, &p)| (c as f64 / n - p).abs()),
    )
}
