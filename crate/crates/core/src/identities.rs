//! Numeric verification of the entropy identities relating residual coding,
//! conditional coding, and information bottlenecks, plus the closed-form
//! conditional entropy of the switch-error model and its large-alphabet
//! linearity.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{switch_channel, ChannelModel, SwitchSpec};
use crate::error::{Error, Result};
use crate::joint::Joint2;
use crate::map::DeterministicMap;
use crate::math::{compensated_sum, entropy_bits};
use crate::pmf::{Alphabet, Pmf};

/// Tolerance on identity residuals: the identities hold analytically, so any
/// excess over this bound indicates an implementation defect, not model error.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Both sides of H(x − x_p) = H(x | x_p) + I(x_p; r), with each term computed
/// independently, and the absolute identity residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualIdentityReport {
    /// H(x − x_p): entropy of the residual marginal.
    pub h_residual: f64,
    /// H(x | x_p): conditional entropy from the (x, x_p) joint.
    pub h_conditional: f64,
    /// I(x_p; r): mutual information from the (r, x_p) joint.
    pub mi_pred_residual: f64,
    /// |h_residual − h_conditional − mi_pred_residual|.
    pub residual_error: f64,
}

/// Every quantity in the bottleneck identities
/// H(x | x_p) = H(x | x̃_p) − I(x; x_p | x̃_p) and
/// H(x − x_p) = H(x | x̃_p) − I(x; x_p | x̃_p) + I(x_p; r),
/// with the conditional mutual information computed by direct per-cell
/// enumeration rather than by subtraction, so the identity checks are real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BottleneckReport {
    /// H(x_p), entropy of the intact prediction.
    pub h_pred: f64,
    /// H(x̃_p), entropy of the degraded prediction; never above `h_pred`.
    pub h_pred_tilde: f64,
    /// H(x | x_p).
    pub h_cond: f64,
    /// H(x | x̃_p); never below `h_cond`.
    pub h_cond_tilde: f64,
    /// I(x; x_p | x̃_p), enumerated cell by cell over the fibers of f.
    pub cmi: f64,
    /// |H(x|x_p) − (H(x|x̃_p) − cmi)|.
    pub cmi_identity_error: f64,
    /// |H(x−x_p) − (H(x|x̃_p) − cmi + I(x_p; r))|.
    pub combined_identity_error: f64,
}

/// Verifies the residual-coding identity for one (prior, channel) pair. The
/// three terms come from three different objects — the residual marginal, the
/// (x, x_p) joint, and the (r, x_p) joint — so the reported residual measures
/// genuine numeric agreement.
pub fn verify_residual_identity(
    prior: &Pmf,
    channel: &ChannelModel,
) -> Result<ResidualIdentityReport> {
    let joint = Joint2::from_channel(prior, channel)?;
    Ok(residual_identity_of(&joint))
}

pub(crate) fn residual_identity_of(joint: &Joint2) -> ResidualIdentityReport {
    let residual = joint.residual_joint();
    let h_residual = residual.marginal_row().entropy();
    let mi_pred_residual = residual.mutual_information();
    let h_conditional = joint.conditional_entropy_row_given_col();
    ResidualIdentityReport {
        h_residual,
        h_conditional,
        mi_pred_residual,
        residual_error: (h_residual - h_conditional - mi_pred_residual).abs(),
    }
}

/// Verifies the bottleneck identities for one (prior, channel, map) triple.
pub fn verify_bottleneck(
    prior: &Pmf,
    channel: &ChannelModel,
    f: &DeterministicMap,
) -> Result<BottleneckReport> {
    let joint = Joint2::from_channel(prior, channel)?;
    bottleneck_identities_of(&joint, f)
}

pub(crate) fn bottleneck_identities_of(
    joint: &Joint2,
    f: &DeterministicMap,
) -> Result<BottleneckReport> {
    let mapped = joint.apply_map_to_col(f)?;
    let h_pred = joint.marginal_col().entropy();
    let h_pred_tilde = mapped.marginal_col().entropy();
    let h_cond = joint.conditional_entropy_row_given_col();
    let h_cond_tilde = mapped.conditional_entropy_row_given_col();
    let cmi = per_cell_cmi(joint, f);
    let cmi_identity_error = (h_cond - (h_cond_tilde - cmi)).abs();
    let residual = joint.residual_joint();
    let h_residual = residual.marginal_row().entropy();
    let mi_pred_residual = residual.mutual_information();
    let combined_identity_error =
        (h_residual - (h_cond_tilde - cmi + mi_pred_residual)).abs();
    Ok(BottleneckReport {
        h_pred,
        h_pred_tilde,
        h_cond,
        h_cond_tilde,
        cmi,
        cmi_identity_error,
        combined_identity_error,
    })
}

/// I(x; x_p | x̃_p) by direct enumeration: for each output symbol t of f, the
/// columns in the fiber f⁻¹(t) form a sub-joint; the conditional MI is the
/// cell-mass-weighted average of the sub-joints' mutual informations. This
/// route never touches the H(x|·) subtraction used elsewhere, which is what
/// makes the identity checks independent.
fn per_cell_cmi(joint: &Joint2, f: &DeterministicMap) -> f64 {
    let rows = joint.row_alphabet().len();
    let cols = joint.col_alphabet().len();
    let out = f.output().len();
    // fibers[t] = column indices mapping to t
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); out];
    for j in 0..cols {
        fibers[f.map_index(j)].push(j);
    }
    let contributions = fibers.into_iter().map(|fiber| {
        if fiber.is_empty() {
            return 0.0;
        }
        // Sub-joint restricted to this fiber, kept unnormalized; entropies of
        // the cell-conditional distribution are computed by dividing through
        // by the cell mass.
        let mut row_mass = vec![0.0; rows];
        let mut col_mass = vec![0.0; fiber.len()];
        let mut cell_mass = 0.0;
        for (i, rm) in row_mass.iter_mut().enumerate() {
            for (k, &j) in fiber.iter().enumerate() {
                let v = joint.prob(i, j);
                *rm += v;
                col_mass[k] += v;
                cell_mass += v;
            }
        }
        if cell_mass <= 0.0 {
            return 0.0;
        }
        let h_row = entropy_bits(row_mass.iter().map(|&v| v / cell_mass));
        let h_col = entropy_bits(col_mass.iter().map(|&v| v / cell_mass));
        let h_joint = entropy_bits(
            joint
                .probs()
                .chunks(cols)
                .flat_map(|r| fiber.iter().map(move |&j| r[j] / cell_mass)),
        );
        let mi = h_row + h_col - h_joint;
        cell_mass * mi.max(0.0)
    });
    compensated_sum(contributions)
}

/// Closed-form H(x | x_p) of the switch-error model on `{0 ..= n}`:
/// ((np + 1) / (n + 1)) · log2(np + 1) − (np / (n + 1)) · log2(p).
/// The p → 0 limit is 0 (perfect prediction); p = 1 gives log2(n + 1).
pub fn closed_form_cond_entropy(n: u32, p: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("alphabet maximum must be at least 1"));
    }
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "error probability {p} is outside [0, 1]"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let np = nf * p;
    Ok((np + 1.0) / (nf + 1.0) * (np + 1.0).log2() - np / (nf + 1.0) * p.log2())
}

/// Maximum over the grid of |closed_form(n, p) / log2(n + 1) − p|: how far the
/// normalized closed-form curve strays from the straight chord through its
/// endpoints. Shrinks as n grows, which is the linearity claim under test.
pub fn linearity_deviation(n: u32, grid: &[f64]) -> Result<f64> {
    let span = ((n as f64) + 1.0).log2();
    let mut worst = 0.0_f64;
    for &p in grid {
        let dev = (closed_form_cond_entropy(n, p)? / span - p).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// A random pmf with independent uniform weights, normalized. Exercises both
/// well-spread and fairly lopsided distributions.
pub fn random_pmf(rng: &mut impl Rng, size: usize, offset: i32) -> Result<Pmf> {
    let alphabet = Alphabet::new(offset, size)?;
    let mut weights: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
    let total = compensated_sum(weights.iter().copied());
    if total <= 0.0 {
        // Astronomically unlikely, but keep the constructor total.
        return Pmf::uniform(size, offset);
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(Pmf::from_raw(alphabet, weights))
}

/// A random channel with independently drawn random rows.
pub fn random_channel(
    rng: &mut impl Rng,
    input: Alphabet,
    output: Alphabet,
) -> Result<ChannelModel> {
    let mut rows = Vec::with_capacity(input.len() * output.len());
    for _ in 0..input.len() {
        let row = random_pmf(rng, output.len(), output.offset())?;
        rows.extend_from_slice(row.probs());
    }
    ChannelModel::from_rows(input, output, rows)
}

/// A random total map onto a random-size output alphabet. Every output index
/// is drawn uniformly, so fibers of very different sizes occur.
pub fn random_map(
    rng: &mut impl Rng,
    input: Alphabet,
    output: Alphabet,
) -> Result<DeterministicMap> {
    let table = (0..input.len())
        .map(|_| rng.random_range(0..output.len()))
        .collect();
    DeterministicMap::new(input, output, table)
}

/// Summary of a randomized identity-verification run plus the closed-form and
/// linearity checks; the worst offender is kept for reproduction.
#[derive(Clone, Debug)]
pub struct IdentitySuiteReport {
    pub trials: u32,
    pub seed: u64,
    /// Number of p-grid points used for the closed-form comparison.
    pub closed_form_points: usize,
    /// Worst residual-coding identity error over all trials.
    pub max_residual_identity_error: f64,
    /// Worst H(x|x_p) vs H(x|x̃_p) − cmi error over all trials.
    pub max_cmi_identity_error: f64,
    /// Worst combined (residual vs bottleneck) identity error over all trials.
    pub max_combined_identity_error: f64,
    /// Dimensions `(trial, rows, cols, map outputs)` of the worst trial.
    pub worst_case: (u32, usize, usize, usize),
    /// Worst |enumerated − closed form| over the p grid and all checked w.
    pub closed_form_max_error: f64,
    /// Worst spread of enumerated H(x|x_p) across different w at equal p.
    pub w_spread_max: f64,
    /// (alphabet maximum, linearity deviation), in increasing alphabet order.
    pub linearity: Vec<(u32, f64)>,
    /// Whether the deviations above strictly decrease.
    pub linearity_strictly_decreasing: bool,
}

impl IdentitySuiteReport {
    /// True when every identity residual is inside [`IDENTITY_TOLERANCE`] and
    /// the qualitative checks hold.
    pub fn all_within_tolerance(&self) -> bool {
        self.max_residual_identity_error < IDENTITY_TOLERANCE
            && self.max_cmi_identity_error < IDENTITY_TOLERANCE
            && self.max_combined_identity_error < IDENTITY_TOLERANCE
            && self.closed_form_max_error < IDENTITY_TOLERANCE
            && self.w_spread_max <= 1e-12
            && self.linearity_strictly_decreasing
    }
}

/// Number of points in the default closed-form verification grid
/// (p = 0, 0.01, …, 1).
pub const DEFAULT_CLOSED_FORM_GRID: usize = 101;

/// Evenly spaced probability grid with `points` values covering [0, 1], with
/// both endpoints exact.
pub fn probability_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("probability grid needs at least 2 points"));
    }
    let last = points - 1;
    Ok((0..points)
        .map(|k| {
            if k == last {
                1.0
            } else {
                k as f64 / last as f64
            }
        })
        .collect())
}

/// Runs `trials` seeded random identity checks (each trial draws a prior, a
/// channel, and a map, then verifies the residual and bottleneck identities),
/// the closed-form-vs-enumeration sweep at several w, and the linearity
/// ladder. Deterministic for a fixed seed.
pub fn run_identity_suite(trials: u32, seed: u64) -> Result<IdentitySuiteReport> {
    run_identity_suite_with_grid(trials, seed, DEFAULT_CLOSED_FORM_GRID)
}

/// [`run_identity_suite`] with an explicit closed-form grid resolution.
pub fn run_identity_suite_with_grid(
    trials: u32,
    seed: u64,
    closed_form_points: usize,
) -> Result<IdentitySuiteReport> {
    if trials == 0 {
        return Err(Error::invalid("trial count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0_f64;
    let mut max_cmi = 0.0_f64;
    let mut max_combined = 0.0_f64;
    let mut worst_case = (0u32, 0usize, 0usize, 0usize);
    for trial in 0..trials {
        let rows = rng.random_range(1..=256usize);
        let cols = rng.random_range(1..=256usize);
        let outs = rng.random_range(1..=cols);
        let row_alpha = Alphabet::new(0, rows)?;
        let col_alpha = Alphabet::new(0, cols)?;
        let out_alpha = Alphabet::new(0, outs)?;
        let prior = random_pmf(&mut rng, rows, 0)?;
        let channel = random_channel(&mut rng, row_alpha, col_alpha)?;
        let map = random_map(&mut rng, col_alpha, out_alpha)?;
        let joint = Joint2::from_channel(&prior, &channel)?;
        let res = residual_identity_of(&joint);
        let bn = bottleneck_identities_of(&joint, &map)?;
        let trial_worst = res
            .residual_error
            .max(bn.cmi_identity_error)
            .max(bn.combined_identity_error);
        let prev_worst = max_residual.max(max_cmi).max(max_combined);
        if trial_worst > prev_worst {
            worst_case = (trial, rows, cols, outs);
        }
        max_residual = max_residual.max(res.residual_error);
        max_cmi = max_cmi.max(bn.cmi_identity_error);
        max_combined = max_combined.max(bn.combined_identity_error);
    }

    let grid = probability_grid(closed_form_points)?;
    let (closed_form_max_error, w_spread_max) = closed_form_check(255, &[0, 100, 255], &grid)?;

    let mut linearity = Vec::new();
    for k in [8u32, 10, 12, 14, 16] {
        let n = (1u32 << k) - 1;
        linearity.push((n, linearity_deviation(n, &grid)?));
    }
    let linearity_strictly_decreasing = linearity.windows(2).all(|w| w[1].1 < w[0].1);

    Ok(IdentitySuiteReport {
        trials,
        seed,
        closed_form_points,
        max_residual_identity_error: max_residual,
        max_cmi_identity_error: max_cmi,
        max_combined_identity_error: max_combined,
        worst_case,
        closed_form_max_error,
        w_spread_max,
        linearity,
        linearity_strictly_decreasing,
    })
}

/// Enumerates the switch model at every grid p for each given w and compares
/// H(x|x_p) against the closed form. Returns the worst |enumerated − closed|
/// and the worst spread across w values at equal p (which must vanish: the
/// entropies cannot depend on which wrong symbol w is).
pub fn closed_form_check(n: u32, ws: &[u32], grid: &[f64]) -> Result<(f64, f64)> {
    if ws.is_empty() {
        return Err(Error::invalid("need at least one w value"));
    }
    let prior = Pmf::uniform(n as usize + 1, 0)?;
    let mut max_err = 0.0_f64;
    let mut max_spread = 0.0_f64;
    for &p in grid {
        let closed = closed_form_cond_entropy(n, p)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &w in ws {
            let channel = switch_channel(&SwitchSpec { n_max: n, p, w })?;
            let joint = Joint2::from_channel(&prior, &channel)?;
            let enumerated = joint.conditional_entropy_row_given_col();
            max_err = max_err.max((enumerated - closed).abs());
            lo = lo.min(enumerated);
            hi = hi.max(enumerated);
        }
        max_spread = max_spread.max(hi - lo);
    }
    Ok((max_err, max_spread))
}
