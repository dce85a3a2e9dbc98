//! Exact finite-alphabet information engine for comparing conditional and
//! residual interframe coding.
//!
//! The central question: when a frame pixel `x` is coded from a prediction
//! `x_p`, how does the entropy of the residual `r = x - x_p` relate to the
//! conditional entropy `H(x | x_p)` an ideal conditional coder would pay?
//! Everything here is exact discrete probability — joint distributions are
//! enumerated, entropies are compensated sums, and every derived identity is
//! re-verified numerically rather than assumed:
//!
//! * `H(r) = H(x | x_p) + I(x_p; r)` — residual coding pays exactly the
//!   mutual information between prediction and residual on top of the
//!   conditional-coding rate.
//! * Passing the prediction through a deterministic bottleneck `x̃_p = f(x_p)`
//!   can only lose: `H(x | x_p) = H(x | x̃_p) - I(x; x_p | x̃_p)`.
//!
//! Modules:
//!
//! * [`pmf`] — alphabets with signed offsets, validated probability vectors.
//! * [`joint`] — dense two-variable joints: marginals, conditional entropies,
//!   mutual information, residual distributions, deterministic relabelings.
//! * [`channel`] — the prediction models: a switch that picks a wrong
//!   reference with probability `p`, a discretized Gaussian noise channel,
//!   and their mixture; plus uniform scalar quantizers as bottleneck maps.
//! * [`identities`] — identity verification reports, the closed-form
//!   conditional entropy of the switch model, and randomized self-test
//!   suites.
//! * [`sweep`] — parameter sweeps producing CSV curve tables.
//! * [`mc`] — Monte Carlo sampling cross-checks of the exact engine.
//! * [`image`] — binary PGM I/O and empirical mutual information between a
//!   prediction image and its signed residual.
//! * [`math`] — compensated summation and entropy primitives.

pub mod channel;
pub mod error;
pub mod identities;
pub mod image;
pub mod joint;
pub mod map;
pub mod math;
pub mod mc;
pub mod pmf;
pub mod sweep;

pub use channel::{
    gaussian_channel, mixture_channel, switch_channel, uniform_quantizer, BoundaryMode,
    ChannelModel, GaussianSpec, QuantizerSpec, SwitchSpec,
};
pub use error::{Error, Result};
pub use identities::{
    closed_form_check, closed_form_cond_entropy, linearity_deviation, probability_grid,
    run_identity_suite, run_identity_suite_with_grid, verify_bottleneck,
    verify_residual_identity, BottleneckReport, IdentitySuiteReport, ResidualIdentityReport,
    DEFAULT_CLOSED_FORM_GRID, IDENTITY_TOLERANCE,
};
pub use image::{
    empirical_mi, empirical_mi_binned, load_pgm, mi_from_pred_residual_pairs, parse_pgm,
    GrayImage, MiEstimate,
};
pub use joint::{Joint2, MI_NEGATIVE_CLAMP};
pub use map::DeterministicMap;
pub use math::{compensated_sum, entropy_bits, NORMALIZATION_TOLERANCE, ZERO_PROB_CUTOFF};
pub use mc::{monte_carlo_check, sample_joint, McEstimate};
pub use pmf::{Alphabet, Pmf};
pub use sweep::{sweep_p, sweep_sigma, write_csv, write_csv_path, CurveTable, SweepConfig, SweepVariable};
