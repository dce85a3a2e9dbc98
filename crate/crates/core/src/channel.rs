//! Prediction-channel models: the switch-error predictor, the discretized
//! additive-Gaussian predictor, their mixture, and the uniform quantizer
//! bottleneck.

use std::f64::consts::SQRT_2;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::map::DeterministicMap;
use crate::math::{compensated_sum, erf_odd, NORMALIZATION_TOLERANCE};
use crate::pmf::Alphabet;

/// How a Gaussian row treats noise mass that falls outside the pixel range.
///
/// `Clip` accumulates the overflow onto the first and last column, matching
/// saturating pixel arithmetic; `Renormalize` rescales the in-range mass to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    #[default]
    Clip,
    Renormalize,
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clip" => Ok(BoundaryMode::Clip),
            "renormalize" => Ok(BoundaryMode::Renormalize),
            other => Err(Error::invalid(format!(
                "unknown boundary mode {other:?}; expected \"clip\" or \"renormalize\""
            ))),
        }
    }
}

impl std::fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryMode::Clip => "clip",
            BoundaryMode::Renormalize => "renormalize",
        })
    }
}

/// Switch-error predictor: the prediction equals the source pixel with
/// probability 1 − p and a fixed wrong reference value `w` with probability p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchSpec {
    /// Alphabet maximum; pixels live in `{0 ..= n_max}`.
    pub n_max: u32,
    /// Probability of predicting from the wrong reference.
    pub p: f64,
    /// The wrong-reference pixel value.
    pub w: u32,
}

impl SwitchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("alphabet maximum must be at least 1"));
        }
        if !self.p.is_finite() || !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!(
                "error probability {} is outside [0, 1]",
                self.p
            )));
        }
        if self.w > self.n_max {
            return Err(Error::invalid(format!(
                "wrong-reference value {} is outside {{0 ..= {}}}",
                self.w, self.n_max
            )));
        }
        Ok(())
    }
}

/// Additive-Gaussian predictor: the prediction is the source pixel plus
/// zero-mean noise of standard deviation `sigma_p`, integrated over unit bins
/// and discretized onto the pixel alphabet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpec {
    pub n_max: u32,
    /// Noise standard deviation in pixel-value units; 0 means a noiseless
    /// identity channel.
    pub sigma_p: f64,
    pub boundary_mode: BoundaryMode,
}

impl GaussianSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("alphabet maximum must be at least 1"));
        }
        if !self.sigma_p.is_finite() || self.sigma_p < 0.0 {
            return Err(Error::invalid(format!(
                "noise standard deviation {} must be finite and >= 0",
                self.sigma_p
            )));
        }
        Ok(())
    }
}

/// Uniform quantizer acting on an 8-bit pixel alphabet, keeping the top
/// `output_bits` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizerSpec {
    /// Output width in bits, between 1 and 8.
    pub output_bits: u8,
}

impl QuantizerSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.output_bits) {
            return Err(Error::invalid(format!(
                "quantizer output width {} bits is outside 1..=8",
                self.output_bits
            )));
        }
        Ok(())
    }
}

/// A conditional distribution P(prediction | source) as a dense row-stochastic
/// matrix plus its alphabet metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    input: Alphabet,
    output: Alphabet,
    /// Row-major `input.len() × output.len()` transition probabilities.
    rows: Vec<f64>,
}

impl ChannelModel {
    /// Builds a channel from raw rows, validating non-negativity and that
    /// every row sums to 1 within [`NORMALIZATION_TOLERANCE`].
    pub fn from_rows(input: Alphabet, output: Alphabet, rows: Vec<f64>) -> Result<Self> {
        if rows.len() != input.len() * output.len() {
            return Err(Error::invalid(format!(
                "channel matrix has {} entries, expected {}x{}",
                rows.len(),
                input.len(),
                output.len()
            )));
        }
        for (k, &v) in rows.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "channel entry at flat index {k} is {v}, expected a finite value >= 0"
                )));
            }
        }
        for i in 0..input.len() {
            let row = &rows[i * output.len()..(i + 1) * output.len()];
            let total = compensated_sum(row.iter().copied());
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::invalid(format!(
                    "channel row {i} sums to {total:.17}, more than \
                     {NORMALIZATION_TOLERANCE:.0e} away from 1"
                )));
            }
        }
        Ok(ChannelModel {
            input,
            output,
            rows,
        })
    }

    pub fn input(&self) -> Alphabet {
        self.input
    }

    pub fn output(&self) -> Alphabet {
        self.output
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.output.len()..(i + 1) * self.output.len()]
    }

    pub fn prob(&self, input_index: usize, output_index: usize) -> f64 {
        self.rows[input_index * self.output.len() + output_index]
    }
}

/// Builds the switch-error channel: row i carries mass 1 − p at column i and
/// mass p at column w (summed when i = w).
pub fn switch_channel(spec: &SwitchSpec) -> Result<ChannelModel> {
    spec.validate()?;
    let alphabet = Alphabet::pixel(spec.n_max)?;
    let rows = switch_rows(alphabet.len(), spec.p, spec.w as usize);
    ChannelModel::from_rows(alphabet, alphabet, rows)
}

fn switch_rows(size: usize, p: f64, w: usize) -> Vec<f64> {
    let mut rows = vec![0.0; size * size];
    for i in 0..size {
        let row = &mut rows[i * size..(i + 1) * size];
        row[i] += 1.0 - p;
        row[w] += p;
    }
    rows
}

/// Builds the discretized additive-Gaussian channel. Row i gives column j the
/// Gaussian measure of the unit bin [j − i − 0.5, j − i + 0.5]; out-of-range
/// mass is folded per the configured boundary mode. `sigma_p = 0` yields the
/// identity channel.
pub fn gaussian_channel(spec: &GaussianSpec) -> Result<ChannelModel> {
    spec.validate()?;
    let alphabet = Alphabet::pixel(spec.n_max)?;
    let rows = gaussian_rows(alphabet.len(), spec.sigma_p, spec.boundary_mode);
    ChannelModel::from_rows(alphabet, alphabet, rows)
}

fn gaussian_rows(size: usize, sigma: f64, mode: BoundaryMode) -> Vec<f64> {
    let mut rows = vec![0.0; size * size];
    if sigma == 0.0 {
        for i in 0..size {
            rows[i * size + i] = 1.0;
        }
        return rows;
    }
    let scale = sigma * SQRT_2;
    for i in 0..size {
        let row = &mut rows[i * size..(i + 1) * size];
        // erf at the bin boundary between columns j and j+1, i.e. at offset
        // j − i + 0.5 from the row center. erf_odd keeps mirrored boundaries
        // bit-identical, so interior rows are exactly symmetric.
        let edge = |j: usize| erf_odd((j as f64 - i as f64 + 0.5) / scale);
        match mode {
            BoundaryMode::Clip => {
                // First and last bins absorb the tails: the sum telescopes to
                // 1 up to rounding, so no probability is leaked or invented.
                row[0] = 0.5 * (1.0 + edge(0));
                for (j, slot) in row.iter_mut().enumerate().take(size - 1).skip(1) {
                    *slot = 0.5 * (edge(j) - edge(j - 1));
                }
                row[size - 1] = 0.5 * (1.0 - edge(size - 2));
            }
            BoundaryMode::Renormalize => {
                let low = erf_odd((0.0 - i as f64 - 0.5) / scale);
                row[0] = 0.5 * (edge(0) - low);
                for (j, slot) in row.iter_mut().enumerate().skip(1) {
                    *slot = 0.5 * (edge(j) - edge(j - 1));
                }
                let total = compensated_sum(row.iter().copied());
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
        }
    }
    rows
}

/// Builds the mixture channel of a switch error and additive Gaussian noise:
/// row i = p·(point mass at w) + (1 − p)·(Gaussian row centered at i). The
/// noise perturbs only the correctly referenced branch; the wrong-reference
/// branch stays a point mass at w.
///
/// Degenerates bit-for-bit to [`switch_channel`] when `sigma_p = 0` and to
/// [`gaussian_channel`] when `p = 0`.
pub fn mixture_channel(switch: &SwitchSpec, noise: &GaussianSpec) -> Result<ChannelModel> {
    switch.validate()?;
    noise.validate()?;
    if switch.n_max != noise.n_max {
        return Err(Error::mismatch(format!(
            "switch alphabet maximum {} differs from noise alphabet maximum {}",
            switch.n_max, noise.n_max
        )));
    }
    if noise.sigma_p == 0.0 {
        return switch_channel(switch);
    }
    let alphabet = Alphabet::pixel(switch.n_max)?;
    let size = alphabet.len();
    let mut rows = gaussian_rows(size, noise.sigma_p, noise.boundary_mode);
    let keep = 1.0 - switch.p;
    for i in 0..size {
        let row = &mut rows[i * size..(i + 1) * size];
        for v in row.iter_mut() {
            *v *= keep;
        }
        row[switch.w as usize] += switch.p;
    }
    ChannelModel::from_rows(alphabet, alphabet, rows)
}

/// Builds the b-bit uniform quantizer on the 8-bit pixel alphabet:
/// v ↦ ⌊v / 2^(8−b)⌋, output alphabet `{0 ..= 2^b − 1}`.
pub fn uniform_quantizer(spec: &QuantizerSpec) -> Result<DeterministicMap> {
    spec.validate()?;
    let shift = 8 - spec.output_bits as u32;
    let input = Alphabet::pixel(255)?;
    let output = Alphabet::new(0, 1usize << spec.output_bits)?;
    let table = (0..input.len()).map(|v| v >> shift).collect();
    DeterministicMap::new(input, output, table)
}
