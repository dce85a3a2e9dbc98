//! Joint distributions over two finite alphabets and the entropy functionals
//! defined on them.

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::map::DeterministicMap;
use crate::math::{compensated_sum, entropy_bits, NORMALIZATION_TOLERANCE};
use crate::pmf::{Alphabet, Pmf};

/// When a mutual-information (or conditional MI) value computed by subtraction
/// lands this close below zero, it is floating-point cancellation noise and is
/// reported as exactly 0.
pub const MI_NEGATIVE_CLAMP: f64 = 1e-12;

/// A dense joint distribution P(row symbol, column symbol).
///
/// The variable labels ("x", "x_p", "r", ...) travel with the value so that
/// derived joints and error messages stay self-describing.
#[derive(Clone, Debug, PartialEq)]
pub struct Joint2 {
    row: Alphabet,
    col: Alphabet,
    row_label: String,
    col_label: String,
    /// Row-major `row.len() × col.len()` probabilities.
    probs: Vec<f64>,
}

impl Joint2 {
    /// Builds a joint from raw entries, validating non-negativity and total
    /// mass 1 within [`NORMALIZATION_TOLERANCE`].
    pub fn new(
        row: Alphabet,
        col: Alphabet,
        row_label: impl Into<String>,
        col_label: impl Into<String>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if probs.len() != row.len() * col.len() {
            return Err(Error::invalid(format!(
                "joint has {} entries, expected {}x{}",
                probs.len(),
                row.len(),
                col.len()
            )));
        }
        for (k, &v) in probs.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "joint entry at flat index {k} is {v}, expected a finite value >= 0"
                )));
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(format!(
                "joint sums to {total:.17}, more than {NORMALIZATION_TOLERANCE:.0e} away from 1"
            )));
        }
        Ok(Joint2 {
            row,
            col,
            row_label: row_label.into(),
            col_label: col_label.into(),
            probs,
        })
    }

    /// Couples a prior on the row variable with a channel giving the column
    /// variable: entry(i, j) = prior(i) · channel(j | i). Labels default to
    /// the source/prediction reading ("x", "x_p").
    pub fn from_channel(prior: &Pmf, channel: &ChannelModel) -> Result<Self> {
        if prior.alphabet() != channel.input() {
            return Err(Error::mismatch(format!(
                "prior alphabet {:?} does not match channel input {:?}",
                prior.alphabet(),
                channel.input()
            )));
        }
        let rows = prior.alphabet().len();
        let cols = channel.output().len();
        let mut probs = vec![0.0; rows * cols];
        for i in 0..rows {
            let pi = prior.prob(i);
            let ch_row = channel.row(i);
            let out = &mut probs[i * cols..(i + 1) * cols];
            for (o, &c) in out.iter_mut().zip(ch_row) {
                *o = pi * c;
            }
        }
        Ok(Joint2 {
            row: prior.alphabet(),
            col: channel.output(),
            row_label: "x".into(),
            col_label: "x_p".into(),
            probs,
        })
    }

    /// Replaces the variable labels (the distribution itself is unchanged).
    pub fn with_labels(
        mut self,
        row_label: impl Into<String>,
        col_label: impl Into<String>,
    ) -> Self {
        self.row_label = row_label.into();
        self.col_label = col_label.into();
        self
    }

    pub fn row_alphabet(&self) -> Alphabet {
        self.row
    }

    pub fn col_alphabet(&self) -> Alphabet {
        self.col
    }

    pub fn row_label(&self) -> &str {
        &self.row_label
    }

    pub fn col_label(&self) -> &str {
        &self.col_label
    }

    pub fn prob(&self, row_index: usize, col_index: usize) -> f64 {
        self.probs[row_index * self.col.len() + col_index]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn row_slice(&self, i: usize) -> &[f64] {
        &self.probs[i * self.col.len()..(i + 1) * self.col.len()]
    }

    /// Marginal distribution of the row variable.
    pub fn marginal_row(&self) -> Pmf {
        let sums = (0..self.row.len())
            .map(|i| compensated_sum(self.row_slice(i).iter().copied()))
            .collect();
        Pmf::from_raw(self.row, sums)
    }

    /// Marginal distribution of the column variable.
    pub fn marginal_col(&self) -> Pmf {
        let cols = self.col.len();
        let mut sums = vec![0.0; cols];
        let mut comp = vec![0.0; cols];
        for i in 0..self.row.len() {
            for (j, &v) in self.row_slice(i).iter().enumerate() {
                let t = sums[j] + v;
                if sums[j].abs() >= v.abs() {
                    comp[j] += (sums[j] - t) + v;
                } else {
                    comp[j] += (v - t) + sums[j];
                }
                sums[j] = t;
            }
        }
        for (s, c) in sums.iter_mut().zip(&comp) {
            *s += c;
        }
        Pmf::from_raw(self.col, sums)
    }

    /// Entropy of the flattened joint distribution, in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(self.probs.iter().copied())
    }

    /// H(row | col) = H(joint) − H(col marginal); non-negative.
    pub fn conditional_entropy_row_given_col(&self) -> f64 {
        let h = self.entropy() - self.marginal_col().entropy();
        if h < 0.0 && h > -MI_NEGATIVE_CLAMP {
            0.0
        } else {
            h
        }
    }

    /// H(col | row), the transposed conditional.
    pub fn conditional_entropy_col_given_row(&self) -> f64 {
        let h = self.entropy() - self.marginal_row().entropy();
        if h < 0.0 && h > -MI_NEGATIVE_CLAMP {
            0.0
        } else {
            h
        }
    }

    /// Mutual information I(row; col) = H(row) + H(col) − H(joint), in bits.
    /// Cancellation noise below [`MI_NEGATIVE_CLAMP`] is reported as 0.
    pub fn mutual_information(&self) -> f64 {
        let i = self.marginal_row().entropy() + self.marginal_col().entropy() - self.entropy();
        if i < 0.0 && i > -MI_NEGATIVE_CLAMP {
            0.0
        } else {
            i
        }
    }

    /// Pushes the column variable through a deterministic map, summing the
    /// probabilities of columns that collapse onto the same output symbol.
    /// The row marginal is untouched.
    pub fn apply_map_to_col(&self, f: &DeterministicMap) -> Result<Joint2> {
        if f.input() != self.col {
            return Err(Error::mismatch(format!(
                "map input alphabet {:?} does not match column alphabet {:?} of ({}, {})",
                f.input(),
                self.col,
                self.row_label,
                self.col_label
            )));
        }
        let out_cols = f.output().len();
        let mut probs = vec![0.0; self.row.len() * out_cols];
        for i in 0..self.row.len() {
            let out = &mut probs[i * out_cols..(i + 1) * out_cols];
            for (j, &v) in self.row_slice(i).iter().enumerate() {
                out[f.map_index(j)] += v;
            }
        }
        Ok(Joint2 {
            row: self.row,
            col: f.output(),
            row_label: self.row_label.clone(),
            col_label: format!("f({})", self.col_label),
            probs,
        })
    }

    /// Rewrites a joint over (x, x_p) into the joint over (r, x_p) with
    /// r = x − x_p. The residual alphabet spans every achievable difference,
    /// `[row_min − col_max, row_max − col_min]`; total mass is preserved.
    pub fn residual_joint(&self) -> Joint2 {
        let r_offset = self.row.offset() - self.col.max_symbol();
        let r_len = self.row.len() + self.col.len() - 1;
        let cols = self.col.len();
        let mut probs = vec![0.0; r_len * cols];
        for i in 0..self.row.len() {
            let x = self.row.symbol(i);
            for (j, &v) in self.row_slice(i).iter().enumerate() {
                let r = x - self.col.symbol(j);
                let ri = (r - r_offset) as usize;
                probs[ri * cols + j] += v;
            }
        }
        Joint2 {
            row: Alphabet::new(r_offset, r_len).expect("residual alphabet is non-empty"),
            col: self.col,
            row_label: format!("{}-{}", self.row_label, self.col_label),
            col_label: self.col_label.clone(),
            probs,
        }
    }

    /// I(row; col | f(col)), computed as H(row | f(col)) − H(row | col).
    ///
    /// The subtraction form is exact here because f(col) is a deterministic
    /// function of col, so conditioning on (col, f(col)) equals conditioning
    /// on col alone. Cancellation noise is clamped to 0.
    pub fn conditional_mutual_information_via_map(&self, f: &DeterministicMap) -> Result<f64> {
        let mapped = self.apply_map_to_col(f)?;
        let cmi = mapped.conditional_entropy_row_given_col()
            - self.conditional_entropy_row_given_col();
        Ok(if cmi < 0.0 && cmi > -MI_NEGATIVE_CLAMP {
            0.0
        } else {
            cmi
        })
    }
}
