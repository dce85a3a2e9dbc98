//! Parameter sweeps producing the curve families of the analysis — residual
//! entropy vs. ideal and bottlenecked conditional entropy — as CSV-ready
//! tables. Every row re-verifies the entropy identities before it is accepted.

use std::io::Write;
use std::path::Path;

use crate::channel::{
    mixture_channel, switch_channel, uniform_quantizer, BoundaryMode, GaussianSpec,
    QuantizerSpec, SwitchSpec,
};
use crate::error::{Error, Result};
use crate::identities::{bottleneck_identities_of, residual_identity_of, IDENTITY_TOLERANCE};
use crate::joint::Joint2;
use crate::map::DeterministicMap;
use crate::pmf::Pmf;

/// Which model parameter a sweep walks over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    /// Wrong-reference probability p of the switch model (noise held at 0).
    ErrorProbability,
    /// Noise standard deviation σ_p of the mixture model (p values fixed).
    NoiseSigma,
}

/// Full description of a sweep: the model family, the grid, and which
/// bottleneck widths to evaluate alongside the ideal conditional entropy.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Alphabet maximum; 255 reproduces the 8-bit pixel setup.
    pub n_max: u32,
    pub variable: SweepVariable,
    /// Strictly increasing grid of sweep values.
    pub grid: Vec<f64>,
    /// Fixed p values, one curve family each (noise sweeps only).
    pub fixed_p: Vec<f64>,
    /// Wrong-reference value.
    pub w: u32,
    /// Bottleneck output widths, evaluated in the given order.
    pub bottlenecks: Vec<u8>,
    pub boundary_mode: BoundaryMode,
}

impl SweepConfig {
    /// The default error-probability sweep: N=255, w=0, p from 0 to 1 in steps
    /// of 0.01, bottlenecks of 7 and 6 bits.
    pub fn default_p_sweep() -> Self {
        SweepConfig {
            n_max: 255,
            variable: SweepVariable::ErrorProbability,
            grid: (0..=100).map(|k| if k == 100 { 1.0 } else { k as f64 / 100.0 }).collect(),
            fixed_p: Vec::new(),
            w: 0,
            bottlenecks: vec![7, 6],
            boundary_mode: BoundaryMode::Clip,
        }
    }

    /// The default noise sweep: N=255, w=0, σ_p from 0 to 20 in steps of 0.5,
    /// fixed p ∈ {0, 0.1, 0.2, 0.4}, 7-bit bottleneck, clip boundary.
    pub fn default_sigma_sweep() -> Self {
        SweepConfig {
            n_max: 255,
            variable: SweepVariable::NoiseSigma,
            grid: (0..=40).map(|k| k as f64 * 0.5).collect(),
            fixed_p: vec![0.0, 0.1, 0.2, 0.4],
            w: 0,
            bottlenecks: vec![7],
            boundary_mode: BoundaryMode::Clip,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("alphabet maximum must be at least 1"));
        }
        if self.grid.is_empty() {
            return Err(Error::invalid("sweep grid must not be empty"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sweep grid must be strictly increasing"));
        }
        let domain_ok = |v: f64| match self.variable {
            SweepVariable::ErrorProbability => (0.0..=1.0).contains(&v),
            SweepVariable::NoiseSigma => v >= 0.0,
        };
        if let Some(&bad) = self.grid.iter().find(|&&v| !v.is_finite() || !domain_ok(v)) {
            return Err(Error::invalid(format!(
                "grid value {bad} is outside the sweep variable's domain"
            )));
        }
        if self.w > self.n_max {
            return Err(Error::invalid(format!(
                "wrong-reference value {} is outside {{0 ..= {}}}",
                self.w, self.n_max
            )));
        }
        for &b in &self.bottlenecks {
            QuantizerSpec { output_bits: b }.validate()?;
        }
        if !self.bottlenecks.is_empty() && self.n_max != 255 {
            return Err(Error::invalid(
                "quantizer bottlenecks act on the 8-bit pixel alphabet; they require an \
                 alphabet maximum of 255",
            ));
        }
        match self.variable {
            SweepVariable::ErrorProbability => {
                if !self.fixed_p.is_empty() {
                    return Err(Error::invalid(
                        "an error-probability sweep takes no fixed p values",
                    ));
                }
            }
            SweepVariable::NoiseSigma => {
                if self.fixed_p.is_empty() {
                    return Err(Error::invalid("a noise sweep needs at least one fixed p"));
                }
                if let Some(&bad) = self
                    .fixed_p
                    .iter()
                    .find(|&&p| !p.is_finite() || !(0.0..=1.0).contains(&p))
                {
                    return Err(Error::invalid(format!(
                        "fixed error probability {bad} is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An ordered table of sweep results. `columns` names every field of a row,
/// key columns first; rows appear in grid order (outer: fixed p, inner: grid)
/// and hold entropies in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub variable: SweepVariable,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn entropy_columns(bottlenecks: &[u8]) -> Vec<String> {
    let mut cols = vec!["h_residual".to_string(), "h_cond".to_string()];
    cols.extend(bottlenecks.iter().map(|b| format!("h_cond_{b}")));
    cols
}

/// Computes one table row from a joint: H(r), H(x|x_p), then H(x|x̃_p) per
/// bottleneck — re-verifying the residual and bottleneck identities on the
/// way and refusing to emit a row that violates them.
fn entropy_row(
    joint: &Joint2,
    quantizers: &[DeterministicMap],
    context: &str,
) -> Result<Vec<f64>> {
    let identity = residual_identity_of(joint);
    if identity.residual_error >= IDENTITY_TOLERANCE {
        return Err(Error::IdentityViolation {
            context: format!("{context}: residual-coding identity"),
            residual: identity.residual_error,
            tolerance: IDENTITY_TOLERANCE,
        });
    }
    let mut row = vec![identity.h_residual, identity.h_conditional];
    for (q, spec_bits) in quantizers.iter().zip(
        // for error context only
        quantizers.iter().map(|q| q.output().len().trailing_zeros()),
    ) {
        let report = bottleneck_identities_of(joint, q)?;
        if report.cmi_identity_error >= IDENTITY_TOLERANCE
            || report.combined_identity_error >= IDENTITY_TOLERANCE
        {
            return Err(Error::IdentityViolation {
                context: format!("{context}: bottleneck identity at {spec_bits} bits"),
                residual: report
                    .cmi_identity_error
                    .max(report.combined_identity_error),
                tolerance: IDENTITY_TOLERANCE,
            });
        }
        row.push(report.h_cond_tilde);
    }
    Ok(row)
}

fn quantizer_maps(bottlenecks: &[u8]) -> Result<Vec<DeterministicMap>> {
    bottlenecks
        .iter()
        .map(|&b| uniform_quantizer(&QuantizerSpec { output_bits: b }))
        .collect()
}

/// Sweeps the switch model over the error probability p. Output columns:
/// `p, h_residual, h_cond[, h_cond_b…]`.
pub fn sweep_p(config: &SweepConfig) -> Result<CurveTable> {
    config.validate()?;
    if config.variable != SweepVariable::ErrorProbability {
        return Err(Error::invalid(
            "sweep_p requires the error-probability sweep variable",
        ));
    }
    let prior = Pmf::uniform(config.n_max as usize + 1, 0)?;
    let quantizers = quantizer_maps(&config.bottlenecks)?;
    let mut columns = vec!["p".to_string()];
    columns.extend(entropy_columns(&config.bottlenecks));
    let mut rows = Vec::with_capacity(config.grid.len());
    for &p in &config.grid {
        let channel = switch_channel(&SwitchSpec {
            n_max: config.n_max,
            p,
            w: config.w,
        })?;
        let joint = Joint2::from_channel(&prior, &channel)?;
        let mut row = vec![p];
        row.extend(entropy_row(&joint, &quantizers, &format!("p={p}"))?);
        rows.push(row);
    }
    Ok(CurveTable {
        variable: SweepVariable::ErrorProbability,
        columns,
        rows,
    })
}

/// Sweeps the mixture model over the noise level σ_p for each fixed p, in
/// long format. Output columns: `p, sigma_p, h_residual, h_cond[, h_cond_b…]`.
pub fn sweep_sigma(config: &SweepConfig) -> Result<CurveTable> {
    config.validate()?;
    if config.variable != SweepVariable::NoiseSigma {
        return Err(Error::invalid("sweep_sigma requires the noise sweep variable"));
    }
    let prior = Pmf::uniform(config.n_max as usize + 1, 0)?;
    let quantizers = quantizer_maps(&config.bottlenecks)?;
    let mut columns = vec!["p".to_string(), "sigma_p".to_string()];
    columns.extend(entropy_columns(&config.bottlenecks));
    let mut rows = Vec::with_capacity(config.fixed_p.len() * config.grid.len());
    for &p in &config.fixed_p {
        for &sigma in &config.grid {
            let channel = mixture_channel(
                &SwitchSpec {
                    n_max: config.n_max,
                    p,
                    w: config.w,
                },
                &GaussianSpec {
                    n_max: config.n_max,
                    sigma_p: sigma,
                    boundary_mode: config.boundary_mode,
                },
            )?;
            let joint = Joint2::from_channel(&prior, &channel)?;
            let mut row = vec![p, sigma];
            row.extend(entropy_row(
                &joint,
                &quantizers,
                &format!("p={p}, sigma_p={sigma}"),
            )?);
            rows.push(row);
        }
    }
    Ok(CurveTable {
        variable: SweepVariable::NoiseSigma,
        columns,
        rows,
    })
}

/// Writes a table as CSV: UTF-8, LF line endings, comma separator, header row,
/// all values with 9 decimal digits.
pub fn write_csv<W: Write>(table: &CurveTable, mut dest: W) -> std::io::Result<()> {
    writeln!(dest, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let mut line = String::with_capacity(row.len() * 12);
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.9}"));
        }
        writeln!(dest, "{line}")?;
    }
    Ok(())
}

/// [`write_csv`] to a filesystem path, annotating I/O failures with the path.
pub fn write_csv_path(table: &CurveTable, path: &Path) -> Result<()> {
    let annotate = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(annotate)?;
    let mut writer = std::io::BufWriter::new(file);
    write_csv(table, &mut writer).map_err(annotate)?;
    writer.into_inner().map_err(|e| annotate(e.into_error()))?;
    Ok(())
}
