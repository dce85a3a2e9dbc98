//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building models or running experiments.
///
/// The variants are coarse on purpose: callers (in particular the CLI) route
/// on the *kind* of failure — bad caller input, incompatible alphabets, broken
/// numeric identity, I/O, or a malformed image file — not on individual cases.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain (negative sigma,
    /// probability outside [0,1], empty grid, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two values that must live on the same alphabet do not.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// An entropy identity that must hold analytically exceeded its numeric
    /// tolerance. Carries everything needed to reproduce the offending case.
    #[error("identity violation in {context}: residual {residual:.3e} exceeds {tolerance:.0e}")]
    IdentityViolation {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    /// Filesystem failure, annotated with the path that caused it.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A PGM input did not match the P5 format; names the offending field.
    #[error("{source_name}: invalid PGM {field}: {message}")]
    PgmFormat {
        source_name: String,
        field: &'static str,
        message: String,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::AlphabetMismatch(msg.into())
    }
}
