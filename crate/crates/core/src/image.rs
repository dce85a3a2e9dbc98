//! Grayscale image I/O (binary PGM) and empirical mutual information between
//! a prediction and the signed residual it leaves behind.

use std::path::Path;

use crate::error::{Error, Result};
use crate::math::entropy_bits;

/// An 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer holds {} bytes, expected {}x{} = {}",
                pixels.len(),
                width,
                height,
                width * height
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// Incremental ASCII-header scanner for PGM: skips whitespace and `#` comment
/// lines between tokens.
struct HeaderScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
    source_name: &'a str,
}

impl<'a> HeaderScanner<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self, field: &'static str) -> Result<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            if self.bytes[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::PgmFormat {
                source_name: self.source_name.to_string(),
                field,
                message: "header ended before the field".to_string(),
            });
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u64> {
        let raw = self.token(field)?;
        std::str::from_utf8(raw)
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| Error::PgmFormat {
                source_name: self.source_name.to_string(),
                field,
                message: format!("not a decimal integer: {:?}", String::from_utf8_lossy(raw)),
            })
    }
}

/// Parses a binary (P5) PGM with `maxval` 255. `source_name` labels errors,
/// typically with the originating path.
pub fn parse_pgm(bytes: &[u8], source_name: &str) -> Result<GrayImage> {
    let fail = |field: &'static str, message: String| Error::PgmFormat {
        source_name: source_name.to_string(),
        field,
        message,
    };
    let mut scanner = HeaderScanner {
        bytes,
        pos: 0,
        source_name,
    };
    let magic = scanner.token("magic")?;
    if magic != b"P5" {
        return Err(fail(
            "magic",
            format!(
                "expected binary PGM signature P5, found {:?}",
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let width = scanner.number("width")?;
    let height = scanner.number("height")?;
    let maxval = scanner.number("maxval")?;
    if width == 0 || width > 1 << 16 {
        return Err(fail("width", format!("{width} is outside 1..=65536")));
    }
    if height == 0 || height > 1 << 16 {
        return Err(fail("height", format!("{height} is outside 1..=65536")));
    }
    if maxval != 255 {
        return Err(fail(
            "maxval",
            format!("only 8-bit images (maxval 255) are supported, found {maxval}"),
        ));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if scanner.pos >= bytes.len() || !bytes[scanner.pos].is_ascii_whitespace() {
        return Err(fail(
            "payload",
            "missing whitespace separator after maxval".to_string(),
        ));
    }
    let payload = &bytes[scanner.pos + 1..];
    let expected = (width * height) as usize;
    if payload.len() < expected {
        return Err(fail(
            "payload",
            format!("holds {} bytes, expected {expected}", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(fail(
            "payload",
            format!("holds {} trailing bytes beyond the raster", payload.len() - expected),
        ));
    }
    GrayImage::new(width as usize, height as usize, payload.to_vec())
}

/// Loads a binary PGM from disk.
pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pgm(&bytes, &path.display().to_string())
}

/// Empirical information quantities of a (prediction, residual) sample.
#[derive(Clone, Copy, Debug)]
pub struct MiEstimate {
    /// Plug-in mutual information I(x_p; r) in bits.
    pub mi: f64,
    /// Plug-in entropy of the prediction H(x_p).
    pub h_pred: f64,
    /// Plug-in entropy of the signed residual H(r).
    pub h_resid: f64,
    /// Number of pixel pairs counted.
    pub samples: u64,
}

const PRED_BINS: usize = 256;
const RESID_BINS: usize = 511; // signed residuals span -255 ..= 255

fn histogram_mi(counts: &[u64], pred_bins: usize, resid_bins: usize, total: u64) -> MiEstimate {
    let n = total as f64;
    let mut pred_counts = vec![0u64; pred_bins];
    let mut resid_counts = vec![0u64; resid_bins];
    for (cell, &c) in counts.iter().enumerate() {
        pred_counts[cell / resid_bins] += c;
        resid_counts[cell % resid_bins] += c;
    }
    let plugin = |cs: &[u64]| entropy_bits(cs.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n));
    let h_pred = plugin(&pred_counts);
    let h_resid = plugin(&resid_counts);
    let h_joint = plugin(counts);
    let mut mi = h_pred + h_resid - h_joint;
    if mi < 0.0 && mi > -crate::joint::MI_NEGATIVE_CLAMP {
        mi = 0.0;
    }
    MiEstimate {
        mi,
        h_pred,
        h_resid,
        samples: total,
    }
}

/// Plug-in mutual information of explicit (prediction, signed residual)
/// pairs: predictions in 0..=255, residuals in -255..=255, counted into a
/// dense 256x511 joint histogram.
pub fn mi_from_pred_residual_pairs<I>(pairs: I) -> Result<MiEstimate>
where
    I: IntoIterator<Item = (u8, i16)>,
{
    let mut counts = vec![0u64; PRED_BINS * RESID_BINS];
    let mut total = 0u64;
    for (pred, resid) in pairs {
        if !(-255..=255).contains(&resid) {
            return Err(Error::invalid(format!(
                "signed residual {resid} is outside -255..=255"
            )));
        }
        counts[pred as usize * RESID_BINS + (resid + 255) as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::invalid("no pixel pairs to estimate from"));
    }
    Ok(histogram_mi(&counts, PRED_BINS, RESID_BINS, total))
}

/// Estimates I(x_p; r) between a prediction image and the signed residual
/// r = x − x_p it leaves against the original. Both images must share
/// dimensions; every pixel contributes one sample.
pub fn empirical_mi(original: &GrayImage, prediction: &GrayImage) -> Result<MiEstimate> {
    empirical_mi_binned(original, prediction, 1)
}

/// [`empirical_mi`] with coarser histogram bins: predictions fall into bins
/// of `bin_width` values, residuals likewise (offset so that bins align at
/// -255). `bin_width` 1 is the exact per-value histogram.
pub fn empirical_mi_binned(
    original: &GrayImage,
    prediction: &GrayImage,
    bin_width: u32,
) -> Result<MiEstimate> {
    if bin_width == 0 {
        return Err(Error::invalid("bin width must be at least 1"));
    }
    if original.width() != prediction.width() || original.height() != prediction.height() {
        return Err(Error::invalid(format!(
            "image dimensions differ: original {}x{}, prediction {}x{}",
            original.width(),
            original.height(),
            prediction.width(),
            prediction.height()
        )));
    }
    let bw = bin_width as usize;
    let pred_bins = PRED_BINS.div_ceil(bw);
    let resid_bins = RESID_BINS.div_ceil(bw);
    let mut counts = vec![0u64; pred_bins * resid_bins];
    for (&x, &xp) in original.pixels().iter().zip(prediction.pixels()) {
        let resid = x as i32 - xp as i32; // signed residual, no modular wrap
        let pred_bin = xp as usize / bw;
        let resid_bin = (resid + 255) as usize / bw;
        counts[pred_bin * resid_bins + resid_bin] += 1;
    }
    let total = (original.width() * original.height()) as u64;
    Ok(histogram_mi(&counts, pred_bins, resid_bins, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm_bytes(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
        let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
        bytes.extend_from_slice(pixels);
        bytes
    }

    fn flat(width: usize, height: usize, value: u8) -> GrayImage {
        GrayImage::new(width, height, vec![value; width * height]).unwrap()
    }

    #[test]
    fn parses_minimal_pgm() {
        let img = parse_pgm(&pgm_bytes(3, 2, &[0, 1, 2, 3, 4, 5]), "mem").unwrap();
        assert_eq!(img.width(), 3);
        assert_eq!(img.height(), 2);
        assert_eq!(img.pixels(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn parses_comments_and_extra_whitespace() {
        let mut bytes = b"P5 # binary gray\n# another comment\n 2\t1 \n# before maxval\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let img = parse_pgm(&bytes, "mem").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[7, 9]);
    }

    #[test]
    fn payload_may_begin_with_whitespace_byte() {
        // The single separator after maxval is consumed; a first pixel that
        // happens to equal 0x20 or 0x0a must survive.
        let mut bytes = b"P5 2 1 255\n".to_vec();
        bytes.extend_from_slice(b"\n ");
        let img = parse_pgm(&bytes, "mem").unwrap();
        assert_eq!(img.pixels(), &[10, 32]);
    }

    #[test]
    fn rejects_malformed_headers() {
        let cases: Vec<(Vec<u8>, &str)> = vec![
            (b"P2\n2 1\n255\n99".to_vec(), "magic"),
            (b"P5\n2 1\n255".to_vec(), "payload"),
            (b"P5\n0 1\n255\n".to_vec(), "width"),
            (b"P5\n2 x\n255\n".to_vec(), "height"),
            (b"P5\n2 1\n65535\n".to_vec(), "maxval"),
        ];
        for (bytes, want_field) in cases {
            match parse_pgm(&bytes, "mem") {
                Err(Error::PgmFormat { field, source_name, .. }) => {
                    assert_eq!(field, want_field);
                    assert_eq!(source_name, "mem");
                }
                other => panic!("expected {want_field} error, got {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_wrong_payload_sizes() {
        let mut short = pgm_bytes(4, 4, &[0; 16]);
        short.truncate(short.len() - 1);
        assert!(matches!(
            parse_pgm(&short, "mem"),
            Err(Error::PgmFormat { field: "payload", .. })
        ));
        let mut long = pgm_bytes(4, 4, &[0; 16]);
        long.push(0);
        assert!(matches!(
            parse_pgm(&long, "mem"),
            Err(Error::PgmFormat { field: "payload", .. })
        ));
    }

    #[test]
    fn identical_images_give_zero_mi_and_zero_residual_entropy() {
        let mut pixels = Vec::with_capacity(64 * 64);
        for k in 0..64 * 64usize {
            pixels.push((k % 256) as u8);
        }
        let img = GrayImage::new(64, 64, pixels).unwrap();
        let est = empirical_mi(&img, &img).unwrap();
        assert_eq!(est.mi, 0.0);
        assert_eq!(est.h_resid, 0.0);
        assert!(est.h_pred > 7.9);
        assert_eq!(est.samples, 64 * 64);
    }

    #[test]
    fn constant_prediction_gives_zero_mi() {
        // H(x_p) = 0 forces I(x_p; r) = 0 no matter the residual.
        let mut pixels = vec![0u8; 32 * 32];
        for (k, p) in pixels.iter_mut().enumerate() {
            *p = (37 * k % 256) as u8;
        }
        let original = GrayImage::new(32, 32, pixels).unwrap();
        let prediction = flat(32, 32, 128);
        let est = empirical_mi(&original, &prediction).unwrap();
        assert_eq!(est.mi, 0.0);
        assert_eq!(est.h_pred, 0.0);
        assert!(est.h_resid > 0.0);
    }

    #[test]
    fn dependent_residual_gives_positive_mi() {
        // Deterministic residual given the prediction: r = +1 when x_p = 50,
        // r = -1 when x_p = 200, and the two predictions are equiprobable, so
        // I(x_p; r) = H(r) = 1 bit exactly.
        let mut orig = Vec::new();
        let mut pred = Vec::new();
        for k in 0..1024 {
            if k % 2 == 0 {
                pred.push(50);
                orig.push(51);
            } else {
                pred.push(200);
                orig.push(199);
            }
        }
        let original = GrayImage::new(32, 32, orig).unwrap();
        let prediction = GrayImage::new(32, 32, pred).unwrap();
        let est = empirical_mi(&original, &prediction).unwrap();
        assert!((est.mi - 1.0).abs() < 1e-12);
        assert!((est.h_resid - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mi_matches_frozen_shifted_edge_value() {
        // Two-tone 64x64 image with a vertical edge at column 32; the
        // prediction shifts it right by one pixel, so the residual is
        // nonzero exactly on the edge column and correlates with x_p there.
        let (w, h) = (64usize, 64usize);
        let mut orig = vec![0u8; w * h];
        let mut pred = vec![0u8; w * h];
        for row in 0..h {
            for col in 0..w {
                orig[row * w + col] = if col < 32 { 50 } else { 200 };
                let shifted = if col == 0 { col } else { col - 1 };
                pred[row * w + col] = if shifted < 32 { 50 } else { 200 };
            }
        }
        let original = GrayImage::new(w, h, orig).unwrap();
        let prediction = GrayImage::new(w, h, pred).unwrap();
        let est = empirical_mi(&original, &prediction).unwrap();
        assert!((est.h_pred - 0.999295444362).abs() < 1e-11);
        assert!((est.h_resid - 0.116115075305).abs() < 1e-11);
        assert!((est.mi - 0.015099357511).abs() < 1e-11);
    }

    #[test]
    fn binning_width_one_matches_unbinned() {
        let mut orig = Vec::new();
        let mut pred = Vec::new();
        for k in 0..4096usize {
            orig.push((k * 7 % 256) as u8);
            pred.push((k * 13 % 256) as u8);
        }
        let original = GrayImage::new(64, 64, orig).unwrap();
        let prediction = GrayImage::new(64, 64, pred).unwrap();
        let a = empirical_mi(&original, &prediction).unwrap();
        let b = empirical_mi_binned(&original, &prediction, 1).unwrap();
        assert_eq!(a.mi, b.mi);
        assert_eq!(a.h_pred, b.h_pred);
        assert_eq!(a.h_resid, b.h_resid);
    }

    #[test]
    fn coarse_bins_cannot_increase_mi_here() {
        // Coarsening both axes is data processing on each variable; the
        // plug-in MI of this deterministic-residual sample must not grow.
        let mut orig = Vec::new();
        let mut pred = Vec::new();
        for k in 0..1024 {
            if k % 2 == 0 {
                pred.push(50);
                orig.push(51);
            } else {
                pred.push(200);
                orig.push(199);
            }
        }
        let original = GrayImage::new(32, 32, orig).unwrap();
        let prediction = GrayImage::new(32, 32, pred).unwrap();
        let fine = empirical_mi_binned(&original, &prediction, 1).unwrap();
        let coarse = empirical_mi_binned(&original, &prediction, 8).unwrap();
        assert!(coarse.mi <= fine.mi + 1e-12);
        assert!(coarse.mi > 0.9); // bins of 8 keep 50/200 and ±1 separated
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = flat(4, 4, 0);
        let b = flat(4, 5, 0);
        assert!(empirical_mi(&a, &b).is_err());
        assert!(empirical_mi_binned(&a, &a, 0).is_err());
    }

    #[test]
    fn pair_interface_matches_image_interface() {
        let mut orig = Vec::new();
        let mut pred = Vec::new();
        for k in 0..4096usize {
            orig.push((k * 31 % 251) as u8);
            pred.push((k * 17 % 256) as u8);
        }
        let original = GrayImage::new(64, 64, orig.clone()).unwrap();
        let prediction = GrayImage::new(64, 64, pred.clone()).unwrap();
        let via_images = empirical_mi(&original, &prediction).unwrap();
        let via_pairs = mi_from_pred_residual_pairs(
            orig.iter()
                .zip(&pred)
                .map(|(&x, &xp)| (xp, x as i16 - xp as i16)),
        )
        .unwrap();
        assert_eq!(via_images.mi, via_pairs.mi);
        assert_eq!(via_images.h_pred, via_pairs.h_pred);
        assert_eq!(via_images.h_resid, via_pairs.h_resid);
    }

    #[test]
    fn residual_range_enforced_for_pairs() {
        assert!(mi_from_pred_residual_pairs([(0u8, 300i16)]).is_err());
        assert!(mi_from_pred_residual_pairs(std::iter::empty::<(u8, i16)>()).is_err());
    }

    #[test]
    fn load_pgm_roundtrip_and_missing_file() {
        let dir = std::env::temp_dir().join("condcode-core-image-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tiny.pgm");
        std::fs::write(&path, pgm_bytes(2, 2, &[9, 8, 7, 6])).unwrap();
        let img = load_pgm(&path).unwrap();
        assert_eq!(img.pixels(), &[9, 8, 7, 6]);
        match load_pgm(&dir.join("absent.pgm")) {
            Err(Error::Io { path, .. }) => {
                assert!(path.ends_with("absent.pgm"));
            }
            other => panic!("expected I/O error, got {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
