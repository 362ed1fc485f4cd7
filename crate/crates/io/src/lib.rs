//! File I/O: PNG and binary PGM/PPM images, inpainting masks, curvature-map
//! export and solver-trace files.
//!
//! Images are 8-bit on disk and real-valued in memory: loading promotes
//! samples to the scalar type on the native 0-255 scale, saving clamps to
//! [0, 255] and rounds half-to-even. Quantization happens only here, never
//! inside the solver.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use curvtv_core::curvature::CurvatureMap;
use curvtv_core::image::{Image, InpaintMask};
use curvtv_core::solver::IterationTrace;
use curvtv_core::{CoreError, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("png decode: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png encode: {0}")]
    PngEncode(#[from] png::EncodingError),

    /// Malformed PNM data; `offset` is the byte position of the defect.
    #[error("parse error at byte offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported bit depth: expected 8, got {0}")]
    UnsupportedDepth(u32),

    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, IoError>;

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// Loads an 8-bit PNG, PGM or PPM image (detected by magic bytes) as a
/// real-valued image on the 0-255 scale: grayscale maps to 1 channel,
/// color to 3.
pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let bytes = std::fs::read(path.as_ref())?;
    if bytes.starts_with(&PNG_MAGIC) {
        load_png(&bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        load_pnm(&bytes)
    } else {
        Err(IoError::UnsupportedFormat(format!(
            "{}: not a PNG or binary PGM/PPM file",
            path.as_ref().display()
        )))
    }
}

fn load_png<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(IoError::UnsupportedDepth(match info.bit_depth {
            png::BitDepth::One => 1,
            png::BitDepth::Two => 2,
            png::BitDepth::Four => 4,
            png::BitDepth::Eight => 8,
            png::BitDepth::Sixteen => 16,
        }));
    }
    let buf_len = reader.output_buffer_size().ok_or_else(|| {
        IoError::UnsupportedFormat("png dimensions overflow".into())
    })?;
    let mut buf = vec![0u8; buf_len];
    let frame = reader.next_frame(&mut buf)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let samples = &buf[..frame.buffer_size()];
    // keep gray or RGB, strip any alpha channel
    let (channels, stride) = match frame.color_type {
        png::ColorType::Grayscale => (1usize, 1usize),
        png::ColorType::GrayscaleAlpha => (1, 2),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (3, 4),
        png::ColorType::Indexed => {
            return Err(IoError::UnsupportedFormat("indexed PNG".into()));
        }
    };
    let mut data = vec![T::zero(); w * h * channels];
    let plane = w * h;
    for (pixel, chunk) in samples.chunks_exact(stride).enumerate() {
        for c in 0..channels {
            data[c * plane + pixel] = T::from_u8(chunk[c]).unwrap();
        }
    }
    Ok(Image::new(w, h, channels, data)?)
}

struct PnmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmCursor<'a> {
    fn parse_error(&self, message: impl Into<String>) -> IoError {
        IoError::Parse { offset: self.pos, message: message.into() }
    }

    /// Skips whitespace and `#` comments between header tokens.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.parse_error(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| IoError::Parse {
                offset: start,
                message: format!("invalid {what}"),
            })
    }
}

fn load_pnm<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    let channels = match &bytes[..2] {
        b"P5" => 1usize,
        b"P6" => 3,
        _ => unreachable!("dispatched on magic"),
    };
    let mut cursor = PnmCursor { bytes, pos: 2 };
    let width = cursor.read_number("width")?;
    let height = cursor.read_number("height")?;
    let maxval = cursor.read_number("maxval")?;
    if maxval != 255 {
        return Err(IoError::UnsupportedDepth(if maxval > 255 { 16 } else { maxval as u32 }));
    }
    // exactly one whitespace byte separates the header from the raster
    if cursor.pos >= bytes.len() || !bytes[cursor.pos].is_ascii_whitespace() {
        return Err(cursor.parse_error("expected whitespace before raster data"));
    }
    cursor.pos += 1;

    let expected = width * height * channels;
    let raster = &bytes[cursor.pos..];
    if raster.len() < expected {
        return Err(IoError::Parse {
            offset: bytes.len(),
            message: format!(
                "truncated raster: expected {expected} bytes, file ends {} bytes short",
                expected - raster.len()
            ),
        });
    }
    // pixel-interleaved on disk, planar in memory
    let plane = width * height;
    let mut data = vec![T::zero(); expected];
    for (pixel, chunk) in raster[..expected].chunks_exact(channels).enumerate() {
        for c in 0..channels {
            data[c * plane + pixel] = T::from_u8(chunk[c]).unwrap();
        }
    }
    Ok(Image::new(width, height, channels, data)?)
}

/// Quantizes to 8 bits: clamp to [0, 255], round half-to-even.
fn quantize<T: Scalar>(value: T) -> u8 {
    let v = value.to_f64().unwrap_or(0.0).clamp(0.0, 255.0);
    v.round_ties_even() as u8
}

fn interleave_u8<T: Scalar>(img: &Image<T>) -> Vec<u8> {
    let plane = img.pixel_count();
    let channels = img.channels();
    let mut out = vec![0u8; plane * channels];
    for pixel in 0..plane {
        for c in 0..channels {
            out[pixel * channels + c] = quantize(img.data()[c * plane + pixel]);
        }
    }
    out
}

/// Saves an image as 8-bit PNG, PGM or PPM, chosen by file extension.
/// PGM accepts single-channel images only, PPM three-channel only.
pub fn save_image<T: Scalar>(img: &Image<T>, path: impl AsRef<Path>) -> Result<()> {
    if !img.is_finite() {
        return Err(IoError::Core(CoreError::NonFinite { what: "image to save" }));
    }
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => save_png(img, path),
        "pgm" => {
            if img.channels() != 1 {
                return Err(IoError::UnsupportedFormat("PGM stores single-channel images".into()));
            }
            save_pnm(img, path, b"P5")
        }
        "ppm" => {
            if img.channels() != 3 {
                return Err(IoError::UnsupportedFormat("PPM stores three-channel images".into()));
            }
            save_pnm(img, path, b"P6")
        }
        other => Err(IoError::UnsupportedFormat(format!("extension '{other}'"))),
    }
}

fn save_png<T: Scalar>(img: &Image<T>, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut encoder = png::Encoder::new(file, img.width() as u32, img.height() as u32);
    encoder.set_color(if img.channels() == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&interleave_u8(img))?;
    Ok(())
}

fn save_pnm<T: Scalar>(img: &Image<T>, path: &Path, magic: &[u8]) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(magic)?;
    file.write_all(format!("\n{} {}\n255\n", img.width(), img.height()).as_bytes())?;
    file.write_all(&interleave_u8(img))?;
    Ok(())
}

/// Loads a grayscale mask image: pixels at or above 128 are observed,
/// darker pixels belong to the inpainting hole. Fails when no pixel is
/// observed.
pub fn load_mask(path: impl AsRef<Path>) -> Result<InpaintMask> {
    let img: Image<f64> = load_image(&path)?;
    if img.channels() != 1 {
        return Err(IoError::UnsupportedFormat(
            "mask must be a grayscale image".into(),
        ));
    }
    let known = img.data().iter().map(|&v| v >= 128.0).collect();
    Ok(InpaintMask::new(img.width(), img.height(), known)?)
}

/// Writes a solver trace in its CSV format.
pub fn write_trace<T: Scalar>(trace: &IterationTrace<T>, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, trace.to_csv())?)
}

/// Saves a curvature map as an 8-bit image, linearly rescaled so the map
/// minimum maps to 0 and the maximum to 255 (an all-constant map saves as
/// black).
pub fn save_curvature_image<T: Scalar>(map: &CurvatureMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let min = map.values().iter().cloned().fold(T::infinity(), T::min);
    let max = map.values().iter().cloned().fold(T::neg_infinity(), T::max);
    let span = max - min;
    let full = T::from_f64_lossy(255.0);
    let data: Vec<T> = if span > T::zero() {
        map.values().iter().map(|&v| (v - min) / span * full).collect()
    } else {
        vec![T::zero(); map.values().len()]
    };
    let img = Image::new(map.width(), map.height(), 1, data)?;
    save_image(&img, path)
}

/// Writes a curvature map as a plain-text numeric grid: a `width height`
/// header line, then one row of full-precision values per image row.
pub fn write_grid<T: Scalar>(map: &CurvatureMap<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", map.width(), map.height()));
    for i in 0..map.height() {
        let mut row = String::new();
        for j in 0..map.width() {
            if j > 0 {
                row.push(' ');
            }
            row.push_str(&map.at(i, j).to_string());
        }
        out.push_str(&row);
        out.push('\n');
    }
    Ok(std::fs::write(path, out)?)
}

/// Convenience reader used by tests and the CLI to slurp small text files.
pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    let mut buf = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut buf)?;
    Ok(buf)
}
