//! Image and table I/O: PGM (P2/P5) and CSV matrices.

use std::path::Path;

use proxama::linop::ImageShape;

use crate::error::{CliError, CliResult};

pub struct Image {
    pub shape: ImageShape,
    /// Row-major values in [0, 1].
    pub data: Vec<f64>,
}

/// Reads a PGM or, for any other extension, a CSV matrix. PGM values are
/// divided by the maximum gray value. CSV values already in [0, 1] are kept,
/// otherwise the matrix is rescaled to that range.
pub fn read_image(path: &Path) -> CliResult<Image> {
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        parse_pgm(&bytes)
    } else {
        let rows = read_csv_matrix(path)?;
        let (r, c) = (rows.len(), rows[0].len());
        let mut data: Vec<f64> = rows.into_iter().flatten().collect();
        let lo = data.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo < 0.0 || hi > 1.0 {
            let span = if hi > lo { hi - lo } else { 1.0 };
            data.iter_mut().for_each(|v| *v = (*v - lo) / span);
        }
        Ok(Image {
            shape: ImageShape::new(r, c).map_err(|e| CliError::Data(e.to_string()))?,
            data,
        })
    }
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Option<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.bytes[start..self.pos]).ok())?
    }

    fn number(&mut self, what: &str) -> CliResult<usize> {
        self.next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CliError::Parse(format!("PGM: bad or missing {what}")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> CliResult<Image> {
    let mut tok = Tokens { bytes, pos: 0 };
    let magic = tok.next().unwrap_or_default();
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => return Err(CliError::Parse(format!("not a PGM file (magic `{other}`)"))),
    };
    let cols = tok.number("width")?;
    let rows = tok.number("height")?;
    let maxval = tok.number("maximum gray value")?;
    if maxval == 0 || maxval > 65535 {
        return Err(CliError::Parse(format!(
            "PGM: maximum gray value {maxval} out of range"
        )));
    }
    let shape = ImageShape::new(rows, cols).map_err(|e| CliError::Data(e.to_string()))?;
    let n = shape.len();
    let scale = maxval as f64;
    let data = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = tok.pos + 1;
        let width = if maxval < 256 { 1 } else { 2 };
        let raster = bytes
            .get(start..start + n * width)
            .ok_or_else(|| CliError::Parse("PGM: raster is truncated".into()))?;
        if width == 1 {
            raster.iter().map(|b| *b as f64 / scale).collect()
        } else {
            raster
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
                .collect()
        }
    } else {
        (0..n)
            .map(|_| tok.number("pixel").map(|v| v as f64 / scale))
            .collect::<CliResult<Vec<f64>>>()?
    };
    if data.iter().any(|v| *v > 1.0) {
        return Err(CliError::Data("PGM: pixel exceeds the maximum gray value".into()));
    }
    Ok(Image { shape, data })
}

/// 16-bit binary PGM; values are clamped to [0, 1].
pub fn write_pgm(path: &Path, shape: ImageShape, data: &[f64]) -> CliResult<()> {
    let mut out = format!("P5\n{} {}\n65535\n", shape.cols, shape.rows).into_bytes();
    for v in data {
        let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn read_csv_matrix(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Parse(format!("{} line {}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(CliError::Data(format!("{}: empty matrix", path.display())));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Data(format!(
            "{}: rows have different lengths",
            path.display()
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Data(format!("{}: non-finite entry", path.display())));
    }
    Ok(rows)
}

/// Rows of `features..., label` with labels in {-1, +1}.
pub fn read_labeled(path: &Path) -> CliResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let rows = read_csv_matrix(path)?;
    if rows[0].len() < 2 {
        return Err(CliError::Data(format!(
            "{}: need at least one feature and a label",
            path.display()
        )));
    }
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (i, mut r) in rows.into_iter().enumerate() {
        let y = r.pop().unwrap();
        if y != 1.0 && y != -1.0 {
            return Err(CliError::Data(format!(
                "{} line {}: label {y} is not +1 or -1",
                path.display(),
                i + 1
            )));
        }
        features.push(r);
        labels.push(y);
    }
    Ok((features, labels))
}

pub fn write_labeled(path: &Path, features: &[Vec<f64>], labels: &[f64]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for (f, y) in features.iter().zip(labels) {
        let mut rec: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        rec.push(y.to_string());
        w.write_record(&rec).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
