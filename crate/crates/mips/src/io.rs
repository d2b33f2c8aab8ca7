//! Dataset ingestion and on-disk matrix formats.
//!
//! Two interchangeable formats:
//! - CSV: one row per line, comma-separated numeric fields.
//! - DMAT: binary, magic `DMAT`, u32 version, u64 n, u64 d, then n*d
//!   little-endian f32 values row-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

pub const DMAT_MAGIC: [u8; 4] = *b"DMAT";
pub const DMAT_VERSION: u32 = 1;

/// Hard cap on declared element counts, to catch corrupted headers before
/// attempting a huge allocation.
const MAX_ELEMENTS: u64 = 1 << 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Dmat,
}

impl MatrixFormat {
    /// Infers the format from a file extension (`.csv` or `.dmat`).
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(MatrixFormat::Csv),
            Some("dmat") => Ok(MatrixFormat::Dmat),
            other => Err(Error::Usage(format!(
                "cannot infer matrix format from extension {other:?} of {}; use .csv or .dmat",
                path.display()
            ))),
        }
    }
}

/// Where a matrix comes from and what shape it is expected to have.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// `None` means infer from the file extension.
    pub format: Option<MatrixFormat>,
    pub expect_n: Option<usize>,
    pub expect_d: Option<usize>,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            format: None,
            expect_n: None,
            expect_d: None,
        }
    }
}

/// Loads a matrix per its spec, validating declared dimensions when present.
pub fn load_matrix(spec: &DatasetSpec) -> Result<DataMatrix> {
    let format = match spec.format {
        Some(f) => f,
        None => MatrixFormat::from_path(&spec.path)?,
    };
    let file = File::open(&spec.path)?;
    let m = match format {
        MatrixFormat::Csv => read_csv_matrix(BufReader::new(file))?,
        MatrixFormat::Dmat => read_dmat(BufReader::new(file))?,
    };
    let expected_n = spec.expect_n.unwrap_or(m.n());
    let expected_d = spec.expect_d.unwrap_or(m.d());
    if expected_n != m.n() || expected_d != m.d() {
        return Err(Error::ShapeMismatch {
            expected_n,
            expected_d,
            actual_n: m.n(),
            actual_d: m.d(),
        });
    }
    Ok(m)
}

/// Parses CSV rows into a matrix. Ragged rows and unparsable or non-finite
/// fields are rejected with their line number.
pub fn read_csv_matrix<R: BufRead>(reader: R) -> Result<DataMatrix> {
    let mut rows: Vec<Vec<f32>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(width.unwrap_or(8));
        for (field_idx, field) in line.split(',').enumerate() {
            let text = field.trim();
            let value: f32 = text.parse().map_err(|_| Error::BadNumber {
                line: line_no,
                field: field_idx + 1,
                text: text.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row: rows.len(),
                    col: field_idx,
                });
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: w,
                    found: row.len(),
                });
            }
            _ => {}
        }
        rows.push(row);
    }
    DataMatrix::from_rows(rows)
}

/// Writes a matrix as CSV. `f32` values print in round-trip form, so a
/// CSV -> DMAT -> CSV cycle preserves every value exactly.
pub fn write_csv_matrix<W: Write>(mut w: W, m: &DataMatrix) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.n() {
        line.clear();
        for (j, &v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v}"));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_dmat<R: Read>(mut r: R) -> Result<DataMatrix> {
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if magic != DMAT_MAGIC {
        return Err(Error::BadMagic { expected: "DMAT" });
    }
    let version = read_u32(&mut r, "version")?;
    if version != DMAT_VERSION {
        return Err(Error::BadVersion {
            kind: "DMAT",
            found: version,
            expected: DMAT_VERSION,
        });
    }
    let n = read_u64(&mut r, "row count")?;
    let d = read_u64(&mut r, "column count")?;
    let elements = n
        .checked_mul(d)
        .filter(|&e| e <= MAX_ELEMENTS)
        .ok_or(Error::DimensionOverflow { n, d })?;

    let mut values = vec![0f32; elements as usize];
    let mut buf = [0u8; 4];
    for (pos, v) in values.iter_mut().enumerate() {
        read_exact(&mut r, &mut buf, "matrix values")?;
        let x = f32::from_le_bytes(buf);
        if !x.is_finite() {
            return Err(Error::NonFinite {
                row: pos / d as usize,
                col: pos % d as usize,
            });
        }
        *v = x;
    }
    DataMatrix::from_vec(n as usize, d as usize, values)
}

pub fn write_dmat<W: Write>(mut w: W, m: &DataMatrix) -> Result<()> {
    w.write_all(&DMAT_MAGIC)?;
    w.write_all(&DMAT_VERSION.to_le_bytes())?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    w.write_all(&(m.d() as u64).to_le_bytes())?;
    for &v in m.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn save_matrix(path: &Path, m: &DataMatrix) -> Result<()> {
    let format = MatrixFormat::from_path(path)?;
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => write_csv_matrix(&mut w, m)?,
        MatrixFormat::Dmat => write_dmat(&mut w, m)?,
    }
    w.flush()?;
    Ok(())
}

/// Converts between CSV and DMAT, formats inferred from the extensions.
pub fn convert_matrix(input: &Path, output: &Path) -> Result<DataMatrix> {
    let m = load_matrix(&DatasetSpec::new(input))?;
    save_matrix(output, &m)?;
    Ok(m)
}

pub(crate) fn read_exact<R: Read>(
    r: &mut R,
    buf: &mut [u8],
    context: &'static str,
) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Truncated { context }
        } else {
            Error::Io(e)
        }
    })
}

pub(crate) fn read_u32<R: Read>(r: &mut R, context: &'static str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, context)?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn read_u64<R: Read>(r: &mut R, context: &'static str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, context)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_f64<R: Read>(r: &mut R, context: &'static str) -> Result<f64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, context)?;
    Ok(f64::from_le_bytes(buf))
}
