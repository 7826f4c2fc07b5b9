//! JSON documents read and written by the command line tool.
//!
//! Table and frame files carry their dimensions as `M` (rows) and `N`
//! (number of frame vectors). Eigenstep columns are listed for `n = 0..=N`;
//! matrix-valued fields are lists of columns.

use std::io;

use eigenframe_core::construction::{Construction, EigenBasis, FrameMatrix};
use eigenframe_core::numerics::Matrix;
use eigenframe_core::spectra::{EigenstepTable, EntryBounds, Lengths, Spectrum, ValidationReport};
use eigenframe_core::verification::VerificationReport;
use eigenframe_core::Tolerance;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent document: {0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] eigenframe_core::Error),
}

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ≤ |x| < 1e17`.
pub fn fmt_g17(x: f64) -> String {
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty printer with [`fmt_g17`] numbers.
struct G17Formatter(PrettyFormatter<'static>);

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub steps: Vec<Vec<f64>>,
}

impl TableFile {
    pub fn new(table: &EigenstepTable, lambda: &Spectrum, mu: &Lengths) -> Self {
        TableFile {
            m: table.dim(),
            n: table.frame_len(),
            lambda: lambda.as_slice().to_vec(),
            mu: mu.as_slice().to_vec(),
            steps: table.columns().to_vec(),
        }
    }

    /// Targets taken from the table itself: last column and trace increments.
    pub fn from_table(table: &EigenstepTable) -> Self {
        TableFile {
            m: table.dim(),
            n: table.frame_len(),
            lambda: table.final_column().to_vec(),
            mu: table.trace_increments(),
            steps: table.columns().to_vec(),
        }
    }

    pub fn check_shape(&self) -> Result<(), FormatError> {
        let bad = |what: String| Err(FormatError::Shape(what));
        if self.steps.len() != self.n + 1 {
            return bad(format!("{} step columns for N = {}", self.steps.len(), self.n));
        }
        if let Some(c) = self.steps.iter().find(|c| c.len() != self.m) {
            return bad(format!("step column of length {} for M = {}", c.len(), self.m));
        }
        if self.lambda.len() != self.m {
            return bad(format!("lambda has {} entries for M = {}", self.lambda.len(), self.m));
        }
        if self.mu.len() != self.n {
            return bad(format!("mu has {} entries for N = {}", self.mu.len(), self.n));
        }
        Ok(())
    }

    pub fn table(&self) -> Result<EigenstepTable, FormatError> {
        self.check_shape()?;
        Ok(EigenstepTable::new(self.steps.clone())?)
    }

    pub fn targets(&self, tol: Tolerance) -> Result<(Spectrum, Lengths), FormatError> {
        self.check_shape()?;
        Ok((
            Spectrum::new(self.lambda.clone(), tol)?,
            Lengths::new(self.mu.clone(), tol)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub columns: Vec<Vec<f64>>,
    /// Columns of an orthonormal eigenbasis of the frame operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenbasis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

impl FrameFile {
    pub fn new(frame: &FrameMatrix) -> Self {
        FrameFile {
            m: frame.dim(),
            n: frame.len(),
            columns: frame.columns().to_vec(),
            eigenbasis: None,
            lambda: None,
            mu: None,
        }
    }

    pub fn from_construction(c: &Construction, lambda: &Spectrum, mu: &Lengths) -> Self {
        FrameFile {
            eigenbasis: Some(c.final_basis().matrix().columns()),
            lambda: Some(lambda.as_slice().to_vec()),
            mu: Some(mu.as_slice().to_vec()),
            ..Self::new(&c.frame)
        }
    }

    pub fn frame(&self) -> Result<FrameMatrix, FormatError> {
        if self.columns.len() != self.n {
            return Err(FormatError::Shape(format!(
                "{} columns for N = {}",
                self.columns.len(),
                self.n
            )));
        }
        Ok(FrameMatrix::new(self.m, self.columns.clone())?)
    }

    pub fn basis(&self) -> Result<Option<EigenBasis>, FormatError> {
        self.eigenbasis
            .as_ref()
            .map(|cols| Ok(EigenBasis::new(Matrix::from_columns(self.m, cols)?)?))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationFile {
    pub spectrum_ok: bool,
    pub lengths_ok: bool,
    pub max_spectrum_error: f64,
    pub max_length_error: f64,
    pub tight: bool,
    pub frame_bounds: [f64; 2],
    pub welch_ratio: f64,
}

impl From<&VerificationReport> for VerificationFile {
    fn from(r: &VerificationReport) -> Self {
        VerificationFile {
            spectrum_ok: r.spectrum_ok,
            lengths_ok: r.lengths_ok,
            max_spectrum_error: r.max_spectrum_error,
            max_length_error: r.max_length_error,
            tight: r.tight,
            frame_bounds: [r.frame_bounds.0, r.frame_bounds.1],
            welch_ratio: r.welch_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub kind: String,
    /// `[n, m]` with one-based `m`, or `[n, null]` for a whole column.
    pub location: (usize, Option<usize>),
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationFile {
    pub valid: bool,
    pub violations: Vec<ViolationEntry>,
}

impl From<&ValidationReport> for ValidationFile {
    fn from(r: &ValidationReport) -> Self {
        ValidationFile {
            valid: r.is_valid(),
            violations: r
                .violations
                .iter()
                .map(|v| ViolationEntry {
                    kind: v.kind.as_str().to_string(),
                    location: (v.n, v.m),
                    magnitude: v.magnitude,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub n: usize,
    /// One-based.
    pub m: usize,
    pub lo: f64,
    pub hi: f64,
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<BoundEntry>,
}

impl From<&EntryBounds> for BoundsFile {
    fn from(b: &EntryBounds) -> Self {
        let n_len = b.lo.len() - 1;
        let m_dim = b.lo[0].len();
        let mut entries = Vec::with_capacity((n_len + 1) * m_dim);
        for n in 0..=n_len {
            for m in 0..m_dim {
                let (lo, hi) = b.bracket(n, m);
                entries.push(BoundEntry {
                    n,
                    m: m + 1,
                    lo,
                    hi,
                    forced: b.is_forced(n, m),
                });
            }
        }
        BoundsFile {
            m: m_dim,
            n: n_len,
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub x: f64,
    pub y: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticesFile {
    pub vertices: Vec<[f64; 2]>,
}
