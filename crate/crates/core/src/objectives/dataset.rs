use std::io::Read;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Declared bounds on the data: `|x_ij| ≤ x_bound` and `|y_i| ≤ y_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataBounds {
    pub x_bound: f64,
    pub y_bound: f64,
}

impl Default for DataBounds {
    fn default() -> Self {
        Self { x_bound: 1.0, y_bound: 1.0 }
    }
}

impl DataBounds {
    pub fn new(x_bound: f64, y_bound: f64) -> Result<Self> {
        if !(x_bound > 0.0 && x_bound.is_finite() && y_bound > 0.0 && y_bound.is_finite()) {
            return Err(invalid("data bounds must be positive and finite"));
        }
        Ok(Self { x_bound, y_bound })
    }
}

/// The private input: an `n × d` design (row-major) and optional responses,
/// validated against declared bounds on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Option<Vec<f64>>,
    n: usize,
    d: usize,
    bounds: DataBounds,
}

impl Dataset {
    pub fn new(n: usize, d: usize, x: Vec<f64>, y: Option<Vec<f64>>, bounds: DataBounds) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if d == 0 {
            return Err(invalid("dataset must have at least one covariate column"));
        }
        if x.len() != n * d {
            return Err(invalid(format!("design has {} entries, expected {n}×{d}", x.len())));
        }
        if let Some(y) = &y {
            if y.len() != n {
                return Err(invalid(format!("response has length {}, expected {n}", y.len())));
            }
        }
        for (i, row) in x.chunks_exact(d).enumerate() {
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !(v.is_finite() && v.abs() <= bounds.x_bound)) {
                return Err(Error::DataBound {
                    row: i + 1,
                    message: format!("x{} = {v} outside [-{b}, {b}]", j + 1, b = bounds.x_bound),
                });
            }
        }
        if let Some(y) = &y {
            if let Some((i, v)) = y.iter().enumerate().find(|(_, v)| !(v.is_finite() && v.abs() <= bounds.y_bound)) {
                return Err(Error::DataBound {
                    row: i + 1,
                    message: format!("y = {v} outside [-{b}, {b}]", b = bounds.y_bound),
                });
            }
        }
        Ok(Self { x, y, n, d, bounds })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Option<Vec<f64>>, bounds: DataBounds) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("ragged design rows"));
        }
        Self::new(n, d, rows.concat(), y, bounds)
    }

    /// Reads a CSV with header `x1,...,xd` and an optional trailing `y` column.
    pub fn from_csv_reader<R: Read>(reader: R, bounds: DataBounds) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let has_y = headers.iter().next_back() == Some("y");
        let d = if has_y { headers.len() - 1 } else { headers.len() };
        for (j, h) in headers.iter().take(d).enumerate() {
            if h != format!("x{}", j + 1) {
                return Err(invalid(format!("unexpected column '{h}' at position {}; expected x1..xd[,y]", j + 1)));
            }
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut n = 0;
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(invalid(format!("row {} has {} fields, expected {}", i + 1, record.len(), headers.len())));
            }
            for (j, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::DataBound {
                    row: i + 1,
                    message: format!("field {} ('{field}') is not a number", j + 1),
                })?;
                if j < d {
                    x.push(v);
                } else {
                    y.push(v);
                }
            }
            n += 1;
        }
        Self::new(n, d, x, has_y.then_some(y), bounds)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, bounds: DataBounds) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file), bounds)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> DataBounds {
        self.bounds
    }

    /// Row-major design matrix.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> Option<&[f64]> {
        self.y.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.x.chunks_exact(self.d)
    }

    pub(crate) fn require_y(&self) -> Result<&[f64]> {
        self.y().ok_or_else(|| invalid("objective needs a response column y"))
    }

    /// An adjacent dataset: row `i` replaced, everything else unchanged.
    pub fn with_replaced_row(&self, i: usize, x_row: &[f64], y_value: Option<f64>) -> Result<Self> {
        if i >= self.n || x_row.len() != self.d || y_value.is_some() != self.y.is_some() {
            return Err(invalid("replacement row does not match the dataset shape"));
        }
        let mut x = self.x.clone();
        x[i * self.d..(i + 1) * self.d].copy_from_slice(x_row);
        let y = self.y.clone().map(|mut y| {
            y[i] = y_value.unwrap_or_default();
            y
        });
        Self::new(self.n, self.d, x, y, self.bounds)
    }
}
