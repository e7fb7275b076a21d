use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudRepr", into = "CloudRepr")]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CloudRepr {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<CloudRepr> for PointCloud {
    type Error = Error;

    fn try_from(r: CloudRepr) -> Result<Self> {
        let cloud = PointCloud::new(r.points)?;
        if cloud.dim != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, got: cloud.dim });
        }
        Ok(cloud)
    }
}

impl From<PointCloud> for CloudRepr {
    fn from(c: PointCloud) -> Self {
        CloudRepr { dim: c.dim, points: c.iter().map(<[f64]>::to_vec).collect() }
    }
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::InvalidCloud("no points".into()))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCloud("dimension must be positive".into()));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCloud(format!(
                "{} coordinates do not form a non-empty set of {dim}-dimensional points",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidCloud(format!("non-finite coordinate in point {}", pos / dim)));
        }
        Ok(Self { dim, coords })
    }

    /// Univariate cloud from raw values.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(1, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a constructed cloud; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Values of coordinate `axis` across all points.
    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.iter().map(|p| p[axis]).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, coords: self.coords.iter().map(|c| c * factor).collect() }
    }

    /// Applies `f(axis, value)` to every coordinate.
    pub fn map_coords(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let dim = self.dim;
        let coords = self.coords.iter().enumerate().map(|(k, &c)| f(k % dim, c)).collect();
        Self::from_flat(dim, coords)
    }

    /// Sub-cloud made of the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_flat(self.dim, coords)
    }

    /// Concatenation of two clouds of the same dimension.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self::from_flat(self.dim, coords)
    }

    /// Parses CSV: one point per row, optional header row, `.` decimals.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut dim = None;
        let mut coords = Vec::new();
        for (r, record) in rdr.records().enumerate() {
            let row = r + 1;
            let record = record.map_err(|e| Error::Parse { row, column: 0, message: e.to_string() })?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: Vec<std::result::Result<f64, usize>> = record
                .iter()
                .enumerate()
                .map(|(c, field)| field.parse::<f64>().map_err(|_| c + 1))
                .collect();
            if row == 1 && parsed.iter().any(|p| p.is_err()) {
                // header
                continue;
            }
            let d = *dim.get_or_insert(record.len());
            if record.len() != d {
                return Err(Error::Parse {
                    row,
                    column: record.len().min(d) + 1,
                    message: format!("expected {d} columns, found {}", record.len()),
                });
            }
            for (c, value) in parsed.into_iter().enumerate() {
                match value {
                    Ok(v) if v.is_finite() => coords.push(v),
                    Ok(_) => {
                        return Err(Error::Parse { row, column: c + 1, message: "non-finite value".into() })
                    }
                    Err(column) => {
                        return Err(Error::Parse {
                            row,
                            column,
                            message: format!("not a number: {:?}", &record[column - 1]),
                        })
                    }
                }
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse { row: 1, column: 1, message: "no data rows".into() })?;
        Self::from_flat(dim, coords)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// CSV text without header, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
