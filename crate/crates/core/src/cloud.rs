//! Finite point clouds and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lex_cmp;

/// A finite set of points in `ℝ^d`, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    #[serde(default)]
    label: String,
}

impl PointCloud {
    /// Builds a cloud, rejecting exact duplicate points.
    pub fn new<I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[f64]>,
    {
        Self::with_duplicates(dim, points, false)
    }

    pub fn with_duplicates<I>(dim: usize, points: I, allow_duplicates: bool) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[f64]>,
    {
        let mut coords = Vec::new();
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, allow_duplicates)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>, allow_duplicates: bool) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k / dim));
        }
        let cloud = PointCloud {
            dim,
            coords,
            label: String::new(),
        };
        if !allow_duplicates {
            if let Some((a, b)) = cloud.find_duplicate() {
                return Err(Error::DuplicatePoint(b, a));
            }
        }
        Ok(cloud)
    }

    pub(crate) fn from_trusted(dim: usize, coords: Vec<f64>, label: String) -> Self {
        debug_assert_eq!(coords.len() % dim, 0);
        PointCloud { dim, coords, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::Chunks<'_, f64> {
        self.coords.chunks(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn translated(&self, t: &[f64]) -> Result<Self> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.len(),
            });
        }
        let coords = self
            .coords
            .chunks(self.dim)
            .flat_map(|p| p.iter().zip(t).map(|(a, b)| a + b))
            .collect();
        Ok(Self::from_trusted(self.dim, coords, self.label.clone()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let coords = self.coords.iter().map(|c| c * factor).collect();
        Self::from_trusted(self.dim, coords, self.label.clone())
    }

    /// Returns `(first, later)` indices of some exactly repeated point.
    fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(self.point(a), self.point(b)).then(a.cmp(&b)));
        order.windows(2).find_map(|w| {
            let equal = self
                .point(w[0])
                .iter()
                .zip(self.point(w[1]))
                .all(|(x, y)| x == y);
            equal.then_some((w[0], w[1]))
        })
    }

    /// Reads one point per row. Lines starting with `#` are comments, and a
    /// first row that does not parse as numbers is taken as a header. Errors
    /// carry the line number in the file.
    pub fn from_csv_reader<R: Read>(reader: R, allow_duplicates: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut dim = None;
        let mut coords = Vec::new();
        let mut first = true;
        for (idx, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Input {
                row: e.position().map_or(idx + 1, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let row = record.position().map_or(idx + 1, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            let is_first = std::mem::replace(&mut first, false);
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if is_first => continue,
                Err(e) => {
                    return Err(Error::Input {
                        row,
                        message: format!("not a number: {e}"),
                    })
                }
            };
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input {
                    row,
                    message: "NaN or infinite coordinate".into(),
                });
            }
            let d = *dim.get_or_insert(values.len());
            if values.len() != d {
                return Err(Error::Input {
                    row,
                    message: format!("expected {d} columns, found {}", values.len()),
                });
            }
            coords.extend(values);
        }
        let dim = dim.ok_or(Error::TooFewPoints {
            needed: 1,
            found: 0,
        })?;
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        Self::from_flat(dim, coords, allow_duplicates)
    }

    /// Writes a header `x1,…,xd` and one row per point, each value in its
    /// shortest round-trip form.
    pub fn to_csv_writer<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
