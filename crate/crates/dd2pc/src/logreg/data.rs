use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

/// Features with binary labels, as read from CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub x: Matrix,
    pub y: Vector,
}

fn check_labels(y: &Vector) -> Result<()> {
    if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::invalid(format!("label {} at row {i} is not 0 or 1", y.get(i))));
    }
    Ok(())
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, x: Matrix, y: Vector) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::shape("dataset", format!("{} rows but {} labels", x.rows(), y.len())));
        }
        if feature_names.len() != x.cols() {
            return Err(Error::shape("dataset", format!("{} names for {} columns", feature_names.len(), x.cols())));
        }
        check_labels(&y)?;
        Ok(Dataset { feature_names, x, y })
    }

    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn features(&self) -> usize {
        self.x.cols()
    }

    /// Reads a CSV with a header row whose last column is `label`.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)?;
        let header: Vec<String> = reader.headers()?.iter().map(|s| s.trim().to_string()).collect();
        if header.len() < 2 || header.last().map(String::as_str) != Some("label") {
            return Err(Error::Malformed(format!(
                "{}: header must list features and end with `label`",
                path.display()
            )));
        }
        let d = header.len() - 1;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() != d + 1 {
                return Err(Error::Malformed(format!("{}: row {} has {} fields", path.display(), i + 1, rec.len())));
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Malformed(format!("{}: row {} field {j}: {field:?}", path.display(), i + 1)))?;
                if j < d {
                    xs.push(v);
                } else {
                    ys.push(v);
                }
            }
        }
        if ys.is_empty() {
            return Err(Error::Malformed(format!("{}: no data rows", path.display())));
        }
        let n = ys.len();
        Dataset::new(header[..d].to_vec(), Matrix::new(n, d, xs)?, Vector::new(ys)?)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = self.feature_names.clone();
        header.push("label".into());
        w.write_record(&header)?;
        for i in 0..self.rows() {
            let mut rec: Vec<String> = self.x.row(i).iter().map(|v| format!("{v:?}")).collect();
            rec.push(format!("{}", self.y.get(i) as u8));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// First `train` rows and the rest.
    pub fn split_at(&self, train: usize) -> Result<(Dataset, Dataset)> {
        let n = self.rows();
        if train == 0 || train >= n {
            return Err(Error::invalid(format!("split point {train} must be inside 1..{n}")));
        }
        let part = |lo: usize, hi: usize| -> Result<Dataset> {
            Ok(Dataset {
                feature_names: self.feature_names.clone(),
                x: self.x.row_range(lo, hi)?,
                y: Vector::new(self.y.as_slice()[lo..hi].to_vec())?,
            })
        };
        Ok((part(0, train)?, part(train, n)?))
    }
}

/// Per-column min-max scaling to [0, 1]; constant columns map to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: &Matrix) -> Self {
        let mut min = vec![f64::INFINITY; x.cols()];
        let mut max = vec![f64::NEG_INFINITY; x.cols()];
        for i in 0..x.rows() {
            for (j, &v) in x.row(i).iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        MinMaxScaler { min, max }
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.min.len() {
            return Err(Error::shape("min-max scaler", format!("fitted on {} columns, got {}", self.min.len(), x.cols())));
        }
        Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            let w = self.max[j] - self.min[j];
            if w > 0.0 {
                (x.get(i, j) - self.min[j]) / w
            } else {
                0.0
            }
        }))
    }
}

/// Additive shares of a design matrix plus public labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionedDataset {
    pub x_a: Matrix,
    pub x_b: Matrix,
    pub y: Vector,
}

impl PartitionedDataset {
    pub fn new(x_a: Matrix, x_b: Matrix, y: Vector) -> Result<Self> {
        if x_a.shape() != x_b.shape() {
            return Err(Error::shape("partitioned dataset", format!("{:?} vs {:?}", x_a.shape(), x_b.shape())));
        }
        if x_a.rows() != y.len() {
            return Err(Error::shape("partitioned dataset", format!("{} rows but {} labels", x_a.rows(), y.len())));
        }
        check_labels(&y)?;
        Ok(PartitionedDataset { x_a, x_b, y })
    }

    pub fn from_dataset(data: &Dataset, split_point: usize) -> Result<Self> {
        let (x_a, x_b) = vertical_partition(&data.x, split_point)?;
        PartitionedDataset::new(x_a, x_b, data.y.clone())
    }

    pub fn rows(&self) -> usize {
        self.x_a.rows()
    }

    pub fn features(&self) -> usize {
        self.x_a.cols()
    }

    /// X_a + X_b.
    pub fn joined(&self) -> Result<Matrix> {
        self.x_a.add(&self.x_b)
    }

    /// Alice and Bob trade places.
    pub fn swapped(&self) -> Self {
        PartitionedDataset {
            x_a: self.x_b.clone(),
            x_b: self.x_a.clone(),
            y: self.y.clone(),
        }
    }
}

/// Alice gets columns [0, split_point), Bob the rest; each is zero elsewhere.
pub fn vertical_partition(x: &Matrix, split_point: usize) -> Result<(Matrix, Matrix)> {
    if split_point > x.cols() {
        return Err(Error::invalid(format!("split point {split_point} beyond {} columns", x.cols())));
    }
    let a = Matrix::from_fn(x.rows(), x.cols(), |i, j| if j < split_point { x.get(i, j) } else { 0.0 });
    let b = Matrix::from_fn(x.rows(), x.cols(), |i, j| if j < split_point { 0.0 } else { x.get(i, j) });
    Ok((a, b))
}
