//! File formats: dataset CSV, factor-vector JSON, atomic writes.
//!
//! Dataset CSVs carry a header row, one binary label column and numeric
//! feature columns (UTF-8, '.' decimal separator). No standardisation is
//! applied on load; call [`Dataset::zscored`] where real-world scales need
//! it.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{Center, Dataset, FactorVector};
use crate::error::{Error, Result};

/// Load a dataset from CSV. `feature_columns` selects and orders the
/// feature columns; by default every non-label column is used in file
/// order. Rows with non-numeric feature cells are rejected with their
/// 1-based data row index.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    feature_columns: Option<&[String]>,
) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv { row: 0, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::InvalidArgument(format!("label column '{label_column}' not found")))?;
    let feature_idx: Vec<usize> = match feature_columns {
        Some(cols) => cols
            .iter()
            .map(|c| {
                headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| Error::InvalidArgument(format!("feature column '{c}' not found")))
            })
            .collect::<Result<_>>()?,
        None => (0..headers.len()).filter(|&i| i != label_idx).collect(),
    };
    if feature_idx.is_empty() {
        return Err(Error::InvalidArgument("no feature columns selected".into()));
    }

    let mut rows: Vec<f64> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (row_number, record) in reader.records().enumerate() {
        let row = row_number + 1;
        let record = record.map_err(|e| Error::Csv { row, message: e.to_string() })?;
        let label_cell = record
            .get(label_idx)
            .ok_or_else(|| Error::Csv { row, message: "missing label cell".into() })?;
        let label: f64 = label_cell
            .trim()
            .parse()
            .map_err(|e| Error::Csv { row, message: format!("label '{label_cell}': {e}") })?;
        if label == 0.0 {
            labels.push(0);
        } else if label == 1.0 {
            labels.push(1);
        } else {
            return Err(Error::InvalidData(format!("non-binary label {label} at row {row}")));
        }
        for &idx in &feature_idx {
            let cell = record
                .get(idx)
                .ok_or_else(|| Error::Csv { row, message: format!("missing cell {idx}") })?;
            let value: f64 = cell.trim().parse().map_err(|e| Error::Csv {
                row,
                message: format!("column '{}', value '{cell}': {e}", headers[idx]),
            })?;
            if !value.is_finite() {
                return Err(Error::Csv {
                    row,
                    message: format!("column '{}' holds non-finite value {value}", headers[idx]),
                });
            }
            rows.push(value);
        }
    }
    if labels.is_empty() {
        return Err(Error::InvalidData("csv holds a header but no data rows".into()));
    }
    let features = Array2::from_shape_vec((labels.len(), feature_idx.len()), rows)
        .map_err(|e| Error::InvalidData(e.to_string()))?;
    let names = feature_idx.iter().map(|&i| headers[i].clone()).collect();
    Dataset::new(features, labels, names)
}

/// Write a dataset as CSV with a trailing `label` column. Float formatting
/// is the shortest round-trip form, so equal datasets produce byte-equal
/// files.
pub fn write_dataset_csv<W: Write>(data: &Dataset, mut writer: W) -> Result<()> {
    let mut header = data.feature_names().join(",");
    header.push_str(",label");
    writeln!(writer, "{header}")?;
    for i in 0..data.n_rows() {
        let mut line = String::new();
        for v in data.row(i) {
            line.push_str(&v.to_string());
            line.push(',');
        }
        line.push_str(&data.labels()[i].to_string());
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Factor-vector file: `{"center": [...], "factors": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorFile {
    pub center: Center,
    pub factors: FactorVector,
}

pub fn save_factors(path: impl AsRef<Path>, file: &FactorFile) -> Result<()> {
    let json = serde_json::to_string_pretty(file)?;
    atomic_write(path, json.as_bytes())
}

pub fn load_factors(path: impl AsRef<Path>) -> Result<FactorFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn atomic_write(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    #[test]
    fn csv_roundtrip_small() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        fs::write(&path, "a,b,label\n1.5,2.5,0\n-0.25,0.125,1\n3,4,0\n").unwrap();
        let d = load_csv(&path, "label", None).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.row(1).to_vec(), vec![-0.25, 0.125]);
        assert_eq!(d.labels(), &[0, 1, 0]);
    }

    #[test]
    fn csv_column_subset_follows_request_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cols.csv");
        fs::write(&path, "a,b,c,label\n1,2,3,0\n4,5,6,1\n").unwrap();
        let cols = vec!["c".to_string(), "a".to_string()];
        let d = load_csv(&path, "label", Some(&cols)).unwrap();
        assert_eq!(d.feature_names(), &["c".to_string(), "a".to_string()]);
        assert_eq!(d.row(0).to_vec(), vec![3.0, 1.0]);
    }

    #[test]
    fn csv_errors_carry_row_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "a,label\n1.0,0\nnot_a_number,1\n").unwrap();
        match load_csv(&path, "label", None) {
            Err(Error::Csv { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected csv error, got {other:?}"),
        }

        fs::write(&path, "a,label\n1.0,2\n").unwrap();
        assert!(matches!(load_csv(&path, "label", None), Err(Error::InvalidData(_))));

        fs::write(&path, "a,label\n").unwrap();
        assert!(matches!(load_csv(&path, "label", None), Err(Error::InvalidData(_))));

        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(load_csv(&path, "label", None), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dataset_csv_write_then_load_is_identity() {
        let d = data::generate_artificial(120, 0.05, 3).unwrap();
        let mut buf = Vec::new();
        write_dataset_csv(&d, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gen.csv");
        fs::write(&path, &buf).unwrap();
        let back = load_csv(&path, "label", None).unwrap();
        assert_eq!(&back, &d);

        // same dataset, byte-identical file
        let mut buf2 = Vec::new();
        write_dataset_csv(&d, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn factor_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("factors.json");
        let file = FactorFile {
            center: Center::new(vec![0.0, 1.0]),
            factors: FactorVector::new(vec![2.0, 0.5]).unwrap(),
        };
        save_factors(&path, &file).unwrap();
        assert_eq!(load_factors(&path).unwrap(), file);
        // positivity is re-validated on load
        fs::write(&path, r#"{"center":[0.0],"factors":[-1.0]}"#).unwrap();
        assert!(load_factors(&path).is_err());
    }
}
