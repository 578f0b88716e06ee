use std::path::Path;

use nabfs_core::model::DataError;
use nabfs_core::{validate_dataset, Dataset, RawDataset, TaskKind};

use crate::args::TaskArg;
use crate::error::CliError;

/// A fully numeric table read from a delimited file, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path, delimiter: char) -> Result<Table, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    parse_table(file, delimiter)
}

pub fn parse_table<R: std::io::Read>(reader: R, delimiter: char) -> Result<Table, CliError> {
    if !delimiter.is_ascii() {
        return Err(CliError::Usage(format!("--delimiter must be a single ASCII character, got `{delimiter}`")));
    }
    let mut rdr = csv::ReaderBuilder::new().delimiter(delimiter as u8).has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header row: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(CliError::Data("input has no header row".into()));
    }
    if let Some(i) = headers.iter().position(String::is_empty) {
        return Err(CliError::Data(format!("header field {} is empty", i + 1)));
    }

    let mut columns = vec![Vec::new(); headers.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("data row {}: {e}", row + 1)))?;
        for (j, cell) in record.iter().enumerate() {
            let text = cell.trim();
            let value = text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                let line = record.position().map_or(String::new(), |p| format!(" (line {})", p.line()));
                CliError::Data(format!("data row {}{line}, column `{}`: `{text}` is not a finite number", row + 1, headers[j]))
            })?;
            columns[j].push(value);
        }
    }
    Ok(Table { headers, columns })
}

fn is_binary(values: &[f64]) -> bool {
    values.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Splits off `target` as the response; every other column becomes a feature.
pub fn to_dataset(table: Table, target: &str, task: TaskArg) -> Result<Dataset, CliError> {
    let Table { mut headers, mut columns } = table;
    let t = headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| CliError::Usage(format!("--target `{target}` is not a column; header is [{}]", headers.join(", "))))?;
    let response = columns.remove(t);
    headers.remove(t);
    let task = match task {
        TaskArg::Classify => TaskKind::BinaryClassification,
        TaskArg::Regress => TaskKind::Regression,
        TaskArg::Auto if is_binary(&response) => TaskKind::BinaryClassification,
        TaskArg::Auto => TaskKind::Regression,
    };
    let names = headers.clone();
    validate_dataset(RawDataset { feature_names: headers, columns, response, task }).map_err(|e| {
        let msg = match e {
            DataError::NonFiniteValue { row, col } => format!("data row {}, column `{}`: non-finite value", row + 1, names[col]),
            DataError::NonBinaryResponse { row, value } => {
                format!("column `{target}` must be 0 or 1 for classification; data row {} has {value}", row + 1)
            }
            DataError::NoFeatures => format!("no feature columns besides `{target}`"),
            other => other.to_string(),
        };
        CliError::Data(msg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Result<Table, CliError> {
        parse_table(text.as_bytes(), ',')
    }

    #[test]
    fn parses_quoted_headers_and_whitespace() {
        let t = table("\"a,b\",y\n 1.5 ,0\n-2,1\n").unwrap();
        assert_eq!(t.headers, vec!["a,b", "y"]);
        assert_eq!(t.columns, vec![vec![1.5, -2.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let err = table("a,y\n1,0\nabc,1\n").unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let msg = err.to_string();
        assert!(msg.contains("data row 2") && msg.contains("`a`") && msg.contains("abc"), "{msg}");
        assert!(table("a,y\n,0\n").is_err());
        assert!(table("a,y\nNaN,0\n").is_err());
    }

    #[test]
    fn ragged_rows_are_data_errors() {
        assert_eq!(table("a,y\n1,0,3\n").unwrap_err().exit_code(), 3);
    }

    #[test]
    fn task_detection() {
        let d = to_dataset(table("a,y\n1,0\n2,1\n3,0\n").unwrap(), "y", TaskArg::Auto).unwrap();
        assert_eq!(d.task(), TaskKind::BinaryClassification);
        let d = to_dataset(table("a,y\n1,0.5\n2,1\n3,0\n").unwrap(), "y", TaskArg::Auto).unwrap();
        assert_eq!(d.task(), TaskKind::Regression);
        let err = to_dataset(table("a,y\n1,2\n2,1\n").unwrap(), "y", TaskArg::Classify).unwrap_err();
        assert!(err.to_string().contains("data row 1"), "{err}");
    }

    #[test]
    fn unknown_target_is_usage_error() {
        let err = to_dataset(table("a,y\n1,0\n2,1\n").unwrap(), "z", TaskArg::Auto).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
