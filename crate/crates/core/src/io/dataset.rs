use crate::error::{Error, Result};
use std::path::Path;

/// Reads one numeric column of a comma-separated file.
pub fn read_dataset(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset(&text, column)
}

/// Parses one numeric column of comma-separated text.
///
/// The first record is a header when any of its cells is not a number.
/// `column` is a header name, or else a zero-based index. Blank lines are
/// skipped; every value must be finite.
pub fn parse_dataset(text: &str, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let first = match records.next() {
        Some(r) => r.map_err(|e| Error::Data(format!("malformed CSV: {e}")))?,
        None => return Err(Error::Data("dataset is empty".into())),
    };
    let is_header = first.iter().any(|cell| cell.parse::<f64>().is_err());
    let header: Vec<String> = if is_header {
        first.iter().map(str::to_string).collect()
    } else {
        Vec::new()
    };
    let index = resolve_column(&header, column, first.len())?;

    let mut values = Vec::new();
    let mut push = |record: &csv::StringRecord| -> Result<()> {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            return Ok(());
        }
        let cell = record.get(index).ok_or_else(|| {
            Error::Data(format!("line {line}: no column {} ({} fields)", index + 1, record.len()))
        })?;
        let v: f64 = cell.parse().map_err(|_| {
            Error::Data(format!("line {line}, column {}: {cell:?} is not a number", index + 1))
        })?;
        if !v.is_finite() {
            return Err(Error::Data(format!(
                "line {line}, column {}: non-finite value {cell:?}",
                index + 1
            )));
        }
        values.push(v);
        Ok(())
    };
    if !is_header {
        push(&first)?;
    }
    for record in records {
        let record = record.map_err(|e| Error::Data(format!("malformed CSV: {e}")))?;
        push(&record)?;
    }
    if values.is_empty() {
        return Err(Error::Data("dataset has no values".into()));
    }
    Ok(values)
}

fn resolve_column(header: &[String], column: &str, width: usize) -> Result<usize> {
    if let Some(i) = header.iter().position(|h| h == column) {
        return Ok(i);
    }
    if let Ok(i) = column.parse::<usize>() {
        if i < width {
            return Ok(i);
        }
    }
    let available = if header.is_empty() {
        format!("indices 0..{width}")
    } else {
        header.join(", ")
    };
    Err(Error::Data(format!("column {column:?} not found; available: {available}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_name() {
        assert_eq!(parse_dataset("x\n1.5\n2.0\n", "x").unwrap(), vec![1.5, 2.0]);
        assert_eq!(parse_dataset("a,b\n1,10\n2,20\n", "b").unwrap(), vec![10.0, 20.0]);
        assert_eq!(parse_dataset("a,b\n1,10\n2,20\n", "0").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn headerless_and_notation() {
        assert_eq!(parse_dataset("1e3\n-2.5\n\n7\n", "0").unwrap(), vec![1000.0, -2.5, 7.0]);
    }

    #[test]
    fn missing_column_lists_names() {
        let e = parse_dataset("loss,year\n1,2\n", "amount").unwrap_err().to_string();
        assert!(e.contains("loss") && e.contains("year"), "{e}");
    }

    #[test]
    fn bad_cells() {
        let e = parse_dataset("x\n1\nabc\n", "x").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        assert!(matches!(parse_dataset("x\n1\ninf\n", "x"), Err(Error::Data(_))));
        assert!(matches!(parse_dataset("", "0"), Err(Error::Data(_))));
        assert!(matches!(parse_dataset("x\n", "x"), Err(Error::Data(_))));
        assert!(matches!(parse_dataset("a,b\n1,2\n3\n", "b"), Err(Error::Data(_))));
    }

    #[test]
    fn reads_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "v\n3\n4\n").unwrap();
        assert_eq!(read_dataset(&p, "v").unwrap(), vec![3.0, 4.0]);
        assert!(matches!(read_dataset(&dir.path().join("nope"), "v"), Err(Error::Io(_))));
    }
}
