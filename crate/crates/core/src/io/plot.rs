use crate::error::{Error, Result};
use crate::harness::EndpointRow;
use crate::interval::Method;
use crate::io::report::RunManifest;

fn header(kind: &str, manifest: &RunManifest, columns: &[String], notes: &[&str]) -> String {
    let mut out = format!("# tailmean {kind}\n");
    out.push_str(&format!(
        "# seed={} config_digest={} tool_version={} source={}\n",
        manifest.seed, manifest.config_digest, manifest.tool_version, manifest.config_path
    ));
    for n in notes {
        out.push_str(&format!("# {n}\n"));
    }
    out.push_str(&format!("# columns: {}\n", columns.join(",")));
    out
}

fn csv_body(columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let map = |e: csv::Error| Error::Io(format!("cannot write plot data: {e}"));
    w.write_record(columns).map_err(map)?;
    for r in rows {
        w.write_record(r).map_err(map)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v}"),
        Some(v) if v > 0.0 => "inf".into(),
        Some(v) if v < 0.0 => "-inf".into(),
        _ => String::new(),
    }
}

/// Endpoint-versus-k plot data: `k`, `n1`, `<method>_lower`,
/// `<method>_upper` per method, and `error` naming any failed method.
pub fn write_endpoint_plot(manifest: &RunManifest, level: f64, methods: &[Method], rows: &[EndpointRow]) -> Result<String> {
    let mut columns = vec!["k".to_string(), "n1".to_string()];
    for m in methods {
        columns.push(format!("{m}_lower"));
        columns.push(format!("{m}_upper"));
    }
    columns.push("error".into());
    let note = format!("confidence level {level}; empty endpoints mark a failed method, see error");
    let mut body = Vec::new();
    for r in rows {
        let mut line = vec![r.k.to_string(), r.n1.to_string()];
        let mut errors = Vec::new();
        for m in methods {
            let cell = r.cells.iter().find(|c| c.method == *m);
            line.push(num(cell.and_then(|c| c.lower)));
            line.push(num(cell.and_then(|c| c.upper)));
            if let Some(e) = cell.and_then(|c| c.error.as_ref()) {
                errors.push(format!("{m}: {e}"));
            }
        }
        line.push(errors.join("; "));
        body.push(line);
    }
    Ok(header("sweep", manifest, &columns, &[&note]) + &csv_body(&columns, &body)?)
}

/// Hill plot data: `k`, `alpha_hill`.
pub fn write_hill_plot(manifest: &RunManifest, points: &[(usize, f64)]) -> Result<String> {
    let columns = vec!["k".to_string(), "alpha_hill".to_string()];
    let body: Vec<Vec<String>> = points
        .iter()
        .map(|(k, a)| vec![k.to_string(), format!("{a}")])
        .collect();
    Ok(header("hill-diag", manifest, &columns, &["right-tail Hill estimate per k"]) + &csv_body(&columns, &body)?)
}
