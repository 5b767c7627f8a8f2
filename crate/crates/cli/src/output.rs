//! Artifact assembly and emission: every subcommand reduces to a header
//! (request echo + displacement strategy) plus a column-oriented table,
//! rendered as CSV or JSON and written to stdout or atomically to a file.

use std::io::Write;
use std::path::Path;

use bhd_core::Result;

pub const TOOL: &str = "bhd";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table value. `Missing` renders as an empty CSV field / JSON `null`.
#[derive(Debug, Clone)]
pub enum Cell {
    Count(u64),
    Real(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Count(n) => n.to_string(),
            Cell::Real(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Count(n) => serde_json::Value::from(*n),
            Cell::Real(x) => serde_json::Value::from(*x),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Flag(b) => serde_json::Value::from(*b),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

/// A fully computed result set, ready to render in either format.
pub struct Artifact {
    /// Canonical echo of the request that produced this artifact.
    pub request: String,
    /// How the displacement α was chosen for the values in the table.
    pub alpha_strategy: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(artifact: &Artifact, format: Format) -> String {
    match format {
        Format::Csv => render_csv(artifact),
        Format::Json => render_json(artifact),
    }
}

fn render_csv(a: &Artifact) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool: {TOOL} {VERSION}\n"));
    out.push_str(&format!("# request: {}\n", a.request));
    out.push_str(&format!("# alpha-strategy: {}\n", a.alpha_strategy));
    out.push_str(&a.columns.join(","));
    out.push('\n');
    for row in &a.rows {
        debug_assert_eq!(row.len(), a.columns.len());
        let fields: Vec<String> = row.iter().map(Cell::to_csv).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn render_json(a: &Artifact) -> String {
    let data: Vec<serde_json::Value> = a
        .rows
        .iter()
        .map(|row| {
            debug_assert_eq!(row.len(), a.columns.len());
            let record: serde_json::Map<String, serde_json::Value> = a
                .columns
                .iter()
                .zip(row)
                .map(|(&col, cell)| (col.to_string(), cell.to_json()))
                .collect();
            serde_json::Value::Object(record)
        })
        .collect();
    let doc = serde_json::json!({
        "meta": {
            "tool": TOOL,
            "version": VERSION,
            "request": a.request,
            "alpha_strategy": a.alpha_strategy,
        },
        "data": data,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("plain JSON document");
    text.push('\n');
    text
}

/// Writes `text` to `path` via a sibling temp file and an atomic rename, so
/// no partial artifact ever appears under the target name.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| bhd_core::Error::Io(e.error))?;
    Ok(())
}

/// Sends the rendered artifact to the file (atomically) or stdout.
pub fn emit(artifact: &Artifact, format: Format, out: Option<&Path>) -> Result<()> {
    let text = render(artifact, format);
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
