use std::fs;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::{OutputFormat, OutputTarget};
use crate::error::CliError;

pub fn open(target: &OutputTarget) -> Result<Box<dyn Write>, CliError> {
    Ok(match target {
        OutputTarget::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
        OutputTarget::File(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(fs::File::create(path)?))
        }
    })
}

/// Writes `rows` as CSV with the given header, or as a JSON array of flat
/// objects. An empty CSV table still has its header.
pub fn write_rows<T: Serialize>(
    w: &mut dyn Write,
    format: OutputFormat,
    header: &[&str],
    rows: &[T],
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let mut out = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut *w);
            out.write_record(header)?;
            for row in rows {
                out.serialize(row)?;
            }
            out.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
