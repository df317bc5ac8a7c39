use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::manifest::RunManifest;
use crate::CliError;

/// One emitted document.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    pub fn json(file_name: impl Into<String>, value: &impl Serialize) -> Result<Self, CliError> {
        let mut contents = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        contents.push('\n');
        Ok(Artifact {
            file_name: file_name.into(),
            contents,
        })
    }
}

/// Everything a subcommand produced.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    /// Goes to stdout when no output directory is given.
    pub primary: Artifact,
    /// Go to stderr when no output directory is given.
    pub sidecars: Vec<Artifact>,
    pub manifest: RunManifest,
    /// `false` when a verification inside the command failed.
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Writes all artifacts plus the manifest into `dir`, or the primary artifact
/// to `stdout` and the rest to `stderr`.
pub fn emit(
    mut output: CommandOutput,
    dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            output.manifest.outputs = std::iter::once(&output.primary)
                .chain(&output.sidecars)
                .map(|a| a.file_name.clone())
                .collect();
            for a in std::iter::once(&output.primary).chain(&output.sidecars) {
                std::fs::write(dir.join(&a.file_name), &a.contents).map_err(io)?;
            }
            let m = Artifact::json(output.manifest.file_name(), &output.manifest)?;
            std::fs::write(dir.join(&m.file_name), &m.contents).map_err(io)?;
        }
        None => {
            stdout.write_all(output.primary.contents.as_bytes()).map_err(io)?;
            for a in &output.sidecars {
                stderr.write_all(a.contents.as_bytes()).map_err(io)?;
            }
            let m = Artifact::json(output.manifest.file_name(), &output.manifest)?;
            stderr.write_all(m.contents.as_bytes()).map_err(io)?;
        }
    }
    for f in &output.failures {
        writeln!(stderr, "check failed: {f}").map_err(io)?;
    }
    Ok(())
}

/// Locale-independent number formatting for CSV cells.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV text with a header row and a trailing newline.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_num).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-3.0), "-3");
        assert_eq!(fmt_num(1.5e-300), "1.5e-300");
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], vec![vec![1.0, 0.5], vec![2.0, -0.5]]);
        assert_eq!(s, "a,b\n1,0.5\n2,-0.5\n");
    }
}
