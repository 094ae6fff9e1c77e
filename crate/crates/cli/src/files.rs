use std::fs;
use std::path::Path;

use blowup_core::embedder::{verify_embedding, VerificationReport};
use blowup_core::graph::io::{parse_host, parse_map, parse_pattern};
use blowup_core::graph::PartitionedHost;
use blowup_core::{Error, Pattern, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_host(path: &Path) -> Result<PartitionedHost> {
    parse_host(&read(path)?).map_err(|e| in_file(path, e))
}

/// Reads a pattern and binds it to the host's cluster graph.
pub fn read_pattern(path: &Path, host: &PartitionedHost, max_degree: Option<usize>) -> Result<Pattern> {
    let file = parse_pattern(&read(path)?).map_err(|e| in_file(path, e))?;
    file.bind(host, max_degree)
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

/// Re-checks a stored embedding against its pattern and host files.
pub fn verify_file(pattern_file: &Path, host_file: &Path, map_file: &Path) -> Result<VerificationReport> {
    let host = read_host(host_file)?;
    let pattern = read_pattern(pattern_file, &host, None)?;
    let map = parse_map(&read(map_file)?).map_err(|e| in_file(map_file, e))?;
    let n = pattern.vertex_count();
    let mut phi = vec![None; n];
    for (x, v) in map {
        if x >= n {
            return Err(Error::arg(format!("map entry for pattern vertex {x}, but the pattern has {n} vertices")));
        }
        phi[x] = Some(v);
    }
    Ok(verify_embedding(&pattern, &host, &phi))
}
