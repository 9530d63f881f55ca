use std::fs;
use std::path::Path;

use super::{NormedSpace, VectorN};
use crate::error::{Error, Result};

fn bad(id: &str, reason: impl Into<String>) -> Error {
    Error::SpaceId { id: id.to_string(), reason: reason.into() }
}

fn parse_dim(id: &str, raw: &str) -> Result<usize> {
    raw.parse::<usize>().map_err(|_| bad(id, format!("`{raw}` is not a dimension")))
}

pub(super) fn resolve(id: &str) -> Result<NormedSpace> {
    let id = id.trim();
    if id == "dayjames" {
        return Ok(NormedSpace::day_james());
    }
    let (kind, rest) = id.split_once(':').ok_or_else(|| bad(id, "expected `<family>:...`"))?;
    match kind {
        "lp" => {
            let (p, dim) = rest.split_once(':').ok_or_else(|| bad(id, "expected `lp:<p>:<dim>`"))?;
            let dim = parse_dim(id, dim)?;
            if p == "inf" {
                NormedSpace::lp_inf(dim)
            } else {
                let p: f64 = p.parse().map_err(|_| bad(id, format!("`{p}` is not an exponent")))?;
                NormedSpace::lp(p, dim)
            }
        }
        "euclid" => NormedSpace::euclidean(parse_dim(id, rest)?),
        "poly" => {
            let points = parse_point_file(Path::new(rest))?;
            NormedSpace::polyhedral(id, points)
        }
        other => Err(bad(id, format!("unknown family `{other}`"))),
    }
}

/// Reads extreme points: one per line, coordinates separated by whitespace.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_point_file(path: &Path) -> Result<Vec<VectorN>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_points(&text).map_err(|reason| Error::SpaceId { id: format!("poly:{}", path.display()), reason })
}

fn parse_points(text: &str) -> std::result::Result<Vec<VectorN>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| format!("line {}: `{tok}` is not a number", lineno + 1)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.push(VectorN::new(coords).map_err(|e| format!("line {}: {e}", lineno + 1))?);
    }
    Ok(out)
}
