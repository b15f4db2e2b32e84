//! File formats: ASCII OFF meshes, the JSON edge-length sidecar, and fixed-precision
//! JSON output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{load_mesh, LengthSource, Mesh, MetricLengths};

/// Vertex coordinates and triangles as read from an OFF file.
#[derive(Debug, Clone, PartialEq)]
pub struct OffMesh {
    pub coords: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("OFF line {line}: {msg}"))
}

/// Parses ASCII OFF: an `OFF` header, a `V F E` count line, `V` coordinate rows and
/// `F` rows of the form `3 i j k`. `#` starts a comment; trailing per-row values
/// (colors) are ignored.
pub fn parse_off(text: &str) -> Result<OffMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(n, "missing OFF header"));
    }
    // Counts may share the header line.
    let rest: Vec<&str> = header_tokens.collect();
    let (n, counts): (usize, Vec<&str>) = if rest.is_empty() {
        let (n, l) = lines.next().ok_or_else(|| parse_err(n, "missing counts"))?;
        (n, l.split_whitespace().collect())
    } else {
        (n, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(n, "expected `V F E` counts"));
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| parse_err(n, format!("bad count {s:?}: {e}")))
    };
    let (nv, nf) = (count(counts[0])?, count(counts[1])?);

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::Parse("OFF: too few vertex rows".into()))?;
        let values: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| parse_err(n, format!("bad coordinate {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != 3 {
            return Err(parse_err(n, "vertex row needs three coordinates"));
        }
        coords.push([values[0], values[1], values[2]]);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::Parse("OFF: too few face rows".into()))?;
        let tokens: Vec<usize> = l
            .split_whitespace()
            .take(4)
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| parse_err(n, format!("bad index {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if tokens.first() != Some(&3) || tokens.len() != 4 {
            return Err(parse_err(n, "only triangles (`3 i j k`) are supported"));
        }
        faces.push([tokens[1], tokens[2], tokens[3]]);
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "unexpected trailing data"));
    }
    Ok(OffMesh { coords, faces })
}

pub fn write_off(coords: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut out = format!("OFF\n{} {} 0\n", coords.len(), faces.len());
    for p in coords {
        out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    for f in faces {
        out.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
    }
    out
}

/// `{"lengths": [[i, j, L], ...]}` with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSidecar {
    pub lengths: Vec<(usize, usize, f64)>,
}

impl LengthSidecar {
    pub fn from_metric(mesh: &Mesh, metric: &MetricLengths) -> Self {
        LengthSidecar {
            lengths: metric.to_edge_list(mesh),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let sidecar: LengthSidecar =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("length sidecar: {e}")))?;
        if let Some(&(i, j, _)) = sidecar.lengths.iter().find(|(i, j, _)| i >= j) {
            return Err(Error::Parse(format!(
                "length sidecar: pair ({i}, {j}) must have i < j"
            )));
        }
        Ok(sidecar)
    }
}

/// Builds the mesh and metric from OFF text, with lengths from the sidecar when given
/// and from the coordinates otherwise.
pub fn load_off(off: &str, sidecar: Option<&str>) -> Result<(OffMesh, Mesh, MetricLengths)> {
    let parsed = parse_off(off)?;
    let (mesh, metric) = match sidecar {
        Some(text) => {
            let side = LengthSidecar::parse(text)?;
            load_mesh(
                parsed.coords.len(),
                &parsed.faces,
                LengthSource::EdgeList(&side.lengths),
            )?
        }
        None => load_mesh(
            parsed.coords.len(),
            &parsed.faces,
            LengthSource::Coordinates(&parsed.coords),
        )?,
    };
    Ok((parsed, mesh, metric))
}

/// Writes every float with 17 significant digits in exponent form; non-finite
/// values become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl serde_json::ser::Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f32,
    ) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` with [`FixedPrecision`] floats, followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedPrecision);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
