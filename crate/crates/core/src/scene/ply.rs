//! Minimal PLY vertex reader (ASCII and binary little-endian) for colored
//! point clouds.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColoredPoint {
    pub position: [f64; 3],
    pub color: [u8; 3],
}

#[derive(Debug, Error)]
pub enum PlyError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported PLY variant: {0}")]
    Unsupported(String),
    #[error("truncated payload: header declares {expected} vertices, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("vertex {index}: {message}")]
    BadValue { index: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn width(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_float(self) -> bool {
        matches!(self, Scalar::F32 | Scalar::F64)
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
        }
    }
}

#[derive(Debug, PartialEq)]
enum Encoding {
    Ascii,
    BinaryLittleEndian,
}

struct Header {
    encoding: Encoding,
    vertex_count: usize,
    properties: Vec<(String, Scalar)>,
    body_offset: usize,
}

/// Positions of x, y, z, red, green, blue within the vertex record.
struct Layout {
    slots: [usize; 6],
}

fn find_header_end(bytes: &[u8]) -> Option<usize> {
    const MARK: &[u8] = b"end_header";
    let pos = bytes.windows(MARK.len()).position(|w| w == MARK)?;
    let mut end = pos + MARK.len();
    if bytes.get(end) == Some(&b'\r') {
        end += 1;
    }
    if bytes.get(end) == Some(&b'\n') {
        end += 1;
    }
    Some(end)
}

fn parse_header(bytes: &[u8]) -> Result<Header, PlyError> {
    let body_offset =
        find_header_end(bytes).ok_or_else(|| PlyError::Header("missing end_header".into()))?;
    let text = std::str::from_utf8(&bytes[..body_offset])
        .map_err(|_| PlyError::Header("header is not valid UTF-8".into()))?;
    let mut lines = text.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(PlyError::Header("missing 'ply' magic".into()));
    }
    let mut encoding = None;
    let mut vertex_count = None;
    let mut properties = Vec::new();
    let mut in_vertex = false;
    let mut seen_element = false;
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] | ["end_header"] => {}
            ["format", fmt, _version] => {
                encoding = Some(match *fmt {
                    "ascii" => Encoding::Ascii,
                    "binary_little_endian" => Encoding::BinaryLittleEndian,
                    other => return Err(PlyError::Unsupported(format!("format {other}"))),
                });
            }
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| PlyError::Header(format!("bad element count '{count}'")))?;
                if *name == "vertex" {
                    if seen_element {
                        return Err(PlyError::Unsupported(
                            "vertex must be the first element".into(),
                        ));
                    }
                    vertex_count = Some(count);
                    in_vertex = true;
                } else {
                    in_vertex = false;
                }
                seen_element = true;
            }
            ["property", "list", ..] => {
                if in_vertex {
                    return Err(PlyError::Unsupported(
                        "list property on vertex element".into(),
                    ));
                }
            }
            ["property", ty, name] => {
                if in_vertex {
                    let scalar = Scalar::parse(ty)
                        .ok_or_else(|| PlyError::Header(format!("unknown property type '{ty}'")))?;
                    properties.push((name.to_string(), scalar));
                }
            }
            _ => return Err(PlyError::Header(format!("unrecognized line '{line}'"))),
        }
    }
    Ok(Header {
        encoding: encoding.ok_or_else(|| PlyError::Header("missing format line".into()))?,
        vertex_count: vertex_count.ok_or_else(|| PlyError::Header("no vertex element".into()))?,
        properties,
        body_offset,
    })
}

fn layout(props: &[(String, Scalar)]) -> Result<Layout, PlyError> {
    let find = |names: &[&str]| {
        props
            .iter()
            .position(|(n, _)| names.contains(&n.as_str()))
            .ok_or_else(|| PlyError::Header(format!("missing vertex property {}", names[0])))
    };
    Ok(Layout {
        slots: [
            find(&["x"])?,
            find(&["y"])?,
            find(&["z"])?,
            find(&["red", "r", "diffuse_red"])?,
            find(&["green", "g", "diffuse_green"])?,
            find(&["blue", "b", "diffuse_blue"])?,
        ],
    })
}

fn to_channel(value: f64, scalar: Scalar, index: usize) -> Result<u8, PlyError> {
    let v = if scalar.is_float() {
        value * 255.0
    } else {
        value
    };
    let v = v.round();
    if !(0.0..=255.0).contains(&v) {
        return Err(PlyError::BadValue {
            index,
            message: format!("color channel {value} out of range"),
        });
    }
    Ok(v as u8)
}

fn assemble(
    values: &[f64],
    header: &Header,
    layout: &Layout,
    index: usize,
) -> Result<ColoredPoint, PlyError> {
    let s = layout.slots;
    let ch = |k: usize| to_channel(values[s[k]], header.properties[s[k]].1, index);
    Ok(ColoredPoint {
        position: [values[s[0]], values[s[1]], values[s[2]]],
        color: [ch(3)?, ch(4)?, ch(5)?],
    })
}

/// Decodes every vertex of a PLY document in file order.
pub fn parse_points_bytes(bytes: &[u8]) -> Result<Vec<ColoredPoint>, PlyError> {
    let header = parse_header(bytes)?;
    let layout = layout(&header.properties)?;
    let body = &bytes[header.body_offset..];
    let mut out = Vec::with_capacity(header.vertex_count);
    match header.encoding {
        Encoding::Ascii => {
            let text = String::from_utf8_lossy(body);
            let mut lines = text.lines().filter(|l| !l.trim().is_empty());
            for index in 0..header.vertex_count {
                let Some(line) = lines.next() else {
                    return Err(PlyError::Truncated {
                        expected: header.vertex_count,
                        found: index,
                    });
                };
                let values = line
                    .split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| PlyError::BadValue {
                        index,
                        message: e.to_string(),
                    })?;
                if values.len() < header.properties.len() {
                    return Err(PlyError::BadValue {
                        index,
                        message: format!(
                            "expected {} values, got {}",
                            header.properties.len(),
                            values.len()
                        ),
                    });
                }
                out.push(assemble(&values, &header, &layout, index)?);
            }
        }
        Encoding::BinaryLittleEndian => {
            let stride: usize = header.properties.iter().map(|(_, s)| s.width()).sum();
            let available = body.len().checked_div(stride).unwrap_or(0);
            if available < header.vertex_count {
                return Err(PlyError::Truncated {
                    expected: header.vertex_count,
                    found: available,
                });
            }
            let mut values = vec![0.0; header.properties.len()];
            for (index, record) in body
                .chunks_exact(stride)
                .take(header.vertex_count)
                .enumerate()
            {
                let mut offset = 0;
                for (slot, (_, scalar)) in header.properties.iter().enumerate() {
                    values[slot] = scalar.read_le(&record[offset..offset + scalar.width()]);
                    offset += scalar.width();
                }
                out.push(assemble(&values, &header, &layout, index)?);
            }
        }
    }
    Ok(out)
}

pub fn parse_points(path: impl AsRef<Path>) -> Result<Vec<ColoredPoint>, PlyError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| PlyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_points_bytes(&bytes)
}

/// Serializes points as binary little-endian PLY (float32 xyz, uchar rgb).
pub fn write_binary_le(points: &[ColoredPoint]) -> Vec<u8> {
    let mut out = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        points.len()
    )
    .into_bytes();
    for p in points {
        for c in p.position {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        out.extend_from_slice(&p.color);
    }
    out
}
