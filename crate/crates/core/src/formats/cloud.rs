//! Voxel cloud files: a PLY dialect with integer voxel indices and the seven
//! attributes per vertex.
//!
//! ```text
//! ply
//! format ascii 1.0                      (or binary_little_endian 1.0)
//! comment voxelight dims 64 64 64
//! comment voxelight voxel_size 1
//! element vertex 2
//! property int x
//! property int y
//! property int z
//! property float r_t                    (uchar when quantized)
//! ... g_t b_t r_a g_a b_a d
//! end_header
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::CloudError;
use crate::model::{GridDims, VoxelAttributes, VoxelCoord, VoxelGrid, ATTRIBUTE_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Ascii,
    BinaryLittleEndian,
}

impl Encoding {
    fn keyword(self) -> &'static str {
        match self {
            Encoding::Ascii => "ascii",
            Encoding::BinaryLittleEndian => "binary_little_endian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantization {
    Float32,
    Uint8,
}

impl Quantization {
    fn keyword(self) -> &'static str {
        match self {
            Quantization::Float32 => "float",
            Quantization::Uint8 => "uchar",
        }
    }

    fn from_keyword(ty: &str) -> Option<Self> {
        match ty {
            "float" | "float32" => Some(Quantization::Float32),
            "uchar" | "uint8" => Some(Quantization::Uint8),
            _ => None,
        }
    }

    fn attribute_bytes(self) -> usize {
        match self {
            Quantization::Float32 => 4,
            Quantization::Uint8 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudHeader {
    pub dims: GridDims,
    pub voxel_size: f64,
    pub count: usize,
    pub encoding: Encoding,
    pub quantization: Quantization,
}

const COORD_NAMES: [&str; 3] = ["x", "y", "z"];

/// `v → round(255 v)`.
pub fn quantize_u8(v: f32) -> u8 {
    (v * 255.0).round() as u8
}

pub fn dequantize_u8(q: u8) -> f32 {
    q as f32 / 255.0
}

fn header_error(line: usize, reason: impl Into<String>) -> CloudError {
    CloudError::MalformedHeader {
        line,
        reason: reason.into(),
    }
}

/// Splits off and parses the header; returns it with the byte offset of the
/// body.
pub fn parse_header(bytes: &[u8]) -> Result<(CloudHeader, usize), CloudError> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut next_line = || -> Option<(usize, &str)> {
        if pos >= bytes.len() {
            return None;
        }
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| pos + i);
        let raw = &bytes[pos..end];
        pos = (end + 1).min(bytes.len());
        line_no += 1;
        let text = std::str::from_utf8(raw).unwrap_or("\u{fffd}");
        Some((line_no, text.trim_end_matches('\r')))
    };

    match next_line() {
        Some((_, "ply")) => {}
        _ => return Err(header_error(1, "expected 'ply' magic")),
    }
    let (line, fmt) = next_line().ok_or_else(|| header_error(2, "missing format line"))?;
    let encoding = match fmt.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["format", "ascii", "1.0"] => Encoding::Ascii,
        ["format", "binary_little_endian", "1.0"] => Encoding::BinaryLittleEndian,
        _ => {
            return Err(header_error(
                line,
                format!("unsupported format line {fmt:?}"),
            ))
        }
    };

    let mut dims = None;
    let mut voxel_size = None;
    let mut count = None;
    let mut properties: Vec<(usize, String, String)> = Vec::new();
    let mut last_line = line;
    loop {
        let Some((line, text)) = next_line() else {
            return Err(header_error(last_line + 1, "missing end_header"));
        };
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["comment", "voxelight", "dims", x, y, z] => {
                let parse = |s: &str| s.parse::<u32>().ok().filter(|&v| v > 0);
                match (parse(x), parse(y), parse(z)) {
                    (Some(x), Some(y), Some(z)) => dims = Some(GridDims::new(x, y, z)),
                    _ => return Err(header_error(line, "dims must be three positive integers")),
                }
            }
            ["comment", "voxelight", "voxel_size", s] => match s.parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => voxel_size = Some(v),
                _ => return Err(header_error(line, "voxel_size must be positive")),
            },
            ["comment", "voxelight", ..] => {
                return Err(header_error(
                    line,
                    format!("unknown voxelight comment {text:?}"),
                ))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", "vertex", n] => {
                if count.is_some() {
                    return Err(header_error(line, "duplicate vertex element"));
                }
                count = Some(
                    n.parse::<usize>()
                        .map_err(|_| header_error(line, "vertex count must be an integer"))?,
                );
            }
            ["element", name, ..] => {
                return Err(header_error(line, format!("unsupported element {name:?}")))
            }
            ["property", ty, name] => {
                if count.is_none() {
                    return Err(header_error(line, "property before element vertex"));
                }
                if !COORD_NAMES.contains(name) && !ATTRIBUTE_NAMES.contains(name) {
                    return Err(CloudError::UnknownProperty(name.to_string()));
                }
                properties.push((line, ty.to_string(), name.to_string()));
            }
            _ => {
                return Err(header_error(
                    line,
                    format!("unexpected header line {text:?}"),
                ))
            }
        }
    }

    let dims = dims.ok_or_else(|| header_error(last_line, "missing 'comment voxelight dims'"))?;
    let voxel_size = voxel_size
        .ok_or_else(|| header_error(last_line, "missing 'comment voxelight voxel_size'"))?;
    let count = count.ok_or_else(|| header_error(last_line, "missing element vertex"))?;

    let expected: Vec<&str> = COORD_NAMES
        .iter()
        .chain(ATTRIBUTE_NAMES.iter())
        .copied()
        .collect();
    if properties.len() != expected.len() {
        return Err(header_error(
            last_line,
            format!(
                "expected {} properties, found {}",
                expected.len(),
                properties.len()
            ),
        ));
    }
    let mut quantization = None;
    for ((line, ty, name), want) in properties.iter().zip(expected.iter()) {
        if name != want {
            return Err(header_error(
                *line,
                format!("expected property {want}, found {name}"),
            ));
        }
        if COORD_NAMES.contains(&name.as_str()) {
            if ty != "int" && ty != "int32" {
                return Err(header_error(
                    *line,
                    format!("coordinate {name} must be int"),
                ));
            }
            continue;
        }
        let q = Quantization::from_keyword(ty).ok_or_else(|| {
            header_error(*line, format!("attribute {name} must be float or uchar"))
        })?;
        match quantization {
            None => quantization = Some(q),
            Some(prev) if prev != q => {
                return Err(header_error(*line, "attributes must share one type"))
            }
            _ => {}
        }
    }

    Ok((
        CloudHeader {
            dims,
            voxel_size,
            count,
            encoding,
            quantization: quantization.expect("seven attribute properties"),
        },
        pos,
    ))
}

struct Record {
    coord: VoxelCoord,
    values: [f32; 7],
}

fn decode_ascii(
    body: &[u8],
    header: &CloudHeader,
    errors: &mut Vec<CloudError>,
) -> Result<Vec<Record>, CloudError> {
    let text = std::str::from_utf8(body).map_err(|e| CloudError::MalformedRecord {
        record: 0,
        reason: format!("body is not valid text: {e}"),
    })?;
    let mut tokens = text.split_ascii_whitespace();
    let mut records = Vec::with_capacity(header.count);
    'records: for record in 0..header.count {
        let mut fields = [""; 10];
        for (i, slot) in fields.iter_mut().enumerate() {
            match tokens.next() {
                Some(t) => *slot = t,
                None if i == 0 => {
                    return Err(CloudError::TruncatedBody {
                        expected: header.count,
                        got: record,
                    })
                }
                None => {
                    return Err(CloudError::TruncatedBody {
                        expected: header.count,
                        got: record,
                    })
                }
            }
        }
        let mut coord = [0i64; 3];
        for (c, f) in coord.iter_mut().zip(&fields[..3]) {
            match f.parse::<i32>() {
                Ok(v) => *c = v as i64,
                Err(_) => {
                    errors.push(CloudError::MalformedRecord {
                        record,
                        reason: format!("bad coordinate {f:?}"),
                    });
                    continue 'records;
                }
            }
        }
        let mut values = [0f32; 7];
        for (v, f) in values.iter_mut().zip(&fields[3..]) {
            let parsed = match header.quantization {
                Quantization::Float32 => f.parse::<f32>().ok(),
                Quantization::Uint8 => f.parse::<u8>().ok().map(dequantize_u8),
            };
            match parsed {
                Some(p) => *v = p,
                None => {
                    errors.push(CloudError::MalformedRecord {
                        record,
                        reason: format!("bad attribute value {f:?}"),
                    });
                    continue 'records;
                }
            }
        }
        records.push(Record {
            coord: VoxelCoord::new(coord[0], coord[1], coord[2]),
            values,
        });
    }
    if tokens.next().is_some() {
        errors.push(CloudError::MalformedRecord {
            record: header.count,
            reason: "data after the last record".into(),
        });
    }
    Ok(records)
}

fn decode_binary(
    body: &[u8],
    header: &CloudHeader,
    errors: &mut Vec<CloudError>,
) -> Result<Vec<Record>, CloudError> {
    let stride = 12 + 7 * header.quantization.attribute_bytes();
    let needed = header.count.checked_mul(stride);
    if needed.is_none_or(|n| body.len() < n) {
        return Err(CloudError::TruncatedBody {
            expected: header.count,
            got: body.len() / stride,
        });
    }
    let records = body
        .chunks_exact(stride)
        .take(header.count)
        .map(|rec| {
            let int =
                |i: usize| i32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().unwrap()) as i64;
            let attrs = &rec[12..];
            let values = std::array::from_fn(|i| match header.quantization {
                Quantization::Float32 => {
                    f32::from_le_bytes(attrs[4 * i..4 * i + 4].try_into().unwrap())
                }
                Quantization::Uint8 => dequantize_u8(attrs[i]),
            });
            Record {
                coord: VoxelCoord::new(int(0), int(1), int(2)),
                values,
            }
        })
        .collect();
    if body.len() > header.count * stride {
        errors.push(CloudError::MalformedRecord {
            record: header.count,
            reason: "data after the last record".into(),
        });
    }
    Ok(records)
}

/// Parses the whole file, collecting every record-level violation. Header and
/// truncation problems stop the read immediately. The grid holds all valid
/// records.
fn read_cloud(bytes: &[u8]) -> (Option<CloudHeader>, Option<VoxelGrid>, Vec<CloudError>) {
    let (header, offset) = match parse_header(bytes) {
        Ok(h) => h,
        Err(e) => return (None, None, vec![e]),
    };
    let mut errors = Vec::new();
    let body = &bytes[offset..];
    let records = match header.encoding {
        Encoding::Ascii => decode_ascii(body, &header, &mut errors),
        Encoding::BinaryLittleEndian => decode_binary(body, &header, &mut errors),
    };
    let records = match records {
        Ok(r) => r,
        Err(e) => {
            errors.push(e);
            return (Some(header), None, errors);
        }
    };
    let mut grid = VoxelGrid::new(header.dims, header.voxel_size).expect("validated header");
    let mut seen = HashSet::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        if !header.dims.contains(rec.coord) {
            errors.push(CloudError::OutOfBoundsVoxel(rec.coord));
            continue;
        }
        if !seen.insert(rec.coord) {
            errors.push(CloudError::DuplicateVoxel(rec.coord));
            continue;
        }
        match VoxelAttributes::from_array(rec.values) {
            Ok(attrs) => grid.set(rec.coord, attrs).expect("in bounds"),
            Err(_) => {
                let (field, value) = ATTRIBUTE_NAMES
                    .iter()
                    .zip(rec.values)
                    .find(|(_, v)| !(0.0..=1.0).contains(v))
                    .expect("an out-of-range field");
                errors.push(CloudError::OutOfRangeAttribute {
                    record: i,
                    field,
                    value: value as f64,
                });
            }
        }
    }
    (Some(header), Some(grid), errors)
}

/// Parses a cloud file, failing on the first violation in file order.
pub fn parse_cloud(bytes: &[u8]) -> Result<VoxelGrid, CloudError> {
    let (_, grid, errors) = read_cloud(bytes);
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(grid.expect("grid without errors")),
    }
}

/// Every violation found in a cloud file; empty when the file is valid.
pub fn validate_cloud(bytes: &[u8]) -> Vec<CloudError> {
    read_cloud(bytes).2
}

/// Header and grid of a valid cloud file.
pub fn read_cloud_with_header(bytes: &[u8]) -> Result<(CloudHeader, VoxelGrid), CloudError> {
    let (header, grid, errors) = read_cloud(bytes);
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok((header.expect("header"), grid.expect("grid"))),
    }
}

pub fn write_header(header: &CloudHeader) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ply");
    let _ = writeln!(out, "format {} 1.0", header.encoding.keyword());
    let d = header.dims;
    let _ = writeln!(out, "comment voxelight dims {} {} {}", d.x, d.y, d.z);
    let _ = writeln!(out, "comment voxelight voxel_size {}", header.voxel_size);
    let _ = writeln!(out, "element vertex {}", header.count);
    for name in COORD_NAMES {
        let _ = writeln!(out, "property int {name}");
    }
    for name in ATTRIBUTE_NAMES {
        let _ = writeln!(out, "property {} {name}", header.quantization.keyword());
    }
    let _ = writeln!(out, "end_header");
    out
}

/// Canonical encoding: cells in `(z, y, x)` order.
pub fn serialize_cloud(
    grid: &VoxelGrid,
    encoding: Encoding,
    quantization: Quantization,
) -> Vec<u8> {
    let cells = grid.sorted_cells();
    let header = CloudHeader {
        dims: grid.dims(),
        voxel_size: grid.voxel_size(),
        count: cells.len(),
        encoding,
        quantization,
    };
    let mut out = write_header(&header).into_bytes();
    match encoding {
        Encoding::Ascii => {
            let mut line = String::new();
            for (c, attrs) in &cells {
                line.clear();
                let _ = write!(line, "{} {} {}", c.x, c.y, c.z);
                for v in attrs.to_array() {
                    let _ = match quantization {
                        Quantization::Float32 => write!(line, " {v}"),
                        Quantization::Uint8 => write!(line, " {}", quantize_u8(v)),
                    };
                }
                line.push('\n');
                out.extend_from_slice(line.as_bytes());
            }
        }
        Encoding::BinaryLittleEndian => {
            for (c, attrs) in &cells {
                for coord in [c.x, c.y, c.z] {
                    out.extend_from_slice(&(coord as i32).to_le_bytes());
                }
                for v in attrs.to_array() {
                    match quantization {
                        Quantization::Float32 => out.extend_from_slice(&v.to_le_bytes()),
                        Quantization::Uint8 => out.push(quantize_u8(v)),
                    }
                }
            }
        }
    }
    out
}
