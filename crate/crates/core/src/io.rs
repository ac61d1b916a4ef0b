//! Point-cloud file IO: PLY (ASCII and binary little-endian), XYZ and CSV.
//!
//! PLY support covers the `vertex` element with `x`, `y`, `z` and optional
//! `red`/`green`/`blue` (or `r`/`g`/`b`) `uchar` colors. Other vertex
//! properties are skipped with a warning. Elements other than `vertex` are
//! skipped when they can be sized from the header.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud, Rgb};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    PlyAscii,
    PlyBinaryLe,
    Xyz,
    Csv,
    /// Inferred from the extension, then from the file's magic bytes.
    Auto,
}

impl FromStr for CloudFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ply-ascii" => Ok(CloudFormat::PlyAscii),
            "ply-binary-le" | "ply" => Ok(CloudFormat::PlyBinaryLe),
            "xyz" => Ok(CloudFormat::Xyz),
            "csv" => Ok(CloudFormat::Csv),
            "auto" => Ok(CloudFormat::Auto),
            other => Err(format!(
                "unknown format `{other}` (expected ply-ascii, ply-binary-le, xyz, csv or auto)"
            )),
        }
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
}

pub fn load_point_cloud(path: impl AsRef<Path>, format: CloudFormat) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let format = match format {
        CloudFormat::Auto => sniff_format(path, &bytes),
        f => f,
    };
    match format {
        CloudFormat::Xyz => parse_xyz(path, &bytes),
        CloudFormat::Csv => parse_csv(path, &bytes),
        CloudFormat::PlyAscii | CloudFormat::PlyBinaryLe | CloudFormat::Auto => parse_ply(path, &bytes),
    }
}

fn sniff_format(path: &Path, bytes: &[u8]) -> CloudFormat {
    match extension(path).as_deref() {
        Some("ply") => CloudFormat::PlyBinaryLe,
        Some("xyz") | Some("txt") | Some("pts") => CloudFormat::Xyz,
        Some("csv") => CloudFormat::Csv,
        _ if bytes.starts_with(b"ply\n") || bytes.starts_with(b"ply\r\n") => CloudFormat::PlyBinaryLe,
        _ => CloudFormat::Xyz,
    }
}

/// Loads and multiplies every coordinate by `unit_scale` (file units to mm).
pub fn load_scaled(path: impl AsRef<Path>, format: CloudFormat, unit_scale: f64) -> Result<PointCloud> {
    let cloud = load_point_cloud(path, format)?;
    if unit_scale == 1.0 {
        Ok(cloud)
    } else {
        Error::positive("unit scale", unit_scale)?;
        Ok(cloud.scaled(unit_scale))
    }
}

fn parse_error(path: &Path, location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        location,
        message: message.into(),
    }
}

fn text<'a>(path: &Path, bytes: &'a [u8]) -> Result<&'a str> {
    std::str::from_utf8(bytes).map_err(|e| parse_error(path, format!("byte {}", e.valid_up_to()), "invalid UTF-8"))
}

fn parse_xyz(path: &Path, bytes: &[u8]) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (lineno, line) in text(path, bytes)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut xyz = [0.0; 3];
        for c in &mut xyz {
            let field = fields
                .next()
                .ok_or_else(|| parse_error(path, format!("line {}", lineno + 1), "expected 3 coordinates"))?;
            *c = field.parse().map_err(|_| {
                parse_error(
                    path,
                    format!("line {}", lineno + 1),
                    format!("invalid number `{field}`"),
                )
            })?;
        }
        points.push(Point3::from(xyz));
    }
    PointCloud::try_from_points(points)
}

fn parse_csv(path: &Path, bytes: &[u8]) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut columns = [0usize, 1, 2];
    for (lineno, line) in text(path, bytes)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim().trim_matches('"')).collect();
        let location = || format!("line {}", lineno + 1);
        if points.is_empty() && lineno == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
            for (slot, name) in columns.iter_mut().zip(["x", "y", "z"]) {
                *slot = fields
                    .iter()
                    .position(|f| f.eq_ignore_ascii_case(name))
                    .ok_or_else(|| parse_error(path, location(), format!("header lacks column `{name}`")))?;
            }
            continue;
        }
        let mut xyz = [0.0; 3];
        for (c, &col) in xyz.iter_mut().zip(&columns) {
            let field = fields
                .get(col)
                .ok_or_else(|| parse_error(path, location(), "missing column"))?;
            *c = field
                .parse()
                .map_err(|_| parse_error(path, location(), format!("invalid number `{field}`")))?;
        }
        points.push(Point3::from(xyz));
    }
    PointCloud::try_from_points(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
    fn parse(name: &str) -> Option<Scalar> {
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

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String },
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, PartialEq, Eq)]
enum PlyEncoding {
    Ascii,
    BinaryLe,
}

struct PlyHeader {
    encoding: PlyEncoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_ply_header(path: &Path, bytes: &[u8]) -> Result<PlyHeader> {
    let mut reader = BufReader::new(bytes);
    let mut offset = 0;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut lineno = 0;
    loop {
        let mut raw = Vec::new();
        let n = reader.read_until(b'\n', &mut raw).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Err(parse_error(
                path,
                format!("line {}", lineno + 1),
                "unterminated PLY header",
            ));
        }
        offset += n;
        lineno += 1;
        let line = String::from_utf8_lossy(&raw);
        let line = line.trim();
        let location = || format!("line {lineno}");
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["ply"] if lineno == 1 => {}
            _ if lineno == 1 => return Err(parse_error(path, location(), "missing `ply` magic")),
            ["format", "ascii", _] => encoding = Some(PlyEncoding::Ascii),
            ["format", "binary_little_endian", _] => encoding = Some(PlyEncoding::BinaryLe),
            ["format", other, ..] => {
                return Err(parse_error(
                    path,
                    location(),
                    format!("unsupported PLY format `{other}`"),
                ))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_error(path, location(), "invalid element count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", _, _, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_error(path, location(), "property before element"))?;
                el.properties.push(Property::List { name: name.to_string() });
            }
            ["property", ty, name] => {
                let ty = Scalar::parse(ty)
                    .ok_or_else(|| parse_error(path, location(), format!("unknown property type `{ty}`")))?;
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_error(path, location(), "property before element"))?;
                el.properties.push(Property::Scalar {
                    name: name.to_string(),
                    ty,
                });
            }
            ["end_header"] => break,
            _ => {
                return Err(parse_error(
                    path,
                    location(),
                    format!("unrecognized header line `{line}`"),
                ))
            }
        }
    }
    let encoding = encoding.ok_or_else(|| parse_error(path, "header".into(), "missing format line"))?;
    Ok(PlyHeader {
        encoding,
        elements,
        body_offset: offset,
    })
}

/// Column roles within the vertex element.
struct VertexLayout {
    xyz: [usize; 3],
    rgb: Option<[usize; 3]>,
}

fn vertex_layout(path: &Path, el: &Element) -> Result<VertexLayout> {
    let find = |names: &[&str]| {
        el.properties.iter().position(|p| match p {
            Property::Scalar { name, .. } => names.contains(&name.as_str()),
            Property::List { .. } => false,
        })
    };
    let mut xyz = [0; 3];
    for (slot, name) in xyz.iter_mut().zip(["x", "y", "z"]) {
        *slot = find(&[name])
            .ok_or_else(|| parse_error(path, "header".into(), format!("vertex element lacks property `{name}`")))?;
    }
    let rgb = match (find(&["red", "r"]), find(&["green", "g"]), find(&["blue", "b"])) {
        (Some(r), Some(g), Some(b)) => Some([r, g, b]),
        _ => None,
    };
    for (i, p) in el.properties.iter().enumerate() {
        let used = xyz.contains(&i) || rgb.is_some_and(|c| c.contains(&i));
        if !used {
            let name = match p {
                Property::Scalar { name, .. } | Property::List { name } => name,
            };
            warn!("{}: ignoring vertex property `{name}`", path.display());
        }
    }
    Ok(VertexLayout { xyz, rgb })
}

fn parse_ply(path: &Path, bytes: &[u8]) -> Result<PointCloud> {
    let header = parse_ply_header(path, bytes)?;
    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| parse_error(path, "header".into(), "no vertex element"))?;
    let vertex = &header.elements[vertex_pos];
    let layout = vertex_layout(path, vertex)?;
    let body = &bytes[header.body_offset..];
    let (points, colors) = match header.encoding {
        PlyEncoding::Ascii => read_ascii_vertices(path, body, &header, vertex_pos, &layout)?,
        PlyEncoding::BinaryLe => read_binary_vertices(path, body, &header, vertex_pos, &layout, header.body_offset)?,
    };
    match colors {
        Some(colors) => PointCloud::with_colors(points, colors),
        None => PointCloud::try_from_points(points),
    }
}

type Vertices = (Vec<Point3>, Option<Vec<Rgb>>);

fn read_ascii_vertices(
    path: &Path,
    body: &[u8],
    header: &PlyHeader,
    vertex_pos: usize,
    layout: &VertexLayout,
) -> Result<Vertices> {
    let text = text(path, body)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    // Elements before `vertex` occupy one line per record in ASCII.
    for el in &header.elements[..vertex_pos] {
        for _ in 0..el.count {
            lines.next();
        }
    }
    let vertex = &header.elements[vertex_pos];
    let mut points = Vec::with_capacity(vertex.count);
    let mut colors = layout.rgb.map(|_| Vec::with_capacity(vertex.count));
    for record in 0..vertex.count {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_error(path, format!("vertex {record}"), "unexpected end of file"))?;
        let location = || format!("body line {}", lineno + 1);
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_error(path, location(), "invalid number"))?;
        if values.len() < vertex.properties.len() {
            return Err(parse_error(path, location(), "too few values"));
        }
        points.push(Point3::new(
            values[layout.xyz[0]],
            values[layout.xyz[1]],
            values[layout.xyz[2]],
        ));
        if let (Some(colors), Some(rgb)) = (colors.as_mut(), layout.rgb) {
            colors.push(rgb.map(|i| values[i] as u8));
        }
    }
    Ok((points, colors))
}

fn read_binary_vertices(
    path: &Path,
    body: &[u8],
    header: &PlyHeader,
    vertex_pos: usize,
    layout: &VertexLayout,
    base_offset: usize,
) -> Result<Vertices> {
    let mut cursor = 0usize;
    let truncated = |at: usize| parse_error(path, format!("byte {}", base_offset + at), "unexpected end of file");
    for el in &header.elements[..vertex_pos] {
        let mut stride = 0;
        for p in &el.properties {
            match p {
                Property::Scalar { ty, .. } => stride += ty.size(),
                Property::List { name } => {
                    return Err(parse_error(
                        path,
                        "header".into(),
                        format!("cannot skip list property `{name}` preceding vertices"),
                    ))
                }
            }
        }
        cursor += stride * el.count;
    }
    let vertex = &header.elements[vertex_pos];
    let mut offsets = Vec::with_capacity(vertex.properties.len());
    let mut stride = 0;
    for p in &vertex.properties {
        match p {
            Property::Scalar { ty, .. } => {
                offsets.push((stride, *ty));
                stride += ty.size();
            }
            Property::List { name } => {
                return Err(parse_error(
                    path,
                    "header".into(),
                    format!("list property `{name}` in vertex element is unsupported"),
                ))
            }
        }
    }
    let end = cursor + stride * vertex.count;
    if body.len() < end {
        return Err(truncated(body.len()));
    }
    let mut points = Vec::with_capacity(vertex.count);
    let mut colors = layout.rgb.map(|_| Vec::with_capacity(vertex.count));
    for record in body[cursor..end].chunks_exact(stride) {
        let value = |i: usize| {
            let (off, ty) = offsets[i];
            ty.read_le(&record[off..])
        };
        points.push(Point3::new(
            value(layout.xyz[0]),
            value(layout.xyz[1]),
            value(layout.xyz[2]),
        ));
        if let (Some(colors), Some(rgb)) = (colors.as_mut(), layout.rgb) {
            colors.push(rgb.map(|i| value(i) as u8));
        }
    }
    Ok((points, colors))
}

pub fn save_point_cloud(cloud: &PointCloud, path: impl AsRef<Path>, format: CloudFormat) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        CloudFormat::Auto => match extension(path).as_deref() {
            Some("xyz") | Some("txt") | Some("pts") => CloudFormat::Xyz,
            Some("csv") => CloudFormat::Csv,
            _ => CloudFormat::PlyBinaryLe,
        },
        f => f,
    };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_cloud(&mut w, cloud, format)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_cloud(w: &mut impl Write, cloud: &PointCloud, format: CloudFormat) -> std::io::Result<()> {
    match format {
        CloudFormat::Xyz => {
            for p in cloud.points() {
                writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
            }
        }
        CloudFormat::Csv => {
            writeln!(w, "x,y,z")?;
            for p in cloud.points() {
                writeln!(w, "{},{},{}", p.x, p.y, p.z)?;
            }
        }
        CloudFormat::PlyAscii | CloudFormat::PlyBinaryLe | CloudFormat::Auto => {
            let binary = format != CloudFormat::PlyAscii;
            write_ply_header(w, cloud, binary)?;
            let colors = cloud.colors();
            for (i, p) in cloud.points().iter().enumerate() {
                let rgb = colors.map(|c| c[i]);
                if binary {
                    for c in p.to_array() {
                        w.write_all(&c.to_le_bytes())?;
                    }
                    if let Some(rgb) = rgb {
                        w.write_all(&rgb)?;
                    }
                } else {
                    write!(w, "{} {} {}", p.x, p.y, p.z)?;
                    if let Some([r, g, b]) = rgb {
                        write!(w, " {r} {g} {b}")?;
                    }
                    writeln!(w)?;
                }
            }
        }
    }
    Ok(())
}

fn write_ply_header(w: &mut impl Write, cloud: &PointCloud, binary: bool) -> std::io::Result<()> {
    let format = if binary { "binary_little_endian" } else { "ascii" };
    writeln!(w, "ply\nformat {format} 1.0\nelement vertex {}", cloud.len())?;
    writeln!(w, "property double x\nproperty double y\nproperty double z")?;
    if cloud.colors().is_some() {
        writeln!(w, "property uchar red\nproperty uchar green\nproperty uchar blue")?;
    }
    writeln!(w, "end_header")
}

/// Reads an entire file, mapping failures to [`Error::Io`] naming the path.
pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut s = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(PathBuf::from(path), e))
}
