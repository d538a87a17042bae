//! File formats: the OAMF raw field container, PGM images, CSV tables and
//! marching-squares contours.
//!
//! OAMF layout (little-endian): magic `OAMF`, `u32` version (1), `u32`
//! ndim, `u32` dims\[ndim\] ordered slowest to fastest, `u8` dtype
//! (0 = f64, 1 = complex128 interleaved), `f64` extents\[ndim\] in the
//! same order as dims, `u8` unit tag, then the row-major payload.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{ComplexField2D, Grid2D, Grid3D, ScalarField2D, ScalarField3D, Unit};

const MAGIC: &[u8; 4] = b"OAMF";
const VERSION: u32 = 1;
const MAX_DIMS: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl FieldData {
    pub fn len(&self) -> usize {
        match self {
            FieldData::Real(v) => v.len(),
            FieldData::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Contents of an OAMF file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub dims: Vec<u32>,
    pub extents: Vec<f64>,
    pub unit: Unit,
    pub data: FieldData,
}

impl RawField {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let count: usize = self.dims.iter().map(|&d| d as usize).product();
        if self.dims.len() != self.extents.len() || count != self.data.len() {
            return Err(Error::Format("dims, extents and payload disagree".into()));
        }
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.dims.len() as u32).to_le_bytes())?;
        for d in &self.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        let dtype: u8 = match self.data {
            FieldData::Real(_) => 0,
            FieldData::Complex(_) => 1,
        };
        w.write_all(&[dtype])?;
        for e in &self.extents {
            w.write_all(&e.to_le_bytes())?;
        }
        w.write_all(&[self.unit.tag()])?;
        match &self.data {
            FieldData::Real(v) => {
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            FieldData::Complex(v) => {
                for z in v {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let ndim = read_u32(r)?;
        if ndim == 0 || ndim > MAX_DIMS {
            return Err(Error::Format(format!("unsupported ndim {ndim}")));
        }
        let dims = (0..ndim).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
        let dtype = read_u8(r)?;
        let extents = (0..ndim).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
        let unit = Unit::from_tag(read_u8(r)?)?;
        let count = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
            .ok_or_else(|| Error::Format("dimension overflow".into()))?;
        let data = match dtype {
            0 => FieldData::Real((0..count).map(|_| read_f64(r)).collect::<Result<_>>()?),
            1 => FieldData::Complex(
                (0..count)
                    .map(|_| Ok(Complex64::new(read_f64(r)?, read_f64(r)?)))
                    .collect::<Result<_>>()?,
            ),
            t => return Err(Error::Format(format!("unknown dtype {t}"))),
        };
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(Self { dims, extents, unit, data })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    pub fn from_complex2d(f: &ComplexField2D) -> Self {
        Self {
            dims: vec![f.grid.ny as u32, f.grid.nx as u32],
            extents: vec![f.grid.extent_y, f.grid.extent_x],
            unit: f.grid.unit,
            data: FieldData::Complex(f.values.clone()),
        }
    }

    pub fn from_scalar2d(f: &ScalarField2D) -> Self {
        Self {
            dims: vec![f.grid.ny as u32, f.grid.nx as u32],
            extents: vec![f.grid.extent_y, f.grid.extent_x],
            unit: f.grid.unit,
            data: FieldData::Real(f.values.clone()),
        }
    }

    pub fn from_scalar3d(f: &ScalarField3D) -> Self {
        let g = f.grid;
        Self {
            dims: vec![g.nz as u32, g.ny as u32, g.nx as u32],
            extents: vec![g.extent[2], g.extent[1], g.extent[0]],
            unit: g.unit,
            data: FieldData::Real(f.values.clone()),
        }
    }

    fn grid2d(&self) -> Result<Grid2D> {
        if self.dims.len() != 2 {
            return Err(Error::Format(format!("expected 2 dims, found {}", self.dims.len())));
        }
        Grid2D::new(
            self.dims[1] as usize,
            self.dims[0] as usize,
            self.extents[1],
            self.extents[0],
            self.unit.natural_space(),
            self.unit,
        )
    }

    pub fn to_complex2d(&self) -> Result<ComplexField2D> {
        let grid = self.grid2d()?;
        match &self.data {
            FieldData::Complex(v) => ComplexField2D::new(grid, v.clone()),
            FieldData::Real(v) => {
                ComplexField2D::new(grid, v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            }
        }
    }

    pub fn to_scalar2d(&self) -> Result<ScalarField2D> {
        let grid = self.grid2d()?;
        match &self.data {
            FieldData::Real(v) => ScalarField2D::new(grid, v.clone()),
            FieldData::Complex(_) => Err(Error::Format("expected a real field".into())),
        }
    }

    pub fn to_scalar3d(&self) -> Result<ScalarField3D> {
        if self.dims.len() != 3 {
            return Err(Error::Format(format!("expected 3 dims, found {}", self.dims.len())));
        }
        let grid = Grid3D::new(
            [self.dims[2] as usize, self.dims[1] as usize, self.dims[0] as usize],
            [self.extents[2], self.extents[1], self.extents[0]],
            self.unit.natural_space(),
            self.unit,
        )?;
        match &self.data {
            FieldData::Real(v) => ScalarField3D::new(grid, v.clone()),
            FieldData::Complex(_) => Err(Error::Format("expected a real field".into())),
        }
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Intensity mapping for 16-bit images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    Linear,
    /// `ln(1 + a·v/max)/ln(1 + a)` with `a = 1e4`.
    Log,
}

const LOG_GAIN: f64 = 1e4;

/// Rows of `f` from the highest `y` down, so images appear upright.
fn rows_top_down(grid: &Grid2D) -> impl Iterator<Item = usize> {
    (0..grid.ny).rev()
}

/// 8-bit binary PGM; nonzero samples become 255.
pub fn write_pgm8<W: Write>(w: &mut W, field: &ScalarField2D) -> Result<()> {
    let g = field.grid;
    write!(w, "P5\n{} {}\n255\n", g.nx, g.ny)?;
    let mut row = vec![0u8; g.nx];
    for j in rows_top_down(&g) {
        for (i, px) in row.iter_mut().enumerate() {
            *px = if field.at(i, j) > 0.0 { 255 } else { 0 };
        }
        w.write_all(&row)?;
    }
    Ok(())
}

/// 16-bit big-endian PGM scaled to the field maximum.
pub fn write_pgm16<W: Write>(w: &mut W, field: &ScalarField2D, scaling: Scaling) -> Result<()> {
    let g = field.grid;
    let max = field.max();
    if !(max.is_finite()) || field.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("cannot export a non-finite image".into()));
    }
    let map = |v: f64| -> u16 {
        if max <= 0.0 {
            return 0;
        }
        let s = match scaling {
            Scaling::Linear => v / max,
            Scaling::Log => (1.0 + LOG_GAIN * (v / max).max(0.0)).ln() / (1.0 + LOG_GAIN).ln(),
        };
        (s.clamp(0.0, 1.0) * 65535.0).round() as u16
    };
    write!(w, "P5\n{} {}\n65535\n", g.nx, g.ny)?;
    let mut row = Vec::with_capacity(2 * g.nx);
    for j in rows_top_down(&g) {
        row.clear();
        for i in 0..g.nx {
            row.extend_from_slice(&map(field.at(i, j)).to_be_bytes());
        }
        w.write_all(&row)?;
    }
    Ok(())
}

/// Decoded PGM image, rows top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

/// Reads binary (P5) PGM files as written above.
pub fn read_pgm<R: Read>(r: &mut R) -> Result<Pgm> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::Format("not a binary PGM".into()));
    }
    let parse = |s: String| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM number {s}")));
    let width = parse(token()?)?;
    let height = parse(token()?)?;
    let maxval = parse(token()?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("bad PGM maxval {maxval}")));
    }
    let body = &bytes[pos + 1..];
    let count = width * height;
    let pixels = if maxval < 256 {
        if body.len() != count {
            return Err(Error::Format("PGM payload size mismatch".into()));
        }
        body.iter().map(|&b| b as u16).collect()
    } else {
        if body.len() != 2 * count {
            return Err(Error::Format("PGM payload size mismatch".into()));
        }
        body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    Ok(Pgm { width, height, maxval: maxval as u16, pixels })
}

/// Comma-separated table with a header line; values use Rust's shortest
/// round-trip formatting.
pub fn write_csv<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidArgument(format!(
                "csv row has {} columns, header has {}",
                row.len(),
                header.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Closed polygon in physical coordinates.
pub type Polygon = Vec<(f64, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    /// between nodes (i, j) and (i+1, j)
    H(isize, isize),
    /// between nodes (i, j) and (i, j+1)
    V(isize, isize),
}

/// Closed iso-lines at `level` by marching squares. The field is padded
/// with a sub-threshold border so every contour closes. Saddle cells are
/// resolved by the cell-center average.
pub fn contours(field: &ScalarField2D, level: f64) -> Vec<Polygon> {
    let g = field.grid;
    let (nx, ny) = (g.nx as isize, g.ny as isize);
    let pad = field.min().min(level) - (level.abs() + 1.0);
    let value = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= nx || j >= ny {
            pad
        } else {
            field.at(i as usize, j as usize)
        }
    };
    let coord = |i: isize, j: isize| -> (f64, f64) {
        (
            (i as f64 - (g.nx / 2) as f64) * g.dx(),
            (j as f64 - (g.ny / 2) as f64) * g.dy(),
        )
    };
    let crossing = |e: EdgeId| -> (f64, f64) {
        let (a, b) = match e {
            EdgeId::H(i, j) => ((i, j), (i + 1, j)),
            EdgeId::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (va, vb) = (value(a.0, a.1), value(b.0, b.1));
        let t = if vb == va { 0.5 } else { ((level - va) / (vb - va)).clamp(0.0, 1.0) };
        let (pa, pb) = (coord(a.0, a.1), coord(b.0, b.1));
        (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
    };

    let mut links: HashMap<EdgeId, Vec<EdgeId>> = HashMap::new();
    let mut link = |a: EdgeId, b: EdgeId| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for j in -1..ny {
        for i in -1..nx {
            let c = [value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)];
            let inside: Vec<bool> = c.iter().map(|&v| v >= level).collect();
            let edges = [
                EdgeId::H(i, j),
                EdgeId::V(i + 1, j),
                EdgeId::H(i, j + 1),
                EdgeId::V(i, j),
            ];
            let cut: Vec<usize> = (0..4).filter(|&e| inside[e] != inside[(e + 1) % 4]).collect();
            match cut.len() {
                2 => link(edges[cut[0]], edges[cut[1]]),
                4 => {
                    let center_in = 0.25 * c.iter().sum::<f64>() >= level;
                    // isolate the corners that differ from the center
                    let isolate_even = inside[0] != center_in;
                    if isolate_even {
                        link(edges[3], edges[0]);
                        link(edges[1], edges[2]);
                    } else {
                        link(edges[0], edges[1]);
                        link(edges[2], edges[3]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut polygons = Vec::new();
    let mut seen: HashMap<EdgeId, bool> = HashMap::new();
    let mut keys: Vec<EdgeId> = links.keys().copied().collect();
    keys.sort_by_key(|e| match *e {
        EdgeId::H(i, j) => (j, i, 0),
        EdgeId::V(i, j) => (j, i, 1),
    });
    for start in keys {
        if seen.contains_key(&start) {
            continue;
        }
        let mut poly = Vec::new();
        let mut prev = start;
        let mut cur = start;
        loop {
            seen.insert(cur, true);
            poly.push(crossing(cur));
            let next = links[&cur].iter().copied().find(|&n| n != prev && !seen.contains_key(&n));
            match next {
                Some(n) => {
                    prev = cur;
                    cur = n;
                }
                None => break,
            }
        }
        if poly.len() >= 3 {
            polygons.push(poly);
        }
    }
    polygons
}

/// Contours as CSV rows `contour,x,y`.
pub fn write_contours_csv<W: Write>(w: &mut W, polygons: &[Polygon]) -> Result<()> {
    let rows: Vec<Vec<f64>> = polygons
        .iter()
        .enumerate()
        .flat_map(|(id, p)| p.iter().map(move |&(x, y)| vec![id as f64, x, y]))
        .collect();
    write_csv(w, &["contour", "x", "y"], &rows)
}

/// Convenience wrapper creating the file at `path`.
pub fn with_file<F>(path: impl AsRef<Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    write(&mut w)?;
    w.flush()?;
    Ok(())
}
