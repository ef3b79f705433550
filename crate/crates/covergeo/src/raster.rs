//! Masks as portable bitmaps with a `key=value` sidecar header, and
//! partition labels as 16-bit graymaps.
//!
//! A 2D lattice maps to one image with the top row holding the largest
//! `y`. A 3D lattice is written as its `z` slices stacked top to bottom,
//! so the image is `dims[0]` wide and `dims[1]·dims[2]` tall; the header
//! records the slice count. Writers always emit P4 (binary) bitmaps;
//! readers accept P1 and P4.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use covergeo_core::partition::Partition;
use covergeo_core::{GridSet, Lattice};

use crate::error::{Error, Result};
use crate::report::SCHEMA;

/// Contents of a sidecar header.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub lattice: Lattice,
    /// Name of the length unit `h` and `origin` are measured in.
    pub unit: String,
}

impl Header {
    pub fn new(lattice: Lattice) -> Self {
        Header { lattice, unit: crate::report::DEFAULT_UNIT.to_string() }
    }

    pub fn to_text(&self) -> String {
        let lat = &self.lattice;
        let n = lat.ndim();
        let dims = lat.dims();
        let origin = lat.origin();
        let mut s = String::new();
        writeln!(s, "schema={SCHEMA}").unwrap();
        writeln!(s, "n={n}").unwrap();
        writeln!(s, "dims={}", join(&dims[..n])).unwrap();
        writeln!(s, "h={}", lat.h()).unwrap();
        writeln!(s, "origin={}", join(&origin[..n])).unwrap();
        writeln!(s, "unit={}", self.unit).unwrap();
        if n == 3 {
            writeln!(s, "slices={}", dims[2]).unwrap();
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Header> {
        let bad = |why: String| Error::format(path, why);
        let mut n = None;
        let mut dims: Option<Vec<usize>> = None;
        let mut h = None;
        let mut origin: Option<Vec<f64>> = None;
        let mut unit = crate::report::DEFAULT_UNIT.to_string();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "schema" if value != SCHEMA => return Err(bad(format!("unsupported schema {value}"))),
                "schema" | "slices" => {}
                "n" => n = Some(value.parse::<usize>().map_err(|e| bad(format!("n: {e}")))?),
                "dims" => dims = Some(parse_list(value).map_err(|e| bad(format!("dims: {e}")))?),
                "h" => h = Some(value.parse::<f64>().map_err(|e| bad(format!("h: {e}")))?),
                "origin" => origin = Some(parse_list(value).map_err(|e| bad(format!("origin: {e}")))?),
                "unit" => unit = value.to_string(),
                other => return Err(bad(format!("unknown key {other}"))),
            }
        }
        let dims = dims.ok_or_else(|| bad("missing dims".into()))?;
        let n = n.unwrap_or(dims.len());
        if n != dims.len() {
            return Err(bad(format!("n = {n} but dims has {} entries", dims.len())));
        }
        let origin = origin.unwrap_or_else(|| vec![0.0; n]);
        let lattice = Lattice::new(&dims, h.unwrap_or(1.0), &origin)?;
        Ok(Header { lattice, unit })
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

/// `mask.pbm` → `mask.hdr`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("hdr")
}

/// Image row `row` and column `x` of a lattice laid out as stacked slices.
fn cell_at(lat: &Lattice, x: usize, row: usize) -> usize {
    let d = lat.dims();
    let (z, r) = (row / d[1], row % d[1]);
    lat.index([x, d[1] - 1 - r, z])
}

fn image_size(lat: &Lattice) -> (usize, usize) {
    let d = lat.dims();
    (d[0], d[1] * d[2])
}

pub fn encode_pbm(set: &GridSet) -> Vec<u8> {
    let lat = set.lattice();
    let (w, rows) = image_size(lat);
    let mut out = format!("P4\n{w} {rows}\n").into_bytes();
    let stride = w.div_ceil(8);
    for row in 0..rows {
        let mut line = vec![0u8; stride];
        for x in 0..w {
            if set.contains(cell_at(lat, x, row)) {
                line[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&line);
    }
    out
}

/// Whitespace-separated header fields of a netpbm file, skipping
/// comments. Returns the fields and the offset of the raster data.
fn pnm_header(bytes: &[u8], fields: usize, path: &Path) -> Result<(Vec<u64>, usize)> {
    let mut out = Vec::with_capacity(fields);
    let mut i = 2;
    while out.len() < fields {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::format(path, "truncated netpbm header"));
        }
        let v = std::str::from_utf8(&bytes[start..i])
            .unwrap()
            .parse()
            .map_err(|_| Error::format(path, "header number out of range"))?;
        out.push(v);
    }
    // Exactly one whitespace byte separates the header from binary data.
    if i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    Ok((out, i))
}

/// Decodes a P1 or P4 bitmap into `(width, height, bits)` in row order.
pub fn decode_pbm(bytes: &[u8], path: &Path) -> Result<(usize, usize, Vec<bool>)> {
    let magic = bytes.get(..2).ok_or_else(|| Error::format(path, "empty file"))?;
    let (dims, start) = match magic {
        b"P1" | b"P4" => pnm_header(bytes, 2, path)?,
        _ => return Err(Error::format(path, "not a P1 or P4 bitmap")),
    };
    let (w, h) = (dims[0] as usize, dims[1] as usize);
    if w == 0 || h == 0 {
        return Err(Error::format(path, "bitmap has no pixels"));
    }
    let mut bits = Vec::with_capacity(w * h);
    if magic == b"P4" {
        let stride = w.div_ceil(8);
        let data = &bytes[start..];
        if data.len() < stride * h {
            return Err(Error::format(path, "bitmap data truncated"));
        }
        for row in 0..h {
            let line = &data[row * stride..(row + 1) * stride];
            bits.extend((0..w).map(|x| line[x / 8] & (0x80 >> (x % 8)) != 0));
        }
    } else {
        let mut i = start;
        while bits.len() < w * h && i < bytes.len() {
            match bytes[i] {
                b'0' => bits.push(false),
                b'1' => bits.push(true),
                b'#' => {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                }
                c if c.is_ascii_whitespace() => {}
                c => return Err(Error::format(path, format!("unexpected byte {c:#04x} in P1 data"))),
            }
            i += 1;
        }
        if bits.len() < w * h {
            return Err(Error::format(path, "bitmap data truncated"));
        }
    }
    Ok((w, h, bits))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Header of `path`'s sidecar, or a unit-cell 2D lattice matching the
/// image when there is no sidecar.
fn header_for(path: &Path, w: usize, rows: usize) -> Result<Header> {
    let side = sidecar_path(path);
    if side.exists() {
        let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let header = Header::parse(&text, &side)?;
        if image_size(&header.lattice) != (w, rows) {
            return Err(Error::format(
                path,
                format!("image is {w}x{rows} but the header describes {:?}", header.lattice.dims()),
            ));
        }
        Ok(header)
    } else {
        Ok(Header::new(Lattice::new(&[w, rows], 1.0, &[0.0, 0.0])?))
    }
}

/// Reads a mask and its sidecar. A mask that reaches the image border is
/// padded with an empty one-cell rim, shifting the origin by one cell.
pub fn read_mask(path: &Path) -> Result<GridSet> {
    let (w, rows, bits) = decode_pbm(&read_bytes(path)?, path)?;
    let header = header_for(path, w, rows)?;
    let lat = header.lattice;
    let mut mask = vec![false; lat.len()];
    for row in 0..rows {
        for x in 0..w {
            mask[cell_at(&lat, x, row)] = bits[row * w + x];
        }
    }
    Ok(GridSet::padded_if_needed(lat, mask)?)
}

/// Writes `set` as a P4 bitmap plus its sidecar header.
pub fn write_mask(path: &Path, set: &GridSet, unit: &str) -> Result<()> {
    write_bytes(path, &encode_pbm(set))?;
    let header = Header { lattice: *set.lattice(), unit: unit.to_string() };
    write_bytes(&sidecar_path(path), header.to_text().as_bytes())
}

/// 16-bit binary graymap of partition labels, 0 outside the set.
pub fn encode_labels(lat: &Lattice, labels: &[u32]) -> Result<Vec<u8>> {
    let max = labels.iter().copied().max().unwrap_or(0);
    if max > u16::MAX as u32 {
        return Err(Error::Config(format!("{max} regions do not fit a 16-bit label raster")));
    }
    let (w, rows) = image_size(lat);
    let mut out = format!("P5\n{w} {rows}\n65535\n").into_bytes();
    for row in 0..rows {
        for x in 0..w {
            out.extend_from_slice(&(labels[cell_at(lat, x, row)] as u16).to_be_bytes());
        }
    }
    Ok(out)
}

pub fn write_labels(path: &Path, p: &Partition, unit: &str) -> Result<()> {
    let lat = p.base.lattice();
    write_bytes(path, &encode_labels(lat, &p.labels)?)?;
    let header = Header { lattice: *lat, unit: unit.to_string() };
    write_bytes(&sidecar_path(path), header.to_text().as_bytes())
}

/// Reads a label raster written by [`write_labels`], in lattice order.
pub fn read_labels(path: &Path) -> Result<(Lattice, Vec<u32>)> {
    let bytes = read_bytes(path)?;
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::format(path, "not a P5 graymap"));
    }
    let (f, start) = pnm_header(&bytes, 3, path)?;
    let (w, rows, maxval) = (f[0] as usize, f[1] as usize, f[2]);
    if maxval < 256 || maxval > 65535 {
        return Err(Error::format(path, "label raster must be 16-bit"));
    }
    let data = &bytes[start..];
    if data.len() < 2 * w * rows {
        return Err(Error::format(path, "graymap data truncated"));
    }
    let lat = header_for(path, w, rows)?.lattice;
    let mut labels = vec![0u32; lat.len()];
    for row in 0..rows {
        for x in 0..w {
            let k = 2 * (row * w + x);
            labels[cell_at(&lat, x, row)] = u16::from_be_bytes([data[k], data[k + 1]]) as u32;
        }
    }
    Ok((lat, labels))
}
