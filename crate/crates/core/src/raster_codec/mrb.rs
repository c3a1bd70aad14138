//! MRB: a raw little-endian raster container.
//!
//! Layout: `"MRXB"` · version `u8` (= 1) · sample kind `u8` (0 = U8, 1 = U16,
//! 2 = F32) · width `u32` · height `u32` · `width × height` samples, row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{Raster, SampleKind, Samples};
use crate::error::{Error, Result};

pub const MRB_MAGIC: [u8; 4] = *b"MRXB";
pub const MRB_VERSION: u8 = 1;
const HEADER_LEN: usize = 14;

pub fn write_raster<W: Write>(r: &Raster, mut out: W) -> std::io::Result<()> {
    let n = r.width() as usize * r.height() as usize;
    let mut buf = Vec::with_capacity(HEADER_LEN + n * r.kind().size());
    buf.extend_from_slice(&MRB_MAGIC);
    buf.push(MRB_VERSION);
    buf.push(r.kind().code());
    buf.extend_from_slice(&r.width().to_le_bytes());
    buf.extend_from_slice(&r.height().to_le_bytes());
    match r.samples() {
        Samples::U8(v) => buf.extend_from_slice(v),
        Samples::U16(v) => v.iter().for_each(|s| buf.extend_from_slice(&s.to_le_bytes())),
        Samples::F32(v) => v.iter().for_each(|s| buf.extend_from_slice(&s.to_le_bytes())),
    }
    out.write_all(&buf)
}

pub fn read_raster<R: Read>(mut input: R) -> Result<Raster> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("reading MRB stream: {e}")))?;
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<Raster> {
    if bytes.len() < 4 || bytes[..4] != MRB_MAGIC {
        return Err(Error::Format("bad MRB magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if bytes[4] != MRB_VERSION {
        return Err(Error::Format(format!("unsupported MRB version {}", bytes[4])));
    }
    let kind = SampleKind::from_code(bytes[5])
        .ok_or_else(|| Error::Format(format!("unknown MRB sample kind {}", bytes[5])))?;
    let width = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("MRB dimensions must be positive, got {width}x{height}")));
    }
    let n = width as usize * height as usize;
    let payload = &bytes[HEADER_LEN..];
    let expected = n * kind.size();
    if payload.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "{} trailing bytes after MRB payload",
            payload.len() - expected
        )));
    }
    let samples = match kind {
        SampleKind::U8 => Samples::U8(payload.to_vec()),
        SampleKind::U16 => Samples::U16(
            payload
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
        SampleKind::F32 => Samples::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ),
    };
    Raster::new(width, height, samples).map_err(|e| match e {
        Error::Domain(msg) => Error::Format(msg),
        other => other,
    })
}

pub fn write_raster_file(r: &Raster, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_raster(r, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_raster_file(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| e.in_file(path))
}
