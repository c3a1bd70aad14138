//! Engine-style buffers: the sample grid, the logarithmic depth codec, the
//! packed stencil byte, and the MRB raster file format.

mod depth;
mod mrb;
mod stencil;

pub use depth::{DepthCodec, LinearDepth};
pub use mrb::{read_raster, read_raster_file, write_raster, write_raster_file, MRB_MAGIC, MRB_VERSION};
pub use stencil::{pack_stencil, unpack_stencil, StencilValue};

use crate::error::{Error, Result};

/// Sample encoding of a [`Raster`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    U8 = 0,
    U16 = 1,
    F32 = 2,
}

impl SampleKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SampleKind::U8),
            1 => Some(SampleKind::U16),
            2 => Some(SampleKind::F32),
            _ => None,
        }
    }

    /// Bytes per sample.
    pub fn size(self) -> usize {
        match self {
            SampleKind::U8 => 1,
            SampleKind::U16 => 2,
            SampleKind::F32 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    U8(Vec<u8>),
    U16(Vec<u16>),
    F32(Vec<f32>),
}

impl Samples {
    pub fn kind(&self) -> SampleKind {
        match self {
            Samples::U8(_) => SampleKind::U8,
            Samples::U16(_) => SampleKind::U16,
            Samples::F32(_) => SampleKind::F32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Samples::U8(v) => v.len(),
            Samples::U16(v) => v.len(),
            Samples::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Row-major grid of samples with a top-left origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: u32,
    height: u32,
    samples: Samples,
}

impl Raster {
    /// Validates dimensions, sample count and finiteness of float samples.
    pub fn new(width: u32, height: u32, samples: Samples) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain(format!(
                "raster dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if samples.len() != expected {
            return Err(Error::Domain(format!(
                "raster {width}x{height} needs {expected} samples, got {}",
                samples.len()
            )));
        }
        if let Samples::F32(v) = &samples {
            if let Some(i) = v.iter().position(|s| !s.is_finite()) {
                return Err(Error::Domain(format!("non-finite sample at index {i}")));
            }
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled_u8(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(width, height, Samples::U8(vec![value; width as usize * height as usize]))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn kind(&self) -> SampleKind {
        self.samples.kind()
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn as_u8(&self) -> Option<&[u8]> {
        match &self.samples {
            Samples::U8(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_u16(&self) -> Option<&[u16]> {
        match &self.samples {
            Samples::U16(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_f32(&self) -> Option<&[f32]> {
        match &self.samples {
            Samples::F32(v) => Some(v),
            _ => None,
        }
    }

    /// Mutable U16 access; the kind and length cannot change through it.
    pub fn u16_mut(&mut self) -> Option<&mut [u16]> {
        match &mut self.samples {
            Samples::U16(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn expect_kind(&self, kind: SampleKind, what: &str) -> Result<()> {
        if self.kind() != kind {
            return Err(Error::Format(format!(
                "{what} raster must be {kind:?}, found {:?}",
                self.kind()
            )));
        }
        Ok(())
    }
}
